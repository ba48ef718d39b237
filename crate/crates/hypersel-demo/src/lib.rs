//! Browser demo bindings. Every export returns a JSON string so the page
//! needs no generated TypeScript glue beyond the wasm loader.

use std::sync::OnceLock;

use wasm_bindgen::prelude::wasm_bindgen;

use hypersel::algorithms::{space_dim_by_name, LevySampler, ALGORITHM_NAMES, SPACE_NAMES};
use hypersel::data::{parse_libsvm, Dataset};
use hypersel::hypercomplex::Hypercomplex;
use hypersel::mapping::{sigmoid, span, Bounds};
use hypersel::rng::{stream_rng, STREAM_MASTER};
use hypersel::{run_experiment, Result, RunConfig, Technique};

/// The page embeds the demo dataset so it works from a static file server.
const WINE: &str = include_str!("../../../data/wine.libsvm");

fn wine() -> &'static Dataset {
    static DATASET: OnceLock<Dataset> = OnceLock::new();
    DATASET.get_or_init(|| {
        parse_libsvm(WINE.as_bytes(), "wine", None).expect("embedded dataset parses")
    })
}

fn json_or_error(result: Result<serde_json::Value>) -> String {
    match result {
        Ok(value) => value.to_string(),
        Err(e) => serde_json::json!({ "error": e.to_string() }).to_string(),
    }
}

/// Names the page can offer in its controls.
#[wasm_bindgen]
pub fn demo_options() -> String {
    serde_json::json!({
        "algorithms": ALGORITHM_NAMES,
        "spaces": SPACE_NAMES.iter().map(|(name, _)| *name).collect::<Vec<_>>(),
    })
    .to_string()
}

/// Probability-of-selection curve: every coefficient of one variable is set
/// to t, swept over [0, 1], and mapped through span and sigmoid.
#[wasm_bindgen]
pub fn transfer_curve(p: f64, space: &str, lower: f64, upper: f64, samples: usize) -> String {
    json_or_error((|| {
        let dim = space_dim_by_name(space)?;
        let bounds = Bounds::new(lower, upper)?;
        let samples = samples.clamp(2, 4096);
        let mut points = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = i as f64 / (samples - 1) as f64;
            let q = Hypercomplex::new(vec![t; dim])?;
            let s = span(&q, p, bounds)?;
            points.push(serde_json::json!({ "t": t, "span": s, "probability": sigmoid(s) }));
        }
        Ok(serde_json::json!({ "space": space, "p": p, "points": points }))
    })())
}

/// A seeded 2-D random walk with Levy-distributed step lengths.
#[wasm_bindgen]
pub fn levy_path(beta: f64, steps: usize, seed: u64) -> String {
    json_or_error((|| {
        let sampler = LevySampler::new(beta)?;
        let mut rng = stream_rng(seed, STREAM_MASTER);
        let steps = steps.clamp(1, 20_000);
        let (mut x, mut y) = (0.0, 0.0);
        let mut points = vec![serde_json::json!({ "x": 0.0, "y": 0.0 })];
        for _ in 0..steps {
            x += sampler.sample(&mut rng);
            y += sampler.sample(&mut rng);
            points.push(serde_json::json!({ "x": x, "y": y }));
        }
        Ok(serde_json::json!({ "beta": beta, "points": points }))
    })())
}

/// One seeded feature-selection run on the embedded dataset.
#[wasm_bindgen]
pub fn run_demo(algorithm: &str, space: &str, agents: usize, iters: usize, seed: u64) -> String {
    json_or_error((|| {
        let technique = Technique::new(algorithm, space_dim_by_name(space)?);
        let config = RunConfig {
            n_agents: agents.clamp(2, 60),
            n_iterations: iters.clamp(1, 200),
            ..RunConfig::default()
        };
        let dataset = wine();
        let record = run_experiment(dataset, &technique, seed, &config)?;
        Ok(serde_json::json!({
            "dataset": dataset.name,
            "technique": technique.label(),
            "seed": seed,
            "trace": record.trace,
            "best_fitness": record.best_fitness,
            "test_accuracy": record.test_accuracy,
            "test_accuracy_plain": record.test_accuracy_plain,
            "mask": record.best_mask,
            "n_selected": record.n_selected,
            "n_features": dataset.n_features,
            "evaluations": record.evaluations,
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).expect("valid JSON")
    }

    #[test]
    fn options_list_everything() {
        let v = parse(&demo_options());
        assert_eq!(v["algorithms"].as_array().unwrap().len(), 7);
        assert_eq!(v["spaces"], serde_json::json!(["std", "quat", "oct"]));
    }

    #[test]
    fn transfer_curve_spans_the_bounds() {
        let v = parse(&transfer_curve(2.0, "quat", -20.0, 20.0, 101));
        let points = v["points"].as_array().unwrap();
        assert_eq!(points.len(), 101);
        assert_eq!(points[0]["span"], -20.0);
        assert_eq!(points[100]["span"], 20.0);
        let p0 = points[0]["probability"].as_f64().unwrap();
        let p100 = points[100]["probability"].as_f64().unwrap();
        assert!(p0 < 1e-8 && p100 > 1.0 - 1e-8, "sigmoid saturates at the bounds");
    }

    #[test]
    fn levy_path_is_seeded_and_sized() {
        let a = levy_path(1.5, 64, 7);
        let b = levy_path(1.5, 64, 7);
        assert_eq!(a, b, "same seed, same walk");
        let v = parse(&a);
        assert_eq!(v["points"].as_array().unwrap().len(), 65);
        assert_ne!(a, levy_path(1.5, 64, 8), "different seed, different walk");
    }

    #[test]
    fn run_demo_reports_a_complete_record() {
        let a = run_demo("pso", "quat", 6, 4, 3);
        assert_eq!(a, run_demo("pso", "quat", 6, 4, 3), "seeded run is reproducible");
        let v = parse(&a);
        assert_eq!(v["technique"], "pso-quat");
        assert_eq!(v["trace"].as_array().unwrap().len(), 4);
        assert_eq!(v["n_features"], 13);
        assert_eq!(v["mask"].as_array().unwrap().len(), 13);
        let n_selected = v["n_selected"].as_u64().unwrap();
        assert!((1..=13).contains(&n_selected));
        let acc = v["test_accuracy"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&acc));
    }

    #[test]
    fn bad_inputs_come_back_as_json_errors() {
        assert!(parse(&run_demo("gwo", "quat", 6, 4, 3))["error"].is_string());
        assert!(parse(&transfer_curve(2.0, "sedenion", -20.0, 20.0, 10))["error"].is_string());
        assert!(parse(&levy_path(0.0, 10, 1))["error"].is_string());
    }
}
