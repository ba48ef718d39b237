//! Batch experiment runner: seeded feature-selection runs, report artifacts,
//! significance marking, and the no-selection baseline.

use std::error::Error;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hypersel::algorithms::{algorithm_by_name, space_dim_by_name, AlgorithmParams, ALGORITHM_NAMES, SPACE_NAMES};
use hypersel::data::{parse_libsvm, Dataset, SplitSpec};
use hypersel::mapping::Bounds;
use hypersel::selection::{
    run_baseline, run_batch, summarize, RunConfig, Technique, TechniqueRuns,
};
use hypersel::stats::{mark_best, PValueMode};

const SUMMARY_SCHEMA: &str = "hypersel-summary-v1";
const RUNS_SCHEMA: &str = "hypersel-runs-v1";
const TRACE_SCHEMA: &str = "hypersel-trace-v1";
const STATS_SCHEMA: &str = "hypersel-stats-v1";

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "hypersel", version, about = "Feature selection by meta-heuristic search in hypercomplex spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of seeded experiments and write report artifacts.
    Run(RunArgs),
    /// Read a runs table and mark the statistically-best techniques.
    Stats(StatsArgs),
    /// Score the full feature set with no optimization.
    Baseline(BaselineArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; command-line flags override its values.
    #[arg(long, env = "HYPERSEL_CONFIG")]
    config: Option<PathBuf>,
    /// Dataset in libsvm format.
    #[arg(long, env = "HYPERSEL_DATASET")]
    dataset: Option<PathBuf>,
    /// Algorithms to run, comma separated (abc|aiwpso|ba|cs|fa|fpa|pso).
    #[arg(long, value_delimiter = ',', env = "HYPERSEL_ALGO")]
    algo: Vec<String>,
    /// Coefficient spaces, comma separated (std|quat|oct).
    #[arg(long, value_delimiter = ',', env = "HYPERSEL_SPACE")]
    space: Vec<String>,
    /// Seeded runs per technique.
    #[arg(long, env = "HYPERSEL_RUNS")]
    runs: Option<usize>,
    /// Population size.
    #[arg(long, env = "HYPERSEL_AGENTS")]
    agents: Option<usize>,
    /// Update iterations per run.
    #[arg(long, env = "HYPERSEL_ITERS")]
    iters: Option<usize>,
    /// Base seed; run k uses seed base+k.
    #[arg(long, env = "HYPERSEL_SEED")]
    seed: Option<u64>,
    /// Minkowski norm order.
    #[arg(long = "p-norm", env = "HYPERSEL_P_NORM")]
    p_norm: Option<f64>,
    /// Lower span bound.
    #[arg(long, allow_hyphen_values = true, env = "HYPERSEL_LOWER")]
    lower: Option<f64>,
    /// Upper span bound.
    #[arg(long, allow_hyphen_values = true, env = "HYPERSEL_UPPER")]
    upper: Option<f64>,
    /// Worker thread cap; 1 forces serial execution.
    #[arg(long, env = "HYPERSEL_JOBS")]
    jobs: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long, env = "HYPERSEL_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// runs.csv produced by the run subcommand.
    results: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long, env = "HYPERSEL_DATASET")]
    dataset: PathBuf,
    /// Base seed; run k uses seed base+k.
    #[arg(long, default_value_t = 1, env = "HYPERSEL_SEED")]
    seed: u64,
    /// Number of seeded splits to average over.
    #[arg(long, default_value_t = 1, env = "HYPERSEL_RUNS")]
    runs: usize,
}

/// Optional overrides read from the TOML document.
#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    dataset: Option<PathBuf>,
    algorithms: Vec<String>,
    spaces: Vec<String>,
    runs: Option<usize>,
    agents: Option<usize>,
    iterations: Option<usize>,
    seed: Option<u64>,
    p_norm: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    split: Option<SplitSpec>,
    params: Option<AlgorithmParams>,
}

/// The fully resolved experiment description embedded in every artifact.
#[derive(Serialize)]
struct Resolved {
    dataset: PathBuf,
    algorithms: Vec<String>,
    spaces: Vec<String>,
    runs: usize,
    agents: usize,
    iterations: usize,
    seed: u64,
    p_norm: f64,
    lower: f64,
    upper: f64,
    jobs: Option<usize>,
    out: PathBuf,
    split: SplitSpec,
    params: AlgorithmParams,
}

fn resolve(args: &RunArgs) -> CliResult<Resolved> {
    let file: FileConfig = match &args.config {
        Some(path) => toml::from_str(&fs::read_to_string(path)?)?,
        None => FileConfig::default(),
    };
    let defaults = RunConfig::default();
    let pick =
        |flag: &[String], file: &[String], all: Vec<String>| -> Vec<String> {
            if !flag.is_empty() {
                flag.to_vec()
            } else if !file.is_empty() {
                file.to_vec()
            } else {
                all
            }
        };
    let resolved = Resolved {
        dataset: args
            .dataset
            .clone()
            .or(file.dataset)
            .ok_or("no dataset given (use --dataset or the config file)")?,
        algorithms: pick(
            &args.algo,
            &file.algorithms,
            ALGORITHM_NAMES.iter().map(|s| s.to_string()).collect(),
        ),
        spaces: pick(
            &args.space,
            &file.spaces,
            SPACE_NAMES.iter().map(|(s, _)| s.to_string()).collect(),
        ),
        runs: args.runs.or(file.runs).unwrap_or(25),
        agents: args.agents.or(file.agents).unwrap_or(defaults.n_agents),
        iterations: args.iters.or(file.iterations).unwrap_or(defaults.n_iterations),
        seed: args.seed.or(file.seed).unwrap_or(1),
        p_norm: args.p_norm.or(file.p_norm).unwrap_or(defaults.p),
        lower: args.lower.or(file.lower).unwrap_or(defaults.bounds.lower()),
        upper: args.upper.or(file.upper).unwrap_or(defaults.bounds.upper()),
        jobs: args.jobs.or(file.jobs),
        out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("results")),
        split: file.split.unwrap_or_default(),
        params: file.params.unwrap_or_default(),
    };
    Ok(resolved)
}

impl Resolved {
    fn run_config(&self) -> CliResult<RunConfig> {
        let cfg = RunConfig {
            n_agents: self.agents,
            n_iterations: self.iterations,
            p: self.p_norm,
            bounds: Bounds::new(self.lower, self.upper)?,
            split: self.split,
            params: self.params.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn techniques(&self) -> CliResult<Vec<Technique>> {
        let mut techniques = Vec::new();
        for algorithm in &self.algorithms {
            algorithm_by_name(algorithm, &self.params)?;
            for space in &self.spaces {
                techniques.push(Technique::new(algorithm, space_dim_by_name(space)?));
            }
        }
        Ok(techniques)
    }
}

fn load_dataset(path: &Path) -> CliResult<Dataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let file = File::open(path).map_err(|e| format!("open {}: {e}", path.display()))?;
    Ok(parse_libsvm(BufReader::new(file), &name, None)?)
}

fn cmd_run(args: &RunArgs) -> CliResult<()> {
    let resolved = resolve(args)?;
    let config = resolved.run_config()?;
    let techniques = resolved.techniques()?;
    let dataset = load_dataset(&resolved.dataset)?;

    let batch = run_batch(
        &dataset,
        &techniques,
        resolved.runs,
        resolved.seed,
        &config,
        resolved.jobs,
    )?;

    write_artifacts(&resolved, &dataset, &batch)?;

    println!("dataset,algorithm,space,mean_acc,mean_feats,mean_time,mean_acc_plain");
    for runs in &batch {
        let row = summarize(&dataset.name, runs);
        println!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            row.dataset, row.algorithm, row.space, row.mean_acc, row.mean_feats, row.mean_time,
            row.mean_acc_plain
        );
    }
    eprintln!("artifacts written to {}", resolved.out.display());
    Ok(())
}

fn write_artifacts(resolved: &Resolved, dataset: &Dataset, batch: &[TechniqueRuns]) -> CliResult<()> {
    let out = &resolved.out;
    let traces_dir = out.join("traces");
    fs::create_dir_all(&traces_dir)?;
    let config_json = serde_json::to_string(resolved)?;

    let mut summary = String::new();
    writeln!(summary, "# schema = {SUMMARY_SCHEMA}")?;
    writeln!(summary, "# config = {config_json}")?;
    writeln!(summary, "dataset,algorithm,space,mean_acc,mean_feats,mean_time,mean_acc_plain")?;
    for runs in batch {
        let row = summarize(&dataset.name, runs);
        writeln!(
            summary,
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            row.dataset, row.algorithm, row.space, row.mean_acc, row.mean_feats, row.mean_time,
            row.mean_acc_plain
        )?;
    }
    fs::write(out.join("summary.csv"), summary)?;

    // Technique columns, run rows; the table the stats subcommand consumes.
    let mut runs_csv = String::new();
    writeln!(runs_csv, "# schema = {RUNS_SCHEMA}")?;
    writeln!(runs_csv, "# config = {config_json}")?;
    let labels: Vec<String> = batch.iter().map(|t| t.technique.label()).collect();
    writeln!(runs_csv, "run,seed,{}", labels.join(","))?;
    for run_idx in 0..resolved.runs {
        write!(runs_csv, "{},{}", run_idx, resolved.seed + run_idx as u64)?;
        for technique in batch {
            write!(runs_csv, ",{}", technique.records[run_idx].test_accuracy)?;
        }
        writeln!(runs_csv)?;
    }
    fs::write(out.join("runs.csv"), runs_csv)?;

    let mut jsonl = String::new();
    writeln!(
        jsonl,
        "{}",
        serde_json::json!({ "schema": RUNS_SCHEMA, "config": resolved })
    )?;
    for technique in batch {
        for record in &technique.records {
            writeln!(jsonl, "{}", serde_json::to_string(record)?)?;
        }
    }
    fs::write(out.join("runs.jsonl"), jsonl)?;

    for technique in batch {
        for (run_idx, record) in technique.records.iter().enumerate() {
            let mut trace = String::new();
            writeln!(trace, "# schema = {TRACE_SCHEMA}")?;
            writeln!(trace, "# config = {config_json}")?;
            writeln!(trace, "# technique = {}", technique.technique.label())?;
            writeln!(trace, "# seed = {}", record.seed)?;
            writeln!(trace, "iteration,best_fitness")?;
            for (iteration, fitness) in record.trace.iter().enumerate() {
                writeln!(trace, "{},{}", iteration + 1, fitness)?;
            }
            let name = format!("{}-run{run_idx:02}.csv", technique.technique.label());
            fs::write(traces_dir.join(name), trace)?;
        }
    }
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> CliResult<()> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(&args.results)
        .map_err(|e| format!("read {}: {e}", args.results.display()))?;
    let headers = reader.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "run" || &headers[1] != "seed" {
        return Err(format!(
            "{} does not look like a runs table (want run,seed,<technique...>)",
            args.results.display()
        )
        .into());
    }
    let labels: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for record in reader.records() {
        let record = record?;
        for (column, sample) in samples.iter_mut().enumerate() {
            let field = record
                .get(column + 2)
                .ok_or_else(|| format!("short row in {}", args.results.display()))?;
            sample.push(field.parse()?);
        }
    }
    if samples.iter().any(|s| s.is_empty()) {
        return Err("runs table has no data rows".into());
    }

    let bold = mark_best(&samples, PValueMode::Auto)?;
    println!("# schema = {STATS_SCHEMA}");
    println!("technique,mean_acc,bold");
    for ((label, sample), flag) in labels.iter().zip(&samples).zip(&bold) {
        let mean = sample.iter().sum::<f64>() / sample.len() as f64;
        println!("{label},{mean:.6},{flag}");
    }
    Ok(())
}

fn cmd_baseline(args: &BaselineArgs) -> CliResult<()> {
    if args.runs == 0 {
        return Err("--runs must be at least 1".into());
    }
    let dataset = load_dataset(&args.dataset)?;
    let config = RunConfig::default();
    println!("# schema = hypersel-baseline-v1");
    println!("seed,accuracy,accuracy_plain,n_selected,n_features");
    let mut total = 0.0;
    for seed in args.seed..args.seed + args.runs as u64 {
        let record = run_baseline(&dataset, seed, &config)?;
        total += record.test_accuracy;
        println!(
            "{seed},{:.6},{:.6},{},{}",
            record.test_accuracy, record.test_accuracy_plain, record.n_selected,
            dataset.n_features
        );
    }
    println!("mean,{:.6},,,", total / args.runs as f64);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Baseline(args) => cmd_baseline(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
