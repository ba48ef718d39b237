//! Wilcoxon signed-rank test for paired technique comparison, and the
//! "bold set" rule built on it: the technique with the best mean plus every
//! technique not significantly different from it at the 5% level.
//!
//! Ranks are kept as doubled integers (a tie-averaged rank is always a
//! multiple of one half), so the exact-mode null distribution is computed
//! in integer arithmetic with a single final division.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Pairwise significance level used for the bold set.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Largest sample the exact null enumeration switches to automatically;
/// beyond this the normal approximation with tie and continuity
/// corrections takes over.
pub const EXACT_LIMIT: usize = 20;

/// Hard cap for explicitly requested exact mode; the subset counts are held
/// in 128-bit integers.
const EXACT_HARD_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMode {
    /// Full enumeration of the 2^n sign assignments (via subset-sum counts).
    Exact,
    /// Normal approximation with tie correction and continuity correction.
    NormalApprox,
    /// Exact up to EXACT_LIMIT effective pairs, approximation beyond.
    Auto,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// W = min(W+, W-) in ordinary (unscaled) rank units.
    pub w_statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_effective: usize,
    /// Two-sided p-value in [0, 1].
    pub p_value: f64,
    /// p_value < 0.05.
    pub significant: bool,
    /// Which computation actually ran (Auto resolves to one of the others).
    pub mode_used: PValueMode,
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped (Wilcoxon's original treatment); ties in
/// |difference| receive average ranks. With no nonzero differences the
/// result carries n_effective = 0 and p = 1.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], mode: PValueMode) -> Result<WilcoxonResult> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::BadPairedSample { left: x.len(), right: y.len() });
    }
    let mut diffs = Vec::with_capacity(x.len());
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        let d = a - b;
        if !d.is_finite() {
            return Err(Error::Config(format!("non-finite difference at pair {i}")));
        }
        if d != 0.0 {
            diffs.push(d);
        }
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_statistic: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            n_effective: 0,
            p_value: 1.0,
            significant: false,
            mode_used: mode_for(mode, 0),
        });
    }

    let scaled = scaled_ranks(&diffs);
    let total: u64 = scaled.iter().sum();
    debug_assert_eq!(total, (n * (n + 1)) as u64, "scaled ranks must sum to n(n+1)");
    let w_plus_scaled: u64 = diffs
        .iter()
        .zip(&scaled)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let w_minus_scaled = total - w_plus_scaled;
    let w_scaled = w_plus_scaled.min(w_minus_scaled);

    let mode_used = mode_for(mode, n);
    let p_value = match mode_used {
        PValueMode::Exact => exact_p(&scaled, w_scaled, n)?,
        PValueMode::NormalApprox => approx_p(&diffs, &scaled, w_scaled),
        PValueMode::Auto => unreachable!("mode_for resolves Auto"),
    };
    Ok(WilcoxonResult {
        w_statistic: w_scaled as f64 / 2.0,
        w_plus: w_plus_scaled as f64 / 2.0,
        w_minus: w_minus_scaled as f64 / 2.0,
        n_effective: n,
        p_value,
        significant: p_value < SIGNIFICANCE_LEVEL,
        mode_used,
    })
}

fn mode_for(mode: PValueMode, n: usize) -> PValueMode {
    match mode {
        PValueMode::Auto => {
            if n <= EXACT_LIMIT {
                PValueMode::Exact
            } else {
                PValueMode::NormalApprox
            }
        }
        other => other,
    }
}

/// Doubled average ranks of |d|: the rank group spanning 1-based positions
/// a..=b gets 2 * (a+b)/2 = a+b, an integer.
fn scaled_ranks(diffs: &[f64]) -> Vec<u64> {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diffs[a].abs().total_cmp(&diffs[b].abs()));
    let mut scaled = vec![0u64; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && diffs[order[j]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        let s = (i + 1 + j) as u64;
        for &idx in &order[i..j] {
            scaled[idx] = s;
        }
        i = j;
    }
    scaled
}

/// Exact two-sided p: with T the observed min statistic (doubled units) and
/// S the total doubled rank sum, count sign assignments with W+ <= T and
/// with W+ >= S - T over the full null distribution; the two counts are
/// equal by the complementation bijection. p = min(1, (c_le + c_ge) / 2^n).
fn exact_p(scaled: &[u64], w_scaled: u64, n: usize) -> Result<f64> {
    if n > EXACT_HARD_CAP {
        return Err(Error::Config(format!(
            "exact mode supports at most {EXACT_HARD_CAP} effective pairs, got {n}"
        )));
    }
    let total: u64 = scaled.iter().sum();
    let mut dist = vec![0u128; total as usize + 1];
    dist[0] = 1;
    for &r in scaled {
        for s in (r..=total).rev() {
            dist[s as usize] += dist[(s - r) as usize];
        }
    }
    let c_le: u128 = dist[..=w_scaled as usize].iter().sum();
    let c_ge: u128 = dist[(total - w_scaled) as usize..].iter().sum();
    debug_assert_eq!(c_le, c_ge, "complementation bijection must hold");
    let p = (c_le + c_ge) as f64 / (n as f64).exp2();
    Ok(p.min(1.0))
}

/// Normal approximation: z = (W - mu + 1/2) / sigma with
/// mu = n(n+1)/4 and sigma^2 = n(n+1)(2n+1)/24 - sum(t^3 - t)/48 over tie
/// groups t; two-sided p = 2 Phi(z) clamped to [0, 1].
fn approx_p(diffs: &[f64], scaled: &[u64], w_scaled: u64) -> f64 {
    let n = diffs.len() as f64;
    let mu = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted: Vec<u64> = scaled.to_vec();
    sorted.sort_unstable();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += (t * t * t - t) / 48.0;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return 1.0;
    }
    let w = w_scaled as f64 / 2.0;
    let z = (w - mu + 0.5) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * normal.cdf(z)).clamp(0.0, 1.0)
}

/// The bold set over techniques' paired accuracy vectors: the highest mean
/// is best (first index on ties), and every technique whose pairwise test
/// against the best is not significant at the 5% level joins it.
pub fn mark_best(samples: &[Vec<f64>], mode: PValueMode) -> Result<Vec<bool>> {
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    let n = samples[0].len();
    for s in samples {
        if s.is_empty() || s.len() != n {
            return Err(Error::BadPairedSample { left: n, right: s.len() });
        }
    }
    let means: Vec<f64> = samples.iter().map(|s| s.iter().sum::<f64>() / n as f64).collect();
    let best = means
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.total_cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut bold = vec![false; samples.len()];
    for (i, sample) in samples.iter().enumerate() {
        if i == best {
            bold[i] = true;
            continue;
        }
        let result = wilcoxon_signed_rank(sample, &samples[best], mode)?;
        bold[i] = result.p_value >= SIGNIFICANCE_LEVEL;
    }
    Ok(bold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exact(x: &[f64], y: &[f64]) -> WilcoxonResult {
        wilcoxon_signed_rank(x, y, PValueMode::Exact).unwrap()
    }

    /// Brute force over all 2^n sign assignments of the observed |d| ranks;
    /// an independent implementation of the same two-sided convention.
    fn enumerated_p(diffs: &[f64]) -> f64 {
        let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
        let n = nonzero.len();
        if n == 0 {
            return 1.0;
        }
        let scaled = scaled_ranks(&nonzero);
        let total: u64 = scaled.iter().sum();
        let observed_plus: u64 = nonzero
            .iter()
            .zip(&scaled)
            .filter(|(d, _)| **d > 0.0)
            .map(|(_, r)| *r)
            .sum();
        let t = observed_plus.min(total - observed_plus);
        let mut c_le = 0u64;
        let mut c_ge = 0u64;
        for mask in 0u64..(1u64 << n) {
            let w_plus: u64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| scaled[k]).sum();
            if w_plus <= t {
                c_le += 1;
            }
            if w_plus >= total - t {
                c_ge += 1;
            }
        }
        (((c_le + c_ge) as f64) / (n as f64).exp2()).min(1.0)
    }

    #[test]
    fn all_zero_differences_mean_no_evidence() {
        let x = [1.0, 2.0, 3.0];
        let r = exact(&x, &x);
        assert_eq!(r.n_effective, 0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.significant);
    }

    #[test]
    fn six_positive_differences() {
        let y = [0.0; 6];
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let r = exact(&x, &y);
        assert_eq!(r.w_statistic, 0.0);
        assert_eq!(r.p_value, 0.03125, "2 of 64 sign assignments are as extreme");
        assert!(r.significant);
    }

    #[test]
    fn tied_opposite_pair() {
        let x = [1.0, 0.0];
        let y = [0.0, 1.0];
        let r = exact(&x, &y);
        assert_eq!(r.n_effective, 2);
        assert_eq!(r.w_statistic, 1.5, "both |d|=1 share rank 1.5");
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn matches_sign_enumeration_on_tied_fixtures() {
        let fixtures: [&[f64]; 6] = [
            &[1.0, -1.0, 2.0, -2.0, 3.0],
            &[0.5, 0.5, 0.5, -0.5],
            &[1.0, 2.0, 2.0, 2.0, -3.0, 3.0, -4.0],
            &[-1.0, -1.0, -1.0],
            &[2.0, -2.0],
            &[1.0, 1.5, -1.5, 2.5, 2.5, -2.5, 3.0, 0.25],
        ];
        for diffs in fixtures {
            let y = vec![0.0; diffs.len()];
            let r = exact(diffs, &y);
            assert_eq!(
                r.p_value,
                enumerated_p(diffs),
                "DP and enumeration disagree on {diffs:?}"
            );
        }
    }

    #[test]
    fn normal_approximation_reference_values() {
        // Independently computed (rank/tie/continuity conventions as in the
        // module docs); tolerance covers operation-order rounding.
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1e-30);

        let x: Vec<f64> = (1..=25).map(|i| i as f64).collect();
        let y: Vec<f64> = (1..=25)
            .map(|i| {
                let bump = if i % 7 == 0 { 1.5 } else { -0.4 };
                i as f64 - (0.3 * i as f64 + bump)
            })
            .collect();
        let r = wilcoxon_signed_rank(&x, &y, PValueMode::NormalApprox).unwrap();
        assert_eq!(r.w_statistic, 1.0);
        assert!(close(r.p_value, 1.4775235416366058e-5), "got {}", r.p_value);

        let y2: Vec<f64> = (1..=25)
            .map(|i| {
                let delta = if i <= 10 {
                    0.5
                } else if i <= 15 {
                    -0.5
                } else {
                    1.0
                };
                i as f64 - delta
            })
            .collect();
        let r2 = wilcoxon_signed_rank(&x, &y2, PValueMode::NormalApprox).unwrap();
        assert_eq!(r2.w_statistic, 40.0);
        assert!(close(r2.p_value, 0.0006839376908642716), "got {}", r2.p_value);

        // Five zero differences dropped, the rest positive.
        let y3: Vec<f64> = (1..=25)
            .map(|i| {
                let delta = if i <= 4 { 0.0 } else { 0.2 * i as f64 - 1.0 };
                i as f64 - delta
            })
            .collect();
        let r3 = wilcoxon_signed_rank(&x, &y3, PValueMode::NormalApprox).unwrap();
        assert_eq!(r3.n_effective, 20);
        assert_eq!(r3.w_statistic, 0.0);
        assert!(close(r3.p_value, 9.569173157059432e-5), "got {}", r3.p_value);
    }

    #[test]
    fn auto_switches_at_the_documented_threshold() {
        let y20 = vec![0.0; 20];
        let x20: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let r = wilcoxon_signed_rank(&x20, &y20, PValueMode::Auto).unwrap();
        assert_eq!(r.mode_used, PValueMode::Exact);

        let y21 = vec![0.0; 21];
        let x21: Vec<f64> = (1..=21).map(|i| i as f64).collect();
        let r = wilcoxon_signed_rank(&x21, &y21, PValueMode::Auto).unwrap();
        assert_eq!(r.mode_used, PValueMode::NormalApprox);
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(wilcoxon_signed_rank(&[], &[], PValueMode::Auto).is_err());
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0], PValueMode::Auto).is_err());
        assert!(wilcoxon_signed_rank(&[f64::NAN], &[0.0], PValueMode::Auto).is_err());
    }

    #[test]
    fn bold_set_examples() {
        let solo = vec![vec![0.9, 0.8, 0.85]];
        assert_eq!(mark_best(&solo, PValueMode::Auto).unwrap(), vec![true]);

        let twins = vec![vec![0.9, 0.8, 0.85], vec![0.9, 0.8, 0.85]];
        assert_eq!(mark_best(&twins, PValueMode::Auto).unwrap(), vec![true, true]);

        let strong: Vec<f64> = vec![0.9; 25];
        let weak: Vec<f64> = vec![0.5; 25];
        assert_eq!(
            mark_best(&[strong.clone(), weak.clone()], PValueMode::Auto).unwrap(),
            vec![true, false]
        );
        assert_eq!(
            mark_best(&[weak, strong], PValueMode::Auto).unwrap(),
            vec![false, true]
        );
    }

    #[test]
    fn bold_set_rejects_ragged_tables() {
        let ragged = vec![vec![0.9, 0.8], vec![0.9]];
        assert!(mark_best(&ragged, PValueMode::Auto).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        // p stays a probability, swapping the samples preserves it, and a
        // common shift changes nothing. Differences and shifts live on a
        // dyadic grid so the shifted additions are exact in f64.
        #[test]
        fn p_value_properties(
            grid in proptest::collection::vec(-320i32..=320, 1..12),
            shift_int in -1_000_000i64..1_000_000,
        ) {
            let diffs: Vec<f64> = grid.iter().map(|&k| k as f64 / 64.0).collect();
            let shift = shift_int as f64;
            let y = vec![0.0; diffs.len()];
            let r = exact(&diffs, &y);
            prop_assert!((0.0..=1.0).contains(&r.p_value));

            let r_swapped = exact(&y, &diffs);
            prop_assert_eq!(r.p_value, r_swapped.p_value);
            prop_assert_eq!(r.w_statistic, r_swapped.w_statistic);

            let xs: Vec<f64> = diffs.iter().map(|d| d + shift).collect();
            let ys = vec![shift; diffs.len()];
            let r_shifted = exact(&xs, &ys);
            prop_assert_eq!(r.p_value, r_shifted.p_value);
        }

        // DP agrees with the independent enumeration for any small sample.
        #[test]
        fn exact_matches_enumeration(
            diffs in proptest::collection::vec(
                proptest::sample::select(vec![-3.0f64, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0]),
                1..10,
            )
        ) {
            let y = vec![0.0; diffs.len()];
            if diffs.iter().all(|d| *d == 0.0) {
                let r = exact(&diffs, &y);
                prop_assert_eq!(r.p_value, 1.0);
            } else {
                let r = exact(&diffs, &y);
                prop_assert_eq!(r.p_value, enumerated_p(&diffs));
            }
        }
    }
}
