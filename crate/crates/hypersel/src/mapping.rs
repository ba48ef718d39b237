//! Norm, span and transfer functions: the bridge from a hypercomplex
//! position to a real value and on to a stochastic binary feature decision.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercomplex::Hypercomplex;
use crate::rng::uniform;

/// Real search interval the span function maps norms onto.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: f64,
    upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::BadBounds { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }
}

impl Default for Bounds {
    /// The interval used throughout the experiments.
    fn default() -> Self {
        Self { lower: -20.0, upper: 20.0 }
    }
}

/// Selected-feature mask over the problem's N features.
pub type FeatureMask = Vec<bool>;

/// Number of selected features.
pub fn mask_popcount(mask: &FeatureMask) -> usize {
    mask.iter().filter(|&&b| b).count()
}

/// Minkowski p-norm (sum_d |h_d|^p)^(1/p); p=1 Taxicab, p=2 Euclidean.
pub fn norm_p(q: &Hypercomplex, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadNormOrder(p));
    }
    let sum: f64 = q.coefficients().iter().map(|h| h.abs().powf(p)).sum();
    Ok(sum.powf(1.0 / p))
}

/// Affine rescaling of the norm onto [lower, upper]:
/// (upper - lower) * ||q||_p / D^(1/p) + lower.
///
/// With every coefficient in [0,1] the norm spans [0, D^(1/p)] exactly, so
/// the result achieves both bounds: the zero element maps to `lower` and the
/// all-ones element to `upper`. Both the norm and the divisor go through the
/// same power computation so the all-ones ratio is exactly 1.
pub fn span(q: &Hypercomplex, p: f64, b: Bounds) -> Result<f64> {
    let norm = norm_p(q, p)?;
    let full = (q.dim() as f64).powf(1.0 / p);
    Ok((b.upper - b.lower) * (norm / full) + b.lower)
}

/// Logistic transfer 1 / (1 + e^(-x)), strictly inside (0,1).
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Stochastic threshold: selected iff sigmoid(span(q)) beats one uniform
/// draw. Consumes exactly one variate per call.
pub fn binarize(q: &Hypercomplex, p: f64, b: Bounds, rng: &mut impl Rng) -> Result<bool> {
    let s = sigmoid(span(q, p, b)?);
    Ok(s > uniform(rng))
}

/// Applies `binarize` to each decision variable in index order, pinning the
/// RNG consumption order for reproducibility.
pub fn mask_from_position(
    position: &[Hypercomplex],
    p: f64,
    b: Bounds,
    rng: &mut impl Rng,
) -> Result<FeatureMask> {
    position.iter().map(|q| binarize(q, p, b, rng)).collect()
}

/// Span of every variable in index order; the real-valued view of a
/// position that smooth test objectives consume.
pub fn spans_of_position(position: &[Hypercomplex], p: f64, b: Bounds) -> Result<Vec<f64>> {
    position.iter().map(|q| span(q, p, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{master_rng, stream_rng};
    use proptest::prelude::*;

    fn hc(v: &[f64]) -> Hypercomplex {
        Hypercomplex::new(v.to_vec()).unwrap()
    }

    const TOL: f64 = 1e-12;

    #[test]
    fn norm_worked_examples() {
        assert!((norm_p(&hc(&[0.6, 0.8, 0.0, 0.0]), 2.0).unwrap() - 1.0).abs() <= TOL);
        assert!(
            (norm_p(&hc(&[1.0; 8]), 2.0).unwrap() - 2.8284271247461903).abs() <= TOL,
            "sqrt(8) case"
        );
        assert!((norm_p(&hc(&[0.5, 0.5]), 1.0).unwrap() - 1.0).abs() <= TOL);
    }

    #[test]
    fn norm_rejects_p_below_one() {
        assert!(matches!(
            norm_p(&hc(&[0.5]), 0.5),
            Err(Error::BadNormOrder(_))
        ));
        assert!(norm_p(&hc(&[0.5]), f64::NAN).is_err());
    }

    #[test]
    fn span_worked_examples() {
        let b = Bounds::default();
        assert_eq!(span(&Hypercomplex::zero(4).unwrap(), 2.0, b).unwrap(), -20.0);
        assert_eq!(span(&hc(&[1.0; 4]), 2.0, b).unwrap(), 20.0);
        assert!((span(&hc(&[0.5; 4]), 2.0, b).unwrap() - 0.0).abs() <= TOL);
    }

    #[test]
    fn span_hits_bounds_exactly_for_all_dims_and_norms() {
        let b = Bounds::default();
        for d in [1usize, 4, 8] {
            for p in [1.0, 2.0] {
                let zero = Hypercomplex::zero(d).unwrap();
                let ones = hc(&vec![1.0; d]);
                assert_eq!(span(&zero, p, b).unwrap(), b.lower(), "zero, D={d}, p={p}");
                assert_eq!(span(&ones, p, b).unwrap(), b.upper(), "ones, D={d}, p={p}");
            }
        }
    }

    #[test]
    fn sigmoid_worked_examples() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(20.0) - 0.9999999979388463).abs() <= TOL);
        assert!((sigmoid(-20.0) - 2.0611536181902037e-9).abs() <= TOL);
    }

    #[test]
    fn sigmoid_symmetry() {
        for x in [-20.0, -3.5, -0.1, 0.0, 0.7, 5.0, 20.0] {
            assert!(
                (sigmoid(x) + sigmoid(-x) - 1.0).abs() <= 1e-15,
                "symmetry broke at {x}"
            );
        }
    }

    #[test]
    fn d1_span_degenerates_to_affine_map() {
        let b = Bounds::new(-20.0, 20.0).unwrap();
        for c in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
            let via_pipeline = span(&hc(&[c]), 2.0, b).unwrap();
            let direct = (b.upper() - b.lower()) * c + b.lower();
            assert!(
                (via_pipeline - direct).abs() <= TOL,
                "D=1 must behave like plain real-valued search"
            );
        }
    }

    #[test]
    fn binarize_saturated_cases() {
        let b = Bounds::default();
        let mut rng = master_rng(1);
        let zero = Hypercomplex::zero(4).unwrap();
        let ones = hc(&[1.0; 4]);
        // sigmoid(-20) ~ 2e-9: over 10^4 draws a single selection would
        // already be a 1-in-50,000 event.
        for _ in 0..10_000 {
            assert!(!binarize(&zero, 2.0, b, &mut rng).unwrap());
            assert!(binarize(&ones, 2.0, b, &mut rng).unwrap());
        }
    }

    // Monte-Carlo oracle: span 0 gives selection probability sigmoid(0)=0.5.
    #[test]
    fn binarize_is_fair_at_span_zero() {
        let b = Bounds::default();
        let q = hc(&[0.5; 4]);
        let mut rng = master_rng(2);
        let n = 100_000;
        let ones = (0..n)
            .filter(|_| binarize(&q, 2.0, b, &mut rng).unwrap())
            .count();
        let frac = ones as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.01, "fraction {frac} not 0.5 +- 0.01");
    }

    #[test]
    fn binarize_consumes_exactly_one_variate() {
        let b = Bounds::default();
        let q = hc(&[0.5; 4]);
        let mut used = stream_rng(3, 0);
        let _ = binarize(&q, 2.0, b, &mut used).unwrap();
        let next_after_one = uniform(&mut used);
        let mut fresh = stream_rng(3, 0);
        let _ = uniform(&mut fresh);
        assert_eq!(next_after_one, uniform(&mut fresh));
    }

    #[test]
    fn mask_cases() {
        let b = Bounds::default();
        let zeros: Vec<_> = (0..6).map(|_| Hypercomplex::zero(4).unwrap()).collect();
        let mask = mask_from_position(&zeros, 2.0, b, &mut master_rng(4)).unwrap();
        assert_eq!(mask, vec![false; 6]);
        assert_eq!(mask_popcount(&mask), 0);

        let empty = mask_from_position(&[], 2.0, b, &mut master_rng(4)).unwrap();
        assert!(empty.is_empty());

        let pos: Vec<_> = (0..5)
            .map(|_| Hypercomplex::rand_init(&mut master_rng(9), 4).unwrap())
            .collect();
        let a = mask_from_position(&pos, 2.0, b, &mut stream_rng(5, 1)).unwrap();
        let c = mask_from_position(&pos, 2.0, b, &mut stream_rng(5, 1)).unwrap();
        assert_eq!(a, c, "same seed and positions must give the same mask");
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(Bounds::new(1.0, 1.0).is_err());
        assert!(Bounds::new(2.0, -2.0).is_err());
        assert!(Bounds::new(f64::NAN, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        // span is monotone in the norm and stays inside the bounds.
        #[test]
        fn span_monotone_and_bounded(
            a in proptest::collection::vec(0.0f64..=1.0, 4),
            s in 0.0f64..=1.0,
        ) {
            let b = Bounds::default();
            let q = hc(&a);
            let shrunk = q.scale(s);
            let big = span(&q, 2.0, b).unwrap();
            let small = span(&shrunk, 2.0, b).unwrap();
            prop_assert!(small <= big + 1e-12);
            prop_assert!((b.lower()..=b.upper()).contains(&big));
        }

        #[test]
        fn sigmoid_monotone(x in -50.0f64..50.0, dx in 0.0f64..10.0) {
            prop_assert!(sigmoid(x + dx) >= sigmoid(x));
            let y = sigmoid(x);
            prop_assert!((0.0..=1.0).contains(&y));
            // Strict interior holds until f64 saturates: 1 + e^(-x) rounds
            // to 1.0 once x passes ~36.7.
            if x.abs() <= 36.0 {
                prop_assert!(y > 0.0 && y < 1.0);
            }
        }
    }
}
