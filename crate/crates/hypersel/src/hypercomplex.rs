//! Hypercomplex coefficient vectors and the component-wise operators the
//! search algorithms need.
//!
//! A value of dimension D is a plain D-length real vector: D=1 is ordinary
//! real-valued search, D=4 a quaternion, D=8 an octonion. The method only
//! ever adds, subtracts and rescales coefficients, so the Hamilton product
//! and the octonion multiplication table are deliberately absent.
//!
//! Every operation that writes coefficients bumps a thread-local work
//! counter by D. The counter exists to make the cost model measurable:
//! identical update schedules at D=4 or D=8 must count exactly 4 or 8 times
//! the D=1 work.

use std::cell::Cell;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::gaussian;

thread_local! {
    static COEFF_OPS: Cell<u64> = const { Cell::new(0) };
}

/// Coefficient writes performed on this thread since the last reset.
pub fn coefficient_ops() -> u64 {
    COEFF_OPS.with(|c| c.get())
}

/// Resets this thread's coefficient work counter.
pub fn reset_coefficient_ops() {
    COEFF_OPS.with(|c| c.set(0));
}

fn count_ops(n: usize) {
    COEFF_OPS.with(|c| c.set(c.get() + n as u64));
}

/// Dimensions with a hypercomplex interpretation.
pub const VALID_DIMS: [usize; 4] = [1, 2, 4, 8];

/// One decision variable embedded in a D-dimensional hypercomplex space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypercomplex {
    coefficients: Vec<f64>,
}

impl Hypercomplex {
    /// Wraps a coefficient vector; the length must be a valid dimension.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if !VALID_DIMS.contains(&coefficients.len()) {
            return Err(Error::BadDimension(coefficients.len()));
        }
        Ok(Self { coefficients })
    }

    /// The zero element of the D-dimensional space.
    pub fn zero(d: usize) -> Result<Self> {
        let value = Self::new(vec![0.0; d])?;
        count_ops(d);
        Ok(value)
    }

    /// Draws each coefficient from N(0,1) truncated to [0,1] by rejection.
    ///
    /// Truncation, not projection: a projecting clamp would pile half the
    /// mass onto exactly 0 and skew the selection probabilities the span
    /// mapping produces. Expected draws per coefficient are ~2.9.
    pub fn rand_init(rng: &mut impl Rng, d: usize) -> Result<Self> {
        if !VALID_DIMS.contains(&d) {
            return Err(Error::BadDimension(d));
        }
        let coefficients = (0..d)
            .map(|_| loop {
                let z = gaussian(rng);
                if (0.0..=1.0).contains(&z) {
                    break z;
                }
            })
            .collect();
        count_ops(d);
        Ok(Self { coefficients })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Component-wise combination with another value of the same dimension.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_dim(other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(&a, &b)| f(a, b))
            .collect();
        count_ops(self.dim());
        Ok(Self { coefficients })
    }

    /// Component-wise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let coefficients = self.coefficients.iter().map(|&a| f(a)).collect();
        count_ops(self.dim());
        Self { coefficients }
    }

    /// Component-wise sum. The result is not clamped; clamping back into
    /// [0,1] is the caller's explicit step.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Component-wise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Component-wise (Hadamard) product; used for per-coefficient random
    /// factors in velocity and flight updates.
    pub fn mul_elem(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Every coefficient multiplied by the scalar `s`.
    pub fn scale(&self, s: f64) -> Self {
        self.map(|a| a * s)
    }

    /// Every coefficient limited to the [0,1] coefficient domain.
    pub fn clamp(&self) -> Self {
        self.map(|a| a.clamp(0.0, 1.0))
    }

    /// D fresh draws from `g`, one per coefficient; coefficient index order.
    pub fn from_fn(d: usize, mut g: impl FnMut() -> f64) -> Result<Self> {
        if !VALID_DIMS.contains(&d) {
            return Err(Error::BadDimension(d));
        }
        let coefficients = (0..d).map(|_| g()).collect();
        count_ops(d);
        Ok(Self { coefficients })
    }
}
