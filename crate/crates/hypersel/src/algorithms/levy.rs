//! Lévy-stable step sampling via Mantegna's algorithm, shared by cuckoo
//! search and flower pollination.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::rng::{gaussian, Stream};

/// Mantegna sampler for symmetric Lévy-stable steps with index `beta`.
///
/// sigma_u is precomputed once:
///   sigma_u = [ Gamma(1+beta) sin(pi beta / 2)
///             / (Gamma((1+beta)/2) beta 2^((beta-1)/2)) ]^(1/beta)
/// and each sample is sigma_u * g1 / |g2|^(1/beta) with g1, g2 standard
/// normal. Exactly two Gaussian draws (four uniforms) per sample.
#[derive(Clone, Copy, Debug)]
pub struct LevySampler {
    beta: f64,
    sigma_u: f64,
}

impl LevySampler {
    /// Valid for beta in (0, 2]; outside that range the Mantegna constants
    /// are undefined or degenerate.
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::BadLevyBeta(beta));
        }
        Ok(Self { beta, sigma_u: sigma_u(beta) })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma_u(&self) -> f64 {
        self.sigma_u
    }

    /// One Lévy step. Consumes exactly two Gaussian variates from `rng`.
    pub fn sample(&self, rng: &mut Stream) -> f64 {
        let g1 = gaussian(rng);
        let g2 = gaussian(rng);
        self.transform(g1, g2)
    }

    /// The deterministic Mantegna transform, exposed for oracle tests.
    pub fn transform(&self, g1: f64, g2: f64) -> f64 {
        self.sigma_u * g1 / g2.abs().powf(1.0 / self.beta)
    }
}

fn sigma_u(beta: f64) -> f64 {
    let num = gamma(1.0 + beta) * (std::f64::consts::PI * beta / 2.0).sin();
    let den = gamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
    (num / den).powf(1.0 / beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn sigma_u_reference_values() {
        // Independently computed from the closed form.
        let cases = [
            (1.0, 1.0),
            (1.5, 0.6965745025576967),
            (2.0, 9.884972298779197e-9),
            (0.5, 1.4793375595943188),
        ];
        for (beta, want) in cases {
            let got = LevySampler::new(beta).unwrap().sigma_u();
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "sigma_u({beta}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn transform_reference_values() {
        // sigma_u * g1 / |g2|^(1/beta) at beta = 1.5, independently computed.
        let levy = LevySampler::new(1.5).unwrap();
        let cases = [
            (1.0, 1.0, 0.6965745025576967),
            (-0.5, 2.0, -0.21940721964812307),
            (0.3, -0.25, 0.5265773271554953),
            (2.0, 0.5, 2.211486196268626),
        ];
        for (g1, g2, want) in cases {
            let got = levy.transform(g1, g2);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "transform({g1}, {g2}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn rejects_bad_beta() {
        assert!(LevySampler::new(0.0).is_err());
        assert!(LevySampler::new(-1.0).is_err());
        assert!(LevySampler::new(2.5).is_err());
        assert!(LevySampler::new(f64::NAN).is_err());
    }

    #[test]
    fn sample_consumes_two_gaussians() {
        let levy = LevySampler::new(1.5).unwrap();
        let mut rng = stream_rng(9, 0);
        let s = levy.sample(&mut rng);
        let mut rng2 = stream_rng(9, 0);
        let g1 = crate::rng::gaussian(&mut rng2);
        let g2 = crate::rng::gaussian(&mut rng2);
        assert_eq!(s, levy.transform(g1, g2), "sample must be the transform of two draws");
        // Both streams must now be in the same state.
        assert_eq!(
            crate::rng::uniform(&mut rng),
            crate::rng::uniform(&mut rng2),
            "sample consumed a different number of variates"
        );
    }

    #[test]
    fn samples_are_heavy_tailed_but_centered() {
        let levy = LevySampler::new(1.5).unwrap();
        let mut rng = stream_rng(123, 0);
        let n = 100_000;
        let mut pos = 0usize;
        let mut big = 0usize;
        for _ in 0..n {
            let s = levy.sample(&mut rng);
            assert!(s.is_finite());
            if s > 0.0 {
                pos += 1;
            }
            if s.abs() > 10.0 {
                big += 1;
            }
        }
        let frac_pos = pos as f64 / n as f64;
        assert!((frac_pos - 0.5).abs() < 0.01, "sign should be symmetric, got {frac_pos}");
        assert!(big > 0, "a heavy-tailed sampler must produce large excursions");
    }
}
