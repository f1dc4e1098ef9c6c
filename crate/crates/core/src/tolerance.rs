use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rng::stream_rng;

/// Absolute/relative acceptance thresholds for residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_abs: f64,
    pub eps_rel: f64,
}

impl Tolerance {
    pub fn new(eps_abs: f64, eps_rel: f64) -> Self {
        Self { eps_abs, eps_rel }
    }

    /// `eps_abs + eps_rel * scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.eps_abs + self.eps_rel * scale
    }

    /// NaN residuals are never accepted.
    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.bound(scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-9, 1e-9)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps_abs: 1e-9,
            eps_rel: 1e-9,
            samples: 200,
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn tol(&self) -> Tolerance {
        Tolerance::new(self.eps_abs, self.eps_rel)
    }

    /// Independent RNG stream for one named check.
    pub fn rng(&self, tag: &str, index: u64) -> ChaCha8Rng {
        stream_rng(self.seed, tag, index)
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.eps_abs.is_finite()
            && self.eps_abs >= 0.0
            && self.eps_rel.is_finite()
            && self.eps_rel >= 0.0
            && self.samples > 0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidDocument(
                "tolerances must be finite and non-negative, samples positive".into(),
            ))
        }
    }
}
