use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The exponent of the ambient sequence space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    /// `l^p`, `1 <= p < infinity`.
    P(f64),
    /// `c_0`, sup-normed.
    C0,
}

impl Exponent {
    /// Power used for norms of coefficient sequences; infinite means sup.
    pub fn power(self) -> f64 {
        match self {
            Exponent::P(p) => p,
            Exponent::C0 => f64::INFINITY,
        }
    }

    /// Conjugate power for the dual coordinates.
    pub fn conjugate(self) -> f64 {
        match self {
            Exponent::P(1.0) => f64::INFINITY,
            Exponent::P(p) => p / (p - 1.0),
            Exponent::C0 => 1.0,
        }
    }

    /// `1 < p < infinity`, the range the dynamics criteria are stated for.
    pub fn is_reflexive(self) -> bool {
        matches!(self, Exponent::P(p) if p > 1.0 && p.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub p: Exponent,
    /// Number of stored coordinates.
    pub n: usize,
    /// Minimum number of explicit series terms before analytic tails are used.
    pub series_cap: usize,
    pub tol: f64,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig { p: Exponent::P(2.0), n: 256, series_cap: 128, tol: 1e-12 }
    }
}

impl SpaceConfig {
    pub fn with_p(p: f64) -> Self {
        SpaceConfig { p: Exponent::P(p), ..Self::default() }
    }

    pub fn with_size(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn q(&self) -> f64 {
        self.p.conjugate()
    }

    pub fn validate(&self) -> Result<()> {
        if let Exponent::P(p) = self.p {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::InvalidConfig(format!("p = {p} must lie in [1, inf)")));
            }
        }
        if self.n < 8 {
            return Err(Error::InvalidConfig(format!("truncation N = {} must be at least 8", self.n)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol = {} must be positive", self.tol)));
        }
        if self.series_cap == 0 {
            return Err(Error::InvalidConfig("series cap must be positive".into()));
        }
        Ok(())
    }

    /// The dynamics criteria need `1 < p < infinity`.
    pub fn require_reflexive(&self) -> Result<()> {
        if self.p.is_reflexive() {
            Ok(())
        } else {
            Err(Error::UnsupportedExponent(format!("{:?}: dynamics criteria need 1 < p < inf", self.p)))
        }
    }
}
