use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::quadrature::gauss_legendre;

/// Smooth nonnegative bump `exp(-a/(1-y²))/Z` on (-1, 1), normalized to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "MollifierSpec", into = "MollifierSpec")]
pub struct Mollifier {
    sharpness: f64,
    norm: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct MollifierSpec {
    sharpness: f64,
}

impl From<MollifierSpec> for Mollifier {
    fn from(s: MollifierSpec) -> Self {
        Mollifier::with_sharpness(s.sharpness)
    }
}

impl From<Mollifier> for MollifierSpec {
    fn from(m: Mollifier) -> Self {
        MollifierSpec {
            sharpness: m.sharpness,
        }
    }
}

impl Default for Mollifier {
    fn default() -> Self {
        Mollifier::standard()
    }
}

impl Mollifier {
    /// The classical bump `exp(-1/(1-y²))`, normalized.
    pub fn standard() -> Self {
        Mollifier::with_sharpness(1.0)
    }

    /// `exp(-a/(1-y²))` normalized; `a > 0`.
    pub fn with_sharpness(a: f64) -> Self {
        assert!(a > 0.0 && a.is_finite(), "mollifier sharpness must be positive");
        let raw = |y: f64| unnormalized(a, y);
        let rule = gauss_legendre(32);
        let panels = 64;
        let mut norm = 0.0;
        for i in 0..panels {
            let lo = -1.0 + 2.0 * i as f64 / panels as f64;
            let hi = -1.0 + 2.0 * (i + 1) as f64 / panels as f64;
            norm += rule.integrate(lo, hi, raw);
        }
        Mollifier { sharpness: a, norm }
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// Normalizing constant `Z = ∫ exp(-a/(1-y²)) dy`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn value(&self, y: f64) -> f64 {
        unnormalized(self.sharpness, y) / self.norm
    }

    /// Peak value, attained at the origin.
    pub fn max_value(&self) -> f64 {
        self.value(0.0)
    }

    /// Taylor jet of the profile at `y`; identically zero outside (-1, 1).
    pub fn jet(&self, y: f64, order: usize) -> Jet {
        if y.abs() >= 1.0 {
            return Jet::zero(order);
        }
        let s0 = 1.0 - y * y;
        let g0 = -self.sharpness / s0;
        if g0 < -745.0 {
            return Jet::zero(order);
        }
        let mut s = vec![0.0; order + 1];
        s[0] = s0;
        if order >= 1 {
            s[1] = -2.0 * y;
        }
        if order >= 2 {
            s[2] = -1.0;
        }
        let g = Jet::from_coeffs(s).recip().scale(-self.sharpness);
        g.exp().scale(1.0 / self.norm)
    }

    pub fn derivative(&self, y: f64, k: usize) -> f64 {
        if k == 0 {
            return self.value(y);
        }
        self.jet(y, k).derivative(k)
    }

    /// `∫_{-1}^{y} φ`.
    pub fn cdf(&self, y: f64) -> f64 {
        if y <= -1.0 {
            return 0.0;
        }
        if y >= 1.0 {
            return 1.0;
        }
        let rule = gauss_legendre(32);
        let panels = 4;
        let width = (y + 1.0) / panels as f64;
        let mut acc = 0.0;
        for i in 0..panels {
            let lo = -1.0 + width * i as f64;
            acc += rule.integrate(lo, lo + width, |z| self.value(z));
        }
        acc
    }

    /// `∫_a^b φ` with the trivial cases short-circuited.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(-1.0), b.min(1.0));
        if b <= a {
            return 0.0;
        }
        if a <= -1.0 && b >= 1.0 {
            return 1.0;
        }
        if a <= -1.0 {
            return self.cdf(b);
        }
        if b >= 1.0 {
            return 1.0 - self.cdf(a);
        }
        let rule = gauss_legendre(32);
        let mid = 0.5 * (a + b);
        rule.integrate(a, mid, |z| self.value(z)) + rule.integrate(mid, b, |z| self.value(z))
    }
}

fn unnormalized(a: f64, y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (-a / (1.0 - y * y)).exp()
    }
}

/// Shared handle; nets keep the mollifier they were built from.
pub type SharedMollifier = Arc<Mollifier>;

/// Smooth window with peak value one at the center: `exp(1 - 1/(1-y²))` on (-1, 1).
pub fn window_bump(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}
