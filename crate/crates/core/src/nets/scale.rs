use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Asymptotic scale `r ↦ (ε ↦ a(r)(ε))` with `a(0) = 1` and `a(r+s) ≤ a(r)·a(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AsymptoticScale {
    /// `a(r)(ε) = ε^r`.
    #[default]
    Power,
    /// `a(r)(ε) = exp(-r·ε^{-1/(2σ-1)})`, `σ > 1/2`.
    Gevrey { sigma: f64 },
}

impl AsymptoticScale {
    pub fn gevrey(sigma: f64) -> Result<Self> {
        if !(sigma > 0.5 && sigma.is_finite()) {
            return Err(invalid(format!("Gevrey order σ must exceed 1/2, got {sigma}")));
        }
        Ok(AsymptoticScale::Gevrey { sigma })
    }

    /// `ln a(r)(ε)`.
    pub fn ln_eval(&self, r: f64, eps: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        match *self {
            AsymptoticScale::Power => r * eps.ln(),
            AsymptoticScale::Gevrey { sigma } => -r * eps.powf(-1.0 / (2.0 * sigma - 1.0)),
        }
    }

    pub fn eval(&self, r: f64, eps: f64) -> f64 {
        match *self {
            AsymptoticScale::Power => eps.powf(r),
            _ => self.ln_eval(r, eps).exp(),
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AsymptoticScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymptoticScale::Power => write!(f, "power"),
            AsymptoticScale::Gevrey { sigma } => write!(f, "gevrey:{sigma}"),
        }
    }
}

impl std::str::FromStr for AsymptoticScale {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "power" {
            return Ok(AsymptoticScale::Power);
        }
        if let Some(rest) = s.strip_prefix("gevrey:") {
            let sigma: f64 = rest
                .parse()
                .map_err(|_| invalid(format!("cannot parse Gevrey order {rest:?}")))?;
            return AsymptoticScale::gevrey(sigma);
        }
        Err(invalid(format!("unknown scale {s:?}; expected power or gevrey:<σ>")))
    }
}
