//! Semilinear transport `∂_t u = F(u)` (λ ≡ 0) solved along characteristics.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::nets::sampling::axis_grid;
use crate::nets::{Alpha, DerivativeMode, DomainBox, EpsLadder, GeneralizedNet, NetRule, Point, Sampling};

/// Right-hand side `F` of `∂_t u = F(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `F(u) = −u³`.
    Dissipative,
    /// `F(u) = √(1 + u²)`.
    SqrtExp,
    /// `F(u) = (1 + u) ln(1 + u)`, defined for `u > −1`.
    LogGrowth,
}

impl Nonlinearity {
    pub const ALL: [Nonlinearity; 3] = [Nonlinearity::Dissipative, Nonlinearity::SqrtExp, Nonlinearity::LogGrowth];

    pub fn rhs(self, u: f64) -> f64 {
        match self {
            Nonlinearity::Dissipative => -u * u * u,
            Nonlinearity::SqrtExp => u.hypot(1.0),
            Nonlinearity::LogGrowth => (1.0 + u) * u.ln_1p(),
        }
    }

    /// Closed-form flow `u(t)` from `u(0) = u0`.
    pub fn flow(self, u0: f64, t: f64) -> f64 {
        match self {
            Nonlinearity::Dissipative => u0 / (2.0 * t * u0 * u0 + 1.0).sqrt(),
            Nonlinearity::SqrtExp => u0 * t.cosh() + u0.hypot(1.0) * t.sinh(),
            Nonlinearity::LogGrowth => (t.exp() * u0.ln_1p()).exp_m1(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Nonlinearity::Dissipative => "dissipative",
            Nonlinearity::SqrtExp => "sqrt_exp",
            Nonlinearity::LogGrowth => "log_growth",
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dissipative" => Ok(Nonlinearity::Dissipative),
            "sqrt_exp" => Ok(Nonlinearity::SqrtExp),
            "log_growth" | "log" => Ok(Nonlinearity::LogGrowth),
            other => Err(invalid(format!(
                "unknown nonlinearity {other:?}; expected dissipative, sqrt_exp or log_growth"
            ))),
        }
    }
}

/// `∂_t u = F(u)` on `[lo, hi] × [0, T]` with 1D initial data.
#[derive(Debug, Clone)]
pub struct TransportProblem {
    pub nonlinearity: Nonlinearity,
    pub initial: GeneralizedNet,
    pub t_max: f64,
}

impl TransportProblem {
    pub fn new(nonlinearity: Nonlinearity, initial: GeneralizedNet, t_max: f64) -> Result<Self> {
        if initial.dim() != 1 {
            return Err(invalid("transport initial data must be a 1D net"));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(invalid("final time must be positive"));
        }
        Ok(TransportProblem {
            nonlinearity,
            initial,
            t_max,
        })
    }
}

#[derive(Debug)]
struct TransportRule {
    f: Nonlinearity,
    initial: GeneralizedNet,
}

impl NetRule for TransportRule {
    fn value(&self, p: Point, eps: f64, _alpha: Alpha) -> f64 {
        let u0 = self.initial.eval([p[0], 0.0], eps, Alpha::ZERO);
        self.f.flow(u0, p[1].max(0.0))
    }
}

/// Closed-form solution with its RK4 cross-check.
#[derive(Debug, Clone)]
pub struct TransportSolution {
    pub net: GeneralizedNet,
    pub check: FlowCheck,
}

/// Agreement of the closed form with an independent RK4 integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowCheck {
    pub eps: f64,
    pub samples: usize,
    pub max_relative_error: f64,
}

/// Largest relative change of `u` per RK4 step.
const RK_RELATIVE_STEP: f64 = 0.01;
const RK_MAX_STEP: f64 = 1e-3;

/// Adaptive RK4 for `u' = F(u)` from 0 to `t`, each step changing `u` by at most 1%.
pub fn rk4_flow(f: Nonlinearity, u0: f64, t: f64) -> f64 {
    let mut u = u0;
    let mut s = 0.0;
    while s < t {
        let rate = f.rhs(u).abs();
        let limit = if rate > 0.0 {
            RK_RELATIVE_STEP * u.abs().max(1.0) / rate
        } else {
            RK_MAX_STEP
        };
        let h = limit.min(RK_MAX_STEP).min(t - s);
        let k1 = f.rhs(u);
        let k2 = f.rhs(u + 0.5 * h * k1);
        let k3 = f.rhs(u + 0.5 * h * k2);
        let k4 = f.rhs(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += h;
    }
    u
}

/// Time slices used by the RK4 cross-check.
const CHECK_TIMES: [f64; 4] = [0.1, 0.25, 0.5, 1.0];

/// Closed-form net on space-time; the RK4 check runs at the ladder midpoint.
pub fn solve_transport(p: &TransportProblem, ladder: &EpsLadder) -> Result<TransportSolution> {
    let dom = p.initial.domain();
    let (lo, hi) = (dom.lo(0), dom.hi(0));
    let singular = p.initial.singular_points().to_vec();
    let sampling = Sampling::default();
    if p.nonlinearity == Nonlinearity::LogGrowth {
        for &eps in ladder.values() {
            for x in axis_grid(lo, hi, &singular, eps, eps, &sampling) {
                let u0 = p.initial.eval([x, 0.0], eps, Alpha::ZERO);
                if !(u0 > -1.0) {
                    return Err(invalid(format!(
                        "log_growth needs initial data above −1; found {u0} at x = {x}, ε = {eps:e}"
                    )));
                }
            }
        }
    }
    let domain = DomainBox::space_time(lo, hi, 0.0, p.t_max)?;
    let rule = TransportRule {
        f: p.nonlinearity,
        initial: p.initial.clone(),
    };
    let net = GeneralizedNet::new(domain, Arc::new(rule), 2, DerivativeMode::FiniteDifference)?
        .with_singular_points(singular.clone())
        .with_label(format!("{}({})", p.nonlinearity, p.initial.label()));

    let eps = ladder.midpoint();
    let mut xs: Vec<f64> = (0..=20).map(|i| lo + (hi - lo) * i as f64 / 20.0).collect();
    for &s in &singular {
        xs.extend([s - 0.5 * eps, s, s + 0.25 * eps]);
    }
    let mut worst = 0.0f64;
    let mut samples = 0;
    for &t in CHECK_TIMES.iter().filter(|&&t| t <= p.t_max) {
        for &x in &xs {
            let u0 = p.initial.eval([x, 0.0], eps, Alpha::ZERO);
            let closed = p.nonlinearity.flow(u0, t);
            let rk = rk4_flow(p.nonlinearity, u0, t);
            let rel = (closed - rk).abs() / closed.abs().max(1e-12);
            if !rel.is_finite() {
                return Err(Error::DataQuality(format!("non-finite flow at x = {x}, t = {t}")));
            }
            worst = worst.max(rel);
            samples += 1;
        }
    }
    Ok(TransportSolution {
        net,
        check: FlowCheck {
            eps,
            samples,
            max_relative_error: worst,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{make_delta, Mollifier};

    #[test]
    fn flows_solve_their_equations() {
        for f in Nonlinearity::ALL {
            for u0 in [-0.5, 0.0, 0.3, 2.0, 50.0] {
                let t = 0.4;
                let h = 1e-5;
                let du = (f.flow(u0, t + h) - f.flow(u0, t - h)) / (2.0 * h);
                let rhs = f.rhs(f.flow(u0, t));
                assert!((du - rhs).abs() <= 1e-6 * rhs.abs().max(1.0), "{f} u0={u0}: {du} vs {rhs}");
                assert!((f.flow(u0, 0.0) - u0).abs() <= 1e-14 * u0.abs().max(1.0));
            }
        }
    }

    #[test]
    fn rk4_matches_closed_forms() {
        for f in Nonlinearity::ALL {
            for u0 in [0.0, 0.7, 1e3, 7e5] {
                let closed = f.flow(u0, 1.0);
                let rk = rk4_flow(f, u0, 1.0);
                assert!((closed - rk).abs() <= 1e-6 * closed.abs().max(1e-12), "{f} u0={u0}: {rk} vs {closed}");
            }
        }
    }

    #[test]
    fn solutions_pass_their_cross_check() {
        let d = make_delta(2, &Mollifier::standard()).unwrap();
        let ladder = EpsLadder::default();
        for f in Nonlinearity::ALL {
            let sol = solve_transport(&TransportProblem::new(f, d.clone(), 1.5).unwrap(), &ladder).unwrap();
            assert!(sol.check.max_relative_error <= 1e-4, "{f}: {:?}", sol.check);
            assert_eq!(sol.net.dim(), 2);
            assert_eq!(sol.net.singular_points(), &[0.0]);
            let eps = 1e-3;
            let u0 = d.eval([0.0, 0.0], eps, Alpha::ZERO);
            assert_eq!(sol.net.eval([0.0, 0.5], eps, Alpha::ZERO), f.flow(u0, 0.5));
        }
    }

    #[test]
    fn log_growth_rejects_data_below_minus_one() {
        let d = make_delta(1, &Mollifier::standard()).unwrap();
        let neg = crate::nets::linear_combination(&[(-1.0, d)]).unwrap();
        let p = TransportProblem::new(Nonlinearity::LogGrowth, neg, 1.0).unwrap();
        assert!(solve_transport(&p, &EpsLadder::default()).is_err());
    }

    #[test]
    fn parsing() {
        for f in Nonlinearity::ALL {
            assert_eq!(f.to_string().parse::<Nonlinearity>().unwrap(), f);
        }
        assert!("cubic".parse::<Nonlinearity>().is_err());
    }
}
