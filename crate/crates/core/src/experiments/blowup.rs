//! Regularized blow-up `∂_t u = χ_ε(u) u²`, `u(x, 0) = (H ∗ φ_ε)(x)`.
//!
//! The equation is autonomous, so every characteristic follows one master
//! trajectory `U` started from `u = 1`. Data `u0 < 1` move along the exact
//! solution `u0/(1 − u0 t)` until they reach 1 at `t1 = 1/u0 − 1`, well below
//! the cap, and then follow `U(t − t1)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::nets::{Alpha, DerivativeMode, DomainBox, EpsLadder, GeneralizedNet, Mollifier, NetRule, Point};

/// Largest change of `u` per RK4 step on the master trajectory.
const MAX_DU: f64 = 0.02;
const MAX_STEP: f64 = 1e-3;

/// `exp(−1/y)` for `y > 0`.
fn flat(y: f64) -> f64 {
    if y > 0.0 {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 at `y ≤ 0` to 1 at `y ≥ 1`.
fn smooth_step(y: f64) -> f64 {
    let a = flat(y);
    let b = flat(1.0 - y);
    if a + b == 0.0 {
        if y >= 1.0 {
            1.0
        } else {
            0.0
        }
    } else {
        a / (a + b)
    }
}

/// Cut-off `χ_ε`: 1 on `|z| ≤ ε^{-s}`, smooth descent to 0 over `ramp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupCutoff {
    pub level: f64,
    pub ramp: f64,
}

impl BlowupCutoff {
    pub fn new(eps: f64, s: f64, ramp: f64) -> Self {
        BlowupCutoff {
            level: eps.powf(-s),
            ramp,
        }
    }

    pub fn value(&self, z: f64) -> f64 {
        1.0 - smooth_step((z.abs() - self.level) / self.ramp)
    }

    pub fn rhs(&self, u: f64) -> f64 {
        self.value(u) * u * u
    }

    /// Overflow guard `2(1 + ε^{-s})`.
    pub fn guard(&self) -> f64 {
        2.0 * (1.0 + self.level)
    }
}

/// Blow-up problem on `[-1, 1] × [0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlowupProblem {
    /// Cut-off exponent.
    pub s: f64,
    pub t_max: f64,
    /// Width of the cut-off descent; must not exceed 1.
    pub ramp: f64,
    /// Fixed RK4 step; `None` picks `min(1e-3, ε^{2s}/4)`.
    pub step: Option<f64>,
    pub mollifier: Mollifier,
}

impl Default for BlowupProblem {
    fn default() -> Self {
        BlowupProblem {
            s: 0.5,
            t_max: 2.0,
            ramp: 0.5,
            step: None,
            mollifier: Mollifier::standard(),
        }
    }
}

impl BlowupProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(invalid("cut-off exponent s must be positive"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(invalid("final time must be positive"));
        }
        if !(self.ramp > 0.0 && self.ramp <= 1.0) {
            return Err(invalid("cut-off ramp must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Stability bound `min(1e-3, ε^{2s}/4)` on the step.
    pub fn step_bound(&self, eps: f64) -> f64 {
        MAX_STEP.min(0.25 * eps.powf(2.0 * self.s))
    }

    fn step_for(&self, eps: f64) -> Result<f64> {
        let bound = self.step_bound(eps);
        match self.step {
            None => Ok(bound),
            Some(h) if h > 0.0 && h <= bound => Ok(h),
            Some(h) => Err(Error::StepSize(format!(
                "RK4 step {h:e} exceeds min(1e-3, ε^(2s)/4) = {bound:e} at ε = {eps:e}"
            ))),
        }
    }
}

/// Master trajectory from `u = 1` with cubic Hermite dense output.
#[derive(Debug)]
struct Trajectory {
    tau: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl Trajectory {
    fn integrate(cut: &BlowupCutoff, h_max: f64, t_max: f64) -> Result<Self> {
        let mut tau = vec![0.0];
        let mut u = vec![1.0];
        let mut du = vec![cut.rhs(1.0)];
        let (mut s, mut v) = (0.0f64, 1.0f64);
        while s < t_max {
            let rate = cut.rhs(v).abs();
            let mut h = h_max.min(t_max - s);
            if rate > 0.0 {
                h = h.min(MAX_DU / rate);
            }
            let k1 = cut.rhs(v);
            let k2 = cut.rhs(v + 0.5 * h * k1);
            let k3 = cut.rhs(v + 0.5 * h * k2);
            let k4 = cut.rhs(v + h * k3);
            v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            s += h;
            if !(v.abs() <= cut.guard()) {
                return Err(Error::Overflow(format!(
                    "|u| = {v:e} exceeds 2(1 + ε^(-s)) = {:e} at τ = {s}",
                    cut.guard()
                )));
            }
            tau.push(s);
            u.push(v);
            du.push(cut.rhs(v));
        }
        Ok(Trajectory { tau, u, du })
    }

    fn at(&self, t: f64) -> f64 {
        let n = self.tau.len();
        if t <= 0.0 {
            return self.u[0];
        }
        if t >= self.tau[n - 1] {
            return self.u[n - 1];
        }
        let i = self.tau.partition_point(|&s| s <= t) - 1;
        let h = self.tau[i + 1] - self.tau[i];
        let th = (t - self.tau[i]) / h;
        let (t2, t3) = (th * th, th * th * th);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.u[i]
            + (t3 - 2.0 * t2 + th) * h * self.du[i]
            + (-2.0 * t3 + 3.0 * t2) * self.u[i + 1]
            + (t3 - t2) * h * self.du[i + 1]
    }
}

struct BlowupRule {
    problem: BlowupProblem,
    cache: Mutex<HashMap<u64, Arc<Trajectory>>>,
}

impl std::fmt::Debug for BlowupRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlowupRule").field("problem", &self.problem).finish()
    }
}

impl BlowupRule {
    fn trajectory(&self, eps: f64) -> Result<Arc<Trajectory>> {
        if let Some(t) = self.cache.lock().expect("trajectory cache").get(&eps.to_bits()) {
            return Ok(t.clone());
        }
        let p = &self.problem;
        let cut = BlowupCutoff::new(eps, p.s, p.ramp);
        let traj = Arc::new(Trajectory::integrate(&cut, p.step_for(eps)?, p.t_max)?);
        self.cache
            .lock()
            .expect("trajectory cache")
            .insert(eps.to_bits(), traj.clone());
        Ok(traj)
    }

    fn solution(&self, x: f64, t: f64, eps: f64) -> f64 {
        let u0 = self.problem.mollifier.cdf(x / eps).clamp(0.0, 1.0);
        if u0 == 0.0 {
            return 0.0;
        }
        let t1 = 1.0 / u0 - 1.0;
        if t <= t1 {
            return u0 / (1.0 - u0 * t);
        }
        match self.trajectory(eps) {
            Ok(traj) => traj.at(t - t1),
            Err(_) => f64::NAN,
        }
    }
}

impl NetRule for BlowupRule {
    fn value(&self, p: Point, eps: f64, _alpha: Alpha) -> f64 {
        self.solution(p[0], p[1].max(0.0), eps)
    }
}

/// Integrated net on `[-1, 1] × [0, T]`; trajectories on the ladder are built and checked up front.
pub fn solve_blowup(p: &BlowupProblem, ladder: &EpsLadder) -> Result<GeneralizedNet> {
    p.validate()?;
    let rule = BlowupRule {
        problem: p.clone(),
        cache: Mutex::new(HashMap::new()),
    };
    for &eps in ladder.values() {
        rule.trajectory(eps)?;
    }
    let domain = DomainBox::space_time(-1.0, 1.0, 0.0, p.t_max)?;
    Ok(GeneralizedNet::new(domain, Arc::new(rule), 2, DerivativeMode::FiniteDifference)?
        .with_singular_points(vec![0.0])
        .with_label(format!("blowup(s={})", p.s)))
}
