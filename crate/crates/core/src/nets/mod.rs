//! ε-parametrized nets of smooth functions, their algebra and seminorms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub mod algebra;
pub mod classical;
pub mod jet;
pub mod mollifier;
pub mod sampling;
pub mod scale;
pub mod spec;

pub use algebra::{add, derive, linear_combination, mul, net_algebra, pow, scale_by, weight, EpsWeight, NetOp};
pub use classical::{embed_classical, make_delta, make_delta_at, smooth_net, Classical, Smooth};
pub use mollifier::Mollifier;
pub use sampling::{seminorm, Sampling};
pub use scale::AsymptoticScale;
pub use spec::{NetSpec, SumTerm};

/// A point `(x)` in one dimension or `(x, t)` in space-time; the second slot is ignored in 1D.
pub type Point = [f64; 2];

/// Derivative multi-index `∂_x^x ∂_t^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Alpha {
    pub x: usize,
    pub t: usize,
}

impl Alpha {
    pub const ZERO: Alpha = Alpha { x: 0, t: 0 };

    pub fn new(x: usize, t: usize) -> Self {
        Alpha { x, t }
    }

    /// Pure space derivative of order `k`.
    pub fn dx(k: usize) -> Self {
        Alpha { x: k, t: 0 }
    }

    pub fn order(&self) -> usize {
        self.x + self.t
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Alpha) -> bool {
        self.x <= other.x && self.t <= other.t
    }

    /// All multi-indices of total order at most `l` in dimension `dim`.
    pub fn up_to(l: usize, dim: usize) -> Vec<Alpha> {
        let mut out = Vec::new();
        for total in 0..=l {
            if dim == 1 {
                out.push(Alpha::dx(total));
            } else {
                for t in 0..=total {
                    out.push(Alpha::new(total - t, t));
                }
            }
        }
        out
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.t)
    }
}

/// Axis-aligned box: an interval, or a space-time rectangle `x × t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl DomainBox {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        DomainBox::new(1, [lo, 0.0], [hi, 0.0])
    }

    pub fn space_time(x_lo: f64, x_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        DomainBox::new(2, [x_lo, t_lo], [x_hi, t_hi])
    }

    fn new(dim: usize, lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid(format!("dimension must be 1 or 2, got {dim}")));
        }
        for i in 0..dim {
            if !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i]) {
                return Err(invalid(format!("axis {i}: need finite lo < hi, got [{}, {}]", lo[i], hi[i])));
            }
        }
        Ok(DomainBox { dim, lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains_point(&self, p: Point) -> bool {
        (0..self.dim).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    /// Point strictly inside the box.
    pub fn interior(&self, p: Point) -> bool {
        (0..self.dim).all(|i| p[i] > self.lo[i] && p[i] < self.hi[i])
    }

    pub fn contains_box(&self, other: &DomainBox) -> bool {
        let slack = |i: usize| 1e-12 * (1.0 + self.lo[i].abs().max(self.hi[i].abs()));
        self.dim == other.dim
            && (0..self.dim).all(|i| other.lo[i] >= self.lo[i] - slack(i) && other.hi[i] <= self.hi[i] + slack(i))
    }

    pub fn intersect(&self, other: &DomainBox) -> Option<DomainBox> {
        if self.dim != other.dim {
            return None;
        }
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for i in 0..self.dim {
            lo[i] = self.lo[i].max(other.lo[i]);
            hi[i] = self.hi[i].min(other.hi[i]);
        }
        DomainBox::new(self.dim, lo, hi).ok()
    }

    /// Box of half-width `radius` on every axis around `center`, clipped to `self`.
    pub fn neighborhood(&self, center: Point, radius: f64) -> Option<DomainBox> {
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for i in 0..self.dim {
            lo[i] = center[i] - radius;
            hi[i] = center[i] + radius;
        }
        DomainBox::new(self.dim, lo, hi).ok()?.intersect(self)
    }
}

impl fmt::Display for DomainBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "[{}, {}]", self.lo[0], self.hi[0])
        } else {
            write!(f, "[{}, {}]×[{}, {}]", self.lo[0], self.hi[0], self.lo[1], self.hi[1])
        }
    }
}

/// Finite strictly decreasing sequence of ε values in (0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EpsLadder {
    values: Vec<f64>,
}

impl EpsLadder {
    pub const MIN_LEN: usize = 6;

    /// `ε_i = eps0·q^i` for `i < count`.
    pub fn geometric(eps0: f64, q: f64, count: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("ladder ratio q must lie in (0,1), got {q}")));
        }
        EpsLadder::from_values((0..count).map(|i| eps0 * q.powi(i as i32)).collect())
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_LEN {
            return Err(invalid(format!(
                "ladder needs at least {} rungs, got {}",
                Self::MIN_LEN,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return Err(invalid(format!("ε0 must lie in (0,1]; ladder value {v} does not")));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("ladder values must be strictly decreasing"));
        }
        Ok(EpsLadder { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn smallest(&self) -> f64 {
        *self.values.last().expect("ladder is never empty")
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    /// The middle rung.
    pub fn midpoint(&self) -> f64 {
        self.values[self.values.len() / 2]
    }
}

impl Default for EpsLadder {
    /// `2^-4, 2^-5, …, 2^-16`.
    fn default() -> Self {
        EpsLadder::geometric(0.0625, 0.5, 13).expect("default ladder is valid")
    }
}

impl TryFrom<Vec<f64>> for EpsLadder {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        EpsLadder::from_values(values)
    }
}

impl From<EpsLadder> for Vec<f64> {
    fn from(l: EpsLadder) -> Self {
        l.values
    }
}

/// How derivatives of a net are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    /// The rule itself answers every multi-index.
    Analytic,
    /// The rule only answers `α = 0`; derivatives use nested fourth-order
    /// central differences with step `ε/64`.
    FiniteDifference,
}

/// Pure evaluation rule `(point, ε, α) ↦ ∂^α u_ε(point)`.
///
/// In [`DerivativeMode::FiniteDifference`] nets the rule is only queried with `α = 0`.
pub trait NetRule: Send + Sync + fmt::Debug {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64;
}

/// Representative `(u_ε)_ε` of a generalized function on a box.
#[derive(Clone)]
pub struct GeneralizedNet {
    domain: DomainBox,
    rule: Arc<dyn NetRule>,
    max_order: usize,
    mode: DerivativeMode,
    singular: Vec<f64>,
    label: String,
}

impl fmt::Debug for GeneralizedNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralizedNet")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("max_order", &self.max_order)
            .field("mode", &self.mode)
            .field("singular", &self.singular)
            .finish()
    }
}

/// Eighth-order central weights for the n-th derivative, n in 1..=3.
fn central_stencil(n: usize) -> &'static [f64] {
    const D1: [f64; 9] = [
        1.0 / 280.0,
        -4.0 / 105.0,
        1.0 / 5.0,
        -4.0 / 5.0,
        0.0,
        4.0 / 5.0,
        -1.0 / 5.0,
        4.0 / 105.0,
        -1.0 / 280.0,
    ];
    const D2: [f64; 9] = [
        -1.0 / 560.0,
        8.0 / 315.0,
        -1.0 / 5.0,
        8.0 / 5.0,
        -205.0 / 72.0,
        8.0 / 5.0,
        -1.0 / 5.0,
        8.0 / 315.0,
        -1.0 / 560.0,
    ];
    const D3: [f64; 11] = [
        41.0 / 6048.0,
        -1261.0 / 15120.0,
        541.0 / 1120.0,
        -4369.0 / 2520.0,
        1669.0 / 720.0,
        0.0,
        -1669.0 / 720.0,
        4369.0 / 2520.0,
        -541.0 / 1120.0,
        1261.0 / 15120.0,
        -41.0 / 6048.0,
    ];
    match n {
        1 => &D1,
        2 => &D2,
        _ => &D3,
    }
}

/// Finite-difference step relative to ε.
pub const FD_STEP_FRACTION: f64 = 1.0 / 64.0;

impl GeneralizedNet {
    pub fn new(domain: DomainBox, rule: Arc<dyn NetRule>, max_order: usize, mode: DerivativeMode) -> Result<Self> {
        if max_order < 2 {
            return Err(invalid(format!("max_order must be at least 2, got {max_order}")));
        }
        Ok(GeneralizedNet {
            domain,
            rule,
            max_order,
            mode,
            singular: Vec::new(),
            label: String::from("net"),
        })
    }

    /// Registers x-positions (vertical lines in space-time) where the net
    /// develops ε-scale structure; sampling grids refine around them.
    pub fn with_singular_points(mut self, mut pts: Vec<f64>) -> Self {
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        self.singular = pts;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rule(&self) -> &Arc<dyn NetRule> {
        &self.rule
    }

    /// Whether both nets share one evaluator.
    pub fn same_rule(&self, other: &GeneralizedNet) -> bool {
        Arc::ptr_eq(&self.rule, &other.rule)
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            Err(Error::OrderOverflow {
                requested: order,
                max: self.max_order,
            })
        } else {
            Ok(())
        }
    }

    /// `∂^α u_ε(p)`. Orders beyond `max_order` are the caller's responsibility;
    /// see [`GeneralizedNet::try_eval`].
    pub fn eval(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        if self.dim() == 1 && alpha.t > 0 {
            return 0.0;
        }
        match self.mode {
            DerivativeMode::Analytic => self.rule.value(p, eps, alpha),
            DerivativeMode::FiniteDifference => self.finite_difference(p, eps, alpha),
        }
    }

    pub fn try_eval(&self, p: Point, eps: f64, alpha: Alpha) -> Result<f64> {
        self.check_order(alpha.order())?;
        if !(eps > 0.0) {
            return Err(invalid(format!("ε must be positive, got {eps}")));
        }
        Ok(self.eval(p, eps, alpha))
    }

    /// Derivative by nested fourth-order central differences, regardless of mode.
    pub fn finite_difference(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        let h = eps * FD_STEP_FRACTION;
        self.fd_nested(p, eps, alpha, h)
    }

    fn fd_nested(&self, p: Point, eps: f64, alpha: Alpha, h: f64) -> f64 {
        let (axis, n) = if alpha.x > 0 {
            (0, alpha.x.min(3))
        } else if alpha.t > 0 {
            (1, alpha.t.min(3))
        } else {
            return self.rule.value(p, eps, Alpha::ZERO);
        };
        let rest = if axis == 0 {
            Alpha::new(alpha.x - n, alpha.t)
        } else {
            Alpha::new(alpha.x, alpha.t - n)
        };
        let weights = central_stencil(n);
        let half = (weights.len() / 2) as f64;
        let mut acc = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut q = p;
            q[axis] += (i as f64 - half) * h;
            acc += w * self.fd_nested(q, eps, rest, h);
        }
        acc / h.powi(n as i32)
    }

    /// Same evaluator on a smaller box.
    pub fn restrict(&self, v: &DomainBox) -> Result<GeneralizedNet> {
        if !self.domain.contains_box(v) {
            return Err(Error::DomainMismatch(format!(
                "restriction box {v} is not inside the domain {}",
                self.domain
            )));
        }
        let mut out = self.clone();
        out.domain = *v;
        Ok(out)
    }

    #[cfg(test)]
    pub(crate) fn with_mode_and_order(mut self, mode: DerivativeMode, max_order: usize) -> Self {
        self.mode = mode;
        self.max_order = max_order;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Cubic;
    impl NetRule for Cubic {
        fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
            let x = p[0] / eps;
            let d = [x * x * x, 3.0 * x * x, 6.0 * x, 6.0];
            d.get(alpha.x).copied().unwrap_or(0.0) / eps.powi(alpha.x as i32)
        }
    }

    #[test]
    fn ladder_validation() {
        assert_eq!(EpsLadder::default().len(), 13);
        assert_eq!(EpsLadder::default().smallest(), 2f64.powi(-16));
        assert!(EpsLadder::geometric(2.0, 0.5, 8).is_err());
        assert!(EpsLadder::geometric(0.5, 0.5, 5).is_err());
        assert!(EpsLadder::from_values(vec![0.5, 0.4, 0.4, 0.3, 0.2, 0.1]).is_err());
        assert!(EpsLadder::geometric(1.0, 0.5, 6).is_ok());
    }

    #[test]
    fn domain_validation_and_containment() {
        assert!(DomainBox::interval(1.0, 0.0).is_err());
        let d = DomainBox::interval(-1.0, 1.0).unwrap();
        let v = DomainBox::interval(-0.5, 0.25).unwrap();
        assert!(d.contains_box(&v));
        assert!(!v.contains_box(&d));
        let n = d.neighborhood([0.9, 0.0], 0.25).unwrap();
        assert_eq!((n.lo(0), n.hi(0)), (0.65, 1.0));
    }

    #[test]
    fn finite_differences_match_analytic_rule() {
        let d = DomainBox::interval(-1.0, 1.0).unwrap();
        let analytic = GeneralizedNet::new(d, Arc::new(Cubic), 3, DerivativeMode::Analytic).unwrap();
        let fd = analytic.clone().with_mode_and_order(DerivativeMode::FiniteDifference, 3);
        for k in 1..=3 {
            let a = analytic.eval([0.01, 0.0], 0.1, Alpha::dx(k));
            let b = fd.eval([0.01, 0.0], 0.1, Alpha::dx(k));
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn restriction_composes() {
        let d = DomainBox::interval(-1.0, 1.0).unwrap();
        let u = GeneralizedNet::new(d, Arc::new(Cubic), 3, DerivativeMode::Analytic).unwrap();
        let v = DomainBox::interval(-0.5, 0.5).unwrap();
        let w = DomainBox::interval(0.0, 0.5).unwrap();
        let uvw = u.restrict(&v).unwrap().restrict(&w).unwrap();
        assert_eq!(uvw.domain(), u.restrict(&w).unwrap().domain());
        assert!(uvw.same_rule(&u));
        assert!(u.restrict(&v).unwrap().restrict(&d).is_err());
    }

    #[test]
    fn alpha_enumeration() {
        assert_eq!(Alpha::up_to(2, 1).len(), 3);
        assert_eq!(Alpha::up_to(2, 2).len(), 6);
    }
}
