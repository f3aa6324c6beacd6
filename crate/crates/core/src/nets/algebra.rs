//! Differential-algebra operations on nets.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::jet::binomial;
use super::scale::AsymptoticScale;
use super::{Alpha, DerivativeMode, GeneralizedNet, NetRule, Point};
use crate::error::{invalid, Error, Result};

/// ε-dependent scalar factor multiplying a net.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsWeight {
    /// `ε^b`.
    Power { b: f64 },
    /// `ε^b·|ln ε|^k`.
    PowerLog { b: f64, k: f64 },
    /// `exp(c/ε)`.
    ExpInv { c: f64 },
    /// `a(r)(ε)` for an asymptotic scale.
    Scale { scale: AsymptoticScale, r: f64 },
}

impl EpsWeight {
    pub fn value(&self, eps: f64) -> f64 {
        match *self {
            EpsWeight::Power { b } => eps.powf(b),
            EpsWeight::PowerLog { b, k } => eps.powf(b) * eps.ln().abs().powf(k),
            EpsWeight::ExpInv { c } => (c / eps).exp(),
            EpsWeight::Scale { scale, r } => scale.eval(r, eps),
        }
    }
}

/// One algebra operation, for the declarative dispatcher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetOp {
    Add,
    Mul,
    Pow { p: u32 },
    Derive { alpha: Alpha },
    ScaleBy { scale: AsymptoticScale, r: f64 },
    Weight { weight: EpsWeight },
}

fn combined_mode(nets: &[&GeneralizedNet]) -> DerivativeMode {
    if nets.iter().all(|u| u.mode() == DerivativeMode::Analytic) {
        DerivativeMode::Analytic
    } else {
        DerivativeMode::FiniteDifference
    }
}

fn check_same_domain(u: &GeneralizedNet, v: &GeneralizedNet) -> Result<()> {
    if u.domain().contains_box(v.domain()) && v.domain().contains_box(u.domain()) {
        Ok(())
    } else {
        Err(Error::DomainMismatch(format!(
            "operands live on {} and {}",
            u.domain(),
            v.domain()
        )))
    }
}

fn union_singular(nets: &[&GeneralizedNet]) -> Vec<f64> {
    nets.iter().flat_map(|u| u.singular_points().iter().copied()).collect()
}

fn assemble(
    template: &GeneralizedNet,
    rule: Arc<dyn NetRule>,
    operands: &[&GeneralizedNet],
    max_order: usize,
    label: String,
) -> Result<GeneralizedNet> {
    let mode = combined_mode(operands);
    Ok(GeneralizedNet::new(*template.domain(), rule, max_order, mode)?
        .with_singular_points(union_singular(operands))
        .with_label(label))
}

/// Table of `∂^β u` for `β ≤ alpha`, row-major in `(β.x, β.t)`.
pub(crate) fn derivative_table(u: &GeneralizedNet, p: Point, eps: f64, alpha: Alpha) -> Vec<f64> {
    let mut out = Vec::with_capacity((alpha.x + 1) * (alpha.t + 1));
    for bx in 0..=alpha.x {
        for bt in 0..=alpha.t {
            out.push(u.eval(p, eps, Alpha::new(bx, bt)));
        }
    }
    out
}

/// Leibniz product of two derivative tables over the box `β ≤ alpha`.
fn leibniz(a: &[f64], b: &[f64], alpha: Alpha) -> Vec<f64> {
    let nt = alpha.t + 1;
    let mut out = vec![0.0; a.len()];
    for gx in 0..=alpha.x {
        for gt in 0..=alpha.t {
            let mut acc = 0.0;
            for bx in 0..=gx {
                for bt in 0..=gt {
                    acc += binomial(gx, bx)
                        * binomial(gt, bt)
                        * a[bx * nt + bt]
                        * b[(gx - bx) * nt + (gt - bt)];
                }
            }
            out[gx * nt + gt] = acc;
        }
    }
    out
}

#[derive(Debug)]
struct LinearRule {
    terms: Vec<(f64, GeneralizedNet)>,
}

impl NetRule for LinearRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        self.terms.iter().map(|(c, u)| c * u.eval(p, eps, alpha)).sum()
    }
}

#[derive(Debug)]
struct ProductRule {
    u: GeneralizedNet,
    v: GeneralizedNet,
}

impl NetRule for ProductRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        if alpha == Alpha::ZERO {
            return self.u.eval(p, eps, alpha) * self.v.eval(p, eps, alpha);
        }
        let a = derivative_table(&self.u, p, eps, alpha);
        let b = derivative_table(&self.v, p, eps, alpha);
        *leibniz(&a, &b, alpha).last().expect("non-empty table")
    }
}

#[derive(Debug)]
struct PowerRule {
    u: GeneralizedNet,
    p: u32,
}

impl NetRule for PowerRule {
    fn value(&self, pt: Point, eps: f64, alpha: Alpha) -> f64 {
        if alpha == Alpha::ZERO {
            return self.u.eval(pt, eps, alpha).powi(self.p as i32);
        }
        let base = derivative_table(&self.u, pt, eps, alpha);
        let mut acc = base.clone();
        for _ in 1..self.p {
            acc = leibniz(&base, &acc, alpha);
        }
        *acc.last().expect("non-empty table")
    }
}

#[derive(Debug)]
struct DerivRule {
    u: GeneralizedNet,
    shift: Alpha,
}

impl NetRule for DerivRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        self.u
            .eval(p, eps, Alpha::new(alpha.x + self.shift.x, alpha.t + self.shift.t))
    }
}

#[derive(Debug)]
struct WeightRule {
    u: GeneralizedNet,
    w: EpsWeight,
}

impl NetRule for WeightRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        let c = self.w.value(eps);
        if c == 0.0 {
            return 0.0;
        }
        c * self.u.eval(p, eps, alpha)
    }
}

/// `Σ c_i u_i`.
pub fn linear_combination(terms: &[(f64, GeneralizedNet)]) -> Result<GeneralizedNet> {
    let first = &terms.first().ok_or_else(|| invalid("empty linear combination"))?.1;
    for (_, u) in terms {
        check_same_domain(first, u)?;
    }
    let nets: Vec<&GeneralizedNet> = terms.iter().map(|(_, u)| u).collect();
    let max_order = nets.iter().map(|u| u.max_order()).min().unwrap_or(0);
    let label = terms
        .iter()
        .map(|(c, u)| if *c == 1.0 { u.label().to_string() } else { format!("{c}*{}", u.label()) })
        .collect::<Vec<_>>()
        .join(" + ");
    assemble(first, Arc::new(LinearRule { terms: terms.to_vec() }), &nets, max_order, label)
}

pub fn add(u: &GeneralizedNet, v: &GeneralizedNet) -> Result<GeneralizedNet> {
    linear_combination(&[(1.0, u.clone()), (1.0, v.clone())])
}

pub fn mul(u: &GeneralizedNet, v: &GeneralizedNet) -> Result<GeneralizedNet> {
    check_same_domain(u, v)?;
    let rule = ProductRule { u: u.clone(), v: v.clone() };
    let max_order = u.max_order().min(v.max_order());
    assemble(u, Arc::new(rule), &[u, v], max_order, format!("({})*({})", u.label(), v.label()))
}

pub fn pow(u: &GeneralizedNet, p: u32) -> Result<GeneralizedNet> {
    if p == 0 {
        return Err(invalid("power must be at least 1"));
    }
    let rule = PowerRule { u: u.clone(), p };
    assemble(u, Arc::new(rule), &[u], u.max_order(), format!("({})^{p}", u.label()))
}

pub fn derive(u: &GeneralizedNet, alpha: Alpha) -> Result<GeneralizedNet> {
    if u.dim() == 1 && alpha.t > 0 {
        return Err(invalid("time derivative of a 1D net"));
    }
    let remaining = u.max_order().checked_sub(alpha.order()).filter(|r| *r >= 2);
    let Some(max_order) = remaining else {
        return Err(Error::OrderOverflow {
            requested: alpha.order() + 2,
            max: u.max_order(),
        });
    };
    let rule = DerivRule { u: u.clone(), shift: alpha };
    assemble(u, Arc::new(rule), &[u], max_order, format!("d{alpha}({})", u.label()))
}

pub fn weight(u: &GeneralizedNet, w: EpsWeight) -> Result<GeneralizedNet> {
    let rule = WeightRule { u: u.clone(), w };
    assemble(u, Arc::new(rule), &[u], u.max_order(), format!("{w:?}*({})", u.label()))
}

/// `a(r)(ε)·u_ε`.
pub fn scale_by(u: &GeneralizedNet, scale: AsymptoticScale, r: f64) -> Result<GeneralizedNet> {
    if !(r >= 0.0) {
        return Err(invalid(format!("scale exponent must be nonnegative, got {r}")));
    }
    weight(u, EpsWeight::Scale { scale, r })
}

/// Dispatches one [`NetOp`] over its operands.
pub fn net_algebra(op: &NetOp, operands: &[GeneralizedNet]) -> Result<GeneralizedNet> {
    let arity = match op {
        NetOp::Add | NetOp::Mul => 2,
        _ => 1,
    };
    if operands.len() != arity {
        return Err(invalid(format!("{op:?} takes {arity} operand(s), got {}", operands.len())));
    }
    let u = &operands[0];
    match op {
        NetOp::Add => add(u, &operands[1]),
        NetOp::Mul => mul(u, &operands[1]),
        NetOp::Pow { p } => pow(u, *p),
        NetOp::Derive { alpha } => derive(u, *alpha),
        NetOp::ScaleBy { scale, r } => scale_by(u, *scale, *r),
        NetOp::Weight { weight: w } => weight(u, *w),
    }
}
