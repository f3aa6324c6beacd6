//! Embeddings of classical objects: delta powers, delta derivatives,
//! mollified piecewise-smooth functions and ε-independent smooth functions.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::jet::Jet;
use super::mollifier::Mollifier;
use super::{Alpha, DerivativeMode, DomainBox, GeneralizedNet, NetRule, Point};
use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;

/// Highest derivative order supported by the closed-form constructors.
pub const CLASSICAL_MAX_ORDER: usize = 8;

/// Smooth function of one variable with exact Taylor jets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Smooth {
    Const { value: f64 },
    /// `Σ coeffs[k] x^k`.
    Poly { coeffs: Vec<f64> },
    /// `amp·sin(freq·x + phase)`.
    Sin { amp: f64, freq: f64, phase: f64 },
    /// `amp·exp(-((x - center)/width)²)`.
    Gaussian { amp: f64, center: f64, width: f64 },
    /// `amp·exp(1 - 1/(1 - y²))`, `y = (x - center)/halfwidth`; compactly supported, peak `amp`.
    Bump { amp: f64, center: f64, halfwidth: f64 },
}

impl Smooth {
    pub fn constant(value: f64) -> Self {
        Smooth::Const { value }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Smooth::Const { value } => *value,
            Smooth::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Smooth::Sin { amp, freq, phase } => amp * (freq * x + phase).sin(),
            Smooth::Gaussian { amp, center, width } => {
                let y = (x - center) / width;
                amp * (-y * y).exp()
            }
            Smooth::Bump { amp, center, halfwidth } => amp * super::mollifier::window_bump((x - center) / halfwidth),
        }
    }

    /// Taylor jet of order `order` at `x`.
    pub fn jet(&self, x: f64, order: usize) -> Jet {
        match self {
            Smooth::Const { value } => Jet::constant(*value, order),
            Smooth::Poly { .. } => {
                let var = Jet::variable(x, order);
                let coeffs = match self {
                    Smooth::Poly { coeffs } => coeffs,
                    _ => unreachable!(),
                };
                coeffs
                    .iter()
                    .rev()
                    .fold(Jet::zero(order), |acc, c| (&acc * &var).add_scalar(*c))
            }
            Smooth::Sin { amp, freq, phase } => {
                let arg = Jet::variable(x, order).scale(*freq).add_scalar(*phase);
                arg.sin_cos().0.scale(*amp)
            }
            Smooth::Gaussian { amp, center, width } => {
                let y = Jet::variable(x - center, order).scale(1.0 / width);
                (-(&y * &y)).exp().scale(*amp)
            }
            Smooth::Bump { amp, center, halfwidth } => {
                let y = (x - center) / halfwidth;
                let j = bump_jet(y, order, 1.0);
                let mut c: Vec<f64> = j.coeffs().to_vec();
                for (k, ck) in c.iter_mut().enumerate() {
                    *ck *= amp * std::f64::consts::E / halfwidth.powi(k as i32);
                }
                Jet::from_coeffs(c)
            }
        }
    }
}

/// Jet of `exp(-a/(1-y²))`, identically zero outside (-1, 1).
pub(crate) fn bump_jet(y: f64, order: usize, a: f64) -> Jet {
    if y.abs() >= 1.0 {
        return Jet::zero(order);
    }
    let s0 = 1.0 - y * y;
    if -a / s0 < -745.0 {
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
    Jet::from_coeffs(s).recip().scale(-a).exp()
}

/// Classical object to embed by convolution with `φ_ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Classical {
    Smooth { f: Smooth },
    /// `H(x - at)`.
    Heaviside { at: f64 },
    /// `|x - at|`.
    Kink { at: f64 },
    /// `pieces[i]` on `(breaks[i-1], breaks[i])`; `pieces.len() = breaks.len() + 1`.
    Piecewise { breaks: Vec<f64>, pieces: Vec<Smooth> },
    /// `δ^{(k)}(x - at)`.
    DeltaDerivative { k: usize, at: f64 },
}

impl Classical {
    fn as_piecewise(&self) -> Option<(Vec<f64>, Vec<Smooth>)> {
        match self {
            Classical::Smooth { f } => Some((vec![], vec![f.clone()])),
            Classical::Heaviside { at } => Some((vec![*at], vec![Smooth::constant(0.0), Smooth::constant(1.0)])),
            Classical::Kink { at } => Some((
                vec![*at],
                vec![
                    Smooth::Poly { coeffs: vec![*at, -1.0] },
                    Smooth::Poly { coeffs: vec![-*at, 1.0] },
                ],
            )),
            Classical::Piecewise { breaks, pieces } => Some((breaks.clone(), pieces.clone())),
            Classical::DeltaDerivative { .. } => None,
        }
    }

    /// Points where the object fails to be smooth.
    pub fn singular_points(&self) -> Vec<f64> {
        match self {
            Classical::Smooth { .. } => vec![],
            Classical::Heaviside { at } | Classical::Kink { at } | Classical::DeltaDerivative { at, .. } => vec![*at],
            Classical::Piecewise { breaks, .. } => breaks.clone(),
        }
    }
}

#[derive(Debug)]
struct DeltaPowerRule {
    m: u32,
    center: f64,
    phi: Arc<Mollifier>,
}

impl NetRule for DeltaPowerRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        let y = (p[0] - self.center) / eps;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let a = alpha.x;
        let jet = self.phi.jet(y, a);
        let jet = if self.m == 1 { jet } else { jet.powi(self.m) };
        jet.derivative(a) * eps.powi(-(self.m as i32) - a as i32)
    }
}

#[derive(Debug)]
struct DeltaDerivativeRule {
    k: usize,
    center: f64,
    phi: Arc<Mollifier>,
}

impl NetRule for DeltaDerivativeRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        let y = (p[0] - self.center) / eps;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let order = self.k + alpha.x;
        self.phi.derivative(y, order) * eps.powi(-1 - order as i32)
    }
}

#[derive(Debug)]
struct ConvolvedRule {
    breaks: Vec<f64>,
    pieces: Vec<Smooth>,
    phi: Arc<Mollifier>,
}

impl ConvolvedRule {
    /// `ε^{-a} ∫_{lo}^{hi} f(x - εy) φ^{(a)}(y) dy` for one smooth piece.
    ///
    /// Integrating by parts moves the derivatives onto f, leaving only cut-point
    /// terms `ε^{j-a} [f^{(j)}(x - εy) φ^{(a-1-j)}(y)]`, which vanish at `y = ±1`.
    /// This avoids the cancellation of `ε^{-a} ∫ f φ^{(a)}` on smooth stretches.
    fn piece_integral(&self, f: &Smooth, x: f64, eps: f64, a: usize, lo: f64, hi: f64) -> f64 {
        if let Smooth::Const { value } = f {
            if *value == 0.0 {
                return 0.0;
            }
            return if a == 0 {
                value * self.phi.mass_between(lo, hi)
            } else {
                value * (self.phi.derivative(hi, a - 1) - self.phi.derivative(lo, a - 1)) * eps.powi(-(a as i32))
            };
        }
        let mut total = 0.0;
        if a > 0 {
            let jet_hi = f.jet(x - eps * hi, a - 1);
            let jet_lo = f.jet(x - eps * lo, a - 1);
            for j in 0..a {
                let k = a - 1 - j;
                let term = jet_hi.derivative(j) * self.phi.derivative(hi, k) - jet_lo.derivative(j) * self.phi.derivative(lo, k);
                total += term * eps.powi(j as i32 - a as i32);
            }
        }
        let rule = gauss_legendre(16);
        let panels = 8;
        let w = (hi - lo) / panels as f64;
        total
            + (0..panels)
                .map(|i| {
                    let a0 = lo + w * i as f64;
                    rule.integrate(a0, a0 + w, |y| f.jet(x - eps * y, a).derivative(a) * self.phi.value(y))
                })
                .sum::<f64>()
    }
}

impl NetRule for ConvolvedRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        let x = p[0];
        let a = alpha.x;
        let mut cuts = vec![-1.0];
        let mut inner: Vec<f64> = self
            .breaks
            .iter()
            .map(|s| (x - s) / eps)
            .filter(|y| y.abs() < 1.0)
            .collect();
        inner.sort_by(|u, v| u.total_cmp(v));
        cuts.extend(inner);
        cuts.push(1.0);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let z_mid = x - eps * 0.5 * (w[0] + w[1]);
            let idx = self.breaks.partition_point(|b| *b < z_mid);
            total += self.piece_integral(&self.pieces[idx], x, eps, a, w[0], w[1]);
        }
        total
    }
}

#[derive(Debug)]
struct SmoothRule {
    f: Smooth,
}

impl NetRule for SmoothRule {
    fn value(&self, p: Point, _eps: f64, alpha: Alpha) -> f64 {
        if alpha.x == 0 {
            return self.f.value(p[0]);
        }
        self.f.jet(p[0], alpha.x).derivative(alpha.x)
    }
}

fn default_domain() -> DomainBox {
    DomainBox::interval(-1.0, 1.0).expect("static interval")
}

/// `δ^m = [ε^{-m} φ^m(x/ε)]` on `[-1, 1]`.
pub fn make_delta(m: u32, phi: &Mollifier) -> Result<GeneralizedNet> {
    make_delta_at(m, 0.0, phi, default_domain())
}

/// `δ^m` centred at `center` on a 1D domain.
pub fn make_delta_at(m: u32, center: f64, phi: &Mollifier, domain: DomainBox) -> Result<GeneralizedNet> {
    if m < 1 {
        return Err(invalid("delta power m must be at least 1"));
    }
    if domain.dim() != 1 {
        return Err(invalid("delta powers live on 1D domains"));
    }
    let rule = DeltaPowerRule {
        m,
        center,
        phi: Arc::new(phi.clone()),
    };
    let label = if m == 1 { "delta".to_string() } else { format!("delta^{m}") };
    Ok(
        GeneralizedNet::new(domain, Arc::new(rule), CLASSICAL_MAX_ORDER, DerivativeMode::Analytic)?
            .with_singular_points(vec![center])
            .with_label(label),
    )
}

/// `ι(f) = [f ∗ φ_ε]`, or `[φ_ε^{(k)}(x - x0)]` for delta derivatives.
pub fn embed_classical(spec: &Classical, phi: &Mollifier, domain: DomainBox) -> Result<GeneralizedNet> {
    if domain.dim() != 1 {
        return Err(invalid("classical embeddings live on 1D domains"));
    }
    let singular = spec.singular_points();
    for &s in &singular {
        if !s.is_finite() {
            return Err(invalid("singular points must be finite"));
        }
        let tol = 1e-12 * (1.0 + s.abs());
        if (s - domain.lo(0)).abs() <= tol || (s - domain.hi(0)).abs() <= tol {
            return Err(invalid(format!("singular point {s} lies on the domain boundary {domain}")));
        }
    }
    let phi = Arc::new(phi.clone());
    let (rule, label): (Arc<dyn NetRule>, String) = match spec {
        Classical::DeltaDerivative { k, at } => (
            Arc::new(DeltaDerivativeRule { k: *k, center: *at, phi }),
            format!("delta^({k})@{at}"),
        ),
        _ => {
            let (breaks, pieces) = spec.as_piecewise().expect("non-delta specs are piecewise");
            if pieces.len() != breaks.len() + 1 {
                return Err(invalid("piecewise spec needs exactly one more piece than breakpoints"));
            }
            if breaks.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("piecewise breakpoints must be strictly increasing"));
            }
            (Arc::new(ConvolvedRule { breaks, pieces, phi }), embed_label(spec))
        }
    };
    Ok(GeneralizedNet::new(domain, rule, CLASSICAL_MAX_ORDER, DerivativeMode::Analytic)?
        .with_singular_points(singular)
        .with_label(label))
}

fn embed_label(spec: &Classical) -> String {
    match spec {
        Classical::Smooth { .. } => "iota(smooth)".into(),
        Classical::Heaviside { at } => format!("iota(H@{at})"),
        Classical::Kink { at } => format!("iota(|x-{at}|)"),
        Classical::Piecewise { .. } => "iota(piecewise)".into(),
        Classical::DeltaDerivative { k, at } => format!("delta^({k})@{at}"),
    }
}

/// The ε-independent net `[f]` with exact derivatives.
pub fn smooth_net(f: Smooth, domain: DomainBox) -> Result<GeneralizedNet> {
    if domain.dim() != 1 {
        return Err(invalid("smooth nets live on 1D domains"));
    }
    Ok(
        GeneralizedNet::new(domain, Arc::new(SmoothRule { f }), CLASSICAL_MAX_ORDER, DerivativeMode::Analytic)?
            .with_label("smooth"),
    )
}
