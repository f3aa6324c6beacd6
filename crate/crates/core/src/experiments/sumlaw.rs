//! Strength of singularities and the interaction `∂_t w = u v` of two waves
//! `u = u0(x − t)`, `v = v0(x + t)` whose characteristics meet at `(0, 1)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::local_spectrum::{critical_exponent, CriticalExponent, Endpoint, FiberRadius, SpectrumOptions, TargetTopology};
use crate::nets::jet::binomial;
use crate::nets::{
    embed_classical, make_delta_at, Alpha, AsymptoticScale, Classical, DerivativeMode, DomainBox, EpsLadder,
    GeneralizedNet, Mollifier, NetRule, Point,
};
use crate::quadrature::gauss_legendre;

/// Distance from an integer tolerated when rounding a radius to a strength.
pub const STRENGTH_TOLERANCE: f64 = 0.2;

/// Integer strength read from the C¹ fiber radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strength {
    /// `n = round(R)`; the singularity has order `−n`.
    pub n: i64,
    pub radius: f64,
    pub endpoint: Endpoint,
    /// The fiber contains its endpoint.
    pub endpoint_closed: bool,
}

/// Round a C¹ critical exponent to a strength.
pub fn strength_from_exponent(ce: &CriticalExponent) -> Result<Strength> {
    let radius = match ce.radius {
        FiberRadius::Empty => 0.0,
        FiberRadius::Finite { r } => r,
        FiberRadius::Infinite | FiberRadius::Unknown => {
            return Err(Error::InconsistentStrength {
                radius: f64::INFINITY,
                tolerance: STRENGTH_TOLERANCE,
            })
        }
    };
    let n = radius.round();
    if (radius - n).abs() > STRENGTH_TOLERANCE {
        return Err(Error::InconsistentStrength {
            radius,
            tolerance: STRENGTH_TOLERANCE,
        });
    }
    Ok(Strength {
        n: n as i64,
        radius,
        endpoint: ce.endpoint,
        endpoint_closed: ce.endpoint == Endpoint::Unattained,
    })
}

/// Strength of `ι(f)` at `x0` from its C¹ spectrum.
pub fn strength_of_singularity(
    f: &Classical,
    x0: f64,
    phi: &Mollifier,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<Strength> {
    let u = embed_classical(f, phi, DomainBox::interval(-1.0, 1.0)?)?;
    let ce = critical_exponent(&u, &AsymptoticScale::Power, [x0, 0.0], &TargetTopology::c(1), ladder, opts)?;
    strength_from_exponent(&ce)
}

/// Initial wave concentrated at ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WaveData {
    /// `∂^k δ`.
    DeltaDerivative { k: usize },
    /// `δ^m`.
    DeltaPower { m: u32 },
}

impl WaveData {
    fn net(&self, at: f64, phi: &Mollifier) -> Result<GeneralizedNet> {
        let dom = DomainBox::interval(-2.0, 2.0)?;
        match *self {
            WaveData::DeltaDerivative { k } => embed_classical(&Classical::DeltaDerivative { k, at }, phi, dom),
            WaveData::DeltaPower { m } => make_delta_at(m, at, phi, dom),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WaveData::DeltaDerivative { k } => format!("d^{k} delta"),
            WaveData::DeltaPower { m } => format!("delta^{m}"),
        }
    }
}

/// `u0` at `x = −1`, `v0` at `x = +1`, solved on `[-1, 1] × [0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumLawProblem {
    pub u0: WaveData,
    pub v0: WaveData,
    pub t_max: f64,
    #[serde(default)]
    pub mollifier: Mollifier,
}

impl SumLawProblem {
    pub fn new(u0: WaveData, v0: WaveData) -> Self {
        SumLawProblem {
            u0,
            v0,
            t_max: 1.5,
            mollifier: Mollifier::standard(),
        }
    }
}

/// Both initial nets vanish beyond `ε` of their centres.
#[derive(Debug)]
struct InteractionRule {
    u0: GeneralizedNet,
    v0: GeneralizedNet,
}

/// Quadrature panels per ε of integration length.
const PANELS_PER_EPS: f64 = 16.0;

impl InteractionRule {
    /// `∂_x^a ∂_t^c [u0(x − t) v0(x + t)]`.
    fn product_derivative(&self, x: f64, t: f64, eps: f64, a: usize, c: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..=a {
            for l in 0..=c {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let du = self.u0.eval([x - t, 0.0], eps, Alpha::dx(i + l));
                if du == 0.0 {
                    continue;
                }
                let dv = self.v0.eval([x + t, 0.0], eps, Alpha::dx(a - i + c - l));
                acc += sign * binomial(a, i) * binomial(c, l) * du * dv;
            }
        }
        acc
    }

    /// `∂_x^a ∫₀ᵗ u0(x − τ) v0(x + τ) dτ` over the overlap of the moving supports.
    fn integral(&self, x: f64, t: f64, eps: f64, a: usize) -> f64 {
        // u0(x − τ) ≠ 0 needs |x − τ + 1| < ε; v0(x + τ) ≠ 0 needs |x + τ − 1| < ε.
        let lo = (x + 1.0 - eps).max(1.0 - x - eps).max(0.0);
        let hi = (x + 1.0 + eps).min(1.0 - x + eps).min(t);
        if hi <= lo {
            return 0.0;
        }
        let panels = ((hi - lo) / eps * PANELS_PER_EPS).ceil().max(1.0) as usize;
        let rule = gauss_legendre(16);
        let width = (hi - lo) / panels as f64;
        (0..panels)
            .map(|p| {
                let a0 = lo + p as f64 * width;
                rule.integrate(a0, a0 + width, |tau| {
                    (0..=a)
                        .map(|i| {
                            let du = self.u0.eval([x - tau, 0.0], eps, Alpha::dx(i));
                            if du == 0.0 {
                                0.0
                            } else {
                                binomial(a, i) * du * self.v0.eval([x + tau, 0.0], eps, Alpha::dx(a - i))
                            }
                        })
                        .sum::<f64>()
                })
            })
            .sum()
    }
}

impl NetRule for InteractionRule {
    fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
        let (x, t) = (p[0], p[1].max(0.0));
        if alpha.t == 0 {
            self.integral(x, t, eps, alpha.x)
        } else {
            self.product_derivative(x, t, eps, alpha.x, alpha.t - 1)
        }
    }
}

/// Interaction component `w` on `[-1, 1] × [0, T]`.
pub fn solve_rauch_reed(p: &SumLawProblem) -> Result<GeneralizedNet> {
    if !(p.t_max >= 1.5 && p.t_max.is_finite()) {
        return Err(invalid("the interaction needs T ≥ 1.5"));
    }
    let u0 = p.u0.net(-1.0, &p.mollifier)?;
    let v0 = p.v0.net(1.0, &p.mollifier)?;
    let max_order = u0.max_order().min(v0.max_order()) / 2;
    let domain = DomainBox::space_time(-1.0, 1.0, 0.0, p.t_max)?;
    Ok(
        GeneralizedNet::new(domain, Arc::new(InteractionRule { u0, v0 }), max_order, DerivativeMode::Analytic)?
            .with_singular_points(vec![0.0])
            .with_label(format!("w[{} x {}]", p.u0.label(), p.v0.label())),
    )
}

/// The 1D net `x ↦ w(x, t)`.
pub fn time_slice(w: &GeneralizedNet, t: f64) -> Result<GeneralizedNet> {
    if w.dim() != 2 {
        return Err(invalid("time slices need a space-time net"));
    }
    let dom = w.domain();
    if !(t >= dom.lo(1) && t <= dom.hi(1)) {
        return Err(Error::DomainMismatch(format!("t = {t} lies outside {dom}")));
    }
    #[derive(Debug)]
    struct Slice {
        w: GeneralizedNet,
        t: f64,
    }
    impl NetRule for Slice {
        fn value(&self, p: Point, eps: f64, alpha: Alpha) -> f64 {
            self.w.eval([p[0], self.t], eps, Alpha::new(alpha.x, 0))
        }
    }
    Ok(GeneralizedNet::new(
        DomainBox::interval(dom.lo(0), dom.hi(0))?,
        Arc::new(Slice { w: w.clone(), t }),
        w.max_order(),
        w.mode(),
    )?
    .with_singular_points(w.singular_points().to_vec())
    .with_label(format!("{}|t={t}", w.label())))
}

/// C¹ strength of `w` at `(0, t)` read on the slice through `t`.
pub fn interaction_strength(
    p: &SumLawProblem,
    t: f64,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<(CriticalExponent, Result<Strength>)> {
    let w = solve_rauch_reed(p)?;
    let slice = time_slice(&w, t)?;
    let ce = critical_exponent(&slice, &AsymptoticScale::Power, [0.0, 0.0], &TargetTopology::c(1), ladder, opts)?;
    let s = strength_from_exponent(&ce);
    Ok((ce, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> EpsLadder {
        EpsLadder::default()
    }

    #[test]
    fn interaction_vanishes_before_the_meeting() {
        let p = SumLawProblem::new(WaveData::DeltaDerivative { k: 1 }, WaveData::DeltaPower { m: 2 });
        let w = solve_rauch_reed(&p).unwrap();
        for &eps in &[1.0 / 64.0, 1.0 / 1024.0] {
            for t in [0.0, 0.5, 0.9, 1.0 - 2.5 * eps] {
                for x in [-0.9, -0.3, 0.0, 0.2, 0.8] {
                    assert_eq!(w.eval([x, t], eps, Alpha::ZERO), 0.0);
                }
            }
        }
    }

    #[test]
    fn interaction_matches_the_convolution_oracle() {
        // For t > 1 + ε, substituting τ = x + 1 − εa: w(x, t) = ε^{-1-j-k} (φ^{(j)} ∗ φ^{(k)})(2x/ε).
        let phi = Mollifier::standard();
        let rule = gauss_legendre(32);
        for (j, k) in [(0usize, 0usize), (1, 0), (0, 1), (1, 1)] {
            let p = SumLawProblem::new(WaveData::DeltaDerivative { k: j }, WaveData::DeltaDerivative { k });
            let w = solve_rauch_reed(&p).unwrap();
            let eps = 1.0 / 256.0;
            for x in [-0.6 * eps, -0.1 * eps, 0.0, 0.35 * eps, 0.9 * eps] {
                let x: f64 = x;
                let z: f64 = 2.0 * x / eps;
                // ∫ φ^{(j)}(a) φ^{(k)}(z − a) da over the overlap [z − 1, 1] ∩ [−1, z + 1].
                let (lo, hi) = ((z - 1.0).max(-1.0), (z + 1.0).min(1.0));
                let panels = 64;
                let width = (hi - lo) / panels as f64;
                let conv: f64 = (0..panels)
                    .map(|i| {
                        let a0 = lo + i as f64 * width;
                        rule.integrate(a0, a0 + width, |a| phi.derivative(a, j) * phi.derivative(z - a, k))
                    })
                    .sum();
                let oracle = eps.powi(-1 - (j + k) as i32) * conv;
                let got = w.eval([x, 1.25], eps, Alpha::ZERO);
                let scale = eps.powi(-1 - (j + k) as i32);
                assert!((got - oracle).abs() <= 1e-9 * scale, "j={j} k={k} x={x}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn time_derivative_is_the_product() {
        let p = SumLawProblem::new(WaveData::DeltaPower { m: 1 }, WaveData::DeltaDerivative { k: 1 });
        let w = solve_rauch_reed(&p).unwrap();
        let eps = 1.0 / 128.0;
        let h = 1e-6;
        for (x, t) in [(0.0, 1.0), (0.3 * eps, 1.0 - 0.2 * eps), (-0.5 * eps, 1.0 + 0.4 * eps)] {
            let fd = (w.eval([x, t + h], eps, Alpha::ZERO) - w.eval([x, t - h], eps, Alpha::ZERO)) / (2.0 * h);
            let exact = w.eval([x, t], eps, Alpha::new(0, 1));
            assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(eps.powi(-3)), "{fd} vs {exact}");
            let fdx = (w.eval([x + h, t], eps, Alpha::ZERO) - w.eval([x - h, t], eps, Alpha::ZERO)) / (2.0 * h);
            let exact_x = w.eval([x, t], eps, Alpha::dx(1));
            assert!((fdx - exact_x).abs() <= 1e-5 * exact_x.abs().max(eps.powi(-3)), "{fdx} vs {exact_x}");
        }
    }

    #[test]
    fn strengths_of_classical_singularities() {
        let opts = SpectrumOptions::default();
        let phi = Mollifier::standard();
        let cases = [
            (Classical::Heaviside { at: 0.0 }, 1),
            (Classical::Kink { at: 0.0 }, 0),
            (Classical::DeltaDerivative { k: 0, at: 0.0 }, 2),
            (Classical::DeltaDerivative { k: 1, at: 0.0 }, 3),
        ];
        for (f, n) in cases {
            let s = strength_of_singularity(&f, 0.0, &phi, &ladder(), &opts).unwrap();
            assert_eq!(s.n, n, "{f:?}: {s:?}");
            assert!((s.radius - n as f64).abs() <= STRENGTH_TOLERANCE);
            assert!(s.endpoint_closed, "{f:?}: {s:?}");
        }
    }

    #[test]
    fn sum_law_and_power_inclusion() {
        let opts = SpectrumOptions::default();
        for (j, k) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let p = SumLawProblem::new(WaveData::DeltaDerivative { k: j }, WaveData::DeltaDerivative { k });
            let (ce, s) = interaction_strength(&p, 1.25, &ladder(), &opts).unwrap();
            let s = s.unwrap();
            assert_eq!(s.n, (j + k + 2) as i64, "j={j} k={k}: {ce:?}");
        }
        for (m, n) in [(1u32, 1u32), (2, 1), (2, 2)] {
            let p = SumLawProblem::new(WaveData::DeltaPower { m }, WaveData::DeltaPower { m: n });
            let (ce, _) = interaction_strength(&p, 1.25, &ladder(), &opts).unwrap();
            assert!(ce.radius.sup() <= (m + n) as f64 + 0.15, "m={m} n={n}: {ce:?}");
        }
    }

    #[test]
    fn rejects_short_horizons_and_bad_slices() {
        let mut p = SumLawProblem::new(WaveData::DeltaPower { m: 1 }, WaveData::DeltaPower { m: 1 });
        p.t_max = 1.2;
        assert!(solve_rauch_reed(&p).is_err());
        p.t_max = 1.5;
        let w = solve_rauch_reed(&p).unwrap();
        assert!(time_slice(&w, 2.0).is_err());
        assert!(strength_from_exponent(&CriticalExponent {
            radius: FiberRadius::Finite { r: 1.5 },
            endpoint: Endpoint::Unattained,
            at_radius: None,
        })
        .is_err());
    }
}
