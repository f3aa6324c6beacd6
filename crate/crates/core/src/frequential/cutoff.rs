//! Cutoff functions for windowed transforms: the smooth bump window and the
//! spline cutoffs `χ_k = 1_{[-a,a]} ∗ ρ_k` with `ρ_k` a box convolved `k` times
//! with itself, whose derivatives obey certified `(C k)^j` bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nets::jet::binomial;
use crate::nets::mollifier::window_bump;

/// Uniform cardinal B-spline values `B_p(f + i)`, `i = 0..p`, for `f ∈ [0, 1)`.
fn bspline_row(f: f64, p: usize) -> Vec<f64> {
    let mut v = vec![1.0];
    for q in 2..=p {
        let mut next = vec![0.0; q];
        for (i, slot) in next.iter_mut().enumerate() {
            let s = f + i as f64;
            let here = if i < q - 1 { v[i] } else { 0.0 };
            let left = if i >= 1 { v[i - 1] } else { 0.0 };
            *slot = (s * here + (q as f64 - s) * left) / (q - 1) as f64;
        }
        v = next;
    }
    v
}

/// `B_p(t)` on its support `[0, p]`.
fn bspline(t: f64, p: usize) -> f64 {
    if p == 0 || t < 0.0 || t >= p as f64 {
        return 0.0;
    }
    let i = t.floor();
    bspline_row(t - i, p)[i as usize]
}

/// `∫_{-∞}^t B_n`, computed as `Σ_{j≥0} B_{n+1}(t − j)` without cancellation.
fn bspline_integral(t: f64, n: usize) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= n as f64 {
        return 1.0;
    }
    let i = t.floor();
    let row = bspline_row(t - i, n + 1);
    row[..=i as usize].iter().sum()
}

/// `j`-th derivative of the integrated spline: `∂^{j-1} B_n` for `j ≥ 1`.
fn bspline_integral_derivative(t: f64, n: usize, j: usize) -> f64 {
    if j == 0 {
        return bspline_integral(t, n);
    }
    let d = j - 1;
    if d >= n {
        return 0.0;
    }
    (0..=d)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(d, i) * bspline(t - i as f64, n - d)
        })
        .sum()
}

/// Plateau-and-ramp cutoff `1_{[-a,a]} ∗ ρ`, `ρ` the order-`n` spline of support width `ramp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineCutoff {
    pub plateau: f64,
    pub ramp: f64,
    pub order: usize,
}

impl SplineCutoff {
    /// Cutoff of `C^{k}` smoothness filling a window of half-width `half`: plateau on the inner half.
    pub fn for_order(k: usize, half: f64) -> Self {
        SplineCutoff {
            plateau: 0.75 * half,
            ramp: 0.5 * half,
            order: k + 1,
        }
    }

    fn knot(&self) -> f64 {
        self.ramp / self.order as f64
    }

    pub fn half_support(&self) -> f64 {
        self.plateau + 0.5 * self.ramp
    }

    /// Value at offset `y` from the centre.
    pub fn value(&self, y: f64) -> f64 {
        self.derivative(y, 0)
    }

    pub fn derivative(&self, y: f64, j: usize) -> f64 {
        let s = self.knot();
        let n = self.order;
        let shift = 0.5 * n as f64;
        let hi = bspline_integral_derivative((y + self.plateau) / s + shift, n, j);
        let lo = bspline_integral_derivative((y - self.plateau) / s + shift, n, j);
        (hi - lo) / s.powi(j as i32)
    }

    /// Constant `C` with `sup|∂^j χ| ≤ (C·order)^j`.
    pub fn growth_constant(&self) -> f64 {
        2.0 / self.ramp
    }

    /// Bound `(2n/ramp)^j` on `sup|∂^j χ|`.
    pub fn derivative_bound(&self, j: usize) -> f64 {
        (2.0 / self.knot()).powi(j as i32)
    }

    /// Sample-check `χ(0) = 1`, `0 ≤ χ ≤ 1` and the derivative bounds up to order `order - 1`.
    pub fn verify(&self, samples: usize) -> Result<()> {
        if !(self.plateau > 0.5 * self.ramp && self.ramp > 0.0 && self.order >= 1) {
            return Err(Error::Cutoff(format!(
                "plateau {} must exceed half the ramp {}",
                self.plateau, self.ramp
            )));
        }
        if (self.value(0.0) - 1.0).abs() > 1e-12 {
            return Err(Error::Cutoff(format!("cutoff value at the centre is {}", self.value(0.0))));
        }
        let half = self.half_support();
        for i in 0..=samples {
            let y = -half + 2.0 * half * i as f64 / samples as f64;
            let v = self.value(y);
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(Error::Cutoff(format!("cutoff value {v} at offset {y} leaves [0, 1]")));
            }
            for j in 1..self.order {
                let d = self.derivative(y, j).abs();
                let bound = self.derivative_bound(j);
                if !(d <= bound * (1.0 + 1e-9)) {
                    return Err(Error::Cutoff(format!(
                        "derivative of order {j} reaches {d:e} above the bound {bound:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Window multiplied into the net before transforming.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cutoff {
    /// `exp(1 − 1/(1 − y²))`, `y = offset/half`.
    Bump { half: f64 },
    Spline(SplineCutoff),
}

impl Cutoff {
    pub fn value(&self, y: f64) -> f64 {
        match self {
            Cutoff::Bump { half } => window_bump(y / half),
            Cutoff::Spline(s) => s.value(y),
        }
    }

    pub fn half_support(&self) -> f64 {
        match self {
            Cutoff::Bump { half } => *half,
            Cutoff::Spline(s) => s.half_support(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::jet::factorial;

    fn truncated_power_bspline(t: f64, p: usize) -> f64 {
        (0..=p)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let d = t - j as f64;
                sign * binomial(p, j) * if d > 0.0 { d.powi(p as i32 - 1) } else { 0.0 }
            })
            .sum::<f64>()
            / factorial(p - 1)
    }

    #[test]
    fn bspline_matches_truncated_power_formula() {
        for p in 1..=6 {
            for i in 0..40 {
                let t = -0.3 + (p as f64 + 0.6) * i as f64 / 39.0;
                let a = bspline(t, p);
                let b = if t < 0.0 || t >= p as f64 { 0.0 } else { truncated_power_bspline(t, p) };
                assert!((a - b).abs() < 1e-10, "p={p} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn integral_is_monotone_with_unit_mass() {
        for n in 1..=9 {
            let mut prev = 0.0;
            for i in 0..=200 {
                let t = -0.5 + (n as f64 + 1.0) * i as f64 / 200.0;
                let v = bspline_integral(t, n);
                assert!(v >= prev - 1e-15 && v <= 1.0 + 1e-15);
                prev = v;
            }
            assert_eq!(bspline_integral(n as f64 + 0.1, n), 1.0);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let c = SplineCutoff::for_order(4, 0.2);
        let h = 1e-5;
        for i in 0..50 {
            let y = -0.2 + 0.4 * i as f64 / 49.0 + 1e-3;
            for j in 1..4 {
                let fd = (c.derivative(y + h, j - 1) - c.derivative(y - h, j - 1)) / (2.0 * h);
                let exact = c.derivative(y, j);
                let scale = c.derivative_bound(j);
                assert!((fd - exact).abs() < 1e-4 * scale, "j={j} y={y}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn cutoffs_verify_for_all_orders() {
        for k in 0..=8 {
            let c = SplineCutoff::for_order(k, 0.125);
            c.verify(2000).unwrap();
            assert!(c.value(0.06).abs() > 1.0 - 1e-12);
            assert_eq!(c.value(0.126), 0.0);
        }
        let bad = SplineCutoff {
            plateau: 0.01,
            ramp: 0.1,
            order: 3,
        };
        assert!(matches!(bad.verify(100), Err(Error::Cutoff(_))));
    }
}
