//! Sampling grids and the seminorms `p_{K,l}`.

use serde::{Deserialize, Serialize};

use super::{Alpha, DomainBox, GeneralizedNet, Point};
use crate::error::{Error, Result};

/// Resolution of sup-norm sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    /// Uniform panels along x over the box.
    pub coarse: usize,
    /// Spacing near registered singular points, as a fraction of ε.
    pub refine: f64,
    /// Radius of refinement around singular points, in units of ε.
    pub radius: f64,
    /// Uniform samples along t for space-time boxes.
    pub t_points: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            coarse: 256,
            refine: 0.125,
            radius: 4.0,
            t_points: 17,
        }
    }
}

/// Sorted x-samples on `[lo, hi]`: a uniform grid plus spacing `refine·eps_small`
/// within `radius·eps_large` of each singular point.
///
/// The refined points are laid out relative to the singular point, so grids at
/// ε and ε/2 see the same profile positions.
pub fn axis_grid(lo: f64, hi: f64, singular: &[f64], eps_small: f64, eps_large: f64, s: &Sampling) -> Vec<f64> {
    let n = s.coarse.max(1);
    let mut pts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let spacing = s.refine * eps_small;
    let reach = s.radius * eps_large;
    for &c in singular {
        if c + reach < lo || c - reach > hi {
            continue;
        }
        let m = (reach / spacing).round() as i64;
        for j in -m..=m {
            let x = c + j as f64 * spacing;
            if x >= lo && x <= hi {
                pts.push(x);
            }
        }
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// Sample points of a box; space-time boxes use a uniform t-axis.
pub fn box_grid(k: &DomainBox, singular: &[f64], eps_small: f64, eps_large: f64, s: &Sampling) -> Vec<Point> {
    let xs = axis_grid(k.lo(0), k.hi(0), singular, eps_small, eps_large, s);
    if k.dim() == 1 {
        return xs.into_iter().map(|x| [x, 0.0]).collect();
    }
    let nt = s.t_points.max(2);
    let ts: Vec<f64> = (0..nt)
        .map(|i| k.lo(1) + k.width(1) * i as f64 / (nt - 1) as f64)
        .collect();
    let mut out = Vec::with_capacity(xs.len() * ts.len());
    for &t in &ts {
        for &x in &xs {
            out.push([x, t]);
        }
    }
    out
}

/// `max_{p, |α| ≤ l} |∂^α u_ε(p)|` over the given points; non-finite values give `+∞`.
pub fn sup_over(u: &GeneralizedNet, points: &[Point], alphas: &[Alpha], eps: f64) -> f64 {
    let mut best: f64 = 0.0;
    for &p in points {
        for &a in alphas {
            let v = u.eval(p, eps, a).abs();
            if !v.is_finite() {
                return f64::INFINITY;
            }
            best = best.max(v);
        }
    }
    best
}

/// `p_{K,l}(u_ε)`.
pub fn seminorm(u: &GeneralizedNet, k: &DomainBox, l: usize, eps: f64, s: &Sampling) -> Result<f64> {
    u.check_order(l)?;
    if !u.domain().contains_box(k) {
        return Err(Error::DomainMismatch(format!("K = {k} is not inside {}", u.domain())));
    }
    let pts = box_grid(k, u.singular_points(), eps, eps, s);
    Ok(sup_over(u, &pts, &Alpha::up_to(l, u.dim()), eps))
}
