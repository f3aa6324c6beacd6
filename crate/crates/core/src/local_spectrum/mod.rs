//! The sets N_x(u), Σ_x(u) and the radius R_x = inf N_x(u) for F = C^p or D′.

mod convergence;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use convergence::{
    assess, standard_test_family, test_convergence, ConvergenceOptions, ConvergenceStatus, ConvergenceVerdict, Probe,
    TargetTopology, TestFunctionSpec,
};

use crate::error::{invalid, Error, Result};
use crate::nets::{pow, AsymptoticScale, EpsLadder, GeneralizedNet, Point};

/// Knobs of the spectrum search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    /// Half-width η of the largest neighborhood.
    pub radius: f64,
    /// Number of nested neighborhoods `x ± η·2^{-k}`.
    pub depth: usize,
    pub r_max: f64,
    pub steps: usize,
    /// Spacing of the reported r samples.
    pub r_step: f64,
    /// Largest reported r sample.
    pub r_sample_max: f64,
    pub convergence: ConvergenceOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            radius: 0.25,
            depth: 6,
            r_max: 16.0,
            steps: 24,
            r_step: 0.5,
            r_sample_max: 8.0,
            convergence: ConvergenceOptions::default(),
        }
    }
}

impl SpectrumOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.depth >= 1 && self.r_max > 0.0 && self.steps >= 1) {
            return Err(invalid("spectrum search needs radius > 0, depth ≥ 1, r_max > 0 and steps ≥ 1"));
        }
        if !(self.r_step > 0.0 && self.r_sample_max >= 0.0) {
            return Err(invalid("r sampling needs a positive step"));
        }
        Ok(())
    }

    fn r_samples(&self) -> Vec<f64> {
        let n = (self.r_sample_max / self.r_step + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.r_step).collect()
    }
}

/// `R_x` with the empty-fiber and divergent cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FiberRadius {
    /// r = 0 already converges: x is regular.
    Empty,
    Finite { r: f64 },
    /// Divergent up to the search cap.
    Infinite,
    /// Search failed at this point.
    Unknown,
}

impl FiberRadius {
    pub fn value(&self) -> Option<f64> {
        match self {
            FiberRadius::Finite { r } => Some(*r),
            FiberRadius::Infinite => Some(f64::INFINITY),
            _ => None,
        }
    }

    /// `sup Σ_x`: 0 for an empty fiber.
    pub fn sup(&self) -> f64 {
        match self {
            FiberRadius::Empty => 0.0,
            FiberRadius::Finite { r } => *r,
            FiberRadius::Infinite | FiberRadius::Unknown => f64::INFINITY,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, FiberRadius::Empty)
    }
}

impl fmt::Display for FiberRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberRadius::Empty => f.write_str("empty"),
            FiberRadius::Finite { r } => write!(f, "{r:.6}"),
            FiberRadius::Infinite => f.write_str("inf"),
            FiberRadius::Unknown => f.write_str("unknown"),
        }
    }
}

/// Whether R itself belongs to N_x.
///
/// `Attained` means N_x = [R, ∞) and the fiber is the half-open `[0, R)`;
/// `Unattained` means N_x = (R, ∞) and the fiber is the closed `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    Attained,
    Unattained,
    Unknown,
}

impl Endpoint {
    /// Shape of the fiber `Σ_x = ℝ₊ \ N_x` at its right end.
    pub fn fiber_shape(self) -> &'static str {
        match self {
            Endpoint::Attained => "open",
            Endpoint::Unattained => "closed",
            Endpoint::Unknown => "unknown",
        }
    }

    /// Shape of `N_x` at its left end.
    pub fn n_shape(self) -> &'static str {
        match self {
            Endpoint::Attained => "closed",
            Endpoint::Unattained => "open",
            Endpoint::Unknown => "unknown",
        }
    }
}

/// Result of the search for `R_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponent {
    pub radius: FiberRadius,
    pub endpoint: Endpoint,
    /// Verdict at `r = R` (or at r = 0 for an empty fiber).
    pub at_radius: Option<ConvergenceVerdict>,
}

/// Cached probes on the nested neighborhoods of one point.
pub struct PointProbes {
    probes: Vec<Probe>,
    opts: ConvergenceOptions,
}

impl PointProbes {
    pub fn build(
        u: &GeneralizedNet,
        x: Point,
        topology: &TargetTopology,
        ladder: &EpsLadder,
        opts: &SpectrumOptions,
    ) -> Result<PointProbes> {
        opts.validate()?;
        if !u.domain().interior(x) {
            return Err(invalid(format!("base point {x:?} is not interior to {}", u.domain())));
        }
        let probes = (0..opts.depth)
            .into_par_iter()
            .filter_map(|k| {
                let rad = opts.radius * 0.5f64.powi(k as i32);
                let v = u.domain().neighborhood(x, rad)?;
                let eta = (0..u.dim())
                    .map(|i| (x[i] - v.lo(i)).min(v.hi(i) - x[i]))
                    .fold(f64::INFINITY, f64::min);
                topology.resolved(eta, ladder, &opts.convergence).then_some((k, v))
            })
            .map(|(_, v)| Probe::build(u, x, &v, topology, ladder, &opts.convergence))
            .collect::<Result<Vec<_>>>()?;
        if probes.is_empty() {
            return Err(invalid(format!(
                "no neighborhood of {x:?} fits the domain and is resolved by the ladder"
            )));
        }
        Ok(PointProbes {
            probes,
            opts: opts.convergence,
        })
    }

    /// Verdict at r: the first converging neighborhood wins; otherwise divergent
    /// when every neighborhood diverges, unknown else.
    pub fn verdict(&self, scale: &AsymptoticScale, r: f64) -> ConvergenceVerdict {
        let mut fallback: Option<ConvergenceVerdict> = None;
        for p in &self.probes {
            let v = p.verdict(scale, r, &self.opts);
            if v.status.converges() {
                return v;
            }
            let replace = match &fallback {
                None => true,
                Some(f) => f.status == ConvergenceStatus::Diverges && v.status == ConvergenceStatus::Unknown,
            };
            if replace {
                fallback = Some(v);
            }
        }
        fallback.expect("at least one neighborhood")
    }

    /// Bisection for `R_x` exploiting monotonicity of N_x in r.
    pub fn critical_exponent(&self, scale: &AsymptoticScale, r_max: f64, steps: usize) -> CriticalExponent {
        let at0 = self.verdict(scale, 0.0);
        if at0.status.converges() {
            return CriticalExponent {
                radius: FiberRadius::Empty,
                endpoint: Endpoint::Unknown,
                at_radius: Some(at0),
            };
        }
        let top = self.verdict(scale, r_max);
        if !top.status.converges() {
            return CriticalExponent {
                radius: FiberRadius::Infinite,
                endpoint: Endpoint::Unknown,
                at_radius: None,
            };
        }
        let (mut lo, mut hi, mut at_hi) = (0.0, r_max, top);
        for _ in 0..steps {
            let mid = 0.5 * (lo + hi);
            let v = self.verdict(scale, mid);
            if v.status.converges() {
                hi = mid;
                at_hi = v;
            } else {
                lo = mid;
            }
        }
        let endpoint = match at_hi.status {
            ConvergenceStatus::ConvergesNonzero => Endpoint::Attained,
            ConvergenceStatus::ConvergesToZero => Endpoint::Unattained,
            _ => Endpoint::Unknown,
        };
        CriticalExponent {
            radius: FiberRadius::Finite { r: hi },
            endpoint,
            at_radius: Some(at_hi),
        }
    }
}

/// `R_x(u)` with its endpoint class.
pub fn critical_exponent(
    u: &GeneralizedNet,
    scale: &AsymptoticScale,
    x: Point,
    topology: &TargetTopology,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<CriticalExponent> {
    let probes = PointProbes::build(u, x, topology, ladder, opts)?;
    Ok(probes.critical_exponent(scale, opts.r_max, opts.steps))
}

/// Points of `grid` whose fiber is nonempty (r = 0 fails to converge).
pub fn singular_support(
    u: &GeneralizedNet,
    scale: &AsymptoticScale,
    grid: &[Point],
    topology: &TargetTopology,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<Vec<Point>> {
    let flags = grid
        .par_iter()
        .map(|&x| {
            let probes = PointProbes::build(u, x, topology, ladder, opts)?;
            Ok(!probes.verdict(scale, 0.0).status.converges())
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(grid.iter().zip(flags).filter(|(_, s)| *s).map(|(x, _)| *x).collect())
}

/// One base point of a singular spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub x: Point,
    pub radius: FiberRadius,
    pub endpoint: Endpoint,
    /// Status of `a(r)·u` at the sampled exponents.
    pub samples: Vec<(f64, ConvergenceStatus)>,
    pub error: Option<String>,
}

impl SpectrumPoint {
    pub fn fiber_nonempty(&self) -> bool {
        !matches!(self.radius, FiberRadius::Empty)
    }
}

/// `{(x, r) : r ∈ Σ_x(u)}` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub topology: TargetTopology,
    pub scale: AsymptoticScale,
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumResult {
    /// Base points with nonempty fiber.
    pub fn projection(&self) -> Vec<Point> {
        self.points.iter().filter(|p| p.fiber_nonempty()).map(|p| p.x).collect()
    }

    pub fn at(&self, x: Point) -> Option<&SpectrumPoint> {
        self.points.iter().find(|p| p.x == x)
    }
}

/// Critical exponents and r-samples at every grid point.
pub fn singular_spectrum(
    u: &GeneralizedNet,
    scale: &AsymptoticScale,
    grid: &[Point],
    topology: &TargetTopology,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    opts.validate()?;
    topology.validate(u)?;
    let rs = opts.r_samples();
    let points = grid
        .par_iter()
        .map(|&x| match PointProbes::build(u, x, topology, ladder, opts) {
            Ok(probes) => {
                let ce = probes.critical_exponent(scale, opts.r_max, opts.steps);
                let samples = rs.iter().map(|&r| (r, probes.verdict(scale, r).status)).collect();
                SpectrumPoint {
                    x,
                    radius: ce.radius,
                    endpoint: ce.endpoint,
                    samples,
                    error: None,
                }
            }
            Err(e) => SpectrumPoint {
                x,
                radius: FiberRadius::Unknown,
                endpoint: Endpoint::Unknown,
                samples: Vec::new(),
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(SpectrumResult {
        topology: topology.clone(),
        scale: *scale,
        points,
    })
}

/// Violations of the monotone-fiber property: a convergent sample followed by a
/// larger r that does not converge to zero.
pub fn monotone_fiber_violations(result: &SpectrumResult) -> Vec<String> {
    let mut out = Vec::new();
    for p in &result.points {
        if let Some(first) = p.samples.iter().position(|(_, s)| s.converges()) {
            for &(r, s) in &p.samples[first + 1..] {
                if s != ConvergenceStatus::ConvergesToZero {
                    out.push(format!(
                        "x = {:?}: converges at r = {} but {} at r = {r}",
                        p.x, p.samples[first].0, s
                    ));
                }
            }
        }
    }
    out
}

/// Grid points in `a` farther than `tol` from every point of `b`.
pub fn points_outside(a: &[Point], b: &[Point], tol: f64) -> Vec<Point> {
    a.iter()
        .copied()
        .filter(|p| {
            !b.iter()
                .any(|q| (p[0] - q[0]).abs() <= tol + 1e-12 && (p[1] - q[1]).abs() <= tol + 1e-12)
        })
        .collect()
}

/// Region of the product bound for one base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductRegion {
    /// Regular for both factors.
    Regular,
    /// Singular for u only.
    OnlyU,
    /// Singular for v only.
    OnlyV,
    Both,
}

/// Per-point check of the product bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearRow {
    pub x: Point,
    pub region: ProductRegion,
    pub r_u: FiberRadius,
    pub r_v: FiberRadius,
    pub r_product: FiberRadius,
    /// Largest admissible `sup Σ_x(uv)`; `None` means the fiber must be empty.
    pub bound: Option<f64>,
    pub ok: bool,
}

fn within(r: &FiberRadius, bound: Option<f64>, tol: f64) -> bool {
    match bound {
        None => r.is_empty(),
        Some(b) if b.is_infinite() => true,
        Some(b) => match r {
            FiberRadius::Empty => true,
            FiberRadius::Finite { r } => *r <= b + tol,
            _ => false,
        },
    }
}

fn require_algebra(topology: &TargetTopology) -> Result<()> {
    if topology.is_algebra() {
        Ok(())
    } else {
        Err(invalid("product bounds need an algebra topology C^p"))
    }
}

/// Checks `Σ_x(uv)` against `Σ_x(u)`, `Σ_x(v)` and `[0, sup Σ_x(u) + sup Σ_x(v)]`.
#[allow(clippy::too_many_arguments)]
pub fn check_nonlinear_bounds(
    u: &GeneralizedNet,
    v: &GeneralizedNet,
    scale: &AsymptoticScale,
    grid: &[Point],
    topology: &TargetTopology,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
    tol: f64,
) -> Result<Vec<NonlinearRow>> {
    require_algebra(topology)?;
    let uv = crate::nets::mul(u, v)?;
    let su = singular_spectrum(u, scale, grid, topology, ladder, opts)?;
    let sv = singular_spectrum(v, scale, grid, topology, ladder, opts)?;
    let suv = singular_spectrum(&uv, scale, grid, topology, ladder, opts)?;
    let rows = su
        .points
        .iter()
        .zip(&sv.points)
        .zip(&suv.points)
        .map(|((pu, pv), puv)| {
            let (region, bound) = match (pu.fiber_nonempty(), pv.fiber_nonempty()) {
                (false, false) => (ProductRegion::Regular, None),
                (true, false) => (ProductRegion::OnlyU, Some(pu.radius.sup())),
                (false, true) => (ProductRegion::OnlyV, Some(pv.radius.sup())),
                (true, true) => (ProductRegion::Both, Some(pu.radius.sup() + pv.radius.sup())),
            };
            NonlinearRow {
                x: pu.x,
                region,
                r_u: pu.radius,
                r_v: pv.radius,
                r_product: puv.radius,
                bound,
                ok: within(&puv.radius, bound, tol),
            }
        })
        .collect();
    Ok(rows)
}

/// Per-point check of `sup Σ_x(u^p) ≤ p·sup Σ_x(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub x: Point,
    pub r_u: FiberRadius,
    pub r_power: FiberRadius,
    pub bound: Option<f64>,
    pub ok: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn check_power_bound(
    u: &GeneralizedNet,
    p: u32,
    scale: &AsymptoticScale,
    grid: &[Point],
    topology: &TargetTopology,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
    tol: f64,
) -> Result<Vec<PowerRow>> {
    require_algebra(topology)?;
    if p == 0 {
        return Err(invalid("power must be at least 1"));
    }
    let up = pow(u, p)?;
    let su = singular_spectrum(u, scale, grid, topology, ladder, opts)?;
    let sp = singular_spectrum(&up, scale, grid, topology, ladder, opts)?;
    Ok(su
        .points
        .iter()
        .zip(&sp.points)
        .map(|(a, b)| {
            let bound = a.fiber_nonempty().then(|| p as f64 * a.radius.sup());
            PowerRow {
                x: a.x,
                r_u: a.radius,
                r_power: b.radius,
                bound,
                ok: within(&b.radius, bound, tol),
            }
        })
        .collect())
}

/// Uniform 1D grid of `n` points strictly inside `(lo, hi)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<Point>> {
    if !(hi > lo) || n == 0 {
        return Err(Error::InvalidArgument("grid needs hi > lo and at least one point".into()));
    }
    Ok((1..=n)
        .map(|i| [lo + (hi - lo) * i as f64 / (n + 1) as f64, 0.0])
        .collect())
}

#[cfg(test)]
mod tests;
