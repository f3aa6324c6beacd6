//! Convergence of `a(r)(ε)·u_ε` in a target topology on one neighborhood.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::nets::mollifier::window_bump;
use crate::nets::sampling::{box_grid, Sampling};
use crate::nets::{Alpha, AsymptoticScale, DomainBox, EpsLadder, GeneralizedNet, Point};
use crate::quadrature::{breakpoints, composite, gauss_legendre};
use crate::stats::{least_squares, theil_sen};

/// A test function `(y − x)^j · ψ((y − c)/w)` placed relative to a neighborhood
/// of half-width η around x: `c = x + offset·η`, `w = width·η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSpec {
    pub offset: f64,
    pub width: f64,
    #[serde(default)]
    pub moment: u32,
}

impl TestFunctionSpec {
    fn fits(&self) -> bool {
        self.width > 0.0 && self.offset.abs() + self.width <= 1.0 + 1e-12
    }

    fn value(&self, y: f64, x: f64, eta: f64) -> f64 {
        let z = (y - (x + self.offset * eta)) / (self.width * eta);
        if z.abs() >= 1.0 {
            return 0.0;
        }
        window_bump(z) * (y - x).powi(self.moment as i32)
    }
}

/// Default D′ family: bumps at `x`, `x ± η/2` with half-widths `η/2`, `η/4`,
/// plus the first three moments of the centred `η/2` bump.
pub fn standard_test_family() -> Vec<TestFunctionSpec> {
    let mut out = Vec::new();
    for offset in [-0.5, 0.0, 0.5] {
        for width in [0.5, 0.25] {
            out.push(TestFunctionSpec { offset, width, moment: 0 });
        }
    }
    for moment in 1..=3 {
        out.push(TestFunctionSpec {
            offset: 0.0,
            width: 0.5,
            moment,
        });
    }
    out
}

/// Topology in which `a(r)·u_ε` must converge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetTopology {
    /// Uniform convergence of derivatives up to order p.
    Cp { p: usize },
    /// Weak convergence against a finite test family.
    Dprime {
        #[serde(default = "standard_test_family")]
        tests: Vec<TestFunctionSpec>,
    },
}

impl TargetTopology {
    pub fn c(p: usize) -> Self {
        TargetTopology::Cp { p }
    }

    pub fn dprime() -> Self {
        TargetTopology::Dprime {
            tests: standard_test_family(),
        }
    }

    /// Whether the ladder tail resolves this topology on a neighborhood of
    /// half-width `eta`: the narrowest test function must span `resolve_factor`
    /// times the largest tail ε.
    pub fn resolved(&self, eta: f64, ladder: &EpsLadder, opts: &ConvergenceOptions) -> bool {
        match self {
            TargetTopology::Cp { .. } => true,
            TargetTopology::Dprime { tests } => {
                let idx = ladder.len().saturating_sub(opts.tail + 1);
                let eps = ladder.values()[idx];
                let narrow = tests.iter().map(|t| t.width).fold(f64::INFINITY, f64::min);
                narrow * eta >= opts.resolve_factor * eps
            }
        }
    }

    pub fn is_algebra(&self) -> bool {
        matches!(self, TargetTopology::Cp { .. })
    }

    pub fn validate(&self, u: &GeneralizedNet) -> Result<()> {
        match self {
            TargetTopology::Cp { p } => u.check_order(*p),
            TargetTopology::Dprime { tests } => {
                if tests.is_empty() {
                    return Err(invalid("D′ topology needs at least one test function"));
                }
                if let Some(t) = tests.iter().find(|t| !t.fits()) {
                    return Err(invalid(format!(
                        "test function with offset {} and width {} leaves the neighborhood",
                        t.offset, t.width
                    )));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for TargetTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetTopology::Cp { p } => write!(f, "C{p}"),
            TargetTopology::Dprime { tests } if *tests == standard_test_family() => write!(f, "Dprime"),
            TargetTopology::Dprime { tests } => write!(f, "Dprime[{}]", tests.len()),
        }
    }
}

impl FromStr for TargetTopology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if matches!(lower.as_str(), "dprime" | "d'" | "d′" | "distributions") {
            return Ok(TargetTopology::dprime());
        }
        let digits = lower.strip_prefix("cp:").or_else(|| lower.strip_prefix('c'));
        if let Some(p) = digits.and_then(|d| d.parse::<usize>().ok()) {
            return Ok(TargetTopology::Cp { p });
        }
        Err(invalid(format!("unknown topology {t:?}; expected C<p> or Dprime")))
    }
}

/// Outcome of a convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord, Hash)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceStatus {
    ConvergesToZero,
    ConvergesNonzero,
    Diverges,
    Unknown,
}

impl ConvergenceStatus {
    pub fn converges(self) -> bool {
        matches!(self, ConvergenceStatus::ConvergesToZero | ConvergenceStatus::ConvergesNonzero)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConvergenceStatus::ConvergesToZero => "converges-to-zero",
            ConvergenceStatus::ConvergesNonzero => "converges-nonzero",
            ConvergenceStatus::Diverges => "diverges",
            ConvergenceStatus::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ConvergenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict with the increment diagnostics `(ε_i, d_i)` on the fit tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub status: ConvergenceStatus,
    pub limit_norm: Option<f64>,
    pub slope: Option<f64>,
    pub diagnostics: Vec<(f64, f64)>,
}

/// Knobs of the convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceOptions {
    /// Number of consecutive-rung increments used.
    pub tail: usize,
    /// Increment slope at or above which the net converges.
    pub converge_slope: f64,
    /// Increment slope at or below which the net diverges.
    pub diverge_slope: f64,
    /// Increments below this fraction of the largest norm count as zero.
    pub floor: f64,
    /// Limit must exceed this multiple of the final increment to be nonzero.
    pub nonzero_ratio: f64,
    pub sampling: Sampling,
    /// Power part σ of a fit `ln m ≈ σ ln ε + κ ln|ln ε| + c` at or above which the
    /// norms decay to zero.
    pub decay_slope: f64,
    /// Largest log residual of that fit.
    pub decay_residual: f64,
    /// D′ test functions must be at least this many tail ε wide.
    pub resolve_factor: f64,
    /// Uniform quadrature panels over a D′ neighborhood.
    pub quad_panels: usize,
    /// Quadrature panels along t for space-time pairings.
    pub t_panels: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            tail: 8,
            converge_slope: 0.2,
            diverge_slope: -0.05,
            floor: 1e-9,
            nonzero_ratio: 10.0,
            decay_slope: 0.05,
            decay_residual: 0.02,
            sampling: Sampling::default(),
            resolve_factor: 4.0,
            quad_panels: 32,
            t_panels: 4,
        }
    }
}

/// Quadrature panel width near singular points, in units of ε; the bump's flat
/// edges need it well below ε/4 once high derivatives amplify the error.
const PAIRING_FINE: f64 = 1.0 / 32.0;
const RATIO_MARGIN: f64 = 1e-9;
const TIGHT_LIMIT: f64 = 1e-5;

/// Verdict on norms `m_i` and increments `d_i` sampled at decreasing `eps_i`.
pub fn assess(eps: &[f64], m: &[f64], d: &[f64], opts: &ConvergenceOptions) -> ConvergenceVerdict {
    let diagnostics: Vec<(f64, f64)> = eps.iter().copied().zip(d.iter().copied()).collect();
    let verdict = |status, limit_norm, slope| ConvergenceVerdict {
        status,
        limit_norm,
        slope,
        diagnostics: diagnostics.clone(),
    };
    if m.iter().chain(d).any(|v| !v.is_finite()) {
        return verdict(ConvergenceStatus::Diverges, None, None);
    }
    let scale = m.iter().copied().fold(0.0, f64::max);
    let floor = opts.floor * scale;
    let dd: Vec<f64> = d.iter().map(|&v| if v <= floor { 0.0 } else { v }).collect();
    let last_m = *m.last().expect("nonempty tail");
    let last_d = *dd.last().expect("nonempty tail");
    if dd.iter().all(|&v| v == 0.0) {
        let status = if last_m > floor {
            ConvergenceStatus::ConvergesNonzero
        } else {
            ConvergenceStatus::ConvergesToZero
        };
        return verdict(status, Some(last_m), None);
    }
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = dd.iter().map(|&v| v.max(floor).max(f64::MIN_POSITIVE).ln()).collect();
    let slope = theil_sen(&x, &y).map(|s| s.0).unwrap_or(0.0);
    let converges = if slope >= opts.converge_slope {
        Some(true)
    } else if slope <= opts.diverge_slope {
        Some(false)
    } else {
        let ratios: Vec<f64> = dd
            .windows(2)
            .filter(|w| w[0] > 0.0 || w[1] > 0.0)
            .map(|w| if w[0] == 0.0 { f64::INFINITY } else { w[1] / w[0] })
            .collect();
        if ratios.iter().all(|&q| q < 1.0 - RATIO_MARGIN) {
            Some(true)
        } else if slope <= 0.0 || ratios.iter().all(|&q| q >= 1.0 - RATIO_MARGIN) {
            Some(false)
        } else {
            None
        }
    };
    match converges {
        Some(true) => {
            let nonzero = last_m > floor && last_m > opts.nonzero_ratio * last_d && {
                let tight = last_d <= TIGHT_LIMIT * last_m;
                tight || relative_increment_slope(&x, m, &dd).is_some_and(|s| s >= opts.converge_slope)
            };
            let status = if nonzero {
                ConvergenceStatus::ConvergesNonzero
            } else {
                ConvergenceStatus::ConvergesToZero
            };
            verdict(status, Some(last_m), Some(slope))
        }
        _ if decays_to_zero(&x, m, opts) => verdict(ConvergenceStatus::ConvergesToZero, Some(last_m), Some(slope)),
        Some(false) => verdict(ConvergenceStatus::Diverges, None, Some(slope)),
        None => verdict(ConvergenceStatus::Unknown, None, Some(slope)),
    }
}

/// Norms that follow `ε^σ |ln ε|^κ` with `σ` above the decay threshold tend to zero,
/// even when log factors keep the increments from shrinking on the ladder.
fn decays_to_zero(x: &[f64], m: &[f64], opts: &ConvergenceOptions) -> bool {
    if m.len() < 4 || m.iter().any(|&v| !(v > 0.0)) {
        return false;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.abs().ln()).collect();
    let one = vec![1.0; x.len()];
    let y: Vec<f64> = m.iter().map(|v| v.ln()).collect();
    let Some(c) = least_squares(&[x, &lx, &one], &y) else {
        return false;
    };
    let residual = (0..y.len())
        .map(|i| (y[i] - c[0] * x[i] - c[1] * lx[i] - c[2]).abs())
        .fold(0.0, f64::max);
    c[0] >= opts.decay_slope && residual <= opts.decay_residual
}

fn relative_increment_slope(x: &[f64], m: &[f64], d: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(m.iter().zip(d))
        .filter(|(_, (&mi, &di))| mi > 0.0 && di > 0.0)
        .map(|(&xi, (&mi, &di))| (xi, (di / mi).ln()))
        .unzip();
    if xs.len() < 4 {
        return None;
    }
    theil_sen(&xs, &ys).map(|s| s.0)
}

/// Samples of one net on one neighborhood, reusable for every r.
#[derive(Debug, Clone)]
pub enum Probe {
    /// Derivative values on self-similar pair grids: `small[j]` at `eps_small[j]`,
    /// `large[j]` at `eps_large[j]`, flattened over (point, α).
    Sup {
        eps_small: Vec<f64>,
        eps_large: Vec<f64>,
        small: Vec<Vec<f64>>,
        large: Vec<Vec<f64>>,
    },
    /// Pairings `values[i][j] = ⟨u_{ε_i}, ψ_j⟩` on the tail rungs.
    Pairings { eps: Vec<f64>, values: Vec<Vec<f64>> },
}

/// Largest half-width η such that `x ± η` stays in `v` along `axis`.
fn symmetric_half_width(v: &DomainBox, x: f64, axis: usize) -> f64 {
    (x - v.lo(axis)).min(v.hi(axis) - x)
}

impl Probe {
    /// Samples `u` on `v` around `center` over the last `tail + 1` rungs.
    pub fn build(
        u: &GeneralizedNet,
        center: Point,
        v: &DomainBox,
        topology: &TargetTopology,
        ladder: &EpsLadder,
        opts: &ConvergenceOptions,
    ) -> Result<Probe> {
        topology.validate(u)?;
        if !u.domain().contains_box(v) {
            return Err(Error::DomainMismatch(format!("neighborhood {v} is not inside {}", u.domain())));
        }
        if opts.tail < 4 || opts.tail + 1 > ladder.len() {
            return Err(Error::InsufficientData(format!(
                "tail must hold at least 4 increments and fit the ladder: tail {}, {} rungs",
                opts.tail,
                ladder.len()
            )));
        }
        let rungs = &ladder.values()[ladder.len() - opts.tail - 1..];
        match topology {
            TargetTopology::Cp { p } => {
                let alphas = Alpha::up_to(*p, u.dim());
                let mut eps_small = Vec::new();
                let mut eps_large = Vec::new();
                let mut small = Vec::new();
                let mut large = Vec::new();
                for w in rungs.windows(2) {
                    let pts = box_grid(v, u.singular_points(), w[1], w[0], &opts.sampling);
                    let sample = |eps: f64| -> Vec<f64> {
                        pts.iter()
                            .flat_map(|&q| alphas.iter().map(move |&a| (q, a)))
                            .map(|(q, a)| u.eval(q, eps, a))
                            .collect()
                    };
                    eps_small.push(w[1]);
                    eps_large.push(w[0]);
                    small.push(sample(w[1]));
                    large.push(sample(w[0]));
                }
                Ok(Probe::Sup {
                    eps_small,
                    eps_large,
                    small,
                    large,
                })
            }
            TargetTopology::Dprime { tests } => {
                let eta_x = symmetric_half_width(v, center[0], 0);
                if eta_x <= 0.0 {
                    return Err(invalid("D′ neighborhood has no room around its center"));
                }
                let t_nodes = if u.dim() == 2 {
                    let eta_t = symmetric_half_width(v, center[1], 1);
                    if eta_t <= 0.0 {
                        return Err(invalid("D′ neighborhood has no room in t around its center"));
                    }
                    let (lo, hi) = (center[1] - 0.5 * eta_t, center[1] + 0.5 * eta_t);
                    let br: Vec<f64> = (0..=opts.t_panels.max(1))
                        .map(|i| lo + (hi - lo) * i as f64 / opts.t_panels.max(1) as f64)
                        .collect();
                    let (ts, ws) = composite(&br, gauss_legendre(16));
                    ts.into_iter()
                        .zip(ws)
                        .map(|(t, w)| (t, w * window_bump((t - center[1]) / (0.5 * eta_t))))
                        .collect()
                } else {
                    vec![(0.0, 1.0)]
                };
                let (lo, hi) = (center[0] - eta_x, center[0] + eta_x);
                let values = rungs
                    .iter()
                    .map(|&eps| {
                        let br = breakpoints(lo, hi, opts.quad_panels, u.singular_points(), PAIRING_FINE * eps, 2.0 * eps);
                        let (xs, ws) = composite(&br, gauss_legendre(16));
                        let mut acc = vec![0.0; tests.len()];
                        for (&xq, &wq) in xs.iter().zip(&ws) {
                            let psi: Vec<f64> = tests.iter().map(|t| t.value(xq, center[0], eta_x)).collect();
                            if psi.iter().all(|&p| p == 0.0) {
                                continue;
                            }
                            let mut ut = 0.0;
                            for &(t, wt) in &t_nodes {
                                ut += wt * u.eval([xq, t], eps, Alpha::ZERO);
                            }
                            for (a, p) in acc.iter_mut().zip(&psi) {
                                *a += wq * ut * p;
                            }
                        }
                        acc
                    })
                    .collect();
                Ok(Probe::Pairings {
                    eps: rungs.to_vec(),
                    values,
                })
            }
        }
    }

    /// Convergence verdict of `a(r)·u_ε` from the cached samples.
    pub fn verdict(&self, scale: &AsymptoticScale, r: f64, opts: &ConvergenceOptions) -> ConvergenceVerdict {
        match self {
            Probe::Sup {
                eps_small,
                eps_large,
                small,
                large,
            } => {
                let mut m = Vec::with_capacity(small.len());
                let mut d = Vec::with_capacity(small.len());
                for j in 0..small.len() {
                    let a_s = scale.eval(r, eps_small[j]);
                    let a_l = scale.eval(r, eps_large[j]);
                    let mut mj: f64 = 0.0;
                    let mut dj: f64 = 0.0;
                    for (s, l) in small[j].iter().zip(&large[j]) {
                        let (x, y) = (a_s * s, a_l * l);
                        mj = mj.max(x.abs());
                        dj = dj.max((x - y).abs());
                        if !(x.is_finite() && y.is_finite()) {
                            mj = f64::INFINITY;
                            dj = f64::INFINITY;
                        }
                    }
                    m.push(mj);
                    d.push(dj);
                }
                assess(eps_small, &m, &d, opts)
            }
            Probe::Pairings { eps, values } => {
                let a: Vec<f64> = eps.iter().map(|&e| scale.eval(r, e)).collect();
                let n_tests = values[0].len();
                let scaled: Vec<Vec<f64>> = (0..n_tests)
                    .map(|j| values.iter().zip(&a).map(|(v, ai)| ai * v[j]).collect())
                    .collect();
                let global = scaled.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
                let local = ConvergenceOptions { floor: 1.0, ..*opts };
                let floor = opts.floor * global;
                let tail_eps = &eps[1..];
                let mut any_nonzero = false;
                let mut any_unknown = false;
                let mut worst: Option<ConvergenceVerdict> = None;
                let mut d_max = vec![0.0f64; tail_eps.len()];
                for series in &scaled {
                    let m: Vec<f64> = series[1..].iter().map(|v| v.abs()).collect();
                    let d: Vec<f64> = series.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
                    for (dm, di) in d_max.iter_mut().zip(&d) {
                        *dm = dm.max(*di);
                    }
                    // pairings below the global floor are numerically zero
                    let mm = m.iter().copied().fold(0.0, f64::max);
                    let v = if mm <= floor {
                        continue;
                    } else {
                        assess(tail_eps, &m, &d, &ConvergenceOptions { floor: floor / mm, ..local })
                    };
                    match v.status {
                        ConvergenceStatus::Diverges => {
                            worst = Some(v);
                            break;
                        }
                        ConvergenceStatus::Unknown => any_unknown = true,
                        ConvergenceStatus::ConvergesNonzero => any_nonzero = true,
                        ConvergenceStatus::ConvergesToZero => {}
                    }
                }
                let diagnostics: Vec<(f64, f64)> = tail_eps.iter().copied().zip(d_max).collect();
                if let Some(mut w) = worst {
                    w.diagnostics = diagnostics;
                    return w;
                }
                let status = if any_unknown {
                    ConvergenceStatus::Unknown
                } else if any_nonzero {
                    ConvergenceStatus::ConvergesNonzero
                } else {
                    ConvergenceStatus::ConvergesToZero
                };
                let limit = status.converges().then(|| {
                    scaled.iter().map(|s| s.last().copied().unwrap_or(0.0).abs()).fold(0.0, f64::max)
                });
                ConvergenceVerdict {
                    status,
                    limit_norm: limit,
                    slope: None,
                    diagnostics,
                }
            }
        }
    }
}

/// Convergence of `a(r)(ε)·u_ε` on V in topology F along the ladder.
pub fn test_convergence(
    u: &GeneralizedNet,
    scale: &AsymptoticScale,
    r: f64,
    v: &DomainBox,
    topology: &TargetTopology,
    ladder: &EpsLadder,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceVerdict> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("exponent r must be finite and nonnegative, got {r}")));
    }
    let center = box_center(v);
    let probe = Probe::build(u, center, v, topology, ladder, opts)?;
    Ok(probe.verdict(scale, r, opts))
}

pub(crate) fn box_center(v: &DomainBox) -> Point {
    let mut c = [0.0; 2];
    for (i, ci) in c.iter_mut().enumerate().take(v.dim()) {
        *ci = 0.5 * (v.lo(i) + v.hi(i));
    }
    c
}
