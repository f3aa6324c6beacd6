//! Windowed Fourier transforms of 1D nets, decay classification in the two
//! cones `ξ > 0` and `ξ < 0`, wave front estimates and the analytic-type
//! microlocal test with cutoff sequences.
//!
//! Rung `ε` is sampled with step `h = πε/κ` on a grid through the base point,
//! so the transform resolves `|ξ| ≤ κ/ε` and the spectra of a self-similar net
//! rescale exactly from rung to rung.

mod cutoff;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

pub use cutoff::{Cutoff, SplineCutoff};

use crate::asymptotics::{row_exponent, RegularitySequenceFamily, RowExponent, DEFAULT_TAIL};
use crate::error::{invalid, Error, Result};
use crate::nets::{Alpha, EpsLadder, GeneralizedNet};

/// Extra exponent allowed beyond a family envelope before a cone is called singular.
const SINGULAR_MARGIN: f64 = 0.5;
/// Slack on fitted exponents for regular verdicts.
const REGULAR_SLACK: f64 = 0.5;
/// Ratio between the largest and the fitted k-th-root constant still called regular.
const RRL_CONSTANT_FACTOR: f64 = 2.0;

/// Numerical knobs of the frequential analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourierOptions {
    /// Resolved band `|ξ| ≤ κ/ε` on each rung.
    pub kappa: f64,
    /// Cone start as a fraction of the band edge.
    pub cone_fraction: f64,
    /// Full window width around the base point.
    pub window_width: f64,
    /// Magnitudes below this fraction of `‖φu_ε‖_{L¹}` count as zero.
    pub noise_floor: f64,
    pub tail: usize,
    /// Fixed cone start for the cutoff-sequence test.
    pub rrl_cone_start: f64,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions {
            kappa: 32.0,
            cone_fraction: 0.125,
            window_width: 0.25,
            noise_floor: 1e-12,
            tail: DEFAULT_TAIL,
            rrl_cone_start: 1.0,
        }
    }
}

impl FourierOptions {
    pub fn validate(&self) -> Result<()> {
        // h = πε/κ must stay below ε/8.
        if !(self.kappa >= 8.0 * std::f64::consts::PI && self.kappa.is_finite()) {
            return Err(Error::Resolution(format!(
                "kappa {} gives a step above ε/8; need kappa ≥ 8π",
                self.kappa
            )));
        }
        if !(self.cone_fraction > 0.0 && self.cone_fraction < 1.0) {
            return Err(invalid("cone_fraction must lie in (0, 1)"));
        }
        if !(self.window_width > 0.0 && self.window_width.is_finite()) {
            return Err(invalid("window_width must be positive"));
        }
        if !(self.noise_floor >= 0.0 && self.noise_floor < 1.0) {
            return Err(invalid("noise_floor must lie in [0, 1)"));
        }
        if self.tail < 4 {
            return Err(invalid("tail must hold at least 4 rungs"));
        }
        if !(self.rrl_cone_start > 0.0 && self.rrl_cone_start.is_finite()) {
            return Err(invalid("rrl_cone_start must be positive"));
        }
        Ok(())
    }
}

/// One of the two cones of `ℝ∖0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Plus, Direction::Minus];

    pub fn sign(self) -> i8 {
        match self {
            Direction::Plus => 1,
            Direction::Minus => -1,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Plus => "+1",
            Direction::Minus => "-1",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(Direction::Plus),
            "-1" | "-" | "minus" => Ok(Direction::Minus),
            other => Err(invalid(format!("unknown direction {other:?}; expected +1 or -1"))),
        }
    }
}

/// Sampled `|(φu_ε)^(ξ)|` on one rung.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungSpectrum {
    pub eps: f64,
    /// Spatial step.
    pub h: f64,
    /// Frequency spacing.
    pub d_xi: f64,
    /// `|û(k·Δξ)|` for `k = 0..=M/2`.
    pub positive: Vec<f64>,
    /// `|û(−k·Δξ)|` for `k = 0..=M/2`.
    pub negative: Vec<f64>,
    /// `Σ|φu_ε(x_j)| h`.
    pub l1: f64,
    /// `Σ|φu_ε(x_j)|² h`.
    pub l2_squared: f64,
}

impl RungSpectrum {
    /// Band edge `π/h`.
    pub fn xi_max(&self) -> f64 {
        std::f64::consts::PI / self.h
    }

    fn half(&self, direction: Direction) -> &[f64] {
        match direction {
            Direction::Plus => &self.positive,
            Direction::Minus => &self.negative,
        }
    }

    /// `sup_{ξ0 ≤ |ξ| ≤ π/h, ξ in the cone} (1+|ξ|)^q |û|`, weight `|ξ|^q` when `shifted` is false.
    fn cone_sup(&self, direction: Direction, xi0: f64, q: usize, shifted: bool, floor: f64) -> (f64, usize) {
        let start = (xi0 / self.d_xi).ceil() as usize;
        let mags = self.half(direction);
        let mut best = 0.0f64;
        let mut count = 0;
        for (k, &m) in mags.iter().enumerate().skip(start) {
            count += 1;
            if m <= floor {
                continue;
            }
            let xi = k as f64 * self.d_xi;
            let w = if shifted { 1.0 + xi } else { xi };
            best = best.max(w.powi(q as i32) * m);
        }
        (best, count)
    }

    /// Relative mismatch of the discrete Parseval identity.
    pub fn parseval_error(&self) -> f64 {
        let m = 2 * (self.positive.len() - 1);
        let mut total: f64 = self.positive.iter().map(|v| v * v).sum();
        total += self.negative[1..m / 2].iter().map(|v| v * v).sum::<f64>();
        let lhs = total * self.d_xi;
        let rhs = 2.0 * std::f64::consts::PI * self.l2_squared;
        if rhs == 0.0 {
            lhs
        } else {
            (lhs - rhs).abs() / rhs
        }
    }
}

/// Windowed transforms of one net at one base point, across the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedSpectrum {
    pub x0: f64,
    pub cutoff: Cutoff,
    pub rungs: Vec<RungSpectrum>,
    pub noise_floor: f64,
    /// Band edge `ξ_max = κ/ε` on each rung is this constant over ε.
    pub kappa: f64,
    /// Cone start `ξ0 = cone_fraction·ξ_max`.
    pub cone_fraction: f64,
}

impl WindowedSpectrum {
    pub fn eps(&self) -> Vec<f64> {
        self.rungs.iter().map(|r| r.eps).collect()
    }
}

/// `(φu_ε)^` on every rung with the bump window of width `window_width` centred at `x0`.
pub fn windowed_fourier(
    u: &GeneralizedNet,
    x0: f64,
    window_width: f64,
    ladder: &EpsLadder,
    opts: &FourierOptions,
) -> Result<WindowedSpectrum> {
    if !(window_width > 0.0 && window_width.is_finite()) {
        return Err(invalid("window width must be positive"));
    }
    windowed_fourier_with(u, x0, Cutoff::Bump { half: 0.5 * window_width }, ladder, opts)
}

/// Transform with an arbitrary cutoff centred at `x0`.
pub fn windowed_fourier_with(
    u: &GeneralizedNet,
    x0: f64,
    cutoff: Cutoff,
    ladder: &EpsLadder,
    opts: &FourierOptions,
) -> Result<WindowedSpectrum> {
    opts.validate()?;
    if u.dim() != 1 {
        return Err(invalid("frequential analysis needs a 1D net"));
    }
    let half = cutoff.half_support();
    let dom = u.domain();
    if !(x0 - half >= dom.lo(0) - 1e-12 && x0 + half <= dom.hi(0) + 1e-12) {
        return Err(Error::DomainMismatch(format!(
            "window [{}, {}] escapes the domain {dom}",
            x0 - half,
            x0 + half
        )));
    }
    if cutoff.value(0.0) == 0.0 {
        return Err(Error::Cutoff("cutoff vanishes at the base point".into()));
    }
    let rungs = ladder
        .values()
        .par_iter()
        .map(|&eps| transform_rung(u, x0, &cutoff, eps, opts.kappa))
        .collect::<Result<Vec<_>>>()?;
    Ok(WindowedSpectrum {
        x0,
        cutoff,
        rungs,
        noise_floor: opts.noise_floor,
        kappa: opts.kappa,
        cone_fraction: opts.cone_fraction,
    })
}

fn transform_rung(u: &GeneralizedNet, x0: f64, cutoff: &Cutoff, eps: f64, kappa: f64) -> Result<RungSpectrum> {
    let h = std::f64::consts::PI * eps / kappa;
    let half = cutoff.half_support();
    let j_max = (half / h).floor() as i64;
    let n = (2 * j_max + 1) as usize;
    let m = (2 * n).next_power_of_two();
    let mut buf = vec![Complex::new(0.0, 0.0); m];
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for (slot, j) in buf.iter_mut().zip(-j_max..=j_max) {
        let y = j as f64 * h;
        let w = cutoff.value(y);
        if w == 0.0 {
            continue;
        }
        let g = w * u.eval([x0 + y, 0.0], eps, Alpha::default());
        if !g.is_finite() {
            return Err(Error::DataQuality(format!(
                "non-finite net value at x = {} for ε = {eps:e}",
                x0 + y
            )));
        }
        *slot = Complex::new(g, 0.0);
        l1 += g.abs() * h;
        l2 += g * g * h;
    }
    let fft = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut buf);
    let positive: Vec<f64> = (0..=m / 2).map(|k| h * buf[k].norm()).collect();
    let negative: Vec<f64> = (0..=m / 2).map(|k| h * buf[(m - k) % m].norm()).collect();
    Ok(RungSpectrum {
        eps,
        h,
        d_xi: 2.0 * std::f64::consts::PI / (m as f64 * h),
        positive,
        negative,
        l1,
        l2_squared: l2,
    })
}

/// Three-way outcome of a microlocal test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MicrolocalVerdict {
    Regular,
    Singular,
    Unknown,
}

impl MicrolocalVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MicrolocalVerdict::Regular => "regular",
            MicrolocalVerdict::Singular => "singular",
            MicrolocalVerdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for MicrolocalVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decay exponents in one cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub direction: Direction,
    /// `N(q)`, `q = 0..=q_max`: growth exponent of the weighted cone supremum.
    pub decay_exponents: Vec<f64>,
    pub verdict: MicrolocalVerdict,
    pub family: RegularitySequenceFamily,
}

/// Which part of `ℝ∖0` a supremum runs over.
#[derive(Debug, Clone, Copy)]
enum Cone {
    One(Direction),
    Full,
}

fn growth_exponent(row: RowExponent) -> f64 {
    match row {
        RowExponent::Vanishes => 0.0,
        RowExponent::Unbounded => f64::INFINITY,
        RowExponent::Fitted(f) => (-f.slope).max(0.0),
    }
}

fn cone_exponents(spec: &WindowedSpectrum, cone: Cone, q_max: usize, tail: usize) -> Result<Vec<f64>> {
    if q_max > 8 {
        return Err(invalid("q_max must not exceed 8"));
    }
    let eps = spec.eps();
    let ladder = EpsLadder::from_values(eps)?;
    let mut rows = vec![vec![0.0; spec.rungs.len()]; q_max + 1];
    for (i, rung) in spec.rungs.iter().enumerate() {
        let xi0 = spec.cone_fraction * spec.kappa / rung.eps;
        let floor = spec.noise_floor * rung.l1;
        for (q, row) in rows.iter_mut().enumerate() {
            let dirs: &[Direction] = match cone {
                Cone::One(d) => match d {
                    Direction::Plus => &[Direction::Plus],
                    Direction::Minus => &[Direction::Minus],
                },
                Cone::Full => &Direction::BOTH,
            };
            let mut best = 0.0f64;
            for &d in dirs {
                let (s, count) = rung.cone_sup(d, xi0, q, true, floor);
                if count < 8 {
                    return Err(Error::InsufficientData(format!(
                        "only {count} frequency samples in the cone at ε = {:e}",
                        rung.eps
                    )));
                }
                best = best.max(s);
            }
            row[i] = best;
        }
    }
    rows.iter()
        .map(|row| row_exponent(&ladder, row, tail).map(growth_exponent))
        .collect()
}

fn family_verdict(n: &[f64], family: &RegularitySequenceFamily) -> MicrolocalVerdict {
    if family.admits(n, REGULAR_SLACK, REGULAR_SLACK) {
        MicrolocalVerdict::Regular
    } else if !family.admits(n, REGULAR_SLACK + SINGULAR_MARGIN, REGULAR_SLACK + SINGULAR_MARGIN) {
        MicrolocalVerdict::Singular
    } else {
        MicrolocalVerdict::Unknown
    }
}

/// Fit `N(q)` for `s_q(ε) = sup_{direction·ξ ≥ ξ0} (1+|ξ|)^q |û_ε(ξ)|` and test it against `family`.
pub fn cone_decay_classify(
    spec: &WindowedSpectrum,
    direction: Direction,
    q_max: usize,
    family: &RegularitySequenceFamily,
    tail: usize,
) -> Result<ConeReport> {
    let n = cone_exponents(spec, Cone::One(direction), q_max, tail)?;
    Ok(ConeReport {
        direction,
        verdict: family_verdict(&n, family),
        decay_exponents: n,
        family: *family,
    })
}

/// Verdict for the whole of `|ξ| ≥ ξ0`: the frequential test of local regularity.
pub fn full_decay_classify(
    spec: &WindowedSpectrum,
    q_max: usize,
    family: &RegularitySequenceFamily,
    tail: usize,
) -> Result<(Vec<f64>, MicrolocalVerdict)> {
    let n = cone_exponents(spec, Cone::Full, q_max, tail)?;
    let v = family_verdict(&n, family);
    Ok((n, v))
}

/// Verdicts at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefrontRecord {
    pub x: f64,
    pub cones: Vec<ConeReport>,
    /// Verdict for `|ξ| ≥ ξ0` in both cones at once.
    pub full_verdict: MicrolocalVerdict,
    pub error: Option<String>,
}

/// Grid points and directions flagged singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFrontEstimate {
    pub family: RegularitySequenceFamily,
    pub q_max: usize,
    pub pairs: Vec<(f64, Direction)>,
    pub records: Vec<WavefrontRecord>,
}

impl WaveFrontEstimate {
    /// Base points of the flagged pairs.
    pub fn projection(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self.pairs.iter().map(|p| p.0).collect();
        xs.dedup();
        xs
    }

    /// Points whose full-band test is singular.
    pub fn frequential_support(&self) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.full_verdict == MicrolocalVerdict::Singular)
            .map(|r| r.x)
            .collect()
    }

    pub fn contains(&self, x: f64, direction: Direction) -> bool {
        self.pairs.iter().any(|&(y, d)| d == direction && (y - x).abs() < 1e-12)
    }
}

fn point_record(
    u: &GeneralizedNet,
    x: f64,
    ladder: &EpsLadder,
    family: &RegularitySequenceFamily,
    q_max: usize,
    opts: &FourierOptions,
) -> WavefrontRecord {
    let dom = u.domain();
    let half = (0.5 * opts.window_width).min(x - dom.lo(0)).min(dom.hi(0) - x);
    let analysed = (|| -> Result<(Vec<ConeReport>, MicrolocalVerdict)> {
        if half <= 0.0 {
            return Err(Error::DomainMismatch(format!("no window fits around {x}")));
        }
        let spec = windowed_fourier_with(u, x, Cutoff::Bump { half }, ladder, opts)?;
        let cones = Direction::BOTH
            .iter()
            .map(|&d| cone_decay_classify(&spec, d, q_max, family, opts.tail))
            .collect::<Result<Vec<_>>>()?;
        let (_, full) = full_decay_classify(&spec, q_max, family, opts.tail)?;
        Ok((cones, full))
    })();
    match analysed {
        Ok((cones, full_verdict)) => WavefrontRecord {
            x,
            cones,
            full_verdict,
            error: None,
        },
        Err(e) => WavefrontRecord {
            x,
            cones: Vec::new(),
            full_verdict: MicrolocalVerdict::Unknown,
            error: Some(e.to_string()),
        },
    }
}

/// Pairs `(x, ±1)` whose cone decay is singular for `family`; failures are recorded per point.
pub fn wavefront_estimate(
    u: &GeneralizedNet,
    grid: &[f64],
    ladder: &EpsLadder,
    family: &RegularitySequenceFamily,
    q_max: usize,
    opts: &FourierOptions,
) -> Result<WaveFrontEstimate> {
    opts.validate()?;
    if u.dim() != 1 {
        return Err(invalid("wave front estimates need a 1D net"));
    }
    if q_max > 8 {
        return Err(invalid("q_max must not exceed 8"));
    }
    // Points run one at a time: each spectrum already fans out over rungs and is large.
    let records: Vec<WavefrontRecord> = grid
        .iter()
        .map(|&x| point_record(u, x, ladder, family, q_max, opts))
        .collect();
    let pairs = records
        .iter()
        .flat_map(|r| {
            r.cones
                .iter()
                .filter(|c| c.verdict == MicrolocalVerdict::Singular)
                .map(move |c| (r.x, c.direction))
        })
        .collect();
    Ok(WaveFrontEstimate {
        family: *family,
        q_max,
        pairs,
        records,
    })
}

/// Grid points where the windowed transform fails the family decay test in `|ξ| ≥ ξ0`.
pub fn frequential_singular_support(
    u: &GeneralizedNet,
    grid: &[f64],
    ladder: &EpsLadder,
    family: &RegularitySequenceFamily,
    q_max: usize,
    opts: &FourierOptions,
) -> Result<Vec<f64>> {
    Ok(wavefront_estimate(u, grid, ladder, family, q_max, opts)?.frequential_support())
}

/// Growth rule `k ↦ L_k` of the cutoff-sequence estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LSequence {
    /// `L_k = k + 1`.
    Analytic,
    /// `L_k = (k + 1)^σ`, `σ ≥ 1`.
    Gevrey { sigma: f64 },
}

impl LSequence {
    pub fn value(&self, k: usize) -> f64 {
        match self {
            LSequence::Analytic => (k + 1) as f64,
            LSequence::Gevrey { sigma } => ((k + 1) as f64).powf(*sigma),
        }
    }
}

impl fmt::Display for LSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LSequence::Analytic => write!(f, "analytic"),
            LSequence::Gevrey { sigma } => write!(f, "gevrey:{sigma}"),
        }
    }
}

impl FromStr for LSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "analytic" {
            return Ok(LSequence::Analytic);
        }
        if let Some(rest) = t.strip_prefix("gevrey:") {
            if let Ok(sigma) = rest.trim().parse::<f64>() {
                if sigma >= 1.0 && sigma.is_finite() {
                    return Ok(LSequence::Gevrey { sigma });
                }
            }
        }
        Err(invalid(format!("unknown L rule {s:?}; expected analytic or gevrey:σ with σ ≥ 1")))
    }
}

/// Outcome of the cutoff-sequence test at one `(x0, direction)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrlReport {
    pub x0: f64,
    pub direction: Direction,
    /// ε-growth exponent of `sup |ξ|^k |(χ_k u_ε)^|` for `k = 0..=k_max`.
    pub exponents: Vec<f64>,
    /// `P_k^{1/k} / L_k` with `P_k` the fitted prefactor; entry 0 is unused.
    pub root_ratios: Vec<f64>,
    /// Larger of the cutoff growth constant and the ratios on the lower half of the orders.
    pub constant: f64,
    pub exponent_verdict: MicrolocalVerdict,
    pub constant_ok: bool,
    pub verdict: MicrolocalVerdict,
}

/// Test the estimate `|ξ|^k |(χ_k u_ε)^(ξ)| ≤ c ε^{−N(k)} (c L_k)^k` in one cone for `k ≤ k_max`.
#[allow(clippy::too_many_arguments)]
pub fn rrl_microlocal_test(
    u: &GeneralizedNet,
    x0: f64,
    direction: Direction,
    l: &LSequence,
    family: &RegularitySequenceFamily,
    k_max: usize,
    ladder: &EpsLadder,
    opts: &FourierOptions,
) -> Result<RrlReport> {
    opts.validate()?;
    if !(1..=8).contains(&k_max) {
        return Err(invalid("k_max must lie in 1..=8"));
    }
    if ladder.len() < 4 {
        return Err(Error::InsufficientData("ladder needs at least 4 rungs".into()));
    }
    let half = 0.5 * opts.window_width;
    let tail_start = ladder.len().saturating_sub(opts.tail);
    let tail_eps = &ladder.values()[tail_start..];
    let mut exponents = Vec::with_capacity(k_max + 1);
    let mut prefactors = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let chi = SplineCutoff::for_order(k, half);
        chi.verify(4000)?;
        let spec = windowed_fourier_with(u, x0, Cutoff::Spline(chi), ladder, opts)?;
        let row: Vec<f64> = spec
            .rungs
            .iter()
            .map(|r| r.cone_sup(direction, opts.rrl_cone_start, k, false, opts.noise_floor * r.l1).0)
            .collect();
        let e = growth_exponent(row_exponent(ladder, &row, opts.tail)?);
        let p = if e.is_finite() {
            row[tail_start..]
                .iter()
                .zip(tail_eps)
                .map(|(s, eps)| s * eps.powf(e))
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        exponents.push(e);
        prefactors.push(p);
    }
    let mut root_ratios = vec![0.0; k_max + 1];
    for k in 1..=k_max {
        root_ratios[k] = prefactors[k].powf(1.0 / k as f64) / l.value(k);
    }
    // No estimate can beat the certified growth of the cutoffs themselves.
    let fit_upto = (k_max / 2).max(1);
    let constant = root_ratios[1..=fit_upto]
        .iter()
        .copied()
        .fold(SplineCutoff::for_order(0, half).growth_constant(), f64::max);
    let constant_ok = root_ratios[1..]
        .iter()
        .all(|&r| r <= RRL_CONSTANT_FACTOR * constant || r == 0.0);
    let exponent_verdict = family_verdict(&exponents, family);
    let verdict = match exponent_verdict {
        MicrolocalVerdict::Singular => MicrolocalVerdict::Singular,
        _ if !constant_ok => MicrolocalVerdict::Singular,
        v => v,
    };
    Ok(RrlReport {
        x0,
        direction,
        exponents,
        root_ratios,
        constant,
        exponent_verdict,
        constant_ok,
        verdict,
    })
}
