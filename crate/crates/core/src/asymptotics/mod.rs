//! Growth exponents of scalar nets and regularity classification.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::nets::sampling::{box_grid, Sampling};
use crate::nets::{Alpha, DomainBox, EpsLadder, GeneralizedNet};
use crate::stats::theil_sen;

/// Default number of ladder rungs used by fits.
pub const DEFAULT_TAIL: usize = 8;

/// Shape of a log-log fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitVerdict {
    PowerLike,
    LogCorrected,
    Irregular,
}

/// Fitted exponent `b` in `s_ε ≈ C·ε^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFit {
    pub slope: f64,
    pub intercept: f64,
    /// Max absolute log-log deviation on the tail.
    pub residual: f64,
    pub verdict: FitVerdict,
    pub samples: usize,
}

const LOG_DRIFT: f64 = 0.05;
const POWER_RESIDUAL: f64 = 0.1;
/// Fit noise ignored when rounding exponents up to integers.
const ORDER_ROUNDING: f64 = 0.05;

/// Theil–Sen fit of `(ln ε, ln s)` over the `tail` samples with smallest ε.
pub fn fit_valuation(samples: &[(f64, f64)], tail: usize) -> Result<ScaleFit> {
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(e, s)| e > 0.0 && e.is_finite() && s > 0.0 && s.is_finite())
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let start = pts.len().saturating_sub(tail.max(4));
    let pts = &pts[start..];
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 positive finite samples, got {}",
            pts.len()
        )));
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept) =
        theil_sen(&x, &y).ok_or_else(|| Error::InsufficientData("degenerate ε samples".into()))?;
    let residual = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| (yi - slope * xi - intercept).abs())
        .fold(0.0, f64::max);
    let local: Vec<f64> = x.windows(2).zip(y.windows(2)).map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0])).collect();
    let steps: Vec<f64> = local.windows(2).map(|w| w[1] - w[0]).collect();
    let monotone = steps.iter().all(|&d| d >= 0.0) || steps.iter().all(|&d| d <= 0.0);
    let drift = (local[local.len() - 1] - local[0]).abs();
    let verdict = if monotone && drift > LOG_DRIFT {
        FitVerdict::LogCorrected
    } else if residual <= POWER_RESIDUAL {
        FitVerdict::PowerLike
    } else {
        FitVerdict::Irregular
    };
    Ok(ScaleFit {
        slope,
        intercept,
        residual,
        verdict,
        samples: pts.len(),
    })
}

/// Thresholds that make the ∃N / ∀m quantifiers operational.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyOptions {
    pub n_cap: f64,
    pub m_cap: f64,
    pub tail: usize,
    /// Spread of N(l) allowed for a uniform bound.
    pub uniform_tol: f64,
    /// Largest N(l) counted as slow scale.
    pub slow_tol: f64,
    pub sampling: Sampling,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            n_cap: 64.0,
            m_cap: 16.0,
            tail: DEFAULT_TAIL,
            uniform_tol: 0.25,
            slow_tol: 0.1,
            sampling: Sampling::default(),
        }
    }
}

/// `p_{K,l}(u_ε)` for every `l ≤ l_max` (outer index) and every rung (inner index).
pub fn seminorm_table(
    u: &GeneralizedNet,
    k: &DomainBox,
    l_max: usize,
    ladder: &EpsLadder,
    sampling: &Sampling,
) -> Result<Vec<Vec<f64>>> {
    u.check_order(l_max)?;
    if !u.domain().contains_box(k) {
        return Err(Error::DomainMismatch(format!("K = {k} is not inside {}", u.domain())));
    }
    let alphas = Alpha::up_to(l_max, u.dim());
    let per_rung: Vec<Vec<f64>> = ladder
        .values()
        .par_iter()
        .map(|&eps| {
            let pts = box_grid(k, u.singular_points(), eps, eps, sampling);
            let mut best = vec![0.0f64; l_max + 1];
            for p in &pts {
                for a in &alphas {
                    let v = u.eval(*p, eps, *a).abs();
                    let slot = &mut best[a.order()];
                    *slot = if v.is_nan() { f64::INFINITY } else { slot.max(v) };
                }
            }
            for l in 1..=l_max {
                best[l] = best[l].max(best[l - 1]);
            }
            best
        })
        .collect();
    Ok((0..=l_max).map(|l| per_rung.iter().map(|r| r[l]).collect()).collect())
}

/// Growth exponent of one seminorm row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RowExponent {
    /// Exactly zero at the smallest rungs.
    Vanishes,
    /// Non-finite values on the tail.
    Unbounded,
    Fitted(ScaleFit),
}

impl RowExponent {
    /// Fitted ε-slope; `+∞` for vanishing rows and `-∞` for unbounded ones.
    pub fn slope(&self) -> f64 {
        match self {
            RowExponent::Vanishes => f64::INFINITY,
            RowExponent::Unbounded => f64::NEG_INFINITY,
            RowExponent::Fitted(f) => f.slope,
        }
    }
}

/// Fit one row of seminorm values against the ladder.
pub fn row_exponent(ladder: &EpsLadder, row: &[f64], tail: usize) -> Result<RowExponent> {
    let n = ladder.len();
    let start = n.saturating_sub(tail.max(4));
    let tail_vals = &row[start..];
    if tail_vals.iter().any(|v| !v.is_finite()) {
        return Ok(RowExponent::Unbounded);
    }
    let m = tail_vals.len();
    if tail_vals[m - 1] == 0.0 && tail_vals[m - 2] == 0.0 {
        return Ok(RowExponent::Vanishes);
    }
    let samples: Vec<(f64, f64)> = ladder.values()[start..].iter().copied().zip(tail_vals.iter().copied()).collect();
    fit_valuation(&samples, tail).map(RowExponent::Fitted)
}

fn exponents(
    u: &GeneralizedNet,
    k: &DomainBox,
    l_max: usize,
    ladder: &EpsLadder,
    opts: &ClassifyOptions,
) -> Result<Vec<RowExponent>> {
    let table = seminorm_table(u, k, l_max, ladder, &opts.sampling)?;
    table.iter().map(|row| row_exponent(ladder, row, opts.tail)).collect()
}

/// Moderateness on K with the per-order growth exponents `N(l) = ⌈−slope⌉`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moderation {
    pub moderate: bool,
    pub orders: Vec<u32>,
    pub slopes: Vec<f64>,
}

fn growth(slope: f64) -> f64 {
    (-slope).max(0.0)
}

/// `p_{K,l}(u_ε) = O(ε^{-N})` for each `l ≤ l_max`, with slope bounded below by `−N_cap`.
pub fn is_moderate(
    u: &GeneralizedNet,
    k: &DomainBox,
    l_max: usize,
    ladder: &EpsLadder,
    opts: &ClassifyOptions,
) -> Result<Moderation> {
    let rows = exponents(u, k, l_max, ladder, opts)?;
    Ok(moderation(&rows, opts))
}

fn moderation(rows: &[RowExponent], opts: &ClassifyOptions) -> Moderation {
    let slopes: Vec<f64> = rows.iter().map(RowExponent::slope).collect();
    let moderate = slopes.iter().all(|&s| s >= -opts.n_cap);
    let orders = slopes
        .iter()
        .map(|&s| {
            let g = growth(s);
            if g.is_finite() {
                (g - ORDER_ROUNDING).ceil().max(0.0) as u32
            } else {
                u32::MAX
            }
        })
        .collect();
    Moderation { moderate, orders, slopes }
}

/// `p_{K,l}(u_ε) = O(ε^m)` for all m, read as slope above `m_cap` or vanishing tail.
pub fn is_negligible(
    u: &GeneralizedNet,
    k: &DomainBox,
    l_max: usize,
    ladder: &EpsLadder,
    opts: &ClassifyOptions,
) -> Result<bool> {
    let rows = exponents(u, k, l_max, ladder, opts)?;
    Ok(negligible(&rows, opts))
}

fn negligible(rows: &[RowExponent], opts: &ClassifyOptions) -> bool {
    rows.iter().all(|r| r.slope() > opts.m_cap)
}

/// Exponent sequences k ↦ N(k) admitted by a regularity class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegularitySequenceFamily {
    /// Every sequence: plain moderateness.
    All,
    /// Bounded sequences (constant envelopes); the G^∞ class.
    #[default]
    Bounded,
    /// `N(k) = a + b·k`, with translates `a' ≥ a`.
    Affine { a: f64, b: f64 },
}

/// Exponent slack for family envelopes.
pub const ENVELOPE_SLACK: f64 = 0.5;

impl RegularitySequenceFamily {
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(invalid(format!("affine family needs finite a, b ≥ 0, got a = {a}, b = {b}")));
        }
        Ok(RegularitySequenceFamily::Affine { a, b })
    }

    /// Whether measured exponents `n[k]` sit inside the family.
    ///
    /// Bounded: spread `max − min ≤ spread`. Affine: `n[k] ≤ a + b·k + slack`.
    pub fn admits(&self, n: &[f64], spread: f64, slack: f64) -> bool {
        if n.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match *self {
            RegularitySequenceFamily::All => true,
            RegularitySequenceFamily::Bounded => {
                let hi = n.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = n.iter().copied().fold(f64::INFINITY, f64::min);
                n.is_empty() || hi - lo <= spread
            }
            RegularitySequenceFamily::Affine { a, b } => {
                n.iter().enumerate().all(|(k, &v)| v <= a + b * k as f64 + slack)
            }
        }
    }

    /// Member with offset `level`: `k ↦ level` (bounded) or `k ↦ level + b·k` (affine).
    fn member(&self, level: f64, k: usize) -> f64 {
        match *self {
            RegularitySequenceFamily::Affine { b, .. } => level + b * k as f64,
            _ => level,
        }
    }

    /// Verifies overstability by translation and maximum, and the sum condition, for
    /// members with integer offsets up to 4, on indices up to `k_max`.
    pub fn check_regular(&self, k_max: usize) -> Result<()> {
        if matches!(self, RegularitySequenceFamily::All) {
            return Ok(());
        }
        let base = match *self {
            RegularitySequenceFamily::Affine { a, .. } => a,
            _ => 0.0,
        };
        let b = match *self {
            RegularitySequenceFamily::Affine { b, .. } => b,
            _ => 0.0,
        };
        let levels: Vec<f64> = (0..=4).map(|i| base + i as f64).collect();
        let fail = |what: &str| Err(Error::DataQuality(format!("{self} is not {what} on k ≤ {k_max}")));
        for &l1 in &levels {
            for shift in 0..=k_max {
                for lift in 0..=4usize {
                    // translation witness: offset l1 + b·shift + lift
                    let w = l1 + b * shift as f64 + lift as f64;
                    let ok = (0..=k_max).all(|n| self.member(l1, n + shift) + lift as f64 <= self.member(w, n) + 1e-12);
                    if !ok {
                        return fail("overstable by translation");
                    }
                }
            }
            for &l2 in &levels {
                let w = l1.max(l2);
                if !(0..=k_max).all(|n| self.member(l1, n).max(self.member(l2, n)) <= self.member(w, n) + 1e-12) {
                    return fail("overstable by maximum");
                }
                let w = l1 + l2;
                for p in 0..=k_max {
                    for q in 0..=k_max - p {
                        if self.member(l1, p) + self.member(l2, q) > self.member(w, p + q) + 1e-12 {
                            return fail("stable under sums");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for RegularitySequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularitySequenceFamily::All => write!(f, "all"),
            RegularitySequenceFamily::Bounded => write!(f, "bounded"),
            RegularitySequenceFamily::Affine { a, b } => write!(f, "affine:{a},{b}"),
        }
    }
}

impl FromStr for RegularitySequenceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "all" => return Ok(RegularitySequenceFamily::All),
            "bounded" | "bo" => return Ok(RegularitySequenceFamily::Bounded),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("affine:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() == 2 {
                let a = parts[0].trim().parse::<f64>();
                let b = parts[1].trim().parse::<f64>();
                if let (Ok(a), Ok(b)) = (a, b) {
                    return RegularitySequenceFamily::affine(a, b);
                }
            }
        }
        Err(invalid(format!("unknown family {s:?}; expected all, bounded or affine:a,b")))
    }
}

/// Regularity classes of a net on K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub moderate: bool,
    pub negligible: bool,
    pub g_infinity: bool,
    /// Uniform bound on N(l) when `g_infinity` holds.
    pub uniform_n: Option<f64>,
    pub g_r: bool,
    pub family: RegularitySequenceFamily,
    pub slow_scale: bool,
    /// Real growth exponents `N(l) = max(0, −slope)`.
    pub exponents: Vec<f64>,
    pub rows: Vec<RowExponent>,
}

/// Classify `u` on K against moderate, negligible, G^∞, G^R and slow-scale behaviour.
pub fn classify(
    u: &GeneralizedNet,
    k: &DomainBox,
    l_max: usize,
    family: RegularitySequenceFamily,
    ladder: &EpsLadder,
    opts: &ClassifyOptions,
) -> Result<ClassVerdict> {
    let rows = exponents(u, k, l_max, ladder, opts)?;
    Ok(verdict_from_rows(rows, family, opts))
}

/// Classification from precomputed row exponents.
pub fn verdict_from_rows(rows: Vec<RowExponent>, family: RegularitySequenceFamily, opts: &ClassifyOptions) -> ClassVerdict {
    let moderate = moderation(&rows, opts).moderate;
    let negligible = negligible(&rows, opts);
    let exponents: Vec<f64> = rows
        .iter()
        .map(|r| if negligible { 0.0 } else { growth(r.slope()) })
        .collect();
    let g_infinity = moderate && RegularitySequenceFamily::Bounded.admits(&exponents, opts.uniform_tol, 0.0);
    let uniform_n = g_infinity.then(|| exponents.iter().copied().fold(0.0, f64::max));
    let g_r = moderate && family.admits(&exponents, opts.uniform_tol, ENVELOPE_SLACK);
    let slow_scale = moderate && exponents.iter().all(|&n| n <= opts.slow_tol);
    ClassVerdict {
        moderate,
        negligible,
        g_infinity,
        uniform_n,
        g_r,
        family,
        slow_scale,
        exponents,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{embed_classical, make_delta, Classical, Mollifier, Smooth};

    fn ladder_samples(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        EpsLadder::default().values().iter().map(|&e| (e, f(e))).collect()
    }

    #[test]
    fn pure_powers_are_exact() {
        for b in -5..=5 {
            let fit = fit_valuation(&ladder_samples(|e| e.powi(b)), DEFAULT_TAIL).unwrap();
            assert!((fit.slope - b as f64).abs() <= 1e-10, "b={b}: {}", fit.slope);
            assert_eq!(fit.verdict, FitVerdict::PowerLike);
        }
    }

    #[test]
    fn log_corrected_power() {
        let fit = fit_valuation(&ladder_samples(|e| e.ln().abs() / e), DEFAULT_TAIL).unwrap();
        assert!(fit.slope > -1.15 && fit.slope < -1.0, "{}", fit.slope);
        assert_eq!(fit.verdict, FitVerdict::LogCorrected);
    }

    #[test]
    fn too_few_samples() {
        let s = [(0.1, 1.0), (0.05, 2.0), (0.025, 0.0)];
        assert!(matches!(fit_valuation(&s, 8), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn bounded_and_affine_families_are_regular() {
        RegularitySequenceFamily::Bounded.check_regular(32).unwrap();
        RegularitySequenceFamily::affine(1.0, 1.0).unwrap().check_regular(32).unwrap();
        RegularitySequenceFamily::affine(0.0, 2.5).unwrap().check_regular(32).unwrap();
    }

    #[test]
    fn family_parsing() {
        assert_eq!("bo".parse::<RegularitySequenceFamily>().unwrap(), RegularitySequenceFamily::Bounded);
        assert_eq!(
            "affine:1,1".parse::<RegularitySequenceFamily>().unwrap(),
            RegularitySequenceFamily::Affine { a: 1.0, b: 1.0 }
        );
        assert!("affine:-1,1".parse::<RegularitySequenceFamily>().is_err());
        let f = RegularitySequenceFamily::Affine { a: 0.5, b: 2.0 };
        assert_eq!(f.to_string().parse::<RegularitySequenceFamily>().unwrap(), f);
    }

    #[test]
    fn delta_classification() {
        let d = make_delta(1, &Mollifier::standard()).unwrap();
        let k = DomainBox::interval(-0.5, 0.5).unwrap();
        let ladder = EpsLadder::default();
        let opts = ClassifyOptions::default();
        let m = is_moderate(&d, &k, 2, &ladder, &opts).unwrap();
        assert!(m.moderate);
        assert_eq!(m.orders, vec![1, 2, 3]);
        let v = classify(&d, &k, 2, RegularitySequenceFamily::affine(1.0, 1.0).unwrap(), &ladder, &opts).unwrap();
        assert!(!v.g_infinity && v.g_r && !v.negligible && !v.slow_scale);
        for (l, n) in v.exponents.iter().enumerate() {
            assert!((n - (l as f64 + 1.0)).abs() < 0.05);
        }
    }

    #[test]
    fn smooth_is_slow_scale_and_off_support_is_negligible() {
        let phi = Mollifier::standard();
        let dom = DomainBox::interval(-1.0, 1.0).unwrap();
        let f = embed_classical(
            &Classical::Smooth { f: Smooth::Sin { amp: 1.0, freq: 3.0, phase: 0.2 } },
            &phi,
            dom,
        )
        .unwrap();
        let ladder = EpsLadder::default();
        let opts = ClassifyOptions::default();
        let v = classify(&f, &dom, 2, RegularitySequenceFamily::Bounded, &ladder, &opts).unwrap();
        assert!(v.slow_scale && v.g_infinity && v.g_r && v.moderate && !v.negligible, "{v:?}");
        let d = make_delta(1, &phi).unwrap().restrict(&DomainBox::interval(0.5, 1.0).unwrap()).unwrap();
        let k = DomainBox::interval(0.5, 1.0).unwrap();
        assert!(is_negligible(&d, &k, 2, &ladder, &opts).unwrap());
        let d = make_delta(1, &phi).unwrap();
        assert!(!is_negligible(&d, &dom, 2, &ladder, &opts).unwrap());
    }
}
