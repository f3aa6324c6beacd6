//! Worked examples: delta powers, semilinear transport, regularized blow-up,
//! strength of singularities and the sum law for interacting waves.

mod blowup;
mod sumlaw;
mod transport;

use serde::{Deserialize, Serialize};

pub use blowup::{solve_blowup, BlowupCutoff, BlowupProblem};
pub use sumlaw::{
    interaction_strength, solve_rauch_reed, strength_from_exponent, strength_of_singularity, time_slice, Strength,
    SumLawProblem, WaveData, STRENGTH_TOLERANCE,
};
pub use transport::{rk4_flow, solve_transport, FlowCheck, Nonlinearity, TransportProblem, TransportSolution};

use crate::error::{invalid, Result};
use crate::local_spectrum::{
    critical_exponent, singular_spectrum, CriticalExponent, Endpoint, FiberRadius, SpectrumOptions, SpectrumResult,
    TargetTopology,
};
use crate::nets::{embed_classical, make_delta, AsymptoticScale, Classical, DomainBox, EpsLadder, GeneralizedNet, Mollifier, Point};

/// Tolerance on fiber radii in the delta-power table.
pub const DELTA_POWER_TOLERANCE: f64 = 0.15;

/// Radius and endpoint expected for `δ^m` in `topology` (dimension 1); `None` for an empty fiber.
pub fn delta_power_expectation(m: u32, topology: &TargetTopology) -> Option<(f64, Endpoint)> {
    match topology {
        TargetTopology::Cp { p } => Some((m as f64 + *p as f64, Endpoint::Unattained)),
        TargetTopology::Dprime { .. } if m == 1 => None,
        TargetTopology::Dprime { .. } => Some(((m - 1) as f64, Endpoint::Attained)),
    }
}

/// One row of the delta-power comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaPowerRow {
    pub m: u32,
    pub topology: String,
    pub radius: FiberRadius,
    pub expected_radius: Option<f64>,
    pub endpoint: Endpoint,
    pub expected_endpoint: Option<Endpoint>,
    pub pass: bool,
}

/// Critical exponents of `δ^m` at 0 against their expected values.
pub fn run_delta_powers(
    ms: &[u32],
    topologies: &[TargetTopology],
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<Vec<DeltaPowerRow>> {
    let phi = Mollifier::standard();
    let mut rows = Vec::new();
    for &m in ms {
        if !(1..=4).contains(&m) {
            return Err(invalid(format!("delta power m = {m} must lie in 1..=4")));
        }
        let d = make_delta(m, &phi)?;
        for top in topologies {
            let ce = critical_exponent(&d, &AsymptoticScale::Power, [0.0, 0.0], top, ladder, opts)?;
            let expected = delta_power_expectation(m, top);
            let pass = match expected {
                None => ce.radius.is_empty(),
                Some((r, e)) => {
                    ce.radius.value().is_some_and(|v| (v - r).abs() <= DELTA_POWER_TOLERANCE) && ce.endpoint == e
                }
            };
            rows.push(DeltaPowerRow {
                m,
                topology: top.to_string(),
                radius: ce.radius,
                expected_radius: expected.map(|e| e.0),
                endpoint: ce.endpoint,
                expected_endpoint: expected.map(|e| e.1),
                pass,
            });
        }
    }
    Ok(rows)
}

/// Initial data of the transport examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    DeltaPower { m: u32 },
    DeltaDerivative { k: usize },
}

impl InitialData {
    pub fn net(&self, phi: &Mollifier) -> Result<GeneralizedNet> {
        match *self {
            InitialData::DeltaPower { m } => make_delta(m, phi),
            InitialData::DeltaDerivative { k } => embed_classical(
                &Classical::DeltaDerivative { k, at: 0.0 },
                phi,
                DomainBox::interval(-1.0, 1.0)?,
            ),
        }
    }
}

/// Spectrum of a transport solution with the data's fiber at 0 for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportRun {
    pub nonlinearity: Nonlinearity,
    pub data: InitialData,
    pub check: FlowCheck,
    pub initial: CriticalExponent,
    pub solution: SpectrumResult,
}

#[allow(clippy::too_many_arguments)]
pub fn run_transport(
    nonlinearity: Nonlinearity,
    data: InitialData,
    t_max: f64,
    grid: &[Point],
    topology: &TargetTopology,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<TransportRun> {
    let u0 = data.net(&Mollifier::standard())?;
    let sol = solve_transport(&TransportProblem::new(nonlinearity, u0.clone(), t_max)?, ladder)?;
    let initial = critical_exponent(&u0, &AsymptoticScale::Power, [0.0, 0.0], topology, ladder, opts)?;
    let solution = singular_spectrum(&sol.net, &AsymptoticScale::Power, grid, topology, ladder, opts)?;
    Ok(TransportRun {
        nonlinearity,
        data,
        check: sol.check,
        initial,
        solution,
    })
}

/// Log-growth fiber radius `m·e^t − 1` at `(0, t)` for `δ^m` data.
pub fn log_growth_expectation(m: u32, t: f64) -> f64 {
    m as f64 * t.exp() - 1.0
}

/// C⁰ spectrum of the blow-up solution on a space-time grid.
pub fn run_blowup(
    problem: &BlowupProblem,
    grid: &[Point],
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    let net = solve_blowup(problem, ladder)?;
    singular_spectrum(&net, &AsymptoticScale::Power, grid, &TargetTopology::c(0), ladder, opts)
}

/// Sum-law row: fitted strength of `w` at `(0, t)` against `j + k + 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumLawRow {
    pub u0: WaveData,
    pub v0: WaveData,
    pub t: f64,
    pub radius: FiberRadius,
    pub endpoint: Endpoint,
    pub strength: Option<i64>,
    /// `j + k + 2` for delta derivatives; the bound `m + n` for powers.
    pub expected: f64,
    pub pass: bool,
}

/// Strength of the interaction for each pair of initial waves.
pub fn run_sum_law(
    pairs: &[(WaveData, WaveData)],
    t: f64,
    ladder: &EpsLadder,
    opts: &SpectrumOptions,
) -> Result<Vec<SumLawRow>> {
    let mut rows = Vec::new();
    for &(u0, v0) in pairs {
        let (ce, strength) = interaction_strength(&SumLawProblem::new(u0, v0), t, ladder, opts)?;
        let (expected, pass) = match (u0, v0) {
            (WaveData::DeltaDerivative { k: j }, WaveData::DeltaDerivative { k }) => {
                let n = (j + k + 2) as f64;
                (n, ce.radius.value().is_some_and(|r| (r - n).abs() <= STRENGTH_TOLERANCE))
            }
            _ => {
                let bound = wave_order(u0) + wave_order(v0);
                (bound, ce.radius.sup() <= bound + DELTA_POWER_TOLERANCE)
            }
        };
        rows.push(SumLawRow {
            u0,
            v0,
            t,
            radius: ce.radius,
            endpoint: ce.endpoint,
            strength: strength.ok().map(|s| s.n),
            expected,
            pass,
        });
    }
    Ok(rows)
}

/// Power of ε^{-1} in the sup of the wave: `m` for `δ^m`, `k + 1` for `∂^k δ`.
fn wave_order(w: WaveData) -> f64 {
    match w {
        WaveData::DeltaPower { m } => m as f64,
        WaveData::DeltaDerivative { k } => (k + 1) as f64,
    }
}

#[cfg(test)]
mod tests;
