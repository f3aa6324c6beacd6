//! Run configuration: TOML (or JSON) records with documented defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use asymptospec::asymptotics::RegularitySequenceFamily;
use asymptospec::experiments::{BlowupProblem, Nonlinearity, WaveData};
use asymptospec::frequential::{Direction, FourierOptions, LSequence};
use asymptospec::local_spectrum::{SpectrumOptions, TargetTopology};
use asymptospec::nets::{AsymptoticScale, EpsLadder, Mollifier, NetSpec, Point};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// Serializes through `Display` and parses through `FromStr`.
macro_rules! string_serde {
    ($mod:ident, $ty:ty) => {
        mod $mod {
            use super::*;
            pub fn serialize<S: Serializer>(v: &$ty, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&v.to_string())
            }
            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<$ty, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(topology_str, TargetTopology);
string_serde!(scale_str, AsymptoticScale);
string_serde!(family_str, RegularitySequenceFamily);
string_serde!(nonlin_str, Nonlinearity);
string_serde!(direction_str, Direction);
string_serde!(lseq_str, LSequence);

/// Geometric ladder `ε0·q^i`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    pub eps0: f64,
    pub q: f64,
    pub count: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            eps0: 1.0 / 16.0,
            q: 0.5,
            count: 13,
        }
    }
}

impl LadderConfig {
    pub fn build(&self) -> Result<EpsLadder, CliError> {
        Ok(EpsLadder::geometric(self.eps0, self.q, self.count)?)
    }
}

impl FromStr for LadderConfig {
    type Err = CliError;

    /// `ε0,q,n`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [e, q, n] = parts[..] else {
            return Err(CliError::Usage(format!("--ladder expects ε0,q,n, got {s:?}")));
        };
        let bad = |what: &str| CliError::Usage(format!("cannot parse {what} in --ladder {s:?}"));
        Ok(LadderConfig {
            eps0: e.parse().map_err(|_| bad("ε0"))?,
            q: q.parse().map_err(|_| bad("q"))?,
            count: n.parse().map_err(|_| bad("n"))?,
        })
    }
}

/// A net given either compactly (`"delta:m=2"`) or as a full record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetInput {
    Compact(String),
    Full(NetSpec),
}

impl NetInput {
    pub fn spec(&self) -> Result<NetSpec, CliError> {
        match self {
            NetInput::Compact(s) => Ok(s.parse()?),
            NetInput::Full(s) => Ok(s.clone()),
        }
    }
}

/// 1D base points: an explicit list or `n` uniform points on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid1 {
    Points(Vec<f64>),
    Uniform { lo: f64, hi: f64, n: usize },
}

impl Default for Grid1 {
    fn default() -> Self {
        Grid1::Uniform { lo: -0.5, hi: 0.5, n: 9 }
    }
}

impl Grid1 {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Grid1::Points(ref v) => v.clone(),
            Grid1::Uniform { lo, hi, n } if n <= 1 => vec![0.5 * (lo + hi)],
            Grid1::Uniform { lo, hi, n } => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }

    fn violations(&self, what: &str, out: &mut Vec<String>) {
        match *self {
            Grid1::Points(ref v) if v.is_empty() => out.push(format!("{what}: empty point list")),
            Grid1::Points(ref v) if v.iter().any(|x| !x.is_finite()) => out.push(format!("{what}: non-finite point")),
            Grid1::Uniform { lo, hi, n } if !(hi >= lo) || n == 0 => {
                out.push(format!("{what}: uniform grid needs hi ≥ lo and n ≥ 1"))
            }
            _ => {}
        }
    }
}

/// Space-time base points: explicit `[x, t]` pairs or the product of an x and a t grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Grid2 {
    Points(Vec<[f64; 2]>),
    Product { x: Grid1, t: Grid1 },
}

impl Grid2 {
    pub fn points(&self) -> Vec<Point> {
        match self {
            Grid2::Points(p) => p.clone(),
            Grid2::Product { x, t } => {
                let xs = x.points();
                t.points().iter().flat_map(|&t| xs.iter().map(move |&x| [x, t])).collect()
            }
        }
    }

    fn violations(&self, out: &mut Vec<String>) {
        match self {
            Grid2::Points(p) if p.is_empty() => out.push("grid: empty point list".into()),
            Grid2::Points(p) if p.iter().flatten().any(|v| !v.is_finite()) => out.push("grid: non-finite point".into()),
            Grid2::Product { x, t } => {
                x.violations("grid.x", out);
                t.violations("grid.t", out);
            }
            _ => {}
        }
    }
}

fn default_topology() -> TargetTopology {
    TargetTopology::c(0)
}

fn default_family() -> RegularitySequenceFamily {
    RegularitySequenceFamily::Bounded
}

fn default_q_max() -> usize {
    8
}

fn default_l_max() -> usize {
    2
}

fn default_k_max() -> usize {
    6
}

fn default_k() -> [f64; 2] {
    [-0.5, 0.5]
}

fn default_transport_grid() -> Grid2 {
    Grid2::Product {
        x: Grid1::Points(vec![0.0, 0.5]),
        t: Grid1::Points(vec![0.25, 0.5, 1.0]),
    }
}

fn default_t_max() -> f64 {
    1.5
}

fn default_blowup_grid() -> Grid2 {
    Grid2::Points(vec![
        [0.0, 0.25],
        [0.0, 0.5],
        [0.1, 1.2],
        [0.1, 1.5],
        [0.5, 1.2],
        [0.5, 1.5],
        [-0.5, 0.5],
        [-0.5, 1.5],
    ])
}

fn default_ms() -> Vec<u32> {
    vec![1, 2, 3]
}

fn default_topologies() -> Vec<TopologyName> {
    vec![
        TopologyName(TargetTopology::c(0)),
        TopologyName(TargetTopology::c(1)),
        TopologyName(TargetTopology::dprime()),
    ]
}

fn default_strength_nets() -> Vec<String> {
    ["heaviside", "kink", "delta", "delta_derivative:k=1"]
        .map(String::from)
        .to_vec()
}

fn default_sum_pairs() -> Vec<[String; 2]> {
    [
        ("ddelta:k=0", "ddelta:k=0"),
        ("ddelta:k=0", "ddelta:k=1"),
        ("ddelta:k=1", "ddelta:k=0"),
        ("ddelta:k=1", "ddelta:k=1"),
        ("delta:m=1", "delta:m=1"),
        ("delta:m=1", "delta:m=2"),
        ("delta:m=2", "delta:m=1"),
        ("delta:m=2", "delta:m=2"),
    ]
    .map(|(a, b)| [a.to_string(), b.to_string()])
    .to_vec()
}

fn default_slice() -> f64 {
    1.25
}

fn default_count() -> usize {
    20
}

/// A topology in a list, written `"C0"`, `"C1"`, `"D'"`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyName(pub TargetTopology);

impl Serialize for TopologyName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        topology_str::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for TopologyName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        topology_str::deserialize(d).map(TopologyName)
    }
}

/// Experiments reproducing the worked examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Fibers of `δ^m` at 0 against `m + p` (C^p) and `m − 1` (D′).
    DeltaPowers {
        #[serde(default = "default_ms")]
        m_list: Vec<u32>,
        #[serde(default = "default_topologies")]
        topologies: Vec<TopologyName>,
    },
    /// `∂_t u = F(u)` from `data`, spectrum on a space-time grid.
    Transport {
        #[serde(with = "nonlin_str")]
        nonlinearity: Nonlinearity,
        data: String,
        #[serde(default = "default_t_max")]
        t_max: f64,
        #[serde(default = "default_transport_grid")]
        grid: Grid2,
        #[serde(default = "dprime_topology", with = "topology_str")]
        topology: TargetTopology,
    },
    /// Regularized blow-up `∂_t u = χ_ε(u)u²`.
    Blowup {
        #[serde(default)]
        problem: BlowupProblem,
        #[serde(default = "default_blowup_grid")]
        grid: Grid2,
    },
    /// C¹ strength readout of classical singularities at `at`.
    Strength {
        #[serde(default = "default_strength_nets")]
        nets: Vec<String>,
    },
    /// Interaction strength of two waves meeting at (0, 1).
    SumLaw {
        #[serde(default = "default_sum_pairs")]
        pairs: Vec<[String; 2]>,
        #[serde(default = "default_slice")]
        t: f64,
    },
    /// Structural properties on seeded random nets.
    Properties {
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_topology", with = "topology_str")]
        topology: TargetTopology,
        #[serde(default)]
        grid: Grid1,
    },
}

fn dprime_topology() -> TargetTopology {
    TargetTopology::dprime()
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::DeltaPowers { .. } => "delta_powers",
            Experiment::Transport { .. } => "transport",
            Experiment::Blowup { .. } => "blowup",
            Experiment::Strength { .. } => "strength",
            Experiment::SumLaw { .. } => "sum_law",
            Experiment::Properties { .. } => "properties",
        }
    }

    /// Defaults for `experiment <name>` without a config.
    pub fn by_name(name: &str) -> Result<Self, CliError> {
        let toml = match name {
            "delta_powers" | "transport" | "blowup" | "strength" | "sum_law" | "properties" => {
                if name == "transport" {
                    "name = \"transport\"\nnonlinearity = \"log_growth\"\ndata = \"delta:m=1\"".to_string()
                } else {
                    format!("name = \"{name}\"")
                }
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown experiment {other:?}; expected one of {}",
                    EXPERIMENTS.join(", ")
                )))
            }
        };
        toml::from_str(&toml).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub const EXPERIMENTS: [&str; 6] = ["delta_powers", "transport", "blowup", "strength", "sum_law", "properties"];

/// The requested analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    /// Fiber radius and r-samples at every grid point.
    Spectrum {
        #[serde(default = "default_topology", with = "topology_str")]
        topology: TargetTopology,
        #[serde(default)]
        grid: Grid1,
    },
    /// Grid points with a nonempty fiber.
    Support {
        #[serde(default = "default_topology", with = "topology_str")]
        topology: TargetTopology,
        #[serde(default)]
        grid: Grid1,
    },
    /// Convergence of `a(r)·u_ε` on `[lo, hi]`.
    Convergence {
        #[serde(default = "default_topology", with = "topology_str")]
        topology: TargetTopology,
        r: f64,
        lo: f64,
        hi: f64,
    },
    /// Product bound of `net · other`.
    Product {
        other: NetInput,
        #[serde(default = "default_topology", with = "topology_str")]
        topology: TargetTopology,
        #[serde(default)]
        grid: Grid1,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// Power bound of `net^p`.
    PowerBound {
        p: u32,
        #[serde(default = "default_topology", with = "topology_str")]
        topology: TargetTopology,
        #[serde(default)]
        grid: Grid1,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// Regularity classes on K.
    Classify {
        #[serde(default = "default_k")]
        k: [f64; 2],
        #[serde(default = "default_l_max")]
        l_max: usize,
        #[serde(default = "default_family", with = "family_str")]
        family: RegularitySequenceFamily,
    },
    /// Valuation of explicit `(ε, s)` samples.
    Fit {
        samples: Vec<[f64; 2]>,
        #[serde(default = "default_tail")]
        tail: usize,
    },
    /// Wave front estimate on a grid.
    Wavefront {
        #[serde(default)]
        grid: Grid1,
        #[serde(default = "default_family", with = "family_str")]
        family: RegularitySequenceFamily,
        #[serde(default = "default_q_max")]
        q_max: usize,
    },
    /// Cone decay exponents at one point.
    Cones {
        #[serde(default)]
        x0: f64,
        #[serde(default = "default_family", with = "family_str")]
        family: RegularitySequenceFamily,
        #[serde(default = "default_q_max")]
        q_max: usize,
    },
    /// Cut-off sequence test at one point and direction.
    Rrl {
        #[serde(default)]
        x0: f64,
        #[serde(default = "plus", with = "direction_str")]
        direction: Direction,
        #[serde(default = "analytic", with = "lseq_str")]
        l: LSequence,
        #[serde(default = "default_family", with = "family_str")]
        family: RegularitySequenceFamily,
        #[serde(default = "default_k_max")]
        k_max: usize,
    },
    Experiment(Experiment),
}

fn default_tol() -> f64 {
    0.15
}

fn default_tail() -> usize {
    asymptospec::asymptotics::DEFAULT_TAIL
}

fn plus() -> Direction {
    Direction::Plus
}

fn analytic() -> LSequence {
    LSequence::Analytic
}

impl Analysis {
    pub fn kind(&self) -> &'static str {
        match self {
            Analysis::Spectrum { .. } => "spectrum",
            Analysis::Support { .. } => "support",
            Analysis::Convergence { .. } => "convergence",
            Analysis::Product { .. } => "product",
            Analysis::PowerBound { .. } => "power_bound",
            Analysis::Classify { .. } => "classify",
            Analysis::Fit { .. } => "fit",
            Analysis::Wavefront { .. } => "wavefront",
            Analysis::Cones { .. } => "cones",
            Analysis::Rrl { .. } => "rrl",
            Analysis::Experiment(_) => "experiment",
        }
    }

    /// CLI verb under which the analysis runs.
    pub fn verb(&self) -> Verb {
        match self {
            Analysis::Spectrum { .. }
            | Analysis::Support { .. }
            | Analysis::Convergence { .. }
            | Analysis::Product { .. }
            | Analysis::PowerBound { .. } => Verb::Spectrum,
            Analysis::Classify { .. } | Analysis::Fit { .. } => Verb::Classify,
            Analysis::Wavefront { .. } | Analysis::Cones { .. } | Analysis::Rrl { .. } => Verb::Wavefront,
            Analysis::Experiment(_) => Verb::Experiment,
        }
    }

    pub fn needs_net(&self) -> bool {
        !matches!(self, Analysis::Fit { .. } | Analysis::Experiment(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Spectrum,
    Wavefront,
    Classify,
    Experiment,
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verb::Spectrum => "spectrum",
            Verb::Wavefront => "wavefront",
            Verb::Classify => "classify",
            Verb::Experiment => "experiment",
        })
    }
}

/// Output location and file stem.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory; falls back to `ASYMPTOSPEC_OUT`, then `asymptospec-out`.
    pub dir: Option<String>,
    pub stem: Option<String>,
}

/// Tolerance overrides; each must lie in (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance on fiber radii.
    pub radius: Option<f64>,
    /// Relative tolerance on growth radii.
    pub relative: Option<f64>,
}

/// A complete run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub net: Option<NetInput>,
    #[serde(default)]
    pub mollifier: Mollifier,
    #[serde(default, with = "scale_str")]
    pub scale: AsymptoticScale,
    #[serde(default)]
    pub ladder: LadderConfig,
    #[serde(default)]
    pub seed: u64,
    pub analysis: Analysis,
    #[serde(default)]
    pub spectrum: SpectrumOptions,
    #[serde(default)]
    pub fourier: FourierOptions,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn new(analysis: Analysis) -> Self {
        RunConfig {
            net: None,
            mollifier: Mollifier::standard(),
            scale: AsymptoticScale::Power,
            ladder: LadderConfig::default(),
            seed: 0,
            analysis,
            spectrum: SpectrumOptions::default(),
            fourier: FourierOptions::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }

    /// Every semantic violation, or `Ok`.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut v = Vec::new();
        let l = &self.ladder;
        if !(l.eps0 > 0.0 && l.eps0 <= 1.0) {
            v.push("ε0 must lie in (0,1]".to_string());
        }
        if !(l.q > 0.0 && l.q < 1.0) {
            v.push("ladder ratio q must lie in (0,1)".to_string());
        }
        if l.count < 6 {
            v.push(format!("ladder needs at least 6 rungs, got {}", l.count));
        }
        let tail = self.spectrum.convergence.tail.max(self.fourier.tail);
        if l.count >= 6 && l.count <= tail {
            v.push(format!("ladder of {} rungs is too short for a tail of {tail} increments", l.count));
        }
        for (name, t) in [("radius", self.tolerances.radius), ("relative", self.tolerances.relative)] {
            if let Some(t) = t {
                if !(t > 0.0 && t < 1.0) {
                    v.push(format!("tolerance {name} = {t} must lie in (0,1)"));
                }
            }
        }
        if let Err(e) = self.spectrum.validate() {
            v.push(e.to_string());
        }
        if let Err(e) = self.fourier.validate() {
            v.push(e.to_string());
        }
        match (&self.net, self.analysis.needs_net()) {
            (None, true) => v.push(format!("analysis {} needs a net", self.analysis.kind())),
            (Some(n), _) => {
                if let Err(e) = n.spec() {
                    v.push(format!("net: {e}"));
                }
            }
            _ => {}
        }
        self.analysis_violations(&mut v);
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(v))
        }
    }

    fn analysis_violations(&self, v: &mut Vec<String>) {
        let net = |s: &str, v: &mut Vec<String>| {
            if let Err(e) = s.parse::<NetSpec>() {
                v.push(format!("{s:?}: {e}"));
            }
        };
        match &self.analysis {
            Analysis::Spectrum { grid, .. } | Analysis::Support { grid, .. } | Analysis::Wavefront { grid, .. } => {
                grid.violations("grid", v)
            }
            Analysis::Product { other, grid, tol, .. } => {
                grid.violations("grid", v);
                if let Err(e) = other.spec() {
                    v.push(format!("other: {e}"));
                }
                if !(*tol > 0.0 && *tol < 1.0) {
                    v.push(format!("tolerance {tol} must lie in (0,1)"));
                }
            }
            Analysis::PowerBound { p, grid, tol, .. } => {
                grid.violations("grid", v);
                if *p == 0 {
                    v.push("power p must be at least 1".into());
                }
                if !(*tol > 0.0 && *tol < 1.0) {
                    v.push(format!("tolerance {tol} must lie in (0,1)"));
                }
            }
            Analysis::Convergence { r, lo, hi, .. } => {
                if !(*r >= 0.0) {
                    v.push("r must be nonnegative".into());
                }
                if !(hi > lo) {
                    v.push("convergence box needs hi > lo".into());
                }
            }
            Analysis::Classify { k, .. } => {
                if !(k[1] > k[0]) {
                    v.push("K needs hi > lo".into());
                }
            }
            Analysis::Fit { samples, tail } => {
                if samples.len() < 4 || *tail < 4 {
                    v.push("fit needs at least 4 samples and tail ≥ 4".into());
                }
            }
            Analysis::Cones { q_max, .. } if *q_max > 8 => v.push("q_max must not exceed 8".into()),
            Analysis::Rrl { k_max, .. } if !(1..=8).contains(k_max) => v.push("k_max must lie in 1..=8".into()),
            Analysis::Experiment(e) => match e {
                Experiment::DeltaPowers { m_list, .. } => {
                    if m_list.iter().any(|m| !(1..=4).contains(m)) {
                        v.push("delta powers need m in 1..=4".into());
                    }
                }
                Experiment::Transport { data, t_max, grid, .. } => {
                    net(data, v);
                    if !(*t_max > 0.0) {
                        v.push("t_max must be positive".into());
                    }
                    grid.violations(v);
                }
                Experiment::Blowup { problem, grid } => {
                    if let Err(e) = problem.validate() {
                        v.push(e.to_string());
                    }
                    grid.violations(v);
                }
                Experiment::Strength { nets } => nets.iter().for_each(|s| net(s, v)),
                Experiment::SumLaw { pairs, t } => {
                    for p in pairs {
                        for s in p {
                            if let Err(e) = wave_data(s) {
                                v.push(e.to_string());
                            }
                        }
                    }
                    if !(*t > 1.0 && *t <= 1.5) {
                        v.push("sum-law slice t must lie in (1, 1.5]".into());
                    }
                }
                Experiment::Properties { count, grid, .. } => {
                    if *count == 0 {
                        v.push("properties need count ≥ 1".into());
                    }
                    grid.violations("grid", v);
                }
            },
            _ => {}
        }
    }

    /// Absolute radius tolerance, default 0.15.
    pub fn radius_tol(&self) -> f64 {
        self.tolerances.radius.unwrap_or(0.15)
    }

    /// Relative tolerance, default 0.1.
    pub fn relative_tol(&self) -> f64 {
        self.tolerances.relative.unwrap_or(0.1)
    }
}

/// `δ^m` or `∂^k δ` as sum-law data.
pub fn wave_data(s: &str) -> Result<WaveData, CliError> {
    match s.parse::<NetSpec>()? {
        NetSpec::Delta { m, at: 0.0 } => Ok(WaveData::DeltaPower { m }),
        NetSpec::DeltaDerivative { k, at: 0.0 } => Ok(WaveData::DeltaDerivative { k }),
        _ => Err(CliError::Usage(format!(
            "sum-law data must be delta:m=.. or ddelta:k=.. (placed at ∓1 by the experiment), got {s:?}"
        ))),
    }
}

fn has_ext(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

/// Parses TOML, or JSON for `.json` files, reporting line and column of syntax errors.
pub fn parse_config_str(text: &str, json: bool) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = if json {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?
    } else {
        toml::from_str(text).map_err(|e| {
            let loc = e
                .span()
                .map(|s| {
                    let before = &text[..s.start.min(text.len())];
                    let line = before.matches('\n').count() + 1;
                    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!("line {line}, column {col}: ")
                })
                .unwrap_or_default();
            CliError::Config(format!("{loc}{}", e.message()))
        })?
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text, has_ext(path, "json")).map_err(|e| e.in_file(path))
}

/// Canonical TOML with every default filled in.
pub fn normalize(cfg: &RunConfig) -> Result<String, CliError> {
    toml::to_string(cfg).map_err(|e| CliError::Config(e.to_string()))
}
