//! Executes a validated configuration into result tables.

use asymptospec::asymptotics::{classify, fit_valuation, is_moderate, is_negligible, RegularitySequenceFamily};
use asymptospec::corpus::random_corpus;
use asymptospec::experiments::{
    log_growth_expectation, run_blowup, run_delta_powers, run_sum_law, run_transport, strength_of_singularity,
    InitialData, Nonlinearity, STRENGTH_TOLERANCE,
};
use asymptospec::frequential::{
    cone_decay_classify, rrl_microlocal_test, wavefront_estimate, windowed_fourier, Direction, };
use asymptospec::local_spectrum::{
    check_nonlinear_bounds, check_power_bound, monotone_fiber_violations, points_outside, singular_spectrum,
    singular_support, test_convergence, Endpoint, FiberRadius, SpectrumResult, TargetTopology,
};
use asymptospec::nets::{seminorm, Classical, DomainBox, EpsLadder, GeneralizedNet, NetSpec, Point, SumTerm};

use crate::config::{wave_data, Analysis, Experiment, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// Tables of one run with the library operations it exercised.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub operations: Vec<&'static str>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    ladder: EpsLadder,
    ops: Vec<&'static str>,
}

impl Ctx<'_> {
    fn op(&mut self, name: &'static str) {
        if !self.ops.contains(&name) {
            self.ops.push(name);
        }
    }

    fn trace_spec(&mut self, spec: &NetSpec) {
        match spec {
            NetSpec::Delta { .. } => self.op("make_delta"),
            NetSpec::DeltaDerivative { .. }
            | NetSpec::Heaviside { .. }
            | NetSpec::Kink { .. }
            | NetSpec::Piecewise { .. }
            | NetSpec::Smooth { embed: true, .. } => self.op("embed_classical"),
            NetSpec::Smooth { embed: false, .. } => {}
            NetSpec::Weighted { base, .. }
            | NetSpec::Power { base, .. }
            | NetSpec::Derivative { base, .. }
            | NetSpec::ScaleBy { base, .. } => {
                self.op("net_algebra");
                self.trace_spec(base);
            }
            NetSpec::Restrict { base, .. } => {
                self.op("restrict");
                self.trace_spec(base);
            }
            NetSpec::Sum { terms } => terms.iter().for_each(|t| self.trace_spec(&t.net)),
            NetSpec::Product { factors } => {
                self.op("net_algebra");
                factors.iter().for_each(|f| self.trace_spec(f));
            }
        }
    }

    fn build(&mut self, spec: &NetSpec) -> Result<GeneralizedNet, CliError> {
        self.trace_spec(spec);
        Ok(spec.build(&self.cfg.mollifier)?)
    }

    fn net(&mut self) -> Result<GeneralizedNet, CliError> {
        let spec = self
            .cfg
            .net
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("analysis {} needs a net", self.cfg.analysis.kind())))?
            .spec()?;
        self.build(&spec)
    }

    fn spectrum(&mut self, u: &GeneralizedNet, grid: &[Point], top: &TargetTopology) -> Result<SpectrumResult, CliError> {
        self.op("singular_spectrum");
        Ok(singular_spectrum(u, &self.cfg.scale, grid, top, &self.ladder, &self.cfg.spectrum)?)
    }
}

fn line(xs: Vec<f64>) -> Vec<Point> {
    xs.into_iter().map(|x| [x, 0.0]).collect()
}

/// `empty`, the radius, `inf` or `unknown`.
pub fn radius_cell(r: &FiberRadius) -> Cell {
    match r {
        FiberRadius::Empty => "empty".into(),
        FiberRadius::Finite { r } => Cell::Num(*r),
        FiberRadius::Infinite => Cell::Num(f64::INFINITY),
        FiberRadius::Unknown => "unknown".into(),
    }
}

/// Whether the finite radius itself is an admissible exponent.
fn endpoint_cell(e: Endpoint, r: &FiberRadius) -> Cell {
    match r {
        FiberRadius::Finite { .. } => serde_label(&e).into(),
        _ => Cell::Missing,
    }
}

fn spectrum_tables(res: &SpectrumResult, with_t: bool) -> (Table, Table) {
    let mut samples = Table::new("spectrum", if with_t { &["x", "t", "r", "status"] } else { &["x", "r", "status"] });
    let mut fibers = Table::new(
        "fibers",
        if with_t {
            &["x", "t", "radius", "sup", "endpoint", "error"]
        } else {
            &["x", "radius", "sup", "endpoint", "error"]
        },
    );
    for p in &res.points {
        let head: Vec<Cell> = if with_t { vec![p.x[0].into(), p.x[1].into()] } else { vec![p.x[0].into()] };
        for (r, s) in &p.samples {
            let mut row = head.clone();
            row.extend([Cell::Num(*r), s.as_str().into()]);
            samples.push(row);
        }
        let mut row = head;
        row.extend([
            radius_cell(&p.radius),
            p.radius.sup().into(),
            endpoint_cell(p.endpoint, &p.radius),
            p.error.clone().map_or(Cell::Missing, Cell::Text),
        ]);
        fibers.push(row);
    }
    (samples, fibers)
}

fn family_cell(f: &RegularitySequenceFamily) -> Cell {
    f.to_string().into()
}

/// Runs the configured analysis.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut cx = Ctx {
        cfg,
        ladder: cfg.ladder.build()?,
        ops: vec!["parse_config", "run"],
    };
    let tables = match &cfg.analysis {
        Analysis::Spectrum { topology, grid } => {
            let u = cx.net()?;
            let res = cx.spectrum(&u, &line(grid.points()), topology)?;
            let (s, f) = spectrum_tables(&res, false);
            vec![s, f]
        }
        Analysis::Support { topology, grid } => {
            let u = cx.net()?;
            let pts = line(grid.points());
            cx.op("singular_support");
            let supp = singular_support(&u, &cfg.scale, &pts, topology, &cx.ladder, &cfg.spectrum)?;
            let mut t = Table::new("support", &["x", "singular"]);
            for p in &pts {
                t.push(vec![p[0].into(), supp.contains(p).into()]);
            }
            vec![t]
        }
        Analysis::Convergence { topology, r, lo, hi } => {
            let u = cx.net()?;
            cx.op("test_convergence");
            let v = test_convergence(
                &u,
                &cfg.scale,
                *r,
                &DomainBox::interval(*lo, *hi)?,
                topology,
                &cx.ladder,
                &cfg.spectrum.convergence,
            )?;
            let mut t = Table::new("convergence", &["r", "status", "limit_norm", "slope"]);
            t.push(vec![(*r).into(), v.status.as_str().into(), Cell::opt(v.limit_norm), Cell::opt(v.slope)]);
            let mut d = Table::new("increments", &["eps", "increment"]);
            for (e, x) in &v.diagnostics {
                d.push(vec![(*e).into(), (*x).into()]);
            }
            vec![t, d]
        }
        Analysis::Product { other, topology, grid, tol } => {
            let u = cx.net()?;
            let v = cx.build(&other.spec()?)?;
            cx.op("check_nonlinear_bounds");
            let rows = check_nonlinear_bounds(
                &u,
                &v,
                &cfg.scale,
                &line(grid.points()),
                topology,
                &cx.ladder,
                &cfg.spectrum,
                *tol,
            )?;
            let mut t = Table::new("product", &["x", "region", "r_u", "r_v", "r_product", "bound", "ok"]);
            for r in rows {
                t.push(vec![
                    r.x[0].into(),
                    serde_label(&r.region).into(),
                    radius_cell(&r.r_u),
                    radius_cell(&r.r_v),
                    radius_cell(&r.r_product),
                    bound_cell(r.bound),
                    r.ok.into(),
                ]);
            }
            vec![t]
        }
        Analysis::PowerBound { p, topology, grid, tol } => {
            let u = cx.net()?;
            cx.op("check_nonlinear_bounds");
            let rows = check_power_bound(
                &u,
                *p,
                &cfg.scale,
                &line(grid.points()),
                topology,
                &cx.ladder,
                &cfg.spectrum,
                *tol,
            )?;
            let mut t = Table::new("power_bound", &["x", "p", "r_u", "r_power", "bound", "ok"]);
            for r in rows {
                t.push(vec![
                    r.x[0].into(),
                    (*p).into(),
                    radius_cell(&r.r_u),
                    radius_cell(&r.r_power),
                    bound_cell(r.bound),
                    r.ok.into(),
                ]);
            }
            vec![t]
        }
        Analysis::Classify { k, l_max, family } => classify_tables(&mut cx, *k, *l_max, family)?,
        Analysis::Fit { samples, tail } => {
            cx.op("fit_valuation");
            let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s[0], s[1])).collect();
            let f = fit_valuation(&pts, *tail)?;
            let mut t = Table::new("fit", &["slope", "intercept", "residual", "verdict", "samples"]);
            t.push(vec![
                f.slope.into(),
                f.intercept.into(),
                f.residual.into(),
                serde_label(&f.verdict).into(),
                f.samples.into(),
            ]);
            vec![t]
        }
        Analysis::Wavefront { grid, family, q_max } => {
            let u = cx.net()?;
            cx.op("wavefront_estimate");
            cx.op("windowed_fourier");
            cx.op("cone_decay_classify");
            let est = wavefront_estimate(&u, &grid.points(), &cx.ladder, family, *q_max, &cfg.fourier)?;
            let mut wf = Table::new("wavefront", &["x", "direction", "verdict", "in_wavefront"]);
            let mut decay = Table::new("decay", &["x", "direction", "q", "exponent"]);
            let mut supp = Table::new("support", &["x", "full_verdict", "in_projection", "error"]);
            let proj = est.projection();
            for r in &est.records {
                for c in &r.cones {
                    wf.push(vec![
                        r.x.into(),
                        c.direction.to_string().into(),
                        c.verdict.as_str().into(),
                        est.contains(r.x, c.direction).into(),
                    ]);
                    for (q, n) in c.decay_exponents.iter().enumerate() {
                        decay.push(vec![r.x.into(), c.direction.to_string().into(), q.into(), (*n).into()]);
                    }
                }
                supp.push(vec![
                    r.x.into(),
                    r.full_verdict.as_str().into(),
                    proj.contains(&r.x).into(),
                    r.error.clone().map_or(Cell::Missing, Cell::Text),
                ]);
            }
            vec![wf, supp, decay]
        }
        Analysis::Cones { x0, family, q_max } => {
            let u = cx.net()?;
            cx.op("windowed_fourier");
            cx.op("cone_decay_classify");
            let spec = windowed_fourier(&u, *x0, cfg.fourier.window_width, &cx.ladder, &cfg.fourier)?;
            let mut cones = Table::new("cones", &["direction", "q", "exponent", "verdict"]);
            for d in Direction::BOTH {
                let rep = cone_decay_classify(&spec, d, *q_max, family, cfg.fourier.tail)?;
                for (q, n) in rep.decay_exponents.iter().enumerate() {
                    cones.push(vec![d.to_string().into(), q.into(), (*n).into(), rep.verdict.as_str().into()]);
                }
            }
            let mut rungs = Table::new("rungs", &["eps", "h", "xi_max", "l1", "parseval_error"]);
            for r in &spec.rungs {
                rungs.push(vec![r.eps.into(), r.h.into(), r.xi_max().into(), r.l1.into(), r.parseval_error().into()]);
            }
            vec![cones, rungs]
        }
        Analysis::Rrl {
            x0,
            direction,
            l,
            family,
            k_max,
        } => {
            let u = cx.net()?;
            cx.op("rRL_microlocal_test");
            let rep = rrl_microlocal_test(&u, *x0, *direction, l, family, *k_max, &cx.ladder, &cfg.fourier)?;
            let mut orders = Table::new("rrl", &["k", "exponent", "root_ratio"]);
            for (k, (e, q)) in rep.exponents.iter().zip(&rep.root_ratios).enumerate() {
                orders.push(vec![k.into(), (*e).into(), if k == 0 { Cell::Missing } else { (*q).into() }]);
            }
            let mut v = Table::new(
                "verdict",
                &["x0", "direction", "family", "verdict", "exponent_verdict", "constant", "constant_ok"],
            );
            v.push(vec![
                rep.x0.into(),
                rep.direction.to_string().into(),
                family_cell(family),
                rep.verdict.as_str().into(),
                rep.exponent_verdict.as_str().into(),
                rep.constant.into(),
                rep.constant_ok.into(),
            ]);
            vec![orders, v]
        }
        Analysis::Experiment(e) => experiment_tables(&mut cx, e)?,
    };
    Ok(Outcome {
        tables,
        operations: cx.ops,
    })
}

fn bound_cell(b: Option<f64>) -> Cell {
    b.map_or_else(|| "empty".into(), Cell::Num)
}

/// The serde name of a unit enum variant.
fn serde_label<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn classify_tables(
    cx: &mut Ctx,
    k: [f64; 2],
    l_max: usize,
    family: &RegularitySequenceFamily,
) -> Result<Vec<Table>, CliError> {
    let u = cx.net()?;
    let kb = DomainBox::interval(k[0], k[1])?;
    let copts = Default::default();
    cx.op("classify");
    let v = classify(&u, &kb, l_max, *family, &cx.ladder, &copts)?;
    cx.op("is_moderate");
    let m = is_moderate(&u, &kb, l_max, &cx.ladder, &copts)?;
    cx.op("is_negligible");
    let neg = is_negligible(&u, &kb, l_max, &cx.ladder, &copts)?;
    let mut classes = Table::new("classes", &["class", "holds"]);
    for (name, holds) in [
        ("moderate", m.moderate),
        ("negligible", neg),
        ("slow_scale", v.slow_scale),
        ("g_infinity", v.g_infinity),
        ("g_r", v.g_r),
    ] {
        classes.push(vec![name.into(), holds.into()]);
    }
    let mut ex = Table::new("exponents", &["l", "slope", "growth", "order"]);
    for (l, ((s, g), o)) in m.slopes.iter().zip(&v.exponents).zip(&m.orders).enumerate() {
        ex.push(vec![
            l.into(),
            (*s).into(),
            (*g).into(),
            if *o == u32::MAX { Cell::Num(f64::INFINITY) } else { (*o).into() },
        ]);
    }
    cx.op("seminorm");
    let mut sn = Table::new("seminorms", &["l", "eps", "value"]);
    for l in 0..=l_max {
        for &eps in cx.ladder.values() {
            sn.push(vec![l.into(), eps.into(), seminorm(&u, &kb, l, eps, &copts.sampling)?.into()]);
        }
    }
    Ok(vec![classes, ex, sn])
}

fn initial_data(s: &str) -> Result<InitialData, CliError> {
    match s.parse::<NetSpec>()? {
        NetSpec::Delta { m, at: 0.0 } => Ok(InitialData::DeltaPower { m }),
        NetSpec::DeltaDerivative { k, at: 0.0 } => Ok(InitialData::DeltaDerivative { k }),
        _ => Err(CliError::Usage(format!(
            "transport data must be delta:m=.. or ddelta:k=.. at 0, got {s:?}"
        ))),
    }
}

fn data_label(d: InitialData) -> String {
    match d {
        InitialData::DeltaPower { m } => format!("delta:m={m}"),
        InitialData::DeltaDerivative { k } => format!("ddelta:k={k}"),
    }
}

/// Classical function and expected strength for a strength-table net.
fn strength_target(spec: &NetSpec) -> Result<(Classical, f64, i64), CliError> {
    Ok(match *spec {
        NetSpec::Heaviside { at } => (Classical::Heaviside { at }, at, 1),
        NetSpec::Kink { at } => (Classical::Kink { at }, at, 0),
        NetSpec::Delta { m: 1, at } => (Classical::DeltaDerivative { k: 0, at }, at, 2),
        NetSpec::DeltaDerivative { k, at } => (Classical::DeltaDerivative { k, at }, at, k as i64 + 2),
        _ => {
            return Err(CliError::Usage(format!(
                "strengths are defined for heaviside, kink, delta and delta_derivative, got {spec:?}"
            )))
        }
    })
}

fn experiment_tables(cx: &mut Ctx, e: &Experiment) -> Result<Vec<Table>, CliError> {
    let cfg = cx.cfg;
    Ok(match e {
        Experiment::DeltaPowers { m_list, topologies } => {
            cx.op("run_delta_powers");
            cx.op("make_delta");
            cx.op("critical_exponent");
            let tops: Vec<TargetTopology> = topologies.iter().map(|t| t.0.clone()).collect();
            let rows = run_delta_powers(m_list, &tops, &cx.ladder, &cfg.spectrum)?;
            let mut t = Table::new(
                "delta_powers",
                &["m", "topology", "radius", "expected_radius", "endpoint", "expected_endpoint", "pass"],
            );
            for r in rows {
                t.push(vec![
                    r.m.into(),
                    r.topology.into(),
                    radius_cell(&r.radius),
                    r.expected_radius.map_or_else(|| "empty".into(), Cell::Num),
                    endpoint_cell(r.endpoint, &r.radius),
                    r.expected_endpoint.map_or(Cell::Missing, |e| serde_label(&e).into()),
                    r.pass.into(),
                ]);
            }
            vec![t]
        }
        Experiment::Transport {
            nonlinearity,
            data,
            t_max,
            grid,
            topology,
        } => {
            cx.op("solve_transport");
            let d = initial_data(data)?;
            let run = run_transport(*nonlinearity, d, *t_max, &grid.points(), topology, &cx.ladder, &cfg.spectrum)?;
            let (_, fibers) = spectrum_tables(&run.solution, true);
            let mut t = Table::new(
                "transport",
                &["nonlinearity", "data", "x", "t", "radius", "endpoint", "expected", "relative_error"],
            );
            for (p, row) in run.solution.points.iter().zip(&fibers.rows) {
                let expected = match (nonlinearity, d) {
                    (Nonlinearity::LogGrowth, InitialData::DeltaPower { m }) if p.x[0] == 0.0 => {
                        Some(log_growth_expectation(m, p.x[1]))
                    }
                    _ => None,
                };
                let rel = expected.zip(p.radius.value()).map(|(e, r)| (r - e).abs() / e.abs());
                t.push(vec![
                    nonlinearity.to_string().into(),
                    data_label(d).into(),
                    row[0].clone(),
                    row[1].clone(),
                    row[2].clone(),
                    row[4].clone(),
                    Cell::opt(expected),
                    Cell::opt(rel),
                ]);
            }
            let mut init = Table::new("initial", &["nonlinearity", "data", "radius", "endpoint"]);
            init.push(vec![
                nonlinearity.to_string().into(),
                data_label(d).into(),
                radius_cell(&run.initial.radius),
                endpoint_cell(run.initial.endpoint, &run.initial.radius),
            ]);
            let mut chk = Table::new("flow_check", &["eps", "samples", "max_relative_error"]);
            chk.push(vec![run.check.eps.into(), run.check.samples.into(), run.check.max_relative_error.into()]);
            vec![t, init, chk]
        }
        Experiment::Blowup { problem, grid } => {
            cx.op("solve_blowup");
            cx.op("singular_spectrum");
            let res = run_blowup(problem, &grid.points(), &cx.ladder, &cfg.spectrum)?;
            let (_, mut fibers) = spectrum_tables(&res, true);
            fibers.name = "blowup".into();
            vec![fibers]
        }
        Experiment::Strength { nets } => {
            cx.op("strength_of_singularity");
            cx.op("critical_exponent");
            cx.op("embed_classical");
            let mut t = Table::new("strength", &["net", "at", "n", "radius", "endpoint", "expected", "pass", "error"]);
            for s in nets {
                let (f, at, expected) = strength_target(&s.parse::<NetSpec>()?)?;
                let row = match strength_of_singularity(&f, at, &cfg.mollifier, &cx.ladder, &cfg.spectrum) {
                    Ok(st) => vec![
                        s.as_str().into(),
                        at.into(),
                        st.n.into(),
                        st.radius.into(),
                        if st.radius > 0.0 { serde_label(&st.endpoint).into() } else { Cell::Missing },
                        expected.into(),
                        ((st.radius - expected as f64).abs() <= STRENGTH_TOLERANCE).into(),
                        Cell::Missing,
                    ],
                    Err(e) => vec![
                        s.as_str().into(),
                        at.into(),
                        Cell::Missing,
                        Cell::Missing,
                        Cell::Missing,
                        expected.into(),
                        false.into(),
                        e.to_string().into(),
                    ],
                };
                t.push(row);
            }
            vec![t]
        }
        Experiment::SumLaw { pairs, t } => {
            cx.op("solve_rauch_reed");
            cx.op("strength_of_singularity");
            let waves = pairs
                .iter()
                .map(|[a, b]| Ok((wave_data(a)?, wave_data(b)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let rows = run_sum_law(&waves, *t, &cx.ladder, &cfg.spectrum)?;
            let mut tab = Table::new(
                "sum_law",
                &["u0", "v0", "t", "radius", "endpoint", "strength", "expected", "pass"],
            );
            for r in rows {
                tab.push(vec![
                    r.u0.label().into(),
                    r.v0.label().into(),
                    r.t.into(),
                    radius_cell(&r.radius),
                    endpoint_cell(r.endpoint, &r.radius),
                    r.strength.map_or(Cell::Missing, Cell::Int),
                    r.expected.into(),
                    r.pass.into(),
                ]);
            }
            vec![tab]
        }
        Experiment::Properties { count, topology, grid } => properties(cx, *count, topology, &grid.points())?,
    })
}

const CELL: f64 = 0.25;

/// Monotone fibers, exact projection, subadditive supports and the class chain on seeded nets.
fn properties(cx: &mut Ctx, count: usize, top: &TargetTopology, xs: &[f64]) -> Result<Vec<Table>, CliError> {
    let cfg = cx.cfg;
    let grid = line(xs.to_vec());
    let specs = random_corpus(cfg.seed, count);
    let k = DomainBox::interval(-0.75, 0.75)?;
    let copts = Default::default();
    let mut nets = Table::new(
        "properties",
        &["index", "net", "projection", "monotone_violations", "projection_matches", "chain_violations"],
    );
    let mut supports = Vec::with_capacity(count);
    for (i, spec) in specs.iter().enumerate() {
        let u = cx.build(spec)?;
        let res = cx.spectrum(&u, &grid, top)?;
        cx.op("singular_support");
        let supp = singular_support(&u, &cfg.scale, &grid, top, &cx.ladder, &cfg.spectrum)?;
        cx.op("classify");
        let v = classify(&u, &k, 2, RegularitySequenceFamily::Bounded, &cx.ladder, &copts)?;
        let chain = [v.negligible, v.slow_scale, v.g_infinity, v.g_r, v.moderate];
        let proj = res.projection();
        nets.push(vec![
            i.into(),
            serde_json::to_string(spec).unwrap_or_default().into(),
            proj.iter().map(|p| p[0].to_string()).collect::<Vec<_>>().join(" ").into(),
            monotone_fiber_violations(&res).len().into(),
            (proj == supp).into(),
            chain.windows(2).filter(|w| w[0] && !w[1]).count().into(),
        ]);
        supports.push(supp);
    }
    let mut pairs = Table::new("subadditivity", &["i", "j", "outside"]);
    for i in 0..count {
        let j = (i + 1) % count;
        let sum = NetSpec::Sum {
            terms: vec![
                SumTerm {
                    coef: 1.0,
                    net: specs[i].clone(),
                },
                SumTerm {
                    coef: 1.0,
                    net: specs[j].clone(),
                },
            ],
        };
        let w = cx.build(&sum)?;
        let s = singular_support(&w, &cfg.scale, &grid, top, &cx.ladder, &cfg.spectrum)?;
        let union: Vec<Point> = supports[i].iter().chain(&supports[j]).copied().collect();
        pairs.push(vec![i.into(), j.into(), points_outside(&s, &union, CELL).len().into()]);
    }
    Ok(vec![nets, pairs])
}
