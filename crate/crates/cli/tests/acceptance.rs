//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use asymptospec::asymptotics::fit_valuation;
use asymptospec::corpus::random_corpus;
use asymptospec::experiments::{rk4_flow, Nonlinearity};
use asymptospec::local_spectrum::{points_outside, singular_support, SpectrumOptions, TargetTopology};
use asymptospec::nets::{Alpha, AsymptoticScale, EpsLadder, Mollifier, NetSpec, FD_STEP_FRACTION};
use asymptospec_cli::config::{Analysis, Grid1, Grid2, NetInput};
use asymptospec_cli::table::{Cell, Table};
use asymptospec_cli::{evaluate, parse_config_str, RunConfig, Summary, BUNDLED_CONFIGS};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

struct Row<'a> {
    t: &'a Table,
    r: &'a [Cell],
}

impl Row<'_> {
    fn cell(&self, c: &str) -> &Cell {
        &self.r[self.t.column(c).unwrap_or_else(|| panic!("{}: no column {c}", self.t.name))]
    }
    fn num(&self, c: &str) -> Option<f64> {
        self.cell(c).as_f64()
    }
    fn text(&self, c: &str) -> String {
        self.cell(c).to_string()
    }
}

fn rows<'a>(s: &'a Summary, table: &str) -> Vec<Row<'a>> {
    let t = s.table(table).unwrap_or_else(|| panic!("no table {table}"));
    t.rows.iter().map(|r| Row { t, r }).collect()
}

fn bundled(name: &str) -> RunConfig {
    let text = BUNDLED_CONFIGS.iter().find(|c| c.0 == name).unwrap_or_else(|| panic!("no config {name}")).1;
    parse_config_str(text, false).unwrap()
}

fn run(cfg: &RunConfig) -> Summary {
    evaluate(cfg).unwrap_or_else(|e| panic!("run failed: {e}"))
}

fn near(v: Option<f64>, want: f64, tol: f64) -> bool {
    v.is_some_and(|v| (v - want).abs() <= tol)
}

/// Collects failed conditions of one criterion.
#[derive(Default)]
struct Log {
    fails: Vec<String>,
    checked: usize,
}

impl Log {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fails.push(what());
        }
    }
    fn finish(self, detail: String) -> Check {
        if self.fails.is_empty() {
            Ok(format!("{} checks; {detail}", self.checked))
        } else {
            Err(self.fails.join("; "))
        }
    }
}

fn delta_powers() -> Check {
    let s = run(&bundled("delta_powers"));
    let mut log = Log::default();
    let mut seen = Vec::new();
    for r in rows(&s, "delta_powers") {
        let m = r.num("m").unwrap();
        let top = r.text("topology");
        let (rad, end) = (r.num("radius"), r.text("endpoint"));
        let ok = match top.as_str() {
            "C0" => near(rad, m, 0.15) && end == "unattained",
            "C1" => near(rad, m + 1.0, 0.15) && end == "unattained",
            "Dprime" if m == 1.0 => r.text("radius") == "empty",
            "Dprime" => near(rad, m - 1.0, 0.15) && end == "attained",
            _ => false,
        };
        log.check(ok, || format!("m={m} {top}: R={} {end}", r.text("radius")));
        seen.push(format!("{top}(δ^{m})={}", r.text("radius")));
    }
    log.check(seen.len() == 9, || format!("{} rows, want 9", seen.len()));
    log.finish(seen.join(" "))
}

fn eps_powers() -> Check {
    let mut log = Log::default();
    let mut out = Vec::new();
    for (name, tol, end) in [("eps_power", 0.1, "attained"), ("eps_log", 0.15, "unattained")] {
        let s = run(&bundled(name));
        for r in rows(&s, "fibers") {
            log.check(near(r.num("radius"), 1.0, tol) && r.text("endpoint") == end, || {
                format!("{name}: R={} {}", r.text("radius"), r.text("endpoint"))
            });
            out.push(format!("{name} R={} {}", r.text("radius"), r.text("endpoint")));
        }
    }
    log.finish(out.join(", "))
}

fn dissipative() -> Check {
    let mut cfg = bundled("dissipative");
    if let Analysis::Experiment(asymptospec_cli::config::Experiment::Transport { grid, .. }) = &mut cfg.analysis {
        *grid = Grid2::Product {
            x: Grid1::Points(vec![-0.25, 0.0, 0.25]),
            t: Grid1::Points(vec![0.25, 0.5, 1.0]),
        };
    }
    let s = run(&cfg);
    let mut log = Log::default();
    let sol = rows(&s, "transport");
    log.check(sol.len() == 9, || format!("{} solution rows", sol.len()));
    for r in &sol {
        log.check(r.text("radius") == "empty", || format!("(x={}, t={}): R={}", r.text("x"), r.text("t"), r.text("radius")));
    }
    let init = rows(&s, "initial");
    let r0 = init[0].num("radius");
    log.check(near(r0, 1.0, 0.15), || format!("initial R={}", init[0].text("radius")));
    log.finish(format!("solution empty on 9 points, initial R={}", init[0].text("radius")))
}

fn sqrt_exp() -> Check {
    let mut log = Log::default();
    let s = run(&bundled("sqrt_exp_delta"));
    for r in rows(&s, "transport") {
        log.check(r.text("radius") == "empty", || format!("δ data at t={}: R={}", r.text("t"), r.text("radius")));
    }
    let s = run(&bundled("sqrt_exp_ddelta"));
    let mut radii = Vec::new();
    for t in [0.5, 1.0] {
        let hit: Vec<_> = rows(&s, "transport")
            .into_iter()
            .filter(|r| r.num("x") == Some(0.0) && r.num("t") == Some(t))
            .collect();
        log.check(hit.len() == 1 && near(hit[0].num("radius"), 1.0, 0.15), || format!("δ′ data at t={t}: no fiber of radius 1"));
        radii.extend(hit.iter().map(|r| r.text("radius")));
    }
    log.finish(format!("δ → empty, δ′ → R = {}", radii.join(", ")))
}

fn log_growth() -> Check {
    let mut log = Log::default();
    let mut worst: f64 = 0.0;
    for (name, m) in [("log_growth_m1", 1.0), ("log_growth_m2", 2.0)] {
        let s = run(&bundled(name));
        let mut ts = Vec::new();
        for r in rows(&s, "transport").into_iter().filter(|r| r.num("x") == Some(0.0)) {
            let t = r.num("t").unwrap();
            let want = m * f64::exp(t) - 1.0;
            let rel = r.num("radius").map_or(f64::INFINITY, |v| (v - want).abs() / want);
            worst = worst.max(rel);
            log.check(rel <= 0.1, || format!("m={m} t={t}: R={} vs {want:.4}", r.text("radius")));
            ts.push(t);
        }
        ts.sort_by(f64::total_cmp);
        log.check(ts == [0.25, 0.5, 1.0], || format!("m={m}: times {ts:?}"));
    }
    log.finish(format!("max relative error {worst:.3}"))
}

fn blowup() -> Check {
    let s = run(&bundled("blowup"));
    let mut log = Log::default();
    let (mut before, mut after, mut far) = (0, 0, 0);
    for r in rows(&s, "blowup") {
        let (x, t) = (r.num("x").unwrap(), r.num("t").unwrap());
        let rad = r.text("radius");
        if x == -0.5 {
            far += 1;
            log.check(rad == "empty", || format!("({x},{t}): R={rad}, want empty"));
        } else if x == 0.0 && t < 1.0 {
            before += 1;
            log.check(r.num("sup").is_some_and(|v| v <= 0.1), || format!("({x},{t}): R={rad}, want ≤ 0.1"));
        } else if (x == 0.1 || x == 0.5) && (t == 1.2 || t == 1.5) {
            after += 1;
            log.check(near(r.num("radius"), 0.5, 0.15), || format!("({x},{t}): R={rad}, want 0.5"));
        }
    }
    log.check(before >= 2 && after == 4 && far >= 1, || format!("coverage {before}/{after}/{far}"));
    log.finish(format!("{before} points before, {after} after, {far} outside"))
}

fn strength() -> Check {
    let s = run(&bundled("strength"));
    let mut log = Log::default();
    let mut out = Vec::new();
    let want = [("heaviside", 1.0), ("kink", 0.0), ("delta", 2.0), ("delta_derivative:k=1", 3.0)];
    let got = rows(&s, "strength");
    log.check(got.len() == want.len(), || format!("{} rows", got.len()));
    for (r, (name, n)) in got.iter().zip(want) {
        log.check(near(r.num("radius"), n, 0.2) && r.num("n") == Some(n), || {
            format!("{name}: raw {} n={}", r.text("radius"), r.text("n"))
        });
        out.push(format!("{name}→{}", r.text("n")));
    }
    log.finish(out.join(" "))
}

fn sum_law() -> Check {
    let s = run(&bundled("sum_law"));
    let mut log = Log::default();
    let (mut derivs, mut powers) = (0, 0);
    let order = |l: &str| -> (bool, f64) {
        if let Some(j) = l.strip_prefix("d^").and_then(|l| l.strip_suffix(" delta")) {
            (true, j.parse().unwrap())
        } else {
            (false, l.strip_prefix("delta^").unwrap().parse().unwrap())
        }
    };
    for r in rows(&s, "sum_law") {
        let ((du, a), (_, b)) = (order(&r.text("u0")), order(&r.text("v0")));
        log.check(r.num("t") == Some(1.25), || format!("t = {}", r.text("t")));
        if du {
            derivs += 1;
            log.check(near(r.num("radius"), a + b + 2.0, 0.2), || format!("∂^{a}δ, ∂^{b}δ: n={}", r.text("radius")));
        } else {
            powers += 1;
            log.check(r.num("radius").is_some_and(|v| v <= a + b + 0.15), || {
                format!("δ^{a}, δ^{b}: R={}", r.text("radius"))
            });
        }
    }
    log.check(derivs == 4 && powers == 4, || format!("{derivs} derivative and {powers} power pairs"));
    log.finish(format!("{derivs} derivative pairs, {powers} power pairs"))
}

fn wavefront() -> Check {
    let mut log = Log::default();
    let mut check = |net: &str, want: &[(String, String)]| {
        let mut cfg = bundled(if net.starts_with("gaussian") { "wavefront_smooth" } else { "wavefront_delta" });
        cfg.net = Some(NetInput::Compact(net.into()));
        let s = run(&cfg);
        let mut got: Vec<(String, String)> = rows(&s, "wavefront")
            .into_iter()
            .filter(|r| r.text("in_wavefront") == "true")
            .map(|r| (r.text("x"), r.text("direction")))
            .collect();
        got.sort();
        log.check(got == want, || format!("{net}: WF = {got:?}"));
        let mut proj: Vec<String> = got.iter().map(|p| p.0.clone()).collect();
        proj.dedup();
        let supp: Vec<String> = rows(&s, "support")
            .into_iter()
            .filter(|r| r.text("in_projection") == "true")
            .map(|r| r.text("x"))
            .collect();
        log.check(proj == supp, || format!("{net}: projection {proj:?} vs singular support {supp:?}"));
    };
    let delta = [("0".to_string(), "+1".to_string()), ("0".to_string(), "-1".to_string())];
    let mut sorted = delta.to_vec();
    sorted.sort();
    for m in 1..=3 {
        check(&format!("delta:m={m}"), &sorted);
    }
    check("gaussian:embed=1", &[]);
    log.finish("WF(δ^m) = {(0,±1)} for m = 1, 2, 3; smooth net empty".into())
}

fn properties() -> Check {
    let clock = Instant::now();
    let cfg = bundled("properties");
    let s = run(&cfg);
    let mut log = Log::default();
    let nets = rows(&s, "properties");
    log.check(nets.len() == 20, || format!("{} nets", nets.len()));
    for r in &nets {
        let i = r.text("index");
        log.check(r.num("monotone_violations") == Some(0.0), || format!("net {i}: fiber not monotone"));
        log.check(r.text("projection_matches") == "true", || format!("net {i}: projection differs"));
        log.check(r.num("chain_violations") == Some(0.0), || format!("net {i}: class chain broken"));
    }
    let pairs = rows(&s, "subadditivity");
    log.check(pairs.len() == 20, || format!("{} pairs", pairs.len()));
    for r in &pairs {
        log.check(r.num("outside") == Some(0.0), || format!("pair {}+{}: S(u+v) escapes", r.text("i"), r.text("j")));
    }

    let t_suite = clock.elapsed().as_secs();

    // S(∂u) ⊆ S(u) within one grid cell, in D′ where every derivative is defined.
    let grid: Vec<[f64; 2]> = Grid1::Points(vec![-0.5, -0.25, 0.0, 0.25, 0.5]).points().iter().map(|&x| [x, 0.0]).collect();
    let ladder = cfg.ladder.build().unwrap();
    let phi = Mollifier::standard();
    let opts = SpectrumOptions::default();
    let dp: TargetTopology = "Dprime".parse().unwrap();
    for (i, spec) in random_corpus(cfg.seed, 20).iter().enumerate() {
        let u = spec.build(&phi).unwrap();
        let du = NetSpec::Derivative {
            base: Box::new(spec.clone()),
            order: 1,
        }
        .build(&phi)
        .unwrap();
        let su = singular_support(&u, &AsymptoticScale::Power, &grid, &dp, &ladder, &opts).unwrap();
        let sd = singular_support(&du, &AsymptoticScale::Power, &grid, &dp, &ladder, &opts).unwrap();
        let out = points_outside(&sd, &su, 0.25);
        log.check(out.is_empty(), || format!("net {i}: S(∂u) escapes at {out:?}"));
    }

    let t_deriv = clock.elapsed().as_secs() - t_suite;
    let mut worst = f64::NEG_INFINITY;
    for net in ["delta", "heaviside"] {
        for p in [2, 3] {
            let text = format!("net = \"{net}\"\n[analysis]\nkind = \"power_bound\"\np = {p}\ngrid = [-0.25, 0.0, 0.25]\n");
            let s = run(&parse_config_str(&text, false).unwrap());
            for r in rows(&s, "power_bound") {
                let (ru, rp) = (r.text("r_u"), r.text("r_power"));
                let ok = match (r.num("r_u"), r.num("r_power")) {
                    (_, None) if rp == "empty" => true,
                    (Some(a), Some(b)) => {
                        worst = worst.max(b - p as f64 * a);
                        b <= p as f64 * a + 0.15
                    }
                    _ => false,
                };
                log.check(ok, || format!("{net}^{p} at x={}: R(u)={ru}, R(u^p)={rp}", r.text("x")));
            }
        }
    }
    let t_power = clock.elapsed().as_secs() - t_suite - t_deriv;
    log.finish(format!(
        "max R(u^p) − p·R(u) = {worst:.3}; suite {t_suite}s, derivatives {t_deriv}s, powers {t_power}s"
    ))
}

fn hygiene() -> Check {
    let mut log = Log::default();

    let ladder = EpsLadder::geometric(1.0 / 16.0, 0.5, 13).unwrap();
    let mut fit_err: f64 = 0.0;
    for b in [-3.0, -1.5, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0] {
        for c in [0.1, 1.0, 7.0] {
            let samples: Vec<(f64, f64)> = ladder.values().iter().map(|&e| (e, c * f64::powf(e, b))).collect();
            let f = fit_valuation(&samples, 8).unwrap();
            fit_err = fit_err.max((f.slope - b).abs());
        }
    }
    log.check(fit_err <= 1e-10, || format!("fit slope error {fit_err:e}"));

    let phi = Mollifier::standard();
    let mut fd_err: f64 = 0.0;
    for net in ["delta", "delta:m=2", "delta:m=3", "heaviside", "kink:pow=2", "gaussian:embed=1"] {
        let u = net.parse::<NetSpec>().unwrap().build(&phi).unwrap();
        for &eps in &ladder.values()[..10] {
            for x in [-0.3, -0.5 * eps, 0.0, 0.3 * eps, 0.7 * eps, 0.2] {
                for k in 1..=2 {
                    let p = [x, 0.0];
                    let a = u.eval(p, eps, Alpha::dx(k));
                    let f = u.finite_difference(p, eps, Alpha::dx(k));
                    let h = FD_STEP_FRACTION * eps;
                    let size = (0..=k).map(|j| u.eval(p, eps, Alpha::dx(j)).abs() * h.powi(j as i32)).fold(0.0, f64::max);
                    let rel = (a - f).abs() / (size / h.powi(k as i32)).max(1e-300);
                    fd_err = fd_err.max(rel);
                }
            }
        }
    }
    log.check(fd_err <= 1e-4, || format!("finite-difference error {fd_err:e}"));

    let mut rk_err: f64 = 0.0;
    for f in [Nonlinearity::Dissipative, Nonlinearity::SqrtExp, Nonlinearity::LogGrowth] {
        for u0 in [-0.5, 0.0, 0.3, 1.0, 10.0, 1e3] {
            for t in [0.25, 0.5, 1.0] {
                let (c, r) = (f.flow(u0, t), rk4_flow(f, u0, t));
                rk_err = rk_err.max((c - r).abs() / c.abs().max(1e-12));
            }
        }
    }
    for name in ["dissipative", "sqrt_exp_delta", "log_growth_m2"] {
        let s = run(&bundled(name));
        for r in rows(&s, "flow_check") {
            rk_err = rk_err.max(r.num("max_relative_error").unwrap_or(f64::INFINITY));
        }
    }
    log.check(rk_err <= 1e-4, || format!("closed form vs RK4 {rk_err:e}"));

    let same = byte_identical_runs();
    log.check(same.is_ok(), || same.clone().unwrap_err());
    log.finish(format!("fit {fit_err:.1e}, FD {fd_err:.1e}, RK4 {rk_err:.1e}, {}", same.unwrap_or_default()))
}

fn byte_identical_runs() -> Result<String, String> {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = Command::new(env!("CARGO_BIN_EXE_asymptospec"))
            .args(["experiment", "delta_powers", "--ladder", "0.0078125,0.5,9", "--out"])
            .arg(d.path())
            .env("SOURCE_DATE_EPOCH", "1700000000")
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("CLI run failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    let files = |p: &Path| -> Vec<(String, Vec<u8>)> {
        let mut v: Vec<_> = fs::read_dir(p)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        v.sort();
        v
    };
    let (a, b) = (files(dirs[0].path()), files(dirs[1].path()));
    if a.is_empty() || a != b {
        return Err("CLI outputs differ between runs".into());
    }
    Ok(format!("{} CLI files byte-identical", a.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("delta-power spectra", delta_powers),
        ("ε-power nets", eps_powers),
        ("dissipative transport", dissipative),
        ("sqrt_exp transport", sqrt_exp),
        ("log transport", log_growth),
        ("blow-up", blowup),
        ("strength readout", strength),
        ("sum law", sum_law),
        ("frequential m-independence", wavefront),
        ("property suites", properties),
        ("numerical hygiene", hygiene),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(d) => println!("criterion {n:>2} PASS {name} ({secs:.0}s): {d}"),
            Err(e) => {
                failed += 1;
                println!("criterion {n:>2} FAIL {name} ({secs:.0}s): {e}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
