use super::*;

fn ladder() -> EpsLadder {
    EpsLadder::default()
}

fn opts() -> SpectrumOptions {
    SpectrumOptions::default()
}

#[test]
fn delta_power_table() {
    let tops = [TargetTopology::c(0), TargetTopology::c(1), TargetTopology::dprime()];
    let rows = run_delta_powers(&[1, 2, 3], &tops, &ladder(), &opts()).unwrap();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!(r.pass, "{r:?}");
    }
    let r = rows.iter().find(|r| r.m == 3 && r.topology == "C1").unwrap();
    assert_eq!(r.expected_radius, Some(4.0));
    assert!(run_delta_powers(&[5], &tops, &ladder(), &opts()).is_err());
}

#[test]
fn dissipative_transport_removes_the_singularity() {
    let grid: Vec<Point> = [0.25, 1.0].iter().flat_map(|&t| [[0.0, t], [0.5, t]]).collect();
    let run = run_transport(
        Nonlinearity::Dissipative,
        InitialData::DeltaPower { m: 2 },
        1.5,
        &grid,
        &TargetTopology::dprime(),
        &ladder(),
        &opts(),
    )
    .unwrap();
    assert!((run.initial.radius.value().unwrap() - 1.0).abs() <= 0.15, "{:?}", run.initial);
    for p in &run.solution.points {
        assert_eq!(p.radius, FiberRadius::Empty, "{p:?}");
    }
    assert!(run.check.max_relative_error <= 1e-4);
}

#[test]
fn sqrt_exp_transport() {
    let grid = [[0.0, 0.5], [0.0, 1.0]];
    let d = run_transport(
        Nonlinearity::SqrtExp,
        InitialData::DeltaPower { m: 1 },
        1.5,
        &grid,
        &TargetTopology::dprime(),
        &ladder(),
        &opts(),
    )
    .unwrap();
    assert!(d.initial.radius.is_empty());
    assert!(d.solution.points.iter().all(|p| p.radius.is_empty()), "{:?}", d.solution);
    let dd = run_transport(
        Nonlinearity::SqrtExp,
        InitialData::DeltaDerivative { k: 1 },
        1.5,
        &grid,
        &TargetTopology::dprime(),
        &ladder(),
        &opts(),
    )
    .unwrap();
    for p in &dd.solution.points {
        let r = p.radius.value().unwrap();
        eprintln!("sqrt_exp δ′ at {:?}: R = {r} {:?}", p.x, p.endpoint);
        assert!((r - 1.0).abs() <= 0.15);
        assert_eq!(p.endpoint, Endpoint::Attained);
    }
}

#[test]
fn log_transport_amplifies() {
    for m in [1u32, 2] {
        let grid: Vec<Point> = [0.25, 0.5, 1.0].iter().map(|&t| [0.0, t]).collect();
        let run = run_transport(
            Nonlinearity::LogGrowth,
            InitialData::DeltaPower { m },
            1.5,
            &grid,
            &TargetTopology::dprime(),
            &ladder(),
            &opts(),
        )
        .unwrap();
        let mut prev = 0.0;
        for p in &run.solution.points {
            let r = p.radius.value().unwrap();
            let expect = log_growth_expectation(m, p.x[1]);
            eprintln!("log m={m} t={}: R = {r}, expected {expect}", p.x[1]);
            assert!((r - expect).abs() <= 0.1 * expect, "m={m} t={}: {r} vs {expect}", p.x[1]);
            assert!(r > prev);
            prev = r;
        }
    }
}

#[test]
fn blowup_spectrum() {
    let grid = [[0.0, 0.25], [0.0, 0.5], [0.1, 1.2], [0.5, 1.5], [0.1, 1.5], [0.5, 1.2], [-0.5, 0.5], [-0.5, 1.5]];
    let res = run_blowup(&BlowupProblem::default(), &grid, &ladder(), &opts()).unwrap();
    for p in &res.points {
        eprintln!("blowup {:?}: {:?} {:?}", p.x, p.radius, p.endpoint);
        let (x, t) = (p.x[0], p.x[1]);
        if x < 0.0 {
            assert!(p.radius.is_empty());
        } else if t < 1.0 {
            assert!(p.radius.sup() <= 0.1);
            assert!(!p.radius.is_empty());
        } else {
            assert!((p.radius.value().unwrap() - 0.5).abs() <= 0.15);
        }
    }
}

#[test]
fn sum_law_rows() {
    let pairs = [
        (WaveData::DeltaDerivative { k: 0 }, WaveData::DeltaDerivative { k: 1 }),
        (WaveData::DeltaPower { m: 2 }, WaveData::DeltaPower { m: 1 }),
    ];
    let rows = run_sum_law(&pairs, 1.25, &ladder(), &opts()).unwrap();
    assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    assert_eq!(rows[0].strength, Some(3));
    assert_eq!(rows[1].expected, 3.0);
}
