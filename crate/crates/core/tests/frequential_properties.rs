//! Propagation, window invariance and projection of wave front estimates.

use asymptospec::asymptotics::{classify, ClassifyOptions, RegularitySequenceFamily};
use asymptospec::frequential::{wavefront_estimate, Direction, FourierOptions, WaveFrontEstimate};
use asymptospec::nets::{derive, mul, Alpha, DomainBox, EpsLadder, GeneralizedNet, Mollifier, NetSpec, Smooth};

const CELL: f64 = 0.25;

fn grid() -> Vec<f64> {
    vec![-0.25, 0.0, 0.25]
}

/// Ten rungs down to 2^-13: enough for the eight-point tail at a fraction of the cost.
fn ladder() -> EpsLadder {
    EpsLadder::geometric(1.0 / 16.0, 0.5, 10).unwrap()
}

fn corpus() -> Vec<GeneralizedNet> {
    ["delta", "delta:m=2,at=0.25", "heaviside", "kink:at=-0.25", "delta_derivative:k=1", "gaussian:embed=1"]
        .iter()
        .map(|s| s.parse::<NetSpec>().unwrap().build(&Mollifier::standard()).unwrap())
        .collect()
}

fn wf(u: &GeneralizedNet, opts: &FourierOptions) -> WaveFrontEstimate {
    let est = wavefront_estimate(u, &grid(), &ladder(), &RegularitySequenceFamily::Bounded, 8, opts).unwrap();
    assert!(est.records.iter().all(|r| r.error.is_none()), "{}: {:?}", u.label(), est.records);
    est
}

/// Pairs of `a` with no pair of the same direction within one cell in `b`.
fn outside(a: &WaveFrontEstimate, b: &WaveFrontEstimate) -> Vec<(f64, Direction)> {
    a.pairs
        .iter()
        .copied()
        .filter(|&(x, d)| !b.pairs.iter().any(|&(y, e)| e == d && (x - y).abs() <= CELL + 1e-12))
        .collect()
}

#[test]
fn derivatives_and_smooth_factors_propagate_inside() {
    let opts = FourierOptions::default();
    let g = NetSpec::Smooth {
        f: Smooth::Gaussian {
            amp: 1.5,
            center: 0.1,
            width: 0.4,
        },
        embed: true,
    }
    .build(&Mollifier::standard())
    .unwrap();
    for u in corpus() {
        let base = wf(&u, &opts);
        let du = wf(&derive(&u, Alpha::dx(1)).unwrap(), &opts);
        assert!(outside(&du, &base).is_empty(), "∂({}): {:?} vs {:?}", u.label(), du.pairs, base.pairs);
        let gu = wf(&mul(&g, &u).unwrap(), &opts);
        assert!(outside(&gu, &base).is_empty(), "g·{}: {:?} vs {:?}", u.label(), gu.pairs, base.pairs);
    }
}

#[test]
fn verdicts_survive_halving_the_window() {
    let full = FourierOptions::default();
    let half = FourierOptions {
        window_width: 0.5 * full.window_width,
        ..full
    };
    for u in corpus() {
        let (a, b) = (wf(&u, &full), wf(&u, &half));
        for x in grid() {
            for d in Direction::BOTH {
                assert_eq!(a.contains(x, d), b.contains(x, d), "{} at ({x}, {d})", u.label());
            }
        }
    }
}

#[test]
fn projection_matches_the_g_infinity_failures() {
    let opts = FourierOptions::default();
    let copts = ClassifyOptions::default();
    for u in corpus() {
        let est = wf(&u, &opts);
        let failing: Vec<f64> = grid()
            .into_iter()
            .filter(|&x| {
                let k = DomainBox::interval(x - 0.125, x + 0.125).unwrap();
                !classify(&u, &k, 3, RegularitySequenceFamily::Bounded, &ladder(), &copts)
                    .unwrap()
                    .g_infinity
            })
            .collect();
        let near = |a: &[f64], b: &[f64]| a.iter().all(|x| b.iter().any(|y| (x - y).abs() <= CELL + 1e-12));
        let proj = est.projection();
        assert!(near(&proj, &failing) && near(&failing, &proj), "{}: {proj:?} vs {failing:?}", u.label());
    }
}
