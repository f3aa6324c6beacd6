use super::*;
use crate::nets::{embed_classical, make_delta, smooth_net, weight, Classical, DomainBox, EpsWeight, Mollifier, Smooth};

fn ladder() -> EpsLadder {
    EpsLadder::default()
}

fn ce(u: &GeneralizedNet, x: f64, top: TargetTopology) -> CriticalExponent {
    critical_exponent(u, &AsymptoticScale::Power, [x, 0.0], &top, &ladder(), &SpectrumOptions::default()).unwrap()
}

#[test]
fn delta_power_radii() {
    let phi = Mollifier::standard();
    for m in 1..=3u32 {
        let d = make_delta(m, &phi).unwrap();
        let c0 = ce(&d, 0.0, TargetTopology::c(0));
        let c1 = ce(&d, 0.0, TargetTopology::c(1));
        let dp = ce(&d, 0.0, TargetTopology::dprime());
        eprintln!("m={m} C0 {:?} {:?} | C1 {:?} {:?} | D' {:?} {:?}", c0.radius, c0.endpoint, c1.radius, c1.endpoint, dp.radius, dp.endpoint);
        assert!((c0.radius.value().unwrap() - m as f64).abs() <= 0.15);
        assert_eq!(c0.endpoint, Endpoint::Unattained);
        assert!((c1.radius.value().unwrap() - (m + 1) as f64).abs() <= 0.15);
        assert_eq!(c1.endpoint, Endpoint::Unattained);
        if m == 1 {
            assert_eq!(dp.radius, FiberRadius::Empty);
        } else {
            assert!((dp.radius.value().unwrap() - (m - 1) as f64).abs() <= 0.15);
            assert_eq!(dp.endpoint, Endpoint::Attained);
        }
    }
}

#[test]
fn example_four_radii() {
    let dom = DomainBox::interval(-1.0, 1.0).unwrap();
    let f = smooth_net(Smooth::Sin { amp: 1.0, freq: 1.0, phase: 1.0 }, dom).unwrap();
    let u = weight(&f, EpsWeight::Power { b: -1.0 }).unwrap();
    let v = weight(&f, EpsWeight::PowerLog { b: -1.0, k: 1.0 }).unwrap();
    for top in [TargetTopology::c(0), TargetTopology::c(2)] {
        let a = ce(&u, 0.1, top.clone());
        let b = ce(&v, 0.1, top.clone());
        eprintln!("{top}: u {:?} {:?} | v {:?} {:?}", a.radius, a.endpoint, b.radius, b.endpoint);
        assert!((a.radius.value().unwrap() - 1.0).abs() <= 0.1);
        assert_eq!(a.endpoint, Endpoint::Attained);
        assert!((b.radius.value().unwrap() - 1.0).abs() <= 0.15);
        assert_eq!(b.endpoint, Endpoint::Unattained);
    }
}

#[test]
fn smooth_embedding_has_empty_fiber() {
    let dom = DomainBox::interval(-1.0, 1.0).unwrap();
    let f = embed_classical(&Classical::Smooth { f: Smooth::Gaussian { amp: 2.0, center: 0.1, width: 0.3 } }, &Mollifier::standard(), dom).unwrap();
    for top in [TargetTopology::c(0), TargetTopology::c(2), TargetTopology::dprime()] {
        assert_eq!(ce(&f, 0.0, top).radius, FiberRadius::Empty);
    }
}

#[test]
fn supports_and_projection() {
    let phi = Mollifier::standard();
    let grid = interior_grid(-0.5, 0.5, 9).unwrap();
    let s = AsymptoticScale::Power;
    let opts = SpectrumOptions::default();
    let d1 = make_delta(1, &phi).unwrap();
    let d2 = make_delta(2, &phi).unwrap();
    assert!(singular_support(&d1, &s, &grid, &TargetTopology::dprime(), &ladder(), &opts).unwrap().is_empty());
    let supp = singular_support(&d2, &s, &grid, &TargetTopology::dprime(), &ladder(), &opts).unwrap();
    assert_eq!(supp, vec![[0.0, 0.0]]);
    let supp = singular_support(&d1, &s, &grid, &TargetTopology::c(0), &ladder(), &opts).unwrap();
    assert_eq!(supp, vec![[0.0, 0.0]]);
    let spec = singular_spectrum(&d2, &s, &grid, &TargetTopology::c(0), &ladder(), &opts).unwrap();
    assert_eq!(spec.projection(), singular_support(&d2, &s, &grid, &TargetTopology::c(0), &ladder(), &opts).unwrap());
    assert!(monotone_fiber_violations(&spec).is_empty(), "{:?}", monotone_fiber_violations(&spec));
}

#[test]
fn convergence_examples() {
    let phi = Mollifier::standard();
    let opts = ConvergenceOptions::default();
    let v = DomainBox::interval(-0.25, 0.25).unwrap();
    let d = make_delta(1, &phi).unwrap();
    let r = test_convergence(&d, &AsymptoticScale::Power, 2.0, &v, &TargetTopology::c(0), &ladder(), &opts).unwrap();
    assert_eq!(r.status, ConvergenceStatus::ConvergesToZero);
    let d2 = make_delta(2, &phi).unwrap();
    let r = test_convergence(&d2, &AsymptoticScale::Power, 1.0, &v, &TargetTopology::dprime(), &ladder(), &opts).unwrap();
    assert_eq!(r.status, ConvergenceStatus::ConvergesNonzero);
    // ∫ φ² against the centred bump: ψ(0) = 1
    let mass: f64 = (0..20000).map(|i| { let y = -1.0 + (i as f64 + 0.5) / 10000.0; phi.value(y).powi(2) / 10000.0 }).sum();
    assert!((r.limit_norm.unwrap() - mass).abs() <= 1e-6 * mass, "{:?} vs {mass}", r.limit_norm);
    assert!(!r.diagnostics.is_empty());
}

#[test]
fn power_and_product_bounds() {
    let phi = Mollifier::standard();
    let d = make_delta(1, &phi).unwrap();
    let grid = vec![[0.0, 0.0], [0.4, 0.0]];
    let s = AsymptoticScale::Power;
    let opts = SpectrumOptions::default();
    let rows = check_power_bound(&d, 3, &s, &grid, &TargetTopology::c(0), &ladder(), &opts, 0.15).unwrap();
    assert!(rows.iter().all(|r| r.ok), "{rows:?}");
    let rows = check_nonlinear_bounds(&d, &d, &s, &grid, &TargetTopology::c(0), &ladder(), &opts, 0.15).unwrap();
    assert!(rows.iter().all(|r| r.ok), "{rows:?}");
    assert_eq!(rows[0].region, ProductRegion::Both);
    assert!((rows[0].r_product.value().unwrap() - 2.0).abs() < 0.15);
    assert!(check_power_bound(&d, 2, &s, &grid, &TargetTopology::dprime(), &ladder(), &opts, 0.15).is_err());
}

