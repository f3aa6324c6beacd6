//! Valuation fits and class verdicts on seeded random nets.

use asymptospec::asymptotics::{
    classify, fit_valuation, is_moderate, ClassifyOptions, FitVerdict, RegularitySequenceFamily, DEFAULT_TAIL,
};
use asymptospec::corpus::random_spec;
use asymptospec::nets::{mul, DomainBox, EpsLadder, Mollifier};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn samples(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    EpsLadder::default().values().iter().map(|&e| (e, f(e))).collect()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0xc1a55),
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn fits_are_exact_on_powers_and_scale_equivariant(b in -5.0f64..5.0, c in 1e-6f64..1e6) {
        let fit = fit_valuation(&samples(|e| e.powf(b)), DEFAULT_TAIL).unwrap();
        prop_assert!((fit.slope - b).abs() <= 1e-10, "{b}: {}", fit.slope);
        prop_assert_eq!(fit.verdict, FitVerdict::PowerLike);
        let scaled = fit_valuation(&samples(|e| c * e.powf(b)), DEFAULT_TAIL).unwrap();
        prop_assert!((scaled.slope - fit.slope).abs() <= 1e-9);
        prop_assert!((scaled.intercept - fit.intercept - c.ln()).abs() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(config(20))]

    #[test]
    fn class_verdicts_form_a_chain(seed in any::<u64>(), lo in -0.9f64..0.0, width in 0.1f64..0.9) {
        let spec = random_spec(&mut ChaCha8Rng::seed_from_u64(seed));
        let u = spec.build(&Mollifier::standard()).unwrap();
        let k = DomainBox::interval(lo, (lo + width).min(0.9)).unwrap();
        let v = classify(&u, &k, 2, RegularitySequenceFamily::Bounded, &EpsLadder::default(), &ClassifyOptions::default()).unwrap();
        let chain = [v.negligible, v.slow_scale, v.g_infinity, v.g_r, v.moderate];
        for w in chain.windows(2) {
            prop_assert!(!w[0] || w[1], "{spec:?} on {k}: {chain:?}");
        }
    }

    #[test]
    fn product_exponents_are_subadditive(su in any::<u64>(), sv in any::<u64>()) {
        let phi = Mollifier::standard();
        let u = random_spec(&mut ChaCha8Rng::seed_from_u64(su)).build(&phi).unwrap();
        let v = random_spec(&mut ChaCha8Rng::seed_from_u64(sv)).build(&phi).unwrap();
        let k = DomainBox::interval(-0.75, 0.75).unwrap();
        let (ladder, opts) = (EpsLadder::default(), ClassifyOptions::default());
        let growth = |w| -> f64 {
            let m = is_moderate(w, &k, 0, &ladder, &opts).unwrap();
            (-m.slopes[0]).max(0.0)
        };
        let (nu, nv, nuv) = (growth(&u), growth(&v), growth(&mul(&u, &v).unwrap()));
        prop_assert!(nuv <= nu + nv + 0.1, "{}·{}: {nuv} > {nu} + {nv}", u.label(), v.label());
    }
}
