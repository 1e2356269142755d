//! Cross-module checks against independent computations.

use lee_ldpc::bounds::{rcu_constant_weight, rcu_memoryless, total_weight_pmf};
use lee_ldpc::channel::LeeChannelSpec;
use lee_ldpc::code::peg_construct;
use lee_ldpc::de::{smp_de_run, smp_threshold};
use lee_ldpc::ring::RingContext;
use lee_ldpc::rng::seeded;

/// Averages the constant-weight bound over sampled noise weights and
/// accepts at four standard errors of that very estimator.
#[test]
fn rcu_memoryless_against_sampled_weights() {
    let ctx = RingContext::new(5).unwrap();
    let (n, rate) = (32, 0.5);
    let spec = LeeChannelSpec::from_delta(&ctx, 0.15).unwrap();
    let exact = rcu_memoryless(&ctx, n, rate, &spec).unwrap();

    let law = total_weight_pmf(&spec, n);
    let second: f64 = law
        .iter()
        .enumerate()
        .map(|(d, p)| p * rcu_constant_weight(&ctx, n, rate, d as f64 / n as f64).unwrap().powi(2))
        .sum();
    let samples = 200_000;
    let se = ((second - exact * exact) / samples as f64).sqrt();

    let sampler = spec.noise_sampler();
    let mut rng = seeded(8);
    let mut acc = 0.0;
    for _ in 0..samples {
        let w: usize = (0..n).map(|_| ctx.weight_table()[sampler.sample(&mut rng)]).sum();
        acc += rcu_constant_weight(&ctx, n, rate, w as f64 / n as f64).unwrap();
    }
    let mc = acc / samples as f64;
    assert!((mc - exact).abs() < 4.0 * se, "exact {exact}, sampled {mc}, se {se}");
}

#[test]
fn smp_schedule_drives_the_decoder_below_threshold() {
    let ctx = RingContext::new(7).unwrap();
    let t = smp_threshold(&ctx, 3, 6, 1000, 1e-4).unwrap();
    assert!(t.report.converged);
    let spec = LeeChannelSpec::from_delta(&ctx, 0.5 * t.delta).unwrap();
    let report = smp_de_run(&spec, 3, 6, 200).unwrap();
    assert!(report.converged);
    // extrinsic error probabilities shrink monotonically on the way to zero
    let xi = report.xi_values();
    assert!(xi.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn peg_codes_have_no_four_cycles_across_rings() {
    for q in [4, 5, 7, 8] {
        let ctx = RingContext::new(q).unwrap();
        let code = peg_construct(&ctx, 128, 3, 6, &mut seeded(q as u64)).unwrap();
        assert_eq!(code.regular_degrees(), Some((3, 6)));
        assert!(code.girth().unwrap() >= 6);
    }
}
