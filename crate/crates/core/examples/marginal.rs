//! The Lee channel noise law and the constant-weight channel it approximates.

use lee_ldpc::channel::{marginal_phi_star, LeeChannelSpec};
use lee_ldpc::pmf::{tv_distance, Pmf};
use lee_ldpc::ring::RingContext;
use lee_ldpc::rng::seeded;
use lee_ldpc::sphere::{target_weight, SphereCounter};

fn main() -> lee_ldpc::Result<()> {
    let ctx = RingContext::new(8)?;
    let delta = 0.191;
    let spec = LeeChannelSpec::from_delta(&ctx, delta)?;
    println!("q = 8, delta = {delta}: beta = {:.6}", spec.beta());
    let phi = marginal_phi_star(&ctx, delta)?;
    for (a, p) in phi.as_slice().iter().enumerate() {
        println!("  phi*[{a}] = {p:.6}");
    }

    // Compositions of uniformly drawn constant-weight errors approach phi*.
    let n = 256;
    let t = target_weight(n, delta);
    let counter = SphereCounter::new(&ctx, n);
    println!("sphere of weight {t} in Z_8^{n} holds {:.3e} vectors", lee_ldpc::sphere::ln_big(&counter.sphere_size(t)?).exp());
    let mut rng = seeded(1);
    let mut hist = vec![0.0; ctx.q()];
    for _ in 0..1000 {
        for a in counter.sample(t, &mut rng)? {
            hist[a] += 1.0;
        }
    }
    let empirical = Pmf::from_weights(hist)?;
    println!("TV(empirical, phi*) over 1000 draws = {:.5}", tv_distance(empirical.as_slice(), phi.as_slice())?);
    Ok(())
}
