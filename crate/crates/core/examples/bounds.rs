//! Shannon limits and finite-length benchmarks at rate 1/2.

use lee_ldpc::bounds::{bounds_table, shannon_limit, NormalApproximation};
use lee_ldpc::channel::LeeChannelSpec;
use lee_ldpc::ring::RingContext;

fn main() -> lee_ldpc::Result<()> {
    for q in [5, 7, 8] {
        let ctx = RingContext::new(q)?;
        println!("q={q}: Shannon limit at R=1/2 is delta = {:.4}", shannon_limit(&ctx, 0.5)?);
    }

    let ctx = RingContext::new(7)?;
    let n = 256;
    let deltas = [0.15, 0.2, 0.25, 0.3];
    println!("\nq=7, n={n}, R=1/2");
    println!("{:>6} {:>12} {:>12} {:>12}", "delta", "rcu_cw", "rcu_ml", "na_bler");
    for row in bounds_table(&ctx, n, 0.5, &deltas)? {
        println!("{:>6} {:>12.4e} {:>12.4e} {:>12.4e}", row.delta, row.rcu_cw, row.rcu_ml, row.na_bler);
    }

    let spec = LeeChannelSpec::from_delta(&ctx, 0.2)?;
    let na = NormalApproximation::new(&spec);
    println!("\nrate achievable at delta=0.2, n={n}, BLER 1e-3: {:.4}", na.rate(n, 1e-3)?);
    Ok(())
}
