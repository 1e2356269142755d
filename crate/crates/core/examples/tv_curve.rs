//! How far the check-to-variable message law is from a q-SC, per iteration.

use lee_ldpc::channel::LeeChannelSpec;
use lee_ldpc::de::qsc_approximation_gap;
use lee_ldpc::ring::RingContext;

fn main() -> lee_ldpc::Result<()> {
    for q in [5, 7, 8] {
        let ctx = RingContext::new(q)?;
        let spec = LeeChannelSpec::from_delta(&ctx, 0.191)?;
        let gap = qsc_approximation_gap(&spec, 3, 6, 12)?;
        let shown: Vec<String> = gap.iter().map(|t| format!("{t:.2e}")).collect();
        println!("q={q}: {}", shown.join(" "));
    }
    Ok(())
}
