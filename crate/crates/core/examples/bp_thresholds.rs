use lee_ldpc::de::{bp_de_threshold, BpDeConfig};
use lee_ldpc::ring::RingContext;

fn main() {
    let cfg = BpDeConfig::default();
    for (q, v, c) in [(5, 3, 6), (5, 4, 8), (7, 3, 6), (7, 4, 8), (8, 3, 6), (8, 4, 8)] {
        let ctx = RingContext::new(q).unwrap();
        let start = std::time::Instant::now();
        let t = bp_de_threshold(&ctx, v, c, &cfg).unwrap();
        println!(
            "q={q} ({v},{c}) delta*_BP = {:.4}  [{:.1?}, {} evaluations]",
            t.delta,
            start.elapsed(),
            t.evaluations.len()
        );
    }
}
