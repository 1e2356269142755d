use lee_ldpc::de::smp_threshold;
use lee_ldpc::ring::RingContext;

fn main() {
    for (q, v, c) in [(5, 3, 6), (5, 4, 8), (7, 3, 6), (7, 4, 8), (8, 3, 6), (8, 4, 8)] {
        let ctx = RingContext::new(q).unwrap();
        let t = smp_threshold(&ctx, v, c, 1000, 1e-5).unwrap();
        println!("q={q} ({v},{c}) delta*_SMP = {:.4}", t.delta);
    }
}
