//! SMP decoding with the extrinsic error probabilities taken from density
//! evolution.

use lee_ldpc::channel::LeeChannelSpec;
use lee_ldpc::code::{peg_construct, CodewordSampler};
use lee_ldpc::de::smp_xi_schedule;
use lee_ldpc::decoder::SmpDecoder;
use lee_ldpc::ring::RingContext;
use lee_ldpc::rng::seeded;

fn main() -> lee_ldpc::Result<()> {
    let ctx = RingContext::new(7)?;
    let mut rng = seeded(3);
    let code = peg_construct(&ctx, 256, 3, 6, &mut rng)?;
    let x = CodewordSampler::new(&code).sample(&mut rng);
    let max_iter = 50;
    for delta in [0.08, 0.12, 0.2] {
        let spec = LeeChannelSpec::from_delta(&ctx, delta)?;
        let schedule = smp_xi_schedule(&ctx, 3, 6, delta, max_iter)?;
        let y = spec.transmit(&x, &mut rng);
        let out = SmpDecoder::new(&code).decode(&y, &spec, &schedule, max_iter, &mut rng)?;
        println!(
            "delta={delta}: xi(1)={:.4}, success={}, iterations={}",
            schedule.xi(1),
            out.estimate == x,
            out.iterations
        );
    }
    Ok(())
}
