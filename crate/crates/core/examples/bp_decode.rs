//! Sends a random codeword over the Lee channel and decodes it with BP.

use lee_ldpc::channel::LeeChannelSpec;
use lee_ldpc::code::{peg_construct, CodewordSampler};
use lee_ldpc::decoder::BpDecoder;
use lee_ldpc::ring::RingContext;
use lee_ldpc::rng::seeded;

fn main() -> lee_ldpc::Result<()> {
    let ctx = RingContext::new(7)?;
    let mut rng = seeded(11);
    let code = peg_construct(&ctx, 256, 3, 6, &mut rng)?;
    let x = CodewordSampler::new(&code).sample(&mut rng);
    let mut decoder = BpDecoder::new(&code);
    for delta in [0.15, 0.25, 0.35] {
        let spec = LeeChannelSpec::from_delta(&ctx, delta)?;
        let y = spec.transmit(&x, &mut rng);
        let errors = x.iter().zip(&y).filter(|(a, b)| a != b).count();
        let out = decoder.decode_received(&y, &spec, 100, &mut rng)?;
        println!(
            "delta={delta}: {errors} symbol errors in, success={}, iterations={}",
            out.estimate == x,
            out.iterations
        );
    }
    Ok(())
}
