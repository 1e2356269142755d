//! Builds a (3, 6) PEG code over Z_7 and round-trips it through the text format.

use lee_ldpc::code::{peg_construct, sample_regular_ensemble, CodewordSampler, ParityCheckCode};
use lee_ldpc::ring::RingContext;
use lee_ldpc::rng::seeded;

fn main() -> lee_ldpc::Result<()> {
    let ctx = RingContext::new(7)?;
    let mut rng = seeded(5);
    let peg = peg_construct(&ctx, 256, 3, 6, &mut rng)?;
    let random = sample_regular_ensemble(&ctx, 256, 3, 6, &mut rng)?;
    println!("PEG code:      {} x {}, girth {:?}", peg.m(), peg.n(), peg.girth());
    println!("ensemble draw: {} x {}, girth {:?}", random.m(), random.n(), random.girth());

    let sampler = CodewordSampler::new(&peg);
    let x = sampler.sample(&mut rng);
    println!("sampled codeword has zero syndrome: {}", peg.is_codeword(&x));

    let path = std::env::temp_dir().join("peg_q7_n256.txt");
    peg.write(&path)?;
    let back = ParityCheckCode::read(&path)?;
    println!("text round trip identical: {}", back == peg);
    Ok(())
}
