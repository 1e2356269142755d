//! Block error rates of a short code, joined with the finite-length bounds.

use lee_ldpc::bounds::bounds_table;
use lee_ldpc::sim::{compare_to_benchmarks, write_merged_csv, SimConfig, Simulation};

fn main() -> lee_ldpc::Result<()> {
    let config = SimConfig::from_json(
        r#"{
            "code": {"kind": "peg", "q": 7, "n": 128, "dv": 3, "dc": 6, "seed": 1},
            "channel": "constant_weight",
            "deltas": [0.18, 0.22, 0.26],
            "decoder": {"kind": "bp", "max_iter": 50},
            "max_frames": 2000,
            "max_errors": 50,
            "seed": 7
        }"#,
    )?;
    let sim = Simulation::new(config.clone())?;
    let records = sim.run()?;
    let code = sim.code();
    let bounds = bounds_table(code.ctx(), code.n(), code.design_rate(), &config.deltas)?;
    let merged = compare_to_benchmarks(&records, &bounds)?;
    write_merged_csv(std::io::stdout().lock(), config.seed, &merged)?;
    Ok(())
}
