//! Orszag-Tang vortex. Writes snapshots and plot exports when an output
//! directory is given.
//!
//! cargo run --release --example orszag_tang -- [n] [t_final] [ct on|off] [out_dir]

use std::path::PathBuf;

use pif_mhd::driver::{run, RunConfig};
use pif_mhd::output::summary_text;
use pif_mhd::problems::ProblemId;

fn main() -> pif_mhd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(96);
    let t_final: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let ct = args.get(2).map_or(true, |s| s != "off");
    let mut cfg = RunConfig::new(ProblemId::OrszagTang)
        .with_mesh(&[n, n])
        .with_t_final(t_final)
        .with_ct(ct);
    if let Some(dir) = args.get(3) {
        cfg.out_dir = Some(PathBuf::from(dir));
        cfg.snapshots = 6;
    }
    match run(&cfg) {
        Ok(out) => print!("{}", summary_text(&out.summary)),
        Err(e) => println!("run stopped: {e}"),
    }
    Ok(())
}
