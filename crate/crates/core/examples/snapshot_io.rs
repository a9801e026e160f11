//! Runs a short Orszag-Tang simulation, writes a snapshot and the plot
//! exports, and reads the snapshot back.
//!
//! cargo run --release --example snapshot_io -- [out_dir]

use std::path::PathBuf;

use pif_mhd::driver::{run, RunConfig};
use pif_mhd::output::{snapshot_min_pressure, snapshot_name, Snapshot};
use pif_mhd::problems::ProblemId;

fn main() -> pif_mhd::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "ot_output".into()));
    let mut cfg = RunConfig::new(ProblemId::OrszagTang).with_mesh(&[48, 48]).with_t_final(0.5);
    cfg.out_dir = Some(dir.clone());
    cfg.snapshots = 2;
    let out = run(&cfg)?;
    println!("finished at t = {} after {} steps", out.summary.t, out.summary.steps);
    let snap = Snapshot::read(&dir.join(snapshot_name(2)))?;
    println!(
        "read {}: t = {}, dims {:?}, components {:?}, min p {:.4}",
        snapshot_name(2),
        snap.t,
        snap.dims,
        snap.components,
        snapshot_min_pressure(&snap, cfg.gamma)
    );
    println!("wrote series.csv, summary.txt, density/pressure/bmag/umag slices and schlieren grid to {}", dir.display());
    Ok(())
}
