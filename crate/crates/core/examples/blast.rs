//! Blast wave: fails in the first step without the limiter and completes
//! with it.
//!
//! cargo run --release --example blast -- [n] [2d|3d]

use pif_mhd::driver::{run, RunConfig};
use pif_mhd::problems::ProblemId;

fn main() -> pif_mhd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(128);
    let three_d = args.get(1).is_some_and(|s| s == "3d");
    let (id, mesh) = if three_d {
        (ProblemId::Blast3d, vec![n; 3])
    } else {
        (ProblemId::Blast2d, vec![n; 2])
    };
    if !three_d {
        let mut off = RunConfig::new(id).with_mesh(&mesh).with_pp(false);
        off.max_steps = Some(5);
        match run(&off) {
            Ok(o) => println!("limiter off: completed {} steps", o.summary.steps),
            Err(e) => println!("limiter off: {e}"),
        }
    }
    let out = run(&RunConfig::new(id).with_mesh(&mesh))?;
    let s = &out.summary;
    println!(
        "limiter on: t={:.4} after {} steps, min rho {:.3e}, min p {:.3e}, energy error {:.3e}, min theta {:.6}",
        s.t, s.steps, s.min_rho, s.min_p, s.energy_error, s.min_theta
    );
    Ok(())
}
