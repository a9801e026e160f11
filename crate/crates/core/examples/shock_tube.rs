//! Rotated shock tube with and without constrained transport. Prints the
//! largest deviation of the normal field from 0.75 along y = 0.
//!
//! cargo run --release --example shock_tube -- [nx ny] [t_final]

use pif_mhd::diagnostics::{b_perp_deviation, row_near_y};
use pif_mhd::driver::{run, RunConfig};
use pif_mhd::problems::{rotation_angle, ProblemId};

fn main() -> pif_mhd::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let mesh = match args.as_slice() {
        [nx, ny, ..] => vec![*nx as usize, *ny as usize],
        _ => vec![180, 150],
    };
    let t_final = args.get(2).copied().unwrap_or(0.3);
    let phi = rotation_angle();
    for ct in [true, false] {
        let cfg = RunConfig::new(ProblemId::ShockTube2d)
            .with_mesh(&mesh)
            .with_t_final(t_final)
            .with_ct(ct);
        let out = run(&cfg)?;
        let dev = b_perp_deviation(&out.sim.q, phi, 0.75, 0.0);
        println!("ct {:3}: steps {:4}  max|B_perp - 0.75| = {dev:.3e}", if ct { "on" } else { "off" }, out.summary.steps);
        if ct {
            println!("x,rho,B_perp");
            for (x, s) in row_near_y(&out.sim.q, 0.0).iter().step_by(8) {
                println!("{x:.4},{:.5},{:.5}", s[0], s[5] * phi.cos() + s[6] * phi.sin());
            }
        }
    }
    Ok(())
}
