//! Low-beta rotor with the positivity-preserving limiter. Prints the energy
//! error and the extreme values of density and pressure.
//!
//! cargo run --release --example rotor -- [n] [t_final]

use pif_mhd::driver::{run, RunConfig};
use pif_mhd::problems::ProblemId;

fn main() -> pif_mhd::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let n = args.first().map_or(200, |&v| v as usize);
    let t_final = args.get(1).copied().unwrap_or(0.27);
    let cfg = RunConfig::new(ProblemId::Rotor).with_mesh(&[n, n]).with_t_final(t_final);
    let out = run(&cfg)?;
    let s = &out.summary;
    println!(
        "rotor {n}x{n} t={:.3}: steps {}, min rho {:.3e}, min p {:.3e}, energy error {:.3e}, min theta {:.6}",
        s.t, s.steps, s.min_rho, s.min_p, s.energy_error, s.min_theta
    );
    Ok(())
}
