//! Cloud-shock interaction on a coarse mesh: tracks the shock front along
//! the lower edge of the domain.
//!
//! cargo run --release --example cloud_shock -- [n] [t_final]

use pif_mhd::diagnostics::row_near_y;
use pif_mhd::driver::{RunConfig, Simulation};
use pif_mhd::problems::ProblemId;

fn front(q: &pif_mhd::mesh::Field<8>) -> f64 {
    // Rightmost cell whose pressure exceeds the pre-shock value noticeably.
    let row = row_near_y(q, q.grid().center(1, 0));
    row.iter()
        .filter(|(_, s)| pif_mhd::physics::pressure_raw(s, 5.0 / 3.0) > 10.0)
        .map(|(x, _)| *x)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn main() -> pif_mhd::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let n = args.first().map_or(128, |&v| v as usize);
    let t_final = args.get(1).copied().unwrap_or(0.06);
    let cfg = RunConfig::new(ProblemId::CloudShock2d).with_mesh(&[n, n]);
    let mut sim = Simulation::new(cfg)?;
    for k in 0..=3 {
        let t = t_final * k as f64 / 3.0;
        sim.advance_to(t, |_, _| {})?;
        let s = sim.summary(0.0);
        println!(
            "t={t:.3}: front x = {:.4}, min p {:.3e}, max rho {:.3}",
            front(&sim.q),
            s.min_p,
            s.max_rho
        );
    }
    Ok(())
}
