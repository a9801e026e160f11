//! Convergence study of the smooth Alfvén wave against its exact solution.
//!
//! cargo run --release --example alfven_convergence -- [2d|3d] [levels] [t_final] [fixed|halved]

use pif_mhd::driver::{converge, doubling_meshes, CflSchedule, RunConfig};
use pif_mhd::output::convergence_csv;
use pif_mhd::problems::ProblemId;

fn main() -> pif_mhd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let three_d = args.first().is_some_and(|a| a == "3d");
    let levels: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let t_final: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let schedule = match args.get(3).map(String::as_str) {
        Some("halved") => CflSchedule::HalvedPerDoubling(0.5),
        _ => CflSchedule::Fixed(0.5),
    };
    let (id, base) = if three_d {
        (ProblemId::Alfven3d, vec![16, 32, 32])
    } else {
        (ProblemId::Alfven2d, vec![32, 64])
    };
    let cfg = RunConfig::new(id).with_t_final(t_final);
    let rows = converge(&cfg, &doubling_meshes(&base, levels), schedule)?;
    print!("{}", convergence_csv(&rows));
    Ok(())
}
