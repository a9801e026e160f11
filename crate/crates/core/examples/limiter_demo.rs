//! The positivity limiter on a single cell: a high-order update that would
//! drive density and pressure negative is blended toward the first-order
//! Lax-Friedrichs update just enough to stay above the floors.

use pif_mhd::limiter::{apply_limited_flux, lambda_density, shrink_for_pressure, state_at, PositivityFloors};
use pif_mhd::physics::{pressure_raw, Primitive, DEFAULT_GAMMA};

fn main() -> pif_mhd::Result<()> {
    let gamma = DEFAULT_GAMMA;
    let floors = PositivityFloors::default();
    // Low-order state of a nearly evacuated cell.
    let q_lf = Primitive {
        rho: 1e-3,
        u: [0.0; 3],
        p: 1e-4,
        b: [1.0, 0.0, 0.0],
    }
    .to_conserved(gamma);
    // High-minus-low flux differences through the four faces of a 2D cell.
    let mut c = vec![[0.0; 8]; 4];
    c[0][0] = -8e-4;
    c[0][4] = -2e-4;
    c[1][0] = -5e-4;
    c[1][1] = 3e-3;
    c[2][0] = 2e-4;
    c[3][0] = -1e-4;
    c[3][4] = -1e-4;

    let unlimited = state_at(&q_lf, &c, &[1.0; 4]);
    println!(
        "unlimited: rho {:.3e}, p {:.3e}",
        unlimited[0],
        pressure_raw(&unlimited, gamma)
    );
    let lam_rho = lambda_density(&q_lf, &c, &floors)?;
    println!("density box   {lam_rho:.4?}");
    let lam = shrink_for_pressure(&q_lf, &c, &lam_rho, &floors, gamma);
    println!("pressure box  {lam:.4?}");
    let limited = state_at(&q_lf, &c, &lam);
    println!(
        "limited:   rho {:.3e}, p {:.3e}",
        limited[0],
        pressure_raw(&limited, gamma)
    );

    let high = [1.0; 8];
    let low = [0.0; 8];
    println!("blend at theta = {:.3}: {:?}", lam[0], &apply_limited_flux(&high, &low, lam[0])[..2]);
    Ok(())
}
