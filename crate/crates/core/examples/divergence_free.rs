//! Replacing B by the fourth-order curl of a potential makes the discrete
//! divergence vanish to roundoff, whatever the potential.

use pif_mhd::ct::{correct_b, relative_divergence};
use pif_mhd::mesh::{Boundary, BoundaryPolicy, Field, GridSpec, SOLVER_GHOST};
use pif_mhd::physics::{Primitive, DEFAULT_GAMMA, NVAR};

fn main() -> pif_mhd::Result<()> {
    let grid = GridSpec::new(&[24, 20, 16], &[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)], SOLVER_GHOST)?;
    let mut q = Field::<NVAR>::from_fn(&grid, |x| {
        Primitive {
            rho: 1.0,
            u: [0.0; 3],
            p: 1.0,
            // Deliberately not divergence-free.
            b: [x[0] * x[0], x[1].sin(), x[0] * x[2]],
        }
        .to_conserved(DEFAULT_GAMMA)
    });
    q.fill_boundary(&BoundaryPolicy::uniform(Boundary::Extrap0))?;
    let (div, b) = relative_divergence(&q);
    println!("before: max|div B| / max|B| = {:.3e}", div / b);

    let a = Field::<3>::from_fn(&grid, |x| {
        [
            (3.0 * x[1]).sin() * x[2],
            x[0] * x[0] * x[2].cos(),
            (x[0] + 2.0 * x[1]).exp() * 0.1,
        ]
    });
    correct_b(&mut q, &a, 2, false)?;
    let (div, b) = relative_divergence(&q);
    println!("after:  max|div B| / max|B| = {:.3e}", div / b);
    Ok(())
}
