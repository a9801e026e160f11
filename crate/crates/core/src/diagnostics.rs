//! Error norms, convergence orders and conservation monitors.
//!
//! All reductions run serially in a fixed cell order so results do not
//! depend on the number of worker threads.

use crate::error::{MhdError, Result};
use crate::mesh::Field;
use crate::physics::{self, BX, ENER, NVAR, RHO};

pub use crate::ct::discrete_divergence;

/// Components of the magnetic field inside the conserved state.
pub const B_COMPONENTS: [usize; 3] = [BX, BX + 1, BX + 2];

/// Max over interior cells and the selected components of the absolute
/// difference between two fields.
pub fn linf_error<const N: usize>(numeric: &Field<N>, reference: &Field<N>, comps: &[usize]) -> Result<f64> {
    if !numeric.same_shape(reference) {
        return Err(MhdError::ShapeMismatch("error norm of fields on different grids".into()));
    }
    if let Some(&c) = comps.iter().find(|&&c| c >= N) {
        return Err(MhdError::InvalidInput(format!("component {c} out of range")));
    }
    let mut err = 0.0f64;
    for (a, b) in numeric.interior_values().zip(reference.interior_values()) {
        for &c in comps {
            err = err.max((a[c] - b[c]).abs());
        }
    }
    Ok(err)
}

/// `L_inf` error in the magnetic field (max over its three components).
pub fn b_error(q: &Field<NVAR>, reference: &Field<NVAR>) -> Result<f64> {
    linf_error(q, reference, &B_COMPONENTS)
}

/// `L_inf` error in the potential: `A_z` in 2D, all components in 3D.
pub fn a_error(a: &Field<3>, reference: &Field<3>) -> Result<f64> {
    if a.grid().ndim() == 2 {
        linf_error(a, reference, &[crate::ct::AZ])
    } else {
        linf_error(a, reference, &[0, 1, 2])
    }
}

/// `log2(e_k / e_{k+1})` for each successive pair.
pub fn observed_order(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(MhdError::InvalidInput("need at least two errors".into()));
    }
    if errors.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(MhdError::InvalidInput("errors must be positive and finite".into()));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sum of the total energy over the interior.
pub fn total_energy(q: &Field<NVAR>) -> f64 {
    compensated_sum(q.interior_values().map(|s| s[ENER]))
}

/// `|sum(E_now - E_init)| / sum(E_init)` over the interior.
pub fn energy_conservation_error(now: &Field<NVAR>, init: &Field<NVAR>) -> Result<f64> {
    if !now.same_shape(init) {
        return Err(MhdError::ShapeMismatch("energy fields on different grids".into()));
    }
    let e0 = total_energy(init);
    if e0 == 0.0 || !e0.is_finite() {
        return Err(MhdError::InvalidInput("initial total energy is zero".into()));
    }
    let diff = compensated_sum(
        now.interior_values()
            .zip(init.interior_values())
            .map(|(a, b)| a[ENER] - b[ENER]),
    );
    Ok(diff.abs() / e0.abs())
}

/// Maximum of `|div B|` over the interior.
pub fn max_divergence(q: &Field<NVAR>) -> f64 {
    discrete_divergence(q)
        .interior_values()
        .fold(0.0f64, |m, v| m.max(v[0].abs()))
}

/// Maximum of `|B|` over the interior.
pub fn max_b(q: &Field<NVAR>) -> f64 {
    q.interior_values().fold(0.0f64, |m, s| {
        m.max((s[BX] * s[BX] + s[BX + 1] * s[BX + 1] + s[BX + 2] * s[BX + 2]).sqrt())
    })
}

/// Minimum density and pressure over the interior.
pub fn min_rho_p(q: &Field<NVAR>, gamma: f64) -> (f64, f64) {
    q.interior_values().fold((f64::INFINITY, f64::INFINITY), |(r, p), s| {
        (r.min(s[RHO]), p.min(physics::pressure_raw(s, gamma)))
    })
}

/// Maximum density over the interior.
pub fn max_rho(q: &Field<NVAR>) -> f64 {
    q.interior_values().fold(f64::NEG_INFINITY, |m, s| m.max(s[RHO]))
}

/// Samples along the row(s) of cells straddling `y = y0` (2D grids): pairs
/// of `(x, state)` ordered by `x`. When `y0` sits on a cell face both
/// adjacent rows are returned.
pub fn row_near_y(q: &Field<NVAR>, y0: f64) -> Vec<(f64, [f64; NVAR])> {
    let grid = q.grid();
    let h = grid.spacing(1);
    let mut out = Vec::new();
    for j in 0..grid.dims()[1] as isize {
        let y = grid.center(1, j);
        if (y - y0).abs() <= 0.5 * h * (1.0 + 1e-9) {
            for i in 0..grid.dims()[0] as isize {
                out.push((grid.center(0, i), *q.get(i, j, 0)));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `max |B_perp - b0|` along `y = y0`, with `B_perp = B_x cos(phi) + B_y sin(phi)`.
pub fn b_perp_deviation(q: &Field<NVAR>, phi: f64, b0: f64, y0: f64) -> f64 {
    row_near_y(q, y0).iter().fold(0.0f64, |m, (_, s)| {
        m.max((s[BX] * phi.cos() + s[BX + 1] * phi.sin() - b0).abs())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_grid;

    #[test]
    fn linf_examples() {
        let g = build_grid(&[4, 4], &[(0.0, 1.0), (0.0, 1.0)], 2).unwrap();
        let a = Field::<2>::from_fn(&g, |x| [x[0], x[1]]);
        assert_eq!(linf_error(&a, &a, &[0, 1]).unwrap(), 0.0);
        let mut b = a.clone();
        b.get_mut(1, 2, 0)[1] += 0.25;
        assert_eq!(linf_error(&a, &b, &[0, 1]).unwrap(), 0.25);
        assert_eq!(linf_error(&a, &b, &[0]).unwrap(), 0.0);
        // Ghost cells are ignored.
        b.get_mut(-1, 0, 0)[0] += 9.0;
        assert_eq!(linf_error(&a, &b, &[0, 1]).unwrap(), 0.25);
    }

    #[test]
    fn order_examples() {
        assert!((observed_order(&[4e-5, 5e-6]).unwrap()[0] - 3.0).abs() < 1e-12);
        assert!((observed_order(&[3.842e-5, 4.940e-6]).unwrap()[0] - 2.96).abs() < 5e-3);
        assert_eq!(observed_order(&[1e-3, 1e-3]).unwrap()[0], 0.0);
        assert!(observed_order(&[1e-3]).is_err());
        assert!(observed_order(&[1e-3, 0.0]).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
