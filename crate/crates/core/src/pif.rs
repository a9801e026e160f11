//! Picard-integral time-averaged fluxes and the single conservative update.
//!
//! The time average of each flux over a step is replaced by its third-order
//! Taylor polynomial `f + dt/2 f_t + dt^2/6 f_tt`. Time derivatives of the
//! flux follow from `q_t = -div f` and `q_tt = -div f_t` (fourth-order central
//! differences) and directional derivatives of the flux in state space.

use crate::error::{MhdError, Result};
use crate::mesh::{FaceField, Field, GridSpec};
use crate::physics::{self, flux, flux_generic, DerivativeMethod, State, NVAR, RHO};
use crate::jet::Series;

/// Ghost layers consumed by the time-averaged flux construction beyond the
/// three needed by the reconstruction.
pub const PIF_REACH: usize = 4;

/// Fourth-order central derivative of all components along `axis` at `c`.
#[inline]
pub fn d4<const N: usize>(field: &Field<N>, axis: usize, c: [isize; 3]) -> [f64; N] {
    let grid = field.grid();
    let s = grid.stride(axis);
    let base = grid.index(c[0], c[1], c[2]) as isize;
    let d = field.data();
    let (m2, m1, p1, p2) = (
        &d[(base - 2 * s) as usize],
        &d[(base - s) as usize],
        &d[(base + s) as usize],
        &d[(base + 2 * s) as usize],
    );
    let inv = 1.0 / (12.0 * grid.spacing(axis));
    let mut out = [0.0; N];
    for k in 0..N {
        // Differences first: keeps roundoff proportional to the local
        // variation rather than to the magnitude of the data.
        out[k] = ((m2[k] - p2[k]) + 8.0 * (p1[k] - m1[k])) * inv;
    }
    out
}

/// `-sum_d D4_d fields[d]` at `c`.
#[inline]
fn neg_divergence(fields: &[Field<NVAR>], c: [isize; 3]) -> State {
    let mut out = [0.0; NVAR];
    for (axis, f) in fields.iter().enumerate() {
        let d = d4(f, axis, c);
        for k in 0..NVAR {
            out[k] -= d[k];
        }
    }
    out
}

/// Time-averaged fluxes, one field per active direction, valid on the
/// interior plus three ghost layers.
pub fn time_avg_fluxes(
    q: &Field<NVAR>,
    dt: f64,
    gamma: f64,
    method: DerivativeMethod,
) -> Result<Vec<Field<NVAR>>> {
    let grid = q.grid();
    let ndim = grid.ndim();
    let g = grid.ghost();
    if g < 3 + PIF_REACH {
        return Err(MhdError::InvalidGrid(format!(
            "time-averaged fluxes need {} ghost layers, grid has {g}",
            3 + PIF_REACH
        )));
    }
    let f: Vec<Field<NVAR>> = (0..ndim)
        .map(|d| Field::par_from_box(grid, g, |c| flux(q.at(c), d, gamma)))
        .collect();
    let qt = Field::par_from_box(grid, g - 2, |c| neg_divergence(&f, c));

    let ft: Vec<Field<NVAR>> = (0..ndim)
        .map(|d| {
            Field::par_from_box(grid, g - 2, |c| match method {
                DerivativeMethod::Series => {
                    let q0 = q.at(c);
                    let q1 = qt.at(c);
                    let s: [Series<2>; NVAR] = std::array::from_fn(|k| Series([q0[k], q1[k]]));
                    flux_generic(&s, d, gamma).map(|v| v.0[1])
                }
                DerivativeMethod::FiniteDifference => {
                    physics::flux_dir_derivative(q.at(c), qt.at(c), d, gamma, 1, method)
                        .unwrap_or([f64::NAN; NVAR])
                }
            })
        })
        .collect();
    let qtt = Field::par_from_box(grid, g - 4, |c| neg_divergence(&ft, c));

    let out: Vec<Field<NVAR>> = (0..ndim)
        .map(|d| {
            Field::par_from_box(grid, g - 4, |c| {
                averaged_flux(q.at(c), qt.at(c), qtt.at(c), d, dt, gamma, method)
            })
        })
        .collect();
    for fd in &out {
        let bad = grid
            .cells_with_halo(3)
            .find(|&c| fd.at(c).iter().any(|v| !v.is_finite()));
        if let Some(c) = bad {
            let qc = q.at(c);
            let cell = clamp_cell(grid, c);
            return Err(if qc[RHO] <= 0.0 {
                MhdError::Positivity {
                    cell,
                    time: f64::NAN,
                    rho: qc[RHO],
                    pressure: physics::pressure_raw(qc, gamma),
                }
            } else {
                MhdError::NonFinite { cell, time: f64::NAN }
            });
        }
    }
    Ok(out)
}

fn clamp_cell(grid: &GridSpec, c: [isize; 3]) -> [usize; 3] {
    let d = grid.dims();
    std::array::from_fn(|a| c[a].clamp(0, d[a] as isize - 1) as usize)
}

/// `f + dt/2 f_t + dt^2/6 f_tt` at one cell.
#[inline]
pub fn averaged_flux(
    q: &State,
    qt: &State,
    qtt: &State,
    dir: usize,
    dt: f64,
    gamma: f64,
    method: DerivativeMethod,
) -> State {
    match method {
        DerivativeMethod::Series => {
            let s: [Series<3>; NVAR] = std::array::from_fn(|k| Series([q[k], qt[k], 0.5 * qtt[k]]));
            let fs = flux_generic(&s, dir, gamma);
            fs.map(|v| v.0[0] + 0.5 * dt * v.0[1] + dt * dt / 3.0 * v.0[2])
        }
        DerivativeMethod::FiniteDifference => {
            let f0 = flux(q, dir, gamma);
            let j1 = physics::flux_dir_derivative(q, qt, dir, gamma, 1, method);
            let h = physics::flux_dir_derivative(q, qt, dir, gamma, 2, method);
            let j2 = physics::flux_dir_derivative(q, qtt, dir, gamma, 1, method);
            match (j1, h, j2) {
                (Ok(ft), Ok(hv), Ok(jq)) => {
                    std::array::from_fn(|k| f0[k] + 0.5 * dt * ft[k] + dt * dt / 6.0 * (hv[k] + jq[k]))
                }
                _ => [f64::NAN; NVAR],
            }
        }
    }
}

/// Global maximum signal speed along each axis over the interior (zero for
/// inactive axes).
pub fn global_alphas(q: &Field<NVAR>, gamma: f64) -> Result<[f64; 3]> {
    let grid = q.grid();
    let mut alpha = [0.0f64; 3];
    for c in grid.interior_cells() {
        let s = q.at(c);
        if !physics::is_admissible(s, gamma) {
            return Err(MhdError::Positivity {
                cell: clamp_cell(grid, c),
                time: f64::NAN,
                rho: s[RHO],
                pressure: physics::pressure_raw(s, gamma),
            });
        }
        for (d, a) in alpha.iter_mut().enumerate().take(grid.ndim()) {
            *a = a.max(physics::signal_speed_raw(s, d, gamma));
        }
    }
    Ok(alpha)
}

/// Time step `cfl / sum_d alpha_d / dx_d` from given global speeds.
pub fn dt_from_alphas(alpha: &[f64; 3], grid: &GridSpec, cfl: f64) -> Result<f64> {
    let rate: f64 = (0..grid.ndim()).map(|d| alpha[d] / grid.spacing(d)).sum();
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(MhdError::ZeroSignalSpeed);
    }
    Ok(cfl / rate)
}

/// Stable time step for `q` at Courant number `cfl`.
pub fn compute_dt(q: &Field<NVAR>, cfl: f64, gamma: f64) -> Result<f64> {
    let alpha = global_alphas(q, gamma)?;
    dt_from_alphas(&alpha, q.grid(), cfl)
}

/// `q - dt/dx_d (F_{i+1/2} - F_{i-1/2})` summed over directions, on the
/// interior. Ghost cells are copied unchanged.
pub fn conservative_update(q: &Field<NVAR>, fhat: &[FaceField<NVAR>], dt: f64) -> Result<Field<NVAR>> {
    let grid = q.grid();
    if fhat.len() != grid.ndim() {
        return Err(MhdError::ShapeMismatch(format!(
            "{} face fields for a {}-D grid",
            fhat.len(),
            grid.ndim()
        )));
    }
    for (d, fh) in fhat.iter().enumerate() {
        let mut want = grid.dims();
        want[d] += 1;
        if fh.dir() != d || fh.dims() != want {
            return Err(MhdError::ShapeMismatch(format!("face field {d} has wrong extents")));
        }
    }
    let mut out = q.clone();
    let ratio: Vec<f64> = (0..grid.ndim()).map(|d| dt / grid.spacing(d)).collect();
    out.par_update_box(0, |c, v| {
        let [i, j, k] = c.map(|x| x as usize);
        for (d, fh) in fhat.iter().enumerate() {
            let mut hi = [i, j, k];
            hi[d] += 1;
            let fl = fh.get(i, j, k);
            let fr = fh.get(hi[0], hi[1], hi[2]);
            for m in 0..NVAR {
                v[m] -= ratio[d] * (fr[m] - fl[m]);
            }
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_grid;

    #[test]
    fn dt_formula() {
        let g = build_grid(&[10], &[(0.0, 1.0)], 0).unwrap();
        assert!((dt_from_alphas(&[1.0, 0.0, 0.0], &g, 0.5).unwrap() - 0.05).abs() < 1e-15);
        assert!((dt_from_alphas(&[2.0, 0.0, 0.0], &g, 0.5).unwrap() - 0.025).abs() < 1e-15);
        assert!(matches!(
            dt_from_alphas(&[0.0; 3], &g, 0.5),
            Err(MhdError::ZeroSignalSpeed)
        ));
    }

    #[test]
    fn single_face_changes_two_cells() {
        let g = build_grid(&[4, 1], &[(0.0, 1.0), (0.0, 1.0)], 0).unwrap();
        let q = Field::<NVAR>::zeros(&g);
        let mut fx = FaceField::<NVAR>::zeros(&g, 0);
        let fy = FaceField::<NVAR>::zeros(&g, 1);
        fx.get_mut(2, 0, 0)[0] = 1.0;
        let out = conservative_update(&q, &[fx, fy], 0.1).unwrap();
        let r: Vec<f64> = (0..4).map(|i| out.get(i, 0, 0)[0]).collect();
        assert_eq!(r, vec![0.0, -0.4, 0.4, 0.0]);
    }
}
