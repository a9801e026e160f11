//! Positivity-preserving flux limiter.
//!
//! Each high-order interface flux is blended with the first-order global
//! Lax-Friedrichs flux, `F~ = theta (F^ - f^) + f^`. Per cell, the update is
//! affine in the limiting parameters of its faces,
//! `q(theta) = q_LF + sum_I theta_I C_I`, so a box of admissible parameters
//! is found first for density (closed form) and then shrunk for pressure by
//! bisection along the rays to the box vertices.

use crate::error::{MhdError, Result};
use crate::mesh::{Field, FaceField};
use crate::physics::{self, flux, pressure_raw, State, NVAR, RHO};
use crate::pif::conservative_update;

/// Maximum number of cell faces (3D).
pub const MAX_SIDES: usize = 6;

/// Regulariser in the density bound.
pub const LAMBDA_EPS: f64 = 1e-12;

/// Bisection steps of the pressure shrink.
pub const BISECTION_STEPS: usize = 10;

/// Lower bounds enforced on density and pressure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityFloors {
    pub eps_rho: f64,
    pub eps_p: f64,
}

impl Default for PositivityFloors {
    fn default() -> Self {
        Self {
            eps_rho: 1e-12,
            eps_p: 1e-12,
        }
    }
}

impl PositivityFloors {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_rho > 0.0 && self.eps_p > 0.0) {
            return Err(MhdError::Config("positivity floors must be > 0".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn admits(&self, q: &State, gamma: f64) -> bool {
        q[RHO] >= self.eps_rho && pressure_raw(q, gamma) >= self.eps_p
    }
}

/// Global Lax-Friedrichs flux `(f(qR) + f(qL) - alpha (qR - qL)) / 2`.
#[inline]
pub fn lf_flux(ql: &State, qr: &State, dir: usize, alpha: f64, gamma: f64) -> State {
    let fl = flux(ql, dir, gamma);
    let fr = flux(qr, dir, gamma);
    std::array::from_fn(|k| 0.5 * (fr[k] + fl[k] - alpha * (qr[k] - ql[k])))
}

/// Lax-Friedrichs fluxes on every interior face of every active direction.
/// `q` must have at least one filled ghost layer.
pub fn lf_faces(q: &Field<NVAR>, alphas: &[f64; 3], gamma: f64) -> Vec<FaceField<NVAR>> {
    let grid = q.grid();
    (0..grid.ndim())
        .map(|d| {
            let mut ff = FaceField::<NVAR>::zeros(grid, d);
            let e = crate::mesh::GridSpec::unit(d);
            for n in 0..ff.data().len() {
                let [i, j, k] = ff.face(n).map(|v| v as isize);
                let qr = q.get(i, j, k);
                let ql = q.get(i - e[0], j - e[1], k - e[2]);
                ff.data_mut()[n] = lf_flux(ql, qr, d, alphas[d], gamma);
            }
            ff
        })
        .collect()
}

/// First-order update with the Lax-Friedrichs fluxes; fails with the first
/// cell that violates the floors.
pub fn lf_update(
    q: &Field<NVAR>,
    lf: &[FaceField<NVAR>],
    dt: f64,
    floors: &PositivityFloors,
    gamma: f64,
) -> Result<Field<NVAR>> {
    let out = conservative_update(q, lf, dt)?;
    for c in out.grid().interior_cells() {
        let s = out.at(c);
        if !floors.admits(s, gamma) {
            return Err(MhdError::Positivity {
                cell: c.map(|v| v as usize),
                time: f64::NAN,
                rho: s[RHO],
                pressure: pressure_raw(s, gamma),
            });
        }
    }
    Ok(out)
}

/// `q_LF + sum_I theta_I C_I`.
#[inline]
pub fn state_at(q_lf: &State, c: &[State], theta: &[f64]) -> State {
    let mut out = *q_lf;
    for (ci, &t) in c.iter().zip(theta) {
        for k in 0..NVAR {
            out[k] += t * ci[k];
        }
    }
    out
}

/// Largest per-side parameters keeping the density above its floor.
pub fn lambda_density(q_lf: &State, c: &[State], floors: &PositivityFloors) -> Result<Vec<f64>> {
    let slack = q_lf[RHO] - floors.eps_rho;
    if !(slack > 0.0) {
        return Err(MhdError::InvalidInput(format!(
            "low-order density {:e} is not above the floor",
            q_lf[RHO]
        )));
    }
    let neg: f64 = c.iter().map(|ci| ci[RHO]).filter(|&v| v < 0.0).map(f64::abs).sum();
    let bound = (slack / (LAMBDA_EPS + neg)).min(1.0);
    Ok(c.iter().map(|ci| if ci[RHO] < 0.0 { bound } else { 1.0 }).collect())
}

/// Shrinks the density box so that every vertex also satisfies the pressure
/// floor.
pub fn shrink_for_pressure(
    q_lf: &State,
    c: &[State],
    lam_rho: &[f64],
    floors: &PositivityFloors,
    gamma: f64,
) -> Vec<f64> {
    let sides = c.len();
    let mut lam = lam_rho.to_vec();
    let mut vertex = vec![0.0; sides];
    for mask in 1u32..(1 << sides) {
        for (i, v) in vertex.iter_mut().enumerate() {
            *v = if mask & (1 << i) != 0 { lam_rho[i] } else { 0.0 };
        }
        let ok = |r: f64| {
            let th: Vec<f64> = vertex.iter().map(|v| r * v).collect();
            floors.admits(&state_at(q_lf, c, &th), gamma)
        };
        if ok(1.0) {
            continue;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        for i in 0..sides {
            if mask & (1 << i) != 0 {
                lam[i] = lam[i].min(lo * lam_rho[i]);
            }
        }
    }
    lam
}

/// `theta` at a face from the facing parameters of its two cells.
#[inline]
pub fn combine_thetas(lambda_right_of_left_cell: f64, lambda_left_of_right_cell: f64) -> f64 {
    lambda_right_of_left_cell.min(lambda_left_of_right_cell)
}

/// `theta (F^ - f^) + f^`.
#[inline]
pub fn apply_limited_flux(high: &State, low: &State, theta: f64) -> State {
    std::array::from_fn(|k| theta * (high[k] - low[k]) + low[k])
}

/// Outcome of one limiting pass.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LimiterStats {
    /// Smallest face parameter.
    pub min_theta: f64,
    /// Number of faces with `theta < 1`.
    pub limited_faces: usize,
}

/// Replaces the high-order fluxes `fhat` by limited fluxes so that the
/// update keeps density and pressure above the floors. `q` must be boundary
/// filled; `periodic[d]` selects how boundary faces pair their cells.
pub fn limit_fluxes(
    q: &Field<NVAR>,
    fhat: &mut [FaceField<NVAR>],
    dt: f64,
    alphas: &[f64; 3],
    gamma: f64,
    floors: &PositivityFloors,
    periodic: [bool; 3],
) -> Result<LimiterStats> {
    let grid = q.grid().clone();
    let ndim = grid.ndim();
    let lf = lf_faces(q, alphas, gamma);
    let q_lf = lf_update(q, &lf, dt, floors, gamma)?;
    let dims = grid.dims();
    let ratio: Vec<f64> = (0..ndim).map(|d| dt / grid.spacing(d)).collect();

    // Per-cell (L, R) parameters for each direction.
    let ncell = grid.interior_len();
    let mut lam = vec![[1.0f64; MAX_SIDES]; ncell];
    let cells: Vec<[isize; 3]> = grid.interior_cells().collect();
    let compute = |n: usize| -> Result<[f64; MAX_SIDES]> {
        let [i, j, k] = cells[n].map(|v| v as usize);
        let mut cv = Vec::with_capacity(2 * ndim);
        for d in 0..ndim {
            let mut hi = [i, j, k];
            hi[d] += 1;
            let (fl, gl) = (fhat[d].get(i, j, k), lf[d].get(i, j, k));
            let (fr, gr) = (fhat[d].get(hi[0], hi[1], hi[2]), lf[d].get(hi[0], hi[1], hi[2]));
            cv.push(std::array::from_fn::<f64, NVAR, _>(|m| ratio[d] * (fl[m] - gl[m])));
            cv.push(std::array::from_fn::<f64, NVAR, _>(|m| -ratio[d] * (fr[m] - gr[m])));
        }
        let qlf = q_lf.at(cells[n]);
        let mut out = [1.0; MAX_SIDES];
        let lr = lambda_density(qlf, &cv, floors)?;
        let l = shrink_for_pressure(qlf, &cv, &lr, floors, gamma);
        out[..l.len()].copy_from_slice(&l);
        Ok(out)
    };
    {
        use rayon::prelude::*;
        let res: Result<Vec<()>> = lam
            .par_iter_mut()
            .enumerate()
            .map(|(n, slot)| {
                *slot = compute(n)?;
                Ok(())
            })
            .collect();
        res?;
    }

    let lam_at = |c: [isize; 3]| -> &[f64; MAX_SIDES] {
        let n = c[0] as usize + dims[0] * (c[1] as usize + dims[1] * c[2] as usize);
        &lam[n]
    };
    let mut stats = LimiterStats {
        min_theta: 1.0,
        limited_faces: 0,
    };
    for d in 0..ndim {
        let n = dims[d] as isize;
        for idx in 0..fhat[d].data().len() {
            let f = fhat[d].face(idx);
            let c = f.map(|v| v as isize);
            let mut left = c;
            left[d] -= 1;
            let right = c;
            let from_left = if c[d] == 0 {
                if periodic[d] {
                    let mut w = left;
                    w[d] = n - 1;
                    Some(lam_at(w)[2 * d + 1])
                } else {
                    None
                }
            } else {
                Some(lam_at(left)[2 * d + 1])
            };
            let from_right = if c[d] == n {
                if periodic[d] {
                    let mut w = right;
                    w[d] = 0;
                    Some(lam_at(w)[2 * d])
                } else {
                    None
                }
            } else {
                Some(lam_at(right)[2 * d])
            };
            let theta = match (from_left, from_right) {
                (Some(a), Some(b)) => combine_thetas(a, b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => 1.0,
            };
            if theta < 1.0 {
                stats.limited_faces += 1;
                stats.min_theta = stats.min_theta.min(theta);
                let low = *lf[d].get(f[0], f[1], f[2]);
                let slot = fhat[d].get_mut(f[0], f[1], f[2]);
                *slot = apply_limited_flux(slot, &low, theta);
            }
        }
    }
    Ok(stats)
}

/// Whether every interior cell of `q` satisfies the floors.
pub fn check_floors(q: &Field<NVAR>, floors: &PositivityFloors, gamma: f64, time: f64) -> Result<()> {
    for c in q.grid().interior_cells() {
        let s = q.at(c);
        if !floors.admits(s, gamma) || s.iter().any(|v| !v.is_finite()) {
            return Err(MhdError::Positivity {
                cell: c.map(|v| v as usize),
                time,
                rho: s[RHO],
                pressure: physics::pressure_raw(s, gamma),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_rho(vals: &[f64]) -> Vec<State> {
        vals.iter()
            .map(|&v| {
                let mut s = [0.0; NVAR];
                s[RHO] = v;
                s
            })
            .collect()
    }

    #[test]
    fn density_example() {
        let mut q = [0.0; NVAR];
        q[RHO] = 1.0;
        let floors = PositivityFloors::default();
        let l = lambda_density(&q, &c_rho(&[-0.8, 0.2, -0.6, 0.0]), &floors).unwrap();
        let b = (1.0 - 1e-12) / (1e-12 + 1.4);
        assert!((l[0] - b).abs() < 1e-15 && (l[2] - b).abs() < 1e-15);
        assert_eq!((l[1], l[3]), (1.0, 1.0));
        assert!((l[0] - 0.714).abs() < 1e-3);
    }

    #[test]
    fn theta_and_blend() {
        assert_eq!(combine_thetas(1.0, 1.0), 1.0);
        assert_eq!(combine_thetas(0.3, 0.7), 0.3);
        let mut hi = [0.0; NVAR];
        let mut lo = [0.0; NVAR];
        hi[0] = 2.0;
        lo[0] = 1.0;
        assert_eq!(apply_limited_flux(&hi, &lo, 0.5)[0], 1.5);
        assert_eq!(apply_limited_flux(&hi, &lo, 1.0), hi);
        assert_eq!(apply_limited_flux(&hi, &lo, 0.0), lo);
    }
}
