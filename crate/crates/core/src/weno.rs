//! Fifth-order WENO kernels: the scalar reconstruction, the Hamilton-Jacobi
//! one-sided derivative and characteristic-wise interface fluxes.

use rayon::prelude::*;

use crate::error::{MhdError, Result};
use crate::mesh::{FaceField, Field, GridSpec};
use crate::physics::{self, State, NVAR};

/// Regulariser of the smoothness indicators.
pub const WENO_EPS: f64 = 1e-6;

/// Reconstructs the value at the right edge of `v3` from the upwind-biased
/// stencil `v1..v5` (Jiang-Shu weights).
#[inline]
pub fn weno5(v1: f64, v2: f64, v3: f64, v4: f64, v5: f64) -> f64 {
    let p0 = (2.0 * v1 - 7.0 * v2 + 11.0 * v3) / 6.0;
    let p1 = (-v2 + 5.0 * v3 + 2.0 * v4) / 6.0;
    let p2 = (2.0 * v3 + 5.0 * v4 - v5) / 6.0;
    let b0 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3).powi(2) + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3).powi(2);
    let b1 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4).powi(2) + 0.25 * (v2 - v4).powi(2);
    let b2 = 13.0 / 12.0 * (v3 - 2.0 * v4 + v5).powi(2) + 0.25 * (3.0 * v3 - 4.0 * v4 + v5).powi(2);
    let a0 = 0.1 / (WENO_EPS + b0).powi(2);
    let a1 = 0.6 / (WENO_EPS + b1).powi(2);
    let a2 = 0.3 / (WENO_EPS + b2).powi(2);
    (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2)
}

/// Linear fifth-order value that [`weno5`] approaches on smooth data.
#[inline]
pub fn linear5(v1: f64, v2: f64, v3: f64, v4: f64, v5: f64) -> f64 {
    (2.0 * v1 - 13.0 * v2 + 47.0 * v3 + 27.0 * v4 - 3.0 * v5) / 60.0
}

/// One-sided derivative from five first divided differences, ordered as
/// `(D+A_{i-3}, ..., D+A_{i+1})` for the left-biased value and
/// `(D+A_{i+2}, ..., D+A_{i-2})` for the right-biased one.
#[inline]
pub fn hj_weno_derivative(d: [f64; 5]) -> f64 {
    weno5(d[0], d[1], d[2], d[3], d[4])
}

/// Left- and right-biased WENO derivatives of one component of `a` along
/// `axis` at cell `c`.
#[inline]
pub fn hj_derivatives<const N: usize>(a: &Field<N>, comp: usize, axis: usize, c: [isize; 3]) -> (f64, f64) {
    let grid = a.grid();
    let s = grid.stride(axis);
    let base = grid.index(c[0], c[1], c[2]) as isize;
    let data = a.data();
    let h = grid.spacing(axis);
    let v = |o: isize| data[(base + o * s) as usize][comp];
    // d[m] = (A_{i+m+1} - A_{i+m}) / h for m = -3..=2
    let mut d = [0.0; 6];
    for (m, dm) in d.iter_mut().enumerate() {
        let o = m as isize - 3;
        *dm = (v(o + 1) - v(o)) / h;
    }
    let minus = weno5(d[0], d[1], d[2], d[3], d[4]);
    let plus = weno5(d[5], d[4], d[3], d[2], d[1]);
    (minus, plus)
}

/// Characteristic-wise WENO5 reconstruction of interface fluxes with a
/// global Lax-Friedrichs splitting.
///
/// `flux` and `state` must be valid three cells beyond the interior along
/// `dir`. Face `i` of the result is the left face of cell `i`.
pub fn reconstruct_interface(
    flux: &Field<NVAR>,
    state: &Field<NVAR>,
    dir: usize,
    alpha: f64,
    gamma: f64,
) -> Result<FaceField<NVAR>> {
    let grid = flux.grid();
    if !flux.same_shape(state) {
        return Err(MhdError::ShapeMismatch("flux and state grids differ".into()));
    }
    if grid.ghost_on(dir) < 3 {
        return Err(MhdError::InvalidGrid("reconstruction needs 3 ghost layers".into()));
    }
    let mut out = FaceField::<NVAR>::zeros(grid, dir);
    let fdims = out.dims();
    let row = fdims[0];
    let failure = std::sync::Mutex::new(None::<MhdError>);
    out.data_mut()
        .par_chunks_mut(row)
        .enumerate()
        .for_each(|(r, chunk)| {
            let j = (r % fdims[1]) as isize;
            let k = (r / fdims[1]) as isize;
            for (i, slot) in chunk.iter_mut().enumerate() {
                let c = [i as isize, j, k];
                match face_flux(grid, flux, state, dir, alpha, gamma, c) {
                    Ok(v) => *slot = v,
                    Err(e) => {
                        let mut g = failure.lock().unwrap();
                        g.get_or_insert(e);
                    }
                }
            }
        });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(out)
}

/// Interface flux at the left face of cell `c` along `dir`.
pub fn face_flux(
    grid: &GridSpec,
    flux: &Field<NVAR>,
    state: &Field<NVAR>,
    dir: usize,
    alpha: f64,
    gamma: f64,
    c: [isize; 3],
) -> Result<State> {
    let s = grid.stride(dir);
    let base = grid.index(c[0], c[1], c[2]) as isize;
    let at = |o: isize| (base + o * s) as usize;
    let qd = state.data();
    let fd = flux.data();
    let ql = &qd[at(-1)];
    let qr = &qd[at(0)];
    let eig = physics::eigensystem(ql, qr, dir, gamma)?;
    // Characteristic F+ and F- on cells i-3 ..= i+2.
    let mut wp = [[0.0; NVAR]; 6];
    let mut wm = [[0.0; NVAR]; 6];
    for m in 0..6 {
        let n = at(m as isize - 3);
        let lf = eig.project(&fd[n]);
        let lq = eig.project(&qd[n]);
        for v in 0..NVAR {
            wp[m][v] = 0.5 * (lf[v] + alpha * lq[v]);
            wm[m][v] = 0.5 * (lf[v] - alpha * lq[v]);
        }
    }
    let mut w = [0.0; NVAR];
    for v in 0..NVAR {
        let plus = weno5(wp[0][v], wp[1][v], wp[2][v], wp[3][v], wp[4][v]);
        let minus = weno5(wm[5][v], wm[4][v], wm[3][v], wm[2][v], wm[1][v]);
        w[v] = plus + minus;
    }
    Ok(eig.unproject(&w))
}

/// Component-wise WENO5 Lax-Friedrichs reconstruction of a scalar flux on a
/// periodic line; reference implementation for tests and examples.
pub fn scalar_weno_lf(f: &[f64], u: &[f64], alpha: f64) -> Vec<f64> {
    let n = f.len();
    let w = |i: isize| (i.rem_euclid(n as isize)) as usize;
    (0..n as isize)
        .map(|i| {
            let fp = |o: isize| 0.5 * (f[w(i + o)] + alpha * u[w(i + o)]);
            let fm = |o: isize| 0.5 * (f[w(i + o)] - alpha * u[w(i + o)]);
            weno5(fp(-3), fp(-2), fp(-1), fp(0), fp(1)) + weno5(fm(2), fm(1), fm(0), fm(-1), fm(-2))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear_data() {
        assert!((weno5(2.5, 2.5, 2.5, 2.5, 2.5) - 2.5).abs() < 1e-15);
        // Point values of a line: reconstruction at x = 3.5 (between v3, v4).
        let line = |x: f64| 0.3 * x - 1.0;
        let v = weno5(line(1.0), line(2.0), line(3.0), line(4.0), line(5.0));
        assert!((v - line(3.5)).abs() < 1e-13);
    }

    #[test]
    fn quartic_cell_averages() {
        // Cell averages of x^4 over unit cells centred at -2..=2: the linear
        // weights reproduce x^4 at the interface x = 1/2 exactly.
        let avg = |c: f64| ((c + 0.5).powi(5) - (c - 0.5).powi(5)) / 5.0;
        let v: Vec<f64> = (-2..=2).map(|c| avg(c as f64)).collect();
        assert!((linear5(v[0], v[1], v[2], v[3], v[4]) - 0.0625).abs() < 1e-13);
        // The nonlinear weights converge at fifth order on smooth data.
        let err = |h: f64| {
            let avg = |c: f64| ((c + 0.5 * h).powi(5) - (c - 0.5 * h).powi(5)) / (5.0 * h);
            let v: Vec<f64> = (-2..=2).map(|c| avg(1.0 + c as f64 * h)).collect();
            (weno5(v[0], v[1], v[2], v[3], v[4]) - (1.0 + 0.5 * h).powi(4)).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 24.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn hj_derivative_of_line() {
        let d = [0.7; 5];
        assert!((hj_weno_derivative(d) - 0.7).abs() < 1e-14);
    }
}
