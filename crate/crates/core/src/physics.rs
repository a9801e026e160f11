//! Ideal-MHD state algebra: equation of state, physical fluxes, wave speeds,
//! the characteristic eigensystem and directional flux derivatives.
//!
//! Conserved states are `[f64; 8]` in the order
//! `(rho, rho u_x, rho u_y, rho u_z, E, B_x, B_y, B_z)`.

use crate::error::{MhdError, Result};
use crate::jet::{Scalar, Series};

pub const NVAR: usize = 8;
pub const RHO: usize = 0;
pub const MX: usize = 1;
pub const ENER: usize = 4;
pub const BX: usize = 5;

/// Conserved state vector.
pub type State = [f64; NVAR];

/// Ratio of specific heats used by every problem in the catalog.
pub const DEFAULT_GAMMA: f64 = 5.0 / 3.0;

/// Primitive variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: [f64; 3],
    pub p: f64,
    pub b: [f64; 3],
}

impl Primitive {
    pub fn to_conserved(&self, gamma: f64) -> State {
        let ke = 0.5 * self.rho * dot(&self.u, &self.u);
        let me = 0.5 * dot(&self.b, &self.b);
        [
            self.rho,
            self.rho * self.u[0],
            self.rho * self.u[1],
            self.rho * self.u[2],
            self.p / (gamma - 1.0) + ke + me,
            self.b[0],
            self.b[1],
            self.b[2],
        ]
    }

    pub fn from_conserved(q: &State, gamma: f64) -> Result<Self> {
        let p = pressure(q, gamma)?;
        let inv = 1.0 / q[RHO];
        Ok(Self {
            rho: q[RHO],
            u: [q[1] * inv, q[2] * inv, q[3] * inv],
            p,
            b: [q[5], q[6], q[7]],
        })
    }
}

#[inline]
fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Thermal pressure without any admissibility check.
#[inline]
pub fn pressure_raw(q: &State, gamma: f64) -> f64 {
    let m2 = q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
    let b2 = q[5] * q[5] + q[6] * q[6] + q[7] * q[7];
    (gamma - 1.0) * (q[ENER] - 0.5 * m2 / q[RHO] - 0.5 * b2)
}

/// Thermal pressure `(gamma - 1)(E - rho|u|^2/2 - |B|^2/2)`.
pub fn pressure(q: &State, gamma: f64) -> Result<f64> {
    if q[RHO] == 0.0 {
        return Err(MhdError::DegenerateState("zero density".into()));
    }
    Ok(pressure_raw(q, gamma))
}

/// Whether `q` has positive density and pressure.
pub fn is_admissible(q: &State, gamma: f64) -> bool {
    q.iter().all(|v| v.is_finite()) && q[RHO] > 0.0 && pressure_raw(q, gamma) > 0.0
}

/// Physical flux in direction `dir`, generic over the scalar type.
///
/// The flux of `B_dir` is identically zero.
#[inline]
pub fn flux_generic<T: Scalar>(q: &[T; NVAR], dir: usize, gamma: f64) -> [T; NVAR] {
    let rho = q[0];
    let inv = rho.recip();
    let m = [q[1], q[2], q[3]];
    let b = [q[5], q[6], q[7]];
    let u = [m[0] * inv, m[1] * inv, m[2] * inv];
    let pb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) * 0.5;
    let ke = (m[0] * u[0] + m[1] * u[1] + m[2] * u[2]) * 0.5;
    let p = (q[4] - ke - pb) * (gamma - 1.0);
    let ptot = p + pb;
    let un = u[dir];
    let bn = b[dir];
    let ub = u[0] * b[0] + u[1] * b[1] + u[2] * b[2];
    let mut f = [rho * 0.0; NVAR];
    f[0] = m[dir];
    for k in 0..3 {
        f[1 + k] = m[k] * un - b[k] * bn;
        f[5 + k] = if k == dir {
            rho * 0.0
        } else {
            b[k] * un - u[k] * bn
        };
    }
    f[1 + dir] = f[1 + dir] + ptot;
    f[4] = (q[4] + ptot) * un - bn * ub;
    f
}

/// Physical flux of the conserved state in direction `dir`.
#[inline]
pub fn flux(q: &State, dir: usize, gamma: f64) -> State {
    flux_generic(q, dir, gamma)
}

/// Fast magnetosonic speed along `dir` without admissibility checks.
#[inline]
pub fn fast_speed_raw(q: &State, dir: usize, gamma: f64) -> f64 {
    let rho = q[RHO];
    let p = pressure_raw(q, gamma).max(0.0);
    let a2 = gamma * p / rho;
    let b2 = (q[5] * q[5] + q[6] * q[6] + q[7] * q[7]) / rho;
    let bn2 = q[5 + dir] * q[5 + dir] / rho;
    let s = a2 + b2;
    let disc = (s * s - 4.0 * a2 * bn2).max(0.0);
    (0.5 * (s + disc.sqrt())).sqrt()
}

/// `|u_dir| + c_f`, the largest characteristic speed along `dir`.
pub fn max_signal_speed(q: &State, dir: usize, gamma: f64) -> Result<f64> {
    if !is_admissible(q, gamma) {
        return Err(MhdError::DegenerateState(format!(
            "inadmissible state rho = {:e}, p = {:e}",
            q[RHO],
            pressure_raw(q, gamma)
        )));
    }
    Ok((q[MX + dir] / q[RHO]).abs() + fast_speed_raw(q, dir, gamma))
}

#[inline]
pub fn signal_speed_raw(q: &State, dir: usize, gamma: f64) -> f64 {
    (q[MX + dir] / q[RHO]).abs() + fast_speed_raw(q, dir, gamma)
}

pub type Mat8 = [[f64; NVAR]; NVAR];

/// Characteristic decomposition of a flux Jacobian.
///
/// Columns of `right` are right eigenvectors, rows of `left` the matching
/// left eigenvectors, with `left * right = I`.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub left: Mat8,
    pub right: Mat8,
    pub speeds: [f64; NVAR],
}

impl Eigensystem {
    /// `left * v`.
    #[inline]
    pub fn project(&self, v: &State) -> State {
        mat_vec(&self.left, v)
    }

    /// `right * w`.
    #[inline]
    pub fn unproject(&self, w: &State) -> State {
        mat_vec(&self.right, w)
    }
}

#[inline]
pub fn mat_vec(m: &Mat8, v: &State) -> State {
    let mut out = [0.0; NVAR];
    for (o, row) in out.iter_mut().zip(m) {
        let mut s = 0.0;
        for k in 0..NVAR {
            s += row[k] * v[k];
        }
        *o = s;
    }
    out
}

pub fn mat_mul(a: &Mat8, b: &Mat8) -> Mat8 {
    let mut c = [[0.0; NVAR]; NVAR];
    for i in 0..NVAR {
        for k in 0..NVAR {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..NVAR {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(m: &Mat8) -> Result<Mat8> {
    let mut a = *m;
    let mut inv = [[0.0; NVAR]; NVAR];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..NVAR {
        let piv = (col..NVAR)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        let pv = a[piv][col];
        if !(pv.abs() > 1e-300) || !pv.is_finite() {
            return Err(MhdError::DegenerateState("singular eigenvector matrix".into()));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = 1.0 / pv;
        for j in 0..NVAR {
            a[col][j] *= s;
            inv[col][j] *= s;
        }
        for r in 0..NVAR {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..NVAR {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    Ok(inv)
}

/// Normal and tangential axes for direction `dir` (cyclic order).
#[inline]
pub fn frame(dir: usize) -> [usize; 3] {
    [dir, (dir + 1) % 3, (dir + 2) % 3]
}

/// Powell eight-wave system in primitive variables
/// `(rho, u_n, u_t1, u_t2, p, B_n, B_t1, B_t2)` in the frame of `dir`.
pub fn primitive_jacobian(w: &Primitive, dir: usize, gamma: f64) -> Mat8 {
    let [n, t1, t2] = frame(dir);
    let (rho, un) = (w.rho, w.u[n]);
    let (bn, b1, b2) = (w.b[n], w.b[t1], w.b[t2]);
    let mut a = [[0.0; NVAR]; NVAR];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = un;
    }
    a[0][1] = rho;
    a[1][4] = 1.0 / rho;
    a[1][6] = b1 / rho;
    a[1][7] = b2 / rho;
    a[2][6] = -bn / rho;
    a[3][7] = -bn / rho;
    a[4][1] = gamma * w.p;
    a[6][1] = b1;
    a[6][2] = -bn;
    a[7][1] = b2;
    a[7][3] = -bn;
    a
}

/// Right eigenvectors (columns) and ascending speeds of
/// [`primitive_jacobian`], with the Roe-Balsara normalisation.
pub fn primitive_eigenvectors(w: &Primitive, dir: usize, gamma: f64) -> Result<(Mat8, [f64; NVAR])> {
    let [n, t1, t2] = frame(dir);
    let rho = w.rho;
    let p = w.p;
    if !(rho > 0.0 && p > 0.0 && rho.is_finite() && p.is_finite()) {
        return Err(MhdError::DegenerateState(format!(
            "eigensystem at rho = {rho:e}, p = {p:e}"
        )));
    }
    let sr = rho.sqrt();
    let (bn, b1, b2) = (w.b[n], w.b[t1], w.b[t2]);
    let a2 = gamma * p / rho;
    let a = a2.sqrt();
    let bn2 = bn * bn / rho;
    let bt2 = (b1 * b1 + b2 * b2) / rho;
    let sum = a2 + bn2 + bt2;
    let disc = ((a2 - bn2 - bt2).powi(2) + 4.0 * a2 * bt2).max(0.0).sqrt();
    let cf2 = 0.5 * (sum + disc);
    let cs2 = (0.5 * (sum - disc)).max(0.0);
    let cf = cf2.sqrt();
    let cs = cs2.sqrt();
    let ca = bn2.sqrt();

    let (alpha_f, alpha_s) = if cf2 - cs2 > 1e-12 * cf2 {
        let af = ((a2 - cs2).max(0.0) / (cf2 - cs2)).sqrt();
        let as_ = ((cf2 - a2).max(0.0) / (cf2 - cs2)).sqrt();
        (af, as_)
    } else {
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    };
    let bperp = (b1 * b1 + b2 * b2).sqrt();
    let bmag = (bn * bn + bperp * bperp).sqrt();
    let (beta1, beta2) = if bperp > 1e-12 * (1.0 + bmag) {
        (b1 / bperp, b2 / bperp)
    } else {
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    };
    let s = if bn < 0.0 { -1.0 } else { 1.0 };
    let gp = gamma * p;

    let fast = |sg: f64| {
        [
            rho * alpha_f,
            sg * alpha_f * cf,
            -sg * alpha_s * cs * beta1 * s,
            -sg * alpha_s * cs * beta2 * s,
            alpha_f * gp,
            0.0,
            alpha_s * sr * a * beta1,
            alpha_s * sr * a * beta2,
        ]
    };
    let slow = |sg: f64| {
        [
            rho * alpha_s,
            sg * alpha_s * cs,
            sg * alpha_f * cf * beta1 * s,
            sg * alpha_f * cf * beta2 * s,
            alpha_s * gp,
            0.0,
            -alpha_f * sr * a * beta1,
            -alpha_f * sr * a * beta2,
        ]
    };
    let alfven = |sg: f64| {
        [
            0.0,
            0.0,
            -beta2,
            beta1,
            0.0,
            0.0,
            sg * s * sr * beta2,
            -sg * s * sr * beta1,
        ]
    };
    let entropy = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let divergence = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    // sg = -1 selects the wave moving in the negative direction.
    let cols = [
        fast(-1.0),
        alfven(-1.0),
        slow(-1.0),
        entropy,
        divergence,
        slow(1.0),
        alfven(1.0),
        fast(1.0),
    ];
    let un = w.u[n];
    let speeds = [
        un - cf,
        un - ca,
        un - cs,
        un,
        un,
        un + cs,
        un + ca,
        un + cf,
    ];
    let mut r = [[0.0; NVAR]; NVAR];
    for (j, col) in cols.iter().enumerate() {
        let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        for i in 0..NVAR {
            r[i][j] = col[i] * scale;
        }
    }
    Ok((r, speeds))
}

/// `d q / d W` for the primitive ordering of [`primitive_jacobian`].
fn primitive_to_conserved_jacobian(w: &Primitive, dir: usize, gamma: f64) -> Mat8 {
    let [n, t1, t2] = frame(dir);
    let v = [w.u[n], w.u[t1], w.u[t2]];
    let b = [w.b[n], w.b[t1], w.b[t2]];
    let mut m = [[0.0; NVAR]; NVAR];
    m[0][0] = 1.0;
    for k in 0..3 {
        m[1 + k][0] = v[k];
        m[1 + k][1 + k] = w.rho;
        m[4][1 + k] = w.rho * v[k];
        m[4][5 + k] = b[k];
        m[5 + k][5 + k] = 1.0;
    }
    m[4][0] = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    m[4][4] = 1.0 / (gamma - 1.0);
    m
}

/// Rotated-frame row index to conserved-vector index.
fn frame_rows(dir: usize) -> [usize; NVAR] {
    let [n, t1, t2] = frame(dir);
    [0, 1 + n, 1 + t1, 1 + t2, 4, 5 + n, 5 + t1, 5 + t2]
}

/// Eigensystem of the direction-`dir` flux Jacobian at the arithmetic mean
/// of `ql` and `qr`.
pub fn eigensystem(ql: &State, qr: &State, dir: usize, gamma: f64) -> Result<Eigensystem> {
    let mut qm = [0.0; NVAR];
    for k in 0..NVAR {
        qm[k] = 0.5 * (ql[k] + qr[k]);
    }
    eigensystem_at(&qm, dir, gamma)
}

/// Eigensystem of the direction-`dir` flux Jacobian at `q`.
pub fn eigensystem_at(q: &State, dir: usize, gamma: f64) -> Result<Eigensystem> {
    if !(q[RHO] > 0.0) {
        return Err(MhdError::DegenerateState(format!(
            "eigensystem at rho = {:e}",
            q[RHO]
        )));
    }
    let w = Primitive::from_conserved(q, gamma)?;
    let (rp, speeds) = primitive_eigenvectors(&w, dir, gamma)?;
    let dq = primitive_to_conserved_jacobian(&w, dir, gamma);
    let rf = mat_mul(&dq, &rp);
    let rows = frame_rows(dir);
    let mut right = [[0.0; NVAR]; NVAR];
    for (i, &row) in rows.iter().enumerate() {
        right[row] = rf[i];
    }
    let left = invert(&right)?;
    Ok(Eigensystem {
        left,
        right,
        speeds,
    })
}

/// How [`flux_dir_derivative`] evaluates derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DerivativeMethod {
    /// Exact Taylor coefficients of `s -> f(q + s v)`.
    #[default]
    Series,
    /// Central differences in state space.
    FiniteDifference,
}

/// Directional derivative of the flux: order 1 is the Jacobian-vector
/// product `J(q) v`, order 2 the Hessian form `H(q)[v, v]`.
pub fn flux_dir_derivative(
    q: &State,
    v: &State,
    dir: usize,
    gamma: f64,
    order: usize,
    method: DerivativeMethod,
) -> Result<State> {
    if !(order == 1 || order == 2) {
        return Err(MhdError::InvalidInput(format!("derivative order {order}")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(MhdError::InvalidInput("non-finite direction".into()));
    }
    match method {
        DerivativeMethod::Series => {
            let mut qs = [Series::<3>::constant(0.0); NVAR];
            for k in 0..NVAR {
                qs[k] = Series([q[k], v[k], 0.0]);
            }
            let f = flux_generic(&qs, dir, gamma);
            let mut out = [0.0; NVAR];
            for k in 0..NVAR {
                out[k] = if order == 1 { f[k].0[1] } else { 2.0 * f[k].0[2] };
            }
            Ok(out)
        }
        DerivativeMethod::FiniteDifference => fd_dir_derivative(q, v, dir, gamma, order),
    }
}

fn fd_dir_derivative(q: &State, v: &State, dir: usize, gamma: f64, order: usize) -> Result<State> {
    let vn = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if vn == 0.0 {
        return Ok([0.0; NVAR]);
    }
    let qn = q.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let base = if order == 1 { 1e-5 } else { 1e-4 };
    let mut eps = base * qn / vn;
    for _ in 0..30 {
        let mut qp = *q;
        let mut qm = *q;
        for k in 0..NVAR {
            qp[k] += eps * v[k];
            qm[k] -= eps * v[k];
        }
        if is_admissible(&qp, gamma) && is_admissible(&qm, gamma) {
            let fp = flux(&qp, dir, gamma);
            let fm = flux(&qm, dir, gamma);
            let mut out = [0.0; NVAR];
            if order == 1 {
                for k in 0..NVAR {
                    out[k] = (fp[k] - fm[k]) / (2.0 * eps);
                }
            } else {
                let f0 = flux(q, dir, gamma);
                for k in 0..NVAR {
                    out[k] = (fp[k] - 2.0 * f0[k] + fm[k]) / (eps * eps);
                }
            }
            return Ok(out);
        }
        eps *= 0.5;
    }
    Err(MhdError::DegenerateState(
        "perturbed state stays inadmissible".into(),
    ))
}

/// Finite-difference Jacobian of the conserved flux (central, step `h`).
pub fn fd_flux_jacobian(q: &State, dir: usize, gamma: f64, h: f64) -> Mat8 {
    let mut j = [[0.0; NVAR]; NVAR];
    for c in 0..NVAR {
        let mut qp = *q;
        let mut qm = *q;
        let step = h * (1.0 + q[c].abs());
        qp[c] += step;
        qm[c] -= step;
        let fp = flux(&qp, dir, gamma);
        let fm = flux(&qm, dir, gamma);
        for r in 0..NVAR {
            j[r][c] = (fp[r] - fm[r]) / (2.0 * step);
        }
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: f64 = DEFAULT_GAMMA;

    fn prim(rho: f64, u: [f64; 3], p: f64, b: [f64; 3]) -> Primitive {
        Primitive { rho, u, p, b }
    }

    #[test]
    fn pressure_examples() {
        assert!((pressure(&[1.0, 0.0, 0.0, 0.0, 1.5, 0.0, 0.0, 0.0], G).unwrap() - 1.0).abs() < 1e-15);
        let q = [1.0, 1.0, 0.0, 0.0, 2.5, 0.0, 1.0, 0.0];
        assert!((pressure(&q, G).unwrap() - 1.0).abs() < 1e-15);
        assert!(pressure(&[0.0; 8], G).is_err());
    }

    #[test]
    fn flux_examples() {
        let q = prim(1.3, [0.0; 3], 0.7, [0.0; 3]).to_conserved(G);
        let f = flux(&q, 0, G);
        assert_eq!(f, [0.0, 0.7 + 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0].map(|v| v * 1.0));
        let q = prim(1.0, [1.0, 0.0, 0.0], 1.0, [0.0; 3]).to_conserved(G);
        assert!((q[ENER] - 2.0).abs() < 1e-15);
        let f = flux(&q, 0, G);
        let want = [1.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0];
        for k in 0..8 {
            assert!((f[k] - want[k]).abs() < 1e-14, "{k}: {} vs {}", f[k], want[k]);
        }
        let q = prim(1.0, [0.3, -0.2, 0.5], 1.0, [0.4, 0.9, -0.1]).to_conserved(G);
        for d in 0..3 {
            assert_eq!(flux(&q, d, G)[BX + d], 0.0);
        }
    }

    #[test]
    fn signal_speed_limits() {
        let q = prim(2.0, [0.5, 0.0, 0.0], 1.0, [0.0; 3]).to_conserved(G);
        let c = (G / 2.0f64).sqrt();
        assert!((max_signal_speed(&q, 0, G).unwrap() - (0.5 + c)).abs() < 1e-14);
        let q = prim(4.0, [0.0; 3], 1e-14, [3.0, 0.0, 0.0]).to_conserved(G);
        assert!((max_signal_speed(&q, 0, G).unwrap() - 1.5).abs() < 1e-6);
    }

    #[test]
    fn jacobian_eigenvectors() {
        let w = prim(1.2, [0.3, -0.4, 0.1], 0.8, [0.7, -0.5, 0.9]);
        for d in 0..3 {
            let a = primitive_jacobian(&w, d, G);
            let (r, s) = primitive_eigenvectors(&w, d, G).unwrap();
            let ar = mat_mul(&a, &r);
            for i in 0..8 {
                for j in 0..8 {
                    assert!((ar[i][j] - r[i][j] * s[j]).abs() < 1e-12, "dir {d} ({i},{j})");
                }
            }
        }
    }
}
