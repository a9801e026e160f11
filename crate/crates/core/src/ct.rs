//! Unstaggered constrained transport.
//!
//! The magnetic potential (Weyl gauge) is advanced with a Lax-Wendroff
//! Hamilton-Jacobi scheme: the first time derivative uses a global
//! Lax-Friedrichs numerical Hamiltonian with WENO one-sided derivatives, the
//! second and third come from a Cauchy-Kovalevskaya expansion evaluated with
//! central differences. `B` is then replaced by the fourth-order curl of the
//! potential.
//!
//! In 2D only `A_z` is evolved and only `B_x`, `B_y` are corrected. In 3D an
//! artificial resistivity on the own-direction derivatives controls the weak
//! hyperbolicity of the potential system.

use crate::error::{MhdError, Result};
use crate::jet::{jet_tables, Jet, Scalar};
use crate::mesh::{Field, GridSpec};
use crate::physics::{BX, ENER, NVAR, RHO};
use crate::pif::d4;
use crate::weno::hj_derivatives;

/// Potential component evolved in 2D.
pub const AZ: usize = 2;

/// Artificial-resistivity parameters of the 3D potential update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResistivityParams {
    pub nu: f64,
    pub eps_smooth: f64,
}

impl Default for ResistivityParams {
    fn default() -> Self {
        Self {
            nu: 0.01,
            eps_smooth: 1e-8,
        }
    }
}

impl ResistivityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(MhdError::Config(format!("nu must be >= 0, got {}", self.nu)));
        }
        if !(self.eps_smooth > 0.0) {
            return Err(MhdError::Config("eps_smooth must be > 0".into()));
        }
        Ok(())
    }
}

/// Smoothness indicator in `[0, 1/2]` from the two one-sided derivatives.
pub fn smoothness_gamma(da_minus: f64, da_plus: f64, dx: f64, eps: f64) -> f64 {
    let am = (eps + (dx * da_minus).powi(2)).powi(-2);
    let ap = (eps + (dx * da_plus).powi(2)).powi(-2);
    (am / (am + ap) - 0.5).abs()
}

/// Velocity field `u = (rho u) / rho`.
pub fn velocity(q: &Field<NVAR>) -> Field<3> {
    let mut u = Field::<3>::zeros(q.grid());
    for (v, s) in u.data_mut().iter_mut().zip(q.data()) {
        if s[RHO] != 0.0 {
            *v = [s[1] / s[RHO], s[2] / s[RHO], s[3] / s[RHO]];
        }
    }
    u
}

/// Global Lax-Friedrichs speeds `max |u_d|` over the interior.
pub fn hj_alphas(u: &Field<3>) -> [f64; 3] {
    let grid = u.grid();
    let mut a = [0.0f64; 3];
    for v in u.interior_values() {
        for d in 0..grid.ndim() {
            a[d] = a[d].max(v[d].abs());
        }
    }
    a
}

/// `dA_z/dt` in 2D from the Lax-Friedrichs numerical Hamiltonian, on the
/// interior.
pub fn hj_rhs_2d(a: &Field<3>, u: &Field<3>, alphas: [f64; 2]) -> Result<Field<1>> {
    check_potential(a, u, 3)?;
    if a.grid().ndim() != 2 {
        return Err(MhdError::InvalidGrid("hj_rhs_2d needs a 2D grid".into()));
    }
    Ok(Field::par_from_box(a.grid(), 0, |c| {
        let uc = u.at(c);
        let mut r = 0.0;
        for d in 0..2 {
            let (m, p) = hj_derivatives(a, AZ, d, c);
            r += -uc[d] * 0.5 * (m + p) + alphas[d] * 0.5 * (p - m);
        }
        [r]
    }))
}

/// `dA/dt` in 3D including the artificial resistivity, on the interior.
pub fn hj_rhs_3d(
    a: &Field<3>,
    u: &Field<3>,
    alphas: [f64; 3],
    res: &ResistivityParams,
    dt: f64,
) -> Result<Field<3>> {
    check_potential(a, u, 3)?;
    res.validate()?;
    if a.grid().ndim() != 3 {
        return Err(MhdError::InvalidGrid("hj_rhs_3d needs a 3D grid".into()));
    }
    if !(dt > 0.0) {
        return Err(MhdError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let grid = a.grid();
    let h = grid.spacings();
    Ok(Field::par_from_box(grid, 0, |c| {
        let uc = u.at(c);
        // dd[d][comp] = (minus, plus) derivative of A_comp along d.
        let mut dd = [[(0.0, 0.0); 3]; 3];
        for (d, row) in dd.iter_mut().enumerate() {
            for (comp, v) in row.iter_mut().enumerate() {
                *v = hj_derivatives(a, comp, d, c);
            }
        }
        let mut out = [0.0; 3];
        for comp in 0..3 {
            let mut r = 0.0;
            for d in 0..3 {
                if d == comp {
                    continue;
                }
                let (m, p) = dd[d][comp];
                r += -uc[d] * 0.5 * (m + p) + alphas[d] * 0.5 * (p - m);
                let (m, p) = dd[comp][d];
                r += uc[d] * 0.5 * (m + p);
            }
            if res.nu > 0.0 {
                let (m, p) = dd[comp][comp];
                let g = smoothness_gamma(m, p, h[comp], res.eps_smooth);
                let s = grid.stride(comp);
                let n = grid.index(c[0], c[1], c[2]) as isize;
                let v = |o: isize| a.data()[(n + o * s) as usize][comp];
                r += 2.0 * res.nu * g * ((v(-1) - v(0)) + (v(1) - v(0))) / dt;
            }
            out[comp] = r;
        }
        out
    }))
}

fn check_potential(a: &Field<3>, u: &Field<3>, ghost: usize) -> Result<()> {
    if !a.same_shape(u) {
        return Err(MhdError::ShapeMismatch("potential and velocity grids differ".into()));
    }
    let grid = a.grid();
    if (0..grid.ndim()).any(|d| grid.ghost_on(d) < ghost) {
        return Err(MhdError::InvalidGrid(format!(
            "potential update needs {ghost} ghost layers"
        )));
    }
    Ok(())
}

/// Central-difference stencils producing the spatial Taylor coefficients
/// `d^|e| U / (e! dx^e)` of a jet in `(t, x, y[, z])`.
#[derive(Clone, Debug)]
pub struct JetStencil {
    entries: Vec<(usize, Vec<(isize, f64)>)>,
}

fn stencil_1d(order: u8) -> &'static [(isize, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => unreachable!("derivatives above third order are not tabulated"),
    }
}

impl JetStencil {
    /// Stencils for every purely spatial monomial of degree `<= cap`.
    pub fn new(grid: &GridSpec, cap: usize) -> Self {
        let nsp = grid.ndim();
        let tables = jet_tables(nsp + 1);
        let h = grid.spacings();
        let mut entries = Vec::new();
        for n in 0..tables.count_upto(cap) {
            let e = tables.exponents(n);
            if e[0] != 0 {
                continue;
            }
            let mut terms: Vec<([isize; 3], f64)> = vec![([0; 3], 1.0)];
            for axis in 0..nsp {
                let order = e[1 + axis];
                let fact: f64 = (1..=order as usize).map(|k| k as f64).product();
                let scale = 1.0 / (fact * h[axis].powi(order as i32));
                let mut next = Vec::new();
                for (off, w) in &terms {
                    for &(o, sw) in stencil_1d(order) {
                        let mut off2 = *off;
                        off2[axis] += o;
                        next.push((off2, w * sw * scale));
                    }
                }
                terms = next;
            }
            let lin = terms
                .into_iter()
                .map(|(o, w)| {
                    let s: isize = (0..3).map(|a| o[a] * grid.stride(a)).sum();
                    (s, w)
                })
                .collect();
            entries.push((n, lin));
        }
        Self { entries }
    }

    /// Jet of component `comp` of `data` around linear index `base`.
    #[inline]
    pub fn jet<const M: usize, const D: usize, const N: usize>(
        &self,
        data: &[[f64; N]],
        base: usize,
        comp: usize,
        cap: usize,
    ) -> Jet<M, D> {
        let mut j = Jet::<M, D>::zero(cap);
        for (n, terms) in &self.entries {
            let mut s = 0.0;
            for &(o, w) in terms {
                s += w * data[(base as isize + o) as usize][comp];
            }
            j.c[*n] = s;
        }
        j
    }
}

/// Stencils used by the Cauchy-Kovalevskaya expansion on one grid.
#[derive(Clone, Debug)]
pub struct CkStencils {
    fluid: JetStencil,
    potential: JetStencil,
}

impl CkStencils {
    pub fn new(grid: &GridSpec) -> Self {
        Self {
            fluid: JetStencil::new(grid, 2),
            potential: JetStencil::new(grid, 3),
        }
    }
}

/// Second and third time derivatives of the potential at cell `c` from the
/// Cauchy-Kovalevskaya expansion. `M` is the cubic jet size (20 in 2D, 35 in
/// 3D) and `F` the quadratic one used for the fluid (10 and 15).
pub fn ck_time_derivatives<const M: usize, const F: usize>(
    q: &Field<NVAR>,
    a: &Field<3>,
    st: &CkStencils,
    c: [isize; 3],
    gamma: f64,
) -> ([f64; 3], [f64; 3]) {
    let nsp = Jet::<M>::NVARS - 1;
    let base = q.grid().index(c[0], c[1], c[2]);
    let q0: [Jet<F, 2>; NVAR] = std::array::from_fn(|k| st.fluid.jet(q.data(), base, k, 2));
    let mut qj = q0;
    // Two Picard sweeps; the second only needs the rows that enter `u`.
    for full in [true, false] {
        let rhs = fluid_rhs(&qj, nsp, gamma, full);
        let ncomp = if full { NVAR } else { 4 };
        for k in 0..ncomp {
            qj[k] = q0[k] + rhs[k].integrate(0);
        }
    }
    let rinv = qj[RHO].recip();
    let u: [Jet<M>; 3] = std::array::from_fn(|k| (qj[1 + k] * rinv).resize());

    let mut att = [0.0; 3];
    let mut attt = [0.0; 3];
    let t2 = [2u8, 0, 0, 0];
    let t3 = [3u8, 0, 0, 0];
    if nsp == 2 {
        let a0: Jet<M> = st.potential.jet(a.data(), base, AZ, 3);
        let mut az = a0;
        for _ in 0..3 {
            let rhs = -(u[0] * az.deriv(1) + u[1] * az.deriv(2));
            az = a0 + rhs.integrate(0);
        }
        att[AZ] = 2.0 * az.coeff(t2);
        attt[AZ] = 6.0 * az.coeff(t3);
    } else {
        let a0: [Jet<M>; 3] = std::array::from_fn(|k| st.potential.jet(a.data(), base, k, 3));
        let mut aj = a0;
        for _ in 0..3 {
            let b = jet_curl(&aj);
            let rhs = [
                u[1] * b[2] - u[2] * b[1],
                u[2] * b[0] - u[0] * b[2],
                u[0] * b[1] - u[1] * b[0],
            ];
            for k in 0..3 {
                aj[k] = a0[k] + rhs[k].integrate(0);
            }
        }
        for k in 0..3 {
            att[k] = 2.0 * aj[k].coeff(t2);
            attt[k] = 6.0 * aj[k].coeff(t3);
        }
    }
    (att, attt)
}

/// `-div F(q)` on jets. With `full == false` only the density and momentum
/// rows are formed.
fn fluid_rhs<const F: usize>(q: &[Jet<F, 2>; NVAR], nsp: usize, gamma: f64, full: bool) -> [Jet<F, 2>; NVAR] {
    let cap = q[RHO].cap as usize;
    let mut rhs = [Jet::<F, 2>::zero(cap.saturating_sub(1)); NVAR];
    let inv = q[RHO].recip();
    let m = [q[1], q[2], q[3]];
    let b = [q[BX], q[BX + 1], q[BX + 2]];
    let u = [m[0] * inv, m[1] * inv, m[2] * inv];
    let pb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) * 0.5;
    let ke = (m[0] * u[0] + m[1] * u[1] + m[2] * u[2]) * 0.5;
    let ptot = (q[ENER] - ke - pb) * (gamma - 1.0) + pb;
    let ub = if full {
        u[0] * b[0] + u[1] * b[1] + u[2] * b[2]
    } else {
        pb
    };
    for d in 0..nsp {
        let dv = 1 + d;
        rhs[RHO] = rhs[RHO] - m[d].deriv(dv);
        for k in 0..3 {
            let mut f = m[k] * u[d] - b[k] * b[d];
            if k == d {
                f = f + ptot;
            }
            rhs[1 + k] = rhs[1 + k] - f.deriv(dv);
        }
        if full {
            let fe = (q[ENER] + ptot) * u[d] - b[d] * ub;
            rhs[ENER] = rhs[ENER] - fe.deriv(dv);
            for k in 0..3 {
                if k != d {
                    let f = b[k] * u[d] - u[k] * b[d];
                    rhs[BX + k] = rhs[BX + k] - f.deriv(dv);
                }
            }
        }
    }
    rhs
}

fn jet_curl<const M: usize>(a: &[Jet<M>; 3]) -> [Jet<M>; 3] {
    // Variables: 0 = t, 1 = x, 2 = y, 3 = z.
    [
        a[2].deriv(2) - a[1].deriv(3),
        a[0].deriv(3) - a[2].deriv(1),
        a[1].deriv(1) - a[0].deriv(2),
    ]
}

/// Second and third time derivatives of the potential on the interior.
pub fn ck_fields(q: &Field<NVAR>, a: &Field<3>, gamma: f64) -> (Field<3>, Field<3>) {
    let grid = q.grid();
    let st = CkStencils::new(grid);
    let both: Field<6> = Field::par_from_box(grid, 0, |c| {
        let (tt, ttt) = if grid.ndim() == 2 {
            ck_time_derivatives::<20, 10>(q, a, &st, c, gamma)
        } else {
            ck_time_derivatives::<35, 15>(q, a, &st, c, gamma)
        };
        [tt[0], tt[1], tt[2], ttt[0], ttt[1], ttt[2]]
    });
    let mut att = Field::<3>::zeros(grid);
    let mut attt = Field::<3>::zeros(grid);
    for ((v, t2), t3) in both
        .data()
        .iter()
        .zip(att.data_mut())
        .zip(attt.data_mut())
    {
        *t2 = [v[0], v[1], v[2]];
        *t3 = [v[3], v[4], v[5]];
    }
    (att, attt)
}

/// Advances the potential by one Lax-Wendroff step using the (boundary
/// filled) fluid state `q` at the start of the step.
///
/// Returns the new potential on the interior; ghost cells keep their old
/// values and must be refilled by the caller.
pub fn potential_taylor_step(
    a: &Field<3>,
    q: &Field<NVAR>,
    dt: f64,
    gamma: f64,
    res: &ResistivityParams,
) -> Result<Field<3>> {
    let grid = a.grid();
    if !a.same_shape(q) {
        return Err(MhdError::ShapeMismatch("potential and state grids differ".into()));
    }
    let u = velocity(q);
    let al = hj_alphas(&u);
    let mut out = a.clone();
    let st = CkStencils::new(grid);
    if grid.ndim() == 2 {
        let at = hj_rhs_2d(a, &u, [al[0], al[1]])?;
        out.par_update_box(0, |c, v| {
            let (tt, ttt) = ck_time_derivatives::<20, 10>(q, a, &st, c, gamma);
            v[AZ] += dt * at.at(c)[0] + dt * dt / 2.0 * tt[AZ] + dt * dt * dt / 6.0 * ttt[AZ];
        });
    } else {
        let at = if dt > 0.0 {
            hj_rhs_3d(a, &u, al, res, dt)?
        } else {
            Field::<3>::zeros(grid)
        };
        out.par_update_box(0, |c, v| {
            let (tt, ttt) = ck_time_derivatives::<35, 15>(q, a, &st, c, gamma);
            let a1 = at.at(c);
            for k in 0..3 {
                v[k] += dt * a1[k] + dt * dt / 2.0 * tt[k] + dt * dt * dt / 6.0 * ttt[k];
            }
        });
    }
    if let Some(cell) = out.first_non_finite() {
        return Err(MhdError::NonFinite {
            cell,
            time: f64::NAN,
        });
    }
    Ok(out)
}

/// Fourth-order discrete curl of `a` on the interior grown by `halo` layers.
/// In 2D only `(B_x, B_y)` are produced (`B_z` is zero).
pub fn curl_b(a: &Field<3>, halo: usize) -> Result<Field<3>> {
    let grid = a.grid();
    if (0..grid.ndim()).any(|d| grid.ghost_on(d) < halo + 2) {
        return Err(MhdError::InvalidGrid(format!(
            "curl on {halo} halo layers needs {} ghosts",
            halo + 2
        )));
    }
    Ok(Field::par_from_box(grid, halo, |c| {
        if grid.ndim() == 2 {
            let dx = d4(a, 0, c);
            let dy = d4(a, 1, c);
            [dy[AZ], -dx[AZ], 0.0]
        } else {
            let dx = d4(a, 0, c);
            let dy = d4(a, 1, c);
            let dz = d4(a, 2, c);
            [dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]]
        }
    }))
}

/// Fourth-order central divergence of the magnetic field held in `q`, on the
/// interior.
pub fn discrete_divergence(q: &Field<NVAR>) -> Field<1> {
    let grid = q.grid();
    Field::par_from_box(grid, 0, |c| {
        let mut s = 0.0;
        for d in 0..grid.ndim() {
            s += d4(q, d, c)[BX + d];
        }
        [s]
    })
}

/// Replaces `B` in `q` by `curl A` on the interior plus `halo` layers.
/// With `energy_fix` the total energy is adjusted so pressure is unchanged.
pub fn correct_b(q: &mut Field<NVAR>, a: &Field<3>, halo: usize, energy_fix: bool) -> Result<()> {
    let b = curl_b(a, halo)?;
    let ncomp = if q.grid().ndim() == 2 { 2 } else { 3 };
    q.par_update_box(halo, |c, s| {
        let bn = b.at(c);
        let mut new = [s[BX], s[BX + 1], s[BX + 2]];
        new[..ncomp].copy_from_slice(&bn[..ncomp]);
        if energy_fix {
            s[ENER] = energy_correction(s[ENER], &[s[BX], s[BX + 1], s[BX + 2]], &new);
        }
        s[BX..BX + 3].copy_from_slice(&new);
    });
    Ok(())
}

/// `E* + (|B_new|^2 - |B*|^2) / 2`.
#[inline]
pub fn energy_correction(e_star: f64, b_star: &[f64; 3], b_new: &[f64; 3]) -> f64 {
    let n2 = |b: &[f64; 3]| b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    e_star + 0.5 * (n2(b_new) - n2(b_star))
}

/// `max |div B| / max |B|` over the interior of `q`.
pub fn relative_divergence(q: &Field<NVAR>) -> (f64, f64) {
    let div = discrete_divergence(q);
    let maxdiv = div.interior_values().fold(0.0f64, |m, v| m.max(v[0].abs()));
    let maxb = q.interior_values().fold(0.0f64, |m, s| {
        m.max((s[5] * s[5] + s[6] * s[6] + s[7] * s[7]).sqrt())
    });
    (maxdiv, maxb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(smoothness_gamma(0.3, 0.3, 0.1, 1e-8), 0.0);
        assert!((smoothness_gamma(1e3, 0.0, 1.0, 1e-8) - 0.5).abs() < 1e-12);
        let am = (1e-8f64 + 1.0).powi(-2);
        let ap = (1e-8f64).powi(-2);
        let want = (am / (am + ap) - 0.5).abs();
        assert_eq!(smoothness_gamma(1.0, 0.0, 1.0, 1e-8), want);
    }

    #[test]
    fn energy_correction_examples() {
        assert_eq!(energy_correction(1.0, &[0.0; 3], &[1.0, 0.0, 0.0]), 1.5);
        assert_eq!(energy_correction(2.0, &[0.3, 0.1, 0.2], &[0.3, 0.1, 0.2]), 2.0);
    }
}
