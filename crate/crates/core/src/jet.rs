//! Truncated Taylor arithmetic.
//!
//! [`Scalar`] is the small arithmetic interface the physical flux is written
//! against. It is implemented by `f64`, by the univariate truncated series
//! [`Series`] (used for exact directional derivatives of the flux), and by the
//! multivariate jets [`Jet`] that carry the Cauchy-Kovalevskaya expansion of
//! the potential update in `(t, x, y[, z])`.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Arithmetic needed to evaluate rational expressions of the state.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
{
    fn recip(self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// Univariate series `c[0] + c[1] s + ... + c[K-1] s^(K-1)` truncated at
/// order `K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series<const K: usize>(pub [f64; K]);

impl<const K: usize> Series<K> {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; K];
        c[0] = v;
        Self(c)
    }
}

impl<const K: usize> Add for Series<K> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: Self) -> Self {
        for i in 0..K {
            self.0[i] += o.0[i];
        }
        self
    }
}

impl<const K: usize> Sub for Series<K> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: Self) -> Self {
        for i in 0..K {
            self.0[i] -= o.0[i];
        }
        self
    }
}

impl<const K: usize> Neg for Series<K> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        for c in &mut self.0 {
            *c = -*c;
        }
        self
    }
}

impl<const K: usize> Mul<f64> for Series<K> {
    type Output = Self;
    #[inline]
    fn mul(mut self, s: f64) -> Self {
        for c in &mut self.0 {
            *c *= s;
        }
        self
    }
}

impl<const K: usize> Mul for Series<K> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; K];
        for i in 0..K {
            for j in 0..K - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Self(c)
    }
}

impl<const K: usize> Scalar for Series<K> {
    fn recip(self) -> Self {
        let a = &self.0;
        let mut r = [0.0; K];
        r[0] = 1.0 / a[0];
        for n in 1..K {
            let mut s = 0.0;
            for k in 1..=n {
                s += a[k] * r[n - k];
            }
            r[n] = -s * r[0];
        }
        Self(r)
    }
}

/// Highest total degree a [`Jet`] can carry.
pub const JET_DEGREE: usize = 3;

/// Monomial bookkeeping for jets in `nvars` variables.
#[derive(Debug)]
pub struct JetTables {
    nvars: usize,
    exps: Vec<[u8; 4]>,
    /// Number of monomials of total degree `<= c`, indexed by `c`.
    upto: [usize; JET_DEGREE + 1],
    /// `(a, b, out)` index triples with `deg(out) <= cap`, one list per cap.
    mul: [Vec<(u16, u16, u16)>; JET_DEGREE + 1],
    /// `d/dvar`: `(src, dst, factor)`.
    deriv: Vec<Vec<(u16, u16, f64)>>,
    /// Integration in `var`: `(src, dst, factor)`.
    integ: Vec<Vec<(u16, u16, f64)>>,
}

impl JetTables {
    fn build(nvars: usize) -> Self {
        let mut exps: Vec<[u8; 4]> = Vec::new();
        let mut upto = [0; JET_DEGREE + 1];
        for deg in 0..=JET_DEGREE {
            let mut level = Vec::new();
            collect_exponents(nvars, deg, 0, [0; 4], &mut level);
            exps.extend(level);
            upto[deg] = exps.len();
        }
        let degree = |e: &[u8; 4]| e.iter().map(|&v| v as usize).sum::<usize>();
        let find = |e: [u8; 4]| exps.iter().position(|x| *x == e);
        let mut mul: [Vec<(u16, u16, u16)>; JET_DEGREE + 1] = Default::default();
        for (cap, list) in mul.iter_mut().enumerate() {
            for (a, ea) in exps.iter().enumerate() {
                for (b, eb) in exps.iter().enumerate() {
                    if degree(ea) + degree(eb) > cap {
                        continue;
                    }
                    let mut e = [0u8; 4];
                    for v in 0..4 {
                        e[v] = ea[v] + eb[v];
                    }
                    let out = find(e).expect("product monomial is tabulated");
                    list.push((a as u16, b as u16, out as u16));
                }
            }
        }
        let mut deriv = Vec::new();
        let mut integ = Vec::new();
        for var in 0..nvars {
            let mut d = Vec::new();
            let mut s = Vec::new();
            for (src, e) in exps.iter().enumerate() {
                if e[var] > 0 {
                    let mut f = *e;
                    f[var] -= 1;
                    d.push((src as u16, find(f).unwrap() as u16, e[var] as f64));
                }
                if degree(e) < JET_DEGREE {
                    let mut f = *e;
                    f[var] += 1;
                    s.push((src as u16, find(f).unwrap() as u16, 1.0 / f[var] as f64));
                }
            }
            deriv.push(d);
            integ.push(s);
        }
        Self {
            nvars,
            exps,
            upto,
            mul,
            deriv,
            integ,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent tuple of monomial `n`.
    pub fn exponents(&self, n: usize) -> [u8; 4] {
        self.exps[n]
    }

    /// Index of the monomial with exponents `e`, if tabulated.
    pub fn index_of(&self, e: [u8; 4]) -> Option<usize> {
        self.exps.iter().position(|x| *x == e)
    }

    pub fn count_upto(&self, cap: usize) -> usize {
        self.upto[cap]
    }
}

fn collect_exponents(nvars: usize, left: usize, var: usize, cur: [u8; 4], out: &mut Vec<[u8; 4]>) {
    if var + 1 == nvars {
        let mut e = cur;
        e[var] = left as u8;
        out.push(e);
        return;
    }
    for k in (0..=left).rev() {
        let mut e = cur;
        e[var] = k as u8;
        collect_exponents(nvars, left - k, var + 1, e, out);
    }
}

/// Monomial tables for jets in `nvars` variables (1 to 4).
pub fn jet_tables(nvars: usize) -> &'static JetTables {
    static TABLES: [OnceLock<JetTables>; 5] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    assert!((1..=4).contains(&nvars), "jets support 1 to 4 variables");
    TABLES[nvars].get_or_init(|| JetTables::build(nvars))
}

/// Number of monomials of degree `<= 3` in `nvars` variables.
pub const fn jet_len(nvars: usize) -> usize {
    (nvars + 1) * (nvars + 2) * (nvars + 3) / 6
}

const fn jet_vars(len: usize, degree: usize) -> usize {
    match (len, degree) {
        (4, 3) | (3, 2) => 1,
        (10, 3) | (6, 2) => 2,
        (20, 3) | (10, 2) => 3,
        (35, 3) | (15, 2) => 4,
        _ => panic!("unsupported jet shape"),
    }
}

/// Truncated multivariate Taylor polynomial of total degree at most
/// `cap <= D` with `M` coefficient slots (all monomials of degree `<= D`,
/// `D` is 2 or 3).
///
/// Coefficients are stored in graded order, so the first
/// `count_upto(c)` slots hold everything up to degree `c`. Arithmetic keeps
/// the smallest cap of its operands; differentiation lowers the cap by one
/// and integration raises it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const M: usize, const D: usize = 3> {
    pub c: [f64; M],
    pub cap: u8,
}

impl<const M: usize, const D: usize> Jet<M, D> {
    pub const NVARS: usize = jet_vars(M, D);

    pub fn tables() -> &'static JetTables {
        jet_tables(Self::NVARS)
    }

    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; M];
        c[0] = v;
        Self { c, cap: D as u8 }
    }

    pub fn zero(cap: usize) -> Self {
        Self {
            c: [0.0; M],
            cap: cap as u8,
        }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Coefficient of the monomial with exponents `e`.
    pub fn coeff(&self, e: [u8; 4]) -> f64 {
        Self::tables().index_of(e).map_or(0.0, |n| self.c[n])
    }

    /// Partial derivative `n_var! * coeff` for the pure power `var^n`.
    pub fn pure_derivative(&self, var: usize, n: usize) -> f64 {
        let mut e = [0u8; 4];
        e[var] = n as u8;
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        self.coeff(e) * fact
    }

    /// Drops every coefficient of degree above `cap`.
    pub fn truncate(mut self, cap: usize) -> Self {
        let cap = cap.min(self.cap as usize);
        let n = Self::tables().count_upto(cap);
        for v in &mut self.c[n..] {
            *v = 0.0;
        }
        self.cap = cap as u8;
        self
    }

    /// Partial derivative with respect to variable `var`.
    pub fn deriv(&self, var: usize) -> Self {
        assert!(self.cap > 0, "derivative of a degree-0 jet");
        let t = Self::tables();
        let cap = self.cap as usize - 1;
        let mut out = Self::zero(cap);
        let lim = t.count_upto(self.cap as usize) as u16;
        for &(src, dst, f) in &t.deriv[var] {
            if src < lim {
                out.c[dst as usize] += f * self.c[src as usize];
            }
        }
        out
    }

    /// Copy with `M2` slots and degree `D2` over the same variables.
    pub fn resize<const M2: usize, const D2: usize>(&self) -> Jet<M2, D2> {
        assert_eq!(Self::NVARS, Jet::<M2, D2>::NVARS, "jets over different variables");
        let cap = (self.cap as usize).min(D2);
        let mut out = Jet::<M2, D2>::zero(cap);
        let n = Self::tables().count_upto(cap);
        out.c[..n].copy_from_slice(&self.c[..n]);
        out
    }

    /// Antiderivative in variable `var` vanishing at `var = 0`.
    pub fn integrate(&self, var: usize) -> Self {
        let t = Self::tables();
        let cap = (self.cap as usize + 1).min(D);
        let mut out = Self::zero(cap);
        let lim = t.count_upto(self.cap as usize) as u16;
        let dlim = t.count_upto(cap) as u16;
        for &(src, dst, f) in &t.integ[var] {
            if src < lim && dst < dlim {
                out.c[dst as usize] += f * self.c[src as usize];
            }
        }
        out
    }
}

impl<const M: usize, const D: usize> Add for Jet<M, D> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: Self) -> Self {
        let cap = self.cap.min(o.cap);
        let n = Self::tables().count_upto(cap as usize);
        for i in 0..n {
            self.c[i] += o.c[i];
        }
        for v in &mut self.c[n..] {
            *v = 0.0;
        }
        self.cap = cap;
        self
    }
}

impl<const M: usize, const D: usize> Sub for Jet<M, D> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: Self) -> Self {
        let cap = self.cap.min(o.cap);
        let n = Self::tables().count_upto(cap as usize);
        for i in 0..n {
            self.c[i] -= o.c[i];
        }
        for v in &mut self.c[n..] {
            *v = 0.0;
        }
        self.cap = cap;
        self
    }
}

impl<const M: usize, const D: usize> Neg for Jet<M, D> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        let n = Self::tables().count_upto(self.cap as usize);
        for v in &mut self.c[..n] {
            *v = -*v;
        }
        self
    }
}

impl<const M: usize, const D: usize> Mul<f64> for Jet<M, D> {
    type Output = Self;
    #[inline]
    fn mul(mut self, s: f64) -> Self {
        let n = Self::tables().count_upto(self.cap as usize);
        for v in &mut self.c[..n] {
            *v *= s;
        }
        self
    }
}

include!(concat!(env!("OUT_DIR"), "/jet_mul.rs"));

impl<const M: usize, const D: usize> Mul for Jet<M, D> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let cap = self.cap.min(o.cap) as usize;
        let mut c = [0.0; M];
        match (Self::NVARS, cap) {
            (_, 0) => c[0] = self.c[0] * o.c[0],
            (3, 1) => mul_3_1(&self.c, &o.c, &mut c),
            (3, 2) => mul_3_2(&self.c, &o.c, &mut c),
            (3, 3) => mul_3_3(&self.c, &o.c, &mut c),
            (4, 1) => mul_4_1(&self.c, &o.c, &mut c),
            (4, 2) => mul_4_2(&self.c, &o.c, &mut c),
            (4, 3) => mul_4_3(&self.c, &o.c, &mut c),
            _ => {
                for &(a, b, k) in &Self::tables().mul[cap] {
                    c[k as usize] += self.c[a as usize] * o.c[b as usize];
                }
            }
        }
        Self { c, cap: cap as u8 }
    }
}

impl<const M: usize, const D: usize> Scalar for Jet<M, D> {
    fn recip(self) -> Self {
        // 1/(a0 (1 + e)) with e nilpotent: 1 - e + e^2 - e^3.
        let inv0 = 1.0 / self.c[0];
        let mut e = self * inv0;
        e.c[0] = 0.0;
        let one = Self::constant(1.0).truncate(self.cap as usize);
        let mut sum = one;
        let mut term = one;
        for _ in 0..self.cap {
            term = -(term * e);
            sum = sum + term;
        }
        sum * inv0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type J3 = Jet<20>;
    type J4 = Jet<35>;

    fn var<const M: usize>(v: usize, x0: f64) -> Jet<M> {
        let mut j = Jet::<M>::constant(x0);
        let mut e = [0u8; 4];
        e[v] = 1;
        let n = Jet::<M>::tables().index_of(e).unwrap();
        j.c[n] = 1.0;
        j
    }

    #[test]
    fn unrolled_products_match_tables() {
        let a: [f64; 35] = std::array::from_fn(|n| 1.0 + n as f64 * 0.37);
        let b: [f64; 35] = std::array::from_fn(|n| 2.0 - n as f64 * 0.11);
        for cap in 1..=3 {
            let x = J4 { c: a, cap: 3 }.truncate(cap);
            let y = J4 { c: b, cap: 3 }.truncate(cap);
            let mut r = [0.0; 35];
            for &(i, j, k) in &jet_tables(4).mul[cap] {
                r[k as usize] += x.c[i as usize] * y.c[j as usize];
            }
            assert_eq!((x * y).c, r);
        }
    }

    #[test]
    fn table_sizes() {
        assert_eq!(jet_tables(3).len(), jet_len(3));
        assert_eq!(jet_tables(4).len(), jet_len(4));
        assert_eq!(jet_tables(3).count_upto(2), 10);
        assert_eq!(jet_tables(4).count_upto(1), 5);
    }

    #[test]
    fn product_matches_polynomial() {
        // (1 + t + x)(2 - y) at degree 3.
        let t = var::<20>(0, 0.0);
        let x = var::<20>(1, 0.0);
        let y = var::<20>(2, 0.0);
        let p = (J3::constant(1.0) + t + x) * (J3::constant(2.0) - y);
        assert_eq!(p.coeff([0, 0, 0, 0]), 2.0);
        assert_eq!(p.coeff([1, 0, 0, 0]), 2.0);
        assert_eq!(p.coeff([0, 1, 1, 0]), -1.0);
        assert_eq!(p.coeff([0, 0, 1, 0]), -1.0);
    }

    #[test]
    fn reciprocal_of_shifted_variable() {
        // 1/(2 + x) = 1/2 - x/4 + x^2/8 - x^3/16.
        let x = var::<35>(1, 2.0);
        let r = x.recip();
        assert!((r.coeff([0, 1, 0, 0]) + 0.25).abs() < 1e-15);
        assert!((r.coeff([0, 2, 0, 0]) - 0.125).abs() < 1e-15);
        assert!((r.coeff([0, 3, 0, 0]) + 0.0625).abs() < 1e-15);
        let one = r * x;
        assert!((one.value() - 1.0).abs() < 1e-15);
        for n in 1..35 {
            assert!(one.c[n].abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_and_integral() {
        let x = var::<35>(1, 0.0);
        let t = var::<35>(0, 0.0);
        let p = x * x * t;
        let d = p.deriv(1);
        assert_eq!(d.coeff([1, 1, 0, 0]), 2.0);
        assert_eq!(d.cap, 2);
        let i = d.integrate(1);
        assert_eq!(i.coeff([1, 2, 0, 0]), 1.0);
        let _: J4 = i;
    }

    #[test]
    fn caps_propagate() {
        let x = var::<20>(1, 1.0).truncate(2);
        let y = var::<20>(2, 1.0);
        assert_eq!((x * y).cap, 2);
        assert_eq!((x + y).cap, 2);
        assert_eq!((x * y).coeff([0, 1, 1, 0]), 1.0);
    }

    #[test]
    fn series_recip_and_product() {
        let s = Series([2.0, 1.0, 0.0]);
        let r = s.recip();
        let one = s * r;
        assert!((one.0[0] - 1.0).abs() < 1e-15);
        assert!(one.0[1].abs() < 1e-15 && one.0[2].abs() < 1e-15);
        assert!((r.0[2] - 0.125).abs() < 1e-15);
    }
}
