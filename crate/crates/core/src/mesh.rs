//! Uniform structured grids with ghost layers, cell-centred fields and the
//! boundary fills used by the test problems.
//!
//! Two-dimensional grids are stored as three-dimensional grids with a single
//! cell and no ghost layers along `z`, so every sweep in the crate can use one
//! `(i, j, k)` index space. Interior cell indices start at zero; ghost cells
//! have negative indices or indices `>= n` along an axis.

use rayon::prelude::*;

use crate::error::{MhdError, Result};

/// Ghost-layer count used by the full solver pipeline.
///
/// The time-averaged fluxes need two nested fourth-order central derivatives
/// (two cells each) plus the three-cell WENO reach, so seven layers are needed
/// for every interface flux to be computed from filled data.
pub const SOLVER_GHOST: usize = 7;

/// Smallest ghost width the constrained-transport stencil fits in.
pub const MIN_CT_GHOST: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    ndim: usize,
    dims: [usize; 3],
    lower: [f64; 3],
    upper: [f64; 3],
    ghost: [usize; 3],
    strides: [usize; 3],
    padded: [usize; 3],
}

impl GridSpec {
    /// Builds a grid from per-axis extents and `(lower, upper)` bounds.
    ///
    /// One or two axes give a 2D grid (a 1D request is promoted to a
    /// single-row 2D grid with no ghosts along `y`), three axes a 3D grid.
    pub fn new(dims: &[usize], bounds: &[(f64, f64)], ghost: usize) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(MhdError::InvalidGrid(format!(
                "expected 1 to 3 axes, got {}",
                dims.len()
            )));
        }
        if dims.len() != bounds.len() {
            return Err(MhdError::InvalidGrid(format!(
                "{} extents but {} bounds",
                dims.len(),
                bounds.len()
            )));
        }
        let mut d = [1usize; 3];
        let mut lo = [0.0; 3];
        let mut hi = [1.0; 3];
        let mut g = [0usize; 3];
        for (axis, (&n, &(a, b))) in dims.iter().zip(bounds).enumerate() {
            if n == 0 {
                return Err(MhdError::InvalidGrid(format!("axis {axis} has zero cells")));
            }
            if !(a.is_finite() && b.is_finite()) || b <= a {
                return Err(MhdError::InvalidGrid(format!(
                    "axis {axis} has degenerate bounds [{a}, {b}]"
                )));
            }
            d[axis] = n;
            lo[axis] = a;
            hi[axis] = b;
            g[axis] = ghost;
        }
        let ndim = dims.len().max(2);
        let padded = [d[0] + 2 * g[0], d[1] + 2 * g[1], d[2] + 2 * g[2]];
        let strides = [1, padded[0], padded[0] * padded[1]];
        Ok(Self {
            ndim,
            dims: d,
            lower: lo,
            upper: hi,
            ghost: g,
            strides,
            padded,
        })
    }

    /// Number of spatial dimensions (2 or 3).
    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn lower(&self) -> [f64; 3] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 3] {
        self.upper
    }

    /// Ghost width of the grid (along its active axes).
    pub fn ghost(&self) -> usize {
        self.ghost[0]
    }

    pub fn ghost_on(&self, axis: usize) -> usize {
        self.ghost[axis]
    }

    /// Whether `axis` carries cells that vary (x and y always, z in 3D).
    pub fn is_active(&self, axis: usize) -> bool {
        axis < self.ndim
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.dims[axis] as f64
    }

    pub fn spacings(&self) -> [f64; 3] {
        [self.spacing(0), self.spacing(1), self.spacing(2)]
    }

    /// Cell centre along `axis` for (possibly ghost) index `i`.
    pub fn center(&self, axis: usize, i: isize) -> f64 {
        self.lower[axis] + (i as f64 + 0.5) * self.spacing(axis)
    }

    pub fn center_point(&self, i: isize, j: isize, k: isize) -> [f64; 3] {
        [self.center(0, i), self.center(1, j), self.center(2, k)]
    }

    pub fn strides(&self) -> [usize; 3] {
        self.strides
    }

    /// Stride along `axis`, or zero for the inactive `z` axis of a 2D grid.
    pub fn stride(&self, axis: usize) -> isize {
        if self.is_active(axis) {
            self.strides[axis] as isize
        } else {
            0
        }
    }

    /// Total number of stored cells including ghosts.
    pub fn len(&self) -> usize {
        self.padded[0] * self.padded[1] * self.padded[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior_len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Linear storage index of cell `(i, j, k)`.
    #[inline]
    pub fn index(&self, i: isize, j: isize, k: isize) -> usize {
        debug_assert!(self.contains(i, j, k), "cell ({i}, {j}, {k}) outside storage");
        let ii = (i + self.ghost[0] as isize) as usize;
        let jj = (j + self.ghost[1] as isize) as usize;
        let kk = (k + self.ghost[2] as isize) as usize;
        ii + self.strides[1] * jj + self.strides[2] * kk
    }

    /// Whether `(i, j, k)` lies in the ghosted storage.
    pub fn contains(&self, i: isize, j: isize, k: isize) -> bool {
        let ok = |v: isize, axis: usize| {
            v >= -(self.ghost[axis] as isize) && v < (self.dims[axis] + self.ghost[axis]) as isize
        };
        ok(i, 0) && ok(j, 1) && ok(k, 2)
    }

    /// Unit offset of `axis` as an `(i, j, k)` triple.
    pub fn unit(axis: usize) -> [isize; 3] {
        let mut e = [0; 3];
        e[axis] = 1;
        e
    }

    /// Interior cells in storage order (x fastest).
    pub fn interior_cells(&self) -> impl Iterator<Item = [isize; 3]> + '_ {
        self.cells_with_halo(0)
    }

    /// Cells of the box extending `halo` layers beyond the interior along
    /// every active axis.
    pub fn cells_with_halo(&self, halo: usize) -> impl Iterator<Item = [isize; 3]> + '_ {
        let [r0, r1, r2] = self.halo_ranges(halo);
        r2.flat_map(move |k| {
            let r0 = r0.clone();
            r1.clone()
                .flat_map(move |j| r0.clone().map(move |i| [i, j, k]))
        })
    }

    /// Index ranges of the interior grown by `halo` along active axes.
    pub fn halo_ranges(&self, halo: usize) -> [std::ops::Range<isize>; 3] {
        let r = |axis: usize| {
            let h = if self.is_active(axis) {
                halo.min(self.ghost[axis]) as isize
            } else {
                0
            };
            -h..self.dims[axis] as isize + h
        };
        [r(0), r(1), r(2)]
    }

    /// Position of interior cell `n` (storage order) as `(i, j, k)`.
    pub fn interior_cell(&self, n: usize) -> [isize; 3] {
        let i = n % self.dims[0];
        let j = (n / self.dims[0]) % self.dims[1];
        let k = n / (self.dims[0] * self.dims[1]);
        [i as isize, j as isize, k as isize]
    }

    /// Same extents and bounds with a different ghost width.
    pub fn with_ghost(&self, ghost: usize) -> Self {
        let dims: Vec<usize> = self.dims[..self.ndim].to_vec();
        let bounds: Vec<(f64, f64)> = (0..self.ndim)
            .map(|a| (self.lower[a], self.upper[a]))
            .collect();
        Self::new(&dims, &bounds, ghost).expect("valid grid stays valid")
    }

    /// Domain length along `axis`.
    pub fn length(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }
}

/// Convenience wrapper mirroring the grid constructor.
pub fn build_grid(dims: &[usize], bounds: &[(f64, f64)], ghost: usize) -> Result<GridSpec> {
    GridSpec::new(dims, bounds, ghost)
}

/// Boundary treatment on one side of one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Wrap-around copy of the interior.
    Periodic,
    /// Zeroth-order extrapolation: copy the outermost interior value.
    Extrap0,
    /// First-order extrapolation, one layer at a time from the two
    /// outermost known values.
    Extrap1,
    /// Zeroth-order extrapolation along a lattice direction: the ghost cell
    /// `c` copies `c + step`. `step` must point into the domain.
    Extrap0Along([i8; 3]),
    /// First-order extrapolation along a lattice direction:
    /// `2 v(c + step) - v(c + 2 step)`.
    Extrap1Along([i8; 3]),
}

/// Boundary treatment for all sides of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryPolicy {
    pub lower: [Boundary; 3],
    pub upper: [Boundary; 3],
}

impl BoundaryPolicy {
    pub fn uniform(kind: Boundary) -> Self {
        Self {
            lower: [kind; 3],
            upper: [kind; 3],
        }
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.lower[axis] == Boundary::Periodic
    }
}

/// Cell-centred field with `N` components per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<const N: usize> {
    grid: GridSpec,
    data: Vec<[f64; N]>,
}

impl<const N: usize> Field<N> {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            data: vec![[0.0; N]; grid.len()],
        }
    }

    /// Samples `f` at every cell centre, ghosts included.
    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut([f64; 3]) -> [f64; N]) -> Self {
        let mut field = Self::zeros(grid);
        let all = grid.ghost();
        let cells: Vec<[isize; 3]> = grid.cells_with_halo(all).collect();
        for [i, j, k] in cells {
            let x = grid.center_point(i, j, k);
            let n = grid.index(i, j, k);
            field.data[n] = f(x);
        }
        field
    }

    /// Evaluates `f` on the cells within `halo` layers of the interior (in
    /// parallel over grid rows); all other cells are zero.
    pub fn par_from_box<F>(grid: &GridSpec, halo: usize, f: F) -> Self
    where
        F: Fn([isize; 3]) -> [f64; N] + Sync,
    {
        let mut field = Self::zeros(grid);
        field.par_update_box(halo, |c, v| *v = f(c));
        field
    }

    /// Applies `f` to every cell within `halo` layers of the interior, in
    /// parallel over grid rows.
    pub fn par_update_box<F>(&mut self, halo: usize, f: F)
    where
        F: Fn([isize; 3], &mut [f64; N]) + Sync,
    {
        let grid = self.grid.clone();
        let [r0, r1, r2] = grid.halo_ranges(halo);
        let row = grid.padded[0];
        let g = grid.ghost;
        self.data
            .par_chunks_mut(row)
            .enumerate()
            .for_each(|(r, chunk)| {
                let j = (r % grid.padded[1]) as isize - g[1] as isize;
                let k = (r / grid.padded[1]) as isize - g[2] as isize;
                if !r1.contains(&j) || !r2.contains(&k) {
                    return;
                }
                for i in r0.clone() {
                    let n = (i + g[0] as isize) as usize;
                    f([i, j, k], &mut chunk[n]);
                }
            });
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[[f64; N]] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [[f64; N]] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize, k: isize) -> &[f64; N] {
        &self.data[self.grid.index(i, j, k)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: isize, j: isize, k: isize) -> &mut [f64; N] {
        let n = self.grid.index(i, j, k);
        &mut self.data[n]
    }

    #[inline]
    pub fn at(&self, c: [isize; 3]) -> &[f64; N] {
        self.get(c[0], c[1], c[2])
    }

    pub fn set(&mut self, i: isize, j: isize, k: isize, v: [f64; N]) {
        *self.get_mut(i, j, k) = v;
    }

    /// Interior values in storage order.
    pub fn interior_values(&self) -> impl Iterator<Item = &[f64; N]> + '_ {
        self.grid.interior_cells().map(move |c| self.at(c))
    }

    /// Checks that every interior value is finite, returning the first
    /// offending cell otherwise.
    pub fn first_non_finite(&self) -> Option<[usize; 3]> {
        self.grid
            .interior_cells()
            .find(|&c| self.at(c).iter().any(|v| !v.is_finite()))
            .map(|c| [c[0] as usize, c[1] as usize, c[2] as usize])
    }

    pub fn same_shape<const M: usize>(&self, other: &Field<M>) -> bool {
        self.grid.dims == other.grid.dims && self.grid.ghost == other.grid.ghost
    }

    /// Fills ghost cells according to `policy`.
    pub fn fill_boundary(&mut self, policy: &BoundaryPolicy) -> Result<()> {
        self.fill_boundary_with_jump(policy, &[[0.0; N]; 3])
    }

    /// Fills ghost cells; periodic axes add `jump[axis]` per period crossed,
    /// which supports fields that are periodic up to a constant offset (a
    /// vector potential of a field with non-zero mean, for instance).
    pub fn fill_boundary_with_jump(
        &mut self,
        policy: &BoundaryPolicy,
        jump: &[[f64; N]; 3],
    ) -> Result<()> {
        for axis in 0..self.grid.ndim {
            let lo = policy.lower[axis];
            let hi = policy.upper[axis];
            if (lo == Boundary::Periodic) != (hi == Boundary::Periodic) {
                return Err(MhdError::InvalidInput(format!(
                    "axis {axis}: periodic boundary must be set on both sides"
                )));
            }
            if self.grid.ghost[axis] == 0 {
                continue;
            }
            for (kind, inward) in [(lo, 1i8), (hi, -1i8)] {
                if let Boundary::Extrap0Along(st) | Boundary::Extrap1Along(st) = kind {
                    let reach = if matches!(kind, Boundary::Extrap1Along(_)) { 2 } else { 1 };
                    let n = self.grid.dims[axis] as i64;
                    if st[axis].signum() != inward || i64::from(st[axis].abs()) * reach > n {
                        return Err(MhdError::InvalidInput(format!(
                            "axis {axis}: extrapolation step {st:?} must point into the domain"
                        )));
                    }
                }
            }
            self.fill_axis(axis, lo, hi, &jump[axis]);
        }
        Ok(())
    }

    fn fill_axis(&mut self, axis: usize, lo: Boundary, hi: Boundary, jump: &[f64; N]) {
        let g = self.grid.ghost[axis] as isize;
        let n = self.grid.dims[axis] as isize;
        // Lines along `axis` cover the interior of this axis and the full
        // (already filled) extent of the axes handled before it.
        let (a1, a2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let range = |a: usize| {
            let h = if a < axis { self.grid.ghost[a] as isize } else { 0 };
            -h..self.grid.dims[a] as isize + h
        };
        let stride = self.grid.stride(axis);
        for t2 in range(a2) {
            for t1 in range(a1) {
                let mut c = [0isize; 3];
                c[a1] = t1;
                c[a2] = t2;
                c[axis] = 0;
                let base = self.grid.index(c[0], c[1], c[2]) as isize;
                let at = |i: isize| (base + i * stride) as usize;
                match lo {
                    Boundary::Periodic => {
                        for i in -g..0 {
                            let mut v = self.data[at(i + n)];
                            for (x, d) in v.iter_mut().zip(jump) {
                                *x -= d;
                            }
                            self.data[at(i)] = v;
                        }
                    }
                    Boundary::Extrap0 => {
                        let v = self.data[at(0)];
                        for i in -g..0 {
                            self.data[at(i)] = v;
                        }
                    }
                    Boundary::Extrap0Along(_) | Boundary::Extrap1Along(_) => {}
                    Boundary::Extrap1 => {
                        for i in (-g..0).rev() {
                            let a = self.data[at(i + 1)];
                            let b = self.data[at((i + 2).min(n - 1))];
                            let mut v = [0.0; N];
                            for m in 0..N {
                                v[m] = 2.0 * a[m] - b[m];
                            }
                            self.data[at(i)] = v;
                        }
                    }
                }
                match hi {
                    Boundary::Periodic => {
                        for i in n..n + g {
                            let mut v = self.data[at(i - n)];
                            for (x, d) in v.iter_mut().zip(jump) {
                                *x += d;
                            }
                            self.data[at(i)] = v;
                        }
                    }
                    Boundary::Extrap0 => {
                        let v = self.data[at(n - 1)];
                        for i in n..n + g {
                            self.data[at(i)] = v;
                        }
                    }
                    Boundary::Extrap0Along(_) | Boundary::Extrap1Along(_) => {}
                    Boundary::Extrap1 => {
                        for i in n..n + g {
                            let a = self.data[at(i - 1)];
                            let b = self.data[at((i - 2).max(0))];
                            let mut v = [0.0; N];
                            for m in 0..N {
                                v[m] = 2.0 * a[m] - b[m];
                            }
                            self.data[at(i)] = v;
                        }
                    }
                }
            }
        }
        for (side, kind) in [(-1isize, lo), (1, hi)] {
            let (step, order) = match kind {
                Boundary::Extrap0Along(s) => (s, 0),
                Boundary::Extrap1Along(s) => (s, 1),
                _ => continue,
            };
            let step = step.map(isize::from);
            let lim: [(isize, isize); 3] = std::array::from_fn(|a| {
                let r = range(a);
                (r.start, r.end - 1)
            });
            let clamp = |c: [isize; 3]| -> usize {
                let c: [isize; 3] = std::array::from_fn(|a| {
                    if a == axis {
                        c[a]
                    } else {
                        c[a].clamp(lim[a].0, lim[a].1)
                    }
                });
                self.grid.index(c[0], c[1], c[2])
            };
            for r in 1..=g {
                let i = if side < 0 { -r } else { n - 1 + r };
                for t2 in range(a2) {
                    for t1 in range(a1) {
                        let mut c = [0isize; 3];
                        c[a1] = t1;
                        c[a2] = t2;
                        c[axis] = i;
                        let p1 = std::array::from_fn(|a| c[a] + step[a]);
                        let v = if order == 0 {
                            self.data[clamp(p1)]
                        } else {
                            let p2 = std::array::from_fn(|a| c[a] + 2 * step[a]);
                            let (x1, x2) = (self.data[clamp(p1)], self.data[clamp(p2)]);
                            std::array::from_fn(|m| 2.0 * x1[m] - x2[m])
                        };
                        let dst = self.grid.index(c[0], c[1], c[2]);
                        self.data[dst] = v;
                    }
                }
            }
        }
    }
}

/// Free-function form of [`Field::fill_boundary`].
pub fn fill_boundary<const N: usize>(field: &mut Field<N>, policy: &BoundaryPolicy) -> Result<()> {
    field.fill_boundary(policy)
}

/// Face-centred values normal to one axis.
///
/// Face `i` along `dir` is the left face of cell `i`; there are
/// `dims[dir] + 1` faces along `dir` and interior extents on the other axes.
#[derive(Clone, Debug)]
pub struct FaceField<const N: usize> {
    dir: usize,
    dims: [usize; 3],
    data: Vec<[f64; N]>,
}

impl<const N: usize> FaceField<N> {
    pub fn zeros(grid: &GridSpec, dir: usize) -> Self {
        let mut dims = grid.dims();
        dims[dir] += 1;
        Self {
            dir,
            dims,
            data: vec![[0.0; N]; dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn dir(&self) -> usize {
        self.dir
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> &[f64; N] {
        &self.data[self.index(i, j, k)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> &mut [f64; N] {
        let n = self.index(i, j, k);
        &mut self.data[n]
    }

    pub fn data(&self) -> &[[f64; N]] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [[f64; N]] {
        &mut self.data
    }

    /// Position of face `n` (storage order) as `(i, j, k)`.
    pub fn face(&self, n: usize) -> [usize; 3] {
        let i = n % self.dims[0];
        let j = (n / self.dims[0]) % self.dims[1];
        let k = n / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }
}
