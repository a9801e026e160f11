//! Snapshot files and plot-ready exports.
//!
//! A snapshot is a short ASCII header followed by little-endian `f64` data,
//! cell-major over interior cells:
//!
//! ```text
//! PIFWENO-MHD-SNAP v1
//! problem rotor
//! t 0.27
//! dims 200 200 1
//! bounds 0 1 0 1 0 0
//! components rho mx my mz E Bx By Bz Az
//! data
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::driver::{ConvergenceRow, RunSummary, SeriesRow, Simulation};
use crate::error::{MhdError, Result};
use crate::mesh::Field;
use crate::physics::{self, BX, MX, NVAR, RHO};

pub const SNAPSHOT_MAGIC: &str = "PIFWENO-MHD-SNAP v1";

const STATE_NAMES: [&str; NVAR] = ["rho", "mx", "my", "mz", "E", "Bx", "By", "Bz"];

pub fn snapshot_name(n: usize) -> String {
    format!("snap_{n:04}.dat")
}

/// Contents of a snapshot file.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub problem: String,
    pub t: f64,
    pub dims: [usize; 3],
    pub bounds: [(f64, f64); 3],
    pub components: Vec<String>,
    /// `values[cell][component]`, cell-major with `x` fastest.
    pub values: Vec<Vec<f64>>,
}

impl Snapshot {
    /// Collects the interior state (and potential) of `q`/`a`.
    pub fn from_fields(problem: &str, t: f64, q: &Field<NVAR>, a: Option<&Field<3>>) -> Self {
        let grid = q.grid();
        let a_comps: &[usize] = match (a, grid.ndim()) {
            (None, _) => &[],
            (Some(_), 2) => &[2],
            (Some(_), _) => &[0, 1, 2],
        };
        let mut components: Vec<String> = STATE_NAMES.iter().map(|s| s.to_string()).collect();
        components.extend(a_comps.iter().map(|&k| ["Ax", "Ay", "Az"][k].to_string()));
        let values = grid
            .interior_cells()
            .map(|c| {
                let mut v = q.at(c).to_vec();
                if let Some(a) = a {
                    v.extend(a_comps.iter().map(|&k| a.at(c)[k]));
                }
                v
            })
            .collect();
        let (lo, hi) = (grid.lower(), grid.upper());
        Snapshot {
            problem: problem.to_string(),
            t,
            dims: grid.dims(),
            bounds: std::array::from_fn(|d| (lo[d], hi[d])),
            components,
            values,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{SNAPSHOT_MAGIC}")?;
        writeln!(w, "problem {}", self.problem)?;
        writeln!(w, "t {:e}", self.t)?;
        writeln!(w, "dims {} {} {}", self.dims[0], self.dims[1], self.dims[2])?;
        let b: Vec<String> = self
            .bounds
            .iter()
            .flat_map(|&(a, b)| [format!("{a:e}"), format!("{b:e}")])
            .collect();
        writeln!(w, "bounds {}", b.join(" "))?;
        writeln!(w, "components {}", self.components.join(" "))?;
        writeln!(w, "data")?;
        for v in &self.values {
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut line = String::new();
        let mut next = |r: &mut BufReader<File>, key: &str| -> Result<String> {
            line.clear();
            r.read_line(&mut line)?;
            let l = line.trim_end_matches(['\n', '\r']);
            if key.is_empty() {
                return Ok(l.to_string());
            }
            l.strip_prefix(key)
                .and_then(|s| s.strip_prefix(' ').or(if s.is_empty() { Some("") } else { None }))
                .map(str::to_string)
                .ok_or_else(|| MhdError::Snapshot(format!("expected '{key}' line, found '{l}'")))
        };
        let magic = next(&mut r, "")?;
        if magic != SNAPSHOT_MAGIC {
            return Err(MhdError::Snapshot(format!("bad magic '{magic}'")));
        }
        let problem = next(&mut r, "problem")?;
        let parse_f = |s: &str| s.parse::<f64>().map_err(|_| MhdError::Snapshot(format!("bad number '{s}'")));
        let t = parse_f(&next(&mut r, "t")?)?;
        let dims_s = next(&mut r, "dims")?;
        let dims: Vec<usize> = dims_s
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| MhdError::Snapshot(format!("bad extent '{s}'"))))
            .collect::<Result<_>>()?;
        let bounds_s = next(&mut r, "bounds")?;
        let bounds: Vec<f64> = bounds_s.split_whitespace().map(parse_f).collect::<Result<_>>()?;
        if dims.len() != 3 || bounds.len() != 6 {
            return Err(MhdError::Snapshot("dims needs 3 entries and bounds 6".into()));
        }
        let components: Vec<String> = next(&mut r, "components")?
            .split_whitespace()
            .map(str::to_string)
            .collect();
        next(&mut r, "data")?;
        let ncell = dims[0] * dims[1] * dims[2];
        let nc = components.len();
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() != ncell * nc * 8 {
            return Err(MhdError::Snapshot(format!(
                "expected {} data bytes, found {}",
                ncell * nc * 8,
                buf.len()
            )));
        }
        let flat: Vec<f64> = buf
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect();
        Ok(Snapshot {
            problem,
            t,
            dims: [dims[0], dims[1], dims[2]],
            bounds: std::array::from_fn(|d| (bounds[2 * d], bounds[2 * d + 1])),
            components,
            values: flat.chunks_exact(nc).map(<[f64]>::to_vec).collect(),
        })
    }
}

/// Writes the current state and potential of a simulation.
pub fn write_snapshot(path: &Path, sim: &Simulation) -> Result<()> {
    Snapshot::from_fields(sim.config.problem.name(), sim.t, &sim.q, Some(&sim.a)).write(path)
}

/// Derived scalar quantities for plotting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Density,
    Pressure,
    MagneticMagnitude,
    SpeedMagnitude,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::Density,
        Quantity::Pressure,
        Quantity::MagneticMagnitude,
        Quantity::SpeedMagnitude,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Density => "density",
            Quantity::Pressure => "pressure",
            Quantity::MagneticMagnitude => "bmag",
            Quantity::SpeedMagnitude => "umag",
        }
    }

    pub fn eval(self, s: &[f64; NVAR], gamma: f64) -> f64 {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        match self {
            Quantity::Density => s[RHO],
            Quantity::Pressure => physics::pressure_raw(s, gamma),
            Quantity::MagneticMagnitude => norm(&s[BX..BX + 3]),
            Quantity::SpeedMagnitude => norm(&s[MX..MX + 3]) / s[RHO],
        }
    }
}

/// `(x, y, value)` on the interior plane `k` (the middle plane in 3D).
pub fn plane_values(q: &Field<NVAR>, quantity: Quantity, gamma: f64) -> Vec<(f64, f64, f64)> {
    let grid = q.grid();
    let [nx, ny, nz] = grid.dims();
    let k = (nz / 2) as isize;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let [x, y, _] = grid.center_point(i, j, k);
            out.push((x, y, quantity.eval(q.get(i, j, k), gamma)));
        }
    }
    out
}

/// CSV slice `x,y,value` of one quantity.
pub fn write_slice_csv(path: &Path, q: &Field<NVAR>, quantity: Quantity, gamma: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y,{}", quantity.name())?;
    for (x, y, v) in plane_values(q, quantity, gamma) {
        writeln!(w, "{x:e},{y:e},{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Gnuplot `splot`/contour grid: one block per `y` row separated by blank lines.
pub fn write_gnuplot_grid(path: &Path, values: &[(f64, f64, f64)], nx: usize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (n, (x, y, v)) in values.iter().enumerate() {
        if n > 0 && n % nx == 0 {
            writeln!(w)?;
        }
        writeln!(w, "{x:e} {y:e} {v:e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Schlieren image `exp(-k |grad ln rho| / max |grad ln rho|)` on the plane
/// of [`plane_values`], using fourth-order differences of `ln rho` (ghost
/// cells of `q` must be filled).
pub fn schlieren(q: &Field<NVAR>, k: f64) -> Vec<(f64, f64, f64)> {
    let grid = q.grid();
    let ln_rho = Field::<1>::par_from_box(grid, grid.ghost(), |c| [q.at(c)[RHO].max(f64::MIN_POSITIVE).ln()]);
    let [nx, ny, nz] = grid.dims();
    let kk = (nz / 2) as isize;
    let mut grad = Vec::with_capacity(nx * ny);
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let c = [i, j, kk];
            let g2: f64 = (0..grid.ndim()).map(|d| crate::pif::d4(&ln_rho, d, c)[0].powi(2)).sum();
            let [x, y, _] = grid.center_point(i, j, kk);
            grad.push((x, y, g2.sqrt()));
        }
    }
    let gmax = grad.iter().fold(0.0f64, |m, v| m.max(v.2));
    let scale = if gmax > 0.0 { 1.0 / gmax } else { 0.0 };
    grad.into_iter()
        .map(|(x, y, g)| (x, y, (-k * g * scale).exp()))
        .collect()
}

/// Per-quantity CSV slices, gnuplot grids and a Schlieren image of the
/// current state, tagged with snapshot number `n`.
pub fn write_plot_exports(dir: &Path, sim: &Simulation, n: usize) -> Result<()> {
    let gamma = sim.config.gamma;
    let nx = sim.grid().dims()[0];
    for qn in Quantity::ALL {
        write_slice_csv(&dir.join(format!("{}_{n:04}.csv", qn.name())), &sim.q, qn, gamma)?;
        write_gnuplot_grid(
            &dir.join(format!("{}_{n:04}.grid", qn.name())),
            &plane_values(&sim.q, qn, gamma),
            nx,
        )?;
    }
    write_gnuplot_grid(&dir.join(format!("schlieren_{n:04}.grid")), &schlieren(&sim.q, 15.0), nx)
}

pub fn write_series_csv(path: &Path, rows: &[SeriesRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,energy_error,max_divB,max_B,min_rho,min_p")?;
    for r in rows {
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e},{:e}",
            r.t, r.energy_error, r.max_div_b, r.max_b, r.min_rho, r.min_p
        )?;
    }
    w.flush()?;
    Ok(())
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("mesh,cfl,error_B,order_B,error_A,order_A\n");
    for r in rows {
        let mesh: Vec<String> = r.mesh.iter().map(usize::to_string).collect();
        s.push_str(&format!(
            "{},{},{:.3e},{},{},{}\n",
            mesh.join("x"),
            r.cfl,
            r.error_b,
            opt(r.order_b, 2),
            r.error_a.map_or_else(|| "-".to_string(), |e| format!("{e:.3e}")),
            opt(r.order_a, 2)
        ));
    }
    s
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    std::fs::write(path, convergence_csv(rows))?;
    Ok(())
}

pub fn summary_text(s: &RunSummary) -> String {
    let mesh: Vec<String> = s.mesh.iter().map(usize::to_string).collect();
    format!(
        "problem {}\nmesh {}\nt {:e}\nsteps {}\nmin_rho {:e}\nmin_p {:e}\nmax_rho {:e}\nmax_rel_divB {:e}\nenergy_error {:e}\nmin_theta {:e}\nwall_seconds {:.3}\n",
        s.problem,
        mesh.join("x"),
        s.t,
        s.steps,
        s.min_rho,
        s.min_p,
        s.max_rho,
        s.max_rel_div,
        s.energy_error,
        s.min_theta,
        s.wall_seconds
    )
}

pub fn write_summary(path: &Path, s: &RunSummary) -> Result<()> {
    std::fs::write(path, summary_text(s))?;
    Ok(())
}

/// Minimum pressure over a snapshot (for quick inspection of output files).
pub fn snapshot_min_pressure(s: &Snapshot, gamma: f64) -> f64 {
    s.values.iter().fold(f64::INFINITY, |m, v| {
        let st: [f64; NVAR] = std::array::from_fn(|k| v[k]);
        m.min(physics::pressure_raw(&st, gamma))
    })
}

/// Range of the relative divergence over a run's series.
pub fn series_max_divergence(rows: &[SeriesRow]) -> f64 {
    rows.iter()
        .filter(|r| r.max_b > 0.0)
        .fold(0.0f64, |m, r| m.max(r.max_div_b / r.max_b))
}
