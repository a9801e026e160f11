//! Time stepping: one step advances the conserved variables with the
//! time-averaged fluxes, then the potential, then replaces `B` by its curl.

use std::path::PathBuf;
use std::time::Instant;

use crate::ct::{self, ResistivityParams};
use crate::diagnostics;
use crate::error::{MhdError, Result};
use crate::limiter::{self, LimiterStats, PositivityFloors};
use crate::mesh::{BoundaryPolicy, Field, GridSpec, SOLVER_GHOST};
use crate::output;
use crate::physics::{self, DerivativeMethod, NVAR, RHO};
use crate::pif;
use crate::problems::{ProblemId, ProblemSpec};
use crate::weno;

/// Everything needed to run one problem.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub mesh: Vec<usize>,
    pub cfl: f64,
    pub t_final: f64,
    pub ct: bool,
    pub pp: bool,
    pub nu: f64,
    pub gamma: f64,
    pub snapshots: usize,
    pub out_dir: Option<PathBuf>,
    pub floors: PositivityFloors,
    pub derivative: DerivativeMethod,
    /// Stop with an error after this many steps.
    pub max_steps: Option<usize>,
    /// Keep the per-step diagnostics series in memory.
    pub record_series: bool,
}

impl RunConfig {
    /// Defaults of the catalog entry: its mesh and final time, CFL 0.5,
    /// CT on, limiter on where the problem needs it.
    pub fn new(problem: ProblemId) -> Self {
        let spec = ProblemSpec::new(problem);
        RunConfig {
            problem,
            mesh: spec.default_mesh.clone(),
            cfl: 0.5,
            t_final: spec.t_final,
            ct: true,
            pp: spec.pp_required,
            nu: ResistivityParams::default().nu,
            gamma: spec.gamma,
            snapshots: 0,
            out_dir: None,
            floors: PositivityFloors::default(),
            derivative: DerivativeMethod::default(),
            max_steps: None,
            record_series: true,
        }
    }

    pub fn with_mesh(mut self, mesh: &[usize]) -> Self {
        self.mesh = mesh.to_vec();
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_t_final(mut self, t: f64) -> Self {
        self.t_final = t;
        self
    }

    pub fn with_ct(mut self, on: bool) -> Self {
        self.ct = on;
        self
    }

    pub fn with_pp(mut self, on: bool) -> Self {
        self.pp = on;
        self
    }

    /// The energy correction follows the limiter flag.
    pub fn energy_correction(&self) -> bool {
        self.pp
    }

    pub fn validate(&self) -> Result<()> {
        let spec = ProblemSpec::new(self.problem);
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(MhdError::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(MhdError::Config(format!("t_final must be >= 0, got {}", self.t_final)));
        }
        if self.mesh.len() != spec.ndim || self.mesh.iter().any(|&n| n == 0) {
            return Err(MhdError::Config(format!(
                "{} needs {} positive mesh extents, got {:?}",
                self.problem, spec.ndim, self.mesh
            )));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(MhdError::Config(format!("gamma must be > 1, got {}", self.gamma)));
        }
        self.resistivity().validate()?;
        self.floors.validate()?;
        if self.snapshots > 0 && self.out_dir.is_none() {
            return Err(MhdError::Config("snapshots requested without an output directory".into()));
        }
        Ok(())
    }

    pub fn resistivity(&self) -> ResistivityParams {
        ResistivityParams {
            nu: self.nu,
            ..ResistivityParams::default()
        }
    }

    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            gamma: self.gamma,
            ..ProblemSpec::new(self.problem)
        }
    }
}

/// Diagnostics after one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub time: f64,
    /// Smallest limiter parameter (1 when the limiter is off or inactive).
    pub min_theta: f64,
    pub limited_faces: usize,
    /// `max |div B|` right after the curl correction (0 without CT).
    pub max_div: f64,
    pub max_b: f64,
}

/// One row of the diagnostics time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub energy_error: f64,
    pub max_div_b: f64,
    pub max_b: f64,
    pub min_rho: f64,
    pub min_p: f64,
}

/// Final record of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub problem: ProblemId,
    pub mesh: Vec<usize>,
    pub t: f64,
    pub steps: usize,
    pub min_rho: f64,
    pub min_p: f64,
    pub max_rho: f64,
    /// Largest `max |div B| / max |B|` seen after any curl correction.
    pub max_rel_div: f64,
    pub energy_error: f64,
    pub min_theta: f64,
    pub wall_seconds: f64,
}

/// Solver state: conserved variables, potential and time.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub config: RunConfig,
    pub spec: ProblemSpec,
    pub q: Field<NVAR>,
    pub a: Field<3>,
    pub t: f64,
    pub steps: usize,
    q_init: Field<NVAR>,
    q_bc: BoundaryPolicy,
    a_bc: BoundaryPolicy,
    jump: [[f64; 3]; 3],
    periodic: [bool; 3],
    max_rel_div: f64,
    min_theta: f64,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let spec = config.spec();
        let grid = spec.grid(&config.mesh, SOLVER_GHOST)?;
        let (q, a) = spec.initial_fields(&grid)?;
        Self::from_fields(config, q, a)
    }

    /// Starts from given fields (on a grid with [`SOLVER_GHOST`] layers).
    pub fn from_fields(config: RunConfig, q: Field<NVAR>, a: Field<3>) -> Result<Self> {
        config.validate()?;
        let spec = config.spec();
        if q.grid().ghost() < SOLVER_GHOST || !q.same_shape(&a) {
            return Err(MhdError::InvalidGrid(format!(
                "state and potential must share a grid with {SOLVER_GHOST} ghost layers"
            )));
        }
        let jump = spec.potential_jump();
        let periodic = spec.periodic();
        let (q_bc, a_bc) = spec.policies(q.grid())?;
        let mut sim = Simulation {
            q_init: q.clone(),
            q_bc,
            a_bc,
            config,
            spec,
            q,
            a,
            t: 0.0,
            steps: 0,
            jump,
            periodic,
            max_rel_div: 0.0,
            min_theta: 1.0,
        };
        sim.fill()?;
        Ok(sim)
    }

    pub fn grid(&self) -> &GridSpec {
        self.q.grid()
    }

    fn fill(&mut self) -> Result<()> {
        self.q.fill_boundary(&self.q_bc)?;
        self.a.fill_boundary_with_jump(&self.a_bc, &self.jump)
    }

    /// Stable time step of the current state.
    pub fn stable_dt(&self) -> Result<f64> {
        let alphas = pif::global_alphas(&self.q, self.config.gamma).map_err(|e| e.at_time(self.t))?;
        pif::dt_from_alphas(&alphas, self.grid(), self.config.cfl)
    }

    /// Advances one step of at most `dt_max`.
    pub fn step(&mut self, dt_max: f64) -> Result<StepReport> {
        self.fill()?;
        let cfg = &self.config;
        let gamma = cfg.gamma;
        let t = self.t;
        let alphas = pif::global_alphas(&self.q, gamma).map_err(|e| e.at_time(t))?;
        let dt = pif::dt_from_alphas(&alphas, self.grid(), cfg.cfl)?.min(dt_max);

        let favg = pif::time_avg_fluxes(&self.q, dt, gamma, cfg.derivative).map_err(|e| e.at_time(t))?;
        let mut fhat = Vec::with_capacity(favg.len());
        for (d, f) in favg.iter().enumerate() {
            fhat.push(weno::reconstruct_interface(f, &self.q, d, alphas[d], gamma).map_err(|e| e.at_time(t))?);
        }
        let stats = if cfg.pp {
            limiter::limit_fluxes(&self.q, &mut fhat, dt, &alphas, gamma, &cfg.floors, self.periodic)
                .map_err(|e| e.at_time(t))?
        } else {
            LimiterStats {
                min_theta: 1.0,
                limited_faces: 0,
            }
        };
        let mut q_new = pif::conservative_update(&self.q, &fhat, dt)?;

        let (mut max_div, mut max_b) = (0.0, 0.0);
        if cfg.ct {
            let a_new = ct::potential_taylor_step(&self.a, &self.q, dt, gamma, &cfg.resistivity())
                .map_err(|e| e.at_time(t))?;
            self.a = a_new;
            self.a.fill_boundary_with_jump(&self.a_bc, &self.jump)?;
            // The curl also fills two ghost layers so the divergence monitor
            // sees a consistent field up to the boundary.
            ct::correct_b(&mut q_new, &self.a, 2, cfg.energy_correction())?;
            let (d, b) = ct::relative_divergence(&q_new);
            max_div = d;
            max_b = b;
            if b > 0.0 {
                self.max_rel_div = self.max_rel_div.max(d / b);
            }
        }

        let t_new = t + dt;
        check_state(&q_new, gamma, t_new, cfg.pp.then_some(&cfg.floors))?;
        self.q = q_new;
        self.t = t_new;
        self.steps += 1;
        self.min_theta = self.min_theta.min(stats.min_theta);
        Ok(StepReport {
            dt,
            time: t_new,
            min_theta: stats.min_theta,
            limited_faces: stats.limited_faces,
            max_div,
            max_b,
        })
    }

    /// Steps until `t_end`, clipping the last step to land on it exactly.
    pub fn advance_to(&mut self, t_end: f64, mut on_step: impl FnMut(&Simulation, &StepReport)) -> Result<()> {
        while self.t < t_end {
            if let Some(limit) = self.config.max_steps {
                if self.steps >= limit {
                    return Err(MhdError::Config(format!("step limit {limit} reached at t = {}", self.t)));
                }
            }
            let mut report = self.step(t_end - self.t)?;
            // Guard against a last step that misses by roundoff.
            if t_end - self.t <= 1e-14 * t_end.abs().max(1.0) {
                self.t = t_end;
                report.time = t_end;
            }
            on_step(self, &report);
        }
        self.fill()?;
        Ok(())
    }

    pub fn series_row(&self) -> SeriesRow {
        let (min_rho, min_p) = diagnostics::min_rho_p(&self.q, self.config.gamma);
        let (max_div_b, max_b) = if self.config.ct {
            ct::relative_divergence(&self.q)
        } else {
            (diagnostics::max_divergence(&self.q), diagnostics::max_b(&self.q))
        };
        SeriesRow {
            t: self.t,
            energy_error: self.energy_error(),
            max_div_b,
            max_b,
            min_rho,
            min_p,
        }
    }

    /// Relative change of the total energy since the start.
    pub fn energy_error(&self) -> f64 {
        diagnostics::energy_conservation_error(&self.q, &self.q_init).unwrap_or(f64::NAN)
    }

    /// Largest relative divergence seen after any curl correction so far.
    pub fn max_rel_div(&self) -> f64 {
        self.max_rel_div
    }

    pub fn summary(&self, wall_seconds: f64) -> RunSummary {
        let (min_rho, min_p) = diagnostics::min_rho_p(&self.q, self.config.gamma);
        RunSummary {
            problem: self.config.problem,
            mesh: self.config.mesh.clone(),
            t: self.t,
            steps: self.steps,
            min_rho,
            min_p,
            max_rho: diagnostics::max_rho(&self.q),
            max_rel_div: self.max_rel_div,
            energy_error: self.energy_error(),
            min_theta: self.min_theta,
            wall_seconds,
        }
    }

    /// Exact state and potential at the current time, if the problem has one.
    pub fn exact(&self) -> Option<Result<(Field<NVAR>, Field<3>)>> {
        self.spec.exact_solution(self.grid(), self.t)
    }
}

/// Aborts on non-finite values and, with `floors`, on states below them;
/// without floors on any non-positive density or pressure.
fn check_state(q: &Field<NVAR>, gamma: f64, t: f64, floors: Option<&PositivityFloors>) -> Result<()> {
    if let Some(floors) = floors {
        return limiter::check_floors(q, floors, gamma, t);
    }
    for c in q.grid().interior_cells() {
        let s = q.at(c);
        let cell = c.map(|v| v as usize);
        if s.iter().any(|v| !v.is_finite()) {
            return Err(MhdError::NonFinite { cell, time: t });
        }
        if !physics::is_admissible(s, gamma) {
            return Err(MhdError::Positivity {
                cell,
                time: t,
                rho: s[RHO],
                pressure: physics::pressure_raw(s, gamma),
            });
        }
    }
    Ok(())
}

/// Result of [`run`].
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub series: Vec<SeriesRow>,
    pub sim: Simulation,
}

/// Runs a configuration to its final time, writing snapshots and the
/// diagnostics series when an output directory is set.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let mut sim = Simulation::new(config.clone())?;
    let mut series = Vec::new();
    if config.record_series {
        series.push(sim.series_row());
    }
    let t_final = config.t_final;
    let n_snap = config.snapshots;
    let mut targets: Vec<f64> = (1..=n_snap).map(|k| t_final * k as f64 / n_snap as f64).collect();
    if targets.last() != Some(&t_final) {
        targets.push(t_final);
    }
    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
        if n_snap > 0 {
            output::write_snapshot(&dir.join(output::snapshot_name(0)), &sim)?;
        }
    }
    for (n, &target) in targets.iter().enumerate() {
        let record = config.record_series;
        sim.advance_to(target, |s, _| {
            if record {
                series.push(s.series_row());
            }
        })?;
        if let (Some(dir), true) = (&config.out_dir, n < n_snap) {
            output::write_snapshot(&dir.join(output::snapshot_name(n + 1)), &sim)?;
        }
    }
    let summary = sim.summary(start.elapsed().as_secs_f64());
    if let Some(dir) = &config.out_dir {
        output::write_series_csv(&dir.join("series.csv"), &series)?;
        output::write_summary(&dir.join("summary.txt"), &summary)?;
        if n_snap > 0 {
            output::write_plot_exports(dir, &sim, n_snap)?;
        }
    }
    Ok(RunOutcome { summary, series, sim })
}

/// How the Courant number changes along a convergence study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CflSchedule {
    Fixed(f64),
    /// Start at the given value and halve at every mesh doubling.
    HalvedPerDoubling(f64),
}

impl CflSchedule {
    pub fn at(&self, level: usize) -> f64 {
        match *self {
            CflSchedule::Fixed(c) => c,
            CflSchedule::HalvedPerDoubling(c) => c / 2f64.powi(level as i32),
        }
    }
}

/// One mesh of a convergence study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub mesh: Vec<usize>,
    pub cfl: f64,
    pub error_b: f64,
    pub order_b: Option<f64>,
    pub error_a: Option<f64>,
    pub order_a: Option<f64>,
}

/// Runs `base` on each mesh and compares with the exact solution.
pub fn converge(base: &RunConfig, meshes: &[Vec<usize>], cfl: CflSchedule) -> Result<Vec<ConvergenceRow>> {
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (level, mesh) in meshes.iter().enumerate() {
        let cfg = RunConfig {
            mesh: mesh.clone(),
            cfl: cfl.at(level),
            snapshots: 0,
            out_dir: None,
            record_series: false,
            ..base.clone()
        };
        let out = run(&cfg)?;
        let sim = &out.sim;
        let (q_ref, a_ref) = sim
            .exact()
            .ok_or_else(|| MhdError::Config(format!("{} has no exact solution", cfg.problem)))??;
        let error_b = diagnostics::b_error(&sim.q, &q_ref)?;
        let error_a = if cfg.ct {
            Some(diagnostics::a_error(&sim.a, &a_ref)?)
        } else {
            None
        };
        let prev = rows.last();
        let order = |e: f64, p: Option<f64>| p.filter(|&p| p > 0.0 && e > 0.0).map(|p| (p / e).log2());
        let row = ConvergenceRow {
            mesh: mesh.clone(),
            cfl: cfg.cfl,
            error_b,
            order_b: order(error_b, prev.map(|r| r.error_b)),
            error_a,
            order_a: match (error_a, prev.and_then(|r| r.error_a)) {
                (Some(e), p) => order(e, p),
                _ => None,
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Meshes `base * 2^k` for `k < levels`.
pub fn doubling_meshes(base: &[usize], levels: usize) -> Vec<Vec<usize>> {
    (0..levels).map(|k| base.iter().map(|&n| n << k).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let c = RunConfig::new(ProblemId::Rotor);
        assert!(c.validate().is_ok());
        assert!(c.pp && c.energy_correction());
        assert!(c.clone().with_cfl(0.0).validate().is_err());
        assert!(c.clone().with_cfl(1.5).validate().is_err());
        assert!(c.clone().with_mesh(&[10]).validate().is_err());
        assert!(!c.with_pp(false).energy_correction());
    }

    #[test]
    fn cfl_schedule() {
        assert_eq!(CflSchedule::Fixed(0.5).at(3), 0.5);
        assert_eq!(CflSchedule::HalvedPerDoubling(0.5).at(2), 0.125);
        assert_eq!(doubling_meshes(&[32, 64], 3)[2], vec![128, 256]);
    }
}
