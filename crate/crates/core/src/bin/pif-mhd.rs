use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pif_mhd::config::{self, Settings};
use pif_mhd::driver::{self, CflSchedule};
use pif_mhd::output;

#[derive(Parser)]
#[command(name = "pif-mhd", version, about = "Single-step WENO ideal MHD solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one problem to its final time.
    Run(Common),
    /// Run a problem with an exact solution on successively doubled meshes.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Number of meshes (the base mesh doubled each time).
        #[arg(long)]
        levels: Option<usize>,
        /// `fixed` or `halved` (CFL halved at every doubling).
        #[arg(long)]
        cfl_schedule: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// NX[,NY[,NZ]]
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// on | off
    #[arg(long)]
    ct: Option<String>,
    /// on | off
    #[arg(long)]
    pp: Option<String>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn settings(&self) -> pif_mhd::Result<Settings> {
        let mut s = match &self.config {
            Some(p) => config::read_settings(p)?,
            None => Settings::new(),
        };
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        };
        set("problem", self.problem.clone());
        set("mesh", self.mesh.clone());
        set("cfl", self.cfl.map(|v| v.to_string()));
        set("tfinal", self.tfinal.map(|v| v.to_string()));
        set("ct", self.ct.clone());
        set("pp", self.pp.clone());
        set("nu", self.nu.map(|v| v.to_string()));
        set("gamma", self.gamma.map(|v| v.to_string()));
        set("out", self.out.as_ref().map(|p| p.display().to_string()));
        set("snapshots", self.snapshots.map(|v| v.to_string()));
        set("threads", self.threads.map(|v| v.to_string()));
        Ok(s)
    }
}

fn init_threads(n: Option<usize>) {
    if let Some(n) = n {
        // Fails only if the pool already exists; the default pool is fine then.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> pif_mhd::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(common) => {
            let r = config::resolve(&common.settings()?)?;
            init_threads(r.threads);
            let out = driver::run(&r.run)?;
            print!("{}", output::summary_text(&out.summary));
        }
        Command::Converge {
            common,
            levels,
            cfl_schedule,
        } => {
            let mut s = common.settings()?;
            if let Some(l) = levels {
                s.insert("levels".into(), l.to_string());
            }
            if let Some(c) = cfl_schedule {
                s.insert("cfl_schedule".into(), c);
            }
            let r = config::resolve(&s)?;
            init_threads(r.threads);
            let schedule = if r.halve_cfl {
                CflSchedule::HalvedPerDoubling(r.run.cfl)
            } else {
                CflSchedule::Fixed(r.run.cfl)
            };
            let meshes = driver::doubling_meshes(&r.run.mesh, r.levels);
            let rows = driver::converge(&r.run, &meshes, schedule)?;
            let csv = output::convergence_csv(&rows);
            if let Some(dir) = &r.run.out_dir {
                std::fs::create_dir_all(dir)?;
                output::write_convergence_csv(&dir.join("convergence.csv"), &rows)?;
            }
            print!("{csv}");
        }
    }
    Ok(())
}
