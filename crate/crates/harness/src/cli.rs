use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use frame_gridding::edge::EpsilonPolicy;
use frame_gridding::gridding::{Filter, Truncation};
use frame_gridding::window::WindowSpec;

use crate::config::{
    BandwidthPolicy, Command, ExperimentConfig, FunctionId, Method, NoiseSpec, SamplingSpec,
};
use crate::error::{HarnessError, Result};
use crate::experiments::{self, RunOutput};
use crate::regress::{self, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "fgrid", version, about = "Reconstruction and edge detection from non-uniform Fourier samples")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Write sampling frequencies and Fourier data.
    Sample(Common),
    /// Write trapezoidal and optimal density compensation factors.
    Dcf(Common),
    /// Reconstruct the function on a uniform grid.
    Reconstruct(Common),
    /// Sweep n and bandwidth policies, recording errors.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated half-counts.
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        n_list: Vec<usize>,
        /// Comma-separated bandwidth policies.
        #[arg(long, value_delimiter = ',', default_value = "1,log,full")]
        r_list: Vec<BandwidthPolicy>,
    },
    /// Compute the edge map and detected jumps.
    Edges {
        #[command(flatten)]
        common: Common,
        /// Where to write the detected jumps (default: `<out stem>_jumps.csv`).
        #[arg(long)]
        jumps_out: Option<PathBuf>,
    },
    /// Re-run CSV baselines in a directory and compare.
    Regress {
        dir: PathBuf,
        /// Per-column absolute tolerance, `column=value`; repeatable.
        #[arg(long = "tol")]
        tolerances: Vec<String>,
        /// Absolute tolerance for unlisted columns.
        #[arg(long, default_value_t = 1e-10)]
        default_tol: f64,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value = "ex41")]
    function: FunctionId,
    /// CSV of `lambda, re, im` rows used instead of generated samples.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, default_value = "jittered:n=32,theta=0.25")]
    sampling: SamplingSpec,
    #[arg(long, default_value = "exp:a=5e-5")]
    window: WindowSpec,
    #[arg(long, default_value = "fcg")]
    method: Method,
    /// DCF bandwidth: integer, `log`, or `full`.
    #[arg(long, default_value = "log")]
    r: BandwidthPolicy,
    #[arg(long, default_value_t = 1.0)]
    m_factor: f64,
    /// Evaluation grid size (default max(1024, 4(2m+1))).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `sigma=<real>`
    #[arg(long)]
    noise: Option<NoiseSpec>,
    /// Gridding truncation radius or `full`.
    #[arg(long, default_value = "full")]
    q: Truncation,
    /// `none` or `exp:p=<int>,c=<real>`.
    #[arg(long, default_value = "none")]
    filter: Filter,
    /// Keep only the real part of the optimal DCFs.
    #[arg(long)]
    dcf_real: bool,
    /// `const:<v>` or `power:<c>,<gamma>`.
    #[arg(long, default_value = "const:0.02")]
    eps_policy: EpsilonPolicy,
    #[arg(long, default_value_t = 0.3)]
    threshold: f64,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self, command: Command) -> ExperimentConfig {
        ExperimentConfig {
            command,
            function: self.function,
            sampling: self.sampling,
            samples_file: self.samples.clone(),
            window: self.window,
            method: self.method,
            r: self.r,
            m_factor: self.m_factor,
            grid: self.grid,
            seed: self.seed,
            noise: self.noise,
            q: self.q,
            filter: self.filter,
            dcf_real: self.dcf_real,
            eps_policy: self.eps_policy,
            threshold: self.threshold,
            ..ExperimentConfig::new(command)
        }
    }
}

fn jumps_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "edges".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_jumps.csv"))
}

fn emit(cfg: &ExperimentConfig, run: &RunOutput, paths: &[Option<PathBuf>]) -> Result<()> {
    let stdout = std::io::stdout();
    for (i, table) in run.tables.iter().enumerate() {
        match paths.get(i).cloned().flatten() {
            Some(p) => table.save(cfg, &p)?,
            None => {
                let mut lock = stdout.lock();
                if i > 0 {
                    writeln!(lock)?;
                }
                table.write_csv(cfg, &mut lock)?;
            }
        }
    }
    let report = serde_json::to_string(&run.report).expect("report serializes");
    eprintln!("{report}");
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let (cfg, paths) = match cli.command {
        Sub::Sample(c) => (c.config(Command::Sample), vec![c.out]),
        Sub::Dcf(c) => (c.config(Command::Dcf), vec![c.out]),
        Sub::Reconstruct(c) => (c.config(Command::Reconstruct), vec![c.out]),
        Sub::Convergence { common, n_list, r_list } => {
            let mut cfg = common.config(Command::Convergence);
            cfg.n_list = n_list;
            cfg.r_list = r_list;
            (cfg, vec![common.out])
        }
        Sub::Edges { common, jumps_out } => {
            let jumps = jumps_out.or_else(|| common.out.as_deref().map(jumps_path));
            (common.config(Command::Edges), vec![common.out, jumps])
        }
        Sub::Regress {
            dir,
            tolerances,
            default_tol,
        } => return regress_cmd(&dir, &tolerances, default_tol),
    };
    cfg.validate()?;
    let run = experiments::run(&cfg)?;
    emit(&cfg, &run, &paths)
}

fn regress_cmd(dir: &Path, specs: &[String], default_tol: f64) -> Result<()> {
    let mut tol = Tolerances {
        default: default_tol,
        ..Tolerances::default()
    };
    for s in specs {
        tol.add(s)?;
    }
    let outcomes = regress::check_dir(dir, &tol)?;
    let mut failed = 0;
    for o in &outcomes {
        if o.passed() {
            println!("ok    {}", o.path.display());
        } else {
            failed += 1;
            println!("FAIL  {} ({} mismatches)", o.path.display(), o.mismatches.len());
            for m in o.mismatches.iter().take(5) {
                println!("      {m}");
            }
        }
    }
    if failed > 0 {
        return Err(HarnessError::Regression(format!(
            "{failed} of {} baselines differ",
            outcomes.len()
        )));
    }
    Ok(())
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fgrid: {e}");
            e.exit_code()
        }
    }
}
