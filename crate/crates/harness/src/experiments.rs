//! Experiment runners. Each returns its tables plus a [`RunReport`]; writing
//! files is left to the caller.

use std::path::Path;
use std::time::Instant;

use frame_gridding::dcf::{self, DcfField, DcfOperator};
use frame_gridding::edge::{self, Bump, CoefficientMap, EdgeConfig, EdgeMethod};
use frame_gridding::frame::{self, CoefficientVector, SpectralSystem};
use frame_gridding::gridding::{self, Truncation};
use frame_gridding::sampling::SamplingPattern;
use frame_gridding::testfns::PiecewiseFunction;
use frame_gridding::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::config::{Command, ExperimentConfig, Method};
use crate::error::{HarnessError, Result};
use crate::table::{Cell, Table};

/// Keeps the noise stream independent of the jitter stream for equal seeds.
const NOISE_STREAM: u64 = 0x6e6f_6973_6500_0001;

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub max_error: Option<f64>,
    pub l2_error: Option<f64>,
    pub condition_number: Option<f64>,
    /// `‖TD − Ψ*‖_F / ‖Ψ*‖_F` for the density compensation in use.
    pub dcf_residual: Option<f64>,
    pub imaginary_residue: Option<f64>,
    pub detected_jumps: Option<usize>,
    pub timings: Vec<StageTiming>,
}

impl RunReport {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        self.timings.push(StageTiming {
            stage: stage.to_owned(),
            seconds: start.elapsed().as_secs_f64(),
        });
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub report: RunReport,
}

/// Frequencies and `f̂` values for one run.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub pattern: SamplingPattern,
    pub fhat: Vec<Complex64>,
}

pub fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut lambdas = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    HarnessError::Config(format!(
                        "{}: data row {} needs numeric lambda, re, im",
                        path.display(),
                        i + 1
                    ))
                })
        };
        lambdas.push(field(0)?);
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    Ok((lambdas, values))
}

/// `σ/√2` per real component, so `E|noise|² = σ²`.
pub fn add_noise(fhat: &mut [Complex64], sigma: f64, seed: u64) {
    if sigma == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ NOISE_STREAM);
    let normal = Normal::new(0.0, sigma / std::f64::consts::SQRT_2).expect("finite sigma");
    for z in fhat.iter_mut() {
        let re = normal.sample(&mut rng);
        let im = normal.sample(&mut rng);
        *z += Complex64::new(re, im);
    }
}

pub fn sample_set(cfg: &ExperimentConfig, n: usize) -> Result<SampleSet> {
    let (pattern, mut fhat) = match &cfg.samples_file {
        Some(path) => {
            let (lambdas, values) = read_samples(path)?;
            (SamplingPattern::custom(lambdas)?, values)
        }
        None => {
            let pattern = cfg.sampling.with_n(n).build(cfg.seed)?;
            let fhat = cfg.function.build().fourier_samples(pattern.lambdas())?;
            (pattern, fhat)
        }
    };
    if let Some(noise) = cfg.noise {
        add_noise(&mut fhat, noise.sigma, cfg.seed);
    }
    Ok(SampleSet { pattern, fhat })
}

fn system(cfg: &ExperimentConfig, pattern: &SamplingPattern) -> Result<SpectralSystem> {
    let m = frame::truncation_for(pattern.n(), cfg.m_factor)?;
    Ok(SpectralSystem::build(pattern, cfg.window, m)?)
}

fn grid_size(cfg: &ExperimentConfig, sys: &SpectralSystem) -> usize {
    cfg.grid.unwrap_or_else(|| frame::default_grid_size(sys.m()))
}

fn field(cfg: &ExperimentConfig) -> DcfField {
    if cfg.dcf_real {
        DcfField::Real
    } else {
        DcfField::Complex
    }
}

/// Density compensation for the gridding methods at bandwidth `r`.
pub fn dcf_for(cfg: &ExperimentConfig, sys: &SpectralSystem, r: usize) -> Result<DcfOperator> {
    Ok(match cfg.method {
        Method::Cg => dcf::trapezoid(sys.pattern()),
        Method::Fcg | Method::Fa => dcf::optimal_banded(sys, r, field(cfg))?,
    })
}

/// Coefficients `c_l`, `|l| ≤ m`, for the configured method and bandwidth.
pub fn coefficients(
    cfg: &ExperimentConfig,
    sys: &SpectralSystem,
    fhat: &[Complex64],
    r: usize,
    report: &mut RunReport,
) -> Result<CoefficientVector> {
    let mut coeffs = match cfg.method {
        Method::Fa => report.time("pseudo-inverse", || Ok(frame::frame_coeffs(sys, fhat)?))?,
        Method::Cg | Method::Fcg => {
            let d = report.time("dcf", || dcf_for(cfg, sys, r))?;
            if cfg.method == Method::Fcg {
                report.dcf_residual = Some(
                    dcf::objective(sys, &d)? / sys.psi_adjoint().frobenius_norm(),
                );
            }
            report.time("gridding", || {
                if d.is_diagonal() {
                    Ok(gridding::regrid(sys, &d, fhat, cfg.q)?)
                } else if cfg.q == Truncation::Full {
                    Ok(dcf::fcg_coeffs(sys, &d, fhat)?)
                } else {
                    Err(HarnessError::Config(
                        "--q truncation needs diagonal DCFs (r = 1 or --method cg)".into(),
                    ))
                }
            })?
        }
    };
    cfg.filter.apply(&mut coeffs);
    Ok(coeffs)
}

pub struct ErrorSummary {
    pub max: f64,
    pub l2: f64,
}

/// Max and discrete `L²[0,1]` norms of pointwise errors.
pub fn summarize(errors: &[f64]) -> ErrorSummary {
    let max = errors.iter().fold(0.0f64, |a, &e| a.max(e));
    let l2 = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len().max(1) as f64).sqrt();
    ErrorSummary { max, l2 }
}

fn truth_errors(f: &PiecewiseFunction, values: &[Complex64]) -> Result<Vec<(f64, f64, f64)>> {
    frame::grid_points(values.len())
        .into_iter()
        .zip(values)
        .map(|(x, v)| Ok((x, v.re, f.eval(x)?)))
        .collect()
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.command {
        Command::Sample => run_sample(cfg),
        Command::Dcf => run_dcf_dump(cfg),
        Command::Reconstruct => run_reconstruction(cfg),
        Command::Convergence => run_convergence(cfg),
        Command::Edges => run_edges(cfg),
    }
}

pub fn run_sample(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let set = sample_set(cfg, cfg.sampling.n())?;
    let mut t = Table::new("samples", &["lambda", "fhat_re", "fhat_im"]);
    for (&l, z) in set.pattern.lambdas().iter().zip(&set.fhat) {
        t.push(vec![l.into(), z.re.into(), z.im.into()]);
    }
    Ok(RunOutput {
        tables: vec![t],
        report: RunReport::default(),
    })
}

/// Diagonal runs list one row per sample; banded runs list nonzero triplets.
pub fn run_dcf_dump(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut report = RunReport::default();
    let set = sample_set(cfg, cfg.sampling.n())?;
    let sys = report.time("assemble", || system(cfg, &set.pattern))?;
    let r = cfg.r.resolve(set.pattern.n())?;
    let optimal = report.time("dcf", || Ok(dcf::optimal_banded(&sys, r, field(cfg))?))?;
    report.dcf_residual = Some(dcf::objective(&sys, &optimal)? / sys.psi_adjoint().frobenius_norm());
    let lambdas = set.pattern.lambdas();
    let table = if optimal.is_diagonal() {
        let trap = dcf::trapezoid(&set.pattern).diagonal_values();
        let mut t = Table::new(
            "dcf",
            &["index", "lambda", "trapezoid", "optimal_re", "optimal_im"],
        );
        for (k, (a, b)) in trap.iter().zip(optimal.diagonal_values()).enumerate() {
            let index = k as i64 - set.pattern.n() as i64;
            t.push(vec![index.into(), lambdas[k].into(), a.re.into(), b.re.into(), b.im.into()]);
        }
        t
    } else {
        let mut t = Table::new("dcf-banded", &["row", "col", "re", "im"]);
        for (i, j, v) in optimal.triplets() {
            let n = set.pattern.n() as i64;
            t.push(vec![(i as i64 - n).into(), (j as i64 - n).into(), v.re.into(), v.im.into()]);
        }
        t
    };
    Ok(RunOutput {
        tables: vec![table],
        report,
    })
}

pub fn run_reconstruction(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut report = RunReport::default();
    let set = sample_set(cfg, cfg.sampling.n())?;
    let sys = report.time("assemble", || system(cfg, &set.pattern))?;
    let r = cfg.r.resolve(set.pattern.n())?;
    let coeffs = coefficients(cfg, &sys, &set.fhat, r, &mut report)?;
    let values = report.time("evaluate", || {
        Ok(frame::evaluate(&coeffs, sys.window(), grid_size(cfg, &sys))?)
    })?;
    report.condition_number = report.time("condition", || Ok(Some(sys.psi().condition_number()?)))?;
    let f = cfg.function.build();
    let mut t = Table::new("reconstruction", &["x", "reconstruction", "truth", "abs_error"]);
    let mut errors = Vec::with_capacity(values.len());
    for (x, v, truth) in truth_errors(&f, &values)? {
        let e = (v - truth).abs();
        errors.push(e);
        t.push(vec![x.into(), v.into(), truth.into(), e.into()]);
    }
    let s = summarize(&errors);
    report.max_error = Some(s.max);
    report.l2_error = Some(s.l2);
    Ok(RunOutput {
        tables: vec![t],
        report,
    })
}

/// One row per `(n, r-policy)`. The `fa` method ignores the policy.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut report = RunReport::default();
    let f = cfg.function.build();
    let mut t = Table::new(
        "convergence",
        &["n", "policy", "r", "max_error", "l2_error"],
    );
    for &n in &cfg.n_list {
        let set = sample_set(cfg, n)?;
        let sys = report.time(&format!("assemble n={n}"), || system(cfg, &set.pattern))?;
        let grid = grid_size(cfg, &sys);
        for &policy in &cfg.r_list {
            let r = policy.resolve(n)?;
            let mut inner = RunReport::default();
            let coeffs = coefficients(cfg, &sys, &set.fhat, r, &mut inner)?;
            report.timings.extend(inner.timings.into_iter().map(|mut s| {
                s.stage = format!("{} n={n} r={r}", s.stage);
                s
            }));
            let values = frame::evaluate(&coeffs, sys.window(), grid)?;
            let errors: Vec<f64> = truth_errors(&f, &values)?
                .into_iter()
                .map(|(_, v, truth)| (v - truth).abs())
                .collect();
            let s = summarize(&errors);
            t.push(vec![
                n.into(),
                Cell::Text(policy.to_string()),
                r.into(),
                s.max.into(),
                s.l2.into(),
            ]);
        }
    }
    Ok(RunOutput {
        tables: vec![t],
        report,
    })
}

pub fn edge_config(cfg: &ExperimentConfig, n: usize) -> Result<EdgeConfig> {
    let method = match cfg.method {
        Method::Fa => EdgeMethod::Fa,
        Method::Cg => EdgeMethod::CgTrapezoid,
        Method::Fcg => EdgeMethod::Fcg { r: cfg.r.resolve(n)? },
    };
    let ec = EdgeConfig {
        epsilon: cfg.eps_policy.epsilon(n),
        bump: Bump::gaussian(5.0)?,
        threshold: cfg.threshold,
        method,
        ..EdgeConfig::default()
    };
    ec.validate()?;
    Ok(ec)
}

/// Edge map on the grid plus detected jumps matched to the nearest true jump.
pub fn run_edges(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut report = RunReport::default();
    let set = sample_set(cfg, cfg.sampling.n())?;
    let sys = report.time("assemble", || system(cfg, &set.pattern))?;
    let ec = edge_config(cfg, set.pattern.n())?;
    let map = report.time("coefficient map", || {
        Ok(match (ec.method, cfg.dcf_real) {
            (EdgeMethod::Fcg { r }, true) => CoefficientMap::Gridding(dcf::optimal_banded(
                &sys,
                r.min(dcf::full_bandwidth(sys.n())),
                DcfField::Real,
            )?),
            _ => CoefficientMap::for_method(&sys, ec.method)?,
        })
    })?;
    let grid = grid_size(cfg, &sys);
    let em = report.time("edge map", || Ok(edge::edge_map(&sys, &map, &ec, &set.fhat, grid)?))?;
    let jumps = edge::locate_jumps(&em.values, &ec)?;
    let f = cfg.function.build();
    let truth = f.jumps();

    let mut field_t = Table::new(
        "edge-field",
        &["x", "edge_map", "target_edge_field", "abs_error"],
    );
    let mut errors = Vec::with_capacity(grid);
    for (x, &v) in frame::grid_points(grid).into_iter().zip(&em.values) {
        let target = f.jump_field(x, |u| ec.bump.eval(u), ec.epsilon);
        let e = (v - target).abs();
        errors.push(e);
        field_t.push(vec![x.into(), v.into(), target.into(), e.into()]);
    }
    let mut jump_t = Table::new(
        "jumps",
        &["location", "amplitude", "true_location", "true_amplitude"],
    );
    for p in &jumps.peaks {
        let nearest = truth
            .iter()
            .min_by(|a, b| {
                (a.location - p.location)
                    .abs()
                    .total_cmp(&(b.location - p.location).abs())
            })
            .filter(|j| (j.location - p.location).abs() <= ec.epsilon);
        jump_t.push(vec![
            p.location.into(),
            p.amplitude.into(),
            nearest.map(|j| j.location).into(),
            nearest.map(|j| j.amplitude).into(),
        ]);
    }
    let s = summarize(&errors);
    report.max_error = Some(s.max);
    report.l2_error = Some(s.l2);
    report.imaginary_residue = Some(em.imaginary_residue);
    report.detected_jumps = Some(jumps.peaks.len());
    Ok(RunOutput {
        tables: vec![field_t, jump_t],
        report,
    })
}
