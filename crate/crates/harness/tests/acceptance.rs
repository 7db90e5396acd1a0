//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use frame_gridding::dcf::{self, DcfField};
use frame_gridding::edge::{self, CoefficientMap, EdgeConfig, EdgeMethod};
use frame_gridding::frame::{self, SpectralSystem};
use frame_gridding::linalg;
use frame_gridding::sampling::SamplingPattern;
use frame_gridding::testfns::PiecewiseFunction;
use frame_gridding::window::WindowSpec;
use frame_gridding::Complex64;
use harness::config::{BandwidthPolicy, Command, ExperimentConfig, Method, SamplingSpec};
use harness::experiments;
use harness::table::Table;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXP_A: f64 = 5e-5;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn exp_window() -> WindowSpec {
    WindowSpec::exponential(EXP_A).unwrap()
}

fn column(t: &Table, name: &str) -> Vec<f64> {
    t.numbers(name).unwrap_or_else(|| panic!("table {} has no column {name}", t.name))
}

/// Adaptive 7/15-point Gauss–Kronrod, kept separate from the library's
/// Gauss–Legendre machinery so the closed forms face an independent oracle.
mod kronrod {
    use super::Complex64;

    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_18,
        0.140_653_259_715_525_92,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_83,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];

    fn panel(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mid = f(c);
        let mut k = mid * WGK[7];
        let mut g = mid * WG[3];
        for i in 0..7 {
            let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
            k += pair * WGK[i];
            if i % 2 == 1 {
                g += pair * WG[i / 2];
            }
        }
        (k * h, ((k - g) * h).norm())
    }

    pub fn integrate(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, panels: usize, tol: f64) -> Complex64 {
        let mut stack: Vec<(f64, f64, u32)> = (0..panels)
            .map(|i| {
                let w = (b - a) / panels as f64;
                (a + i as f64 * w, a + (i + 1) as f64 * w, 0)
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        while let Some((lo, hi, depth)) = stack.pop() {
            let (val, err) = panel(f, lo, hi);
            if err <= tol * (hi - lo) || depth >= 16 {
                total += val;
            } else {
                let mid = 0.5 * (lo + hi);
                stack.push((lo, mid, depth + 1));
                stack.push((mid, hi, depth + 1));
            }
        }
        total
    }

    /// Integral over `[0,1]` split at the given interior breakpoints.
    pub fn on_unit(f: &dyn Fn(f64) -> Complex64, breaks: &[f64], freq: f64) -> Complex64 {
        let mut pts = vec![0.0];
        pts.extend_from_slice(breaks);
        pts.push(1.0);
        pts.windows(2)
            .map(|w| {
                let panels = 2 + ((w[1] - w[0]) * freq.abs()).ceil() as usize;
                integrate(f, w[0], w[1], panels, 1e-13)
            })
            .sum()
    }
}

/// `Σ_{|l|≤m} f̂(l) e^{2πilx}` by direct summation.
fn partial_sum(coeffs: &[Complex64], x: f64) -> f64 {
    let m = (coeffs.len() / 2) as i64;
    (-m..=m)
        .zip(coeffs)
        .map(|(l, c)| c * Complex64::from_polar(1.0, 2.0 * PI * l as f64 * x))
        .sum::<Complex64>()
        .re
}

fn criterion_1() -> Verdict {
    let f = PiecewiseFunction::smooth_example();
    let grid = 1024;
    let coeffs: Vec<Complex64> = (-32..=32).map(|l| f.fourier(l as f64).unwrap()).collect();
    let target: Vec<f64> = (0..grid)
        .map(|p| partial_sum(&coeffs, p as f64 / grid as f64))
        .collect();
    let runs: [(Method, BandwidthPolicy, &str); 5] = [
        (Method::Fa, BandwidthPolicy::Log, "fa"),
        (Method::Fcg, BandwidthPolicy::Fixed(1), "fcg r=1"),
        (Method::Fcg, BandwidthPolicy::Fixed(3), "fcg r=3"),
        (Method::Fcg, BandwidthPolicy::Full, "fcg r=full"),
        (Method::Cg, BandwidthPolicy::Fixed(1), "cg q=full"),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (method, r, label) in runs {
        let mut cfg = ExperimentConfig::new(Command::Reconstruct);
        cfg.sampling = SamplingSpec::Uniform { n: 32 };
        cfg.window = WindowSpec::Constant;
        cfg.method = method;
        cfg.r = r;
        cfg.grid = Some(grid);
        let out = experiments::run(&cfg).unwrap();
        let rec = column(&out.tables[0], "reconstruction");
        let dev = rec
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        parts.push(format!("{label} {dev:.1e}"));
    }
    verdict(worst <= 1e-10, format!("max deviation {worst:.2e} <= 1e-10 ({})", parts.join(", ")))
}

fn criterion_2() -> Verdict {
    let f = PiecewiseFunction::smooth_example();
    let p = SamplingPattern::jittered(16, 0.25, 0).unwrap();
    let sys = SpectralSystem::build(&p, exp_window(), 16).unwrap();
    let fhat = f.fourier_samples(p.lambdas()).unwrap();
    let d = dcf::optimal_banded(&sys, dcf::full_bandwidth(16), DcfField::Complex).unwrap();
    let c = dcf::fcg_coeffs(&sys, &d, &fhat).unwrap();
    let fa = frame::frame_coeffs(&sys, &fhat).unwrap();
    let diff: Vec<Complex64> = c.values().iter().zip(fa.values()).map(|(a, b)| a - b).collect();
    let ratio = linalg::norm(&diff) / linalg::norm(&fhat);
    verdict(ratio <= 1e-6, format!("||c_fcg - d_fa|| / ||fhat|| = {ratio:.2e} <= 1e-6"))
}

fn l2_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() / a.len() as f64).sqrt()
}

fn criterion_3() -> Verdict {
    let f = PiecewiseFunction::smooth_example();
    let mut ok = true;
    let mut tightest = f64::INFINITY;
    let mut rows = Vec::new();
    for n in [16usize, 32] {
        for (name, p) in [
            ("jittered", SamplingPattern::jittered(n, 0.25, 0).unwrap()),
            ("log", SamplingPattern::logarithmic(n, 1.0).unwrap()),
        ] {
            let sys = SpectralSystem::build(&p, exp_window(), n).unwrap();
            let fhat = f.fourier_samples(p.lambdas()).unwrap();
            let fa = frame::evaluate(&frame::frame_coeffs(&sys, &fhat).unwrap(), sys.window(), 1024).unwrap();
            for r in [1usize, 3] {
                let d = dcf::optimal_banded(&sys, r, DcfField::Complex).unwrap();
                let cg = frame::evaluate(&dcf::fcg_coeffs(&sys, &d, &fhat).unwrap(), sys.window(), 1024).unwrap();
                let dist = l2_distance(&cg, &fa);
                let bound = dcf::link_bound(&sys, &d, &fhat).unwrap();
                ok &= dist <= bound;
                tightest = tightest.min(bound / dist);
                rows.push(format!("{name} n={n} r={r}: {dist:.2e} <= {bound:.2e}"));
            }
        }
    }
    verdict(ok, format!("smallest bound/distance ratio {tightest:.2} over 8 cases [{}]", rows.join("; ")))
}

/// Golden-section minimizer of a unimodal scalar function on `[lo, hi]`.
fn golden_section(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while hi - lo > 1e-12 {
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        }
    }
    0.5 * (lo + hi)
}

fn criterion_4() -> Verdict {
    let mut worst: f64 = 0.0;
    for p in [
        SamplingPattern::jittered(32, 0.25, 0).unwrap(),
        SamplingPattern::logarithmic(32, 1.0).unwrap(),
    ] {
        let sys = SpectralSystem::build(&p, exp_window(), 32).unwrap();
        let t = sys.t_matrix().unwrap();
        let target = sys.psi_adjoint();
        let d = dcf::optimal_diagonal(&sys, DcfField::Complex).unwrap();
        for (j, alpha) in d.diagonal_values().into_iter().enumerate() {
            let tj = t.column(j);
            let pj = target.column(j);
            let resid = |a: Complex64| -> f64 {
                tj.iter().zip(&pj).map(|(x, y)| (a * x - y).norm_sqr()).sum::<f64>().sqrt()
            };
            // the objective is a separable quadratic in (Re a, Im a)
            let re = golden_section(|x| resid(Complex64::new(x, 0.0)), -50.0, 50.0);
            let im = golden_section(|y| resid(Complex64::new(re, y)), -50.0, 50.0);
            worst = worst.max((Complex64::new(re, im) - alpha).norm());
        }
    }
    verdict(worst <= 1e-6, format!("max |alpha' - brute force| = {worst:.2e} <= 1e-6 over 2 x 65 columns"))
}

fn convergence(sampling: SamplingSpec, r: BandwidthPolicy) -> Vec<f64> {
    let mut cfg = ExperimentConfig::new(Command::Convergence);
    cfg.sampling = sampling;
    cfg.method = Method::Fcg;
    cfg.r_list = vec![r];
    cfg.grid = Some(1024);
    let out = experiments::run(&cfg).unwrap();
    column(&out.tables[0], "max_error")
}

fn criterion_5() -> Verdict {
    let jit = convergence(SamplingSpec::Jittered { n: 16, theta: 0.25 }, BandwidthPolicy::Log);
    let log = convergence(SamplingSpec::Log { n: 16, v: 1.0 }, BandwidthPolicy::Fixed(1));
    let decreasing = jit.windows(2).all(|w| w[1] < w[0]);
    let tenfold = jit[3] <= jit[0] / 10.0;
    let stalls = log[3] >= log[0] / 2.0;
    let fmt = |v: &[f64]| v.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" ");
    verdict(
        decreasing && tenfold && stalls,
        format!(
            "jittered r=log2 n: [{}] strictly decreasing {decreasing}, err(128) <= err(16)/10 {tenfold}; \
             log r=1: [{}] err(128) >= err(16)/2 {stalls}",
            fmt(&jit),
            fmt(&log)
        ),
    )
}

fn criterion_6() -> Verdict {
    let p = SamplingPattern::jittered(64, 0.25, 0).unwrap();
    let sys = SpectralSystem::build(&p, exp_window(), 64).unwrap();
    let psi = sys.psi();
    // envelope: largest |Ψ[j,l]| in each unit bin of distance |λ_j − l|
    let mut envelope = vec![0.0f64; 130];
    for (j, &lam) in p.lambdas().iter().enumerate() {
        for (li, v) in psi.row(j).iter().enumerate() {
            let dist = (li as f64 - 64.0 - lam).abs();
            let bin = dist.floor() as usize;
            envelope[bin] = envelope[bin].max(v.norm());
        }
    }
    let pts: Vec<(f64, f64)> = envelope
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| **v > 0.0)
        .map(|(b, v)| ((1.0 + b as f64).ln(), v.ln()))
        .collect();
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / k, sy / k);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    verdict(slope <= -0.9, format!("log-log envelope slope {slope:.3} <= -0.9 over {} distance bins", pts.len()))
}

fn criterion_7() -> Verdict {
    let truth = PiecewiseFunction::jump_example().jumps();
    let grid = 2048;
    let cell = 1.0 / grid as f64;
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, p) in [
        ("jittered", SamplingPattern::jittered(512, 0.25, 0).unwrap()),
        ("log", SamplingPattern::logarithmic(512, 1.0).unwrap()),
    ] {
        let sys = SpectralSystem::build(&p, exp_window(), 512).unwrap();
        let cfg = EdgeConfig {
            method: EdgeMethod::Fcg { r: 25 },
            threshold: 0.3,
            ..EdgeConfig::default()
        };
        let map = CoefficientMap::for_method(&sys, cfg.method).unwrap();
        let detect = |f: &PiecewiseFunction| {
            let fhat = f.fourier_samples(p.lambdas()).unwrap();
            let em = edge::edge_map(&sys, &map, &cfg, &fhat, grid).unwrap();
            edge::locate_jumps(&em.values, &cfg).unwrap()
        };
        let est = detect(&PiecewiseFunction::jump_example());
        let mut worst_cells: f64 = 0.0;
        let mut worst_rel: f64 = 0.0;
        let mut signs = true;
        let six = est.peaks.len() == truth.len();
        if six {
            for (peak, jump) in est.peaks.iter().zip(&truth) {
                worst_cells = worst_cells.max((peak.location - jump.location).abs() / cell);
                worst_rel = worst_rel.max((peak.amplitude - jump.amplitude).abs() / jump.amplitude.abs());
                signs &= peak.amplitude.signum() == jump.amplitude.signum();
            }
        }
        let null = detect(&PiecewiseFunction::smooth_example()).peaks.len();
        let pass = six && worst_cells <= 2.0 && signs && worst_rel <= 0.2 && null == 0;
        ok &= pass;
        notes.push(format!(
            "{name}: {} peaks, max offset {worst_cells:.0} cells, max amplitude error {:.1}%, signs {signs}, smooth-null peaks {null}",
            est.peaks.len(),
            100.0 * worst_rel
        ));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(20_231_017);
    let mut worst = [0.0f64; 4];
    for _ in 0..200 {
        let a = 10f64.powf(rng.random_range(-6.0..0.7));
        let w = WindowSpec::exponential(a).unwrap();
        let xi: f64 = rng.random_range(-150.0..150.0);
        let q = kronrod::on_unit(
            &|x| Complex64::from_polar(w.eval(x).unwrap(), -2.0 * PI * xi * x),
            &[0.5],
            xi,
        );
        worst[0] = worst[0].max((w.transform(xi) - q).norm());
        let beta: f64 = rng.random_range(-600.0..600.0);
        let q = kronrod::on_unit(
            &|x| Complex64::from_polar(1.0 / w.eval(x).unwrap(), beta * x),
            &[0.5],
            beta / (2.0 * PI),
        );
        worst[1] = worst[1].max((w.recip_moment(beta) - q).norm());
    }
    for (slot, f) in [(2, PiecewiseFunction::smooth_example()), (3, PiecewiseFunction::jump_example())] {
        let mut breaks: Vec<f64> = f
            .pieces()
            .iter()
            .flat_map(|p| [p.lo, p.hi])
            .filter(|&x| x > 0.0 && x < 1.0)
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        for _ in 0..200 {
            let lambda: f64 = rng.random_range(-600.0..600.0);
            let q = kronrod::on_unit(
                &|x| Complex64::from_polar(f.eval(x).unwrap(), -2.0 * PI * lambda * x),
                &breaks,
                lambda,
            );
            worst[slot] = worst[slot].max((f.fourier(lambda).unwrap() - q).norm());
        }
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    verdict(
        max <= 1e-11,
        format!(
            "max |closed form - Gauss-Kronrod| over 200 points each: transform {:.1e}, recip_moment {:.1e}, ex41 {:.1e}, ex42 {:.1e} (<= 1e-11)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn fgrid(args: &[&str], dir: &Path, threads: usize) -> Vec<u8> {
    let status = Process::new(env!("CARGO_BIN_EXE_fgrid"))
        .args(args)
        .current_dir(dir)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("fgrid runs");
    assert!(status.status.success(), "fgrid {args:?}: {}", String::from_utf8_lossy(&status.stderr));
    let out = args.iter().position(|a| *a == "--out").map(|i| args[i + 1]).expect("--out given");
    std::fs::read(dir.join(out)).unwrap()
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["sample", "--sampling", "jittered:n=40,theta=0.25", "--seed", "9", "--noise", "sigma=0.01", "--out", "s.csv"],
        &["dcf", "--sampling", "log:n=32,v=1", "--r", "1", "--out", "d.csv"],
        &["reconstruct", "--sampling", "jittered:n=48,theta=0.25", "--seed", "3", "--r", "log", "--out", "r.csv"],
        &["convergence", "--sampling", "jittered:n=8,theta=0.25", "--n-list", "16,32", "--r-list", "1,log,full", "--out", "c.csv"],
        &["edges", "--function", "ex42", "--sampling", "jittered:n=96,theta=0.25", "--r", "6", "--grid", "1024", "--out", "e.csv"],
    ];
    let mut identical = 0;
    for args in runs {
        let reference = fgrid(args, dir.path(), 1);
        let same = [4usize, 4, 2].iter().all(|&t| fgrid(args, dir.path(), t) == reference);
        identical += usize::from(same);
    }
    verdict(
        identical == runs.len(),
        format!("{identical}/{} subcommands byte-identical across runs with 1, 2 and 4 worker threads", runs.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict, Duration); 9] = [
        ("orthonormal-limit exactness", criterion_1, Duration::from_secs(5)),
        ("banded to pseudo-inverse equivalence", criterion_2, Duration::from_secs(10)),
        ("gridding/frame link bound", criterion_3, Duration::from_secs(600)),
        ("optimal diagonal lemma", criterion_4, Duration::from_secs(600)),
        ("convergence trend", criterion_5, Duration::from_secs(120)),
        ("frame matrix decay", criterion_6, Duration::from_secs(600)),
        ("edge detection", criterion_7, Duration::from_secs(180)),
        ("window and transform oracles", criterion_8, Duration::from_secs(600)),
        ("determinism", criterion_9, Duration::from_secs(600)),
    ];
    // `cargo test --test acceptance -- 3 7` runs a subset
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    let mut ran = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = v.pass && in_time;
        failures += usize::from(!pass);
        println!(
            "criterion {} {name}: {} | {} | {:.1} s (budget {} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
