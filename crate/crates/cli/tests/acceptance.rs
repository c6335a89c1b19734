//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines appear in order and every
//! criterion runs even after an earlier one fails. Criteria listed in `EXPECTED_FAILURES`
//! are evaluated at their stated tolerance and reported as FAIL, but only an unexpected
//! failure (or an unexpected pass) makes the process exit nonzero.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use leaky_cli::commands::suite_spectra;
use leaky_cli::config::{GridSection, RegionSection, SuiteConfig};
use leaky_spectra::bounds::{bs_norm_report, calibrate_constant, check_enclosure, disk_lhs, strip_lhs};
use leaky_spectra::eigensolve::{
    count_zeros_contour, find_eigenvalues, oracle_full_2d, refine_root, Contour, Oracle2dOptions, RefineOptions,
    ScanRegion,
};
use leaky_spectra::kernels::resolvent_kernel;
use leaky_spectra::reduced::normal_direction_integral;
use leaky_spectra::sobolev::{
    abs_sweep, admissible_p, arg_sweep, log_log_slope, sobolev_ratio, trace_ideal_index, trace_ideal_ratio, Regime,
    SobolevParams, TestFunction,
};
use leaky_spectra::{
    schatten_index_r, tau_admissible, EigRecord, Grid, ModelParams, PotentialGrid,
};
use num_complex::Complex64;

type Outcome = Result<String, String>;

/// The decay criterion asks a fixed gaussian potential for the worst-case rate -1/6; the
/// Hilbert-Schmidt norm of a fixed potential decays like |z|^{-1/4}.
const EXPECTED_FAILURES: &[u32] = &[5];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn variation(values: &[f64]) -> f64 {
    values.iter().cloned().fold(0.0, f64::max) / values.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn line_grid(length: f64, n: usize) -> Grid {
    Grid::new(1, length, n).unwrap()
}

fn constant_eigenvalue() -> Outcome {
    let start = Instant::now();
    let sigma_for = |alpha: Complex64| PotentialGrid::constant(line_grid(40.0, 512), -alpha).unwrap();
    // the box has zeros ξ_k² - α²/4 for every lattice frequency; these starts sit nearest ξ = 0
    let cases = [(c(2.0, 0.0), c(-1.1, 0.0)), (Complex64::from_polar(2.0, PI / 6.0), c(-0.52, -0.88))];
    // the criterion is about the value; the multiplicity contour would triple the runtime
    let opts = RefineOptions { count_multiplicity: false, ..Default::default() };
    let mut worst: f64 = 0.0;
    for (alpha, z0) in cases {
        let want = -alpha * alpha / 4.0;
        let got = refine_root(&sigma_for(alpha), z0, &opts).map_err(|e| e.to_string())?;
        worst = worst.max((got.value() - want).norm() / want.norm());
    }
    let elapsed = start.elapsed();
    ensure(
        worst < 1e-9 && elapsed < Duration::from_secs(10),
        format!("max relative error {worst:.2e}, {elapsed:.1?}"),
    )
}

fn cross_discretization() -> Outcome {
    let start = Instant::now();
    let amp = Complex64::from_polar(-4.0, PI / 4.0);
    let sigma = PotentialGrid::gaussian(line_grid(40.0, 512), amp, 1.0).unwrap();
    let coarse = PotentialGrid::gaussian(line_grid(40.0, 128), amp, 1.0).unwrap();
    let region = ScanRegion::new((-6.0, 4.0), (-6.0, -0.5), (40, 24), 1e-3).unwrap();
    let spec = find_eigenvalues(&sigma, &coarse, &region, &RefineOptions::default()).map_err(|e| e.to_string())?;
    let bs = spec.eigenvalues.first().ok_or("no Birman-Schwinger eigenvalue in the window")?.value();
    let mut gaps = Vec::new();
    for h in [0.05, 0.025] {
        let opts = Oracle2dOptions { box_length: 40.0, spacing: h, shifts: vec![bs], ..Default::default() };
        let out = oracle_full_2d(&sigma, &opts).map_err(|e| e.to_string())?;
        let nearest = out
            .eigenvalues
            .iter()
            .map(|o| (o.value - bs).norm())
            .fold(f64::INFINITY, f64::min);
        gaps.push(nearest / bs.norm());
    }
    let factor = gaps[0] / gaps[1];
    let elapsed = start.elapsed();
    ensure(
        gaps[0] < 0.02 && (2.0 / 3.0..=6.0).contains(&factor) && elapsed < Duration::from_secs(300),
        format!(
            "E = {bs:.6}, gap {:.3e} at h = 0.05, {:.3e} at h = 0.025, ratio {factor:.2}, {elapsed:.1?}",
            gaps[0], gaps[1]
        ),
    )
}

fn normal_direction_constant() -> Outcome {
    let mut worst: f64 = 0.0;
    for theta in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0] {
        for k in 0..5 {
            let xi = 0.7 * k as f64;
            let b = (c(xi * xi, 0.0) - Complex64::from_polar(1.5, theta)).sqrt();
            let got = normal_direction_integral(b).map_err(|e| e.to_string())?;
            worst = worst.max((got - PI / b).norm() / (PI / b).norm());
        }
    }
    ensure(worst < 1e-6, format!("20 values of b, max relative error {worst:.2e}"))
}

// (1/L) Σ_{|k| <= n/2} m(ξ_k) e^{iξ_k x}, half weight on the Nyquist pair.
fn discrete_inverse_transform(length: f64, n: usize, z: Complex64, s: f64, x: f64) -> Complex64 {
    let half = n as i64 / 2;
    let mut sum = c(0.0, 0.0);
    for k in -half..=half {
        let xi = 2.0 * PI * k as f64 / length;
        let weight = if k.abs() == half { 0.5 } else { 1.0 };
        sum += (c(xi * xi, 0.0) - z).powf(-s) * Complex64::from_polar(weight, xi * x);
    }
    sum / length
}

fn kernel_multiplier() -> Outcome {
    // the truncated sum misses about 1/(π³j²) at grid point j, so r = 0.1 needs n = 16384
    let (length, n) = (40.0, 16384);
    let h = length / n as f64;
    let mut worst: f64 = 0.0;
    for s in [0.5, 1.0] {
        for z in [c(-1.0, 0.0), c(0.0, 1.0), c(-1.0, 2.0)] {
            for k in 0..=12 {
                let r = ((0.1 + 4.9 * k as f64 / 12.0) / h).round() * h;
                let got = resolvent_kernel(1, s, z, r).map_err(|e| e.to_string())?;
                let want = discrete_inverse_transform(length, n, z, s, r);
                worst = worst.max((got - want).norm() / want.norm());
            }
        }
    }
    ensure(worst < 1e-4, format!("max relative error {worst:.2e} over r in [0.1, 5]"))
}

fn bs_decay_exponent() -> Outcome {
    let params = ModelParams::new(2, 0.25, 0.0).unwrap();
    let r = schatten_index_r(params.gamma, params.d).unwrap();
    let sigma = PotentialGrid::gaussian(line_grid(40.0, 2048), c(-1.0, 0.0), 1.0).unwrap();
    let abs = abs_sweep(10.0, 1e4, 7);
    let mut norms = Vec::new();
    for &m in &abs {
        norms.push(bs_norm_report(&sigma, Complex64::from_polar(m, PI / 2.0), &params, r).map_err(|e| e.to_string())?.lhs);
    }
    let slope = log_log_slope(&abs, &norms);
    let target = -params.gamma / params.p_sigma();
    let mut ratios = Vec::new();
    for t in arg_sweep(25, 0.1) {
        ratios.push(bs_norm_report(&sigma, Complex64::from_polar(100.0, t), &params, r).map_err(|e| e.to_string())?.ratio);
    }
    let var = variation(&ratios);
    let slope_ok = (slope - target).abs() <= 0.15 * target.abs();
    ensure(
        slope_ok && var < 3.0,
        format!("slope {slope:.4} against {target:.4} ± 15%, arg variation {var:.3}"),
    )
}

fn trace_ideal_bounded() -> Outcome {
    // N = 1, s = 1/2, q = 3/2 (r = 2) on the same sweeps as the decay criterion
    let alpha = PotentialGrid::gaussian(line_grid(40.0, 1024), c(1.0, 0.0), 1.0).unwrap();
    let (q, s) = (1.5, 0.5);
    let ratio = |z: Complex64| trace_ideal_ratio(&alpha, &alpha, z, q, s).map(|x| x.ratio).map_err(|e| e.to_string());
    let by_abs = abs_sweep(10.0, 1e4, 7).into_iter().map(|m| ratio(Complex64::from_polar(m, PI / 2.0))).collect::<Result<Vec<_>, _>>()?;
    let by_arg = arg_sweep(25, 0.1).into_iter().map(|t| ratio(Complex64::from_polar(100.0, t))).collect::<Result<Vec<_>, _>>()?;
    let (va, vt) = (variation(&by_abs), variation(&by_arg));

    // flatness at N = 2, s = 3/4, q = 4/3; |z| between the box scale 1/L² and the weight scale
    let plane = Grid::new(2, 340.0, 1024).unwrap();
    let alpha = PotentialGrid::gaussian(plane, c(1.0, 0.0), 1.0).unwrap();
    let (q2, s2) = (4.0 / 3.0, 0.75);
    let index = trace_ideal_index(2, q2, s2);
    let mut flat = Vec::new();
    for m in [1e-5, 1e-4, 1e-3] {
        flat.push(trace_ideal_ratio(&alpha, &alpha, Complex64::from_polar(m, 0.75 * PI), q2, s2).map_err(|e| e.to_string())?.ratio);
    }
    let per_decade = flat.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
    ensure(
        va < 3.0 && vt < 3.0 && per_decade < 0.10,
        format!(
            "N = 1: |z| variation {va:.3}, arg variation {vt:.3}; N = 2 (r = {index}): max change per decade {:.1}%",
            100.0 * per_decade
        ),
    )
}

fn suite(points: usize) -> SuiteConfig {
    SuiteConfig {
        d: 2,
        gammas: vec![0.25, 0.5],
        tau: 0.0,
        first_seed: 0,
        count: 20,
        bumps: 3,
        grid: GridSection { length: 40.0, points, scan_points: Some(128) },
        region: RegionSection { re: [-30.0, 2.0], im: [-16.0, 16.0], resolution: [48, 48], exclusion_margin: 1e-3 },
        refine: Some(RefineOptions { count_multiplicity: false, ..Default::default() }),
        slack: leaky_spectra::bounds::DEFAULT_SLACK,
        output_dir: "unused".into(),
    }
}

fn enclosure_suite(eigs_out: &mut Vec<EigRecord>) -> Outcome {
    let mut constants = Vec::new();
    let mut violations = 0;
    let mut total = 0;
    for n in [256, 512] {
        let cfg = suite(n);
        let members = suite_spectra(&cfg).map_err(|e| e.to_string())?;
        if n == 512 {
            eigs_out.extend(members.iter().flat_map(|(_, m)| m.eigenvalues.iter().copied()));
        }
        for &gamma in &cfg.gammas {
            let params = ModelParams::new(2, gamma, 0.0).unwrap();
            let reports = members
                .iter()
                .map(|(sigma, m)| check_enclosure(&m.eigenvalues, sigma, &params))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let constant = calibrate_constant(&reports).map_err(|e| e.to_string())?;
            for ((_, m), report) in members.iter().zip(&reports) {
                for e in &m.eigenvalues {
                    total += 1;
                    if disk_lhs(e.value(), gamma) / report.rhs_norm > constant * (1.0 + cfg.slack) {
                        violations += 1;
                    }
                }
            }
            constants.push(constant);
        }
    }
    let drift = (0..2).map(|g| (constants[2 + g] / constants[g] - 1.0).abs()).fold(0.0, f64::max);
    ensure(
        violations == 0 && drift < 0.2,
        format!(
            "{total} eigenvalue checks, {violations} above the constant; constants {:.5}/{:.5} (n = 256) vs {:.5}/{:.5} (n = 512), drift {:.2}%",
            constants[0], constants[1], constants[2], constants[3], 100.0 * drift
        ),
    )
}

fn branch_consistency(eigs: &[EigRecord]) -> Outcome {
    let left: Vec<Complex64> = eigs.iter().map(|e| e.value()).filter(|z| z.re <= 0.0).collect();
    if left.is_empty() {
        return Err("no eigenvalues with Re E <= 0".into());
    }
    let worst = left
        .iter()
        .map(|&z| {
            let a = strip_lhs(z, 0.5 + 1e-9);
            let b = disk_lhs(z, 0.5);
            (a - b).abs() / b
        })
        .fold(0.0, f64::max);
    ensure(worst < 1e-6, format!("{} eigenvalues, max relative difference {worst:.2e}", left.len()))
}

fn argument_principle() -> Outcome {
    // periodic constant σ = -2 on L = 10: a simple zero at -1 and a double zero at ξ_1² - 1
    let constant = PotentialGrid::constant(line_grid(10.0, 64), c(-2.0, 0.0)).unwrap();
    let region = ScanRegion::new((-2.6, -0.2), (-0.5, 0.5), (24, 10), 1e-3).unwrap();
    let spec_c = find_eigenvalues(&constant, &constant, &region, &RefineOptions::default()).map_err(|e| e.to_string())?;
    let amp = Complex64::from_polar(-4.0, PI / 4.0);
    let bump = PotentialGrid::gaussian(line_grid(40.0, 256), amp, 1.0).unwrap();
    let region = ScanRegion::new((-1.0, 3.0), (-4.0, -0.5), (20, 18), 1e-3).unwrap();
    let spec_b = find_eigenvalues(&bump, &bump, &region, &RefineOptions::default()).map_err(|e| e.to_string())?;
    let cases = [
        (&constant, &spec_c.eigenvalues, c(-1.0, 0.0), 0.2),
        (&constant, &spec_c.eigenvalues, c(-0.6, 0.0), 0.2),
        (&constant, &spec_c.eigenvalues, c(-0.8, 0.0), 0.35),
        (&constant, &spec_c.eigenvalues, c(-2.0, 0.0), 0.5),
        (&bump, &spec_b.eigenvalues, c(1.3, -2.0), 0.5),
    ];
    let mut counts = Vec::new();
    let mut all_match = true;
    for (sigma, eigs, center, radius) in cases {
        let contour = Contour::new(center, radius, 128).map_err(|e| e.to_string())?;
        let counted = count_zeros_contour(sigma, &contour).map_err(|e| e.to_string())?;
        let inside: u32 = eigs.iter().filter(|e| contour.contains(e.value())).map(|e| e.multiplicity).sum();
        all_match &= counted == inside;
        counts.push(format!("{counted}/{inside}"));
    }
    ensure(all_match, format!("winding/refined per contour: {}", counts.join(", ")))
}

fn sobolev_scaling() -> Outcome {
    let u = TestFunction::modulated_gaussian(line_grid(40.0, 512), 1.3, 2.0).unwrap();
    let ul = u.dilated(2.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for sp in [
        SobolevParams::new(1, 0.5, 1.25, Regime::Uniform).unwrap(),
        SobolevParams::new(1, 0.5, 1.6, Regime::DeltaWeighted).unwrap(),
    ] {
        for z in [c(-1.0, 0.3), c(2.0, 1.0), c(0.5, -3.0)] {
            let a = sobolev_ratio(&u, z, &sp).map_err(|e| e.to_string())?.ratio;
            let b = sobolev_ratio(&ul, 4.0 * z, &sp).map_err(|e| e.to_string())?.ratio;
            worst = worst.max((a - b).abs() / a);
        }
    }
    let r1 = admissible_p(1, 0.5).unwrap();
    let r3 = admissible_p(3, 1.0).unwrap();
    let rd = admissible_p(1, 1.0).unwrap();
    let cases_ok = (r1.lo, r1.hi, r1.lo_open, r1.hi_open) == (1.0, 4.0 / 3.0, true, false)
        && (r3.lo, r3.hi, r3.lo_open, r3.hi_open) == (6.0 / 5.0, 8.0 / 6.0, false, false)
        && rd.is_degenerate()
        && (rd.lo, rd.hi) == (1.0, 1.0);
    ensure(
        worst < 1e-8 && cases_ok,
        format!("max relative change under dilation {worst:.2e}; displayed ranges {}", if cases_ok { "exact" } else { "wrong" }),
    )
}

fn exponent_tables() -> Outcome {
    let r = [schatten_index_r(0.25, 2), schatten_index_r(0.5, 3), schatten_index_r(0.5, 4)];
    let t = [tau_admissible(0.2, 2, 0.0), tau_admissible(1.0 / 3.0, 3, 0.0), tau_admissible(1.0 / 3.0, 3, 0.1)];
    let ok = r.iter().map(|x| x.as_ref().ok().copied()).collect::<Vec<_>>() == [Some(2.0), Some(6.0), Some(8.0)]
        && t.iter().map(|x| x.as_ref().ok().copied()).collect::<Vec<_>>() == [Some(true), Some(false), Some(true)];
    ensure(ok, format!("schatten_index_r {r:?}, tau_admissible {t:?}"))
}

fn run_twice(args: &[&str], out: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let status = Command::new(env!("CARGO_BIN_EXE_leaky"))
            .args(args)
            .arg("--out")
            .arg(out)
            .env("RUST_LOG", "error")
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("leaky {} exited with {status}", args.join(" ")));
        }
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|name| name.ends_with(".json") && name != "manifest.json")
            .map(|name| {
                let bytes = std::fs::read(out.join(&name)).unwrap_or_default();
                (name, bytes)
            })
            .collect();
        files.sort();
        runs.push(files);
    }
    let second = runs.pop().unwrap();
    let first = runs.pop().unwrap();
    if first != second {
        return Err(format!("{} differs between runs", out.display()));
    }
    Ok(first)
}

fn determinism() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = std::env::temp_dir().join(format!("leaky-acceptance-{}", std::process::id()));
    let (scan_cfg, sobolev_cfg) = (configs.join("random.toml"), configs.join("sobolev.toml"));
    let scan_cfg = scan_cfg.to_str().unwrap();
    let runs = [
        vec!["scan", "--config", scan_cfg, "--seed", "3"],
        vec!["sobolev", "--config", sobolev_cfg.to_str().unwrap()],
    ];
    let mut compared = 0;
    for (k, args) in runs.iter().enumerate() {
        compared += run_twice(args, &tmp.join(k.to_string()))?.len();
    }
    let eigs = tmp.join("0/eigenvalues.json");
    let bounds = vec!["bounds", "--eigs", eigs.to_str().unwrap(), "--config", scan_cfg];
    compared += run_twice(&bounds, &tmp.join("bounds"))?.len();
    let _ = std::fs::remove_dir_all(&tmp);
    ensure(compared >= 5, format!("{compared} JSON artifacts identical across repeated runs"))
}

fn main() -> ExitCode {
    let mut suite_eigs = Vec::new();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let known = if outcome.is_err() && EXPECTED_FAILURES.contains(&id) { " (expected failure)" } else { "" };
        println!("{tag} criterion {id:>2} {name}: {detail} [{:.1?}]{known}", start.elapsed());
        results.push((id, name, outcome));
    };
    run(1, "constant-potential eigenvalue", &mut constant_eigenvalue);
    run(2, "Birman-Schwinger vs 2D finite differences", &mut cross_discretization);
    run(3, "normal-direction integral", &mut normal_direction_constant);
    run(4, "kernel vs multiplier", &mut kernel_multiplier);
    run(5, "Birman-Schwinger norm decay", &mut bs_decay_exponent);
    run(6, "trace-ideal bound", &mut trace_ideal_bounded);
    run(7, "enclosure suite", &mut || enclosure_suite(&mut suite_eigs));
    run(8, "branch consistency at gamma = 1/2", &mut || branch_consistency(&suite_eigs));
    run(9, "argument principle", &mut argument_principle);
    run(10, "Sobolev scale invariance", &mut sobolev_scaling);
    run(11, "exponent tables", &mut exponent_tables);
    run(12, "determinism", &mut determinism);
    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failing: {failed:?}");
    }
    if failed == EXPECTED_FAILURES {
        ExitCode::SUCCESS
    } else {
        println!("expected exactly {EXPECTED_FAILURES:?} to fail");
        ExitCode::FAILURE
    }
}
