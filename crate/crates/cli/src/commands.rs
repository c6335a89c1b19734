//! One function per subcommand. Each returns after writing its artifacts through an
//! [`Artifacts`] writer; the caller finishes the manifest.

use std::path::Path;

use leaky_spectra::bounds::{
    apply_calibration, calibrate_constant, check_enclosure, lieb_thirring_report, real_lower_bound, BoundReport,
    Theorem,
};
use leaky_spectra::eigensolve::{find_eigenvalues, oracle_full_2d, OracleOutput, Spectrum};
use leaky_spectra::sobolev::{
    abs_sweep, arg_sweep, sobolev_ratio, trace_ideal_ratio, SobolevParams, SweepSample, TestFunction,
};
use leaky_spectra::{tau_admissible, EigRecord, Grid, ModelParams, PotentialGrid, PotentialShape};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig, SobolevSection, SuiteConfig, TestFunctionSpec};
use crate::output::{csv, Artifacts};
use crate::svg::Plane;
use crate::RunError;

/// Side data of a scan that does not belong in `eigenvalues.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub candidates: Vec<Complex64>,
    pub boundary_candidates: usize,
    pub rejected: Vec<Rejected>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejected {
    pub start: Complex64,
    pub reason: String,
}

fn summary(spec: &Spectrum) -> ScanSummary {
    ScanSummary {
        candidates: spec.scan.candidates.clone(),
        boundary_candidates: spec.scan.boundary_candidates,
        rejected: spec.rejected.iter().map(|(z, r)| Rejected { start: *z, reason: r.clone() }).collect(),
    }
}

fn eigenvalue_picture(cfg: &RunConfig, sigma: &PotentialGrid, eigs: &[EigRecord]) -> Result<String, RunError> {
    let region = cfg.region()?;
    let mut plane = Plane::new(region.re_range, region.im_range);
    plane.half_line();
    if cfg.model.gamma > 0.0 && cfg.model.gamma <= 0.5 && !eigs.is_empty() {
        // |E|^γ <= D ∫|σ|^p, with D the configured constant or the observed ratio
        let report = check_enclosure(eigs, sigma, &cfg.model)?;
        let constant = cfg.bounds.constant.unwrap_or(report.ratio);
        let radius = (constant * report.rhs_norm).powf(1.0 / cfg.model.gamma);
        plane.circle(Complex64::new(0.0, 0.0), radius, "steelblue");
    }
    for e in eigs {
        plane.point(e.value(), "firebrick");
    }
    Ok(plane.render())
}

pub fn scan(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), RunError> {
    cfg.validate_model()?;
    let region = cfg.region()?;
    let (sigma, scan_sigma) = cfg.potentials()?;
    let spec = find_eigenvalues(&sigma, &scan_sigma, &region, &cfg.refine_options())?;
    out.write_json("eigenvalues.json", &spec.eigenvalues)?;
    out.write_json("scan_summary.json", &summary(&spec))?;
    if cfg.wants(Format::Csv) {
        let rows = spec.scan.heatmap.iter().map(|s| match s.smallest_sv {
            Some(v) => format!("{},{},{}", s.z.re, s.z.im, v),
            None => format!("{},{},", s.z.re, s.z.im),
        });
        out.write("heatmap.csv", &csv("re,im,smallest_sv", rows))?;
    }
    if cfg.wants(Format::Svg) {
        let picture = eigenvalue_picture(cfg, &sigma, &spec.eigenvalues)?;
        out.write("eigenvalues.svg", picture.as_bytes())?;
    }
    Ok(())
}

pub fn read_eigenvalues(path: &Path, out: &mut Artifacts) -> Result<Vec<EigRecord>, RunError> {
    let bytes = std::fs::read(path).map_err(|e| RunError::Config(format!("eigs: cannot read {}: {e}", path.display())))?;
    out.hash_input(&bytes);
    serde_json::from_slice(&bytes).map_err(|e| RunError::Config(format!("eigs: {e}")))
}

fn judged(report: BoundReport, cfg: &RunConfig) -> BoundReport {
    match cfg.bounds.constant {
        Some(c) => report.with_constant(c, cfg.bounds.slack),
        None => report,
    }
}

pub fn bounds(cfg: &RunConfig, eigs: &[EigRecord], out: &mut Artifacts) -> Result<(), RunError> {
    cfg.validate_model()?;
    let (sigma, _) = cfg.potentials()?;
    let report = judged(check_enclosure(eigs, &sigma, &cfg.model)?, cfg);
    out.write_json("bound_report.json", &report)?;
    let params = cfg.model;
    match tau_admissible(params.gamma, params.d, params.tau) {
        Ok(true) => {
            let lt = judged(lieb_thirring_report(eigs, &sigma, &params)?, cfg);
            out.write_json("lieb_thirring_report.json", &lt)?;
        }
        Ok(false) => log::warn!("tau = {} is not admissible for gamma = {}, d = {}", params.tau, params.gamma, params.d),
        Err(e) => log::info!("no eigenvalue-sum report: {e}"),
    }
    let all_real = eigs.iter().all(|e| e.value().im.abs() < 1e-8 * e.value().norm());
    if sigma.is_real() && all_real && params.gamma > 0.0 {
        let real = judged(real_lower_bound(&sigma, eigs, params.gamma)?, cfg);
        out.write_json("real_bound_report.json", &real)?;
    }
    Ok(())
}

fn test_function(grid: Grid, spec: &TestFunctionSpec) -> leaky_spectra::Result<TestFunction> {
    match *spec {
        TestFunctionSpec::Gaussian { width } => TestFunction::gaussian(grid, width),
        TestFunctionSpec::ModulatedGaussian { width, k } => TestFunction::modulated_gaussian(grid, width, k),
        TestFunctionSpec::WavePacket { k, width } => TestFunction::wave_packet(grid, k, width),
        TestFunctionSpec::Random { k_max, width, seed } => TestFunction::random_band_limited(grid, k_max, width, seed),
    }
}

/// Extremes of one sweep, for the summary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub name: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `p = 1` sweeps are quadrature-sensitive and reported only.
    pub counted: bool,
}

fn sweep_summary(name: String, samples: &[SweepSample], counted: bool) -> SweepSummary {
    let min_ratio = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    SweepSummary { name, min_ratio, max_ratio, counted }
}

fn sweep_csv(samples: &[SweepSample]) -> Vec<u8> {
    csv(SweepSample::csv_header(), samples.iter().map(|s| s.csv_row()))
}

fn sweep_points(sec: &SobolevSection) -> (Vec<Complex64>, Vec<Complex64>) {
    let by_arg = arg_sweep(sec.arg_count, 0.05).into_iter().map(|t| Complex64::from_polar(sec.radius, t)).collect();
    let by_abs = abs_sweep(sec.abs_range[0], sec.abs_range[1], sec.abs_count)
        .into_iter()
        .map(|r| Complex64::from_polar(r, sec.angle))
        .collect();
    (by_arg, by_abs)
}

pub fn sobolev(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let sec = cfg.sobolev.as_ref().ok_or_else(|| RunError::Config("sobolev: missing [sobolev] section".into()))?;
    let sp = SobolevParams::new(sec.n_dim, sec.s, sec.p, sec.regime).map_err(|e| RunError::Config(format!("sobolev: {e}")))?;
    let grid = Grid::new(sec.n_dim, sec.box_length, sec.points).map_err(|e| RunError::Config(format!("sobolev: {e}")))?;
    if sec.functions.is_empty() {
        return Err(RunError::Config("sobolev: no test functions".into()));
    }
    let (by_arg, by_abs) = sweep_points(sec);
    let counted = sec.p > 1.0;
    let mut summaries = Vec::new();
    let mut files = Vec::new();
    for (k, spec) in sec.functions.iter().enumerate() {
        let u = test_function(grid, spec).map_err(|e| RunError::Config(format!("sobolev: {e}")))?;
        for (tag, zs) in [("arg", &by_arg), ("abs", &by_abs)] {
            let samples = zs.iter().map(|&z| sobolev_ratio(&u, z, &sp)).collect::<Result<Vec<_>, _>>()?;
            let name = format!("sobolev_{k}_{}_{tag}", spec.label());
            summaries.push(sweep_summary(name.clone(), &samples, counted));
            files.push((format!("{name}.csv"), sweep_csv(&samples)));
        }
    }
    if let Some(ti) = &sec.trace_ideal {
        let alpha = PotentialGrid::gaussian(grid, Complex64::new(1.0, 0.0), ti.width)
            .map_err(|e| RunError::Config(format!("sobolev: {e}")))?;
        for (tag, zs) in [("arg", &by_arg), ("abs", &by_abs)] {
            let samples = zs.iter().map(|&z| trace_ideal_ratio(&alpha, &alpha, z, ti.q, ti.s)).collect::<Result<Vec<_>, _>>()?;
            let name = format!("trace_ideal_{tag}");
            summaries.push(sweep_summary(name.clone(), &samples, true));
            files.push((format!("{name}.csv"), sweep_csv(&samples)));
        }
    }
    if cfg.wants(Format::Csv) {
        for (name, bytes) in &files {
            out.write(name, bytes)?;
        }
    }
    out.write_json("sobolev_summary.json", &summaries)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedConstant {
    pub theorem: Theorem,
    pub gamma: f64,
    pub d: usize,
    pub tau: f64,
    pub constant: f64,
    pub suite_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteMember {
    pub seed: u64,
    pub eigenvalues: Vec<EigRecord>,
}

/// Eigenvalues of every potential in the suite.
pub fn suite_spectra(suite: &SuiteConfig) -> Result<Vec<(PotentialGrid, SuiteMember)>, RunError> {
    if suite.d < 2 || suite.count == 0 || suite.gammas.is_empty() {
        return Err(RunError::Config("suite: need d >= 2, count >= 1 and at least one gamma".into()));
    }
    let region = suite.region.to_region().map_err(|e| RunError::Config(format!("suite: {e}")))?;
    let dim = suite.d - 1;
    let grid = Grid::new(dim, suite.grid.length, suite.grid.points).map_err(|e| RunError::Config(format!("suite: {e}")))?;
    let scan_grid = match suite.grid.scan_points {
        Some(n) => Grid::new(dim, suite.grid.length, n).map_err(|e| RunError::Config(format!("suite: {e}")))?,
        None => grid,
    };
    let opts = suite.refine.unwrap_or_default();
    let mut members = Vec::new();
    for seed in suite.first_seed..suite.first_seed + suite.count {
        let shape = PotentialShape::RandomBumps { seed, count: suite.bumps };
        let sigma = PotentialGrid::from_shape(grid, shape.clone())?;
        let scan_sigma = PotentialGrid::from_shape(scan_grid, shape)?;
        let spec = find_eigenvalues(&sigma, &scan_sigma, &region, &opts)?;
        members.push((sigma, SuiteMember { seed, eigenvalues: spec.eigenvalues }));
    }
    Ok(members)
}

/// Calibrated constants for every inequality that applies at each `γ`.
pub fn calibrate_suite(
    suite: &SuiteConfig,
    members: &[(PotentialGrid, SuiteMember)],
) -> Result<(Vec<CalibratedConstant>, Vec<BoundReport>), RunError> {
    let mut constants = Vec::new();
    let mut all = Vec::new();
    for &gamma in &suite.gammas {
        let params = ModelParams::new(suite.d, gamma, suite.tau).map_err(|e| RunError::Config(format!("suite: {e}")))?;
        let mut families: Vec<Vec<BoundReport>> = vec![Vec::new()];
        for (sigma, m) in members {
            families[0].push(check_enclosure(&m.eigenvalues, sigma, &params)?);
        }
        if tau_admissible(gamma, suite.d, suite.tau).unwrap_or(false) {
            let mut lt = Vec::new();
            for (sigma, m) in members {
                lt.push(lieb_thirring_report(&m.eigenvalues, sigma, &params)?);
            }
            families.push(lt);
        }
        for reports in families {
            let constant = calibrate_constant(&reports)?;
            constants.push(CalibratedConstant {
                theorem: reports[0].theorem,
                gamma,
                d: suite.d,
                tau: suite.tau,
                constant,
                suite_size: reports.len(),
            });
            all.extend(apply_calibration(&reports, suite.slack)?);
        }
    }
    Ok((constants, all))
}

pub fn calibrate(suite: &SuiteConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let members = suite_spectra(suite)?;
    let spectra: Vec<&SuiteMember> = members.iter().map(|(_, m)| m).collect();
    out.write_json("suite_eigenvalues.json", &spectra)?;
    let (constants, reports) = calibrate_suite(suite, &members)?;
    out.write_json("calibration_reports.json", &reports)?;
    out.write_json("constants.json", &constants)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub birman_schwinger: Complex64,
    pub oracle: Option<Complex64>,
    pub relative_gap: Option<f64>,
}

pub fn compare(bs: &[EigRecord], oracle: &OracleOutput) -> Vec<Comparison> {
    bs.iter()
        .map(|e| {
            let z = e.value();
            let nearest = oracle
                .eigenvalues
                .iter()
                .map(|o| o.value)
                .min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()));
            Comparison { birman_schwinger: z, oracle: nearest, relative_gap: nearest.map(|w| (w - z).norm() / z.norm()) }
        })
        .collect()
}

pub fn oracle2d(cfg: &RunConfig, out: &mut Artifacts) -> Result<(), RunError> {
    cfg.validate_model()?;
    if cfg.model.d != 2 {
        return Err(RunError::Config(format!("oracle2d: needs d = 2, got d = {}", cfg.model.d)));
    }
    let sec = cfg.oracle2d.clone().unwrap_or_default();
    let region = cfg.region()?;
    let (sigma, scan_sigma) = cfg.potentials()?;
    let spec = find_eigenvalues(&sigma, &scan_sigma, &region, &cfg.refine_options())?;
    out.write_json("eigenvalues.json", &spec.eigenvalues)?;
    let shifts = if sec.shifts.is_empty() { spec.eigenvalues.iter().map(|e| e.value()).collect() } else { sec.shifts.clone() };
    if shifts.is_empty() {
        return Err(RunError::Config("oracle2d: no shifts given and the scan found no eigenvalues".into()));
    }
    let oracle = oracle_full_2d(&sigma, &sec.options(shifts))?;
    out.write_json("oracle_eigs.json", &oracle)?;
    let table = compare(&spec.eigenvalues, &oracle);
    if cfg.wants(Format::Csv) {
        let rows = table.iter().map(|c| match (c.oracle, c.relative_gap) {
            (Some(o), Some(g)) => format!("{},{},{},{},{}", c.birman_schwinger.re, c.birman_schwinger.im, o.re, o.im, g),
            _ => format!("{},{},,,", c.birman_schwinger.re, c.birman_schwinger.im),
        });
        out.write("comparison.csv", &csv("bs_re,bs_im,oracle_re,oracle_im,relative_gap", rows))?;
    }
    out.write_json("comparison.json", &table)?;
    Ok(())
}
