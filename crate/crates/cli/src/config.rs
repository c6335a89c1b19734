//! Run configuration, read from TOML and overridden from the command line.

use std::path::{Path, PathBuf};

use leaky_spectra::eigensolve::{Oracle2dOptions, RefineOptions, ScanRegion};
use leaky_spectra::sobolev::Regime;
use leaky_spectra::{Grid, ModelParams, PotentialGrid, PotentialShape};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv, Format::Svg]
}

fn default_out() -> PathBuf {
    PathBuf::from("leaky-out")
}

fn default_model() -> ModelParams {
    ModelParams { d: 2, gamma: 0.5, tau: 0.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub length: f64,
    pub points: usize,
    /// Coarser grid for the lattice scan; refinement always uses `points`.
    #[serde(default)]
    pub scan_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub re: [f64; 2],
    pub im: [f64; 2],
    #[serde(default = "default_resolution")]
    pub resolution: [usize; 2],
    #[serde(default = "default_margin")]
    pub exclusion_margin: f64,
}

fn default_resolution() -> [usize; 2] {
    [40, 40]
}

fn default_margin() -> f64 {
    1e-3
}

impl RegionSection {
    pub fn to_region(&self) -> leaky_spectra::Result<ScanRegion> {
        ScanRegion::new(
            (self.re[0], self.re[1]),
            (self.im[0], self.im[1]),
            (self.resolution[0], self.resolution[1]),
            self.exclusion_margin,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    /// Calibrated constant to judge against; without it reports are uncalibrated.
    #[serde(default)]
    pub constant: Option<f64>,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        BoundsSection { constant: None, slack: default_slack() }
    }
}

fn default_slack() -> f64 {
    leaky_spectra::bounds::DEFAULT_SLACK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TestFunctionSpec {
    Gaussian { width: f64 },
    ModulatedGaussian { width: f64, k: f64 },
    WavePacket { k: f64, width: f64 },
    Random { k_max: f64, width: f64, seed: u64 },
}

impl TestFunctionSpec {
    pub fn label(&self) -> &'static str {
        match self {
            TestFunctionSpec::Gaussian { .. } => "gaussian",
            TestFunctionSpec::ModulatedGaussian { .. } => "modulated-gaussian",
            TestFunctionSpec::WavePacket { .. } => "wave-packet",
            TestFunctionSpec::Random { .. } => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceIdealSection {
    pub q: f64,
    pub s: f64,
    /// Gaussian width of both weights.
    #[serde(default = "one")]
    pub width: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevSection {
    pub n_dim: usize,
    pub s: f64,
    pub p: f64,
    pub regime: Regime,
    pub box_length: f64,
    pub points: usize,
    /// `|z|` of the `arg z` sweep.
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "default_arg_count")]
    pub arg_count: usize,
    /// `[lo, hi]` of the `|z|` sweep, at angle `angle`.
    #[serde(default = "default_abs_range")]
    pub abs_range: [f64; 2],
    #[serde(default = "default_abs_count")]
    pub abs_count: usize,
    #[serde(default = "default_angle")]
    pub angle: f64,
    pub functions: Vec<TestFunctionSpec>,
    #[serde(default)]
    pub trace_ideal: Option<TraceIdealSection>,
}

fn default_arg_count() -> usize {
    24
}

fn default_abs_range() -> [f64; 2] {
    [10.0, 1e4]
}

fn default_abs_count() -> usize {
    7
}

fn default_angle() -> f64 {
    std::f64::consts::FRAC_PI_2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Oracle2dSection {
    #[serde(default = "default_oracle_box")]
    pub box_length: f64,
    #[serde(default = "default_oracle_spacing")]
    pub spacing: f64,
    /// Shift-invert targets; empty means "use the refined Birman–Schwinger eigenvalues".
    #[serde(default)]
    pub shifts: Vec<Complex64>,
}

fn default_oracle_box() -> f64 {
    40.0
}

fn default_oracle_spacing() -> f64 {
    0.05
}

impl Default for Oracle2dSection {
    fn default() -> Self {
        Oracle2dSection { box_length: default_oracle_box(), spacing: default_oracle_spacing(), shifts: Vec::new() }
    }
}

impl Oracle2dSection {
    pub fn options(&self, shifts: Vec<Complex64>) -> Oracle2dOptions {
        Oracle2dOptions { box_length: self.box_length, spacing: self.spacing, shifts, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_model")]
    pub model: ModelParams,
    #[serde(default)]
    pub potential: Option<PotentialShape>,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub region: Option<RegionSection>,
    #[serde(default)]
    pub refine: Option<RefineOptions>,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub sobolev: Option<SobolevSection>,
    #[serde(default)]
    pub oracle2d: Option<Oracle2dSection>,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("config: cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), RunError> {
        if let Some(g) = o.gamma {
            self.model.gamma = g;
        }
        if let Some(d) = o.d {
            self.model.d = d;
        }
        if let Some(seed) = o.seed {
            match &mut self.potential {
                Some(PotentialShape::RandomBumps { seed: s, .. }) => *s = seed,
                _ => return Err(RunError::Config("potential: --seed needs a random-bumps potential".into())),
            }
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        self.formats.sort_unstable();
        self.formats.dedup();
        Ok(())
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Checks the parts every command needs.
    pub fn validate_model(&self) -> Result<(), RunError> {
        self.model.validate().map_err(|e| RunError::Config(format!("model: {e}")))
    }

    pub fn refine_options(&self) -> RefineOptions {
        self.refine.unwrap_or_default()
    }

    pub fn region(&self) -> Result<ScanRegion, RunError> {
        let r = self.region.as_ref().ok_or_else(|| RunError::Config("region: missing [region] section".into()))?;
        r.to_region().map_err(|e| RunError::Config(format!("region: {e}")))
    }

    fn grid_section(&self) -> Result<&GridSection, RunError> {
        self.grid.as_ref().ok_or_else(|| RunError::Config("grid: missing [grid] section".into()))
    }

    /// The potential on the refinement grid and on the scan grid.
    pub fn potentials(&self) -> Result<(PotentialGrid, PotentialGrid), RunError> {
        let shape = self.potential.clone().ok_or_else(|| RunError::Config("potential: missing [potential] section".into()))?;
        let g = self.grid_section()?;
        let dim = self.model.d - 1;
        let grid = Grid::new(dim, g.length, g.points).map_err(|e| RunError::Config(format!("grid: {e}")))?;
        let sigma = PotentialGrid::from_shape(grid, shape).map_err(|e| RunError::Config(format!("potential: {e}")))?;
        if !sigma.decays_at_boundary() {
            log::warn!("the potential does not decay near the box boundary; periodization errors may be visible");
        }
        let scan = match g.scan_points {
            Some(n) => {
                let coarse = Grid::new(dim, g.length, n).map_err(|e| RunError::Config(format!("grid: {e}")))?;
                sigma.resampled(coarse).map_err(|e| RunError::Config(format!("grid: {e}")))?
            }
            None => sigma.clone(),
        };
        Ok((sigma, scan))
    }
}

/// A calibration suite of seeded random potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_suite_d")]
    pub d: usize,
    pub gammas: Vec<f64>,
    #[serde(default)]
    pub tau: f64,
    /// Seeds `first_seed .. first_seed + count`.
    #[serde(default)]
    pub first_seed: u64,
    pub count: u64,
    #[serde(default = "default_bumps")]
    pub bumps: usize,
    pub grid: GridSection,
    pub region: RegionSection,
    #[serde(default)]
    pub refine: Option<RefineOptions>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
}

fn default_suite_d() -> usize {
    2
}

fn default_bumps() -> usize {
    3
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("suite: cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| RunError::Config(format!("suite: {e}")))
    }
}
