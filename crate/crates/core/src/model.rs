//! Domain scalars shared by every other module: energies off the half-line,
//! model exponents, potentials sampled on periodic boxes, and grid norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from `z` to the half-line `[0, inf)`.
///
/// Equal to `|z|` when `Re z <= 0` and to `|Im z|` otherwise.
pub fn delta_dist(z: Complex64) -> f64 {
    if z.re <= 0.0 {
        z.norm()
    } else {
        z.im.abs()
    }
}

/// A spectral parameter away from `[0, inf)`, together with its distance to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnergyRepr", into = "EnergyRepr")]
pub struct ComplexEnergy {
    value: Complex64,
    dist_to_halfline: f64,
}

#[derive(Serialize, Deserialize)]
struct EnergyRepr {
    re: f64,
    im: f64,
    dist_to_halfline: f64,
}

impl From<ComplexEnergy> for EnergyRepr {
    fn from(e: ComplexEnergy) -> Self {
        EnergyRepr { re: e.value.re, im: e.value.im, dist_to_halfline: e.dist_to_halfline }
    }
}

impl TryFrom<EnergyRepr> for ComplexEnergy {
    type Error = Error;

    fn try_from(r: EnergyRepr) -> Result<Self> {
        ComplexEnergy::new(Complex64::new(r.re, r.im))
    }
}

impl ComplexEnergy {
    /// Rejects non-finite values and points on `[0, inf)`.
    pub fn new(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite("energy"));
        }
        let dist = delta_dist(value);
        if dist == 0.0 {
            return Err(Error::TooCloseToHalfLine { z: value, dist, margin: 0.0 });
        }
        Ok(ComplexEnergy { value, dist_to_halfline: dist })
    }

    /// Like [`ComplexEnergy::new`] but also demands `δ(z) >= margin_rel * (1 + |z|)`.
    pub fn with_margin(value: Complex64, margin_rel: f64) -> Result<Self> {
        let e = Self::new(value)?;
        let margin = margin_rel * (1.0 + value.norm());
        if e.dist_to_halfline < margin {
            return Err(Error::TooCloseToHalfLine { z: value, dist: e.dist_to_halfline, margin });
        }
        Ok(e)
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn dist_to_halfline(&self) -> f64 {
        self.dist_to_halfline
    }

    pub fn conj(&self) -> Self {
        ComplexEnergy { value: self.value.conj(), dist_to_halfline: self.dist_to_halfline }
    }
}

/// Ambient dimension `d`, the power `gamma` and the Lieb–Thirring parameter `tau`.
///
/// The potential is measured in `L^p` with `p = 2 gamma + d - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: usize,
    pub gamma: f64,
    #[serde(default)]
    pub tau: f64,
}

impl ModelParams {
    pub fn new(d: usize, gamma: f64, tau: f64) -> Result<Self> {
        let p = ModelParams { d, gamma, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid(format!("dimension d = {} must be at least 2", self.d)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid(format!("gamma = {} must be finite and >= 0", self.gamma)));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::invalid(format!("tau = {} must be finite and >= 0", self.tau)));
        }
        Ok(())
    }

    /// The exponent `2 gamma + d - 1`.
    pub fn p_sigma(&self) -> f64 {
        2.0 * self.gamma + self.d as f64 - 1.0
    }

    /// Dimension of the hyperplane carrying the potential.
    pub fn reduced_dim(&self) -> usize {
        self.d - 1
    }
}

/// Uniform periodic grid on `[-L/2, L/2)^dim` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub box_length: f64,
    pub points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, box_length: f64, points_per_axis: usize) -> Result<Self> {
        let g = Grid { dim, box_length, points_per_axis };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::invalid(format!("grid dimension {} not in 1..=3", self.dim)));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::invalid(format!("box length {} must be positive", self.box_length)));
        }
        if self.points_per_axis < 2 || !self.points_per_axis.is_power_of_two() {
            return Err(Error::invalid(format!(
                "points per axis {} must be a power of two >= 2",
                self.points_per_axis
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Quadrature weight `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_coord(&self, i: usize) -> f64 {
        -0.5 * self.box_length + i as f64 * self.spacing()
    }

    /// Multi-index of a flat index; axis 0 varies fastest.
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut out = [0; 3];
        let mut rest = flat;
        for slot in out.iter_mut().take(self.dim) {
            *slot = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flat_index(&self, multi: [usize; 3]) -> usize {
        let n = self.points_per_axis;
        (0..self.dim).rev().fold(0, |acc, k| acc * n + multi[k])
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let m = self.multi_index(flat);
        let mut x = [0.0; 3];
        for k in 0..self.dim {
            x[k] = self.axis_coord(m[k]);
        }
        x
    }

    /// Whether the flat index lies in the outer 10% band of the box along some axis.
    pub fn in_boundary_band(&self, flat: usize) -> bool {
        let band = 0.4 * self.box_length;
        let x = self.point(flat);
        x[..self.dim].iter().any(|c| c.abs() > band)
    }
}

/// One gaussian bump `amplitude * exp(-|x - center|^2 / width^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: Complex64,
    pub width: f64,
    #[serde(default)]
    pub center: Vec<f64>,
}

impl Bump {
    fn eval(&self, x: &[f64]) -> Complex64 {
        let r2: f64 = x
            .iter()
            .enumerate()
            .map(|(k, xi)| {
                let c = self.center.get(k).copied().unwrap_or(0.0);
                (xi - c).powi(2)
            })
            .sum();
        self.amplitude * (-r2 / (self.width * self.width)).exp()
    }
}

/// Closed-form description of a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialShape {
    Constant { amplitude: Complex64 },
    /// Constant amplitude on the cube `|x_k| <= half_width`, zero outside.
    Plateau { amplitude: Complex64, half_width: f64 },
    Gaussian {
        amplitude: Complex64,
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    Bumps { bumps: Vec<Bump> },
    /// Seeded sum of attractive complex gaussian bumps; see [`PotentialShape::resolve`].
    RandomBumps { seed: u64, count: usize },
}

impl PotentialShape {
    /// Replaces random descriptors by the explicit bump list they generate.
    pub fn resolve(&self, dim: usize) -> PotentialShape {
        match self {
            PotentialShape::RandomBumps { seed, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let bumps = (0..(*count).max(1))
                    .map(|_| {
                        let magnitude = rng.random_range(1.5..4.0);
                        let phase = rng.random_range(-PI / 3.0..PI / 3.0);
                        let width = rng.random_range(0.6..1.4);
                        let center = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
                        Bump { amplitude: -Complex64::from_polar(magnitude, phase), width, center }
                    })
                    .collect();
                PotentialShape::Bumps { bumps }
            }
            other => other.clone(),
        }
    }

    /// Evaluates a resolved shape. Random descriptors must be resolved first.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            PotentialShape::Constant { amplitude } => *amplitude,
            PotentialShape::Plateau { amplitude, half_width } => {
                if x.iter().all(|c| c.abs() <= *half_width) {
                    *amplitude
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            PotentialShape::Gaussian { amplitude, width, center } => {
                Bump { amplitude: *amplitude, width: *width, center: center.clone() }.eval(x)
            }
            PotentialShape::Bumps { bumps } => bumps.iter().map(|b| b.eval(x)).sum(),
            PotentialShape::RandomBumps { .. } => self.resolve(x.len()).eval(x),
        }
    }
}

/// Complex samples of the surface potential on a periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGrid {
    pub grid: Grid,
    pub samples: Vec<Complex64>,
    #[serde(default)]
    pub descriptor: Option<PotentialShape>,
}

impl PotentialGrid {
    pub fn from_samples(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if samples.len() != grid.len() {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::NonFinite("potential samples"));
        }
        Ok(PotentialGrid { grid, samples, descriptor: None })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        grid.validate()?;
        let samples = (0..grid.len()).map(|j| f(&grid.point(j)[..grid.dim])).collect();
        Self::from_samples(grid, samples)
    }

    pub fn from_shape(grid: Grid, shape: PotentialShape) -> Result<Self> {
        let resolved = shape.resolve(grid.dim);
        let mut p = Self::from_fn(grid, |x| resolved.eval(x))?;
        p.descriptor = Some(shape);
        Ok(p)
    }

    pub fn constant(grid: Grid, amplitude: Complex64) -> Result<Self> {
        Self::from_shape(grid, PotentialShape::Constant { amplitude })
    }

    pub fn gaussian(grid: Grid, amplitude: Complex64, width: f64) -> Result<Self> {
        Self::from_shape(grid, PotentialShape::Gaussian { amplitude, width, center: Vec::new() })
    }

    /// Re-samples the closed-form descriptor on another grid.
    pub fn resampled(&self, grid: Grid) -> Result<Self> {
        match &self.descriptor {
            Some(shape) if grid.dim == self.grid.dim => Self::from_shape(grid, shape.clone()),
            Some(_) => Err(Error::invalid("resampling cannot change the dimension")),
            None => Err(Error::invalid("potential has no closed-form descriptor to resample")),
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        let scale = self.max_abs();
        self.samples.iter().all(|s| s.im.abs() <= 1e-12 * scale)
    }

    /// Flat indices where `|σ| > rel_threshold * max|σ|`.
    pub fn support(&self, rel_threshold: f64) -> Vec<usize> {
        let cut = rel_threshold * self.max_abs();
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.norm() > cut && s.norm() > 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    /// `|σ| < 1e-12 max|σ|` throughout the outer 10% band of the box.
    pub fn decays_at_boundary(&self) -> bool {
        let cut = 1e-12 * self.max_abs();
        (0..self.samples.len())
            .filter(|&j| self.grid.in_boundary_band(j))
            .all(|j| self.samples[j].norm() < cut)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        PotentialGrid {
            grid: self.grid,
            samples: self.samples.iter().map(|s| s * c).collect(),
            descriptor: None,
        }
    }

    pub fn conj(&self) -> Self {
        PotentialGrid {
            grid: self.grid,
            samples: self.samples.iter().map(|s| s.conj()).collect(),
            descriptor: None,
        }
    }

    /// Periodic shift by a lattice vector (in grid points per axis).
    pub fn shifted(&self, offset: [isize; 3]) -> Self {
        let n = self.grid.points_per_axis as isize;
        let mut samples = vec![Complex64::new(0.0, 0.0); self.samples.len()];
        for (j, s) in self.samples.iter().enumerate() {
            let m = self.grid.multi_index(j);
            let mut t = [0usize; 3];
            for k in 0..self.grid.dim {
                t[k] = (m[k] as isize + offset[k]).rem_euclid(n) as usize;
            }
            samples[self.grid.flat_index(t)] = *s;
        }
        PotentialGrid { grid: self.grid, samples, descriptor: None }
    }
}

/// `(Σ |v_i|^p h^N)^{1/p}`; `p = inf` gives the maximum modulus.
pub fn grid_lp_norm(values: &[Complex64], cell_volume: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("L^p exponent {p} must be >= 1")));
    }
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = values.iter().map(|v| (v.norm() / scale).powf(p)).sum();
    Ok(scale * (sum * cell_volume).powf(1.0 / p))
}

/// Discrete `L^p` norm of the potential (rectangle rule on the periodic grid).
pub fn lp_norm(sigma: &PotentialGrid, p: f64) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::invalid("lp_norm needs a finite exponent"));
    }
    grid_lp_norm(&sigma.samples, sigma.grid.cell_volume(), p)
}

/// `∫ |σ|^p`, the quantity appearing on the right of the enclosure bounds.
pub fn lp_integral(sigma: &PotentialGrid, p: f64) -> Result<f64> {
    Ok(lp_norm(sigma, p)?.powf(p))
}

/// Schatten index of the trace-ideal resolvent bound on the hyperplane:
/// `2` for `d = 2`, else `2(d-2)(2γ+d-1)/(d-1-2γ)`.
pub fn schatten_index_r(gamma: f64, d: usize) -> Result<f64> {
    let ok = match d {
        2 => gamma > 0.0 && gamma < 0.5,
        3 => gamma > 0.0 && gamma <= 0.5,
        d if d >= 4 => (0.0..=0.5).contains(&gamma),
        _ => false,
    };
    if !ok {
        return Err(Error::invalid(format!("(gamma = {gamma}, d = {d}) outside the trace-ideal range")));
    }
    if d == 2 {
        return Ok(2.0);
    }
    let df = d as f64;
    Ok(2.0 * (df - 2.0) * (2.0 * gamma + df - 1.0) / (df - 1.0 - 2.0 * gamma))
}

/// The gamma value `(d-1)/(4d-6)` above which `tau` must be positive.
pub fn tau_gamma_threshold(d: usize) -> f64 {
    let df = d as f64;
    (df - 1.0) / (4.0 * df - 6.0)
}

/// Strict lower bound on `tau`, or `None` in the regime where `tau = 0` is allowed.
pub fn tau_lower_bound(gamma: f64, d: usize) -> Result<Option<f64>> {
    check_lieb_thirring_range(gamma, d)?;
    if gamma < tau_gamma_threshold(d) {
        return Ok(None);
    }
    let df = d as f64;
    Ok(Some(((4.0 * df - 6.0) * gamma - (df - 1.0)) / (df - 1.0 - 2.0 * gamma)))
}

pub(crate) fn check_lieb_thirring_range(gamma: f64, d: usize) -> Result<()> {
    let ok = match d {
        2 => gamma > 0.0 && gamma < 0.5,
        d if d >= 3 => gamma > 0.0 && gamma <= 0.5,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!("(gamma = {gamma}, d = {d}) outside the eigenvalue-sum range")))
    }
}

/// Whether `tau` is admissible for the eigenvalue-sum bound.
///
/// Below the threshold every `tau >= 0` is accepted (`tau = 0` is the canonical choice);
/// at or above it `tau` must exceed `((4d-6)γ-(d-1))/(d-1-2γ)`.
pub fn tau_admissible(gamma: f64, d: usize, tau: f64) -> Result<bool> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!("tau = {tau} must be finite and >= 0")));
    }
    Ok(match tau_lower_bound(gamma, d)? {
        None => true,
        Some(bound) => tau > bound,
    })
}

/// `tau = 0` below the threshold; any admissible `tau` above it.
pub fn tau_is_canonical(gamma: f64, d: usize, tau: f64) -> Result<bool> {
    Ok(match tau_lower_bound(gamma, d)? {
        None => tau == 0.0,
        Some(bound) => tau > bound,
    })
}

/// A refined eigenvalue of the delta-interaction operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigRecord {
    pub energy: ComplexEnergy,
    /// Smallest singular value of `1 + K(E)`.
    pub residual: f64,
    pub multiplicity: u32,
    pub iterations: u32,
    pub converged: bool,
}

impl EigRecord {
    pub fn value(&self) -> Complex64 {
        self.energy.value()
    }
}
