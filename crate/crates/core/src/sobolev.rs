//! Uniform Sobolev and trace-ideal resolvent inequalities on Fourier grids.
//!
//! For `z ∉ [0, ∞)` the operator `(-Δ - z)^s` is the multiplier `(|ξ|² - z)^s`. The
//! checks below evaluate both sides of each inequality on a grid and return the quotient
//! by the `z`-dependent envelope, so that boundedness over `arg z` and over `|z|` can be
//! read off from sweeps.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{apply_multiplier, frequency_norms_sq, fft_nd};
use crate::kernels::{kernel_bound_ratio, principal_power, KernelEnvelope};
use crate::model::{delta_dist, grid_lp_norm, ComplexEnergy, Grid, PotentialGrid};
use crate::reduced::{circulant_block, resolvent_multiplier, schatten_norm_of, DEFAULT_MARGIN_REL, SUPPORT_THRESHOLD};

/// An interval of exponents with open/closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl ExponentRange {
    pub fn contains(&self, p: f64) -> bool {
        let above = if self.lo_open { p > self.lo } else { p >= self.lo };
        let below = if self.hi_open { p < self.hi } else { p <= self.hi };
        above && below
    }

    /// A single point `[a, a]`.
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi && !self.lo_open && !self.hi_open
    }
}

fn check_order(n_dim: usize, s: f64) -> Result<()> {
    if n_dim == 0 || !(s > 0.0 && s <= (n_dim as f64 + 1.0) / 2.0) {
        return Err(Error::invalid(format!("s = {s} outside (0, (N+1)/2] for N = {n_dim}")));
    }
    Ok(())
}

/// Exponents `p` for which `‖u‖_{p'} <= C |z|^{-(Np+2ps-2N)/(2p)} ‖(-Δ-z)^s u‖_p`.
pub fn admissible_p(n_dim: usize, s: f64) -> Result<ExponentRange> {
    check_order(n_dim, s)?;
    let n = n_dim as f64;
    let hi = 2.0 * (n + 1.0) / (n + 1.0 + 2.0 * s);
    Ok(if s < n / 2.0 {
        ExponentRange { lo: 2.0 * n / (n + 2.0 * s), hi, lo_open: false, hi_open: false }
    } else if s == n / 2.0 {
        ExponentRange { lo: 1.0, hi, lo_open: true, hi_open: false }
    } else {
        ExponentRange { lo: 1.0, hi, lo_open: false, hi_open: false }
    })
}

/// Exponents `p` for the `δ(z)`-weighted inequality: `2(N+1)/(N+1+2s) < p <= 2`.
pub fn delta_weighted_p(n_dim: usize, s: f64) -> Result<ExponentRange> {
    check_order(n_dim, s)?;
    let n = n_dim as f64;
    Ok(ExponentRange { lo: 2.0 * (n + 1.0) / (n + 1.0 + 2.0 * s), hi: 2.0, lo_open: true, hi_open: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Envelope `|z|^{-(Np+2ps-2N)/(2p)}`.
    Uniform,
    /// Envelope `δ(z)^{-(Np+2ps-2N-2+p)/(2p)} |z|^{-(2-p)/(2p)}`.
    DeltaWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevParams {
    pub n_dim: usize,
    pub s: f64,
    pub p: f64,
    pub regime: Regime,
}

impl SobolevParams {
    pub fn new(n_dim: usize, s: f64, p: f64, regime: Regime) -> Result<Self> {
        let sp = SobolevParams { n_dim, s, p, regime };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        let range = match self.regime {
            Regime::Uniform => admissible_p(self.n_dim, self.s)?,
            Regime::DeltaWeighted => delta_weighted_p(self.n_dim, self.s)?,
        };
        if !range.contains(self.p) {
            return Err(Error::invalid(format!(
                "p = {} not admissible for N = {}, s = {} in the {:?} regime",
                self.p, self.n_dim, self.s, self.regime
            )));
        }
        Ok(())
    }

    /// `p' = p/(p-1)`, infinite for `p = 1`.
    pub fn p_dual(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    pub fn envelope(&self, z: Complex64) -> f64 {
        let (n, s, p) = (self.n_dim as f64, self.s, self.p);
        match self.regime {
            Regime::Uniform => z.norm().powf(-(n * p + 2.0 * p * s - 2.0 * n) / (2.0 * p)),
            Regime::DeltaWeighted => {
                delta_dist(z).powf(-(n * p + 2.0 * p * s - 2.0 * n - 2.0 + p) / (2.0 * p))
                    * z.norm().powf(-(2.0 - p) / (2.0 * p))
            }
        }
    }
}

/// Samples of a test function on a periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl TestFunction {
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        grid.validate()?;
        let values: Vec<Complex64> = (0..grid.len()).map(|j| f(&grid.point(j)[..grid.dim])).collect();
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("test function"));
        }
        Ok(TestFunction { grid, values })
    }

    /// `exp(-|x|²/w²)`.
    pub fn gaussian(grid: Grid, width: f64) -> Result<Self> {
        Self::modulated_gaussian(grid, width, 0.0)
    }

    /// `exp(-|x|²/w² + i k x_1)`.
    pub fn modulated_gaussian(grid: Grid, width: f64, k: f64) -> Result<Self> {
        Self::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            Complex64::from_polar((-r2 / (width * width)).exp(), k * x[0])
        })
    }

    /// Wave packet concentrated near `|ξ| = k` in every direction of `x_1`, width `w`.
    pub fn wave_packet(grid: Grid, k: f64, width: f64) -> Result<Self> {
        Self::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            Complex64::new((-r2 / (width * width)).exp() * (k * x[0]).cos(), 0.0)
        })
    }

    /// Seeded random combination of modes with `|ξ| <= k_max`, under a gaussian window.
    pub fn random_band_limited(grid: Grid, k_max: f64, width: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(Vec<f64>, Complex64)> = (0..16)
            .map(|_| {
                let xi = (0..grid.dim).map(|_| rng.random_range(-k_max..k_max)).collect();
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (xi, c)
            })
            .collect();
        Self::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            let window = (-r2 / (width * width)).exp();
            modes
                .iter()
                .map(|(xi, c)| c * Complex64::from_polar(window, xi.iter().zip(x).map(|(a, b)| a * b).sum()))
                .sum()
        })
    }

    /// `u(λx)` on the grid shrunk by `λ` (same samples, box length `L/λ`).
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        let grid = Grid::new(self.grid.dim, self.grid.box_length / lambda, self.grid.points_per_axis)?;
        Ok(TestFunction { grid, values: self.values.clone() })
    }

    pub fn decays_at_boundary(&self) -> bool {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        (0..self.values.len())
            .filter(|&j| self.grid.in_boundary_band(j))
            .all(|j| self.values[j].norm() < 1e-10 * max)
    }
}

/// One point of a sweep; CSV columns `(|z|, arg z, ratio, envelope, raw_norm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub z: Complex64,
    /// Quotient of the two sides, before dividing by the envelope.
    pub raw_norm: f64,
    pub envelope: f64,
    pub ratio: f64,
}

impl SweepSample {
    pub fn csv_header() -> &'static str {
        "abs_z,arg_z,ratio,envelope,raw_norm"
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.z.norm(), self.z.arg(), self.ratio, self.envelope, self.raw_norm)
    }
}

/// `‖u‖_{p'} / (envelope(z) ‖(-Δ-z)^s u‖_p)`.
pub fn sobolev_ratio(u: &TestFunction, z: Complex64, sp: &SobolevParams) -> Result<SweepSample> {
    sp.validate()?;
    if u.grid.dim != sp.n_dim {
        return Err(Error::invalid("test function dimension differs from N"));
    }
    ComplexEnergy::with_margin(z, DEFAULT_MARGIN_REL)?;
    if !u.decays_at_boundary() {
        log::warn!("test function does not decay at the box boundary");
    }
    let m = resolvent_multiplier(&u.grid, z, sp.s)?;
    let image = apply_multiplier(&u.grid, &u.values, &m);
    let h = u.grid.cell_volume();
    let top = grid_lp_norm(&u.values, h, sp.p_dual())?;
    let bottom = grid_lp_norm(&image, h, sp.p)?;
    if bottom == 0.0 {
        return Err(Error::invalid("test function is zero"));
    }
    let raw_norm = top / bottom;
    let envelope = sp.envelope(z);
    Ok(SweepSample { z, raw_norm, envelope, ratio: raw_norm / envelope })
}

/// Whether `(N, q, s)` satisfies the hypotheses of the trace-ideal resolvent bound.
pub fn trace_ideal_admissible(n_dim: usize, q: f64, s: f64) -> Result<bool> {
    check_order(n_dim, s)?;
    let n = n_dim as f64;
    let hi = (n + 1.0) / (2.0 * s);
    let base = if n < 2.0 * s {
        q >= 1.0 && q <= hi
    } else if n == 2.0 * s {
        q > 1.0 && q <= hi
    } else {
        q >= n / (2.0 * s) && q <= hi
    };
    let extra = match n_dim {
        1 if s <= 0.5 => q < 2.0,
        2 if s <= 0.5 => q > 1.0 / s,
        _ => true,
    };
    Ok(base && extra)
}

/// Schatten index `2` for `N = 1`, else `max{(N-1)q/(N-qs), 2}`.
pub fn trace_ideal_index(n_dim: usize, q: f64, s: f64) -> f64 {
    if n_dim == 1 {
        return 2.0;
    }
    let n = n_dim as f64;
    ((n - 1.0) * q / (n - q * s)).max(2.0)
}

/// `‖α1 (-Δ-z)^{-s} α2‖_r / (|z|^{-s+N/(2q)} ‖α1‖_{2q} ‖α2‖_{2q})`.
///
/// Returns a zero ratio when either weight vanishes identically.
pub fn trace_ideal_ratio(
    alpha1: &PotentialGrid,
    alpha2: &PotentialGrid,
    z: Complex64,
    q: f64,
    s: f64,
) -> Result<SweepSample> {
    let grid = alpha1.grid;
    if alpha2.grid != grid {
        return Err(Error::invalid("weights live on different grids"));
    }
    if !trace_ideal_admissible(grid.dim, q, s)? {
        return Err(Error::invalid(format!("(N = {}, q = {q}, s = {s}) is not admissible", grid.dim)));
    }
    ComplexEnergy::with_margin(z, DEFAULT_MARGIN_REL)?;
    let envelope = z.norm().powf(-s + grid.dim as f64 / (2.0 * q));
    let rows = alpha1.support(SUPPORT_THRESHOLD);
    let cols = alpha2.support(SUPPORT_THRESHOLD);
    if rows.is_empty() || cols.is_empty() {
        return Ok(SweepSample { z, raw_norm: 0.0, envelope, ratio: 0.0 });
    }
    let m = resolvent_multiplier(&grid, z, -s)?;
    let block = circulant_block(&grid, &rows, &cols, &m, |j| alpha1.samples[j], |j| alpha2.samples[j]);
    let values = crate::linalg::singular_values(block.as_ref())?;
    let raw_norm = schatten_norm_of(&values, trace_ideal_index(grid.dim, q, s))?;
    let h = grid.cell_volume();
    let weights = grid_lp_norm(&alpha1.samples, h, 2.0 * q)? * grid_lp_norm(&alpha2.samples, h, 2.0 * q)?;
    Ok(SweepSample { z, raw_norm, envelope, ratio: raw_norm / (envelope * weights) })
}

/// Diagnostics at the two ends of the analytic family `e^{ζ²} (-Δ-z)^{-ζ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointDiag {
    /// `sup_ξ |e^{ζ²} (ξ² - z)^{-ζ}|` over a radial frequency lattice.
    pub multiplier_sup: f64,
    /// Kernel sup against `|z|^{-(2Re ζ - N)/2}`, when `N/2 < Re ζ <= (N+1)/2`.
    pub kernel_ratio: Option<f64>,
}

/// Endpoint checks for the interpolation family: the `L² → L²` end (`Re ζ = 0`) and the
/// `L¹ → L^∞` end (`N/2 < Re ζ <= (N+1)/2`).
pub fn interpolation_endpoint_diag(n_dim: usize, zeta: Complex64, z: Complex64) -> Result<EndpointDiag> {
    let half_n = n_dim as f64 / 2.0;
    let sup_end = zeta.re > half_n && zeta.re <= half_n + 0.5;
    if zeta.re != 0.0 && !sup_end {
        return Err(Error::invalid(format!("Re ζ = {} is at neither endpoint for N = {n_dim}", zeta.re)));
    }
    ComplexEnergy::with_margin(z, DEFAULT_MARGIN_REL)?;
    let weight = (zeta * zeta).exp();
    // ξ² from 0 to 100 (1 + |z|), refined around ξ² = Re z where |ξ² - z| is smallest
    let top = 100.0 * (1.0 + z.norm());
    let near = z.re.max(0.0);
    let lattice = (0..=4096)
        .map(|k| top * (k as f64 / 4096.0).powi(2))
        .chain((0..=512).map(|k| near + (k as f64 / 256.0 - 1.0) * (1e-2 * (1.0 + z.norm()))))
        .filter(|&x| x >= 0.0);
    let mut multiplier_sup: f64 = 0.0;
    for xi2 in lattice {
        let v = principal_power(Complex64::new(xi2, 0.0) - z, -zeta)? * weight;
        multiplier_sup = multiplier_sup.max(v.norm());
    }
    let kernel_ratio = if sup_end {
        let scale = z.norm().sqrt().recip();
        let r: Vec<f64> = (0..64).map(|k| scale * 1e-3 * 1e4f64.powf(k as f64 / 63.0)).collect();
        Some(kernel_bound_ratio(n_dim, zeta.re, z, &r, KernelEnvelope::Sup)?)
    } else {
        None
    };
    Ok(EndpointDiag { multiplier_sup, kernel_ratio })
}

/// `arg z` samples on `(margin, 2π - margin)`.
pub fn arg_sweep(count: usize, margin: f64) -> Vec<f64> {
    (0..count).map(|k| margin + (2.0 * PI - 2.0 * margin) * k as f64 / (count - 1).max(1) as f64).collect()
}

/// `|z|` samples, logarithmically spaced on `[lo, hi]`.
pub fn abs_sweep(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo * (hi / lo).powf(k as f64 / (count - 1).max(1) as f64)).collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Largest sample of the modulus of the discrete Fourier transform of `u`, with its frequency.
pub fn dominant_frequency(u: &TestFunction) -> f64 {
    let mut data = u.values.clone();
    fft_nd(&u.grid, &mut data, false);
    let xi2 = frequency_norms_sq(&u.grid);
    let (k, _) = data
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (k, v)| if v.norm() > best.1 { (k, v.norm()) } else { best });
    xi2[k].sqrt()
}
