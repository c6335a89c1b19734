//! Fourier–Galerkin matrices of the Birman–Schwinger operator
//! `K(z) = ½ √σ (-Δ' - z)^{-1/2} √|σ|` and of the reduced pencil `√(-Δ' - E) + σ/2`.
//!
//! Restricting the free resolvent to the hyperplane gives `½ (-Δ' - z)^{-1/2}`; on the
//! periodic box this is the exact multiplier `½ (|ξ_k|² - z)^{-1/2}` at the discrete
//! frequencies `ξ_k = 2πk/L`, so no singular kernel quadrature is needed.
//!
//! Grid points where `σ` vanishes (below `1e-15 max|σ|`) give zero rows and columns of
//! `K`; matrices are stored on the support only. `I + K` is block diagonal with an
//! identity block off the support, so determinants and the smallest singular value
//! are unaffected.

use faer::{Mat, MatRef};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::{circulant_column, difference_index, frequency_norms_sq};
use crate::kernels::principal_power;
use crate::linalg::{self, LogDet};
use crate::model::{ComplexEnergy, Grid, PotentialGrid};
use crate::quad;

/// Assembly refuses spectral parameters with `δ(z) < 1e-8 (1 + |z|)`.
pub const DEFAULT_MARGIN_REL: f64 = 1e-8;
/// Samples below this fraction of `max|σ|` are treated as zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    BirmanSchwinger,
    Pencil,
}

/// Order of the two square-root factors around the resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactorOrder {
    /// `√σ · R · √|σ|`
    #[default]
    SigmaFirst,
    /// `√|σ| · R · √σ`
    ModulusFirst,
}

/// A dense Galerkin matrix, stored on the index set `support` of the full grid.
#[derive(Debug, Clone)]
pub struct BSMatrix {
    energy: ComplexEnergy,
    grid: Grid,
    kind: OperatorKind,
    support: Vec<usize>,
    entries: Mat<Complex64>,
}

impl BSMatrix {
    pub fn energy(&self) -> ComplexEnergy {
        self.energy
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Flat grid indices of the stored rows/columns, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn entries(&self) -> MatRef<'_, Complex64> {
        self.entries.as_ref()
    }

    /// Dimension of the full matrix, `n^N`.
    pub fn full_dim(&self) -> usize {
        self.grid.len()
    }

    /// Expands to the full `n^N × n^N` matrix (zeros off the support).
    pub fn to_full(&self) -> Mat<Complex64> {
        let n = self.full_dim();
        let mut full = Mat::<Complex64>::zeros(n, n);
        for (a, &i) in self.support.iter().enumerate() {
            for (b, &j) in self.support.iter().enumerate() {
                full[(i, j)] = self.entries[(a, b)];
            }
        }
        full
    }
}

/// `σ / √|σ|`, and `0` where `σ = 0`.
pub fn signed_sqrt(s: Complex64) -> Complex64 {
    let a = s.norm();
    if a == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        s / a.sqrt()
    }
}

fn check_samples(sigma: &PotentialGrid) -> Result<()> {
    sigma.grid.validate()?;
    if sigma.samples.len() != sigma.grid.len() {
        return Err(Error::invalid("potential sample count does not match its grid"));
    }
    if sigma.samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
        return Err(Error::NonFinite("potential samples"));
    }
    Ok(())
}

/// `(|ξ_k|² - z)^{power}` in FFT order.
pub fn resolvent_multiplier(grid: &Grid, z: Complex64, power: f64) -> Result<Vec<Complex64>> {
    frequency_norms_sq(grid)
        .into_iter()
        .map(|xi2| principal_power(Complex64::new(xi2, 0.0) - z, Complex64::new(power, 0.0)))
        .collect()
}

/// Rows `rows` and columns `cols` of `M_left F⁻¹ diag(multiplier) F M_right`.
pub(crate) fn circulant_block(
    grid: &Grid,
    rows: &[usize],
    cols: &[usize],
    multiplier: &[Complex64],
    left: impl Fn(usize) -> Complex64,
    right: impl Fn(usize) -> Complex64,
) -> Mat<Complex64> {
    let col = circulant_column(grid, multiplier);
    let row_idx: Vec<[usize; 3]> = rows.iter().map(|&j| grid.multi_index(j)).collect();
    let col_idx: Vec<[usize; 3]> = cols.iter().map(|&j| grid.multi_index(j)).collect();
    let lw: Vec<Complex64> = rows.iter().map(|&j| left(j)).collect();
    let rw: Vec<Complex64> = cols.iter().map(|&j| right(j)).collect();
    Mat::from_fn(rows.len(), cols.len(), |a, b| {
        lw[a] * col[difference_index(grid, &row_idx[a], &col_idx[b])] * rw[b]
    })
}

fn bs_with_multiplier(
    sigma: &PotentialGrid,
    energy: ComplexEnergy,
    multiplier: &[Complex64],
    order: FactorOrder,
) -> BSMatrix {
    let support = sigma.support(SUPPORT_THRESHOLD);
    let s = &sigma.samples;
    let root = |j: usize| signed_sqrt(s[j]);
    let modulus = |j: usize| Complex64::new(s[j].norm().sqrt(), 0.0);
    let entries = match order {
        FactorOrder::SigmaFirst => circulant_block(&sigma.grid, &support, &support, multiplier, root, modulus),
        FactorOrder::ModulusFirst => circulant_block(&sigma.grid, &support, &support, multiplier, modulus, root),
    };
    BSMatrix { energy, grid: sigma.grid, kind: OperatorKind::BirmanSchwinger, support, entries }
}

/// The Birman–Schwinger matrix `K_h(z) = M_{√σ} F⁻¹ diag(½(|ξ_k|² - z)^{-1/2}) F M_{√|σ|}`.
pub fn assemble_bs_matrix(sigma: &PotentialGrid, z: Complex64) -> Result<BSMatrix> {
    assemble_bs_matrix_ordered(sigma, z, FactorOrder::SigmaFirst)
}

pub fn assemble_bs_matrix_ordered(sigma: &PotentialGrid, z: Complex64, order: FactorOrder) -> Result<BSMatrix> {
    check_samples(sigma)?;
    let energy = ComplexEnergy::with_margin(z, DEFAULT_MARGIN_REL)?;
    let mut m = resolvent_multiplier(&sigma.grid, z, -0.5)?;
    m.iter_mut().for_each(|v| *v *= 0.5);
    Ok(bs_with_multiplier(sigma, energy, &m, order))
}

/// `dK_h/dz`, whose multiplier is `¼ (|ξ_k|² - z)^{-3/2}`.
pub fn assemble_bs_derivative(sigma: &PotentialGrid, z: Complex64) -> Result<BSMatrix> {
    check_samples(sigma)?;
    let energy = ComplexEnergy::with_margin(z, DEFAULT_MARGIN_REL)?;
    let mut m = resolvent_multiplier(&sigma.grid, z, -1.5)?;
    m.iter_mut().for_each(|v| *v *= 0.25);
    Ok(bs_with_multiplier(sigma, energy, &m, FactorOrder::SigmaFirst))
}

/// The reduced pencil `F⁻¹ diag((|ξ_k|² - E)^{1/2}) F + M_{σ/2}` on the full grid.
///
/// Its null vectors are the traces on the hyperplane of eigenfunctions with eigenvalue `E`.
pub fn assemble_reduced_pencil(sigma: &PotentialGrid, e: Complex64) -> Result<BSMatrix> {
    check_samples(sigma)?;
    let energy = ComplexEnergy::with_margin(e, DEFAULT_MARGIN_REL)?;
    let m = resolvent_multiplier(&sigma.grid, e, 0.5)?;
    let support: Vec<usize> = (0..sigma.grid.len()).collect();
    let one = |_| Complex64::new(1.0, 0.0);
    let mut entries = circulant_block(&sigma.grid, &support, &support, &m, one, one);
    for (j, s) in sigma.samples.iter().enumerate() {
        entries[(j, j)] += s * 0.5;
    }
    Ok(BSMatrix { energy, grid: sigma.grid, kind: OperatorKind::Pencil, support, entries })
}

/// Singular values of the full matrix, non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn schatten_norm(&self, r: f64) -> Result<f64> {
        schatten_norm(self, r)
    }
}

/// Singular values, padded with the zeros contributed by rows outside the support.
pub fn singular_values(m: &BSMatrix) -> Result<SingularSpectrum> {
    let mut values = linalg::singular_values(m.entries())?;
    values.resize(m.full_dim(), 0.0);
    Ok(SingularSpectrum { values })
}

/// `(Σ s_i^r)^{1/r}`; `r = ∞` is the operator norm.
pub fn schatten_norm(spec: &SingularSpectrum, r: f64) -> Result<f64> {
    schatten_norm_of(&spec.values, r)
}

pub(crate) fn schatten_norm_of(values: &[f64], r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::invalid(format!("Schatten index {r} must be >= 1")));
    }
    let top = values.iter().cloned().fold(0.0, f64::max);
    if r.is_infinite() || top == 0.0 {
        return Ok(top);
    }
    let sum: f64 = values.iter().map(|s| (s / top).powf(r)).sum();
    Ok(top * sum.powf(1.0 / r))
}

fn require_bs(m: &BSMatrix) -> Result<()> {
    if m.kind != OperatorKind::BirmanSchwinger {
        return Err(Error::invalid("expected a Birman–Schwinger matrix"));
    }
    Ok(())
}

/// `log det(I + K_h(z))`.
pub fn log_det_perturbed(m: &BSMatrix) -> Result<LogDet> {
    require_bs(m)?;
    linalg::log_det(linalg::identity_plus(m.entries()).as_ref())
}

/// `det(I + K_h(z))`; analytic in `z` for fixed `σ` and grid.
pub fn det_perturbed(m: &BSMatrix) -> Result<Complex64> {
    let v = log_det_perturbed(m)?.value();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonFinite("determinant"));
    }
    Ok(v)
}

/// Smallest singular value of the full `I + K_h(z)`.
pub fn perturbed_smallest_singular_value(m: &BSMatrix) -> Result<f64> {
    require_bs(m)?;
    let s = linalg::singular_values(linalg::identity_plus(m.entries()).as_ref())?;
    let inner = s.last().copied().unwrap_or(1.0);
    Ok(if m.support.len() < m.full_dim() { inner.min(1.0) } else { inner })
}

/// `d/dz log det(I + K_h(z)) = tr((I + K)^{-1} K'(z))`.
pub fn log_derivative_det(sigma: &PotentialGrid, z: Complex64) -> Result<Complex64> {
    use faer::linalg::solvers::Solve;
    let k = assemble_bs_matrix(sigma, z)?;
    let dk = assemble_bs_derivative(sigma, z)?;
    if k.support.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lu = linalg::identity_plus(k.entries()).partial_piv_lu();
    let x = lu.solve(dk.entries());
    let tr: Complex64 = (0..x.nrows()).map(|i| x[(i, i)]).sum();
    if !(tr.re.is_finite() && tr.im.is_finite()) {
        return Err(Error::NonFinite("log-derivative of the determinant"));
    }
    Ok(tr)
}

/// `∫_R dξ / (ξ² + b²)` for `Re b > 0`, by adaptive quadrature after the substitution
/// `ξ = |b| tan θ` (which maps the whole line onto a bounded smooth integrand).
///
/// Equals `π / b`; this is the constant behind the factor `½` in the reduction of the
/// free resolvent to the hyperplane.
pub fn normal_direction_integral(b: Complex64) -> Result<Complex64> {
    if !(b.re > 0.0 && b.re.is_finite() && b.im.is_finite()) {
        return Err(Error::invalid(format!("need Re b > 0, got {b}")));
    }
    let s = b.norm();
    let b2 = b * b;
    // s sec²θ / (s² tan²θ + b²), multiplied through by cos²θ
    let f = |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        Complex64::new(s, 0.0) / (b2 * (cos * cos) + s * s * sin * sin)
    };
    quad::integrate(f, -0.5 * PI, 0.5 * PI, 0.0, 1e-11)
}
