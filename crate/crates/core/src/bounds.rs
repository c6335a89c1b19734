//! Eigenvalue enclosures and eigenvalue sums checked against computed spectra.
//!
//! The constants in these inequalities are only known to exist, so every report carries
//! an `empirical_constant` which is either its own ratio (uncalibrated) or the maximum
//! ratio over a calibration suite, see [`calibrate_constant`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    delta_dist, grid_lp_norm, lp_integral, lp_norm, tau_admissible, EigRecord, ModelParams, PotentialGrid,
};
use crate::reduced::{assemble_bs_matrix, singular_values};

/// Relative slack in `ratio <= empirical_constant (1 + slack)`.
pub const DEFAULT_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `|E|^γ <= D ∫|σ|^{2γ+d-1}` for `0 < γ <= 1/2`.
    Disk,
    /// `|E|^{1/2} δ(E)^{(2γ-1)/2} <= D ∫|σ|^{2γ+d-1}` for `γ > 1/2`.
    Strip,
    /// No eigenvalues once `∫|σ|^{d-1}` is small, `d >= 3`.
    Absence,
    /// `(Σ δ(E_j) |E_j|^{-(1-τ)/2})^{2γ/(1+τ)} <= L ∫|σ|^{2γ+d-1}`.
    LiebThirring,
    /// Operator norm of `K(z)` against `|z|^{-γ/(2γ+d-1)} ‖σ‖_{2γ+d-1}`.
    BsNorm,
    /// Schatten norm of `K(z)` against the same envelope.
    BsSchatten,
    /// `E >= -(C ∫σ_-^{2γ+d-1})^{1/γ}` for real `σ`.
    RealVariational,
}

/// One inequality evaluated on one potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub gamma: f64,
    pub d: usize,
    pub tau: f64,
    pub lhs: f64,
    /// The right-hand side without its constant, e.g. `∫|σ|^{2γ+d-1}`.
    pub rhs_norm: f64,
    pub ratio: f64,
    pub empirical_constant: f64,
    pub pass: bool,
}

impl BoundReport {
    fn new(theorem: Theorem, params: &ModelParams, lhs: f64, rhs_norm: f64) -> Result<Self> {
        let ratio = if rhs_norm > 0.0 {
            lhs / rhs_norm
        } else if lhs == 0.0 {
            0.0
        } else {
            return Err(Error::invalid("positive left side against a vanishing potential norm"));
        };
        if !ratio.is_finite() {
            return Err(Error::NonFinite("bound ratio"));
        }
        Ok(BoundReport {
            theorem,
            gamma: params.gamma,
            d: params.d,
            tau: params.tau,
            lhs,
            rhs_norm,
            ratio,
            empirical_constant: ratio,
            pass: true,
        })
    }

    pub fn params(&self) -> ModelParams {
        ModelParams { d: self.d, gamma: self.gamma, tau: self.tau }
    }

    /// Re-judges the report against a calibrated constant.
    pub fn with_constant(mut self, constant: f64, slack: f64) -> Self {
        self.empirical_constant = constant;
        self.pass = self.ratio <= constant * (1.0 + slack);
        self
    }
}

fn check_dimension(sigma: &PotentialGrid, params: &ModelParams) -> Result<()> {
    params.validate()?;
    if sigma.dim() + 1 != params.d {
        return Err(Error::invalid(format!(
            "potential lives in R^{} but d = {}",
            sigma.dim(),
            params.d
        )));
    }
    Ok(())
}

/// `|E|^γ`.
pub fn disk_lhs(e: Complex64, gamma: f64) -> f64 {
    e.norm().powf(gamma)
}

/// `|E|^{1/2} δ(E)^{(2γ-1)/2}`; equals [`disk_lhs`] at `γ = 1/2`, and for all `γ` when `Re E <= 0`.
pub fn strip_lhs(e: Complex64, gamma: f64) -> f64 {
    e.norm().sqrt() * delta_dist(e).powf(0.5 * (2.0 * gamma - 1.0))
}

/// Enclosure check: disk for `0 < γ <= 1/2`, strip for `γ > 1/2`, absence for `γ = 0`, `d >= 3`.
pub fn check_enclosure(eigs: &[EigRecord], sigma: &PotentialGrid, params: &ModelParams) -> Result<BoundReport> {
    check_dimension(sigma, params)?;
    let g = params.gamma;
    let (theorem, lhs) = if g == 0.0 {
        if params.d < 3 {
            return Err(Error::invalid("the absence criterion needs d >= 3"));
        }
        (Theorem::Absence, if eigs.is_empty() { 0.0 } else { 1.0 })
    } else if g > 0.0 && g <= 0.5 {
        (Theorem::Disk, eigs.iter().map(|e| disk_lhs(e.value(), g)).fold(0.0, f64::max))
    } else if g > 0.5 {
        (Theorem::Strip, eigs.iter().map(|e| strip_lhs(e.value(), g)).fold(0.0, f64::max))
    } else {
        return Err(Error::invalid(format!("gamma = {g} is outside every enclosure theorem")));
    };
    BoundReport::new(theorem, params, lhs, lp_integral(sigma, params.p_sigma())?)
}

/// `(Σ_j m_j δ(E_j) |E_j|^{-(1-τ)/2})^{2γ/(1+τ)}` against `∫|σ|^{2γ+d-1}`.
pub fn lieb_thirring_report(eigs: &[EigRecord], sigma: &PotentialGrid, params: &ModelParams) -> Result<BoundReport> {
    check_dimension(sigma, params)?;
    if !tau_admissible(params.gamma, params.d, params.tau)? {
        return Err(Error::invalid(format!(
            "tau = {} is not admissible for gamma = {}, d = {}",
            params.tau, params.gamma, params.d
        )));
    }
    let tau = params.tau;
    let mut sum = 0.0;
    for e in eigs {
        let z = e.value();
        if z.norm() == 0.0 {
            return Err(Error::invalid("eigenvalue at the origin"));
        }
        sum += e.multiplicity as f64 * delta_dist(z) * z.norm().powf(-(1.0 - tau) / 2.0);
    }
    let lhs = sum.powf(2.0 * params.gamma / (1.0 + tau));
    BoundReport::new(Theorem::LiebThirring, params, lhs, lp_integral(sigma, params.p_sigma())?)
}

/// Envelope of the Birman–Schwinger norm bound at `z`.
pub fn bs_envelope(z: Complex64, params: &ModelParams) -> f64 {
    let p = params.p_sigma();
    if params.gamma <= 0.5 {
        z.norm().powf(-params.gamma / p)
    } else {
        delta_dist(z).powf(-(2.0 * params.gamma - 1.0) / (2.0 * p)) * z.norm().powf(-1.0 / (2.0 * p))
    }
}

/// `‖K_h(z)‖_r` and `envelope(z) ‖σ‖_{2γ+d-1}` as a report (`r = ∞` for the operator norm).
pub fn bs_norm_report(sigma: &PotentialGrid, z: Complex64, params: &ModelParams, r: f64) -> Result<BoundReport> {
    check_dimension(sigma, params)?;
    let spec = singular_values(&assemble_bs_matrix(sigma, z)?)?;
    let lhs = spec.schatten_norm(r)?;
    let rhs = bs_envelope(z, params) * lp_norm(sigma, params.p_sigma())?;
    let theorem = if r.is_infinite() { Theorem::BsNorm } else { Theorem::BsSchatten };
    BoundReport::new(theorem, params, lhs, rhs)
}

/// `‖K_h(z)‖_r / (envelope(z) ‖σ‖_{2γ+d-1})`.
pub fn bs_norm_ratio(sigma: &PotentialGrid, z: Complex64, params: &ModelParams, r: f64) -> Result<f64> {
    Ok(bs_norm_report(sigma, z, params, r)?.ratio)
}

/// Largest ratio in a suite of reports for the same inequality and parameters.
///
/// For the absence criterion (`lhs` is 0 or 1) this is `1 / min ∫|σ|^{d-1}` over the
/// potentials that do have eigenvalues.
pub fn calibrate_constant(reports: &[BoundReport]) -> Result<f64> {
    let first = reports.first().ok_or(Error::EmptySuite)?;
    for r in reports {
        if r.theorem != first.theorem || r.d != first.d || r.gamma != first.gamma || r.tau != first.tau {
            return Err(Error::invalid("calibration suite mixes theorems or parameters"));
        }
    }
    Ok(reports.iter().map(|r| r.ratio).fold(0.0, f64::max))
}

/// Calibrates on `reports` and re-judges each of them against the result.
pub fn apply_calibration(reports: &[BoundReport], slack: f64) -> Result<Vec<BoundReport>> {
    let c = calibrate_constant(reports)?;
    Ok(reports.iter().map(|r| r.with_constant(c, slack)).collect())
}

/// For real `σ`: `max_j (-E_j)_+^γ` against `∫σ_-^{2γ+d-1}`.
pub fn real_lower_bound(sigma: &PotentialGrid, eigs: &[EigRecord], gamma: f64) -> Result<BoundReport> {
    if !sigma.is_real() {
        return Err(Error::invalid("the variational bound needs a real potential"));
    }
    let params = ModelParams::new(sigma.dim() + 1, gamma, 0.0)?;
    let mut lhs: f64 = 0.0;
    for e in eigs {
        let z = e.value();
        if z.im.abs() >= 1e-8 * z.norm() {
            return Err(Error::invalid(format!("eigenvalue {z} of a real potential is not real")));
        }
        lhs = lhs.max((-z.re).max(0.0).powf(gamma));
    }
    let negative: Vec<Complex64> = sigma.samples.iter().map(|s| Complex64::new((-s.re).max(0.0), 0.0)).collect();
    let p = params.p_sigma();
    let rhs = grid_lp_norm(&negative, sigma.grid.cell_volume(), p)?.powf(p);
    BoundReport::new(Theorem::RealVariational, &params, lhs, rhs)
}
