use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LogDet;
use crate::model::{delta_dist, ComplexEnergy, EigRecord, PotentialGrid};
use crate::reduced::{assemble_bs_matrix, log_det_perturbed, perturbed_smallest_singular_value, DEFAULT_MARGIN_REL};

use super::contour::{count_zeros_contour, Contour};

const GOLDEN: f64 = 0.618_033_988_749_895;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineOptions {
    /// Stop once a step is below `step_tol (1 + |z|)`.
    pub step_tol: f64,
    /// A root counts as converged only if `s_min(1 + K_h)` is below this.
    pub residual_tol: f64,
    pub max_iter: u32,
    /// Iterates with `δ(z)` below this abort with [`Error::BoundaryDrift`].
    pub exclusion_margin: f64,
    /// Compute the multiplicity from a small contour around the root.
    pub count_multiplicity: bool,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            step_tol: 1e-13,
            residual_tol: 1e-8,
            max_iter: 50,
            exclusion_margin: 1e-6,
            count_multiplicity: true,
        }
    }
}

impl RefineOptions {
    pub fn with_step_tol(tol: f64) -> Result<Self> {
        if !(tol >= 1e-15 && tol.is_finite()) {
            return Err(Error::invalid(format!("refinement tolerance {tol} is too small")));
        }
        Ok(RefineOptions { step_tol: tol, ..Default::default() })
    }
}

struct Objective<'a> {
    sigma: &'a PotentialGrid,
    margin: f64,
}

impl Objective<'_> {
    fn check(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("refinement iterate"));
        }
        if delta_dist(z) < self.margin.max(DEFAULT_MARGIN_REL * (1.0 + z.norm())) {
            return Err(Error::BoundaryDrift(z));
        }
        Ok(())
    }

    fn log_det(&self, z: Complex64) -> Result<LogDet> {
        self.check(z)?;
        log_det_perturbed(&assemble_bs_matrix(self.sigma, z)?)
    }

    fn smin(&self, z: Complex64) -> Result<f64> {
        self.check(z)?;
        perturbed_smallest_singular_value(&assemble_bs_matrix(self.sigma, z)?)
    }
}

/// `f(z1) / f(z0)` from two logarithmic determinants.
fn det_ratio(num: LogDet, den: LogDet) -> Complex64 {
    Complex64::from_polar((num.log_modulus - den.log_modulus).exp(), num.phase - den.phase)
}

/// Golden-section minimization of `s_min` on `z + t d`, `t ∈ [0, 1]`.
fn golden_line(obj: &Objective, z: Complex64, d: Complex64) -> Result<(Complex64, f64)> {
    let (mut a, mut b) = (0.0, 1.0);
    let eval = |t: f64| -> f64 { obj.smin(z + d * t).unwrap_or(f64::INFINITY) };
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..20 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval(x2);
        }
    }
    let t = 0.5 * (a + b);
    Ok((z + d * t, eval(t)))
}

/// Newton iteration on `f(z) = det(1 + K_h(z))` started from `z0`.
///
/// `f'` is a central difference with step `1e-5 (1 + |z|)`. When a Newton step fails to
/// decrease `|f|` even after halving it, the iterate moves to the best point found by a
/// golden-section search of `s_min(1 + K_h)` along the Newton direction and along the
/// four axis directions of the same length.
pub fn refine_root(sigma: &PotentialGrid, z0: Complex64, opts: &RefineOptions) -> Result<EigRecord> {
    let obj = Objective { sigma, margin: opts.exclusion_margin };
    let mut z = z0;
    let mut f = obj.log_det(z)?;
    let mut iterations = 0;
    let mut stalled = false;
    let mut settled = false;
    let mut last_moved = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        if f.log_modulus == f64::NEG_INFINITY {
            settled = true;
            break;
        }
        let h = 1e-5 * (1.0 + z.norm());
        let fp = det_ratio(obj.log_det(z + h)?, f);
        let fm = det_ratio(obj.log_det(z - h)?, f);
        let slope = (fp - fm) / (2.0 * h);
        if slope.norm() == 0.0 || !slope.re.is_finite() || !slope.im.is_finite() {
            stalled = true;
            break;
        }
        let step = -1.0 / slope;
        let mut accepted = None;
        let mut drifted = None;
        let mut t = 1.0;
        for _ in 0..8 {
            let cand = z + step * t;
            match obj.log_det(cand) {
                Ok(fc) if fc.log_modulus < f.log_modulus => {
                    accepted = Some((cand, fc));
                    break;
                }
                Err(Error::BoundaryDrift(w)) if t == 1.0 => drifted = Some(w),
                Err(e @ (Error::NonFinite(_) | Error::Decomposition(_))) => return Err(e),
                _ => {}
            }
            t *= 0.5;
        }
        if let (None, Some(w)) = (accepted, drifted) {
            return Err(Error::BoundaryDrift(w));
        }
        if accepted.is_none() && step.norm() <= 1e-6 * (1.0 + z.norm()) {
            // |f| is at its rounding floor (about ε^{1/m} from a zero of order m)
            settled = true;
            break;
        }
        let (next, fnext) = match accepted {
            Some(v) => v,
            None => {
                let here = obj.smin(z)?;
                let mut best = (z, here);
                for d in [step, Complex64::new(step.norm(), 0.0), Complex64::new(-step.norm(), 0.0)]
                    .into_iter()
                    .chain([Complex64::new(0.0, step.norm()), Complex64::new(0.0, -step.norm())])
                {
                    let (zc, vc) = golden_line(&obj, z, d)?;
                    if vc < best.1 {
                        best = (zc, vc);
                    }
                }
                if best.0 == z {
                    stalled = true;
                    break;
                }
                (best.0, obj.log_det(best.0)?)
            }
        };
        let moved = (next - z).norm();
        z = next;
        f = fnext;
        let scale = 1.0 + z.norm();
        // Slow convergence below 1e-8 means a multiple zero or the rounding floor.
        if moved <= opts.step_tol * scale || (moved <= 1e-8 * scale && moved > 0.25 * last_moved) {
            settled = true;
            break;
        }
        last_moved = moved;
    }
    obj.check(z)?;
    let residual = obj.smin(z)?;
    let converged = settled && !stalled && residual <= opts.residual_tol;
    let multiplicity = if opts.count_multiplicity && converged { local_multiplicity(sigma, z) } else { 1 };
    Ok(EigRecord {
        energy: ComplexEnergy::new(z)?,
        residual,
        multiplicity,
        iterations,
        converged,
    })
}

/// Winding number on a small circle around a refined root; `1` if no clean count exists.
fn local_multiplicity(sigma: &PotentialGrid, z: Complex64) -> u32 {
    let radius = (1e-3 * (1.0 + z.norm())).min(0.25 * delta_dist(z));
    let count = Contour::new(z, radius, 64).and_then(|c| count_zeros_contour(sigma, &c));
    match count {
        Ok(m) if m >= 1 => m,
        Ok(_) => {
            log::warn!("contour around {z} encloses no zero; reporting multiplicity 1");
            1
        }
        Err(e) => {
            log::warn!("multiplicity count around {z} failed ({e}); reporting 1");
            1
        }
    }
}
