//! Zeros of `z ↦ det(1 + K_h(z))`: lattice scan, Newton refinement, argument-principle
//! multiplicities, and a full-operator finite-difference oracle for `d = 2`.

mod contour;
mod oracle2d;
mod refine;
mod scan;

pub use contour::{count_zeros_contour, Contour};
pub use oracle2d::{oracle_full_2d, Oracle2dOptions, OracleEig, OracleOutput};
pub use refine::{refine_root, RefineOptions};
pub use scan::{scan_region, ScanOutput, ScanRegion, ScanSample, CANDIDATE_THRESHOLD};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{EigRecord, PotentialGrid};

/// Result of [`find_eigenvalues`].
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Converged, distinct eigenvalues sorted by real then imaginary part.
    pub eigenvalues: Vec<EigRecord>,
    pub scan: ScanOutput,
    /// Candidates whose refinement failed or did not converge.
    pub rejected: Vec<(Complex64, String)>,
}

/// Scans `region` on `scan_sigma`, then refines every candidate on `sigma`. Roots that land
/// outside the region are rejected.
///
/// Passing a coarser `scan_sigma` (the same potential on fewer points) keeps the lattice
/// scan cheap; refinement always happens on `sigma`.
pub fn find_eigenvalues(
    sigma: &PotentialGrid,
    scan_sigma: &PotentialGrid,
    region: &ScanRegion,
    opts: &RefineOptions,
) -> Result<Spectrum> {
    let scan = scan_region(scan_sigma, region)?;
    let refined: Vec<(Complex64, Result<EigRecord>)> =
        scan.candidates.par_iter().map(|&z0| (z0, refine_root(sigma, z0, opts))).collect();
    let mut eigenvalues: Vec<EigRecord> = Vec::new();
    let mut rejected = Vec::new();
    for (z0, r) in refined {
        match r {
            Ok(rec) if rec.converged && !region.contains(rec.value()) => {
                rejected.push((z0, format!("converged to {} outside the region", rec.value())))
            }
            Ok(rec) if rec.converged => {
                let z = rec.value();
                if !eigenvalues.iter().any(|e| (e.value() - z).norm() <= 1e-7 * (1.0 + z.norm())) {
                    eigenvalues.push(rec);
                }
            }
            Ok(rec) => rejected.push((z0, format!("not converged (residual {:.2e})", rec.residual))),
            Err(e @ (Error::BoundaryDrift(_) | Error::TooCloseToHalfLine { .. } | Error::BranchCut(_))) => {
                rejected.push((z0, e.to_string()))
            }
            Err(e) => return Err(e),
        }
    }
    eigenvalues.sort_by(|a, b| a.value().re.total_cmp(&b.value().re).then(a.value().im.total_cmp(&b.value().im)));
    Ok(Spectrum { eigenvalues, scan, rejected })
}
