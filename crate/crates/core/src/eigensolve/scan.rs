use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{delta_dist, PotentialGrid};
use crate::reduced::{assemble_bs_matrix, perturbed_smallest_singular_value};

/// Scan minima below this value of `s_min(1 + K)` become candidates.
pub const CANDIDATE_THRESHOLD: f64 = 0.2;

/// A rectangular lattice of spectral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRegion {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub resolution: (usize, usize),
    /// Lattice points with `δ(z)` below this are skipped.
    pub exclusion_margin: f64,
}

impl ScanRegion {
    pub fn new(re_range: (f64, f64), im_range: (f64, f64), resolution: (usize, usize), exclusion_margin: f64) -> Result<Self> {
        let r = ScanRegion { re_range, im_range, resolution, exclusion_margin };
        r.validate()?;
        Ok(r)
    }

    /// Square region of half-width `radius` around `center`, with `n × n` points.
    pub fn around(center: Complex64, radius: f64, n: usize) -> Result<Self> {
        Self::new(
            (center.re - radius, center.re + radius),
            (center.im - radius, center.im + radius),
            (n, n),
            1e-3 * radius,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_range.0, self.re_range.1, self.im_range.0, self.im_range.1]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_range.0 >= self.re_range.1 || self.im_range.0 >= self.im_range.1 {
            return Err(Error::invalid("scan ranges must be finite with lo < hi"));
        }
        if self.resolution.0 < 2 || self.resolution.1 < 2 {
            return Err(Error::invalid("scan resolution must be at least 2 x 2"));
        }
        if !(self.exclusion_margin > 0.0 && self.exclusion_margin.is_finite()) {
            return Err(Error::invalid("exclusion margin must be positive"));
        }
        Ok(())
    }

    /// Lattice point `(i, j)`, `i` along the real axis.
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let t = |k: usize, n: usize, (lo, hi): (f64, f64)| lo + (hi - lo) * k as f64 / (n - 1) as f64;
        Complex64::new(t(i, self.resolution.0, self.re_range), t(j, self.resolution.1, self.im_range))
    }

    /// Whether `z` lies in the closed rectangle.
    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_range.0..=self.re_range.1).contains(&z.re) && (self.im_range.0..=self.im_range.1).contains(&z.im)
    }

    fn admits(&self, z: Complex64) -> bool {
        delta_dist(z) >= self.exclusion_margin.max(1e-8 * (1.0 + z.norm()))
    }
}

/// One lattice sample of the heatmap; `smallest_sv` is `None` inside the exclusion margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub z: Complex64,
    pub smallest_sv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    /// Local minimizers of `s_min(1 + K_h(z))` below [`CANDIDATE_THRESHOLD`], by value.
    pub candidates: Vec<Complex64>,
    /// Row-major over `(j, i)`: imaginary index outer, real index inner.
    pub heatmap: Vec<ScanSample>,
    /// Candidates lying on the edge of the region (the true minimum may be outside).
    pub boundary_candidates: usize,
}

/// Evaluates `s_min(1 + K_h(z))` on the lattice and returns its small local minima.
pub fn scan_region(sigma: &PotentialGrid, region: &ScanRegion) -> Result<ScanOutput> {
    region.validate()?;
    let (nr, ni) = region.resolution;
    let values: Vec<Option<f64>> = (0..nr * ni)
        .into_par_iter()
        .map(|k| {
            let z = region.point(k % nr, k / nr);
            if !region.admits(z) {
                return Ok(None);
            }
            let m = assemble_bs_matrix(sigma, z)?;
            perturbed_smallest_singular_value(&m).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut found = Vec::new();
    let mut boundary_candidates = 0;
    for j in 0..ni {
        for i in 0..nr {
            let Some(v) = values[j * nr + i] else { continue };
            if v >= CANDIDATE_THRESHOLD {
                continue;
            }
            let mut is_min = true;
            for dj in -1isize..=1 {
                for di in -1isize..=1 {
                    let (ii, jj) = (i as isize + di, j as isize + dj);
                    if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= nr as isize || jj >= ni as isize {
                        continue;
                    }
                    if let Some(w) = values[jj as usize * nr + ii as usize] {
                        // ties go to the first lattice point in scan order
                        let earlier = (jj as usize, ii as usize) < (j, i);
                        if w < v || (w == v && earlier) {
                            is_min = false;
                        }
                    }
                }
            }
            if is_min {
                if i == 0 || j == 0 || i == nr - 1 || j == ni - 1 {
                    boundary_candidates += 1;
                    log::warn!("scan minimum at {} lies on the region boundary", region.point(i, j));
                }
                found.push((v, region.point(i, j)));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let heatmap = (0..nr * ni)
        .map(|k| ScanSample { z: region.point(k % nr, k / nr), smallest_sv: values[k] })
        .collect();
    Ok(ScanOutput { candidates: found.into_iter().map(|(_, z)| z).collect(), heatmap, boundary_candidates })
}
