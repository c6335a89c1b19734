use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{delta_dist, PotentialGrid};
use crate::reduced::log_derivative_det;

/// Rounding residue above which a winding number is not accepted as an integer.
const MAX_ROUNDING_RESIDUE: f64 = 0.1;
/// Quadrature is doubled at most this many times before giving up.
const MAX_DOUBLINGS: u32 = 3;

/// A circle `|z - center| = radius` sampled at `quadrature_points` equispaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: Complex64,
    pub radius: f64,
    pub quadrature_points: usize,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64, quadrature_points: usize) -> Result<Self> {
        let c = Contour { center, radius, quadrature_points };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("contour radius must be positive"));
        }
        if self.quadrature_points < 64 {
            return Err(Error::invalid("contours need at least 64 quadrature points"));
        }
        if delta_dist(self.center) <= self.radius {
            return Err(Error::invalid(format!(
                "disk of radius {} around {} meets [0, inf)",
                self.radius, self.center
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

fn winding(sigma: &PotentialGrid, c: &Contour, points: usize) -> Result<Complex64> {
    let g: Vec<(Complex64, Complex64)> = (0..points)
        .into_par_iter()
        .map(|k| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / points as f64);
            Ok((e, log_derivative_det(sigma, c.center + e * c.radius)?))
        })
        .collect::<Result<_>>()?;
    let limit = 1.0 / (1e-6 * c.radius);
    // sequential sum in node order keeps the result bit-stable
    let mut sum = Complex64::new(0.0, 0.0);
    for (e, v) in g {
        if v.norm() > limit {
            return Err(Error::NearContourZero(c.radius));
        }
        sum += v * e;
    }
    Ok(sum * (c.radius / points as f64))
}

/// Number of zeros of `det(1 + K_h)` inside the contour, counted with multiplicity,
/// from the trapezoidal rule for `(2πi)^{-1} ∮ f'/f`.
pub fn count_zeros_contour(sigma: &PotentialGrid, c: &Contour) -> Result<u32> {
    c.validate()?;
    let mut points = c.quadrature_points;
    let mut residue = f64::INFINITY;
    for _ in 0..=MAX_DOUBLINGS {
        let w = winding(sigma, c, points)?;
        let rounded = w.re.round();
        residue = (w - rounded).norm();
        if residue <= MAX_ROUNDING_RESIDUE {
            if rounded < 0.0 {
                return Err(Error::NonIntegerWinding(w.re));
            }
            return Ok(rounded as u32);
        }
        points *= 2;
    }
    Err(Error::NonIntegerWinding(residue))
}
