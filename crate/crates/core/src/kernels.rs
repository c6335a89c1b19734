//! Principal-branch powers, modified Bessel functions `K_ν(w)` of complex argument and
//! the explicit convolution kernels of `(-Δ - z)^{-s}` on `R^N`.
//!
//! `K_ν` is evaluated with Temme's series for `|w| <= 2` and Steed's continued fraction
//! (the second Temme/Thompson–Barnett fraction) for `|w| > 2`, both for `|ν| <= 1/2`,
//! followed by the stable upward recurrence in the order.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::model::ComplexEnergy;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 200_000;
/// `exp(-w)` is not representable beyond this real part.
const UNDERFLOW_RE: f64 = 700.0;

/// `exp(exponent * Log(base))` with the principal logarithm on `C \ (-inf, 0]`.
pub fn principal_power(base: Complex64, exponent: Complex64) -> Result<Complex64> {
    if !(base.re.is_finite() && base.im.is_finite()) {
        return Err(Error::NonFinite("principal_power base"));
    }
    if base.im == 0.0 && base.re <= 0.0 {
        return Err(Error::BranchCut(base));
    }
    Ok((exponent * base.ln()).exp())
}

/// The square root of `-z` with positive real part, for `z` off `[0, inf)`.
pub fn sqrt_neg(z: Complex64) -> Result<Complex64> {
    principal_power(-z, Complex64::new(0.5, 0.0))
}

// Taylor coefficients of 1/Γ(x) = Σ_{k>=1} c_k x^k.
const RECIP_GAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// `1/Γ(1+x)` for `|x| <= 1/2`.
fn recip_gamma_1p(x: f64) -> f64 {
    RECIP_GAMMA.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Temme's auxiliary values `(Γ1, Γ2, 1/Γ(1+μ), 1/Γ(1-μ))` for `|μ| <= 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    // Γ1 = (1/Γ(1-μ) - 1/Γ(1+μ)) / (2μ) = -Σ_{k even} c_k μ^{k-2}
    let gam1 = -RECIP_GAMMA.iter().skip(1).step_by(2).rev().fold(0.0, |acc, c| acc * mu2 + c);
    // Γ2 = (1/Γ(1-μ) + 1/Γ(1+μ)) / 2 = Σ_{k odd} c_k μ^{k-1}
    let gam2 = RECIP_GAMMA.iter().step_by(2).rev().fold(0.0, |acc, c| acc * mu2 + c);
    (gam1, gam2, recip_gamma_1p(mu), recip_gamma_1p(-mu))
}

/// `(K_μ(w), K_{μ+1}(w))` by Temme's series, `|w| <= 2`, `|μ| <= 1/2`.
fn temme_series(mu: f64, w: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let x2 = w * 0.5;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = d * mu;
    let fact2 = if e.norm() < 1e-8 { one + e * e / 6.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = (e.cosh() * gam1 + fact2 * d * gam2) * fact;
    let mut sum = ff;
    let ee = e.exp();
    let mut p = ee * (0.5 / gampl);
    let mut q = (ee * gammi).inv() * 0.5;
    let mut c = one;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (ff * fi + p + q) / (fi * fi - mu * mu);
        c = c * dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - ff * fi);
        sum1 += del1;
        if del.norm() < sum.norm() * EPS {
            return Ok((sum, sum1 * (Complex64::new(2.0, 0.0) / w)));
        }
    }
    Err(Error::Precision(format!("Temme series for K at w = {w} did not converge")))
}

/// `(e^w K_μ(w), e^w K_{μ+1}(w))` by Steed's continued fraction, `|w| > 2`, `|μ| <= 1/2`.
fn steed_scaled(mu: f64, w: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let mut b = (one + w) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25 - mu * mu;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += qnew * c;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).norm() < EPS {
            h *= a1;
            let kmu = (Complex64::new(PI, 0.0) / (w * 2.0)).sqrt() / s;
            let k1 = kmu * (w + mu + 0.5 - h) / w;
            return Ok((kmu, k1));
        }
    }
    Err(Error::Precision(format!("continued fraction for K at w = {w} did not converge")))
}

/// `e^w K_ν(w)` for real `ν >= 0` and `Re w > 0`. Never underflows.
pub fn bessel_k_scaled(nu: f64, w: Complex64) -> Result<Complex64> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::invalid(format!("Bessel order {nu} must be finite and >= 0")));
    }
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::NonFinite("Bessel argument"));
    }
    if w.re <= 0.0 {
        return Err(Error::invalid(format!("Bessel K needs Re w > 0, got {w}")));
    }
    let steps = (nu + 0.5).floor();
    let mu = nu - steps;
    let (mut k0, mut k1) = if w.norm() <= 2.0 {
        let (a, b) = temme_series(mu, w)?;
        let scale = w.exp();
        (a * scale, b * scale)
    } else {
        steed_scaled(mu, w)?
    };
    let two_over_w = Complex64::new(2.0, 0.0) / w;
    for i in 0..steps as usize {
        let next = two_over_w * (mu + 1.0 + i as f64) * k1 + k0;
        k0 = k1;
        k1 = next;
    }
    if !(k0.re.is_finite() && k0.im.is_finite()) {
        return Err(Error::Precision(format!("K_{nu}({w}) overflowed")));
    }
    Ok(k0)
}

/// The modified Bessel function of the second kind `K_ν(w)`, `ν >= 0`, `Re w > 0`.
pub fn bessel_k(nu: f64, w: Complex64) -> Result<Complex64> {
    let scaled = bessel_k_scaled(nu, w)?;
    if w.re > UNDERFLOW_RE {
        return Err(Error::Precision(format!("K_{nu}({w}) underflows; use bessel_k_scaled")));
    }
    Ok(scaled * (-w).exp())
}

fn check_order(n_dim: usize, s: f64) -> Result<()> {
    if n_dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !(s > 0.0 && s <= (n_dim as f64 + 1.0) / 2.0) {
        return Err(Error::invalid(format!("power s = {s} outside (0, (N+1)/2] for N = {n_dim}")));
    }
    Ok(())
}

/// The convolution kernel of `(-Δ - z)^{-s}` on `R^N` at distance `r`:
///
/// `2^{1-s} / ((2π)^{N/2} Γ(s)) · (√(-z)/r)^{(N-2s)/2} · K_{(N-2s)/2}(√(-z) r)`.
///
/// Distances below `1e-8 |z|^{-1/2}` are clamped to that value.
pub fn resolvent_kernel(n_dim: usize, s: f64, z: Complex64, r: f64) -> Result<Complex64> {
    check_order(n_dim, s)?;
    ComplexEnergy::new(z)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid(format!("distance {r} must be positive")));
    }
    let r = r.max(1e-8 / z.norm().sqrt());
    let k = sqrt_neg(z)?;
    let nu = (n_dim as f64 - 2.0 * s) / 2.0;
    let pref = 2f64.powf(1.0 - s) / ((2.0 * PI).powf(n_dim as f64 / 2.0) * gamma(s));
    let w = k * r;
    let power = principal_power(k / r, Complex64::new(nu, 0.0))?;
    if w.re > UNDERFLOW_RE {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kv = bessel_k_scaled(nu.abs(), w)? * (-w).exp();
    Ok(power * kv * pref)
}

/// Which pointwise envelope of the interpolation family is being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelEnvelope {
    /// `|z|^{(N-1-2ζ)/4} r^{-(N+1-2ζ)/2}`, for `0 < |ζ - N/2| <= 1/2`.
    Oscillatory,
    /// `|z|^{-(2ζ-N)/2}` (the `L^1 -> L^∞` bound), for `N/2 < ζ <= (N+1)/2`.
    Sup,
}

/// Largest ratio `|e^{ζ²} k_ζ(r)| / envelope(r)` over the sample distances, where
/// `k_ζ` is the kernel of `(-Δ - z)^{-ζ}` and `ζ = zeta_re` is real.
pub fn kernel_bound_ratio(
    n_dim: usize,
    zeta_re: f64,
    z: Complex64,
    r_samples: &[f64],
    envelope: KernelEnvelope,
) -> Result<f64> {
    let half_n = n_dim as f64 / 2.0;
    let in_regime = match envelope {
        KernelEnvelope::Oscillatory => {
            let gap = (zeta_re - half_n).abs();
            gap > 0.0 && gap <= 0.5 && zeta_re > 0.0
        }
        KernelEnvelope::Sup => zeta_re > half_n && zeta_re <= half_n + 0.5,
    };
    if !in_regime {
        return Err(Error::invalid(format!(
            "Re ζ = {zeta_re} outside the {envelope:?} regime for N = {n_dim}"
        )));
    }
    if r_samples.is_empty() {
        return Err(Error::invalid("no sample distances"));
    }
    let nf = n_dim as f64;
    let zabs = z.norm();
    let weight = (zeta_re * zeta_re).exp();
    let mut worst: f64 = 0.0;
    for &r in r_samples {
        let k = resolvent_kernel(n_dim, zeta_re, z, r)?.norm() * weight;
        let env = match envelope {
            KernelEnvelope::Oscillatory => {
                zabs.powf((nf - 1.0 - 2.0 * zeta_re) / 4.0) * r.powf(-(nf + 1.0 - 2.0 * zeta_re) / 2.0)
            }
            KernelEnvelope::Sup => zabs.powf(-(2.0 * zeta_re - nf) / 2.0),
        };
        worst = worst.max(k / env);
    }
    Ok(worst)
}
