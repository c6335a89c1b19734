//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate, error estimate, and `∫|f|` (used as a roundoff floor).
fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        kronrod += (lo + hi) * WGK[j];
        abs += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm(), abs * half.abs())
}

/// `∫_a^b f` to absolute tolerance `abs_tol` or relative tolerance `rel_tol`.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Complex64> {
    let mut pending = vec![(a, b)];
    let mut total = Complex64::new(0.0, 0.0);
    let mut pieces = 0usize;
    let (whole, _, _) = gk15(&f, a, b);
    let target = abs_tol.max(rel_tol * whole.norm());
    while let Some((lo, hi)) = pending.pop() {
        pieces += 1;
        if pieces > 100_000 {
            return Err(Error::Precision("adaptive quadrature exceeded its interval budget".into()));
        }
        let (value, err, abs) = gk15(&f, lo, hi);
        let share = target * (hi - lo) / (b - a);
        if err <= share || err <= 50.0 * f64::EPSILON * abs || (hi - lo) < 1e-12 * (b - a).abs() {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            pending.push((mid, hi));
            pending.push((lo, mid));
        }
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::NonFinite("quadrature"));
    }
    Ok(total)
}
