//! Discrete Fourier machinery on the periodic grids of [`Grid`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::model::Grid;

/// Angular frequency of FFT bin `k` on a box of length `L`: `2π k / L` with `k` wrapped
/// to `[-n/2, n/2)`.
pub fn angular_frequency(k: usize, n: usize, box_length: f64) -> f64 {
    let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * PI * signed / box_length
}

/// `|ξ_k|²` for every flat frequency index, in FFT order.
pub fn frequency_norms_sq(grid: &Grid) -> Vec<f64> {
    let n = grid.points_per_axis;
    let axis: Vec<f64> = (0..n).map(|k| angular_frequency(k, n, grid.box_length).powi(2)).collect();
    (0..grid.len())
        .map(|j| {
            let m = grid.multi_index(j);
            (0..grid.dim).map(|k| axis[m[k]]).sum()
        })
        .collect()
}

/// In-place unnormalized DFT along every axis; `inverse` selects the `e^{+i}` sign.
pub fn fft_nd(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    assert_eq!(data.len(), grid.len());
    let n = grid.points_per_axis;
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    if grid.dim == 1 {
        fft.process(data);
        return;
    }
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..grid.dim {
        let stride = n.pow(axis as u32);
        let block = stride * n;
        for start in 0..grid.len() / n {
            // Decompose `start` into the index below the axis and the block above it.
            let low = start % stride;
            let high = start / stride;
            let base = high * block + low;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = data[base + i * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
}

/// Applies the Fourier multiplier `m` (given in FFT order) to grid samples.
pub fn apply_multiplier(grid: &Grid, u: &[Complex64], multiplier: &[Complex64]) -> Vec<Complex64> {
    let mut data = u.to_vec();
    fft_nd(grid, &mut data, false);
    for (d, m) in data.iter_mut().zip(multiplier) {
        *d *= m;
    }
    fft_nd(grid, &mut data, true);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|d| *d *= scale);
    data
}

/// First column `c` of the circulant matrix `F⁻¹ diag(m) F`, so that the matrix entry
/// at `(i, j)` is `c[i - j mod n]` (componentwise).
pub fn circulant_column(grid: &Grid, multiplier: &[Complex64]) -> Vec<Complex64> {
    let mut data = multiplier.to_vec();
    fft_nd(grid, &mut data, true);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|d| *d *= scale);
    data
}

/// Flat index of the componentwise difference `i - j` modulo `n`.
pub fn difference_index(grid: &Grid, i: &[usize; 3], j: &[usize; 3]) -> usize {
    let n = grid.points_per_axis;
    let mut diff = [0usize; 3];
    for k in 0..grid.dim {
        diff[k] = (i[k] + n - j[k]) % n;
    }
    grid.flat_index(diff)
}
