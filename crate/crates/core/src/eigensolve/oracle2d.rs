//! Independent check for `d = 2`: finite differences for the full operator on a square
//! Dirichlet box, with no use of the Birman–Schwinger reduction.
//!
//! The quadratic form `∫|∇ψ|² + ∫σ|ψ(x, 0)|²` on a grid of spacing `h` gives the
//! five-point Laplacian plus the diagonal `σ(x_i)/h` on the grid line `y = 0`. The
//! matrix has `(L/h - 1)²` rows, so eigenvalues near each requested shift `s` are found
//! by Arnoldi iteration on `(A - s)^{-1}`. That inverse is applied with sine transforms
//! (which diagonalize the Dirichlet Laplacian) and a Woodbury correction for the rank
//! `L/h - 1` surface term.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PotentialGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Oracle2dOptions {
    pub box_length: f64,
    pub spacing: f64,
    /// Eigenvalues are sought near each of these points.
    pub shifts: Vec<Complex64>,
    pub krylov_dim: usize,
    pub wanted_per_shift: usize,
    pub max_restarts: usize,
    /// Accept a Ritz pair when `|A y - μ y| <= tol (|μ| + 8/h²) |y|`.
    pub tol: f64,
    /// Eigenvalues with `Re μ >= 0` are reported only if `|Im μ|` exceeds this.
    pub im_threshold: f64,
}

impl Default for Oracle2dOptions {
    fn default() -> Self {
        Oracle2dOptions {
            box_length: 40.0,
            spacing: 0.05,
            shifts: Vec::new(),
            krylov_dim: 20,
            wanted_per_shift: 1,
            max_restarts: 40,
            tol: 1e-8,
            im_threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEig {
    pub value: Complex64,
    pub residual: f64,
    /// `|y - Py| / |y|` for the reflection `P: x_d -> -x_d`.
    pub parity_defect: f64,
    /// Fraction of `|y|²` in the outer 10% band of the box.
    pub boundary_weight: f64,
}

impl OracleEig {
    pub fn is_localized(&self) -> bool {
        self.boundary_weight < 1e-3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutput {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<OracleEig>,
    pub warnings: Vec<String>,
}

/// Orthonormal DST-I of length `n` through a complex FFT of the odd extension.
struct Dst {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl Dst {
    fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * n + 2);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Dst { n, fft, buf: vec![Complex64::new(0.0, 0.0); 2 * n + 2], scratch, scale: (2.0 / (n + 1) as f64).sqrt() }
    }

    /// Transforms `data[offset + k * stride]`, `k < n`, in place.
    fn apply(&mut self, data: &mut [Complex64], offset: usize, stride: usize) {
        let n = self.n;
        self.buf[0] = Complex64::new(0.0, 0.0);
        self.buf[n + 1] = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let v = data[offset + k * stride];
            self.buf[k + 1] = v;
            self.buf[2 * n + 1 - k] = -v;
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        // FFT of the odd extension is -2i Σ x_j sin(π (j+1) k / (n+1))
        let f = Complex64::new(0.0, 0.5 * self.scale);
        for k in 0..n {
            data[offset + k * stride] = self.buf[k + 1] * f;
        }
    }
}

struct Problem {
    n: usize,
    h: f64,
    j0: usize,
    /// `σ(x_i) / h` on the line `y = 0`.
    surface: Vec<Complex64>,
    lambda: Vec<f64>,
    /// `S[j0, b]` for the orthonormal sine basis in `y`.
    trace_row: Vec<f64>,
    dst: Dst,
}

impl Problem {
    fn new(sigma: &PotentialGrid, opts: &Oracle2dOptions) -> Result<Self> {
        let cells = opts.box_length / opts.spacing;
        let half = (0.5 * cells).round();
        if !(opts.spacing > 0.0 && opts.box_length > 0.0) || (cells - 2.0 * half).abs() > 1e-9 * cells || half < 2.0 {
            return Err(Error::invalid("box length must be an even multiple of the spacing"));
        }
        let n = 2 * half as usize - 1;
        let j0 = half as usize - 1;
        let h = opts.spacing;
        let xs = (0..n).map(|i| -0.5 * opts.box_length + (i + 1) as f64 * h);
        let surface = sample_potential(sigma, xs).into_iter().map(|v| v / h).collect();
        let lambda = (0..n)
            .map(|a| (2.0 / h * (std::f64::consts::PI * (a + 1) as f64 / (2 * (n + 1)) as f64).sin()).powi(2))
            .collect();
        let scale = (2.0 / (n + 1) as f64).sqrt();
        let trace_row = (0..n)
            .map(|b| scale * (std::f64::consts::PI * ((j0 + 1) * (b + 1)) as f64 / (n + 1) as f64).sin())
            .collect();
        Ok(Problem { n, h, j0, surface, lambda, trace_row, dst: Dst::new(n) })
    }

    fn dst2(&mut self, v: &mut [Complex64]) {
        let n = self.n;
        for j in 0..n {
            self.dst.apply(v, j * n, 1);
        }
        for i in 0..n {
            self.dst.apply(v, i, n);
        }
    }

    fn apply_a(&self, y: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let c = 1.0 / (self.h * self.h);
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                let mut v = y[k] * 4.0;
                if i > 0 {
                    v -= y[k - 1];
                }
                if i + 1 < n {
                    v -= y[k + 1];
                }
                if j > 0 {
                    v -= y[k - n];
                }
                if j + 1 < n {
                    v -= y[k + n];
                }
                out[k] = v * c;
            }
        }
        for i in 0..n {
            out[self.j0 * n + i] += self.surface[i] * y[self.j0 * n + i];
        }
        out
    }
}

/// `σ` at physical coordinates: the closed form when available, otherwise trigonometric
/// interpolation of the periodic samples (zero outside their box).
fn sample_potential(sigma: &PotentialGrid, xs: impl Iterator<Item = f64>) -> Vec<Complex64> {
    if let Some(shape) = &sigma.descriptor {
        let shape = shape.resolve(1);
        return xs.map(|x| shape.eval(&[x])).collect();
    }
    let g = &sigma.grid;
    let n = g.points_per_axis;
    let mut coeffs = sigma.samples.clone();
    crate::fourier::fft_nd(g, &mut coeffs, false);
    xs.map(|x| {
        if x.abs() > 0.5 * g.box_length {
            return Complex64::new(0.0, 0.0);
        }
        let t = x - g.axis_coord(0);
        let sum: Complex64 = (0..n)
            .map(|k| {
                let xi = crate::fourier::angular_frequency(k, n, g.box_length);
                // the Nyquist mode is split symmetrically so real data stays real
                let e = if k == n / 2 { Complex64::new((xi * t).cos(), 0.0) } else { Complex64::from_polar(1.0, xi * t) };
                coeffs[k] * e
            })
            .sum();
        sum / n as f64
    })
    .collect()
}

/// `(A - s)^{-1}` via sine transforms and a dense capacitance solve on the line `y = 0`.
struct ShiftInvert<'a> {
    p: &'a mut Problem,
    shift: Complex64,
    lu: faer::linalg::solvers::PartialPivLu<Complex64>,
}

impl<'a> ShiftInvert<'a> {
    fn new(p: &'a mut Problem, shift: Complex64) -> Result<Self> {
        let n = p.n;
        // g_a = Σ_b S[j0,b]² / (λ_a + λ_b - s); G = S diag(g) S on the surface line
        let g: Vec<Complex64> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| p.trace_row[b] != 0.0)
                    .map(|b| p.trace_row[b].powi(2) / (p.lambda[a] + p.lambda[b] - shift))
                    .sum()
            })
            .collect();
        if g.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::invalid(format!("shift {shift} coincides with a Dirichlet eigenvalue")));
        }
        let mut gmat = Mat::<Complex64>::zeros(n, n);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            col[j] = Complex64::new(1.0, 0.0);
            p.dst.apply(&mut col, 0, 1);
            for (c, gv) in col.iter_mut().zip(&g) {
                *c *= gv;
            }
            p.dst.apply(&mut col, 0, 1);
            for i in 0..n {
                gmat[(i, j)] = col[i];
            }
        }
        let m = Mat::from_fn(n, n, |i, j| {
            let v = gmat[(i, j)] * p.surface[j];
            if i == j {
                v + 1.0
            } else {
                v
            }
        });
        let lu = m.partial_piv_lu();
        Ok(ShiftInvert { p, shift, lu })
    }

    fn apply(&mut self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.p.n;
        let mut vh = v.to_vec();
        self.p.dst2(&mut vh);
        // trace on y = 0 of R v, with R = (T - s)^{-1}
        let mut t = vec![Complex64::new(0.0, 0.0); n];
        for b in 0..n {
            let sb = self.p.trace_row[b];
            if sb == 0.0 {
                continue;
            }
            for a in 0..n {
                t[a] += vh[b * n + a] * sb / (self.p.lambda[a] + self.p.lambda[b] - self.shift);
            }
        }
        self.p.dst.apply(&mut t, 0, 1);
        let rhs = Mat::from_fn(n, 1, |i, _| t[i]);
        let sol = self.lu.solve(&rhs);
        let mut w: Vec<Complex64> = (0..n).map(|i| sol[(i, 0)] * self.p.surface[i]).collect();
        self.p.dst.apply(&mut w, 0, 1);
        for b in 0..n {
            let sb = self.p.trace_row[b];
            for a in 0..n {
                let k = b * n + a;
                vh[k] = (vh[k] - w[a] * sb) / (self.p.lambda[a] + self.p.lambda[b] - self.shift);
            }
        }
        self.p.dst2(&mut vh);
        vh
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Ritz pairs of `(A - s)^{-1}` nearest the shift, by explicitly restarted Arnoldi.
fn arnoldi(op: &mut ShiftInvert, start: Vec<Complex64>, opts: &Oracle2dOptions) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let m = opts.krylov_dim.max(opts.wanted_per_shift + 2);
    let wanted = opts.wanted_per_shift.max(1);
    let mut v0 = start;
    let mut last = Vec::new();
    for _ in 0..opts.max_restarts.max(1) {
        let nv = norm(&v0);
        v0.iter_mut().for_each(|x| *x /= nv);
        let mut basis = vec![v0.clone()];
        let mut hess = Mat::<Complex64>::zeros(m + 1, m);
        let mut k_used = m;
        for k in 0..m {
            let mut w = op.apply(&basis[k]);
            for _ in 0..2 {
                for (j, q) in basis.iter().enumerate() {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                    hess[(j, k)] += c;
                }
            }
            let beta = norm(&w);
            hess[(k + 1, k)] = Complex64::new(beta, 0.0);
            if beta < 1e-14 * hess[(k, k)].norm().max(1e-300) {
                k_used = k + 1;
                break;
            }
            w.iter_mut().for_each(|x| *x /= beta);
            basis.push(w);
        }
        let hk = hess.as_ref().submatrix(0, 0, k_used, k_used).to_owned();
        let eig = hk.eigen().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
        let theta = eig.S().column_vector();
        let u = eig.U();
        let mut order: Vec<usize> = (0..k_used).collect();
        order.sort_by(|&a, &b| theta[b].norm().total_cmp(&theta[a].norm()));
        let beta = hess[(k_used, k_used - 1)].norm();
        let mut done = true;
        let mut pairs = Vec::new();
        for &i in order.iter().take(wanted) {
            let est = beta * u[(k_used - 1, i)].norm();
            if est > 1e-10 * theta[i].norm() {
                done = false;
            }
            let mut y = vec![Complex64::new(0.0, 0.0); v0.len()];
            for (j, q) in basis.iter().take(k_used).enumerate() {
                let c = u[(j, i)];
                y.iter_mut().zip(q).for_each(|(a, b)| *a += c * b);
            }
            pairs.push((op.shift + 1.0 / theta[i], y));
        }
        let restart: Vec<Complex64> = pairs
            .iter()
            .fold(vec![Complex64::new(0.0, 0.0); v0.len()], |mut acc, (_, y)| {
                let ny = norm(y);
                acc.iter_mut().zip(y).for_each(|(a, b)| *a += b / ny);
                acc
            });
        last = pairs;
        if done || k_used < m {
            break;
        }
        v0 = restart;
    }
    Ok(last)
}

/// Eigenvalues of the finite-difference operator near the requested shifts.
pub fn oracle_full_2d(sigma: &PotentialGrid, opts: &Oracle2dOptions) -> Result<OracleOutput> {
    if sigma.dim() != 1 {
        return Err(Error::invalid("the full-operator oracle handles d = 2 (N = 1) only"));
    }
    if opts.shifts.is_empty() {
        return Err(Error::invalid("the oracle needs at least one shift"));
    }
    let mut p = Problem::new(sigma, opts)?;
    let n = p.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let x = -0.5 * opts.box_length + ((k % n) + 1) as f64 * p.h;
            let y = -0.5 * opts.box_length + ((k / n) + 1) as f64 * p.h;
            let envelope = (-(x * x + y * y) / 32.0).exp();
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * envelope
        })
        .collect();

    let mut found: Vec<OracleEig> = Vec::new();
    let mut warnings = Vec::new();
    for &shift in &opts.shifts {
        let pairs = {
            let mut op = ShiftInvert::new(&mut p, shift)?;
            arnoldi(&mut op, start.clone(), opts)?
        };
        for (mu, y) in pairs {
            let ny = norm(&y);
            let ay = p.apply_a(&y);
            let residual = ay.iter().zip(&y).map(|(a, b)| (a - mu * b).norm_sqr()).sum::<f64>().sqrt() / ny;
            if residual > opts.tol * (mu.norm() + 8.0 / (p.h * p.h)) {
                warnings.push(format!("Ritz value {mu} near shift {shift} did not converge (residual {residual:.2e})"));
                continue;
            }
            if mu.re >= 0.0 && mu.im.abs() <= opts.im_threshold {
                continue;
            }
            if found.iter().any(|e| (e.value - mu).norm() <= 1e-6 * (1.0 + mu.norm())) {
                continue;
            }
            let mut odd = 0.0;
            let mut band = 0.0;
            let edge = (0.1 * (n + 1) as f64).ceil() as usize;
            for j in 0..n {
                for i in 0..n {
                    let k = j * n + i;
                    odd += (y[k] - y[(2 * p.j0 - j) * n + i]).norm_sqr();
                    if i < edge || j < edge || i + edge >= n || j + edge >= n {
                        band += y[k].norm_sqr();
                    }
                }
            }
            let eig = OracleEig {
                value: mu,
                residual,
                parity_defect: odd.sqrt() / ny,
                boundary_weight: band / (ny * ny),
            };
            if !eig.is_localized() {
                let msg = format!("eigenvector for {mu} is not localized (boundary weight {:.2e})", eig.boundary_weight);
                log::warn!("{msg}");
                warnings.push(msg);
            }
            found.push(eig);
        }
    }
    found.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(OracleOutput { eigenvalues: found, warnings })
}
