//! Complex eigenvalues of `-Δ + σ(x') δ(x_d)` in `R^d`, computed through the
//! Birman–Schwinger reduction to the hyperplane `{x_d = 0}`, together with numerical
//! checks of eigenvalue enclosures, uniform Sobolev and trace-ideal resolvent bounds.
//!
//! `E ∉ [0, ∞)` is an eigenvalue exactly when `-1` is an eigenvalue of
//! `K(E) = ½ √σ (-Δ' - E)^{-1/2} √|σ|`, where `√σ = σ/√|σ|`. The crate discretizes
//! `K` on a periodic Fourier grid over `R^{d-1}` and locates the zeros of
//! `det(1 + K_h(E))`:
//!
//! ```
//! use leaky_spectra::{eigensolve, Grid, PotentialGrid};
//! use num_complex::Complex64;
//!
//! let grid = Grid::new(1, 40.0, 128)?;
//! let sigma = PotentialGrid::constant(grid, Complex64::new(-2.0, 0.0))?;
//! // the box adds zeros (2πk/L)² - 1 for k ≠ 0, so start closest to the k = 0 one
//! let eig = eigensolve::refine_root(&sigma, Complex64::new(-1.1, 0.0), &Default::default())?;
//! assert!((eig.value() + 1.0).norm() < 1e-9);
//! # Ok::<(), leaky_spectra::Error>(())
//! ```

pub mod bounds;
pub mod eigensolve;
pub mod error;
pub mod fourier;
pub mod kernels;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod reduced;
pub mod sobolev;

pub use error::{Error, ErrorClass, Result};
pub use model::{
    delta_dist, lp_integral, lp_norm, schatten_index_r, tau_admissible, ComplexEnergy, EigRecord, Grid,
    ModelParams, PotentialGrid, PotentialShape,
};
pub use reduced::{assemble_bs_matrix, assemble_reduced_pencil, BSMatrix, OperatorKind, SingularSpectrum};
