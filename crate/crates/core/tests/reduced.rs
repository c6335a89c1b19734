use std::f64::consts::PI;

use leaky_spectra::eigensolve::{refine_root, RefineOptions};
use leaky_spectra::linalg;
use leaky_spectra::reduced::{
    assemble_bs_matrix, assemble_bs_matrix_ordered, assemble_reduced_pencil, det_perturbed,
    perturbed_smallest_singular_value, singular_values, FactorOrder,
};
use leaky_spectra::{lp_integral, lp_norm, Grid, PotentialGrid};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bump(n: usize, amplitude: Complex64) -> PotentialGrid {
    PotentialGrid::gaussian(Grid::new(1, 40.0, n).unwrap(), amplitude, 1.0).unwrap()
}

#[test]
fn gaussian_norms() {
    let sigma = bump(512, c(1.0, 0.0));
    // ∫ e^{-2x²} = (π/2)^{1/2}
    assert!((lp_integral(&sigma, 2.0).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-12);
    assert!((lp_norm(&sigma, 2.0).unwrap() - (PI / 2.0).powf(0.25)).abs() < 1e-12);
    let sigma = PotentialGrid::gaussian(Grid::new(2, 20.0, 64).unwrap(), c(0.0, 3.0), 1.0).unwrap();
    // ∫ 27 e^{-3|x|²} over the plane = 9π
    assert!((lp_integral(&sigma, 3.0).unwrap() - 9.0 * PI).abs() < 1e-9);
}

#[test]
fn determinant_is_invariant_under_factor_swap() {
    let sigma = bump(256, c(-3.0, 1.0));
    for z in [c(-1.0, 0.5), c(0.7, -2.0), c(-5.0, -0.1)] {
        let a = det_perturbed(&assemble_bs_matrix_ordered(&sigma, z, FactorOrder::SigmaFirst).unwrap()).unwrap();
        let b = det_perturbed(&assemble_bs_matrix_ordered(&sigma, z, FactorOrder::ModulusFirst).unwrap()).unwrap();
        assert!((a - b).norm() < 1e-11 * a.norm().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn conjugation_conjugates_entries() {
    let sigma = bump(128, c(-2.0, 1.5));
    let z = c(-0.3, 1.1);
    let k = assemble_bs_matrix(&sigma, z).unwrap();
    let kc = assemble_bs_matrix(&sigma.conj(), z.conj()).unwrap();
    let (a, b) = (k.to_full(), kc.to_full());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            assert!((a[(i, j)].conj() - b[(i, j)]).norm() < 1e-14);
        }
    }
}

#[test]
fn smallest_singular_value_converges_under_refinement() {
    for z in [c(-1.0, -1.0), c(0.5, 1.0)] {
        let coarse = perturbed_smallest_singular_value(&assemble_bs_matrix(&bump(256, c(-2.0, 1.0)), z).unwrap()).unwrap();
        let fine = perturbed_smallest_singular_value(&assemble_bs_matrix(&bump(512, c(-2.0, 1.0)), z).unwrap()).unwrap();
        assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
    }
}

#[test]
fn pencil_is_singular_at_refined_eigenvalues() {
    let sigma = bump(256, c(-3.0, 0.0) * Complex64::from_polar(1.0, PI / 5.0));
    let rec = refine_root(&sigma, c(-1.5, -1.0), &RefineOptions::default()).unwrap();
    assert!(rec.converged);
    let e = rec.value();
    let pencil = assemble_reduced_pencil(&sigma, e).unwrap();
    let s = linalg::singular_values(pencil.entries()).unwrap();
    let scale = s[0];
    assert!(*s.last().unwrap() < 1e-6 * scale, "pencil s_min {} at {e}", s.last().unwrap());
    // and away from it the two formulations are both regular
    let away = e + c(0.3, 0.2);
    let s = linalg::singular_values(assemble_reduced_pencil(&sigma, away).unwrap().entries()).unwrap();
    assert!(*s.last().unwrap() > 1e-3 * s[0]);
    assert!(perturbed_smallest_singular_value(&assemble_bs_matrix(&sigma, away).unwrap()).unwrap() > 1e-3);
}

#[test]
fn operator_norm_below_schatten_norms() {
    let sigma = bump(256, c(-1.0, 2.0));
    let spec = singular_values(&assemble_bs_matrix(&sigma, c(-2.0, 3.0)).unwrap()).unwrap();
    let top = spec.schatten_norm(f64::INFINITY).unwrap();
    let mut prev = f64::INFINITY;
    for r in [1.0, 1.5, 2.0, 3.0, 6.0] {
        let v = spec.schatten_norm(r).unwrap();
        assert!(top <= v * (1.0 + 1e-14) && v <= prev * (1.0 + 1e-14));
        prev = v;
    }
}
