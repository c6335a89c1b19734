use leaky_spectra::bounds::{
    bs_norm_ratio, check_enclosure, disk_lhs, lieb_thirring_report, real_lower_bound, strip_lhs, Theorem,
};
use leaky_spectra::eigensolve::{find_eigenvalues, refine_root, RefineOptions, ScanRegion};
use leaky_spectra::{delta_dist, ComplexEnergy, EigRecord, Grid, ModelParams, PotentialGrid, PotentialShape};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eig(z: Complex64, multiplicity: u32) -> EigRecord {
    EigRecord { energy: ComplexEnergy::new(z).unwrap(), residual: 0.0, multiplicity, iterations: 0, converged: true }
}

fn plateau(n: usize) -> PotentialGrid {
    let shape = PotentialShape::Plateau { amplitude: c(-2.0, 0.0), half_width: 10.0 };
    PotentialGrid::from_shape(Grid::new(1, 40.0, n).unwrap(), shape).unwrap()
}

#[test]
fn truncated_constant_disk_and_real_bounds() {
    let sigma = plateau(512);
    let rec = refine_root(&sigma, c(-1.05, 0.0), &RefineOptions::default()).unwrap();
    assert!(rec.converged);
    let e = rec.value();
    assert!((e - c(-1.0, 0.0)).norm() < 0.05, "{e}");

    let report = check_enclosure(&[rec], &sigma, &ModelParams::new(2, 0.5, 0.0).unwrap()).unwrap();
    assert_eq!(report.theorem, Theorem::Disk);
    assert!((report.lhs - 1.0).abs() < 0.03);
    assert!((report.rhs_norm - 80.0).abs() < 80.0 * 0.01, "rhs {}", report.rhs_norm);
    assert!((report.ratio - 0.0125).abs() < 0.0125 * 0.05 && report.pass);

    let real = real_lower_bound(&sigma, &[rec], 0.5).unwrap();
    assert!((real.lhs - 1.0).abs() < 0.03 && (real.rhs_norm - report.rhs_norm).abs() < 1e-12);
}

#[test]
fn repulsive_potential_has_no_eigenvalues() {
    let sigma = PotentialGrid::gaussian(Grid::new(1, 40.0, 256).unwrap(), c(2.0, 0.0), 1.0).unwrap();
    let region = ScanRegion::new((-6.0, 1.0), (-3.0, 3.0), (20, 20), 1e-3).unwrap();
    let eigs = find_eigenvalues(&sigma, &sigma, &region, &RefineOptions::default()).unwrap().eigenvalues;
    assert!(eigs.is_empty());
    let r = real_lower_bound(&sigma, &eigs, 0.5).unwrap();
    assert_eq!((r.lhs, r.ratio), (0.0, 0.0));
}

#[test]
fn disk_ratio_is_translation_invariant() {
    let sigma = PotentialGrid::gaussian(Grid::new(1, 40.0, 256).unwrap(), c(-3.0, 1.0), 1.0).unwrap();
    let moved = sigma.shifted([-29, 0, 0]);
    let params = ModelParams::new(2, 0.25, 0.0).unwrap();
    let a = refine_root(&sigma, c(-2.0, -1.3), &RefineOptions::default()).unwrap();
    let b = refine_root(&moved, c(-2.0, -1.3), &RefineOptions::default()).unwrap();
    let ra = check_enclosure(&[a], &sigma, &params).unwrap().ratio;
    let rb = check_enclosure(&[b], &moved, &params).unwrap().ratio;
    assert!((ra - rb).abs() < 1e-10 * ra);
}

#[test]
fn eigenvalues_scale_covariantly() {
    // σ_λ(x) = λ σ(λ x) on the box of length L/λ with the same samples gives E_λ = λ² E.
    let lambda = 2.0;
    let sigma = PotentialGrid::gaussian(Grid::new(1, 40.0, 256).unwrap(), c(-3.0, 0.8), 1.0).unwrap();
    let scaled = PotentialGrid::from_samples(
        Grid::new(1, 40.0 / lambda, 256).unwrap(),
        sigma.samples.iter().map(|s| s * lambda).collect(),
    )
    .unwrap();
    let a = refine_root(&sigma, c(-2.0, -1.0), &RefineOptions::default()).unwrap().value();
    let b = refine_root(&scaled, c(-2.0, -1.0) * lambda * lambda, &RefineOptions::default()).unwrap().value();
    assert!((b - a * lambda * lambda).norm() < 1e-2 * b.norm(), "{a} {b}");
    let params = ModelParams::new(2, 0.5, 0.0).unwrap();
    let ra = check_enclosure(&[eig(a, 1)], &sigma, &params).unwrap().ratio;
    let rb = check_enclosure(&[eig(b, 1)], &scaled, &params).unwrap().ratio;
    assert!((ra - rb).abs() < 1e-2 * ra);
}

#[test]
fn operator_norm_ratio_below_schatten_ratio() {
    let sigma = PotentialGrid::gaussian(Grid::new(1, 40.0, 256).unwrap(), c(-1.0, 1.0), 1.0).unwrap();
    let params = ModelParams::new(2, 0.25, 0.0).unwrap();
    for z in [c(-3.0, 1.0), c(5.0, 2.0), c(0.0, -10.0)] {
        let inf = bs_norm_ratio(&sigma, z, &params, f64::INFINITY).unwrap();
        let two = bs_norm_ratio(&sigma, z, &params, 2.0).unwrap();
        assert!(inf <= two);
    }
}

#[test]
fn strip_report_above_one_half() {
    let sigma = PotentialGrid::gaussian(Grid::new(1, 40.0, 64).unwrap(), c(-1.0, 0.0), 1.0).unwrap();
    let e = c(-0.5, -(0.75f64.sqrt()));
    let r = check_enclosure(&[eig(e, 1)], &sigma, &ModelParams::new(2, 0.8, 0.0).unwrap()).unwrap();
    assert_eq!(r.theorem, Theorem::Strip);
    assert!((r.lhs - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn strip_and_disk_agree_in_left_half_plane(re in -50.0..0.0f64, im in -50.0..50.0f64, g in 0.05..2.0f64) {
        prop_assume!(re < -1e-6);
        let e = c(re, im);
        prop_assert!((strip_lhs(e, g) - disk_lhs(e, g)).abs() <= 1e-12 * disk_lhs(e, g));
        prop_assert!((strip_lhs(e, 0.5) - e.norm().sqrt()).abs() <= 1e-12 * e.norm().sqrt());
    }

    #[test]
    fn lieb_thirring_sum_is_monotone(
        base in prop::collection::vec((1.0..20.0f64, -3.0..3.0f64), 1..6),
        pick in 0usize..6,
        grow in 1.0..4.0f64,
        tau in 0.0..0.9f64,
    ) {
        // |E_j| grows at fixed δ(E_j) by moving Re E_j to the right at fixed Im E_j
        let sigma = PotentialGrid::gaussian(Grid::new(1, 20.0, 32).unwrap(), c(-1.0, 0.0), 1.0).unwrap();
        let params = ModelParams::new(2, 0.25, tau).unwrap();
        let eigs: Vec<EigRecord> = base.iter().map(|&(m, im)| eig(c(m, im.abs().max(0.1)), 1)).collect();
        let k = pick % eigs.len();
        let mut moved = eigs.clone();
        let z = eigs[k].value();
        moved[k] = eig(c(z.re * grow, z.im), 1);
        prop_assert!((delta_dist(moved[k].value()) - delta_dist(z)).abs() < 1e-12);
        let before = lieb_thirring_report(&eigs, &sigma, &params).unwrap().lhs;
        let after = lieb_thirring_report(&moved, &sigma, &params).unwrap().lhs;
        prop_assert!(after <= before * (1.0 + 1e-12));
    }
}
