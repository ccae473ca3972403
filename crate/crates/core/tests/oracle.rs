use proptest::prelude::*;

use rydqr::oracle::{discretize_potential, reference_evolve, square_well_transmission, transfer_matrix_rt};
use rydqr::physical::{build_potential, characteristic_scales, PhysicalConfig};
use rydqr::scattering::calibrate_depth;
use rydqr::solver::{SolverOptions, SplitStep};
use rydqr::wavepacket::{init_gaussian, GaussianParams};
use rydqr::{DefectPotential64, Grid64, PiecewisePotential64};

fn reference_shape(grid: &Grid64) -> DefectPotential64 {
    let cfg = PhysicalConfig::reference();
    let scales = characteristic_scales(&cfg).unwrap();
    build_potential(&grid.points(), &cfg, &scales).unwrap()
}

#[test]
fn square_well_matches_closed_form() {
    for &(depth, width) in &[(10.0, 2.0), (40.0, 1.0), (3.0, 5.0), (0.5, 0.2)] {
        let pw = PiecewisePotential64::square(-0.5 * width, width, -depth).unwrap();
        for j in 1..=200 {
            let k = 0.025 * j as f64;
            let (r, t) = transfer_matrix_rt(k, &pw).unwrap();
            let exact = square_well_transmission(k, depth, width);
            assert!((t - exact).abs() < 1e-10, "depth {depth} width {width} k {k}: {t} vs {exact}");
            assert!((r - (1.0 - exact)).abs() < 1e-10);
        }
    }
}

#[test]
fn square_well_resonances() {
    // T = 1 where q·a = nπ, q² = k² + depth.
    let (depth, width) = (25.0, 2.0);
    let pw = PiecewisePotential64::square(0.0, width, -depth).unwrap();
    let mut found = 0;
    for n in 1..12 {
        let q = n as f64 * std::f64::consts::PI / width;
        let k2 = q * q - depth;
        if k2 <= 0.0 {
            continue;
        }
        let (r, t) = transfer_matrix_rt(k2.sqrt(), &pw).unwrap();
        assert!((t - 1.0).abs() < 1e-8 && r < 1e-8, "n {n}: T {t}");
        found += 1;
    }
    assert!(found >= 5);
}

#[test]
fn discretization_refinement_converges() {
    let grid = Grid64::default();
    let pot = calibrate_depth(10.0, &reference_shape(&grid)).unwrap();
    let k = 0.5;
    let rs: Vec<f64> = [64, 128, 256, 512, 1024, 2048]
        .iter()
        .map(|&s| transfer_matrix_rt(k, &discretize_potential(&pot, s).unwrap()).unwrap().0)
        .collect();
    let diffs: Vec<f64> = rs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for d in diffs.windows(2) {
        assert!(d[1] < d[0], "refinement differences not decreasing: {diffs:?}");
    }
}

#[test]
fn discretization_symmetry_and_constant() {
    let grid = Grid64::default();
    let pot = DefectPotential64::from_fn(grid.points(), 0.0, |x| -3.0 / (1.0 + x.powi(4))).unwrap();
    let pw = discretize_potential(&pot, 128).unwrap();
    let v = pw.values();
    for j in 0..v.len() {
        assert!((v[j] - v[v.len() - 1 - j]).abs() <= 1e-12 * v[j].abs());
    }
    let flat = DefectPotential64::from_fn(grid.points(), 0.0, |x| if x.abs() < 5.0 { -2.0 } else { 0.0 }).unwrap();
    let pw = discretize_potential(&flat, 64).unwrap();
    assert!(pw.values().iter().filter(|v| **v != 0.0).all(|v| *v == -2.0));
}

#[test]
fn reference_integrator_matches_split_step() {
    let grid = Grid64 { d_tau: 2.5e-4, ..Grid64::default() };
    let pot = calibrate_depth(10.0, &reference_shape(&grid)).unwrap();
    let psi0 = init_gaussian(&grid, &GaussianParams::reference(10.0)).unwrap();
    let tau = 1.0;
    let mut stepper = SplitStep::new(&grid, &pot, &SolverOptions::default()).unwrap();
    let mut split = psi0.clone();
    stepper.advance(&mut split, tau).unwrap();
    let reference = reference_evolve(&psi0, &pot, tau).unwrap();
    let err = split.relative_l2(&reference);
    assert!(err < 1e-4, "relative L2 {err:.3e}");
    assert!((reference.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn reference_integrator_free_dispersion() {
    let grid = Grid64 { d_tau: 1e-3, ..Grid64::default() };
    let pot = DefectPotential64::zero(grid.points(), 0.0).unwrap();
    let params = GaussianParams::reference(2.0);
    let psi = reference_evolve(&init_gaussian(&grid, &params).unwrap(), &pot, 1.0).unwrap();
    let w = params.width_param;
    let width = (w / 4.0 + 4.0 / w).sqrt();
    let obs = psi.observables();
    assert!(((obs.width_xi - width) / width).abs() < 1e-5, "width {} vs {width}", obs.width_xi);
}

fn random_piecewise() -> impl Strategy<Value = PiecewisePotential64> {
    prop::collection::vec((0.05f64..2.0, -30.0f64..30.0), 1..8).prop_map(|segs| {
        let mut breaks = vec![-3.0];
        let mut values = Vec::new();
        for (w, v) in segs {
            breaks.push(breaks.last().unwrap() + w);
            values.push(v);
        }
        PiecewisePotential64::new(breaks, values).unwrap()
    })
}

proptest! {
    #[test]
    fn flux_conservation(pw in random_piecewise(), k in 0.05f64..8.0) {
        let (r, t) = transfer_matrix_rt(k, &pw).unwrap();
        prop_assert!((r + t - 1.0).abs() < 1e-12, "R + T = {}", r + t);
        prop_assert!(r >= -1e-14 && t >= -1e-14);
    }

    #[test]
    fn reciprocity(pw in random_piecewise(), k in 0.05f64..8.0) {
        let (_, t_left) = transfer_matrix_rt(k, &pw).unwrap();
        let (_, t_right) = transfer_matrix_rt(k, &pw.reversed()).unwrap();
        prop_assert!((t_left - t_right).abs() < 1e-12);
    }

    #[test]
    fn square_well_closed_form_everywhere(depth in 0.01f64..50.0, width in 0.05f64..6.0, k in 0.02f64..8.0) {
        let pw = PiecewisePotential64::square(1.0, width, -depth).unwrap();
        let (_, t) = transfer_matrix_rt(k, &pw).unwrap();
        prop_assert!((t - square_well_transmission(k, depth, width)).abs() < 1e-10);
    }
}
