use rydqr::oracle::{discretize_potential, transfer_matrix_rt};
use rydqr::physical::{build_potential, characteristic_scales, PhysicalConfig};
use rydqr::scattering::{
    calibrate_depth, compute_rtl, default_splits, phase_diagram, sweep_velocity, Experiment, MediumLength,
};
use rydqr::solver::{SolverOptions, SplitStep};
use rydqr::wavepacket::{init_gaussian, GaussianParams};
use rydqr::{DefectPotential64, Error, Grid64, RunParams64};

fn shape(grid: &Grid64) -> DefectPotential64 {
    let cfg = PhysicalConfig::reference();
    build_potential(&grid.points(), &cfg, &characteristic_scales(&cfg).unwrap()).unwrap()
}

#[test]
fn free_propagation_transmits() {
    let run = RunParams64 { medium_length: MediumLength::Fixed(4.0), ..RunParams64::default() };
    let zero_well = calibrate_depth(0.0, &shape(&run.grid)).unwrap();
    assert_eq!(zero_well.depth(), 0.0);
    let psi0 = init_gaussian(&run.grid, &GaussianParams::reference(4.0)).unwrap();
    let mut s = SplitStep::new(&run.grid, &zero_well, &SolverOptions::default()).unwrap();
    let mut psi = psi0.clone();
    s.advance(&mut psi, 4.0).unwrap();
    let rtl = compute_rtl(&psi, &psi0, -6.0, 6.0).unwrap();
    assert!(rtl.r < 1e-6 && rtl.l < 1e-6 && (rtl.t - 1.0).abs() < 1e-6, "{rtl:?}");
}

#[test]
fn amplitude_does_not_matter() {
    let run = RunParams64 { grid: Grid64 { d_tau: 1e-3, ..Grid64::default() }, ..RunParams64::default() };
    let base = shape(&run.grid);
    let a = Experiment::new(run, &base, Some(10.0)).unwrap().measure(1.2).unwrap();
    let scaled = RunParams64 { packet: GaussianParams { a0: 3.7, ..run.packet }, ..run };
    let b = Experiment::new(scaled, &base, Some(10.0)).unwrap().measure(1.2).unwrap();
    for (x, y) in [(a.r(), b.r()), (a.t(), b.t()), (a.l(), b.l())] {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn grid_refinement_is_stable() {
    let coarse = RunParams64::default();
    let fine = RunParams64 {
        grid: Grid64 { xi_min: -40.0, xi_max: 40.0, n: 8192, d_tau: 5e-5 },
        ..RunParams64::default()
    };
    let a = Experiment::new(coarse, &shape(&coarse.grid), Some(10.0)).unwrap();
    let b = Experiment::new(fine, &shape(&fine.grid), Some(10.0)).unwrap();
    for v0 in [6.0, 10.0, 14.0] {
        let (x, y) = (a.measure(v0).unwrap(), b.measure(v0).unwrap());
        for (p, q) in [(x.r(), y.r()), (x.t(), y.t()), (x.l(), y.l())] {
            assert!((p - q).abs() < 1e-3, "v0 {v0}: {x:?} vs {y:?}");
        }
    }
}

#[test]
fn splits_are_symmetric_and_monotone() {
    let grid = Grid64::default();
    let base = shape(&grid);
    let (l, r) = default_splits(&base, 1e-3).unwrap();
    assert!((l + r).abs() <= grid.dxi() * (1.0 + 1e-9), "{l} {r}");
    let (l2, r2) = default_splits(&base, 1e-4).unwrap();
    assert!(l2 < l && r2 > r);
    assert!(matches!(default_splits(&base, 1e-12), Err(Error::SplitThresholdNotMet { .. })));
}

#[test]
fn calibration_is_exact() {
    let base = shape(&Grid64::default());
    let same = calibrate_depth(base.depth(), &base).unwrap();
    assert_eq!(same.values(), base.values());
    let ten = calibrate_depth(10.0, &base).unwrap();
    assert_eq!(ten.real_values().iter().cloned().fold(f64::INFINITY, f64::min), -10.0);
    let flat = DefectPotential64::zero(base.xi().to_vec(), 0.0).unwrap();
    assert_eq!(calibrate_depth(1.0, &flat).unwrap_err(), Error::ZeroDepth);
}

#[test]
fn sweep_keeps_order_and_failures() {
    let run = RunParams64 { grid: Grid64 { d_tau: 1e-3, ..Grid64::default() }, ..RunParams64::default() };
    let v0s = [14.0, 200.0, 6.0];
    let points = sweep_velocity(&run, &shape(&run.grid), Some(10.0), &v0s).unwrap();
    assert_eq!(points.iter().map(|p| p.v0).collect::<Vec<_>>(), v0s);
    assert!(matches!(points[1].outcome, Err(Error::Nyquist { .. })));
    let t = points[0].outcome.as_ref().unwrap().t();
    assert!(t > 0.99);
    for p in [&points[0], &points[2]] {
        let s = p.outcome.as_ref().unwrap();
        assert!((s.budget() - 1.0).abs() < 1e-3);
    }
}

#[test]
fn zero_depth_row_is_transparent() {
    let run = RunParams64 { grid: Grid64 { d_tau: 1e-3, ..Grid64::default() }, ..RunParams64::default() };
    let pd = phase_diagram(&[6.0, 12.0], &[0.0, 5.0], &shape(&run.grid), &run).unwrap();
    assert_eq!((pd.r_matrix.len(), pd.r_matrix[0].len()), (2, 2));
    for j in 0..2 {
        assert!(pd.r_matrix[0][j] < 1e-9 && pd.t_matrix[0][j] > 0.9999, "{:?}", pd.t_matrix);
    }
}

/// Dynamic R for a Gaussian barrier against the stationary R(k0) as the
/// packet narrows in momentum.
#[test]
fn narrowing_packet_converges_to_stationary() {
    let grid = Grid64 { xi_min: -320.0, xi_max: 320.0, n: 32768, d_tau: 1e-3 };
    let barrier = DefectPotential64::from_fn(grid.points(), 0.0, |x| 20.0 * (-x * x).exp()).unwrap();
    let k0 = 4.3;
    let (r_tm, _) = transfer_matrix_rt(k0, &discretize_potential(&barrier, 2048).unwrap()).unwrap();
    let mut errors = Vec::new();
    for w in [50.0f64, 200.0, 800.0] {
        let sigma = w.sqrt() / 2.0;
        let xi0 = -(8.0 + 6.0 * sigma);
        let params = GaussianParams { a0: 1.0, xi0, width_param: w, v0: k0 };
        let psi0 = init_gaussian(&grid, &params).unwrap();
        // Long enough for both lobes to clear the barrier region by 6σ.
        let tau = (2.0 * (6.0 * sigma + 8.0) + 6.0) / (2.0 * k0);
        let mut s = SplitStep::new(&grid, &barrier, &SolverOptions::default()).unwrap();
        let mut psi = psi0.clone();
        s.advance(&mut psi, tau).unwrap();
        let rtl = compute_rtl(&psi, &psi0, -6.0, 6.0).unwrap();
        assert!(rtl.l < 1e-4, "w {w}: {rtl:?}");
        errors.push((rtl.r - r_tm).abs());
    }
    assert!(errors[0] / errors[1] >= 2.0 && errors[1] / errors[2] >= 2.0, "R(k0) = {r_tm}, errors {errors:?}");
}
