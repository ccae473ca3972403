use rydqr::oracle::transfer_matrix_rt;
use rydqr::scattering::compute_rtl;
use rydqr::solver::{SolverOptions, SplitStep};
use rydqr::wavepacket::{init_gaussian, GaussianParams};
use rydqr::{DefectPotential32, Grid32};

#[test]
fn f32_pipeline_runs() {
    let grid = Grid32 { n: 2048, d_tau: 1e-3, ..Grid32::default() };
    let well = DefectPotential32::from_fn(grid.points(), 0.0, |x| -10.0 / (1.0 + x.powi(4))).unwrap();
    let psi0 = init_gaussian(&grid, &GaussianParams::reference(6.0f32)).unwrap();
    let mut s = SplitStep::new(&grid, &well, &SolverOptions::default()).unwrap();
    let mut psi = psi0.clone();
    s.advance(&mut psi, 2.0).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-3, "norm {}", psi.norm());
    let rtl = compute_rtl(&psi, &psi0, -6.0, 6.0).unwrap();
    assert!(rtl.t > 0.99 && (rtl.budget() - 1.0).abs() < 1e-3, "{rtl:?}");

    let pw = rydqr::oracle::PiecewisePotential::square(-1.0f32, 2.0, -10.0).unwrap();
    let (r, t) = transfer_matrix_rt(3.0f32, &pw).unwrap();
    let exact = rydqr::oracle::square_well_transmission(3.0, 10.0, 2.0) as f32;
    assert!((t - exact).abs() < 1e-4 && (r + t - 1.0).abs() < 1e-5);
}
