use proptest::prelude::*;

use rydqr::beamsplitter::{bs_from_rt, pipeline_bs, single_photon_stats, MAX_TRAPPING};
use rydqr::physical::{build_potential, characteristic_scales, PhysicalConfig};
use rydqr::scattering::Experiment;
use rydqr::{Error, RunParams64};

proptest! {
    #[test]
    fn unitary_for_any_split(r in 0.0f64..=1.0) {
        let bs = bs_from_rt(r, 1.0 - r).unwrap();
        prop_assert!(bs.unitarity_defect() < 1e-12);
        let s = single_photon_stats(&bs);
        prop_assert_eq!(s.p_coincidence, 0.0);
        prop_assert!((s.p_reflect_port - r).abs() < 1e-12);
        prop_assert!((s.p_reflect_port + s.p_transmit_port - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_outside_tolerance_rejected(r in 0.0f64..0.5, gap in 2e-3f64..0.4) {
        prop_assert!(
            matches!(bs_from_rt(r, 1.0 - r - gap), Err(Error::BudgetViolation { .. })),
            "expected a budget violation"
        );
    }
}

#[test]
fn pipeline_builds_lossless_splitter() {
    let cfg = PhysicalConfig::reference();
    let run = RunParams64::default();
    let shape = build_potential(&run.grid.points(), &cfg, &characteristic_scales(&cfg).unwrap()).unwrap();
    let exp = Experiment::new(run, &shape, Some(10.0)).unwrap();
    let out = pipeline_bs(&exp, 10.0).unwrap();
    assert!(out.scattering.l() <= MAX_TRAPPING);
    assert!((out.splitter.r + out.splitter.t - 1.0).abs() < 1e-15);
    assert!(out.splitter.unitarity_defect() < 1e-12);
    assert_eq!(out.stats.p_coincidence, 0.0);
}
