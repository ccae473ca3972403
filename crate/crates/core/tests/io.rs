use rydqr::io::{fmt_f64, phase_diagram_csv, potential_csv, sweep_csv, KeyValues, RunConfig};
use rydqr::scattering::{phase_diagram, sweep_velocity};
use rydqr::physical::{build_potential, characteristic_scales};
use rydqr::{DefectPotential64, Grid64};

const SAMPLE: &str = "
# reference run
physical.Delta2_hz_over_2pi = -160e6
physical.gamma21_hz_over_2pi = 8e6
grid.n = 1024
grid.dTau = 1e-3
scattering.v0 = 4, 12
scattering.g0 = 0:10:2
scattering.Lm = traversal
output.dir = results
";

#[test]
fn sidecar_round_trips() {
    let cfg = RunConfig::parse(SAMPLE).unwrap();
    assert_eq!(cfg.g0, vec![0.0, 10.0]);
    assert_eq!(cfg.grid.n, 1024);
    let text = rydqr::io::metadata_sidecar(&cfg, &[("calibration_factor", "1".into())]);
    let again = RunConfig::parse(&text).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_key_values(), cfg.to_key_values());
}

#[test]
fn overrides_apply_after_file() {
    let mut kv = KeyValues::parse(SAMPLE).unwrap();
    kv.set_pair("grid.n=2048").unwrap();
    kv.set_pair("physical.Delta2=-1e9").unwrap();
    let cfg = RunConfig::from_key_values(kv).unwrap();
    assert_eq!(cfg.grid.n, 2048);
    assert_eq!(cfg.physical.delta2, -1e9);
}

#[test]
fn field_level_errors() {
    let cases = [
        ("physical.Na = -1", "physical.Na"),
        ("physical.R0 = 0", "physical.R0"),
        ("packet.widthParam = 0", "packet.widthParam"),
        ("scattering.v0 = 1,x", "scattering.v0"),
        ("mode.measurement = maybe", "mode.measurement"),
        ("bogus.key = 1", "bogus.key"),
    ];
    for (text, field) in cases {
        let err = RunConfig::parse(text).unwrap_err().to_string();
        assert!(err.contains(field), "`{text}` gave `{err}`");
    }
}

#[test]
fn csv_layouts() {
    let grid = Grid64 { n: 256, ..Grid64::default() };
    let pot = DefectPotential64::from_fn(grid.points(), 0.0, |x| -1.0 / (1.0 + x * x)).unwrap();
    let csv = potential_csv(&pot);
    assert!(csv.starts_with("xi,re_V,im_V\n"));
    assert_eq!(csv.lines().count(), 257);
    assert!(!csv.contains('\r'));
    let first = csv.lines().nth(1).unwrap();
    assert_eq!(first.split(',').next().unwrap(), fmt_f64(-40.0));
    for field in first.split(',') {
        let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.len(), 18, "{field}");
    }
}

#[test]
fn sweep_and_phase_csv_are_deterministic() {
    let cfg = RunConfig::parse(SAMPLE).unwrap();
    let run = cfg.run_params();
    let shape = build_potential(&cfg.grid.points(), &cfg.physical, &characteristic_scales(&cfg.physical).unwrap()).unwrap();
    let a = sweep_velocity(&run, &shape, Some(5.0), &[6.0, 500.0]).unwrap();
    let b = sweep_velocity(&run, &shape, Some(5.0), &[6.0, 500.0]).unwrap();
    let (ca, cb) = (sweep_csv(&a, (-6.0, 6.0)), sweep_csv(&b, (-6.0, 6.0)));
    assert_eq!(ca, cb);
    let mut lines = ca.lines();
    assert_eq!(lines.next().unwrap(), "v0,g0,R,T,L,budget,xi_l,xi_r,L_m,error");
    assert!(lines.next().unwrap().ends_with(','));
    let failed = lines.next().unwrap();
    assert!(failed.contains("NaN") && failed.split(',').count() >= 10, "{failed}");

    let pd = phase_diagram(&[3.0, 6.0], &cfg.g0, &shape, &run).unwrap();
    let csv = phase_diagram_csv(&pd);
    assert_eq!(csv.lines().next().unwrap(), "g0,v0,R,T,L");
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(csv, phase_diagram_csv(&phase_diagram(&[3.0, 6.0], &cfg.g0, &shape, &run).unwrap()));
}
