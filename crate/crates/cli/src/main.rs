use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rydqr::beamsplitter::pipeline_bs;
use rydqr::io::{self, KeyValues, RunConfig};
use rydqr::oracle::{self, OracleRow};
use rydqr::physical::{blockade_radius, build_potential, characteristic_scales, dispersion_diagnostics};
use rydqr::scattering::{phase_diagram, Experiment};
use rydqr::solver::SplitStep;
use rydqr::wavepacket::{init_gaussian, GaussianParams, Wavepacket};
use rydqr::{DefectPotential64, Grid64};

#[derive(Parser)]
#[command(name = "rydqr", version, about = "Single-photon reflection from a Rydberg defect in an EIT medium")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0: all cores).
    #[arg(long, global = true, env = "RYDQR_THREADS", default_value_t = 0)]
    threads: usize,
    /// `key=value` override, applied after the config file. Repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the defect potential and print its scales.
    Potential,
    /// Evolve one packet (first `scattering.v0`, first `scattering.g0`) and export snapshots.
    Evolve,
    /// R, T, L over `scattering.v0` for every `scattering.g0`.
    Sweep,
    /// R, T, L over the `scattering.g0` × `scattering.v0` grid.
    PhaseDiagram,
    /// Beam-splitter matrix and photon statistics for the first (v0, g0).
    Beamsplitter,
    /// Cross-check the pipeline against the independent solvers.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut kv = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            KeyValues::parse(&text)?
        }
        None => KeyValues::default(),
    };
    for pair in &common.overrides {
        kv.set_pair(pair)?;
    }
    let mut cfg = RunConfig::from_key_values(kv)?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn shape(cfg: &RunConfig, grid: &Grid64) -> Result<DefectPotential64> {
    let scales = characteristic_scales(&cfg.physical)?;
    Ok(build_potential(&grid.points(), &cfg.physical, &scales)?)
}

fn first(values: &[f64], key: &str) -> Result<f64> {
    values.first().copied().with_context(|| format!("`{key}` must list at least one value"))
}

fn g0_options(cfg: &RunConfig) -> Vec<Option<f64>> {
    if cfg.g0.is_empty() {
        vec![None]
    } else {
        cfg.g0.iter().copied().map(Some).collect()
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = load_config(&cli.common)?;
    if cli.common.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.common.threads).build_global()?;
    }
    let dir = cfg.out_dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    match cli.command {
        Command::Potential => {
            let scales = characteristic_scales(&cfg.physical)?;
            let base = shape(&cfg, &cfg.grid)?;
            let (pot, factor) = match cfg.g0.first() {
                Some(&g0) => (rydqr::scattering::calibrate_depth(g0, &base)?, g0 / base.depth()),
                None => (base.clone(), 1.0),
            };
            let rb = blockade_radius(&cfg.physical)?;
            let disp = dispersion_diagnostics(&cfg.physical);
            println!("r_b = {:.6e} m ({:.4} R0)", rb, rb / cfg.physical.r0);
            println!("V0 = {:.6e} J, tau0 = {:.6e} s, m_p = {:.6e} kg", scales.v0, scales.tau0, scales.mp);
            println!("physical depth = {:.6e} V0, depth = {:.6e} V0, Im/Re at minimum = {:.6e}", base.depth(), pot.depth(), pot.im_ratio());
            println!(
                "dispersive regime: {} (|Omega_c|^2/(gamma21 gamma31) = {:.3e}, |Delta2|/gamma21 = {:.3e})",
                disp.satisfied, disp.coupling_ratio, disp.detuning_ratio
            );
            write(&dir, "potential.csv", &io::potential_csv(&pot))?;
            let meta = io::metadata_sidecar(
                &cfg,
                &[("calibration_factor", format!("{factor:?}")), ("physical_depth", format!("{:?}", base.depth()))],
            );
            write(&dir, "potential.meta", &meta)?;
        }
        Command::Evolve => {
            let v0 = first(&cfg.v0, "scattering.v0")?;
            let g0 = cfg.g0.first().copied();
            let exp = Experiment::new(cfg.run_params(), &shape(&cfg, &cfg.grid)?, g0)?;
            cfg.grid.check_nyquist(v0, exp.potential.depth())?;
            let (l_m, limited) = cfg.run_params().medium_length_for(v0, exp.potential.xi_g(), exp.splits);
            let psi0 = init_gaussian(&cfg.grid, &GaussianParams { v0, ..cfg.packet })?;
            let mut stepper = SplitStep::new(&cfg.grid, &exp.potential, &cfg.solver_options())?;
            let traj = stepper.evolve(&psi0, l_m, cfg.snapshot_every, cfg.summary_every)?;
            let fin = traj.final_state();
            let rtl = rydqr::scattering::compute_rtl(fin, &psi0, exp.splits.0, exp.splits.1)?;
            println!("L_m = {l_m:.6} (edge limited: {limited}), R = {:.6}, T = {:.6}, L = {:.6}", rtl.r, rtl.t, rtl.l);
            write(&dir, "snapshots.csv", &io::snapshots_csv(&traj))?;
            write(&dir, "summary.csv", &io::summary_csv(&traj))?;
            let meta = io::metadata_sidecar(
                &cfg,
                &[
                    ("calibration_factor", format!("{:?}", exp.calibration_factor)),
                    ("splits", format!("{:?},{:?}", exp.splits.0, exp.splits.1)),
                    ("L_m", format!("{l_m:?}")),
                ],
            );
            write(&dir, "evolve.meta", &meta)?;
        }
        Command::Sweep => {
            let base = shape(&cfg, &cfg.grid)?;
            let mut csv = String::new();
            let mut factors = Vec::new();
            for g0 in g0_options(&cfg) {
                let exp = Experiment::new(cfg.run_params(), &base, g0)?;
                let points = exp.sweep(&cfg.v0);
                let part = io::sweep_csv(&points, exp.splits);
                csv.push_str(if csv.is_empty() { &part } else { part.split_once('\n').map_or("", |p| p.1) });
                factors.push(format!("{:?}", exp.calibration_factor));
                for p in &points {
                    if let Err(e) = &p.outcome {
                        eprintln!("v0 = {}, g0 = {}: {e}", p.v0, p.g0);
                    }
                }
            }
            write(&dir, "sweep.csv", &csv)?;
            let meta = io::metadata_sidecar(&cfg, &[("calibration_factors", factors.join(","))]);
            write(&dir, "sweep.meta", &meta)?;
        }
        Command::PhaseDiagram => {
            if cfg.g0.is_empty() || cfg.v0.is_empty() {
                bail!("phase-diagram needs non-empty `scattering.v0` and `scattering.g0`");
            }
            let base = shape(&cfg, &cfg.grid)?;
            let pd = phase_diagram(&cfg.v0, &cfg.g0, &base, &cfg.run_params())?;
            let failed = pd.cells.iter().filter(|c| c.outcome.is_err()).count();
            if failed > 0 {
                eprintln!("{failed} of {} cells failed (NaN in output)", pd.cells.len());
            }
            write(&dir, "phase_diagram.csv", &io::phase_diagram_csv(&pd))?;
            write(&dir, "phase_diagram.meta", &io::metadata_sidecar(&cfg, &[("failed_cells", failed.to_string())]))?;
        }
        Command::Beamsplitter => {
            let v0 = first(&cfg.v0, "scattering.v0")?;
            let exp = Experiment::new(cfg.run_params(), &shape(&cfg, &cfg.grid)?, cfg.g0.first().copied())?;
            let bs = pipeline_bs(&exp, v0)?;
            let report = io::beamsplitter_report(&bs);
            print!("{report}");
            write(&dir, "beamsplitter.txt", &report)?;
            write(
                &dir,
                "beamsplitter.meta",
                &io::metadata_sidecar(&cfg, &[("calibration_factor", format!("{:?}", exp.calibration_factor))]),
            )?;
        }
        Command::Verify => return verify(&cfg, &dir),
    }
    Ok(true)
}

fn check(ok: bool, what: &str, detail: String) -> bool {
    println!("{} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn verify(cfg: &RunConfig, dir: &Path) -> Result<bool> {
    let mut ok = true;

    let mut worst = 0.0f64;
    for &(depth, width) in &[(10.0, 2.0), (40.0, 1.0), (5.0, 3.5)] {
        let pw = oracle::PiecewisePotential::square(-width / 2.0, width, -depth)?;
        for j in 1..=40 {
            let k = 0.1 * j as f64;
            let (_, t) = oracle::transfer_matrix_rt(k, &pw)?;
            worst = worst.max((t - oracle::square_well_transmission(k, depth, width)).abs());
        }
    }
    ok &= check(worst < 1e-10, "square-well transfer matrix vs closed form", format!("max |dT| = {worst:.3e}"));

    let grid = Grid64 { d_tau: 1e-3, ..cfg.grid };
    let params = GaussianParams { v0: 2.0, ..cfg.packet };
    let psi0 = init_gaussian(&grid, &params)?;
    let free = DefectPotential64::zero(grid.points(), 0.0)?;
    let mut stepper = SplitStep::new(&grid, &free, &Default::default())?;
    let mut psi: Wavepacket<f64> = psi0.clone();
    stepper.advance(&mut psi, 1.0)?;
    let obs = psi.observables();
    let w = params.width_param;
    let mean = params.xi0 + 2.0 * params.v0;
    let width = ((w * w + 16.0) / (4.0 * w)).sqrt();
    let (em, ew) = (((obs.mean_xi - mean) / mean).abs(), ((obs.width_xi - width) / width).abs());
    ok &= check(em < 1e-5 && ew < 1e-5, "free packet vs closed-form dispersion", format!("rel. mean {em:.3e}, rel. width {ew:.3e}"));

    let run = oracle::narrow_packet_params::<f64>();
    let base = shape(cfg, &run.grid)?;
    // Deep enough for visible reflection at the lowest velocity.
    let g0 = 20.0;
    let exp = Experiment::new(run, &base, Some(g0))?;
    let rows: Vec<OracleRow<f64>> = oracle::compare_with_transfer_matrix(&exp, &[0.5, 1.0, 2.0], 4000)?;
    let worst = rows.iter().map(|r| r.abs_err_r().max(r.abs_err_t())).fold(0.0, f64::max);
    ok &= check(worst < 2e-2, "narrow packet vs transfer matrix", format!("g0 = {g0}, max abs error {worst:.3e}"));
    write(dir, "oracle_report.csv", &io::oracle_report_csv(&rows))?;
    Ok(ok)
}
