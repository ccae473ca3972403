//! Run configuration files and CSV/text output.
//!
//! Configuration is flat `key = value` text with dotted section prefixes and
//! `#` comments. Physical quantities are SI; keys holding an angular rate
//! also accept the suffix `_hz_over_2pi`, in which case the value is an
//! ordinary frequency and is multiplied by 2π on input.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `physical.Gamma12`, `physical.Gamma23` | decay rates (rad/s) | 2π×16 MHz, 2π×16.7 kHz |
//! | `physical.Delta2`, `physical.Delta3` | detunings (rad/s) | −2π×160 MHz, 0 |
//! | `physical.OmegaC` | control half Rabi frequency (rad/s) | 2π×16 MHz |
//! | `physical.C6` | vdW coefficient (rad/s·m⁶) | 2π×81.6 GHz·μm⁶ |
//! | `physical.Na` | atomic density (m⁻³) | 3e16 |
//! | `physical.kappaDefect` | gate density, units of 1/r_b² | 1 |
//! | `physical.xg` | defect position (m) | 0 |
//! | `physical.lambdaP` | probe wavelength (m) | 461e-9 |
//! | `physical.R0` | beam size (m) | 6e-6 |
//! | `physical.gamma21`, `physical.gamma31` | coherence decay (rad/s) | Gamma12/2, Gamma23/2 |
//! | `physical.dipolePrefactor` | `𝒩_a|p21|²/(ε0ħ)` (rad/s) | derived |
//! | `physical.dipoleMoment` | `|p21|` (C·m) | from Gamma12 and lambdaP |
//! | `physical.poleEpsilon` | relative pole threshold | 1e-12 |
//! | `grid.xiMin`, `grid.xiMax`, `grid.n`, `grid.dTau` | discretization | −40, 40, 4096, 1e-4 |
//! | `packet.a0`, `packet.xi0`, `packet.widthParam` | Gaussian launch | 1, −8, 18 |
//! | `scattering.v0` | velocities: `a,b,c` or `start:stop:count` | 10 |
//! | `scattering.g0` | well depths (same syntax); empty keeps the physical depth | 10 |
//! | `scattering.splitThreshold` | ξ_l/ξ_r threshold relative to depth | 1e-3 |
//! | `scattering.Lm` | `auto`, `traversal` or a number | auto |
//! | `scattering.LmCap` | upper bound on L_m | 200 |
//! | `scattering.clearanceSigmas`, `scattering.edgeSigmas` | auto L_m margins | 4, 6 |
//! | `output.dir` | output directory | `out` |
//! | `output.snapshotEvery`, `output.summaryEvery` | evolve cadences in steps | 1000, 100 |
//! | `mode.keepImaginary`, `mode.measurement` | solver mode flags | false, true |
//! | `mode.absorbingWidth`, `mode.absorbingStrength` | exploratory mask (width 0: off) | 0, 0 |
//! | `mode.boundaryGuard` | edge/peak density abort level (0: off) | 1e-6 |

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::beamsplitter::BeamSplitterRun;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::oracle::OracleRow;
use crate::physical::PhysicalConfig;
use crate::potential::DefectPotential;
use crate::scattering::{MediumLength, PhaseDiagram, RunParams, SweepPoint};
use crate::solver::{AbsorbingMask, SolverOptions, Trajectory};
use crate::wavepacket::GaussianParams;

const ANGULAR_KEYS: &[&str] = &[
    "physical.Gamma12",
    "physical.Gamma23",
    "physical.Delta2",
    "physical.Delta3",
    "physical.OmegaC",
    "physical.C6",
    "physical.gamma21",
    "physical.gamma31",
    "physical.dipolePrefactor",
];

const KEYS: &[&str] = &[
    "physical.Gamma12",
    "physical.Gamma23",
    "physical.Delta2",
    "physical.Delta3",
    "physical.OmegaC",
    "physical.C6",
    "physical.Na",
    "physical.kappaDefect",
    "physical.xg",
    "physical.lambdaP",
    "physical.R0",
    "physical.gamma21",
    "physical.gamma31",
    "physical.dipolePrefactor",
    "physical.dipoleMoment",
    "physical.poleEpsilon",
    "grid.xiMin",
    "grid.xiMax",
    "grid.n",
    "grid.dTau",
    "packet.a0",
    "packet.xi0",
    "packet.widthParam",
    "scattering.v0",
    "scattering.g0",
    "scattering.splitThreshold",
    "scattering.Lm",
    "scattering.LmCap",
    "scattering.clearanceSigmas",
    "scattering.edgeSigmas",
    "output.dir",
    "output.snapshotEvery",
    "output.summaryEvery",
    "mode.keepImaginary",
    "mode.measurement",
    "mode.absorbingWidth",
    "mode.absorbingStrength",
    "mode.boundaryGuard",
];

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub physical: PhysicalConfig,
    pub grid: Grid<f64>,
    pub packet: GaussianParams<f64>,
    pub v0: Vec<f64>,
    /// Empty: use the depth that follows from the physical parameters.
    pub g0: Vec<f64>,
    pub split_threshold: f64,
    pub medium_length: MediumLength<f64>,
    pub medium_length_cap: f64,
    pub clearance_sigmas: f64,
    pub edge_sigmas: f64,
    pub out_dir: PathBuf,
    pub snapshot_every: usize,
    pub summary_every: usize,
    pub keep_imaginary: bool,
    pub measurement: bool,
    pub absorbing_width: f64,
    pub absorbing_strength: f64,
    pub boundary_guard: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let run = RunParams::<f64>::default();
        Self {
            physical: PhysicalConfig::reference(),
            grid: run.grid,
            packet: run.packet,
            v0: vec![10.0],
            g0: vec![10.0],
            split_threshold: run.split_threshold,
            medium_length: run.medium_length,
            medium_length_cap: run.medium_length_cap,
            clearance_sigmas: run.clearance_sigmas,
            edge_sigmas: run.edge_sigmas,
            out_dir: PathBuf::from("out"),
            snapshot_every: 1000,
            summary_every: 100,
            keep_imaginary: false,
            measurement: true,
            absorbing_width: 0.0,
            absorbing_strength: 0.0,
            boundary_guard: 1e-6,
        }
    }
}

/// Raw `key → value` pairs; later `set` calls override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1)))?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(Self(map))
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("override `{pair}` is not of the form key=value")))?;
        let key = k.trim().to_string();
        // An override replaces both spellings of an angular key.
        let base = key.strip_suffix("_hz_over_2pi").unwrap_or(&key).to_string();
        self.0.remove(&base);
        self.0.remove(&format!("{base}_hz_over_2pi"));
        self.0.insert(key, v.trim().to_string());
        Ok(())
    }

    fn take(&mut self, key: &str) -> Result<Option<(String, f64)>> {
        let plain = self.0.remove(key);
        let scaled_key = format!("{key}_hz_over_2pi");
        let scaled = self.0.remove(&scaled_key);
        match (plain, scaled) {
            (Some(_), Some(_)) => Err(Error::Parse(format!("both `{key}` and `{scaled_key}` given"))),
            (Some(v), None) => Ok(Some((v, 1.0))),
            (None, Some(v)) if ANGULAR_KEYS.contains(&key) => Ok(Some((v, TAU))),
            (None, Some(_)) => Err(Error::Parse(format!("`{key}` is not an angular rate; `{scaled_key}` not allowed"))),
            (None, None) => Ok(None),
        }
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key)? {
            None => Ok(None),
            Some((v, scale)) => parse_f64(key, &v).map(|x| Some(x * scale)),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        Ok(self.take(key)?.map(|(v, _)| v))
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| invalid(key, format!("`{v}` is not a number")))
}

fn invalid(key: &str, reason: String) -> Error {
    Error::InvalidConfig { field: key.to_string(), reason }
}

/// `a,b,c` or `start:stop:count` (inclusive linspace).
pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(invalid(key, format!("range `{v}` must be start:stop:count")));
        }
        let (a, b) = (parse_f64(key, parts[0])?, parse_f64(key, parts[1])?);
        let n: usize = parts[2].parse().map_err(|_| invalid(key, format!("bad count in `{v}`")))?;
        return Ok(match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|j| a + (b - a) * j as f64 / (n - 1) as f64).collect(),
        });
    }
    v.split(',').map(|s| parse_f64(key, s.trim())).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(invalid(key, format!("`{v}` is not a boolean"))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_key_values(KeyValues::parse(text)?)
    }

    pub fn from_key_values(mut kv: KeyValues) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let p = &mut cfg.physical;
        macro_rules! num {
            ($key:literal, $slot:expr) => {
                if let Some(v) = kv.number($key)? {
                    $slot = v;
                }
            };
        }
        num!("physical.Gamma12", p.gamma12);
        num!("physical.Gamma23", p.gamma23);
        num!("physical.Delta2", p.delta2);
        num!("physical.Delta3", p.delta3);
        num!("physical.OmegaC", p.omega_c);
        num!("physical.C6", p.c6);
        num!("physical.Na", p.na);
        num!("physical.kappaDefect", p.kappa_defect);
        num!("physical.xg", p.xg);
        num!("physical.lambdaP", p.lambda_p);
        num!("physical.R0", p.r0);
        num!("physical.poleEpsilon", p.pole_epsilon);
        p.gamma21 = kv.number("physical.gamma21")?.unwrap_or(p.gamma12 / 2.0);
        p.gamma31 = kv.number("physical.gamma31")?.unwrap_or(p.gamma23 / 2.0);
        p.dipole_prefactor = kv.number("physical.dipolePrefactor")?;
        p.dipole_moment = kv.number("physical.dipoleMoment")?;

        num!("grid.xiMin", cfg.grid.xi_min);
        num!("grid.xiMax", cfg.grid.xi_max);
        num!("grid.dTau", cfg.grid.d_tau);
        if let Some(n) = kv.string("grid.n")? {
            cfg.grid.n = n.parse().map_err(|_| invalid("grid.n", format!("`{n}` is not a count")))?;
        }
        num!("packet.a0", cfg.packet.a0);
        num!("packet.xi0", cfg.packet.xi0);
        num!("packet.widthParam", cfg.packet.width_param);

        if let Some(v) = kv.string("scattering.v0")? {
            cfg.v0 = parse_list("scattering.v0", &v)?;
        }
        if let Some(v) = kv.string("scattering.g0")? {
            cfg.g0 = parse_list("scattering.g0", &v)?;
        }
        num!("scattering.splitThreshold", cfg.split_threshold);
        if let Some(v) = kv.string("scattering.Lm")? {
            cfg.medium_length = match v.as_str() {
                "auto" => MediumLength::Auto,
                "traversal" => MediumLength::Traversal,
                other => MediumLength::Fixed(parse_f64("scattering.Lm", other)?),
            };
        }
        num!("scattering.LmCap", cfg.medium_length_cap);
        num!("scattering.clearanceSigmas", cfg.clearance_sigmas);
        num!("scattering.edgeSigmas", cfg.edge_sigmas);

        if let Some(v) = kv.string("output.dir")? {
            cfg.out_dir = PathBuf::from(v);
        }
        for (key, slot) in [("output.snapshotEvery", &mut cfg.snapshot_every), ("output.summaryEvery", &mut cfg.summary_every)] {
            if let Some(v) = kv.string(key)? {
                *slot = v.parse().map_err(|_| invalid(key, format!("`{v}` is not a count")))?;
            }
        }
        if let Some(v) = kv.string("mode.keepImaginary")? {
            cfg.keep_imaginary = parse_bool("mode.keepImaginary", &v)?;
        }
        if let Some(v) = kv.string("mode.measurement")? {
            cfg.measurement = parse_bool("mode.measurement", &v)?;
        }
        num!("mode.absorbingWidth", cfg.absorbing_width);
        num!("mode.absorbingStrength", cfg.absorbing_strength);
        num!("mode.boundaryGuard", cfg.boundary_guard);

        if let Some(key) = kv.0.keys().next() {
            return Err(Error::Parse(format!("unknown configuration key `{key}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.physical.validate().map_err(|e| prefix_field(e, "physical."))?;
        self.grid.validate()?;
        if !(self.packet.width_param > 0.0) {
            return Err(invalid("packet.widthParam", "must be > 0".into()));
        }
        if self.v0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("scattering.v0", "velocities must be finite".into()));
        }
        if self.g0.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(invalid("scattering.g0", "depths must be finite and >= 0".into()));
        }
        if !(self.split_threshold > 0.0 && self.split_threshold < 1.0) {
            return Err(invalid("scattering.splitThreshold", "must lie in (0, 1)".into()));
        }
        if !(self.medium_length_cap > 0.0) {
            return Err(invalid("scattering.LmCap", "must be > 0".into()));
        }
        if let MediumLength::Fixed(l) = self.medium_length {
            if !(l >= 0.0) {
                return Err(invalid("scattering.Lm", "must be >= 0".into()));
            }
        }
        if self.absorbing_width < 0.0 || self.absorbing_strength < 0.0 || self.boundary_guard < 0.0 {
            return Err(invalid("mode", "mask width/strength and boundary guard must be >= 0".into()));
        }
        self.solver_options().validate()
    }

    pub fn solver_options(&self) -> SolverOptions<f64> {
        SolverOptions {
            keep_imaginary: self.keep_imaginary,
            absorbing_mask: (self.absorbing_width > 0.0)
                .then_some(AbsorbingMask { width: self.absorbing_width, strength: self.absorbing_strength }),
            measurement: self.measurement,
            boundary_guard: (self.boundary_guard > 0.0).then_some(self.boundary_guard),
        }
    }

    pub fn run_params(&self) -> RunParams<f64> {
        RunParams {
            grid: self.grid,
            packet: self.packet,
            split_threshold: self.split_threshold,
            medium_length: self.medium_length,
            medium_length_cap: self.medium_length_cap,
            clearance_sigmas: self.clearance_sigmas,
            edge_sigmas: self.edge_sigmas,
            solver: self.solver_options(),
            ..RunParams::default()
        }
    }

    /// Every key with its resolved value, in a form [`RunConfig::parse`]
    /// reads back to an identical configuration.
    pub fn to_key_values(&self) -> String {
        let p = &self.physical;
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}"));
        let lm = match self.medium_length {
            MediumLength::Auto => "auto".to_string(),
            MediumLength::Traversal => "traversal".to_string(),
            MediumLength::Fixed(l) => format!("{l:?}"),
        };
        let entries: Vec<(&str, Option<String>)> = vec![
            ("physical.Gamma12", Some(format!("{:?}", p.gamma12))),
            ("physical.Gamma23", Some(format!("{:?}", p.gamma23))),
            ("physical.Delta2", Some(format!("{:?}", p.delta2))),
            ("physical.Delta3", Some(format!("{:?}", p.delta3))),
            ("physical.OmegaC", Some(format!("{:?}", p.omega_c))),
            ("physical.C6", Some(format!("{:?}", p.c6))),
            ("physical.Na", Some(format!("{:?}", p.na))),
            ("physical.kappaDefect", Some(format!("{:?}", p.kappa_defect))),
            ("physical.xg", Some(format!("{:?}", p.xg))),
            ("physical.lambdaP", Some(format!("{:?}", p.lambda_p))),
            ("physical.R0", Some(format!("{:?}", p.r0))),
            ("physical.gamma21", Some(format!("{:?}", p.gamma21))),
            ("physical.gamma31", Some(format!("{:?}", p.gamma31))),
            ("physical.dipolePrefactor", opt(p.dipole_prefactor)),
            ("physical.dipoleMoment", opt(p.dipole_moment)),
            ("physical.poleEpsilon", Some(format!("{:?}", p.pole_epsilon))),
            ("grid.xiMin", Some(format!("{:?}", self.grid.xi_min))),
            ("grid.xiMax", Some(format!("{:?}", self.grid.xi_max))),
            ("grid.n", Some(self.grid.n.to_string())),
            ("grid.dTau", Some(format!("{:?}", self.grid.d_tau))),
            ("packet.a0", Some(format!("{:?}", self.packet.a0))),
            ("packet.xi0", Some(format!("{:?}", self.packet.xi0))),
            ("packet.widthParam", Some(format!("{:?}", self.packet.width_param))),
            ("scattering.v0", Some(list(&self.v0))),
            ("scattering.g0", Some(list(&self.g0))),
            ("scattering.splitThreshold", Some(format!("{:?}", self.split_threshold))),
            ("scattering.Lm", Some(lm)),
            ("scattering.LmCap", Some(format!("{:?}", self.medium_length_cap))),
            ("scattering.clearanceSigmas", Some(format!("{:?}", self.clearance_sigmas))),
            ("scattering.edgeSigmas", Some(format!("{:?}", self.edge_sigmas))),
            ("output.dir", Some(self.out_dir.display().to_string())),
            ("output.snapshotEvery", Some(self.snapshot_every.to_string())),
            ("output.summaryEvery", Some(self.summary_every.to_string())),
            ("mode.keepImaginary", Some(self.keep_imaginary.to_string())),
            ("mode.measurement", Some(self.measurement.to_string())),
            ("mode.absorbingWidth", Some(format!("{:?}", self.absorbing_width))),
            ("mode.absorbingStrength", Some(format!("{:?}", self.absorbing_strength))),
            ("mode.boundaryGuard", Some(format!("{:?}", self.boundary_guard))),
        ];
        debug_assert_eq!(entries.len(), KEYS.len());
        let mut out = String::new();
        for (key, value) in entries {
            if let Some(v) = value {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }
}

fn prefix_field(e: Error, prefix: &str) -> Error {
    match e {
        Error::InvalidConfig { field, reason } => Error::InvalidConfig { field: format!("{prefix}{field}"), reason },
        other => other,
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}

pub fn potential_csv(potential: &DefectPotential<f64>) -> String {
    let mut out = String::from("xi,re_V,im_V\n");
    for (x, v) in potential.xi().iter().zip(potential.values()) {
        let _ = writeln!(out, "{},{},{}", fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im));
    }
    out
}

pub fn snapshots_csv(traj: &Trajectory<f64>) -> String {
    let mut out = String::from("tau,xi,re_phi,im_phi,density\n");
    for snap in &traj.snapshots {
        let tau = fmt_f64(snap.tau);
        for (j, a) in snap.amplitudes.iter().enumerate() {
            let _ = writeln!(
                out,
                "{tau},{},{},{},{}",
                fmt_f64(snap.grid.point(j)),
                fmt_f64(a.re),
                fmt_f64(a.im),
                fmt_f64(a.norm_sqr())
            );
        }
    }
    out
}

pub fn summary_csv(traj: &Trajectory<f64>) -> String {
    let mut out = String::from("tau,norm,mean_xi,width_xi,boundary_density\n");
    for (tau, o) in &traj.summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(*tau),
            fmt_f64(o.norm),
            fmt_f64(o.mean_xi),
            fmt_f64(o.width_xi),
            fmt_f64(o.boundary_density)
        );
    }
    out
}

pub fn sweep_csv(points: &[SweepPoint<f64>], splits: (f64, f64)) -> String {
    let mut out = String::from("v0,g0,R,T,L,budget,xi_l,xi_r,L_m,error\n");
    for p in points {
        let (r, t, l, budget, lm, err) = match &p.outcome {
            Ok(s) => (s.rtl.r, s.rtl.t, s.rtl.l, s.budget(), s.l_m, String::new()),
            Err(e) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, e.to_string()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(p.v0),
            fmt_f64(p.g0),
            fmt_f64(r),
            fmt_f64(t),
            fmt_f64(l),
            fmt_f64(budget),
            fmt_f64(splits.0),
            fmt_f64(splits.1),
            fmt_f64(lm),
            csv_escape(&err)
        );
    }
    out
}

pub fn phase_diagram_csv(pd: &PhaseDiagram<f64>) -> String {
    let mut out = String::from("g0,v0,R,T,L\n");
    for (i, g0) in pd.g0_axis.iter().enumerate() {
        for (j, v0) in pd.v0_axis.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(*g0),
                fmt_f64(*v0),
                fmt_f64(pd.r_matrix[i][j]),
                fmt_f64(pd.t_matrix[i][j]),
                fmt_f64(pd.l_matrix[i][j])
            );
        }
    }
    out
}

pub fn oracle_report_csv(rows: &[OracleRow<f64>]) -> String {
    let mut out = String::from("k_or_v0,R_dyn,T_dyn,R_tm,T_tm,abs_err_R,abs_err_T\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.k_or_v0),
            fmt_f64(r.r_dyn),
            fmt_f64(r.t_dyn),
            fmt_f64(r.r_tm),
            fmt_f64(r.t_tm),
            fmt_f64(r.abs_err_r()),
            fmt_f64(r.abs_err_t())
        );
    }
    out
}

pub fn beamsplitter_report(run: &BeamSplitterRun<f64>) -> String {
    let s = &run.scattering;
    let bs = &run.splitter;
    let mut out = String::new();
    let _ = writeln!(out, "v0 = {}", fmt_f64(s.v0));
    let _ = writeln!(out, "g0 = {}", fmt_f64(s.g0));
    let _ = writeln!(out, "R_raw = {}", fmt_f64(s.rtl.r));
    let _ = writeln!(out, "T_raw = {}", fmt_f64(s.rtl.t));
    let _ = writeln!(out, "L_raw = {}", fmt_f64(s.rtl.l));
    let _ = writeln!(out, "r = {}", fmt_f64(bs.r));
    let _ = writeln!(out, "t = {}", fmt_f64(bs.t));
    for (i, out_mode) in ["E2", "E3"].iter().enumerate() {
        for (j, in_mode) in ["E0", "E1"].iter().enumerate() {
            let e = bs.matrix[i][j];
            let _ = writeln!(out, "U[{out_mode},{in_mode}] = {} {}", fmt_f64(e.re), fmt_f64(e.im));
        }
    }
    let _ = writeln!(out, "unitarity_defect = {}", fmt_f64(bs.unitarity_defect()));
    let _ = writeln!(out, "p_reflect_port = {}", fmt_f64(run.stats.p_reflect_port));
    let _ = writeln!(out, "p_transmit_port = {}", fmt_f64(run.stats.p_transmit_port));
    let _ = writeln!(out, "p_coincidence = {}", fmt_f64(run.stats.p_coincidence));
    out
}

/// Sidecar text: the resolved configuration followed by `#` metadata lines.
pub fn metadata_sidecar(cfg: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut out = format!("# rydqr {}\n", env!("CARGO_PKG_VERSION"));
    out.push_str("# g0 is the well depth -min Re V in units of V0 (linear rescaling of the physical shape)\n");
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str(&cfg.to_key_values());
    out
}
