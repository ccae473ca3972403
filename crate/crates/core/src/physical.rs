//! Laboratory-frame EIT/Rydberg model.
//!
//! Converts detunings, decay rates, the control Rabi frequency and the van der
//! Waals coefficient into the complex probe susceptibility near a plane of
//! stored gate excitations, and from there into the dimensionless potential
//! seen by the probe photon. Everything here is SI and `f64`; angular
//! frequencies are in rad/s.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::potential::DefectPotential;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

const TWO_PI: f64 = 2.0 * PI;

/// All laboratory-frame parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalConfig {
    /// Spontaneous decay |2⟩→|1⟩.
    pub gamma12: f64,
    /// Spontaneous decay |3⟩→|2⟩.
    pub gamma23: f64,
    /// One-photon detuning; negative gives an attractive well.
    pub delta2: f64,
    /// Two-photon detuning.
    pub delta3: f64,
    /// Control half Rabi frequency.
    pub omega_c: f64,
    /// van der Waals coefficient (rad/s·m⁶).
    pub c6: f64,
    /// Atomic density (m⁻³).
    pub na: f64,
    /// Areal density of stored gate excitations in units of `1/r_b²`, with
    /// the π/2 of the planar vdW integral folded in.
    pub kappa_defect: f64,
    /// Defect plane position (m).
    pub xg: f64,
    /// Probe wavelength (m).
    pub lambda_p: f64,
    /// Transverse probe beam size (m).
    pub r0: f64,
    /// Coherence decay rates.
    pub gamma21: f64,
    pub gamma31: f64,
    /// Overrides `𝒩_a|p21|²/(ε0ħ)` (rad/s) when set.
    pub dipole_prefactor: Option<f64>,
    /// Probe dipole matrix element (C·m). When unset it follows from `gamma12`
    /// and `lambda_p` through the radiative-decay relation.
    pub dipole_moment: Option<f64>,
    /// Susceptibility denominators below `pole_epsilon·|Ω_c|²` are treated as
    /// resonant poles.
    pub pole_epsilon: f64,
}

impl PhysicalConfig {
    /// ⁸⁸Sr, n = n' = 60, with the given one-photon detuning (rad/s).
    pub fn sr88(delta2: f64) -> Self {
        let gamma12 = TWO_PI * 16.0e6;
        let gamma23 = TWO_PI * 16.7e3;
        Self {
            gamma12,
            gamma23,
            delta2,
            delta3: 0.0,
            omega_c: TWO_PI * 16.0e6,
            c6: TWO_PI * 81.6e9 * 1e-36,
            na: 3.0e16,
            kappa_defect: 1.0,
            xg: 0.0,
            lambda_p: 461.0e-9,
            r0: 6.0e-6,
            gamma21: gamma12 / 2.0,
            gamma31: gamma23 / 2.0,
            dipole_prefactor: None,
            dipole_moment: None,
            pole_epsilon: 1e-12,
        }
    }

    /// The reference configuration: Δ2 = −2π×160 MHz.
    pub fn reference() -> Self {
        Self::sr88(-TWO_PI * 160.0e6)
    }

    /// Field-level validation; error messages name the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("Gamma12", self.gamma12),
            ("Gamma23", self.gamma23),
            ("OmegaC", self.omega_c),
            ("Na", self.na),
            ("R0", self.r0),
            ("lambdaP", self.lambda_p),
            ("gamma21", self.gamma21),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be finite and > 0, got {value}")));
            }
        }
        // Zero is the ideal-EIT limit; the background then vanishes when Delta3 = 0.
        if !(self.gamma31.is_finite() && self.gamma31 >= 0.0) {
            return Err(invalid("gamma31", format!("must be finite and >= 0, got {}", self.gamma31)));
        }
        let finite = [
            ("Delta2", self.delta2),
            ("Delta3", self.delta3),
            ("C6", self.c6),
            ("kappaDefect", self.kappa_defect),
            ("xg", self.xg),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(invalid(field, format!("must be finite, got {value}")));
            }
        }
        if self.kappa_defect < 0.0 {
            return Err(invalid("kappaDefect", "must be >= 0".into()));
        }
        if let Some(p) = self.dipole_prefactor {
            if !p.is_finite() {
                return Err(invalid("dipolePrefactor", format!("must be finite, got {p}")));
            }
        }
        if let Some(d) = self.dipole_moment {
            if !(d.is_finite() && d > 0.0) {
                return Err(invalid("dipoleMoment", format!("must be finite and > 0, got {d}")));
            }
        }
        if !(self.pole_epsilon.is_finite() && self.pole_epsilon >= 0.0) {
            return Err(invalid("poleEpsilon", "must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// Probe angular frequency ω_p = 2πc/λ_p.
    pub fn omega_p(&self) -> f64 {
        TWO_PI * C_LIGHT / self.lambda_p
    }

    /// |p21| used when no explicit moment is configured:
    /// `|p|² = 3ε0ħλ³Γ12/(8π²)`.
    pub fn effective_dipole_moment(&self) -> f64 {
        self.dipole_moment.unwrap_or_else(|| {
            (3.0 * EPSILON_0 * HBAR * self.lambda_p.powi(3) * self.gamma12 / (8.0 * PI * PI)).sqrt()
        })
    }

    /// Susceptibility amplitude `𝒩_a|p21|²/(ε0ħ)` in rad/s.
    pub fn susceptibility_prefactor(&self) -> f64 {
        self.dipole_prefactor.unwrap_or_else(|| {
            let d = self.effective_dipole_moment();
            self.na * d * d / (EPSILON_0 * HBAR)
        })
    }
}

fn invalid(field: &str, reason: String) -> Error {
    Error::InvalidConfig { field: field.to_string(), reason }
}

/// `d_αβ = Δ_α − Δ_β + iγ_αβ` with Δ1 = 0.
pub fn complex_detuning(alpha: u8, beta: u8, cfg: &PhysicalConfig) -> Result<Complex64> {
    match (alpha, beta) {
        (2, 1) => Ok(Complex64::new(cfg.delta2, cfg.gamma21)),
        (3, 1) => Ok(Complex64::new(cfg.delta3, cfg.gamma31)),
        _ => Err(Error::UnsupportedLevels(alpha, beta)),
    }
}

/// `r_b = [|C6·d21| / (2|Ω_c|²)]^{1/6}`.
pub fn blockade_radius(cfg: &PhysicalConfig) -> Result<f64> {
    if cfg.omega_c == 0.0 {
        return Err(invalid("OmegaC", "blockade radius needs a nonzero control Rabi frequency".into()));
    }
    let d21 = complex_detuning(2, 1, cfg)?;
    Ok(((cfg.c6 * d21).norm() / (2.0 * cfg.omega_c * cfg.omega_c)).powf(1.0 / 6.0))
}

/// Detuning shift from the plane of gate excitations,
/// `Δ_d(x) = −κ·C6 / (r_b²·|x − x_g|⁴)`. Returns `−∞` at `x = x_g`.
pub fn defect_detuning(x: f64, cfg: &PhysicalConfig) -> Result<f64> {
    let rb = blockade_radius(cfg)?;
    Ok(defect_detuning_with(x - cfg.xg, rb, cfg))
}

fn defect_detuning_with(offset: f64, rb: f64, cfg: &PhysicalConfig) -> f64 {
    if cfg.kappa_defect == 0.0 {
        return 0.0;
    }
    let r2 = offset * offset;
    if r2 == 0.0 {
        return f64::NEG_INFINITY;
    }
    -cfg.kappa_defect * cfg.c6 / (rb * rb * r2 * r2)
}

/// Linear probe susceptibility at position `x`.
pub fn susceptibility(x: f64, cfg: &PhysicalConfig) -> Result<Complex64> {
    let delta_d = defect_detuning(x, cfg)?;
    susceptibility_for_shift(delta_d, x, cfg)
}

/// Susceptibility for a given defect shift `Δ_d`; `x` is only used to report
/// a resonant pole. An infinite shift gives the two-level limit `−P/d21`.
pub fn susceptibility_for_shift(delta_d: f64, x: f64, cfg: &PhysicalConfig) -> Result<Complex64> {
    let prefactor = cfg.susceptibility_prefactor();
    let d21 = complex_detuning(2, 1, cfg)?;
    let d31 = complex_detuning(3, 1, cfg)?;
    if delta_d.is_infinite() {
        return Ok(-prefactor / d21);
    }
    let numerator = d31 - delta_d;
    let omega2 = cfg.omega_c * cfg.omega_c;
    let denominator = omega2 - d21 * numerator;
    if denominator.norm() <= cfg.pole_epsilon * omega2 {
        return Err(Error::ResonantPole { x, denominator: denominator.norm() });
    }
    Ok(prefactor * numerator / denominator)
}

/// Characteristic scales of the dimensionless problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicScales {
    /// Effective photon mass (kg).
    pub mp: f64,
    /// Energy unit (J).
    pub v0: f64,
    /// Time unit (s).
    pub tau0: f64,
    /// Probe wavenumber (1/m).
    pub kp: f64,
    /// Blockade radius (m).
    pub rb: f64,
}

pub fn characteristic_scales(cfg: &PhysicalConfig) -> Result<CharacteristicScales> {
    if !(cfg.lambda_p > 0.0) {
        return Err(invalid("lambdaP", "must be > 0".into()));
    }
    if !(cfg.r0 > 0.0) {
        return Err(invalid("R0", "must be > 0".into()));
    }
    let kp = TWO_PI / cfg.lambda_p;
    let mp = HBAR * kp / C_LIGHT;
    let denom = 2.0 * mp * cfg.r0 * cfg.r0;
    Ok(CharacteristicScales {
        mp,
        v0: HBAR * HBAR / denom,
        tau0: HBAR / denom,
        kp,
        rb: blockade_radius(cfg)?,
    })
}

/// Dispersion-regime check: `|Ω_c|²/(γ21γ31)` and `|Δ2|/γ21` against
/// thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionReport {
    pub coupling_ratio: f64,
    pub detuning_ratio: f64,
    pub satisfied: bool,
}

pub fn dispersion_diagnostics(cfg: &PhysicalConfig) -> DispersionReport {
    dispersion_diagnostics_with(cfg, 10.0, 10.0)
}

pub fn dispersion_diagnostics_with(cfg: &PhysicalConfig, min_coupling: f64, min_detuning: f64) -> DispersionReport {
    let coupling_ratio = ratio(cfg.omega_c * cfg.omega_c, cfg.gamma21 * cfg.gamma31);
    let detuning_ratio = ratio(cfg.delta2.abs(), cfg.gamma21);
    DispersionReport {
        coupling_ratio,
        detuning_ratio,
        satisfied: coupling_ratio >= min_coupling && detuning_ratio >= min_detuning,
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Samples `Ṽ(ξ) = −(ħω_p/2)·χ(R0·ξ)/V0` on `xi`.
///
/// The distance to the defect plane is clamped below by the smallest grid
/// spacing so that `Δ_d` stays finite on grids that hit `ξ_g` exactly.
pub fn build_potential<T: Real>(
    xi: &[T],
    cfg: &PhysicalConfig,
    scales: &CharacteristicScales,
) -> Result<DefectPotential<T>> {
    cfg.validate()?;
    if xi.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("potential grid must be strictly increasing".into()));
    }
    let min_spacing = xi
        .windows(2)
        .map(|w| (w[1] - w[0]).as_f64())
        .fold(f64::INFINITY, f64::min);
    let clamp = if min_spacing.is_finite() { min_spacing * cfg.r0 } else { 0.0 };
    let energy_scale = HBAR * cfg.omega_p() / 2.0 / scales.v0;

    let values = xi
        .iter()
        .map(|&s| {
            let x = s.as_f64() * cfg.r0;
            let offset = x - cfg.xg;
            let offset = if offset.abs() < clamp { clamp } else { offset };
            let delta_d = defect_detuning_with(offset, scales.rb, cfg);
            let chi = susceptibility_for_shift(delta_d, x, cfg)?;
            let v = -energy_scale * chi;
            Ok(num_complex::Complex::new(T::lit(v.re), T::lit(v.im)))
        })
        .collect::<Result<Vec<_>>>()?;
    DefectPotential::new(xi.to_vec(), values, T::lit(cfg.xg / cfg.r0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mhz(f: f64) -> f64 {
        TWO_PI * f * 1e6
    }

    #[test]
    fn detuning_examples() {
        let cfg = PhysicalConfig::reference();
        let d21 = complex_detuning(2, 1, &cfg).unwrap();
        assert_eq!(d21, Complex64::new(-mhz(160.0), mhz(8.0)));
        let d31 = complex_detuning(3, 1, &cfg).unwrap();
        assert_relative_eq!(d31.re, 0.0);
        assert_relative_eq!(d31.im, TWO_PI * 8.35e3, max_relative = 1e-14);

        let mut zero = cfg.clone();
        zero.delta2 = 0.0;
        assert_eq!(complex_detuning(2, 1, &zero).unwrap(), Complex64::new(0.0, cfg.gamma21));
        assert_eq!(complex_detuning(3, 2, &cfg), Err(Error::UnsupportedLevels(3, 2)));
    }

    #[test]
    fn blockade_radius_reference() {
        let rb = blockade_radius(&PhysicalConfig::reference()).unwrap();
        assert!((rb * 1e6 - 5.4).abs() < 0.1, "rb = {} um", rb * 1e6);
    }

    #[test]
    fn blockade_radius_scaling_and_errors() {
        let cfg = PhysicalConfig::reference();
        let rb = blockade_radius(&cfg).unwrap();
        let mut big = cfg.clone();
        big.c6 *= 64.0;
        assert_relative_eq!(blockade_radius(&big).unwrap(), 2.0 * rb, max_relative = 1e-14);

        let mut prev = rb;
        for factor in [2.0, 4.0, 8.0, 16.0] {
            let mut strong = cfg.clone();
            strong.omega_c *= factor;
            let r = blockade_radius(&strong).unwrap();
            assert!(r < prev);
            prev = r;
        }

        let mut off = cfg;
        off.omega_c = 0.0;
        assert!(blockade_radius(&off).is_err());
    }

    #[test]
    fn defect_detuning_scaling() {
        let cfg = PhysicalConfig::reference();
        let rb = blockade_radius(&cfg).unwrap();
        let a = defect_detuning(cfg.xg + 2.0 * rb, &cfg).unwrap();
        let b = defect_detuning(cfg.xg + rb, &cfg).unwrap();
        assert_relative_eq!(b / a, 16.0, max_relative = 1e-13);
        // At one blockade radius the shift equals −C6/rb⁶ = −2|Ω_c|²/|d21|.
        let d21 = complex_detuning(2, 1, &cfg).unwrap().norm();
        assert_relative_eq!(b, -2.0 * cfg.omega_c * cfg.omega_c / d21, max_relative = 1e-12);
        assert!(defect_detuning(cfg.xg + 1.0, &cfg).unwrap().abs() < 1e-18 * b.abs());
        assert_eq!(defect_detuning(cfg.xg, &cfg).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn transparency_far_from_defect() {
        let mut cfg = PhysicalConfig::reference();
        cfg.gamma31 = 1e-300;
        let chi = susceptibility_for_shift(0.0, 1.0, &cfg).unwrap();
        assert!(chi.norm() < 1e-290);
    }

    #[test]
    fn attractive_and_repulsive_sign() {
        let cfg = PhysicalConfig::reference();
        let rb = blockade_radius(&cfg).unwrap();
        let attractive = susceptibility(0.5 * rb, &cfg).unwrap();
        let mut flipped = cfg.clone();
        flipped.delta2 = -cfg.delta2;
        let repulsive = susceptibility(0.5 * rb, &flipped).unwrap();
        assert!(attractive.re > 0.0);
        assert!(repulsive.re < 0.0);
    }

    #[test]
    fn resonant_pole_is_reported() {
        let mut cfg = PhysicalConfig::reference();
        cfg.gamma21 = 1e-30;
        cfg.gamma31 = 1e-30;
        cfg.delta2 = mhz(160.0);
        // Ω² − Δ2·(−Δ_d) = 0 at Δ_d = −Ω²/Δ2.
        let shift = -cfg.omega_c * cfg.omega_c / cfg.delta2;
        let err = susceptibility_for_shift(shift, 3.0e-6, &cfg).unwrap_err();
        assert!(matches!(err, Error::ResonantPole { x, .. } if x == 3.0e-6));
    }

    #[test]
    fn scales_identities() {
        let cfg = PhysicalConfig::reference();
        let s = characteristic_scales(&cfg).unwrap();
        assert_relative_eq!(s.v0 * 2.0 * s.mp * cfg.r0 * cfg.r0, HBAR * HBAR, max_relative = 1e-14);
        assert_relative_eq!(s.v0, HBAR / s.tau0, max_relative = 1e-14);
        let mut half = cfg.clone();
        half.lambda_p /= 2.0;
        let h = characteristic_scales(&half).unwrap();
        assert_relative_eq!(h.mp, 2.0 * s.mp, max_relative = 1e-14);
        let mut bad = cfg;
        bad.r0 = 0.0;
        assert!(characteristic_scales(&bad).is_err());
    }

    #[test]
    fn energy_unit_band() {
        for lambda in [420e-9, 461e-9, 550e-9, 700e-9] {
            let mut cfg = PhysicalConfig::reference();
            cfg.lambda_p = lambda;
            let v0 = characteristic_scales(&cfg).unwrap().v0;
            assert!(v0 > 5.5e-23 / 2.0 && v0 < 5.5e-23 * 2.0, "lambda {lambda}: V0 = {v0:e}");
        }
    }

    #[test]
    fn dispersion_regime() {
        let cfg = PhysicalConfig::reference();
        let d = dispersion_diagnostics(&cfg);
        // (16 MHz)² / (8 MHz · 8.35 kHz) and 160/8.
        assert_relative_eq!(d.coupling_ratio, 256.0e12 / (8.0e6 * 8.35e3), max_relative = 1e-12);
        assert_relative_eq!(d.detuning_ratio, 20.0, max_relative = 1e-12);
        assert!(d.satisfied);

        let mut lossless = cfg.clone();
        lossless.gamma21 = 0.0;
        lossless.gamma31 = 0.0;
        let d = dispersion_diagnostics(&lossless);
        assert!(d.coupling_ratio.is_infinite() && d.detuning_ratio.is_infinite() && d.satisfied);

        let mut boundary = cfg;
        boundary.omega_c = (boundary.gamma21 * boundary.gamma31).sqrt();
        let d = dispersion_diagnostics(&boundary);
        assert_relative_eq!(d.coupling_ratio, 1.0, max_relative = 1e-12);
        assert!(!d.satisfied);
    }

    #[test]
    fn validation_names_field() {
        let mut cfg = PhysicalConfig::reference();
        cfg.na = -1.0;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("`Na`"), "{err}");
    }
}
