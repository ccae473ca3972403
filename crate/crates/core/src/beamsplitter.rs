//! The defect as a lossless two-port beam splitter.
//!
//! Input modes are the vacant port `Ê0` and the incident probe `Ê1`; output
//! modes are the reflected `Ê2` and transmitted `Ê3` fields:
//!
//! ```text
//! Ê2 = −i√T Ê0 + √R Ê1
//! Ê3 =  i√R Ê0 + √T Ê1
//! ```

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::scattering::{Experiment, ScatteringResult};

/// Output rows `(Ê2, Ê3)`, input columns `(Ê0, Ê1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitter<T> {
    pub r: T,
    pub t: T,
    pub matrix: [[Complex<T>; 2]; 2],
}

/// Detector statistics for one photon in `Ê1` and vacuum in `Ê0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonStats<T> {
    pub p_reflect_port: T,
    pub p_transmit_port: T,
    pub p_coincidence: T,
}

const BUDGET_TOLERANCE: f64 = 1e-3;

pub fn bs_from_rt<T: Real>(r: T, t: T) -> Result<BeamSplitter<T>> {
    let unit = |v: T| v >= T::zero() && v <= T::one();
    if !unit(r) || !unit(t) {
        return Err(Error::InvalidConfig {
            field: "r/t".into(),
            reason: format!("probabilities must lie in [0, 1], got r = {r}, t = {t}"),
        });
    }
    let sum = r + t;
    if (sum - T::one()).abs() >= T::lit(BUDGET_TOLERANCE) {
        return Err(Error::BudgetViolation { sum: sum.as_f64() });
    }
    let (r, t) = (r / sum, t / sum);
    let (sr, st) = (r.sqrt(), t.sqrt());
    let zero = T::zero();
    let matrix = [
        [Complex::new(zero, -st), Complex::new(sr, zero)],
        [Complex::new(zero, sr), Complex::new(st, zero)],
    ];
    Ok(BeamSplitter { r, t, matrix })
}

impl<T: Real> BeamSplitter<T> {
    /// Frobenius norm of `U·U† − I`.
    pub fn unitarity_defect(&self) -> T {
        let u = &self.matrix;
        let mut acc = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut e = u[i][0] * u[j][0].conj() + u[i][1] * u[j][1].conj();
                if i == j {
                    e = e - T::one();
                }
                acc = acc + e.norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Propagates `â1†|0⟩` through the splitter and reads off the two-mode Fock
/// amplitudes. With `â_in = U†b̂_out`, `â1† = Σ_j U[j][1] b̂_j†`, so the output
/// has exactly one photon: amplitude `U[0][1]` in `|1,0⟩`, `U[1][1]` in `|0,1⟩`
/// and nothing in `|1,1⟩`.
pub fn single_photon_stats<T: Real>(bs: &BeamSplitter<T>) -> PhotonStats<T> {
    // Fock amplitudes indexed by (n2, n3) for n2, n3 ∈ {0, 1}.
    let mut amp = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    amp[1][0] = bs.matrix[0][1];
    amp[0][1] = bs.matrix[1][1];
    PhotonStats {
        p_reflect_port: amp[1][0].norm_sqr() + amp[1][1].norm_sqr(),
        p_transmit_port: amp[0][1].norm_sqr() + amp[1][1].norm_sqr(),
        p_coincidence: amp[1][1].norm_sqr(),
    }
}

/// Beam splitter extracted from a scattering run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitterRun<T> {
    pub scattering: ScatteringResult<T>,
    pub splitter: BeamSplitter<T>,
    pub stats: PhotonStats<T>,
}

/// Maximum trapping fraction for which the lossless splitter picture holds.
pub const MAX_TRAPPING: f64 = 0.05;

/// Runs the scattering pipeline at `v0`, discards `L` by renormalizing
/// `(R, T)` and builds the splitter.
pub fn pipeline_bs<T: Real>(experiment: &Experiment<T>, v0: T) -> Result<BeamSplitterRun<T>> {
    let scattering = experiment.measure(v0)?;
    let rtl = scattering.rtl;
    if rtl.l > T::lit(MAX_TRAPPING) {
        return Err(Error::TrappingDominated { l: rtl.l.as_f64() });
    }
    let sum = rtl.r + rtl.t;
    let splitter = bs_from_rt(rtl.r / sum, rtl.t / sum)?;
    Ok(BeamSplitterRun { scattering, splitter, stats: single_photon_stats(&splitter) })
}
