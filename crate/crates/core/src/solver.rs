//! Strang split-step spectral integrator for `i ∂τ′Φ = [−∂ξ² + Ṽ(ξ)]Φ`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::num::{cis, Real};
use crate::potential::DefectPotential;
use crate::wavepacket::{Observables, Wavepacket};

/// Exploratory-only absorbing layer: amplitudes within `width` of either edge
/// are damped by `exp(−strength·s²·dτ)` per step, `s` ramping 0 → 1 outward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsorbingMask<T> {
    pub width: T,
    pub strength: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions<T> {
    /// Keep `Im Ṽ` in the potential phase (absorption studies).
    pub keep_imaginary: bool,
    pub absorbing_mask: Option<AbsorbingMask<T>>,
    /// Measurement runs forbid the mask and the imaginary part.
    pub measurement: bool,
    /// Abort when edge/peak density exceeds this; `None` disables the guard.
    pub boundary_guard: Option<T>,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self { keep_imaginary: false, absorbing_mask: None, measurement: true, boundary_guard: Some(T::lit(1e-6)) }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn exploratory() -> Self {
        Self { measurement: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.measurement && self.absorbing_mask.is_some() {
            return Err(Error::MaskInMeasurement);
        }
        if self.measurement && self.keep_imaginary {
            return Err(Error::InvalidConfig {
                field: "mode.keepImaginary".into(),
                reason: "measurement mode drops the imaginary part of the potential".into(),
            });
        }
        Ok(())
    }
}

/// Snapshots and observables collected along an evolution.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub snapshots: Vec<Wavepacket<T>>,
    pub summary: Vec<(T, Observables<T>)>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &Wavepacket<T> {
        self.snapshots.last().expect("trajectory always holds the initial state")
    }
}

/// Reusable stepper holding FFT plans and the precomputed phase factors for a
/// fixed grid, potential and time step.
pub struct SplitStep<T: Real> {
    grid: Grid<T>,
    potential: Vec<Complex<T>>,
    k2: Vec<T>,
    half_phase: Vec<Complex<T>>,
    kinetic: Vec<Complex<T>>,
    mask: Option<Vec<T>>,
    guard: Option<T>,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> SplitStep<T> {
    pub fn new(grid: &Grid<T>, potential: &DefectPotential<T>, options: &SolverOptions<T>) -> Result<Self> {
        grid.validate()?;
        options.validate()?;
        if !grid.same_points(potential.xi()) {
            return Err(Error::GridMismatch);
        }
        let potential: Vec<_> = potential
            .values()
            .iter()
            .map(|v| if options.keep_imaginary { *v } else { Complex::new(v.re, T::zero()) })
            .collect();
        let k2: Vec<T> = grid.wavenumbers().into_iter().map(|k| k * k).collect();

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.n);
        let ifft = planner.plan_fft_inverse(grid.n);
        let scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len())];

        let mask = options.absorbing_mask.map(|m| absorbing_factors(grid, &m));
        let mut stepper = Self {
            grid: *grid,
            half_phase: Vec::new(),
            kinetic: Vec::new(),
            potential,
            k2,
            mask,
            guard: if options.absorbing_mask.is_some() { None } else { options.boundary_guard },
            fft,
            ifft,
            scratch,
        };
        let (half, kin) = stepper.phases(grid.d_tau);
        stepper.half_phase = half;
        stepper.kinetic = kin;
        Ok(stepper)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// `exp(−iṼ·dt/2)` and `exp(−ik²·dt)/n` (inverse-FFT scaling folded in).
    fn phases(&self, dt: T) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let half_dt = dt * T::lit(0.5);
        let half = self
            .potential
            .iter()
            .map(|v| cis(-v.re * half_dt) * (v.im * half_dt).exp())
            .collect();
        let inv_n = T::from_usize_lossy(self.grid.n).recip();
        let kin = self.k2.iter().map(|&k2| cis(-k2 * dt) * inv_n).collect();
        (half, kin)
    }

    fn apply(&mut self, psi: &mut [Complex<T>], half: &[Complex<T>], kinetic: &[Complex<T>], dt: T) {
        psi.iter_mut().zip(half).for_each(|(a, p)| *a = *a * p);
        self.fft.process_with_scratch(psi, &mut self.scratch);
        psi.iter_mut().zip(kinetic).for_each(|(a, p)| *a = *a * p);
        self.ifft.process_with_scratch(psi, &mut self.scratch);
        psi.iter_mut().zip(half).for_each(|(a, p)| *a = *a * p);
        if let Some(mask) = &self.mask {
            psi.iter_mut().zip(mask).for_each(|(a, m)| *a = *a * (-*m * dt).exp());
        }
    }

    fn check_grid(&self, psi: &Wavepacket<T>) -> Result<()> {
        if psi.grid.n != self.grid.n || psi.grid.xi_min != self.grid.xi_min || psi.grid.xi_max != self.grid.xi_max {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn guard(&self, psi: &Wavepacket<T>) -> Result<()> {
        if let Some(limit) = self.guard {
            let ratio = psi.boundary_ratio();
            if ratio > limit {
                return Err(Error::BoundaryContact { tau: psi.tau.as_f64(), ratio: ratio.as_f64() });
            }
        }
        Ok(())
    }

    /// One Strang step of length `d_tau`.
    pub fn step(&mut self, psi: &mut Wavepacket<T>) -> Result<()> {
        self.check_grid(psi)?;
        let half = std::mem::take(&mut self.half_phase);
        let kin = std::mem::take(&mut self.kinetic);
        self.apply(&mut psi.amplitudes, &half, &kin, self.grid.d_tau);
        self.half_phase = half;
        self.kinetic = kin;
        psi.tau = psi.tau + self.grid.d_tau;
        self.guard(psi)
    }

    /// One Strang step of arbitrary length (used for the final partial step).
    pub fn step_by(&mut self, psi: &mut Wavepacket<T>, dt: T) -> Result<()> {
        self.check_grid(psi)?;
        let (half, kin) = self.phases(dt);
        self.apply(&mut psi.amplitudes, &half, &kin, dt);
        psi.tau = psi.tau + dt;
        self.guard(psi)
    }

    /// Evolves to `psi0.tau + tau_end`. A snapshot is stored every
    /// `snapshot_every` steps (0: only initial and final) and observables every
    /// `summary_every` steps (0: only initial and final).
    pub fn evolve(
        &mut self,
        psi0: &Wavepacket<T>,
        tau_end: T,
        snapshot_every: usize,
        summary_every: usize,
    ) -> Result<Trajectory<T>> {
        self.check_grid(psi0)?;
        if !(tau_end >= T::zero()) {
            return Err(Error::InvalidConfig { field: "tauEnd".into(), reason: "must be >= 0".into() });
        }
        let start = psi0.tau;
        let dt = self.grid.d_tau;
        let (full, remainder) = step_count(tau_end, dt);

        let mut psi = psi0.clone();
        let mut traj = Trajectory { snapshots: vec![psi.clone()], summary: vec![(psi.tau, psi.observables())] };
        for i in 1..=full {
            self.step(&mut psi)?;
            psi.tau = start + dt * T::from_usize_lossy(i);
            let last = i == full && remainder == T::zero();
            if last {
                psi.tau = start + tau_end;
            }
            if last || (snapshot_every > 0 && i % snapshot_every == 0) {
                traj.snapshots.push(psi.clone());
            }
            if last || (summary_every > 0 && i % summary_every == 0) {
                traj.summary.push((psi.tau, psi.observables()));
            }
        }
        if remainder > T::zero() {
            self.step_by(&mut psi, remainder)?;
            psi.tau = start + tau_end;
            traj.snapshots.push(psi.clone());
            traj.summary.push((psi.tau, psi.observables()));
        }
        Ok(traj)
    }

    /// Evolves in place to `psi.tau + tau_end` without recording anything.
    pub fn advance(&mut self, psi: &mut Wavepacket<T>, tau_end: T) -> Result<()> {
        let start = psi.tau;
        let (full, remainder) = step_count(tau_end, self.grid.d_tau);
        for _ in 0..full {
            self.step(psi)?;
        }
        if remainder > T::zero() {
            self.step_by(psi, remainder)?;
        }
        psi.tau = start + tau_end;
        Ok(())
    }

    /// Like [`SplitStep::advance`], but stops after the first full step at
    /// which `stop` holds. Returns whether it stopped early.
    pub fn advance_until(&mut self, psi: &mut Wavepacket<T>, tau_end: T, stop: impl Fn(&Wavepacket<T>) -> bool) -> Result<bool> {
        let start = psi.tau;
        let (full, remainder) = step_count(tau_end, self.grid.d_tau);
        for i in 1..=full {
            self.step(psi)?;
            psi.tau = start + self.grid.d_tau * T::from_usize_lossy(i);
            if stop(psi) {
                return Ok(true);
            }
        }
        if remainder > T::zero() {
            self.step_by(psi, remainder)?;
        }
        psi.tau = start + tau_end;
        Ok(false)
    }
}

/// Full steps plus a leftover partial step (zero when `tau_end` is a multiple of `dt`).
pub(crate) fn step_count<T: Real>(tau_end: T, dt: T) -> (usize, T) {
    let ratio = tau_end / dt;
    let eps = T::lit(1e-9);
    let full = (ratio + eps).floor().to_usize().unwrap_or(0);
    let remainder = tau_end - dt * T::from_usize_lossy(full);
    if remainder > dt * eps {
        (full, remainder)
    } else {
        (full, T::zero())
    }
}

fn absorbing_factors<T: Real>(grid: &Grid<T>, mask: &AbsorbingMask<T>) -> Vec<T> {
    grid.points()
        .into_iter()
        .map(|x| {
            let depth_in = (grid.xi_min + mask.width - x).max(x - (grid.xi_max - grid.dxi() - mask.width));
            if depth_in > T::zero() {
                let s = (depth_in / mask.width).min(T::one());
                mask.strength * s * s
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Single Strang step with a freshly planned stepper.
pub fn step<T: Real>(psi: &Wavepacket<T>, potential: &DefectPotential<T>, options: &SolverOptions<T>) -> Result<Wavepacket<T>> {
    let mut stepper = SplitStep::new(&psi.grid, potential, options)?;
    let mut out = psi.clone();
    stepper.step(&mut out)?;
    Ok(out)
}

pub fn evolve<T: Real>(
    psi0: &Wavepacket<T>,
    potential: &DefectPotential<T>,
    tau_end: T,
    snapshot_every: usize,
    options: &SolverOptions<T>,
) -> Result<Trajectory<T>> {
    SplitStep::new(&psi0.grid, potential, options)?.evolve(psi0, tau_end, snapshot_every, snapshot_every)
}
