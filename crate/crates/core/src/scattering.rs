//! Reflection, transmission and trapping coefficients, velocity sweeps and
//! the (v0, g0) phase diagram.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::num::Real;
use crate::potential::DefectPotential;
use crate::solver::{SolverOptions, SplitStep};
use crate::wavepacket::{init_gaussian, GaussianParams, Wavepacket};

/// Partial-norm fractions of the final packet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rtl<T> {
    pub r: T,
    pub t: T,
    pub l: T,
    pub xi_l: T,
    pub xi_r: T,
}

impl<T: Real> Rtl<T> {
    pub fn budget(&self) -> T {
        self.r + self.t + self.l
    }
}

/// Coefficients of one measurement run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringResult<T> {
    pub v0: T,
    pub g0: T,
    /// Medium length `L_m` the packet was evolved for.
    pub l_m: T,
    /// `L_m` was shortened so the packet stays clear of the domain edges.
    pub l_m_limited: bool,
    pub rtl: Rtl<T>,
}

impl<T: Real> ScatteringResult<T> {
    pub fn r(&self) -> T {
        self.rtl.r
    }
    pub fn t(&self) -> T {
        self.rtl.t
    }
    pub fn l(&self) -> T {
        self.rtl.l
    }
    pub fn budget(&self) -> T {
        self.rtl.budget()
    }
}

/// `R`, `T`, `L` as the norm of `final_psi` on `ξ < ξ_l`, `ξ > ξ_r` and in
/// between, each divided by the norm of `initial_psi`.
pub fn compute_rtl<T: Real>(final_psi: &Wavepacket<T>, initial_psi: &Wavepacket<T>, xi_l: T, xi_r: T) -> Result<Rtl<T>> {
    let grid = &final_psi.grid;
    let last = grid.point(grid.n - 1);
    if !(xi_l < xi_r && xi_l >= grid.xi_min && xi_r <= last) {
        return Err(Error::SplitOutsideGrid {
            xi_l: xi_l.as_f64(),
            xi_r: xi_r.as_f64(),
            xi_min: grid.xi_min.as_f64(),
            xi_max: last.as_f64(),
        });
    }
    let total = initial_psi.norm();
    let (mut r, mut t, mut l) = (T::zero(), T::zero(), T::zero());
    for (j, a) in final_psi.amplitudes.iter().enumerate() {
        let x = grid.point(j);
        let p = a.norm_sqr();
        if x < xi_l {
            r = r + p;
        } else if x > xi_r {
            t = t + p;
        } else {
            l = l + p;
        }
    }
    let dxi = grid.dxi();
    Ok(Rtl { r: r * dxi / total, t: t * dxi / total, l: l * dxi / total, xi_l, xi_r })
}

/// Outermost samples on each side of the well beyond which `|Re Ṽ|` stays
/// below `epsilon·depth`.
pub fn default_splits<T: Real>(potential: &DefectPotential<T>, epsilon: T) -> Result<(T, T)> {
    if !(potential.depth() > T::zero()) {
        return Err(Error::ZeroDepth);
    }
    let threshold = epsilon * potential.depth();
    let re = potential.real_values();
    let xi = potential.xi();
    let above = |v: &T| v.abs() >= threshold;
    let first = re.iter().position(above).ok_or(Error::ZeroDepth)?;
    let last = re.iter().rposition(above).ok_or(Error::ZeroDepth)?;
    if first == 0 {
        return Err(Error::SplitThresholdNotMet { threshold: epsilon.as_f64(), side: "left" });
    }
    if last + 1 >= re.len() {
        return Err(Error::SplitThresholdNotMet { threshold: epsilon.as_f64(), side: "right" });
    }
    Ok((xi[first - 1], xi[last + 1]))
}

/// Rescales `shape` so that `−min Re Ṽ = target_g0`.
pub fn calibrate_depth<T: Real>(target_g0: T, shape: &DefectPotential<T>) -> Result<DefectPotential<T>> {
    if !(shape.depth() > T::zero()) {
        return Err(Error::ZeroDepth);
    }
    if target_g0 == shape.depth() {
        return Ok(shape.clone());
    }
    let mut scaled = shape.scaled(target_g0 / shape.depth());
    scaled.pin_minimum(-target_g0);
    Ok(scaled)
}

/// How long each packet is evolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MediumLength<T> {
    /// Shortest time after which both the reflected and the transmitted free
    /// packet sit `clearance_sigmas` widths outside the split region, capped
    /// by domain-edge safety.
    Auto,
    /// `⌈(|ξ0| + 6)/(2 v0)⌉`.
    Traversal,
    Fixed(T),
}

/// Everything a measurement run needs besides the potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunParams<T> {
    pub grid: Grid<T>,
    /// Launch parameters; `v0` is replaced per run.
    pub packet: GaussianParams<T>,
    pub split_threshold: T,
    pub medium_length: MediumLength<T>,
    pub medium_length_cap: T,
    pub clearance_sigmas: T,
    pub edge_sigmas: T,
    pub solver: SolverOptions<T>,
    pub budget_tolerance: T,
}

impl<T: Real> Default for RunParams<T> {
    fn default() -> Self {
        Self {
            grid: Grid::default(),
            packet: GaussianParams::reference(T::zero()),
            split_threshold: T::lit(1e-3),
            medium_length: MediumLength::Auto,
            medium_length_cap: T::lit(200.0),
            clearance_sigmas: T::lit(4.0),
            edge_sigmas: T::lit(6.0),
            solver: SolverOptions::default(),
            budget_tolerance: T::lit(1e-3),
        }
    }
}

impl<T: Real> RunParams<T> {
    /// Free-packet density width at time `tau`: `σ(τ)² = σ0² + τ²/σ0²`.
    fn free_sigma(&self, tau: T) -> T {
        let s0 = self.packet.sigma();
        (s0 * s0 + tau * tau / (s0 * s0)).sqrt()
    }

    /// `L_m` for a run at `v0`; the flag reports an edge-limited value.
    pub fn medium_length_for(&self, v0: T, xi_g: T, splits: (T, T)) -> (T, bool) {
        let cap = self.medium_length_cap;
        let dt = self.grid.d_tau;
        match self.medium_length {
            MediumLength::Fixed(l) => (l.min(cap), l > cap),
            MediumLength::Traversal => {
                let l = ((self.packet.xi0.abs() + T::lit(6.0)) / (T::lit(2.0) * v0)).ceil();
                (l.min(cap), l > cap)
            }
            MediumLength::Auto => {
                let (xi_l, xi_r) = splits;
                let xi0 = self.packet.xi0;
                let distance = (xi_r - xi0).max((xi_g - xi0) + (xi_g - xi_l));
                let two_v = T::lit(2.0) * v0;
                let clear = |tau: T| two_v * tau - self.clearance_sigmas * self.free_sigma(tau) >= distance;
                let inside = |tau: T| {
                    let spread = self.edge_sigmas * self.free_sigma(tau);
                    let right = xi0.max(xi0 + two_v * tau) + spread;
                    let left = xi0.min(T::lit(2.0) * xi_g - xi0 - two_v * tau) - spread;
                    right <= self.grid.xi_max - self.grid.dxi() && left >= self.grid.xi_min
                };
                let clear_at = if clear(cap) { Some(bisect(T::zero(), cap, clear)) } else { None };
                let edge_at = if inside(cap) { cap } else { bisect(T::zero(), cap, |t| !inside(t)) };
                let (l, limited) = match clear_at {
                    Some(c) if c <= edge_at => (c, false),
                    _ => (edge_at, true),
                };
                let rounded = (l / dt).ceil() * dt;
                let rounded = if limited { (l / dt).floor() * dt } else { rounded };
                (rounded.min(cap), limited || l >= cap)
            }
        }
    }
}

/// Smallest `τ` in `(lo, hi]` with `pred(τ)` true, for a predicate that flips
/// once from false to true.
fn bisect<T: Real>(mut lo: T, mut hi: T, pred: impl Fn(T) -> bool) -> T {
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// A calibrated potential on the run grid together with its split points.
#[derive(Clone, Debug)]
pub struct Experiment<T> {
    pub run: RunParams<T>,
    pub potential: DefectPotential<T>,
    pub splits: (T, T),
    pub g0: T,
    /// Factor applied to the base shape to reach `g0`.
    pub calibration_factor: T,
}

impl<T: Real> Experiment<T> {
    /// Calibrates `shape` to depth `g0` (or keeps its own depth) and derives
    /// the split points from the uncalibrated shape.
    pub fn new(run: RunParams<T>, shape: &DefectPotential<T>, g0: Option<T>) -> Result<Self> {
        run.grid.validate()?;
        run.solver.validate()?;
        if !run.grid.same_points(shape.xi()) {
            return Err(Error::GridMismatch);
        }
        let splits = default_splits(shape, run.split_threshold)?;
        let (potential, g0, factor) = match g0 {
            Some(g0) => (calibrate_depth(g0, shape)?, g0, g0 / shape.depth()),
            None => (shape.clone(), shape.depth(), T::one()),
        };
        Ok(Self { run, potential, splits, g0, calibration_factor: factor })
    }

    /// Evolves one packet at incident velocity `v0` and extracts (R, T, L).
    pub fn measure(&self, v0: T) -> Result<ScatteringResult<T>> {
        let run = &self.run;
        run.grid.check_nyquist(v0, self.potential.depth())?;
        let params = GaussianParams { v0, ..run.packet };
        let psi0 = init_gaussian(&run.grid, &params)?;
        let (mut l_m, mut limited) = run.medium_length_for(v0, self.potential.xi_g(), self.splits);

        let mut stepper = SplitStep::new(&run.grid, &self.potential, &run.solver)?;
        let mut psi = psi0.clone();
        match (run.medium_length, run.solver.boundary_guard) {
            // Scattered tails are not Gaussian, so the automatic length also
            // stops once the edge density reaches half the guard level.
            (MediumLength::Auto, Some(guard)) if run.solver.absorbing_mask.is_none() => {
                let soft = guard * T::lit(0.5);
                if stepper.advance_until(&mut psi, l_m, |p| p.boundary_ratio() > soft)? {
                    l_m = psi.tau - psi0.tau;
                    limited = true;
                }
            }
            _ => stepper.advance(&mut psi, l_m)?,
        }

        let rtl = compute_rtl(&psi, &psi0, self.splits.0, self.splits.1)?;
        if run.solver.measurement && !run.solver.keep_imaginary {
            let budget = rtl.budget();
            if (budget - T::one()).abs() > run.budget_tolerance {
                return Err(Error::BudgetViolation { sum: budget.as_f64() });
            }
        }
        Ok(ScatteringResult { v0, g0: self.g0, l_m, l_m_limited: limited, rtl })
    }

    /// One measurement per velocity, in input order; failures are kept.
    pub fn sweep(&self, v0s: &[T]) -> Vec<SweepPoint<T>> {
        v0s.par_iter()
            .map(|&v0| SweepPoint { v0, g0: self.g0, outcome: self.measure(v0) })
            .collect()
    }
}

/// Outcome of one sweep or phase-diagram cell.
#[derive(Clone, Debug)]
pub struct SweepPoint<T> {
    pub v0: T,
    pub g0: T,
    pub outcome: Result<ScatteringResult<T>>,
}

pub fn sweep_velocity<T: Real>(
    run: &RunParams<T>,
    shape: &DefectPotential<T>,
    g0: Option<T>,
    v0s: &[T],
) -> Result<Vec<SweepPoint<T>>> {
    Ok(Experiment::new(*run, shape, g0)?.sweep(v0s))
}

/// `R`, `T`, `L` over a (g0, v0) grid. Matrices are indexed `[g0][v0]`;
/// failed cells hold NaN and keep their error in `cells`.
#[derive(Clone, Debug)]
pub struct PhaseDiagram<T> {
    pub v0_axis: Vec<T>,
    pub g0_axis: Vec<T>,
    pub r_matrix: Vec<Vec<T>>,
    pub t_matrix: Vec<Vec<T>>,
    pub l_matrix: Vec<Vec<T>>,
    pub cells: Vec<SweepPoint<T>>,
}

pub fn phase_diagram<T: Real>(
    v0_axis: &[T],
    g0_axis: &[T],
    base_shape: &DefectPotential<T>,
    run: &RunParams<T>,
) -> Result<PhaseDiagram<T>> {
    if v0_axis.is_empty() || g0_axis.is_empty() {
        return Err(Error::InvalidConfig { field: "scattering".into(), reason: "phase diagram axes must be nonempty".into() });
    }
    let base = Experiment::new(*run, base_shape, None)?;
    let experiments: Vec<Experiment<T>> = g0_axis
        .iter()
        .map(|&g0| {
            let potential = base_shape.scaled(g0 / base_shape.depth());
            let mut potential = potential;
            potential.pin_minimum(-g0);
            Experiment { potential, g0, calibration_factor: g0 / base_shape.depth(), ..base.clone() }
        })
        .collect();
    let tasks: Vec<(usize, T)> = (0..g0_axis.len()).flat_map(|i| v0_axis.iter().map(move |&v| (i, v))).collect();
    let cells: Vec<SweepPoint<T>> = tasks
        .par_iter()
        .map(|&(i, v0)| {
            let e = &experiments[i];
            SweepPoint { v0, g0: e.g0, outcome: e.measure(v0) }
        })
        .collect();

    let matrix = |f: fn(&ScatteringResult<T>) -> T| -> Vec<Vec<T>> {
        cells
            .chunks(v0_axis.len())
            .map(|row| row.iter().map(|c| c.outcome.as_ref().map(f).unwrap_or(T::nan())).collect())
            .collect()
    };
    Ok(PhaseDiagram {
        v0_axis: v0_axis.to_vec(),
        g0_axis: g0_axis.to_vec(),
        r_matrix: matrix(|s| s.rtl.r),
        t_matrix: matrix(|s| s.rtl.t),
        l_matrix: matrix(|s| s.rtl.l),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz_shape(grid: &Grid<f64>) -> DefectPotential<f64> {
        DefectPotential::from_fn(grid.points(), 0.0, |x| -3.0 / (1.0 + x.powi(4))).unwrap()
    }

    #[test]
    fn splits_symmetric_and_monotone() {
        let grid = Grid::<f64>::default();
        let shape = lorentz_shape(&grid);
        let (l, r) = default_splits(&shape, 1e-3).unwrap();
        assert!((l + r).abs() <= grid.dxi());
        let (l2, r2) = default_splits(&shape, 1e-5).unwrap();
        assert!(l2 < l && r2 > r);
        assert!(matches!(default_splits(&shape, 1e-12), Err(Error::SplitThresholdNotMet { .. })));
        let zero = DefectPotential::zero(grid.points(), 0.0).unwrap();
        assert_eq!(default_splits(&zero, 1e-3), Err(Error::ZeroDepth));
    }

    #[test]
    fn calibration_examples() {
        let grid = Grid::<f64>::default();
        let shape = lorentz_shape(&grid);
        assert_eq!(calibrate_depth(shape.depth(), &shape).unwrap(), shape);
        let ten = calibrate_depth(10.0, &shape).unwrap();
        assert_eq!(ten.depth(), 10.0);
        assert_eq!(ten.real_values().iter().cloned().fold(f64::INFINITY, f64::min), -10.0);
        let flat = calibrate_depth(0.0, &shape).unwrap();
        assert!(flat.values().iter().all(|v| v.re == 0.0));
        let zero = DefectPotential::zero(grid.points(), 0.0).unwrap();
        assert_eq!(calibrate_depth(1.0, &zero), Err(Error::ZeroDepth));
    }

    #[test]
    fn rtl_rejects_bad_splits() {
        let grid = Grid::<f64>::default();
        let psi = init_gaussian(&grid, &GaussianParams::reference(1.0)).unwrap();
        assert!(compute_rtl(&psi, &psi, 2.0, -2.0).is_err());
        assert!(compute_rtl(&psi, &psi, -50.0, 2.0).is_err());
        let rtl = compute_rtl(&psi, &psi, -1.0, 1.0).unwrap();
        assert!((rtl.budget() - 1.0).abs() < 1e-12);
        assert!(rtl.r > 0.99);
    }

    #[test]
    fn auto_medium_length_clears_splits() {
        let run = RunParams::<f64>::default();
        let (l_m, limited) = run.medium_length_for(10.0, 0.0, (-6.0, 6.0));
        assert!(!limited);
        // 2 v0 L − 4σ(L) = 14 at the clearance time.
        let sigma = (4.5 + l_m * l_m / 4.5f64).sqrt();
        assert!((20.0 * l_m - 4.0 * sigma - 14.0).abs() < 20.0 * run.grid.d_tau + 1e-9);
        let (slow, limited) = run.medium_length_for(0.2, 0.0, (-6.0, 6.0));
        assert!(limited && slow < 200.0);
        let traversal = RunParams { medium_length: MediumLength::Traversal, ..run };
        assert_eq!(traversal.medium_length_for(6.0, 0.0, (-6.0, 6.0)).0, 2.0);
    }
}
