//! Independent back-ends used only to cross-check the split-step pipeline:
//! stationary transfer-matrix scattering on a step approximation of the
//! potential, and an implicit rational-approximation time integrator on a
//! finite-difference grid.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::grid::Grid;
use crate::potential::DefectPotential;
use crate::scattering::{Experiment, RunParams};
use crate::wavepacket::{GaussianParams, Wavepacket};

/// Piecewise-constant real potential: `values[j]` on
/// `[breakpoints[j], breakpoints[j + 1])`, zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePotential<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> PiecewisePotential<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            if breakpoints.len() > 1 {
                return Err(Error::InvalidSegments("breakpoints without segment values".into()));
            }
            return Ok(Self { breakpoints, values });
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidSegments(format!(
                "{} breakpoints for {} segments",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSegments("non-finite breakpoint or value".into()));
        }
        if let Some(j) = breakpoints.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSegments(format!("segment {j} has zero or negative length")));
        }
        Ok(Self { breakpoints, values })
    }

    /// No segments: the free line.
    pub fn free() -> Self {
        Self { breakpoints: Vec::new(), values: Vec::new() }
    }

    /// Single well/barrier of value `v` on `[left, left + width)`.
    pub fn square(left: T, width: T, v: T) -> Result<Self> {
        Self::new(vec![left, left + width], vec![v])
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Mirror image `V(−ξ)`.
    pub fn reversed(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().rev().map(|&b| -b).collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }
}

/// Plane-wave `(R, T)` at wavenumber `k > 0` for the dispersion `E = k²`.
///
/// Composes the exact `(ψ, ψ′)` propagation matrix of every segment; with a
/// real potential all entries are real and the product has unit determinant,
/// so `R + T = 1` up to rounding.
pub fn transfer_matrix_rt<T: Real>(k: T, pw: &PiecewisePotential<T>) -> Result<(T, T)> {
    if !(k > T::zero()) {
        return Err(Error::InvalidSegments(format!("wavenumber must be > 0, got {k}")));
    }
    let (zero, one) = (T::zero(), T::one());
    let mut m = [[one, zero], [zero, one]];
    for (w, &v) in pw.breakpoints.windows(2).zip(&pw.values) {
        let seg = segment_matrix(k * k - v, w[1] - w[0]);
        m = [
            [seg[0][0] * m[0][0] + seg[0][1] * m[1][0], seg[0][0] * m[0][1] + seg[0][1] * m[1][1]],
            [seg[1][0] * m[0][0] + seg[1][1] * m[1][0], seg[1][0] * m[0][1] + seg[1][1] * m[1][1]],
        ];
    }
    // Left: ψ = e^{ikx} + r e^{−ikx}; right: ψ = τ e^{ik(x − L)}.
    let ik = Complex::new(zero, k);
    let a = ik * m[0][0] - m[1][0];
    let b = Complex::new(-k * k * m[0][1], zero) - ik * m[1][1];
    // With det M = 1, |A − B|² − |A + B|² = 4k², so both probabilities come
    // from sums of squares without cancellation, even for thick barriers.
    let den = (a - b).norm_sqr();
    Ok(((a + b).norm_sqr() / den, T::lit(4.0) * k * k / den))
}

/// Propagator of `(ψ, ψ′)` across a segment of length `d` with `q² = k² − V`.
fn segment_matrix<T: Real>(q2: T, d: T) -> [[T; 2]; 2] {
    if q2 > T::zero() {
        let q = q2.sqrt();
        let (s, c) = (q * d).sin_cos();
        [[c, s / q], [-q * s, c]]
    } else if q2 < T::zero() {
        let kappa = (-q2).sqrt();
        let (s, c) = ((kappa * d).sinh(), (kappa * d).cosh());
        [[c, s / kappa], [kappa * s, c]]
    } else {
        [[T::one(), d], [T::zero(), T::one()]]
    }
}

/// Midpoint step approximation of `Re Ṽ` with `segments` equal pieces over
/// the region where `|Re Ṽ|` exceeds `1e-6` of its maximum.
pub fn discretize_potential<T: Real>(potential: &DefectPotential<T>, segments: usize) -> Result<PiecewisePotential<T>> {
    if segments < 16 {
        return Err(Error::InvalidSegments(format!("need at least 16 segments, got {segments}")));
    }
    let re = potential.real_values();
    let scale = re.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return Ok(PiecewisePotential::free());
    }
    let threshold = scale * T::lit(1e-6);
    let first = re.iter().position(|v| v.abs() >= threshold).unwrap_or(0);
    let last = re.iter().rposition(|v| v.abs() >= threshold).unwrap_or(re.len() - 1);
    let xi = potential.xi();
    let (lo, hi) = if first == last {
        let half = if xi.len() > 1 { (xi[1] - xi[0]) * T::lit(0.5) } else { T::lit(0.5) };
        (xi[first] - half, xi[first] + half)
    } else {
        (xi[first], xi[last])
    };
    let width = (hi - lo) / T::from_usize_lossy(segments);
    let breakpoints: Vec<T> = (0..=segments).map(|j| lo + width * T::from_usize_lossy(j)).collect();
    let values = (0..segments)
        .map(|j| potential.real_at(lo + width * (T::from_usize_lossy(j) + T::lit(0.5))))
        .collect();
    PiecewisePotential::new(breakpoints, values)
}

/// Sixth-order central second derivative, offsets 0..=3.
const FD6: [f64; 4] = [-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
const BAND: usize = 3;

/// Banded `I + a·H` with `H = −∂ξ² + Re Ṽ`, LU-factored without pivoting.
/// The Hermitian part of the system is the identity, so no pivot vanishes.
struct BandedLu<T> {
    rows: Vec<[Complex<T>; 2 * BAND + 1]>,
}

fn hamiltonian_row<T: Real>(v: T, inv_dx2: T) -> [T; 2 * BAND + 1] {
    let mut row = [T::zero(); 2 * BAND + 1];
    for (off, c) in FD6.iter().enumerate() {
        let h = -T::lit(*c) * inv_dx2;
        row[BAND + off] = h;
        row[BAND - off] = h;
    }
    row[BAND] = row[BAND] + v;
    row
}

impl<T: Real> BandedLu<T> {
    fn factor(potential: &[T], inv_dx2: T, a: Complex<T>) -> Result<Self> {
        let n = potential.len();
        let one = Complex::new(T::one(), T::zero());
        let mut rows: Vec<[Complex<T>; 2 * BAND + 1]> = potential
            .iter()
            .map(|&v| {
                let h = hamiltonian_row(v, inv_dx2);
                let mut row = [Complex::new(T::zero(), T::zero()); 2 * BAND + 1];
                for (slot, hv) in row.iter_mut().zip(h) {
                    *slot = a * hv;
                }
                row[BAND] = row[BAND] + one;
                row
            })
            .collect();
        for k in 0..n {
            let pivot = rows[k][BAND];
            if !(pivot.norm() > T::lit(1e-300)) || !pivot.re.is_finite() {
                return Err(Error::LinearSolve(format!("vanishing pivot at row {k}")));
            }
            for i in k + 1..(k + BAND + 1).min(n) {
                let l = rows[i][BAND + k - i] / pivot;
                rows[i][BAND + k - i] = l;
                for j in k + 1..(k + BAND + 1).min(n) {
                    let upper = rows[k][BAND + j - k];
                    rows[i][BAND + j - i] = rows[i][BAND + j - i] - l * upper;
                }
            }
        }
        Ok(Self { rows })
    }

    fn solve(&self, b: &mut [Complex<T>]) {
        let n = b.len();
        for i in 0..n {
            let mut acc = b[i];
            for j in i.saturating_sub(BAND)..i {
                acc = acc - self.rows[i][BAND + j - i] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..(i + BAND + 1).min(n) {
                acc = acc - self.rows[i][BAND + j - i] * b[j];
            }
            b[i] = acc / self.rows[i][BAND];
        }
    }
}

/// `out = (I + a·H)·psi`, zero amplitude outside the grid.
fn apply_shifted<T: Real>(psi: &[Complex<T>], potential: &[T], inv_dx2: T, a: Complex<T>, out: &mut [Complex<T>]) {
    let n = psi.len();
    for i in 0..n {
        let h = hamiltonian_row(potential[i], inv_dx2);
        let lo = i.saturating_sub(BAND);
        let hi = (i + BAND + 1).min(n);
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in lo..hi {
            acc = acc + psi[j] * h[BAND + j - i];
        }
        out[i] = psi[i] + a * acc;
    }
}

/// Evolves `psi0` by `tau_end` with the (2,2) Padé approximant of
/// `exp(−iH·dτ)` (fourth order, unitary for real potentials) on a sixth-order
/// finite-difference Laplacian with zero Dirichlet edges. Uses the packet's
/// own `d_tau`; the imaginary part of the potential is ignored.
pub fn reference_evolve<T: Real>(psi0: &Wavepacket<T>, potential: &DefectPotential<T>, tau_end: T) -> Result<Wavepacket<T>> {
    reference_evolve_with(psi0, potential, tau_end, psi0.grid.d_tau)
}

pub fn reference_evolve_with<T: Real>(
    psi0: &Wavepacket<T>,
    potential: &DefectPotential<T>,
    tau_end: T,
    dt: T,
) -> Result<Wavepacket<T>> {
    if !psi0.grid.same_points(potential.xi()) {
        return Err(Error::GridMismatch);
    }
    if !(tau_end >= T::zero()) || !(dt > T::zero()) {
        return Err(Error::InvalidConfig { field: "tauEnd".into(), reason: "need tau_end >= 0 and dt > 0".into() });
    }
    let v = potential.real_values();
    let dx = psi0.grid.dxi();
    let inv_dx2 = (dx * dx).recip();
    let mut psi = psi0.clone();

    let (full, remainder) = crate::solver::step_count(tau_end, dt);
    let advance = |psi: &mut Vec<Complex<T>>, h: T, count: usize| -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        // Roots of 1 + z/2 + z²/12 are −3 ± i√3; with z = −iHh each factor is
        // (1 − z/r) = I + (ih/r)H.
        let sqrt3 = T::lit(3.0).sqrt();
        let roots = [Complex::new(T::lit(-3.0), sqrt3), Complex::new(T::lit(-3.0), -sqrt3)];
        let shifts: Vec<Complex<T>> = roots.iter().map(|r| Complex::new(T::zero(), h) / r).collect();
        let lus = shifts
            .iter()
            .map(|&a| BandedLu::factor(&v, inv_dx2, -a))
            .collect::<Result<Vec<_>>>()?;
        let mut tmp = vec![Complex::new(T::zero(), T::zero()); psi.len()];
        for _ in 0..count {
            for &a in &shifts {
                apply_shifted(psi, &v, inv_dx2, a, &mut tmp);
                std::mem::swap(psi, &mut tmp);
            }
            for lu in &lus {
                lu.solve(psi);
            }
        }
        if psi.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::LinearSolve("non-finite amplitudes".into()));
        }
        Ok(())
    };
    advance(&mut psi.amplitudes, dt, full)?;
    if remainder > T::zero() {
        advance(&mut psi.amplitudes, remainder, 1)?;
    }
    psi.tau = psi0.tau + tau_end;
    Ok(psi)
}

/// Dynamic and stationary coefficients at one incident wavenumber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleRow<T> {
    pub k_or_v0: T,
    pub r_dyn: T,
    pub t_dyn: T,
    pub r_tm: T,
    pub t_tm: T,
}

impl<T: Real> OracleRow<T> {
    pub fn abs_err_r(&self) -> T {
        (self.r_dyn - self.r_tm).abs()
    }
    pub fn abs_err_t(&self) -> T {
        (self.t_dyn - self.t_tm).abs()
    }
}

/// Run parameters for a packet narrow in momentum (`widthParam = 200`, so
/// `σ_k ≈ 0.07`) on a domain wide enough to hold it.
pub fn narrow_packet_params<T: Real>() -> RunParams<T> {
    RunParams {
        grid: Grid { xi_min: T::lit(-160.0), xi_max: T::lit(160.0), n: 16384, d_tau: T::lit(1e-3) },
        packet: GaussianParams { a0: T::one(), xi0: T::lit(-60.0), width_param: T::lit(200.0), v0: T::zero() },
        ..RunParams::default()
    }
}

/// Split-step `(R, T)` of `experiment` against the transfer-matrix `(R, T)`
/// of its potential at `k = v0`.
pub fn compare_with_transfer_matrix<T: Real>(experiment: &Experiment<T>, v0s: &[T], segments: usize) -> Result<Vec<OracleRow<T>>> {
    let pw = discretize_potential(&experiment.potential, segments)?;
    v0s.iter()
        .map(|&v0| {
            let dynamic = experiment.measure(v0)?;
            let (r_tm, t_tm) = transfer_matrix_rt(v0, &pw)?;
            Ok(OracleRow { k_or_v0: v0, r_dyn: dynamic.rtl.r, t_dyn: dynamic.rtl.t, r_tm, t_tm })
        })
        .collect()
}

/// Closed-form transmission of a square well of depth `depth` and width
/// `width` at wavenumber `k` (dispersion `E = k²`).
pub fn square_well_transmission(k: f64, depth: f64, width: f64) -> f64 {
    let q = (k * k + depth).sqrt();
    let s = (q * width).sin();
    1.0 / (1.0 + depth * depth * s * s / (4.0 * k * k * (k * k + depth)))
}
