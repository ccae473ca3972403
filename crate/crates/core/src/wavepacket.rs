//! One-photon wavefunction on the periodic ξ grid.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::num::{cis, density_sum, Real};

/// Samples of `Φ(ξ, τ′)` with the time stamp `τ′`.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavepacket<T> {
    pub grid: Grid<T>,
    pub amplitudes: Vec<Complex<T>>,
    pub tau: T,
    /// Peak amplitude requested at construction; measurements always use the
    /// normalized packet.
    pub a0: T,
}

/// Gaussian launch parameters, `a0·exp(−(ξ−ξ0)²/w)·exp(i v0 ξ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParams<T> {
    pub a0: T,
    pub xi0: T,
    pub width_param: T,
    pub v0: T,
}

impl<T: Real> GaussianParams<T> {
    /// `A0 = 1`, `ξ0 = −8`, `w = 18`.
    pub fn reference(v0: T) -> Self {
        Self { a0: T::one(), xi0: T::lit(-8.0), width_param: T::lit(18.0), v0 }
    }

    /// Standard deviation of the initial density `|Φ|²`.
    pub fn sigma(&self) -> T {
        self.width_param.sqrt() / T::lit(2.0)
    }
}

/// Moments of `|Φ|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observables<T> {
    pub norm: T,
    pub mean_xi: T,
    pub width_xi: T,
    /// Edge density relative to the peak density.
    pub boundary_density: T,
}

const TAIL_LIMIT: f64 = 1e-8;

pub fn init_gaussian<T: Real>(grid: &Grid<T>, params: &GaussianParams<T>) -> Result<Wavepacket<T>> {
    grid.validate()?;
    let w = params.width_param;
    if !(w > T::zero()) {
        return Err(Error::InvalidConfig { field: "widthParam".into(), reason: "must be > 0".into() });
    }
    let two = T::lit(2.0);
    let edge_distance = (params.xi0 - grid.xi_min).abs().min((grid.xi_max - params.xi0).abs());
    let tail = (-two * edge_distance * edge_distance / w).exp();
    if !(params.xi0 > grid.xi_min && params.xi0 < grid.xi_max) || tail.as_f64() >= TAIL_LIMIT {
        let required = (w * T::lit(-TAIL_LIMIT.ln()) / two).sqrt();
        return Err(Error::PacketTail { tail: tail.as_f64(), required: required.as_f64() });
    }
    let amplitudes = grid
        .points()
        .into_iter()
        .map(|x| {
            let d = x - params.xi0;
            cis(params.v0 * x) * (params.a0 * (-d * d / w).exp())
        })
        .collect();
    let mut psi = Wavepacket { grid: *grid, amplitudes, tau: T::zero(), a0: params.a0 };
    psi.normalize();
    Ok(psi)
}

impl<T: Real> Wavepacket<T> {
    pub fn norm(&self) -> T {
        density_sum(&self.amplitudes) * self.grid.dxi()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > T::zero() {
            let s = norm.sqrt().recip();
            self.amplitudes.iter_mut().for_each(|a| *a = *a * s);
        }
    }

    pub fn density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn boundary_ratio(&self) -> T {
        let peak = self.amplitudes.iter().fold(T::zero(), |m, a| m.max(a.norm_sqr()));
        let edge = self.amplitudes[0].norm_sqr().max(self.amplitudes[self.amplitudes.len() - 1].norm_sqr());
        if peak > T::zero() {
            edge / peak
        } else {
            T::zero()
        }
    }

    pub fn observables(&self) -> Observables<T> {
        let dxi = self.grid.dxi();
        let xs = self.grid.points();
        let (mut s0, mut s1) = (T::zero(), T::zero());
        for (a, &x) in self.amplitudes.iter().zip(&xs) {
            let p = a.norm_sqr();
            s0 = s0 + p;
            s1 = s1 + p * x;
        }
        let mean = if s0 > T::zero() { s1 / s0 } else { T::zero() };
        let s2 = self
            .amplitudes
            .iter()
            .zip(&xs)
            .fold(T::zero(), |acc, (a, &x)| acc + a.norm_sqr() * (x - mean) * (x - mean));
        let width = if s0 > T::zero() { (s2 / s0).sqrt() } else { T::zero() };
        Observables { norm: s0 * dxi, mean_xi: mean, width_xi: width, boundary_density: self.boundary_ratio() }
    }

    /// Integral of `|Φ|²` over samples with `lo <= ξ < hi`.
    pub fn partial_norm(&self, lo: T, hi: T) -> T {
        let dxi = self.grid.dxi();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let x = self.grid.point(*j);
                x >= lo && x < hi
            })
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr())
            * dxi
    }

    /// `⟨self|other⟩` with the grid quadrature.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let dxi = self.grid.dxi();
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
            * dxi
    }

    pub fn conjugated(&self) -> Self {
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a = a.conj());
        out
    }

    /// Relative L² distance `‖self − other‖/‖other‖`.
    pub fn relative_l2(&self, other: &Self) -> T {
        let mut diff = T::zero();
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            diff = diff + (a - b).norm_sqr();
        }
        (diff / density_sum(&other.amplitudes)).sqrt()
    }
}
