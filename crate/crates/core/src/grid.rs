use crate::error::{Error, Result};
use crate::num::Real;

/// Periodic ξ grid and time step of the dimensionless evolution.
///
/// Samples sit at `xi_min + j·dξ`, `j = 0..n`; `xi_max` is the periodic image
/// of `xi_min` and is not sampled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    pub xi_min: T,
    pub xi_max: T,
    pub n: usize,
    pub d_tau: T,
}

impl<T: Real> Default for Grid<T> {
    fn default() -> Self {
        Self { xi_min: T::lit(-40.0), xi_max: T::lit(40.0), n: 4096, d_tau: T::lit(1e-4) }
    }
}

impl<T: Real> Grid<T> {
    pub fn new(xi_min: T, xi_max: T, n: usize, d_tau: T) -> Result<Self> {
        let grid = Self { xi_min, xi_max, n, d_tau };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi_max > self.xi_min) || !self.xi_min.is_finite() || !self.xi_max.is_finite() {
            return Err(Error::InvalidGrid(format!("need xi_min < xi_max, got [{}, {}]", self.xi_min, self.xi_max)));
        }
        if self.n < 256 || !self.n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n must be a power of two >= 256, got {}", self.n)));
        }
        if !(self.d_tau > T::zero()) || !self.d_tau.is_finite() {
            return Err(Error::InvalidGrid(format!("d_tau must be > 0, got {}", self.d_tau)));
        }
        Ok(())
    }

    pub fn length(&self) -> T {
        self.xi_max - self.xi_min
    }

    pub fn dxi(&self) -> T {
        self.length() / T::from_usize_lossy(self.n)
    }

    pub fn point(&self, j: usize) -> T {
        self.xi_min + self.dxi() * T::from_usize_lossy(j)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<T> {
        let dk = T::TAU() / self.length();
        let half = self.n / 2;
        (0..self.n)
            .map(|j| {
                if j < half {
                    dk * T::from_usize_lossy(j)
                } else {
                    -dk * T::from_usize_lossy(self.n - j)
                }
            })
            .collect()
    }

    /// Largest resolved wavenumber, `π/dξ`.
    pub fn k_max(&self) -> T {
        T::PI() / self.dxi()
    }

    /// Requires `π/dξ ≥ 4·(v0 + √depth)`.
    pub fn check_nyquist(&self, v0: T, depth: T) -> Result<()> {
        let required = T::lit(4.0) * (v0.abs() + depth.max(T::zero()).sqrt());
        if self.k_max() < required {
            return Err(Error::Nyquist {
                k_max: self.k_max().as_f64(),
                required: required.as_f64(),
                v0: v0.as_f64(),
                depth: depth.as_f64(),
            });
        }
        Ok(())
    }

    /// Sample positions equal to `xi` within half a spacing.
    pub fn same_points(&self, xi: &[T]) -> bool {
        if xi.len() != self.n {
            return false;
        }
        let tol = self.dxi() * T::lit(0.5);
        (self.point(0) - xi[0]).abs() < tol && (self.point(self.n - 1) - xi[self.n - 1]).abs() < tol
    }
}
