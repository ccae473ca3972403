//! Sampled dimensionless defect potential.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::Real;

/// Complex dimensionless potential `Ṽ(ξ) = V(R0·ξ)/V0` on an ordered set of
/// ξ samples, together with its depth and absorption diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectPotential<T> {
    xi: Vec<T>,
    values: Vec<Complex<T>>,
    xi_g: T,
    depth: T,
    im_ratio: T,
}

impl<T: Real> DefectPotential<T> {
    /// Wraps samples; `xi` must be strictly increasing and match `values` in length.
    pub fn new(xi: Vec<T>, values: Vec<Complex<T>>, xi_g: T) -> Result<Self> {
        if xi.len() != values.len() || xi.is_empty() {
            return Err(Error::InvalidGrid(format!(
                "{} positions for {} potential samples",
                xi.len(),
                values.len()
            )));
        }
        if xi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("positions must be strictly increasing".into()));
        }
        let (depth, im_ratio) = well_diagnostics(&values);
        Ok(Self { xi, values, xi_g, depth, im_ratio })
    }

    pub fn from_real(xi: Vec<T>, values: &[T], xi_g: T) -> Result<Self> {
        let values = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        Self::new(xi, values, xi_g)
    }

    pub fn zero(xi: Vec<T>, xi_g: T) -> Result<Self> {
        let values = vec![Complex::new(T::zero(), T::zero()); xi.len()];
        Self::new(xi, values, xi_g)
    }

    /// Samples a real shape function on `xi`.
    pub fn from_fn(xi: Vec<T>, xi_g: T, f: impl Fn(T) -> T) -> Result<Self> {
        let values: Vec<T> = xi.iter().map(|&x| f(x)).collect();
        Self::from_real(xi, &values, xi_g)
    }

    pub fn xi(&self) -> &[T] {
        &self.xi
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn real_values(&self) -> Vec<T> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Defect center in ξ units.
    pub fn xi_g(&self) -> T {
        self.xi_g
    }

    /// `−min Re Ṽ`, clamped at zero for purely repulsive profiles.
    pub fn depth(&self) -> T {
        self.depth
    }

    /// `|Im Ṽ| / |Re Ṽ|` at the minimum of `Re Ṽ`.
    pub fn im_ratio(&self) -> T {
        self.im_ratio
    }

    pub fn is_dispersive(&self, threshold: T) -> bool {
        self.im_ratio < threshold
    }

    /// `max |Im Ṽ| / max |Re Ṽ|` over the whole profile.
    pub fn global_im_ratio(&self) -> T {
        let (mut re, mut im) = (T::zero(), T::zero());
        for v in &self.values {
            re = re.max(v.re.abs());
            im = im.max(v.im.abs());
        }
        if re > T::zero() {
            im / re
        } else {
            T::zero()
        }
    }

    /// Index of the sample with the smallest real part.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.re < self.values[best].re {
                best = i;
            }
        }
        best
    }

    /// Multiplies every sample (real and imaginary parts) by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let values: Vec<_> = self.values.iter().map(|v| v * factor).collect();
        let (depth, im_ratio) = well_diagnostics(&values);
        Self { xi: self.xi.clone(), values, xi_g: self.xi_g, depth, im_ratio }
    }

    /// Sets the deepest sample's real part to `value` so calibrated depths are
    /// exact rather than off by a rounding ulp.
    pub(crate) fn pin_minimum(&mut self, value: T) {
        if self.values.is_empty() || value >= T::zero() {
            if value == T::zero() {
                self.values.iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
                self.depth = T::zero();
                self.im_ratio = T::zero();
            }
            return;
        }
        let j = self.argmin();
        let scale = value / self.values[j].re;
        self.values[j] = Complex::new(value, self.values[j].im * scale);
        self.depth = -value;
    }

    /// Same samples with the imaginary part removed.
    pub fn real_only(&self) -> Self {
        let values: Vec<_> = self.values.iter().map(|v| Complex::new(v.re, T::zero())).collect();
        Self { xi: self.xi.clone(), values, xi_g: self.xi_g, depth: self.depth, im_ratio: T::zero() }
    }

    /// Linear interpolation of `Re Ṽ`; zero outside the sampled range.
    pub fn real_at(&self, x: T) -> T {
        let n = self.xi.len();
        if n == 1 {
            return if x == self.xi[0] { self.values[0].re } else { T::zero() };
        }
        if x < self.xi[0] || x > self.xi[n - 1] {
            return T::zero();
        }
        let hi = self.xi.partition_point(|&p| p < x).clamp(1, n - 1);
        let lo = hi - 1;
        let w = (x - self.xi[lo]) / (self.xi[hi] - self.xi[lo]);
        self.values[lo].re * (T::one() - w) + self.values[hi].re * w
    }
}

fn well_diagnostics<T: Real>(values: &[Complex<T>]) -> (T, T) {
    let Some(min) = values.iter().min_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return (T::zero(), T::zero());
    };
    let depth = (-min.re).max(T::zero());
    let ratio = if min.re != T::zero() { min.im.abs() / min.re.abs() } else { T::zero() };
    (depth, ratio)
}
