//! Periodic grid on the torus `[0, 2π)` and the Fourier convention shared by
//! every other module.
//!
//! Analysis is unnormalized, `û(k) = ∫₀^{2π} e^{-ikx} u(x) dx`, realized by the
//! trapezoid rule `û(k) = (2π/n) Σ_j u(x_j) e^{-ik x_j}`. Synthesis carries the
//! `1/(2π)`: `u(x) = (1/2π) Σ_k û(k) e^{ikx}`. With this convention
//! `Σ_k |û(k)|² = 2π ‖u‖²_{L²}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct FourierGrid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid").field("n_modes", &self.n).finish()
    }
}

impl PartialEq for FourierGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for FourierGrid {}

impl FourierGrid {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes < 4 || n_modes % 2 != 0 {
            return Err(Error::GridSize(n_modes));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n: n_modes,
            forward: planner.plan_fft_forward(n_modes),
            inverse: planner.plan_fft_inverse(n_modes),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.spacing() * j as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Wavenumber stored at FFT-order index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Storage index of wavenumber `k`, if it is on the grid.
    #[inline]
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Largest retained |k| under the two-thirds truncation (`|k| < n/3`).
    pub fn two_thirds_cutoff(&self) -> i64 {
        ((self.n - 1) / 3) as i64
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }
}

pub fn make_grid(n_modes: usize) -> Result<FourierGrid> {
    FourierGrid::new(n_modes)
}

/// Fourier coefficients of a periodic function, stored in FFT order.
///
/// The Nyquist coefficient is held at zero by every constructor and operation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: FourierGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &FourierGrid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_modes()],
        }
    }

    /// Wraps coefficients given in FFT order; the Nyquist entry is cleared.
    pub fn from_coeffs(grid: &FourierGrid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_modes() {
            return Err(Error::LengthMismatch {
                expected: grid.n_modes(),
                got: coeffs.len(),
            });
        }
        coeffs[grid.nyquist_index()] = Complex64::new(0.0, 0.0);
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Builds a field from a closed-form coefficient map evaluated at every
    /// grid wavenumber except the Nyquist one.
    pub fn from_fn(grid: &FourierGrid, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let nyq = grid.nyquist_index();
        let coeffs = (0..grid.n_modes())
            .map(|i| {
                if i == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(grid.wavenumber(i))
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn n_modes(&self) -> usize {
        self.grid.n_modes()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at wavenumber `k`; zero off the grid.
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.grid
            .index_of(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Applies `f(k, c)` to every coefficient and re-clears the Nyquist mode.
    pub fn map_modes(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let grid = &self.grid;
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(grid.wavenumber(i), c))
            .collect();
        coeffs[grid.nyquist_index()] = Complex64::new(0.0, 0.0);
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map_modes(|_, c| c * factor)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.n_modes(), other.n_modes()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            coeffs,
        })
    }

    /// `Σ_k |û(k)|²`.
    pub fn l2sq_coeffs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Physical `‖u‖²_{L²(𝕋)}`, equal to `Σ|û|² / 2π`.
    pub fn l2sq(&self) -> f64 {
        self.l2sq_coeffs() / (2.0 * PI)
    }

    /// `∫ f ū dx` computed spectrally as `(1/2π) Σ f̂ conj(û)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.n_modes(), other.n_modes()));
        }
        let s: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s / (2.0 * PI))
    }

    /// True when `conj(û(k)) = û(-k)` to within `tol` (relative to the largest coefficient).
    pub fn is_real_valued(&self, tol: f64) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        let half = (self.n_modes() / 2) as i64;
        (-half + 1..half).all(|k| (self.coeff(k).conj() - self.coeff(-k)).norm() <= tol * scale)
    }

    /// Re-expresses the field on another grid by zero padding or truncation.
    pub fn resample(&self, target: &FourierGrid) -> Self {
        SpectralField::from_fn(target, |k| self.coeff(k))
    }

    pub fn to_samples(&self) -> Vec<Complex64> {
        from_spectral(self)
    }
}

/// Analysis transform of point samples `u(x_j)`.
pub fn to_spectral(grid: &FourierGrid, samples: &[Complex64]) -> Result<SpectralField> {
    if samples.len() != grid.n_modes() {
        return Err(Error::LengthMismatch {
            expected: grid.n_modes(),
            got: samples.len(),
        });
    }
    let mut buf = samples.to_vec();
    grid.fft_forward(&mut buf);
    let h = grid.spacing();
    for c in buf.iter_mut() {
        *c *= h;
    }
    SpectralField::from_coeffs(grid, buf)
}

/// Same as [`to_spectral`] for real samples.
pub fn to_spectral_real(grid: &FourierGrid, samples: &[f64]) -> Result<SpectralField> {
    let c: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    to_spectral(grid, &c)
}

/// Synthesis: point values at the grid points.
pub fn from_spectral(field: &SpectralField) -> Vec<Complex64> {
    let mut buf = field.coeffs.clone();
    field.grid.fft_inverse(&mut buf);
    let s = 1.0 / (2.0 * PI);
    for c in buf.iter_mut() {
        *c *= s;
    }
    buf
}

/// Forcing term of the model.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    /// The initial datum doubles as the forcing, as in the model equation.
    TiedToInitial,
    Field(SpectralField),
    Off,
}

/// Coefficients of `∂ₜu = β∂ₓ³u + i∂ₓ²u − (damping + iθ)u + i|u|²u + f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub beta: f64,
    pub theta: f64,
    pub damping: f64,
    pub nonlinearity_on: bool,
    pub forcing: Forcing,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            theta: 0.0,
            damping: 1.0,
            nonlinearity_on: true,
            forcing: Forcing::TiedToInitial,
        }
    }
}

impl ModelParams {
    pub fn with_beta(beta: f64) -> Self {
        Self {
            beta,
            ..Self::default()
        }
    }

    /// Linear, unforced flow (the propagator alone).
    pub fn linear_only(beta: f64) -> Self {
        Self {
            beta,
            nonlinearity_on: false,
            forcing: Forcing::Off,
            ..Self::default()
        }
    }

    pub fn integer_beta(&self) -> Option<i64> {
        (self.beta.fract() == 0.0 && self.beta.is_finite()).then_some(self.beta as i64)
    }

    /// Forcing field resolved against the initial datum.
    pub fn forcing_field(&self, initial: &SpectralField) -> Result<Option<SpectralField>> {
        match &self.forcing {
            Forcing::TiedToInitial => Ok(Some(initial.clone())),
            Forcing::Field(f) => {
                if f.grid() != initial.grid() {
                    return Err(Error::GridMismatch(f.n_modes(), initial.n_modes()));
                }
                Ok(Some(f.clone()))
            }
            Forcing::Off => Ok(None),
        }
    }
}

/// Orders used by the norm diagnostics; each consumer checks its own range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub s: f64,
    pub b: f64,
    pub a: f64,
    pub b_prime: f64,
}

impl NormParams {
    /// `s > 0` and `0 < a < min(2s, 1)`: the range where the Duhamel part gains `a` derivatives.
    pub fn smoothing_admissible(&self) -> bool {
        self.s > 0.0 && self.a > 0.0 && self.a < (2.0 * self.s).min(1.0)
    }

    /// `1/3 < b' ≤ 5/8`: the range of the trilinear estimate.
    pub fn trilinear_admissible(&self) -> bool {
        self.b_prime > 1.0 / 3.0 && self.b_prime <= 5.0 / 8.0
    }
}
