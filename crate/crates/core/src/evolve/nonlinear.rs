//! Spectral evaluation of the cubic term `|u|²u`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{FourierGrid, SpectralField};

/// How the cubic product is protected against aliasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dealias {
    /// Interactions among modes `|k| < n/3` only, products formed alias-free on
    /// a zero-padded grid. The mean-field part `2‖û‖²û` acts on every mode.
    TwoThirds,
    /// Plain pointwise product on the grid (aliased).
    None,
}

impl std::str::FromStr for Dealias {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-thirds" => Ok(Dealias::TwoThirds),
            "none" => Ok(Dealias::None),
            _ => Err(format!("unknown dealias mode `{s}` (expected two-thirds|none)")),
        }
    }
}

fn padded_grid(n: usize) -> FourierGrid {
    static CACHE: OnceLock<Mutex<HashMap<usize, FourierGrid>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| FourierGrid::new(2 * n).expect("even padded size"))
        .clone()
}

/// Exact triple sum `T(û)(k) = Σ_{k₁,k₂} û(k₁) conj(û(k₂)) û(k − k₁ + k₂)` for every
/// wavenumber on the grid.
///
/// Evaluated as a pointwise product on a grid of `2n` points: the product of
/// three band-limited factors then has no alias landing on `|k| ≤ n/2`.
pub fn triple_convolution(field: &SpectralField) -> SpectralField {
    let grid = field.grid();
    let n = grid.n_modes();
    let pad = padded_grid(n);
    let m = pad.n_modes();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, &c) in field.coeffs().iter().enumerate() {
        let k = grid.wavenumber(i);
        buf[pad.index_of(k).expect("padded grid covers band")] = c;
    }
    pad.fft_inverse(&mut buf);
    // physical values carry 1/2π; the plain triple sum is (2π)² times the
    // transform of |u|²u, which leaves a net factor 2π/m·(2π)²/(2π)³ = 1/m
    for z in buf.iter_mut() {
        *z *= z.norm_sqr();
    }
    pad.fft_forward(&mut buf);
    let scale = 1.0 / m as f64;
    SpectralField::from_fn(grid, |k| buf[pad.index_of(k).unwrap()] * scale)
}

/// Dealiased spectral coefficients of `|u|²u` under the unnormalized transform.
#[derive(Debug, Clone)]
pub struct CubicTerm {
    grid: FourierGrid,
    dealias: Dealias,
}

impl CubicTerm {
    pub fn new(grid: &FourierGrid, dealias: Dealias) -> Self {
        Self {
            grid: grid.clone(),
            dealias,
        }
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    /// Zeroes wavenumbers outside the interaction band.
    pub fn project(&self, field: &SpectralField) -> SpectralField {
        match self.dealias {
            Dealias::None => field.clone(),
            Dealias::TwoThirds => {
                let cut = self.grid.two_thirds_cutoff();
                field.map_modes(|k, c| if k.abs() <= cut { c } else { Complex64::new(0.0, 0.0) })
            }
        }
    }

    /// `eval(u) − 2‖û‖²û/(2π)²`: the cubic term with the mean-field rotation removed.
    pub fn eval_non_mean(&self, field: &SpectralField) -> SpectralField {
        let inv = 1.0 / (4.0 * PI * PI);
        match self.dealias {
            Dealias::None => {
                let full = self.eval(field);
                let mean = 2.0 * field.l2sq_coeffs() * inv;
                let coeffs = full
                    .coeffs()
                    .iter()
                    .zip(field.coeffs())
                    .map(|(&c, &u)| c - u * mean)
                    .collect();
                SpectralField::from_coeffs(&self.grid, coeffs).expect("grid-sized")
            }
            Dealias::TwoThirds => {
                let w = self.project(field);
                let t = self.project(&triple_convolution(&w));
                let mean_w = 2.0 * w.l2sq_coeffs();
                let coeffs = t
                    .coeffs()
                    .iter()
                    .zip(w.coeffs())
                    .map(|(&tk, &wk)| (tk - wk * mean_w) * inv)
                    .collect();
                SpectralField::from_coeffs(&self.grid, coeffs).expect("grid-sized")
            }
        }
    }

    pub fn eval(&self, field: &SpectralField) -> SpectralField {
        match self.dealias {
            Dealias::None => {
                let mut u = field.to_samples();
                for z in u.iter_mut() {
                    *z *= z.norm_sqr();
                }
                crate::grid::to_spectral(&self.grid, &u).expect("grid-sized samples")
            }
            Dealias::TwoThirds => {
                let w = self.project(field);
                let t = self.project(&triple_convolution(&w));
                let inv = 1.0 / (4.0 * PI * PI);
                let mean_w = 2.0 * w.l2sq_coeffs();
                let mean_u = 2.0 * field.l2sq_coeffs();
                let coeffs = t
                    .coeffs()
                    .iter()
                    .zip(w.coeffs())
                    .zip(field.coeffs())
                    .map(|((&tk, &wk), &uk)| (tk - wk * mean_w + uk * mean_u) * inv)
                    .collect();
                SpectralField::from_coeffs(&self.grid, coeffs).expect("grid-sized")
            }
        }
    }
}
