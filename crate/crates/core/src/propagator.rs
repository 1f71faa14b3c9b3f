//! Exact linear flow `e^{t(β∂ₓ³ + i∂ₓ² − (damping + iθ))}` and its
//! representation at rational multiples of π as a finite sum of translates.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{FourierGrid, ModelParams, SpectralField};
use crate::profiles::AnalyticProfile;

/// Per-mode growth rate `m(k) = −i(βk³ + k² + θ) − damping`.
pub fn dispersion_symbol(k: i64, params: &ModelParams) -> Complex64 {
    let kf = k as f64;
    Complex64::new(
        -params.damping,
        -(params.beta * kf * kf * kf + kf * kf + params.theta),
    )
}

/// Floating dispersive phase `−t(βk³ + k²)`.
fn dispersive_phase(k: i64, t: f64, beta: f64) -> f64 {
    let kf = k as f64;
    -t * (beta * kf * kf * kf + kf * kf)
}

/// Evolution time: a plain real, or an exact rational multiple of π.
///
/// Float times carry an absolute phase error of order `|k|³·ε·t` at high
/// wavenumbers; exact rational times reduce the phase modulo 2π in integer
/// arithmetic instead (β integer), which is what revival checks need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Time {
    Real(f64),
    PiRational(RationalTime),
}

impl Time {
    pub fn value(&self) -> f64 {
        match self {
            Time::Real(t) => *t,
            Time::PiRational(rt) => rt.value(),
        }
    }
}

impl From<f64> for Time {
    fn from(t: f64) -> Self {
        Time::Real(t)
    }
}

impl From<RationalTime> for Time {
    fn from(rt: RationalTime) -> Self {
        Time::PiRational(rt)
    }
}

/// Applies the exact multiplier `e^{t·m(k)}` mode by mode.
pub fn linear_evolve(field: &SpectralField, t: impl Into<Time>, params: &ModelParams) -> SpectralField {
    match t.into() {
        Time::PiRational(rt) if params.integer_beta().is_some() => {
            linear_evolve_rational(field, rt, params).expect("integer β checked")
        }
        t => {
            let t = t.value();
            if t == 0.0 {
                return field.clone();
            }
            let decay = scalar_factor(t, params);
            field.map_modes(|k, c| c * decay * Complex64::from_polar(1.0, dispersive_phase(k, t, params.beta)))
        }
    }
}

fn linear_evolve_rational(
    field: &SpectralField,
    rt: RationalTime,
    params: &ModelParams,
) -> Result<SpectralField> {
    let beta = params.integer_beta().ok_or_else(|| {
        Error::UnsupportedParameters(format!("β = {} is not an integer", params.beta))
    })?;
    let scalar = scalar_factor(rt.value(), params);
    let q2 = 2 * rt.q as i128;
    Ok(field.map_modes(|k, c| {
        let r = reduced_residue(k, beta, rt.p as i128, q2);
        c * scalar * Complex64::from_polar(1.0, -PI * r as f64 / rt.q as f64)
    }))
}

/// `p·(βk³ + k²) mod 2q`, the part of the phase `π p (βk³+k²)/q` that matters.
fn reduced_residue(k: i64, beta: i64, p: i128, q2: i128) -> i128 {
    let km = (k as i128).rem_euclid(q2);
    let cube = (km * km % q2) * km % q2;
    let sym = ((beta as i128).rem_euclid(q2) * cube + km * km) % q2;
    (p.rem_euclid(q2) * sym).rem_euclid(q2)
}

/// `e^{−t(damping + iθ)}`, the non-dispersive prefactor.
pub fn scalar_factor(t: f64, params: &ModelParams) -> Complex64 {
    (Complex64::new(-params.damping, -params.theta) * t).exp()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `t = πp/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalTime {
    p: u64,
    q: u64,
}

impl RationalTime {
    /// Reduces `p/q` to lowest terms.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("rational time needs q >= 1".into()));
        }
        let g = gcd(p, q).max(1);
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        PI * self.p as f64 / self.q as f64
    }
}

/// `e^{tL}f = scalar_factor · Σ_j c_j f(x − 2πj/Q)` with `Q = 2q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevivalRepresentation {
    pub time: RationalTime,
    pub period: usize,
    pub coefficients: Vec<Complex64>,
    pub scalar_factor: Complex64,
}

impl RevivalRepresentation {
    pub fn shift(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.period as f64
    }

    /// `Σ_j c_j e^{-ik·2πj/Q}`: the dispersive multiplier rebuilt from the translates.
    pub fn multiplier(&self, k: i64) -> Complex64 {
        let q = self.period as i64;
        let km = k.rem_euclid(q);
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let r = (km * j as i64).rem_euclid(q);
                c * Complex64::from_polar(1.0, -2.0 * PI * r as f64 / q as f64)
            })
            .sum()
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Translate sum evaluated pointwise on a pointwise profile, `None`
    /// for series profiles.
    pub fn evaluate_profile(&self, profile: &AnalyticProfile, x: f64) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coefficients.iter().enumerate() {
            acc += c * profile.value_at(x - self.shift(j))?;
        }
        Some(acc * self.scalar_factor)
    }
}

type CoeffKey = (u64, u64, i64);

fn coefficient_cache() -> &'static RwLock<HashMap<CoeffKey, Arc<Vec<Complex64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<CoeffKey, Arc<Vec<Complex64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Discrete Gauss sums `c_j = (1/Q) Σ_m e^{−iπ(p/q)(βm³+m²)} e^{2πi jm/Q}`.
pub fn revival_coefficients(rt: RationalTime, params: &ModelParams) -> Result<RevivalRepresentation> {
    let beta = params.integer_beta().ok_or_else(|| {
        Error::UnsupportedParameters(format!(
            "revival needs an integer β, got {}",
            params.beta
        ))
    })?;
    let key = (rt.p, rt.q, beta);
    let cached = coefficient_cache().read().unwrap().get(&key).cloned();
    let coefficients = match cached {
        Some(c) => c,
        None => {
            let c = Arc::new(gauss_sums(rt, beta));
            coefficient_cache().write().unwrap().insert(key, c.clone());
            c
        }
    };
    Ok(RevivalRepresentation {
        time: rt,
        period: coefficients.len(),
        coefficients: coefficients.as_ref().clone(),
        scalar_factor: scalar_factor(rt.value(), params),
    })
}

fn gauss_sums(rt: RationalTime, beta: i64) -> Vec<Complex64> {
    let q = rt.q as i128;
    let period = 2 * q;
    let phases: Vec<Complex64> = (0..period)
        .map(|m| {
            let r = reduced_residue(m as i64, beta, rt.p as i128, period);
            Complex64::from_polar(1.0, -PI * r as f64 / q as f64)
        })
        .collect();
    (0..period)
        .map(|j| {
            let s: Complex64 = phases
                .iter()
                .enumerate()
                .map(|(m, z)| {
                    let r = (j * m as i128) % period;
                    z * Complex64::from_polar(1.0, 2.0 * PI * r as f64 / period as f64)
                })
                .sum();
            s / period as f64
        })
        .collect()
}

/// Rational-time evolution assembled from translates of the profile's
/// closed-form coefficients (translation is a phase on each coefficient).
pub fn revival_evolve(
    profile: &AnalyticProfile,
    rt: RationalTime,
    params: &ModelParams,
    grid: &FourierGrid,
) -> Result<SpectralField> {
    let rep = revival_coefficients(rt, params)?;
    Ok(SpectralField::from_fn(grid, |k| {
        rep.scalar_factor * rep.multiplier(k) * profile.coeff(k)
    }))
}

/// Same translate sum applied to an arbitrary grid field.
pub fn revival_apply(field: &SpectralField, rep: &RevivalRepresentation) -> SpectralField {
    field.map_modes(|k, c| rep.scalar_factor * rep.multiplier(k) * c)
}

/// Largest `|u(x_{j+1}) − u(x_j)|` over consecutive grid points, periodic wrap included.
pub fn max_cell_increment(samples: &[Complex64]) -> f64 {
    let n = samples.len();
    (0..n)
        .map(|j| (samples[(j + 1) % n] - samples[j]).norm())
        .fold(0.0, f64::max)
}

/// Surrogate "irrational" times far from small-denominator rationals.
pub fn irrational_surrogates() -> [f64; 5] {
    let golden = PI * (5f64.sqrt() - 1.0) / 2.0;
    [1.0, 2f64.sqrt(), golden, PI / 2f64.sqrt(), std::f64::consts::E]
}
