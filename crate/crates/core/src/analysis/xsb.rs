//! Discretized Bourgain norms on a finite, tapered time window.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};

use super::{bracket, smooth_step};
use crate::error::{Error, Result};
use crate::grid::{from_spectral, to_spectral, FourierGrid, SpectralField};

/// Time window applied before the time transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Taper {
    /// Samples used as given.
    None,
    /// Smooth ramps of the given fraction of the window at each end, 1 in between.
    Plateau { ramp: f64 },
}

impl Taper {
    /// Weight at `t` inside `[a, b]`; exactly 0 at both endpoints for `Plateau`.
    pub fn weight(&self, t: f64, a: f64, b: f64) -> f64 {
        match *self {
            Taper::None => 1.0,
            Taper::Plateau { ramp } => {
                let r = ramp * (b - a);
                smooth_step((t - a) / r).min(smooth_step((b - t) / r))
            }
        }
    }
}

/// Spectral frames `f̂(t_i, ·)` at `t_i = t_start + i·dt`, `i = 0..n_t`.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: FourierGrid,
    t_start: f64,
    dt: f64,
    frames: Vec<SpectralField>,
    taper: Taper,
    beta: f64,
}

impl SpaceTimeField {
    /// Frames on the window `[t_start, t_start + (n_t − 1)·dt]`; the taper is applied to
    /// the stored frames at construction.
    pub fn new(t_start: f64, dt: f64, frames: Vec<SpectralField>, taper: Taper) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::TooFewFrames { needed: 2, have: frames.len() });
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        let grid = frames[0].grid().clone();
        if let Some(f) = frames.iter().find(|f| f.grid() != &grid) {
            return Err(Error::GridMismatch(f.n_modes(), grid.n_modes()));
        }
        let b = t_start + dt * (frames.len() - 1) as f64;
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.scale(Complex64::new(taper.weight(t_start + dt * i as f64, t_start, b), 0.0)))
            .collect();
        Ok(Self {
            grid,
            t_start,
            dt,
            frames,
            taper,
            beta: 1.0,
        })
    }

    /// Samples `f(t, x)` on the space grid at `n_t` times.
    pub fn from_fn(
        grid: &FourierGrid,
        window: (f64, f64),
        n_t: usize,
        taper: Taper,
        f: impl Fn(f64, f64) -> Complex64 + Sync,
    ) -> Result<Self> {
        let dt = (window.1 - window.0) / (n_t.max(2) - 1) as f64;
        let xs = grid.points();
        let frames = crate::par::map_range(n_t, |i| {
            let t = window.0 + dt * i as f64;
            let s: Vec<Complex64> = xs.iter().map(|&x| f(t, x)).collect();
            to_spectral(grid, &s).expect("grid-sized")
        });
        Self::new(window.0, dt, frames, taper)
    }

    /// Dispersion coefficient in the weight `⟨τ + βk³ + k²⟩`.
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn n_times(&self) -> usize {
        self.frames.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_start, self.t_start + self.dt * (self.frames.len() - 1) as f64)
    }

    pub fn taper(&self) -> Taper {
        self.taper
    }

    pub fn frames(&self) -> &[SpectralField] {
        &self.frames
    }

    /// Largest `|τ|` the time grid represents.
    pub fn tau_max(&self) -> f64 {
        PI / self.dt
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.frames = self.frames.iter().map(|f| f.scale(Complex64::new(factor, 0.0))).collect();
        out
    }

    /// Pointwise product `u·v·w` frame by frame (no taper is reapplied).
    pub fn product(u: &Self, v: &Self, w: &Self) -> Result<Self> {
        for o in [v, w] {
            if o.grid != u.grid {
                return Err(Error::GridMismatch(o.grid.n_modes(), u.grid.n_modes()));
            }
            if o.frames.len() != u.frames.len() || o.dt != u.dt || o.t_start != u.t_start {
                return Err(Error::InvalidArgument("space-time fields on different time grids".into()));
            }
        }
        let frames = crate::par::map_range(u.frames.len(), |i| {
            let (a, b, c) = (
                from_spectral(&u.frames[i]),
                from_spectral(&v.frames[i]),
                from_spectral(&w.frames[i]),
            );
            let p: Vec<Complex64> = (0..a.len()).map(|j| a[j] * b[j] * c[j]).collect();
            to_spectral(&u.grid, &p).expect("grid-sized")
        });
        Ok(Self {
            frames,
            ..u.clone()
        })
    }
}

fn time_plan(n: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(n)
}

/// `(Σ_k Σ_τ Δτ ⟨k⟩^{2s} ⟨τ + βk³ + k²⟩^{2b} |f̃(τ, k)|²)^{1/2}` where
/// `f̃(τ, k) = Δt Σ_i e^{−iτ t_i} f̂(t_i, k)` on the centered frequencies
/// `τ_ℓ = 2πℓ/(n_t Δt)`.
pub fn xsb_norm(stf: &SpaceTimeField, s: f64, b: f64) -> f64 {
    let nt = stf.frames.len();
    let plan = time_plan(nt);
    let dtau = 2.0 * PI / (nt as f64 * stf.dt);
    let ks = stf.grid.wavenumbers();
    let per_mode = crate::par::map_range(ks.len(), |idx| {
        let k = ks[idx];
        let mut line: Vec<Complex64> = stf.frames.iter().map(|f| f.coeffs()[idx]).collect();
        if line.iter().all(|c| c.norm_sqr() == 0.0) {
            return 0.0;
        }
        plan.process(&mut line);
        let kf = k as f64;
        let disp = stf.beta * kf.powi(3) + kf * kf;
        let wk = bracket(kf).powf(2.0 * s);
        line.iter()
            .enumerate()
            .map(|(m, c)| {
                let l = if m < nt.div_ceil(2) { m as f64 } else { m as f64 - nt as f64 };
                let tau = l * dtau;
                bracket(tau + disp).powf(2.0 * b) * (c * stf.dt).norm_sqr()
            })
            .sum::<f64>()
            * wk
    });
    (dtau * per_mode.iter().sum::<f64>()).sqrt()
}

/// `‖uvw‖_{X^{s,b′−1}} / (‖u‖_{X^{s,3/8}} ‖v‖_{X^{s,3/8}} ‖w‖_{X^{s,3/8}})`.
pub fn trilinear_ratio(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    w: &SpaceTimeField,
    s: f64,
    b_prime: f64,
) -> Result<f64> {
    let den: f64 = [u, v, w].iter().map(|f| xsb_norm(f, s, 3.0 / 8.0)).product();
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Degenerate("zero denominator in trilinear ratio".into()));
    }
    let uvw = SpaceTimeField::product(u, v, w)?;
    Ok(xsb_norm(&uvw, s, b_prime - 1.0) / den)
}

/// Random superposition of free waves `Σ_{|k| ≤ k_max} a_k e^{i(kx − (βk³ + k²)t)}`
/// with `|a_k|` of order `⟨k⟩^{−decay}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeWaveSpec {
    pub k_max: i64,
    pub decay: f64,
    pub window: (f64, f64),
    pub n_t: usize,
    pub taper: Taper,
    pub beta: f64,
}

impl FreeWaveSpec {
    /// `k_max = n/8` with a time step resolving triple products of such waves.
    pub fn for_grid(grid: &FourierGrid) -> Self {
        let k_max = (grid.n_modes() / 8) as i64;
        let k = k_max as f64;
        let window = (0.0, 1.0);
        // π/Δt at least 1.5 times the largest product frequency 3(K³ + K²)
        let need = 1.5 * 3.0 * (k.powi(3) + k * k) * (window.1 - window.0) / PI;
        let n_t = (need.ceil() as usize + 1).next_power_of_two();
        Self {
            k_max,
            decay: 1.0,
            window,
            n_t,
            taper: Taper::Plateau { ramp: 0.25 },
            beta: 1.0,
        }
    }
}

/// One seeded draw: uniform samples from the unit square of ℂ scaled by
/// `⟨k⟩^{−decay}`, drawn in the order `0, 1, −1, 2, −2, …` so that a larger
/// `k_max` extends the same series.
pub fn random_free_wave<R: Rng>(grid: &FourierGrid, spec: &FreeWaveSpec, rng: &mut R) -> Result<SpaceTimeField> {
    if spec.k_max >= (grid.n_modes() / 2) as i64 {
        return Err(Error::InvalidArgument(format!(
            "k_max = {} must be below n/2 = {}",
            spec.k_max,
            grid.n_modes() / 2
        )));
    }
    let order = std::iter::once(0).chain((1..=spec.k_max).flat_map(|k| [k, -k]));
    let amps: Vec<(i64, Complex64)> = order
        .map(|k| {
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (k, a * super::bracket(k as f64).powf(-spec.decay))
        })
        .collect();
    free_wave(grid, spec, &amps)
}

/// Free waves with given amplitudes (coefficient `2π·a_k` at mode `k`).
pub fn free_wave(grid: &FourierGrid, spec: &FreeWaveSpec, amps: &[(i64, Complex64)]) -> Result<SpaceTimeField> {
    let dt = (spec.window.1 - spec.window.0) / (spec.n_t - 1) as f64;
    let frames = crate::par::map_range(spec.n_t, |i| {
        let t = spec.window.0 + dt * i as f64;
        let mut c = vec![Complex64::new(0.0, 0.0); grid.n_modes()];
        for &(k, a) in amps {
            let kf = k as f64;
            let idx = grid.index_of(k).expect("k below Nyquist");
            c[idx] += a * Complex64::from_polar(2.0 * PI, -(spec.beta * kf.powi(3) + kf * kf) * t);
        }
        SpectralField::from_coeffs(grid, c).expect("grid-sized")
    });
    Ok(SpaceTimeField::new(spec.window.0, dt, frames, spec.taper)?.with_beta(spec.beta))
}
