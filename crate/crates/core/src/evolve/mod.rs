//! Time integration of the forced, damped cubic equation with third-order
//! dispersion. The linear part `e^{dt·m(k)}` is applied exactly; only the
//! cubic term goes through the integrator's stages.

mod nonlinear;
pub mod phi;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use nonlinear::{triple_convolution, CubicTerm, Dealias};

use crate::error::{Error, Result};
use crate::grid::{FourierGrid, ModelParams, SpectralField};
use crate::profiles::AnalyticProfile;
use crate::propagator::dispersion_symbol;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Magnitude beyond which a coefficient counts as overflow.
const BLOWUP_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Fourth-order exponential Runge–Kutta (Cox–Matthews).
    Etd4,
    /// Strang splitting: exact linear half steps around an RK4 cubic step.
    Strang2,
}

impl Scheme {
    pub fn order(&self) -> u32 {
        match self {
            Scheme::Etd4 => 4,
            Scheme::Strang2 => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Etd4 => "etd4",
            Scheme::Strang2 => "strang2",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "etd4" => Ok(Scheme::Etd4),
            "strang2" => Ok(Scheme::Strang2),
            _ => Err(format!("unknown scheme `{s}` (expected etd4|strang2)")),
        }
    }
}

/// Rate of the gauge phase: `Φ'(t) = ‖u‖²_{L²}/π = 2‖û‖²_{ℓ²}/(2π)²`. This is the
/// coefficient of the mean-field term of `|u|²u` under the unnormalized transform.
pub fn gauge_rate(field: &SpectralField) -> f64 {
    field.l2sq() / PI
}

/// Precomputed per-mode weights for one step size.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: FourierGrid,
    dt: f64,
    scheme: Scheme,
    nonlinear: bool,
    cubic: CubicTerm,
    forcing: Option<SpectralField>,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    // (h/2)·φ₁(h·m/2)
    phi_half: Vec<Complex64>,
    // h·(φ₁ − 3φ₂ + 4φ₃), h·(φ₂ − 2φ₃), h·(−φ₂ + 4φ₃)
    w1: Vec<Complex64>,
    w2: Vec<Complex64>,
    w3: Vec<Complex64>,
}

impl Stepper {
    pub fn new(
        grid: &FourierGrid,
        params: &ModelParams,
        dt: f64,
        scheme: Scheme,
        dealias: Dealias,
        forcing: Option<SpectralField>,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if let Some(f) = &forcing {
            if f.grid() != grid {
                return Err(Error::GridMismatch(f.n_modes(), grid.n_modes()));
            }
        }
        let n = grid.n_modes();
        let mut s = Self {
            grid: grid.clone(),
            dt,
            scheme,
            nonlinear: params.nonlinearity_on,
            cubic: CubicTerm::new(grid, dealias),
            forcing,
            e_full: Vec::with_capacity(n),
            e_half: Vec::with_capacity(n),
            phi_half: Vec::with_capacity(n),
            w1: Vec::with_capacity(n),
            w2: Vec::with_capacity(n),
            w3: Vec::with_capacity(n),
        };
        for k in grid.wavenumbers() {
            let z = dispersion_symbol(k, params) * dt;
            let [p1, p2, p3] = phi::phi123(z);
            s.e_full.push(z.exp());
            s.e_half.push((z * 0.5).exp());
            s.phi_half.push(phi::phi1(z * 0.5) * (dt * 0.5));
            s.w1.push((p1 - 3.0 * p2 + 4.0 * p3) * dt);
            s.w2.push((p2 - 2.0 * p3) * dt);
            s.w3.push((4.0 * p3 - p2) * dt);
        }
        Ok(s)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn cubic(&self) -> &CubicTerm {
        &self.cubic
    }

    fn rate(&self, u: &SpectralField) -> f64 {
        if self.nonlinear {
            gauge_rate(u)
        } else {
            0.0
        }
    }

    /// Right-hand side in the gauge frame `v = e^{−iΦ}u`:
    /// `i·(cubic(v) − Φ'v) + e^{−iΦ} f̂` together with `Φ' = ‖v‖²/π`.
    fn gauged_rhs(&self, v: &SpectralField, phase: f64) -> (Vec<Complex64>, f64) {
        let mut r = if self.nonlinear {
            self.cubic.eval_non_mean(v).coeffs().iter().map(|c| I * c).collect()
        } else {
            vec![Complex64::new(0.0, 0.0); self.grid.n_modes()]
        };
        if let Some(f) = &self.forcing {
            let rot = Complex64::from_polar(1.0, -phase);
            for (a, b) in r.iter_mut().zip(f.coeffs()) {
                *a += rot * b;
            }
        }
        (r, self.rate(v))
    }

    fn field(&self, coeffs: Vec<Complex64>) -> SpectralField {
        SpectralField::from_coeffs(&self.grid, coeffs).expect("grid-sized")
    }

    /// One step from `u` alone (the gauge phase restarts at zero).
    pub fn step(&self, u: &SpectralField) -> Result<SpectralField> {
        Ok(self.advance(u, 0.0)?.0)
    }

    /// One step of the pair `(u, Φ)`; returns the new field and accumulated phase.
    pub fn advance(&self, u: &SpectralField, phase: f64) -> Result<(SpectralField, f64)> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch(u.n_modes(), self.grid.n_modes()));
        }
        let (next, next_phase) = match self.scheme {
            Scheme::Etd4 => {
                let v = u.scale(Complex64::from_polar(1.0, -phase));
                let (v, p) = self.etd4(&v, phase);
                (v.scale(Complex64::from_polar(1.0, p)), p)
            }
            Scheme::Strang2 => {
                let next = self.strang2(u);
                let p = phase + 0.5 * self.dt * (self.rate(u) + self.rate(&next));
                (next, p)
            }
        };
        let bad = !next_phase.is_finite()
            || next
                .coeffs()
                .iter()
                .any(|c| !c.re.is_finite() || !c.im.is_finite() || c.norm() > BLOWUP_LIMIT);
        if bad {
            return Err(Error::BlowUp {
                time: self.dt,
                partial: None,
            });
        }
        Ok((next, next_phase))
    }

    /// Cox–Matthews ETDRK4 on `(v, Φ)`. The mean-field rotation is exactly
    /// resonant with `e^{tL}` and would be lost by the stage polynomials on stiff
    /// modes, so it is carried by the scalar `Φ` instead.
    fn etd4(&self, v: &SpectralField, phase: f64) -> (SpectralField, f64) {
        let h = self.dt;
        let vc = v.coeffs();
        let (nv, rv) = self.gauged_rhs(v, phase);
        let a: Vec<Complex64> = (0..vc.len())
            .map(|i| self.e_half[i] * vc[i] + self.phi_half[i] * nv[i])
            .collect();
        let a = self.field(a);
        let pa = phase + 0.5 * h * rv;
        let (na, ra) = self.gauged_rhs(&a, pa);
        let b: Vec<Complex64> = (0..vc.len())
            .map(|i| self.e_half[i] * vc[i] + self.phi_half[i] * na[i])
            .collect();
        let b = self.field(b);
        let pb = phase + 0.5 * h * ra;
        let (nb, rb) = self.gauged_rhs(&b, pb);
        let ac = a.coeffs();
        let c: Vec<Complex64> = (0..vc.len())
            .map(|i| self.e_half[i] * ac[i] + self.phi_half[i] * (2.0 * nb[i] - nv[i]))
            .collect();
        let c = self.field(c);
        let pc = pa + 0.5 * h * (2.0 * rb - rv);
        let (nc, rc) = self.gauged_rhs(&c, pc);
        let out = (0..vc.len())
            .map(|i| {
                self.e_full[i] * vc[i]
                    + self.w1[i] * nv[i]
                    + 2.0 * self.w2[i] * (na[i] + nb[i])
                    + self.w3[i] * nc[i]
            })
            .collect();
        // at z = 0 the weights reduce to the classical RK4 ones
        let p = phase + h * (rv + 2.0 * (ra + rb) + rc) / 6.0;
        (self.field(out), p)
    }

    /// `i·cubic(u)` when the nonlinearity is on, zero otherwise.
    fn cubic_rhs(&self, u: &SpectralField) -> Vec<Complex64> {
        if self.nonlinear {
            self.cubic.eval(u).coeffs().iter().map(|c| I * c).collect()
        } else {
            vec![Complex64::new(0.0, 0.0); self.grid.n_modes()]
        }
    }

    /// Exact flow of `∂ₜu = Lu + f` over half a step.
    fn linear_half(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = u.iter().zip(&self.e_half).map(|(a, e)| a * e).collect();
        if let Some(f) = &self.forcing {
            for ((o, p), fk) in out.iter_mut().zip(&self.phi_half).zip(f.coeffs()) {
                *o += p * fk;
            }
        }
        out
    }

    fn strang2(&self, u: &SpectralField) -> SpectralField {
        let half = self.field(self.linear_half(u.coeffs()));
        let mid = if self.nonlinear {
            self.rk4_cubic(&half)
        } else {
            half
        };
        self.field(self.linear_half(mid.coeffs()))
    }

    /// One classical RK4 step of `∂ₜu = i·cubic(u)`.
    fn rk4_cubic(&self, u: &SpectralField) -> SpectralField {
        let h = self.dt;
        let uc = u.coeffs();
        let axpy = |k: &[Complex64], s: f64| -> SpectralField {
            self.field(uc.iter().zip(k).map(|(a, b)| a + b * s).collect())
        };
        let k1 = self.cubic_rhs(u);
        let k2 = self.cubic_rhs(&axpy(&k1, h / 2.0));
        let k3 = self.cubic_rhs(&axpy(&k2, h / 2.0));
        let k4 = self.cubic_rhs(&axpy(&k3, h));
        self.field(
            (0..uc.len())
                .map(|i| uc[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
                .collect(),
        )
    }
}

/// One step from `field`. A forcing tied to the initial datum uses `field` itself.
pub fn step(
    field: &SpectralField,
    dt: f64,
    params: &ModelParams,
    scheme: Scheme,
    dealias: Dealias,
) -> Result<SpectralField> {
    let forcing = params.forcing_field(field)?;
    Stepper::new(field.grid(), params, dt, scheme, dealias, forcing)?.step(field)
}

/// Discretization choices for [`solve`].
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid: FourierGrid,
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias: Dealias,
    /// Store every `stride`-th step.
    pub stride: usize,
    /// When set, overrides `stride` so that exactly this many intervals are stored.
    pub frames: Option<usize>,
}

impl SolverConfig {
    pub fn new(grid: FourierGrid, dt: f64) -> Self {
        Self {
            grid,
            dt,
            scheme: Scheme::Etd4,
            dealias: Dealias::TwoThirds,
            stride: 1,
            frames: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_dealias(mut self, dealias: Dealias) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self.frames = None;
        self
    }

    /// Stores `intervals + 1` equally spaced frames, including both ends.
    pub fn with_frames(mut self, intervals: usize) -> Self {
        self.frames = Some(intervals);
        self
    }
}

/// Stored frames of a run plus the gauge phase `Φ(t) = (1/π)∫₀ᵗ‖u‖²ds`
/// (identically zero when the cubic term is switched off). The fourth-order
/// scheme integrates `Φ` alongside the field; splitting uses the trapezoid rule.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
    pub phase: Vec<f64>,
    /// Step actually used (`t_end` divided by the step count).
    pub dt: f64,
    pub stride: usize,
    pub scheme: Scheme,
    pub dealias: Dealias,
    pub params: ModelParams,
    pub initial: SpectralField,
    pub forcing: Option<SpectralField>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &FourierGrid {
        self.initial.grid()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Index of the stored frame at time `t` (within half a frame spacing).
    pub fn frame_at(&self, t: f64) -> Result<usize> {
        let spacing = self.dt * self.stride as f64;
        if t < -0.5 * spacing || t > self.t_end() + 0.5 * spacing {
            return Err(Error::TimeOutOfRange(t));
        }
        let i = ((t / spacing).round() as usize).min(self.len() - 1);
        Ok(i)
    }
}

/// Integrates from the point-sampled profile.
pub fn solve(
    profile: &AnalyticProfile,
    t_end: f64,
    params: &ModelParams,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    solve_field(profile.sampled_field(&cfg.grid), t_end, params, cfg)
}

/// Integrates from an arbitrary initial field.
///
/// The step count is the smallest multiple of `stride` with step no larger
/// than `cfg.dt`, so the run lands exactly on `t_end`.
pub fn solve_field(
    initial: SpectralField,
    t_end: f64,
    params: &ModelParams,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {t_end}")));
    }
    if cfg.stride == 0 || cfg.frames == Some(0) {
        return Err(Error::InvalidArgument("stride and frame count must be >= 1".into()));
    }
    if initial.grid() != &cfg.grid {
        return Err(Error::GridMismatch(initial.n_modes(), cfg.grid.n_modes()));
    }
    let forcing = params.forcing_field(&initial)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        fields: vec![initial.clone()],
        phase: vec![0.0],
        dt: cfg.dt,
        stride: cfg.stride,
        scheme: cfg.scheme,
        dealias: cfg.dealias,
        params: params.clone(),
        initial: initial.clone(),
        forcing: forcing.clone(),
    };
    if t_end == 0.0 {
        return Ok(traj);
    }
    let raw_steps = (t_end / cfg.dt - 1e-9).ceil().max(1.0) as usize;
    let stride = match cfg.frames {
        Some(m) => raw_steps.div_ceil(m),
        None => cfg.stride,
    };
    let n_steps = raw_steps.div_ceil(stride) * stride;
    let dt = t_end / n_steps as f64;
    traj.dt = dt;
    traj.stride = stride;
    let stepper = Stepper::new(&cfg.grid, params, dt, cfg.scheme, cfg.dealias, forcing)?;

    let mut u = initial;
    let mut phase = 0.0;
    for i in 1..=n_steps {
        let t = dt * i as f64;
        (u, phase) = match stepper.advance(&u, phase) {
            Ok(next) => next,
            Err(Error::BlowUp { .. }) => {
                return Err(Error::BlowUp {
                    time: t,
                    partial: Some(Box::new(traj)),
                })
            }
            Err(e) => return Err(e),
        };
        if i % stride == 0 {
            traj.times.push(t);
            traj.fields.push(u.clone());
            traj.phase.push(phase);
        }
    }
    Ok(traj)
}

/// `‖u‖²` per frame and the residual of the balance law
/// `d/dt‖u‖² = −2·damping·‖u‖² + 2 Re∫ f ū dx` at interior frames.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBalance {
    pub times: Vec<f64>,
    pub l2sq: Vec<f64>,
    /// `None` where the difference stencil does not fit.
    pub residual: Vec<Option<f64>>,
}

impl EnergyBalance {
    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().flatten().map(|r| r.abs()).fold(0.0, f64::max)
    }
}

/// Balance-law residual with the time derivative taken by a centered
/// difference matched to the scheme's order: five points for the
/// fourth-order scheme (where they fit), three otherwise.
pub fn energy_balance_residual(traj: &Trajectory) -> Result<EnergyBalance> {
    let len = traj.len();
    if len < 3 {
        return Err(Error::TooFewFrames { needed: 3, have: len });
    }
    let l2sq: Vec<f64> = traj.fields.iter().map(SpectralField::l2sq).collect();
    let rhs: Vec<f64> = traj
        .fields
        .iter()
        .zip(&l2sq)
        .map(|(u, &e)| {
            let forced = traj
                .forcing
                .as_ref()
                .map_or(0.0, |f| 2.0 * f.inner(u).expect("same grid").re);
            -2.0 * traj.params.damping * e + forced
        })
        .collect();
    let h = traj.dt * traj.stride as f64;
    let five_point = traj.scheme.order() >= 4 && len >= 5;
    let residual = (0..len)
        .map(|i| {
            let d = if five_point {
                if i < 2 || i + 2 >= len {
                    return None;
                }
                (l2sq[i - 2] - 8.0 * l2sq[i - 1] + 8.0 * l2sq[i + 1] - l2sq[i + 2]) / (12.0 * h)
            } else {
                if i == 0 || i + 1 == len {
                    return None;
                }
                (l2sq[i + 1] - l2sq[i - 1]) / (2.0 * h)
            };
            Some(d - rhs[i])
        })
        .collect();
    Ok(EnergyBalance {
        times: traj.times.clone(),
        l2sq,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{from_spectral, make_grid, Forcing};
    use crate::propagator::linear_evolve;

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let g = make_grid(32).unwrap();
        let z = SpectralField::zeros(&g);
        for scheme in [Scheme::Etd4, Scheme::Strang2] {
            let out = step(&z, 0.01, &ModelParams::default(), scheme, Dealias::TwoThirds).unwrap();
            assert!(out.coeffs().iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn forced_linear_mode_matches_closed_form() {
        let g = make_grid(16).unwrap();
        let f = SpectralField::from_fn(&g, |k| match k {
            3 => Complex64::new(0.3, -0.2),
            0 => Complex64::new(1.0, 0.0),
            -1 => Complex64::new(0.5, 0.5),
            _ => Complex64::new(0.0, 0.0),
        });
        let u0 = SpectralField::from_fn(&g, |k| Complex64::new(1.0 / (1.0 + k.abs() as f64), 0.1 * k as f64));
        let params = ModelParams {
            nonlinearity_on: false,
            forcing: Forcing::Field(f.clone()),
            theta: 0.3,
            ..ModelParams::default()
        };
        let dt = 0.05;
        for scheme in [Scheme::Etd4, Scheme::Strang2] {
            let out = step(&u0, dt, &params, scheme, Dealias::TwoThirds).unwrap();
            for k in g.wavenumbers() {
                let m = dispersion_symbol(k, &params);
                let e = (m * dt).exp();
                let expect = e * u0.coeff(k) + (e - 1.0) / m * f.coeff(k);
                assert!((out.coeff(k) - expect).norm() < 1e-10, "{scheme:?} k={k}");
            }
        }
    }

    #[test]
    fn undamped_zero_mode_uses_series_branch() {
        // m = 0 at k = 0 when damping and θ vanish: the update is u + dt·f
        let g = make_grid(8).unwrap();
        let f = SpectralField::from_fn(&g, |k| if k == 0 { Complex64::new(2.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let params = ModelParams {
            damping: 0.0,
            nonlinearity_on: false,
            forcing: Forcing::Field(f),
            ..ModelParams::default()
        };
        let u0 = SpectralField::zeros(&g);
        let out = step(&u0, 0.25, &params, Scheme::Etd4, Dealias::TwoThirds).unwrap();
        assert!((out.coeff(0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trivial_runs() {
        let g = make_grid(32).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let cfg = SolverConfig::new(g.clone(), 0.01);
        let t = solve(&p, 0.0, &ModelParams::default(), &cfg).unwrap();
        assert_eq!(t.len(), 1);
        assert!(solve(&p, -1.0, &ModelParams::default(), &cfg).is_err());

        // forced constant without nonlinearity: u' = -u + c keeps u = c
        let c = AnalyticProfile::from_name("constant", 0.4).unwrap();
        let params = ModelParams {
            nonlinearity_on: false,
            ..ModelParams::default()
        };
        let t = solve(&c, 1.0, &params, &cfg.clone().with_stride(10)).unwrap();
        assert_eq!(t.len(), 11);
        for f in &t.fields {
            assert!(max_diff(f, &t.initial) < 1e-13);
        }
    }

    #[test]
    fn unforced_linear_solve_is_the_propagator() {
        let g = make_grid(128).unwrap();
        let p = AnalyticProfile::from_name("step", 1.0).unwrap();
        let params = ModelParams::linear_only(1.0);
        for scheme in [Scheme::Etd4, Scheme::Strang2] {
            let cfg = SolverConfig::new(g.clone(), 0.01).with_scheme(scheme).with_stride(7);
            let t = solve(&p, 0.7, &params, &cfg).unwrap();
            for (time, f) in t.times.iter().zip(&t.fields) {
                let exact = linear_evolve(&t.initial, *time, &params);
                assert!(max_diff(f, &exact) < 1e-10);
            }
        }
    }

    #[test]
    fn trajectory_invariants() {
        let g = make_grid(64).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let cfg = SolverConfig::new(g, 0.003).with_stride(4);
        let t = solve(&p, 0.5, &ModelParams::default(), &cfg).unwrap();
        assert_eq!(t.times[0], 0.0);
        assert_eq!(t.fields[0], t.initial);
        assert_eq!(t.phase[0], 0.0);
        assert!(t.phase.windows(2).all(|w| w[1] >= w[0]));
        assert!(t.times.windows(2).all(|w| w[1] > w[0]));
        assert!((t.t_end() - 0.5).abs() < 1e-12);
        assert!(t.dt <= 0.003);
        assert_eq!((0.5 / t.dt).round() as usize % 4, 0);

        let last = solve(&p, 0.5, &ModelParams::default(), &cfg.clone().with_frames(1)).unwrap();
        assert_eq!(last.len(), 2);
        assert!((last.dt - 0.5 / 167.0).abs() < 1e-15);
        assert!(max_diff(&last.fields[1], &solve(&p, 0.5, &ModelParams::default(), &cfg.with_stride(1)).unwrap().fields[167]) < 1e-14);
    }

    #[test]
    fn etd4_self_convergence_is_fourth_order() {
        // Richardson: errors against a fine reference shrink by ~2⁴ per halving.
        // Coarse grids keep the fastest cubic interactions resolved in time.
        let g = make_grid(16).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let params = ModelParams::default();
        let run = |dt: f64| {
            let cfg = SolverConfig::new(g.clone(), dt);
            solve(&p, 0.2, &params, &cfg).unwrap().fields.pop().unwrap()
        };
        let reference = run(1e-4);
        let e1 = max_diff(&run(2.5e-3), &reference);
        let e2 = max_diff(&run(1.25e-3), &reference);
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn stencil_follows_the_scheme_order() {
        let g = make_grid(16).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        for (scheme, first) in [(Scheme::Etd4, 2), (Scheme::Strang2, 1)] {
            let cfg = SolverConfig::new(g.clone(), 0.01).with_scheme(scheme);
            let eb = energy_balance_residual(&solve(&p, 0.1, &ModelParams::default(), &cfg).unwrap()).unwrap();
            let defined: Vec<usize> = (0..eb.residual.len()).filter(|&i| eb.residual[i].is_some()).collect();
            assert_eq!(defined.first(), Some(&first), "{scheme:?}");
            assert_eq!(defined.last(), Some(&(eb.residual.len() - 1 - first)));
        }
    }

    #[test]
    fn energy_balance_edge_cases() {
        let g = make_grid(16).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let cfg = SolverConfig::new(g.clone(), 0.1);
        let short = solve(&p, 0.1, &ModelParams::default(), &cfg).unwrap();
        assert!(matches!(
            energy_balance_residual(&short),
            Err(Error::TooFewFrames { needed: 3, have: 2 })
        ));
        let zero = AnalyticProfile::from_name("constant", 0.0).unwrap();
        let t = solve(&zero, 0.5, &ModelParams::default(), &cfg).unwrap();
        let eb = energy_balance_residual(&t).unwrap();
        assert_eq!(eb.max_abs_residual(), 0.0);
        // at t = 0 with forcing = u₀ the right side vanishes identically
        let u0 = p.sampled_field(&g);
        let at_zero = -2.0 * u0.l2sq() + 2.0 * u0.inner(&u0).unwrap().re;
        assert!(at_zero.abs() < 1e-15);
    }

    #[test]
    fn blow_up_reports_time_and_partial_trajectory() {
        let g = make_grid(16).unwrap();
        let p = AnalyticProfile::from_name("constant", 1e40).unwrap();
        let params = ModelParams {
            damping: 0.0,
            ..ModelParams::default()
        };
        let cfg = SolverConfig::new(g, 0.1);
        match solve(&p, 5.0, &params, &cfg) {
            Err(Error::BlowUp { time, partial }) => {
                assert!(time > 0.0 && time <= 5.0);
                assert!(!partial.unwrap().is_empty());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn l2_norm_stays_in_stability_window() {
        let g = make_grid(128).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let cfg = SolverConfig::new(g, 0.005).with_stride(20);
        let t = solve(&p, PI, &ModelParams::default(), &cfg).unwrap();
        let u0 = t.initial.l2sq().sqrt();
        // ‖u(t)‖ ≤ e^{-t}‖u₀‖ + (1 − e^{-t})‖f‖ with f = u₀
        for f in &t.fields {
            assert!(f.l2sq().sqrt() <= u0 * (1.0 + 1e-9));
        }
        let samples = from_spectral(t.fields.last().unwrap());
        assert!(samples.iter().all(|z| z.norm() < 0.2));
    }
}
