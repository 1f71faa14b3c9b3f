//! Resonant splitting of the cubic term, the gauge phase, and the Duhamel
//! part `N(t) = u(t) − e^{iΦ(t)} e^{tL} u₀`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::analysis::sobolev_norm;
use crate::error::{Error, Result};
use crate::evolve::phi::phi123;
use crate::evolve::{gauge_rate, triple_convolution, CubicTerm, Dealias, Trajectory};
use crate::grid::SpectralField;
use crate::propagator::{dispersion_symbol, linear_evolve};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `T(û) = mean_part + rho + r_term` with `mean_part = 2‖û‖²û`,
/// `rho(k) = −|û(k)|²û(k)` and `r_term` the sum over `k₁ ≠ k`, `k₂ ≠ k₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonantSplit {
    pub mean_part: SpectralField,
    pub rho: SpectralField,
    pub r_term: SpectralField,
}

impl ResonantSplit {
    pub fn total(&self) -> SpectralField {
        self.mean_part
            .add(&self.rho)
            .and_then(|s| s.add(&self.r_term))
            .expect("parts share a grid")
    }

    /// `rho + r_term`: the part of `T` left after the gauge removes the mean term.
    pub fn non_mean(&self) -> SpectralField {
        self.rho.add(&self.r_term).expect("parts share a grid")
    }
}

/// Splits the full triple convolution by subtracting its two diagonals.
pub fn resonant_split(field: &SpectralField) -> ResonantSplit {
    let full = triple_convolution(field);
    let e = 2.0 * field.l2sq_coeffs();
    let mean_part = field.scale(Complex64::new(e, 0.0));
    let rho = field.map_modes(|_, c| -c * c.norm_sqr());
    let r_term = full
        .sub(&mean_part)
        .and_then(|s| s.sub(&rho))
        .expect("same grid");
    ResonantSplit {
        mean_part,
        rho,
        r_term,
    }
}

/// `Φ'` per frame; zero without the cubic term, which is what the gauge cancels.
fn rates(traj: &Trajectory) -> Vec<f64> {
    if !traj.params.nonlinearity_on {
        return vec![0.0; traj.len()];
    }
    traj.fields.iter().map(gauge_rate).collect()
}

/// `Φ` at the stored frames by the trapezoid rule on `‖u‖²/π`.
pub fn gauge_phase(traj: &Trajectory) -> Vec<f64> {
    let rates = rates(traj);
    let mut out = Vec::with_capacity(rates.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..rates.len() {
        acc += 0.5 * (traj.times[i] - traj.times[i - 1]) * (rates[i] + rates[i - 1]);
        out.push(acc);
    }
    out
}

/// `Φ` at even-indexed frames by composite Simpson; odd frames are `None`.
pub fn gauge_phase_simpson(traj: &Trajectory) -> Vec<Option<f64>> {
    let rates = rates(traj);
    let mut out = vec![None; rates.len()];
    out[0] = Some(0.0);
    let mut acc = 0.0;
    let mut i = 2;
    while i < rates.len() {
        let h = 0.5 * (traj.times[i] - traj.times[i - 2]);
        acc += h / 3.0 * (rates[i - 2] + 4.0 * rates[i - 1] + rates[i]);
        out[i] = Some(acc);
        i += 2;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelSeries {
    pub times: Vec<f64>,
    pub n_fields: Vec<SpectralField>,
    pub gauge_phase: Vec<f64>,
}

/// `N` at one frame, using the phase accumulated by the solver.
fn duhamel_frame(traj: &Trajectory, i: usize) -> SpectralField {
    let lin = linear_evolve(&traj.initial, traj.times[i], &traj.params);
    traj.fields[i]
        .sub(&lin.scale(Complex64::from_polar(1.0, traj.phase[i])))
        .expect("same grid")
}

/// `N(t)` at every stored frame by subtraction.
pub fn duhamel_part(traj: &Trajectory) -> DuhamelSeries {
    let n_fields = crate::par::map_range(traj.len(), |i| duhamel_frame(traj, i));
    DuhamelSeries {
        times: traj.times.clone(),
        n_fields,
        gauge_phase: traj.phase.clone(),
    }
}

/// `N(t)` at the stored frame nearest `t`.
pub fn duhamel_at(traj: &Trajectory, t: f64) -> Result<SpectralField> {
    let i = traj.frame_at(t)?;
    Ok(duhamel_frame(traj, i))
}

/// Builds `N` directly from the Duhamel integral
/// `N(t) = e^{iΦ(t)} ∫₀ᵗ e^{(t−s)L} [e^{−iΦ(s)} f̂ + i·P(ρ + R)(P v(s))/(2π)²] ds`,
/// `v = e^{−iΦ}u`, by the exponential trapezoid rule over consecutive frames.
///
/// Only the two-thirds projection has a gauge-covariant remainder, so other
/// dealiasing modes are rejected.
pub fn duhamel_quadrature(traj: &Trajectory) -> Result<DuhamelSeries> {
    if traj.dealias != Dealias::TwoThirds {
        return Err(Error::UnsupportedParameters(
            "quadrature form needs two-thirds dealiasing".into(),
        ));
    }
    let grid = traj.grid().clone();
    let proj = CubicTerm::new(&grid, Dealias::TwoThirds);
    let inv = 1.0 / (4.0 * PI * PI);
    let integrand = |i: usize| -> Vec<Complex64> {
        let gauge = Complex64::from_polar(1.0, -traj.phase[i]);
        let v = traj.fields[i].scale(gauge);
        let nl = if traj.params.nonlinearity_on {
            proj.project(&resonant_split(&proj.project(&v)).non_mean())
        } else {
            SpectralField::zeros(&grid)
        };
        let mut g: Vec<Complex64> = nl.coeffs().iter().map(|c| I * c * inv).collect();
        if let Some(f) = &traj.forcing {
            for (a, b) in g.iter_mut().zip(f.coeffs()) {
                *a += gauge * b;
            }
        }
        g
    };
    let gs = crate::par::map_range(traj.len(), integrand);
    let ks = grid.wavenumbers();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.n_modes()];
    let mut n_fields = vec![SpectralField::zeros(&grid)];
    for i in 1..traj.len() {
        let h = traj.times[i] - traj.times[i - 1];
        for (idx, &k) in ks.iter().enumerate() {
            let z = dispersion_symbol(k, &traj.params) * h;
            let [p1, p2, _] = phi123(z);
            acc[idx] = z.exp() * acc[idx] + h * ((p1 - p2) * gs[i - 1][idx] + p2 * gs[i][idx]);
        }
        let rot = Complex64::from_polar(1.0, traj.phase[i]);
        let coeffs = acc.iter().map(|c| c * rot).collect();
        n_fields.push(SpectralField::from_coeffs(&grid, coeffs)?);
    }
    Ok(DuhamelSeries {
        times: traj.times.clone(),
        n_fields,
        gauge_phase: traj.phase.clone(),
    })
}

/// `t ↦ ‖N(t)‖_{H^{s+a}}`.
pub fn smoothing_profile(series: &DuhamelSeries, s_plus_a: f64) -> Vec<f64> {
    crate::par::map(&series.n_fields, |f| sobolev_norm(f, s_plus_a))
}

/// `max_i ‖N(t_{i+1}) − N(t_i)‖_{H^order}` over consecutive frames.
pub fn max_frame_increment(series: &DuhamelSeries, order: f64) -> f64 {
    series
        .n_fields
        .windows(2)
        .map(|w| sobolev_norm(&w[1].sub(&w[0]).expect("same grid"), order))
        .fold(0.0, f64::max)
}

/// Largest coefficient gap between two series on the same frames, in `H^order`.
pub fn max_series_gap(a: &DuhamelSeries, b: &DuhamelSeries, order: f64) -> Result<f64> {
    if a.n_fields.len() != b.n_fields.len() {
        return Err(Error::LengthMismatch {
            expected: a.n_fields.len(),
            got: b.n_fields.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.n_fields.iter().zip(&b.n_fields) {
        worst = worst.max(sobolev_norm(&x.sub(y)?, order));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{solve, solve_field, SolverConfig};
    use crate::grid::{from_spectral, make_grid, ModelParams};
    use crate::profiles::AnalyticProfile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(n: usize, rng: &mut ChaCha8Rng) -> SpectralField {
        let g = make_grid(n).unwrap();
        SpectralField::from_fn(&g, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// Restricted double sum over `k₁ ≠ k`, `k₂ ≠ k₁` with `k − k₁ + k₂` on the grid.
    fn brute_r(f: &SpectralField) -> Vec<Complex64> {
        let half = (f.n_modes() / 2) as i64;
        let ks: Vec<i64> = (-half..half).collect();
        f.grid()
            .wavenumbers()
            .iter()
            .map(|&k| {
                // the Nyquist mode is always cleared
                if k == -half {
                    return Complex64::new(0.0, 0.0);
                }
                let mut s = Complex64::new(0.0, 0.0);
                for &k1 in &ks {
                    for &k2 in &ks {
                        let k3 = k - k1 + k2;
                        if k1 != k && k2 != k1 && (-half..half).contains(&k3) {
                            s += f.coeff(k1) * f.coeff(k2).conj() * f.coeff(k3);
                        }
                    }
                }
                s
            })
            .collect()
    }

    #[test]
    fn single_mode_and_zero() {
        let g = make_grid(16).unwrap();
        let a = Complex64::new(0.6, -0.3);
        let f = SpectralField::from_fn(&g, |k| if k == 1 { a } else { Complex64::new(0.0, 0.0) });
        let s = resonant_split(&f);
        let a2 = a.norm_sqr();
        assert!((s.mean_part.coeff(1) - 2.0 * a2 * a).norm() < 1e-15);
        assert!((s.rho.coeff(1) + a2 * a).norm() < 1e-15);
        assert!(s.r_term.coeffs().iter().all(|c| c.norm() < 1e-15));
        assert!((s.total().coeff(1) - a2 * a).norm() < 1e-15);
        let z = resonant_split(&SpectralField::zeros(&g));
        assert!(z.total().coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn two_modes_against_brute_force() {
        let g = make_grid(16).unwrap();
        let (a, b) = (Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.8));
        let f = SpectralField::from_fn(&g, |k| match k {
            0 => a,
            1 => b,
            _ => Complex64::new(0.0, 0.0),
        });
        let s = resonant_split(&f);
        let r = brute_r(&f);
        for (i, k) in g.wavenumbers().into_iter().enumerate() {
            assert!((s.r_term.coeff(k) - r[i]).norm() < 1e-13, "k={k}");
        }
        // only k = −1 and k = 2 pick up off-diagonal products
        assert!((s.r_term.coeff(2) - b * a.conj() * b).norm() < 1e-13);
        assert!((s.r_term.coeff(-1) - a * b.conj() * a).norm() < 1e-13);
    }

    #[test]
    fn reconstruction_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [8usize, 16, 32] {
            for _ in 0..5 {
                let f = random_field(n, &mut rng);
                let s = resonant_split(&f);
                let r = brute_r(&f);
                let scale = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
                for (got, want) in s.r_term.coeffs().iter().zip(&r) {
                    assert!((got - want).norm() < 1e-12 * scale);
                }
                let full = triple_convolution(&f);
                let tot = s.total();
                for (x, y) in full.coeffs().iter().zip(tot.coeffs()) {
                    assert!((x - y).norm() < 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn gauge_examples() {
        let g = make_grid(16).unwrap();
        // without forcing or damping the norm is conserved up to the scheme error
        let params = ModelParams { damping: 0.0, forcing: crate::grid::Forcing::Off, ..ModelParams::default() };
        let p = AnalyticProfile::from_name("step", 0.5).unwrap();
        let cfg = SolverConfig::new(g.clone(), 0.001);
        let t = solve(&p, 0.5, &params, &cfg).unwrap();
        let e = t.initial.l2sq();
        let phi = gauge_phase(&t);
        for (time, ph) in t.times.iter().zip(&phi) {
            assert!((ph - e * time / PI).abs() < 1e-9 * (1.0 + ph));
        }
        let off = solve(&p, 0.5, &ModelParams::linear_only(1.0), &cfg).unwrap();
        assert!(gauge_phase(&off).iter().chain(&off.phase).all(|&x| x == 0.0));
        let z = solve(&AnalyticProfile::from_name("constant", 0.0).unwrap(), 0.5, &params, &cfg).unwrap();
        assert!(gauge_phase(&z).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn trapezoid_and_simpson_agree_to_second_order() {
        let g = make_grid(16).unwrap();
        let p = AnalyticProfile::from_name("step", 0.3).unwrap();
        let gap = |dt: f64| {
            let t = solve(&p, 1.0, &ModelParams::default(), &SolverConfig::new(g.clone(), dt)).unwrap();
            let trap = gauge_phase(&t);
            let simp = gauge_phase_simpson(&t);
            trap.iter().zip(&simp).filter_map(|(a, b)| b.map(|b| (a - b).abs())).fold(0.0, f64::max)
        };
        let (g1, g2) = (gap(2e-3), gap(1e-3));
        assert!(g1 > 0.0);
        let ratio = g1 / g2;
        assert!(ratio > 3.0 && ratio < 5.0, "{ratio}");
        // splitting accumulates the same trapezoid at step resolution
        let cfg = SolverConfig::new(g.clone(), 1e-3).with_scheme(crate::evolve::Scheme::Strang2);
        let t = solve(&p, 1.0, &ModelParams::default(), &cfg).unwrap();
        for (a, b) in gauge_phase(&t).iter().zip(&t.phase) {
            assert!((a - b).abs() < 1e-14);
        }
        // the fourth-order scheme carries Φ as an unknown of its own
        let t = solve(&p, 1.0, &ModelParams::default(), &SolverConfig::new(g.clone(), 1e-3)).unwrap();
        for (a, b) in gauge_phase(&t).iter().zip(&t.phase) {
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }

    #[test]
    fn gauge_preserves_modulus() {
        let g = make_grid(64).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let t = solve(&p, 0.5, &ModelParams::default(), &SolverConfig::new(g, 0.01).with_stride(10)).unwrap();
        for (f, ph) in t.fields.iter().zip(&t.phase) {
            let u = from_spectral(f);
            let v = from_spectral(&f.scale(Complex64::from_polar(1.0, -ph)));
            for (a, b) in u.iter().zip(&v) {
                assert!((a.norm() - b.norm()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn duhamel_trivial_cases() {
        let g = make_grid(32).unwrap();
        let cfg = SolverConfig::new(g.clone(), 0.01);
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let t = solve(&p, 0.2, &ModelParams::default(), &cfg).unwrap();
        let d = duhamel_part(&t);
        assert!(d.n_fields[0].coeffs().iter().all(|c| c.norm() == 0.0));
        assert_eq!(d.gauge_phase[0], 0.0);
        assert!(smoothing_profile(&d, 1.3)[0] == 0.0);
        assert!(duhamel_at(&t, 0.5).is_err());
        let z = solve(&AnalyticProfile::from_name("constant", 0.0).unwrap(), 0.2, &ModelParams::default(), &cfg).unwrap();
        let dz = duhamel_part(&z);
        assert!(dz.n_fields.iter().all(|f| f.coeffs().iter().all(|c| c.norm() == 0.0)));
    }

    #[test]
    fn quadrature_rejects_aliased_runs() {
        let g = make_grid(16).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let cfg = SolverConfig::new(g, 0.01).with_dealias(Dealias::None);
        let t = solve(&p, 0.05, &ModelParams::default(), &cfg).unwrap();
        assert!(matches!(duhamel_quadrature(&t), Err(Error::UnsupportedParameters(_))));
    }

    #[test]
    fn subtraction_and_quadrature_agree() {
        let g = make_grid(16).unwrap();
        let p = AnalyticProfile::from_name("step", 0.1).unwrap();
        let run = |dt: f64| {
            let t = solve(&p, 1.0, &ModelParams::default(), &SolverConfig::new(g.clone(), dt)).unwrap();
            max_series_gap(&duhamel_part(&t), &duhamel_quadrature(&t).unwrap(), 0.0).unwrap()
        };
        let (a, b) = (run(2e-4), run(1e-4));
        let ratio = a / b;
        assert!(ratio > 3.4 && ratio < 4.6, "gap {a} -> {b}, ratio {ratio}");
    }

    #[test]
    fn forced_linear_quadrature_is_second_order_exact() {
        // nonlinearity off, forcing tied: Φ ≡ 0 and N is the forced response
        let g = make_grid(16).unwrap();
        let params = ModelParams { nonlinearity_on: false, ..ModelParams::default() };
        let u0 = SpectralField::from_fn(&g, |k| Complex64::new((-(k * k) as f64 / 8.0).exp(), 0.0));
        let t = solve_field(u0, 0.5, &params, &SolverConfig::new(g, 1e-3)).unwrap();
        let gap = max_series_gap(&duhamel_part(&t), &duhamel_quadrature(&t).unwrap(), 0.0).unwrap();
        assert!(gap < 1e-5, "{gap}");
    }
}
