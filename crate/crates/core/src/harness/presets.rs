//! Named experiments. Each one reproduces a single qualitative claim about
//! the model at desk scale and reports the measurements it was judged on.

use std::f64::consts::{E, PI};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::csvio::{num, write_table};
use super::{periodic_graph, revival, smoothing_rows, Check, Component, Outcome, Overrides, RevivalRequest, SimulateConfig};
use crate::analysis::{
    box_dimension, bracket, free_wave, linear_fit, phi_beta, random_free_wave, trilinear_ratio,
    DyadicRange, FreeWaveSpec,
};
use crate::decompose::{duhamel_at, duhamel_part, duhamel_quadrature, max_series_gap, resonant_split};
use crate::error::{Error, Result};
use crate::evolve::{energy_balance_residual, solve, Scheme, SolverConfig};
use crate::grid::{make_grid, FourierGrid, ModelParams, SpectralField};
use crate::propagator::{
    irrational_surrogates, linear_evolve, max_cell_increment, revival_coefficients, revival_evolve, scalar_factor,
    RationalTime,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    RevivalCheck,
    QuantizationJump,
    IrrationalContinuity,
    DimensionWindow,
    SmoothingGain,
    EnergyBalance,
    TrilinearProbe,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::RevivalCheck,
        Preset::QuantizationJump,
        Preset::IrrationalContinuity,
        Preset::DimensionWindow,
        Preset::SmoothingGain,
        Preset::EnergyBalance,
        Preset::TrilinearProbe,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::RevivalCheck => "revival-check",
            Preset::QuantizationJump => "quantization-jump",
            Preset::IrrationalContinuity => "irrational-continuity",
            Preset::DimensionWindow => "dimension-window",
            Preset::SmoothingGain => "smoothing-gain",
            Preset::EnergyBalance => "energy-balance",
            Preset::TrilinearProbe => "trilinear-probe",
        }
    }

    pub(crate) fn run(&self, seed: u64, ov: &Overrides, dir: &Path) -> Result<Outcome> {
        match self {
            Preset::RevivalCheck => revival_check(ov, dir),
            Preset::QuantizationJump => quantization_jump(ov, dir),
            Preset::IrrationalContinuity => irrational_continuity(ov, dir),
            Preset::DimensionWindow => dimension_window(ov, dir),
            Preset::SmoothingGain => smoothing_gain(seed, ov, dir),
            Preset::EnergyBalance => energy_balance(ov, dir),
            Preset::TrilinearProbe => trilinear_probe(seed, ov, dir),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Rejects overrides of keys the preset fixes itself.
fn pinned(ov: &Overrides, preset: Preset, keys: &[&str]) -> Result<()> {
    let set = [
        ("modes", ov.modes.is_some()),
        ("beta", ov.beta.is_some()),
        ("theta", ov.theta.is_some()),
        ("profile", ov.profile.is_some()),
        ("amplitude", ov.amplitude.is_some()),
        ("dt", ov.dt.is_some()),
        ("t_end", ov.t_end.is_some()),
        ("scheme", ov.scheme.is_some()),
        ("dealias", ov.dealias.is_some()),
        ("stride", ov.stride.is_some()),
    ];
    for (key, given) in set {
        if given && keys.contains(&key) {
            return Err(Error::Config(format!("`{key}` is fixed by preset {}", preset.name())));
        }
    }
    Ok(())
}

fn rel_l2(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).expect("same grid").l2sq_coeffs().sqrt() / b.l2sq_coeffs().sqrt().max(f64::MIN_POSITIVE)
}

fn coprime_times(q_max: u64) -> Vec<RationalTime> {
    let mut out = Vec::new();
    for q in 1..=q_max {
        for p in 0..2 * q {
            if gcd(p, q) == 1 {
                out.push(RationalTime::new(p, q).expect("q > 0"));
            }
        }
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Talbot revival: at `t = π` the free flow returns the datum times the
/// scalar prefactor, and at every `t = πp/q` it is a finite sum of
/// translates whose weights are discrete Gauss sums.
fn revival_check(ov: &Overrides, dir: &Path) -> Result<Outcome> {
    pinned(ov, Preset::RevivalCheck, &["dt", "t_end", "scheme", "dealias", "stride"])?;
    let cfg = ov.apply(&SimulateConfig {
        amplitude: 1.0,
        ..SimulateConfig::default()
    });
    let grid = make_grid(cfg.modes)?;
    let profile = cfg.profile()?;
    let u0 = profile.spectral_field(&grid);
    let params = ModelParams {
        nonlinearity_on: false,
        forcing: crate::grid::Forcing::Off,
        ..cfg.params()
    };
    let one = RationalTime::new(1, 1)?;
    let back = linear_evolve(&u0, one, &params);
    let expect = u0.scale(scalar_factor(PI, &params));
    let identity = rel_l2(&back, &expect);

    let times = coprime_times(16);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for beta in [1.0, 2.0] {
        let p = ModelParams { beta, ..params.clone() };
        let errs = crate::par::map(&times, |&rt| -> Result<f64> {
            Ok(rel_l2(&revival_evolve(&profile, rt, &p, &grid)?, &linear_evolve(&u0, rt, &p)))
        });
        for (rt, e) in times.iter().zip(errs) {
            let e = e?;
            worst = worst.max(e);
            rows.push(vec![num(beta), rt.p().to_string(), rt.q().to_string(), num(e)]);
        }
    }
    let gauss = dir.join("gauss_sums.csv");
    write_table(&gauss, &["beta", "p", "q", "rel_l2_error"], rows)?;

    let (coeffs, prof) = revival(
        &RevivalRequest {
            p: 1,
            q: 2,
            beta: cfg.beta,
            profile: cfg.profile.clone(),
            amplitude: cfg.amplitude,
            modes: cfg.modes,
        },
        &dir.join("revival.csv"),
    )?;
    Ok(Outcome {
        checks: vec![
            Check::below("revival identity at t = pi (relative L2)", identity, 1e-10),
            Check::below("Gauss-sum translates vs multiplier, q <= 16 (max relative L2)", worst, 1e-9),
        ],
        files: vec![gauss, coeffs, prof],
    })
}

fn resolutions(ov: &Overrides, default: &[usize]) -> Vec<usize> {
    match ov.modes {
        None => default.to_vec(),
        Some(m) => {
            let mid = default.len() / 2;
            default.iter().map(|&d| d * m / default[mid]).collect()
        }
    }
}

/// Quantization at rational times: the nonlinear solution of step data keeps a
/// jump at `t = π` whose height is the linear one, `e^{−π}` times the step,
/// because the Duhamel part is continuous.
fn quantization_jump(ov: &Overrides, dir: &Path) -> Result<Outcome> {
    pinned(ov, Preset::QuantizationJump, &["profile", "t_end", "stride"])?;
    let base = ov.apply(&SimulateConfig::default());
    let params = base.params();
    let beta = params
        .integer_beta()
        .ok_or_else(|| Error::Config("quantization-jump needs an integer beta".into()))?;
    let rep = revival_coefficients(RationalTime::new(1, 1)?, &ModelParams::with_beta(beta as f64))?;
    let c_max = rep.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let expected = (-PI * params.damping).exp() * base.amplitude * c_max;
    let ns = resolutions(ov, &[512, 1024, 2048]);
    let jumps = crate::par::map(&ns, |&n| -> Result<f64> {
        let cfg = SolverConfig::new(make_grid(n)?, base.dt)
            .with_scheme(base.scheme)
            .with_dealias(base.dealias)
            .with_frames(1);
        let traj = solve(&base.profile()?, PI, &params, &cfg)?;
        Ok(max_cell_increment(&traj.fields.last().expect("final frame").to_samples()))
    });
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (&n, j) in ns.iter().zip(jumps) {
        let j = j?;
        let ratio = j / expected;
        rows.push(vec![n.to_string(), num(j), num(expected), num(ratio)]);
        checks.push(Check::within(&format!("jump height / expected at n = {n}"), ratio, 0.85, 1.15));
    }
    let path = dir.join("jump.csv");
    write_table(&path, &["modes", "max_jump", "expected", "ratio"], rows)?;
    Ok(Outcome {
        checks,
        files: vec![path],
    })
}

/// Continuity at irrational times: the free evolution of a step at
/// `t = π(√5 − 1)/2` has no persistent jump, so its largest cell increment
/// shrinks under refinement. Increments are compared with damping factored
/// out, against the undamped step height.
fn irrational_continuity(ov: &Overrides, dir: &Path) -> Result<Outcome> {
    pinned(
        ov,
        Preset::IrrationalContinuity,
        &["modes", "profile", "t_end", "dt", "scheme", "dealias", "stride"],
    )?;
    let base = ov.apply(&SimulateConfig::default());
    let t = PI * (5f64.sqrt() - 1.0) / 2.0;
    let params = ModelParams {
        nonlinearity_on: false,
        forcing: crate::grid::Forcing::Off,
        ..base.params()
    };
    let profile = base.profile()?;
    let height = base.amplitude;
    let ns: Vec<usize> = (9..=13).map(|e| 1usize << e).collect();
    let incs = crate::par::map(&ns, |&n| -> Result<f64> {
        let u0 = profile.spectral_field(&make_grid(n)?);
        Ok(max_cell_increment(&linear_evolve(&u0, t, &params).to_samples()))
    });
    let incs = incs.into_iter().collect::<Result<Vec<f64>>>()?;
    let undamp = (params.damping * t).exp();
    let rows = ns.iter().zip(&incs).map(|(&n, &inc)| {
        vec![n.to_string(), num(inc), num(inc * undamp), num(inc * undamp / height)]
    });
    let path = dir.join("continuity.csv");
    write_table(&path, &["modes", "max_increment", "undamped_increment", "ratio_to_jump"], rows)?;
    let worst_step = incs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let last = incs.last().copied().unwrap_or(f64::NAN) * undamp / height;
    Ok(Outcome {
        checks: vec![
            Check::below("largest successive increment ratio (monotone decrease)", worst_step, 1.0),
            Check::below("finest increment / rational jump (undamped)", last, 0.1),
        ],
        files: vec![path],
    })
}

/// Number of samples of the fine grid used for box counting.
const DIMENSION_SAMPLES: usize = 1 << 14;

/// Fractal graphs at irrational times: the real and imaginary parts of the
/// nonlinear solution have box-counting dimension inside `[5/4, 7/4]`
/// (widened by 0.1 for the estimator). The free part is evaluated at
/// 2^14 points; the smoother Duhamel part is band-limited and resampled.
fn dimension_window(ov: &Overrides, dir: &Path) -> Result<Outcome> {
    pinned(ov, Preset::DimensionWindow, &["t_end", "stride"])?;
    let base = ov.apply(&SimulateConfig::default());
    let params = base.params();
    let profile = base.profile()?;
    let fine = make_grid(DIMENSION_SAMPLES)?;
    let mut times: Vec<f64> = vec![0.5f64.sqrt()];
    times.extend(irrational_surrogates().into_iter().filter(|&t| t != E));
    // reported without a check: the smooth forced part dominates by then
    times.push(E);
    let range = DyadicRange::new(3, 10)?;
    let graphs = crate::par::map(&times, |&t| -> Result<Vec<(f64, f64, Vec<(f64, f64)>)>> {
        let cfg = SolverConfig::new(make_grid(base.modes)?, base.dt)
            .with_scheme(base.scheme)
            .with_dealias(base.dealias)
            .with_frames(1);
        let traj = solve(&profile, t, &params, &cfg)?;
        let n = duhamel_at(&traj, t)?.resample(&fine);
        let phase = *traj.phase.last().expect("phase per frame");
        let free = linear_evolve(&profile.sampled_field(&fine), t, &params).scale(Complex64::from_polar(1.0, phase));
        let u = free.add(&n)?.to_samples();
        [Component::Re, Component::Im]
            .iter()
            .map(|&c| {
                let (xs, ys) = periodic_graph(&fine.points(), &u, c);
                let est = box_dimension(&xs, &ys, range)?;
                Ok((est.slope, est.stderr, est.log_points()))
            })
            .collect()
    });
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    let mut points = Vec::new();
    for (&t, g) in times.iter().zip(graphs) {
        for (c, (slope, stderr, pts)) in [Component::Re, Component::Im].into_iter().zip(g?) {
            let inside = (1.15..=1.85).contains(&slope) && stderr < 0.05;
            summary.push(vec![num(t), c.name().into(), num(slope), num(stderr), inside.to_string()]);
            points.extend(pts.into_iter().map(|(a, b)| vec![num(t), c.name().into(), num(a), num(b)]));
            if t != E {
                checks.push(Check::within(&format!("dimension of {} u at t = {t:.6}", c.name()), slope, 1.15, 1.85));
                checks.push(Check::below(&format!("fit stderr of {} u at t = {t:.6}", c.name()), stderr, 0.05));
            }
        }
    }
    let s_path = dir.join("dimension_window.csv");
    write_table(&s_path, &["t", "component", "slope", "stderr", "in_window"], summary)?;
    let p_path = dir.join("dimension.csv");
    write_table(&p_path, &["t", "component", "log_inv_eps", "log_count"], points)?;
    Ok(Outcome {
        checks,
        files: vec![s_path, p_path],
    })
}

/// `T(û)` by the plain double sum, kept deliberately naive.
fn brute_triple(f: &SpectralField) -> Vec<Complex64> {
    let half = (f.n_modes() / 2) as i64;
    f.grid()
        .wavenumbers()
        .iter()
        .map(|&k| {
            if k == -half {
                return Complex64::new(0.0, 0.0);
            }
            let mut s = Complex64::new(0.0, 0.0);
            for k1 in -half..half {
                for k2 in -half..half {
                    s += f.coeff(k1) * f.coeff(k2).conj() * f.coeff(k - k1 + k2);
                }
            }
            s
        })
        .collect()
}

/// Largest relative error of the resonant split against the double sum
/// over `count` seeded random fields at `n ≤ 32`.
pub(crate) fn resonant_split_error(seed: u64, count: usize) -> Result<f64> {
    use rand::Rng;
    let grids: Vec<FourierGrid> = [8usize, 16, 32].iter().map(|&n| make_grid(n)).collect::<Result<_>>()?;
    let errs = crate::par::map_range(count, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let g = &grids[i % grids.len()];
        let f = SpectralField::from_fn(g, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let total = resonant_split(&f).total();
        let exact = brute_triple(&f);
        let scale = exact.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let diff = total
            .coeffs()
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        diff / scale
    });
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Gap between the subtraction and quadrature forms of `N` for two step
/// sizes; second-order agreement gives a ratio near 4.
pub(crate) fn duhamel_gap_ratio(dt: f64) -> Result<f64> {
    let profile = crate::profiles::AnalyticProfile::from_name("step", 0.1)?;
    let grid = make_grid(16)?;
    let gaps = crate::par::map(&[dt, dt / 2.0], |&h| -> Result<f64> {
        let traj = solve(&profile, 1.0, &ModelParams::default(), &SolverConfig::new(grid.clone(), h))?;
        max_series_gap(&duhamel_part(&traj), &duhamel_quadrature(&traj)?, 0.0)
    });
    let gaps = gaps.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(gaps[0] / gaps[1])
}

/// Nonlinear smoothing: the Duhamel part of step data is finite in
/// `H^{1.3}` (stable under refinement) while the free part is not. Also
/// validates the two ingredients of `N`: the resonant split of the cubic
/// term and the agreement of the two constructions of `N`.
fn smoothing_gain(seed: u64, ov: &Overrides, dir: &Path) -> Result<Outcome> {
    pinned(ov, Preset::SmoothingGain, &["profile", "stride"])?;
    let base = ov.apply(&SimulateConfig::default());
    let order = 1.3;
    let ns = match ov.modes {
        None => vec![1024, 2048],
        Some(m) => vec![m, 2 * m],
    };
    let runs = crate::par::map(&ns, |&n| -> Result<Vec<(f64, f64, f64, usize)>> {
        let cfg = SolverConfig::new(make_grid(n)?, base.dt)
            .with_scheme(base.scheme)
            .with_dealias(base.dealias)
            .with_frames(10);
        let traj = solve(&base.profile()?, base.t_end, &base.params(), &cfg)?;
        Ok(smoothing_rows(&traj, order))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let (coarse, fine) = (runs[0].last().expect("frames"), runs[1].last().expect("frames"));
    let n_change = (fine.1 / coarse.1 - 1.0).abs();
    let lin_growth = fine.2 / coarse.2;
    let path = dir.join("smoothing.csv");
    let all: Vec<_> = runs.into_iter().flatten().collect();
    super::csvio::write_smoothing(&path, &all)?;
    let split = resonant_split_error(seed, 100)?;
    let gap_ratio = duhamel_gap_ratio(2e-4)?;
    Ok(Outcome {
        checks: vec![
            Check::below(
                &format!("relative change of |N|_H^1.3 at t = {}, n = {} -> {}", base.t_end, ns[0], ns[1]),
                n_change,
                0.05,
            ),
            Check::new(
                &format!("growth of |linear part|_H^1.3, n = {} -> {}", ns[0], ns[1]),
                lin_growth >= 1.6,
                lin_growth,
                ">= 1.6",
            ),
            Check::below("resonant split vs double sum (max relative error)", split, 1e-12),
            Check::within("Duhamel gap ratio, subtraction vs quadrature, dt halved", gap_ratio, 3.4, 4.6),
        ],
        files: vec![path],
    })
}

/// Self-convergence slope of the balance-law residual for a scheme.
pub(crate) fn residual_slope(
    base: &SimulateConfig,
    scheme: Scheme,
    dts: &[f64],
) -> Result<(f64, Vec<f64>, crate::evolve::EnergyBalance)> {
    let runs = crate::par::map(dts, |&dt| -> Result<crate::evolve::EnergyBalance> {
        let cfg = SolverConfig::new(make_grid(base.modes)?, dt)
            .with_scheme(scheme)
            .with_dealias(base.dealias);
        let traj = solve(&base.profile()?, base.t_end, &base.params(), &cfg)?;
        energy_balance_residual(&traj)
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let maxima: Vec<f64> = runs.iter().map(|b| b.max_abs_residual()).collect();
    let pts: Vec<(f64, f64)> = dts.iter().zip(&maxima).map(|(d, r)| (d.ln(), r.ln())).collect();
    let finest = runs.into_iter().last().expect("at least one step size");
    Ok((linear_fit(&pts).slope, maxima, finest))
}

/// The L² balance law `d/dt‖u‖² = −2‖u‖² + 2 Re∫u₀ū` holds along the
/// discrete solution up to the scheme's order. Small grids keep the runs in
/// the asymptotic regime.
fn energy_balance(ov: &Overrides, dir: &Path) -> Result<Outcome> {
    pinned(ov, Preset::EnergyBalance, &["scheme", "stride"])?;
    let base = ov.apply(&SimulateConfig {
        modes: 16,
        ..SimulateConfig::default()
    });
    let dts = [base.dt, base.dt / 2.0, base.dt / 4.0];
    let (etd, etd_max, finest) = residual_slope(&base, Scheme::Etd4, &dts)?;
    let (strang, strang_max, _) = residual_slope(&base, Scheme::Strang2, &dts)?;
    let energy = dir.join("energy.csv");
    super::csvio::write_energy(&energy, &finest)?;
    let rows = [(Scheme::Etd4, &etd_max), (Scheme::Strang2, &strang_max)]
        .into_iter()
        .flat_map(|(s, m)| dts.iter().zip(m.iter()).map(move |(&d, &r)| vec![s.name().into(), num(d), num(r)]));
    let conv = dir.join("energy_convergence.csv");
    write_table(&conv, &["scheme", "dt", "max_residual"], rows)?;
    Ok(Outcome {
        checks: vec![
            Check::within("residual slope, etd4", etd, 3.5, 4.5),
            Check::within("residual slope, strang2", strang, 1.7, 2.3),
        ],
        files: vec![energy, conv],
    })
}

/// Ensemble size of the trilinear probe.
const MEMBERS: usize = 100;

/// Largest of the three `φ_β` regime ratios over `10 ≤ k ≤ 10⁵`, and the smallest.
pub(crate) fn phi_regime_extremes() -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for k in [10i64, 31, 100, 316, 1000, 3162, 10_000, 31_623, 100_000] {
        let br = bracket(k as f64);
        for r in [
            phi_beta(k, 2.0),
            phi_beta(k, 1.0) / (1.0 + br).ln(),
            phi_beta(k, 0.5) / br.sqrt(),
        ] {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

/// Trilinear estimate at `s = 0`, `b′ = 5/8`: over random free-wave ensembles
/// the ratio `‖uvw‖_{X^{0,b′−1}} / Π‖·‖_{X^{0,3/8}}` stays bounded under
/// refinement and close to the single-mode value. Also checks the regimes of
/// the divisor sums `φ_β(k) = Σ_{|m|≤k} ⟨m⟩^{−β}`.
fn trilinear_probe(seed: u64, ov: &Overrides, dir: &Path) -> Result<Outcome> {
    pinned(
        ov,
        Preset::TrilinearProbe,
        &["modes", "theta", "profile", "amplitude", "dt", "t_end", "scheme", "dealias", "stride"],
    )?;
    let beta = ov.beta.unwrap_or(1.0);
    let (s, b_prime) = (0.0, 0.625);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for n in [64usize, 128] {
        let grid = make_grid(n)?;
        let spec = FreeWaveSpec {
            beta,
            ..FreeWaveSpec::for_grid(&grid)
        };
        let single = free_wave(&grid, &spec, &[(1, Complex64::new(1.0, 0.0))])?;
        let baseline = trilinear_ratio(&single, &single, &single, s, b_prime)?;
        let ratios = crate::par::map_range(MEMBERS, |m| -> Result<f64> {
            // one stream per factor, shared across resolutions, so the finer
            // draw extends the coarser series
            let draw = |f: u64| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(3 * m as u64 + f);
                random_free_wave(&grid, &spec, &mut rng)
            };
            trilinear_ratio(&draw(0)?, &draw(1)?, &draw(2)?, s, b_prime)
        });
        let ratios = ratios.into_iter().collect::<Result<Vec<f64>>>()?;
        let max = ratios.iter().copied().fold(0.0, f64::max);
        rows.push(vec![n.to_string(), "baseline".into(), num(baseline)]);
        rows.extend(ratios.iter().enumerate().map(|(m, &r)| vec![n.to_string(), m.to_string(), num(r)]));
        checks.push(Check::below(&format!("ensemble max / single-mode baseline at n = {n}"), max / baseline, 10.0));
        maxima.push(max);
    }
    let spread = maxima[1] / maxima[0];
    checks.insert(0, Check::within("ensemble max ratio, n = 128 over n = 64", spread, 0.5, 2.0));
    let (lo, hi) = phi_regime_extremes();
    checks.push(Check::new(
        "phi_beta regime ratios for 10 <= k <= 1e5",
        lo >= 0.25 && hi <= 4.0,
        hi,
        format!("all in [0.25, 4], smallest {lo:.4}"),
    ));
    let path = dir.join("trilinear.csv");
    write_table(&path, &["modes", "member", "ratio"], rows)?;
    Ok(Outcome {
        checks,
        files: vec![path],
    })
}
