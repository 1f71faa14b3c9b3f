//! Initial data with closed-form Fourier coefficients.
//!
//! Jump data (step, sawtooth) have coefficients decaying like `1/|k|`, so they
//! sit in `H^σ` exactly for `σ < 1/2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{from_spectral, to_spectral, FourierGrid, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// Indicator of `[left, right)`.
    Step { left: f64, right: f64 },
    /// `x/2π − ⌊x/2π⌋`.
    Sawtooth,
    Constant,
    /// `e^{i k x}`.
    SingleMode { k: i64 },
    /// `Σ_{j≥0} 2^{-jα} cos(2^j x)`.
    Weierstrass { alpha: f64 },
    /// Coefficients read from a table; wavenumbers not listed are zero.
    Tabulated { coeffs: HashMap<i64, Complex64> },
}

/// A jump discontinuity: location in radians and the signed height `u(x+) − u(x−)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub location: f64,
    pub height: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticProfile {
    pub kind: ProfileKind,
    pub amplitude: f64,
}

pub fn step_profile(left: f64, right: f64, height: f64) -> Result<AnalyticProfile> {
    if !(0.0..2.0 * PI).contains(&left) || right > 2.0 * PI || right < left {
        return Err(Error::InvalidProfile(format!(
            "step needs 0 <= left < right <= 2π, got [{left}, {right})"
        )));
    }
    if right == left {
        return Ok(AnalyticProfile {
            kind: ProfileKind::Constant,
            amplitude: 0.0,
        });
    }
    if left == 0.0 && right == 2.0 * PI {
        return Ok(AnalyticProfile {
            kind: ProfileKind::Constant,
            amplitude: height,
        });
    }
    Ok(AnalyticProfile {
        kind: ProfileKind::Step { left, right },
        amplitude: height,
    })
}

impl AnalyticProfile {
    pub fn new(kind: ProfileKind, amplitude: f64) -> Self {
        Self { kind, amplitude }
    }

    /// Parses a CLI profile name: `step`, `sawtooth`, `constant`, `single-mode`,
    /// `weierstrass:α` or `tabulated:PATH`.
    pub fn from_name(name: &str, amplitude: f64) -> Result<Self> {
        let kind = match name {
            "step" => ProfileKind::Step {
                left: 0.0,
                right: PI,
            },
            "sawtooth" => ProfileKind::Sawtooth,
            "constant" => ProfileKind::Constant,
            "single-mode" => ProfileKind::SingleMode { k: 1 },
            _ => {
                if let Some(a) = name.strip_prefix("weierstrass:") {
                    let alpha: f64 = a
                        .parse()
                        .map_err(|_| Error::InvalidProfile(format!("bad exponent in `{name}`")))?;
                    if !(alpha > 0.0 && alpha <= 1.0) {
                        return Err(Error::InvalidProfile(format!(
                            "weierstrass exponent must lie in (0, 1], got {alpha}"
                        )));
                    }
                    ProfileKind::Weierstrass { alpha }
                } else if let Some(path) = name.strip_prefix("tabulated:") {
                    return Self::from_table(Path::new(path), amplitude);
                } else {
                    return Err(Error::InvalidProfile(format!("unknown profile `{name}`")));
                }
            }
        };
        Ok(Self { kind, amplitude })
    }

    /// Reads `k,re,im` rows (a header line and `#` comments are skipped).
    pub fn from_table(path: &Path, amplitude: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut coeffs = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = (|| -> Option<(i64, f64, f64)> {
                if cols.len() != 3 {
                    return None;
                }
                Some((cols[0].parse().ok()?, cols[1].parse().ok()?, cols[2].parse().ok()?))
            })();
            match parsed {
                Some((k, re, im)) => {
                    coeffs.insert(k, Complex64::new(re, im));
                }
                None if lineno == 0 => continue,
                None => {
                    return Err(Error::InvalidProfile(format!(
                        "{}:{}: expected `k,re,im`",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(Self {
            kind: ProfileKind::Tabulated { coeffs },
            amplitude,
        })
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            amplitude,
        }
    }

    /// Closed-form `û(k)`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let base = match &self.kind {
            ProfileKind::Step { left, right } => {
                if k == 0 {
                    Complex64::new(right - left, 0.0)
                } else {
                    let kf = k as f64;
                    (Complex64::from_polar(1.0, -kf * left) - Complex64::from_polar(1.0, -kf * right))
                        / (I * kf)
                }
            }
            ProfileKind::Sawtooth => {
                if k == 0 {
                    Complex64::new(PI, 0.0)
                } else {
                    I / k as f64
                }
            }
            ProfileKind::Constant => {
                if k == 0 {
                    Complex64::new(2.0 * PI, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            ProfileKind::SingleMode { k: k0 } => {
                if k == *k0 {
                    Complex64::new(2.0 * PI, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            ProfileKind::Weierstrass { alpha } => {
                let m = k.unsigned_abs();
                if m != 0 && m.is_power_of_two() {
                    let j = m.trailing_zeros() as f64;
                    Complex64::new(PI * 2f64.powf(-j * alpha), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            ProfileKind::Tabulated { coeffs } => {
                coeffs.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0))
            }
        };
        base * self.amplitude
    }

    pub fn jumps(&self) -> Vec<Jump> {
        let a = Complex64::new(self.amplitude, 0.0);
        match &self.kind {
            _ if self.amplitude == 0.0 => Vec::new(),
            ProfileKind::Step { left, right } => vec![
                Jump {
                    location: *left,
                    height: a,
                },
                Jump {
                    location: right.rem_euclid(2.0 * PI),
                    height: -a,
                },
            ],
            ProfileKind::Sawtooth => vec![Jump {
                location: 0.0,
                height: -a,
            }],
            _ => Vec::new(),
        }
    }

    /// `sup{σ : u₀ ∈ H^σ}`; `None` when not known in closed form.
    pub fn sigma0_true(&self) -> Option<f64> {
        if !self.jumps().is_empty() {
            return Some(0.5);
        }
        match &self.kind {
            ProfileKind::Weierstrass { alpha } if self.amplitude != 0.0 => Some(*alpha),
            ProfileKind::Tabulated { .. } => None,
            _ => Some(f64::INFINITY),
        }
    }

    /// True for profiles defined pointwise (jump data); series profiles are
    /// only defined through their band-limited partial sums.
    pub fn is_pointwise(&self) -> bool {
        matches!(
            self.kind,
            ProfileKind::Step { .. } | ProfileKind::Sawtooth | ProfileKind::Constant
        )
    }

    /// Point value of a pointwise profile. Intervals are closed on the left.
    pub fn value_at(&self, x: f64) -> Option<Complex64> {
        let x = x.rem_euclid(2.0 * PI);
        let v = match &self.kind {
            ProfileKind::Step { left, right } => {
                if x >= *left && x < *right {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileKind::Sawtooth => x / (2.0 * PI),
            ProfileKind::Constant => 1.0,
            _ => return None,
        };
        Some(Complex64::new(v * self.amplitude, 0.0))
    }

    /// Closed-form coefficients on the grid's band (Nyquist cleared).
    pub fn spectral_field(&self, grid: &FourierGrid) -> SpectralField {
        SpectralField::from_fn(grid, |k| self.coeff(k))
    }

    /// Point samples at the grid points. Series profiles are summed over the
    /// grid's band.
    pub fn samples(&self, grid: &FourierGrid) -> Vec<Complex64> {
        if self.is_pointwise() {
            grid.points()
                .iter()
                .map(|&x| self.value_at(x).expect("pointwise profile"))
                .collect()
        } else {
            from_spectral(&self.spectral_field(grid))
        }
    }

    /// The grid representation used as initial datum by the solver: analysis
    /// transform of the point samples. Jumps sitting on grid points stay
    /// confined to a single cell.
    pub fn sampled_field(&self, grid: &FourierGrid) -> SpectralField {
        to_spectral(grid, &self.samples(grid)).expect("sample count matches grid")
    }
}

/// Outcome of fitting `log|û(k)| ≈ −(σ + 1/2) log k + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma0Estimate {
    Finite { sigma: f64, stderr: f64 },
    /// Coefficients decay faster than the grid can resolve.
    AboveCap,
}

impl Sigma0Estimate {
    pub fn sigma(&self) -> f64 {
        match self {
            Sigma0Estimate::Finite { sigma, .. } => *sigma,
            Sigma0Estimate::AboveCap => f64::INFINITY,
        }
    }
}

/// Relative floor below which a coefficient counts as zero.
const COEFF_FLOOR: f64 = 1e-13;
const MIN_FIT_POINTS: usize = 8;

/// Estimates the Sobolev threshold from coefficient decay over `k_lo..=k_hi`.
///
/// Both `±k` enter through `a(k) = sqrt((|û(k)|² + |û(−k)|²)/2)`; wavenumbers
/// with `a(k)` under the noise floor are skipped (this drops the vanishing
/// even modes of the symmetric step).
pub fn estimate_sigma0(field: &SpectralField, fit_range: (i64, i64)) -> Result<Sigma0Estimate> {
    let (lo, hi) = fit_range;
    let half = (field.n_modes() / 2) as i64;
    if lo < 1 || hi <= lo || hi >= half {
        return Err(Error::InvalidArgument(format!(
            "fit range {lo}..={hi} must satisfy 1 <= lo < hi < {half}"
        )));
    }
    let amp = |k: i64| ((field.coeff(k).norm_sqr() + field.coeff(-k).norm_sqr()) / 2.0).sqrt();
    if (lo..=hi).all(|k| amp(k) == 0.0) {
        return Err(Error::UndefinedFit(format!(
            "all coefficients vanish on {lo}..={hi}"
        )));
    }
    let global_max = field.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = COEFF_FLOOR * global_max;
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&k| amp(k) > floor)
        .map(|k| ((k as f64).ln(), amp(k).ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Ok(Sigma0Estimate::AboveCap);
    }
    let fit = crate::analysis::linear_fit(&pts);
    let sigma = -fit.slope - 0.5;
    let range_max = (lo..=hi).map(amp).fold(0.0, f64::max);
    let cap = (range_max / floor).ln() / (hi as f64 / lo as f64).ln() - 0.5;
    if sigma >= cap {
        return Ok(Sigma0Estimate::AboveCap);
    }
    Ok(Sigma0Estimate::Finite {
        sigma,
        stderr: fit.stderr,
    })
}
