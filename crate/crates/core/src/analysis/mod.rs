//! Norms, Littlewood–Paley blocks, space-time norms and box counting.

mod besov;
mod boxcount;
mod xsb;

pub use besov::{besov_blocks, besov_norm, smooth_step, BesovConfig, LpExponent};
pub use boxcount::{box_dimension, DimensionEstimate, DyadicRange};
pub use xsb::{free_wave, random_free_wave, trilinear_ratio, xsb_norm, FreeWaveSpec, SpaceTimeField, Taper};

use crate::grid::SpectralField;

/// Japanese bracket `⟨x⟩ = (1 + x²)^{1/2}`.
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// `(Σ_k ⟨k⟩^{2s} |û(k)|²)^{1/2}` over the grid's modes.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    field
        .grid()
        .wavenumbers()
        .into_iter()
        .zip(field.coeffs())
        .map(|(k, c)| (1.0 + (k * k) as f64).powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `φ_β(k) = Σ_{|m| ≤ |k|} ⟨m⟩^{−β}`, summed from the small terms up.
pub fn phi_beta(k: i64, beta: f64) -> f64 {
    let tail: f64 = (1..=k.unsigned_abs())
        .rev()
        .map(|m| (1.0 + (m as f64).powi(2)).powf(-beta / 2.0))
        .sum();
    1.0 + 2.0 * tail
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; NaN with fewer than three points.
    pub stderr: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if points.len() > 2 {
        let sse: f64 = points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    LinearFit {
        slope,
        intercept,
        stderr,
    }
}
