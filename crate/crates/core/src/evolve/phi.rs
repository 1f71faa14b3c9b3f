//! φ-functions `φ₀(z) = e^z`, `φ_{l+1}(z) = (φ_l(z) − 1/l!)/z`.
//!
//! The recurrence loses digits to cancellation for small `|z|`, so below
//! [`SERIES_RADIUS`] the Taylor series `φ_l(z) = Σ_j z^j/(j+l)!` is summed instead.

use num_complex::Complex64;

pub const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 24;

/// `[φ₁(z), φ₂(z), φ₃(z)]`.
pub fn phi123(z: Complex64) -> [Complex64; 3] {
    if z.norm() < SERIES_RADIUS {
        by_series(z)
    } else {
        by_recurrence(z)
    }
}

fn by_series(z: Complex64) -> [Complex64; 3] {
    [series(z, 1), series(z, 2), series(z, 3)]
}

fn by_recurrence(z: Complex64) -> [Complex64; 3] {
    let e = z.exp();
    let p1 = (e - 1.0) / z;
    let p2 = (p1 - 1.0) / z;
    let p3 = (p2 - 0.5) / z;
    [p1, p2, p3]
}

pub fn phi1(z: Complex64) -> Complex64 {
    phi123(z)[0]
}

fn series(z: Complex64, l: usize) -> Complex64 {
    // Horner form of Σ_j z^j / (j+l)!
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (0..SERIES_TERMS).rev() {
        acc = acc * z / (j + l + 1) as f64 + 1.0;
    }
    let fact: f64 = (1..=l).map(|i| i as f64).product();
    acc / fact
}
