//! Littlewood–Paley blocks built from an explicit C^∞ partition of unity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{from_spectral, to_spectral, FourierGrid, SpectralField};

/// `S(t) = g(t)/(g(t) + g(1−t))` with `g(t) = e^{−1/t}`: 0 for t ≤ 0, 1 for t ≥ 1.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let g = |x: f64| (-1.0 / x).exp();
    let a = g(t);
    a / (a + g(1.0 - t))
}

/// `χ(ξ) = 1` on `|ξ| ≤ 1`, `0` on `|ξ| ≥ 2`.
fn chi(xi: f64) -> f64 {
    1.0 - smooth_step(xi.abs() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    One,
    Two,
    Infinity,
}

impl LpExponent {
    pub fn from_f64(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(LpExponent::One)
        } else if p == 2.0 {
            Ok(LpExponent::Two)
        } else if p == f64::INFINITY {
            Ok(LpExponent::Infinity)
        } else {
            Err(Error::InvalidArgument(format!("p = {p} not supported (use 1, 2 or inf)")))
        }
    }

    /// Discrete `L^p(𝕋)` norm of grid samples, with cell weight `2π/n`.
    pub fn norm(&self, samples: &[Complex64]) -> f64 {
        let w = 2.0 * std::f64::consts::PI / samples.len() as f64;
        match self {
            LpExponent::One => w * samples.iter().map(|z| z.norm()).sum::<f64>(),
            LpExponent::Two => (w * samples.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt(),
            LpExponent::Infinity => samples.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }
}

/// Dyadic partition `φ₀ = χ`, `φ(ξ) = χ(ξ) − χ(2ξ)`, blocks `j = 0..=j_max`.
/// The sum telescopes to `χ(2^{−j_max}ξ)`, which is 1 on `|k| ≤ 2^{j_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesovConfig {
    pub j_max: u32,
}

impl BesovConfig {
    pub fn new(j_max: u32) -> Self {
        Self { j_max }
    }

    /// Largest `j_max` whose blocks fit below the Nyquist mode.
    pub fn for_grid(grid: &FourierGrid) -> Self {
        let log2n = usize::BITS - 1 - grid.n_modes().leading_zeros();
        Self::new(log2n.saturating_sub(2))
    }

    pub fn phi0(xi: f64) -> f64 {
        chi(xi)
    }

    pub fn phi(xi: f64) -> f64 {
        chi(xi) - chi(2.0 * xi)
    }

    /// Multiplier of block `j` at wavenumber `k`.
    pub fn weight(&self, j: u32, k: i64) -> f64 {
        let xi = k as f64;
        if j == 0 {
            Self::phi0(xi)
        } else {
            Self::phi(xi / (1u64 << j) as f64)
        }
    }

    /// Highest wavenumber on which the blocks sum to one.
    pub fn resolved_cutoff(&self) -> i64 {
        1i64 << self.j_max
    }

    fn check(&self, grid: &FourierGrid) -> Result<()> {
        if grid.n_modes() < 1usize << (self.j_max + 2) {
            return Err(Error::GridTooCoarse(format!(
                "j_max = {} needs at least {} modes, grid has {}",
                self.j_max,
                1usize << (self.j_max + 2),
                grid.n_modes()
            )));
        }
        Ok(())
    }

    /// `P_j f` as a spectral field.
    pub fn project(&self, field: &SpectralField, j: u32) -> SpectralField {
        field.map_modes(|k, c| c * self.weight(j, k))
    }
}

/// `2^{sj}‖P_j f‖_{L^p}` for `j = 0..=j_max`.
pub fn besov_blocks(samples: &[Complex64], s: f64, p: f64, cfg: &BesovConfig) -> Result<Vec<f64>> {
    let lp = LpExponent::from_f64(p)?;
    let grid = FourierGrid::new(samples.len())?;
    cfg.check(&grid)?;
    let field = to_spectral(&grid, samples)?;
    let blocks: Vec<u32> = (0..=cfg.j_max).collect();
    Ok(crate::par::map(&blocks, |&j| {
        let b = from_spectral(&cfg.project(&field, j));
        2f64.powf(s * j as f64) * lp.norm(&b)
    }))
}

/// `sup_{j ≤ j_max} 2^{sj}‖P_j f‖_{L^p}`.
pub fn besov_norm(samples: &[Complex64], s: f64, p: f64, cfg: &BesovConfig) -> Result<f64> {
    Ok(besov_blocks(samples, s, p, cfg)?.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn smooth_step_shape() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        for t in [0.1, 0.3, 0.77] {
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
        }
        assert_eq!(BesovConfig::phi(1.0), 1.0);
        assert_eq!(BesovConfig::phi(0.5), 0.0);
        assert_eq!(BesovConfig::phi(2.0), 0.0);
    }

    #[test]
    fn partition_of_unity_on_resolved_range() {
        let cfg = BesovConfig::new(10);
        let mut t = 0.0;
        while t <= cfg.resolved_cutoff() as f64 {
            let sum = BesovConfig::phi0(t)
                + (1..=cfg.j_max).map(|j| BesovConfig::phi(t / 2f64.powi(j as i32))).sum::<f64>();
            assert!((sum - 1.0).abs() < 1e-12, "t={t}");
            t += 0.37;
        }
    }

    #[test]
    fn blocks_reconstruct_resolved_modes() {
        let g = make_grid(256).unwrap();
        let cfg = BesovConfig::for_grid(&g);
        assert_eq!(cfg.j_max, 6);
        let f = SpectralField::from_fn(&g, |k| Complex64::new(1.0 / (1.0 + k.abs() as f64), (k as f64).sin()));
        let mut sum = SpectralField::zeros(&g);
        for j in 0..=cfg.j_max {
            sum = sum.add(&cfg.project(&f, j)).unwrap();
        }
        for k in -cfg.resolved_cutoff()..=cfg.resolved_cutoff() {
            assert!((sum.coeff(k) - f.coeff(k)).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_and_single_mode() {
        let g = make_grid(64).unwrap();
        let cfg = BesovConfig::for_grid(&g);
        let c = vec![Complex64::new(-0.7, 0.0); 64];
        assert!((besov_norm(&c, 2.0, 1.0, &cfg).unwrap() - 2.0 * PI * 0.7).abs() < 1e-12);

        // e^{i 8x}: only block 3 sees it, with weight φ(1) = 1
        let wave: Vec<Complex64> = g.points().iter().map(|&x| Complex64::from_polar(1.0, 8.0 * x)).collect();
        let blocks = besov_blocks(&wave, 0.5, 2.0, &cfg).unwrap();
        for (j, b) in blocks.iter().enumerate() {
            let expect = if j == 3 { 2f64.powf(1.5) * (2.0 * PI).sqrt() } else { 0.0 };
            assert!((b - expect).abs() < 1e-12, "j={j}");
        }
        assert!((besov_norm(&wave, 1.0, f64::INFINITY, &cfg).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn weierstrass_ladder() {
        let n = 1 << 12;
        let g = make_grid(n).unwrap();
        let cfg = BesovConfig::for_grid(&g);
        let w: Vec<Complex64> = g
            .points()
            .iter()
            .map(|&x| {
                let v: f64 = (1..=cfg.j_max).map(|j| 2f64.powf(-0.5 * j as f64) * (2f64.powi(j as i32) * x).cos()).sum();
                Complex64::new(v, 0.0)
            })
            .collect();
        let at_half = besov_blocks(&w, 0.5, f64::INFINITY, &cfg).unwrap();
        for b in &at_half[1..] {
            assert!((b - 1.0).abs() < 1e-12);
        }
        let above = besov_blocks(&w, 0.8, f64::INFINITY, &cfg).unwrap();
        assert!(above.windows(2).skip(1).all(|p| p[1] > p[0]));
    }

    #[test]
    fn errors() {
        let cfg = BesovConfig::new(6);
        let small = vec![Complex64::new(0.0, 0.0); 128];
        assert!(matches!(besov_norm(&small, 0.0, 2.0, &cfg), Err(Error::GridTooCoarse(_))));
        let ok = vec![Complex64::new(0.0, 0.0); 256];
        assert!(matches!(besov_norm(&ok, 0.0, 3.0, &cfg), Err(Error::InvalidArgument(_))));
    }
}
