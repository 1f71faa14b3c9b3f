//! Column-based box counting for graphs of sampled functions.

use super::linear_fit;
use crate::error::{Error, Result};

/// Box widths `ε = 2^{−j}` for `j = lo..=hi`, relative to the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicRange {
    pub lo: u32,
    pub hi: u32,
}

/// Coarsest usable width is `1/8`.
const COARSEST: u32 = 3;
/// Minimum number of samples per column for a scale to count.
const MIN_SAMPLES_PER_BOX: usize = 4;
const MIN_SCALES: usize = 4;

impl DyadicRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty scale range {lo}:{hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// `[3, log₂n − 4]`: the admissible widths `[4/n, 1/8]` minus the two finest.
    pub fn default_for(n_samples: usize) -> Self {
        let log2n = (usize::BITS - 1 - n_samples.max(1).leading_zeros()).max(COARSEST + 4);
        Self {
            lo: COARSEST,
            hi: log2n - 4,
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl std::str::FromStr for DyadicRange {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let lo = a.trim().parse().map_err(|e| format!("bad scale `{a}`: {e}"))?;
        let hi = b.trim().parse().map_err(|e| format!("bad scale `{b}`: {e}"))?;
        DyadicRange::new(lo, hi).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    /// Raw regression slope, never clamped.
    pub slope: f64,
    pub stderr: f64,
    /// Box widths that entered the fit.
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DimensionEstimate {
    /// Set when the slope falls outside `[1, 2]`.
    pub fn out_of_range(&self) -> bool {
        !(1.0..=2.0).contains(&self.slope)
    }

    /// `(ln 1/ε, ln count)` pairs used by the fit.
    pub fn log_points(&self) -> Vec<(f64, f64)> {
        self.scales
            .iter()
            .zip(&self.counts)
            .map(|(e, &c)| ((1.0 / e).ln(), (c as f64).ln()))
            .collect()
    }
}

/// Boxes of width `2^{−j}` touched by the polyline through the normalized samples.
/// Each segment `i → i+1` is charged to the column of its left end.
fn count_boxes(xs: &[f64], ys: &[f64], j: u32) -> u64 {
    let cols = 1usize << j;
    let scale = cols as f64;
    let mut lo = vec![f64::INFINITY; cols];
    let mut hi = vec![f64::NEG_INFINITY; cols];
    let col = |x: f64| ((x * scale) as usize).min(cols - 1);
    for i in 0..xs.len() {
        let c = col(xs[i]);
        let mut touch = |y: f64| {
            lo[c] = lo[c].min(y);
            hi[c] = hi[c].max(y);
        };
        touch(ys[i]);
        if i + 1 < xs.len() {
            touch(ys[i + 1]);
        }
    }
    let top = cols as i64 - 1;
    lo.iter()
        .zip(&hi)
        .filter(|(a, _)| a.is_finite())
        .map(|(a, b)| {
            let bot = ((a * scale).floor() as i64).clamp(0, top);
            let up = ((b * scale).floor() as i64).clamp(0, top);
            (up - bot + 1) as u64
        })
        .sum()
}

/// Box-counting dimension of the graph `{(x_i, y_i)}` rescaled to the unit square.
///
/// `xs` must be increasing. Scales with fewer than four samples per column are
/// dropped; fewer than four remaining scales is an error.
pub fn box_dimension(xs: &[f64], ys: &[f64], range: DyadicRange) -> Result<DimensionEstimate> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("abscissae must be strictly increasing".into()));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidArgument("non-finite ordinate".into()));
    }
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let (y0, y1) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let xn: Vec<f64> = xs.iter().map(|x| (x - x0) / (x1 - x0)).collect();
    let yn: Vec<f64> = if y1 > y0 {
        ys.iter().map(|y| (y - y0) / (y1 - y0)).collect()
    } else {
        vec![0.0; ys.len()]
    };
    let scales: Vec<u32> = (range.lo..=range.hi)
        .filter(|&j| xs.len() >> j >= MIN_SAMPLES_PER_BOX)
        .collect();
    if scales.len() < MIN_SCALES {
        return Err(Error::TooFewScales(scales.len()));
    }
    let counts = crate::par::map(&scales, |&j| count_boxes(&xn, &yn, j));
    let widths: Vec<f64> = scales.iter().map(|&j| 2f64.powi(-(j as i32))).collect();
    let est = DimensionEstimate {
        slope: 0.0,
        stderr: 0.0,
        scales: widths,
        counts,
    };
    let fit = linear_fit(&est.log_points());
    Ok(DimensionEstimate {
        slope: fit.slope,
        stderr: fit.stderr,
        ..est
    })
}
