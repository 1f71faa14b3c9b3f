//! CSV tables written and read by the harness. Floats use the shortest
//! round-trip representation, so reruns produce identical bytes.

use std::path::Path;

use num_complex::Complex64;

use crate::analysis::DimensionEstimate;
use crate::error::{Error, Result};
use crate::evolve::{EnergyBalance, Trajectory};

use super::SweepRow;

fn table_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Table {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Renders a header and rows as CSV text.
pub(crate) fn render<I>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let bad = |e: csv::Error| Error::InvalidArgument(format!("csv encoding: {e}"));
    w.write_record(header).map_err(bad)?;
    for row in rows {
        w.write_record(&row).map_err(bad)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv encoding: {e}")))
}

pub(crate) fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let bytes = render(header, rows)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn write_solution(path: &Path, traj: &Trajectory) -> Result<()> {
    let xs = traj.grid().points();
    let samples = crate::par::map(&traj.fields, |f| f.to_samples());
    let rows = traj.times.iter().zip(&samples).flat_map(|(&t, u)| {
        xs.iter()
            .zip(u)
            .map(move |(&x, z)| vec![num(t), num(x), num(z.re), num(z.im)])
    });
    write_table(path, &["t", "x", "re_u", "im_u"], rows)
}

pub(crate) fn write_energy(path: &Path, balance: &EnergyBalance) -> Result<()> {
    let rows = balance
        .times
        .iter()
        .zip(&balance.l2sq)
        .zip(&balance.residual)
        .map(|((&t, &e), r)| vec![num(t), num(e), r.map_or_else(String::new, num)]);
    write_table(path, &["t", "l2sq", "residual"], rows)
}

pub(crate) fn write_revival_coefficients(path: &Path, coeffs: &[Complex64]) -> Result<()> {
    let rows = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| vec![j.to_string(), num(c.re), num(c.im), num(c.norm())]);
    write_table(path, &["j", "re_c", "im_c", "abs_c"], rows)
}

pub(crate) fn write_profile(path: &Path, xs: &[f64], values: &[Complex64]) -> Result<()> {
    let rows = xs
        .iter()
        .zip(values)
        .map(|(&x, z)| vec![num(x), num(z.re), num(z.im), num(z.norm())]);
    write_table(path, &["x", "re_u", "im_u", "abs_u"], rows)
}

pub(crate) fn write_dimension(path: &Path, est: &DimensionEstimate) -> Result<()> {
    let rows = est
        .log_points()
        .into_iter()
        .map(|(a, b)| vec![num(a), num(b)]);
    let mut bytes = render(&["log_inv_eps", "log_count"], rows)?;
    bytes.extend_from_slice(format!("# slope={},stderr={}\n", est.slope, est.stderr).as_bytes());
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_smoothing(path: &Path, rows: &[(f64, f64, f64, usize)]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|&(t, n, l, m)| vec![num(t), num(n), num(l), m.to_string()]);
    write_table(path, &["t", "h_norm_N", "h_norm_linear", "n_modes"], rows)
}

pub(crate) fn write_sweep(path: &Path, param: &str, rows: &[SweepRow]) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            num(r.value),
            num(r.t_end),
            num(r.l2sq),
            num(r.max_cell_increment),
            num(r.h_norm_n),
            r.max_residual.map_or_else(String::new, num),
        ]
    });
    write_table(
        path,
        &[param, "t_end", "l2sq", "max_cell_increment", "h_norm_N", "max_residual"],
        rows,
    )
}

/// One stored time of a `solution.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFrame {
    pub t: f64,
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Reads `t,x,re_u,im_u` rows, grouping consecutive rows with equal `t`.
pub fn read_solution_csv(path: &Path) -> Result<Vec<SolutionFrame>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| table_err(path, e))?;
    let header = reader.headers().map_err(|e| table_err(path, e))?.clone();
    let expected = ["t", "x", "re_u", "im_u"];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(table_err(path, format!("expected columns {expected:?}, got {header:?}")));
    }
    let mut frames: Vec<SolutionFrame> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| table_err(path, e))?;
        let field = |i: usize| -> Result<f64> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| table_err(path, format!("row {}: `{}` is not a number", line + 2, &record[i])))
        };
        let (t, x, re, im) = (field(0)?, field(1)?, field(2)?, field(3)?);
        match frames.last_mut() {
            Some(f) if f.t == t => {
                f.xs.push(x);
                f.values.push(Complex64::new(re, im));
            }
            _ => frames.push(SolutionFrame {
                t,
                xs: vec![x],
                values: vec![Complex64::new(re, im)],
            }),
        }
    }
    Ok(frames)
}
