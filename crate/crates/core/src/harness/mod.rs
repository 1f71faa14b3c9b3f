//! Experiment orchestration: run configs, named presets, CSV output and run
//! reports. Everything here is deterministic for a fixed config and seed.

mod csvio;
mod presets;

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use csvio::{read_solution_csv, SolutionFrame};
pub use presets::Preset;

use crate::analysis::{box_dimension, sobolev_norm, DimensionEstimate, DyadicRange};
use crate::decompose::duhamel_part;
use crate::error::{Error, Result};
use crate::evolve::{energy_balance_residual, solve, Dealias, Scheme, SolverConfig, Trajectory};
use crate::grid::{make_grid, ModelParams, SpectralField};
use crate::profiles::AnalyticProfile;
use crate::propagator::{linear_evolve, revival_coefficients, revival_evolve, RationalTime};

/// Keys of a single simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub modes: usize,
    pub beta: f64,
    pub theta: f64,
    pub profile: String,
    pub amplitude: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub dealias: Dealias,
    pub stride: usize,
    pub out_dir: PathBuf,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            modes: 1024,
            beta: 1.0,
            theta: 0.0,
            profile: "step".into(),
            amplitude: 0.1,
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::Etd4,
            dealias: Dealias::TwoThirds,
            stride: 100,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl SimulateConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain config serializes")
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            theta: self.theta,
            ..ModelParams::with_beta(self.beta)
        }
    }

    pub fn profile(&self) -> Result<AnalyticProfile> {
        AnalyticProfile::from_name(&self.profile, self.amplitude)
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        Ok(SolverConfig::new(make_grid(self.modes)?, self.dt)
            .with_scheme(self.scheme)
            .with_dealias(self.dealias)
            .with_stride(self.stride))
    }

    pub fn run(&self) -> Result<Trajectory> {
        solve(&self.profile()?, self.t_end, &self.params(), &self.solver()?)
    }
}

/// Optional replacements for [`SimulateConfig`] keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dealias: Option<Dealias>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, base: &SimulateConfig) -> SimulateConfig {
        let mut c = base.clone();
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { c.$f = v.clone(); } )* };
        }
        take!(modes, beta, theta, profile, amplitude, dt, t_end, scheme, dealias, stride, out_dir);
        c
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// A preset run: which experiment, its seed, where outputs go, and key overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    #[serde(default)]
    pub seed: u64,
    pub out_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Overrides::is_empty")]
    pub overrides: Overrides,
}

impl ExperimentConfig {
    pub fn new(preset: &str, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            preset: preset.into(),
            seed,
            out_dir: out_dir.into(),
            overrides: Overrides::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain config serializes")
    }
}

/// One acceptance check: the measured value and the target it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub target: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, measured: f64, target: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            measured,
            target: target.into(),
        }
    }

    /// `lo ≤ measured ≤ hi`.
    pub fn within(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, measured >= lo && measured <= hi, measured, format!("[{lo}, {hi}]"))
    }

    /// `measured < limit`.
    pub fn below(name: &str, measured: f64, limit: f64) -> Self {
        Self::new(name, measured < limit, measured, format!("< {limit:e}"))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: measured {:.6e}, target {}", self.name, self.measured, self.target)
    }
}

/// Written to `out_dir/report.toml` after every preset run, failed or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub preset: String,
    pub seed: u64,
    pub threads: usize,
    pub pass: bool,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub files: Vec<String>,
    pub resolved_config: String,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// What a preset hands back: its checks and the files it wrote.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Runs a preset end to end. Acceptance failures come back as a report with
/// `pass = false`; operational errors are returned after the report is written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let preset = Preset::from_str(&cfg.preset)?;
    let dir = cfg.out_dir.as_path();
    create_dir(dir)?;
    let resolved = cfg.to_toml();
    let resolved_path = dir.join("config.resolved");
    write_text(&resolved_path, &resolved)?;
    let start = Instant::now();
    let outcome = preset.run(cfg.seed, &cfg.overrides, dir);
    let wall_time_s = start.elapsed().as_secs_f64();
    let (checks, mut files, error) = match &outcome {
        Ok(o) => (o.checks.clone(), o.files.iter().map(|p| file_name(p)).collect(), None),
        Err(e) => (
            vec![Check::new(&format!("{} (operational error)", preset.name()), false, f64::NAN, e.to_string())],
            Vec::new(),
            Some(e.to_string()),
        ),
    };
    files.insert(0, file_name(&resolved_path));
    let report = RunReport {
        preset: preset.name().into(),
        seed: cfg.seed,
        threads: crate::par::workers(),
        pass: error.is_none() && checks.iter().all(|c| c.pass),
        wall_time_s,
        error,
        files,
        resolved_config: resolved,
        checks,
    };
    write_text(&dir.join("report.toml"), &report.to_toml())?;
    outcome.map(|_| report)
}

/// Runs one simulation and writes `config.resolved`, `solution.csv` and `energy.csv`.
pub fn simulate(cfg: &SimulateConfig) -> Result<Vec<PathBuf>> {
    let dir = cfg.out_dir.as_path();
    create_dir(dir)?;
    let resolved = dir.join("config.resolved");
    write_text(&resolved, &cfg.to_toml())?;
    let traj = cfg.run()?;
    let solution = dir.join("solution.csv");
    csvio::write_solution(&solution, &traj)?;
    let energy = dir.join("energy.csv");
    let balance = match energy_balance_residual(&traj) {
        Ok(b) => b,
        Err(Error::TooFewFrames { .. }) => crate::evolve::EnergyBalance {
            times: traj.times.clone(),
            l2sq: traj.fields.iter().map(SpectralField::l2sq).collect(),
            residual: vec![None; traj.len()],
        },
        Err(e) => return Err(e),
    };
    csvio::write_energy(&energy, &balance)?;
    Ok(vec![resolved, solution, energy])
}

/// Inputs of the `revival` command.
#[derive(Debug, Clone, PartialEq)]
pub struct RevivalRequest {
    pub p: u64,
    pub q: u64,
    pub beta: f64,
    pub profile: String,
    pub amplitude: f64,
    pub modes: usize,
}

/// Companion path for the evolved profile: `NAME.csv` becomes `NAME_profile.csv`.
pub fn profile_csv_path(coeff_path: &Path) -> PathBuf {
    let stem = coeff_path.file_stem().map_or_else(|| "revival".into(), |s| s.to_string_lossy().into_owned());
    coeff_path.with_file_name(format!("{stem}_profile.csv"))
}

/// Writes the translate coefficients at `t = πp/q` to `out` and the evolved
/// profile on the grid to [`profile_csv_path`]`(out)`.
pub fn revival(req: &RevivalRequest, out: &Path) -> Result<(PathBuf, PathBuf)> {
    let rt = RationalTime::new(req.p, req.q)?;
    let params = ModelParams::with_beta(req.beta);
    let profile = AnalyticProfile::from_name(&req.profile, req.amplitude)?;
    let grid = make_grid(req.modes)?;
    let rep = revival_coefficients(rt, &params)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    csvio::write_revival_coefficients(out, &rep.coefficients)?;
    let xs = grid.points();
    let values: Vec<Complex64> = if profile.is_pointwise() {
        xs.iter()
            .map(|&x| rep.evaluate_profile(&profile, x).expect("pointwise profile"))
            .collect()
    } else {
        revival_evolve(&profile, rt, &params, &grid)?.to_samples()
    };
    let second = profile_csv_path(out);
    csvio::write_profile(&second, &xs, &values)?;
    Ok((out.to_path_buf(), second))
}

/// Real or imaginary part of a complex sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Re,
    Im,
}

impl Component {
    pub fn of(&self, z: Complex64) -> f64 {
        match self {
            Component::Re => z.re,
            Component::Im => z.im,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Component::Re => "re",
            Component::Im => "im",
        }
    }
}

impl FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "re" => Ok(Component::Re),
            "im" => Ok(Component::Im),
            _ => Err(Error::InvalidArgument(format!("component must be re or im, got `{s}`"))),
        }
    }
}

/// Graph of one component over a full period, with the wrap-around sample
/// appended so the polyline closes at `x = 2π`.
pub fn periodic_graph(xs: &[f64], values: &[Complex64], component: Component) -> (Vec<f64>, Vec<f64>) {
    let mut gx = xs.to_vec();
    let mut gy: Vec<f64> = values.iter().map(|&z| component.of(z)).collect();
    if let (Some(&x0), Some(&y0)) = (gx.first(), gy.first()) {
        gx.push(x0 + 2.0 * PI);
        gy.push(y0);
    }
    (gx, gy)
}

/// Box-counting dimension of one stored frame of a `solution.csv` (the frame
/// nearest `time`, or the last one), written as `log_inv_eps,log_count` rows
/// followed by a `# slope=…,stderr=…` summary line.
pub fn dimension(
    input: &Path,
    component: Component,
    scales: Option<DyadicRange>,
    time: Option<f64>,
    out: &Path,
) -> Result<DimensionEstimate> {
    let frames = read_solution_csv(input)?;
    let frame = match time {
        None => frames.last(),
        Some(t) => frames
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs())),
    }
    .ok_or_else(|| Error::InvalidArgument(format!("{} holds no frames", input.display())))?;
    let (xs, ys) = periodic_graph(&frame.xs, &frame.values, component);
    let range = scales.unwrap_or_else(|| DyadicRange::default_for(xs.len()));
    let est = box_dimension(&xs, &ys, range)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    csvio::write_dimension(out, &est)?;
    Ok(est)
}

/// Runs the config and writes `smoothing.csv`: `‖N(t)‖_{H^order}` next to
/// the same norm of the free evolution, per stored frame.
pub fn smoothing(cfg: &SimulateConfig, order: f64) -> Result<PathBuf> {
    let dir = cfg.out_dir.as_path();
    create_dir(dir)?;
    write_text(&dir.join("config.resolved"), &cfg.to_toml())?;
    let traj = cfg.run()?;
    let rows = smoothing_rows(&traj, order);
    let path = dir.join("smoothing.csv");
    csvio::write_smoothing(&path, &rows)?;
    Ok(path)
}

/// `(t, ‖N‖, ‖linear part‖, n_modes)` per stored frame.
pub(crate) fn smoothing_rows(traj: &Trajectory, order: f64) -> Vec<(f64, f64, f64, usize)> {
    let series = duhamel_part(traj);
    let n = traj.grid().n_modes();
    crate::par::map_range(traj.len(), |i| {
        let lin = linear_evolve(&traj.initial, traj.times[i], &traj.params);
        (
            traj.times[i],
            sobolev_norm(&series.n_fields[i], order),
            sobolev_norm(&lin, order),
            n,
        )
    })
}

/// Config key varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Modes,
    Dt,
    Amplitude,
    TEnd,
    Beta,
    Theta,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Modes => "modes",
            SweepParam::Dt => "dt",
            SweepParam::Amplitude => "amplitude",
            SweepParam::TEnd => "t_end",
            SweepParam::Beta => "beta",
            SweepParam::Theta => "theta",
        }
    }

    pub fn apply(&self, base: &SimulateConfig, value: f64) -> Result<SimulateConfig> {
        let mut c = base.clone();
        match self {
            SweepParam::Modes => {
                if value.fract() != 0.0 || value < 4.0 {
                    return Err(Error::InvalidArgument(format!("modes must be an integer >= 4, got {value}")));
                }
                c.modes = value as usize;
            }
            SweepParam::Dt => c.dt = value,
            SweepParam::Amplitude => c.amplitude = value,
            SweepParam::TEnd => c.t_end = value,
            SweepParam::Beta => c.beta = value,
            SweepParam::Theta => c.theta = value,
        }
        Ok(c)
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "modes" => SweepParam::Modes,
            "dt" => SweepParam::Dt,
            "amplitude" => SweepParam::Amplitude,
            "t_end" => SweepParam::TEnd,
            "beta" => SweepParam::Beta,
            "theta" => SweepParam::Theta,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown sweep parameter `{s}` (modes|dt|amplitude|t_end|beta|theta)"
                )))
            }
        })
    }
}

/// One line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub t_end: f64,
    pub l2sq: f64,
    pub max_cell_increment: f64,
    pub h_norm_n: f64,
    pub max_residual: Option<f64>,
}

/// Runs the config once per value of `param` (runs fan out over the worker
/// pool) and writes `sweep.csv` with end-of-run diagnostics in input order.
pub fn sweep(base: &SimulateConfig, param: SweepParam, values: &[f64], order: f64) -> Result<PathBuf> {
    let configs = values
        .iter()
        .map(|&v| param.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let dir = base.out_dir.as_path();
    create_dir(dir)?;
    write_text(&dir.join("config.resolved"), &base.to_toml())?;
    let rows = crate::par::map(&configs, |c| -> Result<SweepRow> {
        let traj = c.run()?;
        let last = traj.fields.last().expect("trajectory holds the initial frame");
        let n_last = duhamel_part(&traj).n_fields.pop().expect("non-empty series");
        let residual = energy_balance_residual(&traj).ok().map(|b| b.max_abs_residual());
        Ok(SweepRow {
            value: 0.0,
            t_end: traj.t_end(),
            l2sq: last.l2sq(),
            max_cell_increment: crate::propagator::max_cell_increment(&last.to_samples()),
            h_norm_n: sobolev_norm(&n_last, order),
            max_residual: residual,
        })
    });
    let rows = rows
        .into_iter()
        .zip(values)
        .map(|(r, &v)| r.map(|row| SweepRow { value: v, ..row }))
        .collect::<Result<Vec<_>>>()?;
    let path = dir.join("sweep.csv");
    csvio::write_sweep(&path, param.name(), &rows)?;
    Ok(path)
}
