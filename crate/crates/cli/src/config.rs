//! Run configuration: TOML schema, command-line overrides, validation.
//!
//! The file is divided into sections:
//!
//! ```toml
//! [physics]
//! hbar = 0.1              # or: hbar_sweep = [0.1, 0.05]
//! mass = 1.0              # optional, default 1.0
//! sigma0 = 1.0            # optional, default 1.0
//! q = 2.0
//! p = -1.0
//! n_edges = 3             # optional, default 3
//!
//! [cutoff]                # optional section, default bare
//! variant = "smooth"      # bare | sharp | smooth
//! eta = 0.25              # required for sharp and smooth
//!
//! [grid]                  # optional section, default auto
//! x_max = "auto"          # or a positive length
//! n_points = 2048         # optional with auto, required with explicit x_max
//!
//! [times]                 # required by time-dependent experiments
//! list = [0.5, 1.0, 2.0]  # or: start / stop / count / spacing
//!
//! [output]                # optional section
//! dir = "out"
//! ```
//!
//! `nd-decay` interprets `q` as the probe bump center and `eta` as its ramp
//! parameter, and requires an explicit grid; its physical units are fixed
//! internally.

use serde::Deserialize;
use starwave::states::{CoherentParams, CutoffSpec};
use std::path::PathBuf;

use crate::run::Experiment;
use crate::Cli;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    physics: PhysicsSection,
    cutoff: Option<CutoffSection>,
    grid: Option<GridSection>,
    times: Option<TimesSection>,
    output: Option<OutputSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicsSection {
    hbar: Option<f64>,
    hbar_sweep: Option<Vec<f64>>,
    #[serde(default = "one")]
    mass: f64,
    #[serde(default = "one")]
    sigma0: f64,
    q: f64,
    p: f64,
    #[serde(default = "three")]
    n_edges: usize,
}

fn one() -> f64 {
    1.0
}

fn three() -> usize {
    3
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CutoffSection {
    variant: String,
    eta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    x_max: Option<XMax>,
    n_points: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum XMax {
    Length(f64),
    Keyword(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TimesSection {
    list: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    spacing: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: String,
}

/// Fully resolved and validated run description.
pub struct RunConfig {
    pub experiment: Experiment,
    pub hbars: Vec<f64>,
    pub mass: f64,
    pub sigma0: f64,
    pub q: f64,
    pub p: f64,
    pub n_edges: usize,
    pub cutoff: CutoffSpec<f64>,
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub out_dir: PathBuf,
}

/// Grid choice: the automatic sizing formula or explicit dimensions. An
/// explicit point count may override the automatic one.
#[derive(Clone, Copy)]
pub enum GridSpec {
    Auto { n_override: Option<usize> },
    Explicit { x_max: f64, n_points: usize },
}

impl RunConfig {
    /// One packet parameter set per sweep value.
    pub fn coherent(&self, hbar: f64) -> starwave::Result<CoherentParams<f64>> {
        CoherentParams::new(hbar, self.mass, self.sigma0, self.q, self.p)
    }
}

fn fail(msg: impl Into<String>) -> String {
    format!("config error: {}", msg.into())
}

pub fn load(cli: &Cli) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| fail(format!("cannot read {}: {e}", cli.config.display())))?;
    let file: FileConfig = toml::from_str(&text).map_err(|e| fail(e.to_string()))?;
    resolve(cli, file)
}

fn resolve(cli: &Cli, file: FileConfig) -> Result<RunConfig, String> {
    let hbars = resolve_hbars(&cli.hbar, &file.physics)?;
    let mass = file.physics.mass;
    let sigma0 = file.physics.sigma0;
    let q = file.physics.q;
    let p = file.physics.p;
    let n_edges = file.physics.n_edges;
    if n_edges == 0 {
        return Err(fail("n_edges must be at least 1"));
    }
    for &h in &hbars {
        CoherentParams::new(h, mass, sigma0, q, p).map_err(|e| fail(e.to_string()))?;
    }

    let cutoff = resolve_cutoff(file.cutoff.as_ref())?;
    let grid = resolve_grid_spec(cli.grid_n, file.grid.as_ref())?;
    let times = match file.times.as_ref() {
        Some(section) => resolve_times(section)?,
        None => Vec::new(),
    };

    let experiment = cli.experiment;
    if experiment.needs_times() && times.is_empty() {
        return Err(fail(format!(
            "experiment {} needs a [times] section",
            experiment.id()
        )));
    }
    if experiment == Experiment::NdDecay {
        if matches!(grid, GridSpec::Auto { .. }) {
            return Err(fail(
                "nd-decay needs an explicit grid: the automatic formula sizes for \
                 wave packets, not for the long-time probe",
            ));
        }
        if cutoff.label() != "smooth" {
            return Err(fail(
                "nd-decay needs the smooth cutoff variant; its eta shapes the probe bump",
            ));
        }
        let increasing = times.windows(2).all(|w| w[0] < w[1]);
        if !(times[0] > 0.0 && increasing) {
            return Err(fail("nd-decay times must be positive and increasing"));
        }
    }

    let out_dir = cli
        .out
        .clone()
        .or_else(|| file.output.map(|o| PathBuf::from(o.dir)))
        .unwrap_or_else(|| PathBuf::from("out"));

    Ok(RunConfig {
        experiment,
        hbars,
        mass,
        sigma0,
        q,
        p,
        n_edges,
        cutoff,
        grid,
        times,
        out_dir,
    })
}

fn resolve_hbars(overrides: &[f64], physics: &PhysicsSection) -> Result<Vec<f64>, String> {
    let hbars = if !overrides.is_empty() {
        overrides.to_vec()
    } else {
        match (physics.hbar, physics.hbar_sweep.as_ref()) {
            (Some(_), Some(_)) => {
                return Err(fail("give either hbar or hbar_sweep, not both"));
            }
            (Some(h), None) => vec![h],
            (None, Some(sweep)) => sweep.clone(),
            (None, None) => {
                return Err(fail("one of hbar or hbar_sweep is required"));
            }
        }
    };
    if hbars.is_empty() {
        return Err(fail("hbar sweep must be non-empty"));
    }
    if !hbars.iter().all(|h| h.is_finite() && *h > 0.0) {
        return Err(fail("every hbar must be finite and positive"));
    }
    Ok(hbars)
}

fn resolve_cutoff(section: Option<&CutoffSection>) -> Result<CutoffSpec<f64>, String> {
    let Some(section) = section else {
        return Ok(CutoffSpec::bare());
    };
    match section.variant.as_str() {
        "bare" => Ok(CutoffSpec::bare()),
        "sharp" => {
            let eta = section
                .eta
                .ok_or_else(|| fail("sharp cutoff needs eta"))?;
            CutoffSpec::sharp(eta).map_err(|e| fail(e.to_string()))
        }
        "smooth" => {
            let eta = section
                .eta
                .ok_or_else(|| fail("smooth cutoff needs eta"))?;
            CutoffSpec::smooth(eta).map_err(|e| fail(e.to_string()))
        }
        other => Err(fail(format!(
            "unknown cutoff variant {other:?}; expected bare, sharp, or smooth"
        ))),
    }
}

fn resolve_grid_spec(
    n_flag: Option<usize>,
    section: Option<&GridSection>,
) -> Result<GridSpec, String> {
    let (x_max, n_points) = match section {
        Some(s) => (s.x_max.as_ref(), s.n_points),
        None => (None, None),
    };
    let n_points = n_flag.or(n_points);
    match x_max {
        None => Ok(GridSpec::Auto { n_override: n_points }),
        Some(XMax::Keyword(word)) if word == "auto" => {
            Ok(GridSpec::Auto { n_override: n_points })
        }
        Some(XMax::Keyword(word)) => Err(fail(format!(
            "x_max must be a positive length or \"auto\", got {word:?}"
        ))),
        Some(XMax::Length(len)) => {
            if !(len.is_finite() && *len > 0.0) {
                return Err(fail("x_max must be finite and positive"));
            }
            let n = n_points
                .ok_or_else(|| fail("explicit x_max needs n_points (or --grid-n)"))?;
            Ok(GridSpec::Explicit {
                x_max: *len,
                n_points: n,
            })
        }
    }
}

fn resolve_times(section: &TimesSection) -> Result<Vec<f64>, String> {
    let range_given =
        section.start.is_some() || section.stop.is_some() || section.count.is_some();
    match (&section.list, range_given) {
        (Some(_), true) => Err(fail("give either a times list or a range, not both")),
        (Some(list), false) => {
            if list.is_empty() {
                return Err(fail("times list must be non-empty"));
            }
            if !list.iter().all(|t| t.is_finite()) {
                return Err(fail("every time must be finite"));
            }
            Ok(list.clone())
        }
        (None, false) => Err(fail("[times] needs either list or start/stop/count")),
        (None, true) => {
            let start = section.start.ok_or_else(|| fail("times range needs start"))?;
            let stop = section.stop.ok_or_else(|| fail("times range needs stop"))?;
            let count = section.count.ok_or_else(|| fail("times range needs count"))?;
            if count == 0 {
                return Err(fail("times count must be at least 1"));
            }
            if !(start.is_finite() && stop.is_finite()) {
                return Err(fail("times range must be finite"));
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let spacing = section.spacing.as_deref().unwrap_or("linear");
            let steps = (count - 1) as f64;
            let values: Vec<f64> = match spacing {
                "linear" => (0..count)
                    .map(|i| start + (stop - start) * i as f64 / steps)
                    .collect(),
                "geometric" => {
                    if start <= 0.0 || stop <= 0.0 {
                        return Err(fail("geometric times need positive endpoints"));
                    }
                    let ratio = (stop / start).powf(1.0 / steps);
                    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
                }
                other => {
                    return Err(fail(format!(
                        "unknown spacing {other:?}; expected linear or geometric"
                    )));
                }
            };
            Ok(values)
        }
    }
}
