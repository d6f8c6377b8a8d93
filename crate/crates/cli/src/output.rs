//! Output files: CSV rows, snapshot tables, JSON summary.
//!
//! Every floating-point value is printed with 17 significant digits in
//! scientific notation with a `.` decimal separator, so identical runs
//! produce byte-identical files and values round-trip exactly.

use serde::Serialize;
use starwave::experiments::ExperimentReport;
use starwave::wave::GraphWave;
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str =
    "experiment,hbar,mass,sigma0,q,p,sign,n_edges,cutoff,eta,x_max,grid_n,t,lhs,rhs,pass,tail_mass,refine_delta";

/// One CSV line: the parameter point, the bound comparison, and its
/// diagnostics. `flags` only appears in the JSON summary.
#[derive(Clone, Serialize)]
pub struct Row {
    pub experiment: String,
    pub hbar: f64,
    pub mass: f64,
    pub sigma0: Option<f64>,
    pub q: Option<f64>,
    pub p: Option<f64>,
    pub sign: Option<String>,
    pub n_edges: Option<usize>,
    pub cutoff: Option<String>,
    pub eta: Option<f64>,
    pub x_max: f64,
    pub grid_n: usize,
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub tail_mass: f64,
    pub refine_delta: f64,
    pub flags: Vec<String>,
}

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

impl Row {
    pub fn csv_line(&self) -> String {
        let cols = [
            self.experiment.clone(),
            fmt(self.hbar),
            fmt(self.mass),
            fmt_opt(self.sigma0),
            fmt_opt(self.q),
            fmt_opt(self.p),
            self.sign.clone().unwrap_or_default(),
            self.n_edges.map(|n| n.to_string()).unwrap_or_default(),
            self.cutoff.clone().unwrap_or_default(),
            fmt_opt(self.eta),
            fmt(self.x_max),
            self.grid_n.to_string(),
            fmt_opt(self.t),
            fmt(self.lhs),
            fmt(self.rhs),
            self.pass.to_string(),
            fmt(self.tail_mass),
            fmt(self.refine_delta),
        ];
        cols.join(",")
    }
}

impl From<&ExperimentReport<f64>> for Row {
    fn from(r: &ExperimentReport<f64>) -> Self {
        Row {
            experiment: r.experiment.to_string(),
            hbar: r.params.hbar,
            mass: r.params.mass,
            sigma0: r.params.sigma0,
            q: r.params.q,
            p: r.params.p,
            sign: r.params.sign.map(|s| s.label().to_string()),
            n_edges: r.params.n_edges,
            cutoff: r.params.cutoff.map(str::to_string),
            eta: r.params.eta,
            x_max: r.params.x_max,
            grid_n: r.params.grid_n,
            t: r.params.t,
            lhs: r.lhs,
            rhs: r.rhs,
            pass: r.pass,
            tail_mass: r.tail_mass,
            refine_delta: r.refine_delta,
            flags: r.flags.clone(),
        }
    }
}

/// Position-space table of a graph state: one row per grid node, with the
/// real part, imaginary part, and squared modulus of every edge.
pub fn snapshot_csv(wave: &GraphWave<f64>) -> String {
    let grid = *wave.grid();
    let mut header = String::from("x");
    for e in 0..wave.n_edges() {
        header.push_str(&format!(",e{e}_re,e{e}_im,e{e}_abs2"));
    }
    let mut out = header;
    out.push('\n');
    for i in 0..grid.interior_len() {
        let mut line = fmt(grid.node(i + 1));
        for edge in wave.edges() {
            let v = edge.values()[i];
            line.push_str(&format!(",{},{},{}", fmt(v.re), fmt(v.im), fmt(v.norm_sqr())));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    row_count: usize,
    failure_count: usize,
    all_pass: bool,
    extras: Option<serde_json::Value>,
    rows: &'a [Row],
}

/// Writes the CSV, the JSON summary, and any side files (snapshots, the
/// scattering matrix) into `dir`.
pub fn write_all(
    dir: &Path,
    experiment_id: &str,
    rows: &[Row],
    all_pass: bool,
    extras: Option<serde_json::Value>,
    side_files: &[(String, String)],
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    write_file(&dir.join(format!("{experiment_id}.csv")), csv.as_bytes())?;

    let summary = Summary {
        experiment: experiment_id,
        row_count: rows.len(),
        failure_count: rows.iter().filter(|r| !r.pass).count(),
        all_pass,
        extras,
        rows,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    write_file(&dir.join("results.json"), json.as_bytes())?;

    for (name, contents) in side_files {
        write_file(&dir.join(name), contents.as_bytes())?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)
}
