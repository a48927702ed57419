//! Parameter sweeps, state dumps, figure datasets and the oracle harness.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{
    amplitude_record, assemble, compute_amplitudes, format_number, ModelParams, PerturbativeAmplitudes,
    XStateCoefficients, AMPLITUDE_CSV_HEADER,
};
use crate::bloch::{random_state, StateJson, StateKind, TwoQubitDensityMatrix};
use crate::error::{Error, Result};
use crate::measures::{self, report, CorrelationReport, B_CLASSICAL};
use crate::oracles::{self, DirectionGrid};

/// Couplings of the default sweep: weak, medium and strong, all inside the
/// region where the assembled state stays positive at the default cutoff.
pub const DEFAULT_COUPLINGS: [f64; 3] = [0.02, 0.05, 0.08];
pub const DEFAULT_XI_STEPS: usize = 401;

pub const SWEEP_CSV_HEADER: [&str; 19] = [
    "xi",
    "K",
    "r_bar",
    "cutoff",
    "re_A",
    "re_X",
    "im_X",
    "u2",
    "v2",
    "re_L",
    "im_L",
    "g2",
    "c",
    "sqrtD",
    "negativity",
    "conn_corr",
    "bell_chsh",
    "bell_opt",
    "hierarchy_ok",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_steps: usize,
    pub couplings: Vec<f64>,
    /// Shared settings; the coupling field is overridden per block.
    pub params: ModelParams,
    pub output_path: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            xi_min: 0.0,
            xi_max: 2.0,
            xi_steps: DEFAULT_XI_STEPS,
            couplings: DEFAULT_COUPLINGS.to_vec(),
            params: ModelParams::default(),
            output_path: None,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.xi_min >= 0.0 && self.xi_min < self.xi_max && self.xi_max.is_finite()) {
            return bad(format!("need 0 <= xi_min < xi_max, got [{}, {}]", self.xi_min, self.xi_max));
        }
        if self.xi_steps < 2 {
            return bad(format!("xi_steps must be >= 2, got {}", self.xi_steps));
        }
        if self.couplings.is_empty() {
            return bad("at least one coupling is required".into());
        }
        for &k in &self.couplings {
            self.params.with_coupling(k).validate()?;
        }
        self.params.validate()
    }

    /// Evenly spaced times with both end points exact.
    pub fn xi_grid(&self) -> Vec<f64> {
        let n = self.xi_steps - 1;
        let span = self.xi_max - self.xi_min;
        (0..=n).map(|i| if i == n { self.xi_max } else { self.xi_min + span * i as f64 / n as f64 }).collect()
    }

    /// Distinct couplings in ascending order.
    pub fn sorted_couplings(&self) -> Vec<f64> {
        let mut ks = self.couplings.clone();
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        ks
    }
}

/// Everything computed at one `(xi, K)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: ModelParams,
    pub amplitudes: PerturbativeAmplitudes,
    pub coefficients: XStateCoefficients,
    pub rho: TwoQubitDensityMatrix,
    pub report: CorrelationReport,
}

impl SweepRow {
    pub fn xi(&self) -> f64 {
        self.amplitudes.xi
    }

    pub fn coupling(&self) -> f64 {
        self.params.coupling
    }

    pub fn record(&self) -> Vec<String> {
        let mut rec = amplitude_record(&self.params, &self.amplitudes, self.coefficients.c);
        let r = &self.report;
        for v in [r.sqrt_discord, r.negativity, r.connected_corr, r.bell_chsh, r.bell_opt] {
            rec.push(format_number(v));
        }
        rec.push(r.hierarchy_ok.to_string());
        rec
    }
}

/// Amplitudes, assembled state and closed-form report at one point.
pub fn evaluate_point(params: &ModelParams, xi: f64) -> Result<SweepRow> {
    let amplitudes = compute_amplitudes(params, xi)?;
    let (coefficients, rho) = assemble(params, &amplitudes)?;
    let report = report(&rho, &coefficients, &amplitudes);
    Ok(SweepRow { params: *params, amplitudes, coefficients, rho, report })
}

/// Rows ordered by `(K, xi)`. Points are evaluated in parallel; the first
/// failing point in that order is reported.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.xi_grid();
    let points: Vec<(ModelParams, f64)> = spec
        .sorted_couplings()
        .into_iter()
        .flat_map(|k| grid.iter().map(move |&xi| (k, xi)))
        .map(|(k, xi)| (spec.params.with_coupling(k), xi))
        .collect();
    points.par_iter().map(|(p, xi)| evaluate_point(p, *xi)).collect::<Vec<_>>().into_iter().collect()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        out.write_record(row.record())?;
    }
    out.flush()?;
    Ok(())
}

/// The amplitude columns only.
pub fn write_amplitude_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(AMPLITUDE_CSV_HEADER)?;
    for row in rows {
        out.write_record(amplitude_record(&row.params, &row.amplitudes, row.coefficients.c))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the rows with a subset of sweep columns, plus constant columns
/// appended at the end.
fn write_columns(path: &Path, rows: &[SweepRow], columns: &[&str], constants: &[(&str, f64)]) -> Result<()> {
    let idx: Vec<usize> =
        columns.iter().map(|c| SWEEP_CSV_HEADER.iter().position(|h| h == c).expect("known sweep column")).collect();
    let mut out = csv_writer(std::fs::File::create(path)?);
    let header: Vec<&str> = columns.iter().copied().chain(constants.iter().map(|(n, _)| *n)).collect();
    out.write_record(&header)?;
    for row in rows {
        let full = row.record();
        let mut rec: Vec<String> = idx.iter().map(|&i| full[i].clone()).collect();
        rec.extend(constants.iter().map(|(_, v)| format_number(*v)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Document produced by `state`: parameters, amplitudes, coefficients and
/// the normalized matrix, in that key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub params: ModelParams,
    pub amplitudes: PerturbativeAmplitudes,
    pub coefficients: XStateCoefficients,
    pub rho: StateJson,
}

impl StateDump {
    pub fn density_matrix(&self) -> Result<TwoQubitDensityMatrix> {
        self.rho.clone().try_into()
    }
}

pub fn state_dump(params: &ModelParams, xi: f64) -> Result<StateDump> {
    let row = evaluate_point(params, xi)?;
    Ok(StateDump {
        params: row.params,
        amplitudes: row.amplitudes,
        coefficients: row.coefficients,
        rho: StateJson::from(&row.rho),
    })
}

pub fn state_dump_json(params: &ModelParams, xi: f64) -> Result<String> {
    Ok(serde_json::to_string_pretty(&state_dump(params, xi)?)?)
}

pub fn load_state_dump(text: &str) -> Result<StateDump> {
    Ok(serde_json::from_str(text)?)
}

/// Couplings of the time-by-coupling grid in `fig4.csv`.
pub const FIG4_COUPLINGS: [f64; 8] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08];

/// Writes `fig1.csv`, `fig4.csv` and `fig5.csv` into `out_dir` and returns
/// their paths. `base` supplies everything except the couplings and the
/// two-photon flag of `fig5.csv`, which is always on.
pub fn figures(out_dir: &Path, base: &SweepSpec) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let fig1_rows = run_sweep(base)?;
    let fig1 = out_dir.join("fig1.csv");
    write_columns(&fig1, &fig1_rows, &["xi", "K", "sqrtD", "negativity", "conn_corr"], &[])?;

    let grid_spec = SweepSpec { couplings: FIG4_COUPLINGS.to_vec(), ..base.clone() };
    let fig4 = out_dir.join("fig4.csv");
    write_columns(&fig4, &run_sweep(&grid_spec)?, &["xi", "K", "conn_corr", "sqrtD", "negativity"], &[])?;

    let bell_spec = SweepSpec { params: ModelParams { include_two_photon: true, ..base.params }, ..base.clone() };
    let bell_rows = if base.params.include_two_photon { fig1_rows } else { run_sweep(&bell_spec)? };
    let fig5 = out_dir.join("fig5.csv");
    write_columns(&fig5, &bell_rows, &["xi", "K", "bell_chsh", "bell_opt"], &[("bell_classical", B_CLASSICAL)])?;
    Ok(vec![fig1, fig4, fig5])
}

/// One closed-form measure compared against its oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub measure: String,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub worst_kind: String,
    pub worst_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleBreach {
    pub measure: String,
    pub kind: String,
    pub seed: u64,
    pub formula: f64,
    pub oracle: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub count: usize,
    pub seed: u64,
    pub grid: DirectionGrid,
    pub comparisons: Vec<OracleComparison>,
    pub breaches: Vec<OracleBreach>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.breaches.is_empty()
    }
}

pub const DISCORD_ORACLE_TOL: f64 = 1e-5;
pub const MAXCORR_ORACLE_TOL: f64 = 1e-5;
pub const NEGATIVITY_ORACLE_TOL: f64 = 1e-12;
pub const CHSH_ORACLE_TOL: f64 = 1e-5;

const ORACLE_KINDS: [(StateKind, &str); 3] =
    [(StateKind::Pure, "pure"), (StateKind::Mixed, "mixed"), (StateKind::XShape, "xshape")];

/// Seed of the `index`-th state of a kind, derived from the run seed.
pub fn oracle_state_seed(seed: u64, kind_index: usize, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((kind_index as u64) << 40) ^ index as u64
}

/// Formula and oracle values for one state, in the order of
/// [`ORACLE_MEASURES`].
fn oracle_pairs(rho: &TwoQubitDensityMatrix, grid: &DirectionGrid) -> [(f64, f64); 4] {
    [
        (measures::geometric_discord(rho), oracles::discord_bruteforce(rho, grid)),
        (measures::connected_correlation(rho), oracles::maxcorr_bruteforce(rho, grid).value),
        (measures::negativity(rho), oracles::negativity_eig(rho)),
        (measures::bell_opt_generic(rho), oracles::chsh_gridopt(rho, grid)),
    ]
}

const ORACLE_MEASURES: [(&str, f64); 4] = [
    ("geometric_discord", DISCORD_ORACLE_TOL),
    ("connected_correlation", MAXCORR_ORACLE_TOL),
    ("negativity", NEGATIVITY_ORACLE_TOL),
    ("bell_opt", CHSH_ORACLE_TOL),
];

/// Compares every closed form with its oracle on `count` random states of
/// each kind.
pub fn oracle_check(count: usize, seed: u64, grid: &DirectionGrid) -> Result<OracleReport> {
    if count == 0 {
        return Err(Error::InvalidParams("count must be >= 1".into()));
    }
    grid.validate()?;
    let jobs: Vec<(usize, u64)> =
        (0..ORACLE_KINDS.len()).flat_map(|k| (0..count).map(move |i| (k, oracle_state_seed(seed, k, i)))).collect();
    let results: Vec<[(f64, f64); 4]> =
        jobs.par_iter().map(|&(k, s)| oracle_pairs(&random_state(s, ORACLE_KINDS[k].0), grid)).collect();

    let mut comparisons: Vec<OracleComparison> = ORACLE_MEASURES
        .iter()
        .map(|(name, tol)| OracleComparison {
            measure: name.to_string(),
            tolerance: *tol,
            max_deviation: 0.0,
            worst_kind: String::new(),
            worst_seed: 0,
        })
        .collect();
    let mut breaches = Vec::new();
    for (&(k, s), pairs) in jobs.iter().zip(&results) {
        for (m, &(formula, oracle)) in pairs.iter().enumerate() {
            let dev = (formula - oracle).abs();
            let cmp = &mut comparisons[m];
            if dev > cmp.max_deviation || cmp.worst_kind.is_empty() {
                cmp.max_deviation = dev;
                cmp.worst_kind = ORACLE_KINDS[k].1.to_string();
                cmp.worst_seed = s;
            }
            if dev.is_nan() || dev > cmp.tolerance {
                breaches.push(OracleBreach {
                    measure: cmp.measure.clone(),
                    kind: ORACLE_KINDS[k].1.to_string(),
                    seed: s,
                    formula,
                    oracle,
                    deviation: dev,
                });
            }
        }
    }
    Ok(OracleReport { count, seed, grid: *grid, comparisons, breaches })
}
