//! Monte-Carlo comparison of the exact and approximated estimators.
//!
//! For every parameter set and repetition a realization of `n_max` events is
//! simulated, each requested method is fitted on `[0, T_{n_max}]`, and the
//! fitted parameters are scored with the time-change KS test. Results go to
//! `rows.csv` (one line per set, repetition and method) and `summary.csv`
//! (one line per set and method).

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HawkesError;
use crate::estimate::{fit, FitOptions};
use crate::gof::goodness_of_fit;
use crate::intensity::zero_time_fraction;
use crate::io::{format_f64, IoError};
use crate::model::{ExpHawkesParams, Method};
use crate::simulate::{child_seed, simulate, RngSeed, StopCriterion};

pub const ROWS_HEADER: &str = "set_id,rep,method,lambda0_hat,alpha_hat,beta_hat,loglik,rel_err_lambda0,rel_err_alpha,rel_err_beta,p_value,zero_frac,status";

pub const SUMMARY_HEADER: &str = "set_id,lambda0,alpha,beta,method,n_ok,n_failed,mean_lambda0_hat,mean_alpha_hat,mean_beta_hat,mean_p_value,mean_zero_frac,median_rel_err_lambda0,median_rel_err_alpha,median_rel_err_beta,mean_rel_err_lambda0,mean_rel_err_alpha,mean_rel_err_beta";

/// The six parameter sets of the reference study, ordered by how often the
/// intensity sits at zero.
pub fn reference_parameter_sets() -> Vec<ExpHawkesParams> {
    [
        (0.5, -0.001, 0.4),
        (0.5, -0.2, 0.4),
        (1.05, -0.75, 0.8),
        (2.43, -0.98, 0.4),
        (2.85, -2.5, 1.8),
        (1.6, -0.75, 0.1),
    ]
    .into_iter()
    .map(|(l, a, b)| ExpHawkesParams::new(l, a, b).expect("valid reference parameters"))
    .collect()
}

fn default_repetitions() -> usize {
    100
}

fn default_n_max() -> usize {
    200
}

fn default_master_seed() -> u64 {
    1
}

fn default_methods() -> Vec<Method> {
    vec![Method::Exact, Method::Approximated]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub parameter_sets: Vec<ExpHawkesParams>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            parameter_sets: reference_parameter_sets(),
            repetitions: default_repetitions(),
            n_max: default_n_max(),
            master_seed: default_master_seed(),
            methods: default_methods(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.parameter_sets.is_empty() {
            return Err("parameter_sets must not be empty".into());
        }
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if self.n_max < 2 {
            return Err("n_max must be at least 2".into());
        }
        if self.methods.is_empty() {
            return Err("methods must not be empty".into());
        }
        Ok(())
    }

    /// Methods in canonical order without duplicates.
    fn canonical_methods(&self) -> Vec<Method> {
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        methods
    }

    /// Seed of the realization for `(set_id, rep)`.
    pub fn realization_seed(&self, set_id: usize, rep: usize) -> RngSeed {
        child_seed(
            child_seed(RngSeed(self.master_seed), set_id as u64),
            rep as u64,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Failed,
}

impl RowStatus {
    fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub set_id: usize,
    pub rep: usize,
    pub method: Method,
    pub lambda0_hat: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub log_likelihood: f64,
    pub rel_err: [f64; 3],
    pub p_value: f64,
    pub zero_frac: f64,
    pub status: RowStatus,
}

impl ExperimentRow {
    pub fn estimate(&self) -> [f64; 3] {
        [self.lambda0_hat, self.alpha_hat, self.beta_hat]
    }

    fn to_record(&self) -> String {
        let fields = [
            self.set_id.to_string(),
            self.rep.to_string(),
            self.method.to_string(),
            format_f64(self.lambda0_hat),
            format_f64(self.alpha_hat),
            format_f64(self.beta_hat),
            format_f64(self.log_likelihood),
            format_f64(self.rel_err[0]),
            format_f64(self.rel_err[1]),
            format_f64(self.rel_err[2]),
            format_f64(self.p_value),
            format_f64(self.zero_frac),
            self.status.as_str().to_string(),
        ];
        fields.join(",")
    }
}

/// `|estimate - truth| / |truth|`, or the absolute error when the truth is zero.
pub fn relative_error(estimate: f64, truth: f64) -> f64 {
    let err = (estimate - truth).abs();
    if truth == 0.0 {
        err
    } else {
        err / truth.abs()
    }
}

fn run_cell(
    config: &ExperimentConfig,
    methods: &[Method],
    set_id: usize,
    rep: usize,
) -> Result<Vec<ExperimentRow>, HawkesError> {
    let truth = config.parameter_sets[set_id];
    let events = simulate(
        &truth,
        StopCriterion::MaxJumps(config.n_max),
        config.realization_seed(set_id, rep),
    )?;
    let horizon = events.horizon();
    let zero_frac = zero_time_fraction(&truth, &events, horizon);

    Ok(methods
        .iter()
        .map(|&method| {
            let fitted = fit(&events, horizon, &FitOptions::with_method(method))
                .ok()
                .filter(|r| r.params.to_array().iter().all(|v| v.is_finite()));
            match fitted {
                Some(result) => {
                    let est = result.params.to_array();
                    let p_value = goodness_of_fit(&result.params, &events)
                        .map(|g| g.p_value)
                        .unwrap_or(f64::NAN);
                    ExperimentRow {
                        set_id,
                        rep,
                        method,
                        lambda0_hat: est[0],
                        alpha_hat: est[1],
                        beta_hat: est[2],
                        log_likelihood: result.log_likelihood,
                        rel_err: std::array::from_fn(|i| {
                            relative_error(est[i], truth.to_array()[i])
                        }),
                        p_value,
                        zero_frac,
                        status: RowStatus::Ok,
                    }
                }
                None => ExperimentRow {
                    set_id,
                    rep,
                    method,
                    lambda0_hat: f64::NAN,
                    alpha_hat: f64::NAN,
                    beta_hat: f64::NAN,
                    log_likelihood: f64::NAN,
                    rel_err: [f64::NAN; 3],
                    p_value: f64::NAN,
                    zero_frac,
                    status: RowStatus::Failed,
                },
            }
        })
        .collect())
}

/// Runs every cell of the experiment on up to `jobs` threads (all available
/// cores when `None`). Rows come back sorted by set, repetition and method.
pub fn run_experiment(
    config: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<Vec<ExperimentRow>, HawkesError> {
    config.validate().map_err(HawkesError::InvalidOptions)?;
    let methods = config.canonical_methods();
    let cells: Vec<(usize, usize)> = (0..config.parameter_sets.len())
        .flat_map(|s| (0..config.repetitions).map(move |r| (s, r)))
        .collect();

    let work = || -> Result<Vec<ExperimentRow>, HawkesError> {
        let nested: Vec<Vec<ExperimentRow>> = cells
            .par_iter()
            .map(|&(s, r)| run_cell(config, &methods, s, r))
            .collect::<Result<_, _>>()?;
        Ok(nested.into_iter().flatten().collect())
    };

    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HawkesError::InvalidOptions(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub set_id: usize,
    pub truth: ExpHawkesParams,
    pub method: Method,
    pub n_ok: usize,
    pub n_failed: usize,
    pub mean_estimate: [f64; 3],
    pub mean_p_value: f64,
    pub mean_zero_frac: f64,
    pub median_rel_err: [f64; 3],
    pub mean_rel_err: [f64; 3],
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    // divide first so that diverged estimates near f64::MAX do not overflow
    let n = values.len() as f64;
    values.iter().fold(0.0, |acc, v| acc + v / n)
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Aggregates rows per parameter set and method. Estimates, errors and
/// p-values are averaged over successful rows; the zero-time fraction over all
/// rows since it only depends on the realization.
pub fn summarize(config: &ExperimentConfig, rows: &[ExperimentRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for (set_id, truth) in config.parameter_sets.iter().enumerate() {
        for method in config.canonical_methods() {
            let group: Vec<&ExperimentRow> = rows
                .iter()
                .filter(|r| r.set_id == set_id && r.method == method)
                .collect();
            let ok: Vec<&ExperimentRow> = group
                .iter()
                .copied()
                .filter(|r| r.status == RowStatus::Ok)
                .collect();
            let column = |f: &dyn Fn(&ExperimentRow) -> f64| -> Vec<f64> {
                ok.iter().map(|r| f(r)).collect()
            };
            let p_values: Vec<f64> = column(&|r| r.p_value)
                .into_iter()
                .filter(|p| !p.is_nan())
                .collect();
            let zero: Vec<f64> = group.iter().map(|r| r.zero_frac).collect();
            out.push(SummaryRow {
                set_id,
                truth: *truth,
                method,
                n_ok: ok.len(),
                n_failed: group.len() - ok.len(),
                mean_estimate: std::array::from_fn(|i| mean(&column(&|r| r.estimate()[i]))),
                mean_p_value: mean(&p_values),
                mean_zero_frac: mean(&zero),
                median_rel_err: std::array::from_fn(|i| median(&column(&|r| r.rel_err[i]))),
                mean_rel_err: std::array::from_fn(|i| mean(&column(&|r| r.rel_err[i]))),
            });
        }
    }
    out
}

impl SummaryRow {
    fn to_record(&self) -> String {
        let truth = self.truth.to_array();
        let mut fields = vec![
            self.set_id.to_string(),
            format_f64(truth[0]),
            format_f64(truth[1]),
            format_f64(truth[2]),
            self.method.to_string(),
            self.n_ok.to_string(),
            self.n_failed.to_string(),
        ];
        fields.extend(self.mean_estimate.iter().map(|&v| format_f64(v)));
        fields.push(format_f64(self.mean_p_value));
        fields.push(format_f64(self.mean_zero_frac));
        fields.extend(self.median_rel_err.iter().map(|&v| format_f64(v)));
        fields.extend(self.mean_rel_err.iter().map(|&v| format_f64(v)));
        fields.join(",")
    }
}

fn write_lines(
    path: &Path,
    header: &str,
    lines: impl Iterator<Item = String>,
) -> Result<(), IoError> {
    let file = fs::File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let write = || -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        for line in lines {
            writeln!(out, "{line}")?;
        }
        out.flush()
    };
    write().map_err(|e| IoError::io(path, e))
}

pub fn write_rows_csv(path: &Path, rows: &[ExperimentRow]) -> Result<(), IoError> {
    write_lines(path, ROWS_HEADER, rows.iter().map(ExperimentRow::to_record))
}

pub fn write_summary_csv(path: &Path, summary: &[SummaryRow]) -> Result<(), IoError> {
    write_lines(
        path,
        SUMMARY_HEADER,
        summary.iter().map(SummaryRow::to_record),
    )
}

/// Reads a `rows.csv` written by [`write_rows_csv`].
pub fn read_rows_csv(path: &Path) -> Result<Vec<ExperimentRow>, IoError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| IoError::csv(path, e))?;
    let headers = reader.headers().map_err(|e| IoError::csv(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>().join(",") != ROWS_HEADER {
        return Err(IoError::Format {
            path: path.to_path_buf(),
            message: "unexpected rows.csv header".into(),
        });
    }
    let bad = |line: usize, what: &str| IoError::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: invalid {what}"),
    };
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| IoError::csv(path, e))?;
        let float = |idx: usize| -> Result<f64, IoError> {
            record[idx]
                .parse::<f64>()
                .map_err(|_| bad(line, &headers[idx]))
        };
        let int = |idx: usize| -> Result<usize, IoError> {
            record[idx]
                .parse::<usize>()
                .map_err(|_| bad(line, &headers[idx]))
        };
        rows.push(ExperimentRow {
            set_id: int(0)?,
            rep: int(1)?,
            method: record[2].parse().map_err(|_| bad(line, "method"))?,
            lambda0_hat: float(3)?,
            alpha_hat: float(4)?,
            beta_hat: float(5)?,
            log_likelihood: float(6)?,
            rel_err: [float(7)?, float(8)?, float(9)?],
            p_value: float(10)?,
            zero_frac: float(11)?,
            status: match &record[12] {
                "ok" => RowStatus::Ok,
                "failed" => RowStatus::Failed,
                _ => return Err(bad(line, "status")),
            },
        });
    }
    Ok(rows)
}

/// Writes `rows.csv` and `summary.csv` into `dir`, creating it if needed.
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    rows: &[ExperimentRow],
) -> Result<Vec<SummaryRow>, IoError> {
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    write_rows_csv(&dir.join("rows.csv"), rows)?;
    let summary = summarize(config, rows);
    write_summary_csv(&dir.join("summary.csv"), &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            parameter_sets: vec![
                ExpHawkesParams::new(0.5, -0.2, 0.4).unwrap(),
                ExpHawkesParams::new(1.05, -0.75, 0.8).unwrap(),
            ],
            repetitions: 3,
            n_max: 60,
            master_seed: 5,
            methods: vec![Method::Approximated, Method::Exact],
        }
    }

    #[test]
    fn config_json_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"parameter_sets":[{"lambda0":0.5,"alpha":-0.2,"beta":0.4}]}"#)
                .unwrap();
        assert_eq!(cfg.repetitions, 100);
        assert_eq!(cfg.n_max, 200);
        assert_eq!(cfg.master_seed, 1);
        assert_eq!(cfg.methods, vec![Method::Exact, Method::Approximated]);

        let full: ExperimentConfig = serde_json::from_str(
            r#"{"parameter_sets":[{"lambda0":1,"alpha":0,"beta":1}],"repetitions":2,"n_max":50,"master_seed":9,"methods":["approx"]}"#,
        )
        .unwrap();
        assert_eq!(full.methods, vec![Method::Approximated]);
        assert!(full.validate().is_ok());
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_config();
        cfg.repetitions = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.parameter_sets.clear();
        assert!(cfg.validate().is_err());
        assert!(run_experiment(&cfg, Some(1)).is_err());
    }

    #[test]
    fn default_config_is_reference_study() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.parameter_sets.len(), 6);
        assert_eq!(cfg.parameter_sets[5].to_array(), [1.6, -0.75, 0.1]);
        assert_eq!(cfg.repetitions, 100);
        assert_eq!(cfg.n_max, 200);
    }

    #[test]
    fn rows_are_canonically_ordered_and_deterministic() {
        let cfg = small_config();
        let rows = run_experiment(&cfg, Some(1)).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 2);
        let keys: Vec<_> = rows.iter().map(|r| (r.set_id, r.rep, r.method)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(rows[0].method, Method::Exact);

        let parallel = run_experiment(&cfg, Some(4)).unwrap();
        assert_eq!(format!("{rows:?}"), format!("{parallel:?}"));
        for r in &rows {
            assert!(r.rel_err.iter().all(|e| *e >= 0.0));
            assert!((0.0..=1.0).contains(&r.p_value));
        }
    }

    #[test]
    fn rows_csv_round_trip() {
        let cfg = small_config();
        let mut rows = run_experiment(&cfg, None).unwrap();
        rows[0].status = RowStatus::Failed;
        rows[0].lambda0_hat = f64::NAN;
        rows[1].log_likelihood = f64::NEG_INFINITY;
        let dir = tempfile::tempdir().unwrap();
        let summary = write_outputs(dir.path(), &cfg, &rows).unwrap();
        assert_eq!(summary.len(), 4);
        let back = read_rows_csv(&dir.path().join("rows.csv")).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
        assert_eq!(summarize(&cfg, &back), summarize(&cfg, &rows));
    }

    #[test]
    fn relative_error_definition() {
        assert_eq!(relative_error(1.5, 1.0), 0.5);
        assert_eq!(relative_error(-0.5, -1.0), 0.5);
        assert_eq!(relative_error(0.3, 0.0), 0.3);
    }

    #[test]
    fn median_and_mean() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        assert_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
    }
}
