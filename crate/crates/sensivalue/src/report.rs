//! Batch pipeline behind the `sensivalue` binary: CSV ingestion, per-event
//! interval reports, study execution and density tables, with JSON/CSV
//! emission at a configurable significant-digit count.
//!
//! One sensitivity-parameter posterior is fitted from all events pooled
//! (each event contributes one benchmark-discrepancy pair); per-event
//! intervals reuse the pooled posterior with that event's outcome summary.

use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::density::{params_gamma_scale, params_normal_effect, params_product_effect};
use crate::error::{Error, Result};
use crate::estimators::{
    ipw_mean, outcome_summary, poisson_sampling_interval, sensitivity_pairs,
    taylor_series_interval, BenchmarkPair,
};
use crate::evalue::quantile_sorted;
use crate::model::{
    EvalueDensityParams, EvalueInterval, GeneralizedT, IntervalMethod, MissingDataSample,
    OutcomeSummary, SensitivityPairs,
};
use crate::posterior::{objective_posterior, sample_delta, subjective_posterior};
use crate::prior_fit::{fit_hyperparams, FitConfig, FitOutcome};
use crate::seed::{derive_seed, stream};
use crate::sim::{run_study, StudyConfig, StudyResult};

/// Current report schema.
pub const SCHEMA_VERSION: u32 = 1;

/// Which interval methods a report should carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSelection {
    All,
    One(IntervalMethod),
}

impl MethodSelection {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Self::All),
            "subjective" => Some(Self::One(IntervalMethod::SubjectiveBayes)),
            "objective" => Some(Self::One(IntervalMethod::ObjectiveBayes)),
            "taylor" => Some(Self::One(IntervalMethod::TaylorSeries)),
            "poisson" => Some(Self::One(IntervalMethod::PoissonSampling)),
            _ => None,
        }
    }

    fn includes(self, method: IntervalMethod) -> bool {
        match self {
            Self::All => true,
            Self::One(m) => m == method,
        }
    }
}

/// Options for [`analyze`].
#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub level: f64,
    pub draws: usize,
    pub seed: u64,
    pub methods: MethodSelection,
    pub fit: FitConfig,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            level: 0.95,
            draws: 100_000,
            seed: 42,
            methods: MethodSelection::All,
            fit: FitConfig::default(),
        }
    }
}

/// Per-event slice of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub event_name: String,
    pub n_units: usize,
    pub ipw_mean: f64,
    pub p_obs: f64,
    pub sd_y: f64,
    pub delta_source1: f64,
    pub delta_source2: f64,
    pub intervals: Vec<EvalueInterval>,
}

/// Pooled posterior facts shared by every event row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledSummary {
    pub groups: usize,
    pub delta0: f64,
    pub nu: f64,
    pub subjective: GeneralizedT,
    pub objective: GeneralizedT,
}

/// Full analysis report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub schema_version: u32,
    pub level: f64,
    pub draws: usize,
    pub seed: u64,
    pub pooled: PooledSummary,
    pub events: Vec<EventReport>,
    pub warnings: Vec<String>,
}

fn data_error(path: &str, line: u64, message: impl Into<String>) -> Error {
    Error::DataFormat {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

/// Reads the unit-level CSV (`event_name,y,r,propensity`), grouping samples by
/// event in first-appearance order.
pub fn read_unit_csv<R: Read>(
    reader: R,
    path: &str,
) -> Result<Vec<(String, Vec<MissingDataSample>)>> {
    let mut csv_reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    {
        let headers = csv_reader.headers()?;
        let expect = ["event_name", "y", "r", "propensity"];
        if headers.len() != 4 || headers.iter().zip(expect).any(|(h, e)| h != e) {
            return Err(data_error(
                path,
                1,
                format!("expected header `event_name,y,r,propensity`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, Vec<MissingDataSample>> =
        std::collections::HashMap::new();
    for record in csv_reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let name = record.get(0).unwrap_or("").to_string();
        if name.is_empty() {
            return Err(data_error(path, line, "empty event_name"));
        }
        let y: f64 = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|_| data_error(path, line, "y must be a number"))?;
        let r = match record.get(2).unwrap_or("") {
            "0" => false,
            "1" => true,
            other => {
                return Err(data_error(path, line, format!("r must be 0 or 1, got `{other}`")))
            }
        };
        let pi: f64 = record
            .get(3)
            .unwrap_or("")
            .parse()
            .map_err(|_| data_error(path, line, "propensity must be a number"))?;
        let sample = MissingDataSample::new(y, r, pi)
            .map_err(|e| data_error(path, line, e.to_string()))?;
        if !groups.contains_key(&name) {
            order.push(name.clone());
        }
        groups.entry(name).or_default().push(sample);
    }
    Ok(order
        .into_iter()
        .map(|name| {
            let samples = groups.remove(&name).unwrap();
            (name, samples)
        })
        .collect())
}

/// Reads the benchmark CSV (`event_name,mu_source1,mu_source2`), preserving
/// file order; this order fixes the report row order.
pub fn read_benchmark_csv<R: Read>(reader: R, path: &str) -> Result<Vec<BenchmarkPair>> {
    let mut csv_reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    {
        let headers = csv_reader.headers()?;
        let expect = ["event_name", "mu_source1", "mu_source2"];
        if headers.len() != 3 || headers.iter().zip(expect).any(|(h, e)| h != e) {
            return Err(data_error(
                path,
                1,
                format!("expected header `event_name,mu_source1,mu_source2`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut benchmarks = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let name = record.get(0).unwrap_or("").to_string();
        if name.is_empty() {
            return Err(data_error(path, line, "empty event_name"));
        }
        if !seen.insert(name.clone()) {
            return Err(data_error(path, line, format!("duplicate event `{name}`")));
        }
        let s1: f64 = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|_| data_error(path, line, "mu_source1 must be a number"))?;
        let s2: f64 = record
            .get(2)
            .unwrap_or("")
            .parse()
            .map_err(|_| data_error(path, line, "mu_source2 must be a number"))?;
        benchmarks.push(
            BenchmarkPair::new(name, s1, s2).map_err(|e| data_error(path, line, e.to_string()))?,
        );
    }
    if benchmarks.is_empty() {
        return Err(Error::NoBenchmarkGroups);
    }
    Ok(benchmarks)
}

struct UsableEvent {
    name: String,
    n_units: usize,
    mean: f64,
    summary: OutcomeSummary,
    samples: Vec<MissingDataSample>,
    benchmark: BenchmarkPair,
}

/// Runs the full analysis pipeline on parsed inputs.
pub fn analyze(
    units: Vec<(String, Vec<MissingDataSample>)>,
    benchmarks: Vec<BenchmarkPair>,
    options: &AnalyzeOptions,
) -> Result<AnalyzeReport> {
    if benchmarks.is_empty() {
        return Err(Error::NoBenchmarkGroups);
    }
    if !(options.level > 0.0 && options.level < 1.0) {
        return Err(Error::InvalidLevel(options.level));
    }
    // group sets must match exactly before any skipping
    let unit_names: std::collections::BTreeSet<&str> =
        units.iter().map(|(n, _)| n.as_str()).collect();
    let bench_names: std::collections::BTreeSet<&str> =
        benchmarks.iter().map(|b| b.group_id.as_str()).collect();
    let missing: Vec<String> = unit_names
        .symmetric_difference(&bench_names)
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::GroupMismatch(missing));
    }

    let mut warnings = Vec::new();
    let by_name: std::collections::HashMap<String, Vec<MissingDataSample>> =
        units.into_iter().collect();
    let mut usable = Vec::new();
    for benchmark in benchmarks {
        let samples = by_name[&benchmark.group_id].clone();
        let mean = match ipw_mean(&samples) {
            Ok(m) => m,
            Err(e) => {
                warnings.push(format!("skipping `{}`: {e}", benchmark.group_id));
                continue;
            }
        };
        match outcome_summary(&samples) {
            Ok(summary) => usable.push(UsableEvent {
                name: benchmark.group_id.clone(),
                n_units: samples.len(),
                mean,
                summary,
                samples,
                benchmark,
            }),
            Err(e) => warnings.push(format!("skipping `{}`: {e}", benchmark.group_id)),
        }
    }

    let means: Vec<(String, f64)> = usable.iter().map(|e| (e.name.clone(), e.mean)).collect();
    let benches: Vec<BenchmarkPair> = usable.iter().map(|e| e.benchmark.clone()).collect();
    let pairs: SensitivityPairs = sensitivity_pairs(&means, &benches)?;

    let fit: FitOutcome = fit_hyperparams(&pairs, &options.fit)?;
    let subjective = subjective_posterior(&pairs, &fit.hyperparams)?;
    let objective = objective_posterior(&pairs)?;

    let bounds = |post: &GeneralizedT, label: u64| -> (f64, f64) {
        let mut draws = sample_delta(post, options.draws, derive_seed(options.seed, &[label]));
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let alpha = (1.0 - options.level) / 2.0;
        (
            quantile_sorted(&draws, alpha),
            quantile_sorted(&draws, 1.0 - alpha),
        )
    };
    let subj_bounds = bounds(&subjective, stream::SUBJECTIVE);
    let obj_bounds = bounds(&objective, stream::OBJECTIVE);

    let mut events = Vec::with_capacity(usable.len());
    for event in &usable {
        let delta_hat =
            event.mean - 0.5 * (event.benchmark.mu_source1 + event.benchmark.mu_source2);
        let mut intervals = Vec::new();
        if options.methods.includes(IntervalMethod::TaylorSeries) {
            intervals.push(taylor_series_interval(
                &event.samples,
                delta_hat,
                &event.summary,
                options.level,
            )?);
        }
        if options.methods.includes(IntervalMethod::PoissonSampling) {
            intervals.push(poisson_sampling_interval(
                &event.samples,
                delta_hat,
                &event.summary,
                options.level,
            )?);
        }
        if options.methods.includes(IntervalMethod::SubjectiveBayes) {
            intervals.push(crate::evalue::evalue_interval_from_delta_bounds(
                subj_bounds.0,
                subj_bounds.1,
                &event.summary,
                options.level,
                IntervalMethod::SubjectiveBayes,
            )?);
        }
        if options.methods.includes(IntervalMethod::ObjectiveBayes) {
            intervals.push(crate::evalue::evalue_interval_from_delta_bounds(
                obj_bounds.0,
                obj_bounds.1,
                &event.summary,
                options.level,
                IntervalMethod::ObjectiveBayes,
            )?);
        }
        events.push(EventReport {
            event_name: event.name.clone(),
            n_units: event.n_units,
            ipw_mean: event.mean,
            p_obs: event.summary.p_obs,
            sd_y: event.summary.sd_y,
            delta_source1: event.mean - event.benchmark.mu_source1,
            delta_source2: event.mean - event.benchmark.mu_source2,
            intervals,
        });
    }

    Ok(AnalyzeReport {
        schema_version: SCHEMA_VERSION,
        level: options.level,
        draws: options.draws,
        seed: options.seed,
        pooled: PooledSummary {
            groups: pairs.m(),
            delta0: fit.hyperparams.delta0,
            nu: fit.hyperparams.nu,
            subjective,
            objective,
        },
        events,
        warnings,
    })
}

/// Convenience wrapper: parse both CSVs and analyze.
pub fn analyze_files(
    unit_csv: &std::path::Path,
    benchmark_csv: &std::path::Path,
    options: &AnalyzeOptions,
) -> Result<AnalyzeReport> {
    let units = read_unit_csv(
        std::fs::File::open(unit_csv)?,
        &unit_csv.display().to_string(),
    )?;
    let benchmarks = read_benchmark_csv(
        std::fs::File::open(benchmark_csv)?,
        &benchmark_csv.display().to_string(),
    )?;
    analyze(units, benchmarks, options)
}

/// Rounds to `digits` significant digits through the shortest decimal form.
pub fn round_sig(x: f64, digits: u8) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = digits.clamp(1, 17);
    format!("{:.*e}", digits as usize - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_json(value: &mut Value, digits: u8) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap();
                if let Some(r) = serde_json::Number::from_f64(round_sig(x, digits)) {
                    *value = Value::Number(r);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| round_json(v, digits)),
        Value::Object(map) => map.values_mut().for_each(|v| round_json(v, digits)),
        _ => {}
    }
}

/// JSON rendering with floats rounded to `digits` significant digits.
pub fn render_json<T: Serialize>(value: &T, digits: u8) -> Result<String> {
    let mut json = serde_json::to_value(value).expect("serializable report");
    round_json(&mut json, digits);
    Ok(format!("{}\n", serde_json::to_string_pretty(&json).expect("valid json")))
}

/// CSV rendering of an analysis report: one row per event and method.
pub fn render_report_csv(report: &AnalyzeReport, digits: u8) -> String {
    let mut out = String::from("event_name,method,lower,upper,level,fallback\n");
    for event in &report.events {
        for iv in &event.intervals {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                event.event_name,
                iv.method.label(),
                round_sig(iv.lower, digits),
                round_sig(iv.upper, digits),
                iv.level,
                iv.fallback
            ));
        }
    }
    out
}

/// Runs a study from an optional TOML config file with optional overrides.
pub fn simulate(
    config_path: Option<&std::path::Path>,
    seed_override: Option<u64>,
    trials_override: Option<usize>,
) -> Result<StudyResult> {
    let mut config: StudyConfig = match config_path {
        Some(path) => toml::from_str(&std::fs::read_to_string(path)?)?,
        None => StudyConfig::default(),
    };
    if let Some(seed) = seed_override {
        config.master_seed = seed;
    }
    if let Some(trials) = trials_override {
        config.n_trials = trials;
    }
    config.validate()?;
    eprintln!(
        "study: {} trials, arms {:?}, {} groups, {} units at 1x",
        config.n_trials, config.k_multipliers, config.m_groups, config.n_units
    );
    let started = std::time::Instant::now();
    let result = run_study(&config)?;
    eprintln!("study finished in {:.1}s", started.elapsed().as_secs_f64());
    Ok(result)
}

/// Density table options.
#[derive(Debug, Clone, Copy)]
pub struct DensityGrid {
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
}

impl Default for DensityGrid {
    fn default() -> Self {
        Self {
            v_min: 1.01,
            v_max: 10.0,
            points: 200,
        }
    }
}

/// Evaluates `(v, pdf, cdf)` rows over a uniform grid.
pub fn density_table(
    params: &EvalueDensityParams,
    grid: &DensityGrid,
    digits: u8,
) -> Result<String> {
    if !(grid.v_min > 1.0) || !(grid.v_max >= grid.v_min) || grid.points == 0 {
        return Err(Error::InvalidConfig(
            "density grid needs 1 < v_min <= v_max and at least one point".into(),
        ));
    }
    let mut out = String::from("v,pdf,cdf\n");
    let steps = grid.points.max(1);
    for i in 0..steps {
        let v = if steps == 1 {
            grid.v_min
        } else {
            grid.v_min + (grid.v_max - grid.v_min) * i as f64 / (steps - 1) as f64
        };
        let pdf = crate::density::pdf(params, v)?;
        let cdf = crate::density::cdf(params, v)?;
        out.push_str(&format!(
            "{},{},{}\n",
            round_sig(v, digits),
            round_sig(pdf, digits),
            round_sig(cdf, digits)
        ));
    }
    Ok(out)
}

/// Builds density parameters from CLI-style arguments.
#[allow(clippy::too_many_arguments)]
pub fn density_params_from_args(
    variant: &str,
    eta: f64,
    tau: f64,
    p_obs: Option<f64>,
    mu_q: Option<f64>,
    sigma_q: Option<f64>,
    sd_y: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> Result<EvalueDensityParams> {
    let need = |opt: Option<f64>, name: &'static str| {
        opt.ok_or(Error::InvalidConfig(format!("--{name} is required for this variant")))
    };
    match variant {
        "normal" => params_normal_effect(eta, tau, need(p_obs, "p-obs")?, need(sd_y, "sd-y")?),
        "product" => params_product_effect(
            eta,
            tau,
            need(mu_q, "mu-q")?,
            sigma_q.unwrap_or(0.0),
            need(sd_y, "sd-y")?,
        ),
        "invgamma" => params_gamma_scale(
            eta,
            tau,
            need(mu_q, "mu-q")?,
            sigma_q.unwrap_or(0.0),
            need(alpha, "alpha")?,
            need(beta, "beta")?,
        ),
        other => Err(Error::InvalidConfig(format!(
            "unknown variant `{other}` (expected normal, product or invgamma)"
        ))),
    }
}

/// Thread pool honoring the `SENSIVALUE_THREADS` cap, when set.
pub fn thread_pool_from_env() -> Result<Option<rayon::ThreadPool>> {
    match std::env::var("SENSIVALUE_THREADS") {
        Ok(raw) => {
            let threads: usize = raw.parse().map_err(|_| {
                Error::InvalidConfig(format!("SENSIVALUE_THREADS must be a positive integer, got `{raw}`"))
            })?;
            if threads == 0 {
                return Err(Error::InvalidConfig(
                    "SENSIVALUE_THREADS must be a positive integer".into(),
                ));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            Ok(Some(pool))
        }
        Err(_) => Ok(None),
    }
}
