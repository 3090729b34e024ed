//! Reduced-dimension statistics and scaling measurements.
//!
//! [`run_table`] averages the feasible-set size `d` over random instances for
//! a grid of sizes, clause densities (or edge probabilities) and constraint
//! prefix ratios. [`run_timing`] times reduced and full-space runs so the
//! `d^2` cost can be checked by regression.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf::{constraint_prefix_len, coordination_formula, erdos_renyi, random_3sat, CnfFormula};
use crate::hamiltonians::{build_reduced, SelectionBasis};
use crate::modelcount::{enumerate_models_dpll, DEFAULT_MODEL_CAP};
use crate::qaoa::{run_full, ConstrainedProblem, InitialState, Schedule, FULL_RUN_MAX_QUBITS};
use crate::{Error, Result, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    /// Uniform random 3-SAT with `m = ratio * n` clauses.
    Random3Sat,
    /// Not-all-equal constraints on an Erdős–Rényi graph with edge probability `p`.
    Coordination,
}

/// Grid for [`run_table`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub n_range: Vec<usize>,
    /// Clauses per variable for random 3-SAT, edge probabilities for the
    /// coordination benchmark.
    pub columns: Vec<f64>,
    pub k_ratios: Vec<f64>,
    pub instances: usize,
    pub seed: u64,
}

impl TableConfig {
    pub fn validate(&self, benchmark: Benchmark) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n_range.is_empty() || self.columns.is_empty() || self.k_ratios.is_empty() {
            return bad("n_range, columns and k_ratios must be non-empty".into());
        }
        if self.instances == 0 {
            return bad("instances must be at least 1".into());
        }
        if let Some(r) = self.k_ratios.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return bad(format!("k ratio {r} outside (0, 1]"));
        }
        if let Some(&n) = self.n_range.iter().find(|&&n| !(3..=30).contains(&n)) {
            return bad(format!("n = {n} outside 3..=30"));
        }
        match benchmark {
            Benchmark::Random3Sat => {
                if let Some(r) = self.columns.iter().find(|&&r| !(r > 0.0 && r.is_finite())) {
                    return bad(format!("clause ratio {r} must be positive"));
                }
            }
            Benchmark::Coordination => {
                if let Some(p) = self.columns.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
                    return bad(format!("edge probability {p} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum ColumnKey {
    ClauseRatio(f64),
    EdgeProbability(f64),
}

impl ColumnKey {
    pub fn value(self) -> f64 {
        match self {
            ColumnKey::ClauseRatio(v) | ColumnKey::EdgeProbability(v) => v,
        }
    }

    pub fn label(self) -> String {
        match self {
            ColumnKey::ClauseRatio(r) => format!("m = {r:.1}n"),
            ColumnKey::EdgeProbability(p) => format!("p = {p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub full_dim: u64,
    pub column: ColumnKey,
    pub k_ratio: f64,
    pub mean_reduced_dim: f64,
    pub stddev: f64,
    pub instances: usize,
    /// Instances whose constraint prefix has no model (`d = 0`).
    pub instances_unsat: usize,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one instance; independent of the k ratio so every k column
/// sees the same formulas.
pub fn instance_seed(base: u64, n: usize, column: usize, instance: usize) -> u64 {
    [n as u64, column as u64, instance as u64].iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

/// The formula of one table instance.
pub fn table_instance(benchmark: Benchmark, n: usize, column: f64, seed: u64) -> Result<CnfFormula> {
    match benchmark {
        Benchmark::Random3Sat => random_3sat(n, (column * n as f64).round() as usize, seed),
        Benchmark::Coordination => coordination_formula(&erdos_renyi(n, column, seed)?),
    }
}

/// Model counts of the prefixes for each k ratio. Models of a longer prefix
/// are a subset of those of a shorter one, so only the shortest prefix is
/// enumerated and the rest are filtered.
fn prefix_counts(f: &CnfFormula, k_ratios: &[f64]) -> Result<Vec<usize>> {
    let ks = k_ratios.iter().map(|&r| constraint_prefix_len(r, f.m())).collect::<Result<Vec<_>>>()?;
    let k_min = *ks.iter().min().expect("non-empty ratios");
    let models = enumerate_models_dpll(&f.prefix(k_min)?, DEFAULT_MODEL_CAP);
    if models.truncated {
        return Err(Error::ModelCapExceeded { cap: DEFAULT_MODEL_CAP });
    }
    let clauses = f.clauses();
    Ok(ks
        .iter()
        .map(|&k| {
            models
                .models
                .iter()
                .filter(|&&x| clauses[k_min..k].iter().all(|c| crate::cnf::eval_clause(c, x)))
                .count()
        })
        .collect())
}

fn mean_stddev(values: &[usize]) -> (f64, f64) {
    let len = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / len;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample standard deviation of `d` per `(n, column, k ratio)`.
/// Rows come out ordered by `n`, then column, then k ratio; unsatisfiable
/// prefixes count as `d = 0`.
pub fn run_table(config: &TableConfig, benchmark: Benchmark) -> Result<Vec<TableRow>> {
    config.validate(benchmark)?;
    let mut rows = Vec::new();
    for &n in &config.n_range {
        for (ci, &column) in config.columns.iter().enumerate() {
            let counts = (0..config.instances)
                .into_par_iter()
                .map(|i| {
                    let f = table_instance(benchmark, n, column, instance_seed(config.seed, n, ci, i))?;
                    prefix_counts(&f, &config.k_ratios)
                })
                .collect::<Result<Vec<_>>>()?;
            for (ki, &k_ratio) in config.k_ratios.iter().enumerate() {
                let ds: Vec<usize> = counts.iter().map(|c| c[ki]).collect();
                let (mean, stddev) = mean_stddev(&ds);
                rows.push(TableRow {
                    n,
                    full_dim: 1u64 << n,
                    column: match benchmark {
                        Benchmark::Random3Sat => ColumnKey::ClauseRatio(column),
                        Benchmark::Coordination => ColumnKey::EdgeProbability(column),
                    },
                    k_ratio,
                    mean_reduced_dim: mean,
                    stddev,
                    instances: config.instances,
                    instances_unsat: ds.iter().filter(|&&d| d == 0).count(),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
    Markdown,
}

#[derive(Serialize, Deserialize)]
struct TableDocument {
    schema_version: u32,
    rows: Vec<TableRow>,
}

/// Distinct columns and k ratios in order of first appearance, and the means
/// keyed by `n`.
struct WideLayout {
    groups: Vec<ColumnKey>,
    k_ratios: Vec<f64>,
    by_n: BTreeMap<usize, Vec<Option<f64>>>,
}

impl WideLayout {
    fn new(rows: &[TableRow]) -> Self {
        let mut groups: Vec<ColumnKey> = Vec::new();
        let mut k_ratios: Vec<f64> = Vec::new();
        for r in rows {
            if !groups.contains(&r.column) {
                groups.push(r.column);
            }
            if !k_ratios.contains(&r.k_ratio) {
                k_ratios.push(r.k_ratio);
            }
        }
        let width = groups.len() * k_ratios.len();
        let mut by_n: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
        for r in rows {
            let g = groups.iter().position(|&c| c == r.column).expect("collected");
            let k = k_ratios.iter().position(|&x| x == r.k_ratio).expect("collected");
            by_n.entry(r.n).or_insert_with(|| vec![None; width])[g * k_ratios.len() + k] = Some(r.mean_reduced_dim);
        }
        Self { groups, k_ratios, by_n }
    }

    fn headers(&self) -> Vec<String> {
        self.groups
            .iter()
            .flat_map(|g| self.k_ratios.iter().map(move |k| format!("{} k={k}m", g.label())))
            .collect()
    }
}

/// Renders rows as a table with one line per `n`: `n`, `2^n`, then one mean
/// per (column, k ratio), grouped by column. JSON keeps the full rows.
pub fn export_table(rows: &[TableRow], format: TableFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    match format {
        TableFormat::Json => serde_json::to_string_pretty(&TableDocument { schema_version: SCHEMA_VERSION, rows: rows.to_vec() })
            .map(|s| s + "\n")
            .map_err(|e| Error::Export(e.to_string())),
        TableFormat::Csv => {
            let layout = WideLayout::new(rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["n".to_string(), "2^n".to_string()];
            header.extend(layout.headers());
            w.write_record(&header).map_err(|e| Error::Export(e.to_string()))?;
            for (n, cells) in &layout.by_n {
                let mut record = vec![n.to_string(), (1u64 << n).to_string()];
                record.extend(cells.iter().map(|c| c.map(|v| format!("{v:.2}")).unwrap_or_default()));
                w.write_record(&record).map_err(|e| Error::Export(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Export(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Export(e.to_string()))
        }
        TableFormat::Markdown => {
            let layout = WideLayout::new(rows);
            let nk = layout.k_ratios.len();
            let mut out = String::from("| | |");
            for g in &layout.groups {
                out.push_str(&format!(" {} |", g.label()));
                out.push_str(&" |".repeat(nk - 1));
            }
            out.push_str("\n|---:|---:|");
            out.push_str(&"---:|".repeat(layout.groups.len() * nk));
            out.push_str("\n| n | 2^n |");
            for _ in &layout.groups {
                for k in &layout.k_ratios {
                    let _ = write!(out, " k={k}m |");
                }
            }
            out.push('\n');
            for (n, cells) in &layout.by_n {
                let _ = write!(out, "| {n} | {} |", 1u64 << n);
                for c in cells {
                    match c {
                        Some(v) => {
                            let _ = write!(out, " {v:.2} |");
                        }
                        None => out.push_str(" |"),
                    }
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Inverse of the JSON export.
pub fn parse_table_json(text: &str) -> Result<Vec<TableRow>> {
    let doc: TableDocument = serde_json::from_str(text).map_err(|e| Error::Export(e.to_string()))?;
    Ok(doc.rows)
}

/// Setup for [`run_timing`].
#[derive(Clone, Debug, PartialEq)]
pub struct TimingConfig {
    pub n_range: Vec<usize>,
    /// Clauses per variable of the random 3-SAT problem formula.
    pub clause_ratio: f64,
    pub k_ratio: f64,
    pub schedule: Schedule<f64>,
    pub repeats: usize,
    pub seed: u64,
    /// Full-space runs are timed up to this `n`.
    pub full_max_n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub d: usize,
    pub nu: usize,
    /// Enumeration plus operator build, seconds.
    pub build_time: f64,
    pub reduced_run_time: f64,
    pub full_run_time: Option<f64>,
}

fn min_time<R>(repeats: usize, mut f: impl FnMut() -> Result<R>) -> Result<Duration> {
    f()?; // warm-up
    let mut best = Duration::MAX;
    for _ in 0..repeats {
        let start = Instant::now();
        std::hint::black_box(f()?);
        best = best.min(start.elapsed());
    }
    Ok(best)
}

/// Times one instance per `n`: the first derived seed whose constraint
/// prefix is satisfiable. Each time is the minimum of `repeats` runs after a
/// warm-up run.
pub fn run_timing(config: &TimingConfig) -> Result<Vec<TimingRow>> {
    if config.repeats == 0 {
        return Err(Error::InvalidParams("repeats must be at least 1".into()));
    }
    let delta = config.schedule.delta();
    let mut rows = Vec::new();
    for &n in &config.n_range {
        let m = (config.clause_ratio * n as f64).round() as usize;
        let k = constraint_prefix_len(config.k_ratio, m)?;
        let mut found = None;
        for attempt in 0..1000 {
            let f = random_3sat(n, m, instance_seed(config.seed, n, 0, attempt))?;
            let models = enumerate_models_dpll(&f.prefix(k)?, DEFAULT_MODEL_CAP);
            if !models.is_empty() && !models.truncated {
                found = Some(f);
                break;
            }
        }
        let f = found.ok_or(Error::EmptySubspace { k })?;
        let build = || {
            let models = enumerate_models_dpll(&f.prefix(k)?, DEFAULT_MODEL_CAP);
            build_reduced::<f64>(&f, SelectionBasis::from_models(&models)?, delta)
        };
        let build_time = min_time(config.repeats, build)?;
        let problem = ConstrainedProblem::new(&f, k, delta)?;
        let reduced_run_time = min_time(config.repeats, || problem.run(&config.schedule, &InitialState::Uniform))?;
        let full_run_time = if n <= config.full_max_n.min(FULL_RUN_MAX_QUBITS) {
            Some(min_time(config.repeats, || run_full(&f, &config.schedule, &InitialState::Uniform))?.as_secs_f64())
        } else {
            None
        };
        rows.push(TimingRow {
            n,
            d: problem.d(),
            nu: config.schedule.nu(),
            build_time: build_time.as_secs_f64(),
            reduced_run_time: reduced_run_time.as_secs_f64(),
            full_run_time,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidParams("need at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParams("log-log fit needs positive values".into()));
    }
    let len = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / len, sy / len);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x.ln() - mx;
        sxy += dx * (y.ln() - my);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParams("all x values coincide".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelcount::enumerate_models_bruteforce;

    fn config(n_range: Vec<usize>, columns: Vec<f64>, instances: usize) -> TableConfig {
        TableConfig { n_range, columns, k_ratios: vec![0.7, 0.8, 0.9], instances, seed: 42 }
    }

    #[test]
    fn single_instance_mean_is_its_model_count() {
        for benchmark in [Benchmark::Random3Sat, Benchmark::Coordination] {
            let column = if benchmark == Benchmark::Random3Sat { 4.0 } else { 0.3 };
            let rows = run_table(&config(vec![9], vec![column], 1), benchmark).unwrap();
            let f = table_instance(benchmark, 9, column, instance_seed(42, 9, 0, 0)).unwrap();
            for row in &rows {
                let k = constraint_prefix_len(row.k_ratio, f.m()).unwrap();
                let brute = enumerate_models_bruteforce(&f.prefix(k).unwrap()).unwrap().len();
                assert_eq!(row.mean_reduced_dim, brute as f64);
                assert_eq!(row.stddev, 0.0);
                assert_eq!(row.instances_unsat, usize::from(brute == 0));
            }
        }
    }

    #[test]
    fn means_are_monotone_in_k() {
        let rows = run_table(&config(vec![8, 10], vec![4.0, 5.0], 20), Benchmark::Random3Sat).unwrap();
        assert_eq!(rows.len(), 12);
        for chunk in rows.chunks(3) {
            assert!(chunk[0].mean_reduced_dim >= chunk[1].mean_reduced_dim);
            assert!(chunk[1].mean_reduced_dim >= chunk[2].mean_reduced_dim);
            for r in chunk {
                assert!(r.mean_reduced_dim >= 0.0 && r.mean_reduced_dim <= r.full_dim as f64);
            }
        }
    }

    #[test]
    fn table_is_deterministic() {
        let cfg = config(vec![8], vec![0.3, 0.4], 10);
        let a = export_table(&run_table(&cfg, Benchmark::Coordination).unwrap(), TableFormat::Csv).unwrap();
        let b = export_table(&run_table(&cfg, Benchmark::Coordination).unwrap(), TableFormat::Csv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = config(vec![8], vec![4.0], 0);
        assert!(run_table(&cfg, Benchmark::Random3Sat).is_err());
        cfg.instances = 1;
        cfg.k_ratios = vec![0.0];
        assert!(run_table(&cfg, Benchmark::Random3Sat).is_err());
        cfg.k_ratios = vec![0.5];
        cfg.columns = vec![1.5];
        assert!(run_table(&cfg, Benchmark::Coordination).is_err());
    }

    fn row(n: usize, column: ColumnKey, k_ratio: f64, mean: f64) -> TableRow {
        TableRow {
            n,
            full_dim: 1 << n,
            column,
            k_ratio,
            mean_reduced_dim: mean,
            stddev: 1.5,
            instances: 100,
            instances_unsat: 0,
        }
    }

    #[test]
    fn csv_single_row() {
        let csv = export_table(&[row(10, ColumnKey::ClauseRatio(4.0), 0.7, 29.03)], TableFormat::Csv).unwrap();
        assert_eq!(csv, "n,2^n,m = 4.0n k=0.7m\n10,1024,29.03\n");
    }

    #[test]
    fn markdown_groups_columns() {
        let mut rows = Vec::new();
        for col in [4.0, 5.0] {
            for k in [0.7, 0.8, 0.9] {
                rows.push(row(10, ColumnKey::ClauseRatio(col), k, col * k));
            }
        }
        let md = export_table(&rows, TableFormat::Markdown).unwrap();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines[0], "| | | m = 4.0n | | | m = 5.0n | | |");
        assert_eq!(lines[2], "| n | 2^n | k=0.7m | k=0.8m | k=0.9m | k=0.7m | k=0.8m | k=0.9m |");
        assert_eq!(lines[3], "| 10 | 1024 | 2.80 | 3.20 | 3.60 | 3.50 | 4.00 | 4.50 |");
    }

    #[test]
    fn json_round_trips() {
        let rows = vec![row(10, ColumnKey::EdgeProbability(0.3), 0.8, 86.09), row(11, ColumnKey::EdgeProbability(0.4), 0.9, 0.0)];
        let json = export_table(&rows, TableFormat::Json).unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        assert_eq!(parse_table_json(&json).unwrap(), rows);
    }

    #[test]
    fn empty_export_is_an_error() {
        assert_eq!(export_table(&[], TableFormat::Csv).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powi(2))).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_err());
        assert!(loglog_slope(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn timing_rows() {
        let cfg = TimingConfig {
            n_range: vec![6, 8],
            clause_ratio: 4.0,
            k_ratio: 0.5,
            schedule: Schedule::parse("2:2", 0.1).unwrap(),
            repeats: 2,
            seed: 1,
            full_max_n: 6,
        };
        let rows = run_timing(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].full_run_time.is_some());
        assert!(rows[1].full_run_time.is_none());
        for r in &rows {
            assert_eq!(r.nu, 4);
            assert!(r.d > 0 && r.reduced_run_time > 0.0 && r.build_time > 0.0);
        }
    }
}
