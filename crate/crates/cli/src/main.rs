use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use zeno_core::bench::{
    export_table, loglog_slope, run_table, run_timing, Benchmark, TableConfig, TableFormat, TimingConfig, TimingRow,
};
use zeno_core::cnf::{
    constraint_prefix_len, coordination_formula, emit_dimacs, erdos_renyi, parse_dimacs, random_3sat, CnfFormula,
};
use zeno_core::hamiltonians::{build_reduced, SelectionBasis};
use zeno_core::modelcount::{enumerate_models_dpll, DEFAULT_MODEL_CAP};
use zeno_core::qaoa::{
    random_search, run_full_zeno, run_reduced, sample, InitialState, RunResult, Schedule, ScheduleSpace, DEFAULT_DELTA,
};
use zeno_core::verify::{schedule_suite, evolution_suite, SuiteReport};
use zeno_core::zeno::FullState;
use zeno_core::SCHEMA_VERSION;

/// Environment variable read for the worker-pool size; `--threads` wins.
const THREADS_ENV: &str = "ZENO_THREADS";
const DEFAULT_SEED: u64 = 0;

const EXIT_FAILURE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_EMPTY_SUBSPACE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "zeno", version, about = "Constrained QAOA simulation by Zeno-subspace reduction")]
struct Cli {
    /// Emit JSON (with "schema_version") instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for the parallel commands [default: $ZENO_THREADS, else all cores].
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random 3-SAT formula as DIMACS.
    GenSat(GenSatArgs),
    /// Agent-coordination (not-all-equal) formula on a random graph, as DIMACS.
    GenCoord(GenCoordArgs),
    /// Enumerate the models of a formula prefix.
    Models(ModelsArgs),
    /// Build the reduced Hamiltonians for a constraint prefix.
    Reduce(ReduceArgs),
    /// Run a constrained QAOA schedule in the reduced space.
    Simulate(SimulateArgs),
    /// Randomized equivalence checks of the reduced path against full-space references.
    Verify(VerifyArgs),
    /// Mean reduced dimension over random instances.
    BenchTable(BenchTableArgs),
    /// Time reduced against full-space runs.
    BenchTime(BenchTimeArgs),
}

#[derive(Debug, Args)]
struct GenSatArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    seed: u64,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenCoordArgs {
    #[arg(long)]
    n: usize,
    /// Edge probability.
    #[arg(long)]
    p: f64,
    #[arg(long)]
    seed: u64,
    /// Also write the graph as an edge list ("n" then "i j" per line).
    #[arg(long)]
    graph_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Which clauses form the constraint.
#[derive(Debug, Args)]
struct PrefixArgs {
    /// Constraint prefix length k (number of leading clauses).
    #[arg(long, conflicts_with = "k_ratio")]
    k: Option<usize>,
    /// Constraint prefix as a fraction of m; k = floor(ratio * m).
    #[arg(long)]
    k_ratio: Option<f64>,
}

impl PrefixArgs {
    /// Defaults to the whole formula.
    fn resolve(&self, f: &CnfFormula) -> anyhow::Result<usize> {
        let k = match (self.k, self.k_ratio) {
            (Some(k), _) => k,
            (None, Some(r)) => constraint_prefix_len(r, f.m())?,
            (None, None) => f.m(),
        };
        if k > f.m() {
            bail!("prefix length {k} exceeds the clause count {}", f.m());
        }
        Ok(k)
    }
}

#[derive(Debug, Args)]
struct ModelsArgs {
    /// DIMACS file, or "-" for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    #[command(flatten)]
    prefix: PrefixArgs,
    /// Stop after this many models.
    #[arg(long, default_value_t = DEFAULT_MODEL_CAP)]
    cap: usize,
    /// Print the models, not just their number.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    /// DIMACS file, or "-" for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    #[command(flatten)]
    prefix: PrefixArgs,
    /// Time step of the unitaries.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// DIMACS file, or "-" for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    #[command(flatten)]
    prefix: PrefixArgs,
    /// Stages "k1:l1,k2:l2,..." (U_B power, U_P power); U_P acts first within a stage.
    #[arg(long, default_value = "1:1", conflicts_with = "search")]
    schedule: String,
    /// Time step of the unitaries.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// "uniform", or a basis index for a computational basis state.
    #[arg(long, default_value = "uniform")]
    initial: String,
    /// Draw this many random schedules and report the best.
    #[arg(long)]
    search: Option<usize>,
    /// Measurement shots drawn from the final state.
    #[arg(long)]
    shots: Option<usize>,
    /// Seed for --search and --shots.
    #[arg(long)]
    seed: Option<u64>,
    /// Also run the dense full-space reference (n <= 12) and report the deviation.
    #[arg(long)]
    reference: bool,
    /// Amplitudes to list in text output.
    #[arg(long, default_value_t = 8)]
    top: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Evolution,
    Schedule,
    All,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Largest qubit count drawn (3..=10).
    #[arg(long, default_value_t = 10)]
    max_n: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchmarkArg {
    Random3sat,
    Coordination,
}

impl From<BenchmarkArg> for Benchmark {
    fn from(b: BenchmarkArg) -> Self {
        match b {
            BenchmarkArg::Random3sat => Benchmark::Random3Sat,
            BenchmarkArg::Coordination => Benchmark::Coordination,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Args)]
struct BenchTableArgs {
    /// TOML config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    benchmark: Option<BenchmarkArg>,
    /// Variable counts, comma separated [default: 10,11,12].
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Clauses per variable (random3sat) or edge probabilities (coordination)
    /// [default: 4.0,5.0 or 0.3,0.4].
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<f64>>,
    /// Constraint prefix ratios [default: 0.7,0.8,0.9].
    #[arg(long, value_delimiter = ',')]
    k_ratios: Option<Vec<f64>>,
    /// Instances per cell [default: 100].
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output format [default: markdown; json with --json].
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Keys accepted in a bench-table config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    benchmark: Option<Benchmark>,
    n_range: Option<Vec<usize>>,
    columns: Option<Vec<f64>>,
    k_ratios: Option<Vec<f64>>,
    instances: Option<usize>,
    seed: Option<u64>,
    format: Option<TableFormat>,
}

#[derive(Debug, Args)]
struct BenchTimeArgs {
    /// Variable counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "8,9,10,11,12,13,14,15")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 4.0)]
    clause_ratio: f64,
    #[arg(long, default_value_t = 0.6)]
    k_ratio: f64,
    #[arg(long, default_value = "50:50,50:50")]
    schedule: String,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Time the full-space run up to this n.
    #[arg(long, default_value_t = 14)]
    full_max_n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error carrying a specific exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_FAILURE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Exit>() {
                Some(Exit(code, _)) => ExitCode::from(*code),
                None => ExitCode::from(EXIT_FAILURE),
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads(cli.threads)?;
    let json = cli.json;
    match cli.command {
        Command::GenSat(a) => gen_sat(a, json),
        Command::GenCoord(a) => gen_coord(a, json),
        Command::Models(a) => models(a, json),
        Command::Reduce(a) => reduce(a, json),
        Command::Simulate(a) => simulate(a, json),
        Command::Verify(a) => verify(a, json),
        Command::BenchTable(a) => bench_table(a, json),
        Command::BenchTime(a) => bench_time(a, json),
    }
}

fn configure_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count"))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            bail!("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn seed_or_default(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("warning: no --seed given, using {DEFAULT_SEED}");
        DEFAULT_SEED
    })
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn read_formula(path: &str) -> anyhow::Result<CnfFormula> {
    parse_dimacs(&read_input(path)?).with_context(|| format!("parsing {path}"))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(value: &impl Serialize) -> anyhow::Result<()> {
    emit(None, &(serde_json::to_string_pretty(value)? + "\n"))
}

/// Assignment as a bit string, variable `n-1` first.
fn bits(x: u64, n: usize) -> String {
    (0..n).rev().map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn gen_sat(a: GenSatArgs, json: bool) -> anyhow::Result<()> {
    let f = random_3sat(a.n, a.m, a.seed)?;
    let dimacs = emit_dimacs(&f);
    if json {
        let doc = json!({ "schema_version": SCHEMA_VERSION, "n": f.n(), "m": f.m(), "seed": a.seed, "dimacs": dimacs });
        return emit(a.out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"));
    }
    emit(a.out.as_deref(), &dimacs)
}

fn gen_coord(a: GenCoordArgs, json: bool) -> anyhow::Result<()> {
    let g = erdos_renyi(a.n, a.p, a.seed)?;
    let f = coordination_formula(&g)?;
    if let Some(path) = &a.graph_out {
        fs::write(path, g.to_edge_list()).with_context(|| format!("writing {}", path.display()))?;
    }
    let dimacs = emit_dimacs(&f);
    if json {
        let edges: Vec<[usize; 2]> = g.edges().map(|(i, j)| [i, j]).collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION, "n": f.n(), "m": f.m(), "p": a.p, "seed": a.seed,
            "edges": edges, "dimacs": dimacs,
        });
        return emit(a.out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"));
    }
    emit(a.out.as_deref(), &dimacs)
}

fn models(a: ModelsArgs, json: bool) -> anyhow::Result<()> {
    let f = read_formula(&a.input)?;
    let k = a.prefix.resolve(&f)?;
    let set = enumerate_models_dpll(&f.prefix(k)?, a.cap);
    if json {
        return emit_json(&json!({
            "schema_version": SCHEMA_VERSION, "n": f.n(), "m": f.m(), "k": k,
            "count": set.len(), "truncated": set.truncated, "models": set.models,
        }));
    }
    let mut out = format!(
        "n = {}, m = {}, prefix k = {k}: {} model{}{}\n",
        f.n(),
        f.m(),
        set.len(),
        if set.len() == 1 { "" } else { "s" },
        if set.truncated { " (stopped at cap)" } else { "" }
    );
    if a.list {
        for &x in &set.models {
            out.push_str(&format!("{x}\t{}\n", bits(x, f.n())));
        }
    }
    emit(None, &out)
}

fn reduce(a: ReduceArgs, json: bool) -> anyhow::Result<()> {
    let f = read_formula(&a.input)?;
    let k = a.prefix.resolve(&f)?;
    let set = enumerate_models_dpll(&f.prefix(k)?, DEFAULT_MODEL_CAP);
    let basis = SelectionBasis::from_models(&set)?;
    let ops = build_reduced::<f64>(&f, basis, a.delta)?;
    let export = ops.export();
    if json {
        return emit_json(&json!({ "schema_version": SCHEMA_VERSION, "k": k, "m": f.m(), "reduced": export }));
    }
    let mut out = format!(
        "n = {}, m = {}, prefix k = {k}: d = {} of {}\n",
        export.n, f.m(), export.d, export.full_dim
    );
    out.push_str(&format!("mixer couplings (Hamming-1 pairs): {}\n", export.hb_adjacency.len()));
    if export.d > 0 {
        let (lo, hi) = export
            .hp_diagonal
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| (lo.min(h), hi.max(h)));
        out.push_str(&format!("satisfied clauses over the subspace: {lo} to {hi}\n"));
    }
    emit(None, &out)
}

fn parse_initial(spec: &str, n: usize) -> anyhow::Result<InitialState<f64>> {
    if spec == "uniform" {
        return Ok(InitialState::Uniform);
    }
    let x: u64 = spec.parse().map_err(|_| anyhow!("--initial must be \"uniform\" or a basis index, got {spec:?}"))?;
    if n >= 64 || x >> n != 0 {
        bail!("basis index {x} out of range for n = {n}");
    }
    if n > 24 {
        bail!("explicit initial states need n <= 24");
    }
    Ok(InitialState::State(FullState::basis_state(n, x)))
}

fn simulate(a: SimulateArgs, json: bool) -> anyhow::Result<()> {
    let f = read_formula(&a.input)?;
    let k = a.prefix.resolve(&f)?;
    let psi0 = parse_initial(&a.initial, f.n())?;
    let needs_seed = a.search.is_some() || a.shots.is_some();
    let seed = if needs_seed { seed_or_default(a.seed) } else { a.seed.unwrap_or(DEFAULT_SEED) };

    let start = Instant::now();
    let result = match a.search {
        Some(trials) => random_search(&f, k, &ScheduleSpace::default(), trials, seed, &psi0),
        None => {
            let schedule = Schedule::parse(&a.schedule, a.delta)?;
            run_reduced(&f, k, &schedule, &psi0)
        }
    };
    let result = match result {
        Err(zeno_core::Error::EmptySubspace { k }) => {
            return Err(Exit(
                EXIT_EMPTY_SUBSPACE,
                format!("the constraint prefix of length k = {k} is unsatisfiable; the feasible subspace is empty"),
            )
            .into())
        }
        other => other?,
    };
    eprintln!("run took {:.3} s", start.elapsed().as_secs_f64());

    let reference = if a.reference {
        let full = run_full_zeno(&f, k, &result.schedule, &psi0)?;
        Some(result.lift()?.max_abs_diff(&full.lift()?)?)
    } else {
        None
    };
    let counts = match a.shots {
        Some(shots) => Some(sample(&result, shots, seed)?),
        None => None,
    };

    if json {
        let mut doc = serde_json::to_value(result.report())?;
        let obj = doc.as_object_mut().expect("report is an object");
        if let Some(err) = reference {
            obj.insert("reference_max_error".into(), json!(err));
        }
        if let Some(counts) = &counts {
            obj.insert("seed".into(), json!(seed));
            obj.insert("samples".into(), json!(counts.iter().map(|(x, c)| json!([x, c])).collect::<Vec<_>>()));
        }
        return emit_json(&doc);
    }
    emit(None, &simulate_text(&result, f.n(), a.top, reference, counts.as_ref()))
}

fn simulate_text(
    r: &RunResult<f64>,
    n: usize,
    top: usize,
    reference: Option<f64>,
    counts: Option<&std::collections::BTreeMap<u64, usize>>,
) -> String {
    let mut out = format!(
        "n = {n}, m = {}, prefix k = {}: d = {} of {}\n",
        r.m,
        r.k_constraint,
        r.d(),
        1u64 << n
    );
    out.push_str(&format!(
        "schedule {} with step {} (nu = {})\n",
        r.schedule,
        r.schedule.delta(),
        r.nu
    ));
    out.push_str(&format!(
        "weight inside the subspace {:.6}, outside {:.6}\n",
        r.final_reduced.norm_sqr(),
        r.residual_norm_sq
    ));
    out.push_str(&format!("expected satisfied clauses, feasible part: {:.6}\n", r.expectation_constrained));
    out.push_str(&format!("expected satisfied clauses, whole state:   {:.6}\n", r.expectation_full));
    if let Some(err) = reference {
        out.push_str(&format!("deviation from full-space reference: {err:.3e}\n"));
    }
    let mut amps: Vec<(u64, f64)> = r
        .basis()
        .indices()
        .iter()
        .zip(r.final_reduced.amplitudes().iter())
        .map(|(&x, a)| (x, a.norm_sqr()))
        .collect();
    amps.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    if top > 0 {
        out.push_str("most likely feasible assignments:\n");
        for (x, p) in amps.iter().take(top) {
            out.push_str(&format!("  {} ({x})  {p:.6}\n", bits(*x, n)));
        }
    }
    if let Some(counts) = counts {
        let mut sorted: Vec<(&u64, &usize)> = counts.iter().collect();
        sorted.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
        out.push_str(&format!("samples ({} distinct outcomes):\n", counts.len()));
        for (x, c) in sorted.iter().take(top.max(1)) {
            out.push_str(&format!("  {} ({x})  {c}\n", bits(**x, n)));
        }
    }
    out
}

fn verify(a: VerifyArgs, json: bool) -> anyhow::Result<()> {
    let seed = seed_or_default(a.seed);
    let mut reports: Vec<SuiteReport> = Vec::new();
    if matches!(a.suite, Suite::Evolution | Suite::All) {
        reports.push(evolution_suite(a.cases, seed, a.max_n)?);
    }
    if matches!(a.suite, Suite::Schedule | Suite::All) {
        reports.push(schedule_suite(a.cases, seed, a.max_n)?);
    }
    let passed = reports.iter().all(SuiteReport::passed);
    if json {
        emit_json(&json!({ "schema_version": SCHEMA_VERSION, "passed": passed, "suites": reports }))?;
    } else {
        let mut out = String::new();
        for r in &reports {
            out.push_str(&format!(
                "{}: {} cases, max error {:.3e} (tolerance {:.0e}) {}\n",
                r.suite,
                r.cases,
                r.max_error(),
                r.tolerance,
                if r.passed() { "ok" } else { "FAILED" }
            ));
            out.push_str(&format!("  worst: {}\n", r.worst_case));
        }
        emit(None, &out)?;
    }
    if !passed {
        return Err(Exit(EXIT_VERIFY, "maximum error exceeds tolerance".into()).into());
    }
    Ok(())
}

fn bench_table(a: BenchTableArgs, json: bool) -> anyhow::Result<()> {
    let file: TableFile = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => TableFile::default(),
    };
    let benchmark: Benchmark = a.benchmark.map(Into::into).or(file.benchmark).unwrap_or(Benchmark::Random3Sat);
    let default_columns = match benchmark {
        Benchmark::Random3Sat => vec![4.0, 5.0],
        Benchmark::Coordination => vec![0.3, 0.4],
    };
    let seed = match a.seed.or(file.seed) {
        Some(s) => s,
        None => seed_or_default(None),
    };
    let config = TableConfig {
        n_range: a.n.or(file.n_range).unwrap_or_else(|| vec![10, 11, 12]),
        columns: a.columns.or(file.columns).unwrap_or(default_columns),
        k_ratios: a.k_ratios.or(file.k_ratios).unwrap_or_else(|| vec![0.7, 0.8, 0.9]),
        instances: a.instances.or(file.instances).unwrap_or(100),
        seed,
    };
    let format = match a.format {
        Some(FormatArg::Csv) => TableFormat::Csv,
        Some(FormatArg::Json) => TableFormat::Json,
        Some(FormatArg::Markdown) => TableFormat::Markdown,
        None if json => TableFormat::Json,
        None => file.format.unwrap_or(TableFormat::Markdown),
    };
    let rows = run_table(&config, benchmark)?;
    emit(a.out.as_deref(), &export_table(&rows, format)?)
}

fn bench_time(a: BenchTimeArgs, json: bool) -> anyhow::Result<()> {
    let seed = seed_or_default(a.seed);
    let schedule = Schedule::parse(&a.schedule, a.delta)?;
    let config = TimingConfig {
        n_range: a.n,
        clause_ratio: a.clause_ratio,
        k_ratio: a.k_ratio,
        schedule,
        repeats: a.repeats,
        seed,
        full_max_n: a.full_max_n,
    };
    let rows = run_timing(&config)?;
    let reduced: Vec<(f64, f64)> = rows.iter().map(|r| (r.d as f64, r.reduced_run_time)).collect();
    let full: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.full_run_time.map(|t| ((r.n as f64).exp2(), t))).collect();
    let reduced_slope = loglog_slope(&reduced).ok();
    let full_slope = loglog_slope(&full).ok();
    let text = if json {
        serde_json::to_string_pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "rows": rows,
            "reduced_slope_vs_d": reduced_slope,
            "full_slope_vs_dim": full_slope,
        }))? + "\n"
    } else {
        timing_text(&rows, reduced_slope, full_slope)
    };
    emit(a.out.as_deref(), &text)
}

fn timing_text(rows: &[TimingRow], reduced_slope: Option<f64>, full_slope: Option<f64>) -> String {
    let mut out = format!("{:>3} {:>6} {:>6} {:>12} {:>12} {:>12}\n", "n", "d", "nu", "build s", "reduced s", "full s");
    for r in rows {
        let full = r.full_run_time.map(|t| format!("{t:12.3e}")).unwrap_or_else(|| format!("{:>12}", "-"));
        out.push_str(&format!(
            "{:>3} {:>6} {:>6} {:12.3e} {:12.3e} {full}\n",
            r.n, r.d, r.nu, r.build_time, r.reduced_run_time
        ));
    }
    if let Some(s) = reduced_slope {
        out.push_str(&format!("log-log slope of reduced run time vs d: {s:.2}\n"));
    }
    if let Some(s) = full_slope {
        out.push_str(&format!("log-log slope of full run time vs 2^n: {s:.2}\n"));
    }
    out
}
