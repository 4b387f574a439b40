//! Driver for the `bsp` command-line tool.

pub mod svg;

use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use bsp_core::bounds::{check_conjecture1, check_thm3, check_thm4, check_thm6_equality, EqualityCase};
use bsp_core::constructions::{construct_example, ExampleKind};
use bsp_core::decomposition::{audit_all_ties, check_lemslice, SliceMode};
use bsp_core::enumeration::{
    enumerate, parse_size_csv, stats, verify_against_reference, Catalog, EnumOptions, SizeStats,
};
use bsp_core::lemmas;
use bsp_core::pair::BspPair;
use bsp_core::polytope::{
    self, audit_conjecture_on_slacks, check_thm1, check_thm2, construct_polytope, detect_special, extract_pair,
    Polytope2L, PolytopeKind, VertexList,
};
use bsp_core::product::ProductMatrix;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

/// Environment variable that overrides `--workers`.
pub const WORKERS_ENV: &str = "BSP_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "bsp", version, about = "Vector families with binary scalar products, and 2-level polytopes")]
pub struct Cli {
    /// Worker threads for parallel commands. BSP_WORKERS overrides this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate closed pairs in R^d up to isomorphism, as a JSONL catalog.
    Enumerate(EnumerateArgs),
    /// Achievable sizes, maximal pairs and plots for a catalog.
    Stats(StatsArgs),
    /// Check binary products and the product bounds of a pair.
    VerifyPair(VerifyPairArgs),
    /// Print one of the explicit extremal pairs.
    Example(ExampleArgs),
    /// 2-level polytope tools.
    #[command(subcommand)]
    Polytope(PolytopeCommand),
    /// Decompose every catalog pair along each tied direction and check the
    /// inequalities of the inductive step.
    Audit(AuditArgs),
    /// Run the brute-force lemma oracles.
    Lemmas(LemmasArgs),
    /// Check the conjectured interpolating size bound.
    Conjecture(ConjectureArgs),
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(short = 'd', long = "dim")]
    pub d: usize,
    /// Catalog path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Resume from and save progress to this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Stop claiming new work after this many seconds.
    #[arg(long)]
    pub time_budget: Option<u64>,
    /// Print a branch counter to stderr.
    #[arg(long)]
    pub progress: bool,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Catalog file, or `-` for stdin.
    pub catalog: PathBuf,
    /// Print the maximal pairs as CSV instead of the JSON summary.
    #[arg(long)]
    pub csv: bool,
    /// Directory for achievable.csv, maximal.csv and min_product.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for sizes.svg and min_product.svg.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Size-pair CSV to compare the achievable set against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyPairArgs {
    /// Pair JSON file, or `-` for stdin.
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    #[arg(long, value_enum)]
    pub kind: ExampleChoice,
    #[arg(short = 'd', long = "dim")]
    pub d: usize,
    /// Split coordinates for example5.
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleChoice {
    CubePair,
    Example3,
    Example4,
    Example5,
}

impl From<ExampleChoice> for ExampleKind {
    fn from(c: ExampleChoice) -> Self {
        match c {
            ExampleChoice::CubePair => ExampleKind::CubePair,
            ExampleChoice::Example3 => ExampleKind::Example3,
            ExampleChoice::Example4 => ExampleKind::Example4,
            ExampleChoice::Example5 => ExampleKind::Example5,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCommand {
    /// Facets, 2-levelness, bounds and cube/cross detection for a vertex list.
    Check(PolytopeCheckArgs),
    /// Print the vertex list of a shipped construction.
    Example(PolytopeExampleArgs),
}

#[derive(Args, Debug)]
pub struct PolytopeCheckArgs {
    /// Vertex-list JSON file, or `-` for stdin.
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PolytopeExampleArgs {
    #[arg(long, value_enum)]
    pub kind: PolytopeChoice,
    #[arg(short = 'd', long = "dim")]
    pub d: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolytopeChoice {
    SuspensionCube,
    CrossXSegment,
    Cube,
    Cross,
    Simplex,
    Prism,
}

impl From<PolytopeChoice> for PolytopeKind {
    fn from(c: PolytopeChoice) -> Self {
        match c {
            PolytopeChoice::SuspensionCube => PolytopeKind::SuspensionCube,
            PolytopeChoice::CrossXSegment => PolytopeKind::CrossXSegment,
            PolytopeChoice::Cube => PolytopeKind::Cube,
            PolytopeChoice::Cross => PolytopeKind::Cross,
            PolytopeChoice::Simplex => PolytopeKind::Simplex,
            PolytopeChoice::Prism => PolytopeKind::Prism,
        }
    }
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Catalog file, or `-` for stdin.
    pub catalog: PathBuf,
    /// CSV with one row per catalog entry; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Oracle {
    Inequality2,
    Binom,
    Lemma1,
    Lemma2,
    Lemslice,
    Lemma3,
}

#[derive(Args, Debug)]
pub struct LemmasArgs {
    /// Run every oracle (the default when --only is absent).
    #[arg(long)]
    pub all: bool,
    /// Run only these oracles.
    #[arg(long, value_enum)]
    pub only: Vec<Oracle>,
    /// Upper dimension for every oracle, clamped to each oracle's range.
    #[arg(short = 'd', long = "dim")]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random sets per dimension for the slice bound.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    /// Random bases for the cross-polytope certificate.
    #[arg(long, default_value_t = 100)]
    pub bases: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConjectureArgs {
    /// Catalog files; their achievable size sets are checked.
    pub catalogs: Vec<PathBuf>,
    /// Slack-matrix files or directories (JSON object, array or JSONL).
    #[arg(long)]
    pub slacks: Vec<PathBuf>,
    /// Dimension of the slack matrices; upper dimension with --constructed.
    #[arg(short = 'd', long = "dim")]
    pub d: Option<usize>,
    /// Check the slack matrices of every shipped polytope construction.
    #[arg(long)]
    pub constructed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a command, mapped to an exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Library(bsp_core::Error),
    /// The command ran and a check failed; the report was already written.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) | CliError::Library(bsp_core::Error::CounterexampleFound(_)) => EXIT_FAILED,
            _ => EXIT_USAGE,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Io(m) => ("io", m.clone()),
            CliError::Library(e) => ("input", e.to_string()),
            CliError::Failed(m) => ("verification", m.clone()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

impl From<bsp_core::Error> for CliError {
    fn from(e: bsp_core::Error) -> Self {
        CliError::Library(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Parses arguments, runs the command and returns the exit status. Reports
/// go to stdout or `--out`; errors go to stderr as JSON.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

fn workers(flag: Option<usize>) -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) if flag == Some(0) => Err(CliError::Usage("--workers must be positive".into())),
        Err(_) => Ok(flag),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let workers = workers(cli.workers)?;
    if let Some(n) = workers {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    check_paths(&cli.command)?;
    match cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, workers),
        Command::Stats(a) => cmd_stats(a),
        Command::VerifyPair(a) => cmd_verify_pair(a),
        Command::Example(a) => cmd_example(a),
        Command::Polytope(PolytopeCommand::Check(a)) => cmd_polytope_check(a),
        Command::Polytope(PolytopeCommand::Example(a)) => cmd_polytope_example(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Lemmas(a) => cmd_lemmas(a),
        Command::Conjecture(a) => cmd_conjecture(a),
    }
}

/// Inputs must exist and outputs must have an existing parent directory.
fn check_paths(cmd: &Command) -> CliResult<()> {
    let mut inputs: Vec<&PathBuf> = Vec::new();
    let mut files_out: Vec<&PathBuf> = Vec::new();
    let mut dirs_out: Vec<&PathBuf> = Vec::new();
    match cmd {
        Command::Enumerate(a) => files_out.extend(a.out.iter().chain(&a.checkpoint)),
        Command::Stats(a) => {
            inputs.push(&a.catalog);
            inputs.extend(&a.reference);
            dirs_out.extend(a.out.iter().chain(&a.svg));
        }
        Command::VerifyPair(a) => inputs.push(&a.input),
        Command::Example(a) => files_out.extend(&a.out),
        Command::Polytope(PolytopeCommand::Check(a)) => {
            inputs.push(&a.input);
            files_out.extend(&a.out);
        }
        Command::Polytope(PolytopeCommand::Example(a)) => files_out.extend(&a.out),
        Command::Audit(a) => {
            inputs.push(&a.catalog);
            files_out.extend(&a.out);
        }
        Command::Lemmas(a) => files_out.extend(&a.out),
        Command::Conjecture(a) => {
            inputs.extend(a.catalogs.iter().chain(&a.slacks));
            files_out.extend(&a.out);
        }
    }
    for p in inputs {
        if p.as_os_str() != "-" && !p.exists() {
            return Err(CliError::Io(format!("{}: no such file or directory", p.display())));
        }
    }
    for p in files_out {
        let parent = p.parent().filter(|q| !q.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !parent.is_dir() {
            return Err(CliError::Io(format!("{}: parent directory does not exist", p.display())));
        }
    }
    for p in dirs_out {
        if p.exists() && !p.is_dir() {
            return Err(CliError::Io(format!("{}: not a directory", p.display())));
        }
    }
    Ok(())
}

fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err(path))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err(path))
    }
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Library(bsp_core::Error::Parse(format!("{what}: {e}"))))
}

fn read_catalog(path: &Path) -> CliResult<Catalog> {
    let text = read_input(path)?;
    Ok(Catalog::read_jsonl(BufReader::new(text.as_bytes()), None)?)
}

fn fail_if(failed: bool, what: &str) -> CliResult<()> {
    if failed {
        Err(CliError::Failed(what.to_string()))
    } else {
        Ok(())
    }
}

fn cmd_enumerate(a: EnumerateArgs, workers: Option<usize>) -> CliResult<()> {
    let opts = EnumOptions {
        workers,
        checkpoint_path: a.checkpoint.clone(),
        time_budget: a.time_budget.map(Duration::from_secs),
        max_branches: None,
        progress: a.progress,
    };
    let catalog = enumerate(a.d, &opts)?;
    match &a.out {
        Some(p) => {
            write_output(Some(p), &catalog.to_jsonl())?;
            let summary = json!({ "d": a.d, "classes": catalog.len(), "complete": catalog.complete });
            write_output(None, &to_json(&summary))
        }
        None => write_output(None, &catalog.to_jsonl()),
    }
}

/// CSV of `(min side, product)` points.
pub fn min_product_csv(s: &SizeStats) -> String {
    let mut out = String::from("min_size,product\n");
    for (m, p) in s.min_product_points() {
        out.push_str(&format!("{m},{p}\n"));
    }
    out
}

/// Files written by `stats --out` and `stats --svg`, by name.
pub fn stats_artifacts(s: &SizeStats) -> Vec<(&'static str, String)> {
    vec![
        ("achievable.csv", s.achievable_csv()),
        ("maximal.csv", s.maximal_csv()),
        ("min_product.csv", min_product_csv(s)),
        ("sizes.svg", svg::sizes_figure(s.d, &s.size_points())),
        ("min_product.svg", svg::min_product_figure(s.d, &s.min_product_points())),
    ]
}

fn write_artifacts(dir: &Path, artifacts: &[(&str, String)], suffix: &str) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (name, body) in artifacts.iter().filter(|(n, _)| n.ends_with(suffix)) {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io_err(&path))?;
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> CliResult<()> {
    let catalog = read_catalog(&a.catalog)?;
    let s = stats(&catalog);
    let artifacts = stats_artifacts(&s);
    if let Some(dir) = &a.out {
        write_artifacts(dir, &artifacts, ".csv")?;
    }
    if let Some(dir) = &a.svg {
        write_artifacts(dir, &artifacts, ".svg")?;
    }
    let diff = match &a.reference {
        Some(p) => Some(verify_against_reference(&s, &parse_size_csv(&read_input(p)?)?)),
        None => None,
    };
    if a.csv {
        write_output(None, &s.maximal_csv())?;
    } else {
        let large = s.d + 2;
        let summary = json!({
            "d": s.d,
            "classes": catalog.len(),
            "complete": catalog.complete,
            "achievable": s.achievable.len(),
            "maximal_pairs": s.maximal_pairs,
            "max_product": s.max_product,
            "max_product_min_side": { "min_side": large, "value": s.max_product_with_min(large) },
            "reference": diff,
        });
        write_output(None, &to_json(&summary))?;
    }
    fail_if(diff.is_some_and(|d| !d.is_empty()), "achievable sizes differ from the reference")
}

fn cmd_verify_pair(a: VerifyPairArgs) -> CliResult<()> {
    let pair: BspPair = parse_json(&read_input(&a.input)?, "pair")?;
    let check = pair.verify();
    let (m, n) = pair.sizes();
    let mut report = json!({
        "d": pair.dim(),
        "size_a": m,
        "size_b": n,
        "product": pair.product(),
        "binary": check.ok,
        "witness": check.witness,
    });
    let mut ok = check.ok;
    if check.ok {
        let general = check_thm4(&pair);
        let stability = check_thm3(&pair);
        let equality = check_thm6_equality(&pair)?;
        ok = general.pass && stability.pass && !matches!(equality, EqualityCase::Unexpected { .. });
        report["general_bound"] = json!(general);
        report["stability_bound"] = json!(stability);
        report["equality_case"] = json!(equality);
    }
    report["pass"] = json!(ok);
    write_output(None, &to_json(&report))?;
    fail_if(!ok, "pair check failed")
}

fn cmd_example(a: ExampleArgs) -> CliResult<()> {
    let pair = construct_example(a.kind.into(), a.d, a.k)?;
    write_output(a.out.as_deref(), &to_json(&pair))
}

fn cmd_polytope_check(a: PolytopeCheckArgs) -> CliResult<()> {
    let list: VertexList = parse_json(&read_input(&a.input)?, "vertex list")?;
    let p = Polytope2L::from_list(&list)?;
    let mut report = json!({
        "d": p.d,
        "f0": p.f0(),
        "facets": p.f_top(),
        "two_level": p.two_level,
    });
    let mut ok = p.two_level;
    if p.two_level {
        let thm1 = check_thm1(&p);
        ok &= thm1.pass;
        report["special"] = json!(detect_special(&p)?);
        report["vertex_facet_bound"] = json!(thm1);
        if p.d > 1 {
            let thm2 = check_thm2(&p)?;
            ok &= thm2.pass;
            report["stability_bound"] = json!(thm2);
        }
        let pair = extract_pair(&p)?;
        report["pair_sizes"] = json!(pair.sizes());
        report["pair_binary"] = json!(pair.verify().ok);
    }
    report["pass"] = json!(ok);
    write_output(a.out.as_deref(), &to_json(&report))?;
    fail_if(!ok, "polytope check failed")
}

fn cmd_polytope_example(a: PolytopeExampleArgs) -> CliResult<()> {
    let p = construct_polytope(a.kind.into(), a.d)?;
    write_output(a.out.as_deref(), &to_json(&p.to_list()))
}

/// Audit outcome of one catalog entry, both orientations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditRow {
    pub index: usize,
    pub size_a: usize,
    pub size_b: usize,
    pub ties: usize,
    pub swapped_ties: usize,
    pub failures: Vec<String>,
}

impl AuditRow {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn audit_side(p: &BspPair, side: &str, failures: &mut Vec<String>) -> usize {
    match audit_all_ties(p) {
        Ok(reports) => {
            for r in &reports {
                failures.extend(r.failures().map(|i| format!("{side}:{}", i.name)));
            }
            reports.len()
        }
        Err(e) => {
            failures.push(format!("{side}:{e}"));
            0
        }
    }
}

pub fn audit_catalog(c: &Catalog) -> Vec<AuditRow> {
    let entries: Vec<_> = c.classes.values().collect();
    entries
        .par_iter()
        .enumerate()
        .map(|(index, e)| {
            let mut failures = Vec::new();
            let (ties, swapped_ties) = match e.pair() {
                Ok(p) => (audit_side(&p, "a", &mut failures), audit_side(&p.swapped(), "b", &mut failures)),
                Err(err) => {
                    failures.push(err.to_string());
                    (0, 0)
                }
            };
            AuditRow { index, size_a: e.size_a, size_b: e.size_b, ties, swapped_ties, failures }
        })
        .collect()
}

pub fn audit_csv(rows: &[AuditRow]) -> String {
    let mut s = String::from("index,size_a,size_b,ties,swapped_ties,pass,failures\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.index,
            r.size_a,
            r.size_b,
            r.ties,
            r.swapped_ties,
            r.pass(),
            r.failures.join(";").replace(',', " ")
        ));
    }
    s
}

fn cmd_audit(a: AuditArgs) -> CliResult<()> {
    let rows = audit_catalog(&read_catalog(&a.catalog)?);
    write_output(a.out.as_deref(), &audit_csv(&rows))?;
    let failed = rows.iter().filter(|r| !r.pass()).count();
    fail_if(failed > 0, &format!("{failed} catalog entries failed the audit"))
}

/// Default parameter ranges of the lemma oracles.
pub const INEQUALITY2_MAX: usize = 20;
pub const BINOM_MAX: usize = 20;
pub const LEMMA1_DEFAULT: usize = 10;
pub const SLICE_EXHAUSTIVE_MAX: usize = 2;
pub const SLICE_RANDOM_MAX: usize = 5;
pub const LEMMA3_MAX: usize = 5;

/// Runs the selected oracles; returns the JSON report and overall pass.
pub fn run_lemmas(a: &LemmasArgs) -> CliResult<(Value, bool)> {
    let selected: Vec<Oracle> = if a.only.is_empty() || a.all { Oracle::value_variants().to_vec() } else { a.only.clone() };
    let cap = |default: usize, max: usize| a.d.unwrap_or(default).min(max);
    let mut report = serde_json::Map::new();
    let mut pass = true;
    for o in selected {
        let (name, value, ok) = match o {
            Oracle::Inequality2 => {
                let r = lemmas::check_inequality2(a.d.unwrap_or(INEQUALITY2_MAX));
                ("inequality2", json!(r), r.pass())
            }
            Oracle::Binom => {
                let r = lemmas::check_binom_bound(a.d.unwrap_or(BINOM_MAX));
                ("binom", json!(r), r.pass())
            }
            Oracle::Lemma1 => {
                let reports = (2..=cap(LEMMA1_DEFAULT, lemmas::LEMMA1_MAX_DIM))
                    .map(lemmas::check_lemma1)
                    .collect::<bsp_core::Result<Vec<_>>>()?;
                let ok = reports.iter().all(|r| r.pass());
                ("lemma1", json!(reports), ok)
            }
            Oracle::Lemma2 => {
                let reports = (2..=cap(lemmas::LEMMA2_MAX_DIM, lemmas::LEMMA2_MAX_DIM))
                    .map(lemmas::check_lemma2)
                    .collect::<bsp_core::Result<Vec<_>>>()?;
                let ok = reports.iter().all(|r| r.pass());
                ("lemma2", json!(reports), ok)
            }
            Oracle::Lemslice => {
                let mut reports = Vec::new();
                for d in 1..=cap(SLICE_EXHAUSTIVE_MAX, SLICE_EXHAUSTIVE_MAX) {
                    reports.push(check_lemslice(d, SliceMode::Exhaustive)?);
                }
                for d in 1..=a.d.unwrap_or(SLICE_RANDOM_MAX) {
                    reports.push(check_lemslice(d, SliceMode::Random { seed: a.seed, trials: a.trials })?);
                }
                ("lemslice", json!(reports), true)
            }
            Oracle::Lemma3 => {
                let r = lemmas::check_lemma3(a.d.unwrap_or(LEMMA3_MAX), a.bases, a.seed)?;
                ("lemma3", json!(r), r.pass())
            }
        };
        pass &= ok;
        report.insert(name.into(), value);
    }
    report.insert("pass".into(), json!(pass));
    Ok((Value::Object(report), pass))
}

fn cmd_lemmas(a: LemmasArgs) -> CliResult<()> {
    let (report, pass) = run_lemmas(&a)?;
    write_output(a.out.as_deref(), &to_json(&report))?;
    fail_if(!pass, "a lemma oracle reported a violation")
}

/// Slack matrices from a JSON object, a JSON array, or one object per line.
pub fn parse_slacks(text: &str) -> bsp_core::Result<Vec<ProductMatrix>> {
    fn parse<T: serde::de::DeserializeOwned>(s: &str) -> bsp_core::Result<T> {
        serde_json::from_str(s).map_err(|e| bsp_core::Error::MalformedSlack(e.to_string()))
    }
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return parse(trimmed);
    }
    if let Ok(m) = parse::<ProductMatrix>(trimmed) {
        return Ok(vec![m]);
    }
    text.lines().filter(|l| !l.trim().is_empty()).map(parse).collect()
}

fn slack_files(path: &Path) -> CliResult<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(io_err(path))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json" || x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

/// Slack matrices of every shipped construction in dimensions `2..=d_max`.
pub fn constructed_slacks(d_max: usize) -> bsp_core::Result<Vec<(usize, Vec<ProductMatrix>)>> {
    (2..=d_max)
        .map(|d| {
            let slacks = PolytopeKind::ALL
                .iter()
                .map(|&k| construct_polytope(k, d).and_then(|p| polytope::slack_matrix(&p).cloned()))
                .collect::<bsp_core::Result<Vec<_>>>()?;
            Ok((d, slacks))
        })
        .collect()
}

fn cmd_conjecture(a: ConjectureArgs) -> CliResult<()> {
    if a.catalogs.is_empty() && a.slacks.is_empty() && !a.constructed {
        return Err(CliError::Usage("give catalogs, --slacks or --constructed".into()));
    }
    let mut reports = Vec::new();
    for path in &a.catalogs {
        let c = read_catalog(path)?;
        let s = stats(&c);
        let r = check_conjecture1(&s.size_points(), c.d)?;
        reports.push(json!({ "source": path.display().to_string(), "report": r, "pass": r.pass() }));
    }
    if !a.slacks.is_empty() {
        let d = a.d.ok_or_else(|| CliError::Usage("--slacks needs -d".into()))?;
        for path in &a.slacks {
            for file in slack_files(path)? {
                let slacks = parse_slacks(&read_input(&file)?)?;
                let r = audit_conjecture_on_slacks(&slacks, d)?;
                reports.push(json!({ "source": file.display().to_string(), "report": r, "pass": r.pass() }));
            }
        }
    }
    if a.constructed {
        for (d, slacks) in constructed_slacks(a.d.unwrap_or(polytope::MAX_POLYTOPE_DIM))? {
            let r = audit_conjecture_on_slacks(&slacks, d)?;
            reports.push(json!({ "source": format!("constructed d={d}"), "report": r, "pass": r.pass() }));
        }
    }
    let pass = reports.iter().all(|r| r["pass"] == json!(true));
    write_output(a.out.as_deref(), &to_json(&json!({ "reports": reports, "pass": pass })))?;
    fail_if(!pass, "conjectured bound violated")
}
