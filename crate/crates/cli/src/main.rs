mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{FileConfig, NRange, OutputFormat, Overrides, RunConfig};
use zext::enumeration::{free_tree_count, free_trees};
use zext::format::{parse_tree, TreeFormat};
use zext::indices::{exp_vdb_index, vdb_index, IndexDef, IndexName};
use zext::search::{
    balanced_double_star, extremal, hill_climb, judge, table1_expectation, table1_report,
    verify_theorem_max, CellStatus, Direction, Table1Cell, CSV_HEADER,
};
use zext::spectrum::edge_spectrum;
use zext::transforms::{classify_shape, ShapeTag};
use zext::{Error, Tree};

#[derive(Parser)]
#[command(
    name = "zext",
    version,
    about = "Extremal trees for exponential vertex-degree-based indices"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Worker threads for exhaustive searches [default: available parallelism]
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Initial bits for exact sign resolution
    #[arg(long, global = true)]
    precision_start: Option<u32>,
    /// Maximum bits before giving up on an exact comparison
    #[arg(long, global = true)]
    precision_cap: Option<u32>,
    /// Directory holding cached tree lists
    #[arg(long, global = true, env = "ZEXT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// TOML file with defaults for any of the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TreeInput {
    /// Tree file: edge list, level sequence or Prüfer sequence
    file: PathBuf,
    /// Input format [default: detect]
    #[arg(long)]
    tree_format: Option<TreeFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// List every free tree on n vertices as canonical level sequences
    Enumerate {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print the edge-degree spectrum of a tree
    Spectrum(TreeInput),
    /// Evaluate an index, or its exponential with --exp
    Index {
        #[command(flatten)]
        input: TreeInput,
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        exp: bool,
    },
    /// Find every tree on n vertices minimizing or maximizing an exponential index
    Extremal {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        direction: Option<Direction>,
    },
    /// Check that the balanced double star uniquely maximizes e^M2
    Verify {
        #[arg(long)]
        n: Option<NRange>,
    },
    /// Extremal trees for all eight indices, both directions
    Table1 {
        #[arg(long)]
        n: Option<NRange>,
        /// Restrict to these indices (repeatable or comma-separated)
        #[arg(long, value_delimiter = ',')]
        index: Vec<String>,
    },
    /// Improve a tree by successive moves until none applies
    Hillclimb(TreeInput),
}

/// Failure with its exit status.
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionExceeded(_)
            | Error::KindMismatch
            | Error::NonPositiveValue
            | Error::MoveLoopDetected(_)
            | Error::NotADoubleStar
            | Error::AlreadyBalanced => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<(String, bool), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, ok)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let g = cli.global;
    let file = match &g.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        workers: g.workers,
        precision_start: g.precision_start,
        precision_cap: g.precision_cap,
        cache_dir: g.cache_dir,
        format: g.format,
    };
    let cfg = RunConfig::resolve(file, flags).map_err(Failure::Usage)?;
    match cli.command {
        Command::Enumerate { n } => cmd_enumerate(&cfg, single_n(n, &cfg)?),
        Command::Spectrum(input) => cmd_spectrum(&cfg, &read_tree(&input)?),
        Command::Index { input, index, exp } => {
            cmd_index(&cfg, &read_tree(&input)?, one_index(index, &cfg)?, exp)
        }
        Command::Extremal {
            n,
            index,
            direction,
        } => {
            let direction = direction
                .or(cfg.direction)
                .ok_or_else(|| Failure::Usage("--direction is required".into()))?;
            cmd_extremal(&cfg, single_n(n, &cfg)?, one_index(index, &cfg)?, direction)
        }
        Command::Verify { n } => cmd_verify(&cfg, n_range(n, &cfg)?),
        Command::Table1 { n, index } => {
            let names = if index.is_empty() {
                cfg.index.clone()
            } else {
                index
            };
            let indices = names
                .iter()
                .map(|s| s.parse::<IndexName>())
                .collect::<Result<Vec<_>, _>>()?;
            cmd_table1(&cfg, n_range(n, &cfg)?, &indices)
        }
        Command::Hillclimb(input) => cmd_hillclimb(&cfg, &read_tree(&input)?),
    }
}

fn single_n(n: Option<usize>, cfg: &RunConfig) -> Result<usize, Failure> {
    match (n, cfg.n) {
        (Some(n), _) => Ok(n),
        (None, Some(r)) if r.lo == r.hi => Ok(r.lo),
        _ => Err(Failure::Usage("--n is required".into())),
    }
}

fn n_range(n: Option<NRange>, cfg: &RunConfig) -> Result<NRange, Failure> {
    n.or(cfg.n)
        .ok_or_else(|| Failure::Usage("--n is required".into()))
}

fn one_index(index: Option<String>, cfg: &RunConfig) -> Result<&'static IndexDef, Failure> {
    let name = index
        .or_else(|| cfg.index.first().cloned())
        .ok_or_else(|| Failure::Usage("--index is required".into()))?;
    Ok(IndexDef::by_name(&name)?)
}

fn read_tree(input: &TreeInput) -> Result<Tree, Failure> {
    let text = std::fs::read_to_string(&input.file)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.file.display())))?;
    Ok(parse_tree(&text, input.tree_format)?)
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn shape_list(shapes: &[ShapeTag]) -> String {
    shapes
        .iter()
        .map(ShapeTag::as_str)
        .collect::<Vec<_>>()
        .join(";")
}

/// Header plus one canonical level sequence per line.
fn tree_listing(n: usize) -> Result<String, Failure> {
    let mut stream = free_trees(n)?;
    let count = free_tree_count(n)?;
    let mut out = format!("# n={n} count={count}\n");
    while let Some(levels) = stream.next_levels() {
        let line: Vec<String> = levels.iter().map(u32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    if stream.emitted() != count {
        return Err(Failure::Internal(format!(
            "generated {} trees but expected {count}",
            stream.emitted()
        )));
    }
    Ok(out)
}

fn cached_listing(n: usize, dir: &Path) -> Result<String, Failure> {
    let path = dir.join(format!("trees_n{n}.txt"));
    let header = format!("# n={n} count={}\n", free_tree_count(n)?);
    if let Ok(text) = std::fs::read_to_string(&path) {
        let lines = text.lines().count() as u64;
        if text.starts_with(&header) && lines == free_tree_count(n)? + 1 {
            return Ok(text);
        }
    }
    let text = tree_listing(n)?;
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, &text))
        .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(text)
}

fn cmd_enumerate(cfg: &RunConfig, n: usize) -> CmdResult {
    // validates n before touching the cache
    free_trees(n)?;
    let listing = match &cfg.cache_dir {
        Some(dir) => cached_listing(n, dir)?,
        None => tree_listing(n)?,
    };
    let out = match cfg.format {
        OutputFormat::Text => listing,
        OutputFormat::Json => {
            let trees: Vec<&str> = listing.lines().skip(1).collect();
            to_json(&json!({ "n": n, "count": trees.len(), "trees": trees }))
        }
        OutputFormat::Csv => {
            let mut out = String::from("n,level_sequence\n");
            for line in listing.lines().skip(1) {
                writeln!(out, "{n},{line}").unwrap();
            }
            out
        }
    };
    Ok((out, true))
}

fn cmd_spectrum(cfg: &RunConfig, t: &Tree) -> CmdResult {
    let spec = edge_spectrum(t)?;
    let out = match cfg.format {
        OutputFormat::Json => {
            let rows: Vec<_> = spec
                .iter()
                .map(|((i, j), c)| json!({ "i": i, "j": j, "count": c }))
                .collect();
            to_json(&json!({ "n": t.n(), "spectrum": rows }))
        }
        OutputFormat::Csv => {
            let mut out = String::from("i,j,count\n");
            for ((i, j), c) in spec.iter() {
                writeln!(out, "{i},{j},{c}").unwrap();
            }
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            for ((i, j), c) in spec.iter() {
                writeln!(out, "({i},{j}) x {c}").unwrap();
            }
            out
        }
    };
    Ok((out, true))
}

fn cmd_index(cfg: &RunConfig, t: &Tree, index: &IndexDef, exp: bool) -> CmdResult {
    let out = if exp {
        let value = exp_vdb_index(t, index)?;
        let log = value.approx_log()?;
        match cfg.format {
            OutputFormat::Json => to_json(&json!({
                "index": index.name, "exp": true, "value": value, "log_value": log,
            })),
            OutputFormat::Csv => format!("index,exp,log_value\n{},true,{log}\n", index.name),
            OutputFormat::Text => format!("e^{} = {value}\nlog = {log}\n", index.name),
        }
    } else {
        let value = vdb_index(t, index)?;
        match cfg.format {
            OutputFormat::Json => {
                to_json(&json!({ "index": index.name, "exp": false, "value": value }))
            }
            OutputFormat::Csv => {
                format!("index,exp,value\n{},false,{}\n", index.name, value.as_f64())
            }
            OutputFormat::Text => format!("{} = {}\n", index.name, value.as_f64()),
        }
    };
    Ok((out, true))
}

fn cmd_extremal(cfg: &RunConfig, n: usize, index: &IndexDef, direction: Direction) -> CmdResult {
    let report = extremal(n, index, direction, &cfg.search())?;
    let status = judge(&report, table1_expectation(index.name, direction));
    let out = match cfg.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => {
            let cell = Table1Cell {
                expected: table1_expectation(index.name, direction),
                status,
                report,
            };
            format!("{CSV_HEADER}\n{}\n", cell.csv_row())
        }
        OutputFormat::Text => {
            let mut out = String::new();
            writeln!(out, "n={n} index=e^{} direction={direction}", index.name).unwrap();
            writeln!(out, "log value: {}", report.log_value).unwrap();
            if report.extremal_value.is_exact() {
                writeln!(out, "value: {}", report.extremal_value).unwrap();
            } else {
                writeln!(
                    out,
                    "ties within relative tolerance {:e}",
                    report.tolerance.unwrap_or(0.0)
                )
                .unwrap();
            }
            writeln!(out, "witnesses: {}", report.witnesses.len()).unwrap();
            for (key, shape) in report.witnesses.iter().zip(&report.witness_shapes) {
                writeln!(out, "  {key}  {shape}").unwrap();
            }
            writeln!(out, "trees scanned: {}", report.tree_count_scanned).unwrap();
            out
        }
    };
    Ok((out, true))
}

fn cmd_verify(cfg: &RunConfig, range: NRange) -> CmdResult {
    let search = cfg.search();
    let mut all_ok = true;
    let mut text = String::new();
    let mut rows = Vec::new();
    for n in range.lo..=range.hi {
        let (ok, report) = verify_theorem_max(n, &search)?;
        let want = balanced_double_star(n)?;
        all_ok &= ok;
        let note = if n == 4 { " (P4 = S_{1,1})" } else { "" };
        if ok {
            writeln!(
                text,
                "n={n}: ok, unique maximizer S_{{{},{}}} [{}]{note}, {} trees scanned",
                (n - 2) / 2,
                (n - 1) / 2,
                want.canonical_key(),
                report.tree_count_scanned
            )
            .unwrap();
        } else {
            writeln!(
                text,
                "n={n}: FAIL, expected [{}], found {:?}",
                want.canonical_key(),
                report.witnesses
            )
            .unwrap();
        }
        rows.push((n, ok, want.canonical_key().to_owned(), report));
    }
    let out = match cfg.format {
        OutputFormat::Text => text,
        OutputFormat::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(n, ok, want, r)| json!({ "n": n, "ok": ok, "expected": want, "report": r }))
                .collect();
            to_json(&v)
        }
        OutputFormat::Csv => {
            let mut out =
                String::from("n,ok,expected,witness_count,log_value,tree_count_scanned\n");
            for (n, ok, want, r) in &rows {
                writeln!(
                    out,
                    "{n},{ok},{want},{},{},{}",
                    r.witnesses.len(),
                    r.log_value,
                    r.tree_count_scanned
                )
                .unwrap();
            }
            out
        }
    };
    Ok((out, all_ok))
}

fn cmd_table1(cfg: &RunConfig, range: NRange, indices: &[IndexName]) -> CmdResult {
    let cells = table1_report(range.lo, range.hi, indices, &cfg.search())?;
    let ok = cells.iter().all(|c| c.status != CellStatus::Mismatch);
    let out = match cfg.format {
        OutputFormat::Json => to_json(&cells),
        OutputFormat::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for c in &cells {
                out.push_str(&c.csv_row());
                out.push('\n');
            }
            out
        }
        OutputFormat::Text => {
            let mut out = format!(
                "{:>3}  {:<8} {:<4} {:>14}  {:<9} witnesses\n",
                "n", "index", "dir", "log value", "status"
            );
            for c in &cells {
                let r = &c.report;
                writeln!(
                    out,
                    "{:>3}  {:<8} {:<4} {:>14.6}  {:<9} {}",
                    r.n,
                    format!("e^{}", r.index),
                    r.direction,
                    r.log_value,
                    c.status.as_flag(),
                    shape_list(&r.witness_shapes)
                )
                .unwrap();
            }
            out
        }
    };
    Ok((out, ok))
}

fn cmd_hillclimb(cfg: &RunConfig, t: &Tree) -> CmdResult {
    let receipts = hill_climb(t)?;
    let end = receipts.last().map_or(t, |r| &r.after);
    let m2 = IndexName::M2.def();
    let log_of = |t: &Tree| exp_vdb_index(t, m2).and_then(|v| v.approx_log());
    let out = match cfg.format {
        OutputFormat::Json => to_json(&json!({
            "start": t.canonical_key(),
            "end": end.canonical_key(),
            "end_shape": classify_shape(end),
            "moves": receipts,
        })),
        OutputFormat::Csv => {
            let mut out = String::from("step,kind,before,after,log_before,log_after\n");
            for (i, r) in receipts.iter().enumerate() {
                writeln!(
                    out,
                    "{},{:?},{},{},{},{}",
                    i + 1,
                    r.kind,
                    r.before.canonical_key(),
                    r.after.canonical_key(),
                    log_of(&r.before)?,
                    log_of(&r.after)?
                )
                .unwrap();
            }
            out
        }
        OutputFormat::Text => {
            let mut out = format!("start: [{}] {}\n", t.canonical_key(), classify_shape(t));
            for (i, r) in receipts.iter().enumerate() {
                writeln!(
                    out,
                    "{:>3}. {:<12} at {:?}: log e^M2 {:.6} -> {:.6}",
                    i + 1,
                    format!("{:?}", r.kind),
                    r.vertices,
                    log_of(&r.before)?,
                    log_of(&r.after)?
                )
                .unwrap();
            }
            writeln!(
                out,
                "end: [{}] {}",
                end.canonical_key(),
                classify_shape(end)
            )
            .unwrap();
            out
        }
    };
    Ok((out, true))
}
