//! Exhaustive extremal search over all free trees on n vertices.
//!
//! The tree stream is cut into fixed-size batches; each batch is reduced in
//! parallel to (best value, witnesses) and folded into a running result. The
//! reduction only depends on the set of trees scanned, never on how they were
//! split among workers, so reports are identical for any worker count.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::enumeration::{double_star, free_trees_with_cap, path, star, GENERATOR_CAP};
use crate::error::{Error, Result};
use crate::indices::{exp_vdb_from_spectrum, ExponentKind, IndexDef, IndexName};
use crate::spectrum::EdgeSpectrum;
use crate::transforms::{
    balance_move, classify_shape, double_star_arms, find_distance_move, find_pendant_shift,
    lemma_distance_move, pendant_shift_move, star_split_move, MoveReceipt, ShapeTag,
};
use crate::tree::{parents_from_levels, Tree};
use crate::value::{compare_logs, compare_with, BigExpValue, ExpSum, Precision, LOG_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Min, Direction::Max];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Min => "min",
            Direction::Max => "max",
        }
    }

    /// The ordering of `candidate` vs `incumbent` that makes the candidate better.
    fn better(self) -> Ordering {
        match self {
            Direction::Min => Ordering::Less,
            Direction::Max => Ordering::Greater,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" => Ok(Direction::Min),
            "max" => Ok(Direction::Max),
            other => Err(Error::Parse(format!(
                "direction must be min or max, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub workers: usize,
    pub precision: Precision,
    /// Largest n the generator will be asked for.
    pub cap: usize,
    pub batch: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            workers: std::thread::available_parallelism().map_or(1, |p| p.get()),
            precision: Precision::default(),
            cap: GENERATOR_CAP,
            batch: 4096,
        }
    }
}

impl SearchConfig {
    pub fn with_workers(workers: usize) -> Self {
        SearchConfig {
            workers: workers.max(1),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub index: IndexName,
    pub direction: Direction,
    pub extremal_value: BigExpValue,
    pub log_value: f64,
    /// Canonical keys of every tree attaining the extremum, sorted.
    pub witnesses: Vec<String>,
    pub witness_shapes: Vec<ShapeTag>,
    /// Relative tolerance under which log-space co-witnesses were accepted.
    pub tolerance: Option<f64>,
    pub tree_count_scanned: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "ser_millis")]
    pub elapsed: Duration,
}

fn ser_millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

impl ExtremalReport {
    /// JSON without the timing field; identical across runs and worker counts.
    pub fn fingerprint(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("elapsed_ms");
        v.to_string()
    }

    pub fn has_unique_witness(&self, key: &str) -> bool {
        self.witnesses.len() == 1 && self.witnesses[0] == key
    }
}

/// Per-batch reduction state.
enum Acc {
    Empty,
    Exact {
        best: ExpSum,
        witnesses: Vec<Vec<u32>>,
    },
    Log {
        best: f64,
        near: Vec<(f64, Vec<u32>)>,
    },
}

struct Reducer {
    direction: Direction,
    precision: Precision,
}

impl Reducer {
    fn exact_cmp(&self, a: &ExpSum, b: &ExpSum) -> Result<Ordering> {
        compare_with(
            &BigExpValue::Exact(a.clone()),
            &BigExpValue::Exact(b.clone()),
            self.precision,
        )
    }

    fn is_better_log(&self, a: f64, b: f64) -> bool {
        match self.direction {
            Direction::Max => a > b,
            Direction::Min => a < b,
        }
    }

    // Log-space candidates are kept while within twice the tolerance of the
    // running best, so the final tolerance filter sees every tree it could
    // accept no matter which batch raised the best first.
    fn keep_log(best: f64, x: f64) -> bool {
        (x - best).abs() <= 2.0 * LOG_TOLERANCE * x.abs().max(best.abs())
    }

    fn single(value: BigExpValue, levels: Vec<u32>) -> Acc {
        match value {
            BigExpValue::Exact(s) => Acc::Exact {
                best: s,
                witnesses: vec![levels],
            },
            BigExpValue::LogSpace(l) => Acc::Log {
                best: l,
                near: vec![(l, levels)],
            },
        }
    }

    fn merge(&self, a: Acc, b: Acc) -> Result<Acc> {
        Ok(match (a, b) {
            (Acc::Empty, x) | (x, Acc::Empty) => x,
            (
                Acc::Exact {
                    best: ba,
                    witnesses: mut wa,
                },
                Acc::Exact {
                    best: bb,
                    witnesses: wb,
                },
            ) => {
                let ord = self.exact_cmp(&bb, &ba)?;
                if ord == Ordering::Equal {
                    wa.extend(wb);
                    Acc::Exact {
                        best: ba,
                        witnesses: wa,
                    }
                } else if ord == self.direction.better() {
                    Acc::Exact {
                        best: bb,
                        witnesses: wb,
                    }
                } else {
                    Acc::Exact {
                        best: ba,
                        witnesses: wa,
                    }
                }
            }
            (
                Acc::Log {
                    best: ba,
                    near: mut na,
                },
                Acc::Log { best: bb, near: nb },
            ) => {
                let best = if self.is_better_log(bb, ba) { bb } else { ba };
                na.extend(nb);
                na.retain(|(x, _)| Self::keep_log(best, *x));
                Acc::Log { best, near: na }
            }
            _ => return Err(Error::KindMismatch),
        })
    }
}

fn spectrum_of_levels(levels: &[u32]) -> Result<EdgeSpectrum> {
    let parents = parents_from_levels(levels)?;
    let mut degrees = vec![0u32; levels.len()];
    for (v, &p) in parents.iter().enumerate().skip(1) {
        degrees[v] += 1;
        degrees[p] += 1;
    }
    Ok(EdgeSpectrum::from_degrees(
        &degrees,
        parents.iter().enumerate().skip(1).map(|(v, &p)| (p, v)),
    ))
}

fn check_search_range(n: usize, cfg: &SearchConfig) -> Result<()> {
    if n < 4 || n > cfg.cap {
        return Err(Error::NOutOfRange {
            n,
            lo: 4,
            hi: cfg.cap,
        });
    }
    Ok(())
}

/// All trees on `n` vertices attaining the minimum or maximum of the
/// exponential of `index`.
pub fn extremal(
    n: usize,
    index: &IndexDef,
    direction: Direction,
    cfg: &SearchConfig,
) -> Result<ExtremalReport> {
    check_search_range(n, cfg)?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Parse(format!("cannot start worker pool: {e}")))?;
    let reducer = Reducer {
        direction,
        precision: cfg.precision,
    };
    let mut stream = free_trees_with_cap(n, cfg.cap)?;
    let mut acc = Acc::Empty;
    let mut batch: Vec<Vec<u32>> = Vec::with_capacity(cfg.batch);
    loop {
        batch.clear();
        while batch.len() < cfg.batch.max(1) {
            match stream.next_levels() {
                Some(l) => batch.push(l.to_vec()),
                None => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        let local = pool.install(|| {
            batch
                .par_iter()
                .map(|levels| {
                    let value = exp_vdb_from_spectrum(&spectrum_of_levels(levels)?, index)?;
                    Ok(Reducer::single(value, levels.clone()))
                })
                .try_reduce(|| Acc::Empty, |a, b| reducer.merge(a, b))
        })?;
        acc = reducer.merge(acc, local)?;
    }

    let (value, witnesses) = match acc {
        Acc::Exact { best, witnesses } => (BigExpValue::Exact(best), witnesses),
        Acc::Log { best, near } => {
            let w = near
                .into_iter()
                .filter(|(x, _)| compare_logs(*x, best) == Ordering::Equal)
                .map(|(_, l)| l)
                .collect();
            (BigExpValue::LogSpace(best), w)
        }
        Acc::Empty => unreachable!("n >= 4 has trees"),
    };
    let mut trees: Vec<Tree> = witnesses
        .iter()
        .map(|l| Tree::from_level_sequence(l))
        .collect::<Result<_>>()?;
    trees.sort_by(|a, b| a.canonical_key().cmp(b.canonical_key()));
    trees.dedup_by(|a, b| a.is_isomorphic(b));
    let tolerance = (index.kind == ExponentKind::Real).then_some(LOG_TOLERANCE);
    Ok(ExtremalReport {
        n,
        index: index.name,
        direction,
        log_value: value.approx_log()?,
        extremal_value: value,
        witness_shapes: trees.iter().map(classify_shape).collect(),
        witnesses: trees.iter().map(|t| t.canonical_key().to_owned()).collect(),
        tolerance,
        tree_count_scanned: stream.emitted(),
        elapsed: start.elapsed(),
    })
}

/// S_{⌊(n−2)/2⌋,⌈(n−2)/2⌉}.
pub fn balanced_double_star(n: usize) -> Result<Tree> {
    if n < 4 {
        return Err(Error::NOutOfRange {
            n,
            lo: 4,
            hi: usize::MAX,
        });
    }
    double_star((n - 2) / 2, (n - 1) / 2)
}

/// e^M2 of the balanced double star in closed form.
pub fn closed_form_double_star(n: usize) -> Result<BigExpValue> {
    if n < 4 {
        return Err(Error::NOutOfRange {
            n,
            lo: 4,
            hi: usize::MAX,
        });
    }
    let n = n as u64;
    let terms: Vec<(u64, i64)> = if n.is_multiple_of(2) {
        vec![(n * n / 4, 1), (n / 2, n as i64 - 2)]
    } else {
        vec![
            ((n * n - 1) / 4, 1),
            ((n - 1) / 2, (n as i64 - 3) / 2),
            (n.div_ceil(2), (n as i64 - 1) / 2),
        ]
    };
    Ok(BigExpValue::exact(terms))
}

/// Checks exhaustively that the balanced double star is the unique maximizer
/// of e^M2 on n vertices.
pub fn verify_theorem_max(n: usize, cfg: &SearchConfig) -> Result<(bool, ExtremalReport)> {
    let report = extremal(n, IndexName::M2.def(), Direction::Max, cfg)?;
    let want = balanced_double_star(n)?;
    Ok((report.has_unique_witness(want.canonical_key()), report))
}

/// Expected extremal family for a cell of the extremal-tree table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Expectation {
    Path,
    Star,
    BalancedDoubleStar,
    /// No claim: the cell is an open problem.
    Open,
}

impl Expectation {
    pub fn tree(self, n: usize) -> Option<Tree> {
        match self {
            Expectation::Path => path(n).ok(),
            Expectation::Star => star(n).ok(),
            Expectation::BalancedDoubleStar => balanced_double_star(n).ok(),
            Expectation::Open => None,
        }
    }
}

pub fn table1_expectation(index: IndexName, direction: Direction) -> Expectation {
    use Direction::*;
    use Expectation as E;
    use IndexName::*;
    match (index, direction) {
        (M1, Min) | (M2, Min) => E::Path,
        (M1, Max) => E::Star,
        (M2, Max) => E::BalancedDoubleStar,
        (Randic | H | GA | SC, Min) => E::Star,
        (Randic | H | GA | SC, Max) => E::Path,
        (ABC, Min) => E::Open,
        (ABC, Max) => E::Star,
        (AZ, Min) => E::Star,
        (AZ, Max) => E::Open,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Match,
    Mismatch,
    Open,
}

impl CellStatus {
    /// Value of the `matches_paper` column.
    pub fn as_flag(self) -> &'static str {
        match self {
            CellStatus::Match => "true",
            CellStatus::Mismatch => "false",
            CellStatus::Open => "open",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Cell {
    pub expected: Expectation,
    pub status: CellStatus,
    pub report: ExtremalReport,
}

impl Table1Cell {
    pub fn csv_row(&self) -> String {
        let r = &self.report;
        let shapes: Vec<&str> = r.witness_shapes.iter().map(ShapeTag::as_str).collect();
        format!(
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.index,
            r.direction,
            r.log_value,
            r.witnesses.len(),
            shapes.join(";"),
            self.status.as_flag(),
            r.elapsed.as_millis()
        )
    }
}

pub const CSV_HEADER: &str =
    "n,index,direction,log_value,witness_count,witness_shapes,matches_paper,elapsed_ms";

/// Whether a report reproduces the expected extremal tree. Exact values must
/// have it as the only witness; log-space values must include it, other
/// co-witnesses being ties within tolerance.
pub fn judge(report: &ExtremalReport, expected: Expectation) -> CellStatus {
    let Some(want) = expected.tree(report.n) else {
        return CellStatus::Open;
    };
    let key = want.canonical_key();
    let ok = if report.extremal_value.is_exact() {
        report.has_unique_witness(key)
    } else {
        report.witnesses.iter().any(|w| w == key)
    };
    if ok {
        CellStatus::Match
    } else {
        CellStatus::Mismatch
    }
}

/// The extremal-tree table for every n in `n_lo..=n_hi`, restricted to
/// `indices` (all eight when empty), rows ordered by n, index, direction.
pub fn table1_report(
    n_lo: usize,
    n_hi: usize,
    indices: &[IndexName],
    cfg: &SearchConfig,
) -> Result<Vec<Table1Cell>> {
    if n_lo < 5 || n_hi < n_lo || n_hi > cfg.cap {
        return Err(Error::NOutOfRange {
            n: if n_lo < 5 { n_lo } else { n_hi },
            lo: 5,
            hi: cfg.cap,
        });
    }
    let indices = if indices.is_empty() {
        &IndexName::ALL[..]
    } else {
        indices
    };
    let mut cells = Vec::new();
    for n in n_lo..=n_hi {
        for &index in indices {
            for direction in Direction::BOTH {
                let report = extremal(n, index.def(), direction, cfg)?;
                let expected = table1_expectation(index, direction);
                let status = judge(&report, expected);
                cells.push(Table1Cell {
                    expected,
                    status,
                    report,
                });
            }
        }
    }
    Ok(cells)
}

/// Applies improving moves until none applies, in a fixed order: balance a
/// double star (or split a star), then the smallest pendant shift, then the
/// smallest distance move. The tree is relabeled canonically before every
/// step so the trace does not depend on the input labeling.
pub fn hill_climb(t: &Tree) -> Result<Vec<MoveReceipt>> {
    let n = t.n();
    if n < 5 {
        return Err(Error::NOutOfRange {
            n,
            lo: 5,
            hi: usize::MAX,
        });
    }
    let bound = n * n;
    let mut current = t.canonical_relabel();
    let mut receipts = Vec::new();
    while receipts.len() < bound {
        let step = if let Some((x, y)) = double_star_arms(&current) {
            if y - x >= 2 {
                Some(balance_move(&current)?)
            } else {
                None
            }
        } else if current.max_degree() == n - 1 {
            Some(star_split_move(&current)?)
        } else if let Some((u1, u2)) = find_pendant_shift(&current) {
            Some(pendant_shift_move(&current, u1, u2)?)
        } else if let Some((u, v, w)) = find_distance_move(&current) {
            Some(lemma_distance_move(&current, u, v, w)?)
        } else {
            None
        };
        match step {
            Some(r) => {
                current = r.after.canonical_relabel();
                receipts.push(r);
            }
            None => return Ok(receipts),
        }
    }
    Err(Error::MoveLoopDetected(bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SearchConfig {
        SearchConfig::with_workers(2)
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            closed_form_double_star(6).unwrap(),
            BigExpValue::exact([(9, 1), (3, 4)])
        );
        assert_eq!(
            closed_form_double_star(5).unwrap(),
            BigExpValue::exact([(6, 1), (2, 1), (3, 2)])
        );
        assert_eq!(
            closed_form_double_star(4).unwrap(),
            BigExpValue::exact([(4, 1), (2, 2)])
        );
        assert!(closed_form_double_star(3).is_err());
    }

    #[test]
    fn balanced_double_star_beats_star() {
        let m2 = IndexName::M2.def();
        for n in 4..=1000 {
            let s = exp_vdb_from_spectrum(
                &crate::spectrum::edge_spectrum(&star(n).unwrap()).unwrap(),
                m2,
            )
            .unwrap();
            let d = closed_form_double_star(n).unwrap();
            assert_eq!(
                crate::value::compare(&d, &s).unwrap(),
                Ordering::Greater,
                "n = {n}"
            );
        }
    }

    #[test]
    fn n4_max_is_p4() {
        let r = extremal(4, IndexName::M2.def(), Direction::Max, &cfg()).unwrap();
        assert_eq!(
            r.witnesses,
            vec![path(4).unwrap().canonical_key().to_owned()]
        );
        assert_eq!(r.tree_count_scanned, 2);
        let (ok, _) = verify_theorem_max(4, &cfg()).unwrap();
        assert!(ok);
    }

    #[test]
    fn n10_m2() {
        let r = extremal(10, IndexName::M2.def(), Direction::Max, &cfg()).unwrap();
        assert_eq!(r.extremal_value, BigExpValue::exact([(25, 1), (5, 8)]));
        assert!(r.has_unique_witness(double_star(4, 4).unwrap().canonical_key()));
        assert_eq!(r.witness_shapes, vec![ShapeTag::DoubleStar]);
        let r = extremal(10, IndexName::M2.def(), Direction::Min, &cfg()).unwrap();
        assert!(r.has_unique_witness(path(10).unwrap().canonical_key()));
        assert_eq!(r.tree_count_scanned, 106);
    }

    #[test]
    fn range_checks() {
        assert!(extremal(3, IndexName::M2.def(), Direction::Max, &cfg()).is_err());
        assert!(extremal(25, IndexName::M2.def(), Direction::Max, &cfg()).is_err());
        assert!(table1_report(4, 6, &[], &cfg()).is_err());
        assert!(hill_climb(&path(4).unwrap()).is_err());
    }

    #[test]
    fn table_cells_n9() {
        let cells =
            table1_report(9, 9, &[IndexName::M1, IndexName::SC, IndexName::GA], &cfg()).unwrap();
        assert_eq!(cells.len(), 6);
        for c in &cells {
            assert_eq!(c.status, CellStatus::Match, "{:?}", c.report);
        }
        let m1_max = &cells[1].report;
        assert!(m1_max.has_unique_witness(star(9).unwrap().canonical_key()));
    }

    #[test]
    fn hill_climb_examples() {
        let r = hill_climb(&path(7).unwrap()).unwrap();
        assert!(r
            .last()
            .unwrap()
            .after
            .is_isomorphic(&double_star(2, 3).unwrap()));
        let r = hill_climb(&star(9).unwrap()).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r
            .last()
            .unwrap()
            .after
            .is_isomorphic(&double_star(3, 4).unwrap()));
        assert!(hill_climb(&double_star(3, 3).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn direction_parsing() {
        assert_eq!("MAX".parse::<Direction>().unwrap(), Direction::Max);
        assert!("up".parse::<Direction>().is_err());
    }

    #[test]
    fn csv_row_shape() {
        let cells = table1_report(5, 5, &[IndexName::M2], &cfg()).unwrap();
        let row = cells[1].csv_row();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), CSV_HEADER.split(',').count());
        assert_eq!(&cols[..3], &["5", "M2", "max"]);
        assert_eq!(cols[5], "DOUBLE_STAR");
        assert_eq!(cols[6], "true");
    }
}
