//! Tree moves that strictly increase e^M2.
//!
//! Each move checks its hypotheses literally and refuses to run otherwise.
//! The receipt carries the change in e^M2 computed from the move's local
//! algebra (only the edges whose endpoint degrees change), so tests can
//! check it against the difference of the two full evaluations.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::indices::{exp_vdb_index, IndexName};
use crate::tree::{Tree, Vertex};
use crate::value::{BigExpValue, ExpSum, Precision};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MoveKind {
    /// Re-hang every child of `w` onto `v` along a path u–v–w from a
    /// maximum-degree vertex `u`.
    Distance,
    /// Move one pendant from `u2` to `u1`, both hanging off a maximum-degree
    /// vertex.
    PendantShift,
    /// S_{x,y} → S_{x+1,y−1}.
    Balance,
    /// S_n → S_{1,n−3}: the star, read as S_{0,n−2}, balanced by one step.
    StarSplit,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShapeTag {
    Path,
    Star,
    DoubleStar,
    #[serde(rename = "FIG3")]
    Fig3,
    Other,
}

impl ShapeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShapeTag::Path => "PATH",
            ShapeTag::Star => "STAR",
            ShapeTag::DoubleStar => "DOUBLE_STAR",
            ShapeTag::Fig3 => "FIG3",
            ShapeTag::Other => "OTHER",
        }
    }
}

impl std::fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoveReceipt {
    pub kind: MoveKind,
    /// The vertices the move was applied at, in the order of its arguments
    /// (u, v, w / u, u1, u2 / small center, large center, moved leaf).
    pub vertices: Vec<Vertex>,
    #[serde(serialize_with = "ser_levels")]
    pub before: Tree,
    #[serde(serialize_with = "ser_levels")]
    pub after: Tree,
    #[serde(serialize_with = "ser_delta")]
    pub delta: ExpSum,
    #[serde(serialize_with = "ser_ordering")]
    pub strict_increase: Ordering,
}

fn ser_levels<S: Serializer>(t: &Tree, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(t.canonical_key())
}

fn ser_delta<S: Serializer>(d: &ExpSum, s: S) -> Result<S::Ok, S::Error> {
    BigExpValue::Exact(d.clone()).serialize(s)
}

pub(crate) fn ordering_str(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "LESS",
        Ordering::Equal => "EQUAL",
        Ordering::Greater => "GREATER",
    }
}

fn ser_ordering<S: Serializer>(o: &Ordering, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(ordering_str(*o))
}

fn e(x: usize) -> u64 {
    x as u64
}

fn receipt(
    kind: MoveKind,
    vertices: Vec<Vertex>,
    before: &Tree,
    after: Tree,
    terms: Vec<(u64, i64)>,
) -> Result<MoveReceipt> {
    let delta = ExpSum::from_terms(terms);
    let strict_increase = delta.signum(Precision::default())?;
    Ok(MoveReceipt {
        kind,
        vertices,
        before: before.clone(),
        after,
        delta,
        strict_increase,
    })
}

fn violated(msg: impl Into<String>) -> Error {
    Error::PreconditionViolated(msg.into())
}

fn check_vertex(t: &Tree, v: Vertex) -> Result<()> {
    if v >= t.n() {
        return Err(violated(format!("vertex {v} out of range")));
    }
    Ok(())
}

/// Re-hangs all neighbors of `w` other than `v` onto `v`.
///
/// Requires `u` to have maximum degree Δ and u–v–w to be a path with `w`
/// not pendant. Afterwards deg(v) = s + t − 1 and `w` is pendant, where s and
/// t are the old degrees of `v` and `w`.
pub fn lemma_distance_move(t: &Tree, u: Vertex, v: Vertex, w: Vertex) -> Result<MoveReceipt> {
    for x in [u, v, w] {
        check_vertex(t, x)?;
    }
    let delta_deg = t.max_degree();
    if t.degree(u) != delta_deg {
        return Err(violated(format!(
            "vertex {u} does not have maximum degree {delta_deg}"
        )));
    }
    if u == w || !t.has_edge(u, v) || !t.has_edge(v, w) {
        return Err(violated(format!("{u}-{v}-{w} is not a path")));
    }
    let s = t.degree(v);
    let td = t.degree(w);
    if td < 2 {
        return Err(violated(format!("vertex {w} is pendant")));
    }

    let moved: Vec<Vertex> = t.neighbors(w).iter().copied().filter(|&x| x != v).collect();
    let remove: Vec<_> = moved.iter().map(|&x| (w, x)).collect();
    let add: Vec<_> = moved.iter().map(|&x| (v, x)).collect();
    let after = t.rewired(&remove, &add)?;

    let merged = s + td - 1;
    let mut terms = vec![
        (e(delta_deg * merged), 1),
        (e(delta_deg * s), -1),
        (e(s * td), -1),
        (e(merged), 1),
    ];
    for &x in t.neighbors(v).iter().filter(|&&x| x != u && x != w) {
        let xi = t.degree(x);
        terms.push((e(xi * merged), 1));
        terms.push((e(xi * s), -1));
    }
    for &y in &moved {
        let yj = t.degree(y);
        terms.push((e(yj * merged), 1));
        terms.push((e(yj * td), -1));
    }
    receipt(MoveKind::Distance, vec![u, v, w], t, after, terms)
}

/// The common neighbor of `a` and `b`, if any (unique in a tree).
fn common_neighbor(t: &Tree, a: Vertex, b: Vertex) -> Option<Vertex> {
    t.neighbors(a).iter().copied().find(|&x| t.has_edge(b, x))
}

/// Moves one pendant from `u2` to `u1`.
///
/// Requires `u1` and `u2` to hang off a common maximum-degree vertex `u`, all
/// their other neighbors to be pendant, and d1 ≥ d2 ≥ 1 where d1, d2 count
/// those pendants.
pub fn pendant_shift_move(t: &Tree, u1: Vertex, u2: Vertex) -> Result<MoveReceipt> {
    check_vertex(t, u1)?;
    check_vertex(t, u2)?;
    if u1 == u2 {
        return Err(violated("u1 and u2 must differ"));
    }
    let u = common_neighbor(t, u1, u2)
        .ok_or_else(|| violated(format!("{u1} and {u2} have no common neighbor")))?;
    let delta_deg = t.max_degree();
    if t.degree(u) != delta_deg {
        return Err(violated(format!(
            "shared neighbor {u} does not have maximum degree"
        )));
    }
    for side in [u1, u2] {
        if let Some(&x) = t
            .neighbors(side)
            .iter()
            .find(|&&x| x != u && !t.is_pendant(x))
        {
            return Err(violated(format!("{side} has non-pendant neighbor {x}")));
        }
    }
    let d1 = t.degree(u1) - 1;
    let d2 = t.degree(u2) - 1;
    if d2 < 1 {
        return Err(violated(format!("{u2} carries no pendant")));
    }
    if d1 < d2 {
        return Err(violated(format!("d1 = {d1} < d2 = {d2}")));
    }
    let leaf = *t.neighbors(u2).iter().find(|&&x| x != u).expect("d2 >= 1");
    let after = t.rewired(&[(u2, leaf)], &[(u1, leaf)])?;

    let dd = delta_deg;
    let terms = vec![
        (e(dd * (d1 + 2)), 1),
        (e(d1 + 2), (d1 + 1) as i64),
        (e(dd * d2), 1),
        (e(d2), d2 as i64 - 1),
        (e(dd * (d1 + 1)), -1),
        (e(d1 + 1), -(d1 as i64)),
        (e(dd * (d2 + 1)), -1),
        (e(d2 + 1), -(d2 as i64)),
    ];
    receipt(MoveKind::PendantShift, vec![u, u1, u2], t, after, terms)
}

/// Centers of a double star as (smaller-degree, larger-degree), ties broken
/// by vertex id.
fn double_star_centers(t: &Tree) -> Option<(Vertex, Vertex)> {
    let inner: Vec<Vertex> = (0..t.n()).filter(|&v| t.degree(v) >= 2).collect();
    match *inner.as_slice() {
        [a, b] if t.degree(a) <= t.degree(b) => Some((a, b)),
        [a, b] => Some((b, a)),
        _ => None,
    }
}

/// Parameters (x, y), x ≤ y, if `t` is a double star S_{x,y}.
pub fn double_star_arms(t: &Tree) -> Option<(usize, usize)> {
    double_star_centers(t).map(|(a, b)| (t.degree(a) - 1, t.degree(b) - 1))
}

fn shift_receipt(
    kind: MoveKind,
    t: &Tree,
    small: Vertex,
    large: Vertex,
    leaf: Vertex,
    x: usize,
    y: usize,
) -> Result<MoveReceipt> {
    let after = t.rewired(&[(large, leaf)], &[(small, leaf)])?;
    let terms = vec![
        (e((x + 2) * y), 1),
        (e(x + 2), (x + 1) as i64),
        (e(y), y as i64 - 1),
        (e((x + 1) * (y + 1)), -1),
        (e(x + 1), -(x as i64)),
        (e(y + 1), -(y as i64)),
    ];
    receipt(kind, vec![small, large, leaf], t, after, terms)
}

/// S_{x,y} → S_{x+1,y−1} for a double star with y − x ≥ 2.
pub fn balance_move(t: &Tree) -> Result<MoveReceipt> {
    let (small, large) = double_star_centers(t).ok_or(Error::NotADoubleStar)?;
    let x = t.degree(small) - 1;
    let y = t.degree(large) - 1;
    if y - x <= 1 {
        return Err(Error::AlreadyBalanced);
    }
    let leaf = *t
        .neighbors(large)
        .iter()
        .find(|&&v| v != small)
        .expect("y >= 2");
    shift_receipt(MoveKind::Balance, t, small, large, leaf, x, y)
}

/// Splits a star on n ≥ 4 vertices into S_{1,n−3} by hanging one leaf off
/// another.
pub fn star_split_move(t: &Tree) -> Result<MoveReceipt> {
    let n = t.n();
    if n < 4 || t.max_degree() != n - 1 {
        return Err(violated("not a star on at least 4 vertices"));
    }
    let center = (0..n).find(|&v| t.degree(v) == n - 1).unwrap();
    let mut leaves = t.neighbors(center).iter().copied();
    let small = leaves.next().unwrap();
    let leaf = leaves.next().unwrap();
    shift_receipt(MoveKind::StarSplit, t, small, center, leaf, 0, n - 2)
}

pub fn classify_shape(t: &Tree) -> ShapeTag {
    let n = t.n();
    let max = t.max_degree();
    if max <= 2 {
        return ShapeTag::Path;
    }
    if max == n - 1 {
        return ShapeTag::Star;
    }
    if double_star_centers(t).is_some() {
        return ShapeTag::DoubleStar;
    }
    let pendants: Vec<Vertex> = (0..n).filter(|&v| t.is_pendant(v)).collect();
    let centered = (0..n).filter(|&u| t.degree(u) == max).any(|u| {
        let dist = t.distances_from(u);
        pendants.iter().all(|&p| dist[p] <= 2)
    });
    if centered {
        ShapeTag::Fig3
    } else {
        ShapeTag::Other
    }
}

/// Lexicographically smallest (u1, u2) accepted by [`pendant_shift_move`].
pub fn find_pendant_shift(t: &Tree) -> Option<(Vertex, Vertex)> {
    let max = t.max_degree();
    let mut best: Option<(Vertex, Vertex)> = None;
    for u in (0..t.n()).filter(|&u| t.degree(u) == max) {
        let arms: Vec<(Vertex, usize)> = t
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&a| {
                t.degree(a) >= 2 && t.neighbors(a).iter().all(|&x| x == u || t.is_pendant(x))
            })
            .map(|a| (a, t.degree(a) - 1))
            .collect();
        for &(u1, d1) in &arms {
            for &(u2, d2) in &arms {
                if u1 != u2 && d1 >= d2 && best.is_none_or(|b| (u1, u2) < b) {
                    best = Some((u1, u2));
                }
            }
        }
    }
    best
}

/// Lexicographically smallest (u, v, w) accepted by [`lemma_distance_move`].
pub fn find_distance_move(t: &Tree) -> Option<(Vertex, Vertex, Vertex)> {
    let max = t.max_degree();
    for u in (0..t.n()).filter(|&u| t.degree(u) == max) {
        for &v in t.neighbors(u) {
            for &w in t.neighbors(v) {
                if w != u && t.degree(w) >= 2 {
                    return Some((u, v, w));
                }
            }
        }
    }
    None
}

/// e^M2(after) − e^M2(before) evaluated from the two full spectra.
pub fn definitional_delta(before: &Tree, after: &Tree) -> Result<ExpSum> {
    let m2 = IndexName::M2.def();
    let a = exp_vdb_index(after, m2)?;
    let b = exp_vdb_index(before, m2)?;
    Ok(a.as_exact().unwrap().sub(b.as_exact().unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{double_star, fig3_tree, path, star};

    fn assert_consistent(r: &MoveReceipt) {
        assert_eq!(r.after.n(), r.before.n());
        assert_eq!(r.delta, definitional_delta(&r.before, &r.after).unwrap());
        assert_eq!(r.strict_increase, Ordering::Greater);
    }

    #[test]
    fn distance_move_on_spider() {
        // center 0 with legs 1, 2 and 3-4-5-6
        let t = Tree::from_edges(&[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
        let r = lemma_distance_move(&t, 0, 3, 4).unwrap();
        assert_consistent(&r);
        assert_eq!(r.after.degree(3), 3);
        assert_eq!(r.after.degree(4), 1);
        assert_eq!(r.after.degree(0), 3);
        assert!(r.after.has_edge(3, 5));
    }

    #[test]
    fn distance_move_on_p5() {
        let p5 = path(5).unwrap();
        let r = lemma_distance_move(&p5, 1, 2, 3).unwrap();
        assert_consistent(&r);
        // 2e^2 + 2e^4  →  e^2 + e^6 + 2e^3
        assert_eq!(
            r.delta,
            ExpSum::from_terms([(2, -1), (4, -2), (6, 1), (3, 2)])
        );
    }

    #[test]
    fn distance_move_rejects_star() {
        let s5 = star(5).unwrap();
        for (u, v, w) in [(0, 1, 0), (0, 1, 2), (1, 0, 2)] {
            assert!(matches!(
                lemma_distance_move(&s5, u, v, w),
                Err(Error::PreconditionViolated(_))
            ));
        }
        assert_eq!(find_distance_move(&s5), None);
        // not a maximum-degree start
        let t = Tree::from_edges(&[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5)]).unwrap();
        assert!(lemma_distance_move(&t, 4, 3, 0).is_err());
    }

    #[test]
    fn pendant_shift_examples() {
        let t = fig3_tree(1, &[2, 2]).unwrap();
        let r = pendant_shift_move(&t, 1, 4).unwrap();
        assert_consistent(&r);
        assert_eq!(r.after.degree(1), 4);
        assert_eq!(r.after.degree(4), 2);
        assert_eq!(r.vertices, vec![0, 1, 4]);

        let t6 = fig3_tree(1, &[1, 1]).unwrap();
        assert_eq!(t6.n(), 6);
        assert_consistent(&pendant_shift_move(&t6, 1, 3).unwrap());
    }

    #[test]
    fn pendant_shift_rejections() {
        // arm 1 has a non-pendant neighbor (2 continues to 7)
        let t = Tree::from_edges(&[
            (0, 1),
            (1, 2),
            (1, 3),
            (0, 4),
            (4, 5),
            (4, 6),
            (0, 8),
            (2, 7),
        ])
        .unwrap();
        assert!(matches!(
            pendant_shift_move(&t, 1, 4),
            Err(Error::PreconditionViolated(_))
        ));
        let t = fig3_tree(1, &[3, 1]).unwrap();
        // d1 < d2
        assert!(pendant_shift_move(&t, 5, 1).is_err());
        // u2 has no pendant
        let t = fig3_tree(1, &[2]).unwrap();
        assert!(pendant_shift_move(&t, 1, 4).is_err());
    }

    #[test]
    fn balance_examples() {
        let r = balance_move(&double_star(1, 3).unwrap()).unwrap();
        assert_consistent(&r);
        assert!(r.after.is_isomorphic(&double_star(2, 2).unwrap()));
        assert_eq!(
            exp_vdb_index(&r.before, IndexName::M2.def()).unwrap(),
            BigExpValue::exact([(8, 1), (4, 3), (2, 1)])
        );
        let r = balance_move(&double_star(1, 4).unwrap()).unwrap();
        assert_consistent(&r);
        assert!(r.after.is_isomorphic(&double_star(2, 3).unwrap()));
        assert_eq!(
            balance_move(&double_star(2, 3).unwrap()),
            Err(Error::AlreadyBalanced)
        );
        assert_eq!(balance_move(&path(6).unwrap()), Err(Error::NotADoubleStar));
        assert_eq!(balance_move(&star(6).unwrap()), Err(Error::NotADoubleStar));
    }

    #[test]
    fn star_split() {
        for n in 4..20 {
            let r = star_split_move(&star(n).unwrap()).unwrap();
            assert_consistent(&r);
            assert!(r.after.is_isomorphic(&double_star(1, n - 3).unwrap()));
        }
        assert!(star_split_move(&path(5).unwrap()).is_err());
    }

    #[test]
    fn shapes() {
        assert_eq!(
            classify_shape(&double_star(2, 2).unwrap()),
            ShapeTag::DoubleStar
        );
        assert_eq!(classify_shape(&path(6).unwrap()), ShapeTag::Path);
        assert_eq!(classify_shape(&path(4).unwrap()), ShapeTag::Path);
        assert_eq!(classify_shape(&star(6).unwrap()), ShapeTag::Star);
        assert_eq!(
            classify_shape(&fig3_tree(1, &[2, 2]).unwrap()),
            ShapeTag::Fig3
        );
        let spider = Tree::from_edges(&[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
        assert_eq!(classify_shape(&spider), ShapeTag::Other);
    }

    #[test]
    fn receipt_json() {
        let r = balance_move(&double_star(1, 3).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "BALANCE");
        assert_eq!(v["strict_increase"], "GREATER");
        assert_eq!(v["after"], "0 1 2 2 1 1");
        assert_eq!(v["delta"]["kind"], "exact");
    }
}
