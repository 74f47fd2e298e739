//! Tree generation: every free tree on n vertices, plus the named families
//! (paths, stars, double stars and centers-with-arms) used by the moves.
//!
//! [`free_trees`] walks centroid-rooted level sequences in the order of the
//! Wright–Richmond–Odlyzko–McKay successor, which visits each isomorphism
//! class once in constant amortized time. [`free_tree_count`] is an
//! independent count by Otter's formula used to validate it.

use crate::error::{Error, Result};
use crate::tree::{Tree, Vertex};

/// Default upper bound on n for exhaustive generation.
pub const GENERATOR_CAP: usize = 24;

/// Pull-based stream over the free trees on `n` vertices.
#[derive(Clone, Debug)]
pub struct TreeStream {
    n: usize,
    // next candidate to validate; None once exhausted
    pending: Option<Vec<u32>>,
    current: Vec<u32>,
    emitted: u64,
}

pub fn free_trees(n: usize) -> Result<TreeStream> {
    free_trees_with_cap(n, GENERATOR_CAP)
}

pub fn free_trees_with_cap(n: usize, cap: usize) -> Result<TreeStream> {
    if n < 1 || n > cap {
        return Err(Error::NOutOfRange { n, lo: 1, hi: cap });
    }
    // start from the path rooted at its center
    let pending: Vec<u32> = (0..=(n / 2) as u32)
        .chain(1..n.div_ceil(2) as u32)
        .collect();
    Ok(TreeStream {
        n,
        pending: Some(pending),
        current: Vec::new(),
        emitted: 0,
    })
}

impl TreeStream {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Advances and returns the next level sequence without building a tree.
    pub fn next_levels(&mut self) -> Option<&[u32]> {
        let candidate = self.pending.take()?;
        self.current = if self.n <= 2 {
            candidate
        } else {
            next_free(candidate)
        };
        self.pending = if self.n <= 2 {
            None
        } else {
            next_rooted(&self.current, None)
        };
        self.emitted += 1;
        Some(&self.current)
    }
}

impl Iterator for TreeStream {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        let levels = self.next_levels()?;
        Some(Tree::from_level_sequence(levels).expect("generator emits valid level sequences"))
    }
}

/// Beyer–Hedetniemi successor of a rooted level sequence, optionally forced
/// to branch at position `p`.
fn next_rooted(prev: &[u32], p: Option<usize>) -> Option<Vec<u32>> {
    let mut p = match p {
        Some(p) => p,
        None => {
            let mut p = prev.len() - 1;
            while prev[p] == 1 {
                if p == 0 {
                    return None;
                }
                p -= 1;
            }
            p
        }
    };
    if p == 0 {
        return None;
    }
    let mut q = p - 1;
    while prev[q] != prev[p] - 1 {
        q -= 1;
    }
    let mut out = prev.to_vec();
    let shift = p - q;
    while p < out.len() {
        out[p] = out[p - shift];
        p += 1;
    }
    Some(out)
}

/// Splits a level sequence into its first root subtree (re-rooted at depth
/// 0) and the remainder with that subtree removed.
fn split_first_subtree(levels: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let m = levels
        .iter()
        .enumerate()
        .skip(2)
        .find(|&(_, &d)| d == 1)
        .map_or(levels.len(), |(i, _)| i);
    let left = levels[1..m].iter().map(|d| d - 1).collect();
    let rest = std::iter::once(0)
        .chain(levels[m..].iter().copied())
        .collect();
    (left, rest)
}

/// Returns `candidate` if it is a centroid-rooted canonical free tree,
/// otherwise jumps to the next sequence that is.
fn next_free(candidate: Vec<u32>) -> Vec<u32> {
    let (left, rest) = split_first_subtree(&candidate);
    let left_h = left.iter().copied().max().unwrap_or(0);
    let rest_h = rest.iter().copied().max().unwrap_or(0);
    let mut valid = rest_h >= left_h;
    if valid
        && rest_h == left_h
        && (left.len() > rest.len() || (left.len() == rest.len() && left > rest))
    {
        valid = false;
    }
    if valid {
        return candidate;
    }
    let p = left.len();
    let mut next = next_rooted(&candidate, Some(p)).expect("p > 0");
    if candidate[p] > 2 {
        let (new_left, _) = split_first_subtree(&next);
        let h = new_left.iter().copied().max().unwrap_or(0) as usize;
        let len = next.len();
        for (k, slot) in next[len - (h + 1)..].iter_mut().enumerate() {
            *slot = k as u32 + 1;
        }
    }
    next
}

/// Number of free trees on `n` vertices (1 ≤ n ≤ 40), by Otter's
/// dissimilarity formula over the rooted-tree counts.
pub fn free_tree_count(n: usize) -> Result<u64> {
    if !(1..=40).contains(&n) {
        return Err(Error::NOutOfRange { n, lo: 1, hi: 40 });
    }
    let rooted = rooted_tree_counts(n);
    let mut pairs: u128 = (1..n).map(|i| rooted[i] * rooted[n - i]).sum();
    if n.is_multiple_of(2) {
        pairs -= rooted[n / 2];
    }
    Ok((rooted[n] - pairs / 2) as u64)
}

/// r[k] = number of rooted trees on k vertices, for k ≤ n (r[0] = 0).
fn rooted_tree_counts(n: usize) -> Vec<u128> {
    let mut r = vec![0u128; n + 1];
    if n >= 1 {
        r[1] = 1;
    }
    // s[j] = Σ_{d | j} d·r[d]
    let mut s = vec![0u128; n + 1];
    for k in 1..n {
        s[k] = (1..=k)
            .filter(|d| k % d == 0)
            .map(|d| d as u128 * r[d])
            .sum();
        let acc: u128 = (1..=k).map(|j| s[j] * r[k - j + 1]).sum();
        r[k + 1] = acc / k as u128;
    }
    r
}

pub fn path(n: usize) -> Result<Tree> {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Tree::with_order(n, &edges)
}

pub fn star(n: usize) -> Result<Tree> {
    let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
    Tree::with_order(n, &edges)
}

/// S_{x,y}: adjacent centers 0 and 1 of degrees x+1 and y+1, all other
/// vertices pendant.
pub fn double_star(x: usize, y: usize) -> Result<Tree> {
    if x < 1 || y < 1 {
        return Err(Error::InvalidArms(x, y));
    }
    let mut edges = vec![(0, 1)];
    edges.extend((0..x).map(|k| (0, 2 + k)));
    edges.extend((0..y).map(|k| (1, 2 + x + k)));
    Tree::with_order(x + y + 2, &edges)
}

/// Center 0 with `pendants_on_center` leaves and one arm per entry of
/// `arm_pendants`; arm vertex i carries `arm_pendants[i]` leaves.
pub fn fig3_tree(pendants_on_center: usize, arm_pendants: &[usize]) -> Result<Tree> {
    if arm_pendants.is_empty() {
        return Err(Error::InvalidShape("at least one arm is required".into()));
    }
    if let Some(i) = arm_pendants.iter().position(|&d| d == 0) {
        return Err(Error::InvalidShape(format!("arm {i} carries no pendants")));
    }
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut next = 1;
    for &d in arm_pendants {
        let arm = next;
        edges.push((0, arm));
        edges.extend((1..=d).map(|k| (arm, arm + k)));
        next += d + 1;
    }
    edges.extend((0..pendants_on_center).map(|k| (0, next + k)));
    Tree::with_order(next + pendants_on_center, &edges)
}
