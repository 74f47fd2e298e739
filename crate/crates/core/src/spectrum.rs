//! Edge-degree spectrum: how many edges join a degree-`i` vertex to a
//! degree-`j` vertex. Every vertex-degree-based index is a function of it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::Tree;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeSpectrum {
    entries: BTreeMap<(u32, u32), u64>,
}

impl EdgeSpectrum {
    /// Spectrum from a degree list and an edge list given as index pairs.
    pub fn from_degrees<I>(degrees: &[u32], edges: I) -> EdgeSpectrum
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut entries = BTreeMap::new();
        for (u, v) in edges {
            let (a, b) = (degrees[u], degrees[v]);
            *entries.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
        EdgeSpectrum { entries }
    }

    /// Pairs `(i, j)` with `i <= j` and their positive counts, ascending.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.entries.iter().map(|(&k, &c)| (k, c))
    }

    pub fn get(&self, i: u32, j: u32) -> u64 {
        self.entries
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0)
    }

    pub fn edge_count(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<((u32, u32), u64)> for EdgeSpectrum {
    fn from_iter<T: IntoIterator<Item = ((u32, u32), u64)>>(iter: T) -> Self {
        let mut entries = BTreeMap::new();
        for ((i, j), c) in iter {
            if c > 0 {
                *entries.entry((i.min(j), i.max(j))).or_insert(0) += c;
            }
        }
        EdgeSpectrum { entries }
    }
}

pub fn edge_spectrum(t: &Tree) -> Result<EdgeSpectrum> {
    if t.n() < 2 {
        return Err(Error::EmptyTree);
    }
    let degrees: Vec<u32> = t.degrees().into_iter().map(|d| d as u32).collect();
    Ok(EdgeSpectrum::from_degrees(&degrees, t.edges()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(pairs: &[((u32, u32), u64)]) -> EdgeSpectrum {
        pairs.iter().copied().collect()
    }

    #[test]
    fn path_and_star() {
        let p5 = Tree::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(
            edge_spectrum(&p5).unwrap(),
            spec(&[((1, 2), 2), ((2, 2), 2)])
        );
        let s6 = Tree::from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        assert_eq!(edge_spectrum(&s6).unwrap(), spec(&[((1, 5), 5)]));
    }

    #[test]
    fn double_star_2_3() {
        // centers 0 (two leaves) and 1 (three leaves)
        let t = Tree::from_edges(&[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (1, 6)]).unwrap();
        let s = edge_spectrum(&t).unwrap();
        assert_eq!(s, spec(&[((1, 3), 2), ((1, 4), 3), ((3, 4), 1)]));
        assert_eq!(s.edge_count(), 6);
        assert_eq!(s.get(4, 3), 1);
    }

    #[test]
    fn single_vertex_has_no_spectrum() {
        let k1 = Tree::from_edges(&[]).unwrap();
        assert_eq!(edge_spectrum(&k1), Err(Error::EmptyTree));
    }
}
