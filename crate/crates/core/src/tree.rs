//! Immutable unlabeled-up-to-isomorphism trees.
//!
//! A [`Tree`] keeps the labeled adjacency it was built from (so moves can name
//! vertices) together with its canonical level sequence, which identifies the
//! isomorphism class. The canonical form is the lexicographically maximal
//! preorder depth sequence of the tree rooted at a centroid; when the tree
//! has two centroids the larger of the two rootings is taken.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

pub type Vertex = usize;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    adj: Vec<Vec<Vertex>>,
    levels: Vec<u32>,
    key: String,
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tree")
            .field("n", &self.n())
            .field("edges", &self.edges())
            .field("key", &self.key)
            .finish()
    }
}

impl Tree {
    /// Builds and validates a tree from an edge list over vertex ids `0..n`.
    ///
    /// `n` is one more than the largest id mentioned; an empty list is the
    /// single-vertex tree.
    pub fn from_edges(edges: &[(Vertex, Vertex)]) -> Result<Tree> {
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
        Self::with_order(n, edges)
    }

    /// Like [`Tree::from_edges`] but with an explicit vertex count.
    pub fn with_order(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Tree> {
        if n == 0 {
            return Err(Error::NotATree("a tree needs at least one vertex".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if u >= n || v >= n {
                return Err(Error::NotATree(format!(
                    "vertex id out of range in edge {u}-{v}"
                )));
            }
            if adj[u].contains(&v) {
                return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        if edges.len() != n - 1 {
            return Err(Error::NotATree(format!(
                "{} edges on {} vertices (expected {})",
                edges.len(),
                n,
                n - 1
            )));
        }
        for nb in adj.iter_mut() {
            nb.sort_unstable();
        }
        if bfs_order(&adj, 0).len() != n {
            return Err(Error::NotATree("graph is disconnected".into()));
        }
        Ok(Self::from_valid_adjacency(adj))
    }

    /// Builds a tree from a preorder depth sequence (root at depth 0).
    /// Vertex `i` of the result is the `i`-th entry of the sequence.
    pub fn from_level_sequence(levels: &[u32]) -> Result<Tree> {
        let parents = parents_from_levels(levels)?;
        let n = levels.len();
        let mut adj = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate().skip(1) {
            adj[*p].push(v);
            adj[v].push(*p);
        }
        for nb in adj.iter_mut() {
            nb.sort_unstable();
        }
        Ok(Self::from_valid_adjacency(adj))
    }

    /// Decodes a Prüfer sequence over labels `0..len+2`.
    pub fn from_prufer(seq: &[Vertex]) -> Result<Tree> {
        let n = seq.len() + 2;
        if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
            return Err(Error::Parse(format!(
                "Prüfer label {bad} out of range for n = {n}"
            )));
        }
        let mut degree = vec![1usize; n];
        for &x in seq {
            degree[x] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        // Linear-time decode: `ptr` scans for the smallest leaf, `leaf` follows
        // newly created leaves smaller than `ptr`.
        let mut ptr = 0;
        while degree[ptr] != 1 {
            ptr += 1;
        }
        let mut leaf = ptr;
        for &x in seq {
            edges.push((leaf, x));
            degree[leaf] = 0;
            degree[x] -= 1;
            if degree[x] == 1 && x < ptr {
                leaf = x;
            } else {
                ptr += 1;
                while degree[ptr] != 1 {
                    ptr += 1;
                }
                leaf = ptr;
            }
        }
        edges.push((leaf, n - 1));
        Self::with_order(n, &edges)
    }

    fn from_valid_adjacency(adj: Vec<Vec<Vertex>>) -> Tree {
        let levels = canonical_levels(&adj);
        let key = levels_to_string(&levels);
        Tree { adj, levels, key }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_pendant(&self, v: Vertex) -> bool {
        self.adj[v].len() == 1
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.n().saturating_sub(1));
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Canonical level sequence, space separated. Equal iff isomorphic.
    pub fn canonical_key(&self) -> &str {
        &self.key
    }

    pub fn level_sequence(&self) -> &[u32] {
        &self.levels
    }

    pub fn is_isomorphic(&self, other: &Tree) -> bool {
        self.levels == other.levels
    }

    /// The same tree relabeled so that vertex ids follow the canonical preorder.
    pub fn canonical_relabel(&self) -> Tree {
        Tree::from_level_sequence(&self.levels).expect("canonical levels are valid")
    }

    /// Breadth-first distances from `src`.
    pub fn distances_from(&self, src: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Prüfer sequence of the labeled tree (empty for n ≤ 2).
    pub fn to_prufer(&self) -> Vec<Vertex> {
        let n = self.n();
        if n <= 2 {
            return Vec::new();
        }
        let mut degree = self.degrees();
        let mut removed = vec![false; n];
        let mut out = Vec::with_capacity(n - 2);
        let mut ptr = 0;
        while degree[ptr] != 1 {
            ptr += 1;
        }
        let mut leaf = ptr;
        for _ in 0..n - 2 {
            removed[leaf] = true;
            let next = *self.adj[leaf]
                .iter()
                .find(|&&x| !removed[x])
                .expect("leaf has a live neighbor");
            out.push(next);
            degree[next] -= 1;
            if degree[next] == 1 && next < ptr {
                leaf = next;
            } else {
                ptr += 1;
                while degree[ptr] != 1 || removed[ptr] {
                    ptr += 1;
                }
                leaf = ptr;
            }
        }
        out
    }

    /// Returns a new tree on the same vertex set with the given edge rewiring.
    pub(crate) fn rewired(
        &self,
        remove: &[(Vertex, Vertex)],
        add: &[(Vertex, Vertex)],
    ) -> Result<Tree> {
        let mut edges = self.edges();
        for &(u, v) in remove {
            let e = (u.min(v), u.max(v));
            let pos = edges
                .iter()
                .position(|&x| x == e)
                .ok_or_else(|| Error::PreconditionViolated(format!("edge {u}-{v} not present")))?;
            edges.swap_remove(pos);
        }
        edges.extend_from_slice(add);
        Tree::with_order(self.n(), &edges)
    }
}

pub(crate) fn levels_to_string(levels: &[u32]) -> String {
    let mut s = String::with_capacity(levels.len() * 3);
    for (i, l) in levels.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&l.to_string());
    }
    s
}

/// Parent array of a preorder depth sequence; entry 0 is unused.
pub(crate) fn parents_from_levels(levels: &[u32]) -> Result<Vec<Vertex>> {
    if levels.first() != Some(&0) {
        return Err(Error::Parse(
            "level sequence must start with depth 0".into(),
        ));
    }
    let mut parents = vec![0; levels.len()];
    let mut stack: Vec<Vertex> = vec![0];
    for i in 1..levels.len() {
        let d = levels[i] as usize;
        if d == 0 || d > stack.len() {
            return Err(Error::Parse(format!(
                "invalid depth {} at position {i} of level sequence",
                levels[i]
            )));
        }
        stack.truncate(d);
        parents[i] = stack[d - 1];
        stack.push(i);
    }
    Ok(parents)
}

fn bfs_order(adj: &[Vec<Vertex>], root: Vertex) -> Vec<Vertex> {
    let mut seen = vec![false; adj.len()];
    seen[root] = true;
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                order.push(v);
            }
        }
    }
    order
}

/// One or two centroids, ascending.
pub(crate) fn centroids(adj: &[Vec<Vertex>]) -> Vec<Vertex> {
    let n = adj.len();
    let order = bfs_order(adj, 0);
    let mut parent = vec![usize::MAX; n];
    for &u in &order {
        for &v in &adj[u] {
            if v != parent[u] {
                parent[v] = u;
            }
        }
    }
    let mut size = vec![1usize; n];
    let mut heaviest = vec![0usize; n];
    for &u in order.iter().rev() {
        let p = parent[u];
        if p != usize::MAX {
            size[p] += size[u];
            heaviest[p] = heaviest[p].max(size[u]);
        }
    }
    let worst: Vec<usize> = (0..n).map(|v| heaviest[v].max(n - size[v])).collect();
    let best = *worst.iter().min().expect("nonempty tree");
    (0..n).filter(|&v| worst[v] == best).collect()
}

fn rooted_levels(adj: &[Vec<Vertex>], root: Vertex) -> Vec<u32> {
    let order = bfs_order(adj, root);
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    for &u in &order {
        for &v in &adj[u] {
            if v != parent[u] {
                parent[v] = u;
            }
        }
    }
    let mut codes: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &u in order.iter().rev() {
        let mut kids: Vec<Vec<u32>> = adj[u]
            .iter()
            .filter(|&&v| v != parent[u])
            .map(|&v| std::mem::take(&mut codes[v]))
            .collect();
        kids.sort_unstable_by(|a, b| b.cmp(a));
        let mut code = Vec::with_capacity(1 + kids.iter().map(Vec::len).sum::<usize>());
        code.push(0);
        for kid in kids {
            code.extend(kid.into_iter().map(|d| d + 1));
        }
        codes[u] = code;
    }
    std::mem::take(&mut codes[root])
}

fn canonical_levels(adj: &[Vec<Vertex>]) -> Vec<u32> {
    centroids(adj)
        .into_iter()
        .map(|c| rooted_levels(adj, c))
        .max()
        .expect("at least one centroid")
}
