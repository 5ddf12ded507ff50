//! Exhaustive enumeration of small labelled graphs: class membership,
//! maximal independent sets, maximal matchings, and the marked triples that
//! the pointed series `C_i` and block functions `B_i` count.
//!
//! Vertex types of a marked vertex `v`, per structure:
//!
//! | level      | MIS type 0 / 1 / 2                                  | matching type 0 / 1 / 2                                  |
//! |------------|-----------------------------------------------------|----------------------------------------------------------|
//! | connected  | `v` in `I` / dominated / sole undominated vertex     | `v` unmatched / matched / unmatched, covered from outside |
//! | 2-connected| in `I` / dominated / undominated (any independent `I`) | in `S` / matched / neither (`S` independent, uncovered) |
//!
//! At connected level type 0 and 1 need a maximal structure. Type 2 relaxes
//! maximality at `v` alone: for MIS `v` is the only undominated vertex, for
//! matchings every uncovered edge touches `v`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{Family, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle limit exceeded: n = {n} but {family} allows at most {limit}")]
    TooLarge { family: Family, n: usize, limit: usize },
}

/// Largest `n` the census accepts for a family.
pub fn size_limit(family: Family) -> usize {
    match family {
        Family::Forest => 8,
        _ => 7,
    }
}

/// Vertex pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// A simple graph on `0..n`; bit `k` of `edges` is the `k`-th pair of [`pairs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    pub n: usize,
    pub edges: u32,
}

impl LabeledGraph {
    pub fn new(n: usize, edges: u32) -> Self {
        assert!(n <= 8, "at most 8 vertices");
        LabeledGraph { n, edges }
    }

    pub fn from_edges(n: usize, list: &[(usize, usize)]) -> Self {
        let all = pairs(n);
        let mut edges = 0;
        for &(a, b) in list {
            let key = (a.min(b), a.max(b));
            let k = all.iter().position(|&p| p == key).expect("vertex out of range");
            edges |= 1 << k;
        }
        LabeledGraph::new(n, edges)
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        pairs(self.n).into_iter().enumerate().filter(|(k, _)| self.edges >> k & 1 == 1).map(|(_, p)| p).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.count_ones() as usize
    }

    /// Neighbourhood bitmasks.
    pub fn adjacency(&self) -> [u8; 8] {
        let mut adj = [0u8; 8];
        for (a, b) in self.edge_list() {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }
}

fn full(n: usize) -> u8 {
    ((1u16 << n) - 1) as u8
}

/// Vertices reachable from `start` inside `within`.
fn component(adj: &[u8; 8], start: usize, within: u8) -> u8 {
    let mut seen = 1u8 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & within & !seen;
        seen |= new;
        frontier |= new;
    }
    seen
}

fn connected_within(adj: &[u8; 8], within: u8) -> bool {
    within == 0 || component(adj, within.trailing_zeros() as usize, within) == within
}

pub fn is_connected(g: &LabeledGraph) -> bool {
    connected_within(&g.adjacency(), full(g.n))
}

/// A single edge, or at least three vertices and no cut vertex.
pub fn is_two_connected(g: &LabeledGraph) -> bool {
    let adj = g.adjacency();
    match g.n {
        0 | 1 => false,
        2 => g.edges == 1,
        n => {
            connected_within(&adj, full(n))
                && (0..n).all(|v| connected_within(&adj, full(n) & !(1 << v)))
        }
    }
}

fn acyclic(g: &LabeledGraph) -> bool {
    if g.edge_count() >= g.n.max(1) {
        return false;
    }
    let mut parent: Vec<usize> = (0..g.n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for (a, b) in g.edge_list() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// Biconnected components as `(vertex mask, edge count)`.
pub fn blocks(g: &LabeledGraph) -> Vec<(u8, usize)> {
    struct Dfs<'a> {
        adj: &'a [u8; 8],
        disc: [u32; 8],
        low: [u32; 8],
        time: u32,
        stack: Vec<(usize, usize)>,
        out: Vec<(u8, usize)>,
    }
    impl Dfs<'_> {
        fn visit(&mut self, v: usize, parent: Option<usize>) {
            self.time += 1;
            self.disc[v] = self.time;
            self.low[v] = self.time;
            let mut nbrs = self.adj[v];
            while nbrs != 0 {
                let w = nbrs.trailing_zeros() as usize;
                nbrs &= nbrs - 1;
                if self.disc[w] == 0 {
                    self.stack.push((v, w));
                    self.visit(w, Some(v));
                    self.low[v] = self.low[v].min(self.low[w]);
                    if self.low[w] >= self.disc[v] {
                        let (mut mask, mut count) = (0u8, 0);
                        while let Some((a, b)) = self.stack.pop() {
                            mask |= 1 << a | 1 << b;
                            count += 1;
                            if (a, b) == (v, w) {
                                break;
                            }
                        }
                        self.out.push((mask, count));
                    }
                } else if Some(w) != parent && self.disc[w] < self.disc[v] {
                    self.stack.push((v, w));
                    self.low[v] = self.low[v].min(self.disc[w]);
                }
            }
        }
    }
    let adj = g.adjacency();
    let mut dfs = Dfs { adj: &adj, disc: [0; 8], low: [0; 8], time: 0, stack: Vec::new(), out: Vec::new() };
    for v in 0..g.n {
        if dfs.disc[v] == 0 {
            dfs.visit(v, None);
        }
    }
    dfs.out
}

/// Treewidth at most two: strip vertices of degree at most one and suppress
/// degree-two vertices (merging parallel edges) until nothing is left.
fn series_parallel(g: &LabeledGraph) -> bool {
    let mut adj = g.adjacency();
    let mut alive = full(g.n);
    'outer: while alive != 0 {
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nb = adj[v];
            if nb.count_ones() <= 2 {
                alive &= !(1 << v);
                for row in adj.iter_mut() {
                    *row &= !(1 << v);
                }
                adj[v] = 0;
                if nb.count_ones() == 2 {
                    let a = nb.trailing_zeros() as usize;
                    let b = 7 - nb.leading_zeros() as usize;
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn member(family: Family, g: &LabeledGraph) -> bool {
    match family {
        Family::Forest => acyclic(g),
        Family::Cactus => blocks(g).iter().all(|&(mask, e)| e == 1 || e == mask.count_ones() as usize),
        Family::SeriesParallel => series_parallel(g),
    }
}

fn independent(adj: &[u8; 8], set: u8) -> bool {
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if adj[v] & set != 0 {
            return false;
        }
    }
    true
}

fn neighbourhood(adj: &[u8; 8], set: u8) -> u8 {
    let mut rest = set;
    let mut out = 0;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= adj[v];
    }
    out
}

/// Maximal independent sets of `g` by size.
pub fn maximal_is_census(g: &LabeledGraph) -> Vec<u64> {
    let adj = g.adjacency();
    let all = full(g.n);
    let mut out = vec![0; g.n + 1];
    for set in 0..=all {
        if independent(&adj, set) && (set | neighbourhood(&adj, set)) == all {
            out[set.count_ones() as usize] += 1;
        }
    }
    out
}

/// Every matching of `g`, as `(edge count, covered vertices)`.
fn matchings(g: &LabeledGraph) -> Vec<(usize, u8)> {
    fn go(edges: &[(usize, usize)], k: usize, size: usize, covered: u8, out: &mut Vec<(usize, u8)>) {
        if k == edges.len() {
            out.push((size, covered));
            return;
        }
        go(edges, k + 1, size, covered, out);
        let (a, b) = edges[k];
        let m = 1 << a | 1 << b;
        if covered & m == 0 {
            go(edges, k + 1, size + 1, covered | m, out);
        }
    }
    let mut out = Vec::new();
    go(&g.edge_list(), 0, 0, 0, &mut out);
    out
}

/// Edges with no endpoint in `covered`.
fn uncovered_edges(g: &LabeledGraph, covered: u8) -> Vec<(usize, usize)> {
    g.edge_list().into_iter().filter(|&(a, b)| covered & (1 << a | 1 << b) == 0).collect()
}

/// Maximal matchings of `g` by number of edges.
pub fn maximal_matching_census(g: &LabeledGraph) -> Vec<u64> {
    let mut out = vec![0; g.n / 2 + 1];
    for (size, covered) in matchings(g) {
        if uncovered_edges(g, covered).is_empty() {
            out[size] += 1;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    All,
    Connected,
    TwoConnected,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::All => "all",
            Level::Connected => "connected",
            Level::TwoConnected => "two-connected",
        })
    }
}

/// Census of one family, structure, level and vertex count.
///
/// At the all-graph and connected levels `total` and `sizes` count maximal
/// structures. At 2-connected level they count decorated blocks: independent
/// sets for MIS, and matchings with an independent set `S` of uncovered
/// vertices for matchings. `triples` is zero at the all-graph level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub family: Family,
    pub structure: Structure,
    pub level: Level,
    pub n: usize,
    pub graphs: u64,
    pub total: u64,
    pub sizes: Vec<u64>,
    pub triples: [u64; 3],
}

#[derive(Clone, Debug)]
struct Tally {
    graphs: u64,
    sizes: Vec<u64>,
    triples: [u64; 3],
}

impl Tally {
    fn new(len: usize) -> Self {
        Tally { graphs: 0, sizes: vec![0; len], triples: [0; 3] }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.graphs += other.graphs;
        for (a, b) in self.sizes.iter_mut().zip(other.sizes) {
            *a += b;
        }
        for i in 0..3 {
            self.triples[i] += other.triples[i];
        }
        self
    }
}

fn mis_tally(g: &LabeledGraph, level: Level, t: &mut Tally) {
    let adj = g.adjacency();
    let all = full(g.n);
    for set in 0..=all {
        if !independent(&adj, set) {
            continue;
        }
        let dominated = neighbourhood(&adj, set) & !set;
        let undominated = all & !set & !dominated;
        let k = set.count_ones() as u64;
        match level {
            Level::All | Level::Connected => {
                if undominated == 0 {
                    t.sizes[k as usize] += 1;
                    t.triples[0] += k;
                    t.triples[1] += g.n as u64 - k;
                } else if undominated.count_ones() == 1 {
                    t.triples[2] += 1;
                }
            }
            Level::TwoConnected => {
                t.sizes[k as usize] += 1;
                t.triples[0] += k;
                t.triples[1] += dominated.count_ones() as u64;
                t.triples[2] += undominated.count_ones() as u64;
            }
        }
    }
}

fn matching_tally(g: &LabeledGraph, level: Level, t: &mut Tally) {
    let adj = g.adjacency();
    let all = full(g.n);
    for (size, covered) in matchings(g) {
        let free = all & !covered;
        let matched = covered.count_ones() as u64;
        match level {
            Level::All | Level::Connected => {
                let loose = uncovered_edges(g, covered);
                if loose.is_empty() {
                    t.sizes[size] += 1;
                    t.triples[0] += free.count_ones() as u64;
                    t.triples[1] += matched;
                    t.triples[2] += free.count_ones() as u64;
                } else {
                    // uncovered vertices touching every loose edge
                    let hit = (0..g.n)
                        .filter(|&v| free >> v & 1 == 1)
                        .filter(|&v| loose.iter().all(|&(a, b)| a == v || b == v))
                        .count();
                    t.triples[2] += hit as u64;
                }
            }
            Level::TwoConnected => {
                let mut s = free;
                loop {
                    if independent(&adj, s) {
                        let k = s.count_ones() as u64;
                        t.sizes[size] += 1;
                        t.triples[0] += k;
                        t.triples[1] += matched;
                        t.triples[2] += free.count_ones() as u64 - k;
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & free;
                }
            }
        }
    }
}

fn level_member(level: Level, g: &LabeledGraph) -> bool {
    match level {
        Level::All => true,
        Level::Connected => is_connected(g),
        Level::TwoConnected => is_two_connected(g),
    }
}

/// Enumerate all `2^{n(n-1)/2}` labelled graphs on `n` vertices.
pub fn class_census(family: Family, structure: Structure, n: usize, level: Level) -> Result<CountTable, OracleError> {
    let limit = size_limit(family);
    if n > limit {
        return Err(OracleError::TooLarge { family, n, limit });
    }
    let len = match structure {
        Structure::Mis => n + 1,
        Structure::Matching => n / 2 + 1,
    };
    let masks: u64 = 1 << pairs(n).len();
    let chunk = (masks / 256).max(1);
    let chunks = masks.div_ceil(chunk);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::new(len);
            for mask in c * chunk..((c + 1) * chunk).min(masks) {
                let g = LabeledGraph::new(n, mask as u32);
                if !level_member(level, &g) || !member(family, &g) {
                    continue;
                }
                t.graphs += 1;
                match structure {
                    Structure::Mis => mis_tally(&g, level, &mut t),
                    Structure::Matching => matching_tally(&g, level, &mut t),
                }
            }
            t
        })
        .reduce(|| Tally::new(len), Tally::merge);
    let triples = if level == Level::All { [0; 3] } else { tally.triples };
    Ok(CountTable {
        family,
        structure,
        level,
        n,
        graphs: tally.graphs,
        total: tally.sizes.iter().sum(),
        sizes: tally.sizes,
        triples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> LabeledGraph {
        LabeledGraph::from_edges(2, &[(0, 1)])
    }

    #[test]
    fn small_censuses() {
        assert_eq!(maximal_is_census(&edge()), vec![0, 2, 0]);
        assert_eq!(maximal_matching_census(&edge()), vec![0, 1]);
        let empty = LabeledGraph::new(4, 0);
        assert_eq!(maximal_is_census(&empty), vec![0, 0, 0, 0, 1]);
        assert_eq!(maximal_matching_census(&empty), vec![1, 0, 0]);
        let path = LabeledGraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(maximal_is_census(&path), vec![0, 1, 1, 0]);
        assert_eq!(maximal_matching_census(&path), vec![0, 2]);
    }

    #[test]
    fn membership() {
        let triangle = LabeledGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(member(Family::Cactus, &triangle));
        assert!(!member(Family::Forest, &triangle));
        let diamond = LabeledGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)]);
        assert!(!member(Family::Cactus, &diamond));
        assert!(member(Family::SeriesParallel, &diamond));
        let k4 = LabeledGraph::new(4, 0b111111);
        assert!(!member(Family::SeriesParallel, &k4));
        let bowtie = LabeledGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        assert!(member(Family::Cactus, &bowtie));
        assert!(!is_two_connected(&bowtie));
        assert!(is_two_connected(&triangle));
    }

    #[test]
    fn census_examples() {
        let c = class_census(Family::Forest, Structure::Mis, 2, Level::All).unwrap();
        assert_eq!(c.total, 3);
        let c = class_census(Family::Forest, Structure::Matching, 2, Level::All).unwrap();
        assert_eq!(c.total, 2);
        for f in Family::ALL {
            for s in Structure::ALL {
                assert_eq!(class_census(f, s, 1, Level::All).unwrap().total, 1);
            }
        }
        assert!(class_census(Family::Cactus, Structure::Mis, 8, Level::All).is_err());
    }
}
