//! Generalized Kneser graphs K(b,r,s): every r-subset of a b-set is a
//! vertex, and two vertices are adjacent when they share at most s-1
//! elements.

use std::fmt::Write as _;

use itertools::Itertools;
use num_integer::binomial;
use serde::Serialize;
use thiserror::Error;

use crate::model::{Bundle, Instance, Table, Valuation, TABLE_MAX_GOODS};

/// Construction budget on the number of vertices.
pub const MAX_VERTICES: usize = 10_000;
/// Exact colouring budget.
pub const EXACT_MAX_VERTICES: usize = 70;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KneserError {
    #[error("need b >= r >= s >= 1, got b={b}, r={r}, s={s}")]
    Parameters { b: usize, r: usize, s: usize },
    #[error("graph has {vertices} vertices; the limit is {limit}")]
    TooLarge { vertices: u128, limit: usize },
    #[error("colouring is not proper: {0}")]
    Improper(String),
    #[error("the tightness construction needs K(2t,t,2) with 2t <= {TABLE_MAX_GOODS}, got K({b},{r},{s})")]
    NotTightnessShape { b: usize, r: usize, s: usize },
    #[error("split {n1}+{n2} does not match {colors} colours")]
    Split { n1: usize, n2: usize, colors: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneserGraph {
    b: usize,
    r: usize,
    s: usize,
    vertices: Vec<Bundle>,
    adjacency: Vec<Vec<usize>>,
}

impl KneserGraph {
    pub fn new(b: usize, r: usize, s: usize) -> Result<Self, KneserError> {
        if !(b >= r && r >= s && s >= 1) || b > 64 {
            return Err(KneserError::Parameters { b, r, s });
        }
        let count = binomial(b as u128, r as u128);
        if count > MAX_VERTICES as u128 {
            return Err(KneserError::TooLarge { vertices: count, limit: MAX_VERTICES });
        }
        let vertices: Vec<Bundle> = (0..b).combinations(r).map(|c| c.into_iter().collect()).collect();
        let adjacency = vertices
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, &v)| i != j && (u & v).len() < s)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        Ok(KneserGraph { b, r, s, vertices, adjacency })
    }

    pub fn params(&self) -> (usize, usize, usize) {
        (self.b, self.r, self.s)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertices as r-subsets, in lexicographic order.
    pub fn vertices(&self) -> &[Bundle] {
        &self.vertices
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn index_of(&self, vertex: Bundle) -> Option<usize> {
        self.vertices.iter().position(|&v| v == vertex)
    }

    /// DIMACS `edge` format, vertices numbered from 1.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("c generalized Kneser graph K({},{},{})\n", self.b, self.r, self.s);
        let _ = writeln!(out, "p edge {} {}", self.num_vertices(), self.num_edges());
        for (u, ns) in self.adjacency.iter().enumerate() {
            for &v in ns.iter().filter(|&&v| v > u) {
                let _ = writeln!(out, "e {} {}", u + 1, v + 1);
            }
        }
        out
    }
}

pub fn build_kneser(b: usize, r: usize, s: usize) -> Result<KneserGraph, KneserError> {
    KneserGraph::new(b, r, s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    /// Checks that the colouring is proper and uses every colour.
    pub fn new(g: &KneserGraph, colors: Vec<usize>) -> Result<Self, KneserError> {
        if colors.len() != g.num_vertices() {
            return Err(KneserError::Improper(format!("{} colours for {} vertices", colors.len(), g.num_vertices())));
        }
        let num_colors = colors.iter().max().map_or(0, |&c| c + 1);
        let mut used = vec![false; num_colors];
        for (u, &c) in colors.iter().enumerate() {
            used[c] = true;
            if let Some(&v) = g.neighbors(u).iter().find(|&&v| colors[v] == c) {
                return Err(KneserError::Improper(format!("vertices {u} and {v} share colour {c}")));
            }
        }
        if let Some(c) = used.iter().position(|&x| !x) {
            return Err(KneserError::Improper(format!("colour {c} is unused")));
        }
        Ok(Coloring { colors, num_colors })
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn class(&self, color: usize) -> impl Iterator<Item = usize> + '_ {
        self.colors.iter().enumerate().filter(move |&(_, &c)| c == color).map(|(v, _)| v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiMode {
    Exact,
    Bounds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChromaticBounds {
    pub lower: usize,
    pub upper: usize,
    /// Witness for `upper`.
    pub coloring: Option<Coloring>,
}

/// Greedy clique: for each start vertex, repeatedly add the lowest-index
/// vertex adjacent to everything chosen so far; keep the largest.
pub fn greedy_clique(g: &KneserGraph) -> Vec<usize> {
    let mut best = Vec::new();
    for start in 0..g.num_vertices() {
        let mut clique = vec![start];
        for &v in g.neighbors(start) {
            if clique.iter().all(|&u| g.is_adjacent(u, v)) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Welsh-Powell: vertices by decreasing degree (lower index first on ties),
/// each given the smallest colour free among its neighbours.
pub fn greedy_coloring(g: &KneserGraph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.neighbors(v).len()));
    let mut colors = vec![usize::MAX; n];
    for v in order {
        let taken: Vec<usize> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
        colors[v] = (0..).find(|c| !taken.contains(c)).expect("unbounded range");
    }
    colors
}

struct Dsatur<'a> {
    adj: Vec<u128>,
    colors: Vec<Option<usize>>,
    best: Option<Vec<usize>>,
    best_count: usize,
    lower: usize,
    g: &'a KneserGraph,
}

impl Dsatur<'_> {
    fn neighbor_colors(&self, v: usize) -> u128 {
        self.g.neighbors(v).iter().filter_map(|&u| self.colors[u]).fold(0, |acc, c| acc | 1 << c)
    }

    fn pick(&self, uncolored: u128) -> usize {
        let mut best = (0, 0, usize::MAX);
        let mut rest = uncolored;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let key = (self.neighbor_colors(v).count_ones(), (self.adj[v] & uncolored).count_ones(), v);
            if best.2 == usize::MAX || key.0 > best.0 || (key.0 == best.0 && key.1 > best.1) {
                best = key;
            }
        }
        best.2
    }

    fn search(&mut self, uncolored: u128, used: usize) {
        if self.best_count <= self.lower {
            return;
        }
        if uncolored == 0 {
            self.best_count = used;
            self.best = Some(self.colors.iter().map(|c| c.expect("all coloured")).collect());
            return;
        }
        let v = self.pick(uncolored);
        let forbidden = self.neighbor_colors(v);
        let limit = (used + 1).min(self.best_count - 1);
        for c in 0..limit {
            if forbidden & (1 << c) != 0 {
                continue;
            }
            self.colors[v] = Some(c);
            self.search(uncolored & !(1 << v), used.max(c + 1));
            self.colors[v] = None;
            if self.best_count <= self.lower {
                return;
            }
        }
    }
}

/// Exact chromatic number by DSATUR branch and bound, or clique / greedy
/// bounds.
pub fn chromatic_number(g: &KneserGraph, mode: ChiMode) -> Result<ChromaticBounds, KneserError> {
    let n = g.num_vertices();
    let lower = greedy_clique(g).len();
    let greedy = greedy_coloring(g);
    let upper = greedy.iter().max().map_or(0, |&c| c + 1);
    match mode {
        ChiMode::Bounds => Ok(ChromaticBounds { lower, upper, coloring: Some(Coloring::new(g, greedy)?) }),
        ChiMode::Exact => {
            if n > EXACT_MAX_VERTICES {
                return Err(KneserError::TooLarge { vertices: n as u128, limit: EXACT_MAX_VERTICES });
            }
            let adj: Vec<u128> = (0..n).map(|v| g.neighbors(v).iter().fold(0u128, |acc, &u| acc | 1 << u)).collect();
            let mut search = Dsatur {
                adj,
                colors: vec![None; n],
                best: Some(greedy),
                best_count: upper,
                lower,
                g,
            };
            let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
            search.search(all, 0);
            let colors = search.best.take().expect("greedy seed");
            let coloring = Coloring::new(g, colors)?;
            let chi = coloring.num_colors();
            Ok(ChromaticBounds { lower: chi, upper: chi, coloring: Some(coloring) })
        }
    }
}

/// One agent per colour on 2t goods: the agent is worth 0 on every subset of
/// her group's bundle in an allocation of her colour and 1 elsewhere, so she
/// rejects exactly the balanced allocations of her colour. Vertices are read
/// as group 0's bundle; agents of colours `0..n1` form group 0.
pub fn tightness_instance(
    g: &KneserGraph,
    coloring: &Coloring,
    (n1, n2): (usize, usize),
) -> Result<Instance<u64>, KneserError> {
    let (b, r, s) = g.params();
    if b != 2 * r || s != 2 || b > TABLE_MAX_GOODS {
        return Err(KneserError::NotTightnessShape { b, r, s });
    }
    let coloring = Coloring::new(g, coloring.colors().to_vec())?;
    let colors = coloring.num_colors();
    if n1 + n2 != colors {
        return Err(KneserError::Split { n1, n2, colors });
    }
    let all = Bundle::full(b);
    let valuations = (0..colors)
        .map(|c| {
            let rejected: Vec<Bundle> = coloring
                .class(c)
                .map(|v| if c < n1 { g.vertices()[v] } else { all - g.vertices()[v] })
                .collect();
            let table = Table::from_fn(b, |bundle| u64::from(!rejected.iter().any(|&x| bundle.is_subset_of(x))))
                .expect("size checked");
            Valuation::Table(table)
        })
        .collect();
    Ok(Instance::fixed(b, valuations, vec![(0..n1).collect(), (n1..colors).collect()]))
}
