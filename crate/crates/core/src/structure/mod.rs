//! Structural parameters of an instance graph and the decompositions the
//! solvers consume.

mod nice;
mod treedec;
mod treedepth;

pub use nice::{make_nice, NiceNode, NiceTreeDecomposition, NodeKind};
pub use treedec::{
    decomposition_from_order, elimination_order, exact_elimination_order, graph_tree_decomposition, order_width,
    tree_decomposition, Heuristic, TreeDecomposition, EXACT_TW_LIMIT,
};
pub use treedepth::{
    elimination_forest_depth, is_elimination_forest, treedepth_exact, treedepth_exact_small, treedepth_upper,
    TreedepthResult, EXACT_TD_LIMIT,
};

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::model::{Instance, Side};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("vertex {0:?} is isolated; remove isolated vertices first")]
    IsolatedVertex(String),
    #[error("graph has {n} vertices, exact mode supports at most {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("malformed .td input at line {line}: {msg}")]
    Pace { line: usize, msg: String },
}

/// Indices (into `inst.edges()`) of the edges outside a spanning forest
/// grown in edge order. Its size is `m - n + #components`, the minimum.
pub fn feedback_edge_indices(inst: &Instance) -> Vec<usize> {
    let mut dsu = Dsu::new(inst.num_vertices());
    inst.edges()
        .iter()
        .enumerate()
        .filter_map(|(i, &(u, v))| (!dsu.union(u, inst.global_v(v))).then_some(i))
        .collect()
}

/// A minimum feedback edge set as `(u, v)` pairs.
pub fn feedback_edge_set(inst: &Instance) -> Vec<(usize, usize)> {
    feedback_edge_indices(inst)
        .into_iter()
        .map(|i| inst.edges()[i])
        .collect()
}

/// `(max degree over U, max degree over V)`, zero for an empty side.
pub fn degree_stats(inst: &Instance) -> (usize, usize) {
    let du = (0..inst.num_u()).map(|u| inst.u_neighbors(u).len()).max().unwrap_or(0);
    let dv = (0..inst.num_v()).map(|v| inst.v_neighbors(v).len()).max().unwrap_or(0);
    (du, dv)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwinClass {
    pub side: Side,
    /// Side-local indices, ascending.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwinPartition {
    pub classes: Vec<TwinClass>,
}

impl TwinPartition {
    pub fn nd(&self) -> usize {
        self.classes.len()
    }

    pub fn v_classes(&self) -> impl Iterator<Item = &TwinClass> {
        self.classes.iter().filter(|c| c.side == Side::V)
    }

    pub fn u_classes(&self) -> impl Iterator<Item = &TwinClass> {
        self.classes.iter().filter(|c| c.side == Side::U)
    }
}

/// Groups vertices with identical neighborhoods. `U` classes come first,
/// each side ordered by smallest member.
pub fn twin_partition(inst: &Instance) -> Result<TwinPartition, StructureError> {
    let mut classes = Vec::new();
    for side in [Side::U, Side::V] {
        let count = match side {
            Side::U => inst.num_u(),
            Side::V => inst.num_v(),
        };
        let mut by_nbhd: HashMap<&[usize], usize> = HashMap::new();
        let first = classes.len();
        for x in 0..count {
            let nbhd = match side {
                Side::U => inst.u_neighbors(x),
                Side::V => inst.v_neighbors(x),
            };
            if nbhd.is_empty() {
                let id = match side {
                    Side::U => inst.u_id(x),
                    Side::V => inst.v_id(x),
                };
                return Err(StructureError::IsolatedVertex(id.to_string()));
            }
            let next = classes.len() - first;
            let slot = *by_nbhd.entry(nbhd).or_insert(next);
            if slot == next {
                classes.push(TwinClass {
                    side,
                    members: Vec::new(),
                });
            }
            classes[first + slot].members.push(x);
        }
    }
    Ok(TwinPartition { classes })
}

/// Neighborhood diversity of an arbitrary graph: vertices `a`, `b` share a
/// type when `N(a) \ {b} = N(b) \ {a}`. Isolated vertices form one type.
pub fn neighborhood_diversity(g: &Graph) -> usize {
    let n = g.n();
    let mut dsu = Dsu::new(n);
    let mut by_open: HashMap<&[usize], usize> = HashMap::new();
    for v in 0..n {
        let rep = *by_open.entry(g.neighbors(v)).or_insert(v);
        dsu.union(rep, v);
    }
    // closed twins are adjacent with equal closed neighborhoods
    for (a, b) in g.edges() {
        if g.degree(a) == g.degree(b) {
            let na = g.neighbors(a).iter().filter(|&&x| x != b);
            let nb = g.neighbors(b).iter().filter(|&&x| x != a);
            if na.eq(nb) {
                dsu.union(a, b);
            }
        }
    }
    (0..n).filter(|&v| dsu.find(v) == v).count()
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
