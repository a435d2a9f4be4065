//! Gadget reductions from Multicolored Clique and Unary Bin Packing, with
//! witness constructors and structural checks.
//!
//! Every generated vertex carries a structured id, and each reduction
//! records which gadget created which vertices.

pub mod mcc;
pub mod ubp;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::model::{ColorId, Instance, InstanceBuilder, Matching};

pub use mcc::{mcc_witness, reduce_mcc, reduce_mcc_with_provenance, MccInstance};
pub use ubp::{reduce_ubp, reduce_ubp_with_provenance, ubp_witness, UbpInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid clique instance: {0}")]
    InvalidMcc(String),
    #[error("invalid bin packing instance: {0}")]
    InvalidUbp(String),
    #[error("vertices {0:?} do not form a multicolored clique")]
    NotAClique(Vec<usize>),
    #[error("invalid packing: {0}")]
    InvalidPacking(String),
}

/// The vertices one gadget contributed, by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetRecord {
    pub kind: &'static str,
    pub name: String,
    pub u: Vec<String>,
    pub v: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: Instance,
    pub gadgets: Vec<GadgetRecord>,
}

impl Reduction {
    pub fn provenance_json(&self) -> serde_json::Value {
        serde_json::json!({ "gadgets": self.gadgets })
    }
}

/// Instance builder that files every new vertex under the open gadget.
struct GadgetBuilder {
    b: InstanceBuilder,
    gadgets: Vec<GadgetRecord>,
}

impl GadgetBuilder {
    fn new(num_colors: usize) -> Self {
        GadgetBuilder {
            b: InstanceBuilder::new(num_colors),
            gadgets: Vec::new(),
        }
    }

    fn open(&mut self, kind: &'static str, name: impl Into<String>) {
        self.gadgets.push(GadgetRecord {
            kind,
            name: name.into(),
            u: Vec::new(),
            v: Vec::new(),
        });
    }

    fn current(&mut self) -> &mut GadgetRecord {
        self.gadgets.last_mut().expect("a gadget is open")
    }

    fn u(&mut self, id: String, color: ColorId) -> usize {
        self.current().u.push(id.clone());
        self.b.add_u(id, color)
    }

    fn v(&mut self, id: String, l: usize) -> usize {
        self.current().v.push(id.clone());
        self.b.add_v(id, l)
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.b.add_edge(u, v);
    }

    /// Attaches `copies` vertices of every color absent from `N(v)`, each
    /// with a private pendant of threshold 1.
    fn missing_colors(&mut self, v: usize, copies: usize) {
        let present = self.b.v_neighbor_colors(v);
        let vid = self.b.v_id(v).to_string();
        self.open("missing_colors", format!("Hc[{vid}]"));
        for c in 0..self.b.num_colors() {
            if present.contains(&c) {
                continue;
            }
            for t in 1..=copies {
                let u = self.u(format!("Hc[{vid}].u[c={c},{t}]"), c);
                let p = self.v(format!("Hc[{vid}].v[c={c},{t}]"), 1);
                self.edge(u, v);
                self.edge(u, p);
            }
        }
    }

    fn finish(self) -> Reduction {
        Reduction {
            instance: self.b.build().expect("generated instances are valid"),
            gadgets: self.gadgets,
        }
    }
}

/// Partial assignment used by the witness constructors.
struct WitnessBuilder<'a> {
    inst: &'a Instance,
    assign: Vec<Option<usize>>,
}

impl<'a> WitnessBuilder<'a> {
    fn new(inst: &'a Instance) -> Self {
        WitnessBuilder {
            inst,
            assign: vec![None; inst.num_u()],
        }
    }

    fn u(&self, id: &str) -> usize {
        self.inst.u_by_id(id).unwrap_or_else(|| panic!("no left vertex {id}"))
    }

    fn v(&self, id: &str) -> usize {
        self.inst.v_by_id(id).unwrap_or_else(|| panic!("no right vertex {id}"))
    }

    fn pair(&mut self, u: &str, v: &str) {
        let (u, v) = (self.u(u), self.v(v));
        debug_assert!(self.inst.has_edge(u, v));
        self.assign[u] = Some(v);
    }

    /// Matches every neighbor of `v` to it.
    fn take_all(&mut self, v: &str) {
        let v = self.v(v);
        for &u in self.inst.v_neighbors(v) {
            self.assign[u] = Some(v);
        }
    }

    /// Sends each still unmatched vertex to its pendant neighbor.
    fn finish(mut self) -> Matching {
        for u in 0..self.inst.num_u() {
            if self.assign[u].is_none() {
                self.assign[u] = self
                    .inst
                    .u_neighbors(u)
                    .iter()
                    .copied()
                    .find(|&v| self.inst.v_neighbors(v).len() == 1);
            }
        }
        Matching::from_assignment(&self.assign)
    }
}

/// Parameter values of a generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralCheck {
    pub num_colors: usize,
    pub max_u_degree: usize,
    /// Whether deleting the selected right vertices leaves a forest.
    pub forest_after_deletion: bool,
    /// Largest radius (in edges) over the trees of that forest.
    pub max_tree_radius: usize,
}

/// Measures `inst` after deleting the right vertices accepted by `delete`.
pub fn structural_check(inst: &Instance, delete: impl Fn(&str) -> bool) -> StructuralCheck {
    let g = inst.graph();
    let keep: Vec<usize> = (0..g.n())
        .filter(|&x| x < inst.num_u() || !delete(inst.global_id(x)))
        .collect();
    let h = g.induced(&keep);
    let max_u_degree = (0..inst.num_u()).map(|u| inst.u_neighbors(u).len()).max().unwrap_or(0);
    StructuralCheck {
        num_colors: inst.num_colors(),
        max_u_degree,
        forest_after_deletion: h.is_acyclic(),
        max_tree_radius: if h.is_acyclic() { forest_radius(&h) } else { 0 },
    }
}

/// Largest radius over the trees of a forest, via the two-sweep diameter.
fn forest_radius(h: &Graph) -> usize {
    let bfs = |s: usize| -> Vec<usize> {
        let mut dist = vec![usize::MAX; h.n()];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in h.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    };
    let far = |d: &[usize]| {
        (0..d.len())
            .filter(|&x| d[x] != usize::MAX)
            .max_by_key(|&x| d[x])
            .expect("nonempty component")
    };
    h.components()
        .iter()
        .map(|comp| {
            let a = far(&bfs(comp[0]));
            let d = bfs(a);
            d[far(&d)].div_ceil(2)
        })
        .max()
        .unwrap_or(0)
}
