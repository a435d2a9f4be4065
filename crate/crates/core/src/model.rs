//! Colored bipartite instances, matchings and their JSON file forms.
//!
//! Vertex ids are opaque strings in files and dense indices in memory.
//! `U` vertices are indexed `0..num_u()`, `V` vertices `0..num_v()`. Code
//! that needs a single vertex numbering (graph algorithms, decompositions)
//! uses the global layout `U` first, then `V`: see [`Instance::global_v`].

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Index of a color in `0..num_colors`.
pub type ColorId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

/// One entry of the `"u"` array of an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UEntry {
    pub id: String,
    pub color: usize,
}

/// One entry of the `"v"` array of an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VEntry {
    pub id: String,
    pub l: usize,
}

/// Instance exactly as it appears on disk.
///
/// ```json
/// {"num_colors": 2, "u": [{"id": "a", "color": 0}], "v": [{"id": "x", "l": 1}], "edges": [["a", "x"]]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub num_colors: usize,
    pub u: Vec<UEntry>,
    pub v: Vec<VEntry>,
    pub edges: Vec<(String, String)>,
}

/// Matching exactly as it appears on disk: `{"pairs": [["u_id", "v_id"]]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingFile {
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoColors,
    ColorOutOfRange { u: String, color: usize },
    DuplicateVertexId { id: String },
    DanglingEndpoint { u: String, v: String, missing: Side },
    DuplicateEdge { u: String, v: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoColors => write!(f, "num_colors must be at least 1"),
            Violation::ColorOutOfRange { u, color } => {
                write!(f, "vertex {u:?} has color {color} outside 0..num_colors")
            }
            Violation::DuplicateVertexId { id } => write!(f, "vertex id {id:?} is used twice"),
            Violation::DanglingEndpoint { u, v, missing } => {
                let which = match missing {
                    Side::U => u,
                    Side::V => v,
                };
                write!(f, "edge ({u:?}, {v:?}) references unknown {missing:?} vertex {which:?}")
            }
            Violation::DuplicateEdge { u, v } => write!(f, "edge ({u:?}, {v:?}) appears twice"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown vertex id {0:?}")]
    UnknownId(String),
    #[error("vertex index {index} out of range for side {side:?}")]
    IndexOutOfRange { side: Side, index: usize },
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Checks every instance invariant and reports each offending element.
pub fn validate_instance(file: &InstanceFile) -> Vec<Violation> {
    let mut out = Vec::new();
    if file.num_colors == 0 {
        out.push(Violation::NoColors);
    }
    let mut seen = HashSet::new();
    let mut u_ids = HashSet::new();
    let mut v_ids = HashSet::new();
    for u in &file.u {
        if !seen.insert(u.id.as_str()) {
            out.push(Violation::DuplicateVertexId { id: u.id.clone() });
        }
        u_ids.insert(u.id.as_str());
        if u.color >= file.num_colors {
            out.push(Violation::ColorOutOfRange {
                u: u.id.clone(),
                color: u.color,
            });
        }
    }
    for v in &file.v {
        if !seen.insert(v.id.as_str()) {
            out.push(Violation::DuplicateVertexId { id: v.id.clone() });
        }
        v_ids.insert(v.id.as_str());
    }
    let mut edge_set = HashSet::new();
    for (u, v) in &file.edges {
        if !u_ids.contains(u.as_str()) {
            out.push(Violation::DanglingEndpoint {
                u: u.clone(),
                v: v.clone(),
                missing: Side::U,
            });
        } else if !v_ids.contains(v.as_str()) {
            out.push(Violation::DanglingEndpoint {
                u: u.clone(),
                v: v.clone(),
                missing: Side::V,
            });
        } else if !edge_set.insert((u.as_str(), v.as_str())) {
            out.push(Violation::DuplicateEdge {
                u: u.clone(),
                v: v.clone(),
            });
        }
    }
    out
}

/// A validated colored bipartite graph with thresholds on the right side.
///
/// Immutable once built; adjacency lists are sorted by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    num_colors: usize,
    u_ids: Vec<String>,
    u_colors: Vec<ColorId>,
    v_ids: Vec<String>,
    thresholds: Vec<usize>,
    edges: Vec<(usize, usize)>,
    u_adj: Vec<Vec<usize>>,
    v_adj: Vec<Vec<usize>>,
    u_index: HashMap<String, usize>,
    v_index: HashMap<String, usize>,
}

impl Instance {
    pub fn from_file(file: &InstanceFile) -> Result<Instance, ModelError> {
        let violations = validate_instance(file);
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        let mut b = InstanceBuilder::new(file.num_colors);
        for u in &file.u {
            b.add_u(&u.id, u.color);
        }
        for v in &file.v {
            b.add_v(&v.id, v.l);
        }
        for (u, v) in &file.edges {
            b.add_edge_by_id(u, v)?;
        }
        b.build()
    }

    pub fn from_json(text: &str) -> Result<Instance, crate::Error> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Ok(Instance::from_file(&file)?)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            num_colors: self.num_colors,
            u: (0..self.num_u())
                .map(|u| UEntry {
                    id: self.u_ids[u].clone(),
                    color: self.u_colors[u],
                })
                .collect(),
            v: (0..self.num_v())
                .map(|v| VEntry {
                    id: self.v_ids[v].clone(),
                    l: self.thresholds[v],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| (self.u_ids[u].clone(), self.v_ids[v].clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn num_u(&self) -> usize {
        self.u_ids.len()
    }

    pub fn num_v(&self) -> usize {
        self.v_ids.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_u() + self.num_v()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn color(&self, u: usize) -> ColorId {
        self.u_colors[u]
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.u_colors
    }

    pub fn threshold(&self, v: usize) -> usize {
        self.thresholds[v]
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    pub fn u_id(&self, u: usize) -> &str {
        &self.u_ids[u]
    }

    pub fn v_id(&self, v: usize) -> &str {
        &self.v_ids[v]
    }

    pub fn u_by_id(&self, id: &str) -> Option<usize> {
        self.u_index.get(id).copied()
    }

    pub fn v_by_id(&self, id: &str) -> Option<usize> {
        self.v_index.get(id).copied()
    }

    /// Edges as `(u, v)` index pairs, in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn u_neighbors(&self, u: usize) -> &[usize] {
        &self.u_adj[u]
    }

    pub fn v_neighbors(&self, v: usize) -> &[usize] {
        &self.v_adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_u() && self.u_adj[u].binary_search(&v).is_ok()
    }

    /// Global index of `V` vertex `v` (`U` vertices keep their index).
    pub fn global_v(&self, v: usize) -> usize {
        self.num_u() + v
    }

    pub fn side_of(&self, global: usize) -> (Side, usize) {
        if global < self.num_u() {
            (Side::U, global)
        } else {
            (Side::V, global - self.num_u())
        }
    }

    pub fn global_id(&self, global: usize) -> &str {
        match self.side_of(global) {
            (Side::U, u) => self.u_id(u),
            (Side::V, v) => self.v_id(v),
        }
    }

    /// The underlying undirected graph in the global numbering.
    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.num_vertices());
        for &(u, v) in &self.edges {
            g.add_edge(u, self.global_v(v));
        }
        g
    }

    /// Number of `U_c` vertices adjacent to `v`.
    pub fn color_degree(&self, v: usize, c: ColorId) -> usize {
        self.v_adj[v].iter().filter(|&&u| self.u_colors[u] == c).count()
    }
}

/// Incremental constructor used by generators; ids are checked at `build`.
#[derive(Debug, Clone, Default)]
pub struct InstanceBuilder {
    num_colors: usize,
    u_ids: Vec<String>,
    u_colors: Vec<ColorId>,
    v_ids: Vec<String>,
    thresholds: Vec<usize>,
    edges: Vec<(usize, usize)>,
    u_index: HashMap<String, usize>,
    v_index: HashMap<String, usize>,
}

impl InstanceBuilder {
    pub fn new(num_colors: usize) -> Self {
        InstanceBuilder {
            num_colors,
            ..Default::default()
        }
    }

    pub fn add_u(&mut self, id: impl Into<String>, color: ColorId) -> usize {
        let id = id.into();
        let idx = self.u_ids.len();
        self.u_index.entry(id.clone()).or_insert(idx);
        self.u_ids.push(id);
        self.u_colors.push(color);
        idx
    }

    pub fn add_v(&mut self, id: impl Into<String>, l: usize) -> usize {
        let id = id.into();
        let idx = self.v_ids.len();
        self.v_index.entry(id.clone()).or_insert(idx);
        self.v_ids.push(id);
        self.thresholds.push(l);
        idx
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
    }

    pub fn add_edge_by_id(&mut self, u: &str, v: &str) -> Result<(), ModelError> {
        let ui = *self
            .u_index
            .get(u)
            .ok_or_else(|| ModelError::UnknownId(u.to_string()))?;
        let vi = *self
            .v_index
            .get(v)
            .ok_or_else(|| ModelError::UnknownId(v.to_string()))?;
        self.edges.push((ui, vi));
        Ok(())
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn num_u(&self) -> usize {
        self.u_ids.len()
    }

    pub fn num_v(&self) -> usize {
        self.v_ids.len()
    }

    pub fn v_id(&self, v: usize) -> &str {
        &self.v_ids[v]
    }

    pub fn u_index(&self, id: &str) -> Option<usize> {
        self.u_index.get(id).copied()
    }

    pub fn v_index(&self, id: &str) -> Option<usize> {
        self.v_index.get(id).copied()
    }

    pub fn v_neighbor_colors(&self, v: usize) -> HashSet<ColorId> {
        self.edges
            .iter()
            .filter(|&&(_, vv)| vv == v)
            .map(|&(u, _)| self.u_colors[u])
            .collect()
    }

    pub fn build(self) -> Result<Instance, ModelError> {
        let mut violations = Vec::new();
        if self.num_colors == 0 {
            violations.push(Violation::NoColors);
        }
        let mut seen = HashSet::new();
        for id in self.u_ids.iter().chain(self.v_ids.iter()) {
            if !seen.insert(id.as_str()) {
                violations.push(Violation::DuplicateVertexId { id: id.clone() });
            }
        }
        for (u, &c) in self.u_colors.iter().enumerate() {
            if c >= self.num_colors {
                violations.push(Violation::ColorOutOfRange {
                    u: self.u_ids[u].clone(),
                    color: c,
                });
            }
        }
        let mut u_adj = vec![Vec::new(); self.u_ids.len()];
        let mut v_adj = vec![Vec::new(); self.v_ids.len()];
        let mut edge_set = HashSet::new();
        for &(u, v) in &self.edges {
            let u_name = self.u_ids.get(u).cloned().unwrap_or_else(|| format!("#{u}"));
            let v_name = self.v_ids.get(v).cloned().unwrap_or_else(|| format!("#{v}"));
            if u >= self.u_ids.len() {
                violations.push(Violation::DanglingEndpoint {
                    u: u_name,
                    v: v_name,
                    missing: Side::U,
                });
            } else if v >= self.v_ids.len() {
                violations.push(Violation::DanglingEndpoint {
                    u: u_name,
                    v: v_name,
                    missing: Side::V,
                });
            } else if !edge_set.insert((u, v)) {
                violations.push(Violation::DuplicateEdge { u: u_name, v: v_name });
            } else {
                u_adj[u].push(v);
                v_adj[v].push(u);
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        u_adj.iter_mut().for_each(|a| a.sort_unstable());
        v_adj.iter_mut().for_each(|a| a.sort_unstable());
        Ok(Instance {
            num_colors: self.num_colors,
            u_ids: self.u_ids,
            u_colors: self.u_colors,
            v_ids: self.v_ids,
            thresholds: self.thresholds,
            edges: self.edges,
            u_adj,
            v_adj,
            u_index: self.u_index,
            v_index: self.v_index,
        })
    }
}

/// A set of `(u, v)` index pairs. Validity against an instance is checked
/// by [`crate::verify::verify_matching`], not at construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Matching { pairs }
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    /// Builds a matching from a per-`u` partner table, skipping unmatched entries.
    pub fn from_assignment(assign: &[Option<usize>]) -> Self {
        Matching {
            pairs: assign
                .iter()
                .enumerate()
                .filter_map(|(u, v)| v.map(|v| (u, v)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Partner table indexed by `u`; later duplicates overwrite earlier ones.
    pub fn assignment(&self, num_u: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; num_u];
        for &(u, v) in &self.pairs {
            if u < num_u {
                out[u] = Some(v);
            }
        }
        out
    }

    pub fn to_file(&self, inst: &Instance) -> MatchingFile {
        MatchingFile {
            pairs: self
                .pairs
                .iter()
                .map(|&(u, v)| (inst.u_id(u).to_string(), inst.v_id(v).to_string()))
                .collect(),
        }
    }

    pub fn from_file(inst: &Instance, file: &MatchingFile) -> Result<Matching, ModelError> {
        let mut pairs = Vec::with_capacity(file.pairs.len());
        for (u, v) in &file.pairs {
            let ui = inst.u_by_id(u).ok_or_else(|| ModelError::UnknownId(u.clone()))?;
            let vi = inst.v_by_id(v).ok_or_else(|| ModelError::UnknownId(v.clone()))?;
            pairs.push((ui, vi));
        }
        Ok(Matching { pairs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(num_colors: usize, edges: &[(&str, &str)]) -> InstanceFile {
        InstanceFile {
            num_colors,
            u: vec![UEntry {
                id: "u0".into(),
                color: 0,
            }],
            v: vec![VEntry { id: "v0".into(), l: 0 }],
            edges: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    #[test]
    fn minimal_instance_is_valid() {
        assert!(validate_instance(&file(1, &[("u0", "v0")])).is_empty());
    }

    #[test]
    fn dangling_endpoint_reported() {
        let vs = validate_instance(&file(1, &[("u0", "v9")]));
        assert_eq!(
            vs,
            vec![Violation::DanglingEndpoint {
                u: "u0".into(),
                v: "v9".into(),
                missing: Side::V
            }]
        );
    }

    #[test]
    fn duplicate_edge_reported() {
        let vs = validate_instance(&file(1, &[("u0", "v0"), ("u0", "v0")]));
        assert_eq!(
            vs,
            vec![Violation::DuplicateEdge {
                u: "u0".into(),
                v: "v0".into()
            }]
        );
    }

    #[test]
    fn color_and_id_violations() {
        let mut f = file(1, &[]);
        f.u[0].color = 3;
        f.v[0].id = "u0".into();
        let vs = validate_instance(&f);
        assert!(vs.contains(&Violation::DuplicateVertexId { id: "u0".into() }));
        assert!(vs.contains(&Violation::ColorOutOfRange {
            u: "u0".into(),
            color: 3
        }));
        assert!(validate_instance(&file(0, &[])).contains(&Violation::NoColors));
    }

    #[test]
    fn json_round_trip_keeps_field_names() {
        let text =
            r#"{"num_colors": 2, "u": [{"id": "a", "color": 1}], "v": [{"id": "x", "l": 3}], "edges": [["a", "x"]]}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.num_colors(), 2);
        assert_eq!(inst.color(0), 1);
        assert_eq!(inst.threshold(0), 3);
        let back: serde_json::Value = serde_json::from_str(&inst.to_json()).unwrap();
        let orig: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(back, orig);
    }

    #[test]
    fn unknown_field_rejected() {
        let text = r#"{"num_colors": 1, "u": [], "v": [], "edges": [], "extra": 1}"#;
        assert!(Instance::from_json(text).is_err());
    }

    #[test]
    fn builder_reports_bad_edges() {
        let mut b = InstanceBuilder::new(1);
        let u = b.add_u("u", 0);
        let v = b.add_v("v", 0);
        b.add_edge(u, v);
        b.add_edge(u, v);
        assert!(matches!(b.build(), Err(ModelError::Invalid(_))));
    }
}
