//! The second integer program (per-edge variables), its dual graph and the
//! structural facts a tree-depth based ILP algorithm relies on.

mod lp;

pub use lp::{parse_lp, write_lp, LpParseError};

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::graph::Graph;
use crate::model::Instance;
use crate::structure::{is_elimination_forest, treedepth_exact, EXACT_TD_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

/// Which block of the formulation a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RowTag {
    /// `sum_v x_uv = 1`
    LeftPerfect {
        u: usize,
    },
    /// `y_v - x_v <= L(v)` (and, in the first program, `>= 0`)
    Spread {
        v: usize,
    },
    /// `x_v <= sum_{u in U_c} x_uv` or `sum_{u in U_c} x_uv <= y_v`
    ColorLoad {
        v: usize,
        c: usize,
    },
    /// A subset constraint of the first program; `w` is a bitmask over `V`.
    Cover {
        w: u64,
    },
    Capacity {
        w: u64,
    },
    /// A row read from a file whose name follows no known pattern.
    Other {
        row: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub name: String,
    /// Sorted by column, no zero entries.
    pub coeffs: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
    pub tag: RowTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct IlpModel {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl IlpModel {
    pub fn add_column(&mut self, name: String, lower: i64, upper: i64, kind: VarKind) -> usize {
        self.columns.push(Column {
            name,
            lower,
            upper,
            kind,
        });
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, name: String, mut coeffs: Vec<(usize, i64)>, sense: Sense, rhs: i64, tag: RowTag) {
        coeffs.sort_unstable();
        coeffs.retain(|&(_, a)| a != 0);
        self.rows.push(Row {
            name,
            coeffs,
            sense,
            rhs,
            tag,
        });
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Largest absolute coefficient, 0 for an empty matrix.
    pub fn max_abs_coeff(&self) -> i64 {
        self.rows
            .iter()
            .flat_map(|r| r.coeffs.iter().map(|&(_, a)| a.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn satisfied_by(&self, values: &[i64]) -> bool {
        self.columns
            .iter()
            .zip(values)
            .all(|(c, &x)| c.lower <= x && x <= c.upper)
            && self.rows.iter().all(|r| {
                let lhs: i64 = r.coeffs.iter().map(|&(j, a)| a * values[j]).sum();
                r.sense.holds(lhs, r.rhs)
            })
    }

    /// Number of points in the box of column bounds (saturating).
    pub fn box_size(&self) -> u128 {
        self.columns.iter().fold(1u128, |acc, c| {
            acc.saturating_mul((c.upper - c.lower + 1).max(0) as u128)
        })
    }
}

fn x_name(u: usize, v: usize) -> String {
    format!("x_u{u}_v{v}")
}

/// Builds the per-edge program: binary `x_uv` per edge, integer `x_v`,
/// `y_v` bounded by `deg(v)`, rows `|U| + |V| + 2|V||C|`.
pub fn build_ilp2(inst: &Instance) -> IlpModel {
    let mut m = IlpModel::default();
    let mut edge_col = HashMap::with_capacity(inst.num_edges());
    for &(u, v) in inst.edges() {
        edge_col.insert((u, v), m.add_column(x_name(u, v), 0, 1, VarKind::Binary));
    }
    let mut lo = Vec::with_capacity(inst.num_v());
    let mut hi = Vec::with_capacity(inst.num_v());
    for v in 0..inst.num_v() {
        let deg = inst.v_neighbors(v).len() as i64;
        lo.push(m.add_column(format!("x_v{v}"), 0, deg, VarKind::Integer));
        hi.push(m.add_column(format!("y_v{v}"), 0, deg, VarKind::Integer));
    }
    for u in 0..inst.num_u() {
        let coeffs = inst.u_neighbors(u).iter().map(|&v| (edge_col[&(u, v)], 1)).collect();
        m.add_row(format!("left_u{u}"), coeffs, Sense::Eq, 1, RowTag::LeftPerfect { u });
    }
    for v in 0..inst.num_v() {
        m.add_row(
            format!("spread_v{v}"),
            vec![(hi[v], 1), (lo[v], -1)],
            Sense::Le,
            inst.threshold(v) as i64,
            RowTag::Spread { v },
        );
    }
    for v in 0..inst.num_v() {
        for c in 0..inst.num_colors() {
            let load: Vec<(usize, i64)> = inst
                .v_neighbors(v)
                .iter()
                .filter(|&&u| inst.color(u) == c)
                .map(|&u| (edge_col[&(u, v)], 1))
                .collect();
            let tag = RowTag::ColorLoad { v, c };
            let mut above = load.clone();
            above.push((lo[v], -1));
            m.add_row(format!("load_lo_v{v}_c{c}"), above, Sense::Ge, 0, tag);
            let mut below = load;
            below.push((hi[v], -1));
            m.add_row(format!("load_hi_v{v}_c{c}"), below, Sense::Le, 0, tag);
        }
    }
    m
}

/// Vertices of the dual graph: one per constraint, where the two one-sided
/// rows of a double inequality `x_v <= load <= y_v` form one constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub tags: Vec<RowTag>,
    /// Row indices of each dual vertex.
    pub rows: Vec<Vec<usize>>,
    pub graph: Graph,
}

/// Dual vertices adjacent when their supports share a column.
pub fn dual_graph(model: &IlpModel) -> DualGraph {
    let mut index: BTreeMap<RowTag, usize> = BTreeMap::new();
    let mut tags = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut of_row = Vec::with_capacity(model.rows.len());
    for (i, r) in model.rows.iter().enumerate() {
        let k = *index.entry(r.tag).or_insert_with(|| {
            tags.push(r.tag);
            rows.push(Vec::new());
            tags.len() - 1
        });
        rows[k].push(i);
        of_row.push(k);
    }
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); model.columns.len()];
    for (i, r) in model.rows.iter().enumerate() {
        for &(j, _) in &r.coeffs {
            users[j].push(of_row[i]);
        }
    }
    let mut graph = Graph::new(tags.len());
    for us in &users {
        for a in 0..us.len() {
            for b in a + 1..us.len() {
                graph.add_edge(us[a], us[b]);
            }
        }
    }
    DualGraph { tags, rows, graph }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub rows: usize,
    pub columns: usize,
    pub max_abs_coeff: i64,
    pub dual_vertices: usize,
    pub dual_edges: usize,
    /// No two left-perfect or spread constraints share a variable.
    pub uv_rows_stable: bool,
    /// The dual graph embeds into the instance graph with every right
    /// vertex blown up into a clique of `|C| + 1` vertices.
    pub blowup_subgraph: bool,
    pub td_instance: Option<usize>,
    /// Height of an elimination forest of the dual graph lifted from an
    /// optimal one of the instance graph; at most `(|C|+1) td(G)`.
    pub td_dual_lifted: Option<usize>,
    pub td_dual_exact: Option<usize>,
    pub td_bound_holds: Option<bool>,
}

/// Image of a dual vertex in the blow-up: left vertices map to themselves,
/// right vertex `v` owns the slots `0..=|C|` (slot 0 for its spread row).
fn blowup_slot(inst: &Instance, tag: RowTag) -> Option<(usize, usize)> {
    match tag {
        RowTag::LeftPerfect { u } => Some((u, 0)),
        RowTag::Spread { v } => Some((inst.global_v(v), 0)),
        RowTag::ColorLoad { v, c } => Some((inst.global_v(v), c + 1)),
        RowTag::Cover { .. } | RowTag::Capacity { .. } | RowTag::Other { .. } => None,
    }
}

/// Checks the structural claims about the per-edge program of `inst`.
/// Exact tree-depths are attempted when the graphs are small enough.
pub fn structural_report(inst: &Instance, model: &IlpModel) -> StructuralReport {
    let dual = dual_graph(model);
    let g = inst.graph();
    let nc = inst.num_colors();

    let mut uv_rows_stable = true;
    let mut blowup_subgraph = true;
    for (a, b) in dual.graph.edges() {
        let plain = |t: RowTag| matches!(t, RowTag::LeftPerfect { .. } | RowTag::Spread { .. });
        if plain(dual.tags[a]) && plain(dual.tags[b]) {
            uv_rows_stable = false;
        }
        match (blowup_slot(inst, dual.tags[a]), blowup_slot(inst, dual.tags[b])) {
            (Some((x, _)), Some((y, _))) if x == y || g.has_edge(x, y) => {}
            _ => blowup_subgraph = false,
        }
    }
    let mut slots_used = std::collections::HashSet::new();
    for &t in &dual.tags {
        if !matches!(blowup_slot(inst, t), Some(s) if slots_used.insert(s)) {
            blowup_subgraph = false;
        }
    }

    let td_g = treedepth_exact(&g, EXACT_TD_LIMIT).ok();
    let mut td_dual_lifted = None;
    if let (Some(tdg), true) = (&td_g, blowup_subgraph) {
        let lifted = lift_forest(inst, &dual, &tdg.parent);
        if is_elimination_forest(&dual.graph, &lifted) {
            td_dual_lifted = crate::structure::elimination_forest_depth(&lifted);
        }
    }
    let td_dual_exact = treedepth_exact(&dual.graph, EXACT_TD_LIMIT).ok().map(|r| r.depth);
    let td_bound_holds = td_g.as_ref().map(|tdg| {
        let bound = (nc + 1) * tdg.depth;
        let dual_depth = td_dual_exact.or(td_dual_lifted);
        matches!(dual_depth, Some(d) if d <= bound)
    });
    StructuralReport {
        rows: model.rows.len(),
        columns: model.columns.len(),
        max_abs_coeff: model.max_abs_coeff(),
        dual_vertices: dual.tags.len(),
        dual_edges: dual.graph.num_edges(),
        uv_rows_stable,
        blowup_subgraph,
        td_instance: td_g.map(|r| r.depth),
        td_dual_lifted,
        td_dual_exact,
        td_bound_holds,
    }
}

/// Replaces every vertex of an elimination forest of the instance graph by
/// a path of its blow-up slots and restricts the result to the slots that
/// carry a dual vertex.
fn lift_forest(inst: &Instance, dual: &DualGraph, parent: &[Option<usize>]) -> Vec<Option<usize>> {
    let width = inst.num_colors() + 1;
    let slot_of = |x: usize, s: usize| x * width + s;
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (d, &t) in dual.tags.iter().enumerate() {
        let (x, s) = blowup_slot(inst, t).expect("checked by caller");
        owner.insert(slot_of(x, s), d);
    }
    // nearest present slot at or above (x, s) on the lifted path
    let nearest_above = |mut x: usize, mut s: usize| -> Option<usize> {
        loop {
            if let Some(&d) = owner.get(&slot_of(x, s)) {
                return Some(d);
            }
            if s > 0 {
                s -= 1;
            } else {
                x = parent[x]?;
                s = width - 1;
            }
        }
    };
    let mut out = vec![None; dual.tags.len()];
    for (d, &t) in dual.tags.iter().enumerate() {
        let (x, s) = blowup_slot(inst, t).unwrap();
        out[d] = if s > 0 {
            nearest_above(x, s - 1)
        } else {
            parent[x].and_then(|p| nearest_above(p, width - 1))
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    Feasible(Vec<i64>),
    Infeasible,
    /// The search visited more than the allowed number of nodes.
    TooLarge,
}

/// Depth-first search over the box of column bounds, pruning any row whose
/// activity range can no longer meet its right-hand side.
pub fn enumerate_feasible(model: &IlpModel, node_limit: u64) -> Enumeration {
    Enumerator::new(model).run(node_limit)
}

struct Enumerator<'a> {
    model: &'a IlpModel,
    /// `(row, coefficient)` pairs per column.
    rows_of: Vec<Vec<(usize, i64)>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl<'a> Enumerator<'a> {
    fn new(model: &'a IlpModel) -> Self {
        let mut rows_of = vec![Vec::new(); model.columns.len()];
        let mut lo = vec![0; model.rows.len()];
        let mut hi = vec![0; model.rows.len()];
        for (i, r) in model.rows.iter().enumerate() {
            for &(j, a) in &r.coeffs {
                rows_of[j].push((i, a));
                let (p, q) = Self::span(model, j, a);
                lo[i] += p;
                hi[i] += q;
            }
        }
        Enumerator { model, rows_of, lo, hi }
    }

    fn span(model: &IlpModel, j: usize, a: i64) -> (i64, i64) {
        let c = &model.columns[j];
        let (p, q) = (a * c.lower, a * c.upper);
        (p.min(q), p.max(q))
    }

    fn row_ok(&self, i: usize) -> bool {
        let r = &self.model.rows[i];
        match r.sense {
            Sense::Le => self.lo[i] <= r.rhs,
            Sense::Ge => self.hi[i] >= r.rhs,
            Sense::Eq => self.lo[i] <= r.rhs && r.rhs <= self.hi[i],
        }
    }

    /// Fixes column `j` to `x` (or releases it with `None`); returns whether
    /// every touched row can still be satisfied.
    fn set(&mut self, j: usize, x: Option<i64>, prev: Option<i64>) -> bool {
        let mut ok = true;
        for k in 0..self.rows_of[j].len() {
            let (i, a) = self.rows_of[j][k];
            let (p, q) = Self::span(self.model, j, a);
            let (old_lo, old_hi) = prev.map_or((p, q), |v| (a * v, a * v));
            let (new_lo, new_hi) = x.map_or((p, q), |v| (a * v, a * v));
            self.lo[i] += new_lo - old_lo;
            self.hi[i] += new_hi - old_hi;
            ok &= self.row_ok(i);
        }
        ok
    }

    fn run(mut self, node_limit: u64) -> Enumeration {
        let n = self.model.columns.len();
        if !(0..self.model.rows.len()).all(|i| self.row_ok(i)) {
            return Enumeration::Infeasible;
        }
        if n == 0 {
            return Enumeration::Feasible(Vec::new());
        }
        let mut values: Vec<Option<i64>> = vec![None; n];
        let mut stack = vec![(0usize, self.model.columns[0].lower)];
        let mut nodes = 0u64;
        while let Some(&(j, next)) = stack.last() {
            if values[j].is_some() {
                self.set(j, None, values[j]);
                values[j] = None;
            }
            if next > self.model.columns[j].upper {
                stack.pop();
                continue;
            }
            nodes += 1;
            if nodes > node_limit {
                return Enumeration::TooLarge;
            }
            stack.last_mut().unwrap().1 = next + 1;
            let ok = self.set(j, Some(next), None);
            values[j] = Some(next);
            if ok {
                if j + 1 == n {
                    return Enumeration::Feasible(values.into_iter().map(Option::unwrap).collect());
                }
                stack.push((j + 1, self.model.columns[j + 1].lower));
            }
        }
        Enumeration::Infeasible
    }
}
