//! Solver for instances with few right vertices.
//!
//! Feasibility is decided on the interval program over one pair
//! `(x_v, y_v)` per right vertex: every color must load `v` with between
//! `x_v` and `y_v` vertices, `y_v - x_v <= L(v)`, and for every `W ⊆ V`
//!
//! * `sum_{v in W} y_v >= |ν_c(W)|`, the color-`c` vertices whose whole
//!   neighborhood lies in `W`,
//! * `sum_{v in W} x_v <= |N_c(W)|`, the color-`c` vertices adjacent to `W`.
//!
//! Here `x_v` is the smallest and `y_v` the largest per-color load. A
//! witness matching is then recovered color by color from a flow with lower
//! bounds.

use serde::Serialize;

use crate::flow::BoundedFlow;
use crate::ilp::{IlpModel, RowTag, Sense, VarKind};
use crate::model::{Instance, Matching};
use crate::Answer;

use super::SolverError;

/// Hard cap on `|V|`; the tables have `2^|V|` entries.
pub const MAX_K: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalAssignment {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

/// Per-subset neighborhood counts, indexed by a bitmask over `V`.
#[derive(Debug, Clone)]
pub struct NeighborhoodTables {
    k: usize,
    /// `nu[w * nc + c] = |ν_c(W)|`
    nu: Vec<usize>,
    /// `nb[w * nc + c] = |N_c(W)|`
    nb: Vec<usize>,
    nc: usize,
}

impl NeighborhoodTables {
    pub fn new(inst: &Instance) -> Result<Self, SolverError> {
        let k = inst.num_v();
        if k > MAX_K {
            return Err(SolverError::OverLimit {
                param: "|V|",
                value: k,
                limit: MAX_K,
            });
        }
        let nc = inst.num_colors();
        let size = 1usize << k;
        let mut nu = vec![0; size * nc];
        let mut nb = vec![0; size * nc];
        // point counts per exact neighborhood mask, then subset sums
        let mut exact = vec![0usize; size * nc];
        for u in 0..inst.num_u() {
            let mask: usize = inst.u_neighbors(u).iter().map(|&v| 1 << v).sum();
            exact[mask * nc + inst.color(u)] += 1;
        }
        for c in 0..nc {
            let mut sub: Vec<usize> = (0..size).map(|w| exact[w * nc + c]).collect();
            for bit in 0..k {
                for w in 0..size {
                    if w >> bit & 1 == 1 {
                        sub[w] += sub[w ^ (1 << bit)];
                    }
                }
            }
            let total = sub[size - 1];
            let full = size - 1;
            for w in 0..size {
                nu[w * nc + c] = sub[w];
                // adjacent to W = not contained in the complement
                nb[w * nc + c] = total - sub[full & !w];
            }
        }
        Ok(NeighborhoodTables { k, nu, nb, nc })
    }

    pub fn nu(&self, w: usize, c: usize) -> usize {
        self.nu[w * self.nc + c]
    }

    pub fn n(&self, w: usize, c: usize) -> usize {
        self.nb[w * self.nc + c]
    }

    pub fn max_nu(&self, w: usize) -> usize {
        (0..self.nc).map(|c| self.nu(w, c)).max().unwrap_or(0)
    }

    pub fn min_n(&self, w: usize) -> usize {
        (0..self.nc).map(|c| self.n(w, c)).min().unwrap_or(0)
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// True when `iv` satisfies every constraint of the interval program,
/// checked over all `2^|V|` subsets.
pub fn satisfies_ilp1(inst: &Instance, tables: &NeighborhoodTables, iv: &IntervalAssignment) -> bool {
    let k = inst.num_v();
    if iv.x.len() != k || iv.y.len() != k {
        return false;
    }
    let intervals = (0..k).all(|v| iv.x[v] <= iv.y[v] && iv.y[v] - iv.x[v] <= inst.threshold(v));
    intervals
        && (0..1usize << k).all(|w| {
            let (sx, sy) = (0..k)
                .filter(|&v| w >> v & 1 == 1)
                .fold((0, 0), |(a, b), v| (a + iv.x[v], b + iv.y[v]));
            sy >= tables.max_nu(w) && sx <= tables.min_n(w)
        })
}

/// Finds an interval assignment, or `None` when the program is infeasible.
///
/// Only `y` is searched: for fixed `y` the smallest admissible
/// `x_v = max(0, y_v - L(v))` is best since `x` only appears in upper-bounded
/// sums. Each `y_v` ranges over `[max_c |ν_c({v})|, min(max_c |N_c(v)|,
/// min_c |N_c(v)| + L(v))]`, and after fixing a prefix every subset through
/// the newest vertex is checked with optimistic values for the rest.
pub fn ilp1_feasible(inst: &Instance) -> Result<Option<IntervalAssignment>, SolverError> {
    let tables = NeighborhoodTables::new(inst)?;
    Ok(search_intervals(inst, &tables))
}

fn search_intervals(inst: &Instance, t: &NeighborhoodTables) -> Option<IntervalAssignment> {
    let k = inst.num_v();
    // ν_c(∅) counts isolated left vertices
    if t.max_nu(0) > 0 {
        return None;
    }
    let mut y_lo = vec![0usize; k];
    let mut y_hi = vec![0usize; k];
    for v in 0..k {
        let w = 1 << v;
        let max_n = (0..inst.num_colors()).map(|c| t.n(w, c)).max().unwrap_or(0);
        y_lo[v] = t.max_nu(w);
        y_hi[v] = max_n.min(t.min_n(w) + inst.threshold(v));
        if y_lo[v] > y_hi[v] {
            return None;
        }
    }
    let x_of = |v: usize, y: usize| y.saturating_sub(inst.threshold(v));
    let full = (1usize << k) - 1;
    // optimistic: decided vertices use their value, the rest y_hi / x(y_lo)
    let mut y = y_lo.clone();
    let check = |y: &[usize], d: usize| -> bool {
        (0..=full).filter(|w| w >> d & 1 == 1).all(|w| {
            let (mut sx, mut sy) = (0, 0);
            for v in (0..k).filter(|&v| w >> v & 1 == 1) {
                if v <= d {
                    sx += x_of(v, y[v]);
                    sy += y[v];
                } else {
                    sx += x_of(v, y_lo[v]);
                    sy += y_hi[v];
                }
            }
            sy >= t.max_nu(w) && sx <= t.min_n(w)
        })
    };
    if k == 0 {
        return Some(IntervalAssignment { x: vec![], y: vec![] });
    }
    // iterative DFS over vertices 0..k, values tried from y_lo upward
    let mut next = vec![0usize; k];
    let mut d = 0usize;
    next[0] = y_lo[0];
    loop {
        if next[d] > y_hi[d] {
            if d == 0 {
                return None;
            }
            d -= 1;
            continue;
        }
        y[d] = next[d];
        next[d] += 1;
        if check(&y, d) {
            if d + 1 == k {
                let x = (0..k).map(|v| x_of(v, y[v])).collect();
                return Some(IntervalAssignment { x, y });
            }
            d += 1;
            next[d] = y_lo[d];
        }
    }
}

/// Builds one matching whose per-color load at every `v` lies in
/// `[x_v, y_v]`, one bounded flow per color.
pub fn reconstruct_from_intervals(inst: &Instance, iv: &IntervalAssignment) -> Result<Matching, SolverError> {
    let (nu, nv) = (inst.num_u(), inst.num_v());
    let mut pairs = Vec::with_capacity(nu);
    for c in 0..inst.num_colors() {
        let us: Vec<usize> = (0..nu).filter(|&u| inst.color(u) == c).collect();
        // nodes: 0 source, 1 sink, then u's, then v's
        let mut net = BoundedFlow::new(2 + us.len() + nv);
        for (i, _) in us.iter().enumerate() {
            net.add_edge(0, 2 + i, 1, 1);
        }
        let mut arcs = Vec::new();
        for (i, &u) in us.iter().enumerate() {
            for &v in inst.u_neighbors(u) {
                arcs.push((net.add_edge(2 + i, 2 + us.len() + v, 0, 1), u, v));
            }
        }
        for v in 0..nv {
            net.add_edge(2 + us.len() + v, 1, iv.x[v] as i64, iv.y[v] as i64);
        }
        let flow = net.feasible(0, 1).ok_or(SolverError::FlowContradiction)?;
        pairs.extend(arcs.iter().filter(|a| flow[a.0] == 1).map(|&(_, u, v)| (u, v)));
    }
    Ok(Matching::new(pairs))
}

pub fn solve_smallk(inst: &Instance) -> Result<Answer, SolverError> {
    match ilp1_feasible(inst)? {
        Some(iv) => Ok(Answer::Yes(reconstruct_from_intervals(inst, &iv)?)),
        None => Ok(Answer::No),
    }
}

/// Like [`solve_smallk`] but refuses instances with more than `max_k`
/// right vertices.
pub fn solve_smallk_with_limit(inst: &Instance, max_k: usize) -> Result<Answer, SolverError> {
    if inst.num_v() > max_k {
        return Err(SolverError::OverLimit {
            param: "|V|",
            value: inst.num_v(),
            limit: max_k,
        });
    }
    solve_smallk(inst)
}

/// The interval program with every subset constraint written out.
///
/// Rows for the empty subset are omitted: the only one that can fail,
/// `0 >= |ν_c(∅)|`, fails exactly when some left vertex is isolated, which
/// [`ilp1_feasible`] reports directly.
pub fn build_ilp1(inst: &Instance) -> Result<IlpModel, SolverError> {
    let t = NeighborhoodTables::new(inst)?;
    let k = inst.num_v();
    let mut m = IlpModel::default();
    let mut xs = Vec::with_capacity(k);
    let mut ys = Vec::with_capacity(k);
    for v in 0..k {
        let deg = inst.v_neighbors(v).len() as i64;
        xs.push(m.add_column(format!("x_v{v}"), 0, deg, VarKind::Integer));
        ys.push(m.add_column(format!("y_v{v}"), 0, deg, VarKind::Integer));
    }
    for w in 1..(1usize << k) {
        let members: Vec<usize> = (0..k).filter(|&v| w >> v & 1 == 1).collect();
        m.add_row(
            format!("cover_w{w}"),
            members.iter().map(|&v| (ys[v], 1)).collect(),
            Sense::Ge,
            t.max_nu(w) as i64,
            RowTag::Cover { w: w as u64 },
        );
        m.add_row(
            format!("capacity_w{w}"),
            members.iter().map(|&v| (xs[v], 1)).collect(),
            Sense::Le,
            t.min_n(w) as i64,
            RowTag::Capacity { w: w as u64 },
        );
    }
    for v in 0..k {
        m.add_row(
            format!("order_v{v}"),
            vec![(ys[v], 1), (xs[v], -1)],
            Sense::Ge,
            0,
            RowTag::Spread { v },
        );
        m.add_row(
            format!("spread_v{v}"),
            vec![(ys[v], 1), (xs[v], -1)],
            Sense::Le,
            inst.threshold(v) as i64,
            RowTag::Spread { v },
        );
    }
    Ok(m)
}
