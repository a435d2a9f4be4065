//! Exact backtracking solver used as ground truth.
//!
//! The search assigns left vertices one at a time, always branching on the
//! one with the fewest remaining candidates, and propagates to a fixpoint
//! after every decision:
//!
//! * a left vertex with a single candidate is committed,
//! * a left vertex with no candidate fails the node,
//! * for every right vertex `v` each color has an interval
//!   `[committed, committed + assignable]`; the node fails when the largest
//!   lower end exceeds the smallest upper end by more than `L(v)`, and a
//!   candidate `v` is dropped for `u` when committing `u` there would do so.

use crate::model::{Instance, Matching};
use crate::Answer;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("oracle gave up after {nodes} search nodes")]
pub struct BudgetExceeded {
    pub nodes: u64,
}

#[derive(Clone)]
struct State {
    assign: Vec<Option<usize>>,
    dom: Vec<Vec<usize>>,
    /// `v * num_colors + c`
    committed: Vec<usize>,
    assignable: Vec<usize>,
}

struct Search<'a> {
    inst: &'a Instance,
    nodes: u64,
    budget: u64,
}

/// Decides the instance exactly, or reports that `budget` search nodes were
/// not enough. Deterministic for a fixed instance.
pub fn solve_bruteforce(inst: &Instance, budget: u64) -> Result<Answer, BudgetExceeded> {
    let nc = inst.num_colors();
    let mut st = State {
        assign: vec![None; inst.num_u()],
        dom: (0..inst.num_u()).map(|u| inst.u_neighbors(u).to_vec()).collect(),
        committed: vec![0; inst.num_v() * nc],
        assignable: vec![0; inst.num_v() * nc],
    };
    for u in 0..inst.num_u() {
        for &v in inst.u_neighbors(u) {
            st.assignable[v * nc + inst.color(u)] += 1;
        }
    }
    let mut search = Search { inst, nodes: 0, budget };
    match search.dfs(st)? {
        Some(assign) => Ok(Answer::Yes(Matching::from_assignment(&assign))),
        None => Ok(Answer::No),
    }
}

impl Search<'_> {
    fn dfs(&mut self, mut st: State) -> Result<Option<Vec<Option<usize>>>, BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExceeded { nodes: self.budget });
        }
        if !self.propagate(&mut st) {
            return Ok(None);
        }
        let pick = (0..st.assign.len())
            .filter(|&u| st.assign[u].is_none())
            .min_by_key(|&u| (st.dom[u].len(), u));
        let Some(u) = pick else {
            return Ok(Some(st.assign));
        };
        for &v in &st.dom[u].clone() {
            let mut child = st.clone();
            self.commit(&mut child, u, v);
            if let Some(found) = self.dfs(child)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    fn commit(&self, st: &mut State, u: usize, v: usize) {
        let nc = self.inst.num_colors();
        let c = self.inst.color(u);
        for &w in &st.dom[u] {
            st.assignable[w * nc + c] -= 1;
        }
        st.committed[v * nc + c] += 1;
        st.assign[u] = Some(v);
        st.dom[u] = vec![v];
    }

    /// Returns false when the node is infeasible.
    fn propagate(&self, st: &mut State) -> bool {
        let inst = self.inst;
        let nc = inst.num_colors();
        loop {
            let mut changed = false;
            // per-v bounds: (max lower, min upper)
            let mut bounds = Vec::with_capacity(inst.num_v());
            for v in 0..inst.num_v() {
                let row = v * nc..(v + 1) * nc;
                let max_lo = st.committed[row.clone()].iter().copied().max().unwrap_or(0);
                let min_hi = st.committed[row.clone()]
                    .iter()
                    .zip(&st.assignable[row])
                    .map(|(a, b)| a + b)
                    .min()
                    .unwrap_or(0);
                if max_lo > min_hi + inst.threshold(v) {
                    return false;
                }
                bounds.push((max_lo, min_hi));
            }
            for u in 0..st.assign.len() {
                if st.assign[u].is_some() {
                    continue;
                }
                let c = inst.color(u);
                let before = st.dom[u].len();
                let mut dropped = Vec::new();
                st.dom[u].retain(|&v| {
                    let (max_lo, min_hi) = bounds[v];
                    let lo = max_lo.max(st.committed[v * nc + c] + 1);
                    let ok = lo <= min_hi + inst.threshold(v);
                    if !ok {
                        dropped.push(v);
                    }
                    ok
                });
                for v in dropped {
                    st.assignable[v * nc + c] -= 1;
                }
                match st.dom[u].len() {
                    0 => return false,
                    1 => {
                        let v = st.dom[u][0];
                        self.commit(st, u, v);
                        changed = true;
                    }
                    n if n != before => changed = true,
                    _ => {}
                }
                if changed {
                    // bounds are stale now
                    break;
                }
            }
            if !changed {
                return true;
            }
        }
    }
}
