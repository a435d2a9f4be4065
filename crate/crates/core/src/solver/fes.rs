//! Solver parameterized by the feedback edge number.
//!
//! For every subset `F'` of a minimum feedback edge set `F` that is itself
//! a many-to-one matching, the edges of `F'` are fixed, their left
//! endpoints are deleted together with all of `F`, and each remaining tree
//! is decided by a two-table dynamic program:
//!
//! * `f(w)`: the subtree of `w` can be completed while `w` is not matched
//!   to its parent,
//! * `g(w)`: the subtree of `w` can be completed while `w` is matched to
//!   its parent.

use crate::graph::Graph;
use crate::model::Instance;
use crate::structure::feedback_edge_indices;
use crate::Answer;

use super::SolverError;

/// Edges fixed before the tree dynamic program runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FPrimeContext {
    pub f_prime: Vec<(usize, usize)>,
    /// Left vertices covered by `f_prime`.
    pub matched_u: Vec<bool>,
    /// `m[v * num_colors + c]`: vertices of color `c` matched to `v` by `f_prime`.
    pub m: Vec<usize>,
}

impl FPrimeContext {
    /// `None` when two edges share a left endpoint.
    pub fn new(inst: &Instance, f_prime: &[(usize, usize)]) -> Option<Self> {
        let nc = inst.num_colors();
        let mut matched_u = vec![false; inst.num_u()];
        let mut m = vec![0; inst.num_v() * nc];
        for &(u, v) in f_prime {
            if std::mem::replace(&mut matched_u[u], true) {
                return None;
            }
            m[v * nc + inst.color(u)] += 1;
        }
        Some(FPrimeContext {
            f_prime: f_prime.to_vec(),
            matched_u,
            m,
        })
    }

    /// Context with arbitrary pre-matched counts and no fixed edges.
    pub fn with_counts(inst: &Instance, m: Vec<usize>) -> Self {
        assert_eq!(m.len(), inst.num_v() * inst.num_colors());
        FPrimeContext {
            f_prime: Vec::new(),
            matched_u: vec![false; inst.num_u()],
            m,
        }
    }
}

/// Decides the instance; never gives up.
pub fn solve_fes(inst: &Instance) -> Answer {
    let fes = feedback_edge_indices(inst).len();
    solve_fes_with_limit(inst, fes).expect("limit equals fes")
}

/// Like [`solve_fes`] but refuses instances whose feedback edge number
/// exceeds `max_fes` (the subset enumeration is exponential in it).
pub fn solve_fes_with_limit(inst: &Instance, max_fes: usize) -> Result<Answer, SolverError> {
    let f_idx = feedback_edge_indices(inst);
    if f_idx.len() > max_fes || f_idx.len() >= 64 {
        return Err(SolverError::OverLimit {
            param: "feedback edge number",
            value: f_idx.len(),
            limit: max_fes.min(63),
        });
    }
    let edges = inst.edges();
    let mut in_f = vec![false; edges.len()];
    for &i in &f_idx {
        in_f[i] = true;
    }
    let forest = Graph::from_edges(
        inst.num_vertices(),
        edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| !in_f[i])
            .map(|(_, &(u, v))| (u, inst.global_v(v))),
    );
    let f: Vec<(usize, usize)> = f_idx.iter().map(|&i| edges[i]).collect();
    let mut ws = Workspace::new(inst);
    'subsets: for mask in 0u64..(1u64 << f.len()) {
        let chosen: Vec<(usize, usize)> = (0..f.len()).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect();
        let Some(ctx) = FPrimeContext::new(inst, &chosen) else {
            continue;
        };
        ws.fresh_stamp();
        let mut pairs = chosen.clone();
        for root in 0..inst.num_vertices() {
            if ws.seen[root] == ws.stamp || (root < inst.num_u() && ctx.matched_u[root]) {
                continue;
            }
            if !ws.run(inst, &forest, &ctx, root) {
                continue 'subsets;
            }
            ws.reconstruct(inst, &forest, &ctx, &mut pairs);
        }
        return Ok(Answer::Yes(crate::Matching::new(pairs)));
    }
    Ok(Answer::No)
}

/// Runs the dynamic program on the tree of `forest` containing `root`
/// (global numbering), skipping left vertices already matched by `ctx`.
/// Returns the pairs matched inside that tree when it is feasible.
pub fn tree_dp(inst: &Instance, forest: &Graph, ctx: &FPrimeContext, root: usize) -> Option<Vec<(usize, usize)>> {
    let mut ws = Workspace::new(inst);
    ws.fresh_stamp();
    if !ws.run(inst, forest, ctx, root) {
        return None;
    }
    let mut pairs = Vec::new();
    ws.reconstruct(inst, forest, ctx, &mut pairs);
    Some(pairs)
}

struct Workspace {
    parent: Vec<usize>,
    f: Vec<bool>,
    g: Vec<bool>,
    seen: Vec<u32>,
    stamp: u32,
    /// Preorder of the current tree.
    order: Vec<usize>,
    lo: Vec<usize>,
    hi: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl Workspace {
    fn new(inst: &Instance) -> Self {
        let n = inst.num_vertices();
        Workspace {
            parent: vec![NONE; n],
            f: vec![false; n],
            g: vec![false; n],
            seen: vec![0; n],
            stamp: 0,
            order: Vec::new(),
            lo: vec![0; inst.num_colors()],
            hi: vec![0; inst.num_colors()],
        }
    }

    fn fresh_stamp(&mut self) {
        self.stamp += 1;
    }

    fn children<'g>(&self, forest: &'g Graph, ctx: &'g FPrimeContext, x: usize) -> impl Iterator<Item = usize> + 'g {
        let p = self.parent[x];
        forest
            .neighbors(x)
            .iter()
            .copied()
            .filter(move |&y| y != p && !(y < ctx.matched_u.len() && ctx.matched_u[y]))
    }

    fn run(&mut self, inst: &Instance, forest: &Graph, ctx: &FPrimeContext, root: usize) -> bool {
        let nu = inst.num_u();
        self.order.clear();
        self.parent[root] = NONE;
        self.seen[root] = self.stamp;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            self.order.push(x);
            for &y in forest.neighbors(x) {
                if self.seen[y] == self.stamp || (y < nu && ctx.matched_u[y]) {
                    continue;
                }
                self.seen[y] = self.stamp;
                self.parent[y] = x;
                stack.push(y);
            }
        }
        for i in (0..self.order.len()).rev() {
            let x = self.order[i];
            if x < nu {
                let mut must_down = 0;
                let mut down_ok = NONE;
                let mut any_g = false;
                for y in self.children(forest, ctx, x) {
                    if !self.f[y] {
                        must_down += 1;
                        down_ok = y;
                    }
                    any_g |= self.g[y];
                }
                self.g[x] = must_down == 0;
                self.f[x] = match must_down {
                    0 => any_g,
                    1 => self.g[down_ok],
                    _ => false,
                };
            } else {
                let v = x - nu;
                if !self.load_bounds(inst, forest, ctx, x) {
                    self.f[x] = false;
                    self.g[x] = false;
                    continue;
                }
                self.f[x] = self.spread_ok(inst.threshold(v));
                let p = self.parent[x];
                self.g[x] = p != NONE && {
                    let pc = inst.color(p);
                    self.lo[pc] += 1;
                    self.hi[pc] += 1;
                    self.spread_ok(inst.threshold(v))
                };
            }
        }
        self.f[root]
    }

    /// Fills `lo`/`hi` with the per-color load range of right vertex `x`
    /// ignoring its parent; false if some child can never be matched.
    fn load_bounds(&mut self, inst: &Instance, forest: &Graph, ctx: &FPrimeContext, x: usize) -> bool {
        let nc = inst.num_colors();
        let v = x - inst.num_u();
        self.lo.copy_from_slice(&ctx.m[v * nc..(v + 1) * nc]);
        self.hi.copy_from_slice(&ctx.m[v * nc..(v + 1) * nc]);
        let kids: Vec<usize> = self.children(forest, ctx, x).collect();
        for y in kids {
            let c = inst.color(y);
            match (self.f[y], self.g[y]) {
                (false, false) => return false,
                (false, true) => {
                    self.lo[c] += 1;
                    self.hi[c] += 1;
                }
                (true, true) => self.hi[c] += 1,
                (true, false) => {}
            }
        }
        true
    }

    fn spread_ok(&self, threshold: usize) -> bool {
        let a = self.lo.iter().copied().max().unwrap_or(0);
        let b = self.hi.iter().copied().min().unwrap_or(0);
        a <= b + threshold
    }

    /// Top-down pass choosing one realization of `f(root) = 1`.
    fn reconstruct(&mut self, inst: &Instance, forest: &Graph, ctx: &FPrimeContext, pairs: &mut Vec<(usize, usize)>) {
        let nu = inst.num_u();
        let mut up = vec![false; self.order.len()];
        let mut pos = std::collections::HashMap::with_capacity(self.order.len());
        for (i, &x) in self.order.iter().enumerate() {
            pos.insert(x, i);
        }
        let order = self.order.clone();
        for (i, &x) in order.iter().enumerate() {
            let kids: Vec<usize> = self.children(forest, ctx, x).collect();
            if x < nu {
                if up[i] {
                    continue;
                }
                let pick = kids
                    .iter()
                    .copied()
                    .find(|&y| !self.f[y])
                    .or_else(|| kids.iter().copied().find(|&y| self.g[y]))
                    .expect("f(u) = 1 has a realizing child");
                up[pos[&pick]] = true;
                pairs.push((x, pick - nu));
            } else {
                self.load_bounds(inst, forest, ctx, x);
                if up[i] {
                    let pc = inst.color(self.parent[x]);
                    self.lo[pc] += 1;
                    self.hi[pc] += 1;
                }
                let a = self.lo.iter().copied().max().unwrap_or(0);
                let b = self.hi.iter().copied().min().unwrap_or(0);
                // optional children still to match, per color
                let mut need: Vec<usize> = self.lo.iter().map(|&l| a.min(b).max(l) - l).collect();
                for y in kids {
                    let take = match (self.f[y], self.g[y]) {
                        (false, true) => true,
                        (true, true) if need[inst.color(y)] > 0 => {
                            need[inst.color(y)] -= 1;
                            true
                        }
                        _ => false,
                    };
                    if take {
                        up[pos[&y]] = true;
                        pairs.push((y, x - nu));
                    }
                }
            }
        }
    }
}
