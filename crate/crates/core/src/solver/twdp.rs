//! Dynamic program over a nice tree decomposition, parameterized by
//! treewidth and the maximum right degree.
//!
//! A state at node `t` records, for every left vertex `u` in the bag,
//! whether it is still unmatched, matched to an already forgotten right
//! vertex (`Out`), or matched to a right vertex `v` of the bag; and, for
//! every right vertex of the bag and every color, how many forgotten left
//! vertices of that color are matched to it. Tables are built child to
//! parent and store only reachable states, each with a backpointer.

use std::collections::HashMap;

use crate::model::{Instance, Matching};
use crate::structure::{make_nice, tree_decomposition, NiceTreeDecomposition, NodeKind};
use crate::verify::is_fair;
use crate::Answer;

use super::SolverError;

const UNMATCHED: u32 = u32::MAX;
const OUT: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Unmatched,
    Out,
    /// Matched to this right vertex (global numbering) of the bag.
    To(usize),
}

/// Decoded state: `x` follows the bag's left vertices in ascending order,
/// `y[i][c]` the bag's right vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BagState {
    pub x: Vec<Slot>,
    pub y: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Back {
    Leaf,
    One(usize),
    Two(usize, usize),
}

/// Reachable states of one node. A state is `x` (one entry per bag left
/// vertex) followed by `y` (`num_colors` entries per bag right vertex).
#[derive(Debug, Clone)]
pub struct DpTable {
    pub bag: Vec<usize>,
    num_bag_u: usize,
    states: Vec<Vec<u32>>,
    back: Vec<Back>,
    index: HashMap<Vec<u32>, usize>,
}

impl DpTable {
    fn new(inst: &Instance, bag: Vec<usize>) -> Self {
        let num_bag_u = bag.iter().filter(|&&w| w < inst.num_u()).count();
        DpTable {
            bag,
            num_bag_u,
            states: Vec::new(),
            back: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// The table of a leaf: just the empty state.
    pub fn leaf(inst: &Instance) -> Self {
        let mut t = DpTable::new(inst, Vec::new());
        t.insert(Vec::new(), Back::Leaf);
        t
    }

    fn insert(&mut self, key: Vec<u32>, back: Back) {
        if !self.index.contains_key(&key) {
            self.index.insert(key.clone(), self.states.len());
            self.states.push(key);
            self.back.push(back);
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn bag_u(&self) -> &[usize] {
        &self.bag[..self.num_bag_u]
    }

    fn bag_v(&self) -> &[usize] {
        &self.bag[self.num_bag_u..]
    }

    pub fn decode(&self, nc: usize) -> Vec<BagState> {
        self.states
            .iter()
            .map(|s| BagState {
                x: s[..self.num_bag_u]
                    .iter()
                    .map(|&a| match a {
                        UNMATCHED => Slot::Unmatched,
                        OUT => Slot::Out,
                        v => Slot::To(v as usize),
                    })
                    .collect(),
                y: s[self.num_bag_u..]
                    .chunks(nc.max(1))
                    .map(|ch| ch.iter().map(|&a| a as usize).collect())
                    .collect(),
            })
            .collect()
    }

    pub fn contains(&self, st: &BagState) -> bool {
        let mut key: Vec<u32> =
            st.x.iter()
                .map(|s| match s {
                    Slot::Unmatched => UNMATCHED,
                    Slot::Out => OUT,
                    Slot::To(v) => *v as u32,
                })
                .collect();
        key.extend(st.y.iter().flatten().map(|&a| a as u32));
        self.index.contains_key(&key)
    }

    /// Drops the lookup index once the table is final.
    fn seal(&mut self) {
        self.index = HashMap::new();
    }
}

fn with_inserted(bag: &[usize], w: usize) -> Vec<usize> {
    let mut b = bag.to_vec();
    let p = b.binary_search(&w).unwrap_err();
    b.insert(p, w);
    b
}

/// Adds `w` to the bag of `child`.
///
/// A left `w` starts unmatched or matched to any adjacent right vertex of
/// the bag. A right `w` starts with zero counts, and any subset of the
/// unmatched adjacent left vertices of the bag may be matched to it.
pub fn transition_introduce(inst: &Instance, child: &DpTable, w: usize) -> DpTable {
    let nu = inst.num_u();
    let nc = inst.num_colors();
    let mut t = DpTable::new(inst, with_inserted(&child.bag, w));
    if w < nu {
        let p = child.bag_u().binary_search(&w).unwrap_err();
        let options: Vec<u32> = std::iter::once(UNMATCHED)
            .chain(
                child
                    .bag_v()
                    .iter()
                    .filter(|&&v| inst.has_edge(w, v - nu))
                    .map(|&v| v as u32),
            )
            .collect();
        for (i, s) in child.states.iter().enumerate() {
            for &o in &options {
                let mut key = s.clone();
                key.insert(p, o);
                t.insert(key, Back::One(i));
            }
        }
    } else {
        let p = child.bag_v().binary_search(&w).unwrap_err();
        let at = child.num_bag_u + p * nc;
        let candidates: Vec<usize> = (0..child.num_bag_u)
            .filter(|&i| inst.has_edge(child.bag[i], w - nu))
            .collect();
        for (i, s) in child.states.iter().enumerate() {
            let free: Vec<usize> = candidates.iter().copied().filter(|&j| s[j] == UNMATCHED).collect();
            let mut base = s.clone();
            base.splice(at..at, std::iter::repeat_n(0, nc));
            for mask in 0u64..(1u64 << free.len()) {
                let mut key = base.clone();
                for (b, &j) in free.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        key[j] = w as u32;
                    }
                }
                t.insert(key, Back::One(i));
            }
        }
    }
    t
}

/// Removes `w` from the bag of `child`.
///
/// A left `w` must be matched by now; if matched to a bag vertex `v` it
/// moves into `v`'s counts. A right `w` must be fair counting both its
/// forgotten partners and the bag vertices matched to it; those bag
/// vertices become `Out`.
pub fn transition_forget(inst: &Instance, child: &DpTable, w: usize) -> DpTable {
    let nu = inst.num_u();
    let nc = inst.num_colors();
    let bag: Vec<usize> = child.bag.iter().copied().filter(|&x| x != w).collect();
    let mut t = DpTable::new(inst, bag);
    if w < nu {
        let p = child.bag_u().binary_search(&w).expect("w in bag");
        let col = inst.color(w);
        for (i, s) in child.states.iter().enumerate() {
            let mut key = s.clone();
            let xv = key.remove(p);
            match xv {
                UNMATCHED => continue,
                OUT => {}
                v => {
                    let q = child.bag_v().binary_search(&(v as usize)).expect("partner in bag");
                    key[t.num_bag_u + q * nc + col] += 1;
                }
            }
            t.insert(key, Back::One(i));
        }
    } else {
        let p = child.bag_v().binary_search(&w).expect("w in bag");
        let at = child.num_bag_u + p * nc;
        let mut counts = vec![0usize; nc];
        for (i, s) in child.states.iter().enumerate() {
            for (c, slot) in counts.iter_mut().enumerate() {
                *slot = s[at + c] as usize;
            }
            for j in 0..child.num_bag_u {
                if s[j] == w as u32 {
                    counts[inst.color(child.bag[j])] += 1;
                }
            }
            if !is_fair(&counts, inst.threshold(w - nu)) {
                continue;
            }
            let mut key = s.clone();
            key.drain(at..at + nc);
            for a in key.iter_mut().take(child.num_bag_u) {
                if *a == w as u32 {
                    *a = OUT;
                }
            }
            t.insert(key, Back::One(i));
        }
    }
    t
}

/// Merges two tables over the same bag: left vertices agree except that
/// one side may have `Out` where the other has `Unmatched`, and counts add.
pub fn transition_join(inst: &Instance, left: &DpTable, right: &DpTable) -> DpTable {
    assert_eq!(left.bag, right.bag, "join needs equal bags");
    let k = left.num_bag_u;
    let collapse = |s: &[u32]| -> Vec<u32> { s[..k].iter().map(|&a| if a == OUT { UNMATCHED } else { a }).collect() };
    let mut by_key: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for (j, s) in right.states.iter().enumerate() {
        by_key.entry(collapse(s)).or_default().push(j);
    }
    let mut t = DpTable::new(inst, left.bag.clone());
    for (i, a) in left.states.iter().enumerate() {
        let Some(partners) = by_key.get(&collapse(a)) else {
            continue;
        };
        for &j in partners {
            let b = &right.states[j];
            if (0..k).any(|p| a[p] == OUT && b[p] == OUT) {
                continue;
            }
            let mut key: Vec<u32> = (0..k).map(|p| if b[p] == OUT { OUT } else { a[p] }).collect();
            key.extend(a[k..].iter().zip(&b[k..]).map(|(x, y)| x + y));
            t.insert(key, Back::Two(i, j));
        }
    }
    t
}

/// `(|V_t| + 2)^{|U_t|} * prod_{v in V_t} prod_c (|N_c(v)| + 1)`, saturating.
fn state_cap(inst: &Instance, table: &DpTable) -> u128 {
    let nu = inst.num_u();
    let bv = table.bag_v();
    let mut cap = (bv.len() as u128 + 2).saturating_pow(table.num_bag_u as u32);
    for &v in bv {
        for c in 0..inst.num_colors() {
            cap = cap.saturating_mul(inst.color_degree(v - nu, c) as u128 + 1);
        }
    }
    cap
}

/// Decides the instance on the given nice decomposition of its graph.
pub fn solve_twdp(inst: &Instance, ntd: &NiceTreeDecomposition) -> Result<Answer, SolverError> {
    ntd.validate(&inst.graph())?;
    let mut tables: Vec<DpTable> = Vec::with_capacity(ntd.nodes.len());
    for node in &ntd.nodes {
        let mut t = match node.kind {
            NodeKind::Leaf => DpTable::leaf(inst),
            NodeKind::Introduce(w) => transition_introduce(inst, &tables[node.children[0]], w),
            NodeKind::Forget(w) => transition_forget(inst, &tables[node.children[0]], w),
            NodeKind::Join => transition_join(inst, &tables[node.children[0]], &tables[node.children[1]]),
        };
        let cap = state_cap(inst, &t);
        if t.len() as u128 > cap {
            return Err(SolverError::StateCap { states: t.len(), cap });
        }
        t.seal();
        tables.push(t);
    }
    let root = ntd.root();
    if tables[root].is_empty() {
        return Ok(Answer::No);
    }
    Ok(Answer::Yes(reconstruct(inst, ntd, &tables)))
}

/// Builds a decomposition (exact for tiny graphs, min-fill otherwise),
/// makes it nice at bag 0 and runs the dynamic program.
pub fn solve_twdp_auto(inst: &Instance) -> Result<Answer, SolverError> {
    let td = tree_decomposition(inst);
    let ntd = make_nice(&td, 0)?;
    solve_twdp(inst, &ntd)
}

fn reconstruct(inst: &Instance, ntd: &NiceTreeDecomposition, tables: &[DpTable]) -> Matching {
    let nu = inst.num_u();
    let mut pairs = Vec::with_capacity(nu);
    let mut stack = vec![(ntd.root(), 0usize)];
    while let Some((t, s)) = stack.pop() {
        let node = &ntd.nodes[t];
        match tables[t].back[s] {
            Back::Leaf => {}
            Back::One(cs) => {
                let c = node.children[0];
                if let NodeKind::Forget(w) = node.kind {
                    let child = &tables[c];
                    let st = &child.states[cs];
                    if w < nu {
                        let p = child.bag_u().binary_search(&w).unwrap();
                        if st[p] != OUT {
                            pairs.push((w, st[p] as usize - nu));
                        }
                    } else {
                        for j in 0..child.num_bag_u {
                            if st[j] == w as u32 {
                                pairs.push((child.bag[j], w - nu));
                            }
                        }
                    }
                }
                stack.push((c, cs));
            }
            Back::Two(a, b) => {
                stack.push((node.children[0], a));
                stack.push((node.children[1], b));
            }
        }
    }
    Matching::new(pairs)
}
