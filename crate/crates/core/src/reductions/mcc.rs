//! Multicolored Clique to fair matching.
//!
//! Parts and positions are 1-based, `(a, i)` being the `i`-th vertex of
//! part `a`. Color `(a, i)` with `i ∈ [0, n]` has index `(a-1)(n+1) + i`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{ColorId, Instance, Matching};

use super::{structural_check, GadgetBuilder, Reduction, ReductionError, StructuralCheck, WitnessBuilder};

/// `ℓ` parts of `n` vertices each; edges join different parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MccInstance {
    l: usize,
    n: usize,
    /// Normalized so the first endpoint has the smaller part.
    edges: BTreeSet<((usize, usize), (usize, usize))>,
}

impl MccInstance {
    pub fn new(
        l: usize,
        n: usize,
        edges: impl IntoIterator<Item = ((usize, usize), (usize, usize))>,
    ) -> Result<Self, ReductionError> {
        if l < 2 || n == 0 {
            return Err(ReductionError::InvalidMcc(format!(
                "need l >= 2 and n >= 1, got l={l}, n={n}"
            )));
        }
        let mut set = BTreeSet::new();
        for (p, q) in edges {
            for (a, i) in [p, q] {
                if !(1..=l).contains(&a) || !(1..=n).contains(&i) {
                    return Err(ReductionError::InvalidMcc(format!("vertex ({a},{i}) out of range")));
                }
            }
            if p.0 == q.0 {
                return Err(ReductionError::InvalidMcc(format!(
                    "edge ({},{})-({},{}) inside one part",
                    p.0, p.1, q.0, q.1
                )));
            }
            set.insert(if p.0 < q.0 { (p, q) } else { (q, p) });
        }
        Ok(MccInstance { l, n, edges: set })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), (usize, usize))> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, p: (usize, usize), q: (usize, usize)) -> bool {
        let key = if p.0 < q.0 { (p, q) } else { (q, p) };
        self.edges.contains(&key)
    }

    /// Whether `clique[a-1]` picks pairwise adjacent vertices.
    pub fn is_clique(&self, clique: &[usize]) -> bool {
        clique.len() == self.l
            && clique.iter().all(|i| (1..=self.n).contains(i))
            && (0..self.l).all(|a| (a + 1..self.l).all(|b| self.has_edge((a + 1, clique[a]), (b + 1, clique[b]))))
    }

    /// Reads lines `a i b j`; `#` starts a comment.
    pub fn parse_edges(l: usize, n: usize, text: &str) -> Result<Self, ReductionError> {
        let mut edges = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| ReductionError::InvalidMcc(format!("line {}: {e}", ln + 1)))?;
            let &[a, i, b, j] = nums.as_slice() else {
                return Err(ReductionError::InvalidMcc(format!(
                    "line {}: expected `a i b j`",
                    ln + 1
                )));
            };
            edges.push(((a, i), (b, j)));
        }
        MccInstance::new(l, n, edges)
    }

    fn color(&self, a: usize, i: usize) -> ColorId {
        (a - 1) * (self.n + 1) + i
    }
}

fn color_name(a: usize, i: usize) -> String {
    format!("({a},{i})")
}

pub fn v0() -> String {
    "v0".into()
}

pub fn v_ab(a: usize, b: usize) -> String {
    format!("v_ab[{a},{b}]")
}

pub fn v_prime(a: usize, i: usize) -> String {
    format!("v'[{a},{i}]")
}

/// Color positions on one side of an edge gadget: `0` and `i+1..=n`.
///
/// The extra position `0` keeps every half nonempty, so that `v_ab` can
/// only collect its single color `(b, 0)` from exactly one gadget.
fn half(i: usize, n: usize) -> impl Iterator<Item = usize> {
    std::iter::once(0).chain(i + 1..=n)
}

fn edge_gadget(a: usize, i: usize, b: usize, j: usize) -> String {
    format!("H[a={a},b={b},i={i},j={j}]")
}

pub fn reduce_mcc(mcc: &MccInstance) -> Instance {
    reduce_mcc_with_provenance(mcc).instance
}

pub fn reduce_mcc_with_provenance(mcc: &MccInstance) -> Reduction {
    let (l, n) = (mcc.l, mcc.n);
    let mut g = GadgetBuilder::new((n + 1) * l);

    g.open("base", "H");
    let v0 = g.v(v0(), 0);
    let mut vab = vec![vec![usize::MAX; l + 1]; l + 1];
    for a in 1..=l {
        for b in (1..=l).filter(|&b| b != a) {
            vab[a][b] = g.v(v_ab(a, b), 0);
        }
    }
    let mut vp = vec![vec![usize::MAX; n + 1]; l + 1];
    for a in 1..=l {
        for i in 1..=n {
            vp[a][i] = g.v(v_prime(a, i), 0);
        }
    }
    for a in 1..=l {
        for i in 1..=n {
            let u = g.u(format!("U_0[{a},{i}]"), mcc.color(a, i));
            g.edge(u, v0);
        }
    }
    for a in 1..=l {
        for i in 1..=n {
            let u = g.u(format!("U_a[{a},{i}]"), mcc.color(a, 0));
            g.edge(u, v0);
            g.edge(u, vp[a][i]);
        }
    }
    for a in 1..=l {
        for b in (1..=l).filter(|&b| b != a) {
            for i in 1..=n {
                for t in 1..=i {
                    let u = g.u(format!("U_abi[{a},{b},{i}].u{}", color_name(b, t)), mcc.color(b, t));
                    g.edge(u, vab[a][b]);
                    g.edge(u, vp[a][i]);
                }
            }
            let colors = (1..=l).filter(|&c| c != b).flat_map(|c| (0..=n).map(move |t| (c, t)));
            for (c, t) in colors {
                let u = g.u(format!("U_ab[{a},{b}].u{}", color_name(c, t)), mcc.color(c, t));
                g.edge(u, vab[a][b]);
            }
        }
    }

    let mut v2s = Vec::new();
    for ((a, i), (b, j)) in mcc.edges() {
        let name = edge_gadget(a, i, b, j);
        g.open("edge", name.clone());
        let v2 = g.v(format!("{name}.v2"), 0);
        for t in half(i, n) {
            let u = g.u(format!("{name}.u_ab{}", color_name(b, t)), mcc.color(b, t));
            g.edge(u, vab[a][b]);
            g.edge(u, v2);
        }
        for t in half(j, n) {
            let u = g.u(format!("{name}.u_ba{}", color_name(a, t)), mcc.color(a, t));
            g.edge(u, v2);
            g.edge(u, vab[b][a]);
        }
        v2s.push(v2);
    }

    for a in 1..=l {
        for i in 1..=n {
            g.missing_colors(vp[a][i], 1);
        }
    }
    for v2 in v2s {
        g.missing_colors(v2, 1);
    }
    g.finish()
}

/// The matching built from a clique given as `clique[a-1] = i_a`.
pub fn mcc_witness(mcc: &MccInstance, clique: &[usize]) -> Result<Matching, ReductionError> {
    if !mcc.is_clique(clique) {
        return Err(ReductionError::NotAClique(clique.to_vec()));
    }
    let (l, n) = (mcc.l, mcc.n);
    let inst = reduce_mcc(mcc);
    let mut w = WitnessBuilder::new(&inst);
    let pick = |a: usize| clique[a - 1];

    for a in 1..=l {
        for i in 1..=n {
            w.pair(&format!("U_0[{a},{i}]"), &v0());
        }
        w.pair(&format!("U_a[{a},{}]", pick(a)), &v0());
        for i in (1..=n).filter(|&i| i != pick(a)) {
            w.take_all(&v_prime(a, i));
        }
    }
    for ((a, i), (b, j)) in mcc.edges() {
        let name = edge_gadget(a, i, b, j);
        if i == pick(a) && j == pick(b) {
            for t in half(i, n) {
                w.pair(&format!("{name}.u_ab{}", color_name(b, t)), &v_ab(a, b));
            }
            for t in half(j, n) {
                w.pair(&format!("{name}.u_ba{}", color_name(a, t)), &v_ab(b, a));
            }
        } else {
            w.take_all(&format!("{name}.v2"));
        }
    }
    for a in 1..=l {
        for b in (1..=l).filter(|&b| b != a) {
            let i = pick(a);
            for t in 1..=i {
                w.pair(&format!("U_abi[{a},{b},{i}].u{}", color_name(b, t)), &v_ab(a, b));
            }
            let target = v_ab(a, b);
            let vab = w.v(&target);
            for &u in inst.v_neighbors(vab) {
                if inst.u_id(u).starts_with(&format!("U_ab[{a},{b}]")) {
                    w.assign[u] = Some(vab);
                }
            }
        }
    }
    Ok(w.finish())
}

/// Parameters of a reduced instance with the `v_ab` vertices deleted.
pub fn check_structure(inst: &Instance) -> StructuralCheck {
    structural_check(inst, |id| id.starts_with("v_ab["))
}
