use std::collections::HashMap;

use crate::graph::Graph;

use super::StructureError;

/// Default vertex limit for exact tree-depth.
pub const EXACT_TD_LIMIT: usize = 20;

/// A rooted elimination forest and its height (number of vertices on the
/// longest root-to-leaf path).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreedepthResult {
    pub depth: usize,
    pub parent: Vec<Option<usize>>,
}

/// Height of the forest given by `parent`, or `None` if it has a cycle.
pub fn elimination_forest_depth(parent: &[Option<usize>]) -> Option<usize> {
    let n = parent.len();
    let mut depth = vec![0usize; n];
    let mut best = 0;
    for s in 0..n {
        let mut path = Vec::new();
        let mut x = s;
        while depth[x] == 0 {
            path.push(x);
            if path.len() > n {
                return None;
            }
            match parent[x] {
                Some(p) if p < n => x = p,
                Some(_) => return None,
                None => break,
            }
        }
        let mut d = if depth[x] == 0 { 0 } else { depth[x] };
        for &y in path.iter().rev() {
            d += 1;
            depth[y] = d;
        }
        best = best.max(depth[s]);
    }
    Some(best)
}

/// True when `parent` is a forest on the vertices of `g` and every edge
/// joins an ancestor with a descendant.
pub fn is_elimination_forest(g: &Graph, parent: &[Option<usize>]) -> bool {
    if parent.len() != g.n() || elimination_forest_depth(parent).is_none() {
        return false;
    }
    let is_ancestor = |a: usize, mut d: usize| {
        while let Some(p) = parent[d] {
            if p == a {
                return true;
            }
            d = p;
        }
        false
    };
    g.edges().all(|(a, b)| is_ancestor(a, b) || is_ancestor(b, a))
}

fn mask_components(g: &Graph, mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        let s = rest.trailing_zeros() as usize;
        let mut comp = 1u64 << s;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                let bit = 1u64 << y;
                if mask & bit != 0 && comp & bit == 0 {
                    comp |= bit;
                    stack.push(y);
                }
            }
        }
        rest &= !comp;
        out.push(comp);
    }
    out
}

struct Exact<'a> {
    g: &'a Graph,
    /// Connected vertex set → (tree-depth, best root).
    memo: HashMap<u64, (usize, usize)>,
}

impl Exact<'_> {
    fn connected(&mut self, mask: u64) -> usize {
        let size = mask.count_ones() as usize;
        if size == 1 {
            return 1;
        }
        if let Some(&(d, _)) = self.memo.get(&mask) {
            return d;
        }
        let g = self.g;
        let mut verts: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
        let inner_degree = |v: usize| g.neighbors(v).iter().filter(|&&w| mask >> w & 1 == 1).count();
        if verts.iter().all(|&v| inner_degree(v) == size - 1) {
            self.memo.insert(mask, (size, verts[0]));
            return size;
        }
        verts.sort_by_key(|&v| (std::cmp::Reverse(inner_degree(v)), v));
        let floor = (usize::BITS - size.leading_zeros()) as usize;
        let mut best = (size, verts[0]);
        for &v in &verts {
            let mut worst = 0;
            for comp in mask_components(g, mask & !(1u64 << v)) {
                worst = worst.max(self.connected(comp));
                if worst + 1 >= best.0 {
                    break;
                }
            }
            if worst + 1 < best.0 {
                best = (worst + 1, v);
                if best.0 <= floor {
                    break;
                }
            }
        }
        self.memo.insert(mask, best);
        best.0
    }

    fn build(&mut self, mask: u64, above: Option<usize>, parent: &mut [Option<usize>]) {
        let mut stack = vec![(mask, above)];
        while let Some((m, up)) = stack.pop() {
            for comp in mask_components(self.g, m) {
                let root = if comp.count_ones() == 1 {
                    comp.trailing_zeros() as usize
                } else {
                    self.connected(comp);
                    self.memo[&comp].1
                };
                parent[root] = up;
                stack.push((comp & !(1u64 << root), Some(root)));
            }
        }
    }
}

/// Exact tree-depth with an optimal elimination forest, for graphs with at
/// most `limit` (≤ 64) vertices.
pub fn treedepth_exact(g: &Graph, limit: usize) -> Result<TreedepthResult, StructureError> {
    let n = g.n();
    let limit = limit.min(64);
    if n > limit {
        return Err(StructureError::TooLarge { n, limit });
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut ex = Exact {
        g,
        memo: HashMap::new(),
    };
    let depth = mask_components(g, full)
        .into_iter()
        .map(|c| ex.connected(c))
        .max()
        .unwrap_or(0);
    let mut parent = vec![None; n];
    ex.build(full, None, &mut parent);
    Ok(TreedepthResult { depth, parent })
}

/// Exact tree-depth for graphs up to [`EXACT_TD_LIMIT`] vertices.
pub fn treedepth_exact_small(g: &Graph) -> Result<usize, StructureError> {
    treedepth_exact(g, EXACT_TD_LIMIT).map(|r| r.depth)
}

/// Heuristic elimination forest: repeatedly removes, from every remaining
/// component, a vertex that leaves the smallest largest component. Large
/// components use the centroid of a DFS spanning tree instead of trying
/// every vertex.
pub fn treedepth_upper(g: &Graph) -> TreedepthResult {
    const TRY_ALL: usize = 64;
    let n = g.n();
    let mut parent = vec![None; n];
    let mut alive = vec![true; n];
    let mut stack: Vec<(Vec<usize>, Option<usize>)> = Vec::new();
    for comp in g.components() {
        stack.push((comp, None));
    }
    let mut label = vec![usize::MAX; n];
    let mut stamp = 0usize;
    while let Some((comp, up)) = stack.pop() {
        let root = if comp.len() == 1 {
            comp[0]
        } else if comp.len() <= TRY_ALL {
            let mut best = (usize::MAX, comp[0]);
            for &v in &comp {
                alive[v] = false;
                let worst = pieces(g, &comp, &alive, &mut label, &mut stamp)
                    .iter()
                    .map(Vec::len)
                    .max()
                    .unwrap_or(0);
                alive[v] = true;
                if worst < best.0 {
                    best = (worst, v);
                }
            }
            best.1
        } else {
            spanning_centroid(g, &comp, &alive)
        };
        parent[root] = up;
        alive[root] = false;
        for piece in pieces(g, &comp, &alive, &mut label, &mut stamp) {
            stack.push((piece, Some(root)));
        }
    }
    let depth = elimination_forest_depth(&parent).expect("forest by construction");
    TreedepthResult { depth, parent }
}

/// Components of the alive part of `comp`.
fn pieces(g: &Graph, comp: &[usize], alive: &[bool], label: &mut [usize], stamp: &mut usize) -> Vec<Vec<usize>> {
    *stamp += 1;
    let mut out = Vec::new();
    for &s in comp {
        if !alive[s] || label[s] == *stamp {
            continue;
        }
        label[s] = *stamp;
        let mut piece = vec![s];
        let mut i = 0;
        while i < piece.len() {
            let x = piece[i];
            i += 1;
            for &y in g.neighbors(x) {
                if alive[y] && label[y] != *stamp {
                    label[y] = *stamp;
                    piece.push(y);
                }
            }
        }
        out.push(piece);
    }
    out
}

fn spanning_centroid(g: &Graph, comp: &[usize], alive: &[bool]) -> usize {
    let mut pos: HashMap<usize, usize> = HashMap::with_capacity(comp.len());
    for (i, &v) in comp.iter().enumerate() {
        pos.insert(v, i);
    }
    let k = comp.len();
    let mut tparent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut seen = vec![false; k];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        order.push(i);
        for &y in g.neighbors(comp[i]) {
            if !alive[y] {
                continue;
            }
            if let Some(&j) = pos.get(&y) {
                if !seen[j] {
                    seen[j] = true;
                    tparent[j] = i;
                    stack.push(j);
                }
            }
        }
    }
    let mut size = vec![1usize; k];
    let mut heaviest_child = vec![0usize; k];
    for &i in order.iter().rev() {
        if tparent[i] != usize::MAX {
            let p = tparent[i];
            size[p] += size[i];
            heaviest_child[p] = heaviest_child[p].max(size[i]);
        }
    }
    let best = (0..k).min_by_key(|&i| (heaviest_child[i].max(k - size[i]), i)).unwrap();
    comp[best]
}
