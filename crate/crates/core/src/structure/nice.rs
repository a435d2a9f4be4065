use std::collections::VecDeque;

use crate::graph::Graph;

use super::{StructureError, TreeDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted ascending.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Rooted nice decomposition. Nodes are stored children-first, so a plain
/// index scan is a valid bottom-up order; the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn num_joins(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Join).count()
    }

    /// Checks the node-kind arithmetic, child-first storage and the empty root.
    pub fn validate_shape(&self) -> Result<(), StructureError> {
        let bad = |msg: String| Err(StructureError::InvalidDecomposition(msg));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return bad("root bag is not empty".into());
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                if c >= i {
                    return bad(format!("node {i} has child {c} stored after it"));
                }
                parents[c] += 1;
            }
            let child_bag = |k: usize| &self.nodes[node.children[k]].bag;
            let ok = match node.kind {
                NodeKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NodeKind::Introduce(v) => {
                    node.children.len() == 1
                        && child_bag(0).binary_search(&v).is_err()
                        && with(child_bag(0), v) == node.bag
                }
                NodeKind::Forget(v) => {
                    node.children.len() == 1
                        && node.bag.binary_search(&v).is_err()
                        && with(&node.bag, v) == *child_bag(0)
                }
                NodeKind::Join => node.children.len() == 2 && *child_bag(0) == node.bag && *child_bag(1) == node.bag,
            };
            if !ok {
                return bad(format!("node {i} violates the {:?} rule", node.kind));
            }
        }
        let root = self.root();
        for (i, &p) in parents.iter().enumerate() {
            let expected = usize::from(i != root);
            if p != expected {
                return bad(format!("node {i} has {p} parents"));
            }
        }
        Ok(())
    }

    /// Shape check plus the decomposition axioms against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), StructureError> {
        self.validate_shape()?;
        self.to_tree_decomposition().validate(g)
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let mut tree_edges = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                tree_edges.push((c, i));
            }
        }
        TreeDecomposition {
            bags: self.nodes.iter().map(|n| n.bag.clone()).collect(),
            tree_edges,
        }
    }
}

fn with(bag: &[usize], v: usize) -> Vec<usize> {
    let mut out = bag.to_vec();
    let pos = out.binary_search(&v).unwrap_or_else(|p| p);
    out.insert(pos, v);
    out
}

fn without(bag: &[usize], v: usize) -> Vec<usize> {
    bag.iter().copied().filter(|&x| x != v).collect()
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Rewrites the bag on top of `node` into `target` by forgetting then
    /// introducing one vertex at a time, lowest vertex first.
    fn morph(&mut self, mut node: usize, target: &[usize]) -> usize {
        let current = self.nodes[node].bag.clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            let bag = without(&self.nodes[node].bag, v);
            node = self.push(NodeKind::Forget(v), bag, vec![node]);
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let bag = with(&self.nodes[node].bag, v);
            node = self.push(NodeKind::Introduce(v), bag, vec![node]);
        }
        node
    }
}

/// Converts `td` into a nice decomposition rooted at bag `root_choice`.
///
/// Leaves and the root carry empty bags; several children of one bag are
/// combined by a chain of binary joins.
pub fn make_nice(td: &TreeDecomposition, root_choice: usize) -> Result<NiceTreeDecomposition, StructureError> {
    let nb = td.bags.len();
    if root_choice >= nb {
        return Err(StructureError::InvalidDecomposition(format!(
            "root bag {root_choice} does not exist"
        )));
    }
    if td.tree_edges.len() + 1 != nb {
        return Err(StructureError::InvalidDecomposition("bags do not form a tree".into()));
    }
    let mut adj = vec![Vec::new(); nb];
    for &(a, b) in &td.tree_edges {
        if a >= nb || b >= nb {
            return Err(StructureError::InvalidDecomposition(format!(
                "tree edge ({a}, {b}) references a missing bag"
            )));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut bags: Vec<Vec<usize>> = td.bags.clone();
    for b in &mut bags {
        b.sort_unstable();
        b.dedup();
    }

    let mut parent = vec![usize::MAX; nb];
    let mut order = Vec::with_capacity(nb);
    let mut seen = vec![false; nb];
    seen[root_choice] = true;
    let mut queue = VecDeque::from([root_choice]);
    while let Some(t) = queue.pop_front() {
        order.push(t);
        for &s in &adj[t] {
            if !seen[s] {
                seen[s] = true;
                parent[s] = t;
                queue.push_back(s);
            }
        }
    }
    if order.len() != nb {
        return Err(StructureError::InvalidDecomposition("bags do not form a tree".into()));
    }

    let mut b = Builder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; nb];
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for &t in order.iter().skip(1) {
        kids[parent[t]].push(t);
    }
    for &t in order.iter().rev() {
        let branches: Vec<usize> = if kids[t].is_empty() {
            let leaf = b.push(NodeKind::Leaf, Vec::new(), Vec::new());
            vec![b.morph(leaf, &bags[t])]
        } else {
            kids[t].iter().map(|&c| b.morph(top[c], &bags[t])).collect()
        };
        let mut acc = branches[0];
        for &other in &branches[1..] {
            acc = b.push(NodeKind::Join, bags[t].clone(), vec![acc, other]);
        }
        top[t] = acc;
    }
    b.morph(top[root_choice], &[]);
    Ok(NiceTreeDecomposition { nodes: b.nodes })
}
