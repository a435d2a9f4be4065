use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::graph::Graph;
use crate::model::Instance;

use super::{Dsu, StructureError};

/// Graphs up to this many vertices get an optimal-width decomposition.
pub const EXACT_TW_LIMIT: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    MinFill,
    MinDegree,
}

/// Bags over vertices `0..n` connected by an (unrooted) tree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    /// Each bag sorted ascending.
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Largest bag size minus one (0 for decompositions without vertices).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks the tree shape and the three decomposition axioms against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), StructureError> {
        let bad = |msg: String| Err(StructureError::InvalidDecomposition(msg));
        let nb = self.bags.len();
        if nb == 0 {
            return bad("no bags".into());
        }
        if self.tree_edges.len() != nb - 1 {
            return bad(format!("{} bags but {} tree edges", nb, self.tree_edges.len()));
        }
        let mut dsu = Dsu::new(nb);
        for &(a, b) in &self.tree_edges {
            if a >= nb || b >= nb {
                return bad(format!("tree edge ({a}, {b}) references a missing bag"));
            }
            if !dsu.union(a, b) {
                return bad(format!("tree edge ({a}, {b}) closes a cycle"));
            }
        }
        let n = g.n();
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return bad(format!("bag {i} holds unknown vertex {v}"));
                }
                holders[v].push(i);
            }
        }
        for (v, h) in holders.iter().enumerate() {
            if h.is_empty() {
                return bad(format!("vertex {v} is in no bag"));
            }
        }
        for (a, b) in g.edges() {
            let covered = holders[a].iter().any(|&i| self.bags[i].binary_search(&b).is_ok());
            if !covered {
                return bad(format!("edge ({a}, {b}) is in no bag"));
            }
        }
        // bags containing v must induce a connected subtree: count the tree
        // edges with v in both ends, it must be |holders| - 1
        let mut inner = vec![0usize; n];
        for &(a, b) in &self.tree_edges {
            let (ba, bb) = (&self.bags[a], &self.bags[b]);
            for &v in ba {
                if bb.binary_search(&v).is_ok() {
                    inner[v] += 1;
                }
            }
        }
        for v in 0..n {
            if inner[v] + 1 != holders[v].len() {
                return bad(format!("bags containing vertex {v} are not connected"));
            }
        }
        Ok(())
    }

    /// PACE `.td` text. Vertices are written 1-based.
    pub fn to_pace(&self, num_vertices: usize) -> String {
        let mut out = String::new();
        let max_bag = self.bags.iter().map(Vec::len).max().unwrap_or(0);
        writeln!(out, "s td {} {} {}", self.bags.len(), max_bag, num_vertices).unwrap();
        for (i, bag) in self.bags.iter().enumerate() {
            write!(out, "b {}", i + 1).unwrap();
            for v in bag {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        for &(a, b) in &self.tree_edges {
            writeln!(out, "{} {}", a + 1, b + 1).unwrap();
        }
        out
    }

    /// Parses PACE `.td` text; returns the decomposition and the declared
    /// vertex count.
    pub fn from_pace(text: &str) -> Result<(TreeDecomposition, usize), StructureError> {
        let err = |line: usize, msg: &str| StructureError::Pace {
            line,
            msg: msg.to_string(),
        };
        let mut header: Option<(usize, usize)> = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut tree_edges = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let nums = |from: usize| -> Result<Vec<usize>, StructureError> {
                toks[from..]
                    .iter()
                    .map(|t| t.parse::<usize>().map_err(|_| err(ln, "expected an integer")))
                    .collect()
            };
            match toks[0] {
                "s" => {
                    if toks.len() != 5 || toks[1] != "td" {
                        return Err(err(ln, "expected `s td <bags> <max bag> <vertices>`"));
                    }
                    let v = nums(2)?;
                    header = Some((v[0], v[2]));
                    bags = vec![None; v[0]];
                }
                "b" => {
                    let (nb, nv) = header.ok_or_else(|| err(ln, "bag before header"))?;
                    let v = nums(1)?;
                    let id = *v.first().ok_or_else(|| err(ln, "missing bag id"))?;
                    if id == 0 || id > nb {
                        return Err(err(ln, "bag id out of range"));
                    }
                    let mut bag = Vec::with_capacity(v.len() - 1);
                    for &x in &v[1..] {
                        if x == 0 || x > nv {
                            return Err(err(ln, "vertex out of range"));
                        }
                        bag.push(x - 1);
                    }
                    bag.sort_unstable();
                    bag.dedup();
                    bags[id - 1] = Some(bag);
                }
                _ => {
                    let (nb, _) = header.ok_or_else(|| err(ln, "edge before header"))?;
                    let v = nums(0)?;
                    if v.len() != 2 || v[0] == 0 || v[1] == 0 || v[0] > nb || v[1] > nb {
                        return Err(err(ln, "bad tree edge"));
                    }
                    tree_edges.push((v[0] - 1, v[1] - 1));
                }
            }
        }
        let (_, nv) = header.ok_or_else(|| err(0, "missing `s td` header"))?;
        let bags = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| err(0, &format!("bag {} never defined", i + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((TreeDecomposition { bags, tree_edges }, nv))
    }
}

/// Greedy elimination ordering. Ties break towards the lowest vertex.
///
/// Fill-in counts are maintained incrementally, so sparse graphs with
/// thousands of vertices are cheap.
pub fn elimination_order(g: &Graph, heuristic: Heuristic) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut score: Vec<usize> = (0..n)
        .map(|v| match heuristic {
            Heuristic::MinFill => fill_in(&adj, v),
            Heuristic::MinDegree => adj[v].len(),
        })
        .collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (score[v], v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    let mut delta: HashMap<usize, isize> = HashMap::new();

    while let Some((_, v)) = queue.pop_first() {
        order.push(v);
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        touched.clear();
        delta.clear();
        if heuristic == Heuristic::MinFill {
            // v leaves every neighbor's neighborhood
            for &w in &nbrs {
                let lost = adj[w].iter().filter(|&&x| x != v && !adj[v].contains(&x)).count();
                *delta.entry(w).or_default() -= lost as isize;
            }
        }
        for &w in &nbrs {
            adj[w].remove(&v);
            touched.insert(w);
        }
        adj[v].clear();
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                let (a, b) = (nbrs[i], nbrs[j]);
                if adj[a].contains(&b) {
                    continue;
                }
                if heuristic == Heuristic::MinFill {
                    let (small, large) = if adj[a].len() <= adj[b].len() { (a, b) } else { (b, a) };
                    let common: Vec<usize> = adj[small].iter().copied().filter(|x| adj[large].contains(x)).collect();
                    for w in common {
                        *delta.entry(w).or_default() -= 1;
                        touched.insert(w);
                    }
                    let gain_a = adj[a].iter().filter(|&&x| !adj[b].contains(&x)).count();
                    let gain_b = adj[b].iter().filter(|&&x| !adj[a].contains(&x)).count();
                    *delta.entry(a).or_default() += gain_a as isize;
                    *delta.entry(b).or_default() += gain_b as isize;
                }
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &w in &touched {
            let new = match heuristic {
                Heuristic::MinFill => (score[w] as isize + delta.get(&w).copied().unwrap_or(0)) as usize,
                Heuristic::MinDegree => adj[w].len(),
            };
            if new != score[w] {
                queue.remove(&(score[w], w));
                score[w] = new;
                queue.insert((new, w));
            }
        }
    }
    order
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let ns: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for i in 0..ns.len() {
        for j in i + 1..ns.len() {
            if !adj[ns[i]].contains(&ns[j]) {
                missing += 1;
            }
        }
    }
    missing
}

/// Width of the decomposition induced by eliminating in `order`.
pub fn order_width(g: &Graph, order: &[usize]) -> usize {
    decomposition_from_order(g, order).width()
}

/// Builds the decomposition of an elimination ordering: the bag of `v` is
/// `v` plus its later neighbors in the filled graph, hung below the bag of
/// the earliest of those neighbors.
pub fn decomposition_from_order(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    assert_eq!(order.len(), n, "ordering must cover every vertex");
    if n == 0 {
        return TreeDecomposition {
            bags: vec![Vec::new()],
            tree_edges: Vec::new(),
        };
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut tree_edges = Vec::with_capacity(n);
    let mut roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag = later.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        match later.iter().map(|&w| pos[w]).min() {
            Some(p) => tree_edges.push((i, p)),
            None => roots.push(i),
        }
        for &w in &later {
            adj[w].remove(&v);
        }
        for a in 0..later.len() {
            for b in a + 1..later.len() {
                adj[later[a]].insert(later[b]);
                adj[later[b]].insert(later[a]);
            }
        }
    }
    // components end in separate roots; chain them, they share no vertex
    for w in roots.windows(2) {
        tree_edges.push((w[0], w[1]));
    }
    TreeDecomposition { bags, tree_edges }
}

/// Optimal elimination ordering by branch-and-bound over eliminated sets,
/// seeded with the min-fill bound. `None` above [`EXACT_TW_LIMIT`] vertices.
pub fn exact_elimination_order(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    if n > EXACT_TW_LIMIT {
        return None;
    }
    let seed = elimination_order(g, Heuristic::MinFill);
    let mut search = ExactSearch {
        g,
        best: order_width(g, &seed),
        best_order: seed,
        memo: HashMap::new(),
        prefix: Vec::with_capacity(n),
    };
    search.dfs(0, 0);
    Some(search.best_order)
}

struct ExactSearch<'a> {
    g: &'a Graph,
    best: usize,
    best_order: Vec<usize>,
    memo: HashMap<u32, usize>,
    prefix: Vec<usize>,
}

impl ExactSearch<'_> {
    fn dfs(&mut self, eliminated: u32, cur: usize) {
        let n = self.g.n();
        if cur >= self.best {
            return;
        }
        if self.prefix.len() == n {
            self.best = cur;
            self.best_order = self.prefix.clone();
            return;
        }
        match self.memo.get(&eliminated) {
            Some(&seen) if seen <= cur => return,
            _ => {
                self.memo.insert(eliminated, cur);
            }
        }
        for v in 0..n {
            if eliminated >> v & 1 == 1 {
                continue;
            }
            let deg = self.eliminated_degree(eliminated, v);
            self.prefix.push(v);
            self.dfs(eliminated | 1 << v, cur.max(deg));
            self.prefix.pop();
        }
    }

    /// Number of uneliminated vertices reachable from `v` through eliminated ones.
    fn eliminated_degree(&self, eliminated: u32, v: usize) -> usize {
        let mut seen: u32 = 1 << v;
        let mut queue = VecDeque::from([v]);
        let mut count = 0;
        while let Some(x) = queue.pop_front() {
            for &y in self.g.neighbors(x) {
                if seen >> y & 1 == 1 {
                    continue;
                }
                seen |= 1 << y;
                if eliminated >> y & 1 == 1 {
                    queue.push_back(y);
                } else {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Exact for small graphs, min-fill otherwise.
pub fn graph_tree_decomposition(g: &Graph) -> TreeDecomposition {
    let order = exact_elimination_order(g).unwrap_or_else(|| elimination_order(g, Heuristic::MinFill));
    decomposition_from_order(g, &order)
}

/// Decomposition of the instance graph in the global vertex numbering.
pub fn tree_decomposition(inst: &Instance) -> TreeDecomposition {
    graph_tree_decomposition(&inst.graph())
}
