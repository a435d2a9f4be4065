//! Max flow (Dinic) and feasible flows with lower bounds.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

/// Residual network; arcs are stored in pairs so `e ^ 1` is the reverse.
#[derive(Debug, Clone)]
pub struct Dinic {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl Dinic {
    pub fn new(n: usize) -> Self {
        Dinic {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
            level: vec![0; n],
            next: vec![0; n],
        }
    }

    /// Returns the arc index; its flow is read back with [`Dinic::flow`].
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    pub fn flow(&self, arc: usize) -> i64 {
        self.arcs[arc ^ 1].cap
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|x| *x = 0);
            loop {
                let f = self.augment(s, t);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|x| *x = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &e in &self.out[x] {
                let a = &self.arcs[e];
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[x] + 1;
                    q.push_back(a.to);
                }
            }
        }
        self.level[t] >= 0
    }

    /// One augmenting path in the level graph, found iteratively.
    fn augment(&mut self, s: usize, t: usize) -> i64 {
        let mut path: Vec<usize> = Vec::new();
        let mut x = s;
        loop {
            if x == t {
                let f = path.iter().map(|&e| self.arcs[e].cap).min().unwrap_or(0);
                for &e in &path {
                    self.arcs[e].cap -= f;
                    self.arcs[e ^ 1].cap += f;
                }
                return f;
            }
            let mut advanced = false;
            while self.next[x] < self.out[x].len() {
                let e = self.out[x][self.next[x]];
                let a = &self.arcs[e];
                if a.cap > 0 && self.level[a.to] == self.level[x] + 1 {
                    path.push(e);
                    x = a.to;
                    advanced = true;
                    break;
                }
                self.next[x] += 1;
            }
            if !advanced {
                // dead end: retreat
                self.level[x] = -1;
                match path.pop() {
                    Some(e) => {
                        x = self.arcs[e ^ 1].to;
                        self.next[x] += 1;
                    }
                    None => return 0,
                }
            }
        }
    }
}

/// Network with `lower <= flow <= upper` on every edge.
#[derive(Debug, Clone, Default)]
pub struct BoundedFlow {
    n: usize,
    edges: Vec<(usize, usize, i64, i64)>,
}

impl BoundedFlow {
    pub fn new(n: usize) -> Self {
        BoundedFlow { n, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, lower: i64, upper: i64) -> usize {
        assert!(0 <= lower && lower <= upper, "bad bounds [{lower}, {upper}]");
        self.edges.push((from, to, lower, upper));
        self.edges.len() - 1
    }

    /// Some feasible `s`-`t` flow (any value), as per-edge flows, or `None`.
    ///
    /// Standard reduction: add `t -> s` with infinite capacity, move every
    /// lower bound into node demands, and saturate those from a super
    /// source to a super sink.
    pub fn feasible(&self, s: usize, t: usize) -> Option<Vec<i64>> {
        let n = self.n;
        let (ss, tt) = (n, n + 1);
        let mut d = Dinic::new(n + 2);
        let mut excess = vec![0i64; n];
        let ids: Vec<usize> = self
            .edges
            .iter()
            .map(|&(a, b, lo, hi)| {
                excess[b] += lo;
                excess[a] -= lo;
                d.add_arc(a, b, hi - lo)
            })
            .collect();
        let inf = self.edges.iter().map(|e| e.3).sum::<i64>() + 1;
        d.add_arc(t, s, inf);
        let mut need = 0;
        for (x, &e) in excess.iter().enumerate() {
            if e > 0 {
                d.add_arc(ss, x, e);
                need += e;
            } else if e < 0 {
                d.add_arc(x, tt, -e);
            }
        }
        if d.max_flow(ss, tt) != need {
            return None;
        }
        Some(ids.iter().zip(&self.edges).map(|(&id, e)| e.2 + d.flow(id)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_max_flow() {
        let mut d = Dinic::new(4);
        d.add_arc(0, 1, 3);
        d.add_arc(0, 2, 2);
        d.add_arc(1, 2, 5);
        d.add_arc(1, 3, 2);
        d.add_arc(2, 3, 3);
        assert_eq!(d.max_flow(0, 3), 5);
    }

    #[test]
    fn lower_bounds_respected() {
        let mut f = BoundedFlow::new(4);
        let a = f.add_edge(0, 1, 0, 5);
        let b = f.add_edge(0, 2, 0, 5);
        let c = f.add_edge(1, 3, 2, 2);
        let d = f.add_edge(2, 3, 3, 4);
        let flow = f.feasible(0, 3).unwrap();
        assert_eq!(flow[c], 2);
        assert!((3..=4).contains(&flow[d]));
        assert_eq!(flow[a], flow[c]);
        assert_eq!(flow[b], flow[d]);
    }

    #[test]
    fn infeasible_lower_bound() {
        let mut f = BoundedFlow::new(3);
        f.add_edge(0, 1, 0, 1);
        f.add_edge(1, 2, 2, 3);
        assert!(f.feasible(0, 2).is_none());
    }
}
