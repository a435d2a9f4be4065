//! Solver parameterized by neighborhood diversity.
//!
//! Right vertices with identical neighborhoods are contracted into one
//! vertex whose threshold is the sum of theirs. The contracted instance has
//! at most `nd` right vertices and is solved by the small-`|V|` solver; its
//! matching is then split back over the class members.

use serde::Serialize;

use crate::model::{Instance, InstanceBuilder, Matching, Side};
use crate::structure::twin_partition;
use crate::verify::{is_fair, verify_matching};
use crate::Answer;

use super::smallk::{solve_smallk_with_limit, MAX_K};
use super::SolverError;

#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub reduced: Instance,
    /// Reduced left index → original left index.
    pub u_map: Vec<usize>,
    /// Reduced right index → original right index.
    pub v_map: Vec<usize>,
    /// Pairs (original indices) from `K2` components that are fair on their own.
    pub forced: Vec<(usize, usize)>,
    pub early_no: bool,
}

/// Drops isolated right vertices and `K2` components, recording the latter
/// as forced pairs when fair. An isolated left vertex, or an unfair `K2`,
/// sets `early_no`.
pub fn preprocess(inst: &Instance) -> Preprocessed {
    let mut forced = Vec::new();
    let mut early_no = false;
    let mut keep_u = vec![true; inst.num_u()];
    let mut keep_v = vec![true; inst.num_v()];
    for u in 0..inst.num_u() {
        match inst.u_neighbors(u) {
            [] => early_no = true,
            &[v] if inst.v_neighbors(v).len() == 1 => {
                if k2_fair(inst.num_colors(), inst.threshold(v)) {
                    forced.push((u, v));
                } else {
                    early_no = true;
                }
                keep_u[u] = false;
                keep_v[v] = false;
            }
            _ => {}
        }
    }
    for v in 0..inst.num_v() {
        if inst.v_neighbors(v).is_empty() {
            keep_v[v] = false;
        }
    }
    let u_map: Vec<usize> = (0..inst.num_u()).filter(|&u| keep_u[u]).collect();
    let v_map: Vec<usize> = (0..inst.num_v()).filter(|&v| keep_v[v]).collect();
    let mut b = InstanceBuilder::new(inst.num_colors());
    for &u in &u_map {
        b.add_u(inst.u_id(u), inst.color(u));
    }
    let mut v_new = vec![usize::MAX; inst.num_v()];
    for &v in &v_map {
        v_new[v] = b.add_v(inst.v_id(v), inst.threshold(v));
    }
    for (nu, &u) in u_map.iter().enumerate() {
        for &v in inst.u_neighbors(u) {
            if keep_v[v] {
                b.add_edge(nu, v_new[v]);
            }
        }
    }
    Preprocessed {
        reduced: b.build().expect("subinstance of a valid instance"),
        u_map,
        v_map,
        forced,
        early_no,
    }
}

/// The contracted instance; `U` is unchanged.
#[derive(Debug, Clone)]
pub struct QuotientInstance {
    pub inner: Instance,
    /// Per class, its members as `(v, L(v))` ordered by descending `L`
    /// (ties by index).
    pub mapping: Vec<Vec<(usize, usize)>>,
}

#[derive(Serialize)]
struct MappingEntry<'a> {
    class: &'a str,
    members: Vec<(&'a str, usize)>,
}

impl QuotientInstance {
    /// Mapping as JSON with class and member ids, `members` as `[id, L]`.
    pub fn mapping_json(&self, original: &Instance) -> serde_json::Value {
        let entries: Vec<MappingEntry> = self
            .mapping
            .iter()
            .enumerate()
            .map(|(i, ms)| MappingEntry {
                class: self.inner.v_id(i),
                members: ms.iter().map(|&(v, l)| (original.v_id(v), l)).collect(),
            })
            .collect();
        serde_json::to_value(entries).expect("plain data")
    }
}

/// Contracts the right twin classes of a preprocessed instance.
pub fn build_quotient(inst: &Instance) -> Result<QuotientInstance, SolverError> {
    let part = twin_partition(inst)?;
    let mut b = InstanceBuilder::new(inst.num_colors());
    for u in 0..inst.num_u() {
        b.add_u(inst.u_id(u), inst.color(u));
    }
    let mut mapping = Vec::new();
    for (i, class) in part.v_classes().enumerate() {
        let mut members: Vec<(usize, usize)> = class.members.iter().map(|&v| (v, inst.threshold(v))).collect();
        members.sort_by_key(|&(v, l)| (std::cmp::Reverse(l), v));
        let total = members.iter().map(|m| m.1).sum();
        let id = format!("class[{i}]:{}", inst.v_id(class.members[0]));
        let qv = b.add_v(id, total);
        for &u in inst.v_neighbors(class.members[0]) {
            b.add_edge(u, qv);
        }
        mapping.push(members);
    }
    debug_assert!(part.u_classes().all(|c| c.side == Side::U));
    Ok(QuotientInstance {
        inner: b.build().expect("quotient of a valid instance"),
        mapping,
    })
}

/// Splits a fair matching of the quotient over the class members.
///
/// Per class with total threshold `L' > 0` and color count `L' q_c + r_c`,
/// member `j` (threshold `l_j`) receives `q_c l_j + r^j_c` vertices of color
/// `c`, where the `r^j_c` fill `l_1, l_2, ...` greedily up to `r_c`. With
/// `L' = 0` every color has the same count, which is shared out equally.
/// Within a color the lowest-index vertices go to the first members.
pub fn expand_matching(q: &QuotientInstance, m: &Matching) -> Result<Matching, SolverError> {
    let report = verify_matching(&q.inner, m);
    if !report.overall {
        let why = report
            .issues
            .first()
            .map(ToString::to_string)
            .or_else(|| {
                report
                    .per_v
                    .iter()
                    .find(|p| !p.fair)
                    .map(|p| format!("{} is unfair", p.id))
            })
            .unwrap_or_default();
        return Err(SolverError::UnfairQuotient(why));
    }
    let inst = &q.inner;
    let nc = inst.num_colors();
    let mut by_class: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); nc]; inst.num_v()];
    for &(u, v) in &m.pairs {
        by_class[v][inst.color(u)].push(u);
    }
    let mut pairs = Vec::with_capacity(m.len());
    for (i, members) in q.mapping.iter().enumerate() {
        let total = inst.threshold(i);
        let s = members.len();
        for us in &mut by_class[i] {
            us.sort_unstable();
            let count = us.len();
            let shares: Vec<usize> = match count.checked_div(total) {
                None => (0..s).map(|j| count / s + usize::from(j < count % s)).collect(),
                Some(qc) => {
                    let mut rc = count % total;
                    members
                        .iter()
                        .map(|&(_, l)| {
                            let r = rc.min(l);
                            rc -= r;
                            qc * l + r
                        })
                        .collect()
                }
            };
            let mut it = us.iter();
            for (j, &share) in shares.iter().enumerate() {
                for &u in it.by_ref().take(share) {
                    pairs.push((u, members[j].0));
                }
            }
        }
    }
    Ok(Matching::new(pairs))
}

pub fn solve_nd(inst: &Instance) -> Result<Answer, SolverError> {
    solve_nd_with_limit(inst, MAX_K)
}

/// Refuses instances with more than `max_classes` right twin classes.
pub fn solve_nd_with_limit(inst: &Instance, max_classes: usize) -> Result<Answer, SolverError> {
    let pre = preprocess(inst);
    if pre.early_no {
        return Ok(Answer::No);
    }
    let q = build_quotient(&pre.reduced)?;
    let Answer::Yes(qm) = solve_smallk_with_limit(&q.inner, max_classes)? else {
        return Ok(Answer::No);
    };
    let local = expand_matching(&q, &qm)?;
    let mut pairs = pre.forced.clone();
    pairs.extend(local.pairs.iter().map(|&(u, v)| (pre.u_map[u], pre.v_map[v])));
    let out = Matching::new(pairs);
    debug_assert!(verify_matching(inst, &out).overall);
    Ok(Answer::Yes(out))
}

/// Number of right twin classes after preprocessing, the size of the
/// quotient the solver would build.
pub fn quotient_size(inst: &Instance) -> usize {
    let pre = preprocess(inst);
    let r = &pre.reduced;
    (0..r.num_v())
        .map(|v| r.v_neighbors(v))
        .collect::<std::collections::HashSet<_>>()
        .len()
}

/// Whether one matched vertex, all other colors empty, is within `threshold`.
fn k2_fair(num_colors: usize, threshold: usize) -> bool {
    let mut h = vec![0; num_colors];
    h[0] = 1;
    is_fair(&h, threshold)
}
