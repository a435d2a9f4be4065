//! Fairness semantics.
//!
//! A right vertex `v` is fair when the largest and smallest number of
//! matched vertices per color differ by at most `L(v)`. Both extremes range
//! over every color of the instance, so a color with no matched vertex
//! contributes a zero.

use serde::Serialize;
use std::fmt;

use crate::model::{Instance, Matching, ModelError, Side};

/// `max - min` of a per-color count vector (0 for an empty vector).
pub fn spread(counts: &[usize]) -> usize {
    let max = counts.iter().copied().max().unwrap_or(0);
    let min = counts.iter().copied().min().unwrap_or(0);
    max - min
}

pub fn is_fair(counts: &[usize], threshold: usize) -> bool {
    spread(counts) <= threshold
}

/// Per-color count of vertices matched to `v`; length is `num_colors`.
pub fn color_histogram(inst: &Instance, m: &Matching, v: usize) -> Result<Vec<usize>, ModelError> {
    if v >= inst.num_v() {
        return Err(ModelError::IndexOutOfRange {
            side: Side::V,
            index: v,
        });
    }
    let mut hist = vec![0; inst.num_colors()];
    for &(u, w) in &m.pairs {
        if w == v && u < inst.num_u() {
            hist[inst.color(u)] += 1;
        }
    }
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchingIssue {
    UnknownU { index: usize },
    UnknownV { index: usize },
    NonEdge { u: String, v: String },
    MatchedTwice { u: String },
    Unmatched { u: String },
}

impl fmt::Display for MatchingIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingIssue::UnknownU { index } => write!(f, "u index {index} out of range"),
            MatchingIssue::UnknownV { index } => write!(f, "v index {index} out of range"),
            MatchingIssue::NonEdge { u, v } => write!(f, "({u:?}, {v:?}) is not an edge"),
            MatchingIssue::MatchedTwice { u } => write!(f, "{u:?} is matched more than once"),
            MatchingIssue::Unmatched { u } => write!(f, "{u:?} is unmatched"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexFairness {
    pub v: usize,
    pub id: String,
    pub max_count: usize,
    pub min_count: usize,
    pub threshold: usize,
    pub fair: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairnessReport {
    pub left_perfect: bool,
    pub per_v: Vec<VertexFairness>,
    pub overall: bool,
    pub issues: Vec<MatchingIssue>,
}

/// Full check of a candidate matching: left-perfectness, edge membership
/// and `L(v)`-fairness at every right vertex.
pub fn verify_matching(inst: &Instance, m: &Matching) -> FairnessReport {
    let mut issues = Vec::new();
    let mut times = vec![0usize; inst.num_u()];
    let mut hist = vec![vec![0usize; inst.num_colors()]; inst.num_v()];
    for &(u, v) in &m.pairs {
        if u >= inst.num_u() {
            issues.push(MatchingIssue::UnknownU { index: u });
            continue;
        }
        if v >= inst.num_v() {
            issues.push(MatchingIssue::UnknownV { index: v });
            continue;
        }
        if !inst.has_edge(u, v) {
            issues.push(MatchingIssue::NonEdge {
                u: inst.u_id(u).to_string(),
                v: inst.v_id(v).to_string(),
            });
        }
        times[u] += 1;
        hist[v][inst.color(u)] += 1;
    }
    for (u, &t) in times.iter().enumerate() {
        match t {
            0 => issues.push(MatchingIssue::Unmatched {
                u: inst.u_id(u).to_string(),
            }),
            1 => {}
            _ => issues.push(MatchingIssue::MatchedTwice {
                u: inst.u_id(u).to_string(),
            }),
        }
    }
    let left_perfect = times.iter().all(|&t| t == 1);
    let per_v: Vec<VertexFairness> = hist
        .iter()
        .enumerate()
        .map(|(v, h)| {
            let max_count = h.iter().copied().max().unwrap_or(0);
            let min_count = h.iter().copied().min().unwrap_or(0);
            VertexFairness {
                v,
                id: inst.v_id(v).to_string(),
                max_count,
                min_count,
                threshold: inst.threshold(v),
                fair: max_count - min_count <= inst.threshold(v),
            }
        })
        .collect();
    let structurally_valid = !issues.iter().any(|i| {
        matches!(
            i,
            MatchingIssue::NonEdge { .. } | MatchingIssue::UnknownU { .. } | MatchingIssue::UnknownV { .. }
        )
    });
    let overall = left_perfect && structurally_valid && per_v.iter().all(|p| p.fair);
    FairnessReport {
        left_perfect,
        per_v,
        overall,
        issues,
    }
}
