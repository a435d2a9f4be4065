//! Seeded instance generators used by the CLI and the test suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Instance, InstanceBuilder};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size ranges for [`random_instance`]; sizes are drawn uniformly from
/// `1..=max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomConfig {
    pub max_u: usize,
    pub max_v: usize,
    pub max_colors: usize,
    pub max_l: usize,
    pub edge_prob: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            max_u: 8,
            max_v: 4,
            max_colors: 3,
            max_l: 2,
            edge_prob: 0.5,
        }
    }
}

pub fn random_instance(rng: &mut impl Rng, cfg: &RandomConfig) -> Instance {
    let nu = rng.gen_range(1..=cfg.max_u.max(1));
    let nv = rng.gen_range(1..=cfg.max_v.max(1));
    let nc = rng.gen_range(1..=cfg.max_colors.max(1));
    random_instance_sized(rng, nu, nv, nc, cfg.max_l, cfg.edge_prob)
}

/// Independent edges with probability `p`; thresholds uniform in `0..=max_l`.
pub fn random_instance_sized(rng: &mut impl Rng, nu: usize, nv: usize, nc: usize, max_l: usize, p: f64) -> Instance {
    let mut b = InstanceBuilder::new(nc);
    for u in 0..nu {
        b.add_u(format!("u{u}"), rng.gen_range(0..nc));
    }
    for v in 0..nv {
        b.add_v(format!("v{v}"), rng.gen_range(0..=max_l));
    }
    for u in 0..nu {
        for v in 0..nv {
            if rng.gen_bool(p) {
                b.add_edge(u, v);
            }
        }
    }
    b.build().expect("generated instance is valid")
}

/// Splits `total` into `parts` nonnegative integers uniformly at random.
fn random_split(rng: &mut impl Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut cuts: Vec<usize> = (0..parts - 1).map(|_| rng.gen_range(0..=total)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain([total]) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// Replaces right vertex `v` by `copies[v]` twins whose thresholds split
/// `L(v)` at random. The result has the same verdict as `pattern`.
pub fn v_blow_up(rng: &mut impl Rng, pattern: &Instance, copies: &[usize]) -> Instance {
    assert_eq!(copies.len(), pattern.num_v());
    let mut b = InstanceBuilder::new(pattern.num_colors());
    for u in 0..pattern.num_u() {
        b.add_u(pattern.u_id(u), pattern.color(u));
    }
    for v in 0..pattern.num_v() {
        let k = copies[v].max(1);
        for (t, l) in random_split(rng, pattern.threshold(v), k).into_iter().enumerate() {
            let w = b.add_v(format!("{}#{t}", pattern.v_id(v)), l);
            for &u in pattern.v_neighbors(v) {
                b.add_edge(u, w);
            }
        }
    }
    b.build().expect("blow-up of a valid instance")
}

/// Blows up every vertex of `pattern`: each left vertex into `u_factor`
/// same-colored twins, each right vertex into `v_factor` twins sharing its
/// threshold at random.
pub fn twin_blow_up(rng: &mut impl Rng, pattern: &Instance, u_factor: usize, v_factor: usize) -> Instance {
    let mut b = InstanceBuilder::new(pattern.num_colors());
    let mut u_copies = vec![Vec::new(); pattern.num_u()];
    for (u, cs) in u_copies.iter_mut().enumerate() {
        for t in 0..u_factor.max(1) {
            cs.push(b.add_u(format!("{}#{t}", pattern.u_id(u)), pattern.color(u)));
        }
    }
    for v in 0..pattern.num_v() {
        for (t, l) in random_split(rng, pattern.threshold(v), v_factor.max(1))
            .into_iter()
            .enumerate()
        {
            let w = b.add_v(format!("{}#{t}", pattern.v_id(v)), l);
            for &u in pattern.v_neighbors(v) {
                for &c in &u_copies[u] {
                    b.add_edge(c, w);
                }
            }
        }
    }
    b.build().expect("blow-up of a valid instance")
}

/// A six-vertex pattern and a V-side blow-up of it with at least
/// `min_vertices` vertices.
pub fn nd_blow_up_pair(rng: &mut impl Rng, min_vertices: usize) -> (Instance, Instance) {
    let nu = rng.gen_range(2..=4);
    let nv = 6 - nu;
    let nc = rng.gen_range(1..=3);
    let pattern = random_instance_sized(rng, nu, nv, nc, 2 * nc, 0.6);
    let extra = min_vertices.saturating_sub(nu);
    let mut copies = vec![extra / nv; nv];
    for c in copies.iter_mut().take(extra % nv) {
        *c += 1;
    }
    let blown = v_blow_up(rng, &pattern, &copies);
    (pattern, blown)
}

/// Four hub right vertices joined by the six edges of `K4` plus three
/// chords parallel to it, each subdivided into an alternating path; the
/// feedback edge number is `9 - 4 + 1 = 6`. Path lengths are balanced so
/// the total vertex count is about `total`. Path vertices get threshold 0
/// with probability `zero_l`, else 1; hubs never constrain.
pub fn subdivided_skeleton(rng: &mut impl Rng, total: usize, num_colors: usize, zero_l: f64) -> Instance {
    let skeleton = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 1), (2, 3), (0, 2)];
    let mut b = InstanceBuilder::new(num_colors);
    let hubs: Vec<usize> = (0..4).map(|h| b.add_v(format!("hub{h}"), total)).collect();
    // internal vertices per path: u v u ... u, an odd count
    let per_path = (total.saturating_sub(4) / skeleton.len()).max(1);
    let per_path = if per_path.is_multiple_of(2) {
        per_path - 1
    } else {
        per_path
    };
    let mut u_colors: Vec<usize> = (0..num_colors).collect();
    for (p, &(s, t)) in skeleton.iter().enumerate() {
        let mut prev_v = hubs[s];
        for k in (0..per_path).step_by(2) {
            u_colors.shuffle(rng);
            let u = b.add_u(format!("p{p}.u{k}"), u_colors[0]);
            b.add_edge(u, prev_v);
            if k + 1 == per_path {
                b.add_edge(u, hubs[t]);
            } else {
                let v = b.add_v(format!("p{p}.v{}", k + 1), usize::from(!rng.gen_bool(zero_l)));
                b.add_edge(u, v);
                prev_v = v;
            }
        }
    }
    b.build().expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::feedback_edge_set;

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_instance(&mut rng_from_seed(5), &RandomConfig::default());
        let b = random_instance(&mut rng_from_seed(5), &RandomConfig::default());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn split_sums() {
        let mut rng = rng_from_seed(1);
        for total in 0..6 {
            for parts in 1..5 {
                let s = random_split(&mut rng, total, parts);
                assert_eq!((s.len(), s.iter().sum::<usize>()), (parts, total));
            }
        }
    }

    #[test]
    fn blow_up_keeps_classes() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let (pattern, blown) = nd_blow_up_pair(&mut rng, 100);
            assert!(blown.num_vertices() >= 100);
            let classes = |inst: &Instance| {
                (0..inst.num_v())
                    .map(|v| inst.v_neighbors(v).to_vec())
                    .collect::<std::collections::BTreeSet<_>>()
            };
            assert_eq!(classes(&pattern), classes(&blown));
            let lp: usize = pattern.thresholds().iter().sum();
            let lq: usize = blown.thresholds().iter().sum();
            assert_eq!(lp, lq);
        }
    }

    #[test]
    fn skeleton_has_six_feedback_edges() {
        let inst = subdivided_skeleton(&mut rng_from_seed(2), 10_000, 2, 0.02);
        assert_eq!(feedback_edge_set(&inst).len(), 6);
        assert!(inst.num_vertices() >= 9_900 && inst.num_vertices() <= 10_000);
        let small = subdivided_skeleton(&mut rng_from_seed(2), 40, 2, 0.5);
        assert_eq!(feedback_edge_set(&small).len(), 6);
    }
}
