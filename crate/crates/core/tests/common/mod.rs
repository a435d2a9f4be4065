//! Reference checks shared by the integration tests. Written against the
//! problem definition only, without the library's verifier or solvers.

#![allow(dead_code)]

use fairmatch::{Instance, InstanceBuilder, Matching};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Left-perfect, uses only edges, and every right vertex is within its
/// threshold over all colors.
pub fn is_fair_matching(inst: &Instance, m: &Matching) -> bool {
    let mut owner = vec![None; inst.num_u()];
    for &(u, v) in &m.pairs {
        if u >= inst.num_u() || v >= inst.num_v() || owner[u].is_some() || !inst.has_edge(u, v) {
            return false;
        }
        owner[u] = Some(v);
    }
    if owner.iter().any(Option::is_none) {
        return false;
    }
    (0..inst.num_v()).all(|v| {
        let mut h = vec![0usize; inst.num_colors()];
        for u in 0..inst.num_u() {
            if owner[u] == Some(v) {
                h[inst.color(u)] += 1;
            }
        }
        h.iter().max().unwrap() - h.iter().min().unwrap() <= inst.threshold(v)
    })
}

/// Plain enumeration of all assignments of `U` to neighbors.
pub fn naive_solve(inst: &Instance) -> Option<Matching> {
    let nu = inst.num_u();
    let mut choice = vec![0usize; nu];
    if (0..nu).any(|u| inst.u_neighbors(u).is_empty()) {
        return None;
    }
    loop {
        let m = Matching::new((0..nu).map(|u| (u, inst.u_neighbors(u)[choice[u]])).collect());
        if is_fair_matching(inst, &m) {
            return Some(m);
        }
        let mut u = 0;
        loop {
            if u == nu {
                return None;
            }
            choice[u] += 1;
            if choice[u] < inst.u_neighbors(u).len() {
                break;
            }
            choice[u] = 0;
            u += 1;
        }
    }
}

/// Random instance; every left vertex gets at least one edge when
/// `connected_u` is set.
pub fn random_instance(
    seed: u64,
    nu: usize,
    nv: usize,
    nc: usize,
    p: f64,
    max_l: usize,
    connected_u: bool,
) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = InstanceBuilder::new(nc);
    for u in 0..nu {
        b.add_u(format!("u{u}"), rng.gen_range(0..nc));
    }
    for v in 0..nv {
        b.add_v(format!("v{v}"), rng.gen_range(0..=max_l));
    }
    for u in 0..nu {
        let mut any = false;
        for v in 0..nv {
            if rng.gen_bool(p) {
                b.add_edge(u, v);
                any = true;
            }
        }
        if connected_u && !any && nv > 0 {
            b.add_edge(u, rng.gen_range(0..nv));
        }
    }
    b.build().unwrap()
}
