//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use fairmatch::generate::{
    nd_blow_up_pair, random_instance, random_instance_sized, rng_from_seed, subdivided_skeleton, RandomConfig,
};
use fairmatch::ilp::{build_ilp2, enumerate_feasible, structural_report, Enumeration};
use fairmatch::oracle::{solve_bruteforce, DEFAULT_NODE_BUDGET};
use fairmatch::reductions::{mcc_witness, reduce_mcc, reduce_ubp, ubp_witness, MccInstance, UbpInstance};
use fairmatch::solver::fes::solve_fes;
use fairmatch::solver::nd::solve_nd;
use fairmatch::solver::smallk::{ilp1_feasible, reconstruct_from_intervals, solve_smallk};
use fairmatch::solver::twdp::{solve_twdp, solve_twdp_auto};
use fairmatch::structure::{
    decomposition_from_order, elimination_order, feedback_edge_set, make_nice, tree_decomposition, Heuristic,
    TreeDecomposition,
};
use fairmatch::verify::verify_matching;
use fairmatch::{Answer, Instance};
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn oracle(inst: &Instance) -> bool {
    solve_bruteforce(inst, DEFAULT_NODE_BUDGET)
        .expect("oracle within budget")
        .is_yes()
}

fn witness_ok(inst: &Instance, a: &Answer) -> bool {
    match a {
        Answer::Yes(m) => verify_matching(inst, m).overall && common::is_fair_matching(inst, m),
        Answer::No => true,
    }
}

fn criterion_instances() -> Vec<Instance> {
    (0..500)
        .map(|seed| random_instance(&mut rng_from_seed(seed), &RandomConfig::default()))
        .collect()
}

fn cross_solver(instances: &[Instance]) -> Outcome {
    let mut mismatches = 0;
    let mut bad_witnesses = 0;
    let mut oracle_vs_enumeration = 0;
    let mut yes = 0;
    let mut elapsed = Duration::ZERO;
    for inst in instances {
        let expected = oracle(inst);
        if expected != common::naive_solve(inst).is_some() {
            oracle_vs_enumeration += 1;
        }
        yes += usize::from(expected);
        let start = Instant::now();
        let answers = [
            solve_fes(inst),
            solve_smallk(inst).expect("|V| <= 4"),
            solve_nd(inst).expect("|V| <= 4"),
            solve_twdp_auto(inst).expect("small width"),
        ];
        elapsed += start.elapsed();
        for a in &answers {
            mismatches += usize::from(a.is_yes() != expected);
            bad_witnesses += usize::from(!witness_ok(inst, a));
        }
    }
    let pass =
        mismatches == 0 && bad_witnesses == 0 && oracle_vs_enumeration == 0 && elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "{} instances ({yes} yes), {mismatches} verdict mismatches, {bad_witnesses} rejected witnesses, \
             {oracle_vs_enumeration} oracle/enumeration disagreements, solvers took {:.2?}",
            instances.len(),
            elapsed
        ),
    )
}

fn ilp1_equivalence(instances: &[Instance]) -> Outcome {
    let mut checked = 0;
    let mut mismatches = 0;
    let mut bad = 0;
    for inst in instances.iter().filter(|i| i.num_v() <= 3) {
        checked += 1;
        let iv = ilp1_feasible(inst).expect("|V| <= 3");
        mismatches += usize::from(iv.is_some() != oracle(inst));
        if let Some(iv) = iv {
            match reconstruct_from_intervals(inst, &iv) {
                Ok(m) if verify_matching(inst, &m).overall => {}
                _ => bad += 1,
            }
        }
    }
    outcome(
        checked > 0 && mismatches == 0 && bad == 0,
        format!("{checked} instances with |V| <= 3, {mismatches} mismatches, {bad} rejected reconstructions"),
    )
}

fn nd_blow_ups() -> Outcome {
    let mut rng = rng_from_seed(3);
    let mut mismatches = 0;
    let mut bad = 0;
    let mut slow = 0;
    let mut slowest = Duration::ZERO;
    let mut smallest = usize::MAX;
    for _ in 0..100 {
        let (pattern, blown) = nd_blow_up_pair(&mut rng, 100);
        smallest = smallest.min(blown.num_vertices());
        let start = Instant::now();
        let a = solve_nd(&blown).expect("few twin classes");
        let t = start.elapsed();
        slowest = slowest.max(t);
        slow += usize::from(t >= Duration::from_secs(1));
        mismatches += usize::from(a.is_yes() != oracle(&pattern));
        bad += usize::from(!witness_ok(&blown, &a));
    }
    outcome(
        mismatches == 0 && bad == 0 && slow == 0 && smallest >= 100,
        format!(
            "100 blow-ups (>= {smallest} vertices), {mismatches} mismatches vs pattern, {bad} rejected witnesses, \
             slowest {slowest:.2?}"
        ),
    )
}

fn fes_scaling() -> Outcome {
    let mut ok = true;
    let mut slowest = Duration::ZERO;
    let mut verdicts = Vec::new();
    for seed in 1..=6 {
        let inst = subdivided_skeleton(&mut rng_from_seed(seed), 10_000, 2, 0.02);
        let fes = feedback_edge_set(&inst).len();
        let start = Instant::now();
        let a = solve_fes(&inst);
        let t = start.elapsed();
        slowest = slowest.max(t);
        let b = solve_twdp_auto(&inst).map(|b| b.is_yes());
        ok &= fes == 6 && inst.num_vertices() >= 9_900 && t < Duration::from_secs(5);
        ok &= b == Ok(a.is_yes()) && witness_ok(&inst, &a);
        verdicts.push(if a.is_yes() { "yes" } else { "no" });
    }
    outcome(
        ok,
        format!("6 instances of ~10000 vertices with fes 6, verdicts {verdicts:?}, slowest fes solve {slowest:.2?}"),
    )
}

type Edge = ((usize, usize), (usize, usize));

fn cross_edges(l: usize, n: usize) -> Vec<Edge> {
    let mut out = Vec::new();
    for a in 1..=l {
        for b in a + 1..=l {
            for i in 1..=n {
                for j in 1..=n {
                    out.push(((a, i), (b, j)));
                }
            }
        }
    }
    out
}

fn has_clique(l: usize, n: usize, edges: &[Edge]) -> bool {
    let adj = |p, q| edges.contains(&(p, q)) || edges.contains(&(q, p));
    (0..n.pow(l as u32)).any(|code| {
        let pick: Vec<usize> = (0..l).map(|a| code / n.pow(a as u32) % n + 1).collect();
        (0..l).all(|a| (a + 1..l).all(|b| adj((a + 1, pick[a]), (b + 1, pick[b]))))
    })
}

/// Whether the graph minus the right vertices selected by `delete` is a
/// forest, and the largest radius (in edges) of its trees.
fn forest_radius(inst: &Instance, delete: impl Fn(&str) -> bool) -> (bool, usize) {
    let g = inst.graph();
    let alive: Vec<bool> = (0..g.n())
        .map(|x| x < inst.num_u() || !delete(inst.global_id(x)))
        .collect();
    let bfs = |s: usize| {
        let mut dist = vec![usize::MAX; g.n()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        let mut order = vec![s];
        while let Some(x) = q.pop_front() {
            for &y in g.neighbors(x) {
                if alive[y] && dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                    order.push(y);
                }
            }
        }
        (dist, order)
    };
    let mut seen = vec![false; g.n()];
    let mut forest = true;
    let mut radius = 0;
    for s in (0..g.n()).filter(|&s| alive[s]) {
        if seen[s] {
            continue;
        }
        let (_, comp) = bfs(s);
        let edges: usize = comp
            .iter()
            .map(|&x| g.neighbors(x).iter().filter(|&&y| alive[y]).count())
            .sum::<usize>()
            / 2;
        forest &= edges + 1 == comp.len();
        let ecc = comp.iter().map(|&c| {
            let (d, _) = bfs(c);
            comp.iter().map(|&x| d[x]).max().unwrap()
        });
        radius = radius.max(ecc.min().unwrap());
        for x in comp {
            seen[x] = true;
        }
    }
    (forest, radius)
}

fn max_u_degree(inst: &Instance) -> usize {
    (0..inst.num_u()).map(|u| inst.u_neighbors(u).len()).max().unwrap_or(0)
}

fn mcc_structure_ok(inst: &Instance, l: usize, n: usize) -> bool {
    let (forest, radius) = forest_radius(inst, |id| id.starts_with("v_ab["));
    max_u_degree(inst) == 2 && inst.num_colors() == (n + 1) * l && forest && radius <= 4
}

fn mcc_equivalence() -> Outcome {
    let (l, n) = (2, 2);
    let all = cross_edges(l, n);
    let mut mismatches = 0;
    let mut structure = 0;
    let mut exhaustive = 0;
    for mask in 0..1u32 << all.len() {
        let edges: Vec<Edge> = (0..all.len()).filter(|&e| mask >> e & 1 == 1).map(|e| all[e]).collect();
        let inst = reduce_mcc(&MccInstance::new(l, n, edges.clone()).unwrap());
        exhaustive += 1;
        structure += usize::from(!mcc_structure_ok(&inst, l, n));
        mismatches += usize::from(oracle(&inst) != has_clique(l, n, &edges));
    }

    let (l, n) = (3, 2);
    let all = cross_edges(l, n);
    let mut rng = rng_from_seed(11);
    let mut bad_witness = 0;
    for _ in 0..10 {
        let clique: Vec<usize> = (0..l).map(|_| rng.gen_range(1..=n)).collect();
        let edges: Vec<Edge> = all
            .iter()
            .copied()
            .filter(|&((a, i), (b, j))| (clique[a - 1] == i && clique[b - 1] == j) || rng.gen_bool(0.3))
            .collect();
        let mcc = MccInstance::new(l, n, edges.clone()).unwrap();
        let inst = reduce_mcc(&mcc);
        structure += usize::from(!mcc_structure_ok(&inst, l, n));
        mismatches += usize::from(!oracle(&inst) || !has_clique(l, n, &edges));
        match mcc_witness(&mcc, &clique) {
            Ok(m) if verify_matching(&inst, &m).overall => {}
            _ => bad_witness += 1,
        }
    }
    outcome(
        exhaustive == 16 && mismatches == 0 && structure == 0 && bad_witness == 0,
        format!(
            "{exhaustive} exhaustive l=2,n=2 instances and 10 planted l=3,n=2 instances, {mismatches} mismatches, \
             {bad_witness} rejected witnesses, {structure} structural failures"
        ),
    )
}

fn packings(items: &[usize], m: usize, b: usize) -> Vec<Vec<usize>> {
    (0..m.pow(items.len() as u32))
        .map(|code| {
            (0..items.len())
                .map(|i| code / m.pow(i as u32) % m + 1)
                .collect::<Vec<_>>()
        })
        .filter(|bins| {
            (1..=m).all(|j| {
                items
                    .iter()
                    .zip(bins)
                    .filter(|&(_, &x)| x == j)
                    .map(|(s, _)| s)
                    .sum::<usize>()
                    == b
            })
        })
        .collect()
}

fn ubp_equivalence() -> Outcome {
    let m = 2;
    let (mut generated, mut yes, mut mismatches, mut structure, mut bad_witness) = (0, 0, 0, 0, 0);
    for n in 1..=4u32 {
        for code in 0..3usize.pow(n) {
            let items: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i) % 3 + 1).collect();
            let total: usize = items.iter().sum();
            if !total.is_multiple_of(m) || total / m > 3 {
                continue;
            }
            let b = total / m;
            let ubp = UbpInstance::new(items.clone(), m, b).unwrap();
            let inst = reduce_ubp(&ubp);
            generated += 1;
            structure += usize::from(inst.num_colors() != m + 1 || max_u_degree(&inst) != m);
            let packs = packings(&items, m, b);
            yes += usize::from(!packs.is_empty());
            mismatches += usize::from(oracle(&inst) != !packs.is_empty());
            for p in &packs {
                match ubp_witness(&ubp, p) {
                    Ok(w) if verify_matching(&inst, &w).overall => {}
                    _ => bad_witness += 1,
                }
            }
        }
    }
    outcome(
        mismatches == 0 && structure == 0 && bad_witness == 0,
        format!(
            "{generated} instances ({yes} packable), {mismatches} mismatches, {bad_witness} rejected witnesses, \
             {structure} structural failures"
        ),
    )
}

fn ilp2_structure() -> Outcome {
    let mut rng = rng_from_seed(7);
    let (mut failures, mut enumerated, mut mismatches, mut too_large) = (0, 0, 0, 0);
    let mut count = 0;
    while count < 50 {
        let (nu, nv, nc) = (rng.gen_range(1..=8), rng.gen_range(1..=4), rng.gen_range(1..=3));
        // keep n <= 12 and the dual graph small enough for exact tree-depth
        if nu + nv > 12 || nu + nv + nv * nc > 20 {
            continue;
        }
        count += 1;
        let inst = random_instance_sized(&mut rng, nu, nv, nc, 2, 0.5);
        let model = build_ilp2(&inst);
        let r = structural_report(&inst, &model);
        let bound_ok = matches!((r.td_dual_exact, r.td_instance), (Some(d), Some(t)) if d <= (nc + 1) * t);
        if r.max_abs_coeff != 1 || !r.uv_rows_stable || !r.blowup_subgraph || !bound_ok {
            failures += 1;
        }
        match enumerate_feasible(&model, 1_000_000) {
            Enumeration::Feasible(_) => {
                enumerated += 1;
                mismatches += usize::from(!oracle(&inst));
            }
            Enumeration::Infeasible => {
                enumerated += 1;
                mismatches += usize::from(oracle(&inst));
            }
            Enumeration::TooLarge => too_large += 1,
        }
    }
    outcome(
        failures == 0 && mismatches == 0,
        format!(
            "50 instances, {failures} structural failures, {enumerated} enumerated ({too_large} over 10^6 nodes), \
             {mismatches} feasibility mismatches"
        ),
    )
}

fn decomposition_validity() -> Outcome {
    let mut rng = rng_from_seed(8);
    let (mut invalid, mut disagreements, mut distinct) = (0, 0, 0);
    let cfg = RandomConfig {
        max_u: 10,
        max_v: 5,
        ..RandomConfig::default()
    };
    for _ in 0..50 {
        let inst = random_instance(&mut rng, &cfg);
        let g = inst.graph();
        let first = tree_decomposition(&inst);
        let second = decomposition_from_order(&g, &elimination_order(&g, Heuristic::MinDegree));
        let mut shuffled: Vec<usize> = (0..g.n()).collect();
        shuffled.shuffle(&mut rng);
        let third = decomposition_from_order(&g, &shuffled);
        let imported = TreeDecomposition::from_pace(&third.to_pace(g.n())).map(|(td, _)| td);
        let Ok(imported) = imported else {
            invalid += 1;
            continue;
        };
        for td in [&first, &second, &third, &imported] {
            invalid += usize::from(td.validate(&g).is_err());
        }
        let a = make_nice(&first, 0).unwrap();
        let b = make_nice(&imported, imported.bags.len() - 1).unwrap();
        for ntd in [&a, &b] {
            invalid += usize::from(ntd.validate_shape().is_err() || ntd.validate(&g).is_err());
        }
        distinct += usize::from(a != b);
        let (ra, rb) = (solve_twdp(&inst, &a), solve_twdp(&inst, &b));
        match (ra, rb) {
            (Ok(x), Ok(y)) if x.is_yes() == y.is_yes() && witness_ok(&inst, &x) && witness_ok(&inst, &y) => {}
            _ => disagreements += 1,
        }
    }
    outcome(
        invalid == 0 && disagreements == 0,
        format!(
            "50 instances, 4 decompositions and 2 nice forms each, {invalid} invalid, {disagreements} twdp \
             disagreements ({distinct} pairs structurally distinct)"
        ),
    )
}

fn main() {
    let instances = criterion_instances();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("cross-solver correctness", Box::new(|| cross_solver(&instances))),
        ("ILP1 equivalence", Box::new(|| ilp1_equivalence(&instances))),
        ("nd quotient and expansion", Box::new(nd_blow_ups)),
        ("fes scaling", Box::new(fes_scaling)),
        ("MCC reduction", Box::new(mcc_equivalence)),
        ("UBP reduction", Box::new(ubp_equivalence)),
        ("ILP2 structure", Box::new(ilp2_structure)),
        ("decomposition validity", Box::new(decomposition_validity)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {} ({name}): {} [{:.2?}]",
            i + 1,
            o.detail,
            start.elapsed()
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
