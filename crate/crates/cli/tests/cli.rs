use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fairmatch::generate::{rng_from_seed, twin_blow_up};
use fairmatch::ilp::parse_lp;
use fairmatch::structure::tree_decomposition;
use fairmatch::{Instance, InstanceBuilder};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fairmatch"));
    c.env_remove("FAIRMATCH_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn save(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A path u0 - v0 - u1 - v1 with both colors at v0.
fn tree() -> Instance {
    let mut b = InstanceBuilder::new(2);
    b.add_u("u0", 0);
    b.add_u("u1", 1);
    b.add_v("v0", 0);
    b.add_v("v1", 1);
    b.add_edge(0, 0);
    b.add_edge(1, 0);
    b.add_edge(1, 1);
    b.build().unwrap()
}

fn k23() -> Instance {
    let mut b = InstanceBuilder::new(2);
    for u in 0..2 {
        b.add_u(format!("u{u}"), u);
    }
    for v in 0..3 {
        b.add_v(format!("v{v}"), 2);
        for u in 0..2 {
            b.add_edge(u, v);
        }
    }
    b.build().unwrap()
}

#[test]
fn tree_is_solved_by_fes() {
    let dir = TempDir::new().unwrap();
    let f = save(&dir, "tree.json", &tree().to_json());
    let out = run(&["solve", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["algo_used"], "fes");
    assert_eq!(v["params"]["fes"], 0);
    assert_eq!(v["answer"], "yes");
    assert!(v["witness"]["pairs"].is_array());
}

#[test]
fn blow_up_is_solved_by_nd() {
    let dir = TempDir::new().unwrap();
    let inst = twin_blow_up(&mut rng_from_seed(1), &k23(), 3, 2);
    let f = save(&dir, "k23.json", &inst.to_json());
    let out = run(&["solve", s(&f)]);
    let v = json(&out);
    assert!(v["params"]["fes"].as_u64().unwrap() > 12);
    assert_eq!(v["algo_used"], "nd");
    assert_eq!(out.status.code(), Some(if v["answer"] == "yes" { 0 } else { 1 }));
}

#[test]
fn unparseable_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let f = save(&dir, "bad.json", "{\"num_colors\": 1, ");
    assert_eq!(run(&["solve", s(&f)]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/nonexistent/x.json"]).status.code(), Some(2));
    let dup = r#"{"num_colors":1,"u":[{"id":"a","color":0}],"v":[{"id":"a","l":0}],"edges":[]}"#;
    let f = save(&dir, "dup.json", dup);
    assert_eq!(run(&["analyze", s(&f)]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let inst = save(&dir, "tree.json", &tree().to_json());
    let good = save(&dir, "good.json", r#"{"pairs": [["u0","v0"],["u1","v0"]]}"#);
    let unfair = save(&dir, "unfair.json", r#"{"pairs": [["u0","v0"],["u1","v1"]]}"#);
    let partial = save(&dir, "partial.json", r#"{"pairs": [["u1","v1"]]}"#);
    let out = run(&["verify", s(&inst), s(&good)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["overall"], true);
    let out = run(&["verify", s(&inst), s(&unfair)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["left_perfect"], true);
    let out = run(&["verify", s(&inst), s(&partial)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["left_perfect"], false);
    let bad = save(&dir, "bad.json", r#"{"pairs": [["u9","v0"]]}"#);
    assert_eq!(run(&["verify", s(&inst), s(&bad)]).status.code(), Some(2));
}

#[test]
fn analyze_reduction_outputs() {
    let dir = TempDir::new().unwrap();
    let edges = save(&dir, "edges.txt", "1 1 2 2\n1 2 2 1\n");
    let mcc = dir.path().join("mcc.json");
    let out = run(&[
        "generate",
        "mcc",
        "--l",
        "2",
        "--n",
        "2",
        "--edges-file",
        s(&edges),
        "-o",
        s(&mcc),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let prov: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mcc.json.provenance.json")).unwrap()).unwrap();
    assert!(prov["gadgets"].as_array().unwrap().iter().any(|g| g["kind"] == "edge"));
    let v = json(&run(&["analyze", s(&mcc)]));
    assert_eq!(v["delta_u"], 2);
    assert_eq!(v["num_colors"], 6);

    let ubp = dir.path().join("ubp.json");
    let prov = dir.path().join("ubp.prov");
    let out = run(&[
        "generate",
        "ubp",
        "--items",
        "2,1,1",
        "--m",
        "2",
        "--b",
        "2",
        "-o",
        s(&ubp),
        "--provenance",
        s(&prov),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(prov.exists());
    let v = json(&run(&["analyze", s(&ubp)]));
    assert_eq!(v["num_colors"], 3);
    assert_eq!(v["delta_u"], 2);
    assert_eq!(run(&["solve", s(&ubp)]).status.code(), Some(0));

    let tree = save(&dir, "tree.json", &tree().to_json());
    assert_eq!(json(&run(&["analyze", s(&tree)]))["fes"], 0);
}

#[test]
fn invalid_reduction_input_exits_2() {
    let out = run(&["generate", "ubp", "--items", "2,1", "--m", "2", "--b", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cross_check_agrees() {
    let dir = TempDir::new().unwrap();
    for seed in 0..10 {
        let f = dir.path().join(format!("r{seed}.json"));
        let seed = seed.to_string();
        assert!(run(&["generate", "random", "--seed", &seed, "-o", s(&f)])
            .status
            .success());
        let out = run(&["solve", s(&f), "--cross-check"]);
        let v = json(&out);
        let expected = if v["answer"] == "yes" { 0 } else { 1 };
        assert_eq!(out.status.code(), Some(expected), "{v}");
        for entry in v["cross_check"].as_array().unwrap() {
            if !entry["answer"].is_null() {
                assert_eq!(entry["answer"], v["answer"]);
            }
        }
    }
}

#[test]
fn explicit_algorithms_and_td_file() {
    let dir = TempDir::new().unwrap();
    let inst = k23();
    let f = save(&dir, "k23.json", &inst.to_json());
    let td = tree_decomposition(&inst);
    let tdf = save(&dir, "k23.td", &td.to_pace(inst.num_vertices()));
    let mut answers = Vec::new();
    for algo in ["oracle", "fes", "smallk", "nd", "twdp"] {
        let out = run(&["solve", s(&f), "--algo", algo, "--td-file", s(&tdf)]);
        let v = json(&out);
        assert_eq!(v["algo_used"], algo);
        answers.push(v["answer"].clone());
    }
    assert!(answers.windows(2).all(|w| w[0] == w[1]));
    let broken = save(&dir, "broken.td", "s td 1 1 5\n1 1\n");
    assert_eq!(run(&["solve", s(&f), "--td-file", s(&broken)]).status.code(), Some(2));
}

#[test]
fn over_budget_exits_3() {
    let dir = TempDir::new().unwrap();
    let f = save(&dir, "k23.json", &k23().to_json());
    assert_eq!(
        run(&["solve", s(&f), "--algo", "fes", "--fes-limit", "1"])
            .status
            .code(),
        Some(3)
    );
    let out = run(&[
        "solve",
        s(&f),
        "--fes-limit",
        "0",
        "--k-limit",
        "0",
        "--width-limit",
        "0",
        "--node-limit",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn side_outputs() {
    let dir = TempDir::new().unwrap();
    let f = save(&dir, "k23.json", &k23().to_json());
    let q = dir.path().join("q.json");
    let lp = dir.path().join("ilp1.lp");
    let out = run(&["solve", s(&f), "--emit-quotient", s(&q), "--export-ilp1", s(&lp)]);
    assert!(out.status.code().unwrap() <= 1);
    let qv: Value = serde_json::from_str(&std::fs::read_to_string(&q).unwrap()).unwrap();
    assert_eq!(qv["quotient"]["v"].as_array().unwrap().len(), 1);
    assert_eq!(qv["mapping"][0]["members"].as_array().unwrap().len(), 3);
    let model = parse_lp(&std::fs::read_to_string(&lp).unwrap()).unwrap();
    assert_eq!(model.columns.len(), 6);

    let out = run(&["export-ilp", s(&f), "--which", "ilp2"]);
    let model = parse_lp(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(model.columns.iter().filter(|c| c.name.starts_with("x_u")).count(), 6);
}

#[test]
fn seed_environment_overrides_flag() {
    let a = bin()
        .args(["generate", "random", "--seed", "99"])
        .env("FAIRMATCH_SEED", "5")
        .output()
        .unwrap();
    let b = run(&["generate", "random", "--seed", "5"]);
    let c = run(&["generate", "random", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let d = run(&["generate", "random", "--seed", "6"]);
    assert_ne!(b.stdout, d.stdout);
}
