//! `fairmatch` command-line front end.
//!
//! JSON goes to stdout (or `--output`), diagnostics to stderr.
//! Exit codes: 0 yes/valid, 1 no/invalid, 2 parse error, 3 over budget,
//! 4 solvers disagree under `--cross-check`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairmatch::generate::{random_instance_sized, rng_from_seed};
use fairmatch::ilp::{build_ilp2, write_lp};
use fairmatch::model::MatchingFile;
use fairmatch::oracle::solve_bruteforce;
use fairmatch::reductions::{self, MccInstance, UbpInstance};
use fairmatch::solver::{fes, nd, smallk, twdp, SolverError};
use fairmatch::structure::{
    degree_stats, feedback_edge_indices, make_nice, neighborhood_diversity, tree_decomposition, treedepth_upper,
    NiceTreeDecomposition, TreeDecomposition,
};
use fairmatch::verify::verify_matching;
use fairmatch::{Answer, Instance, Matching};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "fairmatch", version, about = "Generalized fair matching solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance and print the verdict with a witness.
    Solve(SolveArgs),
    /// Check a matching against an instance.
    Verify {
        instance: PathBuf,
        matching: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report structural parameters of an instance.
    Analyze {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a generated instance.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Write an integer program for an instance in LP format.
    ExportIlp {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Ilp2)]
        which: Which,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Ilp1,
    Ilp2,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Algo {
    Auto,
    Oracle,
    Fes,
    Smallk,
    Nd,
    Twdp,
}

#[derive(Args)]
struct Budgets {
    /// Largest feedback edge number the fes solver accepts.
    #[arg(long, default_value_t = 12)]
    fes_limit: usize,
    /// Largest |V| (smallk) or twin class count (nd).
    #[arg(long, default_value_t = 10)]
    k_limit: usize,
    /// Largest decomposition width for twdp.
    #[arg(long, default_value_t = 6)]
    width_limit: usize,
    /// Largest right degree for twdp.
    #[arg(long, default_value_t = 8)]
    dv_limit: usize,
    /// Search node budget of the oracle.
    #[arg(long, default_value_t = fairmatch::oracle::DEFAULT_NODE_BUDGET)]
    node_limit: u64,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    algo: Algo,
    /// Run every solver within budget and require identical verdicts.
    #[arg(long)]
    cross_check: bool,
    /// Tree decomposition (PACE .td, U first then V, 1-based) for twdp.
    #[arg(long)]
    td_file: Option<PathBuf>,
    /// Write the twin quotient and its class mapping here.
    #[arg(long)]
    emit_quotient: Option<PathBuf>,
    /// Write the interval program in LP format here.
    #[arg(long)]
    export_ilp1: Option<PathBuf>,
    #[command(flatten)]
    budgets: Budgets,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Reduction from Multicolored Clique.
    Mcc {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        n: usize,
        /// Lines `a i b j`, 1-based.
        #[arg(long)]
        edges_file: PathBuf,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Reduction from Unary Bin Packing.
    Ubp {
        /// Comma-separated item sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        items: Vec<usize>,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        b: usize,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Independent random edges.
    Random {
        #[arg(long, default_value_t = 8)]
        u: usize,
        #[arg(long, default_value_t = 4)]
        v: usize,
        #[arg(long, default_value_t = 3)]
        colors: usize,
        #[arg(long, default_value_t = 2)]
        max_l: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Overridden by FAIRMATCH_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenOutput {
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Gadget provenance; defaults to `<output>.provenance.json`.
    #[arg(long)]
    provenance: Option<PathBuf>,
}

/// A failed command: exit code and message for stderr.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn parse(msg: impl ToString) -> Self {
        Failure {
            code: 2,
            msg: msg.to_string(),
        }
    }

    fn budget(msg: impl ToString) -> Self {
        Failure {
            code: 3,
            msg: msg.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify {
            instance,
            matching,
            output,
        } => cmd_verify(&instance, &matching, output.as_deref()),
        Command::Analyze { instance, output } => cmd_analyze(&instance, output.as_deref()),
        Command::Generate { kind } => cmd_generate(kind),
        Command::ExportIlp {
            instance,
            which,
            output,
        } => cmd_export(&instance, which, output.as_deref()),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("fairmatch: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read(path)?).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure {
            code: 2,
            msg: format!("{}: {e}", p.display()),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}").and_then(|()| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::parse(e)),
                _ => Ok(()),
            }
        }
    }
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), Failure> {
    write_text(path, &serde_json::to_string_pretty(value).expect("plain data"))
}

#[derive(Serialize)]
struct Params {
    fes: usize,
    nd: usize,
    v_twin_classes: usize,
    tw_estimate: usize,
    td_upper: usize,
    delta_u: usize,
    delta_v: usize,
    num_colors: usize,
    num_u: usize,
    num_v: usize,
    num_edges: usize,
}

fn params(inst: &Instance, td: &TreeDecomposition) -> Params {
    let g = inst.graph();
    let (delta_u, delta_v) = degree_stats(inst);
    Params {
        fes: feedback_edge_indices(inst).len(),
        nd: neighborhood_diversity(&g),
        v_twin_classes: nd::quotient_size(inst),
        tw_estimate: td.width(),
        td_upper: treedepth_upper(&g).depth,
        delta_u,
        delta_v,
        num_colors: inst.num_colors(),
        num_u: inst.num_u(),
        num_v: inst.num_v(),
        num_edges: inst.num_edges(),
    }
}

/// The decomposition twdp would use: the imported one or min-fill.
fn decomposition(inst: &Instance, td_file: Option<&Path>) -> Result<TreeDecomposition, Failure> {
    let Some(path) = td_file else {
        return Ok(tree_decomposition(inst));
    };
    let (td, n) = TreeDecomposition::from_pace(&read(path)?).map_err(Failure::parse)?;
    if n != inst.num_vertices() {
        return Err(Failure::parse(format!(
            "{}: decomposition has {n} vertices, instance has {}",
            path.display(),
            inst.num_vertices()
        )));
    }
    td.validate(&inst.graph()).map_err(Failure::parse)?;
    Ok(td)
}

enum Run {
    Done(Answer),
    OverBudget(String),
}

fn run_algo(inst: &Instance, algo: Algo, ntd: Option<&NiceTreeDecomposition>, p: &Params, b: &Budgets) -> Run {
    let over = |e: SolverError| Run::OverBudget(e.to_string());
    match algo {
        Algo::Oracle => match solve_bruteforce(inst, b.node_limit) {
            Ok(a) => Run::Done(a),
            Err(e) => Run::OverBudget(e.to_string()),
        },
        Algo::Fes => fes::solve_fes_with_limit(inst, b.fes_limit).map_or_else(over, Run::Done),
        Algo::Smallk => smallk::solve_smallk_with_limit(inst, b.k_limit).map_or_else(over, Run::Done),
        Algo::Nd => nd::solve_nd_with_limit(inst, b.k_limit).map_or_else(over, Run::Done),
        Algo::Twdp => {
            let ntd = ntd.expect("decomposition prepared for twdp");
            if ntd.width() > b.width_limit || p.delta_v > b.dv_limit {
                return Run::OverBudget(format!(
                    "width {} / right degree {} above limits {} / {}",
                    ntd.width(),
                    p.delta_v,
                    b.width_limit,
                    b.dv_limit
                ));
            }
            twdp::solve_twdp(inst, ntd).map_or_else(over, Run::Done)
        }
        Algo::Auto => unreachable!("auto is resolved before running"),
    }
}

/// Solver order for auto mode, cheapest parameter first.
fn auto_order(p: &Params, b: &Budgets) -> Vec<Algo> {
    let mut order = Vec::new();
    if p.fes <= b.fes_limit {
        order.push(Algo::Fes);
    }
    if p.v_twin_classes <= b.k_limit {
        order.push(Algo::Nd);
    }
    if p.tw_estimate <= b.width_limit && p.delta_v <= b.dv_limit {
        order.push(Algo::Twdp);
    }
    if p.num_v <= b.k_limit {
        order.push(Algo::Smallk);
    }
    order.push(Algo::Oracle);
    order
}

#[derive(Serialize)]
struct CrossEntry {
    algo: Algo,
    answer: Option<&'static str>,
    witness_valid: Option<bool>,
    note: Option<String>,
}

fn answer_word(a: &Answer) -> &'static str {
    if a.is_yes() {
        "yes"
    } else {
        "no"
    }
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let inst = load_instance(&args.instance)?;
    let b = &args.budgets;
    let td = decomposition(&inst, args.td_file.as_deref())?;
    let p = params(&inst, &td);
    let ntd = make_nice(&td, 0).map_err(Failure::parse)?;

    if let Some(path) = &args.emit_quotient {
        let pre = nd::preprocess(&inst);
        let q = nd::build_quotient(&pre.reduced).map_err(Failure::parse)?;
        let out = json!({
            "quotient": q.inner.to_file(),
            "mapping": q.mapping_json(&pre.reduced),
            "forced": pre.forced.iter().map(|&(u, v)| (inst.u_id(u), inst.v_id(v))).collect::<Vec<_>>(),
            "early_no": pre.early_no,
        });
        write_json(Some(path), &out)?;
    }
    if let Some(path) = &args.export_ilp1 {
        if inst.num_v() > b.k_limit {
            return Err(Failure::budget(format!(
                "|V| = {} above --k-limit {}",
                inst.num_v(),
                b.k_limit
            )));
        }
        let model = smallk::build_ilp1(&inst).map_err(Failure::budget)?;
        write_text(Some(path), &write_lp(&model))?;
    }

    let candidates = match args.algo {
        Algo::Auto => auto_order(&p, b),
        a => vec![a],
    };
    let mut chosen = None;
    let mut skipped = Vec::new();
    for algo in candidates {
        match run_algo(&inst, algo, Some(&ntd), &p, b) {
            Run::Done(a) => {
                chosen = Some((algo, a));
                break;
            }
            Run::OverBudget(why) => {
                eprintln!("fairmatch: {algo:?} skipped: {why}");
                skipped.push(why);
            }
        }
    }
    let Some((algo, answer)) = chosen else {
        return Err(Failure::budget(format!(
            "every solver is over budget: {}",
            skipped.join("; ")
        )));
    };
    if let Answer::Yes(m) = &answer {
        if !verify_matching(&inst, m).overall {
            return Err(Failure {
                code: 4,
                msg: format!("{algo:?} returned a witness the verifier rejects"),
            });
        }
    }

    let mut cross = Vec::new();
    let mut disagree = false;
    if args.cross_check {
        let algos = [Algo::Oracle, Algo::Fes, Algo::Smallk, Algo::Nd, Algo::Twdp];
        let runs: Vec<(Algo, Run)> = std::thread::scope(|s| {
            let handles: Vec<_> = algos
                .iter()
                .map(|&a| {
                    let (inst, ntd, p) = (&inst, &ntd, &p);
                    s.spawn(move || (a, run_algo(inst, a, Some(ntd), p, b)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
        });
        for (a, run) in runs {
            cross.push(match run {
                Run::Done(ans) => {
                    let valid = ans.matching().map(|m| verify_matching(&inst, m).overall);
                    disagree |= ans.is_yes() != answer.is_yes() || valid == Some(false);
                    CrossEntry {
                        algo: a,
                        answer: Some(answer_word(&ans)),
                        witness_valid: valid,
                        note: None,
                    }
                }
                Run::OverBudget(why) => CrossEntry {
                    algo: a,
                    answer: None,
                    witness_valid: None,
                    note: Some(why),
                },
            });
        }
    }

    let mut out = json!({
        "answer": answer_word(&answer),
        "algo_used": algo,
        "params": p,
    });
    if let Answer::Yes(m) = &answer {
        out["witness"] = serde_json::to_value(m.to_file(&inst)).expect("plain data");
    }
    if args.cross_check {
        out["cross_check"] = serde_json::to_value(&cross).expect("plain data");
    }
    write_json(args.output.as_deref(), &out)?;
    if disagree {
        return Err(Failure {
            code: 4,
            msg: "solvers disagree".into(),
        });
    }
    Ok(if answer.is_yes() { 0 } else { 1 })
}

fn cmd_verify(instance: &Path, matching: &Path, output: Option<&Path>) -> Outcome {
    let inst = load_instance(instance)?;
    let file: MatchingFile =
        serde_json::from_str(&read(matching)?).map_err(|e| Failure::parse(format!("{}: {e}", matching.display())))?;
    let m = Matching::from_file(&inst, &file).map_err(|e| Failure::parse(format!("{}: {e}", matching.display())))?;
    let report = verify_matching(&inst, &m);
    write_json(output, &report)?;
    Ok(if report.overall { 0 } else { 1 })
}

fn cmd_analyze(instance: &Path, output: Option<&Path>) -> Outcome {
    let inst = load_instance(instance)?;
    let td = tree_decomposition(&inst);
    write_json(output, &params(&inst, &td))?;
    Ok(0)
}

fn write_reduction(r: &reductions::Reduction, out: &GenOutput) -> Outcome {
    write_text(out.output.as_deref(), &r.instance.to_json())?;
    let sidecar = out.provenance.clone().or_else(|| {
        out.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".provenance.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = sidecar {
        write_json(Some(&path), &r.provenance_json())?;
    }
    Ok(0)
}

fn cmd_generate(kind: GenerateKind) -> Outcome {
    match kind {
        GenerateKind::Mcc { l, n, edges_file, out } => {
            let mcc = MccInstance::parse_edges(l, n, &read(&edges_file)?).map_err(Failure::parse)?;
            write_reduction(&reductions::reduce_mcc_with_provenance(&mcc), &out)
        }
        GenerateKind::Ubp { items, m, b, out } => {
            let ubp = UbpInstance::new(items, m, b).map_err(Failure::parse)?;
            write_reduction(&reductions::reduce_ubp_with_provenance(&ubp), &out)
        }
        GenerateKind::Random {
            u,
            v,
            colors,
            max_l,
            p,
            seed,
            output,
        } => {
            let seed = match std::env::var("FAIRMATCH_SEED") {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| Failure::parse(format!("FAIRMATCH_SEED={s} is not a u64")))?,
                Err(_) => seed,
            };
            if colors == 0 || !(0.0..=1.0).contains(&p) {
                return Err(Failure::parse("need --colors >= 1 and --p in [0, 1]"));
            }
            let inst = random_instance_sized(&mut rng_from_seed(seed), u, v, colors, max_l, p);
            write_text(output.as_deref(), &inst.to_json())?;
            Ok(0)
        }
    }
}

fn cmd_export(instance: &Path, which: Which, output: Option<&Path>) -> Outcome {
    let inst = load_instance(instance)?;
    let model = match which {
        Which::Ilp2 => build_ilp2(&inst),
        Which::Ilp1 => smallk::build_ilp1(&inst).map_err(Failure::budget)?,
    };
    write_text(output, write_lp(&model).trim_end())?;
    Ok(0)
}
