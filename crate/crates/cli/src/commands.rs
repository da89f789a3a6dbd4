use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value as Json};

use psdi::dimacs::parse_dimacs;
use psdi::instance::gen;
use psdi::instance::{parse_instance, serialize_instance, Instance};
use psdi::ops::classify::MAX_CLASSIFY_LEVEL;
use psdi::ops::{classify_relation, instantiate_pattern, preserves, OpKind, PolymorphismPattern, PreservationWitness};
use psdi::padding::{random_parity_padding, recommended_padding_size, verify_universal_padding, Universality, VerifyMode};
use psdi::reduce::{default_blocks, seth_forward_reduction, solve_subset_sum_reduction, subset_sum_to_2edge};
use psdi::relation::{format_tuple, parse_tuple};
use psdi::solver::{solve, Algorithm, SolveOptions, SolveReport};
use psdi::Relation;

use crate::{
    BenchArgs, ClassifyArgs, Cli, Command, GenCommand, PadArgs, ReduceCommand, SethArgs, SolveArgs, SubsetSumArgs,
    EXIT_SAT, EXIT_UNSAT,
};

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Classify(a) => classify(a, cli.json),
        Command::Solve(a) => solve_cmd(a, cli.json),
        Command::Pad(a) => pad(a, cli.json),
        Command::Reduce(ReduceCommand::Subsetsum(a)) => subsetsum(a, cli.json),
        Command::Reduce(ReduceCommand::Seth(a)) => seth(a, cli.json),
        Command::Gen(g) => generate(g),
        Command::Bench(a) => bench(a, cli.json),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn witness_text(w: &PreservationWitness) -> String {
    let rows: Vec<String> = w.tuples.iter().map(|t| format_tuple(t)).collect();
    format!("{} -> {}", rows.join(" "), format_tuple(&w.result))
}

/// A file holding only tuples is one relation named `R`.
fn load_relations(text: &str, domain: u32) -> Result<Vec<(String, Option<Relation>)>> {
    let is_instance = text.lines().any(|l| l.trim_start().starts_with("DOMAIN"));
    if is_instance {
        let inst = parse_instance(text)?;
        return Ok(inst.relations().iter().map(|r| (r.name.clone(), r.explicit().cloned())).collect());
    }
    let tokens: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .collect();
    let Some(first) = tokens.first() else { bail!("no tuples in relation file") };
    let arity = first.len();
    let tuples = tokens.iter().map(|t| parse_tuple(domain, arity, t)).collect::<psdi::Result<Vec<_>>>()?;
    Ok(vec![("R".into(), Some(Relation::from_tuples(domain, arity, &tuples)?))])
}

fn classify(a: &ClassifyArgs, as_json: bool) -> Result<u8> {
    if a.max_level > MAX_CLASSIFY_LEVEL {
        bail!("--max-level is capped at {MAX_CLASSIFY_LEVEL}");
    }
    let pattern = a.pattern.as_deref().map(PolymorphismPattern::parse).transpose()?;
    let mut text = String::new();
    let mut reports = Vec::new();
    for (name, rel) in load_relations(&read(&a.input)?, a.domain)? {
        let Some(rel) = rel else {
            writeln!(text, "{name}: oracle-backed, skipped")?;
            reports.push(json!({ "relation": name, "skipped": true }));
            continue;
        };
        let mut entries: Vec<(String, Option<PreservationWitness>)> = Vec::new();
        if rel.is_boolean() {
            for e in classify_relation(&rel, a.max_level)?.entries {
                entries.push((e.op.to_string(), e.witness));
            }
        }
        if let Some(p) = &pattern {
            let op = instantiate_pattern(p, rel.domain_size())?;
            entries.push((op.name().to_string(), preserves(&op, &rel)?));
        }
        let line: Vec<String> = entries
            .iter()
            .map(|(op, w)| match w {
                None => format!("{op} yes"),
                Some(w) => format!("{op} no [{}]", witness_text(w)),
            })
            .collect();
        writeln!(text, "{name}: {}", line.join(", "))?;
        let ops: Vec<Json> = entries
            .iter()
            .map(|(op, w)| json!({ "op": op, "preserved": w.is_none(), "witness": w.as_ref().map(witness_text) }))
            .collect();
        reports.push(json!({ "relation": name, "arity": rel.arity(), "size": rel.len(), "ops": ops }));
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&json!({ "relations": reports }))?);
    } else {
        print!("{text}");
    }
    Ok(0)
}

fn status(rep: &SolveReport) -> &'static str {
    match (rep.is_sat(), rep.complete) {
        (true, _) => "SATISFIABLE",
        (false, true) => "UNSATISFIABLE",
        (false, false) => "UNKNOWN",
    }
}

fn exit_code(rep: &SolveReport) -> u8 {
    match (rep.is_sat(), rep.complete) {
        (true, _) => EXIT_SAT,
        (false, true) => EXIT_UNSAT,
        (false, false) => 0,
    }
}

fn solve_cmd(a: &SolveArgs, as_json: bool) -> Result<u8> {
    let algo: Algorithm = a.algo.parse()?;
    let inst = parse_instance(&read(&a.input)?)?;
    let opts = SolveOptions {
        skip_precheck: a.skip_precheck,
        reorder: !a.no_reorder,
        k: a.k,
        radius: a.radius,
        restarts: a.restarts,
        seed: a.seed,
    };
    let rep = solve(&inst, algo, &opts)?;
    let assignment = rep.assignment.as_ref().map(|x| format_tuple(x));
    if as_json {
        let mut j = json!({
            "algorithm": algo.to_string(),
            "status": status(&rep),
            "assignment": assignment,
            "oracle_queries": rep.oracle_queries,
            "enumerated_nodes": rep.enumerated_nodes,
            "graph_edges": rep.graph_edges,
            "complete": rep.complete,
            "variable_order": rep.variable_order,
        });
        if a.timing {
            j["wall_time_ms"] = json!(rep.wall_time.as_secs_f64() * 1e3);
        }
        println!("{}", serde_json::to_string_pretty(&j)?);
    } else {
        println!("s {}", status(&rep));
        if let Some(x) = &rep.assignment {
            let vals: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            println!("v {}", vals.join(" "));
        }
        println!("c algorithm {algo}");
        println!("c oracle_queries {}", rep.oracle_queries);
        println!("c enumerated_nodes {}", rep.enumerated_nodes);
        println!("c graph_edges {}", rep.graph_edges);
        if a.timing {
            println!("c wall_time_ms {:.3}", rep.wall_time.as_secs_f64() * 1e3);
        }
    }
    Ok(exit_code(&rep))
}

fn parse_verify(s: &str) -> Result<Option<VerifyMode>> {
    match s {
        "exact" => Ok(Some(VerifyMode::Exact)),
        "none" => Ok(None),
        _ => match s.strip_prefix("sample:") {
            Some(n) => Ok(Some(VerifyMode::Sample(n.parse().context("sample count")?))),
            None => bail!("--verify takes exact, sample:N or none"),
        },
    }
}

fn universality(u: Universality) -> &'static str {
    match u {
        Universality::Yes => "yes",
        Universality::No => "no",
        Universality::ProbablyYes => "probably",
    }
}

fn pad(a: &PadArgs, as_json: bool) -> Result<u8> {
    let kind = OpKind::parse(&a.op)?;
    let op = kind.build(2)?;
    let m = match a.m {
        Some(m) => m,
        None => recommended_padding_size(kind, a.n, a.eps)?,
    };
    let spec = random_parity_padding(a.n, m, a.seed);
    let report = parse_verify(&a.verify)?.map(|mode| verify_universal_padding(&op, &spec, mode)).transpose()?;
    if let Some(path) = &a.out {
        fs::write(path, spec.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    if as_json {
        let j = json!({
            "op": kind.to_string(),
            "n": a.n,
            "m": m,
            "eps": a.eps,
            "seed": a.seed,
            "universal": report.as_ref().map(|r| universality(r.is_universal)),
            "exact": report.as_ref().map(|r| r.exact),
            "nonprojective_remaining": report.as_ref().map(|r| r.nonprojective_remaining.to_string()),
            "pads": spec.parity_sets,
        });
        println!("{}", serde_json::to_string_pretty(&j)?);
    } else {
        println!("# op {kind} n {} m {m} seed {}", a.n, a.seed);
        if let Some(r) = &report {
            println!("# universal {}", universality(r.is_universal));
            let label = if r.exact { "exact" } else { "estimated" };
            println!("# nonprojective_remaining {} ({label})", r.nonprojective_remaining);
        }
        if a.out.is_none() {
            print!("{}", spec.to_text());
        }
    }
    Ok(0)
}

fn subsetsum(a: &SubsetSumArgs, as_json: bool) -> Result<u8> {
    let weights = read(&a.weights)?
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(|w| w.parse::<u64>().with_context(|| format!("bad weight {w:?}")))
        .collect::<Result<Vec<_>>>()?;
    let blocks = a.blocks.unwrap_or_else(|| default_blocks(weights.len()));
    let red = subset_sum_to_2edge(&weights, a.target, blocks)?;
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir)?;
        for (i, item) in red.instances().enumerate() {
            let (_, inst) = item?;
            fs::write(dir.join(format!("guess_{i:06}.inst")), serialize_instance(&inst))?;
        }
    }
    let solution = if a.solve { Some(solve_subset_sum_reduction(&red, &SolveOptions::default())?) } else { None };
    let bits: Vec<String> = red.blocks.iter().map(|(lo, hi)| format!("{lo}..{hi}")).collect();
    if as_json {
        let j = json!({
            "n": red.n(),
            "target": a.target,
            "blocks": red.blocks,
            "instances": red.instance_count().to_string(),
            "status": solution.as_ref().map(|s| if s.is_some() { "SATISFIABLE" } else { "UNSATISFIABLE" }),
            "carries": solution.as_ref().and_then(|s| s.as_ref().map(|s| s.carries.clone())),
            "selection": solution.as_ref().and_then(|s| s.as_ref().map(|s| format_tuple(&s.selection))),
        });
        println!("{}", serde_json::to_string_pretty(&j)?);
    } else {
        println!("c blocks {}", bits.join(" "));
        println!("c instances {}", red.instance_count());
        match &solution {
            Some(Some(s)) => {
                println!("s SATISFIABLE");
                println!("c carries {:?}", s.carries);
                println!("v {}", format_tuple(&s.selection));
            }
            Some(None) => println!("s UNSATISFIABLE"),
            None => {}
        }
    }
    Ok(match solution {
        Some(Some(_)) => EXIT_SAT,
        Some(None) => EXIT_UNSAT,
        None => 0,
    })
}

fn seth(a: &SethArgs, as_json: bool) -> Result<u8> {
    let cnf = parse_dimacs(&read(&a.cnf)?)?;
    let kind = OpKind::parse(&a.op)?;
    let red = seth_forward_reduction(&cnf, kind, a.eps, a.seed)?;
    emit(a.out.as_deref(), &serialize_instance(&red.instance))?;
    if let Some(p) = &a.pad_out {
        fs::write(p, red.spec.to_text())?;
    }
    let universal = red.universal.map(universality).unwrap_or("unchecked");
    if as_json {
        let j = json!({
            "n": cnf.n_vars,
            "m": red.spec.m(),
            "constraints": red.instance.constraints().len(),
            "universal": universal,
        });
        eprintln!("{}", serde_json::to_string_pretty(&j)?);
    } else {
        eprintln!("c n {} m {} constraints {}", cnf.n_vars, red.spec.m(), red.instance.constraints().len());
        eprintln!("c pad universal {universal}");
    }
    Ok(0)
}

fn generate(g: &GenCommand) -> Result<u8> {
    let (inst, out): (Instance, _) = match g {
        GenCommand::Ksat { n, m, k, seed, from_dimacs, out } => {
            let inst = match from_dimacs {
                Some(p) => {
                    let cnf = parse_dimacs(&read(p)?)?;
                    gen::cnf_instance(cnf.n_vars, &cnf.clauses)?
                }
                None => gen::gen_ksat(*n, *m, *k, *seed)?,
            };
            (inst, out)
        }
        GenCommand::Exactsat { n, m, k, seed, out } => (gen::gen_exact_sat(*n, *m, *k, *seed)?, out),
        GenCommand::Linear { n, m, p, seed, out } => (gen::gen_linear_mod(*n, *m, *p, *seed)?, out),
        GenCommand::Binary { n, m, d, tightness, seed, out } => {
            (gen::gen_binary_csp(*n, *m, *d, *tightness, *seed)?, out)
        }
        GenCommand::Coloring { vertices, edges, colors, seed, out } => {
            (gen::gen_coloring(*vertices, *edges, *colors, *seed)?, out)
        }
        GenCommand::Sym3e { n, m, seed, out } => (gen::gen_sym3e_instance(*n, *m, *seed)?, out),
        GenCommand::Subsetsum { n, bits, seed, out } => {
            let (weights, target) = gen::gen_subset_sum(*n, *bits, *seed)?;
            let w: Vec<String> = weights.iter().map(u64::to_string).collect();
            emit(out.out.as_deref(), &format!("# target {target}\n{}\n", w.join(" ")))?;
            return Ok(0);
        }
    };
    emit(out.out.as_deref(), &serialize_instance(&inst))?;
    Ok(0)
}

/// Seeded instance family for each algorithm's precondition class.
fn bench_instance(algo: Algorithm, n: usize, d: u32, seed: u64) -> Result<Instance> {
    Ok(match algo {
        Algorithm::Brute => gen::gen_ksat(n, 2 * n, 3, seed)?,
        Algorithm::Mitm2e => gen::gen_linear_mod(n, 2, d, seed)?,
        Algorithm::Tri3nu => gen::gen_binary_csp(n, n, d, 0.3, seed)?,
        Algorithm::Sym3e => gen::gen_sym3e_instance(n, n / 2, seed)?,
        Algorithm::LsKnu => gen::gen_ksat(n, 2 * n, 2, seed)?,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn bench(a: &BenchArgs, as_json: bool) -> Result<u8> {
    let algo: Algorithm = a.algo.parse()?;
    if a.n_min > a.n_max || a.seeds == 0 {
        bail!("need n-min <= n-max and at least one seed");
    }
    let d = if matches!(algo, Algorithm::Brute | Algorithm::Sym3e | Algorithm::LsKnu) { 2 } else { a.d };
    let opts = SolveOptions { radius: None, ..SolveOptions::default() };
    let mut csv = String::from("n,algo,seed,nodes,queries,millis\n");
    let mut rows = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in a.n_min..=a.n_max {
        let mut total = 0f64;
        for seed in 0..a.seeds {
            let inst = bench_instance(algo, n, d, seed)?;
            let start = Instant::now();
            let rep = solve(&inst, algo, &opts)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            writeln!(csv, "{n},{algo},{seed},{},{},{millis:.3}", rep.enumerated_nodes, rep.oracle_queries)?;
            rows.push(json!({
                "n": n, "algo": algo.to_string(), "seed": seed,
                "nodes": rep.enumerated_nodes, "queries": rep.oracle_queries, "millis": millis,
            }));
            total += rep.enumerated_nodes.max(1) as f64;
        }
        xs.push(n as f64);
        ys.push((total / a.seeds as f64).log2());
    }
    let exponent = if xs.len() >= 2 { slope(&xs, &ys) / f64::from(d).log2() } else { f64::NAN };
    if as_json {
        let j = json!({ "algo": algo.to_string(), "d": d, "rows": rows, "node_exponent": exponent });
        println!("{}", serde_json::to_string_pretty(&j)?);
    } else {
        emit(a.out.as_deref(), &csv)?;
        eprintln!("# node exponent per variable: {exponent:.4} x log2(d), d = {d}");
    }
    Ok(0)
}
