use std::collections::HashSet;

use resampling_lll::conditions::{evaluate_cluster_theta, Weights, DEFAULT_IND_CAP};
use resampling_lll::domain::{DependencyGraph, ExplicitInstance, FlawId, FlawOrder, FlawSet, StateId, Walk, Word};
use resampling_lll::stable::{
    backward_canonicalize_set, enumerate_bad, enumerate_stab_pi, forward_canonicalize_walk, is_pi_stable,
    verify_stab_counting, BackwardAudit, BadMode, CountingParams, CountingReport,
};
use resampling_lll::verify::{minimal_lambda, realize_swap};
use serde::Serialize;

use super::parse_strategy;
use crate::args::{StableArgs, StableMode};
use crate::report::{
    emit, input, inline_graph, json_text, load, parse_flaw_set, parse_floats, parse_rational, require_json, to_f64,
    CliResult, Provenance, EXIT_FAIL, EXIT_PASS,
};

#[derive(Serialize)]
struct EnumerateResult {
    root: FlawSet,
    t: usize,
    max_len: usize,
    count: usize,
    words: Vec<Word>,
}

#[derive(Serialize)]
struct CountingResult {
    theta: f64,
    lambda: Vec<f64>,
    reports: Vec<CountingReport>,
}

#[derive(Serialize)]
struct AuditResult {
    strategy: &'static str,
    t: usize,
    bad_walks: usize,
    total_probability: String,
    forward_pi_stable: bool,
    forward_injective: bool,
    backward: BackwardAudit,
    backward_rounds: usize,
}

struct Graph {
    dep: DependencyGraph,
    order: FlawOrder,
    explicit: Option<ExplicitInstance>,
    bytes: Option<Vec<u8>>,
    strategy_dep: Option<std::sync::Arc<DependencyGraph>>,
}

fn graph(args: &StableArgs) -> CliResult<Graph> {
    match (&args.instance, inline_graph(&args.graph)?) {
        (Some(path), None) => {
            let (inst, bytes) = load(path)?;
            let explicit = inst.explicit(args.max_states as usize)?;
            Ok(Graph {
                dep: (*inst.dep).clone(),
                order: inst.order.clone(),
                explicit: Some(explicit),
                bytes: Some(bytes),
                strategy_dep: Some(inst.dep.clone()),
            })
        }
        (None, Some(dep)) => {
            let order = FlawOrder::identity(dep.flaw_count());
            Ok(Graph { dep, order, explicit: None, bytes: None, strategy_dep: None })
        }
        (Some(_), Some(_)) => Err(input("give either --instance or an inline graph, not both")),
        (None, None) => Err(input("stable needs --instance or --flaws/--relation")),
    }
}

pub fn run(args: &StableArgs) -> CliResult<u8> {
    require_json(&args.output)?;
    let g = graph(args)?;
    let prov = Provenance::new("stable", args, g.bytes.as_deref());
    let cap = args.cap as usize;
    let n = g.dep.flaw_count();
    match args.mode {
        StableMode::Enumerate => {
            let root = parse_flaw_set(args.root.as_deref().unwrap_or("-"), n)?;
            let max_len = args.max_len.unwrap_or(args.t);
            let words = enumerate_stab_pi(g.explicit.as_ref(), &g.dep, &g.order, &root, args.t, max_len, cap)?;
            let result = EnumerateResult { root, t: args.t, max_len, count: words.len(), words };
            emit(&args.output.out, &json_text(&prov.wrap(Vec::new(), true, &result)))?;
            Ok(EXIT_PASS)
        }
        StableMode::Counting => counting(args, &g, &prov),
        StableMode::Audit => audit(args, &g, &prov),
    }
}

fn counting(args: &StableArgs, g: &Graph, prov: &Provenance) -> CliResult<u8> {
    let n = g.dep.flaw_count();
    let cap = args.cap as usize;
    let lambda: Vec<f64> = if args.lambda.is_empty() {
        let inst = g.explicit.as_ref().ok_or_else(|| input("--lambda is required without an instance"))?;
        minimal_lambda(inst).iter().map(|p| p.to_f64()).collect()
    } else {
        parse_floats(&args.lambda)?
    };
    if lambda.len() != n {
        return Err(input(format!("lambda has {} entries for {n} flaws", lambda.len())));
    }
    let (weights, theta) = match (args.mu.is_empty(), args.p.is_empty()) {
        (false, true) => {
            let mu = parse_floats(&args.mu)?;
            let theta = match &args.theta {
                Some(t) => to_f64(&parse_rational(t)?),
                None => evaluate_cluster_theta(&g.dep, &lambda, &mu, DEFAULT_IND_CAP)?.theta,
            };
            (Weights::Cluster { mu }, theta)
        }
        (true, false) => {
            let p = parse_floats(&args.p)?;
            if p.len() != n {
                return Err(input(format!("p has {} entries for {n} flaws", p.len())));
            }
            let theta = match &args.theta {
                Some(t) => to_f64(&parse_rational(t)?),
                None => lambda.iter().zip(&p).map(|(l, p)| l / p).fold(0.0, f64::max),
            };
            (Weights::Shearer { p }, theta)
        }
        _ => return Err(input("supply exactly one of --mu and --p")),
    };
    let roots: Vec<FlawSet> = match &args.root {
        Some(r) => vec![parse_flaw_set(r, n)?],
        None => g.dep.enumerate_independent_subsets(&(0..n).map(|f| FlawId(f as u32)).collect(), cap)?,
    };
    let max_len = args.max_len.unwrap_or(args.t + 4);
    let params = CountingParams { lambda: lambda.clone(), weights, theta };
    let reports = roots
        .iter()
        .map(|r| verify_stab_counting(g.explicit.as_ref(), &g.dep, &g.order, &params, r, args.t, max_len, cap))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let result = CountingResult { theta, lambda, reports };
    emit(&args.output.out, &json_text(&prov.wrap(Vec::new(), passed, &result)))?;
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}

fn audit(args: &StableArgs, g: &Graph, prov: &Provenance) -> CliResult<u8> {
    let inst = g.explicit.as_ref().ok_or_else(|| input("the audit needs --instance"))?;
    let dep = g.strategy_dep.as_ref().expect("instance graphs are shared");
    let strategy = parse_strategy(&args.strategy, args.seed, dep, &g.order)?;
    let cap = args.cap as usize;
    let bad = enumerate_bad(inst, Some(&g.dep), &strategy, args.t, BadMode::Full, cap)?;
    let swap = realize_swap(inst, &g.dep, false)?;
    let mut images: Vec<Walk<StateId>> = Vec::with_capacity(bad.walks.len());
    for w in &bad.walks {
        images.push(forward_canonicalize_walk(inst, &swap, &g.dep, &g.order, w)?.result);
    }
    let forward_pi_stable = images.iter().all(|w| is_pi_stable(&g.dep, &g.order, &w.word()));
    let forward_injective = images.iter().collect::<HashSet<_>>().len() == images.len();
    let back = backward_canonicalize_set(inst, &swap, &g.dep, &g.order, &bad.walks, None)?;
    let passed = forward_pi_stable && forward_injective && back.audit.passed();
    let result = AuditResult {
        strategy: strategy.name(),
        t: args.t,
        bad_walks: bad.walks.len(),
        total_probability: bad.total.to_string(),
        forward_pi_stable,
        forward_injective,
        backward: back.audit,
        backward_rounds: back.rounds,
    };
    emit(&args.output.out, &json_text(&prov.wrap(vec![args.seed], passed, &result)))?;
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}
