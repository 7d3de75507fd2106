use num_rational::BigRational;
use num_traits::{Signed, Zero};
use resampling_lll::conditions::{
    bound_t, check_shearer, evaluate_cluster_theta, evaluate_symmetric_theta, shearer_q, BoundReport, BoundVariant,
    ShearerReport, ThetaReport, Weights, DEFAULT_SHEARER_CAP,
};
use resampling_lll::domain::{DependencyGraph, ExplicitInstance, FlawSet, Prob};
use resampling_lll::rainbow::{generate_coloring, params_for, theta_exact, RainbowParams};
use resampling_lll::verify::minimal_lambda;
use serde::Serialize;

use crate::args::ConditionsArgs;
use crate::report::{
    emit, input, inline_graph, json_text, load, parse_rationals, require_json, to_f64, CliResult, Provenance,
    EXIT_FAIL, EXIT_PASS,
};

#[derive(Serialize)]
struct RainbowResult {
    params: RainbowParams,
    theta_exact: String,
    verdict: &'static str,
}

#[derive(Serialize)]
struct QEntry {
    set: FlawSet,
    q: String,
    value: f64,
}

#[derive(Serialize)]
struct ShearerResult {
    theta: String,
    q: Vec<QEntry>,
    check: ShearerReport,
}

#[derive(Serialize)]
struct ConditionsResult {
    flaws: usize,
    lambda: Vec<f64>,
    cluster: Option<ThetaReport>,
    symmetric: Option<ThetaReport>,
    shearer: Option<ShearerResult>,
    bounds: Vec<BoundReport>,
    verdict: &'static str,
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "certificate"
    } else {
        "no certificate"
    }
}

fn prob_to_rational(p: &Prob) -> BigRational {
    match p {
        Prob::Exact(r) => r.clone(),
        Prob::Float(x) => BigRational::from_float(*x).unwrap_or_else(BigRational::zero),
    }
}

pub fn run(args: &ConditionsArgs) -> CliResult<u8> {
    require_json(&args.output)?;
    if !args.rainbow.is_empty() {
        return run_rainbow(args);
    }
    let (dep, explicit, bytes): (DependencyGraph, Option<ExplicitInstance>, Option<Vec<u8>>) =
        match (&args.instance, inline_graph(&args.graph)?) {
            (Some(path), None) => {
                let (inst, bytes) = load(path)?;
                let explicit = if args.lambda.is_empty() {
                    Some(inst.explicit(args.max_states as usize)?)
                } else {
                    inst.explicit(args.max_states as usize).ok()
                };
                ((*inst.dep).clone(), explicit, Some(bytes))
            }
            (None, Some(dep)) => (dep, None, None),
            (Some(_), Some(_)) => return Err(input("give either --instance or an inline graph, not both")),
            (None, None) => return Err(input("conditions needs --instance, --flaws/--relation or --rainbow")),
        };
    let prov = Provenance::new("conditions", args, bytes.as_deref());
    let n = dep.flaw_count();
    let lambda: Vec<BigRational> = if args.lambda.is_empty() {
        let inst = explicit.as_ref().ok_or_else(|| input("--lambda is required without an instance"))?;
        minimal_lambda(inst).iter().map(prob_to_rational).collect()
    } else {
        parse_rationals(&args.lambda)?
    };
    if lambda.len() != n {
        return Err(input(format!("lambda has {} entries for {n} flaws", lambda.len())));
    }
    let lambda_f: Vec<f64> = lambda.iter().map(to_f64).collect();
    if args.mu.is_empty() && args.p.is_empty() {
        return Err(input("supply --mu (cluster expansion) or --p (Shearer)"));
    }
    let cap = args.cap as usize;
    let mut ok = true;
    let mut bounds = Vec::new();
    let mut variants = vec![BoundVariant::SeqC, BoundVariant::Parallel];
    if explicit.is_some() {
        variants.splice(0..0, [BoundVariant::SeqA, BoundVariant::SeqB]);
    }

    let (mut cluster, mut symmetric) = (None, None);
    if !args.mu.is_empty() {
        let mu: Vec<f64> = parse_rationals(&args.mu)?.iter().map(to_f64).collect();
        let c = evaluate_cluster_theta(&dep, &lambda_f, &mu, cap)?;
        symmetric = Some(evaluate_symmetric_theta(&dep, &lambda_f, &mu)?);
        ok &= c.certified;
        if c.certified {
            let w = Weights::Cluster { mu };
            for &v in &variants {
                bounds.push(bound_t(explicit.as_ref(), &dep, &w, c.theta, v, cap)?);
            }
        }
        cluster = Some(c);
    }

    let mut shearer = None;
    if !args.p.is_empty() {
        let p = parse_rationals(&args.p)?;
        if p.len() != n {
            return Err(input(format!("p has {} entries for {n} flaws", p.len())));
        }
        let theta = match &args.theta {
            Some(t) => crate::report::parse_rational(t)?,
            None => lambda
                .iter()
                .zip(&p)
                .map(|(l, p)| if p.is_positive() { l / p } else { l.clone() + BigRational::from_integer(1.into()) })
                .fold(BigRational::zero(), |a, b| if b > a { b } else { a }),
        };
        let table = shearer_q(&dep, &p, DEFAULT_SHEARER_CAP)?;
        let check = check_shearer(&dep, &lambda, &p, &theta, DEFAULT_SHEARER_CAP)?;
        let theta_f = to_f64(&theta);
        let certified = check.passed && theta_f < 1.0;
        ok &= certified;
        if certified {
            let w = Weights::Shearer { p: p.iter().map(to_f64).collect() };
            for &v in &variants {
                bounds.push(bound_t(explicit.as_ref(), &dep, &w, theta_f, v, cap)?);
            }
        }
        let q = table.iter().map(|(set, v)| QEntry { set, q: v.to_string(), value: to_f64(v) }).collect();
        shearer = Some(ShearerResult { theta: theta.to_string(), q, check });
    }

    let result =
        ConditionsResult { flaws: n, lambda: lambda_f, cluster, symmetric, shearer, bounds, verdict: verdict(ok) };
    emit(&args.output.out, &json_text(&prov.wrap(Vec::new(), ok, &result)))?;
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn run_rainbow(args: &ConditionsArgs) -> CliResult<u8> {
    let [n, q] = args.rainbow[..] else {
        return Err(input("--rainbow takes n,q"));
    };
    let prov = Provenance::new("conditions", args, None);
    let g = generate_coloring(n, q, args.seed)?;
    let params = params_for(n, q, g.monochromatic_pairs().len())?;
    let ok = params.certified;
    let result = RainbowResult { theta_exact: theta_exact(n, q).to_string(), params, verdict: verdict(ok) };
    emit(&args.output.out, &json_text(&prov.wrap(vec![args.seed], ok, &result)))?;
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}
