use std::path::PathBuf;

use resampling_lll::conditions::{bound_t, evaluate_cluster_theta, BoundVariant, Weights, DEFAULT_IND_CAP};
use resampling_lll::domain::{DependencyGraph, Model};
use resampling_lll::engine::{run_trials, Executor, Strategy, StrategyKind, TrialRecord};
use resampling_lll::rainbow::{run_rainbow_experiment, tail_profile, RainbowParams, TailRow};
use resampling_lll::schema::{Instance, Loaded};
use resampling_lll::verify::minimal_lambda;
use resampling_lll::LllError;
use serde::Serialize;

use super::parse_strategy;
use crate::args::{Format, RunArgs};
use crate::report::{emit, input, json_text, load, parse_floats, CliError, CliResult, Provenance, EXIT_PASS};

#[derive(Serialize)]
struct Summary {
    instance: String,
    kind: &'static str,
    strategy: &'static str,
    executor: &'static str,
    trials: usize,
    base_seed: u64,
    terminated: usize,
    /// Mean and maximum of steps (sequential) or rounds (parallel).
    mean: f64,
    max: usize,
    mean_steps: f64,
    max_steps: usize,
    theta: Option<f64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    tail: Vec<TailRow>,
    rainbow: Option<RainbowParams>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    summary: &'a Summary,
    trials: &'a [TrialRecord],
}

fn variant(strategy: &Strategy, parallel: bool) -> BoundVariant {
    match (parallel, strategy.kind()) {
        (true, _) => BoundVariant::Parallel,
        (false, StrategyKind::PiStable(_)) => BoundVariant::SeqA,
        (false, StrategyKind::UniformRandom { .. }) => BoundVariant::SeqC,
        (false, _) => BoundVariant::SeqB,
    }
}

fn trials<M: Model>(
    model: &M,
    dep: &DependencyGraph,
    strategy: &Strategy,
    executor: Executor,
    args: &RunArgs,
) -> CliResult<Vec<TrialRecord>> {
    Ok(run_trials(model, Some(dep), strategy, executor, args.seed, args.trials as usize, args.jobs as usize, |_| {
        Ok(())
    })?)
}

/// `θ` and `T` from cluster weights on the enumerated instance.
fn certificate(inst: &Instance, strategy: &Strategy, args: &RunArgs) -> CliResult<Option<(f64, f64)>> {
    if args.mu.is_empty() {
        if args.force {
            return Ok(None);
        }
        return Err(input("no certificate parameters: pass --mu or --force"));
    }
    let explicit = inst.explicit(args.max_states as usize)?;
    let lambda: Vec<f64> = minimal_lambda(&explicit).iter().map(|p| p.to_f64()).collect();
    let mu = parse_floats(&args.mu)?;
    let th = evaluate_cluster_theta(&inst.dep, &lambda, &mu, DEFAULT_IND_CAP)?;
    if !th.certified {
        if args.force {
            return Ok(None);
        }
        return Err(LllError::NoCertificate { theta: th.theta }.into());
    }
    let b = bound_t(
        Some(&explicit),
        &inst.dep,
        &Weights::Cluster { mu },
        th.theta,
        variant(strategy, args.parallel),
        DEFAULT_IND_CAP,
    )?;
    Ok(Some((th.theta, b.t)))
}

pub fn run(args: &RunArgs) -> CliResult<u8> {
    let (inst, bytes) = load(&args.instance)?;
    let prov = Provenance::new("run", args, Some(&bytes));
    let strategy = parse_strategy(&args.strategy, args.seed, &inst.dep, &inst.order)?;
    let executor = if args.parallel {
        Executor::Parallel { max_rounds: args.max_rounds as usize }
    } else {
        Executor::Sequential { max_steps: args.max_steps as usize }
    };
    let (records, cert, rainbow) = match &inst.model {
        Loaded::Rainbow(r) => {
            let rep = run_rainbow_experiment(
                r,
                &strategy,
                executor,
                args.seed,
                args.trials as usize,
                args.jobs as usize,
                args.force,
            )?;
            let t = if args.parallel { rep.params.t_par } else { rep.params.t_seq };
            let cert = rep.params.certified.then_some((rep.params.theta, t));
            (rep.trials, cert, Some(rep.params))
        }
        model => {
            let cert = certificate(&inst, &strategy, args)?;
            let records = match model {
                Loaded::Matching(m) => trials(m, &inst.dep, &strategy, executor, args)?,
                Loaded::Variable(m) => trials(m, &inst.dep, &strategy, executor, args)?,
                Loaded::Explicit(m) => trials(m, &inst.dep, &strategy, executor, args)?,
                Loaded::Rainbow(_) => unreachable!(),
            };
            (records, cert, None)
        }
    };
    let samples: Vec<usize> =
        records.iter().map(|r| if args.parallel { r.rounds.unwrap_or(0) } else { r.steps }).collect();
    let steps: Vec<usize> = records.iter().map(|r| r.steps).collect();
    let mean = |xs: &[usize]| xs.iter().sum::<usize>() as f64 / xs.len().max(1) as f64;
    let summary = Summary {
        instance: args.instance.display().to_string(),
        kind: inst.kind(),
        strategy: strategy.name(),
        executor: if args.parallel { "parallel" } else { "sequential" },
        trials: records.len(),
        base_seed: args.seed,
        terminated: records.iter().filter(|r| r.terminated).count(),
        mean: mean(&samples),
        max: samples.iter().copied().max().unwrap_or(0),
        mean_steps: mean(&steps),
        max_steps: steps.iter().copied().max().unwrap_or(0),
        theta: cert.map(|c| c.0),
        t: cert.map(|c| c.1),
        tail: cert.map(|(theta, t)| tail_profile(&samples, t, theta, 10)).unwrap_or_default(),
        rainbow,
    };
    let seeds: Vec<u64> = records.iter().map(|r| r.seed).collect();
    match args.output.format {
        Format::Json => {
            let body = JsonReport { summary: &summary, trials: &records };
            emit(&args.output.out, &json_text(&prov.wrap(seeds, true, &body)))?;
        }
        Format::Csv => {
            emit(&args.output.out, &csv_rows(&records, summary.strategy)?)?;
            let text = json_text(&prov.wrap(seeds, true, &summary));
            match &args.output.out {
                Some(path) => emit(&Some(summary_path(path)), &text)?,
                None => eprint!("{text}"),
            }
        }
    }
    Ok(EXIT_PASS)
}

fn summary_path(csv: &std::path::Path) -> PathBuf {
    let mut name = csv.file_stem().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    csv.with_file_name(name)
}

fn csv_rows(records: &[TrialRecord], strategy: &str) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["trial", "seed", "strategy", "steps", "rounds", "terminated"]).map_err(|e| CliError::Io(e.to_string()))?;
    for r in records {
        let rounds = r.rounds.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            strategy.to_string(),
            r.steps.to_string(),
            rounds,
            r.terminated.to_string(),
        ])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is UTF-8"))
}
