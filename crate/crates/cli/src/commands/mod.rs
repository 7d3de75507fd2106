pub mod conditions;
pub mod rainbow_gen;
pub mod run;
pub mod stable;
pub mod verify;

use std::sync::Arc;

use resampling_lll::domain::{DependencyGraph, FlawOrder};
use resampling_lll::engine::{make_strategy, Strategy, StrategyKind};

use crate::report::{input, parse_flaw_list, CliResult};

/// `pi_stable`, `uniform_random[:SEED]` (alias `uniform`), `first_present`
/// or `scripted:f1,f2,…`. The uniform strategy defaults to `seed`.
pub fn parse_strategy(spec: &str, seed: u64, dep: &Arc<DependencyGraph>, order: &FlawOrder) -> CliResult<Strategy> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let kind = match name {
        "pi_stable" => StrategyKind::PiStable(order.clone()),
        "uniform_random" | "uniform" => {
            let seed = if arg.is_empty() {
                seed
            } else {
                arg.parse().map_err(|_| input(format!("bad strategy seed {arg:?}")))?
            };
            StrategyKind::UniformRandom { seed }
        }
        "first_present" => StrategyKind::FirstPresent,
        "scripted" => StrategyKind::Scripted(parse_flaw_list(arg)?),
        other => return Err(input(format!("unknown strategy {other:?}"))),
    };
    if let StrategyKind::Scripted(list) = &kind {
        if let Some(f) = list.iter().find(|f| f.index() >= dep.flaw_count()) {
            return Err(input(format!("scripted flaw {f} out of range")));
        }
    }
    Ok(make_strategy(kind, Some(dep.clone()))?)
}
