use resampling_lll::verify::{
    check_atomicity, check_causality_graph, check_regenerating, check_strong_commutativity,
    check_weak_commutativity, VerificationReport,
};
use serde::Serialize;

use crate::args::VerifyArgs;
use crate::report::{emit, input, json_text, load, require_json, CliResult, Provenance, EXIT_FAIL, EXIT_PASS};

#[derive(Serialize)]
struct VerifyResult {
    instance: String,
    kind: &'static str,
    states: usize,
    flaws: usize,
    reports: Vec<VerificationReport>,
}

pub fn run(args: &VerifyArgs) -> CliResult<u8> {
    require_json(&args.output)?;
    let (inst, bytes) = load(&args.instance)?;
    let prov = Provenance::new("verify", args, Some(&bytes));
    let explicit = inst.explicit(args.max_states as usize)?;
    let mut reports = Vec::new();
    for check in &args.checks {
        let r = match check.trim() {
            "atomic" | "atomicity" => check_atomicity(&explicit)?,
            "causality" => check_causality_graph(&explicit, &inst.dep)?,
            "weak" => check_weak_commutativity(&explicit, &inst.dep)?,
            "strong" => check_strong_commutativity(&explicit, &inst.dep)?,
            "regenerating" => check_regenerating(&explicit)?,
            other => return Err(input(format!("unknown check {other:?}"))),
        };
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    let result = VerifyResult {
        instance: args.instance.display().to_string(),
        kind: inst.kind(),
        states: explicit.state_count(),
        flaws: explicit.flaw_count(),
        reports,
    };
    emit(&args.output.out, &json_text(&prov.wrap(Vec::new(), passed, &result)))?;
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}
