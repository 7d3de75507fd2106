use resampling_lll::rainbow::generate_coloring;
use serde_json::json;

use crate::args::RainbowGenArgs;
use crate::report::{emit, json_text, require_json, CliResult, EXIT_PASS};

/// Writes `{"kind": "rainbow", "coloring": …}`, loadable as an instance.
pub fn run(args: &RainbowGenArgs) -> CliResult<u8> {
    require_json(&args.output)?;
    let g = generate_coloring(args.n, args.q, args.seed)?;
    let file = json!({"kind": "rainbow", "coloring": g.to_file(Some(args.seed))});
    emit(&args.output.out, &json_text(&file))?;
    Ok(EXIT_PASS)
}
