use anyhow::Context;
use nestbench_core::dataset::write_jsonl;
use nestbench_core::generator::{generate_dataset, GenSpec};
use nestbench_core::SplitParams;

use crate::args::GenArgs;
use crate::io::write_atomic;

/// Writes the dataset and returns the number of records.
pub fn gen(args: &GenArgs) -> anyhow::Result<usize> {
    let splits = match (args.all_splits, args.nesting, args.operands) {
        (true, _, _) => SplitParams::benchmark_grid(),
        (false, Some(n), Some(o)) => vec![SplitParams::new(n, o)],
        _ => return Err(crate::error::usage("either --all-splits or both --nesting and --operands are required")),
    };
    let count = usize::try_from(args.count).context("count too large")?;
    let mut records = Vec::with_capacity(count * splits.len());
    for split in splits {
        let spec = GenSpec { task: args.task, split, count, seed: args.seed };
        records.extend(generate_dataset(&spec).map_err(|e| crate::error::usage(e.to_string()))?);
    }
    let mut bytes = Vec::new();
    write_jsonl(&mut bytes, &records)?;
    write_atomic(&args.out, &bytes)?;
    log::info!("wrote {} records to {}", records.len(), args.out.display());
    Ok(records.len())
}
