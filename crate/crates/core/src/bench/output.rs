use std::fs;
use std::path::Path;

use serde::Serialize;

use super::run::{ExperimentOutput, ReplicateResult};
use crate::error::Result;
use crate::sem::Design;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.json";
pub const TRUTH_MASS_FILE: &str = "truth_mass.csv";

/// Space-separated `{nodes}xcount` entries, e.g. `{3}x5 {0,2}x5`.
pub fn compact_design(design: &Design) -> String {
    design.iter().map(|(t, c)| format!("{t}x{c}")).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct ResultRow<'a> {
    strategy: &'a str,
    replicate: usize,
    batch: usize,
    pre_entropy: f64,
    post_entropy: f64,
    entropy_reduction: f64,
    selected_targets: String,
}

/// One row per (strategy, replicate, batch).
pub fn write_results_csv<W: std::io::Write>(results: &[ReplicateResult], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in results {
        let reductions = r.reductions();
        for (rec, red) in r.records.iter().zip(reductions) {
            out.serialize(ResultRow {
                strategy: r.strategy.name(),
                replicate: r.replicate,
                batch: rec.batch,
                pre_entropy: rec.pre_entropy,
                post_entropy: rec.post_entropy,
                entropy_reduction: red,
                selected_targets: compact_design(&rec.design),
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Posterior mass on the true functional value; batch 0 is the prior.
pub fn write_truth_mass_csv<W: std::io::Write>(results: &[ReplicateResult], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["strategy", "replicate", "batch", "truth_mass"])?;
    for r in results {
        for (b, m) in r.truth_mass.iter().enumerate() {
            out.write_record([r.strategy.name(), &r.replicate.to_string(), &b.to_string(), &format!("{m:?}")])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes results, truth-mass trace, summary and config echo into `dir`.
pub fn write_outputs(out: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_results_csv(&out.results, fs::File::create(dir.join(RESULTS_FILE))?)?;
    write_truth_mass_csv(&out.results, fs::File::create(dir.join(TRUTH_MASS_FILE))?)?;
    fs::write(dir.join(SUMMARY_FILE), serde_json::to_string_pretty(&out.summary)? + "\n")?;
    fs::write(dir.join(CONFIG_FILE), serde_json::to_string_pretty(&out.config)? + "\n")?;
    Ok(())
}
