use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::Context;

use crate::config::ExperimentConfig;
use crate::experiments::Outcome;

pub fn summary_markdown(outcome: &Outcome, config: &ExperimentConfig, wall: Duration) -> String {
    let report = &outcome.report;
    let verdict = if outcome.passed() { "PASS" } else { "FAIL" };
    let mut s = String::new();
    let _ = writeln!(s, "# {} run\n", outcome.kind);
    let _ = writeln!(s, "**{verdict}**\n");
    let _ = writeln!(s, "- seed: {}", config.seed);
    let _ = writeln!(s, "- rows: {}", report.rows().len());
    let _ = writeln!(s, "- probes: {}", report.probe_count());
    let _ = writeln!(s, "- max deviation: {:.6e}", report.max_deviation());
    match report.fitted_slope() {
        Some(slope) => {
            let _ = writeln!(s, "- fitted log-log slope: {slope:.4}");
        }
        None => {
            let _ = writeln!(s, "- fitted log-log slope: undefined");
        }
    }
    let _ = writeln!(s, "- wall time: {:.3} s", wall.as_secs_f64());
    let _ = writeln!(s, "\n## Checks\n");
    if outcome.checks.is_empty() {
        let _ = writeln!(s, "No assertions configured for this run.");
    }
    for check in &outcome.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "- {mark} {}: {}", check.name, check.detail);
    }
    if !outcome.notes.is_empty() {
        let _ = writeln!(s, "\n## Notes\n");
        for note in &outcome.notes {
            let _ = writeln!(s, "- {note}");
        }
    }
    s
}

/// Writes `report.csv` and `summary.md` under `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, outcome: &Outcome, config: &ExperimentConfig, wall: Duration) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv = dir.join("report.csv");
    fs::write(&csv, outcome.report.to_csv()).with_context(|| format!("writing {}", csv.display()))?;
    let md = dir.join("summary.md");
    fs::write(&md, summary_markdown(outcome, config, wall)).with_context(|| format!("writing {}", md.display()))?;
    Ok(())
}
