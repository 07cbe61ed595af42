use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use molcl::bench::{summarize, RunRecord, StrategySummary};
use serde::Serialize;

use super::{EvalFile, TimingFile};
use crate::io::{create_dir, read_json, write_csv, write_json};
use crate::manifest::RunManifest;
use crate::{CliError, ReportArgs};

#[derive(Debug)]
pub struct ReportOutput {
    pub summaries: Vec<StrategySummary>,
    pub records: Vec<RunRecord>,
    pub files: Vec<PathBuf>,
}

/// Reads `eval_matrix.json` and, if present, `timing.json` of one run.
pub fn load_run(dir: &Path) -> Result<RunRecord, CliError> {
    let eval: EvalFile = read_json(&dir.join("eval_matrix.json"))?;
    let timing_path = dir.join("timing.json");
    let timing: TimingFile = if timing_path.exists() {
        read_json(&timing_path)?
    } else {
        TimingFile::default()
    };
    Ok(RunRecord {
        strategy: eval.strategy,
        seed: eval.seed,
        matrix: eval.metrics.matrix,
        all_errors: eval.all_errors,
        task_seconds: timing.task_seconds,
    })
}

#[derive(Serialize)]
struct ReportConfig<'a> {
    runs: &'a [PathBuf],
}

fn f(v: f64) -> String {
    v.to_string()
}

/// Accuracy, timing and indirect-learning tables plus plot data.
pub fn report(args: &ReportArgs) -> Result<ReportOutput, CliError> {
    let records: Vec<RunRecord> = args.runs.iter().map(|d| load_run(d)).collect::<Result<_, _>>()?;
    let mut manifest = RunManifest::start(
        "report",
        &ReportConfig { runs: &args.runs },
        records.iter().map(|r| r.seed).collect(),
    );
    let summaries = summarize(&records).map_err(|e| CliError::Data(e.to_string()))?;
    create_dir(&args.out)?;
    let mut files = Vec::new();
    let mut emit = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<(), CliError> {
        let p = args.out.join(name);
        write_csv(&p, header, &rows)?;
        files.push(p);
        Ok(())
    };

    emit(
        "accuracy.csv",
        &[
            "strategy",
            "runs",
            "plasticity_mean",
            "plasticity_std",
            "stability_mean",
            "stability_std",
            "increase_rate_mean",
            "increase_rate_std",
        ],
        summaries
            .iter()
            .map(|s| {
                vec![
                    s.strategy.to_string(),
                    s.runs.to_string(),
                    f(s.plasticity.mean),
                    f(s.plasticity.std),
                    f(s.stability.mean),
                    f(s.stability.std),
                    f(s.increase_rate.mean),
                    f(s.increase_rate.std),
                ]
            })
            .collect(),
    )?;
    emit(
        "training_time.csv",
        &[
            "strategy",
            "total_seconds_mean",
            "total_seconds_std",
            "seconds_per_task_mean",
            "seconds_per_task_std",
        ],
        summaries
            .iter()
            .map(|s| {
                vec![
                    s.strategy.to_string(),
                    f(s.total_seconds.mean),
                    f(s.total_seconds.std),
                    f(s.seconds_per_task.mean),
                    f(s.seconds_per_task.std),
                ]
            })
            .collect(),
    )?;
    emit(
        "indirect_learning.csv",
        &["strategy", "gain_t4_mean", "gain_t4_std"],
        summaries
            .iter()
            .filter_map(|s| {
                s.indirect_gain_t4
                    .map(|g| vec![s.strategy.to_string(), f(g.mean), f(g.std)])
            })
            .collect(),
    )?;
    emit(
        "stability_vs_time.csv",
        &["strategy", "seed", "stability", "total_seconds"],
        records
            .iter()
            .map(|r| {
                let last = r.matrix.last_row().unwrap_or_default();
                vec![
                    r.strategy.to_string(),
                    r.seed.to_string(),
                    f(last.iter().sum::<f64>() / last.len() as f64),
                    f(r.task_seconds.iter().sum()),
                ]
            })
            .collect(),
    )?;
    emit(
        "forgetting_ratio.csv",
        &["strategy", "k", "mean", "std"],
        summaries
            .iter()
            .flat_map(|s| {
                s.forgetting_ratio_by_k
                    .iter()
                    .map(|(k, m)| vec![s.strategy.to_string(), k.to_string(), f(m.mean), f(m.std)])
            })
            .collect(),
    )?;
    let summary_path = args.out.join("summary.json");
    write_json(&summary_path, &summaries)?;
    files.push(summary_path);
    for p in &files {
        manifest.record(&args.out, p);
    }
    manifest.finish(&args.out)?;
    println!("{}", render_table(&summaries));
    Ok(ReportOutput {
        summaries,
        records,
        files,
    })
}

/// Plain-text accuracy and timing table.
pub fn render_table(summaries: &[StrategySummary]) -> String {
    let mut s = format!(
        "{:<9} {:>4} {:>22} {:>22} {:>10} {:>12}\n",
        "strategy", "runs", "plasticity", "stability", "increase%", "train s"
    );
    for x in summaries {
        let _ = writeln!(
            s,
            "{:<9} {:>4} {:>10.5} ± {:<9.5} {:>10.5} ± {:<9.5} {:>10.2} {:>12.3}",
            x.strategy.to_string(),
            x.runs,
            x.plasticity.mean,
            x.plasticity.std,
            x.stability.mean,
            x.stability.std,
            x.increase_rate.mean,
            x.total_seconds.mean
        );
    }
    s
}
