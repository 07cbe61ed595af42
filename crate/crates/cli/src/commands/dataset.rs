use std::path::PathBuf;

use molcl::bench::{generate_dataset, TaskSequence};
use serde::{Deserialize, Serialize};

use crate::io::{create_dir, read_json, write_json};
use crate::manifest::RunManifest;
use crate::{CliError, DatasetArgs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub task_id: String,
    pub grid_points: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Grid indices dropped as invalid samples.
    pub dropped_points: Vec<usize>,
}

#[derive(Debug)]
pub struct DatasetOutput {
    pub tasks: Vec<TaskSummary>,
    pub files: Vec<PathBuf>,
}

/// `<task_id>.train.csv` / `<task_id>.test.csv` per task plus
/// `dataset_summary.json`.
pub fn dataset(args: &DatasetArgs) -> Result<DatasetOutput, CliError> {
    let seq: TaskSequence = read_json(&args.config)?;
    seq.validate(args.seed)?;
    let mut manifest = RunManifest::start("dataset", &seq, vec![args.seed]);
    create_dir(&args.out)?;

    let mut tasks = Vec::new();
    let mut files = Vec::new();
    for spec in &seq.tasks {
        log::info!(
            "task {}: {} grid points × {} runs",
            spec.task_id,
            spec.grid_size(),
            spec.runs_per_point
        );
        let data = generate_dataset(spec, args.seed)?;
        let (tr, te) = data.write(&args.out)?;
        manifest.record(&args.out, &tr);
        manifest.record(&args.out, &te);
        files.extend([tr, te]);
        tasks.push(TaskSummary {
            task_id: spec.task_id.clone(),
            grid_points: spec.grid_size(),
            train_rows: data.train.len(),
            test_rows: data.test.len(),
            dropped_points: data.dropped,
        });
    }
    let summary = args.out.join("dataset_summary.json");
    write_json(&summary, &tasks)?;
    manifest.record(&args.out, &summary);
    manifest.finish(&args.out)?;
    Ok(DatasetOutput { tasks, files })
}
