mod dataset;
mod report;
mod simulate;
mod train;

use std::path::{Path, PathBuf};

pub use dataset::{dataset, DatasetOutput, TaskSummary};
pub use report::{load_run, report, ReportOutput};
pub use simulate::{simulate, SimulateConfig, SimulateOutput, StatsFile};
pub use train::{train, EvalFile, TimingFile, TrainOutput, TrainRunConfig};

/// Resolves `p` against the directory holding the config file.
fn relative_to(config: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        return p.to_path_buf();
    }
    config.parent().map_or_else(|| p.to_path_buf(), |d| d.join(p))
}
