use std::path::PathBuf;

use molcl::arq::{run_ensemble_outcomes, run_settings, EnsembleStats};
use molcl::simcore::SimSettings;
use serde::{Deserialize, Serialize};

use crate::io::{create_dir, read_json, write_csv, write_json};
use crate::manifest::RunManifest;
use crate::{CliError, SimulateArgs};

fn d_runs() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub settings: SimSettings,
    #[serde(default = "d_runs")]
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub settings: SimSettings,
    pub stats: EnsembleStats,
}

#[derive(Debug)]
pub struct SimulateOutput {
    pub stats: EnsembleStats,
    pub stats_path: PathBuf,
    pub runs_path: PathBuf,
}

/// `stats.json` with the ensemble summary and `runs.csv` with one line per run.
/// An invalid sample still writes both files before failing.
pub fn simulate(args: &SimulateArgs) -> Result<SimulateOutput, CliError> {
    let mut config: SimulateConfig = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        config.settings.seed = seed;
    }
    config.settings.validate()?;
    if config.runs == 0 {
        return Err(CliError::Config("runs must be positive".into()));
    }
    let mut manifest = RunManifest::start("simulate", &config, vec![config.settings.seed]);
    create_dir(&args.out)?;

    let outcomes = run_ensemble_outcomes(&config.settings, config.runs)?;
    let stats = EnsembleStats::from_outcomes(&outcomes);

    let runs_path = args.out.join("runs.csv");
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            vec![
                i.to_string(),
                run_settings(&config.settings, i as u64).seed.to_string(),
                o.delivered.to_string(),
                o.rtt.value().to_string(),
                o.retransmissions.to_string(),
                o.info_arrival_time.map_or(String::new(), |t| t.to_string()),
            ]
        })
        .collect();
    write_csv(
        &runs_path,
        &[
            "run",
            "seed",
            "delivered",
            "rtt",
            "retransmissions",
            "info_arrival_time",
        ],
        &rows,
    )?;
    let stats_path = args.out.join("stats.json");
    write_json(
        &stats_path,
        &StatsFile {
            settings: config.settings.clone(),
            stats: stats.clone(),
        },
    )?;
    manifest.record(&args.out, &stats_path);
    manifest.record(&args.out, &runs_path);
    manifest.finish(&args.out)?;

    log::info!(
        "{} runs, delivery rate {:.3}, median RTT {:?}",
        stats.runs,
        stats.delivery_rate,
        stats.median_rtt
    );
    if !stats.is_valid() {
        return Err(CliError::InvalidSample {
            rate: stats.delivery_rate,
            delivered: stats.delivered,
            runs: stats.runs,
        });
    }
    Ok(SimulateOutput {
        stats,
        stats_path,
        runs_path,
    })
}
