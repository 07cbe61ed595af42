//! Simulator → dataset files → continual-learning suite, end to end.

use molcl::arq::{run_ensemble, EnsembleStats};
use molcl::bench::{
    generate_dataset, run_scenario_suite, stability, summarize, PreparedTask, RunRecord, Suite, SuiteConfig, TaskData,
    TaskSpec,
};
use molcl::cl::{StrategyKind, StrategyState};
use molcl::nn::{Checkpoint, FeatureBounds, TrainConfig, FEATURE_NAMES};
use molcl::simcore::{SimSettings, Transport};

fn spec(id: &str, transport: Transport, rto: f64) -> TaskSpec {
    serde_json::from_value(serde_json::json!({
        "task_id": id,
        "transport": transport,
        "distances": [10.0, 12.0, 14.0, 16.0],
        "noise_counts": [0, 50],
        "n": 5,
        "rto": rto,
        "max_retx": 5,
        "runs_per_point": 6,
    }))
    .unwrap()
}

fn small_config(seed: u64) -> SuiteConfig {
    SuiteConfig {
        train: TrainConfig {
            epochs: 15,
            batch_size: 4,
            learning_rate: 0.01,
            ..TrainConfig::default()
        },
        hidden: 6,
        seed,
        ..SuiteConfig::default()
    }
}

fn prepared(dir: &std::path::Path) -> Vec<PreparedTask> {
    let norm = FeatureBounds::default().normalizer();
    let specs = [
        spec("A", Transport::Directional, 200.0),
        spec("B", Transport::Hybrid, 300.0),
        spec("C", Transport::Directional, 400.0),
    ];
    specs
        .iter()
        .map(|s| {
            let data = generate_dataset(s, 17).unwrap();
            data.write(dir).unwrap();
            TaskData::read(dir, &s.task_id).unwrap().prepare(&norm)
        })
        .collect()
}

#[test]
fn dataset_rows_match_direct_ensembles() {
    let task = spec("A", Transport::Directional, 200.0);
    let data = generate_dataset(&task, 3).unwrap();
    let grid = task.grid(3).unwrap();
    assert_eq!(data.train.len() + data.test.len() + data.dropped.len(), grid.len());

    // Every row's label is the median of an ensemble rerun from its settings.
    let dist = FEATURE_NAMES.iter().position(|n| *n == "tx_rx_distance").unwrap();
    let noise = FEATURE_NAMES.iter().position(|n| *n == "log10_noise").unwrap();
    for row in data.train.iter().chain(&data.test) {
        let f = row.features.as_slice();
        let s: &SimSettings = grid
            .iter()
            .find(|s| s.tx_rx_distance == f[dist] && (1.0 + s.noise_count as f64).log10() == f[noise])
            .expect("row comes from a grid point");
        let stats: EnsembleStats = run_ensemble(s, task.runs_per_point as usize).unwrap();
        assert_eq!(stats.median_rtt, Some(row.median_rtt));
    }
}

#[test]
fn csv_files_reload_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate_dataset(&spec("B", Transport::Hybrid, 300.0), 5).unwrap();
    data.write(dir.path()).unwrap();
    let back = TaskData::read(dir.path(), "B").unwrap();
    assert_eq!(back.train, data.train);
    assert_eq!(back.test, data.test);
}

#[test]
fn every_strategy_completes_a_simulated_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let tasks = prepared(dir.path());
    let mut records = Vec::new();
    for kind in StrategyKind::ALL {
        let run = run_scenario_suite(&tasks, kind, &small_config(1), FeatureBounds::default().normalizer()).unwrap();
        assert_eq!(run.matrix.len(), 3);
        assert_eq!(run.all_errors.len(), 3);
        assert!(run
            .all_errors
            .iter()
            .all(|r| r.len() == 3 && r.iter().all(|e| e.is_finite())));
        // The evaluation matrix is the lower triangle of the full error table.
        for (i, row) in run.matrix.rows().iter().enumerate() {
            assert_eq!(row[..], run.all_errors[i][..=i]);
        }
        assert!(stability(&run.matrix).unwrap() > 0.0);
        records.push(RunRecord {
            strategy: kind,
            seed: 1,
            matrix: run.matrix,
            all_errors: run.all_errors,
            task_seconds: run.reports.iter().map(|r| r.seconds).collect(),
        });
    }
    let summary = summarize(&records).unwrap();
    assert_eq!(summary.len(), StrategyKind::ALL.len());
    assert!(summary.iter().all(|s| s.runs == 1 && s.stability.std == 0.0));
}

#[test]
fn checkpoint_resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let tasks = prepared(dir.path());
    let norm = FeatureBounds::default().normalizer();
    for kind in [StrategyKind::Ewc, StrategyKind::Clear, StrategyKind::Der] {
        let config = small_config(4);
        let whole = run_scenario_suite(&tasks, kind, &config, norm.clone()).unwrap();

        let mut first = Suite::new(kind, config.clone(), norm.clone()).unwrap();
        first.step(&tasks).unwrap();
        let path = dir.path().join(format!("{kind}.json"));
        first.checkpoint().save(&path).unwrap();
        drop(first);

        let ckpt: Checkpoint<StrategyState> = Checkpoint::load(&path).unwrap();
        let mut resumed = Suite::resume(config, ckpt).unwrap();
        while resumed.completed() < tasks.len() {
            resumed.step(&tasks).unwrap();
        }
        assert_eq!(resumed.matrix(), &whole.matrix, "{kind}");
        assert_eq!(resumed.model().params(), whole.model.params(), "{kind}");
    }
}
