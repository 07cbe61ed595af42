use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::seed::derive_seed;
use crate::simcore::{SimSettings, Transport};

fn d_runs() -> u32 {
    500
}
fn d_test() -> f64 {
    0.2
}

/// One estimation task: a grid of simulation settings.
///
/// The grid is the Cartesian product of `distances` and `noise_counts`; every
/// other setting is shared by all points. `overrides` replaces any further
/// [`SimSettings`] field by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub task_id: String,
    pub transport: Transport,
    pub distances: Vec<f64>,
    pub noise_counts: Vec<u32>,
    pub n: u32,
    pub rto: f64,
    pub max_retx: u32,
    #[serde(default = "d_runs")]
    pub runs_per_point: u32,
    #[serde(default = "d_test")]
    pub test_fraction: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, serde_json::Value>,
}

impl TaskSpec {
    pub fn grid_size(&self) -> usize {
        self.distances.len() * self.noise_counts.len()
    }

    /// Settings of every grid point, distance-major, each with its own seed.
    pub fn grid(&self, seed: u64) -> Result<Vec<SimSettings>, BenchError> {
        let bad = |m: String| BenchError::InvalidTask {
            task_id: self.task_id.clone(),
            reason: m,
        };
        if self.grid_size() == 0 {
            return Err(bad("grid is empty".into()));
        }
        if self.runs_per_point == 0 {
            return Err(bad("runs_per_point must be positive".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(bad("test_fraction must lie in (0, 1)".into()));
        }
        let mut base = serde_json::to_value(SimSettings::with_rto(self.rto)).expect("settings serialize");
        let obj = base.as_object_mut().expect("settings are an object");
        for (k, v) in &self.overrides {
            obj.insert(k.clone(), v.clone());
        }
        obj.insert("transport".into(), serde_json::to_value(self.transport).expect("enum"));
        obj.insert("duplicates".into(), self.n.into());
        obj.insert("rto".into(), self.rto.into());
        obj.insert("max_retx".into(), self.max_retx.into());
        let base: SimSettings = serde_json::from_value(base).map_err(|e| bad(e.to_string()))?;

        let tag = format!("dataset/{}", self.task_id);
        let mut out = Vec::with_capacity(self.grid_size());
        for &d in &self.distances {
            for &noise in &self.noise_counts {
                let mut s = base.clone();
                s.tx_rx_distance = d;
                s.noise_count = noise;
                s.seed = derive_seed(seed, &tag, out.len() as u64);
                s.validate().map_err(|e| bad(e.to_string()))?;
                out.push(s);
            }
        }
        Ok(out)
    }
}

/// Ordered list of tasks presented to a learner one after another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSequence {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub tasks: Vec<TaskSpec>,
}

impl TaskSequence {
    pub fn validate(&self, seed: u64) -> Result<(), BenchError> {
        if self.tasks.is_empty() {
            return Err(BenchError::InvalidSequence("sequence has no tasks".into()));
        }
        let mut ids = HashSet::new();
        for t in &self.tasks {
            if !ids.insert(t.task_id.as_str()) {
                return Err(BenchError::InvalidSequence(format!(
                    "duplicate task_id `{}`",
                    t.task_id
                )));
            }
            t.grid(seed)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::InvalidSequence(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> TaskSpec {
        TaskSpec {
            task_id: "t".into(),
            transport: Transport::Directional,
            distances: vec![10.0, 20.0],
            noise_counts: vec![0, 100, 1000],
            n: 10,
            rto: 500.0,
            max_retx: 5,
            runs_per_point: 4,
            test_fraction: 0.2,
            overrides: BTreeMap::new(),
        }
    }

    #[test]
    fn grid_is_distance_major_with_distinct_seeds() {
        let g = spec().grid(1).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!((g[0].tx_rx_distance, g[0].noise_count), (10.0, 0));
        assert_eq!((g[2].tx_rx_distance, g[2].noise_count), (10.0, 1000));
        assert_eq!((g[3].tx_rx_distance, g[3].noise_count), (20.0, 0));
        let seeds: HashSet<u64> = g.iter().map(|s| s.seed).collect();
        assert_eq!(seeds.len(), 6);
        assert!(g
            .iter()
            .all(|s| s.transport == Transport::Directional && s.rto == 500.0));
    }

    #[test]
    fn overrides_apply_and_unknown_fields_fail() {
        let mut t = spec();
        t.overrides.insert("env_side".into(), 120.0.into());
        assert_eq!(t.grid(0).unwrap()[0].env_side, 120.0);
        t.overrides.insert("bogus".into(), 1.into());
        assert!(matches!(t.grid(0), Err(BenchError::InvalidTask { .. })));
    }

    #[test]
    fn invalid_tasks_rejected() {
        let mut t = spec();
        t.noise_counts.clear();
        assert!(t.grid(0).is_err());
        let mut t = spec();
        t.distances = vec![500.0];
        assert!(t.grid(0).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let seq = TaskSequence {
            description: None,
            tasks: vec![spec(), spec()],
        };
        assert!(matches!(seq.validate(0), Err(BenchError::InvalidSequence(_))));
    }

    #[test]
    fn json_schema_with_defaults() {
        let text = r#"{"tasks":[{"task_id":"a","transport":"hybrid","distances":[10],
            "noise_counts":[0],"n":5,"rto":100,"max_retx":2}]}"#;
        let seq = TaskSequence::from_json(text).unwrap();
        assert_eq!(seq.tasks[0].runs_per_point, 500);
        assert_eq!(seq.tasks[0].test_fraction, 0.2);
        seq.validate(0).unwrap();
    }
}
