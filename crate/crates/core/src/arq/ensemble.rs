use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_simulation, SimOutcome};
use crate::simcore::{SimError, SimSettings};

/// Summary of independent runs sharing one set of settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub runs: usize,
    pub delivered: usize,
    pub delivery_rate: f64,
    /// Median RTT over delivered runs only.
    pub median_rtt: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub mean_retransmissions: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error("an ensemble needs at least one run")]
    NoRuns,
    #[error("invalid sample: only {:.1}% of runs delivered", .0.delivery_rate * 100.0)]
    InvalidSample(Box<EnsembleStats>),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Linear interpolation between closest ranks on sorted data.
fn quantile(sorted: &[f64], p: f64) -> Option<f64> {
    match sorted.len() {
        0 => None,
        1 => Some(sorted[0]),
        m => {
            let pos = p * (m - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            Some(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
        }
    }
}

impl EnsembleStats {
    pub fn from_outcomes(outcomes: &[SimOutcome]) -> Self {
        let mut rtts: Vec<f64> = outcomes.iter().filter_map(SimOutcome::delivered_rtt).collect();
        rtts.sort_by(f64::total_cmp);
        let runs = outcomes.len();
        let retx: u64 = outcomes.iter().map(|o| u64::from(o.retransmissions)).sum();
        Self {
            runs,
            delivered: rtts.len(),
            delivery_rate: if runs == 0 {
                0.0
            } else {
                rtts.len() as f64 / runs as f64
            },
            median_rtt: quantile(&rtts, 0.5),
            q1: quantile(&rtts, 0.25),
            q3: quantile(&rtts, 0.75),
            mean_retransmissions: if runs == 0 { 0.0 } else { retx as f64 / runs as f64 },
        }
    }

    /// A median over delivered runs only means something when most runs deliver.
    pub fn is_valid(&self) -> bool {
        self.runs > 0 && self.delivery_rate >= 0.5
    }
}

/// Settings for run `index` of an ensemble: the base seed offset by the index.
pub fn run_settings(settings: &SimSettings, index: u64) -> SimSettings {
    let mut s = settings.clone();
    s.seed = settings.seed.wrapping_add(index);
    s
}

/// Executes `runs` independent simulations in parallel, returned in run order.
pub fn run_ensemble_outcomes(settings: &SimSettings, runs: usize) -> Result<Vec<SimOutcome>, SimError> {
    settings.validate()?;
    (0..runs as u64)
        .into_par_iter()
        .map(|i| run_simulation(&run_settings(settings, i)))
        .collect()
}

pub fn run_ensemble(settings: &SimSettings, runs: usize) -> Result<EnsembleStats, EnsembleError> {
    if runs == 0 {
        return Err(EnsembleError::NoRuns);
    }
    let outcomes = run_ensemble_outcomes(settings, runs)?;
    let stats = EnsembleStats::from_outcomes(&outcomes);
    if stats.is_valid() {
        Ok(stats)
    } else {
        Err(EnsembleError::InvalidSample(Box::new(stats)))
    }
}

pub fn ensemble_csv_header() -> Vec<&'static str> {
    vec![
        "env_side",
        "tx_rx_distance",
        "tx_diameter",
        "rx_diameter",
        "mol_diameter",
        "noise_count",
        "noise_diameter",
        "diffusion_coeff",
        "motor_velocity",
        "motor_travel_mean",
        "transport",
        "duplicates",
        "rto",
        "max_retx",
        "dt",
        "seed",
        "median_rtt",
        "delivery_rate",
        "q1",
        "q3",
    ]
}

pub fn ensemble_csv_row(s: &SimSettings, stats: &EnsembleStats) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    vec![
        s.env_side.to_string(),
        s.tx_rx_distance.to_string(),
        s.tx_diameter.to_string(),
        s.rx_diameter.to_string(),
        s.mol_diameter.to_string(),
        s.noise_count.to_string(),
        s.noise_diameter.to_string(),
        s.diffusion_coeff.to_string(),
        s.motor_velocity.to_string(),
        s.motor_travel_mean.to_string(),
        s.transport.to_string(),
        s.duplicates.to_string(),
        s.rto.to_string(),
        s.max_retx.to_string(),
        s.dt.to_string(),
        s.seed.to_string(),
        opt(stats.median_rtt),
        stats.delivery_rate.to_string(),
        opt(stats.q1),
        opt(stats.q3),
    ]
}
