use serde::{Deserialize, Serialize};

use super::{Normalizer, Range};
use crate::simcore::{SimSettings, Transport};

pub const FEATURE_COUNT: usize = 12;

/// Column names of the feature vector, in order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "env_side",
    "tx_rx_distance",
    "log10_noise",
    "transport_diffusive",
    "transport_directional",
    "transport_hybrid",
    "duplicates",
    "rto",
    "max_retx",
    "diffusion_coeff",
    "motor_velocity",
    "motor_travel_mean",
];

/// Raw (unnormalized) estimator inputs derived from one simulation setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn from_settings(s: &SimSettings) -> Self {
        let onehot = |t: Transport| if s.transport == t { 1.0 } else { 0.0 };
        Self([
            s.env_side,
            s.tx_rx_distance,
            (1.0 + f64::from(s.noise_count)).log10(),
            onehot(Transport::Diffusive),
            onehot(Transport::Directional),
            onehot(Transport::Hybrid),
            f64::from(s.duplicates),
            s.rto,
            f64::from(s.max_retx),
            s.diffusion_coeff,
            s.motor_velocity,
            s.motor_travel_mean,
        ])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Global bounds of every feature and of the RTT target.
///
/// Constants are fixed for the whole task stream so that every task sees the
/// same input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureBounds {
    pub env_side: Range,
    pub tx_rx_distance: Range,
    /// Bounds on `log10(1 + noise_count)`.
    pub log10_noise: Range,
    pub duplicates: Range,
    pub rto: Range,
    pub max_retx: Range,
    pub diffusion_coeff: Range,
    pub motor_velocity: Range,
    pub motor_travel_mean: Range,
    /// Upper end of the RTT output range; the lower end is 0.
    pub rtt_max: f64,
}

impl Default for FeatureBounds {
    fn default() -> Self {
        Self {
            env_side: Range::new(100.0, 200.0),
            tx_rx_distance: Range::new(10.0, 90.0),
            log10_noise: Range::new(0.0, (1.0 + 1e5f64).log10()),
            duplicates: Range::new(1.0, 20.0),
            rto: Range::new(0.0, 5_000.0),
            max_retx: Range::new(0.0, 10.0),
            diffusion_coeff: Range::new(0.1, 1.0),
            motor_velocity: Range::new(0.5, 2.0),
            motor_travel_mean: Range::new(1.0, 10.0),
            rtt_max: 20_000.0,
        }
    }
}

impl FeatureBounds {
    pub fn normalizer(&self) -> Normalizer {
        Normalizer {
            inputs: vec![
                self.env_side,
                self.tx_rx_distance,
                self.log10_noise,
                Range::UNIT,
                Range::UNIT,
                Range::UNIT,
                self.duplicates,
                self.rto,
                self.max_retx,
                self.diffusion_coeff,
                self.motor_velocity,
                self.motor_travel_mean,
            ],
            output: Range::new(0.0, self.rtt_max),
        }
    }
}
