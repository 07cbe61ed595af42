use serde::{Deserialize, Serialize};

use super::SimError;

/// How molecules travel between the transmitter and the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    /// Brownian motion only.
    Diffusive,
    /// Information and ACK molecules ride motors along a microtubule.
    Directional,
    /// Information molecules ride the microtubule, ACK molecules diffuse.
    Hybrid,
}

impl Transport {
    pub const ALL: [Transport; 3] = [Transport::Diffusive, Transport::Directional, Transport::Hybrid];

    pub fn has_microtubule(self) -> bool {
        !matches!(self, Transport::Diffusive)
    }

    pub fn name(self) -> &'static str {
        match self {
            Transport::Diffusive => "diffusive",
            Transport::Directional => "directional",
            Transport::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for Transport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Transport {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "diffusive" => Ok(Transport::Diffusive),
            "directional" => Ok(Transport::Directional),
            "hybrid" => Ok(Transport::Hybrid),
            other => Err(format!("unknown transport `{other}`")),
        }
    }
}

/// Distribution of the distance a motor carries a molecule before it detaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TravelMode {
    /// Exponentially distributed with mean `motor_travel_mean`.
    #[default]
    Exponential,
    /// Always exactly `motor_travel_mean`.
    Fixed,
}

fn d_env_side() -> f64 {
    150.0
}
fn d_distance() -> f64 {
    10.0
}
fn d_body_diameter() -> f64 {
    5.0
}
fn d_mol_diameter() -> f64 {
    1.0
}
fn d_diffusion() -> f64 {
    0.5
}
fn d_velocity() -> f64 {
    1.0
}
fn d_travel_mean() -> f64 {
    4.0
}
fn d_capture_radius() -> f64 {
    0.1
}
fn d_transport() -> Transport {
    Transport::Diffusive
}
fn d_duplicates() -> u32 {
    10
}
fn d_max_retx() -> u32 {
    5
}
fn d_dt() -> f64 {
    0.1
}

/// Complete physical and protocol parameterization of one simulation run.
///
/// Lengths are in micrometres, times in seconds. Every field except `rto`
/// has a default taken from the reference parameter table; `rto` has no
/// published value and must always be supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSettings {
    #[serde(default = "d_env_side")]
    pub env_side: f64,
    /// Centre-to-centre distance between Tx and Rx.
    #[serde(default = "d_distance")]
    pub tx_rx_distance: f64,
    #[serde(default = "d_body_diameter")]
    pub tx_diameter: f64,
    #[serde(default = "d_body_diameter")]
    pub rx_diameter: f64,
    #[serde(default = "d_mol_diameter")]
    pub mol_diameter: f64,
    #[serde(default)]
    pub noise_count: u32,
    #[serde(default = "d_mol_diameter")]
    pub noise_diameter: f64,
    /// Diffusion coefficient per dimension, μm²/s.
    #[serde(default = "d_diffusion")]
    pub diffusion_coeff: f64,
    #[serde(default = "d_velocity")]
    pub motor_velocity: f64,
    #[serde(default = "d_travel_mean")]
    pub motor_travel_mean: f64,
    #[serde(default)]
    pub travel_mode: TravelMode,
    /// Extra reach of the microtubule beyond a molecule's own radius.
    #[serde(default = "d_capture_radius")]
    pub capture_radius: f64,
    #[serde(default = "d_transport")]
    pub transport: Transport,
    /// Copies released per burst (`n`).
    #[serde(default = "d_duplicates")]
    pub duplicates: u32,
    pub rto: f64,
    #[serde(default = "d_max_retx")]
    pub max_retx: u32,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SimSettings {
    /// Reference-table settings with the given retransmission timeout.
    pub fn with_rto(rto: f64) -> Self {
        Self {
            env_side: d_env_side(),
            tx_rx_distance: d_distance(),
            tx_diameter: d_body_diameter(),
            rx_diameter: d_body_diameter(),
            mol_diameter: d_mol_diameter(),
            noise_count: 0,
            noise_diameter: d_mol_diameter(),
            diffusion_coeff: d_diffusion(),
            motor_velocity: d_velocity(),
            motor_travel_mean: d_travel_mean(),
            travel_mode: TravelMode::Exponential,
            capture_radius: d_capture_radius(),
            transport: d_transport(),
            duplicates: d_duplicates(),
            rto,
            max_retx: d_max_retx(),
            dt: d_dt(),
            seed: 0,
        }
    }

    pub fn mol_radius(&self) -> f64 {
        self.mol_diameter / 2.0
    }

    pub fn noise_radius(&self) -> f64 {
        self.noise_diameter / 2.0
    }

    /// Time at which a run that never receives an ACK is abandoned.
    pub fn horizon(&self) -> f64 {
        f64::from(self.max_retx + 1) * self.rto
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |msg: String| Err(SimError::InvalidSettings(msg));
        let lengths = [
            ("env_side", self.env_side),
            ("tx_rx_distance", self.tx_rx_distance),
            ("tx_diameter", self.tx_diameter),
            ("rx_diameter", self.rx_diameter),
            ("mol_diameter", self.mol_diameter),
            ("noise_diameter", self.noise_diameter),
            ("motor_velocity", self.motor_velocity),
            ("motor_travel_mean", self.motor_travel_mean),
            ("capture_radius", self.capture_radius),
            ("rto", self.rto),
        ];
        for (name, v) in lengths {
            if !v.is_finite() || v < 0.0 {
                return invalid(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if !(self.diffusion_coeff.is_finite() && self.diffusion_coeff > 0.0) {
            return invalid(format!(
                "diffusion_coeff must be positive, got {}",
                self.diffusion_coeff
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if self.duplicates == 0 {
            return invalid("duplicates must be at least 1".into());
        }
        if self.mol_diameter <= 0.0 {
            return invalid("mol_diameter must be positive".into());
        }
        if self.rto < self.dt {
            return invalid(format!(
                "rto ({}) must be at least one time step ({})",
                self.rto, self.dt
            ));
        }
        let span = self.tx_rx_distance + self.tx_diameter / 2.0 + self.rx_diameter / 2.0;
        if span >= self.env_side {
            return invalid(format!(
                "Tx and Rx do not fit: distance + radii = {span} >= env_side {}",
                self.env_side
            ));
        }
        let contact = self.tx_diameter / 2.0 + self.rx_diameter / 2.0 + 2.0 * self.mol_diameter;
        if self.tx_rx_distance <= contact {
            return invalid(format!(
                "tx_rx_distance {} leaves no room between the bodies (needs > {contact})",
                self.tx_rx_distance
            ));
        }
        Ok(())
    }
}
