//! Stop-and-wait ARQ over the simulated channel.
//!
//! One run transmits a single message: the Tx releases `n` information
//! copies at t = 0 and retransmits a fresh burst every RTO without an ACK, up
//! to `max_retx` times. The Rx answers the first information arrival with `n`
//! ACK copies and re-releases them each RTO (same cap) since no next message
//! ever follows. The run ends at the first ACK arrival at the Tx, or one RTO
//! after the last permitted retransmission.

mod channel;
mod ensemble;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use channel::{MolecularChannel, ScriptedChannel};
pub use ensemble::{
    ensemble_csv_header, ensemble_csv_row, run_ensemble, run_ensemble_outcomes, run_settings, EnsembleError,
    EnsembleStats,
};

use crate::simcore::{SimError, SimSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Carrier {
    Info = 0,
    Ack = 1,
}

/// A molecule captured by its destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub carrier: Carrier,
    pub id: u64,
    pub time: f64,
}

/// Anything that can carry bursts of molecules between Tx and Rx.
pub trait Channel {
    /// Emits `count` copies of `carrier` from its sender at time `now`.
    fn release(&mut self, carrier: Carrier, count: u32, now: f64);
    /// Advances from `now` to `now + dt`, returning the captures in that window.
    fn step(&mut self, now: f64, dt: f64) -> Vec<Delivery>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TxPhase {
    AwaitingAck,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TxState {
    pub phase: TxPhase,
    pub retx_used: u32,
    pub rto_deadline: f64,
    pub rtt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RxState {
    pub acked_msgs: BTreeSet<u32>,
    pub ack_rto_deadline: Option<f64>,
    pub ack_retx_used: u32,
}

/// Round-trip time of a run, or the time at which it was abandoned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rtt {
    Delivered(f64),
    Censored(f64),
}

impl Rtt {
    pub fn value(self) -> f64 {
        match self {
            Rtt::Delivered(t) | Rtt::Censored(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub rtt: Rtt,
    pub delivered: bool,
    pub retransmissions: u32,
    pub info_arrival_time: Option<f64>,
    /// Release times of every information burst, first one at t = 0.
    pub tx_bursts: Vec<f64>,
    /// Release times of every ACK burst.
    pub rx_bursts: Vec<f64>,
    pub info_released: u32,
    pub ack_released: u32,
}

impl SimOutcome {
    pub fn delivered_rtt(&self) -> Option<f64> {
        match self.rtt {
            Rtt::Delivered(t) => Some(t),
            Rtt::Censored(_) => None,
        }
    }
}

/// Timing parameters of the protocol, independent of the physics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub duplicates: u32,
    pub rto: f64,
    pub max_retx: u32,
    pub dt: f64,
}

impl From<&SimSettings> for ProtocolParams {
    fn from(s: &SimSettings) -> Self {
        Self {
            duplicates: s.duplicates,
            rto: s.rto,
            max_retx: s.max_retx,
            dt: s.dt,
        }
    }
}

fn reached(now: f64, deadline: f64, dt: f64) -> bool {
    now >= deadline - 1e-9 * dt
}

/// Drives the SW-ARQ exchange of one message over `channel`.
pub fn run_protocol<C: Channel>(channel: &mut C, params: ProtocolParams) -> SimOutcome {
    let n = params.duplicates;
    let dt = params.dt;
    let mut tx = TxState {
        phase: TxPhase::AwaitingAck,
        retx_used: 0,
        rto_deadline: params.rto,
        rtt: None,
    };
    let mut rx = RxState::default();
    let mut out = SimOutcome {
        rtt: Rtt::Censored(0.0),
        delivered: false,
        retransmissions: 0,
        info_arrival_time: None,
        tx_bursts: vec![0.0],
        rx_bursts: Vec::new(),
        info_released: n,
        ack_released: 0,
    };
    channel.release(Carrier::Info, n, 0.0);

    let mut step: u64 = 0;
    loop {
        let now = step as f64 * dt;
        if reached(now, tx.rto_deadline, dt) {
            if tx.retx_used >= params.max_retx {
                tx.phase = TxPhase::Failed;
                out.rtt = Rtt::Censored(now);
                break;
            }
            channel.release(Carrier::Info, n, now);
            tx.retx_used += 1;
            tx.rto_deadline = now + params.rto;
            out.tx_bursts.push(now);
            out.info_released += n;
        }
        if let Some(deadline) = rx.ack_rto_deadline {
            if reached(now, deadline, dt) {
                if rx.ack_retx_used < params.max_retx {
                    channel.release(Carrier::Ack, n, now);
                    rx.ack_retx_used += 1;
                    rx.ack_rto_deadline = Some(now + params.rto);
                    out.rx_bursts.push(now);
                    out.ack_released += n;
                } else {
                    rx.ack_rto_deadline = None;
                }
            }
        }

        let deliveries = channel.step(now, dt);
        let at = now + dt;
        for d in &deliveries {
            match d.carrier {
                Carrier::Info => {
                    if rx.acked_msgs.insert(0) {
                        out.info_arrival_time = Some(d.time);
                        channel.release(Carrier::Ack, n, at);
                        rx.ack_rto_deadline = Some(at + params.rto);
                        out.rx_bursts.push(at);
                        out.ack_released += n;
                    }
                }
                Carrier::Ack => {
                    if tx.phase == TxPhase::AwaitingAck {
                        tx.phase = TxPhase::Done;
                        tx.rtt = Some(d.time);
                    }
                }
            }
        }
        if let Some(rtt) = tx.rtt {
            out.rtt = Rtt::Delivered(rtt);
            out.delivered = true;
            break;
        }
        step += 1;
    }
    out.retransmissions = tx.retx_used;
    out
}

/// Runs one single-message transmission over the particle simulation.
pub fn run_simulation(settings: &SimSettings) -> Result<SimOutcome, SimError> {
    let mut channel = MolecularChannel::new(settings)?;
    Ok(run_protocol(&mut channel, settings.into()))
}
