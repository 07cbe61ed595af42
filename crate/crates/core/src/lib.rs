//! Particle-based simulation of a stop-and-wait ARQ molecular communication
//! link, and continual-learning estimators of its round-trip time.
//!
//! The crate is split into five layers:
//!
//! - [`simcore`]: the bounded 3-D world, molecule motion under diffusive,
//!   directional and hybrid transports, non-repulsive collisions.
//! - [`arq`]: transmitter/receiver state machines driving a [`arq::Channel`],
//!   single-run RTT measurement and seeded ensembles.
//! - [`nn`]: a small fully connected regression network with analytic
//!   backpropagation, min-max normalization and checkpoints.
//! - [`cl`]: continual-learning strategies (baseline, LWF, EWC, CLeaR, DER)
//!   expressed as composite objectives plus per-task lifecycle hooks.
//! - [`bench`]: task sequences, dataset generation, scenario suites and
//!   forgetting metrics.

pub mod arq;
pub mod bench;
pub mod cl;
pub mod nn;
pub mod seed;
pub mod simcore;
