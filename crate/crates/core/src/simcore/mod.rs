//! Particle-based Monte-Carlo physics for the molecular link.
//!
//! A cubic environment holds a spherical transmitter and receiver on the
//! x-axis, stationary noise molecules, and the information/ACK molecules in
//! flight. Motion is non-repulsive: a move that would overlap another
//! molecule, enter a foreign body, or leave the box is rejected rather than
//! bounced.

mod grid;
mod settings;
mod world;

pub use grid::{SpatialGrid, Vec3};
pub use settings::{SimSettings, Transport, TravelMode};
pub use world::{
    init_world, Arrival, Body, Endpoint, Microtubule, Molecule, MoleculeKind, MotionState, World, WorldSnapshot,
    MAX_REDRAWS,
};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    #[error("could only place {placed} of {requested} noise molecules")]
    PlacementFailure { placed: u32, requested: u32 },
}
