use std::collections::VecDeque;

use super::{Carrier, Channel, Delivery};
use crate::seed::{rng_from_seed, SimRng};
use crate::simcore::{init_world, MoleculeKind, SimError, SimSettings, World};

/// The particle-based physical channel.
///
/// Bursts are queued at the emitter; copies enter the world as soon as their
/// release spot is free, so a burst sharing one motor-loading point trickles
/// out over a few steps instead of stacking molecules on top of each other.
#[derive(Debug)]
pub struct MolecularChannel {
    world: World,
    rng: SimRng,
    pending: VecDeque<MoleculeKind>,
    copies: [u32; 2],
    steps: u64,
}

impl MolecularChannel {
    pub fn new(settings: &SimSettings) -> Result<Self, SimError> {
        let mut rng = rng_from_seed(settings.seed);
        let world = init_world(settings, &mut rng)?;
        Ok(Self {
            world,
            rng,
            pending: VecDeque::new(),
            copies: [0, 0],
            steps: 0,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    fn flush_pending(&mut self) {
        let mut blocked = [false, false];
        let mut keep = VecDeque::with_capacity(self.pending.len());
        while let Some(kind) = self.pending.pop_front() {
            let lane = matches!(kind, MoleculeKind::Ack { .. }) as usize;
            if blocked[lane] || self.world.emit(kind, &mut self.rng).is_none() {
                // Preserve copy order per emitter.
                blocked[lane] = true;
                keep.push_back(kind);
            }
        }
        self.pending = keep;
    }
}

impl Channel for MolecularChannel {
    fn release(&mut self, carrier: Carrier, count: u32, _now: f64) {
        let slot = carrier as usize;
        for _ in 0..count {
            let copy = self.copies[slot];
            self.copies[slot] += 1;
            self.pending.push_back(match carrier {
                Carrier::Info => MoleculeKind::Info { msg: 0, copy },
                Carrier::Ack => MoleculeKind::Ack { msg: 0, copy },
            });
        }
        self.flush_pending();
    }

    fn step(&mut self, now: f64, dt: f64) -> Vec<Delivery> {
        self.flush_pending();
        self.world.step_all(&mut self.rng);
        self.steps += 1;
        let at = now + dt;
        self.world
            .detect_arrivals()
            .into_iter()
            .map(|a| Delivery {
                carrier: match a.kind {
                    MoleculeKind::Ack { .. } => Carrier::Ack,
                    _ => Carrier::Info,
                },
                id: u64::from(a.id),
                time: at,
            })
            .collect()
    }
}

/// Deterministic stand-in for the physics, for exercising protocol timing.
///
/// The k-th burst of each carrier either never arrives (`None`) or produces a
/// single arrival `delay` seconds after its release.
#[derive(Debug, Clone, Default)]
pub struct ScriptedChannel {
    info_fates: Vec<Option<f64>>,
    ack_fates: Vec<Option<f64>>,
    bursts: [usize; 2],
    in_flight: Vec<Delivery>,
    next_id: u64,
    /// Every release seen, as (carrier, count, time).
    pub releases: Vec<(Carrier, u32, f64)>,
}

impl ScriptedChannel {
    pub fn new(info_fates: Vec<Option<f64>>, ack_fates: Vec<Option<f64>>) -> Self {
        Self {
            info_fates,
            ack_fates,
            ..Self::default()
        }
    }

    /// A channel that loses every molecule.
    pub fn black_hole() -> Self {
        Self::default()
    }
}

impl Channel for ScriptedChannel {
    fn release(&mut self, carrier: Carrier, count: u32, now: f64) {
        self.releases.push((carrier, count, now));
        let slot = carrier as usize;
        let k = self.bursts[slot];
        self.bursts[slot] += 1;
        let fates = match carrier {
            Carrier::Info => &self.info_fates,
            Carrier::Ack => &self.ack_fates,
        };
        if let Some(Some(delay)) = fates.get(k) {
            self.in_flight.push(Delivery {
                carrier,
                id: self.next_id,
                time: now + delay,
            });
            self.next_id += 1;
        }
    }

    fn step(&mut self, now: f64, dt: f64) -> Vec<Delivery> {
        let end = now + dt + 1e-9 * dt;
        let (due, rest): (Vec<_>, Vec<_>) = self.in_flight.drain(..).partition(|d| d.time <= end);
        self.in_flight = rest;
        due
    }
}
