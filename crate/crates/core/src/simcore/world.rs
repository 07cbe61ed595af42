use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::Serialize;

use super::grid::{dist, dist2, SpatialGrid, Vec3};
use super::{SimError, SimSettings, Transport, TravelMode};
use crate::seed::SimRng;

/// Gap left between a freshly released molecule and its emitter's surface.
const RELEASE_CLEARANCE: f64 = 1e-6;
/// Redraws allowed for a blocked diffusive displacement.
pub const MAX_REDRAWS: usize = 10;
/// Surface points tried per step when releasing a diffusing molecule.
const RELEASE_TRIES: usize = 16;
/// Attempts per noise molecule before placement is declared impossible.
const PLACEMENT_TRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MoleculeKind {
    Info { msg: u32, copy: u32 },
    Ack { msg: u32, copy: u32 },
    Noise,
}

impl MoleculeKind {
    /// Direction of travel along the Tx→Rx axis when riding a motor.
    fn heading(self) -> f64 {
        match self {
            MoleculeKind::Ack { .. } => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MotionState {
    Diffusing,
    OnMicrotubule { remaining: f64, direction: i8 },
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Molecule {
    pub id: u32,
    pub kind: MoleculeKind,
    pub position: Vec3,
    pub state: MotionState,
    pub radius: f64,
}

/// Which machine a molecule was captured by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Endpoint {
    Tx,
    Rx,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Body {
    pub center: Vec3,
    pub radius: f64,
}

/// Straight filament on the Tx→Rx axis between the two sphere surfaces.
///
/// Riding molecules keep their centre on one of two lanes offset from the
/// axis along ±z: information molecules (heading to Rx) on the +z lane, ACK
/// molecules on the −z lane, so opposing traffic does not collide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Microtubule {
    pub endpoint_tx: Vec3,
    pub endpoint_rx: Vec3,
    pub capture_radius: f64,
    pub lane_offset: f64,
}

impl Microtubule {
    /// Closest point on the segment to `p`.
    pub fn nearest_point(&self, p: &Vec3) -> Vec3 {
        let a = self.endpoint_tx;
        let b = self.endpoint_rx;
        let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let ap = [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
        let t = if len2 > 0.0 {
            ((ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]]
    }

    pub fn distance_to(&self, p: &Vec3) -> f64 {
        dist(p, &self.nearest_point(p))
    }

    /// Lane position above the axis point at x-coordinate `x`.
    pub fn lane_point(&self, x: f64, heading: f64) -> Vec3 {
        let x = x.clamp(self.endpoint_tx[0], self.endpoint_rx[0]);
        [x, self.endpoint_tx[1], self.endpoint_tx[2] + heading * self.lane_offset]
    }
}

/// The simulated environment: Tx, Rx, optional microtubule and all molecules.
#[derive(Debug, Clone)]
pub struct World {
    settings: SimSettings,
    pub tx: Body,
    pub rx: Body,
    pub microtubule: Option<Microtubule>,
    molecules: Vec<Option<Molecule>>,
    mobile: Vec<u32>,
    grid: SpatialGrid,
    travel: Exp<f64>,
}

/// A molecule captured by its destination during the last step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arrival {
    pub id: u32,
    pub kind: MoleculeKind,
    pub endpoint: Endpoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorldSnapshot {
    pub step: u64,
    pub time: f64,
    pub env_side: f64,
    pub tx: Body,
    pub rx: Body,
    pub microtubule: Option<Microtubule>,
    pub molecules: Vec<Molecule>,
}

/// Builds the world for `settings`: places Tx/Rx and scatters stationary noise.
pub fn init_world(settings: &SimSettings, rng: &mut SimRng) -> Result<World, SimError> {
    settings.validate()?;
    let mid = settings.env_side / 2.0;
    let half = settings.tx_rx_distance / 2.0;
    let tx = Body {
        center: [mid - half, mid, mid],
        radius: settings.tx_diameter / 2.0,
    };
    let rx = Body {
        center: [mid + half, mid, mid],
        radius: settings.rx_diameter / 2.0,
    };
    let microtubule = settings.transport.has_microtubule().then(|| Microtubule {
        endpoint_tx: [tx.center[0] + tx.radius, mid, mid],
        endpoint_rx: [rx.center[0] - rx.radius, mid, mid],
        capture_radius: settings.capture_radius,
        lane_offset: settings.mol_radius() + settings.capture_radius / 2.0,
    });
    let max_diameter = settings.mol_diameter.max(settings.noise_diameter);
    let rate = 1.0 / settings.motor_travel_mean.max(f64::MIN_POSITIVE);
    let mut world = World {
        settings: settings.clone(),
        tx,
        rx,
        microtubule,
        molecules: Vec::with_capacity(settings.noise_count as usize + 64),
        mobile: Vec::new(),
        grid: SpatialGrid::new(settings.env_side, max_diameter),
        travel: Exp::new(rate).map_err(|e| SimError::InvalidSettings(e.to_string()))?,
    };
    world.place_noise(rng)?;
    Ok(world)
}

impl World {
    pub fn settings(&self) -> &SimSettings {
        &self.settings
    }

    pub fn molecule(&self, id: u32) -> Option<&Molecule> {
        self.molecules.get(id as usize).and_then(Option::as_ref)
    }

    /// Every live molecule, in id order.
    pub fn molecules(&self) -> impl Iterator<Item = &Molecule> {
        self.molecules.iter().flatten()
    }

    /// Ids of live information/ACK molecules, ascending.
    pub fn mobile_ids(&self) -> &[u32] {
        &self.mobile
    }

    pub fn noise_count(&self) -> usize {
        self.molecules().filter(|m| m.kind == MoleculeKind::Noise).count()
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    fn release_points(&self) -> Vec<(Vec3, f64)> {
        let Some(mt) = self.microtubule else {
            return Vec::new();
        };
        let r = self.settings.mol_radius();
        [Endpoint::Tx, Endpoint::Rx]
            .into_iter()
            .flat_map(|end| [1.0, -1.0].map(|h| (self.lane_release_point(&mt, end, h), r)))
            .collect()
    }

    fn place_noise(&mut self, rng: &mut SimRng) -> Result<(), SimError> {
        let radius = self.settings.noise_radius();
        let side = self.settings.env_side;
        let reserved = self.release_points();
        for placed in 0..self.settings.noise_count {
            let mut ok = false;
            for _ in 0..PLACEMENT_TRIES {
                let p = [
                    rng.random_range(radius..side - radius),
                    rng.random_range(radius..side - radius),
                    rng.random_range(radius..side - radius),
                ];
                if !self.is_free(None, &p, radius, MoleculeKind::Noise) {
                    continue;
                }
                if let Some(mt) = &self.microtubule {
                    if mt.distance_to(&p) < mt.capture_radius + radius {
                        continue;
                    }
                }
                if reserved.iter().any(|(q, rq)| dist(&p, q) < radius + rq) {
                    continue;
                }
                self.insert(MoleculeKind::Noise, p, MotionState::Stationary, radius);
                ok = true;
                break;
            }
            if !ok {
                return Err(SimError::PlacementFailure {
                    placed,
                    requested: self.settings.noise_count,
                });
            }
        }
        Ok(())
    }

    fn insert(&mut self, kind: MoleculeKind, position: Vec3, state: MotionState, radius: f64) -> u32 {
        let id = self.molecules.len() as u32;
        self.grid.insert(id, &position);
        self.molecules.push(Some(Molecule {
            id,
            kind,
            position,
            state,
            radius,
        }));
        if kind != MoleculeKind::Noise {
            self.mobile.push(id);
        }
        id
    }

    /// Places a molecule without any overlap checks. Intended for building
    /// hand-made scenarios in tests and debugging tools.
    pub fn insert_unchecked(&mut self, kind: MoleculeKind, position: Vec3, state: MotionState) -> u32 {
        let radius = match kind {
            MoleculeKind::Noise => self.settings.noise_radius(),
            _ => self.settings.mol_radius(),
        };
        self.insert(kind, position, state, radius)
    }

    fn inside_box(&self, p: &Vec3, radius: f64) -> bool {
        let side = self.settings.env_side;
        p.iter().all(|&c| c - radius > 0.0 && c + radius < side)
    }

    /// True when a sphere of `radius` at `p` stays in the box, overlaps no
    /// molecule other than `me`, and does not enter a body it is not bound for.
    pub fn is_free(&self, me: Option<u32>, p: &Vec3, radius: f64, kind: MoleculeKind) -> bool {
        if !self.inside_box(p, radius) {
            return false;
        }
        let blocks_tx = !matches!(kind, MoleculeKind::Ack { .. });
        let blocks_rx = !matches!(kind, MoleculeKind::Info { .. });
        if blocks_tx && dist2(p, &self.tx.center) < (self.tx.radius + radius).powi(2) {
            return false;
        }
        if blocks_rx && dist2(p, &self.rx.center) < (self.rx.radius + radius).powi(2) {
            return false;
        }
        self.grid.neighbors(p).all(|other| {
            if Some(other) == me {
                return true;
            }
            match &self.molecules[other as usize] {
                Some(m) => dist2(p, &m.position) >= (radius + m.radius).powi(2),
                None => true,
            }
        })
    }

    fn move_to(&mut self, id: u32, to: Vec3) {
        let m = self.molecules[id as usize].as_mut().expect("live molecule");
        let from = m.position;
        m.position = to;
        self.grid.relocate(id, &from, &to);
    }

    fn set_state(&mut self, id: u32, state: MotionState) {
        if let Some(m) = self.molecules[id as usize].as_mut() {
            m.state = state;
        }
    }

    /// Samples the distance a motor carries a molecule before detaching.
    pub fn draw_travel(&self, rng: &mut SimRng) -> f64 {
        match self.settings.travel_mode {
            TravelMode::Exponential => self.travel.sample(rng),
            TravelMode::Fixed => self.settings.motor_travel_mean,
        }
    }

    fn lane_release_point(&self, mt: &Microtubule, emitter: Endpoint, heading: f64) -> Vec3 {
        let body = match emitter {
            Endpoint::Tx => self.tx,
            Endpoint::Rx => self.rx,
        };
        let reach = body.radius + self.settings.mol_radius() + RELEASE_CLEARANCE;
        let axial = (reach * reach - mt.lane_offset * mt.lane_offset).max(0.0).sqrt();
        let x = match emitter {
            Endpoint::Tx => body.center[0] + axial,
            Endpoint::Rx => body.center[0] - axial,
        };
        mt.lane_point(x, heading)
    }

    /// Whether molecules of `kind` are carried by motors under this transport.
    pub fn rides_microtubule(&self, kind: MoleculeKind) -> bool {
        matches!(
            (self.settings.transport, kind),
            (
                Transport::Directional,
                MoleculeKind::Info { .. } | MoleculeKind::Ack { .. }
            ) | (Transport::Hybrid, MoleculeKind::Info { .. })
        )
    }

    /// Releases one information (from Tx) or ACK (from Rx) molecule.
    ///
    /// Motor-carried molecules start attached at the lane point touching the
    /// emitter; diffusing ones start at a uniformly random point on the
    /// emitter surface. Returns `None` when the release spot is occupied.
    pub fn emit(&mut self, kind: MoleculeKind, rng: &mut SimRng) -> Option<u32> {
        let emitter = match kind {
            MoleculeKind::Info { .. } => Endpoint::Tx,
            MoleculeKind::Ack { .. } => Endpoint::Rx,
            MoleculeKind::Noise => return None,
        };
        let radius = self.settings.mol_radius();
        if self.rides_microtubule(kind) {
            let mt = self.microtubule.expect("transport has a microtubule");
            let p = self.lane_release_point(&mt, emitter, kind.heading());
            if !self.is_free(None, &p, radius, kind) {
                return None;
            }
            let state = MotionState::OnMicrotubule {
                remaining: self.draw_travel(rng),
                direction: kind.heading() as i8,
            };
            return Some(self.insert(kind, p, state, radius));
        }
        let body = match emitter {
            Endpoint::Tx => self.tx,
            Endpoint::Rx => self.rx,
        };
        let reach = body.radius + radius + RELEASE_CLEARANCE;
        for _ in 0..RELEASE_TRIES {
            let u = unit_vector(rng);
            let p = [
                body.center[0] + reach * u[0],
                body.center[1] + reach * u[1],
                body.center[2] + reach * u[2],
            ];
            if self.is_free(None, &p, radius, kind) {
                return Some(self.insert(kind, p, MotionState::Diffusing, radius));
            }
        }
        None
    }

    /// One Brownian step: per-axis Gaussian displacement with variance
    /// `2·D·dt`, redrawn up to [`MAX_REDRAWS`] times when blocked; otherwise
    /// the molecule stays put.
    pub fn diffusive_step(&mut self, id: u32, rng: &mut SimRng) {
        let Some(m) = self.molecule(id) else { return };
        debug_assert!(matches!(m.state, MotionState::Diffusing));
        let (origin, radius, kind) = (m.position, m.radius, m.kind);
        let sigma = (2.0 * self.settings.diffusion_coeff * self.settings.dt).sqrt();
        for _ in 0..=MAX_REDRAWS {
            let p = [
                origin[0] + sigma * rng.sample::<f64, _>(StandardNormal),
                origin[1] + sigma * rng.sample::<f64, _>(StandardNormal),
                origin[2] + sigma * rng.sample::<f64, _>(StandardNormal),
            ];
            if self.is_free(Some(id), &p, radius, kind) {
                self.move_to(id, p);
                return;
            }
        }
    }

    /// Advances a motor-carried molecule `velocity·dt` along its lane.
    ///
    /// A blocked advance detaches the molecule in place. Exhausting the travel
    /// budget or reaching the end of the filament also detaches it.
    pub fn directional_step(&mut self, id: u32) {
        let Some(m) = self.molecule(id) else { return };
        let MotionState::OnMicrotubule { remaining, direction } = m.state else {
            return;
        };
        let Some(mt) = self.microtubule else {
            self.set_state(id, MotionState::Diffusing);
            return;
        };
        let (pos, radius, kind) = (m.position, m.radius, m.kind);
        let advance = (self.settings.motor_velocity * self.settings.dt).min(remaining);
        let heading = f64::from(direction);
        let target = mt.lane_point(pos[0] + heading * advance, heading);
        let moved = (target[0] - pos[0]).abs();
        if !self.is_free(Some(id), &target, radius, kind) {
            self.set_state(id, MotionState::Diffusing);
            return;
        }
        self.move_to(id, target);
        let left = remaining - moved;
        let at_end = moved + 1e-12 < advance;
        if left <= 1e-12 || at_end {
            self.set_state(id, MotionState::Diffusing);
        } else {
            self.set_state(
                id,
                MotionState::OnMicrotubule {
                    remaining: left,
                    direction,
                },
            );
        }
    }

    /// Attaches a diffusing molecule that touches the microtubule.
    ///
    /// Only applies to molecules that ride motors under the current transport.
    /// The molecule moves onto its lane above the nearest segment point and
    /// receives a fresh travel budget. Returns whether it attached.
    pub fn try_reattach(&mut self, id: u32, rng: &mut SimRng) -> bool {
        let Some(m) = self.molecule(id) else { return false };
        if !matches!(m.state, MotionState::Diffusing) || !self.rides_microtubule(m.kind) {
            return false;
        }
        let Some(mt) = self.microtubule else { return false };
        let (pos, radius, kind) = (m.position, m.radius, m.kind);
        if mt.distance_to(&pos) > mt.capture_radius + radius {
            return false;
        }
        let heading = kind.heading();
        let spot = mt.lane_point(mt.nearest_point(&pos)[0], heading);
        if !self.is_free(Some(id), &spot, radius, kind) {
            return false;
        }
        self.move_to(id, spot);
        let remaining = self.draw_travel(rng);
        self.set_state(
            id,
            MotionState::OnMicrotubule {
                remaining,
                direction: heading as i8,
            },
        );
        true
    }

    /// Removes and reports every information molecule touching Rx and every
    /// ACK molecule touching Tx, in ascending id order.
    pub fn detect_arrivals(&mut self) -> Vec<Arrival> {
        let mut arrivals = Vec::new();
        for &id in &self.mobile {
            let m = self.molecules[id as usize].as_ref().expect("mobile molecule is live");
            let (body, endpoint) = match m.kind {
                MoleculeKind::Info { .. } => (self.rx, Endpoint::Rx),
                MoleculeKind::Ack { .. } => (self.tx, Endpoint::Tx),
                MoleculeKind::Noise => continue,
            };
            if dist2(&m.position, &body.center) <= (body.radius + m.radius).powi(2) {
                arrivals.push(Arrival {
                    id,
                    kind: m.kind,
                    endpoint,
                });
            }
        }
        for a in &arrivals {
            let m = self.molecules[a.id as usize].take().expect("live");
            self.grid.remove(a.id, &m.position);
        }
        if !arrivals.is_empty() {
            self.mobile.retain(|id| self.molecules[*id as usize].is_some());
        }
        arrivals
    }

    /// Moves every mobile molecule once, in id order.
    pub fn step_all(&mut self, rng: &mut SimRng) {
        for k in 0..self.mobile.len() {
            let id = self.mobile[k];
            match self.molecules[id as usize].as_ref().map(|m| m.state) {
                Some(MotionState::Diffusing) => {
                    self.diffusive_step(id, rng);
                    self.try_reattach(id, rng);
                }
                Some(MotionState::OnMicrotubule { .. }) => self.directional_step(id),
                _ => {}
            }
        }
    }

    pub fn snapshot(&self, step: u64, time: f64) -> WorldSnapshot {
        WorldSnapshot {
            step,
            time,
            env_side: self.settings.env_side,
            tx: self.tx,
            rx: self.rx,
            microtubule: self.microtubule,
            molecules: self.molecules().cloned().collect(),
        }
    }

    /// Exhaustive O(N²) check that no two molecules overlap.
    pub fn overlapping_pairs(&self) -> Vec<(u32, u32)> {
        let all: Vec<&Molecule> = self.molecules().collect();
        let mut out = Vec::new();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if dist2(&a.position, &b.position) < (a.radius + b.radius).powi(2) * (1.0 - 1e-12) {
                    out.push((a.id, b.id));
                }
            }
        }
        out
    }

    /// Every molecule sits fully inside the box and in its own grid cell.
    pub fn check_containment(&self) -> bool {
        self.molecules()
            .all(|m| self.inside_box(&m.position, m.radius) && self.grid.contains(m.id, &m.position))
    }
}

fn unit_vector(rng: &mut SimRng) -> Vec3 {
    loop {
        let v: Vec3 = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
