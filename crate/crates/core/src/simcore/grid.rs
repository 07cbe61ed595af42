//! Uniform grid over the cubic environment for overlap candidate queries.

pub type Vec3 = [f64; 3];

/// Dense uniform grid indexing molecule ids by the cell containing their centre.
///
/// With `cell_size` at least twice the largest molecule diameter, any molecule
/// that can overlap a sphere centred at `p` has its centre in one of the 27
/// cells around `p`.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    cell_size: f64,
    dims: usize,
    cells: Vec<Vec<u32>>,
}

const MAX_CELLS_PER_AXIS: usize = 64;

impl SpatialGrid {
    pub fn new(env_side: f64, max_diameter: f64) -> Self {
        let min_cell = (2.0 * max_diameter).max(env_side / MAX_CELLS_PER_AXIS as f64);
        let dims = ((env_side / min_cell).floor() as usize).max(1);
        let cell_size = env_side / dims as f64;
        Self {
            cell_size,
            dims,
            cells: vec![Vec::new(); dims * dims * dims],
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    fn axis_index(&self, v: f64) -> usize {
        let i = (v / self.cell_size).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.dims - 1)
        }
    }

    fn coords(&self, p: &Vec3) -> [usize; 3] {
        [self.axis_index(p[0]), self.axis_index(p[1]), self.axis_index(p[2])]
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[0] * self.dims + c[1]) * self.dims + c[2]
    }

    pub fn cell_of(&self, p: &Vec3) -> usize {
        self.flat(self.coords(p))
    }

    pub fn insert(&mut self, id: u32, p: &Vec3) {
        let c = self.cell_of(p);
        self.cells[c].push(id);
    }

    pub fn remove(&mut self, id: u32, p: &Vec3) {
        let c = self.cell_of(p);
        let cell = &mut self.cells[c];
        if let Some(k) = cell.iter().position(|&x| x == id) {
            cell.swap_remove(k);
        }
    }

    pub fn relocate(&mut self, id: u32, from: &Vec3, to: &Vec3) {
        let a = self.cell_of(from);
        let b = self.cell_of(to);
        if a != b {
            self.remove(id, from);
            self.cells[b].push(id);
        }
    }

    /// Ids in the 27 cells surrounding `p`.
    pub fn neighbors(&self, p: &Vec3) -> impl Iterator<Item = u32> + '_ {
        let c = self.coords(p);
        let span = |i: usize| i.saturating_sub(1)..=(i + 1).min(self.dims - 1);
        span(c[0]).flat_map(move |x| {
            span(c[1]).flat_map(move |y| span(c[2]).flat_map(move |z| self.cells[self.flat([x, y, z])].iter().copied()))
        })
    }

    pub fn contains(&self, id: u32, p: &Vec3) -> bool {
        self.cells[self.cell_of(p)].contains(&id)
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }
}

pub(crate) fn dist2(a: &Vec3, b: &Vec3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

pub(crate) fn dist(a: &Vec3, b: &Vec3) -> f64 {
    dist2(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cell_size_respects_lower_bound() {
        let g = SpatialGrid::new(150.0, 1.0);
        assert!(g.cell_size() >= 2.0);
        let g = SpatialGrid::new(10.0, 1.0);
        assert!(g.cell_size() >= 2.0);
        assert_eq!(g.dims, 5);
    }

    #[test]
    fn relocate_keeps_single_entry() {
        let mut g = SpatialGrid::new(20.0, 1.0);
        let a = [1.0, 1.0, 1.0];
        let b = [15.0, 9.0, 3.0];
        g.insert(4, &a);
        g.relocate(4, &a, &b);
        assert!(!g.contains(4, &a));
        assert!(g.contains(4, &b));
        assert_eq!(g.len(), 1);
        g.remove(4, &b);
        assert!(g.is_empty());
    }

    proptest! {
        #[test]
        fn neighbor_query_covers_brute_force_overlaps(
            pts in proptest::collection::vec((0.5f64..29.5, 0.5f64..29.5, 0.5f64..29.5), 2..200),
        ) {
            let radius = 0.5;
            let mut g = SpatialGrid::new(30.0, 2.0 * radius);
            let pts: Vec<Vec3> = pts.into_iter().map(|(x, y, z)| [x, y, z]).collect();
            for (i, p) in pts.iter().enumerate() {
                g.insert(i as u32, p);
            }
            for (i, p) in pts.iter().enumerate() {
                let cand: std::collections::HashSet<u32> = g.neighbors(p).collect();
                for (j, q) in pts.iter().enumerate() {
                    if i != j && dist(p, q) < 2.0 * radius {
                        prop_assert!(cand.contains(&(j as u32)));
                    }
                }
            }
        }
    }
}
