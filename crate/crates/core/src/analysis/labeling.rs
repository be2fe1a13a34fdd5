//! Connected components of active cells under radius-R adjacency.
//!
//! Two active cells are adjacent when their Euclidean distance is at most
//! `R`, measured either on the torus (wrapped) or on the plain grid.

use crate::pattern::Pattern;

/// Cells at or above this activity take part in components.
pub const ACTIVE_THRESHOLD: f32 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    /// Opposite borders are joined.
    Torus,
    /// Opposite borders are not joined.
    Plane,
}

pub(crate) struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Component labels: `labels[i]` is `None` for inactive cells, otherwise a
/// dense component index assigned in row-major order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub labels: Vec<Option<u32>>,
    pub count: usize,
}

/// Offsets `(dx, dy)` with `0 < dx² + dy² ≤ R²` in the forward half-plane.
fn forward_offsets(radius: u32) -> Vec<(i64, i64)> {
    let r = radius as i64;
    let mut out = Vec::new();
    for dy in 0..=r {
        for dx in -r..=r {
            if dy == 0 && dx <= 0 {
                continue;
            }
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

pub fn active_mask(p: &Pattern) -> Vec<bool> {
    p.cells().iter().map(|&v| v >= ACTIVE_THRESHOLD).collect()
}

/// Labels the active cells of `mask` (row-major, `size × size`).
pub fn label_components(mask: &[bool], size: usize, radius: u32, topology: Topology) -> Labeling {
    assert_eq!(mask.len(), size * size);
    let n = size as i64;
    let mut sets = DisjointSet::new(mask.len());
    let offsets = forward_offsets(radius);
    for y in 0..n {
        for x in 0..n {
            let i = (y * n + x) as usize;
            if !mask[i] {
                continue;
            }
            for &(dx, dy) in &offsets {
                let (mut nx, mut ny) = (x + dx, y + dy);
                match topology {
                    Topology::Torus => {
                        nx = nx.rem_euclid(n);
                        ny = ny.rem_euclid(n);
                    }
                    Topology::Plane => {
                        if nx < 0 || nx >= n || ny >= n {
                            continue;
                        }
                    }
                }
                let j = (ny * n + nx) as usize;
                if mask[j] {
                    sets.union(i, j);
                }
            }
        }
    }
    let mut dense = vec![u32::MAX; mask.len()];
    let mut labels = vec![None; mask.len()];
    let mut count = 0u32;
    for i in 0..mask.len() {
        if mask[i] {
            let root = sets.find(i);
            if dense[root] == u32::MAX {
                dense[root] = count;
                count += 1;
            }
            labels[i] = Some(dense[root]);
        }
    }
    Labeling { labels, count: count as usize }
}
