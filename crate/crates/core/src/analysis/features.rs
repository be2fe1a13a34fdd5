use crate::error::{Error, Result};
use crate::lenia::Rollout;
use crate::pattern::Pattern;

/// Threshold above which a cell counts toward the activation volume.
pub const VOLUME_EPSILON: f32 = 1e-4;

/// Movements shorter than this are treated as stationary.
const STATIONARY: f64 = 1e-9;

/// The five statistical measures of a final pattern.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct StatFeatures {
    pub mass: f64,
    pub volume: f64,
    pub density: f64,
    pub asymmetry: f64,
    pub centeredness: f64,
}

impl StatFeatures {
    pub const NAMES: [&'static str; 5] = ["mass", "volume", "density", "asymmetry", "centeredness"];

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_array().to_vec()
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.mass, self.volume, self.density, self.asymmetry, self.centeredness]
    }
}

fn midpoint(size: usize) -> f64 {
    (size as f64 - 1.0) / 2.0
}

/// Raw-moment center `(M10 / M00, M01 / M00)` of the activity.
pub fn activation_center(p: &Pattern) -> Result<(f64, f64)> {
    center_with_shift(p, 0, 0).ok_or(Error::UndefinedCenter)
}

/// Center of `p.shifted(sx, sy)` without materializing the shift.
fn center_with_shift(p: &Pattern, sx: i64, sy: i64) -> Option<(f64, f64)> {
    let n = p.size();
    let sx = sx.rem_euclid(n as i64) as usize;
    let sy = sy.rem_euclid(n as i64) as usize;
    let (mut m00, mut m10, mut m01) = (0.0f64, 0.0f64, 0.0f64);
    for y in 0..n {
        let row = &p.cells()[y * n..(y + 1) * n];
        let ty = ((y + sy) % n) as f64;
        let mut row_sum = 0.0f64;
        let mut row_x = 0.0f64;
        for (x, &v) in row.iter().enumerate() {
            let v = v as f64;
            row_sum += v;
            row_x += ((x + sx) % n) as f64 * v;
        }
        m00 += row_sum;
        m10 += row_x;
        m01 += ty * row_sum;
    }
    (m00 > 0.0).then(|| (m10 / m00, m01 / m00))
}

/// Integer shift that moves `center` onto the grid midpoint. Halves round
/// up so that the shift commutes with integer translations.
fn centering_shift(center: (f64, f64), size: usize) -> (i64, i64) {
    let mid = midpoint(size);
    let round = |v: f64| (v + 0.5).floor() as i64;
    (round(mid - center.0), round(mid - center.1))
}

/// Toroidally shifts `p` so that `center` lands on the grid midpoint (to the
/// nearest cell).
pub fn recenter(p: &Pattern, center: (f64, f64)) -> Pattern {
    let (sx, sy) = centering_shift(center, p.size());
    p.shifted(sx, sy)
}

/// Follows the activity center through a rollout.
///
/// Each observed state is first shifted by the accumulated offset, its
/// center is measured in that frame, and the offset is then updated to bring
/// the center back to the midpoint. A pattern that drifts across a border
/// therefore keeps a continuous center. The movement is the displacement of
/// the center between the last two observed states, measured in one frame.
#[derive(Clone, Debug, Default)]
pub struct CenterTracker {
    shift: (i64, i64),
    previous: Option<(f64, f64)>,
    movement: (f64, f64),
    steps: usize,
}

impl CenterTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, state: &Pattern) {
        self.steps += 1;
        match center_with_shift(state, self.shift.0, self.shift.1) {
            Some(c) => {
                self.movement = match self.previous {
                    Some(p) => (c.0 - p.0, c.1 - p.1),
                    None => (0.0, 0.0),
                };
                let (dx, dy) = centering_shift(c, state.size());
                self.shift.0 += dx;
                self.shift.1 += dy;
                self.previous = Some((c.0 + dx as f64, c.1 + dy as f64));
            }
            None => {
                self.movement = (0.0, 0.0);
                self.previous = None;
            }
        }
    }

    /// Accumulated shift that centers the last observed state.
    pub fn shift(&self) -> (i64, i64) {
        self.shift
    }

    /// Center displacement between the last two observed states.
    pub fn movement(&self) -> (f64, f64) {
        self.movement
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn centered(&self, last: &Pattern) -> Pattern {
        last.shifted(self.shift.0, self.shift.1)
    }
}

/// Features of the final state of `rollout`, with `ε = 1e−4` for the volume.
pub fn stat_features(rollout: &Rollout) -> StatFeatures {
    let mut tracker = CenterTracker::new();
    for s in rollout.steps() {
        tracker.observe(s);
    }
    let last = rollout.last();
    features_from_final(last, &tracker.centered(last), tracker.movement())
}

/// Features from the final state, its centered copy and the last movement
/// direction of the activity center.
pub fn features_from_final(last: &Pattern, centered: &Pattern, movement: (f64, f64)) -> StatFeatures {
    let n = last.size();
    let area = (n * n) as f64;
    let total = last.total();
    let active = last.cells().iter().filter(|&&v| v > VOLUME_EPSILON).count();
    let mass = total / area;
    let volume = active as f64 / area;
    if total <= 0.0 {
        return StatFeatures { mass, volume, ..StatFeatures::default() };
    }
    let density = if active > 0 { mass / volume } else { 0.0 };
    StatFeatures {
        mass,
        volume,
        density,
        asymmetry: asymmetry(centered, movement, total),
        centeredness: centeredness(centered, total),
    }
}

/// `(M_right − M_left) / M` about the line through the midpoint along
/// `movement`. Right is the side where `m × (p − mid)` is positive; cells on
/// the line count for neither side.
fn asymmetry(centered: &Pattern, movement: (f64, f64), total: f64) -> f64 {
    let (mx, my) = movement;
    if (mx * mx + my * my).sqrt() < STATIONARY {
        return 0.0;
    }
    let n = centered.size();
    let mid = midpoint(n);
    let (mut right, mut left) = (0.0f64, 0.0f64);
    for y in 0..n {
        for x in 0..n {
            let v = centered.get(x, y) as f64;
            if v == 0.0 {
                continue;
            }
            let cross = mx * (y as f64 - mid) - my * (x as f64 - mid);
            if cross > 0.0 {
                right += v;
            } else if cross < 0.0 {
                left += v;
            }
        }
    }
    ((right - left) / total).clamp(-1.0, 1.0)
}

/// Activity-weighted mean of `(1 − d / d_max)²` around the midpoint, zero
/// for uniform patterns.
fn centeredness(centered: &Pattern, total: f64) -> f64 {
    let cells = centered.cells();
    if cells.iter().all(|&v| v == cells[0]) {
        return 0.0;
    }
    let n = centered.size();
    let mid = midpoint(n);
    let max_d = (2.0 * mid * mid).sqrt();
    if max_d == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0f64;
    for y in 0..n {
        for x in 0..n {
            let v = centered.get(x, y) as f64;
            if v == 0.0 {
                continue;
            }
            let d = ((x as f64 - mid).powi(2) + (y as f64 - mid).powi(2)).sqrt();
            let w = (1.0 - d / max_d).powi(2);
            acc += w * v;
        }
    }
    (acc / total).clamp(0.0, 1.0)
}
