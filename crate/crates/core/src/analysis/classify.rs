use std::fmt;
use std::str::FromStr;

use super::labeling::{active_mask, label_components, Labeling, Topology};
use crate::lenia::{DynamicsParams, Rollout};
use crate::pattern::Pattern;

/// Share of the total activity an animal's component must carry.
pub const ANIMAL_MASS_SHARE: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternClass {
    Dead,
    Animal,
    NonAnimal,
}

impl PatternClass {
    pub const ALL: [PatternClass; 3] = [PatternClass::Dead, PatternClass::Animal, PatternClass::NonAnimal];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternClass::Dead => "dead",
            PatternClass::Animal => "animal",
            PatternClass::NonAnimal => "non-animal",
        }
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dead" => Ok(PatternClass::Dead),
            "animal" => Ok(PatternClass::Animal),
            "non-animal" | "nonanimal" => Ok(PatternClass::NonAnimal),
            other => Err(format!("unknown pattern class `{other}`")),
        }
    }
}

/// Every cell is exactly 0 or exactly 1.
pub fn is_dead(p: &Pattern) -> bool {
    p.cells().iter().all(|&v| v == 0.0 || v == 1.0)
}

/// Torus components that loop around the grid: some plane component inside
/// them has cells within `radius` of both borders of an opposite pair.
pub fn looping_components(torus: &Labeling, plane: &Labeling, size: usize, radius: u32) -> Vec<bool> {
    let r = radius as usize;
    let near_low = |c: usize| c < r;
    let near_high = |c: usize| c + r >= size;
    // per plane component: [top, bottom, left, right]
    let mut touches = vec![[false; 4]; plane.count];
    let mut owner = vec![0u32; plane.count];
    for (i, label) in plane.labels.iter().enumerate() {
        if let Some(l) = label {
            let (x, y) = (i % size, i / size);
            let t = &mut touches[*l as usize];
            t[0] |= near_low(y);
            t[1] |= near_high(y);
            t[2] |= near_low(x);
            t[3] |= near_high(x);
            owner[*l as usize] = torus.labels[i].expect("plane-active cells are torus-active");
        }
    }
    let mut looping = vec![false; torus.count];
    for (t, &o) in touches.iter().zip(&owner) {
        if (t[0] && t[1]) || (t[2] && t[3]) {
            looping[o as usize] = true;
        }
    }
    looping
}

/// A finite component of radius-connected active cells carries at least 80%
/// of the total activity.
pub fn has_animal(p: &Pattern, radius: u32) -> bool {
    let size = p.size();
    let total = p.total();
    if total <= 0.0 {
        return false;
    }
    let mask = active_mask(p);
    let torus = label_components(&mask, size, radius, Topology::Torus);
    if torus.count == 0 {
        return false;
    }
    let plane = label_components(&mask, size, radius, Topology::Plane);
    let looping = looping_components(&torus, &plane, size, radius);
    let mut mass = vec![0.0f64; torus.count];
    for (label, &v) in torus.labels.iter().zip(p.cells()) {
        if let Some(l) = label {
            mass[*l as usize] += v as f64;
        }
    }
    mass.iter()
        .zip(&looping)
        .any(|(&m, &inf)| !inf && m >= ANIMAL_MASS_SHARE * total)
}

/// Dead if the final state is binary; animal if an animal exists in both of
/// the last two states; otherwise non-animal.
pub fn classify_final(penultimate: &Pattern, last: &Pattern, radius: u32) -> PatternClass {
    if last.cells().iter().any(|v| !v.is_finite()) || is_dead(last) {
        return PatternClass::Dead;
    }
    if has_animal(last, radius) && has_animal(penultimate, radius) {
        PatternClass::Animal
    } else {
        PatternClass::NonAnimal
    }
}

pub fn classify(rollout: &Rollout, params: &DynamicsParams) -> PatternClass {
    classify_final(rollout.penultimate(), rollout.last(), params.radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn still(p: &Pattern) -> PatternClass {
        classify_final(p, p, 4)
    }

    fn disc(size: usize, cx: f64, cy: f64, r: f64) -> Pattern {
        Pattern::from_fn(size, |x, y| {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            if d <= r {
                1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn binary_patterns_are_dead() {
        assert_eq!(still(&Pattern::zeros(32)), PatternClass::Dead);
        assert_eq!(still(&Pattern::filled(32, 1.0)), PatternClass::Dead);
        assert_eq!(still(&disc(32, 16.0, 16.0, 5.0)), PatternClass::Dead);
    }

    #[test]
    fn soft_disc_is_an_animal() {
        let mut p = disc(32, 16.0, 16.0, 5.0);
        p.set(16, 16, 0.5);
        assert_eq!(still(&p), PatternClass::Animal);
        // across the seam it is still finite
        let wrapped = p.shifted(16, 16);
        assert_eq!(still(&wrapped), PatternClass::Animal);
    }

    #[test]
    fn stripe_is_not_an_animal() {
        let p = Pattern::from_fn(32, |x, _| if (10..14).contains(&x) { 0.7 } else { 0.0 });
        assert_eq!(still(&p), PatternClass::NonAnimal);
    }

    #[test]
    fn animal_must_persist_two_steps() {
        let mut p = disc(32, 16.0, 16.0, 5.0);
        p.set(16, 16, 0.5);
        let stripe = Pattern::from_fn(32, |x, _| if (10..14).contains(&x) { 0.7 } else { 0.0 });
        assert_eq!(classify_final(&stripe, &p, 4), PatternClass::NonAnimal);
        assert_eq!(classify_final(&p, &stripe, 4), PatternClass::NonAnimal);
    }

    #[test]
    fn dominant_mass_is_required() {
        // two equal discs far apart: each carries only half the activity
        let a = disc(64, 16.0, 16.0, 4.0);
        let b = disc(64, 46.0, 46.0, 4.0);
        let p = Pattern::from_fn(64, |x, y| (a.get(x, y) + b.get(x, y)) * 0.9);
        assert_eq!(still(&p), PatternClass::NonAnimal);
        // a faint second blob below the activity threshold does not count as a component
        let p = Pattern::from_fn(64, |x, y| a.get(x, y) * 0.9 + b.get(x, y) * 0.05);
        assert!(has_animal(&p, 4));
    }

    #[test]
    fn class_names_parse_back() {
        for c in PatternClass::ALL {
            assert_eq!(c.as_str().parse::<PatternClass>().unwrap(), c);
        }
        assert!("alive".parse::<PatternClass>().is_err());
    }
}
