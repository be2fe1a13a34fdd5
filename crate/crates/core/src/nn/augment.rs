//! Random translations, rotations and flips on the torus.

use rand::Rng as _;

use crate::pattern::{clip_unit, Pattern};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentConfig {
    pub translate_prob: f64,
    pub rotate_prob: f64,
    /// Largest rotation angle in degrees.
    pub max_degrees: f64,
    pub hflip_prob: f64,
    pub vflip_prob: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig { translate_prob: 0.3, rotate_prob: 0.3, max_degrees: 40.0, hflip_prob: 0.2, vflip_prob: 0.2 }
    }
}

impl AugmentConfig {
    pub fn none() -> Self {
        AugmentConfig { translate_prob: 0.0, rotate_prob: 0.0, max_degrees: 0.0, hflip_prob: 0.0, vflip_prob: 0.0 }
    }
}

/// One drawn augmentation, applied in field order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Augmentation {
    pub shift: Option<(i64, i64)>,
    pub degrees: Option<f64>,
    pub hflip: bool,
    pub vflip: bool,
}

impl Augmentation {
    /// Draws every component; the random stream advances the same way
    /// whatever the outcome.
    pub fn sample(cfg: &AugmentConfig, size: usize, rng: &mut Rng) -> Self {
        let half = (size / 2) as i64;
        let translate = rng.random::<f64>() < cfg.translate_prob;
        let dx = rng.random_range(-half..=half);
        let dy = rng.random_range(-half..=half);
        let rotate = rng.random::<f64>() < cfg.rotate_prob;
        let u: f64 = rng.random();
        let hflip = rng.random::<f64>() < cfg.hflip_prob;
        let vflip = rng.random::<f64>() < cfg.vflip_prob;
        Augmentation {
            shift: translate.then_some((dx, dy)),
            degrees: rotate.then_some((2.0 * u - 1.0) * cfg.max_degrees),
            hflip,
            vflip,
        }
    }

    pub fn apply(&self, p: &Pattern) -> Pattern {
        let mut out = match self.shift {
            Some((dx, dy)) => p.shifted(dx, dy),
            None => p.clone(),
        };
        if let Some(deg) = self.degrees {
            out = rotate_torus(&out, deg);
        }
        if self.hflip {
            out = out.flipped_horizontal();
        }
        if self.vflip {
            out = out.flipped_vertical();
        }
        out
    }
}

pub fn augment(p: &Pattern, cfg: &AugmentConfig, rng: &mut Rng) -> Pattern {
    Augmentation::sample(cfg, p.size(), rng).apply(p)
}

/// Rotates about the grid center by `degrees` (counter-clockwise in image
/// coordinates), sampling bilinearly with wrap-around.
pub fn rotate_torus(p: &Pattern, degrees: f64) -> Pattern {
    let n = p.size();
    let c = (n as f64 - 1.0) / 2.0;
    let (s, co) = degrees.to_radians().sin_cos();
    let wrap = |v: i64| v.rem_euclid(n as i64) as usize;
    Pattern::from_fn(n, |x, y| {
        let (u, v) = (x as f64 - c, y as f64 - c);
        // inverse rotation gives the source position
        let sx = co * u + s * v + c;
        let sy = -s * u + co * v + c;
        let (x0, y0) = (sx.floor(), sy.floor());
        let (fx, fy) = (sx - x0, sy - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        let at = |xx: i64, yy: i64| p.get(wrap(xx), wrap(yy)) as f64;
        let top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
        let bottom = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
        clip_unit((top * (1.0 - fy) + bottom * fy) as f32)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use proptest::prelude::*;

    fn sample_pattern(size: usize, seed: u64) -> Pattern {
        let mut rng = stream_rng(seed, Stream::Dataset, 0);
        Pattern::from_fn(size, |_, _| rng.random::<f32>())
    }

    #[test]
    fn zero_probabilities_leave_the_pattern_unchanged() {
        let p = sample_pattern(16, 1);
        let mut rng = stream_rng(1, Stream::Training, 0);
        for _ in 0..20 {
            assert_eq!(augment(&p, &AugmentConfig::none(), &mut rng), p);
        }
    }

    #[test]
    fn zero_and_full_turns_are_exact() {
        let p = sample_pattern(16, 2);
        assert_eq!(rotate_torus(&p, 0.0), p);
        let q = rotate_torus(&p, 90.0);
        let r = p.rotated_quarter();
        let r3 = r.rotated_quarter().rotated_quarter();
        let close = |a: &Pattern, b: &Pattern| a.cells().iter().zip(b.cells()).all(|(x, y)| (x - y).abs() < 1e-5);
        assert!(close(&q, &r) || close(&q, &r3));
    }

    #[test]
    fn default_draw_frequencies() {
        let cfg = AugmentConfig::default();
        let mut rng = stream_rng(5, Stream::Training, 0);
        let n = 20_000;
        let (mut t, mut r, mut h) = (0, 0, 0);
        for _ in 0..n {
            let a = Augmentation::sample(&cfg, 64, &mut rng);
            t += a.shift.is_some() as usize;
            if let Some(d) = a.degrees {
                r += 1;
                assert!(d.abs() <= 40.0);
            }
            if let Some((dx, dy)) = a.shift {
                assert!(dx.abs() <= 32 && dy.abs() <= 32);
            }
            h += a.hflip as usize;
        }
        let f = |k: usize| k as f64 / n as f64;
        assert!((f(t) - 0.3).abs() < 0.015);
        assert!((f(r) - 0.3).abs() < 0.015);
        assert!((f(h) - 0.2).abs() < 0.015);
    }

    proptest! {
        #[test]
        fn translation_permutes_cells(seed in 0u64..500, dx in -8i64..8, dy in -8i64..8) {
            let p = sample_pattern(16, seed);
            let a = Augmentation { shift: Some((dx, dy)), ..Default::default() };
            let mut before: Vec<u32> = p.cells().iter().map(|v| v.to_bits()).collect();
            let mut after: Vec<u32> = a.apply(&p).cells().iter().map(|v| v.to_bits()).collect();
            before.sort_unstable();
            after.sort_unstable();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn flips_are_involutions(seed in 0u64..500) {
            let p = sample_pattern(12, seed);
            let h = Augmentation { hflip: true, ..Default::default() };
            let v = Augmentation { vflip: true, ..Default::default() };
            prop_assert_eq!(h.apply(&h.apply(&p)), p.clone());
            prop_assert_eq!(v.apply(&v.apply(&p)), p);
        }

        #[test]
        fn output_stays_in_unit_range(seed in 0u64..500) {
            let p = sample_pattern(16, seed);
            let mut rng = stream_rng(seed, Stream::Training, 1);
            let cfg = AugmentConfig { translate_prob: 1.0, rotate_prob: 1.0, max_degrees: 40.0, hflip_prob: 0.5, vflip_prob: 0.5 };
            let q = augment(&p, &cfg, &mut rng);
            prop_assert!(q.cells().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
