use super::DynamicsParams;
use crate::error::{Error, Result};

/// Peak sharpness of the exponential kernel core.
pub const CORE_ALPHA: f64 = 4.0;

/// Number of concentric shells; one per entry of `beta`.
pub const SHELL_RINGS: usize = 3;

/// Exponential kernel core `exp(α − α / (4 r (1 − r)))` on `(0, 1)`, zero elsewhere.
pub fn kernel_core(r: f64) -> f64 {
    if r <= 0.0 || r >= 1.0 {
        return 0.0;
    }
    (CORE_ALPHA - CORE_ALPHA / (4.0 * r * (1.0 - r))).exp()
}

/// Shell profile at normalized radius `r`: ring `⌊3r⌋` scaled by its `beta` peak.
pub fn kernel_shell(r: f64, beta: &[f64; 3]) -> f64 {
    if !(0.0..1.0).contains(&r) {
        return 0.0;
    }
    let br = SHELL_RINGS as f64 * r;
    let ring = (br.floor() as usize).min(SHELL_RINGS - 1);
    beta[ring] * kernel_core(br.fract())
}

/// A unit-sum kernel laid out on the torus, centred on cell `(0, 0)`.
#[derive(Clone, Debug)]
pub struct Kernel {
    size: usize,
    radius: u32,
    weights: Vec<f64>,
    taps: Vec<(i32, i32, f64)>,
}

impl Kernel {
    pub fn new(params: &DynamicsParams, size: usize) -> Result<Kernel> {
        let radius = params.radius;
        if radius < 1 {
            return Err(Error::InvalidParameter("kernel radius must be at least 1".into()));
        }
        if 2 * radius as usize >= size {
            return Err(Error::InvalidParameter(format!(
                "kernel radius {radius} overlaps itself on a {size}x{size} torus"
            )));
        }
        let r = radius as i32;
        let mut taps = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                let dist = ((dx * dx + dy * dy) as f64).sqrt() / radius as f64;
                let w = kernel_shell(dist, &params.beta);
                if w > 0.0 {
                    taps.push((dx, dy, w));
                }
            }
        }
        let sum: f64 = taps.iter().map(|t| t.2).sum();
        if sum > 0.0 {
            for t in &mut taps {
                t.2 /= sum;
            }
        }
        let mut weights = vec![0.0; size * size];
        for &(dx, dy, w) in &taps {
            let x = dx.rem_euclid(size as i32) as usize;
            let y = dy.rem_euclid(size as i32) as usize;
            weights[y * size + x] = w;
        }
        Ok(Kernel {
            size,
            radius,
            weights,
            taps,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Dense weights on the torus, row-major; the origin is cell `(0, 0)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nonzero offsets `(dx, dy, weight)` relative to the receiving cell.
    pub fn taps(&self) -> &[(i32, i32, f64)] {
        &self.taps
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().map(|t| t.2).sum()
    }
}
