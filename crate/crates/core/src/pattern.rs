//! Square activity grids on a torus and their persistence formats.

use std::io::{Read, Write};
use std::path::Path;

use image::{ImageBuffer, Luma};

use crate::error::{Error, Result};

const LPAT_MAGIC: &[u8; 4] = b"LPAT";
const LPAT_VERSION: u16 = 1;

/// A square `size × size` grid of activities in `[0, 1]`, stored row-major.
///
/// Cell `(x, y)` lives at index `y * size + x`; `x` is the column.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    size: usize,
    cells: Vec<f32>,
}

impl Pattern {
    pub fn zeros(size: usize) -> Self {
        Self::filled(size, 0.0)
    }

    pub fn filled(size: usize, value: f32) -> Self {
        let value = value.clamp(0.0, 1.0);
        Pattern {
            size,
            cells: vec![value; size * size],
        }
    }

    /// Builds a pattern from row-major cells, rejecting wrong lengths and
    /// values outside `[0, 1]`.
    pub fn from_cells(size: usize, cells: Vec<f32>) -> Result<Self> {
        if cells.len() != size * size {
            return Err(Error::InvalidArgument(format!(
                "expected {} cells for a {size}x{size} pattern, got {}",
                size * size,
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!(
                "cell value {bad} outside [0, 1]"
            )));
        }
        Ok(Pattern { size, cells })
    }

    /// Builds a pattern from a function of `(x, y)`; values are clipped to `[0, 1]`.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut cells = Vec::with_capacity(size * size);
        for y in 0..size {
            for x in 0..size {
                cells.push(clip_unit(f(x, y)));
            }
        }
        Pattern { size, cells }
    }

    /// Wraps cells already known to be in range.
    pub(crate) fn from_cells_unchecked(size: usize, cells: Vec<f32>) -> Self {
        debug_assert_eq!(cells.len(), size * size);
        Pattern { size, cells }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cells(&self) -> &[f32] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<f32> {
        self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.cells[y * self.size + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        self.cells[y * self.size + x] = clip_unit(value);
    }

    /// Sum of all activities, accumulated in 64 bits.
    pub fn total(&self) -> f64 {
        self.cells.iter().map(|&v| v as f64).sum()
    }

    /// Toroidal shift: the value at `(x, y)` moves to `(x + dx, y + dy) mod size`.
    pub fn shifted(&self, dx: i64, dy: i64) -> Pattern {
        let n = self.size;
        let sx = dx.rem_euclid(n as i64) as usize;
        let sy = dy.rem_euclid(n as i64) as usize;
        let mut cells = vec![0.0; n * n];
        for y in 0..n {
            let ty = (y + sy) % n;
            let src = &self.cells[y * n..(y + 1) * n];
            let dst = &mut cells[ty * n..(ty + 1) * n];
            dst[sx..].copy_from_slice(&src[..n - sx]);
            dst[..sx].copy_from_slice(&src[n - sx..]);
        }
        Pattern { size: n, cells }
    }

    /// Mirror across the vertical axis (`x → size - 1 - x`).
    pub fn flipped_horizontal(&self) -> Pattern {
        let n = self.size;
        Pattern::from_cells_unchecked(n, (0..n * n).map(|i| self.cells[(i / n) * n + (n - 1 - i % n)]).collect())
    }

    /// Mirror across the horizontal axis (`y → size - 1 - y`).
    pub fn flipped_vertical(&self) -> Pattern {
        let n = self.size;
        Pattern::from_cells_unchecked(n, (0..n * n).map(|i| self.cells[(n - 1 - i / n) * n + i % n]).collect())
    }

    /// Rotation by 90° counter-clockwise in index space: `(x, y) → (y, size - 1 - x)`.
    pub fn rotated_quarter(&self) -> Pattern {
        let n = self.size;
        let mut out = vec![0.0; n * n];
        for y in 0..n {
            for x in 0..n {
                let (nx, ny) = (y, n - 1 - x);
                out[ny * n + nx] = self.cells[y * n + x];
            }
        }
        Pattern::from_cells_unchecked(n, out)
    }

    /// Writes the LPAT binary record: `"LPAT"`, version `u16`, width `u32`,
    /// height `u32`, then `width * height` little-endian `f32` cells row-major.
    pub fn write_lpat<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = Vec::with_capacity(14 + 4 * self.cells.len());
        buf.extend_from_slice(LPAT_MAGIC);
        buf.extend_from_slice(&LPAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.size as u32).to_le_bytes());
        buf.extend_from_slice(&(self.size as u32).to_le_bytes());
        for v in &self.cells {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_lpat<R: Read>(mut r: R) -> Result<Pattern> {
        let mut header = [0u8; 14];
        r.read_exact(&mut header)?;
        if &header[0..4] != LPAT_MAGIC {
            return Err(Error::format("pattern file", "bad magic bytes"));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != LPAT_VERSION {
            return Err(Error::format("pattern file", format!("unsupported version {version}")));
        }
        let width = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
        let height = u32::from_le_bytes(header[10..14].try_into().unwrap()) as usize;
        if width != height {
            return Err(Error::format("pattern file", format!("non-square grid {width}x{height}")));
        }
        let mut raw = vec![0u8; 4 * width * height];
        r.read_exact(&mut raw)?;
        let cells = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Pattern::from_cells(width, cells).map_err(|e| Error::format("pattern file", e.to_string()))
    }

    pub fn save_lpat(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut bytes = Vec::new();
        self.write_lpat(&mut bytes)?;
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn load_lpat(path: impl AsRef<Path>) -> Result<Pattern> {
        let bytes = std::fs::read(path)?;
        Pattern::read_lpat(bytes.as_slice())
    }

    /// 16-bit grayscale image of the activities.
    pub fn to_image(&self) -> ImageBuffer<Luma<u16>, Vec<u16>> {
        let n = self.size as u32;
        ImageBuffer::from_fn(n, n, |x, y| {
            let v = self.get(x as usize, y as usize);
            Luma([(v as f64 * 65535.0).round() as u16])
        })
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_image().save(path)?;
        Ok(())
    }
}

pub(crate) fn clip_unit(v: f32) -> f32 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(n: usize) -> Pattern {
        Pattern::from_fn(n, |x, y| ((x * 7 + y * 13) % 17) as f32 / 16.0)
    }

    #[test]
    fn from_cells_rejects_out_of_range() {
        assert!(Pattern::from_cells(2, vec![0.0, 0.5, 1.0, 1.5]).is_err());
        assert!(Pattern::from_cells(2, vec![0.0; 3]).is_err());
        assert!(Pattern::from_cells(2, vec![0.0, 0.5, 1.0, 0.25]).is_ok());
    }

    #[test]
    fn shift_moves_cells_on_the_torus() {
        let mut p = Pattern::zeros(5);
        p.set(4, 0, 1.0);
        let s = p.shifted(1, -1);
        assert_eq!(s.get(0, 4), 1.0);
        assert_eq!(s.total(), 1.0);
    }

    #[test]
    fn flips_are_involutions() {
        let p = ramp(6);
        assert_eq!(p.flipped_horizontal().flipped_horizontal(), p);
        assert_eq!(p.flipped_vertical().flipped_vertical(), p);
        assert_ne!(p.flipped_horizontal(), p);
    }

    #[test]
    fn four_quarter_turns_are_identity() {
        let p = ramp(7);
        let r = p.rotated_quarter().rotated_quarter().rotated_quarter().rotated_quarter();
        assert_eq!(r, p);
    }

    #[test]
    fn lpat_layout_is_fixed() {
        let p = Pattern::from_cells(2, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        let mut bytes = Vec::new();
        p.write_lpat(&mut bytes).unwrap();
        assert_eq!(&bytes[0..4], b"LPAT");
        assert_eq!(&bytes[4..6], &1u16.to_le_bytes());
        assert_eq!(&bytes[6..10], &2u32.to_le_bytes());
        assert_eq!(&bytes[10..14], &2u32.to_le_bytes());
        assert_eq!(&bytes[18..22], &0.25f32.to_le_bytes());
        assert_eq!(bytes.len(), 14 + 16);
    }

    #[test]
    fn lpat_rejects_garbage() {
        assert!(Pattern::read_lpat(&b"NOPE\x01\x00"[..]).is_err());
        let mut bytes = Vec::new();
        Pattern::zeros(3).write_lpat(&mut bytes).unwrap();
        bytes.truncate(bytes.len() - 1);
        assert!(Pattern::read_lpat(bytes.as_slice()).is_err());
    }

    #[test]
    fn png_export_is_sixteen_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.png");
        ramp(8).save_png(&path).unwrap();
        let img = image::open(&path).unwrap();
        assert_eq!(img.color(), image::ColorType::L16);
        let back = img.to_luma16();
        assert_eq!(back.get_pixel(0, 0).0[0], 0);
    }

    proptest! {
        #[test]
        fn lpat_round_trip(cells in proptest::collection::vec(0.0f32..=1.0, 36)) {
            let p = Pattern::from_cells(6, cells).unwrap();
            let mut bytes = Vec::new();
            p.write_lpat(&mut bytes).unwrap();
            prop_assert_eq!(Pattern::read_lpat(bytes.as_slice()).unwrap(), p);
        }

        #[test]
        fn shift_is_a_permutation(dx in -20i64..20, dy in -20i64..20) {
            let p = ramp(9);
            let s = p.shifted(dx, dy);
            let mut a = p.cells().to_vec();
            let mut b = s.cells().to_vec();
            a.sort_by(f32::total_cmp);
            b.sort_by(f32::total_cmp);
            prop_assert_eq!(a, b);
            prop_assert_eq!(s.shifted(-dx, -dy), p);
        }
    }
}
