//! Toroidal convolution of a pattern with a kernel.
//!
//! Both backends return `(K * A)(x) = Σ_y K(y) A(x − y)` accumulated in
//! 64 bits. The direct backend walks the kernel taps; the spectral backend
//! multiplies 2D DFTs.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::Kernel;

/// Grids at least this wide use the spectral backend by default.
pub const SPECTRAL_THRESHOLD: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Direct,
    Spectral,
    /// Spectral for grids of at least [`SPECTRAL_THRESHOLD`] cells, direct below.
    Auto,
}

impl Backend {
    pub(crate) fn resolve(self, size: usize) -> Backend {
        match self {
            Backend::Auto if size >= SPECTRAL_THRESHOLD => Backend::Spectral,
            Backend::Auto => Backend::Direct,
            other => other,
        }
    }
}

/// Direct O(L²·taps) convolution.
pub fn convolve_direct(kernel: &Kernel, state: &[f32], out: &mut [f64]) {
    let n = kernel.size();
    assert_eq!(state.len(), n * n);
    assert_eq!(out.len(), n * n);
    out.iter_mut().for_each(|v| *v = 0.0);
    for &(dx, dy, w) in kernel.taps() {
        // out(x, y) += w * A(x - dx, y - dy)
        let sx = (-dx).rem_euclid(n as i32) as usize;
        let sy = (-dy).rem_euclid(n as i32) as usize;
        for y in 0..n {
            let src_row = &state[((y + sy) % n) * n..][..n];
            let dst_row = &mut out[y * n..][..n];
            let (head, tail) = src_row.split_at(sx);
            let (dst_a, dst_b) = dst_row.split_at_mut(n - sx);
            for (d, &s) in dst_a.iter_mut().zip(tail) {
                *d += w * s as f64;
            }
            for (d, &s) in dst_b.iter_mut().zip(head) {
                *d += w * s as f64;
            }
        }
    }
}

/// Spectral convolution with a kernel transform computed once.
pub struct SpectralConvolver {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex<f64>>,
    buf: Vec<Complex<f64>>,
    tmp: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl SpectralConvolver {
    pub fn new(kernel: &Kernel) -> Self {
        let n = kernel.size();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let mut conv = SpectralConvolver {
            size: n,
            forward,
            inverse,
            kernel_hat: Vec::new(),
            buf: vec![Complex::default(); n * n],
            tmp: vec![Complex::default(); n * n],
            scratch: vec![Complex::default(); scratch_len],
        };
        for (b, &w) in conv.buf.iter_mut().zip(kernel.weights()) {
            *b = Complex::new(w, 0.0);
        }
        conv.transform(true);
        conv.kernel_hat = conv.buf.clone();
        conv
    }

    /// Rows, transpose, rows. A forward pass leaves the spectrum transposed;
    /// an inverse pass applied to a transposed spectrum restores the original
    /// orientation.
    fn transform(&mut self, forward: bool) {
        let n = self.size;
        let fft = if forward { &self.forward } else { &self.inverse };
        fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for y in 0..n {
            for x in 0..n {
                self.tmp[x * n + y] = self.buf[y * n + x];
            }
        }
        std::mem::swap(&mut self.buf, &mut self.tmp);
        fft.process_with_scratch(&mut self.buf, &mut self.scratch);
    }

    pub fn convolve(&mut self, state: &[f32], out: &mut [f64]) {
        let n = self.size;
        assert_eq!(state.len(), n * n);
        assert_eq!(out.len(), n * n);
        for (b, &a) in self.buf.iter_mut().zip(state) {
            *b = Complex::new(a as f64, 0.0);
        }
        self.transform(true);
        for (b, k) in self.buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.transform(false);
        let norm = 1.0 / (n * n) as f64;
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re * norm;
        }
    }
}
