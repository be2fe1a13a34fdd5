//! Layer primitives over flat float buffers.
//!
//! Images are stored channel-major (`[c][y][x]`). Every convolution in the
//! model uses 4×4 kernels, stride 2 and one cell of zero padding, so a
//! convolution halves the side length and a transposed convolution doubles it.

pub(crate) const KERNEL: usize = 4;
const TAPS: usize = KERNEL * KERNEL;

/// Scalar type of a network: `f32` for training, `f64` for reference checks.
pub trait Real: num_traits::Float + num_traits::FromPrimitive + std::iter::Sum + Send + Sync + std::fmt::Debug + 'static {
    #[allow(clippy::too_many_arguments)]
    #[doc(hidden)]
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
    );

    fn of(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }

    fn to64(self) -> f64 {
        self.to_f64().unwrap()
    }
}

impl Real for f32 {
    unsafe fn gemm_raw(m: usize, k: usize, n: usize, a: *const f32, rsa: isize, csa: isize, b: *const f32, rsb: isize, csb: isize, beta: f32, c: *mut f32, rsc: isize) {
        matrixmultiply::sgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, rsc, 1)
    }
}

impl Real for f64 {
    unsafe fn gemm_raw(m: usize, k: usize, n: usize, a: *const f64, rsa: isize, csa: isize, b: *const f64, rsb: isize, csb: isize, beta: f64, c: *mut f64, rsc: isize) {
        matrixmultiply::dgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, rsc, 1)
    }
}

/// `c = a·b + beta·c` for row-major `a` (`m×k`, or `k×m` when `ta`) and
/// `b` (`k×n`, or `n×k` when `tb`).
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm<T: Real>(m: usize, k: usize, n: usize, a: &[T], ta: bool, b: &[T], tb: bool, c: &mut [T], beta: T) {
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    let (rsa, csa) = if ta { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if tb { (1, k as isize) } else { (n as isize, 1) };
    // SAFETY: the asserted lengths cover every index reachable through the
    // given strides.
    unsafe { T::gemm_raw(m, k, n, a.as_ptr(), rsa, csa, b.as_ptr(), rsb, csb, beta, c.as_mut_ptr(), n as isize) }
}

/// Unfolds a `channels × 2h × 2h` image into `(channels·16) × h²` columns:
/// column `(oy, ox)` holds the padded 4×4 window anchored at `(2oy−1, 2ox−1)`.
pub(crate) fn im2col<T: Real>(big: &[T], channels: usize, h: usize, cols: &mut [T]) {
    let b = 2 * h;
    let p = h * h;
    debug_assert_eq!(big.len(), channels * b * b);
    debug_assert_eq!(cols.len(), channels * TAPS * p);
    for c in 0..channels {
        let plane = &big[c * b * b..(c + 1) * b * b];
        for ky in 0..KERNEL {
            for kx in 0..KERNEL {
                let row = &mut cols[((c * TAPS) + ky * KERNEL + kx) * p..][..p];
                for oy in 0..h {
                    let iy = (2 * oy + ky) as isize - 1;
                    let out = &mut row[oy * h..(oy + 1) * h];
                    if iy < 0 || iy >= b as isize {
                        out.fill(T::zero());
                        continue;
                    }
                    let src = &plane[iy as usize * b..(iy as usize + 1) * b];
                    for (ox, o) in out.iter_mut().enumerate() {
                        let ix = (2 * ox + kx) as isize - 1;
                        *o = if ix < 0 || ix >= b as isize { T::zero() } else { src[ix as usize] };
                    }
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: scatters columns back, adding into `big`.
pub(crate) fn col2im<T: Real>(cols: &[T], channels: usize, h: usize, big: &mut [T]) {
    let b = 2 * h;
    let p = h * h;
    debug_assert_eq!(big.len(), channels * b * b);
    debug_assert_eq!(cols.len(), channels * TAPS * p);
    for c in 0..channels {
        let plane = &mut big[c * b * b..(c + 1) * b * b];
        for ky in 0..KERNEL {
            for kx in 0..KERNEL {
                let row = &cols[((c * TAPS) + ky * KERNEL + kx) * p..][..p];
                for oy in 0..h {
                    let iy = (2 * oy + ky) as isize - 1;
                    if iy < 0 || iy >= b as isize {
                        continue;
                    }
                    let dst = &mut plane[iy as usize * b..(iy as usize + 1) * b];
                    for (ox, &v) in row[oy * h..(oy + 1) * h].iter().enumerate() {
                        let ix = (2 * ox + kx) as isize - 1;
                        if ix >= 0 && ix < b as isize {
                            dst[ix as usize] = dst[ix as usize] + v;
                        }
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Op {
    /// `cin × 2h × 2h → cout × h × h`, weights `[cout][cin][4][4]`.
    Conv { cin: usize, cout: usize, h: usize },
    /// `cin × h × h → cout × 2h × 2h`, weights `[cin][cout][4][4]`.
    ConvTranspose { cin: usize, cout: usize, h: usize },
    /// `inp → out`, weights `[out][inp]`.
    Linear { inp: usize, out: usize },
}

impl Op {
    pub(crate) fn weight_len(self) -> usize {
        match self {
            Op::Conv { cin, cout, .. } | Op::ConvTranspose { cin, cout, .. } => cin * cout * TAPS,
            Op::Linear { inp, out } => inp * out,
        }
    }

    pub(crate) fn bias_len(self) -> usize {
        match self {
            Op::Conv { cout, .. } | Op::ConvTranspose { cout, .. } => cout,
            Op::Linear { out, .. } => out,
        }
    }

    pub(crate) fn input_len(self) -> usize {
        match self {
            Op::Conv { cin, h, .. } => cin * 4 * h * h,
            Op::ConvTranspose { cin, h, .. } => cin * h * h,
            Op::Linear { inp, .. } => inp,
        }
    }

    pub(crate) fn output_len(self) -> usize {
        match self {
            Op::Conv { cout, h, .. } => cout * h * h,
            Op::ConvTranspose { cout, h, .. } => cout * 4 * h * h,
            Op::Linear { out, .. } => out,
        }
    }

    /// `(fan_in, fan_out)` with the usual conventions for each weight layout.
    pub(crate) fn fans(self) -> (usize, usize) {
        match self {
            Op::Conv { cin, cout, .. } => (cin * TAPS, cout * TAPS),
            // weight dimension 1 is treated as the input side, as PyTorch does
            Op::ConvTranspose { cin, cout, .. } => (cout * TAPS, cin * TAPS),
            Op::Linear { inp, out } => (inp, out),
        }
    }

    pub(crate) fn forward<T: Real>(self, w: &[T], bias: &[T], input: &[T], out: &mut [T]) {
        debug_assert_eq!(input.len(), self.input_len());
        debug_assert_eq!(out.len(), self.output_len());
        match self {
            Op::Conv { cin, cout, h } => {
                let p = h * h;
                let mut cols = vec![T::zero(); cin * TAPS * p];
                im2col(input, cin, h, &mut cols);
                gemm(cout, cin * TAPS, p, w, false, &cols, false, out, T::zero());
                for (o, &b) in out.chunks_exact_mut(p).zip(bias) {
                    o.iter_mut().for_each(|v| *v = *v + b);
                }
            }
            Op::ConvTranspose { cin, cout, h } => {
                let p = h * h;
                let mut cols = vec![T::zero(); cout * TAPS * p];
                gemm(cout * TAPS, cin, p, w, true, input, false, &mut cols, T::zero());
                for (o, &b) in out.chunks_exact_mut(4 * p).zip(bias) {
                    o.fill(b);
                }
                col2im(&cols, cout, h, out);
            }
            Op::Linear { inp, out: n } => {
                out.copy_from_slice(bias);
                gemm(n, inp, 1, w, false, input, false, out, T::one());
            }
        }
    }

    /// Accumulates weight and bias gradients for upstream gradient `dout`
    /// and, when `din` is given, writes the input gradient.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn backward<T: Real>(
        self,
        w: &[T],
        input: &[T],
        dout: &[T],
        dw: &mut [T],
        db: &mut [T],
        din: Option<&mut [T]>,
    ) {
        match self {
            Op::Conv { cin, cout, h } => {
                let p = h * h;
                let mut cols = vec![T::zero(); cin * TAPS * p];
                im2col(input, cin, h, &mut cols);
                gemm(cout, p, cin * TAPS, dout, false, &cols, true, dw, T::one());
                for (d, g) in db.iter_mut().zip(dout.chunks_exact(p)) {
                    *d = *d + g.iter().copied().sum::<T>();
                }
                if let Some(din) = din {
                    gemm(cin * TAPS, cout, p, w, true, dout, false, &mut cols, T::zero());
                    din.fill(T::zero());
                    col2im(&cols, cin, h, din);
                }
            }
            Op::ConvTranspose { cin, cout, h } => {
                let p = h * h;
                let mut cols = vec![T::zero(); cout * TAPS * p];
                im2col(dout, cout, h, &mut cols);
                gemm(cin, p, cout * TAPS, input, false, &cols, true, dw, T::one());
                for (d, g) in db.iter_mut().zip(dout.chunks_exact(4 * p)) {
                    *d = *d + g.iter().copied().sum::<T>();
                }
                if let Some(din) = din {
                    gemm(cin, cout * TAPS, p, w, false, &cols, false, din, T::zero());
                }
            }
            Op::Linear { inp, out } => {
                gemm(out, 1, inp, dout, false, input, false, dw, T::one());
                for (d, &g) in db.iter_mut().zip(dout) {
                    *d = *d + g;
                }
                if let Some(din) = din {
                    gemm(inp, out, 1, w, true, dout, false, din, T::zero());
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_conv(input: &[f32], w: &[f32], cin: usize, cout: usize, h: usize) -> Vec<f32> {
        let b = 2 * h;
        let mut out = vec![0.0; cout * h * h];
        for co in 0..cout {
            for oy in 0..h {
                for ox in 0..h {
                    let mut s = 0.0;
                    for ci in 0..cin {
                        for ky in 0..4 {
                            for kx in 0..4 {
                                let iy = (2 * oy + ky) as isize - 1;
                                let ix = (2 * ox + kx) as isize - 1;
                                if iy >= 0 && ix >= 0 && (iy as usize) < b && (ix as usize) < b {
                                    s += w[((co * cin + ci) * 4 + ky) * 4 + kx]
                                        * input[(ci * b + iy as usize) * b + ix as usize];
                                }
                            }
                        }
                    }
                    out[(co * h + oy) * h + ox] = s;
                }
            }
        }
        out
    }

    fn ramp(n: usize, k: f32) -> Vec<f32> {
        (0..n).map(|i| (i as f32 * k).sin() * 0.5).collect()
    }

    #[test]
    fn conv_matches_direct_sum() {
        let (cin, cout, h) = (3, 2, 4);
        let op = Op::Conv { cin, cout, h };
        let input = ramp(op.input_len(), 0.37);
        let w = ramp(op.weight_len(), 0.91);
        let mut out = vec![0.0; op.output_len()];
        op.forward(&w, &[0.0; 2], &input, &mut out);
        let expect = naive_conv(&input, &w, cin, cout, h);
        for (a, b) in out.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn transposed_conv_is_the_adjoint() {
        // <conv(x), y> == <x, convT(y)> with the same kernel tensor
        let (c1, c2, h) = (3, 2, 4);
        let conv = Op::Conv { cin: c1, cout: c2, h };
        // tconv weights [cin=c2][cout=c1] are conv weights [cout=c2][cin=c1]
        let tconv = Op::ConvTranspose { cin: c2, cout: c1, h };
        let w = ramp(conv.weight_len(), 0.53);
        let x = ramp(conv.input_len(), 0.29);
        let y = ramp(conv.output_len(), 0.71);
        let mut cx = vec![0.0; conv.output_len()];
        conv.forward(&w, &[0.0; 2], &x, &mut cx);
        let mut ty = vec![0.0; tconv.output_len()];
        tconv.forward(&w, &[0.0; 3], &y, &mut ty);
        let lhs: f64 = cx.iter().zip(&y).map(|(a, b)| (*a as f64) * (*b as f64)).sum();
        let rhs: f64 = x.iter().zip(&ty).map(|(a, b)| (*a as f64) * (*b as f64)).sum();
        assert!((lhs - rhs).abs() < 1e-4, "{lhs} vs {rhs}");
    }

    #[test]
    fn col2im_is_adjoint_of_im2col() {
        let (c, h) = (2, 3);
        let x = ramp(c * 4 * h * h, 0.17);
        let y = ramp(c * 16 * h * h, 0.43);
        let mut cols = vec![0.0; y.len()];
        im2col(&x, c, h, &mut cols);
        let mut back = vec![0.0; x.len()];
        col2im(&y, c, h, &mut back);
        let lhs: f64 = cols.iter().zip(&y).map(|(a, b)| (*a as f64) * (*b as f64)).sum();
        let rhs: f64 = x.iter().zip(&back).map(|(a, b)| (*a as f64) * (*b as f64)).sum();
        assert!((lhs - rhs).abs() < 1e-4);
    }

    #[test]
    fn gemm_transposes() {
        // a = [[1,2],[3,4]], b = [[5,6],[7,8]]
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [5.0, 6.0, 7.0, 8.0];
        let mut c = [0.0; 4];
        gemm(2, 2, 2, &a, false, &b, false, &mut c, 0.0);
        assert_eq!(c, [19.0, 22.0, 43.0, 50.0]);
        gemm(2, 2, 2, &a, true, &b, false, &mut c, 0.0);
        assert_eq!(c, [26.0, 30.0, 38.0, 44.0]);
        gemm(2, 2, 2, &a, false, &b, true, &mut c, 0.0);
        assert_eq!(c, [17.0, 23.0, 39.0, 53.0]);
    }
}
