use std::io::{Read, Write};
use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::layers::{Op, Real};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::rng::Rng;

/// Samples per gradient chunk. Chunks are reduced in a fixed order, so the
/// summed gradient does not depend on the thread count.
const CHUNK: usize = 8;
const MAGIC: &[u8; 4] = b"LVAE";
const VERSION: u16 = 1;

/// Number of stride-2 layers on each side; the grid shrinks by `2⁴`.
pub const DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VaeConfig {
    /// Input side length; a multiple of 16.
    pub size: usize,
    pub latent: usize,
    pub channels: usize,
    pub hidden: usize,
    pub beta: f32,
}

impl Default for VaeConfig {
    fn default() -> Self {
        VaeConfig { size: 256, latent: 8, channels: 32, hidden: 256, beta: 5.0 }
    }
}

impl VaeConfig {
    pub fn with_size(size: usize) -> Self {
        VaeConfig { size, ..VaeConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let seed = 1 << DEPTH;
        if self.size < seed || self.size % seed != 0 {
            return Err(Error::InvalidParameter(format!(
                "VAE input size {} is not a positive multiple of {seed}",
                self.size
            )));
        }
        if self.latent == 0 || self.channels == 0 || self.hidden == 0 {
            return Err(Error::InvalidParameter("VAE dimensions must be positive".into()));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!("VAE beta {} must be finite and non-negative", self.beta)));
        }
        Ok(())
    }

    /// Side length of the decoder's seed feature map.
    pub fn seed_size(&self) -> usize {
        self.size >> DEPTH
    }

    fn ops(&self) -> Vec<(Op, bool)> {
        let (c, s, hid, d) = (self.channels, self.size, self.hidden, self.latent);
        let flat = c * self.seed_size() * self.seed_size();
        let mut ops = Vec::with_capacity(14);
        for i in 0..DEPTH {
            let cin = if i == 0 { 1 } else { c };
            ops.push((Op::Conv { cin, cout: c, h: s >> (i + 1) }, true));
        }
        ops.push((Op::Linear { inp: flat, out: hid }, true));
        ops.push((Op::Linear { inp: hid, out: hid }, true));
        ops.push((Op::Linear { inp: hid, out: 2 * d }, false));
        ops.push((Op::Linear { inp: d, out: hid }, true));
        ops.push((Op::Linear { inp: hid, out: flat }, true));
        for i in 0..DEPTH {
            let last = i == DEPTH - 1;
            let cout = if last { 1 } else { c };
            ops.push((Op::ConvTranspose { cin: c, cout, h: self.seed_size() << i }, !last));
        }
        ops
    }
}

/// Number of encoder layers; the remaining layers form the decoder.
const ENCODER_LAYERS: usize = DEPTH + 3;

#[derive(Clone, Copy, Debug)]
struct Layer {
    op: Op,
    relu: bool,
    weight: usize,
    bias: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    /// `U(±1/√fan_in)` for weights and biases.
    FanIn,
    /// `U(±√(6/(fan_in + fan_out)))` for weights, zero biases.
    Xavier,
}

/// Encoder output for one pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoding<T = f32> {
    pub mu: Vec<T>,
    pub logvar: Vec<T>,
}

/// Loss of one batch: `loss = −a + β Σ bᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LossParts {
    pub loss: f64,
    /// Mean over the batch of the summed per-pixel log-likelihood.
    pub a: f64,
    /// Per-latent KL terms.
    pub b: Vec<f64>,
}

/// Convolutional β-VAE with parameters in a single flat vector.
#[derive(Clone, Debug)]
pub struct Network<T> {
    config: VaeConfig,
    layers: Vec<Layer>,
    params: Vec<T>,
}

/// The single-precision model used for training and encoding.
pub type Vae = Network<f32>;

impl<T: Real> Network<T> {
    /// A model with every weight and bias zero.
    pub fn zeroed(config: VaeConfig) -> Result<Self> {
        config.validate()?;
        let mut layers = Vec::new();
        let mut offset = 0;
        for (op, relu) in config.ops() {
            let weight = offset;
            let bias = weight + op.weight_len();
            offset = bias + op.bias_len();
            layers.push(Layer { op, relu, weight, bias });
        }
        Ok(Network { config, layers, params: vec![T::zero(); offset] })
    }

    pub fn new(config: VaeConfig, init: Init, rng: &mut Rng) -> Result<Self> {
        let mut net = Self::zeroed(config)?;
        for layer in &net.layers {
            let (fan_in, fan_out) = layer.op.fans();
            let (wb, bb) = match init {
                Init::FanIn => {
                    let b = 1.0 / (fan_in as f64).sqrt();
                    (b, b)
                }
                Init::Xavier => ((6.0 / (fan_in + fan_out) as f64).sqrt(), 0.0),
            };
            for v in &mut net.params[layer.weight..layer.bias] {
                *v = T::of(rng.random_range(-wb..=wb));
            }
            let end = layer.bias + layer.op.bias_len();
            for v in &mut net.params[layer.bias..end] {
                *v = if bb > 0.0 { T::of(rng.random_range(-bb..=bb)) } else { T::zero() };
            }
        }
        Ok(net)
    }

    /// The same model in another precision.
    pub fn cast<U: Real>(&self) -> Network<U> {
        Network {
            config: self.config,
            layers: self.layers.clone(),
            params: self.params.iter().map(|&v| U::of(v.to64())).collect(),
        }
    }

    pub fn config(&self) -> &VaeConfig {
        &self.config
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// `(start, end)` ranges of each layer's weights and biases, in storage order.
    pub fn param_groups(&self) -> Vec<(usize, usize)> {
        self.layers
            .iter()
            .flat_map(|l| [(l.weight, l.bias), (l.bias, l.bias + l.op.bias_len())])
            .collect()
    }

    fn check_input(&self, p: &Pattern) -> Result<()> {
        if p.size() != self.config.size {
            return Err(Error::InvalidArgument(format!(
                "pattern of size {} given to a VAE for size {}",
                p.size(),
                self.config.size
            )));
        }
        Ok(())
    }

    fn run(&self, range: std::ops::Range<usize>, input: Vec<T>) -> Vec<Vec<T>> {
        let mut acts = Vec::with_capacity(range.len() + 1);
        acts.push(input);
        for layer in &self.layers[range] {
            let (w, b) = self.layer_params(layer);
            let mut out = vec![T::zero(); layer.op.output_len()];
            layer.op.forward(w, b, acts.last().unwrap(), &mut out);
            if layer.relu {
                out.iter_mut().for_each(|v| *v = v.max(T::zero()));
            }
            acts.push(out);
        }
        acts
    }

    fn layer_params(&self, layer: &Layer) -> (&[T], &[T]) {
        (
            &self.params[layer.weight..layer.bias],
            &self.params[layer.bias..layer.bias + layer.op.bias_len()],
        )
    }

    fn encode_cells(&self, cells: &[f32]) -> Encoding<T> {
        let input = cells.iter().map(|&v| T::of(v as f64)).collect();
        let out = self.run(0..ENCODER_LAYERS, input).pop().unwrap();
        let d = self.config.latent;
        Encoding { mu: out[..d].to_vec(), logvar: out[d..].to_vec() }
    }

    fn decode_unchecked(&self, z: &[T]) -> Vec<T> {
        self.run(ENCODER_LAYERS..self.layers.len(), z.to_vec()).pop().unwrap()
    }

    pub fn encode_one(&self, p: &Pattern) -> Result<Encoding<T>> {
        self.check_input(p)?;
        Ok(self.encode_cells(p.cells()))
    }

    pub fn encode(&self, batch: &[Pattern]) -> Result<Vec<Encoding<T>>> {
        batch.iter().try_for_each(|p| self.check_input(p))?;
        Ok(batch.par_iter().map(|p| self.encode_cells(p.cells())).collect())
    }

    /// Decoder logits (pre-sigmoid), row-major `size × size`.
    pub fn decode(&self, z: &[T]) -> Result<Vec<T>> {
        if z.len() != self.config.latent {
            return Err(Error::InvalidArgument(format!(
                "latent of length {} given to a VAE with {} latents",
                z.len(),
                self.config.latent
            )));
        }
        Ok(self.decode_unchecked(z))
    }

    /// Eval-mode reconstruction: decode the mean and apply the sigmoid.
    pub fn reconstruct(&self, p: &Pattern) -> Result<Pattern> {
        let e = self.encode_one(p)?;
        let logits = self.decode_unchecked(&e.mu);
        let cells = logits.iter().map(|&z| sigmoid(z.to64()) as f32).collect();
        Pattern::from_cells(self.config.size, cells)
    }

    /// Loss of a batch in eval mode (`z = μ`).
    pub fn eval_loss(&self, batch: &[Pattern]) -> Result<LossParts> {
        batch.iter().try_for_each(|p| self.check_input(p))?;
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let per: Vec<(f64, Vec<f64>)> = batch
            .par_iter()
            .map(|p| {
                let e = self.encode_cells(p.cells());
                let logits = self.decode_unchecked(&e.mu);
                let rec = p.cells().iter().zip(&logits).map(|(&x, &z)| bce_with_logits(x as f64, z.to64())).sum();
                (rec, kl_terms(&e.mu, &e.logvar))
            })
            .collect();
        Ok(assemble_loss(per.iter().map(|(r, _)| *r).sum(), per.iter().map(|(_, k)| k.as_slice()), batch.len(), self.config))
    }

    /// Batch loss and its gradient with respect to every parameter. `noise`
    /// holds one standard normal vector per sample for the
    /// reparameterization; `None` decodes the mean.
    pub fn loss_and_gradient(&self, batch: &[&[T]], noise: Option<&[Vec<T>]>) -> Result<(LossParts, Vec<T>)> {
        let n = batch.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let s2 = self.config.size * self.config.size;
        if let Some(x) = batch.iter().find(|x| x.len() != s2) {
            return Err(Error::InvalidArgument(format!("input of length {} for a VAE expecting {s2}", x.len())));
        }
        if let Some(eta) = noise {
            if eta.len() != n || eta.iter().any(|e| e.len() != self.config.latent) {
                return Err(Error::InvalidArgument("noise shape does not match the batch".into()));
            }
        }
        let scale = T::of(1.0 / n as f64);
        let chunks: Vec<(f64, Vec<f64>, Vec<T>)> = (0..n)
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|idx| {
                let mut grad = vec![T::zero(); self.params.len()];
                let mut rec = 0.0;
                let mut kl = vec![0.0; self.config.latent];
                for &i in idx {
                    let eta = noise.map(|e| e[i].as_slice());
                    let (r, k) = self.sample_backward(batch[i], eta, scale, &mut grad);
                    rec += r;
                    kl.iter_mut().zip(&k).for_each(|(t, v)| *t += v);
                }
                (rec, kl, grad)
            })
            .collect();
        let mut grad = vec![T::zero(); self.params.len()];
        for (_, _, g) in &chunks {
            grad.iter_mut().zip(g).for_each(|(t, &v)| *t = *t + v);
        }
        let rec = chunks.iter().map(|c| c.0).sum();
        Ok((assemble_loss(rec, chunks.iter().map(|c| c.1.as_slice()), n, self.config), grad))
    }

    /// Which ReLU units are active for each input, concatenated over the
    /// batch. Two parameter settings with equal signatures lie in the same
    /// piecewise-smooth region of the loss.
    pub fn relu_signature(&self, batch: &[&[T]], noise: Option<&[Vec<T>]>) -> Vec<bool> {
        let d = self.config.latent;
        let half = T::of(0.5);
        let mut sig = Vec::new();
        for (i, x) in batch.iter().enumerate() {
            let enc = self.run(0..ENCODER_LAYERS, x.to_vec());
            let (mu, lv) = enc.last().unwrap().split_at(d);
            let z: Vec<T> = match noise {
                Some(eta) => (0..d).map(|k| mu[k] + (half * lv[k]).exp() * eta[i][k]).collect(),
                None => mu.to_vec(),
            };
            let dec = self.run(ENCODER_LAYERS..self.layers.len(), z);
            let acts = enc[1..].iter().chain(&dec[1..]);
            for (layer, out) in self.layers.iter().zip(acts) {
                if layer.relu {
                    sig.extend(out.iter().map(|&v| v > T::zero()));
                }
            }
        }
        sig
    }

    /// Adds one sample's gradient into `grad`; returns its reconstruction
    /// log-likelihood and unscaled per-latent KL sums.
    fn sample_backward(&self, x: &[T], eta: Option<&[T]>, scale: T, grad: &mut [T]) -> (f64, Vec<f64>) {
        let d = self.config.latent;
        let beta = T::of(self.config.beta as f64);
        let half = T::of(0.5);
        let enc = self.run(0..ENCODER_LAYERS, x.to_vec());
        let head = enc.last().unwrap();
        let (mu, lv) = head.split_at(d);
        let z: Vec<T> = match eta {
            Some(eta) => (0..d).map(|i| mu[i] + (half * lv[i]).exp() * eta[i]).collect(),
            None => mu.to_vec(),
        };
        let dec = self.run(ENCODER_LAYERS..self.layers.len(), z);
        let logits = dec.last().unwrap();

        let mut rec = 0.0;
        let mut g: Vec<T> = Vec::with_capacity(logits.len());
        for (&t, &xv) in logits.iter().zip(x) {
            let (t64, x64) = (t.to64(), xv.to64());
            rec += bce_with_logits(x64, t64);
            g.push(T::of(sigmoid(t64) - x64) * scale);
        }

        let dz = self.backward_through(ENCODER_LAYERS, &dec, g, grad, true);
        let mut dhead = vec![T::zero(); 2 * d];
        for i in 0..d {
            let sd = (half * lv[i]).exp();
            let e = eta.map_or(T::zero(), |e| e[i]);
            dhead[i] = dz[i] + beta * mu[i] * scale;
            dhead[d + i] = dz[i] * e * half * sd + beta * half * (lv[i].exp() - T::one()) * scale;
        }
        let kl = kl_terms(mu, lv);
        self.backward_through(0, &enc, dhead, grad, false);
        (rec, kl)
    }

    /// Back-propagates `g` (gradient at the output of the last layer of the
    /// stage starting at `first`) through that stage, given its activations.
    fn backward_through(&self, first: usize, acts: &[Vec<T>], mut g: Vec<T>, grad: &mut [T], want_input: bool) -> Vec<T> {
        let count = acts.len() - 1;
        for j in (0..count).rev() {
            let layer = &self.layers[first + j];
            if layer.relu {
                for (gv, &o) in g.iter_mut().zip(&acts[j + 1]) {
                    if o <= T::zero() {
                        *gv = T::zero();
                    }
                }
            }
            let (w, _) = self.layer_params(layer);
            let (gw, rest) = grad[layer.weight..].split_at_mut(layer.op.weight_len());
            let gb = &mut rest[..layer.op.bias_len()];
            let need = j > 0 || want_input;
            let mut din = if need { vec![T::zero(); layer.op.input_len()] } else { Vec::new() };
            layer.op.backward(w, &acts[j], &g, gw, gb, need.then_some(din.as_mut_slice()));
            g = din;
        }
        g
    }
}

impl Network<f32> {
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let c = &self.config;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        for v in [c.size, c.latent, c.channels, c.hidden] {
            w.write_all(&(v as u32).to_le_bytes())?;
        }
        w.write_all(&c.beta.to_le_bytes())?;
        w.write_all(&(self.params.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.params.len() * 4);
        for v in &self.params {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::format("VAE checkpoint", "bad magic"));
        }
        let mut b2 = [0u8; 2];
        r.read_exact(&mut b2)?;
        let version = u16::from_le_bytes(b2);
        if version != VERSION {
            return Err(Error::format("VAE checkpoint", format!("unsupported version {version}")));
        }
        let mut b4 = [0u8; 4];
        let mut dims = [0usize; 4];
        for d in &mut dims {
            r.read_exact(&mut b4)?;
            *d = u32::from_le_bytes(b4) as usize;
        }
        r.read_exact(&mut b4)?;
        let beta = f32::from_le_bytes(b4);
        let config = VaeConfig { size: dims[0], latent: dims[1], channels: dims[2], hidden: dims[3], beta };
        let mut vae = Vae::zeroed(config).map_err(|e| Error::format("VAE checkpoint", e.to_string()))?;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        if count != vae.params.len() {
            return Err(Error::format(
                "VAE checkpoint",
                format!("{count} parameters stored, architecture needs {}", vae.params.len()),
            ));
        }
        let mut buf = vec![0u8; count * 4];
        r.read_exact(&mut buf)?;
        for (p, c) in vae.params.iter_mut().zip(buf.chunks_exact(4)) {
            *p = f32::from_le_bytes(c.try_into().unwrap());
        }
        Ok(vae)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Vae::read_from(&mut std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// `exp(lv) + μ² − lv − 1` per latent.
fn kl_terms<T: Real>(mu: &[T], logvar: &[T]) -> Vec<f64> {
    mu.iter()
        .zip(logvar)
        .map(|(&m, &l)| {
            let (m, l) = (m.to64(), l.to64());
            l.exp() + m * m - l - 1.0
        })
        .collect()
}

fn assemble_loss<'a>(rec_sum: f64, kl: impl Iterator<Item = &'a [f64]>, n: usize, config: VaeConfig) -> LossParts {
    let n = n as f64;
    let mut b = vec![0.0; config.latent];
    for k in kl {
        b.iter_mut().zip(k).for_each(|(t, v)| *t += v);
    }
    b.iter_mut().for_each(|v| *v /= 2.0 * n);
    let a = rec_sum / n;
    let loss = -a + config.beta as f64 * b.iter().sum::<f64>();
    LossParts { loss, a, b }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eˣ)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `x·ln σ(z) + (1 − x)·ln(1 − σ(z))` in its stable form `x·z − softplus(z)`.
pub fn bce_with_logits(x: f64, z: f64) -> f64 {
    x * z - softplus(z)
}

/// `z = μ + exp(logvar/2)·η` with `η ~ N(0, 1)`; eval mode (`rng = None`) returns `μ`.
pub fn reparameterize(mu: &[f32], logvar: &[f32], rng: Option<&mut Rng>) -> Vec<f32> {
    match rng {
        None => mu.to_vec(),
        Some(rng) => mu
            .iter()
            .zip(logvar)
            .map(|(&m, &l)| {
                let eta: f32 = StandardNormal.sample(rng);
                m + (0.5 * l).exp() * eta
            })
            .collect(),
    }
}

/// `loss = −a + β Σ bᵢ` over a batch; every slice list is indexed by sample.
pub fn vae_loss(x: &[&[f32]], logits: &[&[f32]], mu: &[&[f32]], logvar: &[&[f32]], beta: f64) -> LossParts {
    let n = x.len() as f64;
    let d = mu.first().map_or(0, |m| m.len());
    let mut a = 0.0;
    for (xs, zs) in x.iter().zip(logits) {
        a += xs.iter().zip(zs.iter()).map(|(&xv, &z)| bce_with_logits(xv as f64, z as f64)).sum::<f64>();
    }
    a /= n;
    let mut b = vec![0.0; d];
    for (m, l) in mu.iter().zip(logvar) {
        for i in 0..d {
            let (m, l) = (m[i] as f64, l[i] as f64);
            b[i] += l.exp() + m * m - l - 1.0;
        }
    }
    b.iter_mut().for_each(|v| *v /= 2.0 * n);
    let loss = -a + beta * b.iter().sum::<f64>();
    LossParts { loss, a, b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    fn tiny() -> VaeConfig {
        VaeConfig { size: 32, latent: 4, channels: 4, hidden: 16, beta: 5.0 }
    }

    fn model(cfg: VaeConfig) -> Vae {
        Vae::new(cfg, Init::FanIn, &mut stream_rng(1, Stream::Training, 0)).unwrap()
    }

    fn blob(size: usize, phase: f64) -> Pattern {
        Pattern::from_fn(size, |x, y| {
            let (u, v) = (x as f64 / size as f64, y as f64 / size as f64);
            (0.5 + 0.5 * (6.0 * u + phase).sin() * (4.0 * v - phase).cos()) as f32
        })
    }

    #[test]
    fn rejects_sizes_not_divisible_by_sixteen() {
        assert!(VaeConfig::with_size(40).validate().is_err());
        assert!(VaeConfig::with_size(8).validate().is_err());
        assert!(VaeConfig::with_size(48).validate().is_ok());
    }

    #[test]
    fn zero_model_encodes_to_zero() {
        let vae = Vae::zeroed(tiny()).unwrap();
        let e = vae.encode(&[blob(32, 0.3), Pattern::filled(32, 1.0)]).unwrap();
        for enc in e {
            assert!(enc.mu.iter().chain(&enc.logvar).all(|&v| v == 0.0));
        }
    }

    #[test]
    fn encode_shapes_and_determinism() {
        let vae = model(tiny());
        let p = blob(32, 1.1);
        let e = vae.encode(&[p.clone(), p.clone(), blob(32, 0.2)]).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].mu.len(), 4);
        assert_eq!(e[0].logvar.len(), 4);
        assert_eq!(e[0], e[1]);
        assert!(vae.encode(&[blob(64, 0.0)]).is_err());
    }

    #[test]
    fn decode_restores_the_input_shape() {
        for size in [32, 64, 256] {
            let cfg = VaeConfig { size, channels: 2, hidden: 8, ..VaeConfig::default() };
            let vae = model(cfg);
            let e = vae.encode_one(&Pattern::zeros(size)).unwrap();
            assert_eq!(vae.decode(&e.mu).unwrap().len(), size * size);
        }
    }

    #[test]
    fn default_architecture_parameter_count() {
        let vae = Vae::zeroed(VaeConfig::default()).unwrap();
        let conv = 32 * 16 + 32 + 3 * (32 * 32 * 16 + 32);
        let enc_fc = (8192 * 256 + 256) + (256 * 256 + 256) + (256 * 16 + 16);
        let dec_fc = (8 * 256 + 256) + (256 * 8192 + 8192);
        let tconv = 3 * (32 * 32 * 16 + 32) + (32 * 16 + 1);
        assert_eq!(vae.param_count(), conv + enc_fc + dec_fc + tconv);
    }

    #[test]
    fn eval_reparameterization_is_the_mean() {
        let mu = [0.3, -1.2];
        assert_eq!(reparameterize(&mu, &[0.5, 2.0], None), mu.to_vec());
        let mut rng = stream_rng(3, Stream::Training, 0);
        let z = reparameterize(&mu, &[f32::NEG_INFINITY; 2], Some(&mut rng));
        assert_eq!(z, mu.to_vec());
    }

    #[test]
    fn loss_closed_forms() {
        let x = vec![0.3f32; 16];
        let zeros = vec![0.0f32; 16];
        let parts = vae_loss(&[&x], &[&zeros], &[&[0.0, 1.0]], &[&[0.0, 0.0]], 5.0);
        assert_eq!(parts.b[0], 0.0);
        assert!((parts.b[1] - 0.5).abs() < 1e-12);
        assert!((-parts.a - 16.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((parts.loss - (16.0 * std::f64::consts::LN_2 + 2.5)).abs() < 1e-9);
    }

    #[test]
    fn kl_term_matches_monte_carlo_estimate() {
        let mut rng = stream_rng(4, Stream::Training, 9);
        for (mu, lv) in [(0.7f32, -0.4f32), (-1.3, 0.8), (0.0, -2.0)] {
            let parts = vae_loss(&[&[0.0]], &[&[0.0]], &[&[mu]], &[&[lv]], 1.0);
            let (m, s) = (mu as f64, (0.5 * lv as f64).exp());
            let n = 200_000;
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..n {
                let eta: f64 = StandardNormal.sample(&mut rng);
                let z = m + s * eta;
                // log q(z) − log p(z)
                let v = -0.5 * eta * eta - s.ln() + 0.5 * z * z;
                sum += v;
                sq += v * v;
            }
            let mean = sum / n as f64;
            let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
            assert!((parts.b[0] - mean).abs() < 5.0 * se, "{} vs {mean} ± {se}", parts.b[0]);
        }
    }

    #[test]
    fn reconstruction_term_matches_pixelwise_oracle() {
        let xs: Vec<Vec<f32>> = (0..3).map(|k| (0..20).map(|i| ((i * 7 + k) % 11) as f32 / 10.0).collect()).collect();
        let zs: Vec<Vec<f32>> = (0..3).map(|k| (0..20).map(|i| (i as f32 - 10.0) * 0.7 + k as f32).collect()).collect();
        let x: Vec<&[f32]> = xs.iter().map(|v| v.as_slice()).collect();
        let z: Vec<&[f32]> = zs.iter().map(|v| v.as_slice()).collect();
        let mu = vec![[0.0f32].as_slice(); 3];
        let parts = vae_loss(&x, &z, &mu, &mu, 1.0);
        let mut oracle = 0.0;
        for (xv, zv) in xs.iter().flatten().zip(zs.iter().flatten()) {
            let p = 1.0 / (1.0 + (-(*zv as f64)).exp());
            oracle += *xv as f64 * p.ln() + (1.0 - *xv as f64) * (1.0 - p).ln();
        }
        assert!((parts.a - oracle / 3.0).abs() < 1e-9 * oracle.abs());
        assert!(parts.a <= 0.0);
    }

    #[test]
    fn gradient_loss_agrees_with_eval_loss() {
        let vae = model(tiny());
        let batch = vec![blob(32, 0.1), blob(32, 0.9), blob(32, 2.0)];
        let xs: Vec<&[f32]> = batch.iter().map(|p| p.cells()).collect();
        let (parts, grad) = vae.loss_and_gradient(&xs, None).unwrap();
        let eval = vae.eval_loss(&batch).unwrap();
        assert!((parts.loss - eval.loss).abs() < 1e-6 * eval.loss.abs());
        assert_eq!(grad.len(), vae.param_count());
        assert!(grad.iter().any(|&g| g != 0.0));
    }

    #[test]
    fn checkpoint_round_trip() {
        let vae = model(tiny());
        let mut buf = Vec::new();
        vae.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"LVAE");
        let back = Vae::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back.config(), vae.config());
        assert_eq!(back.params(), vae.params());
        buf.truncate(buf.len() - 1);
        assert!(Vae::read_from(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn xavier_init_zeroes_biases() {
        let vae = Vae::new(tiny(), Init::Xavier, &mut stream_rng(2, Stream::GoalSpace, 0)).unwrap();
        for l in &vae.layers {
            let (w, b) = vae.layer_params(l);
            assert!(b.iter().all(|&v| v == 0.0));
            let (fi, fo) = l.op.fans();
            let bound = (6.0 / (fi + fo) as f32).sqrt();
            assert!(w.iter().all(|v| v.abs() <= bound));
        }
    }
}
