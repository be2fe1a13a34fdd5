//! Compositional pattern producing networks that draw Lenia initial states.
//!
//! A genome has four fixed inputs (bias, x, y, distance to center), one
//! output node and a variable set of hidden nodes. Connections may be
//! recurrent or self-loops. Rendering evaluates the network for each cell
//! with a fixed number of synchronous propagation passes from zero node
//! states, and maps the output `p` to the activity `1 − |p|`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::pattern::{clip_unit, Pattern};
use crate::rng::Rng;

pub const BIAS: NodeId = NodeId(-1);
pub const INPUT_X: NodeId = NodeId(-2);
pub const INPUT_Y: NodeId = NodeId(-3);
pub const INPUT_D: NodeId = NodeId(-4);
pub const INPUTS: [NodeId; 4] = [BIAS, INPUT_X, INPUT_Y, INPUT_D];
pub const OUTPUT: NodeId = NodeId(0);

/// Inputs are negative, the output is 0, hidden nodes are positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub i32);

impl NodeId {
    pub fn is_input(self) -> bool {
        self.0 < 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Gauss,
    Sigm,
}

impl Activation {
    pub const ALL: [Activation; 2] = [Activation::Gauss, Activation::Sigm];

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Gauss => gauss(x),
            Activation::Sigm => sigm(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Gauss => "gauss",
            Activation::Sigm => "sigm",
        }
    }

    pub fn parse(s: &str) -> Option<Activation> {
        match s {
            "gauss" => Some(Activation::Gauss),
            "sigm" => Some(Activation::Sigm),
            _ => None,
        }
    }
}

/// `2 exp(−(2.5 x)²) − 1`
pub fn gauss(x: f64) -> f64 {
    let s = 2.5 * x;
    2.0 * (-(s * s)).exp() - 1.0
}

/// `2 / (1 + exp(−5 x)) − 1`
pub fn sigm(x: f64) -> f64 {
    2.0 / (1.0 + (-5.0 * x).exp()) - 1.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeGene {
    pub id: NodeId,
    pub activation: Activation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionGene {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
    pub enabled: bool,
}

/// Sampling and mutation meta-parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MutationConfig {
    pub initial_hidden: usize,
    pub connection_prob: f64,
    pub weight_init_std: f64,
    pub weight_min: f64,
    pub weight_max: f64,
    pub node_add_prob: f64,
    pub node_delete_prob: f64,
    pub conn_add_prob: f64,
    pub conn_delete_prob: f64,
    pub activation_mutate_rate: f64,
    pub weight_mutate_rate: f64,
    pub weight_replace_rate: f64,
    pub weight_mutate_power: f64,
    pub enabled_mutate_rate: f64,
    /// Synchronous propagation passes used when rendering.
    pub passes: usize,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig {
            initial_hidden: 4,
            connection_prob: 0.6,
            weight_init_std: 0.4,
            weight_min: -3.0,
            weight_max: 3.0,
            node_add_prob: 0.02,
            node_delete_prob: 0.02,
            conn_add_prob: 0.05,
            conn_delete_prob: 0.01,
            activation_mutate_rate: 0.1,
            weight_mutate_rate: 0.05,
            weight_replace_rate: 0.06,
            weight_mutate_power: 1.0,
            enabled_mutate_rate: 0.02,
            passes: 2,
        }
    }
}

impl MutationConfig {
    /// A configuration under which mutation changes nothing.
    pub fn frozen() -> Self {
        MutationConfig {
            node_add_prob: 0.0,
            node_delete_prob: 0.0,
            conn_add_prob: 0.0,
            conn_delete_prob: 0.0,
            activation_mutate_rate: 0.0,
            weight_mutate_rate: 0.0,
            weight_replace_rate: 0.0,
            enabled_mutate_rate: 0.0,
            ..MutationConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            self.connection_prob,
            self.node_add_prob,
            self.node_delete_prob,
            self.conn_add_prob,
            self.conn_delete_prob,
            self.activation_mutate_rate,
            self.weight_mutate_rate,
            self.weight_replace_rate,
            self.enabled_mutate_rate,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("mutation probabilities must lie in [0, 1]".into()));
        }
        if self.weight_mutate_rate + self.weight_replace_rate > 1.0 {
            return Err(Error::InvalidParameter("weight mutate + replace rates exceed 1".into()));
        }
        if !(self.weight_min < self.weight_max) || self.weight_init_std < 0.0 || self.weight_mutate_power < 0.0 {
            return Err(Error::InvalidParameter("bad weight range or spread".into()));
        }
        if self.passes == 0 {
            return Err(Error::InvalidParameter("at least one propagation pass is required".into()));
        }
        Ok(())
    }

    fn fresh_weight(&self, rng: &mut Rng) -> f64 {
        let w = Normal::new(0.0, self.weight_init_std).unwrap().sample(rng);
        w.clamp(self.weight_min, self.weight_max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CppnGenome {
    /// Output and hidden nodes, sorted by id. Inputs are implicit.
    nodes: Vec<NodeGene>,
    connections: Vec<ConnectionGene>,
}

impl CppnGenome {
    /// Assembles a genome, checking that exactly one output exists and every
    /// connection endpoint is known.
    pub fn new(mut nodes: Vec<NodeGene>, connections: Vec<ConnectionGene>) -> Result<CppnGenome> {
        nodes.sort_by_key(|n| n.id);
        let genome = CppnGenome { nodes, connections };
        genome.validate()?;
        Ok(genome)
    }

    pub fn validate(&self) -> Result<()> {
        let ids: BTreeSet<NodeId> = self.nodes.iter().map(|n| n.id).collect();
        if ids.len() != self.nodes.len() {
            return Err(Error::InvalidArgument("duplicate node id".into()));
        }
        if self.nodes.iter().any(|n| n.id.is_input()) {
            return Err(Error::InvalidArgument("input nodes are implicit".into()));
        }
        if !ids.contains(&OUTPUT) {
            return Err(Error::InvalidArgument("genome has no output node".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &self.connections {
            let src_ok = INPUTS.contains(&c.src) || ids.contains(&c.src);
            if !src_ok || !ids.contains(&c.dst) {
                return Err(Error::InvalidArgument(format!(
                    "connection {} -> {} has a dangling endpoint",
                    c.src.0, c.dst.0
                )));
            }
            if !seen.insert((c.src, c.dst)) {
                return Err(Error::InvalidArgument(format!("duplicate connection {} -> {}", c.src.0, c.dst.0)));
            }
            if !c.weight.is_finite() {
                return Err(Error::InvalidArgument("non-finite weight".into()));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[NodeGene] {
        &self.nodes
    }

    pub fn connections(&self) -> &[ConnectionGene] {
        &self.connections
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.id != OUTPUT).count()
    }

    fn candidate_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let targets: Vec<NodeId> = self.nodes.iter().map(|n| n.id).collect();
        let sources: Vec<NodeId> = INPUTS.iter().copied().chain(targets.iter().copied()).collect();
        let mut pairs = Vec::with_capacity(sources.len() * targets.len());
        for &s in &sources {
            for &d in &targets {
                pairs.push((s, d));
            }
        }
        pairs
    }

    fn next_hidden_id(&self) -> NodeId {
        NodeId(self.nodes.iter().map(|n| n.id.0).max().unwrap_or(0) + 1)
    }

    /// Writes the genome as a line-oriented text record.
    pub fn to_text(&self) -> String {
        let mut s = String::from("cppn 1\n");
        for n in &self.nodes {
            writeln!(s, "node {} {}", n.id.0, n.activation.name()).unwrap();
        }
        for c in &self.connections {
            writeln!(s, "conn {} {} {:?} {}", c.src.0, c.dst.0, c.weight, u8::from(c.enabled)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<CppnGenome> {
        let bad = |line: usize, msg: &str| Error::format("genome record", format!("line {}: {msg}", line + 1));
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == "cppn 1" => {}
            _ => return Err(bad(0, "expected header `cppn 1`")),
        }
        let mut nodes = Vec::new();
        let mut connections = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["node", id, act] => {
                    let id = id.parse().map_err(|_| bad(i, "bad node id"))?;
                    let activation = Activation::parse(act).ok_or_else(|| bad(i, "unknown activation"))?;
                    nodes.push(NodeGene { id: NodeId(id), activation });
                }
                ["conn", src, dst, w, en] => {
                    let src = src.parse().map_err(|_| bad(i, "bad source id"))?;
                    let dst = dst.parse().map_err(|_| bad(i, "bad target id"))?;
                    let weight = w.parse().map_err(|_| bad(i, "bad weight"))?;
                    let enabled = match *en {
                        "1" => true,
                        "0" => false,
                        _ => return Err(bad(i, "enabled flag must be 0 or 1")),
                    };
                    connections.push(ConnectionGene { src: NodeId(src), dst: NodeId(dst), weight, enabled });
                }
                _ => return Err(bad(i, "unrecognized line")),
            }
        }
        CppnGenome::new(nodes, connections).map_err(|e| Error::format("genome record", e.to_string()))
    }
}

fn random_activation(rng: &mut Rng) -> Activation {
    *Activation::ALL.choose(rng).unwrap()
}

/// Samples a fresh genome: `initial_hidden` hidden nodes, each potential
/// connection present with `connection_prob`.
pub fn sample_genome(cfg: &MutationConfig, rng: &mut Rng) -> CppnGenome {
    let mut nodes = vec![NodeGene { id: OUTPUT, activation: random_activation(rng) }];
    for i in 0..cfg.initial_hidden {
        nodes.push(NodeGene { id: NodeId(i as i32 + 1), activation: random_activation(rng) });
    }
    let mut genome = CppnGenome { nodes, connections: Vec::new() };
    for (src, dst) in genome.candidate_pairs() {
        if rng.random::<f64>() < cfg.connection_prob {
            let weight = cfg.fresh_weight(rng);
            genome.connections.push(ConnectionGene { src, dst, weight, enabled: true });
        }
    }
    genome
}

/// Returns a mutated copy: structural mutations first (node add, node
/// delete, connection add, connection delete, each with its probability),
/// then per-connection weight and enable mutations, then per-node activation
/// mutations.
pub fn mutate_genome(genome: &CppnGenome, cfg: &MutationConfig, rng: &mut Rng) -> CppnGenome {
    let mut g = genome.clone();

    if rng.random::<f64>() < cfg.node_add_prob {
        add_node(&mut g, cfg, rng);
    }
    if rng.random::<f64>() < cfg.node_delete_prob {
        delete_node(&mut g, rng);
    }
    if rng.random::<f64>() < cfg.conn_add_prob {
        add_connection(&mut g, cfg, rng);
    }
    if rng.random::<f64>() < cfg.conn_delete_prob && !g.connections.is_empty() {
        let i = rng.random_range(0..g.connections.len());
        g.connections.remove(i);
    }

    for c in &mut g.connections {
        let r: f64 = rng.random();
        if r < cfg.weight_mutate_rate {
            let delta = Normal::new(0.0, cfg.weight_mutate_power).unwrap().sample(rng);
            c.weight = (c.weight + delta).clamp(cfg.weight_min, cfg.weight_max);
        } else if r < cfg.weight_mutate_rate + cfg.weight_replace_rate {
            c.weight = cfg.fresh_weight(rng);
        }
        if rng.random::<f64>() < cfg.enabled_mutate_rate {
            c.enabled = !c.enabled;
        }
    }
    for n in &mut g.nodes {
        if rng.random::<f64>() < cfg.activation_mutate_rate {
            n.activation = random_activation(rng);
        }
    }
    g
}

/// Splits a random enabled connection `a → b` into `a → new → b`; the first
/// half gets weight 1 and the second the old weight.
fn add_node(g: &mut CppnGenome, cfg: &MutationConfig, rng: &mut Rng) {
    let enabled: Vec<usize> = (0..g.connections.len()).filter(|&i| g.connections[i].enabled).collect();
    let Some(&ci) = enabled.choose(rng) else {
        return;
    };
    let id = g.next_hidden_id();
    let old = g.connections[ci].clone();
    g.connections[ci].enabled = false;
    g.nodes.push(NodeGene { id, activation: random_activation(rng) });
    let w1 = 1.0f64.clamp(cfg.weight_min, cfg.weight_max);
    g.connections.push(ConnectionGene { src: old.src, dst: id, weight: w1, enabled: true });
    g.connections.push(ConnectionGene { src: id, dst: old.dst, weight: old.weight, enabled: true });
}

/// Removes a random hidden node and its connections; never the output.
fn delete_node(g: &mut CppnGenome, rng: &mut Rng) {
    let hidden: Vec<NodeId> = g.nodes.iter().map(|n| n.id).filter(|&id| id != OUTPUT).collect();
    let Some(&victim) = hidden.choose(rng) else {
        return;
    };
    g.nodes.retain(|n| n.id != victim);
    g.connections.retain(|c| c.src != victim && c.dst != victim);
}

/// Adds a random connection; an existing pair is re-enabled instead.
fn add_connection(g: &mut CppnGenome, cfg: &MutationConfig, rng: &mut Rng) {
    let pairs = g.candidate_pairs();
    let &(src, dst) = pairs.choose(rng).expect("output node always exists");
    if let Some(c) = g.connections.iter_mut().find(|c| c.src == src && c.dst == dst) {
        c.enabled = true;
        return;
    }
    let weight = cfg.fresh_weight(rng);
    g.connections.push(ConnectionGene { src, dst, weight, enabled: true });
}

/// A genome flattened into index form for fast per-cell evaluation.
struct CompiledNet {
    /// Activation per non-input node; slot 0 is the output.
    activations: Vec<Activation>,
    /// Per node: `(source slot, weight)`; sources `0..4` are inputs, `4 + i` node `i`.
    incoming: Vec<Vec<(usize, f64)>>,
}

impl CompiledNet {
    fn new(g: &CppnGenome) -> CompiledNet {
        let slot_of = |id: NodeId| -> usize {
            if id.is_input() {
                (-id.0 - 1) as usize
            } else {
                4 + g.nodes.iter().position(|n| n.id == id).unwrap()
            }
        };
        let mut incoming = vec![Vec::new(); g.nodes.len()];
        for c in g.connections.iter().filter(|c| c.enabled) {
            incoming[slot_of(c.dst) - 4].push((slot_of(c.src), c.weight));
        }
        CompiledNet {
            activations: g.nodes.iter().map(|n| n.activation).collect(),
            incoming,
        }
    }

    fn eval(&self, inputs: [f64; 4], passes: usize, state: &mut Vec<f64>, next: &mut Vec<f64>) -> f64 {
        let k = self.activations.len();
        state.clear();
        state.extend_from_slice(&inputs);
        state.resize(4 + k, 0.0);
        next.clear();
        next.extend_from_slice(state);
        for _ in 0..passes {
            for i in 0..k {
                let sum: f64 = self.incoming[i].iter().map(|&(s, w)| w * state[s]).sum();
                next[4 + i] = self.activations[i].apply(sum);
            }
            std::mem::swap(state, next);
        }
        // nodes are sorted by id so the output (id 0) is slot 4
        state[4]
    }
}

/// Cell coordinate mapped onto `[−2, 2]`, exactly antisymmetric about the center.
fn coordinate(i: usize, size: usize) -> f64 {
    if size < 2 {
        return 0.0;
    }
    let half = (size - 1) as f64 / 2.0;
    4.0 * (i as f64 - half) / (size - 1) as f64
}

/// Renders the initial state: cell `(x, y)` gets `1 − |p|` where `p` is the
/// network output for inputs `(1, x, y, √(x² + y²))` in mapped coordinates.
pub fn render_pattern(genome: &CppnGenome, size: usize, passes: usize) -> Pattern {
    let net = CompiledNet::new(genome);
    let mut state = Vec::new();
    let mut next = Vec::new();
    let coords: Vec<f64> = (0..size).map(|i| coordinate(i, size)).collect();
    let mut cells = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let (cx, cy) = (coords[x], coords[y]);
            let d = (cx * cx + cy * cy).sqrt();
            let p = net.eval([1.0, cx, cy, d], passes, &mut state, &mut next).clamp(-1.0, 1.0);
            cells.push(clip_unit((1.0 - p.abs()) as f32));
        }
    }
    Pattern::from_cells_unchecked(size, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use proptest::prelude::*;

    fn rng(seed: u64) -> crate::rng::Rng {
        stream_rng(seed, Stream::Iteration, 0)
    }

    fn single(src: NodeId, act: Activation, w: f64) -> CppnGenome {
        CppnGenome::new(
            vec![NodeGene { id: OUTPUT, activation: act }],
            vec![ConnectionGene { src, dst: OUTPUT, weight: w, enabled: true }],
        )
        .unwrap()
    }

    #[test]
    fn activation_closed_forms() {
        assert_eq!(gauss(0.0), 1.0);
        assert_eq!(sigm(0.0), 0.0);
        assert!((sigm(50.0) - 1.0).abs() < 1e-12);
        assert!((sigm(-50.0) + 1.0).abs() < 1e-12);
        assert!((gauss(10.0) + 1.0).abs() < 1e-12);
        assert!((gauss(-10.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_seeded() {
        let cfg = MutationConfig::default();
        assert_eq!(sample_genome(&cfg, &mut rng(3)), sample_genome(&cfg, &mut rng(3)));
        assert_ne!(sample_genome(&cfg, &mut rng(3)), sample_genome(&cfg, &mut rng(4)));
    }

    #[test]
    fn sampled_genomes_match_the_configuration() {
        let cfg = MutationConfig::default();
        let mut r = rng(11);
        let (mut present, mut possible) = (0usize, 0usize);
        for _ in 0..1000 {
            let g = sample_genome(&cfg, &mut r);
            g.validate().unwrap();
            assert_eq!(g.hidden_count(), 4);
            assert!(g.connections().iter().all(|c| (-3.0..=3.0).contains(&c.weight)));
            present += g.connections().len();
            possible += g.candidate_pairs().len();
        }
        let density = present as f64 / possible as f64;
        assert!((density - 0.6).abs() < 0.05, "density {density}");
    }

    #[test]
    fn frozen_mutation_is_identity() {
        let cfg = MutationConfig::default();
        let g = sample_genome(&cfg, &mut rng(5));
        let m = mutate_genome(&g, &MutationConfig::frozen(), &mut rng(6));
        assert_eq!(m, g);
    }

    #[test]
    fn node_add_frequency_matches_probability() {
        let cfg = MutationConfig::default();
        let mut r = rng(21);
        let base = sample_genome(&cfg, &mut r);
        let mut adds = 0;
        for _ in 0..1000 {
            let m = mutate_genome(&base, &MutationConfig { node_delete_prob: 0.0, ..cfg.clone() }, &mut r);
            if m.nodes().len() > base.nodes().len() {
                adds += 1;
            }
        }
        let rate = adds as f64 / 1000.0;
        assert!((rate - 0.02).abs() <= 0.01, "node-add rate {rate}");
    }

    #[test]
    fn mutation_never_removes_the_output() {
        let cfg = MutationConfig { node_delete_prob: 1.0, ..MutationConfig::default() };
        let mut r = rng(8);
        let mut g = sample_genome(&cfg, &mut r);
        for _ in 0..20 {
            g = mutate_genome(&g, &cfg, &mut r);
            g.validate().unwrap();
        }
        assert_eq!(g.hidden_count(), 0);
        assert_eq!(g.nodes()[0].id, OUTPUT);
    }

    #[test]
    fn mutation_leaves_the_input_untouched() {
        let cfg = MutationConfig { node_add_prob: 1.0, conn_add_prob: 1.0, ..MutationConfig::default() };
        let mut r = rng(9);
        let g = sample_genome(&cfg, &mut r);
        let before = g.clone();
        let m = mutate_genome(&g, &cfg, &mut r);
        assert_eq!(g, before);
        assert_ne!(m, g);
    }

    #[test]
    fn zero_output_renders_full_activity() {
        // sigm(0) = 0 -> activity 1 everywhere
        let g = single(BIAS, Activation::Sigm, 0.0);
        assert_eq!(render_pattern(&g, 8, 2), Pattern::filled(8, 1.0));
        // gauss(0) = 1 -> activity 0
        let g = single(BIAS, Activation::Gauss, 0.0);
        assert_eq!(render_pattern(&g, 8, 2), Pattern::zeros(8));
    }

    #[test]
    fn distance_only_network_is_radial() {
        let g = single(INPUT_D, Activation::Gauss, 0.7);
        let p = render_pattern(&g, 17, 2);
        assert_eq!(p.get(2, 5), p.get(5, 2));
        assert_eq!(p.get(2, 5), p.get(14, 11));
        assert_eq!(p.get(3, 8), p.get(8, 13));
        // direct evaluation at the center cell: d = 0 -> gauss(0) = 1 -> activity 0
        assert_eq!(p.get(8, 8), 0.0);
        let corner = 1.0 - gauss(0.7 * 8f64.sqrt()).abs();
        assert!((p.get(0, 0) as f64 - corner).abs() < 1e-6);
    }

    #[test]
    fn coordinates_span_minus_two_to_two() {
        assert_eq!(coordinate(0, 9), -2.0);
        assert_eq!(coordinate(8, 9), 2.0);
        assert_eq!(coordinate(4, 9), 0.0);
        for i in 0..10 {
            assert_eq!(coordinate(i, 10), -coordinate(9 - i, 10));
        }
    }

    #[test]
    fn text_record_round_trips() {
        let cfg = MutationConfig::default();
        let g = sample_genome(&cfg, &mut rng(12));
        let text = g.to_text();
        assert_eq!(CppnGenome::from_text(&text).unwrap(), g);
        assert!(CppnGenome::from_text("cppn 1\nnode 0 relu\n").is_err());
        assert!(CppnGenome::from_text("cppn 1\nnode 1 gauss\n").is_err());
        assert!(CppnGenome::from_text("cppn 1\nnode 0 gauss\nconn 5 0 0.1 1\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn renders_stay_in_unit_interval(seed in any::<u64>()) {
            let cfg = MutationConfig::default();
            let mut r = rng(seed);
            let mut g = sample_genome(&cfg, &mut r);
            for _ in 0..5 {
                g = mutate_genome(&g, &cfg, &mut r);
                prop_assert!(g.validate().is_ok());
                prop_assert!(g.connections().iter().all(|c| (-3.0..=3.0).contains(&c.weight)));
            }
            let p = render_pattern(&g, 12, cfg.passes);
            prop_assert!(p.cells().iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert_eq!(&p, &render_pattern(&g, 12, cfg.passes));
            prop_assert_eq!(CppnGenome::from_text(&g.to_text()).unwrap(), g);
        }

        #[test]
        fn networks_without_xy_inputs_are_rotation_invariant(seed in any::<u64>()) {
            let cfg = MutationConfig::default();
            let g = sample_genome(&cfg, &mut rng(seed));
            let conns: Vec<ConnectionGene> = g.connections().iter()
                .filter(|c| c.src != INPUT_X && c.src != INPUT_Y)
                .cloned()
                .collect();
            let g = CppnGenome::new(g.nodes().to_vec(), conns).unwrap();
            for size in [10usize, 13] {
                let p = render_pattern(&g, size, 2);
                prop_assert_eq!(p.rotated_quarter(), p);
            }
        }
    }
}
