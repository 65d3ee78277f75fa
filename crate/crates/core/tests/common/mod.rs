//! Independent oracles shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use dynevo::envs::{Action, ActionSpace, EnvInstance, RunningStandardizer, Task};
use dynevo::evolution::{EvolutionConfig, NetMode};
use dynevo::netgraph::{DynamicNet, MutationOutcome, NodeId, NodeKind};
use dynevo::rng::RngStream;
use statrs::distribution::{ChiSquared, ContinuousCDF};


// ---------------------------------------------------------------- random nets

/// A net grown from the minimal one by `mutations` random mutations, with
/// every parameter perturbed along the way so weights and biases are nonzero.
pub fn random_net(seed: u64, d_in: usize, d_out: usize, mutations: usize) -> DynamicNet {
    let mut rng = RngStream::from_seed(seed);
    let mut net = DynamicNet::new_minimal(d_in, d_out).unwrap();
    for _ in 0..mutations {
        net.mutate(&mut rng, 1.0).unwrap();
        net.perturb_parameters(&mut rng, 0.3);
    }
    net
}

// ------------------------------------------------------------ forward oracle

/// Layer-by-layer interpreter reading only the public connection list.
/// Sources in a strictly lower layer come from this pass, everything else
/// from `prev` (missing entries read as 0).
pub fn oracle_forward(
    net: &DynamicNet,
    prev: &BTreeMap<NodeId, f64>,
    inputs: &[f64],
) -> (Vec<f64>, BTreeMap<NodeId, f64>) {
    let layer: BTreeMap<NodeId, usize> = net.nodes().map(|n| (n.id, n.layer)).collect();
    let mut cur: BTreeMap<NodeId, f64> = net
        .input_ids()
        .into_iter()
        .zip(inputs.iter().copied())
        .collect();
    let conns: Vec<_> = net.connections().collect();
    for l in 1..net.layer_count() {
        for node in net.nodes().filter(|n| n.layer == l) {
            let mut sum = node.bias.unwrap();
            for c in conns.iter().filter(|c| c.dst == node.id) {
                let x = if layer[&c.src] < l {
                    cur[&c.src]
                } else {
                    prev.get(&c.src).copied().unwrap_or(0.0)
                };
                sum += c.weight * x;
            }
            cur.insert(node.id, if sum > 0.0 { sum } else { 0.0 });
        }
    }
    let outputs = net.output_ids().iter().map(|id| cur[id]).collect();
    let state = cur
        .into_iter()
        .filter(|(id, _)| net.node(*id).unwrap().kind != NodeKind::Input)
        .collect();
    (outputs, state)
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

// ----------------------------------------------------------- cascade oracle

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub hidden: BTreeSet<NodeId>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
}

impl Skeleton {
    pub fn of(net: &DynamicNet) -> Self {
        Self {
            hidden: net.hidden_ids().into_iter().collect(),
            edges: net.connections().map(|c| (c.src, c.dst)).collect(),
        }
    }

    /// Deletes hidden nodes lacking a non-self input or a non-self output,
    /// recomputing the predicate from scratch every round.
    pub fn fixpoint(mut self) -> (Self, BTreeSet<NodeId>) {
        let mut removed = BTreeSet::new();
        loop {
            let dead: Vec<NodeId> = self
                .hidden
                .iter()
                .copied()
                .filter(|&h| {
                    let fed = self.edges.iter().any(|&(s, d)| d == h && s != h);
                    let feeds = self.edges.iter().any(|&(s, d)| s == h && d != h);
                    !(fed && feeds)
                })
                .collect();
            if dead.is_empty() {
                return (self, removed);
            }
            for h in dead {
                self.hidden.remove(&h);
                self.edges.retain(|&(s, d)| s != h && d != h);
                removed.insert(h);
            }
        }
    }
}

// ---------------------------------------------------------------- chi-square

pub const CHI_SQUARE_P: f64 = 0.001;

/// Pearson statistic and the critical value at [`CHI_SQUARE_P`].
pub fn chi_square(counts: &[u64], probs: &[f64]) -> (f64, f64) {
    let n: u64 = counts.iter().sum();
    let stat = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let critical = ChiSquared::new((counts.len() - 1) as f64)
        .unwrap()
        .inverse_cdf(1.0 - CHI_SQUARE_P);
    (stat, critical)
}

// -------------------------------------------------------- DOT grammar oracle

#[derive(Debug, Default)]
pub struct DotGraph {
    pub name: Option<String>,
    pub nodes: BTreeSet<String>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
    pub subgraphs: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Punct(char),
    Arrow,
    Undirected,
}

const KEYWORDS: [&str; 6] = ["strict", "graph", "digraph", "node", "edge", "subgraph"];

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err("unterminated block comment".into());
            }
            i += 2;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            toks.push(Tok::Arrow);
            i += 2;
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            toks.push(Tok::Undirected);
            i += 2;
        } else if "{}[];,=:".contains(c) {
            toks.push(Tok::Punct(c));
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if chars.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            toks.push(Tok::Id(s));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '.' || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if s.matches('.').count() > 1 || s == "-" || s == "." {
                return Err(format!("bad numeral {s:?}"));
            }
            toks.push(Tok::Id(s));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(toks)
}

struct DotParser {
    toks: Vec<Tok>,
    pos: usize,
    graph: DotGraph,
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }

    fn is_kw(tok: Option<&Tok>, kw: &str) -> bool {
        matches!(tok, Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn punct(&mut self, c: char) -> Result<(), String> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            other => Err(format!(
                "expected {c:?} at token {}, found {other:?}",
                self.pos
            )),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.punct(c).is_ok()
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek().cloned() {
            Some(Tok::Id(s)) if !KEYWORDS.iter().any(|k| s.eq_ignore_ascii_case(k)) => {
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!(
                "expected ID at token {}, found {other:?}",
                self.pos
            )),
        }
    }

    fn graph(mut self) -> Result<DotGraph, String> {
        if Self::is_kw(self.peek(), "strict") {
            self.pos += 1;
        }
        if !Self::is_kw(self.peek(), "digraph") {
            return Err("expected `digraph`".into());
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.graph.name = Some(self.id()?);
        }
        self.punct('{')?;
        self.stmt_list()?;
        self.punct('}')?;
        if self.pos != self.toks.len() {
            return Err(format!("trailing tokens after graph at {}", self.pos));
        }
        Ok(self.graph)
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct('}')) | None) {
            self.stmt()?;
            self.eat(';');
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        let t = self.peek().cloned();
        if ["graph", "node", "edge"]
            .iter()
            .any(|k| Self::is_kw(t.as_ref(), k))
        {
            self.pos += 1;
            self.attr_list()?;
            return Ok(());
        }
        if matches!(self.peek_at(1), Some(Tok::Punct('='))) {
            self.id()?;
            self.punct('=')?;
            self.id()?;
            return Ok(());
        }
        let first = self.operand()?;
        let mut chain = vec![first];
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Arrow => {
                    self.pos += 1;
                    chain.push(self.operand()?);
                }
                Tok::Undirected => return Err("`--` edge in a digraph".into()),
                _ => break,
            }
        }
        let attrs = if matches!(self.peek(), Some(Tok::Punct('['))) {
            self.attr_list()?
        } else {
            BTreeMap::new()
        };
        if chain.len() == 1 {
            if let Some(n) = chain.pop().unwrap() {
                self.graph.nodes.insert(n);
            }
        } else {
            for w in chain.windows(2) {
                match (&w[0], &w[1]) {
                    (Some(a), Some(b)) => {
                        self.graph.edges.push((a.clone(), b.clone(), attrs.clone()))
                    }
                    _ => return Err("edges to subgraphs are not used by this exporter".into()),
                }
            }
        }
        Ok(())
    }

    /// A node id (returned) or a subgraph (None).
    fn operand(&mut self) -> Result<Option<String>, String> {
        if Self::is_kw(self.peek(), "subgraph") || matches!(self.peek(), Some(Tok::Punct('{'))) {
            if Self::is_kw(self.peek(), "subgraph") {
                self.pos += 1;
                if matches!(self.peek(), Some(Tok::Id(_))) {
                    self.id()?;
                }
            }
            self.punct('{')?;
            self.stmt_list()?;
            self.punct('}')?;
            self.graph.subgraphs += 1;
            return Ok(None);
        }
        let id = self.id()?;
        if self.eat(':') {
            self.id()?;
            if self.eat(':') {
                self.id()?;
            }
        }
        Ok(Some(id))
    }

    fn attr_list(&mut self) -> Result<BTreeMap<String, String>, String> {
        let mut attrs = BTreeMap::new();
        self.punct('[')?;
        loop {
            if self.eat(']') {
                break;
            }
            let k = self.id()?;
            self.punct('=')?;
            let v = self.id()?;
            attrs.insert(k, v);
            if !self.eat(';') {
                self.eat(',');
            }
        }
        if matches!(self.peek(), Some(Tok::Punct('['))) {
            attrs.extend(self.attr_list()?);
        }
        Ok(attrs)
    }
}

/// Parses `src` against the DOT grammar (directed graphs only).
pub fn parse_dot(src: &str) -> Result<DotGraph, String> {
    DotParser {
        toks: tokenize(src)?,
        pos: 0,
        graph: DotGraph::default(),
    }
    .graph()
}

// ------------------------------------------------------- golden trajectories

pub const GOLDEN_TOLERANCE: f64 = 1e-6;
pub const GOLDEN_PER_TASK: usize = 3;

pub struct GoldenStep {
    pub action: Vec<f64>,
    pub state: Vec<f64>,
    pub reward: f64,
    pub terminated: bool,
}

pub struct Golden {
    pub init: Vec<f64>,
    pub steps: Vec<GoldenStep>,
}

pub fn golden_path(task: Task, index: usize) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{}_{index}.txt", task.name()))
}

fn floats(s: &str) -> Vec<f64> {
    s.split_whitespace().map(|t| t.parse().unwrap()).collect()
}

pub fn load_golden(task: Task, index: usize) -> Golden {
    let text = std::fs::read_to_string(golden_path(task, index)).unwrap();
    let mut lines = text.lines();
    let init = floats(lines.next().unwrap().strip_prefix("init ").unwrap());
    let arity = match task.spec().action_space {
        ActionSpace::Discrete(_) => 1,
        ActionSpace::Continuous { ref low, .. } => low.len(),
    };
    let steps = lines
        .map(|line| {
            let v = floats(line);
            let n = v.len();
            GoldenStep {
                action: v[..arity].to_vec(),
                state: v[arity..n - 2].to_vec(),
                reward: v[n - 2],
                terminated: v[n - 1] == 1.0,
            }
        })
        .collect();
    Golden { init, steps }
}

/// Replays a golden trajectory; returns (steps, max abs error over state and reward).
pub fn replay_golden(task: Task, index: usize) -> Result<(usize, f64), String> {
    let golden = load_golden(task, index);
    let mut env = EnvInstance::new(task);
    env.set_state(&golden.init).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (t, step) in golden.steps.iter().enumerate() {
        let action = match env.spec().action_space {
            ActionSpace::Discrete(_) => Action::Discrete(step.action[0] as usize),
            ActionSpace::Continuous { .. } => Action::Continuous(step.action.clone()),
        };
        let result = env.step(&action).map_err(|e| format!("step {t}: {e}"))?;
        let state = env.state();
        if state.len() != step.state.len() {
            return Err(format!(
                "step {t}: state has {} components, golden {}",
                state.len(),
                step.state.len()
            ));
        }
        for (a, b) in state.iter().zip(&step.state) {
            worst = worst.max((a - b).abs());
        }
        worst = worst.max((result.reward - step.reward).abs());
        if result.done != step.terminated {
            return Err(format!(
                "step {t}: done={} but golden terminated={}",
                result.done, step.terminated
            ));
        }
        if worst > GOLDEN_TOLERANCE {
            return Err(format!(
                "step {t}: deviation {worst:e} exceeds {GOLDEN_TOLERANCE:e}"
            ));
        }
    }
    Ok((golden.steps.len(), worst))
}

// ------------------------------------------------------------ episode oracle

/// Plain re-implementation of one evaluation episode through the
/// map-based forward pass, with its own action decoding and reward sum.
pub fn oracle_episode(
    net: &DynamicNet,
    task: Task,
    seed: u64,
    mut std: Option<&mut RunningStandardizer>,
) -> f64 {
    let spec = task.spec();
    let mut env = EnvInstance::new(task);
    let mut obs = env.reset(seed);
    let mut state = net.reset_state();
    let mut total = 0.0;
    loop {
        if let Some(s) = std.as_deref_mut() {
            s.update(&obs).unwrap();
            obs = s.apply(&obs).unwrap();
        }
        let out = net.forward(&mut state, &obs).unwrap();
        let action = match spec.action_space {
            ActionSpace::Discrete(_) => {
                let mut best = 0;
                for i in 1..out.len() {
                    if out[i] > out[best] {
                        best = i;
                    }
                }
                Action::Discrete(best)
            }
            ActionSpace::Continuous { ref low, ref high } => Action::Continuous(
                out.iter()
                    .zip(low.iter().zip(high))
                    .map(|(&r, (&lo, &hi))| {
                        let c = if r > 1.0 {
                            1.0
                        } else if r > 0.0 {
                            r
                        } else {
                            0.0
                        };
                        lo + c * (hi - lo)
                    })
                    .collect(),
            ),
        };
        let step = env.step(&action).unwrap();
        total += step.reward;
        obs = step.observation;
        if step.done {
            return total;
        }
    }
}

/// Two-pass population mean and variance per dimension.
pub fn batch_moments(samples: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len() as f64;
    let dim = samples[0].len();
    let mean: Vec<f64> = (0..dim)
        .map(|j| samples.iter().map(|s| s[j]).sum::<f64>() / n)
        .collect();
    let var = (0..dim)
        .map(|j| {
            samples
                .iter()
                .map(|s| (s[j] - mean[j]).powi(2))
                .sum::<f64>()
                / n
        })
        .collect();
    (mean, var)
}

// --------------------------------------------------------- evolution helpers

pub fn small_cfg(
    task: Task,
    mode: NetMode,
    pop: usize,
    gens: u64,
    seed: u64,
    workers: usize,
) -> EvolutionConfig {
    EvolutionConfig {
        population_size: pop,
        generations: gens,
        master_seed: seed,
        workers,
        ..EvolutionConfig::new(task, mode)
    }
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_dynevo"))
}

// ----------------------------------------------------------- walkthrough fixtures

/// Ids of the three-input, two-output scenario walked through by the mutation fixtures.
pub const IN1: NodeId = NodeId(0);
pub const IN2: NodeId = NodeId(1);
pub const IN3: NodeId = NodeId(2);
pub const OUT1: NodeId = NodeId(3);
pub const OUT2: NodeId = NodeId(4);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Applies `op` with the first stream seed whose random choices satisfy `want`.
fn forced<T>(
    net: &DynamicNet,
    op: impl Fn(&mut DynamicNet, &mut RngStream) -> T,
    want: impl Fn(&T) -> bool,
) -> Result<(DynamicNet, T), String> {
    for seed in 0..100_000 {
        let mut candidate = net.clone();
        let out = op(&mut candidate, &mut RngStream::from_seed(seed));
        if want(&out) {
            return Ok((candidate, out));
        }
    }
    Err("no stream produced the requested choices".into())
}

fn edges(net: &DynamicNet) -> BTreeSet<(NodeId, NodeId)> {
    net.connections().map(|c| (c.src, c.dst)).collect()
}

pub fn walk_grow_connection() -> Result<DynamicNet, String> {
    let net = DynamicNet::new_minimal(3, 2).map_err(|e| e.to_string())?;
    ensure(
        net.node_count() == 5 && net.connection_count() == 0,
        "minimal 3x2 net shape",
    )?;
    ensure(net.param_count() == 2, "two biases only")?;
    ensure(
        net.receiving_nodes() == vec![IN1, IN2, IN3],
        "receiving nodes are the inputs",
    )?;
    let (net, out) = forced(
        &net,
        |n, rng| n.grow_connection(rng, 1.0).unwrap(),
        |o| {
            *o == MutationOutcome::GrewConnection {
                src: IN3,
                dst: OUT2,
            }
        },
    )?;
    ensure(
        edges(&net) == BTreeSet::from([(IN3, OUT2)]),
        format!("edge set after {out:?}"),
    )?;
    ensure(net.node_count() == 5, "no nodes added")?;
    Ok(net)
}

pub fn walk_prune_connection() -> Result<DynamicNet, String> {
    let mut net = walk_grow_connection()?;
    for (s, d) in [(IN1, OUT1), (IN1, OUT2), (OUT1, OUT2)] {
        net.add_connection(s, d, 0.5).map_err(|e| e.to_string())?;
    }
    let emitting: Vec<NodeId> = net.emitting_list().into_iter().map(|(s, _)| s).collect();
    ensure(
        emitting == vec![IN1, IN1, IN3, OUT1],
        format!("emitting list {emitting:?}"),
    )?;
    ensure(
        net.receiving_nodes() == vec![IN1, IN2, IN3, OUT1, OUT2],
        "inputs plus both outputs receive",
    )?;
    let (net, _) = forced(
        &net,
        |n, rng| n.prune_connection(rng).unwrap(),
        |o| {
            matches!(
                o,
                MutationOutcome::PrunedConnection {
                    src: IN1,
                    dst: OUT2,
                    ..
                }
            )
        },
    )?;
    ensure(
        edges(&net) == BTreeSet::from([(IN1, OUT1), (IN3, OUT2), (OUT1, OUT2)]),
        "in1 -> out2 deleted",
    )?;
    Ok(net)
}

pub fn walk_grow_node() -> Result<(DynamicNet, NodeId), String> {
    let net = walk_prune_connection()?;
    let (net, out) = forced(
        &net,
        |n, rng| n.grow_node(rng, 1.0).unwrap(),
        |o| {
            matches!(
                o,
                MutationOutcome::GrewNode {
                    first: IN2,
                    second: OUT2,
                    third: OUT1,
                    ..
                }
            )
        },
    )?;
    let MutationOutcome::GrewNode { node: h, .. } = out else {
        unreachable!()
    };
    ensure(net.hidden_ids() == vec![h], "one hidden node")?;
    ensure(
        edges(&net)
            == BTreeSet::from([
                (IN1, OUT1),
                (IN3, OUT2),
                (OUT1, OUT2),
                (IN2, h),
                (OUT2, h),
                (h, OUT1),
            ]),
        "three connections grown around the hidden node",
    )?;
    let hl = net.node(h).unwrap().layer;
    ensure(
        hl > 0 && hl < net.output_layer(),
        "hidden node between input and output layers",
    )?;
    ensure(net.is_recurrent(OUT2, h), "out2 -> h is recurrent")?;
    ensure(
        !net.is_recurrent(IN2, h) && !net.is_recurrent(h, OUT1),
        "other two are forward",
    )?;
    ensure(
        net.param_count() == 9,
        format!("param count {}", net.param_count()),
    )?;
    net.audit().map_err(|e| e.to_string())?;
    Ok((net, h))
}

pub fn walk_prune_node() -> Result<(), String> {
    let (mut net, h1) = walk_grow_node()?;
    let h2 = net
        .insert_hidden_node(IN1, IN3, h1, 0.1, [0.5; 3])
        .map_err(|e| e.to_string())?;
    for (s, d) in [(IN3, h2), (IN2, h1), (OUT2, h1)] {
        let gone = net.remove_connection(s, d).map_err(|e| e.to_string())?;
        ensure(gone.is_empty(), "setup edits do not cascade")?;
    }
    ensure(net.hidden_ids() == vec![h1, h2], "two hidden nodes")?;
    ensure(
        net.node(h2).unwrap().in_nodes.len() + net.node(h2).unwrap().out_nodes.len() == 2,
        "hidden node 2 has two connections",
    )?;
    ensure(
        net.node(h1).unwrap().in_nodes == vec![h2],
        "hidden node 1 fed only by hidden node 2",
    )?;
    net.audit().map_err(|e| e.to_string())?;

    let (net, out) = forced(
        &net,
        |n, rng| n.prune_node(rng).unwrap(),
        |o| matches!(o, MutationOutcome::PrunedNode { node, .. } if *node == h2),
    )?;
    let MutationOutcome::PrunedNode { cascaded, .. } = out else {
        unreachable!()
    };
    ensure(
        cascaded == vec![h1],
        format!("cascade removed {cascaded:?}"),
    )?;
    ensure(net.hidden_count() == 0, "no hidden nodes left")?;
    ensure(
        edges(&net) == BTreeSet::from([(IN1, OUT1), (IN3, OUT2), (OUT1, OUT2)]),
        "only the input/output connections remain",
    )?;
    ensure(net.layer_count() == 2, "empty hidden layers closed")?;
    net.audit().map_err(|e| e.to_string())?;

    // the same cleanup run directly on the post-prune state removes exactly one node
    let (mut pre, _) = walk_grow_node()?;
    let h2 = pre.insert_hidden_node(IN1, IN3, h1, 0.1, [0.5; 3]).unwrap();
    for (s, d) in [(IN3, h2), (IN2, h1), (OUT2, h1)] {
        pre.remove_connection(s, d).unwrap();
    }
    let before = Skeleton::of(&pre);
    let mut after_prune = before.clone();
    after_prune.hidden.remove(&h2);
    after_prune.edges.retain(|&(s, d)| s != h2 && d != h2);
    let (_, removed) = after_prune.fixpoint();
    ensure(
        removed.len() == 1 && removed.contains(&h1),
        "oracle cascade count is 1",
    )?;
    Ok(())
}

pub fn walkthrough_fixtures() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("grow connection", walk_grow_connection().map(drop)),
        ("prune connection", walk_prune_connection().map(drop)),
        ("grow node", walk_grow_node().map(drop)),
        ("prune node with cascade", walk_prune_node()),
    ]
}
