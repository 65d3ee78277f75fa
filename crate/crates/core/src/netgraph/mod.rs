//! Dynamic recurrent networks stored as directed layered graphs.
//!
//! Layer 0 holds the input nodes and the last layer holds the output nodes;
//! hidden nodes live strictly in between. A connection whose source sits in a
//! lower layer than its destination is consumed within the same forward pass;
//! any other connection (same layer, backward, self-loop) carries the source's
//! value from the previous pass.
//!
//! Structure only ever changes through the four mutations in [`mutation`] or
//! through the explicit edit methods they are built on, all of which keep the
//! graph audit-clean (see [`DynamicNet::audit`]).

mod dot;
mod forward;
mod mutation;
mod serialize;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use forward::{ActivationState, ForwardPlan, PassState};
pub use mutation::{MutationKind, MutationOutcome, GROW_CONNECTION_ATTEMPTS};
pub use serialize::{GENOME_FORMAT_VERSION, GENOME_MAGIC};

/// Width of each hidden layer in the static baseline.
pub const STATIC_HIDDEN_WIDTH: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub layer: usize,
    /// `None` for input nodes.
    pub bias: Option<f64>,
    /// Sorted ascending, no duplicates.
    pub in_nodes: Vec<NodeId>,
    /// Sorted ascending, no duplicates.
    pub out_nodes: Vec<NodeId>,
}

impl Node {
    fn new(id: NodeId, kind: NodeKind, layer: usize, bias: f64) -> Self {
        Self {
            id,
            kind,
            layer,
            bias: (kind != NodeKind::Input).then_some(bias),
            in_nodes: Vec::new(),
            out_nodes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicNet {
    nodes: BTreeMap<NodeId, Node>,
    connections: BTreeMap<(NodeId, NodeId), f64>,
    layer_count: usize,
    d_input: usize,
    d_output: usize,
    frozen: bool,
    next_id: u32,
}

fn insert_sorted(list: &mut Vec<NodeId>, id: NodeId) {
    if let Err(pos) = list.binary_search(&id) {
        list.insert(pos, id);
    }
}

fn remove_sorted(list: &mut Vec<NodeId>, id: NodeId) {
    if let Ok(pos) = list.binary_search(&id) {
        list.remove(pos);
    }
}

impl DynamicNet {
    /// Input and output layers only, no connections, output biases at zero.
    pub fn new_minimal(d_input: usize, d_output: usize) -> Result<Self> {
        if d_input == 0 || d_output == 0 {
            return Err(Error::InvalidDimensions { d_input, d_output });
        }
        let mut net = Self {
            nodes: BTreeMap::new(),
            connections: BTreeMap::new(),
            layer_count: 2,
            d_input,
            d_output,
            frozen: false,
            next_id: 0,
        };
        for _ in 0..d_input {
            net.push_node(NodeKind::Input, 0, 0.0);
        }
        for _ in 0..d_output {
            net.push_node(NodeKind::Output, 1, 0.0);
        }
        Ok(net)
    }

    /// Frozen `[d_input, 50, 50, d_output]` network with every parameter at zero.
    ///
    /// Connectivity: input -> h1, h1 -> h2, h2 -> output fully connected, plus
    /// all-to-all recurrence (self-loops included) inside h1 and inside h2.
    pub fn build_static(d_input: usize, d_output: usize) -> Result<Self> {
        let mut net = Self::new_minimal(d_input, d_output)?;
        net.shift_layers_from(1);
        net.shift_layers_from(1);
        let inputs = net.input_ids();
        let outputs = net.output_ids();
        let h1: Vec<NodeId> = (0..STATIC_HIDDEN_WIDTH)
            .map(|_| net.push_node(NodeKind::Hidden, 1, 0.0))
            .collect();
        let h2: Vec<NodeId> = (0..STATIC_HIDDEN_WIDTH)
            .map(|_| net.push_node(NodeKind::Hidden, 2, 0.0))
            .collect();
        let blocks: [(&[NodeId], &[NodeId]); 5] = [
            (&inputs, &h1),
            (&h1, &h1),
            (&h1, &h2),
            (&h2, &h2),
            (&h2, &outputs),
        ];
        for (srcs, dsts) in blocks {
            for &s in srcs {
                for &d in dsts {
                    net.link(s, d, 0.0);
                }
            }
        }
        net.frozen = true;
        Ok(net)
    }

    pub fn d_input(&self) -> usize {
        self.d_input
    }

    pub fn d_output(&self) -> usize {
        self.d_output
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn output_layer(&self) -> usize {
        self.layer_count - 1
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    /// Nodes in ascending id order (which is creation order).
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    /// Connections in ascending `(src, dst)` order.
    pub fn connections(&self) -> impl Iterator<Item = Connection> + '_ {
        self.connections
            .iter()
            .map(|(&(src, dst), &weight)| Connection { src, dst, weight })
    }

    pub fn weight(&self, src: NodeId, dst: NodeId) -> Option<f64> {
        self.connections.get(&(src, dst)).copied()
    }

    pub fn has_connection(&self, src: NodeId, dst: NodeId) -> bool {
        self.connections.contains_key(&(src, dst))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn connection_count(&self) -> usize {
        self.connections.len()
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes_of(NodeKind::Hidden).count()
    }

    fn nodes_of(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.values().filter(move |n| n.kind == kind)
    }

    pub fn input_ids(&self) -> Vec<NodeId> {
        self.nodes_of(NodeKind::Input).map(|n| n.id).collect()
    }

    pub fn output_ids(&self) -> Vec<NodeId> {
        self.nodes_of(NodeKind::Output).map(|n| n.id).collect()
    }

    pub fn hidden_ids(&self) -> Vec<NodeId> {
        self.nodes_of(NodeKind::Hidden).map(|n| n.id).collect()
    }

    /// Hidden and output nodes, ascending id.
    pub fn non_input_ids(&self) -> Vec<NodeId> {
        self.nodes
            .values()
            .filter(|n| n.kind != NodeKind::Input)
            .map(|n| n.id)
            .collect()
    }

    /// All input nodes plus every hidden/output node that has in-nodes,
    /// ascending id.
    pub fn receiving_nodes(&self) -> Vec<NodeId> {
        self.nodes
            .values()
            .filter(|n| n.kind == NodeKind::Input || !n.in_nodes.is_empty())
            .map(|n| n.id)
            .collect()
    }

    /// One `(src, dst)` entry per connection, grouped by source: a node
    /// appears once per out-node it has.
    pub fn emitting_list(&self) -> Vec<(NodeId, NodeId)> {
        self.connections.keys().copied().collect()
    }

    /// One weight per connection plus one bias per non-input node.
    pub fn param_count(&self) -> usize {
        self.connections.len() + self.nodes.len() - self.d_input
    }

    /// True when the connection is consumed from the previous pass.
    pub fn is_recurrent(&self, src: NodeId, dst: NodeId) -> bool {
        match (self.nodes.get(&src), self.nodes.get(&dst)) {
            (Some(s), Some(d)) => s.layer >= d.layer,
            _ => false,
        }
    }

    /// Number of nodes sitting in each layer.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.layer_count];
        for n in self.nodes.values() {
            sizes[n.layer] += 1;
        }
        sizes
    }

    pub fn set_bias(&mut self, id: NodeId, bias: f64) -> Result<()> {
        let node = self.nodes.get_mut(&id).ok_or(Error::UnknownNode(id))?;
        match node.bias.as_mut() {
            Some(b) => {
                *b = bias;
                Ok(())
            }
            None => Err(Error::Inconsistent(format!(
                "{id} is an input node and has no bias"
            ))),
        }
    }

    pub fn set_weight(&mut self, src: NodeId, dst: NodeId, weight: f64) -> Result<()> {
        match self.connections.get_mut(&(src, dst)) {
            Some(w) => {
                *w = weight;
                Ok(())
            }
            None => Err(Error::InvalidConnection {
                src,
                dst,
                reason: "no such connection",
            }),
        }
    }

    /// Visits every parameter in a fixed order: biases by ascending node id,
    /// then weights by ascending `(src, dst)`.
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for node in self.nodes.values_mut() {
            if let Some(b) = node.bias.as_mut() {
                f(b);
            }
        }
        for w in self.connections.values_mut() {
            f(w);
        }
    }

    /// Parameters in the same order as [`Self::for_each_param_mut`].
    pub fn params(&self) -> Vec<f64> {
        self.nodes
            .values()
            .filter_map(|n| n.bias)
            .chain(self.connections.values().copied())
            .collect()
    }

    /// Creates the connection `src -> dst`. Returns `false` if it already
    /// exists (the existing weight is left untouched).
    pub fn add_connection(&mut self, src: NodeId, dst: NodeId, weight: f64) -> Result<bool> {
        self.ensure_mutable()?;
        self.check_connectable(src, dst)?;
        if self.has_connection(src, dst) {
            return Ok(false);
        }
        self.link(src, dst, weight);
        Ok(true)
    }

    /// Deletes `src -> dst`, then runs [`Self::cascade_cleanup`]. Returns the
    /// hidden nodes removed by the cascade.
    pub fn remove_connection(&mut self, src: NodeId, dst: NodeId) -> Result<Vec<NodeId>> {
        self.ensure_mutable()?;
        if !self.unlink(src, dst) {
            return Err(Error::InvalidConnection {
                src,
                dst,
                reason: "no such connection",
            });
        }
        Ok(self.cascade_removed())
    }

    /// Inserts a hidden node fed by `first` and `second` and feeding `third`.
    ///
    /// Placement: with `lf` the layer of `first` and `lo` the layer of `third`,
    /// the node goes one layer from `lf` towards `lo`. If that layer is the
    /// input or output layer, or is `lo` itself, a fresh layer is opened
    /// between `first` and `third` instead.
    pub fn insert_hidden_node(
        &mut self,
        first: NodeId,
        second: NodeId,
        third: NodeId,
        bias: f64,
        weights: [f64; 3],
    ) -> Result<NodeId> {
        self.ensure_mutable()?;
        if first == second {
            return Err(Error::InvalidConnection {
                src: first,
                dst: second,
                reason: "the two in-nodes of a new hidden node must differ",
            });
        }
        for id in [first, second] {
            let node = self.nodes.get(&id).ok_or(Error::UnknownNode(id))?;
            if node.kind != NodeKind::Input && node.in_nodes.is_empty() {
                return Err(Error::InvalidConnection {
                    src: id,
                    dst: third,
                    reason: "in-nodes of a new hidden node must be receiving nodes",
                });
            }
        }
        let third_node = self.nodes.get(&third).ok_or(Error::UnknownNode(third))?;
        if third_node.kind == NodeKind::Input {
            return Err(Error::InvalidConnection {
                src: first,
                dst: third,
                reason: "input nodes cannot receive connections",
            });
        }

        let lf = self.nodes[&first].layer;
        let lo = third_node.layer;
        let layer = if lo > lf {
            let target = lf + 1;
            if target == self.output_layer() || target == lo {
                self.shift_layers_from(target);
            }
            target
        } else if lf >= 2 && lf - 1 != lo {
            lf - 1
        } else {
            self.shift_layers_from(lf);
            lf
        };

        let id = self.push_node(NodeKind::Hidden, layer, bias);
        for (src, dst, w) in [
            (first, id, weights[0]),
            (second, id, weights[1]),
            (id, third, weights[2]),
        ] {
            if !self.has_connection(src, dst) {
                self.link(src, dst, w);
            }
        }
        Ok(id)
    }

    /// Deletes a hidden node with all its connections, then runs
    /// [`Self::cascade_cleanup`]. Returns the additional nodes the cascade removed.
    pub fn remove_hidden_node(&mut self, id: NodeId) -> Result<Vec<NodeId>> {
        self.ensure_mutable()?;
        match self.nodes.get(&id) {
            None => return Err(Error::UnknownNode(id)),
            Some(n) if n.kind != NodeKind::Hidden => return Err(Error::NotHidden(id)),
            Some(_) => {}
        }
        self.drop_node(id);
        Ok(self.cascade_removed())
    }

    /// Removes hidden nodes lacking in-connections or out-connections until
    /// none remain, then closes any hidden layer left empty. Returns the
    /// number of nodes removed.
    pub fn cascade_cleanup(&mut self) -> usize {
        self.cascade_removed().len()
    }

    fn cascade_removed(&mut self) -> Vec<NodeId> {
        let mut removed = Vec::new();
        let mut pending: Vec<NodeId> = self.hidden_ids();
        while let Some(id) = pending.pop() {
            let Some(node) = self.nodes.get(&id) else {
                continue;
            };
            if node.kind != NodeKind::Hidden {
                continue;
            }
            // A self-loop alone neither feeds nor is fed by the rest of the graph.
            let fed = node.in_nodes.iter().any(|&s| s != id);
            let feeds = node.out_nodes.iter().any(|&d| d != id);
            if fed && feeds {
                continue;
            }
            let neighbours: Vec<NodeId> = node
                .in_nodes
                .iter()
                .chain(node.out_nodes.iter())
                .copied()
                .filter(|&n| n != id)
                .collect();
            self.drop_node(id);
            removed.push(id);
            pending.extend(neighbours);
        }
        self.compact_layers();
        removed.sort();
        removed
    }

    /// Checks every structural invariant. Used by tests and after decoding.
    pub fn audit(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Inconsistent(msg));
        if self.layer_count < 2 {
            return fail(format!("layer_count {} < 2", self.layer_count));
        }
        let out_layer = self.output_layer();
        let mut inputs = 0;
        let mut outputs = 0;
        let mut sizes = vec![0usize; self.layer_count];
        for (&id, n) in &self.nodes {
            if id != n.id {
                return fail(format!("node keyed {id} carries id {}", n.id));
            }
            if id.0 >= self.next_id {
                return fail(format!("{id} not below id counter {}", self.next_id));
            }
            if n.layer >= self.layer_count {
                return fail(format!("{id} in layer {} >= layer_count", n.layer));
            }
            sizes[n.layer] += 1;
            match n.kind {
                NodeKind::Input => {
                    inputs += 1;
                    if n.layer != 0 || n.bias.is_some() || !n.in_nodes.is_empty() {
                        return fail(format!("input {id} malformed"));
                    }
                }
                NodeKind::Output => {
                    outputs += 1;
                    if n.layer != out_layer || n.bias.is_none() {
                        return fail(format!("output {id} malformed"));
                    }
                }
                NodeKind::Hidden => {
                    if n.layer == 0 || n.layer == out_layer || n.bias.is_none() {
                        return fail(format!("hidden {id} malformed"));
                    }
                    if n.in_nodes.iter().all(|&s| s == id) || n.out_nodes.iter().all(|&d| d == id) {
                        return fail(format!("hidden {id} lacks an input or output connection"));
                    }
                }
            }
            for list in [&n.in_nodes, &n.out_nodes] {
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return fail(format!("{id} adjacency list unsorted or duplicated"));
                }
            }
            for &s in &n.in_nodes {
                if !self.connections.contains_key(&(s, id)) {
                    return fail(format!("{id}.in_nodes lists {s} without a connection"));
                }
            }
            for &d in &n.out_nodes {
                if !self.connections.contains_key(&(id, d)) {
                    return fail(format!("{id}.out_nodes lists {d} without a connection"));
                }
            }
        }
        if inputs != self.d_input || outputs != self.d_output {
            return fail(format!(
                "expected {}/{} inputs/outputs, found {inputs}/{outputs}",
                self.d_input, self.d_output
            ));
        }
        if let Some(layer) = (1..out_layer).find(|&l| sizes[l] == 0) {
            return fail(format!("hidden layer {layer} is empty"));
        }
        let degree_sum: usize = self.nodes.values().map(|n| n.in_nodes.len()).sum();
        let out_degree_sum: usize = self.nodes.values().map(|n| n.out_nodes.len()).sum();
        if degree_sum != self.connections.len() || out_degree_sum != self.connections.len() {
            return fail("adjacency lists and connection set disagree in size".into());
        }
        for &(s, d) in self.connections.keys() {
            match (self.nodes.get(&s), self.nodes.get(&d)) {
                (Some(_), Some(dn)) if dn.kind == NodeKind::Input => {
                    return fail(format!("connection {s} -> {d} targets an input"));
                }
                (Some(_), Some(_)) => {}
                _ => return fail(format!("connection {s} -> {d} references a missing node")),
            }
        }
        Ok(())
    }

    fn ensure_mutable(&self) -> Result<()> {
        if self.frozen {
            Err(Error::Frozen)
        } else {
            Ok(())
        }
    }

    fn check_connectable(&self, src: NodeId, dst: NodeId) -> Result<()> {
        self.nodes.get(&src).ok_or(Error::UnknownNode(src))?;
        let d = self.nodes.get(&dst).ok_or(Error::UnknownNode(dst))?;
        if d.kind == NodeKind::Input {
            return Err(Error::InvalidConnection {
                src,
                dst,
                reason: "input nodes cannot receive connections",
            });
        }
        Ok(())
    }

    fn push_node(&mut self, kind: NodeKind, layer: usize, bias: f64) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.nodes.insert(id, Node::new(id, kind, layer, bias));
        id
    }

    fn link(&mut self, src: NodeId, dst: NodeId, weight: f64) {
        self.connections.insert((src, dst), weight);
        insert_sorted(&mut self.nodes.get_mut(&src).unwrap().out_nodes, dst);
        insert_sorted(&mut self.nodes.get_mut(&dst).unwrap().in_nodes, src);
    }

    fn unlink(&mut self, src: NodeId, dst: NodeId) -> bool {
        if self.connections.remove(&(src, dst)).is_none() {
            return false;
        }
        if let Some(s) = self.nodes.get_mut(&src) {
            remove_sorted(&mut s.out_nodes, dst);
        }
        if let Some(d) = self.nodes.get_mut(&dst) {
            remove_sorted(&mut d.in_nodes, src);
        }
        true
    }

    fn drop_node(&mut self, id: NodeId) {
        let Some(node) = self.nodes.get(&id) else {
            return;
        };
        let ins = node.in_nodes.clone();
        let outs = node.out_nodes.clone();
        for s in ins {
            self.unlink(s, id);
        }
        for d in outs {
            self.unlink(id, d);
        }
        self.nodes.remove(&id);
    }

    /// Opens an empty layer at index `at`, moving every node at `at` or above up one.
    fn shift_layers_from(&mut self, at: usize) {
        for n in self.nodes.values_mut() {
            if n.layer >= at {
                n.layer += 1;
            }
        }
        self.layer_count += 1;
    }

    fn compact_layers(&mut self) {
        let sizes = self.layer_sizes();
        let mut remap = vec![0; self.layer_count];
        let mut next = 0;
        for (layer, &size) in sizes.iter().enumerate() {
            remap[layer] = next;
            let keep = layer == 0 || layer == self.layer_count - 1 || size > 0;
            if keep {
                next += 1;
            }
        }
        if next == self.layer_count {
            return;
        }
        for n in self.nodes.values_mut() {
            n.layer = remap[n.layer];
        }
        self.layer_count = next;
    }
}
