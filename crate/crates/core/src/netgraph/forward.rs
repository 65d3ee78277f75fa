use std::collections::BTreeMap;

use super::{DynamicNet, NodeId, NodeKind};
use crate::error::{Error, Result};

/// Each non-input node's activation from the previous forward pass.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PassState {
    pub prev_output: BTreeMap<NodeId, f64>,
}

impl PassState {
    pub fn get(&self, id: NodeId) -> Option<f64> {
        self.prev_output.get(&id).copied()
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    src: usize,
    weight: f64,
    recurrent: bool,
}

#[derive(Debug, Clone, Copy)]
struct Step {
    slot: usize,
    bias: f64,
    edges: (usize, usize),
}

/// A network flattened into dense arrays for repeated forward passes.
///
/// Slots are assigned in ascending node id; evaluation runs in ascending
/// `(layer, id)` order, so every forward source is computed before it is read.
#[derive(Debug, Clone)]
pub struct ForwardPlan {
    ids: Vec<NodeId>,
    input_slots: Vec<usize>,
    output_slots: Vec<usize>,
    steps: Vec<Step>,
    edges: Vec<Edge>,
}

/// Dense activation buffers for a [`ForwardPlan`].
#[derive(Debug, Clone)]
pub struct ActivationState {
    current: Vec<f64>,
    previous: Vec<f64>,
}

impl ActivationState {
    pub fn reset(&mut self) {
        self.current.fill(0.0);
        self.previous.fill(0.0);
    }
}

impl ForwardPlan {
    pub fn new(net: &DynamicNet) -> Self {
        let ids: Vec<NodeId> = net.nodes.keys().copied().collect();
        let slot_of = |id: NodeId| ids.binary_search(&id).expect("node present");

        let mut order: Vec<(usize, NodeId)> = net
            .nodes
            .values()
            .filter(|n| n.kind != NodeKind::Input)
            .map(|n| (n.layer, n.id))
            .collect();
        order.sort_unstable();

        let mut steps = Vec::with_capacity(order.len());
        let mut edges = Vec::with_capacity(net.connection_count());
        for &(layer, id) in &order {
            let node = &net.nodes[&id];
            let start = edges.len();
            for &src in &node.in_nodes {
                edges.push(Edge {
                    src: slot_of(src),
                    weight: net.connections[&(src, id)],
                    recurrent: net.nodes[&src].layer >= layer,
                });
            }
            steps.push(Step {
                slot: slot_of(id),
                bias: node.bias.unwrap_or(0.0),
                edges: (start, edges.len()),
            });
        }

        Self {
            input_slots: net.input_ids().into_iter().map(slot_of).collect(),
            output_slots: net.output_ids().into_iter().map(slot_of).collect(),
            ids,
            steps,
            edges,
        }
    }

    pub fn d_input(&self) -> usize {
        self.input_slots.len()
    }

    pub fn d_output(&self) -> usize {
        self.output_slots.len()
    }

    pub fn new_state(&self) -> ActivationState {
        ActivationState {
            current: vec![0.0; self.ids.len()],
            previous: vec![0.0; self.ids.len()],
        }
    }

    /// One pass; writes output activations (node creation order) into `out`.
    pub fn forward_into(&self, state: &mut ActivationState, inputs: &[f64], out: &mut [f64]) {
        debug_assert_eq!(inputs.len(), self.input_slots.len());
        debug_assert_eq!(out.len(), self.output_slots.len());
        std::mem::swap(&mut state.current, &mut state.previous);
        let (cur, prev) = (&mut state.current, &state.previous);
        for (&slot, &x) in self.input_slots.iter().zip(inputs) {
            cur[slot] = x;
        }
        for step in &self.steps {
            let mut acc = step.bias;
            for e in &self.edges[step.edges.0..step.edges.1] {
                let v = if e.recurrent { prev[e.src] } else { cur[e.src] };
                acc += e.weight * v;
            }
            cur[step.slot] = acc.max(0.0);
        }
        for (o, &slot) in out.iter_mut().zip(&self.output_slots) {
            *o = cur[slot];
        }
    }

    fn load(&self, state: &PassState) -> ActivationState {
        let mut s = self.new_state();
        for (slot, id) in self.ids.iter().enumerate() {
            s.current[slot] = state.get(*id).unwrap_or(0.0);
        }
        s
    }

    fn store(&self, s: &ActivationState, state: &mut PassState) {
        state.prev_output = self
            .steps
            .iter()
            .map(|step| (self.ids[step.slot], s.current[step.slot]))
            .collect();
    }
}

impl DynamicNet {
    /// All-zero state covering every non-input node.
    pub fn reset_state(&self) -> PassState {
        PassState {
            prev_output: self
                .non_input_ids()
                .into_iter()
                .map(|id| (id, 0.0))
                .collect(),
        }
    }

    /// One forward pass. Each non-input node computes
    /// `max(0, bias + sum(weight * source))`, reading forward sources from the
    /// current pass and recurrent sources from `state`. `state` is updated in
    /// place and entries for nodes no longer in the network are dropped.
    pub fn forward(&self, state: &mut PassState, inputs: &[f64]) -> Result<Vec<f64>> {
        if inputs.len() != self.d_input {
            return Err(Error::DimensionMismatch {
                expected: self.d_input,
                actual: inputs.len(),
            });
        }
        let plan = ForwardPlan::new(self);
        let mut dense = plan.load(state);
        let mut out = vec![0.0; self.d_output];
        plan.forward_into(&mut dense, inputs, &mut out);
        plan.store(&dense, state);
        Ok(out)
    }
}
