use super::{DynamicNet, NodeId};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// How many `(first, second)` pairs grow_connection draws before giving up
/// on finding an unconnected one.
pub const GROW_CONNECTION_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationKind {
    GrowConnection,
    PruneConnection,
    GrowNode,
    PruneNode,
}

impl MutationKind {
    pub const ALL: [MutationKind; 4] = [
        MutationKind::GrowConnection,
        MutationKind::PruneConnection,
        MutationKind::GrowNode,
        MutationKind::PruneNode,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub enum MutationOutcome {
    GrewConnection {
        src: NodeId,
        dst: NodeId,
    },
    /// Every sampled pair was already connected.
    ConnectionSaturated {
        attempts: usize,
    },
    PrunedConnection {
        src: NodeId,
        dst: NodeId,
        cascaded: Vec<NodeId>,
    },
    GrewNode {
        node: NodeId,
        first: NodeId,
        second: NodeId,
        third: NodeId,
    },
    PrunedNode {
        node: NodeId,
        cascaded: Vec<NodeId>,
    },
}

impl MutationOutcome {
    pub fn kind(&self) -> MutationKind {
        match self {
            Self::GrewConnection { .. } | Self::ConnectionSaturated { .. } => {
                MutationKind::GrowConnection
            }
            Self::PrunedConnection { .. } => MutationKind::PruneConnection,
            Self::GrewNode { .. } => MutationKind::GrowNode,
            Self::PrunedNode { .. } => MutationKind::PruneNode,
        }
    }
}

impl DynamicNet {
    pub fn is_applicable(&self, kind: MutationKind) -> bool {
        match kind {
            MutationKind::GrowConnection => true,
            MutationKind::PruneConnection => self.connection_count() > 0,
            MutationKind::GrowNode => self.receiving_nodes().len() >= 2,
            MutationKind::PruneNode => self.hidden_count() > 0,
        }
    }

    pub fn applicable_mutations(&self) -> Vec<MutationKind> {
        MutationKind::ALL
            .into_iter()
            .filter(|&k| self.is_applicable(k))
            .collect()
    }

    /// Picks one applicable mutation uniformly and applies it. New weights and
    /// biases are drawn from N(0, init_sigma^2).
    pub fn mutate(&mut self, rng: &mut RngStream, init_sigma: f64) -> Result<MutationOutcome> {
        self.ensure_mutable()?;
        let kinds = self.applicable_mutations();
        match *rng.choose(&kinds) {
            MutationKind::GrowConnection => self.grow_connection(rng, init_sigma),
            MutationKind::PruneConnection => self.prune_connection(rng),
            MutationKind::GrowNode => self.grow_node(rng, init_sigma),
            MutationKind::PruneNode => self.prune_node(rng),
        }
    }

    /// First node from the receiving nodes, second from hidden + output
    /// nodes; connects them unless already connected, resampling up to
    /// [`GROW_CONNECTION_ATTEMPTS`] times.
    pub fn grow_connection(
        &mut self,
        rng: &mut RngStream,
        init_sigma: f64,
    ) -> Result<MutationOutcome> {
        self.ensure_mutable()?;
        let receiving = self.receiving_nodes();
        let targets = self.non_input_ids();
        for _ in 0..GROW_CONNECTION_ATTEMPTS {
            let src = *rng.choose(&receiving);
            let dst = *rng.choose(&targets);
            if !self.has_connection(src, dst) {
                let weight = init_sigma * rng.normal();
                self.add_connection(src, dst, weight)?;
                return Ok(MutationOutcome::GrewConnection { src, dst });
            }
        }
        Ok(MutationOutcome::ConnectionSaturated {
            attempts: GROW_CONNECTION_ATTEMPTS,
        })
    }

    /// First node from the emitting list, second from that node's out-nodes;
    /// deletes the connection and cascades.
    pub fn prune_connection(&mut self, rng: &mut RngStream) -> Result<MutationOutcome> {
        self.ensure_mutable()?;
        let emitting = self.emitting_list();
        if emitting.is_empty() {
            return Err(Error::NotApplicable(MutationKind::PruneConnection));
        }
        let (src, _) = *rng.choose(&emitting);
        let dst = *rng.choose(&self.nodes[&src].out_nodes);
        let cascaded = self.remove_connection(src, dst)?;
        Ok(MutationOutcome::PrunedConnection { src, dst, cascaded })
    }

    /// Samples two distinct receiving nodes and one hidden/output node, then
    /// inserts a hidden node between them.
    pub fn grow_node(&mut self, rng: &mut RngStream, init_sigma: f64) -> Result<MutationOutcome> {
        self.ensure_mutable()?;
        let mut receiving = self.receiving_nodes();
        if receiving.len() < 2 {
            return Err(Error::NotApplicable(MutationKind::GrowNode));
        }
        let first = receiving.remove(rng.index(receiving.len()));
        let second = *rng.choose(&receiving);
        let third = *rng.choose(&self.non_input_ids());
        let bias = init_sigma * rng.normal();
        let weights = [
            init_sigma * rng.normal(),
            init_sigma * rng.normal(),
            init_sigma * rng.normal(),
        ];
        let node = self.insert_hidden_node(first, second, third, bias, weights)?;
        Ok(MutationOutcome::GrewNode {
            node,
            first,
            second,
            third,
        })
    }

    pub fn prune_node(&mut self, rng: &mut RngStream) -> Result<MutationOutcome> {
        self.ensure_mutable()?;
        let hidden = self.hidden_ids();
        if hidden.is_empty() {
            return Err(Error::NotApplicable(MutationKind::PruneNode));
        }
        let node = *rng.choose(&hidden);
        let cascaded = self.remove_hidden_node(node)?;
        Ok(MutationOutcome::PrunedNode { node, cascaded })
    }

    /// Adds an independent N(0, sigma^2) draw to every weight and bias.
    /// Returns the number of draws, which equals [`Self::param_count`].
    pub fn perturb_parameters(&mut self, rng: &mut RngStream, sigma: f64) -> usize {
        let mut draws = 0;
        self.for_each_param_mut(|p| {
            *p += sigma * rng.normal();
            draws += 1;
        });
        draws
    }
}
