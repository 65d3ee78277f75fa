//! Versioned binary genome format. All integers little-endian.
//!
//! ```text
//! magic        6 bytes   "DYNEVO"
//! version      u32       GENOME_FORMAT_VERSION
//! d_input      u32
//! d_output     u32
//! layer_count  u32
//! frozen       u8        0 or 1
//! next_id      u32       id counter
//! node_count   u32
//!   id u32 | kind u8 (0 input, 1 hidden, 2 output) | layer u32 | bias f64 (0 for inputs)
//! conn_count   u32
//!   src u32 | dst u32 | weight f64
//! ```
//!
//! Floats are stored as raw IEEE-754 bits. Adjacency lists are rebuilt from
//! the connection list and the decoded network must pass a full audit.

use std::collections::BTreeMap;

use super::{DynamicNet, Node, NodeId, NodeKind};
use crate::codec::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

pub const GENOME_MAGIC: &[u8; 6] = b"DYNEVO";
pub const GENOME_FORMAT_VERSION: u32 = 1;

fn kind_code(kind: NodeKind) -> u8 {
    match kind {
        NodeKind::Input => 0,
        NodeKind::Hidden => 1,
        NodeKind::Output => 2,
    }
}

fn to_u32(n: usize) -> u32 {
    u32::try_from(n).expect("value exceeds u32")
}

impl DynamicNet {
    pub fn serialize(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        self.encode(&mut w);
        w.into_bytes()
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        let net = Self::decode(&mut r)?;
        r.finish()?;
        Ok(net)
    }

    pub(crate) fn encode(&self, w: &mut ByteWriter) {
        w.raw(GENOME_MAGIC);
        w.u32(GENOME_FORMAT_VERSION);
        w.u32(to_u32(self.d_input));
        w.u32(to_u32(self.d_output));
        w.u32(to_u32(self.layer_count));
        w.u8(self.frozen as u8);
        w.u32(self.next_id);
        w.len_prefixed(self.nodes.len());
        for n in self.nodes.values() {
            w.u32(n.id.0);
            w.u8(kind_code(n.kind));
            w.u32(to_u32(n.layer));
            w.f64(n.bias.unwrap_or(0.0));
        }
        w.len_prefixed(self.connections.len());
        for (&(s, d), &weight) in &self.connections {
            w.u32(s.0);
            w.u32(d.0);
            w.f64(weight);
        }
    }

    pub(crate) fn decode(r: &mut ByteReader<'_>) -> Result<Self> {
        r.expect_magic(GENOME_MAGIC)?;
        let version = r.u32()?;
        if version != GENOME_FORMAT_VERSION {
            return Err(Error::Decode(format!(
                "genome format version {version} is not supported (expected {GENOME_FORMAT_VERSION})"
            )));
        }
        let d_input = r.u32()? as usize;
        let d_output = r.u32()? as usize;
        let layer_count = r.u32()? as usize;
        let frozen = match r.u8()? {
            0 => false,
            1 => true,
            other => return Err(Error::Decode(format!("invalid frozen flag {other}"))),
        };
        let next_id = r.u32()?;

        let node_count = r.len_prefixed(17)?;
        let mut nodes = BTreeMap::new();
        for _ in 0..node_count {
            let id = NodeId(r.u32()?);
            let kind = match r.u8()? {
                0 => NodeKind::Input,
                1 => NodeKind::Hidden,
                2 => NodeKind::Output,
                other => return Err(Error::Decode(format!("invalid node kind {other} for {id}"))),
            };
            let layer = r.u32()? as usize;
            let bias = r.f64()?;
            if nodes.insert(id, Node::new(id, kind, layer, bias)).is_some() {
                return Err(Error::Decode(format!("duplicate node {id}")));
            }
        }

        let mut net = DynamicNet {
            nodes,
            connections: BTreeMap::new(),
            layer_count,
            d_input,
            d_output,
            frozen,
            next_id,
        };
        let conn_count = r.len_prefixed(16)?;
        for _ in 0..conn_count {
            let src = NodeId(r.u32()?);
            let dst = NodeId(r.u32()?);
            let weight = r.f64()?;
            if !net.nodes.contains_key(&src) || !net.nodes.contains_key(&dst) {
                return Err(Error::Decode(format!(
                    "connection {src} -> {dst} references a missing node"
                )));
            }
            if net.has_connection(src, dst) {
                return Err(Error::Decode(format!(
                    "duplicate connection {src} -> {dst}"
                )));
            }
            net.link(src, dst, weight);
        }
        net.audit().map_err(|e| Error::Decode(e.to_string()))?;
        Ok(net)
    }
}
