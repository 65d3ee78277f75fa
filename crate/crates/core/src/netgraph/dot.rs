use std::fmt::Write;

use super::{DynamicNet, NodeKind};

impl DynamicNet {
    /// Graphviz rendering: one `rank=same` cluster per layer, recurrent edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph dynamic_net {\n");
        out.push_str("  rankdir=LR;\n");
        out.push_str("  node [shape=circle, fontsize=10];\n");
        for layer in 0..self.layer_count {
            let _ = writeln!(out, "  subgraph layer_{layer} {{");
            out.push_str("    rank=same;\n");
            for n in self.nodes.values().filter(|n| n.layer == layer) {
                let (prefix, color) = match n.kind {
                    NodeKind::Input => ("in", "lightblue"),
                    NodeKind::Hidden => ("h", "lightgray"),
                    NodeKind::Output => ("out", "lightsalmon"),
                };
                let _ = writeln!(
                    out,
                    "    n{} [label=\"{prefix}{}\", style=filled, fillcolor={color}];",
                    n.id.0, n.id.0
                );
            }
            out.push_str("  }\n");
        }
        for c in self.connections() {
            let style = if self.is_recurrent(c.src, c.dst) {
                ", style=dashed"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{:.3}\"{style}];",
                c.src.0, c.dst.0, c.weight
            );
        }
        out.push_str("}\n");
        out
    }
}
