// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Sign;

use super::graph::{DataflowGraph, NodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Serializes a netlist. Output depends only on the graph.
pub fn export_graph(g: &DataflowGraph, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Json => {
            let mut s = serde_json::to_string_pretty(g)?;
            s.push('\n');
            Ok(s)
        }
        ExportFormat::Dot => Ok(to_dot(g)),
    }
}

// Left-to-right diagram: circles multiply by the inscribed constant, points
// are adders, dashed edges carry a sign change.
fn to_dot(g: &DataflowGraph) -> String {
    let name = if g.name.is_empty() { "kernel" } else { g.name.as_str() };
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{name}\" {{");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  edge [arrowhead=none];\n");
    let (mut next_in, mut next_out) = (0, 0);
    for node in &g.nodes {
        let attrs = match node.kind {
            NodeKind::Input => {
                next_in += 1;
                format!("label=\"q{}\", shape=plaintext", next_in - 1)
            }
            NodeKind::ConstMult => {
                format!("label=\"{}\", shape=circle", node.constant.as_deref().unwrap_or("?"))
            }
            NodeKind::Add => "label=\"\", shape=point, width=0.1".to_string(),
            NodeKind::Output => {
                next_out += 1;
                format!("label=\"y{}\", shape=plaintext", next_out - 1)
            }
        };
        let _ = writeln!(out, "  n{} [{attrs}];", node.id);
    }
    for node in &g.nodes {
        for op in &node.inputs {
            let style = match op.sign {
                Sign::Plus => "",
                Sign::Minus => " [style=dashed]",
            };
            let _ = writeln!(out, "  n{} -> n{}{style};", op.id, node.id);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::build_graph;
    use crate::kernels::KernelId;

    #[test]
    fn sq_json_has_twenty_nodes_and_round_trips() {
        let g = build_graph(KernelId::Sq).unwrap();
        let text = export_graph(&g, ExportFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 20);
        assert_eq!(v["outputs"].as_array().unwrap().len(), 4);
        assert_eq!(v["nodes"][4]["kind"], "add");
        assert_eq!(v["nodes"][6]["kind"], "const-mult");
        assert_eq!(v["nodes"][6]["const"], "alpha");
        assert!(v["nodes"][0].get("const").is_none());

        let mut back = DataflowGraph::from_json(&text).unwrap();
        back.name = g.name.clone();
        assert_eq!(back, g);
    }

    #[test]
    fn exports_are_deterministic() {
        for k in KernelId::ALL {
            for f in [ExportFormat::Json, ExportFormat::Dot] {
                let a = export_graph(&build_graph(k).unwrap(), f).unwrap();
                let b = export_graph(&build_graph(k).unwrap(), f).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn dot_is_well_formed() {
        let g = build_graph(KernelId::Sqt).unwrap();
        let dot = export_graph(&g, ExportFormat::Dot).unwrap();
        assert!(dot.starts_with("digraph \"sqt\" {"));
        assert!(dot.trim_end().ends_with('}'));
        assert_eq!(dot.matches('{').count(), dot.matches('}').count());
        let edges = g.nodes.iter().map(|n| n.inputs.len()).sum::<usize>();
        assert_eq!(dot.matches(" -> ").count(), edges);
        assert!(dot.contains("style=dashed"));
    }

    #[test]
    fn unknown_format() {
        assert!(matches!("svg".parse::<ExportFormat>(), Err(Error::UnknownFormat(_))));
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(DataflowGraph::from_json("{\"nodes\": [], \"outputs\": []}").is_err());
        assert!(DataflowGraph::from_json("not json").is_err());
    }
}
