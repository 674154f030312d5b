// SPDX-License-Identifier: Apache-2.0

//! Measuring what a kernel costs.
//!
//! [`count_ops`] runs a kernel over the [`Counted`] scalar and tallies every
//! arithmetic operation. [`build_graph`] runs the same kernel code over the
//! [`Traced`] scalar, which records a dataflow netlist of input, constant
//! multiplier, adder and output nodes instead of computing numbers.

mod count;
mod export;
mod graph;

pub use count::{count_ops, count_ops_with, Counted, OpCount, Tally};
pub use export::{export_graph, ExportFormat};
pub use graph::{
    bindings, build_graph, build_graph_with, constant_names, cost_report, evaluate_graph, CostReport, DataflowGraph,
    Depth, GraphBuilder, Node, NodeKind, Operand, Traced,
};
