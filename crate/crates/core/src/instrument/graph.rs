// SPDX-License-Identifier: Apache-2.0

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    apply_factored, left_mul, precompute_left, precompute_right, precompute_two_sided, right_mul, two_sided_mul,
    two_sided_mul_shared, KernelId, LeftPlan, RightPlan, SqtPreAdd, TwoSidedPlan,
};
use crate::quaternion::{embed_i, mul_direct, IQuaternion, JQuaternion, Quaternion};
use crate::scalar::{Scalar, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Input,
    ConstMult,
    Add,
    Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operand {
    pub id: usize,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    pub inputs: Vec<Operand>,
}

/// Netlist of a kernel. Node ids are dense and in topological order; the
/// first four nodes are the inputs `q0..q3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataflowGraph {
    #[serde(skip)]
    pub name: String,
    pub nodes: Vec<Node>,
    pub outputs: Vec<usize>,
}

impl DataflowGraph {
    /// Checks the structural invariants; operands must precede their reader.
    pub fn validate(&self) -> Result<()> {
        let malformed = |msg: String| Err(Error::MalformedGraph(msg));
        for (idx, node) in self.nodes.iter().enumerate() {
            if node.id != idx {
                return malformed(format!("node at position {idx} has id {}", node.id));
            }
            for op in &node.inputs {
                if op.id >= idx {
                    return Err(Error::Cycle { node: idx, operand: op.id });
                }
                if self.nodes[op.id].kind == NodeKind::Output {
                    return malformed(format!("node {idx} reads output node {}", op.id));
                }
            }
            let arity_ok = match node.kind {
                NodeKind::Input => node.inputs.is_empty(),
                NodeKind::ConstMult | NodeKind::Output => node.inputs.len() == 1,
                NodeKind::Add => node.inputs.len() >= 2,
            };
            if !arity_ok {
                return malformed(format!("node {idx} ({:?}) has {} inputs", node.kind, node.inputs.len()));
            }
            if (node.kind == NodeKind::ConstMult) != node.constant.is_some() {
                return malformed(format!("node {idx}: constants belong to const-mult nodes only"));
            }
        }
        let inputs = self.nodes.iter().filter(|n| n.kind == NodeKind::Input).count();
        if inputs != 4 {
            return malformed(format!("{inputs} input nodes, expected 4"));
        }
        if self.outputs.len() != 4 {
            return malformed(format!("{} outputs, expected 4", self.outputs.len()));
        }
        for &o in &self.outputs {
            if self.nodes.get(o).map(|n| n.kind) != Some(NodeKind::Output) {
                return malformed(format!("output {o} is not an output node"));
            }
        }
        Ok(())
    }

    /// Parses and validates a netlist in the JSON interchange format.
    pub fn from_json(text: &str) -> Result<Self> {
        let g: DataflowGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
}

impl GraphBuilder {
    fn push(&mut self, kind: NodeKind, constant: Option<String>, inputs: Vec<Operand>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { id, kind, constant, inputs });
        id
    }
}

/// Scalar that records a netlist while a kernel runs.
///
/// Wires carry a sign so that negation never creates a node; the sign is
/// absorbed by whichever adder, multiplier or output consumes the wire.
/// Any operation a fixed-structure datapath cannot realize (a product of two
/// wires, arithmetic on constants) yields [`Traced::Invalid`].
#[derive(Clone, Debug)]
pub enum Traced {
    Literal(f64),
    Const(Rc<str>),
    Wire { id: usize, sign: Sign, graph: Rc<RefCell<GraphBuilder>> },
    Invalid(Rc<str>),
}

impl Traced {
    fn invalid(why: &str) -> Traced {
        Traced::Invalid(why.into())
    }
}

impl Scalar for Traced {
    fn zero() -> Self {
        Traced::Literal(0.0)
    }

    fn add(&self, rhs: &Self) -> Self {
        Self::sum(&[(Sign::Plus, self), (Sign::Plus, rhs)])
    }

    fn sub(&self, rhs: &Self) -> Self {
        Self::sum(&[(Sign::Plus, self), (Sign::Minus, rhs)])
    }

    fn neg(&self) -> Self {
        match self {
            Traced::Literal(v) => Traced::Literal(-v),
            Traced::Wire { id, sign, graph } => Traced::Wire { id: *id, sign: sign.flip(), graph: graph.clone() },
            Traced::Const(_) => Traced::invalid("negated constant"),
            Traced::Invalid(why) => Traced::Invalid(why.clone()),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let (name, wire) = match (self, rhs) {
            (Traced::Invalid(why), _) | (_, Traced::Invalid(why)) => return Traced::Invalid(why.clone()),
            (Traced::Const(name), w @ Traced::Wire { .. }) | (w @ Traced::Wire { .. }, Traced::Const(name)) => {
                (name, w)
            }
            (Traced::Wire { .. }, Traced::Wire { .. }) => return Traced::invalid("product of two wires"),
            _ => return Traced::invalid("multiplication without a wire and a named constant"),
        };
        let Traced::Wire { id, sign, graph } = wire else { unreachable!() };
        let node = graph.borrow_mut().push(
            NodeKind::ConstMult,
            Some(name.to_string()),
            vec![Operand { id: *id, sign: *sign }],
        );
        Traced::Wire { id: node, sign: Sign::Plus, graph: graph.clone() }
    }

    /// One adder node of fan-in `terms.len()`; a single term is a wire.
    fn sum(terms: &[(Sign, &Self)]) -> Self {
        let mut operands = Vec::with_capacity(terms.len());
        let mut graph = None;
        for (sign, term) in terms {
            match term {
                Traced::Wire { id, sign: wire_sign, graph: g } => {
                    operands.push(Operand { id: *id, sign: sign.combine(*wire_sign) });
                    graph.get_or_insert_with(|| g.clone());
                }
                Traced::Invalid(why) => return Traced::Invalid(why.clone()),
                _ => return Traced::invalid("constant term inside an adder"),
            }
        }
        let Some(graph) = graph else {
            return Traced::Literal(0.0);
        };
        if let [only] = operands[..] {
            return Traced::Wire { id: only.id, sign: only.sign, graph };
        }
        let id = graph.borrow_mut().push(NodeKind::Add, None, operands);
        Traced::Wire { id, sign: Sign::Plus, graph }
    }
}

const LEFT_NAMES: [&str; 3] = ["alpha", "d1", "d2"];
const RIGHT_NAMES: [&str; 3] = ["gamma", "e1", "e2"];

/// Names of the constants a kernel's multipliers read, in plan order.
pub fn constant_names(kernel: KernelId) -> Vec<String> {
    match kernel {
        KernelId::Direct => (0..4).map(|k| format!("p{k}")).collect(),
        KernelId::Sq => LEFT_NAMES.iter().map(|s| s.to_string()).collect(),
        KernelId::Qt => RIGHT_NAMES.iter().map(|s| s.to_string()).collect(),
        KernelId::Sqt => (0..9).map(|slot| format!("{}*{}", LEFT_NAMES[slot % 3], RIGHT_NAMES[slot / 3])).collect(),
    }
}

/// Values of [`constant_names`] for concrete `s` and `t`, computed through the plans.
pub fn bindings<T: Scalar>(kernel: KernelId, s: &IQuaternion<T>, t: &JQuaternion<T>) -> BTreeMap<String, T> {
    let values: Vec<T> = match kernel {
        KernelId::Direct => embed_i(s).into_array().to_vec(),
        KernelId::Sq => {
            let p = precompute_left(s);
            vec![p.alpha().clone(), p.d1().clone(), p.d2().clone()]
        }
        KernelId::Qt => {
            let p = precompute_right(t);
            vec![p.gamma().clone(), p.e1().clone(), p.e2().clone()]
        }
        KernelId::Sqt => precompute_two_sided(s, t).constants().to_vec(),
    };
    constant_names(kernel).into_iter().zip(values).collect()
}

pub fn build_graph(kernel: KernelId) -> Result<DataflowGraph> {
    build_graph_with(kernel, SqtPreAdd::Budget)
}

/// Traces the kernel's own evaluation code into a netlist.
pub fn build_graph_with(kernel: KernelId, pre: SqtPreAdd) -> Result<DataflowGraph> {
    trace(kernel, pre, false)
}

/// With `factored`, the one- and two-sided kernels are traced through
/// `apply_factored` on their factor matrices instead of the runtime code.
fn trace(kernel: KernelId, pre: SqtPreAdd, factored: bool) -> Result<DataflowGraph> {
    let graph = Rc::new(RefCell::new(GraphBuilder::default()));
    let inputs: [Traced; 4] = std::array::from_fn(|_| {
        let id = graph.borrow_mut().push(NodeKind::Input, None, vec![]);
        Traced::Wire { id, sign: Sign::Plus, graph: graph.clone() }
    });
    let q = Quaternion::from_array(inputs);
    let consts: Vec<Traced> = constant_names(kernel).into_iter().map(|n| Traced::Const(n.into())).collect();
    let c = |k: usize| consts[k].clone();

    let y = match kernel {
        KernelId::Direct => mul_direct(&Quaternion::new(c(0), c(1), c(2), c(3)), &q),
        KernelId::Sq => {
            let plan = LeftPlan::from_constants(c(0), c(1), c(2));
            if factored {
                apply_factored(&plan.factors(), &q)
            } else {
                left_mul(&plan, &q)
            }
        }
        KernelId::Qt => {
            let plan = RightPlan::from_constants(c(0), c(1), c(2));
            if factored {
                apply_factored(&plan.factors(), &q)
            } else {
                right_mul(&q, &plan)
            }
        }
        KernelId::Sqt => {
            let plan = TwoSidedPlan::from_constants(std::array::from_fn(c));
            match (factored, pre) {
                (true, _) => apply_factored(&plan.factors(pre), &q),
                (false, SqtPreAdd::Budget) => two_sided_mul(&plan, &q),
                (false, SqtPreAdd::Shared) => two_sided_mul_shared(&plan, &q),
            }
        }
    };

    let mut outputs = Vec::with_capacity(4);
    for (k, value) in y.into_array().into_iter().enumerate() {
        let operand = match value {
            Traced::Wire { id, sign, .. } => Operand { id, sign },
            Traced::Invalid(why) => return Err(Error::Trace(format!("output {k}: {why}"))),
            other => return Err(Error::Trace(format!("output {k} is not driven by a wire: {other:?}"))),
        };
        outputs.push(graph.borrow_mut().push(NodeKind::Output, None, vec![operand]));
    }
    drop(q);
    drop(consts);
    let nodes = std::mem::take(&mut graph.borrow_mut().nodes);
    let name = match (kernel, pre) {
        (KernelId::Sqt, SqtPreAdd::Shared) => "sqt_shared".to_string(),
        _ => kernel.name().to_string(),
    };
    let g = DataflowGraph { name, nodes, outputs };
    g.validate()?;
    Ok(g)
}

/// Evaluates a netlist node by node.
pub fn evaluate_graph<T: Scalar>(
    g: &DataflowGraph,
    inputs: &Quaternion<T>,
    bindings: &BTreeMap<String, T>,
) -> Result<Quaternion<T>> {
    let inputs = inputs.components();
    let mut values: Vec<T> = Vec::with_capacity(g.nodes.len());
    let mut next_input = 0;
    for (idx, node) in g.nodes.iter().enumerate() {
        let mut signed = Vec::with_capacity(node.inputs.len());
        for op in &node.inputs {
            let v = values.get(op.id).ok_or(Error::Cycle { node: idx, operand: op.id })?;
            signed.push((op.sign, v));
        }
        let value = match node.kind {
            NodeKind::Input => {
                let v = inputs.get(next_input).ok_or_else(|| Error::MalformedGraph("more than 4 inputs".into()))?;
                next_input += 1;
                (*v).clone()
            }
            NodeKind::ConstMult => {
                let name = node.constant.as_deref().unwrap_or_default();
                let c = bindings.get(name).ok_or_else(|| Error::UnboundConstant(name.to_string()))?;
                let x = T::sum(&signed);
                c.mul(&x)
            }
            NodeKind::Add | NodeKind::Output => T::sum(&signed),
        };
        values.push(value);
    }
    let out = |k: usize| -> Result<T> {
        let id = *g.outputs.get(k).ok_or_else(|| Error::MalformedGraph("fewer than 4 outputs".into()))?;
        values.get(id).cloned().ok_or_else(|| Error::MalformedGraph(format!("output {id} out of range")))
    };
    Ok(Quaternion::new(out(0)?, out(1)?, out(2)?, out(3)?))
}

/// Levels along the critical path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Depth {
    pub mult_levels: usize,
    pub add_levels: usize,
}

impl Depth {
    fn total(self) -> usize {
        self.mult_levels + self.add_levels
    }

    fn deeper(self, other: Depth) -> Depth {
        if (other.total(), other.mult_levels) > (self.total(), self.mult_levels) {
            other
        } else {
            self
        }
    }
}

/// Hardware resources of a netlist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub multipliers: usize,
    /// Adder count keyed by fan-in.
    pub adders: BTreeMap<usize, usize>,
    /// Sum over adders of `fan_in - 1`.
    pub two_input_equivalent: usize,
    pub depth: Depth,
}

pub fn cost_report(g: &DataflowGraph) -> CostReport {
    let mut adders = BTreeMap::new();
    let mut depth = vec![Depth::default(); g.nodes.len()];
    for node in &g.nodes {
        let deepest = node.inputs.iter().map(|op| depth[op.id]).fold(Depth::default(), Depth::deeper);
        depth[node.id] = match node.kind {
            NodeKind::Input => Depth::default(),
            NodeKind::ConstMult => Depth { mult_levels: deepest.mult_levels + 1, ..deepest },
            NodeKind::Add => {
                *adders.entry(node.inputs.len()).or_insert(0) += 1;
                Depth { add_levels: deepest.add_levels + 1, ..deepest }
            }
            NodeKind::Output => deepest,
        };
    }
    CostReport {
        multipliers: g.count(NodeKind::ConstMult),
        two_input_equivalent: adders.iter().map(|(fan_in, n)| (fan_in - 1) * n).sum(),
        adders,
        depth: g.outputs.iter().map(|&o| depth[o]).fold(Depth::default(), Depth::deeper),
    }
}
