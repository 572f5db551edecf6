//! Expression DAGs for next-state update equations.

use std::fmt;

use crate::error::{Error, Result};

/// Smooth one-dimensional primitives available to dynamics expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primitive {
    Sin,
    Cos,
    Tanh,
    Exp,
}

impl Primitive {
    pub const ALL: [Primitive; 4] = [Self::Sin, Self::Cos, Self::Tanh, Self::Exp];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tanh => "tanh",
            Self::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Self::Sin => x.sin(),
            Self::Cos => x.cos(),
            Self::Tanh => x.tanh(),
            Self::Exp => x.exp(),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Sin => x.cos(),
            Self::Cos => -x.sin(),
            Self::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Self::Exp => x.exp(),
        }
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Const(f64),
    State(usize),
    Control(usize),
    Sum(NodeId, NodeId),
    Difference(NodeId, NodeId),
    Product(NodeId, NodeId),
    Unary(Primitive, NodeId),
    Scale(f64, NodeId),
}

/// Arena-backed expression. Children always precede their parents, so the
/// arena is acyclic by construction and the last node is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    nodes: Vec<Node>,
}

impl Expr {
    /// Builds an expression from a raw arena, checking topological order.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidSystem("empty expression".into()));
        }
        for (id, node) in nodes.iter().enumerate() {
            let ok = match *node {
                Node::Sum(a, b) | Node::Difference(a, b) | Node::Product(a, b) => a < id && b < id,
                Node::Unary(_, a) | Node::Scale(_, a) => a < id,
                Node::Const(c) => c.is_finite(),
                Node::State(_) | Node::Control(_) => true,
            };
            if !ok {
                return Err(Error::InvalidSystem(format!(
                    "node {id} references a later node or holds a non-finite constant"
                )));
            }
        }
        Ok(Self { nodes })
    }

    pub fn constant(c: f64) -> Self {
        Self { nodes: vec![Node::Const(c)] }
    }

    pub fn state(i: usize) -> Self {
        Self { nodes: vec![Node::State(i)] }
    }

    pub fn control(j: usize) -> Self {
        Self { nodes: vec![Node::Control(j)] }
    }

    pub fn sum(a: &Self, b: &Self) -> Self {
        Self::binary(a, b, Node::Sum)
    }

    pub fn difference(a: &Self, b: &Self) -> Self {
        Self::binary(a, b, Node::Difference)
    }

    pub fn product(a: &Self, b: &Self) -> Self {
        Self::binary(a, b, Node::Product)
    }

    pub fn unary(p: Primitive, a: &Self) -> Self {
        let mut nodes = a.nodes.clone();
        nodes.push(Node::Unary(p, a.root()));
        Self { nodes }
    }

    pub fn scale(c: f64, a: &Self) -> Self {
        let mut nodes = a.nodes.clone();
        nodes.push(Node::Scale(c, a.root()));
        Self { nodes }
    }

    fn binary(a: &Self, b: &Self, make: fn(NodeId, NodeId) -> Node) -> Self {
        let offset = a.nodes.len();
        let mut nodes = a.nodes.clone();
        nodes.extend(b.nodes.iter().map(|n| shift(*n, offset)));
        nodes.push(make(a.root(), b.root() + offset));
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    /// Largest state index used plus one (0 if none).
    pub fn state_arity(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::State(i) => Some(i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn control_arity(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Control(j) => Some(j + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Point evaluation. Callers check dimensions; out-of-range indices panic.
    pub fn eval(&self, x: &[f64], u: &[f64]) -> f64 {
        let mut vals = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Const(c) => c,
                Node::State(i) => x[i],
                Node::Control(j) => u[j],
                Node::Sum(a, b) => vals[a] + vals[b],
                Node::Difference(a, b) => vals[a] - vals[b],
                Node::Product(a, b) => vals[a] * vals[b],
                Node::Unary(p, a) => p.apply(vals[a]),
                Node::Scale(c, a) => c * vals[a],
            };
            vals.push(v);
        }
        vals[self.root()]
    }

    fn fmt_node(&self, id: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.nodes[id] {
            Node::Const(c) => write!(f, "{c:?}"),
            Node::State(i) => write!(f, "x{i}"),
            Node::Control(j) => write!(f, "u{j}"),
            Node::Sum(a, b) => self.fmt_infix(a, "+", b, f),
            Node::Difference(a, b) => self.fmt_infix(a, "-", b, f),
            Node::Product(a, b) => self.fmt_infix(a, "*", b, f),
            Node::Scale(c, a) => {
                write!(f, "({c:?} * ")?;
                self.fmt_node(a, f)?;
                f.write_str(")")
            }
            Node::Unary(p, a) => {
                write!(f, "{}(", p.name())?;
                self.fmt_node(a, f)?;
                f.write_str(")")
            }
        }
    }

    fn fmt_infix(&self, a: NodeId, op: &str, b: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        self.fmt_node(a, f)?;
        write!(f, " {op} ")?;
        self.fmt_node(b, f)?;
        f.write_str(")")
    }
}

fn shift(node: Node, by: usize) -> Node {
    match node {
        Node::Sum(a, b) => Node::Sum(a + by, b + by),
        Node::Difference(a, b) => Node::Difference(a + by, b + by),
        Node::Product(a, b) => Node::Product(a + by, b + by),
        Node::Unary(p, a) => Node::Unary(p, a + by),
        Node::Scale(c, a) => Node::Scale(c, a + by),
        leaf => leaf,
    }
}

/// Fully parenthesized infix form accepted by [`crate::model::parse_expr`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_node(self.root(), f)
    }
}
