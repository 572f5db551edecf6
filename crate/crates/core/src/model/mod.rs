//! Closed-loop system description: dynamics expressions, ReLU controllers,
//! their on-disk formats and the built-in benchmarks.

mod expr;
pub mod fixtures;
mod network;
mod parse;
mod system;

pub use expr::{Expr, Node, NodeId, Primitive};
pub use network::{parse_network, Activation, Layer, NeuralNet};
pub use parse::{parse_expr, ParseError};
pub use system::{load_system, parse_system, SystemFile, SystemSpec};
