use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::network::{parse_network, NeuralNet};
use super::parse::{parse_expr, ParseError};
use crate::error::{Error, Result};
use crate::geometry::Hyperrect;

/// Closed loop `x' = f(x, c(x))`: one update expression per state coordinate
/// plus the ReLU controller (absent when `control_dim == 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    name: String,
    state_dim: usize,
    control_dim: usize,
    update: Vec<Expr>,
    controller: Option<NeuralNet>,
}

impl SystemSpec {
    pub fn new(
        name: impl Into<String>,
        state_dim: usize,
        control_dim: usize,
        update: Vec<Expr>,
        controller: Option<NeuralNet>,
    ) -> Result<Self> {
        if state_dim == 0 {
            return Err(Error::InvalidSystem("state_dim must be at least 1".into()));
        }
        if update.len() != state_dim {
            return Err(ParseError::Dimension(format!(
                "{} update expressions for state_dim {state_dim}",
                update.len()
            ))
            .into());
        }
        for (k, e) in update.iter().enumerate() {
            if e.state_arity() > state_dim || e.control_arity() > control_dim {
                return Err(ParseError::Dimension(format!(
                    "update {k} uses variables outside state_dim {state_dim} / control_dim {control_dim}"
                ))
                .into());
            }
        }
        match (&controller, control_dim) {
            (None, 0) => {}
            (None, m) => {
                return Err(ParseError::MissingController(format!(
                    "control_dim is {m} but no controller was given"
                ))
                .into())
            }
            (Some(net), m) => {
                if net.input_dim() != state_dim || net.output_dim() != m {
                    return Err(ParseError::Dimension(format!(
                        "controller maps R^{} -> R^{}, system needs R^{state_dim} -> R^{m}",
                        net.input_dim(),
                        net.output_dim()
                    ))
                    .into());
                }
            }
        }
        Ok(Self {
            name: name.into(),
            state_dim,
            control_dim,
            update,
            controller,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn control_dim(&self) -> usize {
        self.control_dim
    }

    pub fn update(&self) -> &[Expr] {
        &self.update
    }

    pub fn controller(&self) -> Option<&NeuralNet> {
        self.controller.as_ref()
    }

    pub fn eval_dynamics(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.state_dim, x.len())?;
        check_len(self.control_dim, u.len())?;
        self.update
            .iter()
            .enumerate()
            .map(|(coordinate, e)| {
                let v = e.eval(x, u);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { coordinate })
                }
            })
            .collect()
    }

    pub fn eval_controller(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.controller {
            Some(net) => net.eval(x),
            None => {
                check_len(self.state_dim, x.len())?;
                Ok(Vec::new())
            }
        }
    }

    pub fn closed_loop_step(&self, x: &[f64]) -> Result<Vec<f64>> {
        let u = self.eval_controller(x)?;
        self.eval_dynamics(x, &u)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn default_horizon() -> usize {
    10
}

#[derive(Debug, Serialize, Deserialize)]
struct SystemDocument {
    name: String,
    state_dim: usize,
    control_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    controller: Option<String>,
    update: Vec<String>,
    initial_set: Hyperrect,
    #[serde(default = "default_horizon")]
    horizon: usize,
}

/// A parsed system document: the closed loop plus its initial box and
/// default horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemFile {
    pub system: SystemSpec,
    pub initial_set: Hyperrect,
    pub horizon: usize,
}

impl SystemFile {
    /// Serializes back to the system document format, referencing the
    /// controller by `controller_path`.
    pub fn to_document(&self, controller_path: Option<&str>) -> String {
        let doc = SystemDocument {
            name: self.system.name.clone(),
            state_dim: self.system.state_dim,
            control_dim: self.system.control_dim,
            controller: controller_path.map(str::to_string),
            update: self.system.update.iter().map(Expr::to_string).collect(),
            initial_set: self.initial_set.clone(),
            horizon: self.horizon,
        };
        serde_json::to_string_pretty(&doc).expect("system document serializes")
    }
}

/// Parses a system document; `load_controller` resolves the `controller`
/// path to a network.
pub fn parse_system(text: &str, load_controller: impl FnOnce(&str) -> Result<NeuralNet>) -> Result<SystemFile> {
    let doc: SystemDocument = serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))?;
    let update = doc
        .update
        .iter()
        .map(|s| parse_expr(s, doc.state_dim, doc.control_dim))
        .collect::<Result<Vec<_>, _>>()?;
    let controller = match (&doc.controller, doc.control_dim) {
        (Some(path), _) => Some(load_controller(path)?),
        (None, 0) => None,
        (None, _) => {
            return Err(ParseError::MissingController("document has no `controller` path".into()).into())
        }
    };
    let system = SystemSpec::new(doc.name, doc.state_dim, doc.control_dim, update, controller)?;
    if doc.initial_set.dim() != doc.state_dim {
        return Err(ParseError::Dimension(format!(
            "initial_set has {} axes, state_dim is {}",
            doc.initial_set.dim(),
            doc.state_dim
        ))
        .into());
    }
    if doc.horizon == 0 {
        return Err(Error::InvalidSystem("horizon must be at least 1".into()));
    }
    Ok(SystemFile {
        system,
        initial_set: doc.initial_set,
        horizon: doc.horizon,
    })
}

/// Reads a system file, resolving the controller path relative to it.
pub fn load_system(path: &Path) -> Result<SystemFile> {
    let text = fs::read_to_string(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_system(&text, |rel| {
        let p = base.join(rel);
        let net_text = fs::read_to_string(&p)
            .map_err(|e| ParseError::MissingController(format!("{}: {e}", p.display())))?;
        parse_network(&net_text)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::network::{Activation, Layer};

    fn no_controller(_: &str) -> Result<NeuralNet> {
        panic!("controller should not be loaded")
    }

    #[test]
    fn minimal_identity_document() {
        let doc = r#"{"name": "id", "state_dim": 1, "control_dim": 0, "update": ["x0"],
                      "initial_set": {"lo": [0.0], "hi": [1.0]}}"#;
        let f = parse_system(doc, no_controller).unwrap();
        assert_eq!(f.system.state_dim(), 1);
        assert_eq!(f.system.control_dim(), 0);
        assert_eq!(f.horizon, 10);
        assert_eq!(f.system.closed_loop_step(&[0.3]).unwrap(), vec![0.3]);
    }

    #[test]
    fn rejects_unknown_primitive_and_dims() {
        let bad = r#"{"name": "b", "state_dim": 1, "control_dim": 0, "update": ["log(x0)"],
                      "initial_set": {"lo": [0.0], "hi": [1.0]}}"#;
        assert!(matches!(
            parse_system(bad, no_controller),
            Err(Error::Parse(ParseError::UnknownPrimitive { .. }))
        ));
        let short = r#"{"name": "b", "state_dim": 2, "control_dim": 0, "update": ["x0"],
                        "initial_set": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]}}"#;
        assert!(matches!(parse_system(short, no_controller), Err(Error::Parse(ParseError::Dimension(_)))));
        let missing = r#"{"name": "b", "state_dim": 1, "control_dim": 1, "update": ["x0 + u0"],
                          "initial_set": {"lo": [0.0], "hi": [1.0]}}"#;
        assert!(matches!(
            parse_system(missing, no_controller),
            Err(Error::Parse(ParseError::MissingController(_)))
        ));
        let axes = r#"{"name": "b", "state_dim": 1, "control_dim": 0, "update": ["x0"],
                       "initial_set": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]}}"#;
        assert!(parse_system(axes, no_controller).is_err());
        assert!(matches!(
            parse_system("{\"name\": ", no_controller),
            Err(Error::Parse(ParseError::Syntax { .. }))
        ));
    }

    #[test]
    fn controller_shape_checked() {
        let net = NeuralNet::new(vec![Layer::new(vec![vec![1.0, 1.0]], vec![0.0], Activation::Linear).unwrap()]).unwrap();
        let doc = r#"{"name": "c", "state_dim": 1, "control_dim": 1, "controller": "n.json",
                      "update": ["x0 + u0"], "initial_set": {"lo": [0.0], "hi": [1.0]}}"#;
        assert!(matches!(parse_system(doc, |_| Ok(net)), Err(Error::Parse(ParseError::Dimension(_)))));
    }

    #[test]
    fn eval_reports_overflow() {
        let sys = SystemSpec::new("e", 1, 0, vec![parse_expr("exp(x0)", 1, 0).unwrap()], None).unwrap();
        assert!(matches!(sys.eval_dynamics(&[1000.0], &[]), Err(Error::NonFinite { coordinate: 0 })));
        assert!(sys.eval_dynamics(&[1.0, 2.0], &[]).is_err());
    }
}
