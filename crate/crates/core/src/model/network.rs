use serde::{Deserialize, Serialize};

use super::parse::ParseError;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Linear,
}

impl Activation {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "relu" => Some(Self::Relu),
            "linear" => Some(Self::Linear),
            _ => None,
        }
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Self::Relu => v.max(0.0),
            Self::Linear => v,
        }
    }
}

/// Dense layer, `activation(W x + b)`. `weights` is row-major: one row per
/// output neuron.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if weights.len() != bias.len() {
            return Err(Error::InvalidNetwork(format!(
                "{} weight rows but {} bias entries",
                weights.len(),
                bias.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidNetwork("layer has no neurons".into()));
        }
        let cols = weights[0].len();
        if let Some(r) = weights.iter().position(|row| row.len() != cols) {
            return Err(Error::InvalidNetwork(format!(
                "ragged weight matrix: row {r} has {} columns, row 0 has {cols}",
                weights[r].len()
            )));
        }
        if cols == 0 {
            return Err(Error::InvalidNetwork("layer has no inputs".into()));
        }
        if weights.iter().flatten().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidNetwork("non-finite parameter".into()));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| {
                let pre: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b;
                self.activation.apply(pre)
            })
            .collect()
    }
}

/// Feed-forward controller with ReLU / linear layers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeuralNet {
    layers: Vec<Layer>,
}

#[derive(Deserialize)]
struct RawLayer {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: String,
}

#[derive(Deserialize)]
struct RawNet {
    layers: Vec<RawLayer>,
}

impl NeuralNet {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidNetwork("network has no layers".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[1].input_dim() != pair[0].output_dim() {
                return Err(Error::InvalidNetwork(format!(
                    "layer {} expects {} inputs but layer {k} produces {}",
                    k + 1,
                    pair[1].input_dim(),
                    pair[0].output_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    /// `[input, hidden..., output]` widths.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(Layer::output_dim))
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        let mut v = x.to_vec();
        for layer in &self.layers {
            v = layer.forward(&v);
        }
        Ok(v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }
}

/// Parses the `{"layers": [{"weights", "bias", "activation"}]}` document.
pub fn parse_network(text: &str) -> Result<NeuralNet> {
    let raw: RawNet = serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))?;
    let layers = raw
        .layers
        .into_iter()
        .map(|l| {
            let act = Activation::from_name(&l.activation)
                .ok_or_else(|| ParseError::UnsupportedActivation(l.activation.clone()))?;
            Layer::new(l.weights, l.bias, act)
        })
        .collect::<Result<Vec<_>>>()?;
    NeuralNet::new(layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize, act: Activation) -> Layer {
        let w = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Layer::new(w, vec![0.0; n], act).unwrap()
    }

    #[test]
    fn linear_identity_passes_through() {
        let net = NeuralNet::new(vec![identity(3, Activation::Linear)]).unwrap();
        assert_eq!(net.eval(&[1.0, -2.0, 0.5]).unwrap(), vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn relu_clips_negative() {
        let net = NeuralNet::new(vec![identity(2, Activation::Relu)]).unwrap();
        assert_eq!(net.eval(&[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
        assert!(net.eval(&[1.0]).is_err());
    }

    #[test]
    fn two_layer_hand_evaluation() {
        // h = relu([1 -1; 2 1] x + [0, -1]),  y = [1 0.5] h + 0.25
        let doc = r#"{"layers": [
            {"weights": [[1.0, -1.0], [2.0, 1.0]], "bias": [0.0, -1.0], "activation": "relu"},
            {"weights": [[1.0, 0.5]], "bias": [0.25], "activation": "linear"}
        ]}"#;
        let net = parse_network(doc).unwrap();
        assert_eq!(net.dims(), vec![2, 2, 1]);
        // x = (0.5, 1.5): pre = (-1.0, 1.5) -> h = (0, 1.5) -> y = 0.75 + 0.25
        assert_eq!(net.eval(&[0.5, 1.5]).unwrap(), vec![1.0]);
        // x = (2, 0): pre = (2, 3) -> y = 2 + 1.5 + 0.25
        assert_eq!(net.eval(&[2.0, 0.0]).unwrap(), vec![3.75]);
    }

    #[test]
    fn rejects_bad_documents() {
        let ragged = r#"{"layers": [{"weights": [[1.0, 2.0], [1.0]], "bias": [0.0, 0.0], "activation": "relu"}]}"#;
        assert!(matches!(parse_network(ragged), Err(Error::InvalidNetwork(_))));
        let chain = r#"{"layers": [
            {"weights": [[1.0], [1.0]], "bias": [0.0, 0.0], "activation": "relu"},
            {"weights": [[1.0, 1.0, 1.0]], "bias": [0.0], "activation": "linear"}]}"#;
        assert!(matches!(parse_network(chain), Err(Error::InvalidNetwork(_))));
        let sigmoid = r#"{"layers": [{"weights": [[1.0]], "bias": [0.0], "activation": "sigmoid"}]}"#;
        assert!(matches!(
            parse_network(sigmoid),
            Err(Error::Parse(ParseError::UnsupportedActivation(ref a))) if a == "sigmoid"
        ));
        assert!(matches!(
            parse_network("{\"layers\": [}"),
            Err(Error::Parse(ParseError::Syntax { line: 1, .. }))
        ));
    }

    #[test]
    fn json_round_trip() {
        let net = NeuralNet::new(vec![
            Layer::new(vec![vec![0.1, -0.3], vec![1e-7, 2.5]], vec![0.7, -1.0 / 3.0], Activation::Relu).unwrap(),
            Layer::new(vec![vec![std::f64::consts::PI, 1.0]], vec![0.0], Activation::Linear).unwrap(),
        ])
        .unwrap();
        assert_eq!(parse_network(&net.to_json()).unwrap(), net);
    }
}
