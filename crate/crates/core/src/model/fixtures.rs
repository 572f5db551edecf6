//! Built-in benchmark systems.
//!
//! Pendulum, TORA and car stand-ins with small hand-constructed ReLU
//! controllers. Each controller realizes a saturated linear state feedback
//! `clamp(K x + k0, -u_max, u_max)` through ReLU pairs, plus "pad" neurons
//! with seeded small weights whose pre-activations straddle zero so that the
//! relaxation has real work to do.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::Expr;
use super::network::{Activation, Layer, NeuralNet};
use super::parse::parse_expr;
use super::system::{SystemFile, SystemSpec};
use crate::geometry::Hyperrect;

/// Saturated linear feedback expressed as a ReLU network.
#[derive(Debug, Clone)]
pub struct SaturatedFeedback {
    pub gain: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub u_max: Vec<f64>,
    pub hidden: Vec<usize>,
    pub pad_gain: f64,
    pub seed: u64,
}

impl SaturatedFeedback {
    pub fn build(&self) -> NeuralNet {
        let m = self.gain.len();
        let d = self.gain[0].len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut layers = Vec::new();

        // First hidden layer: relu(Kx + k0 + u_max), relu(Kx + k0 - u_max), pads.
        let w1 = self.hidden[0];
        assert!(w1 >= 2 * m, "first hidden layer must hold the clamp pairs");
        let mut weights = Vec::with_capacity(w1);
        let mut bias = Vec::with_capacity(w1);
        for j in 0..m {
            for sign in [1.0, -1.0] {
                weights.push(self.gain[j].clone());
                bias.push(self.offset[j] + sign * self.u_max[j]);
            }
        }
        for _ in 2 * m..w1 {
            weights.push((0..d).map(|_| rng.gen_range(-0.5..0.5)).collect());
            bias.push(rng.gen_range(-0.3..0.3));
        }
        layers.push(Layer::new(weights, bias, Activation::Relu).expect("valid fixture layer"));

        // Deeper hidden layers: clamp neurons pass through (inputs are >= 0),
        // pads mix the previous pads.
        let mut prev = w1;
        for &width in &self.hidden[1..] {
            let mut weights = Vec::with_capacity(width);
            let mut bias = Vec::with_capacity(width);
            for k in 0..2 * m {
                let mut row = vec![0.0; prev];
                row[k] = 1.0;
                weights.push(row);
                bias.push(0.0);
            }
            for _ in 2 * m..width {
                let mut row = vec![0.0; prev];
                for w in row.iter_mut().skip(2 * m) {
                    *w = rng.gen_range(-0.3..0.3);
                }
                weights.push(row);
                bias.push(rng.gen_range(-0.2..0.2));
            }
            layers.push(Layer::new(weights, bias, Activation::Relu).expect("valid fixture layer"));
            prev = width;
        }

        let mut weights = Vec::with_capacity(m);
        let mut bias = Vec::with_capacity(m);
        for j in 0..m {
            let mut row = vec![0.0; prev];
            row[2 * j] = 1.0;
            row[2 * j + 1] = -1.0;
            for w in row.iter_mut().skip(2 * m) {
                *w = self.pad_gain * rng.gen_range(-1.0..1.0);
            }
            weights.push(row);
            bias.push(-self.u_max[j]);
        }
        layers.push(Layer::new(weights, bias, Activation::Linear).expect("valid fixture layer"));
        NeuralNet::new(layers).expect("fixture layers chain")
    }
}

fn build(
    name: &str,
    d: usize,
    m: usize,
    update: &[&str],
    controller: NeuralNet,
    lo: &[f64],
    hi: &[f64],
    horizon: usize,
) -> SystemFile {
    let update = update
        .iter()
        .map(|s| parse_expr(s, d, m).expect("fixture expression parses"))
        .collect();
    SystemFile {
        system: SystemSpec::new(name, d, m, update, Some(controller)).expect("fixture is consistent"),
        initial_set: Hyperrect::new(lo.to_vec(), hi.to_vec()).expect("fixture box"),
        horizon,
    }
}

/// Inverted pendulum, dt = 0.05, controller `[2, 25, 25, 1]`.
pub fn pendulum() -> SystemFile {
    let net = SaturatedFeedback {
        gain: vec![vec![-18.5, -6.3]],
        offset: vec![0.0],
        u_max: vec![8.0],
        hidden: vec![25, 25],
        pad_gain: 0.05,
        seed: 1,
    }
    .build();
    build(
        "pendulum",
        2,
        1,
        &["x0 + 0.05 * x1", "x1 + 0.05 * (9.81 * sin(x0) - 0.1 * x1 + u0)"],
        net,
        &[0.3, -0.05],
        &[0.4, 0.05],
        20,
    )
}

/// Translational oscillator with rotational actuator, dt = 0.1, controller
/// `[4, 25, 25, 25, 1]`.
pub fn tora() -> SystemFile {
    let net = SaturatedFeedback {
        gain: vec![vec![3.82, 0.30, -1.29, -1.91]],
        offset: vec![0.0],
        u_max: vec![2.0],
        hidden: vec![25, 25, 25],
        pad_gain: 0.05,
        seed: 2,
    }
    .build();
    build(
        "tora",
        4,
        1,
        &[
            "x0 + 0.1 * x1",
            "x1 + 0.1 * (0.1 * sin(x2) - x0)",
            "x2 + 0.1 * x3",
            "x3 + 0.1 * u0",
        ],
        net,
        &[0.6, -0.7, -0.4, 0.5],
        &[0.7, -0.6, -0.3, 0.6],
        15,
    )
}

/// Kinematic car tracking the line `y = 0` at unit speed, dt = 0.1, one
/// hidden layer of `width` neurons.
pub fn car(width: usize) -> SystemFile {
    let net = SaturatedFeedback {
        gain: vec![vec![0.0, -0.92, -1.68, 0.0], vec![0.0, 0.0, 0.0, -0.95]],
        offset: vec![0.0, 0.95],
        u_max: vec![1.0, 1.0],
        hidden: vec![width],
        pad_gain: 0.02,
        seed: 3 + width as u64,
    }
    .build();
    build(
        &format!("car{width}"),
        4,
        2,
        &[
            "x0 + 0.1 * x3 * cos(x2)",
            "x1 + 0.1 * x3 * sin(x2)",
            "x2 + 0.1 * u0",
            "x3 + 0.1 * u1",
        ],
        net,
        &[0.0, 0.4, -0.05, 0.9],
        &[0.1, 0.5, 0.05, 1.0],
        15,
    )
}

/// The four shipped benchmarks: pendulum, TORA, car with 100 and 200 neurons.
pub fn all() -> Vec<SystemFile> {
    vec![pendulum(), tora(), car(100), car(200)]
}

pub fn by_name(name: &str) -> Option<SystemFile> {
    all().into_iter().find(|f| f.system.name() == name)
}

/// `x' = A x + B u` with the linear controller `u = K x`.
pub fn linear(a: &[Vec<f64>], b: &[Vec<f64>], k: &[Vec<f64>]) -> SystemSpec {
    let d = a.len();
    let m = k.len();
    let update = (0..d)
        .map(|i| {
            let mut terms: Vec<Expr> = Vec::new();
            for (j, &aij) in a[i].iter().enumerate() {
                if aij != 0.0 {
                    terms.push(Expr::scale(aij, &Expr::state(j)));
                }
            }
            for (j, &bij) in b[i].iter().enumerate() {
                if bij != 0.0 {
                    terms.push(Expr::scale(bij, &Expr::control(j)));
                }
            }
            terms
                .into_iter()
                .reduce(|acc, t| Expr::sum(&acc, &t))
                .unwrap_or_else(|| Expr::constant(0.0))
        })
        .collect();
    let net = NeuralNet::new(vec![
        Layer::new(k.to_vec(), vec![0.0; m], Activation::Linear).expect("gain matrix is a layer")
    ])
    .expect("single layer");
    SystemSpec::new("linear", d, m, update, Some(net)).expect("linear system is consistent")
}

/// Scalar `x' = a x` driven by a zero controller.
pub fn scalar_decay(a: f64) -> SystemSpec {
    let net = NeuralNet::new(vec![Layer::new(vec![vec![0.0]], vec![0.0], Activation::Linear).unwrap()]).unwrap();
    SystemSpec::new(
        "decay",
        1,
        1,
        vec![Expr::scale(a, &Expr::state(0))],
        Some(net),
    )
    .unwrap()
}

/// `x' = x` in `d` dimensions, with a controller whose output is ignored.
pub fn identity(d: usize) -> SystemSpec {
    let net = NeuralNet::new(vec![Layer::new(vec![vec![1.0; d]], vec![0.5], Activation::Relu).unwrap()]).unwrap();
    SystemSpec::new("identity", d, 1, (0..d).map(Expr::state).collect(), Some(net)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_system, parse_network, parse_system};
    use rand::Rng;
    use std::path::Path;

    #[test]
    fn controller_shapes_match_benchmarks() {
        assert_eq!(pendulum().system.controller().unwrap().dims(), vec![2, 25, 25, 1]);
        assert_eq!(tora().system.controller().unwrap().dims(), vec![4, 25, 25, 25, 1]);
        assert_eq!(car(100).system.controller().unwrap().dims(), vec![4, 100, 2]);
        assert_eq!(car(200).system.controller().unwrap().dims(), vec![4, 200, 2]);
    }

    #[test]
    fn clamp_construction_saturates() {
        let net = SaturatedFeedback {
            gain: vec![vec![1.0]],
            offset: vec![0.0],
            u_max: vec![2.0],
            hidden: vec![2],
            pad_gain: 0.0,
            seed: 0,
        }
        .build();
        assert_eq!(net.eval(&[5.0]).unwrap(), vec![2.0]);
        assert_eq!(net.eval(&[-5.0]).unwrap(), vec![-2.0]);
        assert_eq!(net.eval(&[0.5]).unwrap(), vec![0.5]);
    }

    #[test]
    fn pendulum_step_matches_closed_form() {
        let f = pendulum();
        let x = [0.1, 0.0];
        let u = f.system.eval_controller(&x).unwrap();
        let got = f.system.closed_loop_step(&x).unwrap();
        let expect = [
            0.1 + 0.05 * 0.0,
            0.0 + 0.05 * (9.81 * 0.1f64.sin() - 0.1 * 0.0 + u[0]),
        ];
        assert_eq!(got, expect);
        // Near the origin the saturation is inactive: u ~ -18.5 * 0.1 + pads.
        assert!((u[0] + 1.85).abs() < 0.1, "u = {}", u[0]);
    }

    #[test]
    fn random_single_steps_stay_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in all() {
            let b = &f.initial_set;
            for _ in 0..1000 {
                let x: Vec<f64> = (0..b.dim()).map(|i| rng.gen_range(b.lo()[i]..=b.hi()[i])).collect();
                let y = f.system.closed_loop_step(&x).unwrap();
                assert!(y.iter().all(|v| v.is_finite()));
            }
        }
    }

    #[test]
    fn shipped_documents_match_builtins() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        for f in all() {
            let path = dir.join(format!("{}.json", f.system.name()));
            let loaded = load_system(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(loaded, f);
        }
    }

    #[test]
    fn document_round_trip() {
        for f in all() {
            let net = f.system.controller().unwrap().clone();
            let text = f.to_document(Some("net.json"));
            let back = parse_system(&text, |p| {
                assert_eq!(p, "net.json");
                parse_network(&net.to_json())
            })
            .unwrap();
            assert_eq!(back, f);
        }
    }
}
