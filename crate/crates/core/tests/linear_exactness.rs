//! Affine propagation through a linear closed loop is exact: depth-k sets
//! must equal the box image of the start set under the k-th matrix power.

use hsreach_core::*;

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (r, c, k) = (a.len(), b[0].len(), b.len());
    (0..r)
        .map(|i| (0..c).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

fn add(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

/// Smallest box containing `M X0`.
fn image_box(m: &[Vec<f64>], x0: &Hyperrect) -> (Vec<f64>, Vec<f64>) {
    let c = x0.center();
    let r: Vec<f64> = x0.widths().map(|w| w / 2.0).collect();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for row in m {
        let mid: f64 = row.iter().zip(&c).map(|(a, b)| a * b).sum();
        let rad: f64 = row.iter().zip(&r).map(|(a, b)| a.abs() * b).sum();
        lo.push(mid - rad);
        hi.push(mid + rad);
    }
    (lo, hi)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(scale)
}

struct Case {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    k: Vec<Vec<f64>>,
    x0: Hyperrect,
    depth: usize,
}

fn cases() -> Vec<Case> {
    vec![
        // discretized double integrator with PD feedback
        Case {
            a: vec![vec![1.0, 0.1], vec![0.0, 1.0]],
            b: vec![vec![0.005], vec![0.1]],
            k: vec![vec![-2.0, -1.5]],
            x0: Hyperrect::new(vec![0.9, -0.1], vec![1.1, 0.1]).unwrap(),
            depth: 12,
        },
        // lightly damped rotation, zero gain
        Case {
            a: vec![vec![0.95, -0.3], vec![0.3, 0.95]],
            b: vec![vec![0.0], vec![1.0]],
            k: vec![vec![0.0, 0.0]],
            x0: Hyperrect::new(vec![-0.2, 0.5], vec![0.2, 0.6]).unwrap(),
            depth: 10,
        },
        // three states, two inputs
        Case {
            a: vec![vec![1.0, 0.2, 0.0], vec![0.0, 0.9, 0.1], vec![0.05, 0.0, 0.97]],
            b: vec![vec![0.1, 0.0], vec![0.0, 0.2], vec![0.1, 0.1]],
            k: vec![vec![-0.5, 0.1, 0.0], vec![0.2, -0.4, -0.3]],
            x0: Hyperrect::new(vec![-1.0, 0.0, 2.0], vec![-0.5, 0.25, 2.5]).unwrap(),
            depth: 8,
        },
    ]
}

#[test]
fn depth_h_sets_match_closed_form() {
    for (ci, c) in cases().into_iter().enumerate() {
        let sys = fixtures::linear(&c.a, &c.b, &c.k);
        let m = add(&c.a, &matmul(&c.b, &c.k));
        let scale = c.x0.lo().iter().chain(c.x0.hi()).fold(0.0f64, |s, v| s.max(v.abs()));
        for mode in [IntermediateMode::Symbolic, IntermediateMode::Concrete] {
            let mut q = Query::new(sys.clone(), c.depth).unwrap().with_intermediate_mode(mode);
            q.set_depth(c.depth).unwrap();
            let mut clock = SimulatedClock::new(CostModel::affine(0.0, 1.0));
            let (_, sets) = symbolic_reach(&mut q, &c.x0, 0, &mut clock).unwrap();
            let mut power = m.clone();
            for (k, set) in sets.iter().enumerate() {
                let exact_here = mode == IntermediateMode::Symbolic || k + 1 == c.depth;
                let (lo, hi) = image_box(&power, &c.x0);
                let matches = (0..lo.len()).all(|i| close(set.lo()[i], lo[i], scale) && close(set.hi()[i], hi[i], scale));
                if exact_here {
                    assert!(matches, "case {ci} {mode:?} step {}: {:?} vs {:?}/{:?}", k + 1, set, lo, hi);
                }
                // concrete intermediates are enclosures, never tighter
                for i in 0..lo.len() {
                    assert!(set.lo()[i] <= lo[i] + 1e-12 && set.hi()[i] >= hi[i] - 1e-12);
                }
                power = matmul(&m, &power);
            }
        }
    }
}

#[test]
fn scalar_decay_example() {
    let mut q = Query::new(fixtures::scalar_decay(0.5), 3).unwrap();
    q.set_depth(3).unwrap();
    let x0 = Hyperrect::new(vec![1.0], vec![2.0]).unwrap();
    let (_, sets) = symbolic_reach(&mut q, &x0, 0, &mut WallClock::new()).unwrap();
    let expect = [(0.5, 1.0), (0.25, 0.5), (0.125, 0.25)];
    for (s, (l, h)) in sets.iter().zip(expect) {
        assert_eq!((s.lo()[0], s.hi()[0]), (l, h));
    }
}
