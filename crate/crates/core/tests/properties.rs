use hsreach_core::oracle::trajectory;
use hsreach_core::*;
use proptest::prelude::*;

fn sim() -> SimulatedClock {
    SimulatedClock::new(CostModel::affine(0.0, 1.0))
}

fn boxed(center: &[f64], width: &[f64]) -> Hyperrect {
    Hyperrect::new(
        center.iter().zip(width).map(|(c, w)| c - w / 2.0).collect(),
        center.iter().zip(width).map(|(c, w)| c + w / 2.0).collect(),
    )
    .unwrap()
}

fn system(which: usize) -> SystemSpec {
    match which {
        0 => fixtures::pendulum().system,
        1 => fixtures::tora().system,
        _ => fixtures::car(100).system,
    }
}

fn start_box(which: usize, c: &[f64], w: &[f64]) -> Hyperrect {
    let base = match which {
        0 => fixtures::pendulum().initial_set,
        1 => fixtures::tora().initial_set,
        _ => fixtures::car(100).initial_set,
    };
    let center = base.center();
    let d = base.dim();
    boxed(
        &(0..d).map(|i| center[i] + c[i]).collect::<Vec<_>>(),
        &(0..d).map(|i| w[i]).collect::<Vec<_>>(),
    )
}

fn run(q: &mut Query, x: &Hyperrect, h: usize) -> Vec<Hyperrect> {
    q.set_depth(h).unwrap();
    symbolic_reach(q, x, 0, &mut sim()).unwrap().1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn returned_sets_contain_sampled_trajectories(
        which in 0usize..3,
        c in prop::collection::vec(-0.2f64..0.2, 4),
        w in prop::collection::vec(0.0f64..0.15, 4),
        h in 1usize..6,
        symbolic in any::<bool>(),
        zero_timeout in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let sys = system(which);
        let x = start_box(which, &c, &w);
        let mode = if symbolic { IntermediateMode::Symbolic } else { IntermediateMode::Concrete };
        let mut q = Query::new(sys.clone(), h).unwrap().with_intermediate_mode(mode);
        if zero_timeout {
            q.set_timeout(0.0).unwrap();
        }
        let sets = run(&mut q, &x, h);
        prop_assert_eq!(sets.len(), h);
        let v = audit_soundness(&sys, &x, &sets, 10_000, seed);
        prop_assert!(v.is_empty(), "{} violations, first {:?}", v.len(), v.first());
    }

    #[test]
    fn finer_nested_ladder_never_loosens(
        which in 0usize..3,
        c in prop::collection::vec(-0.2f64..0.2, 4),
        w in prop::collection::vec(0.001f64..0.15, 4),
        h in 1usize..5,
        segments in 1usize..6,
        levels in 1usize..4,
    ) {
        // Doubling the finest resolution and adding one pass keeps every
        // coarser pass, so results can only shrink.
        let sys = system(which);
        let x = start_box(which, &c, &w);
        let mut coarse = Query::new(sys.clone(), h).unwrap()
            .with_pwl_segments(segments).unwrap().with_refine_levels(levels).unwrap();
        let mut fine = Query::new(sys, h).unwrap()
            .with_pwl_segments(2 * segments).unwrap().with_refine_levels(levels + 1).unwrap();
        let a = run(&mut coarse, &x, h);
        let b = run(&mut fine, &x, h);
        for (sa, sb) in a.iter().zip(&b) {
            prop_assert!(sb.is_subset_of(sa), "{:?} not in {:?}", sb, sa);
        }
    }

    #[test]
    fn deterministic_under_simulated_clock(
        which in 0usize..3,
        c in prop::collection::vec(-0.2f64..0.2, 4),
        w in prop::collection::vec(0.0f64..0.15, 4),
        h in 1usize..5,
    ) {
        let sys = system(which);
        let x = start_box(which, &c, &w);
        let mut q = Query::new(sys, h).unwrap();
        q.set_depth(h).unwrap();
        let (d1, s1) = symbolic_reach(&mut q, &x, 0, &mut sim()).unwrap();
        let (d2, s2) = symbolic_reach(&mut q, &x, 0, &mut sim()).unwrap();
        prop_assert_eq!(s1, s2);
        prop_assert_eq!(d1, d2);
    }

    #[test]
    fn symbolic_final_set_inside_chained_depth_one_sets(
        which in 0usize..3,
        c in prop::collection::vec(-0.2f64..0.2, 4),
        w in prop::collection::vec(0.0f64..0.15, 4),
        h in 2usize..6,
    ) {
        let sys = system(which);
        let x = start_box(which, &c, &w);
        let mut q = Query::new(sys.clone(), h).unwrap();
        let sym = run(&mut q, &x, h);
        let mut cur = x.clone();
        for t in 0..h {
            q.set_depth(1).unwrap();
            cur = symbolic_reach(&mut q, &cur, t, &mut sim()).unwrap().1.remove(0);
        }
        prop_assert!(sym[h - 1].is_subset_of(&cur));
    }
}

/// Shrinking the start set is checked on nested boxes sharing a center.
/// Relaxation slopes depend on the ranges they are built over, so this is
/// an empirical property rather than a structural one.
#[test]
fn nested_start_sets_give_nested_results() {
    let mut failures = Vec::new();
    let mut rng_state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        (rng_state >> 11) as f64 / (1u64 << 53) as f64
    };
    for trial in 0..60 {
        let which = trial % 3;
        let c: Vec<f64> = (0..4).map(|_| 0.3 * next() - 0.15).collect();
        let w: Vec<f64> = (0..4).map(|_| 0.02 + 0.1 * next()).collect();
        let outer = start_box(which, &c, &w);
        let f = 0.2 + 0.8 * next();
        let inner = start_box(which, &c, &w.iter().map(|v| v * f).collect::<Vec<_>>());
        let h = 1 + trial % 4;
        let mut q = Query::new(system(which), h).unwrap();
        let a = run(&mut q, &inner, h);
        let b = run(&mut q, &outer, h);
        for (k, (sa, sb)) in a.iter().zip(&b).enumerate() {
            if !sa.is_subset_of(sb) {
                failures.push((trial, k));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn returned_sets_contain_fixture_trajectories_pointwise() {
    let f = fixtures::tora();
    let mut q = Query::new(f.system.clone(), 6).unwrap();
    let sets = run(&mut q, &f.initial_set, 6);
    for i in 0..500 {
        let tr = trajectory(&f.system, &f.initial_set, 6, 42, i).unwrap();
        for (x, s) in tr.iter().zip(&sets) {
            assert!(s.contains(x).unwrap());
        }
    }
}

fn cost_model(kind: u8, a: f64, c: f64, spike: usize) -> CostModel {
    let m = CostModel::affine(a, c);
    match kind % 3 {
        0 => m,
        1 => m.with_entry(spike, 2, 1e3 * c),
        _ => (1..=20).fold(m, |m, d| m.with_entry(d, 1, c * (d * d) as f64)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scheduler_invariants(
        n in 1usize..25,
        levels in 1usize..4,
        kind in any::<u8>(),
        a in 0.0f64..0.5,
        c in 0.01f64..2.0,
        spike in 1usize..8,
        budget in 0.01f64..200.0,
        unlimited in prop::bool::weighted(0.15),
    ) {
        let mut q = Query::new(fixtures::identity(1), n).unwrap().with_refine_levels(levels).unwrap();
        let x0 = Hyperrect::new(vec![0.0], vec![1.0]).unwrap();
        let b = if unlimited { Budget::Unlimited } else { Budget::Seconds(budget) };
        let mut clock = SimulatedClock::new(cost_model(kind, a, c, spike));
        let (sets, log) = refined_reach(&mut q, &x0, b, &BoundPropagation, &mut clock).unwrap();
        prop_assert_eq!(sets.len(), n);
        prop_assert!(log.len() <= 2 * n);
        let recs = log.records();
        // never overshoot, pushes cover 1..=n exactly once
        let mut pushed: Vec<usize> = recs.iter().flat_map(|r| r.pushed.clone()).collect();
        prop_assert!(recs.iter().all(|r| r.t_start + r.depth <= n && r.depth >= 1));
        pushed.sort();
        prop_assert_eq!(pushed, (1..=n).collect::<Vec<_>>());
        // search: consecutive depths from t = 0, then only jumps
        let k = log.search_records().count();
        prop_assert!(k >= 1);
        for (i, r) in recs.iter().enumerate() {
            if i < k {
                prop_assert_eq!((r.phase, r.t_start, r.depth), (Phase::Search, 0, i + 1));
            } else {
                prop_assert_eq!(r.phase, Phase::Jump);
            }
        }
        // jump records tile (k, n]
        let mut t = k;
        for r in log.jump_records() {
            prop_assert_eq!(r.t_start, t);
            t += r.depth;
        }
        prop_assert!(log.jump_records().count() == 0 || t == n);
        if unlimited {
            prop_assert_eq!(log.depths(), (1..=n).collect::<Vec<_>>());
        }
    }
}
