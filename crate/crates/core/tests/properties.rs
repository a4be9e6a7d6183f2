use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use revquant::optimize::{apply_identity, choose_preparation, AncillaPool, PrepMode, PreparationPlan, SharedControlBlock};
use revquant::sim::{
    check_equivalence, find_fixed_points, permutation_of, simulate_dense, simulate_sparse, EquivalenceOptions,
    SimLimits, SparseState, Verdict,
};
use revquant::synthetic::{random_circuit, random_shared_block};
use revquant::{emit, optimize, parse, Circuit, Control, CostModel, Gate, OptimizeOptions, Polarity};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The block spanning all of `c` with the first `shared` lines as shared controls.
fn whole_block(c: &Circuit, shared: usize) -> SharedControlBlock {
    let common: Vec<Control> = c.gates()[0].controls().iter().copied().filter(|ctl| ctl.line < shared).collect();
    let residual: BTreeSet<usize> = c.gates().iter().flat_map(|g| g.lines()).filter(|&l| l >= shared).collect();
    SharedControlBlock { start: 0, end: c.len(), shared: common, residual: residual.into_iter().collect(), profit: 0 }
}

fn flip_polarities(c: &Circuit) -> Circuit {
    let gates = c.gates().iter().map(|g| {
        let controls = g.controls().iter().map(|ctl| Control { line: ctl.line, polarity: ctl.polarity.flipped() });
        Gate::new(g.kind(), controls, g.targets().to_vec())
    });
    Circuit::from_parts(c.lines().to_vec(), gates.collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emit_then_parse_is_identity(seed: u64, lines in 1usize..10, gates in 0usize..30, h: bool) {
        let c = random_circuit(&mut rng(seed), lines, gates, h);
        let text = emit(&c);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(emit(&back), text);
    }

    #[test]
    fn cost_ignores_polarity(seed: u64, lines in 1usize..12, gates in 0usize..30) {
        let c = random_circuit(&mut rng(seed), lines, gates, true);
        let m = CostModel::default();
        prop_assert_eq!(m.circuit_cost(&c), m.circuit_cost(&flip_polarities(&c)));
    }

    #[test]
    fn truth_tables_compose(seed: u64, lines in 1usize..7, n in 0usize..12, k in 0usize..12) {
        let mut r = rng(seed);
        let a = random_circuit(&mut r, lines, n, false);
        let b = random_circuit(&mut r, lines, k, false);
        let joined = permutation_of(&a.then(&b).unwrap(), 20).unwrap();
        let pa = permutation_of(&a, 20).unwrap();
        let pb = permutation_of(&b, 20).unwrap();
        prop_assert_eq!(&joined, &pa.then(&pb));
        prop_assert!(permutation_of(&a.then(&a.inverse()).unwrap(), 20).unwrap().is_identity());
    }

    #[test]
    fn backends_agree_and_preserve_norm(seed: u64, lines in 1usize..7, gates in 0usize..25) {
        let c = random_circuit(&mut rng(seed), lines, gates, true);
        let lim = SimLimits::default();
        for x in 0..1u128 << lines {
            let dense = simulate_dense(&c, &SparseState::basis(lines, x), &lim).unwrap();
            let sparse = simulate_sparse(&c, x, &lim).unwrap();
            prop_assert!(dense.max_deviation(&sparse) < 1e-10);
            prop_assert!((sparse.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_is_sound(seed: u64, shared in 1usize..=3, residual in 2usize..=3, gates in 3usize..=8) {
        let c = random_shared_block(&mut rng(seed), shared, residual, gates);
        let b = whole_block(&c, shared);
        let lim = SimLimits::default();
        let mut plans = vec![PreparationPlan::uniform(b.residual.len())];
        plans.extend(choose_preparation(&b, &c, PrepMode::Auto, &lim));
        for plan in plans {
            let (wide, mut pool) = AncillaPool::allocate(&c, b.ancillas_needed());
            let out = apply_identity(&wide, &b, &plan, &mut pool, &lim).unwrap();
            prop_assert!(pool.tracker().all_zero());
            let verdict = check_equivalence(&c, &out, pool.lines(), &EquivalenceOptions::default());
            prop_assert_eq!(verdict, Verdict::Equivalent);
        }
    }

    #[test]
    fn fixed_point_plan_accepted_iff_fixed(seed: u64, residual in 2usize..=3, gates in 3usize..=8) {
        let c = random_shared_block(&mut rng(seed), 1, residual, gates);
        let b = whole_block(&c, 1);
        let k = b.residual.len();
        let lim = SimLimits::default();
        let residual_perm = permutation_of(&revquant::optimize::residual_circuit(&b, &c), 20).unwrap();
        let fixed = find_fixed_points(&residual_perm);
        for point in 0..1u32 << k {
            let (wide, mut pool) = AncillaPool::allocate(&c, b.ancillas_needed());
            let result = apply_identity(&wide, &b, &PreparationPlan::fixed_point(k, point), &mut pool, &lim);
            if fixed.contains(&point) {
                let out = result.unwrap();
                let verdict = check_equivalence(&c, &out, pool.lines(), &EquivalenceOptions::default());
                prop_assert_eq!(verdict, Verdict::Equivalent);
            } else {
                let rejected = matches!(result, Err(revquant::RewriteError::PlanMismatch(_)));
                prop_assert!(rejected);
            }
        }
    }

    #[test]
    fn optimize_preserves_semantics(seed: u64, lines in 3usize..8, runs in 1usize..4, reuse: bool, passes in 1usize..3) {
        // concatenate random shared-control runs on permuted lines so that
        // profitable blocks actually occur
        let mut r = rng(seed);
        let mut c = Circuit::new(lines);
        for i in 0..runs {
            let shared = 1 + i % 2;
            let block = random_shared_block(&mut r, shared, lines - shared, 6);
            let shift = i % lines;
            let gates: Vec<Gate> = block.gates().iter().map(|g| g.remap(|l| (l + shift) % lines)).collect();
            c = c.then(&Circuit::new(lines).with_gates(gates)).unwrap();
            c = c.then(&random_circuit(&mut r, lines, 2, false)).unwrap();
        }
        let opts = OptimizeOptions { reuse_ancillae: reuse, passes, ..OptimizeOptions::default() };
        let (out, report) = optimize(&c, &opts).unwrap();
        prop_assert!(report.cost_after <= report.cost_before);
        prop_assert_eq!(report.blocks.is_empty(), report.cost_after == report.cost_before);
        prop_assert!(report.ancillae_used <= report.ancilla_budget);
        let saved: u64 = report.blocks.iter().map(|b| b.cost_before - b.cost_after).sum();
        prop_assert_eq!(saved, report.cost_before - report.cost_after);
        prop_assert_eq!(report.cost_after, CostModel::default().circuit_cost(&out));
        let verdict = check_equivalence(&c, &out, &report.ancilla_lines, &EquivalenceOptions::default());
        prop_assert_eq!(verdict, Verdict::Equivalent);
    }

    #[test]
    fn optimize_is_deterministic(seed: u64, lines in 3usize..8) {
        let c = random_shared_block(&mut rng(seed), 1, lines - 1, 8);
        let a = optimize(&c, &OptimizeOptions::default()).unwrap();
        let b = optimize(&c, &OptimizeOptions::default()).unwrap();
        prop_assert_eq!(emit(&a.0), emit(&b.0));
        prop_assert_eq!(a.1, b.1);
    }
}

#[test]
fn negative_controls_survive_round_trip() {
    let c = Circuit::new(3).with_gates([Gate::mct([Control::neg(0), Control::pos(1)], 2)]);
    let back = parse(&emit(&c)).unwrap();
    assert_eq!(back.gates()[0].control_on(0), Some(Polarity::Negative));
}
