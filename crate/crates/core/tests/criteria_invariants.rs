use proptest::prelude::*;
use shiftlab_core::constructions::{
    example_provider, safe_horizon, salas_weights, translation_weights, GridModel, TranslationWeightParams,
};
use shiftlab_core::criteria::{
    check_dense_hypercyclicity, geometric_tail, non_increasing_tail, ApproximantProvider, PowerSchedule,
    TailEstimate,
};
use shiftlab_core::module_space::{IndexRange, ModuleVector};
use shiftlab_core::operator::{BasisWindow, UnitaryOp};
use shiftlab_core::random::{random_module_vector, seeded};
use shiftlab_core::shift::ShiftOperator;

fn salas(m_max: usize) -> ShiftOperator {
    let w = BasisWindow::new(m_max);
    ShiftOperator::new(salas_weights(w, 2.0).unwrap(), UnitaryOp::identity(w)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decay_columns_scale_with_the_provider(c in 0.1f64..10.0) {
        let op = salas(2);
        let sched = PowerSchedule::arithmetic(1, 2, 8).unwrap();
        let base = ApproximantProvider::constant_p(op.window(), 1).unwrap();
        let r1 = check_dense_hypercyclicity(&op, &sched, &base, IndexRange(1), 1, 1e-6).unwrap();
        let r2 = check_dense_hypercyclicity(&op, &sched, &base.scaled(c), IndexRange(1), 1, 1e-6).unwrap();
        for j in -1..=1 {
            for q in ["forward_decay", "inverse_decay"] {
                for (a, b) in r1.series(j, q).iter().zip(r2.series(j, q)) {
                    prop_assert!((c * a - b).abs() <= 1e-12 * b.abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn geometric_tails_are_exact_on_geometric_terms(first in 0.1f64..10.0, r in 0.05f64..0.9, len in 3usize..12) {
        let terms: Vec<f64> = (0..len).map(|i| first * r.powi(i as i32)).collect();
        let last = terms[len - 1];
        match geometric_tail(&terms) {
            TailEstimate::Bounded(t) => prop_assert!((t - last * r / (1.0 - r)).abs() <= 1e-10 * last),
            TailEstimate::Unbounded => prop_assert!(false, "geometric terms flagged"),
        }
    }

    #[test]
    fn decreasing_sequences_have_non_increasing_tails(mut v in prop::collection::vec(0.0f64..1.0, 1..20)) {
        v.sort_by(|a, b| b.total_cmp(a));
        prop_assert!(non_increasing_tail(&v));
    }

    #[test]
    fn module_vectors_round_trip_through_json(seed in 0u64..100_000) {
        let w = BasisWindow::new(1);
        let x = random_module_vector(&mut seeded(seed), w, -2..=2);
        let back = ModuleVector::from_json(&x.to_json()).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn salas_decay_columns_are_powers_of_two() {
    let op = salas(3);
    let sched = PowerSchedule::arithmetic(1, 1, 30).unwrap();
    let prov = ApproximantProvider::constant_p(op.window(), 1).unwrap();
    let r = check_dense_hypercyclicity(&op, &sched, &prov, IndexRange(0), 1, 1e-6).unwrap();
    for (k, t, v) in r.points(0, "forward_decay") {
        assert!((v - 2f64.powi(-(t as i32))).abs() <= 1e-12 * v, "k = {k}");
    }
    for (k, t, v) in r.points(0, "inverse_decay") {
        assert!((v - 2f64.powi(-(t as i32))).abs() <= 1e-12 * v, "k = {k}");
    }
    assert_eq!(r.satisfied_at_k, Some(20));
}

#[test]
fn translation_decay_is_a_power_of_the_weight() {
    let grid = GridModel::new(20.0, 1.0).unwrap();
    let params = TranslationWeightParams::constant_by_sign(0.75, 1.0);
    let w = grid.window();
    let op = ShiftOperator::new(translation_weights(&grid, &params).unwrap(), UnitaryOp::identity(w)).unwrap();
    let horizon = safe_horizon(&grid, &params, 1).unwrap();
    assert_eq!(horizon, 19);
    let sched = PowerSchedule::arithmetic(1, 1, horizon).unwrap();
    let prov = example_provider(grid, 1).unwrap();
    let r = check_dense_hypercyclicity(&op, &sched, &prov, IndexRange(0), 1, 1e-6).unwrap();
    for (_, t, v) in r.points(0, "forward_decay") {
        let want = 0.25f64.powi(t as i32);
        assert!((v - want).abs() <= 1e-12 * want);
    }
    for (_, t, v) in r.points(0, "inverse_decay") {
        let want = 0.25f64.powi(t as i32 - 2);
        assert!((v - want).abs() <= 1e-12 * want);
    }
}
