use proptest::prelude::*;
use shiftlab_core::constructions::cyclic_weighted_shift;
use shiftlab_core::cstar::{commutative_context, compact_context, AlgebraContext, Automorphism, PhiShift, SeqFn};
use shiftlab_core::operator::{BasisWindow, UnitaryOp};
use shiftlab_core::random::{random_invertible, random_op, random_unitary, seeded};

fn seq_fn() -> impl Strategy<Value = SeqFn> {
    (-6i64..6, prop::collection::vec(-3.0f64..3.0, 0..8), -3.0f64..3.0, -3.0f64..3.0)
        .prop_map(|(start, values, left, right)| SeqFn::new(start, values, left, right).unwrap())
}

fn finite_fn() -> impl Strategy<Value = SeqFn> {
    (-6i64..6, prop::collection::vec(-3.0f64..3.0, 0..8)).prop_map(|(s, v)| SeqFn::finite(s, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_is_a_homomorphism(a in seq_fn(), b in seq_fn(), step in prop_oneof![-3i64..=-1, 1i64..=3]) {
        let (ctx, phi) = commutative_context(101, step).unwrap();
        let lhs = phi.forward(&ctx.mul(&a, &b).unwrap()).unwrap();
        let rhs = ctx.mul(&phi.forward(&a).unwrap(), &phi.forward(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let sum = phi.forward(&ctx.add(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(sum, ctx.add(&phi.forward(&a).unwrap(), &phi.forward(&b).unwrap()).unwrap());
        prop_assert_eq!(phi.backward(&phi.forward(&a).unwrap()).unwrap(), a.clone());
        prop_assert_eq!(ctx.norm(&phi.forward(&a).unwrap()), ctx.norm(&a));
    }

    #[test]
    fn ideal_absorbs_multipliers(a in finite_fn(), x in seq_fn()) {
        let (ctx, _) = commutative_context(101, 1).unwrap();
        prop_assert!(ctx.in_ideal(&ctx.mul(&a, &x).unwrap()));
        prop_assert!(ctx.in_ideal(&ctx.mul(&x, &a).unwrap()));
        prop_assert!(ctx.norm(&ctx.mul(&a, &x).unwrap()) <= ctx.norm(&a) * ctx.norm(&x) + 1e-12);
    }

    #[test]
    fn commutative_s_inverts_t(a in seq_fn(), nonneg in 0.2f64..5.0, neg in 0.2f64..5.0, n in 1usize..6) {
        let (ctx, phi) = commutative_context(101, 1).unwrap();
        let ps = PhiShift::new(ctx, phi, SeqFn::by_sign(nonneg, neg)).unwrap();
        let st = ps.apply_s(&ps.apply_t(&a).unwrap()).unwrap();
        let ts = ps.apply_t(&ps.apply_s(&a).unwrap()).unwrap();
        let scale = 1.0 + ctx.norm(&a);
        prop_assert!(ctx.norm(&ctx.sub(&st, &a).unwrap()) <= 1e-12 * scale);
        prop_assert!(ctx.norm(&ctx.sub(&ts, &a).unwrap()) <= 1e-12 * scale);
        let mut it = a.clone();
        for _ in 0..n {
            it = ps.apply_t(&it).unwrap();
        }
        let closed = ps.apply_t_power(n, &a).unwrap();
        prop_assert!(ctx.norm(&ctx.sub(&closed, &it).unwrap()) <= 1e-12 * ctx.norm(&it).max(1.0));
    }

    #[test]
    fn conjugation_is_an_isometric_homomorphism(seed in 0u64..100_000) {
        let w = BasisWindow::new(2);
        let mut rng = seeded(seed);
        let (ctx, phi) = compact_context(w, random_unitary(&mut rng, w), 8).unwrap();
        let a = random_op(&mut rng, w);
        let b = random_op(&mut rng, w);
        let lhs = phi.forward(&ctx.mul(&a, &b).unwrap()).unwrap();
        let rhs = ctx.mul(&phi.forward(&a).unwrap(), &phi.forward(&b).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * 10.0);
        let adj = phi.forward(&ctx.adjoint(&a)).unwrap();
        prop_assert!(adj.max_abs_diff(&ctx.adjoint(&phi.forward(&a).unwrap())) <= 1e-12 * 10.0);
    }

    #[test]
    fn bridge_identity(seed in 0u64..100_000) {
        // W F U = (W U)(U^* F U)
        let w = BasisWindow::new(2);
        let mut rng = seeded(seed);
        let u = random_unitary(&mut rng, w);
        let wt = random_op(&mut rng, w);
        let f = random_op(&mut rng, w);
        let lhs = wt.matmul(&f).unwrap().matmul(u.op()).unwrap();
        let (_, phi) = compact_context(w, u.clone(), 1).unwrap();
        let rhs = wt.matmul(u.op()).unwrap().matmul(&phi.forward(&f).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn compact_s_inverts_t(seed in 0u64..100_000) {
        let w = BasisWindow::new(2);
        let mut rng = seeded(seed);
        let (ctx, phi) = compact_context(w, random_unitary(&mut rng, w), 6).unwrap();
        let ps = PhiShift::new(ctx, phi, random_invertible(&mut rng, w, 1.0)).unwrap();
        let a = random_op(&mut rng, w);
        let st = ps.apply_s(&ps.apply_t(&a).unwrap()).unwrap();
        prop_assert!(st.max_abs_diff(&a) <= 1e-10);
        let ts = ps.apply_t(&ps.apply_s(&a).unwrap()).unwrap();
        prop_assert!(ts.max_abs_diff(&a) <= 1e-10);
    }
}

#[test]
fn compact_multiplier_matches_cyclic_shift_powers() {
    // b = W U, Phi = Ad U^*: Phi^{-n}(b) ... Phi^{-1}(b) = U^n W^n
    let w = BasisWindow::new(6);
    let u = UnitaryOp::cyclic_shift(w, 1).unwrap();
    let wt = cyclic_weighted_shift(w, 2.0).unwrap();
    let (ctx, phi) = compact_context(w, u.clone(), 4).unwrap();
    let ps = PhiShift::new(ctx, phi, wt.matmul(u.op()).unwrap()).unwrap();
    let sched = shiftlab_core::criteria::PowerSchedule::arithmetic(1, 1, 4).unwrap();
    let mut wn = wt.clone();
    for (n, (fwd, _)) in ps.multipliers(&sched).unwrap().into_iter().enumerate() {
        let expected = u.power(n as u64 + 1).unwrap().op().matmul(&wn).unwrap();
        assert!(fwd.max_abs_diff(&expected) <= 1e-12, "n = {}", n + 1);
        wn = wt.matmul(&wn).unwrap();
    }
    assert!(ps.apply_t_power(5, &wt).is_err());
}
