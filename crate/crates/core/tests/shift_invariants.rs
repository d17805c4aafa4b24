use num_complex::Complex64;
use proptest::prelude::*;
use shiftlab_core::constructions::{plain_translation_weights, salas_weights, GridModel, TranslationWeightParams, WeightProfile};
use shiftlab_core::module_space::ModuleVector;
use shiftlab_core::operator::{BasisWindow, CompactOp, UnitaryOp};
use shiftlab_core::random::{random_invertible, random_module_vector, random_unitary, seeded};
use shiftlab_core::shift::{ShiftOperator, WeightFamily};

fn random_family(seed: u64, window: BasisWindow) -> WeightFamily {
    WeightFamily::new(window, 1.45 + 1e-9, 1.0 / 0.55 + 1e-9, move |j| {
        let mut rng = seeded(seed.wrapping_mul(1_000_003).wrapping_add(j as u64));
        Ok(random_invertible(&mut rng, window, 1.0))
    })
}

fn random_operator(seed: u64, m_max: usize) -> (ShiftOperator, ModuleVector) {
    let w = BasisWindow::new(m_max);
    let mut rng = seeded(seed);
    let u = random_unitary(&mut rng, w);
    let x = random_module_vector(&mut rng, w, -3..=3);
    (ShiftOperator::new(random_family(seed, w), u).unwrap(), x)
}

#[test]
fn inverse_identities_on_random_vectors() {
    for seed in 0..30 {
        let (op, x) = random_operator(seed, 2);
        let st = op.apply_s(&op.apply_t(&x).unwrap()).unwrap();
        let ts = op.apply_t(&op.apply_s(&x).unwrap()).unwrap();
        assert!(st.max_coeff_diff(&x) <= 1e-10, "seed {seed}");
        assert!(ts.max_coeff_diff(&x) <= 1e-10, "seed {seed}");
    }
}

#[test]
fn scalar_weights_give_scalar_products() {
    // (T^n x)_xi = lambda-product * x_{xi-n}: W_j = 2 for j <= 0, 1/2 for j >= 1
    let w = BasisWindow::new(1);
    let op = ShiftOperator::new(salas_weights(w, 2.0).unwrap(), UnitaryOp::identity(w)).unwrap();
    let mut rng = seeded(4);
    let x = random_module_vector(&mut rng, w, -4..=4);
    for n in 1..=6usize {
        let tn = op.apply_t_power(n, &x).unwrap();
        for (xi, c) in x.iter() {
            let exponent: i32 = (xi + 1..=xi + n as i64).map(|j| if j <= 0 { 1 } else { -1 }).sum();
            let expected = c.scale(Complex64::new(2f64.powi(exponent), 0.0)).unwrap();
            let got = tn.coeff(xi + n as i64);
            assert!(got.max_abs_diff(&expected) <= 1e-12 * (1.0 + expected.frobenius()));
        }
    }
}

#[test]
fn unit_translation_is_an_isometry_inside_the_grid() {
    let grid = GridModel::new(10.0, 1.0).unwrap();
    let params = TranslationWeightParams {
        eps: 0.0,
        bound: 1.0,
        shifts: vec![1.0],
        profile: WeightProfile::ConstantBySign { nonneg: 1.0, neg: 1.0 },
    };
    let w = grid.window();
    let op = ShiftOperator::new(plain_translation_weights(&grid, &params).unwrap(), UnitaryOp::identity(w)).unwrap();
    let p = shiftlab_core::operator::projection_p(w, 2).unwrap();
    let mut rng = seeded(8);
    let x = random_module_vector(&mut rng, w, -2..=2).left_mul(&p).unwrap();
    for n in 1..=8 {
        let tx = op.apply_t_power(n, &x).unwrap();
        let sx = op.apply_s_power(n, &x).unwrap();
        assert!((tx.norm2() - x.norm2()).abs() <= 1e-12 * x.norm2());
        assert!((sx.norm2() - x.norm2()).abs() <= 1e-12 * x.norm2());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_bound_holds(seed in 0u64..10_000, m_max in 0usize..4) {
        let (op, x) = random_operator(seed, m_max);
        let tx = op.apply_t(&x).unwrap();
        let m = (-2..=4).map(|j| op.weights().weight(j).unwrap().op_norm()).fold(0.0, f64::max);
        prop_assert!(tx.norm2() <= m * x.norm2() + 1e-9);
    }

    #[test]
    fn powers_match_iteration(seed in 0u64..10_000, n in 1usize..6) {
        let (op, x) = random_operator(seed, 1);
        let mut t = x.clone();
        let mut s = x.clone();
        for _ in 0..n {
            t = op.apply_t(&t).unwrap();
            s = op.apply_s(&s).unwrap();
        }
        prop_assert!(op.apply_t_power(n, &x).unwrap().max_coeff_diff(&t) <= 1e-9);
        prop_assert!(op.apply_s_power(n, &x).unwrap().max_coeff_diff(&s) <= 1e-9);
    }

    #[test]
    fn powers_compose(seed in 0u64..10_000, a in 1usize..4, b in 1usize..4) {
        let (op, x) = random_operator(seed, 1);
        let lhs = op.apply_t_power(a, &op.apply_t_power(b, &x).unwrap()).unwrap();
        let rhs = op.apply_t_power(a + b, &x).unwrap();
        prop_assert!(lhs.max_coeff_diff(&rhs) <= 1e-9);
        let lhs = op.apply_s_power(a, &op.apply_s_power(b, &x).unwrap()).unwrap();
        let rhs = op.apply_s_power(a + b, &x).unwrap();
        prop_assert!(lhs.max_coeff_diff(&rhs) <= 1e-9);
    }

    #[test]
    fn t_is_linear_over_left_scalars(seed in 0u64..10_000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let (op, x) = random_operator(seed, 1);
        let c = Complex64::new(re, im);
        let lhs = op.apply_t(&x.scale(c).unwrap()).unwrap();
        let rhs = op.apply_t(&x).unwrap().scale(c).unwrap();
        prop_assert!(lhs.max_coeff_diff(&rhs) <= 1e-12 * (1.0 + c.norm()) * 8.0);
    }

    #[test]
    fn disjoint_supports_stay_orthogonal(seed in 0u64..10_000, n in 1usize..5) {
        let w = BasisWindow::new(1);
        let mut rng = seeded(seed);
        let x = random_module_vector(&mut rng, w, -2..=-1);
        let y = random_module_vector(&mut rng, w, 1..=2);
        let op = ShiftOperator::new(random_family(seed, w), random_unitary(&mut rng, w)).unwrap();
        let tx = op.apply_t_power(n, &x).unwrap();
        let ty = op.apply_t_power(n, &y).unwrap();
        prop_assert!(tx.inner_product(&ty).unwrap().op_norm() <= 1e-12);
    }

    #[test]
    fn module_norm_is_unitarily_invariant(seed in 0u64..10_000) {
        let w = BasisWindow::new(1);
        let mut rng = seeded(seed);
        let x = random_module_vector(&mut rng, w, -1..=1);
        let u = random_unitary(&mut rng, w);
        let ux = ModuleVector::from_coeffs(w, x.iter().map(|(xi, c)| (xi, c.matmul(u.op()).unwrap()))).unwrap();
        prop_assert!((ux.norm2() - x.norm2()).abs() <= 1e-10 * x.norm2());
    }
}

#[test]
fn identity_operator_products_are_identity() {
    let w = BasisWindow::new(2);
    let f = WeightFamily::identity(w);
    for j in -3..3 {
        assert_eq!(f.forward_product(j, 5).unwrap(), CompactOp::identity(w));
        assert_eq!(f.inverse_product(j, 5).unwrap(), CompactOp::identity(w));
    }
}
