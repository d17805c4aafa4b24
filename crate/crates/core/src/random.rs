//! Seeded random fixtures shared by tests, acceptance runs and the CLI.

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::module_space::{dense_class_element, IndexRange, ModuleVector};
use crate::operator::{BasisWindow, CompactOp, UnitaryOp};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Matrix with independent entries uniform in the unit square.
pub fn random_op<R: Rng>(rng: &mut R, window: BasisWindow) -> CompactOp {
    let d = window.dim();
    let mat = DMatrix::from_fn(d, d, |_, _| unit_complex(rng));
    CompactOp::new(window, mat).expect("finite entries")
}

pub fn random_vector<R: Rng>(rng: &mut R, window: BasisWindow) -> DVector<Complex64> {
    DVector::from_fn(window.dim(), |_, _| unit_complex(rng))
}

/// Unitary from the polar factor of a random matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, window: BasisWindow) -> UnitaryOp {
    loop {
        if let Ok(u) = UnitaryOp::polar(&random_op(rng, window)) {
            return u;
        }
    }
}

/// `c I + E` with `|E| < c / 2`, hence invertible with controlled bounds.
pub fn random_invertible<R: Rng>(rng: &mut R, window: BasisWindow, c: f64) -> CompactOp {
    let e = random_op(rng, window);
    let scale = 0.45 * c / e.op_norm().max(f64::MIN_POSITIVE);
    CompactOp::identity(window)
        .scale(Complex64::new(c, 0.0))
        .and_then(|a| a.add(&e.scale(Complex64::new(scale, 0.0))?))
        .expect("finite entries")
}

pub fn random_module_vector<R: Rng>(
    rng: &mut R,
    window: BasisWindow,
    support: RangeInclusive<i64>,
) -> ModuleVector {
    ModuleVector::from_coeffs(window, support.map(|xi| (xi, random_op(rng, window))))
        .expect("shared window")
}

/// Random element of the dense class for `[J]` and `P_m`.
pub fn random_dense_class<R: Rng>(
    rng: &mut R,
    window: BasisWindow,
    range: IndexRange,
    m: usize,
) -> ModuleVector {
    let coeffs: Vec<_> = range.iter().map(|j| (j, random_op(rng, window))).collect();
    dense_class_element(window, range, m, coeffs).expect("m within window")
}
