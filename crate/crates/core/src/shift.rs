//! The generalized bilateral weighted shift
//! `(T x)_xi = W_xi x_{xi-1} U`, its inverse `(S y)_xi = W_{xi+1}^{-1} y_{xi+1} U^*`,
//! closed-form powers, and the averaged operator `C^(n) = (T^n + S^n) / 2`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::module_space::ModuleVector;
use crate::operator::{BasisWindow, CompactOp, UnitaryOp};

/// Relative slack allowed when checking declared weight bounds.
const BOUND_SLACK: f64 = 1e-10;

pub type WeightFn = Arc<dyn Fn(i64) -> Result<CompactOp> + Send + Sync>;

/// A total function `j -> W_j` with uniform bounds `|W_j| <= M`, `|W_j^{-1}| <= M_inv`.
///
/// Bounds are checked lazily on every weight actually requested. Inverses are
/// either computed (weights must then have `sigma_min > 1e-10`) or supplied
/// explicitly, which is how truncated translation families provide an inverse
/// that is exact away from the grid boundary.
#[derive(Clone)]
pub struct WeightFamily {
    window: BasisWindow,
    forward: WeightFn,
    inverse: Option<WeightFn>,
    bound: f64,
    inverse_bound: f64,
    label: String,
}

impl fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFamily")
            .field("label", &self.label)
            .field("m_max", &self.window.m_max())
            .field("bound", &self.bound)
            .field("inverse_bound", &self.inverse_bound)
            .field("supplied_inverse", &self.inverse.is_some())
            .finish()
    }
}

impl WeightFamily {
    pub fn new<F>(window: BasisWindow, bound: f64, inverse_bound: f64, weights: F) -> Self
    where
        F: Fn(i64) -> Result<CompactOp> + Send + Sync + 'static,
    {
        Self {
            window,
            forward: Arc::new(weights),
            inverse: None,
            bound,
            inverse_bound,
            label: "custom".into(),
        }
    }

    /// A family whose inverse weights are supplied rather than computed.
    pub fn with_supplied_inverse<F, G>(
        window: BasisWindow,
        bound: f64,
        inverse_bound: f64,
        weights: F,
        inverses: G,
    ) -> Self
    where
        F: Fn(i64) -> Result<CompactOp> + Send + Sync + 'static,
        G: Fn(i64) -> Result<CompactOp> + Send + Sync + 'static,
    {
        Self {
            inverse: Some(Arc::new(inverses)),
            ..Self::new(window, bound, inverse_bound, weights)
        }
    }

    /// `W_j = I` for every `j`.
    pub fn identity(window: BasisWindow) -> Self {
        Self::new(window, 1.0, 1.0, move |_| Ok(CompactOp::identity(window))).labeled("identity")
    }

    /// `W_j = W` for every `j`.
    pub fn constant(weight: CompactOp) -> Result<Self> {
        let window = weight.window();
        let bound = weight.op_norm();
        let inverse_bound = 1.0 / weight.lower_bound_m();
        weight.inverse()?;
        Ok(Self::new(window, bound, inverse_bound, move |_| Ok(weight.clone())).labeled("constant"))
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn window(&self) -> BasisWindow {
        self.window
    }

    /// Declared `M`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Declared `M_inv`.
    pub fn inverse_bound(&self) -> f64 {
        self.inverse_bound
    }

    pub fn has_supplied_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    fn check(&self, j: i64, what: &'static str, op: &CompactOp, bound: f64) -> Result<()> {
        self.window.ensure_same(&op.window())?;
        let value = op.op_norm();
        if value > bound * (1.0 + BOUND_SLACK) + BOUND_SLACK {
            return Err(Error::WeightBound { j, what, value, bound });
        }
        Ok(())
    }

    /// `W_j`, checked against `M`.
    pub fn weight(&self, j: i64) -> Result<CompactOp> {
        let w = (self.forward)(j)?;
        self.check(j, "norm", &w, self.bound)?;
        Ok(w)
    }

    /// `W_j^{-1}`, checked against `M_inv`.
    pub fn inverse_weight(&self, j: i64) -> Result<CompactOp> {
        let inv = match &self.inverse {
            Some(f) => f(j)?,
            None => self.weight(j)?.inverse()?,
        };
        self.check(j, "inverse norm", &inv, self.inverse_bound)?;
        Ok(inv)
    }

    /// `W_{j+n} W_{j+n-1} ... W_{j+1}`, multiplied out left to right.
    pub fn forward_product(&self, j: i64, n: usize) -> Result<CompactOp> {
        if n == 0 {
            return Err(Error::Precondition("forward product needs n >= 1".into()));
        }
        let n = n as i64;
        let mut acc = self.weight(j + n)?;
        for i in (j + 1..j + n).rev() {
            acc = acc.matmul(&self.weight(i)?)?;
        }
        Ok(acc)
    }

    /// `W_{j-n+1}^{-1} W_{j-n+2}^{-1} ... W_j^{-1}`, multiplied out left to right.
    pub fn inverse_product(&self, j: i64, n: usize) -> Result<CompactOp> {
        if n == 0 {
            return Err(Error::Precondition("inverse product needs n >= 1".into()));
        }
        let n = n as i64;
        let mut acc = self.inverse_weight(j - n + 1)?;
        for i in j - n + 2..=j {
            acc = acc.matmul(&self.inverse_weight(i)?)?;
        }
        Ok(acc)
    }
}

/// The operator `T_{U,W}` on the truncated module.
#[derive(Debug, Clone)]
pub struct ShiftOperator {
    weights: WeightFamily,
    unitary: UnitaryOp,
}

impl ShiftOperator {
    pub fn new(weights: WeightFamily, unitary: UnitaryOp) -> Result<Self> {
        weights.window().ensure_same(&unitary.window())?;
        Ok(Self { weights, unitary })
    }

    pub fn weights(&self) -> &WeightFamily {
        &self.weights
    }

    pub fn unitary(&self) -> &UnitaryOp {
        &self.unitary
    }

    pub fn window(&self) -> BasisWindow {
        self.weights.window()
    }

    fn right_mul(c: CompactOp, u: &UnitaryOp) -> Result<CompactOp> {
        if u.is_identity() {
            Ok(c)
        } else {
            c.matmul(u.op())
        }
    }

    /// `(T x)_xi = W_xi x_{xi-1} U`.
    pub fn apply_t(&self, x: &ModuleVector) -> Result<ModuleVector> {
        self.window().ensure_same(&x.window())?;
        let mut out = ModuleVector::zero(self.window());
        for (s, c) in x.iter() {
            let v = self.weights.weight(s + 1)?.matmul(c)?;
            out.insert(s + 1, Self::right_mul(v, &self.unitary)?);
        }
        Ok(out)
    }

    /// `(S y)_xi = W_{xi+1}^{-1} y_{xi+1} U^*`.
    pub fn apply_s(&self, y: &ModuleVector) -> Result<ModuleVector> {
        self.window().ensure_same(&y.window())?;
        let u_star = self.unitary.adjoint();
        let mut out = ModuleVector::zero(self.window());
        for (s, c) in y.iter() {
            let v = self.weights.inverse_weight(s)?.matmul(c)?;
            out.insert(s - 1, Self::right_mul(v, &u_star)?);
        }
        Ok(out)
    }

    /// `(T^n x)_xi = W_xi W_{xi-1} ... W_{xi-n+1} x_{xi-n} U^n`.
    pub fn apply_t_power(&self, n: usize, x: &ModuleVector) -> Result<ModuleVector> {
        if n == 0 {
            return Err(Error::Precondition("power must be >= 1".into()));
        }
        self.window().ensure_same(&x.window())?;
        let un = self.unitary.power(n as u64)?;
        let mut out = ModuleVector::zero(self.window());
        for (s, c) in x.iter() {
            let v = self.weights.forward_product(s, n)?.matmul(c)?;
            out.insert(s + n as i64, Self::right_mul(v, &un)?);
        }
        Ok(out)
    }

    /// `(S^n y)_xi = W_{xi+1}^{-1} ... W_{xi+n}^{-1} y_{xi+n} U^{*n}`.
    pub fn apply_s_power(&self, n: usize, y: &ModuleVector) -> Result<ModuleVector> {
        if n == 0 {
            return Err(Error::Precondition("power must be >= 1".into()));
        }
        self.window().ensure_same(&y.window())?;
        let un_star = self.unitary.adjoint().power(n as u64)?;
        let mut out = ModuleVector::zero(self.window());
        for (s, c) in y.iter() {
            let v = self.weights.inverse_product(s, n)?.matmul(c)?;
            out.insert(s - n as i64, Self::right_mul(v, &un_star)?);
        }
        Ok(out)
    }

    /// `C^(n) x = (T^n x + S^n x) / 2`.
    pub fn apply_c_avg(&self, n: usize, x: &ModuleVector) -> Result<ModuleVector> {
        let t = self.apply_t_power(n, x)?;
        let s = self.apply_s_power(n, x)?;
        t.add(&s)?.scale(Complex64::new(0.5, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::salas_weights;
    use crate::random::{random_invertible, random_module_vector, random_unitary, seeded};

    fn random_family(seed: u64, window: BasisWindow) -> WeightFamily {
        // a pure function of j: reseed per index
        WeightFamily::new(window, 1.45, 1.0 / 0.55, move |j| {
            let mut rng = seeded(seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            Ok(random_invertible(&mut rng, window, 1.0))
        })
    }

    #[test]
    fn identity_weights_translate() {
        let w = BasisWindow::new(1);
        let op = ShiftOperator::new(WeightFamily::identity(w), UnitaryOp::identity(w)).unwrap();
        let mut rng = seeded(1);
        let x = random_module_vector(&mut rng, w, -1..=2);
        assert_eq!(op.apply_t(&x).unwrap(), x.translate(1));
        assert_eq!(op.apply_s(&x).unwrap(), x.translate(-1));
        assert_eq!(op.apply_t_power(5, &x).unwrap(), x.translate(5));
        assert!(op.apply_t(&ModuleVector::zero(w)).unwrap().is_zero());
    }

    #[test]
    fn averaged_identity_splits_mass() {
        let w = BasisWindow::new(1);
        let op = ShiftOperator::new(WeightFamily::identity(w), UnitaryOp::identity(w)).unwrap();
        let x0 = CompactOp::identity(w);
        let x = ModuleVector::from_coeffs(w, [(0, x0.clone())]).unwrap();
        let c = op.apply_c_avg(3, &x).unwrap();
        assert_eq!(c.support(), vec![-3, 3]);
        let half = x0.scale(Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(c.get(3).unwrap(), &half);
        assert_eq!(c.get(-3).unwrap(), &half);
    }

    #[test]
    fn power_one_is_single_step() {
        let w = BasisWindow::new(2);
        let mut rng = seeded(4);
        let op = ShiftOperator::new(random_family(7, w), random_unitary(&mut rng, w)).unwrap();
        let x = random_module_vector(&mut rng, w, 0..=2);
        assert!(op.apply_t_power(1, &x).unwrap().max_coeff_diff(&op.apply_t(&x).unwrap()) < 1e-15);
        assert!(op.apply_s_power(1, &x).unwrap().max_coeff_diff(&op.apply_s(&x).unwrap()) < 1e-15);
        assert!(matches!(op.apply_t_power(0, &x), Err(Error::Precondition(_))));
    }

    #[test]
    fn salas_products() {
        let w = BasisWindow::new(2);
        let fam = salas_weights(w, 2.0).unwrap();
        for n in 1..30 {
            let expect = 2f64.powi(-(n as i32));
            for j in 0..3 {
                let f = fam.forward_product(j, n).unwrap();
                assert!((f.op_norm() / expect - 1.0).abs() <= 1e-12);
            }
            for j in -3..=-1 {
                let g = fam.inverse_product(j, n).unwrap();
                assert!((g.op_norm() / expect - 1.0).abs() <= 1e-12);
            }
        }
        assert_eq!(fam.forward_product(3, 1).unwrap(), fam.weight(4).unwrap());
        assert_eq!(fam.inverse_product(3, 1).unwrap(), fam.inverse_weight(3).unwrap());
    }

    #[test]
    fn inverse_product_inverts_reversed_forward_product() {
        let w = BasisWindow::new(2);
        let fam = random_family(21, w);
        for (j, n) in [(0, 1), (3, 4), (-2, 6)] {
            let inv = fam.inverse_product(j, n).unwrap();
            // W_j W_{j-1} ... W_{j-n+1} = forward_product(j - n, n)
            let fwd = fam.forward_product(j - n as i64, n).unwrap();
            let id = CompactOp::identity(w);
            assert!(inv.matmul(&fwd).unwrap().max_abs_diff(&id) <= 1e-9);
        }
    }

    #[test]
    fn bound_violation_is_reported() {
        let w = BasisWindow::new(1);
        let fam = WeightFamily::new(w, 1.0, 1.0, move |j| {
            CompactOp::scalar(w, Complex64::new(if j == 3 { 2.0 } else { 1.0 }, 0.0))
        });
        assert!(fam.weight(2).is_ok());
        assert!(matches!(fam.weight(3), Err(Error::WeightBound { j: 3, .. })));
        assert!(fam.forward_product(0, 5).is_err());
    }

    #[test]
    fn singular_weight_is_reported() {
        let w = BasisWindow::new(1);
        let fam = WeightFamily::new(w, 1.0, 1e12, move |_| crate::operator::projection_p(w, 0));
        assert!(matches!(fam.inverse_weight(0), Err(Error::Singular { .. })));
    }
}
