use crate::error::{Error, Result};
use crate::operator::{projection_p, unitary_defect, BasisWindow, CompactOp, UnitaryOp, UNITARY_TOLERANCE};

use super::{AlgebraContext, Automorphism};

/// `|P_m U^n P_m|` below this counts as zero.
pub const APERIODIC_TOL: f64 = 1e-12;

/// Matrices on a window. The truncation has `A = A_1`: every element is in the ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompactContext {
    window: BasisWindow,
}

impl CompactContext {
    pub fn new(window: BasisWindow) -> Self {
        Self { window }
    }

    pub fn window(&self) -> BasisWindow {
        self.window
    }
}

impl AlgebraContext for CompactContext {
    type Elem = CompactOp;

    fn mul(&self, a: &CompactOp, b: &CompactOp) -> Result<CompactOp> {
        a.matmul(b)
    }

    fn add(&self, a: &CompactOp, b: &CompactOp) -> Result<CompactOp> {
        a.add(b)
    }

    fn sub(&self, a: &CompactOp, b: &CompactOp) -> Result<CompactOp> {
        a.sub(b)
    }

    fn adjoint(&self, a: &CompactOp) -> CompactOp {
        a.adjoint()
    }

    fn norm(&self, a: &CompactOp) -> f64 {
        a.op_norm()
    }

    fn inverse(&self, a: &CompactOp) -> Result<CompactOp> {
        a.inverse()
    }

    fn unit(&self) -> CompactOp {
        CompactOp::identity(self.window)
    }

    fn zero(&self) -> CompactOp {
        CompactOp::zeros(self.window)
    }

    fn in_ideal(&self, a: &CompactOp) -> bool {
        a.window() == self.window
    }

    /// `P_m`.
    fn approx_unit(&self, m: usize) -> Result<CompactOp> {
        projection_p(self.window, m)
    }
}

/// `Phi(F) = U^* F U`, usable up to a declared power horizon.
#[derive(Debug, Clone)]
pub struct Conjugation {
    u: UnitaryOp,
    u_star: UnitaryOp,
    horizon: usize,
}

impl Conjugation {
    pub fn unitary(&self) -> &UnitaryOp {
        &self.u
    }

    /// `|P_m U^n P_m|` for `n = 1..=horizon`.
    pub fn overlaps(&self, m: usize) -> Result<Vec<f64>> {
        let pm = projection_p(self.u.window(), m)?;
        let mut un = CompactOp::identity(self.u.window());
        let mut out = Vec::with_capacity(self.horizon);
        for _ in 0..self.horizon {
            un = un.matmul(self.u.op())?;
            out.push(pm.matmul(&un)?.matmul(&pm)?.op_norm());
        }
        Ok(out)
    }
}

impl Automorphism for Conjugation {
    type Elem = CompactOp;

    fn forward(&self, a: &CompactOp) -> Result<CompactOp> {
        if self.u.is_identity() {
            return Ok(a.clone());
        }
        self.u_star.op().matmul(a)?.matmul(self.u.op())
    }

    fn backward(&self, a: &CompactOp) -> Result<CompactOp> {
        if self.u.is_identity() {
            return Ok(a.clone());
        }
        self.u.op().matmul(a)?.matmul(self.u_star.op())
    }

    fn horizon(&self) -> Option<usize> {
        Some(self.horizon)
    }

    /// Smallest `N` with `|P_m U^n P_m| < 1e-12` for every `n` in `[N, horizon]`.
    fn aperiodicity_horizon(&self, m: usize) -> Option<usize> {
        let overlaps = self.overlaps(m).ok()?;
        let last_bad = overlaps.iter().rposition(|&v| v >= APERIODIC_TOL);
        match last_bad {
            None => Some(1),
            Some(i) if i + 1 < overlaps.len() => Some(i + 2),
            Some(_) => None,
        }
    }
}

/// Matrices on `window` with `Phi = conjugation by U^*`, iterable up to `horizon`.
pub fn compact_context(window: BasisWindow, u: UnitaryOp, horizon: usize) -> Result<(CompactContext, Conjugation)> {
    window.ensure_same(&u.window())?;
    let defect = unitary_defect(u.op())?;
    if defect > UNITARY_TOLERANCE * window.dim() as f64 {
        return Err(Error::NotUnitary { defect });
    }
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be >= 1".into()));
    }
    let u_star = u.adjoint();
    Ok((CompactContext { window }, Conjugation { u, u_star, horizon }))
}
