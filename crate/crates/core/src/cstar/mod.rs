//! The operator `T_{Phi,b}(a) = b Phi(a)` on an algebra `A_1` with an ideal `A`,
//! its inverse `S_{Phi,b}(a) = Phi^{-1}(b^{-1}) Phi^{-1}(a)`, and the
//! multiplier-decay criteria.

mod commutative;
mod compact;

pub use commutative::{commutative_context, CommutativeContext, SeqFn, Translation};
pub use compact::{compact_context, CompactContext, Conjugation, APERIODIC_TOL};

use std::fmt;
use std::marker::PhantomData;

use crate::criteria::{decide_common, ConditionKind, CriterionReport, PowerSchedule, Tracker};
use crate::error::{Error, Result};

/// Invertibility of `b` is accepted when `|b b^{-1} - 1|` and `|b^{-1} b - 1|` are below this.
pub const INVERTIBILITY_TOL: f64 = 1e-9;

/// A unital algebra `A_1` with a distinguished ideal `A` and an approximate unit of `A`.
pub trait AlgebraContext: Send + Sync {
    type Elem: Clone + fmt::Debug + Send + Sync;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn adjoint(&self, a: &Self::Elem) -> Self::Elem;
    fn norm(&self, a: &Self::Elem) -> f64;
    /// Inverse in `A_1`.
    fn inverse(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn unit(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    /// Membership in the ideal `A`.
    fn in_ideal(&self, a: &Self::Elem) -> bool;
    /// `p_alpha`: self-adjoint, `|p_alpha| <= 1`, with `p_alpha^2` an approximate unit.
    fn approx_unit(&self, alpha: usize) -> Result<Self::Elem>;
}

/// An isometric *-automorphism `Phi` of `A_1` with `Phi(A) = A`.
pub trait Automorphism: Send + Sync {
    type Elem;

    fn forward(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn backward(&self, a: &Self::Elem) -> Result<Self::Elem>;
    /// Largest power this automorphism may be iterated to, if limited.
    fn horizon(&self) -> Option<usize>;
    /// `N_alpha` with `Phi^n(p_alpha) p_alpha = 0` for `N_alpha <= n` (up to the horizon), if attained.
    fn aperiodicity_horizon(&self, alpha: usize) -> Option<usize>;
}

/// `Phi = id`.
pub struct IdentityAutomorphism<E>(PhantomData<fn() -> E>);

impl<E> IdentityAutomorphism<E> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<E> Default for IdentityAutomorphism<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E: Clone> Automorphism for IdentityAutomorphism<E> {
    type Elem = E;

    fn forward(&self, a: &E) -> Result<E> {
        Ok(a.clone())
    }

    fn backward(&self, a: &E) -> Result<E> {
        Ok(a.clone())
    }

    fn horizon(&self) -> Option<usize> {
        None
    }

    fn aperiodicity_horizon(&self, _alpha: usize) -> Option<usize> {
        None
    }
}

pub struct PhiShift<C: AlgebraContext, P: Automorphism<Elem = C::Elem>> {
    ctx: C,
    phi: P,
    b: C::Elem,
    b_inv: C::Elem,
}

impl<C: AlgebraContext, P: Automorphism<Elem = C::Elem>> fmt::Debug for PhiShift<C, P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiShift").field("b", &self.b).finish()
    }
}

impl<C: AlgebraContext, P: Automorphism<Elem = C::Elem>> PhiShift<C, P> {
    /// Fails unless `b` is invertible in `A_1`.
    pub fn new(ctx: C, phi: P, b: C::Elem) -> Result<Self> {
        let b_inv = ctx.inverse(&b)?;
        let one = ctx.unit();
        for prod in [ctx.mul(&b, &b_inv)?, ctx.mul(&b_inv, &b)?] {
            let defect = ctx.norm(&ctx.sub(&prod, &one)?);
            if !(defect <= INVERTIBILITY_TOL) {
                return Err(Error::Precondition(format!("b is not invertible (defect {defect:e})")));
            }
        }
        Ok(Self { ctx, phi, b, b_inv })
    }

    pub fn ctx(&self) -> &C {
        &self.ctx
    }

    pub fn phi(&self) -> &P {
        &self.phi
    }

    pub fn b(&self) -> &C::Elem {
        &self.b
    }

    pub fn b_inv(&self) -> &C::Elem {
        &self.b_inv
    }

    fn check_power(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Precondition("power must be >= 1".into()));
        }
        match self.phi.horizon() {
            Some(h) if n > h => Err(Error::HorizonExceeded { requested: n, horizon: h }),
            _ => Ok(()),
        }
    }

    /// `b Phi(a)`.
    pub fn apply_t(&self, a: &C::Elem) -> Result<C::Elem> {
        self.ctx.mul(&self.b, &self.phi.forward(a)?)
    }

    /// `Phi^{-1}(b^{-1}) Phi^{-1}(a)`.
    pub fn apply_s(&self, a: &C::Elem) -> Result<C::Elem> {
        self.ctx.mul(&self.phi.backward(&self.b_inv)?, &self.phi.backward(a)?)
    }

    /// `b Phi(b) ... Phi^{n-1}(b) Phi^n(a)`.
    pub fn apply_t_power(&self, n: usize, a: &C::Elem) -> Result<C::Elem> {
        self.check_power(n)?;
        let mut prefix = self.b.clone();
        let mut factor = self.b.clone();
        let mut image = self.phi.forward(a)?;
        for _ in 1..n {
            factor = self.phi.forward(&factor)?;
            prefix = self.ctx.mul(&prefix, &factor)?;
            image = self.phi.forward(&image)?;
        }
        self.ctx.mul(&prefix, &image)
    }

    /// `Phi^{-1}(b^{-1}) Phi^{-2}(b^{-1}) ... Phi^{-n}(b^{-1}) Phi^{-n}(a)`.
    pub fn apply_s_power(&self, n: usize, a: &C::Elem) -> Result<C::Elem> {
        self.check_power(n)?;
        let mut factor = self.phi.backward(&self.b_inv)?;
        let mut prefix = factor.clone();
        let mut image = self.phi.backward(a)?;
        for _ in 1..n {
            factor = self.phi.backward(&factor)?;
            prefix = self.ctx.mul(&prefix, &factor)?;
            image = self.phi.backward(&image)?;
        }
        self.ctx.mul(&prefix, &image)
    }

    /// `(Phi^{-n}(b) ... Phi^{-1}(b), Phi^{n-1}(b^{-1}) ... Phi(b^{-1}) b^{-1})` at every
    /// schedule power, grown one factor at a time.
    pub fn multipliers(&self, sched: &PowerSchedule) -> Result<Vec<(C::Elem, C::Elem)>> {
        self.check_power(sched.last())?;
        let mut fwd_factor = self.phi.backward(&self.b)?;
        let mut fwd = fwd_factor.clone();
        let mut inv_factor = self.b_inv.clone();
        let mut inv = inv_factor.clone();
        let mut n = 1;
        let mut out = Vec::with_capacity(sched.max_k());
        for (_, t) in sched.iter() {
            while n < t {
                fwd_factor = self.phi.backward(&fwd_factor)?;
                fwd = self.ctx.mul(&fwd_factor, &fwd)?;
                inv_factor = self.phi.forward(&inv_factor)?;
                inv = self.ctx.mul(&inv_factor, &inv)?;
                n += 1;
            }
            out.push((fwd.clone(), inv.clone()));
        }
        Ok(out)
    }

    fn aperiodicity_note(&self, alpha: usize) -> String {
        match self.phi.aperiodicity_horizon(alpha) {
            Some(n) => format!("aperiodicity horizon N = {n}"),
            None => "aperiodicity horizon not attained (not needed for the sufficient direction)".into(),
        }
    }
}

/// Records `|q_k - p^2|`, `|d_k - p^2|`, `|Phi^{-n}(b) ... Phi^{-1}(b) q_k|` and
/// `|Phi^{n-1}(b^{-1}) ... Phi(b^{-1}) b^{-1} d_k|` with `p = p_alpha`, `n = n_k`.
pub fn check_hc_criterion_phi<C, P, F>(
    ps: &PhiShift<C, P>,
    alpha: usize,
    sched: &PowerSchedule,
    provider: F,
    tol: f64,
) -> Result<CriterionReport>
where
    C: AlgebraContext,
    P: Automorphism<Elem = C::Elem>,
    F: Fn(usize) -> Result<(C::Elem, C::Elem)>,
{
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let ctx = ps.ctx();
    let p = ctx.approx_unit(alpha)?;
    let p2 = ctx.mul(&p, &p)?;
    let mut report = CriterionReport::new(
        "hc_criterion_phi",
        ConditionKind::Equivalence,
        "multiplier decay => hypercyclic; only this direction is exercised, the converse needs a hypercyclic vector",
        tol,
        sched.max_k(),
    );
    report.notes.push(ps.aperiodicity_note(alpha));
    let mut tracker = Tracker::new();
    let j = alpha as i64;
    for ((k, n), (fwd, inv)) in sched.iter().zip(ps.multipliers(sched)?) {
        let (q, d) = provider(k)?;
        if !ctx.in_ideal(&q) || !ctx.in_ideal(&d) {
            return Err(Error::Provider(format!("q_{k} or d_{k} is outside the ideal")));
        }
        let values = [
            ("approx_error_q", ctx.norm(&ctx.sub(&q, &p2)?)),
            ("approx_error_d", ctx.norm(&ctx.sub(&d, &p2)?)),
            ("forward_multiplier_decay", ctx.norm(&ctx.mul(&fwd, &q)?)),
            ("inverse_multiplier_decay", ctx.norm(&ctx.mul(&inv, &d)?)),
        ];
        for (name, v) in values {
            report.push(j, k, n, name, v);
            tracker.push(j, name, v);
        }
    }
    report.finish(decide_common(&sched.ks(), tracker.sequences(), tol));
    Ok(report)
}

/// Records `|Phi^{-n}(b) ... Phi^{-1}(b) x|` for `x in omega1` and
/// `|Phi^{n-1}(b^{-1}) ... b^{-1} y|` for `y in omega2`.
pub fn check_pointwise_multiplier<C, P>(
    ps: &PhiShift<C, P>,
    omega1: &[C::Elem],
    omega2: &[C::Elem],
    sched: &PowerSchedule,
    tol: f64,
) -> Result<CriterionReport>
where
    C: AlgebraContext,
    P: Automorphism<Elem = C::Elem>,
{
    if omega1.is_empty() || omega2.is_empty() {
        return Err(Error::Precondition("both element lists must be nonempty".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let ctx = ps.ctx();
    let mut report = CriterionReport::new(
        "pointwise_multiplier",
        ConditionKind::SufficientCondition,
        "pointwise multiplier decay on dense sets => hypercyclic",
        tol,
        sched.max_k(),
    );
    let mut tracker = Tracker::new();
    for ((k, n), (fwd, inv)) in sched.iter().zip(ps.multipliers(sched)?) {
        for (i, x) in omega1.iter().enumerate() {
            let name = format!("forward_pointwise_{i}");
            let v = ctx.norm(&ctx.mul(&fwd, x)?);
            report.push(0, k, n, &name, v);
            tracker.push(0, &name, v);
        }
        for (i, y) in omega2.iter().enumerate() {
            let name = format!("inverse_pointwise_{i}");
            let v = ctx.norm(&ctx.mul(&inv, y)?);
            report.push(0, k, n, &name, v);
            tracker.push(0, &name, v);
        }
    }
    report.finish(decide_common(&sched.ks(), tracker.sequences(), tol));
    Ok(report)
}

/// The pair `(q, d)` drawn from `omega1` and `omega2` closest to `p_alpha^2`.
pub fn corollary_provider<C: AlgebraContext>(
    ctx: &C,
    omega1: &[C::Elem],
    omega2: &[C::Elem],
    alpha: usize,
) -> Result<(C::Elem, C::Elem)> {
    let p = ctx.approx_unit(alpha)?;
    let p2 = ctx.mul(&p, &p)?;
    let closest = |set: &[C::Elem]| -> Result<C::Elem> {
        let mut best: Option<(f64, &C::Elem)> = None;
        for x in set {
            let dist = ctx.norm(&ctx.sub(x, &p2)?);
            if best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, x));
            }
        }
        best.map(|(_, x)| x.clone())
            .ok_or_else(|| Error::Precondition("element list is empty".into()))
    };
    Ok((closest(omega1)?, closest(omega2)?))
}
