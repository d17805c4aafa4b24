use crate::error::{Error, Result};
use crate::operator::INVERSION_THRESHOLD;

use super::{AlgebraContext, Automorphism};

/// A bounded real function on the integers that is constant outside a finite
/// block: `left` for `n < start`, `values[n - start]` inside, `right` beyond.
///
/// Finitely supported functions (both tails zero) form the ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqFn {
    start: i64,
    values: Vec<f64>,
    left: f64,
    right: f64,
}

impl SeqFn {
    pub fn new(start: i64, values: Vec<f64>, left: f64, right: f64) -> Result<Self> {
        if values.iter().chain([&left, &right]).any(|v| !v.is_finite()) {
            return Err(Error::MalformedInput("function values must be finite".into()));
        }
        Ok(Self {
            start,
            values,
            left,
            right,
        }
        .normalized())
    }

    /// Finitely supported: zero outside `start..start + values.len()`.
    pub fn finite(start: i64, values: Vec<f64>) -> Result<Self> {
        Self::new(start, values, 0.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            start: 0,
            values: Vec::new(),
            left: c,
            right: c,
        }
    }

    /// `nonneg` on `n >= 0`, `neg` on `n < 0`.
    pub fn by_sign(nonneg: f64, neg: f64) -> Self {
        Self {
            start: 0,
            values: Vec::new(),
            left: neg,
            right: nonneg,
        }
        .normalized()
    }

    /// Indicator of `[lo, hi]`.
    pub fn indicator(lo: i64, hi: i64) -> Self {
        let len = (hi - lo + 1).max(0) as usize;
        Self {
            start: lo,
            values: vec![1.0; len],
            left: 0.0,
            right: 0.0,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let lead = self.values.iter().take_while(|&&v| v == self.left).count();
        self.values.drain(..lead);
        self.start += lead as i64;
        while self.values.last() == Some(&self.right) {
            self.values.pop();
        }
        if self.values.is_empty() && self.left == self.right {
            self.start = 0;
        }
        self
    }

    fn end(&self) -> i64 {
        self.start + self.values.len() as i64
    }

    pub fn eval(&self, n: i64) -> f64 {
        if n < self.start {
            self.left
        } else if n >= self.end() {
            self.right
        } else {
            self.values[(n - self.start) as usize]
        }
    }

    /// Smallest and largest points where the function is nonzero, when finitely supported.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.left != 0.0 || self.right != 0.0 {
            return None;
        }
        let first = self.values.iter().position(|&v| v != 0.0)?;
        let last = self.values.iter().rposition(|&v| v != 0.0)?;
        Some((self.start + first as i64, self.start + last as i64))
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.left == 0.0 && self.right == 0.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .chain([&self.left, &self.right])
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            start: self.start,
            values: self.values.iter().map(|&v| f(v)).collect(),
            left: f(self.left),
            right: f(self.right),
        }
        .normalized()
    }

    pub fn zip_with(&self, other: &SeqFn, f: impl Fn(f64, f64) -> f64) -> Self {
        // tails switch at `start` even when the block is empty
        let lo = self.start.min(other.start);
        let hi = self.end().max(other.end());
        Self {
            start: lo,
            values: (lo..hi).map(|n| f(self.eval(n), other.eval(n))).collect(),
            left: f(self.left, other.left),
            right: f(self.right, other.right),
        }
        .normalized()
    }

    /// `n -> f(n - s)`.
    pub fn translated(&self, s: i64) -> Self {
        Self {
            start: self.start + s,
            ..self.clone()
        }
    }
}

/// `A_1` = bounded eventually-constant functions on the integers, `A` = finitely supported ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommutativeContext {
    window_size: usize,
}

impl CommutativeContext {
    pub fn window_size(&self) -> usize {
        self.window_size
    }
}

impl AlgebraContext for CommutativeContext {
    type Elem = SeqFn;

    fn mul(&self, a: &SeqFn, b: &SeqFn) -> Result<SeqFn> {
        Ok(a.zip_with(b, |x, y| x * y))
    }

    fn add(&self, a: &SeqFn, b: &SeqFn) -> Result<SeqFn> {
        Ok(a.zip_with(b, |x, y| x + y))
    }

    fn sub(&self, a: &SeqFn, b: &SeqFn) -> Result<SeqFn> {
        Ok(a.zip_with(b, |x, y| x - y))
    }

    fn adjoint(&self, a: &SeqFn) -> SeqFn {
        a.clone()
    }

    fn norm(&self, a: &SeqFn) -> f64 {
        a.sup_norm()
    }

    fn inverse(&self, a: &SeqFn) -> Result<SeqFn> {
        let min = a
            .values
            .iter()
            .chain([&a.left, &a.right])
            .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if !(min > INVERSION_THRESHOLD) {
            return Err(Error::Singular { sigma_min: min });
        }
        Ok(a.map(|v| 1.0 / v))
    }

    fn unit(&self) -> SeqFn {
        SeqFn::constant(1.0)
    }

    fn zero(&self) -> SeqFn {
        SeqFn::constant(0.0)
    }

    fn in_ideal(&self, a: &SeqFn) -> bool {
        a.is_finitely_supported()
    }

    /// Indicator of `K = [-rho, rho]`; `2 rho + 1` must fit in the window.
    fn approx_unit(&self, rho: usize) -> Result<SeqFn> {
        if 2 * rho + 1 > self.window_size {
            return Err(Error::WindowOverflow {
                m: rho,
                m_max: self.window_size.saturating_sub(1) / 2,
            });
        }
        Ok(SeqFn::indicator(-(rho as i64), rho as i64))
    }
}

/// `Phi(f) = f o alpha` with `alpha(n) = n - step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Translation {
    step: i64,
}

impl Translation {
    pub fn step(&self) -> i64 {
        self.step
    }
}

impl Automorphism for Translation {
    type Elem = SeqFn;

    fn forward(&self, a: &SeqFn) -> Result<SeqFn> {
        Ok(a.translated(self.step))
    }

    fn backward(&self, a: &SeqFn) -> Result<SeqFn> {
        Ok(a.translated(-self.step))
    }

    fn horizon(&self) -> Option<usize> {
        None
    }

    /// `K = [-rho, rho]` and `alpha^n(K)` are disjoint iff `n |step| > 2 rho`.
    fn aperiodicity_horizon(&self, rho: usize) -> Option<usize> {
        Some(2 * rho / self.step.unsigned_abs() as usize + 1)
    }
}

/// Bounded functions on the integers with the translation `alpha(n) = n - alpha_step`.
pub fn commutative_context(window_size: usize, alpha_step: i64) -> Result<(CommutativeContext, Translation)> {
    if alpha_step == 0 {
        return Err(Error::Precondition("translation step must be nonzero".into()));
    }
    if window_size == 0 {
        return Err(Error::Precondition("window must be nonempty".into()));
    }
    Ok((CommutativeContext { window_size }, Translation { step: alpha_step }))
}
