//! Truncated standard Hilbert module over the compact operators.
//!
//! A [`ModuleVector`] is a finitely supported sequence `(x_xi)_{xi in Z}` of
//! [`CompactOp`] coefficients. The module carries the operator-valued inner
//! product `<x, y> = sum_xi x_xi^* y_xi` and the norm `|x|_2 = |<x, x>|^{1/2}`.
//! Support is stored sparsely, so shifts never wrap around.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{projection_p, BasisWindow, CompactOp};

/// Coefficients with operator norm at or below this are not stored.
pub const STORAGE_THRESHOLD: f64 = 1e-15;

/// The symmetric index range `[J] = {-J, ..., J}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRange(pub usize);

impl IndexRange {
    pub fn contains(&self, j: i64) -> bool {
        j.unsigned_abs() as usize <= self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        let j = self.0 as i64;
        -j..=j
    }

    pub fn len(&self) -> usize {
        2 * self.0 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn negligible(op: &CompactOp) -> bool {
    let fro = op.frobenius();
    if fro <= STORAGE_THRESHOLD {
        return true;
    }
    // |A| <= |A|_F <= sqrt(d) |A|, so only this band needs the exact norm
    if fro > STORAGE_THRESHOLD * (op.window().dim() as f64).sqrt() {
        return false;
    }
    op.op_norm() <= STORAGE_THRESHOLD
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    window: BasisWindow,
    coeffs: BTreeMap<i64, CompactOp>,
}

impl ModuleVector {
    pub fn zero(window: BasisWindow) -> Self {
        Self {
            window,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(
        window: BasisWindow,
        coeffs: impl IntoIterator<Item = (i64, CompactOp)>,
    ) -> Result<Self> {
        let mut x = Self::zero(window);
        for (xi, c) in coeffs {
            let prev = x.coeffs.remove(&xi);
            let c = match prev {
                Some(p) => p.add(&c)?,
                None => {
                    window.ensure_same(&c.window())?;
                    c
                }
            };
            x.insert(xi, c);
        }
        Ok(x)
    }

    /// Stores `c` at `xi` unless it is negligible. Caller guarantees the window.
    pub(crate) fn insert(&mut self, xi: i64, c: CompactOp) {
        if negligible(&c) {
            self.coeffs.remove(&xi);
        } else {
            self.coeffs.insert(xi, c);
        }
    }

    pub fn window(&self) -> BasisWindow {
        self.window
    }

    /// Coefficient at `xi`, if stored.
    pub fn get(&self, xi: i64) -> Option<&CompactOp> {
        self.coeffs.get(&xi)
    }

    /// Coefficient at `xi`, zero if absent.
    pub fn coeff(&self, xi: i64) -> CompactOp {
        self.coeffs
            .get(&xi)
            .cloned()
            .unwrap_or_else(|| CompactOp::zeros(self.window))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &CompactOp)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `<x, y> = sum_xi x_xi^* y_xi`.
    pub fn inner_product(&self, other: &ModuleVector) -> Result<CompactOp> {
        self.window.ensure_same(&other.window)?;
        let mut acc = CompactOp::zeros(self.window);
        for (xi, a) in &self.coeffs {
            if let Some(b) = other.coeffs.get(xi) {
                acc = acc.add(&a.adjoint().matmul(b)?)?;
            }
        }
        Ok(acc)
    }

    pub fn norm2(&self) -> f64 {
        match self.inner_product(self) {
            Ok(g) => g.op_norm().sqrt(),
            Err(_) => unreachable!("a vector always shares its own window"),
        }
    }

    pub fn add(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.combine(other, |a, b| a.sub(b))
    }

    fn combine(
        &self,
        other: &ModuleVector,
        f: impl Fn(&CompactOp, &CompactOp) -> Result<CompactOp>,
    ) -> Result<ModuleVector> {
        self.window.ensure_same(&other.window)?;
        let zero = CompactOp::zeros(self.window);
        let mut out = ModuleVector::zero(self.window);
        let keys: std::collections::BTreeSet<i64> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .collect();
        for xi in keys {
            let a = self.coeffs.get(&xi).unwrap_or(&zero);
            let b = other.coeffs.get(&xi).unwrap_or(&zero);
            out.insert(xi, f(a, b)?);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Result<ModuleVector> {
        let mut out = ModuleVector::zero(self.window);
        for (&xi, a) in &self.coeffs {
            out.insert(xi, a.scale(c)?);
        }
        Ok(out)
    }

    pub fn distance(&self, other: &ModuleVector) -> Result<f64> {
        Ok(self.sub(other)?.norm2())
    }

    /// Left-multiplies every coefficient by `a`.
    pub fn left_mul(&self, a: &CompactOp) -> Result<ModuleVector> {
        let mut out = ModuleVector::zero(self.window);
        for (&xi, c) in &self.coeffs {
            out.insert(xi, a.matmul(c)?);
        }
        Ok(out)
    }

    /// Translates the support by `by` without touching coefficients.
    pub fn translate(&self, by: i64) -> ModuleVector {
        ModuleVector {
            window: self.window,
            coeffs: self.coeffs.iter().map(|(&k, v)| (k + by, v.clone())).collect(),
        }
    }

    /// Largest entrywise coefficient difference over the union of supports.
    pub fn max_coeff_diff(&self, other: &ModuleVector) -> f64 {
        let zero = CompactOp::zeros(self.window);
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|xi| {
                let a = self.coeffs.get(xi).unwrap_or(&zero);
                let b = other.coeffs.get(xi).unwrap_or(&zero);
                a.max_abs_diff(b)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModuleVectorDoc::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModuleVectorDoc =
            serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
        doc.try_into()
    }
}

/// An element of the dense class: `x_j = P_m coeffs[j]` on `[J]`, zero elsewhere.
pub fn dense_class_element(
    window: BasisWindow,
    range: IndexRange,
    m: usize,
    coeffs: impl IntoIterator<Item = (i64, CompactOp)>,
) -> Result<ModuleVector> {
    let p = projection_p(window, m)?;
    let mut x = ModuleVector::zero(window);
    for (j, c) in coeffs {
        if !range.contains(j) {
            let r = range.0 as i64;
            return Err(Error::IndexOutOfRange {
                index: j,
                lo: -r,
                hi: r,
            });
        }
        window.ensure_same(&c.window())?;
        x.insert(j, p.matmul(&c)?);
    }
    Ok(x)
}

/// `P~_{J,m}`: coefficient `P_m` on `[J]`, zero elsewhere.
pub fn ptilde(window: BasisWindow, range: IndexRange, m: usize) -> Result<ModuleVector> {
    let p = projection_p(window, m)?;
    ModuleVector::from_coeffs(window, range.iter().map(|j| (j, p.clone())))
}

/// Whether `x` is supported in `[J]` with `x_j = P_m x_j` to within `tol` entrywise.
pub fn in_dense_class(x: &ModuleVector, range: IndexRange, m: usize, tol: f64) -> Result<bool> {
    let p = projection_p(x.window(), m)?;
    for (xi, c) in x.iter() {
        if !range.contains(xi) || p.matmul(c)?.max_abs_diff(c) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Serialize, Deserialize)]
struct CoeffDoc {
    xi: i64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModuleVectorDoc {
    m_max: usize,
    coeffs: Vec<CoeffDoc>,
}

impl From<&ModuleVector> for ModuleVectorDoc {
    fn from(x: &ModuleVector) -> Self {
        let d = x.window.dim();
        let coeffs = x
            .iter()
            .map(|(xi, c)| {
                let m = c.matrix();
                CoeffDoc {
                    xi,
                    re: (0..d).map(|r| (0..d).map(|k| m[(r, k)].re).collect()).collect(),
                    im: (0..d).map(|r| (0..d).map(|k| m[(r, k)].im).collect()).collect(),
                }
            })
            .collect();
        Self {
            m_max: x.window.m_max(),
            coeffs,
        }
    }
}

impl TryFrom<ModuleVectorDoc> for ModuleVector {
    type Error = Error;

    fn try_from(doc: ModuleVectorDoc) -> Result<Self> {
        let window = BasisWindow::new(doc.m_max);
        let coeffs = doc
            .coeffs
            .into_iter()
            .map(|c| Ok((c.xi, CompactOp::from_parts(window, &c.re, &c.im)?)))
            .collect::<Result<Vec<_>>>()?;
        ModuleVector::from_coeffs(window, coeffs)
    }
}
