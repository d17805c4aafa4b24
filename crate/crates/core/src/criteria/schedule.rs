use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{projection_p, BasisWindow, CompactOp};

/// A strictly increasing schedule `t_1 < t_2 < ...` of positive powers.
///
/// Positions are 1-based: `t(1)` is the first entry. The schedule is taken to
/// already be the subsequence along which limits are examined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSchedule {
    t: Vec<usize>,
}

impl PowerSchedule {
    pub fn new(t: Vec<usize>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::Precondition("schedule is empty".into()));
        }
        if t[0] < 1 {
            return Err(Error::Precondition("schedule must start at t >= 1".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("schedule must be strictly increasing".into()));
        }
        Ok(Self { t })
    }

    /// `t_k = start + (k - 1) step`, `k = 1..=max_k`.
    pub fn arithmetic(start: usize, step: usize, max_k: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::Precondition("arithmetic step must be positive".into()));
        }
        Self::new((0..max_k).map(|i| start + i * step).collect())
    }

    /// `t_k = ceil(start * ratio^(k-1))`, bumped where needed to stay strictly increasing.
    pub fn geometric(start: usize, ratio: f64, max_k: usize) -> Result<Self> {
        if !(ratio > 1.0) {
            return Err(Error::Precondition("geometric ratio must exceed 1".into()));
        }
        let mut t: Vec<usize> = Vec::with_capacity(max_k);
        let mut x = start as f64;
        for _ in 0..max_k {
            let mut v = x.ceil() as usize;
            if let Some(&last) = t.last() {
                v = v.max(last + 1);
            }
            t.push(v);
            x *= ratio;
        }
        Self::new(t)
    }

    pub fn max_k(&self) -> usize {
        self.t.len()
    }

    /// `t_k` for 1-based `k`.
    pub fn t(&self, k: usize) -> usize {
        self.t[k - 1]
    }

    pub fn last(&self) -> usize {
        *self.t.last().expect("non-empty")
    }

    /// `(k, t_k)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.t.iter().enumerate().map(|(i, &t)| (i + 1, t))
    }

    pub fn ks(&self) -> Vec<usize> {
        (1..=self.t.len()).collect()
    }

    pub fn values(&self) -> &[usize] {
        &self.t
    }

    /// First `max_k` entries.
    pub fn truncated(&self, max_k: usize) -> Result<Self> {
        Self::new(self.t.iter().copied().take(max_k).collect())
    }
}

type ProviderFn = Arc<dyn Fn(i64, usize) -> Result<(CompactOp, CompactOp)> + Send + Sync>;

/// `(j, k) -> (D_j^(k), G_j^(k))` with a declared norm bound.
#[derive(Clone)]
pub struct ApproximantProvider {
    window: BasisWindow,
    f: ProviderFn,
    bound: f64,
    label: String,
}

impl fmt::Debug for ApproximantProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApproximantProvider")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .finish()
    }
}

impl ApproximantProvider {
    pub fn new<F>(window: BasisWindow, bound: f64, f: F) -> Self
    where
        F: Fn(i64, usize) -> Result<(CompactOp, CompactOp)> + Send + Sync + 'static,
    {
        Self {
            window,
            f: Arc::new(f),
            bound,
            label: "custom".into(),
        }
    }

    /// `D = G = P_m` for every `(j, k)`.
    pub fn constant_p(window: BasisWindow, m: usize) -> Result<Self> {
        let p = projection_p(window, m)?;
        Ok(Self::new(window, 1.0, move |_, _| Ok((p.clone(), p.clone()))).labeled("constant-P_m"))
    }

    /// `D = cD_0`, `G = cG_0` for another provider.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.f.clone();
        Self {
            window: self.window,
            f: Arc::new(move |j, k| {
                let (d, g) = inner(j, k)?;
                let c = Complex64::new(c, 0.0);
                Ok((d.scale(c)?, g.scale(c)?))
            }),
            bound: self.bound * c.abs(),
            label: format!("{}*{c}", self.label),
        }
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

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn get(&self, j: i64, k: usize) -> Result<(CompactOp, CompactOp)> {
        let (d, g) = (self.f)(j, k)?;
        for (name, op) in [("D", &d), ("G", &g)] {
            if op.window() != self.window {
                return Err(Error::Provider(format!("{name}_{j}^({k}) has the wrong window")));
            }
            let n = op.op_norm();
            if n > self.bound * (1.0 + 1e-10) + 1e-12 {
                return Err(Error::Provider(format!(
                    "|{name}_{j}^({k})| = {n} exceeds declared bound {}",
                    self.bound
                )));
            }
        }
        Ok((d, g))
    }
}

type VectorPair = (Vec<DVector<Complex64>>, Vec<DVector<Complex64>>);

/// Per-index finite sets of unit test vectors for the pointwise criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct TestVectorSets {
    window: BasisWindow,
    default: VectorPair,
    per_index: BTreeMap<i64, VectorPair>,
}

fn normalized(window: BasisWindow, vs: Vec<DVector<Complex64>>) -> Result<Vec<DVector<Complex64>>> {
    vs.into_iter()
        .map(|v| {
            if v.len() != window.dim() {
                return Err(Error::MalformedInput(format!(
                    "test vector has length {}, window needs {}",
                    v.len(),
                    window.dim()
                )));
            }
            let n = v.norm();
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::MalformedInput("test vector must be nonzero and finite".into()));
            }
            Ok(v / Complex64::new(n, 0.0))
        })
        .collect()
}

impl TestVectorSets {
    /// The same `(H1, H2)` for every index; vectors are normalized.
    pub fn uniform(
        window: BasisWindow,
        h1: Vec<DVector<Complex64>>,
        h2: Vec<DVector<Complex64>>,
    ) -> Result<Self> {
        Ok(Self {
            window,
            default: (normalized(window, h1)?, normalized(window, h2)?),
            per_index: BTreeMap::new(),
        })
    }

    /// Overrides the sets for index `j`.
    pub fn with_index(
        mut self,
        j: i64,
        h1: Vec<DVector<Complex64>>,
        h2: Vec<DVector<Complex64>>,
    ) -> Result<Self> {
        let sets = (normalized(self.window, h1)?, normalized(self.window, h2)?);
        self.per_index.insert(j, sets);
        Ok(self)
    }

    /// Basis vector `e_index`.
    pub fn basis_vector(window: BasisWindow, index: i64) -> Result<DVector<Complex64>> {
        let pos = window.position(index).ok_or(Error::IndexOutOfRange {
            index,
            lo: -(window.m_max() as i64),
            hi: window.m_max() as i64,
        })?;
        let mut v = DVector::zeros(window.dim());
        v[pos] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn window(&self) -> BasisWindow {
        self.window
    }

    pub fn h1(&self, j: i64) -> &[DVector<Complex64>] {
        &self.per_index.get(&j).unwrap_or(&self.default).0
    }

    pub fn h2(&self, j: i64) -> &[DVector<Complex64>] {
        &self.per_index.get(&j).unwrap_or(&self.default).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_validate() {
        assert!(PowerSchedule::new(vec![]).is_err());
        assert!(PowerSchedule::new(vec![0, 1]).is_err());
        assert!(PowerSchedule::new(vec![1, 1]).is_err());
        let s = PowerSchedule::arithmetic(3, 2, 4).unwrap();
        assert_eq!(s.values(), &[3, 5, 7, 9]);
        assert_eq!(s.t(1), 3);
        let g = PowerSchedule::geometric(1, 1.5, 6).unwrap();
        assert_eq!(g.values(), &[1, 2, 3, 4, 6, 8]);
    }

    #[test]
    fn provider_bound_is_enforced() {
        let w = BasisWindow::new(1);
        let p = ApproximantProvider::constant_p(w, 1).unwrap();
        assert!(p.get(0, 1).is_ok());
        assert!(p.scaled(2.0).get(0, 1).is_ok());
        let bad = ApproximantProvider::new(w, 1.0, move |_, _| {
            let a = CompactOp::scalar(w, Complex64::new(3.0, 0.0))?;
            Ok((a.clone(), a))
        });
        assert!(matches!(bad.get(0, 1), Err(Error::Provider(_))));
    }

    #[test]
    fn test_vectors_are_normalized() {
        let w = BasisWindow::new(1);
        let v = DVector::from_element(3, Complex64::new(2.0, 0.0));
        let tv = TestVectorSets::uniform(w, vec![v.clone()], vec![v]).unwrap();
        assert!((tv.h1(7)[0].norm() - 1.0).abs() < 1e-15);
        assert!(TestVectorSets::uniform(w, vec![DVector::zeros(3)], vec![]).is_err());
    }
}
