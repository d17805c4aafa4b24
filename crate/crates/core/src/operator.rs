//! Dense complex matrices over a symmetric basis window.
//!
//! A [`BasisWindow`] with half-width `m_max` houses the basis vectors
//! `e_{-m_max}, ..., e_{m_max}`; every [`CompactOp`] is a `d x d` complex
//! matrix over such a window, `d = 2 m_max + 1`. Row and column `p` of the
//! matrix correspond to basis index `p - m_max`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold on `sigma_min` below which [`CompactOp::inverse`] refuses to invert.
pub const INVERSION_THRESHOLD: f64 = 1e-10;

/// Tolerance for `U*U = UU* = I` in operator norm.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// Largest dimension for which norms are computed with a full SVD.
const SVD_DIMENSION_LIMIT: usize = 256;
const POWER_ITERATION_TOL: f64 = 1e-12;
const POWER_ITERATION_MAX: usize = 10_000;
/// A dense unitary power is re-projected onto the unitaries this often.
const REUNITARIZE_EVERY: u64 = 64;

/// Basis indices `{-m_max, ..., m_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisWindow {
    m_max: usize,
}

impl BasisWindow {
    pub fn new(m_max: usize) -> Self {
        Self { m_max }
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn dim(&self) -> usize {
        2 * self.m_max + 1
    }

    /// Matrix position of basis index `index`, if it lies in the window.
    pub fn position(&self, index: i64) -> Option<usize> {
        let m = self.m_max as i64;
        (-m..=m).contains(&index).then(|| (index + m) as usize)
    }

    /// Basis index of matrix position `pos`.
    pub fn index(&self, pos: usize) -> i64 {
        pos as i64 - self.m_max as i64
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let m = self.m_max as i64;
        -m..=m
    }

    pub(crate) fn ensure_same(&self, other: &BasisWindow) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::WindowMismatch {
                left: self.m_max,
                right: other.m_max,
            })
        }
    }
}

/// A finite-rank stand-in for a compact operator: a dense complex matrix on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactOp {
    window: BasisWindow,
    mat: DMatrix<Complex64>,
}

fn ensure_finite(mat: &DMatrix<Complex64>) -> Result<()> {
    if mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::MalformedInput("matrix has non-finite entries".into()))
    }
}

impl CompactOp {
    pub fn new(window: BasisWindow, mat: DMatrix<Complex64>) -> Result<Self> {
        let d = window.dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::MalformedInput(format!(
                "expected {d}x{d} matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        ensure_finite(&mat)?;
        Ok(Self { window, mat })
    }

    /// Builds from separate real and imaginary parts, row-major.
    pub fn from_parts(window: BasisWindow, re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let d = window.dim();
        let shape_ok = |rows: &[Vec<f64>]| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !shape_ok(re) || !shape_ok(im) {
            return Err(Error::MalformedInput(format!(
                "real/imaginary parts must both be {d}x{d}"
            )));
        }
        let mat = DMatrix::from_fn(d, d, |r, c| Complex64::new(re[r][c], im[r][c]));
        Self::new(window, mat)
    }

    pub fn zeros(window: BasisWindow) -> Self {
        let d = window.dim();
        Self {
            window,
            mat: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(window: BasisWindow) -> Self {
        let d = window.dim();
        Self {
            window,
            mat: DMatrix::identity(d, d),
        }
    }

    pub fn scalar(window: BasisWindow, c: Complex64) -> Result<Self> {
        Self::identity(window).scale(c)
    }

    pub fn from_diagonal(window: BasisWindow, diag: &[Complex64]) -> Result<Self> {
        if diag.len() != window.dim() {
            return Err(Error::MalformedInput(format!(
                "diagonal has {} entries, window needs {}",
                diag.len(),
                window.dim()
            )));
        }
        Self::new(
            window,
            DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        )
    }

    pub fn from_real_diagonal(window: BasisWindow, diag: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(window, &diag)
    }

    /// Builds from a function of basis indices `(row, col)`.
    pub fn from_fn(window: BasisWindow, f: impl Fn(i64, i64) -> Complex64) -> Result<Self> {
        let d = window.dim();
        let mat = DMatrix::from_fn(d, d, |r, c| f(window.index(r), window.index(c)));
        Self::new(window, mat)
    }

    pub fn window(&self) -> BasisWindow {
        self.window
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    /// Entry at basis indices `(row, col)`; zero outside the window.
    pub fn entry(&self, row: i64, col: i64) -> Complex64 {
        match (self.window.position(row), self.window.position(col)) {
            (Some(r), Some(c)) => self.mat[(r, c)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matmul(&self, rhs: &CompactOp) -> Result<CompactOp> {
        self.window.ensure_same(&rhs.window)?;
        let mat = &self.mat * &rhs.mat;
        ensure_finite(&mat)?;
        Ok(Self {
            window: self.window,
            mat,
        })
    }

    pub fn add(&self, rhs: &CompactOp) -> Result<CompactOp> {
        self.window.ensure_same(&rhs.window)?;
        let mat = &self.mat + &rhs.mat;
        ensure_finite(&mat)?;
        Ok(Self {
            window: self.window,
            mat,
        })
    }

    pub fn sub(&self, rhs: &CompactOp) -> Result<CompactOp> {
        self.window.ensure_same(&rhs.window)?;
        let mat = &self.mat - &rhs.mat;
        ensure_finite(&mat)?;
        Ok(Self {
            window: self.window,
            mat,
        })
    }

    pub fn scale(&self, c: Complex64) -> Result<CompactOp> {
        let mat = &self.mat * c;
        ensure_finite(&mat)?;
        Ok(Self {
            window: self.window,
            mat,
        })
    }

    pub fn adjoint(&self) -> CompactOp {
        Self {
            window: self.window,
            mat: self.mat.adjoint(),
        }
    }

    /// `A h` for a vector of window coordinates.
    pub fn apply(&self, h: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if h.len() != self.window.dim() {
            return Err(Error::MalformedInput(format!(
                "vector has length {}, window needs {}",
                h.len(),
                self.window.dim()
            )));
        }
        Ok(&self.mat * h)
    }

    pub fn frobenius(&self) -> f64 {
        self.mat.norm()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CompactOp) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn is_diagonal(&self) -> bool {
        let d = self.mat.nrows();
        (0..d).all(|c| (0..d).all(|r| r == c || self.mat[(r, c)] == Complex64::new(0.0, 0.0)))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = if self.is_diagonal() {
            self.mat.diagonal().iter().map(|z| z.norm()).collect()
        } else {
            self.mat
                .clone()
                .svd(false, false)
                .singular_values
                .iter()
                .copied()
                .collect()
        };
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Operator norm: the largest singular value.
    pub fn op_norm(&self) -> f64 {
        if self.is_diagonal() {
            return self.mat.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        if self.window.dim() > SVD_DIMENSION_LIMIT {
            return self.power_iteration_norm();
        }
        self.mat
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// The lower bound `m(A) = sup{C : |Ah| >= C|h|}`, i.e. the smallest singular value.
    pub fn lower_bound_m(&self) -> f64 {
        if self.is_diagonal() {
            return self
                .mat
                .diagonal()
                .iter()
                .map(|z| z.norm())
                .fold(f64::INFINITY, f64::min);
        }
        self.mat
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    fn power_iteration_norm(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        let d = gram.nrows();
        // deterministic start vector with no symmetry against the basis
        let mut v = DVector::from_fn(d, |i, _| Complex64::new(1.0 + (i as f64).sin() * 0.5, 0.0));
        v /= Complex64::new(v.norm(), 0.0);
        let mut lambda = 0.0;
        for _ in 0..POWER_ITERATION_MAX {
            let w = &gram * &v;
            let next = w.norm();
            if next == 0.0 {
                return 0.0;
            }
            v = w / Complex64::new(next, 0.0);
            if (next - lambda).abs() <= POWER_ITERATION_TOL * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    /// Inverse, refusing when `sigma_min <= INVERSION_THRESHOLD`.
    pub fn inverse(&self) -> Result<CompactOp> {
        self.inverse_with_threshold(INVERSION_THRESHOLD)
    }

    pub fn inverse_with_threshold(&self, threshold: f64) -> Result<CompactOp> {
        let sigma_min = self.lower_bound_m();
        if sigma_min <= threshold {
            return Err(Error::Singular { sigma_min });
        }
        let mat = self
            .mat
            .clone()
            .try_inverse()
            .ok_or(Error::Singular { sigma_min })?;
        ensure_finite(&mat)?;
        Ok(Self {
            window: self.window,
            mat,
        })
    }
}

/// The orthogonal projection onto `span{e_{-m}, ..., e_m}`.
pub fn projection_p(window: BasisWindow, m: usize) -> Result<CompactOp> {
    if m > window.m_max() {
        return Err(Error::WindowOverflow {
            m,
            m_max: window.m_max(),
        });
    }
    let m = m as i64;
    let diag: Vec<f64> = window
        .indices()
        .map(|i| if i.abs() <= m { 1.0 } else { 0.0 })
        .collect();
    CompactOp::from_real_diagonal(window, &diag)
}

/// How a [`UnitaryOp`] was built; structured kinds have exact powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitaryKind {
    Identity,
    /// `U e_i = exp(i theta_i) e_i`, angles in radians ordered by basis index.
    DiagonalPhase { angles: Vec<f64> },
    /// `U e_p = e_{perm[p]}`, with `p` a matrix position.
    Permutation { perm: Vec<usize> },
    /// Any other unitary (e.g. a polar projection).
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    kind: UnitaryKind,
    op: CompactOp,
}

impl UnitaryOp {
    pub fn identity(window: BasisWindow) -> Self {
        Self {
            kind: UnitaryKind::Identity,
            op: CompactOp::identity(window),
        }
    }

    pub fn diagonal_phase(window: BasisWindow, angles: Vec<f64>) -> Result<Self> {
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::MalformedInput("non-finite phase angle".into()));
        }
        let diag: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        let op = CompactOp::from_diagonal(window, &diag)?;
        Ok(Self {
            kind: UnitaryKind::DiagonalPhase { angles },
            op,
        })
    }

    pub fn permutation(window: BasisWindow, perm: Vec<usize>) -> Result<Self> {
        let d = window.dim();
        let mut seen = vec![false; d];
        if perm.len() != d {
            return Err(Error::MalformedInput(format!(
                "permutation has {} entries, window needs {d}",
                perm.len()
            )));
        }
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::MalformedInput("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut mat = DMatrix::zeros(d, d);
        for (src, &dst) in perm.iter().enumerate() {
            mat[(dst, src)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self {
            kind: UnitaryKind::Permutation { perm },
            op: CompactOp::new(window, mat)?,
        })
    }

    /// Cyclic basis shift `e_i -> e_{i+s}` (indices wrap modulo the window).
    pub fn cyclic_shift(window: BasisWindow, s: i64) -> Result<Self> {
        let d = window.dim() as i64;
        let perm = (0..d).map(|p| (p + s).rem_euclid(d) as usize).collect();
        Self::permutation(window, perm)
    }

    /// Wraps a matrix that must already be unitary within [`UNITARY_TOLERANCE`].
    pub fn from_op(op: CompactOp) -> Result<Self> {
        let defect = unitary_defect(&op)?;
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self {
            kind: UnitaryKind::Dense,
            op,
        })
    }

    /// The unitary factor of the polar decomposition of an invertible `a`.
    pub fn polar(a: &CompactOp) -> Result<Self> {
        let svd = a.matrix().clone().svd(true, true);
        let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        if smin <= INVERSION_THRESHOLD {
            return Err(Error::Singular { sigma_min: smin });
        }
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(Error::MalformedInput("svd failed to produce vectors".into())),
        };
        Self::from_op(CompactOp::new(a.window(), u * v_t)?)
    }

    pub fn kind(&self) -> &UnitaryKind {
        &self.kind
    }

    pub fn op(&self) -> &CompactOp {
        &self.op
    }

    pub fn window(&self) -> BasisWindow {
        self.op.window()
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, UnitaryKind::Identity)
    }

    pub fn adjoint(&self) -> UnitaryOp {
        let op = self.op.adjoint();
        let kind = match &self.kind {
            UnitaryKind::Identity => UnitaryKind::Identity,
            UnitaryKind::DiagonalPhase { angles } => UnitaryKind::DiagonalPhase {
                angles: angles.iter().map(|a| -a).collect(),
            },
            UnitaryKind::Permutation { perm } => {
                let mut inv = vec![0; perm.len()];
                for (src, &dst) in perm.iter().enumerate() {
                    inv[dst] = src;
                }
                UnitaryKind::Permutation { perm: inv }
            }
            UnitaryKind::Dense => UnitaryKind::Dense,
        };
        UnitaryOp { kind, op }
    }

    /// `U^n`. Structured kinds are exact; dense unitaries are multiplied out
    /// and re-projected onto the unitaries every 64 factors.
    pub fn power(&self, n: u64) -> Result<UnitaryOp> {
        let window = self.window();
        match &self.kind {
            UnitaryKind::Identity => Ok(self.clone()),
            _ if n == 0 => Ok(UnitaryOp::identity(window)),
            UnitaryKind::DiagonalPhase { angles } => {
                let angles = angles
                    .iter()
                    .map(|a| (a * n as f64).rem_euclid(std::f64::consts::TAU))
                    .collect();
                UnitaryOp::diagonal_phase(window, angles)
            }
            UnitaryKind::Permutation { perm } => {
                let d = perm.len();
                // cycle decomposition gives perm^n without n compositions
                let mut out = vec![0; d];
                let mut visited = vec![false; d];
                for start in 0..d {
                    if visited[start] {
                        continue;
                    }
                    let mut cycle = vec![start];
                    visited[start] = true;
                    let mut p = perm[start];
                    while p != start {
                        visited[p] = true;
                        cycle.push(p);
                        p = perm[p];
                    }
                    let len = cycle.len();
                    let step = (n % len as u64) as usize;
                    for (i, &p) in cycle.iter().enumerate() {
                        out[p] = cycle[(i + step) % len];
                    }
                }
                UnitaryOp::permutation(window, out)
            }
            UnitaryKind::Dense => {
                let mut acc = self.op.clone();
                for i in 1..n {
                    acc = acc.matmul(&self.op)?;
                    if (i + 1) % REUNITARIZE_EVERY == 0 {
                        acc = UnitaryOp::polar(&acc)?.op;
                    }
                }
                Ok(UnitaryOp {
                    kind: UnitaryKind::Dense,
                    op: acc,
                })
            }
        }
    }
}

/// `max(|U*U - I|, |UU* - I|)` in operator norm.
pub fn unitary_defect(u: &CompactOp) -> Result<f64> {
    let id = CompactOp::identity(u.window());
    let a = u.adjoint().matmul(u)?.sub(&id)?.op_norm();
    let b = u.matmul(&u.adjoint())?.sub(&id)?.op_norm();
    Ok(a.max(b))
}
