use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{BasisWindow, CompactOp};
use crate::shift::WeightFamily;

const ALIGN_TOL: f64 = 1e-9;
const SIGN_SLACK: f64 = 1e-12;

/// Uniform grid `t_i = i h`, `|t_i| <= L`, with grid index `i` identified with basis index `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridModel {
    half_width: f64,
    h: f64,
    n: usize,
}

impl GridModel {
    /// `L / h` must be a nonnegative integer `N`; the window is then `m_max = N`.
    pub fn new(half_width: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() || !(half_width >= 0.0) || !half_width.is_finite() {
            return Err(Error::Precondition(format!("bad grid (L = {half_width}, h = {h})")));
        }
        let ratio = half_width / h;
        let n = ratio.round();
        if (ratio - n).abs() > ALIGN_TOL * ratio.max(1.0) {
            return Err(Error::Precondition(format!("L / h = {ratio} is not an integer")));
        }
        Ok(Self {
            half_width,
            h,
            n: n as usize,
        })
    }

    /// Unit-step grid on a window: `t_i = i`.
    pub fn unit(window: BasisWindow) -> Self {
        Self {
            half_width: window.m_max() as f64,
            h: 1.0,
            n: window.m_max(),
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn window(&self) -> BasisWindow {
        BasisWindow::new(self.n)
    }

    pub fn point(&self, i: i64) -> f64 {
        i as f64 * self.h
    }

    /// `r / h` as an integer; fails unless `r` is grid-aligned.
    pub fn steps(&self, r: f64) -> Result<usize> {
        let q = r / self.h;
        let n = q.round();
        if !(r > 0.0) || (q - n).abs() > ALIGN_TOL * q.max(1.0) {
            return Err(Error::Precondition(format!(
                "translation {r} is not a positive multiple of h = {}",
                self.h
            )));
        }
        Ok(n as usize)
    }
}

/// Grid functions `w_j`, chosen by the sign of `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightProfile {
    /// `w_j = nonneg` for `j >= 0`, `w_j = neg` for `j < 0`, constant in `t`.
    ConstantBySign { nonneg: f64, neg: f64 },
    /// `w_j(t) = right` for `t >= 0`, `left` for `t < 0`, for every `j`.
    Step { right: f64, left: f64 },
    /// For `j >= 0`: `low` on `t >= 0`, rising linearly to `high` over `[-ramp, 0)`.
    /// For `j < 0`: `high` on `t < 0`, falling linearly to `low` over `[0, ramp)`.
    Plateau { low: f64, high: f64, ramp: f64 },
    /// Explicit values at the grid points, ordered from `t = -L` to `t = L`.
    Explicit { nonneg: Vec<f64>, neg: Vec<f64> },
}

impl WeightProfile {
    fn value(&self, j: i64, t: f64, pos: usize) -> f64 {
        match self {
            WeightProfile::ConstantBySign { nonneg, neg } => {
                if j >= 0 {
                    *nonneg
                } else {
                    *neg
                }
            }
            WeightProfile::Step { right, left } => {
                if t >= 0.0 {
                    *right
                } else {
                    *left
                }
            }
            WeightProfile::Plateau { low, high, ramp } => {
                if j >= 0 {
                    if t >= 0.0 {
                        *low
                    } else {
                        low + (high - low) * (-t / ramp).min(1.0)
                    }
                } else if t < 0.0 {
                    *high
                } else {
                    high + (low - high) * (t / ramp).min(1.0)
                }
            }
            WeightProfile::Explicit { nonneg, neg } => {
                if j >= 0 {
                    nonneg[pos]
                } else {
                    neg[pos]
                }
            }
        }
    }
}

/// Weighted translations `(W_j f)(t) = w_j(t) f(t - r_j)` on a grid.
///
/// `r_j = shifts[j mod shifts.len()]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationWeightParams {
    pub eps: f64,
    /// `M`: pointwise `1/M <= w_j <= M`.
    pub bound: f64,
    pub shifts: Vec<f64>,
    pub profile: WeightProfile,
}

impl TranslationWeightParams {
    /// `w_j = (1 - eps)` for `j >= 0`, `1 / (1 - eps)` for `j < 0`, unit shift.
    pub fn constant_by_sign(eps: f64, h: f64) -> Self {
        let low = 1.0 - eps;
        Self {
            eps,
            bound: 1.0 / low,
            shifts: vec![h],
            profile: WeightProfile::ConstantBySign {
                nonneg: low,
                neg: 1.0 / low,
            },
        }
    }

    pub fn shift_at(&self, j: i64) -> f64 {
        self.shifts[j.rem_euclid(self.shifts.len() as i64) as usize]
    }

    /// `min_j r_j`, the constant `C`.
    pub fn min_shift(&self) -> f64 {
        self.shifts.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn weight_value(&self, grid: &GridModel, j: i64, i: i64) -> f64 {
        let pos = (i + grid.n as i64) as usize;
        self.profile.value(j, grid.point(i), pos)
    }

    /// Checks `0 < eps < 1` and the sign inequalities
    /// `w_j <= 1 - eps` on `t >= 0` for `j >= 0`, `w_j >= 1 + eps` on `t < 0` for `j < 0`,
    /// on top of [`Self::validate_structure`].
    pub fn validate(&self, grid: &GridModel) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Precondition(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        self.validate_structure(grid)?;
        let n = grid.n as i64;
        for j in [0i64, -1] {
            for i in -n..=n {
                let w = self.weight_value(grid, j, i);
                let t = grid.point(i);
                let ok = if j >= 0 {
                    t < 0.0 || w <= 1.0 - self.eps + SIGN_SLACK
                } else {
                    t >= 0.0 || w >= 1.0 + self.eps - SIGN_SLACK
                };
                if !ok {
                    return Err(Error::Precondition(format!(
                        "w_{j}(t = {t}) = {w} violates the sign inequality for eps = {}",
                        self.eps
                    )));
                }
            }
        }
        Ok(())
    }

    /// `M >= 1`, grid-aligned positive shifts and `1/M <= w_j <= M` pointwise.
    pub fn validate_structure(&self, grid: &GridModel) -> Result<()> {
        if !(self.bound >= 1.0) || !self.bound.is_finite() {
            return Err(Error::Precondition(format!("M must be >= 1, got {}", self.bound)));
        }
        if self.shifts.is_empty() {
            return Err(Error::Precondition("at least one shift is required".into()));
        }
        for &r in &self.shifts {
            grid.steps(r)?;
        }
        if let WeightProfile::Explicit { nonneg, neg } = &self.profile {
            let d = grid.window().dim();
            if nonneg.len() != d || neg.len() != d {
                return Err(Error::MalformedInput(format!("explicit weights need {d} grid values")));
            }
        }
        if let WeightProfile::Plateau { ramp, .. } = &self.profile {
            if !(*ramp > 0.0) {
                return Err(Error::Precondition("plateau ramp must be positive".into()));
            }
        }
        let n = grid.n as i64;
        for j in [0i64, -1] {
            for i in -n..=n {
                let w = self.weight_value(grid, j, i);
                if !(w.is_finite() && w * self.bound >= 1.0 - SIGN_SLACK && w <= self.bound * (1.0 + SIGN_SLACK)) {
                    return Err(Error::Precondition(format!(
                        "w_{j}(t = {}) = {w} outside [1/M, M] for M = {}",
                        grid.point(i),
                        self.bound
                    )));
                }
            }
        }
        Ok(())
    }
}

fn translation_matrix(grid: &GridModel, params: &TranslationWeightParams, j: i64, s: i64) -> Result<CompactOp> {
    CompactOp::from_fn(grid.window(), |row, col| {
        if col == row - s {
            Complex64::new(params.weight_value(grid, j, row), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn translation_inverse(grid: &GridModel, params: &TranslationWeightParams, j: i64, s: i64) -> Result<CompactOp> {
    CompactOp::from_fn(grid.window(), |row, col| {
        if col == row + s {
            Complex64::new(1.0 / params.weight_value(grid, j, col), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// The truncated family `W_j f = w_j (f o alpha_j)`, `alpha_j(t) = t - r_j`.
///
/// Matrix entries are `W_j[i][i - s_j] = w_j(t_i)` with `s_j = r_j / h`; mass
/// shifted past the grid edge is dropped. The supplied inverse
/// `W_j^{-1}[i][i + s_j] = 1 / w_j(t_{i+s_j})` is exact on vectors whose support
/// stays inside the grid, see [`safe_horizon`].
pub fn translation_weights(grid: &GridModel, params: &TranslationWeightParams) -> Result<WeightFamily> {
    params.validate(grid)?;
    build_translation(grid, params)
}

/// As [`translation_weights`] without the sign inequalities, e.g. `w_j = 1`
/// for a pure translation; `eps` is ignored.
pub fn plain_translation_weights(grid: &GridModel, params: &TranslationWeightParams) -> Result<WeightFamily> {
    params.validate_structure(grid)?;
    build_translation(grid, params)
}

fn build_translation(grid: &GridModel, params: &TranslationWeightParams) -> Result<WeightFamily> {
    let (g1, p1) = (*grid, params.clone());
    let (g2, p2) = (*grid, params.clone());
    Ok(WeightFamily::with_supplied_inverse(
        grid.window(),
        params.bound,
        params.bound,
        move |j| translation_matrix(&g1, &p1, j, g1.steps(p1.shift_at(j))? as i64),
        move |j| translation_inverse(&g2, &p2, j, g2.steps(p2.shift_at(j))? as i64),
    )
    .labeled("translation"))
}

/// Multiplication weights off two index subsequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedParams {
    /// `{n_k}`: nonnegative indices carrying translation weights.
    pub forward_indices: Vec<i64>,
    /// `{n_i}`: indices `-n_i` carry translation weights.
    pub backward_indices: Vec<i64>,
    /// Multiplier for `j >= 0` elsewhere, in `[1/M, 1]`.
    pub mult_nonneg: f64,
    /// Multiplier for `j < 0` elsewhere, in `[1, M]`.
    pub mult_neg: f64,
}

/// Translation weights on `{n_k} u {-n_i}`, multiplication `W_j f = w_j f` elsewhere.
pub fn mixed_weights(grid: &GridModel, params: &TranslationWeightParams, mixed: &MixedParams) -> Result<WeightFamily> {
    params.validate(grid)?;
    let m = params.bound;
    if !(mixed.mult_nonneg >= 1.0 / m - SIGN_SLACK && mixed.mult_nonneg <= 1.0) {
        return Err(Error::Precondition(format!(
            "nonnegative-index multiplier {} outside [1/M, 1]",
            mixed.mult_nonneg
        )));
    }
    if !(mixed.mult_neg >= 1.0 && mixed.mult_neg <= m + SIGN_SLACK) {
        return Err(Error::Precondition(format!(
            "negative-index multiplier {} outside [1, M]",
            mixed.mult_neg
        )));
    }
    if mixed.forward_indices.iter().any(|&n| n < 0) || mixed.backward_indices.iter().any(|&n| n <= 0) {
        return Err(Error::Precondition("subsequence indices must be positive".into()));
    }
    let translated = {
        let f = mixed.forward_indices.clone();
        let b = mixed.backward_indices.clone();
        move |j: i64| f.contains(&j) || b.contains(&-j)
    };
    let multiplier = {
        let (pos, neg) = (mixed.mult_nonneg, mixed.mult_neg);
        move |j: i64| if j >= 0 { pos } else { neg }
    };
    let window = grid.window();
    let (g1, p1, t1, m1) = (*grid, params.clone(), translated.clone(), multiplier);
    let (g2, p2, t2, m2) = (*grid, params.clone(), translated, multiplier);
    Ok(WeightFamily::with_supplied_inverse(
        window,
        m,
        m,
        move |j| {
            if t1(j) {
                translation_matrix(&g1, &p1, j, g1.steps(p1.shift_at(j))? as i64)
            } else {
                CompactOp::scalar(window, Complex64::new(m1(j), 0.0))
            }
        },
        move |j| {
            if t2(j) {
                translation_inverse(&g2, &p2, j, g2.steps(p2.shift_at(j))? as i64)
            } else {
                CompactOp::scalar(window, Complex64::new(1.0 / m2(j), 0.0))
            }
        },
    )
    .labeled("mixed"))
}

/// Largest `n` such that `n` translations of a vector supported in grid
/// indices `|i| <= radius` stay inside the grid in either direction.
pub fn safe_horizon(grid: &GridModel, params: &TranslationWeightParams, radius: usize) -> Result<usize> {
    let max_steps = params
        .shifts
        .iter()
        .map(|&r| grid.steps(r))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .ok_or_else(|| Error::Precondition("at least one shift is required".into()))?;
    Ok(grid.n.saturating_sub(radius) / max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn grid() -> GridModel {
        GridModel::new(3.0, 0.5).unwrap()
    }

    #[test]
    fn grid_alignment() {
        let g = grid();
        assert_eq!(g.window().m_max(), 6);
        assert_eq!(g.steps(1.0).unwrap(), 2);
        assert!(g.steps(0.3).is_err());
        assert!(g.steps(-0.5).is_err());
        assert!(GridModel::new(1.0, 0.3).is_err());
        assert!(GridModel::new(1.0, 0.0).is_err());
    }

    fn unit_params() -> TranslationWeightParams {
        TranslationWeightParams {
            eps: 0.5,
            bound: 1.0,
            shifts: vec![0.5],
            profile: WeightProfile::ConstantBySign { nonneg: 1.0, neg: 1.0 },
        }
    }

    #[test]
    fn unit_weights_give_subdiagonal_shift() {
        let g = grid();
        assert!(translation_weights(&g, &unit_params()).is_err());
        let fam = plain_translation_weights(&g, &unit_params()).unwrap();
        for j in [-1, 0, 4] {
            let w = fam.weight(j).unwrap();
            for row in -6..=6i64 {
                for col in -6..=6i64 {
                    let expect = if col == row - 1 { 1.0 } else { 0.0 };
                    assert_eq!(w.entry(row, col), Complex64::new(expect, 0.0));
                }
            }
        }
    }

    #[test]
    fn step_profile_entries() {
        let g = grid();
        let params = TranslationWeightParams {
            eps: 0.5,
            bound: 2.0,
            shifts: vec![0.5],
            profile: WeightProfile::Step { right: 0.5, left: 2.0 },
        };
        let w0 = translation_weights(&g, &params).unwrap().weight(0).unwrap();
        assert_eq!(w0.entry(1, 0).re, 0.5);
        assert_eq!(w0.entry(0, -1).re, 0.5);
        assert_eq!(w0.entry(-1, -2).re, 2.0);
    }

    #[test]
    fn point_mass_moves_by_r() {
        let g = grid();
        let params = TranslationWeightParams {
            eps: 0.25,
            bound: 2.0,
            shifts: vec![1.0],
            profile: WeightProfile::Plateau {
                low: 0.75,
                high: 1.5,
                ramp: 1.0,
            },
        };
        let fam = translation_weights(&g, &params).unwrap();
        let w = g.window();
        for j in [-3, 0, 2] {
            let mut f = DVector::zeros(w.dim());
            f[w.position(0).unwrap()] = Complex64::new(1.0, 0.0);
            let out = fam.weight(j).unwrap().apply(&f).unwrap();
            let at = w.position(2).unwrap();
            for (p, v) in out.iter().enumerate() {
                let expect = if p == at { params.weight_value(&g, j, 2) } else { 0.0 };
                assert_eq!(v.re, expect);
            }
        }
    }

    #[test]
    fn supplied_inverse_is_exact_inside_grid() {
        let g = grid();
        let params = TranslationWeightParams::constant_by_sign(0.5, 0.5);
        let fam = translation_weights(&g, &params).unwrap();
        let w = g.window();
        let mut f = DVector::zeros(w.dim());
        f[w.position(1).unwrap()] = Complex64::new(1.0, 0.0);
        f[w.position(-2).unwrap()] = Complex64::new(0.0, 2.0);
        for j in [-2, 0, 5] {
            let back = fam
                .inverse_weight(j)
                .unwrap()
                .apply(&fam.weight(j).unwrap().apply(&f).unwrap())
                .unwrap();
            assert!((back - &f).norm() < 1e-15);
        }
    }

    #[test]
    fn inequalities_are_enforced() {
        let g = grid();
        let mut params = TranslationWeightParams::constant_by_sign(0.5, 0.5);
        params.profile = WeightProfile::ConstantBySign { nonneg: 0.9, neg: 2.0 };
        assert!(translation_weights(&g, &params).is_err());
        let mut params = TranslationWeightParams::constant_by_sign(0.5, 0.5);
        params.shifts = vec![0.7];
        assert!(translation_weights(&g, &params).is_err());
        let mut params = TranslationWeightParams::constant_by_sign(0.5, 0.5);
        params.bound = 1.5;
        assert!(translation_weights(&g, &params).is_err());
        let mut params = TranslationWeightParams::constant_by_sign(0.5, 0.5);
        params.profile = WeightProfile::Explicit {
            nonneg: vec![0.5; 3],
            neg: vec![2.0; 3],
        };
        assert!(matches!(translation_weights(&g, &params), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn horizon_and_mixed() {
        let g = grid();
        let params = TranslationWeightParams::constant_by_sign(0.5, 0.5);
        assert_eq!(safe_horizon(&g, &params, 2).unwrap(), 4);
        let mixed = MixedParams {
            forward_indices: vec![1, 3],
            backward_indices: vec![2],
            mult_nonneg: 0.75,
            mult_neg: 1.5,
        };
        let fam = mixed_weights(&g, &params, &mixed).unwrap();
        assert!(fam.weight(2).unwrap().max_abs_diff(&CompactOp::scalar(g.window(), Complex64::new(0.75, 0.0)).unwrap()) == 0.0);
        assert_eq!(fam.weight(3).unwrap().entry(1, 0).re, 0.5);
        assert_eq!(fam.weight(-2).unwrap().entry(1, 0).re, 2.0);
        let bad = MixedParams { mult_nonneg: 1.2, ..mixed };
        assert!(mixed_weights(&g, &params, &bad).is_err());
    }
}
