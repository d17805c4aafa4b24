//! Weight families, approximant providers and the witness / periodic-point
//! constructions used to exercise the criteria.

mod translation;
mod witness;

pub use translation::{
    mixed_weights, plain_translation_weights, safe_horizon, translation_weights, GridModel, MixedParams, TranslationWeightParams, WeightProfile,
};
pub use witness::{
    avg_witness_sweep, build_avg_witness, build_periodic_point, build_transitivity_witness, periodic_point_sweep,
    transitivity_witness_sweep, PeriodicDiag, WitnessDiag, WITNESS_TAIL_LEN, WITNESS_TOL,
};

use num_complex::Complex64;

use crate::criteria::ApproximantProvider;
use crate::error::{Error, Result};
use crate::operator::{projection_p, BasisWindow, CompactOp};
use crate::shift::WeightFamily;

/// Scalar bilateral weights: `W_j = lambda I` for `j <= 0`, `W_j = I / lambda` for `j >= 1`.
///
/// With this split every product met by the criteria at `j = 0` is exactly
/// `lambda^{-n}`: `forward_product(0, n)` only sees `j >= 1` and
/// `inverse_product(0, n)` only sees `j <= 0`.
pub fn salas_weights(window: BasisWindow, lambda: f64) -> Result<WeightFamily> {
    salas_weights_split(window, lambda, 1)
}

/// Salas weights with `W_j = I / lambda` from `j >= first_decaying` on.
pub fn salas_weights_split(window: BasisWindow, lambda: f64, first_decaying: i64) -> Result<WeightFamily> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::Precondition(format!("lambda must exceed 1, got {lambda}")));
    }
    let up = CompactOp::scalar(window, Complex64::new(lambda, 0.0))?;
    let down = CompactOp::scalar(window, Complex64::new(1.0 / lambda, 0.0))?;
    Ok(WeightFamily::new(window, lambda, lambda, move |j| {
        Ok(if j >= first_decaying { down.clone() } else { up.clone() })
    })
    .labeled(format!("salas(lambda={lambda})")))
}

/// Cyclic weighted shift `W e_i = w(i + 1) e_{i+1}` (indices mod the window)
/// with Salas scalar weights `w(i) = lambda` for `i <= 0`, `1 / lambda` for `i >= 1`.
///
/// Invertible, and `|W^n P_m| = lambda^{2 min(n, m) - n}` while `n <= m_max - m` (no wraparound).
pub fn cyclic_weighted_shift(window: BasisWindow, lambda: f64) -> Result<CompactOp> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::Precondition(format!("lambda must exceed 1, got {lambda}")));
    }
    let n = window.m_max() as i64;
    let wrap = |i: i64| if i > n { i - (2 * n + 1) } else { i };
    CompactOp::from_fn(window, |row, col| {
        if row == wrap(col + 1) {
            let w = if col < 0 { lambda } else { 1.0 / lambda };
            Complex64::new(w, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `D = G = L_{chi_[-k,k]} P_m`: the indicator of the grid points with `|t_i| <= k`, times `P_m`.
pub fn example_dg(window: BasisWindow, m: usize, k: usize, grid: &GridModel) -> Result<(CompactOp, CompactOp)> {
    if k < 1 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    window.ensure_same(&grid.window())?;
    let pm = projection_p(window, m)?;
    let chi: Vec<f64> = window
        .indices()
        .map(|i| if grid.point(i).abs() <= k as f64 + 1e-12 { 1.0 } else { 0.0 })
        .collect();
    let d = CompactOp::from_real_diagonal(window, &chi)?.matmul(&pm)?;
    Ok((d.clone(), d))
}

/// Provider `(j, k) -> example_dg(m, k)`, identical for every `j`.
pub fn example_provider(grid: GridModel, m: usize) -> Result<ApproximantProvider> {
    let window = grid.window();
    projection_p(window, m)?;
    Ok(ApproximantProvider::new(window, 1.0, move |_, k| example_dg(window, m, k, &grid)).labeled(format!("chi_[-k,k] P_{m}")))
}
