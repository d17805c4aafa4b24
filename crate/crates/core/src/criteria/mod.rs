//! Finite-horizon checkers for the hypercyclicity and chaos conditions on
//! `T_{U,W}`, and for the lower-bound necessary conditions on periodic points.
//!
//! "The limit is zero" is read as: below `tol` at some recorded `k` and
//! non-increasing over the final three recorded `k`. A failed check only means
//! the condition was not observed within the horizon.

mod report;
mod schedule;

pub use report::{non_increasing_tail, ConditionKind, CriterionReport, Record, Verdict, TAIL_LEN};
pub use schedule::{ApproximantProvider, PowerSchedule, TestVectorSets};

pub(crate) use report::{decide_common, decide_each, Decision};

use crate::error::{Error, Result};
use crate::module_space::IndexRange;
use crate::operator::{projection_p, CompactOp};
use crate::shift::{ShiftOperator, WeightFamily};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_K: usize = 40;
pub const DEFAULT_SERIES_CUTOFF: usize = 64;

/// Tracks one sequence per `(j, quantity)` in recording order.
pub(crate) struct Tracker {
    keys: Vec<(i64, String)>,
    values: Vec<Vec<f64>>,
}

impl Tracker {
    pub(crate) fn new() -> Self {
        Self {
            keys: Vec::new(),
            values: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, j: i64, quantity: &str, v: f64) {
        match self.keys.iter().position(|(kj, kq)| *kj == j && kq == quantity) {
            Some(i) => self.values[i].push(v),
            None => {
                self.keys.push((j, quantity.to_string()));
                self.values.push(vec![v]);
            }
        }
    }

    pub(crate) fn sequences(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub(crate) fn by_index(&self) -> Vec<Vec<Vec<f64>>> {
        let mut js: Vec<i64> = Vec::new();
        for (j, _) in &self.keys {
            if !js.contains(j) {
                js.push(*j);
            }
        }
        js.iter()
            .map(|j| {
                self.keys
                    .iter()
                    .zip(&self.values)
                    .filter(|((jj, _), _)| jj == j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("tolerance must be positive, got {tol}")))
    }
}

/// Checks the product-decay characterization of dense hypercyclicity of
/// `(T^{t_k})_k` along the schedule, for every `j in [J]`:
/// `|D_j^(k) - P_m|`, `|G_j^(k) - P_m|`,
/// `|W_{j+t_k} ... W_{j+1} D_j^(k)|` and `|W_{j-t_k+1}^{-1} ... W_j^{-1} G_j^(k)|`
/// must all tend to zero.
pub fn check_dense_hypercyclicity(
    op: &ShiftOperator,
    sched: &PowerSchedule,
    prov: &ApproximantProvider,
    range: IndexRange,
    m: usize,
    tol: f64,
) -> Result<CriterionReport> {
    check_tol(tol)?;
    let pm = projection_p(op.window(), m)?;
    let w = op.weights();
    let mut report = CriterionReport::new(
        "dense_hypercyclicity",
        ConditionKind::Equivalence,
        "product-decay condition => densely hypercyclic; only this direction is certified numerically",
        tol,
        sched.max_k(),
    );
    let mut tracker = Tracker::new();
    for j in range.iter() {
        for (k, t) in sched.iter() {
            let (d, g) = prov.get(j, k)?;
            let values = [
                ("approx_error_d", d.sub(&pm)?.op_norm()),
                ("approx_error_g", g.sub(&pm)?.op_norm()),
                ("forward_decay", w.forward_product(j, t)?.matmul(&d)?.op_norm()),
                ("inverse_decay", w.inverse_product(j, t)?.matmul(&g)?.op_norm()),
            ];
            for (q, v) in values {
                report.push(j, k, t, q, v);
                tracker.push(j, q, v);
            }
        }
    }
    report.finish(decide_common(&sched.ks(), tracker.sequences(), tol));
    Ok(report)
}

/// Checks pointwise decay of the forward products on `H1_j` and of the
/// inverse products on `H2_j` (a sufficient condition).
pub fn check_pointwise_sufficient(
    op: &ShiftOperator,
    sched: &PowerSchedule,
    tv: &TestVectorSets,
    range: IndexRange,
    tol: f64,
) -> Result<CriterionReport> {
    check_tol(tol)?;
    op.window().ensure_same(&tv.window())?;
    let w = op.weights();
    let mut report = CriterionReport::new(
        "pointwise_sufficient",
        ConditionKind::SufficientCondition,
        "pointwise product decay => densely hypercyclic",
        tol,
        sched.max_k(),
    );
    let mut tracker = Tracker::new();
    for j in range.iter() {
        let (h1, h2) = (tv.h1(j), tv.h2(j));
        for (k, t) in sched.iter() {
            let f = w.forward_product(j, t)?;
            for (i, h) in h1.iter().enumerate() {
                let q = format!("forward_pointwise_{i}");
                let v = f.apply(h)?.norm();
                report.push(j, k, t, &q, v);
                tracker.push(j, &q, v);
            }
            let g = w.inverse_product(j, t)?;
            for (i, h) in h2.iter().enumerate() {
                let q = format!("inverse_pointwise_{i}");
                let v = g.apply(h)?.norm();
                report.push(j, k, t, &q, v);
                tracker.push(j, &q, v);
            }
        }
    }
    report.finish(decide_common(&sched.ks(), tracker.sequences(), tol));
    Ok(report)
}

/// Upper estimate for the part of a series beyond its computed terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailEstimate {
    Bounded(f64),
    /// Term ratios do not certify geometric decay at this horizon.
    Unbounded,
}

impl TailEstimate {
    pub fn value(self) -> f64 {
        match self {
            TailEstimate::Bounded(v) => v,
            TailEstimate::Unbounded => f64::INFINITY,
        }
    }
}

/// Geometric tail bound from the last two terms: `last * r / (1 - r)` for
/// `r = last / previous < 1`.
///
/// Ratios that climb across the computed range and end above `1 - 2/L`
/// (the signature of `l^{-p}`-type decay) are reported unbounded.
pub fn geometric_tail(terms: &[f64]) -> TailEstimate {
    let n = terms.len();
    if n < 2 {
        return TailEstimate::Unbounded;
    }
    let (prev, last) = (terms[n - 2], terms[n - 1]);
    if last == 0.0 {
        return TailEstimate::Bounded(0.0);
    }
    if prev == 0.0 {
        return TailEstimate::Unbounded;
    }
    let r = last / prev;
    if r >= 1.0 {
        return TailEstimate::Unbounded;
    }
    if n >= 3 && terms[0] > 0.0 && terms[1] > 0.0 {
        let first_ratio = terms[1] / terms[0];
        if r > first_ratio * (1.0 + 1e-9) && r > 1.0 - 2.0 / n as f64 {
            return TailEstimate::Unbounded;
        }
    }
    TailEstimate::Bounded(last * r / (1.0 - r))
}

/// `|W_{j+ln} ... W_{j+1} D|` for `l = 1..=cutoff`, growing the product one factor at a time.
pub fn forward_series(w: &WeightFamily, j: i64, n: usize, cutoff: usize, d: &CompactOp) -> Result<Vec<f64>> {
    let mut acc = d.clone();
    let mut idx = j;
    let mut terms = Vec::with_capacity(cutoff);
    for _ in 0..cutoff {
        for _ in 0..n {
            idx += 1;
            acc = w.weight(idx)?.matmul(&acc)?;
        }
        terms.push(acc.op_norm());
    }
    Ok(terms)
}

/// `|W_{j-ln+1}^{-1} ... W_j^{-1} D|` for `l = 1..=cutoff`.
pub fn inverse_series(w: &WeightFamily, j: i64, n: usize, cutoff: usize, d: &CompactOp) -> Result<Vec<f64>> {
    let mut acc = d.clone();
    let mut idx = j + 1;
    let mut terms = Vec::with_capacity(cutoff);
    for _ in 0..cutoff {
        for _ in 0..n {
            idx -= 1;
            acc = w.inverse_weight(idx)?.matmul(&acc)?;
        }
        terms.push(acc.op_norm());
    }
    Ok(terms)
}

/// Checks the series condition for chaos (a sufficient condition): for every
/// `j in [J]`, `|D_j^(k) - P_m| -> 0` and both
/// `sum_l |W_{j+l n_k} ... W_{j+1} D_j^(k)|` and
/// `sum_l |W_{j-l n_k+1}^{-1} ... W_j^{-1} D_j^(k)|` tend to zero.
///
/// Each series is summed to `series_cutoff` terms plus a geometric tail
/// estimate; the tracked per-`j` quantity is the sum of both totals.
pub fn check_chaos(
    op: &ShiftOperator,
    sched: &PowerSchedule,
    prov: &ApproximantProvider,
    range: IndexRange,
    m: usize,
    tol: f64,
    series_cutoff: usize,
) -> Result<CriterionReport> {
    check_tol(tol)?;
    if series_cutoff < 2 {
        return Err(Error::Precondition("series cutoff must be >= 2".into()));
    }
    let pm = projection_p(op.window(), m)?;
    let w = op.weights();
    let mut report = CriterionReport::new(
        "chaos",
        ConditionKind::SufficientCondition,
        "summable product series => chaotic; the converse is not claimed",
        tol,
        sched.max_k(),
    );
    report.series_cutoff = Some(series_cutoff);
    let mut tracker = Tracker::new();
    let mut diverging = false;
    for j in range.iter() {
        for (k, n) in sched.iter() {
            let (d, _) = prov.get(j, k)?;
            let err = d.sub(&pm)?.op_norm();
            report.push(j, k, n, "approx_error_d", err);
            tracker.push(j, "approx_error_d", err);
            let mut total = 0.0;
            for (side, terms) in [
                ("forward", forward_series(w, j, n, series_cutoff, &d)?),
                ("inverse", inverse_series(w, j, n, series_cutoff, &d)?),
            ] {
                let partial: f64 = terms.iter().sum();
                let tail = geometric_tail(&terms);
                report.push(j, k, n, quantity(side, "partial_sum"), partial);
                match tail {
                    TailEstimate::Bounded(t) => report.push(j, k, n, quantity(side, "tail"), t),
                    TailEstimate::Unbounded => {
                        diverging = true;
                        report.push(j, k, n, quantity(side, "tail_unbounded"), 1.0);
                    }
                }
                total += partial + tail.value();
            }
            if total.is_finite() {
                report.push(j, k, n, "series_total", total);
            }
            tracker.push(j, "series_total", total);
        }
    }
    if diverging {
        report
            .notes
            .push("tail unbounded at some (j, k): series not shown summable at this horizon".into());
    }
    report.finish(decide_common(&sched.ks(), tracker.sequences(), tol));
    Ok(report)
}

fn quantity(side: &str, what: &str) -> &'static str {
    match (side, what) {
        ("forward", "partial_sum") => "forward_partial_sum",
        ("forward", "tail") => "forward_tail",
        ("forward", "tail_unbounded") => "forward_tail_unbounded",
        ("inverse", "partial_sum") => "inverse_partial_sum",
        ("inverse", "tail") => "inverse_tail",
        _ => "inverse_tail_unbounded",
    }
}

/// Checks the sufficient condition for topological transitivity of the
/// averaged sequence `C^(n) = (T^n + S^n)/2`: the two approximant errors and
/// six product decays (forward/inverse at `n_k` on `D` and `G`, and at `2 n_k` on `G`).
pub fn check_avg_transitivity(
    op: &ShiftOperator,
    sched: &PowerSchedule,
    prov: &ApproximantProvider,
    range: IndexRange,
    m: usize,
    tol: f64,
) -> Result<CriterionReport> {
    check_tol(tol)?;
    let pm = projection_p(op.window(), m)?;
    let w = op.weights();
    let mut report = CriterionReport::new(
        "avg_transitivity",
        ConditionKind::SufficientCondition,
        "six product decays => averaged sequence topologically transitive; the converse is not claimed",
        tol,
        sched.max_k(),
    );
    let mut tracker = Tracker::new();
    for j in range.iter() {
        for (k, n) in sched.iter() {
            let (d, g) = prov.get(j, k)?;
            let f1 = w.forward_product(j, n)?;
            let i1 = w.inverse_product(j, n)?;
            let f2 = w.forward_product(j, 2 * n)?;
            let i2 = w.inverse_product(j, 2 * n)?;
            let values = [
                ("approx_error_d", d.sub(&pm)?.op_norm()),
                ("approx_error_g", g.sub(&pm)?.op_norm()),
                ("forward_decay_d", f1.matmul(&d)?.op_norm()),
                ("inverse_decay_d", i1.matmul(&d)?.op_norm()),
                ("forward_decay_g", f1.matmul(&g)?.op_norm()),
                ("inverse_decay_g", i1.matmul(&g)?.op_norm()),
                ("forward_decay_2n_g", f2.matmul(&g)?.op_norm()),
                ("inverse_decay_2n_g", i2.matmul(&g)?.op_norm()),
            ];
            for (q, v) in values {
                report.push(j, k, n, q, v);
                tracker.push(j, q, v);
            }
        }
    }
    report.finish(decide_common(&sched.ks(), tracker.sequences(), tol));
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn check_necessary(
    name: &str,
    direction: &str,
    quantity: &str,
    weights: &WeightFamily,
    sched: &PowerSchedule,
    range: IndexRange,
    tol: f64,
    product: impl Fn(&WeightFamily, i64, usize) -> Result<CompactOp>,
) -> Result<CriterionReport> {
    check_tol(tol)?;
    let mut report = CriterionReport::new(name, ConditionKind::NecessaryCondition, direction, tol, sched.max_k());
    let mut tracker = Tracker::new();
    for j in range.iter() {
        for (k, n) in sched.iter() {
            let v = product(weights, j, n)?.lower_bound_m();
            report.push(j, k, n, quantity, v);
            tracker.push(j, quantity, v);
        }
    }
    let per_j: Vec<Vec<f64>> = tracker.by_index().into_iter().flatten().collect();
    report.finish(decide_each(&sched.ks(), &per_j, tol));
    Ok(report)
}

/// Records `m(W_{j+n_k} ... W_{j+1})` (smallest singular value). Decay to zero
/// is necessary for `P~_{J,m}` to be a limit of periodic points of `T`.
pub fn check_necessary_periodic_t(
    weights: &WeightFamily,
    sched: &PowerSchedule,
    range: IndexRange,
    tol: f64,
) -> Result<CriterionReport> {
    check_necessary(
        "necessary_periodic_t",
        "P~ in closure of periodic points of T => lower bounds of forward products decay; failure refutes only in exact arithmetic",
        "lower_bound_forward",
        weights,
        sched,
        range,
        tol,
        |w, j, n| w.forward_product(j, n),
    )
}

/// Records `m(W_{j-n_k+1}^{-1} ... W_j^{-1})`; the mirror condition for `S`.
pub fn check_necessary_periodic_s(
    weights: &WeightFamily,
    sched: &PowerSchedule,
    range: IndexRange,
    tol: f64,
) -> Result<CriterionReport> {
    check_necessary(
        "necessary_periodic_s",
        "P~ in closure of periodic points of S => lower bounds of inverse products decay; failure refutes only in exact arithmetic",
        "lower_bound_inverse",
        weights,
        sched,
        range,
        tol,
        |w, j, n| w.inverse_product(j, n),
    )
}
