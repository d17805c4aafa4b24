use serde::{Deserialize, Serialize};

use crate::criteria::{
    forward_series, geometric_tail, inverse_series, ApproximantProvider, ConditionKind, CriterionReport, Decision,
    PowerSchedule, TailEstimate, Verdict,
};
use crate::error::{Error, Result};
use crate::module_space::{in_dense_class, IndexRange, ModuleVector};
use crate::operator::projection_p;
use crate::shift::ShiftOperator;

/// Witness diagnostics must end at or below this value.
pub const WITNESS_TOL: f64 = 1e-4;
/// ... and be non-increasing over this many final sweep points.
pub const WITNESS_TAIL_LEN: usize = 5;

const DENSE_CLASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessDiag {
    pub power: usize,
    /// `|eta - x|_2`
    pub eta_minus_x: f64,
    /// `|T^t eta - y|_2`, or `|C^(n) eta - y|_2` for the averaged witness.
    pub image_minus_y: f64,
}

fn check_inputs(x: &ModuleVector, y: &ModuleVector, range: IndexRange, m: usize, power: usize) -> Result<()> {
    for (name, v) in [("x", x), ("y", y)] {
        if !in_dense_class(v, range, m, DENSE_CLASS_TOL)? {
            return Err(Error::Precondition(format!(
                "{name} is not in the dense class for J = {}, m = {m}",
                range.0
            )));
        }
    }
    if power <= 2 * range.0 {
        return Err(Error::Precondition(format!(
            "power {power} must exceed 2J = {}",
            2 * range.0
        )));
    }
    Ok(())
}

/// `sum_{j in [J]} A_j^(k) x_j` with `A = D` or `G`.
fn approximate(x: &ModuleVector, prov: &ApproximantProvider, k: usize, range: IndexRange, use_g: bool) -> Result<ModuleVector> {
    let mut coeffs = Vec::with_capacity(range.len());
    for j in range.iter() {
        let (d, g) = prov.get(j, k)?;
        let a = if use_g { g } else { d };
        coeffs.push((j, a.matmul(&x.coeff(j))?));
    }
    ModuleVector::from_coeffs(x.window(), coeffs)
}

/// `eta = u + S^t v` with `u_j = D_j^(k) x_j`, `v_j = G_j^(k) y_j` on `[J]`.
///
/// `T^t eta` is computed by applying the operator, not through `T^t S^t = I`.
pub fn build_transitivity_witness(
    op: &ShiftOperator,
    x: &ModuleVector,
    y: &ModuleVector,
    prov: &ApproximantProvider,
    k: usize,
    t_k: usize,
    range: IndexRange,
    m: usize,
) -> Result<(ModuleVector, WitnessDiag)> {
    check_inputs(x, y, range, m, t_k)?;
    let u = approximate(x, prov, k, range, false)?;
    let v = approximate(y, prov, k, range, true)?;
    let eta = u.add(&op.apply_s_power(t_k, &v)?)?;
    let diag = WitnessDiag {
        power: t_k,
        eta_minus_x: eta.distance(x)?,
        image_minus_y: op.apply_t_power(t_k, &eta)?.distance(y)?,
    };
    Ok((eta, diag))
}

/// `eta = mu + T^n v + S^n v` with `mu_j = D_j^(k) x_j`, `v_j = G_j^(k) y_j`.
///
/// `n > 2J` is enforced here as well.
pub fn build_avg_witness(
    op: &ShiftOperator,
    x: &ModuleVector,
    y: &ModuleVector,
    prov: &ApproximantProvider,
    k: usize,
    n_k: usize,
    range: IndexRange,
    m: usize,
) -> Result<(ModuleVector, WitnessDiag)> {
    check_inputs(x, y, range, m, n_k)?;
    let mu = approximate(x, prov, k, range, false)?;
    let v = approximate(y, prov, k, range, true)?;
    let eta = mu.add(&op.apply_t_power(n_k, &v)?)?.add(&op.apply_s_power(n_k, &v)?)?;
    let diag = WitnessDiag {
        power: n_k,
        eta_minus_x: eta.distance(x)?,
        image_minus_y: op.apply_c_avg(n_k, &eta)?.distance(y)?,
    };
    Ok((eta, diag))
}

fn sweep(
    check: &str,
    sched: &PowerSchedule,
    mut build: impl FnMut(usize, usize) -> Result<WitnessDiag>,
) -> Result<(CriterionReport, Vec<WitnessDiag>)> {
    let mut report = CriterionReport::new(
        check,
        ConditionKind::Diagnostic,
        "witness errors end below 1e-4 and are non-increasing over the final 5 points",
        WITNESS_TOL,
        sched.max_k(),
    );
    let mut diags = Vec::with_capacity(sched.max_k());
    for (k, t) in sched.iter() {
        let d = build(k, t)?;
        report.push(0, k, t, "eta_minus_x", d.eta_minus_x);
        report.push(0, k, t, "image_minus_y", d.image_minus_y);
        diags.push(d);
    }
    let tail = &diags[diags.len().saturating_sub(WITNESS_TAIL_LEN)..];
    let last = tail.last().expect("non-empty schedule");
    let monotone = tail.windows(2).all(|w| {
        w[1].eta_minus_x <= w[0].eta_minus_x * (1.0 + 1e-12) && w[1].image_minus_y <= w[0].image_minus_y * (1.0 + 1e-12)
    });
    let ok = monotone && last.eta_minus_x <= WITNESS_TOL && last.image_minus_y <= WITNESS_TOL;
    report.finish(Decision {
        verdict: if ok {
            Verdict::SatisfiedAtTolerance
        } else {
            Verdict::NotSatisfiedWithinHorizon
        },
        at_k: ok.then(|| sched.max_k()),
    });
    Ok((report, diags))
}

/// Runs [`build_transitivity_witness`] at every schedule point.
#[allow(clippy::too_many_arguments)]
pub fn transitivity_witness_sweep(
    op: &ShiftOperator,
    x: &ModuleVector,
    y: &ModuleVector,
    prov: &ApproximantProvider,
    sched: &PowerSchedule,
    range: IndexRange,
    m: usize,
) -> Result<(CriterionReport, Vec<WitnessDiag>)> {
    sweep("transitivity_witness", sched, |k, t| {
        Ok(build_transitivity_witness(op, x, y, prov, k, t, range, m)?.1)
    })
}

/// Runs [`build_avg_witness`] at every schedule point.
pub fn avg_witness_sweep(
    op: &ShiftOperator,
    x: &ModuleVector,
    y: &ModuleVector,
    prov: &ApproximantProvider,
    sched: &PowerSchedule,
    range: IndexRange,
    m: usize,
) -> Result<(CriterionReport, Vec<WitnessDiag>)> {
    sweep("avg_witness", sched, |k, t| Ok(build_avg_witness(op, x, y, prov, k, t, range, m)?.1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicDiag {
    pub n_k: usize,
    pub series_cutoff: usize,
    /// `|T^n q - q|_2`
    pub periodicity_defect: f64,
    /// Estimate of the truncation edge: the forward tail past `l = L` plus the
    /// last kept inverse term and the inverse tail past it.
    pub tail_bound: f64,
    /// `|T^{(L+1)n} Z| + |S^{Ln} Z|`, which bounds the defect by the triangle inequality.
    pub structural_bound: f64,
    /// `|q - y|_2`
    pub distance_to_y: f64,
    /// `sum_j |D_j - P_m| |y_j| + sum_j |y_j| (forward series + inverse series, with tails)`.
    pub series_bound: f64,
    pub forward_terms: Vec<f64>,
    pub inverse_terms: Vec<f64>,
}

/// `q = sum_{l=0}^{L} T^{ln}(Z) + sum_{l=1}^{L} S^{ln}(Z)`, `Z_j = D_j^(k) y_j` on `[J]`.
///
/// Fails with [`Error::ConstructionFailed`] when either series shows no
/// geometric decay at the cutoff.
#[allow(clippy::too_many_arguments)]
pub fn build_periodic_point(
    op: &ShiftOperator,
    y: &ModuleVector,
    prov: &ApproximantProvider,
    k: usize,
    n_k: usize,
    range: IndexRange,
    m: usize,
    series_cutoff: usize,
) -> Result<(ModuleVector, PeriodicDiag)> {
    if series_cutoff < 2 {
        return Err(Error::Precondition("series cutoff must be >= 2".into()));
    }
    check_inputs(y, y, range, m, n_k)?;
    let z = approximate(y, prov, k, range, false)?;

    let mut q = z.clone();
    let mut cur = z.clone();
    let mut forward_terms = Vec::with_capacity(series_cutoff + 1);
    for _ in 0..=series_cutoff {
        cur = op.apply_t_power(n_k, &cur)?;
        forward_terms.push(cur.norm2());
        if forward_terms.len() <= series_cutoff {
            q = q.add(&cur)?;
        }
    }
    let mut cur = z.clone();
    let mut inverse_terms = Vec::with_capacity(series_cutoff);
    for _ in 0..series_cutoff {
        cur = op.apply_s_power(n_k, &cur)?;
        inverse_terms.push(cur.norm2());
        q = q.add(&cur)?;
    }

    let kept_forward = &forward_terms[..series_cutoff];
    let (fwd_tail, inv_tail) = (geometric_tail(kept_forward), geometric_tail(&inverse_terms));
    if fwd_tail == TailEstimate::Unbounded || inv_tail == TailEstimate::Unbounded {
        return Err(Error::ConstructionFailed {
            reason: format!("series not summable at n_k = {n_k} within cutoff {series_cutoff}"),
            forward: kept_forward.iter().sum(),
            inverse: inverse_terms.iter().sum(),
        });
    }

    let pm = projection_p(op.window(), m)?;
    let w = op.weights();
    let mut series_bound = 0.0;
    for j in range.iter() {
        let yj = y.coeff(j).op_norm();
        if yj == 0.0 {
            continue;
        }
        let (d, _) = prov.get(j, k)?;
        series_bound += d.sub(&pm)?.op_norm() * yj;
        for terms in [
            forward_series(w, j, n_k, series_cutoff, &d)?,
            inverse_series(w, j, n_k, series_cutoff, &d)?,
        ] {
            series_bound += yj * (terms.iter().sum::<f64>() + geometric_tail(&terms).value());
        }
    }

    let diag = PeriodicDiag {
        n_k,
        series_cutoff,
        periodicity_defect: op.apply_t_power(n_k, &q)?.distance(&q)?,
        tail_bound: fwd_tail.value() + inverse_terms[series_cutoff - 1] + inv_tail.value(),
        structural_bound: forward_terms[series_cutoff] + inverse_terms[series_cutoff - 1],
        distance_to_y: q.distance(y)?,
        series_bound,
        forward_terms: kept_forward.to_vec(),
        inverse_terms,
    };
    Ok((q, diag))
}

/// Runs [`build_periodic_point`] at every schedule point. Satisfied when every
/// point has its defect within `tail_bound + 1e-9` and `|q - y|` within the
/// series bound, and the final `|q - y|` is at most [`WITNESS_TOL`].
#[allow(clippy::too_many_arguments)]
pub fn periodic_point_sweep(
    op: &ShiftOperator,
    y: &ModuleVector,
    prov: &ApproximantProvider,
    sched: &PowerSchedule,
    range: IndexRange,
    m: usize,
    series_cutoff: usize,
) -> Result<(CriterionReport, Vec<PeriodicDiag>)> {
    let mut report = CriterionReport::new(
        "periodic_point",
        ConditionKind::Diagnostic,
        "periodicity defect within the tail bound, distance to y within the series bound and ending below 1e-4",
        WITNESS_TOL,
        sched.max_k(),
    );
    report.series_cutoff = Some(series_cutoff);
    let mut diags = Vec::with_capacity(sched.max_k());
    let mut consistent = true;
    for (k, n) in sched.iter() {
        let (_, d) = build_periodic_point(op, y, prov, k, n, range, m, series_cutoff)?;
        report.push(0, k, n, "periodicity_defect", d.periodicity_defect);
        report.push(0, k, n, "tail_bound", d.tail_bound);
        report.push(0, k, n, "distance_to_y", d.distance_to_y);
        report.push(0, k, n, "series_bound", d.series_bound);
        consistent &= d.periodicity_defect <= d.tail_bound + 1e-9 && d.distance_to_y <= d.series_bound;
        diags.push(d);
    }
    let ok = consistent && diags.last().is_some_and(|d| d.distance_to_y <= WITNESS_TOL);
    report.finish(Decision {
        verdict: if ok {
            Verdict::SatisfiedAtTolerance
        } else {
            Verdict::NotSatisfiedWithinHorizon
        },
        at_k: ok.then(|| sched.max_k()),
    });
    Ok((report, diags))
}
