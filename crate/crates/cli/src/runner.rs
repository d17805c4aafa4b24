use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use shiftlab_core::constructions::{
    avg_witness_sweep, cyclic_weighted_shift, example_provider, mixed_weights, periodic_point_sweep,
    plain_translation_weights, safe_horizon, salas_weights, transitivity_witness_sweep, GridModel, PeriodicDiag,
    WitnessDiag,
};
use shiftlab_core::criteria::{
    check_avg_transitivity, check_chaos, check_dense_hypercyclicity, check_necessary_periodic_s,
    check_necessary_periodic_t, check_pointwise_sufficient, ApproximantProvider, CriterionReport, PowerSchedule,
    TestVectorSets,
};
use shiftlab_core::cstar::{
    check_hc_criterion_phi, check_pointwise_multiplier, commutative_context, compact_context, AlgebraContext,
    CommutativeContext, CompactContext, Conjugation, PhiShift, SeqFn, Translation,
};
use shiftlab_core::module_space::{IndexRange, ModuleVector};
use shiftlab_core::operator::{projection_p, BasisWindow, CompactOp, UnitaryOp};
use shiftlab_core::random::{random_dense_class, random_unitary, seeded};
use shiftlab_core::shift::{ShiftOperator, WeightFamily};
use shiftlab_core::Error;

use crate::config::{CheckName, ExperimentConfig, FamilySpec, MatrixSpec, ProviderSpec, ScheduleSpec, UnitarySpec};
use crate::error::CliError;

/// Per-check extra output from the constructions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Diagnostics {
    Witness(Vec<WitnessDiag>),
    Periodic(Vec<PeriodicDiag>),
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: CheckName,
    pub report: CriterionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub all_satisfied: bool,
    pub outcomes: Vec<CheckOutcome>,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl RunReport {
    /// 0 when every check is satisfied, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.all_satisfied {
            0
        } else {
            2
        }
    }
}

enum Model {
    Shift {
        op: ShiftOperator,
        grid: GridModel,
        horizon: Option<usize>,
    },
    Commutative {
        ps: PhiShift<CommutativeContext, Translation>,
        radius: usize,
    },
    Compact {
        ps: Box<PhiShift<CompactContext, Conjugation>>,
        bridge: ShiftOperator,
    },
}

fn matrix(window: BasisWindow, spec: &MatrixSpec) -> Result<CompactOp, CliError> {
    let zeros;
    let im = match &spec.im {
        Some(im) => im,
        None => {
            zeros = spec.re.iter().map(|r| vec![0.0; r.len()]).collect::<Vec<_>>();
            &zeros
        }
    };
    Ok(CompactOp::from_parts(window, &spec.re, im)?)
}

fn unitary(cfg: &ExperimentConfig, window: BasisWindow) -> Result<UnitaryOp, CliError> {
    Ok(match &cfg.unitary {
        UnitarySpec::Identity => UnitaryOp::identity(window),
        UnitarySpec::DiagonalPhase { angles } => UnitaryOp::diagonal_phase(window, angles.clone())?,
        UnitarySpec::Permutation { perm } => UnitaryOp::permutation(window, perm.clone())?,
        UnitarySpec::CyclicShift { s } => UnitaryOp::cyclic_shift(window, *s)?,
        UnitarySpec::Random => random_unitary(&mut seeded(cfg.seed ^ 0x5eed), window),
    })
}

fn schedule(spec: &ScheduleSpec, max_k: Option<usize>) -> Result<PowerSchedule, CliError> {
    Ok(match spec {
        ScheduleSpec::Explicit { t } => {
            let s = PowerSchedule::new(t.clone())?;
            match max_k {
                Some(k) if k < s.max_k() => s.truncated(k)?,
                _ => s,
            }
        }
        ScheduleSpec::Arithmetic { start, step, max_k: k } => {
            PowerSchedule::arithmetic(*start, *step, max_k.unwrap_or(*k))?
        }
        ScheduleSpec::Geometric { start, ratio, max_k: k } => {
            PowerSchedule::geometric(*start, *ratio, max_k.unwrap_or(*k))?
        }
    })
}

fn custom_family(window: BasisWindow, matrices: &[MatrixSpec], offset: i64) -> Result<WeightFamily, CliError> {
    if matrices.is_empty() {
        return Err(CliError::Config("custom_matrix_list needs at least one matrix".into()));
    }
    let ops = matrices.iter().map(|s| matrix(window, s)).collect::<Result<Vec<_>, _>>()?;
    let mut bound = 0.0f64;
    let mut inverse_bound = 0.0f64;
    for w in &ops {
        w.inverse()?;
        bound = bound.max(w.op_norm());
        inverse_bound = inverse_bound.max(1.0 / w.lower_bound_m());
    }
    let slack = 1.0 + 1e-9;
    let len = ops.len() as i64;
    Ok(WeightFamily::new(window, bound * slack, inverse_bound * slack, move |j| {
        Ok(ops[(j - offset).rem_euclid(len) as usize].clone())
    })
    .labeled("custom_matrix_list"))
}

fn build_model(cfg: &ExperimentConfig) -> Result<Model, CliError> {
    let unit = |m_max: usize| GridModel::unit(BasisWindow::new(m_max));
    let shift = |weights: WeightFamily, grid: GridModel, horizon| -> Result<Model, CliError> {
        let op = ShiftOperator::new(weights, unitary(cfg, grid.window())?)?;
        Ok(Model::Shift { op, grid, horizon })
    };
    match &cfg.family {
        FamilySpec::Identity => {
            let grid = unit(cfg.m_max);
            shift(WeightFamily::identity(grid.window()), grid, None)
        }
        FamilySpec::Salas { lambda } => {
            let grid = unit(cfg.m_max);
            shift(salas_weights(grid.window(), *lambda)?, grid, None)
        }
        FamilySpec::Translation { grid, params } => {
            let g = GridModel::new(grid.half_width, grid.h)?;
            let horizon = safe_horizon(&g, params, cfg.m)?;
            shift(plain_translation_weights(&g, params)?, g, Some(horizon))
        }
        FamilySpec::Mixed { grid, params, mixed } => {
            let g = GridModel::new(grid.half_width, grid.h)?;
            let horizon = safe_horizon(&g, params, cfg.m)?;
            shift(mixed_weights(&g, params, mixed)?, g, Some(horizon))
        }
        FamilySpec::CustomMatrixList { matrices, offset } => {
            let grid = unit(cfg.m_max);
            shift(custom_family(grid.window(), matrices, *offset)?, grid, None)
        }
        FamilySpec::PhiCommutative {
            window_size,
            alpha_step,
            b_nonneg,
            b_neg,
            radius,
        } => {
            let (ctx, phi) = commutative_context(*window_size, *alpha_step)?;
            let ps = PhiShift::new(ctx, phi, SeqFn::by_sign(*b_nonneg, *b_neg))?;
            Ok(Model::Commutative { ps, radius: *radius })
        }
        FamilySpec::PhiCompact { lambda, horizon } => {
            let window = BasisWindow::new(cfg.m_max);
            let u = unitary(cfg, window)?;
            let w = cyclic_weighted_shift(window, *lambda)?;
            let b = w.matmul(u.op())?;
            let bridge = ShiftOperator::new(WeightFamily::constant(w)?, u.clone())?;
            let (ctx, phi) = compact_context(window, u, *horizon)?;
            let ps = PhiShift::new(ctx, phi, b)?;
            Ok(Model::Compact { ps: Box::new(ps), bridge })
        }
    }
}

fn provider(cfg: &ExperimentConfig, grid: GridModel) -> Result<ApproximantProvider, CliError> {
    let window = grid.window();
    Ok(match &cfg.provider {
        ProviderSpec::Example => example_provider(grid, cfg.m)?,
        ProviderSpec::ConstantP => ApproximantProvider::constant_p(window, cfg.m)?,
        ProviderSpec::Custom { d, g } => {
            let (d, g) = (matrix(window, d)?, matrix(window, g)?);
            let bound = d.op_norm().max(g.op_norm()) * (1.0 + 1e-9);
            ApproximantProvider::new(window, bound, move |_, _| Ok((d.clone(), g.clone()))).labeled("custom")
        }
    })
}

/// Largest power `T` or `S` is raised to by `check` at schedule end `t`.
fn steps_needed(check: CheckName, t: usize, series_cutoff: usize) -> usize {
    match check {
        CheckName::AvgTransitivity | CheckName::AvgWitness => 2 * t,
        CheckName::Chaos => series_cutoff * t,
        CheckName::PeriodicPoint => (series_cutoff + 1) * t,
        _ => t,
    }
}

fn test_vectors(cfg: &ExperimentConfig, window: BasisWindow) -> Result<TestVectorSets, CliError> {
    let basis = |idx: &[i64]| {
        idx.iter()
            .map(|&i| TestVectorSets::basis_vector(window, i))
            .collect::<Result<Vec<_>, Error>>()
    };
    Ok(TestVectorSets::uniform(
        window,
        basis(&cfg.test_vectors.h1)?,
        basis(&cfg.test_vectors.h2)?,
    )?)
}

struct ShiftInputs<'a> {
    op: &'a ShiftOperator,
    prov: ApproximantProvider,
    tv: TestVectorSets,
    x: ModuleVector,
    y: ModuleVector,
}

fn run_shift_check(
    cfg: &ExperimentConfig,
    inputs: &ShiftInputs,
    sched: &PowerSchedule,
    tol: f64,
    check: CheckName,
) -> Result<(CriterionReport, Option<Diagnostics>), CliError> {
    let range = IndexRange(cfg.range_j);
    let (op, prov, m) = (inputs.op, &inputs.prov, cfg.m);
    let plain = |r: CriterionReport| (r, None);
    Ok(match check {
        CheckName::DenseHypercyclicity => plain(check_dense_hypercyclicity(op, sched, prov, range, m, tol)?),
        CheckName::PointwiseSufficient => plain(check_pointwise_sufficient(op, sched, &inputs.tv, range, tol)?),
        CheckName::Chaos => plain(check_chaos(op, sched, prov, range, m, tol, cfg.series_cutoff)?),
        CheckName::AvgTransitivity => plain(check_avg_transitivity(op, sched, prov, range, m, tol)?),
        CheckName::NecessaryPeriodicT => plain(check_necessary_periodic_t(op.weights(), sched, range, tol)?),
        CheckName::NecessaryPeriodicS => plain(check_necessary_periodic_s(op.weights(), sched, range, tol)?),
        CheckName::TransitivityWitness => {
            let (r, d) = transitivity_witness_sweep(op, &inputs.x, &inputs.y, prov, sched, range, m)?;
            (r, Some(Diagnostics::Witness(d)))
        }
        CheckName::AvgWitness => {
            let (r, d) = avg_witness_sweep(op, &inputs.x, &inputs.y, prov, sched, range, m)?;
            (r, Some(Diagnostics::Witness(d)))
        }
        CheckName::PeriodicPoint => {
            let (r, d) = periodic_point_sweep(op, &inputs.y, prov, sched, range, m, cfg.series_cutoff)?;
            (r, Some(Diagnostics::Periodic(d)))
        }
        CheckName::HcCriterionPhi | CheckName::PointwiseMultiplier => {
            return Err(CliError::Config(format!("{check:?} needs an algebra context")))
        }
    })
}

fn run_phi_check<C, P>(
    ps: &PhiShift<C, P>,
    alpha: usize,
    omega: (Vec<C::Elem>, Vec<C::Elem>),
    sched: &PowerSchedule,
    tol: f64,
    check: CheckName,
) -> Result<CriterionReport, CliError>
where
    C: AlgebraContext,
    P: shiftlab_core::cstar::Automorphism<Elem = C::Elem>,
{
    Ok(match check {
        CheckName::HcCriterionPhi => {
            let p = ps.ctx().approx_unit(alpha)?;
            let p2 = ps.ctx().mul(&p, &p)?;
            check_hc_criterion_phi(ps, alpha, sched, |_| Ok((p2.clone(), p2.clone())), tol)?
        }
        CheckName::PointwiseMultiplier => check_pointwise_multiplier(ps, &omega.0, &omega.1, sched, tol)?,
        _ => return Err(CliError::Config(format!("{check:?} does not apply to an algebra context"))),
    })
}

fn timed<T>(f: impl FnOnce() -> Result<T, CliError>) -> Result<(T, f64), CliError> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64() * 1e3))
}

/// Runs every check of `cfg`, optionally overriding `max_k` and `tol`.
///
/// Checks run in parallel; results keep the config order.
pub fn run(cfg: &ExperimentConfig, max_k: Option<usize>, tol: Option<f64>) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let tol = tol.unwrap_or(cfg.tol);
    if !(tol > 0.0) {
        return Err(CliError::Config(format!("tol must be positive, got {tol}")));
    }
    let sched = schedule(&cfg.schedule, max_k)?;
    let model = build_model(cfg)?;
    let results: Vec<Result<CheckOutcome, CliError>> = match &model {
        Model::Shift { op, grid, horizon } => {
            if let Some(h) = horizon {
                for &c in &cfg.checks {
                    let need = steps_needed(c, sched.last(), cfg.series_cutoff);
                    if need > *h {
                        return Err(Error::HorizonExceeded {
                            requested: need,
                            horizon: *h,
                        }
                        .into());
                    }
                }
            }
            let window = op.window();
            let mut rng = seeded(cfg.seed);
            let range = IndexRange(cfg.range_j);
            let inputs = ShiftInputs {
                op,
                prov: provider(cfg, *grid)?,
                tv: test_vectors(cfg, window)?,
                x: random_dense_class(&mut rng, window, range, cfg.m),
                y: random_dense_class(&mut rng, window, range, cfg.m),
            };
            cfg.checks
                .par_iter()
                .map(|&c| {
                    let ((report, diagnostics), ms) = timed(|| run_shift_check(cfg, &inputs, &sched, tol, c))?;
                    Ok(CheckOutcome {
                        check: c,
                        report,
                        diagnostics,
                        elapsed_ms: ms,
                    })
                })
                .collect()
        }
        Model::Commutative { ps, radius } => {
            let r = *radius as i64;
            let omega = || {
                let p = SeqFn::indicator(-r, r);
                (vec![p.clone(), SeqFn::indicator(0, r)], vec![p, SeqFn::indicator(-r, 0)])
            };
            cfg.checks
                .par_iter()
                .map(|&c| {
                    let (report, ms) = timed(|| run_phi_check(ps, *radius, omega(), &sched, tol, c))?;
                    Ok(CheckOutcome {
                        check: c,
                        report,
                        diagnostics: None,
                        elapsed_ms: ms,
                    })
                })
                .collect()
        }
        Model::Compact { ps, bridge } => {
            let window = bridge.window();
            let omega = || -> Result<_, CliError> {
                let pm = projection_p(window, cfg.m)?;
                let e0 = CompactOp::from_fn(window, |i, j| {
                    Complex64::new(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0)
                })?;
                Ok((vec![pm.clone(), e0.clone()], vec![pm, e0]))
            };
            cfg.checks
                .par_iter()
                .map(|&c| {
                    let (report, ms) = timed(|| {
                        if c == CheckName::DenseHypercyclicity {
                            let prov = ApproximantProvider::constant_p(window, cfg.m)?;
                            let range = IndexRange(cfg.range_j);
                            Ok(check_dense_hypercyclicity(bridge, &sched, &prov, range, cfg.m, tol)?)
                        } else {
                            run_phi_check(ps, cfg.m, omega()?, &sched, tol, c)
                        }
                    })?;
                    Ok(CheckOutcome {
                        check: c,
                        report,
                        diagnostics: None,
                        elapsed_ms: ms,
                    })
                })
                .collect()
        }
    };
    let outcomes = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let all_satisfied = outcomes.iter().all(|o| o.report.verdict.is_satisfied());
    let mut config = cfg.clone();
    if let Some(k) = max_k {
        config.schedule = override_max_k(&config.schedule, k);
    }
    config.tol = tol;
    Ok(RunReport {
        config,
        all_satisfied,
        outcomes,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn override_max_k(spec: &ScheduleSpec, k: usize) -> ScheduleSpec {
    match spec.clone() {
        ScheduleSpec::Explicit { t } => ScheduleSpec::Explicit {
            t: t.into_iter().take(k).collect(),
        },
        ScheduleSpec::Arithmetic { start, step, .. } => ScheduleSpec::Arithmetic { start, step, max_k: k },
        ScheduleSpec::Geometric { start, ratio, .. } => ScheduleSpec::Geometric { start, ratio, max_k: k },
    }
}
