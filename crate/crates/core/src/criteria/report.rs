use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Relative slack in the non-increasing tail test.
const MONOTONE_SLACK: f64 = 1e-12;
/// Number of final recorded points that must be non-increasing.
pub const TAIL_LEN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SatisfiedAtTolerance,
    NotSatisfiedWithinHorizon,
}

impl Verdict {
    pub fn is_satisfied(self) -> bool {
        self == Verdict::SatisfiedAtTolerance
    }
}

/// What a passing verdict licenses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// Two-sided characterization; numerically only the sufficient direction is exercised.
    Equivalence,
    SufficientCondition,
    NecessaryCondition,
    /// Witness or construction diagnostics, not a criterion.
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub j: i64,
    pub k: usize,
    pub t_k: usize,
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub check: String,
    pub condition: ConditionKind,
    pub direction: String,
    pub tol: f64,
    pub max_k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_cutoff: Option<usize>,
    pub verdict: Verdict,
    /// First recorded `k` at which every tracked sequence was below `tol`.
    pub satisfied_at_k: Option<usize>,
    pub notes: Vec<String>,
    pub records: Vec<Record>,
}

impl CriterionReport {
    pub(crate) fn new(check: &str, condition: ConditionKind, direction: &str, tol: f64, max_k: usize) -> Self {
        Self {
            check: check.into(),
            condition,
            direction: direction.into(),
            tol,
            max_k,
            series_cutoff: None,
            verdict: Verdict::NotSatisfiedWithinHorizon,
            satisfied_at_k: None,
            notes: Vec::new(),
            records: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, j: i64, k: usize, t_k: usize, quantity: &str, value: f64) {
        debug_assert!(value.is_finite() && value >= 0.0, "{quantity} = {value}");
        self.records.push(Record {
            j,
            k,
            t_k,
            quantity: quantity.into(),
            value,
        });
    }

    /// Values of `quantity` at index `j`, ordered by `k`.
    pub fn series(&self, j: i64, quantity: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.j == j && r.quantity == quantity)
            .map(|r| r.value)
            .collect()
    }

    /// `(k, t_k, value)` triples of `quantity` at index `j`.
    pub fn points(&self, j: i64, quantity: &str) -> Vec<(usize, usize, f64)> {
        self.records
            .iter()
            .filter(|r| r.j == j && r.quantity == quantity)
            .map(|r| (r.k, r.t_k, r.value))
            .collect()
    }

    /// Distinct quantity names in first-seen order.
    pub fn quantities(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.quantity) {
                out.push(r.quantity.clone());
            }
        }
        out
    }

    /// Distinct `j` values in first-seen order.
    pub fn indices(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for r in &self.records {
            if !out.contains(&r.j) {
                out.push(r.j);
            }
        }
        out
    }

    /// CSV with header `check,j,k,t_k,quantity,value`; values carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,j,k,t_k,quantity,value\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.16e}",
                self.check, r.j, r.k, r.t_k, r.quantity, r.value
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub(crate) fn finish(&mut self, decision: Decision) {
        self.verdict = decision.verdict;
        self.satisfied_at_k = decision.at_k;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Decision {
    pub verdict: Verdict,
    pub at_k: Option<usize>,
}

/// Whether the final `TAIL_LEN` values are non-increasing.
pub fn non_increasing_tail(values: &[f64]) -> bool {
    let start = values.len().saturating_sub(TAIL_LEN);
    values[start..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK) || w[1] <= f64::MIN_POSITIVE)
}

/// Finite-horizon stand-in for "every sequence tends to zero along a common
/// subsequence": all sequences are below `tol` at some common recorded
/// position, and each is non-increasing over its final recorded points.
///
/// `ks[i]` labels position `i`; every sequence must have `ks.len()` entries.
pub(crate) fn decide_common(ks: &[usize], sequences: &[Vec<f64>], tol: f64) -> Decision {
    let n = ks.len();
    let below_at = (0..n).find(|&i| sequences.iter().all(|s| s[i] < tol));
    let tails_ok = sequences.iter().all(|s| non_increasing_tail(s));
    match below_at {
        Some(i) if tails_ok && n > 0 => Decision {
            verdict: Verdict::SatisfiedAtTolerance,
            at_k: Some(ks[i]),
        },
        _ => Decision {
            verdict: Verdict::NotSatisfiedWithinHorizon,
            at_k: None,
        },
    }
}

/// Per-sequence version: each sequence may reach `tol` at its own position.
/// `at_k` is the latest of the individual first-crossing positions.
pub(crate) fn decide_each(ks: &[usize], sequences: &[Vec<f64>], tol: f64) -> Decision {
    let mut latest = None;
    for s in sequences {
        match s.iter().position(|&v| v < tol) {
            Some(i) if non_increasing_tail(s) => {
                latest = Some(latest.map_or(ks[i], |l: usize| l.max(ks[i])));
            }
            _ => {
                return Decision {
                    verdict: Verdict::NotSatisfiedWithinHorizon,
                    at_k: None,
                }
            }
        }
    }
    Decision {
        verdict: if latest.is_some() {
            Verdict::SatisfiedAtTolerance
        } else {
            Verdict::NotSatisfiedWithinHorizon
        },
        at_k: latest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_rule() {
        assert!(non_increasing_tail(&[5.0, 1.0, 0.5, 0.25]));
        assert!(non_increasing_tail(&[5.0, 9.0, 0.5, 0.25, 0.25]));
        assert!(!non_increasing_tail(&[1.0, 0.5, 0.6]));
        assert!(non_increasing_tail(&[0.0, 0.0, 0.0]));
        assert!(non_increasing_tail(&[]));
    }

    #[test]
    fn common_position_required() {
        let ks = [1, 2, 3, 4];
        let a = vec![1.0, 1e-7, 1e-8, 1e-9];
        let b = vec![1.0, 1.0, 1e-7, 1e-8];
        let d = decide_common(&ks, &[a.clone(), b.clone()], 1e-6);
        assert_eq!(d.verdict, Verdict::SatisfiedAtTolerance);
        assert_eq!(d.at_k, Some(3));
        let flat = vec![1.0; 4];
        let d = decide_common(&ks, &[a, flat], 1e-6);
        assert_eq!(d.verdict, Verdict::NotSatisfiedWithinHorizon);
    }

    #[test]
    fn csv_layout() {
        let mut r = CriterionReport::new("demo", ConditionKind::Diagnostic, "", 1e-6, 1);
        r.push(-1, 1, 4, "forward_decay", 0.0625);
        let csv = r.to_csv();
        assert_eq!(
            csv,
            "check,j,k,t_k,quantity,value\ndemo,-1,1,4,forward_decay,6.2500000000000000e-2\n"
        );
    }
}
