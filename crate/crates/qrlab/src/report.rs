//! Structured results of inequality and convergence experiments.
//!
//! Every check in [`crate::verify`] produces one of two artifacts: a
//! [`RatioReport`] — an asserted inequality `lhs ≲ rhs` probed on a bank of
//! inputs, with the per-entry ratios and their extremes — or a
//! [`ConvergenceReport`] — sup-norm errors along an increasing dilation
//! sequence. Both are plain data, serializable to JSON for archiving and to
//! CSV for plotting, and both embed a configuration echo so a result file on
//! disk is self-describing.
//!
//! Aggregates are computed serially in entry order from stored per-entry
//! values, so a report is a pure function of its inputs: the same entries
//! yield byte-identical serialized output, run to run.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Print a float with 17 significant digits — enough to reproduce the exact
/// `f64` bit pattern on read-back, so CSV artifacts are lossless.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One measured instance of an inequality `lhs ≤ C·rhs`: the two sides and
/// their ratio, tagged with the input's identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Result of an inequality check over a bank of inputs.
///
/// `max_ratio` is the empirical constant: the smallest `C` for which
/// `lhs ≤ C·rhs` held on every entry. `symmetry_drift`, when the check
/// declares an exact continuum symmetry (dyadic dilation unless documented
/// otherwise), is the largest relative change of any entry's ratio under
/// that symmetry — a discretization-error witness that must shrink under
/// grid refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub name: String,
    pub per_entry: Vec<RatioEntry>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub symmetry_drift: Option<f64>,
    /// Full experiment configuration echo (grid, distance, profile, bank
    /// seed, …), plus any per-run annotations such as skipped entry ids.
    pub params: serde_json::Value,
}

impl RatioReport {
    /// Assemble a report from raw `(id, lhs, rhs)` measurements.
    ///
    /// Ratios and aggregates are computed here, serially in entry order.
    /// Both sides must be finite and nonnegative; a nonpositive `rhs` is a
    /// guard violation (the inequality's right side vanished, so no finite
    /// constant is witnessed — degenerate entries must be filtered out and
    /// flagged in `params` by the caller, not silently divided through).
    pub fn new(
        name: impl Into<String>,
        entries: Vec<(String, f64, f64)>,
        symmetry_drift: Option<f64>,
        params: serde_json::Value,
    ) -> Result<Self> {
        let name = name.into();
        if entries.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "ratio report '{name}' needs at least one entry"
            )));
        }
        let mut per_entry = Vec::with_capacity(entries.len());
        for (id, lhs, rhs) in entries {
            if !lhs.is_finite() || !rhs.is_finite() || lhs < 0.0 || rhs < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "entry '{id}' of '{name}' has non-finite or negative sides \
                     (lhs = {lhs:.6e}, rhs = {rhs:.6e})"
                )));
            }
            if rhs == 0.0 {
                return Err(Error::Guard(format!(
                    "entry '{id}' of '{name}' has a vanishing right side; \
                     the ratio is undefined"
                )));
            }
            per_entry.push(RatioEntry {
                id,
                lhs,
                rhs,
                ratio: lhs / rhs,
            });
        }
        if let Some(d) = symmetry_drift {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "symmetry drift of '{name}' must be finite and nonnegative, got {d}"
                )));
            }
        }
        let mut max_ratio = f64::NEG_INFINITY;
        let mut min_ratio = f64::INFINITY;
        for e in &per_entry {
            max_ratio = max_ratio.max(e.ratio);
            min_ratio = min_ratio.min(e.ratio);
        }
        Ok(RatioReport {
            name,
            per_entry,
            max_ratio,
            min_ratio,
            symmetry_drift,
            params,
        })
    }

    /// Pretty JSON rendering of the whole report.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV rendering: `#`-prefixed header lines echo the report name,
    /// aggregates, and configuration; then one row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# name: {}", self.name);
        let _ = writeln!(out, "# max_ratio: {}", fmt_float(self.max_ratio));
        let _ = writeln!(out, "# min_ratio: {}", fmt_float(self.min_ratio));
        match self.symmetry_drift {
            Some(d) => {
                let _ = writeln!(out, "# symmetry_drift: {}", fmt_float(d));
            }
            None => {
                let _ = writeln!(out, "# symmetry_drift: none");
            }
        }
        let _ = writeln!(out, "# params: {}", self.params);
        let _ = writeln!(out, "entry_id,lhs,rhs,ratio");
        for e in &self.per_entry {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                e.id,
                fmt_float(e.lhs),
                fmt_float(e.rhs),
                fmt_float(e.ratio)
            );
        }
        out
    }
}

/// Result of a convergence experiment: sup-norm errors over a probe region
/// along a strictly increasing dilation sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub name: String,
    pub t_values: Vec<f64>,
    /// Sup over the probe region of the pointwise error at each `t`.
    pub sup_errors: Vec<f64>,
    /// Human-readable description of the probe region.
    pub probe: String,
    /// True when the trailing half of `sup_errors` is nonincreasing — the
    /// qualitative signature of convergence once transients have passed.
    pub monotone_tail: bool,
    pub params: serde_json::Value,
}

impl ConvergenceReport {
    /// Assemble a report; `monotone_tail` is derived from the data.
    pub fn new(
        name: impl Into<String>,
        t_values: Vec<f64>,
        sup_errors: Vec<f64>,
        probe: impl Into<String>,
        params: serde_json::Value,
    ) -> Result<Self> {
        let name = name.into();
        if t_values.is_empty() || t_values.len() != sup_errors.len() {
            return Err(Error::InvalidParameter(format!(
                "convergence report '{name}' needs equally many t values and errors \
                 (got {} and {})",
                t_values.len(),
                sup_errors.len()
            )));
        }
        for w in t_values.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "t values of '{name}' must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if t_values.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t values of '{name}' must be positive and finite"
            )));
        }
        if sup_errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sup errors of '{name}' must be finite and nonnegative"
            )));
        }
        let tail = &sup_errors[sup_errors.len() / 2..];
        let monotone_tail = tail.windows(2).all(|w| w[1] <= w[0]);
        Ok(ConvergenceReport {
            name,
            t_values,
            sup_errors,
            probe: probe.into(),
            monotone_tail,
            params,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV rendering with the same `#`-prefixed echo convention as
    /// [`RatioReport::to_csv`]; columns are `t,sup_error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# name: {}", self.name);
        let _ = writeln!(out, "# probe: {}", self.probe);
        let _ = writeln!(out, "# monotone_tail: {}", self.monotone_tail);
        let _ = writeln!(out, "# params: {}", self.params);
        let _ = writeln!(out, "t,sup_error");
        for (t, e) in self.t_values.iter().zip(self.sup_errors.iter()) {
            let _ = writeln!(out, "{},{}", fmt_float(*t), fmt_float(*e));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_entries() -> Vec<(String, f64, f64)> {
        vec![
            ("a".into(), 1.0, 2.0),
            ("b".into(), 3.0, 2.0),
            ("c".into(), 0.0, 5.0),
        ]
    }

    #[test]
    fn ratio_report_computes_ratios_and_extremes() {
        let r = RatioReport::new(
            "demo",
            sample_entries(),
            Some(0.01),
            serde_json::json!({"n": 64}),
        )
        .unwrap();
        assert_eq!(r.per_entry[0].ratio, 0.5);
        assert_eq!(r.max_ratio, 1.5);
        assert_eq!(r.min_ratio, 0.0);
    }

    #[test]
    fn ratio_report_rejects_degenerate_input() {
        assert!(RatioReport::new("e", vec![], None, serde_json::Value::Null).is_err());
        let zero_rhs = vec![("a".into(), 1.0, 0.0)];
        let err = RatioReport::new("z", zero_rhs, None, serde_json::Value::Null).unwrap_err();
        assert!(err.is_guard(), "vanishing rhs must trip the guard, got {err}");
        let negative = vec![("a".into(), -1.0, 1.0)];
        assert!(RatioReport::new("n", negative, None, serde_json::Value::Null).is_err());
    }

    #[test]
    fn serialization_is_reproducible_and_lossless() {
        let r = RatioReport::new(
            "demo",
            sample_entries(),
            None,
            serde_json::json!({"seed": 7, "alpha": 0.75}),
        )
        .unwrap();
        assert_eq!(r.to_csv(), r.to_csv());
        assert_eq!(r.to_json().unwrap(), r.to_json().unwrap());

        let back: RatioReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);

        let csv = r.to_csv();
        assert!(csv.contains("entry_id,lhs,rhs,ratio"));
        assert!(csv.contains("1.5000000000000000e0"));
    }

    #[test]
    fn convergence_report_flags_monotone_tail() {
        let t = vec![1.0, 2.0, 4.0, 8.0];
        let good = ConvergenceReport::new(
            "c",
            t.clone(),
            vec![0.5, 0.9, 0.4, 0.2],
            "annulus",
            serde_json::Value::Null,
        )
        .unwrap();
        assert!(good.monotone_tail);
        let bad = ConvergenceReport::new(
            "c",
            t.clone(),
            vec![0.5, 0.4, 0.2, 0.3],
            "annulus",
            serde_json::Value::Null,
        )
        .unwrap();
        assert!(!bad.monotone_tail);

        let not_increasing =
            ConvergenceReport::new("c", vec![1.0, 1.0], vec![0.1, 0.1], "p", serde_json::Value::Null);
        assert!(not_increasing.is_err());

        let csv = good.to_csv();
        assert!(csv.starts_with("# name: c\n"));
        assert!(csv.contains("t,sup_error"));
    }
}
