//! Saturation analysis of error series over growing truncation dimension.

use std::fmt;

use crate::error::{Error, Result};
use crate::trotter::ErrorSeries;

/// Default trailing-window length.
pub const DEFAULT_WINDOW: usize = 20;
/// Default relative band width.
pub const DEFAULT_RTOL: f64 = 0.05;
/// Lower limit on the band reference, for series that are essentially zero.
pub const PLATEAU_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PlateauVerdict {
    pub saturates: bool,
    /// Mean of the trailing window, when `saturates`.
    pub plateau_value: Option<f64>,
    /// First `d` from which every window passes, when `saturates`.
    pub onset_dimension: Option<usize>,
    pub window: usize,
    pub rtol: f64,
}

fn window_passes(values: &[f64], rtol: f64) -> (bool, f64) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (hi - lo <= rtol * mean.max(PLATEAU_FLOOR), mean)
}

/// Saturation test on the trailing `window` values: their spread must fit in
/// `rtol` times their mean.
pub fn detect_plateau(series: &ErrorSeries, window: usize, rtol: f64) -> Result<PlateauVerdict> {
    if window == 0 {
        return Err(Error::usage("plateau window must be >= 1"));
    }
    if !(rtol > 0.0 && rtol.is_finite()) {
        return Err(Error::usage(format!("plateau rtol must be positive, got {rtol}")));
    }
    if series.len() < 2 * window {
        return Err(Error::usage(format!(
            "series `{}` has {} rows; plateau detection with window {window} needs at least {}",
            series.state_label(),
            series.len(),
            2 * window
        )));
    }
    let values = series.values();
    let dims = series.dims();
    let last = values.len() - window;
    let (saturates, mean) = window_passes(&values[last..], rtol);
    if !saturates {
        return Ok(PlateauVerdict {
            saturates,
            plateau_value: None,
            onset_dimension: None,
            window,
            rtol,
        });
    }
    let mut start = last;
    while start > 0 && window_passes(&values[start - 1..start - 1 + window], rtol).0 {
        start -= 1;
    }
    Ok(PlateauVerdict {
        saturates,
        plateau_value: Some(mean),
        onset_dimension: Some(dims[start]),
        window,
        rtol,
    })
}

/// Verdict over all states of one problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemVerdict {
    ConsistentWithConvergence,
    /// Labels of the series that do not saturate.
    NonSaturating(Vec<String>),
}

impl ProblemVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemVerdict::ConsistentWithConvergence => "consistent-with-convergence",
            ProblemVerdict::NonSaturating(_) => "non-saturating",
        }
    }
}

impl fmt::Display for ProblemVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemVerdict::ConsistentWithConvergence => f.write_str(self.label()),
            ProblemVerdict::NonSaturating(labels) => write!(f, "{} ({})", self.label(), labels.join(", ")),
        }
    }
}

/// Combines per-state verdicts: the problem is consistent with convergence
/// only if every state saturates.
pub fn classify_verdicts<'a>(verdicts: impl IntoIterator<Item = (&'a str, &'a PlateauVerdict)>) -> ProblemVerdict {
    let failing: Vec<String> = verdicts
        .into_iter()
        .filter(|(_, v)| !v.saturates)
        .map(|(label, _)| label.to_string())
        .collect();
    if failing.is_empty() {
        ProblemVerdict::ConsistentWithConvergence
    } else {
        ProblemVerdict::NonSaturating(failing)
    }
}

pub fn classify_problem(series_per_state: &[ErrorSeries], window: usize, rtol: f64) -> Result<ProblemVerdict> {
    if series_per_state.is_empty() {
        return Err(Error::usage("no series to classify"));
    }
    let verdicts = series_per_state
        .iter()
        .map(|s| detect_plateau(s, window, rtol))
        .collect::<Result<Vec<_>>>()?;
    Ok(classify_verdicts(
        series_per_state.iter().map(ErrorSeries::state_label).zip(&verdicts),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, values: impl IntoIterator<Item = f64>) -> ErrorSeries {
        let rows = values.into_iter().enumerate().map(|(k, v)| (k + 3, v)).collect();
        ErrorSeries::new(label, 1000, 1.0, rows).unwrap()
    }

    #[test]
    fn constant_series_saturates_from_the_start() {
        let v = detect_plateau(&series("m0", vec![0.125; 30]), 10, 0.05).unwrap();
        assert!(v.saturates);
        assert_eq!(v.plateau_value, Some(0.125));
        assert_eq!(v.onset_dimension, Some(3));
        assert_eq!((v.window, v.rtol), (10, 0.05));
    }

    #[test]
    fn linear_growth_does_not_saturate() {
        let v = detect_plateau(&series("m0", (1..=40).map(|d| d as f64 / 100.0)), 10, 0.05).unwrap();
        assert!(!v.saturates);
        assert_eq!(v.plateau_value, None);
        assert_eq!(v.onset_dimension, None);
    }

    #[test]
    fn onset_after_transient() {
        let values = (0..40).map(|k| if k < 12 { 0.01 * k as f64 } else { 0.5 });
        let v = detect_plateau(&series("m0", values), 5, 0.01).unwrap();
        assert!(v.saturates);
        assert_eq!(v.onset_dimension, Some(12 + 3));
    }

    #[test]
    fn zero_series_uses_floor() {
        let v = detect_plateau(&series("m0", vec![0.0; 8]), 4, 0.05).unwrap();
        assert!(v.saturates);
        assert_eq!(v.plateau_value, Some(0.0));
    }

    #[test]
    fn short_series_and_bad_parameters() {
        let s = series("m0", vec![1.0; 19]);
        assert!(matches!(detect_plateau(&s, 10, 0.05), Err(Error::Usage(_))));
        assert!(detect_plateau(&s, 0, 0.05).is_err());
        assert!(detect_plateau(&s, 5, 0.0).is_err());
        assert!(detect_plateau(&s, 5, f64::NAN).is_err());
    }

    #[test]
    fn classification() {
        let flat: Vec<_> = (0..3).map(|m| series(&format!("m{m}"), vec![0.1 * (m + 1) as f64; 40])).collect();
        let verdict = classify_problem(&flat, 20, 0.05).unwrap();
        assert_eq!(verdict, ProblemVerdict::ConsistentWithConvergence);
        assert_eq!(verdict.to_string(), "consistent-with-convergence");

        let mut mixed = flat.clone();
        mixed.insert(1, series("m7", (1..=40).map(|d| d as f64 / 100.0)));
        let verdict = classify_problem(&mixed, 20, 0.05).unwrap();
        assert_eq!(verdict, ProblemVerdict::NonSaturating(vec!["m7".into()]));
        assert_eq!(verdict.label(), "non-saturating");
        assert!(classify_problem(&[], 20, 0.05).is_err());
    }
}
