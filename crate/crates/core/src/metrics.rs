//! Prediction-quality metrics for flow forecasts.
//!
//! ```text
//! RMSE    = sqrt(mean((y − ŷ)²))
//! MAPE    = mean(|y − ŷ| / |y|) · 100
//! Err_max = max(|y − ŷ| / |y|) · 100
//! ```
//!
//! The percentage metrics are undefined when any target is zero; that is a
//! hard error here so the caller decides explicitly how to slice the data.
//! By construction `MAPE ≤ Err_max` (a mean never exceeds its max).

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("prediction length {predictions} does not match target length {targets}")]
    LengthMismatch { targets: usize, predictions: usize },
    #[error("metrics require at least one sample")]
    EmptyInput,
    #[error("target at index {index} is zero; percentage metrics are undefined")]
    ZeroTarget { index: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
}

/// Error summary of a prediction run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationReport<T> {
    pub n: usize,
    /// Root-mean-square error, in target units.
    pub rmse: T,
    /// Mean absolute percentage error \[%\].
    pub mape: T,
    /// Maximum absolute percentage error \[%\].
    pub err_max: T,
}

impl<T: Scalar> EvaluationReport<T> {
    pub fn csv_header() -> &'static str {
        "n,rmse,mape_pct,errmax_pct"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e}",
            self.n,
            self.rmse.widen(),
            self.mape.widen(),
            self.err_max.widen()
        )
    }
}

impl<T: Scalar> std::fmt::Display for EvaluationReport<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<12}{:>14}{:>12}{:>14}", "n", "RMSE", "MAPE / %", "Err_max / %")?;
        write!(
            f,
            "{:<12}{:>14.6}{:>12.4}{:>14.4}",
            self.n,
            self.rmse.widen(),
            self.mape.widen(),
            self.err_max.widen()
        )
    }
}

/// Evaluates predictions `yhat` against targets `y`.
pub fn evaluate<T: Scalar>(y: &[T], yhat: &[T]) -> Result<EvaluationReport<T>, MetricsError> {
    if y.len() != yhat.len() {
        return Err(MetricsError::LengthMismatch {
            targets: y.len(),
            predictions: yhat.len(),
        });
    }
    if y.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let hundred = T::of(100.0);
    let mut sq_sum = T::zero();
    let mut pct_sum = T::zero();
    let mut pct_max = T::zero();
    for (index, (&yi, &fi)) in y.iter().zip(yhat).enumerate() {
        if !yi.is_finite() || !fi.is_finite() {
            return Err(MetricsError::NonFinite { index });
        }
        if yi == T::zero() {
            return Err(MetricsError::ZeroTarget { index });
        }
        let err = yi - fi;
        sq_sum += err * err;
        let pct = (err / yi).abs() * hundred;
        pct_sum += pct;
        pct_max = pct_max.max(pct);
    }
    let n = T::of(y.len() as f64);
    Ok(EvaluationReport {
        n: y.len(),
        rmse: (sq_sum / n).sqrt(),
        mape: pct_sum / n,
        err_max: pct_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions_score_zero() {
        let y = [1.0, 2.0, 3.0];
        let r = evaluate(&y, &y).unwrap();
        assert_eq!((r.rmse, r.mape, r.err_max), (0.0, 0.0, 0.0));
        assert_eq!(r.n, 3);
    }

    #[test]
    fn hand_computed_two_sample_case() {
        // errors (1, −1): rmse = 1; percentages (50, 25) -> mape 37.5, max 50.
        let r = evaluate(&[2.0, 4.0], &[1.0, 5.0]).unwrap();
        assert_eq!(r.rmse, 1.0);
        assert_eq!(r.mape, 37.5);
        assert_eq!(r.err_max, 50.0);
    }

    #[test]
    fn single_sample() {
        let r = evaluate(&[1.0], &[0.0]).unwrap();
        assert_eq!((r.rmse, r.mape, r.err_max), (1.0, 100.0, 100.0));
    }

    #[test]
    fn negative_targets_keep_percentages_nonnegative() {
        let r = evaluate(&[-2.0, -4.0], &[-1.0, -5.0]).unwrap();
        assert_eq!(r.mape, 37.5);
        assert_eq!(r.err_max, 50.0);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            evaluate(&[1.0, 2.0], &[1.0]),
            Err(MetricsError::LengthMismatch { .. })
        ));
        assert!(matches!(evaluate::<f64>(&[], &[]), Err(MetricsError::EmptyInput)));
        assert!(matches!(
            evaluate(&[1.0, 0.0], &[1.0, 1.0]),
            Err(MetricsError::ZeroTarget { index: 1 })
        ));
        assert!(matches!(
            evaluate(&[1.0, f64::NAN], &[1.0, 1.0]),
            Err(MetricsError::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn csv_row_shape() {
        let r = evaluate(&[2.0, 4.0], &[1.0, 5.0]).unwrap();
        assert_eq!(EvaluationReport::<f64>::csv_header(), "n,rmse,mape_pct,errmax_pct");
        assert!(r.to_csv_row().starts_with("2,"));
    }
}
