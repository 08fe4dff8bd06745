//! Monte Carlo summaries and the deterministic trial runner.
//!
//! Trials run in parallel over rayon, but every trial draws from its own
//! stream and results are reduced in trial order, so the numbers do not
//! depend on the worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::specfun::NeumaierSum;

/// Summary statistics of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trials: u64,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
    pub seed: u64,
}

impl TrialReport {
    /// Summarise `values` (in the given order). Panics on an empty slice.
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        assert!(!values.is_empty(), "TrialReport needs at least one value");
        let n = values.len() as f64;
        let mut sum = NeumaierSum::default();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            sum.add(v);
            min = min.min(v);
            max = max.max(v);
        }
        let mean = sum.total() / n;
        let mut ss = NeumaierSum::default();
        for &v in values {
            let d = v - mean;
            ss.add(d * d);
        }
        let std_error = if values.len() > 1 && min < max { (ss.total() / (n - 1.0)).sqrt() / n.sqrt() } else { 0.0 };
        // rounding can push the mean a hair outside [min, max] for constant data
        let mean = mean.clamp(min, max);
        Self { trials: values.len() as u64, mean, std_error, min, max, seed }
    }

    /// `|mean - target| <= k * std_error`.
    pub fn within_se(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Evaluate `trial(t)` for `t in 0..trials` in parallel and return the
/// results in trial order.
pub fn run_trials<T, F>(trials: u64, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..trials).into_par_iter().map(trial).collect()
}

/// Compensated sum in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut s = NeumaierSum::default();
    for &v in values {
        s.add(v);
    }
    s.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_basic_moments() {
        let r = TrialReport::from_values(&[1.0, 2.0, 3.0, 4.0], 9);
        assert_eq!(r.trials, 4);
        assert_eq!(r.mean, 2.5);
        assert_eq!(r.min, 1.0);
        assert_eq!(r.max, 4.0);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((r.std_error - sd / 2.0).abs() < 1e-15);
        assert_eq!(r.seed, 9);
    }

    #[test]
    fn single_value_has_zero_error() {
        let r = TrialReport::from_values(&[0.1], 0);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.mean, 0.1);
    }

    #[test]
    fn trials_come_back_in_order() {
        let v = run_trials(1000, |t| t * 3);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 3 * i as u64));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut v = vec![1e16];
        v.extend(std::iter::repeat_n(1.0, 1000));
        v.push(-1e16);
        assert_eq!(compensated_sum(&v), 1000.0);
    }
}
