use crate::error::{Error, Result};
use crate::experiment::ExperimentConfig;
use crate::moments::MomentSet;

use super::{evolve_wzm, measure_moments, Propagator};

/// Hard cap on the per-mode cutoff; `25^4` amplitudes.
pub const DEFAULT_CUTOFF_CAP: usize = 24;

/// Outcome of the doubling convergence test.
#[derive(Clone, Debug)]
pub struct TruncationReport {
    /// Smallest scheduled cutoff whose moments agree with the next one.
    pub cutoff: usize,
    /// The next scheduled cutoff; `moments` are evaluated here.
    pub reference_cutoff: usize,
    /// Largest change in the signal moments between the two cutoffs.
    pub error_estimate: f64,
    pub moments: MomentSet,
    pub max_norm_drift: f64,
    /// Every evaluated `(cutoff, moments)` pair in schedule order.
    pub history: Vec<(usize, MomentSet)>,
}

/// `1, 2, 4, ...` up to `cap`, ending at `cap` itself.
pub fn cutoff_schedule(cap: usize) -> Vec<usize> {
    let mut schedule: Vec<usize> = std::iter::successors(Some(1usize), |n| Some(n * 2))
        .take_while(|&n| n <= cap)
        .collect();
    if schedule.last() != Some(&cap) && cap >= 1 {
        schedule.push(cap);
    }
    schedule
}

pub fn truncation_check(config: &ExperimentConfig, tol: f64) -> Result<TruncationReport> {
    truncation_check_with(config, tol, DEFAULT_CUTOFF_CAP)
}

pub fn truncation_check_with(config: &ExperimentConfig, tol: f64, cap: usize) -> Result<TruncationReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("truncation tolerance must be positive, got {tol}")));
    }
    if cap < 2 {
        return Err(Error::InvalidArgument(format!("cutoff cap must be at least 2, got {cap}")));
    }
    let schedule = cutoff_schedule(cap);
    let mut history: Vec<(usize, MomentSet)> = Vec::with_capacity(schedule.len());
    let mut max_norm_drift = 0.0f64;
    let mut last_change = f64::INFINITY;
    let mut last_pair = (0, 0);

    for &cutoff in &schedule {
        let evolution = evolve_wzm(config, cutoff, Propagator::Auto)?;
        max_norm_drift = max_norm_drift.max(evolution.max_norm_drift);
        let moments = measure_moments(&evolution.state);
        if let Some((previous_cutoff, previous)) = history.last() {
            let change = previous.max_deviation(&moments);
            last_change = change;
            last_pair = (*previous_cutoff, cutoff);
            if change < tol {
                let chosen = *previous_cutoff;
                history.push((cutoff, moments.clone()));
                return Ok(TruncationReport {
                    cutoff: chosen,
                    reference_cutoff: cutoff,
                    error_estimate: change,
                    moments,
                    max_norm_drift,
                    history,
                });
            }
        }
        history.push((cutoff, moments));
    }
    Err(Error::ConvergenceFailure {
        cap,
        tol,
        last_change,
        last_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_doubles_then_caps() {
        assert_eq!(cutoff_schedule(24), vec![1, 2, 4, 8, 16, 24]);
        assert_eq!(cutoff_schedule(16), vec![1, 2, 4, 8, 16]);
        assert_eq!(cutoff_schedule(3), vec![1, 2, 3]);
    }

    #[test]
    fn no_squeezing_converges_immediately() {
        let report = truncation_check(&ExperimentConfig::new(0.0, 0.5).unwrap(), 1e-12).unwrap();
        assert_eq!(report.cutoff, 1);
        assert_eq!(report.error_estimate, 0.0);
        assert!(report.moments.is_zero());
    }

    #[test]
    fn weak_squeezing_needs_small_cutoff() {
        let config = ExperimentConfig::new(0.1, 0.5).unwrap();
        let report = truncation_check(&config, 1e-8).unwrap();
        assert!(report.cutoff <= 4, "cutoff {}", report.cutoff);
        let n1 = 0.1f64.sinh().powi(2);
        assert!((report.moments.n_s1 - n1).abs() < 1e-8);
    }

    #[test]
    fn strong_squeezing_hits_the_cap() {
        // nbar1 = sinh^2(2) ~ 13.2; photon-number tails decay too slowly
        let config = ExperimentConfig::new(2.0, 0.5).unwrap();
        let err = truncation_check_with(&config, 1e-6, 8).unwrap_err();
        match err {
            Error::ConvergenceFailure { cap, last_pair, .. } => {
                assert_eq!(cap, 8);
                assert_eq!(last_pair, (4, 8));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let config = ExperimentConfig::new(0.1, 0.5).unwrap();
        assert!(truncation_check(&config, 0.0).is_err());
        assert!(truncation_check(&config, f64::NAN).is_err());
    }
}
