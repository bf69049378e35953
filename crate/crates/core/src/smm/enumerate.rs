//! Exact expectation over all RUS trajectories.
//!
//! Each path (success at trial `i`, or switch to the digital stage) carries
//! the composed target-frame error channel of its trials as a
//! [`RotationMixture`]; the twirled Z error of that mixture, weighted by the
//! path probability, sums to the exact per-gate error rate.

use serde::Serialize;

use crate::error::Result;
use crate::pcec;
use crate::zchan::RotationMixture;

use super::montecarlo::switched_estimate;
use super::{effective_error_rate, trial_model, SmmConfig};

/// Default pruning threshold for product branches.
pub const DEFAULT_MIN_WEIGHT: f64 = 1e-24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationReport {
    /// Exact twirled Z error, `E[sin²φ]` over trajectories.
    pub p_l: f64,
    /// Second moment of the Monte-Carlo per-shot estimator: `sin⁴φ` on
    /// analog paths, the squared flip-averaged error on the switch path.
    pub second_moment: f64,
    /// Probability mass dropped by pruning; bounds the resulting error.
    pub pruned_weight: f64,
    /// `Σ_i Σ_{j≥1} q̄_j(2^i θ_L)` over the analog trials.
    pub error_weight: f64,
    /// Allowed gap to the analytic rate: `10 (Σ q̄)² + 2 p_digital p_analog`
    /// plus the pruned mass.
    pub remainder_bound: f64,
    pub max_branches: usize,
}

/// Target-frame error channel of one trial: teleported branch followed by
/// an independently sampled canceller branch.
pub fn trial_error_channel(config: &SmmConfig, theta_rus: f64) -> Result<(RotationMixture, f64)> {
    let model = trial_model(config, theta_rus)?;
    let set = pcec::channel_set(&model)?;
    Ok((set.composed_error, model.error_weight()))
}

pub fn enumerate_trajectories(config: &SmmConfig, min_weight: f64) -> Result<EnumerationReport> {
    let report = effective_error_rate(config)?;
    let x = config.theta_l.abs();

    let mut prefix = RotationMixture::identity();
    let mut p_l = 0.0;
    let mut second_moment = 0.0;
    let mut pruned = 0.0;
    let mut error_weight = 0.0;
    let mut max_branches = 1;

    for i in 0..report.n_rus {
        let reach = 0.5f64.powi(i as i32);
        let (err, w) = trial_error_channel(config, x * 2f64.powi(i as i32))?;
        error_weight += w;

        let success = prefix.compose_pruned(&err, min_weight);
        let path = 0.5 * reach;
        p_l += path * success.twirled_z_error(0.0);
        second_moment += path * success.twirled_z_second_moment(0.0);
        pruned += path * (1.0 - success.total_weight()).max(0.0);
        max_branches = max_branches.max(success.len());

        // A failed trial applies the mirrored channel.
        prefix = prefix.compose_pruned(&err.mirrored(), min_weight);
    }

    let digital = RotationMixture::stochastic_z(report.p_digital)?;
    let switched = prefix.compose(&digital);
    p_l += report.p_switch * switched.twirled_z_error(0.0);
    second_moment += report.p_switch
        * prefix
            .branches()
            .iter()
            .map(|b| b.weight * switched_estimate(b.angle.sin().powi(2), report.p_digital).powi(2))
            .sum::<f64>();
    pruned += report.p_switch * (1.0 - prefix.total_weight()).max(0.0);
    max_branches = max_branches.max(switched.len());

    let remainder_bound =
        10.0 * error_weight * error_weight + 2.0 * report.p_digital * report.p_analog + pruned;
    Ok(EnumerationReport {
        p_l,
        second_moment,
        pruned_weight: pruned,
        error_weight,
        remainder_bound,
        max_branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smm::ThresholdPolicy;
    use crate::tmr::TmrParams;

    #[test]
    fn pure_digital_matches_flip_probability() {
        let c = SmmConfig::new(1e-3, ThresholdPolicy::Fixed(1e-3), TmrParams::new(5, 1e-3).unwrap());
        let e = enumerate_trajectories(&c, DEFAULT_MIN_WEIGHT).unwrap();
        let a = effective_error_rate(&c).unwrap();
        assert!((e.p_l - a.p_l).abs() < 1e-20);
    }

    #[test]
    fn enumeration_tracks_analytic_rate() {
        let tmr = TmrParams::geometric(5, 1e-3, 0.05).unwrap();
        for (x, th) in [(1e-5, 0.01), (1e-4, 6e-3), (1e-3, 2e-3)] {
            let c = SmmConfig::new(x, ThresholdPolicy::Fixed(th), tmr.clone());
            let e = enumerate_trajectories(&c, DEFAULT_MIN_WEIGHT).unwrap();
            let a = effective_error_rate(&c).unwrap();
            assert!((e.p_l - a.p_l).abs() <= e.remainder_bound, "{x} {th}");
            assert!(e.second_moment <= e.p_l);
        }
    }

    #[test]
    fn leading_mode_uses_single_flip() {
        let tmr = TmrParams::geometric(7, 1e-3, 0.05).unwrap();
        let mut c = SmmConfig::new(1e-6, ThresholdPolicy::Ratio(256.0), tmr);
        c.include_higher_orders = false;
        let e = enumerate_trajectories(&c, DEFAULT_MIN_WEIGHT).unwrap();
        let a = effective_error_rate(&c).unwrap();
        assert!((e.p_l - a.p_l).abs() <= e.remainder_bound);
    }
}
