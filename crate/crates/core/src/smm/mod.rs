//! Repeat-until-success rotation engine with an analog and a digital stage.
//!
//! Analog stage: teleport a TMR resource state for the current angle
//! `θ_RUS`, cancel its coherent over-rotation, and on failure (probability
//! 1/2) double the angle. Once `θ_RUS` reaches the threshold `θ_th` the
//! remaining rotation is synthesised from magic states (digital stage).
//!
//! Trial `i` (angle `2^i θ_L`) runs with probability `2^{-i}` and the
//! digital stage with probability `2^{-N}`, `N = ⌈log₂(θ_th/θ_L)⌉`. Error
//! rates and clocks are the corresponding weighted sums.

pub mod calibration;
pub mod enumerate;
pub mod montecarlo;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::pcec;
use crate::tmr::{model_for_logical_angle, physical_angle_for, supply_time, TmrOutputModel, TmrParams};

pub use calibration::{calibrate_pass_coefficient, calibrated_params, v2_rus_factor};
pub use enumerate::{enumerate_trajectories, EnumerationReport};
pub use montecarlo::{monte_carlo, MonteCarloReport};

pub const DEFAULT_P_M: f64 = 2e-9;
pub const DEFAULT_T_M: f64 = 10.0;
pub const DEFAULT_N_PREP: u32 = 2;
pub const DEFAULT_TELEPORT_CLOCKS: f64 = 1.0;
/// Thresholds are capped here so doubled angles stay below π/4.
pub const MAX_THRESHOLD: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// Absolute `θ_th`.
    Fixed(f64),
    /// `θ_th = r θ_L`.
    Ratio(f64),
}

impl ThresholdPolicy {
    /// Threshold for `|theta_l|`, capped at [`MAX_THRESHOLD`].
    pub fn threshold(&self, theta_l: f64) -> f64 {
        let t = match *self {
            ThresholdPolicy::Fixed(t) => t,
            ThresholdPolicy::Ratio(r) => r * theta_l.abs(),
        };
        t.min(MAX_THRESHOLD)
    }

    fn validate(&self) -> Result<()> {
        let v = match *self {
            ThresholdPolicy::Fixed(t) => t,
            ThresholdPolicy::Ratio(r) => r,
        };
        ensure_finite("threshold", v)?;
        if v <= 0.0 {
            return Err(invalid(format!("threshold must be positive, got {v}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// `δ = max(p_m, 0.1 · 2^N · p_analog)`.
    #[default]
    Balanced,
    Fixed(f64),
}

/// How analog errors on the path that ends in the digital stage are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchPathAccounting {
    /// Every executed trial contributes its residual: `Σ_i 2^{-i} r_i`.
    #[default]
    Trajectory,
    /// Only paths that end in the analog stage: `Σ_m 2^{-m} Σ_{i<m} r_i`.
    AnalogEndingOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmmConfig {
    pub theta_l: f64,
    pub threshold: ThresholdPolicy,
    pub tmr: TmrParams,
    pub p_m: f64,
    pub t_m: f64,
    pub n_prep_patches: u32,
    pub delta_policy: DeltaPolicy,
    pub gate_teleport_clocks: f64,
    pub include_higher_orders: bool,
    pub switch_accounting: SwitchPathAccounting,
}

impl SmmConfig {
    pub fn new(theta_l: f64, threshold: ThresholdPolicy, tmr: TmrParams) -> Self {
        Self {
            theta_l,
            threshold,
            tmr,
            p_m: DEFAULT_P_M,
            t_m: DEFAULT_T_M,
            n_prep_patches: DEFAULT_N_PREP,
            delta_policy: DeltaPolicy::Balanced,
            gate_teleport_clocks: DEFAULT_TELEPORT_CLOCKS,
            include_higher_orders: true,
            switch_accounting: SwitchPathAccounting::Trajectory,
        }
    }

    pub fn with_p_m(mut self, p_m: f64) -> Self {
        self.p_m = p_m;
        self
    }

    pub fn with_n_prep(mut self, n: u32) -> Self {
        self.n_prep_patches = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("theta_L", self.theta_l)?;
        self.threshold.validate()?;
        self.tmr.validate()?;
        ensure_finite("p_m", self.p_m)?;
        if !(0.0..=1e-3).contains(&self.p_m) {
            return Err(invalid(format!("p_m must lie in [0, 1e-3], got {}", self.p_m)));
        }
        ensure_finite("t_m", self.t_m)?;
        if self.t_m < 1.0 {
            return Err(invalid(format!("t_m must be at least 1 clock, got {}", self.t_m)));
        }
        if self.n_prep_patches < 1 {
            return Err(invalid("n_prep_patches must be at least 1"));
        }
        ensure_finite("gate_teleport_clocks", self.gate_teleport_clocks)?;
        if self.gate_teleport_clocks < 0.0 {
            return Err(invalid("gate_teleport_clocks must be non-negative"));
        }
        if let DeltaPolicy::Fixed(d) = self.delta_policy {
            ensure_finite("delta", d)?;
            if !(0.0..1.0).contains(&d) {
                return Err(invalid(format!("fixed delta must lie in [0, 1), got {d}")));
            }
        }
        Ok(())
    }

    pub fn threshold_angle(&self) -> f64 {
        self.threshold.threshold(self.theta_l)
    }

    /// Number of analog trials, 0 when `|θ_L| ≥ θ_th`.
    pub fn analog_trials(&self) -> u32 {
        let x = self.theta_l.abs();
        let th = self.threshold_angle();
        if x == 0.0 || x >= th {
            0
        } else {
            n_rus(x, th).unwrap_or(0)
        }
    }

    /// Time of one T gate in the digital stage.
    pub fn t_gate_clocks(&self) -> f64 {
        (self.t_m / f64::from(self.n_prep_patches)).max(self.gate_teleport_clocks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialEntry {
    pub index: u32,
    pub theta_rus: f64,
    pub residual: f64,
    pub clocks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmmReport {
    pub theta_l: f64,
    pub theta_th: f64,
    pub n_rus: u32,
    pub p_switch: f64,
    pub p_analog: f64,
    pub delta: f64,
    pub n_syn: u32,
    /// Z-flip probability of the digital stage, `δ + p_m N_syn`.
    pub p_digital: f64,
    pub p_l: f64,
    pub alpha_rus: f64,
    pub expected_clocks: f64,
    /// Set when `|θ_L| ≤ p_ph^{k/2}`, outside the scaling regime.
    pub out_of_regime: bool,
    pub trials: Vec<TrialEntry>,
}

/// TMR branch table used for the trial at `theta_rus`; in leading-order
/// mode only the single-flip branch is kept.
pub(crate) fn trial_model(config: &SmmConfig, theta_rus: f64) -> Result<TmrOutputModel> {
    let mut model = model_for_logical_angle(&config.tmr, theta_rus)?;
    if !config.include_higher_orders {
        model.branches.truncate(2);
        let err = model.error_weight();
        model.branches[0].qbar_j = 1.0 - err;
    }
    Ok(model)
}

/// `⌈log₂(θ_th/θ_L)⌉`, computed exactly by doubling.
pub fn n_rus(theta_l: f64, theta_th: f64) -> Result<u32> {
    ensure_finite("theta_L", theta_l)?;
    ensure_finite("theta_th", theta_th)?;
    if theta_l <= 0.0 {
        return Err(invalid(format!("theta_L must be positive, got {theta_l}")));
    }
    if theta_l > theta_th {
        return Err(invalid(format!(
            "theta_L = {theta_l} exceeds the threshold {theta_th}; use pure synthesis"
        )));
    }
    let mut n = 0;
    let mut x = theta_l;
    while x < theta_th {
        x *= 2.0;
        n += 1;
    }
    Ok(n)
}

/// `2^{-N_RUS}`.
pub fn switch_probability(theta_l: f64, theta_th: f64) -> Result<f64> {
    Ok(0.5f64.powi(n_rus(theta_l, theta_th)? as i32))
}

/// `⌈3 log₂(1/δ)⌉`.
pub fn n_syn(delta: f64) -> u32 {
    if delta >= 1.0 {
        0
    } else {
        (3.0 * (1.0 / delta).log2()).ceil() as u32
    }
}

/// `δ = max(p_m, 0.1 · 2^N · p_analog)` and its T count.
pub fn synthesis_budget(p_analog: f64, n_rus: u32, p_m: f64) -> Result<(f64, u32)> {
    ensure_finite("p_analog", p_analog)?;
    ensure_finite("p_m", p_m)?;
    if p_analog < 0.0 || p_m < 0.0 {
        return Err(invalid("synthesis budget inputs must be non-negative"));
    }
    let delta = p_m.max(0.1 * 2f64.powi(n_rus as i32) * p_analog);
    if delta == 0.0 {
        return Err(Error::Degenerate(
            "synthesis accuracy is zero; supply an explicit delta".into(),
        ));
    }
    Ok((delta, n_syn(delta)))
}

/// Error rate and cost of a synthesis-only rotation at accuracy `delta`:
/// `(δ + p_m N_syn, N_syn · t_T)`.
pub fn synthesis_only(delta: f64, config: &SmmConfig) -> Result<(f64, f64)> {
    ensure_finite("delta", delta)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let n = n_syn(delta);
    Ok((delta + config.p_m * f64::from(n), f64::from(n) * config.t_gate_clocks()))
}

/// Analytic error rate, RUS factor and expected clocks of one gate.
pub fn effective_error_rate(config: &SmmConfig) -> Result<SmmReport> {
    config.validate()?;
    let x = config.theta_l.abs();
    let theta_th = config.threshold_angle();
    let p = config.tmr.p_ph;

    if x == 0.0 {
        return Ok(SmmReport {
            theta_l: config.theta_l,
            theta_th,
            n_rus: 0,
            p_switch: 0.0,
            p_analog: 0.0,
            delta: 0.0,
            n_syn: 0,
            p_digital: 0.0,
            p_l: 0.0,
            alpha_rus: 0.0,
            expected_clocks: 0.0,
            out_of_regime: false,
            trials: Vec::new(),
        });
    }

    let n = config.analog_trials();
    let mut trials = Vec::with_capacity(n as usize);
    for i in 0..n {
        let theta_rus = x * 2f64.powi(i as i32);
        let residual = pcec::residual_at(&config.tmr, theta_rus, !config.include_higher_orders)?;
        let supply = supply_time(&config.tmr, physical_angle_for(theta_rus, config.tmr.k)?)?;
        let clocks = (supply / f64::from(config.n_prep_patches)).max(config.gate_teleport_clocks);
        trials.push(TrialEntry {
            index: i,
            theta_rus,
            residual,
            clocks,
        });
    }

    let p_switch = 0.5f64.powi(n as i32);
    let p_analog: f64 = trials
        .iter()
        .map(|t| {
            let reach = 0.5f64.powi(t.index as i32);
            let weight = match config.switch_accounting {
                SwitchPathAccounting::Trajectory => reach,
                SwitchPathAccounting::AnalogEndingOnly => reach - p_switch,
            };
            weight * t.residual
        })
        .sum();

    let (delta, n_syn) = match config.delta_policy {
        DeltaPolicy::Fixed(d) if d == 0.0 => (0.0, 0),
        DeltaPolicy::Fixed(d) => (d, n_syn(d)),
        DeltaPolicy::Balanced => match synthesis_budget(p_analog, n, config.p_m) {
            Ok(v) => v,
            // Noiseless magic states and no analog error: exact digital stage.
            Err(Error::Degenerate(_)) => (0.0, 0),
            Err(e) => return Err(e),
        },
    };
    let p_digital = delta + config.p_m * f64::from(n_syn);
    let p_l = p_analog + p_switch * p_digital;

    let t_digital = f64::from(n_syn) * config.t_gate_clocks();
    let expected_clocks = trials
        .iter()
        .map(|t| 0.5f64.powi(t.index as i32) * t.clocks)
        .sum::<f64>()
        + p_switch * t_digital;

    let denom = x * p;
    let alpha_rus = if p_l == 0.0 {
        0.0
    } else if denom > 0.0 {
        p_l / denom
    } else {
        f64::INFINITY
    };

    Ok(SmmReport {
        theta_l: config.theta_l,
        theta_th,
        n_rus: n,
        p_switch,
        p_analog,
        delta,
        n_syn,
        p_digital,
        p_l,
        alpha_rus,
        expected_clocks,
        out_of_regime: x <= p.powf(config.tmr.k as f64 / 2.0),
        trials,
    })
}

/// Expected clocks of one gate (see [`effective_error_rate`]).
pub fn expected_clocks(config: &SmmConfig) -> Result<f64> {
    Ok(effective_error_rate(config)?.expected_clocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(theta_l: f64, threshold: ThresholdPolicy, k: u32, p: f64) -> SmmConfig {
        SmmConfig::new(theta_l, threshold, TmrParams::new(k, p).unwrap())
    }

    #[test]
    fn n_rus_examples() {
        assert_eq!(n_rus(1e-3, 1e-3).unwrap(), 0);
        let x = 3.7e-6;
        assert_eq!(n_rus(x, 128.0 * x).unwrap(), 7);
        assert_eq!(n_rus(1e-5, 0.05).unwrap(), 13);
        assert!(n_rus(2e-3, 1e-3).is_err());
        assert!(n_rus(0.0, 1e-3).is_err());
    }

    #[test]
    fn switch_probability_examples() {
        assert_eq!(switch_probability(0.01, 0.01).unwrap(), 1.0);
        assert_eq!(switch_probability(1e-6, 128e-6).unwrap(), 0.0078125);
        let p = switch_probability(1e-5, 0.05).unwrap();
        assert_eq!(p, 2f64.powi(-13));
        assert!((p - 1.220703125e-4).abs() < 1e-18);
    }

    #[test]
    fn synthesis_budget_examples() {
        assert_eq!(synthesis_budget(0.0, 5, 2e-9).unwrap(), (2e-9, 87));
        let p_analog = 1e-6 / (0.1 * 2f64.powi(4));
        let (d, n) = synthesis_budget(p_analog, 4, 2e-9).unwrap();
        assert!((d - 1e-6).abs() < 1e-21);
        assert_eq!(n, 60);
        assert!(matches!(synthesis_budget(0.0, 3, 0.0), Err(Error::Degenerate(_))));
        let mut last = 0.0;
        for e in -12..-2 {
            let (d, _) = synthesis_budget(10f64.powi(e), 6, 2e-9).unwrap();
            assert!(d >= last);
            last = d;
        }
    }

    #[test]
    fn noiseless_gate_has_no_error() {
        let c = cfg(1e-4, ThresholdPolicy::Ratio(128.0), 5, 0.0).with_p_m(0.0);
        let r = effective_error_rate(&c).unwrap();
        assert_eq!(r.p_l, 0.0);
        assert_eq!(r.alpha_rus, 0.0);
        assert_eq!(r.n_syn, 0);
    }

    #[test]
    fn report_matches_reference_evaluation() {
        // Independent evaluation of the same model at c_1 fitted for p = 1e-3.
        let tmr = TmrParams::geometric(7, 1e-3, 0.03674795981816896).unwrap();
        let c = SmmConfig::new(1e-5, ThresholdPolicy::Fixed(0.01), tmr.clone()).with_p_m(0.0);
        let r = effective_error_rate(&c).unwrap();
        assert_eq!(r.n_rus, 10);
        assert_eq!(r.n_syn, 74);
        assert!(((r.delta - 4.276507973947029e-08) / r.delta).abs() < 1e-9);
        assert!(((r.alpha_rus - 0.045939050501384096) / r.alpha_rus).abs() < 1e-9);

        let c = SmmConfig::new(1e-5, ThresholdPolicy::Fixed(0.01), tmr);
        let r = effective_error_rate(&c).unwrap();
        assert!(((r.alpha_rus - 0.0603921755013841) / r.alpha_rus).abs() < 1e-9);
        assert!((r.alpha_rus - r.p_l / (1e-5 * 1e-3)).abs() < 1e-15);
    }

    #[test]
    fn analog_ending_accounting_drops_switch_path() {
        let tmr = TmrParams::geometric(7, 1e-3, 0.05).unwrap();
        let mut c = SmmConfig::new(1e-5, ThresholdPolicy::Fixed(0.01), tmr).with_p_m(0.0);
        let full = effective_error_rate(&c).unwrap();
        c.switch_accounting = SwitchPathAccounting::AnalogEndingOnly;
        let lit = effective_error_rate(&c).unwrap();
        let missing: f64 = full.trials.iter().map(|t| t.residual).sum::<f64>() * full.p_switch;
        assert!(((full.p_analog - lit.p_analog) - missing).abs() < 1e-12 * full.p_analog);
    }

    #[test]
    fn threshold_at_or_below_angle_is_pure_digital() {
        let c = cfg(1e-3, ThresholdPolicy::Fixed(1e-3), 5, 1e-3);
        let r = effective_error_rate(&c).unwrap();
        assert_eq!(r.n_rus, 0);
        assert_eq!(r.p_switch, 1.0);
        assert_eq!(r.n_syn, 87);
        assert!((r.expected_clocks - 87.0 * 5.0).abs() < 1e-12);
        assert!((r.p_l - (2e-9 + 87.0 * 2e-9)).abs() < 1e-22);
    }

    #[test]
    fn negative_and_zero_angles() {
        let pos = effective_error_rate(&cfg(2e-5, ThresholdPolicy::Ratio(64.0), 5, 1e-3)).unwrap();
        let neg = effective_error_rate(&cfg(-2e-5, ThresholdPolicy::Ratio(64.0), 5, 1e-3)).unwrap();
        assert_eq!(pos.p_l, neg.p_l);
        assert_eq!(pos.expected_clocks, neg.expected_clocks);
        let zero = effective_error_rate(&cfg(0.0, ThresholdPolicy::Ratio(64.0), 5, 1e-3)).unwrap();
        assert_eq!(zero.p_l, 0.0);
    }

    #[test]
    fn threshold_is_capped() {
        let c = cfg(0.1, ThresholdPolicy::Ratio(64.0), 5, 1e-3);
        assert_eq!(c.threshold_angle(), MAX_THRESHOLD);
        assert_eq!(effective_error_rate(&c).unwrap().n_rus, 2);
    }

    #[test]
    fn out_of_regime_flag() {
        let c = cfg(1e-8, ThresholdPolicy::Ratio(128.0), 7, 1e-3);
        assert!(!effective_error_rate(&c).unwrap().out_of_regime);
        let c = cfg(1e-8, ThresholdPolicy::Ratio(128.0), 5, 1e-3);
        assert!(effective_error_rate(&c).unwrap().out_of_regime);
        let c = cfg(1e-8, ThresholdPolicy::Ratio(128.0), 3, 1e-3);
        assert!(effective_error_rate(&c).unwrap().out_of_regime);
    }

    #[test]
    fn synthesis_only_cost() {
        let c = cfg(1e-5, ThresholdPolicy::Ratio(1.0), 7, 1e-3);
        let (p, t) = synthesis_only(2e-9, &c).unwrap();
        assert!((p - 88.0 * 2e-9).abs() < 1e-22);
        assert_eq!(t, 435.0);
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(1e-5, ThresholdPolicy::Fixed(0.01), 5, 1e-3);
        c.p_m = 0.1;
        assert!(c.validate().is_err());
        let mut c = cfg(1e-5, ThresholdPolicy::Fixed(-0.01), 5, 1e-3);
        assert!(c.validate().is_err());
        c.threshold = ThresholdPolicy::Fixed(0.01);
        c.t_m = 0.5;
        assert!(c.validate().is_err());
        c.t_m = 10.0;
        c.n_prep_patches = 0;
        assert!(c.validate().is_err());
    }

    proptest! {
        #[test]
        fn report_invariants(e in -8.0f64..-3.0, r in 1.0f64..5000.0, k in 3u32..10) {
            let x = 10f64.powf(e);
            let c = cfg(x, ThresholdPolicy::Ratio(r), k, 1e-3);
            let rep = effective_error_rate(&c).unwrap();
            prop_assert!(rep.p_l >= 0.0 && rep.p_l < 1.0);
            prop_assert_eq!(rep.alpha_rus, rep.p_l / (x * 1e-3));
            let th = rep.theta_th;
            prop_assert!(rep.p_switch <= x / th * (1.0 + 1e-12));
            prop_assert!(rep.p_switch > x / (2.0 * th));
        }

        #[test]
        fn clocks_grow_with_magic_state_time(e in -7.0f64..-3.0, n in 0u32..12, t1 in 1.0f64..50.0, dt in 0.0f64..50.0) {
            let x = 10f64.powf(e);
            let mut c = cfg(x, ThresholdPolicy::Ratio(2f64.powi(n as i32)), 7, 1e-3);
            c.t_m = t1;
            let a = expected_clocks(&c).unwrap();
            c.t_m = t1 + dt;
            prop_assert!(expected_clocks(&c).unwrap() >= a);
        }

        #[test]
        fn analog_clocks_grow_with_trials(e in -7.0f64..-3.0, n in 0u32..12) {
            let x = 10f64.powf(e);
            let analog = |n: u32| {
                let c = cfg(x, ThresholdPolicy::Ratio(2f64.powi(n as i32)), 7, 1e-3);
                let r = effective_error_rate(&c).unwrap();
                r.expected_clocks - r.p_switch * f64::from(r.n_syn) * c.t_gate_clocks()
            };
            prop_assert!(analog(n + 1) >= analog(n));
        }
    }
}
