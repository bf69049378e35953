//! Seeded trajectory sampler for the RUS engine.
//!
//! Shots are grouped in fixed blocks; block `b` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, so a run is fully
//! determined by `(seed, shots)` whatever the number of worker threads.
//! Block sums are reduced in block order.
//!
//! The per-shot estimator is the twirled Z error `sin²φ` of the accumulated
//! angle. The digital-stage Z flip is not sampled: with rates near `p_m` it
//! almost never fires in a feasible run, so on the switch path the flip is
//! averaged out exactly (see [`switched_estimate`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::zchan::pure_rotation;

use super::{effective_error_rate, trial_model, SmmConfig};

pub const BLOCK_SHOTS: u64 = 4096;

/// Expected twirled error after a Z flip with probability `p_digital`,
/// given error `e = sin²φ` before it: `(1 - p) e + p (1 - e)`.
pub fn switched_estimate(e: f64, p_digital: f64) -> f64 {
    (1.0 - p_digital) * e + p_digital * (1.0 - e)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub shots: u64,
    pub seed: u64,
    /// Mean of the per-shot twirled Z error `sin²φ`.
    pub p_l: f64,
    pub p_l_stderr: f64,
    pub mean_clocks: f64,
    pub clocks_stderr: f64,
    pub p_switch: f64,
    pub p_switch_stderr: f64,
}

struct Trial {
    cumulative: Vec<f64>,
    over_rotation: Vec<f64>,
    clocks: f64,
}

impl Trial {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let idx = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1);
        self.over_rotation[idx]
    }
}

#[derive(Default, Clone, Copy)]
struct Sums {
    error: f64,
    error_sq: f64,
    clocks: f64,
    clocks_sq: f64,
    switches: u64,
}

impl Sums {
    fn add(mut self, o: Sums) -> Sums {
        self.error += o.error;
        self.error_sq += o.error_sq;
        self.clocks += o.clocks;
        self.clocks_sq += o.clocks_sq;
        self.switches += o.switches;
        self
    }
}

/// Simulates `shots` independent gates.
pub fn monte_carlo(config: &SmmConfig, shots: u64, seed: u64) -> Result<MonteCarloReport> {
    if shots == 0 {
        return Err(invalid("shots must be at least 1"));
    }
    let report = effective_error_rate(config)?;
    let x = config.theta_l.abs();

    let mut trials = Vec::with_capacity(report.n_rus as usize);
    for t in &report.trials {
        let model = trial_model(config, x * 2f64.powi(t.index as i32))?;
        let theta0 = model.branches[0].theta_j;
        let mut acc = 0.0;
        let cumulative = model
            .branches
            .iter()
            .map(|b| {
                acc += b.qbar_j;
                acc
            })
            .collect();
        let over_rotation = model.branches.iter().map(|b| b.theta_j - theta0).collect();
        trials.push(Trial {
            cumulative,
            over_rotation,
            clocks: t.clocks,
        });
    }
    let t_digital = f64::from(report.n_syn) * config.t_gate_clocks();
    let p_digital = report.p_digital;

    let blocks = shots.div_ceil(BLOCK_SHOTS);
    let sums: Vec<Sums> = (0..blocks)
        .into_par_iter()
        .map(|block| -> Result<Sums> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let n = BLOCK_SHOTS.min(shots - block * BLOCK_SHOTS);
            let mut s = Sums::default();
            for _ in 0..n {
                let mut phi = 0.0;
                let mut clocks = 0.0;
                let mut switched = true;
                for trial in &trials {
                    clocks += trial.clocks;
                    let err = trial.sample(&mut rng) - trial.sample(&mut rng);
                    if rng.random::<bool>() {
                        phi += err;
                        switched = false;
                        break;
                    }
                    phi -= err;
                }
                let mut e = pure_rotation(phi)?.twirled_z_error(0.0);
                if switched {
                    s.switches += 1;
                    clocks += t_digital;
                    e = switched_estimate(e, p_digital);
                }
                s.error += e;
                s.error_sq += e * e;
                s.clocks += clocks;
                s.clocks_sq += clocks * clocks;
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let total = sums.into_iter().fold(Sums::default(), Sums::add);

    let n = shots as f64;
    let stderr = |sum: f64, sum_sq: f64| {
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        (var / n).sqrt()
    };
    let p_switch = total.switches as f64 / n;
    Ok(MonteCarloReport {
        shots,
        seed,
        p_l: total.error / n,
        p_l_stderr: stderr(total.error, total.error_sq),
        mean_clocks: total.clocks / n,
        clocks_stderr: stderr(total.clocks, total.clocks_sq),
        p_switch,
        p_switch_stderr: (p_switch * (1.0 - p_switch) / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smm::ThresholdPolicy;
    use crate::tmr::TmrParams;

    fn config() -> SmmConfig {
        SmmConfig::new(1e-4, ThresholdPolicy::Fixed(6e-3), TmrParams::geometric(5, 1e-3, 0.05).unwrap())
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let a = monte_carlo(&config(), 20_000, 42).unwrap();
        let b = monte_carlo(&config(), 20_000, 42).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo(&config(), 20_000, 43).unwrap();
        assert_ne!(a.mean_clocks, c.mean_clocks);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| monte_carlo(&config(), 50_000, 9).unwrap());
        let b = four.install(|| monte_carlo(&config(), 50_000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn switch_rate_and_clocks_match_analytics() {
        let c = config();
        let a = effective_error_rate(&c).unwrap();
        let mc = monte_carlo(&c, 200_000, 1).unwrap();
        assert!((mc.p_switch - a.p_switch).abs() < 4.0 * (a.p_switch * (1.0 - a.p_switch) / 2e5).sqrt());
        assert!((mc.mean_clocks - a.expected_clocks).abs() < 4.0 * mc.clocks_stderr);
    }

    #[test]
    fn digital_flip_is_averaged() {
        assert_eq!(switched_estimate(0.0, 0.25), 0.25);
        assert_eq!(switched_estimate(1.0, 0.25), 0.75);
        assert_eq!(switched_estimate(0.3, 0.0), 0.3);
    }

    #[test]
    fn error_rate_matches_enumeration() {
        let tmr = crate::smm::calibrated_params(7, 1e-3).unwrap();
        let c = SmmConfig::new(1e-3, ThresholdPolicy::Fixed(6e-3), tmr);
        let e = crate::smm::enumerate_trajectories(&c, 1e-24).unwrap();
        let shots = 200_000;
        let mc = monte_carlo(&c, shots, 3).unwrap();
        let sigma = ((e.second_moment - e.p_l * e.p_l) / shots as f64).sqrt();
        assert!((mc.p_l - e.p_l).abs() <= 4.0 * sigma, "{} vs {} ({sigma})", mc.p_l, e.p_l);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(monte_carlo(&config(), 0, 1).is_err());
    }
}
