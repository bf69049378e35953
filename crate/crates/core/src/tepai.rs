//! TE-PAI cost model and surface-code resource estimate.
//!
//! TE-PAI replaces every Trotter rotation by a random rotation of a single
//! fixed angle `Δ`. The expected gate count per shot and the sampling
//! overhead trade off through `Δ = atan(Q / 2λT)`:
//! `N_gate = 2(λT)²/Q + Q` and `γ² = e^Q`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::mitigation::AlphaModel;

pub const DEFAULT_C_SMM: f64 = 3.0;
pub const DEFAULT_CYCLE_SECONDS: f64 = 1e-6;
pub const MAX_DISTANCE: u32 = 99;
/// Safety factor in the code-distance condition.
pub const DISTANCE_MARGIN: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TepaiInstance {
    pub lambda: f64,
    pub t: f64,
    pub q: f64,
    pub epsilon: f64,
    pub n_l: u64,
    pub p_ph: f64,
    /// Clocks per rotation.
    pub c_smm: f64,
    pub cycle_seconds: f64,
    pub alpha: AlphaModel,
}

impl TepaiInstance {
    /// `Q = 1`, `ε = 0.05`, `p_ph = 1e-3`, `C_smm = 3`, 1 µs cycles.
    pub fn new(lambda: f64, t: f64, n_l: u64, alpha: AlphaModel) -> Self {
        Self {
            lambda,
            t,
            q: 1.0,
            epsilon: 0.05,
            n_l,
            p_ph: 1e-3,
            c_smm: DEFAULT_C_SMM,
            cycle_seconds: DEFAULT_CYCLE_SECONDS,
            alpha,
        }
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda * self.t
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("T", self.t),
            ("Q", self.q),
            ("epsilon", self.epsilon),
            ("p_ph", self.p_ph),
            ("C_smm", self.c_smm),
            ("cycle time", self.cycle_seconds),
        ] {
            ensure_finite(name, v)?;
            if v <= 0.0 {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.epsilon >= 1.0 {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.n_l == 0 {
            return Err(invalid("N_L must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TepaiEstimate {
    pub delta_angle: f64,
    pub n_gate: f64,
    pub gamma_inf_sq: f64,
    pub n_s: u64,
    pub d: u32,
    pub n_patch: u64,
    pub physical_qubits: u64,
    pub single_shot_seconds: f64,
    pub total_seconds: f64,
    pub alpha: f64,
    pub p_total: f64,
    pub mitigation_factor: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure_finite(name, v)?;
    if v <= 0.0 {
        return Err(invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `atan(Q / 2λT)`.
pub fn select_angle(lambda_t: f64, q: f64) -> Result<f64> {
    positive("lambda*T", lambda_t)?;
    positive("Q", q)?;
    Ok((q / (2.0 * lambda_t)).atan())
}

/// `csc(2Δ)(3 - cos 2Δ) λT`.
pub fn gate_count(lambda_t: f64, delta: f64) -> Result<f64> {
    positive("lambda*T", lambda_t)?;
    ensure_finite("delta", delta)?;
    if !(delta > 0.0 && delta < FRAC_PI_2) {
        return Err(invalid(format!("delta must lie in (0, π/2), got {delta}")));
    }
    let two = 2.0 * delta;
    Ok((3.0 - two.cos()) / two.sin() * lambda_t)
}

/// `(γ² = exp(2λT tan Δ), N_s = ⌈γ²/ε²⌉)`.
pub fn sampling_overhead(lambda_t: f64, delta: f64, epsilon: f64) -> Result<(f64, u64)> {
    positive("lambda*T", lambda_t)?;
    ensure_finite("delta", delta)?;
    if !(0.0..FRAC_PI_2).contains(&delta) {
        return Err(invalid(format!("delta must lie in [0, π/2), got {delta}")));
    }
    positive("epsilon", epsilon)?;
    let gamma_sq = (2.0 * lambda_t * delta.tan()).exp();
    let shots = (gamma_sq / (epsilon * epsilon)).ceil();
    if !shots.is_finite() || shots > u64::MAX as f64 {
        return Err(Error::Numeric(format!("shot count overflows: {shots}")));
    }
    Ok((gamma_sq, shots as u64))
}

fn check_distance(d: u32) -> Result<()> {
    if d == 0 || d % 2 == 0 {
        return Err(invalid(format!("code distance must be odd and positive, got {d}")));
    }
    Ok(())
}

/// `0.1 (100 p_ph)^{(d+1)/2}`.
pub fn logical_error_per_cycle(p_ph: f64, d: u32) -> Result<f64> {
    check_distance(d)?;
    ensure_finite("p_ph", p_ph)?;
    if p_ph < 0.0 {
        return Err(invalid("p_ph must be non-negative"));
    }
    Ok(0.1 * (100.0 * p_ph).powi(((d + 1) / 2) as i32))
}

fn ceil_sqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s > n {
        s -= 1;
    }
    while s * s < n {
        s += 1;
    }
    s
}

/// `2N_L + ⌈√(8N_L)⌉ + 11`.
pub fn patch_count(n_l: u64) -> Result<u64> {
    if n_l == 0 {
        return Err(invalid("N_L must be at least 1"));
    }
    Ok(2 * n_l + ceil_sqrt(8 * n_l) + 11)
}

/// Whether `1/p_L(d) ≥ 100 d N_gate C_smm N_patch`, compared in logs.
pub fn distance_condition(p_ph: f64, d: u32, n_gate: f64, c_smm: f64, n_patch: u64) -> Result<bool> {
    check_distance(d)?;
    let lhs = -(logical_error_per_cycle(p_ph, d)?.ln());
    let rhs = (DISTANCE_MARGIN * f64::from(d) * n_gate * c_smm * n_patch as f64).ln();
    Ok(lhs >= rhs)
}

/// Smallest odd `d ≥ 3` satisfying [`distance_condition`].
pub fn solve_code_distance(instance: &TepaiInstance) -> Result<u32> {
    instance.validate()?;
    let lt = instance.lambda_t();
    let n_gate = gate_count(lt, select_angle(lt, instance.q)?)?;
    let n_patch = patch_count(instance.n_l)?;
    let mut d = 3;
    while d <= MAX_DISTANCE {
        if distance_condition(instance.p_ph, d, n_gate, instance.c_smm, n_patch)? {
            return Ok(d);
        }
        d += 2;
    }
    Err(Error::OutOfRange(format!(
        "no code distance up to {MAX_DISTANCE} meets the error budget (λT = {lt}, p_ph = {})",
        instance.p_ph
    )))
}

pub fn estimate(instance: &TepaiInstance) -> Result<TepaiEstimate> {
    instance.validate()?;
    let lt = instance.lambda_t();
    let delta = select_angle(lt, instance.q)?;
    let n_gate = gate_count(lt, delta)?;
    let (gamma_inf_sq, n_s) = sampling_overhead(lt, delta, instance.epsilon)?;
    let d = solve_code_distance(instance)?;
    let n_patch = patch_count(instance.n_l)?;
    let physical_qubits = n_patch * 2 * u64::from(d) * u64::from(d);

    let alpha = instance.alpha.alpha(delta)?;
    let p_total = n_gate * alpha * delta * instance.p_ph;
    let mitigation_factor = (4.0 * p_total).exp();
    let single_shot_seconds = n_gate * instance.c_smm * f64::from(d) * instance.cycle_seconds;
    let total_seconds =
        single_shot_seconds * gamma_inf_sq * mitigation_factor / (instance.epsilon * instance.epsilon);

    Ok(TepaiEstimate {
        delta_angle: delta,
        n_gate,
        gamma_inf_sq,
        n_s,
        d,
        n_patch,
        physical_qubits,
        single_shot_seconds,
        total_seconds,
        alpha,
        p_total,
        mitigation_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{E, FRAC_PI_4};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn fe4s4() -> TepaiInstance {
        TepaiInstance::new(137.8, 10.0, 72, AlphaModel::Constant(0.1))
    }

    #[test]
    fn select_angle_examples() {
        assert!((select_angle(0.5, 1.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(rel(select_angle(1378.0, 1.0).unwrap(), 3.6284468654375086e-4) < 1e-12);
        assert!(select_angle(0.0, 1.0).is_err());
    }

    #[test]
    fn gate_count_examples() {
        let d = select_angle(1378.0, 1.0).unwrap();
        assert!(rel(gate_count(1378.0, d).unwrap(), 3_797_769.0) < 1e-10);
        assert!((gate_count(1.0, FRAC_PI_4).unwrap() - 3.0).abs() < 1e-15);
        let opt = (1.0 / 2f64.sqrt()).atan();
        assert!(rel(gate_count(10.0, opt).unwrap(), 20.0 * 2f64.sqrt()) < 1e-14);
    }

    #[test]
    fn sampling_examples() {
        let d = select_angle(1378.0, 1.0).unwrap();
        let (g, n) = sampling_overhead(1378.0, d, 0.05).unwrap();
        assert!(rel(g, E) < 1e-12);
        assert_eq!(n, 1088);
        assert_eq!(sampling_overhead(5.0, 0.0, 0.1).unwrap().0, 1.0);
    }

    #[test]
    fn logical_error_examples() {
        assert!(rel(logical_error_per_cycle(1e-3, 11).unwrap(), 1e-7) < 1e-12);
        assert!(rel(logical_error_per_cycle(1e-3, 23).unwrap(), 1e-13) < 1e-12);
        for d in [3, 9, 31] {
            assert!(rel(logical_error_per_cycle(1e-2, d).unwrap(), 0.1) < 1e-15);
        }
        assert!(logical_error_per_cycle(1e-3, 10).is_err());
    }

    #[test]
    fn patch_count_examples() {
        assert_eq!(patch_count(72).unwrap(), 179);
        assert_eq!(patch_count(2).unwrap(), 19);
        assert_eq!(patch_count(32).unwrap(), 91);
        // √(8·3) = 4.9 rounds up.
        assert_eq!(patch_count(3).unwrap(), 6 + 5 + 11);
        assert!(patch_count(0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(solve_code_distance(&fe4s4()).unwrap(), 23);
        let tiny = TepaiInstance::new(1.0, 1.0, 2, AlphaModel::Constant(0.1));
        let d = solve_code_distance(&tiny).unwrap();
        let n_gate = 2.0 + 1.0;
        assert!(distance_condition(1e-3, d, n_gate, 3.0, 19).unwrap());
        if d > 3 {
            assert!(!distance_condition(1e-3, d - 2, n_gate, 3.0, 19).unwrap());
        }
        assert_eq!(d, 9);
        let mut hot = fe4s4();
        hot.p_ph = 1e-2;
        assert!(matches!(solve_code_distance(&hot), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn fe4s4_estimate() {
        let e = estimate(&fe4s4()).unwrap();
        assert_eq!(e.d, 23);
        assert_eq!(e.n_patch, 179);
        assert_eq!(e.physical_qubits, 189_382);
        assert!(rel(e.single_shot_seconds, 262.046061) < 1e-6);
        let days = e.total_seconds / 86_400.0;
        assert!((5.0..6.0).contains(&days), "{days}");
    }

    #[test]
    fn small_instance_floor() {
        let mut i = TepaiInstance::new(1e-6, 1.0, 2, AlphaModel::Constant(0.1));
        i.q = 1.0;
        let e = estimate(&i).unwrap();
        assert!(rel(e.n_gate, 1.0) < 1e-6);
        assert!(e.total_seconds < 3600.0);
    }

    proptest! {
        #[test]
        fn gate_count_identity(lt in 1.0f64..1e5, q in 0.1f64..5.0) {
            let d = select_angle(lt, q).unwrap();
            prop_assert!(rel(gate_count(lt, d).unwrap(), 2.0 * lt * lt / q + q) < 1e-10);
            prop_assert!(rel(sampling_overhead(lt, d, 0.1).unwrap().0, q.exp()) < 1e-12);
        }

        #[test]
        fn gate_count_lower_bound(lt in 0.1f64..1e4, delta in 1e-4f64..1.57) {
            prop_assert!(gate_count(lt, delta).unwrap() >= 2.0 * 2f64.sqrt() * lt * (1.0 - 1e-14));
        }

        #[test]
        fn estimate_is_monotone(l in 1.0f64..500.0, f in 1.0f64..3.0, eps in 0.01f64..0.2) {
            let a = estimate(&TepaiInstance::new(l, 10.0, 72, AlphaModel::Constant(0.1))).unwrap();
            let b = estimate(&TepaiInstance::new(l * f, 10.0, 72, AlphaModel::Constant(0.1))).unwrap();
            prop_assert!(b.physical_qubits >= a.physical_qubits);
            prop_assert!(b.total_seconds >= a.total_seconds);
            let mut tight = TepaiInstance::new(l, 10.0, 72, AlphaModel::Constant(0.1));
            tight.epsilon = eps;
            let mut loose = tight.clone();
            loose.epsilon = eps * f;
            prop_assert!(estimate(&tight).unwrap().total_seconds >= estimate(&loose).unwrap().total_seconds);
        }
    }
}
