//! Output model of transversal multi-rotation (TMR) resource-state
//! preparation.
//!
//! `k` physical rotations by `θ` along a logical Z operator, post-selected
//! on the ideal syndrome, give a logical rotation `θ_L = atan(tan^k θ)`.
//! Branches where `j` (or `k - j`) factors flipped survive post-selection
//! with weight `O(p_ph^j)` and carry angle `θ_j`.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmrParams {
    pub k: u32,
    pub p_ph: f64,
    /// `c_j` for `j = 1..=j_max`; `q_j^pass = c_j p_ph^j`.
    pub pass_coeffs: Vec<f64>,
    pub j_max: u32,
    /// Clocks per preparation attempt.
    pub prep_clock_constant: f64,
    /// Pass factor applied to the ideal branch.
    pub pass_rate_floor: f64,
}

impl TmrParams {
    /// Defaults: `c_j = 1`, `j_max = ⌊k/2⌋`, one clock per attempt, floor 1.
    pub fn new(k: u32, p_ph: f64) -> Result<Self> {
        let j_max = k / 2;
        let params = Self {
            k,
            p_ph,
            pass_coeffs: vec![1.0; j_max as usize],
            j_max,
            prep_clock_constant: 1.0,
            pass_rate_floor: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Geometric pass coefficients `c_j = c1^j`.
    pub fn geometric(k: u32, p_ph: f64, c1: f64) -> Result<Self> {
        let mut params = Self::new(k, p_ph)?;
        params.pass_coeffs = (1..=params.j_max).map(|j| c1.powi(j as i32)).collect();
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(invalid(format!("k must be at least 2, got {}", self.k)));
        }
        ensure_finite("p_ph", self.p_ph)?;
        if !(0.0..=0.1).contains(&self.p_ph) {
            return Err(invalid(format!("p_ph must lie in [0, 0.1], got {}", self.p_ph)));
        }
        if self.j_max > self.k {
            return Err(invalid(format!("j_max = {} exceeds k = {}", self.j_max, self.k)));
        }
        if self.pass_coeffs.len() < self.j_max as usize {
            return Err(invalid(format!(
                "need {} pass coefficients, got {}",
                self.j_max,
                self.pass_coeffs.len()
            )));
        }
        for (j, &c) in self.pass_coeffs.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(invalid(format!("pass coefficient c_{} must be finite and >= 0, got {c}", j + 1)));
            }
        }
        ensure_finite("prep_clock_constant", self.prep_clock_constant)?;
        if self.prep_clock_constant <= 0.0 {
            return Err(invalid("prep_clock_constant must be positive"));
        }
        if !(self.pass_rate_floor > 0.0 && self.pass_rate_floor <= 1.0) {
            return Err(invalid(format!(
                "pass_rate_floor must lie in (0, 1], got {}",
                self.pass_rate_floor
            )));
        }
        Ok(())
    }

    /// `c_j` (1-based).
    pub fn pass_coeff(&self, j: u32) -> f64 {
        self.pass_coeffs[(j - 1) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchEntry {
    pub j: u32,
    pub theta_j: f64,
    pub qbar_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TmrOutputModel {
    pub theta_phys: f64,
    pub theta_l: f64,
    pub p_ideal: f64,
    /// Unnormalised success probability `Σ q_j`.
    pub p_suc: f64,
    /// `j = 0..=j_max`; entry 0 is the ideal branch.
    pub branches: Vec<BranchEntry>,
}

impl TmrOutputModel {
    /// `Σ_{j≥1} q̄_j`.
    pub fn error_weight(&self) -> f64 {
        self.branches.iter().skip(1).map(|b| b.qbar_j).sum()
    }

    /// Over-rotation `Δ_j = θ_j - θ_0` of every error branch.
    pub fn over_rotations(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let theta0 = self.branches[0].theta_j;
        self.branches.iter().skip(1).map(move |b| (b.qbar_j, b.theta_j - theta0))
    }

    /// The model for `-θ`: every angle negated, weights unchanged.
    pub fn mirror(&self) -> Self {
        let mut out = self.clone();
        out.theta_phys = -out.theta_phys;
        out.theta_l = -out.theta_l;
        for b in &mut out.branches {
            b.theta_j = -b.theta_j;
        }
        out
    }

    /// The noiseless model of a pure rotation by `theta_l`.
    pub fn exact(theta_l: f64) -> Self {
        Self {
            theta_phys: 0.0,
            theta_l,
            p_ideal: 1.0,
            p_suc: 1.0,
            branches: vec![BranchEntry {
                j: 0,
                theta_j: theta_l,
                qbar_j: 1.0,
            }],
        }
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(())
}

fn check_physical_range(theta: f64) -> Result<()> {
    ensure_finite("theta", theta)?;
    if !(0.0..=FRAC_PI_4).contains(&theta) {
        return Err(invalid(format!("angle must lie in [0, π/4], got {theta}")));
    }
    Ok(())
}

/// `sin^{2k} θ + cos^{2k} θ`.
pub fn p_ideal(theta: f64, k: u32) -> Result<f64> {
    check_k(k)?;
    ensure_finite("theta", theta)?;
    let n = 2 * k as i32;
    Ok(theta.sin().powi(n) + theta.cos().powi(n))
}

/// `asin(sin^k θ / √p_ideal)`, for `θ ∈ [0, π/4]`.
pub fn logical_angle(theta: f64, k: u32) -> Result<f64> {
    check_k(k)?;
    check_physical_range(theta)?;
    let p = p_ideal(theta, k)?;
    Ok((theta.sin().powi(k as i32) / p.sqrt()).min(1.0).asin())
}

/// Inverse of [`logical_angle`] on `[0, π/4]`.
///
/// `θ_L = atan(tan^k θ)`, so `θ = atan(tan(θ_L)^{1/k})`.
pub fn physical_angle_for(theta_l: f64, k: u32) -> Result<f64> {
    check_k(k)?;
    check_physical_range(theta_l)?;
    let theta = theta_l.tan().powf(1.0 / k as f64).atan().min(FRAC_PI_4);
    let back = logical_angle(theta, k)?;
    if (back - theta_l).abs() > 1e-14 {
        return Err(Error::Numeric(format!(
            "inverse of logical angle did not converge: {back} vs {theta_l}"
        )));
    }
    Ok(theta)
}

/// Angle `θ_j` of the branch with `j` flipped factors:
/// `(-1)^j asin(|u_{k-j}| / √(|u_j|² + |u_{k-j}|²))` with
/// `|u_j| = sin^j θ cos^{k-j} θ`, evaluated as `(-1)^j atan(tan^{k-2j} θ)`.
pub fn branch_angle(theta: f64, k: u32, j: u32) -> Result<f64> {
    check_k(k)?;
    ensure_finite("theta", theta)?;
    if j > k {
        return Err(invalid(format!("branch index {j} exceeds k = {k}")));
    }
    if !(theta > 0.0 && theta <= FRAC_PI_4) {
        return Err(invalid(format!("branch angles need θ in (0, π/4], got {theta}")));
    }
    let magnitude = theta.tan().powi(k as i32 - 2 * j as i32).atan();
    Ok(if j % 2 == 0 { magnitude } else { -magnitude })
}

/// The single-flip angle `-asin(sin^{k-2} θ / √(sin^{2k-4} θ + cos^{2k-4} θ))`.
pub fn error_angle(theta: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(invalid("error angle needs k >= 2"));
    }
    ensure_finite("theta", theta)?;
    let n = (k - 2) as i32;
    let s = theta.sin();
    let c = theta.cos();
    Ok(-(s.powi(n) / (s.powi(2 * n) + c.powi(2 * n)).sqrt()).asin())
}

fn binomial(n: u32, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `C(k, j)(|u_j|² + |u_{k-j}|²)`, halved at `j = k/2` so that the
/// self-paired branch is not counted twice.
pub fn sample_weight(theta: f64, k: u32, j: u32) -> f64 {
    let s2 = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);
    let (a, b) = (j as i32, (k - j) as i32);
    let w = binomial(k, j) * (s2.powi(a) * c2.powi(b) + s2.powi(b) * c2.powi(a));
    if 2 * j == k {
        w / 2.0
    } else {
        w
    }
}

/// Branch table for physical angle `theta ∈ (0, π/4]`.
pub fn branch_weights(params: &TmrParams, theta: f64) -> Result<TmrOutputModel> {
    params.validate()?;
    let k = params.k;
    let p_ideal = p_ideal(theta, k)?;
    let theta_l = branch_angle(theta, k, 0)?;

    let mut raw = Vec::with_capacity(params.j_max as usize + 1);
    raw.push((0, branch_angle(theta, k, 0)?, p_ideal * params.pass_rate_floor));
    for j in 1..=params.j_max {
        let q = sample_weight(theta, k, j) * params.pass_coeff(j) * params.p_ph.powi(j as i32);
        raw.push((j, branch_angle(theta, k, j)?, q));
    }
    let p_suc: f64 = raw.iter().map(|r| r.2).sum();
    if !(p_suc > 0.0) {
        return Err(Error::InvalidModel("all branch weights vanish".into()));
    }
    let branches = raw
        .into_iter()
        .map(|(j, theta_j, q)| BranchEntry {
            j,
            theta_j,
            qbar_j: q / p_suc,
        })
        .collect();
    Ok(TmrOutputModel {
        theta_phys: theta,
        theta_l,
        p_ideal,
        p_suc,
        branches,
    })
}

/// Branch table for a logical target angle, mirrored for negative input.
pub fn model_for_logical_angle(params: &TmrParams, theta_l: f64) -> Result<TmrOutputModel> {
    ensure_finite("theta_L", theta_l)?;
    if theta_l == 0.0 {
        return Ok(TmrOutputModel::exact(0.0));
    }
    let theta = physical_angle_for(theta_l.abs(), params.k)?;
    let model = branch_weights(params, theta)?;
    Ok(if theta_l < 0.0 { model.mirror() } else { model })
}

/// Expected clocks to obtain one accepted resource state.
pub fn supply_time(params: &TmrParams, theta: f64) -> Result<f64> {
    params.validate()?;
    Ok(params.prep_clock_constant / (p_ideal(theta, params.k)? * params.pass_rate_floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn p_ideal_examples() {
        for k in 1..10 {
            assert_eq!(p_ideal(0.0, k).unwrap(), 1.0);
            assert!(rel(p_ideal(FRAC_PI_4, k).unwrap(), 2f64.powi(1 - k as i32)) < 1e-14);
        }
        assert!((p_ideal(0.1, 3).unwrap() - 0.9703978727510822).abs() < 1e-15);
        assert!(p_ideal(0.1, 0).is_err());
    }

    #[test]
    fn logical_angle_examples() {
        assert_eq!(logical_angle(0.0, 5).unwrap(), 0.0);
        for k in 1..12 {
            assert!((logical_angle(FRAC_PI_4, k).unwrap() - FRAC_PI_4).abs() < 1e-14);
        }
        assert!((logical_angle(0.1, 3).unwrap() - 0.0010100734581612856).abs() < 1e-17);
        assert!(logical_angle(-0.1, 3).is_err());
        assert!(logical_angle(0.8, 3).is_err());
    }

    #[test]
    fn physical_angle_examples() {
        assert_eq!(physical_angle_for(0.0, 4).unwrap(), 0.0);
        assert!((physical_angle_for(FRAC_PI_4, 7).unwrap() - FRAC_PI_4).abs() < 1e-15);
        for k in [2, 3, 5, 7, 9] {
            for e in -16..=0 {
                let x = 0.2 * 10f64.powf(e as f64 / 2.0);
                if x < 1e-8 {
                    continue;
                }
                let back = logical_angle(physical_angle_for(x, k).unwrap(), k).unwrap();
                assert!((back - x).abs() <= 1e-12, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn branch_angle_examples() {
        assert!((branch_angle(0.1, 3, 1).unwrap() + 0.1).abs() < 1e-15);
        for k in 2..10 {
            for &t in &[0.01, 0.1, 0.3, 0.7] {
                let zero = branch_angle(t, k, 0).unwrap();
                assert!((zero - logical_angle(t, k).unwrap()).abs() < 1e-14);
                let one = branch_angle(t, k, 1).unwrap();
                assert!((one - error_angle(t, k).unwrap()).abs() < 1e-12, "k={k} t={t}");
            }
        }
        assert!(branch_angle(0.1, 3, 4).is_err());
        assert!(branch_angle(0.0, 3, 1).is_err());
    }

    #[test]
    fn branch_angles_match_amplitude_formula() {
        let (t, k) = (0.2f64, 5);
        let u = |j: i32| t.sin().powi(j) * t.cos().powi(k - j);
        for j in 0..=k {
            // Compared through sin: asin is ill-conditioned near 1.
            let ratio = (-1f64).powi(j) * u(k - j) / (u(j).powi(2) + u(k - j).powi(2)).sqrt();
            assert!((branch_angle(t, k as u32, j as u32).unwrap().sin() - ratio).abs() < 1e-14);
        }
        assert!((branch_angle(t, 5, 1).unwrap() + 0.008329438103604078).abs() < 1e-16);
    }

    #[test]
    fn branch_weight_examples() {
        let noiseless = TmrParams::new(5, 0.0).unwrap();
        let m = branch_weights(&noiseless, 0.2).unwrap();
        assert_eq!(m.branches[0].qbar_j, 1.0);
        assert!(m.branches.iter().skip(1).all(|b| b.qbar_j == 0.0));

        let p = TmrParams::new(3, 1e-3).unwrap();
        assert!((sample_weight(0.1, 3, 1) - 0.0296021272489181).abs() < 1e-16);
        let m = branch_weights(&p, 0.1).unwrap();
        assert_eq!(m.branches.len(), 2);
        assert!(rel(m.branches[1].qbar_j, 3.050421388020729e-05) < 1e-12);

        let p = TmrParams::new(5, 1e-3).unwrap();
        let m = branch_weights(&p, 0.2).unwrap();
        let expect = [0.9997945536145028, 0.00020542881028593564, 1.757521134799979e-08];
        for (b, e) in m.branches.iter().zip(expect) {
            assert!(rel(b.qbar_j, e) < 1e-12);
        }
    }

    #[test]
    fn even_k_halves_the_middle_branch() {
        let t = 0.3f64;
        let direct = 6.0 * 2.0 * (t.sin() * t.cos()).powi(4);
        assert!(rel(sample_weight(t, 4, 2), direct / 2.0) < 1e-14);
    }

    #[test]
    fn qbar_one_scales_with_theta_l_power() {
        // q̄_1 / (θ_L^{2/k} p) tends to a constant as θ_L → 0.
        let p = TmrParams::new(5, 1e-3).unwrap();
        let ratio = |x: f64| {
            let m = model_for_logical_angle(&p, x).unwrap();
            m.branches[1].qbar_j / (x.powf(2.0 / 5.0) * 1e-3)
        };
        assert!(rel(ratio(1e-8), ratio(1e-7)) < 1e-3);
        assert!(rel(ratio(1e-8), 5.0) < 1e-3);
    }

    #[test]
    fn supply_time_examples() {
        let p = TmrParams::new(7, 1e-3).unwrap();
        assert!((supply_time(&p, 1e-9).unwrap() - 1.0).abs() < 1e-15);
        assert!(rel(supply_time(&p, FRAC_PI_4).unwrap(), 64.0) < 1e-13);
        let p5 = TmrParams::new(5, 1e-3).unwrap();
        let t = supply_time(&p5, physical_angle_for(1e-3, 5).unwrap()).unwrap();
        assert!((1.0..=3.0).contains(&t), "{t}");
    }

    #[test]
    fn params_validation() {
        assert!(TmrParams::new(1, 1e-3).is_err());
        assert!(TmrParams::new(3, 0.2).is_err());
        let mut p = TmrParams::new(5, 1e-3).unwrap();
        p.pass_coeffs[0] = -1.0;
        assert!(p.validate().is_err());
        p.pass_coeffs = vec![1.0];
        assert!(p.validate().is_err());
        let g = TmrParams::geometric(7, 1e-3, 0.5).unwrap();
        assert_eq!(g.pass_coeffs, vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn mirror_negates_angles() {
        let p = TmrParams::new(5, 1e-3).unwrap();
        let m = model_for_logical_angle(&p, -1e-4).unwrap();
        let n = model_for_logical_angle(&p, 1e-4).unwrap();
        assert_eq!(m, n.mirror());
        assert!(m.theta_l < 0.0);
    }

    proptest! {
        #[test]
        fn weights_normalised(k in 2u32..12, t in 1e-4f64..FRAC_PI_4, p in 0.0f64..0.1, c in 0.0f64..3.0) {
            let params = TmrParams::geometric(k, p, c).unwrap();
            let m = branch_weights(&params, t).unwrap();
            let total: f64 = m.branches.iter().map(|b| b.qbar_j).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(m.branches.iter().all(|b| b.qbar_j >= 0.0));
            prop_assert_eq!(m.branches[0].theta_j, m.theta_l);
        }

        #[test]
        fn branch_signs_alternate(k in 3u32..12, t in 1e-3f64..0.78) {
            for j in 0..=k {
                let a = branch_angle(t, k, j).unwrap();
                prop_assert_eq!(a > 0.0, j % 2 == 0);
            }
        }

        #[test]
        fn logical_angle_is_monotone(k in 1u32..12, a in 0.0f64..FRAC_PI_4, b in 0.0f64..FRAC_PI_4) {
            prop_assume!(a < b);
            prop_assert!(logical_angle(a, k).unwrap() <= logical_angle(b, k).unwrap());
        }

        #[test]
        fn inverse_round_trips(k in 2u32..12, e in -8.0f64..-0.7) {
            let x = 10f64.powf(e);
            let back = logical_angle(physical_angle_for(x, k).unwrap(), k).unwrap();
            prop_assert!((back - x).abs() <= 1e-12);
        }
    }
}
