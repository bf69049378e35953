//! The five subcommands. Each returns its artifacts in memory; the caller
//! decides where they go.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use rotcost_core::hamcat::{self, Boundary};
use rotcost_core::mitigation::{feasible_boundary, ArchitectureConstants};
use rotcost_core::smm::{
    self, calibration::v2_period_mean, enumerate::DEFAULT_MIN_WEIGHT, enumerate_trajectories,
    monte_carlo, ThresholdPolicy,
};
use rotcost_core::tepai::{self, TepaiEstimate, TepaiInstance};
use rotcost_core::{pcec, tmr, zchan, DensityMatrix2};

use crate::config::{LoadedConfig, ThresholdKind};
use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug)]
pub struct CommandOutput {
    pub artifacts: Vec<Artifact>,
    /// Human-readable text for the terminal.
    pub report: Option<String>,
    /// Set when the command completed but must exit nonzero.
    pub failure: Option<CliError>,
}

impl CommandOutput {
    fn csv(name: &str, contents: String) -> Self {
        Self {
            artifacts: vec![Artifact {
                name: name.into(),
                contents,
            }],
            report: None,
            failure: None,
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Checks shared by every command that builds engine configurations.
fn validate_smm(cfg: &LoadedConfig) -> Result<(), CliError> {
    let s = &cfg.config.smm;
    let err = |key: &str, msg: String| cfg.error("smm", key, msg);
    if !(s.p_ph.is_finite() && (0.0..=0.1).contains(&s.p_ph)) {
        return Err(err("p_ph", format!("must lie in [0, 0.1], got {}", s.p_ph)));
    }
    if s.k < 2 {
        return Err(err("k", format!("must be at least 2, got {}", s.k)));
    }
    if let Some(c1) = s.c1 {
        if !(c1.is_finite() && c1 >= 0.0) {
            return Err(err("c1", format!("must be finite and non-negative, got {c1}")));
        }
    }
    if !(s.p_m.is_finite() && (0.0..=1e-3).contains(&s.p_m)) {
        return Err(err("p_m", format!("must lie in [0, 1e-3], got {}", s.p_m)));
    }
    if !(s.t_m.is_finite() && s.t_m >= 1.0) {
        return Err(err("t_m", format!("must be at least 1 clock, got {}", s.t_m)));
    }
    if s.n_prep < 1 {
        return Err(err("n_prep", "must be at least 1".into()));
    }
    if !(s.teleport_clocks.is_finite() && s.teleport_clocks >= 0.0) {
        return Err(err("teleport_clocks", format!("must be non-negative, got {}", s.teleport_clocks)));
    }
    if !(s.prep_clock_constant.is_finite() && s.prep_clock_constant > 0.0) {
        return Err(err(
            "prep_clock_constant",
            format!("must be positive, got {}", s.prep_clock_constant),
        ));
    }
    if let Some(d) = s.delta {
        if !(d.is_finite() && (0.0..1.0).contains(&d)) {
            return Err(err("delta", format!("must lie in [0, 1), got {d}")));
        }
    }
    if !(s.theta_th.is_finite() && s.theta_th > 0.0 && s.theta_th <= smm::MAX_THRESHOLD) {
        return Err(err("theta_th", format!("must lie in (0, π/8], got {}", s.theta_th)));
    }
    Ok(())
}

fn check_angles(cfg: &LoadedConfig, section: &str, key: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|&&x| !(x > 0.0 && x <= FRAC_PI_4)) {
        Some(x) => Err(cfg.error(section, key, format!("angles must lie in (0, π/4], got {x}"))),
        None => Ok(()),
    }
}

pub fn alpha_sweep(cfg: &LoadedConfig) -> Result<CommandOutput, CliError> {
    validate_smm(cfg)?;
    let s = &cfg.config.alpha_sweep;
    let thetas = s
        .theta_l
        .values()
        .map_err(|m| cfg.error("alpha_sweep", "theta_l", m))?;
    check_angles(cfg, "alpha_sweep", "theta_l", &thetas)?;
    if s.k.is_empty() {
        return Err(cfg.error("alpha_sweep", "k", "empty sweep grid"));
    }
    if let Some(k) = s.k.iter().find(|&&k| k < 2) {
        return Err(cfg.error("alpha_sweep", "k", format!("k must be at least 2, got {k}")));
    }
    if s.thresholds.is_empty() {
        return Err(cfg.error("alpha_sweep", "thresholds", "empty sweep grid"));
    }
    if let Some(t) = s.thresholds.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(cfg.error("alpha_sweep", "thresholds", format!("must be positive, got {t}")));
    }
    if s.p_m.is_empty() {
        return Err(cfg.error("alpha_sweep", "p_m", "empty sweep grid"));
    }
    if let Some(p) = s.p_m.iter().find(|p| !(p.is_finite() && (0.0..=1e-3).contains(*p))) {
        return Err(cfg.error("alpha_sweep", "p_m", format!("must lie in [0, 1e-3], got {p}")));
    }

    let mut rows = Vec::new();
    for &k in &s.k {
        for &t in &s.thresholds {
            for &p_m in &s.p_m {
                for &x in &thetas {
                    rows.push((k, t, p_m, x));
                }
            }
        }
    }
    let results: Vec<_> = rows
        .par_iter()
        .map(|&(k, t, p_m, x)| {
            let policy = match s.threshold {
                ThresholdKind::Fixed => ThresholdPolicy::Fixed(t),
                ThresholdKind::Ratio => ThresholdPolicy::Ratio(t),
            };
            let mut section = cfg.config.smm.clone();
            section.p_m = p_m;
            let c = section.config(x, policy, k)?;
            smm::effective_error_rate(&c).map(|r| (k, p_m, r))
        })
        .collect::<rotcost_core::Result<_>>()?;

    let mut out = String::from("theta_L,k,theta_th,p_m,alpha_rus,P_L,out_of_regime_flag\n");
    for (k, p_m, r) in results {
        let _ = writeln!(
            out,
            "{},{k},{},{},{},{},{}",
            fmt_f64(r.theta_l),
            fmt_f64(r.theta_th),
            fmt_f64(p_m),
            fmt_f64(r.alpha_rus),
            fmt_f64(r.p_l),
            u8::from(r.out_of_regime)
        );
    }
    Ok(CommandOutput::csv("alpha_sweep.csv", out))
}

pub fn tradeoff(cfg: &LoadedConfig) -> Result<CommandOutput, CliError> {
    validate_smm(cfg)?;
    let s = &cfg.config.tradeoff;
    let thetas = s.theta_l.values().map_err(|m| cfg.error("tradeoff", "theta_l", m))?;
    check_angles(cfg, "tradeoff", "theta_l", &thetas)?;
    let deltas = s
        .comparator_delta
        .values()
        .map_err(|m| cfg.error("tradeoff", "comparator_delta", m))?;
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
        return Err(cfg.error("tradeoff", "comparator_delta", format!("must lie in (0, 1), got {d}")));
    }
    if s.n_max > 40 {
        return Err(cfg.error("tradeoff", "n_max", format!("must be at most 40, got {}", s.n_max)));
    }
    let smm_cfg = &cfg.config.smm;
    let k = smm_cfg.k;

    let rows: Vec<(f64, u32)> = thetas
        .iter()
        .flat_map(|&x| (0..=s.n_max).map(move |n| (x, n)))
        .collect();
    let results: Vec<_> = rows
        .par_iter()
        .map(|&(x, n)| {
            let c = smm_cfg.config(x, ThresholdPolicy::Fixed(x * 2f64.powi(n as i32)), k)?;
            smm::effective_error_rate(&c)
        })
        .collect::<rotcost_core::Result<_>>()?;

    let mut out = String::from("kind,theta_L,n,delta,P_L,expected_clocks\n");
    for ((x, n), r) in rows.iter().zip(&results) {
        let _ = writeln!(
            out,
            "smm,{},{n},{},{},{}",
            fmt_f64(*x),
            fmt_f64(r.delta),
            fmt_f64(r.p_l),
            fmt_f64(r.expected_clocks)
        );
    }
    let base = smm_cfg.config(thetas[0], ThresholdPolicy::Fixed(thetas[0]), k)?;
    for d in deltas {
        let (p, clocks) = smm::synthesis_only(d, &base)?;
        let _ = writeln!(out, "synthesis,,,{},{},{}", fmt_f64(d), fmt_f64(p), fmt_f64(clocks));
    }
    Ok(CommandOutput::csv("tradeoff.csv", out))
}

pub fn bound(cfg: &LoadedConfig) -> Result<CommandOutput, CliError> {
    validate_smm(cfg)?;
    let s = &cfg.config.bound;
    let archs = s
        .parsed_architectures()
        .map_err(|m| cfg.error("bound", "architectures", m))?;
    let n_t = s.n_t.values().map_err(|m| cfg.error("bound", "n_t", m))?;
    if let Some(n) = n_t.iter().find(|n| **n < 0.0) {
        return Err(cfg.error("bound", "n_t", format!("must be non-negative, got {n}")));
    }
    check_angles(cfg, "bound", "theta_star", &[s.theta_star])?;
    if !(s.alpha_v2.is_finite() && s.alpha_v2 >= 0.0) {
        return Err(cfg.error("bound", "alpha_v2", format!("must be non-negative, got {}", s.alpha_v2)));
    }
    let alpha = cfg
        .config
        .smm
        .alpha_model(&s.alpha_v3)
        .map_err(|m| cfg.error("bound", "alpha_v3", m))?;
    let constants = ArchitectureConstants {
        p_ph: cfg.config.smm.p_ph,
        p_m: cfg.config.smm.p_m,
        alpha_v2: s.alpha_v2,
    };

    let curves: Vec<_> = archs
        .par_iter()
        .map(|&a| feasible_boundary(a, &constants, s.theta_star, &n_t, &alpha).map(|c| (a, c)))
        .collect::<rotcost_core::Result<_>>()?;
    let mut out = String::from("architecture,N_T,N_R\n");
    for (a, curve) in curves {
        for (nt, nr) in curve {
            let _ = writeln!(out, "{a},{},{}", fmt_f64(nt), fmt_f64(nr));
        }
    }
    Ok(CommandOutput::csv("bound.csv", out))
}

#[derive(Debug, Serialize)]
struct TepaiRow {
    system: String,
    lambda: f64,
    t: f64,
    n_l: u64,
    q: f64,
    epsilon: f64,
    estimate: Option<TepaiEstimate>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct TepaiSummary {
    rows: Vec<TepaiRow>,
    failed_rows: usize,
}

pub fn tepai(cfg: &LoadedConfig) -> Result<CommandOutput, CliError> {
    validate_smm(cfg)?;
    let s = &cfg.config.tepai;
    for (key, v) in [
        ("q", s.q),
        ("epsilon", s.epsilon),
        ("c_smm", s.c_smm),
        ("cycle_seconds", s.cycle_seconds),
        ("hubbard_hopping", s.hubbard_hopping),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(cfg.error("tepai", key, format!("must be positive, got {v}")));
        }
    }
    if s.epsilon >= 1.0 {
        return Err(cfg.error("tepai", "epsilon", format!("must lie in (0, 1), got {}", s.epsilon)));
    }
    if !(s.hubbard_u.is_finite() && s.hubbard_u >= 0.0) {
        return Err(cfg.error("tepai", "hubbard_u", format!("must be non-negative, got {}", s.hubbard_u)));
    }
    for (key, times) in [("times", &s.times), ("hubbard_times", &s.hubbard_times)] {
        if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(cfg.error("tepai", key, format!("times must be positive, got {t}")));
        }
    }
    let alpha = cfg
        .config
        .smm
        .alpha_model(&s.alpha)
        .map_err(|m| cfg.error("tepai", "alpha", m))?;

    let mut cases: Vec<(String, f64, f64, u64)> = Vec::new();
    for name in &s.systems {
        let entry = hamcat::find_system(name)
            .ok_or_else(|| cfg.error("tepai", "systems", format!("unknown system \"{name}\"")))?;
        if s.times.is_empty() {
            return Err(cfg.error("tepai", "times", "empty sweep grid"));
        }
        for &t in &s.times {
            cases.push((entry.name.clone(), entry.lambda, t, entry.n_l));
        }
    }
    match (&s.lambda_grid, &s.t_grid) {
        (Some(lg), Some(tg)) => {
            let ls = lg.values().map_err(|m| cfg.error("tepai", "lambda_grid", m))?;
            let ts = tg.values().map_err(|m| cfg.error("tepai", "t_grid", m))?;
            if let Some(v) = ls.iter().chain(&ts).find(|v| **v <= 0.0) {
                return Err(cfg.error("tepai", "lambda_grid", format!("grid values must be positive, got {v}")));
            }
            if s.grid_n_l == 0 {
                return Err(cfg.error("tepai", "grid_n_l", "must be at least 1"));
            }
            for &l in &ls {
                for &t in &ts {
                    cases.push(("grid".into(), l, t, s.grid_n_l));
                }
            }
        }
        (None, None) => {}
        (Some(_), None) => return Err(cfg.error("tepai", "lambda_grid", "needs t_grid as well")),
        (None, Some(_)) => return Err(cfg.error("tepai", "t_grid", "needs lambda_grid as well")),
    }
    for &l in &s.hubbard_l {
        let terms = hamcat::hubbard_terms(l, s.hubbard_hopping, s.hubbard_u, Boundary::Periodic)
            .map_err(|e| cfg.error("tepai", "hubbard_l", e.to_string()))?;
        let lambda = hamcat::l1_norm(&terms)?;
        for &t in &s.hubbard_times {
            cases.push((format!("hubbard-{l}x{l}"), lambda, t, 2 * u64::from(l) * u64::from(l)));
        }
    }
    if cases.is_empty() {
        return Err(cfg.error("tepai", "systems", "no TE-PAI instances selected"));
    }

    let rows: Vec<TepaiRow> = cases
        .into_par_iter()
        .map(|(system, lambda, t, n_l)| {
            let mut inst = TepaiInstance::new(lambda, t, n_l, alpha.clone());
            inst.q = s.q;
            inst.epsilon = s.epsilon;
            inst.c_smm = s.c_smm;
            inst.cycle_seconds = s.cycle_seconds;
            inst.p_ph = cfg.config.smm.p_ph;
            let (estimate, error) = match tepai::estimate(&inst) {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            TepaiRow {
                system,
                lambda,
                t,
                n_l,
                q: s.q,
                epsilon: s.epsilon,
                estimate,
                error,
            }
        })
        .collect();

    let mut out = String::from("system,lambda,T,Q,eps,d,N_patch,phys_qubits,single_shot_s,total_s,P_total\n");
    for r in &rows {
        let prefix = format!(
            "{},{},{},{},{}",
            csv_field(&r.system),
            fmt_f64(r.lambda),
            fmt_f64(r.t),
            fmt_f64(r.q),
            fmt_f64(r.epsilon)
        );
        match &r.estimate {
            Some(e) => {
                let _ = writeln!(
                    out,
                    "{prefix},{},{},{},{},{},{}",
                    e.d,
                    e.n_patch,
                    e.physical_qubits,
                    fmt_f64(e.single_shot_seconds),
                    fmt_f64(e.total_seconds),
                    fmt_f64(e.p_total)
                );
            }
            None => {
                let _ = writeln!(out, "{prefix},error,error,error,error,error,error");
            }
        }
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let all_failed = failed == rows.len();
    let first_error = rows.iter().find_map(|r| r.error.clone());
    let summary = TepaiSummary { rows, failed_rows: failed };
    let json = serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n";

    Ok(CommandOutput {
        artifacts: vec![
            Artifact {
                name: "tepai.csv".into(),
                contents: out,
            },
            Artifact {
                name: "tepai_summary.json".into(),
                contents: json,
            },
        ],
        report: None,
        failure: all_failed.then(|| {
            CliError::Solver(rotcost_core::Error::OutOfRange(
                first_error.unwrap_or_else(|| "every TE-PAI row failed".into()),
            ))
        }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    seed: u64,
    shots: u64,
    passed: bool,
    checks: Vec<CheckResult>,
}

/// Largest excess of `gap` over `allowed` across a grid (≤ 0 means pass).
fn worst(items: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    items
        .into_iter()
        .map(|(gap, allowed)| gap - allowed)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn verify(cfg: &LoadedConfig, seed: u64) -> Result<CommandOutput, CliError> {
    validate_smm(cfg)?;
    let shots = cfg.config.verify.shots;
    if shots < 1000 {
        return Err(cfg.error("verify", "shots", format!("must be at least 1000, got {shots}")));
    }
    let smm_cfg = &cfg.config.smm;
    let mut checks = Vec::new();

    // TMR inverse map.
    let mut max_rel: f64 = 0.0;
    for k in [3, 5, 7, 9] {
        for i in 1..=50 {
            let theta = FRAC_PI_4 * f64::from(i) / 50.0;
            let back = tmr::physical_angle_for(tmr::logical_angle(theta, k)?, k)?;
            max_rel = max_rel.max((back - theta).abs() / theta);
        }
    }
    checks.push(check(
        "tmr_inverse_map",
        max_rel <= 1e-10,
        format!("max relative error {max_rel:e}"),
    ));

    // Single-flip branch angle against its closed form.
    let mut max_gap: f64 = 0.0;
    for k in [3, 5, 7] {
        for i in 1..=20 {
            let theta = FRAC_PI_4 * f64::from(i) / 20.0;
            let gap = (tmr::branch_angle(theta, k, 1)? - tmr::error_angle(theta, k)?).abs();
            max_gap = max_gap.max(gap);
        }
    }
    checks.push(check(
        "tmr_error_angle_identity",
        max_gap <= 1e-12,
        format!("max gap {max_gap:e}"),
    ));

    // PCEC residual against exact channel composition and the 2x2 oracle.
    let mut grid = Vec::new();
    let mut dm_gap: f64 = 0.0;
    for k in [3, 5, 7] {
        let params = smm_cfg.tmr(k)?;
        for theta in [1e-4, 1e-3, 1e-2, 1e-1] {
            let model = tmr::model_for_logical_angle(&params, theta)?;
            let set = pcec::channel_set(&model)?;
            let exact = set.composed_error.twirled_z_error(0.0);
            grid.push(((set.residual_rate - exact).abs(), pcec::remainder_bound(&model)));
            let rho = set.composed_error.apply(&DensityMatrix2::plus());
            dm_gap = dm_gap.max((rho.minus_population() - exact).abs());
        }
    }
    let e = worst(grid);
    checks.push(check(
        "pcec_residual_vs_channel",
        e <= 0.0,
        format!("worst excess over remainder bound {e:e}"),
    ));
    checks.push(check(
        "channel_vs_density_matrix",
        dm_gap <= 1e-12,
        format!("max gap {dm_gap:e}"),
    ));
    let pauli = zchan::RotationMixture::stochastic_z(0.1)?;
    let pm = pauli.worst_case_vs_pauli_model(0.0);
    checks.push(check("stochastic_z_is_pauli", pm <= 1e-15, format!("deviation {pm:e}")));

    // Analytic engine against trajectory enumeration and Monte Carlo.
    let mc_grid = [(1e-5, 0.01, 7u32), (1e-4, 6e-3, 5), (1e-3, 2e-3, 3)];
    let mut enum_grid = Vec::new();
    let mut mc_lines = Vec::new();
    let mut mc_ok = true;
    let mut switch_ok = true;
    for (x, th, k) in mc_grid {
        let c = smm_cfg.config(x, ThresholdPolicy::Fixed(th), k)?;
        let a = smm::effective_error_rate(&c)?;
        let en = enumerate_trajectories(&c, DEFAULT_MIN_WEIGHT)?;
        enum_grid.push(((en.p_l - a.p_l).abs(), en.remainder_bound));
        let mc = monte_carlo(&c, shots, seed)?;
        let sigma = ((en.second_moment - en.p_l * en.p_l).max(0.0) / shots as f64).sqrt();
        let z = (mc.p_l - en.p_l).abs() / sigma.max(f64::MIN_POSITIVE);
        mc_ok &= (mc.p_l - en.p_l).abs() <= 4.0 * sigma + en.remainder_bound;
        let s_sigma = (a.p_switch * (1.0 - a.p_switch) / shots as f64).sqrt();
        switch_ok &= (mc.p_switch - a.p_switch).abs() <= 4.0 * s_sigma;
        mc_lines.push(format!("({x:e},{th:e},{k}): z = {z:.2}"));
    }
    let e = worst(enum_grid);
    checks.push(check(
        "smm_enumeration_vs_analytic",
        e <= 0.0,
        format!("worst excess over remainder bound {e:e}"),
    ));
    checks.push(check("smm_monte_carlo_vs_enumeration", mc_ok, mc_lines.join("; ")));
    checks.push(check(
        "smm_switch_rate",
        switch_ok,
        "switch frequency within 4σ of 2^-N".into(),
    ));

    let c = smm_cfg.config(1e-4, ThresholdPolicy::Fixed(0.01), smm_cfg.k)?;
    let n = shots.min(50_000);
    let a = monte_carlo(&c, n, seed)?;
    let b = monte_carlo(&c, n, seed)?;
    checks.push(check(
        "monte_carlo_reproducible",
        a == b,
        format!("seed {seed}, {n} shots"),
    ));

    // Calibration of the pass coefficient against the reference RUS factor.
    let v2 = v2_period_mean(&smm_cfg.tmr(7)?)?;
    checks.push(check(
        "pass_coefficient_calibration",
        (v2 - smm::calibration::V2_REFERENCE_ALPHA).abs() <= 1e-6,
        format!("reference RUS factor at k = 7: {v2}"),
    ));

    // TE-PAI identities.
    let (mut gate_gap, mut gamma_gap) = (0.0f64, 0.0f64);
    for lt in [0.5, 1.0, 10.0, 1378.0] {
        for q in [0.5, 1.0, 2.0] {
            let d = tepai::select_angle(lt, q)?;
            let n = tepai::gate_count(lt, d)?;
            let expect = 2.0 * lt * lt / q + q;
            gate_gap = gate_gap.max(((n - expect) / expect).abs());
            let (g, _) = tepai::sampling_overhead(lt, d, 0.05)?;
            gamma_gap = gamma_gap.max(((g - q.exp()) / q.exp()).abs());
        }
    }
    checks.push(check(
        "tepai_identities",
        gate_gap <= 1e-10 && gamma_gap <= 1e-12,
        format!("gate count gap {gate_gap:e}, sampling overhead gap {gamma_gap:e}"),
    ));

    // Hubbard L1 norm.
    let mut hub_ok = true;
    for l in 3..=6u32 {
        let terms = hamcat::hubbard_terms(l, 1.0, 4.0, Boundary::Periodic)?;
        hub_ok &= terms.len() == 9 * (l * l) as usize;
        hub_ok &= hamcat::l1_norm(&terms)? == hamcat::hubbard_lambda(1.0, 4.0, u64::from(l));
    }
    checks.push(check("hubbard_l1_norm", hub_ok, "L = 3..6, t = 1, U = 4".into()));

    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut text = String::new();
    for c in &checks {
        let _ = writeln!(
            text,
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let _ = writeln!(text, "{} of {} checks passed", checks.len() - failed, checks.len());
    let report = VerifyReport {
        seed,
        shots,
        passed: failed == 0,
        checks,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    Ok(CommandOutput {
        artifacts: vec![Artifact {
            name: "verify.json".into(),
            contents: json,
        }],
        report: Some(text),
        failure: (failed > 0).then_some(CliError::Verify(failed)),
    })
}
