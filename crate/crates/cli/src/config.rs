//! TOML run configuration.
//!
//! Every section is optional and falls back to the shipped defaults. Unknown
//! keys are rejected by the parser; semantic errors carry the line of the
//! offending key when it appears in the source.

use std::path::PathBuf;

use serde::Deserialize;

use rotcost_core::mitigation::AlphaModel;
use rotcost_core::smm::{calibrated_params, DeltaPolicy, SmmConfig, SwitchPathAccounting, ThresholdPolicy};
use rotcost_core::tmr::TmrParams;
use rotcost_core::Architecture;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub smm: SmmSection,
    pub alpha_sweep: AlphaSweepSection,
    pub tradeoff: TradeoffSection,
    pub bound: BoundSection,
    pub tepai: TepaiSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Either an explicit list or a generated range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range(RangeSpec),
}

impl Grid {
    pub fn log(min: f64, max: f64, points: usize) -> Self {
        Grid::Range(RangeSpec {
            scale: Scale::Log,
            min,
            max,
            points,
        })
    }

    pub fn values(&self) -> Result<Vec<f64>, String> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Range(r) => {
                if r.points == 0 {
                    return Err("sweep grid has zero points".into());
                }
                if !(r.min.is_finite() && r.max.is_finite()) || r.min > r.max {
                    return Err(format!("invalid grid bounds [{}, {}]", r.min, r.max));
                }
                if r.scale == Scale::Log && r.min <= 0.0 {
                    return Err("log grid needs a positive minimum".into());
                }
                if r.points == 1 {
                    vec![r.min]
                } else {
                    let last = (r.points - 1) as f64;
                    (0..r.points)
                        .map(|i| {
                            if i == 0 {
                                r.min
                            } else if i == r.points - 1 {
                                r.max
                            } else {
                                let t = i as f64 / last;
                                match r.scale {
                                    Scale::Linear => r.min + t * (r.max - r.min),
                                    Scale::Log => (r.min.ln() + t * (r.max / r.min).ln()).exp(),
                                }
                            }
                        })
                        .collect()
                }
            }
        };
        if v.is_empty() {
            return Err("empty sweep grid".into());
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(format!("grid value {x} is not finite"));
        }
        Ok(v)
    }
}

/// A constant RUS factor or `"smm"` for the engine-backed model.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Constant(f64),
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdKind {
    Fixed,
    Ratio,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmmSection {
    pub p_ph: f64,
    pub k: u32,
    /// Pass coefficient `c_1` (`c_j = c_1^j`); calibrated when absent.
    pub c1: Option<f64>,
    pub p_m: f64,
    pub t_m: f64,
    pub n_prep: u32,
    pub teleport_clocks: f64,
    pub prep_clock_constant: f64,
    pub higher_orders: bool,
    pub switch_accounting: SwitchPathAccounting,
    /// Fixed synthesis accuracy; the default rule when absent.
    pub delta: Option<f64>,
    /// Threshold of the engine-backed RUS factor used by `bound` and `tepai`.
    pub theta_th: f64,
}

impl Default for SmmSection {
    fn default() -> Self {
        Self {
            p_ph: 1e-3,
            k: 7,
            c1: None,
            p_m: rotcost_core::smm::DEFAULT_P_M,
            t_m: rotcost_core::smm::DEFAULT_T_M,
            n_prep: rotcost_core::smm::DEFAULT_N_PREP,
            teleport_clocks: rotcost_core::smm::DEFAULT_TELEPORT_CLOCKS,
            prep_clock_constant: 1.0,
            higher_orders: true,
            switch_accounting: SwitchPathAccounting::Trajectory,
            delta: None,
            theta_th: 0.01,
        }
    }
}

impl SmmSection {
    pub fn tmr(&self, k: u32) -> rotcost_core::Result<TmrParams> {
        let mut params = match self.c1 {
            Some(c1) => TmrParams::geometric(k, self.p_ph, c1)?,
            None => calibrated_params(k, self.p_ph)?,
        };
        params.prep_clock_constant = self.prep_clock_constant;
        params.validate()?;
        Ok(params)
    }

    pub fn config(&self, theta_l: f64, threshold: ThresholdPolicy, k: u32) -> rotcost_core::Result<SmmConfig> {
        let mut c = SmmConfig::new(theta_l, threshold, self.tmr(k)?)
            .with_p_m(self.p_m)
            .with_n_prep(self.n_prep);
        c.t_m = self.t_m;
        c.gate_teleport_clocks = self.teleport_clocks;
        c.include_higher_orders = self.higher_orders;
        c.switch_accounting = self.switch_accounting;
        if let Some(d) = self.delta {
            c.delta_policy = DeltaPolicy::Fixed(d);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn alpha_model(&self, spec: &AlphaSpec) -> Result<AlphaModel, String> {
        match spec {
            AlphaSpec::Constant(a) if a.is_finite() && *a >= 0.0 => Ok(AlphaModel::Constant(*a)),
            AlphaSpec::Constant(a) => Err(format!("alpha must be finite and non-negative, got {a}")),
            AlphaSpec::Named(s) if s == "smm" => {
                let c = self
                    .config(self.theta_th / 2.0, ThresholdPolicy::Fixed(self.theta_th), self.k)
                    .map_err(|e| e.to_string())?;
                Ok(AlphaModel::Smm(Box::new(c)))
            }
            AlphaSpec::Named(s) => Err(format!("alpha must be a number or \"smm\", got \"{s}\"")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlphaSweepSection {
    pub theta_l: Grid,
    pub k: Vec<u32>,
    pub threshold: ThresholdKind,
    /// Absolute thresholds, or ratios `r` when `threshold = "ratio"`.
    pub thresholds: Vec<f64>,
    pub p_m: Vec<f64>,
}

impl Default for AlphaSweepSection {
    fn default() -> Self {
        Self {
            theta_l: Grid::log(1e-8, 1e-3, 21),
            k: vec![5, 7, 9],
            threshold: ThresholdKind::Fixed,
            thresholds: vec![0.01, 0.05],
            p_m: vec![rotcost_core::smm::DEFAULT_P_M],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TradeoffSection {
    pub theta_l: Grid,
    pub n_max: u32,
    /// Accuracies of the synthesis-only comparator.
    pub comparator_delta: Grid,
}

impl Default for TradeoffSection {
    fn default() -> Self {
        Self {
            theta_l: Grid::List(vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7]),
            n_max: 15,
            comparator_delta: Grid::log(1e-12, 1e-1, 45),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundSection {
    pub theta_star: f64,
    pub architectures: Vec<String>,
    pub n_t: Grid,
    pub alpha_v2: f64,
    pub alpha_v3: AlphaSpec,
}

impl Default for BoundSection {
    fn default() -> Self {
        let mut n_t = vec![0.0];
        n_t.extend((0..=40).map(|i| 10f64.powf(f64::from(i) / 4.0)));
        Self {
            theta_star: 1e-5,
            architectures: Architecture::ALL.iter().map(|a| a.name().to_string()).collect(),
            n_t: Grid::List(n_t),
            alpha_v2: 1.6,
            alpha_v3: AlphaSpec::Named("smm".into()),
        }
    }
}

impl BoundSection {
    pub fn parsed_architectures(&self) -> Result<Vec<Architecture>, String> {
        if self.architectures.is_empty() {
            return Err("no architectures given".into());
        }
        self.architectures
            .iter()
            .map(|s| s.parse::<Architecture>().map_err(|e| e.to_string()))
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TepaiSection {
    /// Catalog entries, each evaluated at every time in `times`.
    pub systems: Vec<String>,
    pub times: Vec<f64>,
    /// Optional `(λ, T)` grid evaluated with `grid_n_l` logical qubits.
    pub lambda_grid: Option<Grid>,
    pub t_grid: Option<Grid>,
    pub grid_n_l: u64,
    /// Periodic Hubbard lattices with λ taken from the generated terms.
    pub hubbard_l: Vec<u32>,
    pub hubbard_hopping: f64,
    pub hubbard_u: f64,
    pub hubbard_times: Vec<f64>,
    pub q: f64,
    pub epsilon: f64,
    pub c_smm: f64,
    pub cycle_seconds: f64,
    pub alpha: AlphaSpec,
}

impl Default for TepaiSection {
    fn default() -> Self {
        Self {
            systems: vec!["[4Fe-4S]".into()],
            times: vec![10.0],
            lambda_grid: None,
            t_grid: None,
            grid_n_l: 72,
            hubbard_l: Vec::new(),
            hubbard_hopping: 1.0,
            hubbard_u: 4.0,
            hubbard_times: vec![20.0],
            q: 1.0,
            epsilon: 0.05,
            c_smm: rotcost_core::tepai::DEFAULT_C_SMM,
            cycle_seconds: rotcost_core::tepai::DEFAULT_CYCLE_SECONDS,
            alpha: AlphaSpec::Constant(0.1),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub shots: u64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { shots: 200_000 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Parsed configuration together with its source text for error locations.
#[derive(Debug, Clone, Default)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub source: String,
}

impl LoadedConfig {
    pub fn parse(source: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(source).map_err(|e| {
            let line = e
                .span()
                .map(|s| source[..s.start.min(source.len())].matches('\n').count() + 1);
            CliError::Config {
                line,
                message: e.message().trim().to_string(),
            }
        })?;
        Ok(Self {
            config,
            source: source.to_string(),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let source = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&source)
    }

    /// Config error pointing at `key` inside `[section]`, if present.
    pub fn error(&self, section: &str, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            line: locate_key(&self.source, section, key),
            message: format!("{section}.{key}: {}", message.into()),
        }
    }
}

/// 1-based line of `key = ...` within `[section]` (top level when empty).
pub fn locate_key(source: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            continue;
        }
        if current != section {
            continue;
        }
        if let Some(rest) = line.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return Some(i + 1);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_when_empty() {
        let c = LoadedConfig::parse("").unwrap().config;
        assert_eq!(c.smm.k, 7);
        assert_eq!(c.tradeoff.n_max, 15);
        assert_eq!(c.bound.parsed_architectures().unwrap().len(), 4);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = LoadedConfig::parse("[smm]\nk = 5\nbogus = 1\n").unwrap_err();
        match err {
            CliError::Config { line, message } => {
                assert_eq!(line, Some(3));
                assert!(message.contains("bogus"), "{message}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn grids() {
        let g = Grid::log(1e-8, 1e-4, 5).values().unwrap();
        assert_eq!(g[0], 1e-8);
        assert_eq!(g[4], 1e-4);
        assert!((g[2] / 1e-6 - 1.0).abs() < 1e-12);
        assert!(Grid::List(vec![]).values().is_err());
        let lin = Grid::Range(RangeSpec {
            scale: Scale::Linear,
            min: 0.0,
            max: 1.0,
            points: 3,
        });
        assert_eq!(lin.values().unwrap(), vec![0.0, 0.5, 1.0]);
        let bad = Grid::Range(RangeSpec {
            scale: Scale::Log,
            min: 0.0,
            max: 1.0,
            points: 3,
        });
        assert!(bad.values().is_err());
    }

    #[test]
    fn parses_range_tables() {
        let src = "[alpha_sweep]\ntheta_l = { scale = \"log\", min = 1e-6, max = 1e-4, points = 3 }\nk = [7]\n";
        let c = LoadedConfig::parse(src).unwrap().config;
        assert_eq!(c.alpha_sweep.theta_l.values().unwrap().len(), 3);
    }

    #[test]
    fn locates_keys_by_section() {
        let src = "seed = 3\n[smm]\nk = 5\n[tradeoff]\nk = 1\n";
        assert_eq!(locate_key(src, "smm", "k"), Some(3));
        assert_eq!(locate_key(src, "", "seed"), Some(1));
        assert_eq!(locate_key(src, "bound", "k"), None);
    }
}
