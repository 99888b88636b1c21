//! Experiment configuration and its text format.
//!
//! A config is a list of `key = value` lines; `#` starts a comment. Keys:
//!
//! | key | value | default |
//! |-----|-------|---------|
//! | `kind` | experiment kind, e.g. `roc` | required |
//! | `m_antennas` | integer ≥ 2 | required |
//! | `n_pilot` | integer ≥ 1 | required |
//! | `n_random` | integer ≥ 1 | `n_pilot` |
//! | `p_b`, `p_e`, `p_er`, `p_a` | power, linear or `<x>dB` | `p_b` required, `p_e = p_er = 0`, `p_a = 1` |
//! | `alpha_b`, `alpha_e` | large-scale gains | 1 |
//! | `sigma2_a`, `sigma2_b`, `sigma2_e` | noise variances | 1 |
//! | `random_phase_attack` | `none`, `random_bits`, `gaussian` | `none` |
//! | `sweep` | `<param>: v1, v2, ...` | required |
//! | `trials` | integer ≥ 1 | 100000 |
//! | `master_seed` | u64 | 0 |
//! | `pfa_targets` | comma-separated probabilities | required for detector kinds |
//! | `pipeline` | `ils` or `ideal` | `ils` |
//! | `output_path` | file path | none (stdout) |
//!
//! Sweepable parameters are the scenario fields above plus `n_both`, which
//! sets `n_pilot` and `n_random` together.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use pilotguard_core::channel::ChannelModel;
use pilotguard_core::estimation::RandomPhaseEstimator;
use pilotguard_core::training::{RandomPhaseAttack, Scenario};

use crate::error::{config_err, HarnessError, Result};

pub const DEFAULT_TRIALS: usize = 100_000;

/// Trial indices must fit below the sweep-index bits of a substream id, with
/// room for the second (H₁) pool of ROC runs.
pub const MAX_TRIALS: usize = 1 << 39;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    SnrCurves,
    Roc,
    PdVsN,
    PdVsM,
    PdVsPe,
    MseVsN,
    SecrecyVsPa,
    TheoryTable,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::SnrCurves,
        Self::Roc,
        Self::PdVsN,
        Self::PdVsM,
        Self::PdVsPe,
        Self::MseVsN,
        Self::SecrecyVsPa,
        Self::TheoryTable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SnrCurves => "snr_curves",
            Self::Roc => "roc",
            Self::PdVsN => "pd_vs_n",
            Self::PdVsM => "pd_vs_m",
            Self::PdVsPe => "pd_vs_pe",
            Self::MseVsN => "mse_vs_n",
            Self::SecrecyVsPa => "secrecy_vs_pa",
            Self::TheoryTable => "theory_table",
        }
    }

    /// Kinds whose output depends on false-alarm targets.
    pub fn needs_pfa_targets(self) -> bool {
        matches!(self, Self::Roc | Self::PdVsN | Self::PdVsM | Self::PdVsPe)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown experiment kind '{s}'"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepParam {
    MAntennas,
    NPilot,
    NRandom,
    /// `n_pilot` and `n_random` together.
    NBoth,
    PB,
    PE,
    PEr,
    PA,
    AlphaB,
    AlphaE,
    Sigma2A,
    Sigma2B,
    Sigma2E,
}

impl SweepParam {
    const ALL: [SweepParam; 13] = [
        Self::MAntennas,
        Self::NPilot,
        Self::NRandom,
        Self::NBoth,
        Self::PB,
        Self::PE,
        Self::PEr,
        Self::PA,
        Self::AlphaB,
        Self::AlphaE,
        Self::Sigma2A,
        Self::Sigma2B,
        Self::Sigma2E,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MAntennas => "m_antennas",
            Self::NPilot => "n_pilot",
            Self::NRandom => "n_random",
            Self::NBoth => "n_both",
            Self::PB => "p_b",
            Self::PE => "p_e",
            Self::PEr => "p_er",
            Self::PA => "p_a",
            Self::AlphaB => "alpha_b",
            Self::AlphaE => "alpha_e",
            Self::Sigma2A => "sigma2_a",
            Self::Sigma2B => "sigma2_b",
            Self::Sigma2E => "sigma2_e",
        }
    }

    fn is_count(self) -> bool {
        matches!(self, Self::MAntennas | Self::NPilot | Self::NRandom | Self::NBoth)
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown sweep parameter '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// How the random-phase channel estimate is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Pipeline {
    /// LS with Bob's true random bits.
    Ideal,
    /// Blind ILS, as a real receiver would run it.
    #[default]
    Ils,
}

impl Pipeline {
    pub fn estimator(self) -> RandomPhaseEstimator {
        match self {
            Pipeline::Ideal => RandomPhaseEstimator::KnownBits,
            Pipeline::Ils => RandomPhaseEstimator::Ils,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub base: Scenario,
    pub sweep: Sweep,
    pub trials: usize,
    pub master_seed: u64,
    pub pfa_targets: Vec<f64>,
    pub output_path: Option<PathBuf>,
    pub pipeline: Pipeline,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return config_err(format!("trials must lie in [1, {MAX_TRIALS}], got {}", self.trials));
        }
        if self.sweep.values.is_empty() {
            return config_err("sweep needs at least one value");
        }
        if self.kind.needs_pfa_targets() && self.pfa_targets.is_empty() {
            return config_err(format!("pfa_targets is required for kind {}", self.kind));
        }
        for &p in &self.pfa_targets {
            if !(p > 0.0 && p < 1.0) {
                return config_err(format!("pfa_targets entries must lie in (0, 1), got {p}"));
            }
        }
        self.base.validate()?;
        for &v in &self.sweep.values {
            self.scenario_at(v)?;
        }
        Ok(())
    }

    /// The base scenario with the sweep parameter set to `value`.
    pub fn scenario_at(&self, value: f64) -> Result<Scenario> {
        let mut s = self.base.clone();
        let param = self.sweep.param;
        let count = || -> Result<usize> {
            if value.fract() != 0.0 || !(value >= 1.0) || value > u32::MAX as f64 {
                return config_err(format!("sweep value {value} is not a valid count for {}", param.as_str()));
            }
            Ok(value as usize)
        };
        match param {
            SweepParam::MAntennas => {
                s.model = ChannelModel::new(count()?, s.model.alpha_b(), s.model.alpha_e())?;
            }
            SweepParam::NPilot => s.n_pilot = count()?,
            SweepParam::NRandom => s.n_random = count()?,
            SweepParam::NBoth => {
                s.n_pilot = count()?;
                s.n_random = s.n_pilot;
            }
            SweepParam::PB => s.p_b = value,
            SweepParam::PE => s.p_e = value,
            SweepParam::PEr => s.p_er = value,
            SweepParam::PA => s.p_a = value,
            SweepParam::AlphaB => s.model = ChannelModel::new(s.m_antennas(), value, s.model.alpha_e())?,
            SweepParam::AlphaE => s.model = ChannelModel::new(s.m_antennas(), s.model.alpha_b(), value)?,
            SweepParam::Sigma2A => s.sigma2_a = value,
            SweepParam::Sigma2B => s.sigma2_b = value,
            SweepParam::Sigma2E => s.sigma2_e = value,
        }
        s.validate()?;
        Ok(s)
    }
}

const KNOWN_KEYS: [&str; 20] = [
    "kind",
    "m_antennas",
    "n_pilot",
    "n_random",
    "p_b",
    "p_e",
    "p_er",
    "p_a",
    "alpha_b",
    "alpha_e",
    "sigma2_a",
    "sigma2_b",
    "sigma2_e",
    "random_phase_attack",
    "sweep",
    "trials",
    "master_seed",
    "pfa_targets",
    "pipeline",
    "output_path",
];

struct Entry {
    value: String,
    line: usize,
}

struct Entries(HashMap<String, Entry>);

impl Entries {
    fn err<T>(&self, key: &str, msg: impl fmt::Display) -> Result<T> {
        match self.0.get(key) {
            Some(e) => config_err(format!("line {}: {key}: {msg}", e.line)),
            None => config_err(format!("{key}: {msg}")),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|e| e.value.as_str())
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse(v).map(Some).or_else(|m| self.err(key, m)),
        }
    }

    fn require<T>(&self, key: &str, value: Option<T>) -> Result<T> {
        value.map_or_else(|| config_err(format!("missing required key {key}")), Ok)
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.parsed(key, parse_count)
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        self.parsed(key, parse_real)
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("expected a non-negative integer, got '{s}'"))
}

/// A real number, optionally suffixed `dB` (`x dB` means `10^(x/10)`).
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let (num, db) = match t.strip_suffix("dB").or_else(|| t.strip_suffix("db")) {
        Some(n) => (n.trim_end(), true),
        None => (t, false),
    };
    let x: f64 = num.parse().map_err(|_| format!("expected a number, got '{s}'"))?;
    let x = if db { 10f64.powf(x / 10.0) } else { x };
    if !x.is_finite() {
        return Err(format!("value '{s}' is not finite"));
    }
    Ok(x)
}

fn parse_attack(s: &str) -> std::result::Result<RandomPhaseAttack, String> {
    match s {
        "none" => Ok(RandomPhaseAttack::None),
        "random_bits" => Ok(RandomPhaseAttack::RandomBits),
        "gaussian" => Ok(RandomPhaseAttack::Gaussian),
        _ => Err(format!("unknown random_phase_attack '{s}' (expected none, random_bits or gaussian)")),
    }
}

fn parse_pipeline(s: &str) -> std::result::Result<Pipeline, String> {
    match s {
        "ils" => Ok(Pipeline::Ils),
        "ideal" => Ok(Pipeline::Ideal),
        _ => Err(format!("unknown pipeline '{s}' (expected ils or ideal)")),
    }
}

fn parse_list(s: &str, item: impl Fn(&str) -> std::result::Result<f64, String>) -> std::result::Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(item)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("expected at least one value".into());
    }
    Ok(values)
}

fn parse_sweep(s: &str) -> std::result::Result<Sweep, String> {
    let (param, values) = s.split_once(':').ok_or("expected '<param>: v1, v2, ...'")?;
    let param: SweepParam = param.trim().parse()?;
    let values = if param.is_count() {
        parse_list(values, |v| parse_count(v).map(|n| n as f64))?
    } else {
        parse_list(values, parse_real)?
    };
    Ok(Sweep { param, values })
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return config_err(format!("line {line}: expected 'key = value', got '{content}'"));
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return config_err(format!("line {line}: unknown key '{key}'"));
        }
        let entry = Entry { value: value.trim().to_string(), line };
        if let Some(prev) = map.insert(key.to_string(), entry) {
            return config_err(format!("line {line}: duplicate key {key} (first set on line {})", prev.line));
        }
    }
    Ok(Entries(map))
}

/// Parses and validates a config. `kind` must be present.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    parse_spec_for(text, None)
}

/// Like [`parse_spec`], but `kind` may be omitted from the text when
/// `expected` is given, and must match it when present.
pub fn parse_spec_for(text: &str, expected: Option<ExperimentKind>) -> Result<ExperimentSpec> {
    let e = tokenize(text)?;
    let kind = match (e.parsed("kind", |s| s.parse::<ExperimentKind>())?, expected) {
        (Some(k), Some(x)) if k != x => return e.err("kind", format!("config is for {k}, but {x} was requested")),
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return config_err("missing required key kind"),
    };

    let m = e.require("m_antennas", e.count("m_antennas")?)?;
    let n_pilot = e.require("n_pilot", e.count("n_pilot")?)?;
    let n_random = e.count("n_random")?.unwrap_or(n_pilot);
    let p_b = e.require("p_b", e.real("p_b")?)?;
    let alpha_b = e.real("alpha_b")?.unwrap_or(1.0);
    let alpha_e = e.real("alpha_e")?.unwrap_or(1.0);

    let model = ChannelModel::new(m, alpha_b, alpha_e).or_else(|err| {
        let key = if m < 2 { "m_antennas" } else if !(alpha_b >= 0.0) { "alpha_b" } else { "alpha_e" };
        e.err(key, err)
    })?;
    let base = Scenario {
        model,
        n_pilot,
        n_random,
        p_b,
        p_e: e.real("p_e")?.unwrap_or(0.0),
        p_er: e.real("p_er")?.unwrap_or(0.0),
        random_phase_attack: e.parsed("random_phase_attack", parse_attack)?.unwrap_or_default(),
        sigma2_a: e.real("sigma2_a")?.unwrap_or(1.0),
        sigma2_b: e.real("sigma2_b")?.unwrap_or(1.0),
        sigma2_e: e.real("sigma2_e")?.unwrap_or(1.0),
        p_a: e.real("p_a")?.unwrap_or(1.0),
    };

    let sweep = e.require("sweep", e.parsed("sweep", parse_sweep)?)?;
    let spec = ExperimentSpec {
        kind,
        base,
        sweep,
        trials: e.count("trials")?.unwrap_or(DEFAULT_TRIALS),
        master_seed: e
            .parsed("master_seed", |s| s.parse::<u64>().map_err(|_| format!("expected a 64-bit unsigned integer, got '{s}'")))?
            .unwrap_or(0),
        pfa_targets: e.parsed("pfa_targets", |s| parse_list(s, parse_real))?.unwrap_or_default(),
        output_path: e.raw("output_path").map(PathBuf::from),
        pipeline: e.parsed("pipeline", parse_pipeline)?.unwrap_or_default(),
    };

    if spec.kind.needs_pfa_targets() && spec.pfa_targets.is_empty() {
        return config_err(format!("missing required key pfa_targets for kind {}", spec.kind));
    }
    spec.validate().map_err(|err| match err {
        HarnessError::Core(c) => HarnessError::Config(c.to_string()),
        other => other,
    })?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "kind = roc\nm_antennas = 4\nn_pilot = 64\np_b = 10\np_e = 1\nsweep = p_e: 1\npfa_targets = 0.01\n";

    fn err_text(text: &str) -> String {
        parse_spec(text).unwrap_err().to_string()
    }

    #[test]
    fn db_suffix() {
        assert_eq!(parse_real("10dB").unwrap(), 10.0);
        assert_eq!(parse_real("0 dB").unwrap(), 1.0);
        assert!((parse_real("-5dB").unwrap() - 10f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(parse_real("2.5").unwrap(), 2.5);
        assert!(parse_real("ten").is_err());
        assert!(parse_real("1e400").is_err());
    }

    #[test]
    fn defaults() {
        let spec = parse_spec(BASE).unwrap();
        assert_eq!(spec.kind, ExperimentKind::Roc);
        assert_eq!(spec.base.n_random, 64);
        assert_eq!(spec.trials, DEFAULT_TRIALS);
        assert_eq!(spec.master_seed, 0);
        assert_eq!(spec.pipeline, Pipeline::Ils);
        assert_eq!(spec.base.sigma2_a, 1.0);
        assert_eq!(spec.base.p_a, 1.0);
        assert_eq!(spec.base.random_phase_attack, RandomPhaseAttack::None);
        assert_eq!(spec.output_path, None);
    }

    #[test]
    fn comments_and_whitespace() {
        let text = format!("# header\n\n{BASE}  trials = 7   # inline\n");
        assert_eq!(parse_spec(&text).unwrap().trials, 7);
    }

    #[test]
    fn missing_pfa_targets_named() {
        let text = BASE.replace("pfa_targets = 0.01\n", "");
        assert!(err_text(&text).contains("pfa_targets"));
    }

    #[test]
    fn errors_name_key_and_line() {
        let text = BASE.replace("p_b = 10", "p_b = lots");
        let msg = err_text(&text);
        assert!(msg.contains("line 4") && msg.contains("p_b"), "{msg}");
        let msg = err_text(&format!("{BASE}pipeline = fast\n"));
        assert!(msg.contains("line 8") && msg.contains("pipeline"), "{msg}");
        let msg = err_text(&BASE.replace("kind = roc", "kind = histogram"));
        assert!(msg.contains("line 1") && msg.contains("kind"), "{msg}");
        assert!(err_text(&format!("{BASE}colour = blue\n")).contains("colour"));
        assert!(err_text(&format!("{BASE}p_b = 3\n")).contains("duplicate"));
        assert!(err_text("m_antennas = 4").contains("kind"));
        assert!(err_text(&BASE.replace("n_pilot = 64\n", "")).contains("n_pilot"));
    }

    #[test]
    fn sweep_parsing() {
        let spec = parse_spec(&BASE.replace("sweep = p_e: 1", "sweep = p_e: -10dB, 0dB, 2")).unwrap();
        assert_eq!(spec.sweep.param, SweepParam::PE);
        assert_eq!(spec.sweep.values, vec![0.1, 1.0, 2.0]);
        let spec = parse_spec(&BASE.replace("sweep = p_e: 1", "sweep = n_both: 16, 32")).unwrap();
        let s = spec.scenario_at(32.0).unwrap();
        assert_eq!((s.n_pilot, s.n_random), (32, 32));
        assert!(err_text(&BASE.replace("sweep = p_e: 1", "sweep = n_both: 16.5")).contains("sweep"));
        assert!(err_text(&BASE.replace("sweep = p_e: 1", "sweep = volume: 1")).contains("volume"));
        assert!(err_text(&BASE.replace("sweep = p_e: 1", "sweep = p_e:")).contains("sweep"));
        assert!(err_text(&BASE.replace("sweep = p_e: 1", "sweep = m_antennas: 1")).contains("config error"));
    }

    #[test]
    fn sweep_applies_to_model() {
        let spec = parse_spec(&BASE.replace("sweep = p_e: 1", "sweep = m_antennas: 2, 8")).unwrap();
        assert_eq!(spec.scenario_at(8.0).unwrap().m_antennas(), 8);
        let spec = parse_spec(&BASE.replace("sweep = p_e: 1", "sweep = alpha_e: 0.5")).unwrap();
        assert_eq!(spec.scenario_at(0.5).unwrap().model.alpha_e(), 0.5);
    }

    #[test]
    fn kind_from_caller() {
        let text = BASE.replace("kind = roc\n", "");
        assert_eq!(parse_spec_for(&text, Some(ExperimentKind::Roc)).unwrap().kind, ExperimentKind::Roc);
        assert!(parse_spec_for(BASE, Some(ExperimentKind::MseVsN)).unwrap_err().to_string().contains("kind"));
    }

    #[test]
    fn validation() {
        assert!(err_text(&format!("{BASE}trials = 0\n")).contains("trials"));
        assert!(err_text(&BASE.replace("pfa_targets = 0.01", "pfa_targets = 1.5")).contains("pfa_targets"));
        assert!(err_text(&BASE.replace("p_e = 1", "p_e = -1")).contains("p_e"));
        assert!(err_text(&format!("{BASE}random_phase_attack = loud\n")).contains("random_phase_attack"));
    }

    #[test]
    fn kinds_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.as_str().parse::<ExperimentKind>().unwrap(), k);
        }
        for p in SweepParam::ALL {
            assert_eq!(p.as_str().parse::<SweepParam>().unwrap(), p);
        }
    }
}
