//! Experiment configuration: TOML schema, command-line overrides and
//! validation into a resolved [`Plan`].
//!
//! Every section is optional; omitted values take per-experiment defaults
//! when the plan is built, so a parsed file serializes back to exactly what
//! was written.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use temporal_core::causal::{build_scenario_with, CausalKind, CausalScenario, ScenarioStates};
use temporal_core::channels::{Channel, LindbladGenerator};
use temporal_core::matcore::DensityMatrix;
use temporal_core::steering::{mubs, Measurement};
use temporal_core::sweep::time_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Hierarchy,
    Causal,
    Classical,
    Lg,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Hierarchy => "hierarchy",
            Self::Causal => "causal",
            Self::Classical => "classical",
            Self::Lg => "lg",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurements: Option<MeasurementConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub causal: Option<CausalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lg: Option<LgConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
    Identity,
    Precession,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementConfig {
    /// Number of mutually unbiased bases: 1 is {Z}, 2 is {X, Z}, 3 is {X, Y, Z}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mubs: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j31: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit3: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_pair: Option<[[f64; 3]; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LgConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisection: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vanishing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lg: Option<f64>,
}

/// A validation failure tied to a dotted key such as `grid.points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Values given on the command line; each replaces one config key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub points: Option<usize>,
    pub gamma: Option<f64>,
    pub j: Option<f64>,
    pub j31: Option<f64>,
}

impl Overrides {
    /// Command-line flag that set `key`, if any.
    pub fn flag_for(&self, key: &str) -> Option<&'static str> {
        match key {
            "output" if self.out.is_some() => Some("--out"),
            "grid.points" if self.points.is_some() => Some("--points"),
            "channel.rate" if self.gamma.is_some() => Some("--gamma"),
            "causal.j" if self.j.is_some() => Some("--J"),
            "causal.j31" if self.j31.is_some() => Some("--J31"),
            _ => None,
        }
    }
}

pub fn parse(src: &str) -> Result<ExperimentConfig, toml::de::Error> {
    toml::from_str(src)
}

pub fn to_toml(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("config values are always representable")
}

impl ExperimentConfig {
    /// Writes command-line overrides into the config. Flags the experiment
    /// never reads are rejected under the key they would have set.
    pub fn apply(&mut self, ov: &Overrides, experiment: Experiment) -> Check<()> {
        let uses = |key: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("not used by experiment {experiment}")))
            }
        };
        if let Some(out) = &ov.out {
            self.output = Some(out.clone());
        }
        if let Some(n) = ov.points {
            uses("grid.points", experiment != Experiment::Classical)?;
            self.grid.get_or_insert_with(Default::default).points = Some(n);
        }
        if let Some(g) = ov.gamma {
            uses(
                "channel.rate",
                matches!(experiment, Experiment::Hierarchy | Experiment::Lg),
            )?;
            self.channel.get_or_insert_with(|| default_channel(experiment)).rate = Some(g);
        }
        if let Some(j) = ov.j {
            uses("causal.j", experiment == Experiment::Causal)?;
            self.causal.get_or_insert_with(Default::default).j = Some(j);
        }
        if let Some(j31) = ov.j31 {
            uses("causal.j31", experiment == Experiment::Causal)?;
            self.causal.get_or_insert_with(Default::default).j31 = Some(j31);
        }
        Ok(())
    }
}

fn default_channel(experiment: Experiment) -> ChannelConfig {
    match experiment {
        Experiment::Lg => ChannelConfig {
            kind: ChannelKind::Precession,
            rate: None,
            omega: Some(1.0),
            axis: None,
        },
        _ => ChannelConfig {
            kind: ChannelKind::Depolarizing,
            rate: Some(1.0),
            omega: None,
            axis: None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedTolerances {
    /// Bisection interval width for vanishing times.
    pub bisection: f64,
    /// A quantifier at or below this value counts as vanished.
    pub vanishing: f64,
    /// TSR above this marks a direct cause.
    pub verdict: f64,
    /// Allowed `|TSR − D|` per classical row.
    pub classical: f64,
    /// `K` must exceed 1 by more than this to be flagged.
    pub lg: f64,
}

impl Default for ResolvedTolerances {
    fn default() -> Self {
        Self {
            bisection: 1e-6,
            vanishing: 1e-7,
            verdict: temporal_core::causal::VERDICT_THRESHOLD,
            classical: 1e-6,
            lg: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HierarchyPlan {
    pub channel: Channel,
    pub grid: Vec<f64>,
    pub settings: Vec<Measurement>,
    pub tol: ResolvedTolerances,
}

#[derive(Debug, Clone)]
pub struct CausalPlan {
    pub common: CausalScenario,
    pub direct: CausalScenario,
    pub grid: Vec<f64>,
    pub tol: ResolvedTolerances,
}

#[derive(Debug, Clone)]
pub struct ClassicalPlan {
    pub pairs: Vec<(f64, f64)>,
    pub tol: ResolvedTolerances,
}

#[derive(Debug, Clone)]
pub struct LgPlan {
    pub channel: Channel,
    pub grid: Vec<f64>,
    pub observable: [f64; 3],
    pub initial_state: DensityMatrix,
    pub tol: ResolvedTolerances,
}

#[derive(Debug, Clone)]
pub enum Plan {
    Hierarchy(HierarchyPlan),
    Causal(CausalPlan),
    Classical(ClassicalPlan),
    Lg(LgPlan),
}

type Check<T> = Result<T, ConfigError>;

fn positive(key: &str, v: f64) -> Check<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("must be positive and finite, got {v}")))
    }
}

fn bloch(key: &str, r: [f64; 3]) -> Check<DensityMatrix> {
    DensityMatrix::from_bloch(r).map_err(|e| ConfigError::new(key, e.to_string()))
}

fn unit(key: &str, v: [f64; 3]) -> Check<[f64; 3]> {
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !n.is_finite() || n == 0.0 {
        return Err(ConfigError::new(key, "must be a nonzero finite vector"));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn unused<T>(key: &str, section: &Option<T>, experiment: Experiment) -> Check<()> {
    match section {
        Some(_) => Err(ConfigError::new(key, format!("not used by experiment {experiment}"))),
        None => Ok(()),
    }
}

fn grid(cfg: &Option<GridConfig>, defaults: (f64, f64, usize)) -> Check<Vec<f64>> {
    let g = cfg.clone().unwrap_or_default();
    let start = g.start.unwrap_or(defaults.0);
    let stop = g.stop.unwrap_or(defaults.1);
    let points = g.points.unwrap_or(defaults.2);
    if !(start.is_finite() && start >= 0.0) {
        return Err(ConfigError::new(
            "grid.start",
            format!("must be finite and ≥ 0, got {start}"),
        ));
    }
    if !(stop.is_finite() && stop > start) {
        return Err(ConfigError::new(
            "grid.stop",
            format!("must be finite and > start ({start}), got {stop}"),
        ));
    }
    if points < 2 {
        return Err(ConfigError::new(
            "grid.points",
            format!("must be at least 2, got {points}"),
        ));
    }
    Ok(time_grid(start, stop, points))
}

fn channel(cfg: &Option<ChannelConfig>, experiment: Experiment) -> Check<Channel> {
    let c = cfg.clone().unwrap_or_else(|| default_channel(experiment));
    let forbid = |key: &str, present: bool| {
        if present {
            Err(ConfigError::new(key, format!("not used by channel kind {:?}", c.kind)))
        } else {
            Ok(())
        }
    };
    let rate = || match c.rate {
        Some(r) => positive("channel.rate", r),
        None => Err(ConfigError::new("channel.rate", "required for this channel kind")),
    };
    let built = match c.kind {
        ChannelKind::AmplitudeDamping | ChannelKind::PhaseDamping | ChannelKind::Depolarizing => {
            forbid("channel.axis", c.axis.is_some() && c.omega.is_none())?;
            let r = rate()?;
            let noise = match c.kind {
                ChannelKind::AmplitudeDamping => Channel::amplitude_damping(r),
                ChannelKind::PhaseDamping => Channel::phase_damping(r),
                _ => Channel::depolarizing(r),
            };
            match c.omega {
                None => noise,
                // precession on top of the noise
                Some(w) => {
                    let omega = positive("channel.omega", w)?;
                    let axis = unit("channel.axis", c.axis.unwrap_or([1.0, 0.0, 0.0]))?;
                    let h = Channel::precession(omega, axis).map_err(|e| ConfigError::new("channel", e.to_string()))?;
                    noise.and_then(|n| {
                        LindbladGenerator::new(h.generator().hamiltonian().clone(), n.generator().jumps().to_vec())
                            .map(Channel::Lindblad)
                    })
                }
            }
        }
        ChannelKind::Identity => {
            forbid("channel.rate", c.rate.is_some())?;
            forbid("channel.omega", c.omega.is_some())?;
            forbid("channel.axis", c.axis.is_some())?;
            Ok(Channel::identity(2))
        }
        ChannelKind::Precession => {
            forbid("channel.rate", c.rate.is_some())?;
            let omega = positive("channel.omega", c.omega.unwrap_or(1.0))?;
            let axis = unit("channel.axis", c.axis.unwrap_or([1.0, 0.0, 0.0]))?;
            Channel::precession(omega, axis)
        }
    };
    built.map_err(|e| ConfigError::new("channel", e.to_string()))
}

fn tolerances(cfg: &Option<Tolerances>) -> Check<ResolvedTolerances> {
    let t = cfg.clone().unwrap_or_default();
    let d = ResolvedTolerances::default();
    Ok(ResolvedTolerances {
        bisection: positive("tolerances.bisection", t.bisection.unwrap_or(d.bisection))?,
        vanishing: positive("tolerances.vanishing", t.vanishing.unwrap_or(d.vanishing))?,
        verdict: positive("tolerances.verdict", t.verdict.unwrap_or(d.verdict))?,
        classical: positive("tolerances.classical", t.classical.unwrap_or(d.classical))?,
        lg: positive("tolerances.lg", t.lg.unwrap_or(d.lg))?,
    })
}

/// Classical pairs: explicit ones first, then `random` uniform draws.
fn classical_pairs(cfg: &Option<ClassicalConfig>) -> Check<Vec<(f64, f64)>> {
    use rand::{Rng, SeedableRng};
    let c = cfg.clone().unwrap_or_default();
    let mut pairs = Vec::new();
    for (k, &[a, b]) in c.pairs.iter().flatten().enumerate() {
        for v in [a, b] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::new(
                    "classical.pairs",
                    format!("entry {k}: probabilities must lie in [0, 1], got {v}"),
                ));
            }
        }
        pairs.push((a, b));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(c.seed.unwrap_or(0));
    for _ in 0..c.random.unwrap_or(0) {
        pairs.push((rng.random(), rng.random()));
    }
    if pairs.is_empty() {
        return Err(ConfigError::new("classical", "needs `pairs` or `random` > 0"));
    }
    Ok(pairs)
}

/// Checks every invariant and resolves defaults for `experiment`.
pub fn validate(cfg: &ExperimentConfig, experiment: Experiment) -> Check<Plan> {
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(ConfigError::new(
                "experiment",
                format!("config is for `{e}` but `{experiment}` was requested"),
            ));
        }
    }
    let tol = tolerances(&cfg.tolerances)?;
    match experiment {
        Experiment::Hierarchy => {
            unused("causal", &cfg.causal, experiment)?;
            unused("classical", &cfg.classical, experiment)?;
            unused("lg", &cfg.lg, experiment)?;
            let n = cfg.measurements.as_ref().and_then(|m| m.mubs).unwrap_or(3);
            let settings =
                mubs(n).map_err(|_| ConfigError::new("measurements.mubs", format!("must be 1, 2 or 3, got {n}")))?;
            Ok(Plan::Hierarchy(HierarchyPlan {
                channel: channel(&cfg.channel, experiment)?,
                grid: grid(&cfg.grid, (0.0, 2.0, 201))?,
                settings,
                tol,
            }))
        }
        Experiment::Causal => {
            unused("channel", &cfg.channel, experiment)?;
            unused("measurements", &cfg.measurements, experiment)?;
            unused("classical", &cfg.classical, experiment)?;
            unused("lg", &cfg.lg, experiment)?;
            let c = cfg.causal.clone().unwrap_or_default();
            let j = positive("causal.j", c.j.unwrap_or(1.0))?;
            let j31 = positive("causal.j31", c.j31.unwrap_or(j))?;
            let defaults = ScenarioStates::default();
            let states = ScenarioStates {
                qubit3: c.qubit3.unwrap_or(defaults.qubit3),
                direct_pair: c.direct_pair.unwrap_or(defaults.direct_pair),
            };
            bloch("causal.qubit3", states.qubit3)?;
            for r in states.direct_pair {
                bloch("causal.direct_pair", r)?;
            }
            let build = |kind| {
                build_scenario_with(kind, j, j31, &states).map_err(|e| ConfigError::new("causal", e.to_string()))
            };
            Ok(Plan::Causal(CausalPlan {
                common: build(CausalKind::CommonCause)?,
                direct: build(CausalKind::DirectCause)?,
                grid: grid(&cfg.grid, (0.0, 4.0 * PI, 100))?,
                tol,
            }))
        }
        Experiment::Classical => {
            unused("grid", &cfg.grid, experiment)?;
            unused("channel", &cfg.channel, experiment)?;
            unused("measurements", &cfg.measurements, experiment)?;
            unused("causal", &cfg.causal, experiment)?;
            unused("lg", &cfg.lg, experiment)?;
            Ok(Plan::Classical(ClassicalPlan {
                pairs: classical_pairs(&cfg.classical)?,
                tol,
            }))
        }
        Experiment::Lg => {
            unused("measurements", &cfg.measurements, experiment)?;
            unused("causal", &cfg.causal, experiment)?;
            unused("classical", &cfg.classical, experiment)?;
            let l = cfg.lg.clone().unwrap_or_default();
            Ok(Plan::Lg(LgPlan {
                channel: channel(&cfg.channel, experiment)?,
                grid: grid(&cfg.grid, (0.0, PI, 181))?,
                observable: unit("lg.observable", l.observable.unwrap_or([0.0, 0.0, 1.0]))?,
                initial_state: bloch("lg.initial_state", l.initial_state.unwrap_or([0.0; 3]))?,
                tol,
            }))
        }
    }
}

/// 1-based line of `key` (dotted, e.g. `grid.points`) in `src`. Matches
/// `key = ` inside its `[section]`, a dotted `section.key = ` at top level,
/// or the `[section]` header itself for section-level keys.
pub fn locate(src: &str, key: &str) -> Option<usize> {
    let (section, leaf) = match key.split_once('.') {
        Some((s, l)) => (Some(s), l),
        None => (None, key),
    };
    let assigns = |line: &str, name: &str| {
        line.strip_prefix(name)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    };
    let mut current: Option<String> = None;
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix('[') {
            let name = header.split(']').next().unwrap_or("").trim().to_string();
            if section.is_none() && name == leaf {
                return Some(idx + 1);
            }
            current = Some(name);
            continue;
        }
        let hit = match (section, current.as_deref()) {
            (Some(s), Some(c)) => c == s && assigns(line, leaf),
            (Some(s), None) => assigns(line, &format!("{s}.{leaf}")),
            (None, None) => assigns(line, leaf),
            (None, Some(_)) => false,
        };
        if hit {
            return Some(idx + 1);
        }
    }
    section.and_then(|s| locate(src, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
experiment = "hierarchy"
output = "out.csv"

[grid]
start = 0.0
stop = 2.0
points = 201

[channel]
kind = "depolarizing"
rate = 1.0

[measurements]
mubs = 3

[tolerances]
bisection = 1e-6
"#;

    #[test]
    fn parses_full_example() {
        let cfg = parse(FULL).unwrap();
        assert_eq!(cfg.experiment, Some(Experiment::Hierarchy));
        assert_eq!(cfg.grid.as_ref().unwrap().points, Some(201));
        assert_eq!(cfg.channel.as_ref().unwrap().kind, ChannelKind::Depolarizing);
        let Plan::Hierarchy(p) = validate(&cfg, Experiment::Hierarchy).unwrap() else {
            panic!("wrong plan");
        };
        assert_eq!(p.grid.len(), 201);
        assert_eq!(p.settings.len(), 3);
    }

    #[test]
    fn round_trip() {
        let cfg = parse(FULL).unwrap();
        assert_eq!(parse(&to_toml(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let err = parse("[grid]\npoints = 3\nstep = 0.1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("step"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
        assert!(parse("bogus = 1\n").is_err());
    }

    #[test]
    fn integers_accepted_for_floats() {
        let cfg = parse("[grid]\nstart = 0\nstop = 2\n").unwrap();
        assert_eq!(cfg.grid.unwrap().stop, Some(2.0));
    }

    #[test]
    fn invariants() {
        let bad = [
            ("[grid]\npoints = 1\n", "grid.points"),
            ("[grid]\nstart = 1.0\nstop = 1.0\n", "grid.stop"),
            ("[grid]\nstart = -1.0\n", "grid.start"),
            ("[channel]\nkind = \"depolarizing\"\nrate = 0.0\n", "channel.rate"),
            ("[channel]\nkind = \"amplitude-damping\"\n", "channel.rate"),
            ("[channel]\nkind = \"identity\"\nrate = 1.0\n", "channel.rate"),
            ("[measurements]\nmubs = 4\n", "measurements.mubs"),
            ("experiment = \"lg\"\n", "experiment"),
            ("[causal]\nj = 1.0\n", "causal"),
            (
                "[channel]\nkind = \"depolarizing\"\nrate = 1.0\naxis = [0.0, 0.0, 1.0]\n",
                "channel.axis",
            ),
            (
                "[channel]\nkind = \"depolarizing\"\nrate = 1.0\nomega = -1.0\n",
                "channel.omega",
            ),
        ];
        for (src, key) in bad {
            let err = validate(&parse(src).unwrap(), Experiment::Hierarchy).unwrap_err();
            assert_eq!(err.key, key, "{src}");
        }
    }

    #[test]
    fn noisy_precession() {
        let src = "[channel]\nkind = \"phase-damping\"\nrate = 0.5\nomega = 2.0\naxis = [0.0, 3.0, 0.0]\n";
        let Plan::Lg(p) = validate(&parse(src).unwrap(), Experiment::Lg).unwrap() else {
            panic!("expected an lg plan");
        };
        let Channel::Lindblad(g) = &p.channel else {
            panic!("expected a Lindblad channel, got {:?}", p.channel);
        };
        let want = Channel::precession(2.0, [0.0, 1.0, 0.0]).unwrap().generator();
        assert!((g.hamiltonian() - want.hamiltonian()).max_abs() < 1e-15);
        assert_eq!(g.jumps(), Channel::phase_damping(0.5).unwrap().generator().jumps());
    }

    #[test]
    fn causal_defaults_and_checks() {
        let Plan::Causal(p) = validate(&ExperimentConfig::default(), Experiment::Causal).unwrap() else {
            panic!();
        };
        assert_eq!(p.grid.len(), 100);
        assert_eq!(p.direct.j31(), 1.0);
        let cfg = parse("[causal]\nj = 2.0\n").unwrap();
        let Plan::Causal(p) = validate(&cfg, Experiment::Causal).unwrap() else {
            panic!();
        };
        assert_eq!(p.direct.j31(), 2.0);
        let cfg = parse("[causal]\nqubit3 = [0.0, 0.0, 2.0]\n").unwrap();
        assert_eq!(validate(&cfg, Experiment::Causal).unwrap_err().key, "causal.qubit3");
        let cfg = parse("[causal]\nj31 = -1.0\n").unwrap();
        assert_eq!(validate(&cfg, Experiment::Causal).unwrap_err().key, "causal.j31");
    }

    #[test]
    fn classical_rows() {
        let cfg = parse("[classical]\npairs = [[0.8, 0.3]]\nrandom = 4\nseed = 3\n").unwrap();
        let Plan::Classical(p) = validate(&cfg, Experiment::Classical).unwrap() else {
            panic!();
        };
        assert_eq!(p.pairs.len(), 5);
        assert_eq!(p.pairs[0], (0.8, 0.3));
        assert!(validate(&ExperimentConfig::default(), Experiment::Classical).is_err());
        let cfg = parse("[classical]\npairs = [[1.2, 0.3]]\n").unwrap();
        assert_eq!(
            validate(&cfg, Experiment::Classical).unwrap_err().key,
            "classical.pairs"
        );
    }

    #[test]
    fn overrides_replace_keys() {
        let mut cfg = parse(FULL).unwrap();
        let ov = Overrides {
            points: Some(11),
            gamma: Some(2.0),
            ..Default::default()
        };
        cfg.apply(&ov, Experiment::Hierarchy).unwrap();
        assert_eq!(cfg.grid.as_ref().unwrap().points, Some(11));
        assert_eq!(cfg.channel.as_ref().unwrap().rate, Some(2.0));
        assert_eq!(ov.flag_for("grid.points"), Some("--points"));
        assert_eq!(ov.flag_for("causal.j"), None);

        let mut lg = ExperimentConfig::default();
        lg.apply(&ov, Experiment::Lg).unwrap();
        let err = validate(&lg, Experiment::Lg).unwrap_err();
        assert_eq!(err.key, "channel.rate");
    }

    #[test]
    fn locate_keys() {
        assert_eq!(locate(FULL, "grid.points"), Some(8));
        assert_eq!(locate(FULL, "channel.rate"), Some(12));
        assert_eq!(locate(FULL, "experiment"), Some(2));
        assert_eq!(locate(FULL, "measurements"), Some(14));
        // missing key falls back to its section header
        assert_eq!(locate(FULL, "grid.start2"), Some(5));
        assert_eq!(locate("grid.points = 3\n", "grid.points"), Some(1));
        assert_eq!(locate(FULL, "causal.j"), None);
    }
}
