//! Experiment configuration, the arm grid and parallel execution.
//!
//! A config is one JSON document. Top-level keys set parameters shared by all
//! arms; when `arms` is omitted the grid expands to every design × tendency
//! pair. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{
    run_replicate_traced, GbestMode, InitRange, ReplicateResult, SimConfig, TraceLevel,
};
use crate::error::{ConfigError, RunError};
use crate::kinematics::Binarization;
use crate::policy::{CoeffBounds, Tendency};
use crate::stats::{aggregate_arm, compare_arms, median, ArmSummary, Comparison};
use crate::topology::{DesignKind, OrgDesign};

pub const DEFAULT_REPLICATES: u32 = 200;
pub const DEFAULT_SILO_COUNT: usize = 5;
pub const DEFAULT_RESHUFFLE_INTERVAL: u32 = 10;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

/// Per-arm parameter overrides. Every field falls back to the top-level value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub silo_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reshuffle_interval: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure_horizon: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia_init: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_belief_init: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prestige_bias_init: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gbest_mode: Option<GbestMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stochastic_acceleration: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binarization: Option<Binarization>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeze_on_goal: Option<bool>,
}

impl Overrides {
    /// Fields set in `self` win over fields set in `base`.
    fn or(&self, base: &Overrides) -> Overrides {
        Overrides {
            silo_count: self.silo_count.or(base.silo_count),
            reshuffle_interval: self.reshuffle_interval.or(base.reshuffle_interval),
            v_max: self.v_max.or(base.v_max),
            delta: self.delta.or(base.delta),
            alpha: self.alpha.or(base.alpha),
            pressure_horizon: self.pressure_horizon.or(base.pressure_horizon),
            coeff_min: self.coeff_min.or(base.coeff_min),
            coeff_max: self.coeff_max.or(base.coeff_max),
            inertia_init: self.inertia_init.or(base.inertia_init),
            self_belief_init: self.self_belief_init.or(base.self_belief_init),
            prestige_bias_init: self.prestige_bias_init.or(base.prestige_bias_init),
            gbest_mode: self.gbest_mode.or(base.gbest_mode),
            stochastic_acceleration: self
                .stochastic_acceleration
                .or(base.stochastic_acceleration),
            binarization: self.binarization.or(base.binarization),
            freeze_on_goal: self.freeze_on_goal.or(base.freeze_on_goal),
        }
    }

    /// Fully explicit overrides describing `config`.
    fn explicit(config: &SimConfig) -> Overrides {
        let (silo_count, reshuffle_interval) = match config.design {
            OrgDesign::FullyNetworked => (None, None),
            OrgDesign::Siloed { silo_count } => (Some(silo_count), None),
            OrgDesign::Dynamic {
                silo_count,
                reshuffle_interval,
            } => (Some(silo_count), Some(reshuffle_interval)),
        };
        Overrides {
            silo_count,
            reshuffle_interval,
            v_max: Some(config.v_max),
            delta: Some(config.delta),
            alpha: Some(config.alpha),
            pressure_horizon: Some(config.pressure_horizon),
            coeff_min: Some(config.coeff_bounds.min),
            coeff_max: Some(config.coeff_bounds.max),
            inertia_init: Some([config.inertia_init.lo, config.inertia_init.hi]),
            self_belief_init: Some([config.self_belief_init.lo, config.self_belief_init.hi]),
            prestige_bias_init: Some([config.prestige_bias_init.lo, config.prestige_bias_init.hi]),
            gbest_mode: Some(config.gbest_mode),
            stochastic_acceleration: Some(config.stochastic_acceleration),
            binarization: Some(config.binarization),
            freeze_on_goal: Some(config.freeze_on_goal),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub design: DesignKind,
    pub tendency: Tendency,
    #[serde(flatten)]
    pub overrides: Overrides,
}

/// The on-disk configuration document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arms: Option<Vec<ArmEntry>>,
    #[serde(flatten)]
    pub defaults: Overrides,
}

/// Command-line values that replace config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CliOverrides {
    pub master_seed: Option<u64>,
    pub replicate_count: Option<u32>,
    pub output_dir: Option<PathBuf>,
    pub trace: Option<TraceLevel>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub label: String,
    pub config: SimConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub arms: Vec<Arm>,
    pub output_dir: PathBuf,
    pub trace: TraceLevel,
    /// `None` uses every available core.
    pub workers: Option<usize>,
}

pub fn default_label(design: DesignKind, tendency: Tendency) -> String {
    format!("{design}_{tendency}")
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '+'))
        && label != "."
        && label != ".."
}

fn range_error(
    field: impl Into<String>,
    value: impl ToString,
    bounds: impl Into<String>,
) -> ConfigError {
    ConfigError::OutOfRange {
        field: field.into(),
        value: value.to_string(),
        bounds: bounds.into(),
    }
}

fn json_error(err: serde_json::Error) -> ConfigError {
    ConfigError::Parse(err.to_string())
}

const OVERRIDE_KEYS: &[&str] = &[
    "silo_count",
    "reshuffle_interval",
    "v_max",
    "delta",
    "alpha",
    "pressure_horizon",
    "coeff_min",
    "coeff_max",
    "inertia_init",
    "self_belief_init",
    "prestige_bias_init",
    "gbest_mode",
    "stochastic_acceleration",
    "binarization",
    "freeze_on_goal",
];
const TOP_KEYS: &[&str] = &[
    "master_seed",
    "replicate_count",
    "dim",
    "agent_count",
    "max_iterations",
    "output_dir",
    "trace",
    "workers",
    "arms",
];
const ARM_KEYS: &[&str] = &["label", "design", "tendency"];

/// Rejects keys outside the documented schema. Flattened serde structs cannot
/// do this themselves.
fn check_keys(doc: &serde_json::Value) -> Result<(), ConfigError> {
    let known = |key: &str, own: &[&str]| own.contains(&key) || OVERRIDE_KEYS.contains(&key);
    let Some(top) = doc.as_object() else {
        return Err(ConfigError::Parse("config must be a JSON object".into()));
    };
    for key in top.keys() {
        if !known(key, TOP_KEYS) {
            return Err(ConfigError::UnknownKey(key.clone()));
        }
    }
    if let Some(arms) = top.get("arms").and_then(|a| a.as_array()) {
        for (i, arm) in arms.iter().enumerate() {
            for key in arm.as_object().into_iter().flat_map(|o| o.keys()) {
                if !known(key, ARM_KEYS) {
                    return Err(ConfigError::UnknownKey(format!("arms[{i}].{key}")));
                }
            }
        }
    }
    Ok(())
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let doc: serde_json::Value = serde_json::from_str(text).map_err(json_error)?;
        check_keys(&doc)?;
        serde_json::from_value(doc).map_err(json_error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies defaults and overrides and validates every arm.
    pub fn resolve(&self, cli: &CliOverrides) -> Result<ExperimentSpec, ConfigError> {
        let master_seed = cli
            .master_seed
            .or(self.master_seed)
            .ok_or(ConfigError::MissingField("master_seed"))?;
        let base = SimConfig::default();
        let replicate_count = cli
            .replicate_count
            .or(self.replicate_count)
            .unwrap_or(DEFAULT_REPLICATES);
        let dim = self.dim.unwrap_or(base.dim);
        let agent_count = self.agent_count.unwrap_or(base.agent_count);
        let max_iterations = self.max_iterations.unwrap_or(base.max_iterations);

        for (field, ok, value, bounds) in [
            (
                "replicate_count",
                replicate_count >= 1,
                replicate_count.to_string(),
                ">= 1",
            ),
            ("dim", dim >= 1, dim.to_string(), ">= 1"),
            (
                "agent_count",
                agent_count >= 1,
                agent_count.to_string(),
                ">= 1",
            ),
            (
                "max_iterations",
                max_iterations >= 1,
                max_iterations.to_string(),
                ">= 1",
            ),
        ] {
            if !ok {
                return Err(range_error(field, value, bounds));
            }
        }
        let workers = cli.workers.or(self.workers);
        if workers == Some(0) {
            return Err(range_error("workers", 0, ">= 1"));
        }

        let entries: Vec<(bool, ArmEntry)> = match &self.arms {
            Some(list) if list.is_empty() => {
                return Err(range_error("arms", "[]", "at least one arm"))
            }
            Some(list) => list.iter().cloned().map(|a| (true, a)).collect(),
            None => Tendency::ALL
                .iter()
                .flat_map(|&tendency| {
                    DesignKind::ALL.iter().map(move |&design| {
                        (
                            false,
                            ArmEntry {
                                label: None,
                                design,
                                tendency,
                                overrides: Overrides::default(),
                            },
                        )
                    })
                })
                .collect(),
        };

        let mut arms = Vec::with_capacity(entries.len());
        let mut seen = BTreeSet::new();
        for (index, (explicit, entry)) in entries.iter().enumerate() {
            let prefix = if *explicit {
                format!("arms[{index}].")
            } else {
                String::new()
            };
            let o = entry.overrides.or(&self.defaults);
            let label = entry
                .label
                .clone()
                .unwrap_or_else(|| default_label(entry.design, entry.tendency));
            if !valid_label(&label) {
                return Err(range_error(
                    format!("{prefix}label"),
                    &label,
                    "[A-Za-z0-9._+-]+",
                ));
            }
            if !seen.insert(label.clone()) {
                return Err(ConfigError::DuplicateLabel(label));
            }
            let silo_count = o.silo_count.unwrap_or(DEFAULT_SILO_COUNT);
            let reshuffle_interval = o.reshuffle_interval.unwrap_or(DEFAULT_RESHUFFLE_INTERVAL);
            let design = match entry.design {
                DesignKind::FullyNetworked => OrgDesign::FullyNetworked,
                DesignKind::Siloed => OrgDesign::Siloed { silo_count },
                DesignKind::Dynamic => OrgDesign::Dynamic {
                    silo_count,
                    reshuffle_interval,
                },
            };
            let range =
                |r: Option<[f64; 2]>, d: InitRange| r.map_or(d, |[lo, hi]| InitRange::new(lo, hi));
            let config = SimConfig {
                dim,
                agent_count,
                design,
                tendency: entry.tendency,
                max_iterations,
                v_max: o.v_max.unwrap_or(base.v_max),
                delta: o.delta.unwrap_or(base.delta),
                alpha: o.alpha.unwrap_or(base.alpha),
                pressure_horizon: o.pressure_horizon.unwrap_or((max_iterations / 2).max(1)),
                coeff_bounds: CoeffBounds {
                    min: o.coeff_min.unwrap_or(base.coeff_bounds.min),
                    max: o.coeff_max.unwrap_or(base.coeff_bounds.max),
                },
                inertia_init: range(o.inertia_init, base.inertia_init),
                self_belief_init: range(o.self_belief_init, base.self_belief_init),
                prestige_bias_init: range(o.prestige_bias_init, base.prestige_bias_init),
                master_seed,
                replicate_count,
                gbest_mode: o.gbest_mode.unwrap_or_default(),
                stochastic_acceleration: o.stochastic_acceleration.unwrap_or(false),
                binarization: o.binarization.unwrap_or_default(),
                freeze_on_goal: o.freeze_on_goal.unwrap_or(false),
            };
            if let Some(issue) = config.issues().into_iter().next() {
                return Err(range_error(
                    format!("{prefix}{}", issue.field),
                    issue.value,
                    issue.bounds,
                ));
            }
            arms.push(Arm { label, config });
        }

        Ok(ExperimentSpec {
            arms,
            output_dir: cli
                .output_dir
                .clone()
                .or_else(|| self.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            trace: cli.trace.or(self.trace).unwrap_or_default(),
            workers,
        })
    }
}

impl ExperimentSpec {
    /// Standard six-arm grid with default parameters.
    pub fn standard(master_seed: u64) -> Self {
        ConfigFile {
            master_seed: Some(master_seed),
            ..ConfigFile::default()
        }
        .resolve(&CliOverrides::default())
        .expect("defaults are valid")
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        ConfigFile::from_json(text)?.resolve(&CliOverrides::default())
    }

    /// A config document that resolves back to this spec.
    pub fn to_config_file(&self) -> ConfigFile {
        let first = &self.arms[0].config;
        ConfigFile {
            master_seed: Some(first.master_seed),
            replicate_count: Some(first.replicate_count),
            dim: Some(first.dim),
            agent_count: Some(first.agent_count),
            max_iterations: Some(first.max_iterations),
            output_dir: Some(self.output_dir.clone()),
            trace: Some(self.trace),
            workers: self.workers,
            arms: Some(
                self.arms
                    .iter()
                    .map(|arm| ArmEntry {
                        label: Some(arm.label.clone()),
                        design: arm.config.design.kind(),
                        tendency: arm.config.tendency,
                        overrides: Overrides::explicit(&arm.config),
                    })
                    .collect(),
            ),
            defaults: Overrides::default(),
        }
    }

    pub fn to_json(&self) -> String {
        self.to_config_file().to_json()
    }

    /// Applies `f` to every arm's configuration.
    pub fn map_configs(mut self, f: impl Fn(&mut SimConfig)) -> Self {
        for arm in &mut self.arms {
            f(&mut arm.config);
        }
        self
    }

    pub fn arm(&self, label: &str) -> Option<&Arm> {
        self.arms.iter().find(|a| a.label == label)
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec, ConfigError> {
    load_config(path)?.resolve(&CliOverrides::default())
}

pub fn load_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ConfigFile::from_json(&text)
}

#[derive(Debug, Clone)]
pub struct ArmOutcome {
    pub label: String,
    pub config: SimConfig,
    /// Sorted by replicate index.
    pub results: Vec<ReplicateResult>,
    pub summary: ArmSummary,
}

impl ArmOutcome {
    pub fn convergence_values(&self) -> Vec<f64> {
        self.results
            .iter()
            .filter_map(|r| r.group_convergence)
            .map(f64::from)
            .collect()
    }

    /// Convergence iterations with "never" counted as the iteration budget.
    pub fn censored_values(&self) -> Vec<f64> {
        let cap = self.config.max_iterations;
        self.results
            .iter()
            .map(|r| f64::from(r.group_convergence.unwrap_or(cap)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub arm_a: String,
    pub arm_b: String,
    /// `None` when either arm has no converged replicate.
    pub test: Option<Comparison>,
    pub censored_median_ratio: f64,
}

pub fn compare_outcomes(a: &ArmOutcome, b: &ArmOutcome) -> PairComparison {
    let test = compare_arms(&a.convergence_values(), &b.convergence_values()).ok();
    let ca = median(&a.censored_values()).expect("arms have replicates");
    let cb = median(&b.censored_values()).expect("arms have replicates");
    PairComparison {
        arm_a: a.label.clone(),
        arm_b: b.label.clone(),
        test,
        censored_median_ratio: ca / cb,
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// Sorted by label.
    pub arms: Vec<ArmOutcome>,
    /// Every pair with `arm_a < arm_b`, in label order.
    pub comparisons: Vec<PairComparison>,
    pub trace: TraceLevel,
}

impl ExperimentOutcome {
    pub fn arm(&self, label: &str) -> Option<&ArmOutcome> {
        self.arms.iter().find(|a| a.label == label)
    }
}

/// Runs every replicate of every arm on a pool of `spec.workers` threads.
/// Output does not depend on the worker count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = spec.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| {
        RunError::Config(ConfigError::Parse(format!("cannot start worker pool: {e}")))
    })?;

    let mut arms: Vec<&Arm> = spec.arms.iter().collect();
    arms.sort_by(|a, b| a.label.cmp(&b.label));
    let jobs: Vec<(usize, u32)> = arms
        .iter()
        .enumerate()
        .flat_map(|(i, arm)| (0..arm.config.replicate_count).map(move |k| (i, k)))
        .collect();
    let level = spec.trace;

    let results: Vec<ReplicateResult> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, k)| {
                run_replicate_traced(&arms[i].config, k, level).map_err(|source| {
                    RunError::Simulation {
                        arm: arms[i].label.clone(),
                        replicate: k,
                        source,
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut results = results.into_iter();
    let mut outcomes = Vec::with_capacity(arms.len());
    for arm in &arms {
        let replicates: Vec<ReplicateResult> = results
            .by_ref()
            .take(arm.config.replicate_count as usize)
            .collect();
        let summary = aggregate_arm(&replicates, &arm.label, arm.config.max_iterations).map_err(
            |source| RunError::Simulation {
                arm: arm.label.clone(),
                replicate: 0,
                source,
            },
        )?;
        outcomes.push(ArmOutcome {
            label: arm.label.clone(),
            config: arm.config.clone(),
            results: replicates,
            summary,
        });
    }

    let mut comparisons = Vec::new();
    for (i, a) in outcomes.iter().enumerate() {
        for b in &outcomes[i + 1..] {
            comparisons.push(compare_outcomes(a, b));
        }
    }

    Ok(ExperimentOutcome {
        arms: outcomes,
        comparisons,
        trace: level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_expands_to_standard_grid() {
        let spec = ExperimentSpec::from_json(r#"{"master_seed": 7}"#).unwrap();
        assert_eq!(spec.arms.len(), 6);
        let c = &spec.arm("siloed_reactive").unwrap().config;
        assert_eq!(c.dim, 25);
        assert_eq!(c.agent_count, 20);
        assert_eq!(c.max_iterations, 1000);
        assert_eq!(c.v_max, 4.0);
        assert_eq!(c.delta, 0.1);
        assert_eq!(c.alpha, 0.1);
        assert_eq!(c.pressure_horizon, 500);
        assert_eq!(c.replicate_count, 200);
        assert_eq!(c.design, OrgDesign::Siloed { silo_count: 5 });
        assert_eq!(
            spec.arm("dynamic_perceptive").unwrap().config.design,
            OrgDesign::Dynamic {
                silo_count: 5,
                reshuffle_interval: 10
            }
        );
        assert_eq!(spec.trace, TraceLevel::None);
    }

    #[test]
    fn missing_seed_is_named() {
        let err = ExperimentSpec::from_json("{}").unwrap_err();
        assert!(matches!(err, ConfigError::MissingField("master_seed")));
        let ok = ConfigFile::from_json("{}")
            .unwrap()
            .resolve(&CliOverrides {
                master_seed: Some(3),
                ..CliOverrides::default()
            })
            .unwrap();
        assert_eq!(ok.arms[0].config.master_seed, 3);
    }

    #[test]
    fn silo_count_out_of_range_is_named() {
        let err = ExperimentSpec::from_json(r#"{"master_seed": 1, "silo_count": 30}"#).unwrap_err();
        match err {
            ConfigError::OutOfRange { field, .. } => assert_eq!(field, "silo_count"),
            other => panic!("unexpected {other:?}"),
        }
        let err = ExperimentSpec::from_json(r#"{"master_seed": 1, "alpha": 1.5}"#).unwrap_err();
        assert!(err.to_string().contains("alpha") && err.to_string().contains("(0, 1]"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentSpec::from_json(r#"{"master_seed": 1, "swarm_size": 3}"#).unwrap_err();
        assert!(
            matches!(err, ConfigError::UnknownKey(ref k) if k == "swarm_size"),
            "{err:?}"
        );
        let err = ExperimentSpec::from_json(
            r#"{"master_seed": 1, "arms": [{"design": "siloed", "tendency": "reactive", "colour": 1}]}"#,
        )
        .unwrap_err();
        assert!(
            matches!(err, ConfigError::UnknownKey(ref k) if k == "arms[0].colour"),
            "{err:?}"
        );
    }

    #[test]
    fn explicit_arms_and_overrides() {
        let spec = ExperimentSpec::from_json(
            r#"{
                "master_seed": 1, "alpha": 0.2, "max_iterations": 400,
                "arms": [
                    {"design": "dynamic", "tendency": "perceptive", "reshuffle_interval": 25, "label": "dyn25"},
                    {"design": "siloed", "tendency": "perceptive", "alpha": 0.05}
                ]
            }"#,
        )
        .unwrap();
        assert_eq!(spec.arms.len(), 2);
        let dyn25 = &spec.arm("dyn25").unwrap().config;
        assert_eq!(dyn25.alpha, 0.2);
        assert_eq!(dyn25.pressure_horizon, 200);
        assert_eq!(
            dyn25.design,
            OrgDesign::Dynamic {
                silo_count: 5,
                reshuffle_interval: 25
            }
        );
        assert_eq!(spec.arm("siloed_perceptive").unwrap().config.alpha, 0.05);
    }

    #[test]
    fn duplicate_and_bad_labels() {
        let dup = r#"{"master_seed": 1, "arms": [
            {"design": "siloed", "tendency": "reactive"},
            {"design": "siloed", "tendency": "reactive"}]}"#;
        assert!(matches!(
            ExperimentSpec::from_json(dup).unwrap_err(),
            ConfigError::DuplicateLabel(_)
        ));
        let bad = r#"{"master_seed": 1, "arms": [{"design": "siloed", "tendency": "reactive", "label": "../x"}]}"#;
        assert!(matches!(
            ExperimentSpec::from_json(bad).unwrap_err(),
            ConfigError::OutOfRange { .. }
        ));
    }

    #[test]
    fn round_trip_through_json() {
        for text in [
            r#"{"master_seed": 11}"#,
            r#"{"master_seed": 5, "dim": 8, "agent_count": 6, "silo_count": 3, "gbest_mode": "instantaneous",
                "stochastic_acceleration": true, "inertia_init": [0.4, 0.9], "trace": "full", "workers": 2}"#,
        ] {
            let spec = ExperimentSpec::from_json(text).unwrap();
            let again = ExperimentSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(spec, again);
        }
    }

    #[test]
    fn cli_overrides_win() {
        let file = ConfigFile::from_json(r#"{"master_seed": 1, "replicate_count": 50}"#).unwrap();
        let spec = file
            .resolve(&CliOverrides {
                master_seed: Some(9),
                replicate_count: Some(3),
                output_dir: Some("elsewhere".into()),
                trace: Some(TraceLevel::Group),
                workers: Some(2),
            })
            .unwrap();
        assert!(spec
            .arms
            .iter()
            .all(|a| a.config.master_seed == 9 && a.config.replicate_count == 3));
        assert_eq!(spec.output_dir, PathBuf::from("elsewhere"));
        assert_eq!(spec.trace, TraceLevel::Group);
        assert_eq!(spec.workers, Some(2));
    }
}
