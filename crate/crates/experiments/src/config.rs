//! TOML experiment configuration.
//!
//! ```toml
//! schema_version = 1
//! seed = 7
//!
//! [group]
//! factors = [12]
//! hidden = [[2]]            # generators as residue tuples
//!
//! [sampling]
//! mode = "uniform-without-replacement"   # or "iid", "explicit"
//! n = 3
//! # inputs = [0, 2, 3]      # flat indices, explicit mode only
//! # weights = [...]         # iid mode, one weight per element; uniform if absent
//!
//! [inference]
//! lambda = 0.01             # default 1e-2/|G|
//! regularizer = "subgroup-order"
//! candidates = "all"        # or "consistent"
//! shots = 0                 # SWAP-test shots per candidate; 0 disables
//! lambda_grid = { lo = 1e-6, hi = 1.0, count = 61 }
//!
//! [solver]
//! enabled = true
//! c = 8
//! max_steps = 1000
//! ```

use std::path::{Path, PathBuf};

use hsp_core::dao::{
    default_lambda, log_grid, CandidateSet, Evaluator, InferenceOptions, Regularizer,
};
use hsp_core::{Group, Subgroup};
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub group: GroupSpec,
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub inference: InferenceSpec,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub factors: Vec<i64>,
    /// Generators of the hidden subgroup; empty means the trivial subgroup.
    #[serde(default)]
    pub hidden: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// `N` distinct inputs drawn uniformly without replacement.
    UniformWithoutReplacement,
    /// `N` i.i.d. draws; repeats become multiplicities.
    Iid,
    /// The listed inputs.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub mode: SamplingMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateMode {
    #[default]
    All,
    Consistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        log_grid(self.lo, self.hi, self.count)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferenceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub regularizer: Regularizer,
    #[serde(default)]
    pub evaluator: Evaluator,
    #[serde(default)]
    pub candidates: CandidateMode,
    #[serde(default)]
    pub shots: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<GridSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "default_c")]
    pub c: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn yes() -> bool {
    true
}

fn default_c() -> usize {
    8
}

fn default_max_steps() -> usize {
    1000
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            enabled: true,
            c: default_c(),
            max_steps: default_max_steps(),
        }
    }
}

/// Group and hidden subgroup built from a validated config.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub group: Group,
    pub hidden: Subgroup,
}

/// Pulls the first backquoted name out of a deserializer message, which is
/// where `toml` reports the offending key.
fn field_from_message(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("<document>").to_string()
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| {
            let msg = e.message().to_string();
            ExpError::config(field_from_message(&msg), e.to_string().trim_end())
        })?;
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExpError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Checks every field and builds the group and hidden subgroup.
    pub fn resolve(&self) -> Result<Resolved> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ExpError::config(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        let group =
            Group::new(&self.group.factors).map_err(|e| ExpError::config("group.factors", e))?;
        let mut gens = Vec::with_capacity(self.group.hidden.len());
        for (i, r) in self.group.hidden.iter().enumerate() {
            gens.push(
                group
                    .element(r)
                    .map_err(|e| ExpError::config(format!("group.hidden[{i}]"), e))?,
            );
        }
        let hidden =
            Subgroup::generated(&group, &gens).map_err(|e| ExpError::config("group.hidden", e))?;
        self.check_sampling(&group)?;
        self.check_inference()?;
        if self.solver.c == 0 {
            return Err(ExpError::config("solver.c", "must be at least 1"));
        }
        if self.solver.max_steps == 0 {
            return Err(ExpError::config("solver.max_steps", "must be at least 1"));
        }
        Ok(Resolved { group, hidden })
    }

    fn check_sampling(&self, group: &Group) -> Result<()> {
        let s = &self.sampling;
        let order = group.order();
        match s.mode {
            SamplingMode::Explicit => {
                let inputs = s.inputs.as_ref().ok_or_else(|| {
                    ExpError::config("sampling.inputs", "required in explicit mode")
                })?;
                if inputs.is_empty() {
                    return Err(ExpError::config("sampling.inputs", "must not be empty"));
                }
                if let Some(&bad) = inputs.iter().find(|&&x| x >= order) {
                    return Err(ExpError::config(
                        "sampling.inputs",
                        format!("index {bad} out of range for a group of order {order}"),
                    ));
                }
                let mut sorted = inputs.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(ExpError::config(
                        "sampling.inputs",
                        "inputs must be distinct",
                    ));
                }
            }
            SamplingMode::UniformWithoutReplacement | SamplingMode::Iid => {
                let n = s.n.ok_or_else(|| {
                    ExpError::config("sampling.n", "required for random sampling")
                })?;
                if n == 0 {
                    return Err(ExpError::config("sampling.n", "must be at least 1"));
                }
                if s.mode == SamplingMode::UniformWithoutReplacement && n > order {
                    return Err(ExpError::config(
                        "sampling.n",
                        format!("{n} exceeds |G| = {order} without replacement"),
                    ));
                }
            }
        }
        if let Some(w) = &s.weights {
            if s.mode != SamplingMode::Iid {
                return Err(ExpError::config(
                    "sampling.weights",
                    "only used in iid mode",
                ));
            }
            if w.len() != order {
                return Err(ExpError::config(
                    "sampling.weights",
                    format!("expected {order} weights, got {}", w.len()),
                ));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(ExpError::config(
                    "sampling.weights",
                    "weights must be finite and non-negative",
                ));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ExpError::config(
                    "sampling.weights",
                    format!("must sum to 1, got {sum}"),
                ));
            }
        }
        Ok(())
    }

    fn check_inference(&self) -> Result<()> {
        let inf = &self.inference;
        if let Some(l) = inf.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return Err(ExpError::config(
                    "inference.lambda",
                    format!("must be finite and >= 0, got {l}"),
                ));
            }
        }
        if let Some(g) = &inf.lambda_grid {
            if !(g.lo > 0.0 && g.hi >= g.lo && g.hi.is_finite() && g.count >= 1) {
                return Err(ExpError::config(
                    "inference.lambda_grid",
                    "need 0 < lo <= hi and count >= 1",
                ));
            }
        }
        Ok(())
    }

    /// Inference settings for `group`.
    pub fn inference_options(&self, group: &Group) -> InferenceOptions {
        let inf = &self.inference;
        InferenceOptions {
            lambda: inf.lambda.unwrap_or_else(|| default_lambda(group)),
            regularizer: inf.regularizer,
            evaluator: inf.evaluator,
            candidates: match inf.candidates {
                CandidateMode::All => CandidateSet::All,
                CandidateMode::Consistent => CandidateSet::Consistent,
            },
        }
    }
}

/// Output directory: explicit flag, then `HSPLEARN_OUT_DIR`, then `hsp-out`.
pub fn output_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os("HSPLEARN_OUT_DIR") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from("hsp-out"),
    }
}
