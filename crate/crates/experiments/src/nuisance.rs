//! Symmetry discovery from a noisy score.
//!
//! A world of `world_size` states carries one biased coin per state. The
//! prior group `Z_world_size` acts by rotation, so querying group element
//! `g` observes state `g`. Each query is scored by the sample mean of `M`
//! flips; scores within `epsilon` of each other (closed transitively) share
//! a label, and the labelled queries are handed to DAO inference. The
//! winner is the inferred stabilizer of the score.

use hsp_core::dao::{default_lambda, infer_subgroup_with, CandidateSet, InferenceOptions};
use hsp_core::rng::SplitRng;
use hsp_core::states::TrainingSet;
use hsp_core::{Error as CoreError, Group};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};
use crate::report::SubgroupView;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuisanceConfig {
    pub world_size: usize,
    /// Heads probability of the coin at each state.
    pub biases: Vec<f64>,
    /// Flips per score.
    pub m: usize,
    /// Scores closer than this are treated as equal.
    pub epsilon: f64,
    pub queries: Vec<usize>,
    pub seed: u64,
    /// Defaults to `1e-2/world_size`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl NuisanceConfig {
    /// Twelve states, fair coins on even states and `p = 0.3` on odd ones,
    /// queried at `{0, 2, 3}`.
    pub fn dodecagon(seed: u64) -> Self {
        NuisanceConfig {
            world_size: 12,
            biases: (0..12)
                .map(|w| if w % 2 == 0 { 0.5 } else { 0.3 })
                .collect(),
            m: 10_000,
            epsilon: 0.05,
            queries: vec![0, 2, 3],
            seed,
            lambda: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.world_size == 0 {
            return Err(ExpError::config("world_size", "must be positive"));
        }
        if self.biases.len() != self.world_size {
            return Err(ExpError::config(
                "biases",
                format!(
                    "expected {} entries, got {}",
                    self.world_size,
                    self.biases.len()
                ),
            ));
        }
        if let Some(p) = self.biases.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(ExpError::config(
                "biases",
                format!("{p} is not a probability"),
            ));
        }
        if self.m == 0 {
            return Err(ExpError::config("m", "must be at least 1"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(ExpError::config("epsilon", "must be positive"));
        }
        if self.queries.is_empty() {
            return Err(ExpError::config("queries", "must not be empty"));
        }
        if let Some(q) = self.queries.iter().find(|&&q| q >= self.world_size) {
            return Err(ExpError::config(
                "queries",
                format!("{q} is outside the world"),
            ));
        }
        let mut seen = self.queries.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(ExpError::config("queries", "must be distinct"));
        }
        if matches!(self.lambda, Some(l) if l.is_nan() || l < 0.0) {
            return Err(ExpError::config("lambda", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NuisanceReport {
    pub queries: Vec<usize>,
    pub scores: Vec<f64>,
    pub labels: Vec<usize>,
    /// Three standard deviations of a score, `3/(2√M)`, reach `epsilon`.
    pub unstable: bool,
    /// `None` when no subgroup is consistent with the labels.
    pub inferred: Option<SubgroupView>,
    pub winner_unique: bool,
    pub lambda: f64,
}

/// Runs the demo once.
pub fn nuisance_demo(cfg: &NuisanceConfig) -> Result<NuisanceReport> {
    cfg.validate()?;
    let group = Group::cyclic(cfg.world_size);
    let mut rng = SplitRng::seed_from(cfg.seed);
    let scores: Vec<f64> = cfg
        .queries
        .iter()
        .map(|&q| {
            let p = cfg.biases[q];
            (0..cfg.m).filter(|_| rng.random_bool(p)).count() as f64 / cfg.m as f64
        })
        .collect();
    let labels = cluster_scores(&scores, cfg.epsilon);
    let lambda = cfg.lambda.unwrap_or_else(|| default_lambda(&group));

    let samples: Vec<(usize, usize)> = cfg
        .queries
        .iter()
        .copied()
        .zip(labels.iter().copied())
        .collect();
    let t = TrainingSet::from_indices(&group, &samples)?;
    let opts = InferenceOptions {
        candidates: CandidateSet::Consistent,
        ..InferenceOptions::new(lambda)
    };
    let (inferred, winner_unique) = match infer_subgroup_with(&t, &opts) {
        Ok(r) => (Some((&r.winner).into()), r.winner_is_unique()),
        Err(CoreError::NoCandidates) => (None, false),
        Err(e) => return Err(e.into()),
    };
    Ok(NuisanceReport {
        queries: cfg.queries.clone(),
        scores,
        labels,
        unstable: 3.0 / (2.0 * (cfg.m as f64).sqrt()) >= cfg.epsilon,
        inferred,
        winner_unique,
        lambda,
    })
}

/// Single-linkage clusters under `|a − b| < epsilon`, labelled in order of
/// first appearance.
pub fn cluster_scores(scores: &[f64], epsilon: f64) -> Vec<usize> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // On the line, single linkage splits exactly at sorted gaps >= epsilon.
    let mut cluster = vec![0usize; n];
    let mut next = 0;
    for w in 0..n {
        if w > 0 && scores[order[w]] - scores[order[w - 1]] >= epsilon {
            next += 1;
        }
        cluster[order[w]] = next;
    }
    let mut relabel = vec![usize::MAX; next + 1];
    let mut fresh = 0;
    cluster
        .into_iter()
        .map(|c| {
            if relabel[c] == usize::MAX {
                relabel[c] = fresh;
                fresh += 1;
            }
            relabel[c]
        })
        .collect()
}
