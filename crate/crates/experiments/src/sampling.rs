//! Training-set generation for the oracle modes.

use std::collections::BTreeMap;

use hsp_core::states::TrainingSet;
use hsp_core::Subgroup;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::Rng;

use crate::config::{ExperimentConfig, SamplingMode};
use crate::error::{ExpError, Result};

/// Draws inputs per the configured mode and labels them by coset of
/// `hidden`.
pub fn sample_training_set<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    hidden: &Subgroup,
    rng: &mut R,
) -> Result<TrainingSet> {
    let s = &cfg.sampling;
    let order = hidden.group().order();
    let t = match s.mode {
        SamplingMode::Explicit => {
            let inputs = s
                .inputs
                .as_ref()
                .ok_or_else(|| ExpError::config("sampling.inputs", "required in explicit mode"))?;
            TrainingSet::labelled_by(hidden, inputs)?
        }
        SamplingMode::UniformWithoutReplacement => {
            let n =
                s.n.ok_or_else(|| ExpError::config("sampling.n", "required"))?;
            if n > order {
                return Err(ExpError::config(
                    "sampling.n",
                    format!("{n} exceeds |G| = {order} without replacement"),
                ));
            }
            TrainingSet::labelled_by(hidden, &uniform_without_replacement(order, n, rng))?
        }
        SamplingMode::Iid => {
            let n =
                s.n.ok_or_else(|| ExpError::config("sampling.n", "required"))?;
            let counts = iid_counts(order, n, s.weights.as_deref(), rng)?;
            TrainingSet::labelled_by_counts(hidden, &counts)?
        }
    };
    Ok(t)
}

/// `n` distinct indices in `0..order`, in draw order.
pub fn uniform_without_replacement<R: Rng + ?Sized>(
    order: usize,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    sample(rng, order, n).into_vec()
}

/// `n` i.i.d. draws collapsed to `(index, count)` pairs in index order.
pub fn iid_counts<R: Rng + ?Sized>(
    order: usize,
    n: usize,
    weights: Option<&[f64]>,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    let mut counts = BTreeMap::new();
    match weights {
        None => {
            for _ in 0..n {
                *counts.entry(rng.random_range(0..order)).or_insert(0) += 1;
            }
        }
        Some(w) => {
            let dist =
                WeightedIndex::new(w).map_err(|e| ExpError::config("sampling.weights", e))?;
            for _ in 0..n {
                *counts.entry(dist.sample(rng)).or_insert(0) += 1;
            }
        }
    }
    Ok(counts.into_iter().collect())
}
