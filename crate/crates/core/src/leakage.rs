//! How much Fourier-sampling mass stays on `H^⊥` when only a finite
//! training set is available.
//!
//! With `W_r = Σ_{x∈X∩(r+H)} √n_x` over the cosets of `H` (so `W_r = |X_r|`
//! without repeats), the mass on the annihilator is `‖W‖²/(N|H|)`.

use serde::Serialize;

use crate::error::Result;
use crate::group::Subgroup;
use crate::states::{partial_coset_mixture, TrainingSet};

/// `W_r` for every coset of `H` that contains an observed input, in coset
/// order.
pub fn coset_size_vector(t: &TrainingSet, h: &Subgroup) -> Result<Vec<f64>> {
    t.group().ensure_same(h.group())?;
    let table = h.coset_table();
    let mut w = vec![0.0; table.len()];
    for s in t.samples() {
        w[table.coset_of(s.element)] += (s.multiplicity as f64).sqrt();
    }
    Ok(w.into_iter().filter(|&x| x > 0.0).collect())
}

fn norm_sqr(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum()
}

/// `p_H = ‖W‖²/(N|H|)`. Equals the simulated Fourier mass on `H^⊥` whenever
/// the labels are consistent with `H`.
pub fn annihilator_mass(t: &TrainingSet, h: &Subgroup) -> Result<f64> {
    let w = coset_size_vector(t, h)?;
    Ok(norm_sqr(&w) / (t.total_count() * h.order()) as f64)
}

/// Fourier sampling mass of `ρ_T` on `H^⊥`, from the dense simulation.
pub fn annihilator_mass_simulated(t: &TrainingSet, h: &Subgroup) -> Result<f64> {
    t.group().ensure_same(h.group())?;
    let dist = partial_coset_mixture(t).fourier_distribution();
    Ok(h.annihilator().elements().iter().map(|&y| dist[y]).sum())
}

/// `p/(1 − p)`, or `+∞` once `p` is within `1e-12` of 1.
pub fn snr_from_mass(p: f64) -> f64 {
    if 1.0 - p <= 1e-12 {
        f64::INFINITY
    } else {
        p / (1.0 - p)
    }
}

pub fn snr(t: &TrainingSet, h: &Subgroup) -> Result<f64> {
    Ok(snr_from_mass(annihilator_mass(t, h)?))
}

/// Mass on a candidate's annihilator: exact simulation and the
/// random-phase approximation `1/|H̃| − 1/|H̃∩| + ‖W‖²/(N|H̃∩|)` with
/// `H̃∩ = (H̃^⊥ ∩ H^⊥)^⊥`.
pub fn false_signal_mass(
    t: &TrainingSet,
    candidate: &Subgroup,
    hidden: &Subgroup,
) -> Result<(f64, f64)> {
    let exact = annihilator_mass_simulated(t, candidate)?;
    Ok((exact, false_signal_approx(t, candidate, hidden)?))
}

pub fn false_signal_approx(
    t: &TrainingSet,
    candidate: &Subgroup,
    hidden: &Subgroup,
) -> Result<f64> {
    candidate.group().ensure_same(hidden.group())?;
    let cap = candidate
        .annihilator()
        .intersection(&hidden.annihilator())?
        .annihilator();
    let w = coset_size_vector(t, hidden)?;
    let n = t.total_count() as f64;
    Ok(1.0 / candidate.order() as f64 - 1.0 / cap.order() as f64
        + norm_sqr(&w) / (n * cap.order() as f64))
}

/// Expected `p_H` when `N` distinct inputs are drawn uniformly without
/// replacement: `(1 + (N−1)(|H|−1)/(|G|−1)) / |H|`.
pub fn expected_uniform_mass(group_order: usize, subgroup_order: usize, n: usize) -> f64 {
    if group_order <= 1 {
        return 1.0;
    }
    let pair_same = (subgroup_order as f64 - 1.0) / (group_order as f64 - 1.0);
    (1.0 + (n as f64 - 1.0) * pair_same) / subgroup_order as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct FalseSignal {
    pub candidate: Subgroup,
    pub description: String,
    pub p_exact: f64,
    pub p_approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeakageReport {
    pub training_size: usize,
    pub coset_size_vector: Vec<f64>,
    pub p_true: f64,
    pub p_true_simulated: f64,
    pub snr: f64,
    pub false_signals: Vec<FalseSignal>,
}

pub fn leakage_report(
    t: &TrainingSet,
    hidden: &Subgroup,
    candidates: &[Subgroup],
) -> Result<LeakageReport> {
    let p_true = annihilator_mass(t, hidden)?;
    let mut false_signals = Vec::with_capacity(candidates.len());
    for c in candidates {
        let (p_exact, p_approx) = false_signal_mass(t, c, hidden)?;
        false_signals.push(FalseSignal {
            candidate: c.clone(),
            description: c.describe(),
            p_exact,
            p_approx,
        });
    }
    Ok(LeakageReport {
        training_size: t.total_count(),
        coset_size_vector: coset_size_vector(t, hidden)?,
        p_true,
        p_true_simulated: annihilator_mass_simulated(t, hidden)?,
        snr: snr_from_mass(p_true),
        false_signals,
    })
}
