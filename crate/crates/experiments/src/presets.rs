//! Named runs with fixed configurations and seeds.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use hsp_core::dao::{dao_vector, dao_vector_closed_form};
use hsp_core::group::enumerate_subgroups;
use hsp_core::leakage::{annihilator_mass, expected_uniform_mass, snr_from_mass};
use hsp_core::rng::SplitRng;
use hsp_core::states::TrainingSet;
use hsp_core::{Group, Subgroup};
use serde::Serialize;

use crate::config::{
    CandidateMode, ExperimentConfig, GridSpec, GroupSpec, InferenceSpec, SamplingMode,
    SamplingSpec, SolverSpec, SCHEMA_VERSION,
};
use crate::error::{ExpError, Result};
use crate::report::{run_experiment, write_csv, write_json, Summary};
use crate::sampling::uniform_without_replacement;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Complete data on `Z12` with `H = 2Z12`, plus the `‖β‖` table over all six subgroups.
    Z12Walkthrough,
    /// Three labelled points `{0, 2, 3}` on `Z12`.
    Z12Sparse,
    /// One sample per coset: the Fourier distribution is uniform and the solver collapses.
    StandardFails,
    /// Mean annihilator mass against `N` on `Z64` with `H = ⟨4⟩`.
    LeakCurve,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Z12Walkthrough,
        Preset::Z12Sparse,
        Preset::StandardFails,
        Preset::LeakCurve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Z12Walkthrough => "z12-walkthrough",
            Preset::Z12Sparse => "z12-sparse",
            Preset::StandardFails => "standard-fails",
            Preset::LeakCurve => "leak-curve",
        }
    }

    /// The experiment config behind the preset, if it is a single run.
    pub fn config(self) -> Option<ExperimentConfig> {
        let z12 = |inputs: Vec<usize>, inference: InferenceSpec| ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            seed: 12,
            group: GroupSpec {
                factors: vec![12],
                hidden: vec![vec![2]],
            },
            sampling: SamplingSpec {
                mode: SamplingMode::Explicit,
                n: None,
                inputs: Some(inputs),
                weights: None,
            },
            inference,
            solver: SolverSpec::default(),
        };
        match self {
            Preset::Z12Walkthrough => Some(z12(
                (0..12).collect(),
                InferenceSpec {
                    lambda: Some(0.01),
                    ..Default::default()
                },
            )),
            Preset::Z12Sparse => Some(z12(
                vec![0, 2, 3],
                InferenceSpec {
                    lambda: Some(0.01),
                    candidates: CandidateMode::Consistent,
                    shots: 1000,
                    lambda_grid: Some(GridSpec {
                        lo: 1e-4,
                        hi: 1.0,
                        count: 41,
                    }),
                    ..Default::default()
                },
            )),
            Preset::StandardFails => Some(z12(
                vec![0, 1],
                InferenceSpec {
                    lambda: Some(0.01),
                    ..Default::default()
                },
            )),
            Preset::LeakCurve => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                ExpError::config(
                    "preset",
                    format!("unknown preset `{s}`; expected one of {}", names.join(", ")),
                )
            })
    }
}

/// Files written by a preset and the run summary where there is one.
#[derive(Clone, Debug)]
pub struct PresetOutput {
    pub files: Vec<String>,
    pub summary: Option<Summary>,
}

/// Runs `preset`, writing into `dir`.
pub fn run_preset(preset: Preset, dir: &Path) -> Result<PresetOutput> {
    match preset {
        Preset::LeakCurve => {
            let rows = leak_curve(64, 4, 200, 64)?;
            let mut files = vec![write_csv(&dir.join("leak_curve.csv"), &rows)?];
            files.push(write_json(
                &dir.join("summary.json"),
                &LeakCurveSummary {
                    schema_version: SCHEMA_VERSION,
                    preset: preset.name(),
                    group: "Z64".into(),
                    hidden_generator: 4,
                    seeds_per_point: 200,
                    expected_nondecreasing: rows
                        .windows(2)
                        .all(|w| w[0].expected_p <= w[1].expected_p),
                },
            )?);
            Ok(PresetOutput {
                files,
                summary: None,
            })
        }
        _ => {
            let cfg = preset.config().expect("single-run preset");
            let outcome = run_experiment(&cfg, Some(dir))?;
            let mut files = outcome.summary.files.clone();
            if preset == Preset::Z12Walkthrough {
                let h = cfg.resolve()?.hidden;
                files.push(write_csv(
                    &dir.join("walkthrough_table.csv"),
                    &walkthrough_table(&h)?,
                )?);
            }
            Ok(PresetOutput {
                files,
                summary: Some(outcome.summary),
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct LeakCurveSummary {
    schema_version: u32,
    preset: &'static str,
    group: String,
    hidden_generator: i64,
    seeds_per_point: u64,
    expected_nondecreasing: bool,
}

/// `‖β(H̃)‖` for every subgroup on complete data, by order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkthroughRow {
    pub subgroup: String,
    pub order: usize,
    pub beta_norm_dense: f64,
    pub beta_norm_closed_form: f64,
}

pub fn walkthrough_table(hidden: &Subgroup) -> Result<Vec<WalkthroughRow>> {
    let t = TrainingSet::complete(hidden);
    let mut subs = enumerate_subgroups(hidden.group())?;
    subs.sort_by_key(|s| (s.order(), s.elements().to_vec()));
    subs.iter()
        .map(|s| {
            Ok(WalkthroughRow {
                subgroup: s.describe(),
                order: s.order(),
                beta_norm_dense: dao_vector(&t, s)?.beta_norm,
                beta_norm_closed_form: dao_vector_closed_form(&t, s)?.beta_norm,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeakPoint {
    pub n: usize,
    pub mean_p: f64,
    pub expected_p: f64,
    /// SNR of the mean mass; empty once the mass reaches 1.
    pub snr_of_mean: Option<f64>,
}

/// Mean `p_H` over `seeds` uniform draws without replacement for each
/// `N ≤ max_n`, on `Z_order` with `H = ⟨step⟩`.
pub fn leak_curve(order: usize, step: i64, seeds: u64, max_n: usize) -> Result<Vec<LeakPoint>> {
    let g = Group::cyclic(order);
    let h = Subgroup::generated(&g, &[g.element(&[step])?])?;
    let root = SplitRng::seed_from(0x1eaf);
    (1..=max_n.min(order))
        .map(|n| {
            let mut total = 0.0;
            for s in 0..seeds {
                let mut rng = root.split((n as u64) << 32 | s);
                let t =
                    TrainingSet::labelled_by(&h, &uniform_without_replacement(order, n, &mut rng))?;
                total += annihilator_mass(&t, &h)?;
            }
            let mean_p = total / seeds as f64;
            Ok(LeakPoint {
                n,
                mean_p,
                expected_p: expected_uniform_mass(order, h.order(), n),
                snr_of_mean: Some(snr_from_mass(mean_p)).filter(|s| s.is_finite()),
            })
        })
        .collect()
}
