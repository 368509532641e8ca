//! End-to-end runs: sample, attempt the standard solver, measure leakage,
//! rank candidates by DAO cost, and write the summary and tables.

use std::fs;
use std::path::Path;

use hsp_core::dao::{
    annihilator_state, infer_subgroup_with, lambda_sweep, DaoReport, InferenceResult,
};
use hsp_core::leakage::{leakage_report, LeakageReport};
use hsp_core::rng::SplitRng;
use hsp_core::solver::{KernelIntersection, SolverRun};
use hsp_core::states::{partial_coset_mixture, swap_test_estimate, SwapEstimate, TrainingSet};
use hsp_core::{group::enumerate_subgroups, Subgroup};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::Serialize;

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{ExpError, Result};
use crate::sampling::sample_training_set;

/// Stream indices split off the run seed.
const DATA_STREAM: u64 = 0;
const SOLVER_STREAM: u64 = 1;
const SWAP_STREAM: u64 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupView {
    pub description: String,
    pub order: usize,
    pub elements: Vec<usize>,
}

impl From<&Subgroup> for SubgroupView {
    fn from(h: &Subgroup) -> Self {
        SubgroupView {
            description: h.describe(),
            order: h.order(),
            elements: h.elements().to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrainingSummary {
    /// `N`, counted with multiplicity.
    pub size: usize,
    pub distinct_inputs: usize,
    pub labels: usize,
    /// Labels agree with coset membership under the hidden subgroup.
    pub labels_valid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverSummary {
    pub result: SubgroupView,
    pub success: bool,
    pub samples_used: usize,
    pub stabilized: bool,
    /// The run collapsed to the trivial subgroup.
    pub uninformative: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeakageSummary {
    pub p_true: f64,
    pub p_true_simulated: f64,
    /// `None` when `p_true = 1`.
    pub snr: Option<f64>,
    pub coset_size_vector: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DaoSummary {
    pub lambda: f64,
    pub regularizer: hsp_core::dao::Regularizer,
    pub candidate_source: String,
    pub candidates: usize,
    pub winner: SubgroupView,
    pub winner_unique: bool,
    pub winner_is_hidden: bool,
    /// 1-based rank of the hidden subgroup, if it was a candidate.
    pub hidden_rank: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwapSummary {
    pub shots: usize,
    pub winner: SubgroupView,
    pub agrees_with_exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub grid_points: usize,
    /// Smallest and largest grid `λ` at which the hidden subgroup wins uniquely.
    pub hidden_window: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub group: String,
    pub hidden: SubgroupView,
    pub training: TrainingSummary,
    pub solver: Option<SolverSummary>,
    pub leakage: LeakageSummary,
    pub dao: DaoSummary,
    pub swap: Option<SwapSummary>,
    pub sweep: Option<SweepSummary>,
    pub files: Vec<String>,
}

/// Everything computed by [`run_experiment`].
#[derive(Clone, Debug)]
pub struct Outcome {
    pub summary: Summary,
    pub training: TrainingSet,
    pub solver: Option<SolverRun>,
    pub leakage: LeakageReport,
    pub inference: InferenceResult,
    /// SWAP estimate per entry of `inference.reports`.
    pub swap: Option<Vec<SwapEstimate>>,
    pub sweep: Option<hsp_core::dao::LambdaSweep>,
}

#[derive(Serialize)]
struct TrainingRow {
    element: usize,
    residues: String,
    label: usize,
    multiplicity: usize,
}

#[derive(Serialize)]
struct DaoRow {
    rank: usize,
    subgroup: String,
    order: usize,
    annihilator_size: usize,
    beta_norm: f64,
    beta_norm_sqr: f64,
    cost: f64,
    swap_estimate: Option<f64>,
    swap_stderr: Option<f64>,
}

#[derive(Serialize)]
struct LeakageRow {
    subgroup: String,
    order: usize,
    p_exact: f64,
    p_approx: f64,
}

#[derive(Serialize)]
struct SweepRow {
    lambda: f64,
    winner: String,
    unique: bool,
}

/// Runs the full pipeline. Tables and `summary.json` are written to
/// `out_dir` when given.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<Outcome> {
    let resolved = cfg.resolve()?;
    let (group, hidden) = (resolved.group, resolved.hidden);
    let root = SplitRng::seed_from(cfg.seed);

    let t = sample_training_set(cfg, &hidden, &mut root.split(DATA_STREAM))?;
    let labels_valid = t.check_labels(&hidden).is_ok();

    let solver = if cfg.solver.enabled {
        Some(standard_attempt(
            &t,
            &hidden,
            cfg,
            &mut root.split(SOLVER_STREAM),
        )?)
    } else {
        None
    };

    let all = enumerate_subgroups(&group)?;
    let leakage = leakage_report(&t, &hidden, &all)?;
    let opts = cfg.inference_options(&group);
    let inference = infer_subgroup_with(&t, &opts)?;

    let swap = if cfg.inference.shots > 0 {
        let m = partial_coset_mixture(&t);
        let mut rng = root.split(SWAP_STREAM);
        let est = inference
            .reports
            .iter()
            .map(|r| {
                swap_test_estimate(
                    &m,
                    &annihilator_state(&r.candidate),
                    &mut rng,
                    cfg.inference.shots,
                )
            })
            .collect::<hsp_core::Result<Vec<_>>>()?;
        Some(est)
    } else {
        None
    };

    let sweep = match &cfg.inference.lambda_grid {
        Some(g) => Some(lambda_sweep(&t, &g.values(), &opts)?),
        None => None,
    };

    let swap_summary = swap.as_ref().map(|est| {
        let w = swap_winner(&inference.reports, est, inference.lambda, opts.regularizer);
        SwapSummary {
            shots: cfg.inference.shots,
            winner: (&inference.reports[w].candidate).into(),
            agrees_with_exact: inference.reports[w].candidate == inference.winner,
        }
    });

    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        group: group.to_string(),
        hidden: (&hidden).into(),
        training: TrainingSummary {
            size: t.total_count(),
            distinct_inputs: t.len(),
            labels: t.label_groups().len(),
            labels_valid,
        },
        solver: solver.as_ref().map(|run| SolverSummary {
            result: (&run.result).into(),
            success: run.success == Some(true),
            samples_used: run.samples.len(),
            stabilized: run.stabilized,
            uninformative: run.result.order() == 1,
        }),
        leakage: LeakageSummary {
            p_true: leakage.p_true,
            p_true_simulated: leakage.p_true_simulated,
            snr: leakage.snr.is_finite().then_some(leakage.snr),
            coset_size_vector: leakage.coset_size_vector.clone(),
        },
        dao: DaoSummary {
            lambda: inference.lambda,
            regularizer: inference.regularizer,
            candidate_source: inference.candidate_source.clone(),
            candidates: inference.reports.len(),
            winner: (&inference.winner).into(),
            winner_unique: inference.winner_is_unique(),
            winner_is_hidden: inference.winner == hidden,
            hidden_rank: inference.rank_of(&hidden),
        },
        swap: swap_summary,
        sweep: sweep.as_ref().map(|s| SweepSummary {
            grid_points: s.points.len(),
            hidden_window: s.window(&hidden),
        }),
        files: Vec::new(),
    };

    let mut outcome = Outcome {
        summary,
        training: t,
        solver,
        leakage,
        inference,
        swap,
        sweep,
    };
    if let Some(dir) = out_dir {
        outcome.summary.files = write_tables(dir, &outcome)?;
        write_json(&dir.join("summary.json"), &outcome.summary)?;
    }
    Ok(outcome)
}

/// Fourier sampling from the finite-data mixture fed to kernel intersection.
fn standard_attempt(
    t: &TrainingSet,
    hidden: &Subgroup,
    cfg: &ExperimentConfig,
    rng: &mut SplitRng,
) -> Result<SolverRun> {
    let dist: Vec<f64> = partial_coset_mixture(t)
        .fourier_distribution()
        .into_iter()
        .map(|p| if p < 1e-12 { 0.0 } else { p })
        .collect();
    let w = WeightedIndex::new(&dist)
        .map_err(|e| hsp_core::Error::InvalidDistribution(e.to_string()))?;
    let mut engine = KernelIntersection::new(t.group());
    Ok(engine.solve(
        || w.sample(rng),
        cfg.solver.c,
        cfg.solver.max_steps,
        Some(hidden),
    )?)
}

/// Winner when `‖β‖` is replaced by `√max(F̂, 0)`; ties go to the earlier
/// exact rank.
fn swap_winner(
    reports: &[DaoReport],
    est: &[SwapEstimate],
    lambda: f64,
    regularizer: hsp_core::dao::Regularizer,
) -> usize {
    let cost = |i: usize| {
        -est[i].estimate.max(0.0).sqrt() + lambda * regularizer.size(&reports[i].candidate) as f64
    };
    (1..reports.len()).fold(0, |best, i| if cost(i) < cost(best) { i } else { best })
}

fn write_tables(dir: &Path, o: &Outcome) -> Result<Vec<String>> {
    let (t, leakage, inference, swap, sweep) =
        (&o.training, &o.leakage, &o.inference, &o.swap, &o.sweep);
    fs::create_dir_all(dir).map_err(|e| ExpError::io(dir, e))?;
    let mut files = Vec::new();

    let g = t.group();
    let rows: Vec<TrainingRow> = t
        .samples()
        .iter()
        .map(|s| TrainingRow {
            element: s.element,
            residues: g.element_at(s.element).expect("valid").to_string(),
            label: s.label,
            multiplicity: s.multiplicity,
        })
        .collect();
    files.push(write_csv(&dir.join("training_set.csv"), &rows)?);

    let rows: Vec<DaoRow> = inference
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| DaoRow {
            rank: i + 1,
            subgroup: r.description(),
            order: r.candidate.order(),
            annihilator_size: r.annihilator_size,
            beta_norm: r.beta_norm,
            beta_norm_sqr: r.beta_norm_sqr(),
            cost: r.cost,
            swap_estimate: swap.as_ref().map(|s| s[i].estimate),
            swap_stderr: swap.as_ref().map(|s| s[i].stderr),
        })
        .collect();
    files.push(write_csv(&dir.join("dao.csv"), &rows)?);

    let rows: Vec<LeakageRow> = leakage
        .false_signals
        .iter()
        .map(|f| LeakageRow {
            subgroup: f.description.clone(),
            order: f.candidate.order(),
            p_exact: f.p_exact,
            p_approx: f.p_approx,
        })
        .collect();
    files.push(write_csv(&dir.join("leakage.csv"), &rows)?);

    if let Some(s) = sweep {
        let rows: Vec<SweepRow> = s
            .points
            .iter()
            .map(|p| SweepRow {
                lambda: p.lambda,
                winner: p.winner_description.clone(),
                unique: p.unique,
            })
            .collect();
        files.push(write_csv(&dir.join("sweep.csv"), &rows)?);
    }
    files.push("summary.json".into());
    Ok(files)
}

/// Writes `rows` with a header line and returns the file name.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<String> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| ExpError::io(parent, e))?;
    }
    let csv_err = |source| ExpError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| ExpError::io(path, e))?;
    Ok(file_name(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<String> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| ExpError::io(parent, e))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| ExpError::io(path, e))?;
    Ok(file_name(path))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
