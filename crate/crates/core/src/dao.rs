//! Data-annihilator overlap (DAO) inference.
//!
//! For a candidate subgroup `H̃` the DAO vector has one entry per observed
//! label, `β_r = √(|X_r|/N) ⟨X_r|H̃^⊥⟩`, where `|H̃^⊥⟩` is the uniform
//! superposition of Fourier kets over the annihilator. That state equals the
//! uniform computational superposition over `H̃`, so
//! `β_r = |X_r ∩ H̃| / √(N|H̃|)` and the DAO is a coset-counting statistic.
//! Candidates are ranked by `−‖β‖₂ + λ·size`.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::group::{enumerate_subgroups, Group, Subgroup};
use crate::states::{partial_coset_mixture, LabelGroup, StateVector, TrainingSet};

const COST_TIE_TOL: f64 = 1e-12;

/// Which subgroup size the regularizer penalizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regularizer {
    /// `λ·|H̃|`. Favours the smallest subgroup that explains the data.
    #[default]
    SubgroupOrder,
    /// `λ·|H̃^⊥|`. Favours large candidates; on complete data `G` always
    /// wins under this choice.
    AnnihilatorOrder,
}

impl Regularizer {
    pub fn size(self, candidate: &Subgroup) -> usize {
        match self {
            Regularizer::SubgroupOrder => candidate.order(),
            Regularizer::AnnihilatorOrder => candidate.index(),
        }
    }
}

/// How the DAO vector is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluator {
    /// Inner products of dense partial-coset states with the annihilator state.
    Dense,
    /// Coset counting, `|X_r ∩ H̃| / √(N|H̃|)`.
    #[default]
    ClosedForm,
}

/// DAO vector and cost for one candidate.
#[derive(Clone, Debug, Serialize)]
pub struct DaoReport {
    /// Serialized as `{description, elements}`.
    #[serde(serialize_with = "serialize_candidate")]
    pub candidate: Subgroup,
    /// Label of each `β` entry, in first-appearance order.
    pub labels: Vec<usize>,
    #[serde(serialize_with = "serialize_complex")]
    pub beta: Vec<Complex64>,
    pub beta_norm: f64,
    pub annihilator_size: usize,
    pub penalty_size: usize,
    pub lambda: f64,
    pub cost: f64,
}

fn serialize_candidate<S: serde::Serializer>(
    h: &Subgroup,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct View<'a> {
        description: String,
        elements: &'a [usize],
    }
    View {
        description: h.describe(),
        elements: h.elements(),
    }
    .serialize(s)
}

fn serialize_complex<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<(f64, f64)> = v.iter().map(|c| (c.re, c.im)).collect();
    pairs.serialize(s)
}

impl DaoReport {
    fn new(candidate: &Subgroup, labels: Vec<usize>, beta: Vec<Complex64>) -> Self {
        let beta_norm = beta.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        DaoReport {
            candidate: candidate.clone(),
            labels,
            beta,
            beta_norm,
            annihilator_size: candidate.index(),
            penalty_size: candidate.order(),
            lambda: 0.0,
            cost: -beta_norm,
        }
    }

    pub fn description(&self) -> String {
        self.candidate.describe()
    }

    /// Re-prices the report for a new `λ` and regularizer.
    pub fn with_cost(mut self, lambda: f64, regularizer: Regularizer) -> Self {
        self.lambda = lambda;
        self.penalty_size = regularizer.size(&self.candidate);
        self.cost = -self.beta_norm + lambda * self.penalty_size as f64;
        self
    }

    pub fn beta_norm_sqr(&self) -> f64 {
        self.beta_norm * self.beta_norm
    }
}

/// `|H̃^⊥⟩ = |H̃^⊥|^{-1/2} Σ_{y∈H̃^⊥} |ŷ⟩`, built in the Fourier basis and
/// mapped to computational amplitudes by the forward QFT.
pub fn annihilator_state(candidate: &Subgroup) -> StateVector {
    let ann = candidate.annihilator();
    let labels = StateVector::uniform(candidate.group(), ann.elements()).expect("non-empty");
    fourier::qft(&labels)
}

fn check_group(t: &TrainingSet, candidate: &Subgroup) -> Result<()> {
    t.group().ensure_same(candidate.group())
}

/// DAO vector from dense inner products `√p_r ⟨X_r|H̃^⊥⟩`.
pub fn dao_vector(t: &TrainingSet, candidate: &Subgroup) -> Result<DaoReport> {
    check_group(t, candidate)?;
    let phi = annihilator_state(candidate);
    let mixture = partial_coset_mixture(t);
    let mut labels = Vec::new();
    let mut beta = Vec::new();
    for c in mixture.components() {
        labels.push(c.label);
        beta.push(c.weight.sqrt() * c.state.inner(&phi)?);
    }
    Ok(DaoReport::new(candidate, labels, beta))
}

/// DAO vector by counting: `β_r = Σ_{x∈X_r∩H̃} √n_x / √(N|H̃|)`.
pub fn dao_vector_closed_form(t: &TrainingSet, candidate: &Subgroup) -> Result<DaoReport> {
    check_group(t, candidate)?;
    let member = candidate.membership();
    Ok(closed_form_from_groups(
        &t.label_groups(),
        t.total_count(),
        candidate,
        &member,
    ))
}

fn closed_form_from_groups(
    groups: &[LabelGroup],
    total: usize,
    candidate: &Subgroup,
    member: &[bool],
) -> DaoReport {
    let scale = 1.0 / ((total * candidate.order()) as f64).sqrt();
    let mut labels = Vec::with_capacity(groups.len());
    let mut beta = Vec::with_capacity(groups.len());
    for grp in groups {
        let w: f64 = grp
            .members
            .iter()
            .filter(|(x, _)| member[*x])
            .map(|(_, n)| (*n as f64).sqrt())
            .sum();
        labels.push(grp.label);
        beta.push(Complex64::new(w * scale, 0.0));
    }
    DaoReport::new(candidate, labels, beta)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "lambda",
            reason: format!("must be finite and non-negative, got {lambda}"),
        })
    }
}

/// DAO report priced with the default regularizer.
pub fn dao_cost(t: &TrainingSet, candidate: &Subgroup, lambda: f64) -> Result<DaoReport> {
    dao_cost_with(
        t,
        candidate,
        lambda,
        Regularizer::default(),
        Evaluator::default(),
    )
}

pub fn dao_cost_with(
    t: &TrainingSet,
    candidate: &Subgroup,
    lambda: f64,
    regularizer: Regularizer,
    evaluator: Evaluator,
) -> Result<DaoReport> {
    check_lambda(lambda)?;
    let report = match evaluator {
        Evaluator::Dense => dao_vector(t, candidate)?,
        Evaluator::ClosedForm => dao_vector_closed_form(t, candidate)?,
    };
    Ok(report.with_cost(lambda, regularizer))
}

/// `‖β(H̃)‖²` on complete data for hidden subgroup `H` and transversal `R`:
/// `|A|²·|R ∩ A^⊥| / (|R|²·|H̃^⊥|)` with `A = H̃^⊥ ∩ H^⊥`.
pub fn complete_data_dao(
    hidden: &Subgroup,
    candidate: &Subgroup,
    representatives: &[usize],
) -> Result<f64> {
    hidden.group().ensure_same(candidate.group())?;
    check_transversal(hidden, representatives)?;
    let a = candidate
        .annihilator()
        .intersection(&hidden.annihilator())?;
    let a_perp = a.annihilator();
    let hits = representatives
        .iter()
        .filter(|&&r| a_perp.contains(r))
        .count();
    let a2 = (a.order() * a.order()) as f64;
    let r2 = (representatives.len() * representatives.len()) as f64;
    Ok(a2 * hits as f64 / (r2 * candidate.index() as f64))
}

fn check_transversal(h: &Subgroup, reps: &[usize]) -> Result<()> {
    let g = h.group();
    if reps.len() != h.index() {
        return Err(Error::InvalidTransversal(format!(
            "expected {} representatives, got {}",
            h.index(),
            reps.len()
        )));
    }
    let table = h.coset_table();
    let mut hit = vec![false; h.index()];
    for &r in reps {
        g.check_index(r)
            .map_err(|e| Error::InvalidTransversal(e.to_string()))?;
        let c = table.coset_of(r);
        if hit[c] {
            return Err(Error::InvalidTransversal(format!(
                "{} shares a coset with another representative",
                g.element_at(r).expect("checked")
            )));
        }
        hit[c] = true;
    }
    Ok(())
}

/// Exact split of `‖β‖²` into the constructive term and corrections.
///
/// With `A = H̃^⊥ ∩ H^⊥`, `H̃∩ = A^⊥` and `W_r = Σ_{x∈X_r} √n_x`, each label
/// contributes `|C_r + Z_r|² / (N|G||H̃^⊥|)` where `C_r = W_r |A| 𝟙[X_r ⊆ H̃∩]`
/// and `Z_r` is the character sum over `H̃^⊥ \ A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasTerms {
    pub alpha1: f64,
    /// Cross term `2 C_r Re Z_r`.
    pub alpha2: f64,
    /// Fluctuation term `|Z_r|²`.
    pub alpha3: f64,
    /// `‖β‖² − α₁ = α₂ + α₃`.
    pub residual: f64,
    pub beta_norm_sqr: f64,
}

pub fn bias_terms(t: &TrainingSet, candidate: &Subgroup, hidden: &Subgroup) -> Result<BiasTerms> {
    check_group(t, candidate)?;
    check_group(t, hidden)?;
    let g = t.group();
    let a = candidate
        .annihilator()
        .intersection(&hidden.annihilator())?;
    let cap = a.annihilator().membership();
    let in_candidate = candidate.membership();
    let ann_size = candidate.index() as f64;
    let a_size = a.order() as f64;
    let norm = (t.total_count() * g.order()) as f64 * ann_size;

    let (mut alpha1, mut alpha2, mut alpha3) = (0.0, 0.0, 0.0);
    for grp in t.label_groups() {
        let first = grp.members[0].0;
        let w: f64 = grp.members.iter().map(|(_, n)| (*n as f64).sqrt()).sum();
        let c = if cap[first] { w * a_size } else { 0.0 };
        // Σ_{z∈H̃^⊥\A} χ_z(x) = |H̃^⊥|·𝟙[x∈H̃] − |A|·𝟙[x∈H̃∩], which is real.
        let z: f64 = grp
            .members
            .iter()
            .map(|&(x, n)| {
                let s = if in_candidate[x] { ann_size } else { 0.0 }
                    - if cap[x] { a_size } else { 0.0 };
                (n as f64).sqrt() * s
            })
            .sum();
        alpha1 += c * c / norm;
        alpha2 += 2.0 * c * z / norm;
        alpha3 += z * z / norm;
    }
    let beta_norm_sqr = dao_vector_closed_form(t, candidate)?.beta_norm_sqr();
    Ok(BiasTerms {
        alpha1,
        alpha2,
        alpha3,
        residual: beta_norm_sqr - alpha1,
        beta_norm_sqr,
    })
}

/// Where inference candidates come from.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum CandidateSet {
    /// Every subgroup of `G`.
    #[default]
    All,
    /// Subgroups whose coset structure agrees with the observed labels.
    Consistent,
    Explicit(Vec<Subgroup>),
}

impl CandidateSet {
    pub fn describe(&self) -> String {
        match self {
            CandidateSet::All => "all-subgroups".into(),
            CandidateSet::Consistent => "label-consistent-subgroups".into(),
            CandidateSet::Explicit(v) => format!("explicit({})", v.len()),
        }
    }

    pub fn resolve(&self, t: &TrainingSet) -> Result<Vec<Subgroup>> {
        let out = match self {
            CandidateSet::All => enumerate_subgroups(t.group())?,
            CandidateSet::Consistent => enumerate_subgroups(t.group())?
                .into_iter()
                .filter(|h| t.check_labels(h).is_ok())
                .collect(),
            CandidateSet::Explicit(v) => {
                for h in v {
                    check_group(t, h)?;
                }
                v.clone()
            }
        };
        if out.is_empty() {
            return Err(Error::NoCandidates);
        }
        Ok(out)
    }
}

/// Settings for [`infer_subgroup_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct InferenceOptions {
    pub lambda: f64,
    pub regularizer: Regularizer,
    pub evaluator: Evaluator,
    pub candidates: CandidateSet,
}

impl InferenceOptions {
    pub fn new(lambda: f64) -> Self {
        InferenceOptions {
            lambda,
            regularizer: Regularizer::default(),
            evaluator: Evaluator::default(),
            candidates: CandidateSet::default(),
        }
    }

    /// `λ = 10⁻²/|G|`.
    pub fn for_group(group: &Group) -> Self {
        Self::new(default_lambda(group))
    }
}

pub fn default_lambda(group: &Group) -> f64 {
    1e-2 / group.order() as f64
}

/// Candidates ranked by ascending cost.
#[derive(Clone, Debug, Serialize)]
pub struct InferenceResult {
    pub reports: Vec<DaoReport>,
    pub winner: Subgroup,
    pub lambda: f64,
    pub regularizer: Regularizer,
    pub candidate_source: String,
}

impl InferenceResult {
    /// 1-based rank of `h` among the candidates.
    pub fn rank_of(&self, h: &Subgroup) -> Option<usize> {
        self.reports
            .iter()
            .position(|r| r.candidate == *h)
            .map(|p| p + 1)
    }

    /// True when the runner-up's cost differs from the winner's.
    pub fn winner_is_unique(&self) -> bool {
        match self.reports.get(1) {
            None => true,
            Some(second) => {
                cost_order(&self.reports[0], second) == Ordering::Less
                    && !costs_tie(self.reports[0].cost, second.cost)
            }
        }
    }
}

fn costs_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= COST_TIE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn cost_order(a: &DaoReport, b: &DaoReport) -> Ordering {
    if !costs_tie(a.cost, b.cost) {
        return a.cost.total_cmp(&b.cost);
    }
    a.annihilator_size
        .cmp(&b.annihilator_size)
        .then_with(|| a.candidate.cmp(&b.candidate))
}

/// Ranks candidates (all subgroups unless given) by DAO cost at `λ` with
/// the default regularizer and evaluator.
pub fn infer_subgroup(
    t: &TrainingSet,
    lambda: f64,
    candidates: Option<&[Subgroup]>,
) -> Result<InferenceResult> {
    let mut opts = InferenceOptions::new(lambda);
    if let Some(c) = candidates {
        opts.candidates = CandidateSet::Explicit(c.to_vec());
    }
    infer_subgroup_with(t, &opts)
}

pub fn infer_subgroup_with(t: &TrainingSet, opts: &InferenceOptions) -> Result<InferenceResult> {
    check_lambda(opts.lambda)?;
    let candidates = opts.candidates.resolve(t)?;
    let reports = evaluate_all(t, &candidates, opts.evaluator)?;
    Ok(rank(
        reports,
        opts.lambda,
        opts.regularizer,
        opts.candidates.describe(),
    ))
}

fn evaluate_all(
    t: &TrainingSet,
    candidates: &[Subgroup],
    evaluator: Evaluator,
) -> Result<Vec<DaoReport>> {
    match evaluator {
        Evaluator::Dense => candidates.iter().map(|h| dao_vector(t, h)).collect(),
        Evaluator::ClosedForm => {
            let groups = t.label_groups();
            let total = t.total_count();
            candidates
                .iter()
                .map(|h| {
                    check_group(t, h)?;
                    Ok(closed_form_from_groups(&groups, total, h, &h.membership()))
                })
                .collect()
        }
    }
}

fn rank(
    reports: Vec<DaoReport>,
    lambda: f64,
    regularizer: Regularizer,
    source: String,
) -> InferenceResult {
    let mut reports: Vec<DaoReport> = reports
        .into_iter()
        .map(|r| r.with_cost(lambda, regularizer))
        .collect();
    reports.sort_by(cost_order);
    InferenceResult {
        winner: reports[0].candidate.clone(),
        reports,
        lambda,
        regularizer,
        candidate_source: source,
    }
}

/// Winner at one grid point of a λ sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub winner: Subgroup,
    pub winner_description: String,
    pub unique: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaSweep {
    pub points: Vec<SweepPoint>,
}

impl LambdaSweep {
    /// Smallest and largest grid λ at which `h` is the unique winner.
    pub fn window(&self, h: &Subgroup) -> Option<(f64, f64)> {
        let hits: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.unique && p.winner == *h)
            .map(|p| p.lambda)
            .collect();
        Some((*hits.first()?, *hits.last()?))
    }
}

/// Evaluates every candidate once and re-ranks at each `λ` of `grid`.
pub fn lambda_sweep(t: &TrainingSet, grid: &[f64], opts: &InferenceOptions) -> Result<LambdaSweep> {
    for &l in grid {
        check_lambda(l)?;
    }
    let candidates = opts.candidates.resolve(t)?;
    let base = evaluate_all(t, &candidates, opts.evaluator)?;
    let points = grid
        .iter()
        .map(|&lambda| {
            let (best, unique) = best_at(&base, lambda, opts.regularizer);
            let winner = base[best].candidate.clone();
            SweepPoint {
                lambda,
                winner_description: winner.describe(),
                unique,
                winner,
            }
        })
        .collect();
    Ok(LambdaSweep { points })
}

/// Index of the cheapest report at `lambda` and whether it is strictly
/// cheaper than every other, without re-sorting.
fn best_at(reports: &[DaoReport], lambda: f64, regularizer: Regularizer) -> (usize, bool) {
    let costs: Vec<f64> = reports
        .iter()
        .map(|r| -r.beta_norm + lambda * regularizer.size(&r.candidate) as f64)
        .collect();
    let mut best = 0;
    for i in 1..reports.len() {
        let better = if costs_tie(costs[i], costs[best]) {
            let (a, b) = (&reports[i], &reports[best]);
            a.annihilator_size
                .cmp(&b.annihilator_size)
                .then_with(|| a.candidate.cmp(&b.candidate))
                == Ordering::Less
        } else {
            costs[i] < costs[best]
        };
        if better {
            best = i;
        }
    }
    let c = costs[best];
    let unique = costs
        .iter()
        .enumerate()
        .all(|(i, &x)| i == best || (c < x && !costs_tie(c, x)));
    (best, unique)
}

/// `count` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
