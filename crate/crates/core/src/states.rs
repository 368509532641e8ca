//! Dense states over a group, labelled training data, the partial-coset
//! mixture obtained by discarding labels, measurement sampling, fidelities
//! and a shot-level SWAP test.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fourier;
use crate::group::{Group, GroupElement, Subgroup};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Complex amplitudes indexed by flat group-element index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    group: Group,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes. The length must equal `|G|`; normalization is
    /// the caller's responsibility.
    pub fn from_amplitudes(group: &Group, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                got: amplitudes.len(),
            });
        }
        Ok(StateVector {
            group: group.clone(),
            amplitudes,
        })
    }

    pub fn basis(group: &Group, index: usize) -> Result<Self> {
        group.check_index(index)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); group.order()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            group: group.clone(),
            amplitudes,
        })
    }

    /// `|X⟩ = |X|^{-1/2} Σ_{x∈X} |x⟩` for distinct flat indices.
    pub fn uniform(group: &Group, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); group.order()];
        let a = Complex64::new(1.0 / (indices.len() as f64).sqrt(), 0.0);
        for &i in indices {
            group.check_index(i)?;
            if amplitudes[i] != Complex64::new(0.0, 0.0) {
                return Err(Error::DuplicateSample(i));
            }
            amplitudes[i] = a;
        }
        Ok(StateVector {
            group: group.clone(),
            amplitudes,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.group.ensure_same(&other.group)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Computational-basis measurement probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    /// Image under the shift operator `|g⟩ ↦ |g + s⟩`.
    pub fn shifted(&self, s: &GroupElement) -> Result<StateVector> {
        self.group.ensure_same(s.group())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (g, a) in self.amplitudes.iter().enumerate() {
            out[self.group.add_idx(g, s.index())] = *a;
        }
        Ok(StateVector {
            group: self.group.clone(),
            amplitudes: out,
        })
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.group.ensure_same(&other.group)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = self.amplitudes.iter().map(|a| (a.re, a.im)).collect();
        let mut st = serializer.serialize_struct("StateVector", 2)?;
        st.serialize_field("group", &self.group)?;
        st.serialize_field("amplitudes", &pairs)?;
        st.end()
    }
}

pub fn uniform_superposition(xs: &[GroupElement]) -> Result<StateVector> {
    let first = xs.first().ok_or(Error::EmptySet)?;
    let group = first.group();
    for x in xs {
        group.ensure_same(x.group())?;
    }
    let idx: Vec<usize> = xs.iter().map(GroupElement::index).collect();
    StateVector::uniform(group, &idx)
}

/// Uniform superposition over the coset `r + H`.
pub fn coset_state(r: &GroupElement, h: &Subgroup) -> Result<StateVector> {
    let g = h.group();
    g.ensure_same(r.group())?;
    let idx: Vec<usize> = h
        .elements()
        .iter()
        .map(|&e| g.add_idx(r.index(), e))
        .collect();
    StateVector::uniform(g, &idx)
}

/// One observed input with its label and multiplicity (1 unless sampled
/// with replacement).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub element: usize,
    pub label: usize,
    pub multiplicity: usize,
}

/// The inputs sharing one label, i.e. the partial coset `X_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelGroup {
    pub label: usize,
    /// `(flat index, multiplicity)` in insertion order.
    pub members: Vec<(usize, usize)>,
}

impl LabelGroup {
    pub fn elements(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.0).collect()
    }

    /// Number of samples including multiplicity.
    pub fn count(&self) -> usize {
        self.members.iter().map(|m| m.1).sum()
    }
}

/// Labelled samples `{(g, f(g))}` over a group.
#[derive(Clone, Debug)]
pub struct TrainingSet {
    group: Group,
    samples: Vec<Sample>,
    hidden: Option<Subgroup>,
}

impl TrainingSet {
    /// Distinct inputs with labels; duplicates are rejected.
    pub fn new(group: &Group, samples: &[(GroupElement, usize)]) -> Result<Self> {
        let mut idx = Vec::with_capacity(samples.len());
        for (g, label) in samples {
            group.ensure_same(g.group())?;
            idx.push((g.index(), *label));
        }
        Self::from_indices(group, &idx)
    }

    pub fn from_indices(group: &Group, samples: &[(usize, usize)]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let mut seen = vec![false; group.order()];
        let mut out = Vec::with_capacity(samples.len());
        for &(element, label) in samples {
            group.check_index(element)?;
            if seen[element] {
                return Err(Error::DuplicateSample(element));
            }
            seen[element] = true;
            out.push(Sample {
                element,
                label,
                multiplicity: 1,
            });
        }
        Ok(TrainingSet {
            group: group.clone(),
            samples: out,
            hidden: None,
        })
    }

    /// Samples drawn with replacement: repeated inputs are merged into
    /// multiplicities. A repeated input with a different label is an error.
    pub fn from_counts(group: &Group, samples: &[(usize, usize, usize)]) -> Result<Self> {
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Sample> = Vec::new();
        for &(element, label, multiplicity) in samples {
            group.check_index(element)?;
            if multiplicity == 0 {
                return Err(Error::OutOfRange {
                    name: "multiplicity",
                    reason: format!("input {element} has multiplicity 0"),
                });
            }
            match pos.get(&element) {
                Some(&p) => {
                    if out[p].label != label {
                        return Err(Error::InconsistentLabels(format!(
                            "input {element} seen with labels {} and {label}",
                            out[p].label
                        )));
                    }
                    out[p].multiplicity += multiplicity;
                }
                None => {
                    pos.insert(element, out.len());
                    out.push(Sample {
                        element,
                        label,
                        multiplicity,
                    });
                }
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        Ok(TrainingSet {
            group: group.clone(),
            samples: out,
            hidden: None,
        })
    }

    /// Labels `inputs` by coset of `h` (label = position of the coset's
    /// minimal representative) and records `h` as ground truth.
    pub fn labelled_by(h: &Subgroup, inputs: &[usize]) -> Result<Self> {
        let table = h.coset_table();
        let pairs: Vec<(usize, usize)> = inputs
            .iter()
            .map(|&x| {
                h.group().check_index(x)?;
                Ok((x, table.coset_of(x)))
            })
            .collect::<Result<_>>()?;
        let mut t = Self::from_indices(h.group(), &pairs)?;
        t.hidden = Some(h.clone());
        Ok(t)
    }

    /// As [`labelled_by`](Self::labelled_by) with `(input, multiplicity)`
    /// pairs.
    pub fn labelled_by_counts(h: &Subgroup, inputs: &[(usize, usize)]) -> Result<Self> {
        let table = h.coset_table();
        let triples: Vec<(usize, usize, usize)> = inputs
            .iter()
            .map(|&(x, m)| {
                h.group().check_index(x)?;
                Ok((x, table.coset_of(x), m))
            })
            .collect::<Result<_>>()?;
        let mut t = Self::from_counts(h.group(), &triples)?;
        t.hidden = Some(h.clone());
        Ok(t)
    }

    /// Every group element, labelled by coset of `h`.
    pub fn complete(h: &Subgroup) -> Self {
        let all: Vec<usize> = (0..h.group().order()).collect();
        Self::labelled_by(h, &all).expect("complete data is valid")
    }

    /// Attaches ground truth after checking the labels against it.
    pub fn with_hidden(mut self, h: &Subgroup) -> Result<Self> {
        self.check_labels(h)?;
        self.hidden = Some(h.clone());
        Ok(self)
    }

    /// Verifies `f(g) = f(g') ⟺ g − g' ∈ H` on the observed inputs.
    pub fn check_labels(&self, h: &Subgroup) -> Result<()> {
        self.group.ensure_same(h.group())?;
        let table = h.coset_table();
        let mut label_to_coset: HashMap<usize, usize> = HashMap::new();
        let mut coset_to_label: HashMap<usize, usize> = HashMap::new();
        for s in &self.samples {
            let c = table.coset_of(s.element);
            if let Some(&prev) = label_to_coset.get(&s.label) {
                if prev != c {
                    return Err(Error::InconsistentLabels(format!(
                        "label {} spans more than one coset",
                        s.label
                    )));
                }
            }
            if let Some(&prev) = coset_to_label.get(&c) {
                if prev != s.label {
                    return Err(Error::InconsistentLabels(format!(
                        "coset of {} carries labels {prev} and {}",
                        s.element, s.label
                    )));
                }
            }
            label_to_coset.insert(s.label, c);
            coset_to_label.insert(c, s.label);
        }
        Ok(())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn hidden(&self) -> Option<&Subgroup> {
        self.hidden.as_ref()
    }

    /// Number of distinct inputs.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `N`, the number of samples counted with multiplicity.
    pub fn total_count(&self) -> usize {
        self.samples.iter().map(|s| s.multiplicity).sum()
    }

    pub fn has_multiplicities(&self) -> bool {
        self.samples.iter().any(|s| s.multiplicity != 1)
    }

    pub fn inputs(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.element).collect()
    }

    /// Partial cosets `X_r`, ordered by first appearance of each label.
    pub fn label_groups(&self) -> Vec<LabelGroup> {
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<LabelGroup> = Vec::new();
        for s in &self.samples {
            let p = *pos.entry(s.label).or_insert_with(|| {
                out.push(LabelGroup {
                    label: s.label,
                    members: Vec::new(),
                });
                out.len() - 1
            });
            out[p].members.push((s.element, s.multiplicity));
        }
        out
    }
}

/// The pure training state `Σ_x √w_x |x, f(x)⟩`, stored sparsely.
#[derive(Clone, Debug)]
pub struct TrainingState {
    group: Group,
    entries: Vec<(usize, usize, Complex64)>,
}

impl TrainingState {
    pub fn group(&self) -> &Group {
        &self.group
    }

    /// `(element, label, amplitude)` triples with non-zero amplitude.
    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn amplitude(&self, element: usize, label: usize) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.0 == element && e.1 == label)
            .map_or(Complex64::new(0.0, 0.0), |e| e.2)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum()
    }

    /// Discards the label register: one mixture component per label.
    pub fn trace_out_labels(&self) -> PartialCosetMixture {
        let mut pos: HashMap<usize, usize> = HashMap::new();
        let mut parts: Vec<(usize, Vec<(usize, Complex64)>)> = Vec::new();
        for &(g, label, a) in &self.entries {
            let p = *pos.entry(label).or_insert_with(|| {
                parts.push((label, Vec::new()));
                parts.len() - 1
            });
            parts[p].1.push((g, a));
        }
        let components = parts
            .into_iter()
            .map(|(label, members)| {
                let weight: f64 = members.iter().map(|m| m.1.norm_sqr()).sum();
                let scale = 1.0 / weight.sqrt();
                let mut amps = vec![Complex64::new(0.0, 0.0); self.group.order()];
                let mut support = Vec::with_capacity(members.len());
                for (g, a) in members {
                    amps[g] = a * scale;
                    support.push(g);
                }
                support.sort_unstable();
                MixtureComponent {
                    label,
                    weight,
                    support,
                    state: StateVector {
                        group: self.group.clone(),
                        amplitudes: amps,
                    },
                }
            })
            .collect();
        PartialCosetMixture {
            group: self.group.clone(),
            components,
        }
    }
}

/// Builds the training state. `weights` are per-sample probabilities in
/// sample order; the default is `n_x / N`.
pub fn training_state(t: &TrainingSet, weights: Option<&[f64]>) -> Result<TrainingState> {
    let n = t.total_count() as f64;
    let w: Vec<f64> = match weights {
        None => t
            .samples
            .iter()
            .map(|s| s.multiplicity as f64 / n)
            .collect(),
        Some(w) => {
            if w.len() != t.len() {
                return Err(Error::DimensionMismatch {
                    expected: t.len(),
                    got: w.len(),
                });
            }
            let sum: f64 = w.iter().sum();
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > NORMALIZATION_TOL
            {
                return Err(Error::InvalidWeights { sum });
            }
            w.to_vec()
        }
    };
    let entries = t
        .samples
        .iter()
        .zip(w)
        .filter(|(_, w)| *w > 0.0)
        .map(|(s, w)| (s.element, s.label, Complex64::new(w.sqrt(), 0.0)))
        .collect();
    Ok(TrainingState {
        group: t.group.clone(),
        entries,
    })
}

/// One pure partial-coset component of the mixture.
#[derive(Clone, Debug)]
pub struct MixtureComponent {
    pub label: usize,
    pub weight: f64,
    /// Sorted support `X_r`.
    pub support: Vec<usize>,
    pub state: StateVector,
}

/// `ρ_T = Σ_r p_r |X_r⟩⟨X_r|`, kept as a component list.
#[derive(Clone, Debug)]
pub struct PartialCosetMixture {
    group: Group,
    components: Vec<MixtureComponent>,
}

impl PartialCosetMixture {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    /// Fourier sampling probabilities `Σ_r p_r |(F† ψ_r)_y|²`.
    pub fn fourier_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.group.order()];
        for c in &self.components {
            for (o, p) in out.iter_mut().zip(fourier_sampling_distribution(&c.state)) {
                *o += c.weight * p;
            }
        }
        out
    }

    /// `Σ_r p_r |⟨X_r|φ⟩|²`.
    pub fn fidelity(&self, phi: &StateVector) -> Result<f64> {
        let mut acc = 0.0;
        for c in &self.components {
            acc += c.weight * c.state.fidelity(phi)?;
        }
        Ok(acc)
    }
}

pub fn partial_coset_mixture(t: &TrainingSet) -> PartialCosetMixture {
    training_state(t, None)
        .expect("default weights are valid")
        .trace_out_labels()
}

/// Fourier sampling probabilities of a pure state, `|(F† ψ)_y|²`.
pub fn fourier_sampling_distribution(state: &StateVector) -> Vec<f64> {
    fourier::inverse_qft(state).probabilities()
}

/// `shots` i.i.d. outcomes from a probability vector.
pub fn sample_measurement<R: Rng + ?Sized>(
    dist: &[f64],
    rng: &mut R,
    shots: usize,
) -> Result<Vec<usize>> {
    if shots == 0 {
        return Err(Error::OutOfRange {
            name: "shots",
            reason: "must be at least 1".into(),
        });
    }
    let sum: f64 = dist.iter().sum();
    if dist.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!(
            "probabilities must be non-negative and sum to 1, got {sum}"
        )));
    }
    let w = WeightedIndex::new(dist).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    Ok((0..shots).map(|_| w.sample(rng)).collect())
}

pub fn fidelity_mixture(m: &PartialCosetMixture, phi: &StateVector) -> Result<f64> {
    m.fidelity(phi)
}

/// Outcome of a simulated SWAP test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SwapEstimate {
    /// `1 − 2·(fraction of b = 1)`.
    pub estimate: f64,
    /// Binomial standard error mapped through the affine estimator.
    pub stderr: f64,
    /// Exact fidelity the bits were drawn from.
    pub fidelity: f64,
    pub shots: usize,
    pub ones: usize,
}

/// Simulates `shots` SWAP-test bits with `P(b = 1) = (1 − F)/2`.
pub fn swap_test_estimate<R: Rng + ?Sized>(
    m: &PartialCosetMixture,
    phi: &StateVector,
    rng: &mut R,
    shots: usize,
) -> Result<SwapEstimate> {
    let f = m.fidelity(phi)?;
    swap_test_from_fidelity(f, rng, shots)
}

pub fn swap_test_from_fidelity<R: Rng + ?Sized>(
    fidelity: f64,
    rng: &mut R,
    shots: usize,
) -> Result<SwapEstimate> {
    if shots == 0 {
        return Err(Error::OutOfRange {
            name: "shots",
            reason: "must be at least 1".into(),
        });
    }
    let p1 = ((1.0 - fidelity) / 2.0).clamp(0.0, 1.0);
    let ones = (0..shots).filter(|_| rng.random_bool(p1)).count();
    let q = ones as f64 / shots as f64;
    Ok(SwapEstimate {
        estimate: 1.0 - 2.0 * q,
        stderr: 2.0 * (q * (1.0 - q) / shots as f64).sqrt(),
        fidelity,
        shots,
        ones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitRng;

    const TOL: f64 = 1e-10;

    fn z12() -> Group {
        Group::cyclic(12)
    }

    fn two_z12() -> Subgroup {
        let g = z12();
        Subgroup::generated(&g, &[g.element(&[2]).unwrap()]).unwrap()
    }

    // cyan = 0, lime = 1
    fn toy_set() -> TrainingSet {
        TrainingSet::from_indices(&z12(), &[(0, 0), (2, 0), (3, 1)]).unwrap()
    }

    #[test]
    fn uniform_examples() {
        let g = z12();
        let s = uniform_superposition(&[g.element(&[5]).unwrap()]).unwrap();
        assert_eq!(s, StateVector::basis(&g, 5).unwrap());
        let h = StateVector::uniform(&g, two_z12().elements()).unwrap();
        for (i, a) in h.amplitudes().iter().enumerate() {
            let want = if i % 2 == 0 { 1.0 / 6f64.sqrt() } else { 0.0 };
            assert!((a.re - want).abs() < TOL && a.im == 0.0);
        }
        assert_eq!(uniform_superposition(&[]).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn coset_state_examples() {
        let g = z12();
        let h = two_z12();
        let odd = coset_state(&g.element(&[1]).unwrap(), &h).unwrap();
        let odds: Vec<usize> = (0..12).filter(|x| x % 2 == 1).collect();
        assert!(
            odd.max_abs_diff(&StateVector::uniform(&g, &odds).unwrap())
                .unwrap()
                < TOL
        );
        let inside = coset_state(&g.element(&[4]).unwrap(), &h).unwrap();
        assert!(
            inside
                .max_abs_diff(&StateVector::uniform(&g, h.elements()).unwrap())
                .unwrap()
                < TOL
        );
        let three = Subgroup::generated(&g, &[g.element(&[3]).unwrap()]).unwrap();
        let c = coset_state(&g.element(&[3]).unwrap(), &three).unwrap();
        assert!(
            c.max_abs_diff(&StateVector::uniform(&g, &[0, 3, 6, 9]).unwrap())
                .unwrap()
                < TOL
        );
    }

    #[test]
    fn training_state_example() {
        let t = toy_set();
        let s = training_state(&t, None).unwrap();
        let a = 1.0 / 3f64.sqrt();
        assert!((s.amplitude(0, 0).re - a).abs() < TOL);
        assert!((s.amplitude(2, 0).re - a).abs() < TOL);
        assert!((s.amplitude(3, 1).re - a).abs() < TOL);
        assert_eq!(s.amplitude(3, 0), Complex64::new(0.0, 0.0));
        assert!(matches!(
            training_state(&t, Some(&[0.5, 0.2, 0.2])),
            Err(Error::InvalidWeights { .. })
        ));
        let one = TrainingSet::from_indices(&z12(), &[(7, 3)]).unwrap();
        let s = training_state(&one, None).unwrap();
        assert_eq!(s.entries().len(), 1);
        assert!((s.amplitude(7, 3).re - 1.0).abs() < TOL);
    }

    #[test]
    fn mixture_example() {
        let m = partial_coset_mixture(&toy_set());
        let c = m.components();
        assert_eq!(c.len(), 2);
        assert!((c[0].weight - 2.0 / 3.0).abs() < TOL);
        assert_eq!(c[0].support, vec![0, 2]);
        assert!((c[1].weight - 1.0 / 3.0).abs() < TOL);
        assert_eq!(c[1].support, vec![3]);
    }

    #[test]
    fn duplicates_rejected_or_merged() {
        let g = z12();
        assert_eq!(
            TrainingSet::from_indices(&g, &[(1, 0), (1, 0)]).unwrap_err(),
            Error::DuplicateSample(1)
        );
        let t = TrainingSet::from_counts(&g, &[(1, 0, 1), (3, 1, 2), (1, 0, 2)]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.total_count(), 5);
        assert!(TrainingSet::from_counts(&g, &[(1, 0, 1), (1, 2, 1)]).is_err());
        assert_eq!(
            TrainingSet::from_indices(&g, &[]).unwrap_err(),
            Error::EmptyTrainingSet
        );
    }

    #[test]
    fn label_checks() {
        let h = two_z12();
        assert!(toy_set().check_labels(&h).is_ok());
        let bad = TrainingSet::from_indices(&z12(), &[(0, 0), (1, 0)]).unwrap();
        assert!(bad.check_labels(&h).is_err());
        let bad = TrainingSet::from_indices(&z12(), &[(0, 0), (2, 1)]).unwrap();
        assert!(bad.check_labels(&h).is_err());
    }

    #[test]
    fn fourier_distribution_examples() {
        let g = z12();
        let h = two_z12();
        let p = fourier_sampling_distribution(&StateVector::uniform(&g, h.elements()).unwrap());
        for (y, &py) in p.iter().enumerate() {
            let want = if y == 0 || y == 6 { 0.5 } else { 0.0 };
            assert!((py - want).abs() < TOL, "y={y} p={py}");
        }
        let reps = TrainingSet::labelled_by(&h, &[0, 1]).unwrap();
        for py in partial_coset_mixture(&reps).fourier_distribution() {
            assert!((py - 1.0 / 12.0).abs() < TOL);
        }
        let p = partial_coset_mixture(&toy_set()).fourier_distribution();
        assert!((p[0] + p[6] - 5.0 / 18.0).abs() < TOL);
    }

    #[test]
    fn measurement_sampling() {
        let mut rng = SplitRng::seed_from(3);
        let point = [0.0, 1.0, 0.0];
        assert!(sample_measurement(&point, &mut rng, 50)
            .unwrap()
            .iter()
            .all(|&x| x == 1));
        let dist = fourier_sampling_distribution(
            &StateVector::uniform(&z12(), two_z12().elements()).unwrap(),
        );
        let mut clean = dist.clone();
        for p in clean.iter_mut() {
            if *p < 1e-15 {
                *p = 0.0;
            }
        }
        let shots = 10_000;
        let out = sample_measurement(&clean, &mut rng, shots).unwrap();
        let zeros = out.iter().filter(|&&y| y == 0).count() as f64;
        let sixes = out.iter().filter(|&&y| y == 6).count() as f64;
        assert_eq!(zeros + sixes, shots as f64);
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((zeros - 5000.0).abs() < 3.0 * sigma);
        let a = sample_measurement(&clean, &mut SplitRng::seed_from(9), 20).unwrap();
        let b = sample_measurement(&clean, &mut SplitRng::seed_from(9), 20).unwrap();
        assert_eq!(a, b);
        assert!(sample_measurement(&clean, &mut rng, 0).is_err());
        assert!(sample_measurement(&[0.5, 0.6], &mut rng, 1).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let g = z12();
        let m = partial_coset_mixture(&toy_set());
        let far = StateVector::basis(&g, 5).unwrap();
        assert_eq!(m.fidelity(&far).unwrap(), 0.0);
        let pure =
            partial_coset_mixture(&TrainingSet::labelled_by(&two_z12(), &[0, 2, 4]).unwrap());
        let phi = StateVector::uniform(&g, &[0, 2, 4]).unwrap();
        assert!((pure.fidelity(&phi).unwrap() - 1.0).abs() < TOL);
        let three = Subgroup::generated(&g, &[g.element(&[3]).unwrap()]).unwrap();
        let ann = StateVector::uniform(&g, three.elements()).unwrap();
        assert!((m.fidelity(&ann).unwrap() - 1.0 / 6.0).abs() < TOL);
    }

    #[test]
    fn swap_test_extremes() {
        let mut rng = SplitRng::seed_from(5);
        let one = swap_test_from_fidelity(1.0, &mut rng, 1000).unwrap();
        assert_eq!(one.ones, 0);
        assert_eq!(one.estimate, 1.0);
        let half = swap_test_from_fidelity(0.0, &mut rng, 40_000).unwrap();
        let frac = half.ones as f64 / 40_000.0;
        assert!((frac - 0.5).abs() < 3.0 * (0.25f64 / 40_000.0).sqrt());
    }

    #[test]
    fn shift_operator() {
        let g = z12();
        let s = StateVector::basis(&g, 3).unwrap();
        let t = s.shifted(&g.element(&[10]).unwrap()).unwrap();
        assert_eq!(t, StateVector::basis(&g, 1).unwrap());
    }
}
