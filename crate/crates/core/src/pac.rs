//! PAC tooling for the subgroup concept class: binary "same coset" examples,
//! VC dimension (closed form and brute force), shattering checks and
//! sample-complexity estimates.
//!
//! A set of pairs `Γ = {(g_i, g'_i)}` is shattered by subgroups exactly when
//! the differences `d_i = g_i − g'_i` form an independent multiset, meaning
//! no `d_i` lies in the span of the others. The largest such set has
//! `Σ ℓ_i` elements, where `ℓ_i` counts prime-power cyclic factors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{
    abelian_groups_up_to, decompose_prime_power, enumerate_subgroups, prime_factorization, Group,
    GroupElement, PrimePowerComponent, Span, Subgroup,
};
use crate::states::TrainingSet;

/// Largest `|Γ|` accepted by [`shattering_check`].
pub const SHATTERING_CAP: usize = 20;
/// Largest `|G|` accepted by [`max_shattered_size`].
pub const MAX_SHATTER_SEARCH_ORDER: usize = 72;

/// A pair of inputs with the relation bit `𝟙[f(g) = f(g')]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinaryExample {
    pub g: GroupElement,
    pub g2: GroupElement,
    pub same_coset: bool,
}

/// All unordered pairs of distinct inputs, in sample order.
pub fn binary_examples(t: &TrainingSet) -> Vec<BinaryExample> {
    let s = t.samples();
    let g = t.group();
    let mut out = Vec::with_capacity(s.len() * s.len().saturating_sub(1) / 2);
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            out.push(BinaryExample {
                g: g.element_at(s[i].element).expect("valid"),
                g2: g.element_at(s[j].element).expect("valid"),
                same_coset: s[i].label == s[j].label,
            });
        }
    }
    out
}

/// `R_H(g, g') = 𝟙[g − g' ∈ H]`.
pub fn relation(h: &Subgroup, g: &GroupElement, g2: &GroupElement) -> Result<bool> {
    h.contains_element(&g.sub(g2)?)
}

/// `Σ ℓ_i` over the prime-power decomposition.
pub fn vc_dimension(group: &Group) -> usize {
    decompose_prime_power(group)
        .iter()
        .map(|c| c.multiplicity)
        .sum()
}

/// `Ω(n)`, prime factors counted with multiplicity.
fn big_omega(n: usize) -> usize {
    prime_factorization(n)
        .iter()
        .map(|&(_, m)| m as usize)
        .sum()
}

/// True when no entry lies in the span of the remaining entries. Zero and
/// repeated entries make the multiset dependent.
pub fn is_independent(group: &Group, ds: &[usize]) -> bool {
    (0..ds.len()).all(|i| {
        let mut span = Span::trivial(group.order());
        for (j, &d) in ds.iter().enumerate() {
            if j != i && !span.contains(d) {
                span.extend(group, d);
            }
        }
        !span.contains(ds[i])
    })
}

/// Exhaustive shattering test for `Γ`, cross-checked against difference
/// independence.
pub fn shattering_check(group: &Group, gamma: &[(GroupElement, GroupElement)]) -> Result<bool> {
    if gamma.len() > SHATTERING_CAP {
        return Err(Error::ShatteringCapExceeded {
            got: gamma.len(),
            cap: SHATTERING_CAP,
        });
    }
    let mut diffs = Vec::with_capacity(gamma.len());
    for (a, b) in gamma {
        group.ensure_same(a.group())?;
        diffs.push(a.sub(b)?.index());
    }
    let mut realized = vec![false; 1usize << gamma.len()];
    for h in enumerate_subgroups(group)? {
        let mask = diffs
            .iter()
            .enumerate()
            .filter(|(_, &d)| h.contains(d))
            .fold(0usize, |m, (i, _)| m | 1 << i);
        realized[mask] = true;
    }
    let exhaustive = realized.iter().all(|&r| r);
    let independent = is_independent(group, &diffs);
    if exhaustive != independent {
        return Err(Error::ShatteringDisagreement {
            exhaustive,
            independent,
        });
    }
    Ok(exhaustive)
}

/// Size of the largest independent set, found by depth-first search over
/// one generator per cyclic subgroup.
pub fn max_shattered_size(group: &Group) -> Result<usize> {
    if group.order() > MAX_SHATTER_SEARCH_ORDER {
        return Err(Error::EnumerationTooLarge {
            what: "group order for shattering search",
            value: group.order(),
            limit: MAX_SHATTER_SEARCH_ORDER,
        });
    }
    // Independence only depends on the cyclic subgroups ⟨d⟩.
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for g in 1..group.order() {
        let c = Subgroup::generated_by_indices(group, &[g])?;
        if seen.insert(c.elements().to_vec()) {
            reps.push(g);
        }
    }
    let mut best = 0;
    let mut chosen = Vec::new();
    search(group, &reps, 0, &mut chosen, &mut best);
    Ok(best)
}

fn search(group: &Group, reps: &[usize], start: usize, chosen: &mut Vec<usize>, best: &mut usize) {
    *best = (*best).max(chosen.len());
    let mut span = Span::trivial(group.order());
    for &d in chosen.iter() {
        if !span.contains(d) {
            span.extend(group, d);
        }
    }
    // Each new independent element strictly enlarges the span.
    if chosen.len() + big_omega(group.order() / span.len()) <= *best {
        return;
    }
    for i in start..reps.len() {
        let d = reps[i];
        if span.contains(d) {
            continue;
        }
        chosen.push(d);
        if is_independent(group, chosen) {
            search(group, reps, i + 1, chosen, best);
        }
        chosen.pop();
    }
}

/// Closed-form and (optionally) brute-force VC dimension.
#[derive(Clone, Debug, Serialize)]
pub struct VcReport {
    pub group: Group,
    pub vc_closed_form: usize,
    pub vc_brute_force: Option<usize>,
    pub decomposition: Vec<PrimePowerComponent>,
}

impl VcReport {
    pub fn agrees(&self) -> Option<bool> {
        self.vc_brute_force.map(|b| b == self.vc_closed_form)
    }
}

pub fn vc_report(group: &Group, brute_force: bool) -> Result<VcReport> {
    Ok(VcReport {
        group: group.clone(),
        vc_closed_form: vc_dimension(group),
        vc_brute_force: if brute_force {
            Some(max_shattered_size(group)?)
        } else {
            None
        },
        decomposition: decompose_prime_power(group),
    })
}

/// One row of the direct-sum additivity audit.
#[derive(Clone, Debug, Serialize)]
pub struct AdditivityRecord {
    pub left: Group,
    pub right: Group,
    pub mu_left: usize,
    pub mu_right: usize,
    pub mu_sum: usize,
    pub agrees: bool,
}

/// Compares `μ(G₁ ⊕ G₂)` with `μ(G₁) + μ(G₂)` for every pair of
/// non-trivial isomorphism classes with `|G₁||G₂| ≤ max_order`.
pub fn additivity_audit(max_order: usize) -> Result<Vec<AdditivityRecord>> {
    let classes = abelian_groups_up_to(max_order / 2);
    let mut mu = std::collections::HashMap::new();
    let mut get = |g: &Group| -> Result<usize> {
        if let Some(&m) = mu.get(g.factors()) {
            return Ok(m);
        }
        let m = max_shattered_size(g)?;
        mu.insert(g.factors().to_vec(), m);
        Ok(m)
    };
    let mut out = Vec::new();
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i..] {
            if a.order() * b.order() > max_order {
                continue;
            }
            let sum = a.direct_sum(b);
            let (ml, mr, ms) = (get(a)?, get(b)?, get(&sum)?);
            out.push(AdditivityRecord {
                left: a.clone(),
                right: b.clone(),
                mu_left: ml,
                mu_right: mr,
                mu_sum: ms,
                agrees: ms == ml + mr,
            });
        }
    }
    Ok(out)
}

/// PAC sample-size estimate; `constant` stands in for the unspecified
/// asymptotic constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SampleComplexity {
    pub vc_dimension: usize,
    pub n_bin: usize,
    pub n_labeled: usize,
}

pub fn sample_complexity(
    group: &Group,
    epsilon: f64,
    delta: f64,
    constant: f64,
) -> Result<SampleComplexity> {
    let open_unit = |name, v: f64| {
        if v > 0.0 && v < 1.0 {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                name,
                reason: format!("must lie in (0, 1), got {v}"),
            })
        }
    };
    open_unit("epsilon", epsilon)?;
    open_unit("delta", delta)?;
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::OutOfRange {
            name: "constant",
            reason: format!("must be positive, got {constant}"),
        });
    }
    let d = vc_dimension(group);
    let n_bin = (constant * (d as f64 / epsilon + (1.0 / delta).ln() / epsilon)).ceil() as usize;
    let n_labeled = ((2 * n_bin) as f64).sqrt().ceil() as usize;
    Ok(SampleComplexity {
        vc_dimension: d,
        n_bin,
        n_labeled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z12() -> Group {
        Group::cyclic(12)
    }

    fn pair(g: &Group, a: i64, b: i64) -> (GroupElement, GroupElement) {
        (g.element(&[a]).unwrap(), g.element(&[b]).unwrap())
    }

    #[test]
    fn binary_example_walkthrough() {
        let t = TrainingSet::from_indices(&z12(), &[(0, 0), (2, 0), (3, 1)]).unwrap();
        let got: Vec<(usize, usize, bool)> = binary_examples(&t)
            .iter()
            .map(|b| (b.g.index(), b.g2.index(), b.same_coset))
            .collect();
        assert_eq!(got, vec![(0, 2, true), (0, 3, false), (2, 3, false)]);
        let one = TrainingSet::from_indices(&z12(), &[(4, 0)]).unwrap();
        assert!(binary_examples(&one).is_empty());
        let same = TrainingSet::from_indices(&z12(), &[(1, 0), (2, 0), (3, 0)]).unwrap();
        assert!(binary_examples(&same).iter().all(|b| b.same_coset));
    }

    #[test]
    fn vc_closed_form() {
        assert_eq!(vc_dimension(&z12()), 2);
        assert_eq!(vc_dimension(&Group::cyclic(1)), 0);
        assert_eq!(vc_dimension(&Group::new(&[2, 2, 3]).unwrap()), 3);
    }

    #[test]
    fn shattering_examples() {
        let g = z12();
        assert!(shattering_check(&g, &[pair(&g, 0, 3), pair(&g, 3, 5)]).unwrap());
        assert!(!shattering_check(&g, &[pair(&g, 4, 4), pair(&g, 3, 5)]).unwrap());
        for a in 0..12 {
            for b in 0..12 {
                let gamma = [pair(&g, 0, a), pair(&g, 0, b), pair(&g, 1, 7)];
                assert!(!shattering_check(&g, &gamma).unwrap());
            }
        }
        let big: Vec<_> = (0..21).map(|i| pair(&g, i, 0)).collect();
        assert!(matches!(
            shattering_check(&g, &big),
            Err(Error::ShatteringCapExceeded { got: 21, cap: 20 })
        ));
    }

    #[test]
    fn brute_force_small_groups() {
        assert_eq!(max_shattered_size(&z12()).unwrap(), 2);
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(max_shattered_size(&Group::cyclic(p)).unwrap(), 1);
        }
        assert_eq!(
            max_shattered_size(&Group::new(&[2, 2]).unwrap()).unwrap(),
            2
        );
        assert_eq!(max_shattered_size(&Group::cyclic(1)).unwrap(), 0);
        assert!(max_shattered_size(&Group::cyclic(73)).is_err());
    }

    #[test]
    fn sample_complexity_examples() {
        let s = sample_complexity(&z12(), 0.1, 0.05, 1.0).unwrap();
        assert_eq!((s.n_bin, s.n_labeled), (50, 10));
        let loose = sample_complexity(&z12(), 0.999, 0.5, 1.0).unwrap();
        assert_eq!(loose.n_bin, ((2.0 + 2f64.ln()) / 0.999f64).ceil() as usize);
        assert!(sample_complexity(&z12(), 0.0, 0.5, 1.0).is_err());
        assert!(sample_complexity(&z12(), 0.1, 1.0, 1.0).is_err());
        assert!(sample_complexity(&z12(), 0.1, 0.5, 0.0).is_err());
    }
}
