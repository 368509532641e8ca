//! Finite abelian groups written as direct sums of cyclic factors
//! `Z_{n1} ⊕ … ⊕ Z_{nk}`, together with their subgroups, cosets,
//! character kernels and annihilators.
//!
//! Elements are addressed by a mixed-radix flat index (last factor varies
//! fastest), which is also the index into every dense state vector. The dual
//! group is identified with the group itself: the label `y` names the
//! character `χ_y(g) = exp(2πi Σ y_i g_i / n_i)`, so annihilators are stored
//! as ordinary [`Subgroup`]s.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_integer::Integer;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default bound on `|G|` for subgroup enumeration.
pub const DEFAULT_MAX_ENUMERATION_ORDER: usize = 5000;
/// Default bound on the number of subgroups produced by one enumeration.
pub const DEFAULT_MAX_SUBGROUPS: usize = 100_000;

/// A finite abelian group `Z_{n1} ⊕ … ⊕ Z_{nk}`.
///
/// Cheap to clone; equality compares the factor lists, so `Z12` and
/// `Z4 ⊕ Z3` are different (isomorphic) groups.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<i64>")]
pub struct Group {
    inner: Arc<GroupInner>,
}

#[derive(Debug)]
struct GroupInner {
    factors: Vec<usize>,
    strides: Vec<usize>,
    order: usize,
    exponent: usize,
}

impl Group {
    /// Builds `Z_{n1} ⊕ … ⊕ Z_{nk}`. Factors equal to 1 are dropped; an empty
    /// list gives the trivial group.
    pub fn new(factors: &[i64]) -> Result<Self> {
        let mut kept = Vec::with_capacity(factors.len());
        for &n in factors {
            if n <= 0 {
                return Err(Error::InvalidFactor(n));
            }
            if n > 1 {
                kept.push(n as usize);
            }
        }
        Ok(Self::from_normalized(kept))
    }

    /// The cyclic group `Z_n`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        Self::from_normalized(if n > 1 { vec![n] } else { Vec::new() })
    }

    fn from_normalized(factors: Vec<usize>) -> Self {
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1];
        }
        let order = factors.iter().product();
        let exponent = factors.iter().fold(1usize, |acc, n| acc.lcm(n));
        Self {
            inner: Arc::new(GroupInner {
                factors,
                strides,
                order,
                exponent,
            }),
        }
    }

    /// `self ⊕ other`, factors concatenated.
    pub fn direct_sum(&self, other: &Group) -> Group {
        let mut factors = self.factors().to_vec();
        factors.extend_from_slice(other.factors());
        Self::from_normalized(factors)
    }

    pub fn factors(&self) -> &[usize] {
        &self.inner.factors
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    /// Least common multiple of the factors (the largest element order).
    pub fn exponent(&self) -> usize {
        self.inner.exponent
    }

    /// Number of cyclic factors in this presentation.
    pub fn rank(&self) -> usize {
        self.inner.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.inner.order == 1
    }

    /// True when the group is cyclic (not merely presented with one factor).
    pub fn is_cyclic(&self) -> bool {
        self.inner.exponent == self.inner.order
    }

    /// Mixed-radix encoding of in-range residues.
    pub fn encode(&self, residues: &[usize]) -> usize {
        residues
            .iter()
            .zip(&self.inner.strides)
            .map(|(r, s)| r * s)
            .sum()
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        self.inner
            .factors
            .iter()
            .zip(&self.inner.strides)
            .map(|(n, s)| (index / s) % n)
            .collect()
    }

    #[inline]
    pub(crate) fn add_idx(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for (n, s) in self.inner.factors.iter().zip(&self.inner.strides) {
            let ra = (a / s) % n;
            let rb = (b / s) % n;
            out += ((ra + rb) % n) * s;
        }
        out
    }

    #[inline]
    pub(crate) fn sub_idx(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for (n, s) in self.inner.factors.iter().zip(&self.inner.strides) {
            let ra = (a / s) % n;
            let rb = (b / s) % n;
            out += ((ra + n - rb) % n) * s;
        }
        out
    }

    pub(crate) fn neg_idx(&self, a: usize) -> usize {
        self.sub_idx(0, a)
    }

    pub(crate) fn mul_idx(&self, k: i64, a: usize) -> usize {
        let mut out = 0;
        for (n, s) in self.inner.factors.iter().zip(&self.inner.strides) {
            let r = ((a / s) % n) as i128;
            let v = (k as i128 * r).rem_euclid(*n as i128) as usize;
            out += v * s;
        }
        out
    }

    /// `m` such that `χ_y(g) = exp(2πi m / exponent)`.
    #[inline]
    pub(crate) fn phase_numerator(&self, y: usize, g: usize) -> usize {
        let e = self.inner.exponent as u128;
        let mut acc: u128 = 0;
        for (n, s) in self.inner.factors.iter().zip(&self.inner.strides) {
            let ry = ((y / s) % n) as u128;
            let rg = ((g / s) % n) as u128;
            acc = (acc + ry * rg * (e / *n as u128)) % e;
        }
        acc as usize
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.order() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                order: self.order(),
            })
        }
    }

    /// Builds an element from residues, reducing each modulo its factor.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.rank() {
            return Err(Error::ResidueCount {
                expected: self.rank(),
                got: residues.len(),
            });
        }
        let reduced: Vec<usize> = residues
            .iter()
            .zip(self.factors())
            .map(|(&r, &n)| r.rem_euclid(n as i64) as usize)
            .collect();
        Ok(GroupElement {
            group: self.clone(),
            index: self.encode(&reduced),
        })
    }

    pub fn element_at(&self, index: usize) -> Result<GroupElement> {
        self.check_index(index)?;
        Ok(GroupElement {
            group: self.clone(),
            index,
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            group: self.clone(),
            index: 0,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |index| GroupElement {
            group: self.clone(),
            index,
        })
    }

    pub(crate) fn ensure_same(&self, other: &Group) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.factors == other.inner.factors
    }
}

impl Eq for Group {}

impl Hash for Group {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.factors.hash(state);
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "Z1");
        }
        let parts: Vec<String> = self.factors().iter().map(|n| format!("Z{n}")).collect();
        write!(f, "{}", parts.join("⊕"))
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

impl From<Group> for Vec<usize> {
    fn from(g: Group) -> Self {
        g.factors().to_vec()
    }
}

impl TryFrom<Vec<i64>> for Group {
    type Error = Error;

    fn try_from(factors: Vec<i64>) -> Result<Self> {
        Group::new(&factors)
    }
}

/// An element of a [`Group`], stored by flat index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: Group,
    index: usize,
}

impl GroupElement {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn residues(&self) -> Vec<usize> {
        self.group.decode(self.index)
    }

    pub fn is_identity(&self) -> bool {
        self.index == 0
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.group.ensure_same(&other.group)?;
        Ok(self.with_index(self.group.add_idx(self.index, other.index)))
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.group.ensure_same(&other.group)?;
        Ok(self.with_index(self.group.sub_idx(self.index, other.index)))
    }

    pub fn neg(&self) -> GroupElement {
        self.with_index(self.group.neg_idx(self.index))
    }

    pub fn scalar_mul(&self, k: i64) -> GroupElement {
        self.with_index(self.group.mul_idx(k, self.index))
    }

    /// Smallest `m > 0` with `m·g = 0`.
    pub fn order(&self) -> usize {
        self.residues()
            .iter()
            .zip(self.group.factors())
            .fold(1usize, |acc, (&r, &n)| acc.lcm(&(n / n.gcd(&r))))
    }

    fn with_index(&self, index: usize) -> GroupElement {
        GroupElement {
            group: self.group.clone(),
            index,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.residues();
        if r.len() == 1 {
            write!(f, "{}", r[0])
        } else {
            let parts: Vec<String> = r.iter().map(usize::to_string).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.group)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.residues().serialize(serializer)
    }
}

/// Incrementally grown additive span, used for closures and generator
/// extraction.
pub(crate) struct Span {
    member: Vec<bool>,
    list: Vec<usize>,
}

impl Span {
    pub(crate) fn trivial(order: usize) -> Self {
        let mut member = vec![false; order];
        member[0] = true;
        Span {
            member,
            list: vec![0],
        }
    }

    pub(crate) fn contains(&self, g: usize) -> bool {
        self.member[g]
    }

    pub(crate) fn len(&self) -> usize {
        self.list.len()
    }

    /// Adds `g` and closes: the new span is the union of cosets `S + j·g`.
    pub(crate) fn extend(&mut self, group: &Group, g: usize) {
        self.extend_by(|x| group.add_idx(x, g));
    }

    /// As [`extend`](Self::extend), with `step(x) = x + g` supplied by the
    /// caller (typically a precomputed translation table).
    pub(crate) fn extend_by(&mut self, step: impl Fn(usize) -> usize) {
        let base = self.list.len();
        let mut start = 0;
        while !self.member[step(self.list[start])] {
            for i in start..start + base {
                let x = step(self.list[i]);
                self.member[x] = true;
                self.list.push(x);
            }
            start += base;
        }
    }

    pub(crate) fn into_sorted(mut self) -> Vec<usize> {
        self.list.sort_unstable();
        self.list
    }
}

/// A subgroup in canonical form: the full sorted list of flat indices plus a
/// generating set.
#[derive(Clone)]
pub struct Subgroup {
    group: Group,
    elements: Arc<[usize]>,
    generators: Arc<[usize]>,
}

impl Subgroup {
    /// The subgroup spanned by `gens` (the trivial subgroup when empty).
    pub fn generated(group: &Group, gens: &[GroupElement]) -> Result<Self> {
        for g in gens {
            group.ensure_same(g.group())?;
        }
        let idx: Vec<usize> = gens.iter().map(GroupElement::index).collect();
        Self::generated_by_indices(group, &idx)
    }

    pub fn generated_by_indices(group: &Group, gens: &[usize]) -> Result<Self> {
        for &g in gens {
            group.check_index(g)?;
        }
        let mut span = Span::trivial(group.order());
        let mut kept = Vec::new();
        for &g in gens {
            if !span.contains(g) {
                span.extend(group, g);
                kept.push(g);
            }
        }
        Ok(Subgroup {
            group: group.clone(),
            elements: span.into_sorted().into(),
            generators: kept.into(),
        })
    }

    pub fn trivial(group: &Group) -> Self {
        Subgroup {
            group: group.clone(),
            elements: vec![0].into(),
            generators: Vec::new().into(),
        }
    }

    pub fn whole(group: &Group) -> Self {
        Self::from_sorted_elements(group, (0..group.order()).collect())
    }

    /// Wraps an already closed, sorted element list and extracts generators.
    pub(crate) fn from_sorted_elements(group: &Group, elements: Vec<usize>) -> Self {
        let mut span = Span::trivial(group.order());
        let mut gens = Vec::new();
        for &e in &elements {
            if !span.contains(e) {
                span.extend(group, e);
                gens.push(e);
            }
        }
        debug_assert_eq!(span.len(), elements.len(), "element list is not closed");
        Subgroup {
            group: group.clone(),
            elements: elements.into(),
            generators: gens.into(),
        }
    }

    pub(crate) fn from_membership(group: &Group, member: &[bool]) -> Self {
        let elements = member
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Self::from_sorted_elements(group, elements)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// `[G : H]`, the number of cosets.
    pub fn index(&self) -> usize {
        self.group.order() / self.order()
    }

    /// Sorted flat indices of the members.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn element_list(&self) -> Vec<GroupElement> {
        self.elements
            .iter()
            .map(|&index| GroupElement {
                group: self.group.clone(),
                index,
            })
            .collect()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        self.generators
            .iter()
            .map(|&index| GroupElement {
                group: self.group.clone(),
                index,
            })
            .collect()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.elements.binary_search(&index).is_ok()
    }

    pub fn contains_element(&self, g: &GroupElement) -> Result<bool> {
        self.group.ensure_same(g.group())?;
        Ok(self.contains(g.index()))
    }

    pub fn membership(&self) -> Vec<bool> {
        let mut m = vec![false; self.group.order()];
        for &e in self.elements.iter() {
            m[e] = true;
        }
        m
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.group == other.group
            && self.order() <= other.order()
            && self.elements.iter().all(|&e| other.contains(e))
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        self.group.ensure_same(&other.group)?;
        let (a, b) = (&self.elements, &other.elements);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Self::from_sorted_elements(&self.group, out))
    }

    /// `H + K`, the smallest subgroup containing both.
    pub fn join(&self, other: &Subgroup) -> Result<Subgroup> {
        self.group.ensure_same(&other.group)?;
        let gens: Vec<usize> = self
            .generators
            .iter()
            .chain(other.generators.iter())
            .copied()
            .collect();
        Self::generated_by_indices(&self.group, &gens)
    }

    /// `H^⊥ = { y : χ_y(h) = 1 for all h ∈ H }`, as a subgroup of `G`.
    pub fn annihilator(&self) -> Subgroup {
        let g = &self.group;
        let member: Vec<bool> = (0..g.order())
            .map(|y| {
                self.generators
                    .iter()
                    .all(|&h| g.phase_numerator(y, h) == 0)
            })
            .collect();
        Self::from_membership(g, &member)
    }

    pub fn coset_table(&self) -> CosetTable {
        CosetTable::new(self)
    }

    /// Short human-readable name: `dZn` for subgroups of a cyclic presentation
    /// (so `2Z12`, `12Z12`, `Z12`), generator tuples otherwise.
    pub fn describe(&self) -> String {
        let g = &self.group;
        if g.rank() == 1 {
            let n = g.order();
            let d = n / self.order();
            return if d == 1 {
                format!("Z{n}")
            } else {
                format!("{d}Z{n}")
            };
        }
        if self.order() == 1 {
            return "{0}".to_string();
        }
        let gens: Vec<String> = self.generators().iter().map(|e| e.to_string()).collect();
        format!("<{}>", gens.join(","))
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.group.hash(state);
        self.elements.hash(state);
    }
}

/// Canonical order: by subgroup order, then lexicographically by elements.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.group
            .factors()
            .cmp(other.group.factors())
            .then(self.order().cmp(&other.order()))
            .then_with(|| self.elements.cmp(&other.elements))
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} in {} {:?}",
            self.describe(),
            self.group,
            self.elements
        )
    }
}

impl Serialize for Subgroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.elements.len()))?;
        for e in self.elements.iter() {
            seq.serialize_element(e)?;
        }
        seq.end()
    }
}

/// Kernel `K_y = { g : χ_y(g) = 1 }` of the character labelled by `y`.
pub fn character_kernel(y: &GroupElement) -> Subgroup {
    let g = y.group();
    let member: Vec<bool> = (0..g.order())
        .map(|x| g.phase_numerator(y.index(), x) == 0)
        .collect();
    Subgroup::from_membership(g, &member)
}

/// Coset decomposition of `G` by a subgroup, with minimal-index
/// representatives.
#[derive(Clone, Debug)]
pub struct CosetTable {
    subgroup: Subgroup,
    representatives: Vec<usize>,
    coset_of: Vec<usize>,
}

impl CosetTable {
    fn new(h: &Subgroup) -> Self {
        let g = h.group();
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut representatives = Vec::with_capacity(h.index());
        for x in 0..g.order() {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let c = representatives.len();
            representatives.push(x);
            for &e in h.elements() {
                coset_of[g.add_idx(x, e)] = c;
            }
        }
        CosetTable {
            subgroup: h.clone(),
            representatives,
            coset_of,
        }
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn representative_elements(&self) -> Vec<GroupElement> {
        let g = self.subgroup.group();
        self.representatives
            .iter()
            .map(|&i| GroupElement {
                group: g.clone(),
                index: i,
            })
            .collect()
    }

    /// Position (in `representatives`) of the coset containing `index`.
    pub fn coset_of(&self, index: usize) -> usize {
        self.coset_of[index]
    }

    pub fn same_coset(&self, a: usize, b: usize) -> bool {
        self.coset_of[a] == self.coset_of[b]
    }

    /// Sorted members of coset number `c`.
    pub fn coset(&self, c: usize) -> Vec<usize> {
        let g = self.subgroup.group();
        let r = self.representatives[c];
        let mut v: Vec<usize> = self
            .subgroup
            .elements()
            .iter()
            .map(|&h| g.add_idx(r, h))
            .collect();
        v.sort_unstable();
        v
    }
}

/// Bounds for [`enumerate_subgroups_with`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimit {
    pub max_order: usize,
    pub max_subgroups: usize,
}

impl Default for EnumerationLimit {
    fn default() -> Self {
        EnumerationLimit {
            max_order: DEFAULT_MAX_ENUMERATION_ORDER,
            max_subgroups: DEFAULT_MAX_SUBGROUPS,
        }
    }
}

/// All subgroups of `group`, in canonical order, under the default bound.
pub fn enumerate_subgroups(group: &Group) -> Result<Vec<Subgroup>> {
    enumerate_subgroups_with(group, EnumerationLimit::default())
}

pub fn enumerate_subgroups_with(group: &Group, limit: EnumerationLimit) -> Result<Vec<Subgroup>> {
    if group.order() > limit.max_order {
        return Err(Error::EnumerationTooLarge {
            what: "group order",
            value: group.order(),
            limit: limit.max_order,
        });
    }
    let mut out = if group.is_cyclic() {
        cyclic_subgroups_fast(group)
    } else {
        lattice_closure(group, limit.max_subgroups)?
    };
    if out.len() > limit.max_subgroups {
        return Err(Error::EnumerationTooLarge {
            what: "subgroup count",
            value: out.len(),
            limit: limit.max_subgroups,
        });
    }
    out.sort();
    Ok(out)
}

fn cyclic_subgroups_fast(group: &Group) -> Vec<Subgroup> {
    let n = group.order();
    // (1, 1, …, 1) has order lcm(n_i) = n when the group is cyclic.
    let unit = group.encode(&vec![1; group.rank()]);
    divisors(n)
        .into_iter()
        .map(|d| {
            let gen = group.mul_idx(d as i64, unit);
            Subgroup::generated_by_indices(group, &[gen]).expect("in range")
        })
        .collect()
}

fn lattice_closure(group: &Group, max_subgroups: usize) -> Result<Vec<Subgroup>> {
    let n = group.order();
    let words = n.div_ceil(64);
    let key_of = |elements: &[usize]| {
        let mut key = vec![0u64; words];
        for &e in elements {
            key[e / 64] |= 1 << (e % 64);
        }
        key
    };

    let mut seen_cyclic: HashSet<Vec<u64>> = HashSet::new();
    let mut cyclic_gens = Vec::new();
    for g in 1..n {
        let c = Subgroup::generated_by_indices(group, &[g])?;
        if seen_cyclic.insert(key_of(&c.elements)) {
            cyclic_gens.push(g);
        }
    }
    // Translation tables x ↦ x + g, when they fit in a modest budget.
    let tables: Option<Vec<Vec<u32>>> = (cyclic_gens.len() * n <= 1 << 24).then(|| {
        cyclic_gens
            .iter()
            .map(|&g| (0..n).map(|x| group.add_idx(x, g) as u32).collect())
            .collect()
    });

    let trivial = Subgroup::trivial(group);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(key_of(&trivial.elements));
    let mut all = vec![trivial];
    let mut frontier = 0;
    while frontier < all.len() {
        let h = all[frontier].clone();
        frontier += 1;
        let member = h.membership();
        for (gi, &g) in cyclic_gens.iter().enumerate() {
            if member[g] {
                continue;
            }
            let mut span = Span {
                member: member.clone(),
                list: h.elements.to_vec(),
            };
            match &tables {
                Some(t) => span.extend_by(|x| t[gi][x] as usize),
                None => span.extend(group, g),
            }
            let key = key_of(&span.list);
            if !seen.insert(key) {
                continue;
            }
            let mut gens = h.generators.to_vec();
            gens.push(g);
            all.push(Subgroup {
                group: group.clone(),
                elements: span.into_sorted().into(),
                generators: gens.into(),
            });
            if all.len() > max_subgroups {
                return Err(Error::EnumerationTooLarge {
                    what: "subgroup count",
                    value: all.len(),
                    limit: max_subgroups,
                });
            }
        }
    }
    Ok(all)
}

/// One block `Z_{p^m}^ℓ` of the primary decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePowerComponent {
    pub prime: usize,
    pub exponent: u32,
    pub multiplicity: usize,
}

impl PrimePowerComponent {
    pub fn prime_power(&self) -> usize {
        self.prime.pow(self.exponent)
    }
}

/// Splits every cyclic factor into prime-power cyclic groups and collects
/// multiplicities, sorted by `(p, m)`.
pub fn decompose_prime_power(group: &Group) -> Vec<PrimePowerComponent> {
    let mut counts: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    for &n in group.factors() {
        for (p, m) in prime_factorization(n) {
            *counts.entry((p, m)).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .map(|((prime, exponent), multiplicity)| PrimePowerComponent {
            prime,
            exponent,
            multiplicity,
        })
        .collect()
}

/// Trial-division factorization, primes ascending.
pub fn prime_factorization(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = 0;
            while n.is_multiple_of(p) {
                n /= p;
                m += 1;
            }
            out.push((p, m));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// One representative of every isomorphism class of abelian groups of order
/// `n`, presented with prime-power factors.
pub fn abelian_groups_of_order(n: usize) -> Vec<Group> {
    let mut classes: Vec<Vec<usize>> = vec![Vec::new()];
    for (p, a) in prime_factorization(n) {
        let mut next = Vec::new();
        for partition in partitions(a) {
            for base in &classes {
                let mut f = base.clone();
                f.extend(partition.iter().map(|&k| p.pow(k)));
                next.push(f);
            }
        }
        classes = next;
    }
    classes.into_iter().map(Group::from_normalized).collect()
}

/// Every abelian group (up to isomorphism) of order `2..=max_order`.
pub fn abelian_groups_up_to(max_order: usize) -> Vec<Group> {
    (2..=max_order).flat_map(abelian_groups_of_order).collect()
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            go(rem - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}
