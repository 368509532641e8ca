//! The standard abelian HSP routine: Fourier sampling of coset states and
//! kernel-intersection post-processing.
//!
//! Labels are drawn either directly (uniform over `H^⊥`) or by full
//! simulation (random coset state, inverse QFT, measurement). The solver
//! keeps the running intersection `K = ∩_t K_{y_t}` as a bitset and stops
//! once `K` has been unchanged for `c` consecutive samples.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier;
use crate::group::{Group, GroupElement, Subgroup};
use crate::states::coset_state;

/// Draws labels uniformly from `H^⊥`.
#[derive(Clone, Debug)]
pub struct DirectSampler {
    annihilator: Subgroup,
}

impl DirectSampler {
    pub fn new(h: &Subgroup) -> Self {
        DirectSampler {
            annihilator: h.annihilator(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let e = self.annihilator.elements();
        e[rng.random_range(0..e.len())]
    }
}

/// Draws labels by preparing a uniformly random coset state, applying the
/// inverse QFT and measuring.
#[derive(Clone, Debug)]
pub struct SimulatedSampler {
    hidden: Subgroup,
}

impl SimulatedSampler {
    pub fn new(h: &Subgroup) -> Self {
        SimulatedSampler { hidden: h.clone() }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let g = self.hidden.group();
        let r = g
            .element_at(rng.random_range(0..g.order()))
            .expect("in range");
        let state = coset_state(&r, &self.hidden).expect("same group");
        let probs: Vec<f64> = fourier::inverse_qft(&state)
            .probabilities()
            .into_iter()
            // Exact zeros are numerically ~1e-33; drop them so they are never drawn.
            .map(|p| if p < 1e-12 { 0.0 } else { p })
            .collect();
        WeightedIndex::new(&probs)
            .expect("non-degenerate distribution")
            .sample(rng)
    }
}

/// One label from the Fourier sampling distribution of a coset state of `h`.
pub fn fourier_sample_label<R: Rng + ?Sized>(h: &Subgroup, rng: &mut R) -> GroupElement {
    let y = DirectSampler::new(h).sample(rng);
    h.group().element_at(y).expect("in range")
}

/// As [`fourier_sample_label`] but through the full state simulation.
pub fn fourier_sample_label_simulated<R: Rng + ?Sized>(h: &Subgroup, rng: &mut R) -> GroupElement {
    let y = SimulatedSampler::new(h).sample(rng);
    h.group().element_at(y).expect("in range")
}

/// Record of one kernel-intersection run.
#[derive(Clone, Debug, Serialize)]
pub struct SolverRun {
    /// Observed labels, as flat indices.
    pub samples: Vec<usize>,
    /// `|K|` after each sample.
    pub kernel_orders: Vec<usize>,
    pub stop_streak: usize,
    pub result: Subgroup,
    /// True when the loop stopped on the streak rule.
    pub stabilized: bool,
    /// True when `max_steps` was reached first.
    pub timed_out: bool,
    /// Comparison with ground truth, when supplied.
    pub success: Option<bool>,
}

/// Bit-level outcome of [`KernelIntersection::run_bits`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitRun {
    pub steps: usize,
    pub stabilized: bool,
}

/// Reusable kernel-intersection engine with cached kernel bitsets.
#[derive(Clone, Debug)]
pub struct KernelIntersection {
    group: Group,
    words: usize,
    kernels: Vec<u64>,
    cached: Vec<bool>,
}

impl KernelIntersection {
    pub fn new(group: &Group) -> Self {
        let words = group.order().div_ceil(64);
        KernelIntersection {
            group: group.clone(),
            words,
            kernels: vec![0; words * group.order()],
            cached: vec![false; group.order()],
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    fn kernel(&mut self, y: usize) -> &[u64] {
        let w = self.words;
        if !self.cached[y] {
            let slot = &mut self.kernels[y * w..(y + 1) * w];
            for x in 0..self.group.order() {
                if self.group.phase_numerator(y, x) == 0 {
                    slot[x / 64] |= 1 << (x % 64);
                }
            }
            self.cached[y] = true;
        }
        &self.kernels[y * w..(y + 1) * w]
    }

    /// Runs the intersection loop, leaving the final kernel in `out`.
    /// Labels must be valid flat indices.
    pub fn run_bits<F: FnMut() -> usize>(
        &mut self,
        mut sampler: F,
        c: usize,
        max_steps: usize,
        out: &mut Vec<u64>,
        mut observe: impl FnMut(usize, &[u64]),
    ) -> BitRun {
        out.clear();
        out.resize(self.words, 0);
        fill_all(out, self.group.order());
        let mut streak = 0;
        for step in 1..=max_steps {
            let y = sampler();
            let k = self.kernel(y);
            let mut changed = false;
            for (o, kw) in out.iter_mut().zip(k) {
                let nw = *o & kw;
                changed |= nw != *o;
                *o = nw;
            }
            observe(y, out);
            if changed {
                streak = 0;
            } else {
                streak += 1;
                if streak >= c {
                    return BitRun {
                        steps: step,
                        stabilized: true,
                    };
                }
            }
        }
        BitRun {
            steps: max_steps,
            stabilized: false,
        }
    }

    /// Full run with per-step bookkeeping.
    pub fn solve<F: FnMut() -> usize>(
        &mut self,
        mut sampler: F,
        c: usize,
        max_steps: usize,
        truth: Option<&Subgroup>,
    ) -> Result<SolverRun> {
        check_positive("c", c)?;
        check_positive("max_steps", max_steps)?;
        if let Some(h) = truth {
            self.group.ensure_same(h.group())?;
        }
        let order = self.group.order();
        let mut samples = Vec::new();
        let mut kernel_orders = Vec::new();
        let mut bad_label = None;
        let mut bits = Vec::new();
        let run = self.run_bits(
            || {
                let y = sampler();
                if y >= order {
                    bad_label.get_or_insert(y);
                    0
                } else {
                    y
                }
            },
            c,
            max_steps,
            &mut bits,
            |y, k| {
                samples.push(y);
                kernel_orders.push(k.iter().map(|w| w.count_ones() as usize).sum());
            },
        );
        if let Some(index) = bad_label {
            return Err(Error::IndexOutOfRange { index, order });
        }
        let member: Vec<bool> = (0..order)
            .map(|x| bits[x / 64] >> (x % 64) & 1 == 1)
            .collect();
        let result = Subgroup::from_membership(&self.group, &member);
        let success = truth.map(|h| *h == result);
        Ok(SolverRun {
            samples,
            kernel_orders,
            stop_streak: c,
            result,
            stabilized: run.stabilized,
            timed_out: !run.stabilized,
            success,
        })
    }
}

fn fill_all(bits: &mut [u64], n: usize) {
    for (i, w) in bits.iter_mut().enumerate() {
        let lo = i * 64;
        *w = if lo + 64 <= n {
            u64::MAX
        } else {
            (1u64 << (n - lo)) - 1
        };
    }
}

/// Membership bitset of a subgroup, in the layout used by
/// [`KernelIntersection::run_bits`].
pub fn subgroup_bits(h: &Subgroup) -> Vec<u64> {
    let mut bits = vec![0u64; h.group().order().div_ceil(64)];
    for &e in h.elements() {
        bits[e / 64] |= 1 << (e % 64);
    }
    bits
}

fn check_positive(name: &'static str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::OutOfRange {
            name,
            reason: "must be at least 1".into(),
        })
    } else {
        Ok(())
    }
}

/// Intersects character kernels of sampled labels until the running
/// intersection is unchanged for `c` consecutive samples or `max_steps`
/// samples have been drawn.
pub fn kernel_intersection_solve<F: FnMut() -> usize>(
    group: &Group,
    sampler: F,
    c: usize,
    max_steps: usize,
) -> Result<SolverRun> {
    KernelIntersection::new(group).solve(sampler, c, max_steps, None)
}

/// Advisory sample budget `⌈log₂|G|⌉·⌈log₂ δ⁻¹⌉ + ⌈log₂ δ⁻¹⌉`, at least 1.
pub fn recommended_samples(order: usize, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            reason: format!("must lie in (0, 1), got {delta}"),
        });
    }
    let log_order = if order <= 1 {
        0
    } else {
        (usize::BITS - (order - 1).leading_zeros()) as usize
    };
    let log_delta = (1.0 / delta).log2().ceil() as usize;
    Ok((log_order * log_delta + log_delta).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitRng;

    fn z12() -> Group {
        Group::cyclic(12)
    }

    fn mults(d: i64) -> Subgroup {
        let g = z12();
        Subgroup::generated(&g, &[g.element(&[d]).unwrap()]).unwrap()
    }

    fn scripted(labels: Vec<usize>) -> impl FnMut() -> usize {
        let mut i = 0;
        move || {
            let y = labels[i % labels.len()];
            i += 1;
            y
        }
    }

    #[test]
    fn sample_label_supports() {
        let g = z12();
        let mut rng = SplitRng::seed_from(11);
        let whole = Subgroup::whole(&g);
        for _ in 0..20 {
            assert!(fourier_sample_label(&whole, &mut rng).is_identity());
            let y = fourier_sample_label(&mults(2), &mut rng).index();
            assert!(y == 0 || y == 6);
            let y = fourier_sample_label_simulated(&mults(2), &mut rng).index();
            assert!(y == 0 || y == 6);
        }
        let mut seen = [false; 12];
        for _ in 0..500 {
            seen[fourier_sample_label(&Subgroup::trivial(&g), &mut rng).index()] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn scripted_walkthrough() {
        let g = z12();
        let run = kernel_intersection_solve(&g, scripted(vec![0, 6]), 4, 100).unwrap();
        assert_eq!(run.result, mults(2));
        assert!(run.stabilized);
        let run = kernel_intersection_solve(&g, scripted(vec![3]), 2, 100).unwrap();
        assert_eq!(run.result, mults(4));
        assert_eq!(run.kernel_orders, vec![3, 3, 3]);
    }

    #[test]
    fn whole_group_stops_after_c() {
        let g = z12();
        let mut rng = SplitRng::seed_from(2);
        let s = DirectSampler::new(&Subgroup::whole(&g));
        for c in 1..6 {
            let run = kernel_intersection_solve(&g, || s.sample(&mut rng), c, 100).unwrap();
            assert_eq!(run.samples.len(), c);
            assert_eq!(run.result, Subgroup::whole(&g));
        }
    }

    #[test]
    fn timeout_flag() {
        let g = z12();
        let run = kernel_intersection_solve(&g, scripted(vec![6, 4, 3, 1]), 3, 3).unwrap();
        assert!(run.timed_out);
        assert!(!run.stabilized);
    }

    #[test]
    fn arguments_checked() {
        let g = z12();
        assert!(kernel_intersection_solve(&g, || 0, 0, 5).is_err());
        assert!(kernel_intersection_solve(&g, || 0, 1, 0).is_err());
        assert!(matches!(
            kernel_intersection_solve(&g, || 99, 1, 5),
            Err(Error::IndexOutOfRange { index: 99, .. })
        ));
    }

    #[test]
    fn recommended_sample_counts() {
        assert_eq!(recommended_samples(12, 0.5).unwrap(), 5);
        assert_eq!(recommended_samples(2, 0.5).unwrap(), 2);
        assert!(recommended_samples(1, 0.999_999).unwrap() >= 1);
        assert!(recommended_samples(12, 0.0).is_err());
        assert!(recommended_samples(12, 1.0).is_err());
    }
}
