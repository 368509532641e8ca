use hsp_core::group::{abelian_groups_up_to, enumerate_subgroups, Group};
use hsp_core::pac::{
    additivity_audit, binary_examples, max_shattered_size, relation, sample_complexity,
    shattering_check, vc_dimension, vc_report,
};
use hsp_core::rng::SplitRng;
use hsp_core::states::TrainingSet;
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::Rng;

/// Largest `k` such that some set of `k` distinct non-zero differences has all
/// `2^k` membership patterns realized by subgroups.
fn shatter_by_labelings(g: &Group) -> usize {
    let subs: Vec<Vec<bool>> = enumerate_subgroups(g)
        .unwrap()
        .iter()
        .map(|h| h.membership())
        .collect();
    let n = g.order();
    let mut best = 0;
    let mut k = 1;
    loop {
        let mut found = false;
        let mut idx: Vec<usize> = (1..=k).collect();
        while !idx.is_empty() && *idx.last().unwrap() < n {
            let mut seen = vec![false; 1 << k];
            for m in &subs {
                let mask = idx
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| m[d])
                    .fold(0, |a, (i, _)| a | 1 << i);
                seen[mask] = true;
            }
            if seen.iter().all(|&s| s) {
                found = true;
                break;
            }
            // next k-combination of 1..n
            let mut i = k;
            while i > 0 && idx[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
        if !found {
            return best;
        }
        best = k;
        k += 1;
        if k >= n {
            return best;
        }
    }
}

#[test]
fn closed_form_matches_search_up_to_72() {
    for g in abelian_groups_up_to(72) {
        let r = vc_report(&g, true).unwrap();
        assert_eq!(
            r.agrees(),
            Some(true),
            "{g}: closed {} search {:?}",
            r.vc_closed_form,
            r.vc_brute_force
        );
    }
}

#[test]
fn search_matches_labeling_enumeration_up_to_16() {
    for g in abelian_groups_up_to(16) {
        assert_eq!(
            max_shattered_size(&g).unwrap(),
            shatter_by_labelings(&g),
            "{g}"
        );
        assert_eq!(vc_dimension(&g), shatter_by_labelings(&g), "{g}");
    }
}

#[test]
fn binary_examples_encode_the_relation() {
    let mut rng = SplitRng::seed_from(3);
    for g in abelian_groups_up_to(30) {
        for h in enumerate_subgroups(&g).unwrap() {
            let n = rng.random_range(1..=g.order().min(8));
            let t =
                TrainingSet::labelled_by(&h, &sample(&mut rng, g.order(), n).into_vec()).unwrap();
            let ex = binary_examples(&t);
            assert_eq!(ex.len(), n * (n - 1) / 2);
            for e in ex {
                assert_eq!(e.same_coset, relation(&h, &e.g, &e.g2).unwrap());
            }
        }
    }
}

#[test]
fn additivity_audit_is_reported() {
    let records = additivity_audit(72).unwrap();
    assert!(!records.is_empty());
    let mismatches: Vec<String> = records
        .iter()
        .filter(|r| !r.agrees)
        .map(|r| {
            format!(
                "{} ⊕ {}: {} vs {}+{}",
                r.left, r.right, r.mu_sum, r.mu_left, r.mu_right
            )
        })
        .collect();
    // counterexamples are surfaced, not treated as failures
    if !mismatches.is_empty() {
        eprintln!("additivity counterexamples: {mismatches:?}");
    }
    for r in &records {
        assert_eq!(r.agrees, r.mu_sum == r.mu_left + r.mu_right);
    }
}

#[test]
fn sample_complexity_is_monotone() {
    let g = Group::cyclic(12);
    let mut last = 0;
    for eps in [0.5, 0.2, 0.1, 0.05, 0.01] {
        let s = sample_complexity(&g, eps, 0.05, 1.0).unwrap();
        assert!(s.n_bin > last);
        assert!(s.n_labeled * s.n_labeled >= 2 * s.n_bin);
        last = s.n_bin;
    }
    let loose = sample_complexity(&g, 0.1, 0.5, 1.0).unwrap();
    let tight = sample_complexity(&g, 0.1, 0.001, 1.0).unwrap();
    assert!(tight.n_bin > loose.n_bin);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn relation_is_an_equivalence(gi in 0usize..100, seed in any::<u64>()) {
        let groups = abelian_groups_up_to(60);
        let g = &groups[gi % groups.len()];
        let mut rng = SplitRng::seed_from(seed);
        let subs = enumerate_subgroups(g).unwrap();
        let h = &subs[rng.random_range(0..subs.len())];
        let mut pick = || g.element_at(rng.random_range(0..g.order())).unwrap();
        let (a, b, c) = (pick(), pick(), pick());
        prop_assert!(relation(h, &a, &a).unwrap());
        prop_assert_eq!(relation(h, &a, &b).unwrap(), relation(h, &b, &a).unwrap());
        if relation(h, &a, &b).unwrap() && relation(h, &b, &c).unwrap() {
            prop_assert!(relation(h, &a, &c).unwrap());
        }
    }

    #[test]
    fn shattering_criteria_agree(gi in 0usize..100, seed in any::<u64>(), k in 1usize..5) {
        let groups = abelian_groups_up_to(48);
        let g = &groups[gi % groups.len()];
        let mut rng = SplitRng::seed_from(seed);
        let gamma: Vec<_> = (0..k)
            .map(|_| {
                let a = g.element_at(rng.random_range(0..g.order())).unwrap();
                let b = g.element_at(rng.random_range(0..g.order())).unwrap();
                (a, b)
            })
            .collect();
        // Err(ShatteringDisagreement) would mean the two criteria differ
        let shattered = shattering_check(g, &gamma).unwrap();
        if shattered {
            prop_assert!(k <= vc_dimension(g));
        }
    }
}
