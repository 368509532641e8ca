use hsp_core::group::{abelian_groups_up_to, enumerate_subgroups, Group};
use hsp_core::leakage::{
    annihilator_mass, annihilator_mass_simulated, coset_size_vector, expected_uniform_mass,
    false_signal_mass, leakage_report, snr,
};
use hsp_core::rng::SplitRng;
use hsp_core::states::TrainingSet;
use hsp_core::Subgroup;
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::Rng;

fn uniform_set(h: &Subgroup, n: usize, rng: &mut SplitRng) -> TrainingSet {
    TrainingSet::labelled_by(h, &sample(rng, h.group().order(), n).into_vec()).unwrap()
}

fn cyclic_sub(n: usize, step: i64) -> Subgroup {
    let g = Group::cyclic(n);
    Subgroup::generated(&g, &[g.element(&[step]).unwrap()]).unwrap()
}

/// Least-squares slope and R² of `y` on `x`.
fn regression(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

#[test]
fn closed_form_mass_matches_simulation_up_to_72() {
    let mut rng = SplitRng::seed_from(41);
    for g in abelian_groups_up_to(72) {
        let subs = enumerate_subgroups(&g).unwrap();
        for _ in 0..4 {
            let h = &subs[rng.random_range(0..subs.len())];
            let n = rng.random_range(1..=g.order());
            let t = uniform_set(h, n, &mut rng);
            let p = annihilator_mass(&t, h).unwrap();
            let sim = annihilator_mass_simulated(&t, h).unwrap();
            assert!((p - sim).abs() < 1e-10, "{g} {}", h.describe());
            assert!((0.0..=1.0 + 1e-12).contains(&p));
        }
    }
}

#[test]
fn norm_bounds_hold() {
    let mut rng = SplitRng::seed_from(43);
    for g in abelian_groups_up_to(72) {
        for h in enumerate_subgroups(&g).unwrap().iter().step_by(3) {
            let n = rng.random_range(1..=g.order());
            let t = uniform_set(h, n, &mut rng);
            let w = coset_size_vector(&t, h).unwrap();
            let l1: f64 = w.iter().sum();
            let l2: f64 = w.iter().map(|x| x * x).sum();
            let n = n as f64;
            assert!((l1 - n).abs() < 1e-9);
            assert!(n * n * h.order() as f64 / g.order() as f64 <= l2 + 1e-9);
            assert!(l2 <= n * n + 1e-9);
        }
    }
}

#[test]
fn mean_mass_matches_uniform_expectation() {
    let h = cyclic_sub(60, 5);
    for n in [2usize, 6, 20, 45] {
        let draws = 2000;
        let mean: f64 = (0..draws)
            .map(|seed| {
                annihilator_mass(&uniform_set(&h, n, &mut SplitRng::seed_from(seed)), &h).unwrap()
            })
            .sum::<f64>()
            / draws as f64;
        let want = expected_uniform_mass(60, h.order(), n);
        assert!((mean - want).abs() < 0.01, "n={n} mean {mean} want {want}");
    }
}

#[test]
fn snr_grows_linearly_in_sample_size() {
    // Regresses the seed-averaged SNR at each N; single draws are dominated by
    // coset-count noise when H has few cosets.
    for (order, step) in [(128usize, 2i64), (256, 4), (192, 6), (64, 2), (96, 3)] {
        let h = cyclic_sub(order, step);
        assert!(h.order() >= 32);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for n in 2..=h.order() / 2 {
            let mean = (0..200u64)
                .map(|seed| {
                    let mut rng = SplitRng::seed_from(seed ^ (n as u64) << 32);
                    snr(&uniform_set(&h, n, &mut rng), &h).unwrap()
                })
                .sum::<f64>()
                / 200.0;
            xs.push(n as f64);
            ys.push(mean);
        }
        let (slope, r2) = regression(&xs, &ys);
        assert!(slope > 0.0, "{order}/{step}");
        assert!(r2 >= 0.8, "{order}/{step}: R² = {r2}");
    }
}

#[test]
fn false_signal_bias_is_the_finite_population_term() {
    // Without replacement, each character outside H^⊥ has expected mass
    // (1 − (N−1)/(|G|−1))/|G| rather than 1/|G|, so
    // E[exact − approx] = −(1/|H̃| − 1/|H̃∩|)(N−1)/(|G|−1).
    let h = cyclic_sub(48, 8);
    let g = h.group().clone();
    let subs = enumerate_subgroups(&g).unwrap();
    let draws = 400;
    for n in [4usize, 12, 24, 40] {
        let sets: Vec<TrainingSet> = (0..draws)
            .map(|seed| uniform_set(&h, n, &mut SplitRng::seed_from(seed)))
            .collect();
        for cand in &subs {
            let cap = cand
                .annihilator()
                .intersection(&h.annihilator())
                .unwrap()
                .annihilator();
            let lead = 1.0 / cand.order() as f64 - 1.0 / cap.order() as f64;
            let want = -lead * (n as f64 - 1.0) / (g.order() as f64 - 1.0);
            let mean = sets
                .iter()
                .map(|t| {
                    let (e, a) = false_signal_mass(t, cand, &h).unwrap();
                    e - a
                })
                .sum::<f64>()
                / draws as f64;
            assert!(
                (mean - want).abs() < 0.1 * lead.abs() + 1e-12,
                "n={n} {}: {mean} vs {want}",
                cand.describe()
            );
        }
    }
}

#[test]
fn report_is_consistent() {
    let h = cyclic_sub(12, 2);
    let t = TrainingSet::labelled_by(&h, &[0, 2, 3]).unwrap();
    let cands = enumerate_subgroups(h.group()).unwrap();
    let r = leakage_report(&t, &h, &cands).unwrap();
    assert_eq!(r.training_size, 3);
    assert_eq!(r.coset_size_vector.iter().sum::<f64>(), 3.0);
    assert!((r.p_true - r.p_true_simulated).abs() < 1e-10);
    let own = r.false_signals.iter().find(|f| f.candidate == h).unwrap();
    assert!((own.p_exact - r.p_true).abs() < 1e-10);
    assert!((own.p_approx - r.p_true).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_identity_with_multiplicities(gi in 0usize..100, seed in any::<u64>()) {
        let groups = abelian_groups_up_to(48);
        let g = &groups[gi % groups.len()];
        let mut rng = SplitRng::seed_from(seed);
        let subs = enumerate_subgroups(g).unwrap();
        let h = &subs[rng.random_range(0..subs.len())];
        let n = rng.random_range(1..=g.order());
        let counted: Vec<(usize, usize)> = sample(&mut rng, g.order(), n)
            .into_iter()
            .map(|x| (x, rng.random_range(1..5)))
            .collect();
        let t = TrainingSet::labelled_by_counts(h, &counted).unwrap();
        let p = annihilator_mass(&t, h).unwrap();
        prop_assert!((p - annihilator_mass_simulated(&t, h).unwrap()).abs() < 1e-10);
    }
}
