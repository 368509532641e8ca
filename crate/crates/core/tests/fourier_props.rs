use std::f64::consts::TAU;

use hsp_core::fourier::{char_sum, chi_eval, fourier_basis_state, inverse_qft, qft, qft_apply};
use hsp_core::group::{abelian_groups_up_to, enumerate_subgroups, Group};
use hsp_core::states::StateVector;
use num_complex::Complex64;
use proptest::prelude::*;

/// Dense character matrix built straight from residues:
/// `M[y][g] = exp(2πi Σ y_i g_i / n_i) / √|G|`.
fn naive_inverse(g: &Group, v: &[Complex64]) -> Vec<Complex64> {
    let n = g.order();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|y| {
            let ry = g.decode(y);
            (0..n)
                .map(|x| {
                    let rx = g.decode(x);
                    let phase: f64 = ry
                        .iter()
                        .zip(&rx)
                        .zip(g.factors())
                        .map(|((a, b), m)| (a * b) as f64 / *m as f64)
                        .sum();
                    Complex64::from_polar(scale, TAU * phase) * v[x]
                })
                .sum()
        })
        .collect()
}

fn random_state(g: &Group, seed: u64) -> StateVector {
    // splitmix-style stream; only needs to be deterministic
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ((z ^ (z >> 31)) as f64 / u64::MAX as f64) - 0.5
    };
    let mut amps: Vec<Complex64> = (0..g.order())
        .map(|_| Complex64::new(next(), next()))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    StateVector::from_amplitudes(g, amps).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn axis_transform_matches_character_matrix() {
    for g in abelian_groups_up_to(144).into_iter().step_by(3) {
        for seed in 0..3 {
            let s = random_state(&g, seed);
            let fast = inverse_qft(&s);
            assert!(
                max_diff(fast.amplitudes(), &naive_inverse(&g, s.amplitudes())) < 1e-10,
                "{g}"
            );
        }
    }
}

#[test]
fn shift_eigenbasis_up_to_72() {
    for g in abelian_groups_up_to(72) {
        let basis: Vec<StateVector> = g.elements().map(|y| fourier_basis_state(&y)).collect();
        for s in g.elements() {
            for (y, ket) in g.elements().zip(&basis) {
                let shifted = ket.shifted(&s).unwrap();
                let phase = chi_eval(&y, &s).unwrap();
                let want: Vec<Complex64> = ket.amplitudes().iter().map(|a| a * phase).collect();
                assert!(
                    max_diff(shifted.amplitudes(), &want) < 1e-10,
                    "{g} y={y} s={s}"
                );
            }
        }
    }
}

#[test]
fn fourier_basis_orthonormal_up_to_72() {
    for g in abelian_groups_up_to(72) {
        let basis: Vec<StateVector> = g.elements().map(|y| fourier_basis_state(&y)).collect();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ip = a.inner(b).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn subgroup_character_sums_are_zero_or_order() {
    for g in abelian_groups_up_to(72) {
        for h in enumerate_subgroups(&g).unwrap() {
            let xs = h.element_list();
            let ann = h.annihilator();
            for y in g.elements() {
                let s = char_sum(&y, &xs).unwrap();
                assert!(s.im.abs() < 1e-9);
                let want = if ann.contains(y.index()) {
                    h.order() as f64
                } else {
                    0.0
                };
                assert!((s.re - want).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn characters_are_multiplicative_unit_and_symmetric() {
    for g in abelian_groups_up_to(36) {
        for y in g.elements() {
            for a in g.elements() {
                let ca = chi_eval(&y, &a).unwrap();
                assert!((ca.norm() - 1.0).abs() < 1e-12);
                assert!((ca - chi_eval(&a, &y).unwrap()).norm() < 1e-12);
                for b in g.elements().step_by(5) {
                    let lhs = chi_eval(&y, &a.add(&b).unwrap()).unwrap();
                    assert!((lhs - ca * chi_eval(&y, &b).unwrap()).norm() < 1e-12);
                }
            }
        }
    }
}

fn factors_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1i64..13, 1..4)
        .prop_filter("at most 144", |f| f.iter().product::<i64>() <= 144)
}

proptest! {
    #[test]
    fn unitary_and_invertible(f in factors_strategy(), seed in any::<u64>()) {
        let g = Group::new(&f).unwrap();
        let s = random_state(&g, seed);
        let fwd = qft_apply(&s, false);
        prop_assert!((fwd.norm() - 1.0).abs() < 1e-12);
        prop_assert!(inverse_qft(&fwd).max_abs_diff(&s).unwrap() < 1e-12);
        prop_assert!(qft(&inverse_qft(&s)).max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn random_states_match_oracle(f in factors_strategy(), seed in any::<u64>()) {
        let g = Group::new(&f).unwrap();
        let s = random_state(&g, seed);
        prop_assert!(max_diff(inverse_qft(&s).amplitudes(), &naive_inverse(&g, s.amplitudes())) < 1e-10);
    }
}
