//! Characters of finite abelian groups and the group quantum Fourier
//! transform.
//!
//! Convention: `χ_y(g) = exp(2πi Σ y_i g_i / n_i)` and the Fourier basis ket
//! `|ŷ⟩` has computational amplitudes `conj(χ_y(g)) / √|G|`, so
//! `⟨ŷ|g⟩ = χ_y(g) / √|G|`. The forward transform maps `|y⟩ ↦ |ŷ⟩`; the
//! inverse transform rewrites a state in the Fourier basis, and squared
//! moduli of its output are Fourier sampling probabilities.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::states::StateVector;

/// The character `χ_y` labelled by a group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    label: GroupElement,
}

impl Character {
    pub fn new(label: GroupElement) -> Self {
        Character { label }
    }

    pub fn label(&self) -> &GroupElement {
        &self.label
    }

    pub fn group(&self) -> &Group {
        self.label.group()
    }

    pub fn eval(&self, g: &GroupElement) -> Result<Complex64> {
        chi_eval(&self.label, g)
    }

    pub fn sum(&self, xs: &[GroupElement]) -> Result<Complex64> {
        char_sum(&self.label, xs)
    }
}

#[inline]
pub(crate) fn chi_idx(group: &Group, y: usize, g: usize) -> Complex64 {
    let m = group.phase_numerator(y, g);
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, TAU * m as f64 / group.exponent() as f64)
}

/// `χ_y(g)`.
pub fn chi_eval(y: &GroupElement, g: &GroupElement) -> Result<Complex64> {
    y.group().ensure_same(g.group())?;
    Ok(chi_idx(y.group(), y.index(), g.index()))
}

/// Unnormalized character sum `Σ_{x∈X} χ_y(x)`.
pub fn char_sum(y: &GroupElement, xs: &[GroupElement]) -> Result<Complex64> {
    if xs.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for x in xs {
        acc += chi_eval(y, x)?;
    }
    Ok(acc)
}

/// The Fourier basis ket `|ŷ⟩` in computational amplitudes.
pub fn fourier_basis_state(y: &GroupElement) -> StateVector {
    let g = y.group();
    let scale = 1.0 / (g.order() as f64).sqrt();
    let amps = (0..g.order())
        .map(|x| chi_idx(g, y.index(), x).conj() * scale)
        .collect();
    StateVector::from_amplitudes(g, amps).expect("dimension matches")
}

/// Applies the forward (`inverse = false`) or inverse QFT.
pub fn qft_apply(state: &StateVector, inverse: bool) -> StateVector {
    let mut amps = state.amplitudes().to_vec();
    transform_in_place(state.group(), &mut amps, inverse).expect("dimension matches");
    StateVector::from_amplitudes(state.group(), amps).expect("dimension matches")
}

/// Forward QFT: `(F a)_g = Σ_y conj(χ_y(g)) a_y / √|G|`.
pub fn qft(state: &StateVector) -> StateVector {
    qft_apply(state, false)
}

/// Inverse QFT: `(F† b)_y = Σ_g χ_y(g) b_g / √|G|`.
pub fn inverse_qft(state: &StateVector) -> StateVector {
    qft_apply(state, true)
}

/// In-place QFT on raw amplitudes, one cyclic axis at a time.
pub fn transform_in_place(group: &Group, amps: &mut [Complex64], inverse: bool) -> Result<()> {
    if amps.len() != group.order() {
        return Err(Error::DimensionMismatch {
            expected: group.order(),
            got: amps.len(),
        });
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let factors = group.factors();
    let mut stride = group.order();
    let mut scratch = Vec::new();
    for &n in factors {
        stride /= n;
        let scale = 1.0 / (n as f64).sqrt();
        let roots: Vec<Complex64> = (0..n)
            .map(|m| Complex64::from_polar(scale, sign * TAU * m as f64 / n as f64))
            .collect();
        scratch.resize(n, Complex64::new(0.0, 0.0));
        let block = n * stride;
        for base in (0..amps.len()).step_by(block) {
            for inner in 0..stride {
                let off = base + inner;
                for (k, s) in scratch.iter_mut().enumerate() {
                    *s = amps[off + k * stride];
                }
                for out in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut m = 0;
                    for s in scratch.iter() {
                        acc += roots[m] * s;
                        m += out;
                        if m >= n {
                            m -= n;
                        }
                    }
                    amps[off + out * stride] = acc;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Subgroup;

    const TOL: f64 = 1e-10;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn chi_examples() {
        let g = Group::cyclic(12);
        let e = |k| g.element(&[k]).unwrap();
        assert!(close(
            chi_eval(&e(1), &e(6)).unwrap(),
            Complex64::new(-1.0, 0.0),
            TOL
        ));
        assert!(close(
            chi_eval(&e(4), &e(3)).unwrap(),
            Complex64::new(1.0, 0.0),
            TOL
        ));

        let h = Group::new(&[4, 3]).unwrap();
        let y = h.element(&[1, 1]).unwrap();
        let x = h.element(&[2, 1]).unwrap();
        let expected = Complex64::from_polar(1.0, TAU * (2.0 / 4.0 + 1.0 / 3.0));
        assert!(close(chi_eval(&y, &x).unwrap(), expected, TOL));
        assert!(chi_eval(&y, &e(1)).is_err());
    }

    #[test]
    fn char_sum_examples() {
        let g = Group::cyclic(12);
        let h = Subgroup::generated(&g, &[g.element(&[2]).unwrap()]).unwrap();
        let xs = h.element_list();
        let e = |k| g.element(&[k]).unwrap();
        assert!(close(
            char_sum(&e(1), &xs).unwrap(),
            Complex64::new(0.0, 0.0),
            1e-9
        ));
        assert!(close(
            char_sum(&e(0), &xs).unwrap(),
            Complex64::new(6.0, 0.0),
            1e-9
        ));
        assert!(close(
            char_sum(&e(6), &xs).unwrap(),
            Complex64::new(6.0, 0.0),
            1e-9
        ));
        assert_eq!(char_sum(&e(1), &[]), Err(Error::EmptySet));
    }

    #[test]
    fn uniform_goes_to_zero_label() {
        let g = Group::new(&[4, 3]).unwrap();
        let all: Vec<usize> = (0..12).collect();
        let s = StateVector::uniform(&g, &all).unwrap();
        let out = inverse_qft(&s);
        assert!((out.amplitudes()[0].re - 1.0).abs() < TOL);
        let out = qft(&s);
        assert!((out.amplitudes()[0].re - 1.0).abs() < TOL);
    }

    #[test]
    fn forward_maps_basis_to_fourier_ket() {
        let g = Group::new(&[2, 6]).unwrap();
        for y in g.elements() {
            let basis = StateVector::basis(&g, y.index()).unwrap();
            let lhs = qft(&basis);
            let rhs = fourier_basis_state(&y);
            assert!(lhs.max_abs_diff(&rhs).unwrap() < TOL);
        }
    }

    #[test]
    fn dimension_checked() {
        let g = Group::cyclic(5);
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        assert!(matches!(
            transform_in_place(&g, &mut v, false),
            Err(Error::DimensionMismatch {
                expected: 5,
                got: 4
            })
        ));
    }
}
