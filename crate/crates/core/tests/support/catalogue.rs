//! Catalogue instances over ℚ and ℚ(√2) used across tests.
#![allow(dead_code)]

use hermsig_core::algebra::AlgebraWithInvolution;
use hermsig_core::NumberField;

pub fn rationals() -> NumberField {
    NumberField::rationals()
}

pub fn sqrt2() -> NumberField {
    NumberField::from_int_coeffs(&[-2, 0, 1]).unwrap()
}

pub fn sqrt3() -> NumberField {
    NumberField::from_int_coeffs(&[-3, 0, 1]).unwrap()
}

pub fn cbrt2() -> NumberField {
    NumberField::from_int_coeffs(&[-2, 0, 0, 1]).unwrap()
}

/// One instance per family and matrix size, with parameters that make some
/// orderings nil over ℚ(√2).
pub fn instances(f: &NumberField) -> Vec<AlgebraWithInvolution> {
    let m1 = f.from_int(-1);
    let t = if f.degree() > 1 { f.generator() } else { f.from_int(2) };
    vec![
        AlgebraWithInvolution::split_orth(f, 1).unwrap(),
        AlgebraWithInvolution::split_orth(f, 2).unwrap(),
        AlgebraWithInvolution::unitary(f, m1.clone(), 1).unwrap(),
        AlgebraWithInvolution::unitary(f, -&t, 2).unwrap(),
        AlgebraWithInvolution::quat_symp(f, m1.clone(), m1.clone(), 1).unwrap(),
        AlgebraWithInvolution::quat_symp(f, m1.clone(), t.clone(), 2).unwrap(),
        AlgebraWithInvolution::quat_skew(f, m1.clone(), m1.clone(), 1).unwrap(),
        AlgebraWithInvolution::quat_skew(f, f.one(), m1.clone(), 1).unwrap(),
        AlgebraWithInvolution::quat_skew(f, m1, -&t, 2).unwrap(),
        AlgebraWithInvolution::quat_symp(f, f.one(), f.one(), 1).unwrap(),
    ]
}

pub fn all_instances() -> Vec<AlgebraWithInvolution> {
    let mut out = instances(&rationals());
    out.extend(instances(&sqrt2()));
    out
}

/// `ℚ[x]/(x³ − 3x + 1)`: three orderings.
pub fn cubic3() -> NumberField {
    NumberField::from_int_coeffs(&[1, -3, 0, 1]).unwrap()
}
