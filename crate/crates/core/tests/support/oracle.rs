//! Independent oracles for signatures: characteristic polynomials with
//! Descartes' rule, the explicit splitting of `(1, b)`, and hermitian
//! elimination over a quadratic extension.
#![allow(dead_code)]

use hermsig_core::algebra::{AlgebraWithInvolution, Family, Quaternion};
use hermsig_core::field::NumberField;
use hermsig_core::hermitian::HermitianForm;
use hermsig_core::Rational;
use num_traits::{Signed, Zero};

pub type QMatrix = Vec<Vec<Rational>>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// Coefficients `c_0 … c_n` of `det(x·I − m)` (Faddeev–LeVerrier).
pub fn char_poly(m: &QMatrix) -> Vec<Rational> {
    let n = m.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = q(1);
    let mut mk = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = mul(m, &mk);
        for i in 0..n {
            next[i][i] += &coeffs[n - k + 1];
        }
        let am = mul(m, &next);
        let tr: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -tr / q(k as i64);
        mk = next;
    }
    coeffs
}

fn sign_changes(c: &[Rational]) -> i64 {
    let signs: Vec<bool> = c.iter().filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count() as i64
}

/// Signature of a real symmetric matrix: all roots of its characteristic
/// polynomial are real, so Descartes' rule counts them exactly.
pub fn signature(m: &QMatrix) -> i64 {
    let c = char_poly(m);
    let pos = sign_changes(&c);
    let neg: Vec<Rational> = c.iter().enumerate().map(|(i, v)| if i % 2 == 1 { -v } else { v.clone() }).collect();
    pos - sign_changes(&neg)
}

pub fn coords(d: &Quaternion) -> [Rational; 4] {
    d.coords().map(|c| c.as_rational().expect("rational coordinates").clone())
}

/// `w + x·i + y·j + z·k ↦ [[w + x, b(y + z)], [y − z, w − x]]` for `(1, b)`.
pub fn split(d: &Quaternion, b: &Rational) -> [[Rational; 2]; 2] {
    let [w, x, y, z] = coords(d);
    [[&w + &x, b * (&y + &z)], [&y - &z, &w - &x]]
}

/// `(I ⊗ J⁻¹)·φ(S)` with `J = [[0, 1], [−1, 0]]`: conjugation becomes
/// `X ↦ J·Xᵀ·J⁻¹`, so this block matrix is symmetric for skew-hermitian `S`
/// and alternating for hermitian `S`.
pub fn split_gram(s: &[Vec<Quaternion>], b: &Rational) -> QMatrix {
    let k = s.len();
    let mut out = vec![vec![Rational::zero(); 2 * k]; 2 * k];
    for r in 0..k {
        for c in 0..k {
            let m = split(&s[r][c], b);
            // J⁻¹ = [[0, −1], [1, 0]]
            out[2 * r][2 * c] = -m[1][0].clone();
            out[2 * r][2 * c + 1] = -m[1][1].clone();
            out[2 * r + 1][2 * c] = m[0][0].clone();
            out[2 * r + 1][2 * c + 1] = m[0][1].clone();
        }
    }
    out
}

/// Signature through the splitting, for forms over `(1, b)_ℚ`. For the
/// symplectic family the split form is alternating and its class vanishes.
pub fn split_oracle(h: &HermitianForm) -> i64 {
    let alg = h.algebra();
    let b = match alg.family() {
        Family::QuatSymp { a, b } | Family::QuatSkew { a, b } => {
            assert!(a.is_one(), "split oracle needs a = 1");
            b.as_rational().expect("over Q").clone()
        }
        _ => panic!("split oracle applies to quaternion families"),
    };
    let g = split_gram(h.collapsed(), &b);
    let n = g.len();
    let skew = matches!(alg.family(), Family::QuatSkew { .. });
    for i in 0..n {
        for j in 0..n {
            if skew {
                assert_eq!(g[i][j], g[j][i], "split gram must be symmetric");
            } else {
                assert_eq!(g[i][j], -g[j][i].clone(), "split gram must be alternating");
            }
        }
    }
    if skew {
        signature(&g)
    } else {
        0
    }
}

/// Sylvester count for `(M_n(F), t)`: the collapsed gram is a symmetric
/// matrix over `F`.
pub fn split_orth_oracle(h: &HermitianForm) -> i64 {
    let m: QMatrix = h.collapsed().iter().map(|r| r.iter().map(|d| coords(d)[0].clone()).collect()).collect();
    signature(&m)
}

/// Hermitian elimination over `K = ℚ(√δ)` built as a number field, with
/// conjugation `√δ ↦ −√δ`. Diagonal entries land in ℚ; their signs are
/// counted.
pub fn unitary_oracle(h: &HermitianForm) -> i64 {
    let alg = h.algebra();
    let Family::Unitary { delta } = alg.family() else { panic!("unitary oracle") };
    let delta = delta.as_rational().expect("over Q").clone();
    let k = NumberField::new(hermsig_core::Poly::new(vec![-delta.clone(), q(0), q(1)])).expect("x² − δ");
    let r = k.generator();
    let mut m: Vec<Vec<_>> = h
        .collapsed()
        .iter()
        .map(|row| {
            row.iter()
                .map(|d| {
                    let [w, x, _, _] = coords(d);
                    &k.from_rational(w) + &r.scale(&x)
                })
                .collect()
        })
        .collect();
    let conj = |e: &hermsig_core::FieldElement| {
        let c = e.coeffs();
        let a = c.first().cloned().unwrap_or_else(Rational::zero);
        let b = c.get(1).cloned().unwrap_or_else(Rational::zero);
        &k.from_rational(a) - &r.scale(&b)
    };
    let n = m.len();
    let mut sig = 0;
    let mut p = 0;
    while p < n {
        let piv = (p..n).find(|&i| !m[i][i].is_zero());
        let piv = match piv {
            Some(i) => i,
            None => {
                let Some((i, j)) = (p..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !m[i][j].is_zero()) else {
                    break;
                };
                // e_i ← e_i + λ e_j with Re(λ̄·m_ij) ≠ 0: λ = m_ij works
                let lam = m[i][j].clone();
                add_multiple(&mut m, i, j, &lam, &conj);
                i
            }
        };
        m.swap(p, piv);
        for row in m.iter_mut() {
            row.swap(p, piv);
        }
        let d = m[p][p].clone();
        let dr = d.as_rational().expect("hermitian diagonal is rational").clone();
        sig += if dr.is_positive() { 1 } else { -1 };
        for i in p + 1..n {
            if m[i][p].is_zero() {
                continue;
            }
            let lam = -&(&m[i][p] * &d.inv().unwrap());
            // row_i += lam·row_p, col_i += conj(lam)·col_p
            add_multiple(&mut m, i, p, &lam, &conj);
        }
        p += 1;
    }
    sig
}

/// `row_i += λ·row_j`, `col_i += conj(λ)·col_j`.
fn add_multiple(
    m: &mut [Vec<hermsig_core::FieldElement>],
    i: usize,
    j: usize,
    lam: &hermsig_core::FieldElement,
    conj: &dyn Fn(&hermsig_core::FieldElement) -> hermsig_core::FieldElement,
) {
    let n = m.len();
    for c in 0..n {
        let v = &m[i][c] + &(lam * &m[j][c]);
        m[i][c] = v;
    }
    let cl = conj(lam);
    for r in 0..n {
        let v = &m[r][i] + &(&m[r][j] * &cl);
        m[r][i] = v;
    }
}

/// Quaternions with integer coordinates of height at most `h`, pure ones
/// only when `pure`.
pub fn quaternions(f: &NumberField, h: i64, pure: bool) -> Vec<Quaternion> {
    let mut out = Vec::new();
    let ws: Vec<i64> = if pure { vec![0] } else { (-h..=h).collect() };
    for &w in &ws {
        for x in -h..=h {
            for y in -h..=h {
                for z in -h..=h {
                    out.push(Quaternion::from_ints(f, [w, x, y, z]));
                }
            }
        }
    }
    out
}

/// Diagonal entries admissible for the family: scalars for hermitian
/// quaternion forms, pure quaternions for skew ones.
pub fn diagonal_entries(alg: &AlgebraWithInvolution, h: i64) -> Vec<Quaternion> {
    let f = alg.field();
    match alg.family() {
        Family::QuatSkew { .. } => quaternions(f, h, true),
        _ => (-h..=h).map(|w| Quaternion::from_ints(f, [w, 0, 0, 0])).collect(),
    }
}

/// Every gram matrix of the given rank with diagonal entries from `diag`
/// and upper entries from `off`; lower entries follow from the symmetry.
/// Diagonal forms are visited as multisets when `off` is `None`.
pub fn for_each_gram(
    alg: &AlgebraWithInvolution,
    rank: usize,
    diag: &[Quaternion],
    off: Option<&[Quaternion]>,
    visit: &mut dyn FnMut(HermitianForm),
) {
    let f = alg.field();
    let eps = alg.epsilon();
    let pairs: Vec<(usize, usize)> = (0..rank).flat_map(|r| (r + 1..rank).map(move |c| (r, c))).collect();
    let mut di = vec![0usize; rank];
    loop {
        let ordered_ok = off.is_some() || di.windows(2).all(|w| w[0] <= w[1]);
        if ordered_ok {
            let offs = off.unwrap_or(&[]);
            let slots = if off.is_some() { pairs.len() } else { 0 };
            let mut oi = vec![0usize; slots];
            loop {
                let mut g = vec![vec![Quaternion::zero(f); rank]; rank];
                for r in 0..rank {
                    g[r][r] = diag[di[r]].clone();
                }
                for (t, &(r, c)) in pairs.iter().enumerate().take(slots) {
                    let e = offs[oi[t]].clone();
                    g[c][r] = if eps == 1 { e.conj() } else { e.conj().neg() };
                    g[r][c] = e;
                }
                visit(HermitianForm::from_collapsed(alg, g).expect("symmetric by construction"));
                if !bump(&mut oi, offs.len()) {
                    break;
                }
            }
        }
        if !bump(&mut di, diag.len()) {
            break;
        }
    }
}

fn bump(idx: &mut [usize], base: usize) -> bool {
    for v in idx.iter_mut() {
        *v += 1;
        if *v < base {
            return true;
        }
        *v = 0;
    }
    false
}

/// Signatures from the trace-form formula and from the splitting, both
/// normalized by the reference form, or a mismatch.
pub fn split_agreement(h: &HermitianForm, eta: &HermitianForm) -> Result<(), String> {
    let p = &h.field().orderings()[0];
    let lib = hermsig_core::hermitian::trace_signature(h, p).map_err(|e| e.to_string())?;
    let lib_eta = hermsig_core::hermitian::trace_signature(eta, p).map_err(|e| e.to_string())?;
    let ora = split_oracle(h);
    let ora_eta = split_oracle(eta);
    let agree = if ora_eta == 0 { lib == 0 && ora == 0 } else { lib * lib_eta.signum() == ora * ora_eta.signum() };
    if agree {
        Ok(())
    } else {
        Err(format!("formula {lib} vs splitting {ora} for {:?}", h.collapsed()))
    }
}
