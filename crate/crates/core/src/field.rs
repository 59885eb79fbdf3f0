//! Real number fields `ℚ[x]/(m)`, their orderings and exact sign
//! determination.
//!
//! Orderings of a number field are the real roots of its minimal polynomial.
//! Each root is isolated by an interval with dyadic endpoints obtained by
//! bisection from a power-of-two root bound; the sign of an element at an
//! ordering is decided exactly, never numerically: a gcd test detects
//! vanishing, and otherwise the interval is bisected until interval evaluation
//! of the element excludes zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{count_roots, sign_of, write_poly, Poly};
use crate::Rational;

struct FieldData {
    modulus: Arc<Poly>,
    orderings: Vec<Ordering>,
    /// `Tr(x^k)` for `k < d`.
    power_traces: Vec<Rational>,
    /// `x^(d+k) mod m` for `k < d − 1`, as integer vectors over the common
    /// denominator `reduction_den`.
    reduction: Vec<Vec<BigInt>>,
    reduction_den: BigInt,
}

/// The number field `ℚ[x]/(m)` for a monic squarefree `m`.
///
/// Cloning is cheap. Two handles compare equal when their minimal
/// polynomials agree.
#[derive(Clone)]
pub struct NumberField {
    inner: Arc<FieldData>,
}

impl NumberField {
    /// Builds the field from its minimal polynomial. Non-monic input is
    /// normalized; a constant or non-squarefree polynomial is rejected.
    pub fn new(min_poly: Poly) -> Result<Self> {
        let deg = min_poly
            .degree()
            .ok_or_else(|| Error::InvalidModulus("zero polynomial".into()))?;
        if deg == 0 {
            return Err(Error::InvalidModulus("constant polynomial".into()));
        }
        if !min_poly.is_squarefree() {
            return Err(Error::InvalidModulus(format!("{min_poly} is not squarefree")));
        }
        let modulus = Arc::new(min_poly.monic());
        let orderings = isolate_roots(&modulus)
            .into_iter()
            .enumerate()
            .map(|(index, (lo, hi))| {
                let tight = Arc::new(refine(&modulus, &lo, &hi));
                Ordering { index, lo, hi, tight, modulus: modulus.clone() }
            })
            .collect();
        let reduction: Vec<Vec<Rational>> = (deg..2 * deg - 1)
            .map(|k| {
                let r = Poly::monomial(Rational::one(), k).rem(&modulus);
                (0..deg).map(|j| r.coeff(j)).collect()
            })
            .collect();
        let reduction_den = reduction.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let reduction = reduction
            .iter()
            .map(|row| row.iter().map(|c| c.numer() * (&reduction_den / c.denom())).collect())
            .collect();
        let power_traces = (0..deg)
            .map(|k| {
                // trace of multiplication by x^k in the power basis
                let mut t = Rational::zero();
                for j in 0..deg {
                    let prod = Poly::monomial(Rational::one(), k + j).rem(&modulus);
                    t += prod.coeff(j);
                }
                t
            })
            .collect();
        Ok(NumberField { inner: Arc::new(FieldData { modulus, orderings, power_traces, reduction, reduction_den }) })
    }

    /// ℚ itself, presented as `ℚ[x]/(x)`.
    pub fn rationals() -> Self {
        NumberField::new(Poly::x()).expect("x is a valid modulus")
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Result<Self> {
        NumberField::new(Poly::from_ints(coeffs))
    }

    pub fn min_poly(&self) -> &Poly {
        &self.inner.modulus
    }

    pub fn degree(&self) -> usize {
        self.inner.modulus.degree().unwrap_or(0)
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    /// The orderings of the field, one per real root of the minimal
    /// polynomial, in increasing order of the root.
    pub fn orderings(&self) -> &[Ordering] {
        &self.inner.orderings
    }

    pub fn ordering(&self, index: usize) -> Option<&Ordering> {
        self.inner.orderings.get(index)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), num: vec![BigInt::zero(); self.degree()], den: BigInt::one() }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(Rational::one())
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_rational(&self, r: Rational) -> FieldElement {
        let mut e = self.zero();
        let (n, d) = r.into();
        e.num[0] = n;
        e.den = d;
        e
    }

    /// The class of `x`, i.e. the root of the minimal polynomial.
    pub fn generator(&self) -> FieldElement {
        self.from_poly(&Poly::x())
    }

    /// Reduces an arbitrary polynomial modulo the minimal polynomial.
    pub fn from_poly(&self, p: &Poly) -> FieldElement {
        let r = p.rem(&self.inner.modulus);
        let mut coeffs = r.into_coeffs();
        coeffs.resize(self.degree(), Rational::zero());
        FieldElement::from_rationals(self, &coeffs)
    }

    pub fn same_as(&self, other: &NumberField) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.modulus == other.inner.modulus
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for NumberField {}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField(Q[x]/({}))", self.inner.modulus)
    }
}

/// An ordering of a number field, carried as an isolating interval for one
/// real root of the minimal polynomial.
#[derive(Clone)]
pub struct Ordering {
    index: usize,
    lo: Rational,
    hi: Rational,
    /// The isolating interval refined to width at most `2^-64`.
    tight: Arc<(Rational, Rational)>,
    modulus: Arc<Poly>,
}

impl Ordering {
    /// Position of the ordering in `NumberField::orderings`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn belongs_to(&self, field: &NumberField) -> bool {
        Arc::ptr_eq(&self.modulus, &field.inner.modulus) || *self.modulus == *field.inner.modulus
    }

    /// A rational approximation of the root, within `tol` of it.
    pub fn approximate(&self, tol: &Rational) -> Rational {
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        let m = &*self.modulus;
        let two = Rational::from_integer(2.into());
        while &hi - &lo > *tol {
            let mid = (&lo + &hi) / &two;
            let s = sign_of(&m.eval(&mid));
            if s == 0 {
                return mid;
            }
            if s == sign_of(&m.eval(&lo)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / two
    }
}

impl PartialEq for Ordering {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && *self.modulus == *other.modulus
    }
}

impl Eq for Ordering {}

impl fmt::Debug for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}({}, {})", self.index, self.lo, self.hi)
    }
}

/// Bisects an isolating interval down to width `2^-64`.
fn refine(m: &Poly, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let width = Rational::new(BigInt::one(), BigInt::one() << 64);
    let two = Rational::from_integer(2.into());
    let s_lo = sign_of(&m.eval(&lo));
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        let s = sign_of(&m.eval(&mid));
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Isolating intervals for the real roots of a squarefree polynomial, sorted.
fn isolate_roots(m: &Poly) -> Vec<(Rational, Rational)> {
    let chain = m.sturm_chain();
    let b = m.root_bound();
    let mut out = Vec::new();
    bisect(m, &chain, -b.clone(), b, &mut out);
    out
}

fn bisect(m: &Poly, chain: &[Poly], lo: Rational, hi: Rational, out: &mut Vec<(Rational, Rational)>) {
    let n = count_roots(chain, &lo, &hi);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push((lo, hi));
        return;
    }
    let two = Rational::from_integer(2.into());
    let mid = (&lo + &hi) / &two;
    if m.eval(&mid).is_zero() {
        // A rational root sits on the bisection point: shrink a symmetric
        // dyadic window around it until it isolates the root alone.
        let mut delta = (&hi - &lo) / Rational::from_integer(4.into());
        loop {
            let (a, b) = (&mid - &delta, &mid + &delta);
            if !m.eval(&a).is_zero() && !m.eval(&b).is_zero() && count_roots(chain, &a, &b) == 1 {
                bisect(m, chain, lo, a.clone(), out);
                out.push((a, b.clone()));
                bisect(m, chain, b, hi, out);
                return;
            }
            delta /= &two;
        }
    }
    bisect(m, chain, lo, mid.clone(), out);
    bisect(m, chain, mid, hi, out);
}

/// Element of a number field: a polynomial representative of degree `< d`,
/// stored as integer coefficients over one positive denominator in lowest
/// terms.
#[derive(Clone)]
pub struct FieldElement {
    field: NumberField,
    num: Vec<BigInt>,
    den: BigInt,
}

impl FieldElement {
    fn from_rationals(field: &NumberField, coeffs: &[Rational]) -> FieldElement {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        FieldElement { field: field.clone(), num, den }
    }

    fn normalized(field: &NumberField, mut num: Vec<BigInt>, mut den: BigInt) -> FieldElement {
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|c| *c = -std::mem::take(c));
        }
        if num.iter().all(Zero::is_zero) {
            return FieldElement { field: field.clone(), num, den: BigInt::one() };
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in &num {
                if g.is_one() {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(c);
                }
            }
            if !g.is_one() {
                num.iter_mut().for_each(|c| *c /= &g);
                den /= &g;
            }
        }
        FieldElement { field: field.clone(), num, den }
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// Coefficients in the power basis, constant first; always `d` of them.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num.iter().map(|c| Rational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs())
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in ℚ.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Inverse via the extended gcd of the representative and the modulus.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.field.from_rational(r.recip()));
        }
        if self.field.degree() == 2 {
            // (a + bx)(a − bp − bx) = a² − abp + b²q for m = x² + px + q
            let m = self.field.min_poly();
            let (p, q) = (m.coeff(1), m.coeff(0));
            let a = Rational::new(self.num[0].clone(), self.den.clone());
            let b = Rational::new(self.num[1].clone(), self.den.clone());
            let norm = &a * &a - &a * &b * &p + &b * &b * &q;
            if norm.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let coeffs = [(&a - &b * &p) / &norm, -&b / &norm];
            return Ok(FieldElement::from_rationals(&self.field, &coeffs));
        }
        let (g, s, _) = self.to_poly().ext_gcd(self.field.min_poly());
        if g.degree() != Some(0) {
            // only possible for a reducible modulus: a zero divisor
            return Err(Error::DivisionByZero);
        }
        Ok(self.field.from_poly(&s))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: u32) -> FieldElement {
        let mut acc = self.field.one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> FieldElement {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        FieldElement::normalized(&self.field, num, &self.den * r.denom())
    }

    /// Evaluates a polynomial with rational coefficients at this element.
    pub fn poly_eval(&self, p: &Poly) -> FieldElement {
        let mut acc = self.field.zero();
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &self.field.from_rational(c.clone());
        }
        acc
    }

    /// Absolute trace `Tr_{F/ℚ}`.
    pub fn trace(&self) -> Rational {
        self.coeffs()
            .iter()
            .zip(&self.field.inner.power_traces)
            .map(|(c, t)| c * t)
            .sum()
    }

    /// Sign of the element at an ordering: `-1`, `0` or `+1`.
    pub fn sign_at(&self, p: &Ordering) -> Result<i32> {
        if !p.belongs_to(&self.field) {
            return Err(Error::FieldMismatch);
        }
        if let Some(r) = self.as_rational() {
            return Ok(sign_of(&r));
        }
        let rep = self.to_poly();
        let (tlo, thi) = &*p.tight;
        if tlo == thi {
            // rational root
            return Ok(sign_of(&rep.eval(tlo)));
        }
        if self.num[2..].iter().all(Zero::is_zero) {
            return Ok(linear_sign(&self.num[0], &self.num[1], p));
        }
        let (vlo, vhi) = rep.eval_interval(tlo, thi);
        if vlo.is_positive() {
            return Ok(1);
        }
        if vhi.is_negative() {
            return Ok(-1);
        }
        let m = &*p.modulus;
        let g = rep.gcd(m);
        if g.degree().unwrap_or(0) > 0 && count_roots(&g.sturm_chain(), &p.lo, &p.hi) > 0 {
            return Ok(0);
        }
        let (mut lo, mut hi) = (tlo.clone(), thi.clone());
        let two = Rational::from_integer(2.into());
        loop {
            let (vlo, vhi) = rep.eval_interval(&lo, &hi);
            if vlo.is_positive() {
                return Ok(1);
            }
            if vhi.is_negative() {
                return Ok(-1);
            }
            let mid = (&lo + &hi) / &two;
            let s = sign_of(&m.eval(&mid));
            if s == 0 {
                return Ok(sign_of(&rep.eval(&mid)));
            }
            if s == sign_of(&m.eval(&lo)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    /// Renders as a polynomial in `var`.
    pub fn render(&self, var: &str) -> String {
        let mut s = String::new();
        write_poly(&mut s, &self.coeffs(), var).expect("writing to a String");
        s
    }

    /// Absolute norm `N_{F/ℚ}`: the determinant of multiplication by the
    /// element in the power basis.
    pub fn norm(&self) -> Rational {
        let d = self.field.degree();
        let x = self.field.generator();
        let mut col = self.clone();
        let mut m: Vec<Vec<Rational>> = Vec::with_capacity(d);
        for _ in 0..d {
            m.push(col.coeffs());
            col = &col * &x;
        }
        rational_det(m)
    }

    /// Whether the element is a square in its field.
    ///
    /// Exact for fields of degree at most 2. In higher degree only the sign
    /// and norm obstructions are checked, and an element passing both is
    /// reported as a non-square.
    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        for p in self.field.orderings() {
            if self.sign_at(p).expect("own ordering") < 0 {
                return false;
            }
        }
        if rational_sqrt(&self.norm()).is_none() {
            return false;
        }
        match self.field.degree() {
            1 => rational_sqrt(&Rational::new(self.num[0].clone(), self.den.clone())).is_some(),
            2 => self.quadratic_sqrt().is_some(),
            _ => false,
        }
    }

    /// Square root in a quadratic field `ℚ(√D)`, by solving
    /// `(c + e√D)² = α + β√D` with the norm equation.
    fn quadratic_sqrt(&self) -> Option<FieldElement> {
        let f = &self.field;
        if f.degree() != 2 {
            return None;
        }
        let m = f.min_poly();
        let (p, q0) = (m.coeff(1), m.coeff(0));
        let two = Rational::from_integer(2.into());
        let disc = &p * &p - Rational::from_integer(4.into()) * &q0;
        // θ = (−p + √D)/2, so √D = 2θ + p
        let root_d = &f.generator().scale(&two) + &f.from_rational(p.clone());
        let c = self.coeffs();
        let (s, t) = (c[0].clone(), c[1].clone());
        let alpha = &s - &t * &p / &two;
        let beta = &t / &two;
        let n = rational_sqrt(&(&alpha * &alpha - &disc * &beta * &beta))?;
        let mut candidates = Vec::new();
        for c2 in [(&alpha + &n) / &two, (&alpha - &n) / &two] {
            if let Some(c) = rational_sqrt(&c2) {
                if !c.is_zero() {
                    candidates.push((c.clone(), &beta / (&two * &c)));
                }
            }
        }
        if beta.is_zero() {
            if let Some(e) = rational_sqrt(&(&alpha / &disc)) {
                candidates.push((Rational::zero(), e));
            }
        }
        candidates.into_iter().find_map(|(c, e)| {
            let g = &f.from_rational(c) + &root_d.scale(&e);
            (&(&g * &g) == self).then_some(g)
        })
    }

    fn check(&self, other: &FieldElement) {
        assert!(self.field.same_as(&other.field), "field mismatch in arithmetic");
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.den == other.den && self.num == other.num
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

impl FieldElement {
    fn combine(&self, rhs: &FieldElement, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> FieldElement {
        self.check(rhs);
        if rhs.is_zero() {
            return FieldElement::normalized(&self.field, self.num.iter().map(|a| op(a, &BigInt::zero())).collect(), self.den.clone());
        }
        if self.den == rhs.den {
            let num = self.num.iter().zip(&rhs.num).map(|(a, b)| op(a, b)).collect();
            return FieldElement::normalized(&self.field, num, self.den.clone());
        }
        let num = self.num.iter().zip(&rhs.num).map(|(a, b)| op(&(a * &rhs.den), &(b * &self.den))).collect();
        FieldElement::normalized(&self.field, num, &self.den * &rhs.den)
    }
}

// Arithmetic panics on mixed fields; fallible entry points check first.
impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        if self.is_zero() {
            self.check(rhs);
            return rhs.clone();
        }
        self.combine(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        if self.is_zero() {
            self.check(rhs);
            return -rhs;
        }
        self.combine(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        if self.is_zero() || rhs.is_zero() {
            return self.field.zero();
        }
        let den = &self.den * &rhs.den;
        let d = self.num.len();
        if d == 1 {
            return FieldElement::normalized(&self.field, vec![&self.num[0] * &rhs.num[0]], den);
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let high = prod.split_off(d);
        let inner = &self.field.inner;
        let rden = &inner.reduction_den;
        if !rden.is_one() {
            prod.iter_mut().for_each(|c| *c *= rden);
        }
        for (c, row) in high.iter().zip(&inner.reduction) {
            if c.is_zero() {
                continue;
            }
            for (t, r) in prod.iter_mut().zip(row) {
                if !r.is_zero() {
                    *t += c * r;
                }
            }
        }
        let den = if rden.is_one() { den } else { den * rden };
        FieldElement::normalized(&self.field, prod, den)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Sign of `a + bθ` at the root `θ` of an ordering with `tlo < thi`, by
/// locating `θ` relative to `−a/b`.
fn linear_sign(a: &BigInt, b: &BigInt, p: &Ordering) -> i32 {
    let m = &*p.modulus;
    let (tlo, thi) = &*p.tight;
    let r = Rational::new(-a, b.clone());
    let sb = if b.is_positive() { 1 } else { -1 };
    let at = |x: &Rational| sign_of(&(x - &r)) * sb;
    let s_lo = sign_of(&m.eval(tlo));
    if s_lo == 0 {
        return at(tlo);
    }
    if sign_of(&m.eval(thi)) == 0 {
        return at(thi);
    }
    if r <= *tlo {
        return sb;
    }
    if r >= *thi {
        return -sb;
    }
    match sign_of(&m.eval(&r)) {
        0 => 0,
        s if s == s_lo => sb,
        _ => -sb,
    }
}

/// Square root of a rational, if it is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let k = m.len();
    let mut det = Rational::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..k {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for j in c..k {
                let delta = &f * &m[c][j];
                m[r][j] -= delta;
            }
        }
    }
    det
}

/// Writes a positive rational as a sum of four rational squares.
///
/// With `r = p/q` the integer `p·q` is decomposed by a largest-first bounded
/// search and each root divided by `q`, so that `Σ cᵢ² = pq/q² = r`.
pub fn four_square_decomposition(r: &Rational) -> Result<[Rational; 4]> {
    if !r.is_positive() {
        return Err(Error::NonPositive(r.to_string()));
    }
    let (p, q) = (r.numer().clone(), r.denom().clone());
    let roots = four_squares_int(&(&p * &q));
    Ok(roots.map(|c| Rational::new(c, q.clone())))
}

/// Integer four-square decomposition `n = a² + b² + c² + d²` with
/// `a ≥ b ≥ c ≥ d ≥ 0`, taking the lexicographically largest tuple.
pub fn four_squares_int(n: &BigInt) -> [BigInt; 4] {
    assert!(!n.is_negative());
    let mut a = n.sqrt();
    loop {
        let r1 = n - &a * &a;
        if let Some([b, c, d]) = three_squares_bounded(&r1, &a) {
            return [a, b, c, d];
        }
        assert!(!a.is_zero(), "Lagrange's theorem guarantees a decomposition");
        a -= 1;
    }
}

fn three_squares_bounded(n: &BigInt, cap: &BigInt) -> Option<[BigInt; 3]> {
    let mut b = n.sqrt().min(cap.clone());
    loop {
        let r2 = n - &b * &b;
        // b is the largest of the three, so c² + d² ≤ 2b²
        if r2 > BigInt::from(2) * &b * &b {
            return None;
        }
        let mut c = r2.sqrt().min(b.clone());
        while BigInt::from(2) * &c * &c >= r2 {
            let rest = &r2 - &c * &c;
            let d = rest.sqrt();
            if &d * &d == rest {
                return Some([b, c, d]);
            }
            if c.is_zero() {
                break;
            }
            c -= 1;
        }
        if b.is_zero() {
            return None;
        }
        b -= 1;
    }
}
