//! Dense univariate polynomials over ℚ, with the pieces needed for real root
//! isolation: Sturm chains, exact evaluation and interval evaluation.

use std::cmp::Ordering as CmpOrdering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Polynomial with rational coefficients, constant term first.
///
/// The coefficient vector never has a trailing zero; the zero polynomial is
/// the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn x() -> Self {
        Poly::monomial(Rational::one(), 1)
    }

    /// Renders with `var` as the variable, highest degree first.
    pub fn render(&self, var: &str) -> String {
        let mut s = String::new();
        write_poly(&mut s, &self.coeffs, var).expect("writing to a String");
        s
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Euclidean division. Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.coeffs[d].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = &rem[k] * &lead_inv;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    rem[k - d + j] -= &c * b;
                }
            }
            quot[k - d] = c;
        }
        rem.truncate(d);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Poly::zero(),
        }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
            None => (r0, s0, t0),
        }
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Enclosure of `{ p(t) : lo ≤ t ≤ hi }` by Horner's rule in interval
    /// arithmetic. Converges to the point value as the interval shrinks.
    pub fn eval_interval(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut acc = (Rational::zero(), Rational::zero());
        for c in self.coeffs.iter().rev() {
            let products = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
            let min = products.iter().min().unwrap().clone();
            let max = products.iter().max().unwrap().clone();
            acc = (min + c, max + c);
        }
        acc
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        chain
    }

    /// A power of two strictly larger than the absolute value of every real
    /// root (Cauchy's bound `1 + max |a_i / a_d|`, rounded up).
    pub fn root_bound(&self) -> Rational {
        let lead = match self.leading() {
            Some(l) => l.abs(),
            None => return Rational::one(),
        };
        let mut bound = Rational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let r = c.abs() / &lead;
            if r > bound {
                bound = r;
            }
        }
        let bound = bound + Rational::one();
        let mut pow = Rational::one();
        while pow <= bound {
            pow *= Rational::from_integer(2.into());
        }
        pow
    }

    /// Sign of the leading coefficient (0 for the zero polynomial).
    pub fn leading_sign(&self) -> i32 {
        match self.leading() {
            None => 0,
            Some(l) if l.is_positive() => 1,
            Some(_) => -1,
        }
    }
}

/// Number of sign changes of the chain evaluated at `x`, zeros skipped.
pub fn sign_variations(chain: &[Poly], x: &Rational) -> usize {
    let mut last = 0i32;
    let mut count = 0;
    for p in chain {
        let s = sign_of(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Distinct real roots of the chain's head in `(lo, hi]`, assuming `lo` is not
/// a root.
pub fn count_roots(chain: &[Poly], lo: &Rational, hi: &Rational) -> usize {
    sign_variations(chain, lo).saturating_sub(sign_variations(chain, hi))
}

pub fn sign_of(x: &Rational) -> i32 {
    match x.cmp(&Rational::zero()) {
        CmpOrdering::Less => -1,
        CmpOrdering::Equal => 0,
        CmpOrdering::Greater => 1,
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Poly {
    /// Renders with `x` as the variable, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs, "x")
    }
}

pub(crate) fn write_poly(f: &mut impl fmt::Write, coeffs: &[Rational], var: &str) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let unit = mag.is_one();
        match k {
            0 => write!(f, "{mag}")?,
            _ => {
                if !unit {
                    write!(f, "{mag}*")?;
                }
                if k == 1 {
                    write!(f, "{var}")?;
                } else {
                    write!(f, "{var}^{k}")?;
                }
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn division_identity() {
        let a = Poly::from_ints(&[3, 0, -2, 5, 1]);
        let b = Poly::from_ints(&[1, 2, 3]);
        let (quot, rem) = a.div_rem(&b);
        assert!(rem.degree().unwrap_or(0) < 2);
        assert_eq!(quot.mul(&b).add(&rem), a);
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = Poly::from_ints(&[0, 1]);
        let m = Poly::from_ints(&[-2, 0, 1]);
        let (g, s, t) = a.ext_gcd(&m);
        assert_eq!(g, Poly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&m)), g);
        // x^{-1} = x/2 modulo x^2 - 2
        assert_eq!(s, Poly::new(vec![q(0, 1), q(1, 2)]));
    }

    #[test]
    fn gcd_detects_common_factor() {
        let a = Poly::from_ints(&[-1, 0, 1]); // (x-1)(x+1)
        let b = Poly::from_ints(&[-1, 1]); // x - 1
        assert_eq!(a.gcd(&b), b);
        assert!(!a.mul(&b).is_squarefree());
        assert!(a.is_squarefree());
    }

    #[test]
    fn sturm_counts_roots_of_x2_minus_2() {
        let p = Poly::from_ints(&[-2, 0, 1]);
        let chain = p.sturm_chain();
        assert_eq!(count_roots(&chain, &q(-2, 1), &q(2, 1)), 2);
        assert_eq!(count_roots(&chain, &q(0, 1), &q(2, 1)), 1);
        assert_eq!(count_roots(&chain, &q(-1, 1), &q(1, 1)), 0);
        let none = Poly::from_ints(&[1, 0, 1]).sturm_chain();
        assert_eq!(count_roots(&none, &q(-4, 1), &q(4, 1)), 0);
    }

    #[test]
    fn root_bound_exceeds_roots() {
        let p = Poly::from_ints(&[-2, 0, 1]);
        let b = p.root_bound();
        assert!(b > q(3, 2));
        assert!(!p.eval(&b).is_zero());
    }

    #[test]
    fn interval_evaluation_encloses() {
        let p = Poly::from_ints(&[1, -3, 0, 1]);
        let (lo, hi) = p.eval_interval(&q(1, 2), &q(3, 4));
        for t in [q(1, 2), q(5, 8), q(3, 4)] {
            let v = p.eval(&t);
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn display_highest_first() {
        let p = Poly::new(vec![q(1, 2), q(-1, 1), q(0, 1), q(3, 1)]);
        assert_eq!(p.to_string(), "3*x^3 - x + 1/2");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
