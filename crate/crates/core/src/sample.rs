//! Seeded random instances: field elements, algebra elements and forms with
//! bounded integer coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, AlgebraWithInvolution, DMatrix, Quaternion, ScalarRing};
use crate::field::{FieldElement, NumberField};
use crate::hermitian::HermitianForm;
use crate::quadform::QuadraticForm;

pub struct Sampler {
    rng: ChaCha8Rng,
    height: i64,
}

impl Sampler {
    pub fn new(seed: u64, height: i64) -> Self {
        assert!(height >= 1);
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), height }
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self) -> i64 {
        self.rng.gen_range(-self.height..=self.height)
    }

    pub fn nonzero_int(&mut self) -> i64 {
        loop {
            let v = self.int();
            if v != 0 {
                return v;
            }
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn field_element(&mut self, f: &NumberField) -> FieldElement {
        let x = f.generator();
        let mut acc = f.zero();
        let mut pow = f.one();
        for _ in 0..f.degree() {
            acc = &acc + &pow.scale(&crate::Rational::from_integer(self.int().into()));
            pow = &pow * &x;
        }
        acc
    }

    pub fn nonzero_field_element(&mut self, f: &NumberField) -> FieldElement {
        loop {
            let e = self.field_element(f);
            if !e.is_zero() {
                return e;
            }
        }
    }

    pub fn d_element(&mut self, ring: &ScalarRing) -> Quaternion {
        let f = ring.field().clone();
        let c: Vec<FieldElement> = (0..ring.dim()).map(|_| self.field_element(&f)).collect();
        ring.from_coords(&c)
    }

    pub fn algebra_element(&mut self, alg: &AlgebraWithInvolution) -> AlgebraElement {
        let n = alg.n();
        let m = (0..n).map(|_| (0..n).map(|_| self.d_element(alg.ring())).collect()).collect();
        alg.element(m).expect("sampled entries lie in D")
    }

    pub fn invertible_element(&mut self, alg: &AlgebraWithInvolution) -> AlgebraElement {
        loop {
            let x = self.algebra_element(alg);
            if x.is_invertible() {
                return x;
            }
        }
    }

    /// Random combination of `sym_basis` elements.
    pub fn symmetric_element(&mut self, alg: &AlgebraWithInvolution) -> AlgebraElement {
        let f = alg.field().clone();
        let mut acc = alg.zero();
        for e in alg.sym_basis() {
            let c = self.field_element(&f);
            if !c.is_zero() {
                acc = acc.add(&e.scale(&c));
            }
        }
        acc
    }

    pub fn invertible_symmetric(&mut self, alg: &AlgebraWithInvolution) -> AlgebraElement {
        loop {
            let a = self.symmetric_element(alg);
            if a.is_invertible() {
                return a;
            }
        }
    }

    /// Diagonal form with random invertible symmetric entries.
    pub fn diagonal_form(&mut self, alg: &AlgebraWithInvolution, rank: usize) -> HermitianForm {
        let entries: Vec<AlgebraElement> = (0..rank).map(|_| self.invertible_symmetric(alg)).collect();
        HermitianForm::diagonal(alg, &entries).expect("symmetric entries")
    }

    /// Diagonal form moved by a random invertible change of basis.
    pub fn form(&mut self, alg: &AlgebraWithInvolution, rank: usize) -> HermitianForm {
        let d = self.diagonal_form(alg, rank);
        let t = self.invertible_matrix(alg.ring(), d.collapsed().len());
        d.congruent(&t).expect("square change of basis")
    }

    /// Gram matrix over `M_n(D)` with every coordinate of height at most
    /// the sampler's height; possibly degenerate.
    pub fn gram_form(&mut self, alg: &AlgebraWithInvolution, rank: usize) -> HermitianForm {
        let ring = alg.ring();
        let eps = alg.epsilon();
        let size = rank * alg.n();
        let f = alg.field().clone();
        let mut g: DMatrix = vec![vec![Quaternion::zero(&f); size]; size];
        for r in 0..size {
            let d = self.d_element(ring);
            // (d + ε·conj d)/2 has the right symmetry
            let half = f.from_rational(crate::Rational::new(1.into(), 2.into()));
            let sym = if eps == 1 { d.add(&d.conj()) } else { d.sub(&d.conj()) };
            let sym = if sym.coords().iter().all(|c| c.is_zero()) { sym } else { sym.scale(&half) };
            g[r][r] = sym;
            for c in r + 1..size {
                let e = self.d_element(ring);
                g[c][r] = if eps == 1 { e.conj() } else { e.conj().neg() };
                g[r][c] = e;
            }
        }
        HermitianForm::from_collapsed(alg, g).expect("symmetric by construction")
    }

    /// Nondegenerate `gram_form`.
    pub fn nondegenerate_gram_form(&mut self, alg: &AlgebraWithInvolution, rank: usize) -> HermitianForm {
        loop {
            let h = self.gram_form(alg, rank);
            if h.is_nondegenerate() {
                return h;
            }
        }
    }

    pub fn quadratic_form(&mut self, f: &NumberField, rank: usize) -> QuadraticForm {
        let entries = (0..rank).map(|_| self.nonzero_field_element(f)).collect();
        QuadraticForm::new(f, entries).expect("nonzero entries")
    }

    pub fn invertible_matrix(&mut self, ring: &ScalarRing, k: usize) -> DMatrix {
        loop {
            let m: DMatrix = (0..k).map(|_| (0..k).map(|_| self.d_element(ring)).collect()).collect();
            if ring.mat_inv(&m).is_ok() {
                return m;
            }
        }
    }
}
