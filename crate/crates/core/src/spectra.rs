//! Prime ideal pairs of the Witt module, signature morphisms, and the finite
//! topology on the space of positive cones.

use crate::algebra::{AlgebraElement, AlgebraWithInvolution};
use crate::cones::{cone_membership, enumerate_positive_cones, eta_maximal, PositiveCone};
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField, Ordering};
use crate::hermitian::{self, HermitianForm, ReferenceForm};
use crate::quadform::QuadraticForm;
use crate::sample::Sampler;
use crate::Rational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IdealKind {
    /// `(ker sign_P, ker sign^η_P)`.
    SignatureKernel(Ordering),
    /// Kernels of the signatures reduced mod an odd prime.
    ModP(Ordering, u64),
    /// `I = I(F)` and `N` spanned by the generators and `I(F)·W(A, σ)`.
    Fundamental(Vec<HermitianForm>),
    /// `I = I(F)` with `N = ker sign^η_P`; not closed under `I(F)·W`.
    Fabricated(Ordering),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrimeIdealPair {
    kind: IdealKind,
    eta: ReferenceForm,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn non_nil(eta: &ReferenceForm, p: &Ordering) -> Result<()> {
    if !p.belongs_to(eta.algebra().field()) {
        return Err(Error::FieldMismatch);
    }
    if eta.algebra().is_nil(p) {
        return Err(Error::Precondition(format!("ordering {} is nil", p.index())));
    }
    Ok(())
}

/// `rank mod 2` of the nondegenerate part: kills hyperbolic forms and
/// `I(F)·W`, so `W/I(F)W → ℤ/2`.
fn rank_parity(h: &HermitianForm) -> Result<usize> {
    let red = hermitian::hermitian_reduce(h.algebra().ring(), h.collapsed());
    if !red.residual.is_empty() {
        return Err(Error::Scope("rank parity needs a diagonalizable form".into()));
    }
    Ok(red.diagonal.len() % 2)
}

impl PrimeIdealPair {
    pub fn signature_kernel(eta: &ReferenceForm, p: &Ordering) -> Result<Self> {
        non_nil(eta, p)?;
        Ok(PrimeIdealPair { kind: IdealKind::SignatureKernel(p.clone()), eta: eta.clone() })
    }

    pub fn mod_p(eta: &ReferenceForm, p: &Ordering, prime: u64) -> Result<Self> {
        non_nil(eta, p)?;
        if prime % 2 == 0 || !is_prime(prime) {
            return Err(Error::Precondition(format!("{prime} is not an odd prime")));
        }
        Ok(PrimeIdealPair { kind: IdealKind::ModP(p.clone(), prime), eta: eta.clone() })
    }

    /// `N` must be proper: every generator has even rank.
    pub fn fundamental(eta: &ReferenceForm, generators: Vec<HermitianForm>) -> Result<Self> {
        if eta.algebra().epsilon() == -1 {
            return Err(Error::Scope("the fundamental kind is not available for skew-hermitian forms".into()));
        }
        for g in &generators {
            if g.algebra() != eta.algebra() {
                return Err(Error::AlgebraMismatch);
            }
            if rank_parity(g)? == 1 {
                return Err(Error::Precondition("generator of odd rank: the submodule is not proper".into()));
            }
        }
        Ok(PrimeIdealPair { kind: IdealKind::Fundamental(generators), eta: eta.clone() })
    }

    pub fn fabricated(eta: &ReferenceForm, p: &Ordering) -> Result<Self> {
        non_nil(eta, p)?;
        Ok(PrimeIdealPair { kind: IdealKind::Fabricated(p.clone()), eta: eta.clone() })
    }

    pub fn kind(&self) -> &IdealKind {
        &self.kind
    }

    pub fn algebra(&self) -> &AlgebraWithInvolution {
        self.eta.algebra()
    }

    pub fn in_ideal(&self, q: &QuadraticForm) -> Result<bool> {
        Ok(match &self.kind {
            IdealKind::SignatureKernel(p) => q.signature(p)? == 0,
            IdealKind::ModP(p, m) => q.signature(p)?.rem_euclid(*m as i64) == 0,
            IdealKind::Fundamental(_) | IdealKind::Fabricated(_) => q.rank() % 2 == 0,
        })
    }

    pub fn in_submodule(&self, h: &HermitianForm) -> Result<bool> {
        if h.algebra() != self.algebra() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(match &self.kind {
            IdealKind::SignatureKernel(p) | IdealKind::Fabricated(p) => hermitian::signature(h, p, &self.eta)? == 0,
            IdealKind::ModP(p, m) => hermitian::signature(h, p, &self.eta)?.rem_euclid(*m as i64) == 0,
            IdealKind::Fundamental(_) => rank_parity(h)? == 0,
        })
    }
}

/// `(q ∈ I, h ∈ N)`.
pub fn ideal_membership(q: &QuadraticForm, h: &HermitianForm, pair: &PrimeIdealPair) -> Result<(bool, bool)> {
    if !q.field().same_as(pair.algebra().field()) {
        return Err(Error::FieldMismatch);
    }
    Ok((pair.in_ideal(q)?, pair.in_submodule(h)?))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PrimeViolation {
    /// `q ∈ I` but `q·h ∉ N`.
    NotClosed { q: QuadraticForm, h: HermitianForm },
    /// `q·h ∈ N` with `q ∉ I` and `h ∉ N`.
    NotPrime { q: QuadraticForm, h: HermitianForm },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PrimeSample {
    Pass,
    Counterexample(PrimeViolation),
}

/// Random `(q, h)` checks of `I·M ⊆ N` and of `q·h ∈ N ⇒ q ∈ I or h ∈ N`.
pub fn prime_property_sample(pair: &PrimeIdealPair, trials: usize, seed: u64) -> Result<PrimeSample> {
    let alg = pair.algebra();
    let f = alg.field();
    let mut s = Sampler::new(seed, 3);
    for t in 0..trials {
        let q = s.quadratic_form(f, 1 + t % 4);
        let rank = 1 + s.below(3);
        let h = s.diagonal_form(alg, rank);
        let (qi, hn) = ideal_membership(&q, &h, pair)?;
        let prod = h.scale_by_quadratic(&q)?;
        let pn = pair.in_submodule(&prod)?;
        if qi && !pn {
            return Ok(PrimeSample::Counterexample(PrimeViolation::NotClosed { q, h }));
        }
        if pn && !qi && !hn {
            return Ok(PrimeSample::Counterexample(PrimeViolation::NotPrime { q, h }));
        }
    }
    Ok(PrimeSample::Pass)
}

/// The pair `(sign_P, sign^η_P)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SignatureMorphismPair {
    pub ordering: Ordering,
    pub eta: ReferenceForm,
    /// `sign^η_P` vanishes identically exactly at nil orderings.
    pub trivial: bool,
}

impl SignatureMorphismPair {
    pub fn new(p: &Ordering, eta: &ReferenceForm) -> Self {
        SignatureMorphismPair { ordering: p.clone(), eta: eta.clone(), trivial: eta.algebra().is_nil(p) }
    }

    pub fn on_quadratic(&self, q: &QuadraticForm) -> Result<i64> {
        q.signature(&self.ordering)
    }

    pub fn on_hermitian(&self, h: &HermitianForm) -> Result<i64> {
        hermitian::signature(h, &self.ordering, &self.eta)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Distinctness {
    Equivalent,
    /// A diagonal form whose signatures at the two orderings are not positive
    /// multiples of each other.
    Separated { form: HermitianForm, at_p: i64, at_q: i64 },
}

/// A rational strictly between the two roots.
fn separating_rational(p: &Ordering, q: &Ordering) -> Rational {
    let two = Rational::from_integer(2.into());
    let mut tol = Rational::new(1.into(), 4.into());
    loop {
        let (a, b) = (p.approximate(&tol), q.approximate(&tol));
        let gap = if a > b { &a - &b } else { &b - &a };
        if gap > &tol * &two {
            return (a + b) / two;
        }
        tol = tol / Rational::from_integer(16.into());
    }
}

fn separates(at_p: i64, at_q: i64) -> bool {
    at_p * at_q < 0 || ((at_p == 0) != (at_q == 0))
}

/// Searches `⟨b·s⟩` for `s` in `sym_basis` and `b = θ^j + c`, `|c| ≤ bound`,
/// then falls back to `(θ − m)·η` with `m` between the two roots.
pub fn morphism_distinctness(p: &Ordering, q: &Ordering, eta: &ReferenceForm, bound: i64) -> Result<Distinctness> {
    let alg = eta.algebra();
    let f = alg.field();
    if !p.belongs_to(f) || !q.belongs_to(f) {
        return Err(Error::FieldMismatch);
    }
    if p == q {
        return Ok(Distinctness::Equivalent);
    }
    if alg.is_nil(p) && alg.is_nil(q) {
        // both hermitian sides are zero; only the quadratic sides differ
        return Ok(Distinctness::Equivalent);
    }
    let theta = f.generator();
    for s in alg.sym_basis() {
        for j in 0..f.degree() as u32 {
            for c in -bound..=bound {
                let b = &theta.pow(j) + &f.from_int(c);
                if b.is_zero() {
                    continue;
                }
                let h = HermitianForm::diagonal(alg, &[s.scale(&b)])?;
                if !h.is_nondegenerate() {
                    continue;
                }
                let (at_p, at_q) = (hermitian::signature(&h, p, eta)?, hermitian::signature(&h, q, eta)?);
                if separates(at_p, at_q) {
                    return Ok(Distinctness::Separated { form: h, at_p, at_q });
                }
            }
        }
    }
    let m = separating_rational(p, q);
    let b = &theta - &f.from_rational(m);
    let h = eta.form.scale_by_quadratic(&QuadraticForm::new(f, vec![b])?)?;
    let (at_p, at_q) = (hermitian::signature(&h, p, eta)?, hermitian::signature(&h, q, eta)?);
    if separates(at_p, at_q) {
        Ok(Distinctness::Separated { form: h, at_p, at_q })
    } else {
        Err(Error::SearchExhausted(format!("no form separates orderings {} and {}", p.index(), q.index())))
    }
}

pub type ConeId = (usize, i32);

/// The finite space `X_{(A,σ)}` of positive cones.
#[derive(Clone, Debug)]
pub struct ConeSpace {
    eta: ReferenceForm,
    cones: Vec<PositiveCone>,
}

/// Subsets of a cone space as bitmasks over the cone list.
pub type ConeSet = u64;

impl ConeSpace {
    pub fn new(eta: &ReferenceForm) -> Result<Self> {
        let cones = enumerate_positive_cones(eta);
        if cones.len() > 64 {
            return Err(Error::Scope("cone spaces are limited to 64 points".into()));
        }
        Ok(ConeSpace { eta: eta.clone(), cones })
    }

    pub fn eta(&self) -> &ReferenceForm {
        &self.eta
    }

    pub fn cones(&self) -> &[PositiveCone] {
        &self.cones
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn full(&self) -> ConeSet {
        if self.cones.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.cones.len()) - 1
        }
    }

    pub fn ids(&self, set: ConeSet) -> Vec<ConeId> {
        let mut out: Vec<ConeId> = (0..self.cones.len()).filter(|i| set >> i & 1 == 1).map(|i| self.cones[i].id()).collect();
        out.sort();
        out
    }

    pub fn position(&self, id: ConeId) -> Option<usize> {
        self.cones.iter().position(|c| c.id() == id)
    }

    /// `H_σ(a₁, …, a_k)`.
    pub fn basic_open(&self, elements: &[AlgebraElement]) -> Result<ConeSet> {
        let mut set = self.full();
        for a in elements {
            set &= self.single_open(a)?;
        }
        Ok(set)
    }

    fn single_open(&self, a: &AlgebraElement) -> Result<ConeSet> {
        let mut set = 0;
        for (i, c) in self.cones.iter().enumerate() {
            if cone_membership(a, c)? {
                set |= 1 << i;
            }
        }
        Ok(set)
    }

    /// Minimal open neighbourhoods in the topology generated by the sets
    /// `H_σ(a)`, `a` ranging over `generators`.
    pub fn minimal_neighbourhoods(&self, generators: &[AlgebraElement]) -> Result<Vec<ConeSet>> {
        let opens: Vec<ConeSet> = generators.iter().map(|a| self.single_open(a)).collect::<Result<_>>()?;
        Ok(neighbourhoods(self.full(), self.len(), &opens))
    }

    /// Elements used to generate topologies: per-ordering η-maximal
    /// elements and their products with separating linear factors,
    /// `sym_basis` with signs, and seeded samples.
    pub fn generators(&self, seed: u64, samples: usize, height: i64) -> Result<Vec<AlgebraElement>> {
        let alg = self.eta.algebra();
        let f = alg.field();
        let mut out = Vec::new();
        let non_nil = alg.non_nil_orderings();
        let mut maximal = Vec::new();
        for p in non_nil {
            if let Some(a) = maximal_element(alg, p, &self.eta)? {
                maximal.push(a);
            }
        }
        let mut factors = vec![f.one()];
        for (i, p) in non_nil.iter().enumerate() {
            for q in &non_nil[i + 1..] {
                let m = separating_rational(p, q);
                factors.push(&f.generator() - &f.from_rational(m));
            }
        }
        for a in &maximal {
            for b in &factors {
                out.push(a.scale(b));
                out.push(a.scale(b).neg());
            }
        }
        for e in alg.sym_basis() {
            out.push(e.neg());
            out.push(e);
        }
        let mut s = Sampler::new(seed, height);
        for _ in 0..samples {
            out.push(s.symmetric_element(alg));
        }
        Ok(out)
    }

    /// `𝒯_σ = 𝒯_σ^×` on the finite space, the second topology generated by
    /// the invertible generators only.
    pub fn topology_compare(&self, seed: u64, samples: usize, height: i64) -> Result<TopologyReport> {
        let gens = self.generators(seed, samples, height)?;
        let all = self.minimal_neighbourhoods(&gens)?;
        let inv: Vec<AlgebraElement> = gens.iter().filter(|a| a.is_invertible()).cloned().collect();
        let units = self.minimal_neighbourhoods(&inv)?;
        let t0 = is_t0(&all);
        let adequate = subbasis_adequate(self, &gens)?;
        Ok(TopologyReport { equal: all == units, t0, subbasis_adequate: adequate, neighbourhoods: all })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TopologyReport {
    pub equal: bool,
    pub t0: bool,
    pub subbasis_adequate: bool,
    pub neighbourhoods: Vec<ConeSet>,
}

/// An invertible `a` with `sign^η_P ⟨a⟩ = n_P`, from the reference search
/// order.
pub fn maximal_element(alg: &AlgebraWithInvolution, p: &Ordering, eta: &ReferenceForm) -> Result<Option<AlgebraElement>> {
    let mut found = None;
    let mut err = None;
    hermitian::for_each_candidate(alg, hermitian::REFERENCE_BOUND, 3, &mut |a| {
        if !a.is_invertible() {
            return false;
        }
        match eta_maximal(a, p, eta) {
            Ok(true) => {
                found = Some(a.clone());
                true
            }
            Ok(false) => false,
            Err(e) => {
                err = Some(e);
                true
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

fn neighbourhoods(full: ConeSet, len: usize, opens: &[ConeSet]) -> Vec<ConeSet> {
    (0..len).map(|i| opens.iter().filter(|&&o| o >> i & 1 == 1).fold(full, |acc, o| acc & o)).collect()
}

/// No two distinct points share all open neighbourhoods.
pub fn is_t0(nbhd: &[ConeSet]) -> bool {
    (0..nbhd.len()).all(|i| (i + 1..nbhd.len()).all(|j| !(nbhd[i] >> j & 1 == 1 && nbhd[j] >> i & 1 == 1)))
}

/// Every basic open `H_σ(a, b)` over generators is the union of the minimal
/// neighbourhoods of its points, and every minimal neighbourhood is already
/// some `H_σ(a)` or `H_σ(a, b)`.
fn subbasis_adequate(space: &ConeSpace, gens: &[AlgebraElement]) -> Result<bool> {
    let singles: Vec<ConeSet> = gens.iter().map(|a| space.single_open(a)).collect::<Result<_>>()?;
    let nb = neighbourhoods(space.full(), space.len(), &singles);
    let mut realized = std::collections::BTreeSet::new();
    for (i, a) in singles.iter().enumerate() {
        for b in &singles[i..] {
            let h = a & b;
            realized.insert(h);
            let cover = (0..space.len()).filter(|x| h >> x & 1 == 1).fold(0, |acc, x| acc | nb[x]);
            if cover != h {
                return Ok(false);
            }
        }
    }
    realized.insert(space.full());
    Ok(nb.iter().all(|u| realized.contains(u)))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MoritaConeMaps {
    /// `(cone over M_n(D), cone over D)`.
    pub pairs: Vec<(ConeId, ConeId)>,
    /// `PSD_n(Tr_n(𝒫)) = 𝒫` on sampled elements.
    pub psd_trace: bool,
    pub round_trip: bool,
    /// Subbasic opens pull back to opens and map to opens.
    pub homeomorphism: bool,
}

impl MoritaConeMaps {
    pub fn holds(&self) -> bool {
        self.psd_trace && self.round_trip && self.homeomorphism
    }
}

/// Membership of `m` in `PSD_n(𝒫')`: every `x*·m·x` with `x` a column of a
/// diagonalizing change of basis lies in `𝒫'`, checked on the reduced
/// diagonal and on sampled vectors.
fn psd_n(m: &AlgebraElement, cone_d: &PositiveCone, s: &mut Sampler) -> Result<bool> {
    let base = cone_d.algebra();
    let ring = base.ring();
    let n = m.algebra().n();
    let red = hermitian::hermitian_reduce(ring, m.matrix());
    for d in &red.diagonal {
        if !cone_membership(&base.diag_element(d.clone())?, cone_d)? {
            return Ok(false);
        }
    }
    if !red.residual.is_empty() {
        return cone_membership(m, &PositiveCone::new(&lift_eta(cone_d, n)?, cone_d.ordering(), cone_d.orientation())?);
    }
    for _ in 0..4 {
        let x: Vec<Vec<_>> = (0..n).map(|_| vec![s.d_element(ring)]).collect();
        let v = ring.congruence(m.matrix(), &x);
        if !cone_membership(&base.diag_element(v[0][0].clone())?, cone_d)? {
            return Err(Error::BrokenInvariant("x*·m·x left the cone for a reduced member".into()));
        }
    }
    Ok(true)
}

fn lift_eta(cone_d: &PositiveCone, n: usize) -> Result<ReferenceForm> {
    let base = cone_d.algebra();
    let eta = hermitian::reference_form(base)?;
    let lifted = hermitian::morita_expand(&eta.form, n)?;
    ReferenceForm::new(lifted)
}

/// `Tr_n(m) = Σ m_ii ∈ D`.
fn trace_n(m: &AlgebraElement, base: &AlgebraWithInvolution) -> Result<AlgebraElement> {
    let ring = base.ring();
    let mut acc = crate::algebra::Quaternion::zero(base.field());
    for i in 0..m.algebra().n() {
        acc = acc.add(m.entry(i, i));
    }
    let _ = ring;
    base.diag_element(acc)
}

/// The bijection `X_{(M_n(D),·)} ↔ X_{(D,·)}` induced by `Tr_n` and
/// `PSD_n`, with finite checks.
pub fn morita_cone_maps(eta: &ReferenceForm, seed: u64, samples: usize) -> Result<MoritaConeMaps> {
    let alg = eta.algebra();
    let n = alg.n();
    let big = ConeSpace::new(eta)?;
    if n == 1 {
        let pairs = big.cones.iter().map(|c| (c.id(), c.id())).collect();
        return Ok(MoritaConeMaps { pairs, psd_trace: true, round_trip: true, homeomorphism: true });
    }
    let base = alg.base_division();
    let small = ConeSpace::new(&eta.collapse())?;
    let mut s = Sampler::new(seed, 2);
    let members: Vec<AlgebraElement> = (0..samples).map(|_| s.symmetric_element(alg)).collect();

    let mut pairs = Vec::new();
    let mut forward = Vec::new();
    let mut psd_trace = true;
    for c in &big.cones {
        let a = maximal_element(alg, c.ordering(), eta)?
            .ok_or_else(|| Error::SearchExhausted("no maximal element".into()))?;
        let a = if c.contains(&a)? { a } else { a.neg() };
        let t = trace_n(&a, &base)?;
        let image = small
            .cones
            .iter()
            .position(|d| d.ordering() == c.ordering() && d.contains(&t).unwrap_or(false))
            .ok_or_else(|| Error::BrokenInvariant("trace of a maximal member lies in no cone".into()))?;
        let d = &small.cones[image];
        for m in &members {
            let inside = c.contains(m)?;
            if inside && !d.contains(&trace_n(m, &base)?)? {
                psd_trace = false;
            }
            if psd_n(m, d, &mut s)? != inside {
                psd_trace = false;
            }
        }
        pairs.push((c.id(), d.id()));
        forward.push(image);
    }
    let mut seen = vec![false; small.len()];
    for &i in &forward {
        seen[i] = true;
    }
    let round_trip = forward.len() == small.len() && seen.iter().all(|&b| b);

    let map = |set: ConeSet| forward.iter().enumerate().filter(|(i, _)| set >> i & 1 == 1).fold(0u64, |acc, (_, &j)| acc | 1 << j);
    let gens_small = small.generators(seed, samples, 2)?;
    let gens_big = big.generators(seed, samples, 2)?;
    let nb_small = small.minimal_neighbourhoods(&gens_small)?;
    let nb_big = big.minimal_neighbourhoods(&gens_big)?;
    let open_in = |set: ConeSet, nb: &[ConeSet]| (0..nb.len()).all(|i| set >> i & 1 == 0 || nb[i] & !set == 0);
    let mut homeomorphism = true;
    for d in &gens_small {
        let lifted = diagonal_lift(d, alg)?;
        let pre = big.single_open(&lifted)?;
        if map(pre) != small.single_open(d)? || !open_in(pre, &nb_big) {
            homeomorphism = false;
        }
    }
    for a in &gens_big {
        if !open_in(map(big.single_open(a)?), &nb_small) {
            homeomorphism = false;
        }
    }
    Ok(MoritaConeMaps { pairs, psd_trace, round_trip, homeomorphism })
}

/// `d ↦ d·I_n`.
fn diagonal_lift(d: &AlgebraElement, alg: &AlgebraWithInvolution) -> Result<AlgebraElement> {
    let n = alg.n();
    let ring = alg.ring();
    let mut m = ring.zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = d.entry(0, 0).clone();
    }
    alg.element(m)
}

/// Weights of the form `θ^j + c` used by searches, for tests.
pub fn small_field_elements(f: &NumberField, bound: i64) -> Vec<FieldElement> {
    let mut out = Vec::new();
    for j in 0..f.degree() as u32 {
        for c in -bound..=bound {
            let b = &f.generator().pow(j) + &f.from_int(c);
            if !b.is_zero() && !out.contains(&b) {
                out.push(b);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::reference_form;

    fn hamilton(f: &NumberField, n: usize) -> AlgebraWithInvolution {
        AlgebraWithInvolution::quat_symp(f, f.from_int(-1), f.from_int(-1), n).unwrap()
    }

    #[test]
    fn ideal_examples() {
        let f = NumberField::rationals();
        let alg = hamilton(&f, 1);
        let eta = reference_form(&alg).unwrap();
        let p = &f.orderings()[0];
        let pair = PrimeIdealPair::mod_p(&eta, p, 3).unwrap();
        let q = QuadraticForm::from_ints(&f, &[1, 1, 1]).unwrap();
        let h = HermitianForm::from_ints(&alg, &[1, 1, 1]).unwrap();
        assert_eq!(ideal_membership(&q, &h, &pair).unwrap(), (true, true));
        assert!(PrimeIdealPair::mod_p(&eta, p, 2).is_err());
        assert!(PrimeIdealPair::mod_p(&eta, p, 9).is_err());
        let k = PrimeIdealPair::signature_kernel(&eta, p).unwrap();
        let q0 = QuadraticForm::from_ints(&f, &[1, -1]).unwrap();
        let h0 = HermitianForm::from_ints(&alg, &[2, -3]).unwrap();
        assert_eq!(ideal_membership(&q0, &h0, &k).unwrap(), (true, true));
        for pair in [k, PrimeIdealPair::mod_p(&eta, p, 5).unwrap(), PrimeIdealPair::fundamental(&eta, vec![]).unwrap()] {
            assert_eq!(prime_property_sample(&pair, 40, 1).unwrap(), PrimeSample::Pass);
        }
        let fake = PrimeIdealPair::fabricated(&eta, p).unwrap();
        assert!(matches!(prime_property_sample(&fake, 40, 1).unwrap(), PrimeSample::Counterexample(_)));
    }

    #[test]
    fn morphism_examples() {
        let l = NumberField::from_int_coeffs(&[-2, 0, 1]).unwrap();
        let alg = hamilton(&l, 1);
        let eta = reference_form(&alg).unwrap();
        let (p1, p2) = (&l.orderings()[0], &l.orderings()[1]);
        match morphism_distinctness(p1, p2, &eta, 2).unwrap() {
            Distinctness::Separated { at_p, at_q, .. } => assert!(at_p * at_q < 0),
            Distinctness::Equivalent => panic!("orderings must separate"),
        }
        assert_eq!(morphism_distinctness(p1, p1, &eta, 2).unwrap(), Distinctness::Equivalent);
        let split = AlgebraWithInvolution::quat_symp(&l, l.one(), l.one(), 1).unwrap();
        assert!(SignatureMorphismPair::new(p1, &reference_form(&split).unwrap()).trivial);
    }

    #[test]
    fn topology_examples() {
        let f = NumberField::rationals();
        let alg = hamilton(&f, 1);
        let eta = reference_form(&alg).unwrap();
        let space = ConeSpace::new(&eta).unwrap();
        assert_eq!(space.ids(space.basic_open(&[alg.one()]).unwrap()), vec![(0, 1)]);
        assert_eq!(space.basic_open(&[]).unwrap(), space.full());
        let r = space.topology_compare(3, 20, 2).unwrap();
        assert!(r.equal && r.t0 && r.subbasis_adequate);

        let l = NumberField::from_int_coeffs(&[-2, 0, 1]).unwrap();
        let so = AlgebraWithInvolution::split_orth(&l, 2).unwrap();
        let space = ConeSpace::new(&reference_form(&so).unwrap()).unwrap();
        assert_eq!(space.len(), 4);
        let r = space.topology_compare(3, 20, 2).unwrap();
        assert!(r.equal && r.t0 && r.subbasis_adequate);
    }

    #[test]
    fn morita_examples() {
        let f = NumberField::rationals();
        let alg = hamilton(&f, 2);
        let m = morita_cone_maps(&reference_form(&alg).unwrap(), 5, 12).unwrap();
        assert_eq!(m.pairs, vec![((0, 1), (0, 1)), ((0, -1), (0, -1))]);
        assert!(m.holds());
        let split = AlgebraWithInvolution::quat_symp(&f, f.one(), f.one(), 2).unwrap();
        let m = morita_cone_maps(&reference_form(&split).unwrap(), 5, 4).unwrap();
        assert!(m.pairs.is_empty() && m.holds());
    }
}
