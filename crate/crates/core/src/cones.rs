//! Positive cones, η-maximality, positivity sets and sums of hermitian
//! squares.
//!
//! A positive cone is carried intensionally as `(P, ε)`: an ordering outside
//! the nil set and an orientation. Membership of a symmetric `a` is decided by
//! hermitian congruence reduction of `a` over `D`: every diagonal entry must
//! have a positive semidefinite rank-one trace form after the cone's sign.

use std::collections::HashMap;

use crate::algebra::{AlgebraElement, AlgebraWithInvolution, DMatrix, Quaternion};
use crate::error::{Error, Result};
use crate::field::{four_square_decomposition, FieldElement, Ordering};
use crate::hermitian::{
    self, collapsed_trace_form, entry_raw_signature, entry_trace_form, hermitian_diagonalize, HermitianForm,
    ReferenceForm,
};
use crate::quadform::{self, harrison_set, subset_product, FieldMatrix};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PositiveCone {
    algebra: AlgebraWithInvolution,
    ordering: Ordering,
    orientation: i32,
    eta_sign: i64,
}

impl PositiveCone {
    /// The cone `ε·𝒞_P(𝓜^η_P)`.
    pub fn new(eta: &ReferenceForm, p: &Ordering, orientation: i32) -> Result<Self> {
        let algebra = eta.algebra().clone();
        if !p.belongs_to(algebra.field()) {
            return Err(Error::FieldMismatch);
        }
        if algebra.is_nil(p) {
            return Err(Error::Precondition(format!("ordering {} is nil for {algebra:?}", p.index())));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::Precondition("orientation must be +1 or -1".into()));
        }
        Ok(PositiveCone { eta_sign: eta.sign_at(p), algebra, ordering: p.clone(), orientation })
    }

    pub fn algebra(&self) -> &AlgebraWithInvolution {
        &self.algebra
    }

    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    pub fn orientation(&self) -> i32 {
        self.orientation
    }

    /// `(ordering index, orientation)`.
    pub fn id(&self) -> (usize, i32) {
        (self.ordering.index(), self.orientation)
    }

    /// `ε·sgn s_P(η)`: the sign turning cone members into PSD trace forms.
    pub fn sign(&self) -> i64 {
        self.orientation as i64 * self.eta_sign
    }

    pub fn opposite(&self) -> PositiveCone {
        PositiveCone { orientation: -self.orientation, ..self.clone() }
    }

    pub fn contains(&self, a: &AlgebraElement) -> Result<bool> {
        cone_membership(a, self)
    }
}

fn check_symmetric(a: &AlgebraElement) -> Result<()> {
    match a.symmetry_violation() {
        Some((row, col)) => Err(Error::NotSymmetric { row, col }),
        None => Ok(()),
    }
}

fn scaled_psd(m: &FieldMatrix, sign: i64, p: &Ordering) -> Result<bool> {
    let f = p_field(m);
    let Some(f) = f else { return Ok(true) };
    let scaled: FieldMatrix = if sign < 0 { m.iter().map(|r| r.iter().map(|e| -e).collect()).collect() } else { m.clone() };
    quadform::is_psd(&f, &scaled, p)
}

fn p_field(m: &FieldMatrix) -> Option<crate::field::NumberField> {
    m.first().and_then(|r| r.first()).map(|e| e.field().clone())
}

/// Whether the diagonal entry `d` of a reduction is on the cone's side.
fn entry_in_cone(cone: &PositiveCone, d: &Quaternion) -> Result<bool> {
    let sign = cone.sign();
    if cone.algebra.epsilon() == 1 {
        // hermitian entries are central
        return Ok(sign * d.w.sign_at(&cone.ordering)? as i64 >= 0);
    }
    scaled_psd(&entry_trace_form(&cone.algebra.base_division(), d), sign, &cone.ordering)
}

/// `a ∈ 𝒫`: hermitian congruence reduction of `a`, every diagonal entry on
/// the cone's side; a trailing block without invertible pivots is decided by
/// its trace form, and the radical imposes nothing.
pub fn cone_membership(a: &AlgebraElement, cone: &PositiveCone) -> Result<bool> {
    if a.algebra() != &cone.algebra {
        return Err(Error::AlgebraMismatch);
    }
    check_symmetric(a)?;
    let red = hermitian::hermitian_reduce(cone.algebra.ring(), a.matrix());
    for d in &red.diagonal {
        if !entry_in_cone(cone, d)? {
            return Ok(false);
        }
    }
    if !red.residual.is_empty() {
        let base = cone.algebra.base_division();
        let form = HermitianForm::from_collapsed(&base, red.residual.clone())?;
        return scaled_psd(&collapsed_trace_form(&form), cone.sign(), &cone.ordering);
    }
    Ok(true)
}

/// The maximal rank-one signature on the family: `n_P`.
pub fn rank_one_max(algebra: &AlgebraWithInvolution) -> i64 {
    algebra.n_p() as i64
}

/// `a` is η-maximal at `P`: `sign^η_P ⟨a⟩_σ = n_P`. Vacuous at nil
/// orderings.
pub fn eta_maximal(a: &AlgebraElement, p: &Ordering, eta: &ReferenceForm) -> Result<bool> {
    if a.algebra() != eta.algebra() {
        return Err(Error::ReferenceMismatch);
    }
    check_symmetric(a)?;
    let h = HermitianForm::diagonal(a.algebra(), std::slice::from_ref(a))?;
    if !h.is_nondegenerate() {
        return Err(Error::NotInvertible);
    }
    if a.algebra().is_nil(p) {
        return Ok(true);
    }
    Ok(hermitian::signature(&h, p, eta)? == rank_one_max(a.algebra()))
}

/// Two cones per non-nil ordering, `+1` before `−1`.
pub fn enumerate_positive_cones(eta: &ReferenceForm) -> Vec<PositiveCone> {
    eta.algebra()
        .non_nil_orderings()
        .iter()
        .flat_map(|p| [1, -1].map(|e| PositiveCone::new(eta, p, e).expect("non-nil ordering")))
        .collect()
}

/// `X̃_F ≠ ∅`.
pub fn formally_real(algebra: &AlgebraWithInvolution) -> bool {
    !algebra.non_nil_orderings().is_empty()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PositivitySets {
    /// Orderings at which `T_{(A,σ,1)}` is positive semidefinite.
    pub x_sigma: Vec<Ordering>,
    /// The non-nil orderings.
    pub x_tilde: Vec<Ordering>,
    /// `X_σ = X̃_F`.
    pub ps_prime_holds: bool,
    /// The sufficient condition `X_σ = X̃_F` for the original property.
    pub ps_sufficient: bool,
}

pub fn positivity_sets(algebra: &AlgebraWithInvolution) -> Result<PositivitySets> {
    let one = HermitianForm::diagonal(algebra, &[algebra.unit_form_element()])?;
    let t = collapsed_trace_form(&one);
    let mut x_sigma = Vec::new();
    for p in algebra.field().orderings() {
        if quadform::is_psd(algebra.field(), &t, p)? {
            x_sigma.push(p.clone());
        }
    }
    let x_tilde = algebra.non_nil_orderings().to_vec();
    let eq = x_sigma == x_tilde;
    Ok(PositivitySets { x_sigma, x_tilde, ps_prime_holds: eq, ps_sufficient: eq })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AxiomFailure {
    /// No sampled element belongs to the set.
    P1,
    /// `a + b` left the set.
    P2 { a: AlgebraElement, b: AlgebraElement },
    /// `σ(x)·a·x` left the set.
    P3 { a: AlgebraElement, x: AlgebraElement },
    /// The weight stabilizes the set but is negative at `P`, or the
    /// reverse.
    P4 { weight: FieldElement },
    /// A nonzero `a` with `a` and `−a` both in the set.
    P5 { a: AlgebraElement },
}

impl AxiomFailure {
    pub fn axiom(&self) -> &'static str {
        match self {
            AxiomFailure::P1 => "P1",
            AxiomFailure::P2 { .. } => "P2",
            AxiomFailure::P3 { .. } => "P3",
            AxiomFailure::P4 { .. } => "P4",
            AxiomFailure::P5 { .. } => "P5",
        }
    }
}

/// First counterexample per axiom, in the order P1, P2, P3, P5, P4.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomReport {
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first(&self) -> Option<&AxiomFailure> {
        self.failures.first()
    }

    pub fn failed(&self, axiom: &str) -> bool {
        self.failures.iter().any(|f| f.axiom() == axiom)
    }
}

/// Sampled check of the prepositive-cone axioms for a candidate set given by
/// its membership predicate, over the ordering `p`.
pub fn prepositive_axiom_check(
    member: &dyn Fn(&AlgebraElement) -> Result<bool>,
    samples: &[AlgebraElement],
    multipliers: &[AlgebraElement],
    weights: &[FieldElement],
    p: &Ordering,
) -> Result<AxiomReport> {
    let mut members = Vec::new();
    for s in samples {
        if member(s)? {
            members.push(s.clone());
        }
    }
    let mut failures = Vec::new();
    if members.is_empty() {
        failures.push(AxiomFailure::P1);
        return Ok(AxiomReport { failures });
    }
    'p2: for (i, a) in members.iter().enumerate() {
        for b in &members[i..] {
            if !member(&a.add(b))? {
                failures.push(AxiomFailure::P2 { a: a.clone(), b: b.clone() });
                break 'p2;
            }
        }
    }
    'p3: for a in &members {
        for x in multipliers {
            if !member(&a.congruent(x))? {
                failures.push(AxiomFailure::P3 { a: a.clone(), x: x.clone() });
                break 'p3;
            }
        }
    }
    for a in &members {
        if !a.is_zero() && member(&a.neg())? {
            failures.push(AxiomFailure::P5 { a: a.clone() });
            break;
        }
    }
    for u in weights {
        let mut stabilizes = true;
        for a in &members {
            if !member(&a.scale(u))? {
                stabilizes = false;
                break;
            }
        }
        if stabilizes != (u.sign_at(p)? >= 0) {
            failures.push(AxiomFailure::P4 { weight: u.clone() });
            break;
        }
    }
    Ok(AxiomReport { failures })
}

/// The data `(a, b₁…b_t, k)` of the form `k × ⟪b₁,…,b_t⟫⟨a⟩_σ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SosParameters {
    pub a: AlgebraElement,
    pub slots: Vec<FieldElement>,
    pub k: usize,
}

impl SosParameters {
    pub fn new(a: AlgebraElement, slots: Vec<FieldElement>, k: usize) -> Result<Self> {
        check_symmetric(&a)?;
        for (i, b) in slots.iter().enumerate() {
            if b.is_zero() {
                return Err(Error::ZeroEntry(i));
            }
            if !b.field().same_as(a.algebra().field()) {
                return Err(Error::FieldMismatch);
            }
        }
        if k == 0 {
            return Err(Error::Shape("k must be at least 1".into()));
        }
        Ok(SosParameters { a, slots, k })
    }

    pub fn generator_count(&self) -> usize {
        self.k << self.slots.len()
    }

    /// Generator `g`: the subset product for `g mod 2^t` times `a`.
    pub fn generator(&self, g: usize) -> Result<AlgebraElement> {
        if g >= self.generator_count() {
            return Err(Error::Shape(format!("generator index {g} out of range {}", self.generator_count())));
        }
        let f = self.a.algebra().field();
        Ok(self.a.scale(&subset_product(f, &self.slots, g % (1 << self.slots.len()))))
    }

    /// `Y = H(b₁, …, b_t)`.
    pub fn positivity_set(&self) -> Result<Vec<Ordering>> {
        harrison_set(self.a.algebra().field(), &self.slots)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertificateTerm {
    pub weight: FieldElement,
    pub x: AlgebraElement,
    pub generator: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SquareCertificate {
    pub terms: Vec<CertificateTerm>,
}

impl SquareCertificate {
    /// `Σ wᵢ·σ(xᵢ)·gᵢ·xᵢ`.
    pub fn evaluate(&self, params: &SosParameters) -> Result<AlgebraElement> {
        let alg = params.a.algebra();
        let mut acc = alg.zero();
        for t in &self.terms {
            if t.x.algebra() != alg {
                return Err(Error::AlgebraMismatch);
            }
            let g = params.generator(t.generator)?;
            acc = acc.add(&g.congruent(&t.x).scale(&t.weight));
        }
        Ok(acc)
    }
}

/// Exact check `Σ wᵢ·σ(xᵢ)·gᵢ·xᵢ = u` with every weight positive on `Y`.
pub fn verify_certificate(u: &AlgebraElement, params: &SosParameters, cert: &SquareCertificate) -> Result<bool> {
    if u.algebra() != params.a.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let y = params.positivity_set()?;
    for (i, t) in cert.terms.iter().enumerate() {
        for p in &y {
            if t.weight.sign_at(p)? <= 0 {
                return Err(Error::WeightNotPositive { term: i, ordering: p.index() });
            }
        }
    }
    Ok(cert.evaluate(params)? == *u)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SosOutcome {
    Certificate(SquareCertificate),
    /// An ordering of `Y` at which `u` leaves the cone containing `a`, with
    /// the diagonal of a congruence reduction of `u` as witness.
    Refutation { ordering: Ordering, witness: Vec<Quaternion> },
    Unknown,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchBounds {
    pub height: i64,
    pub terms: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { height: 3, terms: 6 }
    }
}

/// Distinct values kept per height in the bounded search.
const POOL_LIMIT: usize = 48;
/// Candidate multipliers inspected per height in the bounded search.
const CANDIDATE_LIMIT: usize = 20_000;

/// Searches for `u ∈ D(k × ⟪b⟫⟨a⟩_σ)`.
///
/// The necessary condition is checked first: at every non-nil `P ∈ Y` where
/// `a` lies in one of the two cones, `u` must lie in the same cone. Over ℚ
/// with `a = 1` and a hermitian family the certificate is built directly from
/// a congruence reduction `u = Σ dᵢ·rᵢ*·rᵢ` and four-square splits of the
/// `dᵢ`; otherwise a bounded deterministic search runs.
pub fn find_sos_certificate(
    u: &AlgebraElement,
    params: &SosParameters,
    eta: &ReferenceForm,
    bounds: SearchBounds,
) -> Result<SosOutcome> {
    let alg = params.a.algebra();
    if u.algebra() != alg || eta.algebra() != alg {
        return Err(Error::AlgebraMismatch);
    }
    check_symmetric(u)?;
    if u.is_zero() {
        return Ok(SosOutcome::Certificate(SquareCertificate::default()));
    }
    for p in params.positivity_set()? {
        if alg.is_nil(&p) || params.a.is_zero() {
            continue;
        }
        let plus = PositiveCone::new(eta, &p, 1)?;
        let cone = if plus.contains(&params.a)? {
            plus
        } else if plus.opposite().contains(&params.a)? {
            plus.opposite()
        } else {
            continue;
        };
        if !cone.contains(u)? {
            let witness = hermitian::hermitian_reduce(alg.ring(), u.matrix()).diagonal;
            return Ok(SosOutcome::Refutation { ordering: p, witness });
        }
    }
    if let Some(cert) = constructive_certificate(u, params)? {
        return Ok(SosOutcome::Certificate(cert));
    }
    bounded_search(u, params, bounds)
}

fn constructive_certificate(u: &AlgebraElement, params: &SosParameters) -> Result<Option<SquareCertificate>> {
    let alg = params.a.algebra();
    if alg.epsilon() != 1 || !alg.field().is_rationals() || params.a != alg.one() {
        return Ok(None);
    }
    let ring = alg.ring();
    let red = hermitian_diagonalize(ring, u.matrix());
    if !red.residual.is_empty() {
        return Ok(None);
    }
    let mut pieces = Vec::new();
    for d in &red.diagonal {
        let r = d.w.as_rational().expect("entries over Q").clone();
        if r <= crate::Rational::from_integer(0.into()) {
            return Ok(None);
        }
        pieces.push(r);
    }
    let t_inv = ring.mat_inv(&red.transform)?;
    let f = alg.field();
    let n = alg.n();
    let mut terms = Vec::new();
    for (i, r) in pieces.iter().enumerate() {
        for c in four_square_decomposition(r)? {
            if c == crate::Rational::from_integer(0.into()) {
                continue;
            }
            let c = f.from_rational(c);
            let mut m = ring.zeros(n, n);
            for j in 0..n {
                m[0][j] = t_inv[i][j].scale(&c);
            }
            terms.push(CertificateTerm { weight: f.one(), x: alg.element(m)?, generator: 0 });
        }
    }
    let cert = SquareCertificate { terms };
    if cert.evaluate(params)? != *u {
        return Err(Error::BrokenInvariant("constructive certificate does not evaluate to the target".into()));
    }
    Ok(Some(cert))
}

/// Multipliers with one nonzero row, in order of increasing coordinate sum
/// and then lexicographically, with coordinates bounded by `h`.
fn multipliers(alg: &AlgebraWithInvolution, h: i64) -> Vec<AlgebraElement> {
    let n = alg.n();
    let ring = alg.ring();
    let f = alg.field();
    let dim = ring.dim();
    let deg = f.degree();
    // coordinates: for each of the n row entries, dim D-coordinates, each a
    // field element c₀ + c₁θ + …; only c₀ and (for deg > 1) c₁ vary
    let per_field = if deg > 1 { 2 } else { 1 };
    let slots = n * dim * per_field;
    let mut out = Vec::new();
    for total in 1..=(h * slots as i64) {
        let mut coords = vec![0i64; slots];
        enumerate_with_sum(&mut coords, 0, total, h, &mut |c| {
            if out.len() >= CANDIDATE_LIMIT * n {
                return;
            }
            for row in 0..n {
                let mut m = ring.zeros(n, n);
                for j in 0..n {
                    let mut q = Vec::with_capacity(dim);
                    for t in 0..dim {
                        let base = (j * dim + t) * per_field;
                        let mut e = f.from_int(c[base]);
                        if per_field == 2 {
                            e = &e + &f.generator().scale(&crate::Rational::from_integer(c[base + 1].into()));
                        }
                        q.push(e);
                    }
                    m[row][j] = ring.from_coords(&q);
                }
                out.push(alg.element(m).expect("entries lie in D"));
            }
        });
        if out.len() >= CANDIDATE_LIMIT * n {
            break;
        }
    }
    out
}

fn enumerate_with_sum(c: &mut Vec<i64>, pos: usize, remaining: i64, h: i64, visit: &mut dyn FnMut(&[i64])) {
    if pos == c.len() {
        if remaining == 0 {
            visit(c);
        }
        return;
    }
    let lim = remaining.min(h);
    for mag in 0..=lim {
        let signs: &[i64] = if mag == 0 { &[1] } else { &[1, -1] };
        for &s in signs {
            c[pos] = s * mag;
            enumerate_with_sum(c, pos + 1, remaining - mag, h, visit);
        }
    }
    c[pos] = 0;
}

fn bounded_search(u: &AlgebraElement, params: &SosParameters, bounds: SearchBounds) -> Result<SosOutcome> {
    let alg = params.a.algebra();
    let gens: Vec<AlgebraElement> = (0..(1usize << params.slots.len())).map(|g| params.generator(g)).collect::<Result<_>>()?;
    let target = u.matrix().clone();
    for h in 1..=bounds.height {
        let mut pool: Vec<(DMatrix, CertificateTerm)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        'fill: for x in multipliers(alg, h) {
            for (gi, g) in gens.iter().enumerate() {
                let v = g.congruent(&x);
                if v.is_zero() {
                    continue;
                }
                let key = v.matrix().clone();
                if seen.insert(key.clone()) {
                    pool.push((key, CertificateTerm { weight: alg.field().one(), x: x.clone(), generator: gi }));
                    if pool.len() >= POOL_LIMIT {
                        break 'fill;
                    }
                }
            }
        }
        for m in 1..=bounds.terms {
            if let Some(idx) = meet_in_middle(alg, &pool, &target, m) {
                let terms = idx.into_iter().map(|i| pool[i].1.clone()).collect();
                return Ok(SosOutcome::Certificate(SquareCertificate { terms }));
            }
        }
    }
    Ok(SosOutcome::Unknown)
}

fn mat_add(alg: &AlgebraWithInvolution, a: &DMatrix, b: &DMatrix) -> DMatrix {
    let _ = alg;
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(p, q)| p.add(q)).collect()).collect()
}

fn mat_sub(a: &DMatrix, b: &DMatrix) -> DMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(p, q)| p.sub(q)).collect()).collect()
}

/// Multisets of `m` pool indices summing to `target`: sums of the left
/// `⌊m/2⌋` are tabulated and the right part looked up.
fn meet_in_middle(alg: &AlgebraWithInvolution, pool: &[(DMatrix, CertificateTerm)], target: &DMatrix, m: usize) -> Option<Vec<usize>> {
    let left = m / 2;
    let right = m - left;
    let zero = alg.ring().zeros(alg.n(), alg.n());
    let mut table: HashMap<DMatrix, Vec<usize>> = HashMap::new();
    for_each_multiset(pool.len(), left, &mut |idx| {
        let mut s = zero.clone();
        for &i in idx {
            s = mat_add(alg, &s, &pool[i].0);
        }
        table.entry(s).or_insert_with(|| idx.to_vec());
        false
    });
    let mut found = None;
    for_each_multiset(pool.len(), right, &mut |idx| {
        let mut s = zero.clone();
        for &i in idx {
            s = mat_add(alg, &s, &pool[i].0);
        }
        if let Some(l) = table.get(&mat_sub(target, &s)) {
            let mut all = l.clone();
            all.extend_from_slice(idx);
            found = Some(all);
            return true;
        }
        false
    });
    found
}

fn for_each_multiset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    let mut idx = vec![0usize; k];
    if k == 0 {
        return visit(&idx);
    }
    if n == 0 {
        return false;
    }
    loop {
        if visit(&idx) {
            return true;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] + 1 < n {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[i];
                }
                break;
            }
        }
    }
}

/// `n_P² × ⟨u₁,…,u_t⟩ ⊗ h ≃ ⟨a₁,…,a_r⟩ ⊥ ⟨b₁,…,b_s⟩` with `t = 1`,
/// `u₁ = 1`, the `aᵢ` in the cone and the `bⱼ` in its opposite.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SylvesterDecomposition {
    pub t: usize,
    pub weights: Vec<FieldElement>,
    pub positive: Vec<Quaternion>,
    pub negative: Vec<Quaternion>,
    /// `(r − s)/(n_P·t)`.
    pub signature: i64,
}

/// Decomposition of a form over an `n = 1` algebra relative to a cone.
pub fn sylvester_decompose(h: &HermitianForm, cone: &PositiveCone) -> Result<SylvesterDecomposition> {
    let alg = h.algebra();
    if alg.n() != 1 {
        return Err(Error::Scope("decompose forms over the division member (collapse first)".into()));
    }
    if alg != cone.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let ring = alg.ring();
    let p = cone.ordering();
    let np = alg.n_p() as i64;
    let copies = (np * np) as usize;
    let red = hermitian::hermitian_reduce(ring, h.collapsed());
    if !red.residual.is_empty() {
        return Err(Error::Scope("no invertible pivot for part of the form".into()));
    }
    let classify = |d: &Quaternion| -> Result<i64> { Ok(cone.sign() * entry_raw_signature(alg, d, p)?) };
    let (mut positive, mut negative) = (Vec::new(), Vec::new());
    for d in &red.diagonal {
        let s = classify(d)?;
        if s == np {
            positive.extend(std::iter::repeat(d.clone()).take(copies));
        } else if s == -np {
            negative.extend(std::iter::repeat(d.clone()).take(copies));
        } else if s == 0 && alg.epsilon() == -1 && copies % 2 == 0 {
            let (v, w) = split_pair(alg, d, cone)?;
            for _ in 0..copies / 2 {
                positive.push(v.clone());
                negative.push(w.clone());
            }
        } else {
            return Err(Error::BrokenInvariant(format!("entry {d:?} has rank-one signature {s}, not ±{np}")));
        }
    }
    let diff = positive.len() as i64 - negative.len() as i64;
    if diff % np != 0 {
        return Err(Error::BrokenInvariant("r − s is not divisible by n_P".into()));
    }
    Ok(SylvesterDecomposition {
        t: 1,
        weights: vec![alg.field().one()],
        positive,
        negative,
        signature: diff / np,
    })
}

/// Rewrites `⟨d, d⟩` with `sign ⟨d⟩ = 0` as `⟨v⟩ ⊥ ⟨w⟩` with `v` in the cone
/// and `w` in its opposite.
fn split_pair(alg: &AlgebraWithInvolution, d: &Quaternion, cone: &PositiveCone) -> Result<(Quaternion, Quaternion)> {
    let ring = alg.ring();
    let f = alg.field();
    let p = cone.ordering();
    let np = alg.n_p() as i64;
    let small: Vec<Quaternion> = {
        let mut v = Vec::new();
        for w in -1..=1 {
            for x in -1..=1 {
                for y in -1..=1 {
                    for z in -1..=1 {
                        v.push(Quaternion::from_ints(f, [w, x, y, z]));
                    }
                }
            }
        }
        v
    };
    let pair = vec![vec![d.clone(), Quaternion::zero(f)], vec![Quaternion::zero(f), d.clone()]];
    for x1 in small.iter().filter(|q| ring.is_invertible(q)) {
        for x2 in &small {
            let t = vec![vec![x1.clone(), Quaternion::zero(f)], vec![x2.clone(), Quaternion::one(f)]];
            let m = ring.congruence(&pair, &t);
            if !ring.is_invertible(&m[0][0]) {
                continue;
            }
            let s = cone.sign() * entry_raw_signature(alg, &m[0][0], p)?;
            if s.abs() != np {
                continue;
            }
            let red = hermitian::hermitian_reduce(ring, &m);
            if red.diagonal.len() != 2 {
                continue;
            }
            let (v, w) = (red.diagonal[0].clone(), red.diagonal[1].clone());
            let sw = cone.sign() * entry_raw_signature(alg, &w, p)?;
            if s + sw != 0 {
                return Err(Error::BrokenInvariant("hyperbolic pair split into unbalanced parts".into()));
            }
            return Ok(if s > 0 { (v, w) } else { (w, v) });
        }
    }
    Err(Error::SearchExhausted("no maximal vector in a signature-zero pair".into()))
}
