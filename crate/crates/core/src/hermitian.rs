//! Hermitian forms over catalogue algebras and their signatures.
//!
//! A form of rank `k` over `M_n(D)` is stored collapsed: as an `nk × nk`
//! matrix `S` over `D` with `S* = εS`. Its signature at a non-nil ordering
//! is read off the collapsed trace form
//! `T'(v, w) = t_D(u·v*·S·w)` on `D^{nk}` (with `u = 1` outside the skew
//! family): the full trace form on `A^k` is `n` copies of `T'`, and
//! `s_P(h) = n·sign_P(T')·n_P / dim_F A`.

use crate::algebra::{AlgebraElement, AlgebraWithInvolution, DMatrix, Quaternion, ScalarRing};
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField, Ordering};
use crate::quadform::{self, block_diag, congruence_diagonal, FieldMatrix, GramQuadraticForm, QuadraticForm};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermitianForm {
    algebra: AlgebraWithInvolution,
    gram: DMatrix,
}

impl HermitianForm {
    /// From a collapsed `nk × nk` Gram matrix over `D`.
    pub fn from_collapsed(algebra: &AlgebraWithInvolution, gram: DMatrix) -> Result<Self> {
        let n = algebra.n();
        let size = gram.len();
        if size % n != 0 {
            return Err(Error::Shape(format!("collapsed size {size} is not a multiple of n = {n}")));
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {size}", row.len())));
            }
            for q in row {
                if !algebra.ring().contains(q) {
                    return Err(Error::InvalidAlgebra(format!("entry {q:?} does not lie in D")));
                }
            }
        }
        let eps = algebra.epsilon();
        for i in 0..size {
            for j in 0..=i {
                let c = gram[j][i].conj();
                let want = if eps == 1 { c } else { c.neg() };
                if gram[i][j] != want {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(HermitianForm { algebra: algebra.clone(), gram })
    }

    /// From a `k × k` Gram matrix of algebra elements.
    pub fn from_gram(algebra: &AlgebraWithInvolution, entries: &[Vec<AlgebraElement>]) -> Result<Self> {
        let k = entries.len();
        let n = algebra.n();
        let ring = algebra.ring();
        let mut gram = ring.zeros(n * k, n * k);
        for (r, row) in entries.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Shape(format!("row {r} has {} entries, expected {k}", row.len())));
            }
            for (s, e) in row.iter().enumerate() {
                if e.algebra() != algebra {
                    return Err(Error::AlgebraMismatch);
                }
                for i in 0..n {
                    for j in 0..n {
                        gram[r * n + i][s * n + j] = e.entry(i, j).clone();
                    }
                }
            }
        }
        HermitianForm::from_collapsed(algebra, gram).map_err(|e| match e {
            Error::NotSymmetric { row, col } => Error::NotSymmetric { row: row / n, col: col / n },
            other => other,
        })
    }

    /// `⟨a₁, …, a_k⟩_σ`.
    pub fn diagonal(algebra: &AlgebraWithInvolution, entries: &[AlgebraElement]) -> Result<Self> {
        let k = entries.len();
        let rows: Vec<Vec<AlgebraElement>> = (0..k)
            .map(|r| (0..k).map(|s| if r == s { entries[r].clone() } else { algebra.zero() }).collect())
            .collect();
        HermitianForm::from_gram(algebra, &rows)
    }

    /// `⟨d₁, …, d_k⟩_σ` with central entries `dᵢ·1`.
    pub fn from_scalars(algebra: &AlgebraWithInvolution, entries: &[FieldElement]) -> Result<Self> {
        if algebra.epsilon() != 1 {
            return Err(Error::InvalidAlgebra("central entries are not skew-symmetric".into()));
        }
        let elems: Vec<AlgebraElement> = entries.iter().map(|d| algebra.scalar(d.clone())).collect();
        HermitianForm::diagonal(algebra, &elems)
    }

    pub fn from_ints(algebra: &AlgebraWithInvolution, entries: &[i64]) -> Result<Self> {
        let f = algebra.field();
        HermitianForm::from_scalars(algebra, &entries.iter().map(|&e| f.from_int(e)).collect::<Vec<_>>())
    }

    /// The zero-dimensional form.
    pub fn zero(algebra: &AlgebraWithInvolution) -> Self {
        HermitianForm { algebra: algebra.clone(), gram: Vec::new() }
    }

    pub fn algebra(&self) -> &AlgebraWithInvolution {
        &self.algebra
    }

    pub fn field(&self) -> &NumberField {
        self.algebra.field()
    }

    /// Rank over `A`.
    pub fn rank(&self) -> usize {
        self.gram.len() / self.algebra.n()
    }

    pub fn collapsed(&self) -> &DMatrix {
        &self.gram
    }

    /// The `k × k` Gram matrix of algebra elements.
    pub fn gram_view(&self) -> Vec<Vec<AlgebraElement>> {
        let n = self.algebra.n();
        let k = self.rank();
        (0..k)
            .map(|r| {
                (0..k)
                    .map(|s| {
                        let m = (0..n).map(|i| (0..n).map(|j| self.gram[r * n + i][s * n + j].clone()).collect()).collect();
                        self.algebra.element(m).expect("blocks of a valid form")
                    })
                    .collect()
            })
            .collect()
    }

    /// Orthogonal sum.
    pub fn perp(&self, other: &HermitianForm) -> Result<HermitianForm> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(HermitianForm { algebra: self.algebra.clone(), gram: d_block_diag(self.algebra.ring(), &[&self.gram, &other.gram]) })
    }

    pub fn neg(&self) -> HermitianForm {
        let gram = self.gram.iter().map(|r| r.iter().map(Quaternion::neg).collect()).collect();
        HermitianForm { algebra: self.algebra.clone(), gram }
    }

    /// `q·h = ⊥ᵢ dᵢ·h` for `q = ⟨d₁, …⟩`.
    pub fn scale_by_quadratic(&self, q: &QuadraticForm) -> Result<HermitianForm> {
        if !q.field().same_as(self.field()) {
            return Err(Error::FieldMismatch);
        }
        let blocks: Vec<DMatrix> = q
            .entries()
            .iter()
            .map(|d| self.gram.iter().map(|r| r.iter().map(|e| e.scale(d)).collect()).collect())
            .collect();
        let refs: Vec<&DMatrix> = blocks.iter().collect();
        Ok(HermitianForm { algebra: self.algebra.clone(), gram: d_block_diag(self.algebra.ring(), &refs) })
    }

    /// `m` copies of the form.
    pub fn multiple(&self, m: usize) -> HermitianForm {
        let refs: Vec<&DMatrix> = (0..m).map(|_| &self.gram).collect();
        HermitianForm { algebra: self.algebra.clone(), gram: d_block_diag(self.algebra.ring(), &refs) }
    }

    /// The isometric form with Gram `T*·S·T` for a collapsed change of basis.
    pub fn congruent(&self, t: &DMatrix) -> Result<HermitianForm> {
        let size = self.gram.len();
        if t.len() != size || t.iter().any(|r| r.len() != size) {
            return Err(Error::Shape("change of basis must be square of the collapsed size".into()));
        }
        Ok(HermitianForm { algebra: self.algebra.clone(), gram: self.algebra.ring().congruence(&self.gram, t) })
    }

    /// Whether the form is nondegenerate.
    pub fn is_nondegenerate(&self) -> bool {
        let t = collapsed_trace_form(self);
        congruence_diagonal(self.field(), t.clone()).len() == t.len()
    }
}

pub(crate) fn d_block_diag(ring: &ScalarRing, blocks: &[&DMatrix]) -> DMatrix {
    let k: usize = blocks.iter().map(|b| b.len()).sum();
    let mut out = ring.zeros(k, k);
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out[off + i][off + j] = e.clone();
            }
        }
        off += b.len();
    }
    out
}

/// The trace pairing `t_D(u·conj(β)·d·γ)` on the `F`-basis of `D`, for a
/// single entry `d`.
pub fn entry_trace_form(algebra: &AlgebraWithInvolution, d: &Quaternion) -> FieldMatrix {
    let ring = algebra.ring();
    let basis = ring.basis();
    let left: Vec<Quaternion> = basis
        .iter()
        .map(|b| match algebra.skew_unit() {
            Some(u) => ring.mul(u, &b.conj()),
            None => b.conj(),
        })
        .collect();
    left.iter()
        .map(|l| {
            let ld = ring.mul(l, d);
            (0..basis.len()).map(|t| ring.trd_times_basis(&ld, t)).collect()
        })
        .collect()
}

/// `T'` on `D^{nk}` in the basis `e_r·β` (row index major).
pub fn collapsed_trace_form(h: &HermitianForm) -> FieldMatrix {
    let alg = &h.algebra;
    let dim = alg.ring().dim();
    let size = h.gram.len();
    let f = alg.field();
    let mut out = vec![vec![f.zero(); size * dim]; size * dim];
    for r in 0..size {
        for s in 0..size {
            let e = &h.gram[r][s];
            if e.is_zero() {
                continue;
            }
            let block = entry_trace_form(alg, e);
            for (i, row) in block.into_iter().enumerate() {
                for (j, v) in row.into_iter().enumerate() {
                    out[r * dim + i][s * dim + j] = v;
                }
            }
        }
    }
    out
}

/// Trace form of `h` on `A^k`: dimension `rank(h)·dim_F A`.
pub fn trace_form(h: &HermitianForm) -> GramQuadraticForm {
    let t = collapsed_trace_form(h);
    let blocks: Vec<FieldMatrix> = (0..h.algebra.n()).map(|_| t.clone()).collect();
    GramQuadraticForm::new(h.field(), block_diag(h.field(), &blocks)).expect("trace forms are symmetric")
}

/// Nonzero diagonal of a congruence reduction of `T'`.
pub fn trace_diagonal(h: &HermitianForm) -> Vec<FieldElement> {
    congruence_diagonal(h.field(), collapsed_trace_form(h))
}

/// Diagonal of `T'` after first reducing `h` over `D`: the trace form of a
/// diagonal form is block diagonal, one block per entry.
fn reduced_trace_diagonal(h: &HermitianForm) -> Vec<FieldElement> {
    let alg = &h.algebra;
    let f = alg.field();
    let red = hermitian_reduce(alg.ring(), &h.gram);
    let mut out = Vec::new();
    for d in &red.diagonal {
        out.extend(congruence_diagonal(f, entry_trace_form(alg, d)));
    }
    if !red.residual.is_empty() {
        let rest = HermitianForm { algebra: alg.clone(), gram: red.residual };
        out.extend(congruence_diagonal(f, collapsed_trace_form(&rest)));
    }
    out
}

fn scale_trace_signature(alg: &AlgebraWithInvolution, collapsed_sig: i64) -> Result<i64> {
    let num = collapsed_sig * (alg.n() * alg.n_p()) as i64;
    let den = alg.dim_f() as i64;
    if num % den != 0 {
        return Err(Error::BrokenInvariant(format!(
            "dim_F A = {den} does not divide n_P·sign(trace form) = {num} for {alg:?}"
        )));
    }
    Ok(num / den)
}

/// `n·sign_P(T')·n_P / dim_F A`, computed at every ordering, nil or not.
pub fn trace_signature(h: &HermitianForm, p: &Ordering) -> Result<i64> {
    let mut s = 0;
    for d in trace_diagonal(h) {
        s += d.sign_at(p)? as i64;
    }
    scale_trace_signature(&h.algebra, s)
}

/// Raw signature of the rank-one form `⟨d⟩` over `D` for an entry `d`.
pub fn entry_raw_signature(algebra: &AlgebraWithInvolution, d: &Quaternion, p: &Ordering) -> Result<i64> {
    if algebra.is_nil(p) {
        return Ok(0);
    }
    let base = algebra.base_division();
    let sig = quadform::diagonal_signature(base.field(), &entry_trace_form(&base, d), p)?;
    scale_trace_signature(&base, sig)
}

/// The raw signature `s_P(h)`: `0` at nil orderings, the trace-form value
/// elsewhere.
pub fn raw_signature(h: &HermitianForm, p: &Ordering) -> Result<i64> {
    if !p.belongs_to(h.field()) {
        return Err(Error::FieldMismatch);
    }
    if h.algebra.is_nil(p) {
        return Ok(0);
    }
    let mut s = 0;
    for d in reduced_trace_diagonal(h) {
        s += d.sign_at(p)? as i64;
    }
    scale_trace_signature(&h.algebra, s)
}

/// Raw signatures at every ordering of the field, sharing one reduction.
pub fn raw_signature_table(h: &HermitianForm) -> Result<Vec<(Ordering, i64)>> {
    let orderings = h.field().orderings();
    if orderings.iter().all(|p| h.algebra.is_nil(p)) {
        return Ok(orderings.iter().map(|p| (p.clone(), 0)).collect());
    }
    let diag = reduced_trace_diagonal(h);
    orderings
        .iter()
        .map(|p| {
            if h.algebra.is_nil(p) {
                return Ok((p.clone(), 0));
            }
            let mut s = 0;
            for d in &diag {
                s += d.sign_at(p)? as i64;
            }
            Ok((p.clone(), scale_trace_signature(&h.algebra, s)?))
        })
        .collect()
}

/// A reference form `η` with its certificate: `s_P(η)` at every non-nil
/// ordering, all nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReferenceForm {
    pub form: HermitianForm,
    pub certificate: Vec<(Ordering, i64)>,
}

impl ReferenceForm {
    /// Validates a user-supplied reference form.
    pub fn new(form: HermitianForm) -> Result<Self> {
        let mut certificate = Vec::new();
        for p in form.algebra.non_nil_orderings() {
            let s = raw_signature(&form, p)?;
            if s == 0 {
                return Err(Error::Precondition(format!("s_P vanishes at ordering {}", p.index())));
            }
            certificate.push((p.clone(), s));
        }
        Ok(ReferenceForm { form, certificate })
    }

    pub fn algebra(&self) -> &AlgebraWithInvolution {
        self.form.algebra()
    }

    /// `sgn s_P(η)`; `0` at nil orderings.
    pub fn sign_at(&self, p: &Ordering) -> i64 {
        self.certificate.iter().find(|(q, _)| q == p).map_or(0, |(_, s)| s.signum())
    }

    /// The transported reference form over the `n = 1` member.
    pub fn collapse(&self) -> ReferenceForm {
        ReferenceForm { form: morita_collapse(&self.form), certificate: self.certificate.clone() }
    }

    /// `η ⊗ L`.
    pub fn going_up(&self, l: &NumberField) -> Result<ReferenceForm> {
        ReferenceForm::new(going_up(&self.form, l)?)
    }
}

/// Default coefficient bound of the reference-form search.
pub const REFERENCE_BOUND: i64 = 2;

/// First reference form in the fixed search order: `⟨1⟩_σ`, then
/// `⟨c·e⟩` for `e` in `sym_basis` and `c` in `1, −1, 2, −2, …`, then sums
/// over two and three basis elements with coefficients of absolute value at
/// most `bound`.
pub fn reference_form(algebra: &AlgebraWithInvolution) -> Result<ReferenceForm> {
    reference_form_with_bound(algebra, REFERENCE_BOUND)
}

pub fn reference_form_with_bound(algebra: &AlgebraWithInvolution, bound: i64) -> Result<ReferenceForm> {
    let mut found = None;
    for_each_candidate(algebra, bound, 3, &mut |a| {
        let h = HermitianForm::diagonal(algebra, std::slice::from_ref(a)).expect("symmetric candidate");
        match ReferenceForm::new(h) {
            Ok(r) => {
                found = Some(r);
                true
            }
            Err(_) => false,
        }
    });
    found.ok_or(Error::NoReferenceForm(bound))
}

/// Coefficients `1, −1, 2, −2, …` up to `bound`.
pub fn signed_coefficients(bound: i64) -> Vec<i64> {
    (1..=bound).flat_map(|c| [c, -c]).collect()
}

/// Enumerates symmetric candidates in the reference-search order until the
/// visitor returns `true`.
pub(crate) fn for_each_candidate(
    algebra: &AlgebraWithInvolution,
    bound: i64,
    max_support: usize,
    visit: &mut dyn FnMut(&AlgebraElement) -> bool,
) {
    if visit(&algebra.unit_form_element()) {
        return;
    }
    let basis = algebra.sym_basis();
    let coeffs = signed_coefficients(bound);
    let f = algebra.field();
    for support in 1..=max_support.min(basis.len()) {
        let mut idx: Vec<usize> = (0..support).collect();
        loop {
            let mut cs = vec![0usize; support];
            loop {
                let mut a = algebra.zero();
                for (t, &i) in idx.iter().enumerate() {
                    a = a.add(&basis[i].scale(&f.from_int(coeffs[cs[t]])));
                }
                if visit(&a) {
                    return;
                }
                if !advance(&mut cs, coeffs.len()) {
                    break;
                }
            }
            if !next_combination(&mut idx, basis.len()) {
                break;
            }
        }
    }
}

pub(crate) fn advance(cs: &mut [usize], base: usize) -> bool {
    for c in cs.iter_mut().rev() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `sign^η_P h = sgn(s_P(η))·s_P(h)`.
pub fn signature(h: &HermitianForm, p: &Ordering, eta: &ReferenceForm) -> Result<i64> {
    if eta.algebra() != h.algebra() {
        return Err(Error::ReferenceMismatch);
    }
    if h.algebra.is_nil(p) {
        if !p.belongs_to(h.field()) {
            return Err(Error::FieldMismatch);
        }
        return Ok(0);
    }
    Ok(eta.sign_at(p) * raw_signature(h, p)?)
}

/// `P ↦ sign^η_P h` over all orderings of the field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermSignatureTable {
    pub entries: Vec<(Ordering, i64)>,
}

impl HermSignatureTable {
    pub fn values(&self) -> Vec<i64> {
        self.entries.iter().map(|(_, v)| *v).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| *v == 0)
    }

    pub fn get(&self, p: &Ordering) -> Option<i64> {
        self.entries.iter().find(|(q, _)| q == p).map(|(_, v)| *v)
    }
}

pub fn signature_table(h: &HermitianForm, eta: &ReferenceForm) -> Result<HermSignatureTable> {
    if eta.algebra() != h.algebra() {
        return Err(Error::ReferenceMismatch);
    }
    let entries = raw_signature_table(h)?.into_iter().map(|(p, s)| {
        let e = eta.sign_at(&p);
        (p, e * s)
    });
    Ok(HermSignatureTable { entries: entries.collect() })
}

/// Pfister's local-global principle: torsion iff every signature vanishes.
pub fn torsion_test_h(h: &HermitianForm, eta: &ReferenceForm) -> Result<bool> {
    Ok(signature_table(h, eta)?.is_zero())
}

/// Rereads a form over `M_n(D)` as a form of rank `nk` over `D`.
pub fn morita_collapse(h: &HermitianForm) -> HermitianForm {
    HermitianForm { algebra: h.algebra.base_division(), gram: h.gram.clone() }
}

/// Inverse of `morita_collapse`: a form over `D` of rank divisible by `n`
/// read as a form over `M_n(D)`.
pub fn morita_expand(h: &HermitianForm, n: usize) -> Result<HermitianForm> {
    if h.algebra.n() != 1 {
        return Err(Error::Precondition("expansion starts from the n = 1 member".into()));
    }
    if n == 0 || h.gram.len() % n != 0 {
        return Err(Error::Shape(format!("rank {} is not divisible by n = {n}", h.gram.len())));
    }
    Ok(HermitianForm { algebra: h.algebra.with_matrix_size(n), gram: h.gram.clone() })
}

/// Extension of scalars `h ↦ h ⊗ L` for forms over ℚ.
pub fn going_up(h: &HermitianForm, l: &NumberField) -> Result<HermitianForm> {
    if !h.field().is_rationals() {
        return Err(Error::UnsupportedBase("going-up is implemented from Q only".into()));
    }
    let embed = |e: &FieldElement| l.from_rational(e.as_rational().expect("rational element").clone());
    let alg = h.algebra.with_field(l, h.algebra.n(), embed)?;
    let gram = h
        .gram
        .iter()
        .map(|r| {
            r.iter()
                .map(|q| Quaternion::new(embed(&q.w), embed(&q.x), embed(&q.y), embed(&q.z)))
                .collect()
        })
        .collect();
    Ok(HermitianForm { algebra: alg, gram })
}

/// Checks `sign_Q^{η⊗L}(h ⊗ L) = sign_P^η(h)` at every `Q` of `L`.
pub fn going_up_check(h: &HermitianForm, l: &NumberField, eta: &ReferenceForm) -> Result<bool> {
    let p = h.field().orderings().first().cloned();
    let hl = going_up(h, l)?;
    let eta_l = eta.going_up(l)?;
    let base = match &p {
        Some(p) => signature(h, p, eta)?,
        None => return Ok(true),
    };
    for q in l.orderings() {
        if signature(&hl, q, &eta_l)? != base {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Scharlau transfer of a form over `A ⊗ L` down to the algebra `A` over ℚ:
/// the `D`-module `D_L^{m}` is `D^{m·[L:ℚ]}` with basis `e_r·θ^a`, and the
/// Gram entries are `Tr_{L/ℚ}(θ^{a+b}·S_rs)` coordinatewise.
pub fn transfer_hermitian(h: &HermitianForm, base: &AlgebraWithInvolution) -> Result<HermitianForm> {
    if !base.field().is_rationals() {
        return Err(Error::UnsupportedBase("transfer is implemented down to Q only".into()));
    }
    let l = h.field();
    let q = base.field();
    let deg = l.degree();
    let size = h.gram.len();
    let powers: Vec<FieldElement> = (0..2 * deg).map(|k| l.generator().pow(k as u32)).collect();
    let tr = |e: &FieldElement, k: usize| q.from_rational((e * &powers[k]).trace());
    let mut gram = base.ring().zeros(size * deg, size * deg);
    for r in 0..size {
        for s in 0..size {
            let e = &h.gram[r][s];
            if e.is_zero() {
                continue;
            }
            for a in 0..deg {
                for b in 0..deg {
                    gram[r * deg + a][s * deg + b] =
                        Quaternion::new(tr(&e.w, a + b), tr(&e.x, a + b), tr(&e.y, a + b), tr(&e.z, a + b));
                }
            }
        }
    }
    let hom = base.with_matrix_size(1);
    let collapsed = HermitianForm::from_collapsed(&hom, gram)?;
    if (size * deg) % base.n() == 0 {
        Ok(HermitianForm { algebra: base.clone(), gram: collapsed.gram })
    } else {
        Ok(collapsed)
    }
}

/// Both sides of the trace formula for `h` over `A ⊗ L`, plus the left side
/// recomputed through the quadratic transfer of the trace form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnebuschReport {
    pub transfer_side: i64,
    pub transfer_side_via_trace_form: i64,
    pub sum_side: i64,
    pub holds: bool,
}

pub fn knebusch_check(h: &HermitianForm, eta: &ReferenceForm) -> Result<KnebuschReport> {
    let base = eta.algebra();
    let q = base.field();
    if !q.is_rationals() {
        return Err(Error::UnsupportedBase("the reference form must live over Q".into()));
    }
    let l = h.field();
    let eta_l = eta.going_up(l)?;
    if eta_l.algebra().family() != h.algebra.family() || eta_l.algebra().n() != h.algebra.n() {
        return Err(Error::ReferenceMismatch);
    }
    let h = HermitianForm { algebra: eta_l.algebra().clone(), gram: h.gram.clone() };
    let p = &q.orderings()[0];

    let tr = transfer_hermitian(&h, base)?;
    let tr = if tr.algebra == *base { tr } else { return Err(Error::Shape("transfer rank not divisible by n".into())) };
    let transfer_side = signature(&tr, p, eta)?;

    let via = if base.is_nil(p) {
        0
    } else {
        let diag = trace_diagonal(&h);
        let sig = if diag.is_empty() {
            0
        } else {
            let qf = QuadraticForm::new(l, diag)?;
            quadform::transfer(&qf, q)?.signature(p)?
        };
        eta.sign_at(p) * scale_trace_signature(base, sig)?
    };

    let mut sum_side = 0;
    for qo in l.orderings() {
        sum_side += signature(&h, qo, &eta_l)?;
    }
    Ok(KnebuschReport {
        transfer_side,
        transfer_side_via_trace_form: via,
        sum_side,
        holds: transfer_side == sum_side && via == sum_side,
    })
}

/// Output of hermitian congruence reduction over `D`:
/// `T*·S·T = diag(d₁, …, d_r) ⊥ residual ⊥ 0`.
#[derive(Clone, Debug)]
pub struct HermitianDiagonalization {
    pub diagonal: Vec<Quaternion>,
    /// Trailing nonzero block without an invertible pivot (skew family over a
    /// split quaternion algebra only).
    pub residual: DMatrix,
    pub radical_dim: usize,
    pub transform: DMatrix,
}

/// Hermitian Gaussian elimination over `D` with `ε`-symmetric pivoting: the
/// first invertible diagonal entry is the pivot; failing that an off-diagonal
/// entry `c = S_ij` is folded in through `e_i ↦ e_i + e_j·λ` for the first
/// `λ ∈ {1, i, j, k}` making the new diagonal entry invertible.
pub fn hermitian_diagonalize(ring: &ScalarRing, s: &DMatrix) -> HermitianDiagonalization {
    reduce(ring, s, true)
}

/// `hermitian_diagonalize` without the change of basis (left empty).
pub fn hermitian_reduce(ring: &ScalarRing, s: &DMatrix) -> HermitianDiagonalization {
    reduce(ring, s, false)
}

fn reduce(ring: &ScalarRing, s: &DMatrix, track: bool) -> HermitianDiagonalization {
    let k = s.len();
    let mut m = s.clone();
    let mut t = if track { ring.identity(k) } else { Vec::new() };
    let mut diagonal = Vec::new();
    let basis = ring.basis();
    let mut p = 0;
    while p < k {
        let pivot = (p..k).find(|&i| !m[i][i].is_zero() && ring.is_invertible(&m[i][i]));
        let pivot = pivot.or_else(|| {
            for i in p..k {
                for j in p..k {
                    if i == j || m[i][j].is_zero() {
                        continue;
                    }
                    for lam in &basis {
                        let cand = m[i][i]
                            .add(&ring.mul(&m[i][j], lam))
                            .add(&ring.mul(&lam.conj(), &m[j][i]))
                            .add(&ring.mul(&ring.mul(&lam.conj(), &m[j][j]), lam));
                        if ring.is_invertible(&cand) {
                            // column i += column j·λ, row i += conj(λ)·row j
                            for row in m.iter_mut() {
                                let add = ring.mul(&row[j], lam);
                                row[i] = row[i].add(&add);
                            }
                            let lc = lam.conj();
                            let rj = m[j].clone();
                            for (c, e) in rj.iter().enumerate() {
                                m[i][c] = m[i][c].add(&ring.mul(&lc, e));
                            }
                            for row in t.iter_mut() {
                                let add = ring.mul(&row[j], lam);
                                row[i] = row[i].add(&add);
                            }
                            return Some(i);
                        }
                    }
                }
            }
            None
        });
        let Some(i) = pivot else { break };
        swap_d(&mut m, &mut t, p, i);
        let d = m[p][p].clone();
        let d_inv = ring.inv(&d).expect("pivot is invertible");
        for j in p + 1..k {
            if m[p][j].is_zero() {
                continue;
            }
            let f = ring.mul(&d_inv, &m[p][j]);
            for row in m.iter_mut() {
                if !row[p].is_zero() {
                    let sub = ring.mul(&row[p], &f);
                    row[j] = row[j].sub(&sub);
                }
            }
            let fc = f.conj();
            let rp = m[p].clone();
            for (c, e) in rp.iter().enumerate() {
                if !e.is_zero() {
                    m[j][c] = m[j][c].sub(&ring.mul(&fc, e));
                }
            }
            for row in t.iter_mut() {
                if !row[p].is_zero() {
                    let sub = ring.mul(&row[p], &f);
                    row[j] = row[j].sub(&sub);
                }
            }
        }
        diagonal.push(d);
        p += 1;
    }
    let rest: DMatrix = m[p..].iter().map(|r| r[p..].to_vec()).collect();
    let all_zero = rest.iter().flatten().all(Quaternion::is_zero);
    let (residual, radical_dim) = if all_zero { (Vec::new(), k - p) } else { (rest, 0) };
    HermitianDiagonalization { diagonal, residual, radical_dim, transform: t }
}

fn swap_d(m: &mut DMatrix, t: &mut DMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    m.swap(a, b);
    for row in m.iter_mut() {
        row.swap(a, b);
    }
    for row in t.iter_mut() {
        row.swap(a, b);
    }
}
