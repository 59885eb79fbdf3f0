//! Quadratic forms over a number field at the Witt level.
//!
//! Forms are carried diagonally. Witt classes are represented by diagonal
//! forms with syntactic cancellation of `⟨a, −a⟩` pairs only; everything
//! decided about a class goes through its signatures.

use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField, Ordering};

/// Square matrix over a number field, row-major.
pub type FieldMatrix = Vec<Vec<FieldElement>>;

/// Diagonal quadratic form `⟨d₁, …, d_k⟩` with nonzero entries. The empty
/// form is the zero form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadraticForm {
    field: NumberField,
    entries: Vec<FieldElement>,
}

impl QuadraticForm {
    pub fn new(field: &NumberField, entries: Vec<FieldElement>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !e.field().same_as(field) {
                return Err(Error::FieldMismatch);
            }
            if e.is_zero() {
                return Err(Error::ZeroEntry(i));
            }
        }
        Ok(QuadraticForm { field: field.clone(), entries })
    }

    pub fn from_ints(field: &NumberField, entries: &[i64]) -> Result<Self> {
        QuadraticForm::new(field, entries.iter().map(|&e| field.from_int(e)).collect())
    }

    pub fn zero(field: &NumberField) -> Self {
        QuadraticForm { field: field.clone(), entries: Vec::new() }
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn neg(&self) -> QuadraticForm {
        QuadraticForm { field: self.field.clone(), entries: self.entries.iter().map(|e| -e).collect() }
    }

    /// `m × q`, the orthogonal sum of `m` copies.
    pub fn multiple(&self, m: usize) -> QuadraticForm {
        let entries = (0..m).flat_map(|_| self.entries.iter().cloned()).collect();
        QuadraticForm { field: self.field.clone(), entries }
    }

    pub fn gram(&self) -> GramQuadraticForm {
        let k = self.rank();
        let mut m = vec![vec![self.field.zero(); k]; k];
        for (i, e) in self.entries.iter().enumerate() {
            m[i][i] = e.clone();
        }
        GramQuadraticForm { field: self.field.clone(), matrix: m }
    }

    /// Sylvester signature at `p`: the sum of the signs of the entries.
    pub fn signature(&self, p: &Ordering) -> Result<i64> {
        let mut s = 0;
        for e in &self.entries {
            s += e.sign_at(p)? as i64;
        }
        Ok(s)
    }

    pub fn total_signature(&self) -> TotalSignatureTable {
        let entries = self
            .field
            .orderings()
            .iter()
            .map(|p| (p.clone(), self.signature(p).expect("ordering of the form's field")))
            .collect();
        TotalSignatureTable { entries }
    }

    /// Pfister's local-global principle: torsion iff every signature is 0.
    pub fn is_torsion(&self) -> bool {
        self.total_signature().is_zero()
    }

    /// Orthogonal sum followed by cancellation of `⟨a, −a⟩` pairs.
    pub fn witt_sum(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        if !self.field.same_as(&other.field) {
            return Err(Error::FieldMismatch);
        }
        let all = self.entries.iter().chain(&other.entries).cloned();
        Ok(QuadraticForm { field: self.field.clone(), entries: cancel_hyperbolic(all) })
    }

    /// Tensor product (entrywise products) followed by cancellation.
    pub fn witt_tensor(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        if !self.field.same_as(&other.field) {
            return Err(Error::FieldMismatch);
        }
        let all = self.entries.iter().flat_map(|a| other.entries.iter().map(move |b| a * b));
        Ok(QuadraticForm { field: self.field.clone(), entries: cancel_hyperbolic(all) })
    }

    /// Orthogonal sum without cancellation.
    pub fn perp(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        if !self.field.same_as(&other.field) {
            return Err(Error::FieldMismatch);
        }
        let entries = self.entries.iter().chain(&other.entries).cloned().collect();
        Ok(QuadraticForm { field: self.field.clone(), entries })
    }
}

fn cancel_hyperbolic(entries: impl Iterator<Item = FieldElement>) -> Vec<FieldElement> {
    let mut out: Vec<FieldElement> = Vec::new();
    for e in entries {
        let neg = -&e;
        match out.iter().position(|x| *x == neg) {
            Some(i) => {
                out.remove(i);
            }
            None => out.push(e),
        }
    }
    out
}

/// The Pfister form `⟪b₁, …, b_t⟫ = ⊗ ⟨1, bᵢ⟩`: entry `s` is the product of
/// the `bᵢ` whose bit is set in `s`.
pub fn pfister(field: &NumberField, slots: &[FieldElement]) -> Result<QuadraticForm> {
    check_slots(field, slots)?;
    let entries = (0..1usize << slots.len()).map(|mask| subset_product(field, slots, mask)).collect();
    Ok(QuadraticForm { field: field.clone(), entries })
}

pub(crate) fn subset_product(field: &NumberField, slots: &[FieldElement], mask: usize) -> FieldElement {
    let mut acc = field.one();
    for (i, b) in slots.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc = &acc * b;
        }
    }
    acc
}

fn check_slots(field: &NumberField, slots: &[FieldElement]) -> Result<()> {
    for (i, b) in slots.iter().enumerate() {
        if !b.field().same_as(field) {
            return Err(Error::FieldMismatch);
        }
        if b.is_zero() {
            return Err(Error::ZeroEntry(i));
        }
    }
    Ok(())
}

/// Orderings at which every `bᵢ` is positive.
pub fn harrison_set(field: &NumberField, slots: &[FieldElement]) -> Result<Vec<Ordering>> {
    check_slots(field, slots)?;
    let mut out = Vec::new();
    'ord: for p in field.orderings() {
        for b in slots {
            if b.sign_at(p)? <= 0 {
                continue 'ord;
            }
        }
        out.push(p.clone());
    }
    Ok(out)
}

/// Total signature `P ↦ sign_P q`, one entry per ordering of the field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TotalSignatureTable {
    pub entries: Vec<(Ordering, i64)>,
}

impl TotalSignatureTable {
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

/// Symmetric bilinear form given by its Gram matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GramQuadraticForm {
    field: NumberField,
    matrix: FieldMatrix,
}

/// Output of symmetric congruence reduction: `Sᵀ G S = diag(d₁, …, d_r, 0, …, 0)`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub form: QuadraticForm,
    pub radical_dim: usize,
    pub transform: FieldMatrix,
}

impl GramQuadraticForm {
    pub fn new(field: &NumberField, matrix: FieldMatrix) -> Result<Self> {
        let k = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {k}", row.len())));
            }
            for (j, e) in row.iter().enumerate() {
                if !e.field().same_as(field) {
                    return Err(Error::FieldMismatch);
                }
                if j < i && *e != matrix[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(GramQuadraticForm { field: field.clone(), matrix })
    }

    pub fn from_ints(field: &NumberField, rows: &[&[i64]]) -> Result<Self> {
        let m = rows.iter().map(|r| r.iter().map(|&e| field.from_int(e)).collect()).collect();
        GramQuadraticForm::new(field, m)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// `Sᵀ G S`.
    pub fn congruent(&self, s: &FieldMatrix) -> Result<GramQuadraticForm> {
        if s.len() != self.dim() {
            return Err(Error::Shape("transform rows must match the form dimension".into()));
        }
        let prod = mat_mul(&transpose(s), &mat_mul(&self.matrix, s));
        Ok(GramQuadraticForm { field: self.field.clone(), matrix: prod })
    }

    /// Symmetric Gaussian elimination with the first-nonzero-diagonal pivot
    /// rule. When the remaining diagonal vanishes but the block does not, the
    /// first nonzero off-diagonal pair `(i, j)` is rotated by
    /// `eᵢ ↦ eᵢ ± eⱼ/2`, which turns `[[0, c], [c, 0]]` into `⟨c, −c⟩`.
    pub fn diagonalize(&self) -> Diagonalization {
        let (diag, transform) = congruence_reduce(&self.field, self.matrix.clone(), true);
        let rank = diag.len();
        Diagonalization {
            form: QuadraticForm { field: self.field.clone(), entries: diag },
            radical_dim: self.dim() - rank,
            transform: transform.expect("tracked"),
        }
    }

    /// Signature of the nondegenerate part.
    pub fn signature(&self, p: &Ordering) -> Result<i64> {
        diagonal_signature(&self.field, &self.matrix, p)
    }

    pub fn total_signature(&self) -> TotalSignatureTable {
        self.diagonalize().form.total_signature()
    }
}

/// Diagonal entries of a congruence reduction of a symmetric matrix, without
/// the transform. Zero pivots (the radical) are dropped.
pub fn congruence_diagonal(field: &NumberField, matrix: FieldMatrix) -> Vec<FieldElement> {
    congruence_reduce(field, matrix, false).0
}

/// Signature of a symmetric matrix at an ordering.
pub fn diagonal_signature(field: &NumberField, matrix: &FieldMatrix, p: &Ordering) -> Result<i64> {
    let mut s = 0;
    for d in congruence_diagonal(field, matrix.clone()) {
        s += d.sign_at(p)? as i64;
    }
    Ok(s)
}

/// Whether a symmetric matrix is positive semidefinite at `p`.
pub fn is_psd(field: &NumberField, matrix: &FieldMatrix, p: &Ordering) -> Result<bool> {
    for d in congruence_diagonal(field, matrix.clone()) {
        if d.sign_at(p)? < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn congruence_reduce(field: &NumberField, mut m: FieldMatrix, track: bool) -> (Vec<FieldElement>, Option<FieldMatrix>) {
    let k = m.len();
    let mut s = track.then(|| identity(field, k));
    let mut diag = Vec::with_capacity(k);
    let half = field.from_rational(crate::Rational::new(1.into(), 2.into()));
    for p in 0..k {
        let pivot = (p..k).find(|&i| !m[i][i].is_zero());
        match pivot {
            Some(i) => swap_index(&mut m, s.as_mut(), p, i),
            None => {
                let pair = (p..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).find(|&(i, j)| !m[i][j].is_zero());
                let Some((i, j)) = pair else { break };
                swap_index(&mut m, s.as_mut(), p, i);
                swap_index(&mut m, s.as_mut(), p + 1, j);
                // e_p ← e_p + e_{p+1}/2, e_{p+1} ← e_p − e_{p+1}/2
                let t = [[field.one(), field.one()], [half.clone(), -&half]];
                apply_local(&mut m, s.as_mut(), p, p + 1, &t);
            }
        }
        let d = m[p][p].clone();
        let d_inv = d.inv().expect("nonzero pivot in a field");
        let row = m[p].clone();
        for j in p + 1..k {
            if row[j].is_zero() {
                continue;
            }
            let f = &row[j] * &d_inv;
            for l in p + 1..k {
                if !row[l].is_zero() {
                    let delta = &f * &row[l];
                    m[j][l] = &m[j][l] - &delta;
                }
            }
            m[p][j] = field.zero();
            m[j][p] = field.zero();
            if let Some(s) = s.as_mut() {
                for row in s.iter_mut() {
                    if !row[p].is_zero() {
                        let delta = &f * &row[p];
                        row[j] = &row[j] - &delta;
                    }
                }
            }
        }
        diag.push(d);
    }
    (diag, s)
}

fn swap_index(m: &mut FieldMatrix, s: Option<&mut FieldMatrix>, a: usize, b: usize) {
    if a == b {
        return;
    }
    m.swap(a, b);
    for row in m.iter_mut() {
        row.swap(a, b);
    }
    if let Some(s) = s {
        for row in s.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// Replaces basis vectors `(e_a, e_b)` by `(t00 e_a + t10 e_b, t01 e_a + t11 e_b)`.
fn apply_local(m: &mut FieldMatrix, s: Option<&mut FieldMatrix>, a: usize, b: usize, t: &[[FieldElement; 2]; 2]) {
    let k = m.len();
    // columns
    for row in m.iter_mut() {
        let (ra, rb) = (row[a].clone(), row[b].clone());
        row[a] = &(&ra * &t[0][0]) + &(&rb * &t[1][0]);
        row[b] = &(&ra * &t[0][1]) + &(&rb * &t[1][1]);
    }
    // rows
    for c in 0..k {
        let (ma, mb) = (m[a][c].clone(), m[b][c].clone());
        m[a][c] = &(&ma * &t[0][0]) + &(&mb * &t[1][0]);
        m[b][c] = &(&ma * &t[0][1]) + &(&mb * &t[1][1]);
    }
    if let Some(s) = s {
        for row in s.iter_mut() {
            let (ra, rb) = (row[a].clone(), row[b].clone());
            row[a] = &(&ra * &t[0][0]) + &(&rb * &t[1][0]);
            row[b] = &(&ra * &t[0][1]) + &(&rb * &t[1][1]);
        }
    }
}

pub fn identity(field: &NumberField, k: usize) -> FieldMatrix {
    (0..k).map(|i| (0..k).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect()
}

pub fn transpose(m: &FieldMatrix) -> FieldMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &FieldMatrix, b: &FieldMatrix) -> FieldMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = row.first().map(|e| e.field().zero()).expect("nonempty row");
                    for t in 0..inner {
                        if !row[t].is_zero() && !b[t][j].is_zero() {
                            acc = &acc + &(&row[t] * &b[t][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Scharlau transfer along the absolute trace `Tr_{L/ℚ}`: the Gram matrix over
/// ℚ, in the power basis of `L`, of `(x, y) ↦ Σ_d Tr(d·x·y)` over the entries
/// `d` of `q`.
pub fn transfer(q: &QuadraticForm, base: &NumberField) -> Result<GramQuadraticForm> {
    if !base.is_rationals() {
        return Err(Error::UnsupportedBase(format!(
            "transfer is implemented down to Q only, got {:?}",
            base
        )));
    }
    let l = q.field();
    let deg = l.degree();
    let powers: Vec<FieldElement> = (0..deg).map(|k| l.generator().pow(k as u32)).collect();
    let mut blocks = Vec::new();
    for d in q.entries() {
        let mut m = vec![vec![base.zero(); deg]; deg];
        for a in 0..deg {
            for b in a..deg {
                let t = (&(d * &powers[a]) * &powers[b]).trace();
                m[a][b] = base.from_rational(t.clone());
                m[b][a] = base.from_rational(t);
            }
        }
        blocks.push(m);
    }
    Ok(GramQuadraticForm { field: base.clone(), matrix: block_diag(base, &blocks) })
}

pub fn block_diag(field: &NumberField, blocks: &[FieldMatrix]) -> FieldMatrix {
    let k: usize = blocks.iter().map(Vec::len).sum();
    let mut out = vec![vec![field.zero(); k]; k];
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
