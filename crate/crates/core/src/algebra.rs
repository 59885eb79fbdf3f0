//! The catalogue of algebras with involution.
//!
//! Every member is `M_n(D)` with `D` one of `F`, `K = F(√δ)` or a quaternion
//! algebra `(a, b)_F`, and the involution is conjugate-transpose. Elements of
//! `D` are uniformly stored as quaternion coordinates `w + x·i + y·j + z·k`:
//! `F` uses `w` only and `K` uses `w + x·√δ` (so `i² = δ` there).
//!
//! Orthogonal involutions on quaternion algebras appear as the `QuatSkew`
//! family: skew-hermitian data over conjugation. A fixed pure quaternion `u`
//! with `u² <_P 0` at every non-nil ordering turns the skew-hermitian trace
//! pairing into a symmetric one; `σ = Int(u)∘conj` is the modeled involution.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField, Ordering};

/// `w + x·i + y·j + z·k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Quaternion {
    pub w: FieldElement,
    pub x: FieldElement,
    pub y: FieldElement,
    pub z: FieldElement,
}

impl Quaternion {
    pub fn new(w: FieldElement, x: FieldElement, y: FieldElement, z: FieldElement) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn scalar(c: FieldElement) -> Self {
        let z = c.field().zero();
        Quaternion { w: c, x: z.clone(), y: z.clone(), z }
    }

    pub fn from_ints(field: &NumberField, c: [i64; 4]) -> Self {
        let [w, x, y, z] = c.map(|v| field.from_int(v));
        Quaternion { w, x, y, z }
    }

    pub fn zero(field: &NumberField) -> Self {
        Quaternion::scalar(field.zero())
    }

    pub fn one(field: &NumberField) -> Self {
        Quaternion::scalar(field.one())
    }

    pub fn field(&self) -> &NumberField {
        self.w.field()
    }

    pub fn coords(&self) -> [&FieldElement; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|c| c.is_zero())
    }

    pub fn is_scalar(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn is_pure(&self) -> bool {
        self.w.is_zero()
    }

    pub fn add(&self, o: &Quaternion) -> Quaternion {
        Quaternion { w: &self.w + &o.w, x: &self.x + &o.x, y: &self.y + &o.y, z: &self.z + &o.z }
    }

    pub fn sub(&self, o: &Quaternion) -> Quaternion {
        Quaternion { w: &self.w - &o.w, x: &self.x - &o.x, y: &self.y - &o.y, z: &self.z - &o.z }
    }

    pub fn neg(&self) -> Quaternion {
        Quaternion { w: -&self.w, x: -&self.x, y: -&self.y, z: -&self.z }
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion { w: self.w.clone(), x: -&self.x, y: -&self.y, z: -&self.z }
    }

    /// Multiplication by a central scalar.
    pub fn scale(&self, c: &FieldElement) -> Quaternion {
        if self.is_scalar() {
            return Quaternion::scalar(&self.w * c);
        }
        Quaternion { w: &self.w * c, x: &self.x * c, y: &self.y * c, z: &self.z * c }
    }
}

/// Which `D` the coordinates live in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DivisionKind {
    Field,
    Quadratic,
    Quaternion,
}

/// The ring `D` with its structure constants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarRing {
    pub kind: DivisionKind,
    /// `i²`: `a` for quaternions, `δ` for the quadratic case.
    pub a: FieldElement,
    /// `j²` for quaternions.
    pub b: FieldElement,
}

impl ScalarRing {
    pub fn field(&self) -> &NumberField {
        self.a.field()
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            DivisionKind::Field => 1,
            DivisionKind::Quadratic => 2,
            DivisionKind::Quaternion => 4,
        }
    }

    pub fn mul(&self, p: &Quaternion, q: &Quaternion) -> Quaternion {
        if p.is_scalar() {
            return q.scale(&p.w);
        }
        if q.is_scalar() {
            return p.scale(&q.w);
        }
        let (a, b) = (&self.a, &self.b);
        match self.kind {
            DivisionKind::Field => Quaternion::scalar(&p.w * &q.w),
            DivisionKind::Quadratic => {
                let zero = p.field().zero();
                Quaternion {
                    w: &(&p.w * &q.w) + &(a * &(&p.x * &q.x)),
                    x: &(&p.w * &q.x) + &(&p.x * &q.w),
                    y: zero.clone(),
                    z: zero,
                }
            }
            DivisionKind::Quaternion => {
                let ab = a * b;
                Quaternion {
                    w: &(&(&(&p.w * &q.w) + &(a * &(&p.x * &q.x))) + &(b * &(&p.y * &q.y))) - &(&ab * &(&p.z * &q.z)),
                    x: &(&(&(&p.w * &q.x) + &(&p.x * &q.w)) - &(b * &(&p.y * &q.z))) + &(b * &(&p.z * &q.y)),
                    y: &(&(&(&p.w * &q.y) + &(&p.y * &q.w)) + &(a * &(&p.x * &q.z))) - &(a * &(&p.z * &q.x)),
                    z: &(&(&(&p.w * &q.z) + &(&p.z * &q.w)) + &(&p.x * &q.y)) - &(&p.y * &q.x),
                }
            }
        }
    }

    /// Reduced norm `q·conj(q)`: `w² − a x² − b y² + ab z²`.
    pub fn nrd(&self, q: &Quaternion) -> FieldElement {
        match self.kind {
            DivisionKind::Field => &q.w * &q.w,
            DivisionKind::Quadratic => &(&q.w * &q.w) - &(&self.a * &(&q.x * &q.x)),
            DivisionKind::Quaternion => {
                let ab = &self.a * &self.b;
                &(&(&(&q.w * &q.w) - &(&self.a * &(&q.x * &q.x))) - &(&self.b * &(&q.y * &q.y))) + &(&ab * &(&q.z * &q.z))
            }
        }
    }

    /// Reduced trace `q + conj(q) = 2w` for quaternions; the trace of `K/F`
    /// in the quadratic case and the identity for `D = F`.
    pub fn trd(&self, q: &Quaternion) -> FieldElement {
        match self.kind {
            DivisionKind::Field => q.w.clone(),
            _ => &q.w + &q.w,
        }
    }

    /// `Trd(q·e_t)` for the `t`-th basis element, without multiplying out.
    pub fn trd_times_basis(&self, q: &Quaternion, t: usize) -> FieldElement {
        let two = |e: &FieldElement| e + e;
        match (self.kind, t) {
            (DivisionKind::Field, _) => q.w.clone(),
            (_, 0) => two(&q.w),
            (_, 1) => two(&(&self.a * &q.x)),
            (_, 2) => two(&(&self.b * &q.y)),
            _ => -&two(&(&(&self.a * &self.b) * &q.z)),
        }
    }

    pub fn inv(&self, q: &Quaternion) -> Result<Quaternion> {
        let n = self.nrd(q);
        if n.is_zero() {
            return Err(Error::NotInvertible);
        }
        let n_inv = n.inv()?;
        Ok(q.conj().scale(&n_inv))
    }

    pub fn is_invertible(&self, q: &Quaternion) -> bool {
        !self.nrd(q).is_zero()
    }

    /// `F`-basis of `D`: `1`, `i`, `j`, `k` truncated to the dimension.
    pub fn basis(&self) -> Vec<Quaternion> {
        let f = self.field();
        let units = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        units[..self.dim()].iter().map(|&c| Quaternion::from_ints(f, c)).collect()
    }

    /// Coordinates with respect to `basis`.
    pub fn to_coords(&self, q: &Quaternion) -> Vec<FieldElement> {
        q.coords()[..self.dim()].iter().map(|&c| c.clone()).collect()
    }

    pub fn from_coords(&self, c: &[FieldElement]) -> Quaternion {
        let f = self.field();
        let get = |i: usize| c.get(i).cloned().unwrap_or_else(|| f.zero());
        Quaternion { w: get(0), x: get(1), y: get(2), z: get(3) }
    }

    /// Whether `q` lies in `D` (coordinates beyond the dimension vanish).
    pub fn contains(&self, q: &Quaternion) -> bool {
        q.field().same_as(self.field()) && q.coords()[self.dim()..].iter().all(|c| c.is_zero())
    }
}

/// Square matrix over `D`, row-major.
pub type DMatrix = Vec<Vec<Quaternion>>;

impl ScalarRing {
    pub fn identity(&self, k: usize) -> DMatrix {
        let f = self.field();
        (0..k)
            .map(|i| (0..k).map(|j| if i == j { Quaternion::one(f) } else { Quaternion::zero(f) }).collect())
            .collect()
    }

    pub fn zeros(&self, rows: usize, cols: usize) -> DMatrix {
        vec![vec![Quaternion::zero(self.field()); cols]; rows]
    }

    pub fn mat_mul(&self, p: &DMatrix, q: &DMatrix) -> DMatrix {
        let inner = q.len();
        let cols = q.first().map_or(0, Vec::len);
        p.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| {
                        let mut acc = Quaternion::zero(self.field());
                        for t in 0..inner {
                            if !row[t].is_zero() && !q[t][j].is_zero() {
                                acc = acc.add(&self.mul(&row[t], &q[t][j]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self, m: &DMatrix) -> DMatrix {
        if m.is_empty() {
            return Vec::new();
        }
        (0..m[0].len()).map(|j| m.iter().map(|row| row[j].conj()).collect()).collect()
    }

    /// `T* M T`.
    pub fn congruence(&self, m: &DMatrix, t: &DMatrix) -> DMatrix {
        self.mat_mul(&self.adjoint(t), &self.mat_mul(m, t))
    }

    /// Inverse by Gauss–Jordan elimination over `D`.
    pub fn mat_inv(&self, m: &DMatrix) -> Result<DMatrix> {
        let k = m.len();
        let mut a = m.clone();
        let mut inv = self.identity(k);
        for c in 0..k {
            let p = (c..k).find(|&r| self.is_invertible(&a[r][c])).ok_or(Error::NotInvertible)?;
            a.swap(p, c);
            inv.swap(p, c);
            let piv_inv = self.inv(&a[c][c])?;
            for j in 0..k {
                a[c][j] = self.mul(&piv_inv, &a[c][j]);
                inv[c][j] = self.mul(&piv_inv, &inv[c][j]);
            }
            for r in 0..k {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..k {
                    a[r][j] = a[r][j].sub(&self.mul(&f, &a[c][j]));
                    inv[r][j] = inv[r][j].sub(&self.mul(&f, &inv[c][j]));
                }
            }
        }
        Ok(inv)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Family {
    /// `(M_n(F), transpose)`.
    SplitOrth,
    /// `(M_n(F(√δ)), conjugate-transpose)`.
    Unitary { delta: FieldElement },
    /// `(M_n((a,b)_F), conjugate-transpose)`.
    QuatSymp { a: FieldElement, b: FieldElement },
    /// Skew-hermitian forms over `(M_n((a,b)_F), conjugate-transpose)`.
    QuatSkew { a: FieldElement, b: FieldElement },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::SplitOrth => "split_orth",
            Family::Unitary { .. } => "unitary",
            Family::QuatSymp { .. } => "quat_symp",
            Family::QuatSkew { .. } => "quat_skew",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InvolutionType {
    Orthogonal,
    Unitary,
    Symplectic,
}

struct AlgebraData {
    family: Family,
    n: usize,
    ring: ScalarRing,
    skew_unit: Option<Quaternion>,
    nil: Vec<Ordering>,
    non_nil: Vec<Ordering>,
}

/// A member of the catalogue. Cloning is cheap.
#[derive(Clone)]
pub struct AlgebraWithInvolution {
    inner: Arc<AlgebraData>,
}

impl PartialEq for AlgebraWithInvolution {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.family == other.inner.family && self.inner.n == other.inner.n)
    }
}

impl Eq for AlgebraWithInvolution {}

impl fmt::Debug for AlgebraWithInvolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.family {
            Family::SplitOrth => write!(f, "SplitOrth(n={})", self.inner.n),
            Family::Unitary { delta } => write!(f, "Unitary(δ={delta}, n={})", self.inner.n),
            Family::QuatSymp { a, b } => write!(f, "QuatSymp({a}, {b}, n={})", self.inner.n),
            Family::QuatSkew { a, b } => write!(f, "QuatSkew({a}, {b}, n={})", self.inner.n),
        }
    }
}

impl AlgebraWithInvolution {
    pub fn new(field: &NumberField, family: Family, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAlgebra("matrix size n must be at least 1".into()));
        }
        let ring = match &family {
            Family::SplitOrth => {
                ScalarRing { kind: DivisionKind::Field, a: field.zero(), b: field.zero() }
            }
            Family::Unitary { delta } => {
                check_param(field, delta, "δ")?;
                if delta.is_square() {
                    return Err(Error::InvalidAlgebra(format!("δ = {delta} is a square in the base field")));
                }
                ScalarRing { kind: DivisionKind::Quadratic, a: delta.clone(), b: field.zero() }
            }
            Family::QuatSymp { a, b } | Family::QuatSkew { a, b } => {
                check_param(field, a, "a")?;
                check_param(field, b, "b")?;
                ScalarRing { kind: DivisionKind::Quaternion, a: a.clone(), b: b.clone() }
            }
        };
        let (nil, non_nil): (Vec<Ordering>, Vec<Ordering>) = field
            .orderings()
            .iter()
            .cloned()
            .partition(|p| is_nil_at(&family, p));
        let skew_unit = match &family {
            Family::QuatSkew { .. } => Some(find_skew_unit(&ring, &non_nil)?),
            _ => None,
        };
        Ok(AlgebraWithInvolution { inner: Arc::new(AlgebraData { family, n, ring, skew_unit, nil, non_nil }) })
    }

    pub fn split_orth(field: &NumberField, n: usize) -> Result<Self> {
        Self::new(field, Family::SplitOrth, n)
    }

    pub fn unitary(field: &NumberField, delta: FieldElement, n: usize) -> Result<Self> {
        Self::new(field, Family::Unitary { delta }, n)
    }

    pub fn quat_symp(field: &NumberField, a: FieldElement, b: FieldElement, n: usize) -> Result<Self> {
        Self::new(field, Family::QuatSymp { a, b }, n)
    }

    pub fn quat_skew(field: &NumberField, a: FieldElement, b: FieldElement, n: usize) -> Result<Self> {
        Self::new(field, Family::QuatSkew { a, b }, n)
    }

    /// The same family over another field, with parameters mapped by `map`.
    pub fn with_field(&self, field: &NumberField, n: usize, map: impl Fn(&FieldElement) -> FieldElement) -> Result<Self> {
        let family = match &self.inner.family {
            Family::SplitOrth => Family::SplitOrth,
            Family::Unitary { delta } => Family::Unitary { delta: map(delta) },
            Family::QuatSymp { a, b } => Family::QuatSymp { a: map(a), b: map(b) },
            Family::QuatSkew { a, b } => Family::QuatSkew { a: map(a), b: map(b) },
        };
        let alg = Self::new(field, family, n)?;
        if let (Some(u), Some(_)) = (&self.inner.skew_unit, &alg.inner.skew_unit) {
            // keep the scaling unit of the original so that signatures are
            // comparable across the change of base
            let u = Quaternion { w: map(&u.w), x: map(&u.x), y: map(&u.y), z: map(&u.z) };
            let mut data = Arc::try_unwrap(alg.inner).ok().expect("fresh algebra");
            data.skew_unit = Some(u);
            return Ok(AlgebraWithInvolution { inner: Arc::new(data) });
        }
        Ok(alg)
    }

    /// The `n = 1` member of the same family.
    pub fn base_division(&self) -> AlgebraWithInvolution {
        if self.inner.n == 1 {
            return self.clone();
        }
        self.with_matrix_size(1)
    }

    /// The same family with matrix size `n`.
    pub fn with_matrix_size(&self, n: usize) -> AlgebraWithInvolution {
        assert!(n >= 1);
        let d = &self.inner;
        AlgebraWithInvolution {
            inner: Arc::new(AlgebraData {
                family: d.family.clone(),
                n,
                ring: d.ring.clone(),
                skew_unit: d.skew_unit.clone(),
                nil: d.nil.clone(),
                non_nil: d.non_nil.clone(),
            }),
        }
    }

    pub fn field(&self) -> &NumberField {
        self.inner.ring.field()
    }

    pub fn family(&self) -> &Family {
        &self.inner.family
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn ring(&self) -> &ScalarRing {
        &self.inner.ring
    }

    /// `dim_F A`.
    pub fn dim_f(&self) -> usize {
        self.inner.n * self.inner.n * self.inner.ring.dim()
    }

    pub fn involution_type(&self) -> InvolutionType {
        match self.inner.family {
            Family::SplitOrth | Family::QuatSkew { .. } => InvolutionType::Orthogonal,
            Family::Unitary { .. } => InvolutionType::Unitary,
            Family::QuatSymp { .. } => InvolutionType::Symplectic,
        }
    }

    /// `+1` when forms are hermitian, `−1` for the skew-hermitian family.
    pub fn epsilon(&self) -> i32 {
        match self.inner.family {
            Family::QuatSkew { .. } => -1,
            _ => 1,
        }
    }

    /// The pure quaternion scaling skew-hermitian data to symmetric trace
    /// forms; `None` outside the skew family.
    pub fn skew_unit(&self) -> Option<&Quaternion> {
        self.inner.skew_unit.as_ref()
    }

    /// Matrix size of `A ⊗ F_P` over its real division part, at non-nil
    /// orderings.
    pub fn n_p(&self) -> usize {
        match self.inner.family {
            Family::QuatSkew { .. } => 2 * self.inner.n,
            _ => self.inner.n,
        }
    }

    pub fn nil_orderings(&self) -> &[Ordering] {
        &self.inner.nil
    }

    /// `X̃_F`, the orderings that are not nil.
    pub fn non_nil_orderings(&self) -> &[Ordering] {
        &self.inner.non_nil
    }

    pub fn is_nil(&self, p: &Ordering) -> bool {
        self.inner.nil.contains(p)
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { algebra: self.clone(), m: self.inner.ring.zeros(self.n(), self.n()) }
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement { algebra: self.clone(), m: self.inner.ring.identity(self.n()) }
    }

    pub fn scalar(&self, c: FieldElement) -> AlgebraElement {
        let mut e = self.zero();
        for i in 0..self.n() {
            e.m[i][i] = Quaternion::scalar(c.clone());
        }
        e
    }

    /// The element `q·I_n`.
    pub fn diag_element(&self, q: Quaternion) -> Result<AlgebraElement> {
        let n = self.n();
        let mut m = self.inner.ring.zeros(n, n);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = q.clone();
        }
        self.element(m)
    }

    pub fn element(&self, m: DMatrix) -> Result<AlgebraElement> {
        let n = self.n();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("expected a {n}×{n} matrix over D")));
        }
        for q in m.iter().flatten() {
            if !self.inner.ring.contains(q) {
                return Err(Error::InvalidAlgebra(format!("entry {q:?} does not lie in D")));
            }
        }
        Ok(AlgebraElement { algebra: self.clone(), m })
    }

    /// `F`-basis of `Sym(A, σ)` (skew elements for the skew family), built
    /// from matrix units: `E_rr·β` with `conj β = εβ`, then
    /// `E_rs·β + ε E_sr·conj β` for `r < s` and every basis `β` of `D`.
    pub fn sym_basis(&self) -> Vec<AlgebraElement> {
        let n = self.n();
        let ring = &self.inner.ring;
        let eps = self.epsilon();
        let mut out = Vec::new();
        for r in 0..n {
            for beta in ring.basis() {
                if (beta.conj() == beta) == (eps == 1) {
                    let mut m = ring.zeros(n, n);
                    m[r][r] = beta;
                    out.push(AlgebraElement { algebra: self.clone(), m });
                }
            }
        }
        for r in 0..n {
            for s in r + 1..n {
                for beta in ring.basis() {
                    let mut m = ring.zeros(n, n);
                    let c = beta.conj();
                    m[s][r] = if eps == 1 { c } else { c.neg() };
                    m[r][s] = beta;
                    out.push(AlgebraElement { algebra: self.clone(), m });
                }
            }
        }
        out
    }

    /// The element representing `⟨1⟩_σ`: the identity, or `u⁻¹` in the
    /// skew family (so that its trace form is `Trd(σ(x)·y)`).
    pub fn unit_form_element(&self) -> AlgebraElement {
        match &self.inner.skew_unit {
            Some(u) => {
                let u_inv = self.inner.ring.inv(u).expect("skew unit is invertible");
                self.diag_element(u_inv).expect("scalar entries")
            }
            None => self.one(),
        }
    }
}

fn check_param(field: &NumberField, e: &FieldElement, name: &str) -> Result<()> {
    if !e.field().same_as(field) {
        return Err(Error::FieldMismatch);
    }
    if e.is_zero() {
        return Err(Error::InvalidAlgebra(format!("parameter {name} must be nonzero")));
    }
    Ok(())
}

fn is_nil_at(family: &Family, p: &Ordering) -> bool {
    let s = |e: &FieldElement| e.sign_at(p).expect("ordering of the algebra's field");
    match family {
        Family::SplitOrth => false,
        Family::Unitary { delta } => s(delta) > 0,
        Family::QuatSymp { a, b } => s(a) > 0 || s(b) > 0,
        Family::QuatSkew { a, b } => s(a) < 0 && s(b) < 0,
    }
}

/// First pure quaternion `u`, in the order `i, j, k` followed by small
/// integer combinations, with `u² <_P 0` at every given ordering.
fn find_skew_unit(ring: &ScalarRing, orderings: &[Ordering]) -> Result<Quaternion> {
    let f = ring.field();
    let mut candidates: Vec<[i64; 3]> = vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for h in 1..=3i64 {
        for x in -h..=h {
            for y in -h..=h {
                for z in -h..=h {
                    let c = [x, y, z];
                    if c.iter().map(|v| v.abs()).max() == Some(h) && !candidates.contains(&c) {
                        candidates.push(c);
                    }
                }
            }
        }
    }
    for [x, y, z] in candidates {
        let u = Quaternion::from_ints(f, [0, x, y, z]);
        // u² = −Nrd(u) for pure u
        let sq = -&ring.nrd(&u);
        if orderings.iter().all(|p| sq.sign_at(p).expect("own ordering") < 0) {
            return Ok(u);
        }
    }
    Err(Error::InvalidAlgebra("no pure quaternion with negative square at every non-nil ordering".into()))
}

/// Element of `M_n(D)`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    algebra: AlgebraWithInvolution,
    m: DMatrix,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.m)
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &AlgebraWithInvolution {
        &self.algebra
    }

    pub fn matrix(&self) -> &DMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &Quaternion {
        &self.m[i][j]
    }

    fn same(&self, o: &AlgebraElement) {
        assert!(self.algebra == o.algebra, "algebra mismatch in arithmetic");
    }

    pub fn add(&self, o: &AlgebraElement) -> AlgebraElement {
        self.same(o);
        let m = self.m.iter().zip(&o.m).map(|(r, s)| r.iter().zip(s).map(|(p, q)| p.add(q)).collect()).collect();
        AlgebraElement { algebra: self.algebra.clone(), m }
    }

    pub fn sub(&self, o: &AlgebraElement) -> AlgebraElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> AlgebraElement {
        let m = self.m.iter().map(|r| r.iter().map(Quaternion::neg).collect()).collect();
        AlgebraElement { algebra: self.algebra.clone(), m }
    }

    pub fn mul(&self, o: &AlgebraElement) -> AlgebraElement {
        self.same(o);
        AlgebraElement { algebra: self.algebra.clone(), m: self.algebra.ring().mat_mul(&self.m, &o.m) }
    }

    pub fn scale(&self, c: &FieldElement) -> AlgebraElement {
        let m = self.m.iter().map(|r| r.iter().map(|q| q.scale(c)).collect()).collect();
        AlgebraElement { algebra: self.algebra.clone(), m }
    }

    /// The involution: conjugate-transpose.
    pub fn sigma(&self) -> AlgebraElement {
        AlgebraElement { algebra: self.algebra.clone(), m: self.algebra.ring().adjoint(&self.m) }
    }

    /// `σ(x)·self·x`.
    pub fn congruent(&self, x: &AlgebraElement) -> AlgebraElement {
        x.sigma().mul(self).mul(x)
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Quaternion::is_zero)
    }

    /// `σ(a) = a`, or `σ(a) = −a` in the skew family.
    pub fn is_symmetric(&self) -> bool {
        let s = self.sigma();
        if self.algebra.epsilon() == 1 {
            s == *self
        } else {
            s == self.neg()
        }
    }

    /// First entry violating the symmetry, as `(row, col)`.
    pub fn symmetry_violation(&self) -> Option<(usize, usize)> {
        let eps = self.algebra.epsilon();
        let n = self.m.len();
        for i in 0..n {
            for j in 0..=i {
                let c = self.m[j][i].conj();
                let want = if eps == 1 { c } else { c.neg() };
                if self.m[i][j] != want {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// `F`-valued trace `Σ t_D(x_rr)`.
    pub fn trace_f(&self) -> FieldElement {
        let ring = self.algebra.ring();
        let mut acc = self.algebra.field().zero();
        for (i, row) in self.m.iter().enumerate() {
            acc = &acc + &ring.trd(&row[i]);
        }
        acc
    }

    pub fn inv(&self) -> Result<AlgebraElement> {
        Ok(AlgebraElement { algebra: self.algebra.clone(), m: self.algebra.ring().mat_inv(&self.m)? })
    }

    pub fn is_invertible(&self) -> bool {
        self.algebra.ring().mat_inv(&self.m).is_ok()
    }
}

/// The explicit splitting `(1, b)_F → M₂(F)`:
/// `i ↦ diag(1, −1)`, `j ↦ [[0, b], [1, 0]]`, so
/// `w + xi + yj + zk ↦ [[w + x, b(y + z)], [y − z, w − x]]`.
#[derive(Clone, Debug)]
pub struct SplitIsomorphism {
    b: FieldElement,
}

impl SplitIsomorphism {
    pub fn new(ring: &ScalarRing) -> Result<Self> {
        if ring.kind != DivisionKind::Quaternion || !ring.a.is_one() {
            return Err(Error::Precondition("split isomorphism needs a quaternion algebra with a = 1".into()));
        }
        Ok(SplitIsomorphism { b: ring.b.clone() })
    }

    pub fn apply(&self, q: &Quaternion) -> [[FieldElement; 2]; 2] {
        [
            [&q.w + &q.x, &self.b * &(&q.y + &q.z)],
            [&q.y - &q.z, &q.w - &q.x],
        ]
    }

    /// Blockwise image of a matrix over `D`: a `2k × 2k` matrix over `F`.
    pub fn apply_matrix(&self, m: &DMatrix) -> Vec<Vec<FieldElement>> {
        let k = m.len();
        let f = self.b.field();
        let mut out = vec![vec![f.zero(); 2 * k]; 2 * k];
        for (r, row) in m.iter().enumerate() {
            for (c, q) in row.iter().enumerate() {
                let img = self.apply(q);
                for (i, irow) in img.iter().enumerate() {
                    for (j, e) in irow.iter().enumerate() {
                        out[2 * r + i][2 * c + j] = e.clone();
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamilton(n: usize) -> AlgebraWithInvolution {
        let f = NumberField::rationals();
        AlgebraWithInvolution::quat_symp(&f, f.from_int(-1), f.from_int(-1), n).unwrap()
    }

    #[test]
    fn quaternion_relations() {
        let alg = hamilton(1);
        let r = alg.ring();
        let f = alg.field().clone();
        let i = Quaternion::from_ints(&f, [0, 1, 0, 0]);
        let j = Quaternion::from_ints(&f, [0, 0, 1, 0]);
        let k = Quaternion::from_ints(&f, [0, 0, 0, 1]);
        assert_eq!(r.mul(&i, &j), k);
        assert_eq!(r.mul(&j, &i), k.neg());
        assert_eq!(r.mul(&i, &i), Quaternion::from_ints(&f, [-1, 0, 0, 0]));
        assert_eq!(r.nrd(&Quaternion::from_ints(&f, [1, 1, 0, 0])), f.from_int(2));
        assert_eq!(r.trd(&i), f.zero());
        assert_eq!(r.trd(&Quaternion::from_ints(&f, [3, 1, 2, 0])), f.from_int(6));
    }

    #[test]
    fn general_structure_constants() {
        let f = NumberField::rationals();
        let r = ScalarRing { kind: DivisionKind::Quaternion, a: f.from_int(2), b: f.from_int(-3) };
        let basis = r.basis();
        let (i, j, k) = (&basis[1], &basis[2], &basis[3]);
        assert_eq!(r.mul(i, i), Quaternion::scalar(f.from_int(2)));
        assert_eq!(r.mul(j, j), Quaternion::scalar(f.from_int(-3)));
        assert_eq!(r.mul(k, k), Quaternion::scalar(f.from_int(6)));
        assert_eq!(r.mul(i, j), *k);
        assert_eq!(r.mul(j, k), i.scale(&f.from_int(3)));
        assert_eq!(r.mul(k, i), j.scale(&f.from_int(-2)));
    }

    #[test]
    fn nil_examples() {
        assert!(hamilton(1).nil_orderings().is_empty());
        let l = NumberField::from_int_coeffs(&[-2, 0, 1]).unwrap();
        let alg = AlgebraWithInvolution::quat_symp(&l, l.from_int(-1), l.generator(), 1).unwrap();
        assert_eq!(alg.nil_orderings(), &[l.orderings()[1].clone()]);
        let f = NumberField::rationals();
        assert!(AlgebraWithInvolution::split_orth(&f, 3).unwrap().nil_orderings().is_empty());
        let split = AlgebraWithInvolution::quat_symp(&f, f.one(), f.one(), 2).unwrap();
        assert_eq!(split.nil_orderings().len(), 1);
    }

    #[test]
    fn sym_basis_dimensions() {
        let f = NumberField::rationals();
        assert_eq!(hamilton(1).sym_basis().len(), 1);
        assert_eq!(hamilton(3).sym_basis().len(), 15);
        assert_eq!(AlgebraWithInvolution::split_orth(&f, 2).unwrap().sym_basis().len(), 3);
        let skew = AlgebraWithInvolution::quat_skew(&f, f.from_int(-1), f.from_int(-1), 1).unwrap();
        assert_eq!(skew.sym_basis().len(), 3);
        assert!(skew.sym_basis().iter().all(AlgebraElement::is_symmetric));
        let un = AlgebraWithInvolution::unitary(&f, f.from_int(-1), 3).unwrap();
        assert_eq!(un.sym_basis().len(), 9);
        assert!(un.sym_basis().iter().all(AlgebraElement::is_symmetric));
    }

    #[test]
    fn rejects_square_delta() {
        let f = NumberField::rationals();
        assert!(AlgebraWithInvolution::unitary(&f, f.from_int(4), 1).is_err());
        let l = NumberField::from_int_coeffs(&[-2, 0, 1]).unwrap();
        let x = l.generator();
        let sq = &(&l.one() + &x) * &(&l.one() + &x);
        assert!(AlgebraWithInvolution::unitary(&l, sq, 1).is_err());
        assert!(AlgebraWithInvolution::unitary(&l, l.from_int(2), 1).is_err());
        assert!(AlgebraWithInvolution::unitary(&l, l.from_int(3), 1).is_ok());
    }

    #[test]
    fn split_isomorphism_examples() {
        let f = NumberField::rationals();
        let alg = AlgebraWithInvolution::quat_symp(&f, f.one(), f.one(), 1).unwrap();
        let phi = SplitIsomorphism::new(alg.ring()).unwrap();
        let k = Quaternion::from_ints(&f, [0, 0, 0, 1]);
        let img = phi.apply(&k);
        assert_eq!(img, [[f.zero(), f.one()], [f.from_int(-1), f.zero()]]);
        assert_eq!(phi.apply(&Quaternion::one(&f)), [[f.one(), f.zero()], [f.zero(), f.one()]]);
        assert!(SplitIsomorphism::new(hamilton(1).ring()).is_err());
    }

    #[test]
    fn skew_unit_choice() {
        let f = NumberField::rationals();
        let alg = AlgebraWithInvolution::quat_skew(&f, f.one(), f.one(), 1).unwrap();
        assert_eq!(alg.skew_unit().unwrap(), &Quaternion::from_ints(&f, [0, 0, 0, 1]));
        let alg = AlgebraWithInvolution::quat_skew(&f, f.from_int(-1), f.one(), 1).unwrap();
        assert_eq!(alg.skew_unit().unwrap(), &Quaternion::from_ints(&f, [0, 1, 0, 0]));
    }

    #[test]
    fn matrix_inverse() {
        let alg = hamilton(2);
        let f = alg.field().clone();
        let m = vec![
            vec![Quaternion::from_ints(&f, [1, 1, 0, 0]), Quaternion::from_ints(&f, [0, 0, 2, 0])],
            vec![Quaternion::from_ints(&f, [0, 0, 0, 1]), Quaternion::from_ints(&f, [3, 0, 0, 0])],
        ];
        let x = alg.element(m).unwrap();
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), alg.one());
        assert_eq!(y.mul(&x), alg.one());
    }
}
