//! Session documents: schema, parsing with line/column diagnostics,
//! canonical rendering, and construction of the mathematical objects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use hermsig_core::algebra::{AlgebraElement, AlgebraWithInvolution, DMatrix, Family, Quaternion};
use hermsig_core::hermitian::HermitianForm;
use hermsig_core::quadform::QuadraticForm;
use hermsig_core::{NumberField, Poly, Rational};
use json_spanned_value::spanned;
use json_spanned_value::Value as JValue;
use serde_json::{json, Value};

use crate::expr::{self, ExprError};

/// 1-based position in the document text.
#[derive(Clone, Copy, Debug, Default)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

/// Locations never take part in document equality.
impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl Eq for Loc {}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub loc: Loc,
    pub message: String,
}

impl Diagnostic {
    pub fn new(loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic { loc, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.loc, self.message)
    }
}

impl std::error::Error for Diagnostic {}

type PResult<T> = Result<T, Diagnostic>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub min_poly: Poly,
    pub var: String,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyDecl {
    SplitOrth,
    Unitary { delta: Poly },
    QuatSymp { a: Poly, b: Poly },
    QuatSkew { a: Poly, b: Poly },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub name: String,
    pub family: FamilyDecl,
    pub n: usize,
    pub loc: Loc,
}

/// An entry of `D`: a scalar, or coordinates in the basis `1, i, j, ij`
/// (`1, √δ` for the unitary family).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DValue {
    Scalar(Poly),
    Coords(Vec<Poly>),
}

/// An element of `M_n(D)`: a scalar (times the identity), a single `D`
/// entry in coordinates (`n = 1`), or an `n × n` matrix of `D` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementValue {
    Scalar(Poly),
    Coords(Vec<Poly>),
    Matrix(Vec<Vec<DValue>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormBody {
    Quadratic(Vec<Poly>),
    Diagonal { algebra: String, entries: Vec<ElementValue> },
    /// Collapsed Gram matrix over `D`, of size `rank · n`.
    Gram { algebra: String, rows: Vec<Vec<DValue>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormDecl {
    pub name: String,
    pub body: FormBody,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementDecl {
    pub name: String,
    pub algebra: String,
    pub value: ElementValue,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertTermDecl {
    pub weight: Poly,
    pub x: ElementValue,
    pub generator: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealKindDecl {
    SignatureKernel,
    ModP,
    Fundamental,
    Fabricated,
}

impl IdealKindDecl {
    const ALL: [IdealKindDecl; 4] =
        [IdealKindDecl::SignatureKernel, IdealKindDecl::ModP, IdealKindDecl::Fundamental, IdealKindDecl::Fabricated];

    pub fn name(self) -> &'static str {
        match self {
            IdealKindDecl::SignatureKernel => "signature-kernel",
            IdealKindDecl::ModP => "mod-p",
            IdealKindDecl::Fundamental => "fundamental",
            IdealKindDecl::Fabricated => "fabricated",
        }
    }
}

macro_rules! ops {
    ($($v:ident = $s:literal, [$($req:literal),*], [$($opt:literal),*];)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Op { $($v),* }

        impl Op {
            pub const ALL: &'static [Op] = &[$(Op::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(Op::$v => $s),* }
            }

            /// Required and optional argument keys.
            pub fn keys(self) -> (&'static [&'static str], &'static [&'static str]) {
                match self { $(Op::$v => (&[$($req),*], &[$($opt),*])),* }
            }
        }
    };
}

ops! {
    Orderings = "orderings", [], [];
    Sign = "sign", ["form"], ["ordering", "reference"];
    TotalSign = "total-sign", ["form"], ["reference"];
    Nil = "nil", ["algebra"], [];
    Torsion = "torsion", ["form"], ["reference"];
    TransferCheck = "transfer-check", ["extension"], ["quadratic", "algebra", "diagonal", "reference"];
    GoingUp = "going-up", ["form", "extension"], ["reference"];
    ReferenceForm = "reference-form", ["algebra"], [];
    Cones = "cones", ["algebra"], ["reference"];
    ConeMember = "cone-member", ["element", "ordering", "orientation"], ["reference"];
    EtaMax = "eta-max", ["element", "ordering"], ["reference"];
    SosFind = "sos-find", ["element"], ["a", "slots", "k", "reference"];
    SosVerify = "sos-verify", ["element", "certificate"], ["a", "slots", "k"];
    Positivity = "positivity", ["algebra"], [];
    Ideals = "ideals", ["algebra", "kind"], ["ordering", "prime", "generators", "forms", "trials", "reference"];
    Morphisms = "morphisms", ["algebra"], ["bound", "reference"];
    Topology = "topology", ["algebra"], ["samples", "height", "elements", "reference"];
    MoritaCheck = "morita-check", ["algebra"], ["samples", "reference"];
    Decompose = "decompose", ["form", "ordering"], ["orientation", "reference"];
}

impl Op {
    pub fn from_name(s: &str) -> Option<Op> {
        Op::ALL.iter().copied().find(|o| o.name() == s)
    }
}

/// Command arguments; which keys are allowed depends on the operation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Args {
    pub form: Option<String>,
    pub algebra: Option<String>,
    pub element: Option<String>,
    pub a: Option<String>,
    pub reference: Option<String>,
    pub ordering: Option<usize>,
    pub orientation: Option<i32>,
    pub extension: Option<FieldDecl>,
    pub quadratic: Option<Vec<Poly>>,
    pub diagonal: Option<Vec<ElementValue>>,
    pub slots: Option<Vec<Poly>>,
    pub k: Option<usize>,
    pub certificate: Option<Vec<CertTermDecl>>,
    pub kind: Option<IdealKindDecl>,
    pub prime: Option<u64>,
    pub generators: Option<Vec<String>>,
    pub forms: Option<Vec<String>>,
    pub trials: Option<usize>,
    pub bound: Option<i64>,
    pub samples: Option<usize>,
    pub height: Option<i64>,
    pub elements: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandDecl {
    pub op: Op,
    pub args: Args,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionDocument {
    pub seed: u64,
    pub field: FieldDecl,
    pub algebras: Vec<AlgebraDecl>,
    pub forms: Vec<FormDecl>,
    pub elements: Vec<ElementDecl>,
    pub commands: Vec<CommandDecl>,
}

// ---------------------------------------------------------------------------
// parsing

struct Source<'t> {
    text: &'t str,
}

impl Source<'_> {
    fn loc(&self, offset: usize) -> Loc {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Loc { line, col }
    }

    fn at(&self, v: &spanned::Value) -> Loc {
        self.loc(v.start())
    }

    fn fail<T>(&self, v: &spanned::Value, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::new(self.at(v), message))
    }

    fn object<'v>(&self, v: &'v spanned::Value, what: &str) -> PResult<Obj<'v>> {
        match v.get_ref() {
            JValue::Object(map) => Ok(Obj { map, at: v.start(), used: BTreeSet::new() }),
            other => self.fail(v, format!("{what} must be an object, found {}", other.type_str())),
        }
    }

    fn array<'v>(&self, v: &'v spanned::Value, what: &str) -> PResult<&'v [spanned::Value]> {
        match v.get_ref() {
            JValue::Array(a) => Ok(a),
            other => self.fail(v, format!("{what} must be an array, found {}", other.type_str())),
        }
    }

    fn string<'v>(&self, v: &'v spanned::Value, what: &str) -> PResult<&'v str> {
        match v.get_ref() {
            JValue::String(s) => Ok(s),
            other => self.fail(v, format!("{what} must be a string, found {}", other.type_str())),
        }
    }

    fn name(&self, v: &spanned::Value, what: &str) -> PResult<String> {
        let s = self.string(v, what)?;
        if !is_identifier(s) {
            return self.fail(v, format!("{what} `{s}` is not an identifier"));
        }
        Ok(s.to_string())
    }

    fn uint(&self, v: &spanned::Value, what: &str) -> PResult<u64> {
        match v.get_ref() {
            JValue::Number(n) => match n.as_u64() {
                Some(k) => Ok(k),
                None => self.fail(v, format!("{what} must be a non-negative integer, found {n}")),
            },
            other => self.fail(v, format!("{what} must be a non-negative integer, found {}", other.type_str())),
        }
    }

    fn int(&self, v: &spanned::Value, what: &str) -> PResult<i64> {
        match v.get_ref() {
            JValue::Number(n) => match n.as_i64() {
                Some(k) => Ok(k),
                None => self.fail(v, format!("{what} must be an integer, found {n}")),
            },
            other => self.fail(v, format!("{what} must be an integer, found {}", other.type_str())),
        }
    }

    fn usize(&self, v: &spanned::Value, what: &str) -> PResult<usize> {
        let k = self.uint(v, what)?;
        usize::try_from(k).or_else(|_| self.fail(v, format!("{what} is too large")))
    }

    /// An exact number: a decimal or fraction string, or a JSON integer.
    fn number(&self, v: &spanned::Value, what: &str) -> PResult<Rational> {
        match v.get_ref() {
            JValue::String(s) => match expr::number(s) {
                Some(r) => Ok(r),
                None => self.fail(v, format!("{what}: `{s}` is not an exact decimal or fraction")),
            },
            JValue::Number(n) => match n.as_i64() {
                Some(k) => Ok(Rational::from_integer(k.into())),
                None => self.fail(v, format!("{what}: non-integer JSON number {n}; write it as a string")),
            },
            other => self.fail(v, format!("{what} must be a number string, found {}", other.type_str())),
        }
    }

    fn expr(&self, v: &spanned::Value, var: &str, what: &str) -> PResult<Poly> {
        match v.get_ref() {
            JValue::String(s) => expr::parse_poly(s, var).map_err(|ExprError { offset, message }| {
                // + 1 skips the opening quote; escapes inside expressions are not expected
                Diagnostic::new(self.loc(v.start() + 1 + offset), format!("{what}: {message}"))
            }),
            JValue::Number(n) => match n.as_i64() {
                Some(k) => Ok(Poly::constant(Rational::from_integer(k.into()))),
                None => self.fail(v, format!("{what}: non-integer JSON number {n}; write it as a string")),
            },
            other => self.fail(v, format!("{what} must be an expression string, found {}", other.type_str())),
        }
    }

    fn exprs(&self, v: &spanned::Value, var: &str, what: &str) -> PResult<Vec<Poly>> {
        self.array(v, what)?.iter().map(|e| self.expr(e, var, what)).collect()
    }

    fn names(&self, v: &spanned::Value, what: &str) -> PResult<Vec<String>> {
        self.array(v, what)?.iter().map(|e| self.name(e, what)).collect()
    }

    fn d_value(&self, v: &spanned::Value, var: &str) -> PResult<DValue> {
        match v.get_ref() {
            JValue::Array(cs) => {
                if cs.is_empty() || cs.len() > 4 {
                    return self.fail(v, format!("a D entry has 1 to 4 coordinates, found {}", cs.len()));
                }
                Ok(DValue::Coords(cs.iter().map(|c| self.expr(c, var, "coordinate")).collect::<PResult<_>>()?))
            }
            _ => Ok(DValue::Scalar(self.expr(v, var, "D entry")?)),
        }
    }

    fn element_value(&self, v: &spanned::Value, var: &str) -> PResult<ElementValue> {
        match v.get_ref() {
            JValue::Array(rows) if !rows.is_empty() && rows.iter().all(|r| r.is_array()) => {
                let mut out = Vec::with_capacity(rows.len());
                for r in rows {
                    let cells = self.array(r, "matrix row")?;
                    out.push(cells.iter().map(|c| self.d_value(c, var)).collect::<PResult<_>>()?);
                }
                Ok(ElementValue::Matrix(out))
            }
            JValue::Array(_) => match self.d_value(v, var)? {
                DValue::Coords(c) => Ok(ElementValue::Coords(c)),
                DValue::Scalar(p) => Ok(ElementValue::Scalar(p)),
            },
            _ => Ok(ElementValue::Scalar(self.expr(v, var, "element")?)),
        }
    }

    fn field_decl(&self, v: &spanned::Value, what: &str) -> PResult<FieldDecl> {
        let mut o = self.object(v, what)?;
        let mp = o.require(self, "min_poly")?;
        let coeffs = self
            .array(mp, "min_poly")?
            .iter()
            .map(|c| self.number(c, "min_poly coefficient"))
            .collect::<PResult<Vec<_>>>()?;
        let var = match o.take("var") {
            Some(v) => self.name(v, "variable")?,
            None => "x".to_string(),
        };
        o.finish(self, what)?;
        let min_poly = Poly::new(coeffs);
        match min_poly.degree() {
            None | Some(0) => return self.fail(mp, "min_poly must have degree at least 1"),
            Some(_) if !min_poly.is_squarefree() => {
                return self.fail(mp, format!("min_poly {} is not squarefree", min_poly.render(&var)))
            }
            _ => {}
        }
        Ok(FieldDecl { min_poly, var, loc: self.at(v) })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

struct Obj<'v> {
    map: &'v json_spanned_value::Map<spanned::String, spanned::Value>,
    at: usize,
    used: BTreeSet<&'static str>,
}

impl<'v> Obj<'v> {
    fn take(&mut self, key: &'static str) -> Option<&'v spanned::Value> {
        self.used.insert(key);
        self.map.get(key)
    }

    fn require(&mut self, src: &Source, key: &'static str) -> PResult<&'v spanned::Value> {
        match self.take(key) {
            Some(v) => Ok(v),
            None => Err(Diagnostic::new(src.loc(self.at), format!("missing required key `{key}`"))),
        }
    }

    fn finish(&self, src: &Source, what: &str) -> PResult<()> {
        for k in self.map.keys() {
            if !self.used.contains(k.get_ref().as_str()) {
                return Err(Diagnostic::new(src.loc(k.start()), format!("unknown key `{}` in {what}", k.get_ref())));
            }
        }
        Ok(())
    }
}

fn parse_family(src: &Source, o: &mut Obj, var: &str) -> PResult<FamilyDecl> {
    let fv = o.require(src, "family")?;
    let tag = src.string(fv, "family")?;
    let mut param = |key: &'static str| -> PResult<Poly> {
        let v = o.require(src, key)?;
        src.expr(v, var, key)
    };
    Ok(match tag {
        "split_orth" => FamilyDecl::SplitOrth,
        "unitary" => FamilyDecl::Unitary { delta: param("delta")? },
        "quat_symp" => FamilyDecl::QuatSymp { a: param("a")?, b: param("b")? },
        "quat_skew" => FamilyDecl::QuatSkew { a: param("a")?, b: param("b")? },
        other => {
            return src.fail(
                fv,
                format!("unknown family `{other}` (expected split_orth, unitary, quat_symp or quat_skew)"),
            )
        }
    })
}

fn parse_command(src: &Source, v: &spanned::Value, var: &str) -> PResult<CommandDecl> {
    let mut o = src.object(v, "command")?;
    let opv = o.require(src, "op")?;
    let opname = src.string(opv, "op")?;
    let op = match Op::from_name(opname) {
        Some(op) => op,
        None => {
            let all: Vec<&str> = Op::ALL.iter().map(|o| o.name()).collect();
            return src.fail(opv, format!("unknown op `{opname}` (expected one of {})", all.join(", ")));
        }
    };
    let (required, optional) = op.keys();
    let mut args = Args::default();
    // the extension variable is needed by the keys that follow it
    let mut keys: Vec<&'static str> = required.iter().chain(optional).copied().collect();
    keys.sort_by_key(|k| *k != "extension");
    for key in keys {
        let Some(val) = o.take(key) else {
            if required.contains(&key) {
                return src.fail(v, format!("op `{opname}` requires key `{key}`"));
            }
            continue;
        };
        let ext_var = args.extension.as_ref().map_or(var, |e| e.var.as_str()).to_string();
        match key {
            "form" => args.form = Some(src.name(val, key)?),
            "algebra" => args.algebra = Some(src.name(val, key)?),
            "element" => args.element = Some(src.name(val, key)?),
            "a" => args.a = Some(src.name(val, key)?),
            "reference" => args.reference = Some(src.name(val, key)?),
            "ordering" => args.ordering = Some(src.usize(val, key)?),
            "orientation" => match src.int(val, key)? {
                s @ (1 | -1) => args.orientation = Some(s as i32),
                s => return src.fail(val, format!("orientation must be 1 or -1, found {s}")),
            },
            "extension" => args.extension = Some(src.field_decl(val, "extension")?),
            "quadratic" => args.quadratic = Some(src.exprs(val, &ext_var, key)?),
            "diagonal" => {
                let entries = src.array(val, key)?;
                args.diagonal = Some(entries.iter().map(|e| src.element_value(e, &ext_var)).collect::<PResult<_>>()?);
            }
            "slots" => args.slots = Some(src.exprs(val, var, key)?),
            "k" => match src.usize(val, key)? {
                0 => return src.fail(val, "k must be at least 1"),
                k => args.k = Some(k),
            },
            "certificate" => {
                let mut terms = Vec::new();
                for t in src.array(val, key)? {
                    let mut to = src.object(t, "certificate term")?;
                    let w = to.require(src, "weight")?;
                    let x = to.require(src, "x")?;
                    let g = to.require(src, "generator")?;
                    terms.push(CertTermDecl {
                        weight: src.expr(w, var, "weight")?,
                        x: src.element_value(x, var)?,
                        generator: src.usize(g, "generator")?,
                    });
                    to.finish(src, "certificate term")?;
                }
                args.certificate = Some(terms);
            }
            "kind" => {
                let s = src.string(val, key)?;
                match IdealKindDecl::ALL.iter().find(|k| k.name() == s) {
                    Some(k) => args.kind = Some(*k),
                    None => {
                        return src.fail(
                            val,
                            format!("unknown ideal kind `{s}` (expected signature-kernel, mod-p, fundamental or fabricated)"),
                        )
                    }
                }
            }
            "prime" => args.prime = Some(src.uint(val, key)?),
            "generators" => args.generators = Some(src.names(val, key)?),
            "forms" => args.forms = Some(src.names(val, key)?),
            "elements" => args.elements = Some(src.names(val, key)?),
            "trials" => args.trials = Some(src.usize(val, key)?),
            "samples" => args.samples = Some(src.usize(val, key)?),
            "bound" | "height" => {
                let h = src.int(val, key)?;
                if h < 1 {
                    return src.fail(val, format!("{key} must be at least 1"));
                }
                if key == "bound" {
                    args.bound = Some(h);
                } else {
                    args.height = Some(h);
                }
            }
            _ => unreachable!("key table and parser agree"),
        }
    }
    o.finish(src, &format!("op `{opname}`"))?;
    match op {
        Op::TransferCheck => {
            let quad = args.quadratic.is_some();
            let herm = args.algebra.is_some() || args.diagonal.is_some();
            if quad == herm || (herm && (args.algebra.is_none() || args.diagonal.is_none())) {
                return src.fail(v, "transfer-check takes either `quadratic` or both `algebra` and `diagonal`");
            }
        }
        Op::Ideals => {
            let kind = args.kind.expect("required");
            let need_ordering = matches!(kind, IdealKindDecl::SignatureKernel | IdealKindDecl::ModP | IdealKindDecl::Fabricated);
            if need_ordering && args.ordering.is_none() {
                return src.fail(v, format!("ideal kind `{}` requires `ordering`", kind.name()));
            }
            if kind == IdealKindDecl::ModP && args.prime.is_none() {
                return src.fail(v, "ideal kind `mod-p` requires `prime`");
            }
        }
        _ => {}
    }
    Ok(CommandDecl { op, args, loc: src.at(v) })
}

/// Parses and validates a session document. Declarations are checked in
/// full (fields, algebras, forms, elements); names used by commands are
/// resolved when the command runs.
pub fn parse_session(text: &str) -> PResult<SessionDocument> {
    let root: spanned::Value = json_spanned_value::from_str(text).map_err(|e| {
        Diagnostic::new(Loc { line: e.line(), col: e.column() }, format!("syntax error: {e}"))
    })?;
    let src = Source { text };
    let mut o = src.object(&root, "session document")?;
    let seed = match o.take("seed") {
        Some(v) => src.uint(v, "seed")?,
        None => 0,
    };
    let field = src.field_decl(o.require(&src, "field")?, "field")?;
    let var = field.var.clone();
    let mut names = BTreeSet::new();
    let mut declare = |v: &spanned::Value, name: &str| -> PResult<()> {
        if !names.insert(name.to_string()) {
            return src.fail(v, format!("duplicate name `{name}`"));
        }
        Ok(())
    };

    let mut algebras = Vec::new();
    if let Some(av) = o.take("algebras") {
        for a in src.array(av, "algebras")? {
            let mut ao = src.object(a, "algebra")?;
            let nv = ao.require(&src, "name")?;
            let name = src.name(nv, "name")?;
            declare(nv, &name)?;
            let family = parse_family(&src, &mut ao, &var)?;
            let n = match ao.take("n") {
                Some(v) => match src.usize(v, "n")? {
                    0 => return src.fail(v, "n must be at least 1"),
                    n => n,
                },
                None => 1,
            };
            ao.finish(&src, "algebra")?;
            algebras.push(AlgebraDecl { name, family, n, loc: src.at(a) });
        }
    }

    let mut forms = Vec::new();
    if let Some(fv) = o.take("forms") {
        for f in src.array(fv, "forms")? {
            let mut fo = src.object(f, "form")?;
            let nv = fo.require(&src, "name")?;
            let name = src.name(nv, "name")?;
            declare(nv, &name)?;
            let body = if let Some(q) = fo.take("quadratic") {
                FormBody::Quadratic(src.exprs(q, &var, "quadratic entry")?)
            } else {
                let algebra = src.name(fo.require(&src, "algebra")?, "algebra")?;
                match (fo.take("diagonal"), fo.take("gram")) {
                    (Some(d), None) => FormBody::Diagonal {
                        algebra,
                        entries: src.array(d, "diagonal")?.iter().map(|e| src.element_value(e, &var)).collect::<PResult<_>>()?,
                    },
                    (None, Some(g)) => {
                        let mut rows = Vec::new();
                        for r in src.array(g, "gram")? {
                            rows.push(src.array(r, "gram row")?.iter().map(|c| src.d_value(c, &var)).collect::<PResult<_>>()?);
                        }
                        FormBody::Gram { algebra, rows }
                    }
                    _ => return src.fail(f, "a hermitian form needs exactly one of `diagonal` and `gram`"),
                }
            };
            fo.finish(&src, "form")?;
            forms.push(FormDecl { name, body, loc: src.at(f) });
        }
    }

    let mut elements = Vec::new();
    if let Some(ev) = o.take("elements") {
        for e in src.array(ev, "elements")? {
            let mut eo = src.object(e, "element")?;
            let nv = eo.require(&src, "name")?;
            let name = src.name(nv, "name")?;
            declare(nv, &name)?;
            let algebra = src.name(eo.require(&src, "algebra")?, "algebra")?;
            let value = src.element_value(eo.require(&src, "value")?, &var)?;
            eo.finish(&src, "element")?;
            elements.push(ElementDecl { name, algebra, value, loc: src.at(e) });
        }
    }

    let mut commands = Vec::new();
    if let Some(cv) = o.take("commands") {
        for c in src.array(cv, "commands")? {
            commands.push(parse_command(&src, c, &var)?);
        }
    }
    o.finish(&src, "session document")?;

    let doc = SessionDocument { seed, field, algebras, forms, elements, commands };
    doc.build()?;
    Ok(doc)
}

// ---------------------------------------------------------------------------
// rendering

fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn poly(p: &Poly, var: &str) -> Value {
    Value::String(p.render(var))
}

fn d_json(d: &DValue, var: &str) -> Value {
    match d {
        DValue::Scalar(p) => poly(p, var),
        DValue::Coords(cs) => Value::Array(cs.iter().map(|c| poly(c, var)).collect()),
    }
}

fn element_json(e: &ElementValue, var: &str) -> Value {
    match e {
        ElementValue::Scalar(p) => poly(p, var),
        ElementValue::Coords(cs) => Value::Array(cs.iter().map(|c| poly(c, var)).collect()),
        ElementValue::Matrix(rows) => {
            Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(|d| d_json(d, var)).collect())).collect())
        }
    }
}

fn field_json(f: &FieldDecl) -> Value {
    json!({ "min_poly": f.min_poly.coeffs().iter().map(rat).collect::<Vec<_>>(), "var": f.var })
}

fn command_json(c: &CommandDecl, var: &str) -> Value {
    let a = &c.args;
    let mut m = serde_json::Map::new();
    m.insert("op".into(), json!(c.op.name()));
    let ext_var = a.extension.as_ref().map_or(var, |e| e.var.as_str());
    let mut put = |k: &str, v: Option<Value>| {
        if let Some(v) = v {
            m.insert(k.into(), v);
        }
    };
    put("form", a.form.as_ref().map(|s| json!(s)));
    put("algebra", a.algebra.as_ref().map(|s| json!(s)));
    put("element", a.element.as_ref().map(|s| json!(s)));
    put("a", a.a.as_ref().map(|s| json!(s)));
    put("reference", a.reference.as_ref().map(|s| json!(s)));
    put("ordering", a.ordering.map(|v| json!(v)));
    put("orientation", a.orientation.map(|v| json!(v)));
    put("extension", a.extension.as_ref().map(field_json));
    put("quadratic", a.quadratic.as_ref().map(|ps| ps.iter().map(|p| poly(p, ext_var)).collect()));
    put("diagonal", a.diagonal.as_ref().map(|es| es.iter().map(|e| element_json(e, ext_var)).collect()));
    put("slots", a.slots.as_ref().map(|ps| ps.iter().map(|p| poly(p, var)).collect()));
    put("k", a.k.map(|v| json!(v)));
    put(
        "certificate",
        a.certificate.as_ref().map(|ts| {
            ts.iter()
                .map(|t| json!({ "weight": poly(&t.weight, var), "x": element_json(&t.x, var), "generator": t.generator }))
                .collect()
        }),
    );
    put("kind", a.kind.map(|k| json!(k.name())));
    put("prime", a.prime.map(|v| json!(v)));
    put("generators", a.generators.as_ref().map(|v| json!(v)));
    put("forms", a.forms.as_ref().map(|v| json!(v)));
    put("trials", a.trials.map(|v| json!(v)));
    put("bound", a.bound.map(|v| json!(v)));
    put("samples", a.samples.map(|v| json!(v)));
    put("height", a.height.map(|v| json!(v)));
    put("elements", a.elements.as_ref().map(|v| json!(v)));
    Value::Object(m)
}

/// Canonical JSON rendering of a document.
pub fn render(doc: &SessionDocument) -> String {
    let var = doc.field.var.as_str();
    let algebras: Vec<Value> = doc
        .algebras
        .iter()
        .map(|a| {
            let mut m = serde_json::Map::new();
            m.insert("name".into(), json!(a.name));
            let (tag, params): (&str, Vec<(&str, &Poly)>) = match &a.family {
                FamilyDecl::SplitOrth => ("split_orth", vec![]),
                FamilyDecl::Unitary { delta } => ("unitary", vec![("delta", delta)]),
                FamilyDecl::QuatSymp { a, b } => ("quat_symp", vec![("a", a), ("b", b)]),
                FamilyDecl::QuatSkew { a, b } => ("quat_skew", vec![("a", a), ("b", b)]),
            };
            m.insert("family".into(), json!(tag));
            for (k, p) in params {
                m.insert(k.into(), poly(p, var));
            }
            m.insert("n".into(), json!(a.n));
            Value::Object(m)
        })
        .collect();
    let forms: Vec<Value> = doc
        .forms
        .iter()
        .map(|f| match &f.body {
            FormBody::Quadratic(es) => json!({ "name": f.name, "quadratic": es.iter().map(|p| poly(p, var)).collect::<Vec<_>>() }),
            FormBody::Diagonal { algebra, entries } => json!({
                "name": f.name,
                "algebra": algebra,
                "diagonal": entries.iter().map(|e| element_json(e, var)).collect::<Vec<_>>(),
            }),
            FormBody::Gram { algebra, rows } => json!({
                "name": f.name,
                "algebra": algebra,
                "gram": rows.iter().map(|r| r.iter().map(|d| d_json(d, var)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
        })
        .collect();
    let elements: Vec<Value> = doc
        .elements
        .iter()
        .map(|e| json!({ "name": e.name, "algebra": e.algebra, "value": element_json(&e.value, var) }))
        .collect();
    let commands: Vec<Value> = doc.commands.iter().map(|c| command_json(c, var)).collect();
    let out = json!({
        "seed": doc.seed,
        "field": field_json(&doc.field),
        "algebras": algebras,
        "forms": forms,
        "elements": elements,
        "commands": commands,
    });
    serde_json::to_string_pretty(&out).expect("JSON values serialize") + "\n"
}

// ---------------------------------------------------------------------------
// construction

#[derive(Clone, Debug)]
pub enum FormValue {
    Quadratic(QuadraticForm),
    Hermitian(HermitianForm),
}

/// The objects declared by a document.
#[derive(Clone, Debug)]
pub struct Context {
    pub field: NumberField,
    pub var: String,
    pub algebras: BTreeMap<String, AlgebraWithInvolution>,
    pub forms: BTreeMap<String, FormValue>,
    pub elements: BTreeMap<String, AlgebraElement>,
}

pub fn build_field(decl: &FieldDecl) -> PResult<NumberField> {
    NumberField::new(decl.min_poly.clone()).map_err(|e| Diagnostic::new(decl.loc, e.to_string()))
}

pub fn d_entry(alg: &AlgebraWithInvolution, d: &DValue) -> Result<Quaternion, String> {
    let f = alg.field();
    match d {
        DValue::Scalar(p) => Ok(Quaternion::scalar(f.from_poly(p))),
        DValue::Coords(cs) => {
            let dim = alg.ring().dim();
            if cs.len() != dim {
                return Err(format!("a D entry of {} has {dim} coordinates, found {}", alg.family().tag(), cs.len()));
            }
            let c: Vec<_> = cs.iter().map(|p| f.from_poly(p)).collect();
            Ok(alg.ring().from_coords(&c))
        }
    }
}

pub fn element(alg: &AlgebraWithInvolution, v: &ElementValue) -> Result<AlgebraElement, String> {
    let n = alg.n();
    match v {
        ElementValue::Scalar(p) => Ok(alg.scalar(alg.field().from_poly(p))),
        ElementValue::Coords(cs) => {
            if n != 1 {
                return Err(format!("an element of M_{n}(D) must be a scalar or an {n} x {n} matrix"));
            }
            let q = d_entry(alg, &DValue::Coords(cs.clone()))?;
            alg.element(vec![vec![q]]).map_err(|e| e.to_string())
        }
        ElementValue::Matrix(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(format!("an element of M_{n}(D) must be an {n} x {n} matrix"));
            }
            let m: DMatrix = rows
                .iter()
                .map(|r| r.iter().map(|d| d_entry(alg, d)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?;
            alg.element(m).map_err(|e| e.to_string())
        }
    }
}

pub fn build_algebra(field: &NumberField, decl: &AlgebraDecl) -> PResult<AlgebraWithInvolution> {
    let e = |p: &Poly| field.from_poly(p);
    let family = match &decl.family {
        FamilyDecl::SplitOrth => Family::SplitOrth,
        FamilyDecl::Unitary { delta } => Family::Unitary { delta: e(delta) },
        FamilyDecl::QuatSymp { a, b } => Family::QuatSymp { a: e(a), b: e(b) },
        FamilyDecl::QuatSkew { a, b } => Family::QuatSkew { a: e(a), b: e(b) },
    };
    AlgebraWithInvolution::new(field, family, decl.n)
        .map_err(|err| Diagnostic::new(decl.loc, format!("algebra `{}`: {err}", decl.name)))
}

pub fn hermitian_form(alg: &AlgebraWithInvolution, body: &FormBody) -> Result<HermitianForm, String> {
    match body {
        FormBody::Diagonal { entries, .. } => {
            let es = entries.iter().map(|v| element(alg, v)).collect::<Result<Vec<_>, _>>()?;
            HermitianForm::diagonal(alg, &es).map_err(|e| e.to_string())
        }
        FormBody::Gram { rows, .. } => {
            let m: DMatrix = rows
                .iter()
                .map(|r| r.iter().map(|d| d_entry(alg, d)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?;
            HermitianForm::from_collapsed(alg, m).map_err(|e| e.to_string())
        }
        FormBody::Quadratic(_) => Err("not a hermitian form".into()),
    }
}

impl SessionDocument {
    pub fn build(&self) -> PResult<Context> {
        let field = build_field(&self.field)?;
        let mut algebras = BTreeMap::new();
        for a in &self.algebras {
            algebras.insert(a.name.clone(), build_algebra(&field, a)?);
        }
        let lookup = |name: &str, loc: Loc| {
            algebras.get(name).cloned().ok_or_else(|| Diagnostic::new(loc, format!("undeclared algebra `{name}`")))
        };
        let mut forms = BTreeMap::new();
        for f in &self.forms {
            let value = match &f.body {
                FormBody::Quadratic(es) => {
                    let es = es.iter().map(|p| field.from_poly(p)).collect();
                    FormValue::Quadratic(
                        QuadraticForm::new(&field, es)
                            .map_err(|e| Diagnostic::new(f.loc, format!("form `{}`: {e}", f.name)))?,
                    )
                }
                FormBody::Diagonal { algebra, .. } | FormBody::Gram { algebra, .. } => {
                    let alg = lookup(algebra, f.loc)?;
                    FormValue::Hermitian(
                        hermitian_form(&alg, &f.body).map_err(|e| Diagnostic::new(f.loc, format!("form `{}`: {e}", f.name)))?,
                    )
                }
            };
            forms.insert(f.name.clone(), value);
        }
        let mut elements = BTreeMap::new();
        for e in &self.elements {
            let alg = lookup(&e.algebra, e.loc)?;
            let x = element(&alg, &e.value).map_err(|m| Diagnostic::new(e.loc, format!("element `{}`: {m}", e.name)))?;
            elements.insert(e.name.clone(), x);
        }
        Ok(Context { field, var: self.field.var.clone(), algebras, forms, elements })
    }
}
