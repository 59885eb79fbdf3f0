//! Command execution and report emission.

use std::fmt::Write as _;

use hermsig_core::algebra::{AlgebraElement, AlgebraWithInvolution, DMatrix, Quaternion};
use hermsig_core::cones::{
    self, CertificateTerm, PositiveCone, SearchBounds, SosOutcome, SosParameters, SquareCertificate,
};
use hermsig_core::hermitian::{self, HermitianForm, ReferenceForm};
use hermsig_core::quadform::{self, QuadraticForm};
use hermsig_core::spectra::{self, ConeId, ConeSpace, Distinctness, PrimeIdealPair, PrimeSample, PrimeViolation};
use hermsig_core::{Error, FieldElement, NumberField, Ordering};
use serde_json::{json, Value};

use crate::session::{
    build_field, element, CommandDecl, Context, FormValue, IdealKindDecl, Loc, Op, SessionDocument,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub search: SearchBounds,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { search: SearchBounds::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordError {
    pub message: String,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub index: usize,
    pub op: Op,
    pub outcome: Result<Value, RecordError>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub records: Vec<Record>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| r.outcome.is_err())
    }

    pub fn to_value(&self) -> Value {
        let results: Vec<Value> = self
            .records
            .iter()
            .map(|r| match &r.outcome {
                Ok(v) => json!({ "index": r.index, "op": r.op.name(), "status": "ok", "value": v }),
                Err(e) => json!({
                    "index": r.index,
                    "op": r.op.name(),
                    "status": "error",
                    "error": { "message": e.message, "line": e.loc.line, "col": e.loc.col },
                }),
            })
            .collect();
        json!({ "seed": self.seed, "results": results })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("JSON values serialize") + "\n"
    }

    /// The same records as `to_json`, one `path = value` line per leaf.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "seed = {}", self.seed).unwrap();
        for r in &self.records {
            let (status, body) = match &r.outcome {
                Ok(v) => ("ok", v.clone()),
                Err(e) => ("error", json!({ "message": e.message, "line": e.loc.line, "col": e.loc.col })),
            };
            writeln!(out, "#{:<3} {:<16} {status}", r.index, r.op.name()).unwrap();
            let mut leaves = Vec::new();
            flatten("", &body, &mut leaves);
            let width = leaves.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in leaves {
                writeln!(out, "     {k:<width$} = {v}").unwrap();
            }
        }
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if !a.is_empty() && a.iter().any(|x| x.is_array() || x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(_) => "{}".into(),
        other => other.to_string(),
    }
}

type CResult<T> = Result<T, String>;

fn core<T>(r: hermsig_core::Result<T>) -> CResult<T> {
    r.map_err(|e| e.to_string())
}

struct Runner<'a> {
    doc: &'a SessionDocument,
    ctx: &'a Context,
    opts: RunOptions,
    references: Vec<ReferenceForm>,
}

fn cone_json(id: ConeId) -> Value {
    json!([id.0, id.1])
}

impl<'a> Runner<'a> {
    fn fe(&self, e: &FieldElement) -> Value {
        Value::String(e.render(&self.ctx.var))
    }

    fn quat(&self, alg: &AlgebraWithInvolution, q: &Quaternion) -> Value {
        let coords = alg.ring().to_coords(q);
        if q.is_scalar() {
            self.fe(&coords[0])
        } else {
            Value::Array(coords.iter().map(|c| self.fe(c)).collect())
        }
    }

    fn dmatrix(&self, alg: &AlgebraWithInvolution, m: &DMatrix) -> Value {
        Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|q| self.quat(alg, q)).collect())).collect())
    }

    fn alg_element(&self, x: &AlgebraElement) -> Value {
        let alg = x.algebra();
        if alg.n() == 1 {
            self.quat(alg, x.entry(0, 0))
        } else {
            self.dmatrix(alg, x.matrix())
        }
    }

    fn ordering(&self, field: &NumberField, index: usize) -> CResult<Ordering> {
        field
            .ordering(index)
            .cloned()
            .ok_or_else(|| format!("ordering {index} out of range: the field has {} orderings", field.orderings().len()))
    }

    fn form(&self, name: &str) -> CResult<&'a FormValue> {
        self.ctx.forms.get(name).ok_or_else(|| format!("undeclared form `{name}`"))
    }

    fn hermitian(&self, name: &str) -> CResult<&'a HermitianForm> {
        match self.form(name)? {
            FormValue::Hermitian(h) => Ok(h),
            FormValue::Quadratic(_) => Err(format!("form `{name}` is quadratic; a hermitian form is required")),
        }
    }

    fn algebra(&self, name: &str) -> CResult<&'a AlgebraWithInvolution> {
        self.ctx.algebras.get(name).ok_or_else(|| format!("undeclared algebra `{name}`"))
    }

    fn element(&self, name: &str) -> CResult<&'a AlgebraElement> {
        self.ctx.elements.get(name).ok_or_else(|| format!("undeclared element `{name}`"))
    }

    fn reference(&mut self, alg: &AlgebraWithInvolution, named: Option<&str>) -> CResult<ReferenceForm> {
        if let Some(name) = named {
            let h = self.hermitian(name)?;
            if h.algebra() != alg {
                return Err(format!("reference form `{name}` belongs to a different algebra"));
            }
            return core(ReferenceForm::new(h.clone()));
        }
        if let Some(eta) = self.references.iter().find(|r| r.algebra() == alg) {
            return Ok(eta.clone());
        }
        let eta = core(hermitian::reference_form(alg))?;
        self.references.push(eta.clone());
        Ok(eta)
    }

    fn table(&self, entries: impl IntoIterator<Item = (usize, i64)>) -> Value {
        Value::Array(entries.into_iter().map(|(i, s)| json!({ "ordering": i, "signature": s })).collect())
    }

    fn indices(ps: &[Ordering]) -> Value {
        json!(ps.iter().map(|p| p.index()).collect::<Vec<_>>())
    }

    fn execute(&mut self, c: &CommandDecl) -> CResult<Value> {
        let a = &c.args;
        let name = |o: &Option<String>| o.clone().expect("required keys are checked at parse time");
        let field = self.ctx.field.clone();
        match c.op {
            Op::Orderings => {
                let list: Vec<Value> = field
                    .orderings()
                    .iter()
                    .map(|p| {
                        let (lo, hi) = p.interval();
                        json!({ "index": p.index(), "interval": [lo.to_string(), hi.to_string()] })
                    })
                    .collect();
                Ok(json!({ "count": list.len(), "orderings": list }))
            }
            Op::Sign | Op::TotalSign => {
                let form = self.form(&name(&a.form))?;
                let ps: Vec<Ordering> = match a.ordering {
                    Some(i) => vec![self.ordering(&field, i)?],
                    None => field.orderings().to_vec(),
                };
                let mut entries = Vec::new();
                match form {
                    FormValue::Quadratic(q) => {
                        for p in &ps {
                            entries.push((p.index(), core(q.signature(p))?));
                        }
                    }
                    FormValue::Hermitian(h) => {
                        let eta = self.reference(h.algebra(), a.reference.as_deref())?;
                        for p in &ps {
                            entries.push((p.index(), core(hermitian::signature(h, p, &eta))?));
                        }
                    }
                }
                if c.op == Op::Sign && a.ordering.is_some() {
                    let (i, s) = entries[0];
                    Ok(json!({ "ordering": i, "signature": s }))
                } else {
                    Ok(json!({ "table": self.table(entries) }))
                }
            }
            Op::Nil => {
                let alg = self.algebra(&name(&a.algebra))?;
                Ok(json!({ "nil": Self::indices(alg.nil_orderings()), "non_nil": Self::indices(alg.non_nil_orderings()) }))
            }
            Op::Torsion => {
                let torsion = match self.form(&name(&a.form))? {
                    FormValue::Quadratic(q) => q.is_torsion(),
                    FormValue::Hermitian(h) => {
                        let eta = self.reference(h.algebra(), a.reference.as_deref())?;
                        core(hermitian::torsion_test_h(h, &eta))?
                    }
                };
                Ok(json!({ "torsion": torsion }))
            }
            Op::TransferCheck => self.transfer_check(c),
            Op::GoingUp => self.going_up(c),
            Op::ReferenceForm => {
                let alg = self.algebra(&name(&a.algebra))?;
                let eta = self.reference(alg, None)?;
                let gram: Vec<Value> = eta
                    .form
                    .gram_view()
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|x| self.alg_element(x)).collect()))
                    .collect();
                let signs: Vec<Value> = alg
                    .non_nil_orderings()
                    .iter()
                    .map(|p| json!({ "ordering": p.index(), "sign": eta.sign_at(p) }))
                    .collect();
                let raw = self.table(eta.certificate.iter().map(|(p, s)| (p.index(), *s)));
                Ok(json!({ "gram": gram, "signs": signs, "raw_signatures": raw }))
            }
            Op::Cones => {
                let alg = self.algebra(&name(&a.algebra))?;
                let eta = self.reference(alg, a.reference.as_deref())?;
                let mut ids: Vec<ConeId> = cones::enumerate_positive_cones(&eta).iter().map(|c| c.id()).collect();
                ids.sort();
                Ok(json!({ "count": ids.len(), "cones": ids.into_iter().map(cone_json).collect::<Vec<_>>() }))
            }
            Op::ConeMember => {
                let x = self.element(&name(&a.element))?;
                let p = self.ordering(&field, a.ordering.expect("required"))?;
                let eta = self.reference(x.algebra(), a.reference.as_deref())?;
                let cone = core(PositiveCone::new(&eta, &p, a.orientation.expect("required")))?;
                Ok(json!({ "cone": cone_json(cone.id()), "member": core(cone.contains(x))? }))
            }
            Op::EtaMax => {
                let x = self.element(&name(&a.element))?;
                let p = self.ordering(&field, a.ordering.expect("required"))?;
                let eta = self.reference(x.algebra(), a.reference.as_deref())?;
                Ok(json!({ "ordering": p.index(), "maximal": core(cones::eta_maximal(x, &p, &eta))? }))
            }
            Op::SosFind => {
                let u = self.element(&name(&a.element))?;
                let params = self.sos_params(c, u)?;
                let eta = self.reference(u.algebra(), a.reference.as_deref())?;
                match core(cones::find_sos_certificate(u, &params, &eta, self.opts.search))? {
                    SosOutcome::Certificate(cert) => {
                        let verified = core(cones::verify_certificate(u, &params, &cert))?;
                        let terms: Vec<Value> = cert
                            .terms
                            .iter()
                            .map(|t| json!({ "weight": self.fe(&t.weight), "x": self.alg_element(&t.x), "generator": t.generator }))
                            .collect();
                        Ok(json!({ "outcome": "certificate", "terms": terms, "verified": verified }))
                    }
                    SosOutcome::Refutation { ordering, witness } => {
                        let w: Vec<Value> = witness.iter().map(|q| self.quat(u.algebra(), q)).collect();
                        Ok(json!({ "outcome": "refutation", "ordering": ordering.index(), "witness": w }))
                    }
                    SosOutcome::Unknown => Ok(json!({ "outcome": "unknown" })),
                }
            }
            Op::SosVerify => {
                let u = self.element(&name(&a.element))?;
                let params = self.sos_params(c, u)?;
                let alg = u.algebra();
                let mut terms = Vec::new();
                for (i, t) in a.certificate.as_ref().expect("required").iter().enumerate() {
                    let x = element(alg, &t.x).map_err(|m| format!("certificate term {i}: {m}"))?;
                    terms.push(CertificateTerm { weight: alg.field().from_poly(&t.weight), x, generator: t.generator });
                }
                let cert = SquareCertificate { terms };
                match cones::verify_certificate(u, &params, &cert) {
                    Ok(valid) => Ok(json!({ "valid": valid })),
                    Err(e @ Error::WeightNotPositive { .. }) => Ok(json!({ "valid": false, "reason": e.to_string() })),
                    Err(e) => Err(e.to_string()),
                }
            }
            Op::Positivity => {
                let alg = self.algebra(&name(&a.algebra))?;
                let sets = core(cones::positivity_sets(alg))?;
                Ok(json!({
                    "x_sigma": Self::indices(&sets.x_sigma),
                    "x_tilde": Self::indices(&sets.x_tilde),
                    "ps_prime": sets.ps_prime_holds,
                    "formally_real": cones::formally_real(alg),
                }))
            }
            Op::Ideals => self.ideals(c),
            Op::Morphisms => {
                let alg = self.algebra(&name(&a.algebra))?;
                let eta = self.reference(alg, a.reference.as_deref())?;
                let bound = a.bound.unwrap_or(3);
                let ps = field.orderings();
                let mut pairs = Vec::new();
                for i in 0..ps.len() {
                    for j in i + 1..ps.len() {
                        let v = match core(spectra::morphism_distinctness(&ps[i], &ps[j], &eta, bound))? {
                            Distinctness::Equivalent => json!({ "p": i, "q": j, "distinct": false }),
                            Distinctness::Separated { form, at_p, at_q } => json!({
                                "p": i,
                                "q": j,
                                "distinct": true,
                                "form": self.dmatrix(form.algebra(), form.collapsed()),
                                "at_p": at_p,
                                "at_q": at_q,
                            }),
                        };
                        pairs.push(v);
                    }
                }
                Ok(json!({ "pairs": pairs }))
            }
            Op::Topology => {
                let alg = self.algebra(&name(&a.algebra))?;
                let eta = self.reference(alg, a.reference.as_deref())?;
                let space = core(ConeSpace::new(&eta))?;
                let report = core(space.topology_compare(self.doc.seed, a.samples.unwrap_or(12), a.height.unwrap_or(2)))?;
                let ids = |s| Value::Array(space.ids(s).into_iter().map(cone_json).collect());
                let mut out = json!({
                    "points": ids(space.full()),
                    "equal": report.equal,
                    "t0": report.t0,
                    "subbasis_adequate": report.subbasis_adequate,
                    "neighbourhoods": report.neighbourhoods.iter().map(|&s| ids(s)).collect::<Vec<_>>(),
                });
                if let Some(names) = &a.elements {
                    let xs = names.iter().map(|n| self.element(n).cloned()).collect::<CResult<Vec<_>>>()?;
                    out["basic_open"] = ids(core(space.basic_open(&xs))?);
                }
                Ok(out)
            }
            Op::MoritaCheck => {
                let alg = self.algebra(&name(&a.algebra))?;
                let eta = self.reference(alg, a.reference.as_deref())?;
                let maps = core(spectra::morita_cone_maps(&eta, self.doc.seed, a.samples.unwrap_or(8)))?;
                let pairs: Vec<Value> = maps.pairs.iter().map(|&(x, y)| json!([cone_json(x), cone_json(y)])).collect();
                Ok(json!({
                    "pairs": pairs,
                    "psd_trace": maps.psd_trace,
                    "round_trip": maps.round_trip,
                    "homeomorphism": maps.homeomorphism,
                    "holds": maps.holds(),
                }))
            }
            Op::Decompose => {
                let h = self.hermitian(&name(&a.form))?;
                let p = self.ordering(&field, a.ordering.expect("required"))?;
                let eta = self.reference(h.algebra(), a.reference.as_deref())?;
                let cone = core(PositiveCone::new(&eta, &p, a.orientation.unwrap_or(1)))?;
                let d = core(cones::sylvester_decompose(h, &cone))?;
                let alg = h.algebra();
                Ok(json!({
                    "cone": cone_json(cone.id()),
                    "t": d.t,
                    "weights": d.weights.iter().map(|w| self.fe(w)).collect::<Vec<_>>(),
                    "positive": d.positive.iter().map(|q| self.quat(alg, q)).collect::<Vec<_>>(),
                    "negative": d.negative.iter().map(|q| self.quat(alg, q)).collect::<Vec<_>>(),
                    "signature": d.signature,
                }))
            }
        }
    }

    fn sos_params(&self, c: &CommandDecl, u: &AlgebraElement) -> CResult<SosParameters> {
        let a = &c.args;
        let alg = u.algebra();
        let base = match &a.a {
            Some(n) => {
                let x = self.element(n)?;
                if x.algebra() != alg {
                    return Err(format!("element `{n}` belongs to a different algebra"));
                }
                x.clone()
            }
            None => alg.one(),
        };
        let slots = a.slots.iter().flatten().map(|p| alg.field().from_poly(p)).collect();
        core(SosParameters::new(base, slots, a.k.unwrap_or(1)))
    }

    fn transfer_check(&mut self, c: &CommandDecl) -> CResult<Value> {
        let a = &c.args;
        let ext = a.extension.as_ref().expect("required");
        let l = build_field(ext).map_err(|d| d.message)?;
        let base = self.ctx.field.clone();
        if let Some(entries) = &a.quadratic {
            let q = core(QuadraticForm::new(&l, entries.iter().map(|p| l.from_poly(p)).collect()))?;
            let tr = core(quadform::transfer(&q, &base))?;
            let p = self.ordering(&base, 0)?;
            let transfer_side = core(tr.signature(&p))?;
            let mut sum_side = 0;
            for o in l.orderings() {
                sum_side += core(q.signature(o))?;
            }
            return Ok(json!({
                "transfer_side": transfer_side,
                "sum_side": sum_side,
                "holds": transfer_side == sum_side,
            }));
        }
        let alg = self.algebra(a.algebra.as_deref().expect("checked at parse time"))?;
        let eta = self.reference(alg, a.reference.as_deref())?;
        let eta_l = core(eta.going_up(&l))?;
        let alg_l = eta_l.algebra();
        let entries = a
            .diagonal
            .as_ref()
            .expect("checked at parse time")
            .iter()
            .map(|v| element(alg_l, v))
            .collect::<CResult<Vec<_>>>()?;
        let h = core(HermitianForm::diagonal(alg_l, &entries))?;
        let r = core(hermitian::knebusch_check(&h, &eta))?;
        Ok(json!({
            "transfer_side": r.transfer_side,
            "transfer_side_via_trace_form": r.transfer_side_via_trace_form,
            "sum_side": r.sum_side,
            "holds": r.holds,
        }))
    }

    fn going_up(&mut self, c: &CommandDecl) -> CResult<Value> {
        let a = &c.args;
        let l = build_field(a.extension.as_ref().expect("required")).map_err(|d| d.message)?;
        let base = self.ctx.field.clone();
        let p = self.ordering(&base, 0)?;
        let (base_signature, table, holds) = match self.form(a.form.as_deref().expect("required"))? {
            FormValue::Quadratic(q) => {
                if !base.is_rationals() {
                    return Err(Error::UnsupportedBase("going-up is implemented from Q only".into()).to_string());
                }
                let embedded = q
                    .entries()
                    .iter()
                    .map(|e| l.from_rational(e.as_rational().expect("rational entries")))
                    .collect();
                let ql = core(QuadraticForm::new(&l, embedded))?;
                let s = core(q.signature(&p))?;
                let mut entries = Vec::new();
                for o in l.orderings() {
                    entries.push((o.index(), core(ql.signature(o))?));
                }
                let holds = entries.iter().all(|&(_, t)| t == s);
                (s, entries, holds)
            }
            FormValue::Hermitian(h) => {
                let eta = self.reference(h.algebra(), a.reference.as_deref())?;
                let hl = core(hermitian::going_up(h, &l))?;
                let eta_l = core(eta.going_up(&l))?;
                let s = core(hermitian::signature(h, &p, &eta))?;
                let table = core(hermitian::signature_table(&hl, &eta_l))?;
                let entries = table.entries.iter().map(|(o, t)| (o.index(), *t)).collect();
                (s, entries, core(hermitian::going_up_check(h, &l, &eta))?)
            }
        };
        Ok(json!({ "base_signature": base_signature, "table": self.table(table), "holds": holds }))
    }

    fn ideals(&mut self, c: &CommandDecl) -> CResult<Value> {
        let a = &c.args;
        let alg = self.algebra(a.algebra.as_deref().expect("required"))?;
        let eta = self.reference(alg, a.reference.as_deref())?;
        let field = alg.field().clone();
        let kind = a.kind.expect("required");
        let p = match a.ordering {
            Some(i) => Some(self.ordering(&field, i)?),
            None => None,
        };
        let pair = match kind {
            IdealKindDecl::SignatureKernel => PrimeIdealPair::signature_kernel(&eta, p.as_ref().expect("checked")),
            IdealKindDecl::ModP => PrimeIdealPair::mod_p(&eta, p.as_ref().expect("checked"), a.prime.expect("checked")),
            IdealKindDecl::Fabricated => PrimeIdealPair::fabricated(&eta, p.as_ref().expect("checked")),
            IdealKindDecl::Fundamental => {
                let gens = a
                    .generators
                    .iter()
                    .flatten()
                    .map(|n| self.hermitian(n).cloned())
                    .collect::<CResult<Vec<_>>>()?;
                PrimeIdealPair::fundamental(&eta, gens)
            }
        };
        let pair = core(pair)?;
        let mut membership = Vec::new();
        for n in a.forms.iter().flatten() {
            let member = match self.form(n)? {
                FormValue::Quadratic(q) => core(pair.in_ideal(q))?,
                FormValue::Hermitian(h) => core(pair.in_submodule(h))?,
            };
            membership.push(json!({ "form": n, "member": member }));
        }
        let prime = match core(spectra::prime_property_sample(&pair, a.trials.unwrap_or(20), self.doc.seed))? {
            PrimeSample::Pass => json!("pass"),
            PrimeSample::Counterexample(v) => {
                let (label, q, h) = match &v {
                    PrimeViolation::NotClosed { q, h } => ("not-closed", q, h),
                    PrimeViolation::NotPrime { q, h } => ("not-prime", q, h),
                };
                json!({
                    "violation": label,
                    "q": q.entries().iter().map(|e| self.fe(e)).collect::<Vec<_>>(),
                    "h": self.dmatrix(h.algebra(), h.collapsed()),
                })
            }
        };
        Ok(json!({ "kind": kind.name(), "membership": membership, "prime": prime }))
    }
}

/// Runs every command of a parsed document, in order.
pub fn run(doc: &SessionDocument, opts: RunOptions) -> Report {
    let records = match doc.build() {
        Ok(ctx) => {
            let mut runner = Runner { doc, ctx: &ctx, opts, references: Vec::new() };
            doc.commands
                .iter()
                .enumerate()
                .map(|(index, c)| Record {
                    index,
                    op: c.op,
                    outcome: runner.execute(c).map_err(|message| RecordError { message, loc: c.loc }),
                })
                .collect()
        }
        Err(d) => doc
            .commands
            .iter()
            .enumerate()
            .map(|(index, c)| Record {
                index,
                op: c.op,
                outcome: Err(RecordError { message: d.message.clone(), loc: d.loc }),
            })
            .collect(),
    };
    Report { seed: doc.seed, records }
}
