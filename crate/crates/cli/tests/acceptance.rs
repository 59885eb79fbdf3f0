//! Acceptance suite: one PASS/FAIL line per criterion.

#[path = "../../core/tests/support/catalogue.rs"]
mod catalogue;
#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hermsig::{parse_session, run, Report, RunOptions};
use hermsig_core::algebra::{AlgebraElement, AlgebraWithInvolution, Quaternion};
use hermsig_core::cones::{
    enumerate_positive_cones, eta_maximal, find_sos_certificate, formally_real, positivity_sets, verify_certificate,
    SearchBounds, SosOutcome, SosParameters,
};
use hermsig_core::hermitian::{
    knebusch_check, reference_form, signature, signature_table, trace_form, trace_signature, HermitianForm,
};
use hermsig_core::quadform::{FieldMatrix, GramQuadraticForm, QuadraticForm};
use hermsig_core::sample::Sampler;
use hermsig_core::spectra::{is_t0, morita_cone_maps, ConeSpace};
use hermsig_core::{NumberField, Rational};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

const FIXTURES: [&str; 5] = ["minimal", "full", "towers", "real_quadratic", "acceptance"];

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

/// Failures, free-form notes and a digest of every computed value.
struct Check {
    failures: Vec<String>,
    failure_count: usize,
    notes: Vec<String>,
    digest: DefaultHasher,
}

impl Check {
    fn new() -> Self {
        Check { failures: Vec::new(), failure_count: 0, notes: Vec::new(), digest: DefaultHasher::new() }
    }

    fn record<T: Hash + ?Sized>(&mut self, v: &T) {
        v.hash(&mut self.digest);
    }

    fn ensure(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < 3 {
                self.failures.push(what());
            }
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

type Step<T> = Result<T, String>;

fn ok<T>(r: hermsig_core::Result<T>, what: &str) -> Step<T> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn report_for(name: &str) -> Step<Report> {
    let text = std::fs::read_to_string(fixture_path(name)).map_err(|e| e.to_string())?;
    let doc = parse_session(&text).map_err(|d| format!("{name}.json {d}"))?;
    Ok(run(&doc, RunOptions::default()))
}

fn record_value(report: &Report, i: usize) -> Step<Value> {
    report.records[i].outcome.clone().map_err(|e| format!("fixture record {i}: {}", e.message))
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `(#positive, #negative)` eigenvalues of a rational symmetric matrix, by
/// Descartes' rule on its characteristic polynomial.
fn inertia(m: &oracle::QMatrix) -> (usize, usize) {
    let c = oracle::char_poly(m);
    let changes = |c: &[Rational]| {
        let s: Vec<bool> = c.iter().filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let alternated: Vec<Rational> = c.iter().enumerate().map(|(i, v)| if i % 2 == 1 { -v } else { v.clone() }).collect();
    (changes(&c), changes(&alternated))
}

fn qmatrix(m: &FieldMatrix) -> oracle::QMatrix {
    m.iter().map(|r| r.iter().map(|e| e.as_rational().expect("rational entry")).collect()).collect()
}

fn signature_axioms(seed: u64, c: &mut Check) -> Step<()> {
    let mut s = Sampler::new(seed, 5);
    let mut triples = 0;
    let instances = catalogue::all_instances();
    for alg in &instances {
        let eta = ok(reference_form(alg), "reference form")?;
        for _ in 0..100 {
            let (r1, r2) = (1 + s.below(4), 1 + s.below(4));
            let h1 = s.gram_form(alg, r1);
            let h2 = s.gram_form(alg, r2);
            let rq = 1 + s.below(3);
            let qf = s.quadratic_form(alg.field(), rq);
            let t1 = ok(signature_table(&h1, &eta), "sign h1")?;
            let t2 = ok(signature_table(&h2, &eta), "sign h2")?;
            let sum = ok(signature_table(&ok(h1.perp(&h2), "perp")?, &eta), "sign h1 + h2")?;
            let hyp = ok(signature_table(&ok(h1.perp(&h1.neg()), "perp")?, &eta), "sign h1 - h1")?;
            let prod = ok(signature_table(&ok(h1.scale_by_quadratic(&qf), "q.h")?, &eta), "sign q.h")?;
            for (k, p) in alg.field().orderings().iter().enumerate() {
                let (a, b) = (t1.entries[k].1, t2.entries[k].1);
                let sq = ok(qf.signature(p), "sign q")?;
                c.record(&(a, b, sq));
                c.ensure(sum.entries[k].1 == a + b, || format!("additivity at P{k} over {alg:?}"));
                c.ensure(hyp.entries[k].1 == 0, || format!("hyperbolic h1 + (-h1) at P{k} over {alg:?}"));
                c.ensure(prod.entries[k].1 == sq * a, || format!("sign(q.h) at P{k} over {alg:?}"));
            }
            triples += 1;
        }
    }
    c.note(format!("{triples} form triples over {} catalogue instances", instances.len()));
    Ok(())
}

fn hamilton(c: &mut Check) -> Step<()> {
    let f = NumberField::rationals();
    let alg = ok(AlgebraWithInvolution::quat_symp(&f, f.from_int(-1), f.from_int(-1), 1), "algebra")?;
    let eta = ok(reference_form(&alg), "reference form")?;
    let p = &f.orderings()[0];
    let one = ok(HermitianForm::from_ints(&alg, &[1]), "<1>")?;
    let tf = trace_form(&one);
    let expected: FieldMatrix =
        (0..4).map(|i| (0..4).map(|j| f.from_int(if i == j { 2 } else { 0 })).collect()).collect();
    c.ensure(*tf.matrix() == expected, || format!("trace form of <1> is {:?}", tf.matrix()));
    let (pos, neg) = inertia(&qmatrix(tf.matrix()));
    c.ensure((pos, neg) == (4, 0), || format!("trace form inertia {pos}, {neg}"));
    let s1 = ok(signature(&one, p, &eta), "sign <1>")?;
    let h = ok(HermitianForm::from_ints(&alg, &[1, -2, 3]), "<1,-2,3>")?;
    let s3 = ok(signature(&h, p, &eta), "sign <1,-2,3>")?;
    c.record(&(s1, s3));
    c.ensure(s1 == 1, || format!("sign <1> = {s1}"));
    c.ensure(s3 == 1, || format!("sign <1,-2,3> = {s3}"));
    let report = report_for("acceptance")?;
    for i in [0, 1] {
        let v = record_value(&report, i)?;
        c.ensure(v == json!({ "ordering": 0, "signature": 1 }), || format!("CLI record {i}: {v}"));
    }
    c.note("trace form 2I, signatures 1 and 1, CLI agrees");
    Ok(())
}

fn oracle_equivalence(c: &mut Check) -> Step<()> {
    let f = NumberField::rationals();
    let mut instances = Vec::new();
    for b in [1, -1] {
        instances.push(ok(AlgebraWithInvolution::quat_symp(&f, f.one(), f.from_int(b), 1), "algebra")?);
        instances.push(ok(AlgebraWithInvolution::quat_skew(&f, f.one(), f.from_int(b), 1), "algebra")?);
    }
    let off = oracle::quaternions(&f, 1, false);
    let p = &f.orderings()[0];
    let mut counts = [0usize; 3];
    for alg in &instances {
        let eta = ok(reference_form(alg), "reference form")?;
        let mut visit = |h: HermitianForm, rank: usize, c: &mut Check| {
            counts[rank - 1] += 1;
            let r = oracle::split_agreement(&h, &eta.form);
            c.record(&trace_signature(&h, p).ok());
            c.ensure(r.is_ok(), || r.clone().unwrap_err());
        };
        let diag2 = oracle::diagonal_entries(alg, 2);
        let diag1 = oracle::diagonal_entries(alg, 1);
        oracle::for_each_gram(alg, 1, &diag2, None, &mut |h| visit(h, 1, c));
        oracle::for_each_gram(alg, 2, &diag1, Some(&off), &mut |h| visit(h, 2, c));
        oracle::for_each_gram(alg, 3, &diag1, None, &mut |h| visit(h, 3, c));
    }
    c.note(format!(
        "{} rank-1 forms (height 2), {} rank-2 Gram matrices (height 1), {} rank-3 diagonal forms (height 1)",
        counts[0], counts[1], counts[2]
    ));
    Ok(())
}

fn knebusch(seed: u64, c: &mut Check) -> Step<()> {
    let qf = NumberField::rationals();
    let bases = [
        ok(AlgebraWithInvolution::split_orth(&qf, 1), "algebra")?,
        ok(AlgebraWithInvolution::quat_symp(&qf, qf.from_int(-1), qf.from_int(-1), 1), "algebra")?,
    ];
    let mut s = Sampler::new(seed, 3);
    let mut forms = 0;
    for l in [catalogue::sqrt2(), catalogue::sqrt3(), catalogue::cbrt2()] {
        for base in &bases {
            let eta = ok(reference_form(base), "reference form")?;
            let alg_l = ok(eta.going_up(&l), "going up")?.algebra().clone();
            for _ in 0..20 {
                let rank = 1 + s.below(3);
                let h = s.form(&alg_l, rank);
                let r = ok(knebusch_check(&h, &eta), "trace formula")?;
                c.record(&(r.transfer_side, r.sum_side));
                c.ensure(r.holds, || format!("{r:?} for {:?}", h.collapsed()));
                if base.ring().dim() == 1 {
                    // independent transfer: Tr(θ^(a+b)·g_rs) in the power basis
                    let g = h.collapsed();
                    let d = l.degree();
                    let mut m = vec![vec![Rational::zero(); g.len() * d]; g.len() * d];
                    for (r_, row) in g.iter().enumerate() {
                        for (s_, e) in row.iter().enumerate() {
                            for a in 0..d {
                                for b in 0..d {
                                    m[r_ * d + a][s_ * d + b] = (&e.w * &l.generator().pow((a + b) as u32)).trace();
                                }
                            }
                        }
                    }
                    let (pos, neg) = inertia(&m);
                    let sig = pos as i64 - neg as i64;
                    c.ensure(sig == r.sum_side, || format!("oracle transfer signature {sig} vs {}", r.sum_side));
                }
                forms += 1;
            }
        }
    }
    c.note(format!("{forms} forms over three extensions, both sides equal"));
    Ok(())
}

fn pfister(c: &mut Check) -> Step<()> {
    let f = NumberField::rationals();
    let r = |n: i64, d: i64| f.from_rational(Rational::new(n.into(), d.into()));
    let diag = |v: &[i64]| -> FieldMatrix {
        (0..v.len()).map(|i| (0..v.len()).map(|j| f.from_int(if i == j { v[i] } else { 0 })).collect()).collect()
    };
    // <1,1> ≅ <2,2> through the rows (1,1), (1,-1)
    let s: FieldMatrix = vec![vec![f.from_int(1), f.from_int(1)], vec![f.from_int(1), f.from_int(-1)]];
    let moved = ok(ok(GramQuadraticForm::new(&f, diag(&[1, 1])), "<1,1>")?.congruent(&s), "congruence")?;
    c.ensure(*moved.matrix() == diag(&[2, 2]), || format!("S^T S = {:?}", moved.matrix()));

    // 2 x <1,-2> in the basis e1, e2, e3, e4 becomes two hyperbolic planes
    let h = |a: i64| r(a, 2);
    let t: FieldMatrix = vec![
        vec![h(1), h(1), h(1), h(1)],
        vec![h(1), h(-1), h(0), h(0)],
        vec![h(1), h(1), h(-1), h(-1)],
        vec![h(0), h(0), h(1), h(-1)],
    ];
    let twice = ok(GramQuadraticForm::new(&f, diag(&[1, -2, 1, -2])), "2 x <1,-2>")?;
    let witnessed = ok(twice.congruent(&t), "congruence")?;
    let hyp: FieldMatrix = (0..4)
        .map(|i| (0..4).map(|j| f.from_int(if i / 2 == j / 2 && i != j { 1 } else { 0 })).collect())
        .collect();
    c.ensure(*witnessed.matrix() == hyp, || format!("T^T D T = {:?}", witnessed.matrix()));
    let det = oracle::char_poly(&qmatrix(&t))[0].clone();
    c.ensure(!det.is_zero(), || "witness is singular".into());

    let twice_q = ok(QuadraticForm::from_ints(&f, &[1, -2, 1, -2]), "form")?;
    let unit = ok(QuadraticForm::from_ints(&f, &[1]), "form")?;
    c.record(&(twice_q.is_torsion(), unit.is_torsion()));
    c.ensure(twice_q.is_torsion(), || "2 x <1,-2> not reported torsion".into());
    c.ensure(!unit.is_torsion(), || "<1> reported torsion".into());
    let report = report_for("acceptance")?;
    c.ensure(record_value(&report, 2)? == json!({ "torsion": true }), || "CLI torsion of 2 x <1,-2>".into());
    c.ensure(record_value(&report, 3)? == json!({ "torsion": false }), || "CLI torsion of <1>".into());
    c.note(format!("witness det {det}, torsion true for 2 x <1,-2>, false for <1>"));
    Ok(())
}

fn cone_classification(seed: u64, c: &mut Check) -> Step<()> {
    let mut s = Sampler::new(seed, 2);
    let mut instances = 0;
    let mut samples = 0;
    for alg in catalogue::all_instances() {
        let x = alg.non_nil_orderings().len();
        if x > 2 {
            continue;
        }
        let eta = ok(reference_form(&alg), "reference form")?;
        let cones = enumerate_positive_cones(&eta);
        c.record(&cones.iter().map(|k| k.id()).collect::<Vec<_>>());
        c.ensure(cones.len() == 2 * x, || format!("{} cones for |X~| = {x} over {alg:?}", cones.len()));
        for _ in 0..200 {
            let a = s.invertible_symmetric(&alg);
            for cone in &cones {
                let oriented = if cone.orientation() == 1 { a.clone() } else { a.neg() };
                let member = ok(cone.contains(&a), "membership")?;
                let maximal = ok(eta_maximal(&oriented, cone.ordering(), &eta), "maximality")?;
                c.record(&member);
                c.ensure(member == maximal, || format!("mismatch at {:?} over {alg:?}", cone.id()));
            }
            samples += 1;
        }
        instances += 1;
    }
    c.note(format!("{instances} instances, {samples} invertible samples, {} mismatches", c.failure_count));
    Ok(())
}

fn scalar_matrix(alg: &AlgebraWithInvolution, m: &[Vec<i64>]) -> Step<AlgebraElement> {
    let f = alg.field();
    let d = m.iter().map(|r| r.iter().map(|&v| Quaternion::scalar(f.from_int(v))).collect()).collect();
    ok(alg.element(d), "matrix")
}

fn mat_t_d_mat(b: &[Vec<i64>], d: &[i64]) -> Vec<Vec<i64>> {
    let n = b.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| b[k][i] * d[k] * b[k][j]).sum()).collect()).collect()
}

fn random_int_matrix(s: &mut Sampler) -> Vec<Vec<i64>> {
    (0..3).map(|_| (0..3).map(|_| s.int()).collect()).collect()
}

fn det3(m: &[Vec<i64>]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn artin_split(seed: u64, c: &mut Check) -> Step<()> {
    let f = NumberField::rationals();
    let alg = ok(AlgebraWithInvolution::split_orth(&f, 3), "algebra")?;
    let eta = ok(reference_form(&alg), "reference form")?;
    let params = ok(SosParameters::new(alg.one(), vec![], 1), "parameters")?;
    let mut s = Sampler::new(seed, 3);
    let mut max_terms = 0;
    for _ in 0..25 {
        let a = random_int_matrix(&mut s);
        let m = mat_t_d_mat(&a, &[1, 1, 1]);
        let qm: oracle::QMatrix = m.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
        c.ensure(inertia(&qm).1 == 0, || format!("oracle: {m:?} is not PSD"));
        let u = scalar_matrix(&alg, &m)?;
        match ok(find_sos_certificate(&u, &params, &eta, SearchBounds::default()), "search")? {
            SosOutcome::Certificate(cert) => {
                max_terms = max_terms.max(cert.terms.len());
                c.record(&cert.terms.len());
                c.ensure(cert.terms.len() <= 12, || format!("{} vectors for {m:?}", cert.terms.len()));
                let v = ok(verify_certificate(&u, &params, &cert), "verification")?;
                c.ensure(v, || format!("certificate for {m:?} does not verify"));
            }
            other => c.ensure(false, || format!("PSD {m:?} gave {other:?}")),
        }
    }
    let mut refuted = 0;
    while refuted < 25 {
        let b = random_int_matrix(&mut s);
        if det3(&b) == 0 {
            continue;
        }
        let m = mat_t_d_mat(&b, &[1, -1, s.nonzero_int()]);
        let qm: oracle::QMatrix = m.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
        let (pos, neg) = inertia(&qm);
        c.ensure(pos > 0 && neg > 0, || format!("oracle: {m:?} is not indefinite"));
        let u = scalar_matrix(&alg, &m)?;
        match ok(find_sos_certificate(&u, &params, &eta, SearchBounds::default()), "search")? {
            SosOutcome::Refutation { ordering, .. } => c.record(&ordering.index()),
            other => c.ensure(false, || format!("indefinite {m:?} gave {other:?}")),
        }
        refuted += 1;
    }
    c.note(format!("25 PSD certified (at most {max_terms} vectors), 25 indefinite refuted"));
    Ok(())
}

fn ps_prime(c: &mut Check) -> Step<()> {
    let f = NumberField::rationals();
    let all: Vec<usize> = f.orderings().iter().map(|p| p.index()).collect();
    let mut algs = vec![ok(AlgebraWithInvolution::quat_symp(&f, f.from_int(-1), f.from_int(-1), 1), "algebra")?];
    for n in 1..=3 {
        algs.push(ok(AlgebraWithInvolution::split_orth(&f, n), "algebra")?);
    }
    for alg in &algs {
        let sets = ok(positivity_sets(alg), "positivity sets")?;
        let xs: Vec<usize> = sets.x_sigma.iter().map(|p| p.index()).collect();
        let xt: Vec<usize> = sets.x_tilde.iter().map(|p| p.index()).collect();
        c.record(&(&xs, &xt, sets.ps_prime_holds));
        c.ensure(xs == all && xt == all && sets.ps_prime_holds, || format!("{alg:?}: X_sigma {xs:?}, X~ {xt:?}"));
    }
    let nil = ok(AlgebraWithInvolution::quat_symp(&f, f.one(), f.one(), 1), "algebra")?;
    let sets = ok(positivity_sets(&nil), "positivity sets")?;
    c.record(&(sets.x_tilde.len(), formally_real(&nil)));
    c.ensure(sets.x_tilde.is_empty() && !formally_real(&nil), || "QuatSymp(1,1,1) reported formally real".into());

    let report = report_for("acceptance")?;
    for i in 4..8 {
        let v = record_value(&report, i)?;
        c.ensure(
            v == json!({ "x_sigma": all, "x_tilde": all, "ps_prime": true, "formally_real": true }),
            || format!("CLI record {i}: {v}"),
        );
    }
    let v = record_value(&report, 8)?;
    c.ensure(v["x_tilde"] == json!([]) && v["formally_real"] == json!(false), || format!("CLI record 8: {v}"));
    c.note("X_sigma = X~ = X_Q for 4 instances; QuatSymp(1,1,1) not formally real");
    Ok(())
}

fn topology(seed: u64, c: &mut Check) -> Step<()> {
    let mut instances = 0;
    let mut points = 0;
    for f in [catalogue::rationals(), catalogue::sqrt2(), catalogue::sqrt3(), catalogue::cubic3()] {
        for alg in catalogue::instances(&f) {
            if alg.non_nil_orderings().len() > 3 {
                continue;
            }
            let eta = ok(reference_form(&alg), "reference form")?;
            let space = ok(ConeSpace::new(&eta), "cone space")?;
            let report = ok(space.topology_compare(seed, 12, 2), "topology")?;
            c.record(&report.neighbourhoods);
            c.ensure(report.equal && report.subbasis_adequate, || format!("{alg:?}: {report:?}"));
            c.ensure(report.t0 && is_t0(&report.neighbourhoods), || format!("{alg:?} is not T0"));
            let maps = ok(morita_cone_maps(&eta, seed, 8), "Morita maps")?;
            c.record(&maps.pairs);
            c.ensure(maps.holds(), || format!("{alg:?}: {maps:?}"));
            instances += 1;
            points += space.len();
        }
    }
    let report = report_for("acceptance")?;
    let v = record_value(&report, 9)?;
    c.ensure(v["equal"] == json!(true) && v["t0"] == json!(true), || format!("CLI topology: {v}"));
    c.ensure(record_value(&report, 10)?["holds"] == json!(true), || "CLI morita-check".into());
    c.note(format!("{instances} instances, {points} cone points"));
    Ok(())
}

struct Outcome {
    pass: bool,
    summary: String,
    digest: u64,
}

fn evaluate(f: impl FnOnce(&mut Check) -> Step<()>, time_limit: Option<Duration>) -> Outcome {
    let mut c = Check::new();
    let start = Instant::now();
    let step = f(&mut c);
    let elapsed = start.elapsed();
    let mut problems = c.failures.clone();
    if c.failure_count > c.failures.len() {
        problems.push(format!("{} failures in total", c.failure_count));
    }
    if let Err(e) = step {
        problems.push(e);
    }
    if let Some(limit) = time_limit {
        if elapsed > limit {
            problems.push(format!("took {:.1} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()));
        }
    }
    let mut summary = c.notes.join("; ");
    summary.push_str(&format!(" ({:.1} s)", elapsed.as_secs_f64()));
    if !problems.is_empty() {
        summary.push_str(&format!(": {}", problems.join(" | ")));
    }
    Outcome { pass: problems.is_empty(), summary, digest: c.digest.finish() }
}

fn criteria(seed: u64) -> Vec<(&'static str, Outcome)> {
    vec![
        ("signature axioms", evaluate(|c| signature_axioms(seed, c), Some(Duration::from_secs(60)))),
        ("Hamilton calibration", evaluate(hamilton, None)),
        ("oracle equivalence", evaluate(oracle_equivalence, None)),
        ("trace formula", evaluate(|c| knebusch(seed, c), None)),
        ("Pfister local-global", evaluate(pfister, None)),
        ("cone classification", evaluate(|c| cone_classification(seed, c), None)),
        ("Artin, split case", evaluate(|c| artin_split(seed, c), None)),
        ("(PS') predicate", evaluate(ps_prime, None)),
        ("topology", evaluate(|c| topology(seed, c), Some(Duration::from_secs(10)))),
    ]
}

fn determinism(seed: u64, first: &[(&'static str, Outcome)], c: &mut Check) -> Step<()> {
    for name in FIXTURES {
        let path = fixture_path(name);
        let runs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                Command::new(env!("CARGO_BIN_EXE_hermsig"))
                    .args(["run", path.to_str().unwrap()])
                    .output()
                    .map(|o| o.stdout)
                    .map_err(|e| e.to_string())
            })
            .collect::<Step<_>>()?;
        c.ensure(runs[0] == runs[1] && !runs[0].is_empty(), || format!("{name}.json reports differ"));
    }
    let second = criteria(seed);
    for (k, ((name, a), (_, b))) in first.iter().zip(&second).enumerate() {
        c.ensure(a.digest == b.digest, || format!("criterion {} ({name}) changed on re-run", k + 1));
    }
    c.note(format!("{} fixtures run twice byte-identically; criteria 1-9 re-run with seed {seed} reproduce their digests", FIXTURES.len()));
    Ok(())
}

fn main() {
    // `cargo test` passes harness flags such as --nocapture; a filter that
    // does not name this suite skips it
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let text = std::fs::read_to_string(fixture_path("acceptance")).expect("acceptance fixture");
    let seed = parse_session(&text).expect("acceptance fixture parses").seed;
    println!("acceptance suite, seed {seed} (from fixtures/acceptance.json)");
    let mut results = criteria(seed);
    let det = evaluate(|c| determinism(seed, &results, c), None);
    results.push(("determinism", det));
    let mut failed = 0;
    for (k, (name, o)) in results.iter().enumerate() {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} {:>2}  {name}: {}", k + 1, o.summary);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
