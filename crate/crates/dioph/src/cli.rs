//! Command-line interface: solve, corpus runner, certificate checking and
//! solution verification.
//!
//! JSON output is schema-stable with keys {status, certificate?, solutions?,
//! families?, trace?, stats} and deterministic: keys and solution lists are
//! sorted, and timing never appears outside `--trace`. Exit codes: 0 for
//! definitive verdicts, 2 for inconclusive, 1 for usage or parse errors.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::engine::{self, Config};
use crate::expr::{Domain, Int, Problem};
use crate::parse::parse_problem;
use crate::verdict::{
    Assignment, BackClass, Certificate, Family, SignMagnitudeArgument, Status, Verdict,
};

fn int_json(n: &Int) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn assignment_json(a: &Assignment) -> Value {
    let mut m = Map::new();
    for (v, x) in a {
        m.insert(v.clone(), int_json(x));
    }
    Value::Object(m)
}

fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::Modular {
            modulus,
            states_checked,
            domain_note,
        } => json!({
            "kind": "modular",
            "modulus": modulus,
            "states_checked": states_checked.to_string(),
            "domain_note": domain_note,
        }),
        Certificate::Content { divisor, constant } => json!({
            "kind": "content",
            "divisor": int_json(divisor),
            "constant": int_json(constant),
        }),
        Certificate::GcdLinear { gcd, rhs } => json!({
            "kind": "gcd_linear",
            "gcd": int_json(gcd),
            "rhs": int_json(rhs),
        }),
        Certificate::Flt { exponent, rewrite } => json!({
            "kind": "flt",
            "exponent": exponent,
            "rewrite": rewrite,
        }),
        Certificate::PellEmptyClass { d, c, bound } => json!({
            "kind": "pell_empty_class",
            "d": int_json(d),
            "c": int_json(c),
            "bound": int_json(bound),
        }),
        Certificate::PellOrbitResidue {
            d,
            c,
            x_modulus,
            x_residue,
            y_modulus,
            y_residue,
        } => json!({
            "kind": "pell_orbit_residue",
            "d": int_json(d),
            "c": int_json(c),
            "x_modulus": int_json(x_modulus),
            "x_residue": int_json(x_residue),
            "y_modulus": int_json(y_modulus),
            "y_residue": int_json(y_residue),
        }),
        Certificate::SignMagnitude(arg) => {
            let data = match arg {
                SignMagnitudeArgument::DefiniteValue { min, max } => json!({
                    "form": "definite_value",
                    "min": min.as_ref().map(int_json),
                    "max": max.as_ref().map(int_json),
                }),
                SignMagnitudeArgument::ReciprocalMagnitude {
                    lo,
                    hi,
                    target_min,
                    target_max,
                } => json!({
                    "form": "reciprocal_magnitude",
                    "lo": int_json(lo),
                    "hi": int_json(hi),
                    "target_min": int_json(target_min),
                    "target_max": int_json(target_max),
                }),
                SignMagnitudeArgument::FiniteCandidatesRejected {
                    candidates,
                    source_equation,
                } => json!({
                    "form": "finite_candidates_rejected",
                    "candidates": candidates.iter().map(assignment_json).collect::<Vec<_>>(),
                    "source_equation": source_equation,
                }),
                SignMagnitudeArgument::DisjointIntervals {
                    variable,
                    eq_a,
                    eq_b,
                    ..
                } => json!({
                    "form": "disjoint_intervals",
                    "variable": variable,
                    "eq_a": eq_a,
                    "eq_b": eq_b,
                }),
                SignMagnitudeArgument::NonzeroConstant { value } => json!({
                    "form": "nonzero_constant",
                    "value": int_json(value),
                }),
                SignMagnitudeArgument::CenteredInfeasible { n, scale } => json!({
                    "form": "centered_infeasible",
                    "n": int_json(n),
                    "scale": int_json(scale),
                }),
            };
            json!({"kind": "sign_magnitude", "argument": data})
        }
    }
}

fn family_json(f: &Family) -> Value {
    match f {
        Family::Lattice(l) => json!({
            "kind": "lattice",
            "vars": l.vars,
            "particular": l.particular.iter().map(int_json).collect::<Vec<_>>(),
            "basis": l
                .basis
                .iter()
                .map(|g| g.iter().map(int_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        Family::Pell(p) => json!({
            "kind": "pell_orbit",
            "d": int_json(&p.d),
            "c": int_json(&p.c),
            "unit": [int_json(&p.unit.0), int_json(&p.unit.1)],
            "bases": p
                .bases
                .iter()
                .map(|(x, y)| vec![int_json(x), int_json(y)])
                .collect::<Vec<_>>(),
            "back": p.back.as_ref().map(|b| {
                json!({
                    "x_var": [Value::from(b.x_var.0.clone()), int_json(&b.x_var.1), int_json(&b.x_var.2)],
                    "y_var": b.y_var.as_ref().map(|(v, a, c)| {
                        vec![Value::from(v.clone()), int_json(a), int_json(c)]
                    }),
                    "class": match b.class {
                        BackClass::All => "all",
                        BackClass::Some => "some",
                        BackClass::None => "none",
                    },
                })
            }),
        }),
        Family::Indexed(fam) => json!({
            "kind": "indexed",
            "parameters": fam
                .params
                .iter()
                .map(|p| json!({"name": p.name, "domain": if p.nonneg { "N0" } else { "Z" }}))
                .collect::<Vec<_>>(),
            "expressions": fam
                .render()
                .into_iter()
                .map(|(v, e)| (v, Value::from(e)))
                .collect::<Map<String, Value>>(),
            "note": fam.integrality_note,
        }),
    }
}

/// Verdict as schema-stable JSON. Trace entries appear only when requested.
pub fn verdict_json(v: &Verdict, with_trace: bool) -> Value {
    let mut m = Map::new();
    m.insert("status".into(), json!(v.status_name()));
    match &v.status {
        Status::NoSolution(cert) => {
            m.insert("certificate".into(), certificate_json(cert));
        }
        Status::Finite { solutions, tag } => {
            m.insert(
                "solutions".into(),
                Value::Array(solutions.iter().map(assignment_json).collect()),
            );
            m.insert("completeness".into(), json!(tag.as_str()));
        }
        Status::Family(fams) => {
            m.insert(
                "families".into(),
                Value::Array(fams.iter().map(family_json).collect()),
            );
        }
        Status::Inconclusive { found } => {
            m.insert(
                "found".into(),
                Value::Array(found.iter().map(assignment_json).collect()),
            );
        }
    }
    if with_trace {
        m.insert(
            "trace".into(),
            Value::Array(
                v.trace
                    .iter()
                    .map(|t| {
                        json!({"stage": t.stage, "outcome": t.outcome, "millis": t.millis as u64})
                    })
                    .collect(),
            ),
        );
    }
    m.insert(
        "stats".into(),
        json!({
            "evaluations": v.stats.evaluations.to_string(),
            "moduli_scanned": v.stats.moduli_scanned,
        }),
    );
    Value::Object(m)
}

/// Human-readable verdict report.
pub fn verdict_text(v: &Verdict, with_trace: bool) -> String {
    let mut out = String::new();
    match &v.status {
        Status::NoSolution(cert) => {
            out.push_str("no solution\n");
            out.push_str(&format!("certificate: {}\n", certificate_json(cert)));
        }
        Status::Finite { solutions, tag } => {
            out.push_str(&format!(
                "finite: {} solution(s), completeness {}\n",
                solutions.len(),
                tag.as_str()
            ));
            for a in solutions {
                out.push_str(&format!("  {}\n", crate::verdict::render_assignment(a)));
            }
        }
        Status::Family(fams) => {
            out.push_str(&format!("family: {} family(ies)\n", fams.len()));
            for f in fams {
                out.push_str(&format!("  {}\n", family_json(f)));
            }
        }
        Status::Inconclusive { found } => {
            out.push_str("inconclusive\n");
            if !found.is_empty() {
                out.push_str(&format!("found by probing ({}):\n", found.len()));
                for a in found.iter().take(24) {
                    out.push_str(&format!("  {}\n", crate::verdict::render_assignment(a)));
                }
            }
        }
    }
    if with_trace {
        out.push_str("trace:\n");
        for t in &v.trace {
            out.push_str(&format!("  [{:>5}ms] {}: {}\n", t.millis, t.stage, t.outcome));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// solve command
// ---------------------------------------------------------------------------

pub struct SolveOptions {
    pub json: bool,
    pub trace: bool,
    pub config: Config,
    pub box_override: Option<(i64, i64)>,
}

/// Solve a problem string and print the verdict. Exit code 0 for definitive
/// verdicts, 2 for inconclusive, 1 for parse errors.
pub fn cmd_solve(text: &str, opts: &SolveOptions, out: &mut impl std::io::Write) -> i32 {
    let mut problem = match parse_problem(text) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "parse error: {e}");
            return 1;
        }
    };
    if let Some((lo, hi)) = opts.box_override {
        apply_box(&mut problem, lo, hi);
    }
    let verdict = engine::solve_problem(&problem, &opts.config);
    if opts.json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&verdict_json(&verdict, opts.trace)).unwrap()
        );
    } else {
        let _ = write!(out, "{}", verdict_text(&verdict, opts.trace));
    }
    if verdict.is_definitive() {
        0
    } else {
        2
    }
}

fn apply_box(problem: &mut Problem, lo: i64, hi: i64) {
    for v in problem.variables() {
        let cur = problem.domain(&v);
        let (mut l, mut h) = (Int::from(lo), Int::from(hi));
        if let Some(dl) = cur.lo() {
            l = l.max(dl);
        }
        if let Some(dh) = cur.hi() {
            h = h.min(dh);
        }
        problem.domains.insert(v, Domain::Range(l, h));
    }
}

// ---------------------------------------------------------------------------
// corpus command
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Deserialize)]
pub struct CorpusCase {
    pub name: String,
    pub problem: String,
    /// no_solution | finite | family | finite_or_inconclusive
    pub expect: String,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub solutions: Option<Vec<BTreeMap<String, i64>>>,
    #[serde(default)]
    pub families: Option<usize>,
    #[serde(default)]
    pub certificate: Option<String>,
    #[serde(default)]
    pub r#box: Option<Vec<i64>>,
    #[serde(default)]
    pub max_modulus: Option<u64>,
    #[serde(default)]
    pub enum_budget: Option<u128>,
    #[serde(default)]
    pub probe_budget: Option<u128>,
    #[serde(default)]
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, serde::Deserialize)]
struct CorpusFile {
    #[serde(default, rename = "case")]
    cases: Vec<CorpusCase>,
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub name: String,
    pub expect: String,
    pub status: String,
    pub pass: bool,
    pub detail: String,
}

fn expected_solutions(case: &CorpusCase) -> Option<Vec<Assignment>> {
    case.solutions.as_ref().map(|sols| {
        crate::verdict::sort_solutions(
            sols.iter()
                .map(|m| {
                    m.iter()
                        .map(|(k, v)| (k.clone(), Int::from(*v)))
                        .collect::<Assignment>()
                })
                .collect(),
        )
    })
}

/// Run one corpus case and compare against its expectation.
pub fn run_case(case: &CorpusCase, base: &Config) -> CaseResult {
    let mut config = base.clone();
    if let Some(m) = case.max_modulus {
        config.max_modulus = m;
    }
    if let Some(b) = case.enum_budget {
        config.enum_budget = b;
    }
    if let Some(b) = case.probe_budget {
        config.probe_budget = b;
    }
    if let Some(t) = case.timeout_ms {
        config.timeout_ms = t;
    }
    let mut problem = match parse_problem(&case.problem) {
        Ok(p) => p,
        Err(e) => {
            return CaseResult {
                name: case.name.clone(),
                expect: case.expect.clone(),
                status: "parse_error".into(),
                pass: false,
                detail: format!("{e}"),
            }
        }
    };
    if let Some(b) = &case.r#box {
        if b.len() == 2 {
            apply_box(&mut problem, b[0], b[1]);
        }
    }
    let verdict = engine::solve_problem(&problem, &config);
    let status = verdict.status_name().to_string();
    let (pass, detail) = check_expectation(case, &problem, &verdict, &config);
    CaseResult {
        name: case.name.clone(),
        expect: case.expect.clone(),
        status,
        pass,
        detail,
    }
}

fn check_expectation(
    case: &CorpusCase,
    problem: &Problem,
    verdict: &Verdict,
    config: &Config,
) -> (bool, String) {
    match case.expect.as_str() {
        "no_solution" => match &verdict.status {
            Status::NoSolution(cert) => {
                if let Some(kind) = &case.certificate {
                    let actual = certificate_json(cert)["kind"]
                        .as_str()
                        .unwrap_or("")
                        .to_string();
                    if &actual != kind {
                        return (false, format!("certificate kind {actual}, expected {kind}"));
                    }
                }
                let (ok, why) = engine::verify_certificate(problem, cert, config);
                if ok {
                    (true, why)
                } else {
                    (false, format!("certificate failed verification: {why}"))
                }
            }
            other => (false, format!("expected no_solution, got {:?}", status_of(other))),
        },
        "finite" => match &verdict.status {
            Status::Finite { solutions, .. } => {
                let (ok, reports) = engine::verify_solutions(problem, solutions, &[]);
                if !ok {
                    return (false, format!("solutions failed verification: {reports:?}"));
                }
                finite_matches(case, solutions)
            }
            other => (false, format!("expected finite, got {:?}", status_of(other))),
        },
        "family" => match &verdict.status {
            Status::Family(fams) => {
                if let Some(n) = case.families {
                    if fams.len() != n {
                        return (false, format!("{} families, expected {n}", fams.len()));
                    }
                }
                let (ok, reports) = engine::verify_solutions(problem, &[], fams);
                if ok {
                    (true, format!("{} families verified", fams.len()))
                } else {
                    (false, format!("family members failed: {reports:?}"))
                }
            }
            other => (false, format!("expected family, got {:?}", status_of(other))),
        },
        "finite_or_inconclusive" => match &verdict.status {
            Status::Finite { solutions, .. } => {
                let (ok, reports) = engine::verify_solutions(problem, solutions, &[]);
                if !ok {
                    return (false, format!("solutions failed verification: {reports:?}"));
                }
                finite_matches(case, solutions)
            }
            Status::Inconclusive { found } => {
                // the found-solution subset must match the expected list
                match expected_solutions(case) {
                    Some(expect) => {
                        let got = crate::verdict::sort_solutions(found.clone());
                        if got == expect {
                            (true, format!("inconclusive with the {} known solutions", got.len()))
                        } else {
                            (
                                false,
                                format!("found set mismatch: got {}, expected {}", got.len(), expect.len()),
                            )
                        }
                    }
                    None => match case.count {
                        Some(n) if found.len() == n => (true, "inconclusive with expected count".into()),
                        Some(n) => (false, format!("found {} probes, expected {n}", found.len())),
                        None => (true, "inconclusive accepted".into()),
                    },
                }
            }
            other => (
                false,
                format!("expected finite or inconclusive, got {:?}", status_of(other)),
            ),
        },
        other => (false, format!("unknown expectation {other}")),
    }
}

fn finite_matches(case: &CorpusCase, solutions: &[Assignment]) -> (bool, String) {
    if let Some(expect) = expected_solutions(case) {
        let got = crate::verdict::sort_solutions(solutions.to_vec());
        if got != expect {
            return (
                false,
                format!("solution set mismatch: got {got:?}, expected {expect:?}"),
            );
        }
    }
    if let Some(n) = case.count {
        if solutions.len() != n {
            return (false, format!("{} solutions, expected {n}", solutions.len()));
        }
    }
    (true, format!("{} solutions verified", solutions.len()))
}

fn status_of(s: &Status) -> &'static str {
    match s {
        Status::NoSolution(_) => "no_solution",
        Status::Finite { .. } => "finite",
        Status::Family(_) => "family",
        Status::Inconclusive { .. } => "inconclusive",
    }
}

/// Run every case of a corpus file; cases never abort the run. Exit 0 iff
/// all pass (an empty corpus warns).
pub fn cmd_corpus(
    path: &str,
    jobs: usize,
    json: bool,
    config: &Config,
    out: &mut impl std::io::Write,
) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(out, "cannot read {path}: {e}");
            return 1;
        }
    };
    let file: CorpusFile = match toml::from_str(&text) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(out, "corpus parse error: {e}");
            return 1;
        }
    };
    if file.cases.is_empty() {
        let _ = writeln!(out, "warning: corpus has zero cases");
        return 0;
    }
    let n = file.cases.len();
    let results: Vec<CaseResult> = if jobs <= 1 {
        file.cases.iter().map(|c| run_case(c, config)).collect()
    } else {
        let slots: Mutex<Vec<Option<CaseResult>>> = Mutex::new(vec![None; n]);
        let next: Mutex<usize> = Mutex::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(n) {
                scope.spawn(|| loop {
                    let i = {
                        let mut g = next.lock().unwrap();
                        let i = *g;
                        *g += 1;
                        i
                    };
                    if i >= n {
                        break;
                    }
                    let r = run_case(&file.cases[i], config);
                    slots.lock().unwrap()[i] = Some(r);
                });
            }
        });
        slots.into_inner().unwrap().into_iter().flatten().collect()
    };
    let passed = results.iter().filter(|r| r.pass).count();
    if json {
        let report = json!({
            "cases": results
                .iter()
                .map(|r| json!({
                    "name": r.name,
                    "expect": r.expect,
                    "status": r.status,
                    "pass": r.pass,
                    "detail": r.detail,
                }))
                .collect::<Vec<_>>(),
            "total": n,
            "passed": passed,
        });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        let width = results.iter().map(|r| r.name.len()).max().unwrap_or(4);
        for r in &results {
            let _ = writeln!(
                out,
                "{:<w$}  {:<7}  {:<13} -> {:<13}  {}",
                r.name,
                if r.pass { "pass" } else { "FAIL" },
                r.expect,
                r.status,
                r.detail,
                w = width
            );
        }
        let _ = writeln!(out, "{passed}/{n} cases passed");
    }
    if passed == n {
        0
    } else {
        1
    }
}

// ---------------------------------------------------------------------------
// check / verify commands
// ---------------------------------------------------------------------------

fn int_from_json(v: &Value) -> Option<Int> {
    if let Some(n) = v.as_i64() {
        return Some(Int::from(n));
    }
    v.as_str().and_then(|s| s.parse().ok())
}

/// Parse a certificate from its JSON form (the same schema `solve --json`
/// emits).
pub fn certificate_from_json(v: &Value) -> Option<Certificate> {
    let kind = v.get("kind")?.as_str()?;
    match kind {
        "modular" => Some(Certificate::Modular {
            modulus: v.get("modulus")?.as_u64()?,
            states_checked: v
                .get("states_checked")
                .and_then(|x| x.as_str())
                .and_then(|s| s.parse().ok())
                .unwrap_or(0),
            domain_note: v
                .get("domain_note")
                .and_then(|x| x.as_str())
                .unwrap_or("")
                .to_string(),
        }),
        "content" => Some(Certificate::Content {
            divisor: int_from_json(v.get("divisor")?)?,
            constant: int_from_json(v.get("constant")?)?,
        }),
        "gcd_linear" => Some(Certificate::GcdLinear {
            gcd: int_from_json(v.get("gcd")?)?,
            rhs: int_from_json(v.get("rhs")?)?,
        }),
        "flt" => Some(Certificate::Flt {
            exponent: v.get("exponent")?.as_u64()? as u32,
            rewrite: v.get("rewrite")?.as_str()?.to_string(),
        }),
        "pell_empty_class" => Some(Certificate::PellEmptyClass {
            d: int_from_json(v.get("d")?)?,
            c: int_from_json(v.get("c")?)?,
            bound: int_from_json(v.get("bound")?)?,
        }),
        "pell_orbit_residue" => Some(Certificate::PellOrbitResidue {
            d: int_from_json(v.get("d")?)?,
            c: int_from_json(v.get("c")?)?,
            x_modulus: int_from_json(v.get("x_modulus")?)?,
            x_residue: int_from_json(v.get("x_residue")?)?,
            y_modulus: int_from_json(v.get("y_modulus")?)?,
            y_residue: int_from_json(v.get("y_residue")?)?,
        }),
        "sign_magnitude" => {
            let arg = v.get("argument")?;
            let form = arg.get("form")?.as_str()?;
            let sm = match form {
                "definite_value" => SignMagnitudeArgument::DefiniteValue {
                    min: arg.get("min").and_then(int_from_json),
                    max: arg.get("max").and_then(int_from_json),
                },
                "reciprocal_magnitude" => SignMagnitudeArgument::ReciprocalMagnitude {
                    lo: int_from_json(arg.get("lo")?)?,
                    hi: int_from_json(arg.get("hi")?)?,
                    target_min: int_from_json(arg.get("target_min")?)?,
                    target_max: int_from_json(arg.get("target_max")?)?,
                },
                "nonzero_constant" => SignMagnitudeArgument::NonzeroConstant {
                    value: int_from_json(arg.get("value")?)?,
                },
                "centered_infeasible" => SignMagnitudeArgument::CenteredInfeasible {
                    n: int_from_json(arg.get("n")?)?,
                    scale: int_from_json(arg.get("scale")?)?,
                },
                "finite_candidates_rejected" => SignMagnitudeArgument::FiniteCandidatesRejected {
                    candidates: arg
                        .get("candidates")?
                        .as_array()?
                        .iter()
                        .map(|a| {
                            a.as_object().map(|m| {
                                m.iter()
                                    .filter_map(|(k, x)| Some((k.clone(), int_from_json(x)?)))
                                    .collect::<Assignment>()
                            })
                        })
                        .collect::<Option<Vec<_>>>()?,
                    source_equation: arg.get("source_equation")?.as_u64()? as usize,
                },
                "disjoint_intervals" => SignMagnitudeArgument::DisjointIntervals {
                    variable: arg.get("variable")?.as_str()?.to_string(),
                    eq_a: arg.get("eq_a")?.as_u64()? as usize,
                    lo_a: None,
                    hi_a: None,
                    eq_b: arg.get("eq_b")?.as_u64()? as usize,
                    lo_b: None,
                    hi_b: None,
                },
                _ => return None,
            };
            Some(Certificate::SignMagnitude(sm))
        }
        _ => None,
    }
}

/// Check a certificate file against a problem. Exit 0 iff it verifies.
pub fn cmd_check(
    problem_text: &str,
    cert_path: &str,
    config: &Config,
    out: &mut impl std::io::Write,
) -> i32 {
    let problem = match parse_problem(problem_text) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "parse error: {e}");
            return 1;
        }
    };
    let text = match std::fs::read_to_string(cert_path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(out, "cannot read {cert_path}: {e}");
            return 1;
        }
    };
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(out, "malformed certificate: {e}");
            return 1;
        }
    };
    // accept either a bare certificate or a full verdict JSON
    let cert_value = value.get("certificate").unwrap_or(&value);
    let Some(cert) = certificate_from_json(cert_value) else {
        let _ = writeln!(out, "malformed certificate: unknown kind");
        return 1;
    };
    let (ok, why) = engine::verify_certificate(&problem, &cert, config);
    let _ = writeln!(out, "{}: {why}", if ok { "valid" } else { "INVALID" });
    if ok {
        0
    } else {
        1
    }
}

/// Verify a solutions file against a problem. Exit 0 iff all satisfy.
pub fn cmd_verify(
    problem_text: &str,
    solutions_path: &str,
    out: &mut impl std::io::Write,
) -> i32 {
    let problem = match parse_problem(problem_text) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "parse error: {e}");
            return 1;
        }
    };
    let text = match std::fs::read_to_string(solutions_path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(out, "cannot read {solutions_path}: {e}");
            return 1;
        }
    };
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(out, "malformed solutions file: {e}");
            return 1;
        }
    };
    // accept {"solutions": [...]} (verdict schema) or a bare array
    let arr = value
        .get("solutions")
        .and_then(|s| s.as_array())
        .or_else(|| value.as_array());
    let Some(arr) = arr else {
        let _ = writeln!(out, "malformed solutions file: expected an array");
        return 1;
    };
    let mut sols: Vec<Assignment> = Vec::new();
    for item in arr {
        let Some(obj) = item.as_object() else {
            let _ = writeln!(out, "malformed solution entry: {item}");
            return 1;
        };
        let mut a = Assignment::new();
        for (k, x) in obj {
            let Some(n) = int_from_json(x) else {
                let _ = writeln!(out, "malformed value for {k}");
                return 1;
            };
            a.insert(k.clone(), n);
        }
        sols.push(a);
    }
    let (ok, reports) = engine::verify_solutions(&problem, &sols, &[]);
    if ok {
        let _ = writeln!(out, "valid: {} solution(s) satisfy the problem", sols.len());
        0
    } else {
        for r in &reports {
            let _ = writeln!(out, "{r}");
        }
        1
    }
}

/// Base config from the environment (DIOPH_BUDGET_SCALE multiplies budgets).
pub fn env_config() -> Config {
    let base = Config::default();
    match std::env::var("DIOPH_BUDGET_SCALE")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
    {
        Some(f) if f > 0.0 => base.scaled(f),
        _ => base,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_json(text: &str) -> (i32, Value) {
        let mut buf = Vec::new();
        let opts = SolveOptions {
            json: true,
            trace: false,
            config: Config::default(),
            box_override: None,
        };
        let code = cmd_solve(text, &opts, &mut buf);
        let v: Value = serde_json::from_slice(&buf).unwrap();
        (code, v)
    }

    #[test]
    fn solve_json_schema() {
        let (code, v) = solve_json("15*x^2 + 6*y^2 = 12 ; x,y in Z");
        assert_eq!(code, 0);
        assert_eq!(v["status"], "no_solution");
        assert_eq!(v["certificate"]["kind"], "modular");
        assert_eq!(v["certificate"]["modulus"], 5);

        let (code, v) = solve_json("x^4 + y^4 + z^4 = 3042 ; x,y,z in Z");
        assert_eq!(code, 0);
        assert_eq!(v["status"], "finite");
        assert_eq!(v["solutions"].as_array().unwrap().len(), 48);

        let (code, v) = solve_json("0 = 0");
        assert_eq!(code, 0);
        assert_eq!(v["status"], "family");
    }

    #[test]
    fn solve_exit_codes() {
        let mut buf = Vec::new();
        let opts = SolveOptions {
            json: false,
            trace: false,
            config: Config::default(),
            box_override: None,
        };
        assert_eq!(cmd_solve("15*x^2 + = 12", &opts, &mut buf), 1);
        // a genuinely open case: no small obstruction, no finite argument
        let code = cmd_solve("4*x^2 + 4*x - 15 - y^3 = 0 ; x,y in Z", &opts, &mut buf);
        assert_eq!(code, 2);
    }

    #[test]
    fn json_deterministic() {
        let a = solve_json("x^2 + y^2 = 25 ; x,y in Z").1;
        let b = solve_json("x^2 + y^2 = 25 ; x,y in Z").1;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn certificate_json_round_trip() {
        let (_, v) = solve_json("15*x^2 + 6*y^2 = 12 ; x,y in Z");
        let cert = certificate_from_json(&v["certificate"]).unwrap();
        let p = parse_problem("15*x^2 + 6*y^2 = 12 ; x,y in Z").unwrap();
        let (ok, _) = engine::verify_certificate(&p, &cert, &Config::default());
        assert!(ok);
    }
}
