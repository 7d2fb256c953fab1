//! Strategy orchestration, verdicts, certificates, system solving and
//! solution verification.
//!
//! The single-equation pipeline runs in a fixed order: sensibility checks
//! (content, sign/magnitude, modular obstruction scan), classification into
//! the specialized solvers (linear, Fermat, Pell, product forms, separation,
//! discriminant, isolated-linear), bounded exhaustive enumeration when every
//! variable has a proved finite interval, and a probe-informed fallback
//! (residue pinning with case splits, then a two-term exponential valuation
//! closure). The first definitive verdict wins; the trace records every
//! stage. Solution lists found by probing alone are never emitted as Finite.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebraic::{self, DiscriminantOutcome, SeparationOutcome};
use crate::expr::{Domain, Int, NormalizedEquation, Problem, Var};
use crate::linear::{self, LinearOutcome};
use crate::modular;
use crate::pell::{self, PellOutcome};
use crate::search::{self, BoundsOutcome};
use crate::verdict::{
    Assignment, BackClass, Certificate, CompletenessTag, Family, FamilyExpr, FamilyParam,
    IndexedFamily, PellBackTransform, SignMagnitudeArgument, Stats, Status, TraceEntry, Verdict,
};

/// Budgets and knobs. All configurable from the CLI; DIOPH_BUDGET_SCALE
/// multiplies every budget.
#[derive(Debug, Clone)]
pub struct Config {
    pub max_modulus: u64,
    pub state_budget: u128,
    pub probe_half_width: i64,
    pub probe_budget: u128,
    pub enum_budget: u128,
    pub timeout_ms: u64,
    pub pell_ceiling: Int,
    pub max_branches: usize,
    pub recursion_depth: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_modulus: 64,
            state_budget: 10_000_000,
            probe_half_width: 100,
            probe_budget: 1_000_000,
            enum_budget: 100_000_000,
            timeout_ms: 10_000,
            pell_ceiling: Int::from(1_000_000),
            max_branches: 64,
            recursion_depth: 4,
        }
    }
}

impl Config {
    pub fn scaled(mut self, f: f64) -> Self {
        let s = |x: u128| ((x as f64) * f) as u128;
        self.state_budget = s(self.state_budget).max(1);
        self.probe_budget = s(self.probe_budget).max(1);
        self.enum_budget = s(self.enum_budget).max(1);
        self.timeout_ms = ((self.timeout_ms as f64) * f) as u64;
        self
    }
}

struct Ctx<'a> {
    config: &'a Config,
    started: Instant,
    trace: Vec<TraceEntry>,
    stats: Stats,
}

impl<'a> Ctx<'a> {
    fn new(config: &'a Config) -> Self {
        Ctx {
            config,
            started: Instant::now(),
            trace: Vec::new(),
            stats: Stats::default(),
        }
    }

    fn note(&mut self, stage: &str, outcome: String) {
        self.trace.push(TraceEntry {
            stage: stage.to_string(),
            outcome,
            millis: self.started.elapsed().as_millis(),
        });
    }

    fn timed_out(&self) -> bool {
        self.started.elapsed().as_millis() > self.config.timeout_ms as u128
    }
}

/// Solve a problem: single equations go through the strategy pipeline,
/// systems through the system stages.
pub fn solve_problem(problem: &Problem, config: &Config) -> Verdict {
    let mut ctx = Ctx::new(config);
    let status = if problem.equations.len() <= 1 {
        solve_eq_pipeline(problem, &mut ctx, config.recursion_depth)
    } else {
        solve_system(problem, &mut ctx)
    };
    Verdict {
        status,
        trace: ctx.trace,
        stats: ctx.stats,
    }
}

/// Convenience wrapper for one-equation problems.
pub fn solve(problem: &Problem, config: &Config) -> Verdict {
    solve_problem(problem, config)
}

// ---------------------------------------------------------------------------
// Single-equation pipeline
// ---------------------------------------------------------------------------

fn solve_eq_pipeline(problem: &Problem, ctx: &mut Ctx, depth: u32) -> Status {
    let eq = match problem.equations.first() {
        Some(eq) => eq.clone(),
        None => {
            return Status::Family(vec![Family::Indexed(IndexedFamily {
                params: vec![],
                assignments: BTreeMap::new(),
                integrality_note: "empty system".into(),
            })])
        }
    };
    let nonv = problem.nonvanishing();

    // trivial constant equations
    if eq.terms.is_empty() {
        return if eq.constant.is_zero() {
            ctx.note("trivial", "identically zero".into());
            let params: Vec<FamilyParam> = problem
                .variables()
                .iter()
                .map(|v| FamilyParam {
                    name: v.clone(),
                    nonneg: problem.domain(v).nonnegative(),
                })
                .collect();
            let assignments = problem
                .variables()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), FamilyExpr::Param(i)))
                .collect();
            Status::Family(vec![Family::Indexed(IndexedFamily {
                params,
                assignments,
                integrality_note: "all assignments satisfy 0 = 0".into(),
            })])
        } else {
            ctx.note("trivial", "nonzero constant".into());
            Status::NoSolution(Certificate::SignMagnitude(
                SignMagnitudeArgument::NonzeroConstant {
                    value: eq.constant.clone(),
                },
            ))
        };
    }

    // stage 1: sensibility
    if let Some(cert) = content_check(&eq) {
        ctx.note("sensibility.content", format!("certificate {cert:?}"));
        return Status::NoSolution(cert);
    }
    ctx.note("sensibility.content", "no content obstruction".into());

    let bounds = match search::infer_bounds(&eq, &problem.domains) {
        BoundsOutcome::Infeasible(arg) => {
            ctx.note("sensibility.sign_magnitude", "infeasible".into());
            return Status::NoSolution(Certificate::SignMagnitude(arg));
        }
        BoundsOutcome::Bounds(b) => {
            ctx.note(
                "sensibility.sign_magnitude",
                format!("bounds complete={}", b.complete),
            );
            b
        }
    };

    let moduli = modular::default_moduli(ctx.config.max_modulus);
    let (obstruction, skipped) =
        modular::find_obstruction(&eq, &moduli, &problem.domains, ctx.config.state_budget);
    ctx.stats.moduli_scanned += moduli.len() as u64 - skipped.len() as u64;
    if let Some(c) = obstruction {
        ctx.note("sensibility.modular", format!("obstruction m={}", c.modulus));
        return Status::NoSolution(Certificate::Modular {
            modulus: c.modulus,
            states_checked: c.states_checked,
            domain_note: c.domain_note,
        });
    }
    ctx.note(
        "sensibility.modular",
        format!("no obstruction (skipped {skipped:?})"),
    );

    // stage 2: classification
    if let Some(status) = classify_linear(&eq, problem, ctx) {
        return status;
    }
    if let Some(status) = classify_flt(&eq, problem, ctx) {
        return status;
    }
    if let Some(status) = classify_pell(&eq, problem, ctx) {
        return status;
    }
    if let Some(status) = classify_product(&eq, problem, &nonv, ctx, depth) {
        return status;
    }
    if let Some(status) = classify_separation(&eq, problem, &nonv, ctx) {
        return status;
    }
    if let Some(status) = classify_discriminant(&eq, problem, &nonv, ctx) {
        return status;
    }
    if let Some(status) = classify_isolated_linear(&eq, problem, ctx) {
        return status;
    }

    // stage 3: bounds + symmetry + exhaustive enumeration
    let sym = search::detect_symmetry(&eq);
    if bounds.complete {
        if let Some(box_) = bounds.finite_box() {
            let states: u128 = box_
                .values()
                .map(|(lo, hi)| (hi - lo + Int::one()).to_u128().unwrap_or(u128::MAX))
                .product();
            if states <= ctx.config.enum_budget {
                let r = search::enumerate_box(problem, &box_, &sym, ctx.config.enum_budget);
                ctx.stats.evaluations += r.evaluations;
                if r.complete {
                    ctx.note("enumeration", format!("{} solutions", r.solutions.len()));
                    return Status::Finite {
                        solutions: r.solutions,
                        tag: CompletenessTag::BoundedExhaustive,
                    };
                }
                ctx.note("enumeration", "budget exceeded".into());
            } else {
                ctx.note("enumeration", format!("{states} states over budget"));
            }
        }
    } else {
        ctx.note("enumeration", "bounds not complete".into());
    }

    // symmetric product-dominant shape (ordering + magnitude argument)
    if let Some(status) = symmetric_product_solve(&eq, problem, &nonv, &sym, ctx) {
        return status;
    }

    // stage 3.5: domain splitting on proved-bounded variables
    if depth > 0 && !ctx.timed_out() {
        if let Some(status) = bounded_split(&eq, problem, &bounds, ctx, depth) {
            return status;
        }
    }

    // stage 4: probe-informed fallback
    let report = search::probe(problem, ctx.config.probe_half_width, ctx.config.probe_budget);
    ctx.stats.evaluations += report.evaluations;
    ctx.note(
        "probe",
        format!(
            "{} hits within radius {}",
            report.hits.len(),
            report.radius
        ),
    );

    if depth > 0 && !ctx.timed_out() {
        if let Some(status) = pin_branching(&eq, problem, ctx, depth) {
            return status;
        }
    }
    if let Some(status) = lte_two_term(&eq, problem, ctx) {
        return status;
    }

    ctx.note("fallback", "inconclusive".into());
    Status::Inconclusive { found: report.hits }
}

fn content_check(eq: &NormalizedEquation) -> Option<Certificate> {
    let d = eq.content();
    if d >= Int::from(2) && !(&eq.constant % &d).is_zero() {
        return Some(Certificate::Content {
            divisor: d,
            constant: eq.constant.clone(),
        });
    }
    None
}

fn is_linear(eq: &NormalizedEquation) -> bool {
    eq.terms.iter().all(|t| {
        t.exponentials.is_empty()
            && t.factorials.is_empty()
            && t.powers.len() == 1
            && *t.powers.values().next().unwrap() == 1
    })
}

fn classify_linear(eq: &NormalizedEquation, problem: &Problem, ctx: &mut Ctx) -> Option<Status> {
    if !is_linear(eq) {
        ctx.note("classify.linear", "not linear".into());
        return None;
    }
    let coeffs: Vec<(Var, Int)> = eq
        .terms
        .iter()
        .map(|t| (t.powers.keys().next().unwrap().clone(), t.coeff.clone()))
        .collect();
    match linear::solve_linear(&coeffs, &-eq.constant.clone()) {
        LinearOutcome::NoSolution { gcd, rhs } => {
            ctx.note("classify.linear", format!("gcd {gcd} does not divide {rhs}"));
            Some(Status::NoSolution(Certificate::GcdLinear { gcd, rhs }))
        }
        LinearOutcome::Family(f) => {
            ctx.note("classify.linear", format!("lattice of rank {}", f.basis.len()));
            // apply domain/nonvanishing restrictions by materializing when
            // the lattice is zero-dimensional
            if f.basis.is_empty() {
                let a: Assignment = f.vars.iter().cloned().zip(f.particular.clone()).collect();
                let ok = problem.satisfied_by(&a);
                return Some(Status::Finite {
                    solutions: if ok { vec![a] } else { vec![] },
                    tag: CompletenessTag::ClosedForm,
                });
            }
            Some(Status::Family(vec![Family::Lattice(f)]))
        }
    }
}

fn classify_flt(eq: &NormalizedEquation, problem: &Problem, ctx: &mut Ctx) -> Option<Status> {
    let r = algebraic::flt_check(eq, &problem.domains)?;
    ctx.note(
        "classify.flt",
        format!("exponent {} rewrite {}", r.exponent, r.rewrite),
    );
    if !r.complete {
        return None;
    }
    if r.finite.is_empty() && r.families.is_empty() {
        return Some(Status::NoSolution(Certificate::Flt {
            exponent: r.exponent,
            rewrite: r.rewrite,
        }));
    }
    let mut fams: Vec<Family> = r.families.into_iter().map(Family::Indexed).collect();
    for a in r.finite {
        if fams.is_empty() {
            // collect isolated points as zero-parameter families
        }
        fams.push(Family::Indexed(point_family(&a)));
    }
    Some(Status::Family(fams))
}

fn point_family(a: &Assignment) -> IndexedFamily {
    IndexedFamily {
        params: vec![],
        assignments: a
            .iter()
            .map(|(v, x)| (v.clone(), FamilyExpr::Const(x.clone())))
            .collect(),
        integrality_note: "isolated solution".into(),
    }
}

fn classify_pell(eq: &NormalizedEquation, _problem: &Problem, ctx: &mut Ctx) -> Option<Status> {
    let red = pell::reduce_to_pell(eq)?;
    ctx.note(
        "classify.pell",
        format!(
            "X^2 - {} Y^2 = {} with X = {}*{}+{}, Y = {}*{}+{}",
            red.d, red.n, red.ax, red.x_var, red.bx, red.ay, red.y_var, red.by
        ),
    );
    match pell::solve_pell(&red.d, &red.n, &ctx.config.pell_ceiling) {
        Err(e) => {
            ctx.note("classify.pell", format!("{e}"));
            None
        }
        Ok(PellOutcome::Empty { d, c, bound }) => {
            Some(Status::NoSolution(Certificate::PellEmptyClass { d, c, bound }))
        }
        Ok(PellOutcome::Family(mut fam)) => {
            let class = pell::back_transform(&fam, &red);
            ctx.note("classify.pell", format!("back-transform {class:?}"));
            match class {
                BackClass::None => Some(Status::NoSolution(Certificate::PellOrbitResidue {
                    d: red.d.clone(),
                    c: red.n.clone(),
                    x_modulus: red.ax.abs(),
                    x_residue: modulo(&red.bx, &red.ax.abs()),
                    y_modulus: red.ay.abs(),
                    y_residue: modulo(&red.by, &red.ay.abs()),
                })),
                BackClass::All | BackClass::Some => {
                    fam.back = Some(PellBackTransform {
                        x_var: (red.x_var.clone(), red.ax.clone(), red.bx.clone()),
                        y_var: Some((red.y_var.clone(), red.ay.clone(), red.by.clone())),
                        class,
                    });
                    Some(Status::Family(vec![Family::Pell(fam)]))
                }
            }
        }
    }
}

fn modulo(a: &Int, m: &Int) -> Int {
    if m.is_zero() || m.is_one() {
        return Int::zero();
    }
    let mut r = a.clone() % m;
    if r.is_negative() {
        r += m;
    }
    r
}

fn classify_product(
    eq: &NormalizedEquation,
    problem: &Problem,
    nonv: &BTreeSet<Var>,
    ctx: &mut Ctx,
    depth: u32,
) -> Option<Status> {
    // bilinear hyperbola and difference-of-squares patterns
    for (name, pf) in [
        ("bilinear", algebraic::bilinear_product(eq)),
        ("two-square", algebraic::two_square_product(eq)),
    ] {
        let Some(pf) = pf else { continue };
        if pf.target.is_zero() {
            continue;
        }
        if let Some(out) = algebraic::factor_pair_solve(&pf, &problem.domains, nonv) {
            ctx.note(
                "classify.product",
                format!("{name} form, target {}", pf.target),
            );
            if out.lattices.is_empty() {
                return Some(Status::Finite {
                    solutions: out.finite,
                    tag: CompletenessTag::FactorEnumeration,
                });
            }
            let mut fams: Vec<Family> =
                out.lattices.into_iter().map(Family::Lattice).collect();
            fams.extend(out.finite.iter().map(|a| Family::Indexed(point_family(a))));
            return Some(Status::Family(fams));
        }
    }
    // common monomial factor
    if let Some(split) = algebraic::common_factor_split(eq) {
        if split.constant.is_zero() {
            // mu * g = 0: one family per vanishing variable of mu, plus the
            // cofactor equation solved recursively
            ctx.note("classify.product", "zero-target common factor".into());
            let all_vars: BTreeSet<Var> = problem.variables();
            let mut fams: Vec<Family> = Vec::new();
            for v in split.mu.keys() {
                if nonv.contains(v) {
                    continue;
                }
                let mut fixed = Assignment::new();
                fixed.insert(v.clone(), Int::zero());
                fams.push(Family::Indexed(free_family(&all_vars, &fixed, problem)));
            }
            if depth > 0 && !split.cofactor.is_trivially_true() {
                let sub = Problem {
                    equations: vec![split.cofactor.clone()],
                    domains: problem.domains.clone(),
                    constraints: problem.constraints.clone(),
                };
                let sub_status = solve_eq_pipeline(&sub, ctx, depth - 1);
                match sub_status {
                    Status::NoSolution(_) => {}
                    Status::Finite { solutions, .. } => {
                        for a in solutions {
                            fams.push(Family::Indexed(free_family(&all_vars, &a, problem)));
                        }
                    }
                    Status::Family(sub_fams) => {
                        for f in sub_fams {
                            {
                                let f = lift_family(f, &Assignment::new(), &all_vars, problem)?;
                                fams.push(f)
                            }
                        }
                    }
                    Status::Inconclusive { .. } => return None,
                }
            } else if !split.cofactor.is_trivially_true() {
                return None;
            }
            return Some(Status::Family(fams));
        }
        if let Some(out) = algebraic::common_factor_solve(&split, &problem.domains, nonv) {
            ctx.note(
                "classify.product",
                format!("common factor over divisors of {}", split.constant),
            );
            return Some(Status::Finite {
                solutions: out.finite,
                tag: CompletenessTag::DivisorCandidates,
            });
        }
    }
    ctx.note("classify.product", "no product pattern".into());
    None
}

/// Family fixing some variables and leaving the rest free over their domains.
fn free_family(all_vars: &BTreeSet<Var>, fixed: &Assignment, problem: &Problem) -> IndexedFamily {
    let mut params = Vec::new();
    let mut assignments = BTreeMap::new();
    for v in all_vars {
        if let Some(x) = fixed.get(v) {
            assignments.insert(v.clone(), FamilyExpr::Const(x.clone()));
        } else {
            let idx = params.len();
            params.push(FamilyParam {
                name: v.clone(),
                nonneg: problem.domain(v).nonnegative(),
            });
            assignments.insert(v.clone(), FamilyExpr::Param(idx));
        }
    }
    IndexedFamily {
        params,
        assignments,
        integrality_note: "vanishing factor, remaining variables free".into(),
    }
}

/// Extend a family over a sub-problem with fixed values and free variables
/// of the enclosing problem.
fn lift_family(
    f: Family,
    fixed: &Assignment,
    all_vars: &BTreeSet<Var>,
    problem: &Problem,
) -> Option<Family> {
    match f {
        Family::Indexed(mut fam) => {
            for (v, x) in fixed {
                fam.assignments
                    .insert(v.clone(), FamilyExpr::Const(x.clone()));
            }
            let missing: Vec<Var> = all_vars
                .iter()
                .filter(|v| !fam.assignments.contains_key(*v))
                .cloned()
                .collect();
            for v in missing {
                let idx = fam.params.len();
                fam.params.push(FamilyParam {
                    name: v.clone(),
                    nonneg: problem.domain(&v).nonnegative(),
                });
                fam.assignments.insert(v, FamilyExpr::Param(idx));
            }
            Some(Family::Indexed(fam))
        }
        Family::Lattice(lat) => {
            // convert to an indexed family, then lift
            let mut assignments = BTreeMap::new();
            for (i, v) in lat.vars.iter().enumerate() {
                let mut terms = vec![FamilyExpr::Const(lat.particular[i].clone())];
                for (j, g) in lat.basis.iter().enumerate() {
                    terms.push(FamilyExpr::Mul(vec![
                        FamilyExpr::Const(g[i].clone()),
                        FamilyExpr::Param(j),
                    ]));
                }
                assignments.insert(v.clone(), FamilyExpr::Add(terms));
            }
            let params = (0..lat.basis.len())
                .map(|j| FamilyParam {
                    name: format!("t{j}"),
                    nonneg: false,
                })
                .collect();
            lift_family(
                Family::Indexed(IndexedFamily {
                    params,
                    assignments,
                    integrality_note: "integer lattice".into(),
                }),
                fixed,
                all_vars,
                problem,
            )
        }
        Family::Pell(_) => None,
    }
}

fn classify_separation(
    eq: &NormalizedEquation,
    problem: &Problem,
    nonv: &BTreeSet<Var>,
    ctx: &mut Ctx,
) -> Option<Status> {
    match algebraic::separation_solve(eq, &problem.domains, nonv) {
        Some(SeparationOutcome::Finite(solutions)) => {
            ctx.note("classify.separation", format!("{} solutions", solutions.len()));
            Some(Status::Finite {
                solutions,
                tag: CompletenessTag::DivisorCandidates,
            })
        }
        Some(SeparationOutcome::NotFinite) => {
            ctx.note("classify.separation", "not finite".into());
            None
        }
        None => {
            ctx.note("classify.separation", "not applicable".into());
            None
        }
    }
}

fn classify_discriminant(
    eq: &NormalizedEquation,
    problem: &Problem,
    nonv: &BTreeSet<Var>,
    ctx: &mut Ctx,
) -> Option<Status> {
    match algebraic::discriminant_solve(eq, &problem.domains, nonv) {
        Some(DiscriminantOutcome::Finite(solutions)) => {
            ctx.note(
                "classify.discriminant",
                format!("{} solutions", solutions.len()),
            );
            Some(Status::Finite {
                solutions,
                tag: CompletenessTag::DiscriminantRange,
            })
        }
        Some(DiscriminantOutcome::LinearSquare(f)) => {
            ctx.note("classify.discriminant", "perfect square of linear form".into());
            Some(Status::Family(vec![Family::Lattice(f)]))
        }
        Some(DiscriminantOutcome::PellRoute { d, n }) => {
            ctx.note(
                "classify.discriminant",
                format!("pell route k^2 - {d} y^2 = {n}"),
            );
            // produced only when reduce_to_pell was inapplicable; covered by
            // the pell classifier for no-mixed-term shapes
            None
        }
        None => {
            ctx.note("classify.discriminant", "not applicable".into());
            None
        }
    }
}

fn classify_isolated_linear(
    eq: &NormalizedEquation,
    problem: &Problem,
    ctx: &mut Ctx,
) -> Option<Status> {
    let fams = algebraic::isolated_linear_solve(eq, &problem.domains)?;
    ctx.note("classify.isolated_linear", format!("{} families", fams.len()));
    if fams.is_empty() {
        // the divisibility is never satisfiable: the pivot coefficient is a
        // modular obstruction of the original equation
        let pivot_m = eq
            .terms
            .iter()
            .filter(|t| {
                t.exponentials.is_empty()
                    && t.factorials.is_empty()
                    && t.powers.len() == 1
                    && *t.powers.values().next().unwrap() == 1
            })
            .map(|t| t.coeff.abs())
            .min()?;
        let m = pivot_m.to_u64()?;
        let table =
            modular::satisfying_states(eq, m, &problem.domains, ctx.config.state_budget, 1).ok()?;
        if table.satisfying.is_empty() {
            return Some(Status::NoSolution(Certificate::Modular {
                modulus: m,
                states_checked: table.states_checked,
                domain_note: String::new(),
            }));
        }
        return None;
    }
    Some(Status::Family(
        fams.into_iter().map(Family::Indexed).collect(),
    ))
}

/// Fully symmetric equations with a single top monomial over all variables
/// and lower terms of degree <= 1: the product of all-but-the-largest
/// variable is bounded, enumeration over it plus a linear solve for the
/// largest is complete (given all variables nonzero).
fn symmetric_product_solve(
    eq: &NormalizedEquation,
    problem: &Problem,
    nonv: &BTreeSet<Var>,
    sym: &search::SymmetryInfo,
    ctx: &mut Ctx,
) -> Option<Status> {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    let n = vars.len();
    if n < 3 {
        return None;
    }
    if sym.symmetric_groups.len() != 1 || sym.symmetric_groups[0].len() != n {
        return None;
    }
    // one term of degree n covering all vars with exponent 1; rest degree <= 1
    let mut top: Option<&crate::expr::Monomial> = None;
    let mut linear_sum = Int::zero();
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() {
            return None;
        }
        if t.degree() == n as u32 && t.powers.len() == n {
            if top.is_some() {
                return None;
            }
            top = Some(t);
        } else if t.degree() <= 1 {
            linear_sum += t.coeff.abs();
        } else {
            return None;
        }
    }
    let top = top?;
    // all variables nonzero, via constraint or N domain
    let all_nonzero = vars
        .iter()
        .all(|v| nonv.contains(v) || matches!(problem.domain(v), Domain::N));
    if !all_nonzero {
        return None;
    }
    let c = top.coeff.abs();
    let k = (linear_sum + eq.constant.abs() + &c - Int::one()) / &c;
    let kb = k.to_i64()?;
    if kb > 1000 {
        return None;
    }
    ctx.note(
        "symmetric_product",
        format!("product of smallest {} variables bounded by {kb}", n - 1),
    );
    // enumerate the n-1 smallest (by |.|) in nondecreasing order, solve the
    // last linearly, then expand orbits
    let mut canon: Vec<Assignment> = Vec::new();
    let mut tuple: Vec<Int> = Vec::new();
    enumerate_small(
        problem,
        eq,
        &vars,
        kb,
        &mut tuple,
        &mut canon,
        &mut ctx.stats.evaluations,
    );
    // orbit expansion over the full symmetric group
    let r = search::enumerate_expand(problem, &vars, &canon);
    Some(Status::Finite {
        solutions: r,
        tag: CompletenessTag::DivisorCandidates,
    })
}

fn enumerate_small(
    problem: &Problem,
    eq: &NormalizedEquation,
    vars: &[Var],
    bound: i64,
    tuple: &mut Vec<Int>,
    out: &mut Vec<Assignment>,
    evals: &mut u128,
) {
    let n = vars.len();
    if tuple.len() == n - 1 {
        // product bound: |prod| <= bound
        let prod: Int = tuple.iter().map(|x| x.abs()).product();
        if prod > Int::from(bound) {
            return;
        }
        // substitute the n-1 smallest into the equation and solve for last
        let mut sub = eq.clone();
        for (v, x) in vars.iter().zip(tuple.iter()) {
            sub = match sub.substitute(v, x) {
                Ok(s) => s,
                Err(_) => return,
            };
        }
        *evals += 1;
        let coeffs: Vec<(Var, Int)> = sub
            .terms
            .iter()
            .filter_map(|t| {
                if t.powers.len() == 1 && *t.powers.values().next().unwrap() == 1 {
                    Some((t.powers.keys().next().unwrap().clone(), t.coeff.clone()))
                } else {
                    None
                }
            })
            .collect();
        if coeffs.len() != 1 || sub.terms.len() != coeffs.len() {
            return;
        }
        let (last, a) = &coeffs[0];
        if a.is_zero() {
            return;
        }
        let (x, r) = (-sub.constant.clone()).div_rem(a);
        if !r.is_zero() || x.is_zero() {
            return;
        }
        // canonicality: the last variable carries the max abs value
        if tuple.iter().any(|t| t.abs() > x.abs()) {
            return;
        }
        let mut asg: Assignment = vars
            .iter()
            .cloned()
            .zip(tuple.iter().cloned())
            .collect();
        asg.insert(last.clone(), x);
        if problem.satisfied_by(&asg) {
            out.push(asg);
        }
        return;
    }
    let lo_abs: Int = tuple.last().map(|x| x.abs()).unwrap_or_else(Int::one);
    let mut a = lo_abs.to_i64().unwrap_or(1);
    while a <= bound {
        for s in [a, -a] {
            let x = Int::from(s);
            // nondecreasing by absolute value
            if let Some(prev) = tuple.last() {
                if x.abs() < prev.abs() {
                    continue;
                }
            }
            if !problem.domain(&vars[tuple.len()]).contains(&x) {
                continue;
            }
            tuple.push(x);
            enumerate_small(problem, eq, vars, bound, tuple, out, evals);
            tuple.pop();
        }
        a += 1;
    }
}

/// Split on the product of the proved-finite variables and recurse.
fn bounded_split(
    eq: &NormalizedEquation,
    problem: &Problem,
    bounds: &search::BoundSet,
    ctx: &mut Ctx,
    depth: u32,
) -> Option<Status> {
    let mut bounded: Vec<(Var, Int, Int)> = Vec::new();
    let mut unbounded = 0usize;
    for (v, b) in &bounds.vars {
        match (&b.interval.lo, &b.interval.hi) {
            (Some(lo), Some(hi)) if !b.provenance.is_empty() => {
                bounded.push((v.clone(), lo.clone(), hi.clone()))
            }
            _ => unbounded += 1,
        }
    }
    if bounded.is_empty() || unbounded == 0 {
        return None;
    }
    let combos: u128 = bounded
        .iter()
        .map(|(_, lo, hi)| (hi - lo + Int::one()).to_u128().unwrap_or(u128::MAX))
        .product();
    if combos > ctx.config.max_branches as u128 {
        return None;
    }
    ctx.note(
        "domain_split",
        format!(
            "substituting {} over {combos} combinations",
            bounded
                .iter()
                .map(|(v, ..)| v.clone())
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    // enumerate combinations
    let mut fixes: Vec<Assignment> = vec![Assignment::new()];
    for (v, lo, hi) in &bounded {
        let mut next = Vec::new();
        let mut x = lo.clone();
        while &x <= hi {
            if problem.domain(v).contains(&x) {
                for f in &fixes {
                    let mut g = f.clone();
                    g.insert(v.clone(), x.clone());
                    next.push(g);
                }
            }
            x += 1;
        }
        fixes = next;
    }
    combine_branches(eq, problem, fixes, ctx, depth, "domain_split")
}

/// Residue pinning: find a modulus where every satisfying state fixes at
/// least one variable to an exact preperiodic value, split on the exact
/// assignments, and recurse.
fn pin_branching(
    eq: &NormalizedEquation,
    problem: &Problem,
    ctx: &mut Ctx,
    depth: u32,
) -> Option<Status> {
    for m in modular::default_moduli(ctx.config.max_modulus) {
        let table = match modular::satisfying_states(
            eq,
            m,
            &problem.domains,
            ctx.config.state_budget,
            4096,
        ) {
            Ok(t) => t,
            Err(_) => continue,
        };
        if table.truncated || table.satisfying.is_empty() {
            continue;
        }
        // every state must pin at least one variable
        let mut exact_maps: BTreeSet<Vec<(Var, Int)>> = BTreeSet::new();
        let mut all_pinned = true;
        for s in &table.satisfying {
            let pins: Vec<(Var, Int)> = s
                .iter()
                .enumerate()
                .filter(|(i, r)| table.profiles[*i].is_exact(**r))
                .map(|(i, r)| (table.vars[i].clone(), Int::from(*r)))
                .collect();
            if pins.is_empty() {
                all_pinned = false;
                break;
            }
            exact_maps.insert(pins);
        }
        if !all_pinned || exact_maps.is_empty() || exact_maps.len() > ctx.config.max_branches {
            continue;
        }
        ctx.note(
            "pin_branch",
            format!("m={m}: {} exact branches", exact_maps.len()),
        );
        let fixes: Vec<Assignment> = exact_maps
            .into_iter()
            .map(|pins| pins.into_iter().collect())
            .collect();
        if let Some(status) = combine_branches(eq, problem, fixes, ctx, depth, "pin_branch") {
            return Some(status);
        }
    }
    None
}

/// Substitute each fix, solve recursively, and merge the branch verdicts.
fn combine_branches(
    eq: &NormalizedEquation,
    problem: &Problem,
    fixes: Vec<Assignment>,
    ctx: &mut Ctx,
    depth: u32,
    stage: &str,
) -> Option<Status> {
    let all_vars = problem.variables();
    let mut finite: Vec<Assignment> = Vec::new();
    let mut fams: Vec<Family> = Vec::new();
    let mut tags: BTreeSet<&'static str> = BTreeSet::new();
    for fix in fixes {
        // domain / nonvanishing check on the fixed values
        if !fix.iter().all(|(v, x)| {
            problem.domain(v).contains(x)
                && (!problem.nonvanishing().contains(v) || !x.is_zero())
        }) {
            continue;
        }
        let mut sub_eq = eq.clone();
        for (v, x) in &fix {
            sub_eq = sub_eq.substitute(v, x).ok()?;
        }
        let sub = Problem {
            equations: vec![sub_eq],
            domains: problem
                .domains
                .iter()
                .filter(|(v, _)| !fix.contains_key(*v))
                .map(|(v, d)| (v.clone(), d.clone()))
                .collect(),
            constraints: problem.constraints.clone(),
        };
        let status = solve_eq_pipeline(&sub, ctx, depth - 1);
        match status {
            Status::NoSolution(_) => {}
            Status::Finite { solutions, tag } => {
                tags.insert(tag.as_str());
                for mut a in solutions {
                    a.extend(fix.clone());
                    if problem.satisfied_by(&a) {
                        finite.push(a);
                    }
                }
            }
            Status::Family(sub_fams) => {
                for f in sub_fams {
                    fams.push(lift_family(f, &fix, &all_vars, problem)?);
                }
            }
            Status::Inconclusive { .. } => {
                ctx.note(stage, "branch inconclusive".into());
                return None;
            }
        }
    }
    if fams.is_empty() {
        ctx.note(stage, format!("{} solutions from branches", finite.len()));
        Some(Status::Finite {
            solutions: crate::verdict::sort_solutions(finite),
            tag: CompletenessTag::ModularPlusInspection,
        })
    } else {
        for a in finite {
            fams.push(Family::Indexed(point_family(&a)));
        }
        ctx.note(stage, format!("{} families from branches", fams.len()));
        Some(Status::Family(fams))
    }
}

// ---------------------------------------------------------------------------
// Two-term exponential closure
// ---------------------------------------------------------------------------

/// Complete solver for c1 b1^x + c2 b2^z + c0 = 0 over x, z in N0.
///
/// The p-adic valuation of c2 b2^z + c0 is forced to equal that of c1 b1^x;
/// when the congruence class of z pins the valuation to s + v_p(t) (the
/// lifting-the-exponent identity for odd p dividing b1 with b2^r == -c0/c2
/// exactly), solutions with large x need z >= r p^(e x - const), while the
/// magnitude relation keeps z linear in x. The crossing point bounds x, and
/// everything below it is enumerated exactly.
fn lte_two_term(eq: &NormalizedEquation, problem: &Problem, ctx: &mut Ctx) -> Option<Status> {
    if eq.terms.len() != 2 || eq.constant.is_zero() {
        return None;
    }
    for t in &eq.terms {
        if !t.powers.is_empty() || !t.factorials.is_empty() || t.exponentials.len() != 1 {
            return None;
        }
    }
    let c0 = eq.constant.clone();
    let take = |i: usize| -> (Int, Int, Var) {
        let t = &eq.terms[i];
        let (v, b) = t.exponentials.iter().next().unwrap();
        (t.coeff.clone(), b.clone(), v.clone())
    };
    let (ca, ba, va) = take(0);
    let (cb, bb, vb) = take(1);
    if va == vb {
        return None;
    }
    for v in [&va, &vb] {
        if !problem.domain(v).nonnegative() {
            return None;
        }
    }
    // orientations: (pinning prime from b1's side)
    for ((c1, b1, x), (c2, b2, z)) in [
        ((&ca, &ba, &va), (&cb, &bb, &vb)),
        ((&cb, &bb, &vb), (&ca, &ba, &va)),
    ] {
        if b1 < &Int::from(2) || b2 < &Int::from(2) {
            continue;
        }
        let fs = algebraic::factorize(b1)?;
        for (p, e1) in &fs {
            let p = *p;
            if p == 2 {
                continue; // lifting identity below needs odd p
            }
            let pi = Int::from(p);
            if (b2 % &pi).is_zero() || (c2 % &pi).is_zero() || (&c0 % &pi).is_zero() {
                continue;
            }
            let up = val_p(c1, &pi);
            // congruence c2 b2^z == -c0 (mod p)
            let r = mult_order(b2, &pi)?;
            let mut z0: Option<u64> = None;
            let mut pow = Int::one();
            for j in 0..r {
                if modulo(&(c2 * &pow + &c0), &pi).is_zero() {
                    z0 = Some(j);
                    break;
                }
                pow = modulo(&(pow * b2), &pi);
            }
            let Some(z0) = z0 else {
                // v_p(c2 b2^z + c0) = 0 for every z: x is pinned by
                // up + e1 x = 0
                let xs: Vec<Int> = if up == 0 {
                    vec![Int::zero()]
                } else {
                    vec![]
                };
                let sols = enumerate_two_term(&xs, c1, b1, x, c2, b2, z, &c0, problem);
                ctx.note("lte_two_term", format!("p={p} kills all classes"));
                return Some(Status::Finite {
                    solutions: sols,
                    tag: CompletenessTag::ModularPlusInspection,
                });
            };
            // exact cancellation W = c2 b2^z0 == -c0
            let w = c2 * b2.pow(z0 as u32);
            if w != -c0.clone() {
                continue;
            }
            let d = b2.pow(r as u32);
            let s = val_p(&(d - Int::one()), &pi);
            let w0 = val_p(&w, &pi);
            // E(x) = e1 x + up - w0 - s; solutions with E(x) >= 1 force
            // z >= z0 + r p^E(x)
            let e1 = *e1 as i64;
            let exp_of = |xv: i64| e1 * xv + up as i64 - w0 as i64 - s as i64;
            // find X* with E >= 1 and r p^E(X*) > M(X*) + margin
            let margin = Int::from(64); // covers per-step growth of M
            let mut xstar: Option<i64> = None;
            for xv in 0..400i64 {
                let e = exp_of(xv);
                if e < 1 {
                    continue;
                }
                let lhs = Int::from(r) * pi.pow(e as u32);
                let m = max_z(c1, b1, xv, c2, b2, &c0);
                if lhs > &m + &margin {
                    xstar = Some(xv);
                    break;
                }
            }
            let xstar = xstar?;
            let xs: Vec<Int> = (0..xstar).map(Int::from).collect();
            let sols = enumerate_two_term(&xs, c1, b1, x, c2, b2, z, &c0, problem);
            ctx.note(
                "lte_two_term",
                format!("p={p}: no solutions with {x} >= {xstar}"),
            );
            return Some(Status::Finite {
                solutions: sols,
                tag: CompletenessTag::ModularPlusInspection,
            });
        }
    }
    None
}

fn val_p(n: &Int, p: &Int) -> u32 {
    let mut v = 0u32;
    let mut m = n.clone();
    while !m.is_zero() && (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

fn mult_order(b: &Int, p: &Int) -> Option<u64> {
    let m = modulo(b, p);
    if m.is_zero() {
        return None;
    }
    let mut x = m.clone();
    let mut k = 1u64;
    while !x.is_one() {
        x = modulo(&(x * &m), p);
        k += 1;
        if k > 1 << 20 {
            return None;
        }
    }
    Some(k)
}

/// Largest z with |c2| b2^z <= |c1| b1^x + |c0|.
fn max_z(c1: &Int, b1: &Int, x: i64, c2: &Int, b2: &Int, c0: &Int) -> Int {
    let cap = c1.abs() * b1.pow(x.max(0) as u32) + c0.abs();
    let mut z = 0i64;
    let mut p = c2.abs();
    while &p * b2 <= cap {
        p *= b2;
        z += 1;
    }
    Int::from(z)
}

/// For each candidate x, solve c2 b2^z = -(c0 + c1 b1^x) exactly.
#[allow(clippy::too_many_arguments)]
fn enumerate_two_term(
    xs: &[Int],
    c1: &Int,
    b1: &Int,
    xv: &Var,
    c2: &Int,
    b2: &Int,
    zv: &Var,
    c0: &Int,
    problem: &Problem,
) -> Vec<Assignment> {
    let mut out = Vec::new();
    for x in xs {
        let Some(xe) = x.to_u32() else { continue };
        let rhs = -(c0 + c1 * b1.pow(xe));
        let (q, r) = rhs.div_rem(c2);
        if !r.is_zero() || !q.is_positive() {
            continue;
        }
        // q = b2^z exactly?
        let mut z = 0u32;
        let mut p = Int::one();
        while p < q {
            p *= b2;
            z += 1;
        }
        if p == q {
            let mut a = Assignment::new();
            a.insert(xv.clone(), x.clone());
            a.insert(zv.clone(), Int::from(z));
            if problem.satisfied_by(&a) {
                out.push(a);
            }
        }
    }
    crate::verdict::sort_solutions(out)
}

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

fn solve_system(problem: &Problem, ctx: &mut Ctx) -> Status {
    // stage 1: per-equation sensibility
    for (i, eq) in problem.equations.iter().enumerate() {
        if eq.terms.is_empty() && !eq.constant.is_zero() {
            ctx.note("system.sensibility", format!("equation {i} constant nonzero"));
            return Status::NoSolution(Certificate::SignMagnitude(
                SignMagnitudeArgument::NonzeroConstant {
                    value: eq.constant.clone(),
                },
            ));
        }
        if let Some(cert) = content_check(eq) {
            ctx.note("system.sensibility", format!("equation {i} content"));
            return Status::NoSolution(cert);
        }
        if let BoundsOutcome::Infeasible(arg) = search::infer_bounds(eq, &problem.domains) {
            ctx.note("system.sensibility", format!("equation {i} sign/magnitude"));
            return Status::NoSolution(Certificate::SignMagnitude(arg));
        }
        let (obstruction, _) = modular::find_obstruction(
            eq,
            &modular::default_moduli(ctx.config.max_modulus),
            &problem.domains,
            ctx.config.state_budget,
        );
        if let Some(c) = obstruction {
            ctx.note(
                "system.sensibility",
                format!("equation {i} modular obstruction m={}", c.modulus),
            );
            return Status::NoSolution(Certificate::Modular {
                modulus: c.modulus,
                states_checked: c.states_checked,
                domain_note: c.domain_note,
            });
        }
    }
    ctx.note("system.sensibility", "all equations pass".into());

    // stage 2: cross-equation interval consistency
    let mut per_eq_bounds: Vec<Option<search::BoundSet>> = Vec::new();
    for eq in &problem.equations {
        match search::infer_bounds(eq, &problem.domains) {
            BoundsOutcome::Bounds(b) => per_eq_bounds.push(Some(b)),
            BoundsOutcome::Infeasible(_) => per_eq_bounds.push(None),
        }
    }
    for v in problem.variables() {
        let mut lo: Option<(Int, usize)> = None;
        let mut hi: Option<(Int, usize)> = None;
        for (i, b) in per_eq_bounds.iter().enumerate() {
            let Some(b) = b else { continue };
            let Some(vb) = b.vars.get(&v) else { continue };
            if let Some(l) = &vb.interval.lo {
                if lo.as_ref().map(|(cur, _)| l > cur).unwrap_or(true) {
                    lo = Some((l.clone(), i));
                }
            }
            if let Some(h) = &vb.interval.hi {
                if hi.as_ref().map(|(cur, _)| h < cur).unwrap_or(true) {
                    hi = Some((h.clone(), i));
                }
            }
        }
        if let (Some((l, i)), Some((h, j))) = (&lo, &hi) {
            if l > h {
                ctx.note(
                    "system.cross_sign",
                    format!("variable {v} forced into disjoint intervals"),
                );
                return Status::NoSolution(Certificate::SignMagnitude(
                    SignMagnitudeArgument::DisjointIntervals {
                        variable: v.clone(),
                        eq_a: *i,
                        lo_a: Some(l.clone()),
                        hi_a: None,
                        eq_b: *j,
                        lo_b: None,
                        hi_b: Some(h.clone()),
                    },
                ));
            }
        }
    }
    ctx.note("system.cross_sign", "intervals consistent".into());

    // all-linear systems: integer row reduction decides them outright
    if problem.equations.iter().all(is_linear) {
        let vars: Vec<Var> = problem.variables().into_iter().collect();
        let a: Vec<Vec<Int>> = problem
            .equations
            .iter()
            .map(|eq| {
                vars.iter()
                    .map(|v| {
                        eq.terms
                            .iter()
                            .filter(|t| t.powers.contains_key(v))
                            .map(|t| t.coeff.clone())
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let b: Vec<Int> = problem.equations.iter().map(|eq| -eq.constant.clone()).collect();
        match linear::solve_system(&a, &b) {
            linear::SystemOutcome::Inconsistent { residue, .. } => {
                ctx.note("system.linear", "inconsistent after row reduction".into());
                return Status::NoSolution(Certificate::GcdLinear {
                    gcd: Int::zero(),
                    rhs: residue,
                });
            }
            linear::SystemOutcome::Family { particular, basis } => {
                ctx.note(
                    "system.linear",
                    format!("solution lattice of rank {}", basis.len()),
                );
                if basis.is_empty() {
                    let asg: Assignment = vars.iter().cloned().zip(particular).collect();
                    let kept = if problem.satisfied_by(&asg) {
                        vec![asg]
                    } else {
                        vec![]
                    };
                    return Status::Finite {
                        solutions: kept,
                        tag: CompletenessTag::ClosedForm,
                    };
                }
                return Status::Family(vec![Family::Lattice(
                    linear::normalize_family(linear::AffineLatticeFamily {
                        vars,
                        particular,
                        basis,
                    }),
                )]);
            }
        }
    }

    // stage 3: solve an equation completely, filter through the others
    for (i, eq) in problem.equations.iter().enumerate() {
        if ctx.timed_out() {
            break;
        }
        let sub = Problem {
            equations: vec![eq.clone()],
            domains: problem.domains.clone(),
            constraints: problem.constraints.clone(),
        };
        let v = solve_eq_pipeline(&sub, ctx, ctx.config.recursion_depth);
        match v {
            Status::NoSolution(cert) => {
                ctx.note("system.known_equation", format!("equation {i} unsolvable"));
                return Status::NoSolution(cert);
            }
            Status::Finite { solutions, tag } => {
                ctx.note(
                    "system.known_equation",
                    format!("equation {i} has {} solutions; filtering", solutions.len()),
                );
                let kept: Vec<Assignment> = solutions
                    .iter()
                    .filter(|a| {
                        // solutions may omit variables absent from eq i; only
                        // full assignments can be filtered directly
                        problem.variables().iter().all(|v| a.contains_key(v))
                            && problem.satisfied_by(a)
                    })
                    .cloned()
                    .collect();
                if solutions
                    .iter()
                    .any(|a| !problem.variables().iter().all(|v| a.contains_key(v)))
                {
                    continue; // partial assignments: try another route
                }
                if kept.is_empty() {
                    return Status::NoSolution(Certificate::SignMagnitude(
                        SignMagnitudeArgument::FiniteCandidatesRejected {
                            candidates: solutions,
                            source_equation: i,
                        },
                    ));
                }
                return Status::Finite {
                    solutions: kept,
                    tag,
                };
            }
            _ => {}
        }
    }

    // stage 4: linear substitution for 2-variable systems
    if problem.variables().len() == 2 {
        if let Some(status) = linear_substitution(problem, ctx) {
            return status;
        }
    }

    // stage 5: joint bounded enumeration
    let mut joint: BTreeMap<Var, (Int, Int)> = BTreeMap::new();
    let mut all_finite = true;
    for v in problem.variables() {
        let mut lo: Option<Int> = None;
        let mut hi: Option<Int> = None;
        for b in per_eq_bounds.iter().flatten() {
            if let Some(vb) = b.vars.get(&v) {
                if let Some(l) = &vb.interval.lo {
                    lo = Some(lo.map(|c: Int| c.max(l.clone())).unwrap_or(l.clone()));
                }
                if let Some(h) = &vb.interval.hi {
                    hi = Some(hi.map(|c: Int| c.min(h.clone())).unwrap_or(h.clone()));
                }
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) => {
                joint.insert(v.clone(), (l, h));
            }
            _ => {
                all_finite = false;
                break;
            }
        }
    }
    if all_finite && !joint.is_empty() {
        let states: u128 = joint
            .values()
            .map(|(lo, hi)| (hi - lo + Int::one()).to_u128().unwrap_or(u128::MAX))
            .product();
        if states <= ctx.config.enum_budget {
            let r = search::enumerate_box(
                problem,
                &joint,
                &search::SymmetryInfo::default(),
                ctx.config.enum_budget,
            );
            ctx.stats.evaluations += r.evaluations;
            if r.complete {
                ctx.note("system.enumeration", format!("{} solutions", r.solutions.len()));
                return Status::Finite {
                    solutions: r.solutions,
                    tag: CompletenessTag::BoundedExhaustive,
                };
            }
        }
    }

    let report = search::probe(problem, ctx.config.probe_half_width, ctx.config.probe_budget);
    ctx.stats.evaluations += report.evaluations;
    ctx.note(
        "system.probe",
        format!("{} hits within radius {}", report.hits.len(), report.radius),
    );
    Status::Inconclusive { found: report.hits }
}

/// Substitute the lattice parameterization of a linear equation into the
/// others; for one-parameter families the results are univariate polynomial
/// root extractions.
fn linear_substitution(problem: &Problem, ctx: &mut Ctx) -> Option<Status> {
    let (li, coeffs) = problem.equations.iter().enumerate().find_map(|(i, eq)| {
        if is_linear(eq) {
            let cs: Vec<(Var, Int)> = eq
                .terms
                .iter()
                .map(|t| (t.powers.keys().next().unwrap().clone(), t.coeff.clone()))
                .collect();
            Some((i, cs))
        } else {
            None
        }
    })?;
    let eqn = &problem.equations[li];
    let fam = match linear::solve_linear(&coeffs, &-eqn.constant.clone()) {
        LinearOutcome::Family(f) => f,
        LinearOutcome::NoSolution { gcd, rhs } => {
            return Some(Status::NoSolution(Certificate::GcdLinear { gcd, rhs }))
        }
    };
    if fam.basis.len() != 1 {
        return None;
    }
    ctx.note(
        "system.substitution",
        format!("parameterizing equation {li} and substituting"),
    );
    // variables of the problem not covered by the lattice stay unsupported
    if problem
        .variables()
        .iter()
        .any(|v| !fam.vars.contains(v))
    {
        return None;
    }
    // substitute var_i = p_i + g_i t symbolically into each other equation,
    // collecting integer roots of the resulting univariate polynomials in t
    let mut roots: Option<BTreeSet<Int>> = None;
    for (i, eq) in problem.equations.iter().enumerate() {
        if i == li {
            continue;
        }
        let poly = substitute_lattice(eq, &fam)?;
        let r: BTreeSet<Int> = algebraic::integer_roots(&poly).into_iter().collect();
        roots = Some(match roots {
            None => r,
            Some(prev) => prev.intersection(&r).cloned().collect(),
        });
        if roots.as_ref().map(|x| x.is_empty()).unwrap_or(false) {
            break;
        }
    }
    let roots = roots?;
    let mut out = Vec::new();
    for t in roots {
        let m = fam.member(&[t]);
        let a: Assignment = fam.vars.iter().cloned().zip(m).collect();
        if problem.satisfied_by(&a) {
            out.push(a);
        }
    }
    ctx.note(
        "system.substitution",
        format!("{} solutions after root extraction", out.len()),
    );
    Some(Status::Finite {
        solutions: crate::verdict::sort_solutions(out),
        tag: CompletenessTag::DivisorCandidates,
    })
}

/// Coefficients (low to high) of eq after substituting the one-parameter
/// lattice; None when the equation is not polynomial.
fn substitute_lattice(
    eq: &NormalizedEquation,
    fam: &linear::AffineLatticeFamily,
) -> Option<Vec<Int>> {
    let g = &fam.basis[0];
    let mut acc: Vec<Int> = vec![eq.constant.clone()];
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() {
            return None;
        }
        let mut termpoly: Vec<Int> = vec![t.coeff.clone()];
        for (v, e) in &t.powers {
            let idx = fam.vars.iter().position(|w| w == v)?;
            let lin = vec![fam.particular[idx].clone(), g[idx].clone()];
            for _ in 0..*e {
                termpoly = poly_mul(&termpoly, &lin);
            }
        }
        acc = poly_add(&acc, &termpoly);
    }
    Some(acc)
}

fn poly_mul(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Independently re-derive the contradiction recorded in a certificate.
pub fn verify_certificate(problem: &Problem, cert: &Certificate, config: &Config) -> (bool, String) {
    match cert {
        Certificate::Modular { modulus, .. } => {
            if *modulus < 2 {
                return (false, "modulus below 2".into());
            }
            for eq in &problem.equations {
                match modular::satisfying_states(eq, *modulus, &problem.domains, 1 << 26, 1) {
                    Ok(t) if t.satisfying.is_empty() => {
                        return (true, format!("no residue state satisfies mod {modulus}"))
                    }
                    _ => {}
                }
            }
            (false, format!("some equation is satisfiable mod {modulus}"))
        }
        Certificate::Content { divisor, .. } => {
            if divisor < &Int::from(2) {
                return (false, "divisor below 2".into());
            }
            for eq in &problem.equations {
                let ok = !eq.terms.is_empty()
                    && eq.terms.iter().all(|t| (&t.coeff % divisor).is_zero())
                    && !(&eq.constant % divisor).is_zero();
                if ok {
                    return (
                        true,
                        format!("content {divisor} does not divide the constant"),
                    );
                }
            }
            (false, "no equation has the claimed content".into())
        }
        Certificate::GcdLinear { gcd, rhs } => {
            for eq in &problem.equations {
                if !is_linear(eq) {
                    continue;
                }
                let mut g = Int::zero();
                for t in &eq.terms {
                    g = g.gcd(&t.coeff);
                }
                if &g == gcd && -eq.constant.clone() == *rhs && !(rhs % &g).is_zero() {
                    return (true, format!("gcd {g} does not divide {rhs}"));
                }
            }
            // gcd 0 records an inconsistent all-linear system: a row
            // combination reduces to 0 = rhs with rhs != 0
            if gcd.is_zero() && problem.equations.iter().all(is_linear) {
                let vars: Vec<Var> = problem.variables().into_iter().collect();
                let a: Vec<Vec<Int>> = problem
                    .equations
                    .iter()
                    .map(|eq| {
                        vars.iter()
                            .map(|v| {
                                eq.terms
                                    .iter()
                                    .filter(|t| t.powers.contains_key(v))
                                    .map(|t| t.coeff.clone())
                                    .sum()
                            })
                            .collect()
                    })
                    .collect();
                let b: Vec<Int> = problem
                    .equations
                    .iter()
                    .map(|eq| -eq.constant.clone())
                    .collect();
                if matches!(
                    linear::solve_system(&a, &b),
                    linear::SystemOutcome::Inconsistent { .. }
                ) {
                    return (true, "linear system inconsistent by row reduction".into());
                }
            }
            (false, "no linear equation matches the gcd claim".into())
        }
        Certificate::SignMagnitude(arg) => verify_sign_magnitude(problem, arg, config),
        Certificate::Flt { exponent, .. } => {
            for eq in &problem.equations {
                if let Some(r) = algebraic::flt_check(eq, &problem.domains) {
                    if r.exponent == *exponent
                        && r.complete
                        && r.finite.is_empty()
                        && r.families.is_empty()
                    {
                        return (true, format!("power {exponent} with empty zero cases"));
                    }
                }
            }
            (false, "equation does not match the Fermat form".into())
        }
        Certificate::PellEmptyClass { d, c, .. } => {
            for eq in &problem.equations {
                if let Some(red) = pell::reduce_to_pell(eq) {
                    if &red.d == d && &red.n == c {
                        if let Ok(PellOutcome::Empty { .. }) =
                            pell::solve_pell(d, c, &config.pell_ceiling)
                        {
                            return (true, format!("no class representative for x^2-{d}y^2={c}"));
                        }
                    }
                }
            }
            (false, "class search found representatives".into())
        }
        Certificate::PellOrbitResidue { d, c, .. } => {
            for eq in &problem.equations {
                if let Some(red) = pell::reduce_to_pell(eq) {
                    if &red.d == d && &red.n == c {
                        if let Ok(PellOutcome::Family(fam)) =
                            pell::solve_pell(d, c, &config.pell_ceiling)
                        {
                            if pell::back_transform(&fam, &red) == BackClass::None {
                                return (
                                    true,
                                    "no orbit member back-maps to integers".to_string(),
                                );
                            }
                        }
                    }
                }
            }
            (false, "some orbit member back-maps".into())
        }
    }
}

fn verify_sign_magnitude(
    problem: &Problem,
    arg: &SignMagnitudeArgument,
    config: &Config,
) -> (bool, String) {
    match arg {
        SignMagnitudeArgument::NonzeroConstant { .. } => {
            for eq in &problem.equations {
                if eq.terms.is_empty() && !eq.constant.is_zero() {
                    return (true, format!("equation reads {} = 0", eq.constant));
                }
            }
            (false, "no constant contradiction".into())
        }
        SignMagnitudeArgument::DefiniteValue { .. }
        | SignMagnitudeArgument::ReciprocalMagnitude { .. }
        | SignMagnitudeArgument::CenteredInfeasible { .. } => {
            for eq in &problem.equations {
                if let BoundsOutcome::Infeasible(_) = search::infer_bounds(eq, &problem.domains) {
                    return (true, "sign/magnitude infeasibility re-derived".into());
                }
            }
            (false, "no equation is sign/magnitude infeasible".into())
        }
        SignMagnitudeArgument::DisjointIntervals {
            variable,
            eq_a,
            eq_b,
            ..
        } => {
            let get = |i: usize| -> Option<search::BoundSet> {
                let eq = problem.equations.get(i)?;
                match search::infer_bounds(eq, &problem.domains) {
                    BoundsOutcome::Bounds(b) => Some(b),
                    _ => None,
                }
            };
            if let (Some(a), Some(b)) = (get(*eq_a), get(*eq_b)) {
                if let (Some(va), Some(vb)) = (a.vars.get(variable), b.vars.get(variable)) {
                    let merged = va.interval.intersect(&vb.interval);
                    if merged.is_empty() {
                        return (true, format!("{variable} has disjoint forced intervals"));
                    }
                }
            }
            (false, "intervals are not disjoint".into())
        }
        SignMagnitudeArgument::FiniteCandidatesRejected {
            candidates,
            source_equation,
        } => {
            let Some(src) = problem.equations.get(*source_equation) else {
                return (false, "source equation out of range".into());
            };
            // re-solve the source equation and compare candidate sets
            let sub = Problem {
                equations: vec![src.clone()],
                domains: problem.domains.clone(),
                constraints: problem.constraints.clone(),
            };
            let v = solve_problem(&sub, config);
            let Status::Finite { solutions, .. } = v.status else {
                return (false, "source equation did not re-solve finitely".into());
            };
            let a: BTreeSet<Vec<(Var, Int)>> = solutions
                .iter()
                .map(|x| x.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
                .collect();
            let b: BTreeSet<Vec<(Var, Int)>> = candidates
                .iter()
                .map(|x| x.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
                .collect();
            if a != b {
                return (false, "candidate set mismatch".into());
            }
            for cand in candidates {
                if problem.satisfied_by(cand) {
                    return (false, format!("candidate {cand:?} satisfies the system"));
                }
            }
            (true, "every candidate is rejected by another equation".into())
        }
    }
}

/// Substitute each claimed solution (and sampled family members) into every
/// equation and constraint; failures are itemized.
pub fn verify_solutions(
    problem: &Problem,
    solutions: &[Assignment],
    families: &[Family],
) -> (bool, Vec<String>) {
    let mut reports = Vec::new();
    let mut ok = true;
    for a in solutions {
        let mut full = a.clone();
        // missing variables default to zero for the report
        for v in problem.variables() {
            full.entry(v).or_insert_with(Int::zero);
        }
        for (i, eq) in problem.equations.iter().enumerate() {
            match eq.eval(&full) {
                Ok(v) if v.is_zero() => {}
                Ok(v) => {
                    ok = false;
                    reports.push(format!(
                        "{} fails equation {i}: evaluates to {v}",
                        crate::verdict::render_assignment(a)
                    ));
                }
                Err(e) => {
                    ok = false;
                    reports.push(format!(
                        "{} fails equation {i}: {e}",
                        crate::verdict::render_assignment(a)
                    ));
                }
            }
        }
        if !problem.satisfied_by(&full) {
            // domain/constraint violations that are not evaluation failures
            let constraint_ok = problem
                .equations
                .iter()
                .all(|eq| matches!(eq.eval(&full), Ok(v) if v.is_zero()));
            if constraint_ok {
                ok = false;
                reports.push(format!(
                    "{} violates a domain or constraint",
                    crate::verdict::render_assignment(a)
                ));
            }
        }
    }
    for f in families {
        for member in sample_family(f, 20) {
            if !problem.satisfied_by(&member) {
                ok = false;
                reports.push(format!(
                    "family member {} does not satisfy the problem",
                    crate::verdict::render_assignment(&member)
                ));
            }
        }
    }
    (ok, reports)
}

/// Sample members of a family for verification: parameter grid 0..=n for
/// nonnegative parameters, a symmetric range otherwise.
pub fn sample_family(f: &Family, n: usize) -> Vec<Assignment> {
    match f {
        Family::Indexed(fam) => {
            let k = fam.params.len();
            if k == 0 {
                return fam.member(&[]).into_iter().collect();
            }
            let mut out = Vec::new();
            let per = match k {
                1 => n as i64,
                2 => 6,
                _ => 3,
            };
            let mut idx = vec![0i64; k];
            loop {
                let params: Vec<Int> = idx
                    .iter()
                    .zip(&fam.params)
                    .map(|(i, p)| {
                        if p.nonneg {
                            Int::from(*i)
                        } else {
                            // alternate signs: 0, 1, -1, 2, -2, ...
                            let v = (*i + 1) / 2;
                            Int::from(if i % 2 == 0 { v } else { -v })
                        }
                    })
                    .collect();
                if let Some(m) = fam.member(&params) {
                    out.push(m);
                }
                let mut d = 0;
                loop {
                    idx[d] += 1;
                    if idx[d] <= per {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                    if d == k {
                        return out;
                    }
                }
            }
        }
        Family::Lattice(lat) => {
            let k = lat.basis.len();
            let mut out = Vec::new();
            if k == 0 {
                out.push(lat.vars.iter().cloned().zip(lat.particular.clone()).collect());
                return out;
            }
            let per = if k == 1 { n as i64 } else { 4 };
            let mut idx = vec![-per; k];
            loop {
                let ts: Vec<Int> = idx.iter().map(|i| Int::from(*i)).collect();
                let m = lat.member(&ts);
                out.push(lat.vars.iter().cloned().zip(m).collect());
                let mut d = 0;
                loop {
                    idx[d] += 1;
                    if idx[d] <= per {
                        break;
                    }
                    idx[d] = -per;
                    d += 1;
                    if d == k {
                        return out;
                    }
                }
            }
        }
        Family::Pell(fam) => {
            let mut out = Vec::new();
            if let Some(back) = &fam.back {
                if let Some(red) = back_to_reduction(fam, back) {
                    for a in pell::back_members(fam, &red, n) {
                        out.push(a);
                    }
                }
            } else {
                // raw (x, y) members on synthetic names`
                for (x, y) in pell::orbit_members(fam, n) {
                    let mut a = Assignment::new();
                    a.insert("x".into(), x);
                    a.insert("y".into(), y);
                    out.push(a);
                }
            }
            out
        }
    }
}

fn back_to_reduction(
    fam: &crate::verdict::PellFamily,
    back: &PellBackTransform,
) -> Option<pell::PellReduction> {
    let (xv, ax, bx) = back.x_var.clone();
    let (yv, ay, by) = back.y_var.clone()?;
    Some(pell::PellReduction {
        d: fam.d.clone(),
        n: fam.c.clone(),
        x_var: xv,
        y_var: yv,
        ax,
        bx,
        ay,
        by,
        scale: Int::one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    fn run(text: &str) -> Verdict {
        let p = parse_problem(text).unwrap();
        solve_problem(&p, &Config::default())
    }

    fn finite_set(v: &Verdict) -> Vec<Assignment> {
        match &v.status {
            Status::Finite { solutions, .. } => solutions.clone(),
            other => panic!("expected finite, got {other:?}"),
        }
    }

    #[test]
    fn sensibility_certificates() {
        let v = run("15*x^2 + 6*y^2 = 12 ; x,y in Z");
        match &v.status {
            Status::NoSolution(Certificate::Modular { modulus, .. }) => assert_eq!(*modulus, 5),
            other => panic!("{other:?}"),
        }

        let v = run("5*x^2 + 125*y^3 = 4973 ; x,y in Z");
        match &v.status {
            Status::NoSolution(Certificate::Content { divisor, .. }) => {
                assert_eq!(divisor, &int(5))
            }
            other => panic!("{other:?}"),
        }

        let v = run("x^2 + y^2 + 1 = 0 ; x,y in Z");
        assert!(matches!(
            v.status,
            Status::NoSolution(Certificate::SignMagnitude(_))
        ));

        let v = run("1/x + 1/y + 1/z = 5 ; x,y,z in Z, x*y*z != 0");
        assert!(matches!(
            v.status,
            Status::NoSolution(Certificate::SignMagnitude(
                SignMagnitudeArgument::ReciprocalMagnitude { .. }
            ))
        ));
    }

    #[test]
    fn exponential_bounded() {
        let v = run("5^x + 7^y = 40369232 ; x,y in N0");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0]["x"], int(6));
        assert_eq!(sols[0]["y"], int(9));

        let v = run("4^x + 9^y = 2 ; x,y in N0");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert!(sols[0].values().all(|x| x.is_zero()));
    }

    #[test]
    fn exponential_pinning() {
        let v = run("4^x - 3^y = 1 ; x,y in N0");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert_eq!((sols[0]["x"].clone(), sols[0]["y"].clone()), (int(1), int(1)));

        let v = run("4^x - 3^y = 3 ; x,y in N0");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert_eq!((sols[0]["x"].clone(), sols[0]["y"].clone()), (int(1), int(0)));
    }

    #[test]
    fn three_exponential_terms() {
        let v = run("18^x + 16^y = 19^z ; x,y,z in N0");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        let a = &sols[0];
        assert_eq!(
            (a["x"].clone(), a["y"].clone(), a["z"].clone()),
            (int(1), int(0), int(1))
        );
    }

    #[test]
    fn quartic_enumeration() {
        let v = run("x^4 + y^4 + z^4 = 3042 ; x,y,z in Z");
        assert_eq!(finite_set(&v).len(), 48);
    }

    #[test]
    fn factorial_cases() {
        let v = run("x^2 + y^2 + z! = 24 ; x,y in Z, z in N0");
        assert_eq!(finite_set(&v).len(), 5);

        let v = run("x^2 + y^2 - z! = 3 ; x,y in Z, z in N0");
        assert_eq!(finite_set(&v).len(), 20);
    }

    #[test]
    fn reciprocal_counted() {
        let v = run("z = 1/x + 1/y + 2/(x*y) ; x,y,z in N");
        assert_eq!(finite_set(&v).len(), 5);

        let v = run("14/x + y/19 = 25 ; x,y in Z");
        assert_eq!(finite_set(&v).len(), 16);

        let v = run("20/x + 33/y = 2 ; x,y in Z");
        assert_eq!(finite_set(&v).len(), 15);

        let v = run("1/x + 1/y = 1 ; x,y in Z");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0]["x"], int(2));

        let v = run("x/y + y/x = 1 ; x,y in Z");
        assert!(finite_set(&v).is_empty());
    }

    #[test]
    fn symmetric_product_cases() {
        let v = run("x + y + z = x*y*z ; x,y,z in Z, x*y*z != 0");
        assert_eq!(finite_set(&v).len(), 12);

        let v = run("x + y + z + w = x*y*z*w ; x,y,z,w in N");
        assert_eq!(finite_set(&v).len(), 12);
    }

    #[test]
    fn family_cases() {
        for (src, expect_fams) in [
            ("7^x - 8^y - z = 0 ; x,y in N0, z in Z", 1),
            ("5*x + 4^y = 11 ; x in Z, y in N0", 1),
            ("3^x + 5^y - 4*z - 2 = 0 ; x,y in N0, z in Z", 1),
            ("5^x - 11*x + 3*y + 1 = 0 ; x in N0, y in Z", 2),
            ("7^x - 8^y - 2*z = 0 ; x,y in N0, z in Z", 1),
            ("x^2 - 3*y - 2*z = 0 ; x,y,z in Z", 2),
            ("x*y + y*z = x*y*z ; x,y,z in Z", 3),
        ] {
            let p = parse_problem(src).unwrap();
            let v = solve_problem(&p, &Config::default());
            match &v.status {
                Status::Family(fams) => {
                    assert_eq!(fams.len(), expect_fams, "{src}");
                    let (ok, reports) = verify_solutions(&p, &[], fams);
                    assert!(ok, "{src}: {reports:?}");
                }
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn pell_trichotomy_verdicts() {
        // all: family verdict
        let v = run("4*x^2 - 6*y^2 + 12*x + 108*y - 478 = 0 ; x,y in Z");
        match &v.status {
            Status::Family(fams) => {
                assert_eq!(fams.len(), 1);
                let members = sample_family(&fams[0], 5);
                assert_eq!(members.len(), 5);
                let p = parse_problem("4*x^2 - 6*y^2 + 12*x + 108*y - 478 = 0 ; x,y in Z").unwrap();
                for a in &members {
                    assert!(p.equations[0].eval(a).unwrap().is_zero());
                }
            }
            other => panic!("{other:?}"),
        }

        // none: no-solution with orbit-residue certificate
        let v = run("9*x^2 - 325*y^2 - 42*x - 130*y + 35 = 0 ; x,y in Z");
        assert!(matches!(
            v.status,
            Status::NoSolution(Certificate::PellOrbitResidue { .. })
        ));

        // some: family verdict
        let v = run("10*x^2 + 2*x - 8*y^2 = 0 ; x,y in Z");
        match &v.status {
            Status::Family(fams) => {
                let members = sample_family(&fams[0], 3);
                assert!(!members.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn systems() {
        let v = run("3*x^2 + 4*y = 19 and 5*x - 2*y = 3 ; x,y in Z");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert_eq!(
            (sols[0]["x"].clone(), sols[0]["y"].clone()),
            (int(-5), int(-14))
        );

        let v = run("x^2 - 3*y = 19 and 13*y^3 + 6*x = 11 and x^2 + y^2 = 17 ; x,y in Z");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert_eq!(
            (sols[0]["x"].clone(), sols[0]["y"].clone()),
            (int(4), int(-1))
        );

        let v = run("3*x*y + 5*x^3*y = 230 and x^2 + x*y = 14 ; x,y in Z");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 2);

        let v = run("x^2 + y^8 + z^6 = 0 and x^4 + y^2 - 17 = 0 ; x,y,z in Z");
        assert!(matches!(v.status, Status::NoSolution(_)));

        let v = run("x^2 + y^3 - z^4 = 3 and 2*x + y^2 - 3*y - 6*z^2 = 75 ; x,y,z in Z");
        assert!(matches!(
            v.status,
            Status::NoSolution(Certificate::Modular { modulus: 2, .. })
        ));

        let v = run(
            "x^6 + y^2 - z^3 = 0 and x^2 + y^4 + z + 1 = 0 and x + y + z + 1 = 0 ; x,y,z in Z",
        );
        assert!(matches!(v.status, Status::NoSolution(_)));
    }

    #[test]
    fn linear_systems_row_reduced() {
        // the 3x3 system with no integer solution: content certificate on
        // the first equation fires before row reduction
        let v = run("15*x + 10*y + 30*z = 41 and 22*x - 21*y + 8*z = 5 and x + 19*y - 39*z = 73 ; x,y,z in Z");
        assert!(matches!(v.status, Status::NoSolution(_)));

        // a unique-solution system
        let v = run("x + y = 0 and x - y = 0 ; x,y in Z");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert!(sols[0].values().all(|x| x.is_zero()));

        // an underdetermined consistent system keeps a lattice family
        let v = run("x + y + z = 6 and x - y + z = 2 ; x,y,z in Z");
        match &v.status {
            Status::Family(fams) => {
                assert_eq!(fams.len(), 1);
                for a in sample_family(&fams[0], 8) {
                    assert_eq!(
                        a.values().cloned().sum::<Int>(),
                        Int::from(6) - &a["y"] + &a["y"]
                    );
                }
            }
            other => panic!("{other:?}"),
        }

        // a 3-variable inconsistent system without per-equation obstruction
        let p = parse_problem(
            "x + y + z = 1 and x + y + z = 2 ; x,y,z in Z",
        )
        .unwrap();
        let v = solve_problem(&p, &Config::default());
        match &v.status {
            Status::NoSolution(cert) => {
                let (ok, why) = verify_certificate(&p, cert, &Config::default());
                assert!(ok, "{why}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_equations() {
        let v = run("0 = 0");
        assert!(matches!(v.status, Status::Family(_)));
        let v = run("x = x ; x in Z");
        assert!(matches!(v.status, Status::Family(_)));
        let v = run("0 = 1");
        assert!(matches!(v.status, Status::NoSolution(_)));
        let v = run("x = 0 ; x in Z");
        let sols = finite_set(&v);
        assert_eq!(sols.len(), 1);
        assert!(sols[0]["x"].is_zero());
    }

    #[test]
    fn certificate_round_trip() {
        let cfg = Config::default();
        for src in [
            "15*x^2 + 6*y^2 = 12 ; x,y in Z",
            "15*x^2 - 35*y^3 = 10 ; x,y in Z",
            "5*x^2 + 125*y^3 = 4973 ; x,y in Z",
            "x^2 + y^2 + 1 = 0 ; x,y in Z",
            "1/x + 1/y + 1/z = 5 ; x,y,z in Z, x*y*z != 0",
            "x^3 + y^3 + z^3 = 58 ; x,y,z in Z",
            "9*x^2 - 325*y^2 - 42*x - 130*y + 35 = 0 ; x,y in Z",
        ] {
            let p = parse_problem(src).unwrap();
            let v = solve_problem(&p, &cfg);
            match &v.status {
                Status::NoSolution(cert) => {
                    let (ok, why) = verify_certificate(&p, cert, &cfg);
                    assert!(ok, "{src}: {why}");
                }
                other => panic!("{src}: expected NoSolution, got {other:?}"),
            }
        }
    }

    #[test]
    fn certificate_rejects_wrong_claims() {
        let cfg = Config::default();
        let p = parse_problem("x^2 - 5 = 0 ; x in Z").unwrap();
        let cert = Certificate::Modular {
            modulus: 5,
            states_checked: 5,
            domain_note: String::new(),
        };
        let (ok, _) = verify_certificate(&p, &cert, &cfg);
        assert!(!ok, "x^2 ≡ 5 has the root x ≡ 0 (mod 5)");
    }

    #[test]
    fn verify_solutions_reports() {
        let p = parse_problem("x + y = 5 ; x,y in Z").unwrap();
        let mut bad = Assignment::new();
        bad.insert("x".into(), int(2));
        bad.insert("y".into(), int(2));
        let (ok, reports) = verify_solutions(&p, &[bad], &[]);
        assert!(!ok);
        assert!(reports[0].contains("-1"), "{reports:?}");

        let p = parse_problem("4^x - 3^y = 1 ; x,y in N0").unwrap();
        let mut good = Assignment::new();
        good.insert("x".into(), int(1));
        good.insert("y".into(), int(1));
        let (ok, _) = verify_solutions(&p, &[good], &[]);
        assert!(ok);
    }

    #[test]
    fn never_no_solution_with_witness() {
        // fuzz: random small equations brute-forced on [-8, 8]^n
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut cfg = Config::default();
        cfg.max_modulus = 16;
        cfg.probe_budget = 1 << 12;
        cfg.probe_half_width = 10;
        cfg.recursion_depth = 2;
        for round in 0..150 {
            let nvars = rng.gen_range(1..=2usize);
            let vars = ["x", "y"];
            let nterms = rng.gen_range(1..=3usize);
            let mut src = String::new();
            for t in 0..nterms {
                let c: i64 = rng.gen_range(-6..=6);
                if t > 0 {
                    src.push_str(" + ");
                }
                let v = vars[rng.gen_range(0..nvars)];
                let e = rng.gen_range(1..=3u32);
                src.push_str(&format!("{c}*{v}^{e}"));
            }
            let rhs: i64 = rng.gen_range(-20..=20);
            let text = format!(
                "{src} = {rhs} ; {} in Z",
                vars[..nvars].join(",")
            );
            let Ok(p) = parse_problem(&text) else { continue };
            // brute force a witness
            let mut witness = None;
            let mut assign = Assignment::new();
            'outer: for x in -8..=8i64 {
                for y in -8..=8i64 {
                    assign.insert("x".into(), int(x));
                    if nvars > 1 {
                        assign.insert("y".into(), int(y));
                    }
                    if p.satisfied_by(&assign) {
                        witness = Some(assign.clone());
                        break 'outer;
                    }
                    if nvars == 1 {
                        break;
                    }
                }
            }
            let v = solve_problem(&p, &cfg);
            if let Status::NoSolution(cert) = &v.status {
                assert!(
                    witness.is_none(),
                    "round {round}: {text} has witness {witness:?} but got {cert:?}"
                );
            }
        }
    }
}
