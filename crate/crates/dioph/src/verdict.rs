//! Verdicts, certificates and solution families shared by the solvers.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::{factorial, Int, Var};
use crate::linear::AffineLatticeFamily;

pub type Assignment = BTreeMap<Var, Int>;

/// How a finite verdict's completeness was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletenessTag {
    BoundedExhaustive,
    FactorEnumeration,
    DiscriminantRange,
    DivisorCandidates,
    ModularPlusInspection,
    /// Exact algebraic solve (linear elimination / substitution).
    ClosedForm,
}

impl CompletenessTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompletenessTag::BoundedExhaustive => "bounded-exhaustive",
            CompletenessTag::FactorEnumeration => "factor-enumeration",
            CompletenessTag::DiscriminantRange => "discriminant-range",
            CompletenessTag::DivisorCandidates => "divisor-candidates",
            CompletenessTag::ModularPlusInspection => "modular-plus-inspection",
            CompletenessTag::ClosedForm => "closed-form",
        }
    }
}

/// Machine-checkable evidence of non-solvability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// No residue state satisfies f ≡ 0 (mod m).
    Modular {
        modulus: u64,
        states_checked: u128,
        domain_note: String,
    },
    /// A sign or magnitude argument; the payload is re-derivable.
    SignMagnitude(SignMagnitudeArgument),
    /// Every term coefficient is divisible by d but the constant is not.
    Content { divisor: Int, constant: Int },
    /// gcd of linear coefficients does not divide the right-hand side.
    GcdLinear { gcd: Int, rhs: Int },
    /// The equation rewrites to A^n ± B^n = C^n with n >= 3 and the
    /// zero-component cases are themselves unsatisfiable.
    Flt { exponent: u32, rewrite: String },
    /// No Pell class representative exists below the fundamental-domain
    /// bound for x^2 - d y^2 = c.
    PellEmptyClass { d: Int, c: Int, bound: Int },
    /// The Pell form is solvable but no orbit member back-maps integrally:
    /// the orbit residues modulo the affine denominators never match.
    PellOrbitResidue {
        d: Int,
        c: Int,
        x_modulus: Int,
        x_residue: Int,
        y_modulus: Int,
        y_residue: Int,
    },
}

/// The concrete sign/magnitude argument, sufficient for independent
/// re-checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignMagnitudeArgument {
    /// The equation's left-hand side has a provable lower bound > 0 or
    /// upper bound < 0 over the declared domains.
    DefiniteValue { min: Option<Int>, max: Option<Int> },
    /// Reciprocal terms bound the pre-clearing form away from its target.
    ReciprocalMagnitude {
        lo: Int,
        hi: Int,
        target_min: Int,
        target_max: Int,
    },
    /// One equation of a system admits only the listed candidates (its
    /// complete solution set) and the rest of the system rejects each.
    FiniteCandidatesRejected {
        candidates: Vec<Assignment>,
        source_equation: usize,
    },
    /// Two equations force disjoint intervals on one variable.
    DisjointIntervals {
        variable: Var,
        eq_a: usize,
        lo_a: Option<Int>,
        hi_a: Option<Int>,
        eq_b: usize,
        lo_b: Option<Int>,
        hi_b: Option<Int>,
    },
    /// A constant equation c = 0 with c != 0.
    NonzeroConstant { value: Int },
    /// Completed-square form sum c_i (a_i v_i + b_i)^2 = n with all c_i > 0
    /// and n < 0.
    CenteredInfeasible { n: Int, scale: Int },
}

/// Closed-form expression over family parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyExpr {
    Const(Int),
    Param(usize),
    Add(Vec<FamilyExpr>),
    Mul(Vec<FamilyExpr>),
    /// base ^ (a * param + b)
    Pow {
        base: Int,
        param: usize,
        a: u32,
        b: u32,
    },
    /// param ^ exp
    ParamPow { param: usize, exp: u32 },
    /// Exact division by a nonzero constant; integrality is guaranteed by a
    /// recorded modular fact and checked on materialization.
    Div(Box<FamilyExpr>, Int),
    /// Factorial of (a * param + b).
    Fact { param: usize, a: u32, b: u32 },
}

impl FamilyExpr {
    pub fn eval(&self, params: &[Int]) -> Option<Int> {
        match self {
            FamilyExpr::Const(c) => Some(c.clone()),
            FamilyExpr::Param(i) => Some(params[*i].clone()),
            FamilyExpr::Add(xs) => {
                let mut acc = Int::zero();
                for x in xs {
                    acc += x.eval(params)?;
                }
                Some(acc)
            }
            FamilyExpr::Mul(xs) => {
                let mut acc = Int::one();
                for x in xs {
                    acc *= x.eval(params)?;
                }
                Some(acc)
            }
            FamilyExpr::Pow { base, param, a, b } => {
                let k = params[*param].to_u32()?;
                Some(base.pow(a * k + b))
            }
            FamilyExpr::ParamPow { param, exp } => Some(params[*param].pow(*exp)),
            FamilyExpr::Div(x, d) => {
                let v = x.eval(params)?;
                let (q, r) = num_integer::Integer::div_rem(&v, d);
                if r.is_zero() {
                    Some(q)
                } else {
                    None
                }
            }
            FamilyExpr::Fact { param, a, b } => {
                let k = params[*param].to_u32()?;
                Some(factorial(a * k + b))
            }
        }
    }

    pub fn render(&self, param_names: &[String]) -> String {
        match self {
            FamilyExpr::Const(c) => c.to_string(),
            FamilyExpr::Param(i) => param_names[*i].clone(),
            FamilyExpr::Add(xs) => {
                let parts: Vec<String> = xs
                    .iter()
                    .filter(|x| !matches!(x, FamilyExpr::Const(c) if c.is_zero()))
                    .map(|x| x.render(param_names))
                    .collect();
                if parts.is_empty() {
                    "0".into()
                } else if parts.len() == 1 {
                    parts.into_iter().next().unwrap()
                } else {
                    format!("({})", parts.join(" + "))
                }
            }
            FamilyExpr::Mul(xs) => {
                let mut neg = false;
                let mut parts: Vec<String> = Vec::new();
                for x in xs {
                    match x {
                        FamilyExpr::Const(c) if c.is_one() => {}
                        FamilyExpr::Const(c) if *c == -Int::one() => neg = !neg,
                        other => parts.push(other.render(param_names)),
                    }
                }
                if parts.is_empty() {
                    parts.push("1".into());
                }
                format!("{}{}", if neg { "-" } else { "" }, parts.join("*"))
            }
            FamilyExpr::Pow { base, param, a, b } => {
                let p = &param_names[*param];
                match (a, b) {
                    (1, 0) => format!("{base}^{p}"),
                    (a, 0) => format!("{base}^({a}*{p})"),
                    (1, b) => format!("{base}^({p}+{b})"),
                    (a, b) => format!("{base}^({a}*{p}+{b})"),
                }
            }
            FamilyExpr::ParamPow { param, exp } => {
                format!("{}^{exp}", param_names[*param])
            }
            FamilyExpr::Div(x, d) => format!("{}/{d}", x.render(param_names)),
            FamilyExpr::Fact { param, a, b } => {
                let p = &param_names[*param];
                match (a, b) {
                    (1, 0) => format!("{p}!"),
                    (a, b) => format!("({a}*{p}+{b})!"),
                }
            }
        }
    }
}

/// Parameter of an indexed family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParam {
    pub name: String,
    /// false: parameter ranges over Z; true: over N0.
    pub nonneg: bool,
}

/// Parametric solution family given by closed-form expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedFamily {
    pub params: Vec<FamilyParam>,
    pub assignments: BTreeMap<Var, FamilyExpr>,
    /// The modular fact guaranteeing integrality of the divisions.
    pub integrality_note: String,
}

impl IndexedFamily {
    /// Materialize at concrete parameter values; None when a division is not
    /// exact (which the integrality note promises never happens).
    pub fn member(&self, params: &[Int]) -> Option<Assignment> {
        let mut out = BTreeMap::new();
        for (v, e) in &self.assignments {
            out.insert(v.clone(), e.eval(params)?);
        }
        Some(out)
    }

    pub fn render(&self) -> BTreeMap<Var, String> {
        let names: Vec<String> = self.params.iter().map(|p| p.name.clone()).collect();
        self.assignments
            .iter()
            .map(|(v, e)| (v.clone(), e.render(&names)))
            .collect()
    }
}

/// Pell orbit family for x^2 - d y^2 = c, optionally composed with a
/// back-transform to the source variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellFamily {
    pub d: Int,
    pub c: Int,
    /// Fundamental unit of x^2 - d y^2 = 1.
    pub unit: (Int, Int),
    /// Class representatives.
    pub bases: Vec<(Int, Int)>,
    /// Sign closure: solutions closed under (±x, ±y).
    pub sign_closed: bool,
    /// Back-transform to source variables, when the family solves a reduced
    /// equation: source var -> (alpha, beta) with X = alpha*var + beta.
    pub back: Option<PellBackTransform>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellBackTransform {
    /// Variable receiving X and its affine relation X = a*x + b.
    pub x_var: (Var, Int, Int),
    /// Variable receiving Y, same convention.
    pub y_var: Option<(Var, Int, Int)>,
    /// Classification of orbit members that back-map integrally.
    pub class: BackClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackClass {
    All,
    Some,
    None,
}

/// A solution family of any supported kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Lattice(AffineLatticeFamily),
    Pell(PellFamily),
    Indexed(IndexedFamily),
}

/// One entry of the strategy log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub stage: String,
    pub outcome: String,
    pub millis: u128,
}

/// Run statistics reported alongside verdicts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub evaluations: u128,
    pub moduli_scanned: u64,
}

/// The solver output.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    NoSolution(Certificate),
    Finite {
        solutions: Vec<Assignment>,
        tag: CompletenessTag,
    },
    Family(Vec<Family>),
    Inconclusive {
        /// Solutions found by probing; not a completeness claim.
        found: Vec<Assignment>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub trace: Vec<TraceEntry>,
    pub stats: Stats,
}

impl Verdict {
    pub fn status_name(&self) -> &'static str {
        match &self.status {
            Status::NoSolution(_) => "no_solution",
            Status::Finite { .. } => "finite",
            Status::Family(_) => "family",
            Status::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_definitive(&self) -> bool {
        !matches!(self.status, Status::Inconclusive { .. })
    }
}

/// Sort + dedupe a solution list into deterministic order.
pub fn sort_solutions(mut xs: Vec<Assignment>) -> Vec<Assignment> {
    xs.sort_by(|a, b| {
        let ka: Vec<(&Var, &Int)> = a.iter().collect();
        let kb: Vec<(&Var, &Int)> = b.iter().collect();
        ka.cmp(&kb)
    });
    xs.dedup();
    xs
}

/// Render an assignment as (v1=..., v2=...), variables in name order.
pub fn render_assignment(a: &Assignment) -> String {
    let parts: Vec<String> = a.iter().map(|(v, x)| format!("{v}={x}")).collect();
    format!("({})", parts.join(", "))
}

/// Signed absolute-value max over an assignment, for ordering probe output.
pub fn assignment_norm(a: &Assignment) -> Int {
    a.values().map(|x| x.abs()).max().unwrap_or_else(Int::zero)
}
