//! Expression model and manipulation toolkit.
//!
//! Equations are kept in a canonical "sum of monomials = 0" form. A monomial
//! is an integer coefficient times variable powers, integer-base exponentials
//! (`b^x` with |b| >= 2) and factorials (`x!`). All arithmetic is exact
//! (arbitrary precision), so the canonical form evaluates identically to the
//! source expression at every assignment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Var = String;
/// Monomial shape without its coefficient: (powers, exponentials, factorials).
pub type Signature = (Vec<(Var, u32)>, Vec<(Var, Int)>, Vec<Var>);

/// Errors raised while building or evaluating expressions.
///
/// There is no overflow variant: all arithmetic is arbitrary precision, so
/// overflow is impossible by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    /// Term shape outside the model, e.g. `x^y` or base 0/±1 exponentials.
    UnsupportedTerm(String),
    /// A denominator contains a sum; clearing such fractions is out of scope.
    NestedFraction,
    /// A constant denominator equal to zero.
    ZeroDenominatorConstant,
    /// Negative exponent or factorial argument at evaluation time.
    DomainViolation(String),
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::UnsupportedTerm(s) => write!(f, "unsupported term: {s}"),
            ExprError::NestedFraction => write!(f, "denominator contains a sum"),
            ExprError::ZeroDenominatorConstant => write!(f, "zero constant denominator"),
            ExprError::DomainViolation(s) => write!(f, "domain violation: {s}"),
        }
    }
}

/// Variable domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// All integers.
    Z,
    /// Naturals starting at 1.
    N,
    /// Naturals starting at 0.
    N0,
    /// Closed interval.
    Range(Int, Int),
}

impl Domain {
    pub fn contains(&self, v: &Int) -> bool {
        match self {
            Domain::Z => true,
            Domain::N => v.is_positive(),
            Domain::N0 => !v.is_negative(),
            Domain::Range(lo, hi) => v >= lo && v <= hi,
        }
    }

    /// Lower endpoint, if bounded below.
    pub fn lo(&self) -> Option<Int> {
        match self {
            Domain::Z => None,
            Domain::N => Some(Int::one()),
            Domain::N0 => Some(Int::zero()),
            Domain::Range(lo, _) => Some(lo.clone()),
        }
    }

    /// Upper endpoint, if bounded above.
    pub fn hi(&self) -> Option<Int> {
        match self {
            Domain::Range(_, hi) => Some(hi.clone()),
            _ => None,
        }
    }

    /// Whether every member is >= 0.
    pub fn nonnegative(&self) -> bool {
        match self {
            Domain::Z => false,
            Domain::N | Domain::N0 => true,
            Domain::Range(lo, _) => !lo.is_negative(),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Z => write!(f, "Z"),
            Domain::N => write!(f, "N"),
            Domain::N0 => write!(f, "N0"),
            Domain::Range(lo, hi) => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// One term: coefficient * prod(v^e) * prod(b^v) * prod(v!).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub coeff: Int,
    /// variable -> exponent (>= 1)
    pub powers: BTreeMap<Var, u32>,
    /// variable -> integer base b with |b| >= 2 (term contributes b^variable)
    pub exponentials: BTreeMap<Var, Int>,
    /// variables v contributing v!
    pub factorials: BTreeSet<Var>,
}

impl Monomial {
    pub fn constant(c: Int) -> Self {
        Monomial {
            coeff: c,
            powers: BTreeMap::new(),
            exponentials: BTreeMap::new(),
            factorials: BTreeSet::new(),
        }
    }

    pub fn var(v: &str) -> Self {
        let mut powers = BTreeMap::new();
        powers.insert(v.to_string(), 1);
        Monomial {
            coeff: Int::one(),
            powers,
            exponentials: BTreeMap::new(),
            factorials: BTreeSet::new(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.powers.is_empty() && self.exponentials.is_empty() && self.factorials.is_empty()
    }

    /// The (powers, exponentials, factorials) signature ignoring the coefficient.
    pub fn signature(&self) -> Signature {
        (
            self.powers.iter().map(|(v, e)| (v.clone(), *e)).collect(),
            self.exponentials
                .iter()
                .map(|(v, b)| (v.clone(), b.clone()))
                .collect(),
            self.factorials.iter().cloned().collect(),
        )
    }

    /// Total polynomial degree (exponentials/factorials not counted).
    pub fn degree(&self) -> u32 {
        self.powers.values().sum()
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut s: BTreeSet<Var> = self.powers.keys().cloned().collect();
        s.extend(self.exponentials.keys().cloned());
        s.extend(self.factorials.iter().cloned());
        s
    }

    /// Multiply two monomials; fails when a variable would get both a
    /// second exponential base or multiplied factorials (v!·v! unsupported).
    pub fn mul(&self, other: &Monomial) -> Result<Monomial, ExprError> {
        let mut out = self.clone();
        out.coeff = &out.coeff * &other.coeff;
        for (v, e) in &other.powers {
            *out.powers.entry(v.clone()).or_insert(0) += e;
        }
        for (v, b) in &other.exponentials {
            match out.exponentials.entry(v.clone()) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert(b.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut slot) => {
                    // b1^v * b2^v = (b1*b2)^v
                    let nb = slot.get() * b;
                    *slot.get_mut() = nb;
                }
            }
        }
        for v in &other.factorials {
            if !out.factorials.insert(v.clone()) {
                return Err(ExprError::UnsupportedTerm(format!("{v}! squared")));
            }
        }
        Ok(out)
    }

    /// Exact value at an assignment.
    pub fn eval(&self, a: &BTreeMap<Var, Int>) -> Result<Int, ExprError> {
        let mut acc = self.coeff.clone();
        if acc.is_zero() {
            return Ok(acc);
        }
        for (v, e) in &self.powers {
            let x = a
                .get(v)
                .ok_or_else(|| ExprError::DomainViolation(format!("unassigned {v}")))?;
            acc *= x.pow(*e);
        }
        for (v, b) in &self.exponentials {
            let x = a
                .get(v)
                .ok_or_else(|| ExprError::DomainViolation(format!("unassigned {v}")))?;
            let e = x
                .to_u32()
                .ok_or_else(|| ExprError::DomainViolation(format!("negative exponent {v}={x}")))?;
            acc *= b.pow(e);
        }
        for v in &self.factorials {
            let x = a
                .get(v)
                .ok_or_else(|| ExprError::DomainViolation(format!("unassigned {v}")))?;
            let n = x.to_u32().ok_or_else(|| {
                ExprError::DomainViolation(format!("negative factorial argument {v}={x}"))
            })?;
            acc *= factorial(n);
        }
        Ok(acc)
    }
}

pub fn factorial(n: u32) -> Int {
    let mut acc = Int::one();
    for k in 2..=n {
        acc *= Int::from(k);
    }
    acc
}

/// Canonical monomial ordering: graded lexicographic on (total polynomial
/// degree, variable names, exponential bases, factorial flags), higher
/// degree first so renderings read naturally.
fn canonical_cmp(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    b.degree()
        .cmp(&a.degree())
        .then_with(|| a.powers.cmp(&b.powers))
        .then_with(|| a.exponentials.cmp(&b.exponentials))
        .then_with(|| a.factorials.cmp(&b.factorials))
}

/// A reciprocal term of the source expression, kept as metadata after
/// denominators are cleared: coeff * num / (den_const * prod(den_vars)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracTerm {
    pub num: Monomial,
    pub den_vars: BTreeMap<Var, u32>,
    pub den_const: Int,
}

/// Equation in canonical form: sum(terms) + constant = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedEquation {
    pub terms: Vec<Monomial>,
    pub constant: Int,
    /// Variables constrained != 0 (cleared denominators or explicit).
    pub nonvanishing: BTreeSet<Var>,
    /// Pre-clearing fractional terms, when the equation came from one.
    pub frac_meta: Option<Vec<FracTerm>>,
}

impl NormalizedEquation {
    pub fn from_terms(raw: Vec<Monomial>) -> Self {
        let mut by_sig: BTreeMap<Signature, Int> = BTreeMap::new();
        let mut constant = Int::zero();
        for t in raw {
            if t.coeff.is_zero() {
                continue;
            }
            if t.is_constant() {
                constant += t.coeff;
            } else {
                *by_sig.entry(t.signature()).or_insert_with(Int::zero) += t.coeff;
            }
        }
        let mut terms: Vec<Monomial> = by_sig
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((p, e, fa), c)| Monomial {
                coeff: c,
                powers: p.into_iter().collect(),
                exponentials: e.into_iter().collect(),
                factorials: fa.into_iter().collect(),
            })
            .collect();
        terms.sort_by(canonical_cmp);
        NormalizedEquation {
            terms,
            constant,
            nonvanishing: BTreeSet::new(),
            frac_meta: None,
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for t in &self.terms {
            s.extend(t.variables());
        }
        s
    }

    pub fn is_trivially_true(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    /// Exact value of the left-hand side.
    pub fn eval(&self, a: &BTreeMap<Var, Int>) -> Result<Int, ExprError> {
        let mut acc = self.constant.clone();
        for t in &self.terms {
            acc += t.eval(a)?;
        }
        Ok(acc)
    }

    /// True when the assignment satisfies the equation and respects the
    /// nonvanishing set. Evaluation errors (negative exponent/factorial)
    /// mean the assignment is outside the equation's domain of definition.
    pub fn satisfied_by(&self, a: &BTreeMap<Var, Int>) -> bool {
        for v in &self.nonvanishing {
            if a.get(v).map(|x| x.is_zero()).unwrap_or(true) {
                return false;
            }
        }
        matches!(self.eval(a), Ok(v) if v.is_zero())
    }

    /// Substitute a fixed value for one variable, renormalizing.
    pub fn substitute(&self, var: &str, value: &Int) -> Result<NormalizedEquation, ExprError> {
        let mut out_terms = Vec::new();
        for t in &self.terms {
            let mut m = t.clone();
            if let Some(e) = m.powers.remove(var) {
                m.coeff *= value.pow(e);
            }
            if let Some(b) = m.exponentials.remove(var) {
                let e = value.to_u32().ok_or_else(|| {
                    ExprError::DomainViolation(format!("negative exponent {var}={value}"))
                })?;
                m.coeff *= b.pow(e);
            }
            if m.factorials.remove(var) {
                let n = value.to_u32().ok_or_else(|| {
                    ExprError::DomainViolation(format!("negative factorial argument {var}={value}"))
                })?;
                m.coeff *= factorial(n);
            }
            out_terms.push(m);
        }
        out_terms.push(Monomial::constant(self.constant.clone()));
        let mut eq = NormalizedEquation::from_terms(out_terms);
        eq.nonvanishing = self
            .nonvanishing
            .iter()
            .filter(|v| v.as_str() != var)
            .cloned()
            .collect();
        Ok(eq)
    }

    /// Content of the nonconstant part: gcd of all term coefficients.
    pub fn content(&self) -> Int {
        let mut g = Int::zero();
        for t in &self.terms {
            g = g.gcd(&t.coeff);
        }
        g
    }

    /// Apply a variable permutation and renormalize.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> NormalizedEquation {
        let ren = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        let terms = self
            .terms
            .iter()
            .map(|t| Monomial {
                coeff: t.coeff.clone(),
                powers: t.powers.iter().map(|(v, e)| (ren(v), *e)).collect(),
                exponentials: t
                    .exponentials
                    .iter()
                    .map(|(v, b)| (ren(v), b.clone()))
                    .collect(),
                factorials: t.factorials.iter().map(&ren).collect(),
            })
            .chain(std::iter::once(Monomial::constant(self.constant.clone())))
            .collect();
        let mut eq = NormalizedEquation::from_terms(terms);
        eq.nonvanishing = self.nonvanishing.iter().map(&ren).collect();
        eq
    }
}

/// Side constraints beyond per-variable domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// Product of the listed variables must be nonzero.
    ProductNonzero(Vec<Var>),
}

/// A system of equations plus variable domains and side constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub equations: Vec<NormalizedEquation>,
    pub domains: BTreeMap<Var, Domain>,
    pub constraints: Vec<Constraint>,
}

impl Problem {
    pub fn single(eq: NormalizedEquation, domains: BTreeMap<Var, Domain>) -> Self {
        Problem {
            equations: vec![eq],
            domains,
            constraints: Vec::new(),
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for eq in &self.equations {
            s.extend(eq.variables());
        }
        s
    }

    pub fn domain(&self, v: &str) -> Domain {
        self.domains.get(v).cloned().unwrap_or(Domain::Z)
    }

    /// All nonvanishing variables: equation-level plus constraint-level.
    pub fn nonvanishing(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for eq in &self.equations {
            s.extend(eq.nonvanishing.iter().cloned());
        }
        for c in &self.constraints {
            let Constraint::ProductNonzero(vs) = c;
            s.extend(vs.iter().cloned());
        }
        s
    }

    /// System semantics: every equation and every constraint must hold.
    pub fn satisfied_by(&self, a: &BTreeMap<Var, Int>) -> bool {
        for v in self.nonvanishing() {
            if a.get(&v).map(|x| x.is_zero()).unwrap_or(true) {
                return false;
            }
        }
        for (v, x) in a {
            if !self.domain(v).contains(x) {
                return false;
            }
        }
        self.equations
            .iter()
            .all(|eq| matches!(eq.eval(a), Ok(v) if v.is_zero()))
    }
}

// ---------------------------------------------------------------------------
// Raw expression trees (parser output) and normalization
// ---------------------------------------------------------------------------

/// Parser-level expression tree with integer-only leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawExpr {
    Int(Int),
    Var(Var),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Neg(Box<RawExpr>),
    /// variable ^ positive integer
    Pow(Var, u32),
    /// integer base ^ variable
    Exp(Int, Var),
    Fact(Var),
}

/// A term of the partial-fraction expansion: num / (den_const * den_vars).
#[derive(Debug, Clone)]
struct GenTerm {
    num: Monomial,
    den_vars: BTreeMap<Var, u32>,
    den_const: Int,
}

impl GenTerm {
    fn from_monomial(m: Monomial) -> Self {
        GenTerm {
            num: m,
            den_vars: BTreeMap::new(),
            den_const: Int::one(),
        }
    }

    fn is_fraction(&self) -> bool {
        !self.den_vars.is_empty() || !self.den_const.is_one()
    }

    /// Cancel common variable factors between numerator powers and
    /// denominator, and pull integer content out of den_const.
    fn reduce(&mut self) {
        let mut den = BTreeMap::new();
        for (v, de) in std::mem::take(&mut self.den_vars) {
            let ne = self.num.powers.get(&v).copied().unwrap_or(0);
            let cancel = ne.min(de);
            if cancel > 0 {
                let left = ne - cancel;
                if left == 0 {
                    self.num.powers.remove(&v);
                } else {
                    self.num.powers.insert(v.clone(), left);
                }
            }
            if de - cancel > 0 {
                den.insert(v, de - cancel);
            }
        }
        self.den_vars = den;
        if self.den_const.is_negative() {
            self.den_const = -self.den_const.clone();
            self.num.coeff = -self.num.coeff.clone();
        }
        let g = self.num.coeff.gcd(&self.den_const);
        if g > Int::one() {
            self.num.coeff = &self.num.coeff / &g;
            self.den_const = &self.den_const / &g;
        }
    }
}

/// Expand a raw tree into a sum of generalized (possibly fractional) terms.
fn expand(e: &RawExpr) -> Result<Vec<GenTerm>, ExprError> {
    match e {
        RawExpr::Int(n) => Ok(vec![GenTerm::from_monomial(Monomial::constant(n.clone()))]),
        RawExpr::Var(v) => Ok(vec![GenTerm::from_monomial(Monomial::var(v))]),
        RawExpr::Add(a, b) => {
            let mut out = expand(a)?;
            out.extend(expand(b)?);
            Ok(out)
        }
        RawExpr::Sub(a, b) => {
            let mut out = expand(a)?;
            for mut t in expand(b)? {
                t.num.coeff = -t.num.coeff;
                out.push(t);
            }
            Ok(out)
        }
        RawExpr::Neg(a) => {
            let mut out = expand(a)?;
            for t in &mut out {
                t.num.coeff = -t.num.coeff.clone();
            }
            Ok(out)
        }
        RawExpr::Mul(a, b) => {
            let xs = expand(a)?;
            let ys = expand(b)?;
            let mut out = Vec::new();
            for x in &xs {
                for y in &ys {
                    let num = x.num.mul(&y.num)?;
                    let mut den_vars = x.den_vars.clone();
                    for (v, e) in &y.den_vars {
                        *den_vars.entry(v.clone()).or_insert(0) += e;
                    }
                    let mut t = GenTerm {
                        num,
                        den_vars,
                        den_const: &x.den_const * &y.den_const,
                    };
                    t.reduce();
                    out.push(t);
                }
            }
            Ok(out)
        }
        RawExpr::Div(a, b) => {
            let xs = expand(a)?;
            let ys = expand(b)?;
            if ys.len() != 1 {
                return Err(ExprError::NestedFraction);
            }
            let d = &ys[0];
            if d.is_fraction() {
                return Err(ExprError::NestedFraction);
            }
            let dm = &d.num;
            if !dm.exponentials.is_empty() || !dm.factorials.is_empty() {
                return Err(ExprError::UnsupportedTerm(
                    "exponential or factorial denominator".into(),
                ));
            }
            if dm.coeff.is_zero() {
                return Err(ExprError::ZeroDenominatorConstant);
            }
            let mut out = Vec::new();
            for x in &xs {
                let mut den_vars = x.den_vars.clone();
                for (v, e) in &dm.powers {
                    *den_vars.entry(v.clone()).or_insert(0) += e;
                }
                let mut t = GenTerm {
                    num: x.num.clone(),
                    den_vars,
                    den_const: &x.den_const * &dm.coeff,
                };
                t.reduce();
                out.push(t);
            }
            Ok(out)
        }
        RawExpr::Pow(v, e) => {
            if *e == 0 {
                return Ok(vec![GenTerm::from_monomial(Monomial::constant(Int::one()))]);
            }
            let mut powers = BTreeMap::new();
            powers.insert(v.clone(), *e);
            Ok(vec![GenTerm::from_monomial(Monomial {
                coeff: Int::one(),
                powers,
                exponentials: BTreeMap::new(),
                factorials: BTreeSet::new(),
            })])
        }
        RawExpr::Exp(b, v) => {
            if b.is_zero() {
                return Err(ExprError::UnsupportedTerm("0 as exponential base".into()));
            }
            if b.is_one() {
                return Ok(vec![GenTerm::from_monomial(Monomial::constant(Int::one()))]);
            }
            if *b == Int::from(-1) {
                return Err(ExprError::UnsupportedTerm("-1 as exponential base".into()));
            }
            let mut exps = BTreeMap::new();
            exps.insert(v.clone(), b.clone());
            Ok(vec![GenTerm::from_monomial(Monomial {
                coeff: Int::one(),
                powers: BTreeMap::new(),
                exponentials: exps,
                factorials: BTreeSet::new(),
            })])
        }
        RawExpr::Fact(v) => {
            let mut facts = BTreeSet::new();
            facts.insert(v.clone());
            Ok(vec![GenTerm::from_monomial(Monomial {
                coeff: Int::one(),
                powers: BTreeMap::new(),
                exponentials: BTreeMap::new(),
                factorials: facts,
            })])
        }
    }
}

/// Normalize `lhs = rhs` into canonical form. Fraction-free trees keep an
/// empty nonvanishing set; trees with variable denominators go through the
/// same expansion as [`clear_denominators`].
pub fn normalize(lhs: &RawExpr, rhs: &RawExpr) -> Result<NormalizedEquation, ExprError> {
    Ok(clear_denominators(lhs, rhs)?.0)
}

/// Multiply the equation through by the least common multiple of constant
/// denominators times the product of distinct variable denominators.
/// Records each variable denominator in the nonvanishing set. Solution sets
/// agree wherever denominators are nonzero.
pub fn clear_denominators(
    lhs: &RawExpr,
    rhs: &RawExpr,
) -> Result<(NormalizedEquation, BTreeSet<Var>), ExprError> {
    let mut terms = expand(lhs)?;
    for mut t in expand(rhs)? {
        t.num.coeff = -t.num.coeff;
        terms.push(t);
    }
    let had_fractions = terms.iter().any(|t| t.is_fraction());
    let frac_meta: Option<Vec<FracTerm>> = if had_fractions {
        Some(
            terms
                .iter()
                .map(|t| FracTerm {
                    num: t.num.clone(),
                    den_vars: t.den_vars.clone(),
                    den_const: t.den_const.clone(),
                })
                .collect(),
        )
    } else {
        None
    };

    // lcm of constant denominators, product of distinct variable denominators
    // at their maximal multiplicity.
    let mut const_lcm = Int::one();
    let mut var_den: BTreeMap<Var, u32> = BTreeMap::new();
    for t in &terms {
        const_lcm = const_lcm.lcm(&t.den_const);
        for (v, e) in &t.den_vars {
            let slot = var_den.entry(v.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
    }

    let mut out = Vec::new();
    for t in terms {
        let mut m = t.num.clone();
        m.coeff *= &const_lcm / &t.den_const;
        for (v, e) in &var_den {
            let cancel = t.den_vars.get(v).copied().unwrap_or(0);
            let extra = e - cancel;
            if extra > 0 {
                *m.powers.entry(v.clone()).or_insert(0) += extra;
            }
        }
        out.push(m);
    }
    let mut eq = NormalizedEquation::from_terms(out);
    let nonv: BTreeSet<Var> = var_den.keys().cloned().collect();
    eq.nonvanishing = nonv.clone();
    eq.frac_meta = frac_meta;
    Ok((eq, nonv))
}

/// Exact rational evaluation of a raw tree; None when a denominator is zero.
pub fn eval_raw(e: &RawExpr, a: &BTreeMap<Var, Int>) -> Option<Result<(Int, Int), ExprError>> {
    fn go(e: &RawExpr, a: &BTreeMap<Var, Int>) -> Option<Result<(Int, Int), ExprError>> {
        let ok = |n: Int| Some(Ok((n, Int::one())));
        match e {
            RawExpr::Int(n) => ok(n.clone()),
            RawExpr::Var(v) => ok(a.get(v)?.clone()),
            RawExpr::Add(x, y) | RawExpr::Sub(x, y) => {
                let (nx, dx) = match go(x, a)? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                let (ny, dy) = match go(y, a)? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                let n = if matches!(e, RawExpr::Add(_, _)) {
                    &nx * &dy + &ny * &dx
                } else {
                    &nx * &dy - &ny * &dx
                };
                Some(Ok((n, dx * dy)))
            }
            RawExpr::Mul(x, y) => {
                let (nx, dx) = match go(x, a)? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                let (ny, dy) = match go(y, a)? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                Some(Ok((nx * ny, dx * dy)))
            }
            RawExpr::Div(x, y) => {
                let (nx, dx) = match go(x, a)? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                let (ny, dy) = match go(y, a)? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                if ny.is_zero() {
                    return None;
                }
                Some(Ok((nx * dy, dx * ny)))
            }
            RawExpr::Neg(x) => {
                let (nx, dx) = match go(x, a)? {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                Some(Ok((-nx, dx)))
            }
            RawExpr::Pow(v, k) => ok(a.get(v)?.pow(*k)),
            RawExpr::Exp(b, v) => {
                let x = a.get(v)?;
                match x.to_u32() {
                    Some(k) => ok(b.pow(k)),
                    None => Some(Err(ExprError::DomainViolation(format!(
                        "negative exponent {v}={x}"
                    )))),
                }
            }
            RawExpr::Fact(v) => {
                let x = a.get(v)?;
                match x.to_u32() {
                    Some(k) => ok(factorial(k)),
                    None => Some(Err(ExprError::DomainViolation(format!(
                        "negative factorial argument {v}={x}"
                    )))),
                }
            }
        }
    }
    go(e, a)
}

// ---------------------------------------------------------------------------
// Affine maps and completed squares
// ---------------------------------------------------------------------------

/// Per-variable substitutions new = alpha*old + beta with alpha != 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub entries: BTreeMap<Var, (Int, Int)>,
}

impl AffineMap {
    pub fn apply(&self, a: &BTreeMap<Var, Int>) -> BTreeMap<Var, Int> {
        a.iter()
            .map(|(v, x)| {
                let (alpha, beta) = self
                    .entries
                    .get(v)
                    .cloned()
                    .unwrap_or((Int::one(), Int::zero()));
                (v.clone(), alpha * x + beta)
            })
            .collect()
    }

    /// old = (new - beta) / alpha, when integral.
    pub fn invert_var(&self, v: &str, new: &Int) -> Option<Int> {
        let (alpha, beta) = self.entries.get(v)?;
        let num = new - beta;
        let (q, r) = num.div_rem(alpha);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

/// Result of completing squares: scale·eq == sum_i c_i (alpha_i v_i + beta_i)^2 - n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenteredForm {
    pub squares: Vec<(Int, Var, Int, Int)>, // (c, v, alpha, beta)
    pub n: Int,
    pub scale: Int,
}

impl CenteredForm {
    /// Expand symbolically back into a normalized equation (should equal
    /// scale × the source equation).
    pub fn expand(&self) -> NormalizedEquation {
        let mut terms = Vec::new();
        for (c, v, alpha, beta) in &self.squares {
            // c*(alpha v + beta)^2 = c*alpha^2 v^2 + 2 c alpha beta v + c beta^2
            let mut sq = Monomial::var(v);
            sq.powers.insert(v.clone(), 2);
            sq.coeff = c * alpha * alpha;
            terms.push(sq);
            let mut lin = Monomial::var(v);
            lin.coeff = Int::from(2) * c * alpha * beta;
            terms.push(lin);
            terms.push(Monomial::constant(c * beta * beta));
        }
        terms.push(Monomial::constant(-self.n.clone()));
        NormalizedEquation::from_terms(terms)
    }
}

/// Complete squares for a quadratic with no mixed terms: returns
/// sum c_i(alpha_i v_i + beta_i)^2 = N, scaling the equation by the minimal
/// positive integer that keeps every completion integral.
pub fn complete_square_reduce(eq: &NormalizedEquation) -> Option<CenteredForm> {
    // Collect per-variable (a, b) from a v^2 + b v; reject anything else.
    let mut coefs: BTreeMap<Var, (Int, Int)> = BTreeMap::new();
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() || t.powers.len() != 1 {
            return None;
        }
        let (v, e) = t.powers.iter().next().unwrap();
        let slot = coefs
            .entry(v.clone())
            .or_insert_with(|| (Int::zero(), Int::zero()));
        match e {
            1 => slot.1 += &t.coeff,
            2 => slot.0 += &t.coeff,
            _ => return None,
        }
    }
    if coefs.values().any(|(a, _)| a.is_zero()) {
        return None; // a linear-only variable is not a square
    }
    if coefs.is_empty() {
        return None;
    }
    // Minimal k such that k*a is expressible c*alpha^2 with beta = k*b/(2*c*alpha)
    // integral for every variable. k = 1 works whenever each b is even after
    // factoring; otherwise scale by 4 (and in general by 4 once).
    'kloop: for k in [Int::one(), Int::from(4)] {
        let mut squares = Vec::new();
        let mut n = -(&eq.constant * &k);
        for (v, (a, b)) in &coefs {
            let ka = a * &k;
            let kb = b * &k;
            // choose alpha maximal square divisor: c = ka/alpha^2 minimal |c|
            let mut alpha = Int::one();
            let mut d = Int::from(2);
            let mut rem = ka.abs();
            while &d * &d <= rem {
                while (&rem % (&d * &d)).is_zero() {
                    rem /= &d * &d;
                    alpha *= &d;
                }
                d += 1;
            }
            let c = &ka / (&alpha * &alpha);
            // beta from 2*c*alpha*beta = kb
            let den = Int::from(2) * &c * &alpha;
            let (beta, r) = kb.div_rem(&den);
            if !r.is_zero() {
                continue 'kloop;
            }
            n += &c * &beta * &beta;
            squares.push((c, v.clone(), alpha, beta));
        }
        return Some(CenteredForm {
            squares,
            n,
            scale: k,
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;

    fn eq_of(text: &str) -> NormalizedEquation {
        parse_problem(text).unwrap().equations[0].clone()
    }

    fn asg(pairs: &[(&str, i64)]) -> BTreeMap<Var, Int> {
        pairs
            .iter()
            .map(|(v, x)| (v.to_string(), Int::from(*x)))
            .collect()
    }

    #[test]
    fn normalize_collects_terms() {
        let eq = eq_of("x^2 + y^2 - 6*x + 12*y - 36 = 0");
        assert_eq!(eq.terms.len(), 4);
        assert_eq!(eq.constant, Int::from(-36));
    }

    #[test]
    fn normalize_identity_is_empty() {
        let eq = eq_of("x = x");
        assert!(eq.terms.is_empty());
        assert!(eq.constant.is_zero());
    }

    #[test]
    fn normalize_moves_rhs() {
        let eq = eq_of("15*x^2 + 6*y^2 = 12");
        assert_eq!(eq.terms.len(), 2);
        assert_eq!(eq.constant, Int::from(-12));
        assert_eq!(eq.terms[0].coeff, Int::from(15));
    }

    #[test]
    fn clear_denominators_xy() {
        let eq = eq_of("x/y + y/x = 2");
        // x^2 - 2xy + y^2 = 0 with nonvanishing {x, y}
        assert_eq!(eq.constant, Int::zero());
        assert_eq!(eq.terms.len(), 3);
        assert_eq!(
            eq.nonvanishing.iter().cloned().collect::<Vec<_>>(),
            vec!["x".to_string(), "y".to_string()]
        );
        assert!(eq.satisfied_by(&asg(&[("x", 5), ("y", 5)])));
        assert!(!eq.satisfied_by(&asg(&[("x", 0), ("y", 0)])));
    }

    #[test]
    fn clear_denominators_constant() {
        let eq = eq_of("14/x + y/19 = 25");
        // xy - 475x + 266 = 0, nonvanishing {x}
        assert_eq!(eq.constant, Int::from(266));
        assert_eq!(eq.nonvanishing.len(), 1);
        // cross-check a handful of assignments against the fractional form
        for (x, y) in [(1i64, 209i64), (2, 342), (-7, 513), (14, 456)] {
            let a = asg(&[("x", x), ("y", y)]);
            let frac_holds = 14 * 19 + x * y == 25 * 19 * x;
            assert_eq!(eq.satisfied_by(&a), frac_holds, "x={x} y={y}");
        }
    }

    #[test]
    fn nested_fraction_rejected() {
        let p = parse_problem("1/(x+1) = 2");
        assert!(p.is_err());
    }

    #[test]
    fn evaluate_examples() {
        let eq = eq_of("15*x^2 + 6*y^2 = 12");
        assert_eq!(eq.eval(&asg(&[("x", 0), ("y", 0)])).unwrap(), Int::from(-12));

        let eq = eq_of("5^x + 7^y = 40369232");
        assert_eq!(eq.eval(&asg(&[("x", 6), ("y", 9)])).unwrap(), Int::zero());

        let eq = eq_of("x^4 + 4*y^3 - 7*x^2 - 12*y + 7 = 0");
        assert_eq!(eq.eval(&asg(&[("x", 1), ("y", 1)])).unwrap(), Int::from(-7));
    }

    #[test]
    fn evaluate_rejects_negative_exponent() {
        let eq = eq_of("2^x = 4");
        assert!(matches!(
            eq.eval(&asg(&[("x", -1)])),
            Err(ExprError::DomainViolation(_))
        ));
    }

    #[test]
    fn complete_square_circle() {
        let eq = eq_of("x^2 + y^2 - 6*x + 12*y - 36 = 0");
        let cf = complete_square_reduce(&eq).unwrap();
        assert_eq!(cf.scale, Int::one());
        assert_eq!(cf.n, Int::from(81));
        // expansion equals the scaled source equation
        let expanded = cf.expand();
        assert_eq!(expanded.terms, eq.terms);
        assert_eq!(expanded.constant, eq.constant);
    }

    #[test]
    fn complete_square_pell_shape() {
        let eq = eq_of("4*x^2 - 6*y^2 + 12*x + 108*y - 478 = 0");
        let cf = complete_square_reduce(&eq).unwrap();
        assert_eq!(cf.n, Int::one());
        let xs: Vec<_> = cf.squares.iter().collect();
        // (2x+3)^2 - 6(y-9)^2 = 1
        assert_eq!(xs[0].0, Int::one());
        assert_eq!(xs[0].2, Int::from(2));
        assert_eq!(xs[0].3, Int::from(3));
        assert_eq!(xs[1].0, Int::from(-6));
        assert_eq!(xs[1].3, Int::from(-9));
    }

    #[test]
    fn complete_square_infeasible_flag() {
        let eq = eq_of("x^2 + y^2 + 1 = 0");
        let cf = complete_square_reduce(&eq).unwrap();
        assert_eq!(cf.n, Int::from(-1));
        assert!(cf.squares.iter().all(|(c, ..)| c.is_positive()));
    }

    #[test]
    fn complete_square_rejects_mixed() {
        let eq = eq_of("x^2 - x*y + y^2 = 2");
        assert!(complete_square_reduce(&eq).is_none());
    }

    #[test]
    fn substitute_exponential() {
        let eq = eq_of("4^x - 3^y = 1");
        let sub = eq.substitute("x", &Int::from(1)).unwrap();
        // 4 - 3^y - 1 = 0  ->  -3^y + 3 = 0
        assert_eq!(sub.constant, Int::from(3));
        assert_eq!(sub.terms.len(), 1);
        assert!(sub.satisfied_by(&asg(&[("y", 1)])));
    }

    #[test]
    fn affine_map_round_trip() {
        let mut entries = BTreeMap::new();
        entries.insert("x".to_string(), (Int::from(2), Int::from(3)));
        entries.insert("y".to_string(), (Int::from(1), Int::from(-9)));
        let m = AffineMap { entries };
        for (x, y) in [(0i64, 0i64), (5, -7), (-4, 12)] {
            let a = asg(&[("x", x), ("y", y)]);
            let mapped = m.apply(&a);
            assert_eq!(m.invert_var("x", &mapped["x"]).unwrap(), Int::from(x));
            assert_eq!(m.invert_var("y", &mapped["y"]).unwrap(), Int::from(y));
        }
    }
}
