//! Structural solvers: factor-pair enumeration, discriminant analysis,
//! separation of variables, the Fermat eliminator, and isolated-linear
//! families.
//!
//! Factor-pair solving matches a product of affine forms against every
//! ordered signed factorization of the target, solving each induced linear
//! system; the returned set is complete because divisor enumeration is
//! exhaustive. Separation of variables isolates a linearly-occurring
//! variable as a ratio of univariate polynomials and pins the denominator to
//! the divisors of the (pseudo-)remainder.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::{Domain, Int, Monomial, NormalizedEquation, Var};
use crate::linear::{solve_system, AffineLatticeFamily, SystemOutcome};
use crate::modular;
use crate::verdict::{Assignment, FamilyExpr, FamilyParam, IndexedFamily};

// ---------------------------------------------------------------------------
// Divisor enumeration
// ---------------------------------------------------------------------------

/// Trial division to 10^6, then Pollard rho. Input must be nonzero.
pub fn factorize(n: &Int) -> Option<Vec<(u64, u32)>> {
    let mut m = n.abs().to_u64()?;
    if m == 0 {
        return None;
    }
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    for p in [2u64, 3, 5] {
        while m % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            m /= p;
        }
    }
    let mut d = 7u64;
    let steps = [4u64, 2, 4, 2, 4, 6, 2, 6]; // wheel mod 30
    let mut si = 0;
    while d <= 1_000_000 && d.checked_mul(d).map(|dd| dd <= m).unwrap_or(false) {
        while m % d == 0 {
            *out.entry(d).or_insert(0) += 1;
            m /= d;
        }
        d += steps[si];
        si = (si + 1) % steps.len();
    }
    if m > 1 {
        if m <= 1_000_000_000_000 || is_prime_u64(m) {
            let mut stack = vec![m];
            while let Some(x) = stack.pop() {
                if x == 1 {
                    continue;
                }
                if is_prime_u64(x) {
                    *out.entry(x).or_insert(0) += 1;
                } else {
                    let f = pollard_rho(x)?;
                    stack.push(f);
                    stack.push(x / f);
                }
            }
        } else {
            let f = pollard_rho(m)?;
            let mut stack = vec![f, m / f];
            while let Some(x) = stack.pop() {
                if x == 1 {
                    continue;
                }
                if is_prime_u64(x) {
                    *out.entry(x).or_insert(0) += 1;
                } else {
                    let f = pollard_rho(x)?;
                    stack.push(f);
                    stack.push(x / f);
                }
            }
        }
    }
    Some(out.into_iter().collect())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..20u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut steps = 0u64;
        while d == 1 && steps < 1 << 22 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
            steps += 1;
        }
        if d != n && d > 1 {
            return Some(d);
        }
    }
    None
}

/// All positive divisors, sorted.
pub fn divisors(n: &Int) -> Option<Vec<Int>> {
    let fs = factorize(n)?;
    let mut out = vec![Int::one()];
    for (p, e) in fs {
        let mut next = Vec::new();
        let mut pe = Int::one();
        for _ in 0..=e {
            for d in &out {
                next.push(d * &pe);
            }
            pe *= Int::from(p);
        }
        out = next;
    }
    out.sort();
    Some(out)
}

/// Ordered factorizations of n into k signed integer factors.
pub fn ordered_factorizations(n: &Int, k: usize, cap: usize) -> Option<Vec<Vec<Int>>> {
    debug_assert!(!n.is_zero());
    fn rec(n: &Int, k: usize, cap: usize, out: &mut Vec<Vec<Int>>, acc: &mut Vec<Int>) -> bool {
        if out.len() >= cap {
            return false;
        }
        if k == 1 {
            acc.push(n.clone());
            out.push(acc.clone());
            acc.pop();
            return true;
        }
        let divs = match divisors(n) {
            Some(d) => d,
            None => return false,
        };
        for d in divs {
            for s in [d.clone(), -d.clone()] {
                acc.push(s.clone());
                let rest = n / &s;
                if !rec(&rest, k - 1, cap, out, acc) {
                    acc.pop();
                    return false;
                }
                acc.pop();
            }
        }
        true
    }
    let mut out = Vec::new();
    let ok = rec(n, k, cap, &mut out, &mut Vec::new());
    if ok {
        Some(out)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Product forms and factor-pair solving
// ---------------------------------------------------------------------------

/// An affine integer form sum(c_v v) + constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub coeffs: BTreeMap<Var, Int>,
    pub constant: Int,
}

impl AffineForm {
    pub fn eval(&self, a: &Assignment) -> Int {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * &a[v];
        }
        acc
    }
}

/// scale * eq == prod(forms) - target, as an exact symbolic identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductForm {
    pub forms: Vec<AffineForm>,
    pub target: Int,
    pub scale: Int,
}

/// Combined finite/family outcome used by several solvers.
#[derive(Debug, Clone, Default)]
pub struct SolveSet {
    pub finite: Vec<Assignment>,
    pub families: Vec<IndexedFamily>,
    pub lattices: Vec<AffineLatticeFamily>,
    /// False when enumeration was cut short; the result is then a subset.
    pub complete: bool,
}

fn passes(domains: &BTreeMap<Var, Domain>, nonv: &BTreeSet<Var>, a: &Assignment) -> bool {
    a.iter().all(|(v, x)| {
        domains.get(v).map(|d| d.contains(x)).unwrap_or(true)
            && (!nonv.contains(v) || !x.is_zero())
    })
}

/// Enumerate all ordered factorizations of the target into one factor per
/// form and solve the induced linear systems. Requires target != 0.
pub fn factor_pair_solve(
    pf: &ProductForm,
    domains: &BTreeMap<Var, Domain>,
    nonv: &BTreeSet<Var>,
) -> Option<SolveSet> {
    debug_assert!(!pf.target.is_zero());
    let vars: Vec<Var> = pf
        .forms
        .iter()
        .flat_map(|f| f.coeffs.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let facts = ordered_factorizations(&pf.target, pf.forms.len(), 2_000_000)?;
    let mut out = SolveSet {
        complete: true,
        ..Default::default()
    };
    let mut seen = BTreeSet::new();
    for f in facts {
        let a: Vec<Vec<Int>> = pf
            .forms
            .iter()
            .map(|form| {
                vars.iter()
                    .map(|v| form.coeffs.get(v).cloned().unwrap_or_else(Int::zero))
                    .collect()
            })
            .collect();
        let b: Vec<Int> = pf
            .forms
            .iter()
            .zip(&f)
            .map(|(form, fi)| fi - &form.constant)
            .collect();
        match solve_system(&a, &b) {
            SystemOutcome::Inconsistent { .. } => {}
            SystemOutcome::Family { particular, basis } => {
                if basis.is_empty() {
                    let asg: Assignment = vars.iter().cloned().zip(particular).collect();
                    if passes(domains, nonv, &asg) && seen.insert(render_key(&asg)) {
                        out.finite.push(asg);
                    }
                } else {
                    // dependent forms: a factorization admits a lattice of
                    // solutions
                    out.lattices.push(AffineLatticeFamily {
                        vars: vars.clone(),
                        particular,
                        basis,
                    });
                }
            }
        }
    }
    out.finite = crate::verdict::sort_solutions(std::mem::take(&mut out.finite));
    Some(out)
}

fn render_key(a: &Assignment) -> Vec<(Var, Int)> {
    a.iter().map(|(v, x)| (v.clone(), x.clone())).collect()
}

/// Bilinear equations a xy + b x + c y + d = 0 (a != 0) rewrite to
/// (a x + c)(a y + b) = cb - ad with scale a.
pub fn bilinear_product(eq: &NormalizedEquation) -> Option<ProductForm> {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    if vars.len() != 2 {
        return None;
    }
    let (x, y) = (&vars[0], &vars[1]);
    let mut a = Int::zero();
    let mut b = Int::zero();
    let mut c = Int::zero();
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() {
            return None;
        }
        let px = t.powers.get(x).copied().unwrap_or(0);
        let py = t.powers.get(y).copied().unwrap_or(0);
        match (px, py) {
            (1, 1) => a += &t.coeff,
            (1, 0) => b += &t.coeff,
            (0, 1) => c += &t.coeff,
            _ => return None,
        }
    }
    if a.is_zero() {
        return None;
    }
    let d = eq.constant.clone();
    let target = &c * &b - &a * &d;
    let mut f1 = BTreeMap::new();
    f1.insert(x.clone(), a.clone());
    let mut f2 = BTreeMap::new();
    f2.insert(y.clone(), a.clone());
    Some(ProductForm {
        forms: vec![
            AffineForm {
                coeffs: f1,
                constant: c,
            },
            AffineForm {
                coeffs: f2,
                constant: b,
            },
        ],
        target,
        scale: a,
    })
}

/// Mixed-term-free quadratics whose completed-square form is a difference of
/// two squares rewrite to (A - B)(A + B) = N.
pub fn two_square_product(eq: &NormalizedEquation) -> Option<ProductForm> {
    let cf = crate::expr::complete_square_reduce(eq)?;
    if cf.squares.len() != 2 {
        return None;
    }
    let (c1, v1, a1, b1) = cf.squares[0].clone();
    let (c2, v2, a2, b2) = cf.squares[1].clone();
    let (pos, neg) = if c1.is_positive() && c2.is_negative() {
        ((c1, v1, a1, b1), (-c2, v2, a2, b2))
    } else if c2.is_positive() && c1.is_negative() {
        ((c2, v2, a2, b2), (-c1, v1, a1, b1))
    } else {
        return None;
    };
    // scale by pos.c: (pos.c (a v + b))^2 - pos.c*neg.c (a' v' + b')^2
    let prod = &pos.0 * &neg.0;
    if !crate::pell::is_square(&prod) {
        return None;
    }
    let t = prod.sqrt();
    // A = pos.c * (a1 v1 + b1), B = t * (a2 v2 + b2); A^2 - B^2 = pos.c * N
    let n = &pos.0 * &cf.n;
    if n.is_zero() {
        return None;
    }
    let mk = |s1: &Int, v1: &Var, a1: &Int, b1: &Int, s2: &Int, v2: &Var, a2: &Int, b2: &Int| {
        let mut coeffs = BTreeMap::new();
        let ca = s1 * a1;
        if !ca.is_zero() {
            coeffs.insert(v1.clone(), ca);
        }
        let cb = s2 * a2;
        if !cb.is_zero() {
            *coeffs.entry(v2.clone()).or_insert_with(Int::zero) += cb;
        }
        AffineForm {
            coeffs,
            constant: s1 * b1 + s2 * b2,
        }
    };
    let a_minus_b = mk(&pos.0, &pos.1, &pos.2, &pos.3, &-t.clone(), &neg.1, &neg.2, &neg.3);
    let a_plus_b = mk(&pos.0, &pos.1, &pos.2, &pos.3, &t, &neg.1, &neg.2, &neg.3);
    Some(ProductForm {
        forms: vec![a_minus_b, a_plus_b],
        target: n,
        scale: &cf.scale * &pos.0,
    })
}

/// Zero-target product split: equations whose terms share a common variable
/// monomial mu with zero constant factor as mu * g = 0.
#[derive(Debug, Clone)]
pub struct CommonFactorSplit {
    /// Variables of the common monomial (each with its multiplicity).
    pub mu: BTreeMap<Var, u32>,
    /// The cofactor equation g (as a normalized equation over the same vars).
    pub cofactor: NormalizedEquation,
    /// Original constant: mu * g = -constant.
    pub constant: Int,
}

/// Extract a common variable-monomial factor across all terms. Applicable
/// when the equation has no exponentials/factorials and at least one shared
/// variable.
pub fn common_factor_split(eq: &NormalizedEquation) -> Option<CommonFactorSplit> {
    if eq.terms.is_empty() {
        return None;
    }
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() {
            return None;
        }
    }
    let mut mu: BTreeMap<Var, u32> = eq.terms[0].powers.clone();
    for t in &eq.terms[1..] {
        let mut next = BTreeMap::new();
        for (v, e) in &mu {
            if let Some(e2) = t.powers.get(v) {
                next.insert(v.clone(), *e.min(e2));
            }
        }
        mu = next;
        if mu.is_empty() {
            return None;
        }
    }
    let cofactor_terms: Vec<Monomial> = eq
        .terms
        .iter()
        .map(|t| {
            let mut m = t.clone();
            for (v, e) in &mu {
                let left = m.powers[v] - e;
                if left == 0 {
                    m.powers.remove(v);
                } else {
                    m.powers.insert(v.clone(), left);
                }
            }
            m
        })
        .collect();
    let cofactor = NormalizedEquation::from_terms(cofactor_terms);
    Some(CommonFactorSplit {
        mu,
        cofactor,
        constant: eq.constant.clone(),
    })
}

/// Solve mu * g = -c0 with c0 != 0 and univariate g: the cofactor must be a
/// divisor of -c0, each divisor pins the cofactor variable to polynomial
/// roots, and the monomial equation fixes the rest.
pub fn common_factor_solve(
    split: &CommonFactorSplit,
    domains: &BTreeMap<Var, Domain>,
    nonv: &BTreeSet<Var>,
) -> Option<SolveSet> {
    if split.constant.is_zero() {
        return None;
    }
    let gvars: Vec<Var> = split.cofactor.variables().into_iter().collect();
    if gvars.len() > 1 {
        return None;
    }
    let target = -split.constant.clone();
    let divs = divisors(&target)?;
    let mut out = SolveSet {
        complete: true,
        ..Default::default()
    };
    let mut seen = BTreeSet::new();
    for d in &divs {
        for d2 in [d.clone(), -d.clone()] {
            // cofactor = d2, mu = target / d2
            let mu_val = &target / &d2;
            let g_assignments: Vec<Assignment> = if gvars.is_empty() {
                let gc = split.cofactor.constant.clone();
                if gc == d2 {
                    vec![Assignment::new()]
                } else {
                    vec![]
                }
            } else {
                let v = &gvars[0];
                let poly = univariate_poly(&split.cofactor, v)?;
                let mut shifted = poly.clone();
                shifted[0] -= &d2;
                integer_roots(&shifted)
                    .into_iter()
                    .map(|r| {
                        let mut a = Assignment::new();
                        a.insert(v.clone(), r);
                        a
                    })
                    .collect()
            };
            for base in g_assignments {
                // solve mu(vars) = mu_val given the fixed values in base
                for asg in solve_monomial_equation(&split.mu, &mu_val, &base) {
                    if passes(domains, nonv, &asg) && seen.insert(render_key(&asg)) {
                        out.finite.push(asg);
                    }
                }
            }
        }
    }
    out.finite = crate::verdict::sort_solutions(std::mem::take(&mut out.finite));
    Some(out)
}

/// All assignments of the monomial's variables with prod v^e = value,
/// extending the given partial assignment.
fn solve_monomial_equation(
    mu: &BTreeMap<Var, u32>,
    value: &Int,
    base: &Assignment,
) -> Vec<Assignment> {
    let free: Vec<(&Var, u32)> = mu
        .iter()
        .filter(|(v, _)| !base.contains_key(*v))
        .map(|(v, e)| (v, *e))
        .collect();
    let mut fixed = value.clone();
    for (v, e) in mu {
        if let Some(x) = base.get(v) {
            let p = x.pow(*e);
            if p.is_zero() {
                return vec![]; // zero factors are handled by the zero split
            }
            let (q, r) = fixed.div_rem(&p);
            if !r.is_zero() {
                return vec![];
            }
            fixed = q;
        }
    }
    let mut out = Vec::new();
    fn rec(
        free: &[(&Var, u32)],
        value: &Int,
        acc: &mut Assignment,
        out: &mut Vec<Assignment>,
        base: &Assignment,
    ) {
        if free.is_empty() {
            if value.is_one() {
                let mut a = base.clone();
                a.extend(acc.clone());
                out.push(a);
            }
            return;
        }
        let (v, e) = (free[0].0, free[0].1);
        if value.is_zero() {
            return; // zero product handled by the zero-split path
        }
        if let Some(divs) = divisors(value) {
            for d in divs {
                for s in [d.clone(), -d] {
                    let p = s.pow(e);
                    let (q, r) = value.div_rem(&p);
                    if r.is_zero() {
                        acc.insert(v.clone(), s);
                        rec(&free[1..], &q, acc, out, base);
                        acc.remove(v);
                    }
                }
            }
        }
    }
    if free.is_empty() {
        if fixed.is_one() {
            out.push(base.clone());
        }
        return out;
    }
    rec(&free, &fixed, &mut Assignment::new(), &mut out, base);
    out
}

// ---------------------------------------------------------------------------
// Univariate polynomial helpers
// ---------------------------------------------------------------------------

/// Coefficients low-to-high of the equation seen as univariate in v.
pub fn univariate_poly(eq: &NormalizedEquation, v: &str) -> Option<Vec<Int>> {
    let mut coeffs: Vec<Int> = vec![eq.constant.clone()];
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() {
            return None;
        }
        let e = match t.powers.len() {
            0 => 0,
            1 => {
                let (tv, e) = t.powers.iter().next().unwrap();
                if tv != v {
                    return None;
                }
                *e as usize
            }
            _ => return None,
        };
        if coeffs.len() <= e {
            coeffs.resize(e + 1, Int::zero());
        }
        coeffs[e] += &t.coeff;
    }
    while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
        coeffs.pop();
    }
    Some(coeffs)
}

pub fn poly_eval(p: &[Int], x: &Int) -> Int {
    let mut acc = Int::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_degree(p: &[Int]) -> usize {
    let mut d = p.len();
    while d > 0 && p[d - 1].is_zero() {
        d -= 1;
    }
    d.saturating_sub(1)
}

/// Integer roots of p, exact and exhaustive.
pub fn integer_roots(p: &[Int]) -> Vec<Int> {
    let deg = poly_degree(p);
    if deg == 0 {
        return Vec::new(); // constant: either no roots or identically zero
    }
    let mut p = p[..=deg].to_vec();
    let mut roots = Vec::new();
    // strip powers of x
    while p[0].is_zero() {
        if !roots.contains(&Int::zero()) {
            roots.push(Int::zero());
        }
        p.remove(0);
        if p.len() == 1 {
            break;
        }
    }
    if p.len() > 1 {
        if let Some(divs) = divisors(&p[0]) {
            for d in divs {
                for s in [d.clone(), -d] {
                    if poly_eval(&p, &s).is_zero() && !roots.contains(&s) {
                        roots.push(s.clone());
                    }
                }
            }
        } else {
            // trailing coefficient too large to factor: fall back to a
            // Cauchy-bound scan
            let lead = p.last().unwrap().abs();
            let max_c = p.iter().map(|c| c.abs()).max().unwrap();
            let bound = (max_c / lead + Int::one()).to_i64().unwrap_or(1 << 20);
            let mut x = -Int::from(bound);
            while x <= Int::from(bound) {
                if poly_eval(&p, &x).is_zero() && !roots.contains(&x) {
                    roots.push(x.clone());
                }
                x += 1;
            }
        }
    }
    roots.sort();
    roots
}

// ---------------------------------------------------------------------------
// Separation of variables
// ---------------------------------------------------------------------------

/// Separation outcome: candidates are exhaustive.
#[derive(Debug, Clone)]
pub enum SeparationOutcome {
    Finite(Vec<Assignment>),
    /// q and r share all roots: pivot = -r/q is a polynomial identity and
    /// every x gives a solution (not produced by the corpus; reported so the
    /// caller can fall back rather than claim completeness).
    NotFinite,
}

/// Solve equations linear in one variable y with univariate coefficient
/// q(x) and remainder r(x): y * q(x) + r(x) = 0. Divisibility pins q(x) to
/// the divisors of the pseudo-remainder of r by q.
pub fn separation_solve(
    eq: &NormalizedEquation,
    domains: &BTreeMap<Var, Domain>,
    nonv: &BTreeSet<Var>,
) -> Option<SeparationOutcome> {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    if vars.len() != 2 {
        return None;
    }
    for pivot_idx in 0..2 {
        let y = &vars[pivot_idx];
        let x = &vars[1 - pivot_idx];
        // split eq into y * q(x) + r(x); y must occur only linearly
        let mut q_terms: Vec<Monomial> = Vec::new();
        let mut r_terms: Vec<Monomial> = Vec::new();
        let mut ok = true;
        for t in &eq.terms {
            if !t.exponentials.is_empty() || !t.factorials.is_empty() {
                ok = false;
                break;
            }
            match t.powers.get(y) {
                None => r_terms.push(t.clone()),
                Some(1) => {
                    let mut m = t.clone();
                    m.powers.remove(y);
                    q_terms.push(m);
                }
                Some(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || q_terms.is_empty() {
            continue;
        }
        let q_eq = NormalizedEquation::from_terms(q_terms);
        let mut r_terms2 = r_terms;
        r_terms2.push(Monomial::constant(eq.constant.clone()));
        let r_eq = NormalizedEquation::from_terms(r_terms2);
        let q = match univariate_poly(&q_eq, x) {
            Some(p) => p,
            None => continue,
        };
        let r = match univariate_poly(&r_eq, x) {
            Some(p) => p,
            None => continue,
        };
        let dq = poly_degree(&q);
        let dr = poly_degree(&r);
        let r_zero = r.iter().all(|c| c.is_zero());
        if r_zero {
            return Some(SeparationOutcome::NotFinite);
        }

        let mut candidates: Vec<Int> = Vec::new();
        if dr < dq {
            // |q(x)| > |r(x)| beyond T: scan |x| <= T
            let qs: Int = q.iter().take(dq).map(|c| c.abs()).sum();
            let rs: Int = r.iter().map(|c| c.abs()).sum();
            let lead = q[dq].abs();
            let t = ((qs + rs) / lead) + Int::one();
            let bound = t.to_i64().unwrap_or(1 << 16).min(1 << 16);
            let mut xv = -Int::from(bound);
            while xv <= Int::from(bound) {
                candidates.push(xv.clone());
                xv += 1;
            }
        } else {
            // pseudo-remainder: lc(q)^(dr-dq+1) * r mod q has degree < dq and
            // q(x) | r(x) implies q(x) | rho(x)
            let rho = pseudo_rem(&r, &q);
            let rho_zero = rho.iter().all(|c| c.is_zero());
            if rho_zero {
                return Some(SeparationOutcome::NotFinite);
            }
            if poly_degree(&rho) == 0 {
                // q(x) must divide the constant rho
                if let Some(divs) = divisors(&rho[0]) {
                    for d in divs {
                        for s in [d.clone(), -d] {
                            let mut shifted = q.clone();
                            shifted[0] -= &s;
                            candidates.extend(integer_roots(&shifted));
                        }
                    }
                } else {
                    continue;
                }
            } else {
                // |q(x)| <= |rho(x)| region is finite since deg rho < deg q
                let qs: Int = q.iter().take(dq).map(|c| c.abs()).sum();
                let rs: Int = rho.iter().map(|c| c.abs()).sum();
                let lead = q[dq].abs();
                let t = ((qs + rs) / lead) + Int::one();
                let bound = t.to_i64().unwrap_or(1 << 16).min(1 << 16);
                let mut xv = -Int::from(bound);
                while xv <= Int::from(bound) {
                    candidates.push(xv.clone());
                    xv += 1;
                }
            }
        }
        candidates.sort();
        candidates.dedup();

        let mut finite = Vec::new();
        for xv in candidates {
            let qv = poly_eval(&q, &xv);
            let rv = poly_eval(&r, &xv);
            if qv.is_zero() {
                if rv.is_zero() {
                    // y free: infinite family along x = xv
                    return Some(SeparationOutcome::NotFinite);
                }
                continue;
            }
            let (yv, rem) = (-rv).div_rem(&qv);
            if rem.is_zero() {
                let mut a = Assignment::new();
                a.insert(x.clone(), xv);
                a.insert(y.clone(), yv);
                if passes(domains, nonv, &a) {
                    finite.push(a);
                }
            }
        }
        return Some(SeparationOutcome::Finite(crate::verdict::sort_solutions(
            finite,
        )));
    }
    None
}

/// lc(q)^(deg r - deg q + 1) * r reduced modulo q.
fn pseudo_rem(r: &[Int], q: &[Int]) -> Vec<Int> {
    let dq = poly_degree(q);
    let lead = q[dq].clone();
    let mut r = r.to_vec();
    loop {
        let dr = poly_degree(&r);
        if dr < dq || r.iter().all(|c| c.is_zero()) {
            return r;
        }
        // r := lead * r - r[dr] * q * x^(dr-dq); no content reduction, the
        // divisor target must stay exact
        let top = r[dr].clone();
        for c in &mut r {
            *c *= &lead;
        }
        for i in 0..=dq {
            r[i + dr - dq] -= &top * &q[i];
        }
    }
}

// ---------------------------------------------------------------------------
// Discriminant analysis
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum DiscriminantOutcome {
    /// Downward discriminant: complete finite scan.
    Finite(Vec<Assignment>),
    /// Discriminant identically zero: the equation factors as a perfect
    /// square of a linear form; solutions form the lattice of 2a x + b(y)=0.
    LinearSquare(AffineLatticeFamily),
    /// Upward nonsquare leading coefficient: k^2 - d y^2 = n Pell route;
    /// the original equation has infinitely many solutions iff the Pell
    /// family back-maps.
    PellRoute { d: Int, n: Int },
}

/// Treat a two-variable quadratic as univariate in `pivot` and analyze the
/// discriminant. Routes: downward parabola -> finite range scan; square
/// leading coefficient -> factor pairs (handled through the same scan after
/// bounding); nonsquare positive leading -> Pell.
pub fn discriminant_solve(
    eq: &NormalizedEquation,
    domains: &BTreeMap<Var, Domain>,
    nonv: &BTreeSet<Var>,
) -> Option<DiscriminantOutcome> {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    if vars.len() != 2 {
        return None;
    }
    for pivot_idx in 0..2 {
        let x = &vars[pivot_idx];
        let y = &vars[1 - pivot_idx];
        // a(y) x^2 + b(y) x + c(y) with a constant, b/c of degree <= 2
        let mut a_poly = vec![Int::zero(); 3];
        let mut b_poly = vec![Int::zero(); 3];
        let mut c_poly = vec![Int::zero(); 3];
        c_poly[0] = eq.constant.clone();
        let mut ok = true;
        for t in &eq.terms {
            if !t.exponentials.is_empty() || !t.factorials.is_empty() {
                return None;
            }
            let px = t.powers.get(x).copied().unwrap_or(0);
            let py = t.powers.get(y).copied().unwrap_or(0) as usize;
            if py > 2 {
                ok = false;
                break;
            }
            match px {
                0 => c_poly[py] += &t.coeff,
                1 => b_poly[py] += &t.coeff,
                2 => a_poly[py] += &t.coeff,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if !a_poly[1].is_zero() || !a_poly[2].is_zero() || a_poly[0].is_zero() {
            continue; // need constant nonzero a
        }
        let a = a_poly[0].clone();
        // disc(y) = b(y)^2 - 4 a c(y)
        let mut disc = vec![Int::zero(); 5];
        for i in 0..3 {
            for j in 0..3 {
                disc[i + j] += &b_poly[i] * &b_poly[j];
            }
        }
        for (i, c) in c_poly.iter().enumerate() {
            disc[i] -= Int::from(4) * &a * c;
        }
        while disc.len() > 1 && disc.last().unwrap().is_zero() {
            disc.pop();
        }
        let dd = poly_degree(&disc);
        let disc_zero = disc.iter().all(|c| c.is_zero());
        if disc_zero {
            // perfect square: 2a x + b(y) = 0 is the solution set
            // (requires b linear for a lattice)
            if b_poly[2].is_zero() {
                let coeffs = vec![
                    (x.clone(), Int::from(2) * &a),
                    (y.clone(), b_poly[1].clone()),
                ];
                if let crate::linear::LinearOutcome::Family(f) =
                    crate::linear::solve_linear(&coeffs, &-b_poly[0].clone())
                {
                    return Some(DiscriminantOutcome::LinearSquare(f));
                }
            }
            return None;
        }
        if dd == 2 && disc[2].is_negative() {
            // route (a): finite y range
            let (lo, hi) = parabola_range(&disc)?;
            let mut out = Vec::new();
            let mut yv = lo;
            while yv <= hi {
                let dv = poly_eval(&disc, &yv);
                if !dv.is_negative() && crate::pell::is_square(&dv) {
                    let k = dv.sqrt();
                    let bv = poly_eval(&b_poly, &yv);
                    for s in [k.clone(), -k.clone()] {
                        let num = -&bv + s;
                        let den = Int::from(2) * &a;
                        let (xv, rem) = num.div_rem(&den);
                        if rem.is_zero() {
                            let mut asg = Assignment::new();
                            asg.insert(x.clone(), xv);
                            asg.insert(y.clone(), yv.clone());
                            if passes(domains, nonv, &asg) {
                                out.push(asg);
                            }
                        }
                    }
                }
                yv += 1;
            }
            return Some(DiscriminantOutcome::Finite(crate::verdict::sort_solutions(
                out,
            )));
        }
        if dd == 2 && disc[2].is_positive() {
            let d2c = disc[2].clone();
            if !crate::pell::is_square(&d2c) {
                if disc[1].is_zero() {
                    // k^2 = d y^2 + disc0 -> k^2 - d y^2 = disc0
                    return Some(DiscriminantOutcome::PellRoute {
                        d: d2c,
                        n: disc[0].clone(),
                    });
                }
                continue; // shifted Pell: other solvers apply
            }
            // square leading coefficient q^2: complete the square,
            // (2qk)^2 - (2q^2 y + p)^2 = 4 q^2 r - p^2, factor pairs
            let q = d2c.sqrt();
            let p = disc[1].clone();
            let r = disc[0].clone();
            let t = Int::from(4) * &q * &q * &r - &p * &p;
            if t.is_zero() {
                continue; // disc is a perfect square of a linear form
            }
            let mut out = Vec::new();
            let two_q = Int::from(2) * &q;
            let two_q2 = Int::from(2) * &q * &q;
            if let Some(divs) = divisors(&t) {
                for d1 in divs {
                    for d1s in [d1.clone(), -d1.clone()] {
                        let d2 = &t / &d1s;
                        // 2qk - u = d1s, 2qk + u = d2 with u = 2q^2 y + p
                        let sum = &d1s + &d2;
                        let diff = &d2 - &d1s;
                        let (kv, r1) = sum.div_rem(&two_q);
                        let (uv, r2) = diff.div_rem(&Int::from(2));
                        if !r1.is_zero() || !(&kv % Int::from(2)).is_zero() || !r2.is_zero() {
                            // kv must be even: 4qk = sum
                            continue;
                        }
                        let kv = kv / Int::from(2);
                        let (yv, r3) = (&uv - &p).div_rem(&two_q2);
                        if !r3.is_zero() {
                            continue;
                        }
                        let bv = poly_eval(&b_poly, &yv);
                        for kk in [kv.clone(), -kv.clone()] {
                            let num = -&bv + kk;
                            let den = Int::from(2) * &a;
                            let (xv, rem) = num.div_rem(&den);
                            if rem.is_zero() {
                                let mut asg = Assignment::new();
                                asg.insert(x.clone(), xv);
                                asg.insert(y.clone(), yv.clone());
                                if passes(domains, nonv, &asg) {
                                    out.push(asg);
                                }
                            }
                        }
                    }
                }
                return Some(DiscriminantOutcome::Finite(crate::verdict::sort_solutions(
                    out,
                )));
            }
        }
        if dd <= 1 {
            continue; // linear discriminant: unbounded, other solvers apply
        }
    }
    None
}

/// Integer range where the downward quadratic disc(y) >= 0.
fn parabola_range(disc: &[Int]) -> Option<(Int, Int)> {
    let p = &disc[2];
    let q = disc.get(1).cloned().unwrap_or_else(Int::zero);
    let r = disc.first().cloned().unwrap_or_else(Int::zero);
    let det = &q * &q - Int::from(4) * p * &r;
    if det.is_negative() {
        return None;
    }
    let s = det.sqrt();
    let two_p = Int::from(2) * p;
    let mut lo = (-&q - &s - Int::one()).div_ceil(&two_p) - 1;
    let mut hi = (-&q + &s + Int::one()).div_floor(&two_p) + 1;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let eval = |t: &Int| p * t * t + &q * t + &r;
    while lo <= hi && eval(&lo).is_negative() {
        lo += 1;
    }
    while hi >= lo && eval(&hi).is_negative() {
        hi -= 1;
    }
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

// ---------------------------------------------------------------------------
// Fermat eliminator
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FltResult {
    pub exponent: u32,
    pub rewrite: String,
    /// Exact solution set of the zero-component cases.
    pub finite: Vec<Assignment>,
    pub families: Vec<IndexedFamily>,
    /// True when the zero cases were solved completely.
    pub complete: bool,
}

/// Recognize A^n ± B^n = C^n with n >= 3 (components are c v^j powers or a
/// constant) and solve the zero-component cases exactly. By the theorem all
/// solutions have a zero component.
pub fn flt_check(eq: &NormalizedEquation, domains: &BTreeMap<Var, Domain>) -> Option<FltResult> {
    // collect up to 3 power monomials plus optional constant
    let mut comps: Vec<(Int, Var, u32)> = Vec::new(); // (coeff, var, exponent)
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() || t.powers.len() != 1 {
            return None;
        }
        let (v, e) = t.powers.iter().next().unwrap();
        comps.push((t.coeff.clone(), v.clone(), *e));
    }
    let has_const = !eq.constant.is_zero();
    if comps.len() + usize::from(has_const) != 3 || comps.len() < 2 {
        return None;
    }
    // distinct variables only
    let vs: BTreeSet<&Var> = comps.iter().map(|(_, v, _)| v).collect();
    if vs.len() != comps.len() {
        return None;
    }
    // candidate n: divisors of gcd of exponents, largest first
    let mut g = 0u32;
    for (_, _, e) in &comps {
        g = num_integer::gcd(g, *e);
    }
    let mut best: Option<u32> = None;
    let mut n = g;
    'outer: while n >= 3 {
        if g.is_multiple_of(n) {
            for (c, _, _) in &comps {
                if !is_perfect_power(&c.abs(), n) {
                    n -= 1;
                    continue 'outer;
                }
            }
            if has_const && !is_perfect_power(&eq.constant.abs(), n) {
                n -= 1;
                continue;
            }
            // signs must be mixed for even n
            if n.is_multiple_of(2) {
                let mut signs: Vec<bool> = comps.iter().map(|(c, ..)| c.is_positive()).collect();
                if has_const {
                    signs.push(eq.constant.is_positive());
                }
                if signs.iter().all(|s| *s) || signs.iter().all(|s| !*s) {
                    n -= 1;
                    continue;
                }
            }
            best = Some(n);
            break;
        }
        n -= 1;
    }
    let n = best?;

    // rewrite string, for the certificate
    let rewrite = {
        let parts: Vec<String> = comps
            .iter()
            .map(|(c, v, e)| {
                let gamma = nth_root_exact(&c.abs(), n).unwrap();
                let j = e / n;
                let sign = if c.is_negative() { "-" } else { "+" };
                if j == 1 {
                    format!("{sign}({gamma}*{v})^{n}")
                } else {
                    format!("{sign}({gamma}*{v}^{j})^{n}")
                }
            })
            .collect();
        let mut s = parts.join(" ");
        if has_const {
            let t = nth_root_exact(&eq.constant.abs(), n).unwrap();
            let sign = if eq.constant.is_negative() { "-" } else { "+" };
            s.push_str(&format!(" {sign}{t}^{n}"));
        }
        s.push_str(" = 0");
        s
    };

    // zero-component cases: substitute each variable component = 0
    let mut finite = Vec::new();
    let mut families = Vec::new();
    let mut complete = true;
    for (_, v, _) in &comps {
        let sub = eq.substitute(v, &Int::zero()).ok()?;
        match solve_two_power(&sub, domains) {
            Some(TwoPowerOutcome::Finite(sols)) => {
                for mut a in sols {
                    a.insert(v.clone(), Int::zero());
                    if passes(domains, &BTreeSet::new(), &a) {
                        finite.push(a);
                    }
                }
            }
            Some(TwoPowerOutcome::Families(fs)) => {
                for mut f in fs {
                    f.assignments
                        .insert(v.clone(), FamilyExpr::Const(Int::zero()));
                    families.push(f);
                }
            }
            None => complete = false,
        }
    }
    Some(FltResult {
        exponent: n,
        rewrite,
        finite: crate::verdict::sort_solutions(finite),
        families,
        complete,
    })
}

fn is_perfect_power(n: &Int, k: u32) -> bool {
    if n.is_zero() {
        return true;
    }
    let r = n.nth_root(k);
    r.pow(k) == *n
}

fn nth_root_exact(n: &Int, k: u32) -> Option<Int> {
    let r = n.nth_root(k);
    if r.pow(k) == *n {
        Some(r)
    } else {
        None
    }
}

enum TwoPowerOutcome {
    Finite(Vec<Assignment>),
    Families(Vec<IndexedFamily>),
}

/// Complete solutions of equations with at most two single-variable power
/// monomials plus a constant.
fn solve_two_power(
    eq: &NormalizedEquation,
    domains: &BTreeMap<Var, Domain>,
) -> Option<TwoPowerOutcome> {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    match vars.len() {
        0 => {
            if eq.constant.is_zero() {
                // identically zero after substitution: not expected from FLT
                // shapes; treat as not solvable here
                None
            } else {
                Some(TwoPowerOutcome::Finite(vec![]))
            }
        }
        1 => {
            let poly = univariate_poly(eq, &vars[0])?;
            let roots = integer_roots(&poly);
            Some(TwoPowerOutcome::Finite(
                roots
                    .into_iter()
                    .map(|r| {
                        let mut a = Assignment::new();
                        a.insert(vars[0].clone(), r);
                        a
                    })
                    .collect(),
            ))
        }
        2 => {
            // c1 u^a + c2 w^b = 0
            if !eq.constant.is_zero() || eq.terms.len() != 2 {
                return None;
            }
            let (c1, u, a) = {
                let t = &eq.terms[0];
                let (v, e) = t.powers.iter().next().unwrap();
                (t.coeff.clone(), v.clone(), *e)
            };
            let (c2, w, b) = {
                let t = &eq.terms[1];
                let (v, e) = t.powers.iter().next().unwrap();
                (t.coeff.clone(), v.clone(), *e)
            };
            let mut families = Vec::new();
            let zero = {
                let mut f = BTreeMap::new();
                f.insert(u.clone(), FamilyExpr::Const(Int::zero()));
                f.insert(w.clone(), FamilyExpr::Const(Int::zero()));
                IndexedFamily {
                    params: vec![],
                    assignments: f,
                    integrality_note: "zero component".into(),
                }
            };
            if a == b {
                // u^a = e w^a with e = -c2/c1: integer solutions exist only
                // when e is an a-th power (valuation balance), giving
                // u = rho w (odd a: single rho; even a: ±rho when e > 0)
                let (q, r) = (-c2.clone()).div_rem(&c1);
                if !r.is_zero() {
                    // try w side: w^a = e' u^a
                    let (q2, r2) = (-c1.clone()).div_rem(&c2);
                    if !r2.is_zero() {
                        return Some(TwoPowerOutcome::Finite(vec![]));
                    }
                    return two_power_same_exp(&w, &u, a, &q2, zero).map(TwoPowerOutcome::Families);
                }
                return two_power_same_exp(&u, &w, a, &q, zero).map(TwoPowerOutcome::Families);
            }
            // unit coefficients: u^a = ± w^b via coprime-exponent
            // parametrization
            if c1.abs().is_one() && c2.abs().is_one() {
                let g = num_integer::gcd(a, b);
                let (a1, b1) = (a / g, b / g);
                // (u^a1)^g = s (w^b1)^g with s = -c2/c1 = ±1
                let s_pos = (c1.is_positive()) != (c2.is_positive());
                // for even g, s must be positive
                if g % 2 == 0 && !s_pos {
                    // u^a = -w^b with both sides forced nonnegative: both 0
                    families.push(zero);
                    return Some(TwoPowerOutcome::Families(families));
                }
                // u^a1 = sigma w^b1 with sigma = ±1 (odd g) or both signs
                // (even g); coprime exponents parametrize u = sigma_u t^b1,
                // w = sigma_w t^a1
                let sigmas: Vec<(Int, Int)> = sign_pairs(a1, b1, s_pos, g);
                for (su, sw) in sigmas {
                    let mut f = BTreeMap::new();
                    f.insert(
                        u.clone(),
                        FamilyExpr::Mul(vec![
                            FamilyExpr::Const(su.clone()),
                            FamilyExpr::ParamPow { param: 0, exp: b1 },
                        ]),
                    );
                    f.insert(
                        w.clone(),
                        FamilyExpr::Mul(vec![
                            FamilyExpr::Const(sw.clone()),
                            FamilyExpr::ParamPow { param: 0, exp: a1 },
                        ]),
                    );
                    families.push(IndexedFamily {
                        params: vec![FamilyParam {
                            name: "t".into(),
                            nonneg: domains
                                .get(&u)
                                .map(|d| d.nonnegative())
                                .unwrap_or(false)
                                || domains.get(&w).map(|d| d.nonnegative()).unwrap_or(false),
                        }],
                        assignments: f,
                        integrality_note: format!(
                            "coprime exponents {a1},{b1}: valuations force the parametrization"
                        ),
                    });
                }
                return Some(TwoPowerOutcome::Families(families));
            }
            None
        }
        _ => None,
    }
}

/// Families for u^a = q w^a.
fn two_power_same_exp(
    u: &Var,
    w: &Var,
    a: u32,
    q: &Int,
    zero: IndexedFamily,
) -> Option<Vec<IndexedFamily>> {
    let mut families = vec![zero];
    if q.is_zero() {
        return Some(families);
    }
    if a.is_multiple_of(2) && q.is_negative() {
        return Some(families); // u^a = negative * w^a: only zeros
    }
    if let Some(rho) = nth_root_exact(&q.abs(), a) {
        let rhos: Vec<Int> = if a % 2 == 1 {
            let r = if q.is_negative() { -rho } else { rho };
            vec![r]
        } else {
            vec![rho.clone(), -rho]
        };
        for r in rhos {
            let mut f = BTreeMap::new();
            f.insert(
                u.clone(),
                FamilyExpr::Mul(vec![
                    FamilyExpr::Const(r.clone()),
                    FamilyExpr::Param(0),
                ]),
            );
            f.insert(w.clone(), FamilyExpr::Param(0));
            families.push(IndexedFamily {
                params: vec![FamilyParam {
                    name: "t".into(),
                    nonneg: false,
                }],
                assignments: f,
                integrality_note: format!("{}^{a} = {q} {}^{a} iff {} = {r} {}", u, w, u, w),
            });
        }
    }
    // q not a perfect a-th power: valuation balance leaves only zeros
    Some(families)
}

fn sign_pairs(a1: u32, b1: u32, s_pos: bool, g: u32) -> Vec<(Int, Int)> {
    // enumerate sigma_u, sigma_w in {±1} with sigma_u^a = s sigma_w^b
    // effective over the parametrization u = su t^b1, w = sw t^a1:
    // (su)^(a1 g) t^(a1 b1 g) = s (sw)^(b1 g) t^(a1 b1 g)
    let mut out = Vec::new();
    for su in [1i64, -1] {
        for sw in [1i64, -1] {
            let lhs = su.pow(a1 * g);
            let rhs = if s_pos { 1 } else { -1 } * sw.pow(b1 * g);
            if lhs == rhs {
                out.push((Int::from(su), Int::from(sw)));
            }
        }
    }
    // dedupe parametrizations equal under t -> -t
    let mut keep: Vec<(Int, Int)> = Vec::new();
    for (su, sw) in out {
        let dup = keep.iter().any(|(ku, kw)| {
            // t -> -t maps (su, sw) to (su * (-1)^b1, sw * (-1)^a1)
            let tu = ku * Int::from((-1i64).pow(b1));
            let tw = kw * Int::from((-1i64).pow(a1));
            tu == su && tw == sw
        });
        if !dup {
            keep.push((su, sw));
        }
    }
    keep
}

// ---------------------------------------------------------------------------
// Isolated linear variable
// ---------------------------------------------------------------------------

/// Families for equations where some variable occurs exactly once, linearly:
/// A z + g(rest) = 0. The divisibility A | g is resolved through the residue
/// states of g modulo |A|.
pub fn isolated_linear_solve(
    eq: &NormalizedEquation,
    domains: &BTreeMap<Var, Domain>,
) -> Option<Vec<IndexedFamily>> {
    // candidate pivots: prefer smallest |A|
    let mut pivots: Vec<(Int, Var, usize)> = Vec::new();
    for (i, t) in eq.terms.iter().enumerate() {
        if t.exponentials.is_empty()
            && t.factorials.is_empty()
            && t.powers.len() == 1
            && *t.powers.values().next().unwrap() == 1
        {
            let v = t.powers.keys().next().unwrap();
            let occurrences = eq
                .terms
                .iter()
                .filter(|u| u.variables().contains(v))
                .count();
            if occurrences == 1 {
                pivots.push((t.coeff.abs(), v.clone(), i));
            }
        }
    }
    if pivots.is_empty() {
        return None;
    }
    pivots.sort();
    let (_, pivot, t_idx) = pivots[0].clone();
    let coeff = eq.terms[t_idx].coeff.clone();
    // g = eq without the pivot term
    let g_terms: Vec<Monomial> = eq
        .terms
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != t_idx)
        .map(|(_, t)| t.clone())
        .chain(std::iter::once(Monomial::constant(eq.constant.clone())))
        .collect();
    let g = NormalizedEquation::from_terms(g_terms);
    let g_vars: Vec<Var> = g.variables().into_iter().collect();
    // pivot domain must be Z (otherwise the family needs extra filtering)
    if domains.get(&pivot).map(|d| !matches!(d, Domain::Z)).unwrap_or(false) {
        return None;
    }

    let a_abs = coeff.abs();
    if a_abs.is_one() {
        // unconditional family
        let fam = family_from_state(&g, &g_vars, domains, &ExactState::default(), &coeff, &pivot)?;
        return Some(vec![fam]);
    }
    let m = a_abs.to_u64()?;
    if m < 2 {
        return None;
    }
    let table = modular::satisfying_states(&g, m, domains, 1 << 22, 512).ok()?;
    if table.truncated {
        return None;
    }
    if table.satisfying.is_empty() {
        return Some(vec![]); // divisibility never holds: no solutions
    }
    // try to collapse states: group by exact components
    let mut groups: BTreeMap<Vec<(usize, u64)>, Vec<Vec<u64>>> = BTreeMap::new();
    for s in &table.satisfying {
        let key: Vec<(usize, u64)> = s
            .iter()
            .enumerate()
            .filter(|(i, r)| table.profiles[*i].is_exact(**r))
            .map(|(i, r)| (i, *r))
            .collect();
        groups.entry(key).or_default().push(s.clone());
    }
    let mut families = Vec::new();
    for (exacts, states) in groups {
        let class_positions: Vec<usize> = (0..table.vars.len())
            .filter(|i| !exacts.iter().any(|(j, _)| j == i))
            .collect();
        // product structure: states = cartesian product of per-variable
        // residue sets
        let sets: Vec<BTreeSet<u64>> = class_positions
            .iter()
            .map(|i| states.iter().map(|s| s[*i]).collect())
            .collect();
        let product_size: u128 = sets.iter().map(|s| s.len() as u128).product();
        let is_product = product_size == states.len() as u128;
        // per-variable progression merge: the residue set collapses to a
        // single class mod L' when it is the full L'-progression over the
        // class window
        let merged: Option<Vec<(u64, u64)>> = if is_product {
            class_positions
                .iter()
                .zip(&sets)
                .map(|(i, s)| {
                    let p = &table.profiles[*i];
                    let m = p.class_modulus();
                    let count = s.len() as u64;
                    if count == 0 || m % count != 0 {
                        return None;
                    }
                    let step = m / count;
                    let r0 = *s.iter().next().unwrap();
                    let full = (0..count).all(|j| s.contains(&(r0 + j * step)));
                    if full {
                        Some((step, r0))
                    } else {
                        None
                    }
                })
                .collect()
        } else {
            None
        };
        if let Some(classes) = merged {
            let mut st = ExactState::default();
            for (i, r) in &exacts {
                st.exact.insert(table.vars[*i].clone(), Int::from(*r));
            }
            for (i, (step, r0)) in class_positions.iter().zip(classes) {
                if !(step == 1 && r0 == 0) {
                    st.classes.insert(table.vars[*i].clone(), (step, r0));
                }
            }
            families.push(family_from_state(&g, &g_vars, domains, &st, &coeff, &pivot)?);
        } else {
            if states.len() > 16 {
                return None; // too many classes for a readable family set
            }
            for s in states {
                let mut st = ExactState::default();
                for (i, r) in s.iter().enumerate() {
                    let p = &table.profiles[i];
                    if p.is_exact(*r) {
                        st.exact.insert(table.vars[i].clone(), Int::from(*r));
                    } else {
                        st.classes.insert(table.vars[i].clone(), (p.class_modulus(), *r));
                    }
                }
                families.push(family_from_state(&g, &g_vars, domains, &st, &coeff, &pivot)?);
            }
        }
    }
    Some(families)
}

#[derive(Debug, Clone, Default)]
struct ExactState {
    exact: BTreeMap<Var, Int>,
    /// var -> (modulus L, representative r): var = L k + r; absent vars are
    /// free parameters.
    classes: BTreeMap<Var, (u64, u64)>,
}

/// Build the family: substitute exact values, map class/free variables to
/// parameters, and express pivot = -g/coeff.
fn family_from_state(
    g: &NormalizedEquation,
    g_vars: &[Var],
    domains: &BTreeMap<Var, Domain>,
    st: &ExactState,
    coeff: &Int,
    pivot: &Var,
) -> Option<IndexedFamily> {
    let mut g_sub = g.clone();
    for (v, x) in &st.exact {
        g_sub = g_sub.substitute(v, x).ok()?;
    }
    // parameter-ranged variables must live on Z or N0 so the affine
    // substitution covers the domain exactly
    for v in g_vars {
        if !st.exact.contains_key(v) {
            match domains.get(v) {
                None | Some(Domain::Z) | Some(Domain::N0) => {}
                _ => return None,
            }
        }
    }
    // parameters for remaining variables
    let mut params: Vec<FamilyParam> = Vec::new();
    let mut pmap: BTreeMap<Var, (usize, u64, u64)> = BTreeMap::new(); // var -> (param idx, L, r)
    let names = ["k", "s", "t", "m", "n", "p", "q"];
    for v in g_vars {
        if st.exact.contains_key(v) {
            continue;
        }
        let idx = params.len();
        let dom = domains.get(v).cloned().unwrap_or(Domain::Z);
        let (l, r) = st.classes.get(v).cloned().unwrap_or((1, 0));
        params.push(FamilyParam {
            name: names.get(idx).unwrap_or(&"u").to_string(),
            nonneg: dom.nonnegative(),
        });
        pmap.insert(v.clone(), (idx, l, r));
    }
    // assignments for the original variables
    let mut assignments: BTreeMap<Var, FamilyExpr> = BTreeMap::new();
    for (v, x) in &st.exact {
        assignments.insert(v.clone(), FamilyExpr::Const(x.clone()));
    }
    for (v, (idx, l, r)) in &pmap {
        let expr = if *l == 1 && *r == 0 {
            FamilyExpr::Param(*idx)
        } else {
            FamilyExpr::Add(vec![
                FamilyExpr::Mul(vec![
                    FamilyExpr::Const(Int::from(*l)),
                    FamilyExpr::Param(*idx),
                ]),
                FamilyExpr::Const(Int::from(*r)),
            ])
        };
        assignments.insert(v.clone(), expr);
    }
    // pivot expression: -(g_sub with params)/coeff
    let mut num_terms: Vec<FamilyExpr> = Vec::new();
    for t in &g_sub.terms {
        let mut factors: Vec<FamilyExpr> = vec![FamilyExpr::Const(-t.coeff.clone())];
        for (v, e) in &t.powers {
            let (idx, l, r) = pmap.get(v)?;
            let base = if *l == 1 && *r == 0 {
                FamilyExpr::Param(*idx)
            } else {
                FamilyExpr::Add(vec![
                    FamilyExpr::Mul(vec![
                        FamilyExpr::Const(Int::from(*l)),
                        FamilyExpr::Param(*idx),
                    ]),
                    FamilyExpr::Const(Int::from(*r)),
                ])
            };
            if *e == 1 {
                factors.push(base);
            } else if *l == 1 && *r == 0 {
                factors.push(FamilyExpr::ParamPow {
                    param: *idx,
                    exp: *e,
                });
            } else {
                for _ in 0..*e {
                    factors.push(base.clone());
                }
            }
        }
        for (v, b) in &t.exponentials {
            let (idx, l, r) = pmap.get(v)?;
            factors.push(FamilyExpr::Pow {
                base: b.clone(),
                param: *idx,
                a: *l as u32,
                b: *r as u32,
            });
        }
        for v in &t.factorials {
            let (idx, l, r) = pmap.get(v)?;
            factors.push(FamilyExpr::Fact {
                param: *idx,
                a: *l as u32,
                b: *r as u32,
            });
        }
        num_terms.push(FamilyExpr::Mul(factors));
    }
    num_terms.push(FamilyExpr::Const(-g_sub.constant.clone()));
    let numerator = FamilyExpr::Add(num_terms);
    let pivot_expr = if coeff.is_one() {
        numerator
    } else if *coeff == Int::from(-1) {
        FamilyExpr::Mul(vec![FamilyExpr::Const(Int::from(-1)), numerator])
    } else {
        FamilyExpr::Div(Box::new(numerator), coeff.clone())
    };
    assignments.insert(pivot.clone(), pivot_expr);
    let note = if coeff.abs().is_one() {
        "coefficient ±1: unconditional".to_string()
    } else {
        format!(
            "residue classes force {} | numerator",
            coeff.abs()
        )
    };
    Some(IndexedFamily {
        params,
        assignments,
        integrality_note: note,
    })
}
