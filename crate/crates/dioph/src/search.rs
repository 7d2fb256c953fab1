//! Bound inference, symmetry detection, exhaustive enumeration with
//! completeness accounting, and heuristic probing.
//!
//! Bounds come from sign/magnitude rules: even-power terms dominated by the
//! rest of the equation, all-positive exponential and factorial growth,
//! reciprocal-term magnitude on the pre-clearing form, completed squares and
//! discriminant ranges for definite two-variable quadratics. Every proved
//! interval is certified: an assignment outside it makes the equation's
//! value provably nonzero.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::{complete_square_reduce, Domain, Int, Monomial, NormalizedEquation, Problem, Var};
use crate::verdict::{Assignment, SignMagnitudeArgument};

// ---------------------------------------------------------------------------
// Extended intervals
// ---------------------------------------------------------------------------

/// Closed interval with optional infinities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ext {
    pub lo: Option<Int>,
    pub hi: Option<Int>,
}

impl Ext {
    pub fn all() -> Self {
        Ext { lo: None, hi: None }
    }

    pub fn point(v: Int) -> Self {
        Ext {
            lo: Some(v.clone()),
            hi: Some(v),
        }
    }

    pub fn of(lo: Option<Int>, hi: Option<Int>) -> Self {
        Ext { lo, hi }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.as_ref().map(|l| !l.is_positive()).unwrap_or(true)
            && self.hi.as_ref().map(|h| !h.is_negative()).unwrap_or(true)
    }

    pub fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(l), Some(h)) if l > h)
    }

    pub fn add(&self, other: &Ext) -> Ext {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Ext { lo, hi }
    }

    pub fn neg(&self) -> Ext {
        Ext {
            lo: self.hi.as_ref().map(|h| -h.clone()),
            hi: self.lo.as_ref().map(|l| -l.clone()),
        }
    }

    /// Interval product; endpoints with None treated as the appropriate
    /// infinity.
    pub fn mul(&self, other: &Ext) -> Ext {
        #[derive(Clone, PartialEq)]
        enum E {
            NegInf,
            Fin(Int),
            PosInf,
        }
        fn prod(a: &E, b: &E) -> Option<E> {
            match (a, b) {
                (E::Fin(x), E::Fin(y)) => Some(E::Fin(x * y)),
                (E::Fin(x), inf) | (inf, E::Fin(x)) => {
                    if x.is_zero() {
                        // 0 * inf is indeterminate endpoint-wise; skip
                        None
                    } else {
                        let pos = matches!(inf, E::PosInf) == x.is_positive();
                        Some(if pos { E::PosInf } else { E::NegInf })
                    }
                }
                (E::PosInf, E::PosInf) | (E::NegInf, E::NegInf) => Some(E::PosInf),
                _ => Some(E::NegInf),
            }
        }
        let ends = |e: &Ext| {
            (
                e.lo.clone().map(E::Fin).unwrap_or(E::NegInf),
                e.hi.clone().map(E::Fin).unwrap_or(E::PosInf),
            )
        };
        let (alo, ahi) = ends(self);
        let (blo, bhi) = ends(other);
        let mut cands: Vec<E> = Vec::new();
        for x in [&alo, &ahi] {
            for y in [&blo, &bhi] {
                match prod(x, y) {
                    Some(p) => cands.push(p),
                    None => cands.push(E::Fin(Int::zero())),
                }
            }
        }
        // account for interior zeros of factors
        if self.contains_zero() || other.contains_zero() {
            cands.push(E::Fin(Int::zero()));
        }
        let mut lo: Option<E> = None;
        let mut hi: Option<E> = None;
        let le = |a: &E, b: &E| match (a, b) {
            (E::NegInf, _) | (_, E::PosInf) => true,
            (_, E::NegInf) | (E::PosInf, _) => false,
            (E::Fin(x), E::Fin(y)) => x <= y,
        };
        for c in cands {
            if lo.as_ref().map(|l| le(&c, l)).unwrap_or(true) {
                lo = Some(c.clone());
            }
            if hi.as_ref().map(|h| le(h, &c)).unwrap_or(true) {
                hi = Some(c);
            }
        }
        Ext {
            lo: match lo {
                Some(E::Fin(v)) => Some(v),
                _ => None,
            },
            hi: match hi {
                Some(E::Fin(v)) => Some(v),
                _ => None,
            },
        }
    }

    pub fn intersect(&self, other: &Ext) -> Ext {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        Ext { lo, hi }
    }
}

fn domain_interval(d: &Domain) -> Ext {
    Ext::of(d.lo(), d.hi())
}

/// Range of v^e over an interval.
fn pow_range(x: &Ext, e: u32) -> Ext {
    if e == 1 {
        return x.clone();
    }
    if e % 2 == 1 {
        return Ext {
            lo: x.lo.as_ref().map(|l| l.pow(e)),
            hi: x.hi.as_ref().map(|h| h.pow(e)),
        };
    }
    // even power
    let lo_val = match (&x.lo, &x.hi) {
        _ if x.contains_zero() => Some(Int::zero()),
        (Some(l), _) if l.is_positive() => Some(l.pow(e)),
        (_, Some(h)) if h.is_negative() => Some(h.pow(e)),
        _ => Some(Int::zero()),
    };
    let hi_val = match (&x.lo, &x.hi) {
        (Some(l), Some(h)) => Some(l.abs().max(h.abs()).pow(e)),
        _ => None,
    };
    Ext {
        lo: lo_val,
        hi: hi_val,
    }
}

/// Range of b^v over an interval of v (v restricted to >= 0 values).
fn exp_range(b: &Int, x: &Ext) -> Ext {
    let lo_e = x
        .lo
        .as_ref()
        .map(|l| l.max(&Int::zero()).clone())
        .unwrap_or_else(Int::zero);
    if b.is_positive() {
        let lo = lo_e.to_u32().map(|e| b.pow(e));
        let hi = x.hi.as_ref().and_then(|h| h.to_u32()).map(|e| b.pow(e));
        Ext { lo, hi }
    } else {
        // negative base oscillates; only bounded exponents give a range
        match x.hi.as_ref().and_then(|h| h.to_u32()) {
            Some(e) => {
                let m = b.abs().pow(e);
                Ext {
                    lo: Some(-m.clone()),
                    hi: Some(m),
                }
            }
            None => Ext::all(),
        }
    }
}

/// Range of v! over an interval of v (v >= 0).
fn fact_range(x: &Ext) -> Ext {
    let lo_e = x
        .lo
        .as_ref()
        .map(|l| l.max(&Int::zero()).clone())
        .unwrap_or_else(Int::zero);
    let lo = lo_e.to_u32().map(crate::expr::factorial);
    let hi = x
        .hi
        .as_ref()
        .and_then(|h| h.to_u32())
        .map(crate::expr::factorial);
    Ext { lo, hi }
}

/// Range of a monomial over per-variable intervals.
fn monomial_range(t: &Monomial, iv: &BTreeMap<Var, Ext>) -> Ext {
    let mut acc = Ext::point(t.coeff.clone());
    for (v, e) in &t.powers {
        acc = acc.mul(&pow_range(&iv[v], *e));
    }
    for (v, b) in &t.exponentials {
        acc = acc.mul(&exp_range(b, &iv[v]));
    }
    for v in &t.factorials {
        acc = acc.mul(&fact_range(&iv[v]));
    }
    acc
}

// ---------------------------------------------------------------------------
// Bound inference
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ProvedEvenPower,
    ProvedReciprocal,
    ProvedExponentialLog,
    ProvedFactorial,
    ProvedCenteredSquare,
    ProvedDiscriminant,
    ProvedOddPowerSign,
    DomainInterval,
    UserBox,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarBound {
    pub interval: Ext,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundSet {
    pub vars: BTreeMap<Var, VarBound>,
    /// True iff every variable has a finite proved interval (not a user box).
    pub complete: bool,
}

impl BoundSet {
    pub fn finite_box(&self) -> Option<BTreeMap<Var, (Int, Int)>> {
        let mut out = BTreeMap::new();
        for (v, b) in &self.vars {
            match (&b.interval.lo, &b.interval.hi) {
                (Some(l), Some(h)) => {
                    out.insert(v.clone(), (l.clone(), h.clone()));
                }
                _ => return None,
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsOutcome {
    /// The equation provably has no solution over the domains.
    Infeasible(SignMagnitudeArgument),
    Bounds(BoundSet),
}

/// Infer per-variable bounds for one equation. Rules, in order: reciprocal
/// magnitude on pre-clearing metadata, whole-value definiteness, dominant
/// single-variable terms (even powers, exponentials, factorials, odd-power
/// sign), completed squares, discriminant ranges.
pub fn infer_bounds(eq: &NormalizedEquation, domains: &BTreeMap<Var, Domain>) -> BoundsOutcome {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    let mut iv: BTreeMap<Var, Ext> = vars
        .iter()
        .map(|v| {
            let d = domains.get(v).cloned().unwrap_or(Domain::Z);
            (v.clone(), domain_interval(&d))
        })
        .collect();
    let mut prov: BTreeMap<Var, Vec<Provenance>> = vars
        .iter()
        .map(|v| {
            let d = domains.get(v).cloned().unwrap_or(Domain::Z);
            let ps = match d {
                Domain::Range(_, _) => vec![Provenance::DomainInterval],
                _ => vec![],
            };
            (v.clone(), ps)
        })
        .collect();

    // reciprocal magnitude on the pre-clearing form
    if let Some(meta) = &eq.frac_meta {
        let mut recip = Ext::point(Int::zero());
        let mut poly_terms: Vec<&crate::expr::FracTerm> = Vec::new();
        let mut ok = true;
        for ft in meta {
            if ft.den_vars.is_empty() {
                poly_terms.push(ft);
                continue;
            }
            if !ft.num.is_constant() {
                ok = false;
                break;
            }
            // c / (den_const * prod v): each |den factor| >= 1, and over N
            // domains the term keeps the sign of c
            let c = &ft.num.coeff;
            let all_pos = ft.den_vars.keys().all(|v| {
                domains
                    .get(v)
                    .map(|d| matches!(d, Domain::N))
                    .unwrap_or(false)
            });
            let mag = {
                let (q, r) = c.abs().div_rem(&ft.den_const.abs());
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            };
            let r = if all_pos {
                if c.is_positive() {
                    Ext::of(Some(Int::zero()), Some(mag))
                } else {
                    Ext::of(Some(-mag), Some(Int::zero()))
                }
            } else {
                Ext::of(Some(-mag.clone()), Some(mag))
            };
            recip = recip.add(&r);
        }
        if ok {
            // polynomial part: constants plus single-variable linear terms
            let mut const_sum = Int::zero();
            let mut linear: BTreeMap<Var, Int> = BTreeMap::new();
            let mut simple = true;
            for ft in &poly_terms {
                if !ft.den_const.is_one() {
                    simple = false;
                    break;
                }
                let m = &ft.num;
                if m.is_constant() {
                    const_sum += &m.coeff;
                } else if m.exponentials.is_empty()
                    && m.factorials.is_empty()
                    && m.powers.len() == 1
                    && *m.powers.values().next().unwrap() == 1
                {
                    let v = m.powers.keys().next().unwrap().clone();
                    *linear.entry(v).or_insert_with(Int::zero) += &m.coeff;
                } else {
                    simple = false;
                    break;
                }
            }
            if simple {
                if linear.is_empty() {
                    let total = recip.add(&Ext::point(const_sum.clone()));
                    if !total.contains_zero() {
                        return BoundsOutcome::Infeasible(
                            SignMagnitudeArgument::ReciprocalMagnitude {
                                lo: recip.lo.clone().unwrap_or_else(Int::zero),
                                hi: recip.hi.clone().unwrap_or_else(Int::zero),
                                target_min: -const_sum.clone(),
                                target_max: -const_sum,
                            },
                        );
                    }
                } else if linear.len() == 1 {
                    // c*v = -(recip + const): bound v
                    let (v, c) = linear.iter().next().unwrap();
                    let rhs = recip.add(&Ext::point(const_sum.clone())).neg();
                    let vi = div_interval(&rhs, c);
                    let cur = iv.get_mut(v).unwrap();
                    let merged = cur.intersect(&vi);
                    if merged.is_empty() {
                        return BoundsOutcome::Infeasible(
                            SignMagnitudeArgument::ReciprocalMagnitude {
                                lo: rhs.lo.clone().unwrap_or_else(Int::zero),
                                hi: rhs.hi.clone().unwrap_or_else(Int::zero),
                                target_min: cur.lo.clone().unwrap_or_else(Int::zero),
                                target_max: cur.hi.clone().unwrap_or_else(Int::zero),
                            },
                        );
                    }
                    *cur = merged;
                    prov.get_mut(v).unwrap().push(Provenance::ProvedReciprocal);
                }
            }
        }
    }

    // whole-value definiteness over the current intervals
    let mut whole = Ext::point(eq.constant.clone());
    for t in &eq.terms {
        whole = whole.add(&monomial_range(t, &iv));
    }
    if !whole.contains_zero() && !whole.is_empty() {
        return BoundsOutcome::Infeasible(SignMagnitudeArgument::DefiniteValue {
            min: whole.lo,
            max: whole.hi,
        });
    }

    // dominant-term rules: variables whose occurrences are confined to one
    // single-variable term
    for v in &vars {
        let occs: Vec<usize> = eq
            .terms
            .iter()
            .enumerate()
            .filter(|(_, t)| t.variables().contains(v))
            .map(|(i, _)| i)
            .collect();
        if occs.len() != 1 {
            continue;
        }
        let t = &eq.terms[occs[0]];
        if t.variables().len() != 1 {
            continue;
        }
        // range of the rest
        let mut rest = Ext::point(eq.constant.clone());
        for (i, u) in eq.terms.iter().enumerate() {
            if i != occs[0] {
                rest = rest.add(&monomial_range(u, &iv));
            }
        }
        // t's value must equal -rest
        let target = rest.neg();
        if target.is_empty() {
            continue;
        }
        let c = &t.coeff;
        let is_power = t.exponentials.is_empty() && t.factorials.is_empty();
        if is_power {
            let e = *t.powers.get(v).unwrap();
            let ve = div_interval(&target, c);
            if e.is_multiple_of(2) {
                if let Some(h) = &ve.hi {
                    if h.is_negative() {
                        return BoundsOutcome::Infeasible(SignMagnitudeArgument::DefiniteValue {
                            min: None,
                            max: None,
                        });
                    }
                    let m = h.nth_root(e);
                    let bound = Ext::of(Some(-m.clone()), Some(m));
                    let cur = iv.get_mut(v).unwrap();
                    *cur = cur.intersect(&bound);
                    prov.get_mut(v).unwrap().push(Provenance::ProvedEvenPower);
                }
            } else if e > 1 {
                let lo = ve.lo.as_ref().map(|l| signed_root_ceil(l, e));
                let hi = ve.hi.as_ref().map(|h| signed_root_floor(h, e));
                let bound = Ext::of(lo, hi);
                if bound.lo.is_some() || bound.hi.is_some() {
                    prov.get_mut(v).unwrap().push(Provenance::ProvedOddPowerSign);
                }
                let cur = iv.get_mut(v).unwrap();
                *cur = cur.intersect(&bound);
            } else {
                // linear: exact interval
                if ve.lo.is_some() || ve.hi.is_some() {
                    prov.get_mut(v).unwrap().push(Provenance::ProvedOddPowerSign);
                }
                let cur = iv.get_mut(v).unwrap();
                *cur = cur.intersect(&ve);
            }
        } else if t.powers.is_empty() && t.factorials.is_empty() && t.exponentials.len() == 1 {
            let b = t.exponentials.get(v).unwrap();
            if b >= &Int::from(2) {
                let ve = div_interval(&target, c);
                if let Some(h) = &ve.hi {
                    if h < &Int::one() {
                        return BoundsOutcome::Infeasible(SignMagnitudeArgument::DefiniteValue {
                            min: None,
                            max: None,
                        });
                    }
                    // b^v <= h  =>  v <= log_b h
                    let mut e = 0u32;
                    let mut p = Int::one();
                    while &p * b <= *h {
                        p *= b;
                        e += 1;
                    }
                    let cur = iv.get_mut(v).unwrap();
                    *cur = cur.intersect(&Ext::of(None, Some(Int::from(e))));
                    prov.get_mut(v)
                        .unwrap()
                        .push(Provenance::ProvedExponentialLog);
                }
            }
        } else if t.powers.is_empty() && t.exponentials.is_empty() && t.factorials.len() == 1 {
            let ve = div_interval(&target, c);
            if let Some(h) = &ve.hi {
                if h < &Int::one() {
                    return BoundsOutcome::Infeasible(SignMagnitudeArgument::DefiniteValue {
                        min: None,
                        max: None,
                    });
                }
                // v! <= h: largest w with w! <= h
                let mut w = 0u32;
                let mut f = Int::one();
                loop {
                    let next = &f * Int::from(w + 1);
                    if next > *h || w >= 40 {
                        break;
                    }
                    w += 1;
                    f = next;
                }
                let cur = iv.get_mut(v).unwrap();
                *cur = cur.intersect(&Ext::of(None, Some(Int::from(w))));
                prov.get_mut(v).unwrap().push(Provenance::ProvedFactorial);
            }
        }
    }

    // completed squares: sum c_i (a_i v_i + b_i)^2 = N
    if let Some(cf) = complete_square_reduce(eq) {
        if cf.squares.iter().all(|(c, ..)| c.is_positive()) {
            if cf.n.is_negative() {
                return BoundsOutcome::Infeasible(SignMagnitudeArgument::CenteredInfeasible {
                    n: cf.n.clone(),
                    scale: cf.scale.clone(),
                });
            }
            for (c, v, alpha, beta) in &cf.squares {
                // (alpha v + beta)^2 <= N / c
                let m = (&cf.n / c).sqrt();
                let lo = ceil_div(&(-&m - beta), alpha);
                let hi = floor_div(&(&m - beta), alpha);
                let (lo, hi) = if alpha.is_negative() { (hi, lo) } else { (lo, hi) };
                let cur = iv.get_mut(v).unwrap();
                *cur = cur.intersect(&Ext::of(Some(lo), Some(hi)));
                prov.get_mut(v)
                    .unwrap()
                    .push(Provenance::ProvedCenteredSquare);
                if cur.is_empty() {
                    return BoundsOutcome::Infeasible(SignMagnitudeArgument::DefiniteValue {
                        min: None,
                        max: None,
                    });
                }
            }
        }
    }

    // definite two-variable quadratic with a mixed term: discriminant range
    if let Some(v_bounds) = discriminant_box(eq) {
        for (v, (lo, hi)) in v_bounds {
            let cur = iv.get_mut(&v).unwrap();
            *cur = cur.intersect(&Ext::of(Some(lo), Some(hi)));
            prov.get_mut(&v).unwrap().push(Provenance::ProvedDiscriminant);
            if cur.is_empty() {
                return BoundsOutcome::Infeasible(SignMagnitudeArgument::DefiniteValue {
                    min: None,
                    max: None,
                });
            }
        }
    }

    let mut out = BTreeMap::new();
    let mut complete = !vars.is_empty();
    for v in &vars {
        let interval = iv[v].clone();
        let ps = prov[v].clone();
        let finite = interval.lo.is_some() && interval.hi.is_some();
        let proved = finite && !ps.is_empty() && !ps.contains(&Provenance::UserBox);
        if !proved {
            complete = false;
        }
        out.insert(
            v.clone(),
            VarBound {
                interval,
                provenance: ps,
            },
        );
    }
    BoundsOutcome::Bounds(BoundSet {
        vars: out,
        complete,
    })
}

pub fn floor_div(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

pub fn ceil_div(a: &Int, b: &Int) -> Int {
    a.div_ceil(b)
}

/// target interval for c*x -> interval for x (exact integer rounding).
fn div_interval(target: &Ext, c: &Int) -> Ext {
    if c.is_zero() {
        return Ext::all();
    }
    let (lo, hi) = if c.is_positive() {
        (
            target.lo.as_ref().map(|l| ceil_div(l, c)),
            target.hi.as_ref().map(|h| floor_div(h, c)),
        )
    } else {
        (
            target.hi.as_ref().map(|h| ceil_div(h, c)),
            target.lo.as_ref().map(|l| floor_div(l, c)),
        )
    };
    Ext::of(lo, hi)
}

/// Floor of the k-th root for odd k over signed values.
fn signed_root_floor(n: &Int, k: u32) -> Int {
    if n.is_negative() {
        let a = n.abs();
        let r = a.nth_root(k);
        if r.pow(k) == a {
            -r
        } else {
            -r - 1
        }
    } else {
        n.nth_root(k)
    }
}

fn signed_root_ceil(n: &Int, k: u32) -> Int {
    -signed_root_floor(&-n.clone(), k)
}

/// For a 2-variable quadratic with a mixed term, require both one-variable
/// discriminants to be nonnegative; when those are downward parabolas the
/// roots give finite ranges.
pub fn discriminant_box(eq: &NormalizedEquation) -> Option<BTreeMap<Var, (Int, Int)>> {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    if vars.len() != 2 {
        return None;
    }
    let (x, y) = (&vars[0], &vars[1]);
    // coefficients of a x^2 + b xy + c y^2 + d x + e y + f
    let mut a = Int::zero();
    let mut b = Int::zero();
    let mut c = Int::zero();
    let mut d = Int::zero();
    let mut e = Int::zero();
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() {
            return None;
        }
        let px = t.powers.get(x).copied().unwrap_or(0);
        let py = t.powers.get(y).copied().unwrap_or(0);
        match (px, py) {
            (2, 0) => a += &t.coeff,
            (1, 1) => b += &t.coeff,
            (0, 2) => c += &t.coeff,
            (1, 0) => d += &t.coeff,
            (0, 1) => e += &t.coeff,
            _ => return None,
        }
    }
    if b.is_zero() || a.is_zero() || c.is_zero() {
        return None;
    }
    let f = eq.constant.clone();
    // as a quadratic in x: a x^2 + (b y + d) x + (c y^2 + e y + f)
    // disc(y) = (b y + d)^2 - 4 a (c y^2 + e y + f)
    let dy2 = &b * &b - Int::from(4) * &a * &c;
    let dy1 = Int::from(2) * &b * &d - Int::from(4) * &a * &e;
    let dy0 = &d * &d - Int::from(4) * &a * &f;
    let ybounds = parabola_nonneg_range(&dy2, &dy1, &dy0)?;
    // as a quadratic in y: c y^2 + (b x + e) y + (a x^2 + d x + f)
    let dx2 = &b * &b - Int::from(4) * &c * &a;
    let dx1 = Int::from(2) * &b * &e - Int::from(4) * &c * &d;
    let dx0 = &e * &e - Int::from(4) * &c * &f;
    let xbounds = parabola_nonneg_range(&dx2, &dx1, &dx0)?;
    let mut out = BTreeMap::new();
    out.insert(x.clone(), xbounds);
    out.insert(y.clone(), ybounds);
    Some(out)
}

/// Integer range where p t^2 + q t + r >= 0, for p < 0.
fn parabola_nonneg_range(p: &Int, q: &Int, r: &Int) -> Option<(Int, Int)> {
    if !p.is_negative() {
        return None;
    }
    let disc = q * q - Int::from(4) * p * r;
    if disc.is_negative() {
        return None; // parabola always negative
    }
    let s = disc.sqrt();
    // with p < 0 the parabola is nonnegative between the real roots; pad by
    // one and tighten by direct evaluation
    let two_p = Int::from(2) * p;
    let mut lo = ceil_div(&(-q - &s - Int::one()), &two_p) - 1;
    let mut hi = floor_div(&(-q + &s + Int::one()), &two_p) + 1;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let eval = |t: &Int| p * t * t + q * t + r;
    while lo <= hi && eval(&lo).is_negative() {
        lo += 1;
    }
    while hi >= lo && eval(&hi).is_negative() {
        hi -= 1;
    }
    if lo > hi {
        return None;
    }
    Some((lo, hi))
}

// ---------------------------------------------------------------------------
// Symmetry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymmetryInfo {
    /// Partition of variables into fully interchangeable groups (size >= 2).
    pub symmetric_groups: Vec<Vec<Var>>,
    /// Ordered variable cycles under which the equation is invariant.
    pub cyclic_tuples: Vec<Vec<Var>>,
    /// Equation invariant under negating every variable (possibly times -1).
    pub sign_flip: bool,
}

fn invariant_under(eq: &NormalizedEquation, map: &BTreeMap<Var, Var>) -> bool {
    let r = eq.rename(map);
    r.terms == eq.terms && r.constant == eq.constant && r.nonvanishing == eq.nonvanishing
}

/// Negate every variable symbolically; None when exponentials or factorials
/// block it.
fn negate_all(eq: &NormalizedEquation) -> Option<NormalizedEquation> {
    let mut terms = Vec::new();
    for t in &eq.terms {
        if !t.exponentials.is_empty() || !t.factorials.is_empty() {
            return None;
        }
        let odd: u32 = t.powers.values().map(|e| e % 2).sum();
        let mut m = t.clone();
        if odd % 2 == 1 {
            m.coeff = -m.coeff;
        }
        terms.push(m);
    }
    terms.push(Monomial::constant(eq.constant.clone()));
    let mut out = NormalizedEquation::from_terms(terms);
    out.nonvanishing = eq.nonvanishing.clone();
    Some(out)
}

fn negated_eq(eq: &NormalizedEquation) -> NormalizedEquation {
    let mut terms: Vec<Monomial> = eq
        .terms
        .iter()
        .map(|t| {
            let mut m = t.clone();
            m.coeff = -m.coeff;
            m
        })
        .collect();
    terms.push(Monomial::constant(-eq.constant.clone()));
    let mut out = NormalizedEquation::from_terms(terms);
    out.nonvanishing = eq.nonvanishing.clone();
    out
}

/// Exact invariance testing: pairwise swaps for symmetric groups, cycle
/// application for cyclic tuples, symbolic sign flip.
pub fn detect_symmetry(eq: &NormalizedEquation) -> SymmetryInfo {
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    let n = vars.len();
    let mut info = SymmetryInfo::default();
    if (2..=6).contains(&n) {
        // union-find over swap-invariant pairs
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mut map = BTreeMap::new();
                map.insert(vars[i].clone(), vars[j].clone());
                map.insert(vars[j].clone(), vars[i].clone());
                if invariant_under(eq, &map) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Var>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(vars[i].clone());
        }
        info.symmetric_groups = groups.into_values().filter(|g| g.len() >= 2).collect();

        // cyclic tuples over subsets not already fully symmetric
        let symmetric_groups = info.symmetric_groups.clone();
        let covered =
            |vs: &[Var]| symmetric_groups.iter().any(|g| vs.iter().all(|v| g.contains(v)));
        if (3..=5).contains(&n) {
            for sub in subsets_of(&vars, 3) {
                if covered(&sub) {
                    continue;
                }
                for perm in cycles_of(&sub) {
                    let mut map = BTreeMap::new();
                    for i in 0..perm.len() {
                        map.insert(perm[i].clone(), perm[(i + 1) % perm.len()].clone());
                    }
                    if invariant_under(eq, &map) {
                        info.cyclic_tuples.push(perm);
                        break;
                    }
                }
            }
        }
    }
    if let Some(neg) = negate_all(eq) {
        let same = neg.terms == eq.terms && neg.constant == eq.constant;
        let flipped = {
            let m = negated_eq(eq);
            neg.terms == m.terms && neg.constant == m.constant
        };
        info.sign_flip = same || flipped;
    }
    info
}

fn subsets_of(vars: &[Var], min: usize) -> Vec<Vec<Var>> {
    let n = vars.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k < min {
            continue;
        }
        let sub: Vec<Var> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vars[i].clone())
            .collect();
        out.push(sub);
    }
    out
}

/// Distinct cycles on a set: fix the first element, permute the rest.
fn cycles_of(sub: &[Var]) -> Vec<Vec<Var>> {
    let mut rest: Vec<Var> = sub[1..].to_vec();
    let mut out = Vec::new();
    permute(&mut rest, 0, &mut |p| {
        let mut c = vec![sub[0].clone()];
        c.extend_from_slice(p);
        out.push(c);
    });
    out
}

fn permute(xs: &mut Vec<Var>, k: usize, f: &mut impl FnMut(&[Var])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub solutions: Vec<Assignment>,
    pub complete: bool,
    pub evaluations: u128,
}

/// Exhaustive scan of a finite box, restricted to canonical representatives
/// under the detected symmetries and orbit-expanded afterwards. The merged
/// result is identical to an unrestricted scan.
pub fn enumerate_box(
    problem: &Problem,
    bounds: &BTreeMap<Var, (Int, Int)>,
    sym: &SymmetryInfo,
    budget: u128,
) -> EnumerationResult {
    let vars: Vec<Var> = problem.variables().into_iter().collect();
    // symmetry is usable only when orbit variables share domain, bounds and
    // nonvanishing status
    let nonv = problem.nonvanishing();
    let usable_group = |g: &Vec<Var>| {
        let d0 = problem.domain(&g[0]);
        let b0 = bounds.get(&g[0]);
        g.iter().all(|v| {
            problem.domain(v) == d0
                && bounds.get(v) == b0
                && nonv.contains(v) == nonv.contains(&g[0])
        })
    };
    let groups: Vec<Vec<Var>> = sym
        .symmetric_groups
        .iter()
        .filter(|g| usable_group(g))
        .cloned()
        .collect();
    let cycles: Vec<Vec<Var>> = sym
        .cyclic_tuples
        .iter()
        .filter(|g| usable_group(g))
        .cloned()
        .collect();
    let sign_flip = sym.sign_flip
        && !vars.is_empty()
        && vars.iter().all(|v| {
            bounds
                .get(v)
                .map(|(lo, hi)| problem.domain(v) == Domain::Z && *lo == -hi.clone())
                .unwrap_or(false)
        });

    let idx: BTreeMap<&Var, usize> = vars.iter().zip(0..).collect();
    let mut group_prev: Vec<Option<usize>> = vec![None; vars.len()];
    for g in &groups {
        for w in g.windows(2) {
            group_prev[idx[&w[1]]] = Some(idx[&w[0]]);
        }
    }

    let mut solutions: Vec<Assignment> = Vec::new();
    let mut evals: u128 = 0;
    let mut complete = true;

    if vars.is_empty() {
        let a = Assignment::new();
        if problem.satisfied_by(&a) {
            solutions.push(a);
        }
        return EnumerationResult {
            solutions,
            complete: true,
            evaluations: 1,
        };
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        problem: &Problem,
        vars: &[Var],
        bounds: &BTreeMap<Var, (Int, Int)>,
        group_prev: &[Option<usize>],
        current: &mut Vec<Int>,
        depth: usize,
        evals: &mut u128,
        budget: u128,
        complete: &mut bool,
        out: &mut Vec<Assignment>,
    ) {
        if *evals > budget {
            *complete = false;
            return;
        }
        if depth == vars.len() {
            *evals += 1;
            let a: Assignment = vars.iter().cloned().zip(current.iter().cloned()).collect();
            if problem.satisfied_by(&a) {
                out.push(a);
            }
            return;
        }
        let (lo, hi) = &bounds[&vars[depth]];
        let mut v = lo.clone();
        if let Some(p) = group_prev[depth] {
            if current[p] > v {
                v = current[p].clone();
            }
        }
        while &v <= hi {
            current[depth] = v.clone();
            rec(
                problem, vars, bounds, group_prev, current, depth + 1, evals, budget, complete, out,
            );
            if *evals > budget {
                *complete = false;
                return;
            }
            v += 1;
        }
    }

    let mut current: Vec<Int> = vec![Int::zero(); vars.len()];
    rec(
        problem,
        &vars,
        bounds,
        &group_prev,
        &mut current,
        0,
        &mut evals,
        budget,
        &mut complete,
        &mut solutions,
    );

    // canonical filters for cycles and sign flip, then orbit expansion
    let group_positions: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| g.iter().map(|v| idx[v]).collect())
        .collect();
    let canonical = |a: &Assignment| {
        for cyc in &cycles {
            let tuple: Vec<&Int> = cyc.iter().map(|v| &a[v]).collect();
            for r in 1..tuple.len() {
                let rotated: Vec<&Int> = (0..tuple.len())
                    .map(|i| tuple[(i + r) % tuple.len()])
                    .collect();
                if rotated < tuple {
                    return false;
                }
            }
        }
        if sign_flip {
            // compare against the group-sorted form of the global flip
            let vals: Vec<Int> = vars.iter().map(|v| a[v].clone()).collect();
            let mut flipped: Vec<Int> = vals.iter().map(|x| -x.clone()).collect();
            for pos in &group_positions {
                let mut gv: Vec<Int> = pos.iter().map(|i| flipped[*i].clone()).collect();
                gv.sort();
                for (i, x) in pos.iter().zip(gv) {
                    flipped[*i] = x;
                }
            }
            if vals > flipped {
                return false;
            }
        }
        true
    };
    let canon_solutions: Vec<Assignment> = solutions.into_iter().filter(|a| canonical(a)).collect();

    let mut expanded: BTreeSet<Vec<(Var, Int)>> = BTreeSet::new();
    for sol in &canon_solutions {
        let mut frontier: Vec<Assignment> = vec![sol.clone()];
        for g in &groups {
            let mut next = Vec::new();
            for a in &frontier {
                let vals: Vec<Int> = g.iter().map(|v| a[v].clone()).collect();
                let mut perms = Vec::new();
                let mut vs = vals.clone();
                permute_ints(&mut vs, 0, &mut |p| perms.push(p.to_vec()));
                perms.sort();
                perms.dedup();
                for p in perms {
                    let mut b = a.clone();
                    for (v, x) in g.iter().zip(p) {
                        b.insert(v.clone(), x);
                    }
                    next.push(b);
                }
            }
            frontier = next;
        }
        for cyc in &cycles {
            let mut next = Vec::new();
            for a in &frontier {
                for r in 0..cyc.len() {
                    let mut b = a.clone();
                    for (i, v) in cyc.iter().enumerate() {
                        b.insert(v.clone(), a[&cyc[(i + r) % cyc.len()]].clone());
                    }
                    next.push(b);
                }
            }
            frontier = next;
        }
        if sign_flip {
            let mut next = Vec::new();
            for a in &frontier {
                next.push(a.clone());
                next.push(a.iter().map(|(v, x)| (v.clone(), -x.clone())).collect());
            }
            frontier = next;
        }
        for a in frontier {
            if problem.satisfied_by(&a) {
                expanded.insert(a.into_iter().collect());
            }
        }
    }
    let solutions = expanded
        .into_iter()
        .map(|kv| kv.into_iter().collect())
        .collect();
    EnumerationResult {
        solutions,
        complete,
        evaluations: evals,
    }
}

fn permute_ints(xs: &mut Vec<Int>, k: usize, f: &mut impl FnMut(&[Int])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute_ints(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// Expand canonical solutions by the full symmetric group on `vars`,
/// keeping only assignments that satisfy the problem.
pub fn enumerate_expand(
    problem: &Problem,
    vars: &[Var],
    canonical: &[Assignment],
) -> Vec<Assignment> {
    let mut expanded: BTreeSet<Vec<(Var, Int)>> = BTreeSet::new();
    for sol in canonical {
        let vals: Vec<Int> = vars.iter().map(|v| sol[v].clone()).collect();
        let mut perms = Vec::new();
        let mut vs = vals.clone();
        permute_ints(&mut vs, 0, &mut |p| perms.push(p.to_vec()));
        perms.sort();
        perms.dedup();
        for p in perms {
            let a: Assignment = vars.iter().cloned().zip(p).collect();
            if problem.satisfied_by(&a) {
                expanded.insert(a.into_iter().collect());
            }
        }
    }
    expanded
        .into_iter()
        .map(|kv| kv.into_iter().collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Probing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub hits: Vec<Assignment>,
    pub evaluations: u128,
    /// Max-norm shell reached.
    pub radius: i64,
    pub hit_cap_reached: bool,
}

/// Heuristic sample: spiral outward from 0 in max-norm shells so low values
/// are visited first. Never contributes to completeness claims.
pub fn probe(problem: &Problem, half_width: i64, budget: u128) -> ProbeReport {
    let vars: Vec<Var> = problem.variables().into_iter().collect();
    let n = vars.len();
    let mut hits = Vec::new();
    let mut evals: u128 = 0;
    let cap = 256usize;
    let mut radius = 0i64;
    if n == 0 {
        let a = Assignment::new();
        if problem.satisfied_by(&a) {
            hits.push(a);
        }
        return ProbeReport {
            hits,
            evaluations: 1,
            radius: 0,
            hit_cap_reached: false,
        };
    }
    let ranges: Vec<(i64, i64)> = vars
        .iter()
        .map(|v| {
            let d = problem.domain(v);
            let lo = d
                .lo()
                .and_then(|x| x.to_i64())
                .unwrap_or(-half_width)
                .max(-half_width);
            let hi = d
                .hi()
                .and_then(|x| x.to_i64())
                .unwrap_or(half_width)
                .min(half_width);
            (lo, hi)
        })
        .collect();
    'shell: for r in 0..=half_width {
        radius = r;
        let los: Vec<i64> = ranges.iter().map(|(lo, _)| (*lo).max(-r)).collect();
        let his: Vec<i64> = ranges.iter().map(|(_, hi)| (*hi).min(r)).collect();
        if los.iter().zip(&his).any(|(l, h)| l > h) {
            continue;
        }
        let mut vals = los.clone();
        'point: loop {
            if r == 0 || vals.iter().any(|v| v.abs() == r) {
                evals += 1;
                if evals > budget {
                    break 'shell;
                }
                let a: Assignment = vars
                    .iter()
                    .cloned()
                    .zip(vals.iter().map(|v| Int::from(*v)))
                    .collect();
                if problem.satisfied_by(&a) {
                    if hits.len() < cap {
                        hits.push(a);
                    } else {
                        return ProbeReport {
                            hits,
                            evaluations: evals,
                            radius,
                            hit_cap_reached: true,
                        };
                    }
                }
            }
            for i in 0..n {
                vals[i] += 1;
                if vals[i] <= his[i] {
                    continue 'point;
                }
                vals[i] = los[i];
            }
            break;
        }
    }
    ProbeReport {
        hits,
        evaluations: evals,
        radius,
        hit_cap_reached: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;
    use rand::{Rng, SeedableRng};

    fn prob(text: &str) -> Problem {
        parse_problem(text).unwrap()
    }

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn bounds_quartic_diagonal() {
        let p = prob("x^4 + y^4 + z^4 = 3042 ; x,y,z in Z");
        match infer_bounds(&p.equations[0], &p.domains) {
            BoundsOutcome::Bounds(b) => {
                assert!(b.complete);
                for v in ["x", "y", "z"] {
                    let iv = &b.vars[v].interval;
                    assert_eq!(iv.lo, Some(int(-7)));
                    assert_eq!(iv.hi, Some(int(7)));
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bounds_exponential_infeasible() {
        let p = prob("2^x + 3^y = 1 ; x,y in N0");
        assert!(matches!(
            infer_bounds(&p.equations[0], &p.domains),
            BoundsOutcome::Infeasible(_)
        ));
    }

    #[test]
    fn bounds_exponential_log() {
        let p = prob("5^x + 7^y = 40369232 ; x,y in N0");
        match infer_bounds(&p.equations[0], &p.domains) {
            BoundsOutcome::Bounds(b) => {
                assert!(b.complete);
                assert_eq!(b.vars["x"].interval.hi, Some(int(10)));
                assert_eq!(b.vars["y"].interval.hi, Some(int(9)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bounds_sign_infeasible() {
        let p = prob("x^2 + y^2 + 1 = 0 ; x,y in Z");
        assert!(matches!(
            infer_bounds(&p.equations[0], &p.domains),
            BoundsOutcome::Infeasible(_)
        ));
    }

    #[test]
    fn bounds_reciprocal_infeasible() {
        let p = prob("1/x + 1/y + 1/z = 5 ; x,y,z in Z, x*y*z != 0");
        assert!(matches!(
            infer_bounds(&p.equations[0], &p.domains),
            BoundsOutcome::Infeasible(SignMagnitudeArgument::ReciprocalMagnitude { .. })
        ));
    }

    #[test]
    fn bounds_reciprocal_variable() {
        let p = prob("z = 1/x + 1/y + 2/(x*y) ; x,y,z in N");
        match infer_bounds(&p.equations[0], &p.domains) {
            BoundsOutcome::Bounds(b) => {
                let z = &b.vars["z"].interval;
                assert_eq!(z.hi, Some(int(4)));
                assert_eq!(z.lo, Some(int(1)));
                assert!(!b.complete); // x, y not bounded by this rule
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bounds_mixed_quadratic_discriminant() {
        let p = prob("x^2 - x*y + y^2 + 2*x - y = 2 ; x,y in Z");
        match infer_bounds(&p.equations[0], &p.domains) {
            BoundsOutcome::Bounds(b) => {
                assert!(b.complete);
                let x = &b.vars["x"].interval;
                // within the coarser completed-square range -5 <= x <= 1
                assert!(x.lo.clone().unwrap() >= int(-5));
                assert!(x.hi.clone().unwrap() <= int(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bounds_factorial() {
        let p = prob("x^2 + y^2 + z! = 24 ; x,y in Z, z in N0");
        match infer_bounds(&p.equations[0], &p.domains) {
            BoundsOutcome::Bounds(b) => {
                assert!(b.complete);
                assert_eq!(b.vars["z"].interval.hi, Some(int(4)));
                assert_eq!(b.vars["x"].interval.hi, Some(int(4)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bounds_odd_power_signs() {
        // z^3 = x^6 + y^2 forces z >= 0
        let p = prob("x^6 + y^2 - z^3 = 0 ; x,y,z in Z");
        match infer_bounds(&p.equations[0], &p.domains) {
            BoundsOutcome::Bounds(b) => {
                assert_eq!(b.vars["z"].interval.lo, Some(int(0)));
            }
            other => panic!("{other:?}"),
        }
        // z = -(x^2 + y^4 + 1) forces z <= -1
        let p = prob("x^2 + y^4 + z + 1 = 0 ; x,y,z in Z");
        match infer_bounds(&p.equations[0], &p.domains) {
            BoundsOutcome::Bounds(b) => {
                assert_eq!(b.vars["z"].interval.hi, Some(int(-1)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bound_certification_outside_never_satisfies() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let cases = [
            "x^4 + y^4 + z^4 = 3042 ; x,y,z in Z",
            "x^2 + y^2 + z! = 24 ; x,y in Z, z in N0",
        ];
        for src in cases {
            let p = prob(src);
            let eq = &p.equations[0];
            let b = match infer_bounds(eq, &p.domains) {
                BoundsOutcome::Bounds(b) => b,
                other => panic!("{other:?}"),
            };
            let vars: Vec<Var> = eq.variables().into_iter().collect();
            for _ in 0..1000 {
                let vi = rng.gen_range(0..vars.len());
                let mut a = Assignment::new();
                let mut valid = true;
                for (i, v) in vars.iter().enumerate() {
                    let ivl = &b.vars[v].interval;
                    let (lo, hi) = (
                        ivl.lo.clone().unwrap().to_i64().unwrap(),
                        ivl.hi.clone().unwrap().to_i64().unwrap(),
                    );
                    let x = if i == vi {
                        if rng.gen_bool(0.5) {
                            hi + rng.gen_range(1..=30)
                        } else {
                            lo - rng.gen_range(1..=30)
                        }
                    } else {
                        rng.gen_range(lo..=hi)
                    };
                    if !p.domain(v).contains(&int(x)) {
                        valid = false;
                        break;
                    }
                    a.insert(v.clone(), int(x));
                }
                if !valid {
                    continue;
                }
                if let Ok(v) = eq.eval(&a) {
                    assert!(!v.is_zero(), "{src}: satisfied outside bounds at {a:?}");
                }
            }
        }
    }

    #[test]
    fn symmetry_detection() {
        let p = prob("x + y + z = x*y*z ; x,y,z in Z");
        let s = detect_symmetry(&p.equations[0]);
        assert_eq!(s.symmetric_groups.len(), 1);
        assert_eq!(s.symmetric_groups[0].len(), 3);

        let p = prob("x^3*y + y^3*z + z^3*x = 1 ; x,y,z in N0");
        let s = detect_symmetry(&p.equations[0]);
        assert!(s.symmetric_groups.is_empty());
        assert_eq!(s.cyclic_tuples.len(), 1);

        let p = prob("x^2 + 2*y = 0 ; x,y in Z");
        let s = detect_symmetry(&p.equations[0]);
        assert!(s.symmetric_groups.is_empty());
        assert!(s.cyclic_tuples.is_empty());

        let p = prob("x^3*y + 3*x*y^3 + 7*x*y = 1085 ; x,y in Z");
        let s = detect_symmetry(&p.equations[0]);
        assert!(s.sign_flip);
    }

    #[test]
    fn enumerate_quartic_48() {
        let p = prob("x^4 + y^4 + z^4 = 3042 ; x,y,z in Z");
        let sym = detect_symmetry(&p.equations[0]);
        let bounds: BTreeMap<Var, (Int, Int)> = ["x", "y", "z"]
            .iter()
            .map(|v| (v.to_string(), (int(-7), int(7))))
            .collect();
        let r = enumerate_box(&p, &bounds, &sym, 1 << 30);
        assert!(r.complete);
        assert_eq!(r.solutions.len(), 48);
        // matches unrestricted brute force, with fewer evaluations
        let r2 = enumerate_box(&p, &bounds, &SymmetryInfo::default(), 1 << 30);
        assert_eq!(r.solutions, r2.solutions);
        assert!(r.evaluations < r2.evaluations);
    }

    #[test]
    fn enumerate_factorial_cases() {
        let p = prob("x^2 + y^2 + z! = 24 ; x,y in Z, z in N0");
        let sym = detect_symmetry(&p.equations[0]);
        let mut bounds: BTreeMap<Var, (Int, Int)> = BTreeMap::new();
        bounds.insert("x".into(), (int(-4), int(4)));
        bounds.insert("y".into(), (int(-4), int(4)));
        bounds.insert("z".into(), (int(0), int(4)));
        let r = enumerate_box(&p, &bounds, &sym, 1 << 30);
        assert_eq!(r.solutions.len(), 5);
    }

    #[test]
    fn enumerate_four_var_symmetric() {
        let p = prob("x + y + z + w = x*y*z*w ; x,y,z,w in N");
        let sym = detect_symmetry(&p.equations[0]);
        assert_eq!(sym.symmetric_groups.len(), 1);
        let bounds: BTreeMap<Var, (Int, Int)> = ["w", "x", "y", "z"]
            .iter()
            .map(|v| (v.to_string(), (int(1), int(6))))
            .collect();
        let r = enumerate_box(&p, &bounds, &sym, 1 << 30);
        assert_eq!(r.solutions.len(), 12);
    }

    #[test]
    fn sign_split_matches_full_search() {
        let p = prob("x^3*y + 3*x*y^3 + 7*x*y = 1085 ; x,y in Z");
        let sym = detect_symmetry(&p.equations[0]);
        assert!(sym.sign_flip);
        let bounds: BTreeMap<Var, (Int, Int)> = ["x", "y"]
            .iter()
            .map(|v| (v.to_string(), (int(-12), int(12))))
            .collect();
        let with_sym = enumerate_box(&p, &bounds, &sym, 1 << 30);
        let without = enumerate_box(&p, &bounds, &SymmetryInfo::default(), 1 << 30);
        assert_eq!(with_sym.solutions, without.solutions);
        assert_eq!(with_sym.solutions.len(), 2); // (1,7) and (-1,-7)
    }

    #[test]
    fn probe_finds_small_solutions() {
        let p = prob("4*x^2 + 4*x - 15 - y^3 = 0 ; x,y in Z");
        let r = probe(&p, 100, 1 << 21);
        assert!(r.hits.is_empty());

        let p = prob("x*y + y*z = x*y*z ; x,y,z in Z");
        let r = probe(&p, 8, 1 << 20);
        assert!(!r.hits.is_empty());
        for a in &r.hits {
            let (x, y, z) = (&a["x"], &a["y"], &a["z"]);
            assert!(
                y.is_zero() || (x.is_zero() && z.is_zero()) || (*x == int(2) && *z == int(2)),
                "unexpected probe hit {a:?}"
            );
        }

        // x - x normalizes to the empty equation: trivially satisfied
        let p = prob("x - x = 0 ; x in Z");
        let r = probe(&p, 3, 1 << 10);
        assert_eq!(r.hits.len(), 1);
        assert!(r.hits[0].is_empty());
    }

    #[test]
    fn enumeration_deterministic() {
        let p = prob("x^2 + y^2 = 25 ; x,y in Z");
        let bounds: BTreeMap<Var, (Int, Int)> = ["x", "y"]
            .iter()
            .map(|v| (v.to_string(), (int(-5), int(5))))
            .collect();
        let sym = detect_symmetry(&p.equations[0]);
        let a = enumerate_box(&p, &bounds, &sym, 1 << 20);
        let b = enumerate_box(&p, &bounds, &sym, 1 << 20);
        assert_eq!(a.solutions, b.solutions);
        let mut sorted = a.solutions.clone();
        sorted.sort_by(|x, y| {
            let kx: Vec<_> = x.iter().collect();
            let ky: Vec<_> = y.iter().collect();
            kx.cmp(&ky)
        });
        assert_eq!(a.solutions, sorted);
    }
}
