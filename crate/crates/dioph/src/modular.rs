//! Residue-reachability engine and obstruction scanner: decide
//! satisfiability of a normalized equation modulo m over the finite joint
//! state space of its variables.
//!
//! For a variable v and modulus m the joint residue vector
//! (v mod m, b^v mod m for each base b, v! mod m) is eventually periodic in
//! v. Representatives 0..H-1 with H = P + lcm(m, L) cover every behavior:
//! values below the preperiod P stand for themselves exactly, values in
//! [P, H) stand for the class {u >= P : u ≡ v (mod lcm(m, L))}. If no
//! representative tuple satisfies f ≡ 0 (mod m), the equation has no integer
//! solution at all (contraposition), which is what a ModularCertificate
//! records.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::expr::{Domain, Int, NormalizedEquation, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModularError {
    /// Variable with factorial/exponential occurrence but a domain allowing
    /// negatives; such profiles are undefined.
    DomainUnbounded(Var),
    /// Product of horizons exceeds the state budget for this modulus.
    StateBudgetExceeded { modulus: u64, states: u128 },
}

impl std::fmt::Display for ModularError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModularError::DomainUnbounded(v) => {
                write!(f, "variable {v} has exponential/factorial occurrence over an unbounded-below domain")
            }
            ModularError::StateBudgetExceeded { modulus, states } => {
                write!(f, "state budget exceeded at m={modulus} ({states} states)")
            }
        }
    }
}

/// Finite enumeration horizon for one variable and one modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueProfile {
    pub variable: Var,
    pub modulus: u64,
    /// Preperiod: representatives below stand for themselves exactly.
    pub preperiod: u64,
    /// Joint period of the residue vector for v >= preperiod.
    pub period: u64,
    /// Horizon: representatives 0..horizon cover every behavior.
    pub horizon: u64,
}

impl ResidueProfile {
    /// Whether representative r denotes the single value r (preperiodic)
    /// rather than an infinite congruence class.
    pub fn is_exact(&self, r: u64) -> bool {
        r < self.preperiod
    }

    /// The class modulus for periodic representatives.
    pub fn class_modulus(&self) -> u64 {
        self.horizon - self.preperiod
    }
}

/// Eventual (preperiod, period) of b^v mod m for v = 0, 1, 2, ...
fn power_cycle(base: &Int, m: u64) -> (u64, u64) {
    let mm = Int::from(m);
    let mut seen: BTreeMap<Int, u64> = BTreeMap::new();
    let mut x = Int::from(1) % &mm;
    if x.is_negative() {
        x += &mm;
    }
    let mut i = 0u64;
    loop {
        if let Some(&first) = seen.get(&x) {
            return (first, i - first);
        }
        seen.insert(x.clone(), i);
        x = (x * base) % &mm;
        if x.is_negative() {
            x += &mm;
        }
        i += 1;
    }
}

/// Build the residue profile of `variable` in `eq` modulo `m`.
///
/// The representative window is P + lcm(m, L) in general; when the variable
/// has no polynomial occurrence the `v mod m` component of the joint vector
/// is irrelevant and P + L already covers every behavior.
pub fn residue_profile(
    eq: &NormalizedEquation,
    variable: &str,
    m: u64,
    domains: &BTreeMap<Var, Domain>,
) -> Result<ResidueProfile, ModularError> {
    let mut preperiod = 0u64;
    let mut period = 1u64;
    let mut special = false; // exponential or factorial occurrence
    let mut poly = false;
    for t in &eq.terms {
        if let Some(b) = t.exponentials.get(variable) {
            special = true;
            let (p, l) = power_cycle(b, m);
            preperiod = preperiod.max(p);
            period = period.lcm(&l);
        }
        if t.factorials.contains(variable) {
            special = true;
            // v! ≡ 0 (mod m) for all v >= m
            preperiod = preperiod.max(m);
        }
        if t.powers.contains_key(variable) {
            poly = true;
        }
    }
    if special {
        let dom = domains.get(variable).cloned().unwrap_or(Domain::Z);
        if !dom.nonnegative() {
            return Err(ModularError::DomainUnbounded(variable.to_string()));
        }
    }
    let horizon = if poly {
        preperiod + m.lcm(&period)
    } else {
        preperiod + period
    };
    Ok(ResidueProfile {
        variable: variable.to_string(),
        modulus: m,
        preperiod,
        period,
        horizon,
    })
}

/// Joint residue states of an equation modulo m.
#[derive(Debug, Clone)]
pub struct StateTable {
    pub modulus: u64,
    pub vars: Vec<Var>,
    pub profiles: Vec<ResidueProfile>,
    /// Satisfying representative tuples, in odometer order over the vars.
    pub satisfying: Vec<Vec<u64>>,
    pub states_checked: u128,
    /// True when `satisfying` was truncated to the collection cap (emptiness
    /// checks are still exact; only the stored list is partial).
    pub truncated: bool,
}

/// Per-term contribution tables: value of the term's v-part at each
/// representative of v, modulo m.
fn var_contrib(
    t: &crate::expr::Monomial,
    v: &str,
    profile: &ResidueProfile,
    m: u64,
) -> Vec<u64> {
    let mi = Int::from(m);
    (0..profile.horizon)
        .map(|r| {
            let mut acc = Int::from(1);
            if let Some(e) = t.powers.get(v) {
                acc *= Int::from(r % m).modpow(&Int::from(*e), &mi);
            }
            if let Some(b) = t.exponentials.get(v) {
                let mut bb = b.clone() % &mi;
                if bb.is_negative() {
                    bb += &mi;
                }
                acc *= bb.modpow(&Int::from(r), &mi);
            }
            if t.factorials.contains(v) {
                let mut f = Int::from(1);
                for k in 2..=r {
                    f = (f * Int::from(k)) % &mi;
                    if f.is_zero() {
                        break;
                    }
                }
                acc *= f;
            }
            (acc % &mi).to_u64().unwrap_or(0)
        })
        .collect()
}

/// Compute all representative assignments with f ≡ 0 (mod m).
/// An empty set proves the equation unsatisfiable over its domains.
pub fn satisfying_states(
    eq: &NormalizedEquation,
    m: u64,
    domains: &BTreeMap<Var, Domain>,
    state_budget: u128,
    collect_cap: usize,
) -> Result<StateTable, ModularError> {
    debug_assert!(m >= 2);
    let vars: Vec<Var> = eq.variables().into_iter().collect();
    let mut profiles = Vec::new();
    let mut total: u128 = 1;
    for v in &vars {
        let p = residue_profile(eq, v, m, domains)?;
        total = total.saturating_mul(p.horizon as u128);
        profiles.push(p);
    }
    if total > state_budget {
        return Err(ModularError::StateBudgetExceeded {
            modulus: m,
            states: total,
        });
    }

    // contribution tables: per term, per variable position
    let mi = Int::from(m);
    let const_res = {
        let mut c = eq.constant.clone() % &mi;
        if c.is_negative() {
            c += &mi;
        }
        c.to_u64().unwrap_or(0)
    };
    let term_data: Vec<(u64, Vec<Option<Vec<u64>>>)> = eq
        .terms
        .iter()
        .map(|t| {
            let mut c = t.coeff.clone() % &mi;
            if c.is_negative() {
                c += &mi;
            }
            let tabs: Vec<Option<Vec<u64>>> = vars
                .iter()
                .zip(&profiles)
                .map(|(v, p)| {
                    if t.variables().contains(v.as_str()) {
                        Some(var_contrib(t, v, p, m))
                    } else {
                        None
                    }
                })
                .collect();
            (c.to_u64().unwrap_or(0), tabs)
        })
        .collect();

    let mut satisfying = Vec::new();
    let mut truncated = false;
    let mut reps: Vec<u64> = vec![0; vars.len()];
    let mut states_checked: u128 = 0;
    'outer: loop {
        states_checked += 1;
        let mut acc = const_res as u128;
        for (c, tabs) in &term_data {
            let mut tv = *c as u128;
            for (i, tab) in tabs.iter().enumerate() {
                if let Some(tab) = tab {
                    tv = (tv * tab[reps[i] as usize] as u128) % m as u128;
                }
            }
            acc += tv;
        }
        if acc.is_multiple_of(m as u128) {
            if satisfying.len() < collect_cap {
                satisfying.push(reps.clone());
                // emptiness queries stop at the first witness
                if collect_cap == 1 {
                    break;
                }
            } else {
                truncated = true;
            }
        }
        // odometer
        for i in 0..vars.len() {
            reps[i] += 1;
            if reps[i] < profiles[i].horizon {
                continue 'outer;
            }
            reps[i] = 0;
        }
        break;
    }
    if vars.is_empty() {
        // constant equation: single empty state
        if const_res != 0 {
            satisfying.clear();
        }
    }
    Ok(StateTable {
        modulus: m,
        vars,
        profiles,
        satisfying,
        states_checked,
        truncated,
    })
}

/// Evidence that no residue state satisfies f ≡ 0 (mod m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularCertificate {
    pub modulus: u64,
    pub states_checked: u128,
    /// Domain restriction under which the claim holds (e.g. exponential
    /// variables nonnegative).
    pub domain_note: String,
}

/// Scan the moduli in order; return a certificate for the first one where no
/// state satisfies. Budget-exceeded moduli are recorded and skipped.
pub fn find_obstruction(
    eq: &NormalizedEquation,
    moduli: &[u64],
    domains: &BTreeMap<Var, Domain>,
    state_budget: u128,
) -> (Option<ModularCertificate>, Vec<u64>) {
    let mut skipped = Vec::new();
    for &m in moduli {
        match satisfying_states(eq, m, domains, state_budget, 1) {
            Ok(tab) => {
                if tab.satisfying.is_empty() {
                    let domain_note = if tab
                        .profiles
                        .iter()
                        .any(|p| p.preperiod > 0)
                    {
                        "exponential/factorial arguments nonnegative".to_string()
                    } else {
                        String::new()
                    };
                    return (
                        Some(ModularCertificate {
                            modulus: m,
                            states_checked: tab.states_checked,
                            domain_note,
                        }),
                        skipped,
                    );
                }
            }
            Err(ModularError::StateBudgetExceeded { .. }) => skipped.push(m),
            Err(ModularError::DomainUnbounded(_)) => {
                // no profile for some variable: modular analysis inapplicable
                return (None, skipped);
            }
        }
    }
    (None, skipped)
}

/// Admissible values of one variable, projected from satisfying states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarClasses {
    pub profile: ResidueProfile,
    /// Exact (preperiodic) representative values that appear.
    pub exact: BTreeSet<u64>,
    /// Periodic representatives that appear (classes mod class_modulus).
    pub classes: BTreeSet<u64>,
}

impl VarClasses {
    /// Whether the projection pins the variable to finitely many values.
    pub fn pinned(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Project satisfying states onto each variable.
pub fn congruence_constraints(table: &StateTable) -> BTreeMap<Var, VarClasses> {
    let mut out = BTreeMap::new();
    for (i, v) in table.vars.iter().enumerate() {
        let p = &table.profiles[i];
        let mut exact = BTreeSet::new();
        let mut classes = BTreeSet::new();
        for s in &table.satisfying {
            let r = s[i];
            if p.is_exact(r) {
                exact.insert(r);
            } else {
                classes.insert(r);
            }
        }
        out.insert(
            v.clone(),
            VarClasses {
                profile: p.clone(),
                exact,
                classes,
            },
        );
    }
    out
}

/// The default scan list: small moduli first.
pub fn default_moduli(max: u64) -> Vec<u64> {
    (2..=max).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;
    use rand::{Rng, SeedableRng};

    fn eq_of(text: &str) -> (NormalizedEquation, BTreeMap<Var, Domain>) {
        let p = parse_problem(text).unwrap();
        (p.equations[0].clone(), p.domains)
    }

    #[test]
    fn profile_power() {
        let (eq, doms) = eq_of("4^x = 1 ; x in N0");
        let p = residue_profile(&eq, "x", 13, &doms).unwrap();
        assert_eq!(p.preperiod, 0);
        assert_eq!(p.period, 6);
        // reachable power residues of 4^x mod 13
        let mut vals = BTreeSet::new();
        let mut x = Int::from(1);
        for _ in 0..13 {
            vals.insert((x.clone() % Int::from(13)).to_u64().unwrap());
            x = x * 4 % 13;
        }
        assert_eq!(
            vals,
            [1u64, 4, 3, 12, 9, 10].into_iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn profile_factorial() {
        let (eq, doms) = eq_of("y! = 1 ; y in N0");
        let p = residue_profile(&eq, "y", 11, &doms).unwrap();
        assert_eq!(p.preperiod, 11);
        assert_eq!(p.horizon, 12);
        // with a polynomial occurrence the v mod m component matters too
        let (eq, doms) = eq_of("y! + y = 1 ; y in N0");
        let p = residue_profile(&eq, "y", 11, &doms).unwrap();
        assert_eq!(p.preperiod, 11);
        assert_eq!(p.horizon, 22);
    }

    #[test]
    fn profile_polynomial() {
        let (eq, doms) = eq_of("x^2 = 0 ; x in Z");
        let p = residue_profile(&eq, "x", 5, &doms).unwrap();
        assert_eq!(p.horizon, 5);
        assert_eq!(p.preperiod, 0);
    }

    #[test]
    fn profile_rejects_unbounded_exponential() {
        let (eq, doms) = eq_of("2^x = 4 ; x in Z");
        assert!(matches!(
            residue_profile(&eq, "x", 3, &doms),
            Err(ModularError::DomainUnbounded(_))
        ));
    }

    #[test]
    fn periodicity_matches_direct_iteration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let b = loop {
                let b = rng.gen_range(-20i64..=20);
                if b.abs() >= 2 {
                    break b;
                }
            };
            let m = rng.gen_range(2u64..=40);
            let (p, l) = power_cycle(&Int::from(b), m);
            let horizon = 4 * (p + l);
            let modv = |x: Int| {
                let mut r = x % Int::from(m);
                if r.is_negative() {
                    r += Int::from(m);
                }
                r
            };
            let mut pow = Int::from(1);
            let mut seq = Vec::new();
            for _ in 0..=horizon {
                seq.push(modv(pow.clone()));
                pow *= Int::from(b);
            }
            for v in p..=horizon.saturating_sub(l) {
                assert_eq!(
                    seq[v as usize],
                    seq[(v + l) as usize],
                    "b={b} m={m} p={p} l={l} v={v}"
                );
            }
        }
    }

    #[test]
    fn states_quadratic_nonresidue() {
        let (eq, doms) = eq_of("15*x^2 + 6*y^2 = 12 ; x,y in Z");
        let t = satisfying_states(&eq, 5, &doms, 1 << 20, 64).unwrap();
        assert!(t.satisfying.is_empty());
    }

    #[test]
    fn states_cubes_mod_9() {
        let (eq, doms) = eq_of("x^3 + y^3 + z^3 = 58 ; x,y,z in Z");
        let t = satisfying_states(&eq, 9, &doms, 1 << 20, 64).unwrap();
        assert!(t.satisfying.is_empty());
    }

    #[test]
    fn states_trivial_difference() {
        let (eq, doms) = eq_of("x - y = 0 ; x,y in Z");
        let t = satisfying_states(&eq, 3, &doms, 1 << 20, 64).unwrap();
        let expect: Vec<Vec<u64>> = vec![vec![0, 0], vec![1, 1], vec![2, 2]];
        assert_eq!(t.satisfying, expect);
    }

    #[test]
    fn obstruction_examples() {
        let (eq, doms) = eq_of("15*x^2 - 35*y^3 = 10 ; x,y in Z");
        let (cert, _) = find_obstruction(&eq, &default_moduli(64), &doms, 1 << 22);
        assert_eq!(cert.unwrap().modulus, 7);

        let (eq, doms) = eq_of("4^x - 12^y = 7 ; x,y in N0");
        let (cert, _) = find_obstruction(&eq, &[13], &doms, 1 << 22);
        assert_eq!(cert.unwrap().modulus, 13);

        let (eq, doms) = eq_of("x - y = 0 ; x,y in Z");
        let (cert, _) = find_obstruction(&eq, &default_moduli(64), &doms, 1 << 22);
        assert!(cert.is_none());
    }

    #[test]
    fn parity_examples_certify_at_2() {
        // three parity-violating equations; each certifies with moduli=[2]
        for src in [
            "x^4 + 4*y^3 - 7*x^2 - 12*y + 7 = 0 ; x,y in Z",
            "x^9 - x = y^5 - 13*y^2 + 1 ; x,y in Z",
            "17^x - 13^y = 19^z ; x,y,z in N0",
        ] {
            let (eq, doms) = eq_of(src);
            let (cert, _) = find_obstruction(&eq, &[2], &doms, 1 << 22);
            assert_eq!(cert.expect(src).modulus, 2, "{src}");
        }
        // the fourth parity example is satisfiable: parity only restricts it
        let (eq, doms) = eq_of("18^x + 16^y = 19^z ; x,y,z in N0");
        let (cert, _) = find_obstruction(&eq, &[2], &doms, 1 << 22);
        assert!(cert.is_none());
    }

    #[test]
    fn congruence_projection_even_y() {
        // 5x + 4^y - 11 ≡ 0 (mod 5): y even
        let (eq, doms) = eq_of("5*x + 4^y = 11 ; x in Z, y in N0");
        let t = satisfying_states(&eq, 5, &doms, 1 << 20, 4096).unwrap();
        let proj = congruence_constraints(&t);
        let y = &proj["y"];
        assert!(y.exact.iter().all(|r| r % 2 == 0));
        assert!(y.classes.iter().all(|r| r % 2 == 0));
        assert!(!y.classes.is_empty());

        // x^2 - 3y - 2z ≡ 0 (mod 2): x ≡ y (mod 2)
        let (eq, doms) = eq_of("x^2 - 3*y - 2*z = 0 ; x,y,z in Z");
        let t = satisfying_states(&eq, 2, &doms, 1 << 20, 4096).unwrap();
        for s in &t.satisfying {
            let xi = t.vars.iter().position(|v| v == "x").unwrap();
            let yi = t.vars.iter().position(|v| v == "y").unwrap();
            assert_eq!(s[xi] % 2, s[yi] % 2);
        }
    }

    #[test]
    fn soundness_fuzz() {
        // certified-unsatisfiable equations never evaluate to zero
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let cases = [
            "15*x^2 + 6*y^2 = 12 ; x,y in Z",
            "15*x^2 - 35*y^3 = 10 ; x,y in Z",
            "x^3 + y^3 + z^3 = 58 ; x,y,z in Z",
            "x^4 - x^2 + y^4 - y^2 = 18 ; x,y in Z",
        ];
        for src in cases {
            let (eq, doms) = eq_of(src);
            let (cert, _) = find_obstruction(&eq, &default_moduli(64), &doms, 1 << 22);
            assert!(cert.is_some(), "{src}");
            for _ in 0..2500 {
                let a: BTreeMap<Var, Int> = eq
                    .variables()
                    .into_iter()
                    .map(|v| {
                        let dom = doms.get(&v).cloned().unwrap_or(Domain::Z);
                        let x = loop {
                            let x = rng.gen_range(-60i64..=60);
                            if dom.contains(&Int::from(x)) {
                                break x;
                            }
                        };
                        (v, Int::from(x))
                    })
                    .collect();
                if let Ok(v) = eq.eval(&a) {
                    assert!(!v.is_zero(), "{src} satisfied at {a:?}");
                }
            }
        }
    }

    #[test]
    fn monotone_coverage_for_satisfiable() {
        // equations with known witnesses have nonempty states for all m <= 64
        for (src, _witness) in [
            ("x - y = 0 ; x,y in Z", ()),
            ("4^x - 3^y = 1 ; x,y in N0", ()),
            ("x^4 + y^4 + z^4 = 3042 ; x,y,z in Z", ()),
        ] {
            let (eq, doms) = eq_of(src);
            for m in 2..=64u64 {
                match satisfying_states(&eq, m, &doms, 1 << 24, 1) {
                    Ok(t) => assert!(!t.satisfying.is_empty(), "{src} m={m}"),
                    Err(ModularError::StateBudgetExceeded { .. }) => {}
                    Err(e) => panic!("{src} m={m}: {e}"),
                }
            }
        }
    }
}
