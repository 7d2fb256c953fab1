//! Closed-form solver for linear Diophantine equations and integer linear
//! systems.
//!
//! Single equations reduce by iterated two-variable elimination; systems go
//! through an integer column reduction (Hermite-style) with exact arithmetic,
//! so consistency checks and the kernel lattice stay integral throughout.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::expr::Int;

/// Solution set {particular + sum t_i * basis_i : t_i in Z}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineLatticeFamily {
    pub vars: Vec<String>,
    pub particular: Vec<Int>,
    pub basis: Vec<Vec<Int>>,
}

impl AffineLatticeFamily {
    /// Member at the given lattice coordinates.
    pub fn member(&self, ts: &[Int]) -> Vec<Int> {
        let mut out = self.particular.clone();
        for (t, g) in ts.iter().zip(&self.basis) {
            for (o, gi) in out.iter_mut().zip(g) {
                *o += t * gi;
            }
        }
        out
    }
}

/// Outcome of a linear solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearOutcome {
    /// gcd of the coefficients does not divide the right-hand side.
    NoSolution { gcd: Int, rhs: Int },
    Family(AffineLatticeFamily),
}

/// Extended Euclidean algorithm: g = gcd(a,b) > 0 with s*a + t*b = g.
/// Errors only when both inputs are zero.
pub fn extended_gcd(a: &Int, b: &Int) -> Result<(Int, Int, Int), &'static str> {
    if a.is_zero() && b.is_zero() {
        return Err("gcd(0, 0) undefined");
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Int::one(), Int::zero());
    let (mut t0, mut t1) = (Int::zero(), Int::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r);
        let s = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s);
        let t = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t);
    }
    if r0.is_negative() {
        r0 = -r0;
        s0 = -s0;
        t0 = -t0;
    }
    Ok((r0, s0, t0))
}

/// Solve a1 x1 + ... + an xn = b over the integers.
///
/// All-zero coefficient vectors are solvable iff b = 0 (the family is all of
/// Z^n). Otherwise the equation has a solution iff gcd(a1..an) | b, with an
/// (n-1)-dimensional solution lattice.
pub fn solve_linear(coeffs: &[(String, Int)], b: &Int) -> LinearOutcome {
    let vars: Vec<String> = coeffs.iter().map(|(v, _)| v.clone()).collect();
    let a: Vec<Int> = coeffs.iter().map(|(_, c)| c.clone()).collect();
    if a.iter().all(|c| c.is_zero()) {
        if b.is_zero() {
            let n = vars.len();
            let basis = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { Int::one() } else { Int::zero() })
                        .collect()
                })
                .collect();
            return LinearOutcome::Family(AffineLatticeFamily {
                vars,
                particular: vec![Int::zero(); n],
                basis,
            });
        }
        return LinearOutcome::NoSolution {
            gcd: Int::zero(),
            rhs: b.clone(),
        };
    }
    match solve_system(std::slice::from_ref(&a), std::slice::from_ref(b)) {
        SystemOutcome::Family { particular, basis } => {
            LinearOutcome::Family(normalize_family(AffineLatticeFamily {
                vars,
                particular,
                basis,
            }))
        }
        SystemOutcome::Inconsistent { .. } => {
            let mut g = Int::zero();
            for c in &a {
                g = g.gcd(c);
            }
            LinearOutcome::NoSolution {
                gcd: g,
                rhs: b.clone(),
            }
        }
    }
}

/// Raw outcome of an integer system solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemOutcome {
    Family {
        particular: Vec<Int>,
        basis: Vec<Vec<Int>>,
    },
    /// Row index whose reduced form is 0 = c with c != 0 (an unsatisfiable
    /// congruence / rank certificate).
    Inconsistent { row: usize, residue: Int },
}

/// Solve A x = b over Z by column reduction: find unimodular U with A U
/// lower-triangular-ish (column HNF), then back-substitute.
pub fn solve_system(a: &[Vec<Int>], b: &[Int]) -> SystemOutcome {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut h: Vec<Vec<Int>> = a.to_vec();
    // U starts as identity; columns of U track column operations on A.
    let mut u: Vec<Vec<Int>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect();

    let col_of = |h: &Vec<Vec<Int>>, j: usize, i: usize| h[i][j].clone();
    let mut pivot_col = 0usize;
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    for row in 0..rows {
        if pivot_col >= cols {
            break;
        }
        // gcd-out the row across columns pivot_col..cols
        loop {
            // find column with smallest nonzero |entry| in this row
            let mut best: Option<usize> = None;
            for j in pivot_col..cols {
                if !h[row][j].is_zero() {
                    let better = match best {
                        None => true,
                        Some(k) => h[row][j].abs() < h[row][k].abs(),
                    };
                    if better {
                        best = Some(j);
                    }
                }
            }
            let Some(jmin) = best else {
                break;
            };
            // move it into pivot position
            if jmin != pivot_col {
                for r in h.iter_mut() {
                    r.swap(jmin, pivot_col);
                }
                for r in u.iter_mut() {
                    r.swap(jmin, pivot_col);
                }
            }
            // reduce all other columns by the pivot
            let p = col_of(&h, pivot_col, row);
            let mut done = true;
            for j in (pivot_col + 1)..cols {
                if h[row][j].is_zero() {
                    continue;
                }
                let q = div_round(&h[row][j], &p);
                if !q.is_zero() {
                    for r in h.iter_mut() {
                        let sub = &q * &r[pivot_col];
                        r[j] -= sub;
                    }
                    for r in u.iter_mut() {
                        let sub = &q * &r[pivot_col];
                        r[j] -= sub;
                    }
                }
                if !h[row][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !h[row][pivot_col].is_zero() {
            pivots.push((row, pivot_col));
            pivot_col += 1;
        }
    }

    // back-substitution: y (coordinates in the U basis)
    let mut y = vec![Int::zero(); cols];
    for i in 0..rows {
        let mut rhs = b[i].clone();
        for (pr, pc) in &pivots {
            if *pr >= i {
                break;
            }
            rhs -= &h[i][*pc] * &y[*pc];
        }
        if let Some((_, pc)) = pivots.iter().find(|(pr, _)| *pr == i) {
            let (q, r) = rhs.div_rem(&h[i][*pc]);
            if !r.is_zero() {
                return SystemOutcome::Inconsistent { row: i, residue: r };
            }
            y[*pc] = q;
        } else if !rhs.is_zero() {
            return SystemOutcome::Inconsistent { row: i, residue: rhs };
        }
    }

    // particular solution x = U y; kernel basis = non-pivot columns of U
    let particular: Vec<Int> = (0..cols)
        .map(|i| {
            let mut acc = Int::zero();
            for (j, yj) in y.iter().enumerate() {
                acc += &u[i][j] * yj;
            }
            acc
        })
        .collect();
    let pivot_cols: Vec<usize> = pivots.iter().map(|(_, c)| *c).collect();
    let basis: Vec<Vec<Int>> = (0..cols)
        .filter(|j| !pivot_cols.contains(j))
        .map(|j| (0..cols).map(|i| u[i][j].clone()).collect())
        .collect();
    SystemOutcome::Family { particular, basis }
}

/// Rounded division so column reductions shrink entries symmetrically.
fn div_round(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_rem(b);
    let two_r = Int::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) != (b.is_negative()) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Deterministic presentation: basis vectors with positive leading entry and
/// the particular vector reduced against single-vector bases.
pub fn normalize_family(mut fam: AffineLatticeFamily) -> AffineLatticeFamily {
    for g in &mut fam.basis {
        if let Some(first) = g.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for x in g.iter_mut() {
                    *x = -x.clone();
                }
            }
        }
    }
    fam.basis.sort();
    if fam.basis.len() == 1 {
        let g = fam.basis[0].clone();
        let norm2: Int = g.iter().map(|x| x * x).sum();
        if !norm2.is_zero() {
            let dot: Int = fam.particular.iter().zip(&g).map(|(p, x)| p * x).sum();
            let t = div_round(&dot, &norm2);
            for (p, x) in fam.particular.iter_mut().zip(&g) {
                *p -= &t * x;
            }
        }
    }
    fam
}
