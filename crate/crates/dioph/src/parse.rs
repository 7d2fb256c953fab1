//! Text front end: grammar for equations, systems, domains and constraints,
//! plus a canonical renderer for round-tripping.
//!
//! Grammar (EBNF):
//! ```text
//! problem   := system [';' domainlist] ;
//! system    := equation { ('and' | NEWLINE) equation } ;
//! equation  := expr '=' expr ;
//! expr      := term { ('+'|'-') term } ;
//! term      := factor { ('*'|'/') factor } ;
//! factor    := INT | IDENT ['!'] | IDENT '^' INT | INT '^' IDENT | '(' expr ')' | '-' factor ;
//! domainlist:= clause { ',' clause } ;
//! clause    := identlist 'in' ('Z'|'N'|'N0'|'[' INT ',' INT ']') | product '!=' '0' ;
//! ```
//! Multiplication is explicit, `^` binds tighter than unary minus and `!` is
//! a postfix on a single variable only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::{
    clear_denominators, Constraint, Domain, ExprError, Int, Monomial, NormalizedEquation, Problem,
    RawExpr, Var,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    Unsupported {
        line: usize,
        col: usize,
        what: String,
    },
    UnknownDomainName {
        line: usize,
        col: usize,
        name: String,
    },
    Expr(ExprError),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                line,
                col,
                expected,
                found,
            } => write!(f, "{line}:{col}: expected {expected}, found {found}"),
            ParseError::Unsupported { line, col, what } => {
                write!(f, "{line}:{col}: unsupported term: {what}")
            }
            ParseError::UnknownDomainName { line, col, name } => {
                write!(f, "{line}:{col}: unknown domain name {name}")
            }
            ParseError::Expr(e) => write!(f, "{e}"),
        }
    }
}

impl From<ExprError> for ParseError {
    fn from(e: ExprError) -> Self {
        ParseError::Expr(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Bang,
    NotEq,
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Newline,
    And,
    In,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::Bang => write!(f, "!"),
            Tok::NotEq => write!(f, "!="),
            Tok::Eq => write!(f, "="),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Semi => write!(f, ";"),
            Tok::Newline => write!(f, "newline"),
            Tok::And => write!(f, "and"),
            Tok::In => write!(f, "in"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let here = (line, col);
        match c {
            '\n' => {
                toks.push((Tok::Newline, here.0, here.1));
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '+' => toks.push((Tok::Plus, here.0, here.1)),
            '-' => toks.push((Tok::Minus, here.0, here.1)),
            '*' => toks.push((Tok::Star, here.0, here.1)),
            '/' => toks.push((Tok::Slash, here.0, here.1)),
            '^' => toks.push((Tok::Caret, here.0, here.1)),
            '=' => toks.push((Tok::Eq, here.0, here.1)),
            '(' => toks.push((Tok::LParen, here.0, here.1)),
            ')' => toks.push((Tok::RParen, here.0, here.1)),
            '[' => toks.push((Tok::LBracket, here.0, here.1)),
            ']' => toks.push((Tok::RBracket, here.0, here.1)),
            ',' => toks.push((Tok::Comma, here.0, here.1)),
            ';' => toks.push((Tok::Semi, here.0, here.1)),
            '!' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '=' {
                    toks.push((Tok::NotEq, here.0, here.1));
                    i += 1;
                    col += 1;
                } else {
                    toks.push((Tok::Bang, here.0, here.1));
                }
            }
            '0'..='9' => {
                let mut s = String::new();
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    s.push(bytes[i]);
                    i += 1;
                    col += 1;
                }
                toks.push((Tok::Int(s.parse().unwrap()), here.0, here.1));
                continue;
            }
            'a'..='z' => {
                let mut s = String::new();
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase()
                        || bytes[i].is_ascii_digit()
                        || bytes[i] == '_')
                {
                    s.push(bytes[i]);
                    i += 1;
                    col += 1;
                }
                let t = match s.as_str() {
                    "and" => Tok::And,
                    "in" => Tok::In,
                    _ => Tok::Ident(s),
                };
                toks.push((t, here.0, here.1));
                continue;
            }
            _ => {
                // uppercase domain names Z/N/N0 are lexed here
                if c.is_ascii_uppercase() {
                    let mut s = String::new();
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                        s.push(bytes[i]);
                        i += 1;
                        col += 1;
                    }
                    toks.push((Tok::Ident(s), here.0, here.1));
                    continue;
                }
                return Err(ParseError::Syntax {
                    line,
                    col,
                    expected: "token".into(),
                    found: c.to_string(),
                });
            }
        }
        i += 1;
        col += 1;
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: (line, col),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        let found = self
            .peek()
            .map(|t| t.to_string())
            .unwrap_or_else(|| "end of input".into());
        ParseError::Syntax {
            line,
            col,
            expected: expected.into(),
            found,
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.next();
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek() == Some(&Tok::Newline) {
            self.next();
        }
    }
}

fn parse_expr(lx: &mut Lexer) -> Result<RawExpr, ParseError> {
    let mut acc = parse_term(lx)?;
    loop {
        match lx.peek() {
            Some(Tok::Plus) => {
                lx.next();
                let rhs = parse_term(lx)?;
                acc = RawExpr::Add(Box::new(acc), Box::new(rhs));
            }
            Some(Tok::Minus) => {
                lx.next();
                let rhs = parse_term(lx)?;
                acc = RawExpr::Sub(Box::new(acc), Box::new(rhs));
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(lx: &mut Lexer) -> Result<RawExpr, ParseError> {
    let mut acc = parse_factor(lx)?;
    loop {
        match lx.peek() {
            Some(Tok::Star) => {
                lx.next();
                let rhs = parse_factor(lx)?;
                acc = RawExpr::Mul(Box::new(acc), Box::new(rhs));
            }
            Some(Tok::Slash) => {
                lx.next();
                let rhs = parse_factor(lx)?;
                acc = RawExpr::Div(Box::new(acc), Box::new(rhs));
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_factor(lx: &mut Lexer) -> Result<RawExpr, ParseError> {
    let (line, col) = lx.here();
    match lx.peek().cloned() {
        Some(Tok::Minus) => {
            lx.next();
            let inner = parse_factor(lx)?;
            Ok(RawExpr::Neg(Box::new(inner)))
        }
        Some(Tok::Int(n)) => {
            lx.next();
            if lx.peek() == Some(&Tok::Caret) {
                lx.next();
                match lx.peek().cloned() {
                    Some(Tok::Ident(v)) if is_var(&v) => {
                        lx.next();
                        Ok(RawExpr::Exp(n, v))
                    }
                    Some(Tok::Int(k)) => {
                        // constant^constant folds to a constant
                        lx.next();
                        let e = k.to_u32().ok_or(ParseError::Unsupported {
                            line,
                            col,
                            what: "huge constant exponent".into(),
                        })?;
                        Ok(RawExpr::Int(n.pow(e)))
                    }
                    _ => Err(lx.err("variable or integer exponent")),
                }
            } else {
                Ok(RawExpr::Int(n))
            }
        }
        Some(Tok::Ident(v)) => {
            lx.next();
            if !is_var(&v) {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    expected: "identifier [a-z][a-z0-9_]*".into(),
                    found: v,
                });
            }
            match lx.peek() {
                Some(Tok::Bang) => {
                    lx.next();
                    Ok(RawExpr::Fact(v))
                }
                Some(Tok::Caret) => {
                    lx.next();
                    let (l2, c2) = lx.here();
                    match lx.next() {
                        Some(Tok::Int(k)) => {
                            let e = k.to_u32().filter(|e| *e >= 1).ok_or(ParseError::Syntax {
                                line: l2,
                                col: c2,
                                expected: "positive integer exponent".into(),
                                found: k.to_string(),
                            })?;
                            Ok(RawExpr::Pow(v, e))
                        }
                        Some(Tok::Ident(w)) => Err(ParseError::Unsupported {
                            line: l2,
                            col: c2,
                            what: format!("variable exponent {v}^{w}"),
                        }),
                        _ => Err(ParseError::Syntax {
                            line: l2,
                            col: c2,
                            expected: "integer exponent".into(),
                            found: "end of input".into(),
                        }),
                    }
                }
                _ => Ok(RawExpr::Var(v)),
            }
        }
        Some(Tok::LParen) => {
            lx.next();
            let inner = parse_expr(lx)?;
            lx.expect(Tok::RParen, ")")?;
            Ok(inner)
        }
        _ => Err(lx.err("integer, identifier or (")),
    }
}

fn is_var(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_lowercase())
        && ch.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn parse_equation(lx: &mut Lexer) -> Result<(NormalizedEquation, BTreeSet<Var>), ParseError> {
    let lhs = parse_expr(lx)?;
    lx.expect(Tok::Eq, "=")?;
    let rhs = parse_expr(lx)?;
    let (eq, nonv) = clear_denominators(&lhs, &rhs).map_err(map_expr_err(lx))?;
    Ok((eq, nonv))
}

fn map_expr_err(lx: &Lexer) -> impl Fn(ExprError) -> ParseError + '_ {
    let (line, col) = lx.here();
    move |e| match e {
        ExprError::UnsupportedTerm(what) => ParseError::Unsupported { line, col, what },
        other => ParseError::Expr(other),
    }
}

/// Parse a full problem: a system of equations with optional domain clauses.
/// Every variable defaults to domain Z when the clause is omitted.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut lx = lex(text)?;
    lx.skip_newlines();
    let mut equations = Vec::new();
    let (eq, mut nonv) = parse_equation(&mut lx)?;
    equations.push(eq);
    loop {
        match lx.peek() {
            Some(Tok::And) => {
                lx.next();
                lx.skip_newlines();
                let (eq, nv) = parse_equation(&mut lx)?;
                nonv.extend(nv);
                equations.push(eq);
            }
            Some(Tok::Newline) => {
                lx.skip_newlines();
                if lx.peek().is_none() || lx.peek() == Some(&Tok::Semi) {
                    continue;
                }
                let (eq, nv) = parse_equation(&mut lx)?;
                nonv.extend(nv);
                equations.push(eq);
            }
            _ => break,
        }
    }

    let mut domains: BTreeMap<Var, Domain> = BTreeMap::new();
    let mut constraints: Vec<Constraint> = Vec::new();
    if lx.peek() == Some(&Tok::Semi) {
        lx.next();
        lx.skip_newlines();
        while lx.peek().is_some() {
            parse_clause(&mut lx, &mut domains, &mut constraints)?;
            match lx.peek() {
                Some(Tok::Comma) => {
                    lx.next();
                    lx.skip_newlines();
                }
                None => break,
                Some(Tok::Newline) => {
                    lx.skip_newlines();
                }
                _ => return Err(lx.err(", or end of input")),
            }
        }
    }
    if lx.peek().is_some() {
        return Err(lx.err("end of input"));
    }

    let mut problem = Problem {
        equations,
        domains,
        constraints,
    };
    // default domain Z for every variable not covered by a clause
    for v in problem.variables() {
        problem.domains.entry(v).or_insert(Domain::Z);
    }
    if !nonv.is_empty() {
        problem
            .constraints
            .push(Constraint::ProductNonzero(nonv.into_iter().collect()));
        dedup_constraints(&mut problem.constraints);
    }
    Ok(problem)
}

fn dedup_constraints(cs: &mut Vec<Constraint>) {
    let mut vars: BTreeSet<Var> = BTreeSet::new();
    for c in cs.iter() {
        let Constraint::ProductNonzero(vs) = c;
        vars.extend(vs.iter().cloned());
    }
    cs.clear();
    if !vars.is_empty() {
        cs.push(Constraint::ProductNonzero(vars.into_iter().collect()));
    }
}

fn parse_clause(
    lx: &mut Lexer,
    domains: &mut BTreeMap<Var, Domain>,
    constraints: &mut Vec<Constraint>,
) -> Result<(), ParseError> {
    // identlist 'in' domain   |   ident {'*' ident} '!=' '0'
    let mut idents = Vec::new();
    let (line, col) = lx.here();
    match lx.next() {
        Some(Tok::Ident(v)) if is_var(&v) => idents.push(v),
        other => {
            return Err(ParseError::Syntax {
                line,
                col,
                expected: "identifier".into(),
                found: other.map(|t| t.to_string()).unwrap_or("end of input".into()),
            })
        }
    }
    match lx.peek() {
        Some(Tok::Star) => {
            while lx.peek() == Some(&Tok::Star) {
                lx.next();
                let (l2, c2) = lx.here();
                match lx.next() {
                    Some(Tok::Ident(v)) if is_var(&v) => idents.push(v),
                    other => {
                        return Err(ParseError::Syntax {
                            line: l2,
                            col: c2,
                            expected: "identifier".into(),
                            found: other.map(|t| t.to_string()).unwrap_or("end of input".into()),
                        })
                    }
                }
            }
            lx.expect(Tok::NotEq, "!=")?;
            let (l2, c2) = lx.here();
            match lx.next() {
                Some(Tok::Int(n)) if n.is_zero() => {}
                other => {
                    return Err(ParseError::Syntax {
                        line: l2,
                        col: c2,
                        expected: "0".into(),
                        found: other.map(|t| t.to_string()).unwrap_or("end of input".into()),
                    })
                }
            }
            constraints.push(Constraint::ProductNonzero(idents));
            Ok(())
        }
        _ => {
            while lx.peek() == Some(&Tok::Comma) {
                // lookahead: a comma may end the clause list at `x,y in Z, z in N`
                // so only consume ident+comma chains before `in`
                let save = lx.pos;
                lx.next();
                match lx.peek().cloned() {
                    Some(Tok::Ident(v)) if is_var(&v) => {
                        // could be the next clause; decide after seeing what follows
                        lx.next();
                        match lx.peek() {
                            Some(Tok::Comma) | Some(Tok::In) => idents.push(v),
                            _ => {
                                lx.pos = save;
                                break;
                            }
                        }
                    }
                    _ => {
                        lx.pos = save;
                        break;
                    }
                }
            }
            lx.expect(Tok::In, "in")?;
            let (l2, c2) = lx.here();
            let dom = match lx.next() {
                Some(Tok::Ident(name)) => match name.as_str() {
                    "Z" => Domain::Z,
                    "N" => Domain::N,
                    "N0" => Domain::N0,
                    _ => {
                        return Err(ParseError::UnknownDomainName {
                            line: l2,
                            col: c2,
                            name,
                        })
                    }
                },
                Some(Tok::LBracket) => {
                    let lo = parse_signed_int(lx)?;
                    lx.expect(Tok::Comma, ",")?;
                    let hi = parse_signed_int(lx)?;
                    lx.expect(Tok::RBracket, "]")?;
                    Domain::Range(lo, hi)
                }
                other => {
                    return Err(ParseError::Syntax {
                        line: l2,
                        col: c2,
                        expected: "Z, N, N0 or [lo,hi]".into(),
                        found: other.map(|t| t.to_string()).unwrap_or("end of input".into()),
                    })
                }
            };
            for v in idents {
                domains.insert(v, dom.clone());
            }
            Ok(())
        }
    }
}

fn parse_signed_int(lx: &mut Lexer) -> Result<Int, ParseError> {
    let neg = if lx.peek() == Some(&Tok::Minus) {
        lx.next();
        true
    } else {
        false
    };
    let (line, col) = lx.here();
    match lx.next() {
        Some(Tok::Int(n)) => Ok(if neg { -n } else { n }),
        other => Err(ParseError::Syntax {
            line,
            col,
            expected: "integer".into(),
            found: other.map(|t| t.to_string()).unwrap_or("end of input".into()),
        }),
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn render_monomial(m: &Monomial, first: bool, out: &mut String) {
    let c = &m.coeff;
    if c.is_negative() {
        out.push_str(if first { "-" } else { " - " });
    } else if !first {
        out.push_str(" + ");
    }
    let abs = c.abs();
    let mut parts: Vec<String> = Vec::new();
    if !abs.is_one() || m.is_constant() {
        parts.push(abs.to_string());
    }
    for (v, e) in &m.powers {
        if *e == 1 {
            parts.push(v.clone());
        } else {
            parts.push(format!("{v}^{e}"));
        }
    }
    for (v, b) in &m.exponentials {
        parts.push(format!("{b}^{v}"));
    }
    for v in &m.factorials {
        parts.push(format!("{v}!"));
    }
    out.push_str(&parts.join("*"));
}

pub fn render_equation(eq: &NormalizedEquation) -> String {
    let mut out = String::new();
    let mut first = true;
    for t in &eq.terms {
        render_monomial(t, first, &mut out);
        first = false;
    }
    if !eq.constant.is_zero() || first {
        render_monomial(&Monomial::constant(eq.constant.clone()), first, &mut out);
    }
    out.push_str(" = 0");
    out
}

/// Canonical textual form; `parse_problem(render(p))` structurally equals `p`.
pub fn render(problem: &Problem) -> String {
    let mut out = String::new();
    for (i, eq) in problem.equations.iter().enumerate() {
        if i > 0 {
            out.push_str(" and ");
        }
        out.push_str(&render_equation(eq));
    }
    out.push_str(" ; ");
    // group variables by identical domain, keep variable order
    let mut clauses: Vec<String> = Vec::new();
    let mut grouped: Vec<(Domain, Vec<Var>)> = Vec::new();
    for v in problem.variables() {
        let d = problem.domain(&v);
        match grouped.iter_mut().find(|(gd, _)| *gd == d) {
            Some((_, vs)) => vs.push(v),
            None => grouped.push((d, vec![v])),
        }
    }
    for (d, vs) in grouped {
        clauses.push(format!("{} in {}", vs.join(","), d));
    }
    for c in &problem.constraints {
        let Constraint::ProductNonzero(vs) = c;
        clauses.push(format!("{} != 0", vs.join("*")));
    }
    out.push_str(&clauses.join(", "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn parse_simple() {
        let p = parse_problem("15*x^2 + 6*y^2 = 12 ; x,y in Z").unwrap();
        assert_eq!(p.equations.len(), 1);
        assert_eq!(p.domain("x"), Domain::Z);
        assert_eq!(p.domain("y"), Domain::Z);
    }

    #[test]
    fn parse_mixed_domains() {
        let p = parse_problem("2^x + 3^y = z^2 ; x,y in N0, z in Z").unwrap();
        assert_eq!(p.domain("x"), Domain::N0);
        assert_eq!(p.domain("y"), Domain::N0);
        assert_eq!(p.domain("z"), Domain::Z);
    }

    #[test]
    fn parse_constraint_and_fractions() {
        let p = parse_problem("1/x + 1/y + 1/z = 5 ; x,y,z in Z, x*y*z != 0").unwrap();
        let nv = p.nonvanishing();
        assert_eq!(nv.len(), 3);
        assert!(p.equations[0].frac_meta.is_some());
    }

    #[test]
    fn parse_system_with_and() {
        let p = parse_problem("3*x^2 + 4*y = 19 and 5*x - 2*y = 3 ; x,y in Z").unwrap();
        assert_eq!(p.equations.len(), 2);
    }

    #[test]
    fn parse_system_with_newline() {
        let p = parse_problem("x + y = 1\nx - y = 1 ; x,y in Z").unwrap();
        assert_eq!(p.equations.len(), 2);
    }

    #[test]
    fn parse_interval_domain() {
        let p = parse_problem("x^2 = 4 ; x in [-7,7]").unwrap();
        assert_eq!(
            p.domain("x"),
            Domain::Range(Int::from(-7), Int::from(7))
        );
    }

    #[test]
    fn default_domain_is_z() {
        let p = parse_problem("x + y = 1").unwrap();
        assert_eq!(p.domain("x"), Domain::Z);
        assert_eq!(p.domain("y"), Domain::Z);
    }

    #[test]
    fn var_exponent_is_unsupported() {
        let e = parse_problem("x^y = 2").unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { .. }));
    }

    #[test]
    fn error_positions_point_at_offender() {
        let cases = [
            ("15x^2 = 1", 1, 3),      // implicit multiplication: ident after int
            ("x^2 + = 1", 1, 7),      // operand expected at '='
            ("x in Q = 1", 1, 3),     // 'in' keyword inside expression
            ("x + y = ; x in Z", 1, 9),
            ("x = 1 ; x in Q", 1, 14), // unknown domain name
        ];
        for (src, line, col) in cases {
            let err = parse_problem(src).unwrap_err();
            let (l, c) = match err {
                ParseError::Syntax { line, col, .. } => (line, col),
                ParseError::UnknownDomainName { line, col, .. } => (line, col),
                ParseError::Unsupported { line, col, .. } => (line, col),
                ParseError::Expr(_) => panic!("expected positioned error for {src}"),
            };
            assert_eq!((l, c), (line, col), "position for {src:?}");
        }
    }

    #[test]
    fn unknown_domain() {
        let e = parse_problem("x = 1 ; x in Q").unwrap_err();
        assert!(matches!(e, ParseError::UnknownDomainName { .. }));
    }

    #[test]
    fn render_round_trip() {
        let sources = [
            "x^2 - 1 = 0 ; x in Z",
            "15*x^2 + 6*y^2 = 12 ; x,y in Z",
            "2^x + 3^y = z^2 ; x,y in N0, z in Z",
            "x^2 + y^2 - z! = 3 ; x,y in Z, z in N0",
            "1/x + 1/y = 1 ; x,y in Z",
            "3*x*y + 5*x^3*y = 230 and x^2 + x*y = 14 ; x,y in Z",
            "x + y + z = x*y*z ; x,y,z in Z, x*y*z != 0",
        ];
        // rendering emits the cleared canonical form, so fractional metadata
        // is not recoverable; structural identity covers terms, constants,
        // domains and the nonvanishing semantics
        fn key(p: &Problem) -> impl PartialEq + std::fmt::Debug {
            (
                p.equations
                    .iter()
                    .map(|e| (e.terms.clone(), e.constant.clone()))
                    .collect::<Vec<_>>(),
                p.domains.clone(),
                p.nonvanishing(),
            )
        }
        for src in sources {
            let p = parse_problem(src).unwrap();
            let rendered = render(&p);
            let p2 = parse_problem(&rendered)
                .unwrap_or_else(|e| panic!("render of {src:?} unparseable: {rendered:?}: {e}"));
            assert_eq!(key(&p), key(&p2), "round trip {src:?} -> {rendered:?}");
            assert_eq!(rendered, render(&p2), "double render {src:?}");
        }
    }

    #[test]
    fn render_simple_forms() {
        let p = parse_problem("x^2 - 1 = 0 ; x in Z").unwrap();
        assert_eq!(render(&p), "x^2 - 1 = 0 ; x in Z");
        let p = parse_problem("0 = 0").unwrap();
        assert_eq!(render(&p), "0 = 0 ; ");
        assert!(p.equations[0].is_trivially_true());
        assert!(parse_problem(&render(&p)).is_ok());
    }

    #[test]
    fn caret_binds_tighter_than_unary_minus() {
        let p = parse_problem("-x^2 = 4 ; x in Z").unwrap();
        // -x^2 means -(x^2): at x=2 the lhs-rhs is -4-4=-8
        let a: BTreeMap<Var, Int> = [("x".to_string(), Int::from(2))].into_iter().collect();
        assert_eq!(p.equations[0].eval(&a).unwrap(), Int::from(-8));
    }

    #[test]
    fn constant_power_folds() {
        let p = parse_problem("2^3 = x ; x in Z").unwrap();
        let a: BTreeMap<Var, Int> = [("x".to_string(), Int::from(8))].into_iter().collect();
        assert!(p.equations[0].eval(&a).unwrap().is_zero());
    }
}
