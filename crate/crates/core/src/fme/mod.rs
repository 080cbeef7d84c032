//! Exact Fourier–Motzkin projection of linear rate systems whose constants
//! are symbolic information measures.
//!
//! Every inequality is stored as `expr ≥ 0` (or `> 0`), where `expr` is a
//! rational combination of rate variables and information atoms plus a
//! rational constant. Atoms are treated as unknown nonnegative reals, so an
//! inequality counts as implied only if it follows for every nonnegative
//! assignment of the atoms, plus any `assume` facts the system supplies.

mod parse;
pub mod presets;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use parse::{parse_expr, parse_system};

pub type Rational = BigRational;

/// Canonical information term: `I(A;B|C)` or `H(A|C)`, variables sorted
/// within each slot and the two `I` slots sorted against each other.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoAtom(String);

impl InfoAtom {
    pub fn mutual_information(a: &[&str], b: &[&str], given: &[&str]) -> Result<Self> {
        let mut a = sorted(a);
        let mut b = sorted(b);
        if a.is_empty() || b.is_empty() {
            return Err(Error::Domain("I(;) needs two nonempty arguments".into()));
        }
        if b < a {
            std::mem::swap(&mut a, &mut b);
        }
        Ok(InfoAtom(format!("I({};{}{})", a.join(","), b.join(","), cond(&sorted(given)))))
    }

    pub fn entropy(a: &[&str], given: &[&str]) -> Result<Self> {
        let a = sorted(a);
        if a.is_empty() {
            return Err(Error::Domain("H() needs a nonempty argument".into()));
        }
        Ok(InfoAtom(format!("H({}{})", a.join(","), cond(&sorted(given)))))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

fn sorted(v: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    out.sort();
    out.dedup();
    out
}

fn cond(given: &[String]) -> String {
    if given.is_empty() {
        String::new()
    } else {
        format!("|{}", given.join(","))
    }
}

impl fmt::Display for InfoAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Unknown of a system: a rate variable or an information atom. Variables
/// order before atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Atom(InfoAtom),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Atom(a) => a.fmt(f),
        }
    }
}

/// Σ c_t · t + constant, with no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinExpr {
    coeffs: BTreeMap<Term, Rational>,
    constant: Rational,
}

impl LinExpr {
    pub fn zero() -> Self {
        LinExpr::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn term(t: Term) -> Self {
        let mut e = LinExpr::zero();
        e.add_term(t, Rational::one());
        e
    }

    pub fn var(name: &str) -> Self {
        LinExpr::term(Term::Var(name.to_string()))
    }

    pub fn coeffs(&self) -> &BTreeMap<Term, Rational> {
        &self.coeffs
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn coeff(&self, t: &Term) -> Rational {
        self.coeffs.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, t: Term, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(t.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&t);
        }
    }

    pub fn add_scaled(&mut self, other: &LinExpr, k: &Rational) {
        for (t, c) in &other.coeffs {
            self.add_term(t.clone(), c * k);
        }
        self.constant += &other.constant * k;
    }

    pub fn scaled(&self, k: &Rational) -> LinExpr {
        let mut e = LinExpr::zero();
        e.add_scaled(self, k);
        e
    }

    pub fn plus(&self, other: &LinExpr) -> LinExpr {
        let mut e = self.clone();
        e.add_scaled(other, &Rational::one());
        e
    }

    pub fn minus(&self, other: &LinExpr) -> LinExpr {
        let mut e = self.clone();
        e.add_scaled(other, &-Rational::one());
        e
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Atom(_) => None,
        })
    }

    fn has_vars(&self) -> bool {
        self.coeffs.keys().any(Term::is_var)
    }

    /// Scales so that the first nonzero coefficient (or the constant) has
    /// absolute value 1; the sign is preserved, so `e ≥ 0` is unchanged.
    fn normalized(&self) -> LinExpr {
        let lead = self
            .coeffs
            .values()
            .next()
            .cloned()
            .unwrap_or_else(|| self.constant.clone());
        if lead.is_zero() {
            return self.clone();
        }
        self.scaled(&lead.abs().recip())
    }

    /// The expression with every variable removed.
    fn atom_part(&self) -> LinExpr {
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(t, _)| !t.is_var())
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
            constant: self.constant.clone(),
        }
    }

    fn var_part(&self) -> LinExpr {
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(t, _)| t.is_var())
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
            constant: Rational::zero(),
        }
    }

    /// Nonnegative for every nonnegative assignment of its terms.
    fn trivially_nonnegative(&self) -> bool {
        !self.constant.is_negative() && self.coeffs.values().all(|c| c.is_positive())
    }

    /// Evaluates with the given values for every term.
    pub fn eval(&self, values: &BTreeMap<Term, Rational>) -> Option<Rational> {
        let mut acc = self.constant.clone();
        for (t, c) in &self.coeffs {
            acc += c * values.get(t)?;
        }
        Some(acc)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut piece = |f: &mut fmt::Formatter<'_>, c: &Rational, t: Option<&Term>| -> fmt::Result {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match t {
                Some(t) if a.is_one() => write!(f, "{t}"),
                Some(t) => write!(f, "{} {t}", fmt_rational(&a)),
                None => f.write_str(&fmt_rational(&a)),
            }
        };
        for (t, c) in &self.coeffs {
            piece(f, c, Some(t))?;
        }
        if !self.constant.is_zero() {
            piece(f, &self.constant, None)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `expr ≥ 0`, or `expr > 0` when strict.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ineq {
    pub expr: LinExpr,
    pub strict: bool,
}

impl Ineq {
    pub fn new(expr: LinExpr, strict: bool) -> Self {
        Ineq { expr, strict }
    }

    /// `lhs ≤ rhs`.
    pub fn le(lhs: &LinExpr, rhs: &LinExpr) -> Self {
        Ineq::new(rhs.minus(lhs), false)
    }

    fn normalized(&self) -> Ineq {
        Ineq::new(self.expr.normalized(), self.strict)
    }

    /// Constant inequality that no assignment satisfies.
    fn is_contradiction(&self) -> bool {
        self.expr.is_constant()
            && (self.expr.constant.is_negative() || (self.strict && self.expr.constant.is_zero()))
    }

    fn is_trivial(&self) -> bool {
        self.expr.is_constant() && !self.is_contradiction()
    }
}

/// Printed as `<variable part> <= <atom part>` (or `<` when strict).
impl fmt::Display for Ineq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = self.expr.var_part().scaled(&-Rational::one());
        let rhs = self.expr.atom_part();
        write!(f, "{lhs} {} {rhs}", if self.strict { "<" } else { "<=" })
    }
}

/// Identity rewrite `from → to` applied to projected inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub from: LinExpr,
    pub to: LinExpr,
}

/// A rate system: inequalities, variable definitions, atom identities and
/// background facts about atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IneqSystem {
    pub ineqs: Vec<Ineq>,
    /// `name = expr`, expanded to two inequalities on projection.
    pub lets: Vec<(String, LinExpr)>,
    pub rewrites: Vec<Rewrite>,
    /// Facts `expr ≥ 0` over atoms, used only to recognise redundancy.
    pub assumptions: Vec<Ineq>,
    /// Variables to keep when the caller gives none.
    pub keep: Vec<String>,
}

impl IneqSystem {
    /// Every rate variable, in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |v: &str| {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        };
        for (name, e) in &self.lets {
            push(name);
            e.vars().for_each(&mut push);
        }
        for i in &self.ineqs {
            i.expr.vars().for_each(&mut push);
        }
        out
    }

    /// The same system without rewrites and assumptions.
    pub fn without_identities(&self) -> IneqSystem {
        IneqSystem {
            rewrites: Vec::new(),
            assumptions: Vec::new(),
            ..self.clone()
        }
    }
}

impl fmt::Display for IneqSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.keep.is_empty() {
            writeln!(f, "keep {}", self.keep.join(", "))?;
        }
        for (name, e) in &self.lets {
            writeln!(f, "let {name} = {e}")?;
        }
        for i in &self.ineqs {
            writeln!(f, "{i}")?;
        }
        for a in &self.assumptions {
            writeln!(f, "assume {}", AssumeDisplay(a))?;
        }
        for r in &self.rewrites {
            writeln!(f, "rewrite {} -> {}", r.from, r.to)?;
        }
        Ok(())
    }
}

struct AssumeDisplay<'a>(&'a Ineq);

impl fmt::Display for AssumeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0 {} {}", if self.0.strict { "<" } else { "<=" }, self.0.expr)
    }
}

/// One Fourier–Motzkin step: every inequality with a positive coefficient on
/// `term` is combined with every one with a negative coefficient.
pub fn eliminate_term(ineqs: &[Ineq], term: &Term) -> Vec<Ineq> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for i in ineqs {
        let c = i.expr.coeff(term);
        if c.is_positive() {
            pos.push((i, c));
        } else if c.is_negative() {
            neg.push((i, -c));
        } else {
            out.push(i.clone());
        }
    }
    for (p, cp) in &pos {
        for (n, cn) in &neg {
            let mut e = p.expr.scaled(cn);
            e.add_scaled(&n.expr, cp);
            out.push(Ineq::new(e, p.strict || n.strict));
        }
    }
    dedup(out)
}

/// Eliminates a rate variable from a system's inequalities.
pub fn eliminate(system: &IneqSystem, var: &str) -> IneqSystem {
    IneqSystem {
        ineqs: eliminate_term(&system.ineqs, &Term::Var(var.to_string())),
        lets: system.lets.clone(),
        ..system.clone()
    }
}

fn dedup(v: Vec<Ineq>) -> Vec<Ineq> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(v.len());
    for i in v {
        let n = i.normalized();
        if n.is_trivial() {
            continue;
        }
        // a non-strict copy is implied by a strict one with the same body
        let twin = Ineq::new(n.expr.clone(), !n.strict);
        if n.strict && seen.contains(&twin) {
            out.retain(|o: &Ineq| o != &twin);
            seen.remove(&twin);
        } else if !n.strict && seen.contains(&twin) {
            continue;
        }
        if seen.insert(n.clone()) {
            out.push(n);
        }
    }
    out
}

fn pick_term(ineqs: &[Ineq], candidates: &[Term]) -> Option<Term> {
    candidates
        .iter()
        .map(|t| {
            let (mut p, mut n) = (0usize, 0usize);
            for i in ineqs {
                let c = i.expr.coeff(t);
                if c.is_positive() {
                    p += 1;
                } else if c.is_negative() {
                    n += 1;
                }
            }
            // fewest new pairs, net growth as tie-break
            (p * n, (p * n) as isize - (p + n) as isize, t)
        })
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(b.2)))
        .map(|x| x.2.clone())
}

/// Whether a system over nonnegative unknowns has no solution.
fn infeasible(mut ineqs: Vec<Ineq>) -> bool {
    loop {
        if ineqs.iter().any(Ineq::is_contradiction) {
            return true;
        }
        // inequalities satisfied by every nonnegative point cannot cause
        // infeasibility
        ineqs.retain(|i| !(i.expr.trivially_nonnegative() && (!i.strict || i.expr.constant.is_positive())));
        let terms: Vec<Term> = {
            let mut s = std::collections::BTreeSet::new();
            for i in &ineqs {
                s.extend(i.expr.coeffs.keys().cloned());
            }
            s.into_iter().collect()
        };
        let Some(t) = pick_term(&ineqs, &terms) else {
            return false;
        };
        // nonnegativity of the eliminated unknown
        let mut with_bound = ineqs;
        with_bound.push(Ineq::new(LinExpr::term(t.clone()), false));
        ineqs = eliminate_term(&with_bound, &t);
    }
}

/// Whether `target` holds for every nonnegative assignment of all unknowns
/// satisfying `premises`.
pub fn implies(premises: &[Ineq], target: &Ineq) -> bool {
    let mut sys: Vec<Ineq> = premises.to_vec();
    // negation of e ≥ 0 is −e > 0; of e > 0 is −e ≥ 0
    sys.push(Ineq::new(target.expr.scaled(&-Rational::one()), !target.strict));
    infeasible(sys)
}

/// Implication-equivalence of two inequality lists under shared background
/// facts.
pub fn equivalent(a: &[Ineq], b: &[Ineq], background: &[Ineq]) -> bool {
    let with = |v: &[Ineq]| -> Vec<Ineq> { v.iter().chain(background).cloned().collect() };
    let (pa, pb) = (with(a), with(b));
    b.iter().all(|t| implies(&pa, t)) && a.iter().all(|t| implies(&pb, t))
}

fn apply_rewrites(i: &Ineq, rules: &[Rewrite]) -> Ineq {
    let mut e = i.expr.clone();
    for _ in 0..16 {
        let mut changed = false;
        for r in rules {
            let Some((t0, p0)) = r.from.coeffs.iter().next() else {
                continue;
            };
            let c = e.coeff(t0) / p0;
            if c.is_zero() {
                continue;
            }
            if r.from.coeffs.iter().all(|(t, p)| e.coeff(t) == &c * p) {
                e.add_scaled(&r.from, &-c.clone());
                e.add_scaled(&r.to, &c);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ineq::new(e, i.strict)
}

/// Background facts for redundancy tests: kept variables and atoms are
/// nonnegative (implicit in the implication test) plus the system's
/// assumptions.
pub fn background(system: &IneqSystem) -> Vec<Ineq> {
    system.assumptions.clone()
}

/// Substitutes definitions, eliminates every variable outside `keep`
/// (fewest product pairs first), applies the identity rewrites and removes
/// redundant inequalities.
pub fn project(system: &IneqSystem, keep: &[&str]) -> Result<IneqSystem> {
    let vars = system.variables();
    for k in keep {
        if !vars.iter().any(|v| v == k) {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: format!("kept variable {k} does not occur in the system"),
            });
        }
    }
    let mut ineqs: Vec<Ineq> = system.ineqs.clone();
    for (name, e) in &system.lets {
        let v = LinExpr::var(name);
        ineqs.push(Ineq::le(&v, e));
        ineqs.push(Ineq::le(e, &v));
    }
    for v in &vars {
        ineqs.push(Ineq::new(LinExpr::var(v), false));
    }
    let mut ineqs = dedup(ineqs);
    let mut pending: Vec<Term> = vars
        .iter()
        .filter(|v| !keep.contains(&v.as_str()))
        .map(|v| Term::Var(v.clone()))
        .collect();
    while let Some(t) = pick_term(&ineqs, &pending) {
        pending.retain(|p| p != &t);
        ineqs = eliminate_term(&ineqs, &t);
        ineqs = drop_dominated(ineqs);
    }
    let ineqs: Vec<Ineq> = ineqs
        .iter()
        .map(|i| apply_rewrites(i, &system.rewrites))
        .collect();
    let ineqs = drop_dominated(dedup(ineqs));
    let ineqs = drop_implied(ineqs, &background(system));
    Ok(IneqSystem {
        ineqs,
        lets: Vec::new(),
        rewrites: system.rewrites.clone(),
        assumptions: system.assumptions.clone(),
        keep: keep.iter().map(|s| s.to_string()).collect(),
    })
}

/// Removes `V + A2 ≥ 0` when `V + A1 ≥ 0` is present with A2 − A1 a
/// nonnegative combination of atoms.
fn drop_dominated(ineqs: Vec<Ineq>) -> Vec<Ineq> {
    let n = ineqs.len();
    let mut dead = vec![false; n];
    for i in 0..n {
        if dead[i] {
            continue;
        }
        for j in 0..n {
            if i == j || dead[j] {
                continue;
            }
            let (a, b) = (&ineqs[i], &ineqs[j]);
            if a.expr.var_part() != b.expr.var_part() {
                continue;
            }
            // b is implied by a if b − a ≥ 0 termwise
            let d = b.expr.minus(&a.expr);
            let stronger = d.trivially_nonnegative() && (!b.strict || a.strict || d.constant.is_positive());
            if stronger {
                dead[j] = true;
            }
        }
    }
    ineqs
        .into_iter()
        .zip(dead)
        .filter(|(_, d)| !d)
        .map(|(i, _)| i)
        .collect()
}

/// Greedily removes every inequality implied by the remaining ones and the
/// background.
fn drop_implied(mut ineqs: Vec<Ineq>, background: &[Ineq]) -> Vec<Ineq> {
    let mut i = 0;
    while i < ineqs.len() {
        let rest: Vec<Ineq> = ineqs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, x)| x.clone())
            .chain(background.iter().cloned())
            .collect();
        if implies(&rest, &ineqs[i]) {
            ineqs.remove(i);
        } else {
            i += 1;
        }
    }
    ineqs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn atoms_are_canonical() {
        let a = InfoAtom::mutual_information(&["Y"], &["X", "X_r"], &["S"]).unwrap();
        assert_eq!(a.name(), "I(X,X_r;Y|S)");
        let h = InfoAtom::entropy(&["Z"], &["X_r", "U", "S"]).unwrap();
        assert_eq!(h.name(), "H(Z|S,U,X_r)");
    }

    #[test]
    fn absent_variable_is_a_no_op() {
        let sys = parse_system("R <= I(X;Y)\nR2 <= H(Z)\n").unwrap();
        let out = eliminate(&sys, "Q");
        assert_eq!(out.ineqs.len(), 2);
    }

    #[test]
    fn interval_elimination() {
        // x <= a, x >= b  ->  b <= a
        let sys = parse_system("x <= H(A)\nH(B) <= x\n").unwrap();
        let out = eliminate(&sys, "x");
        assert_eq!(out.ineqs.len(), 1);
        let expect = Ineq::le(&parse_expr("H(B)").unwrap(), &parse_expr("H(A)").unwrap());
        assert_eq!(out.ineqs[0].normalized(), expect.normalized());
    }

    #[test]
    fn implication_uses_nonnegativity() {
        let x = LinExpr::var("x");
        let a = parse_expr("H(A)").unwrap();
        let b = parse_expr("H(A) + H(B)").unwrap();
        assert!(implies(&[Ineq::le(&x, &a)], &Ineq::le(&x, &b)));
        assert!(!implies(&[Ineq::le(&x, &b)], &Ineq::le(&x, &a)));
        // strict premise gives strict conclusion
        let strict = Ineq::new(a.minus(&x), true);
        assert!(implies(&[strict], &Ineq::new(a.minus(&x), true)));
        assert!(!implies(&[Ineq::le(&x, &a)], &Ineq::new(a.minus(&x), true)));
    }

    #[test]
    fn rewrite_matches_scaled_patterns() {
        let rule = Rewrite {
            from: parse_expr("I(U;S1) - I(U;S2)").unwrap(),
            to: parse_expr("I(U;S1|S2)").unwrap(),
        };
        let i = Ineq::le(
            &LinExpr::var("R"),
            &parse_expr("H(Z|S1,U) - I(U;S1) + I(U;S2)").unwrap(),
        );
        let r = apply_rewrites(&i, &[rule]);
        let expect = Ineq::le(&LinExpr::var("R"), &parse_expr("H(Z|S1,U) - I(U;S1|S2)").unwrap());
        assert_eq!(r, expect);
    }

    #[test]
    fn display_round_trips() {
        let sys = parse_system("2 R1 + R2 <= I(X1,X2;Y|S) + 1/2 H(Z|S,U) - I(U;S)\n0 < H(Z)\n").unwrap();
        let text = sys.to_string();
        let back = parse_system(&text).unwrap();
        assert_eq!(back.ineqs, sys.ineqs);
        assert_eq!(q(2) / q(4), Rational::new(1.into(), 2.into()));
    }
}
