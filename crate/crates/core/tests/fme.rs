use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use binfwd::fme::{self, equivalent, parse_system, presets, Ineq, IneqSystem, LinExpr, Rational, Term};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_projection(preset: &str, expected: &str) {
    let sys = presets::load(preset).unwrap();
    let keep: Vec<&str> = sys.keep.iter().map(String::as_str).collect();
    let t = Instant::now();
    let out = fme::project(&sys, &keep).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    println!("{preset} ({elapsed:.3} s):\n{out}");
    assert!(elapsed < 1.0, "{preset} took {elapsed} s");
    let want = parse_system(expected).unwrap();
    // kept rates are nonnegative in both descriptions
    let mut bg = fme::background(&sys);
    for k in &keep {
        bg.push(Ineq::new(LinExpr::var(k), false));
    }
    assert!(
        equivalent(&out.ineqs, &want.ineqs, &bg),
        "{preset}: projection\n{out}\nis not equivalent to\n{expected}"
    );
    assert_eq!(out.ineqs.len(), want.ineqs.len(), "{preset}: redundant output\n{out}");
}

#[test]
fn relay_system_projects_to_two_bounds_and_slack() {
    check_projection(
        "relay",
        "R <= I(X,X_r;Y|S)
         R <= I(X;Y|X_r,Z,S,U) + H(Z|X_r,S,U) - I(U;S)
         0 <= H(Z|X_r,S,U) - I(U;S)",
    );
}

#[test]
fn one_state_mac_projects_to_five_inequalities() {
    check_projection(
        "mac",
        "I(U;S) <= H(Z|U,S)
         R2 <= I(X2;Y|U,S,X1)
         R1 <= I(X1;Y|U,S,X2,Z) + H(Z|U,S) - I(U;S)
         R1 + R2 <= I(X1,X2;Y|S)
         R1 + R2 <= I(X1,X2;Y|U,S,Z) + H(Z|U,S) - I(U;S)",
    );
}

#[test]
fn two_state_mac_projects_with_conditional_rewrite() {
    check_projection(
        "mac-two-state",
        "R1 <= I(X1;Y|Z,U,X2,S1,S2) + H(Z|U,S1) - I(U;S1|S2)
         R2 <= I(X2;Y|X1,U,S1,S2)
         R1 + R2 <= I(X1,X2;Y|U,Z,S1,S2) + H(Z|U,S1) - I(U;S1|S2)
         R1 + R2 <= I(X1,X2;Y|S1,S2)
         I(U;S1|S2) <= H(Z|U,S1)",
    );
}

#[test]
fn projection_is_idempotent() {
    for (name, _) in presets::PRESETS {
        let sys = presets::load(name).unwrap();
        let keep: Vec<&str> = sys.keep.iter().map(String::as_str).collect();
        let once = fme::project(&sys, &keep).unwrap();
        let twice = fme::project(&once, &keep).unwrap();
        let a: BTreeSet<String> = once.ineqs.iter().map(|i| i.to_string()).collect();
        let b: BTreeSet<String> = twice.ineqs.iter().map(|i| i.to_string()).collect();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn keeping_every_variable_only_removes_redundancy() {
    let sys = parse_system(
        "x + y <= H(A)
         x <= H(A) + H(B)
         y <= I(A;B)
         x + y <= H(A) + 1",
    )
    .unwrap();
    let out = fme::project(&sys, &["x", "y"]).unwrap();
    let printed: BTreeSet<String> = out.ineqs.iter().map(|i| i.to_string()).collect();
    let want: BTreeSet<String> = ["x + y <= H(A)", "y <= I(A;B)"].iter().map(|s| s.to_string()).collect();
    assert_eq!(printed, want);
}

#[test]
fn unknown_kept_variable_is_rejected() {
    let sys = presets::load("relay").unwrap();
    assert!(fme::project(&sys, &["Q"]).is_err());
}

#[test]
fn projected_output_parses_back() {
    for (name, _) in presets::PRESETS {
        let sys = presets::load(name).unwrap();
        let keep: Vec<&str> = sys.keep.iter().map(String::as_str).collect();
        let out = fme::project(&sys, &keep).unwrap();
        let back = parse_system(&out.to_string()).unwrap();
        assert_eq!(back.ineqs, out.ineqs, "{name}");
    }
}

// ---- independent feasibility oracle -------------------------------------

/// Solves a square rational system by Gauss–Jordan elimination.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for k in 0..n {
            a[col][k] = &a[col][k] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let v = &f * &a[col][k];
                    a[r][k] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some(b)
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Whether `rows · x ≤ rhs, x ≥ 0` has a solution. The region lies in the
/// nonnegative orthant, so it is nonempty iff it has a vertex; vertices are
/// found by solving every square subsystem of tight constraints.
fn has_extension(rows: &[Vec<Rational>], rhs: &[Rational]) -> bool {
    let d = rows.first().map_or(0, Vec::len);
    if d == 0 {
        return rhs.iter().all(|r| !r.is_negative());
    }
    let mut all_rows = rows.to_vec();
    let mut all_rhs = rhs.to_vec();
    for j in 0..d {
        let mut r = vec![Rational::zero(); d];
        r[j] = -Rational::one();
        all_rows.push(r);
        all_rhs.push(Rational::zero());
    }
    for subset in choose(all_rows.len(), d) {
        let a: Vec<Vec<Rational>> = subset.iter().map(|&i| all_rows[i].clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&i| all_rhs[i].clone()).collect();
        if let Some(x) = solve(a, b) {
            let ok = all_rows.iter().zip(&all_rhs).all(|(row, r)| {
                let lhs: Rational = row.iter().zip(&x).map(|(c, v)| c * v).sum();
                &lhs <= r
            });
            if ok {
                return true;
            }
        }
    }
    false
}

/// All inequalities of a system (lets expanded), each as `expr ≥ 0`.
fn expanded(sys: &IneqSystem) -> Vec<Ineq> {
    let mut out = sys.ineqs.clone();
    for (name, e) in &sys.lets {
        let v = LinExpr::var(name);
        out.push(Ineq::le(&v, e));
        out.push(Ineq::le(e, &v));
    }
    out
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.random_range(0..=16i64).into(), rng.random_range(1..=8i64).into())
}

#[test]
fn projection_is_sound_and_exact_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (name, _) in presets::PRESETS {
        // identities and assumptions tie atoms together; without them the
        // atoms are free nonnegative unknowns
        let sys = presets::load(name).unwrap().without_identities();
        let keep: Vec<&str> = sys.keep.iter().map(String::as_str).collect();
        let projected = fme::project(&sys, &keep).unwrap();
        let full = expanded(&sys);
        let mut atoms = BTreeSet::new();
        for i in &full {
            atoms.extend(i.expr.coeffs().keys().filter(|t| !t.is_var()).cloned());
        }
        let elim: Vec<String> = sys.variables().into_iter().filter(|v| !keep.contains(&v.as_str())).collect();
        let (mut inside, mut outside) = (0, 0);
        for _ in 0..100 {
            let mut values: BTreeMap<Term, Rational> = BTreeMap::new();
            for a in &atoms {
                values.insert(a.clone(), random_rational(&mut rng));
            }
            for k in &keep {
                values.insert(Term::Var(k.to_string()), random_rational(&mut rng) / Rational::from_integer(2.into()));
            }
            let member = projected
                .ineqs
                .iter()
                .all(|i| !i.expr.eval(&values).unwrap().is_negative());
            // expr ≥ 0  ⇔  −(coefficients on eliminated vars)·x ≤ fixed part
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for i in &full {
                let mut row = Vec::new();
                let mut fixed = i.expr.constant_part().clone();
                for (t, c) in i.expr.coeffs() {
                    match values.get(t) {
                        Some(v) => fixed += c * v,
                        None => {}
                    }
                }
                for v in &elim {
                    row.push(-i.expr.coeff(&Term::Var(v.clone())));
                }
                rows.push(row);
                rhs.push(fixed);
            }
            let extends = has_extension(&rows, &rhs);
            assert_eq!(member, extends, "{name}: point {values:?}");
            if member {
                inside += 1;
            } else {
                outside += 1;
            }
        }
        println!("{name}: {inside} inside, {outside} outside");
        assert!(inside > 0 && outside > 0, "{name}: sampling never crossed the boundary");
    }
}
