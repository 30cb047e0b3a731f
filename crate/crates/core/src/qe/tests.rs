use proptest::prelude::*;

use super::*;
use crate::formula::{lin, LinTerm, Var};
use crate::rational::Rational;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn real_elimination_examples() {
    let x = Var::real("x");
    let y = Var::real("y");
    let z = Var::real("z");
    // y < x < z  ->  y < z
    let f = Formula::and(vec![
        Formula::lt(&LinTerm::var(&y), &LinTerm::var(&x)),
        Formula::lt(&LinTerm::var(&x), &LinTerm::var(&z)),
    ]);
    let g = elim_exists_real(&x, &f).unwrap();
    assert!(equivalent(&g, &Formula::lt(&LinTerm::var(&y), &LinTerm::var(&z))).unwrap());
    // empty interval
    let f = Formula::and(vec![
        Formula::ge(&LinTerm::var(&x), &lin(&[], 0)),
        Formula::le(&LinTerm::var(&x), &lin(&[], -1)),
    ]);
    assert_eq!(elim_exists_real(&x, &f).unwrap(), Formula::False);
    // 2x = y always solvable
    let f = Formula::eq(&lin(&[(2, &x)], 0), &LinTerm::var(&y));
    assert_eq!(elim_exists_real(&x, &f).unwrap(), Formula::True);
}

#[test]
fn int_elimination_examples() {
    let x = Var::int("x");
    let y = Var::int("y");
    let f = Formula::eq(&lin(&[(2, &x)], 0), &LinTerm::var(&y));
    let g = elim_exists_int(&x, &f).unwrap();
    assert!(equivalent(&g, &Formula::divides(2, &LinTerm::var(&y))).unwrap());
    let f = Formula::and(vec![
        Formula::le(&lin(&[], 0), &LinTerm::var(&x)),
        Formula::le(&LinTerm::var(&x), &lin(&[], -1)),
    ]);
    assert_eq!(elim_exists_int(&x, &f).unwrap(), Formula::False);
    // y < 2x < y + 2  iff  y odd
    let f = Formula::and(vec![
        Formula::lt(&LinTerm::var(&y), &lin(&[(2, &x)], 0)),
        Formula::lt(&lin(&[(2, &x)], 0), &lin(&[(1, &y)], 2)),
    ]);
    let g = elim_exists_int(&x, &f).unwrap();
    for yv in -10..=10 {
        let a: Assignment = [(y.clone(), Rational::from_int(yv))].into_iter().collect();
        let brute = (-12..=12).any(|xv| yv < 2 * xv && 2 * xv < yv + 2);
        assert_eq!(g.evaluate(&a).unwrap(), brute, "y = {}", yv);
        assert_eq!(brute, yv.rem_euclid(2) == 1);
    }
}

#[test]
fn project_examples() {
    let x1 = Var::int("x'");
    let x2 = Var::int("x''");
    // forall x''. x'' = x' + 1 => x'' <= 2   ->  x' <= 1
    let f = Formula::forall(
        x2.clone(),
        Formula::implies(
            Formula::eq(&LinTerm::var(&x2), &lin(&[(1, &x1)], 1)),
            Formula::le(&LinTerm::var(&x2), &lin(&[], 2)),
        ),
    );
    let g = project(&f).unwrap();
    assert!(g.is_quantifier_free());
    assert!(equivalent(&g, &Formula::le(&LinTerm::var(&x1), &lin(&[], 1))).unwrap());
    // exists x'. x' = 0 and 0 <= x' <= 2  ->  True
    let f = Formula::exists(
        x1.clone(),
        Formula::and(vec![
            Formula::eq(&LinTerm::var(&x1), &lin(&[], 0)),
            Formula::le(&lin(&[], 0), &LinTerm::var(&x1)),
            Formula::le(&LinTerm::var(&x1), &lin(&[], 2)),
        ]),
    );
    assert_eq!(project(&f).unwrap(), Formula::True);
    let q = Formula::le(&LinTerm::var(&x1), &lin(&[], 2));
    assert_eq!(project(&q).unwrap(), q);
}

#[test]
fn sat_and_implication_examples() {
    let x = Var::real("x");
    let f = Formula::and(vec![
        Formula::le(&LinTerm::var(&x), &lin(&[], 2)),
        Formula::ge(&LinTerm::var(&x), &lin(&[], 2)),
    ]);
    assert!(is_sat(&f).unwrap());
    assert!(!is_sat(&Formula::lt(&LinTerm::var(&x), &LinTerm::var(&x))).unwrap());
    assert!(is_sat(&Formula::True).unwrap());
    let le1 = Formula::le(&LinTerm::var(&x), &lin(&[], 1));
    let le2 = Formula::le(&LinTerm::var(&x), &lin(&[], 2));
    assert!(implies(&le1, &le2).unwrap());
    assert!(!implies(&le2, &le1).unwrap());
    assert!(implies(&Formula::False, &le1).unwrap());
}

#[test]
fn witness_examples() {
    let x = Var::real("x");
    let f = Formula::and(vec![
        Formula::ge(&LinTerm::var(&x), &lin(&[], 2)),
        Formula::le(&LinTerm::var(&x), &lin(&[], 2)),
    ]);
    assert_eq!(find_witness(&f).unwrap()[&x], Rational::from_int(2));
    let f = Formula::and(vec![
        Formula::lt(&lin(&[], 1), &LinTerm::var(&x)),
        Formula::lt(&LinTerm::var(&x), &lin(&[], 2)),
    ]);
    assert_eq!(find_witness(&f).unwrap()[&x], r(3, 2));
    let y = Var::int("y");
    let f = Formula::and(vec![
        Formula::divides(2, &LinTerm::var(&y)),
        Formula::gt(&LinTerm::var(&y), &lin(&[], 3)),
    ]);
    assert_eq!(find_witness(&f).unwrap()[&y], Rational::from_int(4));
    assert!(matches!(
        find_witness(&Formula::lt(&LinTerm::var(&x), &LinTerm::var(&x))),
        Err(Error::UnsatInput)
    ));
}

#[test]
fn prune_examples() {
    let x = Var::real("x");
    let le1 = Formula::le(&LinTerm::var(&x), &lin(&[], 1));
    let le2 = Formula::le(&LinTerm::var(&x), &lin(&[], 2));
    let ge3 = Formula::ge(&LinTerm::var(&x), &lin(&[], 3));
    assert_eq!(prune_disjuncts(&Formula::or(vec![le1.clone(), le2.clone()])).unwrap(), le2);
    let inc = Formula::or(vec![le1.clone(), ge3]);
    assert_eq!(prune_disjuncts(&inc).unwrap(), inc);
    assert_eq!(prune_disjuncts(&Formula::Or(vec![Formula::False, le1.clone()].into())).unwrap(), le1);
}

#[test]
fn mixed_sorts_rejected() {
    let x = Var::int("x");
    let y = Var::real("y");
    let f = Formula::and(vec![
        Formula::le(&LinTerm::var(&x), &lin(&[], 1)),
        Formula::le(&LinTerm::var(&y), &lin(&[], 1)),
    ]);
    assert!(matches!(is_sat(&f), Err(Error::SortMismatch(_))));
    assert!(matches!(elim_exists_int(&y, &f), Err(Error::SortMismatch(_))));
}

// ---- randomized checks against brute force ----

fn arb_atom(vars: Vec<Var>) -> impl Strategy<Value = Formula> {
    let n = vars.len();
    (
        proptest::collection::vec(-3i64..=3, n),
        -6i64..=6,
        0u8..4,
        2i64..=3,
    )
        .prop_map(move |(cs, k, kind, m)| {
            let pairs: Vec<(i64, &Var)> = cs.iter().copied().zip(vars.iter()).collect();
            let t = lin(&pairs, k);
            let int = vars[0].sort() == Sort::Int;
            match kind {
                0 => Formula::le(&t, &LinTerm::zero()),
                1 => Formula::lt(&t, &LinTerm::zero()),
                2 => Formula::eq(&t, &LinTerm::zero()),
                _ if int => Formula::divides(m, &t),
                _ => Formula::not(Formula::le(&t, &LinTerm::zero())),
            }
        })
}

fn arb_formula(vars: Vec<Var>) -> impl Strategy<Value = Formula> {
    arb_atom(vars).prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..4).prop_map(Formula::and),
            proptest::collection::vec(inner.clone(), 1..4).prop_map(Formula::or),
            inner.prop_map(Formula::not),
        ]
    })
}

fn int_vars() -> Vec<Var> {
    vec![Var::int("x"), Var::int("y"), Var::int("z")]
}

fn real_vars() -> Vec<Var> {
    vec![Var::real("x"), Var::real("y"), Var::real("z")]
}

fn assign(vars: &[Var], vals: &[Rational]) -> Assignment {
    vars.iter().cloned().zip(vals.iter().cloned()).collect()
}

/// Brute-force `exists x. f` at an assignment of the other variables.
fn brute_exists_int(f: &Formula, x: &Var, rest: &Assignment) -> bool {
    // |coefficients| <= 3, |constants| <= 6, values in [-8, 8]: any solution
    // repeats with period dividing lcm(1..3)*... within this window
    (-80..=80).any(|v| {
        let mut a = rest.clone();
        a.insert(x.clone(), Rational::from_int(v));
        f.evaluate(&a).unwrap()
    })
}

/// `exists x. f` over the integers, exactly: between consecutive roots only
/// divisibility atoms vary, with a period dividing 6, so six integers on
/// either side of every root cover all cases.
fn exact_exists_int(f: &Formula, x: &Var, rest: &Assignment) -> bool {
    let mut rs = Vec::new();
    collect_roots(f, x, rest, &mut rs);
    let mut pts: Vec<i64> = (0..6).collect();
    for r in rs {
        let lo = r.floor().to_i64().unwrap();
        pts.extend(lo - 6..=lo + 7);
    }
    pts.into_iter().any(|v| {
        let mut a = rest.clone();
        a.insert(x.clone(), Rational::from_int(v));
        f.evaluate(&a).unwrap()
    })
}

/// Test points for `exists x. f` over the rationals: every root of an atom
/// under `rest`, midpoints between consecutive roots, and beyond the extremes.
fn brute_exists_real(f: &Formula, x: &Var, rest: &Assignment) -> bool {
    let mut roots: Vec<Rational> = Vec::new();
    collect_roots(f, x, rest, &mut roots);
    roots.sort();
    roots.dedup();
    let mut pts = roots.clone();
    for w in roots.windows(2) {
        pts.push(&(&w[0] + &w[1]) / &Rational::from_int(2));
    }
    let one = Rational::one();
    match (roots.first(), roots.last()) {
        (Some(lo), Some(hi)) => {
            pts.push(lo - &one);
            pts.push(hi + &one);
        }
        _ => pts.push(Rational::zero()),
    }
    pts.into_iter().any(|v| {
        let mut a = rest.clone();
        a.insert(x.clone(), v);
        f.evaluate(&a).unwrap()
    })
}

fn collect_roots(f: &Formula, x: &Var, rest: &Assignment, out: &mut Vec<Rational>) {
    match f {
        Formula::Atom(a) => {
            let k = a.term().coeff(x);
            if !k.is_zero() {
                let c = a.term().without(x).eval(rest).unwrap();
                out.push(-(c / k));
            }
        }
        Formula::Not(g) => collect_roots(g, x, rest, out),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|g| collect_roots(g, x, rest, out)),
        _ => {}
    }
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn int_elimination_sound(f in arb_formula(int_vars()), ys in proptest::collection::vec(-8i64..=8, 2)) {
        let vars = int_vars();
        let g = elim_exists_int(&vars[0], &f).unwrap();
        prop_assert!(!g.mentions(&vars[0]));
        let rest = assign(&vars[1..], &ys.iter().map(|v| Rational::from_int(*v)).collect::<Vec<_>>());
        prop_assert_eq!(g.evaluate(&rest).unwrap(), brute_exists_int(&f, &vars[0], &rest));
    }

    #[test]
    fn real_elimination_sound(f in arb_formula(real_vars()), ys in proptest::collection::vec((-8i64..=8, 1i64..=3), 2)) {
        let vars = real_vars();
        let g = elim_exists_real(&vars[0], &f).unwrap();
        prop_assert!(!g.mentions(&vars[0]));
        let rest = assign(&vars[1..], &ys.iter().map(|(n, d)| Rational::new(*n, *d)).collect::<Vec<_>>());
        prop_assert_eq!(g.evaluate(&rest).unwrap(), brute_exists_real(&f, &vars[0], &rest));
    }

    #[test]
    fn project_matches_single_eliminations(f in arb_formula(real_vars())) {
        let vars = real_vars();
        let q = Formula::exists(vars[0].clone(), Formula::forall(vars[1].clone(), f.clone()));
        let p = project(&q).unwrap();
        prop_assert!(p.is_quantifier_free());
        let inner = Formula::not(elim_exists_real(&vars[1], &Formula::not(f)).unwrap());
        let reference = elim_exists_real(&vars[0], &inner).unwrap();
        prop_assert!(equivalent(&p, &reference).unwrap());
        // idempotence
        prop_assert!(equivalent(&project(&p).unwrap(), &p).unwrap());
    }

    #[test]
    fn int_project_sound(f in arb_formula(int_vars()), z in -8i64..=8) {
        let vars = int_vars();
        let q = Formula::exists(vars[0].clone(), Formula::exists(vars[1].clone(), f.clone()));
        let p = project(&q).unwrap();
        let rest = assign(&vars[2..], &[Rational::from_int(z)]);
        // eliminating x first yields atoms in y with coefficients up to 18 and
        // roots within about 200 of zero, repeating with period at most 36
        let brute = (-300..=300).any(|b| {
            let mut s = rest.clone();
            s.insert(vars[1].clone(), Rational::from_int(b));
            exact_exists_int(&f, &vars[0], &s)
        });
        prop_assert_eq!(p.evaluate(&rest).unwrap(), brute);
    }

    #[test]
    fn is_sat_matches_search(f in arb_formula(int_vars())) {
        let vars = int_vars();
        let sat = is_sat(&f).unwrap();
        if sat {
            let w = find_witness(&f).unwrap();
            let full: Assignment = vars.iter().map(|v| (v.clone(), w.get(v).cloned().unwrap_or_else(Rational::zero))).collect();
            prop_assert!(f.evaluate(&full).unwrap());
        } else {
            let found = (-8..=8).any(|a| (-8..=8).any(|b| (-8..=8).any(|c| {
                f.evaluate(&assign(&vars, &[Rational::from_int(a), Rational::from_int(b), Rational::from_int(c)])).unwrap()
            })));
            prop_assert!(!found);
        }
    }

    #[test]
    fn real_witness_validates(f in arb_formula(real_vars())) {
        let vars = real_vars();
        if is_sat(&f).unwrap() {
            let w = find_witness(&f).unwrap();
            let full: Assignment = vars.iter().map(|v| (v.clone(), w.get(v).cloned().unwrap_or_else(Rational::zero))).collect();
            prop_assert!(f.evaluate(&full).unwrap());
        }
    }
}
