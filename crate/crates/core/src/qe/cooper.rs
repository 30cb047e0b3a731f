//! Cooper's method for one existential over the integers.

use std::sync::Arc;

use super::cube::CooperPlan;
use crate::formula::{Atom, Formula, LinTerm, Rel, Var};
use crate::rational::Rational;

fn atoms_with<'a>(f: &'a Formula, x: &Var, out: &mut Vec<&'a Atom>) {
    match f {
        Formula::Atom(a) => {
            if a.mentions(x) && !out.contains(&&**a) {
                out.push(a);
            }
        }
        Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|g| atoms_with(g, x, out)),
        Formula::Not(g) => atoms_with(g, x, out),
        _ => {}
    }
}

fn map_atoms(f: &Formula, g: &dyn Fn(&Atom) -> Formula) -> Formula {
    match f {
        Formula::Atom(a) => g(a),
        Formula::And(xs) => Formula::and(xs.iter().map(|h| map_atoms(h, g)).collect()),
        Formula::Or(xs) => Formula::or(xs.iter().map(|h| map_atoms(h, g)).collect()),
        Formula::Not(h) => Formula::not(map_atoms(h, g)),
        other => other.clone(),
    }
}

/// `exists x. f` for quantifier-free NNF `f` over the integers.
pub(crate) fn eliminate(x: &Var, f: &Formula) -> Formula {
    let f = f.simplify();
    if !f.mentions(x) {
        return f;
    }
    // x = t with a unit coefficient: plain substitution
    for c in f.conjuncts() {
        if let Formula::Atom(a) = &c {
            if let Atom::Cmp { rel: Rel::Eq, term } = &**a {
                let k = term.coeff(x);
                if k.abs().is_one() {
                    let t = term.without(x).scale(&(-k.recip()));
                    return f.subst_unchecked(x, &t).simplify();
                }
            }
        }
    }
    let mut atoms = Vec::new();
    atoms_with(&f, x, &mut atoms);
    let plan = CooperPlan::new(atoms.iter().copied(), x);
    let points = plan.points();
    let lam = Rational::from_bigint(plan.lambda.clone());
    let delta = plan.delta_i64();
    let lower_side = points.sign > 0;

    let substitute = |g: &Formula, p: &LinTerm| -> Formula {
        let val = p.scale(&lam.recip());
        let body = map_atoms(g, &|a| {
            if a.mentions(x) {
                a.map_term(|t| t.substitute(x, &val)).into()
            } else {
                Formula::Atom(Arc::new(a.clone()))
            }
        });
        let guard: Formula = Atom::divides(plan.lambda.clone(), p.clone(), false).into();
        Formula::and(vec![guard, body]).simplify()
    };

    let mut parts = Vec::new();
    // the infinite side: bounds on that side are false, the others true
    let at_infinity = map_atoms(&f, &|a| match a {
        Atom::Cmp { rel, term } if term.mentions(x) => match rel {
            Rel::Eq => Formula::False,
            _ => {
                let is_lower = term.coeff(x).is_negative();
                (is_lower != lower_side).into()
            }
        },
        _ => Formula::Atom(Arc::new(a.clone())),
    })
    .simplify();
    if !at_infinity.is_false() {
        for j in 1..=delta {
            let p = LinTerm::constant(Rational::from_int(points.sign * j));
            parts.push(substitute(&at_infinity, &p));
        }
    }
    for b in &points.bounds {
        for j in 0..delta {
            let p = b.add_constant(&Rational::from_int(points.sign * j));
            parts.push(substitute(&f, &p));
        }
    }
    Formula::or(parts).simplify()
}
