//! Virtual substitution for one existential over the rationals.

use std::sync::Arc;

use crate::formula::{Atom, Formula, LinTerm, Rel, Var};
use crate::rational::Rational;

/// `exists x. f` for quantifier-free NNF `f` over the rationals, by
/// substituting the test points minus infinity, every weak lower-bound root
/// and every strict lower-bound root plus an infinitesimal.
pub(crate) fn eliminate(x: &Var, f: &Formula) -> Formula {
    let f = f.simplify();
    if !f.mentions(x) {
        return f;
    }
    if let Some(t) = top_level_solution(&f, x) {
        return f.subst_unchecked(x, &t).simplify();
    }
    let mut weak: Vec<LinTerm> = Vec::new();
    let mut strict: Vec<LinTerm> = Vec::new();
    collect_roots(&f, x, &mut weak, &mut strict);
    let mut parts = vec![at_minus_infinity(&f, x)];
    for r in &weak {
        parts.push(f.subst_unchecked(x, r));
    }
    for r in &strict {
        parts.push(at_epsilon_after(&f, x, r));
    }
    Formula::or(parts).simplify()
}

/// `x = t` from a top-level equality conjunct.
fn top_level_solution(f: &Formula, x: &Var) -> Option<LinTerm> {
    for c in f.conjuncts() {
        if let Formula::Atom(a) = &c {
            if let Atom::Cmp { rel: Rel::Eq, term } = &**a {
                let k = term.coeff(x);
                if !k.is_zero() {
                    return Some(term.without(x).scale(&(-k.recip())));
                }
            }
        }
    }
    None
}

fn push_unique(v: &mut Vec<LinTerm>, t: LinTerm) {
    if !v.contains(&t) {
        v.push(t);
    }
}

fn collect_roots(f: &Formula, x: &Var, weak: &mut Vec<LinTerm>, strict: &mut Vec<LinTerm>) {
    match f {
        Formula::Atom(a) => {
            if let Atom::Cmp { rel, term } = &**a {
                let k = term.coeff(x);
                if k.is_zero() {
                    return;
                }
                let root = term.without(x).scale(&(-k.recip()));
                match rel {
                    Rel::Eq => push_unique(weak, root),
                    Rel::Le if k.is_negative() => push_unique(weak, root),
                    Rel::Lt if k.is_negative() => push_unique(strict, root),
                    _ => {}
                }
            }
        }
        Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|g| collect_roots(g, x, weak, strict)),
        Formula::Not(g) => collect_roots(&g.to_nnf(), x, weak, strict),
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

fn at_minus_infinity(f: &Formula, x: &Var) -> Formula {
    map_atoms(f, &|a| match a {
        Atom::Cmp { rel, term } if term.mentions(x) => match rel {
            Rel::Eq => Formula::False,
            _ => term.coeff(x).is_positive().into(),
        },
        _ => Formula::Atom(Arc::new(a.clone())),
    })
}

/// `f[x := r + eps]` for an infinitesimal `eps > 0`.
fn at_epsilon_after(f: &Formula, x: &Var, r: &LinTerm) -> Formula {
    map_atoms(f, &|a| match a {
        Atom::Cmp { rel, term } if term.mentions(x) => {
            let k = term.coeff(x);
            let at_r = term.substitute(x, r);
            match rel {
                Rel::Eq => Formula::False,
                // at_r + k*eps rel 0
                _ => {
                    let rel = if k.is_positive() { Rel::Lt } else { Rel::Le };
                    Formula::from(Atom::cmp(rel, at_r))
                }
            }
        }
        _ => Formula::Atom(Arc::new(a.clone())),
    })
}

/// Helper shared with the witness search: `(lower, upper)` endpoint
/// description of a one-variable real cube.
pub(crate) fn interval_of(cube: &[Atom], x: &Var) -> Interval {
    let mut iv = Interval::default();
    for a in cube {
        if let Atom::Cmp { rel, term } = a {
            let k = term.coeff(x);
            if k.is_zero() {
                continue;
            }
            let root = -(term.without(x).constant_part() / &k);
            let strict = *rel == Rel::Lt;
            match rel {
                Rel::Eq => {
                    iv.raise(root.clone(), false);
                    iv.lower_to(root, false);
                }
                _ if k.is_negative() => iv.raise(root, strict),
                _ => iv.lower_to(root, strict),
            }
        }
    }
    iv
}

#[derive(Default, Debug, Clone)]
pub(crate) struct Interval {
    pub lo: Option<(Rational, bool)>,
    pub hi: Option<(Rational, bool)>,
}

impl Interval {
    fn raise(&mut self, v: Rational, strict: bool) {
        let replace = match &self.lo {
            None => true,
            Some((l, s)) => v > *l || (v == *l && strict && !s),
        };
        if replace {
            self.lo = Some((v, strict));
        }
    }

    fn lower_to(&mut self, v: Rational, strict: bool) {
        let replace = match &self.hi {
            None => true,
            Some((h, s)) => v < *h || (v == *h && strict && !s),
        };
        if replace {
            self.hi = Some((v, strict));
        }
    }
}
