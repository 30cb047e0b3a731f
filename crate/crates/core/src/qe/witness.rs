use num_bigint::BigInt;
use num_traits::One;

use super::vs::interval_of;
use super::{dnf, project};
use crate::formula::{Assignment, Atom, Formula, LinTerm, Rel, Sort, Var};
use crate::rational::{big_lcm, Rational};

/// A satisfying assignment for quantifier-free NNF `f`, fixing variables in
/// name order. `None` if `f` is unsatisfiable.
pub(crate) fn find(f: &Formula, sort: Sort) -> Option<Assignment> {
    let vars: Vec<Var> = f.free_vars().into_iter().collect();
    let mut asg = Assignment::new();
    let mut cur = f.clone();
    for (i, v) in vars.iter().enumerate() {
        let residue = project::exists_block(&vars[i + 1..], &cur, &[], sort);
        let value = pick_value(&residue, v, sort)?;
        cur = cur
            .subst_unchecked(v, &LinTerm::constant(value.clone()))
            .simplify();
        asg.insert(v.clone(), value);
    }
    if vars.is_empty() && !matches!(f.simplify(), Formula::True) {
        return None;
    }
    Some(asg)
}

fn pick_value(g: &Formula, x: &Var, sort: Sort) -> Option<Rational> {
    let g = g.to_nnf().simplify();
    for cube in dnf::enumerate(&[], &g, sort, false) {
        let v = match sort {
            Sort::Real => real_point(&cube, x),
            Sort::Int => int_point(&cube, x),
        };
        if v.is_some() {
            return v;
        }
    }
    None
}

fn real_point(cube: &[Atom], x: &Var) -> Option<Rational> {
    let iv = interval_of(cube, x);
    let one = Rational::one();
    Some(match (iv.lo, iv.hi) {
        (Some((l, _)), Some((h, _))) if l == h => l,
        (Some((l, _)), Some((h, _))) => &(&l + &h) / &Rational::from_int(2),
        (Some((l, _)), None) => &l + &one,
        (None, Some((h, _))) => &h - &one,
        (None, None) => Rational::zero(),
    })
}

fn int_point(cube: &[Atom], x: &Var) -> Option<Rational> {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut period = BigInt::one();
    for a in cube {
        let k = a.term().coeff(x);
        if k.is_zero() {
            continue;
        }
        match a {
            Atom::Cmp { rel, term } => {
                let root = -(term.constant_part() / &k);
                if *rel == Rel::Eq || k.is_negative() {
                    let r = root.ceil();
                    lo = Some(lo.map_or(r.clone(), |l| l.max(r)));
                }
                if *rel == Rel::Eq || k.is_positive() {
                    let r = root.floor();
                    hi = Some(hi.map_or(r.clone(), |h| h.min(r)));
                }
            }
            Atom::Divides { modulus, .. } | Atom::NotDivides { modulus, .. } => {
                period = big_lcm(&period, modulus);
            }
        }
    }
    let span = i64::try_from(&period).ok()?;
    let candidates: Box<dyn Iterator<Item = Rational>> = match (&lo, &hi) {
        (Some(l), _) => {
            let l = l.clone();
            Box::new((0..span).map(move |j| &l + &Rational::from_int(j)))
        }
        (None, Some(h)) => {
            let h = h.clone();
            Box::new((0..span).map(move |j| &h - &Rational::from_int(j)))
        }
        (None, None) => Box::new((0..span).map(Rational::from_int)),
    };
    for c in candidates {
        if hi.as_ref().is_some_and(|h| c > *h) || lo.as_ref().is_some_and(|l| c < *l) {
            return None;
        }
        let mut a = Assignment::new();
        a.insert(x.clone(), c.clone());
        if cube.iter().all(|at| at.eval(&a).unwrap_or(false)) {
            return Some(c);
        }
    }
    None
}
