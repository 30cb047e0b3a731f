//! First-order linear-arithmetic formulas.

mod atom;
mod nnf;
pub mod sexpr;
mod simplify;
mod term;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use atom::{Atom, Folded, Rel};
pub use nnf::is_nnf;
pub use term::{Assignment, LinTerm, Sort, Var};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// An immutable formula tree. Children are reference counted, so cloning is
/// cheap and subformulas are shared freely.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Arc<Atom>),
    Not(Arc<Formula>),
    And(Arc<[Formula]>),
    Or(Arc<[Formula]>),
    Exists(Var, Arc<Formula>),
    Forall(Var, Arc<Formula>),
}

impl From<Folded> for Formula {
    fn from(f: Folded) -> Self {
        match f {
            Folded::Const(true) => Formula::True,
            Folded::Const(false) => Formula::False,
            Folded::Atom(a) => Formula::Atom(Arc::new(a)),
        }
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(Arc::new(a))
    }
}

impl From<bool> for Formula {
    fn from(b: bool) -> Self {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }
}

impl Formula {
    /// `lhs rel rhs`, normalized.
    pub fn compare(lhs: &LinTerm, rel: Rel, rhs: &LinTerm) -> Formula {
        Atom::cmp(rel, lhs.sub(rhs)).into()
    }

    pub fn le(lhs: &LinTerm, rhs: &LinTerm) -> Formula {
        Formula::compare(lhs, Rel::Le, rhs)
    }

    pub fn lt(lhs: &LinTerm, rhs: &LinTerm) -> Formula {
        Formula::compare(lhs, Rel::Lt, rhs)
    }

    pub fn ge(lhs: &LinTerm, rhs: &LinTerm) -> Formula {
        Formula::compare(rhs, Rel::Le, lhs)
    }

    pub fn gt(lhs: &LinTerm, rhs: &LinTerm) -> Formula {
        Formula::compare(rhs, Rel::Lt, lhs)
    }

    pub fn eq(lhs: &LinTerm, rhs: &LinTerm) -> Formula {
        Formula::compare(lhs, Rel::Eq, rhs)
    }

    pub fn divides(modulus: i64, term: &LinTerm) -> Formula {
        Atom::divides(modulus.into(), term.clone(), false).into()
    }

    /// Conjunction; the empty conjunction is `True` and a singleton is its element.
    pub fn and(items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::True,
            1 => items.into_iter().next().unwrap(),
            _ => Formula::And(items.into()),
        }
    }

    /// Disjunction; the empty disjunction is `False`.
    pub fn or(items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::False,
            1 => items.into_iter().next().unwrap(),
            _ => Formula::Or(items.into()),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![Formula::not(a), b])
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Arc::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Arc::new(body))
    }

    /// Nested existential over `vars`, outermost first.
    pub fn exists_many(vars: &[Var], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall_many(vars: &[Var], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().all(|x| x.is_quantifier_free()),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(xs) | Formula::Or(xs) => {
                for x in xs.iter() {
                    x.collect_free(bound, out);
                }
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn collect_bound(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(g) => g.collect_bound(out),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.collect_bound(out)),
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                out.insert(v.clone());
                b.collect_bound(out);
            }
        }
    }

    pub fn bound_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_bound(&mut out);
        out
    }

    pub fn mentions(&self, v: &Var) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(a) => a.mentions(v),
            Formula::Not(g) => g.mentions(v),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().any(|x| x.mentions(v)),
            Formula::Exists(w, b) | Formula::Forall(w, b) => w != v && b.mentions(v),
        }
    }

    /// Number of nodes; a rough size measure for diagnostics.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.size(),
            Formula::And(xs) | Formula::Or(xs) => 1 + xs.iter().map(|x| x.size()).sum::<usize>(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + b.size(),
        }
    }

    /// Ground truth value under a total assignment of the free variables.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        for (v, val) in a {
            if v.sort() == Sort::Int && !val.is_integer() {
                return Err(Error::SortMismatch(format!(
                    "integer variable `{}` assigned {}",
                    v, val
                )));
            }
        }
        self.eval_unchecked(a)
    }

    pub(crate) fn eval_unchecked(&self, a: &Assignment) -> Result<bool> {
        match self {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atom(at) => at
                .eval(a)
                .map_err(|v| Error::UnassignedVariable(v.name().to_string())),
            Formula::Not(g) => Ok(!g.eval_unchecked(a)?),
            Formula::And(xs) => {
                for x in xs.iter() {
                    if !x.eval_unchecked(a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(xs) => {
                for x in xs.iter() {
                    if x.eval_unchecked(a)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists(..) | Formula::Forall(..) => Err(Error::QuantifierInGroundEvaluation),
        }
    }

    /// Replaces free occurrences of `v` by `t`, re-normalizing atoms.
    pub fn substitute(&self, v: &Var, t: &LinTerm) -> Result<Formula> {
        if let Some(s) = t.sort() {
            if s != v.sort() {
                return Err(Error::SortMismatch(format!(
                    "cannot substitute a {} term for {} variable `{}`",
                    s,
                    v.sort(),
                    v
                )));
            }
        }
        if v.sort() == Sort::Int
            && (t.coeffs().iter().any(|(_, c)| !c.is_integer()) || !t.constant_part().is_integer())
        {
            return Err(Error::SortMismatch(format!(
                "non-integral term substituted for integer variable `{}`",
                v
            )));
        }
        let bound = self.bound_vars();
        if let Some(w) = t.vars().find(|w| bound.contains(*w)) {
            return Err(Error::VariableCapture(w.name().to_string()));
        }
        Ok(self.subst_unchecked(v, t))
    }

    pub(crate) fn subst_unchecked(&self, v: &Var, t: &LinTerm) -> Formula {
        self.map_atoms_scoped(v, &|a: &Atom| {
            if a.mentions(v) {
                a.map_term(|term| term.substitute(v, t)).into()
            } else {
                Formula::Atom(Arc::new(a.clone()))
            }
        })
    }

    /// Applies `f` to every atom not under a binder of `v`.
    fn map_atoms_scoped(&self, v: &Var, f: &dyn Fn(&Atom) -> Formula) -> Formula {
        if !self.mentions(v) {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms_scoped(v, f)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.map_atoms_scoped(v, f)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.map_atoms_scoped(v, f)).collect()),
            Formula::Exists(w, b) => Formula::exists(w.clone(), b.map_atoms_scoped(v, f)),
            Formula::Forall(w, b) => Formula::forall(w.clone(), b.map_atoms_scoped(v, f)),
        }
    }

    /// Simultaneously renames free variables according to `map`.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => {
                if !a.vars().any(|v| map.contains_key(v)) {
                    return self.clone();
                }
                a.map_term(|t| t.rename(map)).into()
            }
            Formula::Not(g) => Formula::not(g.rename(map)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.rename(map)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.rename(map)).collect()),
            Formula::Exists(w, b) | Formula::Forall(w, b) => {
                let body = if map.contains_key(w) {
                    let mut inner = map.clone();
                    inner.remove(w);
                    b.rename(&inner)
                } else {
                    b.rename(map)
                };
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(w.clone(), body)
                } else {
                    Formula::forall(w.clone(), body)
                }
            }
        }
    }

    /// Top-level conjuncts (a non-`And` formula is its own single conjunct).
    pub fn conjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::And(xs) => xs.to_vec(),
            Formula::True => Vec::new(),
            f => vec![f.clone()],
        }
    }

    /// Top-level disjuncts (`False` has none).
    pub fn disjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::Or(xs) => xs.to_vec(),
            Formula::False => Vec::new(),
            f => vec![f.clone()],
        }
    }

    pub fn to_nnf(&self) -> Formula {
        nnf::to_nnf(self, false)
    }

    pub fn simplify(&self) -> Formula {
        simplify::simplify(self)
    }

    /// The canonical s-expression rendering.
    pub fn to_sexpr(&self) -> String {
        sexpr::print_formula(self)
    }

    pub fn parse_sexpr(src: &str, default_sort: Sort) -> Result<Formula> {
        sexpr::parse_formula(src, default_sort)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

/// Convenience: `sum(c * v) + k` from integer coefficients.
pub fn lin(pairs: &[(i64, &Var)], k: i64) -> LinTerm {
    LinTerm::from_pairs(
        pairs.iter().map(|(c, v)| ((*v).clone(), Rational::from_int(*c))),
        Rational::from_int(k),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assign(pairs: &[(&Var, i64)]) -> Assignment {
        pairs
            .iter()
            .map(|(v, k)| ((*v).clone(), Rational::from_int(*k)))
            .collect()
    }

    #[test]
    fn evaluate_examples() {
        let x = Var::int("x");
        let y = Var::int("y");
        assert!(Formula::le(&lin(&[(1, &x)], 0), &lin(&[], 5)).evaluate(&assign(&[(&x, 3)])).unwrap());
        let xr = Var::real("x");
        let irreflexive = Formula::lt(&lin(&[(1, &xr)], 0), &lin(&[(1, &xr)], 0));
        assert!(!irreflexive.evaluate(&assign(&[(&xr, 7)])).unwrap());
        assert!(!Formula::divides(2, &lin(&[(1, &y)], 0)).evaluate(&assign(&[(&y, 5)])).unwrap());
    }

    #[test]
    fn evaluate_errors() {
        let x = Var::int("x");
        let f = Formula::le(&lin(&[(1, &x)], 0), &lin(&[], 5));
        assert!(matches!(f.evaluate(&Assignment::new()), Err(Error::UnassignedVariable(_))));
        let q = Formula::exists(x.clone(), f);
        assert!(matches!(q.evaluate(&Assignment::new()), Err(Error::QuantifierInGroundEvaluation)));
    }

    #[test]
    fn substitute_examples() {
        let x = Var::real("x");
        let y = Var::real("y");
        let f = Formula::le(&lin(&[(1, &x), (1, &y)], 0), &lin(&[], 2));
        let g = f.substitute(&x, &lin(&[(2, &y)], 0)).unwrap();
        assert_eq!(g, Formula::le(&lin(&[(3, &y)], 0), &lin(&[], 2)));

        let e = Formula::eq(&lin(&[(1, &x)], 0), &lin(&[], 0));
        assert_eq!(e.substitute(&x, &LinTerm::var(&x)).unwrap(), e);

        let xi = Var::int("x");
        let yi = Var::int("y");
        let d = Formula::divides(2, &LinTerm::var(&xi));
        assert_eq!(
            d.substitute(&xi, &lin(&[(1, &yi)], 1)).unwrap(),
            Formula::divides(2, &lin(&[(1, &yi)], 1))
        );
    }

    #[test]
    fn substitute_errors() {
        let x = Var::int("x");
        let y = Var::int("y");
        let f = Formula::exists(y.clone(), Formula::le(&lin(&[(1, &x), (1, &y)], 0), &lin(&[], 0)));
        assert!(matches!(f.substitute(&x, &LinTerm::var(&y)), Err(Error::VariableCapture(_))));
        let r = Var::real("r");
        assert!(matches!(f.substitute(&x, &LinTerm::var(&r)), Err(Error::SortMismatch(_))));
    }

    #[test]
    fn rename_respects_binders() {
        let x = Var::int("x");
        let y = Var::int("y");
        let body = Formula::le(&lin(&[(1, &x), (1, &y)], 0), &lin(&[], 0));
        let f = Formula::and(vec![body.clone(), Formula::exists(x.clone(), body)]);
        let map: BTreeMap<Var, Var> = [(x.clone(), Var::int("z"))].into_iter().collect();
        let g = f.rename(&map);
        assert_eq!(g.free_vars().into_iter().map(|v| v.name().to_string()).collect::<Vec<_>>(), vec!["y", "z"]);
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sexpr())
    }
}
