use std::sync::Arc;

use super::Formula;

/// Pushes negations down to atoms. Negated comparisons are rewritten into
/// positive atoms; negated divisibility becomes `NotDivides`.
pub(super) fn to_nnf(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True => (!neg).into(),
        Formula::False => neg.into(),
        Formula::Atom(a) => {
            if !neg {
                f.clone()
            } else {
                Formula::or(
                    a.negation()
                        .into_iter()
                        .map(|x| Formula::Atom(Arc::new(x)))
                        .collect(),
                )
            }
        }
        Formula::Not(g) => to_nnf(g, !neg),
        Formula::And(xs) => {
            let items = xs.iter().map(|x| to_nnf(x, neg)).collect();
            if neg {
                Formula::or(items)
            } else {
                Formula::and(items)
            }
        }
        Formula::Or(xs) => {
            let items = xs.iter().map(|x| to_nnf(x, neg)).collect();
            if neg {
                Formula::and(items)
            } else {
                Formula::or(items)
            }
        }
        Formula::Exists(v, b) => {
            let body = to_nnf(b, neg);
            if neg {
                Formula::forall(v.clone(), body)
            } else {
                Formula::exists(v.clone(), body)
            }
        }
        Formula::Forall(v, b) => {
            let body = to_nnf(b, neg);
            if neg {
                Formula::exists(v.clone(), body)
            } else {
                Formula::forall(v.clone(), body)
            }
        }
    }
}

/// True when `Not` occurs only directly above atoms (or not at all).
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => true,
        Formula::Not(g) => matches!(**g, Formula::Atom(_)),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().all(is_nnf),
        Formula::Exists(_, b) | Formula::Forall(_, b) => is_nnf(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{lin, Var};

    #[test]
    fn de_morgan() {
        let x = Var::real("x");
        let a = Formula::le(&lin(&[(1, &x)], 0), &lin(&[], 1));
        let b = Formula::le(&lin(&[(1, &x)], 0), &lin(&[], 2));
        let f = Formula::not(Formula::and(vec![a.clone(), b.clone()]));
        let expect = Formula::or(vec![
            Formula::gt(&lin(&[(1, &x)], 0), &lin(&[], 1)),
            Formula::gt(&lin(&[(1, &x)], 0), &lin(&[], 2)),
        ]);
        assert_eq!(f.to_nnf(), expect);
    }

    #[test]
    fn quantifier_duality() {
        let x = Var::real("x");
        let a = Formula::le(&lin(&[(1, &x)], 0), &lin(&[], 0));
        let f = Formula::not(Formula::forall(x.clone(), a));
        let g = f.to_nnf();
        assert_eq!(g, Formula::exists(x.clone(), Formula::lt(&lin(&[(-1, &x)], 0), &lin(&[], 0))));
        assert!(is_nnf(&g));
    }

    #[test]
    fn real_order_negation() {
        let x = Var::real("x");
        let f = Formula::not(Formula::le(&LinTerm::var(&x), &lin(&[], 0)));
        assert_eq!(f.to_nnf(), Formula::lt(&lin(&[(-1, &x)], 0), &lin(&[], 0)));
    }

    use crate::formula::LinTerm;
}
