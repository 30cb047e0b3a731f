use std::collections::HashSet;
use std::sync::Arc;

use super::Formula;

/// Syntactic simplification: flattening, constant absorption, sibling
/// deduplication, complementary-literal detection, and dropping vacuous
/// binders. Atoms are already folded when ground, so no arithmetic happens here.
pub(super) fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => match simplify(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(h) => (*h).clone(),
            Formula::Atom(a) => {
                let neg = a.negation();
                if neg.len() == 1 {
                    Formula::Atom(Arc::new(neg.into_iter().next().unwrap()))
                } else {
                    Formula::not(Formula::Atom(a))
                }
            }
            h => Formula::not(h),
        },
        Formula::And(xs) => junction(xs, true),
        Formula::Or(xs) => junction(xs, false),
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let body = simplify(b);
            if !body.mentions(v) {
                return body;
            }
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(v.clone(), body)
            } else {
                Formula::forall(v.clone(), body)
            }
        }
    }
}

fn junction(xs: &[Formula], is_and: bool) -> Formula {
    let absorbing = if is_and { Formula::False } else { Formula::True };
    let mut out: Vec<Formula> = Vec::with_capacity(xs.len());
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut push = |g: Formula, out: &mut Vec<Formula>| {
        if seen.insert(g.clone()) {
            out.push(g);
        }
    };
    for x in xs {
        let s = simplify(x);
        match (&s, is_and) {
            (Formula::True, true) | (Formula::False, false) => continue,
            (Formula::False, true) | (Formula::True, false) => return absorbing,
            (Formula::And(ys), true) | (Formula::Or(ys), false) => {
                for y in ys.iter() {
                    push(y.clone(), &mut out);
                }
            }
            _ => push(s, &mut out),
        }
    }
    // a and (not a), or a single-atom complement, collapses the junction.
    let set: HashSet<&Formula> = out.iter().collect();
    for g in &out {
        if let Formula::Atom(a) = g {
            let neg = a.negation();
            if neg.len() == 1 && set.contains(&Formula::Atom(Arc::new(neg[0].clone()))) {
                return absorbing;
            }
            if set.contains(&Formula::not(g.clone())) {
                return absorbing;
            }
        }
    }
    if is_and {
        Formula::and(out)
    } else {
        Formula::or(out)
    }
}
