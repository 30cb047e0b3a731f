use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::term::{Assignment, LinTerm, Sort, Var};
use crate::rational::Rational;

/// Relation of a comparison atom `term rel 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

impl Rel {
    pub fn holds(self, v: &Rational) -> bool {
        match self {
            Rel::Le => !v.is_positive(),
            Rel::Lt => v.is_negative(),
            Rel::Eq => v.is_zero(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "=",
        }
    }
}

/// A linear-arithmetic literal in canonical form.
///
/// Comparisons are `term rel 0` with primitive integer coefficients (the
/// constant is folded into the gcd for `Real`; tightened by rounding for
/// `Int`). Equalities have a positive leading coefficient. Over `Int` there
/// are no strict comparisons. Divisibility atoms have coefficients reduced
/// modulo the modulus and `modulus >= 2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Cmp { rel: Rel, term: LinTerm },
    Divides { modulus: BigInt, term: LinTerm },
    NotDivides { modulus: BigInt, term: LinTerm },
}

/// Result of normalizing a candidate atom: ground atoms fold to a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Folded {
    Const(bool),
    Atom(Atom),
}

fn lcm_of_denominators(t: &LinTerm) -> BigInt {
    let mut l = t.constant_part().denom();
    for (_, c) in t.coeffs() {
        l = l.lcm(&c.denom());
    }
    l
}

fn gcd_of_numerators(t: &LinTerm, with_constant: bool) -> BigInt {
    let mut g = BigInt::zero();
    for (_, c) in t.coeffs() {
        g = g.gcd(&c.numer());
    }
    if with_constant {
        g = g.gcd(&t.constant_part().numer());
    }
    g
}

/// Scales `t` by a positive factor so every coefficient (and the constant)
/// becomes an integer.
fn integralize(t: &LinTerm) -> LinTerm {
    let l = lcm_of_denominators(t);
    if l.is_one() {
        t.clone()
    } else {
        t.scale(&Rational::from_bigint(l))
    }
}

fn flip_if_leading_negative(t: LinTerm) -> LinTerm {
    match t.coeffs().first() {
        Some((_, c)) if c.is_negative() => t.negate(),
        _ => t,
    }
}

fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

impl Atom {
    /// Canonicalizes `term rel 0`.
    pub fn cmp(rel: Rel, term: LinTerm) -> Folded {
        if term.is_constant() {
            return Folded::Const(rel.holds(term.constant_part()));
        }
        let sort = term.sort().expect("non-constant term has a variable");
        let t = integralize(&term);
        match sort {
            Sort::Real => {
                let g = gcd_of_numerators(&t, true);
                let t = if g.is_one() {
                    t
                } else {
                    t.scale(&Rational::from_bigs(BigInt::one(), g))
                };
                let t = if rel == Rel::Eq {
                    flip_if_leading_negative(t)
                } else {
                    t
                };
                Folded::Atom(Atom::Cmp { rel, term: t })
            }
            Sort::Int => {
                let (rel, t) = match rel {
                    Rel::Lt => (Rel::Le, t.add_constant(&Rational::one())),
                    r => (r, t),
                };
                let g = gcd_of_numerators(&t, false);
                let g_r = Rational::from_bigint(g.clone());
                match rel {
                    Rel::Le => {
                        let lin = t.linear_part().scale(&g_r.recip());
                        let c = (t.constant_part() / &g_r).ceil();
                        Folded::Atom(Atom::Cmp {
                            rel: Rel::Le,
                            term: lin.add_constant(&c),
                        })
                    }
                    Rel::Eq => {
                        let c = t.constant_part().numer();
                        if !c.is_multiple_of(&g) {
                            return Folded::Const(false);
                        }
                        let t = flip_if_leading_negative(t.scale(&g_r.recip()));
                        Folded::Atom(Atom::Cmp { rel: Rel::Eq, term: t })
                    }
                    Rel::Lt => unreachable!(),
                }
            }
        }
    }

    /// Canonicalizes `modulus | term` (or its negation).
    pub fn divides(modulus: BigInt, term: LinTerm, negated: bool) -> Folded {
        assert!(modulus.is_positive(), "divisibility modulus must be positive");
        // m | t  <=>  m*L | t*L for any positive L
        let l = lcm_of_denominators(&term);
        let (mut m, t) = if l.is_one() {
            (modulus, term)
        } else {
            (&modulus * &l, term.scale(&Rational::from_bigint(l)))
        };
        let reduce = |c: &Rational, m: &BigInt| Rational::from_bigint(mod_floor(&c.numer(), m));
        let mut t = LinTerm::from_sorted_raw(
            t.coeffs()
                .iter()
                .map(|(v, c)| (v.clone(), reduce(c, &m)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            reduce(t.constant_part(), &m),
        );
        let g = gcd_of_numerators(&t, true).gcd(&m);
        if !g.is_one() && !g.is_zero() {
            m = &m / &g;
            let gr = Rational::from_bigint(g);
            t = t.scale(&gr.recip());
        }
        if m.is_one() {
            return Folded::Const(!negated);
        }
        if t.is_constant() {
            let holds = t.constant_part().is_zero();
            return Folded::Const(holds != negated);
        }
        if negated {
            Folded::Atom(Atom::NotDivides { modulus: m, term: t })
        } else {
            Folded::Atom(Atom::Divides { modulus: m, term: t })
        }
    }

    pub fn term(&self) -> &LinTerm {
        match self {
            Atom::Cmp { term, .. } | Atom::Divides { term, .. } | Atom::NotDivides { term, .. } => {
                term
            }
        }
    }

    pub fn sort(&self) -> Sort {
        self.term().sort().unwrap_or(Sort::Real)
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.term().mentions(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.term().vars()
    }

    /// Truth value under a total assignment; `Err(v)` names an unassigned variable.
    pub fn eval(&self, a: &Assignment) -> Result<bool, Var> {
        let val = match self.term().eval(a) {
            Some(v) => v,
            None => return Err(self.term().first_unassigned(a).cloned().unwrap()),
        };
        Ok(match self {
            Atom::Cmp { rel, .. } => rel.holds(&val),
            Atom::Divides { modulus, .. } => {
                val.is_integer() && val.numer().is_multiple_of(modulus)
            }
            Atom::NotDivides { modulus, .. } => {
                !(val.is_integer() && val.numer().is_multiple_of(modulus))
            }
        })
    }

    /// Rebuilds the atom over a transformed term, re-normalizing.
    pub fn map_term(&self, f: impl FnOnce(&LinTerm) -> LinTerm) -> Folded {
        match self {
            Atom::Cmp { rel, term } => Atom::cmp(*rel, f(term)),
            Atom::Divides { modulus, term } => Atom::divides(modulus.clone(), f(term), false),
            Atom::NotDivides { modulus, term } => Atom::divides(modulus.clone(), f(term), true),
        }
    }

    /// The negation as a disjunction of atoms (one element except for
    /// equalities, which split into two strict sides).
    pub fn negation(&self) -> Vec<Atom> {
        let sort = self.sort();
        let pick = |f: Folded| match f {
            Folded::Atom(a) => vec![a],
            Folded::Const(_) => unreachable!("negating a canonical atom cannot fold"),
        };
        match self {
            Atom::Cmp { rel, term } => match (rel, sort) {
                (Rel::Le, _) => pick(Atom::cmp(Rel::Lt, term.negate())),
                (Rel::Lt, _) => pick(Atom::cmp(Rel::Le, term.negate())),
                (Rel::Eq, _) => {
                    let mut v = pick(Atom::cmp(Rel::Lt, term.clone()));
                    v.extend(pick(Atom::cmp(Rel::Lt, term.negate())));
                    v
                }
            },
            Atom::Divides { modulus, term } => vec![Atom::NotDivides {
                modulus: modulus.clone(),
                term: term.clone(),
            }],
            Atom::NotDivides { modulus, term } => vec![Atom::Divides {
                modulus: modulus.clone(),
                term: term.clone(),
            }],
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Cmp { rel, term } => write!(f, "{:?} {} 0", term, rel.symbol()),
            Atom::Divides { modulus, term } => write!(f, "{} | {:?}", modulus, term),
            Atom::NotDivides { modulus, term } => write!(f, "{} !| {:?}", modulus, term),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(pairs: &[(&Var, i64)], c: i64) -> LinTerm {
        LinTerm::from_pairs(
            pairs.iter().map(|(v, k)| ((*v).clone(), Rational::from_int(*k))),
            Rational::from_int(c),
        )
    }

    #[test]
    fn int_strict_becomes_nonstrict() {
        let x = Var::int("x");
        // x - 5 < 0  ->  x - 4 <= 0
        let a = Atom::cmp(Rel::Lt, t(&[(&x, 1)], -5));
        assert_eq!(a, Folded::Atom(Atom::Cmp { rel: Rel::Le, term: t(&[(&x, 1)], -4) }));
    }

    #[test]
    fn int_tightening() {
        let y = Var::int("y");
        // 3y - 2 <= 0  ->  y <= 0
        let a = Atom::cmp(Rel::Le, t(&[(&y, 3)], -2));
        assert_eq!(a, Folded::Atom(Atom::Cmp { rel: Rel::Le, term: t(&[(&y, 1)], 0) }));
        // 2y = 1 has no integer solution
        assert_eq!(Atom::cmp(Rel::Eq, t(&[(&y, 2)], -1)), Folded::Const(false));
    }

    #[test]
    fn real_primitive_form() {
        let x = Var::real("x");
        let y = Var::real("y");
        let a = Atom::cmp(Rel::Eq, t(&[(&x, -2), (&y, 4)], 6));
        assert_eq!(a, Folded::Atom(Atom::Cmp { rel: Rel::Eq, term: t(&[(&x, 1), (&y, -2)], -3) }));
    }

    #[test]
    fn ground_folds() {
        assert_eq!(Atom::cmp(Rel::Le, LinTerm::constant(Rational::from_int(3))), Folded::Const(false));
        assert_eq!(Atom::divides(BigInt::from(2), LinTerm::constant(Rational::from_int(4)), false), Folded::Const(true));
    }

    #[test]
    fn divides_reduces() {
        let x = Var::int("x");
        // 4 | 6x + 2  ->  2 | 3x + 1  ->  2 | x + 1
        let a = Atom::divides(BigInt::from(4), t(&[(&x, 6)], 2), false);
        assert_eq!(a, Folded::Atom(Atom::Divides { modulus: BigInt::from(2), term: t(&[(&x, 1)], 1) }));
        // 2 | 2x + 1 is never true
        assert_eq!(Atom::divides(BigInt::from(2), t(&[(&x, 2)], 1), false), Folded::Const(false));
    }
}
