use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Value domain of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Int,
    Real,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Real => write!(f, "Real"),
        }
    }
}

/// A named, sorted variable. Ordering is by name, which fixes the variable
/// order used by canonical atom forms.
#[derive(Clone)]
pub struct Var {
    name: Arc<str>,
    sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<Arc<str>>, sort: Sort) -> Self {
        Var {
            name: name.into(),
            sort,
        }
    }

    pub fn int(name: &str) -> Self {
        Var::new(name, Sort::Int)
    }

    pub fn real(name: &str) -> Self {
        Var::new(name, Sort::Real)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    /// Same sort, name with `suffix` appended.
    pub fn suffixed(&self, suffix: &str) -> Var {
        Var::new(format!("{}{}", self.name, suffix), self.sort)
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.name, &other.name) || self.name == other.name) && self.sort == other.sort
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.sort.hash(state);
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.name, &other.name) {
            return self.sort.cmp(&other.sort);
        }
        self.name
            .cmp(&other.name)
            .then(self.sort.cmp(&other.sort))
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A total assignment of values to variables.
pub type Assignment = BTreeMap<Var, Rational>;

/// A linear combination `sum(c_i * v_i) + constant`, with coefficients kept
/// sorted by variable and never zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LinTerm {
    coeffs: Vec<(Var, Rational)>,
    constant: Rational,
}

impl LinTerm {
    pub fn zero() -> Self {
        LinTerm::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinTerm {
            coeffs: Vec::new(),
            constant: c,
        }
    }

    pub fn var(v: &Var) -> Self {
        LinTerm {
            coeffs: vec![(v.clone(), Rational::one())],
            constant: Rational::zero(),
        }
    }

    pub fn monomial(v: &Var, c: Rational) -> Self {
        if c.is_zero() {
            return LinTerm::zero();
        }
        LinTerm {
            coeffs: vec![(v.clone(), c)],
            constant: Rational::zero(),
        }
    }

    /// Builds a term from arbitrary (possibly repeated, possibly zero) pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Rational)>, constant: Rational) -> Self {
        let mut map: BTreeMap<Var, Rational> = BTreeMap::new();
        for (v, c) in pairs {
            let e = map.entry(v).or_insert_with(Rational::zero);
            *e += &c;
        }
        LinTerm {
            coeffs: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            constant,
        }
    }

    pub(crate) fn from_sorted_raw(coeffs: Vec<(Var, Rational)>, constant: Rational) -> Self {
        debug_assert!(coeffs.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(coeffs.iter().all(|(_, c)| !c.is_zero()));
        LinTerm { coeffs, constant }
    }

    pub fn coeffs(&self) -> &[(Var, Rational)] {
        &self.coeffs
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: &Var) -> Rational {
        match self.coeffs.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => self.coeffs[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.binary_search_by(|(w, _)| w.cmp(v)).is_ok()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.iter().map(|(v, _)| v)
    }

    /// The sort of the first variable, if any.
    pub fn sort(&self) -> Option<Sort> {
        self.coeffs.first().map(|(v, _)| v.sort())
    }

    /// The term with `v` removed (its coefficient dropped).
    pub fn without(&self, v: &Var) -> LinTerm {
        LinTerm {
            coeffs: self.coeffs.iter().filter(|(w, _)| w != v).cloned().collect(),
            constant: self.constant.clone(),
        }
    }

    pub fn linear_part(&self) -> LinTerm {
        LinTerm {
            coeffs: self.coeffs.clone(),
            constant: Rational::zero(),
        }
    }

    pub fn add(&self, other: &LinTerm) -> LinTerm {
        self.add_scaled(other, &Rational::one())
    }

    pub fn sub(&self, other: &LinTerm) -> LinTerm {
        self.add_scaled(other, &-Rational::one())
    }

    /// `self + k * other`, merging the sorted coefficient lists.
    pub fn add_scaled(&self, other: &LinTerm, k: &Rational) -> LinTerm {
        if k.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + other.coeffs.len());
        let (mut i, mut j) = (0, 0);
        while i < self.coeffs.len() || j < other.coeffs.len() {
            let ord = match (self.coeffs.get(i), other.coeffs.get(j)) {
                (Some((a, _)), Some((b, _))) => a.cmp(b),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, _) => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    out.push(self.coeffs[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let (v, c) = &other.coeffs[j];
                    out.push((v.clone(), c * k));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &self.coeffs[i].1 + &(&other.coeffs[j].1 * k);
                    if !c.is_zero() {
                        out.push((self.coeffs[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        LinTerm {
            coeffs: out,
            constant: &self.constant + &(&other.constant * k),
        }
    }

    pub fn scale(&self, k: &Rational) -> LinTerm {
        if k.is_zero() {
            return LinTerm::zero();
        }
        LinTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn negate(&self) -> LinTerm {
        self.scale(&-Rational::one())
    }

    pub fn add_constant(&self, k: &Rational) -> LinTerm {
        LinTerm {
            coeffs: self.coeffs.clone(),
            constant: &self.constant + k,
        }
    }

    /// Replaces `v` by `t`.
    pub fn substitute(&self, v: &Var, t: &LinTerm) -> LinTerm {
        let c = self.coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        self.without(v).add_scaled(t, &c)
    }

    /// Simultaneous variable renaming. Renamed variables must not collide in a
    /// way that merges distinct coefficients incorrectly (merging is summed).
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> LinTerm {
        if !self.coeffs.iter().any(|(v, _)| map.contains_key(v)) {
            return self.clone();
        }
        LinTerm::from_pairs(
            self.coeffs
                .iter()
                .map(|(v, c)| (map.get(v).unwrap_or(v).clone(), c.clone())),
            self.constant.clone(),
        )
    }

    /// Value under `a`; `None` if some variable is unassigned.
    pub fn eval(&self, a: &Assignment) -> Option<Rational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let val = a.get(v)?;
            acc += &(c * val);
        }
        Some(acc)
    }

    pub fn first_unassigned<'a>(&'a self, a: &Assignment) -> Option<&'a Var> {
        self.coeffs.iter().map(|(v, _)| v).find(|v| !a.contains_key(*v))
    }
}

impl fmt::Debug for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}*{}", c, v)?;
            }
        }
        if first || !self.constant.is_zero() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{}", self.constant)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_cancels_and_sorts() {
        let x = Var::int("x");
        let y = Var::int("y");
        let a = LinTerm::from_pairs([(y.clone(), Rational::one()), (x.clone(), Rational::from_int(2))], Rational::one());
        let b = LinTerm::from_pairs([(y.clone(), -Rational::one())], Rational::zero());
        let s = a.add(&b);
        assert_eq!(s.coeffs().len(), 1);
        assert_eq!(s.coeff(&x), Rational::from_int(2));
        assert!(!s.mentions(&y));
    }

    #[test]
    fn substitute_linear() {
        let x = Var::real("x");
        let y = Var::real("y");
        // x + y, x := 2y  ->  3y
        let t = LinTerm::var(&x).add(&LinTerm::var(&y));
        let r = t.substitute(&x, &LinTerm::monomial(&y, Rational::from_int(2)));
        assert_eq!(r, LinTerm::monomial(&y, Rational::from_int(3)));
    }
}
