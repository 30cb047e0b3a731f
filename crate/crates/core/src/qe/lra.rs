//! Incremental exact simplex for conjunctions of linear constraints.
//!
//! General-form tableau with bounded variables and symbolic infinitesimals
//! for strict bounds, pivoting by Bland's rule. Bounds can be pushed and
//! popped; the tableau itself is never rolled back, which keeps repeated
//! implication queries against one conjunction cheap.

use std::collections::HashMap;

use crate::formula::{Assignment, Atom, LinTerm, Rel, Var};
use crate::rational::Rational;

/// `r + d * delta` for a positive infinitesimal `delta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct DVal {
    r: Rational,
    d: Rational,
}

impl DVal {
    fn zero() -> Self {
        DVal {
            r: Rational::zero(),
            d: Rational::zero(),
        }
    }

    fn new(r: Rational, d: i64) -> Self {
        DVal {
            r,
            d: Rational::from_int(d),
        }
    }

    fn add(&self, o: &DVal) -> DVal {
        DVal {
            r: &self.r + &o.r,
            d: &self.d + &o.d,
        }
    }

    fn sub(&self, o: &DVal) -> DVal {
        DVal {
            r: &self.r - &o.r,
            d: &self.d - &o.d,
        }
    }

    fn scale(&self, k: &Rational) -> DVal {
        DVal {
            r: &self.r * k,
            d: &self.d * k,
        }
    }
}

#[derive(Clone, Default)]
pub struct Simplex {
    lower: Vec<Option<DVal>>,
    upper: Vec<Option<DVal>>,
    value: Vec<DVal>,
    basic_row: Vec<Option<usize>>,
    row_basic: Vec<usize>,
    rows: Vec<Vec<Rational>>,
    struct_index: HashMap<Var, usize>,
    slack_index: HashMap<LinTerm, usize>,
    trail: Vec<(usize, Option<DVal>, Option<DVal>)>,
    marks: Vec<usize>,
}

impl Simplex {
    pub fn new() -> Self {
        Self::default()
    }

    fn add_column(&mut self) -> usize {
        let c = self.value.len();
        self.lower.push(None);
        self.upper.push(None);
        self.value.push(DVal::zero());
        self.basic_row.push(None);
        for row in &mut self.rows {
            row.push(Rational::zero());
        }
        c
    }

    fn struct_col(&mut self, v: &Var) -> usize {
        if let Some(&c) = self.struct_index.get(v) {
            return c;
        }
        let c = self.add_column();
        self.struct_index.insert(v.clone(), c);
        c
    }

    /// Column holding the value of the (constant-free, monic) term `m`.
    fn slack_col(&mut self, m: &LinTerm) -> usize {
        if let Some(&c) = self.slack_index.get(m) {
            return c;
        }
        let cols: Vec<(usize, Rational)> = m
            .coeffs()
            .iter()
            .map(|(v, a)| (self.struct_col(v), a.clone()))
            .collect();
        let s = self.add_column();
        let mut row = vec![Rational::zero(); self.value.len()];
        let mut val = DVal::zero();
        for (c, a) in cols {
            val = val.add(&self.value[c].scale(&a));
            match self.basic_row[c] {
                Some(r) => {
                    for (k, x) in self.rows[r].iter().enumerate() {
                        if !x.is_zero() {
                            row[k] += &(x * &a);
                        }
                    }
                }
                None => row[c] += &a,
            }
        }
        self.value[s] = val;
        self.basic_row[s] = Some(self.rows.len());
        self.row_basic.push(s);
        self.rows.push(row);
        self.slack_index.insert(m.clone(), s);
        s
    }

    /// Column and scale `k` such that `term = k * col + constant`.
    fn column_for(&mut self, term: &LinTerm) -> (usize, Rational) {
        let lead = term.coeffs()[0].1.clone();
        if term.coeffs().len() == 1 {
            let v = term.coeffs()[0].0.clone();
            return (self.struct_col(&v), lead);
        }
        let monic = term.linear_part().scale(&lead.recip());
        (self.slack_col(&monic), lead)
    }

    pub fn push(&mut self) {
        self.marks.push(self.trail.len());
    }

    pub fn pop(&mut self) {
        let m = self.marks.pop().expect("pop without push");
        while self.trail.len() > m {
            let (c, l, u) = self.trail.pop().unwrap();
            self.lower[c] = l;
            self.upper[c] = u;
        }
    }

    fn update_nonbasic(&mut self, c: usize, v: DVal) {
        let delta = v.sub(&self.value[c]);
        self.value[c] = v;
        for (r, row) in self.rows.iter().enumerate() {
            let a = &row[c];
            if !a.is_zero() {
                let b = self.row_basic[r];
                self.value[b] = self.value[b].add(&delta.scale(a));
            }
        }
    }

    fn assert_upper(&mut self, c: usize, v: DVal) -> bool {
        if let Some(u) = &self.upper[c] {
            if *u <= v {
                return true;
            }
        }
        if let Some(l) = &self.lower[c] {
            if *l > v {
                return false;
            }
        }
        self.trail
            .push((c, self.lower[c].clone(), self.upper[c].clone()));
        self.upper[c] = Some(v.clone());
        if self.basic_row[c].is_none() && self.value[c] > v {
            self.update_nonbasic(c, v);
        }
        true
    }

    fn assert_lower(&mut self, c: usize, v: DVal) -> bool {
        if let Some(l) = &self.lower[c] {
            if *l >= v {
                return true;
            }
        }
        if let Some(u) = &self.upper[c] {
            if *u < v {
                return false;
            }
        }
        self.trail
            .push((c, self.lower[c].clone(), self.upper[c].clone()));
        self.lower[c] = Some(v.clone());
        if self.basic_row[c].is_none() && self.value[c] < v {
            self.update_nonbasic(c, v);
        }
        true
    }

    /// Adds the bound(s) expressed by a comparison atom. Divisibility atoms are
    /// ignored (the simplex sees the rational relaxation). Returns `false` on
    /// an immediate bound conflict.
    pub fn assert_atom(&mut self, a: &Atom) -> bool {
        let (rel, term) = match a {
            Atom::Cmp { rel, term } => (*rel, term),
            _ => return true,
        };
        if term.is_constant() {
            return rel.holds(term.constant_part());
        }
        let (c, k) = self.column_for(term);
        // k * col + c0 rel 0  <=>  col rel' -c0 / k
        let bound = -(term.constant_part() / &k);
        let strict = rel == Rel::Lt;
        let pos = k.is_positive();
        match rel {
            Rel::Eq => {
                self.assert_upper(c, DVal::new(bound.clone(), 0)) && self.assert_lower(c, DVal::new(bound, 0))
            }
            _ => {
                if pos {
                    self.assert_upper(c, DVal::new(bound, if strict { -1 } else { 0 }))
                } else {
                    self.assert_lower(c, DVal::new(bound, if strict { 1 } else { 0 }))
                }
            }
        }
    }

    /// Decides `a` from the currently asserted bounds alone, without pivoting:
    /// `Some(true)` if entailed, `Some(false)` if contradicted, `None` if unknown.
    pub fn bound_status(&self, a: &Atom) -> Option<bool> {
        let (rel, term) = match a {
            Atom::Cmp { rel, term } => (*rel, term),
            _ => return None,
        };
        if term.is_constant() {
            return Some(rel.holds(term.constant_part()));
        }
        let lead = term.coeffs()[0].1.clone();
        let c = if term.coeffs().len() == 1 {
            *self.struct_index.get(&term.coeffs()[0].0)?
        } else {
            *self.slack_index.get(&term.linear_part().scale(&lead.recip()))?
        };
        let bound = -(term.constant_part() / &lead);
        let lo = self.lower[c].as_ref();
        let hi = self.upper[c].as_ref();
        let strict = rel == Rel::Lt;
        match rel {
            Rel::Eq => {
                let b = DVal::new(bound, 0);
                if lo.is_some_and(|l| *l > b) || hi.is_some_and(|u| *u < b) {
                    Some(false)
                } else if lo.is_some_and(|l| *l == b) && hi.is_some_and(|u| *u == b) {
                    Some(true)
                } else {
                    None
                }
            }
            _ if lead.is_positive() => {
                let b = DVal::new(bound, if strict { -1 } else { 0 });
                if hi.is_some_and(|u| *u <= b) {
                    Some(true)
                } else if lo.is_some_and(|l| *l > b) {
                    Some(false)
                } else {
                    None
                }
            }
            _ => {
                let b = DVal::new(bound, if strict { 1 } else { 0 });
                if lo.is_some_and(|l| *l >= b) {
                    Some(true)
                } else if hi.is_some_and(|u| *u < b) {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    fn violates(&self, c: usize) -> Option<bool> {
        if let Some(l) = &self.lower[c] {
            if self.value[c] < *l {
                return Some(true);
            }
        }
        if let Some(u) = &self.upper[c] {
            if self.value[c] > *u {
                return Some(false);
            }
        }
        None
    }

    fn pivot_and_update(&mut self, r: usize, j: usize, v: DVal) {
        let b = self.row_basic[r];
        let a = self.rows[r][j].clone();
        let theta = v.sub(&self.value[b]).scale(&a.recip());
        self.value[b] = v;
        self.value[j] = self.value[j].add(&theta);
        for q in 0..self.rows.len() {
            if q != r {
                let c = &self.rows[q][j];
                if !c.is_zero() {
                    let bq = self.row_basic[q];
                    self.value[bq] = self.value[bq].add(&theta.scale(c));
                }
            }
        }
        self.pivot(r, j);
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let b = self.row_basic[r];
        let a = self.rows[r][j].clone();
        let inv = a.recip();
        let neg_inv = -&inv;
        let mut newrow = std::mem::take(&mut self.rows[r]);
        for (k, x) in newrow.iter_mut().enumerate() {
            if k == j {
                *x = Rational::zero();
            } else if !x.is_zero() {
                *x = &*x * &neg_inv;
            }
        }
        newrow[b] = inv;
        let nz: Vec<usize> = newrow
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, _)| k)
            .collect();
        for q in 0..self.rows.len() {
            if q == r {
                continue;
            }
            let c = self.rows[q][j].clone();
            if c.is_zero() {
                continue;
            }
            let row = &mut self.rows[q];
            row[j] = Rational::zero();
            for &k in &nz {
                row[k] += &(&newrow[k] * &c);
            }
        }
        self.rows[r] = newrow;
        self.row_basic[r] = j;
        self.basic_row[j] = Some(r);
        self.basic_row[b] = None;
    }

    /// Decides feasibility of the asserted bounds.
    pub fn check(&mut self) -> bool {
        loop {
            let mut pick: Option<(usize, usize, bool)> = None;
            for (r, &b) in self.row_basic.iter().enumerate() {
                if let Some(below) = self.violates(b) {
                    if pick.is_none_or(|(_, pb, _)| b < pb) {
                        pick = Some((r, b, below));
                    }
                }
            }
            let (r, b, below) = match pick {
                None => return true,
                Some(p) => p,
            };
            let mut entering: Option<usize> = None;
            for (j, a) in self.rows[r].iter().enumerate() {
                if a.is_zero() || self.basic_row[j].is_some() {
                    continue;
                }
                let can_inc = self.upper[j].as_ref().is_none_or(|u| self.value[j] < *u);
                let can_dec = self.lower[j].as_ref().is_none_or(|l| self.value[j] > *l);
                let ok = if below {
                    (a.is_positive() && can_inc) || (a.is_negative() && can_dec)
                } else {
                    (a.is_negative() && can_inc) || (a.is_positive() && can_dec)
                };
                if ok {
                    entering = Some(j);
                    break;
                }
            }
            let j = match entering {
                None => return false,
                Some(j) => j,
            };
            let target = if below {
                self.lower[b].clone().unwrap()
            } else {
                self.upper[b].clone().unwrap()
            };
            self.pivot_and_update(r, j, target);
        }
    }

    /// A concrete rational model of the structural variables after a
    /// successful `check`, instantiating the infinitesimal small enough.
    pub fn model(&self) -> Assignment {
        let mut delta = Rational::one();
        for c in 0..self.value.len() {
            let v = &self.value[c];
            if let Some(l) = &self.lower[c] {
                // v.r + v.d*x >= l.r + l.d*x
                if v.r > l.r && v.d < l.d {
                    delta = delta.min(&(&v.r - &l.r) / &(&l.d - &v.d));
                }
            }
            if let Some(u) = &self.upper[c] {
                if v.r < u.r && v.d > u.d {
                    delta = delta.min(&(&u.r - &v.r) / &(&v.d - &u.d));
                }
            }
        }
        self.struct_index
            .iter()
            .map(|(var, &c)| {
                let v = &self.value[c];
                (var.clone(), &v.r + &(&v.d * &delta))
            })
            .collect()
    }
}

/// Feasibility of a conjunction of comparison atoms over the rationals.
pub fn feasible(atoms: &[Atom]) -> bool {
    let mut s = Simplex::new();
    for a in atoms {
        if !s.assert_atom(a) {
            return false;
        }
    }
    s.check()
}

/// Incremental wrapper answering implication queries against a growing conjunction.
#[derive(Clone, Default)]
pub struct LpContext {
    simplex: Simplex,
    inconsistent: Vec<bool>,
}

impl LpContext {
    pub fn new() -> Self {
        LpContext {
            simplex: Simplex::new(),
            inconsistent: vec![false],
        }
    }

    pub fn push(&mut self) {
        self.simplex.push();
        let cur = *self.inconsistent.last().unwrap();
        self.inconsistent.push(cur);
    }

    pub fn pop(&mut self) {
        self.simplex.pop();
        self.inconsistent.pop();
    }

    /// Adds an atom; returns `false` once the conjunction is known infeasible
    /// by bounds alone (call `check` for the full test).
    pub fn assert(&mut self, a: &Atom) -> bool {
        if *self.inconsistent.last().unwrap() {
            return false;
        }
        if !self.simplex.assert_atom(a) {
            *self.inconsistent.last_mut().unwrap() = true;
            return false;
        }
        true
    }

    pub fn check(&mut self) -> bool {
        if *self.inconsistent.last().unwrap() {
            return false;
        }
        let ok = self.simplex.check();
        if !ok {
            *self.inconsistent.last_mut().unwrap() = true;
        }
        ok
    }

    /// Would adding `a` keep the conjunction feasible?
    pub fn consistent_with(&mut self, a: &Atom) -> bool {
        self.push();
        let ok = self.assert(a) && self.check();
        self.pop();
        ok
    }

    /// Does the current conjunction entail `a` (over the rationals)?
    pub fn entails(&mut self, a: &Atom) -> bool {
        if matches!(a, Atom::Divides { .. } | Atom::NotDivides { .. }) {
            return false;
        }
        a.negation().iter().all(|n| !self.consistent_with(n))
    }

    pub fn bound_status(&self, a: &Atom) -> Option<bool> {
        self.simplex.bound_status(a)
    }

    pub fn model(&self) -> Assignment {
        self.simplex.model()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{lin, Folded};

    fn atom(rel: Rel, t: LinTerm) -> Atom {
        match Atom::cmp(rel, t) {
            Folded::Atom(a) => a,
            _ => panic!("folded"),
        }
    }

    #[test]
    fn simple_feasibility() {
        let x = Var::real("x");
        let y = Var::real("y");
        // x + y <= 1, x >= 1, y > 0  infeasible
        let a = atom(Rel::Le, lin(&[(1, &x), (1, &y)], -1));
        let b = atom(Rel::Le, lin(&[(-1, &x)], 1));
        let c = atom(Rel::Lt, lin(&[(-1, &y)], 0));
        assert!(!feasible(&[a.clone(), b.clone(), c]));
        let c2 = atom(Rel::Le, lin(&[(-1, &y)], 0));
        assert!(feasible(&[a, b, c2]));
    }

    #[test]
    fn strict_interval_model() {
        let x = Var::real("x");
        let lo = atom(Rel::Lt, lin(&[(-1, &x)], 1)); // x > 1
        let hi = atom(Rel::Lt, lin(&[(1, &x)], -2)); // x < 2
        let mut s = Simplex::new();
        assert!(s.assert_atom(&lo) && s.assert_atom(&hi));
        assert!(s.check());
        let m = s.model();
        let v = &m[&x];
        assert!(*v > Rational::one() && *v < Rational::from_int(2));
    }

    #[test]
    fn entailment_with_push_pop() {
        let x = Var::real("x");
        let y = Var::real("y");
        let mut ctx = LpContext::new();
        ctx.assert(&atom(Rel::Le, lin(&[(1, &x), (-1, &y)], 0))); // x <= y
        ctx.assert(&atom(Rel::Le, lin(&[(1, &y)], -3))); // y <= 3
        assert!(ctx.check());
        assert!(ctx.entails(&atom(Rel::Le, lin(&[(1, &x)], -3))));
        assert!(!ctx.entails(&atom(Rel::Le, lin(&[(1, &x)], -2))));
        ctx.push();
        ctx.assert(&atom(Rel::Lt, lin(&[(-1, &x)], 3))); // x > 3
        assert!(!ctx.check());
        ctx.pop();
        assert!(ctx.check());
    }

    #[test]
    fn equalities_chain() {
        let x = Var::real("x");
        let y = Var::real("y");
        let z = Var::real("z");
        let atoms = vec![
            atom(Rel::Eq, lin(&[(1, &x), (-1, &y)], 0)),
            atom(Rel::Eq, lin(&[(1, &y), (-1, &z)], -1)),
            atom(Rel::Lt, lin(&[(1, &x), (-1, &z)], 0)),
        ];
        // x = y, y = z + 1 -> x = z + 1, so x < z fails
        assert!(!feasible(&atoms));
    }
}
