//! Enumeration of the satisfiable cubes of a quantifier-free formula.
//!
//! A DPLL-style search over the formula's clause structure: atoms are asserted
//! into an incremental simplex, clauses are filtered against the current
//! bounds, and the search branches on the remaining clause with the fewest
//! live disjuncts. Each leaf is a feasible conjunction of atoms that implies
//! the formula; together the leaves cover it.

use std::collections::HashSet;
use std::sync::Arc;

use super::cube::{self, Cube};
use super::lra::LpContext;
use crate::formula::{Atom, Formula, Sort};

pub(crate) struct Enumerator {
    lp: LpContext,
    cube: Vec<Atom>,
    in_cube: HashSet<Atom>,
    ctx_len: usize,
    sort: Sort,
    first_only: bool,
    out: Vec<Cube>,
}

/// Cubes of `f` (NNF, quantifier-free) that are consistent with `ctx`. The
/// returned cubes omit the context atoms; their disjunction is equivalent to
/// `f` under `ctx`. With `first_only`, stops after one cube.
pub(crate) fn enumerate(ctx: &[Atom], f: &Formula, sort: Sort, first_only: bool) -> Vec<Cube> {
    let mut e = Enumerator {
        lp: LpContext::new(),
        cube: Vec::new(),
        in_cube: HashSet::new(),
        ctx_len: 0,
        sort,
        first_only,
        out: Vec::new(),
    };
    for a in ctx {
        if e.in_cube.insert(a.clone()) {
            e.cube.push(a.clone());
            e.lp.assert(a);
        }
    }
    e.ctx_len = e.cube.len();
    if !e.lp.check() {
        return Vec::new();
    }
    e.search(vec![f.clone()], Vec::new());
    e.out
}

impl Enumerator {
    fn done(&self) -> bool {
        self.first_only && !self.out.is_empty()
    }

    /// The cube holds the single-atom negation of `a`.
    fn refutes(&self, a: &Atom) -> bool {
        matches!(a, Atom::Divides { .. } | Atom::NotDivides { .. })
            && a.negation().iter().any(|n| self.in_cube.contains(n))
    }

    fn add_atom(&mut self, a: &Atom) -> bool {
        if self.in_cube.contains(a) {
            return true;
        }
        if self.refutes(a) {
            return false;
        }
        self.in_cube.insert(a.clone());
        self.cube.push(a.clone());
        self.lp.assert(a)
    }

    fn search(&mut self, pending: Vec<Formula>, ors: Vec<Arc<[Formula]>>) {
        let mark = self.cube.len();
        self.lp.push();
        self.search_inner(pending, ors);
        self.lp.pop();
        for a in self.cube.drain(mark..) {
            self.in_cube.remove(&a);
        }
    }

    fn search_inner(&mut self, mut pending: Vec<Formula>, mut ors: Vec<Arc<[Formula]>>) {
        loop {
            while let Some(f) = pending.pop() {
                match f {
                    Formula::True => {}
                    Formula::False => return,
                    Formula::Atom(a) => {
                        if !self.add_atom(&a) {
                            return;
                        }
                    }
                    Formula::And(xs) => pending.extend(xs.iter().cloned()),
                    Formula::Or(xs) => ors.push(xs),
                    Formula::Not(g) => match &*g {
                        Formula::Atom(a) => pending.push(Formula::or(
                            a.negation().into_iter().map(Formula::from).collect(),
                        )),
                        other => pending.push(Formula::not(other.clone()).to_nnf()),
                    },
                    Formula::Exists(..) | Formula::Forall(..) => {
                        panic!("cube enumeration requires a quantifier-free formula")
                    }
                }
            }
            if !self.lp.check() {
                return;
            }
            // cheap filtering: syntactic membership and asserted bounds
            let mut kept: Vec<Arc<[Formula]>> = Vec::with_capacity(ors.len());
            for or in ors.drain(..) {
                match self.filter(&or) {
                    Filtered::Satisfied => {}
                    Filtered::Empty => return,
                    Filtered::Unit(f) => pending.push(f),
                    Filtered::Same => kept.push(or),
                    Filtered::Rest(rest) => kept.push(rest.into()),
                }
            }
            ors = kept;
            if pending.is_empty() {
                break;
            }
        }
        loop {
            if ors.is_empty() {
                self.emit();
                return;
            }
            let idx = self.pick(&ors);
            let or = ors.swap_remove(idx);
            // full check of the chosen clause against the simplex
            let mut live: Vec<Formula> = Vec::with_capacity(or.len());
            let mut satisfied = false;
            for d in or.iter() {
                if let Formula::Atom(a) = d {
                    if !self.lp.consistent_with(a) {
                        continue;
                    }
                    if self.lp.entails(a) {
                        satisfied = true;
                        break;
                    }
                }
                live.push(d.clone());
            }
            if satisfied {
                continue;
            }
            match live.len() {
                0 => return,
                1 => {
                    let d = live.pop().unwrap();
                    self.search(vec![d], ors);
                    return;
                }
                _ => {
                    for d in live {
                        if self.done() {
                            return;
                        }
                        self.search(vec![d], ors.clone());
                    }
                    return;
                }
            }
        }
    }

    fn filter(&self, or: &Arc<[Formula]>) -> Filtered {
        let mut rest: Vec<Formula> = Vec::new();
        let mut changed = false;
        for d in or.iter() {
            match d {
                Formula::True => return Filtered::Satisfied,
                Formula::False => changed = true,
                Formula::Atom(a) => {
                    if self.in_cube.contains(&**a) {
                        return Filtered::Satisfied;
                    }
                    if self.refutes(a) {
                        changed = true;
                        continue;
                    }
                    match self.lp.bound_status(a) {
                        Some(true) => return Filtered::Satisfied,
                        Some(false) => changed = true,
                        None => rest.push(d.clone()),
                    }
                }
                _ => rest.push(d.clone()),
            }
        }
        match rest.len() {
            0 => Filtered::Empty,
            1 => Filtered::Unit(rest.pop().unwrap()),
            _ if changed => Filtered::Rest(rest),
            _ => Filtered::Same,
        }
    }

    /// Branching heuristic: structured clauses (those with non-atomic
    /// disjuncts, such as a choice of moves) first, then the fewest disjuncts.
    fn pick(&self, ors: &[Arc<[Formula]>]) -> usize {
        let key = |or: &Arc<[Formula]>| {
            let structured = or.iter().any(|d| !matches!(d, Formula::Atom(_)));
            (!structured, or.len())
        };
        let mut best = 0;
        for i in 1..ors.len() {
            if key(&ors[i]) < key(&ors[best]) {
                best = i;
            }
        }
        best
    }

    fn emit(&mut self) {
        if self.sort == Sort::Int && !cube::cube_sat(&self.cube, Sort::Int) {
            return;
        }
        self.out.push(self.cube[self.ctx_len..].to_vec());
    }
}

enum Filtered {
    Satisfied,
    Empty,
    Unit(Formula),
    Same,
    Rest(Vec<Formula>),
}
