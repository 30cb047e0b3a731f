//! Quantifier elimination and decision procedures for linear rational and
//! linear integer arithmetic.
//!
//! Single-variable elimination is available directly (virtual substitution
//! over the rationals, Cooper's method over the integers). Whole-formula
//! projection works on cubes: the body of each quantifier block is split into
//! satisfiable conjunctions by a simplex-guided search, each conjunction is
//! projected (Fourier-Motzkin or Cooper), and redundant atoms and subsumed
//! cubes are removed.

mod cooper;
mod cube;
mod dnf;
pub mod lra;
mod project;
mod vs;
mod witness;

use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula, Sort, Var};

/// The common sort of all variables in `f`; `Real` when there are none.
pub fn sort_of(f: &Formula) -> Result<Sort> {
    let mut sort = None;
    for v in f.free_vars().iter().chain(f.bound_vars().iter()) {
        match sort {
            None => sort = Some(v.sort()),
            Some(s) if s != v.sort() => {
                return Err(Error::SortMismatch(
                    "formula mixes Int and Real variables".to_string(),
                ))
            }
            _ => {}
        }
    }
    Ok(sort.unwrap_or(Sort::Real))
}

fn check_elim(x: &Var, f: &Formula, want: Sort) -> Result<Formula> {
    if x.sort() != want {
        return Err(Error::SortMismatch(format!(
            "variable `{}` is {}, expected {}",
            x,
            x.sort(),
            want
        )));
    }
    if !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    let s = sort_of(f)?;
    if f.free_vars().iter().next().is_some() && s != want {
        return Err(Error::SortMismatch(format!("formula is over {}", s)));
    }
    Ok(f.to_nnf())
}

/// `exists x. f` over the rationals by virtual substitution.
pub fn elim_exists_real(x: &Var, f: &Formula) -> Result<Formula> {
    let f = check_elim(x, f, Sort::Real)?;
    Ok(vs::eliminate(x, &f))
}

/// `exists x. f` over the integers by Cooper's method.
pub fn elim_exists_int(x: &Var, f: &Formula) -> Result<Formula> {
    let f = check_elim(x, f, Sort::Int)?;
    Ok(cooper::eliminate(x, &f))
}

/// An equivalent quantifier-free formula.
pub fn project(f: &Formula) -> Result<Formula> {
    let sort = sort_of(f)?;
    if f.is_quantifier_free() {
        return Ok(f.simplify());
    }
    Ok(project::project(f, sort))
}

/// Satisfiability in the formula's sort. Quantified input is projected first.
pub fn is_sat(f: &Formula) -> Result<bool> {
    let sort = sort_of(f)?;
    let g = if f.is_quantifier_free() {
        f.to_nnf().simplify()
    } else {
        project::project(f, sort).simplify()
    };
    Ok(!dnf::enumerate(&[], &g, sort, true).is_empty())
}

/// Validity of `f => g`.
pub fn implies(f: &Formula, g: &Formula) -> Result<bool> {
    Ok(!is_sat(&Formula::and(vec![f.clone(), Formula::not(g.clone())]))?)
}

/// Validity of `f <=> g`.
pub fn equivalent(f: &Formula, g: &Formula) -> Result<bool> {
    Ok(implies(f, g)? && implies(g, f)?)
}

/// A satisfying assignment of the free variables (integers for `Int`).
pub fn find_witness(f: &Formula) -> Result<Assignment> {
    let sort = sort_of(f)?;
    let g = if f.is_quantifier_free() {
        f.to_nnf().simplify()
    } else {
        project::project(f, sort).simplify()
    };
    let a = witness::find(&g, sort).ok_or(Error::UnsatInput)?;
    debug_assert!(g.evaluate(&a).unwrap_or(false));
    Ok(a)
}

/// Drops every top-level disjunct implied by another kept disjunct; among
/// equivalent disjuncts the last one is kept.
pub fn prune_disjuncts(f: &Formula) -> Result<Formula> {
    let ds = f.disjuncts();
    let mut alive = vec![true; ds.len()];
    for i in 0..ds.len() {
        for j in 0..ds.len() {
            if i != j && alive[j] && implies(&ds[i], &ds[j])? {
                alive[i] = false;
                break;
            }
        }
    }
    Ok(Formula::or(
        ds.into_iter()
            .zip(alive)
            .filter(|(_, k)| *k)
            .map(|(d, _)| d)
            .collect(),
    ))
}

/// Disjunctive normal form without quantifiers: each disjunct is a
/// satisfiable conjunction of atoms with no atom implied by the others, and
/// no disjunct is contained in another.
pub fn to_dnf(f: &Formula) -> Result<Formula> {
    let sort = sort_of(f)?;
    let g = if f.is_quantifier_free() {
        f.to_nnf().simplify()
    } else {
        project::project(f, sort).simplify()
    };
    let cubes = dnf::enumerate(&[], &g, sort, false)
        .into_iter()
        .filter_map(|c| cube::remove_redundant(&c, 0))
        .collect();
    Ok(project::cubes_to_formula(cube::prune_cubes(cubes)))
}

#[cfg(test)]
mod tests;
