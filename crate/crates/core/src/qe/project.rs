//! Elimination of all quantifiers from a formula.
//!
//! Quantifiers are removed innermost first, a block of like quantifiers at a
//! time, with universal blocks handled as negated existential blocks. Atoms
//! conjoined around a quantifier are passed down as context: they prune the
//! cube search inside the block and let redundant atoms be dropped from its
//! result, which is then only equivalent under that context (the context is
//! still conjoined above, so the overall result is exact).

use super::cube::{self, Cube};
use super::dnf;
use crate::formula::{Atom, Formula, LinTerm, Rel, Sort, Var};

pub(crate) fn project(f: &Formula, sort: Sort) -> Formula {
    proj(&f.to_nnf(), &[], sort)
}

fn context_atoms(xs: &[Formula], out: &mut Vec<Atom>) {
    for x in xs {
        match x {
            Formula::Atom(a) => {
                if !out.contains(&**a) {
                    out.push((**a).clone());
                }
            }
            Formula::And(ys) => context_atoms(ys, out),
            _ => {}
        }
    }
}

fn proj(f: &Formula, ctx: &[Atom], sort: Sort) -> Formula {
    if f.is_quantifier_free() {
        return f.clone();
    }
    match f {
        Formula::And(xs) => {
            let mut inner = ctx.to_vec();
            context_atoms(xs, &mut inner);
            Formula::and(xs.iter().map(|x| proj(x, &inner, sort)).collect()).simplify()
        }
        Formula::Or(xs) => Formula::or(xs.iter().map(|x| proj(x, ctx, sort)).collect()).simplify(),
        Formula::Exists(..) | Formula::Forall(..) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut vars: Vec<Var> = Vec::new();
            let mut body = f;
            loop {
                match (body, universal) {
                    (Formula::Exists(v, b), false) | (Formula::Forall(v, b), true) => {
                        vars.push(v.clone());
                        body = b;
                    }
                    _ => break,
                }
            }
            let inner: Vec<Atom> = ctx
                .iter()
                .filter(|a| !vars.iter().any(|v| a.mentions(v)))
                .cloned()
                .collect();
            let body = proj(body, &inner, sort);
            if universal {
                let neg = Formula::not(body).to_nnf();
                let e = exists_block(&vars, &neg, &inner, sort);
                Formula::not(e).to_nnf().simplify()
            } else {
                exists_block(&vars, &body, &inner, sort)
            }
        }
        Formula::Not(g) => Formula::not(proj(g, ctx, sort)).to_nnf().simplify(),
        _ => f.clone(),
    }
}

/// A top-level equality solved for one of `vars`: the variable, its value and,
/// over the integers with a non-unit coefficient, the divisibility side
/// condition. Unit coefficients are preferred.
fn one_point(conj: &[Formula], vars: &[Var], sort: Sort) -> Option<(Var, LinTerm, Option<Formula>)> {
    let mut best: Option<(Var, LinTerm, Option<Formula>, bool)> = None;
    for c in conj {
        let (rel, term) = match c {
            Formula::Atom(a) => match &**a {
                Atom::Cmp { rel, term } => (*rel, term),
                _ => continue,
            },
            _ => continue,
        };
        if rel != Rel::Eq {
            continue;
        }
        for v in vars {
            let k = term.coeff(v);
            if k.is_zero() {
                continue;
            }
            let unit = k.abs().is_one();
            if best.as_ref().is_some_and(|b| b.3 || !unit) {
                continue;
            }
            let rest = term.without(v);
            let val = rest.scale(&(-k.recip()));
            let guard = (sort == Sort::Int && !unit)
                .then(|| Formula::from(Atom::divides(k.abs().numer(), rest, false)));
            best = Some((v.clone(), val, guard, unit));
        }
    }
    best.map(|(v, t, g, _)| (v, t, g))
}

fn has_block_equality(d: &Formula, vars: &[Var]) -> bool {
    d.conjuncts().iter().any(|c| match c {
        Formula::Atom(a) => {
            matches!(&**a, Atom::Cmp { rel: Rel::Eq, .. }) && vars.iter().any(|v| a.mentions(v))
        }
        _ => false,
    })
}

pub(crate) fn exists_block(vars: &[Var], g: &Formula, ctx: &[Atom], sort: Sort) -> Formula {
    let g = g.simplify();
    let vars: Vec<Var> = vars.iter().filter(|v| g.mentions(v)).cloned().collect();
    if vars.is_empty() {
        return g;
    }
    if let Formula::Or(xs) = &g {
        return Formula::or(xs.iter().map(|x| exists_block(&vars, x, ctx, sort)).collect()).simplify();
    }
    let conj = g.conjuncts();
    if let Some((v, val, guard)) = one_point(&conj, &vars, sort) {
        let mut g2 = g.subst_unchecked(&v, &val);
        if let Some(guard) = guard {
            g2 = Formula::and(vec![guard, g2]);
        }
        let rest: Vec<Var> = vars.iter().filter(|w| **w != v).cloned().collect();
        return exists_block(&rest, &g2, ctx, sort);
    }
    for (i, c) in conj.iter().enumerate() {
        if let Formula::Or(ds) = c {
            if ds.iter().all(|d| has_block_equality(d, &vars)) {
                let others: Vec<Formula> = conj
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, x)| x.clone())
                    .collect();
                let parts = ds
                    .iter()
                    .map(|d| {
                        let mut items = others.clone();
                        items.push(d.clone());
                        exists_block(&vars, &Formula::and(items), ctx, sort)
                    })
                    .collect();
                return Formula::or(parts).simplify();
            }
        }
    }
    let cubes = dnf::enumerate(ctx, &g, sort, false);
    let mut results: Vec<Cube> = Vec::new();
    for c in cubes {
        let mut full: Cube = ctx.to_vec();
        for a in c {
            if !full.contains(&a) {
                full.push(a);
            }
        }
        for p in project_cube(&full, &vars, sort) {
            let mut with_ctx: Cube = ctx.to_vec();
            with_ctx.extend(p.into_iter().filter(|a| !ctx.contains(a)));
            if let Some(r) = cube::remove_redundant(&with_ctx, ctx.len()) {
                let own: Cube = r.into_iter().filter(|a| !ctx.contains(a)).collect();
                if !results.contains(&own) {
                    results.push(own);
                }
            }
        }
    }
    cubes_to_formula(cube::prune_cubes(results))
}

pub(crate) fn cubes_to_formula(cubes: Vec<Cube>) -> Formula {
    Formula::or(
        cubes
            .into_iter()
            .map(|c| Formula::and(c.into_iter().map(Formula::from).collect()))
            .collect(),
    )
}

/// Eliminates `vars` from one cube; the disjunction of the results is
/// equivalent to the existential closure.
fn project_cube(cube: &[Atom], vars: &[Var], sort: Sort) -> Vec<Cube> {
    match sort {
        Sort::Real => cube::fm_project(cube, vars).into_iter().collect(),
        Sort::Int => {
            let mut cur: Vec<Cube> = vec![cube.to_vec()];
            for v in vars {
                let mut next: Vec<Cube> = Vec::new();
                for c in &cur {
                    for d in cube::cooper_cube(c, v) {
                        if let Some(d) = cube::remove_redundant(&d, 0) {
                            if !next.contains(&d) {
                                next.push(d);
                            }
                        }
                    }
                }
                cur = next;
            }
            cur.into_iter().filter(|c| cube::cube_sat(c, Sort::Int)).collect()
        }
    }
}
