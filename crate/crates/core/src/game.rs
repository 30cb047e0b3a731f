//! Game specifications and the one-step weakest-precondition formulas.
//!
//! Environment and move relations are written over the state variables `s`
//! and their primed copies `s'`. Inside a step the environment's relation is
//! shifted to `(s', s'')` so that one formula covers a controller move
//! followed by an environment move (or the other way round in `AE` mode).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Sort, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    Safety,
    Reachability,
}

/// Which player moves first within a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Controller, then environment.
    EA,
    /// Environment, then controller.
    AE,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Safety => "safety",
            Objective::Reachability => "reach",
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::EA => "EA",
            Mode::AE => "AE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub name: String,
    pub relation: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSpec {
    pub state_vars: Vec<Var>,
    pub env: Formula,
    pub moves: Vec<Move>,
    pub property: Formula,
    pub objective: Objective,
    pub mode: Mode,
}

/// A set of states: a quantifier-free formula over the state variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region(Formula);

impl Region {
    pub fn new(spec: &GameSpec, f: Formula) -> Result<Region> {
        if !f.is_quantifier_free() {
            return Err(Error::NotQuantifierFree);
        }
        if let Some(v) = f.free_vars().iter().find(|v| !spec.state_vars.contains(v)) {
            return Err(Error::InvalidGame(format!("region mentions non-state variable `{}`", v)));
        }
        Ok(Region(f))
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn primed(v: &Var, level: usize) -> Var {
    v.suffixed(&"'".repeat(level))
}

impl GameSpec {
    /// Builds a spec and checks its well-formedness.
    pub fn new(
        state_vars: Vec<Var>,
        env: Formula,
        moves: Vec<Move>,
        property: Formula,
        objective: Objective,
        mode: Mode,
    ) -> Result<GameSpec> {
        let spec = GameSpec { state_vars, env, moves, property, objective, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_vars.is_empty() {
            return Err(Error::InvalidGame("no state variables".into()));
        }
        if self.moves.is_empty() {
            return Err(Error::InvalidGame("no controller moves".into()));
        }
        let sort = self.sort();
        if self.state_vars.iter().any(|v| v.sort() != sort) {
            return Err(Error::SortMismatch("state variables of different sorts".into()));
        }
        for (i, v) in self.state_vars.iter().enumerate() {
            if self.state_vars[..i].contains(v) {
                return Err(Error::InvalidGame(format!("duplicate state variable `{}`", v)));
            }
            if v.name().ends_with('\'') {
                return Err(Error::InvalidGame(format!("state variable `{}` ends in a prime", v)));
            }
        }
        let now: Vec<Var> = self.state_vars.clone();
        let step: Vec<Var> = now.iter().cloned().chain(self.next_vars(1)).collect();
        let check = |what: &str, f: &Formula, allowed: &[Var]| -> Result<()> {
            if !f.is_quantifier_free() {
                return Err(Error::InvalidGame(format!("{} is not quantifier-free", what)));
            }
            for v in f.free_vars() {
                if !allowed.contains(&v) {
                    return Err(if allowed.iter().any(|a| a.name() == v.name()) {
                        Error::SortMismatch(format!("`{}` in {}", v.name(), what))
                    } else {
                        Error::InvalidGame(format!("{} mentions unknown variable `{}`", what, v))
                    });
                }
            }
            Ok(())
        };
        check("env", &self.env, &step)?;
        for m in &self.moves {
            check(&format!("move `{}`", m.name), &m.relation, &step)?;
            if self.moves.iter().filter(|o| o.name == m.name).count() > 1 {
                return Err(Error::InvalidGame(format!("duplicate move name `{}`", m.name)));
            }
        }
        check("property", &self.property, &now)
    }

    pub fn sort(&self) -> Sort {
        self.state_vars.first().map_or(Sort::Real, |v| v.sort())
    }

    /// The state variables primed `level` times.
    pub fn next_vars(&self, level: usize) -> Vec<Var> {
        self.state_vars.iter().map(|v| primed(v, level)).collect()
    }

    /// Replaces every state variable of `f` by its copy primed `level` times.
    pub fn rename_primed(&self, f: &Formula, level: usize) -> Formula {
        let map: BTreeMap<Var, Var> =
            self.state_vars.iter().map(|v| (v.clone(), primed(v, level))).collect();
        f.rename(&map)
    }

    /// A relation over `(s, s')` moved to `(s', s'')`.
    pub(crate) fn shift(&self, rel: &Formula) -> Formula {
        let map: BTreeMap<Var, Var> = self
            .state_vars
            .iter()
            .flat_map(|v| [(v.clone(), primed(v, 1)), (primed(v, 1), primed(v, 2))])
            .collect();
        rel.rename(&map)
    }

    /// `Con(s, s')`, the disjunction of all moves.
    pub fn con(&self) -> Formula {
        Formula::or(self.moves.iter().map(|m| m.relation.clone()).collect())
    }

    fn move_index(&self, name: &str) -> Option<usize> {
        self.moves.iter().position(|m| m.name == name)
    }

    pub fn find_move(&self, name: &str) -> Option<&Move> {
        self.move_index(name).map(|i| &self.moves[i])
    }

    /// `exists s'. con(s, s') and G(s') and forall s''. Env(s', s'') => X(s'')`
    fn wp_ea_with(&self, con: Formula, x: &Formula) -> Formula {
        let inner = Formula::forall_many(
            &self.next_vars(2),
            Formula::implies(self.shift(&self.env), self.rename_primed(x, 2)),
        );
        Formula::exists_many(
            &self.next_vars(1),
            Formula::and(vec![con, self.rename_primed(&self.property, 1), inner]),
        )
    }

    pub fn wp_safety_ea(&self, x: &Formula) -> Formula {
        self.wp_ea_with(self.con(), x)
    }

    /// The one-move restriction of [`GameSpec::wp_safety_ea`].
    pub fn wp_move(&self, index: usize, x: &Formula) -> Formula {
        self.wp_ea_with(self.moves[index].relation.clone(), x)
    }

    /// `forall s'. Env(s, s') => (G(s') and exists s''. Con(s', s'') and X(s''))`
    pub fn wp_safety_ae(&self, x: &Formula) -> Formula {
        let inner = Formula::exists_many(
            &self.next_vars(2),
            Formula::and(vec![self.shift(&self.con()), self.rename_primed(x, 2)]),
        );
        Formula::forall_many(
            &self.next_vars(1),
            Formula::implies(
                self.env.clone(),
                Formula::and(vec![self.rename_primed(&self.property, 1), inner]),
            ),
        )
    }

    /// The safety WP for the spec's mode.
    pub fn wp_safety(&self, x: &Formula) -> Formula {
        match self.mode {
            Mode::EA => self.wp_safety_ea(x),
            Mode::AE => self.wp_safety_ae(x),
        }
    }

    /// `exists s'. Con(s, s') and (G(s') or X(s'))`
    pub fn wp_reach_c(&self, x: &Formula) -> Formula {
        Formula::exists_many(
            &self.next_vars(1),
            Formula::and(vec![
                self.con(),
                Formula::or(vec![
                    self.rename_primed(&self.property, 1),
                    self.rename_primed(x, 1),
                ]),
            ]),
        )
    }

    /// `forall s'. Env(s, s') => (G(s') or X(s'))`
    pub fn wp_reach_e(&self, x: &Formula) -> Formula {
        Formula::forall_many(
            &self.next_vars(1),
            Formula::implies(
                self.env.clone(),
                Formula::or(vec![
                    self.rename_primed(&self.property, 1),
                    self.rename_primed(x, 1),
                ]),
            ),
        )
    }

    /// The game with the players' roles exchanged: the environment's relation
    /// becomes the single controller move `env` and the controller's moves
    /// become the environment.
    pub fn swap_players(&self, property: Formula, objective: Objective) -> GameSpec {
        GameSpec {
            state_vars: self.state_vars.clone(),
            env: self.con(),
            moves: vec![Move { name: "env".into(), relation: self.env.clone() }],
            property,
            objective,
            mode: self.mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{lin, LinTerm};
    use crate::qe;

    pub(crate) fn reset_increment() -> GameSpec {
        let x = Var::int("x");
        let x1 = Var::int("x'");
        GameSpec::new(
            vec![x.clone()],
            Formula::eq(&LinTerm::var(&x1), &lin(&[(1, &x)], 1)),
            vec![Move { name: "reset".into(), relation: Formula::eq(&LinTerm::var(&x1), &lin(&[], 0)) }],
            Formula::and(vec![
                Formula::le(&lin(&[], 0), &LinTerm::var(&x)),
                Formula::le(&LinTerm::var(&x), &lin(&[], 2)),
            ]),
            Objective::Safety,
            Mode::EA,
        )
        .unwrap()
    }

    #[test]
    fn renaming() {
        let spec = reset_increment();
        let x = Var::int("x");
        let f = Formula::le(&LinTerm::var(&x), &lin(&[], 2));
        assert_eq!(spec.rename_primed(&f, 1).to_sexpr(), "(<= (+ x' (- 2)) 0)");
        assert_eq!(spec.rename_primed(&Formula::True, 2), Formula::True);
        let shifted = spec.shift(&spec.env);
        let expect = Formula::eq(&LinTerm::var(&Var::int("x''")), &lin(&[(1, &Var::int("x'"))], 1));
        assert_eq!(shifted, expect);
    }

    #[test]
    fn reset_increment_wp() {
        let spec = reset_increment();
        let w = qe::project(&spec.wp_safety_ea(&spec.property)).unwrap();
        assert_eq!(w, Formula::True);
        let w = qe::project(&spec.wp_safety_ea(&Formula::False)).unwrap();
        assert_eq!(w, Formula::False);
    }

    #[test]
    fn validation_errors() {
        let mut spec = reset_increment();
        spec.property = Formula::le(&LinTerm::var(&Var::int("x'")), &lin(&[], 2));
        assert!(spec.validate().is_err());
        let mut spec = reset_increment();
        spec.moves.clear();
        assert!(spec.validate().is_err());
        let mut spec = reset_increment();
        spec.env = Formula::le(&LinTerm::var(&Var::real("x'")), &lin(&[], 2));
        assert!(matches!(spec.validate(), Err(Error::SortMismatch(_))));
    }
}
