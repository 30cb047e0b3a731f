//! Explicit-state ground truth for bounded integer games, and concrete plays
//! of extracted strategies.
//!
//! A [`GridGame`] enumerates every state of a box and every edge of each
//! relation inside it by plain evaluation. Successors outside the box are
//! recorded as escapes: an escaping environment answer is losing for the
//! controller, an escaping controller move is never used.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Player, Strategy};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula, LinTerm, Sort, Var};
use crate::game::{GameSpec, Mode};
use crate::qe;
use crate::rational::Rational;

pub type State = Vec<i64>;

#[derive(Clone, Debug, Default)]
struct Edges {
    succ: Vec<usize>,
    escapes: bool,
}

#[derive(Clone, Debug)]
pub struct GridGame {
    pub vars: Vec<Var>,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub states: Vec<State>,
    index: HashMap<State, usize>,
    goal: Vec<bool>,
    env: Vec<Edges>,
    /// Edges of the disjunction of all moves.
    con: Vec<Edges>,
}

fn grid(lo: &[i64], hi: &[i64]) -> Vec<State> {
    let mut out = vec![Vec::new()];
    for (l, h) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|s| {
                (*l..=*h).map(move |v| {
                    let mut t = s.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

fn assign(vars: &[Var], s: &[i64], a: &mut Assignment) {
    for (v, x) in vars.iter().zip(s) {
        a.insert(v.clone(), Rational::from_int(*x));
    }
}

impl GridGame {
    /// The game restricted to the box `lo <= s <= hi` (per variable).
    pub fn new(spec: &GameSpec, lo: &[i64], hi: &[i64]) -> Result<GridGame> {
        if spec.sort() != Sort::Int {
            return Err(Error::Precondition("grid games need Int state variables".into()));
        }
        if lo.len() != spec.state_vars.len() || hi.len() != lo.len() {
            return Err(Error::Precondition("one bound per state variable".into()));
        }
        let vars = spec.state_vars.clone();
        let next = spec.next_vars(1);
        let states = grid(lo, hi);
        if states.is_empty() {
            return Err(Error::Precondition("empty grid".into()));
        }
        let index: HashMap<State, usize> =
            states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let goal = states
            .iter()
            .map(|s| {
                let mut a = Assignment::new();
                assign(&vars, s, &mut a);
                spec.property.evaluate(&a)
            })
            .collect::<Result<Vec<bool>>>()?;
        let outside = Formula::not(Formula::and(
            next.iter()
                .zip(lo.iter().zip(hi))
                .flat_map(|(v, (l, h))| {
                    [
                        Formula::ge(&LinTerm::var(v), &LinTerm::constant(Rational::from_int(*l))),
                        Formula::le(&LinTerm::var(v), &LinTerm::constant(Rational::from_int(*h))),
                    ]
                })
                .collect(),
        ));
        let edges = |rel: &Formula| -> Result<Vec<Edges>> {
            states
                .iter()
                .map(|s| {
                    let mut local = rel.clone();
                    for (v, x) in vars.iter().zip(s) {
                        local = local.subst_unchecked(v, &LinTerm::constant(Rational::from_int(*x)));
                    }
                    let local = local.simplify();
                    let mut succ = Vec::new();
                    if !local.is_false() {
                        let mut a = Assignment::new();
                        for (j, t) in states.iter().enumerate() {
                            assign(&next, t, &mut a);
                            if local.evaluate(&a)? {
                                succ.push(j);
                            }
                        }
                    }
                    let escapes = !local.is_false()
                        && qe::is_sat(&Formula::and(vec![local, outside.clone()]))?;
                    Ok(Edges { succ, escapes })
                })
                .collect()
        };
        let env = edges(&spec.env)?;
        let con = edges(&spec.con())?;
        Ok(GridGame { vars, lo: lo.to_vec(), hi: hi.to_vec(), states, index, goal, env, con })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &[i64]) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// The grid states satisfying `f`.
    pub fn restrict(&self, f: &Formula) -> Result<Vec<bool>> {
        let mut a = Assignment::new();
        self.states
            .iter()
            .map(|s| {
                assign(&self.vars, s, &mut a);
                f.evaluate(&a)
            })
            .collect()
    }

    pub fn goal(&self) -> &[bool] {
        &self.goal
    }

    /// The state as an assignment to the state variables.
    pub fn assignment(&self, i: usize) -> Assignment {
        let mut a = Assignment::new();
        assign(&self.vars, &self.states[i], &mut a);
        a
    }
}

/// Winning sets of an explicit safety game: the fixed point and every
/// intermediate `X_i` (the states that can be kept safe for `i` steps).
#[derive(Clone, Debug)]
pub struct SafetySets {
    pub fixpoint: Vec<bool>,
    pub steps: Vec<Vec<bool>>,
}

/// The safety fixed point by repeated controllable predecessors.
pub fn explicit_safety_gfp(g: &GridGame, mode: Mode) -> SafetySets {
    let n = g.len();
    let mut x = g.goal.clone();
    let mut steps = vec![x.clone()];
    loop {
        let next: Vec<bool> = (0..n)
            .map(|s| {
                g.goal[s]
                    && match mode {
                        Mode::EA => g.con[s].succ.iter().any(|&t| g.goal[t] && env_safe(g, t, &x)),
                        Mode::AE => {
                            !g.env[s].escapes
                                && g.env[s]
                                    .succ
                                    .iter()
                                    .all(|&t| g.goal[t] && g.con[t].succ.iter().any(|&u| x[u]))
                        }
                    }
            })
            .collect();
        if next == x {
            return SafetySets { fixpoint: x, steps };
        }
        x = next;
        steps.push(x.clone());
    }
}

fn env_safe(g: &GridGame, t: usize, x: &[bool]) -> bool {
    !g.env[t].escapes && g.env[t].succ.iter().all(|&u| x[u])
}

/// Attractor sets of an explicit reachability game, one per player to move,
/// each including the goal.
#[derive(Clone, Debug)]
pub struct ReachSets {
    pub environment: Vec<bool>,
    pub controller: Vec<bool>,
}

impl ReachSets {
    pub fn for_player(&self, p: Player) -> &[bool] {
        match p {
            Player::Controller => &self.controller,
            Player::Environment => &self.environment,
        }
    }
}

/// The states from which the controller forces a visit to the goal, with
/// the two players alternating.
pub fn explicit_reach_lfp(g: &GridGame) -> ReachSets {
    let n = g.len();
    let mut xe = vec![false; n];
    let mut xc = vec![false; n];
    loop {
        let ne: Vec<bool> = (0..n)
            .map(|s| !g.env[s].escapes && g.env[s].succ.iter().all(|&t| g.goal[t] || xc[t]))
            .collect();
        let nc: Vec<bool> = (0..n)
            .map(|s| g.con[s].succ.iter().any(|&t| g.goal[t] || xe[t]))
            .collect();
        if ne == xe && nc == xc {
            break;
        }
        xe = ne;
        xc = nc;
    }
    let join = |x: &[bool]| x.iter().zip(&g.goal).map(|(a, b)| *a || *b).collect();
    ReachSets { environment: join(&xe), controller: join(&xc) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mover {
    Controller,
    Environment,
}

impl fmt::Display for Mover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mover::Controller => "controller",
            Mover::Environment => "environment",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PlayStep {
    pub step: usize,
    pub mover: Mover,
    /// The move taken, or `env`.
    pub move_name: String,
    pub state: Assignment,
}

impl fmt::Display for PlayStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.state.iter().map(|(v, x)| format!("{}={}", v, x)).collect();
        write!(f, "{}\t{}\t{}\t{}", self.step, self.mover, self.move_name, vals.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlayEnd {
    Completed,
    /// The environment had no answer; the play ends safely.
    EnvStuck,
    /// The state after step `.0` violates the property.
    Violation(usize),
}

#[derive(Clone, Debug)]
pub struct Play {
    pub steps: Vec<PlayStep>,
    pub end: PlayEnd,
}

fn ground(spec: &GameSpec, f: &Formula, s: &Assignment) -> Formula {
    let mut out = f.clone();
    for v in &spec.state_vars {
        out = out.subst_unchecked(v, &LinTerm::constant(s[v].clone()));
    }
    out.simplify()
}

fn unprime(spec: &GameSpec, w: &Assignment) -> Assignment {
    spec.state_vars
        .iter()
        .zip(spec.next_vars(1))
        .map(|(v, v1)| (v.clone(), w.get(&v1).cloned().unwrap_or_else(Rational::zero)))
        .collect()
}

/// An environment answer pushed in a random direction.
fn env_answer(spec: &GameSpec, s: &Assignment, rng: &mut ChaCha8Rng) -> Result<Option<Assignment>> {
    let local = ground(spec, &spec.env, s);
    if !qe::is_sat(&local)? {
        return Ok(None);
    }
    let next = spec.next_vars(1);
    let dir: Vec<i64> = next.iter().map(|_| rng.gen_range(-3..=3)).collect();
    let now = dir
        .iter()
        .zip(&spec.state_vars)
        .fold(Rational::zero(), |acc, (k, v)| &acc + &(&Rational::from_int(*k) * &s[v]));
    let cut_term = LinTerm::from_pairs(
        next.iter().cloned().zip(dir.iter().map(|k| Rational::from_int(*k))),
        Rational::zero(),
    );
    let mut reach = Rational::from_int(rng.gen_range(1..=8));
    for _ in 0..6 {
        let bound = &now + &(&reach / &Rational::from_int(4));
        let cut = Formula::ge(&cut_term, &LinTerm::constant(bound));
        let f = Formula::and(vec![local.clone(), cut]);
        if let Ok(w) = qe::find_witness(&f) {
            return Ok(Some(unprime(spec, &w)));
        }
        reach = &reach / &Rational::from_int(2);
    }
    Ok(Some(unprime(spec, &qe::find_witness(&local)?)))
}

/// Plays `strategy` against a randomized adversarial environment for `steps`
/// rounds from `init`, checking the property after every half-move.
pub fn simulate_play(
    spec: &GameSpec,
    strategy: &Strategy,
    init: &Assignment,
    steps: usize,
    seed: u64,
) -> Result<Play> {
    if spec.mode != Mode::EA {
        return Err(Error::Precondition("simulation needs an EA game".into()));
    }
    for v in &spec.state_vars {
        match init.get(v) {
            None => return Err(Error::UnassignedVariable(v.to_string())),
            Some(x) if spec.sort() == Sort::Int && !x.is_integer() => {
                return Err(Error::Precondition(format!("`{}` needs an integer value", v)))
            }
            _ => {}
        }
    }
    let mut s: Assignment = spec.state_vars.iter().map(|v| (v.clone(), init[v].clone())).collect();
    let region = Formula::or(strategy.active().map(|e| e.condition.clone()).collect());
    if !region.evaluate(&s)? {
        return Err(Error::Precondition("initial state is outside the winning region".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut step = 0;
    for _ in 0..steps {
        let entry = strategy
            .active()
            .find(|e| e.condition.evaluate(&s).unwrap_or(false))
            .ok_or_else(|| Error::NoMatchingCondition(render(&s)))?;
        let m = spec
            .find_move(&entry.move_name)
            .ok_or_else(|| Error::InvalidGame(format!("unknown move `{}`", entry.move_name)))?;
        let w = qe::find_witness(&ground(spec, &m.relation, &s))
            .map_err(|_| Error::Precondition(format!("move `{}` is not enabled", m.name)))?;
        s = unprime(spec, &w);
        step += 1;
        out.push(PlayStep { step, mover: Mover::Controller, move_name: m.name.clone(), state: s.clone() });
        if !spec.property.evaluate(&s)? {
            return Ok(Play { steps: out, end: PlayEnd::Violation(step) });
        }
        match env_answer(spec, &s, &mut rng)? {
            None => return Ok(Play { steps: out, end: PlayEnd::EnvStuck }),
            Some(t) => s = t,
        }
        step += 1;
        out.push(PlayStep { step, mover: Mover::Environment, move_name: "env".into(), state: s.clone() });
        if !spec.property.evaluate(&s)? {
            return Ok(Play { steps: out, end: PlayEnd::Violation(step) });
        }
    }
    Ok(Play { steps: out, end: PlayEnd::Completed })
}

fn render(s: &Assignment) -> String {
    let vals: Vec<String> = s.iter().map(|(v, x)| format!("{}={}", v, x)).collect();
    vals.join(",")
}
