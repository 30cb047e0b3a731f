//! Fixed-point solving, strategy extraction and strategy checking.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::game::{GameSpec, Mode, Objective};
use crate::qe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Realizable,
    Unrealizable,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Realizable => 0,
            Verdict::Unrealizable => 1,
            Verdict::Unknown => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Realizable => "realizable",
            Verdict::Unrealizable => "unrealizable",
            Verdict::Unknown => "unknown",
        })
    }
}

/// The player that moves first in a reachability game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Player {
    #[default]
    Controller,
    Environment,
}

/// How much of the iteration sequence a solve keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TraceRetention {
    #[default]
    All,
    LastTwo,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub max_iters: usize,
    pub retention: TraceRetention,
    pub start: Player,
    pub timeout: Option<Duration>,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_iters: 100, retention: TraceRetention::All, start: Player::Controller, timeout: None }
    }
}

impl Config {
    pub fn with_max_iters(max_iters: usize) -> Self {
        Config { max_iters, ..Config::default() }
    }
}

/// Both reachability regions, each already joined with the goal.
#[derive(Clone, Debug)]
pub struct ReachRegions {
    pub environment: Formula,
    pub controller: Formula,
    pub environment_trace: Vec<Formula>,
    pub controller_trace: Vec<Formula>,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub verdict: Verdict,
    /// The winning region; for reachability the region of the starting player.
    pub region: Formula,
    pub reach: Option<ReachRegions>,
    pub iterations: usize,
    /// `X0, X1, ...` of a safety solve (possibly truncated, see [`TraceRetention`]).
    pub trace: Vec<Formula>,
    /// Index in the full sequence of `trace[0]`.
    pub trace_offset: usize,
    pub elapsed: Duration,
}

fn push_capped(trace: &mut Vec<Formula>, offset: &mut usize, f: Formula, retention: TraceRetention) {
    trace.push(f);
    if retention == TraceRetention::LastTwo && trace.len() > 2 {
        trace.remove(0);
        *offset += 1;
    }
}

/// Puts a region into a canonical shape: a DNF with redundant atoms and
/// subsumed disjuncts removed.
pub fn canonical(f: &Formula) -> Result<Formula> {
    qe::to_dnf(f)
}

/// The greatest fixed point `X = WP(X) and G` from `X0 = G`.
pub fn solve_safety(spec: &GameSpec, config: &Config) -> Result<SynthesisResult> {
    if spec.objective != Objective::Safety {
        return Err(Error::Precondition("solve_safety needs a safety objective".into()));
    }
    spec.validate()?;
    let start = Instant::now();
    let g = canonical(&spec.property)?;
    let mut x = g.clone();
    let mut trace = Vec::new();
    let mut offset = 0;
    push_capped(&mut trace, &mut offset, x.clone(), config.retention);
    let mut iterations = 0;
    let mut done = false;
    while iterations < config.max_iters {
        if config.timeout.is_some_and(|t| start.elapsed() > t) {
            break;
        }
        let wp = qe::project(&spec.wp_safety(&x))?;
        let w = canonical(&Formula::and(vec![wp, g.clone()]))?;
        iterations += 1;
        debug_assert!(qe::implies(&w, &x)?);
        if qe::implies(&x, &w)? {
            done = true;
            break;
        }
        x = w;
        push_capped(&mut trace, &mut offset, x.clone(), config.retention);
    }
    let verdict = if !done {
        Verdict::Unknown
    } else if qe::is_sat(&x)? {
        Verdict::Realizable
    } else {
        Verdict::Unrealizable
    };
    Ok(SynthesisResult {
        verdict,
        region: x,
        reach: None,
        iterations,
        trace,
        trace_offset: offset,
        elapsed: start.elapsed(),
    })
}

/// The pair of least fixed points for a reachability objective, one region
/// per player to move.
pub fn solve_reachability(spec: &GameSpec, config: &Config) -> Result<SynthesisResult> {
    if spec.objective != Objective::Reachability {
        return Err(Error::Precondition("solve_reachability needs a reachability objective".into()));
    }
    spec.validate()?;
    let start = Instant::now();
    let g = canonical(&spec.property)?;
    let mut xe = Formula::False;
    let mut xc = Formula::False;
    let mut te = Vec::new();
    let mut tc = Vec::new();
    let (mut oe, mut oc) = (0, 0);
    push_capped(&mut te, &mut oe, g.clone(), config.retention);
    push_capped(&mut tc, &mut oc, g.clone(), config.retention);
    let mut iterations = 0;
    let mut done = false;
    while iterations < config.max_iters {
        if config.timeout.is_some_and(|t| start.elapsed() > t) {
            break;
        }
        let we = canonical(&qe::project(&spec.wp_reach_e(&xc))?)?;
        let wc = canonical(&qe::project(&spec.wp_reach_c(&xe))?)?;
        iterations += 1;
        let old_e = Formula::or(vec![xe.clone(), g.clone()]);
        let old_c = Formula::or(vec![xc.clone(), g.clone()]);
        let new_e = Formula::or(vec![we.clone(), g.clone()]);
        let new_c = Formula::or(vec![wc.clone(), g.clone()]);
        if qe::implies(&new_e, &old_e)? && qe::implies(&new_c, &old_c)? {
            done = true;
            break;
        }
        xe = we;
        xc = wc;
        push_capped(&mut te, &mut oe, canonical(&new_e)?, config.retention);
        push_capped(&mut tc, &mut oc, canonical(&new_c)?, config.retention);
    }
    let environment = canonical(&Formula::or(vec![xe, g.clone()]))?;
    let controller = canonical(&Formula::or(vec![xc, g]))?;
    let region = match config.start {
        Player::Controller => controller.clone(),
        Player::Environment => environment.clone(),
    };
    let verdict = if !done {
        Verdict::Unknown
    } else if qe::is_sat(&region)? {
        Verdict::Realizable
    } else {
        Verdict::Unrealizable
    };
    let trace = match config.start {
        Player::Controller => tc.clone(),
        Player::Environment => te.clone(),
    };
    let trace_offset = match config.start {
        Player::Controller => oc,
        Player::Environment => oe,
    };
    Ok(SynthesisResult {
        verdict,
        region,
        reach: Some(ReachRegions {
            environment,
            controller,
            environment_trace: te,
            controller_trace: tc,
        }),
        iterations,
        trace,
        trace_offset,
        elapsed: start.elapsed(),
    })
}

/// Dispatches on the spec's objective.
pub fn solve(spec: &GameSpec, config: &Config) -> Result<SynthesisResult> {
    match spec.objective {
        Objective::Safety => solve_safety(spec, config),
        Objective::Reachability => solve_reachability(spec, config),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyEntry {
    pub condition: Formula,
    #[serde(rename = "move")]
    pub move_name: String,
    /// The condition is unsatisfiable: the move is never taken.
    pub inert: bool,
}

/// A maximally permissive strategy: in a state satisfying `condition` the
/// move may be taken.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Strategy {
    pub entries: Vec<StrategyEntry>,
}

impl Strategy {
    /// Entries with a satisfiable condition.
    pub fn active(&self) -> impl Iterator<Item = &StrategyEntry> {
        self.entries.iter().filter(|e| !e.inert)
    }
}

/// One condition per move: the states of `x` from which that move keeps the
/// play in the winning region whatever the environment answers.
pub fn extract_strategy(spec: &GameSpec, x: &Formula) -> Result<Strategy> {
    if spec.objective != Objective::Safety || spec.mode != Mode::EA {
        return Err(Error::Precondition("strategy extraction needs an EA safety game".into()));
    }
    let g = canonical(&spec.property)?;
    let mut entries = Vec::new();
    for (i, m) in spec.moves.iter().enumerate() {
        let wp = qe::project(&spec.wp_move(i, x))?;
        let condition = canonical(&Formula::and(vec![wp, g.clone()]))?;
        let inert = !qe::is_sat(&condition)?;
        entries.push(StrategyEntry { condition, move_name: m.name.clone(), inert });
    }
    Ok(Strategy { entries })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub failures: Vec<String>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Validity checks for a strategy: the conditions cover `x`, each lies inside
/// `x`, and each move taken under its condition lands in a safe state from
/// which every environment answer stays in `x`.
pub fn check_strategy_closure(spec: &GameSpec, x: &Formula, strategy: &Strategy) -> Result<ClosureReport> {
    if spec.objective != Objective::Safety || spec.mode != Mode::EA {
        return Err(Error::Precondition("closure checking needs an EA safety game".into()));
    }
    let mut failures = Vec::new();
    let all = Formula::or(strategy.entries.iter().map(|e| e.condition.clone()).collect());
    if !qe::implies(x, &all)? {
        failures.push("coverage: some region state has no enabled move".to_string());
    }
    for e in &strategy.entries {
        let Some(m) = spec.find_move(&e.move_name) else {
            failures.push(format!("unknown move `{}`", e.move_name));
            continue;
        };
        if !qe::implies(&e.condition, x)? {
            failures.push(format!("containment: condition of `{}` leaves the region", e.move_name));
        }
        let pre = Formula::and(vec![e.condition.clone(), m.relation.clone()]);
        let post = Formula::and(vec![
            spec.rename_primed(&spec.property, 1),
            Formula::forall_many(
                &spec.next_vars(2),
                Formula::implies(spec.shift(&spec.env), spec.rename_primed(x, 2)),
            ),
        ]);
        if !qe::implies(&pre, &post)? {
            failures.push(format!("closure: move `{}` can leave the region", e.move_name));
        }
    }
    Ok(ClosureReport { failures })
}
