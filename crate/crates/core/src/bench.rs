//! Benchmark games and the table harness.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{solve, Config, TraceRetention, Verdict};
use crate::error::{Error, Result};
use crate::formula::{lin, Formula, LinTerm, Var};
use crate::game::{GameSpec, Mode, Move, Objective};
use crate::rational::Rational;

fn buckets(n: usize) -> (Vec<Var>, Vec<Var>) {
    let now: Vec<Var> = (1..=n).map(|i| Var::real(&format!("b{}", i))).collect();
    let next = now.iter().map(|v| v.suffixed("'")).collect();
    (now, next)
}

fn sum(vs: &[Var]) -> LinTerm {
    vs.iter().fold(LinTerm::zero(), |t, v| t.add(&LinTerm::var(v)))
}

fn cinderella_with(n: usize, property: Formula) -> GameSpec {
    assert!(n >= 3, "cinderella needs at least three buckets");
    let (b, b1) = buckets(n);
    let mut env = vec![Formula::eq(
        &sum(&b1),
        &sum(&b).add_constant(&Rational::one()),
    )];
    for (x, x1) in b.iter().zip(&b1) {
        env.push(Formula::ge(&LinTerm::var(x1), &LinTerm::var(x)));
    }
    let zero = LinTerm::zero();
    let moves = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let relation = Formula::and(
                (0..n)
                    .map(|k| {
                        if k == i || k == j {
                            Formula::eq(&LinTerm::var(&b1[k]), &zero)
                        } else {
                            Formula::eq(&LinTerm::var(&b1[k]), &LinTerm::var(&b[k]))
                        }
                    })
                    .collect(),
            );
            Move { name: format!("empty_{}_{}", i + 1, j + 1), relation }
        })
        .collect();
    GameSpec {
        state_vars: b,
        env: Formula::and(env),
        moves,
        property,
        objective: Objective::Safety,
        mode: Mode::EA,
    }
}

/// `n` buckets in a ring, each of capacity `c`. The environment spreads one
/// unit of water over the buckets; the controller empties two neighbours.
pub fn cinderella(n: usize, c: &Rational) -> GameSpec {
    let (b, _) = buckets(n);
    let cap = LinTerm::constant(c.clone());
    let g = b
        .iter()
        .flat_map(|x| {
            [
                Formula::le(&LinTerm::zero(), &LinTerm::var(x)),
                Formula::le(&LinTerm::var(x), &cap),
            ]
        })
        .collect();
    cinderella_with(n, Formula::and(g))
}

/// The same game with the safe set weakened to "some bucket holds at most
/// `c`" and no lower bounds.
pub fn cinderella_disjunctive(n: usize, c: &Rational) -> GameSpec {
    let (b, _) = buckets(n);
    let cap = LinTerm::constant(c.clone());
    let g = b.iter().map(|x| Formula::le(&LinTerm::var(x), &cap)).collect();
    cinderella_with(n, Formula::or(g))
}

/// State variable names of random games.
const NAMES: [&str; 3] = ["x", "y", "z"];

fn box_of(vs: &[Var], bound: i64) -> Vec<Formula> {
    vs.iter()
        .flat_map(|v| {
            [
                Formula::le(&LinTerm::zero(), &LinTerm::var(v)),
                Formula::le(&LinTerm::var(v), &LinTerm::constant(Rational::from_int(bound))),
            ]
        })
        .collect()
}

fn random_atom(rng: &mut ChaCha8Rng, vs: &[Var], bound: i64) -> Formula {
    loop {
        let coeffs: Vec<i64> = vs.iter().map(|_| rng.gen_range(-2..=2)).collect();
        if coeffs.iter().all(|c| *c == 0) {
            continue;
        }
        let spread: i64 = coeffs.iter().map(|c| c.abs()).sum::<i64>() * bound;
        let k = rng.gen_range(-spread / 2..=spread);
        let pairs: Vec<(i64, &Var)> = coeffs.iter().copied().zip(vs.iter()).collect();
        return Formula::le(&lin(&pairs, 0), &LinTerm::constant(Rational::from_int(k)));
    }
}

/// The update of one variable: a shifted copy, a constant, or (with `nondet`)
/// any value in a shifted window.
fn random_update(rng: &mut ChaCha8Rng, v: &Var, v1: &Var, bound: i64, nondet: bool) -> Formula {
    let d = rng.gen_range(-2..=2);
    match rng.gen_range(0..6) {
        0 => Formula::eq(&LinTerm::var(v1), &LinTerm::constant(Rational::from_int(rng.gen_range(0..=bound)))),
        1 | 2 if nondet => {
            let w = rng.gen_range(1..=2);
            Formula::and(vec![
                Formula::ge(&LinTerm::var(v1), &lin(&[(1, v)], d - w)),
                Formula::le(&LinTerm::var(v1), &lin(&[(1, v)], d)),
            ])
        }
        _ => Formula::eq(&LinTerm::var(v1), &lin(&[(1, v)], d)),
    }
}

/// A seeded integer game on the box `[0, bound]^vars` whose moves and
/// environment answers never leave the box.
pub fn random_bounded_game(seed: u64, vars: usize, bound: i64, objective: Objective) -> GameSpec {
    assert!((1..=3).contains(&vars) && (1..=8).contains(&bound));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vs: Vec<Var> = NAMES[..vars].iter().map(|n| Var::int(n)).collect();
    let next: Vec<Var> = vs.iter().map(|v| v.suffixed("'")).collect();
    let moves = (0..rng.gen_range(1..=3))
        .map(|i| {
            let mut parts = Vec::new();
            if rng.gen_bool(0.6) {
                parts.push(random_atom(&mut rng, &vs, bound));
            }
            for (v, v1) in vs.iter().zip(&next) {
                parts.push(random_update(&mut rng, v, v1, bound, false));
            }
            parts.extend(box_of(&next, bound));
            Move { name: format!("m{}", i + 1), relation: Formula::and(parts) }
        })
        .collect();
    let mut env = Vec::new();
    for (v, v1) in vs.iter().zip(&next) {
        env.push(random_update(&mut rng, v, v1, bound, true));
    }
    if rng.gen_bool(0.3) {
        let both: Vec<Var> = vs.iter().chain(&next).cloned().collect();
        env.push(random_atom(&mut rng, &both, bound));
    }
    env.extend(box_of(&next, bound));
    let mut g = box_of(&vs, bound);
    g.push(if rng.gen_bool(0.3) {
        Formula::or(vec![random_atom(&mut rng, &vs, bound), random_atom(&mut rng, &vs, bound)])
    } else {
        random_atom(&mut rng, &vs, bound)
    });
    GameSpec {
        state_vars: vs,
        env: Formula::and(env),
        moves,
        property: Formula::and(g),
        objective,
        mode: Mode::EA,
    }
}

/// One row of a benchmark table.
#[derive(Clone, Debug)]
pub struct TableCase {
    pub label: String,
    pub spec: GameSpec,
    pub max_iters: usize,
    pub timeout: Option<Duration>,
}

impl TableCase {
    /// Cinderella with `n` buckets and capacity given as a literal such as
    /// `1.9rep(20)`.
    pub fn cinderella(n: usize, capacity: &str, max_iters: usize) -> Result<TableCase> {
        let c = Rational::parse_literal(capacity)
            .ok_or_else(|| Error::Parse(format!("bad capacity `{}`", capacity)))?;
        Ok(TableCase {
            label: capacity.to_string(),
            spec: cinderella(n, &c),
            max_iters,
            timeout: None,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub label: String,
    pub verdict: String,
    pub iterations: usize,
    pub time_ms: u128,
    pub timed_out: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,out,iterations,time_ms,timed_out\n");
        for r in &self.rows {
            let out_col = match (r.verdict.as_str(), &r.error) {
                (_, Some(_)) => "error",
                ("realizable", _) => "R",
                ("unrealizable", _) => "U",
                _ => "?",
            };
            out.push_str(&format!("{},{},{},{},{}\n", r.label, out_col, r.iterations, r.time_ms, r.timed_out));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Solves every case in order; a failing or timed-out case is recorded and
/// the suite continues.
pub fn run_table(cases: &[TableCase]) -> TableReport {
    let rows = cases
        .iter()
        .map(|case| {
            let config = Config {
                max_iters: case.max_iters,
                retention: TraceRetention::LastTwo,
                timeout: case.timeout,
                ..Config::default()
            };
            match solve(&case.spec, &config) {
                Ok(r) => TableRow {
                    label: case.label.clone(),
                    verdict: r.verdict.to_string(),
                    iterations: r.iterations,
                    time_ms: r.elapsed.as_millis(),
                    timed_out: r.verdict == Verdict::Unknown
                        && case.timeout.is_some_and(|t| r.elapsed >= t),
                    error: None,
                },
                Err(e) => TableRow {
                    label: case.label.clone(),
                    verdict: Verdict::Unknown.to_string(),
                    iterations: 0,
                    time_ms: 0,
                    timed_out: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    TableReport { rows }
}

/// The capacities of the Cinderella table with the published outcomes and
/// iteration counts.
pub const CINDERELLA_TABLE: [(&str, Verdict, usize); 8] = [
    ("3", Verdict::Realizable, 3),
    ("2.5", Verdict::Realizable, 3),
    ("2", Verdict::Realizable, 3),
    ("1.9rep(20)", Verdict::Unrealizable, 69),
    ("1.8", Verdict::Unrealizable, 5),
    ("1.6", Verdict::Unrealizable, 4),
    ("1.5", Verdict::Unrealizable, 4),
    ("1.4", Verdict::Unrealizable, 3),
];
