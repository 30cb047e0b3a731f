mod common;

use common::{countdown, reset_increment};
use gensys_core::bench::{cinderella, random_bounded_game};
use gensys_core::engine::{extract_strategy, solve_reachability, solve_safety, Config, Player};
use gensys_core::game::{Mode, Move, Objective};
use gensys_core::oracle::{explicit_reach_lfp, explicit_safety_gfp, simulate_play, GridGame, PlayEnd};
use gensys_core::{Assignment, Error, Formula, Rational, Var};
use proptest::prelude::*;

fn count(xs: &[bool]) -> usize {
    xs.iter().filter(|b| **b).count()
}

#[test]
fn safety_oracle_examples() {
    let spec = reset_increment();
    let g = GridGame::new(&spec, &[0], &[2]).unwrap();
    assert_eq!(explicit_safety_gfp(&g, Mode::EA).fixpoint, vec![true, true, true]);

    let mut stuck = reset_increment();
    stuck.moves = vec![Move { name: "none".into(), relation: Formula::False }];
    let g = GridGame::new(&stuck, &[0], &[2]).unwrap();
    assert_eq!(count(&explicit_safety_gfp(&g, Mode::EA).fixpoint), 0);

    let mut empty = reset_increment();
    empty.property = Formula::False;
    let g = GridGame::new(&empty, &[0], &[2]).unwrap();
    assert_eq!(count(&explicit_safety_gfp(&g, Mode::EA).fixpoint), 0);
}

#[test]
fn reach_oracle_examples() {
    let spec = countdown();
    let g = GridGame::new(&spec, &[0], &[20]).unwrap();
    let r = explicit_reach_lfp(&g);
    let expect: Vec<bool> = (0..=20).map(|x| x <= 10).collect();
    assert_eq!(r.controller, expect);
    assert_eq!(r.environment, expect);

    let mut all = countdown();
    all.property = Formula::True;
    let g = GridGame::new(&all, &[0], &[20]).unwrap();
    assert_eq!(count(explicit_reach_lfp(&g).for_player(Player::Controller)), 21);

    let mut idle = countdown();
    idle.moves = vec![Move { name: "none".into(), relation: Formula::False }];
    let g = GridGame::new(&idle, &[0], &[20]).unwrap();
    let r = explicit_reach_lfp(&g);
    assert_eq!(count(&r.controller), 1);
    assert!(r.controller[0]);
}

#[test]
fn grid_rejects_real_games() {
    let spec = cinderella(3, &Rational::from_int(3));
    assert!(GridGame::new(&spec, &[0; 3], &[3; 3]).is_err());
}

#[test]
fn simulate_reset_increment() {
    let spec = reset_increment();
    let r = solve_safety(&spec, &Config::default()).unwrap();
    let s = extract_strategy(&spec, &r.region).unwrap();
    let x = Var::int("x");
    let init: Assignment = [(x.clone(), Rational::zero())].into_iter().collect();
    let play = simulate_play(&spec, &s, &init, 50, 7).unwrap();
    assert_eq!(play.end, PlayEnd::Completed);
    assert_eq!(play.steps.len(), 100);
    for st in &play.steps {
        let v = &st.state[&x];
        assert!(*v >= Rational::zero() && *v <= Rational::from_int(2));
    }
    let outside: Assignment = [(x, Rational::from_int(5))].into_iter().collect();
    assert!(matches!(simulate_play(&spec, &s, &outside, 5, 1), Err(Error::Precondition(_))));
}

#[test]
fn simulate_cinderella_never_overflows() {
    let spec = cinderella(5, &Rational::from_int(3));
    let r = solve_safety(&spec, &Config::default()).unwrap();
    let s = extract_strategy(&spec, &r.region).unwrap();
    let init: Assignment = spec.state_vars.iter().map(|v| (v.clone(), Rational::zero())).collect();
    for seed in 0..3 {
        let play = simulate_play(&spec, &s, &init, 100, seed).unwrap();
        assert_eq!(play.end, PlayEnd::Completed);
        assert!(play.steps.iter().all(|st| spec.property.evaluate(&st.state).unwrap()));
        let line = play.steps[0].to_string();
        assert_eq!(line.split('\t').count(), 4, "{}", line);
    }
}

fn shape(seed: u64) -> (usize, i64) {
    let vars = 1 + (seed % 3) as usize;
    let bound = if vars == 3 { 3 } else { 3 + (seed % 4) as i64 };
    (vars, bound)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symbolic_safety_matches_oracle_stepwise(seed in 0u64..100_000) {
        let (vars, bound) = shape(seed);
        let spec = random_bounded_game(seed, vars, bound, Objective::Safety);
        let r = solve_safety(&spec, &Config::with_max_iters(200)).unwrap();
        let g = GridGame::new(&spec, &vec![0; vars], &vec![bound; vars]).unwrap();
        let o = explicit_safety_gfp(&g, Mode::EA);
        prop_assert_eq!(g.restrict(&r.region).unwrap(), o.fixpoint.clone());
        prop_assert_eq!(r.trace.len(), o.steps.len());
        for (x, s) in r.trace.iter().zip(&o.steps) {
            prop_assert_eq!(&g.restrict(x).unwrap(), s);
        }
        // maximality: outside the region the environment wins
        let swapped = spec.swap_players(Formula::not(spec.property.clone()), Objective::Reachability);
        let sg = GridGame::new(&swapped, &vec![0; vars], &vec![bound; vars]).unwrap();
        let env_wins = explicit_reach_lfp(&sg);
        for (i, inside) in g.restrict(&r.region).unwrap().iter().enumerate() {
            prop_assert_eq!(!inside, env_wins.environment[i]);
        }
    }

    #[test]
    fn symbolic_reachability_matches_oracle(seed in 0u64..100_000) {
        let (vars, bound) = shape(seed);
        let spec = random_bounded_game(seed, vars, bound, Objective::Reachability);
        let r = solve_reachability(&spec, &Config::with_max_iters(200)).unwrap();
        let reach = r.reach.unwrap();
        let g = GridGame::new(&spec, &vec![0; vars], &vec![bound; vars]).unwrap();
        let o = explicit_reach_lfp(&g);
        prop_assert_eq!(g.restrict(&reach.controller).unwrap(), o.controller);
        prop_assert_eq!(g.restrict(&reach.environment).unwrap(), o.environment);
    }

    #[test]
    fn symbolic_ae_safety_matches_oracle(seed in 0u64..100_000) {
        let (vars, bound) = shape(seed);
        let mut spec = random_bounded_game(seed, vars, bound, Objective::Safety);
        spec.mode = Mode::AE;
        let r = solve_safety(&spec, &Config::with_max_iters(200)).unwrap();
        let g = GridGame::new(&spec, &vec![0; vars], &vec![bound; vars]).unwrap();
        let o = explicit_safety_gfp(&g, Mode::AE);
        prop_assert_eq!(g.restrict(&r.region).unwrap(), o.fixpoint);
    }

    #[test]
    fn simulated_plays_stay_safe(seed in 0u64..100_000, play_seed in 0u64..1000) {
        let (vars, bound) = shape(seed);
        let spec = random_bounded_game(seed, vars, bound, Objective::Safety);
        let r = solve_safety(&spec, &Config::with_max_iters(200)).unwrap();
        let g = GridGame::new(&spec, &vec![0; vars], &vec![bound; vars]).unwrap();
        let inside = g.restrict(&r.region).unwrap();
        if let Some(i) = inside.iter().position(|b| *b) {
            let s = extract_strategy(&spec, &r.region).unwrap();
            let play = simulate_play(&spec, &s, &g.assignment(i), 20, play_seed).unwrap();
            prop_assert!(matches!(play.end, PlayEnd::Completed | PlayEnd::EnvStuck));
        }
    }
}
