mod common;

use common::{countdown, int_range, reset_increment};
use gensys_core::bench::{cinderella, random_bounded_game};
use gensys_core::dsl::parse_spec;
use gensys_core::game::{Mode, Objective};
use gensys_core::oracle::GridGame;
use gensys_core::qe::{equivalent, find_witness, implies, is_sat, project};
use gensys_core::{Assignment, Formula, LinTerm, Rational, Var};
use proptest::prelude::*;

#[test]
fn rename_primed_examples() {
    let spec = parse_spec("sort int; vars x, y; env { true } move m { true } guarantee { true }").unwrap();
    let x = Var::int("x");
    let y = Var::int("y");
    let le = Formula::le(&LinTerm::var(&x), &LinTerm::constant(Rational::from_int(2)));
    let le1 = Formula::le(&LinTerm::var(&x.suffixed("'")), &LinTerm::constant(Rational::from_int(2)));
    assert_eq!(spec.rename_primed(&le, 1), le1);
    assert_eq!(spec.rename_primed(&Formula::True, 2), Formula::True);
    let sum = Formula::eq(&LinTerm::var(&x).add(&LinTerm::var(&y)), &LinTerm::zero());
    let sum1 = Formula::eq(
        &LinTerm::var(&Var::int("x'")).add(&LinTerm::var(&Var::int("y'"))),
        &LinTerm::zero(),
    );
    assert_eq!(spec.rename_primed(&sum, 1), sum1);
}

#[test]
fn rename_is_evaluation_compatible() {
    let spec = random_bounded_game(3, 3, 4, Objective::Safety);
    let f = spec.property.clone();
    for level in 1..=2 {
        let g = spec.rename_primed(&f, level);
        let next = spec.next_vars(level);
        assert_eq!(next.iter().collect::<std::collections::BTreeSet<_>>().len(), 3);
        for vals in [[0, 1, 2], [4, 4, 0], [3, 0, 1]] {
            let a: Assignment = spec.state_vars.iter().cloned().zip(vals.map(Rational::from_int)).collect();
            let b: Assignment = next.iter().cloned().zip(vals.map(Rational::from_int)).collect();
            assert_eq!(f.evaluate(&a).unwrap(), g.evaluate(&b).unwrap());
        }
    }
}

#[test]
fn wp_safety_ea_examples() {
    let spec = reset_increment();
    assert_eq!(project(&spec.wp_safety_ea(&spec.property)).unwrap(), Formula::True);
    assert_eq!(project(&spec.wp_safety_ea(&Formula::False)).unwrap(), Formula::False);
    let c3 = cinderella(3, &Rational::from_int(3));
    let w = project(&c3.wp_safety_ea(&c3.property)).unwrap();
    let zero: Assignment = c3.state_vars.iter().map(|v| (v.clone(), Rational::zero())).collect();
    assert!(w.evaluate(&zero).unwrap());
}

#[test]
fn wp_safety_ae_examples() {
    let x = Var::int("x");
    let ident = parse_spec("sort int; vars x; env { x' = x } move stay { x' = x } guarantee { x <= 5 } mode AE;").unwrap();
    let w = project(&ident.wp_safety_ae(&ident.property)).unwrap();
    let le5 = Formula::le(&LinTerm::var(&x), &LinTerm::constant(Rational::from_int(5)));
    assert!(equivalent(&w, &le5).unwrap());
    let stuck = parse_spec("sort int; vars x; env { false } move stay { x' = x } guarantee { x <= 5 } mode AE;").unwrap();
    assert_eq!(project(&stuck.wp_safety_ae(&Formula::False)).unwrap(), Formula::True);
    // environment first on the reset/increment game: x + 1 must stay safe
    let mut ae = reset_increment();
    ae.mode = Mode::AE;
    let w = project(&Formula::and(vec![ae.wp_safety_ae(&ae.property), ae.property.clone()])).unwrap();
    assert!(equivalent(&w, &int_range(&x, 0, 1)).unwrap());
    let g = GridGame::new(&ae, &[0], &[2]).unwrap();
    let oracle = gensys_core::oracle::explicit_safety_gfp(&g, Mode::AE);
    assert_eq!(oracle.steps[1], g.restrict(&w).unwrap());
}

#[test]
fn wp_reach_examples() {
    let mut spec = countdown();
    spec.property = Formula::True;
    let c = project(&spec.wp_reach_c(&Formula::False)).unwrap();
    let has_move = project(&Formula::exists_many(&spec.next_vars(1), spec.con())).unwrap();
    assert!(equivalent(&c, &has_move).unwrap());
    assert_eq!(project(&spec.wp_reach_e(&Formula::False)).unwrap(), Formula::True);
    let spec = countdown();
    let c = project(&spec.wp_reach_c(&Formula::False)).unwrap();
    let x = Var::int("x");
    assert!(equivalent(&c, &int_range(&x, 1, 1)).unwrap());
}

fn region_strategy() -> impl Strategy<Value = (u64, Formula, Formula)> {
    (0u64..500, -3i64..=3, -3i64..=3, 0i64..=8).prop_map(|(seed, a, b, k)| {
        let spec = random_bounded_game(seed, 2, 4, Objective::Safety);
        let (x, y) = (&spec.state_vars[0], &spec.state_vars[1]);
        let t = LinTerm::var(x).scale(&Rational::from_int(a)).add(&LinTerm::var(y).scale(&Rational::from_int(b)));
        let x2 = Formula::le(&t, &LinTerm::constant(Rational::from_int(k)));
        let x1 = Formula::and(vec![x2.clone(), Formula::le(&LinTerm::var(x), &LinTerm::constant(Rational::from_int(2)))]);
        (seed, x1, x2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wp_is_monotone((seed, x1, x2) in region_strategy()) {
        prop_assert!(implies(&x1, &x2).unwrap());
        let spec = random_bounded_game(seed, 2, 4, Objective::Safety);
        let ea1 = project(&spec.wp_safety_ea(&x1)).unwrap();
        let ea2 = project(&spec.wp_safety_ea(&x2)).unwrap();
        prop_assert!(implies(&ea1, &ea2).unwrap());
        let c1 = project(&spec.wp_reach_c(&x1)).unwrap();
        let c2 = project(&spec.wp_reach_c(&x2)).unwrap();
        prop_assert!(implies(&c1, &c2).unwrap());
        let e1 = project(&spec.wp_reach_e(&x1)).unwrap();
        let e2 = project(&spec.wp_reach_e(&x2)).unwrap();
        prop_assert!(implies(&e1, &e2).unwrap());
    }

    #[test]
    fn wp_matches_explicit_predecessor(seed in 0u64..1000, vars in 1usize..=2) {
        let spec = random_bounded_game(seed, vars, 4, Objective::Safety);
        let g = GridGame::new(&spec, &vec![0; vars], &vec![4; vars]).unwrap();
        let w = project(&Formula::and(vec![spec.wp_safety_ea(&spec.property), spec.property.clone()])).unwrap();
        let oracle = gensys_core::oracle::explicit_safety_gfp(&g, Mode::EA);
        let expect = oracle.steps.get(1).unwrap_or(&oracle.fixpoint);
        prop_assert_eq!(&g.restrict(&w).unwrap(), expect);
    }
}

#[test]
fn cinderella_three_wp_has_zero_witness() {
    let c3 = cinderella(3, &Rational::from_int(3));
    let w = project(&c3.wp_safety_ea(&c3.property)).unwrap();
    assert!(is_sat(&w).unwrap());
    let a = find_witness(&w).unwrap();
    assert!(w.evaluate(&a).unwrap());
}
