#![allow(dead_code)]

use gensys_core::dsl::parse_spec;
use gensys_core::game::GameSpec;
use gensys_core::{Formula, LinTerm, Rational, Var};

pub fn reset_increment() -> GameSpec {
    parse_spec(
        "sort int; vars x;
         env { x' = x + 1 }
         move reset { x' = 0 }
         guarantee { 0 <= x <= 2 }
         objective safety; mode EA;",
    )
    .unwrap()
}

pub fn countdown() -> GameSpec {
    parse_spec(
        "sort int; vars x;
         env { x' = x }
         move dec { 1 <= x <= 10 and x' = x - 1 }
         goal { x = 0 }
         objective reach; mode EA;",
    )
    .unwrap()
}

pub fn int_range(v: &Var, lo: i64, hi: i64) -> Formula {
    Formula::and(vec![
        Formula::le(&LinTerm::constant(Rational::from_int(lo)), &LinTerm::var(v)),
        Formula::le(&LinTerm::var(v), &LinTerm::constant(Rational::from_int(hi))),
    ])
}

fn b(i: usize) -> Var {
    Var::real(&format!("b{}", i % 5 + 1))
}

fn within(i: usize, hi: i64) -> [Formula; 2] {
    [
        Formula::le(&LinTerm::zero(), &LinTerm::var(&b(i))),
        Formula::le(&LinTerm::var(&b(i)), &LinTerm::constant(Rational::from_int(hi))),
    ]
}

/// Row `i` (0-based) of the published strategy table for five buckets of
/// capacity 3: buckets `i` and `i+1` may be emptied when they hold at most 3,
/// the other three hold at most 2, and the two not adjacent to each other
/// among those hold at most 3 together.
pub fn table1_row(i: usize) -> Formula {
    let mut parts = Vec::new();
    parts.extend(within(i, 3));
    parts.extend(within(i + 1, 3));
    for k in 2..5 {
        parts.extend(within(i + k, 2));
    }
    parts.push(Formula::le(
        &LinTerm::var(&b(i + 2)).add(&LinTerm::var(&b(i + 4))),
        &LinTerm::constant(Rational::from_int(3)),
    ));
    Formula::and(parts)
}

pub fn table1_region() -> Formula {
    Formula::or((0..5).map(table1_row).collect())
}
