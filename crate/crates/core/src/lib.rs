//! Symbolic solving of infinite-state two-player games over linear integer
//! and rational arithmetic.
//!
//! A game is given by an environment relation, a list of controller moves and
//! a property over states. Safety games are solved by a greatest fixed point
//! `X = WP(X) and G` starting from `X = G`; reachability games by a pair of
//! least fixed points, one per starting player. Every iteration eliminates
//! quantifiers exactly (virtual substitution / Fourier-Motzkin over the
//! rationals, Cooper's method over the integers), so regions are always
//! quantifier-free formulas over the state variables.




pub mod error;
pub mod bench;
pub mod dsl;
pub mod engine;
pub mod formula;
pub mod game;
pub mod oracle;


pub mod qe;
pub mod rational;

pub use error::{Error, Result};
pub use formula::{Assignment, Atom, Formula, LinTerm, Rel, Sort, Var};
pub use rational::Rational;
