//! Computational tools for the moment problem on compact semi-algebraic
//! sets: exact polynomial arithmetic, localized Hankel checks, positivity
//! certificates (Farkas, Handelman, S-module, Polya, Bernstein),
//! Archimedean witnesses, and atomic measure extraction through a
//! truncated GNS construction.

#![allow(clippy::needless_range_loop)]

pub mod certs;
#[cfg(feature = "cli")]
pub mod cli;
pub mod cones;
pub mod gns;
pub mod linalg;
pub mod moments;
pub mod poly;
pub mod rational;

pub use poly::{MultiIndex, Polynomial};
pub use rational::Rational;
