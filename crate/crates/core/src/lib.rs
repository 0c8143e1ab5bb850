//! Exact solver for exponential equations `w₀ t₁^k₁ w₁ ⋯ t_l^k_l w_l = 1` in
//! free groups, with the band-system combinatorics it is built on, a
//! semilinear-set query layer, and a decision procedure for extending
//! twist-adjusted handlebody homeomorphisms given algebraically.

pub mod bands;
pub mod expsolve;
pub mod lattice;
pub mod twist;
pub mod word;

pub use bands::{BandError, BandSystem, BundlingMap, MarkedBandSystem, UnbundlingMap};
pub use expsolve::{solve, solve_with, EquationInstance, SolveError};
pub use lattice::{Domain, LatticeError, LinearSet, LinearSystem, SolutionSet};
pub use twist::{brute_extension, decide_extension, ExtensionError, ExtensionInstance, TwistCrossing, TwistTrace};
pub use word::{CyclicDecomposition, Word, WordError};
