//! Generalized quantum anharmonic oscillator `H = a†a + ½ + (λ/m) X^m`.
//!
//! Exact normal ordering of ladder polynomials, perturbative spectra and
//! frequency operators, first-order operator evolution, and the quantum-optical
//! observables built on it (phase fluctuations, squeezing, photon statistics,
//! geometric phase). Every closed form has an independent numerical oracle:
//! truncated Fock-space diagonalization, brute-force commutator rewriting, or
//! RK4 integration of the classical equation of motion.
//!
//! Units: ħ = ω = mass = 1. Quadratures are `X = (a + a†)/√2` and
//! `Ẋ = i(a† − a)/√2`. Free evolution is `a(t) = a e^{−it}`.

pub mod classical;
pub mod combinatorics;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod geometry;
pub mod observables;
pub mod ordering;
pub mod quality;
pub mod spectra;

pub use error::{Error, Result};
pub use fock::{FockMatrix, FockState, OscillatorSpec, C64};
pub use ordering::OperatorPoly;
pub use spectra::FreqPolynomial;
