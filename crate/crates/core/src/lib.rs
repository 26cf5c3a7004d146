//! Jacobi-filtered base selection for the classical Shor factoring loop.
//!
//! For a semiprime n = pq, a base y of even order r = 2k with
//! y^k != -1 mod n factors n via gcd(y^k - 1, n). A uniformly random unit
//! is usable with probability at least 1/2; restricting the draw to units
//! with Jacobi symbol (y/n) = -1 guarantees an even order and lifts the
//! worst-case success probability to 3/4 (to 1 when p - 1 and q - 1 share
//! their 2-adic valuation).
//!
//! The crate has three layers:
//!
//! * [`ntcore`] — exact integer and modular arithmetic (gcd, modular
//!   exponentiation, Jacobi symbol, deterministic primality, factoring,
//!   multiplicative orders),
//! * [`census`] — exhaustive classification of Z_n^* for small semiprimes,
//!   with every count checked against its closed form as an exact rational,
//! * [`shor`] — the factoring loop itself, with uniform and Jacobi-filtered
//!   base selection, an exact order oracle, an opt-in idealized-measurement
//!   oracle with continued-fraction recovery, and a seeded Monte Carlo
//!   comparison harness.

pub mod census;
pub mod error;
pub mod ntcore;
pub mod rational;
pub mod shor;

pub use error::{Error, Result};
pub use rational::ExactRational;
