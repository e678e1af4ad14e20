//! Arbitrary-precision number theory for generating primitive roots with
//! certified probability bounds.
//!
//! The crate is organised by capability:
//!
//! - [`numeric`]: modular exponentiation, gcd, integer roots and the exact
//!   `Q > n^(2/3)` comparison.
//! - [`bounds`]: success and failure probability bounds, the `B` solver and
//!   the distinct-prime-factor estimates.
//! - [`factor`]: Miller–Rabin, Brent's rho and partial factorization with a
//!   lower bound on the unfactored cofactor.
//! - [`primroot`]: randomized primitive-root generation (the general
//!   algorithm, the `log²p·log²log p` heuristic and the `2⁻⁴⁰` variant), plus
//!   deterministic generation when `p − 1` is fully factored.
//! - [`order`]: Euler φ, Carmichael λ and the order spectrum of `(Z/nZ)*`.
//! - [`lucas`]: the probabilistic Lucas primality test, certificates and
//!   Diffie–Hellman parameter generation.
//! - [`bench`]: failure-probability sweeps and self-timing.
//! - [`cli`]: the command-line front end.
//!
//! Runnable walkthroughs of each capability live under `examples/`.

pub mod bench;
pub mod bounds;
pub mod cli;
mod error;
pub mod factor;
pub mod lucas;
pub mod numeric;
pub mod order;
pub mod primroot;
pub mod rng;

pub use error::{Error, Result};
pub use numeric::{Natural, Residue};
pub use rng::{SeedTrace, TracedRng};
