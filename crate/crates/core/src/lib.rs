//! Symbolic dynamics of the mixmaster universe as the continued-fraction
//! shift on `[0, 1] x P1(F2)`.
//!
//! The crate is organised by subsystem:
//!
//! - [`cfrac`]: digits, convergents, the Gauss shift and the coset action.
//! - [`mixmaster`]: Kasner eras and cycles along a coded geodesic.
//! - [`transfer`]: transfer operators, pressure, invariant densities,
//!   Lyapunov exponents and Hausdorff dimensions of bounded-digit sets.
//! - [`markov`]: the Markov partition matrix, its graph, Bowen-Franks and
//!   K-theory groups, and KMS-state data.
//! - [`harness`]: configuration, reports and the `mixlab` command handlers.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod cfrac;
pub mod error;
pub mod harness;
pub mod markov;
pub mod mixmaster;
pub mod transfer;

pub use error::{Error, Result};
