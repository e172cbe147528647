//! Exact arithmetic on a discretised qubit state space.
//!
//! States are restricted to `cos²(θ/2) = m/p`, `φ/2π = n/p` for a prime
//! `p > 12`. On that lattice, Niven's classification of rational cosines
//! decides which counterfactual measurements are admissible. The crate
//! provides:
//!
//! * [`rational`], [`prime`], [`angle`]: exact fractions, primality, and the
//!   Niven classifier for angles given in rational turns;
//! * [`numeric`]: fixed-point reals (~115 digits) used only for diagnostics;
//! * [`spherical`]: the spherical cosine rule and the rational-third-side
//!   classifier;
//! * [`bloch`]: lattice states, amplitudes, Born probabilities;
//! * [`ensemble`]: ±1 bit strings whose statistics reproduce the state;
//! * [`mach_zehnder`] and [`chsh`]: counterfactual analysis of the two
//!   experiments, including support-level Statistical Independence checks;
//! * [`padic`] and [`invariant_sim`]: trajectory labels, the piecewise
//!   p-adic state metric, and exhaustive hidden-variable enumeration;
//! * [`sweep`]: the resolution sweep over `p`.
//!
//! Scans take an [`Execution`] and give identical results sequentially or
//! on the rayon pool (feature `parallel`, on by default).

pub mod angle;
pub mod bloch;
pub mod chsh;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod invariant_sim;
pub mod mach_zehnder;
pub mod numeric;
pub mod padic;
pub mod prime;
pub mod rational;
pub mod rng;
pub mod spherical;
pub mod sweep;

pub use angle::{classify_cos, cos_exact, AngleTurns, CosValue, NivenClass};
pub use error::{Error, Result};
pub use exec::Execution;
pub use numeric::Real;
pub use prime::{is_prime, next_prime, DiscretisationParam};
pub use rational::ExactRational;
