//! Twist defects in the planar surface code.
//!
//! The crate covers the Jordan-Wigner analysis of twist-bound Majorana modes
//! ([`jw`]), a stabilizer simulation of the code with parity measurements of
//! twist pairs ([`tableau`], [`sim`]), exact Ising-anyon algebra ([`anyon`])
//! and measurement-based braiding on interchangeable backends ([`mbb`]).
//! [`dense`] and [`projection`] are small exact oracles used for validation.

pub mod anyon;
pub mod dense;
pub mod gf2;
pub mod jw;
pub mod lattice;
pub mod mbb;
pub mod oracle;
pub mod pauli;
pub mod projection;
pub mod sim;
pub mod tableau;

use rand::SeedableRng;

pub use lattice::{build_lattice, LatticeSpec, Segment, TwistLattice};
pub use pauli::{Letter, PauliString, Phase};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Random source for measurements; one per simulation instance.
pub type SeedStream = rand_chacha::ChaCha8Rng;

pub fn seed_stream(seed: u64) -> SeedStream {
    SeedStream::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`, for per-shot randomness.
pub fn shot_stream(seed: u64, index: u64) -> SeedStream {
    let mut rng = SeedStream::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
