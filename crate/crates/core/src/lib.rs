//! Typicality of permuted correlated sequences.
//!
//! - [`perm`]: permutations, cycle decomposition, standard permutations.
//! - [`partitions`]: set partitions, Bell numbers, Bell signatures of permutation vectors.
//! - [`counting`]: exact counts and sandwiches for derangement-type families.
//! - [`dist`]: finite joint distributions, KL divergence, mutual information.
//! - [`typicality`]: joint types and strong typicality.
//! - [`bounds`]: exponent rates and explicit finite-n bounds on typicality probabilities.
//! - [`montecarlo`]: exact enumeration, seeded Monte Carlo, verification harness.

pub mod bounds;
pub mod counting;
pub mod dist;
pub mod error;
pub mod exec;
pub mod montecarlo;
pub mod partitions;
pub mod perm;
pub mod typicality;

pub use error::{Error, Result};
pub use exec::Execution;
pub use partitions::{BellSignature, PermutationVector, SetPartition};
pub use perm::{CycleType, Permutation};
