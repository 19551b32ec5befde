//! Exact abelian BF partition functions of closed 3-manifolds, computed
//! from homology and linking forms, with brute-force checks of the
//! underlying finite identities.

#![allow(clippy::needless_range_loop)]

pub mod abgroup;
pub mod bfcs;
pub mod cyclotomic;
pub mod error;
pub mod homology;
pub mod linalg;
pub mod manifolds;
pub mod sectors;
pub mod suites;
