//! Gaussian mixture clustering with cross-validated covariance shrinkage.
//!
//! The crate provides:
//! - classical expectation-maximization for Gaussian mixtures with a
//!   diagonal ridge safeguard ([`em`]),
//! - a regularized variant that shrinks every cluster covariance toward a
//!   scaled identity target, with per-cluster shrinkage strength selected
//!   by cross-validation on the current hard partition ([`em`], [`cv`]),
//! - a Lloyd / k-means++ baseline used both as a standalone method and as
//!   the shared initializer for the mixture fits ([`kmeans`]),
//! - synthetic autoregressive benchmark generation, CSV ingestion with
//!   imputation, PCA reduction and stratified splitting ([`data`]),
//! - permutation-maximized clustering accuracy and covariance
//!   conditioning reports ([`metrics`]),
//! - a runtime registry mapping method names to trait objects
//!   ([`methods`]).
//!
//! All linear algebra goes through the hand-rolled kernels in [`linalg`];
//! no routine forms an explicit matrix inverse. Every random draw flows
//! from seeds derived in [`rng`], and all reductions run in a fixed
//! sequential order, so equal seeds give bitwise-equal results.

pub mod cv;
pub mod data;
pub mod em;
pub mod kmeans;
pub mod linalg;
pub mod metrics;
pub mod methods;
pub mod model;
pub mod rng;
