//! Spectral laboratory for the quintic hierarchy: periodic-grid fields and
//! propagators, factorized contraction kernels, the recursive tree kernels,
//! multilinear-estimate stress tests, the split-step solver, and the dense
//! oracles that cross-check the factorized algebra in one dimension.

pub mod dense;
pub mod ensemble;
pub mod error;
pub mod estimates;
pub mod fieldio;
pub mod grid;
pub mod hierarchy;
pub mod kernel;
pub mod nls;
pub mod potential;
pub mod quad;
pub mod report;

pub use error::CoreError;
pub use grid::{Grid, GridField, C64};
pub use kernel::{contract_b, theta_recursion, FactorizedKernel, KernelTerm};
pub use potential::{trilinear_a, Potential};
