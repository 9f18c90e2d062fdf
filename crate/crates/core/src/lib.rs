//! Periodic homogenization of two-phase planar elastic composites whose
//! effective tensor loses strong ellipticity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cell;
pub mod cli;
pub mod elastodyn;
pub mod elasticity;
pub mod elliptic;
pub mod error;
pub mod fem;
pub mod microstructure;

pub use error::{Error, Result};
