// SPDX-License-Identifier: Apache-2.0

//! Quantum emitters coupled to finite 2D tight-binding lattices with
//! reflecting boundaries.

pub mod error;
pub mod lattice;
pub mod rates;
pub mod dynamics;
pub mod design;

pub use error::{Error, Result};
