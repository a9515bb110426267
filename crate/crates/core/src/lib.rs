//! Terwilliger algebras of generalized wreath products of commutative
//! association schemes.
//!
//! The crate builds products over a finite poset, materializes the closed-form
//! idempotent families of their Terwilliger algebras, and checks them against a
//! brute-force Wedderburn decomposition.

pub mod cli;
pub mod error;
pub mod gwreath;
pub mod linalg;
pub mod poset;
pub mod scheme;
pub mod terwilliger;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use poset::{AntiChain, DIndex, EIndex, PointSet, Poset};
pub use scheme::Scheme;
