//! Desk-scale computational toolkit around random matrix moments, convex
//! separability relaxations, POVM distinguishability norms, no-signalling
//! game values, and quantum channel compression.

pub mod channels;
pub mod combinatorics;
pub mod convex;
pub mod ensembles;
pub mod error;
pub mod games;
pub mod limits;
pub mod linalg;
pub mod operators;
pub mod povm;
pub mod separability;

pub use error::{QilabError, Result};
