//! Absolutely ordered spaces on concrete finite-dimensional models.
//!
//! Two models are provided: Hermitian matrices (optionally block diagonal)
//! with the positive semidefinite cone, and `R^d` with the coordinatewise
//! order. On top of them sit star-linear maps, property classifiers with
//! witnesses, and suites checking the equivalences between isometries,
//! `|·|`-preserving maps and Jordan and C*-isomorphisms.

pub mod axioms;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod matrix_order;
pub mod model;
pub mod order;
pub mod report;
pub mod rng;
pub mod theorems;
pub mod tolerance;

pub use error::{Error, Result};
pub use maps::StarLinearMap;
pub use model::{Element, ModelKind, SpaceModel};
pub use report::{ClassificationReport, Verdict, Witness};
pub use tolerance::{Tolerance, ToleranceConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
