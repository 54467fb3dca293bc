//! Exact computations in h-adic deformations of enveloping algebras.
//!
//! All arithmetic happens in `Q[h]/(h^(N+1))`. The crate covers PBW rewriting
//! against deformed presentations, deformed Koszul resolutions of the trivial
//! module, the modular character of the top Ext group, quantum duality on
//! presentations, twisted coproducts with their dual pairings, and the
//! low-degree Hochschild machinery used to compare star products.

pub mod error;
pub mod ext;
pub mod hochschild;
pub mod hopf;
pub mod io;
pub mod koszul;
pub mod linalg;
pub mod ncpoly;
pub mod series;

pub use error::{Error, Result};
pub use ncpoly::{Monomial, NCPoly, Presentation};
pub use series::{Rational, SeriesMatrix, SeriesScalar};
