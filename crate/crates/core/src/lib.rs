//! Exact computer algebra for Maurer–Cartan pairs of polyvector fields,
//! truncated Koszul complexes, equivariant normal forms and eigenspace
//! splittings of finite-dimensional algebras.

pub mod cyclic;
pub mod exparse;
pub mod fdalg;
pub mod koszul;
pub mod linalg;
pub mod mcgauge;
pub mod polyvec;
pub mod scalar;
pub mod series;
pub mod unipoly;

pub use cyclic::CyclicAction;
pub use mcgauge::{GaugeStep, MCPair};
pub use polyvec::{FormIndex, Polyvector};
pub use scalar::{Field, Scalar};
pub use series::{Monomial, SeriesContext, SeriesError, TruncatedSeries};
