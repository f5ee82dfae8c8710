//! Exact counting toolkit for local Cayley distance graphs over F_q^d.
//!
//! The graph on F_q^d with connection set E joins x and y when y - x ∈ E.
//! Its eigenvalues are the character sums Ê(m), so most spectral questions
//! reduce to a fast transform over the additive group, and cycle questions
//! reduce to additive-energy counts of E.

pub mod cayley;
pub mod configurations;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod field;
pub mod pointset;
pub mod space;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{Elem, FieldCtx};
pub use pointset::{sphere, unit_sphere, PointSet};
pub use space::{Space, Vector};
