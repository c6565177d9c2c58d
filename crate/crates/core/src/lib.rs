//! Exact computational algebra for formal group laws over Z[1/2]-algebras:
//! coefficient rings with computable normal forms, truncated power series
//! with composition and reversion, formal group laws and coordinate changes,
//! systems of coordinates and their law-chain presentations, graded
//! differential forms, and localised-regular-quotient certificates.
//!
//! Everything is exact (big rationals and prime residues), immutable, and
//! pure, so all operations are safe to run concurrently. With the `parallel`
//! feature (default) the batch drivers in [`batch`] fan work out with rayon;
//! without it they run sequentially with identical results.

pub mod batch;
pub mod category;
pub mod error;
pub mod fgl;
pub mod forms;
mod linalg;
pub mod lrq;
pub mod poly;
pub mod ring;
pub mod sampling;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use ring::{Ring, RingElement, RingHom, RingSpec, RawTerm, UnitStatus, Value};
pub use scalar::{Scalar, ScalarRing};
pub use series::{Series1, Series2};
