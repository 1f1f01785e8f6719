//! Exact computations on the variety of k-planes inside an intersection of
//! projective hypersurfaces.
//!
//! The crate works over the rationals and over prime fields F_p (p < 2^31),
//! always exactly. The main pipeline:
//!
//! * [`poly`] / [`parse`]: sparse multivariate polynomials with a canonical
//!   term order, a text grammar, and calculus helpers.
//! * [`combi`]: the numerology of the problem (expected dimensions, the
//!   auxiliary profile `psi`, minor sizes).
//! * [`grassmann`]: affine charts on the space of k-planes, plane/point
//!   incidence, and exhaustive plane enumeration over F_q.
//! * [`fano`]: restriction of forms to a plane, the local equation system on
//!   a chart, tangent-space profiles, exhaustive counts, and a crude
//!   dimension estimator from counts over several primes.
//! * [`alpha`]: the first-order obstruction matrix at a plane and the
//!   symbolic multiplication matrix M(mu) with evaluation under a dual
//!   functional.

pub mod alpha;
pub mod combi;
pub mod error;
pub mod fano;
pub mod field;
pub mod grassmann;
pub mod matrix;
pub mod monomial;
pub mod parse;
pub mod poly;

pub use error::Error;
pub use field::{FieldSpec, Scalar};
pub use monomial::Monomial;
pub use poly::{FormTuple, Polynomial};
