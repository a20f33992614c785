//! Exact-rational machinery for deciding whether a finite discrete
//! conditional distribution P(X,Y|Z) is compatible with the
//! instrumental-variable model.
//!
//! The decision problem is polyhedral: the compatible distributions form a
//! convex polytope whose vertices are indexed by pairs of response
//! functions (g: Z→X, h: X→Y). This crate builds that polytope, decides
//! membership by exact linear programming with verified Farkas
//! certificates, evaluates the classical instrumental inequality and its
//! stronger linear relatives, counts extreme points in closed form, and
//! converts between vertex and inequality representations with the double
//! description method. All arithmetic is over arbitrary-precision
//! rationals; there is no floating point on any decision path.

pub mod batch;
pub mod caps;
pub mod continuous;
pub mod counting;
pub mod dims;
pub mod dist;
pub mod error;
pub mod polyhedra;
pub mod rational;
pub mod response;
pub mod sampling;

pub use caps::Caps;
pub use dims::Dims;
pub use dist::{CondDist, Violation};
pub use error::{Error, Result};
pub use rational::{format_rat, parse_rat, Int, Rat};
pub use response::ResponseDist;
