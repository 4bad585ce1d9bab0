//! Nearest-integer continued fractions, quadratic form reduction,
//! geodesic coding on the modular surface, and lattice point counting,
//! built on exact quadratic-surd arithmetic and certified interval
//! numerics so every reported digit is backed by an enclosure.

pub mod counting;
pub mod forms;
pub mod hurwitz;
pub mod hyperbolic;
pub mod numerics;
pub mod stats;

pub use numerics::{
    CertifiedReal, ParseError, ProjectivePoint, QuadraticSurd, SurdError, UnimodularMatrix,
    ValueLiteral,
};

/// Library version, for embedding in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
