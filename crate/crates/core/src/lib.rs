//! Morse homology of functions on implicit surfaces.

pub mod catalog;
pub mod cli;
pub mod compare;
pub mod complex;
pub mod continuation;
pub mod critical;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod morse;
pub mod scalarfield;

pub use error::{Error, ErrorClass, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/surfaces.md")]
    mod surfaces {}
    #[doc = include_str!("../../../book/src/critical-points.md")]
    mod critical_points {}
    #[doc = include_str!("../../../book/src/trajectories.md")]
    mod trajectories {}
    #[doc = include_str!("../../../book/src/complex.md")]
    mod complex {}
    #[doc = include_str!("../../../book/src/cycles.md")]
    mod cycles {}
    #[doc = include_str!("../../../book/src/continuation.md")]
    mod continuation {}
    #[doc = include_str!("../../../book/src/singular-cycles.md")]
    mod singular_cycles {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
}
