//! Exact sampling of λ-weighted partial triangulations of a convex polygon.
//!
//! A partial triangulation of the (n+2)-gon with d non-crossing diagonals
//! gets weight λ^d. Sampling runs in two stages: the diagonal count is drawn
//! by rejection against an upper bound on the partition function
//! ([`count_sampler`]), then a uniform structure with that many diagonals is
//! generated through Catalan bijections ([`structure`], [`geometry`]).

pub mod cli;
pub mod combinat;
pub mod count_sampler;
pub mod error;
pub mod geometry;
pub mod logspace;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod structure;

pub use error::{Error, Result};
