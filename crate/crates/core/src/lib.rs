//! Multidimensional infinite words: generators, directional extraction,
//! recurrence along directions, and return-word derivatives.

pub mod algebra;
pub mod derive;
pub mod error;
pub mod generators;
pub mod lattice;
pub mod morphic;
pub mod recurrence;
pub mod rotation;

pub use error::{Error, Result};
pub use lattice::{
    directional_letter, factor_at, normalize_direction, translate_origin, Direction, FiniteWord,
    Letter, Position, Size, WordSource,
};
