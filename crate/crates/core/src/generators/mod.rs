//! Concrete word constructors.

pub mod counterexamples;
pub mod morphism;
pub mod presets;
pub mod sequences;
pub mod toeplitz;

pub use counterexamples::{
    fib_rows_word, toeplitz_rows_word, urd_not_ur_construct, FibRows, ToeplitzRows, UrdNotUrGrid,
    UrdNotUrSchedule, UrdStep,
};
pub use morphism::{
    check_prolongable, morphic_letter, morphic_prefix, preimage_position, FixedPoint, Morphism,
};
pub use sequences::{fibonacci_word, gcd_word, thue_morse, Fibonacci, GcdWord, ThueMorse};
pub use toeplitz::{toeplitz_construct, FillPolicy, ToeplitzGrid, ToeplitzSchedule, ToeplitzWord};
