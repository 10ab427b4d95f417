//! Named words available on the command line.

use std::sync::Arc;

use multirec_core::generators::{
    fib_rows_word, gcd_word, presets, toeplitz_construct, FillPolicy, Morphism, ThueMorse,
    ToeplitzSchedule,
};
use multirec_core::rotation::RotationWordSpec;
use multirec_core::{Letter, WordSource};

use crate::error::{usage, CliResult};

/// Words that are not fixed points of a named morphism.
pub const EXTRA: &[&str] = &[
    "thue-morse",
    "thue-morse-gcd",
    "fib-rows",
    "toeplitz-rows",
    "sturmian",
    "toeplitz",
];

pub fn names() -> Vec<&'static str> {
    presets::NAMES.iter().chain(EXTRA).copied().collect()
}

#[derive(Clone, Debug)]
pub struct PresetOptions {
    /// Start letter of a morphic fixed point.
    pub letter: Option<u32>,
    /// Dimension of the gcd word.
    pub dimension: usize,
    pub seed: u64,
    pub steps: u32,
    /// Constant fill letter for the Toeplitz construction; random when absent.
    pub fill: Option<u32>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            letter: None,
            dimension: 2,
            seed: 0,
            steps: 8,
            fill: None,
        }
    }
}

pub type Word = Box<dyn WordSource>;

/// Letter 1 when the morphism is prolongable on it, else the smallest
/// prolongable letter.
pub fn default_letter(phi: &Morphism) -> CliResult<Letter> {
    if phi.is_prolongable(Letter(1)) {
        return Ok(Letter(1));
    }
    phi.prolongable_letters()
        .first()
        .copied()
        .ok_or_else(|| usage("morphism is not prolongable on any letter"))
}

pub fn fixed_point(phi: Morphism, letter: Option<u32>) -> CliResult<Word> {
    let a = match letter {
        Some(a) => Letter(a),
        None => default_letter(&phi)?,
    };
    Ok(Box::new(Arc::new(phi).fixed_point(a)?))
}

pub fn build(name: &str, opts: &PresetOptions) -> CliResult<Word> {
    if let Some(phi) = presets::by_name(name) {
        return fixed_point(phi, opts.letter);
    }
    Ok(match name {
        "thue-morse" => Box::new(ThueMorse),
        "thue-morse-gcd" => Box::new(gcd_word(ThueMorse, opts.dimension)?),
        "fib-rows" => Box::new(fib_rows_word()),
        "toeplitz-rows" => Box::new(multirec_core::generators::toeplitz_rows_word()),
        "sturmian" => Box::new(RotationWordSpec::default_sturmian()),
        "toeplitz" => {
            let fill = match opts.fill {
                Some(c) => FillPolicy::Constant(Letter(c)),
                None => FillPolicy::SeededRandom,
            };
            let (word, _) = toeplitz_construct(&ToeplitzSchedule::new(opts.seed, fill, opts.steps))?;
            Box::new(word)
        }
        _ => {
            return Err(usage(format!(
                "unknown preset {name:?}; known: {}",
                names().join(", ")
            )))
        }
    })
}
