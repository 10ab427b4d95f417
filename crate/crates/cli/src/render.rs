//! Grid output formats.

use std::fmt::Write as _;
use std::str::FromStr;

use multirec_core::FiniteWord;

use crate::error::{usage, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
    Pbm,
    Pgm,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Format::Text,
            "json" => Format::Json,
            "csv" => Format::Csv,
            "pbm" => Format::Pbm,
            "pgm" => Format::Pgm,
            _ => return Err(usage(format!("unknown format {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub format: Format,
    /// Alphabet size of the word the block comes from.
    pub alphabet: usize,
    /// Gray level per letter; linear over 0..=255 when absent.
    pub gray: Option<Vec<u8>>,
}

impl RenderSpec {
    pub fn new(format: Format, alphabet: usize) -> Self {
        RenderSpec {
            format,
            alphabet,
            gray: None,
        }
    }

    fn gray_of(&self, letter: u32) -> u8 {
        if let Some(map) = &self.gray {
            return map.get(letter as usize).copied().unwrap_or(255);
        }
        if self.alphabet <= 1 {
            return 0;
        }
        let top = (self.alphabet - 1) as u64;
        ((letter as u64).min(top) * 255 / top) as u8
    }
}

/// Rows top first; for d = 1 a single row.
fn rows(w: &FiniteWord) -> CliResult<Vec<Vec<u32>>> {
    let dims = w.size().dims();
    match dims.len() {
        1 => Ok(vec![w.cells().iter().map(|c| c.0).collect()]),
        2 => Ok((0..dims[1])
            .rev()
            .map(|y| (0..dims[0]).map(|x| w.get(&[x, y]).0).collect())
            .collect()),
        d => Err(usage(format!(
            "grid formats need dimension 1 or 2, got {d}; use json"
        ))),
    }
}

pub fn render(w: &FiniteWord, spec: &RenderSpec) -> CliResult<String> {
    if spec.format == Format::Json {
        return Ok(w.to_json().to_string() + "\n");
    }
    let rows = rows(w)?;
    let width = rows.first().map_or(0, Vec::len);
    let mut out = String::new();
    match spec.format {
        Format::Text | Format::Csv => {
            let sep = if spec.format == Format::Csv { "," } else { " " };
            for r in &rows {
                let cells: Vec<String> = r.iter().map(u32::to_string).collect();
                out.push_str(&cells.join(sep));
                out.push('\n');
            }
        }
        Format::Pbm => {
            if spec.alphabet > 2 {
                return Err(usage("pbm needs a binary alphabet"));
            }
            // Letter 1 is black, which is 1 in PBM.
            let _ = writeln!(out, "P1\n{width} {}", rows.len());
            for r in &rows {
                let cells: Vec<String> = r.iter().map(u32::to_string).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
        Format::Pgm => {
            let _ = writeln!(out, "P2\n{width} {}\n255", rows.len());
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|&c| spec.gray_of(c).to_string()).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
        Format::Json => unreachable!(),
    }
    Ok(out)
}
