//! Toeplitz-style doubly periodic filling.
//!
//! Step 0 puts the letter `a` on every cell with all coordinates even. Step
//! n ≥ 1 fills the cells of [0,2^n)^d still empty after step n-1 and repeats
//! them with period 2^{n+1} in every coordinate. After step n the box
//! [0,2^n)^d is complete and the filled set is 2^{n+1}-periodic.
//!
//! A cell p is filled at the first step n for which bit n of every coordinate
//! is 0, i.e. n = trailing ones of (p_1 | ... | p_d), with the value chosen
//! for the residue p mod 2^n. This gives a lazy evaluator on all of N^d.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{for_each_in_box, Letter, WordSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FillPolicy {
    Constant(Letter),
    SeededRandom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzSchedule {
    pub seed: u64,
    pub fill: FillPolicy,
    pub steps: u32,
    /// Letter written at step 0.
    pub a: Letter,
    pub alphabet: usize,
    pub dimension: usize,
}

impl ToeplitzSchedule {
    pub fn new(seed: u64, fill: FillPolicy, steps: u32) -> Self {
        ToeplitzSchedule {
            seed,
            fill,
            steps,
            a: Letter(1),
            alphabet: 2,
            dimension: 2,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidInput("steps must be at least 1".into()));
        }
        if self.steps >= 31 {
            return Err(Error::InvalidInput("steps must be below 31".into()));
        }
        if self.dimension == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let bound = self.alphabet as u32;
        let too_big = |l: Letter| l.0 >= bound;
        if too_big(self.a) || matches!(self.fill, FillPolicy::Constant(c) if too_big(c)) {
            return Err(Error::LetterOutOfRange {
                letter: self.a.0.max(match self.fill {
                    FillPolicy::Constant(c) => c.0,
                    FillPolicy::SeededRandom => 0,
                }),
                alphabet: self.alphabet,
            });
        }
        Ok(())
    }

    /// Letter chosen at step n for residue `cell` in [0,2^n)^d.
    fn fill_value(&self, n: u32, cell: &[u64]) -> Letter {
        if n == 0 {
            return self.a;
        }
        match self.fill {
            FillPolicy::Constant(c) => c,
            FillPolicy::SeededRandom => {
                let mut key = SplitMix64::seed_from_u64(self.seed).next_u64();
                key = SplitMix64::seed_from_u64(key ^ u64::from(n)).next_u64();
                for &c in cell {
                    key = SplitMix64::seed_from_u64(key ^ c).next_u64();
                }
                Letter((key % self.alphabet as u64) as u32)
            }
        }
    }
}

/// Step at which p is filled.
pub fn fill_step(p: &[u64]) -> u32 {
    p.iter().fold(0u64, |acc, &c| acc | c).trailing_ones()
}

/// The word produced by the schedule, evaluated lazily. Positions outside
/// the box completed after `steps` steps use the same rule continued.
#[derive(Clone, Debug)]
pub struct ToeplitzWord {
    schedule: ToeplitzSchedule,
}

impl ToeplitzWord {
    pub fn schedule(&self) -> &ToeplitzSchedule {
        &self.schedule
    }
}

impl WordSource for ToeplitzWord {
    fn dimension(&self) -> usize {
        self.schedule.dimension
    }
    fn alphabet_size(&self) -> usize {
        self.schedule.alphabet
    }
    fn letter(&self, p: &[u64]) -> Letter {
        let n = fill_step(p);
        if n == 0 {
            return self.schedule.a;
        }
        let mask = (1u64 << n) - 1;
        let cell: Vec<u64> = p.iter().map(|c| c & mask).collect();
        self.schedule.fill_value(n, &cell)
    }
}

/// Explicit step-by-step filling of the period box [0,2^{steps+1})^d.
#[derive(Clone, Debug)]
pub struct ToeplitzGrid {
    side: u64,
    dimension: usize,
    cells: Vec<Option<Letter>>,
}

impl ToeplitzGrid {
    pub fn side(&self) -> u64 {
        self.side
    }

    pub fn get(&self, p: &[u64]) -> Option<Letter> {
        let mut idx = 0u64;
        let mut stride = 1u64;
        for &c in p {
            if c >= self.side {
                return None;
            }
            idx += c * stride;
            stride *= self.side;
        }
        self.cells[idx as usize]
    }

    fn index(&self, p: &[u64]) -> usize {
        let mut idx = 0u64;
        let mut stride = 1u64;
        for &c in p {
            idx += c * stride;
            stride *= self.side;
        }
        idx as usize
    }

    pub fn filled(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

fn materialize(sched: &ToeplitzSchedule) -> Result<ToeplitzGrid> {
    let d = sched.dimension;
    let side = 1u64 << (sched.steps + 1);
    let total = side
        .checked_pow(d as u32)
        .filter(|&t| t <= 1 << 26)
        .ok_or_else(|| Error::InvalidInput("grid too large to materialize".into()))?;
    let mut grid = ToeplitzGrid {
        side,
        dimension: d,
        cells: vec![None; total as usize],
    };
    for n in 0..=sched.steps {
        let base = 1u64 << n;
        let period = base << 1;
        let reps = side / period;
        let mut todo = Vec::new();
        for_each_in_box(&vec![base; d], |c| {
            if grid.get(c).is_none() {
                todo.push(c.to_vec());
            }
        });
        for c in todo {
            let v = sched.fill_value(n, &c);
            let mut err = None;
            for_each_in_box(&vec![reps; d], |k| {
                if err.is_some() {
                    return;
                }
                let p: Vec<u64> = c.iter().zip(k).map(|(ci, ki)| ci + ki * period).collect();
                let idx = grid.index(&p);
                match grid.cells[idx] {
                    None => grid.cells[idx] = Some(v),
                    Some(old) if old == v => {}
                    Some(old) => {
                        err = Some(Error::ConstructionBug {
                            position: p,
                            existing: old.0,
                            incoming: v.0,
                        })
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    debug_assert_eq!(grid.dimension, d);
    Ok(grid)
}

/// Runs the schedule explicitly, checks that no cell is written twice with
/// different letters and that the lazy evaluator agrees with every filled
/// cell, then returns both.
pub fn toeplitz_construct(sched: &ToeplitzSchedule) -> Result<(ToeplitzWord, ToeplitzGrid)> {
    sched.validate()?;
    let grid = materialize(sched)?;
    let word = ToeplitzWord {
        schedule: sched.clone(),
    };
    let complete = 1u64 << sched.steps;
    let mut bad = None;
    for_each_in_box(&vec![grid.side; sched.dimension], |p| {
        if bad.is_some() {
            return;
        }
        match grid.get(p) {
            Some(v) if v != word.letter(p) => bad = Some((p.to_vec(), v, word.letter(p))),
            None if p.iter().all(|&c| c < complete) => {
                bad = Some((p.to_vec(), Letter(u32::MAX), word.letter(p)))
            }
            _ => {}
        }
    });
    if let Some((position, existing, incoming)) = bad {
        return Err(Error::ConstructionBug {
            position,
            existing: existing.0,
            incoming: incoming.0,
        });
    }
    Ok((word, grid))
}
