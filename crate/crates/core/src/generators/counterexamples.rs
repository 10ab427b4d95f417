//! Words separating the recurrence notions: rows and columns recurrent but
//! not UR, UR with a non-recurrent row, and a URD-not-UR construction.

use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use super::sequences::fibonacci_word;
use crate::error::{Error, Result};
use crate::lattice::{for_each_in_box, gcd_all, Direction, FiniteWord, Letter, Size, WordSource};

/// Rows alternate 1F and 0F, F the Fibonacci word.
#[derive(Clone, Copy, Debug, Default)]
pub struct FibRows;

pub fn fib_rows_word() -> FibRows {
    FibRows
}

impl WordSource for FibRows {
    fn dimension(&self) -> usize {
        2
    }
    fn alphabet_size(&self) -> usize {
        2
    }
    fn letter(&self, p: &[u64]) -> Letter {
        match p[0] {
            0 => Letter(u32::from(p[1].is_multiple_of(2))),
            x => Letter(fibonacci_word(x - 1)),
        }
    }
}

/// Row 0 is 10^ω; row n ≥ 1 is (1 0^{2^k - 1})^ω with k the 2-adic
/// valuation of n.
#[derive(Clone, Copy, Debug, Default)]
pub struct ToeplitzRows;

pub fn toeplitz_rows_word() -> ToeplitzRows {
    ToeplitzRows
}

impl WordSource for ToeplitzRows {
    fn dimension(&self) -> usize {
        2
    }
    fn alphabet_size(&self) -> usize {
        2
    }
    fn letter(&self, p: &[u64]) -> Letter {
        let (x, y) = (p[0], p[1]);
        if y == 0 {
            return Letter(u32::from(x == 0));
        }
        let k = y.trailing_zeros();
        Letter(u32::from(x & ((1u64 << k) - 1) == 0))
    }
}

/// Parameters of the URD-not-UR construction on a finite box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UrdNotUrSchedule {
    pub seed: u64,
    /// Last step n; steps run from 1 to n.
    pub steps: u64,
    pub dimension: usize,
    /// Side of the box [0, extent)^d that is materialized.
    pub extent: u64,
    /// Upper bound for every b_q.
    pub cap: u64,
    /// Fill letter for prefix cells left empty; `None` draws 0/1 from the seed.
    pub fill: Option<Letter>,
}

impl UrdNotUrSchedule {
    pub fn new(steps: u64, extent: u64) -> Self {
        UrdNotUrSchedule {
            seed: 0,
            steps,
            dimension: 2,
            extent,
            cap: 1 << 20,
            fill: Some(Letter(0)),
        }
    }
}

/// What one step recorded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UrdStep {
    pub n: u64,
    /// Prefix p_n after completion.
    pub prefix: Vec<u32>,
    /// Greedy constants b_q, keyed by direction.
    pub constants: BTreeMap<Vec<u64>, u64>,
    /// Corner of the all-zero n^d block, if one fitted in the box.
    pub zero_block: Option<Vec<u64>>,
}

/// Result of the construction: a partially filled box plus the per-step
/// record. Best effort: it realizes the construction only inside the box.
#[derive(Clone, Debug, Serialize)]
pub struct UrdNotUrGrid {
    pub schedule: UrdNotUrSchedule,
    cells: Vec<Option<Letter>>,
    pub steps: Vec<UrdStep>,
}

impl UrdNotUrGrid {
    fn index(&self, p: &[u64]) -> Option<usize> {
        let e = self.schedule.extent;
        let mut idx = 0u64;
        let mut stride = 1u64;
        for &c in p {
            if c >= e {
                return None;
            }
            idx += c * stride;
            stride *= e;
        }
        Some(idx as usize)
    }

    pub fn get(&self, p: &[u64]) -> Option<Letter> {
        self.index(p).and_then(|i| self.cells[i])
    }

    pub fn filled(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Prefix p_n as a block (after step n it is complete).
    pub fn prefix(&self, n: u64) -> Option<FiniteWord> {
        let step = self.steps.iter().find(|s| s.n == n)?;
        let size = Size::cube(self.schedule.dimension, n).ok()?;
        FiniteWord::new(size, step.prefix.iter().map(|&x| Letter(x)).collect()).ok()
    }

    /// Directions q < (n,...,n) used at step n.
    pub fn directions(d: usize, n: u64) -> Vec<Direction> {
        let mut out = Vec::new();
        for_each_in_box(&vec![n; d], |c| {
            if c.iter().any(|&x| x > 0) && gcd_all(c) == 1 {
                out.push(Direction::new(c.to_vec()).expect("coprime"));
            }
        });
        out.sort();
        out
    }
}

/// Builds the URD-not-UR word on a finite box. Step 1 puts 1 at the origin.
/// Step n ≥ 2 completes the prefix p_n of size n^d, copies it at ℓ·b_q·q for
/// every direction q < (n,...,n) and ℓ ≥ 1 with the smallest b_q that does not
/// clash with filled cells, then writes an all-zero n^d block in an empty
/// region below the diagonal, as close to the origin as possible.
pub fn urd_not_ur_construct(sched: &UrdNotUrSchedule) -> Result<UrdNotUrGrid> {
    let d = sched.dimension;
    if d < 2 || sched.steps < 1 || sched.extent <= sched.steps {
        return Err(Error::InvalidInput(
            "need dimension >= 2, steps >= 1 and extent > steps".into(),
        ));
    }
    let total = sched
        .extent
        .checked_pow(d as u32)
        .filter(|&t| t <= 1 << 26)
        .ok_or_else(|| Error::InvalidInput("box too large".into()))?;
    let mut g = UrdNotUrGrid {
        schedule: sched.clone(),
        cells: vec![None; total as usize],
        steps: Vec::new(),
    };
    let origin = vec![0u64; d];
    let i0 = g.index(&origin).expect("origin in box");
    g.cells[i0] = Some(Letter(1));
    g.steps.push(UrdStep {
        n: 1,
        prefix: vec![1],
        constants: BTreeMap::new(),
        zero_block: None,
    });
    let mut rng = SplitMix64::seed_from_u64(sched.seed);
    for n in 2..=sched.steps {
        // Complete p_n.
        let mut prefix = Vec::new();
        let mut cells = Vec::new();
        for_each_in_box(&vec![n; d], |c| cells.push(c.to_vec()));
        for c in &cells {
            let idx = g.index(c).expect("prefix inside box");
            let v = match g.cells[idx] {
                Some(v) => v,
                None => {
                    let v = sched
                        .fill
                        .unwrap_or_else(|| Letter((rng.next_u64() & 1) as u32));
                    g.cells[idx] = Some(v);
                    v
                }
            };
            prefix.push(v);
        }
        let mut constants = BTreeMap::new();
        for q in UrdNotUrGrid::directions(d, n) {
            let b = greedy_b(&g, &cells, &prefix, &q, n, sched)?;
            place_copies(&mut g, &cells, &prefix, &q, b);
            constants.insert(q.coords().to_vec(), b);
        }
        let zero_block = place_zero_block(&mut g, n);
        g.steps.push(UrdStep {
            n,
            prefix: prefix.iter().map(|l| l.0).collect(),
            constants,
            zero_block,
        });
    }
    Ok(g)
}

fn copy_offsets(q: &Direction, b: u64, extent: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut l = 1u64;
    loop {
        let p: Vec<u64> = q.coords().iter().map(|&c| c * b * l).collect();
        if p.iter().any(|&c| c >= extent) {
            break;
        }
        out.push(p);
        l += 1;
    }
    out
}

fn greedy_b(
    g: &UrdNotUrGrid,
    cells: &[Vec<u64>],
    prefix: &[Letter],
    q: &Direction,
    n: u64,
    sched: &UrdNotUrSchedule,
) -> Result<u64> {
    let qmax = *q.coords().iter().max().expect("nonempty");
    let mut b = 1u64;
    while b <= sched.cap && b.saturating_mul(qmax) < sched.extent {
        let ok = copy_offsets(q, b, sched.extent).iter().all(|off| {
            cells.iter().zip(prefix).all(|(c, v)| {
                let p: Vec<u64> = c.iter().zip(off).map(|(a, o)| a + o).collect();
                match g.get(&p) {
                    None => true,
                    Some(x) => x == *v,
                }
            })
        });
        if ok {
            return Ok(b);
        }
        b += 1;
    }
    Err(Error::ScheduleExhausted {
        step: n,
        direction: q.coords().to_vec(),
        cap: sched.cap.min(sched.extent),
    })
}

fn place_copies(g: &mut UrdNotUrGrid, cells: &[Vec<u64>], prefix: &[Letter], q: &Direction, b: u64) {
    for off in copy_offsets(q, b, g.schedule.extent) {
        for (c, v) in cells.iter().zip(prefix) {
            let p: Vec<u64> = c.iter().zip(&off).map(|(a, o)| a + o).collect();
            if let Some(idx) = g.index(&p) {
                g.cells[idx] = Some(*v);
            }
        }
    }
}

fn place_zero_block(g: &mut UrdNotUrGrid, n: u64) -> Option<Vec<u64>> {
    let d = g.schedule.dimension;
    let e = g.schedule.extent;
    if e < n {
        return None;
    }
    let mut candidates = Vec::new();
    for_each_in_box(&vec![e - n + 1; d], |p| {
        // Entirely below the diagonal: first coordinate beats the others by n.
        if p[1..].iter().all(|&c| p[0] >= c + n) {
            candidates.push(p.to_vec());
        }
    });
    candidates.sort_by_key(|p| (p.iter().sum::<u64>(), p.clone()));
    for p in candidates {
        let mut empty = true;
        for_each_in_box(&vec![n; d], |c| {
            if empty {
                let q: Vec<u64> = p.iter().zip(c).map(|(a, b)| a + b).collect();
                empty = g.get(&q).is_none();
            }
        });
        if empty {
            for_each_in_box(&vec![n; d], |c| {
                let q: Vec<u64> = p.iter().zip(c).map(|(a, b)| a + b).collect();
                let idx = g.index(&q).expect("inside box");
                g.cells[idx] = Some(Letter(0));
            });
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::translate_origin;
    use crate::lattice::Position;

    #[test]
    fn fib_rows_bottom_rows() {
        let w = fib_rows_word();
        let row0: Vec<u32> = (0..9).map(|x| w.letter(&[x, 0]).0).collect();
        assert_eq!(row0, vec![1, 0, 1, 0, 0, 1, 0, 1, 0]);
        let t = translate_origin(w, &Position(vec![0, 1])).unwrap();
        let row: Vec<u32> = (0..9).map(|x| t.letter(&[x, 0]).0).collect();
        assert_eq!(row, vec![0, 0, 1, 0, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn fib_rows_prefix_only_at_column_zero() {
        let w = fib_rows_word();
        let f = FiniteWord::from_rows(&[&[1, 0], &[0, 0]]).unwrap();
        let mut scratch = [0u64; 2];
        for x in 0..64 {
            for y in 0..64 {
                let hit = crate::lattice::factor_matches(&w, &[x, y], &f, &mut scratch);
                assert_eq!(hit, x == 0 && y % 2 == 0, "({x},{y})");
            }
        }
    }

    #[test]
    fn toeplitz_rows_examples() {
        let w = toeplitz_rows_word();
        let r4: Vec<u32> = (0..8).map(|x| w.letter(&[x, 4]).0).collect();
        assert_eq!(r4, vec![1, 0, 0, 0, 1, 0, 0, 0]);
        let r0: Vec<u32> = (0..5).map(|x| w.letter(&[x, 0]).0).collect();
        assert_eq!(r0, vec![1, 0, 0, 0, 0]);
        let ones = (0..256).filter(|&x| w.letter(&[x, 0]).0 == 1).count();
        assert_eq!(ones, 1);
    }

    #[test]
    fn toeplitz_rows_prefix_periods() {
        let w = toeplitz_rows_word();
        for big_n in 1..=3u32 {
            let side = 1u64 << big_n;
            let per = side << 1;
            // Prefix of the word without row 0, i.e. rows 1..=side.
            for x in 0..side {
                for y in 1..=side {
                    let v = w.letter(&[x, y]);
                    for k in 1..4 {
                        assert_eq!(w.letter(&[x + k * per, y]), v);
                        assert_eq!(w.letter(&[x, y + k * per]), v);
                    }
                }
            }
        }
    }

    #[test]
    fn urd_not_ur_records_are_consistent() {
        let sched = UrdNotUrSchedule::new(5, 160);
        let g = urd_not_ur_construct(&sched).unwrap();
        assert_eq!(g.steps.len(), 5);
        for step in g.steps.iter().skip(1) {
            let n = step.n;
            let p = g.prefix(n).unwrap();
            for (q, &b) in &step.constants {
                let q = Direction::new(q.clone()).unwrap();
                for off in copy_offsets(&q, b, sched.extent) {
                    for_each_in_box(p.size().dims(), |c| {
                        let pos: Vec<u64> = c.iter().zip(&off).map(|(a, o)| a + o).collect();
                        if let Some(v) = g.get(&pos) {
                            assert_eq!(v, p.get(c), "step {n} dir {q} at {pos:?}");
                        } else {
                            assert!(pos.iter().any(|&x| x >= sched.extent));
                        }
                    });
                }
            }
            let z = step.zero_block.as_ref().expect("room for a zero block");
            for_each_in_box(&[n, n], |c| {
                assert_eq!(g.get(&[z[0] + c[0], z[1] + c[1]]), Some(Letter(0)));
            });
        }
    }

    #[test]
    fn urd_not_ur_later_prefixes_extend_earlier_ones() {
        let mut sched = UrdNotUrSchedule::new(5, 160);
        sched.fill = None;
        sched.seed = 11;
        let g = urd_not_ur_construct(&sched).unwrap();
        for n in 2..5u64 {
            let small = g.prefix(n).unwrap();
            let big = g.prefix(n + 1).unwrap();
            assert_eq!(big.restrict(small.size()).unwrap(), small);
        }
    }

    #[test]
    fn urd_not_ur_cap_exhausts() {
        let mut sched = UrdNotUrSchedule::new(5, 160);
        sched.cap = 1;
        assert!(matches!(
            urd_not_ur_construct(&sched),
            Err(Error::ScheduleExhausted { .. })
        ));
    }
}
