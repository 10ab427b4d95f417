//! Finite-horizon measurement of recurrence along directions.
//!
//! Verdicts are three-valued: a bound is witnessed inside the horizon, no
//! bound is witnessed, or a caller-supplied bound is exceeded. Nothing here
//! claims that an infinite word is or is not recurrent.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    factor_at, factor_matches, for_each_in_box, gcd_all, Direction, Letter, Position, Size,
    WordSource,
};

/// Truncation parameters for the empirical checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceBudget {
    /// Largest index ℓ scanned along a line.
    pub horizon: u64,
    /// Largest coordinate of a direction.
    pub direction_bound: u64,
    /// Largest extent of a prefix size.
    pub size_bound: u64,
    /// Largest coordinate of an origin.
    pub origin_bound: u64,
    /// Largest window side for UR scans.
    pub block_bound: u64,
}

impl Default for RecurrenceBudget {
    fn default() -> Self {
        RecurrenceBudget {
            horizon: 5000,
            direction_bound: 5,
            size_bound: 3,
            origin_bound: 3,
            block_bound: 256,
        }
    }
}

impl RecurrenceBudget {
    pub fn new(l: u64, q: u64, s: u64, p: u64, b: u64) -> Result<Self> {
        let budget = RecurrenceBudget {
            horizon: l,
            direction_bound: q,
            size_bound: s,
            origin_bound: p,
            block_bound: b,
        };
        budget.validate()?;
        Ok(budget)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0
            || self.direction_bound == 0
            || self.size_bound == 0
            || self.block_bound == 0
        {
            return Err(Error::InvalidInput("budget entries must be positive".into()));
        }
        Ok(())
    }
}

impl FromStr for RecurrenceBudget {
    type Err = Error;
    /// "L,Q,S,P,B".
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<u64> = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            &[l, q, sz, p, b] => RecurrenceBudget::new(l, q, sz, p, b),
            _ => Err(Error::Parse(format!("budget needs L,Q,S,P,B, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    BoundedWitnessed,
    NoRecurrenceInHorizon,
    GapExceedsClaim,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::BoundedWitnessed => "BOUNDED_WITNESSED",
            Verdict::NoRecurrenceInHorizon => "NO_RECURRENCE_IN_HORIZON",
            Verdict::GapExceedsClaim => "GAP_EXCEEDS_CLAIM",
        })
    }
}

/// Occurrences of the factor at `origin` along origin + ℓ·q, ℓ ≤ horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub direction: Direction,
    pub size: Size,
    pub origin: Position,
    pub horizon: u64,
    pub occurrences: Vec<u64>,
    /// Largest difference between consecutive occurrences.
    pub max_gap: Option<u64>,
    /// horizon − last occurrence.
    pub tail: u64,
    pub claim: Option<u64>,
    pub verdict: Verdict,
}

impl GapReport {
    fn severity(&self) -> (u8, u64) {
        let rank = match self.verdict {
            Verdict::BoundedWitnessed => 0,
            Verdict::NoRecurrenceInHorizon => 1,
            Verdict::GapExceedsClaim => 2,
        };
        (rank, self.max_gap.unwrap_or(0).max(self.tail))
    }

    /// Orders reports so that the worse one compares greater.
    pub fn worse_than(&self, other: &GapReport) -> bool {
        self.severity().cmp(&other.severity()) == Ordering::Greater
    }

    /// Drops the occurrence list, keeping the summary.
    pub fn summarized(mut self) -> GapReport {
        self.occurrences.clear();
        self.occurrences.shrink_to_fit();
        self
    }
}

fn classify(occ: &[u64], horizon: u64, claim: Option<u64>) -> (Option<u64>, u64, Verdict) {
    let max_gap = occ.windows(2).map(|w| w[1] - w[0]).max();
    let last = *occ.last().expect("ℓ = 0 always occurs");
    let tail = horizon - last;
    if let Some(c) = claim {
        if max_gap.is_some_and(|g| g > c) || tail >= c {
            return (max_gap, tail, Verdict::GapExceedsClaim);
        }
    }
    let verdict = match max_gap {
        Some(g) if tail <= g => Verdict::BoundedWitnessed,
        _ => Verdict::NoRecurrenceInHorizon,
    };
    (max_gap, tail, verdict)
}

fn check_dims<W: WordSource + ?Sized>(w: &W, q: &Direction, s: &Size, p: &Position) -> Result<()> {
    for found in [q.dimension(), s.dimension(), p.dimension()] {
        if found != w.dimension() {
            return Err(Error::DimensionError {
                expected: w.dimension(),
                found,
            });
        }
    }
    Ok(())
}

/// All ℓ ≤ horizon with factorAt(w, p+ℓq, s) = factorAt(w, p, s).
pub fn occurrence_indices<W: WordSource + ?Sized>(
    w: &W,
    q: &Direction,
    s: &Size,
    p: &Position,
    horizon: u64,
) -> Result<Vec<u64>> {
    check_dims(w, q, s, p)?;
    let far = q.scaled(horizon)?;
    p.checked_add(far.coords())?.checked_add(s.dims())?;
    let f = factor_at(w, p, s)?;
    let d = w.dimension();
    let mut scratch = vec![0u64; d];
    let mut pos = p.coords().to_vec();
    let mut out = vec![0u64];
    for l in 1..=horizon {
        for j in 0..d {
            pos[j] += q.coords()[j];
        }
        if factor_matches(w, &pos, &f, &mut scratch) {
            out.push(l);
        }
    }
    Ok(out)
}

/// Occurrence scan plus verdict. `claim` is a bound the caller expects to hold.
pub fn gap_report<W: WordSource + ?Sized>(
    w: &W,
    q: &Direction,
    s: &Size,
    p: &Position,
    horizon: u64,
    claim: Option<u64>,
) -> Result<GapReport> {
    let occurrences = occurrence_indices(w, q, s, p, horizon)?;
    let (max_gap, tail, verdict) = classify(&occurrences, horizon, claim);
    Ok(GapReport {
        direction: q.clone(),
        size: s.clone(),
        origin: p.clone(),
        horizon,
        occurrences,
        max_gap,
        tail,
        claim,
        verdict,
    })
}

/// Coprime nonzero tuples with coordinates ≤ bound, lexicographic order.
pub fn enumerate_directions(d: usize, bound: u64) -> Vec<Direction> {
    let mut out = Vec::new();
    for_each_in_box(&vec![bound + 1; d], |c| {
        if c.iter().any(|&x| x > 0) && gcd_all(c) == 1 {
            out.push(Direction::new(c.to_vec()).expect("coprime"));
        }
    });
    out.sort();
    out
}

/// Claimed gap bound as a function of the prefix size.
pub type Claim<'a> = &'a (dyn Fn(&Size) -> u64 + Sync);

/// One report per (direction, size), origin 0.
pub fn check_urd<W: WordSource + ?Sized>(
    w: &W,
    budget: &RecurrenceBudget,
    claim: Option<Claim<'_>>,
) -> Result<Vec<GapReport>> {
    budget.validate()?;
    let d = w.dimension();
    let origin = Position::origin(d);
    let jobs: Vec<(Direction, Size)> = enumerate_directions(d, budget.direction_bound)
        .into_iter()
        .flat_map(|q| {
            Size::all_up_to(d, budget.size_bound)
                .into_iter()
                .map(move |s| (q.clone(), s))
        })
        .collect();
    jobs.par_iter()
        .map(|(q, s)| {
            gap_report(w, q, s, &origin, budget.horizon, claim.map(|c| c(s)))
                .map(GapReport::summarized)
        })
        .collect()
}

/// Worst behaviour over directions (and origins) for one prefix size.
#[derive(Clone, Debug, Serialize)]
pub struct SizeSummary {
    pub size: Size,
    /// Largest witnessed gap when every line got BOUNDED_WITNESSED.
    pub bound: Option<u64>,
    pub verdict: Verdict,
    pub lines: usize,
    pub worst: GapReport,
}

fn summarize(size: Size, reports: Vec<GapReport>) -> SizeSummary {
    let lines = reports.len();
    let worst = reports
        .iter()
        .fold(None::<&GapReport>, |acc, r| match acc {
            Some(a) if !r.worse_than(a) => Some(a),
            _ => Some(r),
        })
        .expect("at least one line")
        .clone();
    let all_bounded = reports.iter().all(|r| r.verdict == Verdict::BoundedWitnessed);
    let bound = all_bounded.then(|| reports.iter().filter_map(|r| r.max_gap).max().unwrap_or(0));
    SizeSummary {
        size,
        bound,
        verdict: worst.verdict,
        lines,
        worst,
    }
}

fn check_uniform<W: WordSource + ?Sized>(
    w: &W,
    budget: &RecurrenceBudget,
    claim: Option<Claim<'_>>,
    origins: &[Position],
) -> Result<Vec<SizeSummary>> {
    budget.validate()?;
    let d = w.dimension();
    let dirs = enumerate_directions(d, budget.direction_bound);
    Size::all_up_to(d, budget.size_bound)
        .into_iter()
        .map(|s| {
            let c = claim.map(|f| f(&s));
            let jobs: Vec<(&Direction, &Position)> =
                dirs.iter().flat_map(|q| origins.iter().map(move |p| (q, p))).collect();
            let reports = jobs
                .par_iter()
                .map(|(q, p)| gap_report(w, q, &s, p, budget.horizon, c).map(GapReport::summarized))
                .collect::<Result<Vec<_>>>()?;
            Ok(summarize(s, reports))
        })
        .collect()
}

/// Per size, the worst line over all directions from the origin.
pub fn check_surd<W: WordSource + ?Sized>(
    w: &W,
    budget: &RecurrenceBudget,
    claim: Option<Claim<'_>>,
) -> Result<Vec<SizeSummary>> {
    check_uniform(w, budget, claim, &[Position::origin(w.dimension())])
}

/// Per size, the worst line over all directions and all origins ≤ P.
pub fn check_ssurdo<W: WordSource + ?Sized>(
    w: &W,
    budget: &RecurrenceBudget,
    claim: Option<Claim<'_>>,
) -> Result<Vec<SizeSummary>> {
    let d = w.dimension();
    let mut origins = Vec::new();
    for_each_in_box(&vec![budget.origin_bound + 1; d], |c| {
        origins.push(Position(c.to_vec()))
    });
    origins.sort();
    check_uniform(w, budget, claim, &origins)
}

/// Result of a UR window scan for one prefix size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UrReport {
    pub size: Size,
    /// Smallest b such that every b^d block with corner in [0,B]^d contains
    /// the prefix; `None` if no b ≤ B works.
    pub window: Option<u64>,
}

/// Smallest window for one prefix size.
pub fn ur_window<W: WordSource + ?Sized>(w: &W, s: &Size, block_bound: u64) -> Result<Option<u64>> {
    let d = w.dimension();
    if s.dimension() != d {
        return Err(Error::DimensionError {
            expected: d,
            found: s.dimension(),
        });
    }
    if s.max_extent() > block_bound {
        return Ok(None);
    }
    // Occurrence corners o need o + s ≤ 2B in every coordinate.
    let side = 2 * block_bound;
    let cells = (side + 1)
        .checked_pow(d as u32)
        .filter(|&n| n <= 1 << 27)
        .ok_or_else(|| Error::InvalidInput("UR scan region too large".into()))?;
    let stride: Vec<u64> = (0..d).map(|j| (side + 1).pow(j as u32)).collect();
    let prefix = factor_at(w, &Position::origin(d), s)?;
    let ext: Vec<u64> = s.dims().iter().map(|&sj| side - sj + 1).collect();
    let hits: Vec<(Vec<u64>, bool)> = {
        let mut pts = Vec::new();
        for_each_in_box(&ext, |o| pts.push(o.to_vec()));
        pts.into_par_iter()
            .map(|o| {
                let mut scratch = vec![0u64; d];
                let hit = factor_matches(w, &o, &prefix, &mut scratch);
                (o, hit)
            })
            .collect()
    };
    // Summed-area table with a zero border: sat[x+1] = count in [0, x].
    let mut sat = vec![0u32; cells as usize];
    for (o, hit) in &hits {
        if *hit {
            let idx: u64 = o.iter().zip(&stride).map(|(c, st)| (c + 1) * st).sum();
            sat[idx as usize] = 1;
        }
    }
    for j in 0..d {
        let mut pts = Vec::new();
        for_each_in_box(&vec![side + 1; d], |c| {
            if c[j] > 0 {
                pts.push(c.iter().zip(&stride).map(|(a, b)| a * b).sum::<u64>() as usize);
            }
        });
        // Box order has coordinate j increasing for fixed others.
        for idx in pts {
            sat[idx] += sat[idx - stride[j] as usize];
        }
    }
    let count = |lo: &[u64], hi: &[u64]| -> u64 {
        // Inclusive box [lo, hi], via inclusion–exclusion on 2^d corners.
        let mut total: i64 = 0;
        for mask in 0u32..(1 << d) {
            let mut idx = 0u64;
            let mut sign = 1i64;
            for j in 0..d {
                if mask & (1 << j) != 0 {
                    idx += lo[j] * stride[j];
                    sign = -sign;
                } else {
                    idx += (hi[j] + 1) * stride[j];
                }
            }
            total += sign * sat[idx as usize] as i64;
        }
        total as u64
    };
    let ok = |b: u64| -> bool {
        let mut good = true;
        let mut hi = vec![0u64; d];
        for_each_in_box(&vec![block_bound + 1; d], |c| {
            if !good {
                return;
            }
            for j in 0..d {
                hi[j] = c[j] + b - s.dims()[j];
            }
            good = count(c, &hi) > 0;
        });
        good
    };
    let (mut lo, mut hi) = (s.max_extent(), block_bound);
    if !ok(hi) {
        return Ok(None);
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// UR window scan for every prefix size with extents ≤ S.
pub fn check_ur<W: WordSource + ?Sized>(w: &W, budget: &RecurrenceBudget) -> Result<Vec<UrReport>> {
    budget.validate()?;
    Size::all_up_to(w.dimension(), budget.size_bound)
        .into_iter()
        .map(|s| {
            let window = ur_window(w, &s, budget.block_bound)?;
            Ok(UrReport { size: s, window })
        })
        .collect()
}

/// Longest run of equal letters in ℓ ↦ w(ℓq), ℓ ≤ horizon: (start, length).
pub fn longest_constant_run<W: WordSource + ?Sized>(
    w: &W,
    q: &Direction,
    horizon: u64,
) -> Result<(u64, u64)> {
    if q.dimension() != w.dimension() {
        return Err(Error::DimensionError {
            expected: w.dimension(),
            found: q.dimension(),
        });
    }
    q.scaled(horizon)?;
    let mut best = (0u64, 1u64);
    let mut start = 0u64;
    let mut prev: Option<Letter> = None;
    for l in 0..=horizon {
        let a = w.letter(q.scaled(l)?.coords());
        if prev != Some(a) {
            start = l;
            prev = Some(a);
        }
        let len = l - start + 1;
        if len > best.1 {
            best = (start, len);
        }
    }
    Ok(best)
}
