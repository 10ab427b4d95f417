//! Codings of irrational rotations of the circle.
//!
//! A position p is sent to (ρ + p·α) mod 1 and coded by the interval of a
//! fixed partition containing it. Membership is decided with f64 enclosures
//! when they are conclusive and with exact arithmetic otherwise.

mod quadext;

pub use quadext::{qext_compare, rational_independence_check, Approx, QuadExt};

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{for_each_in_box, gcd_all, Direction, FiniteWord, Letter, WordSource};

/// Which endpoint of each interval is included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Orientation {
    /// [a, b)
    Lower,
    /// (a, b]
    Upper,
}

/// Cuts 0 < c_1 < … < c_{k−1} < 1; interval j runs from c_j to c_{j+1}
/// with c_0 = 0, c_k = 1, and codes letter j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalPartition {
    cuts: Vec<QuadExt>,
    orientation: Orientation,
}

impl IntervalPartition {
    pub fn new(cuts: Vec<QuadExt>, orientation: Orientation) -> Result<Self> {
        let mut prev = QuadExt::zero();
        for c in &cuts {
            if *c <= prev {
                return Err(Error::InvalidInput(format!(
                    "cuts must increase strictly inside (0,1): {c}"
                )));
            }
            prev = c.clone();
        }
        if prev >= QuadExt::one() && !cuts.is_empty() {
            return Err(Error::InvalidInput("cuts must lie below 1".into()));
        }
        Ok(IntervalPartition { cuts, orientation })
    }

    pub fn cuts(&self) -> &[QuadExt] {
        &self.cuts
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn letters(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Endpoints (c_j, c_{j+1}).
    pub fn interval(&self, j: usize) -> Interval {
        let lo = if j == 0 { QuadExt::zero() } else { self.cuts[j - 1].clone() };
        let hi = self.cuts.get(j).cloned().unwrap_or_else(QuadExt::one);
        Interval { lo, hi }
    }

    pub fn interval_set(&self, j: usize) -> IntervalSet {
        IntervalSet {
            orientation: self.orientation,
            pieces: vec![self.interval(j)],
        }
    }

    pub fn min_length(&self) -> QuadExt {
        (0..self.letters())
            .map(|j| self.interval(j).length())
            .min()
            .expect("at least one interval")
    }

    /// Letter coding x ∈ [0,1) (LOWER) or x ∈ (0,1] (UPPER).
    fn code_exact(&self, x: &QuadExt) -> Letter {
        let n = match self.orientation {
            Orientation::Lower => self.cuts.iter().take_while(|c| *c <= x).count(),
            Orientation::Upper => self.cuts.iter().take_while(|c| *c < x).count(),
        };
        Letter(n as u32)
    }
}

/// Representative of x mod 1 in [0,1) (LOWER) or (0,1] (UPPER).
pub fn circle_point(x: &QuadExt, orientation: Orientation) -> QuadExt {
    let f = x.mod1();
    match orientation {
        Orientation::Upper if f.is_zero() => QuadExt::one(),
        _ => f,
    }
}

/// Decides the count of `cuts` below y, or None if an enclosure touches a
/// cut or the integer boundary.
fn approx_code(value: f64, error: f64, cuts: &[Approx]) -> Option<u32> {
    let y = value - value.floor();
    if y <= error || y >= 1.0 - error {
        return None;
    }
    let mut n = 0;
    for c in cuts {
        let gap = error + c.error;
        if y > c.value + gap {
            n += 1;
        } else if y >= c.value - gap {
            return None;
        }
    }
    Some(n)
}

/// d-dimensional rotation word w(p) = j ⇔ (ρ + p·α) mod 1 ∈ I_j.
#[derive(Clone, Debug)]
pub struct RotationWordSpec {
    alpha: Vec<QuadExt>,
    rho: QuadExt,
    partition: IntervalPartition,
    fast: Option<(Vec<Approx>, Approx, Vec<Approx>)>,
}

impl PartialEq for RotationWordSpec {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.rho == other.rho && self.partition == other.partition
    }
}

#[derive(Serialize, Deserialize)]
struct RotationJson {
    alpha: Vec<QuadExt>,
    rho: QuadExt,
    cuts: Vec<QuadExt>,
    orientation: Orientation,
}

impl RotationWordSpec {
    pub fn new(alpha: Vec<QuadExt>, rho: QuadExt, partition: IntervalPartition) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidInput("need at least one angle".into()));
        }
        let unit = |x: &QuadExt| *x >= QuadExt::zero() && *x < QuadExt::one();
        if !alpha.iter().all(unit) || !unit(&rho) {
            return Err(Error::InvalidInput("angles and ρ must lie in [0,1)".into()));
        }
        if !rational_independence_check(&alpha) {
            return Err(Error::InvalidInput(
                "1, α_1, …, α_d are not rationally independent".into(),
            ));
        }
        let fast = (|| {
            let a = alpha.iter().map(QuadExt::approx).collect::<Option<Vec<_>>>()?;
            let r = rho.approx()?;
            let c = partition.cuts.iter().map(QuadExt::approx).collect::<Option<Vec<_>>>()?;
            Some((a, r, c))
        })();
        Ok(RotationWordSpec {
            alpha,
            rho,
            partition,
            fast,
        })
    }

    /// The two-letter word with I_0 = [0, α_1), I_1 = [α_1, 1), ρ = 0.
    pub fn sturmian(alpha: Vec<QuadExt>) -> Result<Self> {
        let cut = alpha
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidInput("need at least one angle".into()))?;
        let part = IntervalPartition::new(vec![cut], Orientation::Lower)?;
        RotationWordSpec::new(alpha, QuadExt::zero(), part)
    }

    /// α = (√2−1, √3−1), the default two-dimensional example.
    pub fn default_sturmian() -> Self {
        let a1 = &QuadExt::sqrt(2) - &QuadExt::one();
        let a2 = &QuadExt::sqrt(3) - &QuadExt::one();
        RotationWordSpec::sturmian(vec![a1, a2]).expect("valid angles")
    }

    pub fn alpha(&self) -> &[QuadExt] {
        &self.alpha
    }

    pub fn rho(&self) -> &QuadExt {
        &self.rho
    }

    pub fn partition(&self) -> &IntervalPartition {
        &self.partition
    }

    /// ρ + Σ p_j α_j, exactly.
    pub fn point(&self, p: &[u64]) -> QuadExt {
        let mut x = self.rho.clone();
        for (a, &c) in self.alpha.iter().zip(p) {
            if c != 0 {
                x = &x + &a.scale(&c.into());
            }
        }
        x
    }

    /// q·α mod 1.
    pub fn rotation_angle(&self, q: &[u64]) -> QuadExt {
        let mut x = QuadExt::zero();
        for (a, &c) in self.alpha.iter().zip(q) {
            x = &x + &a.scale(&c.into());
        }
        x.mod1()
    }

    /// The one-dimensional rotation word read along q from ρ.
    pub fn along(&self, q: &Direction) -> Result<RotationWordSpec> {
        if q.dimension() != self.dimension() {
            return Err(Error::DimensionError {
                expected: self.dimension(),
                found: q.dimension(),
            });
        }
        RotationWordSpec::new(
            vec![self.rotation_angle(q.coords())],
            self.rho.clone(),
            self.partition.clone(),
        )
    }

    pub fn rotation_letter(&self, p: &[u64]) -> Letter {
        if let Some((a, r, c)) = &self.fast {
            let mut v = r.value;
            let mut err = r.error;
            let mut mag = r.value.abs();
            for (aj, &pj) in a.iter().zip(p) {
                let pf = pj as f64;
                v += pf * aj.value;
                err += pf * aj.error;
                mag += pf * aj.value.abs();
            }
            let bound = 2.0 * (err + (p.len() as f64 + 3.0) * f64::EPSILON * mag);
            if pf_exact(p) {
                if let Some(n) = approx_code(v, bound, c) {
                    return Letter(n);
                }
            }
        }
        let x = circle_point(&self.point(p), self.partition.orientation);
        self.partition.code_exact(&x)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RotationJson {
            alpha: self.alpha.clone(),
            rho: self.rho.clone(),
            cuts: self.partition.cuts.clone(),
            orientation: self.partition.orientation,
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: RotationJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        RotationWordSpec::new(j.alpha, j.rho, IntervalPartition::new(j.cuts, j.orientation)?)
    }
}

fn pf_exact(p: &[u64]) -> bool {
    p.iter().all(|&c| c < 1 << 53)
}

impl WordSource for RotationWordSpec {
    fn dimension(&self) -> usize {
        self.alpha.len()
    }
    fn alphabet_size(&self) -> usize {
        self.partition.letters()
    }
    fn letter(&self, p: &[u64]) -> Letter {
        self.rotation_letter(p)
    }
}

/// Endpoints 0 ≤ lo < hi ≤ 1; which end is closed depends on the
/// surrounding orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: QuadExt,
    pub hi: QuadExt,
}

impl Interval {
    pub fn length(&self) -> QuadExt {
        &self.hi - &self.lo
    }

    fn contains(&self, x: &QuadExt, o: Orientation) -> bool {
        match o {
            Orientation::Lower => self.lo <= *x && *x < self.hi,
            Orientation::Upper => self.lo < *x && *x <= self.hi,
        }
    }
}

/// Disjoint intervals on the circle, sorted, cut at 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSet {
    orientation: Orientation,
    pieces: Vec<Interval>,
}

impl IntervalSet {
    pub fn full(orientation: Orientation) -> Self {
        IntervalSet {
            orientation,
            pieces: vec![Interval {
                lo: QuadExt::zero(),
                hi: QuadExt::one(),
            }],
        }
    }

    pub fn empty(orientation: Orientation) -> Self {
        IntervalSet {
            orientation,
            pieces: Vec::new(),
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Number of connected components on the circle; a piece ending at 1
    /// and one starting at 0 count once.
    pub fn components(&self) -> usize {
        let n = self.pieces.len();
        if n >= 2 && self.pieces[0].lo.is_zero() && self.pieces[n - 1].hi == QuadExt::one() {
            n - 1
        } else {
            n
        }
    }

    pub fn contains(&self, x: &QuadExt) -> bool {
        let y = circle_point(x, self.orientation);
        self.pieces.iter().any(|iv| iv.contains(&y, self.orientation))
    }

    /// Points x with (x + t) mod 1 in the set.
    pub fn preimage(&self, t: &QuadExt) -> IntervalSet {
        let mut pieces = Vec::new();
        let one = QuadExt::one();
        for iv in &self.pieces {
            let lo = (&iv.lo - t).mod1();
            let hi = &lo + &iv.length();
            if hi <= one {
                pieces.push(Interval { lo, hi });
            } else {
                pieces.push(Interval {
                    lo,
                    hi: one.clone(),
                });
                pieces.push(Interval {
                    lo: QuadExt::zero(),
                    hi: &hi - &one,
                });
            }
        }
        IntervalSet::canonical(self.orientation, pieces)
    }

    pub fn intersect(&self, other: &IntervalSet) -> Result<IntervalSet> {
        if self.orientation != other.orientation {
            return Err(Error::InvalidInput("orientations differ".into()));
        }
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let lo = std::cmp::max(&a.lo, &b.lo);
                let hi = std::cmp::min(&a.hi, &b.hi);
                if lo < hi {
                    pieces.push(Interval {
                        lo: lo.clone(),
                        hi: hi.clone(),
                    });
                }
            }
        }
        Ok(IntervalSet::canonical(self.orientation, pieces))
    }

    fn canonical(orientation: Orientation, mut pieces: Vec<Interval>) -> IntervalSet {
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(pieces.len());
        for iv in pieces {
            match out.last_mut() {
                Some(last) if last.hi >= iv.lo => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet {
            orientation,
            pieces: out,
        }
    }
}

/// I_f: starting points x whose orbit codes the block f.
pub fn factor_interval_set(spec: &RotationWordSpec, f: &FiniteWord) -> Result<IntervalSet> {
    if f.dimension() != spec.dimension() {
        return Err(Error::DimensionError {
            expected: spec.dimension(),
            found: f.dimension(),
        });
    }
    let k = spec.alphabet_size();
    let o = spec.partition.orientation;
    let mut acc = IntervalSet::full(o);
    let mut err = None;
    for_each_in_box(f.size().dims(), |i| {
        if err.is_some() || acc.is_empty() {
            return;
        }
        let a = f.get(i);
        if a.0 as usize >= k {
            err = Some(Error::LetterOutOfRange {
                letter: a.0,
                alphabet: k,
            });
            return;
        }
        let t = spec.rotation_angle(i);
        let pre = spec.partition.interval_set(a.0 as usize).preimage(&t);
        acc = acc.intersect(&pre).expect("same orientation");
    });
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

/// f occurs somewhere in the word iff I_f is nonempty.
pub fn factor_occurs(spec: &RotationWordSpec, f: &FiniteWord) -> Result<bool> {
    Ok(!factor_interval_set(spec, f)?.is_empty())
}

/// f occurs at p iff ρ + p·α mod 1 lies in I_f.
pub fn occurs_at(spec: &RotationWordSpec, f: &FiniteWord, p: &[u64]) -> Result<bool> {
    if p.len() != spec.dimension() {
        return Err(Error::DimensionError {
            expected: spec.dimension(),
            found: p.len(),
        });
    }
    Ok(factor_interval_set(spec, f)?.contains(&spec.point(p)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreeGapReport {
    pub visits: usize,
    pub first_visit: u64,
    pub gaps: BTreeSet<u64>,
    /// At most three distinct gaps.
    pub holds: bool,
}

/// Gaps between successive ℓ ≤ horizon with ℓδ mod 1 in `interval`.
pub fn three_gap_analysis(
    delta: &QuadExt,
    interval: &Interval,
    orientation: Orientation,
    horizon: u64,
) -> Result<ThreeGapReport> {
    if delta.is_rational() {
        return Err(Error::InvalidInput("δ must be irrational".into()));
    }
    let zero = QuadExt::zero();
    let one = QuadExt::one();
    if interval.lo < zero || interval.hi > one || interval.lo >= interval.hi {
        return Err(Error::InvalidInput("interval must satisfy 0 ≤ lo < hi ≤ 1".into()));
    }
    let d = delta.mod1();
    let fast = match (d.approx(), interval.lo.approx(), interval.hi.approx()) {
        (Some(a), Some(lo), Some(hi)) => Some((a, [lo, hi])),
        _ => None,
    };
    let member = |l: u64| -> bool {
        if let Some((a, cuts)) = &fast {
            let v = l as f64 * a.value;
            let e = 2.0 * (l as f64 * a.error + 4.0 * f64::EPSILON * v.abs());
            // Inside iff exactly one endpoint lies below (away from ties);
            // lo = 0 or hi = 1 fall on the integer boundary check.
            if l < 1 << 53 {
                if let Some(n) = approx_code(v, e, cuts) {
                    return n == 1;
                }
            }
        }
        let x = circle_point(&d.scale(&l.into()), orientation);
        interval.contains(&x, orientation)
    };
    let mut visits = 0usize;
    let mut first = None;
    let mut last = 0u64;
    let mut gaps = BTreeSet::new();
    for l in 0..=horizon {
        if member(l) {
            visits += 1;
            match first {
                None => first = Some(l),
                Some(_) => {
                    gaps.insert(l - last);
                }
            }
            last = l;
        }
    }
    let first_visit = first.ok_or(Error::EmptyVisit(horizon))?;
    let holds = gaps.len() <= 3;
    Ok(ThreeGapReport {
        visits,
        first_visit,
        gaps,
        holds,
    })
}

/// Direction q = (q_1, N, …, N) with q·α mod 1 < (shortest interval)/N,
/// so ℓ·q·α stays inside the interval of ρ's neighbourhood for ℓ ≤ N.
pub fn surd_failure_direction(spec: &RotationWordSpec, n: u64, search_cap: u64) -> Result<Direction> {
    let d = spec.dimension();
    if d < 2 {
        return Err(Error::NotApplicable("needs dimension at least 2".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let target = spec.partition.min_length().div_integer(n as i64)?;
    for q1 in 0..=search_cap {
        let mut q = vec![n; d];
        q[0] = q1;
        if gcd_all(&q) != 1 {
            continue;
        }
        if spec.rotation_angle(&q).cmp(&target) == Ordering::Less {
            return Direction::new(q);
        }
    }
    Err(Error::NotFound(search_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{factor_at, Position, Size};
    use crate::recurrence::longest_constant_run;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    #[test]
    fn sturmian_letters() {
        let w = RotationWordSpec::default_sturmian();
        assert_eq!(w.letter(&[0, 0]), Letter(0));
        // α_1 ∈ [0, α_1) fails, so (1,0) lands in the second interval.
        assert_eq!(w.letter(&[1, 0]), Letter(1));
        assert_eq!(w.letter(&[0, 1]), Letter(1));
        for x in 0..40u64 {
            for y in 0..40u64 {
                let v = x as f64 * (2f64.sqrt() - 1.0) + y as f64 * (3f64.sqrt() - 1.0);
                let frac = v - v.floor();
                let expect = u32::from(frac >= 2f64.sqrt() - 1.0);
                assert_eq!(w.letter(&[x, y]).0, expect, "({x},{y})");
            }
        }
    }

    #[test]
    fn upper_orientation_at_cut() {
        let a = q("sqrt2-1");
        let part = IntervalPartition::new(vec![a.clone()], Orientation::Upper).unwrap();
        let w = RotationWordSpec::new(vec![a], QuadExt::zero(), part).unwrap();
        // 0 ≡ 1 sits in (α,1]; α itself sits in (0,α].
        assert_eq!(w.letter(&[0]), Letter(1));
        assert_eq!(w.letter(&[1]), Letter(0));
    }

    #[test]
    fn rejects_dependent_angles() {
        let a = vec![q("sqrt(2)/2"), q("1-sqrt(2)/2")];
        assert!(RotationWordSpec::sturmian(a).is_err());
        assert!(RotationWordSpec::sturmian(vec![q("1/2")]).is_err());
        assert!(IntervalPartition::new(vec![q("1/2"), q("1/3")], Orientation::Lower).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let w = RotationWordSpec::default_sturmian();
        let back = RotationWordSpec::from_json(&w.to_json()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn single_letter_interval_sets() {
        let w = RotationWordSpec::default_sturmian();
        for j in 0..2u32 {
            let f = FiniteWord::from_rows(&[&[j]]).unwrap();
            let s = factor_interval_set(&w, &f).unwrap();
            assert_eq!(s, w.partition().interval_set(j as usize));
            assert_eq!(s.components(), 1);
        }
    }

    #[test]
    fn horizontal_11_interval() {
        let w = RotationWordSpec::default_sturmian();
        let f = FiniteWord::from_rows(&[&[1, 1]]).unwrap();
        let s = factor_interval_set(&w, &f).unwrap();
        // [α,1) ∩ [1−α... ) computed by hand: x ≥ α and x + α mod 1 ≥ α,
        // i.e. x ∈ [α, 1−α).
        let a = q("sqrt2-1");
        assert_eq!(
            s.pieces(),
            &[Interval {
                lo: a.clone(),
                hi: &QuadExt::one() - &a
            }]
        );
        for x in 0..60u64 {
            for y in 0..60u64 {
                let brute = w.letter(&[x, y]) == Letter(1) && w.letter(&[x + 1, y]) == Letter(1);
                assert_eq!(occurs_at(&w, &f, &[x, y]).unwrap(), brute);
            }
        }
    }

    #[test]
    fn factors_of_sample_occur() {
        let w = RotationWordSpec::default_sturmian();
        let s = Size::new(vec![2, 2]).unwrap();
        let mut seen = BTreeSet::new();
        for x in 0..40u64 {
            for y in 0..40u64 {
                seen.insert(factor_at(&w, &Position(vec![x, y]), &s).unwrap());
            }
        }
        for f in &seen {
            assert!(factor_occurs(&w, f).unwrap());
        }
        // All 16 binary 2×2 blocks: those never seen in a larger sample must
        // have an empty interval set.
        let mut big = BTreeSet::new();
        for x in 0..200u64 {
            for y in 0..200u64 {
                big.insert(factor_at(&w, &Position(vec![x, y]), &s).unwrap());
            }
        }
        let mut absent = 0;
        for code in 0u32..16 {
            let f = FiniteWord::from_rows(&[&[code & 1, (code >> 1) & 1], &[(code >> 2) & 1, code >> 3]])
                .unwrap();
            let occurs = factor_occurs(&w, &f).unwrap();
            assert_eq!(occurs, big.contains(&f), "{f}");
            absent += usize::from(!occurs);
        }
        assert!(absent > 0);
        // Impossible letter pattern: n(f) = 0.
        let f = FiniteWord::from_rows(&[&[0, 0], &[1, 1]]).unwrap();
        let _ = factor_interval_set(&w, &f).unwrap().components();
    }

    #[test]
    fn along_direction_is_one_dimensional_rotation() {
        let w = RotationWordSpec::default_sturmian();
        for c in [[1u64, 0], [1, 1], [2, 3], [4, 1]] {
            let dq = Direction::new(c.to_vec()).unwrap();
            let one = w.along(&dq).unwrap();
            for l in 0..10_000u64 {
                assert_eq!(
                    one.letter(&[l]),
                    w.letter(dq.scaled(l).unwrap().coords()),
                    "q={c:?} ℓ={l}"
                );
            }
        }
    }

    #[test]
    fn three_gap_examples() {
        let phi = q("sqrt(5)/2-1/2");
        let r = three_gap_analysis(
            &phi,
            &Interval {
                lo: QuadExt::zero(),
                hi: phi.clone(),
            },
            Orientation::Lower,
            10_000,
        )
        .unwrap();
        assert!(r.holds);
        assert_eq!(r.gaps, BTreeSet::from([1, 2]));
        let full = Interval {
            lo: QuadExt::zero(),
            hi: QuadExt::one(),
        };
        let r = three_gap_analysis(&phi, &full, Orientation::Lower, 10_000).unwrap();
        assert_eq!(r.gaps, BTreeSet::from([1]));
        let r = three_gap_analysis(
            &q("sqrt2-1"),
            &Interval {
                lo: QuadExt::zero(),
                hi: q("1/10"),
            },
            Orientation::Lower,
            10_000,
        )
        .unwrap();
        assert!(r.holds && r.gaps.len() <= 3);
        let tiny = Interval {
            lo: q("1/2"),
            hi: q("1/2+1/1000000000"),
        };
        assert!(matches!(
            three_gap_analysis(&q("sqrt2-1"), &tiny, Orientation::Lower, 10),
            Err(Error::EmptyVisit(10))
        ));
        assert!(three_gap_analysis(&q("1/3"), &full, Orientation::Lower, 10).is_err());
    }

    #[test]
    fn surd_failure_runs() {
        let w = RotationWordSpec::default_sturmian();
        for n in [1u64, 5, 10, 20] {
            let d = surd_failure_direction(&w, n, 100_000).unwrap();
            assert_eq!(d.coords()[1], n);
            let (_, len) = longest_constant_run(&w, &d, 4 * n).unwrap();
            assert!(len >= n, "N={n} q={d} run={len}");
        }
        let one_d = w.along(&Direction::new(vec![1, 0]).unwrap()).unwrap();
        assert!(surd_failure_direction(&one_d, 5, 10).is_err());
        assert!(matches!(surd_failure_direction(&w, 1000, 3), Err(Error::NotFound(3))));
    }

    proptest! {
        #[test]
        fn preimage_membership(a in 1i64..99, b in 1i64..99, t in 0i64..50, x in 0i64..1000) {
            prop_assume!(a < b);
            let iv = IntervalSet {
                orientation: Orientation::Lower,
                pieces: vec![Interval { lo: QuadExt::rational(a, 100).unwrap(), hi: QuadExt::rational(b, 100).unwrap() }],
            };
            let shift = &QuadExt::sqrt(2).scale_i64(t) - &QuadExt::rational(t, 3).unwrap();
            let pt = QuadExt::rational(x, 1000).unwrap();
            let pre = iv.preimage(&shift);
            prop_assert_eq!(pre.contains(&pt), iv.contains(&(&pt + &shift)));
        }

        #[test]
        fn fast_path_agrees_with_exact(x in 0u64..3000, y in 0u64..3000) {
            let w = RotationWordSpec::default_sturmian();
            let exact = w.partition().code_exact(&circle_point(&w.point(&[x, y]), Orientation::Lower));
            prop_assert_eq!(w.letter(&[x, y]), exact);
        }
    }
}
