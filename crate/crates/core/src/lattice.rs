//! Lattice index types, finite blocks, the infinite-word evaluator trait and
//! directional extraction.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// A letter, identified by its index in the alphabet.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(pub u32);

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Letter {
    fn from(v: u32) -> Self {
        Letter(v)
    }
}

/// Extents (s_1,...,s_d) of a rectangular block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Size(Vec<u64>);

impl Size {
    pub fn new(dims: Vec<u64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidSize(dims));
        }
        Ok(Size(dims))
    }

    /// The hypercube (s,...,s).
    pub fn cube(d: usize, s: u64) -> Result<Self> {
        Size::new(vec![s; d])
    }

    pub fn dims(&self) -> &[u64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn volume(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn max_extent(&self) -> u64 {
        *self.0.iter().max().expect("sizes are never empty")
    }

    /// All sizes with every extent in `1..=bound`, lexicographic order.
    pub fn all_up_to(d: usize, bound: u64) -> Vec<Size> {
        let mut out = Vec::new();
        for_each_in_box(&vec![bound; d], |c| {
            out.push(Size(c.iter().map(|x| x + 1).collect()));
        });
        out.sort();
        out
    }
}

impl TryFrom<Vec<u64>> for Size {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Size::new(v)
    }
}

impl From<Size> for Vec<u64> {
    fn from(s: Size) -> Self {
        s.0
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A point of N^d.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub Vec<u64>);

impl Position {
    pub fn origin(d: usize) -> Self {
        Position(vec![0; d])
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn checked_add(&self, other: &[u64]) -> Result<Position> {
        if other.len() != self.0.len() {
            return Err(Error::DimensionError {
                expected: self.0.len(),
                found: other.len(),
            });
        }
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Position)
    }
}

impl From<Vec<u64>> for Position {
    fn from(v: Vec<u64>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// A nonzero vector of coprime nonnegative coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Direction(Vec<u64>);

impl Direction {
    /// Accepts only coprime, nonzero coordinate tuples.
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.iter().all(|&c| c == 0) {
            return Err(Error::DegenerateDirection);
        }
        if gcd_all(&coords) != 1 {
            return Err(Error::NotADirection(coords));
        }
        Ok(Direction(coords))
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// ℓ·q, with overflow detection.
    pub fn scaled(&self, l: u64) -> Result<Position> {
        self.0
            .iter()
            .map(|&c| c.checked_mul(l).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Position)
    }
}

impl TryFrom<Vec<u64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<u64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, v: &[u64]) -> fmt::Result {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    write!(f, "({})", parts.join(","))
}

/// gcd of all entries; 0 for the zero vector.
pub fn gcd_all(v: &[u64]) -> u64 {
    v.iter().fold(0u64, |g, &x| g.gcd(&x))
}

/// Divides a nonzero tuple by the gcd of its entries.
pub fn normalize_direction(raw: &[u64]) -> Result<Direction> {
    let g = gcd_all(raw);
    if g == 0 {
        return Err(Error::DegenerateDirection);
    }
    Ok(Direction(raw.iter().map(|x| x / g).collect()))
}

/// Calls `f` on every point of the box [0,e_1) x ... x [0,e_d), first
/// coordinate varying fastest.
pub fn for_each_in_box(extents: &[u64], mut f: impl FnMut(&[u64])) {
    if extents.contains(&0) {
        return;
    }
    let d = extents.len();
    let mut cur = vec![0u64; d];
    loop {
        f(&cur);
        let mut j = 0;
        loop {
            if j == d {
                return;
            }
            cur[j] += 1;
            if cur[j] < extents[j] {
                break;
            }
            cur[j] = 0;
            j += 1;
        }
    }
}

/// A d-dimensional infinite word N^d -> A given by a pure evaluator.
pub trait WordSource: Send + Sync {
    fn dimension(&self) -> usize;
    fn alphabet_size(&self) -> usize;
    /// Letter at `p`. `p.len()` must equal `dimension()`.
    fn letter(&self, p: &[u64]) -> Letter;
}

impl<T: WordSource + ?Sized> WordSource for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn alphabet_size(&self) -> usize {
        (**self).alphabet_size()
    }
    fn letter(&self, p: &[u64]) -> Letter {
        (**self).letter(p)
    }
}

impl<T: WordSource + ?Sized> WordSource for Box<T> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn alphabet_size(&self) -> usize {
        (**self).alphabet_size()
    }
    fn letter(&self, p: &[u64]) -> Letter {
        (**self).letter(p)
    }
}

impl<T: WordSource + ?Sized> WordSource for Arc<T> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn alphabet_size(&self) -> usize {
        (**self).alphabet_size()
    }
    fn letter(&self, p: &[u64]) -> Letter {
        (**self).letter(p)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionError { expected, found })
    } else {
        Ok(())
    }
}

/// The factor of size `s` at position `p`.
pub fn factor_at<W: WordSource + ?Sized>(w: &W, p: &Position, s: &Size) -> Result<FiniteWord> {
    check_dim(w.dimension(), p.dimension())?;
    check_dim(w.dimension(), s.dimension())?;
    for (pc, sc) in p.coords().iter().zip(s.dims()) {
        pc.checked_add(*sc).ok_or(Error::Overflow)?;
    }
    let mut cells = Vec::with_capacity(s.volume() as usize);
    let mut buf = vec![0u64; p.dimension()];
    for_each_in_box(s.dims(), |i| {
        for j in 0..buf.len() {
            buf[j] = p.0[j] + i[j];
        }
        cells.push(w.letter(&buf));
    });
    Ok(FiniteWord {
        size: s.clone(),
        cells,
    })
}

/// w_{q,s}(ℓ): the block of size `s` at ℓ·q.
pub fn directional_letter<W: WordSource + ?Sized>(
    w: &W,
    q: &Direction,
    s: &Size,
    l: u64,
) -> Result<FiniteWord> {
    check_dim(w.dimension(), q.dimension())?;
    factor_at(w, &q.scaled(l)?, s)
}

/// True iff the factor of size `f.size()` at `p` equals `f`. Stops at the
/// first mismatching cell. `scratch` must have length `p.len()`.
pub fn factor_matches<W: WordSource + ?Sized>(
    w: &W,
    p: &[u64],
    f: &FiniteWord,
    scratch: &mut [u64],
) -> bool {
    let dims = f.size.dims();
    let d = dims.len();
    let mut cur = vec![0u64; d];
    let mut idx = 0usize;
    loop {
        for j in 0..d {
            scratch[j] = p[j] + cur[j];
        }
        if w.letter(scratch) != f.cells[idx] {
            return false;
        }
        idx += 1;
        let mut j = 0;
        loop {
            if j == d {
                return true;
            }
            cur[j] += 1;
            if cur[j] < dims[j] {
                break;
            }
            cur[j] = 0;
            j += 1;
        }
    }
}

/// The word i ↦ w(i + p).
#[derive(Clone, Debug)]
pub struct Translated<W> {
    inner: W,
    offset: Vec<u64>,
}

impl<W: WordSource> Translated<W> {
    pub fn offset(&self) -> &[u64] {
        &self.offset
    }
}

/// w^{(p)}: i ↦ w(i + p).
pub fn translate_origin<W: WordSource>(w: W, p: &Position) -> Result<Translated<W>> {
    check_dim(w.dimension(), p.dimension())?;
    Ok(Translated {
        inner: w,
        offset: p.0.clone(),
    })
}

impl<W: WordSource> WordSource for Translated<W> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn alphabet_size(&self) -> usize {
        self.inner.alphabet_size()
    }
    fn letter(&self, p: &[u64]) -> Letter {
        let q: Vec<u64> = p.iter().zip(&self.offset).map(|(a, b)| a + b).collect();
        self.inner.letter(&q)
    }
}

/// A finite rectangular block. Cells are stored with the first coordinate
/// varying fastest, so for d=2 each row is contiguous and rows are ordered
/// bottom to top.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWord {
    size: Size,
    cells: Vec<Letter>,
}

impl FiniteWord {
    pub fn new(size: Size, cells: Vec<Letter>) -> Result<Self> {
        if cells.len() as u64 != size.volume() {
            return Err(Error::InvalidInput(format!(
                "{} cells for a block of size {}",
                cells.len(),
                size
            )));
        }
        Ok(FiniteWord { size, cells })
    }

    pub fn from_fn(size: Size, mut f: impl FnMut(&[u64]) -> Letter) -> Self {
        let mut cells = Vec::with_capacity(size.volume() as usize);
        for_each_in_box(size.dims(), |i| cells.push(f(i)));
        FiniteWord { size, cells }
    }

    /// A single-cell block in dimension `d`.
    pub fn single(d: usize, a: Letter) -> Self {
        FiniteWord {
            size: Size(vec![1; d]),
            cells: vec![a],
        }
    }

    /// 2-D block from rows listed bottom to top.
    pub fn from_rows(rows_bottom_first: &[&[u32]]) -> Result<Self> {
        let h = rows_bottom_first.len();
        let w = rows_bottom_first.first().map_or(0, |r| r.len());
        if h == 0 || w == 0 || rows_bottom_first.iter().any(|r| r.len() != w) {
            return Err(Error::InvalidInput("ragged or empty rows".into()));
        }
        let cells = rows_bottom_first
            .iter()
            .flat_map(|r| r.iter().map(|&x| Letter(x)))
            .collect();
        FiniteWord::new(Size::new(vec![w as u64, h as u64])?, cells)
    }

    /// 1-D block.
    pub fn from_slice(letters: &[u32]) -> Result<Self> {
        FiniteWord::new(
            Size::new(vec![letters.len() as u64])?,
            letters.iter().map(|&x| Letter(x)).collect(),
        )
    }

    pub fn size(&self) -> &Size {
        &self.size
    }

    pub fn dimension(&self) -> usize {
        self.size.dimension()
    }

    pub fn cells(&self) -> &[Letter] {
        &self.cells
    }

    fn offset(&self, i: &[u64]) -> usize {
        let mut idx = 0u64;
        let mut stride = 1u64;
        for (c, s) in i.iter().zip(self.size.dims()) {
            debug_assert!(c < s);
            idx += c * stride;
            stride *= s;
        }
        idx as usize
    }

    pub fn get(&self, i: &[u64]) -> Letter {
        self.cells[self.offset(i)]
    }

    pub fn try_get(&self, i: &[u64]) -> Option<Letter> {
        if i.len() != self.dimension() || i.iter().zip(self.size.dims()).any(|(c, s)| c >= s) {
            return None;
        }
        Some(self.get(i))
    }

    pub fn set(&mut self, i: &[u64], a: Letter) {
        let o = self.offset(i);
        self.cells[o] = a;
    }

    /// Largest letter index + 1.
    pub fn letter_bound(&self) -> usize {
        self.cells.iter().map(|l| l.0 as usize + 1).max().unwrap_or(0)
    }

    /// Restriction to the box [0, s).
    pub fn restrict(&self, s: &Size) -> Result<FiniteWord> {
        check_dim(self.dimension(), s.dimension())?;
        if s.dims().iter().zip(self.size.dims()).any(|(a, b)| a > b) {
            return Err(Error::InvalidInput(format!(
                "cannot restrict {} to {}",
                self.size, s
            )));
        }
        Ok(FiniteWord::from_fn(s.clone(), |i| self.get(i)))
    }

    /// Swaps the first two coordinates.
    pub fn transpose(&self) -> Result<FiniteWord> {
        if self.dimension() != 2 {
            return Err(Error::DimensionError {
                expected: 2,
                found: self.dimension(),
            });
        }
        let d = self.size.dims();
        let t = Size(vec![d[1], d[0]]);
        Ok(FiniteWord::from_fn(t, |i| self.get(&[i[1], i[0]])))
    }

    /// Nested JSON arrays, outermost index = last coordinate. For d=2 this is
    /// a list of rows, bottom row first.
    pub fn to_json(&self) -> Value {
        fn rec(w: &FiniteWord, level: usize, prefix: &mut Vec<u64>) -> Value {
            let dims = w.size.dims();
            if level == 0 {
                let mut coords = vec![0u64; dims.len()];
                coords[1..].copy_from_slice(&prefix[..]);
                let row: Vec<Value> = (0..dims[0])
                    .map(|x| {
                        coords[0] = x;
                        Value::from(w.get(&coords).0)
                    })
                    .collect();
                return Value::Array(row);
            }
            let items = (0..dims[level])
                .map(|c| {
                    prefix[level - 1] = c;
                    rec(w, level - 1, prefix)
                })
                .collect();
            Value::Array(items)
        }
        let d = self.dimension();
        let mut prefix = vec![0u64; d - 1];
        rec(self, d - 1, &mut prefix)
    }

    /// Inverse of [`FiniteWord::to_json`]; the dimension is the nesting depth.
    pub fn from_json(v: &Value) -> Result<FiniteWord> {
        let mut dims_rev = Vec::new();
        let mut cur = v;
        while let Value::Array(a) = cur {
            if a.is_empty() {
                return Err(Error::Parse("empty array in block".into()));
            }
            dims_rev.push(a.len() as u64);
            cur = &a[0];
        }
        dims_rev.reverse();
        let size = Size::new(dims_rev)?;
        let d = size.dimension();
        let mut out = FiniteWord {
            size: size.clone(),
            cells: vec![Letter(0); size.volume() as usize],
        };
        let mut err = None;
        for_each_in_box(size.dims(), |i| {
            if err.is_some() {
                return;
            }
            let mut node = v;
            for level in (0..d).rev() {
                match node.get(i[level] as usize) {
                    Some(n) => node = n,
                    None => {
                        err = Some(Error::Parse("ragged nested array".into()));
                        return;
                    }
                }
            }
            match node.as_u64() {
                Some(x) if x <= u32::MAX as u64 => out.set(i, Letter(x as u32)),
                _ => err = Some(Error::Parse(format!("bad letter {node}"))),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Text grid for d <= 2: top row first, letters separated by spaces.
    pub fn to_text(&self) -> Result<String> {
        let dims = self.size.dims();
        let (w, h) = match dims.len() {
            1 => (dims[0], 1),
            2 => (dims[0], dims[1]),
            d => {
                return Err(Error::DimensionError {
                    expected: 2,
                    found: d,
                })
            }
        };
        let mut out = String::new();
        for y in (0..h).rev() {
            let row: Vec<String> = (0..w)
                .map(|x| {
                    if dims.len() == 1 {
                        self.get(&[x]).to_string()
                    } else {
                        self.get(&[x, y]).to_string()
                    }
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        Ok(out)
    }

    /// Parses a 2-D text grid (top row first).
    pub fn from_text(s: &str) -> Result<FiniteWord> {
        let rows: Vec<Vec<u32>> = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(e.to_string())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rev: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        rev.reverse();
        FiniteWord::from_rows(&rev)
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(t) => write!(f, "{}", t.trim_end()),
            Err(_) => write!(f, "{:?}", self.cells),
        }
    }
}

/// A finite block viewed as an infinite word by periodic repetition. Handy as
/// a test word with known recurrence.
#[derive(Clone, Debug)]
pub struct Periodic {
    pattern: FiniteWord,
    alphabet: usize,
}

impl Periodic {
    pub fn new(pattern: FiniteWord, alphabet: usize) -> Result<Self> {
        if pattern.letter_bound() > alphabet {
            return Err(Error::LetterOutOfRange {
                letter: pattern.letter_bound() as u32 - 1,
                alphabet,
            });
        }
        Ok(Periodic { pattern, alphabet })
    }

    pub fn constant(d: usize, a: Letter, alphabet: usize) -> Result<Self> {
        Periodic::new(FiniteWord::single(d, a), alphabet)
    }
}

impl WordSource for Periodic {
    fn dimension(&self) -> usize {
        self.pattern.dimension()
    }
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }
    fn letter(&self, p: &[u64]) -> Letter {
        let r: Vec<u64> = p
            .iter()
            .zip(self.pattern.size().dims())
            .map(|(a, s)| a % s)
            .collect();
        self.pattern.get(&r)
    }
}
