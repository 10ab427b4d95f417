//! Constant-size morphisms and digit-based evaluation of their fixed points.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::{for_each_in_box, FiniteWord, Letter, Size, WordSource};

const MAX_LEVELS: usize = 64;

/// A d-dimensional morphism of constant size (s_1,...,s_d). When all extents
/// agree this is a square morphism of size s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    k: usize,
    dims: Vec<u64>,
    images: Vec<FiniteWord>,
    strides: Vec<u64>,
    // powers[j][n] = s_j^n, saturating.
    powers: Vec<Vec<u128>>,
}

impl Morphism {
    pub fn new(k: usize, dims: Vec<u64>, images: Vec<FiniteWord>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        if dims.is_empty() || dims.iter().any(|&s| s < 2) {
            return Err(Error::InvalidInput(format!(
                "morphism extents must be at least 2, got {dims:?}"
            )));
        }
        if images.len() != k {
            return Err(Error::InvalidInput(format!(
                "{} images for an alphabet of size {k}",
                images.len()
            )));
        }
        let size = Size::new(dims.clone())?;
        for (b, img) in images.iter().enumerate() {
            if img.size() != &size {
                return Err(Error::InvalidInput(format!(
                    "image of {b} has size {}, expected {size}",
                    img.size()
                )));
            }
            if img.letter_bound() > k {
                return Err(Error::LetterOutOfRange {
                    letter: img.letter_bound() as u32 - 1,
                    alphabet: k,
                });
            }
        }
        let mut strides = Vec::with_capacity(dims.len());
        let mut acc = 1u64;
        for &s in &dims {
            strides.push(acc);
            acc *= s;
        }
        let powers = dims
            .iter()
            .map(|&s| {
                let mut v = Vec::with_capacity(MAX_LEVELS + 1);
                let mut p = 1u128;
                for _ in 0..=MAX_LEVELS {
                    v.push(p);
                    p = p.saturating_mul(s as u128);
                }
                v
            })
            .collect();
        Ok(Morphism {
            k,
            dims,
            images,
            strides,
            powers,
        })
    }

    /// Square morphism of size s in dimension d.
    pub fn square(k: usize, d: usize, s: u64, images: Vec<FiniteWord>) -> Result<Self> {
        Morphism::new(k, vec![s; d], images)
    }

    /// 2-D morphism from per-letter images given as rows bottom to top.
    pub fn from_rows(k: usize, images: &[&[&[u32]]]) -> Result<Self> {
        let imgs = images
            .iter()
            .map(|rows| FiniteWord::from_rows(rows))
            .collect::<Result<Vec<_>>>()?;
        let dims = imgs
            .first()
            .ok_or_else(|| Error::InvalidInput("no images".into()))?
            .size()
            .dims()
            .to_vec();
        Morphism::new(k, dims, imgs)
    }

    /// 1-D morphism from per-letter images.
    pub fn from_words(k: usize, images: &[&[u32]]) -> Result<Self> {
        let imgs = images
            .iter()
            .map(|w| FiniteWord::from_slice(w))
            .collect::<Result<Vec<_>>>()?;
        let len = imgs
            .first()
            .ok_or_else(|| Error::InvalidInput("no images".into()))?
            .size()
            .dims()[0];
        Morphism::new(k, vec![len], imgs)
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn dimension(&self) -> usize {
        self.dims.len()
    }

    /// Some(s) when all extents equal s.
    pub fn square_size(&self) -> Option<u64> {
        let s = self.dims[0];
        self.dims.iter().all(|&x| x == s).then_some(s)
    }

    pub fn image(&self, b: Letter) -> &FiniteWord {
        &self.images[b.0 as usize]
    }

    pub fn images(&self) -> &[FiniteWord] {
        &self.images
    }

    /// Image cell i of letter b, without bounds checks on i beyond the image.
    pub fn cell(&self, b: Letter, i: &[u64]) -> Letter {
        self.images[b.0 as usize].get(i)
    }

    fn check_letter(&self, a: Letter) -> Result<()> {
        if (a.0 as usize) < self.k {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange {
                letter: a.0,
                alphabet: self.k,
            })
        }
    }

    /// φ(a) has a at the origin.
    pub fn is_prolongable(&self, a: Letter) -> bool {
        (a.0 as usize) < self.k && self.image(a).cells()[0] == a
    }

    /// Letters the morphism is prolongable on, in increasing order.
    pub fn prolongable_letters(&self) -> Vec<Letter> {
        (0..self.k as u32)
            .map(Letter)
            .filter(|&a| self.is_prolongable(a))
            .collect()
    }

    /// Applies the morphism letterwise to a block.
    pub fn apply(&self, w: &FiniteWord) -> Result<FiniteWord> {
        if w.dimension() != self.dimension() {
            return Err(Error::DimensionError {
                expected: self.dimension(),
                found: w.dimension(),
            });
        }
        let size = Size::new(
            w.size()
                .dims()
                .iter()
                .zip(&self.dims)
                .map(|(a, s)| a * s)
                .collect(),
        )?;
        let d = self.dimension();
        let mut outer = vec![0u64; d];
        let mut inner = vec![0u64; d];
        Ok(FiniteWord::from_fn(size, |p| {
            for j in 0..d {
                outer[j] = p[j] / self.dims[j];
                inner[j] = p[j] % self.dims[j];
            }
            self.cell(w.get(&outer), &inner)
        }))
    }

    /// φ^n(b), for any letter b.
    pub fn iterate(&self, b: Letter, n: u32) -> Result<FiniteWord> {
        self.check_letter(b)?;
        let mut w = FiniteWord::single(self.dimension(), b);
        for _ in 0..n {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    /// φ^n(a) for a prolongable letter a; a prefix of the fixed point.
    pub fn prefix(&self, a: Letter, n: u32) -> Result<FiniteWord> {
        if !self.is_prolongable(a) {
            return Err(Error::NotProlongable(a.0));
        }
        self.iterate(a, n)
    }

    /// ψ^i as a morphism of size s^i.
    pub fn power(&self, i: u32) -> Result<Morphism> {
        if i == 0 {
            return Err(Error::InvalidInput("power must be at least 1".into()));
        }
        let images = (0..self.k as u32)
            .map(|b| self.iterate(Letter(b), i))
            .collect::<Result<Vec<_>>>()?;
        let dims = self
            .dims
            .iter()
            .map(|s| s.checked_pow(i).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(self.k, dims, images)
    }

    /// The morphism with the two coordinates of every image swapped (d=2).
    pub fn transpose(&self) -> Result<Morphism> {
        let images = self
            .images
            .iter()
            .map(|w| w.transpose())
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(self.k, vec![self.dims[1], self.dims[0]], images)
    }

    /// φ^ω(a) as a lazily evaluated word.
    pub fn fixed_point(self: &Arc<Self>, a: Letter) -> Result<FixedPoint> {
        if !self.is_prolongable(a) {
            return Err(Error::NotProlongable(a.0));
        }
        Ok(FixedPoint {
            morphism: Arc::clone(self),
            a,
        })
    }

    /// φ^ω(a)(p) by reading the digits of p most significant first.
    fn eval(&self, a: Letter, p: &[u64]) -> Letter {
        let d = self.dims.len();
        let mut levels = 0usize;
        for j in 0..d {
            let pj = p[j] as u128;
            while self.powers[j][levels] <= pj {
                levels += 1;
            }
        }
        let mut letter = a;
        for level in (0..levels).rev() {
            let mut idx = 0u64;
            for j in 0..d {
                let digit = ((p[j] as u128 / self.powers[j][level]) % self.dims[j] as u128) as u64;
                idx += digit * self.strides[j];
            }
            letter = self.images[letter.0 as usize].cells()[idx as usize];
        }
        letter
    }

    pub fn to_json(&self) -> Value {
        let images: BTreeMap<String, Value> = self
            .images
            .iter()
            .enumerate()
            .map(|(b, w)| (b.to_string(), w.to_json()))
            .collect();
        serde_json::to_value(MorphismJson {
            k: self.k,
            dims: self.dims.clone(),
            images,
        })
        .expect("morphism serializes")
    }

    pub fn from_json(v: &Value) -> Result<Morphism> {
        let m: MorphismJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut images = Vec::with_capacity(m.k);
        for b in 0..m.k {
            let img = m
                .images
                .get(&b.to_string())
                .ok_or_else(|| Error::Parse(format!("missing image for letter {b}")))?;
            images.push(FiniteWord::from_json(img)?);
        }
        Morphism::new(m.k, m.dims, images)
    }
}

#[derive(Serialize, Deserialize)]
struct MorphismJson {
    k: usize,
    dims: Vec<u64>,
    images: BTreeMap<String, Value>,
}

/// True iff φ(a) has the letter a at position 0.
pub fn check_prolongable(phi: &Morphism, a: Letter) -> bool {
    phi.is_prolongable(a)
}

/// φ^ω(a)(p), square or rectangular.
pub fn morphic_letter(phi: &Morphism, a: Letter, p: &[u64]) -> Result<Letter> {
    if !phi.is_prolongable(a) {
        return Err(Error::NotProlongable(a.0));
    }
    if p.len() != phi.dimension() {
        return Err(Error::DimensionError {
            expected: phi.dimension(),
            found: p.len(),
        });
    }
    Ok(phi.eval(a, p))
}

/// Block φ^n(a) of size (s^n,...,s^n).
pub fn morphic_prefix(phi: &Morphism, a: Letter, n: u32) -> Result<FiniteWord> {
    phi.prefix(a, n)
}

/// Preimage cell of p one level up: the position whose image block contains p.
pub fn preimage_position(phi: &Morphism, p: &[u64]) -> Vec<u64> {
    p.iter().zip(phi.dims()).map(|(x, s)| x / s).collect()
}

/// The fixed point φ^ω(a).
#[derive(Clone, Debug)]
pub struct FixedPoint {
    morphism: Arc<Morphism>,
    a: Letter,
}

impl FixedPoint {
    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn start_letter(&self) -> Letter {
        self.a
    }

    /// Materializes the box [0, extents).
    pub fn block(&self, extents: &[u64]) -> Result<FiniteWord> {
        let size = Size::new(extents.to_vec())?;
        Ok(FiniteWord::from_fn(size, |p| self.letter(p)))
    }
}

impl WordSource for FixedPoint {
    fn dimension(&self) -> usize {
        self.morphism.dimension()
    }
    fn alphabet_size(&self) -> usize {
        self.morphism.alphabet_size()
    }
    fn letter(&self, p: &[u64]) -> Letter {
        self.morphism.eval(self.a, p)
    }
}

/// Checks that every position of `w` agrees with φ^n(a) on the box [0, s^n).
pub fn agrees_with_iteration(phi: &Morphism, a: Letter, n: u32) -> Result<bool> {
    let block = phi.prefix(a, n)?;
    let mut ok = true;
    for_each_in_box(block.size().dims(), |p| {
        if phi.eval(a, p) != block.get(p) {
            ok = false;
        }
    });
    Ok(ok)
}
