//! Exact arithmetic in Q(√p_1, …, √p_m).
//!
//! A value is Σ_mask n_mask·√(Π_{i∈mask} p_i) / den with integer numerators
//! over a common positive denominator. The square roots of distinct
//! squarefree integers are linearly independent over Q, so the form is
//! canonical once unused primes are dropped and the fraction is reduced.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    primes: Vec<u64>,
    nums: Vec<BigInt>,
    den: BigInt,
}

/// f64 value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub error: f64,
}

const UNIT: f64 = f64::EPSILON; // 2^-52

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mask_product(primes: &[u64], mask: usize) -> BigInt {
    let mut r = BigInt::one();
    for (i, &p) in primes.iter().enumerate() {
        if mask & (1 << i) != 0 {
            r *= p;
        }
    }
    r
}

fn merge_primes(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl QuadExt {
    fn build(primes: Vec<u64>, nums: Vec<BigInt>, den: BigInt) -> QuadExt {
        debug_assert_eq!(nums.len(), 1 << primes.len());
        let mut q = QuadExt { primes, nums, den };
        q.normalize();
        q
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for n in &mut self.nums {
                *n = -std::mem::take(n);
            }
        }
        // Drop primes that no nonzero term uses.
        let mut i = 0;
        while i < self.primes.len() {
            let bit = 1usize << i;
            let used = self
                .nums
                .iter()
                .enumerate()
                .any(|(m, n)| m & bit != 0 && !n.is_zero());
            if used {
                i += 1;
                continue;
            }
            let low = bit - 1;
            let nums: Vec<BigInt> = (0..self.nums.len() / 2)
                .map(|m| {
                    let full = (m & low) | ((m & !low) << 1);
                    std::mem::take(&mut self.nums[full])
                })
                .collect();
            self.nums = nums;
            self.primes.remove(i);
        }
        let g = self
            .nums
            .iter()
            .fold(self.den.clone(), |g, n| g.gcd(n));
        if !g.is_one() && !g.is_zero() {
            for n in &mut self.nums {
                *n /= &g;
            }
            self.den /= &g;
        }
        if self.nums.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        }
    }

    pub fn zero() -> QuadExt {
        QuadExt::from_integer(0)
    }

    pub fn one() -> QuadExt {
        QuadExt::from_integer(1)
    }

    pub fn from_integer(n: i64) -> QuadExt {
        QuadExt::from_ratio(BigInt::from(n), BigInt::one()).expect("nonzero denominator")
    }

    pub fn from_ratio(num: BigInt, den: BigInt) -> Result<QuadExt> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(QuadExt::build(Vec::new(), vec![num], den))
    }

    pub fn rational(num: i64, den: i64) -> Result<QuadExt> {
        QuadExt::from_ratio(BigInt::from(num), BigInt::from(den))
    }

    /// √n for any n ≥ 0.
    pub fn sqrt(n: u64) -> QuadExt {
        if n == 0 {
            return QuadExt::zero();
        }
        let mut coef = BigInt::one();
        let mut primes = Vec::new();
        for (p, e) in prime_factors(n) {
            coef *= BigInt::from(p).pow(e / 2);
            if e % 2 == 1 {
                primes.push(p);
            }
        }
        let mut nums = vec![BigInt::zero(); 1 << primes.len()];
        let top = nums.len() - 1;
        nums[top] = coef;
        QuadExt::build(primes, nums, BigInt::one())
    }

    /// Primes whose square roots generate the field the value lives in.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Coefficients keyed by squarefree radicand (1 for the rational part).
    pub fn terms(&self) -> Vec<(BigInt, BigRational)> {
        self.nums
            .iter()
            .enumerate()
            .filter(|(_, n)| !n.is_zero())
            .map(|(m, n)| {
                (
                    mask_product(&self.primes, m),
                    BigRational::new(n.clone(), self.den.clone()),
                )
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.primes.is_empty()
    }

    /// Numerators aligned to a superset of this value's primes.
    fn aligned(&self, primes: &[u64]) -> Vec<BigInt> {
        let pos: Vec<usize> = self
            .primes
            .iter()
            .map(|p| primes.binary_search(p).expect("superset"))
            .collect();
        let mut out = vec![BigInt::zero(); 1 << primes.len()];
        for (m, n) in self.nums.iter().enumerate() {
            let mut full = 0usize;
            for (i, &j) in pos.iter().enumerate() {
                if m & (1 << i) != 0 {
                    full |= 1 << j;
                }
            }
            out[full] = n.clone();
        }
        out
    }

    /// Coefficient vector over the basis indexed by `primes` masks, as
    /// rationals.
    pub fn coefficients_over(&self, primes: &[u64]) -> Vec<BigRational> {
        self.aligned(primes)
            .into_iter()
            .map(|n| BigRational::new(n, self.den.clone()))
            .collect()
    }

    pub fn scale(&self, k: &BigInt) -> QuadExt {
        QuadExt::build(
            self.primes.clone(),
            self.nums.iter().map(|n| n * k).collect(),
            self.den.clone(),
        )
    }

    pub fn scale_i64(&self, k: i64) -> QuadExt {
        self.scale(&BigInt::from(k))
    }

    pub fn div_integer(&self, k: i64) -> Result<QuadExt> {
        if k == 0 {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        Ok(QuadExt::build(
            self.primes.clone(),
            self.nums.clone(),
            &self.den * k,
        ))
    }

    fn combine(&self, other: &QuadExt, sign: i32) -> QuadExt {
        let primes = merge_primes(&self.primes, &other.primes);
        let a = self.aligned(&primes);
        let b = other.aligned(&primes);
        let nums = a
            .into_iter()
            .zip(b)
            .map(|(x, y)| {
                let l = x * &other.den;
                let r = y * &self.den;
                if sign > 0 {
                    l + r
                } else {
                    l - r
                }
            })
            .collect();
        QuadExt::build(primes, nums, &self.den * &other.den)
    }

    fn product(&self, other: &QuadExt) -> QuadExt {
        let primes = merge_primes(&self.primes, &other.primes);
        let a = self.aligned(&primes);
        let b = other.aligned(&primes);
        let mut nums = vec![BigInt::zero(); a.len()];
        for (m1, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (m2, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                nums[m1 ^ m2] += x * y * mask_product(&primes, m1 & m2);
            }
        }
        QuadExt::build(primes, nums, &self.den * &other.den)
    }

    /// Rigorous f64 enclosure, or `None` when the terms do not fit in f64.
    pub fn approx(&self) -> Option<Approx> {
        let den = self.den.to_f64()?;
        let mut sum = 0.0f64;
        let mut mag = 0.0f64;
        for (m, n) in self.nums.iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            let r = mask_product(&self.primes, m).to_f64()?.sqrt();
            let t = n.to_f64()? * r;
            if !t.is_finite() {
                return None;
            }
            sum += t;
            mag += t.abs();
        }
        let terms = self.nums.len() as f64;
        let value = sum / den;
        // Conversions, square root, product, summation and division each
        // contribute at most a few units of 2^-53 relative to Σ|t|.
        let error = 2.0 * (terms + 8.0) * UNIT * mag / den.abs() + f64::MIN_POSITIVE;
        (value.is_finite() && error.is_finite()).then_some(Approx { value, error })
    }

    pub fn to_f64(&self) -> f64 {
        match self.approx() {
            Some(a) => a.value,
            None => {
                let e = self.enclosure(64);
                let scale = BigRational::new(BigInt::one(), BigInt::one() << 64);
                (BigRational::from_integer(e.0) * scale / BigRational::from_integer(self.den.clone()))
                    .to_f64()
                    .unwrap_or(f64::NAN)
            }
        }
    }

    /// Integer bounds lo ≤ 2^k·den·x ≤ hi.
    fn enclosure(&self, k: u32) -> (BigInt, BigInt) {
        let four_k = BigUint::one() << (2 * k as usize);
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (m, n) in self.nums.iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            let p = mask_product(&self.primes, m).to_biguint().expect("positive");
            let r = BigInt::from((p * &four_k).sqrt());
            if m == 0 {
                lo += n * &r;
                hi += n * &r;
            } else if n.is_positive() {
                lo += n * &r;
                hi += n * (&r + 1);
            } else {
                lo += n * (&r + 1);
                hi += n * &r;
            }
        }
        (lo, hi)
    }

    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if let Some(a) = self.approx() {
            if a.value > a.error {
                return Ordering::Greater;
            }
            if a.value < -a.error {
                return Ordering::Less;
            }
        }
        let mut k = 64;
        loop {
            let (lo, hi) = self.enclosure(k);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            k *= 2;
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.nums[0].div_floor(&self.den);
        }
        let mut c = match self.approx() {
            Some(a) if a.error < 0.25 && a.value.abs() < 1e15 => BigInt::from(a.value.floor() as i64),
            _ => {
                let (lo, _) = self.enclosure(64);
                lo.div_floor(&(&self.den << 64usize))
            }
        };
        // x is irrational here, so x ≠ c for every integer c.
        while self.cmp_integer(&c) == Ordering::Less {
            c -= 1;
        }
        while self.cmp_integer(&(&c + 1)) == Ordering::Greater {
            c += 1;
        }
        c
    }

    fn cmp_integer(&self, c: &BigInt) -> Ordering {
        (self - &QuadExt::from_ratio(c.clone(), BigInt::one()).expect("den 1")).signum()
    }

    /// x − ⌊x⌋ ∈ [0,1).
    pub fn mod1(&self) -> QuadExt {
        let f = self.floor();
        if f.is_zero() {
            return self.clone();
        }
        self - &QuadExt::from_ratio(f, BigInt::one()).expect("den 1")
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        if let (Some(a), Some(b)) = (self.approx(), other.approx()) {
            let gap = a.error + b.error;
            if a.value - b.value > gap {
                return Ordering::Greater;
            }
            if b.value - a.value > gap {
                return Ordering::Less;
            }
        }
        (self - other).signum()
    }
}

/// Three-way exact comparison.
pub fn qext_compare(x: &QuadExt, y: &QuadExt) -> Ordering {
    x.cmp(y)
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        self.combine(rhs, 1)
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        self.combine(rhs, -1)
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        self.product(rhs)
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        &self + &rhs
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: QuadExt) -> QuadExt {
        &self - &rhs
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: QuadExt) -> QuadExt {
        &self * &rhs
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        self.scale_i64(-1)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        self.scale_i64(-1)
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadExt {
    /// Sum of terms like `-1/2*sqrt(5)`; parseable by `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (rad, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let c = c.abs();
            if i > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            if rad.is_one() {
                f.write_str(&fmt_ratio(&c))?;
            } else if c.is_one() {
                write!(f, "sqrt({rad})")?;
            } else {
                write!(f, "{}*sqrt({rad})", fmt_ratio(&c))?;
            }
        }
        Ok(())
    }
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn from_rational(r: &BigRational) -> QuadExt {
    QuadExt::from_ratio(r.numer().clone(), r.denom().clone()).expect("nonzero")
}

fn parse_term(t: &str) -> Result<QuadExt> {
    let bad = || Error::Parse(format!("bad term {t:?}"));
    let Some(at) = t.find("sqrt") else {
        return Ok(from_rational(&parse_ratio(t)?));
    };
    let head = t[..at].trim().trim_end_matches('*').trim();
    let rest = &t[at + 4..];
    let (radicand, tail) = if let Some(r) = rest.strip_prefix('(') {
        let close = r.find(')').ok_or_else(bad)?;
        (&r[..close], &r[close + 1..])
    } else {
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        (&rest[..end], &rest[end..])
    };
    let n: u64 = radicand.trim().parse().map_err(|_| bad())?;
    let coef = if head.is_empty() {
        BigRational::one()
    } else {
        parse_ratio(head)?
    };
    let tail = tail.trim();
    let div = if tail.is_empty() {
        BigRational::one()
    } else {
        let d = tail.strip_prefix('/').ok_or_else(bad)?;
        parse_ratio(d)?
    };
    if div.is_zero() {
        return Err(bad());
    }
    Ok(&QuadExt::sqrt(n) * &from_rational(&(coef / div)))
}

impl FromStr for QuadExt {
    type Err = Error;
    /// Accepts sums of terms `a`, `a/b`, `sqrt(n)`, `sqrtn`, `a/b*sqrt(n)`,
    /// `sqrt(n)/b`.
    fn from_str(s: &str) -> Result<QuadExt> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        let mut acc = QuadExt::zero();
        let mut start = 0;
        let bytes = s.as_bytes();
        let mut depth = 0;
        for i in 0..=bytes.len() {
            let split = i == bytes.len()
                || (depth == 0 && i > start && (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/');
            if i < bytes.len() {
                match bytes[i] {
                    b'(' => depth += 1,
                    b')' => depth -= 1,
                    _ => {}
                }
            }
            if split {
                let term = &s[start..i];
                let (neg, body) = match term.as_bytes()[0] {
                    b'-' => (true, &term[1..]),
                    b'+' => (false, &term[1..]),
                    _ => (false, term),
                };
                if body.is_empty() {
                    return Err(Error::Parse(format!("bad number {s:?}")));
                }
                let v = parse_term(body)?;
                acc = if neg { &acc - &v } else { &acc + &v };
                start = i;
            }
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct QuadExtJson {
    radicands: Vec<u64>,
    /// Squarefree radicand (1 = rational part) → "num/den".
    terms: BTreeMap<String, String>,
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadExtJson {
            radicands: self.primes.clone(),
            terms: self
                .terms()
                .into_iter()
                .map(|(r, c)| (r.to_string(), format!("{}/{}", c.numer(), c.denom())))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = QuadExtJson::deserialize(d)?;
        let mut acc = QuadExt::zero();
        for (rad, coef) in &j.terms {
            let n: u64 = rad.parse().map_err(D::Error::custom)?;
            if prime_factors(n).iter().any(|&(_, e)| e > 1) {
                return Err(D::Error::custom(format!("radicand {n} is not squarefree")));
            }
            let c = parse_ratio(coef).map_err(D::Error::custom)?;
            acc = &acc + &(&QuadExt::sqrt(n) * &from_rational(&c));
        }
        Ok(acc)
    }
}

/// Rank of a list of rational vectors.
pub(crate) fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let p = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &p;
                for k in c..cols {
                    let v = &rows[rank][k] * &f;
                    rows[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// True iff 1, α_1, …, α_d are linearly independent over Q.
pub fn rational_independence_check(alpha: &[QuadExt]) -> bool {
    let mut primes: Vec<u64> = Vec::new();
    for a in alpha {
        primes = merge_primes(&primes, a.primes());
    }
    let mut rows = vec![QuadExt::one().coefficients_over(&primes)];
    rows.extend(alpha.iter().map(|a| a.coefficients_over(&primes)));
    rational_rank(rows) == alpha.len() + 1
}
