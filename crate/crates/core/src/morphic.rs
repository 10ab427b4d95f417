//! Exact recurrence conditions for fixed points of square morphisms.
//!
//! Each check inspects the images only. The sufficient conditions come with a
//! gap bound that empirical scans can be held to.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{family_c, generated_subgroup, is_prime, ResidueVector};
use crate::error::{Error, Result};
use crate::generators::{morphic_letter, presets, thue_morse, Morphism};
use crate::lattice::{for_each_in_box, Direction, Letter, Size, WordSource};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// For each subgroup (named by its generator), a position of the
    /// subgroup where every image has the letter.
    CommonPositions { positions: Vec<(ResidueVector, Vec<u64>)> },
    /// A subgroup none of whose positions carries the letter in every image.
    MissingSubgroup { generator: ResidueVector },
    /// A cell of an image that breaks the condition.
    Cell { letter: Letter, position: Vec<u64> },
    /// The coordinate i_1 of the common hyperplane.
    Hyperplane { i1: u64 },
    /// The subgroup ⟨q mod s⟩ used for the direction check.
    Subgroup { generator: ResidueVector },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionVerdict {
    pub condition: &'static str,
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Gap bound for the prefix of size m: base^{⌈log_base max m⌉} · factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurdBoundClaim {
    pub base: u64,
    pub factor: u64,
}

impl SurdBoundClaim {
    /// base^{⌈log_base max m⌉ + 1}.
    pub fn main(s: u64) -> Self {
        SurdBoundClaim { base: s, factor: s }
    }

    /// base^{⌈log_base max m⌉} · b, from a letter-level gap bound b.
    pub fn reduction(s: u64, b: u64) -> Self {
        SurdBoundClaim { base: s, factor: b }
    }

    pub fn bound(&self, m: &Size) -> u64 {
        let r = ceil_log(self.base, m.max_extent());
        self.base
            .saturating_pow(r)
            .saturating_mul(self.factor)
    }
}

/// Smallest r with s^r ≥ x.
pub fn ceil_log(s: u64, x: u64) -> u32 {
    let mut r = 0;
    let mut p = 1u64;
    while p < x {
        p = p.saturating_mul(s);
        r += 1;
    }
    r
}

fn square_size(phi: &Morphism) -> Result<u64> {
    phi.square_size()
        .ok_or_else(|| Error::InvalidInput("morphism is not square".into()))
}

fn require_prolongable(phi: &Morphism, a: Letter) -> Result<()> {
    if phi.is_prolongable(a) {
        Ok(())
    } else {
        Err(Error::NotProlongable(a.0))
    }
}

fn all_images(phi: &Morphism, i: &[u64], a: Letter) -> bool {
    (0..phi.alphabet_size() as u32).all(|b| phi.cell(Letter(b), i) == a)
}

/// Every C ∈ C(s) contains some i with φ(b)_i = a for all b.
pub fn check_main_morphic(
    phi: &Morphism,
    a: Letter,
) -> Result<(ConditionVerdict, Option<SurdBoundClaim>)> {
    let s = square_size(phi)?;
    require_prolongable(phi, a)?;
    let family = family_c(s, phi.dimension())?;
    let mut positions = Vec::with_capacity(family.len());
    for c in family.subgroups() {
        match c.elements().iter().find(|e| all_images(phi, e.coords(), a)) {
            Some(e) => positions.push((c.generator().clone(), e.coords().to_vec())),
            None => {
                let v = ConditionVerdict {
                    condition: "main-morphic",
                    holds: false,
                    witness: Some(Witness::MissingSubgroup {
                        generator: c.generator().clone(),
                    }),
                };
                return Ok((v, None));
            }
        }
    }
    let v = ConditionVerdict {
        condition: "main-morphic",
        holds: true,
        witness: Some(Witness::CommonPositions { positions }),
    };
    Ok((v, Some(SurdBoundClaim::main(s))))
}

/// φ(b)_0 = a for every letter b.
pub fn check_cor1(phi: &Morphism, a: Letter) -> Result<(ConditionVerdict, Option<SurdBoundClaim>)> {
    let s = square_size(phi)?;
    require_prolongable(phi, a)?;
    let origin = vec![0u64; phi.dimension()];
    let bad = (0..phi.alphabet_size() as u32)
        .map(Letter)
        .find(|&b| phi.cell(b, &origin) != a);
    let v = ConditionVerdict {
        condition: "cor1",
        holds: bad.is_none(),
        witness: bad.map(|b| Witness::Cell {
            letter: b,
            position: origin.clone(),
        }),
    };
    let claim = v.holds.then(|| SurdBoundClaim::main(s));
    Ok((v, claim))
}

/// The main condition applied to ψ^i, a morphism of size s^i.
pub fn check_power(
    psi: &Morphism,
    a: Letter,
    i: u32,
) -> Result<(ConditionVerdict, Option<SurdBoundClaim>)> {
    square_size(psi)?;
    require_prolongable(psi, a)?;
    let (mut v, claim) = check_main_morphic(&psi.power(i)?, a)?;
    v.condition = "power";
    Ok((v, claim))
}

/// φ(a)_{0,i_2,…} = a on the whole first hyperplane, and some i_1 with
/// φ(b)_{i_1,i_2,…} = a for every b and every i_2, ….
pub fn check_hyperplane(
    phi: &Morphism,
    a: Letter,
) -> Result<(ConditionVerdict, Option<SurdBoundClaim>)> {
    let s = square_size(phi)?;
    if !is_prime(s) {
        return Err(Error::CompositeSize(s));
    }
    require_prolongable(phi, a)?;
    let d = phi.dimension();
    let mut slab = vec![s; d];
    slab[0] = 1;
    let mut first_bad = None;
    for_each_in_box(&slab, |i| {
        if first_bad.is_none() && phi.cell(a, i) != a {
            first_bad = Some(i.to_vec());
        }
    });
    if let Some(position) = first_bad {
        let v = ConditionVerdict {
            condition: "hyperplane",
            holds: false,
            witness: Some(Witness::Cell { letter: a, position }),
        };
        return Ok((v, None));
    }
    let column = (0..s).find(|&i1| {
        let mut ok = true;
        for_each_in_box(&slab, |rest| {
            if ok {
                let mut i = rest.to_vec();
                i[0] = i1;
                ok = all_images(phi, &i, a);
            }
        });
        ok
    });
    let v = ConditionVerdict {
        condition: "hyperplane",
        holds: column.is_some(),
        witness: column.map(|i1| Witness::Hyperplane { i1 }),
    };
    // The letter recurs with gaps at most s along every direction.
    let claim = v.holds.then(|| SurdBoundClaim::reduction(s, s));
    Ok((v, claim))
}

/// φ(b)_i ≠ a for all b and i ∈ ⟨q mod s⟩, except φ(a)_0 = a. When it holds
/// the word along q is a followed by non-a letters only.
pub fn check_non_recurrent_direction(
    phi: &Morphism,
    a: Letter,
    q: &Direction,
) -> Result<ConditionVerdict> {
    let s = square_size(phi)?;
    if !is_prime(s) {
        return Err(Error::CompositeSize(s));
    }
    require_prolongable(phi, a)?;
    if q.dimension() != phi.dimension() {
        return Err(Error::DimensionError {
            expected: phi.dimension(),
            found: q.dimension(),
        });
    }
    let c = generated_subgroup(&ResidueVector::new(s, q.coords())?);
    let mut bad = None;
    'outer: for e in c.elements() {
        for b in 0..phi.alphabet_size() as u32 {
            let b = Letter(b);
            let allowed = b == a && e.is_zero();
            if !allowed && phi.cell(b, e.coords()) == a {
                bad = Some(Witness::Cell {
                    letter: b,
                    position: e.coords().to_vec(),
                });
                break 'outer;
            }
        }
    }
    Ok(ConditionVerdict {
        condition: "non-recurrent-direction",
        holds: bad.is_none(),
        witness: bad.or(Some(Witness::Subgroup {
            generator: c.generator().clone(),
        })),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Surd2x2 {
    Surd,
    NotSurd,
}

fn check_binary_2x2(phi: &Morphism) -> Result<()> {
    if phi.dimension() != 2 || phi.square_size() != Some(2) || phi.alphabet_size() != 2 {
        return Err(Error::InvalidInput(
            "expected a binary bidimensional morphism of size 2".into(),
        ));
    }
    if !phi.is_prolongable(Letter(1)) {
        return Err(Error::InvalidInput("expected φ(1) to start with 1".into()));
    }
    Ok(())
}

/// SURD iff φ(0)_{0,0} = 1 or φ(1) is all ones.
pub fn classify_2x2(phi: &Morphism) -> Result<Surd2x2> {
    check_binary_2x2(phi)?;
    let ones = phi.image(Letter(1)).cells().iter().all(|&c| c == Letter(1));
    if phi.cell(Letter(0), &[0, 0]) == Letter(1) || ones {
        Ok(Surd2x2::Surd)
    } else {
        Ok(Surd2x2::NotSurd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Case2x2 {
    /// Both images have 0 at the same cell other than the origin.
    Trivial,
    Case1,
    Case2,
    Case3_1,
    Case3_2,
    Case4,
}

/// A direction along which the fixed point on 1 starts with 1 and then
/// reads 0 for `zeros` consecutive multiples (forever when `None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonSurdWitness {
    pub case: Case2x2,
    /// Found on the transposed morphism; the direction is already swapped.
    pub transposed: bool,
    pub parameter: u32,
    pub direction: Direction,
    pub zeros: Option<u64>,
}

impl NonSurdWitness {
    /// Checks w(0) = 1 and w(mq) = 0 for m = 1..zeros (or up to `horizon`).
    pub fn verify<W: WordSource + ?Sized>(&self, w: &W, horizon: u64) -> Result<bool> {
        if w.letter(&[0, 0]) != Letter(1) {
            return Ok(false);
        }
        let last = self.zeros.unwrap_or(horizon);
        for m in 1..=last {
            if w.letter(self.direction.scaled(m)?.coords()) != Letter(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

type Pair = (u32, u32);

fn pair(phi: &Morphism, i: &[u64]) -> Pair {
    (phi.cell(Letter(1), i).0, phi.cell(Letter(0), i).0)
}

fn witness_for(case: Case2x2, n: u32, transposed: bool) -> Result<NonSurdWitness> {
    let odd = matches!(case, Case2x2::Case1 | Case2x2::Case2 | Case2x2::Case3_1);
    if n == 0 || n > 20 || (odd && n.is_multiple_of(2)) {
        return Err(Error::InvalidInput(format!(
            "case parameter {n} not allowed for {case:?}"
        )));
    }
    let t = 1u64 << n;
    let (dir, zeros) = match case {
        Case2x2::Case1 => (vec![t * t * (t - 1), t + 1], Some(t - 1)),
        Case2x2::Case2 => (vec![1, (t - 1) * t], Some(t - 1)),
        Case2x2::Case3_1 => (vec![t + 1, t * t * (t - 1) + t + 1], Some(t - 1)),
        Case2x2::Case3_2 => (vec![2, 1], None),
        Case2x2::Case4 => (vec![t - 1, 1], Some(t - 1)),
        Case2x2::Trivial => unreachable!("handled by caller"),
    };
    let dir = if transposed { vec![dir[1], dir[0]] } else { dir };
    Ok(NonSurdWitness {
        case,
        transposed,
        parameter: n,
        direction: Direction::new(dir)?,
        zeros,
    })
}

/// The case of the characterization proof that applies to φ, with its
/// witness direction instantiated at `parameter` (ℓ or n; odd where the
/// proof needs it).
pub fn non_surd_2x2_witness(phi: &Morphism, parameter: u32) -> Result<NonSurdWitness> {
    if classify_2x2(phi)? == Surd2x2::Surd {
        return Err(Error::NotApplicable("morphism is SURD".into()));
    }
    for cell in [[0u64, 1], [1, 0], [1, 1]] {
        if pair(phi, &cell) == (0, 0) {
            return Ok(NonSurdWitness {
                case: Case2x2::Trivial,
                transposed: false,
                parameter,
                direction: Direction::new(cell.to_vec())?,
                zeros: None,
            });
        }
    }
    let p01 = pair(phi, &[0, 1]);
    let p10 = pair(phi, &[1, 0]);
    if p01 == (0, 1) {
        let case = match p10 {
            (0, 1) => Case2x2::Case1,
            (1, 0) => Case2x2::Case2,
            _ => match pair(phi, &[1, 1]) {
                (0, 1) => Case2x2::Case3_1,
                _ => Case2x2::Case3_2,
            },
        };
        return witness_for(case, parameter, false);
    }
    if p10 == (0, 1) {
        let mut w = non_surd_2x2_witness(&phi.transpose()?, parameter)?;
        if w.transposed {
            return Err(Error::ConstructionBug {
                position: vec![0, 1],
                existing: p01.0,
                incoming: p01.1,
            });
        }
        w.transposed = true;
        let c = w.direction.coords();
        w.direction = Direction::new(vec![c[1], c[0]])?;
        return Ok(w);
    }
    witness_for(Case2x2::Case4, parameter, false)
}

/// All binary size-2 bidimensional morphisms with φ(1)_{0,0} = 1, in the
/// order of their 7-bit code (φ(1) cells (1,0),(0,1),(1,1), then φ(0)).
pub fn all_2x2_morphisms() -> Vec<Morphism> {
    (0u32..128)
        .map(|code| {
            let bit = |k: u32| (code >> k) & 1;
            let one: [&[u32]; 2] = [&[1, bit(0)], &[bit(1), bit(2)]];
            let zero: [&[u32]; 2] = [&[bit(3), bit(4)], &[bit(5), bit(6)]];
            let zero: Vec<Vec<u32>> = zero.iter().map(|r| r.to_vec()).collect();
            let one: Vec<Vec<u32>> = one.iter().map(|r| r.to_vec()).collect();
            let z: Vec<&[u32]> = zero.iter().map(Vec::as_slice).collect();
            let o: Vec<&[u32]> = one.iter().map(Vec::as_slice).collect();
            Morphism::from_rows(2, &[&z, &o]).expect("well formed")
        })
        .collect()
}

fn check_lemma_order(l: u32) -> Result<()> {
    if l == 0 || l > 24 {
        return Err(Error::InvalidInput("ℓ must lie in 1..=24".into()));
    }
    Ok(())
}

/// t_0 = 0 and t_d = t_{2d} = … = t_{2^ℓ d} for d = 2^ℓ − 1, with t_d = 1 iff
/// ℓ is odd.
pub fn thue_lemma_tm1(l: u32) -> Result<bool> {
    check_lemma_order(l)?;
    let d = (1u64 << l) - 1;
    let td = thue_morse(d);
    let equal = (1..=1u64 << l).all(|m| thue_morse(m * d) == td);
    Ok(thue_morse(0) == 0 && equal && (td == 1) == (l % 2 == 1))
}

/// t_0 = t_d = … = t_{2^ℓ d} = 0 for d = 2^ℓ + 1.
pub fn thue_lemma_tm0(l: u32) -> Result<bool> {
    check_lemma_order(l)?;
    let d = (1u64 << l) + 1;
    Ok((0..=1u64 << l).all(|m| thue_morse(m * d) == 0))
}

/// Every length-s window of k ↦ σ^ω(a)_{mk}, k ≤ horizon, contains a.
pub fn lemma001_101_check(sigma: &Morphism, a: Letter, m: u64, horizon: u64) -> Result<bool> {
    if sigma.dimension() != 1 {
        return Err(Error::DimensionError {
            expected: 1,
            found: sigma.dimension(),
        });
    }
    let s = sigma.dims()[0];
    if !is_prime(s) {
        return Err(Error::CompositeSize(s));
    }
    require_prolongable(sigma, a)?;
    if !(0..s).any(|i| all_images(sigma, &[i], a)) {
        return Err(Error::InvalidInput("no common position of a".into()));
    }
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    let mut since = 0u64;
    for k in 0..=horizon {
        let pos = m.checked_mul(k).ok_or(Error::Overflow)?;
        if morphic_letter(sigma, a, &[pos])? == a {
            since = 0;
        } else {
            since += 1;
            if since >= s {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// On the size-3 SSURDO preset: φ^j(0) and φ^j(1) differ exactly at
/// (3^j−1, 3^j−1), and w(p) = w(p mod 3) off the class (2,2) mod 3 on a
/// 3^{j+1} box.
pub fn ssurdo_structure_check(j: u32) -> Result<bool> {
    if j == 0 || j > 6 {
        return Err(Error::InvalidInput("j must lie in 1..=6".into()));
    }
    let phi = Arc::new(presets::ssurdo_3x3());
    let a = phi.iterate(Letter(0), j)?;
    let b = phi.iterate(Letter(1), j)?;
    let corner = 3u64.pow(j) - 1;
    let mut diff = Vec::new();
    for_each_in_box(a.size().dims(), |p| {
        if a.get(p) != b.get(p) {
            diff.push(p.to_vec());
        }
    });
    if diff != vec![vec![corner, corner]] {
        return Ok(false);
    }
    let w = phi.fixed_point(Letter(1))?;
    let side = 3u64.pow(j + 1);
    let mut ok = true;
    for_each_in_box(&[side, side], |p| {
        if ok && !(p[0] % 3 == 2 && p[1] % 3 == 2) {
            ok = w.letter(p) == w.letter(&[p[0] % 3, p[1] % 3]);
        }
    });
    Ok(ok)
}

/// On the SURD-not-SSURDO preset, the row through p_n = (2^{n+1}−1, 2^n−1)
/// starts with ā a^{3·2^n} ā.
pub fn surd_not_ssurdo_origin_pattern(n: u32) -> Result<bool> {
    if n == 0 || n > 30 {
        return Err(Error::InvalidInput("n must lie in 1..=30".into()));
    }
    let w = Arc::new(presets::surd_not_ssurdo_2x2()).fixed_point(Letter(1))?;
    let (x0, y) = ((1u64 << (n + 1)) - 1, (1u64 << n) - 1);
    let run = 3u64 << n;
    let first = w.letter(&[x0, y]);
    let a = w.letter(&[x0 + 1, y]);
    Ok(a != first
        && (1..=run).all(|l| w.letter(&[x0 + l, y]) == a)
        && w.letter(&[x0 + run + 1, y]) == first)
}
