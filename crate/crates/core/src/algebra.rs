//! Cyclic subgroups of (Z/sZ)^d and gcd along lattice lines.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{for_each_in_box, gcd_all, Direction};

/// A vector of (Z/sZ)^d with coordinates reduced into [0, s).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueVector {
    modulus: u64,
    coords: Vec<u64>,
}

impl ResidueVector {
    pub fn new(modulus: u64, coords: &[u64]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidInput("modulus must be at least 2".into()));
        }
        Ok(ResidueVector {
            modulus,
            coords: coords.iter().map(|c| c % modulus).collect(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// gcd of the canonical lifts equals 1.
    pub fn is_coprime(&self) -> bool {
        gcd_all(&self.coords) == 1
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: u64) -> ResidueVector {
        let s = self.modulus as u128;
        ResidueVector {
            modulus: self.modulus,
            coords: self
                .coords
                .iter()
                .map(|&c| ((c as u128 * k as u128) % s) as u64)
                .collect(),
        }
    }

    pub fn add(&self, other: &ResidueVector) -> ResidueVector {
        ResidueVector {
            modulus: self.modulus,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| (a + b) % self.modulus)
                .collect(),
        }
    }
}

impl fmt::Display for ResidueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// ⟨i⟩ = {k·i mod s : k ∈ [0, s)}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CyclicSubgroup {
    generator: ResidueVector,
    elements: Vec<ResidueVector>,
}

impl CyclicSubgroup {
    pub fn generator(&self) -> &ResidueVector {
        &self.generator
    }

    /// Sorted, deduplicated, includes 0.
    pub fn elements(&self) -> &[ResidueVector] {
        &self.elements
    }

    pub fn contains(&self, coords: &[u64]) -> bool {
        let s = self.generator.modulus;
        let r: Vec<u64> = coords.iter().map(|c| c % s).collect();
        self.elements
            .binary_search_by(|e| e.coords.as_slice().cmp(r.as_slice()))
            .is_ok()
    }
}

/// Subgroup generated by any residue vector, coprime or not.
pub fn generated_subgroup(i: &ResidueVector) -> CyclicSubgroup {
    let mut elements: Vec<ResidueVector> = (0..i.modulus).map(|k| i.scale(k)).collect();
    elements.sort();
    elements.dedup();
    CyclicSubgroup {
        generator: i.clone(),
        elements,
    }
}

/// ⟨i⟩ for a generator with coprime coordinates.
pub fn cyclic_subgroup(i: &ResidueVector) -> Result<CyclicSubgroup> {
    if !i.is_coprime() {
        return Err(Error::NotCoprime(i.coords.clone()));
    }
    Ok(generated_subgroup(i))
}

/// One member of C(s): the subgroup and every coprime vector generating it.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyMember {
    pub subgroup: CyclicSubgroup,
    /// Coprime generators in lexicographic order; the first one is the
    /// subgroup's recorded generator.
    pub generators: Vec<ResidueVector>,
}

/// C(s) in dimension d.
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupFamily {
    pub modulus: u64,
    pub dimension: usize,
    pub members: Vec<FamilyMember>,
}

impl SubgroupFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn subgroups(&self) -> impl Iterator<Item = &CyclicSubgroup> {
        self.members.iter().map(|m| &m.subgroup)
    }

    /// Indices of the members containing the given residue.
    pub fn containing(&self, coords: &[u64]) -> Vec<usize> {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| m.subgroup.contains(coords))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Lexicographic order with the first coordinate most significant.
fn lex_vectors(s: u64, d: usize) -> Vec<Vec<u64>> {
    let mut all = Vec::new();
    for_each_in_box(&vec![s; d], |c| all.push(c.to_vec()));
    all.sort();
    all
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k: &u64| k.saturating_mul(*k) <= n).all(|k| !n.is_multiple_of(k))
}

/// All distinct cyclic subgroups with a coprime-coordinate generator.
pub fn family_c(s: u64, d: usize) -> Result<SubgroupFamily> {
    if s < 2 {
        return Err(Error::InvalidInput("modulus must be at least 2".into()));
    }
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mut by_elements: BTreeMap<Vec<ResidueVector>, usize> = BTreeMap::new();
    let mut members: Vec<FamilyMember> = Vec::new();
    for c in lex_vectors(s, d) {
        let v = ResidueVector::new(s, &c)?;
        if !v.is_coprime() {
            continue;
        }
        let g = generated_subgroup(&v);
        match by_elements.get(&g.elements) {
            Some(&idx) => members[idx].generators.push(v),
            None => {
                by_elements.insert(g.elements.clone(), members.len());
                members.push(FamilyMember {
                    generators: vec![v],
                    subgroup: g,
                });
            }
        }
    }
    Ok(SubgroupFamily {
        modulus: s,
        dimension: d,
        members,
    })
}

/// α with Σ α_j q_j = 1, by extended Euclid folded over the coordinates.
pub fn bezout_coefficients(q: &Direction) -> Vec<i128> {
    let c = q.coords();
    let mut g = c[0] as i128;
    let mut coeffs = vec![1i128];
    for &x in &c[1..] {
        let e = g.extended_gcd(&(x as i128));
        let (mut gx, mut a, mut b) = (e.gcd, e.x, e.y);
        if gx < 0 {
            gx = -gx;
            a = -a;
            b = -b;
        }
        for v in coeffs.iter_mut() {
            *v *= a;
        }
        coeffs.push(b);
        g = gx;
    }
    debug_assert_eq!(g, 1);
    coeffs
}

fn minors_gcd(q: &[u64], i: &[u64]) -> u64 {
    let mut g = 0u128;
    for j in 0..q.len() {
        for k in (j + 1)..q.len() {
            let a = i[j] as i128 * q[k] as i128;
            let b = i[k] as i128 * q[j] as i128;
            g = g.gcd(&(a - b).unsigned_abs());
        }
    }
    g as u64
}

fn check_pair(q: &Direction, i: &[u64]) -> Result<u64> {
    if q.dimension() != i.len() {
        return Err(Error::DimensionError {
            expected: q.dimension(),
            found: i.len(),
        });
    }
    let p = minors_gcd(q.coords(), i);
    if p == 0 {
        return Err(Error::OnLine {
            direction: q.coords().to_vec(),
            position: i.to_vec(),
        });
    }
    Ok(p)
}

/// gcd over j<k of |i_j q_k − i_k q_j|, the period of ℓ ↦ gcd(ℓq + i).
pub fn period(q: &Direction, i: &[u64]) -> Result<u64> {
    check_pair(q, i)
}

/// gcd(ℓq + i), computed directly.
pub fn gcd_along_line(q: &Direction, i: &[u64], l: u64) -> Result<u64> {
    check_pair(q, i)?;
    let p = q
        .coords()
        .iter()
        .zip(i)
        .map(|(&a, &b)| a.checked_mul(l).and_then(|x| x.checked_add(b)))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Overflow)?;
    Ok(gcd_all(&p))
}

/// gcd(ℓ + α·i, period), the closed form of gcd(ℓq + i).
pub fn gcd_closed_form(q: &Direction, i: &[u64], l: u64) -> Result<u64> {
    let per = check_pair(q, i)?;
    let alpha = bezout_coefficients(q);
    let dot: i128 = alpha.iter().zip(i).map(|(a, &b)| a * b as i128).sum();
    let x = l as i128 + dot;
    Ok(x.unsigned_abs().gcd(&(per as u128)) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(s: u64, c: &[u64]) -> ResidueVector {
        ResidueVector::new(s, c).unwrap()
    }

    fn coords(g: &CyclicSubgroup) -> Vec<Vec<u64>> {
        g.elements().iter().map(|e| e.coords().to_vec()).collect()
    }

    #[test]
    fn subgroup_examples() {
        let g = cyclic_subgroup(&rv(5, &[0, 1])).unwrap();
        assert_eq!(
            coords(&g),
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]]
        );
        let g = cyclic_subgroup(&rv(2, &[1, 1])).unwrap();
        assert_eq!(coords(&g), vec![vec![0, 0], vec![1, 1]]);
        let g = cyclic_subgroup(&rv(6, &[5, 1])).unwrap();
        assert_eq!(
            coords(&g),
            vec![
                vec![0, 0],
                vec![1, 5],
                vec![2, 4],
                vec![3, 3],
                vec![4, 2],
                vec![5, 1]
            ]
        );
        assert!(matches!(
            cyclic_subgroup(&rv(6, &[2, 4])),
            Err(Error::NotCoprime(_))
        ));
    }

    #[test]
    fn family_counts() {
        for s in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(family_c(s, 2).unwrap().len() as u64, s + 1);
        }
        assert_eq!(family_c(6, 2).unwrap().len(), 12);
        assert_eq!(family_c(5, 3).unwrap().len(), 31);
        for s in [2u64, 3, 5, 7, 11, 13] {
            for d in 1..=3u32 {
                let expected = (s.pow(d) - 1) / (s - 1);
                assert_eq!(family_c(s, d as usize).unwrap().len() as u64, expected);
            }
        }
    }

    #[test]
    fn six_has_twenty_one_coprime_pairs() {
        let f = family_c(6, 2).unwrap();
        let n: usize = f.members.iter().map(|m| m.generators.len()).sum();
        assert_eq!(n, 21);
    }

    #[test]
    fn prime_subgroups_meet_in_zero() {
        for s in [2u64, 3, 5, 7] {
            let f = family_c(s, 2).unwrap();
            for a in f.subgroups() {
                for b in f.subgroups() {
                    if a == b {
                        continue;
                    }
                    let common: Vec<_> =
                        a.elements().iter().filter(|e| b.elements().contains(e)).collect();
                    assert_eq!(common.len(), 1);
                    assert!(common[0].is_zero());
                }
            }
        }
    }

    #[test]
    fn six_subgroups_intersect() {
        let a = cyclic_subgroup(&rv(6, &[1, 1])).unwrap();
        let b = cyclic_subgroup(&rv(6, &[1, 3])).unwrap();
        assert!(a.contains(&[3, 3]) && b.contains(&[3, 3]));
    }

    #[test]
    fn bezout_examples() {
        let q = Direction::new(vec![2, 3]).unwrap();
        assert_eq!(bezout_coefficients(&q), vec![-1, 1]);
        let q = Direction::new(vec![1, 0]).unwrap();
        assert_eq!(bezout_coefficients(&q), vec![1, 0]);
        let q = Direction::new(vec![6, 10, 15]).unwrap();
        let a = bezout_coefficients(&q);
        assert_eq!(6 * a[0] + 10 * a[1] + 15 * a[2], 1);
        let q = Direction::new(vec![0, 0, 1]).unwrap();
        let a = bezout_coefficients(&q);
        assert_eq!(a[2], 1);
    }

    #[test]
    fn gcd_line_examples() {
        let q = Direction::new(vec![2, 3]).unwrap();
        assert_eq!(period(&q, &[1, 1]).unwrap(), 1);
        assert_eq!(gcd_along_line(&q, &[1, 1], 0).unwrap(), 1);
        assert_eq!(gcd_along_line(&q, &[1, 1], 1).unwrap(), 1);
        let q = Direction::new(vec![1, 0]).unwrap();
        assert_eq!(period(&q, &[0, 2]).unwrap(), 2);
        let seq: Vec<u64> = (0..4).map(|l| gcd_along_line(&q, &[0, 2], l).unwrap()).collect();
        assert_eq!(seq, vec![2, 1, 2, 1]);
        let q = Direction::new(vec![1, 1]).unwrap();
        assert_eq!(period(&q, &[0, 3]).unwrap(), 3);
        for l in 0..30 {
            assert_eq!(gcd_along_line(&q, &[0, 3], l).unwrap(), l.gcd(&3));
        }
        assert!(matches!(period(&q, &[2, 2]), Err(Error::OnLine { .. })));
    }

    proptest! {
        #[test]
        fn subgroups_closed(s in 2u64..12, a in 0u64..12, b in 0u64..12, c in 0u64..12) {
            let g = generated_subgroup(&rv(s, &[a, b, c]));
            prop_assert!(g.contains(&[0, 0, 0]));
            for x in g.elements() {
                for y in g.elements() {
                    prop_assert!(g.contains(x.add(y).coords()));
                }
            }
        }

        #[test]
        fn closed_form_matches(q in proptest::collection::vec(0u64..40, 2..4),
                               i in proptest::collection::vec(0u64..40, 4), l in 0u64..200) {
            prop_assume!(q.iter().any(|&x| x > 0));
            let q = crate::lattice::normalize_direction(&q).unwrap();
            let i = &i[..q.dimension()];
            prop_assume!(period(&q, i).is_ok());
            prop_assert_eq!(gcd_along_line(&q, i, l).unwrap(), gcd_closed_form(&q, i, l).unwrap());
        }
    }
}
