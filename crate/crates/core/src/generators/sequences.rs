//! Unidimensional sequences and the gcd-placement word.

use crate::lattice::{gcd_all, Letter, WordSource};

/// t_n: parity of the binary digit sum of n.
pub fn thue_morse(n: u64) -> u32 {
    n.count_ones() & 1
}

/// n-th letter of the Fibonacci word 0100101001001..., fixed point of
/// 0 ↦ 01, 1 ↦ 0. It is 1 exactly when the Zeckendorf expansion of n uses
/// the smallest Fibonacci number 1 (in the 1, 2, 3, 5, ... basis).
pub fn fibonacci_word(n: u64) -> u32 {
    let mut fibs = vec![1u64, 2];
    while let Some(next) = fibs[fibs.len() - 1].checked_add(fibs[fibs.len() - 2]) {
        if next > n {
            break;
        }
        fibs.push(next);
    }
    let mut rest = n;
    for &f in fibs.iter().rev() {
        if f <= rest {
            rest -= f;
            if f == 1 {
                return 1;
            }
        }
    }
    0
}

/// The Thue–Morse word as a 1-D word source.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThueMorse;

impl WordSource for ThueMorse {
    fn dimension(&self) -> usize {
        1
    }
    fn alphabet_size(&self) -> usize {
        2
    }
    fn letter(&self, p: &[u64]) -> Letter {
        Letter(thue_morse(p[0]))
    }
}

/// The Fibonacci word as a 1-D word source.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fibonacci;

impl WordSource for Fibonacci {
    fn dimension(&self) -> usize {
        1
    }
    fn alphabet_size(&self) -> usize {
        2
    }
    fn letter(&self, p: &[u64]) -> Letter {
        Letter(fibonacci_word(p[0]))
    }
}

/// w(i) = u(gcd(i)), with gcd(0,...,0) = 0.
#[derive(Clone, Debug)]
pub struct GcdWord<U> {
    u: U,
    d: usize,
}

/// Places `u` along every rational direction of N^d.
pub fn gcd_word<U: WordSource>(u: U, d: usize) -> crate::Result<GcdWord<U>> {
    if u.dimension() != 1 {
        return Err(crate::Error::DimensionError {
            expected: 1,
            found: u.dimension(),
        });
    }
    if d == 0 {
        return Err(crate::Error::InvalidInput("dimension must be positive".into()));
    }
    Ok(GcdWord { u, d })
}

impl<U: WordSource> WordSource for GcdWord<U> {
    fn dimension(&self) -> usize {
        self.d
    }
    fn alphabet_size(&self) -> usize {
        self.u.alphabet_size()
    }
    fn letter(&self, p: &[u64]) -> Letter {
        self.u.letter(&[gcd_all(p)])
    }
}
