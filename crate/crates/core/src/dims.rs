use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Domain sizes of the three observed variables: `l` values for the
/// instrument Z, `m` for the outcome Y, `n` for the treatment X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub l: usize,
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(l: usize, m: usize, n: usize) -> Result<Dims> {
        if l < 1 || m < 1 || n < 1 {
            return Err(Error::Range(format!(
                "domain sizes must all be at least 1, got l={l}, m={m}, n={n}"
            )));
        }
        // The flat conditional-distribution vector must be addressable.
        l.checked_mul(m)
            .and_then(|lm| lm.checked_mul(n))
            .ok_or_else(|| Error::Range(format!("l*m*n overflows for l={l}, m={m}, n={n}")))?;
        Ok(Dims { l, m, n })
    }

    /// Length of the flat conditional-distribution vector, m·n·l.
    pub fn dim_f(&self) -> usize {
        self.l * self.m * self.n
    }

    /// Number of response pairs (g: Z→X, h: X→Y), n^l·m^n.
    pub fn pair_count(&self) -> BigUint {
        BigUint::from(self.n).pow(self.l as u32) * BigUint::from(self.m).pow(self.n as u32)
    }

    /// Number of instrumental-inequality rows, n·l^m.
    pub fn pearl_row_count(&self) -> BigUint {
        BigUint::from(self.n) * BigUint::from(self.l).pow(self.m as u32)
    }

    /// Flat position of P(x_i, y_j | z_k): x slowest, then z, then y fastest.
    ///
    /// Indices are 1-based, the returned offset 0-based. The map is a
    /// bijection onto `0..dim_f()`.
    pub fn index(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        if i < 1 || i > self.n {
            return Err(Error::Range(format!("x-index {i} outside 1..={}", self.n)));
        }
        if j < 1 || j > self.m {
            return Err(Error::Range(format!("y-index {j} outside 1..={}", self.m)));
        }
        if k < 1 || k > self.l {
            return Err(Error::Range(format!("z-index {k} outside 1..={}", self.l)));
        }
        Ok((i - 1) * self.l * self.m + (k - 1) * self.m + (j - 1))
    }

    /// Inverse of [`Dims::index`].
    pub fn coord(&self, offset: usize) -> (usize, usize, usize) {
        debug_assert!(offset < self.dim_f());
        let i = offset / (self.l * self.m);
        let rem = offset % (self.l * self.m);
        let k = rem / self.m;
        let j = rem % self.m;
        (i + 1, j + 1, k + 1)
    }

    /// All (i, j, k) triples in canonical flat order.
    pub fn coords(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.dim_f()).map(move |off| self.coord(off))
    }

    /// Human-readable label of one flat coordinate, e.g. `P(x1,y2|z1)`.
    pub fn coord_label(&self, offset: usize) -> String {
        let (i, j, k) = self.coord(offset);
        format!("P(x{i},y{j}|z{k})")
    }

    /// True when `self` extends `smaller` on every axis.
    pub fn contains(&self, smaller: &Dims) -> bool {
        self.l >= smaller.l && self.m >= smaller.m && self.n >= smaller.n
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(l={}, m={}, n={})", self.l, self.m, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_matches_hand_computed_offsets() {
        let d = Dims::new(2, 2, 2).unwrap();
        assert_eq!(d.index(1, 1, 1).unwrap(), 0);
        assert_eq!(d.index(2, 2, 2).unwrap(), 7);
        let d = Dims::new(3, 2, 2).unwrap();
        assert_eq!(d.index(1, 2, 3).unwrap(), 5);
    }

    #[test]
    fn index_is_a_bijection() {
        for (l, m, n) in [(1, 1, 1), (2, 2, 2), (3, 2, 4), (2, 5, 3)] {
            let d = Dims::new(l, m, n).unwrap();
            let mut seen = vec![false; d.dim_f()];
            for i in 1..=n {
                for j in 1..=m {
                    for k in 1..=l {
                        let off = d.index(i, j, k).unwrap();
                        assert!(!seen[off]);
                        seen[off] = true;
                        assert_eq!(d.coord(off), (i, j, k));
                    }
                }
            }
            assert!(seen.into_iter().all(|b| b));
        }
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let d = Dims::new(2, 2, 2).unwrap();
        assert!(d.index(0, 1, 1).is_err());
        assert!(d.index(3, 1, 1).is_err());
        assert!(d.index(1, 3, 1).is_err());
        assert!(d.index(1, 1, 3).is_err());
    }

    #[test]
    fn derived_sizes_are_consistent() {
        let d = Dims::new(2, 2, 2).unwrap();
        assert_eq!(d.dim_f(), 8);
        assert_eq!(d.pair_count(), BigUint::from(16u32));
        assert_eq!(d.pearl_row_count(), BigUint::from(8u32));
        let d = Dims::new(3, 2, 2).unwrap();
        assert_eq!(d.pair_count(), BigUint::from(32u32));
        assert_eq!(d.pearl_row_count(), BigUint::from(18u32));
    }

    #[test]
    fn zero_sized_domains_are_rejected() {
        assert!(Dims::new(0, 1, 1).is_err());
        assert!(Dims::new(1, 0, 1).is_err());
        assert!(Dims::new(1, 1, 0).is_err());
    }
}
