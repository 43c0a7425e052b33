//! Basis blades encoded as bitmasks.

use std::fmt;

/// A canonical basis blade of a Euclidean geometric algebra.
///
/// Bit `i` of the mask is set iff `σ_{i+1}` is a factor of the blade. Factors
/// are always kept in ascending index order; any sign produced by reordering
/// is carried by the term coefficient, never by the blade itself.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Blade(u16);

impl Blade {
    /// The empty blade (the scalar unit).
    pub const SCALAR: Blade = Blade(0);

    /// Blade from a raw bitmask.
    pub fn from_mask(mask: u16) -> Blade {
        Blade(mask)
    }

    /// The basis vector `σ_{i+1}` (zero-based `i`).
    pub fn basis_vector(i: usize) -> Blade {
        debug_assert!(i < 16);
        Blade(1 << i)
    }

    /// Blade with the given ascending, distinct basis-vector indices (zero-based).
    pub fn from_indices(indices: &[usize]) -> Blade {
        let mut mask = 0u16;
        for &i in indices {
            debug_assert!(i < 16);
            mask |= 1 << i;
        }
        debug_assert_eq!(mask.count_ones() as usize, indices.len(), "repeated index");
        Blade(mask)
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    /// Number of basis-vector factors.
    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Zero-based indices of the basis-vector factors, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..16).filter(move |i| mask & (1 << i) != 0)
    }

    /// Sign of the reverse operation on this blade: `(-1)^(k(k-1)/2)`.
    pub fn reverse_sign(self) -> f64 {
        let k = self.grade();
        if (k * (k.saturating_sub(1)) / 2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "σ")?;
        if self.indices().all(|i| i < 9) {
            for i in self.indices() {
                write!(f, "{}", i + 1)?;
            }
        } else {
            let labels: Vec<String> = self.indices().map(|i| (i + 1).to_string()).collect();
            write!(f, "{{{}}}", labels.join(","))?;
        }
        Ok(())
    }
}

/// Sign of the geometric product of two canonical blades in a Euclidean
/// algebra. The result blade is `a XOR b`; the sign counts the transpositions
/// needed to sort the concatenated factor list, one popcount per shifted
/// prefix of `a`.
pub(crate) fn product_sign(a: u16, b: u16) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grades_and_indices() {
        let b = Blade::from_indices(&[0, 2, 3]);
        assert_eq!(b.grade(), 3);
        assert_eq!(b.indices().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(Blade::SCALAR.grade(), 0);
    }

    #[test]
    fn product_signs_match_transposition_counts() {
        let s1 = Blade::basis_vector(0).mask();
        let s2 = Blade::basis_vector(1).mask();
        // σ1 σ2 = +σ12, σ2 σ1 = -σ12
        assert_eq!(product_sign(s1, s2), 1.0);
        assert_eq!(product_sign(s2, s1), -1.0);
        // σ12 σ12 = -1
        let s12 = s1 | s2;
        assert_eq!(product_sign(s12, s12), -1.0);
        // σ13 σ12 = +σ23
        let s13 = Blade::from_indices(&[0, 2]).mask();
        assert_eq!(product_sign(s13, s12), 1.0);
    }

    #[test]
    fn reverse_signs_follow_grade_pattern() {
        assert_eq!(Blade::SCALAR.reverse_sign(), 1.0);
        assert_eq!(Blade::basis_vector(3).reverse_sign(), 1.0);
        assert_eq!(Blade::from_indices(&[0, 1]).reverse_sign(), -1.0);
        assert_eq!(Blade::from_indices(&[0, 1, 2]).reverse_sign(), -1.0);
        assert_eq!(Blade::from_indices(&[0, 1, 2, 3]).reverse_sign(), 1.0);
    }

    #[test]
    fn display_uses_sigma_notation() {
        assert_eq!(Blade::SCALAR.to_string(), "1");
        assert_eq!(Blade::from_indices(&[0, 1]).to_string(), "σ12");
        assert_eq!(Blade::from_indices(&[9, 11]).to_string(), "σ{10,12}");
    }
}
