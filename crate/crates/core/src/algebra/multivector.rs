//! Sparse multivectors over Euclidean algebras of dimension 2..=16.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::blade::{product_sign, Blade};
use super::{Algebra, AlgebraError, TAU_ZERO};

/// A general element of the algebra: a sparse map from basis blade to
/// coefficient. Exact zeros are never stored. Immutable once built; every
/// operation returns a new value.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    sig: Algebra,
    terms: BTreeMap<Blade, f64>,
}

impl Multivector {
    /// The zero element.
    pub fn zero(sig: Algebra) -> Multivector {
        Multivector {
            sig,
            terms: BTreeMap::new(),
        }
    }

    /// A pure scalar.
    pub fn scalar(sig: Algebra, value: f64) -> Multivector {
        let mut terms = BTreeMap::new();
        if value != 0.0 {
            terms.insert(Blade::SCALAR, value);
        }
        Multivector { sig, terms }
    }

    /// The basis vector `σ_{i+1}` (zero-based `i`).
    ///
    /// Panics if `i` is outside the algebra.
    pub fn basis_vector(sig: Algebra, i: usize) -> Multivector {
        assert!(i < sig.dim(), "basis index {i} out of range for dim {}", sig.dim());
        Multivector::basis_blade(sig, Blade::basis_vector(i))
    }

    /// A unit basis blade.
    ///
    /// Panics if the blade uses indices outside the algebra.
    pub fn basis_blade(sig: Algebra, blade: Blade) -> Multivector {
        assert!(
            blade.mask() < (1u32 << sig.dim()) as u16 || sig.dim() == 16,
            "blade {blade} out of range for dim {}",
            sig.dim()
        );
        let mut terms = BTreeMap::new();
        terms.insert(blade, 1.0);
        Multivector { sig, terms }
    }

    /// A grade-1 element with the given components; the algebra dimension is
    /// taken from the slice length.
    pub fn vector(sig: Algebra, components: &[f64]) -> Result<Multivector, AlgebraError> {
        if components.len() != sig.dim() {
            return Err(AlgebraError::SignatureMismatch {
                left: sig.dim(),
                right: components.len(),
            });
        }
        let mut terms = BTreeMap::new();
        for (i, &c) in components.iter().enumerate() {
            if c != 0.0 {
                terms.insert(Blade::basis_vector(i), c);
            }
        }
        Ok(Multivector { sig, terms })
    }

    /// Build from explicit (blade, coefficient) pairs, summing repeats.
    pub fn from_terms<I>(sig: Algebra, terms: I) -> Multivector
    where
        I: IntoIterator<Item = (Blade, f64)>,
    {
        let mut map = BTreeMap::new();
        for (blade, c) in terms {
            *map.entry(blade).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        Multivector { sig, terms: map }
    }

    pub fn sig(&self) -> Algebra {
        self.sig
    }

    /// Coefficient of a blade, zero if absent.
    pub fn coeff(&self, blade: Blade) -> f64 {
        self.terms.get(&blade).copied().unwrap_or(0.0)
    }

    /// The grade-0 coefficient.
    pub fn scalar_part(&self) -> f64 {
        self.coeff(Blade::SCALAR)
    }

    /// Stored (blade, coefficient) pairs in canonical blade order.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, f64)> + '_ {
        self.terms.iter().map(|(&b, &c)| (b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest absolute coefficient, zero for the zero element.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Grade-1 coefficients as a dense component vector.
    pub fn vector_components(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.sig.dim()];
        for (blade, c) in self.terms() {
            if blade.grade() == 1 {
                let i = blade.indices().next().unwrap();
                out[i] = c;
            }
        }
        out
    }

    fn check_sig(&self, rhs: &Multivector) -> Result<(), AlgebraError> {
        if self.sig == rhs.sig {
            Ok(())
        } else {
            Err(AlgebraError::SignatureMismatch {
                left: self.sig.dim(),
                right: rhs.sig.dim(),
            })
        }
    }

    /// Geometric product. Blade-level rule: result blade is `mask_a XOR
    /// mask_b`; the sign counts the transpositions that sort the concatenated
    /// factor list, with `σ_i σ_i = +1`.
    pub fn geometric(&self, rhs: &Multivector) -> Result<Multivector, AlgebraError> {
        self.check_sig(rhs)?;
        let mut terms: BTreeMap<Blade, f64> = BTreeMap::new();
        for (ba, ca) in self.terms() {
            for (bb, cb) in rhs.terms() {
                let blade = Blade::from_mask(ba.mask() ^ bb.mask());
                let c = product_sign(ba.mask(), bb.mask()) * ca * cb;
                *terms.entry(blade).or_insert(0.0) += c;
            }
        }
        terms.retain(|_, c| *c != 0.0);
        Ok(Multivector { sig: self.sig, terms })
    }

    /// Outer (wedge) product: the grade-raising part of the geometric
    /// product. A blade pair contributes only when its factors are disjoint.
    pub fn outer(&self, rhs: &Multivector) -> Result<Multivector, AlgebraError> {
        self.check_sig(rhs)?;
        let mut terms: BTreeMap<Blade, f64> = BTreeMap::new();
        for (ba, ca) in self.terms() {
            for (bb, cb) in rhs.terms() {
                if ba.mask() & bb.mask() != 0 {
                    continue;
                }
                let blade = Blade::from_mask(ba.mask() | bb.mask());
                let c = product_sign(ba.mask(), bb.mask()) * ca * cb;
                *terms.entry(blade).or_insert(0.0) += c;
            }
        }
        terms.retain(|_, c| *c != 0.0);
        Ok(Multivector { sig: self.sig, terms })
    }

    /// Left contraction: the grade-lowering part, `⟨AB⟩_{k-j}` per blade pair.
    /// A blade pair contributes only when all factors of the left blade occur
    /// in the right one.
    pub fn left_contraction(&self, rhs: &Multivector) -> Result<Multivector, AlgebraError> {
        self.check_sig(rhs)?;
        let mut terms: BTreeMap<Blade, f64> = BTreeMap::new();
        for (ba, ca) in self.terms() {
            for (bb, cb) in rhs.terms() {
                if ba.mask() & bb.mask() != ba.mask() {
                    continue;
                }
                let blade = Blade::from_mask(ba.mask() ^ bb.mask());
                let c = product_sign(ba.mask(), bb.mask()) * ca * cb;
                *terms.entry(blade).or_insert(0.0) += c;
            }
        }
        terms.retain(|_, c| *c != 0.0);
        Ok(Multivector { sig: self.sig, terms })
    }

    /// Commutator product `(AB - BA) / 2`.
    pub fn commutator(&self, rhs: &Multivector) -> Result<Multivector, AlgebraError> {
        let ab = self.geometric(rhs)?;
        let ba = rhs.geometric(self)?;
        Ok((ab - ba) * 0.5)
    }

    /// Reverse: each grade-`k` term scaled by `(-1)^(k(k-1)/2)`.
    pub fn reverse(&self) -> Multivector {
        let terms = self
            .terms()
            .map(|(b, c)| (b, c * b.reverse_sign()))
            .collect();
        Multivector {
            sig: self.sig,
            terms,
        }
    }

    /// Terms of grade `k` only.
    pub fn grade_project(&self, k: usize) -> Multivector {
        let terms = self.terms().filter(|(b, _)| b.grade() == k).collect();
        Multivector {
            sig: self.sig,
            terms,
        }
    }

    /// Sorted list of grades present.
    pub fn grades(&self) -> Vec<usize> {
        let mut gs: Vec<usize> = self.terms.keys().map(|b| b.grade()).collect();
        gs.dedup();
        gs.sort_unstable();
        gs.dedup();
        gs
    }

    /// True when every stored term has even grade.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|b| b.grade() % 2 == 0)
    }

    /// Euclidean coefficient norm `sqrt(Σ c_i²)`. Coincides with
    /// `sqrt(⟨A A†⟩_0)` for homogeneous blades.
    pub fn norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// `A / ‖A‖`; degenerate-magnitude error at or below `TAU_ZERO`.
    pub fn normalized(&self) -> Result<Multivector, AlgebraError> {
        let n = self.norm();
        if n <= TAU_ZERO {
            return Err(AlgebraError::DegenerateMagnitude(n));
        }
        Ok(self * (1.0 / n))
    }

    /// Drop every term whose coefficient is below `threshold` in magnitude.
    pub(crate) fn pruned(mut self, threshold: f64) -> Multivector {
        self.terms.retain(|_, c| c.abs() >= threshold);
        self
    }
}

impl Add for &Multivector {
    type Output = Multivector;

    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.sig, rhs.sig, "signature mismatch in +");
        let mut terms = self.terms.clone();
        for (b, c) in rhs.terms() {
            *terms.entry(b).or_insert(0.0) += c;
        }
        terms.retain(|_, c| *c != 0.0);
        Multivector {
            sig: self.sig,
            terms,
        }
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.sig, rhs.sig, "signature mismatch in -");
        let mut terms = self.terms.clone();
        for (b, c) in rhs.terms() {
            *terms.entry(b).or_insert(0.0) -= c;
        }
        terms.retain(|_, c| *c != 0.0);
        Multivector {
            sig: self.sig,
            terms,
        }
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: f64) -> Multivector {
        let mut terms = self.terms.clone();
        for c in terms.values_mut() {
            *c *= rhs;
        }
        terms.retain(|_, c| *c != 0.0);
        Multivector {
            sig: self.sig,
            terms,
        }
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        &self * rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self * -1.0
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        &self * -1.0
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (blade, c)) in self.terms().enumerate() {
            if i == 0 {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if blade == Blade::SCALAR {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                write!(f, "{blade}")?;
            } else {
                write!(f, "{mag}{blade}")?;
            }
        }
        Ok(())
    }
}
