//! Euclidean geometric-algebra kernel over `R^n` for `2 <= n <= 16`.
//!
//! Values are sparse multivectors keyed by basis-blade bitmask. All
//! operations are pure functions over immutable values and safe to share
//! across threads.

mod blade;
mod multivector;
mod rotor;

pub use blade::Blade;
pub use multivector::Multivector;
pub use rotor::Rotor;

use thiserror::Error;

/// Magnitudes at or below this are treated as degenerate (not normalizable).
pub const TAU_ZERO: f64 = 1e-12;

/// Tolerance on rotor unitarity and unit-bivector checks.
pub const TAU_UNIT: f64 = 1e-9;

/// Relative threshold for pruning numerically-zero residue after a sandwich
/// product: terms below `TAU_PRUNE_REL * max|coefficient|` are dropped.
pub const TAU_PRUNE_REL: f64 = 1e-12;

/// The signature of an algebra: a Euclidean space of `dim` basis vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Algebra {
    dim: u8,
}

impl Algebra {
    /// A Euclidean algebra over `R^dim`. Blade masks are 16 bits wide, so
    /// `2 <= dim <= 16`.
    pub fn new(dim: usize) -> Result<Algebra, AlgebraError> {
        if !(2..=16).contains(&dim) {
            return Err(AlgebraError::DimensionOutOfRange(dim));
        }
        Ok(Algebra { dim: dim as u8 })
    }

    pub fn dim(self) -> usize {
        self.dim as usize
    }
}

/// Errors from kernel operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("algebra dimension {0} out of supported range 2..=16")]
    DimensionOutOfRange(usize),
    #[error("signature mismatch: operands live in R^{left} and R^{right}")]
    SignatureMismatch { left: usize, right: usize },
    #[error("magnitude {0:e} is too small to normalize")]
    DegenerateMagnitude(f64),
    #[error("bivector is not simple (|B ∧ B| = {0:e})")]
    NotSimple(f64),
    #[error("multivector is not unit (norm deviates from 1 by {0:e})")]
    NotUnit(f64),
    #[error("multivector has odd-grade terms, cannot be a rotor")]
    NotEvenGrade,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_guard_rails() {
        assert!(Algebra::new(1).is_err());
        assert!(Algebra::new(17).is_err());
        assert_eq!(Algebra::new(2).unwrap().dim(), 2);
        assert_eq!(Algebra::new(16).unwrap().dim(), 16);
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Algebra>();
        assert_send_sync::<Multivector>();
        assert_send_sync::<Rotor>();
    }
}
