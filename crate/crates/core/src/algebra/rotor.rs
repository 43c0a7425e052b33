//! Rotors: even-grade unit multivectors that carry rotations.

use std::fmt;

use super::blade::Blade;
use super::multivector::Multivector;
use super::{Algebra, AlgebraError, TAU_PRUNE_REL, TAU_UNIT};

/// An even-grade multivector `R` with `R R† = 1` (within `TAU_UNIT`).
///
/// Rotors built here are products of exponentials of simple bivectors, so the
/// sandwich product preserves grades up to floating-point residue.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotor {
    mv: Multivector,
}

impl Rotor {
    /// The identity rotation.
    pub fn identity(sig: Algebra) -> Rotor {
        Rotor {
            mv: Multivector::scalar(sig, 1.0),
        }
    }

    /// Validate an even-grade unit multivector as a rotor.
    pub fn try_from_multivector(mv: Multivector) -> Result<Rotor, AlgebraError> {
        if !mv.is_even() {
            return Err(AlgebraError::NotEvenGrade);
        }
        let dev = (mv.norm() - 1.0).abs();
        if dev > TAU_UNIT {
            return Err(AlgebraError::NotUnit(dev));
        }
        Ok(Rotor { mv })
    }

    /// The bivector exponential in closed form:
    /// `exp(θ L̂ / 2) = cos(θ/2) + sin(θ/2) L̂`.
    ///
    /// `plane` must be a unit simple bivector; `θ` is the full rotation angle.
    pub fn exp_simple_bivector(theta: f64, plane: &Multivector) -> Result<Rotor, AlgebraError> {
        if plane.grades() != vec![2] {
            return Err(AlgebraError::NotSimple(f64::NAN));
        }
        let dev = (plane.norm() - 1.0).abs();
        if dev > TAU_UNIT {
            return Err(AlgebraError::NotUnit(dev));
        }
        let wedge = plane.outer(plane)?;
        if wedge.norm() > TAU_UNIT {
            return Err(AlgebraError::NotSimple(wedge.norm()));
        }
        let half = theta / 2.0;
        let mv = Multivector::scalar(plane.sig(), half.cos()) + plane * half.sin();
        Ok(Rotor { mv })
    }

    /// The sandwich product `R X R†`. Grade-preserving for the rotors built
    /// by this crate; numerically-zero cross-grade residue below
    /// `TAU_PRUNE_REL * max|coefficient|` is pruned.
    pub fn sandwich(&self, x: &Multivector) -> Result<Multivector, AlgebraError> {
        let out = self.mv.geometric(x)?.geometric(&self.mv.reverse())?;
        let threshold = TAU_PRUNE_REL * out.max_abs_coeff();
        Ok(out.pruned(threshold))
    }

    /// Composition `self ∘ inner`: apply `inner` first. Equal to the
    /// geometric product of the two rotors.
    pub fn compose(&self, inner: &Rotor) -> Result<Rotor, AlgebraError> {
        let mv = self.mv.geometric(&inner.mv)?;
        Rotor::try_from_multivector(mv)
    }

    /// The reverse rotor (the inverse rotation).
    pub fn reverse(&self) -> Rotor {
        Rotor {
            mv: self.mv.reverse(),
        }
    }

    pub fn sig(&self) -> Algebra {
        self.mv.sig()
    }

    pub fn coeff(&self, blade: Blade) -> f64 {
        self.mv.coeff(blade)
    }

    pub fn as_multivector(&self) -> &Multivector {
        &self.mv
    }

    /// Deviation of `R R†` from 1 in max-coefficient norm.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self
            .mv
            .geometric(&self.mv.reverse())
            .expect("same signature");
        (prod - Multivector::scalar(self.mv.sig(), 1.0)).max_abs_coeff()
    }
}

impl fmt::Display for Rotor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.mv, f)
    }
}
