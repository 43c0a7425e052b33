//! Plane identification and rotor-based frame alignment.
//!
//! Two non-collinear samples of an n-phase sinusoid span the plane that
//! contains the whole signal locus. The wedge of the samples identifies that
//! plane as a bivector; a rotor then aligns it with the canonical σ12 plane,
//! after which every sample of the signal has only two significant
//! coordinates. In three dimensions a single rotor suffices; in higher
//! dimensions two planes need not intersect, so the rotor is built in two
//! steps (vector to σ1, then plane to σ12).

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Blade, Multivector, Rotor, TAU_ZERO};

/// Below this value of `sin(angle between samples)` a pair is reported as
/// degenerate rather than used to build an ill-conditioned plane.
pub const TAU_COLLINEAR: f64 = 1e-6;

/// Alignment residual allowed on the transformed plane (non-σ12 components).
pub const TAU_ALIGN: f64 = 1e-9;

/// Below this norm of `1 + Â B̂†` the closed-form rotor is abandoned for a
/// deterministic half-turn (the antipodal singularity).
pub const TAU_ANTIPODAL: f64 = 1e-6;

/// How a sample pair failed to identify a plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyKind {
    /// The samples are (near-)collinear: a zero-sequence-only signal or a
    /// pair separated by half a period.
    Collinear,
    /// One of the samples is (near-)zero.
    ZeroVector,
    /// Collinear, and the sample spacing is consistent with `T/2` for a
    /// known period.
    NearHalfPeriod,
}

/// Diagnostic attached to degenerate sample pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegeneracyReport {
    pub kind: DegeneracyKind,
    /// `sin` of the angle between the two samples, in `[0, 1]`.
    pub conditioning: f64,
}

impl DegeneracyReport {
    /// Upgrade a `Collinear` report to `NearHalfPeriod` when the sample
    /// spacing `dt` sits within `tol` of an odd multiple of half the given
    /// period.
    pub fn refined_with_period(self, dt: f64, period: f64, tol: f64) -> DegeneracyReport {
        if self.kind != DegeneracyKind::Collinear || period <= 0.0 {
            return self;
        }
        let half = period / 2.0;
        let remainder = (dt / half).rem_euclid(2.0);
        let distance = (remainder - 1.0).abs() * half;
        if distance <= tol {
            DegeneracyReport {
                kind: DegeneracyKind::NearHalfPeriod,
                ..self
            }
        } else {
            self
        }
    }
}

/// Errors from frame identification and transformation.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("degenerate sample pair: {kind:?} (conditioning {conditioning:e})", kind = .0.kind, conditioning = .0.conditioning)]
    Degenerate(DegeneracyReport),
    #[error("zero bivector has no plane")]
    ZeroBivector,
    #[error("plane already lies in σ12")]
    AlreadyAligned,
    #[error("vector does not lie in the plane (wedge residual {residual:e})")]
    NotInPlane { residual: f64 },
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl FrameError {
    fn degenerate(kind: DegeneracyKind, conditioning: f64) -> FrameError {
        FrameError::Degenerate(DegeneracyReport { kind, conditioning })
    }
}

/// Which rotor construction produced a transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMethod {
    /// Single rotor `exp(θ L̂ / 2)` about the mutual rotation plane (3-D only).
    Direct3d,
    /// Two-step construction `R = R2 R1` valid in any dimension.
    TwoStepNd,
}

/// A fully identified frame: the plane bivector, its tilt out of σ12, the
/// aligning rotor, and where the samples came from. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameTransform {
    b: Multivector,
    theta: f64,
    l_hat: Option<Multivector>,
    rotor: Rotor,
    method: FrameMethod,
    source: Option<(f64, f64)>,
}

/// Result of projecting one sample into the aligned frame.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedSample {
    pub p: f64,
    pub s: f64,
    /// Components beyond the first two; at most `TAU_ALIGN * ‖v‖` for
    /// in-plane samples.
    pub residual: Vec<f64>,
}

impl TransformedSample {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn vector_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn to_multivector(sig: Algebra, v: &[f64]) -> Result<Multivector, FrameError> {
    if v.len() != sig.dim() {
        return Err(FrameError::DimensionMismatch {
            expected: sig.dim(),
            got: v.len(),
        });
    }
    Ok(Multivector::vector(sig, v)?)
}

/// Identify the plane spanned by two samples as the bivector `v1 ∧ v2`.
///
/// Collinear pairs (zero-sequence-only signals, or spacings of half a
/// period) and zero samples are reported as typed degeneracies, never as an
/// ill-conditioned plane.
pub fn identify_plane(v1: &[f64], v2: &[f64]) -> Result<Multivector, FrameError> {
    identify_plane_with_tolerance(v1, v2, TAU_COLLINEAR)
}

/// [`identify_plane`] with an explicit collinearity threshold on
/// `sin(angle between samples)`.
pub fn identify_plane_with_tolerance(
    v1: &[f64],
    v2: &[f64],
    tau_collinear: f64,
) -> Result<Multivector, FrameError> {
    if v1.len() != v2.len() {
        return Err(FrameError::DimensionMismatch {
            expected: v1.len(),
            got: v2.len(),
        });
    }
    let sig = Algebra::new(v1.len())?;
    let n1 = vector_norm(v1);
    let n2 = vector_norm(v2);
    if n1 <= TAU_ZERO || n2 <= TAU_ZERO {
        return Err(FrameError::degenerate(DegeneracyKind::ZeroVector, 0.0));
    }
    let m1 = to_multivector(sig, v1)?;
    let m2 = to_multivector(sig, v2)?;
    let b = m1.outer(&m2)?;
    let conditioning = (b.norm() / (n1 * n2)).min(1.0);
    if conditioning <= tau_collinear {
        return Err(FrameError::degenerate(
            DegeneracyKind::Collinear,
            conditioning,
        ));
    }
    Ok(b)
}

/// Angle between a plane bivector and the canonical σ12 plane, in `[0, π]`:
/// `θ = arccos(⟨σ12 B̂†⟩_0)`, which reduces to `arccos(B12 / ‖B‖)`.
pub fn plane_angle(b: &Multivector) -> Result<f64, FrameError> {
    let norm = b.norm();
    if norm <= TAU_ZERO {
        return Err(FrameError::ZeroBivector);
    }
    let b12 = b.coeff(Blade::from_indices(&[0, 1]));
    Ok((b12 / norm).clamp(-1.0, 1.0).acos())
}

/// The unit plane of rotation carrying `B` onto σ12 in three dimensions:
/// `L̂ = (-B23 σ13 + B13 σ23) / sqrt(B13² + B23²)`.
pub fn rotation_plane(b: &Multivector) -> Result<Multivector, FrameError> {
    let sig = b.sig();
    if sig.dim() != 3 {
        return Err(FrameError::DimensionMismatch {
            expected: 3,
            got: sig.dim(),
        });
    }
    let b13 = b.coeff(Blade::from_indices(&[0, 2]));
    let b23 = b.coeff(Blade::from_indices(&[1, 2]));
    let denom = (b13 * b13 + b23 * b23).sqrt();
    if denom <= TAU_ZERO {
        return Err(FrameError::AlreadyAligned);
    }
    let s13 = Multivector::basis_blade(sig, Blade::from_indices(&[0, 2]));
    let s23 = Multivector::basis_blade(sig, Blade::from_indices(&[1, 2]));
    Ok((s13 * (-b23) + s23 * b13) * (1.0 / denom))
}

/// Deterministic half-turn in the plane of the two given axes; used at the
/// antipodal singularity where the closed-form rotor denominator vanishes.
fn half_turn(sig: Algebra, i: usize, j: usize) -> Rotor {
    let plane = Multivector::basis_blade(sig, Blade::from_indices(&[i, j]));
    Rotor::exp_simple_bivector(std::f64::consts::PI, &plane).expect("canonical plane is simple")
}

/// Rotor `(1 + target · x̂†) / ‖...‖` aligning the unit element `x_hat` with
/// `target`, with the antipodal fallback `fallback` when the denominator is
/// degenerate. `x_hat` and `target` must be unit blades of equal grade.
fn alignment_rotor(
    target: &Multivector,
    x_hat: &Multivector,
    fallback: (usize, usize),
) -> Result<Rotor, FrameError> {
    let sig = target.sig();
    let m = Multivector::scalar(sig, 1.0) + target.geometric(&x_hat.reverse())?;
    let norm = m.norm();
    if norm <= TAU_ANTIPODAL {
        return Ok(half_turn(sig, fallback.0, fallback.1));
    }
    Ok(Rotor::try_from_multivector(m * (1.0 / norm))?)
}

/// Build the 3-D transform directly: `R = exp(θ L̂ / 2)` with θ from
/// [`plane_angle`] and L̂ from [`rotation_plane`].
pub fn rotor_align_3d(b: &Multivector) -> Result<FrameTransform, FrameError> {
    let sig = b.sig();
    if sig.dim() != 3 {
        return Err(FrameError::DimensionMismatch {
            expected: 3,
            got: sig.dim(),
        });
    }
    let theta = plane_angle(b)?;
    let (l_hat, rotor) = match rotation_plane(b) {
        Ok(l_hat) => {
            let rotor = Rotor::exp_simple_bivector(theta, &l_hat)?;
            (Some(l_hat), rotor)
        }
        // Plane already in σ12: identity when oriented with it, a half-turn
        // in σ23 when oriented against it.
        Err(FrameError::AlreadyAligned) => {
            let b12 = b.coeff(Blade::from_indices(&[0, 1]));
            let rotor = if b12 >= 0.0 {
                Rotor::identity(sig)
            } else {
                half_turn(sig, 1, 2)
            };
            (None, rotor)
        }
        Err(e) => return Err(e),
    };
    Ok(FrameTransform {
        b: b.clone(),
        theta,
        l_hat,
        rotor,
        method: FrameMethod::Direct3d,
        source: None,
    })
}

/// Build the transform in any dimension by the two-step construction:
/// `R1` rotates `v̂1` onto σ1, which forces the rotated plane to intersect
/// σ12 along σ1; `R2` then aligns it; `R = R2 R1`.
///
/// `v1` must lie in the plane of `b` (it does whenever `b = v1 ∧ v2`).
pub fn rotor_align_nd(v1: &[f64], b: &Multivector) -> Result<FrameTransform, FrameError> {
    let sig = b.sig();
    let v1_mv = to_multivector(sig, v1)?;
    let n1 = v1_mv.norm();
    let nb = b.norm();
    if n1 <= TAU_ZERO {
        return Err(FrameError::degenerate(DegeneracyKind::ZeroVector, 0.0));
    }
    if nb <= TAU_ZERO {
        return Err(FrameError::ZeroBivector);
    }
    let wedge = v1_mv.outer(b)?;
    if wedge.norm() > 1e-9 * n1 * nb {
        return Err(FrameError::NotInPlane {
            residual: wedge.norm() / (n1 * nb),
        });
    }

    let v1_hat = v1_mv * (1.0 / n1);
    let b_hat = b * (1.0 / nb);
    let sigma1 = Multivector::basis_vector(sig, 0);
    let sigma12 = Multivector::basis_blade(sig, Blade::from_indices(&[0, 1]));

    let r1 = alignment_rotor(&sigma1, &v1_hat, (0, 1))?;
    let b_cross = r1.sandwich(&b_hat)?;
    let r2 = alignment_rotor(&sigma12, &b_cross, (1, 2))?;
    let rotor = r2.compose(&r1)?;

    Ok(FrameTransform {
        b: b.clone(),
        theta: plane_angle(b)?,
        l_hat: None,
        rotor,
        method: FrameMethod::TwoStepNd,
        source: None,
    })
}

impl FrameTransform {
    /// Identify the plane of two samples and build the aligning rotor,
    /// choosing the direct construction for three phases and the two-step
    /// construction otherwise.
    pub fn from_samples(v1: &[f64], v2: &[f64]) -> Result<FrameTransform, FrameError> {
        let method = if v1.len() == 3 {
            FrameMethod::Direct3d
        } else {
            FrameMethod::TwoStepNd
        };
        FrameTransform::from_samples_with(v1, v2, method)
    }

    /// [`FrameTransform::from_samples`] with an explicit method override.
    pub fn from_samples_with(
        v1: &[f64],
        v2: &[f64],
        method: FrameMethod,
    ) -> Result<FrameTransform, FrameError> {
        let b = identify_plane(v1, v2)?;
        match method {
            FrameMethod::Direct3d => rotor_align_3d(&b),
            FrameMethod::TwoStepNd => rotor_align_nd(v1, &b),
        }
    }

    /// Attach the sample times the transform was built from.
    pub fn with_source(mut self, t1: f64, t2: f64) -> FrameTransform {
        self.source = Some((t1, t2));
        self
    }

    /// The identified plane bivector (un-normalized, orientation from the
    /// sample order).
    pub fn plane(&self) -> &Multivector {
        &self.b
    }

    /// Angle between the plane and σ12, in `[0, π]`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The rotation plane of the direct 3-D construction, if that path was
    /// taken and the plane was not already aligned.
    pub fn rotation_plane(&self) -> Option<&Multivector> {
        self.l_hat.as_ref()
    }

    pub fn rotor(&self) -> &Rotor {
        &self.rotor
    }

    pub fn method(&self) -> FrameMethod {
        self.method
    }

    pub fn source(&self) -> Option<(f64, f64)> {
        self.source
    }

    /// Project one sample into the aligned frame: the first two coordinates
    /// of `R v R†` plus whatever remains beyond them.
    pub fn transform(&self, v: &[f64]) -> Result<TransformedSample, FrameError> {
        let sig = self.b.sig();
        let mv = to_multivector(sig, v)?;
        let rotated = self.rotor.sandwich(&mv)?;
        let comps = rotated.vector_components();
        Ok(TransformedSample {
            p: comps[0],
            s: comps[1],
            residual: comps[2..].to_vec(),
        })
    }

    /// Max absolute non-σ12 component of `R B̂ R†`; at most [`TAU_ALIGN`] for
    /// every transform this module builds.
    pub fn alignment_residual(&self) -> f64 {
        let b_hat = self.b.normalized().expect("plane norm checked at build");
        let aligned = self.rotor.sandwich(&b_hat).expect("same signature");
        aligned
            .terms()
            .filter(|(blade, _)| *blade != Blade::from_indices(&[0, 1]))
            .fold(0.0, |m, (_, c)| m.max(c.abs()))
    }
}

/// Power-invariant Clarke transformation of one three-phase sample:
/// `α = sqrt(2/3) (v_a - v_b/2 - v_c/2)`,
/// `β = sqrt(2/3) (sqrt(3)/2) (v_b - v_c)`,
/// `0 = (v_a + v_b + v_c) / sqrt(3)`.
pub fn clarke_transform(v: &[f64; 3]) -> [f64; 3] {
    let k = (2.0f64 / 3.0).sqrt();
    let alpha = k * (v[0] - 0.5 * v[1] - 0.5 * v[2]);
    let beta = k * (3.0f64.sqrt() / 2.0) * (v[1] - v[2]);
    let zero = (v[0] + v[1] + v[2]) / 3.0f64.sqrt();
    [alpha, beta, zero]
}

/// Tilt of the identified plane out of σ12 and the derived unbalance degree
/// `sin θ` (0 means the locus already lies in σ12).
pub fn unbalance_diagnostic(b: &Multivector) -> Result<(f64, f64), FrameError> {
    let theta = plane_angle(b)?;
    Ok((theta, theta.sin()))
}
