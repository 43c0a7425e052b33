//! Reference-frame identification and transformation for unbalanced n-phase
//! sinusoidal signals, built on a small Euclidean geometric-algebra kernel.
//!
//! The locus of an n-phase sinusoid is a planar curve. Two non-collinear
//! samples identify that plane as a bivector; a rotor then aligns the plane
//! with the canonical σ12 plane, reducing the signal to two coordinates for
//! any degree of unbalance. The crate provides:
//!
//! - [`algebra`]: sparse multivectors, products, and rotors over `R^n`;
//! - [`signal`]: the multi-phase phasor model, sampling, and CSV interchange;
//! - [`frame`]: plane identification, rotor construction (direct 3-D and
//!   two-step n-D), the 2-coordinate transform, and the Clarke baseline;
//! - [`estimator`]: streaming frame identification over sampled data;
//! - [`sim`]: a discrete-time grid-following converter current loop that
//!   exercises the transform against the Clarke frame.

pub mod algebra;
pub mod estimator;
pub mod frame;
pub mod signal;
pub mod sim;

pub use algebra::{Algebra, AlgebraError, Blade, Multivector, Rotor};
pub use estimator::{EstimatorConfig, EstimatorError, FrameEstimator, FrameUpdate};
pub use frame::{
    clarke_transform, identify_plane, plane_angle, rotation_plane, rotor_align_3d,
    rotor_align_nd, unbalance_diagnostic, DegeneracyKind, DegeneracyReport, FrameError,
    FrameMethod, FrameTransform, TransformedSample,
};
pub use signal::{PhasorSpec, PsDecomposition, SampleSeries, SignalError};
pub use sim::{
    geometric_power, parse_config_str, reference_currents, run_scenario, ControlFrame,
    GeometricPower, PowerReference, PrController, PrParams, SimConfig, SimError, SimRecord,
    SimTrace,
};
