//! Shared inputs for the benchmark targets.

use psframe::signal::{Phasor, PhasorSpec};

/// The unbalanced three-phase fixture used across benchmarks.
pub fn unbalanced_three_phase() -> PhasorSpec {
    PhasorSpec::from_frequency(
        50.0,
        vec![
            Phasor::new(1.70, 0.0),
            Phasor::new(0.70, -2.1),
            Phasor::new(1.40, 2.2),
        ],
    )
    .expect("valid spec")
}

/// A six-phase spec exercising the n-dimensional path.
pub fn unbalanced_six_phase() -> PhasorSpec {
    PhasorSpec::from_frequency(
        50.0,
        vec![
            Phasor::new(1.0, 0.0),
            Phasor::new(1.1, -1.2),
            Phasor::new(0.8, 1.9),
            Phasor::new(0.5, 2.8),
            Phasor::new(1.3, -0.4),
            Phasor::new(0.9, 0.7),
        ],
    )
    .expect("valid spec")
}
