//! Multi-phase sinusoidal signal model, p/s decomposition, sampling, and CSV
//! interchange.

mod csv;

pub use csv::{read_csv, write_csv};

use std::f64::consts::TAU;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Multivector};

/// Errors from signal construction, sampling, and CSV interchange.
#[derive(Debug, Error)]
pub enum SignalError {
    #[error("invalid phasor spec: {0}")]
    InvalidSpec(String),
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One phase of the model: amplitude `V_k` and phase `φ_k` of
/// `V_k cos(ωt + φ_k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phasor {
    pub amplitude: f64,
    pub phase: f64,
}

impl Phasor {
    pub fn new(amplitude: f64, phase: f64) -> Phasor {
        Phasor { amplitude, phase }
    }
}

/// An n-phase sinusoidal signal: common angular frequency ω plus per-phase
/// amplitude and phase. Component `k` is `V_k cos(ωt + φ_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasorSpec {
    omega: f64,
    phases: Vec<Phasor>,
}

impl PhasorSpec {
    /// Build from angular frequency ω (rad/s). Requires `ω > 0`, at least
    /// two phases, and non-negative amplitudes.
    pub fn new(omega: f64, phases: Vec<Phasor>) -> Result<PhasorSpec, SignalError> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(SignalError::NonPositive {
                what: "omega",
                value: omega,
            });
        }
        if phases.len() < 2 {
            return Err(SignalError::InvalidSpec(format!(
                "need at least 2 phases, got {}",
                phases.len()
            )));
        }
        if phases.len() > 16 {
            return Err(SignalError::InvalidSpec(format!(
                "at most 16 phases supported, got {}",
                phases.len()
            )));
        }
        if let Some(p) = phases.iter().find(|p| !p.amplitude.is_finite() || p.amplitude < 0.0) {
            return Err(SignalError::InvalidSpec(format!(
                "amplitudes must be non-negative, got {}",
                p.amplitude
            )));
        }
        Ok(PhasorSpec { omega, phases })
    }

    /// Build from frequency in Hz.
    pub fn from_frequency(hz: f64, phases: Vec<Phasor>) -> Result<PhasorSpec, SignalError> {
        PhasorSpec::new(TAU * hz, phases)
    }

    /// A balanced positive-sequence system: equal amplitudes, phases stepped
    /// by `-2π/n`.
    pub fn balanced(omega: f64, amplitude: f64, n: usize) -> Result<PhasorSpec, SignalError> {
        let phases = (0..n)
            .map(|k| Phasor::new(amplitude, -TAU * k as f64 / n as f64))
            .collect();
        PhasorSpec::new(omega, phases)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Fundamental period `T = 2π/ω`.
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[Phasor] {
        &self.phases
    }

    pub fn algebra(&self) -> Algebra {
        Algebra::new(self.phases.len()).expect("phase count validated at construction")
    }

    /// Instantaneous sample: component `k` is `V_k cos(ωt + φ_k)`.
    pub fn synthesize(&self, t: f64) -> Vec<f64> {
        self.phases
            .iter()
            .map(|p| p.amplitude * (self.omega * t + p.phase).cos())
            .collect()
    }

    /// The in-phase / quadrature decomposition with
    /// `v(t) = cos(ωt) p - sin(ωt) s`.
    pub fn to_ps(&self) -> PsDecomposition {
        let sig = self.algebra();
        let p: Vec<f64> = self
            .phases
            .iter()
            .map(|ph| ph.amplitude * ph.phase.cos())
            .collect();
        let s: Vec<f64> = self
            .phases
            .iter()
            .map(|ph| ph.amplitude * ph.phase.sin())
            .collect();
        PsDecomposition {
            p: Multivector::vector(sig, &p).expect("lengths match"),
            s: Multivector::vector(sig, &s).expect("lengths match"),
        }
    }

    /// Uniform sampling at `fs` Hz over `duration` seconds; row `i` is
    /// `synthesize(i / fs)`.
    pub fn sample_series(&self, fs: f64, duration: f64) -> Result<SampleSeries, SignalError> {
        if !fs.is_finite() || fs <= 0.0 {
            return Err(SignalError::NonPositive {
                what: "fs",
                value: fs,
            });
        }
        if !duration.is_finite() || duration < 0.0 {
            return Err(SignalError::NonPositive {
                what: "duration",
                value: duration,
            });
        }
        let count = (duration * fs).round() as usize;
        let mut series = SampleSeries::empty(self.phase_count());
        for i in 0..count {
            let t = i as f64 / fs;
            series.push(t, &self.synthesize(t))?;
        }
        Ok(series)
    }
}

/// The pair of grade-1 vectors `p = Σ V_k cos φ_k σ_k` and
/// `s = Σ V_k sin φ_k σ_k` spanning the signal plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PsDecomposition {
    pub p: Multivector,
    pub s: Multivector,
}

impl PsDecomposition {
    /// Evaluate `v(t) = cos(ωt) p - sin(ωt) s` as a component vector.
    pub fn evaluate(&self, omega: f64, t: f64) -> Vec<f64> {
        let (sin, cos) = (omega * t).sin_cos();
        let p = self.p.vector_components();
        let s = self.s.vector_components();
        p.iter().zip(&s).map(|(pk, sk)| cos * pk - sin * sk).collect()
    }
}

/// A time-stamped sequence of n-phase samples with strictly increasing
/// timestamps.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSeries {
    phase_count: usize,
    timestamps: Vec<f64>,
    samples: Vec<f64>, // row-major, phase_count per row
}

impl SampleSeries {
    pub fn empty(phase_count: usize) -> SampleSeries {
        SampleSeries {
            phase_count,
            timestamps: Vec::new(),
            samples: Vec::new(),
        }
    }

    /// Append a row. Timestamps must be strictly increasing and the row
    /// arity must match.
    pub fn push(&mut self, t: f64, row: &[f64]) -> Result<(), SignalError> {
        if row.len() != self.phase_count {
            return Err(SignalError::InvalidSpec(format!(
                "row arity {} does not match phase count {}",
                row.len(),
                self.phase_count
            )));
        }
        if let Some(&last) = self.timestamps.last() {
            if t <= last {
                return Err(SignalError::InvalidSpec(format!(
                    "timestamps must be strictly increasing ({t} after {last})"
                )));
            }
        }
        self.timestamps.push(t);
        self.samples.extend_from_slice(row);
        Ok(())
    }

    pub fn phase_count(&self) -> usize {
        self.phase_count
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamp(&self, i: usize) -> f64 {
        self.timestamps[i]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[i * self.phase_count..(i + 1) * self.phase_count]
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.timestamps
            .iter()
            .copied()
            .zip(self.samples.chunks_exact(self.phase_count))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_spec() -> PhasorSpec {
        // Three-phase fixture with heavy amplitude and phase unbalance.
        PhasorSpec::from_frequency(
            50.0,
            vec![
                Phasor::new(1.70, 0.0),
                Phasor::new(0.70, -2.1),
                Phasor::new(1.40, 2.2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn synthesize_matches_fixture_at_t0_and_quarter_period() {
        let spec = fixture_spec();
        let v1 = spec.synthesize(0.0);
        assert!((v1[0] - 1.70).abs() < 0.005);
        assert!((v1[1] - (-0.35)).abs() < 0.005);
        assert!((v1[2] - (-0.82)).abs() < 0.005);

        let v2 = spec.synthesize(spec.period() / 4.0);
        assert!((v2[0] - 0.00).abs() < 0.005);
        assert!((v2[1] - 0.60).abs() < 0.005);
        assert!((v2[2] - (-1.13)).abs() < 0.005);
    }

    #[test]
    fn synthesis_is_periodic() {
        let spec = fixture_spec();
        let t = 0.0137;
        let a = spec.synthesize(t);
        let b = spec.synthesize(t + spec.period());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ps_decomposition_matches_fixture_and_t0_sample() {
        let spec = fixture_spec();
        let ps = spec.to_ps();
        let p = ps.p.vector_components();
        assert!((p[0] - 1.70).abs() < 0.005);
        assert!((p[1] - (-0.35)).abs() < 0.005);
        assert!((p[2] - (-0.82)).abs() < 0.005);
        let v0 = spec.synthesize(0.0);
        for (a, b) in p.iter().zip(&v0) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_phases_give_zero_quadrature() {
        let spec = PhasorSpec::from_frequency(
            60.0,
            vec![Phasor::new(1.0, 0.0), Phasor::new(2.0, 0.0), Phasor::new(0.5, 0.0)],
        )
        .unwrap();
        assert!(spec.to_ps().s.is_zero());
    }

    #[test]
    fn ps_identity_reproduces_synthesis_over_a_period() {
        let spec = PhasorSpec::from_frequency(
            50.0,
            vec![
                Phasor::new(1.2, 0.3),
                Phasor::new(0.4, -1.9),
                Phasor::new(2.1, 2.8),
                Phasor::new(0.9, 0.77),
            ],
        )
        .unwrap();
        let ps = spec.to_ps();
        let mut worst = 0.0f64;
        for i in 0..256 {
            let t = spec.period() * i as f64 / 256.0;
            let direct = spec.synthesize(t);
            let via_ps = ps.evaluate(spec.omega(), t);
            for (a, b) in direct.iter().zip(&via_ps) {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst <= 1e-12, "worst deviation {worst}");
    }

    #[test]
    fn locus_stays_in_the_ps_plane() {
        let spec = fixture_spec();
        let ps = spec.to_ps();
        let plane = ps.p.outer(&ps.s).unwrap();
        let sig = spec.algebra();
        for i in 0..64 {
            let t = 0.0173 * i as f64 + 0.001;
            let v = Multivector::vector(sig, &spec.synthesize(t)).unwrap();
            let wedge = v.outer(&plane).unwrap();
            assert!(wedge.norm() <= 1e-10);
        }
    }

    #[test]
    fn sample_series_has_uniform_grid() {
        let spec = fixture_spec();
        let series = spec.sample_series(10_000.0, 0.02).unwrap();
        assert_eq!(series.len(), 200);
        for (a, b) in series.row(0).iter().zip(&spec.synthesize(0.0)) {
            assert_eq!(a, b);
        }
        // κ = 8 samples at Ts = 100 μs span 0.8 ms
        assert!((series.timestamp(8) - series.timestamp(0) - 0.0008).abs() < 1e-15);
    }

    #[test]
    fn balanced_rows_sum_to_zero() {
        let spec = PhasorSpec::balanced(100.0 * std::f64::consts::PI, 1.5, 3).unwrap();
        let series = spec.sample_series(5_000.0, 0.02).unwrap();
        for (_, row) in series.rows() {
            let sum: f64 = row.iter().sum();
            assert!(sum.abs() <= 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(PhasorSpec::new(0.0, vec![Phasor::new(1.0, 0.0); 3]).is_err());
        assert!(PhasorSpec::new(1.0, vec![Phasor::new(1.0, 0.0)]).is_err());
        assert!(PhasorSpec::new(1.0, vec![Phasor::new(-1.0, 0.0); 3]).is_err());
        assert!(fixture_spec().sample_series(-1.0, 1.0).is_err());
    }

    #[test]
    fn series_rejects_bad_rows() {
        let mut series = SampleSeries::empty(3);
        series.push(0.0, &[1.0, 2.0, 3.0]).unwrap();
        assert!(series.push(0.0, &[1.0, 2.0, 3.0]).is_err());
        assert!(series.push(1.0, &[1.0, 2.0]).is_err());
    }
}
