//! Streaming recursive frame identification over sampled data.
//!
//! The estimator keeps the last κ+1 samples and, once the window is full,
//! identifies the plane from the pair `(v(t - κ Ts), v(t))` on every push,
//! rebuilding the rotor each step. A frame is therefore available κ+1
//! samples after start-up — a small fraction of a cycle at typical rates.

use std::collections::VecDeque;

use thiserror::Error;

use crate::frame::{
    identify_plane_with_tolerance, rotor_align_3d, rotor_align_nd, FrameError, FrameTransform,
    TAU_COLLINEAR,
};

/// A freshly emitted transform exceeds this relative residual on the newest
/// sample only while the window straddles a signal change.
pub const TRANSITION_RESIDUAL: f64 = 1e-6;

/// Streaming estimator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    /// Sample separation κ between the two vectors of each pair.
    pub kappa: usize,
    /// Nominal sampling period, kept for configuration echo and
    /// conditioning analysis; pairing is by sample count.
    pub ts: f64,
    /// Collinearity threshold on `sin(angle between samples)`.
    pub tau_collinear: f64,
    /// On a degenerate pair, emit the last valid transform instead of
    /// nothing.
    pub hold_last_on_degenerate: bool,
}

impl Default for EstimatorConfig {
    fn default() -> EstimatorConfig {
        EstimatorConfig {
            kappa: 8,
            ts: 100e-6,
            tau_collinear: TAU_COLLINEAR,
            hold_last_on_degenerate: true,
        }
    }
}

/// Errors from streaming estimation.
#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("invalid estimator config: {0}")]
    Config(String),
    #[error("timestamps must be strictly increasing ({current} after {previous})")]
    NonMonotone { previous: f64, current: f64 },
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// One emitted estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameUpdate {
    pub transform: FrameTransform,
    /// True when the newest sample does not fit the previously identified
    /// plane — the window is straddling a step change.
    pub transition: bool,
}

/// Single-writer streaming state: one producer pushes samples; readers may
/// inspect [`FrameEstimator::current_frame`] between pushes.
#[derive(Clone, Debug)]
pub struct FrameEstimator {
    cfg: EstimatorConfig,
    window: VecDeque<(f64, Vec<f64>)>,
    last_valid: Option<FrameTransform>,
    degenerate_pushes: usize,
}

impl FrameEstimator {
    pub fn new(cfg: EstimatorConfig) -> Result<FrameEstimator, EstimatorError> {
        if cfg.kappa < 1 {
            return Err(EstimatorError::Config("kappa must be at least 1".into()));
        }
        if !cfg.ts.is_finite() || cfg.ts <= 0.0 {
            return Err(EstimatorError::Config(format!(
                "ts must be positive, got {}",
                cfg.ts
            )));
        }
        Ok(FrameEstimator {
            cfg,
            window: VecDeque::with_capacity(cfg.kappa + 1),
            last_valid: None,
            degenerate_pushes: 0,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    /// Feed one sample. Returns a transform once the window holds κ+1
    /// samples; on a degenerate pair returns the held transform (when
    /// configured) or nothing.
    pub fn push_sample(
        &mut self,
        t: f64,
        v: &[f64],
    ) -> Result<Option<FrameUpdate>, EstimatorError> {
        if let Some((last_t, last_v)) = self.window.back() {
            if t <= *last_t {
                return Err(EstimatorError::NonMonotone {
                    previous: *last_t,
                    current: t,
                });
            }
            if v.len() != last_v.len() {
                return Err(EstimatorError::DimensionMismatch {
                    expected: last_v.len(),
                    got: v.len(),
                });
            }
        }

        self.window.push_back((t, v.to_vec()));
        if self.window.len() > self.cfg.kappa + 1 {
            self.window.pop_front();
        }
        if self.window.len() < self.cfg.kappa + 1 {
            return Ok(None);
        }

        let (t1, v1) = self.window.front().cloned().expect("window full");
        match identify_plane_with_tolerance(&v1, v, self.cfg.tau_collinear) {
            Ok(b) => {
                let transform = if v.len() == 3 {
                    rotor_align_3d(&b)?
                } else {
                    rotor_align_nd(&v1, &b)?
                }
                .with_source(t1, t);

                let transition = match &self.last_valid {
                    Some(prev) => {
                        let fit = prev.transform(v)?;
                        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        fit.max_residual() > TRANSITION_RESIDUAL * scale
                    }
                    None => false,
                };
                self.last_valid = Some(transform.clone());
                Ok(Some(FrameUpdate {
                    transform,
                    transition,
                }))
            }
            Err(FrameError::Degenerate(_)) => {
                self.degenerate_pushes += 1;
                if self.cfg.hold_last_on_degenerate {
                    Ok(self.last_valid.clone().map(|transform| FrameUpdate {
                        transform,
                        transition: false,
                    }))
                } else {
                    Ok(None)
                }
            }
            Err(e) => Err(e.into()),
        }
    }

    /// The last valid transform, if any.
    pub fn current_frame(&self) -> Option<&FrameTransform> {
        self.last_valid.as_ref()
    }

    /// How many pushes hit a degenerate pair.
    pub fn degenerate_pushes(&self) -> usize {
        self.degenerate_pushes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Blade;
    use crate::frame::FrameTransform;
    use crate::signal::{Phasor, PhasorSpec};

    fn fixture_spec() -> PhasorSpec {
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

    fn push_series(
        est: &mut FrameEstimator,
        spec: &PhasorSpec,
        fs: f64,
        count: usize,
        start: usize,
    ) -> Vec<(usize, Option<FrameUpdate>)> {
        (start..start + count)
            .map(|i| {
                let t = i as f64 / fs;
                (i, est.push_sample(t, &spec.synthesize(t)).unwrap())
            })
            .collect()
    }

    #[test]
    fn warm_up_takes_kappa_plus_one_samples() {
        let mut est = FrameEstimator::new(EstimatorConfig::default()).unwrap();
        let spec = fixture_spec();
        let results = push_series(&mut est, &spec, 10_000.0, 20, 0);
        for (i, update) in &results {
            if *i < 8 {
                assert!(update.is_none(), "no frame expected at sample {i}");
            } else {
                let update = update.as_ref().expect("frame expected");
                assert!(update.transform.alignment_residual() <= 1e-9);
                assert!(!update.transition);
            }
        }
    }

    #[test]
    fn streaming_matches_batch_identification_bitwise() {
        let mut est = FrameEstimator::new(EstimatorConfig::default()).unwrap();
        let spec = fixture_spec();
        let fs = 10_000.0;
        for i in 0..32 {
            let t = i as f64 / fs;
            let v = spec.synthesize(t);
            if let Some(update) = est.push_sample(t, &v).unwrap() {
                let t1 = (i - 8) as f64 / fs;
                let batch = FrameTransform::from_samples(&spec.synthesize(t1), &v).unwrap();
                assert_eq!(update.transform.rotor(), batch.rotor());
                assert_eq!(update.transform.plane(), batch.plane());
            }
        }
    }

    #[test]
    fn zero_sequence_signal_is_degenerate_every_push() {
        let cfg = EstimatorConfig {
            hold_last_on_degenerate: true,
            ..EstimatorConfig::default()
        };
        let mut est = FrameEstimator::new(cfg).unwrap();
        for i in 0..20 {
            let t = i as f64 * 1e-4;
            let c = (314.159 * t).cos();
            let out = est.push_sample(t, &[c, c, c]).unwrap();
            assert!(out.is_none(), "no valid frame ever exists");
        }
        // pushes 8..=19 had a full window, all degenerate
        assert_eq!(est.degenerate_pushes(), 12);
        assert!(est.current_frame().is_none());
    }

    #[test]
    fn held_transform_is_returned_on_degenerate_pushes() {
        let cfg = EstimatorConfig {
            kappa: 1,
            ..EstimatorConfig::default()
        };
        let mut est = FrameEstimator::new(cfg).unwrap();
        assert!(est.push_sample(0.0, &[1.0, 0.0, 0.0]).unwrap().is_none());
        let first = est
            .push_sample(1e-4, &[0.0, 1.0, 0.0])
            .unwrap()
            .expect("valid pair");
        // same direction as the previous sample: collinear pair
        let held = est
            .push_sample(2e-4, &[0.0, 2.0, 0.0])
            .unwrap()
            .expect("held frame");
        assert_eq!(held.transform, first.transform);
        assert_eq!(est.degenerate_pushes(), 1);
        assert_eq!(est.current_frame(), Some(&first.transform));
    }

    #[test]
    fn degenerate_pushes_yield_nothing_without_hold() {
        let cfg = EstimatorConfig {
            kappa: 1,
            hold_last_on_degenerate: false,
            ..EstimatorConfig::default()
        };
        let mut est = FrameEstimator::new(cfg).unwrap();
        est.push_sample(0.0, &[1.0, 0.0, 0.0]).unwrap();
        est.push_sample(1e-4, &[0.0, 1.0, 0.0]).unwrap().unwrap();
        assert!(est.push_sample(2e-4, &[0.0, 2.0, 0.0]).unwrap().is_none());
        assert!(est.current_frame().is_some());
    }

    #[test]
    fn lab_pair_replay_reproduces_rotor() {
        // two samples 1.6 ms apart: κ = 1 at Ts = 1.6 ms
        let cfg = EstimatorConfig {
            kappa: 1,
            ts: 1.6e-3,
            ..EstimatorConfig::default()
        };
        let mut est = FrameEstimator::new(cfg).unwrap();
        assert!(est
            .push_sample(0.0, &[333.2031, -198.0469, -135.1562])
            .unwrap()
            .is_none());
        let update = est
            .push_sample(1.6e-3, &[270.3125, -297.2656, 26.9531])
            .unwrap()
            .expect("frame from the pair");
        let r = update.transform.rotor();
        assert!((r.coeff(Blade::SCALAR) - 0.4597).abs() < 5e-4);
        assert!((r.coeff(Blade::from_indices(&[0, 2])) - 0.6280).abs() < 5e-4);
        assert!((r.coeff(Blade::from_indices(&[1, 2])) - 0.6280).abs() < 5e-4);
        assert!((update.transform.theta() - 2.1863).abs() < 5e-4);
        assert_eq!(update.transform.source(), Some((0.0, 1.6e-3)));
    }

    #[test]
    fn step_change_flags_transition_then_converges() {
        let before = fixture_spec();
        let after = PhasorSpec::from_frequency(
            50.0,
            vec![
                Phasor::new(1.0, 0.1),
                Phasor::new(1.3, -2.3),
                Phasor::new(0.6, 1.9),
            ],
        )
        .unwrap();
        let fs = 10_000.0;
        let step_at = 100; // sample index of the spec change
        let mut est = FrameEstimator::new(EstimatorConfig::default()).unwrap();
        let mut transitions = Vec::new();
        for i in 0..200 {
            let t = i as f64 / fs;
            let spec = if i < step_at { &before } else { &after };
            if let Some(update) = est.push_sample(t, &spec.synthesize(t)).unwrap() {
                if update.transition {
                    transitions.push(i);
                }
                // every emitted frame still maps its own plane onto σ12
                assert!(update.transform.alignment_residual() <= 1e-9);
                if i >= step_at + 8 {
                    // window fully past the step: must match the new plane
                    let fit = update.transform.transform(&after.synthesize(t)).unwrap();
                    assert!(fit.max_residual() <= 1e-9);
                }
            }
        }
        // the flag fires exactly while the window straddles the step:
        // pushes 100..=108 pair an old-plane sample with a new-plane one
        assert_eq!(transitions, (100..=108).collect::<Vec<_>>());
    }

    #[test]
    fn non_monotone_timestamps_are_rejected() {
        let mut est = FrameEstimator::new(EstimatorConfig::default()).unwrap();
        est.push_sample(0.0, &[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            est.push_sample(0.0, &[1.0, 2.0, 4.0]),
            Err(EstimatorError::NonMonotone { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(FrameEstimator::new(EstimatorConfig {
            kappa: 0,
            ..EstimatorConfig::default()
        })
        .is_err());
        assert!(FrameEstimator::new(EstimatorConfig {
            ts: 0.0,
            ..EstimatorConfig::default()
        })
        .is_err());
    }
}
