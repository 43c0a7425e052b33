//! Desk-scale discrete-time simulation of a grid-following converter current
//! loop, demonstrating the frame transform against the Clarke baseline.
//!
//! The plant is an averaged per-phase series RL branch between the converter
//! voltage and an equivalent grid EMF; the grid-side share of the impedance
//! carries a per-phase scaling (the unbalanced series impedance), and the
//! controller measures the voltage at the junction of the two shares. The
//! scenario introduces a grid-voltage unbalance step and a later power
//! reference step; currents are regulated per axis by proportional-resonant
//! controllers in either the identified ps frame or the Clarke frame.

mod config;
mod pr;

pub use config::parse_config_str;
pub use pr::{PrController, PrParams};

use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::algebra::Blade;
use crate::estimator::{EstimatorConfig, EstimatorError, FrameEstimator};
use crate::frame::{clarke_transform, FrameError};
use crate::signal::{PhasorSpec, SignalError};

/// Errors from simulation configuration and execution.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("voltage magnitude {0:e} too small for a current reference")]
    DegenerateVoltage(f64),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Geometric power of a voltage/current pair in the aligned plane:
/// scalar part `p0 = v · i` and bivector part `N = v ∧ i` (its σ12
/// coefficient).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricPower {
    pub p0: f64,
    pub n: f64,
}

/// `M = v i = v·i + v∧i` for two-coordinate frame vectors.
pub fn geometric_power(v_ps: [f64; 2], i_ps: [f64; 2]) -> GeometricPower {
    GeometricPower {
        p0: v_ps[0] * i_ps[0] + v_ps[1] * i_ps[1],
        n: v_ps[0] * i_ps[1] - v_ps[1] * i_ps[0],
    }
}

/// The unique current whose geometric power with `v_ps` equals `m_ref`:
/// `i = v⁻¹ M` with `v⁻¹ = v / ‖v‖²`.
pub fn reference_currents(m_ref: GeometricPower, v_ps: [f64; 2]) -> Result<[f64; 2], SimError> {
    let norm_sq = v_ps[0] * v_ps[0] + v_ps[1] * v_ps[1];
    if norm_sq <= 1e-12 {
        return Err(SimError::DegenerateVoltage(norm_sq.sqrt()));
    }
    Ok([
        (v_ps[0] * m_ref.p0 - v_ps[1] * m_ref.n) / norm_sq,
        (v_ps[1] * m_ref.p0 + v_ps[0] * m_ref.n) / norm_sq,
    ])
}

/// Which stationary frame the current loop runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlFrame {
    Ps,
    Clarke,
}

/// One step of the power reference schedule, active from `t` onward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerReference {
    pub t: f64,
    pub p0: f64,
    pub n: f64,
}

/// Full scenario description.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub ts: f64,
    pub duration: f64,
    /// Converter-side filter inductance and resistance.
    pub lf: f64,
    pub rf: f64,
    /// Grid-side equivalent impedance (scaled per phase).
    pub lg: f64,
    pub rg: f64,
    /// Per-phase scaling of the grid-side impedance; the static unbalance.
    pub impedance_scale: [f64; 3],
    pub grid_before: PhasorSpec,
    pub grid_after: PhasorSpec,
    /// The grid EMF switches from `grid_before` to `grid_after` here.
    pub t_unbalance: f64,
    /// Must be non-empty and sorted by time.
    pub power_refs: Vec<PowerReference>,
    pub frame: ControlFrame,
    pub pr: PrParams,
    pub estimator: EstimatorConfig,
    /// Disable the current loop: the converter replays the pre-step EMF.
    pub open_loop: bool,
}

impl SimConfig {
    /// The stock scenario: balanced 1 pu grid, voltage unbalance step at
    /// 0.02 s, power reference step at 0.12 s, 0.2 s horizon at Ts = 100 μs.
    pub fn example_scenario() -> SimConfig {
        let third = 2.0 * std::f64::consts::PI / 3.0;
        let omega = 100.0 * std::f64::consts::PI;
        let balanced = PhasorSpec::new(
            omega,
            vec![
                crate::signal::Phasor::new(1.0, 0.0),
                crate::signal::Phasor::new(1.0, -third),
                crate::signal::Phasor::new(1.0, third),
            ],
        )
        .expect("valid spec");
        let unbalanced = PhasorSpec::new(
            omega,
            vec![
                crate::signal::Phasor::new(1.08, 0.06),
                crate::signal::Phasor::new(0.85, -third - 0.12),
                crate::signal::Phasor::new(1.12, third + 0.08),
            ],
        )
        .expect("valid spec");
        SimConfig {
            ts: 100e-6,
            duration: 0.2,
            lf: 5e-3,
            rf: 0.1,
            lg: 2e-3,
            rg: 0.4,
            impedance_scale: [1.0, 1.5, 0.7],
            grid_before: balanced,
            grid_after: unbalanced,
            t_unbalance: 0.02,
            power_refs: vec![
                PowerReference { t: 0.0, p0: 0.4, n: 0.0 },
                PowerReference { t: 0.12, p0: 1.0, n: 0.25 },
            ],
            frame: ControlFrame::Ps,
            pr: PrParams {
                kp: 30.0,
                ki: 2500.0,
                rho: 0.008,
                omega,
            },
            estimator: EstimatorConfig::default(),
            open_loop: false,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !self.ts.is_finite() || self.ts <= 0.0 {
            return Err(SimError::InvalidParam(format!("ts must be positive, got {}", self.ts)));
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(SimError::InvalidParam(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !self.lf.is_finite() || self.lf <= 0.0 {
            return Err(SimError::InvalidParam(format!("lf must be positive, got {}", self.lf)));
        }
        for x in [self.rf, self.lg, self.rg] {
            if !x.is_finite() || x < 0.0 {
                return Err(SimError::InvalidParam(format!(
                    "impedance values must be non-negative, got {x}"
                )));
            }
        }
        if self.impedance_scale.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(SimError::InvalidParam("impedance_scale must be non-negative".into()));
        }
        if self.grid_before.phase_count() != 3 || self.grid_after.phase_count() != 3 {
            return Err(SimError::InvalidParam("the scenario is three-phase".into()));
        }
        if !(0.0..=self.duration).contains(&self.t_unbalance) {
            return Err(SimError::InvalidParam(format!(
                "t_unbalance {} outside the horizon {}",
                self.t_unbalance, self.duration
            )));
        }
        if self.power_refs.is_empty() {
            return Err(SimError::InvalidParam("power_refs must not be empty".into()));
        }
        if self.power_refs.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(SimError::InvalidParam("power_refs must be sorted by time".into()));
        }
        if self.power_refs.iter().any(|r| r.t > self.duration) {
            return Err(SimError::InvalidParam("power_refs outside the horizon".into()));
        }
        self.pr.validate()?;
        Ok(())
    }

    fn active_reference(&self, t: f64) -> GeometricPower {
        let mut active = GeometricPower { p0: 0.0, n: 0.0 };
        for r in &self.power_refs {
            if r.t <= t {
                active = GeometricPower { p0: r.p0, n: r.n };
            }
        }
        active
    }
}

/// One logged simulation step.
#[derive(Clone, Debug, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    /// Measured (PCC) phase voltages.
    pub v: [f64; 3],
    pub i: [f64; 3],
    /// Frame coordinates of the measured voltage: (p, s, residual) in the ps
    /// frame, (α, β, 0-component) in the Clarke frame.
    pub v_frame: [f64; 3],
    pub i_frame: [f64; 3],
    pub i_ref: [f64; 2],
    /// Clarke zero component of the measured voltage, logged in both modes.
    pub v0_clarke: f64,
    /// Scalar power in the active frame.
    pub p0: f64,
    /// Rotor coefficients (1, σ12, σ13, σ23) of the streaming estimate.
    pub rotor: [f64; 4],
}

/// Deterministic per-step log of a scenario run.
#[derive(Clone, Debug)]
pub struct SimTrace {
    records: Vec<SimRecord>,
}

impl SimTrace {
    pub fn records(&self) -> &[SimRecord] {
        &self.records
    }

    /// RMS of `f` over records with `t` in `[from, to)`.
    pub fn rms<F: Fn(&SimRecord) -> f64>(&self, from: f64, to: f64, f: F) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for r in &self.records {
            if r.t >= from && r.t < to {
                let x = f(r);
                sum += x * x;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            (sum / count as f64).sqrt()
        }
    }

    /// Write the trace in the CSV interchange layout with named columns.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), SimError> {
        let file = std::fs::File::create(path)?;
        let mut out = std::io::BufWriter::new(file);
        writeln!(
            out,
            "t,v1,v2,v3,i1,i2,i3,v_p,v_s,v_res,i_p,i_s,i_ref_p,i_ref_s,v0,p0,r_0,r_12,r_13,r_23"
        )?;
        for r in &self.records {
            write!(out, "{:.16e}", r.t)?;
            for x in r
                .v
                .iter()
                .chain(&r.i)
                .chain(&r.v_frame)
                .chain(&r.i_frame[..2])
                .chain(&r.i_ref)
                .chain(&[r.v0_clarke, r.p0])
                .chain(&r.rotor)
            {
                write!(out, ",{x:.16e}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Run the fixed-step scenario loop. Given identical configuration the trace
/// is bit-identical between runs.
pub fn run_scenario(cfg: &SimConfig) -> Result<SimTrace, SimError> {
    cfg.validate()?;
    let ts = cfg.ts;
    let steps = (cfg.duration / ts).round() as usize;
    let mut estimator = FrameEstimator::new(cfg.estimator)?;
    let mut pr_p = PrController::new(&cfg.pr, ts)?;
    let mut pr_s = PrController::new(&cfg.pr, ts)?;

    let mut i_abc = [0.0f64; 3];
    let mut records = Vec::with_capacity(steps);

    let s12 = Blade::from_indices(&[0, 1]);
    let s13 = Blade::from_indices(&[0, 2]);
    let s23 = Blade::from_indices(&[1, 2]);

    for k in 0..steps {
        let t = k as f64 * ts;
        let emf_spec = if t < cfg.t_unbalance {
            &cfg.grid_before
        } else {
            &cfg.grid_after
        };
        let v_emf = emf_spec.synthesize(t);

        // measurement at the junction of the converter filter and the
        // (per-phase scaled) grid impedance; the resistive share of the drop
        // carries the current-dependent unbalance into the measurement
        let mut v_meas = [0.0f64; 3];
        for ph in 0..3 {
            v_meas[ph] = v_emf[ph] + cfg.impedance_scale[ph] * cfg.rg * i_abc[ph];
        }

        // the estimator always runs on the measured voltage, so the rotor
        // trace is available regardless of the control frame
        estimator.push_sample(t, &v_meas)?;
        let frame = estimator.current_frame().cloned();

        let (v_frame, i_frame, rotor) = match (&cfg.frame, &frame) {
            (ControlFrame::Ps, Some(ft)) => {
                let vf = ft.transform(&v_meas)?;
                let fi = ft.transform(&i_abc)?;
                let r = ft.rotor();
                (
                    [vf.p, vf.s, vf.residual[0]],
                    [fi.p, fi.s, fi.residual[0]],
                    [
                        r.coeff(Blade::SCALAR),
                        r.coeff(s12),
                        r.coeff(s13),
                        r.coeff(s23),
                    ],
                )
            }
            (ControlFrame::Ps, None) => ([0.0; 3], [0.0; 3], [1.0, 0.0, 0.0, 0.0]),
            (ControlFrame::Clarke, _) => {
                let vf = clarke_transform(&v_meas);
                let fi = clarke_transform(&i_abc);
                let r = match &frame {
                    Some(ft) => {
                        let r = ft.rotor();
                        [
                            r.coeff(Blade::SCALAR),
                            r.coeff(s12),
                            r.coeff(s13),
                            r.coeff(s23),
                        ]
                    }
                    None => [1.0, 0.0, 0.0, 0.0],
                };
                (vf, fi, r)
            }
        };

        let m_ref = cfg.active_reference(t);
        let frame_ready = match cfg.frame {
            ControlFrame::Ps => frame.is_some(),
            ControlFrame::Clarke => true,
        };

        let mut i_ref = [0.0f64; 2];
        let v_conv: [f64; 3] = if cfg.open_loop {
            let replay = cfg.grid_before.synthesize(t);
            [replay[0], replay[1], replay[2]]
        } else if frame_ready {
            let v2 = [v_frame[0], v_frame[1]];
            i_ref = match reference_currents(m_ref, v2) {
                Ok(r) => r,
                Err(SimError::DegenerateVoltage(_)) => [0.0, 0.0],
                Err(e) => return Err(e),
            };
            let u_p = pr_p.step(i_ref[0] - i_frame[0]);
            let u_s = pr_s.step(i_ref[1] - i_frame[1]);
            // voltage feedforward plus the regulator correction, carried
            // back to phase coordinates through the active frame
            match (&cfg.frame, &frame) {
                (ControlFrame::Ps, Some(ft)) => {
                    let sig = crate::algebra::Algebra::new(3).expect("three-phase");
                    let cmd = crate::algebra::Multivector::vector(
                        sig,
                        &[v_frame[0] + u_p, v_frame[1] + u_s, 0.0],
                    )
                    .expect("fixed arity");
                    let back = ft.rotor().reverse().sandwich(&cmd)?;
                    let c = back.vector_components();
                    [c[0], c[1], c[2]]
                }
                _ => {
                    let alpha = v_frame[0] + u_p;
                    let beta = v_frame[1] + u_s;
                    inverse_clarke(&[alpha, beta, 0.0])
                }
            }
        } else {
            // warm-up: mirror the measurement so no current is driven
            v_meas
        };

        let p0 = v_frame[0] * i_frame[0] + v_frame[1] * i_frame[1];
        records.push(SimRecord {
            t,
            v: v_meas,
            i: i_abc,
            v_frame,
            i_frame,
            i_ref,
            v0_clarke: clarke_transform(&v_meas)[2],
            p0,
            rotor,
        });

        // averaged RL plant, exact zero-order-hold update per phase
        for ph in 0..3 {
            let l = cfg.lf + cfg.impedance_scale[ph] * cfg.lg;
            let r = cfg.rf + cfg.impedance_scale[ph] * cfg.rg;
            let drive = v_conv[ph] - v_emf[ph];
            if r > 0.0 {
                let decay = (-r * ts / l).exp();
                i_abc[ph] = i_abc[ph] * decay + (1.0 - decay) * drive / r;
            } else {
                i_abc[ph] += ts * drive / l;
            }
        }
    }

    Ok(SimTrace { records })
}

/// Inverse of the power-invariant Clarke transformation.
fn inverse_clarke(f: &[f64; 3]) -> [f64; 3] {
    let k = (2.0f64 / 3.0).sqrt();
    let z = f[2] / 3.0f64.sqrt();
    [
        k * f[0] + z,
        k * (-0.5 * f[0] + 3.0f64.sqrt() / 2.0 * f[1]) + z,
        k * (-0.5 * f[0] - 3.0f64.sqrt() / 2.0 * f[1]) + z,
    ]
}
