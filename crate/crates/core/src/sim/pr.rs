//! Proportional-resonant current regulator.
//!
//! Continuous prototype: `H(s) = kp + 2 ki s / (s² + 2 ρ ω s + ω²)`.
//! Discretized by the bilinear transform with frequency prewarping at ω, so
//! the resonance sits exactly on the grid frequency: DC gain is `kp` and the
//! gain at ω is `kp + ki / (ρ ω)`.

use super::SimError;

/// Gains and resonance placement of the regulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrParams {
    pub kp: f64,
    pub ki: f64,
    /// Damping factor of the resonant pole pair, in (0, 1).
    pub rho: f64,
    /// Resonance angular frequency, rad/s.
    pub omega: f64,
}

impl PrParams {
    pub fn validate(&self) -> Result<(), SimError> {
        if !self.kp.is_finite() || self.kp < 0.0 {
            return Err(SimError::InvalidParam(format!("kp must be >= 0, got {}", self.kp)));
        }
        if !self.ki.is_finite() || self.ki < 0.0 {
            return Err(SimError::InvalidParam(format!("ki must be >= 0, got {}", self.ki)));
        }
        if !self.rho.is_finite() || self.rho <= 0.0 || self.rho >= 1.0 {
            return Err(SimError::InvalidParam(format!(
                "rho must be in (0, 1), got {}",
                self.rho
            )));
        }
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(SimError::InvalidParam(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }
}

/// One discretized regulator axis. `p` and `s` axes each run their own copy.
#[derive(Clone, Debug)]
pub struct PrController {
    kp: f64,
    // resonant path y[n] = b0 e[n] + b2 e[n-2] - a1 y[n-1] - a2 y[n-2]
    b0: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    e1: f64,
    e2: f64,
    y1: f64,
    y2: f64,
}

impl PrController {
    pub fn new(params: &PrParams, ts: f64) -> Result<PrController, SimError> {
        params.validate()?;
        if !ts.is_finite() || ts <= 0.0 {
            return Err(SimError::InvalidParam(format!("ts must be positive, got {ts}")));
        }
        if params.omega * ts >= std::f64::consts::PI {
            return Err(SimError::InvalidParam(format!(
                "resonance {} rad/s is at or above Nyquist for ts = {ts}",
                params.omega
            )));
        }
        // prewarped bilinear rate: s <- k (z-1)/(z+1) maps z = e^{jωts} to exactly jω
        let k = params.omega / (params.omega * ts / 2.0).tan();
        let w = params.omega;
        let a0 = k * k + 2.0 * params.rho * w * k + w * w;
        Ok(PrController {
            kp: params.kp,
            b0: 2.0 * params.ki * k / a0,
            b2: -2.0 * params.ki * k / a0,
            a1: 2.0 * (w * w - k * k) / a0,
            a2: (k * k - 2.0 * params.rho * w * k + w * w) / a0,
            e1: 0.0,
            e2: 0.0,
            y1: 0.0,
            y2: 0.0,
        })
    }

    /// Advance one sample: regulator output for the given tracking error.
    pub fn step(&mut self, error: f64) -> f64 {
        let y = self.b0 * error + self.b2 * self.e2 - self.a1 * self.y1 - self.a2 * self.y2;
        self.e2 = self.e1;
        self.e1 = error;
        self.y2 = self.y1;
        self.y1 = y;
        self.kp * error + y
    }

    pub fn reset(&mut self) {
        self.e1 = 0.0;
        self.e2 = 0.0;
        self.y1 = 0.0;
        self.y2 = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TS: f64 = 100e-6;

    fn params() -> PrParams {
        PrParams {
            kp: 3.0,
            ki: 40.0,
            rho: 0.05,
            omega: 100.0 * std::f64::consts::PI,
        }
    }

    #[test]
    fn dc_gain_is_kp() {
        let p = params();
        let mut ctrl = PrController::new(&p, TS).unwrap();
        let mut last = 0.0;
        for _ in 0..200_000 {
            last = ctrl.step(1.0);
        }
        assert!(
            (last - p.kp).abs() <= 1e-6 * p.kp.max(1.0),
            "settled output {last}, expected {}",
            p.kp
        );
    }

    #[test]
    fn resonance_gain_is_kp_plus_ki_over_rho_omega() {
        let p = params();
        let mut ctrl = PrController::new(&p, TS).unwrap();
        let expected = p.kp + p.ki / (p.rho * p.omega);
        // drive at exactly ω, measure the settled output amplitude
        let settle = 40_000;
        let mut peak = 0.0f64;
        for n in 0..settle + 10_000 {
            let t = n as f64 * TS;
            let y = ctrl.step((p.omega * t).sin());
            if n >= settle {
                peak = peak.max(y.abs());
            }
        }
        assert!(
            (peak - expected).abs() <= 0.01 * expected,
            "peak {peak}, expected {expected}"
        );
    }

    /// Continuous-time oracle: RK4 at Ts/100 on the state-space form
    /// x¨ + 2ρω x˙ + ω² x = e,  y = kp e + 2 ki x˙,
    /// with the sample-held input linearly interpolated between samples.
    fn continuous_response(p: &PrParams, input: &[f64], ts: f64) -> Vec<f64> {
        let sub = 100;
        let h = ts / sub as f64;
        let mut x = 0.0f64;
        let mut xd = 0.0f64;
        let mut out = Vec::with_capacity(input.len());
        let deriv = |x: f64, xd: f64, e: f64| -> (f64, f64) {
            (xd, e - 2.0 * p.rho * p.omega * xd - p.omega * p.omega * x)
        };
        let mut prev_e = 0.0;
        for &e_now in input {
            for k in 0..sub {
                // linear interpolation of the drive across the sample
                let frac0 = k as f64 / sub as f64;
                let frac1 = (k as f64 + 0.5) / sub as f64;
                let frac2 = (k as f64 + 1.0) / sub as f64;
                let e0 = prev_e + (e_now - prev_e) * frac0;
                let e_mid = prev_e + (e_now - prev_e) * frac1;
                let e1 = prev_e + (e_now - prev_e) * frac2;
                let (k1x, k1v) = deriv(x, xd, e0);
                let (k2x, k2v) = deriv(x + 0.5 * h * k1x, xd + 0.5 * h * k1v, e_mid);
                let (k3x, k3v) = deriv(x + 0.5 * h * k2x, xd + 0.5 * h * k2v, e_mid);
                let (k4x, k4v) = deriv(x + h * k3x, xd + h * k3v, e1);
                x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
                xd += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            }
            prev_e = e_now;
            out.push(p.kp * e_now + 2.0 * p.ki * xd);
        }
        out
    }

    #[test]
    fn discrete_step_tracks_continuous_oracle_within_one_percent_rms() {
        let p = params();
        let mut ctrl = PrController::new(&p, TS).unwrap();
        // band-limited drive: resonance tone plus low-frequency components
        let n = 6000;
        let input: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * TS;
                (p.omega * t).sin() + 0.5 * (0.35 * p.omega * t).cos()
                    - 0.3 * (2.1 * p.omega * t + 0.4).sin()
            })
            .collect();
        let discrete: Vec<f64> = input.iter().map(|&e| ctrl.step(e)).collect();
        let continuous = continuous_response(&p, &input, TS);
        let mut err_sq = 0.0;
        let mut ref_sq = 0.0;
        for (d, c) in discrete.iter().zip(&continuous) {
            err_sq += (d - c) * (d - c);
            ref_sq += c * c;
        }
        let rel = (err_sq / ref_sq).sqrt();
        assert!(rel <= 0.01, "relative RMS deviation {rel}");
    }

    #[test]
    fn parameter_validation() {
        let ok = params();
        assert!(PrController::new(&ok, TS).is_ok());
        let bad_rho = PrParams { rho: 1.5, ..ok };
        assert!(PrController::new(&bad_rho, TS).is_err());
        let bad_omega = PrParams { omega: -1.0, ..ok };
        assert!(PrController::new(&bad_omega, TS).is_err());
        assert!(PrController::new(&ok, 0.0).is_err());
        // resonance above Nyquist
        assert!(PrController::new(&ok, 0.5).is_err());
    }
}
