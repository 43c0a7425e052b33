//! Flat key-value scenario files.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys mirror
//! [`SimConfig`]; anything omitted keeps the stock scenario value.
//!
//! ```text
//! ts = 1e-4
//! duration = 0.2
//! lf = 0.005
//! rf = 0.1
//! lg = 0.002
//! rg = 0.4
//! impedance_scale = 1.0,1.6,0.6
//! freq = 50
//! grid_before = 1.0:0.0,1.0:-2.0944,1.0:2.0944
//! grid_after  = 1.05:0.05,0.70:-2.3444,1.20:2.2444
//! t_unbalance = 0.02
//! power_ref = 0.0:0.4:0.0,0.12:1.0:0.25
//! frame = ps
//! kp = 20
//! ki = 2000
//! rho = 0.01
//! kappa = 8
//! hold_last = true
//! open_loop = false
//! ```

use crate::signal::{Phasor, PhasorSpec};

use super::{ControlFrame, PowerReference, SimConfig, SimError};

fn err(line: usize, message: impl Into<String>) -> SimError {
    SimError::Config {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, SimError> {
    value
        .trim()
        .parse()
        .map_err(|_| err(line, format!("{key}: expected a number, got `{value}`")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, SimError> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(err(line, format!("{key}: expected true/false, got `{other}`"))),
    }
}

fn parse_phasors(line: usize, key: &str, value: &str) -> Result<Vec<Phasor>, SimError> {
    value
        .split(',')
        .map(|item| {
            let (amp, phase) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| err(line, format!("{key}: expected V:phi entries, got `{item}`")))?;
            Ok(Phasor::new(
                parse_f64(line, key, amp)?,
                parse_f64(line, key, phase)?,
            ))
        })
        .collect()
}

/// Parse a scenario description, starting from [`SimConfig::example_scenario`]
/// defaults. Errors carry the 1-based line number.
pub fn parse_config_str(text: &str) -> Result<SimConfig, SimError> {
    let mut cfg = SimConfig::example_scenario();
    let mut freq_hz: Option<f64> = None;
    let mut before: Option<(usize, Vec<Phasor>)> = None;
    let mut after: Option<(usize, Vec<Phasor>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected key = value, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "ts" => cfg.ts = parse_f64(line_no, key, value)?,
            "duration" => cfg.duration = parse_f64(line_no, key, value)?,
            "lf" => cfg.lf = parse_f64(line_no, key, value)?,
            "rf" => cfg.rf = parse_f64(line_no, key, value)?,
            "lg" => cfg.lg = parse_f64(line_no, key, value)?,
            "rg" => cfg.rg = parse_f64(line_no, key, value)?,
            "impedance_scale" => {
                let parts: Vec<f64> = value
                    .split(',')
                    .map(|v| parse_f64(line_no, key, v))
                    .collect::<Result<_, _>>()?;
                if parts.len() != 3 {
                    return Err(err(line_no, "impedance_scale needs exactly 3 values"));
                }
                cfg.impedance_scale = [parts[0], parts[1], parts[2]];
            }
            "freq" => freq_hz = Some(parse_f64(line_no, key, value)?),
            "grid_before" => before = Some((line_no, parse_phasors(line_no, key, value)?)),
            "grid_after" => after = Some((line_no, parse_phasors(line_no, key, value)?)),
            "t_unbalance" => cfg.t_unbalance = parse_f64(line_no, key, value)?,
            "power_ref" => {
                let mut refs = Vec::new();
                for item in value.split(',') {
                    let parts: Vec<&str> = item.trim().split(':').collect();
                    if parts.len() != 3 {
                        return Err(err(
                            line_no,
                            format!("power_ref: expected t:p0:n entries, got `{item}`"),
                        ));
                    }
                    refs.push(PowerReference {
                        t: parse_f64(line_no, key, parts[0])?,
                        p0: parse_f64(line_no, key, parts[1])?,
                        n: parse_f64(line_no, key, parts[2])?,
                    });
                }
                cfg.power_refs = refs;
            }
            "frame" => {
                cfg.frame = match value {
                    "ps" => ControlFrame::Ps,
                    "clarke" => ControlFrame::Clarke,
                    other => return Err(err(line_no, format!("frame: expected ps or clarke, got `{other}`"))),
                }
            }
            "kp" => cfg.pr.kp = parse_f64(line_no, key, value)?,
            "ki" => cfg.pr.ki = parse_f64(line_no, key, value)?,
            "rho" => cfg.pr.rho = parse_f64(line_no, key, value)?,
            "kappa" => {
                let k = parse_f64(line_no, key, value)?;
                if k < 1.0 || k.fract() != 0.0 {
                    return Err(err(line_no, format!("kappa: expected a positive integer, got `{value}`")));
                }
                cfg.estimator.kappa = k as usize;
            }
            "hold_last" => cfg.estimator.hold_last_on_degenerate = parse_bool(line_no, key, value)?,
            "open_loop" => cfg.open_loop = parse_bool(line_no, key, value)?,
            other => return Err(err(line_no, format!("unknown key `{other}`"))),
        }
    }

    let omega = match freq_hz {
        Some(hz) => {
            if !hz.is_finite() || hz <= 0.0 {
                return Err(SimError::InvalidParam(format!("freq must be positive, got {hz}")));
            }
            std::f64::consts::TAU * hz
        }
        None => cfg.grid_before.omega(),
    };
    if let Some((line, phasors)) = before {
        cfg.grid_before =
            PhasorSpec::new(omega, phasors).map_err(|e| err(line, e.to_string()))?;
    } else if freq_hz.is_some() {
        cfg.grid_before = PhasorSpec::new(omega, cfg.grid_before.phases().to_vec())
            .expect("phases already validated");
    }
    if let Some((line, phasors)) = after {
        cfg.grid_after = PhasorSpec::new(omega, phasors).map_err(|e| err(line, e.to_string()))?;
    } else if freq_hz.is_some() {
        cfg.grid_after = PhasorSpec::new(omega, cfg.grid_after.phases().to_vec())
            .expect("phases already validated");
    }
    cfg.pr.omega = omega;
    cfg.estimator.ts = cfg.ts;

    cfg.validate()?;
    Ok(cfg)
}
