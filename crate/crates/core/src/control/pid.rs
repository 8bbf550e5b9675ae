use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// PID gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self { kp, ki, kd }
    }
}

/// Discrete PID regulator with trapezoidal integration and anti-windup.
///
/// The derivative acts on the error and is zero on the very first step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidController {
    pub gains: PidGains,
    output_limits: (f64, f64),
    integral_limits: (f64, f64),
    integral: f64,
    prev_error: f64,
    primed: bool,
}

impl PidController {
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            output_limits: (f64::NEG_INFINITY, f64::INFINITY),
            integral_limits: (f64::NEG_INFINITY, f64::INFINITY),
            integral: 0.0,
            prev_error: 0.0,
            primed: false,
        }
    }

    pub fn with_output_limits(mut self, min: f64, max: f64) -> Result<Self> {
        if !(min <= max) {
            return Err(Error::InvalidArgument(format!("output limits [{min}, {max}] not ordered")));
        }
        self.output_limits = (min, max);
        Ok(self)
    }

    pub fn with_integral_limits(mut self, min: f64, max: f64) -> Result<Self> {
        if !(min <= max) {
            return Err(Error::InvalidArgument(format!(
                "integral limits [{min}, {max}] not ordered"
            )));
        }
        self.integral_limits = (min, max);
        self.integral = self.integral.clamp(min, max);
        Ok(self)
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn integral_limits(&self) -> (f64, f64) {
        self.integral_limits
    }

    pub fn output_limits(&self) -> (f64, f64) {
        self.output_limits
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev_error = 0.0;
        self.primed = false;
    }

    /// Consumes one error sample and returns the clamped control output.
    pub fn step(&mut self, error: f64, dt: f64) -> f64 {
        debug_assert!(dt > 0.0);
        let (imin, imax) = self.integral_limits;
        self.integral = (self.integral + 0.5 * (error + self.prev_error) * dt).clamp(imin, imax);
        let derivative = if self.primed {
            (error - self.prev_error) / dt
        } else {
            0.0
        };
        self.prev_error = error;
        self.primed = true;
        let raw = self.gains.kp * error + self.gains.ki * self.integral + self.gains.kd * derivative;
        let (omin, omax) = self.output_limits;
        raw.clamp(omin, omax)
    }
}

/// Value-style wrapper around [`PidController::step`].
pub fn pid_step(ctrl: PidController, error: f64, dt: f64) -> (f64, PidController) {
    let mut next = ctrl;
    let out = next.step(error, dt);
    (out, next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_only() {
        let (out, _) = pid_step(PidController::new(PidGains::new(2.0, 0.0, 0.0)), 3.0, 0.1);
        assert_eq!(out, 6.0);
    }

    #[test]
    fn null_error_stays_zero() {
        let mut c = PidController::new(PidGains::new(3.0, 2.0, 1.0));
        for _ in 0..1000 {
            assert_eq!(c.step(0.0, 0.01), 0.0);
        }
    }

    #[test]
    fn trapezoidal_accumulation() {
        // integral after 10 steps: 0.05 + 9 * 0.1 = 0.95 -> 1 + 0.5 * 0.95
        let mut c = PidController::new(PidGains::new(1.0, 0.5, 0.0));
        let mut out = 0.0;
        for _ in 0..10 {
            out = c.step(1.0, 0.1);
        }
        assert!((out - 1.475).abs() < 1e-12);
    }

    #[test]
    fn first_step_has_no_derivative_kick() {
        let mut c = PidController::new(PidGains::new(0.0, 0.0, 1.0));
        assert_eq!(c.step(5.0, 0.1), 0.0);
        assert!((c.step(6.0, 0.1) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn limits_must_be_ordered() {
        let c = PidController::new(PidGains::new(1.0, 0.0, 0.0));
        assert!(c.with_output_limits(1.0, -1.0).is_err());
        assert!(c.with_integral_limits(2.0, 1.0).is_err());
    }

    #[test]
    fn output_is_clamped() {
        let mut c = PidController::new(PidGains::new(10.0, 0.0, 0.0))
            .with_output_limits(-1.0, 2.0)
            .unwrap();
        assert_eq!(c.step(5.0, 0.1), 2.0);
        assert_eq!(c.step(-5.0, 0.1), -1.0);
    }
}
