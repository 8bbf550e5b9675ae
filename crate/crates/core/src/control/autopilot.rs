//! Two independent loops (heading and surge speed) feeding the thruster
//! allocation.

use serde::{Deserialize, Serialize};

use crate::asv::{allocate_differential_thrust, AsvParams, ThrustAllocation};
use crate::control::guidance::GuidanceCommand;
use crate::control::pid::{PidController, PidGains};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutopilotGains {
    pub heading: PidGains,
    pub speed: PidGains,
}

impl Default for AutopilotGains {
    fn default() -> Self {
        Self {
            heading: PidGains::new(40.0, 0.5, 30.0),
            speed: PidGains::new(40.0, 40.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Autopilot {
    heading: PidController,
    speed: PidController,
}

/// Output of one autopilot step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActuatorCommand {
    pub surge_cmd: f64,
    pub yaw_cmd: f64,
    pub thrust: ThrustAllocation,
}

impl Autopilot {
    pub fn new(gains: AutopilotGains, params: &AsvParams) -> Result<Self> {
        let max_surge = 2.0 * params.max_thrust_per_motor;
        let max_yaw = 2.0 * params.max_thrust_per_motor * params.thruster_half_spacing;
        let heading = PidController::new(gains.heading)
            .with_output_limits(-max_yaw, max_yaw)?
            .with_integral_limits(-2.0, 2.0)?;
        let speed = PidController::new(gains.speed)
            .with_output_limits(-max_surge, max_surge)?
            .with_integral_limits(-max_surge / gains.speed.ki.max(1e-9), max_surge / gains.speed.ki.max(1e-9))?;
        Ok(Self { heading, speed })
    }

    pub fn heading_loop(&self) -> &PidController {
        &self.heading
    }

    pub fn speed_loop(&self) -> &PidController {
        &self.speed
    }

    /// Runs both loops. Speed demand is cut back by the cosine of the heading
    /// error so the vehicle turns before it drives.
    pub fn step(
        &mut self,
        cmd: &GuidanceCommand,
        surge_estimate: f64,
        params: &AsvParams,
        dt: f64,
    ) -> ActuatorCommand {
        let yaw_cmd = self.heading.step(cmd.heading_error, dt);
        let speed_ref = cmd.speed_cmd * cmd.heading_error.cos().max(0.0);
        let surge_cmd = self.speed.step(speed_ref - surge_estimate, dt);
        ActuatorCommand {
            surge_cmd,
            yaw_cmd,
            thrust: allocate_differential_thrust(surge_cmd, yaw_cmd, params),
        }
    }
}
