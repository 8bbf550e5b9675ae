use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::control::ekf::EstimatorState;
use crate::error::{Error, Result};
use crate::world::wrap_angle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuidanceMode {
    Waypoint,
    Loiter,
    /// Line-of-sight tracking of the segment `path_start -> target`.
    PathFollow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceSetpoint {
    pub mode: GuidanceMode,
    pub target: Vector2<f64>,
    pub path_start: Vector2<f64>,
    pub arrival_radius: f64,
    pub cruise_speed: f64,
    /// Loiter: no speed is commanded inside this radius.
    pub deadband: f64,
    /// Loiter: commanded speed per metre of distance outside the dead-band.
    pub loiter_gain: f64,
    /// Path-follow: line-of-sight lookahead distance.
    pub lookahead: f64,
}

impl GuidanceSetpoint {
    pub fn waypoint(target: Vector2<f64>, cruise_speed: f64, arrival_radius: f64) -> Self {
        Self {
            mode: GuidanceMode::Waypoint,
            target,
            path_start: target,
            arrival_radius,
            cruise_speed,
            deadband: 1.0,
            loiter_gain: 0.5,
            lookahead: 5.0,
        }
    }

    pub fn loiter(target: Vector2<f64>, cruise_speed: f64) -> Self {
        Self {
            mode: GuidanceMode::Loiter,
            ..Self::waypoint(target, cruise_speed, 1.0)
        }
    }

    pub fn path(from: Vector2<f64>, to: Vector2<f64>, cruise_speed: f64, arrival_radius: f64) -> Self {
        Self {
            mode: GuidanceMode::PathFollow,
            path_start: from,
            ..Self::waypoint(to, cruise_speed, arrival_radius)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.arrival_radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "arrival_radius must be > 0, got {}",
                self.arrival_radius
            )));
        }
        if !(self.cruise_speed >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cruise_speed must be >= 0, got {}",
                self.cruise_speed
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GuidanceCommand {
    pub heading_error: f64,
    pub speed_cmd: f64,
    pub arrived: bool,
}

/// Heading error and speed command toward the setpoint from the current estimate.
pub fn guidance_step(sp: &GuidanceSetpoint, est: &EstimatorState) -> GuidanceCommand {
    let pos = est.position();
    let heading = est.heading();
    let to_target = sp.target - pos;
    let dist = to_target.norm();
    let bearing = to_target.y.atan2(to_target.x);
    let arrived = dist < sp.arrival_radius;

    match sp.mode {
        GuidanceMode::Waypoint => GuidanceCommand {
            heading_error: if dist > 0.0 { wrap_angle(bearing - heading) } else { 0.0 },
            speed_cmd: if arrived { 0.0 } else { sp.cruise_speed },
            arrived,
        },
        GuidanceMode::Loiter => {
            if dist > sp.deadband {
                GuidanceCommand {
                    heading_error: wrap_angle(bearing - heading),
                    speed_cmd: (sp.loiter_gain * dist).min(sp.cruise_speed),
                    arrived,
                }
            } else {
                // inside the dead-band keep pointing at the station, softened
                // near the centre where the bearing is dominated by noise
                let scale = if sp.deadband > 0.0 { dist / sp.deadband } else { 0.0 };
                GuidanceCommand {
                    heading_error: if dist > 0.0 { scale * wrap_angle(bearing - heading) } else { 0.0 },
                    speed_cmd: 0.0,
                    arrived,
                }
            }
        }
        GuidanceMode::PathFollow => {
            let leg = sp.target - sp.path_start;
            let len = leg.norm();
            if len == 0.0 {
                let wp = GuidanceSetpoint {
                    mode: GuidanceMode::Waypoint,
                    ..*sp
                };
                return guidance_step(&wp, est);
            }
            let along = leg / len;
            let rel = pos - sp.path_start;
            let cross = along.x * rel.y - along.y * rel.x;
            let path_heading = along.y.atan2(along.x);
            let desired = path_heading - (cross / sp.lookahead).atan();
            let past_end = rel.dot(&along) >= len;
            let done = arrived || past_end;
            GuidanceCommand {
                heading_error: wrap_angle(desired - heading),
                speed_cmd: if done { 0.0 } else { sp.cruise_speed },
                arrived: done,
            }
        }
    }
}
