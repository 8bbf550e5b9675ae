//! Close-range confirmation of a detection by the hexapod.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::detection::DetectionEvent;
use crate::environment::TerrainClass;
use crate::error::{Error, Result};
use crate::hexapod::{body_advance, HexapodConfig, HexapodState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InspectionConfig {
    pub confirm_radius: f64,
    /// Horizontal reach of the hexapod tether from the ASV loiter point.
    pub tether_reach: f64,
    /// Towline length the TUV is winched to while the ASV loiters.
    pub tuv_standoff: f64,
    /// The ASV must be this close to its loiter point before deploying.
    pub station_radius: f64,
    pub reposition_timeout: f64,
    pub walk_timeout: f64,
}

impl Default for InspectionConfig {
    fn default() -> Self {
        Self {
            confirm_radius: 0.5,
            tether_reach: 30.0,
            tuv_standoff: 5.0,
            station_radius: 2.5,
            reposition_timeout: 300.0,
            walk_timeout: 600.0,
        }
    }
}

impl InspectionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mission.inspection.confirm_radius", self.confirm_radius),
            ("mission.inspection.tether_reach", self.tether_reach),
            ("mission.inspection.tuv_standoff", self.tuv_standoff),
            ("mission.inspection.station_radius", self.station_radius),
            ("mission.inspection.reposition_timeout", self.reposition_timeout),
            ("mission.inspection.walk_timeout", self.walk_timeout),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// True when the target lies beyond the tether from the loiter point.
pub fn needs_reposition(target: Vector2<f64>, loiter_point: Vector2<f64>, cfg: &InspectionConfig) -> bool {
    (target - loiter_point).norm() > cfg.tether_reach
}

#[derive(Debug, Clone)]
pub struct WalkStep {
    pub hexapod: HexapodState,
    pub confirmed: bool,
    pub fault: Option<Error>,
}

/// One step of the straight-line walk toward `target`. Confirms without
/// moving when already inside the confirm radius.
pub fn walk_step(
    hexapod: &HexapodState,
    hcfg: &HexapodConfig,
    target: Vector2<f64>,
    terrain: TerrainClass,
    cfg: &InspectionConfig,
    dt: f64,
) -> Result<WalkStep> {
    let to_target = target - hexapod.position();
    if to_target.norm() <= cfg.confirm_radius {
        return Ok(WalkStep {
            hexapod: hexapod.clone(),
            confirmed: true,
            fault: None,
        });
    }
    let adv = body_advance(hexapod, hcfg, to_target.y.atan2(to_target.x), dt, terrain)?;
    let confirmed = (target - adv.state.position()).norm() <= cfg.confirm_radius;
    Ok(WalkStep {
        hexapod: adv.state,
        confirmed,
        fault: adv.fault,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum InspectionOutcome {
    /// The ASV has to move over the target before the hexapod can go down.
    RepositionRequired { loiter_point: Vector2<f64> },
    Confirmed { elapsed: f64, marker: Vector2<f64> },
    Aborted { elapsed: f64, reason: String },
}

/// Runs a whole inspection walk from `hexapod` to the event's estimated
/// position, looking up the substrate with `terrain`.
pub fn inspect_target(
    event: &DetectionEvent,
    hexapod: &HexapodState,
    hcfg: &HexapodConfig,
    loiter_point: Vector2<f64>,
    cfg: &InspectionConfig,
    dt: f64,
    mut terrain: impl FnMut(Vector2<f64>) -> Result<TerrainClass>,
) -> Result<InspectionOutcome> {
    let target = event.estimated_position;
    if needs_reposition(target, loiter_point, cfg) {
        return Ok(InspectionOutcome::RepositionRequired { loiter_point: target });
    }
    let mut hex = hexapod.clone();
    let mut steps = 0u64;
    loop {
        let elapsed = steps as f64 * dt;
        if elapsed > cfg.walk_timeout {
            return Ok(InspectionOutcome::Aborted {
                elapsed,
                reason: "walk timeout".into(),
            });
        }
        let class = match terrain(hex.position()) {
            Ok(c) => c,
            Err(e) => {
                return Ok(InspectionOutcome::Aborted {
                    elapsed,
                    reason: e.to_string(),
                })
            }
        };
        let step = walk_step(&hex, hcfg, target, class, cfg, dt)?;
        if let Some(fault) = step.fault {
            return Ok(InspectionOutcome::Aborted {
                elapsed,
                reason: fault.to_string(),
            });
        }
        hex = step.hexapod;
        if step.confirmed {
            let elapsed = if (target - hexapod.position()).norm() <= cfg.confirm_radius {
                0.0
            } else {
                (steps + 1) as f64 * dt
            };
            return Ok(InspectionOutcome::Confirmed {
                elapsed,
                marker: hex.position(),
            });
        }
        if (hex.position() - loiter_point).norm() > cfg.tether_reach {
            return Ok(InspectionOutcome::Aborted {
                elapsed,
                reason: "tether reach exceeded".into(),
            });
        }
        steps += 1;
    }
}
