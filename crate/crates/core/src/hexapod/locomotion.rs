//! Kinematic body advance on the seabed with tripod-gait leg animation.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::gait::{gait_foot_position, tripod_schedule, GaitPhase};
use super::kinematics::{leg_ik, LegConfiguration, LegGeometry};
use crate::environment::TerrainClass;
use crate::error::{Error, Result};
use crate::world::wrap_angle;

/// Walking speed per substrate, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TerrainSpeeds {
    pub sand: f64,
    pub rock: f64,
    pub mud: f64,
}

impl Default for TerrainSpeeds {
    fn default() -> Self {
        Self {
            sand: 0.2,
            rock: 0.1,
            mud: 0.15,
        }
    }
}

impl TerrainSpeeds {
    pub fn speed(&self, class: TerrainClass) -> f64 {
        match class {
            TerrainClass::Sand => self.sand,
            TerrainClass::Rock => self.rock,
            TerrainClass::Mud => self.mud,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexapodConfig {
    /// Legs in order front-left, mid-left, rear-left, rear-right, mid-right,
    /// front-right.
    pub legs: [LegGeometry; 6],
    /// Foot position at mid-stance in each leg-base frame.
    pub neutral_foot: Vector3<f64>,
    /// Body displacement per gait cycle, m.
    pub stride: f64,
    pub duty_factor: f64,
    pub lift_height: f64,
    pub max_turn_rate: f64,
    pub speeds: TerrainSpeeds,
}

impl Default for HexapodConfig {
    fn default() -> Self {
        Self::with_segments(0.08, 0.12).expect("default segment lengths are positive")
    }
}

impl HexapodConfig {
    /// Crab layout: every leg points straight out to its side.
    pub fn with_segments(upper: f64, lower: f64) -> Result<Self> {
        let base = LegGeometry::new(upper, lower)?;
        let (hl, hw) = (0.12, 0.08);
        let mounts = [
            (hl, hw, FRAC_PI_2),
            (0.0, hw, FRAC_PI_2),
            (-hl, hw, FRAC_PI_2),
            (-hl, -hw, -FRAC_PI_2),
            (0.0, -hw, -FRAC_PI_2),
            (hl, -hw, -FRAC_PI_2),
        ];
        let legs = mounts.map(|(x, y, yaw)| base.mounted(Vector2::new(x, y), yaw));
        let reach = upper + lower;
        Ok(Self {
            legs,
            neutral_foot: Vector3::new(0.7 * reach, 0.0, 0.5 * reach),
            stride: 0.08,
            duty_factor: 0.5,
            lift_height: 0.03,
            max_turn_rate: 0.3,
            speeds: TerrainSpeeds::default(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.stride > 0.0) {
            return Err(Error::config("hexapod.stride", "must be > 0"));
        }
        if !(self.duty_factor > 0.0 && self.duty_factor < 1.0) {
            return Err(Error::config("hexapod.duty_factor", "must be in (0, 1)"));
        }
        if !(self.lift_height >= 0.0) {
            return Err(Error::config("hexapod.lift_height", "must be >= 0"));
        }
        if !(self.max_turn_rate > 0.0) {
            return Err(Error::config("hexapod.max_turn_rate", "must be > 0"));
        }
        for (name, v) in [
            ("hexapod.speeds.sand", self.speeds.sand),
            ("hexapod.speeds.rock", self.speeds.rock),
            ("hexapod.speeds.mud", self.speeds.mud),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be > 0"));
            }
        }
        for leg in &self.legs {
            leg_ik(&self.neutral_foot, leg).map_err(|e| Error::config("hexapod.neutral_foot", e.to_string()))?;
        }
        Ok(())
    }

    /// Gait period on a given substrate, s.
    pub fn period(&self, terrain: TerrainClass) -> f64 {
        self.stride / self.speeds.speed(terrain)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexapodState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub legs: [LegConfiguration; 6],
    pub terrain: TerrainClass,
    /// Fraction of the current gait cycle, in [0, 1).
    pub gait_phase: f64,
    /// Path length walked so far, m.
    pub odometer: f64,
}

impl HexapodState {
    pub fn new(x: f64, y: f64, heading: f64, terrain: TerrainClass, cfg: &HexapodConfig) -> Result<Self> {
        let mut legs = [LegConfiguration::default(); 6];
        for (slot, geom) in legs.iter_mut().zip(&cfg.legs) {
            *slot = leg_ik(&cfg.neutral_foot, geom)?;
        }
        Ok(Self {
            x,
            y,
            heading: wrap_angle(heading),
            legs,
            terrain,
            gait_phase: 0.0,
            odometer: 0.0,
        })
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone)]
pub struct Advance {
    pub state: HexapodState,
    /// Set when a leg could not reach its target; the body did not move.
    pub fault: Option<Error>,
    pub stance_legs: usize,
}

/// Foot targets for every leg at a gait phase, for a body moving at
/// `forward` m/s while turning at `turn_rate` rad/s.
pub fn foot_targets(
    cfg: &HexapodConfig,
    terrain: TerrainClass,
    gait_phase: f64,
    forward: f64,
    turn_rate: f64,
) -> Result<([Vector3<f64>; 6], usize)> {
    let period = cfg.period(terrain);
    let sched = tripod_schedule(gait_phase * period, period, cfg.duty_factor)?;
    let mut feet = [Vector3::zeros(); 6];
    for (leg, geom) in cfg.legs.iter().enumerate() {
        let neutral_body = geom.leg_to_body(&cfg.neutral_foot);
        // a planted foot moves opposite to the body point above it
        let body_vel = Vector3::new(forward - turn_rate * neutral_body.y, turn_rate * neutral_body.x, 0.0);
        let v_stance = -geom.body_dir_to_leg(&body_vel);
        let start = cfg.neutral_foot - v_stance * (cfg.duty_factor * period / 2.0);
        let phase = GaitPhase::closed_cycle(leg, start, v_stance, period, cfg.duty_factor, cfg.lift_height)?
            .in_phase(sched.phases[leg]);
        let t = sched.cycle_time[leg].clamp(phase.window().0, phase.window().1);
        feet[leg] = gait_foot_position(&phase, t)?;
    }
    Ok((feet, sched.stance_count()))
}

/// Advances the body one step toward `heading_cmd` at the substrate speed.
pub fn body_advance(
    state: &HexapodState,
    cfg: &HexapodConfig,
    heading_cmd: f64,
    dt: f64,
    terrain: TerrainClass,
) -> Result<Advance> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let speed = cfg.speeds.speed(terrain);
    let max_turn = cfg.max_turn_rate * dt;
    let turn = wrap_angle(heading_cmd - state.heading).clamp(-max_turn, max_turn);
    let turn_rate = turn / dt;
    let gait_phase = (state.gait_phase + dt / cfg.period(terrain)).rem_euclid(1.0);

    let mut next = state.clone();
    next.terrain = terrain;
    let (feet, stance_legs) = foot_targets(cfg, terrain, gait_phase, speed, turn_rate)?;
    for (leg, (foot, geom)) in feet.iter().zip(&cfg.legs).enumerate() {
        match leg_ik(foot, geom) {
            Ok(c) => next.legs[leg] = c,
            Err(e) => {
                let mut held = state.clone();
                held.terrain = terrain;
                return Ok(Advance {
                    state: held,
                    fault: Some(Error::InvalidArgument(format!("leg {leg}: {e}"))),
                    stance_legs,
                });
            }
        }
    }
    next.heading = wrap_angle(state.heading + turn);
    let (s, c) = next.heading.sin_cos();
    next.x += speed * dt * c;
    next.y += speed * dt * s;
    next.odometer += speed * dt;
    next.gait_phase = gait_phase;
    Ok(Advance {
        state: next,
        fault: None,
        stance_legs,
    })
}
