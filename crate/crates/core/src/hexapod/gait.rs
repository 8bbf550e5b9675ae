//! Stance/swing foot trajectories and the tripod schedule.
//!
//! During stance the foot moves linearly, `p(t) = p0 + v_stance t`. Swing
//! picks up exactly where stance ended, `p(t) = p(t_end) + v_swing (t - t_end)`,
//! optionally with a parabolic lift superposed on z.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegPhase {
    Stance,
    Swing,
}

/// Trajectory parameters for one leg over one gait cycle. Times are measured
/// from the start of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitPhase {
    pub leg: usize,
    pub phase: LegPhase,
    /// Foot position at the start of stance.
    pub start: Vector3<f64>,
    pub stance_velocity: Vector3<f64>,
    pub swing_velocity: Vector3<f64>,
    /// Time at which stance ends and swing begins.
    pub stance_end: f64,
    pub period: f64,
    pub duty_factor: f64,
    /// Peak foot lift during swing (z is down, so lift is toward -z).
    pub lift_height: f64,
}

impl GaitPhase {
    /// Phase layout for a closed cycle: the swing velocity brings the foot back
    /// to `start` at the end of the period.
    pub fn closed_cycle(
        leg: usize,
        start: Vector3<f64>,
        stance_velocity: Vector3<f64>,
        period: f64,
        duty_factor: f64,
        lift_height: f64,
    ) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::InvalidArgument(format!("gait period must be > 0, got {period}")));
        }
        if !(duty_factor > 0.0 && duty_factor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "duty factor must be in (0, 1), got {duty_factor}"
            )));
        }
        Ok(Self {
            leg,
            phase: LegPhase::Stance,
            start,
            stance_velocity,
            swing_velocity: -stance_velocity * (duty_factor / (1.0 - duty_factor)),
            stance_end: duty_factor * period,
            period,
            duty_factor,
            lift_height,
        })
    }

    pub fn in_phase(mut self, phase: LegPhase) -> Self {
        self.phase = phase;
        self
    }

    pub fn window(&self) -> (f64, f64) {
        match self.phase {
            LegPhase::Stance => (0.0, self.stance_end),
            LegPhase::Swing => (self.stance_end, self.period),
        }
    }

    fn stance_at(&self, t: f64) -> Vector3<f64> {
        self.start + self.stance_velocity * t
    }
}

/// Foot position at cycle time `t` within the phase window.
pub fn gait_foot_position(phase: &GaitPhase, t: f64) -> Result<Vector3<f64>> {
    let (start, end) = phase.window();
    if !(t >= start && t <= end) {
        return Err(Error::PhaseSequencing { t, start, end });
    }
    match phase.phase {
        LegPhase::Stance => Ok(phase.stance_at(t)),
        LegPhase::Swing => {
            let mut p = phase.stance_at(phase.stance_end) + phase.swing_velocity * (t - phase.stance_end);
            if phase.lift_height != 0.0 {
                let span = phase.period - phase.stance_end;
                let s = (t - phase.stance_end) / span;
                p.z -= 4.0 * phase.lift_height * s * (1.0 - s);
            }
            Ok(p)
        }
    }
}

/// Legs of the first tripod; the rest form the second.
pub const TRIPOD_A: [usize; 3] = [0, 2, 4];

/// Phase offset (fraction of a cycle) for each leg.
pub fn tripod_offset(leg: usize) -> f64 {
    if TRIPOD_A.contains(&leg) {
        0.0
    } else {
        0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripodSchedule {
    pub phases: [LegPhase; 6],
    /// Time since the start of each leg's own cycle.
    pub cycle_time: [f64; 6],
    /// Set when the duty factor is below 0.5 and fewer than three legs may
    /// be on the ground.
    pub stability_warning: bool,
}

impl TripodSchedule {
    pub fn stance_count(&self) -> usize {
        self.phases.iter().filter(|p| **p == LegPhase::Stance).count()
    }
}

/// Per-leg phase assignment at time `t` for an alternating tripod gait.
pub fn tripod_schedule(t: f64, period: f64, duty_factor: f64) -> Result<TripodSchedule> {
    if !(period > 0.0) {
        return Err(Error::InvalidArgument(format!("gait period must be > 0, got {period}")));
    }
    if !(duty_factor > 0.0 && duty_factor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "duty factor must be in (0, 1), got {duty_factor}"
        )));
    }
    let base = (t / period).rem_euclid(1.0);
    let mut phases = [LegPhase::Stance; 6];
    let mut cycle_time = [0.0; 6];
    for leg in 0..6 {
        let frac = (base + tripod_offset(leg)).rem_euclid(1.0);
        phases[leg] = if frac < duty_factor {
            LegPhase::Stance
        } else {
            LegPhase::Swing
        };
        cycle_time[leg] = frac * period;
    }
    Ok(TripodSchedule {
        phases,
        cycle_time,
        stability_warning: duty_factor < 0.5,
    })
}
