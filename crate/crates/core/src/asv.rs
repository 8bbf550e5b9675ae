//! Surface-vehicle rigid-body model: planar kinematics, the mass/Coriolis
//! dynamics and differential-thrust allocation.
//!
//! The Coriolis matrix used here is
//!
//! ```text
//!       |  0        -m33 r    m22 v |
//! C  =  |  m33 r     0       -m11 u |
//!       | -m22 v     m11 u    0     |
//! ```
//!
//! which is skew-symmetric, so an unforced, undamped hull conserves
//! `0.5 (m11 u^2 + m22 v^2 + m33 r^2)`.

use nalgebra::{Vector2, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::{rk4_step, rotate_nav_to_body, wrap_angle};

/// Pose and body velocities of the surface vehicle.
///
/// Only the planar 3-DOF channels are integrated; the remaining 6-DOF fields
/// are carried unchanged for log completeness.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState3DOF {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub surge: f64,
    pub sway: f64,
    pub yaw_rate: f64,
    #[serde(default)]
    pub inert: InertPose,
}

/// Out-of-plane pose and rates. Never integrated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InertPose {
    pub z: f64,
    pub roll: f64,
    pub pitch: f64,
    pub heave: f64,
    pub roll_rate: f64,
    pub pitch_rate: f64,
}

impl VehicleState3DOF {
    pub fn at_rest(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: wrap_angle(heading),
            ..Default::default()
        }
    }

    /// Packs `(x, y, heading, surge, sway, yaw_rate)`.
    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.x,
            self.y,
            self.heading,
            self.surge,
            self.sway,
            self.yaw_rate,
        )
    }

    /// Unpacks a 6-vector, wrapping the heading and keeping `inert` as given.
    pub fn from_vector(v: &Vector6<f64>, inert: InertPose) -> Self {
        Self {
            x: v[0],
            y: v[1],
            heading: wrap_angle(v[2]),
            surge: v[3],
            sway: v[4],
            yaw_rate: v[5],
            inert,
        }
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn body_velocity(&self) -> Vector3<f64> {
        Vector3::new(self.surge, self.sway, self.yaw_rate)
    }

    /// Velocity over ground in the navigation frame.
    pub fn nav_velocity(&self) -> Vector2<f64> {
        let (s, c) = self.heading.sin_cos();
        Vector2::new(
            c * self.surge - s * self.sway,
            s * self.surge + c * self.sway,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }

    /// `0.5 (m11 u^2 + m22 v^2 + m33 r^2)`.
    pub fn kinetic_energy(&self, params: &AsvParams) -> f64 {
        0.5 * (params.m11 * self.surge * self.surge
            + params.m22 * self.sway * self.sway
            + params.m33 * self.yaw_rate * self.yaw_rate)
    }
}

/// Rigid-body and actuator parameters. Masses include added mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsvParams {
    pub m11: f64,
    pub m22: f64,
    pub m33: f64,
    pub thruster_half_spacing: f64,
    pub max_thrust_per_motor: f64,
}

impl Default for AsvParams {
    fn default() -> Self {
        Self {
            m11: 50.0,
            m22: 60.0,
            m33: 20.0,
            thruster_half_spacing: 0.35,
            max_thrust_per_motor: 40.0,
        }
    }
}

impl AsvParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("asv.m11", self.m11),
            ("asv.m22", self.m22),
            ("asv.m33", self.m33),
            ("asv.thruster_half_spacing", self.thruster_half_spacing),
            ("asv.max_thrust_per_motor", self.max_thrust_per_motor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Surge force, sway force and yaw moment in the body frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyWrench {
    pub surge: f64,
    pub sway: f64,
    pub yaw: f64,
}

impl BodyWrench {
    pub const ZERO: BodyWrench = BodyWrench {
        surge: 0.0,
        sway: 0.0,
        yaw: 0.0,
    };

    pub fn new(surge: f64, sway: f64, yaw: f64) -> Self {
        Self { surge, sway, yaw }
    }

    pub fn is_finite(&self) -> bool {
        self.surge.is_finite() && self.sway.is_finite() && self.yaw.is_finite()
    }
}

impl std::ops::Add for BodyWrench {
    type Output = BodyWrench;
    fn add(self, o: BodyWrench) -> BodyWrench {
        BodyWrench::new(self.surge + o.surge, self.sway + o.sway, self.yaw + o.yaw)
    }
}

/// Pose rates `(x_dot, y_dot, heading_dot)` from body velocities.
pub fn asv_kinematics(state: &VehicleState3DOF) -> Vector3<f64> {
    let (s, c) = state.heading.sin_cos();
    Vector3::new(
        c * state.surge - s * state.sway,
        s * state.surge + c * state.sway,
        state.yaw_rate,
    )
}

/// Body accelerations `(u_dot, v_dot, r_dot)` under the given wrench.
pub fn asv_dynamics(
    state: &VehicleState3DOF,
    params: &AsvParams,
    wrench: &BodyWrench,
) -> Vector3<f64> {
    let (u, v, r) = (state.surge, state.sway, state.yaw_rate);
    let (m11, m22, m33) = (params.m11, params.m22, params.m33);
    Vector3::new(
        (wrench.surge + m33 * r * v - m22 * v * r) / m11,
        (wrench.sway - m33 * r * u + m11 * u * r) / m22,
        (wrench.yaw + m22 * v * u - m11 * u * v) / m33,
    )
}

/// Linear hydrodynamic damping on water-relative body velocity.
///
/// Not part of the rigid-body model above; added by the environment layer.
/// All-zero by default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearDamping {
    pub surge: f64,
    pub sway: f64,
    pub yaw: f64,
}

impl LinearDamping {
    /// Damping used by the shipped scenario defaults.
    pub fn scenario_default() -> Self {
        Self {
            surge: 25.0,
            sway: 40.0,
            yaw: 10.0,
        }
    }

    /// `-(d11 u_r, d22 v_r, d33 r)` with `u_r, v_r` relative to the water.
    pub fn wrench(&self, state: &VehicleState3DOF, current_nav: Vector2<f64>) -> BodyWrench {
        let (uc, vc) = if current_nav == Vector2::zeros() {
            (0.0, 0.0)
        } else {
            let c = rotate_nav_to_body(current_nav, state.heading).unwrap_or_default();
            (c.x, c.y)
        };
        BodyWrench::new(
            -self.surge * (state.surge - uc),
            -self.sway * (state.sway - vc),
            -self.yaw * state.yaw_rate,
        )
    }
}

/// Thruster split produced by [`allocate_differential_thrust`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ThrustAllocation {
    pub left: f64,
    pub right: f64,
    pub realized: BodyWrench,
}

/// Splits surge and yaw commands across two parallel thrusters, clamping each
/// to its limit. The realized wrench is recomputed from the clamped thrusts.
pub fn allocate_differential_thrust(
    surge_cmd: f64,
    yaw_cmd: f64,
    params: &AsvParams,
) -> ThrustAllocation {
    let b = params.thruster_half_spacing;
    let max = params.max_thrust_per_motor;
    let left = (0.5 * (surge_cmd - yaw_cmd / b)).clamp(-max, max);
    let right = (0.5 * (surge_cmd + yaw_cmd / b)).clamp(-max, max);
    ThrustAllocation {
        left,
        right,
        realized: BodyWrench::new(left + right, 0.0, (right - left) * b),
    }
}

/// Full 6-vector derivative of `(x, y, heading, u, v, r)`.
pub fn state_derivative(x: &Vector6<f64>, params: &AsvParams, wrench: &BodyWrench) -> Vector6<f64> {
    let s = VehicleState3DOF::from_vector(x, InertPose::default());
    // keep the unwrapped heading for the trig; wrapping is irrelevant there
    let pose = asv_kinematics(&s);
    let acc = asv_dynamics(&s, params, wrench);
    Vector6::new(pose[0], pose[1], pose[2], acc[0], acc[1], acc[2])
}

/// Advances the hull one RK4 step. `external` is held constant over the step;
/// damping is re-evaluated at each stage.
pub fn step_asv(
    state: &VehicleState3DOF,
    params: &AsvParams,
    damping: &LinearDamping,
    external: &BodyWrench,
    current_nav: Vector2<f64>,
    t: f64,
    dt: f64,
) -> Result<VehicleState3DOF> {
    let inert = state.inert;
    let next = rk4_step(t, &state.to_vector(), dt, |_, x| {
        let s = VehicleState3DOF::from_vector(x, inert);
        let w = *external + damping.wrench(&s, current_nav);
        state_derivative(x, params, &w)
    })?;
    Ok(VehicleState3DOF::from_vector(&next, inert))
}
