//! Three-joint leg kinematics.
//!
//! Leg-base frame: x radial (outward at zero coxa yaw), y lateral, z down.
//! The chain is coxa yaw about z, femur pitch, then the knee. The knee angle
//! is measured between the two segments, so with `d = hypot(x, y)`:
//!
//! ```text
//! coxa  = atan2(y, x)
//! knee  = acos((d^2 + z^2 - l1^2 - l2^2) / (2 l1 l2))
//! femur = atan2(z, d) - atan2(l2 sin(knee), l1 + l2 cos(knee))
//! ```

use std::f64::consts::PI;

use nalgebra::{Rotation3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KneeBranch {
    /// Principal value of the acos (knee bends upward).
    #[default]
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointLimits {
    pub coxa: (f64, f64),
    pub knee: (f64, f64),
    pub femur: (f64, f64),
}

impl Default for JointLimits {
    fn default() -> Self {
        Self {
            coxa: (-PI, PI),
            knee: (-PI / 2.0, PI / 2.0),
            femur: (-PI / 2.0, PI / 2.0),
        }
    }
}

impl JointLimits {
    pub fn unbounded() -> Self {
        Self {
            coxa: (-PI, PI),
            knee: (-PI, PI),
            femur: (-PI, PI),
        }
    }
}

/// Segment lengths and where the leg is mounted on the body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegGeometry {
    /// First segment (femur) length `l1`, m.
    pub upper: f64,
    /// Second segment (tibia) length `l2`, m.
    pub lower: f64,
    /// Hip position in the body frame.
    pub mount: Vector2<f64>,
    /// Yaw of the leg-base frame relative to the body.
    pub mount_yaw: f64,
    pub limits: JointLimits,
    pub branch: KneeBranch,
}

impl LegGeometry {
    pub fn new(upper: f64, lower: f64) -> Result<Self> {
        if !(upper > 0.0 && lower > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "segment lengths must be > 0, got ({upper}, {lower})"
            )));
        }
        Ok(Self {
            upper,
            lower,
            mount: Vector2::zeros(),
            mount_yaw: 0.0,
            limits: JointLimits::default(),
            branch: KneeBranch::Up,
        })
    }

    pub fn mounted(mut self, mount: Vector2<f64>, yaw: f64) -> Self {
        self.mount = mount;
        self.mount_yaw = yaw;
        self
    }

    pub fn with_limits(mut self, limits: JointLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn min_reach(&self) -> f64 {
        (self.upper - self.lower).abs()
    }

    pub fn max_reach(&self) -> f64 {
        self.upper + self.lower
    }

    /// Leg-base frame point to body frame (same z).
    pub fn leg_to_body(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let (s, c) = self.mount_yaw.sin_cos();
        Vector3::new(self.mount.x + c * p.x - s * p.y, self.mount.y + s * p.x + c * p.y, p.z)
    }

    /// Body frame point to leg-base frame.
    pub fn body_to_leg(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let (s, c) = self.mount_yaw.sin_cos();
        let dx = p.x - self.mount.x;
        let dy = p.y - self.mount.y;
        Vector3::new(c * dx + s * dy, -s * dx + c * dy, p.z)
    }

    /// Rotates a body-frame direction into the leg-base frame.
    pub fn body_dir_to_leg(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let (s, c) = self.mount_yaw.sin_cos();
        Vector3::new(c * v.x + s * v.y, -s * v.x + c * v.y, v.z)
    }
}

/// Joint angles of one leg.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LegConfiguration {
    pub coxa: f64,
    pub knee: f64,
    pub femur: f64,
}

impl LegConfiguration {
    pub fn new(coxa: f64, knee: f64, femur: f64) -> Self {
        Self { coxa, knee, femur }
    }
}

/// Foot position in the leg-base frame, composed joint by joint.
pub fn leg_fk(cfg: &LegConfiguration, geom: &LegGeometry) -> Vector3<f64> {
    let yaw = Rotation3::from_axis_angle(&Vector3::z_axis(), cfg.coxa);
    // positive pitch swings the segment toward +z (down)
    let femur = Rotation3::from_axis_angle(&Vector3::y_axis(), -cfg.femur);
    let knee = Rotation3::from_axis_angle(&Vector3::y_axis(), -cfg.knee);
    let foot_in_tibia = Vector3::new(geom.lower, 0.0, 0.0);
    let upper = Vector3::new(geom.upper, 0.0, 0.0);
    yaw * (femur * (upper + knee * foot_in_tibia))
}

/// Joint angles reaching `p_foot`, ignoring joint limits.
pub fn leg_ik_unchecked(p_foot: &Vector3<f64>, geom: &LegGeometry) -> Result<LegConfiguration> {
    let (l1, l2) = (geom.upper, geom.lower);
    let d = p_foot.x.hypot(p_foot.y);
    let z = p_foot.z;
    let r = d.hypot(z);
    if !(r >= geom.min_reach() && r <= geom.max_reach()) {
        return Err(Error::WorkspaceViolation {
            radius: r,
            min: geom.min_reach(),
            max: geom.max_reach(),
        });
    }
    let coxa = p_foot.y.atan2(p_foot.x);
    let cos_knee = ((d * d + z * z - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0);
    let mut knee = cos_knee.acos();
    if geom.branch == KneeBranch::Down {
        knee = -knee;
    }
    let femur = z.atan2(d) - (l2 * knee.sin()).atan2(l1 + l2 * knee.cos());
    Ok(LegConfiguration { coxa, knee, femur })
}

fn check_limit(joint: &'static str, angle: f64, (min, max): (f64, f64)) -> Result<()> {
    if angle < min || angle > max {
        Err(Error::JointLimit { joint, angle, min, max })
    } else {
        Ok(())
    }
}

/// Joint angles reaching `p_foot` within the workspace annulus and joint limits.
pub fn leg_ik(p_foot: &Vector3<f64>, geom: &LegGeometry) -> Result<LegConfiguration> {
    let cfg = leg_ik_unchecked(p_foot, geom)?;
    check_limit("coxa", cfg.coxa, geom.limits.coxa)?;
    check_limit("knee", cfg.knee, geom.limits.knee)?;
    check_limit("femur", cfg.femur, geom.limits.femur)?;
    Ok(cfg)
}
