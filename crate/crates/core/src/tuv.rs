//! Towed underwater vehicle: a point mass with hydrofoil lift and drag, net
//! weight, bluff-body drag and an elastic tension-only towline to the ASV.
//!
//! Navigation frame is east-x, north-y, z positive down.

use nalgebra::{SVector, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::asv::{BodyWrench, VehicleState3DOF};
use crate::error::{Error, Result};
use crate::world::rotate_nav_to_body;

pub const GRAVITY: f64 = 9.81;

/// Length of cable stocked on the winch drum.
pub const CABLE_STOCK_LENGTH: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TowedBodyState {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
}

impl TowedBodyState {
    pub fn new(position: Vector3<f64>, velocity: Vector3<f64>) -> Self {
        Self { position, velocity }
    }

    pub fn depth(&self) -> f64 {
        self.position.z
    }

    pub fn ground_position(&self) -> Vector2<f64> {
        Vector2::new(self.position.x, self.position.y)
    }

    /// Keeps the body at or below the surface.
    pub fn clamp_to_water(mut self) -> Self {
        if self.position.z < 0.0 {
            self.position.z = 0.0;
            self.velocity.z = self.velocity.z.max(0.0);
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuvParams {
    pub mass: f64,
    pub added_mass: f64,
    /// Hydrofoil planform area, m^2.
    pub foil_area: f64,
    pub lift_coefficient: f64,
    pub drag_coefficient: f64,
    pub water_density: f64,
    /// Bluff-body drag coefficient times frontal area, m^2.
    pub bluff_drag_area: f64,
    /// Buoyancy over weight. 1.0 is neutral; below 1.0 the body sinks.
    pub buoyancy_ratio: f64,
    /// Lift pushes down (depressor) when true, up otherwise.
    pub depressor: bool,
}

impl Default for TuvParams {
    fn default() -> Self {
        Self {
            mass: 8.0,
            added_mass: 2.0,
            foil_area: 0.1,
            lift_coefficient: 0.5,
            drag_coefficient: 0.08,
            water_density: 1025.0,
            bluff_drag_area: 0.01,
            buoyancy_ratio: 0.98,
            depressor: true,
        }
    }
}

impl TuvParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tuv.mass", self.mass),
            ("tuv.added_mass", self.added_mass),
            ("tuv.foil_area", self.foil_area),
            ("tuv.lift_coefficient", self.lift_coefficient),
            ("tuv.drag_coefficient", self.drag_coefficient),
            ("tuv.water_density", self.water_density),
            ("tuv.bluff_drag_area", self.bluff_drag_area),
            ("tuv.buoyancy_ratio", self.buoyancy_ratio),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Weight minus buoyancy, positive when the body sinks.
    pub fn net_weight(&self) -> f64 {
        self.mass * GRAVITY * (1.0 - self.buoyancy_ratio)
    }
}

/// Single massless spring-damper cable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Towline {
    pub unstretched_length: f64,
    pub stiffness: f64,
    pub damping: f64,
    /// Attach point on the ASV along body x (negative is astern).
    pub asv_attach_offset: f64,
    /// Distance from the TUV reference point to its tow eye, along the cable.
    pub tuv_attach_offset: f64,
}

impl Default for Towline {
    fn default() -> Self {
        Self {
            unstretched_length: CABLE_STOCK_LENGTH,
            stiffness: 800.0,
            damping: 50.0,
            asv_attach_offset: -0.8,
            tuv_attach_offset: 0.3,
        }
    }
}

impl Towline {
    pub fn validate(&self) -> Result<()> {
        if !(self.unstretched_length > 0.0 && self.unstretched_length <= CABLE_STOCK_LENGTH) {
            return Err(Error::config(
                "towline.length",
                format!("must be in (0, {CABLE_STOCK_LENGTH}], got {}", self.unstretched_length),
            ));
        }
        if !(self.stiffness >= 0.0 && self.damping >= 0.0) {
            return Err(Error::config("towline", "stiffness and damping must be >= 0"));
        }
        if !(self.tuv_attach_offset >= 0.0) {
            return Err(Error::config("towline.tuv_attach_offset", "must be >= 0"));
        }
        Ok(())
    }
}

/// Force the cable exerts on the TUV attach point.
///
/// `extension_rate` is the rate at which the attach separation grows. The
/// cable only pulls; damping acts only while it is being stretched.
pub fn towline_tension(
    asv_attach: &Vector3<f64>,
    tuv_attach: &Vector3<f64>,
    extension_rate: f64,
    line: &Towline,
) -> Result<Vector3<f64>> {
    let d = asv_attach - tuv_attach;
    let s = d.norm();
    if s == 0.0 {
        return Err(Error::DegenerateGeometry("towline attach points coincide".into()));
    }
    if s <= line.unstretched_length {
        return Ok(Vector3::zeros());
    }
    let magnitude = line.stiffness * (s - line.unstretched_length) + line.damping * extension_rate.max(0.0);
    Ok(d * (magnitude / s))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HydrofoilForces {
    pub lift: f64,
    pub drag: f64,
    pub force: Vector3<f64>,
}

/// Lift and drag on the foil for the body's velocity through the water.
///
/// Drag opposes the flow; lift is perpendicular to it in the vertical plane
/// containing the flow. Purely vertical flow produces no lift direction and
/// lift is then dropped.
pub fn hydrofoil_forces(v_rel: &Vector3<f64>, params: &TuvParams) -> HydrofoilForces {
    let speed = v_rel.norm();
    if speed == 0.0 {
        return HydrofoilForces::default();
    }
    let q = 0.5 * params.water_density * speed * speed * params.foil_area;
    let lift = q * params.lift_coefficient;
    let drag = q * params.drag_coefficient;
    let flow = v_rel / speed;
    let down = Vector3::new(0.0, 0.0, 1.0);
    let normal = down - flow * down.dot(&flow);
    let lift_dir = match normal.try_normalize(1e-12) {
        Some(n) if params.depressor => n,
        Some(n) => -n,
        None => Vector3::zeros(),
    };
    let lift = if lift_dir == Vector3::zeros() { 0.0 } else { lift };
    HydrofoilForces {
        lift,
        drag,
        force: lift_dir * lift - flow * drag,
    }
}

/// Hydrodynamic, bluff-drag and net-weight forces on the body.
pub fn body_forces(state: &TowedBodyState, params: &TuvParams, current: &Vector3<f64>) -> Vector3<f64> {
    let v_rel = state.velocity - current;
    let foil = hydrofoil_forces(&v_rel, params);
    let bluff = -v_rel * (0.5 * params.water_density * params.bluff_drag_area * v_rel.norm());
    foil.force + bluff + Vector3::new(0.0, 0.0, params.net_weight())
}

/// `dv/dt = (F_b + T) / (m_b + m_a)`.
pub fn tuv_dynamics(
    state: &TowedBodyState,
    params: &TuvParams,
    tension: &Vector3<f64>,
    current: &Vector3<f64>,
) -> Vector3<f64> {
    (body_forces(state, params, current) + tension) / (params.mass + params.added_mass)
}

/// Slews the paid-out length toward `commanded` at no more than `max_rate`.
pub fn winch_set_length(line: &Towline, commanded: f64, max_rate: f64, dt: f64) -> Result<Towline> {
    if commanded > CABLE_STOCK_LENGTH {
        return Err(Error::OutOfRange {
            what: "winch command",
            value: commanded,
            limit: CABLE_STOCK_LENGTH,
        });
    }
    if !(commanded > 0.0) {
        return Err(Error::OutOfRange {
            what: "winch command",
            value: commanded,
            limit: 0.0,
        });
    }
    let step = max_rate.abs() * dt;
    let delta = (commanded - line.unstretched_length).clamp(-step, step);
    Ok(Towline {
        unstretched_length: line.unstretched_length + delta,
        ..*line
    })
}

/// Cable forces acting on both vehicles for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TowForces {
    pub on_tuv: Vector3<f64>,
    pub on_asv: Vector3<f64>,
    /// `on_asv` expressed as a body wrench about the ASV reference point.
    pub asv_wrench: BodyWrench,
    pub separation: f64,
}

/// ASV tow-point position and velocity in the navigation frame (z = 0).
pub fn asv_attach_point(asv: &VehicleState3DOF, line: &Towline) -> (Vector3<f64>, Vector3<f64>) {
    let (s, c) = asv.heading.sin_cos();
    let ox = line.asv_attach_offset;
    let p = Vector3::new(asv.x + c * ox, asv.y + s * ox, 0.0);
    let v_nav = asv.nav_velocity();
    // point velocity: v + r x offset
    let v = Vector3::new(v_nav.x - asv.yaw_rate * s * ox, v_nav.y + asv.yaw_rate * c * ox, 0.0);
    (p, v)
}

/// Evaluates the cable between the two vehicles.
pub fn tow_forces(asv: &VehicleState3DOF, tuv: &TowedBodyState, line: &Towline) -> Result<TowForces> {
    let (a, va) = asv_attach_point(asv, line);
    let d = a - tuv.position;
    let dist = d.norm();
    if dist <= line.tuv_attach_offset {
        return Err(Error::DegenerateGeometry("towed body reached the tow point".into()));
    }
    let dir = d / dist;
    let tuv_attach = tuv.position + dir * line.tuv_attach_offset;
    let rate = dir.dot(&(va - tuv.velocity));
    let on_tuv = towline_tension(&a, &tuv_attach, rate, line)?;
    let on_asv = -on_tuv;
    let fb = rotate_nav_to_body(Vector2::new(on_asv.x, on_asv.y), asv.heading)?;
    Ok(TowForces {
        on_tuv,
        on_asv,
        asv_wrench: BodyWrench::new(fb.x, fb.y, line.asv_attach_offset * fb.y),
        separation: dist - line.tuv_attach_offset,
    })
}

/// Packs the towed body into `[x, y, z, vx, vy, vz]`.
pub fn to_vector(s: &TowedBodyState) -> SVector<f64, 6> {
    SVector::<f64, 6>::from_column_slice(&[
        s.position.x,
        s.position.y,
        s.position.z,
        s.velocity.x,
        s.velocity.y,
        s.velocity.z,
    ])
}

pub fn from_vector(v: &SVector<f64, 6>) -> TowedBodyState {
    TowedBodyState::new(Vector3::new(v[0], v[1], v[2]), Vector3::new(v[3], v[4], v[5]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(k: f64, c: f64) -> Towline {
        Towline {
            stiffness: k,
            damping: c,
            ..Towline::default()
        }
    }

    #[test]
    fn slack_cable_has_no_tension() {
        let t = towline_tension(&Vector3::new(29.9, 0.0, 0.0), &Vector3::zeros(), 1.0, &line(500.0, 50.0)).unwrap();
        assert_eq!(t, Vector3::zeros());
    }

    #[test]
    fn taut_cable_spring_law() {
        let t = towline_tension(&Vector3::new(30.1, 0.0, 0.0), &Vector3::zeros(), 0.0, &line(500.0, 0.0)).unwrap();
        assert!((t.norm() - 50.0).abs() < 1e-9);
        assert!(t.x > 0.0);
    }

    #[test]
    fn damping_only_while_stretching() {
        let l = line(500.0, 100.0);
        let a = Vector3::new(30.1, 0.0, 0.0);
        let pulling = towline_tension(&a, &Vector3::zeros(), 0.2, &l).unwrap();
        let easing = towline_tension(&a, &Vector3::zeros(), -0.2, &l).unwrap();
        assert!((pulling.norm() - 70.0).abs() < 1e-9);
        assert!((easing.norm() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn coincident_attach_points_are_degenerate() {
        let p = Vector3::new(1.0, 2.0, 3.0);
        assert!(matches!(
            towline_tension(&p, &p, 0.0, &Towline::default()),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn equal_and_opposite_on_vehicles() {
        let asv = VehicleState3DOF {
            x: 40.0,
            y: 3.0,
            heading: 0.4,
            surge: 1.5,
            yaw_rate: 0.05,
            ..Default::default()
        };
        let tuv = TowedBodyState::new(Vector3::new(10.0, 0.0, 12.0), Vector3::new(1.0, 0.0, 0.1));
        let f = tow_forces(&asv, &tuv, &Towline::default()).unwrap();
        assert!(f.on_tuv.norm() > 0.0);
        assert_eq!(f.on_asv + f.on_tuv, Vector3::zeros());
    }

    #[test]
    fn foil_force_examples() {
        let p = TuvParams {
            water_density: 1025.0,
            foil_area: 0.1,
            lift_coefficient: 0.5,
            drag_coefficient: 0.08,
            ..TuvParams::default()
        };
        assert_eq!(hydrofoil_forces(&Vector3::zeros(), &p), HydrofoilForces::default());
        let f = hydrofoil_forces(&Vector3::new(2.0, 0.0, 0.0), &p);
        assert!((f.lift - 102.5).abs() < 1e-9);
        assert!((f.drag - 16.4).abs() < 1e-9);
        // depressor: lift along +z (down), drag along -x
        assert!((f.force - Vector3::new(-16.4, 0.0, 102.5)).norm() < 1e-9);
    }

    #[test]
    fn lift_perpendicular_drag_antiparallel() {
        let p = TuvParams::default();
        for v in [Vector3::new(1.0, 0.5, 0.3), Vector3::new(-0.4, 2.0, -0.7), Vector3::new(0.1, 0.0, 0.0)] {
            let f = hydrofoil_forces(&v, &p);
            let flow = v.normalize();
            let lift_vec = f.force + flow * f.drag;
            assert!(lift_vec.dot(&v).abs() < 1e-12);
            let drag_vec = f.force - lift_vec;
            assert!((drag_vec.dot(&v) + f.drag * v.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_flow_has_no_lift() {
        let f = hydrofoil_forces(&Vector3::new(0.0, 0.0, 1.0), &TuvParams::default());
        assert_eq!(f.lift, 0.0);
        assert!(f.force.z < 0.0);
    }

    #[test]
    fn dynamics_examples() {
        let neutral = TuvParams {
            buoyancy_ratio: 1.0,
            ..TuvParams::default()
        };
        let rest = TowedBodyState::default();
        assert_eq!(tuv_dynamics(&rest, &neutral, &Vector3::zeros(), &Vector3::zeros()), Vector3::zeros());

        let p = TuvParams {
            mass: 8.0,
            added_mass: 2.0,
            ..neutral
        };
        let a = tuv_dynamics(&rest, &p, &Vector3::new(10.0, 0.0, 0.0), &Vector3::zeros());
        assert_eq!(a, Vector3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn winch_examples() {
        let l = Towline::default();
        assert_eq!(winch_set_length(&l, 30.0, 0.5, 1.0).unwrap().unstretched_length, 30.0);
        assert_eq!(winch_set_length(&l, 10.0, 0.5, 1.0).unwrap().unstretched_length, 29.5);
        assert!(matches!(winch_set_length(&l, 35.0, 0.5, 1.0), Err(Error::OutOfRange { .. })));
        assert!(winch_set_length(&l, 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn surface_clamp() {
        let s = TowedBodyState::new(Vector3::new(0.0, 0.0, -0.2), Vector3::new(0.0, 0.0, -1.0)).clamp_to_water();
        assert_eq!(s.position.z, 0.0);
        assert_eq!(s.velocity.z, 0.0);
    }
}
