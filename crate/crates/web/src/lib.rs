//! Browser bindings: search pattern preview, hexapod leg pose, and a short
//! station-keeping run under wind.

use std::path::Path;

use nalgebra::{Rotation3, Vector2, Vector3};
use wasm_bindgen::prelude::*;

use coastal_search::hexapod::locomotion::foot_targets;
use coastal_search::hexapod::{leg_ik, HexapodConfig};
use coastal_search::mission::{generate_lawnmower, Corner, Rect};
use coastal_search::{parse_scenario, run_simulation};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn corner(name: &str) -> Result<Corner, JsError> {
    match name {
        "south_west" => Ok(Corner::SouthWest),
        "south_east" => Ok(Corner::SouthEast),
        "north_west" => Ok(Corner::NorthWest),
        "north_east" => Ok(Corner::NorthEast),
        other => Err(JsError::new(&format!("unknown entry corner `{other}`"))),
    }
}

/// Route vertices of a lawnmower pattern over `[0, width] x [0, height]`,
/// flattened as `x0, y0, x1, y1, ...`.
#[wasm_bindgen]
pub fn lawnmower(width: f64, height: f64, swath: f64, entry: &str) -> Result<Vec<f64>, JsError> {
    let area = Rect::new(Vector2::zeros(), Vector2::new(width, height)).map_err(js_err)?;
    let pattern = generate_lawnmower(area, swath, corner(entry)?).map_err(js_err)?;
    Ok(pattern.waypoints().iter().flat_map(|p| [p.x, p.y]).collect())
}

/// Body-frame hip, knee and foot points of all six legs at a gait phase in
/// `[0, 1)`, flattened as 6 x `(hip xyz, knee xyz, foot xyz)`.
#[wasm_bindgen]
pub fn hexapod_pose(gait_phase: f64, forward: f64, turn_rate: f64) -> Result<Vec<f64>, JsError> {
    let cfg = HexapodConfig::default();
    let terrain = coastal_search::environment::TerrainClass::Sand;
    let (feet, _) = foot_targets(&cfg, terrain, gait_phase.rem_euclid(1.0), forward, turn_rate).map_err(js_err)?;
    let mut out = Vec::with_capacity(6 * 9);
    for (foot, geom) in feet.iter().zip(&cfg.legs) {
        let q = leg_ik(foot, geom).map_err(js_err)?;
        let knee = Rotation3::from_axis_angle(&Vector3::z_axis(), q.coxa)
            * Rotation3::from_axis_angle(&Vector3::y_axis(), -q.femur)
            * Vector3::new(geom.upper, 0.0, 0.0);
        let hip = geom.leg_to_body(&Vector3::zeros());
        for p in [hip, geom.leg_to_body(&knee), geom.leg_to_body(foot)] {
            out.extend_from_slice(&[p.x, p.y, p.z]);
        }
    }
    Ok(out)
}

/// Outcome of [`loiter_run`].
#[wasm_bindgen]
pub struct LoiterTrace {
    xs: Vec<f64>,
    ys: Vec<f64>,
    fraction_within: f64,
    hold_radius: f64,
}

#[wasm_bindgen]
impl LoiterTrace {
    pub fn xs(&self) -> Vec<f64> {
        self.xs.clone()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.ys.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fraction_within(&self) -> f64 {
        self.fraction_within
    }

    #[wasm_bindgen(getter)]
    pub fn hold_radius(&self) -> f64 {
        self.hold_radius
    }
}

/// Holds station at the origin for `duration` seconds in the given wind and
/// returns the true track sampled at 1 Hz.
#[wasm_bindgen]
pub fn loiter_run(wind_kmh: f64, wind_direction_deg: f64, seed: u32, duration: f64) -> Result<LoiterTrace, JsError> {
    let text = format!(
        r#"
        name = "browser-loiter"
        [run]
        seed = {seed}
        duration = {duration}
        mode = "loiter"
        [world.disturbances]
        mean_wind_speed = "{wind_kmh} km/h"
        wind_direction = {wind_direction_deg}
        surface_current = "0.15 km/h"
        current_direction = 180
        wave_height = 0.5
        [loiter]
        point = [0.0, 0.0]
        "#
    );
    let sc = parse_scenario(&text, Path::new(".")).map_err(js_err)?;
    let log = run_simulation(&sc).map_err(js_err)?;
    let every = (1.0 / sc.run.dt).round().max(1.0) as usize;
    let (xs, ys) = log.states.iter().step_by(every).map(|s| (s.asv[0], s.asv[1])).unzip();
    let station = log.metrics.station.ok_or_else(|| JsError::new("run produced no station metrics"))?;
    Ok(LoiterTrace {
        xs,
        ys,
        fraction_within: station.fraction_within,
        hold_radius: station.hold_radius,
    })
}
