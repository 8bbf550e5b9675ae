//! Wind, current and wave forcing on the ASV, plus the seabed terrain map.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::asv::{BodyWrench, VehicleState3DOF};
use crate::error::{Error, Result};
use crate::world::{rotate_nav_to_body, streams, SeededRng};

/// Converts km/h to m/s.
pub fn kmh_to_ms(v: f64) -> f64 {
    v / 3.6
}

/// Environmental forcing parameters. Directions are the way the wind or
/// current is heading, counter-clockwise from east.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceField {
    pub mean_wind_speed: f64,
    pub wind_direction: f64,
    pub surface_current: f64,
    pub current_direction: f64,
    pub wave_height: f64,
    pub wave_period: f64,
    /// Gust correlation time, s.
    pub gust_time_constant: f64,
    /// Gust standard deviation as a fraction of the mean wind speed.
    pub gust_intensity: f64,
    pub air_density: f64,
    /// Wind drag coefficient times exposed area, m^2.
    pub windage_area: f64,
    /// Sway force amplitude per metre of wave height, N/m.
    pub wave_sway_gain: f64,
    /// Yaw moment amplitude per metre of wave height, N m/m.
    pub wave_yaw_gain: f64,
}

impl Default for DisturbanceField {
    fn default() -> Self {
        Self {
            mean_wind_speed: 0.0,
            wind_direction: 0.0,
            surface_current: 0.0,
            current_direction: 0.0,
            wave_height: 0.0,
            wave_period: 4.0,
            gust_time_constant: 10.0,
            gust_intensity: 0.1,
            air_density: 1.225,
            windage_area: 0.4,
            wave_sway_gain: 20.0,
            wave_yaw_gain: 2.0,
        }
    }
}

impl DisturbanceField {
    /// Coastal test-day conditions: 25 km/h wind, 0.15 km/h surface flow,
    /// 0.5 m waves.
    pub fn coastal() -> Self {
        Self {
            mean_wind_speed: kmh_to_ms(25.0),
            surface_current: kmh_to_ms(0.15),
            wave_height: 0.5,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("disturbances.mean_wind_speed", self.mean_wind_speed),
            ("disturbances.surface_current", self.surface_current),
            ("disturbances.wave_height", self.wave_height),
            ("disturbances.gust_intensity", self.gust_intensity),
            ("disturbances.air_density", self.air_density),
            ("disturbances.windage_area", self.windage_area),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(name, format!("must be >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("disturbances.wave_period", self.wave_period),
            ("disturbances.gust_time_constant", self.gust_time_constant),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn current_velocity(&self) -> Vector2<f64> {
        if self.surface_current == 0.0 {
            return Vector2::zeros();
        }
        let (s, c) = self.current_direction.sin_cos();
        Vector2::new(c, s) * self.surface_current
    }
}

/// Aerodynamic drag on the hull for a given instantaneous wind speed.
pub fn wind_wrench(field: &DisturbanceField, wind_speed: f64, asv: &VehicleState3DOF) -> BodyWrench {
    if wind_speed == 0.0 {
        return BodyWrench::ZERO;
    }
    let (s, c) = field.wind_direction.sin_cos();
    let apparent = Vector2::new(c, s) * wind_speed - asv.nav_velocity();
    let force = apparent * (0.5 * field.air_density * field.windage_area * apparent.norm());
    let body = rotate_nav_to_body(force, asv.heading).unwrap_or_default();
    BodyWrench::new(body.x, body.y, 0.0)
}

/// Zero-mean sinusoidal sway/yaw forcing from waves.
pub fn wave_wrench(field: &DisturbanceField, phases: (f64, f64), t: f64) -> BodyWrench {
    if field.wave_height == 0.0 {
        return BodyWrench::ZERO;
    }
    let w = 2.0 * PI / field.wave_period;
    BodyWrench::new(
        0.0,
        field.wave_sway_gain * field.wave_height * (w * t + phases.0).sin(),
        field.wave_yaw_gain * field.wave_height * (w * t + phases.1).sin(),
    )
}

/// First-order Gauss-Markov gust on wind speed, discretized exactly.
#[derive(Debug, Clone)]
pub struct GustProcess {
    value: f64,
    sigma: f64,
    time_constant: f64,
    rng: SeededRng,
}

impl GustProcess {
    pub fn new(field: &DisturbanceField, seed: u64) -> Self {
        let mut rng = SeededRng::new(seed, streams::GUST);
        let sigma = field.gust_intensity * field.mean_wind_speed;
        // start from the stationary distribution
        let value = rng.normal(sigma);
        Self {
            value,
            sigma,
            time_constant: field.gust_time_constant,
            rng,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn advance(&mut self, dt: f64) {
        let a = (-dt / self.time_constant).exp();
        self.value = a * self.value + self.sigma * (1.0 - a * a).sqrt() * self.rng.standard_normal();
    }
}

/// Per-run disturbance state: the gust process and random wave phases.
#[derive(Debug, Clone)]
pub struct DisturbanceModel {
    pub field: DisturbanceField,
    gust: GustProcess,
    wave_phases: (f64, f64),
}

impl DisturbanceModel {
    pub fn new(field: DisturbanceField, seed: u64) -> Self {
        let mut waves = SeededRng::new(seed, streams::WAVES);
        let wave_phases = (2.0 * PI * waves.uniform(), 2.0 * PI * waves.uniform());
        Self {
            gust: GustProcess::new(&field, seed),
            field,
            wave_phases,
        }
    }

    pub fn wind_speed(&self) -> f64 {
        (self.field.mean_wind_speed + self.gust.value()).max(0.0)
    }

    pub fn current_velocity(&self) -> Vector2<f64> {
        self.field.current_velocity()
    }

    /// Wind and wave wrench at time `t`; advances the gust by `dt` afterwards.
    pub fn disturbance_wrench(&mut self, asv: &VehicleState3DOF, t: f64, dt: f64) -> BodyWrench {
        let w = wind_wrench(&self.field, self.wind_speed(), asv) + wave_wrench(&self.field, self.wave_phases, t);
        self.gust.advance(dt);
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerrainClass {
    Sand,
    Rock,
    Mud,
}

impl TerrainClass {
    pub const ALL: [TerrainClass; 3] = [TerrainClass::Sand, TerrainClass::Rock, TerrainClass::Mud];

    pub fn symbol(self) -> char {
        match self {
            TerrainClass::Sand => 's',
            TerrainClass::Rock => 'r',
            TerrainClass::Mud => 'm',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            's' => Some(TerrainClass::Sand),
            'r' => Some(TerrainClass::Rock),
            'm' => Some(TerrainClass::Mud),
            _ => None,
        }
    }

    fn index(self) -> usize {
        match self {
            TerrainClass::Sand => 0,
            TerrainClass::Rock => 1,
            TerrainClass::Mud => 2,
        }
    }
}

impl fmt::Display for TerrainClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerrainClass::Sand => "sand",
            TerrainClass::Rock => "rock",
            TerrainClass::Mud => "mud",
        })
    }
}

impl FromStr for TerrainClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sand" | "s" => Ok(TerrainClass::Sand),
            "rock" | "r" => Ok(TerrainClass::Rock),
            "mud" | "m" => Ok(TerrainClass::Mud),
            other => Err(Error::Parse(format!("unknown terrain class `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainSample {
    pub class: TerrainClass,
    pub depth: f64,
}

/// Regular grid of seabed cells. Cell `(i, j)` spans
/// `[x0 + i c, x0 + (i + 1) c) x [y0 + j c, y0 + (j + 1) c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainMap {
    pub origin: Vector2<f64>,
    pub cell_size: f64,
    pub cols: usize,
    pub rows: usize,
    cells: Vec<TerrainClass>,
    depths: [f64; 3],
}

impl TerrainMap {
    /// `rows_south_to_north[j][i]` is the class of cell `(i, j)`.
    pub fn new(
        origin: Vector2<f64>,
        cell_size: f64,
        rows_south_to_north: Vec<Vec<TerrainClass>>,
        depths: [f64; 3],
    ) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::config("terrain.cell_size", format!("must be > 0, got {cell_size}")));
        }
        let rows = rows_south_to_north.len();
        let cols = rows_south_to_north.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::config("terrain.grid", "must contain at least one cell"));
        }
        if rows_south_to_north.iter().any(|r| r.len() != cols) {
            return Err(Error::config("terrain.grid", "rows must all have the same length"));
        }
        if depths.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::config("terrain.depth", "depths must be > 0"));
        }
        Ok(Self {
            origin,
            cell_size,
            cols,
            rows,
            cells: rows_south_to_north.into_iter().flatten().collect(),
            depths,
        })
    }

    /// Single-class map covering `[x0, x0 + width) x [y0, y0 + height)`.
    pub fn uniform(origin: Vector2<f64>, width: f64, height: f64, class: TerrainClass, depth: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) {
            return Err(Error::config("terrain", "extent must be > 0"));
        }
        Self::new(origin, width.max(height), vec![vec![class]], [depth; 3]).map(|mut m| {
            // one square cell large enough to cover the requested extent
            m.cell_size = width.max(height);
            m
        })
    }

    pub fn width(&self) -> f64 {
        self.cols as f64 * self.cell_size
    }

    pub fn height(&self) -> f64 {
        self.rows as f64 * self.cell_size
    }

    pub fn depth_of(&self, class: TerrainClass) -> f64 {
        self.depths[class.index()]
    }

    pub fn cell(&self, i: usize, j: usize) -> TerrainClass {
        self.cells[j * self.cols + i]
    }

    /// Parses the plain-text map format:
    ///
    /// ```text
    /// # comment
    /// cell_size 5
    /// origin 0 0
    /// depth s 8.0
    /// depth r 6.5
    /// depth m 9.0
    /// grid
    /// ssrr      <- northernmost row
    /// ssmr      <- southernmost row
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut cell_size = None;
        let mut origin = Vector2::zeros();
        let mut depths = [5.0; 3];
        let mut grid: Vec<Vec<TerrainClass>> = Vec::new();
        let mut in_grid = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse(format!("terrain line {}: {msg}", n + 1));
            if in_grid {
                let row = line
                    .chars()
                    .map(|c| TerrainClass::from_symbol(c).ok_or_else(|| bad(&format!("unknown cell `{c}`"))))
                    .collect::<Result<Vec<_>>>()?;
                grid.push(row);
                continue;
            }
            let mut parts = line.split_whitespace();
            let num = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| bad("missing value"))?
                    .parse::<f64>()
                    .map_err(|e| bad(&e.to_string()))
            };
            match parts.next() {
                Some("cell_size") => cell_size = Some(num(parts.next())?),
                Some("origin") => origin = Vector2::new(num(parts.next())?, num(parts.next())?),
                Some("depth") => {
                    let class: TerrainClass = parts.next().ok_or_else(|| bad("missing class"))?.parse()?;
                    depths[class.index()] = num(parts.next())?;
                }
                Some("grid") => in_grid = true,
                Some(other) => return Err(bad(&format!("unknown directive `{other}`"))),
                None => {}
            }
        }
        let cell_size = cell_size.ok_or_else(|| Error::Parse("terrain: missing cell_size".into()))?;
        grid.reverse();
        Self::new(origin, cell_size, grid, depths)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Nearest-cell lookup under the half-open cell convention.
pub fn terrain_at(map: &TerrainMap, position: Vector2<f64>) -> Result<TerrainSample> {
    let rel = (position - map.origin) / map.cell_size;
    let (fi, fj) = (rel.x.floor(), rel.y.floor());
    if !(fi >= 0.0 && fj >= 0.0 && fi < map.cols as f64 && fj < map.rows as f64) {
        return Err(Error::OutOfBounds {
            x: position.x,
            y: position.y,
        });
    }
    let class = map.cell(fi as usize, fj as usize);
    Ok(TerrainSample {
        class,
        depth: map.depth_of(class),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calm_field_gives_zero_wrench() {
        let mut m = DisturbanceModel::new(DisturbanceField::default(), 3);
        let asv = VehicleState3DOF {
            surge: 1.0,
            heading: 0.3,
            ..Default::default()
        };
        for k in 0..100 {
            assert_eq!(m.disturbance_wrench(&asv, k as f64 * 0.01, 0.01), BodyWrench::ZERO);
        }
        assert_eq!(m.current_velocity(), Vector2::zeros());
    }

    #[test]
    fn head_wind_drag() {
        let field = DisturbanceField {
            mean_wind_speed: 8.33,
            wind_direction: PI,
            ..DisturbanceField::default()
        };
        let w = wind_wrench(&field, 8.33, &VehicleState3DOF::default());
        let expect = -0.5 * 1.225 * 0.4 * 8.33 * 8.33;
        assert!((w.surge - expect).abs() < 1e-9);
        assert!((w.surge + 17.0).abs() < 0.05);
        assert!(w.sway.abs() < 1e-9);
    }

    #[test]
    fn gusts_are_reproducible() {
        let field = DisturbanceField::coastal();
        let run = |seed| {
            let mut g = GustProcess::new(&field, seed);
            (0..500)
                .map(|_| {
                    g.advance(0.01);
                    g.value()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn gust_mean_is_stationary() {
        let field = DisturbanceField::coastal();
        let mut m = DisturbanceModel::new(field, 99);
        let dt = 0.1;
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += m.wind_speed();
            m.gust.advance(dt);
        }
        let mean = sum / n as f64;
        assert!((mean - field.mean_wind_speed).abs() < 0.02 * field.mean_wind_speed, "mean {mean}");
    }

    #[test]
    fn waves_are_bounded_and_zero_mean() {
        let field = DisturbanceField {
            wave_height: 0.5,
            ..DisturbanceField::default()
        };
        let mut sum = 0.0;
        let n = 4000;
        for k in 0..n {
            let w = wave_wrench(&field, (0.3, 1.1), k as f64 * 0.01);
            assert!(w.sway.abs() <= 10.0 + 1e-12);
            sum += w.sway;
        }
        assert!((sum / n as f64).abs() < 1e-9);
    }

    #[test]
    fn uniform_map_lookup() {
        let m = TerrainMap::uniform(Vector2::new(-10.0, -10.0), 100.0, 50.0, TerrainClass::Sand, 6.0).unwrap();
        for p in [Vector2::new(0.0, 0.0), Vector2::new(89.9, 39.9), Vector2::new(-10.0, -10.0)] {
            let s = terrain_at(&m, p).unwrap();
            assert_eq!(s.class, TerrainClass::Sand);
            assert_eq!(s.depth, 6.0);
        }
        assert!(matches!(terrain_at(&m, Vector2::new(-10.1, 0.0)), Err(Error::OutOfBounds { .. })));
    }

    #[test]
    fn half_open_cells() {
        let m = TerrainMap::parse("cell_size 1\ngrid\nrs\nsr\n").unwrap();
        // bottom row (south) is "sr"
        assert_eq!(terrain_at(&m, Vector2::new(0.5, 0.5)).unwrap().class, TerrainClass::Sand);
        assert_eq!(terrain_at(&m, Vector2::new(1.0, 0.5)).unwrap().class, TerrainClass::Rock);
        assert_eq!(terrain_at(&m, Vector2::new(1.0, 1.0)).unwrap().class, TerrainClass::Sand);
        assert_eq!(terrain_at(&m, Vector2::new(0.999, 1.0)).unwrap().class, TerrainClass::Rock);
        assert!(terrain_at(&m, Vector2::new(2.0, 0.5)).is_err());
        assert!(terrain_at(&m, Vector2::new(0.5, 2.0)).is_err());
    }

    #[test]
    fn checkerboard_matches_fixture() {
        let n = 8;
        let mut text = String::from("cell_size 2.5\norigin 10 -5\ndepth s 4\ndepth r 3\ndepth m 7\ngrid\n");
        for row in (0..n).rev() {
            for col in 0..n {
                text.push(if (row + col) % 2 == 0 { 's' } else { 'r' });
            }
            text.push('\n');
        }
        let m = TerrainMap::parse(&text).unwrap();
        for j in 0..n {
            for i in 0..n {
                let p = Vector2::new(10.0 + 2.5 * (i as f64 + 0.5), -5.0 + 2.5 * (j as f64 + 0.5));
                let s = terrain_at(&m, p).unwrap();
                let expect = if (i + j) % 2 == 0 { TerrainClass::Sand } else { TerrainClass::Rock };
                assert_eq!(s.class, expect);
                assert_eq!(s.depth, if expect == TerrainClass::Sand { 4.0 } else { 3.0 });
            }
        }
    }

    #[test]
    fn parse_errors() {
        assert!(TerrainMap::parse("grid\nss\n").is_err());
        assert!(TerrainMap::parse("cell_size 1\ngrid\nsx\n").is_err());
        assert!(TerrainMap::parse("cell_size 1\ngrid\nss\ns\n").is_err());
        assert!(TerrainMap::parse("cell_size 1\nbogus 3\ngrid\ns\n").is_err());
    }
}
