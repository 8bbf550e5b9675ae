//! Scenario files: TOML with unit-aware quantities, resolved into validated
//! simulation settings.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use nalgebra::{Vector2, Vector6};
use serde::{Deserialize, Serialize};

use crate::asv::{AsvParams, LinearDamping};
use crate::control::{AutopilotGains, PidGains, SensorSchedule};
use crate::environment::{DisturbanceField, TerrainClass, TerrainMap};
use crate::error::{Error, Result};
use crate::hexapod::{HexapodConfig, TerrainSpeeds};
use crate::mission::{Corner, InspectionConfig, InspectionTrigger, ObjectClass, PlantedObject, Rect, WaterQualityField};
use crate::tuv::{Towline, TuvParams, CABLE_STOCK_LENGTH};
use crate::units::{Angle, Length, Seconds, Speed};
use crate::world::wrap_angle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Full search mission through every stage.
    #[default]
    Mission,
    /// ASV station-keeping at a point.
    Loiter,
    /// ASV holding a fixed heading and speed.
    Cruise,
    /// Hexapod walking a straight line on the seabed.
    Transect,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Mission => "mission",
            RunMode::Loiter => "loiter",
            RunMode::Cruise => "cruise",
            RunMode::Transect => "transect",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub seed: u64,
    pub dt: f64,
    pub duration: f64,
    pub mode: RunMode,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsvSettings {
    pub params: AsvParams,
    pub damping: LinearDamping,
    pub start: Vector2<f64>,
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuvSettings {
    pub enabled: bool,
    pub params: TuvParams,
    pub line: Towline,
    pub winch_rate: f64,
    /// Paid-out length at the start of the run.
    pub initial_length: f64,
    /// Length used while searching.
    pub search_length: f64,
    /// Length the line is hauled in to during retrieval.
    pub stowed_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HexapodSettings {
    pub config: HexapodConfig,
    /// Width of ground imaged by the hexapod while walking, m.
    pub swath: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSettings {
    pub gains: AutopilotGains,
    pub sensors: SensorSchedule,
    /// Continuous process-noise intensity per state, units^2 / s.
    pub process_noise: Vector6<f64>,
    pub initial_sigma: Vector6<f64>,
    pub gate_sigma: f64,
    pub loiter_deadband: f64,
    pub loiter_gain: f64,
    pub lookahead: f64,
    pub arrival_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionSettings {
    pub area: Rect,
    pub swath: f64,
    pub entry: Corner,
    pub p_detect: f64,
    pub position_sigma: f64,
    pub trigger: InspectionTrigger,
    pub cruise_speed: f64,
    /// Each pass is extended this far past the area edge so the towed body
    /// clears the boundary before the turn.
    pub leg_overrun: f64,
    pub base: Vector2<f64>,
    pub inspection: InspectionConfig,
    pub sampling: WaterQualityField,
    pub objects: Vec<PlantedObject>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoiterSettings {
    pub point: Vector2<f64>,
    pub max_speed: f64,
    /// Radius used for the time-on-station metric.
    pub hold_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CruiseSettings {
    pub speed: f64,
    pub heading: f64,
    /// Fraction of the commanded speed counted as on-speed.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransectSettings {
    pub start: Vector2<f64>,
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub run: RunSettings,
    pub disturbances: Option<DisturbanceField>,
    pub terrain: TerrainMap,
    pub water_density: f64,
    pub asv: AsvSettings,
    pub tuv: TuvSettings,
    pub hexapod: HexapodSettings,
    pub control: ControlSettings,
    pub mission: Option<MissionSettings>,
    pub loiter: LoiterSettings,
    pub cruise: CruiseSettings,
    pub transect: TransectSettings,
}

// ---- file schema ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileScenario {
    #[serde(default)]
    name: Option<String>,
    run: FileRun,
    #[serde(default)]
    world: FileWorld,
    #[serde(default)]
    asv: FileAsv,
    #[serde(default)]
    tuv: FileTuv,
    #[serde(default)]
    towline: FileTowline,
    #[serde(default)]
    hexapod: FileHexapod,
    #[serde(default)]
    control: FileControl,
    #[serde(default)]
    mission: Option<FileMission>,
    #[serde(default)]
    loiter: FileLoiter,
    #[serde(default)]
    cruise: FileCruise,
    #[serde(default)]
    transect: FileTransect,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRun {
    seed: u64,
    #[serde(default = "default_dt")]
    dt: Seconds,
    #[serde(default = "default_duration")]
    duration: Seconds,
    #[serde(default)]
    mode: RunMode,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn default_dt() -> Seconds {
    Seconds(0.01)
}

fn default_duration() -> Seconds {
    Seconds(3600.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileWorld {
    water_density: f64,
    terrain_map: Option<PathBuf>,
    terrain: TerrainClass,
    depth: Length,
    disturbances: Option<FileDisturbances>,
}

impl Default for FileWorld {
    fn default() -> Self {
        Self {
            water_density: 1025.0,
            terrain_map: None,
            terrain: TerrainClass::Sand,
            depth: Length(40.0),
            disturbances: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileDisturbances {
    mean_wind_speed: Speed,
    wind_direction: Angle,
    surface_current: Speed,
    current_direction: Angle,
    wave_height: Length,
    wave_period: Seconds,
    gust_time_constant: Seconds,
    gust_intensity: f64,
    air_density: f64,
    windage_area: f64,
    wave_sway_gain: f64,
    wave_yaw_gain: f64,
}

impl Default for FileDisturbances {
    fn default() -> Self {
        let d = DisturbanceField::default();
        Self {
            mean_wind_speed: Speed(d.mean_wind_speed),
            wind_direction: Angle(d.wind_direction),
            surface_current: Speed(d.surface_current),
            current_direction: Angle(d.current_direction),
            wave_height: Length(d.wave_height),
            wave_period: Seconds(d.wave_period),
            gust_time_constant: Seconds(d.gust_time_constant),
            gust_intensity: d.gust_intensity,
            air_density: d.air_density,
            windage_area: d.windage_area,
            wave_sway_gain: d.wave_sway_gain,
            wave_yaw_gain: d.wave_yaw_gain,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileAsv {
    m11: f64,
    m22: f64,
    m33: f64,
    thruster_half_spacing: f64,
    max_thrust_per_motor: f64,
    damping: FileDamping,
    start: [f64; 2],
    heading: Angle,
}

impl Default for FileAsv {
    fn default() -> Self {
        let p = AsvParams::default();
        Self {
            m11: p.m11,
            m22: p.m22,
            m33: p.m33,
            thruster_half_spacing: p.thruster_half_spacing,
            max_thrust_per_motor: p.max_thrust_per_motor,
            damping: FileDamping::default(),
            start: [0.0, 0.0],
            heading: Angle(0.0),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileDamping {
    surge: f64,
    sway: f64,
    yaw: f64,
}

impl Default for FileDamping {
    fn default() -> Self {
        let d = LinearDamping::scenario_default();
        Self {
            surge: d.surge,
            sway: d.sway,
            yaw: d.yaw,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileTuv {
    enabled: Option<bool>,
    mass: f64,
    added_mass: f64,
    foil_area: f64,
    lift_coefficient: f64,
    drag_coefficient: f64,
    bluff_drag_area: f64,
    buoyancy_ratio: f64,
    depressor: bool,
}

impl Default for FileTuv {
    fn default() -> Self {
        let p = TuvParams::default();
        Self {
            enabled: None,
            mass: p.mass,
            added_mass: p.added_mass,
            foil_area: p.foil_area,
            lift_coefficient: p.lift_coefficient,
            drag_coefficient: p.drag_coefficient,
            bluff_drag_area: p.bluff_drag_area,
            buoyancy_ratio: p.buoyancy_ratio,
            depressor: p.depressor,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileTowline {
    length: Length,
    initial_length: Length,
    stowed_length: Length,
    stiffness: f64,
    damping: f64,
    asv_attach_offset: Length,
    tuv_attach_offset: Length,
    winch_rate: Speed,
}

impl Default for FileTowline {
    fn default() -> Self {
        let l = Towline::default();
        Self {
            length: Length(CABLE_STOCK_LENGTH),
            initial_length: Length(5.0),
            stowed_length: Length(2.0),
            stiffness: l.stiffness,
            damping: l.damping,
            asv_attach_offset: Length(l.asv_attach_offset),
            tuv_attach_offset: Length(l.tuv_attach_offset),
            winch_rate: Speed(0.5),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileHexapod {
    upper: Length,
    lower: Length,
    stride: Length,
    duty_factor: f64,
    lift_height: Length,
    max_turn_rate: f64,
    swath: Length,
    speeds: FileSpeeds,
}

impl Default for FileHexapod {
    fn default() -> Self {
        let c = HexapodConfig::default();
        Self {
            upper: Length(c.legs[0].upper),
            lower: Length(c.legs[0].lower),
            stride: Length(c.stride),
            duty_factor: c.duty_factor,
            lift_height: Length(c.lift_height),
            max_turn_rate: c.max_turn_rate,
            swath: Length(1.0),
            speeds: FileSpeeds::default(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileSpeeds {
    sand: Speed,
    rock: Speed,
    mud: Speed,
}

impl Default for FileSpeeds {
    fn default() -> Self {
        let s = TerrainSpeeds::default();
        Self {
            sand: Speed(s.sand),
            rock: Speed(s.rock),
            mud: Speed(s.mud),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileControl {
    heading: PidGains,
    speed: PidGains,
    sensors: FileSensors,
    process_noise: [f64; 6],
    initial_sigma: [f64; 6],
    gate_sigma: f64,
    loiter_deadband: Length,
    loiter_gain: f64,
    lookahead: Length,
    arrival_radius: Length,
}

impl Default for FileControl {
    fn default() -> Self {
        let g = AutopilotGains::default();
        Self {
            heading: g.heading,
            speed: g.speed,
            sensors: FileSensors::default(),
            process_noise: [1e-4, 1e-4, 1e-5, 1.0, 1.0, 0.1],
            initial_sigma: [2.0, 2.0, 0.1, 0.2, 0.2, 0.05],
            gate_sigma: crate::control::ekf::DEFAULT_GATE_SIGMA,
            loiter_deadband: Length(1.0),
            loiter_gain: 0.5,
            lookahead: Length(5.0),
            arrival_radius: Length(3.0),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileSensors {
    gps_rate: f64,
    gps_sigma: Length,
    compass_rate: f64,
    compass_sigma: Angle,
    gyro_rate: f64,
    gyro_sigma: f64,
}

impl Default for FileSensors {
    fn default() -> Self {
        let s = SensorSchedule::default();
        Self {
            gps_rate: s.gps_rate,
            gps_sigma: Length(s.gps_sigma),
            compass_rate: s.compass_rate,
            compass_sigma: Angle(s.compass_sigma),
            gyro_rate: s.gyro_rate,
            gyro_sigma: s.gyro_sigma,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileArea {
    min: [f64; 2],
    max: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileMission {
    area: FileArea,
    swath: Length,
    #[serde(default)]
    entry: Corner,
    #[serde(default = "one")]
    p_detect: f64,
    #[serde(default = "one_metre")]
    position_sigma: Length,
    #[serde(default)]
    trigger: InspectionTrigger,
    #[serde(default = "mission_speed")]
    cruise_speed: Speed,
    #[serde(default = "overrun")]
    leg_overrun: Length,
    #[serde(default)]
    base: Option<[f64; 2]>,
    #[serde(default)]
    inspection: InspectionConfig,
    #[serde(default)]
    sampling: WaterQualityField,
    #[serde(default)]
    objects: Vec<FileObject>,
}

fn one() -> f64 {
    1.0
}

fn one_metre() -> Length {
    Length(1.0)
}

fn mission_speed() -> Speed {
    Speed(1.5)
}

fn overrun() -> Length {
    Length(30.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileObject {
    id: String,
    position: [f64; 2],
    #[serde(default = "other_class")]
    class: ObjectClass,
    #[serde(default)]
    detectability_radius: Length,
}

fn other_class() -> ObjectClass {
    ObjectClass::Other
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileLoiter {
    point: Option<[f64; 2]>,
    max_speed: Speed,
    hold_radius: Length,
}

impl Default for FileLoiter {
    fn default() -> Self {
        Self {
            point: None,
            max_speed: Speed(1.0),
            hold_radius: Length(2.5),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileCruise {
    speed: Speed,
    heading: Angle,
    tolerance: f64,
}

impl Default for FileCruise {
    fn default() -> Self {
        Self {
            speed: Speed(2.0),
            heading: Angle(0.0),
            tolerance: 0.05,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileTransect {
    start: Option<[f64; 2]>,
    heading: Angle,
}

fn v2(a: [f64; 2]) -> Vector2<f64> {
    Vector2::new(a[0], a[1])
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be >= 0, got {v}")))
    }
}

/// Reads and validates a scenario file. Relative paths inside it resolve
/// against the file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut s = parse_scenario(&text, base)?;
    if s.name.is_empty() {
        s.name = path
            .file_stem()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(s)
}

/// Parses scenario text; `base_dir` anchors relative file references.
pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario> {
    let file: FileScenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    resolve(file, base_dir)
}

fn resolve(f: FileScenario, base_dir: &Path) -> Result<Scenario> {
    let run = RunSettings {
        seed: f.run.seed,
        dt: positive("run.dt", f.run.dt.si())?,
        duration: non_negative("run.duration", f.run.duration.si())?,
        mode: f.run.mode,
        output_dir: f.run.output_dir,
    };

    let water_density = positive("world.water_density", f.world.water_density)?;
    let terrain = match &f.world.terrain_map {
        Some(p) => {
            let full = base_dir.join(p);
            TerrainMap::load(&full).map_err(|e| Error::config("world.terrain_map", e.to_string()))?
        }
        None => {
            let depth = positive("world.depth", f.world.depth.si())?;
            TerrainMap::uniform(Vector2::new(-5000.0, -5000.0), 10_000.0, 10_000.0, f.world.terrain, depth)?
        }
    };
    let disturbances = f
        .world
        .disturbances
        .map(|d| {
            let field = DisturbanceField {
                mean_wind_speed: d.mean_wind_speed.si(),
                wind_direction: wrap_angle(d.wind_direction.si()),
                surface_current: d.surface_current.si(),
                current_direction: wrap_angle(d.current_direction.si()),
                wave_height: d.wave_height.si(),
                wave_period: d.wave_period.si(),
                gust_time_constant: d.gust_time_constant.si(),
                gust_intensity: d.gust_intensity,
                air_density: d.air_density,
                windage_area: d.windage_area,
                wave_sway_gain: d.wave_sway_gain,
                wave_yaw_gain: d.wave_yaw_gain,
            };
            field.validate().map(|_| field)
        })
        .transpose()?;

    let params = AsvParams {
        m11: f.asv.m11,
        m22: f.asv.m22,
        m33: f.asv.m33,
        thruster_half_spacing: f.asv.thruster_half_spacing,
        max_thrust_per_motor: f.asv.max_thrust_per_motor,
    };
    params.validate()?;
    let damping = LinearDamping {
        surge: non_negative("asv.damping.surge", f.asv.damping.surge)?,
        sway: non_negative("asv.damping.sway", f.asv.damping.sway)?,
        yaw: non_negative("asv.damping.yaw", f.asv.damping.yaw)?,
    };
    let asv = AsvSettings {
        params,
        damping,
        start: v2(f.asv.start),
        heading: wrap_angle(f.asv.heading.si()),
    };

    let tuv_params = TuvParams {
        mass: f.tuv.mass,
        added_mass: f.tuv.added_mass,
        foil_area: f.tuv.foil_area,
        lift_coefficient: f.tuv.lift_coefficient,
        drag_coefficient: f.tuv.drag_coefficient,
        water_density,
        bluff_drag_area: f.tuv.bluff_drag_area,
        buoyancy_ratio: f.tuv.buoyancy_ratio,
        depressor: f.tuv.depressor,
    };
    tuv_params.validate()?;
    let t = &f.towline;
    let search_length = positive("towline.length", t.length.si())?;
    if search_length > CABLE_STOCK_LENGTH {
        return Err(Error::config(
            "towline.length",
            format!("must not exceed the {CABLE_STOCK_LENGTH} m cable stock, got {search_length}"),
        ));
    }
    let initial_length = positive("towline.initial_length", t.initial_length.si())?.min(search_length);
    let stowed_length = positive("towline.stowed_length", t.stowed_length.si())?;
    let line = Towline {
        unstretched_length: initial_length,
        stiffness: t.stiffness,
        damping: t.damping,
        asv_attach_offset: t.asv_attach_offset.si(),
        tuv_attach_offset: t.tuv_attach_offset.si(),
    };
    line.validate()?;
    let tuv = TuvSettings {
        enabled: f.tuv.enabled.unwrap_or(run.mode == RunMode::Mission),
        params: tuv_params,
        line,
        winch_rate: positive("towline.winch_rate", t.winch_rate.si())?,
        initial_length,
        search_length,
        stowed_length,
    };

    let h = &f.hexapod;
    let mut hcfg = HexapodConfig::with_segments(h.upper.si(), h.lower.si())
        .map_err(|e| Error::config("hexapod.upper", e.to_string()))?;
    hcfg.stride = h.stride.si();
    hcfg.duty_factor = h.duty_factor;
    hcfg.lift_height = h.lift_height.si();
    hcfg.max_turn_rate = h.max_turn_rate;
    hcfg.speeds = TerrainSpeeds {
        sand: h.speeds.sand.si(),
        rock: h.speeds.rock.si(),
        mud: h.speeds.mud.si(),
    };
    hcfg.validate()?;
    let hexapod = HexapodSettings {
        config: hcfg,
        swath: positive("hexapod.swath", h.swath.si())?,
    };

    let c = &f.control;
    let sensors = SensorSchedule {
        gps_rate: c.sensors.gps_rate,
        gps_sigma: c.sensors.gps_sigma.si(),
        compass_rate: c.sensors.compass_rate,
        compass_sigma: c.sensors.compass_sigma.si(),
        gyro_rate: c.sensors.gyro_rate,
        gyro_sigma: c.sensors.gyro_sigma,
    };
    if run.mode != RunMode::Transect {
        sensors.validate(run.dt)?;
    }
    for (i, q) in c.process_noise.iter().enumerate() {
        positive(&format!("control.process_noise[{i}]"), *q)?;
    }
    for (i, s) in c.initial_sigma.iter().enumerate() {
        positive(&format!("control.initial_sigma[{i}]"), *s)?;
    }
    let control = ControlSettings {
        gains: AutopilotGains {
            heading: c.heading,
            speed: c.speed,
        },
        sensors,
        process_noise: Vector6::from_column_slice(&c.process_noise),
        initial_sigma: Vector6::from_column_slice(&c.initial_sigma),
        gate_sigma: positive("control.gate_sigma", c.gate_sigma)?,
        loiter_deadband: non_negative("control.loiter_deadband", c.loiter_deadband.si())?,
        loiter_gain: positive("control.loiter_gain", c.loiter_gain)?,
        lookahead: positive("control.lookahead", c.lookahead.si())?,
        arrival_radius: positive("control.arrival_radius", c.arrival_radius.si())?,
    };

    let mission = f.mission.map(|m| resolve_mission(m, &asv)).transpose()?;
    if run.mode == RunMode::Mission && mission.is_none() {
        return Err(Error::config("mission", "required when run.mode = \"mission\""));
    }

    let loiter = LoiterSettings {
        point: f.loiter.point.map(v2).unwrap_or(asv.start),
        max_speed: positive("loiter.max_speed", f.loiter.max_speed.si())?,
        hold_radius: positive("loiter.hold_radius", f.loiter.hold_radius.si())?,
    };
    let cruise = CruiseSettings {
        speed: positive("cruise.speed", f.cruise.speed.si())?,
        heading: wrap_angle(f.cruise.heading.si()),
        tolerance: positive("cruise.tolerance", f.cruise.tolerance)?,
    };
    let transect = TransectSettings {
        start: f.transect.start.map(v2).unwrap_or(asv.start),
        heading: wrap_angle(f.transect.heading.si()),
    };

    Ok(Scenario {
        name: f.name.unwrap_or_default(),
        run,
        disturbances,
        terrain,
        water_density,
        asv,
        tuv,
        hexapod,
        control,
        mission,
        loiter,
        cruise,
        transect,
    })
}

fn resolve_mission(m: FileMission, asv: &AsvSettings) -> Result<MissionSettings> {
    let area = Rect::new(v2(m.area.min), v2(m.area.max)).map_err(|e| Error::config("mission.area", e.to_string()))?;
    let swath = positive("mission.swath", m.swath.si())?;
    if !(0.0..=1.0).contains(&m.p_detect) {
        return Err(Error::config("mission.p_detect", format!("must be in [0, 1], got {}", m.p_detect)));
    }
    m.inspection.validate()?;
    if m.inspection.tuv_standoff > CABLE_STOCK_LENGTH {
        return Err(Error::config(
            "mission.inspection.tuv_standoff",
            format!("must not exceed {CABLE_STOCK_LENGTH} m"),
        ));
    }
    positive("mission.sampling.interval", m.sampling.interval)?;
    let mut seen = HashSet::new();
    let mut objects = Vec::with_capacity(m.objects.len());
    for o in m.objects {
        if !seen.insert(o.id.clone()) {
            return Err(Error::config(format!("mission.objects.{}", o.id), "duplicate object id"));
        }
        let position = v2(o.position);
        if !area.contains(position) {
            return Err(Error::config(
                format!("mission.objects.{}", o.id),
                format!("position ({}, {}) lies outside mission.area", position.x, position.y),
            ));
        }
        objects.push(PlantedObject {
            id: o.id,
            position,
            class: o.class,
            detectability_radius: non_negative("mission.objects.detectability_radius", o.detectability_radius.si())?,
        });
    }
    Ok(MissionSettings {
        area,
        swath,
        entry: m.entry,
        p_detect: m.p_detect,
        position_sigma: non_negative("mission.position_sigma", m.position_sigma.si())?,
        trigger: m.trigger,
        cruise_speed: positive("mission.cruise_speed", m.cruise_speed.si())?,
        leg_overrun: non_negative("mission.leg_overrun", m.leg_overrun.si())?,
        base: m.base.map(v2).unwrap_or(asv.start),
        inspection: m.inspection,
        sampling: m.sampling,
        objects,
    })
}
