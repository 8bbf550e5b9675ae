//! Run log: per-step state records, the event stream and end-of-run metrics,
//! plus their on-disk form.
//!
//! A run directory holds `run.json` (metadata), `metrics.json`, and
//! optionally `states.csv` and `events.jsonl`.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::environment::TerrainClass;
use crate::error::{Error, Result};
use crate::hexapod::LegConfiguration;
use crate::mission::{CoverageMetrics, Detector, EnvironmentalSample, PhaseKind};
use crate::scenario::RunMode;

pub const STATES_FILE: &str = "states.csv";
pub const EVENTS_FILE: &str = "events.jsonl";
pub const METRICS_FILE: &str = "metrics.json";
pub const META_FILE: &str = "run.json";

/// Towline channels, present while a towed body is in the water.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TowRecord {
    pub tension: f64,
    /// Cable load on the hull, body frame.
    pub surge: f64,
    pub sway: f64,
    pub yaw: f64,
    pub line_length: f64,
    pub tuv_x: f64,
    pub tuv_y: f64,
    pub tuv_z: f64,
    pub tuv_vx: f64,
    pub tuv_vy: f64,
    pub tuv_vz: f64,
}

/// Hexapod channels, present while it is on the seabed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexapodRecord {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub gait_phase: f64,
    pub terrain: TerrainClass,
    pub legs: [LegConfiguration; 6],
}

/// One row of `states.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub t: f64,
    /// Mission stage; empty outside mission runs.
    pub phase: Option<PhaseKind>,
    /// True hull state `(x, y, heading, surge, sway, yaw_rate)`.
    pub asv: [f64; 6],
    /// Filter mean in the same order.
    pub estimate: [f64; 6],
    /// Root of the trace of the filter's position covariance, m.
    pub position_sigma: f64,
    pub heading_error: f64,
    pub speed_cmd: f64,
    pub surge_cmd: f64,
    pub yaw_cmd: f64,
    pub thrust_left: f64,
    pub thrust_right: f64,
    /// Wind and wave load, body frame.
    pub disturbance: [f64; 3],
    pub wind_speed: f64,
    pub tow: Option<TowRecord>,
    pub hexapod: Option<HexapodRecord>,
}

const STATE_AXES: [&str; 6] = ["x", "y", "heading", "surge", "sway", "yaw_rate"];
const TOW_COLUMNS: [&str; 11] = [
    "tow_tension",
    "tow_surge",
    "tow_sway",
    "tow_yaw",
    "line_length",
    "tuv_x",
    "tuv_y",
    "tuv_z",
    "tuv_vx",
    "tuv_vy",
    "tuv_vz",
];
const JOINTS: [&str; 3] = ["coxa", "knee", "femur"];

/// Column names of `states.csv`, in order.
pub fn state_columns() -> Vec<String> {
    let mut cols = vec!["t".to_string(), "phase".to_string()];
    cols.extend(STATE_AXES.iter().map(|a| format!("asv_{a}")));
    cols.extend(STATE_AXES.iter().map(|a| format!("est_{a}")));
    for c in [
        "est_position_sigma",
        "heading_error",
        "speed_cmd",
        "surge_cmd",
        "yaw_cmd",
        "thrust_left",
        "thrust_right",
        "dist_surge",
        "dist_sway",
        "dist_yaw",
        "wind_speed",
    ] {
        cols.push(c.to_string());
    }
    cols.extend(TOW_COLUMNS.iter().map(|c| c.to_string()));
    for c in ["hex_x", "hex_y", "hex_heading", "hex_gait_phase", "hex_terrain"] {
        cols.push(c.to_string());
    }
    for leg in 1..=6 {
        cols.extend(JOINTS.iter().map(|j| format!("leg{leg}_{j}")));
    }
    cols
}

// `{}` on f64 prints the shortest string that parses back to the same value.
fn num(v: f64) -> String {
    format!("{v}")
}

impl StateRecord {
    pub fn to_fields(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(72);
        out.push(num(self.t));
        out.push(self.phase.map(|p| p.as_str().to_string()).unwrap_or_default());
        out.extend(self.asv.iter().map(|v| num(*v)));
        out.extend(self.estimate.iter().map(|v| num(*v)));
        for v in [
            self.position_sigma,
            self.heading_error,
            self.speed_cmd,
            self.surge_cmd,
            self.yaw_cmd,
            self.thrust_left,
            self.thrust_right,
            self.disturbance[0],
            self.disturbance[1],
            self.disturbance[2],
            self.wind_speed,
        ] {
            out.push(num(v));
        }
        match &self.tow {
            Some(w) => out.extend(
                [
                    w.tension,
                    w.surge,
                    w.sway,
                    w.yaw,
                    w.line_length,
                    w.tuv_x,
                    w.tuv_y,
                    w.tuv_z,
                    w.tuv_vx,
                    w.tuv_vy,
                    w.tuv_vz,
                ]
                .map(num),
            ),
            None => out.extend(std::iter::repeat_n(String::new(), TOW_COLUMNS.len())),
        }
        match &self.hexapod {
            Some(h) => {
                out.extend([h.x, h.y, h.heading, h.gait_phase].map(num));
                out.push(h.terrain.to_string());
                for leg in &h.legs {
                    out.extend([leg.coxa, leg.knee, leg.femur].map(num));
                }
            }
            None => out.extend(std::iter::repeat_n(String::new(), 5 + 18)),
        }
        out
    }

    pub fn from_fields(fields: &[&str]) -> Result<Self> {
        let expected = state_columns().len();
        if fields.len() != expected {
            return Err(Error::Parse(format!("state row has {} fields, expected {expected}", fields.len())));
        }
        let mut it = fields.iter().copied();
        let mut next = || it.next().unwrap_or_default();
        let float = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        let t = float(next())?;
        let phase_s = next();
        let phase = match phase_s {
            "" => None,
            p => Some(PhaseKind::parse(p).ok_or_else(|| Error::Parse(format!("unknown phase `{p}`")))?),
        };
        let mut asv = [0.0; 6];
        for v in asv.iter_mut() {
            *v = float(next())?;
        }
        let mut estimate = [0.0; 6];
        for v in estimate.iter_mut() {
            *v = float(next())?;
        }
        let mut mid = [0.0; 11];
        for v in mid.iter_mut() {
            *v = float(next())?;
        }
        let tow_raw: Vec<&str> = (0..TOW_COLUMNS.len()).map(|_| next()).collect();
        let tow = if tow_raw.iter().all(|s| s.is_empty()) {
            None
        } else {
            let v = tow_raw.iter().map(|s| float(s)).collect::<Result<Vec<_>>>()?;
            Some(TowRecord {
                tension: v[0],
                surge: v[1],
                sway: v[2],
                yaw: v[3],
                line_length: v[4],
                tuv_x: v[5],
                tuv_y: v[6],
                tuv_z: v[7],
                tuv_vx: v[8],
                tuv_vy: v[9],
                tuv_vz: v[10],
            })
        };
        let hex_raw: Vec<&str> = (0..23).map(|_| next()).collect();
        let hexapod = if hex_raw.iter().all(|s| s.is_empty()) {
            None
        } else {
            let terrain: TerrainClass = hex_raw[4].parse()?;
            let mut legs = [LegConfiguration::default(); 6];
            for (k, leg) in legs.iter_mut().enumerate() {
                let b = 5 + 3 * k;
                *leg = LegConfiguration::new(float(hex_raw[b])?, float(hex_raw[b + 1])?, float(hex_raw[b + 2])?);
            }
            Some(HexapodRecord {
                x: float(hex_raw[0])?,
                y: float(hex_raw[1])?,
                heading: float(hex_raw[2])?,
                gait_phase: float(hex_raw[3])?,
                terrain,
                legs,
            })
        };
        Ok(StateRecord {
            t,
            phase,
            asv,
            estimate,
            position_sigma: mid[0],
            heading_error: mid[1],
            speed_cmd: mid[2],
            surge_cmd: mid[3],
            yaw_cmd: mid[4],
            thrust_left: mid[5],
            thrust_right: mid[6],
            disturbance: [mid[7], mid[8], mid[9]],
            wind_speed: mid[10],
            tow,
            hexapod,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    PhaseChange {
        t: f64,
        from: PhaseKind,
        to: PhaseKind,
    },
    Detection {
        t: f64,
        object_id: String,
        vehicle: Detector,
        estimated_position: Vector2<f64>,
    },
    InspectionStarted {
        t: f64,
        object_id: String,
        target: Vector2<f64>,
        loiter_point: Vector2<f64>,
        reposition: bool,
    },
    HexapodDeployed {
        t: f64,
        position: Vector2<f64>,
    },
    Confirmation {
        t: f64,
        object_id: String,
        /// Walk time from touchdown to confirmation, s.
        elapsed: f64,
    },
    Marker {
        t: f64,
        object_id: String,
        position: Vector2<f64>,
    },
    InspectionAborted {
        t: f64,
        object_id: String,
        reason: String,
    },
    HexapodRecovered {
        t: f64,
    },
    Sample(EnvironmentalSample),
    Truncated {
        t: f64,
    },
    Aborted {
        t: f64,
        reason: String,
        last_good: Option<Box<StateRecord>>,
    },
}

impl Event {
    pub fn time(&self) -> f64 {
        match self {
            Event::PhaseChange { t, .. }
            | Event::Detection { t, .. }
            | Event::InspectionStarted { t, .. }
            | Event::HexapodDeployed { t, .. }
            | Event::Confirmation { t, .. }
            | Event::Marker { t, .. }
            | Event::InspectionAborted { t, .. }
            | Event::HexapodRecovered { t }
            | Event::Truncated { t }
            | Event::Aborted { t, .. } => *t,
            Event::Sample(s) => s.timestamp,
        }
    }
}

/// Loiter-mode station-keeping statistics against the true position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationMetrics {
    pub hold_radius: f64,
    pub fraction_within: f64,
    pub max_error: f64,
    pub rms_error: f64,
}

/// Cruise-mode speed statistics against the true surge speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CruiseMetrics {
    pub commanded: f64,
    /// First time the surge speed reached the command, if it did.
    pub time_to_speed: Option<f64>,
    /// Mean surge over the final stretch of the run.
    pub steady_state_speed: f64,
    pub steady_state_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EstimatorMetrics {
    pub rms_position_error: f64,
    pub max_position_error: f64,
    pub rejected_measurements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub steps: u64,
    pub sim_time: f64,
    pub final_phase: Option<PhaseKind>,
    pub phases_visited: Vec<PhaseKind>,
    pub truncated: bool,
    pub aborted: bool,
    pub detections: usize,
    pub confirmations: usize,
    pub inspections_aborted: usize,
    pub samples: usize,
    pub coverage: Option<CoverageMetrics>,
    pub station: Option<StationMetrics>,
    pub cruise: Option<CruiseMetrics>,
    pub estimator: Option<EstimatorMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub name: String,
    pub seed: u64,
    pub dt: f64,
    pub duration: f64,
    pub mode: RunMode,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub meta: RunMeta,
    pub states: Vec<StateRecord>,
    pub events: Vec<Event>,
    pub metrics: Metrics,
}

impl RunLog {
    pub fn is_aborted(&self) -> bool {
        self.metrics.aborted
    }
}

/// Which optional files [`emit_outputs`] writes. Metadata and metrics are
/// always written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputFormats {
    pub csv: bool,
    pub json: bool,
}

impl Default for OutputFormats {
    fn default() -> Self {
        Self { csv: true, json: true }
    }
}

impl std::str::FromStr for OutputFormats {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut f = OutputFormats { csv: false, json: false };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "csv" => f.csv = true,
                "json" => f.json = true,
                other => return Err(Error::Parse(format!("unknown output format `{other}`"))),
            }
        }
        if !f.csv && !f.json {
            return Err(Error::Parse("no output format given".into()));
        }
        Ok(f)
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(path, e))?;
    w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes the log into `dir`, creating it if needed. Returns the paths written.
pub fn emit_outputs(log: &RunLog, dir: &Path, formats: OutputFormats) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();

    let meta = dir.join(META_FILE);
    write_json(&meta, &log.meta)?;
    written.push(meta);
    let metrics = dir.join(METRICS_FILE);
    write_json(&metrics, &log.metrics)?;
    written.push(metrics);

    if formats.csv {
        let path = dir.join(STATES_FILE);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        w.write_record(state_columns()).map_err(|e| io_err(&path, e))?;
        for rec in &log.states {
            w.write_record(rec.to_fields()).map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    if formats.json {
        let path = dir.join(EVENTS_FILE);
        let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut w = BufWriter::new(file);
        for ev in &log.events {
            serde_json::to_writer(&mut w, ev).map_err(|e| io_err(&path, e))?;
            w.write_all(b"\n").map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads a run directory back. Missing `states.csv` or `events.jsonl` read
/// as empty.
pub fn read_run_dir(dir: &Path) -> Result<RunLog> {
    let meta: RunMeta = read_json(&dir.join(META_FILE))?;
    let metrics: Metrics = read_json(&dir.join(METRICS_FILE))?;

    let mut states = Vec::new();
    let states_path = dir.join(STATES_FILE);
    if states_path.exists() {
        let mut r = csv::Reader::from_path(&states_path).map_err(|e| io_err(&states_path, e))?;
        let header: Vec<String> = r
            .headers()
            .map_err(|e| io_err(&states_path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        if header != state_columns() {
            return Err(Error::Parse(format!("{}: unexpected column layout", states_path.display())));
        }
        for row in r.records() {
            let row = row.map_err(|e| io_err(&states_path, e))?;
            let fields: Vec<&str> = row.iter().collect();
            states.push(StateRecord::from_fields(&fields)?);
        }
    }

    let mut events = Vec::new();
    let events_path = dir.join(EVENTS_FILE);
    if events_path.exists() {
        let file = fs::File::open(&events_path).map_err(|e| io_err(&events_path, e))?;
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io_err(&events_path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let ev = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", events_path.display(), n + 1)))?;
            events.push(ev);
        }
    }

    Ok(RunLog {
        meta,
        states,
        events,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64, with_extras: bool) -> StateRecord {
        StateRecord {
            t,
            phase: with_extras.then_some(PhaseKind::WideAreaSearch),
            asv: [1.0, 2.0, 0.1 + t, 1.5, -0.01, 1e-17],
            estimate: [1.1, 2.2, 0.3, 1.4, 0.0, -3.0e-5],
            position_sigma: 0.123456789012345,
            heading_error: -0.5,
            speed_cmd: 1.5,
            surge_cmd: 40.0,
            yaw_cmd: -2.5,
            thrust_left: 21.25,
            thrust_right: 18.75,
            disturbance: [0.1, 0.2, 0.3],
            wind_speed: 5.555555555555555,
            tow: with_extras.then_some(TowRecord {
                tension: 12.0,
                surge: -11.0,
                sway: 0.5,
                yaw: -0.4,
                line_length: 30.0,
                tuv_x: -25.0,
                tuv_y: 2.0,
                tuv_z: 9.5,
                tuv_vx: 1.5,
                tuv_vy: 0.0,
                tuv_vz: 0.01,
            }),
            hexapod: with_extras.then(|| HexapodRecord {
                x: 3.0,
                y: 4.0,
                heading: 0.7,
                gait_phase: 0.25,
                terrain: TerrainClass::Rock,
                legs: [LegConfiguration::new(0.1, 1.2, -0.3); 6],
            }),
        }
    }

    fn log() -> RunLog {
        RunLog {
            meta: RunMeta {
                name: "t".into(),
                seed: 7,
                dt: 0.01,
                duration: 1.0,
                mode: RunMode::Mission,
                version: "0".into(),
            },
            states: vec![record(0.01, false), record(0.02, true), record(1.0 / 3.0, true)],
            events: vec![
                Event::PhaseChange {
                    t: 0.02,
                    from: PhaseKind::PreMission,
                    to: PhaseKind::WideAreaSearch,
                },
                Event::Detection {
                    t: 0.02,
                    object_id: "a".into(),
                    vehicle: Detector::Tuv,
                    estimated_position: Vector2::new(0.1, 0.2),
                },
                Event::Aborted {
                    t: 0.03,
                    reason: "x".into(),
                    last_good: Some(Box::new(record(0.02, true))),
                },
            ],
            metrics: Metrics {
                steps: 3,
                sim_time: 0.03,
                final_phase: Some(PhaseKind::WideAreaSearch),
                phases_visited: vec![PhaseKind::PreMission, PhaseKind::WideAreaSearch],
                truncated: false,
                aborted: true,
                detections: 1,
                confirmations: 0,
                inspections_aborted: 0,
                samples: 0,
                coverage: Some(CoverageMetrics {
                    area_searched: 360.0,
                    area_per_hour: 360.0,
                    active_time: 3600.0,
                    detections: 0,
                    confirmations: 0,
                    distance_traveled: 360.0,
                }),
                station: None,
                cruise: None,
                estimator: Some(EstimatorMetrics::default()),
            },
        }
    }

    #[test]
    fn columns_match_row_width() {
        assert_eq!(state_columns().len(), record(0.0, true).to_fields().len());
        assert_eq!(state_columns().len(), record(0.0, false).to_fields().len());
    }

    #[test]
    fn row_round_trip_is_exact() {
        for r in [record(0.1, false), record(0.1 + 0.2, true)] {
            let fields = r.to_fields();
            let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
            assert_eq!(StateRecord::from_fields(&refs).unwrap(), r);
        }
    }

    #[test]
    fn directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let l = log();
        emit_outputs(&l, dir.path(), OutputFormats::default()).unwrap();
        assert_eq!(read_run_dir(dir.path()).unwrap(), l);
    }

    #[test]
    fn csv_has_header_plus_one_row_per_record() {
        let dir = tempfile::tempdir().unwrap();
        emit_outputs(&log(), dir.path(), OutputFormats { csv: true, json: false }).unwrap();
        let text = fs::read_to_string(dir.path().join(STATES_FILE)).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(!dir.path().join(EVENTS_FILE).exists());
    }

    #[test]
    fn events_are_tagged() {
        let s = serde_json::to_string(&log().events[0]).unwrap();
        assert!(s.starts_with("{\"type\":\"phase_change\""), "{s}");
    }

    #[test]
    fn format_list_parses() {
        assert_eq!("csv".parse::<OutputFormats>().unwrap(), OutputFormats { csv: true, json: false });
        assert_eq!("json, csv".parse::<OutputFormats>().unwrap(), OutputFormats::default());
        assert!("xml".parse::<OutputFormats>().is_err());
        assert!("".parse::<OutputFormats>().is_err());
    }

    #[test]
    fn unwritable_directory_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_outputs(&log(), &blocker.join("sub"), OutputFormats::default()).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
