//! Mission orchestration: patterns, detection, stages, inspection and
//! coverage.

pub mod coverage;
pub mod detection;
pub mod inspection;
pub mod pattern;
pub mod phase;
pub mod sampling;

pub use coverage::{coverage_report, swept_area, CoverageMetrics, SweptArea, TrackPoint};
pub use detection::{sensor_sweep_detect, DetectionEvent, Detector, ObjectClass, PlantedObject, SweepDetector};
pub use inspection::{inspect_target, needs_reposition, InspectionConfig, InspectionOutcome};
pub use pattern::{generate_lawnmower, Corner, Leg, Rect, SearchPattern};
pub use phase::{
    is_legal_transition, mission_step, pop_nearest, InspectionTrigger, MissionPhase, PhaseKind, WorldEvents,
};
pub use sampling::{EnvironmentSampler, EnvironmentalSample, WaterQualityField};
