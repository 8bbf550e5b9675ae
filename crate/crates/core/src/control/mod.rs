//! Regulators, guidance, simulated sensors and the navigation filter.

pub mod autopilot;
pub mod ekf;
pub mod guidance;
pub mod pid;
pub mod sensors;

pub use autopilot::{ActuatorCommand, Autopilot, AutopilotGains};
pub use ekf::{ekf_predict, ekf_update, reacquire_position, GPS_REACQUIRE_AFTER, EkfUpdate, EstimatorState, ProcessModel};
pub use guidance::{guidance_step, GuidanceCommand, GuidanceMode, GuidanceSetpoint};
pub use pid::{pid_step, PidController, PidGains};
pub use sensors::{sample_sensors, Measurement, SensorReading, SensorRngs, SensorSchedule};
