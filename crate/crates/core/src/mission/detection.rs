//! Geometric stand-in for the imaging detector: one Bernoulli trial per pass.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::{streams, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Weapon,
    Clothing,
    Device,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedObject {
    pub id: String,
    pub position: Vector2<f64>,
    pub class: ObjectClass,
    /// Extra range at which the object shows up beyond the sensor footprint.
    pub detectability_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    Tuv,
    Hexapod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent {
    pub object_id: String,
    pub vehicle: Detector,
    pub timestamp: f64,
    pub estimated_position: Vector2<f64>,
    pub confirmed: bool,
}

/// Pass bookkeeping for a swept footprint sensor.
///
/// An object starts a pass when it enters the footprint and ends it when it
/// leaves. The detection trial is drawn once when the pass starts, so the
/// detection probability does not depend on the step size.
#[derive(Debug, Clone)]
pub struct SweepDetector {
    pub footprint: f64,
    pub probability: f64,
    pub position_sigma: f64,
    in_pass: Vec<bool>,
    detected: Vec<bool>,
    trials: SeededRng,
    noise: SeededRng,
}

impl SweepDetector {
    pub fn new(footprint: f64, probability: f64, position_sigma: f64, objects: usize, seed: u64) -> Result<Self> {
        if !(footprint > 0.0) {
            return Err(Error::InvalidArgument(format!("footprint must be > 0, got {footprint}")));
        }
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::InvalidArgument(format!(
                "detection probability must be in [0, 1], got {probability}"
            )));
        }
        if !(position_sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "position noise must be >= 0, got {position_sigma}"
            )));
        }
        Ok(Self {
            footprint,
            probability,
            position_sigma,
            in_pass: vec![false; objects],
            detected: vec![false; objects],
            trials: SeededRng::new(seed, streams::DETECTION),
            noise: SeededRng::new(seed, streams::DETECTION_NOISE),
        })
    }

    pub fn is_detected(&self, index: usize) -> bool {
        self.detected[index]
    }

    /// Ends every open pass, e.g. when the sensor is switched off.
    pub fn close_passes(&mut self) {
        self.in_pass.iter_mut().for_each(|p| *p = false);
    }
}

/// Sweeps the footprint at `vehicle_pos` over the objects and returns any new
/// detections.
pub fn sensor_sweep_detect(
    detector: &mut SweepDetector,
    vehicle_pos: Vector2<f64>,
    objects: &[PlantedObject],
    vehicle: Detector,
    t: f64,
) -> Vec<DetectionEvent> {
    assert_eq!(objects.len(), detector.in_pass.len(), "detector sized for a different object list");
    let mut events = Vec::new();
    for (k, obj) in objects.iter().enumerate() {
        let inside = (obj.position - vehicle_pos).norm() <= detector.footprint + obj.detectability_radius;
        let entering = inside && !detector.in_pass[k];
        detector.in_pass[k] = inside;
        if !entering || detector.detected[k] {
            continue;
        }
        if detector.trials.bernoulli(detector.probability) {
            detector.detected[k] = true;
            let noise = Vector2::new(
                detector.noise.normal(detector.position_sigma),
                detector.noise.normal(detector.position_sigma),
            );
            events.push(DetectionEvent {
                object_id: obj.id.clone(),
                vehicle,
                timestamp: t,
                estimated_position: obj.position + noise,
                confirmed: false,
            });
        }
    }
    events
}
