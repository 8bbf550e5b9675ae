//! Synthetic water-quality samples logged throughout the mission.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::world::{streams, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentalSample {
    pub timestamp: f64,
    pub position: Vector2<f64>,
    pub depth: f64,
    pub temperature: f64,
    pub turbidity: f64,
    pub salinity: f64,
}

/// Smooth linear fields plus sensor noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaterQualityField {
    pub interval: f64,
    pub temperature: f64,
    /// Temperature change per metre east and north, degC/m.
    pub temperature_gradient: [f64; 2],
    pub temperature_lapse: f64,
    pub salinity: f64,
    pub salinity_gradient: [f64; 2],
    pub turbidity: f64,
    pub turbidity_per_depth: f64,
    pub noise: f64,
}

impl Default for WaterQualityField {
    fn default() -> Self {
        Self {
            interval: 10.0,
            temperature: 14.0,
            temperature_gradient: [0.002, -0.001],
            temperature_lapse: 0.05,
            salinity: 33.5,
            salinity_gradient: [0.0005, 0.0],
            turbidity: 4.0,
            turbidity_per_depth: 0.3,
            noise: 0.02,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnvironmentSampler {
    pub field: WaterQualityField,
    rng: SeededRng,
    next_due: f64,
}

impl EnvironmentSampler {
    pub fn new(field: WaterQualityField, seed: u64) -> Self {
        Self {
            field,
            rng: SeededRng::new(seed, streams::ENVIRONMENT),
            next_due: 0.0,
        }
    }

    /// A sample when one is due at time `t`, otherwise `None`.
    pub fn sample(&mut self, t: f64, position: Vector2<f64>, depth: f64) -> Option<EnvironmentalSample> {
        if t + 1e-9 < self.next_due {
            return None;
        }
        self.next_due += self.field.interval;
        let f = &self.field;
        let dot = |g: [f64; 2]| g[0] * position.x + g[1] * position.y;
        let sigma = f.noise;
        Some(EnvironmentalSample {
            timestamp: t,
            position,
            depth,
            temperature: f.temperature + dot(f.temperature_gradient) - f.temperature_lapse * depth
                + self.rng.normal(sigma),
            turbidity: (f.turbidity + f.turbidity_per_depth * depth + self.rng.normal(sigma)).max(0.0),
            salinity: f.salinity + dot(f.salinity_gradient) + self.rng.normal(sigma),
        })
    }
}
