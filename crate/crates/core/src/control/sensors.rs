//! Simulated navigation sensors: GPS position, compass heading and a yaw-rate
//! gyro, each with i.i.d. Gaussian noise on its own random stream.

use serde::{Deserialize, Serialize};

use crate::asv::VehicleState3DOF;
use crate::error::{Error, Result};
use crate::world::{streams, wrap_angle, SeededRng};

/// Per-axis GPS sigma whose 2-D 95th-percentile radial error is 2.5 m.
///
/// For i.i.d. per-axis noise the radial error is Rayleigh distributed with
/// quantile `sigma * sqrt(-2 ln(1 - p))`.
pub fn gps_sigma_for_radial_95(radial: f64) -> f64 {
    radial / (2.0 * 20.0f64.ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measurement {
    Gps { x: f64, y: f64 },
    Compass { heading: f64 },
    Gyro { yaw_rate: f64 },
}

impl Measurement {
    pub fn kind(&self) -> &'static str {
        match self {
            Measurement::Gps { .. } => "gps",
            Measurement::Compass { .. } => "compass",
            Measurement::Gyro { .. } => "gyro",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorReading {
    pub timestamp: f64,
    pub measurement: Measurement,
}

impl SensorReading {
    pub fn new(timestamp: f64, measurement: Measurement) -> Self {
        Self {
            timestamp,
            measurement,
        }
    }
}

/// Sensor rates (Hz) and noise levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSchedule {
    pub gps_rate: f64,
    pub gps_sigma: f64,
    pub compass_rate: f64,
    pub compass_sigma: f64,
    pub gyro_rate: f64,
    pub gyro_sigma: f64,
}

impl Default for SensorSchedule {
    fn default() -> Self {
        Self {
            gps_rate: 1.0,
            gps_sigma: gps_sigma_for_radial_95(2.5),
            compass_rate: 10.0,
            compass_sigma: 0.02,
            gyro_rate: 100.0,
            gyro_sigma: 0.005,
        }
    }
}

fn period_steps(name: &str, rate: f64, dt: f64) -> Result<u64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::config(name, format!("rate must be > 0, got {rate}")));
    }
    let ratio = 1.0 / (rate * dt);
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * n {
        return Err(Error::config(
            name,
            format!("rate {rate} Hz does not divide the simulation rate {} Hz", 1.0 / dt),
        ));
    }
    Ok(n as u64)
}

impl SensorSchedule {
    pub fn validate(&self, dt: f64) -> Result<()> {
        period_steps("sensors.gps_rate", self.gps_rate, dt)?;
        period_steps("sensors.compass_rate", self.compass_rate, dt)?;
        period_steps("sensors.gyro_rate", self.gyro_rate, dt)?;
        for (name, s) in [
            ("sensors.gps_sigma", self.gps_sigma),
            ("sensors.compass_sigma", self.compass_sigma),
            ("sensors.gyro_sigma", self.gyro_sigma),
        ] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::config(name, format!("must be >= 0, got {s}")));
            }
        }
        Ok(())
    }
}

/// The three sensor noise streams for one run.
#[derive(Debug, Clone)]
pub struct SensorRngs {
    gps: SeededRng,
    compass: SeededRng,
    gyro: SeededRng,
}

impl SensorRngs {
    pub fn new(seed: u64) -> Self {
        Self {
            gps: SeededRng::new(seed, streams::GPS),
            compass: SeededRng::new(seed, streams::COMPASS),
            gyro: SeededRng::new(seed, streams::GYRO),
        }
    }
}

/// Readings due at simulation step `step` (time `step * dt`).
pub fn sample_sensors(
    truth: &VehicleState3DOF,
    rngs: &mut SensorRngs,
    schedule: &SensorSchedule,
    step: u64,
    dt: f64,
) -> Result<Vec<SensorReading>> {
    let t = step as f64 * dt;
    let mut out = Vec::with_capacity(3);
    if step % period_steps("sensors.gps_rate", schedule.gps_rate, dt)? == 0 {
        let x = truth.x + rngs.gps.normal(schedule.gps_sigma);
        let y = truth.y + rngs.gps.normal(schedule.gps_sigma);
        out.push(SensorReading::new(t, Measurement::Gps { x, y }));
    }
    if step % period_steps("sensors.compass_rate", schedule.compass_rate, dt)? == 0 {
        let heading = wrap_angle(truth.heading + rngs.compass.normal(schedule.compass_sigma));
        out.push(SensorReading::new(t, Measurement::Compass { heading }));
    }
    if step % period_steps("sensors.gyro_rate", schedule.gyro_rate, dt)? == 0 {
        let yaw_rate = truth.yaw_rate + rngs.gyro.normal(schedule.gyro_sigma);
        out.push(SensorReading::new(t, Measurement::Gyro { yaw_rate }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> VehicleState3DOF {
        VehicleState3DOF {
            x: 10.0,
            y: -4.0,
            heading: 1.0,
            yaw_rate: 0.1,
            ..Default::default()
        }
    }

    #[test]
    fn noiseless_readings_equal_truth() {
        let sched = SensorSchedule {
            gps_sigma: 0.0,
            compass_sigma: 0.0,
            gyro_sigma: 0.0,
            ..SensorSchedule::default()
        };
        let mut rngs = SensorRngs::new(1);
        let r = sample_sensors(&truth(), &mut rngs, &sched, 0, 0.01).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0].measurement, Measurement::Gps { x: 10.0, y: -4.0 });
        assert_eq!(r[1].measurement, Measurement::Compass { heading: 1.0 });
        assert_eq!(r[2].measurement, Measurement::Gyro { yaw_rate: 0.1 });
    }

    #[test]
    fn rates_follow_schedule() {
        let sched = SensorSchedule::default();
        let mut rngs = SensorRngs::new(1);
        let mut counts = [0usize; 3];
        for step in 0..1000 {
            for r in sample_sensors(&truth(), &mut rngs, &sched, step, 0.01).unwrap() {
                let i = match r.measurement {
                    Measurement::Gps { .. } => 0,
                    Measurement::Compass { .. } => 1,
                    Measurement::Gyro { .. } => 2,
                };
                counts[i] += 1;
                assert_eq!(r.timestamp, step as f64 * 0.01);
            }
        }
        assert_eq!(counts, [10, 100, 1000]);
    }

    #[test]
    fn same_seed_same_sequence() {
        let sched = SensorSchedule::default();
        let run = |seed| {
            let mut rngs = SensorRngs::new(seed);
            (0..300)
                .flat_map(|s| sample_sensors(&truth(), &mut rngs, &sched, s, 0.01).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn rate_must_divide_sim_rate() {
        let sched = SensorSchedule {
            gps_rate: 3.0,
            ..SensorSchedule::default()
        };
        assert!(matches!(sched.validate(0.01), Err(Error::Config { .. })));
        assert!(SensorSchedule::default().validate(0.01).is_ok());
    }

    fn percentile_95_radial(sigma: f64) -> f64 {
        let sched = SensorSchedule {
            gps_sigma: sigma,
            ..SensorSchedule::default()
        };
        let mut rngs = SensorRngs::new(2024);
        let t = truth();
        let mut radial: Vec<f64> = (0..10_000)
            .map(|_| {
                let r = sample_sensors(&t, &mut rngs, &sched, 0, 0.01).unwrap();
                match r[0].measurement {
                    Measurement::Gps { x, y } => (x - t.x).hypot(y - t.y),
                    _ => unreachable!(),
                }
            })
            .collect();
        radial.sort_by(f64::total_cmp);
        radial[9_499]
    }

    #[test]
    fn default_gps_noise_matches_radial_accuracy() {
        let p95 = percentile_95_radial(SensorSchedule::default().gps_sigma);
        assert!((2.3..=2.8).contains(&p95), "p95 = {p95}");
    }

    #[test]
    fn per_axis_sigma_follows_rayleigh_quantile() {
        // Rayleigh: q95 = sigma * sqrt(2 ln 20); for sigma = 1.25 that is 3.06 m
        let q = 1.25 * (2.0 * 20.0f64.ln()).sqrt();
        let p95 = percentile_95_radial(1.25);
        assert!((p95 - q).abs() < 0.1, "p95 = {p95}, rayleigh = {q}");
    }
}
