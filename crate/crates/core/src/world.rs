//! Shared frames, fixed-step integration and seeded randomness.
//!
//! The navigation frame is east-x, north-y with z positive down. Headings are
//! measured counter-clockwise from +x and kept in (-pi, pi].

use std::f64::consts::PI;

use nalgebra::{SVector, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Wraps an angle into (-pi, pi]. `-pi` maps to `+pi`.
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    PI - (PI - theta).rem_euclid(2.0 * PI)
}

/// Rotates a body-frame planar vector into the navigation frame.
pub fn rotate_body_to_nav(v: Vector2<f64>, heading: f64) -> Result<Vector2<f64>> {
    if !(v.x.is_finite() && v.y.is_finite() && heading.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "rotate_body_to_nav({}, {}, {heading})",
            v.x, v.y
        )));
    }
    let (s, c) = heading.sin_cos();
    Ok(Vector2::new(c * v.x - s * v.y, s * v.x + c * v.y))
}

/// Inverse of [`rotate_body_to_nav`].
pub fn rotate_nav_to_body(v: Vector2<f64>, heading: f64) -> Result<Vector2<f64>> {
    rotate_body_to_nav(v, -heading)
}

/// A planar frame: origin in the navigation frame plus a heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame2D {
    pub origin: Vector2<f64>,
    heading: f64,
}

impl Frame2D {
    pub fn new(origin: Vector2<f64>, heading: f64) -> Self {
        Self {
            origin,
            heading: wrap_angle(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    /// Maps a point expressed in this frame into the navigation frame.
    pub fn to_nav(&self, p: Vector2<f64>) -> Vector2<f64> {
        let (s, c) = self.heading.sin_cos();
        self.origin + Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    /// Maps a navigation-frame point into this frame.
    pub fn from_nav(&self, p: Vector2<f64>) -> Vector2<f64> {
        let d = p - self.origin;
        let (s, c) = self.heading.sin_cos();
        Vector2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }
}

/// Fixed-step simulation clock. Time is always `steps * dt`, never a running sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    dt: f64,
    steps: u64,
}

impl SimClock {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
        }
        Ok(Self { dt, steps: 0 })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn t(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn tick(&mut self) {
        self.steps += 1;
    }
}

/// Stream identifiers, one per random consumer.
pub mod streams {
    pub const GPS: u64 = 1;
    pub const COMPASS: u64 = 2;
    pub const GYRO: u64 = 3;
    pub const GUST: u64 = 4;
    pub const WAVES: u64 = 5;
    pub const DETECTION: u64 = 6;
    pub const DETECTION_NOISE: u64 = 7;
    pub const ENVIRONMENT: u64 = 8;
    pub const ESTIMATOR_INIT: u64 = 9;
}

/// Counter-based generator bound to a `(seed, stream)` pair.
///
/// Each consumer owns its own stream, so adding a consumer never shifts the
/// draws seen by another.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Zero-mean normal draw with the given standard deviation.
    pub fn normal(&mut self, sigma: f64) -> f64 {
        sigma * self.standard_normal()
    }

    /// Bernoulli trial with success probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// One classical fourth-order Runge-Kutta step of `x' = f(t, x)`.
pub fn rk4_step<const N: usize, F>(
    t: f64,
    x: &SVector<f64, N>,
    dt: f64,
    mut f: F,
) -> Result<SVector<f64, N>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    let check = |k: SVector<f64, N>, at: f64| -> Result<SVector<f64, N>> {
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(Error::IntegrationFault { t: at })
        }
    };
    let h = 0.5 * dt;
    let k1 = check(f(t, x), t)?;
    let k2 = check(f(t + h, &(x + k1 * h)), t + h)?;
    let k3 = check(f(t + h, &(x + k2 * h)), t + h)?;
    let k4 = check(f(t + dt, &(x + k3 * dt)), t + dt)?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}
