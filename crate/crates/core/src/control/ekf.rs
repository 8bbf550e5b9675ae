//! Extended Kalman filter over the surface-vehicle state
//! `(x, y, heading, surge, sway, yaw_rate)`.
//!
//! Prediction runs one RK4 step of the hull model and propagates the
//! covariance through the exact Jacobian of that discrete step. Updates use
//! `K = P H^T (H P H^T + R)^-1`, `x += K (z - h(x))`, `P = (I - K H) P`.

use nalgebra::{Matrix1, Matrix2, Matrix6, SMatrix, SVector, Vector2, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::asv::{state_derivative, AsvParams, BodyWrench, InertPose, LinearDamping, VehicleState3DOF};
use crate::control::sensors::{Measurement, SensorReading};
use crate::error::{Error, Result};
use crate::world::{rk4_step, wrap_angle};

/// Consecutive gated GPS fixes before the filter re-seeds its position.
pub const GPS_REACQUIRE_AFTER: usize = 3;

/// Default innovation gate in standard deviations (Mahalanobis distance).
pub const DEFAULT_GATE_SIGMA: f64 = 5.0;

/// Hull model the filter believes in. Water current is not modelled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProcessModel {
    pub params: AsvParams,
    pub damping: LinearDamping,
}

impl ProcessModel {
    fn derivative(&self, x: &Vector6<f64>, control: &BodyWrench) -> Vector6<f64> {
        let s = VehicleState3DOF::from_vector(x, InertPose::default());
        let w = *control + self.damping.wrench(&s, Vector2::zeros());
        state_derivative(x, &self.params, &w)
    }

    /// Continuous-time Jacobian of the state derivative.
    pub fn continuous_jacobian(&self, x: &Vector6<f64>) -> Matrix6<f64> {
        let (psi, u, v, r) = (x[2], x[3], x[4], x[5]);
        let (s, c) = psi.sin_cos();
        let AsvParams { m11, m22, m33, .. } = self.params;
        let d = self.damping;
        let mut a = Matrix6::zeros();
        a[(0, 2)] = -u * s - v * c;
        a[(0, 3)] = c;
        a[(0, 4)] = -s;
        a[(1, 2)] = u * c - v * s;
        a[(1, 3)] = s;
        a[(1, 4)] = c;
        a[(2, 5)] = 1.0;
        a[(3, 3)] = -d.surge / m11;
        a[(3, 4)] = (m33 - m22) * r / m11;
        a[(3, 5)] = (m33 - m22) * v / m11;
        a[(4, 3)] = (m11 - m33) * r / m22;
        a[(4, 4)] = -d.sway / m22;
        a[(4, 5)] = (m11 - m33) * u / m22;
        a[(5, 3)] = (m22 - m11) * v / m33;
        a[(5, 4)] = (m22 - m11) * u / m33;
        a[(5, 5)] = -d.yaw / m33;
        a
    }

    /// One RK4 step of the model.
    pub fn propagate(&self, x: &Vector6<f64>, control: &BodyWrench, dt: f64) -> Result<Vector6<f64>> {
        rk4_step(0.0, x, dt, |_, y| self.derivative(y, control))
    }

    /// Exact Jacobian of [`ProcessModel::propagate`] with respect to the state,
    /// obtained by differentiating each RK4 stage.
    pub fn discrete_jacobian(&self, x: &Vector6<f64>, control: &BodyWrench, dt: f64) -> Matrix6<f64> {
        let h = 0.5 * dt;
        let i = Matrix6::identity();
        let k1 = self.derivative(x, control);
        let x2 = x + k1 * h;
        let k2 = self.derivative(&x2, control);
        let x3 = x + k2 * h;
        let k3 = self.derivative(&x3, control);
        let x4 = x + k3 * dt;

        let j1 = self.continuous_jacobian(x);
        let j2 = self.continuous_jacobian(&x2) * (i + j1 * h);
        let j3 = self.continuous_jacobian(&x3) * (i + j2 * h);
        let j4 = self.continuous_jacobian(&x4) * (i + j3 * dt);
        i + (j1 + j2 * 2.0 + j3 * 2.0 + j4) * (dt / 6.0)
    }
}

/// Filter mean, covariance and noise settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorState {
    pub mean: Vector6<f64>,
    pub covariance: Matrix6<f64>,
    pub process_noise: Matrix6<f64>,
    pub gps_noise: Matrix2<f64>,
    pub compass_noise: f64,
    pub gyro_noise: f64,
    pub gate_sigma: f64,
}

impl EstimatorState {
    pub fn new(
        mean: Vector6<f64>,
        covariance: Matrix6<f64>,
        process_noise: Matrix6<f64>,
        gps_sigma: f64,
        compass_sigma: f64,
        gyro_sigma: f64,
    ) -> Self {
        Self {
            mean,
            covariance,
            process_noise,
            gps_noise: Matrix2::identity() * gps_sigma * gps_sigma,
            compass_noise: compass_sigma * compass_sigma,
            gyro_noise: gyro_sigma * gyro_sigma,
            gate_sigma: DEFAULT_GATE_SIGMA,
        }
    }

    pub fn estimate(&self) -> VehicleState3DOF {
        VehicleState3DOF::from_vector(&self.mean, InertPose::default())
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.mean[0], self.mean[1])
    }

    pub fn heading(&self) -> f64 {
        self.mean[2]
    }

    /// Normalized estimation error squared against a true state.
    pub fn nees(&self, truth: &VehicleState3DOF) -> Result<f64> {
        let mut e = truth.to_vector() - self.mean;
        e[2] = wrap_angle(e[2]);
        let inv = self
            .covariance
            .try_inverse()
            .ok_or(Error::NumericallySingular)?;
        Ok((e.transpose() * inv * e)[0])
    }
}

/// Covariance prediction `F P F^T + Q`, symmetrized.
pub fn covariance_predict<const N: usize>(
    p: &SMatrix<f64, N, N>,
    f: &SMatrix<f64, N, N>,
    q: &SMatrix<f64, N, N>,
) -> Result<SMatrix<f64, N, N>> {
    let next = f * p * f.transpose() + q;
    let next = (next + next.transpose()) * 0.5;
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(Error::EstimatorDivergence("predicted covariance is not finite".into()))
    }
}

/// Result of a generic Kalman measurement update.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanUpdate<const N: usize> {
    pub mean: SVector<f64, N>,
    pub covariance: SMatrix<f64, N, N>,
    /// `sqrt(nu^T S^-1 nu)`.
    pub mahalanobis: f64,
    pub accepted: bool,
}

/// Linear-Gaussian update given a precomputed innovation `z - h(x)`.
/// Innovations further than `gate_sigma` (Mahalanobis) are rejected and the
/// prior is returned unchanged.
pub fn kalman_update<const N: usize, const M: usize>(
    mean: &SVector<f64, N>,
    covariance: &SMatrix<f64, N, N>,
    innovation: &SVector<f64, M>,
    h: &SMatrix<f64, M, N>,
    r: &SMatrix<f64, M, M>,
    gate_sigma: f64,
) -> Result<KalmanUpdate<N>> {
    let s = h * covariance * h.transpose() + r;
    let s_inv = s.try_inverse().ok_or(Error::NumericallySingular)?;
    if !s_inv.iter().all(|v| v.is_finite()) {
        return Err(Error::NumericallySingular);
    }
    let d2 = (innovation.transpose() * s_inv * innovation)[0];
    let mahalanobis = d2.max(0.0).sqrt();
    if mahalanobis > gate_sigma {
        return Ok(KalmanUpdate {
            mean: *mean,
            covariance: *covariance,
            mahalanobis,
            accepted: false,
        });
    }
    let k = covariance * h.transpose() * s_inv;
    let next_mean = mean + k * innovation;
    let p = (SMatrix::<f64, N, N>::identity() - k * h) * covariance;
    let p = (p + p.transpose()) * 0.5;
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::EstimatorDivergence("updated covariance is not finite".into()));
    }
    Ok(KalmanUpdate {
        mean: next_mean,
        covariance: p,
        mahalanobis,
        accepted: true,
    })
}

/// Prediction step over one `dt` with the applied body wrench as control input.
pub fn ekf_predict(
    est: &EstimatorState,
    control: &BodyWrench,
    model: &ProcessModel,
    dt: f64,
) -> Result<EstimatorState> {
    let f = model.discrete_jacobian(&est.mean, control, dt);
    let mut mean = model
        .propagate(&est.mean, control, dt)
        .map_err(|_| Error::EstimatorDivergence("state prediction not finite".into()))?;
    mean[2] = wrap_angle(mean[2]);
    let covariance = covariance_predict(&est.covariance, &f, &est.process_noise)?;
    Ok(EstimatorState {
        mean,
        covariance,
        ..est.clone()
    })
}

/// Re-seeds the filter on a GPS fix after the gate has locked it out.
///
/// Position snaps to the fix with the receiver's covariance, velocities
/// get `velocity_sigma` and every cross term involving them is cleared.
/// Heading and its variance are kept since the compass still tracks them.
pub fn reacquire_position(est: &EstimatorState, fix: Vector2<f64>, velocity_sigma: &Vector3<f64>) -> EstimatorState {
    let mut out = est.clone();
    out.mean[0] = fix.x;
    out.mean[1] = fix.y;
    let heading_var = est.covariance[(2, 2)];
    let mut p = Matrix6::zeros();
    p.fixed_view_mut::<2, 2>(0, 0).copy_from(&est.gps_noise);
    p[(2, 2)] = heading_var;
    for k in 0..3 {
        p[(3 + k, 3 + k)] = velocity_sigma[k] * velocity_sigma[k];
    }
    out.covariance = p;
    out
}

/// Outcome of [`ekf_update`].
#[derive(Debug, Clone, PartialEq)]
pub struct EkfUpdate {
    pub estimator: EstimatorState,
    pub innovation: Vec<f64>,
    pub mahalanobis: f64,
    pub accepted: bool,
}

/// Measurement update for a single reading.
pub fn ekf_update(est: &EstimatorState, reading: &SensorReading) -> Result<EkfUpdate> {
    let x = &est.mean;
    let p = &est.covariance;
    let (mean, covariance, innovation, mahalanobis, accepted) = match reading.measurement {
        Measurement::Gps { x: zx, y: zy } => {
            let nu = Vector2::new(zx - x[0], zy - x[1]);
            let mut h = SMatrix::<f64, 2, 6>::zeros();
            h[(0, 0)] = 1.0;
            h[(1, 1)] = 1.0;
            let u = kalman_update(x, p, &nu, &h, &est.gps_noise, est.gate_sigma)?;
            (u.mean, u.covariance, vec![nu[0], nu[1]], u.mahalanobis, u.accepted)
        }
        Measurement::Compass { heading } => {
            let nu = Matrix1::new(wrap_angle(heading - x[2]));
            let mut h = SMatrix::<f64, 1, 6>::zeros();
            h[(0, 2)] = 1.0;
            let u = kalman_update(x, p, &nu, &h, &Matrix1::new(est.compass_noise), est.gate_sigma)?;
            (u.mean, u.covariance, vec![nu[0]], u.mahalanobis, u.accepted)
        }
        Measurement::Gyro { yaw_rate } => {
            let nu = Matrix1::new(yaw_rate - x[5]);
            let mut h = SMatrix::<f64, 1, 6>::zeros();
            h[(0, 5)] = 1.0;
            let u = kalman_update(x, p, &nu, &h, &Matrix1::new(est.gyro_noise), est.gate_sigma)?;
            (u.mean, u.covariance, vec![nu[0]], u.mahalanobis, u.accepted)
        }
    };
    let mut mean = mean;
    mean[2] = wrap_angle(mean[2]);
    Ok(EkfUpdate {
        estimator: EstimatorState {
            mean,
            covariance,
            ..est.clone()
        },
        innovation,
        mahalanobis,
        accepted,
    })
}
