//! The coupled simulation loop.
//!
//! Each step at time `t` runs, in order: sensor sampling, filter
//! predict/update, guidance and autopilot, disturbances, towline coupling,
//! joint hull/towed-body integration, hexapod motion, the detection sweep and
//! the mission stage machine. The state recorded for the step is the one at
//! `t + dt`.

mod mission;

use nalgebra::{Matrix6, SVector, Vector2, Vector3, Vector6};

use crate::asv::{state_derivative, step_asv, BodyWrench, VehicleState3DOF};
use crate::control::{
    ekf_predict, ekf_update, guidance_step, reacquire_position, sample_sensors, Autopilot, EstimatorState,
    GuidanceCommand, GuidanceSetpoint, Measurement, ProcessModel, SensorRngs, GPS_REACQUIRE_AFTER,
};
use crate::environment::{terrain_at, DisturbanceModel};
use crate::error::{Error, Result};
use crate::hexapod::{body_advance, HexapodState};
use crate::log::{
    CruiseMetrics, EstimatorMetrics, Event, HexapodRecord, Metrics, RunLog, RunMeta, StateRecord, StationMetrics,
    TowRecord,
};
use crate::mission::{coverage_report, TrackPoint};
use crate::scenario::{RunMode, Scenario};
use crate::tuv::{self, asv_attach_point, tow_forces, tuv_dynamics, winch_set_length, TowForces, TowedBodyState, Towline};
use crate::world::{rk4_step, streams, wrap_angle, SeededRng};

use mission::{MissionRun, Surroundings};

/// Runs a scenario to completion, the duration cap, or a numerical fault.
/// Faults end the run with an `aborted` event rather than an error; the
/// error path is reserved for scenarios that cannot be set up.
pub fn run_simulation(scenario: &Scenario) -> Result<RunLog> {
    match scenario.run.mode {
        RunMode::Transect => run_transect(scenario),
        _ => {
            let mut sim = Simulation::new(scenario)?;
            sim.run();
            Ok(sim.finish())
        }
    }
}

fn step_count(scenario: &Scenario) -> u64 {
    (scenario.run.duration / scenario.run.dt).round() as u64
}

fn meta(scenario: &Scenario) -> RunMeta {
    RunMeta {
        name: scenario.name.clone(),
        seed: scenario.run.seed,
        dt: scenario.run.dt,
        duration: scenario.run.duration,
        mode: scenario.run.mode,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

#[derive(Debug, Clone)]
struct Towed {
    body: TowedBodyState,
    line: Towline,
    forces: TowForces,
}

/// Values produced during a step that go into its record.
#[derive(Debug, Clone, Copy, Default)]
struct StepTrace {
    guidance: GuidanceCommand,
    surge_cmd: f64,
    yaw_cmd: f64,
    thrust: (f64, f64),
    disturbance: BodyWrench,
    wind_speed: f64,
}

pub struct Simulation {
    sc: Scenario,
    step: u64,
    asv: VehicleState3DOF,
    est: EstimatorState,
    model: ProcessModel,
    autopilot: Autopilot,
    rngs: SensorRngs,
    disturbance: Option<DisturbanceModel>,
    towed: Option<Towed>,
    hexapod: Option<HexapodState>,
    mission: Option<MissionRun>,
    /// Control input handed to the filter's next prediction.
    applied: BodyWrench,
    states: Vec<StateRecord>,
    events: Vec<Event>,
    track: Vec<TrackPoint>,
    rejected: usize,
    gps_gated: usize,
    aborted: bool,
    concluded: bool,
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let sc = scenario.clone();
        let seed = sc.run.seed;
        let asv = VehicleState3DOF::at_rest(sc.asv.start.x, sc.asv.start.y, sc.asv.heading);

        let sigma = sc.control.initial_sigma;
        let mut init = SeededRng::new(seed, streams::ESTIMATOR_INIT);
        let mut mean = asv.to_vector();
        for k in 0..6 {
            mean[k] += init.normal(sigma[k]);
        }
        mean[2] = wrap_angle(mean[2]);
        let q = Matrix6::from_diagonal(&(sc.control.process_noise * sc.run.dt));
        let mut est = EstimatorState::new(
            mean,
            Matrix6::from_diagonal(&sigma.component_mul(&sigma)),
            q,
            sc.control.sensors.gps_sigma,
            sc.control.sensors.compass_sigma,
            sc.control.sensors.gyro_sigma,
        );
        est.gate_sigma = sc.control.gate_sigma;

        let towed = sc.tuv.enabled.then(|| {
            let line = sc.tuv.line;
            let (a, _) = asv_attach_point(&asv, &line);
            let body = TowedBodyState::new(
                Vector3::new(a.x, a.y, line.unstretched_length + line.tuv_attach_offset),
                Vector3::zeros(),
            );
            Towed {
                body,
                line,
                forces: TowForces::default(),
            }
        });
        let mission = match (&sc.mission, sc.run.mode) {
            (Some(m), RunMode::Mission) => Some(MissionRun::new(m, seed)?),
            _ => None,
        };
        let track = match &towed {
            Some(t) if mission.is_some() => vec![TrackPoint {
                t: 0.0,
                position: t.body.ground_position(),
                active: false,
            }],
            _ => Vec::new(),
        };

        Ok(Self {
            model: ProcessModel {
                params: sc.asv.params,
                damping: sc.asv.damping,
            },
            autopilot: Autopilot::new(sc.control.gains, &sc.asv.params)?,
            rngs: SensorRngs::new(seed),
            disturbance: sc.disturbances.map(|f| DisturbanceModel::new(f, seed)),
            step: 0,
            asv,
            est,
            towed,
            hexapod: None,
            mission,
            applied: BodyWrench::ZERO,
            states: Vec::new(),
            events: Vec::new(),
            track,
            rejected: 0,
            gps_gated: 0,
            aborted: false,
            concluded: false,
            sc,
        })
    }

    pub fn run(&mut self) {
        let n = step_count(&self.sc);
        while self.step < n && !self.concluded {
            let t = self.step as f64 * self.sc.run.dt;
            match self.advance() {
                Ok(rec) => self.states.push(rec),
                Err(e) => {
                    self.events.push(Event::Aborted {
                        t: t + self.sc.run.dt,
                        reason: e.to_string(),
                        last_good: self.states.last().cloned().map(Box::new),
                    });
                    self.aborted = true;
                    return;
                }
            }
        }
        if self.mission.is_some() && !self.concluded {
            self.events.push(Event::Truncated {
                t: self.step as f64 * self.sc.run.dt,
            });
        }
    }

    fn tuned(&self, mut sp: GuidanceSetpoint) -> GuidanceSetpoint {
        let c = &self.sc.control;
        sp.deadband = c.loiter_deadband;
        sp.loiter_gain = c.loiter_gain;
        sp.lookahead = c.lookahead;
        sp
    }

    fn guidance(&mut self) -> GuidanceCommand {
        let arrival = self.sc.control.arrival_radius;
        match self.sc.run.mode {
            RunMode::Cruise => GuidanceCommand {
                heading_error: wrap_angle(self.sc.cruise.heading - self.est.heading()),
                speed_cmd: self.sc.cruise.speed,
                arrived: false,
            },
            RunMode::Mission => {
                let m = self.mission.as_ref().expect("mission runtime");
                let sp = self.tuned(m.setpoint(arrival));
                let cmd = guidance_step(&sp, &self.est);
                self.mission.as_mut().expect("mission runtime").after_guidance(&cmd);
                cmd
            }
            _ => {
                let sp = self.tuned(GuidanceSetpoint::loiter(self.sc.loiter.point, self.sc.loiter.max_speed));
                guidance_step(&sp, &self.est)
            }
        }
    }

    fn winch_target(&self) -> f64 {
        match &self.mission {
            Some(m) => m.winch_target(&self.sc.tuv),
            None => self.sc.tuv.search_length,
        }
    }

    fn advance(&mut self) -> Result<StateRecord> {
        let dt = self.sc.run.dt;
        let t = self.step as f64 * dt;
        let params = self.sc.asv.params;

        // sensors and filter
        let readings = sample_sensors(&self.asv, &mut self.rngs, &self.sc.control.sensors, self.step, dt)?;
        if self.step > 0 {
            self.est = ekf_predict(&self.est, &self.applied, &self.model, dt)?;
        }
        for r in &readings {
            let u = ekf_update(&self.est, r)?;
            if !u.accepted {
                self.rejected += 1;
            }
            self.est = u.estimator;
            if let Measurement::Gps { x, y } = r.measurement {
                self.gps_gated = if u.accepted { 0 } else { self.gps_gated + 1 };
                if self.gps_gated >= GPS_REACQUIRE_AFTER {
                    let s = self.sc.control.initial_sigma;
                    self.est = reacquire_position(&self.est, Vector2::new(x, y), &Vector3::new(s[3], s[4], s[5]));
                    self.gps_gated = 0;
                }
            }
        }

        // guidance, autopilot, allocation
        let cmd = self.guidance();
        let act = self.autopilot.step(&cmd, self.est.mean[3], &params, dt);
        let thrust = act.thrust.realized;

        // disturbances
        let (disturbance, wind_speed, current) = match &mut self.disturbance {
            Some(d) => {
                let wind = d.wind_speed();
                (d.disturbance_wrench(&self.asv, t, dt), wind, d.current_velocity())
            }
            None => (BodyWrench::ZERO, 0.0, Vector2::zeros()),
        };

        // towline
        let target = self.winch_target();
        if let Some(tw) = &mut self.towed {
            tw.line = winch_set_length(&tw.line, target, self.sc.tuv.winch_rate, dt)?;
            tw.forces = tow_forces(&self.asv, &tw.body, &tw.line)?;
        }
        self.applied = thrust + self.towed.as_ref().map(|tw| tw.forces.asv_wrench).unwrap_or(BodyWrench::ZERO);

        // integration
        self.integrate(thrust + disturbance, current, t)?;
        let now = t + dt;

        // mission layers
        let phase_before = self.mission.as_ref().map(|m| m.kind());
        if let Some(m) = self.mission.as_mut() {
            let s = Surroundings {
                now,
                dt,
                asv: self.asv.position(),
                towed: self.towed.as_ref().map(|tw| (tw.body.ground_position(), tw.body.depth())),
                line_length: self.towed.as_ref().map(|tw| tw.line.unstretched_length),
                terrain: &self.sc.terrain,
                hexapod_cfg: &self.sc.hexapod.config,
                tuv: &self.sc.tuv,
            };
            m.hexapod_step(&s, &mut self.hexapod, &mut self.events)?;
            m.detection_step(&s, &mut self.events);
            self.concluded = m.phase_step(&s, &mut self.hexapod, &mut self.events)?;
            if let Some((pos, _)) = s.towed {
                self.track.push(TrackPoint {
                    t: now,
                    position: pos,
                    active: phase_before == Some(crate::mission::PhaseKind::WideAreaSearch),
                });
            }
        }

        self.step += 1;
        Ok(self.record(
            now,
            StepTrace {
                guidance: cmd,
                surge_cmd: act.surge_cmd,
                yaw_cmd: act.yaw_cmd,
                thrust: (act.thrust.left, act.thrust.right),
                disturbance,
                wind_speed,
            },
        ))
    }

    /// One RK4 step of the hull, jointly with the towed body when present.
    /// `external` (thrust plus weather) is held over the step; damping and
    /// cable forces are re-evaluated at every stage.
    fn integrate(&mut self, external: BodyWrench, current: Vector2<f64>, t: f64) -> Result<()> {
        let dt = self.sc.run.dt;
        let params = self.sc.asv.params;
        let damping = self.sc.asv.damping;
        let inert = self.asv.inert;
        let Some(tw) = &mut self.towed else {
            self.asv = step_asv(&self.asv, &params, &damping, &external, current, t, dt)?;
            self.asv.heading = wrap_angle(self.asv.heading);
            return if self.asv.is_finite() {
                Ok(())
            } else {
                Err(Error::IntegrationFault { t })
            };
        };

        let line = tw.line;
        let tuv_params = self.sc.tuv.params;
        let flow = Vector3::new(current.x, current.y, 0.0);
        let mut z = SVector::<f64, 12>::zeros();
        z.fixed_rows_mut::<6>(0).copy_from(&self.asv.to_vector());
        z.fixed_rows_mut::<6>(6).copy_from(&tuv::to_vector(&tw.body));
        let mut cable_fault = None;
        let next = rk4_step(t, &z, dt, |_, z| {
            let hull_x: Vector6<f64> = z.fixed_rows::<6>(0).into_owned();
            let hull = VehicleState3DOF::from_vector(&hull_x, inert);
            let body = tuv::from_vector(&z.fixed_rows::<6>(6).into_owned());
            let cable = match tow_forces(&hull, &body, &line) {
                Ok(f) => f,
                Err(e) => {
                    cable_fault.get_or_insert(e);
                    return SVector::<f64, 12>::repeat(f64::NAN);
                }
            };
            let w = external + damping.wrench(&hull, current) + cable.asv_wrench;
            let mut dz = SVector::<f64, 12>::zeros();
            dz.fixed_rows_mut::<6>(0).copy_from(&state_derivative(&hull_x, &params, &w));
            dz.fixed_rows_mut::<3>(6).copy_from(&body.velocity);
            dz.fixed_rows_mut::<3>(9)
                .copy_from(&tuv_dynamics(&body, &tuv_params, &cable.on_tuv, &flow));
            dz
        });
        if let Some(e) = cable_fault {
            return Err(e);
        }
        let z = next?;
        self.asv = VehicleState3DOF::from_vector(&z.fixed_rows::<6>(0).into_owned(), inert);
        self.asv.heading = wrap_angle(self.asv.heading);
        tw.body = tuv::from_vector(&z.fixed_rows::<6>(6).into_owned()).clamp_to_water();
        Ok(())
    }

    fn record(&self, t: f64, tr: StepTrace) -> StateRecord {
        let a = self.asv.to_vector();
        let e = self.est.mean;
        let p = &self.est.covariance;
        StateRecord {
            t,
            phase: self.mission.as_ref().map(|m| m.kind()),
            asv: [a[0], a[1], a[2], a[3], a[4], a[5]],
            estimate: [e[0], e[1], e[2], e[3], e[4], e[5]],
            position_sigma: (p[(0, 0)] + p[(1, 1)]).sqrt(),
            heading_error: tr.guidance.heading_error,
            speed_cmd: tr.guidance.speed_cmd,
            surge_cmd: tr.surge_cmd,
            yaw_cmd: tr.yaw_cmd,
            thrust_left: tr.thrust.0,
            thrust_right: tr.thrust.1,
            disturbance: [tr.disturbance.surge, tr.disturbance.sway, tr.disturbance.yaw],
            wind_speed: tr.wind_speed,
            tow: self.towed.as_ref().map(|tw| TowRecord {
                tension: tw.forces.on_tuv.norm(),
                surge: tw.forces.asv_wrench.surge,
                sway: tw.forces.asv_wrench.sway,
                yaw: tw.forces.asv_wrench.yaw,
                line_length: tw.line.unstretched_length,
                tuv_x: tw.body.position.x,
                tuv_y: tw.body.position.y,
                tuv_z: tw.body.position.z,
                tuv_vx: tw.body.velocity.x,
                tuv_vy: tw.body.velocity.y,
                tuv_vz: tw.body.velocity.z,
            }),
            hexapod: self.hexapod.as_ref().map(hexapod_record),
        }
    }

    fn finish(self) -> RunLog {
        let sc = &self.sc;
        let m = self.mission.as_ref();
        let coverage = match (m, self.track.len()) {
            (Some(run), n) if n > 1 => {
                coverage_report(&self.track, run.cfg.swath, run.detections, run.confirmations).ok()
            }
            _ => None,
        };
        let station = (sc.run.mode == RunMode::Loiter && !self.states.is_empty()).then(|| {
            let errs: Vec<f64> = self
                .states
                .iter()
                .map(|r| (Vector2::new(r.asv[0], r.asv[1]) - sc.loiter.point).norm())
                .collect();
            let within = errs.iter().filter(|e| **e <= sc.loiter.hold_radius).count();
            StationMetrics {
                hold_radius: sc.loiter.hold_radius,
                fraction_within: within as f64 / errs.len() as f64,
                max_error: errs.iter().copied().fold(0.0, f64::max),
                rms_error: (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt(),
            }
        });
        let cruise = (sc.run.mode == RunMode::Cruise && !self.states.is_empty()).then(|| {
            let target = sc.cruise.speed;
            let end = self.states.last().map(|r| r.t).unwrap_or(0.0);
            let window = 30.0_f64.min(0.5 * end);
            let tail: Vec<f64> = self
                .states
                .iter()
                .filter(|r| r.t >= end - window)
                .map(|r| r.asv[3])
                .collect();
            let steady = tail.iter().sum::<f64>() / tail.len() as f64;
            CruiseMetrics {
                commanded: target,
                time_to_speed: self.states.iter().find(|r| r.asv[3] >= target).map(|r| r.t),
                steady_state_speed: steady,
                steady_state_error: (steady - target).abs() / target,
            }
        });
        let estimator = (!self.states.is_empty()).then(|| {
            let errs: Vec<f64> = self
                .states
                .iter()
                .map(|r| (r.asv[0] - r.estimate[0]).hypot(r.asv[1] - r.estimate[1]))
                .collect();
            EstimatorMetrics {
                rms_position_error: (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt(),
                max_position_error: errs.iter().copied().fold(0.0, f64::max),
                rejected_measurements: self.rejected,
            }
        });
        let metrics = Metrics {
            steps: self.step,
            sim_time: self.step as f64 * sc.run.dt,
            final_phase: m.map(|r| r.kind()),
            phases_visited: m.map(|r| r.visited.clone()).unwrap_or_default(),
            truncated: m.is_some() && !self.concluded && !self.aborted,
            aborted: self.aborted,
            detections: m.map_or(0, |r| r.detections),
            confirmations: m.map_or(0, |r| r.confirmations),
            inspections_aborted: m.map_or(0, |r| r.inspections_aborted),
            samples: m.map_or(0, |r| r.samples),
            coverage,
            station,
            cruise,
            estimator,
        };
        RunLog {
            meta: meta(sc),
            states: self.states,
            events: self.events,
            metrics,
        }
    }
}

fn hexapod_record(h: &HexapodState) -> HexapodRecord {
    HexapodRecord {
        x: h.x,
        y: h.y,
        heading: h.heading,
        gait_phase: h.gait_phase,
        terrain: h.terrain,
        legs: h.legs,
    }
}

/// Hexapod-only run: a straight seabed transect at the substrate speed.
fn run_transect(sc: &Scenario) -> Result<RunLog> {
    let dt = sc.run.dt;
    let cfg = &sc.hexapod.config;
    let start = sc.transect.start;
    let ground = terrain_at(&sc.terrain, start)?;
    let mut hex = HexapodState::new(start.x, start.y, sc.transect.heading, ground.class, cfg)?;
    let mut states = Vec::new();
    let mut events = Vec::new();
    let mut track = vec![TrackPoint {
        t: 0.0,
        position: hex.position(),
        active: true,
    }];
    let mut aborted = false;
    let n = step_count(sc);
    let mut steps = 0;
    while steps < n {
        let now = (steps + 1) as f64 * dt;
        let fault = match terrain_at(&sc.terrain, hex.position()) {
            Err(e) => Some(e),
            Ok(g) => {
                let adv = body_advance(&hex, cfg, sc.transect.heading, dt, g.class)?;
                if adv.fault.is_none() {
                    hex = adv.state;
                }
                adv.fault
            }
        };
        if let Some(e) = fault {
            events.push(Event::Aborted {
                t: now,
                reason: e.to_string(),
                last_good: states.last().cloned().map(Box::new),
            });
            aborted = true;
            break;
        }
        steps += 1;
        track.push(TrackPoint {
            t: now,
            position: hex.position(),
            active: true,
        });
        states.push(StateRecord {
            t: now,
            phase: None,
            asv: [sc.asv.start.x, sc.asv.start.y, sc.asv.heading, 0.0, 0.0, 0.0],
            estimate: [sc.asv.start.x, sc.asv.start.y, sc.asv.heading, 0.0, 0.0, 0.0],
            position_sigma: 0.0,
            heading_error: 0.0,
            speed_cmd: 0.0,
            surge_cmd: 0.0,
            yaw_cmd: 0.0,
            thrust_left: 0.0,
            thrust_right: 0.0,
            disturbance: [0.0; 3],
            wind_speed: 0.0,
            tow: None,
            hexapod: Some(hexapod_record(&hex)),
        });
    }
    let coverage = (track.len() > 1)
        .then(|| coverage_report(&track, sc.hexapod.swath, 0, 0))
        .transpose()?;
    Ok(RunLog {
        meta: meta(sc),
        states,
        events,
        metrics: Metrics {
            steps,
            sim_time: steps as f64 * dt,
            final_phase: None,
            phases_visited: Vec::new(),
            truncated: false,
            aborted,
            detections: 0,
            confirmations: 0,
            inspections_aborted: 0,
            samples: 0,
            coverage,
            station: None,
            cruise: None,
            estimator: None,
        },
    })
}
