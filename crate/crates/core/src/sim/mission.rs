//! Mission-mode runtime: pattern progress, the detection queue and the
//! inspection sub-sequence run inside `DetailedInspection`.

use nalgebra::Vector2;

use crate::control::{GuidanceCommand, GuidanceSetpoint};
use crate::environment::{terrain_at, TerrainMap};
use crate::error::Result;
use crate::hexapod::{HexapodConfig, HexapodState};
use crate::log::Event;
use crate::mission::inspection::walk_step;
use crate::mission::{
    generate_lawnmower, mission_step, needs_reposition, pop_nearest, sensor_sweep_detect, DetectionEvent,
    Detector, EnvironmentSampler, Leg, MissionPhase, PhaseKind, SweepDetector, WorldEvents,
};
use crate::scenario::{MissionSettings, TuvSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stage {
    /// ASV moving onto the loiter point while the towed body is hauled in.
    Station,
    Walking,
    Done,
}

#[derive(Debug, Clone)]
pub(crate) struct Inspection {
    pub target: DetectionEvent,
    pub loiter_point: Vector2<f64>,
    pub stage: Stage,
    pub since: f64,
    pub walk_time: f64,
}

/// What the mission layer sees of the world after integration.
pub(crate) struct Surroundings<'a> {
    pub now: f64,
    pub dt: f64,
    pub asv: Vector2<f64>,
    /// Towed body ground position and depth, when towing.
    pub towed: Option<(Vector2<f64>, f64)>,
    pub line_length: Option<f64>,
    pub terrain: &'a TerrainMap,
    pub hexapod_cfg: &'a HexapodConfig,
    pub tuv: &'a TuvSettings,
}

impl Surroundings<'_> {
    fn sensor_position(&self) -> Vector2<f64> {
        self.towed.map(|(p, _)| p).unwrap_or(self.asv)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct MissionRun {
    pub cfg: MissionSettings,
    pub legs: Vec<Leg>,
    pub leg: usize,
    pub phase: MissionPhase,
    pub queue: Vec<DetectionEvent>,
    pub inspection: Option<Inspection>,
    pub pattern_complete: bool,
    pub visited: Vec<PhaseKind>,
    pub detections: usize,
    pub confirmations: usize,
    pub inspections_aborted: usize,
    pub samples: usize,
    detector: SweepDetector,
    sampler: EnvironmentSampler,
    leg_boundary: bool,
    at_waypoint: bool,
}

impl MissionRun {
    pub fn new(cfg: &MissionSettings, seed: u64) -> Result<Self> {
        let pattern = generate_lawnmower(cfg.area, cfg.swath, cfg.entry)?;
        let legs = pattern.legs.iter().map(|l| l.extended(cfg.leg_overrun)).collect();
        Ok(Self {
            legs,
            leg: 0,
            phase: MissionPhase::start(),
            queue: Vec::new(),
            inspection: None,
            pattern_complete: false,
            visited: vec![PhaseKind::PreMission],
            detections: 0,
            confirmations: 0,
            inspections_aborted: 0,
            samples: 0,
            detector: SweepDetector::new(0.5 * cfg.swath, cfg.p_detect, cfg.position_sigma, cfg.objects.len(), seed)?,
            sampler: EnvironmentSampler::new(cfg.sampling, seed),
            leg_boundary: false,
            at_waypoint: false,
            cfg: cfg.clone(),
        })
    }

    pub fn kind(&self) -> PhaseKind {
        self.phase.kind
    }

    pub fn setpoint(&self, arrival_radius: f64) -> GuidanceSetpoint {
        let speed = self.cfg.cruise_speed;
        match self.phase.kind {
            PhaseKind::PreMission => GuidanceSetpoint::waypoint(self.legs[0].start, speed, arrival_radius),
            PhaseKind::WideAreaSearch => match self.legs.get(self.leg) {
                Some(l) => GuidanceSetpoint::path(l.start, l.end, speed, arrival_radius),
                None => GuidanceSetpoint::waypoint(self.cfg.base, speed, arrival_radius),
            },
            PhaseKind::DetailedInspection => {
                let p = self.inspection.as_ref().map(|i| i.loiter_point).unwrap_or(self.cfg.base);
                GuidanceSetpoint::loiter(p, speed)
            }
            PhaseKind::Retrieval | PhaseKind::Concluded => GuidanceSetpoint::waypoint(self.cfg.base, speed, arrival_radius),
        }
    }

    pub fn after_guidance(&mut self, cmd: &GuidanceCommand) {
        match self.phase.kind {
            PhaseKind::PreMission | PhaseKind::Retrieval => self.at_waypoint = cmd.arrived,
            PhaseKind::WideAreaSearch if cmd.arrived && self.leg < self.legs.len() => {
                self.leg_boundary = true;
                self.leg += 1;
                if self.leg == self.legs.len() {
                    self.pattern_complete = true;
                }
            }
            _ => {}
        }
    }

    pub fn winch_target(&self, tuv: &TuvSettings) -> f64 {
        match self.phase.kind {
            PhaseKind::PreMission | PhaseKind::WideAreaSearch => tuv.search_length,
            PhaseKind::DetailedInspection => self.cfg.inspection.tuv_standoff.min(tuv.search_length),
            PhaseKind::Retrieval | PhaseKind::Concluded => tuv.stowed_length,
        }
    }

    /// Seabed work for the current target.
    pub fn hexapod_step(
        &mut self,
        s: &Surroundings,
        hexapod: &mut Option<HexapodState>,
        events: &mut Vec<Event>,
    ) -> Result<()> {
        let icfg = self.cfg.inspection;
        let Some(insp) = self.inspection.as_mut() else {
            return Ok(());
        };
        let target = insp.target.estimated_position;
        let mut abort: Option<String> = None;
        match insp.stage {
            Stage::Station => {
                let hauled_in = s.line_length.is_none_or(|l| l <= icfg.tuv_standoff + 1e-9);
                if s.now - insp.since > icfg.reposition_timeout {
                    abort = Some("loiter point not reached".into());
                } else if (s.asv - insp.loiter_point).norm() <= icfg.station_radius && hauled_in {
                    match terrain_at(s.terrain, s.asv) {
                        Ok(ground) => {
                            let d = target - s.asv;
                            *hexapod = Some(HexapodState::new(s.asv.x, s.asv.y, d.y.atan2(d.x), ground.class, s.hexapod_cfg)?);
                            events.push(Event::HexapodDeployed {
                                t: s.now,
                                position: s.asv,
                            });
                            insp.stage = Stage::Walking;
                            insp.since = s.now;
                        }
                        Err(e) => abort = Some(e.to_string()),
                    }
                }
            }
            Stage::Walking => {
                let hex = hexapod.as_ref().expect("walking without a deployed hexapod");
                if insp.walk_time > icfg.walk_timeout {
                    abort = Some("walk timeout".into());
                } else {
                    match terrain_at(s.terrain, hex.position()) {
                        Err(e) => abort = Some(e.to_string()),
                        Ok(ground) => {
                            let step = walk_step(hex, s.hexapod_cfg, target, ground.class, &icfg, s.dt)?;
                            if let Some(fault) = step.fault {
                                abort = Some(fault.to_string());
                            } else {
                                if step.hexapod.position() != hex.position() {
                                    insp.walk_time += s.dt;
                                }
                                let pos = step.hexapod.position();
                                *hexapod = Some(step.hexapod);
                                if step.confirmed {
                                    let id = insp.target.object_id.clone();
                                    events.push(Event::Confirmation {
                                        t: s.now,
                                        object_id: id.clone(),
                                        elapsed: insp.walk_time,
                                    });
                                    events.push(Event::Marker {
                                        t: s.now,
                                        object_id: id,
                                        position: pos,
                                    });
                                    self.confirmations += 1;
                                    self.finish_target(s.now, hexapod, events, None);
                                    return Ok(());
                                } else if (pos - s.asv).norm() > icfg.tether_reach {
                                    abort = Some("tether reach exceeded".into());
                                }
                            }
                        }
                    }
                }
            }
            Stage::Done => {}
        }
        if abort.is_some() {
            self.finish_target(s.now, hexapod, events, abort);
        }
        Ok(())
    }

    fn finish_target(
        &mut self,
        now: f64,
        hexapod: &mut Option<HexapodState>,
        events: &mut Vec<Event>,
        abort: Option<String>,
    ) {
        let Some(insp) = self.inspection.as_mut() else {
            return;
        };
        if let Some(reason) = abort {
            self.inspections_aborted += 1;
            events.push(Event::InspectionAborted {
                t: now,
                object_id: insp.target.object_id.clone(),
                reason,
            });
        }
        if hexapod.take().is_some() {
            events.push(Event::HexapodRecovered { t: now });
        }
        insp.stage = Stage::Done;
    }

    pub fn detection_step(&mut self, s: &Surroundings, events: &mut Vec<Event>) {
        match (self.phase.kind, s.towed) {
            (PhaseKind::WideAreaSearch, Some((pos, _))) => {
                for d in sensor_sweep_detect(&mut self.detector, pos, &self.cfg.objects, Detector::Tuv, s.now) {
                    self.detections += 1;
                    events.push(Event::Detection {
                        t: d.timestamp,
                        object_id: d.object_id.clone(),
                        vehicle: d.vehicle,
                        estimated_position: d.estimated_position,
                    });
                    self.queue.push(d);
                }
            }
            _ => self.detector.close_passes(),
        }
    }

    /// Stage machine plus entry actions. Returns true once concluded.
    pub fn phase_step(
        &mut self,
        s: &Surroundings,
        hexapod: &mut Option<HexapodState>,
        events: &mut Vec<Event>,
    ) -> Result<bool> {
        let line_at = |len: f64| s.line_length.is_none_or(|l| (l - len).abs() <= 1e-9);
        let kind = self.phase.kind;
        let ev = WorldEvents {
            deployment_complete: kind == PhaseKind::PreMission && self.at_waypoint && line_at(s.tuv.search_length),
            leg_boundary: std::mem::take(&mut self.leg_boundary),
            pattern_complete: self.pattern_complete,
            queued_detections: self.queue.len(),
            target_done: self.inspection.as_ref().is_some_and(|i| i.stage == Stage::Done),
            vehicles_recovered: kind == PhaseKind::Retrieval
                && self.at_waypoint
                && line_at(s.tuv.stowed_length)
                && hexapod.is_none(),
        };
        let next = mission_step(&self.phase, &ev, self.cfg.trigger, s.now)?;
        if next.kind != kind {
            events.push(Event::PhaseChange {
                t: s.now,
                from: kind,
                to: next.kind,
            });
            self.phase = next;
            self.visited.push(self.phase.kind);
            self.at_waypoint = false;
            match self.phase.kind {
                PhaseKind::DetailedInspection => self.start_next_target(s, events),
                PhaseKind::WideAreaSearch | PhaseKind::Retrieval => self.inspection = None,
                _ => {}
            }
        } else if kind == PhaseKind::DetailedInspection && ev.target_done && !self.queue.is_empty() {
            self.start_next_target(s, events);
        }

        if self.phase.kind != PhaseKind::Concluded {
            let (pos, depth) = s.towed.unwrap_or((s.asv, 0.0));
            if let Some(sample) = self.sampler.sample(s.now, pos, depth) {
                self.samples += 1;
                events.push(Event::Sample(sample));
            }
        }
        Ok(self.phase.kind == PhaseKind::Concluded)
    }

    fn start_next_target(&mut self, s: &Surroundings, events: &mut Vec<Event>) {
        let Some(target) = pop_nearest(&mut self.queue, s.sensor_position()) else {
            self.inspection = None;
            return;
        };
        let reposition = needs_reposition(target.estimated_position, s.asv, &self.cfg.inspection);
        let loiter_point = if reposition { target.estimated_position } else { s.asv };
        events.push(Event::InspectionStarted {
            t: s.now,
            object_id: target.object_id.clone(),
            target: target.estimated_position,
            loiter_point,
            reposition,
        });
        self.phase.target = Some(target.clone());
        self.inspection = Some(Inspection {
            target,
            loiter_point,
            stage: Stage::Station,
            since: s.now,
            walk_time: 0.0,
        });
    }
}
