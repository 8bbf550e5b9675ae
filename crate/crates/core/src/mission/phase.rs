//! Mission stage machine.

use std::fmt;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::detection::DetectionEvent;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    PreMission,
    WideAreaSearch,
    DetailedInspection,
    Retrieval,
    Concluded,
}

impl PhaseKind {
    pub const ALL: [PhaseKind; 5] = [
        PhaseKind::PreMission,
        PhaseKind::WideAreaSearch,
        PhaseKind::DetailedInspection,
        PhaseKind::Retrieval,
        PhaseKind::Concluded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::PreMission => "pre_mission",
            PhaseKind::WideAreaSearch => "wide_area_search",
            PhaseKind::DetailedInspection => "detailed_inspection",
            PhaseKind::Retrieval => "retrieval",
            PhaseKind::Concluded => "concluded",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn is_active(self) -> bool {
        self != PhaseKind::Concluded
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether `from -> to` is an edge of the stage graph.
pub fn is_legal_transition(from: PhaseKind, to: PhaseKind) -> bool {
    use PhaseKind::*;
    matches!(
        (from, to),
        (PreMission, WideAreaSearch)
            | (WideAreaSearch, DetailedInspection)
            | (WideAreaSearch, Retrieval)
            | (DetailedInspection, WideAreaSearch)
            | (DetailedInspection, Retrieval)
            | (Retrieval, Concluded)
    )
}

/// When a queued detection pulls the mission out of the search pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InspectionTrigger {
    Immediate,
    #[default]
    LegBoundary,
    PatternComplete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionPhase {
    pub kind: PhaseKind,
    pub entered_at: f64,
    /// Target under inspection while in `DetailedInspection`.
    pub target: Option<DetectionEvent>,
}

impl MissionPhase {
    pub fn start() -> Self {
        Self {
            kind: PhaseKind::PreMission,
            entered_at: 0.0,
            target: None,
        }
    }

    /// Moves to `to` at time `t`, rejecting edges that are not in the graph.
    pub fn transition(&self, to: PhaseKind, t: f64) -> Result<MissionPhase> {
        if !is_legal_transition(self.kind, to) {
            return Err(Error::IllegalTransition {
                from: self.kind.to_string(),
                to: to.to_string(),
            });
        }
        if t < self.entered_at {
            return Err(Error::InvalidArgument(format!(
                "transition at t = {t} precedes phase entry at {}",
                self.entered_at
            )));
        }
        Ok(MissionPhase {
            kind: to,
            entered_at: t,
            target: None,
        })
    }
}

/// Everything the stage machine looks at in one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WorldEvents {
    pub deployment_complete: bool,
    /// The search vehicle just finished a pattern leg.
    pub leg_boundary: bool,
    pub pattern_complete: bool,
    pub queued_detections: usize,
    /// The current inspection target was confirmed or given up.
    pub target_done: bool,
    pub vehicles_recovered: bool,
}

/// Next stage for the given world events. Returns the phase unchanged when no
/// edge fires. Target selection is left to the caller.
pub fn mission_step(phase: &MissionPhase, ev: &WorldEvents, trigger: InspectionTrigger, t: f64) -> Result<MissionPhase> {
    use PhaseKind::*;
    let queued = ev.queued_detections > 0;
    let next = match phase.kind {
        PreMission if ev.deployment_complete => Some(WideAreaSearch),
        WideAreaSearch => {
            let inspect = queued
                && match trigger {
                    InspectionTrigger::Immediate => true,
                    InspectionTrigger::LegBoundary => ev.leg_boundary || ev.pattern_complete,
                    InspectionTrigger::PatternComplete => ev.pattern_complete,
                };
            if inspect {
                Some(DetailedInspection)
            } else if ev.pattern_complete && !queued {
                Some(Retrieval)
            } else {
                None
            }
        }
        // with more targets queued the inspection continues on the next one
        DetailedInspection if ev.target_done && !queued => {
            if ev.pattern_complete {
                Some(Retrieval)
            } else {
                Some(WideAreaSearch)
            }
        }
        Retrieval if ev.vehicles_recovered => Some(Concluded),
        _ => None,
    };
    match next {
        Some(to) => phase.transition(to, t),
        None => Ok(phase.clone()),
    }
}

/// Removes and returns the queued detection nearest to `from`. Ties keep
/// queue order.
pub fn pop_nearest(queue: &mut Vec<DetectionEvent>, from: Vector2<f64>) -> Option<DetectionEvent> {
    let idx = queue
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let da = (a.estimated_position - from).norm_squared();
            let db = (b.estimated_position - from).norm_squared();
            da.total_cmp(&db)
        })
        .map(|(i, _)| i)?;
    Some(queue.remove(idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mission::detection::Detector;

    fn at(kind: PhaseKind) -> MissionPhase {
        MissionPhase {
            kind,
            entered_at: 0.0,
            target: None,
        }
    }

    fn event(id: &str, x: f64, y: f64) -> DetectionEvent {
        DetectionEvent {
            object_id: id.into(),
            vehicle: Detector::Tuv,
            timestamp: 0.0,
            estimated_position: Vector2::new(x, y),
            confirmed: false,
        }
    }

    #[test]
    fn search_without_detections_goes_to_retrieval() {
        let ev = WorldEvents {
            pattern_complete: true,
            ..Default::default()
        };
        let next = mission_step(&at(PhaseKind::WideAreaSearch), &ev, InspectionTrigger::LegBoundary, 5.0).unwrap();
        assert_eq!(next.kind, PhaseKind::Retrieval);
        assert_eq!(next.entered_at, 5.0);
    }

    #[test]
    fn direct_jump_is_illegal() {
        let err = at(PhaseKind::PreMission).transition(PhaseKind::DetailedInspection, 1.0).unwrap_err();
        match err {
            Error::IllegalTransition { from, to } => {
                assert_eq!(from, "pre_mission");
                assert_eq!(to, "detailed_inspection");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn queued_detections_at_pattern_end_inspect_nearest_first() {
        let ev = WorldEvents {
            pattern_complete: true,
            queued_detections: 2,
            ..Default::default()
        };
        let next = mission_step(&at(PhaseKind::WideAreaSearch), &ev, InspectionTrigger::LegBoundary, 1.0).unwrap();
        assert_eq!(next.kind, PhaseKind::DetailedInspection);
        let mut q = vec![event("far", 30.0, 0.0), event("near", 3.0, 4.0)];
        let from = Vector2::zeros();
        let brute = q
            .iter()
            .map(|e| (e.estimated_position - from).norm())
            .fold(f64::INFINITY, f64::min);
        let first = pop_nearest(&mut q, from).unwrap();
        assert_eq!(first.object_id, "near");
        assert_eq!((first.estimated_position - from).norm(), brute);
        assert_eq!(pop_nearest(&mut q, from).unwrap().object_id, "far");
        assert!(pop_nearest(&mut q, from).is_none());
    }

    #[test]
    fn trigger_policies() {
        let mid_leg = WorldEvents {
            queued_detections: 1,
            ..Default::default()
        };
        let leg_end = WorldEvents {
            leg_boundary: true,
            ..mid_leg
        };
        let s = at(PhaseKind::WideAreaSearch);
        let kind = |ev: &WorldEvents, p| mission_step(&s, ev, p, 0.0).unwrap().kind;
        assert_eq!(kind(&mid_leg, InspectionTrigger::Immediate), PhaseKind::DetailedInspection);
        assert_eq!(kind(&mid_leg, InspectionTrigger::LegBoundary), PhaseKind::WideAreaSearch);
        assert_eq!(kind(&leg_end, InspectionTrigger::LegBoundary), PhaseKind::DetailedInspection);
        assert_eq!(kind(&leg_end, InspectionTrigger::PatternComplete), PhaseKind::WideAreaSearch);
    }

    #[test]
    fn inspection_exits() {
        let s = at(PhaseKind::DetailedInspection);
        let done = WorldEvents {
            target_done: true,
            ..Default::default()
        };
        let kind = |ev: &WorldEvents| mission_step(&s, ev, InspectionTrigger::LegBoundary, 0.0).unwrap().kind;
        assert_eq!(kind(&done), PhaseKind::WideAreaSearch);
        assert_eq!(
            kind(&WorldEvents {
                pattern_complete: true,
                ..done
            }),
            PhaseKind::Retrieval
        );
        assert_eq!(
            kind(&WorldEvents {
                queued_detections: 1,
                ..done
            }),
            PhaseKind::DetailedInspection
        );
    }

    #[test]
    fn timestamps_must_not_go_backwards() {
        let mut s = at(PhaseKind::PreMission);
        s.entered_at = 10.0;
        assert!(s.transition(PhaseKind::WideAreaSearch, 9.0).is_err());
    }

    #[test]
    fn exhaustive_transition_matrix() {
        use PhaseKind::*;
        let legal = [
            (PreMission, WideAreaSearch),
            (WideAreaSearch, DetailedInspection),
            (WideAreaSearch, Retrieval),
            (DetailedInspection, WideAreaSearch),
            (DetailedInspection, Retrieval),
            (Retrieval, Concluded),
        ];
        for from in PhaseKind::ALL {
            for to in PhaseKind::ALL {
                let ok = at(from).transition(to, 1.0).is_ok();
                assert_eq!(ok, legal.contains(&(from, to)), "{from} -> {to}");
            }
        }
    }

    #[test]
    fn every_event_combination_stays_on_the_graph() {
        for from in PhaseKind::ALL {
            for bits in 0u32..64 {
                let ev = WorldEvents {
                    deployment_complete: bits & 1 != 0,
                    leg_boundary: bits & 2 != 0,
                    pattern_complete: bits & 4 != 0,
                    queued_detections: ((bits >> 3) & 1) as usize,
                    target_done: bits & 16 != 0,
                    vehicles_recovered: bits & 32 != 0,
                };
                for trig in [
                    InspectionTrigger::Immediate,
                    InspectionTrigger::LegBoundary,
                    InspectionTrigger::PatternComplete,
                ] {
                    let next = mission_step(&at(from), &ev, trig, 1.0).unwrap();
                    assert!(next.kind == from || is_legal_transition(from, next.kind));
                }
            }
        }
    }
}
