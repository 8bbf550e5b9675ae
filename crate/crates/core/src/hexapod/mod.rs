//! Seabed hexapod: leg kinematics, gait trajectories and body locomotion.

pub mod gait;
pub mod kinematics;
pub mod locomotion;

pub use gait::{gait_foot_position, tripod_schedule, GaitPhase, LegPhase, TripodSchedule};
pub use kinematics::{leg_fk, leg_ik, JointLimits, KneeBranch, LegConfiguration, LegGeometry};
pub use locomotion::{body_advance, Advance, HexapodConfig, HexapodState, TerrainSpeeds};
