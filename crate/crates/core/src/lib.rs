pub mod asv;
pub mod control;
pub mod environment;
pub mod error;
pub mod hexapod;
pub mod log;
pub mod mission;
pub mod scenario;
pub mod sim;
pub mod tuv;
pub mod units;
pub mod world;

pub use error::{Error, Result};
pub use log::{emit_outputs, read_run_dir, OutputFormats, RunLog};
pub use scenario::{load_scenario, parse_scenario, RunMode, Scenario};
pub use sim::run_simulation;
