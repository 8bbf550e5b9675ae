use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coastal_search::log::Event;
use coastal_search::units::{parse_quantity, Dimension};
use coastal_search::{emit_outputs, load_scenario, read_run_dir, run_simulation, OutputFormats, RunLog, Scenario};

/// Base directory for run outputs when `--out` is not given.
const OUT_ENV: &str = "COASTAL_SIM_OUT";

#[derive(Parser)]
#[command(name = "coastal-sim", version, about = "Coastal search mission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its logs.
    Simulate {
        scenario: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the run duration, e.g. `600`, `10 min`.
        #[arg(long)]
        duration: Option<String>,
        /// Run directory. Defaults to `$COASTAL_SIM_OUT/<name>-seed<N>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of `csv,json`.
        #[arg(long, default_value = "csv,json")]
        format: OutputFormats,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
    /// Summarize a finished run directory.
    Report { run_dir: PathBuf },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Simulate {
            scenario,
            seed,
            duration,
            out,
            format,
        } => simulate(&scenario, seed, duration.as_deref(), out, format),
        Command::Validate { scenario } => match load_scenario(&scenario) {
            Ok(sc) => {
                println!("{}: ok ({} mode, seed {})", scenario.display(), sc.run.mode.as_str(), sc.run.seed);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&scenario, e),
        },
        Command::Report { run_dir } => match read_run_dir(&run_dir) {
            Ok(log) => {
                print!("{}", report(&log));
                ExitCode::SUCCESS
            }
            Err(e) => fail(&run_dir, e),
        },
    }
}

fn fail(path: &Path, e: coastal_search::Error) -> ExitCode {
    eprintln!("error: {}: {e}", path.display());
    ExitCode::FAILURE
}

fn output_dir(sc: &Scenario, scenario_path: &Path, out: Option<PathBuf>) -> PathBuf {
    if let Some(dir) = out {
        return dir;
    }
    let leaf = format!("{}-seed{}", sc.name, sc.run.seed);
    if let Some(base) = std::env::var_os(OUT_ENV) {
        return PathBuf::from(base).join(leaf);
    }
    match &sc.run.output_dir {
        Some(d) if d.is_absolute() => d.join(leaf),
        Some(d) => scenario_path.parent().unwrap_or(Path::new(".")).join(d).join(leaf),
        None => PathBuf::from("runs").join(leaf),
    }
}

fn simulate(
    path: &Path,
    seed: Option<u64>,
    duration: Option<&str>,
    out: Option<PathBuf>,
    format: OutputFormats,
) -> ExitCode {
    let mut sc = match load_scenario(path) {
        Ok(sc) => sc,
        Err(e) => return fail(path, e),
    };
    if let Some(seed) = seed {
        sc.run.seed = seed;
    }
    if let Some(d) = duration {
        match parse_quantity(d, Dimension::Time) {
            Ok(v) if v >= 0.0 => sc.run.duration = v,
            Ok(v) => {
                eprintln!("error: --duration must be >= 0, got {v}");
                return ExitCode::FAILURE;
            }
            Err(e) => {
                eprintln!("error: --duration: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    let log = match run_simulation(&sc) {
        Ok(log) => log,
        Err(e) => return fail(path, e),
    };
    let dir = output_dir(&sc, path, out);
    if let Err(e) = emit_outputs(&log, &dir, format) {
        return fail(&dir, e);
    }
    print!("{}", report(&log));
    println!("output: {}", dir.display());
    if log.is_aborted() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn report(log: &RunLog) -> String {
    let m = &log.metrics;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "run `{}` ({} mode, seed {}, dt {} s)",
        log.meta.name,
        log.meta.mode.as_str(),
        log.meta.seed,
        log.meta.dt
    );
    let status = if m.aborted {
        "aborted"
    } else if m.truncated {
        "truncated at duration cap"
    } else {
        "completed"
    };
    let _ = writeln!(s, "  status: {status} after {} steps ({:.2} s)", m.steps, m.sim_time);
    if let Some(Event::Aborted { reason, .. }) = log.events.iter().find(|e| matches!(e, Event::Aborted { .. })) {
        let _ = writeln!(s, "  abort reason: {reason}");
    }
    if let Some(p) = m.final_phase {
        let path: Vec<&str> = m.phases_visited.iter().map(|p| p.as_str()).collect();
        let _ = writeln!(s, "  final phase: {p} (via {})", path.join(" -> "));
        let _ = writeln!(
            s,
            "  detections: {}  confirmations: {}  aborted inspections: {}  samples: {}",
            m.detections, m.confirmations, m.inspections_aborted, m.samples
        );
    }
    if let Some(c) = &m.coverage {
        let _ = writeln!(
            s,
            "  coverage: {:.1} m^2 in {:.1} s active ({:.1} m^2/h), {:.1} m travelled",
            c.area_searched, c.active_time, c.area_per_hour, c.distance_traveled
        );
    }
    if let Some(st) = &m.station {
        let _ = writeln!(
            s,
            "  station keeping: {:.1}% within {} m, rms {:.2} m, max {:.2} m",
            100.0 * st.fraction_within,
            st.hold_radius,
            st.rms_error,
            st.max_error
        );
    }
    if let Some(c) = &m.cruise {
        let reach = c.time_to_speed.map_or("never".to_string(), |t| format!("{t:.2} s"));
        let _ = writeln!(
            s,
            "  cruise: command {} m/s reached {reach}, steady {:.3} m/s ({:.2}% error)",
            c.commanded,
            c.steady_state_speed,
            100.0 * c.steady_state_error
        );
    }
    if let Some(e) = &m.estimator {
        let _ = writeln!(
            s,
            "  estimator: rms position error {:.3} m, max {:.3} m, {} gated measurements",
            e.rms_position_error, e.max_position_error, e.rejected_measurements
        );
    }
    s
}
