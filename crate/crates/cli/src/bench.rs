//! Sequential wall-clock benchmarking of an external solver command.
//!
//! The command template is run through `sh -c` once per
//! (instance, seed, repetition) with `{file}` and `{seed}` substituted. A run
//! that exceeds the timeout is killed and recorded as censored; nonzero exits
//! are recorded, never fatal.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use anyhow::Result;
use tetra_tsp_core::analysis::{fit_runtime_model, RuntimeModel};
use tetra_tsp_core::fmt::sig;
use tetra_tsp_core::Error;
use wait_timeout::ChildExt;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub command_template: String,
    pub seeds: Vec<u64>,
    pub repetitions: usize,
    pub timeout_seconds: f64,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.command_template.contains("{file}") {
            return Err(Error::Precondition(
                "command template must contain {file}".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::Precondition("at least one seed is required".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Precondition("repetitions must be at least 1".into()));
        }
        if !(self.timeout_seconds > 0.0 && self.timeout_seconds.is_finite()) {
            return Err(Error::Precondition(format!(
                "timeout must be a positive number of seconds, got {}",
                self.timeout_seconds
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    Exit(i32),
    /// Terminated by a signal.
    Signal,
    /// Killed at the timeout; the wall time is a lower bound.
    Timeout,
    SpawnError,
}

impl RunStatus {
    pub fn label(&self) -> String {
        match self {
            RunStatus::Ok => "ok".into(),
            RunStatus::Exit(c) => format!("exit:{c}"),
            RunStatus::Signal => "signal".into(),
            RunStatus::Timeout => "timeout".into(),
            RunStatus::SpawnError => "spawn-error".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance_name: String,
    pub big_n: usize,
    pub seed: u64,
    pub repetition: usize,
    pub wall_seconds: f64,
    pub exit_status: RunStatus,
}

/// An instance file to run on.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchInstance {
    pub name: String,
    pub big_n: usize,
    pub path: PathBuf,
}

/// Single-quotes `s` for `sh`.
pub fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

pub fn render_command(template: &str, file: &Path, seed: u64) -> String {
    template
        .replace("{file}", &shell_quote(&file.to_string_lossy()))
        .replace("{seed}", &seed.to_string())
}

fn run_once(cmd: &str, timeout: Duration) -> (f64, RunStatus) {
    let start = Instant::now();
    let child = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(_) => return (start.elapsed().as_secs_f64(), RunStatus::SpawnError),
    };
    let status = match child.wait_timeout(timeout) {
        Ok(Some(st)) => match st.code() {
            Some(0) => RunStatus::Ok,
            Some(c) => RunStatus::Exit(c),
            None => RunStatus::Signal,
        },
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            RunStatus::Timeout
        }
        Err(_) => RunStatus::SpawnError,
    };
    (start.elapsed().as_secs_f64(), status)
}

/// Runs every (instance, seed, repetition) in order, one at a time.
pub fn run_bench(config: &BenchConfig, instances: &[BenchInstance]) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let timeout = Duration::from_secs_f64(config.timeout_seconds);
    let mut out = Vec::new();
    for inst in instances {
        for &seed in &config.seeds {
            for rep in 1..=config.repetitions {
                let cmd = render_command(&config.command_template, &inst.path, seed);
                let (wall_seconds, exit_status) = run_once(&cmd, timeout);
                out.push(BenchRecord {
                    instance_name: inst.name.clone(),
                    big_n: inst.big_n,
                    seed,
                    repetition: rep,
                    wall_seconds,
                    exit_status,
                });
            }
        }
    }
    Ok(out)
}

/// Min/avg/max wall time over the successful runs of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub instance_name: String,
    pub big_n: usize,
    pub runs: usize,
    pub ok_runs: usize,
    pub min: Option<f64>,
    pub avg: Option<f64>,
    pub max: Option<f64>,
}

/// One summary per instance, in first-seen order.
pub fn summarize(records: &[BenchRecord]) -> Vec<BenchSummary> {
    let mut out: Vec<BenchSummary> = Vec::new();
    let mut times: Vec<Vec<f64>> = Vec::new();
    for r in records {
        let k = match out
            .iter()
            .position(|s| s.instance_name == r.instance_name && s.big_n == r.big_n)
        {
            Some(k) => k,
            None => {
                out.push(BenchSummary {
                    instance_name: r.instance_name.clone(),
                    big_n: r.big_n,
                    runs: 0,
                    ok_runs: 0,
                    min: None,
                    avg: None,
                    max: None,
                });
                times.push(Vec::new());
                out.len() - 1
            }
        };
        out[k].runs += 1;
        if r.exit_status == RunStatus::Ok {
            times[k].push(r.wall_seconds);
        }
    }
    for (s, t) in out.iter_mut().zip(&times) {
        s.ok_runs = t.len();
        if !t.is_empty() {
            s.min = t.iter().copied().reduce(f64::min);
            s.max = t.iter().copied().reduce(f64::max);
            s.avg = Some(t.iter().sum::<f64>() / t.len() as f64);
        }
    }
    out
}

/// Fits the exponential model to the per-instance averages, when at least
/// three instances of distinct size have successful runs.
pub fn fit_summaries(summaries: &[BenchSummary]) -> Option<RuntimeModel> {
    let pts: Vec<(f64, f64)> = summaries
        .iter()
        .filter_map(|s| s.avg.map(|a| (s.big_n as f64, a)))
        .collect();
    fit_runtime_model(&pts).ok()
}

pub const RECORD_HEADER: &str = "instance,N,seed,rep,wall_seconds,status";
pub const SUMMARY_HEADER: &str = "instance,N,runs,ok_runs,min_seconds,avg_seconds,max_seconds";

pub fn records_csv(records: &[BenchRecord]) -> String {
    let mut out = format!("{RECORD_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.instance_name,
            r.big_n,
            r.seed,
            r.repetition,
            sig(r.wall_seconds, 10),
            r.exit_status.label()
        );
    }
    out
}

pub fn summary_csv(summaries: &[BenchSummary]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "na".to_string(), |x| sig(x, 10));
    let mut out = format!("{SUMMARY_HEADER}\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.instance_name,
            s.big_n,
            s.runs,
            s.ok_runs,
            cell(s.min),
            cell(s.avg),
            cell(s.max)
        );
    }
    out
}
