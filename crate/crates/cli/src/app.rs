//! Argument definitions and the subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tetra_tsp_core::analysis::{
    fit_runtime_model, grid_m, integrality_ratio_opts, predict_runtime, reports_to_csv,
    sandwich_applies, within, LpSource, RatioOptions, RuntimeModel, SECONDS_PER_DAY,
    SECONDS_PER_YEAR,
};
use tetra_tsp_core::fmt::sig;
use tetra_tsp_core::instances::{build_modified, build_tetrahedron, build_three_lines};
use tetra_tsp_core::oracle::held_karp_opt;
use tetra_tsp_core::subtour::{
    enumerate_subtour_lp, lp_value_bounds, solve_subtour_lp_with, SubtourOptions, CUT_VIOLATION,
    ENUMERATION_LIMIT,
};
use tetra_tsp_core::tour::{build_tstar, closed_form_opt_length, opt_length_bounds, tour_length};
use tetra_tsp_core::tsplib::{export_instance, DEFAULT_SCALE};
use tetra_tsp_core::{Error, Family, Instance, Metric, GEOM_TOL};

use crate::bench::{
    fit_summaries, records_csv, run_bench, summarize, summary_csv, BenchConfig, BenchInstance,
    RunStatus,
};
use crate::exit::ExternalFailure;
use crate::grid::parse_list;
use crate::source::{self, read_tsplib, Loaded};

#[derive(Debug, Parser)]
#[command(
    name = "tetra-tsp",
    version,
    about = "Hard Euclidean TSP instances, their optimal tours and subtour LP bounds"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Coordinate scale used for TSPLIB export and EUC_2D lengths.
    #[arg(long, global = true, default_value_t = DEFAULT_SCALE)]
    pub scale: u32,
    /// Tolerance override NAME=VALUE; names: cut, bound, oracle.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    pub tolerance: Vec<String>,
    /// Also write the command's CSV output to this file.
    #[arg(long, global = true)]
    pub csv_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Separation threshold: cuts lighter than `2 - cut` are added.
    pub cut: f64,
    /// Slack on the tour-length and LP-value sandwich checks.
    pub bound: f64,
    /// Allowed difference between the cutting-plane and enumeration LPs.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cut: CUT_VIOLATION,
            bound: GEOM_TOL,
            oracle: 1e-6,
        }
    }
}

impl Global {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for item in &self.tolerance {
            let bad =
                || Error::Precondition(format!("bad tolerance `{item}`, expected NAME=VALUE"));
            let (name, value) = item.split_once('=').ok_or_else(bad)?;
            let v: f64 = value.trim().parse().map_err(|_| bad())?;
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!(
                    "tolerance {name} must be finite and nonnegative"
                ))
                .into());
            }
            match name.trim() {
                "cut" => t.cut = v,
                "bound" => t.bound = v,
                "oracle" => t.oracle = v,
                other => {
                    return Err(Error::Precondition(format!(
                        "unknown tolerance `{other}` (known: cut, bound, oracle)"
                    ))
                    .into())
                }
            }
        }
        Ok(t)
    }

    fn write_csv(&self, csv: &str) -> Result<()> {
        if let Some(p) = &self.csv_out {
            write_file(p, csv)?;
        }
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Write a generated instance as a TSPLIB EUC_2D file.
    Generate(GenerateArgs),
    /// Optimal tour: closed form for T'(n,m), Held-Karp up to 20 vertices.
    Opt(OptArgs),
    /// Subtour LP optimum by cutting planes.
    Lp(LpArgs),
    /// Integrality ratios over a grid of T'(n,m), as CSV.
    Ratio(RatioArgs),
    /// Time an external solver command on instance files.
    Bench(BenchArgs),
    /// Fit seconds = a * b^N to measured runtimes and predict.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    /// T(n,m)
    Tetra,
    /// T'(n,m)
    TetraMod,
    /// P(n,d)
    Lines,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub family: GenFamily,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    /// Line distance for `lines`.
    #[arg(long)]
    pub d: Option<f64>,
    /// Build T'(n,m) below the size threshold (drawing only).
    #[arg(long)]
    pub force: bool,
    /// Explicit i0 for a forced T'(n,m).
    #[arg(long, requires = "force")]
    pub i0: Option<usize>,
    /// Output path; defaults to `<name>.tsp`.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// TSPLIB EUC_2D file; alternatively give --n and --m for T'(n,m).
    pub path: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub force: bool,
    #[arg(long, requires = "force")]
    pub i0: Option<usize>,
}

impl InstanceArgs {
    fn load(&self, scale: u32) -> Result<Loaded> {
        source::resolve(
            self.path.as_deref(),
            self.n,
            self.m,
            self.force,
            self.i0,
            scale,
        )
    }
}

#[derive(Debug, Args)]
pub struct OptArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Write the tour (1-based ids, one line) here.
    #[arg(long)]
    pub tour_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Also solve the LP by full enumeration (at most 16 vertices).
    #[arg(long)]
    pub oracle: bool,
    /// Write the optimal fractional solution here.
    #[arg(long)]
    pub solution_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LpChoice {
    /// Cutting-plane subtour LP.
    Cut,
    /// Objective of the explicit feasible fractional solution (an upper bound).
    Explicit,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    /// Values of n, e.g. `40,48,60` or `40..80:20`.
    #[arg(long, default_value = "")]
    pub n: String,
    /// Values of m, one per n or a single value; default ceil(2n/3)+1.
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long, value_enum, default_value_t = LpChoice::Cut)]
    pub lp: LpChoice,
    /// Additional instance files (at most 20 vertices unless generated T').
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Shell command with `{file}` and optionally `{seed}`, e.g.
    /// `concorde -s {seed} {file}`.
    #[arg(long = "command")]
    pub command_template: String,
    /// Seeds, e.g. `1..10`.
    #[arg(long, default_value = "1")]
    pub seeds: String,
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    /// Per-run timeout in seconds.
    #[arg(long, default_value_t = 86_400.0)]
    pub timeout: f64,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with an `N` column and one of `seconds`, `avg_seconds`,
    /// `wall_seconds` (rows with a non-`ok` status are skipped).
    pub data: Option<PathBuf>,
    /// Data point N:SECONDS.
    #[arg(long = "point", value_name = "N:SECONDS")]
    pub points: Vec<String>,
    /// Use the reference constants a = 0.480, b = 1.0724 instead of fitting.
    #[arg(long, conflicts_with_all = ["data", "points"])]
    pub reference: bool,
    /// Sizes to predict, e.g. `214,250,1000`.
    #[arg(long, default_value = "")]
    pub predict: String,
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    if g.scale == 0 {
        return Err(Error::Precondition("--scale must be at least 1".into()).into());
    }
    let tol = g.tolerances()?;
    match &cli.command {
        Cmd::Generate(a) => cmd_generate(g, a, out),
        Cmd::Opt(a) => cmd_opt(g, tol, a, out),
        Cmd::Lp(a) => cmd_lp(g, tol, a, out),
        Cmd::Ratio(a) => cmd_ratio(g, tol, a, out),
        Cmd::Bench(a) => cmd_bench(g, a, out),
        Cmd::Fit(a) => cmd_fit(g, a, out),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn fmt10(v: f64) -> String {
    sig(v, 10)
}

fn cmd_generate(g: &Global, a: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let need_m = || {
        a.m.ok_or_else(|| Error::Precondition("--m is required for this family".into()))
    };
    let inst = match a.family {
        GenFamily::Tetra => build_tetrahedron(a.n, need_m()?)?,
        GenFamily::TetraMod => source::modified(a.n, need_m()?, a.force, a.i0)?,
        GenFamily::Lines => {
            let d =
                a.d.ok_or_else(|| Error::Precondition("--d is required for lines".into()))?;
            build_three_lines(a.n, d)?
        }
    };
    let file = export_instance(&inst, g.scale)?;
    let path = a
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.tsp", inst.name())));
    write_file(&path, &file.render())?;
    writeln!(out, "wrote {}", path.display())?;
    writeln!(out, "name {}", inst.name())?;
    writeln!(out, "N {}", inst.len())?;
    if let Some(gamma) = inst.gamma() {
        writeln!(out, "gamma {}", fmt10(gamma))?;
    }
    if let Some(i0) = inst.i0() {
        writeln!(out, "i0 {i0}")?;
    }
    if inst.is_forced() {
        writeln!(out, "forced yes (structural results not claimed)")?;
    }
    Ok(())
}

fn structured_modified(inst: &Instance) -> Option<(usize, usize)> {
    (inst.family() == Family::TetraModified && !inst.is_forced())
        .then(|| inst.tetra_params())
        .flatten()
}

fn bound_line(
    out: &mut dyn Write,
    what: &str,
    value: f64,
    bounds: (f64, f64),
    applies: bool,
    tol: f64,
) -> Result<()> {
    writeln!(
        out,
        "{what}_bounds [{}, {}] {} (hypotheses {})",
        fmt10(bounds.0),
        fmt10(bounds.1),
        if within(value, bounds, tol) {
            "within"
        } else {
            "violated"
        },
        if applies { "hold" } else { "do not hold" }
    )?;
    Ok(())
}

fn cmd_opt(g: &Global, tol: Tolerances, a: &OptArgs, out: &mut dyn Write) -> Result<()> {
    let loaded = a.instance.load(g.scale)?;
    let inst = &loaded.inst;
    let (tour, method) = if let Some((n, m)) = structured_modified(inst) {
        let t = build_tstar(inst)?;
        let closed = closed_form_opt_length(n, m)?;
        let len = tour_length(&t, inst, Metric::ExactEuclid);
        if (len - closed).abs() > 1e-9 * closed.max(1.0) {
            return Err(Error::Numerical(format!(
                "T* has length {len} but the closed form gives {closed}"
            ))
            .into());
        }
        (t, "closed-form")
    } else {
        let r = held_karp_opt(inst, Metric::ExactEuclid).map_err(|e| match e {
            Error::SizeGuard { limit, got, .. } => Error::SizeGuard {
                what: "no exact path available: Held-Karp",
                limit,
                got,
            },
            other => other,
        })?;
        (r.tour, "held-karp")
    };
    let exact = tour_length(&tour, inst, Metric::ExactEuclid);
    writeln!(out, "instance {}", inst.name())?;
    writeln!(out, "N {}", inst.len())?;
    writeln!(out, "method {method}")?;
    writeln!(out, "length {}", fmt10(exact))?;
    let euc = loaded.euc2d(g.scale);
    writeln!(
        out,
        "euc2d_length {} (scale {})",
        tour_length(&tour, inst, euc),
        match euc {
            Metric::Euc2dRounded { scale } => scale,
            Metric::ExactEuclid => 1,
        }
    )?;
    if let Some((n, _)) = structured_modified(inst) {
        bound_line(
            out,
            "opt",
            exact,
            opt_length_bounds(n),
            sandwich_applies(inst).is_some(),
            tol.bound,
        )?;
    } else {
        writeln!(out, "opt_bounds na")?;
    }
    write!(out, "tour {}", tour.to_text())?;
    if let Some(p) = &a.tour_out {
        write_file(p, &tour.to_text())?;
    }
    Ok(())
}

fn cmd_lp(g: &Global, tol: Tolerances, a: &LpArgs, out: &mut dyn Write) -> Result<()> {
    let loaded = a.instance.load(g.scale)?;
    let inst = &loaded.inst;
    if a.oracle && inst.len() > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            what: "the enumeration LP oracle",
            limit: ENUMERATION_LIMIT,
            got: inst.len(),
        }
        .into());
    }
    let opts = SubtourOptions {
        cut_violation: tol.cut,
        ..SubtourOptions::default()
    };
    let lp = solve_subtour_lp_with(inst, Metric::ExactEuclid, opts)?;
    writeln!(out, "instance {}", inst.name())?;
    writeln!(out, "N {}", inst.len())?;
    writeln!(out, "lp_value {}", fmt10(lp.objective))?;
    writeln!(out, "cuts {}", lp.cuts.len())?;
    writeln!(out, "iterations {}", lp.lp_iterations)?;
    if let Some((n, _)) = structured_modified(inst) {
        bound_line(
            out,
            "lp",
            lp.objective,
            lp_value_bounds(n),
            sandwich_applies(inst).is_some(),
            tol.bound,
        )?;
    } else {
        writeln!(out, "lp_bounds na")?;
    }
    if a.oracle {
        let v = enumerate_subtour_lp(inst, Metric::ExactEuclid)?;
        let diff = lp.objective - v;
        writeln!(out, "oracle_value {}", fmt10(v))?;
        writeln!(out, "difference {}", sig(diff, 3))?;
        writeln!(
            out,
            "oracle_agrees {}",
            if diff.abs() <= tol.oracle {
                "yes"
            } else {
                "no"
            }
        )?;
    }
    if let Some(p) = &a.solution_out {
        write_file(p, &lp.solution.to_text())?;
    }
    Ok(())
}

fn grid_points(a: &RatioArgs) -> Result<Vec<(usize, usize)>> {
    let ns = parse_list(&a.n)?;
    let ms = match &a.m {
        None => ns.iter().map(|&n| grid_m(n)).collect(),
        Some(spec) => {
            let ms = parse_list(spec)?;
            match ms.len() {
                1 => vec![ms[0]; ns.len()],
                k if k == ns.len() => ms,
                k => {
                    return Err(Error::Precondition(format!(
                        "--m has {k} values for {} values of --n",
                        ns.len()
                    ))
                    .into())
                }
            }
        }
    };
    Ok(ns.into_iter().zip(ms).collect())
}

fn cmd_ratio(g: &Global, tol: Tolerances, a: &RatioArgs, out: &mut dyn Write) -> Result<()> {
    let opts = RatioOptions {
        lp_source: match a.lp {
            LpChoice::Cut => LpSource::CutPlane,
            LpChoice::Explicit => LpSource::ExplicitUpper,
        },
        bound_tol: tol.bound,
        subtour: SubtourOptions {
            cut_violation: tol.cut,
            ..SubtourOptions::default()
        },
    };
    let mut reports = Vec::new();
    for (n, m) in grid_points(a)? {
        let inst = build_modified(n, m)?;
        reports.push(
            integrality_ratio_opts(&inst, &opts).with_context(|| format!("at n={n}, m={m}"))?,
        );
    }
    for p in &a.files {
        let loaded = source::load_path(p, g.scale)?;
        reports.push(
            integrality_ratio_opts(&loaded.inst, &opts)
                .with_context(|| format!("for {}", p.display()))?,
        );
    }
    let csv = reports_to_csv(&reports);
    out.write_all(csv.as_bytes())?;
    g.write_csv(&csv)
}

fn cmd_bench(g: &Global, a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let seeds = parse_list(&a.seeds)?
        .into_iter()
        .map(|s| s as u64)
        .collect();
    let config = BenchConfig {
        command_template: a.command_template.clone(),
        seeds,
        repetitions: a.repetitions,
        timeout_seconds: a.timeout,
    };
    config.validate()?;
    let mut instances = Vec::new();
    for p in &a.files {
        let file = read_tsplib(p)?;
        let name = if file.name.is_empty() {
            p.file_stem()
                .map_or_else(|| "unnamed".into(), |s| s.to_string_lossy().into_owned())
        } else {
            file.name.clone()
        };
        instances.push(BenchInstance {
            name,
            big_n: file.dimension,
            path: p.clone(),
        });
    }
    let records = run_bench(&config, &instances)?;
    let csv = records_csv(&records);
    out.write_all(csv.as_bytes())?;
    g.write_csv(&csv)?;
    let summaries = summarize(&records);
    writeln!(out)?;
    out.write_all(summary_csv(&summaries).as_bytes())?;
    writeln!(out)?;
    match fit_summaries(&summaries) {
        Some(model) => write_model(out, &model)?,
        None => writeln!(
            out,
            "fit none (needs successful runs on at least 3 instances of distinct N)"
        )?,
    }
    if records.iter().all(|r| r.exit_status != RunStatus::Ok) {
        return Err(
            ExternalFailure(format!("none of the {} runs succeeded", records.len())).into(),
        );
    }
    Ok(())
}

fn write_model(out: &mut dyn Write, m: &RuntimeModel) -> Result<()> {
    writeln!(
        out,
        "fit a={} b={} residual={}",
        fmt10(m.a),
        fmt10(m.b),
        sig(m.residual, 4)
    )?;
    Ok(())
}

/// `(N, seconds)` pairs from a CSV; several rows with the same N are averaged.
pub fn read_fit_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |names: &[&str]| headers.iter().position(|h| names.contains(&h));
    let parse_err = |msg: String| Error::Parse { line: 1, msg };
    let n_col = col(&["N"]).ok_or_else(|| parse_err("no `N` column".into()))?;
    let s_col = col(&["seconds", "avg_seconds", "wall_seconds"])
        .ok_or_else(|| parse_err("no `seconds`, `avg_seconds` or `wall_seconds` column".into()))?;
    let status_col = col(&["status"]);
    let mut sums: Vec<(f64, f64, usize)> = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let row = row?;
        let line = k + 2;
        if row.iter().all(|f| f.is_empty()) {
            continue;
        }
        if status_col.is_some_and(|c| row.get(c) != Some("ok")) {
            continue;
        }
        let num = |c: usize| -> Result<f64> {
            let v = row.get(c).unwrap_or("");
            Ok(v.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("`{v}` is not a number"),
            })?)
        };
        let (n, s) = (num(n_col)?, num(s_col)?);
        match sums.iter_mut().find(|e| e.0 == n) {
            Some(e) => {
                e.1 += s;
                e.2 += 1;
            }
            None => sums.push((n, s, 1)),
        }
    }
    Ok(sums
        .into_iter()
        .map(|(n, s, k)| (n, s / k as f64))
        .collect())
}

fn cmd_fit(g: &Global, a: &FitArgs, out: &mut dyn Write) -> Result<()> {
    let model = if a.reference {
        RuntimeModel::REFERENCE
    } else {
        let mut pts = match &a.data {
            Some(p) => read_fit_csv(p)?,
            None => Vec::new(),
        };
        for p in &a.points {
            let bad = || Error::Precondition(format!("bad point `{p}`, expected N:SECONDS"));
            let (n, s) = p.split_once(':').ok_or_else(bad)?;
            pts.push((
                n.trim().parse().map_err(|_| bad())?,
                s.trim().parse().map_err(|_| bad())?,
            ));
        }
        let m = fit_runtime_model(&pts)?;
        writeln!(out, "points {}", pts.len())?;
        m
    };
    write_model(out, &model)?;
    let mut csv = String::from("N,seconds,days,years\n");
    for n in parse_list(&a.predict)? {
        let s = predict_runtime(&model, n as f64);
        let row = format!(
            "{n},{},{},{}",
            fmt10(s),
            fmt10(s / SECONDS_PER_DAY),
            fmt10(s / SECONDS_PER_YEAR)
        );
        writeln!(out, "predict {}", row.replace(',', " "))?;
        csv.push_str(&row);
        csv.push('\n');
    }
    g.write_csv(&csv)
}
