use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qng::criteria::{
    asymptote, maximize_functional, CriterionOrder, GaussianBound, OptimizerSettings, WitnessSettings,
};
use qng::detector::{ClickProbabilities, DetectorConfig};
use qng::emitter::{
    loss_tolerance_analytic, max_duration_analytic, max_duration_first_order, max_measurement_duration,
    max_tolerated_loss, min_detectable_efficiency, min_efficiency_analytic, source_click_stats, Crossing,
    EnsembleParams, SourceMode,
};
use qng::table::{Report, ResultTable};
use qng::QngError;

/// Non-Gaussianity criteria for multi-channel click statistics.
#[derive(Debug, Parser)]
#[command(name = "qng", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gaussian bound on the success probability as a function of the error
    /// probability.
    Threshold(ThresholdArgs),
    /// Test observed click statistics against the Gaussian bound.
    Witness(WitnessArgs),
    /// Click statistics of an emitter ensemble.
    Source(SourceArgs),
    /// Threshold searches over an ensemble parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for the random optimizer starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    order: usize,
    /// Detector description (JSON); symmetric when omitted.
    #[arg(long)]
    detector: Option<PathBuf>,
    #[arg(long, default_value_t = -1e7, allow_negative_numbers = true)]
    a_min: f64,
    #[arg(long, default_value_t = -1e-3, allow_negative_numbers = true)]
    a_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["rn", "ensemble"])))]
struct WitnessArgs {
    #[arg(long)]
    order: usize,
    /// Observed success probability R_n.
    #[arg(long, requires = "rnp1")]
    rn: Option<f64>,
    /// Observed error probability R_{n+1}.
    #[arg(long, requires = "rn")]
    rnp1: Option<f64>,
    /// Ensemble parameters (JSON) to derive the statistics from.
    #[arg(long, conflicts_with = "detector")]
    ensemble: Option<PathBuf>,
    /// Source model; defaults to escape averaging when the ensemble has a
    /// finite storage time and a nonzero window, noisy otherwise.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Detector description (JSON) for explicit statistics.
    #[arg(long)]
    detector: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SourceArgs {
    #[arg(long)]
    order: usize,
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    Noisy,
    Escape,
}

impl From<Mode> for SourceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ideal => SourceMode::Ideal,
            Mode::Noisy => SourceMode::Noisy,
            Mode::Escape => SourceMode::Escape,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum SweepKind {
    /// Minimal efficiency for each criterion order in the grid.
    Eta,
    /// Minimal efficiency against the noise mean.
    Noise,
    /// Minimal transmission against the noise mean.
    Loss,
    /// Maximal measurement duration against the noise mean.
    Duration,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(value_enum)]
    kind: SweepKind,
    #[arg(long)]
    ensemble: PathBuf,
    /// `lo:hi:count` (linear) or `log:lo:hi:count`. Orders for `eta`, noise
    /// means otherwise.
    #[arg(long)]
    grid: String,
    /// Criterion order; defaults to the number of emitters.
    #[arg(long)]
    order: Option<usize>,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<QngError> for Failure {
    fn from(e: QngError) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn usage<E: ToString>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Threshold(a) => run_threshold(a),
        Command::Witness(a) => run_witness(a),
        Command::Source(a) => run_source(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("QNG_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("QNG_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_detector(path: Option<&Path>, order: CriterionOrder) -> Result<DetectorConfig, Failure> {
    let config = match path {
        Some(p) => DetectorConfig::from_json_str(&read_file(p)?)
            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => DetectorConfig::symmetric(order.channels()).map_err(usage)?,
    };
    if config.channels() != order.channels() {
        return Err(Failure::Usage(format!(
            "order {} needs {} detector channels, the configuration has {}",
            order.get(),
            order.channels(),
            config.channels()
        )));
    }
    Ok(config)
}

fn load_ensemble(path: &Path) -> Result<EnsembleParams, Failure> {
    EnsembleParams::from_json_str(&read_file(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_order(n: usize) -> Result<CriterionOrder, Failure> {
    CriterionOrder::new(n).map_err(usage)
}

fn default_mode(p: &EnsembleParams) -> SourceMode {
    if p.storage_time().is_finite() && p.window_length() > 0.0 {
        SourceMode::Escape
    } else {
        SourceMode::Noisy
    }
}

fn json_text<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn base_report(command: String, output: &Output) -> Report {
    let mut r = Report::new();
    r.meta("tool", concat!("qng ", env!("CARGO_PKG_VERSION")));
    r.meta("command", command);
    r.meta("seed", output.seed);
    r
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn emit(report: &Report, output: &Output) -> Result<(), Failure> {
    let mut bytes = Vec::new();
    match output.format {
        Format::Csv => report.write_csv(&mut bytes),
        Format::Json => report.write_json(&mut bytes),
    }
    .map_err(|e| Failure::Compute(e.to_string()))?;
    match &output.out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Compute(e.to_string())),
    }
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn run_threshold(args: ThresholdArgs) -> Result<(), Failure> {
    let order = parse_order(args.order)?;
    let config = load_detector(args.detector.as_deref(), order)?;
    let grid = qng::criteria::log_a_grid(args.a_min, args.a_max, args.points).map_err(usage)?;
    let settings = OptimizerSettings::default().with_seed(args.output.seed);

    let maxima = grid
        .par_iter()
        .map(|&a| maximize_functional(a, order, &config, &settings))
        .collect::<qng::Result<Vec<_>>>()?;

    let mut curve = ResultTable::new(
        "threshold",
        ["a", "error", "success_bound", "amp", "angle", "min_var", "at_boundary"],
    );
    for m in &maxima {
        curve.push_row(vec![
            m.a,
            m.stats.error,
            m.stats.success,
            m.state.amp(),
            m.state.angle(),
            m.state.min_var(),
            bool_value(m.at_boundary),
        ])?;
    }
    let asy = asymptote(order);
    let mut asy_table = ResultTable::new("asymptote", ["error", "success_bound"]);
    for m in maxima.iter().filter(|m| m.stats.error > 0.0) {
        asy_table.push_row(vec![m.stats.error, asy.success_bound(m.stats.error)])?;
    }

    let mut command = format!(
        "qng threshold --order {} --a-min {:e} --a-max {:e} --points {} --format {} --seed {}",
        args.order,
        args.a_min,
        args.a_max,
        args.points,
        format_name(args.output.format),
        args.output.seed
    );
    if let Some(p) = &args.detector {
        command.push_str(&format!(" --detector {}", p.display()));
    }
    let mut report = base_report(command, &args.output);
    report.meta("detector", json_text(&config));
    report.meta("asymptote_root", format!("{:?}", asy.root));
    report.meta("asymptote_coefficient", format!("{:?}", asy.coefficient));
    report.push(curve);
    report.push(asy_table);
    emit(&report, &args.output)
}

fn bound_for(order: CriterionOrder, config: DetectorConfig, seed: u64) -> Result<GaussianBound, Failure> {
    Ok(GaussianBound::new(
        order,
        config,
        OptimizerSettings::default().with_seed(seed),
        WitnessSettings::default(),
    )?)
}

fn run_witness(args: WitnessArgs) -> Result<(), Failure> {
    let order = parse_order(args.order)?;
    let mut command = format!("qng witness --order {}", args.order);
    let (stats, config, ensemble) = match (&args.ensemble, args.rn, args.rnp1) {
        (Some(path), _, _) => {
            let params = load_ensemble(path)?;
            let mode = args.mode.map_or_else(|| default_mode(&params), SourceMode::from);
            command.push_str(&format!(" --ensemble {} --mode {mode}", path.display()));
            let stats = source_click_stats(&params, order, mode)?;
            let config = DetectorConfig::symmetric(order.channels()).map_err(usage)?;
            (stats, config, Some(params))
        }
        (None, Some(rn), Some(rnp1)) => {
            let stats = ClickProbabilities::new(order.get(), rn, rnp1).map_err(usage)?;
            command.push_str(&format!(" --rn {rn:?} --rnp1 {rnp1:?}"));
            if let Some(p) = &args.detector {
                command.push_str(&format!(" --detector {}", p.display()));
            }
            let config = load_detector(args.detector.as_deref(), order)?;
            (stats, config, None)
        }
        _ => return Err(Failure::Usage("give --rn and --rnp1, or --ensemble".into())),
    };
    command.push_str(&format!(
        " --format {} --seed {}",
        format_name(args.output.format),
        args.output.seed
    ));

    let bound = bound_for(order, config.clone(), args.output.seed)?;
    let result = bound.witness(&stats)?;
    let mut table = ResultTable::new(
        "witness",
        [
            "order",
            "success",
            "error",
            "witnessed",
            "margin",
            "best_a",
            "threshold_success",
            "tolerance",
        ],
    );
    table.push_row(vec![
        order.get() as f64,
        stats.success,
        stats.error,
        bool_value(result.witnessed),
        result.margin,
        result.best_a,
        result.threshold_success,
        result.tolerance,
    ])?;
    let mut report = base_report(command, &args.output);
    report.meta("detector", json_text(&config));
    if let Some(p) = ensemble {
        report.meta("ensemble", json_text(&p));
    }
    report.push(table);
    emit(&report, &args.output)
}

fn run_source(args: SourceArgs) -> Result<(), Failure> {
    let order = parse_order(args.order)?;
    let params = load_ensemble(&args.ensemble)?;
    let mode = args.mode.map_or_else(|| default_mode(&params), SourceMode::from);
    let stats = source_click_stats(&params, order, mode)?;
    let mut table = ResultTable::new("source", ["order", "success", "error"]);
    table.push_row(vec![order.get() as f64, stats.success, stats.error])?;
    let command = format!(
        "qng source --order {} --ensemble {} --mode {mode} --format {}",
        args.order,
        args.ensemble.display(),
        format_name(args.output.format)
    );
    let mut report = base_report(command, &args.output);
    report.meta("ensemble", json_text(&params));
    report.push(table);
    emit(&report, &args.output)
}

/// Parsed `--grid` specification.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GridSpec {
    lo: f64,
    hi: f64,
    count: usize,
    log: bool,
}

impl GridSpec {
    fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        let (log, rest) = match parts.as_slice() {
            ["log", rest @ ..] => (true, rest),
            ["lin", rest @ ..] => (false, rest),
            rest => (false, rest),
        };
        let [lo, hi, count] = rest else {
            return Err(format!("grid {text:?} is not `lo:hi:count` or `log:lo:hi:count`"));
        };
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("grid {text:?}: bad number {s:?}"))
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("grid {text:?}: bad point count {count:?}"))?;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi || count == 0 {
            return Err(format!("grid {text:?} needs finite lo <= hi and at least one point"));
        }
        if count > 1 && lo == hi {
            return Err(format!("grid {text:?} repeats a single value"));
        }
        if log && lo <= 0.0 {
            return Err(format!("logarithmic grid {text:?} needs lo > 0"));
        }
        Ok(Self { lo, hi, count, log })
    }

    fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = |i: usize| i as f64 / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if self.log {
                    (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * step(i)).exp()
                } else {
                    self.lo + (self.hi - self.lo) * step(i)
                }
            })
            .collect()
    }

    fn orders(&self) -> Result<Vec<usize>, String> {
        let mut out: Vec<usize> = Vec::new();
        for v in self.values() {
            let r = v.round();
            if (v - r).abs() > 1e-9 || r < 1.0 {
                return Err(format!("order grid produced {v}, expected positive integers"));
            }
            if out.last() != Some(&(r as usize)) {
                out.push(r as usize);
            }
        }
        Ok(out)
    }
}

/// `(value, status)` with status 0 for a crossing, 1 when witnessed across
/// the whole bracket and 2 when never witnessed.
fn crossing_columns(c: Crossing) -> (f64, f64) {
    match c {
        Crossing::At(x) => (x, 0.0),
        Crossing::Always => (f64::NAN, 1.0),
        Crossing::Never => (f64::NAN, 2.0),
    }
}

fn analytic_or_nan(r: qng::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

/// Closed-form efficiency threshold with the channel loss applied to both
/// efficiency and noise.
fn efficiency_analytic(p: &EnsembleParams, nbar: f64) -> f64 {
    let t = p.transmission();
    if t == 0.0 {
        return f64::NAN;
    }
    analytic_or_nan(min_efficiency_analytic(p.emitters(), t * nbar)) / t
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let params = load_ensemble(&args.ensemble)?;
    let grid = GridSpec::parse(&args.grid).map_err(Failure::Usage)?;
    if args.kind == SweepKind::Duration && !params.storage_time().is_finite() {
        return Err(Failure::Usage("duration sweep needs a finite `tau_s`".into()));
    }
    if args.kind != SweepKind::Eta && grid.lo < 0.0 {
        return Err(Failure::Usage("noise means must be nonnegative".into()));
    }
    let m = params.emitters();
    let order = parse_order(args.order.unwrap_or(m))?;
    let seed = args.output.seed;

    let table = match args.kind {
        SweepKind::Eta => {
            let orders = grid.orders().map_err(Failure::Usage)?;
            let mut table = ResultTable::new("eta", ["order", "nbar", "eta_star", "status", "eta_analytic"]);
            for n in orders {
                let order = parse_order(n)?;
                let bound = bound_for(order, DetectorConfig::symmetric(n + 1).map_err(usage)?, seed)?;
                let (eta, status) = crossing_columns(min_detectable_efficiency(&params, &bound)?);
                let analytic = if n == m {
                    efficiency_analytic(&params, params.noise_mean())
                } else {
                    f64::NAN
                };
                table.push_row(vec![n as f64, params.noise_mean(), eta, status, analytic])?;
            }
            table
        }
        kind => {
            let bound = bound_for(order, DetectorConfig::symmetric(order.channels()).map_err(usage)?, seed)?;
            let nbars = grid.values();
            let rows = nbars
                .par_iter()
                .map(|&nbar| sweep_row(kind, &params, nbar, &bound))
                .collect::<Result<Vec<_>, Failure>>()?;
            let columns: &[&str] = match kind {
                SweepKind::Noise => &["nbar", "eta_star", "status", "eta_analytic"],
                SweepKind::Loss => &["nbar", "transmission_star", "status", "transmission_analytic"],
                _ => &[
                    "nbar",
                    "duration_star",
                    "status",
                    "duration_analytic",
                    "duration_first_order",
                    "quadratic_term",
                    "quartic_term",
                ],
            };
            let mut table = ResultTable::new(sweep_name(kind), columns.iter().copied());
            for row in rows {
                table.push_row(row)?;
            }
            table
        }
    };

    let mut command = format!(
        "qng sweep {} --ensemble {} --grid {} --format {} --seed {}",
        sweep_name(args.kind),
        args.ensemble.display(),
        args.grid,
        format_name(args.output.format),
        seed
    );
    if let Some(n) = args.order {
        command.push_str(&format!(" --order {n}"));
    }
    let mut report = base_report(command, &args.output);
    report.meta("ensemble", json_text(&params));
    if args.kind != SweepKind::Eta {
        report.meta("order", order.get());
    }
    report.push(table);
    emit(&report, &args.output)
}

fn sweep_name(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::Eta => "eta",
        SweepKind::Noise => "noise",
        SweepKind::Loss => "loss",
        SweepKind::Duration => "duration",
    }
}

fn sweep_row(kind: SweepKind, params: &EnsembleParams, nbar: f64, bound: &GaussianBound) -> Result<Vec<f64>, Failure> {
    let p = params.with_noise_mean(nbar).map_err(usage)?;
    let m = p.emitters();
    Ok(match kind {
        SweepKind::Noise | SweepKind::Eta => {
            let (eta, status) = crossing_columns(min_detectable_efficiency(&p, bound)?);
            vec![nbar, eta, status, efficiency_analytic(&p, nbar)]
        }
        SweepKind::Loss => {
            let (t, status) = crossing_columns(max_tolerated_loss(&p, bound)?);
            let analytic = analytic_or_nan(loss_tolerance_analytic(m, p.efficiency(), nbar));
            vec![nbar, t, status, analytic]
        }
        SweepKind::Duration => {
            let (t, status) = crossing_columns(max_measurement_duration(&p, bound)?);
            let tau = p.storage_time();
            let (eta, noise) = (p.transmission() * p.efficiency(), p.transmission() * nbar);
            let printed = max_duration_analytic(m, eta, noise, tau).ok();
            let first = max_duration_first_order(m, eta, noise, tau).ok();
            vec![
                nbar,
                t,
                status,
                printed.map_or(f64::NAN, |d| d.t_max),
                first.map_or(f64::NAN, |d| d.t_max),
                printed.map_or(f64::NAN, |d| d.quadratic_term),
                printed.map_or(f64::NAN, |d| d.quartic_term),
            ]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        let g = GridSpec::parse("0:1:3").unwrap();
        assert_eq!(g.values(), vec![0.0, 0.5, 1.0]);
        let g = GridSpec::parse("log:1e-4:1e-2:3").unwrap();
        let v = g.values();
        assert!((v[1] - 1e-3).abs() < 1e-15);
        assert_eq!(GridSpec::parse("1:4:4").unwrap().orders().unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(GridSpec::parse("0.5:0.5:1").unwrap().values(), vec![0.5]);
        for bad in ["1:0:3", "0:1:0", "log:0:1:3", "0:1", "a:b:c", "0:1:3:4", "1:1:3"] {
            assert!(GridSpec::parse(bad).is_err(), "{bad}");
        }
        assert!(GridSpec::parse("1:2:3").unwrap().orders().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
