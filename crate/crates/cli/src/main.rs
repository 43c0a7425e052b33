//! Command-line front door: generate waveforms, identify frames, transform
//! CSV data, run diagnostics and the converter scenario.
//!
//! Exit codes: 0 success, 2 usage, 3 degenerate data, 4 I/O or malformed
//! input files.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use psframe::frame::{
    identify_plane, unbalance_diagnostic, DegeneracyReport, FrameError, FrameMethod,
    FrameTransform,
};
use psframe::signal::{read_csv, write_csv, Phasor, PhasorSpec, SampleSeries, SignalError};
use psframe::sim::{parse_config_str, run_scenario, SimError};
use psframe::{Blade, EstimatorConfig, FrameEstimator};

#[derive(Parser)]
#[command(name = "psframe", version, about = "Reference-frame identification and transformation for unbalanced n-phase signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sampled waveform CSV from a phasor list.
    Gen(GenArgs),
    /// Identify the signal plane and rotor from two rows of a CSV.
    Identify(IdentifyArgs),
    /// Transform a CSV into frame coordinates (p, s, residuals).
    Transform(TransformArgs),
    /// Print the unbalance diagnostic of a CSV.
    Analyze(AnalyzeArgs),
    /// Emit frame coordinates and Clarke coordinates side by side.
    CompareClarke(CompareArgs),
    /// Run the converter current-loop scenario from a config file.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Comma-separated amplitude:phase pairs, e.g. 1.70:0,0.70:-2.1,1.40:2.2
    #[arg(long)]
    phases: String,
    /// Fundamental frequency in Hz.
    #[arg(long)]
    freq: f64,
    /// Sampling rate in Hz.
    #[arg(long)]
    fs: f64,
    /// Duration in seconds.
    #[arg(long)]
    dur: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IdentifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Row index of the first sample.
    #[arg(long, default_value_t = 0)]
    t1: usize,
    /// Row index of the second sample.
    #[arg(long)]
    t2: usize,
    /// Known fundamental frequency (Hz), used to classify collinear pairs
    /// spaced by half a period.
    #[arg(long)]
    freq: Option<f64>,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Use one frame (from --t1/--t2) for every row.
    #[arg(long, conflicts_with = "kappa")]
    frozen_frame: bool,
    /// Re-estimate the frame each row from samples κ apart; rows before the
    /// first estimate are dropped.
    #[arg(long)]
    kappa: Option<usize>,
    /// First sample row of the frozen frame.
    #[arg(long, default_value_t = 0)]
    t1: usize,
    /// Second sample row of the frozen frame; picked for best conditioning
    /// when omitted.
    #[arg(long)]
    t2: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    t1: usize,
    #[arg(long)]
    t2: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    t1: usize,
    #[arg(long)]
    t2: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    /// Exit 3: the data cannot identify a plane.
    Degenerate(DegeneracyReport),
    /// Exit 4: I/O failure or malformed input file.
    Io(String),
    /// Exit 1: anything else.
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> CliError {
        match e {
            FrameError::Degenerate(report) => CliError::Degenerate(report),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<SignalError> for CliError {
    fn from(e: SignalError) -> CliError {
        match e {
            SignalError::Io(_) | SignalError::Parse { .. } => CliError::Io(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> CliError {
        match e {
            SimError::Io(_) | SimError::Config { .. } => CliError::Io(e.to_string()),
            SimError::Frame(frame) => frame.into(),
            SimError::Signal(signal) => signal.into(),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

/// Key-value line with 10 significant digits.
fn kv(key: &str, value: f64) {
    println!("{key}={value:.9e}");
}

fn blade_key(prefix: &str, blade: Blade) -> String {
    let indices: Vec<usize> = blade.indices().collect();
    if indices.is_empty() {
        return format!("{prefix}_0");
    }
    let mut out = format!("{prefix}_");
    if indices.iter().all(|i| *i < 9) {
        for i in &indices {
            write!(out, "{}", i + 1).unwrap();
        }
    } else {
        let labels: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
        out.push_str(&labels.join("_"));
    }
    out
}

fn parse_phasors(arg: &str) -> Result<Vec<Phasor>, CliError> {
    arg.split(',')
        .map(|item| {
            let (amp, phase) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Other(format!("expected V:phi, got `{item}`")))?;
            let amplitude: f64 = amp
                .trim()
                .parse()
                .map_err(|_| CliError::Other(format!("bad amplitude `{amp}`")))?;
            let phase: f64 = phase
                .trim()
                .parse()
                .map_err(|_| CliError::Other(format!("bad phase `{phase}`")))?;
            Ok(Phasor::new(amplitude, phase))
        })
        .collect()
}

fn row_at(series: &SampleSeries, index: usize) -> Result<(f64, Vec<f64>), CliError> {
    if index >= series.len() {
        return Err(CliError::Io(format!(
            "row {index} out of range, file has {} rows",
            series.len()
        )));
    }
    Ok((series.timestamp(index), series.row(index).to_vec()))
}

/// Pick the partner row with the best conditioning against row `t1`.
fn best_partner(series: &SampleSeries, t1: usize) -> Result<usize, CliError> {
    let (_, v1) = row_at(series, t1)?;
    let n1: f64 = v1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut best = (t1, -1.0f64);
    for i in 0..series.len() {
        if i == t1 {
            continue;
        }
        let v2 = series.row(i);
        let n2: f64 = v2.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n1 <= 1e-12 || n2 <= 1e-12 {
            continue;
        }
        if let Ok(b) = identify_plane(&v1, v2) {
            let conditioning = b.norm() / (n1 * n2);
            if conditioning > best.1 {
                best = (i, conditioning);
            }
        }
    }
    if best.1 < 0.0 {
        return Err(CliError::Degenerate(DegeneracyReport {
            kind: psframe::DegeneracyKind::Collinear,
            conditioning: 0.0,
        }));
    }
    Ok(best.0)
}

fn frozen_frame(
    series: &SampleSeries,
    t1: usize,
    t2: Option<usize>,
) -> Result<(FrameTransform, usize, usize), CliError> {
    let t2 = match t2 {
        Some(i) => i,
        None => best_partner(series, t1)?,
    };
    let (time1, v1) = row_at(series, t1)?;
    let (time2, v2) = row_at(series, t2)?;
    let ft = FrameTransform::from_samples(&v1, &v2)?.with_source(time1, time2);
    Ok((ft, t1, t2))
}

fn print_plane_keys(b: &psframe::Multivector) {
    let n = b.sig().dim();
    for i in 0..n {
        for j in (i + 1)..n {
            let blade = Blade::from_indices(&[i, j]);
            kv(&blade_key("b", blade), b.coeff(blade));
        }
    }
}

fn print_rotor_keys(ft: &FrameTransform) {
    let rotor = ft.rotor();
    kv("r_0", rotor.coeff(Blade::SCALAR));
    let n = ft.plane().sig().dim();
    for i in 0..n {
        for j in (i + 1)..n {
            let blade = Blade::from_indices(&[i, j]);
            kv(&blade_key("r", blade), rotor.coeff(blade));
        }
    }
    // grade-4 and higher terms appear only in the n-D path; print the
    // nonzero ones
    for (blade, c) in rotor.as_multivector().terms() {
        if blade.grade() >= 4 {
            kv(&blade_key("r", blade), c);
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let phases = parse_phasors(&args.phases)?;
    let spec = PhasorSpec::from_frequency(args.freq, phases).map_err(CliError::from)?;
    if !args.dur.is_finite() || args.dur < 0.0 {
        return Err(CliError::Other(format!("duration must be non-negative, got {}", args.dur)));
    }
    let series = spec.sample_series(args.fs, args.dur)?;
    write_csv(&series, &args.out)?;
    println!("rows={}", series.len());
    Ok(())
}

fn cmd_identify(args: IdentifyArgs) -> Result<(), CliError> {
    let series = read_csv(&args.input)?;
    let (time1, v1) = row_at(&series, args.t1)?;
    let (time2, v2) = row_at(&series, args.t2)?;
    let b = match identify_plane(&v1, &v2) {
        Ok(b) => b,
        Err(FrameError::Degenerate(report)) => {
            let report = match args.freq {
                Some(hz) if hz > 0.0 => {
                    report.refined_with_period(time2 - time1, 1.0 / hz, 1e-9)
                }
                _ => report,
            };
            return Err(CliError::Degenerate(report));
        }
        Err(e) => return Err(e.into()),
    };
    let ft = FrameTransform::from_samples(&v1, &v2)?.with_source(time1, time2);

    println!("n={}", series.phase_count());
    kv("t1", time1);
    kv("t2", time2);
    let n1: f64 = v1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n2: f64 = v2.iter().map(|x| x * x).sum::<f64>().sqrt();
    kv("conditioning", b.norm() / (n1 * n2));
    print_plane_keys(&b);
    kv("theta_rad", ft.theta());
    kv("theta_deg", ft.theta().to_degrees());
    println!(
        "method={}",
        match ft.method() {
            FrameMethod::Direct3d => "direct3d",
            FrameMethod::TwoStepNd => "twostepnd",
        }
    );
    print_rotor_keys(&ft);
    Ok(())
}

fn write_transform_header(out: &mut impl Write, n: usize) -> std::io::Result<()> {
    out.write_all(b"t,p,s")?;
    for i in 1..=n.saturating_sub(2) {
        write!(out, ",res{i}")?;
    }
    out.write_all(b"\n")
}

fn cmd_transform(args: TransformArgs) -> Result<(), CliError> {
    let series = read_csv(&args.input)?;
    let n = series.phase_count();
    let file = File::create(&args.out)?;
    let mut out = BufWriter::new(file);
    write_transform_header(&mut out, n)?;

    let mut rows_written = 0usize;
    if let Some(kappa) = args.kappa {
        let cfg = EstimatorConfig {
            kappa,
            ..EstimatorConfig::default()
        };
        let mut estimator =
            FrameEstimator::new(cfg).map_err(|e| CliError::Other(e.to_string()))?;
        for (t, row) in series.rows() {
            let update = estimator
                .push_sample(t, row)
                .map_err(|e| CliError::Other(e.to_string()))?;
            if let Some(update) = update {
                let sample = update.transform.transform(row)?;
                write!(out, "{t:.16e},{:.16e},{:.16e}", sample.p, sample.s)?;
                for r in &sample.residual {
                    write!(out, ",{r:.16e}")?;
                }
                out.write_all(b"\n")?;
                rows_written += 1;
            }
        }
        if rows_written == 0 {
            return Err(CliError::Degenerate(DegeneracyReport {
                kind: psframe::DegeneracyKind::Collinear,
                conditioning: 0.0,
            }));
        }
    } else {
        let (ft, _, _) = frozen_frame(&series, args.t1, args.t2)?;
        for (t, row) in series.rows() {
            let sample = ft.transform(row)?;
            write!(out, "{t:.16e},{:.16e},{:.16e}", sample.p, sample.s)?;
            for r in &sample.residual {
                write!(out, ",{r:.16e}")?;
            }
            out.write_all(b"\n")?;
            rows_written += 1;
        }
    }
    out.flush()?;
    println!("rows={rows_written}");
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let series = read_csv(&args.input)?;
    let (ft, t1, t2) = frozen_frame(&series, args.t1, args.t2)?;
    let b = ft.plane();
    let (theta, degree) = unbalance_diagnostic(b)?;
    println!("n={}", series.phase_count());
    println!("rows={}", series.len());
    kv("t1", series.timestamp(t1));
    kv("t2", series.timestamp(t2));
    let v1 = series.row(t1);
    let v2 = series.row(t2);
    let n1: f64 = v1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n2: f64 = v2.iter().map(|x| x * x).sum::<f64>().sqrt();
    kv("conditioning", b.norm() / (n1 * n2));
    kv("theta_rad", theta);
    kv("theta_deg", theta.to_degrees());
    kv("degree", degree);
    print_plane_keys(b);
    Ok(())
}

fn cmd_compare_clarke(args: CompareArgs) -> Result<(), CliError> {
    let series = read_csv(&args.input)?;
    if series.phase_count() != 3 {
        return Err(CliError::Other(format!(
            "the Clarke baseline is three-phase, file has {} phases",
            series.phase_count()
        )));
    }
    let (ft, _, _) = frozen_frame(&series, args.t1, args.t2)?;

    let file = File::create(&args.out)?;
    let mut out = BufWriter::new(file);
    out.write_all(b"t,p,s,res,alpha,beta,zero\n")?;
    let mut sq_res = 0.0f64;
    let mut sq_zero = 0.0f64;
    for (t, row) in series.rows() {
        let sample = ft.transform(row)?;
        let clarke = psframe::clarke_transform(&[row[0], row[1], row[2]]);
        let res = sample.residual[0];
        writeln!(
            out,
            "{t:.16e},{:.16e},{:.16e},{res:.16e},{:.16e},{:.16e},{:.16e}",
            sample.p, sample.s, clarke[0], clarke[1], clarke[2]
        )?;
        sq_res += res * res;
        sq_zero += clarke[2] * clarke[2];
    }
    out.flush()?;
    let rows = series.len().max(1) as f64;
    println!("rows={}", series.len());
    kv("rms_residual", (sq_res / rows).sqrt());
    kv("rms_zero", (sq_zero / rows).sqrt());
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = parse_config_str(&text)?;
    let trace = run_scenario(&cfg)?;
    trace.write_csv(&args.out)?;
    let records = trace.records();
    println!("steps={}", records.len());
    println!(
        "frame={}",
        match cfg.frame {
            psframe::ControlFrame::Ps => "ps",
            psframe::ControlFrame::Clarke => "clarke",
        }
    );
    let horizon = cfg.duration;
    kv("rms_v0", trace.rms(0.0, horizon, |r| r.v0_clarke));
    kv("rms_residual", trace.rms(0.0, horizon, |r| r.v_frame[2]));
    if let Some(last) = records.last() {
        kv("p0_final", last.p0);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Identify(args) => cmd_identify(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::CompareClarke(args) => cmd_compare_clarke(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Degenerate(report) => {
                    println!("kind={:?}", report.kind);
                    kv("conditioning", report.conditioning);
                    eprintln!("error: degenerate sample pair ({:?})", report.kind);
                }
                CliError::Io(msg) => eprintln!("error: {msg}"),
                CliError::Other(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
