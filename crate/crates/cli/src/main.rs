use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use edumetrics::literature::UnderstandingConfig;
use edumetrics::report::{
    assemble_reports, class_json, compute_student, learning_rate_json, learning_rate_report, plot_data,
    students_json, students_questions_csv, students_subsets_csv, text_summary, ReportConfig,
};
use edumetrics::simulator::{simulate_class, BehaviorKind, ProfileParams};
use edumetrics::{
    parse_event_log, parse_questionnaire_with, write_event_log, ParseOptions, QuestionnaireSpec, SrtMode,
    StudentSession,
};

const JOBS_ENV: &str = "EDUMETRICS_JOBS";

#[derive(Parser)]
#[command(name = "edumetrics", version, about = "Learning metrics from assessment event logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-student and class reports from event logs.
    Compute(ComputeArgs),
    /// Write synthetic event logs for a behavior profile.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SrtModeArg {
    View,
    Answer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct ComputeArgs {
    /// Questionnaire JSON.
    #[arg(long)]
    spec: PathBuf,
    /// Event log CSV; repeat for successive assessments (reports use the last one).
    #[arg(long, required = true)]
    events: Vec<PathBuf>,
    /// How response time is attributed; detected from the log when omitted.
    #[arg(long, value_enum)]
    srt_mode: Option<SrtModeArg>,
    /// Approval and quadrant threshold on the unit scale.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Encoding of the per-student report.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for per-student metrics (0 = one per core); EDUMETRICS_JOBS takes precedence.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    allow_any_option_count: bool,
    /// Fraction of the expected time under which an answer is a blind guess.
    #[arg(long, default_value_t = 0.25)]
    fast_fraction: f64,
    /// Understanding divisor for blind guesses.
    #[arg(long, default_value_t = 5.0)]
    blind_guess_divisor: f64,
    /// Understanding divisor for normal-time answers.
    #[arg(long, default_value_t = 1.0)]
    normal_divisor: f64,
    /// Do not print the text summary.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    /// assured, guesser, self-corrector or disordered.
    #[arg(long)]
    profile: String,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    allow_any_option_count: bool,
}

enum Failure {
    /// Bad input: syntax, validation or an unusable argument.
    Input(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Io(m) => m,
        }
    }
}

fn input_error(path: &Path, err: edumetrics::Error) -> Failure {
    Failure::Input(format!("{}: {err}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn load_spec(path: &Path, allow_any_option_count: bool) -> Result<QuestionnaireSpec, Failure> {
    let opts = ParseOptions { allow_any_option_count };
    parse_questionnaire_with(&read(path)?, opts).map_err(|e| input_error(path, e))
}

fn jobs(flag: usize) -> Result<usize, Failure> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{JOBS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(flag),
    }
}

fn compute(args: ComputeArgs) -> Result<(), Failure> {
    let spec = load_spec(&args.spec, args.allow_any_option_count)?;
    let logs = args
        .events
        .iter()
        .map(|p| parse_event_log(&read(p)?, &spec).map_err(|e| input_error(p, e)))
        .collect::<Result<Vec<Vec<StudentSession>>, Failure>>()?;

    let srt_mode = match args.srt_mode {
        Some(SrtModeArg::View) => SrtMode::ViewIntervals,
        Some(SrtModeArg::Answer) => SrtMode::AnswerIntervals,
        None => SrtMode::detect(&logs.concat()),
    };
    if !(args.fast_fraction > 0.0 && args.blind_guess_divisor > 0.0 && args.normal_divisor > 0.0) {
        return Err(Failure::Input("understanding parameters must be positive".into()));
    }
    let cfg = ReportConfig {
        srt_mode,
        threshold: args.threshold,
        understanding: UnderstandingConfig {
            blind_guess: args.blind_guess_divisor,
            normal: args.normal_divisor,
            fast_fraction: args.fast_fraction,
        },
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs(args.jobs)?)
        .build()
        .map_err(|e| Failure::Io(format!("worker pool: {e}")))?;
    let sessions = logs.last().expect("at least one events file");
    let metrics = pool
        .install(|| {
            sessions
                .par_iter()
                .map(|s| compute_student(&spec, s, &cfg))
                .collect::<edumetrics::Result<Vec<_>>>()
        })
        .map_err(|e| Failure::Input(e.to_string()))?;
    let reports = assemble_reports(&spec, metrics, &cfg).map_err(|e| Failure::Input(e.to_string()))?;

    let out = &args.out;
    match args.format {
        Format::Json => write_atomic(&out.join("students.json"), &students_json(&reports.students))?,
        Format::Csv => {
            write_atomic(&out.join("students.csv"), &students_subsets_csv(&reports.students))?;
            write_atomic(&out.join("students_questions.csv"), &students_questions_csv(&reports.students))?;
        }
    }
    write_atomic(&out.join("class.json"), &class_json(&reports.class))?;
    for (name, contents) in plot_data(&reports) {
        write_atomic(&out.join("plotdata").join(name), &contents)?;
    }
    if logs.len() > 1 {
        let rates = learning_rate_report(&spec, &logs, srt_mode).map_err(|e| Failure::Input(e.to_string()))?;
        write_atomic(&out.join("learning_rate.json"), &learning_rate_json(&rates))?;
    }
    if !args.quiet {
        print!("{}", text_summary(&reports));
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let kind: BehaviorKind = args.profile.parse().map_err(|e: edumetrics::Error| Failure::Input(e.to_string()))?;
    let spec = load_spec(&args.spec, args.allow_any_option_count)?;
    let sessions = simulate_class(kind, &ProfileParams::for_kind(kind), &spec, args.count, args.seed)
        .map_err(|e| Failure::Input(e.to_string()))?;
    write_atomic(&args.out, &write_event_log(&sessions))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute(args),
        Command::Simulate(args) => simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
