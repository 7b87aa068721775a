use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use sumavoid::io::{parse_set_value, write_set_file};
use sumavoid::runner::record::render_text;
use sumavoid::runner::{
    read_config, run, ConstructKind, ExperimentConfig, FourierMode, Job, RangeArg, Record, RecordKind, RecordSink,
    RunOptions, RunSummary, SetSource, SurveyModeArg,
};
use sumavoid::{Error, Result};

/// Exact computations on sum-avoiding subsets of finite abelian groups.
#[derive(Parser)]
#[command(name = "sumavoid", version)]
struct Cli {
    /// Emit newline-delimited JSON records.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Result cache directory (SUMAVOID_CACHE takes precedence).
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Node limit for each exact search.
    #[arg(long, global = true, value_name = "N")]
    budget_nodes: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact phi(A), or the decision phi(A) <= K.
    Phi {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_name = "K")]
        at_most: Option<usize>,
        #[arg(long)]
        witness: bool,
    },
    /// Match a set against the phi = 1 templates.
    Classify {
        #[arg(long)]
        set: PathBuf,
    },
    /// Build a named construction and optionally check its claimed properties.
    Construct(ConstructArgs),
    /// Best subgroup cover with at most K subgroups.
    Cover {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_name = "C")]
        cmax: Option<String>,
    },
    /// Density and zero-sum report against the densest subgroups.
    OddProbe {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Fourier transforms, the doubling statistic and the multilinear form.
    Fourier(FourierArgs),
    #[command(subcommand)]
    Survey(SurveyCommand),
    /// Run every job of an experiment config.
    Run { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Counter,
    Mersenne,
    Sidon,
    Interval,
    Coset,
    Union,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: KindArg,
    /// Exponent (counter) or length (interval); a value or range like 4..12.
    #[arg(long)]
    n: Option<String>,
    /// Mersenne parameter; a value or range.
    #[arg(long)]
    k: Option<String>,
    /// Mersenne factor group, e.g. 3 or 2x2.
    #[arg(long)]
    h: Option<String>,
    /// Ambient group for sidon, coset and union.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    target: Option<usize>,
    /// Seeds for sidon and coset; a value or range.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    density: Option<f64>,
    /// Generators of H for coset, e.g. "4" or "(1,0);(0,2)".
    #[arg(long)]
    gens: Option<String>,
    #[arg(long)]
    x: Option<String>,
    /// Generators of one subgroup for union; repeat per subgroup.
    #[arg(long = "subgroup")]
    subgroups: Vec<String>,
    #[arg(long)]
    check: bool,
    /// Write the constructed set; ranges get a numeric suffix per item.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FourierModeArg {
    Dft,
    Doubling,
    Gap,
    Lambda,
    CountM,
}

#[derive(Args)]
struct FourierArgs {
    #[arg(value_enum)]
    mode: FourierModeArg,
    #[arg(long)]
    set: Option<PathBuf>,
    /// Subgroup set file; the whole group by default.
    #[arg(long)]
    h: Option<PathBuf>,
    /// Group for random-function lambda runs.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum SurveyCommand {
    /// Classify every subset of a small group.
    Phi1 {
        #[arg(long)]
        group: String,
    },
    /// Zero-sum pairs among sets with phi(A) < K.
    Erdos {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        min_size: usize,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long)]
        samples: Option<usize>,
        /// Set files examined in addition to the sweep.
        #[arg(long)]
        include: Vec<PathBuf>,
        #[arg(long)]
        with_cover: bool,
    },
    /// phi({1..N}) inside a wraparound-free cyclic group.
    TorsionFree {
        #[arg(long)]
        n: String,
    },
}

fn file(p: &Path) -> SetSource {
    SetSource::File { file: p.to_path_buf() }
}

fn range(v: Option<String>) -> Option<RangeArg> {
    v.map(RangeArg::Text)
}

fn build_job(cmd: Command, seed: Option<u64>) -> Job {
    match cmd {
        Command::Phi { set, at_most, witness } => Job::Phi { set: file(&set), at_most, witness },
        Command::Classify { set } => Job::Classify { set: file(&set) },
        Command::Construct(a) => Job::Construct {
            kind: match a.kind {
                KindArg::Counter => ConstructKind::Counter,
                KindArg::Mersenne => ConstructKind::Mersenne,
                KindArg::Sidon => ConstructKind::Sidon,
                KindArg::Interval => ConstructKind::Interval,
                KindArg::Coset => ConstructKind::Coset,
                KindArg::Union => ConstructKind::Union,
            },
            n: range(a.n),
            k: range(a.k),
            h: a.h,
            group: a.group,
            target: a.target,
            seed: range(a.seeds).or(seed.map(|s| RangeArg::Text(s.to_string()))),
            density: a.density,
            gens: a.gens,
            x: a.x,
            subgroups: (!a.subgroups.is_empty()).then_some(a.subgroups),
            check: a.check,
        },
        Command::Cover { set, k, cmax } => Job::Cover { set: file(&set), k, c_max: cmax },
        Command::OddProbe { set, eps } => Job::OddProbe { set: file(&set), eps },
        Command::Fourier(a) => Job::Fourier {
            mode: match a.mode {
                FourierModeArg::Dft => FourierMode::Dft,
                FourierModeArg::Doubling => FourierMode::Doubling,
                FourierModeArg::Gap => FourierMode::Gap,
                FourierModeArg::Lambda => FourierMode::Lambda,
                FourierModeArg::CountM => FourierMode::CountM,
            },
            set: a.set.as_deref().map(file),
            h: a.h.as_deref().map(file),
            group: a.group,
            k: a.k,
            horizon: a.horizon,
            eps1: a.eps1,
            samples: a.samples,
            seed,
        },
        Command::Survey(SurveyCommand::Phi1 { group }) => Job::SurveyPhi1 { group },
        Command::Survey(SurveyCommand::Erdos { group, k, min_size, mode, samples, include, with_cover }) => {
            Job::SurveyErdos {
                group,
                k,
                min_size,
                mode: match mode {
                    ModeArg::Auto => SurveyModeArg::Auto,
                    ModeArg::Exhaustive => SurveyModeArg::Exhaustive,
                    ModeArg::Sampled => SurveyModeArg::Sampled,
                },
                samples,
                seed,
                include: include.iter().map(|p| file(p)).collect(),
                with_cover,
            }
        }
        Command::Survey(SurveyCommand::TorsionFree { n }) => Job::TorsionFree { n: RangeArg::Text(n) },
        Command::Run { .. } => unreachable!("handled by the caller"),
    }
}

struct Printer {
    json: bool,
    /// Set files to write from construct results, in order.
    out: Option<PathBuf>,
    written: usize,
    stdout: std::io::StdoutLock<'static>,
}

impl Printer {
    fn write_set(&mut self, r: &Record) -> Result<()> {
        let (Some(base), RecordKind::Result) = (&self.out, r.kind) else { return Ok(()) };
        let Some(set) = r.data.get("set") else { return Ok(()) };
        let path = if self.written == 0 {
            base.clone()
        } else {
            let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("set");
            let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("json");
            base.with_file_name(format!("{stem}-{}.{ext}", self.written))
        };
        write_set_file(&path, &parse_set_value(set)?)?;
        self.written += 1;
        Ok(())
    }
}

impl RecordSink for Printer {
    fn emit(&mut self, r: &Record) -> Result<()> {
        self.write_set(r)?;
        if self.json {
            writeln!(self.stdout, "{}", r.to_line())?;
        } else {
            writeln!(self.stdout, "{}", render_text(r))?;
        }
        if r.status == sumavoid::runner::Status::Fail {
            eprintln!("CLAIM CHECK FAILED: job {} ({}) {}", r.job, r.op, compact(&r.data));
        }
        Ok(())
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 400 {
        format!("{}...", &s[..400])
    } else {
        s
    }
}

fn execute(cli: Cli) -> Result<RunSummary> {
    let (mut config, base_dir, out) = match cli.command {
        Command::Run { config } => {
            let c = read_config(&config)?;
            (c, config.parent().map(Path::to_path_buf), None)
        }
        Command::Construct(a) => {
            let out = a.out.clone();
            (ExperimentConfig::single(build_job(Command::Construct(a), cli.seed)), None, out)
        }
        cmd => (ExperimentConfig::single(build_job(cmd, cli.seed)), None, None),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(t) = cli.threads {
        config.threads = t;
    }
    if let Some(n) = cli.budget_nodes {
        config.budgets.node_limit = Some(n);
    }
    let opts = RunOptions { base_dir, cache_dir: cli.cache, timings: true };
    let mut printer = Printer { json: cli.json, out, written: 0, stdout: std::io::stdout().lock() };
    run(&config, &opts, &mut printer)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(summary) => ExitCode::from(summary.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Claim(_)) {
                eprintln!("CLAIM CHECK FAILED");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
