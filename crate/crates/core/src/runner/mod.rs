//! Experiment configs, the job dispatcher, surveys and the result cache.

pub mod cache;
mod jobs;
pub mod record;
pub mod survey;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fourier::MAX_TUPLES;
use crate::io::{parse_range, parse_set_value, read_set_file};
use crate::set::ElemSet;
use crate::subgroup::DEFAULT_ENUMERATION_BOUND;
use cache::{resolve_cache_dir, PhiCache};
pub use record::{parse_record, NdjsonSink, Record, RecordKind, RecordSink, Status, RECORD_SCHEMA};

pub const CONFIG_SCHEMA: &str = "sumavoid.config/1";

fn default_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Solver node limit per φ computation.
    #[serde(default)]
    pub node_limit: Option<u64>,
    /// Limit on `|H|^k` for Fourier enumerations.
    #[serde(default = "default_tuple_limit")]
    pub tuple_limit: u64,
    #[serde(default = "default_bound")]
    pub enumeration_bound: usize,
}

fn default_tuple_limit() -> u64 {
    MAX_TUPLES
}

fn default_bound() -> usize {
    DEFAULT_ENUMERATION_BOUND
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { node_limit: None, tuple_limit: MAX_TUPLES, enumeration_bound: DEFAULT_ENUMERATION_BOUND }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub threads: usize,
    #[serde(default)]
    pub budgets: Budgets,
    /// NDJSON output file, in addition to the caller's sink.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub jobs: Vec<Job>,
}

impl ExperimentConfig {
    pub fn single(job: Job) -> Self {
        ExperimentConfig {
            schema: default_schema(),
            seed: 0,
            threads: 1,
            budgets: Budgets::default(),
            output: None,
            cache: None,
            jobs: vec![job],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::usage(format!("unsupported config schema {:?}, expected {CONFIG_SCHEMA}", self.schema)));
        }
        if self.jobs.is_empty() {
            return Err(Error::usage("config has no jobs"));
        }
        if self.threads == 0 {
            return Err(Error::usage("threads must be at least 1"));
        }
        if self.budgets.tuple_limit > MAX_TUPLES {
            return Err(Error::usage(format!("tuple_limit may not exceed {MAX_TUPLES}")));
        }
        Ok(())
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::usage(format!("invalid config: {e}")))?;
    c.validate()?;
    Ok(c)
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// An integer or a range such as `"4..12"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeArg {
    Int(u32),
    Text(String),
}

impl RangeArg {
    pub fn values(&self) -> Result<Vec<u32>> {
        match self {
            RangeArg::Int(v) => Ok(vec![*v]),
            RangeArg::Text(t) => Ok(parse_range(t)?.collect()),
        }
    }
}

/// A set file on disk or an inline set document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSource {
    File { file: PathBuf },
    Inline(serde_json::Value),
}

impl SetSource {
    pub fn inline(set: &ElemSet) -> Self {
        SetSource::Inline(crate::io::set_value(set))
    }

    pub fn load(&self, base: Option<&Path>) -> Result<ElemSet> {
        match self {
            SetSource::File { file } => match base {
                Some(b) if file.is_relative() => read_set_file(&b.join(file)),
                _ => read_set_file(file),
            },
            SetSource::Inline(v) => parse_set_value(v),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructKind {
    Counter,
    Mersenne,
    Sidon,
    Interval,
    Coset,
    Union,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourierMode {
    Dft,
    Doubling,
    Gap,
    Lambda,
    CountM,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurveyModeArg {
    #[default]
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Job {
    Phi {
        set: SetSource,
        at_most: Option<usize>,
        #[serde(default)]
        witness: bool,
    },
    Classify {
        set: SetSource,
    },
    Construct {
        kind: ConstructKind,
        /// counter, interval: exponent or interval length.
        n: Option<RangeArg>,
        /// mersenne: `k` with `2^(k-1) - 1` prime.
        k: Option<RangeArg>,
        /// mersenne: the factor group `H`.
        h: Option<String>,
        /// sidon, coset, union: ambient group.
        group: Option<String>,
        /// sidon: stop at this size.
        target: Option<usize>,
        seed: Option<RangeArg>,
        /// coset: fraction of `x + H` kept.
        density: Option<f64>,
        /// coset: generators of `H`.
        gens: Option<String>,
        /// coset: the translate `x`.
        x: Option<String>,
        /// union: one generator list per subgroup.
        subgroups: Option<Vec<String>>,
        #[serde(default)]
        check: bool,
    },
    Cover {
        set: SetSource,
        k: usize,
        c_max: Option<String>,
    },
    OddProbe {
        set: SetSource,
        eps: f64,
    },
    Fourier {
        mode: FourierMode,
        set: Option<SetSource>,
        /// Subgroup to analyse on; the whole group by default.
        h: Option<SetSource>,
        /// Group for random-function runs without a set.
        group: Option<String>,
        k: Option<usize>,
        horizon: Option<u32>,
        eps1: Option<f64>,
        samples: Option<usize>,
        seed: Option<u64>,
    },
    SurveyPhi1 {
        group: String,
    },
    SurveyErdos {
        group: String,
        k: usize,
        #[serde(default)]
        min_size: usize,
        #[serde(default)]
        mode: SurveyModeArg,
        samples: Option<usize>,
        seed: Option<u64>,
        #[serde(default)]
        include: Vec<SetSource>,
        #[serde(default)]
        with_cover: bool,
    },
    TorsionFree {
        n: RangeArg,
    },
}

impl Job {
    pub fn op(&self) -> &'static str {
        match self {
            Job::Phi { .. } => "phi",
            Job::Classify { .. } => "classify",
            Job::Construct { .. } => "construct",
            Job::Cover { .. } => "cover",
            Job::OddProbe { .. } => "odd-probe",
            Job::Fourier { .. } => "fourier",
            Job::SurveyPhi1 { .. } => "survey-phi1",
            Job::SurveyErdos { .. } => "survey-erdos",
            Job::TorsionFree { .. } => "torsion-free",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Directory that relative set-file paths are resolved against.
    pub base_dir: Option<PathBuf>,
    /// Cache directory; `SUMAVOID_CACHE` still takes precedence.
    pub cache_dir: Option<PathBuf>,
    /// Attach `elapsed_ms` to each job's summary record.
    pub timings: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub jobs: usize,
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub budget_exhausted: usize,
    pub capability_errors: usize,
}

impl RunSummary {
    /// 0 when everything passed, 1 on a failed check, 3 on budget or
    /// capability limits.
    pub fn exit_code(&self) -> i32 {
        if self.failed > 0 {
            1
        } else if self.budget_exhausted + self.capability_errors > 0 {
            3
        } else {
            0
        }
    }

    fn count(&mut self, r: &Record) {
        self.records += 1;
        match r.status {
            Status::Pass => self.passed += 1,
            Status::Fail => self.failed += 1,
            _ => {}
        }
    }
}

pub(crate) struct Ctx<'a> {
    pub config: &'a ExperimentConfig,
    pub base: Option<&'a Path>,
    pub cache: Option<&'a PhiCache>,
}

/// Runs every job in order, streaming records to `sink` (and to the
/// config's output file, if any). Usage errors abort the run; failed
/// checks, budget stops and capability limits are recorded and the run
/// continues.
pub fn run(config: &ExperimentConfig, opts: &RunOptions, sink: &mut dyn RecordSink) -> Result<RunSummary> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::usage(format!("cannot start {} threads: {e}", config.threads)))?;
    let cache_dir = resolve_cache_dir(opts.cache_dir.as_deref().or(config.cache.as_deref()));
    let cache = cache_dir.as_deref().map(PhiCache::open).transpose()?;
    let mut file_sink = match &config.output {
        Some(p) => {
            let p = match &opts.base_dir {
                Some(b) if p.is_relative() => b.join(p),
                _ => p.clone(),
            };
            Some(NdjsonSink(std::io::BufWriter::new(std::fs::File::create(p)?)))
        }
        None => None,
    };
    let ctx = Ctx { config, base: opts.base_dir.as_deref(), cache: cache.as_ref() };
    let mut summary = RunSummary { jobs: config.jobs.len(), ..Default::default() };
    let mut emit = |r: &Record, summary: &mut RunSummary| -> Result<()> {
        summary.count(r);
        sink.emit(r)?;
        if let Some(f) = file_sink.as_mut() {
            f.emit(r)?;
        }
        Ok(())
    };

    for (i, job) in config.jobs.iter().enumerate() {
        let start = Instant::now();
        let outcome = pool.install(|| jobs::run_job(&ctx, i, job));
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(mut records) => {
                if opts.timings {
                    if let Some(last) = records.last_mut() {
                        last.elapsed_ms = Some(elapsed);
                    }
                }
                for r in &records {
                    emit(r, &mut summary)?;
                }
            }
            Err(Error::Budget { nodes, best }) => {
                summary.budget_exhausted += 1;
                let data = json!({ "nodes": nodes, "best": best, "partial": true });
                emit(&Record::new(i, job.op(), RecordKind::Error, Status::Budget, data), &mut summary)?;
            }
            Err(e @ Error::Capability(_)) => {
                summary.capability_errors += 1;
                let data = json!({ "error": e.to_string() });
                emit(&Record::new(i, job.op(), RecordKind::Error, Status::Error, data), &mut summary)?;
            }
            Err(e @ Error::Claim(_)) => {
                let data = json!({ "error": e.to_string() });
                emit(&Record::new(i, job.op(), RecordKind::Error, Status::Fail, data), &mut summary)?;
            }
            Err(e) => {
                let data = json!({ "error": e.to_string() });
                emit(&Record::new(i, job.op(), RecordKind::Error, Status::Error, data), &mut summary)?;
                return Err(e);
            }
        }
    }
    let mut data = serde_json::to_value(&summary)?;
    if let Some(c) = &cache {
        data["cache"] = serde_json::to_value(c.stats())?;
    }
    let status = if summary.failed > 0 { Status::Fail } else { Status::Ok };
    let end = Record::new(config.jobs.len(), "run", RecordKind::Summary, status, data);
    summary.records += 1;
    sink.emit(&end)?;
    if let Some(f) = file_sink.as_mut() {
        f.emit(&end)?;
        std::io::Write::flush(&mut f.0)?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(jobs: &str) -> String {
        format!(r#"{{"schema": "{CONFIG_SCHEMA}", "seed": 7, "jobs": {jobs}}}"#)
    }

    #[test]
    fn empty_and_malformed_configs_are_usage_errors() {
        assert!(matches!(parse_config(&config("[]")), Err(Error::Usage(_))));
        assert!(matches!(parse_config("{}"), Err(Error::Usage(_))));
        assert!(matches!(parse_config(r#"{"jobs": [{"op": "nope"}]}"#), Err(Error::Usage(_))));
        assert!(matches!(
            parse_config(r#"{"jobs": [{"op": "survey-phi1", "group": "4", "extra": 1}]}"#),
            Err(Error::Usage(_))
        ));
        assert!(matches!(parse_config(r#"{"bogus": 1, "jobs": []}"#), Err(Error::Usage(_))));
        let c = parse_config(r#"{"jobs": [{"op": "survey-phi1", "group": "4"}]}"#).unwrap();
        assert_eq!(c.threads, 1);
    }

    #[test]
    fn counter_family_passes() {
        let c =
            parse_config(&config(r#"[{"op": "construct", "kind": "counter", "n": "4..12", "check": true}]"#)).unwrap();
        let mut out: Vec<Record> = Vec::new();
        let s = run(&c, &RunOptions::default(), &mut out).unwrap();
        let results: Vec<_> = out.iter().filter(|r| r.kind == RecordKind::Result).collect();
        assert_eq!(results.len(), 9);
        assert!(results.iter().all(|r| r.status == Status::Pass));
        assert_eq!(s.exit_code(), 0);
        assert_eq!(s.passed, 9);
    }

    #[test]
    fn phi1_survey_emits_every_subset() {
        let c = parse_config(&config(r#"[{"op": "survey-phi1", "group": "8"}]"#)).unwrap();
        let mut out: Vec<Record> = Vec::new();
        run(&c, &RunOptions::default(), &mut out).unwrap();
        assert_eq!(out.iter().filter(|r| r.kind == RecordKind::Result).count(), 256);
        let summary = out.iter().find(|r| r.kind == RecordKind::Summary && r.op == "survey-phi1").unwrap();
        assert_eq!(summary.data["subsets"], 256);
        assert_eq!(summary.data["inconsistent"], 0);
    }

    #[test]
    fn identical_configs_reproduce_identical_payloads() {
        let jobs = r#"[
            {"op": "construct", "kind": "sidon", "group": "31", "seed": "0..3", "check": true},
            {"op": "survey-erdos", "group": "16", "k": 5, "min_size": 3, "samples": 40},
            {"op": "fourier", "mode": "lambda", "group": "7", "k": 3, "samples": 5},
            {"op": "phi", "set": {"group": [16], "elements": [1, 2, 4, 5, 9, 10, 13]}, "witness": true}
        ]"#;
        let c = parse_config(&config(jobs)).unwrap();
        let lines = |threads: usize| {
            let mut c = c.clone();
            c.threads = threads;
            let mut out: Vec<Record> = Vec::new();
            run(&c, &RunOptions { timings: true, ..Default::default() }, &mut out).unwrap();
            out.iter().map(|r| r.payload().to_line()).collect::<Vec<_>>()
        };
        let first = lines(1);
        assert_eq!(first, lines(1));
        assert_eq!(first, lines(3));
    }

    #[test]
    fn budget_stop_is_flagged_and_run_continues() {
        let mut c = parse_config(&config(
            r#"[{"op": "phi", "set": {"group": [40], "elements": [1,3,4,7,9,11,12,16,17,20,23,25,28,31,33,36,39]}},
                {"op": "survey-phi1", "group": "3"}]"#,
        ))
        .unwrap();
        c.budgets.node_limit = Some(1);
        let mut out: Vec<Record> = Vec::new();
        let s = run(&c, &RunOptions::default(), &mut out).unwrap();
        assert_eq!(out[0].status, Status::Budget);
        assert_eq!(out[0].data["partial"], true);
        assert_eq!(s.budget_exhausted, 1);
        assert_eq!(s.exit_code(), 3);
        assert!(out.iter().any(|r| r.op == "survey-phi1"));
    }

    #[test]
    fn output_file_and_cache() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = parse_config(&config(r#"[{"op": "survey-phi1", "group": "4"}]"#)).unwrap();
        c.output = Some("out.ndjson".into());
        let opts =
            RunOptions { base_dir: Some(dir.path().into()), cache_dir: Some(dir.path().join("cache")), timings: false };
        let mut out: Vec<Record> = Vec::new();
        run(&c, &opts, &mut out).unwrap();
        let text = std::fs::read_to_string(dir.path().join("out.ndjson")).unwrap();
        let parsed: Vec<Record> = text.lines().map(|l| parse_record(l).unwrap()).collect();
        assert_eq!(parsed, out);
        if std::env::var_os(cache::CACHE_ENV).is_none() {
            assert!(dir.path().join("cache").join(cache::CACHE_FILE).exists());
        }
    }
}
