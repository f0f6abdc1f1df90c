//! The `gca` command line: TOML job files in, JSON-lines certificates out.
//!
//! A job file holds one or more `[[job]]` tables:
//!
//! ```toml
//! [[job]]
//! name = "shift"
//! universe = { kind = "free-abelian", rank = 1 }
//! alphabet = { kind = "vector", p = 2, dim = 1 }
//! rule = { memory = [[1]], kind = "linear", data = [1] }
//! params = { max_radius = 3 }
//! ```
//!
//! Rules may list their memory in any order; the body follows that order.
//! Ring elements (`ring = { p, n, support = [{ element, entries }] }`) feed
//! `phi`, `left-inverse` and `stable-finite`; `sweep` reads `memory`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabets::{decode_pattern, encode_pattern, pow_count, Alphabet, TABLE_CAP};
use crate::ca::CellularAutomaton;
use crate::deciders::{self, default_max_n, Limits};
use crate::error::{GcaError, Result};
use crate::group_ring::{self, GroupRingMatrix};
use crate::groups::{FiniteSubset, GroupElement, GroupUniverse};
use crate::records::{AlphabetSpec, BodyKind, RingRecord, RuleRecord, UniverseSpec};
use crate::replay::{replay, Subject};
use crate::verdict::{Status, Verdict};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_MAX_RADIUS: usize = 4;
const DEFAULT_PERIOD_BOUND: u64 = 6;
const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_radius: Option<usize>,
    /// Window for `goe`; defaults to `ball(window_radius)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<GroupElement>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_radius: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub universe: UniverseSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<AlphabetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<Vec<GroupElement>>,
    #[serde(default)]
    pub params: JobParams,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub job: Vec<Job>,
}

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: JobConfig = toml::from_str(text).map_err(|e| GcaError::Config(e.to_string()))?;
        if cfg.job.is_empty() {
            return Err(GcaError::Config("no [[job]] tables".into()));
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobError {
    pub kind: String,
    pub message: String,
}

impl From<&GcaError> for JobError {
    fn from(e: &GcaError) -> Self {
        JobError { kind: e.kind().to_string(), message: e.to_string() }
    }
}

/// One line of output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub tool_version: String,
    pub command: String,
    pub job: Job,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<JobError>,
    pub duration_ms: u64,
}

impl CertificateRecord {
    pub fn exit_code(&self) -> i32 {
        match &self.verdict {
            Some(v) => v.status.exit_code(),
            None => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckInjective,
    RefuteInjective,
    CheckSurjective,
    Goe,
    Invert,
    PreInjective,
    PostSurjective,
    Exact1d,
    Sweep,
    Phi,
    LeftInverse,
    StableFinite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckInjective => "check-injective",
            Command::RefuteInjective => "refute-injective",
            Command::CheckSurjective => "check-surjective",
            Command::Goe => "goe",
            Command::Invert => "invert",
            Command::PreInjective => "pre-injective",
            Command::PostSurjective => "post-surjective",
            Command::Exact1d => "exact-1d",
            Command::Sweep => "sweep",
            Command::Phi => "phi",
            Command::LeftInverse => "left-inverse",
            Command::StableFinite => "stable-finite",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::value_variants().iter().copied().find(|c| c.name() == name)
    }
}

/// Flag values; job `params` take precedence over these.
#[derive(Clone, Debug, PartialEq, Eq, clap::Args)]
pub struct Flags {
    /// Largest radius for inverse, preimage, left-inverse and window searches.
    #[arg(long, default_value_t = DEFAULT_MAX_RADIUS)]
    pub max_radius: usize,
    /// Largest n for V_n escalation [default: 6 on Z, 3 on Z^d, 4 otherwise].
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Largest lattice index searched for periodic collisions.
    #[arg(long, default_value_t = DEFAULT_PERIOD_BOUND)]
    pub period_bound: u64,
    /// Largest number of candidate rules examined by a sweep.
    #[arg(long, default_value_t = DEFAULT_BUDGET as u64)]
    pub budget: u64,
    /// Recorded with each certificate; all deciders are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for running jobs (0 = all cores). Output order is job order.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Largest number of patterns materialized by one enumeration.
    #[arg(long, env = "GCA_CAP", default_value_t = TABLE_CAP)]
    pub cap: u128,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            max_radius: DEFAULT_MAX_RADIUS,
            max_n: None,
            period_bound: DEFAULT_PERIOD_BOUND,
            budget: DEFAULT_BUDGET as u64,
            seed: 0,
            jobs: 0,
            cap: TABLE_CAP,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gca", version, about = "Decide injectivity, surjectivity and invertibility of cellular automata over groups")]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Debug, Subcommand)]
pub enum Action {
    /// Run one decider on every job of a TOML config.
    #[command(flatten)]
    Run(RunAction),
    /// Replay a JSON-lines certificate file without searching.
    Verify {
        certificates: PathBuf,
        #[arg(long, env = "GCA_CAP", default_value_t = TABLE_CAP)]
        cap: u128,
    },
}

#[derive(Debug, Subcommand)]
pub enum RunAction {
    /// Certify injectivity (V_n escalation, or exact oracles for plain rules).
    CheckInjective(RunArgs),
    /// Search for colliding configurations (finite or periodic).
    RefuteInjective(RunArgs),
    /// Decide surjectivity where possible, else search Garden-of-Eden windows.
    CheckSurjective(RunArgs),
    /// Look for a Garden-of-Eden pattern on one window.
    Goe(RunArgs),
    /// Synthesize an inverse local rule.
    Invert(RunArgs),
    /// Pre-injectivity.
    PreInjective(RunArgs),
    /// Post-surjectivity.
    PostSurjective(RunArgs),
    /// Exact injectivity and surjectivity on Z.
    #[command(name = "exact-1d")]
    Exact1d(RunArgs),
    /// Surjunctivity sweep over all group rules on a memory set.
    Sweep(RunArgs),
    /// The linear automaton of a group ring matrix.
    Phi(RunArgs),
    /// Search for a left inverse in the group ring.
    LeftInverse(RunArgs),
    /// Find a left inverse and decide whether it is two-sided.
    StableFinite(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    pub config: PathBuf,
    #[command(flatten)]
    pub flags: Flags,
}

impl RunAction {
    fn split(&self) -> (Command, &RunArgs) {
        match self {
            RunAction::CheckInjective(a) => (Command::CheckInjective, a),
            RunAction::RefuteInjective(a) => (Command::RefuteInjective, a),
            RunAction::CheckSurjective(a) => (Command::CheckSurjective, a),
            RunAction::Goe(a) => (Command::Goe, a),
            RunAction::Invert(a) => (Command::Invert, a),
            RunAction::PreInjective(a) => (Command::PreInjective, a),
            RunAction::PostSurjective(a) => (Command::PostSurjective, a),
            RunAction::Exact1d(a) => (Command::Exact1d, a),
            RunAction::Sweep(a) => (Command::Sweep, a),
            RunAction::Phi(a) => (Command::Phi, a),
            RunAction::LeftInverse(a) => (Command::LeftInverse, a),
            RunAction::StableFinite(a) => (Command::StableFinite, a),
        }
    }
}

/// A rule record whose memory may be in any order, rewritten to canonical
/// order.
pub fn canonical_rule_record(rec: &RuleRecord, alphabet: &Alphabet) -> Result<RuleRecord> {
    let sorted = FiniteSubset::new(rec.memory.iter().cloned());
    if sorted.len() != rec.memory.len() {
        return Err(GcaError::Config("rule memory lists an element twice".into()));
    }
    if sorted.elements() == rec.memory.as_slice() {
        return Ok(rec.clone());
    }
    // position in the given order of each canonical slot
    let from: Vec<usize> = sorted.iter().map(|g| rec.memory.iter().position(|h| h == g).expect("same set")).collect();
    let m = from.len();
    let data = match rec.kind {
        BodyKind::Table => {
            let size = alphabet.size();
            let count = pow_count(size, m);
            if rec.data.len() as u128 != count {
                return Err(GcaError::MalformedRule(format!("table needs {count} entries, got {}", rec.data.len())));
            }
            (0..count as usize)
                .map(|idx| {
                    let x = decode_pattern(size, idx, m);
                    let mut given = vec![0; m];
                    for (slot, &src) in x.iter().zip(&from) {
                        given[src] = *slot;
                    }
                    rec.data[encode_pattern(size, &given)]
                })
                .collect()
        }
        BodyKind::Hom | BodyKind::Linear => {
            if m == 0 || rec.data.len() % m != 0 {
                return Err(GcaError::MalformedRule("body length is not a multiple of the memory size".into()));
            }
            let chunk = rec.data.len() / m;
            from.iter().flat_map(|&src| rec.data[src * chunk..(src + 1) * chunk].to_vec()).collect()
        }
    };
    Ok(RuleRecord { memory: sorted.elements().to_vec(), kind: rec.kind, data })
}

fn alphabet_of(job: &Job) -> Result<Alphabet> {
    job.alphabet.as_ref().ok_or_else(|| GcaError::Config("job needs an alphabet".into()))?.build()
}

pub fn build_automaton(job: &Job) -> Result<CellularAutomaton> {
    let universe = job.universe.build()?;
    let alphabet = alphabet_of(job)?;
    let rec = job.rule.as_ref().ok_or_else(|| GcaError::Config("job needs a rule".into()))?;
    let rule = canonical_rule_record(rec, &alphabet)?.build(&universe, &alphabet)?;
    CellularAutomaton::new(universe, rule)
}

pub fn build_ring(job: &Job) -> Result<GroupRingMatrix> {
    let universe = job.universe.build()?;
    let rec = job.ring.as_ref().ok_or_else(|| GcaError::Config("job needs a ring element".into()))?;
    GroupRingMatrix::from_record(&universe, rec)
}

fn sweep_inputs(job: &Job) -> Result<(GroupUniverse, Alphabet, FiniteSubset)> {
    let universe = job.universe.build()?;
    let alphabet = alphabet_of(job)?;
    let memory = job.memory.as_ref().ok_or_else(|| GcaError::Config("sweep needs a memory list".into()))?;
    for g in memory {
        universe.validate(g)?;
    }
    Ok((universe, alphabet, FiniteSubset::new(memory.iter().cloned())))
}

/// Checks that the job carries what the command needs.
pub fn validate_job(command: Command, job: &Job) -> Result<()> {
    match command {
        Command::Phi | Command::LeftInverse | Command::StableFinite => build_ring(job).map(drop),
        Command::Sweep => sweep_inputs(job).map(drop),
        _ => build_automaton(job).map(drop),
    }
}

/// Runs one job. Job parameters override flags.
pub fn run_job(command: Command, job: &Job, flags: &Flags) -> Result<Verdict> {
    let p = &job.params;
    let limits = Limits { cap: flags.cap, ..Limits::default() };
    let max_radius = p.max_radius.unwrap_or(flags.max_radius);
    let verdict = match command {
        Command::Phi => group_ring::phi_verdict(&build_ring(job)?)?,
        Command::LeftInverse => group_ring::left_inverse_verdict(&build_ring(job)?, max_radius)?,
        Command::StableFinite => group_ring::stable_finite_verdict(&build_ring(job)?, max_radius)?,
        Command::Sweep => {
            let (u, a, m) = sweep_inputs(job)?;
            let budget = p.budget.unwrap_or(flags.budget) as u128;
            deciders::sweep_verdict(&u, &a, &m, budget, &limits)?
        }
        _ => {
            let ca = build_automaton(job)?;
            let max_n = p.max_n.or(flags.max_n).unwrap_or_else(|| default_max_n(ca.universe()));
            match command {
                Command::CheckInjective => deciders::check_injective(&ca, max_n, &limits)?,
                Command::RefuteInjective => {
                    deciders::refute_injective(&ca, p.period_bound.unwrap_or(flags.period_bound), &limits)?
                }
                Command::CheckSurjective => deciders::check_surjective(&ca, max_radius, &limits)?,
                Command::Goe => {
                    let window = match &p.window {
                        Some(w) => FiniteSubset::new(w.iter().cloned()),
                        None => ca.universe().ball(p.window_radius.unwrap_or(1)),
                    };
                    deciders::goe_search(&ca, &window, &limits)?
                }
                Command::Invert => deciders::synthesize_inverse(&ca, max_radius, &limits)?,
                Command::PreInjective => {
                    deciders::pre_injectivity(&ca, p.support_radius.unwrap_or(max_radius), max_n, &limits)?
                }
                Command::PostSurjective => deciders::post_surjectivity(
                    &ca,
                    p.deviation_radius.unwrap_or(0),
                    p.search_radius.unwrap_or(max_radius),
                    &limits,
                )?,
                Command::Exact1d => deciders::exact_1d_verdict(&ca, &limits)?,
                _ => unreachable!("ring and sweep commands handled above"),
            }
        }
    };
    Ok(verdict.param("seed", p.seed.unwrap_or(flags.seed)))
}

/// Runs every job, in parallel, returning records in job order.
pub fn run_config(command: Command, config: &JobConfig, flags: &Flags) -> Vec<CertificateRecord> {
    let one = |job: &Job| {
        let start = Instant::now();
        let result = run_job(command, job, flags);
        let duration_ms = start.elapsed().as_millis() as u64;
        let (verdict, error) = match result {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(JobError::from(&e))),
        };
        CertificateRecord {
            tool_version: TOOL_VERSION.to_string(),
            command: command.name().to_string(),
            job: job.clone(),
            verdict,
            error,
            duration_ms,
        }
    };
    let run = || config.job.par_iter().map(one).collect::<Vec<_>>();
    if flags.jobs == 0 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(flags.jobs).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    }
}

fn compatible_version(v: &str) -> bool {
    let major_minor = |s: &str| s.split('.').take(2).collect::<Vec<_>>().join(".");
    major_minor(v) == major_minor(TOOL_VERSION)
}

/// Replays one record: `Ok(true)` iff its recorded status is confirmed.
pub fn verify_record(record: &CertificateRecord, limits: &Limits) -> Result<bool> {
    if !compatible_version(&record.tool_version) {
        return Err(GcaError::Config(format!("certificate from incompatible version {}", record.tool_version)));
    }
    let command = Command::from_name(&record.command)
        .ok_or_else(|| GcaError::Config(format!("unknown command {}", record.command)))?;
    let Some(verdict) = &record.verdict else {
        return Ok(false);
    };
    if verdict.decider.is_empty() {
        return Err(GcaError::Config("verdict without decider".into()));
    }
    let subject = match command {
        Command::Phi | Command::LeftInverse | Command::StableFinite => Subject::Ring(build_ring(&record.job)?),
        Command::Sweep => {
            let (universe, alphabet, memory) = sweep_inputs(&record.job)?;
            let budget: u128 = verdict
                .parameters
                .get("budget")
                .and_then(|b| b.as_str())
                .and_then(|b| b.parse().ok())
                .ok_or_else(|| GcaError::Config("sweep certificate without budget".into()))?;
            Subject::Sweep { universe, alphabet, memory, budget }
        }
        _ => Subject::Automaton(build_automaton(&record.job)?),
    };
    replay(&subject, verdict, limits)
}

fn diagnostic(out: &mut dyn Write, err: &GcaError) {
    let _ = writeln!(out, "{}", serde_json::json!({ "error": JobError::from(err) }));
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run_cli(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 3;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match cli.action {
        Action::Run(action) => {
            let (command, args) = action.split();
            let parsed = std::fs::read_to_string(&args.config)
                .map_err(|e| GcaError::Config(format!("{}: {e}", args.config.display())))
                .and_then(|text| JobConfig::from_toml(&text))
                .and_then(|cfg| {
                    for job in &cfg.job {
                        validate_job(command, job)?;
                    }
                    Ok(cfg)
                });
            let config = match parsed {
                Ok(c) => c,
                Err(e) => {
                    diagnostic(err, &e);
                    return 3;
                }
            };
            let records = run_config(command, &config, &args.flags);
            let mut code = 0;
            for r in &records {
                let _ = writeln!(out, "{}", serde_json::to_string(r).expect("serializable record"));
                if let Some(e) = &r.error {
                    let _ = writeln!(err, "{}", serde_json::json!({ "error": e }));
                }
                code = code.max(r.exit_code());
            }
            for v in records.iter().filter_map(|r| r.verdict.as_ref()) {
                if command == Command::StableFinite && v.status == Status::CertifiedNo {
                    let _ = writeln!(err, "regular representation singular: no inverse exists");
                }
            }
            code
        }
        Action::Verify { certificates, cap } => {
            let text = match std::fs::read_to_string(&certificates) {
                Ok(t) => t,
                Err(e) => {
                    diagnostic(err, &GcaError::Config(format!("{}: {e}", certificates.display())));
                    return 3;
                }
            };
            let limits = Limits { cap, ..Limits::default() };
            let mut code = 0;
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let record: CertificateRecord = match serde_json::from_str(line) {
                    Ok(r) => r,
                    Err(e) => {
                        diagnostic(err, &GcaError::Config(format!("line {}: {e}", i + 1)));
                        return 3;
                    }
                };
                match verify_record(&record, &limits) {
                    Ok(ok) => {
                        let _ = writeln!(out, "{}", serde_json::json!({ "line": i + 1, "confirmed": ok }));
                        if !ok {
                            code = code.max(1);
                        }
                    }
                    Err(e) => {
                        diagnostic(err, &e);
                        return 3;
                    }
                }
            }
            code
        }
    }
}

/// Builds a job for an automaton; used by library callers that want the
/// same certificate format as the command line.
pub fn job_for_automaton(ca: &CellularAutomaton) -> Job {
    Job {
        name: None,
        universe: UniverseSpec::from_universe(ca.universe()),
        alphabet: Some(AlphabetSpec::from_alphabet(ca.alphabet())),
        rule: Some(RuleRecord::from_rule(ca.rule())),
        ring: None,
        memory: None,
        params: JobParams::default(),
    }
}

pub fn job_for_ring(alpha: &GroupRingMatrix) -> Job {
    Job {
        name: None,
        universe: UniverseSpec::from_universe(alpha.universe()),
        alphabet: None,
        rule: None,
        ring: Some(alpha.to_record()),
        memory: None,
        params: JobParams::default(),
    }
}
