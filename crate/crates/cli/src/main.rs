//! `nanotrust`: ingest nanopublication documents, check policies, filter
//! claims and explain decisions.
//!
//! Exit codes: 0 success, 1 data error, 2 policy error, 3 I/O error,
//! 64 usage or configuration error.

mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nanotrust_core::{
    check_policy, explain, parse_policy, parse_sets, AgentSet, Context, EngineError, IngestError, Iri, Policy,
    SetRegistry, Snapshot, Store, TrustEngine, TrustedData, Vocabulary,
};

use config::FileConfig;

#[derive(Debug)]
pub enum Failure {
    Data(String),
    Policy(String),
    Io(String),
    Usage(String),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Io(format!("{}: {e}", path.display()))
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 1,
            Failure::Policy(_) => 2,
            Failure::Io(_) => 3,
            Failure::Usage(_) => 64,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Data(m) | Failure::Policy(m) | Failure::Io(m) | Failure::Usage(m) => f.write_str(m),
        }
    }
}

#[derive(Parser)]
#[command(name = "nanotrust", version, about = "Policy-driven trust filtering of nanopublication claims")]
struct Cli {
    /// TOML file with defaults for any of the run options; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate documents, printing one report line per file.
    Ingest {
        #[arg(value_name = "FILE")]
        files: Vec<PathBuf>,
        /// Replay this quad log first, then append accepted documents to it.
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
    },
    /// Parse and check a policy.
    Check {
        #[arg(long, value_name = "FILE")]
        policy: Option<PathBuf>,
        #[command(flatten)]
        sets: SetArgs,
    },
    /// Filter the ingested claims through a policy and write the report.
    Filter {
        #[command(flatten)]
        run: RunArgs,
        /// Report file; without it the report goes to standard output.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Show how the policy decided one claim.
    Explain {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "explain", value_name = "CLAIM_IRI")]
        claim: String,
    },
}

#[derive(Args)]
struct SetArgs {
    /// Agent set, as NAME=IRI,IRI,... or NAME=@FILE with one IRI per line.
    #[arg(long = "roots-set", value_name = "NAME=MEMBERS")]
    roots_sets: Vec<String>,
    /// File of `set NAME { <iri>, ... }` declarations.
    #[arg(long, value_name = "FILE")]
    sets: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "FILE", num_args = 1..)]
    ingest: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    policy: Option<PathBuf>,
    /// key=value lines.
    #[arg(long, value_name = "FILE")]
    context: Option<PathBuf>,
    #[command(flatten)]
    sets: SetArgs,
    #[arg(long, value_name = "IRI")]
    vocab_attribution: Option<String>,
    #[arg(long, value_name = "IRI")]
    vocab_derivation: Option<String>,
    #[arg(long, value_name = "IRI")]
    vocab_published: Option<String>,
    /// Publisher policy applied first; only the claims it releases reach the
    /// main policy.
    #[arg(long, value_name = "FILE", requires = "requester")]
    release_policy: Option<PathBuf>,
    /// Requesting agent for the release policy.
    #[arg(long, value_name = "IRI")]
    requester: Option<String>,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn require_exists(paths: &[&Path]) -> Result<(), Failure> {
    match paths.iter().find(|p| !p.exists()) {
        Some(p) => Err(Failure::Io(format!("{}: no such file", p.display()))),
        None => Ok(()),
    }
}

fn load_policy(path: &Path) -> Result<Policy, Failure> {
    parse_policy(&read(path)?).map_err(|e| Failure::Policy(format!("{}: {e}", path.display())))
}

fn load_sets(args: &SetArgs, cfg: &FileConfig) -> Result<SetRegistry, Failure> {
    let mut reg = SetRegistry::new();
    let file = args.sets.as_ref().or(cfg.sets.as_ref());
    if let Some(path) = file {
        let sets = parse_sets(&read(path)?).map_err(|e| Failure::Policy(format!("{}: {e}", path.display())))?;
        for set in sets {
            reg.insert(set.name.clone(), set);
        }
    }
    for (name, members) in &cfg.roots_sets {
        let members = members
            .iter()
            .map(|m| Iri::parse(m).map_err(|e| Failure::Policy(format!("set {name}: {m:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        reg.insert(name.clone(), AgentSet::new(name.clone(), members));
    }
    for spec in &args.roots_sets {
        let set = parse_roots_set(spec)?;
        reg.insert(set.name.clone(), set);
    }
    Ok(reg)
}

fn parse_roots_set(spec: &str) -> Result<AgentSet, Failure> {
    let (name, members) = spec
        .split_once('=')
        .ok_or_else(|| Failure::usage(format!("--roots-set {spec:?}: expected NAME=IRI,... or NAME=@FILE")))?;
    let listed: Vec<String> = match members.strip_prefix('@') {
        Some(path) => read(Path::new(path))?
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_start_matches('<').trim_end_matches('>').to_string())
            .collect(),
        None => members.split(',').map(str::trim).filter(|m| !m.is_empty()).map(str::to_string).collect(),
    };
    let members = listed
        .iter()
        .map(|m| Iri::parse(m).map_err(|e| Failure::Policy(format!("set {name}: {m:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AgentSet::new(name, members))
}

fn ingest_error(path: &Path, e: IngestError) -> Failure {
    match e {
        IngestError::Syntax(s) => Failure::Data(format!("{}: {s}", path.display())),
        IngestError::ValidationFailed(v) => {
            let lines: Vec<String> = v.iter().map(|x| format!("{}: {x}", path.display())).collect();
            Failure::Data(lines.join("\n"))
        }
        IngestError::Log(e) => Failure::Io(format!("{}: quad log: {e}", path.display())),
    }
}

fn engine_error(e: EngineError) -> Failure {
    match e {
        EngineError::PolicyInvalid(d) => {
            Failure::Policy(d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))
        }
        EngineError::UnknownClaim(c) => Failure::Data(format!("unknown claim {c}")),
        other => Failure::Data(other.to_string()),
    }
}

struct Prepared {
    snap: Snapshot,
    policy: Policy,
    sets: SetRegistry,
    ctx: Context,
    engine: TrustEngine,
    release: Option<(Policy, Iri)>,
}

fn prepare(run: &RunArgs, cfg: &FileConfig) -> Result<Prepared, Failure> {
    let ingest = if run.ingest.is_empty() { &cfg.ingest } else { &run.ingest };
    let policy_path = run
        .policy
        .as_ref()
        .or(cfg.policy.as_ref())
        .ok_or_else(|| Failure::usage("no policy given (--policy)"))?;
    let context_path = run.context.as_ref().or(cfg.context.as_ref());
    let release_path = run.release_policy.as_ref().or(cfg.release_policy.as_ref());
    let mut paths: Vec<&Path> = ingest.iter().map(PathBuf::as_path).collect();
    paths.push(policy_path);
    paths.extend(context_path.map(PathBuf::as_path));
    paths.extend(release_path.map(PathBuf::as_path));
    paths.extend(run.sets.sets.as_ref().or(cfg.sets.as_ref()).map(PathBuf::as_path));
    require_exists(&paths)?;

    let vocab: Vocabulary = config::vocabulary(
        run.vocab_attribution.as_deref(),
        run.vocab_derivation.as_deref(),
        run.vocab_published.as_deref(),
        &cfg.vocab,
    )?;
    let policy = load_policy(policy_path)?;
    let sets = load_sets(&run.sets, cfg)?;
    let diags = check_policy(&policy, &sets);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}: {d}", policy_path.display())).collect();
        return Err(Failure::Policy(lines.join("\n")));
    }
    let release = match release_path {
        Some(path) => {
            let requester = run
                .requester
                .as_ref()
                .or(cfg.requester.as_ref())
                .ok_or_else(|| Failure::usage("--release-policy needs --requester"))?;
            let requester = Iri::parse(requester).map_err(|e| Failure::usage(format!("--requester: {e}")))?;
            Some((load_policy(path)?, requester))
        }
        None => None,
    };
    let ctx = match context_path {
        Some(path) => Context::parse(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        None => Context::new(),
    };

    let mut store = Store::new();
    for path in ingest {
        store.ingest_document(&read(path)?).map_err(|e| ingest_error(path, e))?;
    }
    Ok(Prepared { snap: store.snapshot(), policy, sets, ctx, engine: TrustEngine::new(vocab), release })
}

fn run_filter(p: &Prepared) -> Result<TrustedData, Failure> {
    match &p.release {
        None => p.engine.filter(&p.snap, &p.policy, &p.sets, &p.ctx).map_err(engine_error),
        Some((release, requester)) => {
            let released = p
                .engine
                .publish_filter(&p.snap, release, &p.sets, Some(requester), &p.ctx)
                .map_err(engine_error)?;
            p.engine.filter_released(&p.snap, &p.policy, &p.sets, &p.ctx, &released).map_err(engine_error)
        }
    }
}

fn cmd_ingest(files: &[PathBuf], log: Option<&Path>) -> Result<(), Failure> {
    let mut store = match log {
        Some(path) => Store::open_log(path).map_err(|e| ingest_error(path, e))?,
        None => Store::new(),
    };
    let mut failed = None;
    let stdout = std::io::stdout();
    for path in files {
        let text = match read(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{e}");
                failed.get_or_insert(e);
                continue;
            }
        };
        match store.ingest_document(&text) {
            Ok(r) => {
                let _ = writeln!(
                    stdout.lock(),
                    "{}: added {}, duplicates {}, nanopubs {}",
                    path.display(),
                    r.added,
                    r.duplicates,
                    r.nanopubs.len()
                );
            }
            Err(e) => {
                let f = ingest_error(path, e);
                eprintln!("{f}");
                if !matches!(failed, Some(Failure::Io(_))) {
                    failed = Some(f);
                }
            }
        }
    }
    let snap = store.snapshot();
    println!("store: {} quads, {} nanopubs, {}", snap.len(), snap.nanopubs().count(), snap.digest());
    failed.map_or(Ok(()), Err)
}

fn cmd_check(policy: Option<&PathBuf>, sets: &SetArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let path = policy.or(cfg.policy.as_ref()).ok_or_else(|| Failure::usage("no policy given (--policy)"))?;
    require_exists(&[path])?;
    let policy = load_policy(path)?;
    let sets = load_sets(sets, cfg)?;
    let diags = check_policy(&policy, &sets);
    if diags.is_empty() {
        println!("{}: policy {} ok, {} rule(s)", path.display(), policy.name, policy.rules.len());
        Ok(())
    } else {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}: {d}", path.display())).collect();
        Err(Failure::Policy(lines.join("\n")))
    }
}

fn cmd_filter(run: &RunArgs, out: Option<&Path>, cfg: &FileConfig) -> Result<(), Failure> {
    let prepared = prepare(run, cfg)?;
    let td = run_filter(&prepared)?;
    let report = td.to_json();
    match out {
        Some(path) => {
            std::fs::write(path, report).map_err(|e| Failure::io(path, e))?;
            println!("{}", td.summary());
        }
        None => {
            print!("{report}");
            eprintln!("{}", td.summary());
        }
    }
    Ok(())
}

fn cmd_explain(run: &RunArgs, claim: &str, cfg: &FileConfig) -> Result<(), Failure> {
    let claim = Iri::parse(claim).map_err(|e| Failure::Data(format!("claim {claim:?}: {e}")))?;
    let prepared = prepare(run, cfg)?;
    if prepared.snap.nanopub(&claim).is_none() {
        return Err(Failure::Data(format!("unknown claim {claim}")));
    }
    let decision = match &prepared.release {
        None => prepared
            .engine
            .evaluate_claim(&prepared.snap, &prepared.policy, &prepared.sets, &prepared.ctx, &claim)
            .map_err(engine_error)?,
        Some(_) => run_filter(&prepared)?.decisions.remove(&claim).expect("every claim has a decision"),
    };
    print!("{}", explain(&decision));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    let result = (|| {
        let cfg = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        match &cli.command {
            Command::Ingest { files, log } => {
                let files = if files.is_empty() { &cfg.ingest } else { files };
                cmd_ingest(files, log.as_deref().or(cfg.log.as_deref()))
            }
            Command::Check { policy, sets } => cmd_check(policy.as_ref(), sets, &cfg),
            Command::Filter { run, out } => cmd_filter(run, out.as_deref().or(cfg.out.as_deref()), &cfg),
            Command::Explain { run, claim } => cmd_explain(run, claim, &cfg),
        }
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
