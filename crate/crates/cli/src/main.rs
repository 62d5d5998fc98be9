// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! `basm`: run, replay, and check basic interactive ASM programs.
//!
//! Exit codes: 0 success, 1 runtime error or failed check, 2 parse or usage
//! error, 3 step limit reached.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use basm::checks::{self, CheckReport};
use basm::corpus::{self, CorpusEntry, PolicySpec};
use basm::oracles::{parse_script, InteractiveIo, SplitMix64};
use basm::semantics::{replay_verdict, ReplayVerdict};
use basm::syntax::parse_state;
use basm::{run, Error, OraclePolicy, Outcome, Program, ScriptMode, State, Trace, DEFAULT_MAX_STEPS};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "basm", version, about = "Interpreter and property checker for basic interactive ASMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program and write its trace.
    Run(RunArgs),
    /// Re-run a trace with its recorded answers and compare.
    Replay {
        #[arg(long)]
        program: String,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long = "oracle-static", value_name = "SYMBOL")]
        oracle_statics: Vec<String>,
    },
    /// Run a property check and print its report.
    Check(CheckArgs),
    /// List or run the bundled example programs.
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyKind {
    Builtin,
    Uniform,
    Script,
    Interactive,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    BySymbol,
}

#[derive(Args)]
struct RunArgs {
    /// Program file, or the name of a corpus entry.
    #[arg(long)]
    program: String,
    /// Initial-state file; defaults to the corpus entry's default, or the
    /// all-undef state.
    #[arg(long)]
    init: Option<String>,
    #[arg(long, value_enum, default_value = "builtin")]
    policy: PolicyKind,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    script: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "strict")]
    script_mode: ModeArg,
    #[arg(long, env = "ASM_MAX_STEPS", default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: u64,
    /// Trace output path; stdout when absent.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Treat a static symbol or operator (e.g. `mod`) as a deterministic
    /// oracle whose applications are logged. Repeatable.
    #[arg(long = "oracle-static", value_name = "SYMBOL")]
    oracle_statics: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckName {
    Bexp,
    Iso,
    Replay,
    Equiv,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    name: CheckName,
    #[arg(long)]
    program: Option<String>,
    #[arg(long)]
    init: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace files for `replay`.
    #[arg(long)]
    trace: Vec<PathBuf>,
    /// First trace for `equiv`.
    #[arg(long)]
    a: Option<PathBuf>,
    /// Second trace for `equiv`.
    #[arg(long)]
    b: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Print the entry names.
    List,
    /// Run an entry with its default initial state and policy.
    Run {
        name: String,
        #[arg(long)]
        init: Option<String>,
        /// `builtin`, `uniform:<seed>`, `script:<file>`, or
        /// `script-by-symbol:<file>`.
        #[arg(long)]
        policy: Option<String>,
        #[arg(long, env = "ASM_MAX_STEPS", default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Fail {
        Fail {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Runtime(_) => 1,
            Error::Parse(_) | Error::Io(_) => 2,
        };
        Fail {
            code,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(Error) -> Fail + '_ {
    move |e| {
        let mut f = Fail::from(e);
        f.message = format!("{}:{}", path.display(), f.message);
        f
    }
}

/// A program given by corpus name or file path.
struct Source {
    program: Program,
    entry: Option<&'static CorpusEntry>,
}

fn reclassify(source: Source, names: &[String]) -> Result<Source, Fail> {
    if names.is_empty() {
        return Ok(source);
    }
    let program = source.program.with_oracle_statics(names.iter().cloned()).map_err(Error::from)?;
    Ok(Source { program, ..source })
}

fn load_program(spec: &str) -> Result<Source, Fail> {
    if let Ok(entry) = corpus::entry(spec) {
        if !Path::new(spec).exists() {
            let program = entry.parse_program().map_err(Error::from)?;
            return Ok(Source {
                program,
                entry: Some(entry),
            });
        }
    }
    let path = Path::new(spec);
    let program = Program::parse(&read(path)?).map_err(|e| in_file(path)(e.into()))?;
    let entry = corpus::ENTRIES
        .iter()
        .find(|e| e.parse_program().is_ok_and(|p| p.id() == program.id()));
    Ok(Source { program, entry })
}

fn load_init(source: &Source, init: Option<&str>) -> Result<State, Fail> {
    let vocab = source.program.vocab().clone();
    match (init, source.entry) {
        (Some(p), Some(entry)) if !Path::new(p).exists() => Ok(entry.init_state(&source.program, p)?),
        (Some(p), _) => {
            let path = Path::new(p);
            parse_state(vocab, &read(path)?).map_err(|e| in_file(path)(e.into()))
        }
        (None, Some(entry)) => Ok(entry.init_state(&source.program, entry.default_init)?),
        (None, None) => Ok(State::empty(vocab)),
    }
}

fn load_trace(path: &Path) -> Result<Trace, Fail> {
    Trace::from_jsonl(&read(path)?).map_err(|e| in_file(path)(e.into()))
}

fn write_trace(trace: &Trace, path: Option<&Path>) -> Result<(), Fail> {
    let text = trace.to_jsonl();
    let io_fail = |e: io::Error| Fail {
        code: 1,
        message: format!("writing trace: {e}"),
    };
    match path {
        Some(p) => fs::write(p, text).map_err(io_fail),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(io_fail)
        }
    }
}

fn finish_run(trace: &Trace, path: Option<&Path>) -> Result<ExitCode, Fail> {
    write_trace(trace, path)?;
    match &trace.outcome {
        Outcome::Halted => Ok(ExitCode::SUCCESS),
        Outcome::StepLimit => {
            eprintln!("step limit reached after {} steps", trace.steps.len());
            Ok(ExitCode::from(3))
        }
        Outcome::Error { kind, message } => {
            eprintln!("error: {kind}: {message}");
            Ok(ExitCode::from(1))
        }
    }
}

fn policy_for(args: &RunArgs) -> Result<OraclePolicy, Fail> {
    let misplaced = |flag: &str| Fail::usage(format!("{flag} is only valid with the matching --policy"));
    if args.seed.is_some() && !matches!(args.policy, PolicyKind::Uniform) {
        return Err(misplaced("--seed"));
    }
    if args.script.is_some() && !matches!(args.policy, PolicyKind::Script) {
        return Err(misplaced("--script"));
    }
    Ok(match args.policy {
        PolicyKind::Builtin => OraclePolicy::Builtin,
        PolicyKind::Uniform => OraclePolicy::UniformRandom {
            seed: args.seed.unwrap_or(0),
        },
        PolicyKind::Script => {
            let path = args
                .script
                .as_deref()
                .ok_or_else(|| Fail::usage("--policy script needs --script"))?;
            let entries = parse_script(&read(path)?).map_err(|e| in_file(path)(e.into()))?;
            let mode = match args.script_mode {
                ModeArg::Strict => ScriptMode::Strict,
                ModeArg::BySymbol => ScriptMode::BySymbol,
            };
            OraclePolicy::scripted(entries, mode)
        }
        PolicyKind::Interactive => OraclePolicy::Interactive(InteractiveIo {
            input: Box::new(BufReader::new(io::stdin())),
            prompt: Box::new(io::stderr()),
        }),
    })
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Fail> {
    let source = reclassify(load_program(&args.program)?, &args.oracle_statics)?;
    let init = load_init(&source, args.init.as_deref())?;
    let policy = policy_for(&args)?;
    let trace = run(&source.program, &init, policy, args.max_steps);
    finish_run(&trace, args.trace.as_deref())
}

fn cmd_replay(program: &str, trace: &Path, oracle_statics: &[String]) -> Result<ExitCode, Fail> {
    let source = reclassify(load_program(program)?, oracle_statics)?;
    let trace = load_trace(trace)?;
    match replay_verdict(&trace, &source.program).map_err(Error::from)? {
        ReplayVerdict::Match => {
            println!("match");
            Ok(ExitCode::SUCCESS)
        }
        ReplayVerdict::Mismatch { step, reason } => {
            match step {
                Some(s) => println!("mismatch at step {s}: {reason}"),
                None => println!("mismatch: {reason}"),
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn sampler_for(source: &Source) -> Box<dyn Fn(&mut SplitMix64) -> State + '_> {
    let program = &source.program;
    match source.entry {
        Some(entry) => Box::new(move |rng| corpus::sample_reachable(entry, program, rng)),
        None => Box::new(move |rng| checks::random_state(program.vocab(), rng)),
    }
}

fn default_policy(source: &Source) -> Result<PolicySpec, Fail> {
    match source.entry {
        Some(e) => Ok(PolicySpec::parse(e.default_policy, e)?),
        None => Ok(PolicySpec::Builtin),
    }
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, Fail> {
    let need_program = || {
        args.program
            .as_deref()
            .ok_or_else(|| Fail::usage("this check needs --program"))
            .and_then(load_program)
    };
    let report: CheckReport = match args.name {
        CheckName::Bexp => {
            let source = need_program()?;
            let sampler = sampler_for(&source);
            checks::check_bounded_exploration(&source.program, &*sampler, args.trials, args.seed)
        }
        CheckName::Iso => {
            let source = need_program()?;
            let policy = default_policy(&source)?;
            let inits: Vec<State> = match (args.init.as_deref(), source.entry) {
                (None, Some(entry)) => entry
                    .inits
                    .iter()
                    .map(|f| entry.init_state(&source.program, f.name))
                    .collect::<Result<_, _>>()?,
                (init, _) => vec![load_init(&source, init)?],
            };
            let mut report = CheckReport::new("iso");
            for init in &inits {
                report.absorb(checks::check_iso_all(&source.program, init, policy.to_policy()).map_err(Error::from)?);
            }
            report
        }
        CheckName::Replay => {
            let source = need_program()?;
            let traces = if args.trace.is_empty() {
                let sampler = sampler_for(&source);
                let policy = default_policy(&source)?;
                let mut rng = SplitMix64::new(args.seed);
                (0..args.trials)
                    .map(|_| {
                        let init = sampler(&mut rng);
                        let policy = match policy {
                            PolicySpec::Builtin => OraclePolicy::Builtin,
                            _ => OraclePolicy::UniformRandom { seed: rng.next_u64() },
                        };
                        run(&source.program, &init, policy, DEFAULT_MAX_STEPS)
                    })
                    .collect()
            } else {
                args.trace.iter().map(|p| load_trace(p)).collect::<Result<Vec<_>, _>>()?
            };
            checks::replay_report(&traces, &source.program).map_err(Error::from)?
        }
        CheckName::Equiv => {
            let (Some(a), Some(b)) = (&args.a, &args.b) else {
                return Err(Fail::usage("equiv needs --a and --b"));
            };
            checks::equivalence_report(&load_trace(a)?, &load_trace(b)?).map_err(Error::from)?
        }
    };
    println!("{}", report.to_json());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_corpus(cmd: CorpusCommand) -> Result<ExitCode, Fail> {
    match cmd {
        CorpusCommand::List => {
            for e in corpus::ENTRIES {
                println!("{}", e.name);
            }
            Ok(ExitCode::SUCCESS)
        }
        CorpusCommand::Run {
            name,
            init,
            policy,
            max_steps,
            trace,
        } => {
            let entry = corpus::entry(&name).map_err(|e| Fail::usage(e.to_string()))?;
            let spec = PolicySpec::parse(policy.as_deref().unwrap_or(entry.default_policy), entry)
                .map_err(|e| Fail::usage(e.to_string()))?;
            let mut overrides = corpus::Overrides::new().policy(spec).max_steps(max_steps);
            if let Some(i) = init {
                overrides = overrides.init(i);
            }
            let t = corpus::corpus_run(&name, &overrides)?;
            finish_run(&t, trace.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Replay {
            program,
            trace,
            oracle_statics,
        } => cmd_replay(&program, &trace, &oracle_statics),
        Command::Check(args) => cmd_check(args),
        Command::Corpus(cmd) => cmd_corpus(cmd),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
