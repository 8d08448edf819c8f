//! semibrick-lab: build bounded universes of quiver representations over
//! prime fields, enumerate semibricks and wide subcategories, and verify
//! the correspondence between them.
//!
//! Exit codes: 0 verdict PASS, 1 verdict FAIL (a mathematical
//! counterexample), 2 usage or configuration error, 3 budget exceeded.

mod config;
mod report;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use semibrick_core::bricks::enumerate_semibricks;
use semibrick_core::filt::{filt_closure, filt_contains};
use semibrick_core::verify::{
    run_split_example, universe_descriptor, verify_bijection, verify_corollary,
    UniverseDescriptor,
};
use semibrick_core::wide::{is_wide, simples_of};
use semibrick_core::{
    enumerate_universe, run_selftest, BrickSet, Error as CoreError, ExactCtx,
    FiltrationCertificate, IsoClassId, SubcatCandidate, TruncationEvent, Universe, Verdict,
};

use config::{resolve, ConfigEcho, ConfigFlags, FiltArgs, RunConfig, WideArgs};
use report::{emit, emit_error, Envelope, SCHEMA, TOOL_VERSION};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, or input data. Exit 2.
    Config(String),
    /// An enumeration or search budget was exceeded. Exit 3.
    Budget(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::EnumerationTooLarge { .. }
            | CoreError::BudgetExceeded { .. }
            | CoreError::SearchBudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "semibrick-lab",
    version,
    about = "Exact-structure laboratory on bounded universes of quiver representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the universe and dump every class representative
    Universe(ConfigFlags),
    /// Enumerate the semibricks of the universe
    Semibricks(ConfigFlags),
    /// Filtration closure and certificates for a generating semibrick
    Filt(FiltArgs),
    /// Wideness report for an explicit candidate subcategory
    WideCheck(WideArgs),
    /// Verify the semibrick / length-wide-subcategory correspondence
    VerifyBijection(ConfigFlags),
    /// Verify that the context is abelian exactly when its simples form a semibrick
    VerifyCorollary(ConfigFlags),
    /// Show that closures and wideness depend on the chosen exact structure
    SplitExample(ConfigFlags),
    /// Run the invariant suites on the stock universes
    Selftest(ConfigFlags),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Universe(_) => "universe",
            Command::Semibricks(_) => "semibricks",
            Command::Filt(_) => "filt",
            Command::WideCheck(_) => "wide-check",
            Command::VerifyBijection(_) => "verify-bijection",
            Command::VerifyCorollary(_) => "verify-corollary",
            Command::SplitExample(_) => "split-example",
            Command::Selftest(_) => "selftest",
        }
    }

    fn flags(&self) -> &ConfigFlags {
        match self {
            Command::Universe(f)
            | Command::Semibricks(f)
            | Command::VerifyBijection(f)
            | Command::VerifyCorollary(f)
            | Command::SplitExample(f)
            | Command::Selftest(f) => f,
            Command::Filt(a) => &a.common,
            Command::WideCheck(a) => &a.common,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();

    // Selftest runs on its own stock universes; everything else wants a
    // fully resolved config. Resolve early so usage errors never start a
    // computation.
    let resolved = match &cli.command {
        Command::Selftest(flags) => {
            let mut f = flags.clone();
            if f.preset.is_none() && f.vertices.is_none() {
                // Placeholder so resolution succeeds; selftest uses its own
                // stock universes and echoes no quiver.
                f.preset = Some("a1".into());
            }
            resolve(&f, None, None)
        }
        Command::Filt(args) => resolve(&args.common, args.gens.clone(), None),
        Command::WideCheck(args) => resolve(&args.common, None, args.members.clone()),
        other => resolve(other.flags(), None, None),
    };
    let cfg = match resolved {
        Ok(cfg) => cfg,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            emit_error("-", name, "config", &msg);
            return ExitCode::from(2);
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("error: {msg}");
            emit_error("-", name, "budget", &msg);
            return ExitCode::from(3);
        }
    };

    if let Some(n) = cfg.workers {
        // A second global-pool build (tests, repeated calls) is harmless:
        // the pool only initializes once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    match run(&cli.command, &cfg) {
        Ok(verdict) => {
            eprintln!("verdict: {verdict}");
            ExitCode::from(if verdict.passed() { 0 } else { 1 })
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            emit_error(&cfg.out, name, "config", &msg);
            ExitCode::from(2)
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("error: {msg}");
            emit_error(&cfg.out, name, "budget", &msg);
            ExitCode::from(3)
        }
    }
}

fn build_universe(cfg: &RunConfig) -> Result<Arc<Universe>, CliError> {
    eprintln!(
        "building universe: {} vertices, p = {}, bound {:?}",
        cfg.quiver.vertices().len(),
        cfg.p.get(),
        cfg.bound
    );
    let u = Arc::new(enumerate_universe(
        cfg.quiver.clone(),
        cfg.p,
        cfg.bound.clone(),
        cfg.limits,
    )?);
    eprintln!("universe has {} classes", u.len());
    Ok(u)
}

fn ids_from(u: &Universe, raw: &[usize]) -> Result<BTreeSet<IsoClassId>, CliError> {
    let set: BTreeSet<IsoClassId> = raw.iter().map(|&i| IsoClassId(i)).collect();
    for &id in &set {
        u.ensure_id(id)?;
    }
    Ok(set)
}

fn publish<P: Serialize>(
    cfg: &RunConfig,
    command: &str,
    echo: &ConfigEcho,
    universe: Option<&UniverseDescriptor>,
    verdict: Verdict,
    payload: P,
    events: &[TruncationEvent],
) -> Result<Verdict, CliError> {
    let doc = Envelope {
        schema: SCHEMA,
        tool_version: TOOL_VERSION,
        command,
        config: echo,
        universe,
        verdict,
        payload,
        truncation_events: events,
    };
    emit(&cfg.out, &doc)?;
    Ok(verdict)
}

#[derive(Serialize)]
struct SemibrickList {
    count: usize,
    semibricks: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct FiltPayload {
    generators: Vec<usize>,
    closure: Vec<usize>,
    certificates: Vec<FiltrationCertificate>,
}

fn run(command: &Command, cfg: &RunConfig) -> Result<Verdict, CliError> {
    let name = command.name();
    let echo = cfg.echo();
    let ctx = ExactCtx::new(cfg.structure);

    match command {
        Command::Universe(_) => {
            let u = build_universe(cfg)?;
            let desc = universe_descriptor(&u);
            publish(cfg, name, &echo, Some(&desc), Verdict::Pass, &*u, &[])
        }
        Command::Semibricks(_) => {
            let u = build_universe(cfg)?;
            let desc = universe_descriptor(&u);
            let found = enumerate_semibricks(&u)?;
            eprintln!("found {} semibricks", found.len());
            let payload = SemibrickList {
                count: found.len(),
                semibricks: found
                    .iter()
                    .map(|sb| sb.members().iter().map(|c| c.index()).collect())
                    .collect(),
            };
            publish(cfg, name, &echo, Some(&desc), Verdict::Pass, payload, &[])
        }
        Command::Filt(_) => {
            let u = build_universe(cfg)?;
            let desc = universe_descriptor(&u);
            let raw = cfg
                .gens
                .as_ref()
                .ok_or_else(|| CliError::Config("filt needs --gens".into()))?;
            let gens = BrickSet::semibrick(u.clone(), ids_from(&u, raw)?)?;
            let closure = filt_closure(&u, &ctx, &gens)?;
            eprintln!("closure has {} classes", closure.len());
            let mut certificates = Vec::with_capacity(closure.len());
            for &id in &closure {
                let cert = filt_contains(&u, &ctx, &gens, id)?
                    .expect("closure members are certified");
                certificates.push(cert);
            }
            let payload = FiltPayload {
                generators: gens.members().iter().map(|c| c.index()).collect(),
                closure: closure.iter().map(|c| c.index()).collect(),
                certificates,
            };
            publish(cfg, name, &echo, Some(&desc), Verdict::Pass, payload, &[])
        }
        Command::WideCheck(_) => {
            let u = build_universe(cfg)?;
            let desc = universe_descriptor(&u);
            let raw = cfg
                .members
                .as_ref()
                .ok_or_else(|| CliError::Config("wide-check needs --members".into()))?;
            let mut members = ids_from(&u, raw)?;
            // Every additive subcategory contains zero; listing it is optional.
            members.insert(u.zero_class());
            let cand = SubcatCandidate::new(u.clone(), members)?;
            let mut wide = is_wide(&u, &ctx, &cand)?;
            let verdict = if wide.passed() {
                // Wideness makes the simples meaningful; report them as a
                // courtesy only in that case.
                let s = simples_of(&u, &ctx, &cand)?;
                eprintln!(
                    "wide; simples: {:?}",
                    s.iter().map(|c| c.index()).collect::<Vec<_>>()
                );
                Verdict::Pass
            } else {
                eprintln!(
                    "not wide: {} extension failures, {} factorization failures",
                    wide.extension_failures.len(),
                    wide.factorization_failures.len()
                );
                Verdict::Fail
            };
            let events = std::mem::take(&mut wide.truncation_events);
            publish(cfg, name, &echo, Some(&desc), verdict, &wide, &events)
        }
        Command::VerifyBijection(_) => {
            let u = build_universe(cfg)?;
            let desc = universe_descriptor(&u);
            let report = verify_bijection(&u, &ctx)?;
            eprintln!(
                "{} semibricks against {} length wide subcategories, {} failures",
                report.semibricks.len(),
                report.wide_subcats.len(),
                report.roundtrip_failures.len()
            );
            let verdict = report.verdict;
            let events = report.truncation_events.clone();
            publish(cfg, name, &echo, Some(&desc), verdict, &report, &events)
        }
        Command::VerifyCorollary(_) => {
            let u = build_universe(cfg)?;
            let desc = universe_descriptor(&u);
            let report = verify_corollary(&u, &ctx)?;
            eprintln!(
                "abelian: {}, simples semibrick: {}",
                report.abelian, report.simples_semibrick
            );
            let verdict = report.verdict;
            publish(cfg, name, &echo, Some(&desc), verdict, &report, &[])
        }
        Command::SplitExample(_) => {
            let u = build_universe(cfg)?;
            let desc = universe_descriptor(&u);
            let report = run_split_example(&u)?;
            let verdict = report.verdict;
            let events = report.truncation_events.clone();
            publish(cfg, name, &echo, Some(&desc), verdict, &report, &events)
        }
        Command::Selftest(_) => {
            // Selftest fixes its own universes; the echo is deliberately
            // empty so identical invocations yield identical reports no
            // matter what placeholder config resolution produced.
            let echo = ConfigEcho {
                quiver: None,
                p: None,
                bound: None,
                structure: None,
                ceiling: None,
                gens: None,
                members: None,
            };
            eprintln!("running invariant suites on the stock universes");
            let report = run_selftest()?;
            for c in &report.checks {
                eprintln!(
                    "  {} {}: {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            let verdict = if report.passed() {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            publish(cfg, name, &echo, None, verdict, &report, &[])
        }
    }
}
