//! Command-line driver for the verification engine.
//!
//! Every subcommand runs one check — a relation against the vanishing
//! oracle, the commutator suite, the spectral-curve reduction, symbol
//! separation, coefficient descent, or an operator dump — and emits one
//! self-describing report document to stdout and to a file. The
//! document is a pure function of the command line (plus a timestamp
//! that `--no-timestamp` suppresses), so reruns are byte-identical.
//!
//! Exit codes: 0 when the check passes, 1 when it fails or the engine
//! reports a runtime error, 2 on configuration errors.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cmspectra::catalog::{operator, OperatorName, SystemId};
use cmspectra::curves::{compare_sv_formula, reduce_a2_curve};
use cmspectra::report::{
    commutator_document, curve_document, descent_document, operator_document, relation_document,
    separation_document, unix_timestamp, Document, ReportFormat,
};
use cmspectra::verifier::descent::{
    a2_descent_generators, a2_descent_target, descend_to_spectral_polynomial,
};
use cmspectra::verifier::separation::check_symbol_separation;
use cmspectra::verifier::{
    build_samples, verify_commutators, verify_relation, RelationId, VerifyConfig,
};
use cmspectra::wpnum::{DEFAULT_PRECISION_BITS, DEFAULT_SERIES_TERMS};

#[derive(Parser)]
#[command(
    name = "cmspectra",
    version,
    about = "Verify the algebraic spectral relations of the elliptic \
             Calogero-Moser integrals (three-particle A2 and B2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify one spectral relation: numeric vanishing oracle plus the
    /// exact half-period reduction.
    Verify {
        /// System: a2 or b2.
        #[arg(long)]
        system: String,
        /// Relation id, with or without the system prefix
        /// (e.g. lemma-I12, a2_theorem1_second, quartic).
        #[arg(long)]
        relation: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Check all pairwise commutators of the system's integrals.
    Commutators {
        /// System: a2 or b2.
        #[arg(long)]
        system: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Reduce the three-particle relation to the planar spectral curve.
    Curve {
        /// Only a2-reduced is defined.
        #[arg(long)]
        system: String,
        /// Also diff the curve against the reference normalization
        /// (+108 g3 in the mu^2 coefficient).
        #[arg(long)]
        compare_sv: bool,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Test whether a candidate integral's principal symbol takes
    /// pairwise distinct values on the joint symbol fibre.
    Separation {
        /// System: a2 or b2.
        #[arg(long)]
        system: String,
        /// Operator name (e.g. L4 or I12).
        #[arg(long)]
        candidate: String,
        /// Number of independent fibres to test.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Rederive a relation coefficient by symbol descent through the
    /// commuting generators.
    Descent {
        /// Descent generators are defined for a2.
        #[arg(long)]
        system: String,
        /// Coefficient of the cubic relation to reproduce: A1, A2 or A3.
        #[arg(long)]
        target: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Print a catalog operator in its canonical dump form.
    DumpOperator {
        /// System: a2 or b2.
        #[arg(long)]
        system: String,
        /// Operator name (e.g. L1, I12, Ix).
        #[arg(long)]
        name: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Seed for the deterministic sample draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Working precision in bits; the CMSPECTRA_PRECISION_BITS
    /// environment variable overrides the built-in default.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Laurent series truncation order.
    #[arg(long, default_value_t = DEFAULT_SERIES_TERMS)]
    series_terms: usize,
    /// Relative vanishing tolerance (must lie in (0, 1)).
    #[arg(long, default_value_t = 1e-30)]
    tol: f64,
    /// Number of sample configurations.
    #[arg(long, default_value_t = 16)]
    samples: usize,
    /// Number of independent (g2, g3) draws.
    #[arg(long, default_value_t = 3)]
    g2g3_draws: usize,
    /// Report file; defaults to cmspectra-report.json / .txt in the
    /// working directory.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Report rendering.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl FormatArg {
    fn report(self) -> ReportFormat {
        match self {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Text => ReportFormat::Text,
        }
    }
}

/// Configuration errors exit with 2, runtime errors with 1.
#[derive(Debug)]
enum CliError {
    Config(String),
    Run(String),
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(e.to_string())
}

fn parse_system(s: &str) -> Result<SystemId, CliError> {
    SystemId::parse(s).ok_or_else(|| config_err(format!("unknown system {s:?}; expected a2 or b2")))
}

fn parse_operator(system: SystemId, s: &str) -> Result<OperatorName, CliError> {
    OperatorName::parse(s)
        .filter(|n| OperatorName::all_for(system).contains(n))
        .ok_or_else(|| {
            let known: Vec<&str> = OperatorName::all_for(system)
                .iter()
                .map(|n| n.name())
                .collect();
            config_err(format!(
                "unknown operator {s:?} for system {}; known: {}",
                system.name(),
                known.join(", ")
            ))
        })
}

fn parse_descent_target(s: &str) -> Result<u32, CliError> {
    match s.to_ascii_uppercase().as_str() {
        "A1" => Ok(1),
        "A2" => Ok(2),
        "A3" => Ok(3),
        _ => Err(config_err(format!(
            "unknown descent target {s:?}; expected A1, A2 or A3"
        ))),
    }
}

fn precision_from_env() -> Result<u32, CliError> {
    match std::env::var("CMSPECTRA_PRECISION_BITS") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|b| *b > 0)
            .ok_or_else(|| {
                config_err(format!(
                    "CMSPECTRA_PRECISION_BITS must be a positive integer, got {v:?}"
                ))
            }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_PRECISION_BITS),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(config_err("CMSPECTRA_PRECISION_BITS is not valid UTF-8"))
        }
    }
}

fn resolve_config(opts: &CommonOpts) -> Result<VerifyConfig, CliError> {
    let precision_bits = match opts.precision_bits {
        Some(b) if b > 0 => b,
        Some(_) => return Err(config_err("--precision-bits must be positive")),
        None => precision_from_env()?,
    };
    if opts.series_terms == 0 {
        return Err(config_err("--series-terms must be positive"));
    }
    if opts.samples == 0 {
        return Err(config_err("--samples must be positive"));
    }
    if opts.g2g3_draws == 0 {
        return Err(config_err("--g2g3-draws must be positive"));
    }
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(config_err("--tol must lie strictly between 0 and 1"));
    }
    Ok(VerifyConfig {
        seed: opts.seed,
        precision_bits,
        series_terms: opts.series_terms,
        tolerance: opts.tol,
        samples: opts.samples,
        g2g3_draws: opts.g2g3_draws,
    })
}

fn stamp(opts: &CommonOpts) -> Option<u64> {
    if opts.no_timestamp {
        None
    } else {
        Some(unix_timestamp())
    }
}

fn default_out_name(format: FormatArg) -> &'static str {
    match format {
        FormatArg::Json => "cmspectra-report.json",
        FormatArg::Text => "cmspectra-report.txt",
    }
}

/// Prints the rendering to stdout and writes it to the report file.
fn emit(doc: &Document, opts: &CommonOpts) -> Result<(), CliError> {
    let rendering = doc.render(opts.format.report());
    print!("{rendering}");
    let path = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_out_name(opts.format)));
    std::fs::write(&path, rendering.as_bytes())
        .map_err(|e| config_err(format!("cannot write report {}: {e}", path.display())))?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (doc, opts) = match cli.command {
        Cmd::Verify {
            system,
            relation,
            opts,
        } => {
            let system = parse_system(&system)?;
            let id = RelationId::parse(&relation, Some(system)).ok_or_else(|| {
                let known: Vec<&str> = RelationId::for_system(system)
                    .iter()
                    .map(|r| r.id())
                    .collect();
                config_err(format!(
                    "unknown relation {relation:?} for system {}; known: {}",
                    system.name(),
                    known.join(", ")
                ))
            })?;
            let cfg = resolve_config(&opts)?;
            let rep = verify_relation(id, &cfg).map_err(run_err)?;
            let doc = Document::Relation(relation_document(&rep, &cfg, stamp(&opts)));
            (doc, opts)
        }
        Cmd::Commutators { system, opts } => {
            let system = parse_system(&system)?;
            let cfg = resolve_config(&opts)?;
            let reps = verify_commutators(system, &cfg).map_err(run_err)?;
            let doc = Document::Commutators(commutator_document(system, &reps, &cfg, stamp(&opts)));
            (doc, opts)
        }
        Cmd::Curve {
            system,
            compare_sv,
            opts,
        } => {
            if system != "a2-reduced" {
                return Err(config_err(format!(
                    "unknown curve {system:?}; only a2-reduced is defined"
                )));
            }
            let doc = if compare_sv {
                let cmp = compare_sv_formula().map_err(run_err)?;
                Document::Curve(curve_document(&cmp.reduced, Some(&cmp), stamp(&opts)))
            } else {
                let curve = reduce_a2_curve().map_err(run_err)?;
                Document::Curve(curve_document(&curve, None, stamp(&opts)))
            };
            (doc, opts)
        }
        Cmd::Separation {
            system,
            candidate,
            trials,
            opts,
        } => {
            let system = parse_system(&system)?;
            let name = parse_operator(system, &candidate)?;
            if trials == 0 {
                return Err(config_err("--trials must be positive"));
            }
            let cfg = resolve_config(&opts)?;
            let rep = check_symbol_separation(system, name, trials, cfg.seed, cfg.precision_bits)
                .map_err(run_err)?;
            let doc = Document::Separation(separation_document(&rep, &cfg, stamp(&opts)));
            (doc, opts)
        }
        Cmd::Descent {
            system,
            target,
            opts,
        } => {
            let system = parse_system(&system)?;
            if system != SystemId::A2 {
                return Err(config_err(
                    "descent generators are defined for system a2 only",
                ));
            }
            let k = parse_descent_target(&target)?;
            let cfg = resolve_config(&opts)?;
            let target_op = a2_descent_target(k);
            let generators = a2_descent_generators();
            let mut set = build_samples(system, &cfg).map_err(run_err)?;
            let result =
                descend_to_spectral_polynomial(&target_op, &generators, &mut set, cfg.tolerance)
                    .map_err(run_err)?;
            let doc = Document::Descent(descent_document(
                &format!("A{k}"),
                &result,
                &cfg,
                stamp(&opts),
            ));
            (doc, opts)
        }
        Cmd::DumpOperator { system, name, opts } => {
            let system = parse_system(&system)?;
            let name = parse_operator(system, &name)?;
            let op = operator(system, name);
            let doc = Document::Operator(operator_document(system, name, &op, stamp(&opts)));
            (doc, opts)
        }
    };
    emit(&doc, &opts)?;
    Ok(doc.passed())
}

fn cli_main<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            let code = if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                0
            } else {
                2
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(cli_main(std::env::args_os()))
}
