//! Command-line front end.
//!
//! Exit codes: 0 on success (a `FAIL` answer included), 1 when `validate`
//! rejects a solution, 2 on usage, input and parse errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::criteria::{parse_criteria, CriteriaSeq};
use crate::facts::{generate, render_facts};
use crate::generator::{generate_instance, GenParams};
use crate::model::{CudfDocument, PackageId};
use crate::parser::{parse_document_with, render_document, render_solution};
use crate::preprocess::{compute_closure, full_scope, ClosureResult};
use crate::semantics::validate_solution;
use crate::solver::{solve_in, Limits, SolveOutcome};

#[derive(Debug, Parser)]
#[command(
    name = "cudf-upgrade",
    version,
    about = "Solve CUDF package upgradeability problems"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find an optimal follow-up installation, or print FAIL.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        /// Seconds before the best installation found so far is reported.
        #[arg(long, default_value_t = 300)]
        timeout: u64,
    },
    /// Print the logical facts for the document.
    Facts {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Report the sizes of the universe, the excluded set and the closure.
    Closure {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Check a solution file against a document.
    Validate {
        /// CUDF document, or `-` for standard input.
        document: String,
        /// Solution stanzas as printed by `solve`.
        solution: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a pseudo-random CUDF document.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CUDF document, or `-` for standard input.
    #[arg(default_value = "-")]
    pub input: String,
    /// `paranoid`, `trendy`, or signed names most significant first,
    /// e.g. `-removed,-changed`.
    #[arg(short, long, default_value = "paranoid", allow_hyphen_values = true)]
    pub criteria: String,
    /// Consider every package not excluded by the request.
    #[arg(long)]
    pub no_closure: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub packages: usize,
    #[arg(long, default_value_t = 0.6)]
    pub dep_density: f64,
    #[arg(long, default_value_t = 0.3)]
    pub conflict_density: f64,
    #[arg(long, default_value_t = 0.15)]
    pub provide_density: f64,
    #[arg(long, default_value_t = 0.3)]
    pub install_ratio: f64,
    #[arg(long, default_value_t = 2)]
    pub request_size: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl From<&GenArgs> for GenParams {
    fn from(args: &GenArgs) -> Self {
        GenParams {
            seed: args.seed,
            packages: args.packages,
            dep_density: args.dep_density,
            conflict_density: args.conflict_density,
            provide_density: args.provide_density,
            install_ratio: args.install_ratio,
            request_size: args.request_size,
        }
    }
}

/// Runs a command against the process streams.
pub fn run(config: CliConfig) -> i32 {
    run_with(
        config,
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    )
}

/// Runs a command against the given streams.
pub fn run_with(
    config: CliConfig,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    match execute(config, stdin, stderr) {
        Ok(Report { text, output, code }) => {
            let written = match output {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout
                    .write_all(text.as_bytes())
                    .and_then(|()| stdout.flush())
                    .map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(message) => {
                    let _ = writeln!(stderr, "error: {message}");
                    2
                }
            }
        }
        Err(message) => {
            let _ = writeln!(stderr, "error: {message}");
            2
        }
    }
}

struct Report {
    text: String,
    output: Option<PathBuf>,
    code: i32,
}

fn execute(
    config: CliConfig,
    stdin: &mut dyn Read,
    stderr: &mut dyn Write,
) -> Result<Report, String> {
    match config.command {
        Command::Solve { input, timeout } => {
            let (doc, criteria, scope) = load(&input, stdin, stderr)?;
            let limits = Limits {
                max_steps: None,
                timeout: Some(Duration::from_secs(timeout)),
            };
            let text = match solve_in(&doc, &criteria, &scope, &limits) {
                SolveOutcome::Optimal(sol) => {
                    let _ = writeln!(stderr, "objective: {}", sol.objective);
                    render_solution(&sol.installed)
                }
                SolveOutcome::Unsat => "FAIL\n".to_string(),
                SolveOutcome::TimedOut(Some(sol)) => {
                    let _ = writeln!(
                        stderr,
                        "warning: timed out; best objective: {}",
                        sol.objective
                    );
                    render_solution(&sol.installed)
                }
                SolveOutcome::TimedOut(None) => {
                    return Err("timed out before finding any installation".to_string())
                }
            };
            Ok(Report {
                text,
                output: input.output,
                code: 0,
            })
        }
        Command::Facts { input } => {
            let (doc, criteria, scope) = load(&input, stdin, stderr)?;
            let text = match generate(&doc, &criteria, &scope) {
                Ok(facts) => render_facts(&facts),
                Err(err) => {
                    let _ = writeln!(stderr, "warning: {err}");
                    String::new()
                }
            };
            Ok(Report {
                text,
                output: input.output,
                code: 0,
            })
        }
        Command::Closure { input } => {
            let (doc, _, scope) = load(&input, stdin, stderr)?;
            let text = format!(
                "universe={} out={} closure={} feasible={} iterations={}\n",
                doc.packages().len(),
                scope.out.len(),
                scope.closure.len(),
                scope.feasible,
                scope.iterations
            );
            Ok(Report {
                text,
                output: input.output,
                code: 0,
            })
        }
        Command::Validate {
            document,
            solution,
            output,
        } => {
            let doc = read_document(&document, stdin, stderr)?;
            let sol_text = fs::read_to_string(&solution)
                .map_err(|e| format!("cannot read {}: {e}", solution.display()))?;
            let installed: Vec<PackageId> = parse_document_with(&sol_text, |_| {})
                .map_err(|e| format!("{}: {e}", solution.display()))?
                .packages()
                .iter()
                .map(|p| p.id.clone())
                .collect();
            let report = validate_solution(&doc, &installed.into_iter().collect());
            let (text, code) = if report.ok {
                ("OK\n".to_string(), 0)
            } else {
                let mut text = String::new();
                for v in &report.violations {
                    text.push_str(&v.to_string());
                    text.push('\n');
                }
                (text, 1)
            };
            Ok(Report { text, output, code })
        }
        Command::Gen(args) => Ok(Report {
            text: render_document(&generate_instance(&GenParams::from(&args))),
            output: args.output,
            code: 0,
        }),
    }
}

fn load(
    input: &InputArgs,
    stdin: &mut dyn Read,
    stderr: &mut dyn Write,
) -> Result<(CudfDocument, CriteriaSeq, ClosureResult), String> {
    let criteria = parse_criteria(&input.criteria).map_err(|e| e.to_string())?;
    let doc = read_document(&input.input, stdin, stderr)?;
    let scope = if input.no_closure {
        full_scope(&doc)
    } else {
        compute_closure(&doc, &criteria)
    };
    Ok((doc, criteria, scope))
}

fn read_document(
    path: &str,
    stdin: &mut dyn Read,
    stderr: &mut dyn Write,
) -> Result<CudfDocument, String> {
    let mut bytes = Vec::new();
    if path == "-" {
        stdin
            .read_to_end(&mut bytes)
            .map_err(|e| format!("cannot read standard input: {e}"))?;
    } else {
        bytes = fs::read(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    }
    let text = String::from_utf8(bytes).map_err(|_| format!("{path}: invalid UTF-8"))?;
    parse_document_with(&text, |w| {
        let _ = writeln!(stderr, "warning: {path}: {w}");
    })
    .map_err(|e| format!("{path}: {e}"))
}
