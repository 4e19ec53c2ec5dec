//! `nilclean` command-line tool.
//!
//! Exit codes: 0 found / verified / holds, 1 proven-none / refuted,
//! 2 unknown / exported, 64 and above for usage, input, and internal errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nilclean::{
    c_polynomial, decompose, derive_identity, encode, frobenius_form, invariant_factors, iter_idempotents,
    parse_solver_output, survey, theorem_check, CnfInstance, Gf2Matrix, RuleSet, SatError, SearchError, SearchOptions,
    SearchReport, SearchStatus, SolverAnswer, Strategy,
};
use serde_json::json;

const EXIT_OK: u8 = 0;
const EXIT_NONE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NOINPUT: u8 = 66;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(name = "nilclean", version, about = "Nil-clean decompositions of matrices over GF(2)")]
struct Cli {
    /// Worker threads for enumerating searches (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    Brute,
    Stratified,
    Sat,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Brute => Strategy::Brute,
            StrategyArg::Stratified => Strategy::Stratified,
            StrategyArg::Sat => Strategy::Sat,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that t^4+t^3+1 annihilates C.
    VerifyC,
    /// Print the reduced word set of (P+Q)^4 + (P+Q)^3 under Q^E = 0.
    DeriveIdentity {
        #[arg(long, default_value_t = 3)]
        index: usize,
    },
    /// Search for A = P + Q with P^2 = P and Q^K = 0.
    Decompose {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        index: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Stratified)]
        strategy: StrategyArg,
        /// Also write the JSON certificate here.
        #[arg(long)]
        emit_cert: Option<PathBuf>,
        /// Decision budget for the built-in SAT solver.
        #[arg(long)]
        budget: Option<u64>,
        /// With --strategy sat, write the CNF instance here.
        #[arg(long)]
        cnf_out: Option<PathBuf>,
    },
    /// The direct sum of M (odd) copies of C has no index-three decomposition.
    Theorem {
        #[arg(long)]
        copies: usize,
        /// Where to write the CNF for M >= 3 (default: theorem-mM-k3.cnf).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decomposability of every similarity class of M_n(F_2).
    Survey {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        index: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Stratified)]
        strategy: StrategyArg,
    },
    /// List (or count) the idempotents of M_n(F_2).
    EnumerateIdempotents {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count_only: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Stratified)]
        strategy: StrategyArg,
    },
    /// Write the CNF encoding of a decomposition problem.
    ExportCnf {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        index: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode an external solver's answer for an exported CNF and verify it.
    ImportSolution {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Name of the solver that produced the answer, recorded in diagnostics.
        #[arg(long, default_value = "unspecified")]
        solver: String,
    },
    /// Invariant factors and Frobenius form.
    CanonicalForm {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Re-verify a JSON certificate written by `decompose`.
    VerifyCert {
        #[arg(long)]
        cert: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        let code = match e {
            SearchError::BruteTooLarge(_)
            | SearchError::StratifiedTooLarge(_)
            | SearchError::NotEnumerable
            | SearchError::BadIndex
            | SearchError::EvenCopies(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SatError> for Failure {
    fn from(e: SatError) -> Self {
        let code = match e {
            SatError::EncoderBug(_) => EXIT_SOFTWARE,
            SatError::Unsatisfied(_) => EXIT_NONE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        let code = if e.kind() == io::ErrorKind::NotFound { EXIT_NOINPUT } else { EXIT_IO };
        Failure::new(code, format!("{}: {e}", path.display()))
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<Gf2Matrix, Failure> {
    Gf2Matrix::parse_text(&read_file(path)?).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn status_code(status: SearchStatus) -> u8 {
    match status {
        SearchStatus::Found => EXIT_OK,
        SearchStatus::ExhaustedNone => EXIT_NONE,
        SearchStatus::Exported | SearchStatus::Unknown => EXIT_UNKNOWN,
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value")
}

fn run(cli: Cli, out: &mut String) -> Result<u8, Failure> {
    let opts = SearchOptions { workers: cli.workers, sat_budget: None };
    match cli.command {
        Command::VerifyC => {
            let c = Gf2Matrix::matrix_c();
            let f = c_polynomial();
            let value = c.eval_poly(&f);
            let holds = value.is_zero();
            let report = json!({
                "matrix": c.to_text(),
                "polynomial": f.to_bit_string(),
                "polynomial_display": f.to_string(),
                "c4": c.pow(4).to_text(),
                "c3": c.pow(3).to_text(),
                "value": value.to_text(),
                "holds": holds,
            });
            writeln!(out, "{}", pretty(&report)).unwrap();
            Ok(if holds { EXIT_OK } else { EXIT_NONE })
        }
        Command::DeriveIdentity { index } => {
            let rules = RuleSet::new(index).ok_or_else(|| Failure::new(EXIT_USAGE, "--index must be at least 1"))?;
            writeln!(out, "{}", derive_identity(&rules)).unwrap();
            Ok(EXIT_OK)
        }
        Command::Decompose { matrix, index, strategy, emit_cert, budget, cnf_out } => {
            let a = read_matrix(&matrix)?;
            let strategy: Strategy = strategy.into();
            let opts = SearchOptions { sat_budget: budget, ..opts };
            let report = if strategy == Strategy::Sat {
                if index == 0 {
                    return Err(SearchError::BadIndex.into());
                }
                let (report, cnf) = nilclean::search::decompose_sat(&a, index, budget);
                if let Some(path) = &cnf_out {
                    write_file(path, &cnf.to_dimacs())?;
                }
                report
            } else {
                decompose(&a, index, strategy, &opts)?
            };
            let text = report.to_json();
            if let Some(path) = &emit_cert {
                write_file(path, &format!("{text}\n"))?;
            }
            writeln!(out, "{text}").unwrap();
            Ok(status_code(report.status))
        }
        Command::Theorem { copies, out: cnf_path } => {
            let outcome = theorem_check(copies, &opts)?;
            if let Some(cnf) = &outcome.cnf {
                let path = cnf_path.unwrap_or_else(|| PathBuf::from(format!("theorem-m{copies}-k3.cnf")));
                write_file(&path, &cnf.to_dimacs())?;
                eprintln!(
                    "wrote {} ({} variables, {} clauses); satisfiability unknown until an external solver answers",
                    path.display(),
                    cnf.num_vars,
                    cnf.clauses.len()
                );
            }
            writeln!(out, "{}", outcome.report.to_json()).unwrap();
            Ok(status_code(outcome.report.status))
        }
        Command::Survey { n, index, strategy } => {
            let rows = survey(n, index, strategy.into(), &opts)?;
            writeln!(out, "chain\tstatus\tspace_size\twitness_p").unwrap();
            for row in &rows {
                let witness = row
                    .report
                    .witness
                    .as_ref()
                    .map(|w| w.p.to_text().lines().skip(1).collect::<Vec<_>>().join("/"))
                    .unwrap_or_else(|| "-".to_string());
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    row.class.chain_string(),
                    row.report.status,
                    row.report.space_size,
                    witness
                )
                .unwrap();
            }
            let code = rows.iter().map(|r| status_code(r.report.status)).max().unwrap_or(EXIT_OK);
            Ok(code)
        }
        Command::EnumerateIdempotents { n, count_only, strategy } => {
            let iter = iter_idempotents(n, strategy.into())?;
            if count_only {
                writeln!(out, "{}", iter.count()).unwrap();
            } else {
                for (idx, p) in iter.enumerate() {
                    if idx > 0 {
                        out.push('\n');
                    }
                    out.push_str(&p.to_text());
                }
            }
            Ok(EXIT_OK)
        }
        Command::ExportCnf { matrix, index, out: path } => {
            let a = read_matrix(&matrix)?;
            if index == 0 {
                return Err(SearchError::BadIndex.into());
            }
            let cnf = encode(&a, index);
            write_file(&path, &cnf.to_dimacs())?;
            let summary = json!({
                "n": a.dim(),
                "k": index,
                "path": path.display().to_string(),
                "variables": cnf.num_vars,
                "clauses": cnf.clauses.len(),
                "status": SearchStatus::Exported,
            });
            writeln!(out, "{}", pretty(&summary)).unwrap();
            Ok(EXIT_UNKNOWN)
        }
        Command::ImportSolution { cnf, solution, solver } => {
            let instance = CnfInstance::parse_dimacs(&read_file(&cnf)?)?;
            let meta = instance.meta.clone().ok_or(SatError::MissingMetadata)?;
            let answer = parse_solver_output(&read_file(&solution)?, instance.num_vars)?;
            let (status, witness) = match answer {
                SolverAnswer::Sat(assignment) => (SearchStatus::Found, Some(instance.decode_and_verify(&assignment)?)),
                SolverAnswer::Unsat => {
                    eprintln!(
                        "solver {solver:?} reports UNSATISFIABLE; recorded as an external claim, not certified here"
                    );
                    (SearchStatus::Unknown, None)
                }
                SolverAnswer::Unknown => (SearchStatus::Unknown, None),
            };
            let report = SearchReport {
                target: meta.target,
                k: meta.k,
                status,
                witness,
                strategy: Strategy::Sat,
                space_size: 0,
            };
            writeln!(out, "{}", report.to_json()).unwrap();
            Ok(status_code(status))
        }
        Command::CanonicalForm { matrix } => {
            let a = read_matrix(&matrix)?;
            let factors: Vec<String> = invariant_factors(&a).iter().map(|f| f.to_bit_string()).collect();
            let report = json!({
                "n": a.dim(),
                "invariant_factors": factors,
                "frobenius_form": frobenius_form(&a).to_text(),
            });
            writeln!(out, "{}", pretty(&report)).unwrap();
            Ok(EXIT_OK)
        }
        Command::VerifyCert { cert } => match SearchReport::from_json(&read_file(&cert)?) {
            Ok(report) => {
                let summary = json!({ "valid": true, "status": report.status });
                writeln!(out, "{}", pretty(&summary)).unwrap();
                Ok(EXIT_OK)
            }
            Err(e) => {
                eprintln!("{}: {e}", cert.display());
                let summary = json!({ "valid": false });
                writeln!(out, "{}", pretty(&summary)).unwrap();
                Ok(EXIT_NONE)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let mut out = String::new();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    let mut stdout = io::stdout().lock();
    if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(EXIT_IO);
    }
    ExitCode::from(code)
}
