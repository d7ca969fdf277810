//! Command-line front end: matrix generation, factorization, determinant,
//! inverse and solve, the error and timing experiments, operation counts
//! and the one-shot training demo.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure
//! (singular, breakdown, overflow).

pub mod bench;
pub mod train;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use tricorner::nnet::{self, Activation, TrainingProblem};
use tricorner::oracle;
use tricorner::{
    determinant, factorize, factorize_extended, inverse, parse_vector, pseudo_solve, solve,
    Corners, Error, Factorization, Scalar, StructuredMatrix, TallSystem,
};

use bench::{BenchConfig, Method};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tricorner",
    version,
    about = "Almost-tridiagonal matrix toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Order of the generated matrix.
    #[arg(long)]
    pub n: usize,
    /// Diagonal dominance margin.
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    #[arg(long, default_value = "none")]
    pub corners: Corners,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Matrix file.
    pub matrix: PathBuf,
    /// Carry the recurrences with an extended exponent range.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Comma-separated matrix orders.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long, default_value = "both")]
    pub corners: Corners,
    /// CSV output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random diagonally dominant matrix.
    Gen(GenArgs),
    /// Print λ, ζ, pivots and μ_n.
    Factor(MatrixArgs),
    /// Determinant: sign, value and ln|det|.
    Det(MatrixArgs),
    /// Dense inverse.
    Inv {
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve A x = b.
    Solve {
        #[command(flatten)]
        m: MatrixArgs,
        /// Right-hand side file.
        rhs: PathBuf,
    },
    /// Solve the tall system [A; 0] x = b, with b of length >= n.
    PinvSolve {
        #[command(flatten)]
        m: MatrixArgs,
        rhs: PathBuf,
    },
    /// Structured inverse against the LU inverse (relative error per trial).
    BenchError(ExperimentArgs),
    /// Timing and operation counts per method.
    BenchTime {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_delimiter = ',', value_enum)]
        methods: Option<Vec<Method>>,
    },
    /// Operation counts of factorization and solve against the 7n - 8 budget.
    Flops {
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
        #[arg(long, default_value = "both")]
        corners: Corners,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train a single-hidden-layer network by one structured solve per target.
    TrainDemo {
        /// Training CSV: features then targets, optional header.
        csv: PathBuf,
        /// Number of feature columns; all but the last by default.
        #[arg(long)]
        inputs: Option<usize>,
        /// Hidden units; defaults to the sample count.
        #[arg(long)]
        hidden: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "tanh")]
        activation: Activation,
        /// Model dump file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let numerical = e
                .downcast_ref::<Error>()
                .map(Error::is_numerical)
                .unwrap_or(false);
            let kind = e
                .downcast_ref::<Error>()
                .map(Error::kind)
                .unwrap_or("usage");
            let _ = writeln!(err, "error[{kind}]: {e:#}");
            if numerical {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn read_matrix(path: &Path) -> anyhow::Result<StructuredMatrix> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(StructuredMatrix::from_text(&text)?)
}

fn read_vector(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_vector(&text)?)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_csv(
    out: &mut dyn Write,
    path: Option<&Path>,
    records: &[bench::BenchRecord],
) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    bench::write_csv(&mut buf, records)?;
    emit(out, path, std::str::from_utf8(&buf)?)
}

fn print_factorization<T: Scalar + std::fmt::Display>(
    out: &mut dyn Write,
    f: &Factorization<T>,
) -> anyhow::Result<()> {
    let list = |v: &[T]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "n {}", f.n())?;
    writeln!(out, "lambda {}", list(f.lambda()))?;
    writeln!(out, "zeta {}", list(f.zeta()))?;
    writeln!(out, "pivots {}", list(f.pivots()))?;
    writeln!(out, "mu {}", f.mu())?;
    Ok(())
}

fn print_solution(out: &mut dyn Write, s: &tricorner::SolveResult) -> anyhow::Result<()> {
    let x: Vec<String> = s.x.iter().map(f64::to_string).collect();
    writeln!(out, "x {}", x.join(" "))?;
    writeln!(out, "residual_inf {:e}", s.residual_inf)?;
    Ok(())
}

fn print_det(out: &mut dyn Write, d: tricorner::DetResult) -> anyhow::Result<()> {
    if d.is_singular() {
        anyhow::bail!(Error::SingularMu);
    }
    writeln!(out, "sign {}", d.sign)?;
    writeln!(out, "value {}", d.value)?;
    writeln!(out, "log_abs {}", d.log_abs)?;
    Ok(())
}

fn default_orders(given: Option<Vec<usize>>, ladder: &[usize]) -> Vec<usize> {
    given.unwrap_or_else(|| ladder.to_vec())
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    match cmd {
        Command::Gen(a) => {
            let m = StructuredMatrix::random_dominant(a.n, a.margin, a.corners, a.seed)?;
            emit(out, a.out.as_deref(), &m.to_text())?;
        }
        Command::Factor(a) => {
            let m = read_matrix(&a.matrix)?;
            if a.extended {
                print_factorization(out, &factorize_extended(&m)?)?;
            } else {
                print_factorization(out, &factorize(&m)?)?;
            }
        }
        Command::Det(a) => {
            let m = read_matrix(&a.matrix)?;
            let d = if a.extended {
                determinant(&factorize_extended(&m)?)
            } else {
                determinant(&factorize(&m)?)
            };
            print_det(out, d)?;
        }
        Command::Inv { matrix, out: path } => {
            let m = read_matrix(&matrix)?;
            let inv = inverse(&factorize(&m)?)?;
            emit(out, path.as_deref(), &inv.to_string())?;
        }
        Command::Solve { m, rhs } => {
            let mat = read_matrix(&m.matrix)?;
            let b = read_vector(&rhs)?;
            let s = if m.extended {
                solve(&factorize_extended(&mat)?, &b)?
            } else {
                solve(&factorize(&mat)?, &b)?
            };
            print_solution(out, &s)?;
        }
        Command::PinvSolve { m, rhs } => {
            let mat = read_matrix(&m.matrix)?;
            let b = read_vector(&rhs)?;
            let sys = TallSystem::new(mat.clone(), b.len())?;
            let s = if m.extended {
                pseudo_solve(&factorize_extended(&mat)?, &sys, &b)?
            } else {
                pseudo_solve(&factorize(&mat)?, &sys, &b)?
            };
            print_solution(out, &s)?;
            let lsq = oracle::normal_eq_lsq(&sys.to_dense(), &b)?;
            let dev =
                s.x.iter()
                    .zip(&lsq)
                    .fold(0.0f64, |d, (p, q)| d.max((p - q).abs()));
            writeln!(out, "normal_eq_deviation_inf {dev:e}")?;
        }
        Command::BenchError(e) => {
            let cfg = BenchConfig {
                orders: default_orders(e.orders, &[64, 128, 256, 512]),
                trials: e.trials,
                seed: e.seed,
                margin: e.margin.unwrap_or(0.5),
                corners: e.corners,
            };
            let records = bench::bench_error(&cfg)?;
            emit_csv(out, e.out.as_deref(), &records)?;
        }
        Command::BenchTime { exp, methods } => {
            let cfg = BenchConfig {
                orders: default_orders(exp.orders, &[64, 128, 256, 512, 1024]),
                trials: exp.trials,
                seed: exp.seed,
                margin: exp.margin.unwrap_or(0.1),
                corners: exp.corners,
            };
            let methods = methods.unwrap_or_else(|| Method::ALL.to_vec());
            let records = bench::bench_time(&cfg, &methods)?;
            emit_csv(out, exp.out.as_deref(), &records)?;
            for (method, time, flops) in bench::slopes(&records) {
                let show = |v: Option<f64>| v.map_or("n/a".to_string(), |s| format!("{s:.3}"));
                writeln!(
                    err,
                    "slope {method}: time {} flops {}",
                    show(time),
                    show(flops)
                )?;
            }
        }
        Command::Flops {
            orders,
            margin,
            corners,
            seed,
        } => {
            let orders = default_orders(orders, &[256, 512, 1024, 2048, 4096, 8192]);
            let rows = bench::flop_table(&orders, margin, corners, seed)?;
            writeln!(out, "n,factorize,solve,budget_7n_minus_8,excess")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.n,
                    r.factorize,
                    r.solve,
                    7 * r.n as i64 - 8,
                    r.excess_over_budget()
                )?;
            }
            if rows.len() >= 2 {
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (r.n as f64, (r.factorize + r.solve) as f64))
                    .collect();
                writeln!(
                    err,
                    "slope factorize+solve: {:.4}",
                    tricorner::loglog_slope(&pts)
                )?;
            }
        }
        Command::TrainDemo {
            csv,
            inputs,
            hidden,
            seed,
            activation,
            out: path,
        } => {
            let (x, t) = train::read_training_csv(&csv, inputs)?;
            let mut problem = TrainingProblem::new(x, t, seed)?;
            problem.activation = activation;
            if let Some(h) = hidden {
                problem.hidden = h;
            }
            let hint =
                "pruned hidden system is not solvable; try another seed or fewer hidden units";
            let start = Instant::now();
            let model = nnet::train(&problem).context(hint)?;
            let structured_ns = start.elapsed().as_nanos();
            writeln!(
                out,
                "samples {} hidden {} solver {}",
                problem.samples(),
                problem.hidden,
                model.solver.label()
            )?;
            writeln!(out, "train_loss {:e}", model.train_loss)?;
            writeln!(
                out,
                "structured_solves {} gradient_steps {}",
                model.structured_solves, model.gradient_steps
            )?;
            let shifted = model.diag_shift.iter().filter(|&&s| s != 0.0).count();
            writeln!(out, "diagonal_entries_strengthened {shifted}")?;
            writeln!(out, "elapsed_ns {structured_ns}")?;
            if model.g_structured.is_some() {
                let start = Instant::now();
                let dense = nnet::train_dense(&problem).context(hint)?;
                let dense_ns = start.elapsed().as_nanos();
                let agreement = model.w_out.sub(&dense.w_out)?.max_abs();
                writeln!(out, "dense_train_loss {:e}", dense.train_loss)?;
                writeln!(out, "dense_elapsed_ns {dense_ns}")?;
                writeln!(out, "weight_agreement_max_abs {agreement:e}")?;
            }
            match path {
                Some(p) => {
                    std::fs::write(&p, train::dump_model(&model))
                        .with_context(|| format!("writing {}", p.display()))?;
                    writeln!(out, "model {}", p.display())?;
                }
                None => writeln!(out, "model not written (no --out)")?,
            }
        }
    }
    Ok(())
}
