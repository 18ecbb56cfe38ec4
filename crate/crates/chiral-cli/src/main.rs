//! `chiral`: verification suites and exact computations on the chiral model.

use chiral_cli::report::{Report, SCHEMA_VERSION};
use chiral_cli::suites::{self, Op, Params, Suite};
use chiral_core::sexpr::{parse, Document};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "chiral", version, about = "Exact checks of the polysimplicial chiral model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug)]
struct Flags {
    /// Dimension of the affine space.
    #[arg(long, global = true, default_value_t = 2)]
    n: u8,
    /// Number of points.
    #[arg(long, global = true, default_value_t = 3)]
    k: u8,
    /// Seed of the ChaCha8 generator; trial `t` uses `seed + t`.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 2)]
    max_pole: u32,
    /// Bound on numerator degree in windows, or on form degree of samples.
    #[arg(long, global = true, default_value_t = 2)]
    max_degree: u32,
    #[arg(long, global = true, default_value_t = 1)]
    max_udeg: u32,
    #[arg(long, global = true, default_value_t = 25)]
    trials: usize,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Expression file for `compute` and `certify-nonexact`.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Record wall time in the report; reports are then no longer
    /// reproducible byte for byte.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Apply one operation to the expression in `--input`.
    Compute {
        #[arg(value_enum)]
        op: OpArg,
        /// Collapsing pair for `mu2`: the second point goes to the first.
        #[arg(long, num_args = 2, default_values_t = [1u8, 2])]
        pair: Vec<u8>,
        /// Edge whose simplex `integrate` integrates over.
        #[arg(long, num_args = 2, default_values_t = [1u8, 2])]
        edge: Vec<u8>,
    },
    /// Window cohomology dimensions with a stabilization check.
    Dims,
    /// Try to prove the closed section in `--input` is not exact.
    CertifyNonexact {
        /// The residue operator tuple `(l_2, …, l_k)` with `l_j < j`;
        /// defaults to all ones.
        #[arg(long, num_args = 1..)]
        ells: Option<Vec<u8>>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Arnold,
    Mu2,
    Coherence,
    Cousin,
    Retract,
    Cohomology,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OpArg {
    D,
    Mu2,
    Mu3,
    Jac3,
    Integrate,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Arnold => Suite::Arnold,
            SuiteArg::Mu2 => Suite::Mu2,
            SuiteArg::Coherence => Suite::Coherence,
            SuiteArg::Cousin => Suite::Cousin,
            SuiteArg::Retract => Suite::Retract,
            SuiteArg::Cohomology => Suite::Cohomology,
        }
    }
}

impl From<OpArg> for Op {
    fn from(o: OpArg) -> Self {
        match o {
            OpArg::D => Op::D,
            OpArg::Mu2 => Op::Mu2,
            OpArg::Mu3 => Op::Mu3,
            OpArg::Jac3 => Op::Jac3,
            OpArg::Integrate => Op::Integrate,
        }
    }
}

fn read_input(flags: &Flags) -> Result<Document, String> {
    let path = flags.input.as_ref().ok_or("this command needs --input")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn run(cli: &Cli) -> Result<Report, String> {
    let f = &cli.flags;
    let params = Params {
        n: f.n,
        k: f.k,
        seed: f.seed,
        max_pole: f.max_pole,
        max_degree: f.max_degree,
        max_udeg: f.max_udeg,
        trials: f.trials,
    };
    let mut parameters = params.to_map();
    let start = Instant::now();
    let (command, checks) = match &cli.command {
        Command::Verify { suite } => {
            let suite = Suite::from(*suite);
            (format!("verify {}", suite.name()), suites::verify(suite, &params))
        }
        Command::Compute { op, pair, edge } => {
            let doc = read_input(f)?;
            parameters.insert("n".into(), doc.n.into());
            parameters.insert("k".into(), doc.k.into());
            let name = format!("compute {}", format!("{op:?}").to_lowercase());
            (name, suites::compute(Op::from(*op), &doc, (pair[0], pair[1]), (edge[0], edge[1])))
        }
        Command::Dims => ("dims".into(), suites::dims(&params)),
        Command::CertifyNonexact { ells } => {
            let doc = read_input(f)?;
            let ells = ells.clone().unwrap_or_else(|| vec![1; doc.k.saturating_sub(1) as usize]);
            parameters.insert("ells".into(), ells.clone().into());
            ("certify-nonexact".into(), suites::certify(&doc, &ells))
        }
    };
    let checks = checks.map_err(|e| e.to_string())?;
    Ok(Report {
        schema: SCHEMA_VERSION,
        command,
        parameters,
        checks,
        seed: f.seed,
        elapsed_ms: f.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.summary());
    if let Some(path) = &cli.flags.json {
        if let Err(e) = report.write_atomic(path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
