//! `gce-lab`: generator inspection, potential decomposition, stationary solves,
//! generalized currents, GCE residual checks and resolution scans.
//!
//! Exit status: 0 on success, 1 when a verdict fails, 2 on usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gce_core::scenario::{
    builtin_names, builtin_scenario, load_scenario, run_scenario, scan_scenario, solve_report,
    write_reports, OutputKind, ReportBundle, RunOptions, Scenario,
};
use gce_core::{build_basis, decompose_matrix, CMatrix, Complex64, GeneratorKind};

const DEFAULT_OUT: &str = "gce-lab-out";
const OUT_ENV: &str = "GCE_LAB_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "gce-lab",
    version,
    about = "Generalized continuity equations for coupled 1-D Dirac and Schrodinger systems",
    after_help = "Exit status: 0 success, 1 verdict failure, 2 usage or input error.\n\
                  Reports go to --out, else $GCE_LAB_OUT, else ./gce-lab-out."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the SU(N) generators and their nonzero structure constants
    Generators {
        /// Rank N of SU(N), at least 2
        n: usize,
    },
    /// Split a Hermitian matrix into V0 times the identity plus C_k T_k
    Decompose {
        /// Text file with one matrix row per line; entries like 0.5, 2i or 0.3-1.2i
        matrix: PathBuf,
    },
    /// Solve the scenario's stationary states and write them on the grid
    Solve(ScenarioArgs),
    /// Write generator, pair and transformed currents with domain constancy verdicts
    Currents(ScenarioArgs),
    /// Write GCE residuals with second-order convergence verdicts
    GceVerify(ScenarioArgs),
    /// Repeat the residual check over several grid spacings and report the order
    Scan {
        #[command(flatten)]
        common: ScenarioArgs,
        /// Comma-separated grid spacings, coarse to fine, e.g. 1e-2,5e-3,2.5e-3
        #[arg(long = "h", value_name = "LIST", value_delimiter = ',', required = true, num_args = 1..)]
        spacings: Vec<f64>,
    },
    /// Run every output the scenario requests
    Run(ScenarioArgs),
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Scenario file path or built-in name (fig1a, fig1b, fig2, free, unequal-potentials,
    /// unequal-potentials-schrodinger)
    #[arg(long, value_name = "PATH|NAME")]
    scenario: String,
    /// Output directory [default: $GCE_LAB_OUT or ./gce-lab-out]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Number of grid points, replacing the scenario's (built-ins use 4001)
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Strength of every delta barrier in the scenario (the fig2 lambda)
    #[arg(long, value_name = "X", allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Dirac gamma-matrix convention [default: the scenario's, else "default"]
    #[arg(long, value_name = "NAME")]
    convention: Option<String>,
    /// Relative tolerance for domain constancy and delta relations
    #[arg(long, value_name = "X", default_value = "1e-8")]
    tol: f64,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario> {
        let mut s = if Path::new(&self.scenario).exists() {
            load_scenario(&self.scenario)?
        } else if builtin_names().contains(&self.scenario.as_str()) {
            builtin_scenario(&self.scenario)?
        } else {
            bail!(
                "no scenario file or built-in named `{}` (built-ins: {})",
                self.scenario,
                builtin_names().join(", ")
            );
        };
        if let Some(n) = self.grid {
            s.set_grid_points(n);
        }
        if let Some(lambda) = self.lambda {
            if s.profile.deltas().is_empty() {
                bail!("--lambda given but scenario `{}` has no delta barrier", s.name);
            }
            s.set_delta_strength(lambda);
        }
        if let Some(name) = &self.convention {
            s.set_convention(name)?;
        }
        s.validate()?;
        Ok(s)
    }

    fn options(&self) -> Result<RunOptions> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("--tol must be positive, got {}", self.tol);
        }
        Ok(RunOptions { tol: self.tol })
    }

    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

/// Writes the bundle, prints the summary and maps verdicts to an exit status.
fn emit(bundle: &ReportBundle, args: &ScenarioArgs) -> Result<ExitCode> {
    let dir = args.out_dir();
    let files = write_reports(bundle, &dir).with_context(|| format!("writing reports to {}", dir.display()))?;
    print!("{}", bundle.summary_json()?);
    for f in &files {
        eprintln!("wrote {}", f.display());
    }
    let failed: Vec<&str> = bundle
        .summary
        .verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| v.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed verdicts: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn with_outputs(args: &ScenarioArgs, outputs: &[OutputKind]) -> Result<ReportBundle> {
    let mut s = args.scenario()?;
    s.requested_outputs = outputs.to_vec();
    Ok(run_scenario(&s, &args.options()?)?)
}

fn format_complex(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn print_matrix(m: &CMatrix) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(&m[(i, j)])).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn generators(n: usize) -> Result<()> {
    let basis = build_basis(n)?;
    println!("SU({n}): {} generators, Tr(T_a T_b) = delta_ab / 2", basis.dim());
    for (a, t) in basis.generators().iter().enumerate() {
        let kind = match basis.kind(a) {
            GeneratorKind::Symmetric { row, col } => format!("symmetric ({}, {})", row + 1, col + 1),
            GeneratorKind::Antisymmetric { row, col } => format!("antisymmetric ({}, {})", row + 1, col + 1),
            GeneratorKind::Cartan { level } => format!("cartan level {level}"),
        };
        println!("T_{} {kind}", a + 1);
        print_matrix(t);
    }
    println!("nonzero f_abc with a < b < c:");
    for (a, b, c, f) in basis.structure_constants().nonzero_ordered(1e-12) {
        println!("  f_{},{},{} = {f}", a + 1, b + 1, c + 1);
    }
    Ok(())
}

fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<Complex64>()
                    .with_context(|| format!("{}:{}: bad entry `{s}`", path.display(), k + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("{}: expected a square matrix, got {n} rows of lengths {:?}", path.display(), rows.iter().map(Vec::len).collect::<Vec<_>>());
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn decompose_file(path: &Path) -> Result<()> {
    let v = read_matrix(path)?;
    let basis = build_basis(v.nrows())?;
    let (v0, coeffs) = decompose_matrix(&v, &basis)?;
    println!("V0 = {v0}");
    for (k, c) in coeffs.iter().enumerate() {
        println!("C_{} = {c}", k + 1);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generators { n } => generators(n).map(|_| ExitCode::SUCCESS),
        Command::Decompose { matrix } => decompose_file(&matrix).map(|_| ExitCode::SUCCESS),
        Command::Solve(args) => {
            let bundle = solve_report(&args.scenario()?, &args.options()?)?;
            emit(&bundle, &args)
        }
        Command::Currents(args) => {
            let bundle = with_outputs(&args, &[OutputKind::Currents, OutputKind::Domains])?;
            emit(&bundle, &args)
        }
        Command::GceVerify(args) => {
            let bundle = with_outputs(&args, &[OutputKind::Residuals])?;
            emit(&bundle, &args)
        }
        Command::Scan { common, spacings } => {
            let bundle = scan_scenario(&common.scenario()?, &spacings, &common.options()?)?;
            emit(&bundle, &common)
        }
        Command::Run(args) => {
            let bundle = run_scenario(&args.scenario()?, &args.options()?)?;
            emit(&bundle, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
