use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use ritz_core::harness::io::{load_basis, load_matrix};
use ritz_core::harness::{
    generate, mixed_suite, sweep_theta, verify_all, verify_specs, verify_triple, Example, InstanceSpec, Outcome,
    RunReport, SpectrumSpec, SubspaceMode,
};
use serde_json::json;

/// Evaluate Ritz-value bounds on generated or user-supplied instances.
///
/// Exit status: 0 when every must-hold bound passes, 1 on any violation,
/// 2 on invalid input.
#[derive(Parser)]
#[command(name = "ritz-bounds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every bound on seeded random instances.
    Verify {
        #[arg(long, default_value_t = 6)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative tolerance of every verdict.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Mode::Random)]
        mode: Mode,
        /// Perturbation size for `--mode invariant`.
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        /// `uniform:LO,HI`, `clustered:GAP` or `explicit:V1,V2,...`.
        #[arg(long, default_value = "uniform:-1,1")]
        spectrum: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate the two diagonal 4x4 examples at one angle.
    Example {
        #[arg(long, value_enum)]
        name: Name,
        #[arg(long)]
        theta: f64,
        /// `a,b,c,d` with a < b < c < d.
        #[arg(long, default_value = "0,1,2,3")]
        params: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Tabulate an example over an angle grid.
    Sweep {
        #[arg(long, value_enum)]
        name: Name,
        /// Comma-separated angles, or `START:STOP:N` for N evenly spaced points.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value = "0,1,2,3")]
        params: String,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run every bound on matrices read from JSON files.
    CheckFile {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Independent random subspaces.
    Random,
    /// Invariant X, Y a perturbation of size --eps.
    Invariant,
    /// Y orthogonal to X.
    Orthogonal,
    /// Mixed suite: d in [4, 10], random and invariant modes (ignores --d, --k, --spectrum).
    Suite,
}

#[derive(Clone, Copy, ValueEnum)]
enum Name {
    Exa1,
    Exa2,
}

impl From<Name> for Example {
    fn from(n: Name) -> Self {
        match n {
            Name::Exa1 => Example::Exa1,
            Name::Exa2 => Example::Exa2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

/// Input problems exit with status 2.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> anyhow::Result<T> {
    r.map_err(|e| InputError(e.into()).into())
}

fn numbers(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("not a number: {t:?}")))
        .collect()
}

fn params(s: &str) -> anyhow::Result<[f64; 4]> {
    let v = numbers(s)?;
    v.try_into().map_err(|v: Vec<f64>| anyhow::anyhow!("expected 4 parameters a,b,c,d, got {}", v.len()))
}

fn spectrum(s: &str) -> anyhow::Result<SpectrumSpec> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    Ok(match kind {
        "uniform" => match numbers(rest)?[..] {
            [lo, hi] => SpectrumSpec::Uniform { lo, hi },
            _ => bail!("uniform spectrum needs LO,HI"),
        },
        "clustered" => match numbers(rest)?[..] {
            [gap] => SpectrumSpec::Clustered { gap },
            _ => bail!("clustered spectrum needs GAP"),
        },
        "explicit" => SpectrumSpec::Explicit { values: numbers(rest)? },
        other => bail!("unknown spectrum kind {other:?}"),
    })
}

fn grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [a, b, n] => {
            let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
            let n: usize = n.trim().parse()?;
            if n < 2 {
                bail!("a START:STOP:N grid needs N >= 2");
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        [_] => numbers(s),
        _ => bail!("grid must be a comma-separated list or START:STOP:N"),
    }
}

fn text_summary(r: &RunReport) -> String {
    let mut out = format!(
        "{} instances, {} violations, {} ms\n{:<38} {:>7} {:>7} {:>7} {:>12}  skipped by reason\n",
        r.instances,
        r.violations(),
        r.elapsed_ms,
        "theorem",
        "passed",
        "failed",
        "skipped",
        "worst margin"
    );
    for (id, t) in &r.tallies {
        let worst = r.worst_margins.get(id).map_or("-".to_string(), |m| format!("{m:.3e}"));
        let name = if t.must_hold { id.clone() } else { format!("{id} (conjecture)") };
        let reasons: Vec<String> = t.skipped.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!(
            "{name:<38} {:>7} {:>7} {:>7} {worst:>12}  {}\n",
            t.passed,
            t.failed,
            t.skipped_total(),
            reasons.join(" ")
        ));
    }
    out
}

fn outcomes_json(outcomes: &[(&'static str, Outcome)]) -> (serde_json::Value, bool) {
    let violated = outcomes
        .iter()
        .any(|(_, o)| matches!(o, Outcome::Ran(r) if r.is_violation()));
    let map: serde_json::Map<String, serde_json::Value> = outcomes
        .iter()
        .map(|(id, o)| (id.to_string(), serde_json::to_value(o).expect("outcome serializes")))
        .collect();
    (serde_json::Value::Object(map), violated)
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn paper_spec(name: Name, [a, b, c, d]: [f64; 4], theta: f64) -> InstanceSpec {
    let spectrum = match name {
        Name::Exa1 => SpectrumSpec::PaperExa1 { a, b, c, d, theta },
        Name::Exa2 => SpectrumSpec::PaperExa2 { a, b, c, d, theta },
    };
    InstanceSpec {
        spectrum,
        ..InstanceSpec::paper_exa1(theta)
    }
}

fn check_tol(tol: f64) -> anyhow::Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        input(Err(anyhow::anyhow!("tolerance {tol} must be finite and >= 0")))
    }
}

/// Returns whether any must-hold bound failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let tol = match &cli.command {
        Command::Verify { tol, .. }
        | Command::Example { tol, .. }
        | Command::Sweep { tol, .. }
        | Command::CheckFile { tol, .. } => *tol,
    };
    check_tol(tol)?;
    match cli.command {
        Command::Verify {
            d,
            k,
            trials,
            seed,
            tol,
            mode,
            eps,
            spectrum: spec_text,
            format,
        } => {
            let report = if let Mode::Suite = mode {
                input(verify_specs(&mixed_suite(trials, seed), tol))?
            } else {
                let subspace_mode = match mode {
                    Mode::Random => SubspaceMode::RandomPair,
                    Mode::Invariant => SubspaceMode::InvariantPlusPerturbation { eps },
                    Mode::Orthogonal => SubspaceMode::OrthogonalPair,
                    Mode::Suite => unreachable!(),
                };
                let spec = InstanceSpec {
                    d,
                    k,
                    spectrum: input(spectrum(&spec_text))?,
                    subspace_mode,
                    seed,
                };
                input(verify_all(&spec, trials, tol))?
            };
            match format {
                Format::Json => println!("{}", pretty(&report)),
                Format::Text => print!("{}", text_summary(&report)),
            }
            Ok(report.has_violations())
        }
        Command::Example {
            name,
            theta,
            params: p,
            tol,
        } => {
            if !(theta > 0.0 && theta < FRAC_PI_2) {
                return input(Err(anyhow::anyhow!("theta {theta} outside (0, pi/2)")));
            }
            let inst = input(generate(&paper_spec(name, input(params(&p))?, theta)))?;
            let (bounds, violated) = outcomes_json(&ritz_core::harness::verify_instance(&inst, tol));
            println!("{}", pretty(&json!({ "spec": inst.spec, "bounds": bounds })));
            Ok(violated)
        }
        Command::Sweep {
            name,
            grid: g,
            params: p,
            format,
            tol,
        } => {
            let table = input(sweep_theta(name.into(), input(params(&p))?, &input(grid(&g))?, tol))?;
            match format {
                TableFormat::Csv => print!("{}", table.to_csv()?),
                TableFormat::Json => println!("{}", table.to_json()),
            }
            Ok(false)
        }
        Command::CheckFile { matrix, x, y, tol } => {
            let a = input(load_matrix(&matrix))?;
            let x = input(load_basis(&x))?;
            let y = input(load_basis(&y))?;
            if x.ambient_dim() != a.dim() || y.ambient_dim() != a.dim() || x.dim() != y.dim() {
                return input(Err(anyhow::anyhow!(
                    "shapes disagree: A is {0}x{0}, X is {1}x{2}, Y is {3}x{4}",
                    a.dim(),
                    x.ambient_dim(),
                    x.dim(),
                    y.ambient_dim(),
                    y.dim()
                )));
            }
            let (bounds, violated) = outcomes_json(&verify_triple(&a, &x, &y, None, tol));
            println!("{}", pretty(&bounds));
            Ok(violated)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("ritz-bounds: at least one must-hold bound was violated");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ritz-bounds: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
