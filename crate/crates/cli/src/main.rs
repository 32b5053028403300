use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polar_dirac::harness::{
    run_invariance, run_nogo, run_verify, InvarianceReport, NogoReport, RunOptions, Scenario, VerifyReport, BUILTINS,
};
use polar_dirac::Error;

/// Verification harness for polar Dirac fields.
#[derive(Parser)]
#[command(name = "polar-dirac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Algebraic, transport, curvature and dynamical identity suites.
    Verify(Common),
    /// Lie derivatives along Killing fields and the invariance theorem.
    Invariance(Common),
    /// Parity no-go certificate for a spherical ansatz.
    Nogo(Common),
    /// Lists the built-in scenarios.
    List,
}

#[derive(Args)]
struct Common {
    /// Scenario file, or the name of a built-in scenario.
    scenario: String,
    /// Replaces every per-check tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Writes the JSON report here; `-` prints it instead of the summary.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Number of sample points.
    #[arg(long)]
    samples: Option<usize>,
    /// Vector field to use; may be repeated.
    #[arg(long)]
    killing: Vec<String>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            tolerance: self.tolerance,
            seed: self.seed,
            samples: self.samples,
            killing: self.killing.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn run(command: &Command) -> Result<bool, Error> {
    let common = match command {
        Command::List => {
            for name in BUILTINS {
                println!("{name}");
            }
            return Ok(true);
        }
        Command::Verify(c) | Command::Invariance(c) | Command::Nogo(c) => c,
    };
    if let Some(t) = common.tolerance {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::InvalidScenario(format!("tolerance must be positive, got {t}")));
        }
    }
    let prepared = Scenario::load(&common.scenario)?.prepare(&common.options())?;
    let (json, passed, summary) = match command {
        Command::Verify(_) => {
            let r = run_verify(&prepared)?;
            (serde_json::to_string_pretty(&r)?, r.passed, verify_summary(&r))
        }
        Command::Invariance(_) => {
            let r = run_invariance(&prepared)?;
            (serde_json::to_string_pretty(&r)?, r.passed, invariance_summary(&r))
        }
        Command::Nogo(_) => {
            let r = run_nogo(&prepared)?;
            (serde_json::to_string_pretty(&r)?, r.passed, nogo_summary(&r))
        }
        Command::List => unreachable!(),
    };
    match &common.json {
        Some(p) if p.as_os_str() == "-" => println!("{json}"),
        Some(p) => {
            std::fs::write(p, json + "\n")?;
            print!("{summary}");
        }
        None => print!("{summary}"),
    }
    Ok(passed)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify_summary(r: &VerifyReport) -> String {
    let mut out = format!("verify {} on {} ({} points)\n", r.scenario, r.chart, r.samples.len());
    for c in &r.checks {
        out += &format!(
            "  {} {:<28} {:>10.3e}  (tol {:.0e})\n",
            verdict(c.passed),
            c.name,
            c.max_residual,
            c.tolerance
        );
    }
    out += &format!("{}\n", overall(r.passed, &r.failures));
    out
}

fn invariance_summary(r: &InvarianceReport) -> String {
    let mut out = format!("invariance {} on {}\n", r.scenario, r.chart);
    for f in &r.fields {
        let max = |g: &dyn Fn(&polar_dirac::harness::PointLie) -> f64| f.points.iter().map(g).fold(0.0, f64::max);
        let weak = f.points.iter().filter(|p| p.weakly_invariant).count();
        let strong = f.points.iter().filter(|p| p.strongly_invariant).count();
        out += &format!(
            "  {:<6} weak {}/{}  strong {}/{}  max|L psi| {:.3e}  max|cond| {:.3e}",
            f.name,
            weak,
            f.points.len(),
            strong,
            f.points.len(),
            max(&|p| p.report.strong_residual),
            max(&|p| p.report.cond_residual.abs()),
        );
        if let Some(s) = &f.slope {
            out += &format!("  slope {:.6} (normalized {:.6})", s.slope, s.normalized_slope);
        }
        out += "\n";
    }
    for c in r.checks.iter().filter(|c| !c.passed) {
        out += &format!("  FAIL {} {:.3e} (tol {:.0e})\n", c.name, c.max_residual, c.tolerance);
    }
    out += &format!("{}\n", overall(r.passed, &r.failures));
    out
}

fn nogo_summary(r: &NogoReport) -> String {
    let c = &r.certificate;
    let mut out = format!("no-go certificate for {} ({} points)\n", r.scenario, c.samples);
    for k in &c.killing {
        out += &format!(
            "  {:<4} killing {:.1e}  weak {:.1e}  strong {:.3e}\n",
            k.name, k.max_residual, k.weak_residual, k.strong_residual
        );
    }
    out += "  parity constraints:\n";
    for k in &c.parity.constraints {
        out += &format!(
            "    {:<5} {:<14} {}\n",
            k.quantity,
            format!("{:?}", k.status).to_lowercase(),
            k.equation
        );
    }
    for (i, step) in c.deduction.iter().enumerate() {
        out += &format!("  {}. {}\n", i + 1, step);
    }
    out += &format!(
        "  constrained s.s = {}, required {}, discrepancy {}\n  grid: min |s_r| = {:.6} at alpha = {} (bound exp(B) = {:.6}, r = {})\n",
        c.constrained_norm, c.required_norm, c.discrepancy, c.witness.min_abs_s_r, c.witness.argmin_alpha, c.witness.bound, c.witness.r
    );
    out += if r.passed { "ESTABLISHED\n" } else { "NOT ESTABLISHED\n" };
    out
}

fn overall(passed: bool, failures: &[String]) -> String {
    if passed {
        "PASS".into()
    } else {
        format!("FAIL: {}", failures.join(", "))
    }
}
