use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use theta_lab::checks;
use theta_lab::config::{ConstantChoice, RunConfig, Threads, THREADS_ENV};
use theta_lab::rankin::ResidueCandidates;
use theta_lab::report::{emit_report, render_report, CheckResult, Status};
use theta_lab::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "theta-lab", version, about = "Numerical checks of the Petersson norm of the Jacobi theta function")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Odd primes, comma separated.
    #[arg(long, global = true)]
    p: Option<String>,
    /// Real spectral parameters for the direct Rankin integral, comma separated.
    #[arg(long, global = true)]
    s: Option<String>,
    /// Truncation height of the fundamental-domain quadrature.
    #[arg(long = "Y", global = true)]
    y_trunc: Option<String>,
    #[arg(long, global = true)]
    tol_tile: Option<String>,
    #[arg(long, global = true)]
    tol_ip: Option<String>,
    /// Heights for the Fourier-constant fit, comma separated.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Fourier constant: `auto` (fitted) or a number.
    #[arg(long, global = true)]
    c: Option<String>,
    /// Report path for full-report (stdout if absent).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads: a count or `auto`; THETA_LAB_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<String>,
    /// Seed for random test points.
    #[arg(long, global = true)]
    seed: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Special-function and theta invariants.
    Selftest,
    /// Transformation law, Gamma_0(4) invariance and Fricke identity.
    LawCheck,
    /// Fit the Fourier constant of the x-average.
    Xavg,
    /// Direct Rankin integral against its closed form.
    Ip,
    /// Residue extractions and residue candidates.
    Residues,
    /// Direct norm, norm from residues, index scaling.
    Norm,
    /// Everything, written as a report.
    FullReport,
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    let flags = [
        ("p", &cli.p),
        ("s", &cli.s),
        ("Y", &cli.y_trunc),
        ("tol-tile", &cli.tol_tile),
        ("tol-ip", &cli.tol_ip),
        ("grid", &cli.grid),
        ("c", &cli.c),
        ("out", &cli.out),
        ("threads", &cli.threads),
        ("seed", &cli.seed),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    let env = std::env::var(THREADS_ENV).ok();
    cfg.threads = cfg.effective_threads(env.as_deref())?;
    cfg.validate()?;
    Ok(cfg)
}

fn print_checks(rows: &[CheckResult]) {
    for r in rows {
        let expected = r.expected.map_or("-".to_string(), |e| format!("{e:.6e}"));
        println!(
            "{:<12} {:<32} measured={:.6e} expected={} tol={:.1e}  {}",
            r.status.to_string().to_uppercase(),
            r.id,
            r.measured,
            expected,
            r.tolerance,
            r.description
        );
    }
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<Vec<CheckResult>, Error> {
    let fitted = |cfg: &RunConfig| -> Result<(f64, CheckResult), Error> {
        let (fit, check) = checks::ac4_fourier_constant(cfg)?;
        Ok((checks::resolve_constant(cfg, &fit), check))
    };
    match cmd {
        Command::Selftest => checks::selftest(cfg),
        Command::LawCheck => checks::law_check(cfg),
        Command::Xavg => {
            let (fit, check) = checks::ac4_fourier_constant(cfg)?;
            println!("fitted c = {:.15}", fit.c);
            println!("fit residual = {:.3e}", fit.residual);
            println!("{}", checks::describe_constant(fit.c));
            for (y, a) in fit.grid.iter().zip(&fit.averages) {
                println!("  A({y}) = {a:.15}");
            }
            Ok(vec![check])
        }
        Command::Ip => {
            let (c, _) = fitted(cfg)?;
            println!("Fourier constant used: {c:.12}");
            Ok(vec![checks::ac5_rankin_integral(cfg, c)?])
        }
        Command::Residues => {
            let (c_fit, check) = match cfg.constant {
                ConstantChoice::Auto => fitted(cfg).map(|(c, k)| (c, Some(k)))?,
                ConstantChoice::Fixed(v) => (v, None),
            };
            println!("{:>4} {:>18} {:>18} {:>18} {:>18}", "p", "c = 2", "c = 4", format!("c = {c_fit:.6}"), "stated 2(1-1/p)");
            for &p in &cfg.primes {
                let r = ResidueCandidates::compute(p, c_fit)?;
                println!(
                    "{:>4} {:>18.12} {:>18.12} {:>18.12} {:>18.12}",
                    p, r.displayed_constant, r.parseval_constant, r.fitted_constant, r.stated
                );
                println!(
                    "{:>4} {:>18.12} {:>18.12} {:>18.12} {:>18.12}   (implied norm / pi)",
                    "",
                    r.implied_norm(r.displayed_constant) / std::f64::consts::PI,
                    r.implied_norm(r.parseval_constant) / std::f64::consts::PI,
                    r.implied_norm(r.fitted_constant) / std::f64::consts::PI,
                    r.implied_norm(r.stated) / std::f64::consts::PI
                );
            }
            let mut rows: Vec<CheckResult> = check.into_iter().collect();
            rows.push(checks::ac6_residue_machinery()?);
            rows.push(checks::ac7_eisenstein_residue()?);
            Ok(rows)
        }
        Command::Norm => {
            let (c, _) = fitted(cfg)?;
            let (summary, check) = checks::ac8_norm_consistency(cfg, c)?;
            let d = &summary.direct;
            for ((label, v), e) in d.tile_labels.iter().zip(&d.tile_values).zip(&d.tile_errors) {
                println!("  tile {label:<6} {v:.15}  (err {e:.1e})");
            }
            println!("  tail correction {:.15}", d.tail_correction);
            println!("norm (direct, Y = {}) = {:.15} = {:.15} pi", d.y_used, d.total, d.ratio_to_pi);
            for (p, v) in &summary.from_residue {
                println!("norm (residue, p = {p}) = {v:.15} = {:.15} pi", v / std::f64::consts::PI);
            }
            Ok(vec![check, checks::ac9_index_scaling(cfg)?])
        }
        Command::FullReport => {
            let report = checks::full_report(cfg)?;
            match &cfg.out {
                Some(path) => emit_report(&report, path)
                    .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{}", render_report(&report)),
            }
            eprintln!(
                "final ratio to pi = {:.12}; agreement with claimed ratio {} : {}",
                report.final_ratio_to_pi, report.claimed_ratio, report.agreement_with_claim
            );
            Ok(report.checks)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("theta-lab: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Threads::Count(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("theta-lab: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli.command, &cfg) {
        Ok(rows) => {
            // the full report goes to stdout when no path is given; keep it parseable
            if !(matches!(cli.command, Command::FullReport) && cfg.out.is_none()) {
                print_checks(&rows);
            }
            if rows.iter().any(|r| r.status == Status::Fail) {
                ExitCode::from(EXIT_FAIL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) if e.is_budget_exhausted() => {
            eprintln!("theta-lab: numerical budget exhausted: {e}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Error::InvalidInput(msg)) => {
            eprintln!("theta-lab: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("theta-lab: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
