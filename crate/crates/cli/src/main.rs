use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use glmix_cli::report::{format_sig, SuiteReport};
use glmix_cli::suites::{run_suite, sort_records, SuiteConfig, SuiteName};
use glmix_core::density::{exponential, half_normal, laplace, normal, triangular_unit, ScalarDensity};
use glmix_core::densities::{gig_density, GigParams};
use glmix_core::mixtures::{penalty, PenaltyFamily};
use glmix_core::samplers::{inverse_cdf_sample, khintchine_sample};
use glmix_core::transforms::daughter_density;

#[derive(Parser)]
#[command(name = "glmix", version, about = "Verify scale-mixture identities, evaluate penalties, draw samples")]
struct Cli {
    /// Cap on worker threads (also capped by GLMIX_WORKERS)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a JSON report
    Verify {
        /// Suite to run (repeatable); `all` expands to every suite
        #[arg(long = "suite", required = true, num_args = 1..)]
        suites: Vec<SuiteName>,
        /// Override the comparison tolerance of every record
        #[arg(long = "tol")]
        tol: Option<f64>,
        /// Monte Carlo sample count per goodness-of-fit run
        #[arg(long = "mc-samples", default_value = "1e5", value_parser = parse_count)]
        mc_samples: usize,
        #[arg(long, default_value_t = 20_160_301)]
        seed: u64,
        /// Report destination; `-` for stdout
        #[arg(long = "out")]
        out: Option<String>,
    },
    /// Evaluate a regularization penalty at a point
    Penalty {
        #[arg(long)]
        family: FamilyName,
        /// Laplace rate for the lasso family
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        /// Evaluation point for the svm/check_loss families (alias of --x)
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        lambda1: Option<f64>,
        #[arg(long)]
        lambda2: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
    },
    /// Draw a reproducible sample batch and write it as CSV
    Sample {
        #[arg(long)]
        density: DensityName,
        #[arg(long, default_value = "inverse_cdf")]
        method: MethodName,
        #[arg(short = 'n', long = "n", default_value = "10000", value_parser = parse_count)]
        n: usize,
        #[arg(long, default_value_t = 20_160_301)]
        seed: u64,
        /// CSV destination; stdout when omitted
        #[arg(long = "out")]
        out: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        loc: Option<f64>,
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mean: Option<f64>,
        #[arg(long)]
        var: Option<f64>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[clap(rename_all = "snake_case")]
enum FamilyName {
    Lasso,
    Svm,
    CheckLoss,
    ElasticNet,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[clap(rename_all = "snake_case")]
enum DensityName {
    Laplace,
    Normal,
    Triangular,
    Exp,
    HalfNormal,
    Gig,
    DaughterHalfNormal,
    DaughterExp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[clap(rename_all = "snake_case")]
enum MethodName {
    Khintchine,
    InverseCdf,
}

/// Counts may be given in scientific notation (`1e5`).
fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v.is_nan() || v < 1.0 || v.fract() != 0.0 || v > 1e12 {
        return Err(format!("not a positive integer count: {s}"));
    }
    Ok(v as usize)
}

fn init_workers(flag: Option<usize>) {
    let env_cap = std::env::var("GLMIX_WORKERS").ok().and_then(|s| s.parse::<usize>().ok());
    let chosen = match (flag, env_cap) {
        (Some(f), Some(e)) => Some(f.min(e)),
        (Some(f), None) => Some(f),
        (None, Some(e)) => Some(e),
        (None, None) => None,
    };
    if let Some(n) = chosen {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() {
    let cli = Cli::parse();
    init_workers(cli.workers);
    let code = match cli.command {
        Command::Verify { suites, tol, mc_samples, seed, out } => {
            cmd_verify(suites, tol, mc_samples, seed, out)
        }
        Command::Penalty { family, alpha, a, b, c, tau, lambda1, lambda2, sigma, x } => {
            cmd_penalty(family, alpha, a, b, c, tau, lambda1, lambda2, sigma, x)
        }
        Command::Sample { density, method, n, seed, out, loc, scale, mean, var, rate, lambda, delta, gamma, a, b } => {
            cmd_sample(density, method, n, seed, out, loc, scale, mean, var, rate, lambda, delta, gamma, a, b)
        }
    };
    std::process::exit(code);
}

fn cmd_verify(
    suites: Vec<SuiteName>,
    tol: Option<f64>,
    mc_samples: usize,
    seed: u64,
    out: Option<String>,
) -> i32 {
    let selected: Vec<SuiteName> = if suites.contains(&SuiteName::All) {
        SuiteName::concrete()
    } else {
        let mut s = suites;
        s.sort();
        s.dedup();
        s
    };
    let config = SuiteConfig {
        suites: selected.clone(),
        abs_tol: tol,
        mc_samples,
        seed,
        output_path: out.clone(),
    };
    if let Err(msg) = config.validate() {
        eprintln!("configuration error: {msg}");
        return 2;
    }

    let per_suite: Vec<(SuiteName, Vec<glmix_core::mixtures::VerificationRecord>)> = selected
        .par_iter()
        .map(|&name| (name, run_suite(name, &config)))
        .collect();

    let mut records = Vec::new();
    for (name, recs) in per_suite {
        let failed = recs.iter().filter(|r| !r.pass).count();
        println!(
            "suite {:<13} {:>4} records, {}",
            name.as_str(),
            recs.len(),
            if failed == 0 { "all pass".to_string() } else { format!("{failed} FAILED") }
        );
        for r in recs.iter().filter(|r| !r.pass) {
            println!(
                "  FAIL {} {:?}: lhs {:.9e}, rhs {:.9e}, abs_err {:.3e}, tol {:.1e} {}",
                r.identity_id, r.params, r.lhs, r.rhs, r.abs_err, r.tol, r.notes
            );
        }
        records.extend(recs);
    }
    sort_records(&mut records);
    let report = SuiteReport::new(config, records);
    println!(
        "total: {} records, all_pass = {}",
        report.records.len(),
        report.all_pass
    );

    match out.as_deref() {
        Some("-") => print!("{}", report.to_json()),
        Some(path) => {
            if let Err(e) = std::fs::write(Path::new(path), report.to_json()) {
                eprintln!("cannot write report to {path}: {e}");
                return 2;
            }
            println!("report written to {path}");
        }
        None => {}
    }
    if report.all_pass {
        0
    } else {
        1
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_penalty(
    family: FamilyName,
    alpha: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    tau: Option<f64>,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    sigma: Option<f64>,
    x: Option<f64>,
) -> i32 {
    let point = x.or(b);
    let built = match family {
        FamilyName::Lasso => Ok(PenaltyFamily::Lasso { alpha: alpha.unwrap_or(1.0) }),
        FamilyName::Svm => match (a, c) {
            (Some(a), Some(c)) => Ok(PenaltyFamily::Svm { a, c }),
            _ => Err("svm penalty needs --a and --c".to_string()),
        },
        FamilyName::CheckLoss => match tau {
            Some(tau) => Ok(PenaltyFamily::CheckLoss { tau }),
            None => Err("check_loss penalty needs --tau".to_string()),
        },
        FamilyName::ElasticNet => match (lambda1, lambda2, sigma) {
            (Some(l1), Some(l2), Some(s)) => {
                Ok(PenaltyFamily::ElasticNet { lambda1: l1, lambda2: l2, sigma: s })
            }
            _ => Err("elastic_net penalty needs --lambda1, --lambda2 and --sigma".to_string()),
        },
    };
    let Some(point) = point else {
        eprintln!("penalty needs an evaluation point (--x, or --b for svm/check_loss)");
        return 2;
    };
    match built.and_then(|f| penalty(&f, point).map_err(|e| e.to_string())) {
        Ok(v) => {
            println!("{}", format_sig(v, 12));
            0
        }
        Err(e) => {
            eprintln!("{e}");
            2
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    density: DensityName,
    method: MethodName,
    n: usize,
    seed: u64,
    out: Option<String>,
    loc: Option<f64>,
    scale: Option<f64>,
    mean: Option<f64>,
    var: Option<f64>,
    rate: Option<f64>,
    lambda: Option<f64>,
    delta: Option<f64>,
    gamma: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
) -> i32 {
    let built: Result<ScalarDensity, String> = match density {
        DensityName::Laplace => Ok(laplace(loc.unwrap_or(0.0), scale.unwrap_or(1.0))),
        DensityName::Normal => Ok(normal(mean.unwrap_or(0.0), var.unwrap_or(1.0))),
        DensityName::Triangular => Ok(triangular_unit()),
        DensityName::Exp => Ok(exponential(rate.unwrap_or(1.0))),
        DensityName::HalfNormal => Ok(half_normal()),
        DensityName::Gig => GigParams::new(
            lambda.unwrap_or(1.0),
            delta.unwrap_or(1.0),
            gamma.unwrap_or(1.0),
        )
        .and_then(gig_density)
        .map_err(|e| e.to_string()),
        DensityName::DaughterHalfNormal => {
            daughter_density(&half_normal(), a.unwrap_or(1.0), b.unwrap_or(1.0))
                .map_err(|e| e.to_string())
        }
        DensityName::DaughterExp => {
            daughter_density(&exponential(rate.unwrap_or(1.0)), a.unwrap_or(1.0), b.unwrap_or(1.0))
                .map_err(|e| e.to_string())
        }
    };
    let d = match built {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let batch = match method {
        MethodName::Khintchine => khintchine_sample(&d, n, seed),
        MethodName::InverseCdf => inverse_cdf_sample(&d, n, seed),
    };
    let batch = match batch {
        Ok(b) => b,
        Err(e) => {
            eprintln!("sampling failed: {e}");
            return 2;
        }
    };
    match out.as_deref() {
        Some(path) => {
            let file = match std::fs::File::create(Path::new(path)) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("cannot write {path}: {e}");
                    return 2;
                }
            };
            let mut w = std::io::BufWriter::new(file);
            if let Err(e) = batch.write_csv(&mut w).and_then(|_| w.flush()) {
                eprintln!("cannot write {path}: {e}");
                return 2;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = std::io::BufWriter::new(stdout.lock());
            if batch.write_csv(&mut w).and_then(|_| w.flush()).is_err() {
                return 2;
            }
        }
    }
    0
}
