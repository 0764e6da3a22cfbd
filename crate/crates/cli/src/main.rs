use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde_json::json;

use magic_simplex::boundary::{self, Family, ScanOptions};
use magic_simplex::io::read_coefficients_file;
use magic_simplex::phase_space::{canonicalize_subset, classify_subset, enumerate_lines, parse_points};
use magic_simplex::ppt::{b_spectrum, is_ppt, reduce_to_b};
use magic_simplex::simplex::{polytope_membership, polytope_membership_exact};
use magic_simplex::verify::run_all;
use magic_simplex::witness::{check_line_witness, min_eigen_line, LineWitness, PhiSearchOptions};
use magic_simplex::Error;

#[derive(Parser, Debug)]
#[command(name = "magic-simplex", version, about = "Bell-diagonal two-qutrit states: checks, PPT, witnesses and boundary scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the algebraic identity suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Classify a set of phase-space points, e.g. "0,0;1,0;2,0".
    Classify {
        #[arg(long)]
        points: String,
    },
    /// PPT verdict and spectrum of B for a coefficient file.
    Ppt {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Classify K = (lambda/3) 1 + g0 P00 + g1 P10 + g2 P20.
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        g0: f64,
        #[arg(long, allow_hyphen_values = true)]
        g1: f64,
        #[arg(long, allow_hyphen_values = true)]
        g2: f64,
        /// Grid points per side for the search over phi.
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// PPT and separability borders over a grid of alpha.
    Scan {
        #[arg(long)]
        family: Family,
        #[arg(long, allow_hyphen_values = true)]
        alpha_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha_max: f64,
        #[arg(long)]
        n: usize,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON with certificates and options.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Enclosure and kernel polytope membership for a coefficient file.
    Polytopes {
        #[arg(long)]
        coeffs: PathBuf,
    },
}

/// Exit status for a failed check (as opposed to bad input).
struct Failed;

fn echo(config: serde_json::Value) {
    eprintln!("config: {config}");
}

fn run(cli: Cli) -> Result<std::result::Result<(), Failed>> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Verify { seed } => {
            echo(json!({"command": "verify", "seed": seed}));
            let results = run_all(seed);
            let mut ok = true;
            for r in &results {
                ok &= r.passed;
                let tag = if r.passed { "PASS" } else { "FAIL" };
                writeln!(stdout, "{tag} [{}] {} {}", r.suite, r.name, r.detail)?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(stdout, "{} checks, {failed} failed", results.len())?;
            return Ok(if ok { Ok(()) } else { Err(Failed) });
        }
        Command::Classify { points } => {
            echo(json!({"command": "classify", "points": points}));
            let pts = parse_points(&points)?;
            let class = classify_subset(&pts)?;
            let (g, canon) = canonicalize_subset(&pts)?;
            let canon: Vec<String> = canon.iter().map(|x| x.to_string()).collect();
            writeln!(stdout, "class: {class}")?;
            writeln!(stdout, "canonical: {}", canon.join(" "))?;
            writeln!(stdout, "map: {g}")?;
        }
        Command::Ppt { coeffs, tol } => {
            echo(json!({"command": "ppt", "coeffs": coeffs, "tol": tol}));
            let c = read_coefficients_file(&coeffs)?;
            let v = is_ppt(&c.state, tol)?;
            let r = reduce_to_b(&c.state);
            let spec = b_spectrum(&c.state);
            writeln!(stdout, "verdict: {}", if v.is_ppt { "PPT" } else { "NPT" })?;
            writeln!(stdout, "min_eigenvalue: {:.16e}", v.min_eigenvalue)?;
            writeln!(stdout, "b_spectrum: {:.16e} {:.16e} {:.16e}", spec[0], spec[1], spec[2])?;
            writeln!(stdout, "d: {:.16e} {:.16e} {:.16e}", r.d[0], r.d[1], r.d[2])?;
            for (l, a) in r.a.iter().enumerate() {
                writeln!(stdout, "a{l}: {:.16e} {:+.16e}i", a.re, a.im)?;
            }
        }
        Command::Witness { lambda, g0, g1, g2, grid } => {
            echo(json!({"command": "witness", "lambda": lambda, "g0": g0, "g1": g1, "g2": g2, "grid": grid}));
            let k = LineWitness::new(lambda, g0, g1, g2)?;
            let class = check_line_witness(&k);
            let opts = PhiSearchOptions { grid, ..Default::default() };
            let m = min_eigen_line(&k, &opts);
            writeln!(stdout, "class: {class:?}")?;
            writeln!(stdout, "min_phi_eigenvalue: {:.16e}", m.value)?;
            writeln!(stdout, "phi: {:.16e} {:.16e} {:.16e}", m.phi[0].re, m.phi[1].re, m.phi[2].re)?;
            let (a, b) = k.sym_products();
            writeln!(stdout, "S: {:.16e}", k.gamma.iter().sum::<f64>())?;
            writeln!(stdout, "A: {a:.16e}")?;
            writeln!(stdout, "B: {b:.16e}")?;
        }
        Command::Scan { family, alpha_min, alpha_max, n, out, json } => {
            let opts = ScanOptions::from_env();
            echo(json!({
                "command": "scan", "family": family.to_string(), "alpha_min": alpha_min, "alpha_max": alpha_max,
                "n": n, "out": out, "json": json, "options": opts,
            }));
            if n == 0 || !(alpha_min <= alpha_max) || (n > 1 && alpha_min == alpha_max) {
                return Err(Error::Parse(format!("bad grid: [{alpha_min}, {alpha_max}] with n = {n}")).into());
            }
            let curve = boundary::scan(family, &boundary::linspace(alpha_min, alpha_max, n), &opts)?;
            match &out {
                Some(p) => {
                    let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
                    let mut w = BufWriter::new(f);
                    boundary::write_curve_csv(&curve, &mut w)?;
                    w.flush()?;
                }
                None => boundary::write_curve_csv(&curve, &mut stdout)?,
            }
            if let Some(p) = &json {
                std::fs::write(p, boundary::curve_json(&curve)?).with_context(|| format!("writing {}", p.display()))?;
            }
            for s in curve.samples.iter().filter(|s| s.error.is_some()) {
                eprintln!("alpha = {}: {}", s.alpha, s.error.as_deref().unwrap_or(""));
            }
        }
        Command::Polytopes { coeffs } => {
            echo(json!({"command": "polytopes", "coeffs": coeffs}));
            let c = read_coefficients_file(&coeffs)?;
            let lines = enumerate_lines();
            if let Some(exact) = &c.exact {
                let (enc, ker, cert) = polytope_membership_exact(exact)?;
                writeln!(stdout, "arithmetic: exact")?;
                writeln!(stdout, "in_enclosure: {enc}")?;
                writeln!(stdout, "in_kernel: {ker}")?;
                if let Some(w) = cert {
                    for (wi, l) in w.iter().zip(&lines) {
                        if !wi.is_zero() {
                            writeln!(stdout, "weight {l}: {wi}")?;
                        }
                    }
                }
            } else {
                let v = polytope_membership(&c.state);
                writeln!(stdout, "arithmetic: float")?;
                writeln!(stdout, "in_enclosure: {}", v.in_enclosure)?;
                writeln!(stdout, "in_kernel: {}", v.in_kernel)?;
                if let Some(w) = v.kernel_certificate {
                    for (wi, l) in w.iter().zip(&lines) {
                        if *wi != 0.0 {
                            writeln!(stdout, "weight {l}: {wi:.16e}")?;
                        }
                    }
                }
            }
        }
    }
    Ok(Ok(()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(
                e.downcast_ref::<Error>(),
                Some(Error::Parse(_) | Error::InvalidState(_) | Error::Domain(_) | Error::NotWitnessCandidate(_) | Error::DuplicatePoint(..) | Error::DegenerateSubset(_))
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
