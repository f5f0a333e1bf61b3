use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qline::eigenbasis::{calibrated_xi0, eigenfunction};
use qline::lattice::{write_csv, Lattice};
use qline::oscillator::{energy, OscillatorParams, SpectrumLabel};
use qline::verify::{moment_drift, moment_indeterminacy, nearest_eigenproblem, run_suite, label_eps, Suite, VerifyConfig};
use qline::{Error, QParams, Tolerance};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "qline", version, about = "Eigenbasis of the q-deformed oscillator on the quantum line")]
struct Cli {
    /// Deformation parameter, q > 1.
    #[arg(long, default_value_t = 2.0, global = true)]
    q: f64,
    /// Phase exponent gamma of beta = alpha q^gamma.
    #[arg(long, default_value_t = 0.0, global = true, allow_negative_numbers = true)]
    gamma: f64,
    /// Lattice scale in [1, q); defaults to the calibrated scale.
    #[arg(long, global = true)]
    xi0: Option<f64>,
    /// Half-width K of the index window [-K, K]; defaults to max(40, ceil(60 / ln q)).
    #[arg(long, global = true)]
    window: Option<i64>,
    /// Relative series truncation tolerance.
    #[arg(long, default_value_t = 1e-16, global = true)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fock energies m = 0..M, non-Fock energies m = -M..M and the accumulation point.
    Spectrum {
        #[arg(short = 'M', long = "max", default_value_t = 3)]
        max: u32,
    },
    /// Eigenfunction values over the window, e.g. `fock:2` or `nonfock:-1`.
    Eigfn {
        #[arg(allow_hyphen_values = true)]
        label: String,
    },
    /// Run verification checks; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Seed for the random draws.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Moment drift under the weight perturbation by k_s.
    Moments {
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        s: i64,
        #[arg(short = 'J', long = "max-order", default_value_t = 10)]
        j: u32,
    },
}

enum Failure {
    Usage(String),
    Checks(Vec<String>),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::Parse(_)
            | Error::OutOfRange(_)
            | Error::NotCalibrated { .. }
            | Error::LatticeMismatch
            | Error::Parity(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

fn parse_label(s: &str, gamma: f64) -> Result<SpectrumLabel, Failure> {
    let bad = || Failure::Usage(format!("label {s:?}: expected fock:<m >= 0> or nonfock:<m>"));
    let (family, m) = s.split_once(':').ok_or_else(bad)?;
    match family.to_ascii_lowercase().as_str() {
        "fock" => Ok(SpectrumLabel::Fock { m: m.parse().map_err(|_| bad())? }),
        "nonfock" => Ok(SpectrumLabel::NonFock { m: m.parse().map_err(|_| bad())?, gamma }),
        _ => Err(bad()),
    }
}

fn config(cli: &Cli) -> Result<VerifyConfig, Failure> {
    let qp = QParams::new(cli.q)?;
    let op = OscillatorParams::new(qp, cli.gamma)?;
    let window = cli.window.unwrap_or_else(|| Lattice::default_half_width(&qp));
    if window < 1 {
        return Err(Failure::Usage(format!("window must be positive, got {window}")));
    }
    Ok(VerifyConfig {
        op,
        xi0: cli.xi0.unwrap_or_else(|| calibrated_xi0(&qp).0),
        window,
        tol: Tolerance::new(cli.tol, Tolerance::default().max_terms)?,
        seed: 2024,
    })
}

fn spectrum(cfg: &VerifyConfig, max: u32, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let qp = cfg.op.qp;
    let mut rows: Vec<(&str, i64, f64, f64)> = Vec::new();
    for m in 0..=max {
        let l = SpectrumLabel::Fock { m };
        rows.push(("fock", m as i64, l.epsilon(&qp), energy(&l, &qp)));
    }
    for m in -(max as i32)..=max as i32 {
        let l = SpectrumLabel::NonFock { m, gamma: cfg.op.gamma };
        rows.push(("nonfock", m as i64, l.epsilon(&qp), energy(&l, &qp)));
    }
    let acc = qp.accumulation_point();
    match format {
        Format::Csv => {
            writeln!(out, "family,m,epsilon,energy")?;
            for (f, m, e, en) in &rows {
                writeln!(out, "{f},{m},{e:.17e},{en:.17e}")?;
            }
            writeln!(out, "accumulation,,,{acc:.17e}")?;
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(f, m, e, en)| json!({"family": f, "m": m, "epsilon": e, "energy": en}))
                .collect();
            let v = json!({"q": qp.q(), "gamma": cfg.op.gamma, "rows": rows, "accumulation": acc});
            writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap())?;
        }
        Format::Text => {
            writeln!(out, "{:<12} {:>4} {:>24} {:>24}", "family", "m", "epsilon", "energy")?;
            for (f, m, e, en) in &rows {
                writeln!(out, "{f:<12} {m:>4} {e:>24.16} {en:>24.16}")?;
            }
            writeln!(out, "{:<12} {:>4} {:>24} {acc:>24.16}", "accumulation", "", "")?;
        }
    }
    Ok(())
}

fn eigfn(cfg: &VerifyConfig, label: &str, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let label = parse_label(label, cfg.op.gamma)?;
    let (lat, ep) = cfg.eigenproblem()?;
    let f = eigenfunction(&label, &lat, &ep, &cfg.tol)?;
    match format {
        Format::Csv | Format::Text => write_csv(&f, out)?,
        Format::Json => {
            let points: Vec<_> = f
                .entries()
                .map(|(s, n, x, v)| json!({"sign": s.value(), "n": n, "x": x, "re": v.re, "im": v.im}))
                .collect();
            let v = json!({
                "label": label.to_string(),
                "epsilon": label_eps(&label, &ep),
                "energy": energy(&label, &cfg.op.qp),
                "params": cfg.params(),
                "points": points,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap())?;
        }
    }
    Ok(())
}

fn emit_report(rep: &qline::verify::VerificationReport, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rep.to_json()).unwrap())?,
        Format::Csv => {
            writeln!(out, "id,value,tolerance,pass")?;
            for c in &rep.checks {
                writeln!(out, "{},{:.17e},{:e},{}", c.id, c.value, c.tolerance, c.pass)?;
            }
        }
        Format::Text => write!(out, "{}", rep.to_text())?,
    }
    if rep.pass() {
        Ok(())
    } else {
        Err(Failure::Checks(rep.failing().into_iter().map(String::from).collect()))
    }
}

fn moments(cfg: &VerifyConfig, s: i64, j: u32, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let lat = cfg.lattice()?;
    let ep = nearest_eigenproblem(cfg.op, &lat)?;
    let view = lat.sublattice(qline::lattice::Parity::of(ep.anchor()));
    let rep = moment_indeterminacy(s, j, &view, &ep, &cfg.tol, cfg.params())?;
    if format == Format::Csv {
        writeln!(out, "j,mu,mu_perturbed,relative,normalized")?;
        for d in moment_drift(s, j, &view, &ep, &cfg.tol)? {
            writeln!(out, "{},{:.17e},{:.17e},{:.17e},{:.17e}", d.j, d.mu, d.mu_perturbed, d.relative, d.normalized)?;
        }
        return if rep.pass() { Ok(()) } else { Err(Failure::Checks(rep.failing().into_iter().map(String::from).collect())) };
    }
    emit_report(&rep, format, out)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = config(cli)?;
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let res = match &cli.command {
        Command::Spectrum { max } => spectrum(&cfg, *max, cli.format, &mut out),
        Command::Eigfn { label } => eigfn(&cfg, label, cli.format, &mut out),
        Command::Verify { suite, seed } => {
            cfg.seed = *seed;
            let suite: Suite = suite.parse()?;
            // validate the lattice before running anything
            cfg.lattice()?;
            emit_report(&run_suite(suite, &cfg)?, cli.format, &mut out)
        }
        Command::Moments { s, j } => moments(&cfg, *s, *j, cli.format, &mut out),
    };
    out.flush()?;
    res
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(ids)) => {
            eprintln!("qline: failing checks: {}", ids.join(", "));
            ExitCode::from(1)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("qline: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("qline: {msg}");
            ExitCode::from(2)
        }
    }
}
