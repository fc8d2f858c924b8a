use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ppscert::certifier::*;
use ppscert::cyclotomic::{brute_force_search, SequenceKind};
use ppscert::lattice::hnf;
use ppscert::matrix::IntMatrix;
use ppscert::ntheory::{relative_class_number_minus, IntPolynomial};
use ppscert::quadforms::{class_number, reduced_forms};
use ppscert::stickelberger::{build_relation_matrix, FieldContext};

const EXIT_INVALID: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CONTRADICTION: u8 = 3;

#[derive(Parser)]
#[command(name = "ppscert", version, about = "Non-existence certificates for perfect p-ary sequences")]
struct Cli {
    /// Output mode
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Certify non-existence for a sequence type
    Certify {
        #[command(subcommand)]
        family: CertifyFamily,
    },
    /// Decide whether q lies in Q_p for p = 5 (mod 8)
    QpTest {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        /// Xi_F coefficients, low to high; defaults to the data directory
        #[arg(long, allow_hyphen_values = true)]
        fp_poly: Option<String>,
        /// Xi_E coefficients, low to high; defaults to the data directory
        #[arg(long, allow_hyphen_values = true)]
        ep_poly: Option<String>,
        #[arg(long)]
        polys: Option<PathBuf>,
    },
    /// Lower bound on the density of primes in Q_p
    DensityBound {
        #[arg(long)]
        p: u64,
        /// Class number of the real quadratic subfield
        #[arg(long)]
        h_plus: u64,
        /// Class number of the quartic CM subfield
        #[arg(long)]
        h: u64,
    },
    /// Print the relation matrix
    Stickelberger {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: u64,
        #[arg(long)]
        w: Option<u64>,
    },
    /// Hermite normal form of a matrix file
    Hnf {
        #[arg(long)]
        input: PathBuf,
    },
    /// Class number of an imaginary quadratic discriminant
    Classnum {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Relative class number of Q(zeta_p)
    Hminus {
        #[arg(long)]
        p: u64,
    },
    /// Exhaustive search for a perfect sequence
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "P_ARY")]
        kind: SequenceKind,
    },
    /// Replay a certificate
    Verify {
        #[arg(long)]
        certificate: PathBuf,
    },
}

#[derive(Subcommand)]
enum CertifyFamily {
    Pps {
        #[command(flatten)]
        common: CertifyArgs,
        #[arg(long, default_value_t = 1)]
        a: u32,
    },
    Paps {
        #[command(flatten)]
        common: CertifyArgs,
    },
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 1)]
    l: u64,
    #[arg(long, default_value_t = 1)]
    nprime: u64,
    #[arg(long, default_value = "strict")]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_L_MAX)]
    lmax: u64,
    #[arg(long)]
    w: Option<u64>,
    /// Assumption ledger file
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Directory holding class_polys.tsv
    #[arg(long)]
    polys: Option<PathBuf>,
}

macro_rules! say {
    ($out:expr, $($t:tt)*) => {{
        let _ = writeln!($out, $($t)*);
    }};
}

macro_rules! put {
    ($out:expr, $($t:tt)*) => {{
        let _ = write!($out, $($t)*);
    }};
}

/// Failure that maps to an exit status.
struct Failure(u8, String);

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, e.to_string())
}

fn load_polys(dir: Option<&PathBuf>) -> Result<PolyStore, Failure> {
    match dir {
        Some(d) => PolyStore::from_dir(d),
        None => PolyStore::from_env(),
    }
    .map_err(input_err)
}

fn load_ledger(file: Option<&PathBuf>) -> Result<AssumptionLedger, Failure> {
    match file {
        Some(f) => AssumptionLedger::from_file(f),
        None => AssumptionLedger::from_env(),
    }
    .map_err(input_err)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn print_steps(out: &mut String, steps: &[Step]) {
    for s in steps {
        let mark = match s.outcome {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
        };
        say!(out, "  {mark} {:<22} {}", s.name, s.evidence);
    }
}

fn certify_cmd(out: &mut String, family: &CertifyFamily, format: Format) -> Result<u8, Failure> {
    let (args, t) = match family {
        CertifyFamily::Pps { common: c, a } => (c, SequenceType::pps(c.p, *a, c.q, c.l, c.nprime)),
        CertifyFamily::Paps { common: c } => (c, SequenceType::paps(c.p, c.q, c.l, c.nprime)),
    };
    if args.lmax == 0 || args.lmax % 2 == 0 {
        return Err(input_err(format!("--lmax {} must be odd", args.lmax)));
    }
    let polys = load_polys(args.polys.as_ref())?;
    let ledger = load_ledger(args.ledger.as_ref())?;
    let mut opts = CertifyOptions::new(args.mode, &ledger, &polys);
    opts.l_max = args.lmax;
    opts.w = args.w;
    let cert = match t.family {
        Family::Pps => certify(&t, &opts),
        Family::Paps => certify_paps(&t, &opts),
    };
    match format {
        Format::Json => say!(out, "{}", cert.to_json()),
        Format::Text => {
            say!(out, "{}: {}", cert.input, cert.verdict);
            print_steps(out, &cert.steps);
            for r in &cert.relations {
                say!(out, "  relation mod {}: {:?}", r.modulus, r.coeffs);
            }
            if let Some(l0) = cert.l0 {
                say!(out, "  l_0 = {l0}");
            }
        }
    }
    Ok(match cert.verdict {
        Verdict::Inconclusive {
            reason: Reason::InternalContradiction,
            ..
        } => EXIT_CONTRADICTION,
        _ => 0,
    })
}

fn poly_record(
    label: &str,
    p: u64,
    kind: FieldKind,
    text: Option<&String>,
    store: &PolyStore,
) -> Result<Option<ClassPolyRecord>, Failure> {
    match text {
        Some(t) => {
            let polynomial: IntPolynomial = t.parse().map_err(input_err)?;
            Ok(Some(ClassPolyRecord {
                label: format!("{label}{p}"),
                p,
                field_kind: kind,
                polynomial,
                provenance: "command line".into(),
            }))
        }
        None => Ok(store.find(p, kind).cloned()),
    }
}

fn run(out: &mut String, cli: &Cli) -> Result<u8, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Certify { family } => certify_cmd(out, family, format),
        Command::QpTest {
            p,
            q,
            fp_poly,
            ep_poly,
            polys,
        } => {
            let store = load_polys(polys.as_ref())?;
            let fp = poly_record("Xi_F", *p, FieldKind::RealQuadratic, fp_poly.as_ref(), &store)?;
            let ep = poly_record("Xi_E", *p, FieldKind::QuarticCm, ep_poly.as_ref(), &store)?;
            let t = qp_test(*p, *q, fp.as_ref(), ep.as_ref());
            match format {
                Format::Json => say!(out, "{}", pretty(&serde_json::to_value(&t).expect("serializes"))),
                Format::Text => {
                    say!(out, "q = {q} in Q_{p}: {} ({})", t.in_qp, t.verdict);
                    print_steps(out, &t.steps);
                }
            }
            Ok(0)
        }
        Command::DensityBound { p, h_plus, h } => {
            let d = density_bound(*p, *h_plus, *h).map_err(input_err)?;
            match format {
                Format::Json => say!(out, 
                    "{}",
                    pretty(&json!({ "p": p, "h_plus": h_plus, "h": h, "density": d.to_string() }))
                ),
                Format::Text => say!(out, "{d}"),
            }
            Ok(0)
        }
        Command::Stickelberger { p, f, w } => {
            let ctx = FieldContext::new(*p, *f, *w).map_err(input_err)?;
            let m = build_relation_matrix(&ctx);
            match format {
                Format::Json => {
                    let labels: Vec<String> = m.labels.iter().map(|l| l.to_string()).collect();
                    say!(out, 
                        "{}",
                        pretty(&json!({ "context": ctx, "labels": labels, "matrix": m.rows.to_string() }))
                    )
                }
                Format::Text => put!(out, "{}", m.rows),
            }
            Ok(0)
        }
        Command::Hnf { input } => {
            let text = std::fs::read_to_string(input).map_err(|e| input_err(format!("{}: {e}", input.display())))?;
            let r: IntMatrix = text.parse().map_err(input_err)?;
            let basis = hnf(&r).map_err(input_err)?;
            match format {
                Format::Json => {
                    let diag: Vec<String> = basis.diag.iter().map(|d| d.to_string()).collect();
                    say!(out, 
                        "{}",
                        pretty(&json!({
                            "basis": basis.b.to_string(),
                            "diag": diag,
                            "determinant": basis.determinant().to_string(),
                        }))
                    )
                }
                Format::Text => put!(out, "{}", basis.b),
            }
            Ok(0)
        }
        Command::Classnum { d } => {
            let h = class_number(*d).map_err(input_err)?;
            match format {
                Format::Json => {
                    let forms = reduced_forms(*d).map_err(input_err)?;
                    say!(out, "{}", pretty(&json!({ "d": d, "class_number": h, "forms": forms })))
                }
                Format::Text => say!(out, "{h}"),
            }
            Ok(0)
        }
        Command::Hminus { p } => {
            let h = relative_class_number_minus(*p).map_err(input_err)?;
            match format {
                Format::Json => say!(out, "{}", pretty(&json!({ "p": p, "hminus": h.to_string() }))),
                Format::Text => say!(out, "{h}"),
            }
            Ok(0)
        }
        Command::Search { p, n, kind } => {
            let found = brute_force_search(*p, *n, *kind).map_err(input_err)?;
            match format {
                Format::Json => say!(out, 
                    "{}",
                    pretty(&json!({
                        "p": p, "n": n, "kind": kind.token(),
                        "sequence": found.as_ref().map(|s| s.to_string()),
                    }))
                ),
                Format::Text => match &found {
                    Some(s) => say!(out, "{s}"),
                    None => say!(out, "none"),
                },
            }
            Ok(0)
        }
        Command::Verify { certificate } => {
            let text = std::fs::read_to_string(certificate)
                .map_err(|e| input_err(format!("{}: {e}", certificate.display())))?;
            let report = verify_certificate_json(&text);
            match format {
                Format::Json => say!(out, 
                    "{}",
                    pretty(&json!({ "valid": report.ok(), "failures": report.failures }))
                ),
                Format::Text if report.ok() => say!(out, "valid"),
                Format::Text => {
                    say!(out, "invalid");
                    for f in &report.failures {
                        say!(out, "  {f}");
                    }
                }
            }
            Ok(if report.ok() { 0 } else { EXIT_INVALID })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&mut out, &cli);
    // a closed pipe downstream is not our failure
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
