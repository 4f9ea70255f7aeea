//! `moment` command-line front end.
//!
//! Exit codes: 0 success / accept, 1 negative verdict, 2 usage or input
//! error. The JSON report goes to stdout, a short human summary to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certs::{self, Certificate, FarkasResult, PolyaResult, SearchResult};
use crate::cones::{self, ConeSpec, WitnessOutcome};
use crate::gns;
use crate::moments::{self, MomentSequence};
use crate::poly::Polynomial;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "moment", version, about = "Moment problem checks and positivity certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
enum Command {
    /// PSD test of H(s) and every localized H(g_j s) at one level.
    Hankel {
        /// Moment sequence JSON file.
        seq: PathBuf,
        /// JSON array of generator polynomials.
        #[arg(long)]
        generators: Option<PathBuf>,
        /// Inline generator in the text grammar (repeatable).
        #[arg(long = "gen", allow_hyphen_values = true)]
        gens: Vec<String>,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = moments::DEFAULT_PSD_TOL)]
        tol: f64,
    },
    /// Alternating binomial difference test on the unit cube.
    Hausdorff {
        seq: PathBuf,
        /// Largest |m| + |n| to test (defaults to the truncation degree).
        #[arg(long)]
        up_to: Option<u32>,
    },
    /// Builds and verifies a positivity certificate.
    Certify {
        #[arg(long, value_enum)]
        method: Method,
        /// Target polynomial (text grammar or JSON).
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long)]
        generators: Option<PathBuf>,
        #[arg(long = "gen", allow_hyphen_values = true)]
        gens: Vec<String>,
        /// JSON array of S-module multipliers (1 is implied).
        #[arg(long)]
        multipliers: Option<PathBuf>,
        #[arg(long = "mult", allow_hyphen_values = true)]
        mults: Vec<String>,
        /// Degree bound for handelman / smodule (default 2·deg h).
        #[arg(long)]
        degree: Option<u32>,
        /// Largest Polya exponent to try.
        #[arg(long, default_value_t = 30)]
        n_max: u32,
        /// Bernstein identity parameter.
        #[arg(long)]
        k: Option<u32>,
        /// Certificate output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated GNS model and atomic measure extraction.
    Extract {
        seq: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = gns::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = gns::DEFAULT_EXTRACT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = gns::DEFAULT_RANK_TOL)]
        rank_tol: f64,
        /// Measure output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded-element witness search for each variable.
    Archimedean {
        cone: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Re-verifies a certificate file.
    Verify { certificate: PathBuf },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Farkas,
    Handelman,
    Smodule,
    Polya,
    Bernstein,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    version: &'static str,
    inputs: Value,
    verdict: String,
    result: Value,
    elapsed_ms: f64,
}

struct Outcome {
    code: i32,
    verdict: String,
    result: Value,
    summary: String,
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn parse_poly(text: &str) -> Result<Polynomial, InputError> {
    let t = text.trim();
    if t.starts_with('{') {
        Ok(serde_json::from_str(t)?)
    } else {
        Ok(Polynomial::parse(t)?)
    }
}

fn collect_polys(file: &Option<PathBuf>, inline: &[String]) -> Result<Vec<Polynomial>, InputError> {
    let mut out: Vec<Polynomial> = match file {
        Some(p) => read_json(p)?,
        None => vec![],
    };
    for s in inline {
        out.push(parse_poly(s)?);
    }
    Ok(out)
}

fn lift_all(polys: Vec<Polynomial>, dim: usize) -> Result<Vec<Polynomial>, InputError> {
    polys
        .into_iter()
        .map(|p| {
            p.embed(dim)
                .map_err(|_| InputError(format!("polynomial {p} does not fit dimension {dim}")))
        })
        .collect()
}

fn write_file(path: &Path, value: &impl Serialize) -> Result<(), InputError> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Full-precision float for human-readable lines.
fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn run_hankel(
    seq: &Path,
    generators: &Option<PathBuf>,
    gens: &[String],
    level: u32,
    tol: f64,
) -> Result<Outcome, InputError> {
    let s: MomentSequence = read_json(seq)?;
    let g = lift_all(collect_polys(generators, gens)?, s.dim())?;
    let report = moments::cone_positivity_check(&s, &g, level, tol)?;
    let mut summary = String::new();
    for b in &report.blocks {
        summary += &format!(
            "H(({})·s) {}x{}: min eigenvalue {} -> {}\n",
            b.localizer,
            b.size,
            b.size,
            f17(b.verdict.min_eigenvalue),
            if b.verdict.psd { "PSD" } else { "NOT PSD" }
        );
    }
    Ok(Outcome {
        code: if report.all_psd { EXIT_OK } else { EXIT_NEGATIVE },
        verdict: if report.all_psd { "psd" } else { "not_psd" }.into(),
        result: serde_json::to_value(&report)?,
        summary,
    })
}

fn run_hausdorff(seq: &Path, up_to: Option<u32>) -> Result<Outcome, InputError> {
    let s: MomentSequence = read_json(seq)?;
    let v = moments::hausdorff_check(&s, up_to.unwrap_or(s.max_degree()));
    let summary = match &v.first_violation {
        None => format!("accepted after {} difference checks\n", v.checked),
        Some(b) => format!("rejected at m={} n={}: value {}\n", b.m, b.n, b.value),
    };
    Ok(Outcome {
        code: if v.accepted { EXIT_OK } else { EXIT_NEGATIVE },
        verdict: if v.accepted { "accept" } else { "reject" }.into(),
        result: serde_json::to_value(&v)?,
        summary,
    })
}

/// Verifies, serializes, reloads and verifies again before anything is
/// written out.
fn emit_certificate(c: &Certificate, out: &Option<PathBuf>) -> Result<Value, InputError> {
    if !c.verify() {
        return Err(InputError("certificate failed verification".into()));
    }
    let text = serde_json::to_string(c)?;
    let back: Certificate = serde_json::from_str(&text)?;
    if back != *c || !back.verify() {
        return Err(InputError("certificate did not survive serialization".into()));
    }
    if let Some(p) = out {
        write_file(p, c)?;
    }
    Ok(serde_json::to_value(c)?)
}

#[allow(clippy::too_many_arguments)]
fn run_certify(
    method: Method,
    target: &Option<String>,
    generators: &Option<PathBuf>,
    gens: &[String],
    multipliers: &Option<PathBuf>,
    mults: &[String],
    degree: Option<u32>,
    n_max: u32,
    k: Option<u32>,
    out: &Option<PathBuf>,
) -> Result<Outcome, InputError> {
    if method == Method::Bernstein {
        let k = k.ok_or_else(|| InputError("bernstein needs --k".into()))?;
        let c = certs::bernstein_identity(k)?;
        let summary = format!("x^2 + 1/{} verified with {} terms\n", k - 1, c.terms.len());
        return Ok(Outcome {
            code: EXIT_OK,
            verdict: "certified".into(),
            result: emit_certificate(&c, out)?,
            summary,
        });
    }
    let target = parse_poly(
        target
            .as_deref()
            .ok_or_else(|| InputError("--target is required".into()))?,
    )?;
    if method == Method::Polya {
        return Ok(match certs::polya_certify(&target, n_max)? {
            PolyaResult::Certified { n, certificate } => Outcome {
                code: EXIT_OK,
                verdict: "certified".into(),
                summary: format!("(sum x_i)^{n} * f has nonnegative coefficients\n"),
                result: json!({ "n": n, "certificate": emit_certificate(&certificate, out)? }),
            },
            PolyaResult::NotFoundUpTo(m) => Outcome {
                code: EXIT_NEGATIVE,
                verdict: "not_found".into(),
                summary: format!("no n <= {m} gives nonnegative coefficients\n"),
                result: json!({ "not_found_up_to": m }),
            },
        });
    }
    let f = collect_polys(generators, gens)?;
    let g = collect_polys(multipliers, mults)?;
    let dim = f
        .iter()
        .chain(&g)
        .map(Polynomial::dim)
        .chain(std::iter::once(target.dim()))
        .max()
        .unwrap_or(1);
    let target = target.embed(dim)?;
    let f = lift_all(f, dim)?;
    let g = lift_all(g, dim)?;
    let bound = degree.unwrap_or_else(|| certs::default_degree_bound(&target));
    let found = match method {
        Method::Farkas => match certs::farkas_certify(&target, &f)? {
            FarkasResult::Certified(c) => Some(c),
            FarkasResult::Infeasible => None,
        },
        Method::Handelman => match certs::handelman_certify(&target, &f, bound)? {
            SearchResult::Certified(c) => Some(c),
            SearchResult::NotFoundAtDegree(_) => None,
        },
        Method::Smodule => match certs::smodule_certify(&target, &f, &g, bound)? {
            SearchResult::Certified(c) => Some(c),
            SearchResult::NotFoundAtDegree(_) => None,
        },
        Method::Polya | Method::Bernstein => unreachable!(),
    };
    Ok(match found {
        Some(c) => Outcome {
            code: EXIT_OK,
            verdict: "certified".into(),
            summary: format!("{} certificate with {} terms\n", target, c.terms.len()),
            result: emit_certificate(&c, out)?,
        },
        None if method == Method::Farkas => Outcome {
            code: EXIT_NEGATIVE,
            verdict: "infeasible".into(),
            summary: "no nonnegative combination exists\n".into(),
            result: Value::Null,
        },
        None => Outcome {
            code: EXIT_NEGATIVE,
            verdict: "not_found_at_degree".into(),
            summary: format!("no certificate within degree {bound}\n"),
            result: json!({ "degree": bound }),
        },
    })
}

fn run_extract(
    seq: &Path,
    level: u32,
    seed: u64,
    tol: f64,
    rank_tol: f64,
    out: &Option<PathBuf>,
) -> Result<Outcome, InputError> {
    let s: MomentSequence = read_json(seq)?;
    let model = match gns::build(&s, level, rank_tol) {
        Ok(m) => m,
        Err(gns::GnsError::NotPositive {
            min_eigenvalue,
            witness,
        }) => {
            return Ok(Outcome {
                code: EXIT_NEGATIVE,
                verdict: "not_positive".into(),
                summary: format!("Gram matrix eigenvalue {} < 0\n", f17(min_eigenvalue)),
                result: json!({ "min_eigenvalue": min_eigenvalue, "witness": witness }),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let comm = gns::check_commutation(&model, tol);
    let mut warnings = vec![];
    if !model.flat {
        warnings.push("truncation is not flat; extraction is best effort".to_string());
    }
    if comm.warn {
        warnings.push(format!(
            "multiplication matrices fail to commute (max entry {})",
            f17(comm.max_offdiag)
        ));
    }
    let r = match gns::extract_best_effort(&model, tol, seed) {
        Ok(r) => r,
        Err(e @ gns::GnsError::EigenCollision(_)) => {
            return Ok(Outcome {
                code: EXIT_NEGATIVE,
                verdict: "eigen_collision".into(),
                summary: format!("{e}\n"),
                result: json!({ "rank": model.quotient_rank, "flat": model.flat,
                                "commutation": comm, "warnings": warnings }),
            })
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = out {
        write_file(p, &r)?;
    }
    let mut summary = format!(
        "rank {} flat {} residual {}\n",
        model.quotient_rank,
        r.flat,
        f17(r.residual)
    );
    for a in &r.measure.atoms {
        let pt: Vec<String> = a.point.iter().map(|x| f17(*x)).collect();
        summary += &format!("  atom ({}) weight {}\n", pt.join(", "), f17(a.weight));
    }
    for w in &warnings {
        summary += &format!("WARN {w}\n");
    }
    let clean = warnings.is_empty();
    Ok(Outcome {
        code: if clean { EXIT_OK } else { EXIT_NEGATIVE },
        verdict: if clean { "extracted" } else { "best_effort" }.into(),
        result: json!({ "measure": r, "rank": model.quotient_rank,
                        "commutation": comm, "warnings": warnings }),
        summary,
    })
}

fn run_archimedean(cone: &Path, degree: u32) -> Result<Outcome, InputError> {
    let spec: ConeSpec = read_json(cone)?;
    let outcomes = cones::archimedean_witness_search(&spec, degree);
    let mut summary = String::new();
    for o in &outcomes {
        summary += &match o {
            WitnessOutcome::Witness(w) => format!(
                "x{}: witness lambda = {} ({:?})\n",
                w.variable + 1,
                w.lambda,
                w.shape
            ),
            WitnessOutcome::Inconclusive { variable } => {
                format!("x{}: inconclusive at degree {degree}\n", variable + 1)
            }
        };
    }
    let all = outcomes.iter().all(|o| o.witness().is_some_and(|w| w.verify()));
    Ok(Outcome {
        code: if all { EXIT_OK } else { EXIT_NEGATIVE },
        verdict: if all { "archimedean" } else { "inconclusive" }.into(),
        result: serde_json::to_value(&outcomes)?,
        summary,
    })
}

fn run_verify(path: &Path) -> Result<Outcome, InputError> {
    let c: Certificate = read_json(path)?;
    let ok = c.verify();
    Ok(Outcome {
        code: if ok { EXIT_OK } else { EXIT_NEGATIVE },
        verdict: if ok { "valid" } else { "invalid" }.into(),
        result: json!({ "variant": c.variant, "target": c.target.to_string() }),
        summary: format!("{:?} certificate: {}\n", c.variant, if ok { "valid" } else { "INVALID" }),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Hankel { .. } => "hankel",
        Command::Hausdorff { .. } => "hausdorff",
        Command::Certify { .. } => "certify",
        Command::Extract { .. } => "extract",
        Command::Archimedean { .. } => "archimedean",
        Command::Verify { .. } => "verify",
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
            } else {
                let _ = write!(stdout, "{e}");
            }
            return code;
        }
    };
    let start = Instant::now();
    let inputs = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    let outcome = match &cli.command {
        Command::Hankel {
            seq,
            generators,
            gens,
            level,
            tol,
        } => run_hankel(seq, generators, gens, *level, *tol),
        Command::Hausdorff { seq, up_to } => run_hausdorff(seq, *up_to),
        Command::Certify {
            method,
            target,
            generators,
            gens,
            multipliers,
            mults,
            degree,
            n_max,
            k,
            out,
        } => run_certify(
            *method,
            target,
            generators,
            gens,
            multipliers,
            mults,
            *degree,
            *n_max,
            *k,
            out,
        ),
        Command::Extract {
            seq,
            level,
            seed,
            tol,
            rank_tol,
            out,
        } => run_extract(seq, *level, *seed, *tol, *rank_tol, out),
        Command::Archimedean { cone, degree } => run_archimedean(cone, *degree),
        Command::Verify { certificate } => run_verify(certificate),
    };
    match outcome {
        Ok(o) => {
            let report = RunReport {
                command: command_name(&cli.command),
                version: env!("CARGO_PKG_VERSION"),
                inputs,
                verdict: o.verdict,
                result: o.result,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            let _ = writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            let _ = write!(stderr, "{}", o.summary);
            o.code
        }
        Err(InputError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}
