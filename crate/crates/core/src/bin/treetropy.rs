//! Command-line front end: parses patterns, runs the deciders and
//! constructors, and reports verdicts through exit codes (0 success or
//! zero-entropy verdict, 1 negative verdict, 2 malformed input).

use std::fmt::Write as _;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treetropy::{
    base_pattern, cross_validate, cross_validate_star, double, entropy, enumerate_patterns,
    enumerate_star_patterns, is_strongly_collapsible, maximal_trivial_structure, path_matrix,
    spectral_radius, star_zero_pattern, trivial_block_divisors, verify_theorem_c,
    CollapseCertificate, Error, LiftPolicy, Pattern, DEFAULT_TOL,
};

#[derive(Parser)]
#[command(
    name = "treetropy",
    version,
    about = "Zero-entropy certification for periodic patterns on trees",
    max_term_width = 100
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Tolerance for the spectral-radius approximation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a pattern, printing its canonical line form.
    Validate(PatternInput),
    /// Compute the pattern's entropy from its path transition matrix.
    Entropy(PatternInput),
    /// Decide zero entropy combinatorially and print the collapse chain.
    Zero(PatternInput),
    /// Perform one collapse step via the maximal trivial block structure.
    Collapse(PatternInput),
    /// Build a pattern from an explosion script, e.g. `base=3 ne ne ee2@0`.
    Explode {
        /// Script tokens: `base=P0`, then `ne` or `ee2@PIVOT` per doubling.
        #[arg(required = true)]
        script: Vec<String>,
    },
    /// Construct a certified zero-entropy k-star pattern of period n.
    Construct {
        #[arg(required_unless_present = "table")]
        n: Option<usize>,
        #[arg(required_unless_present = "table")]
        k: Option<usize>,
        /// Allow the orbit to miss branches (odd part of n at most k).
        #[arg(long)]
        relaxed: bool,
        /// Print the predicted-versus-observed truth table for the grid
        /// n <= N, k <= K instead of constructing a single pattern.
        #[arg(long, num_args = 2, value_names = ["N", "K"])]
        table: Option<Vec<usize>>,
    },
    /// Enumerate pattern classes of period n and cross-validate deciders.
    Enumerate {
        n: usize,
        /// Restrict to k-star shaped patterns.
        #[arg(long)]
        star: Option<usize>,
        /// Print only the strongly collapsible classes.
        #[arg(long)]
        zero_only: bool,
        /// Print only the summary report.
        #[arg(long)]
        count_only: bool,
    },
    /// Check the star truth table on a grid (defaults to n <= 8, k <= 4).
    VerifyTheoremC {
        #[arg(default_value_t = 8)]
        n_max: usize,
        #[arg(default_value_t = 4)]
        k_max: usize,
    },
    /// Emit the path transition matrix (text, json, dot, or csv).
    Matrix(PatternInput),
}

#[derive(Args)]
struct PatternInput {
    /// Pattern in line format, e.g. "4: 0 2 | 0 1 | 1 3"; `-` reads stdin.
    #[arg(conflicts_with = "file")]
    pattern: Option<String>,
    /// Read the pattern from a file instead.
    #[arg(long)]
    file: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn bad_input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn verdict(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotRepresentable { .. }
            | Error::VerificationFailed(_)
            | Error::CollapseInvalid(_)
            | Error::PivotNotFound
            | Error::NonConvergence { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl PatternInput {
    fn load(&self) -> Result<Pattern, Failure> {
        let raw = match (&self.pattern, &self.file) {
            (Some(s), None) if s != "-" => s.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| Failure::bad_input(format!("{}: {e}", path.display())))?,
            _ => {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| Failure::bad_input(format!("stdin: {e}")))?;
                buf
            }
        };
        let raw = raw.trim();
        if raw.starts_with('{') {
            serde_json::from_str::<Pattern>(raw)
                .map_err(|e| Failure::bad_input(format!("parse error: {e}")))
        } else {
            raw.parse::<Pattern>().map_err(Failure::from)
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report serialization")
}

fn certificate_chain(cert: &CollapseCertificate) -> String {
    let mut out = String::new();
    let factors: Vec<String> = cert.factors.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "zero entropy: factors ({})", factors.join(", "));
    for (i, p) in cert.patterns.iter().enumerate().rev() {
        if i == cert.patterns.len() - 1 {
            let _ = writeln!(out, "{p}");
        } else {
            let _ = writeln!(out, "  -> {p}");
        }
    }
    out
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Validate(input) => {
            let p = input.load()?;
            Ok(match cli.format {
                Format::Json => format!("{}\n", json(&p)),
                _ => format!("{p}\n"),
            })
        }
        Command::Entropy(input) => {
            let p = input.load()?;
            let m = path_matrix(&p);
            let rho = spectral_radius(&m, cli.tol)?;
            let h = entropy(&p, cli.tol)?;
            Ok(match cli.format {
                Format::Json => format!(
                    "{{\"paths\":{},\"spectral_radius\":{rho:.12},\"entropy\":{h:.12}}}\n",
                    m.len()
                ),
                _ => format!(
                    "paths: {}\nspectral radius: {rho:.12}\nentropy: {h:.12}\n",
                    m.len()
                ),
            })
        }
        Command::Zero(input) => {
            let p = input.load()?;
            match is_strongly_collapsible(&p) {
                Some(cert) => Ok(match cli.format {
                    Format::Json => format!("{}\n", json(&cert)),
                    _ => certificate_chain(&cert),
                }),
                None => {
                    let reason = if trivial_block_divisors(&p).is_empty() {
                        "no trivial block structure"
                    } else {
                        "collapse chain stops before the trivial pattern"
                    };
                    Err(Failure::verdict(match cli.format {
                        Format::Json => format!("{{\"zero\":false,\"reason\":\"{reason}\"}}"),
                        _ => format!("positive entropy: {reason}"),
                    }))
                }
            }
        }
        Command::Collapse(input) => {
            let p = input.load()?;
            let structure = maximal_trivial_structure(&p)
                .ok_or_else(|| Failure::verdict("no trivial block structure".to_string()))?;
            let collapsed = treetropy::combinatorial_collapse(&p, &structure)?;
            Ok(match cli.format {
                Format::Json => format!(
                    "{{\"structure\":{},\"collapsed\":{}}}\n",
                    json(&structure),
                    json(&collapsed)
                ),
                _ => {
                    let blocks: Vec<String> = structure
                        .blocks
                        .iter()
                        .map(|b| {
                            let pts: Vec<String> = b.iter().map(usize::to_string).collect();
                            format!("{{{}}}", pts.join(","))
                        })
                        .collect();
                    format!(
                        "structure: p={} blocks {}\ncollapsed: {collapsed}\n",
                        structure.p,
                        blocks.join(" ")
                    )
                }
            })
        }
        Command::Explode { script } => {
            let mut stages = Vec::new();
            let base = script[0]
                .strip_prefix("base=")
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&p0| p0 >= 1)
                .ok_or_else(|| {
                    Failure::bad_input(format!(
                        "explode script must start with base=P0, got `{}`",
                        script[0]
                    ))
                })?;
            let mut current = base_pattern(base);
            stages.push(current.clone());
            for token in &script[1..] {
                let policy = if token == "ne" {
                    LiftPolicy::NonExpanding
                } else if let Some(pivot) = token
                    .strip_prefix("ee2@")
                    .and_then(|v| v.parse::<usize>().ok())
                {
                    LiftPolicy::Ee2 { pivot }
                } else {
                    return Err(Failure::bad_input(format!(
                        "unknown explosion step `{token}` (expected `ne` or `ee2@PIVOT`)"
                    )));
                };
                current = double(&current, &policy)?;
                stages.push(current.clone());
            }
            Ok(match cli.format {
                Format::Json => format!("{{\"stages\":{}}}\n", json(&stages)),
                _ => {
                    let mut out = String::new();
                    for stage in &stages {
                        let _ = writeln!(out, "{stage}");
                    }
                    out
                }
            })
        }
        Command::Construct {
            n,
            k,
            relaxed,
            table,
        } => {
            if let Some(bounds) = table {
                let report = verify_theorem_c(bounds[0], bounds[1])?;
                let body = match cli.format {
                    Format::Json => format!("{}\n", json(&report)),
                    _ => {
                        let mut out = String::from("n\tk\tpredicted\tobserved\tmethod\n");
                        for e in &report.entries {
                            let _ = writeln!(
                                out,
                                "{}\t{}\t{}\t{}\t{}",
                                e.n, e.k, e.predicted, e.observed, e.method
                            );
                        }
                        let _ = writeln!(out, "mismatches: {}", report.mismatches);
                        out
                    }
                };
                return if report.mismatches == 0 {
                    Ok(body)
                } else {
                    Err(Failure::verdict(body))
                };
            }
            let (n, k) = (n.unwrap(), k.unwrap());
            let p = if *relaxed {
                construct_relaxed(n, k)?
            } else {
                star_zero_pattern(n, k)?
            };
            let cert = is_strongly_collapsible(&p).ok_or_else(|| {
                Failure::verdict(format!("constructed pattern {p} is not collapsible"))
            })?;
            Ok(match cli.format {
                Format::Json => format!(
                    "{{\"pattern\":{},\"star_class\":{},\"certificate\":{}}}\n",
                    json(&p),
                    json(&p.star_class()),
                    json(&cert)
                ),
                _ => format!(
                    "{p}\nstar class: {}\n{}",
                    p.star_class(),
                    certificate_chain(&cert)
                ),
            })
        }
        Command::Enumerate {
            n,
            star,
            zero_only,
            count_only,
        } => {
            let (classes, report) = match star {
                Some(k) => (
                    enumerate_star_patterns(*n, *k)?,
                    cross_validate_star(*n, *k)?,
                ),
                None => (enumerate_patterns(*n)?, cross_validate(*n)?),
            };
            let mut out = String::new();
            if !count_only {
                for p in &classes {
                    if *zero_only && is_strongly_collapsible(p).is_none() {
                        continue;
                    }
                    let _ = writeln!(out, "{p}");
                }
            }
            let _ = writeln!(out, "{}", json(&report));
            Ok(out)
        }
        Command::VerifyTheoremC { n_max, k_max } => {
            let report = verify_theorem_c(*n_max, *k_max)?;
            let body = match cli.format {
                Format::Json => format!("{}\n", json(&report)),
                _ => {
                    let mut out = String::new();
                    for e in &report.entries {
                        let _ = writeln!(
                            out,
                            "({}, {}): predicted {} observed {} [{}]",
                            e.n, e.k, e.predicted, e.observed, e.method
                        );
                    }
                    let _ = writeln!(out, "mismatches: {}", report.mismatches);
                    out
                }
            };
            if report.mismatches == 0 {
                Ok(body)
            } else {
                Err(Failure::verdict(body))
            }
        }
        Command::Matrix(input) => {
            let p = input.load()?;
            let m = path_matrix(&p);
            Ok(match cli.format {
                Format::Dot => m.to_dot(),
                Format::Csv => m.to_csv(),
                Format::Json => {
                    let paths: Vec<Vec<usize>> =
                        m.paths().iter().map(|&(a, b)| vec![a, b]).collect();
                    format!(
                        "{{\"paths\":{},\"rows\":{}}}\n",
                        json(&paths),
                        json(&m.rows())
                    )
                }
                Format::Text => {
                    let mut out = String::new();
                    for (i, &(a, b)) in m.paths().iter().enumerate() {
                        let targets: Vec<String> = m
                            .out_edges(i)
                            .iter()
                            .map(|&j| {
                                let (c, d) = m.paths()[j];
                                format!("{c}-{d}")
                            })
                            .collect();
                        let _ = writeln!(out, "{a}-{b}: {}", targets.join(" "));
                    }
                    out
                }
            })
        }
    }
}

/// The relaxed construction: the orbit may miss branches, so a period
/// `n = l * 2^q` with odd part `l <= k` is realized by the zero-entropy
/// `max(l, 2)`-star (or interval) pattern of the same period.
fn construct_relaxed(n: usize, k: usize) -> Result<Pattern, Failure> {
    if k < 3 || n == 0 {
        return Err(Failure::bad_input(format!("bad range: n = {n}, k = {k}")));
    }
    let odd_part = n >> n.trailing_zeros();
    if odd_part > k {
        return Err(Error::NotRepresentable { n, k }.into());
    }
    if n <= 2 {
        return Ok(base_pattern(n));
    }
    let target = odd_part.max(2);
    Ok(star_zero_pattern(n, target)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(body) => {
            print!("{body}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
