//! `formstr`: strength, slice rank and Gröbner computations from the command
//! line. Every command prints a JSON report on standard output.
//!
//! Exit codes: 0 success, 1 runtime failure (i/o, corrupt checkpoint),
//! 2 parse or usage error, 3 a verification found a violated claim.

mod builtins;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use strength_core::arith::Field;
use strength_core::groebner::{
    buchberger, ideal_dimension, ideal_member, jacobian_ideal, singular_locus_codim, TermOrder,
};
use strength_core::paperlab::{campaign_full, verify_paper, CampaignConfig, CampaignStatus, CaseConfig, VerifyConfig};
use strength_core::polyring::{Poly, Ring};
use strength_core::strength::{
    ah_lower_bound, slice_rank_exact, slice_rank_upper, strength_exact, strength_upper, verify_decomposition, Strategy,
};
use strength_core::textio::{parse_decomposition, parse_poly, parse_ring, print_poly, print_ring, Report, TextError};

#[derive(Parser, Debug)]
#[command(
    name = "formstr",
    version,
    about = "Exact strength computations for homogeneous forms"
)]
struct Cli {
    /// Worker threads for exhaustive searches.
    #[arg(long, global = true, env = "FORMSTRENGTH_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Ring declaration, e.g. "GF(2)[x:1, y:1, f:2, g:2]".
    #[arg(long, conflicts_with_all = ["ring_file", "builtin"])]
    ring: Option<String>,
    /// File holding the ring declaration.
    #[arg(long, conflicts_with = "builtin")]
    ring_file: Option<PathBuf>,
    /// Coefficient field, replacing the declared one (default for builtins: QQ).
    #[arg(long)]
    field: Option<Field>,
    /// Named polynomial: paper-h, paper-h-t, paper-h-at:t0=N, instance:m=N, analog:k=N.
    #[arg(long, conflicts_with_all = ["file", "polys"])]
    builtin: Option<String>,
    /// File with one polynomial per line (`#` starts a comment).
    #[arg(long, conflicts_with = "polys")]
    file: Option<PathBuf>,
    /// Polynomials.
    polys: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a polynomial and print its canonical form.
    Parse(Input),
    /// Strength: exact by exhaustive search, or an upper bound.
    Strength {
        #[command(flatten)]
        input: Input,
        /// Exhaustive search (finite fields only). The default.
        #[arg(long, conflicts_with_all = ["upper", "verify"])]
        exact: bool,
        /// Heuristic upper bound with a certificate.
        #[arg(long, conflicts_with = "verify")]
        upper: bool,
        /// Largest length searched exhaustively.
        #[arg(long, default_value_t = 4)]
        max_r: usize,
        /// Check a decomposition: pairs "(g)*(h)" separated by ";".
        #[arg(long)]
        verify: Option<String>,
        /// Decomposition offered to the upper-bound search.
        #[arg(long, requires = "upper")]
        hint: Option<String>,
    },
    /// Slice rank: exact, or a subspace of the given codimension.
    SliceRank {
        #[command(flatten)]
        input: Input,
        /// Only look for a subspace of this codimension.
        #[arg(long)]
        codim: Option<usize>,
    },
    /// Reduced Gröbner basis of the ideal generated by the inputs.
    Gb {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "grevlex")]
        order: TermOrder,
    },
    /// Ideal membership of the first input in the ideal of the rest.
    Member {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "grevlex")]
        order: TermOrder,
    },
    /// Dimension and codimension of the ideal generated by the inputs.
    Dim(Input),
    /// Codimension of the singular locus of a form.
    SingCodim(Input),
    /// Strength lower bound from the singular locus.
    AhBound(Input),
    /// Consolidated checks of the quartic constructions.
    VerifyPaper {
        #[arg(long, default_value = "GF(2)")]
        field: Field,
        /// Random instances per sampled case check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Resumable exhaustive search for a length-3 decomposition of the quartic.
    Campaign {
        /// Checkpoint file; created when missing, resumed otherwise.
        #[arg(long)]
        resume: PathBuf,
        #[arg(long, default_value = "GF(2)")]
        field: Field,
        /// Shape indices to search (0: (1,3)^3, 1: two linear one quadric, 2: one linear two quadric, 3: (2,2)^3).
        #[arg(long, value_delimiter = ',')]
        shapes: Option<Vec<usize>>,
        /// Stop when the projected total time exceeds this many seconds.
        #[arg(long)]
        budget: Option<u64>,
        /// Stop after this many chunks.
        #[arg(long)]
        max_chunks: Option<usize>,
        /// First-factor indices per checkpointed chunk.
        #[arg(long, default_value_t = 1)]
        chunk_size: u64,
        /// Proceed over fields other than GF(2).
        #[arg(long)]
        confirm: bool,
    },
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn text(source: &str, e: TextError) -> Failure {
        let mut msg = e.to_string();
        if let Some(pos) = e.position() {
            let col = source[..pos.min(source.len())].chars().count();
            msg.push_str(&format!("\n  {source}\n  {}^", " ".repeat(col)));
        }
        Failure::Usage(msg)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

struct Outcome {
    report: Report,
    violated: bool,
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

/// The parsed inputs and the canonical text they hash to.
struct Parsed {
    ring: Ring,
    polys: Vec<Poly>,
    canonical: String,
}

impl Input {
    fn parse(&self) -> Result<Parsed, Failure> {
        let (ring, polys) = if let Some(name) = &self.builtin {
            let p = builtins::resolve(name, self.field.unwrap_or(Field::Rational)).map_err(Failure::Usage)?;
            (p.ring().clone(), vec![p])
        } else {
            let decl = match (&self.ring, &self.ring_file) {
                (Some(r), _) => r.clone(),
                (None, Some(path)) => read_file(path)?.trim().to_string(),
                (None, None) => return Err(usage("a ring is required: pass --ring, --ring-file or --builtin")),
            };
            let mut ring = parse_ring(&decl).map_err(|e| Failure::text(&decl, e))?;
            if let Some(field) = self.field {
                ring = ring.with_field(field);
            }
            let lines: Vec<String> = match &self.file {
                Some(path) => read_file(path)?
                    .lines()
                    .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
                    .filter(|l| !l.is_empty())
                    .collect(),
                None => self.polys.clone(),
            };
            let polys = lines
                .iter()
                .map(|l| parse_poly(&ring, l).map_err(|e| Failure::text(l, e)))
                .collect::<Result<Vec<_>, _>>()?;
            (ring, polys)
        };
        let mut canonical = print_ring(&ring);
        for p in &polys {
            canonical.push('\n');
            canonical.push_str(&print_poly(p));
        }
        Ok(Parsed { ring, polys, canonical })
    }

    fn single(&self) -> Result<(Parsed, Poly), Failure> {
        let parsed = self.parse()?;
        match parsed.polys.as_slice() {
            [p] => {
                let p = p.clone();
                Ok((parsed, p))
            }
            other => Err(usage(format!("expected exactly one polynomial, got {}", other.len()))),
        }
    }

    fn several(&self) -> Result<Parsed, Failure> {
        let parsed = self.parse()?;
        if parsed.polys.is_empty() {
            return Err(usage("expected at least one polynomial"));
        }
        Ok(parsed)
    }
}

fn digest(command: &str, canonical: &str) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(canonical.as_bytes());
    hex::encode(h.finalize())
}

fn report(command: &str, canonical: &str, result: Value, certificate: Value, statistics: Value) -> Report {
    Report {
        command: command.into(),
        input_digest: digest(command, canonical),
        result,
        certificate,
        statistics,
    }
}

fn ok(report: Report) -> Result<Outcome, Failure> {
    Ok(Outcome {
        report,
        violated: false,
    })
}

fn elapsed(start: Instant) -> Value {
    json!({ "elapsed_ms": start.elapsed().as_millis() as u64 })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let workers = cli.workers.max(1);
    match &cli.command {
        Command::Parse(input) => {
            let parsed = input.parse()?;
            let polys: Vec<Value> = parsed
                .polys
                .iter()
                .map(|p| {
                    json!({
                        "polynomial": print_poly(p),
                        "terms": p.num_terms(),
                        "degree": p.homogeneous_degree(),
                    })
                })
                .collect();
            ok(report(
                "parse",
                &parsed.canonical,
                json!({ "ring": print_ring(&parsed.ring), "polynomials": polys }),
                Value::Null,
                elapsed(start),
            ))
        }
        Command::Strength {
            input,
            exact: _,
            upper,
            max_r,
            verify,
            hint,
        } => {
            let (parsed, f) = input.single()?;
            if let Some(text) = verify {
                let dec = parse_decomposition(&parsed.ring, text).map_err(|e| Failure::text(text, e))?;
                let verified = verify_decomposition(&f, &dec).map_err(usage)?;
                let canonical = format!(
                    "{}\n{}",
                    parsed.canonical,
                    strength_core::textio::print_decomposition(&dec)
                );
                return Ok(Outcome {
                    report: report(
                        "strength --verify",
                        &canonical,
                        json!({ "verified": verified, "length": dec.len() }),
                        json!({ "decomposition": dec.to_json() }),
                        elapsed(start),
                    ),
                    violated: !verified,
                });
            }
            let (command, rep) = if *upper {
                let mut strategies = Strategy::defaults(&f);
                if let Some(text) = hint {
                    let dec = parse_decomposition(&parsed.ring, text).map_err(|e| Failure::text(text, e))?;
                    strategies.push(Strategy::Hint(dec));
                }
                ("strength --upper", strength_upper(&f, &strategies).map_err(usage)?)
            } else {
                ("strength --exact", strength_exact(&f, *max_r, workers).map_err(usage)?)
            };
            ok(report(
                command,
                &parsed.canonical,
                rep.result_json(),
                rep.certificate_json(),
                rep.stats_json(),
            ))
        }
        Command::SliceRank { input, codim } => {
            let (parsed, f) = input.single()?;
            match codim {
                Some(r) => {
                    let cert = slice_rank_upper(&f, *r).map_err(usage)?;
                    ok(report(
                        "slice-rank --codim",
                        &parsed.canonical,
                        json!({ "codimension": r, "found": cert.is_some() }),
                        cert.map_or(Value::Null, |c| json!({ "subspace": c.to_json() })),
                        elapsed(start),
                    ))
                }
                None => {
                    let rep = slice_rank_exact(&f).map_err(usage)?;
                    ok(report(
                        "slice-rank",
                        &parsed.canonical,
                        rep.result_json(),
                        rep.certificate_json(),
                        rep.stats_json(),
                    ))
                }
            }
        }
        Command::Gb { input, order } => {
            let parsed = input.several()?;
            let gb = buchberger(&parsed.polys, *order).map_err(usage)?;
            let basis: Vec<String> = gb.generators().iter().map(print_poly).collect();
            ok(report(
                "gb",
                &format!("{order:?}\n{}", parsed.canonical),
                json!({ "order": format!("{order:?}").to_lowercase(), "basis": basis, "unit_ideal": gb.is_unit() }),
                json!({ "reduced": gb.is_reduced(), "s_pairs_reduce_to_zero": gb.s_pairs_reduce_to_zero() }),
                elapsed(start),
            ))
        }
        Command::Member { input, order } => {
            let parsed = input.parse()?;
            let Some((target, gens)) = parsed.polys.split_first() else {
                return Err(usage("expected a candidate followed by generators"));
            };
            if gens.is_empty() {
                return Err(usage("expected at least one generator after the candidate"));
            }
            let gb = buchberger(gens, *order).map_err(usage)?;
            let member = ideal_member(target, &gb).map_err(usage)?;
            ok(report(
                "member",
                &format!("{order:?}\n{}", parsed.canonical),
                json!({ "member": member }),
                json!({
                    "normal_form": print_poly(&gb.reduce(target)),
                    "basis": gb.generators().iter().map(print_poly).collect::<Vec<_>>(),
                }),
                elapsed(start),
            ))
        }
        Command::Dim(input) => {
            let parsed = input.several()?;
            let gb = buchberger(&parsed.polys, TermOrder::Grevlex).map_err(usage)?;
            let dim = ideal_dimension(&gb).map_err(usage)?;
            ok(report(
                "dim",
                &parsed.canonical,
                serde_json::to_value(&dim).expect("serializes"),
                json!({ "basis": gb.generators().iter().map(print_poly).collect::<Vec<_>>() }),
                elapsed(start),
            ))
        }
        Command::SingCodim(input) => {
            let (parsed, f) = input.single()?;
            let dim = singular_locus_codim(&f).map_err(usage)?;
            ok(report(
                "sing-codim",
                &parsed.canonical,
                serde_json::to_value(&dim).expect("serializes"),
                json!({ "jacobian": jacobian_ideal(&f).iter().map(print_poly).collect::<Vec<_>>() }),
                elapsed(start),
            ))
        }
        Command::AhBound(input) => {
            let (parsed, f) = input.single()?;
            let b = ah_lower_bound(&f).map_err(usage)?;
            ok(report(
                "ah-bound",
                &parsed.canonical,
                serde_json::to_value(&b).expect("serializes"),
                json!({ "jacobian": jacobian_ideal(&f).iter().map(print_poly).collect::<Vec<_>>() }),
                elapsed(start),
            ))
        }
        Command::VerifyPaper { field, samples, seed } => {
            let mut config = VerifyConfig::new(*field);
            config.workers = workers;
            config.cases = CaseConfig {
                samples: *samples,
                seed: *seed,
            };
            let checks = verify_paper(&config).map_err(usage)?;
            let passed = checks.iter().all(|c| c.passed);
            let summary: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "skipped": c.skipped }))
                .collect();
            Ok(Outcome {
                report: report(
                    "verify-paper",
                    &format!("{field}\n{samples}\n{seed}"),
                    json!({ "field": field.to_string(), "passed": passed, "checks": summary }),
                    serde_json::to_value(&checks).expect("serializes"),
                    elapsed(start),
                ),
                violated: !passed,
            })
        }
        Command::Campaign {
            resume,
            field,
            shapes,
            budget,
            max_chunks,
            chunk_size,
            confirm,
        } => {
            let mut config = CampaignConfig::new(resume);
            config.field = *field;
            config.shapes = shapes.clone();
            config.budget = budget.map(Duration::from_secs);
            config.max_chunks = *max_chunks;
            config.chunk_size = (*chunk_size).max(1);
            config.confirm = *confirm;
            config.workers = workers;
            let outcome = campaign_full(&config).map_err(|e| match e {
                strength_core::paperlab::PaperError::Io(_)
                | strength_core::paperlab::PaperError::CheckpointCorrupt(_) => Failure::Runtime(e.to_string()),
                other => usage(other),
            })?;
            let mut body = outcome.to_json();
            let certificate = body
                .as_object_mut()
                .and_then(|o| o.remove("certificate"))
                .unwrap_or(Value::Null);
            Ok(Outcome {
                report: report(
                    "campaign",
                    &format!("{field}\n{shapes:?}"),
                    body,
                    certificate,
                    json!({
                        "elapsed_ms": outcome.elapsed.as_millis() as u64,
                        "eta_seconds": outcome.eta_seconds,
                    }),
                ),
                violated: outcome.status == CampaignStatus::CounterexampleFound,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let text = outcome.report.to_json();
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => {
                    use std::io::Write;
                    // A closed pipe downstream is not an error for us.
                    let _ = writeln!(std::io::stdout().lock(), "{text}");
                }
            }
            ExitCode::from(if outcome.violated { 3 } else { 0 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
