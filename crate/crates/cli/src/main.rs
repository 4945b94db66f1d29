//! `aaut` — exact computations with finitary almost automorphisms of
//! rooted trees.
//!
//! Elements travel as line-oriented text files (see `AAutElement::serialize`),
//! verdicts as single-line JSON objects, and corpus reports as pretty JSON.
//! Exit codes: 0 success, 1 bad input, 2 a verification or expectation
//! failed, 3 a configured cap was exhausted (with a structured JSON error on
//! standard output).

mod corpus;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use aaut_core::classify::{
    classify_element, classify_subgroup, oracle_classify, order_of, verify_witness, Caps,
    Classification, ElementOrder, OracleVerdict, SubgroupClassification, SubgroupOrder,
    TranslationCert,
};
use aaut_core::element::AAutElement;
use aaut_core::random::random_element;
use aaut_core::{Address, End, Error, RegularPartition, Shape};

use verify::Suite;

#[derive(Parser)]
#[command(
    name = "aaut",
    version,
    about = "Exact computations with finitary almost automorphisms of rooted trees"
)]
struct Cli {
    /// Emit machine-readable JSON where a command also has a plain form.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized commands and verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Iteration cap for the partition-refinement engine.
    #[arg(long, global = true, default_value_t = 10_000)]
    iter_cap: u64,

    /// Size cap for permutation-group closure enumeration.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    closure_cap: u64,

    /// Power cap for the independent power-scanning oracle.
    #[arg(long, global = true, default_value_t = 1_000)]
    oracle_cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether one element is elliptic or a translation.
    Classify {
        /// Element file in the line-oriented `aaut v1` format.
        file: Option<PathBuf>,

        /// Inline leaf map, e.g. "0.0 -> 1; 0.1 -> 0.1; 1 -> 0.0"; requires --shape.
        #[arg(long, conflicts_with = "file")]
        inline: Option<String>,

        /// Tree shape as d,k for --inline input.
        #[arg(long)]
        shape: Option<Shape>,

        /// Re-verify the emitted certificate and cross-check with the oracle.
        #[arg(long)]
        check: bool,
    },

    /// Decide whether the subgroup generated by the given elements is finite.
    Subgroup {
        /// One element file per generator, all over the same shape.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },

    /// Compose elements left to right as functions and print the result.
    Compose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },

    /// Print the inverse of an element.
    Invert { file: PathBuf },

    /// Apply an element to a vertex address or an eventually periodic end.
    Apply {
        file: PathBuf,

        /// An address like `1.0.1`, or an end like `0.1(1.0)` or `(1)`.
        point: String,
    },

    /// Print the order of an element: a positive integer or "infinite".
    Order { file: PathBuf },

    /// Run a named verification battery and report each check.
    Verify {
        /// Which battery to run.
        #[arg(value_enum)]
        suite: Suite,

        /// Number of randomized checks (deterministic suites ignore this).
        #[arg(long)]
        count: Option<u64>,

        /// Restrict to one tree shape d,k (default: a spread of shapes).
        #[arg(long)]
        shape: Option<Shape>,
    },

    /// Generate a seeded pseudorandom reduced element (byte-deterministic).
    Random {
        /// Tree shape as d,k.
        #[arg(long)]
        shape: Shape,

        /// Leaves to grow in each code; must equal k + m(d-1) for some m >= 0.
        #[arg(long)]
        leaves: usize,
    },

    /// Evaluate a JSON corpus of classification cases against expectations.
    Corpus { file: PathBuf },

    /// Print the partition of the boundary into all balls at one level.
    Spherical {
        /// Tree shape as d,k.
        #[arg(long)]
        shape: Shape,

        /// Sphere level (at least 1).
        level: u32,
    },
}

/// A command failure, carrying the process exit code it maps to.
pub(crate) enum Failure {
    /// Unusable input: missing files, parse errors, impossible parameters.
    Input(String),
    /// A certificate, identity, or expectation failed to verify.
    Check(String),
    /// A configured cap ran out before the computation finished.
    Cap { kind: &'static str, cap: u64 },
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Check(_) => 2,
            Failure::Cap { .. } => 3,
        }
    }

    fn report(&self) {
        match self {
            Failure::Input(msg) => eprintln!("error: {msg}"),
            Failure::Check(msg) => eprintln!("verification failed: {msg}"),
            Failure::Cap { kind, cap } => {
                println!("{}", json!({ "error": "cap_exceeded", "kind": kind, "cap": cap }));
                eprintln!("error: {kind} cap exhausted at {cap}");
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        match err {
            Error::IterationCapExceeded { cap } => Failure::Cap { kind: "iteration", cap },
            Error::SizeCapExceeded { cap } => Failure::Cap { kind: "size", cap },
            Error::Certificate(_) | Error::Verification(_) => Failure::Check(err.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(failure) => {
            failure.report();
            failure.exit_code()
        }
    };
    process::exit(code);
}

fn run(cli: &Cli) -> CmdResult {
    let caps = Caps {
        iter_cap: cli.iter_cap,
        closure_cap: cli.closure_cap,
    };
    match &cli.command {
        Command::Classify {
            file,
            inline,
            shape,
            check,
        } => cmd_classify(file.as_deref(), inline.as_deref(), *shape, *check, caps, cli),
        Command::Subgroup { files } => cmd_subgroup(files, caps),
        Command::Compose { files } => cmd_compose(files, cli),
        Command::Invert { file } => cmd_invert(file, cli),
        Command::Apply { file, point } => cmd_apply(file, point, cli),
        Command::Order { file } => cmd_order(file, caps, cli),
        Command::Verify {
            suite,
            count,
            shape,
        } => cmd_verify(*suite, *count, *shape, cli),
        Command::Random { shape, leaves } => cmd_random(*shape, *leaves, cli),
        Command::Corpus { file } => cmd_corpus(file, caps),
        Command::Spherical { shape, level } => cmd_spherical(*shape, *level, cli),
    }
}

/// Reads and parses one element file.
fn load_element(path: &Path) -> Result<AAutElement, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|err| Failure::Input(format!("cannot read {}: {err}", path.display())))?;
    AAutElement::parse_text(&text).map_err(Failure::from)
}

fn load_elements(paths: &[PathBuf]) -> Result<Vec<AAutElement>, Failure> {
    paths.iter().map(|p| load_element(p)).collect()
}

/// The JSON verdict for a single-element classification.
pub(crate) fn classification_json(verdict: &Classification) -> serde_json::Value {
    match verdict {
        Classification::Elliptic {
            invariant_partition,
            order,
        } => json!({
            "class": "elliptic",
            "order": order,
            "invariant_partition": partition_strings(invariant_partition),
        }),
        Classification::Translation(cert) => translation_json(cert),
    }
}

/// The JSON verdict for a subgroup classification.
pub(crate) fn subgroup_json(verdict: &SubgroupClassification) -> serde_json::Value {
    match verdict {
        SubgroupClassification::Elliptic(cert) => {
            let mut value = json!({
                "class": "elliptic",
                "invariant_partition": partition_strings(&cert.base_partition),
            });
            match cert.order {
                SubgroupOrder::Exact(n) => value["order"] = json!(n),
                SubgroupOrder::CapExceeded { cap } => {
                    value["order"] = json!("cap_exceeded");
                    value["cap"] = json!(cap);
                }
            }
            value
        }
        SubgroupClassification::Translation(cert) => translation_json(cert),
    }
}

pub(crate) fn translation_json(cert: &TranslationCert) -> serde_json::Value {
    json!({
        "class": "translation",
        "witness": cert.witness.serialize(),
        "ball": cert.ball.to_string(),
        "power": cert.power,
        "image": cert.image.to_string(),
    })
}

pub(crate) fn partition_strings(p: &RegularPartition) -> Vec<String> {
    p.balls().iter().map(|b| b.to_string()).collect()
}

fn cmd_classify(
    file: Option<&Path>,
    inline: Option<&str>,
    shape: Option<Shape>,
    check: bool,
    caps: Caps,
    cli: &Cli,
) -> CmdResult {
    let element = match (file, inline) {
        (Some(path), None) => load_element(path)?,
        (None, Some(text)) => {
            let shape = shape
                .ok_or_else(|| Failure::Input("--inline requires --shape".to_string()))?;
            AAutElement::parse_leaf_map(shape, text)?
        }
        _ => return Err(Failure::Input("give an element file or --inline".to_string())),
    };
    let verdict = classify_element(&element, caps)?;
    let mut report = classification_json(&verdict);
    let mut failed: Vec<String> = Vec::new();
    if check {
        let checks = run_classify_checks(&element, &verdict, cli.oracle_cap);
        report["checks"] = serde_json::Value::Array(
            checks
                .iter()
                .map(|c| json!({ "name": c.0, "pass": c.1, "detail": c.2 }))
                .collect(),
        );
        failed.extend(
            checks
                .iter()
                .filter(|c| !c.1)
                .map(|c| format!("{}: {}", c.0, c.2)),
        );
    }
    println!("{report}");
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("verification failed: {}", failed.join("; "));
        Ok(2)
    }
}

/// Certificate re-verification plus an oracle cross-check: (name, pass, detail).
fn run_classify_checks(
    element: &AAutElement,
    verdict: &Classification,
    oracle_cap: u64,
) -> Vec<(&'static str, bool, String)> {
    let mut checks = Vec::new();
    match verdict {
        Classification::Elliptic {
            invariant_partition,
            order,
        } => {
            let stab = element.in_stab(invariant_partition).unwrap_or(false);
            // The stated order is an exponent: the matching power must be
            // the identity. Skip the exponentiation when the order is too
            // large to cast safely.
            let (power_ok, note) = if *order <= i64::MAX as u64 {
                match element.power(*order as i64) {
                    Ok(p) => (p.is_identity(), "power at the stated order is the identity"),
                    Err(_) => (false, "power at the stated order could not be formed"),
                }
            } else {
                (true, "order too large to exponentiate; partition check only")
            };
            checks.push((
                "certificate",
                stab && power_ok,
                if stab {
                    note.to_string()
                } else {
                    "element does not preserve the stated partition".to_string()
                },
            ));
        }
        Classification::Translation(cert) => {
            let report = verify_witness(cert);
            checks.push((
                "certificate",
                report.valid,
                report
                    .reason
                    .unwrap_or_else(|| "witness verified".to_string()),
            ));
        }
    }
    let oracle = match oracle_classify(element, oracle_cap.max(1)) {
        Ok(OracleVerdict::Unknown) => (
            true,
            format!("oracle inconclusive within {oracle_cap} powers"),
        ),
        Ok(OracleVerdict::Elliptic { order: m }) => match verdict {
            Classification::Elliptic { order, .. } if *order == m => {
                (true, format!("oracle agrees: elliptic of order {m}"))
            }
            _ => (false, format!("oracle disagrees: elliptic of order {m}")),
        },
        Ok(OracleVerdict::Translation { power, ball }) => match verdict {
            Classification::Translation(_) => (
                true,
                format!("oracle agrees: power {power} contracts into {ball}"),
            ),
            _ => (false, format!("oracle disagrees: power {power} contracts into {ball}")),
        },
        Err(err) => (false, format!("oracle failed: {err}")),
    };
    checks.push(("oracle", oracle.0, oracle.1));
    checks
}

fn cmd_subgroup(files: &[PathBuf], caps: Caps) -> CmdResult {
    let gens = load_elements(files)?;
    let verdict = classify_subgroup(&gens, caps)?;
    println!("{}", subgroup_json(&verdict));
    Ok(0)
}

fn cmd_compose(files: &[PathBuf], cli: &Cli) -> CmdResult {
    let elements = load_elements(files)?;
    let mut product = elements[0].clone();
    for next in &elements[1..] {
        product = product.compose(next)?;
    }
    emit_element(&product, cli);
    Ok(0)
}

fn cmd_invert(file: &Path, cli: &Cli) -> CmdResult {
    let element = load_element(file)?;
    emit_element(&element.invert(), cli);
    Ok(0)
}

fn emit_element(element: &AAutElement, cli: &Cli) {
    let text = element.serialize();
    if cli.json {
        println!("{}", json!({ "element": text }));
    } else {
        print!("{text}");
    }
}

fn cmd_apply(file: &Path, point: &str, cli: &Cli) -> CmdResult {
    let element = load_element(file)?;
    let shape = element.shape();
    // Ends carry their period in parentheses; addresses never do.
    let image = if point.contains('(') {
        let end = End::parse(shape, point)?;
        element.apply_to_end(&end)?.to_string()
    } else {
        let addr = Address::parse(shape, point)?;
        element.apply_to_address(&addr)?.to_string()
    };
    if cli.json {
        println!("{}", json!({ "point": point, "image": image }));
    } else {
        println!("{image}");
    }
    Ok(0)
}

fn cmd_order(file: &Path, caps: Caps, cli: &Cli) -> CmdResult {
    let element = load_element(file)?;
    match order_of(&element, caps)? {
        ElementOrder::Finite(n) => {
            if cli.json {
                println!("{}", json!({ "order": n }));
            } else {
                println!("{n}");
            }
        }
        ElementOrder::Infinite => {
            if cli.json {
                println!("{}", json!({ "order": "infinite" }));
            } else {
                println!("infinite");
            }
        }
    }
    Ok(0)
}

fn cmd_verify(suite: Suite, count: Option<u64>, shape: Option<Shape>, cli: &Cli) -> CmdResult {
    let records = verify::run_suite(suite, cli.seed, count, shape);
    let passed = records.iter().filter(|r| r.pass).count();
    if cli.json {
        let checks: Vec<serde_json::Value> = records
            .iter()
            .map(|r| {
                let mut v = json!({ "name": r.name, "pass": r.pass });
                if let Some(detail) = &r.detail {
                    v["detail"] = json!(detail);
                }
                if let Some(instance) = &r.instance {
                    v["instance"] = json!(instance);
                }
                v
            })
            .collect();
        let mut report = json!({
            "suite": suite.slug(),
            "checks": checks,
            "passed": passed,
            "total": records.len(),
            "all_pass": passed == records.len(),
        });
        if suite == Suite::TranBranch {
            report["experiment"] = json!("tran_branch");
        }
        println!("{report}");
    } else {
        for r in &records {
            let mark = if r.pass { "pass" } else { "FAIL" };
            match &r.detail {
                Some(detail) => println!("[{mark}] {} — {detail}", r.name),
                None => println!("[{mark}] {}", r.name),
            }
            if let Some(instance) = &r.instance {
                for line in instance.lines() {
                    println!("    {line}");
                }
            }
        }
        println!(
            "suite {}: {passed}/{} checks passed",
            suite.slug(),
            records.len()
        );
    }
    if passed == records.len() {
        Ok(0)
    } else {
        eprintln!(
            "verification failed: {} of {} checks in suite {}",
            records.len() - passed,
            records.len(),
            suite.slug()
        );
        Ok(2)
    }
}

fn cmd_random(shape: Shape, leaves: usize, cli: &Cli) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let element = random_element(shape, leaves, &mut rng)?;
    emit_element(&element, cli);
    Ok(0)
}

fn cmd_corpus(file: &Path, caps: Caps) -> CmdResult {
    let outcome = corpus::run_corpus(file, caps)?;
    println!("{}", serde_json::to_string_pretty(&outcome.report).expect("report serializes"));
    Ok(outcome.exit)
}

fn cmd_spherical(shape: Shape, level: u32, cli: &Cli) -> CmdResult {
    let partition = RegularPartition::spherical(shape, level)?;
    if cli.json {
        println!("{}", json!({ "partition": partition_strings(&partition) }));
    } else {
        println!("{partition}");
    }
    Ok(0)
}
