//! `amalgrowth`: growth tables, tree classification, ping-pong
//! certificates and the acceptance suite from the command line.
//!
//! Exit statuses: 0 success, 1 error (bad input or configuration),
//! 2 inconclusive (no certificate found), 3 truncated (element budget
//! reached before `--nmax`), 4 verification failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amalgrowth::catalog::{self, CatalogEntry};
use amalgrowth::growth::{rate_estimates, to_csv, with_threads, word_length, EnumOptions, DEFAULT_BUDGET};
use amalgrowth::rate::exact_rate;
use amalgrowth::spectral::{
    fit_recurrence_tail, largest_positive_root, positive_root_from_lengths, tolerance_from_f64, Polynomial,
    DEFAULT_GUARD,
};
use amalgrowth::tree::{
    certify_free_monoid, certify_free_split, default_radius, replay, Certificate, CertifyOptions, Tree,
};
use amalgrowth::verification::{self, SuiteConfig};
use amalgrowth::{Alphabet, AmalgamFile, AmalgamSpec, GenSet, NormalForm};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "amalgrowth", version, about = "Growth rates and Bass-Serre tree tools for amalgams of finite groups")]
struct Cli {
    /// Worker threads for enumeration (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sphere and ball counts, fitted recurrence and growth rate.
    Growth(GrowthArgs),
    /// Elliptic or hyperbolic, with translation length and witnesses.
    Classify(ElementArgs),
    /// Fixed vertices of an elliptic element within the radius.
    Fixedset(ElementArgs),
    /// Axis vertices of a hyperbolic element within the radius.
    Axis(ElementArgs),
    /// Search for a ping-pong certificate.
    Certify(CertifyArgs),
    /// Re-run the checks recorded in a certificate file.
    Replay(ReplayArgs),
    /// List the built-in groups.
    Catalog(CatalogArgs),
    /// Run the acceptance suite.
    VerifyPaper(VerifyArgs),
    /// Positive roots of length polynomials, polynomials or sequences.
    Root(RootArgs),
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Catalog name or path to an amalgam JSON file.
    #[arg(long)]
    spec: String,
    /// Comma-separated generator words over the spec's alphabet
    /// (default: the whole alphabet).
    #[arg(long)]
    gens: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GrowthArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 20)]
    nmax: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Count positive words only (no inverses).
    #[arg(long)]
    positive: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the CSV table here and the JSON report next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ElementArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// A word such as `b c` or `a b^-1`.
    word: String,
    /// Ball radius (default: 2 x syllable length + 4).
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Monoid,
    Split,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_enum, default_value = "monoid")]
    mode: Mode,
    /// Monoid mode: the elements, one word each.
    words: Vec<String>,
    /// Split mode: comma-separated words for the left side.
    #[arg(long)]
    left: Option<String>,
    /// Split mode: comma-separated words for the right side.
    #[arg(long)]
    right: Option<String>,
    #[arg(long)]
    radius: Option<usize>,
    /// Powers checked for an infinite cyclic side.
    #[arg(long, default_value_t = 6)]
    powers: i64,
    /// Word lengths of the elements are searched up to this length.
    #[arg(long, default_value_t = 12)]
    nmax: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Write the certificate here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Catalog name or path to an amalgam JSON file.
    #[arg(long)]
    spec: String,
    certificate: PathBuf,
}

#[derive(Args)]
struct CatalogArgs {
    /// Show one entry.
    name: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Cap every criterion's enumeration depth.
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = SuiteConfig::default().budget)]
    budget: usize,
    /// Comma-separated criterion numbers (default: all).
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RootArgs {
    /// Element lengths, e.g. `2,3`.
    #[arg(long, conflicts_with_all = ["poly", "sequence"])]
    lengths: Option<String>,
    /// Integer coefficients, constant term first, e.g. `-1,-1,0,1`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "sequence")]
    poly: Option<String>,
    /// Integer sequence to fit a recurrence to.
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

/// Exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok = 0,
    Inconclusive = 2,
    Truncated = 3,
    Failed = 4,
}

struct Loaded {
    source: String,
    spec: AmalgamSpec,
    alphabet: Alphabet,
    gens: GenSet,
    decomposition: Option<String>,
}

impl Loaded {
    fn word(&self, text: &str) -> Result<NormalForm> {
        let w = self.alphabet.parse_word(text).with_context(|| format!("cannot parse word `{text}`"))?;
        Ok(self.spec.reduce(&self.alphabet, &w))
    }

    fn words(&self, list: &str) -> Result<Vec<NormalForm>> {
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|w| self.word(w)).collect()
    }

    fn header(&self) -> Value {
        json!({
            "source": self.source,
            "hash": self.spec.hash(),
            "decomposition": self.decomposition,
        })
    }

    fn generators(&self) -> Value {
        let names = self.gens.names();
        Value::Array(
            names
                .iter()
                .zip(self.gens.elements())
                .map(|(n, g)| json!({"name": n, "element": self.spec.display(g)}))
                .collect(),
        )
    }
}

fn load_spec(args: &SpecArgs) -> Result<Loaded> {
    let (spec, alphabet, decomposition) = load_amalgam(&args.spec)?;
    let gens = match &args.gens {
        None => GenSet::new(&spec, alphabet.clone())?,
        Some(list) => {
            let mut alpha = Alphabet::new();
            for w in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let word = alphabet.parse_word(w).with_context(|| format!("cannot parse generator `{w}`"))?;
                alpha.push(w.to_string(), spec.reduce(&alphabet, &word))?;
            }
            GenSet::new(&spec, alpha)?
        }
    };
    Ok(Loaded { source: args.spec.clone(), spec, alphabet, gens, decomposition })
}

fn load_amalgam(source: &str) -> Result<(AmalgamSpec, Alphabet, Option<String>)> {
    if catalog::NAMES.contains(&source) {
        let CatalogEntry { spec, generators, decomposition, .. } = catalog::load(source)?;
        return Ok((spec, generators.alphabet().clone(), Some(decomposition.to_string())));
    }
    let path = Path::new(source);
    if !path.exists() {
        bail!("`{source}` is neither a catalog entry ({}) nor a file", catalog::NAMES.join(", "));
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
    let file: AmalgamFile = serde_json::from_str(&text).with_context(|| format!("parsing {source}"))?;
    let (spec, alphabet) = file.build()?;
    Ok((spec, alphabet, None))
}

fn envelope(command: &str, loaded: Option<&Loaded>, params: Value, seed: Option<u64>, result: impl Serialize) -> Value {
    json!({
        "tool": "amalgrowth",
        "version": VERSION,
        "command": command,
        "spec": loaded.map(Loaded::header),
        "generators": loaded.map(Loaded::generators),
        "params": params,
        "seed": seed,
        "result": result,
    })
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => say(&text)?,
    }
    Ok(())
}

fn say(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", text.trim_end_matches('\n'))?;
    out.flush()?;
    Ok(())
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe))
}

fn cmd_growth(a: &GrowthArgs) -> Result<Status> {
    if a.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let loaded = load_spec(&a.spec)?;
    let mut opts = EnumOptions::new(a.nmax).budget(a.budget);
    if a.positive {
        opts = opts.positive_only();
    }
    let report = exact_rate(&loaded.spec, &loaded.gens, opts, &tolerance_from_f64(a.tol));
    let csv = to_csv(&report.table);
    let params = json!({"nmax": a.nmax, "budget": a.budget, "tol": a.tol, "with_inverses": !a.positive});
    let result = json!({
        "reached": report.table.reached(),
        "truncated": report.table.truncated,
        "sphere": report.table.sphere,
        "ball": report.table.ball,
        "estimates": rate_estimates(&report.table),
        "recurrence": report.recurrence,
        "root": report.root,
        "root_failure": report.failure,
    });
    let doc = envelope("growth", Some(&loaded), params, Some(a.seed), result);
    if let Some(out) = &a.out {
        fs::write(out, &csv).with_context(|| format!("writing {}", out.display()))?;
        emit(&doc, Some(&out.with_extension("json")))?;
    }
    match a.format {
        Format::Csv => say(&csv)?,
        Format::Json => emit(&doc, None)?,
    }
    Ok(if report.table.is_truncated() { Status::Truncated } else { Status::Ok })
}

fn element_context(a: &ElementArgs) -> Result<(Loaded, NormalForm, usize)> {
    let loaded = load_spec(&a.spec)?;
    let g = loaded.word(&a.word)?;
    let radius = a.radius.unwrap_or_else(|| default_radius(std::slice::from_ref(&g)));
    Ok((loaded, g, radius))
}

fn cmd_classify(a: &ElementArgs) -> Result<Status> {
    let (loaded, g, radius) = element_context(a)?;
    let tree = Tree::new(&loaded.spec);
    let c = tree.classify(&g, radius);
    let result = json!({
        "word": a.word,
        "element": loaded.spec.display(&g),
        "classification": c,
        "witness_display": c.witness.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    });
    emit(&envelope("classify", Some(&loaded), json!({"radius": radius}), None, result), a.out.as_deref())?;
    Ok(Status::Ok)
}

fn cmd_fixedset(a: &ElementArgs) -> Result<Status> {
    let (loaded, g, radius) = element_context(a)?;
    let tree = Tree::new(&loaded.spec);
    let fixed = tree.fixed_set(&g, radius)?;
    let result = json!({
        "word": a.word,
        "size": fixed.len(),
        "vertices": fixed.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    });
    emit(&envelope("fixedset", Some(&loaded), json!({"radius": radius}), None, result), a.out.as_deref())?;
    Ok(Status::Ok)
}

fn cmd_axis(a: &ElementArgs) -> Result<Status> {
    let (loaded, g, radius) = element_context(a)?;
    let tree = Tree::new(&loaded.spec);
    let axis = tree.axis(&g, radius)?;
    let segment = tree.axis_segment(&g, radius)?;
    let result = json!({
        "word": a.word,
        "tau": axis.tau,
        "vertices": segment.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    });
    emit(&envelope("axis", Some(&loaded), json!({"radius": radius}), None, result), a.out.as_deref())?;
    Ok(Status::Ok)
}

fn cmd_certify(a: &CertifyArgs) -> Result<Status> {
    let loaded = load_spec(&a.spec)?;
    let tree = Tree::new(&loaded.spec);
    let (elements, attempt, params) = match a.mode {
        Mode::Monoid => {
            if a.words.len() < 2 {
                bail!("monoid mode needs at least two words");
            }
            let elements: Vec<NormalForm> = a.words.iter().map(|w| loaded.word(w)).collect::<Result<_>>()?;
            let radius = a.radius.unwrap_or_else(|| default_radius(&elements));
            let opts = CertifyOptions { power_bound: a.powers, ..CertifyOptions::new(radius) };
            let params = json!({"mode": "monoid", "words": a.words, "radius": radius});
            (elements.clone(), certify_free_monoid(&tree, &elements, &opts), params)
        }
        Mode::Split => {
            let (Some(l), Some(r)) = (&a.left, &a.right) else {
                bail!("split mode needs --left and --right");
            };
            let (left, right) = (loaded.words(l)?, loaded.words(r)?);
            let all: Vec<NormalForm> = left.iter().chain(&right).cloned().collect();
            let radius = a.radius.unwrap_or_else(|| default_radius(&all));
            let opts = CertifyOptions { power_bound: a.powers, ..CertifyOptions::new(radius) };
            let params = json!({"mode": "split", "left": l, "right": r, "radius": radius, "powers": a.powers});
            (all, certify_free_split(&tree, &left, &right, &opts), params)
        }
    };
    let cert = match attempt {
        Ok(c) => c,
        Err(e) => {
            let result = json!({"status": "inconclusive", "reason": e.to_string()});
            emit(&envelope("certify", Some(&loaded), params, None, result), None)?;
            return Ok(Status::Inconclusive);
        }
    };
    let mut bound = Value::Null;
    if matches!(a.mode, Mode::Monoid) {
        let lengths: Option<Vec<usize>> =
            elements.iter().map(|g| word_length(&loaded.spec, &loaded.gens, g, a.nmax)).collect();
        bound = match lengths {
            Some(lengths) => match positive_root_from_lengths(&lengths, &tolerance_from_f64(a.tol)) {
                Ok(root) => json!({"lengths": lengths, "polynomial": root.polynomial, "root": root.enclosure}),
                Err(e) => json!({"lengths": lengths, "error": e.to_string()}),
            },
            None => json!({"error": format!("word length exceeds {}", a.nmax)}),
        };
    }
    if let Some(out) = &a.out {
        fs::write(out, serde_json::to_string_pretty(&cert)? + "\n")
            .with_context(|| format!("writing {}", out.display()))?;
    }
    let result = json!({
        "status": "certified",
        "conclusion": cert.conclusion,
        "checks": cert.checks.len(),
        "fully_structural": cert.fully_structural(),
        "lower_bound": bound,
        "certificate": cert,
    });
    emit(&envelope("certify", Some(&loaded), params, None, result), None)?;
    Ok(Status::Ok)
}

fn cmd_replay(a: &ReplayArgs) -> Result<Status> {
    let (spec, _, _) = load_amalgam(&a.spec)?;
    let text = fs::read_to_string(&a.certificate).with_context(|| format!("reading {}", a.certificate.display()))?;
    let cert: Certificate = serde_json::from_str(&text).context("parsing certificate")?;
    let (status, result) = match replay(&spec, &cert) {
        Ok(checks) => (Status::Ok, json!({"status": "valid", "checks": checks.len(), "conclusion": cert.conclusion})),
        Err(e) => (Status::Failed, json!({"status": "invalid", "reason": e.to_string()})),
    };
    let params = json!({"certificate": a.certificate, "spec_hash": spec.hash()});
    emit(&envelope("replay", None, params, None, result), None)?;
    Ok(status)
}

fn catalog_json(e: &CatalogEntry) -> Value {
    json!({
        "name": e.name,
        "decomposition": e.decomposition,
        "hash": e.spec.hash(),
        "factor_orders": [e.spec.factor(amalgrowth::Side::A).order(), e.spec.factor(amalgrowth::Side::B).order()],
        "amalgamated_order": e.spec.amalgamated().order(),
        "indices": [e.spec.index(amalgrowth::Side::A), e.spec.index(amalgrowth::Side::B)],
        "generators": e.generators.names().iter().zip(e.generators.elements())
            .map(|(n, g)| json!({"name": n, "element": e.spec.display(g)})).collect::<Vec<_>>(),
        "expected": e.expected,
    })
}

fn cmd_catalog(a: &CatalogArgs) -> Result<Status> {
    let entries = match &a.name {
        Some(n) => vec![catalog::load(n)?],
        None => catalog::all(),
    };
    match a.format {
        Format::Json => {
            let list: Vec<Value> = entries.iter().map(catalog_json).collect();
            emit(&envelope("catalog", None, json!({"name": a.name}), None, list), None)?;
        }
        Format::Csv => {
            let mut text = String::from("name,decomposition,generators,quantity,value,provenance\n");
            for e in &entries {
                for x in &e.expected {
                    let gens = x.generators.clone().unwrap_or_else(|| e.generators.names().to_vec());
                    text += &format!(
                        "{},\"{}\",\"{}\",{},\"{}\",{}\n",
                        e.name,
                        e.decomposition,
                        gens.join(" | "),
                        x.quantity,
                        x.value,
                        x.provenance
                    );
                }
            }
            say(&text)?;
        }
    }
    Ok(Status::Ok)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Status> {
    let config = SuiteConfig { nmax: a.nmax, seed: a.seed, budget: a.budget };
    let ids: Vec<u32> = match &a.only {
        None => verification::CRITERIA.iter().map(|c| c.0).collect(),
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| anyhow!("bad criterion number `{s}`")))
            .collect::<Result<_>>()?,
    };
    if let Some(bad) = ids.iter().find(|id| !verification::CRITERIA.iter().any(|c| c.0 == **id)) {
        bail!("no criterion {bad}");
    }
    let results: Vec<_> = ids.iter().map(|&id| verification::run_one(id, &config)).collect();
    let failed = results.iter().filter(|r| !r.passed).count();
    if a.json {
        let params = json!({"nmax": a.nmax, "budget": a.budget, "criteria": ids});
        emit(&envelope("verify-paper", None, params, Some(a.seed), &results), None)?;
    } else {
        let mut text = String::new();
        for r in &results {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            text += &format!("criterion {:>2} {verdict} ({:.1}s) {}: {}\n", r.id, r.seconds, r.name, r.measured);
        }
        text += &format!("{} passed, {failed} failed (seed {}, version {VERSION})", results.len() - failed, a.seed);
        say(&text)?;
    }
    Ok(if failed == 0 { Status::Ok } else { Status::Failed })
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| anyhow!("bad number `{t}`")))
        .collect()
}

fn cmd_root(a: &RootArgs) -> Result<Status> {
    if a.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let tol = tolerance_from_f64(a.tol);
    let params = json!({"tol": a.tol});
    let result = if let Some(l) = &a.lengths {
        let lengths: Vec<usize> = parse_list(l)?;
        let root = positive_root_from_lengths(&lengths, &tol)?;
        json!({"lengths": lengths, "polynomial": root.polynomial, "root": root.enclosure, "degenerate": root.degenerate})
    } else if let Some(p) = &a.poly {
        let coeffs: Vec<BigInt> = parse_list(p)?;
        let poly = Polynomial::new(coeffs);
        let (root, count) = largest_positive_root(&poly, &tol)?;
        json!({"polynomial": poly, "root": root, "positive_roots": count})
    } else if let Some(s) = &a.sequence {
        let seq: Vec<BigInt> = parse_list(s)?;
        let rec = fit_recurrence_tail(&seq, DEFAULT_GUARD, seq.len() / 3)
            .ok_or_else(|| anyhow!("no recurrence fits {} terms", seq.len()))?;
        let (root, _) = rec.dominant_root(&tol)?;
        json!({"recurrence": rec, "root": root})
    } else {
        bail!("give one of --lengths, --poly or --sequence");
    };
    emit(&envelope("root", None, params, None, result), None)?;
    Ok(Status::Ok)
}

fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Growth(a) => cmd_growth(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Fixedset(a) => cmd_fixedset(a),
        Command::Axis(a) => cmd_axis(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Catalog(a) => cmd_catalog(a),
        Command::VerifyPaper(a) => cmd_verify(a),
        Command::Root(a) => cmd_root(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(cli.threads, || run(&cli)) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
