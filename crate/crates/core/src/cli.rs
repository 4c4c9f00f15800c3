//! `sunflower` command line.
//!
//! Structured results go to stdout (or `--out`, or `$SUNFLOWER_OUT_DIR`);
//! human-readable verification lines go to stderr. Every JSON document and
//! CSV row carries a `schema_version`.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{block_product_family, erdos_rado_lower_family, tightness_chain, FAMILY_SIZE_CAP};
use crate::engine::{
    exact_hit_probability, exact_hit_probability_by, lemma2_identity_check, mc_hit_probability,
    partition_experiment, verify_appendix_decomposition, verify_chernoff_tail, with_clopper_pearson,
    HitEstimate, Method, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::exact_sun::{sun_value, SunQuery, SunValue};
use crate::extraction::{extract_sunflower, ExtractionParams};
use crate::family::SetFamily;
use crate::spread::{spread_witness_with, spreadness, ViolationChoice};

pub const SCHEMA_VERSION: u32 = 1;
/// Default output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "SUNFLOWER_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "sunflower", version, about = "Sunflowers, spread families, and random partitions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub trials: u64,
    /// Worker threads; results are identical for every value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a constructed family as JSON.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Certify r-spreadness or report a violating set.
    CheckSpread {
        family: PathBuf,
        #[arg(long)]
        r: f64,
        /// Report the violation with the largest count / r^(k-|T|).
        #[arg(long)]
        max_ratio: bool,
    },
    /// Run the recursive extraction and print its trace.
    FindSunflower {
        family: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 4.0)]
        c: f64,
        #[arg(long)]
        r_override: Option<f64>,
        /// Defaults to 64 p.
        #[arg(long)]
        max_partition_trials: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        fallback_cap: u64,
        #[arg(long)]
        no_fallback: bool,
    },
    /// Estimate Pr(some member ⊆ X_delta).
    EstimateHit {
        family: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = HitMethod::Auto)]
        method: HitMethod,
        /// Attach an exact Clopper-Pearson interval to Monte Carlo results.
        #[arg(long)]
        clopper_pearson: bool,
    },
    /// Random t-class partition experiment.
    Partition {
        family: PathBuf,
        #[arg(long)]
        t: usize,
    },
    /// Numeric checks; exit code 1 on failure.
    Verify {
        #[command(subcommand)]
        which: VerifyKind,
    },
    /// Exhaustive Sun(p, k).
    ExactSun {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        /// Seconds.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        ground_cap: Option<usize>,
        /// Also write the witness family here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstructKind {
    BlockProduct {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
    },
    ErdosRado {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HitMethod {
    Auto,
    Enumeration,
    InclusionExclusion,
    MonteCarlo,
}

#[derive(Debug, Subcommand)]
pub enum VerifyKind {
    /// Mean hit classes = t * Pr(hit at delta = 1/t).
    Lemma2 {
        family: PathBuf,
        #[arg(long)]
        t: usize,
    },
    /// Block-product tightness chain.
    Lemma3 {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
    },
    /// X_delta versus uniform X_m decomposition.
    Appendix {
        family: PathBuf,
        #[arg(long)]
        delta: f64,
    },
    /// Binomial lower tail versus e^{-n delta / 8}.
    Chernoff {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long)]
        eps: Option<f64>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = execute(cli);
    eprint!("{}", outcome.stderr);
    print!("{}", outcome.stdout);
    outcome.code
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => Outcome { stderr: e.to_string(), code: 2, ..Default::default() },
    }
}

pub fn execute(cli: Cli) -> Outcome {
    let result = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::InvalidParameter(e.to_string())),
        },
        None => dispatch(&cli),
    };
    let mut outcome = match result {
        Ok(o) => o,
        Err(e) => return Outcome { stderr: format!("error: {e}\n"), code: 1, ..Default::default() },
    };
    if let Err(e) = route_output(&cli, &mut outcome) {
        return Outcome { stderr: format!("error: {e}\n"), code: 1, ..Default::default() };
    }
    outcome
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Construct { .. } => "construct",
        Command::CheckSpread { .. } => "check-spread",
        Command::FindSunflower { .. } => "find-sunflower",
        Command::EstimateHit { .. } => "estimate-hit",
        Command::Partition { .. } => "partition",
        Command::Verify { .. } => "verify",
        Command::ExactSun { .. } => "exact-sun",
    }
}

/// Moves stdout into a file when `--out` or the environment asks for it.
fn route_output(cli: &Cli, outcome: &mut Outcome) -> Result<()> {
    let ext = match cli.global.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let target = match &cli.global.out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(|dir| Path::new(&dir).join(format!("{}.{ext}", command_name(&cli.command)))),
    };
    if let Some(path) = target {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, &outcome.stdout)?;
        outcome.stderr.push_str(&format!("wrote {}\n", path.display()));
        outcome.stdout.clear();
    }
    Ok(())
}

fn load_family(path: &Path) -> Result<SetFamily> {
    SetFamily::read_json(BufReader::new(File::open(path)?))
}

fn family_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn json_doc<T: Serialize>(command: &str, body: &T) -> Result<String> {
    let mut v = serde_json::to_value(body)?;
    let obj = match &mut v {
        Value::Object(m) => m,
        _ => return Err(Error::InvalidParameter("report must serialize to an object".into())),
    };
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(command));
    doc.append(obj);
    let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
    s.push('\n');
    Ok(s)
}

fn csv_doc<H, R>(header: &[H], rows: &[R]) -> Result<String>
where
    H: AsRef<[u8]>,
    R: AsRef<[String]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.as_ref())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn require_json(cli: &Cli, what: &str) -> Result<()> {
    if cli.global.format == Format::Csv {
        return Err(Error::InvalidParameter(format!("{what} only supports --format json")));
    }
    Ok(())
}

fn pass_fail(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let mut out = Outcome::default();
    match &cli.command {
        Command::Construct { kind } => {
            require_json(cli, "construct")?;
            let fam = match *kind {
                ConstructKind::BlockProduct { k, r } => match block_product_family(k, r) {
                    Ok((f, _)) => f,
                    Err(Error::FamilyTooLarge { count, cap }) => {
                        return Err(Error::InvalidParameter(format!(
                            "{r}^{k} = {count} sets exceeds the cap of {cap}; \
                             use BlockPartition::transversals() to stream them"
                        )))
                    }
                    Err(e) => return Err(e),
                },
                ConstructKind::ErdosRado { p, k } => erdos_rado_lower_family(p, k)?,
            };
            debug_assert!(fam.len() <= FAMILY_SIZE_CAP);
            out.stdout = fam.to_json_string() + "\n";
        }
        Command::CheckSpread { family, r, max_ratio } => {
            require_json(cli, "check-spread")?;
            let fam = load_family(family)?;
            let choice = if *max_ratio { ViolationChoice::MaxRatio } else { ViolationChoice::First };
            let report = spread_witness_with(&fam, *r, choice)?;
            let spread = spreadness(&fam)?;
            out.stdout = json_doc(
                "check-spread",
                &json!({
                    "family_id": family_id(family),
                    "family_size": fam.len(),
                    "k": fam.k(),
                    "report": report,
                    "spreadness": spread,
                }),
            )?;
        }
        Command::FindSunflower { family, p, c, r_override, max_partition_trials, fallback_cap, no_fallback } => {
            require_json(cli, "find-sunflower")?;
            let fam = load_family(family)?;
            let mut params = ExtractionParams::new(*p).with_seed(g.seed).with_c(*c);
            params.r_override = *r_override;
            if let Some(t) = max_partition_trials {
                params.max_partition_trials = *t;
            }
            params.fallback_bruteforce_cap = (!no_fallback).then_some(*fallback_cap);
            let trace = extract_sunflower(&fam, &params)?;
            if g.verbose > 0 {
                out.stderr = format!(
                    "{} after {} steps\n",
                    if trace.succeeded() { "sunflower found" } else { "no sunflower found" },
                    trace.path.len()
                );
            }
            out.stdout = json_doc("find-sunflower", &json!({ "family_id": family_id(family), "trace": trace }))?;
        }
        Command::EstimateHit { family, delta, method, clopper_pearson } => {
            let fam = load_family(family)?;
            let mut est = match method {
                HitMethod::Auto => exact_hit_probability(&fam, *delta)?,
                HitMethod::Enumeration => exact_hit_probability_by(&fam, *delta, Method::ExactEnumeration)?,
                HitMethod::InclusionExclusion => exact_hit_probability_by(&fam, *delta, Method::InclusionExclusion)?,
                HitMethod::MonteCarlo => mc_hit_probability(&fam, *delta, g.trials, g.seed)?,
            };
            if *clopper_pearson {
                est = with_clopper_pearson(est);
            }
            out.stdout = match g.format {
                Format::Json => json_doc("estimate-hit", &json!({ "family_id": family_id(family), "estimate": est }))?,
                Format::Csv => csv_doc(
                    &["schema_version", "family_id", "delta", "method", "p_hat", "ci", "trials", "seed"],
                    &[hit_row(&family_id(family), &est)],
                )?,
            };
        }
        Command::Partition { family, t } => {
            require_json(cli, "partition")?;
            let fam = load_family(family)?;
            let stats = partition_experiment(&fam, *t, g.trials, g.seed)?;
            out.stdout = json_doc("partition", &json!({ "family_id": family_id(family), "stats": stats }))?;
        }
        Command::Verify { which } => {
            require_json(cli, "verify")?;
            let (doc, lines, pass) = verify(which, g)?;
            out.stdout = doc;
            out.stderr = lines.join("\n") + "\n";
            out.code = if pass { 0 } else { 1 };
        }
        Command::ExactSun { p, k, budget, ground_cap, witness_out } => {
            let mut q = SunQuery::new(*p, *k);
            q.ground_cap = *ground_cap;
            q.time_budget = budget.map(Duration::from_secs_f64);
            let rep = sun_value(&q)?;
            if let Some(path) = witness_out {
                std::fs::write(path, rep.search.witness.to_json_string() + "\n")?;
            }
            let s = &rep.search;
            let value_str = match rep.value {
                SunValue::Exact { value } => value.to_string(),
                SunValue::Bracket { lower, upper } => format!("[{lower},{upper}]"),
            };
            out.stdout = match g.format {
                Format::Json => json_doc(
                    "exact-sun",
                    &json!({
                        "p": p,
                        "k": k,
                        "value": rep.value,
                        "max_sunflower_free": s.size,
                        "exhaustive": s.exhaustive,
                        "ground_size": s.ground_size,
                        "nodes": s.nodes,
                        "seconds": s.elapsed.as_secs_f64(),
                        "witness": s.witness.to_file(),
                    }),
                )?,
                Format::Csv => csv_doc(
                    &["schema_version", "p", "k", "value_or_bracket", "exhaustive", "nodes", "seconds"],
                    &[vec![
                        SCHEMA_VERSION.to_string(),
                        p.to_string(),
                        k.to_string(),
                        value_str,
                        s.exhaustive.to_string(),
                        s.nodes.to_string(),
                        format!("{:.3}", s.elapsed.as_secs_f64()),
                    ]],
                )?,
            };
        }
    }
    Ok(out)
}

/// One CSV row: `(schema_version, family_id, delta, method, p_hat, ci, trials, seed)`.
pub fn hit_row(family_id: &str, est: &HitEstimate) -> Vec<String> {
    let ci = match est.clopper_pearson {
        Some((lo, hi)) => format!("[{lo},{hi}]"),
        None => est.half_width_3sigma.to_string(),
    };
    vec![
        SCHEMA_VERSION.to_string(),
        family_id.to_string(),
        est.delta.to_string(),
        est.method.as_str().to_string(),
        est.p_hat.to_string(),
        ci,
        est.trials.to_string(),
        est.seed.map(|s| s.to_string()).unwrap_or_default(),
    ]
}

fn verify(which: &VerifyKind, g: &GlobalOpts) -> Result<(String, Vec<String>, bool)> {
    let mut lines = Vec::new();
    let (doc, pass) = match which {
        VerifyKind::Lemma2 { family, t } => {
            let fam = load_family(family)?;
            let rep = lemma2_identity_check(&fam, *t, g.trials, g.seed)?;
            lines.push(format!(
                "E[#hit classes] = {:.6} (measured, 3σ = {:.6})  vs  t·Pr(∃S ⊆ X_1/t) = {}·{:.6} = {:.6}",
                rep.measured_mean, rep.three_sigma, t, rep.per_class_hit_probability, rep.expected_hit_classes
            ));
            (json_doc("verify-lemma2", &rep)?, rep.pass)
        }
        VerifyKind::Lemma3 { k, r, delta, eps } => {
            let c = tightness_chain(*k, *r, *delta, *eps)?;
            lines.push(format!(
                "r = {r} ≤ 0.25·δ⁻¹·ln(k/ε) = {:.6}: {}",
                crate::constructions::lemma3_r_bound(*k, *delta, *eps),
                c.in_regime
            ));
            lines.push(format!(
                "(1-(1-δ)^r)^k = {:.6e} ≤ e^(-(1-δ)^r k) = {:.6e} < e^(-e^(-2δr) k) = {:.6e} ≤ e^(-√(εk)) = {:.6e} < 1-ε = {:.6}",
                c.terms[0], c.terms[1], c.terms[2], c.terms[3], c.terms[4]
            ));
            lines.push(format!("links: {:?}", c.links));
            // outside the regime the chain is not claimed; only report it
            let pass = !c.in_regime || c.holds();
            (json_doc("verify-lemma3", &c)?, pass)
        }
        VerifyKind::Appendix { family, delta } => {
            let fam = load_family(family)?;
            let rep = verify_appendix_decomposition(&fam, *delta)?;
            lines.push(format!(
                "Pr(∃S ⊆ X_δ) = {:.9}  ≥  Pr(∃S ⊆ X_m)·Pr(|X_δ| ≥ m) = {:.9}·{:.9} = {:.9}   (m = {})",
                rep.lhs, rep.uniform_hit, rep.size_tail, rep.rhs, rep.params.m
            ));
            lines.push(format!("Pr(∃S ⊆ X_i) non-decreasing in i: {}", rep.monotone));
            (json_doc("verify-appendix", &rep)?, rep.pass)
        }
        VerifyKind::Chernoff { n, delta, r, eps } => {
            let rep = verify_chernoff_tail(*n, *delta, *r, *eps)?;
            lines.push(format!(
                "Pr(|X_δ| < m) = {:.9e} ≤ Pr(Bin(n,δ) ≤ nδ/2) = {:.9e} ≤ e^(-nδ/8) = {:.9e}",
                rep.below_m, rep.tail, rep.bound
            ));
            if let Some(c) = &rep.eps_check {
                lines.push(format!(
                    "r = {} vs 16·δ⁻¹·ln(1/ε) = {:.6}: e^(-rδ/8) = {:.6e} ≤ ε² = {:.6e} {}",
                    r,
                    c.r_needed,
                    c.lhs,
                    c.eps_squared,
                    if c.applies { "(applies)" } else { "(not applicable)" }
                ));
            }
            (json_doc("verify-chernoff", &rep)?, rep.pass)
        }
    };
    lines.push(pass_fail(pass).to_string());
    Ok((doc, lines, pass))
}
