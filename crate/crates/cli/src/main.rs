//! `cubic`: verification suites, single-object queries, moment experiments and
//! constants for cubic characters over F_q[T].
//!
//! Exit status: 0 success, 1 a check or consistency test failed, 2 invalid
//! configuration or input, 3 operation budget exceeded, 4 I/O failure.

mod polyarg;
mod suites;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cubic_core::characters::{CubicCharacter, OmegaIso};
use cubic_core::gauss::{root_number, StructuralGauss};
use cubic_core::lfunctions::l_polynomial;
use cubic_core::metaplectic::{recurrence_start, rho, GaussSumEngine};
use cubic_core::moments::{
    a_nk_closed_form_one, a_nk_closed_form_three_halves, brute_force_moment, constant_a_nk, constants_kummer_with,
    count_primitive, knk_equals_ank_check, main_term_non_kummer, DEFAULT_TRUNCATION,
};
use cubic_core::{CycNum, Error, FieldSpec, MomentOptions, MomentReport, Poly, QuadraticExtension, Setting};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "cubic", version, about = "Exact experiments with cubic characters over F_q[T]")]
struct Cli {
    /// Worker threads; defaults to CUBIC_THREADS, then to the number of cores.
    #[arg(long, global = true, env = "CUBIC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and print its JSON ledger.
    Verify(VerifyArgs),
    /// Brute-force first moment over a genus-g family.
    Moment(MomentArgs),
    /// Compute a single object.
    Query {
        #[command(subcommand)]
        object: Query,
    },
    /// Euler-product constants of the moment main terms.
    Constants(ConstantsArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: suites::Suite,
    /// Field size; each suite has its own default.
    #[arg(long)]
    q: Option<u32>,
    /// Size parameter (degree, genus or engine degree, per suite).
    #[arg(long)]
    degree: Option<usize>,
    /// Write the ledger here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SettingArg {
    Kummer,
    Nonkummer,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Setting {
        match s {
            SettingArg::Kummer => Setting::Kummer,
            SettingArg::Nonkummer => Setting::NonKummer,
        }
    }
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    g: usize,
    #[arg(long, value_enum)]
    setting: SettingArg,
    /// AFE split A (0 ≤ A ≤ g); defaults to ⌊(g−1)/2⌋.
    #[arg(long)]
    afe_split: Option<usize>,
    #[arg(long)]
    checkpoint_dir: Option<PathBuf>,
    /// Reuse finished blocks from the checkpoint directory.
    #[arg(long, requires = "checkpoint_dir")]
    resume: bool,
    /// Refuse work projected beyond this many character evaluations.
    #[arg(long)]
    budget_ops: Option<u128>,
    /// Euler-product truncation degree for the main term.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    /// Run under the conjugate choice of cube roots of unity.
    #[arg(long)]
    conjugate_omega: bool,
    /// Write the report JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append the CSV row here (header written when the file is new).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Query {
    /// L-polynomial of χ_{F1}χ̄_{F2} (Kummer) or of χ_F (non-Kummer, F over F_{q²}).
    Lpoly {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        f1: Option<String>,
        #[arg(long)]
        f2: Option<String>,
        #[arg(long)]
        f: Option<String>,
    },
    /// Shifted Gauss sum G_q(V, f).
    GaussSum {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        v: String,
        #[arg(long)]
        f: String,
    },
    /// Residue ρ(f, i) of the Gauss-sum series.
    Rho {
        f: String,
        i: u8,
        #[arg(long)]
        q: u32,
    },
    /// Exact and asymptotic counts of primitive characters of conductor degree d.
    CharacterCount {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long)]
    q: u32,
    /// Genera for the main terms; defaults to 2..=5.
    #[arg(long, value_delimiter = ',')]
    g: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
}

/// A verification that ran and failed, as opposed to a runtime error.
#[derive(Debug)]
struct ChecksFailed;

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("one or more checks failed")
    }
}

impl std::error::Error for ChecksFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ChecksFailed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidField(_) | Error::Parse(_) | Error::Domain(_)) => 2,
        Some(Error::Budget { .. }) => 3,
        Some(Error::Io(_)) => 4,
        Some(Error::Consistency(_)) => 1,
        None if err.downcast_ref::<std::io::Error>().is_some() => 4,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<ChecksFailed>().is_none() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Verify(a) => verify(a),
        Command::Moment(a) => moment(a, cli.threads),
        Command::Query { object } => query(object),
        Command::Constants(a) => constants(a),
    }
}

/// Pretty JSON with a trailing newline, to a file or stdout.
fn emit(value: &impl serde::Serialize, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> anyhow::Result<()> {
    let q = a.q.unwrap_or_else(|| a.suite.default_q());
    let ledger = suites::run(a.suite, q, a.degree)?;
    emit(&ledger, a.out.as_deref())?;
    if ledger.passed {
        Ok(())
    } else {
        Err(ChecksFailed.into())
    }
}

fn setting_matches(field: &FieldSpec, setting: Setting) -> cubic_core::Result<()> {
    let ok = match setting {
        Setting::Kummer => field.is_kummer(),
        Setting::NonKummer => !field.is_kummer(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidField(format!("q = {} does not belong to the {setting} setting", field.q())))
    }
}

fn moment(a: MomentArgs, threads: Option<usize>) -> anyhow::Result<()> {
    let field = suites::field_for(a.q)?;
    let setting: Setting = a.setting.into();
    setting_matches(&field, setting)?;
    let opts = MomentOptions {
        afe_split: a.afe_split,
        threads,
        checkpoint_dir: a.checkpoint_dir.clone(),
        resume: a.resume,
        budget_ops: a.budget_ops,
        truncation: a.truncation,
        conjugate_omega: a.conjugate_omega,
        ..MomentOptions::default()
    };
    let report = match brute_force_moment(&field, a.g, setting, &opts) {
        Err(e @ Error::Budget { .. }) if a.checkpoint_dir.is_some() => {
            return Err(anyhow::Error::new(e).context("finished blocks are saved in the checkpoint directory; rerun with --resume and a larger budget"));
        }
        r => r?,
    };
    // runtime details vary between runs and stay out of the JSON document
    let mut doc = serde_json::to_value(&report)?;
    if let Value::Object(m) = &mut doc {
        m.remove("runtime");
    }
    emit(&doc, a.out.as_deref())?;
    let rt = &report.runtime;
    eprintln!("{} threads, {:.2} s, {} ops, {} resumed blocks", rt.threads, rt.seconds, rt.ops, rt.resumed_blocks);
    match &a.csv {
        Some(p) => append_csv(p, &report)?,
        None => eprintln!("{}\n{}", MomentReport::csv_header(), report.csv_row()),
    }
    Ok(())
}

fn append_csv(path: &Path, report: &MomentReport) -> anyhow::Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path).with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(file, "{}", MomentReport::csv_header())?;
    }
    writeln!(file, "{}", report.csv_row())?;
    Ok(())
}

fn cyc_json(x: &CycNum) -> Value {
    let z = x.to_complex();
    json!({ "value": x.serialize(), "complex": { "re": z.re, "im": z.im } })
}

fn query(object: Query) -> anyhow::Result<()> {
    let doc = match object {
        Query::Lpoly { q, f1, f2, f } => {
            let field = suites::field_for(q)?;
            let chi = if field.is_kummer() {
                if f.is_some() {
                    return Err(Error::Parse("--f is for non-Kummer fields; use --f1/--f2".into()).into());
                }
                let parse = |s: Option<String>| s.map_or_else(|| Ok(Poly::one(&field)), |s| polyarg::parse_poly(&field, &s));
                CubicCharacter::kummer(&OmegaIso::canonical(&field)?, parse(f1)?, parse(f2)?)?
            } else {
                if f1.is_some() || f2.is_some() {
                    return Err(Error::Parse("--f1/--f2 are for Kummer fields; use --f".into()).into());
                }
                let ext = QuadraticExtension::new(&field)?;
                let f = f.ok_or_else(|| Error::Parse("--f is required for non-Kummer fields".into()))?;
                let f = polyarg::parse_poly(&ext.ext, &f)?;
                CubicCharacter::non_kummer(&ext, &OmegaIso::canonical(&ext.ext)?, f)?
            };
            let l = l_polynomial(&chi);
            let w = root_number(&chi)?;
            let sum = l.coeffs.iter().fold(CycNum::zero(l.coeffs[0].order()), |acc, c| acc.add(c));
            let mut doc = serde_json::to_value(l.record(&w))?;
            doc["coefficient_sum"] = Value::String(sum.serialize());
            doc["central_value_complex"] = json!(l.central_value().value.to_complex());
            doc
        }
        Query::GaussSum { q, v, f } => {
            let field = suites::field_for(q)?;
            let iso = OmegaIso::canonical(&field)?;
            if !field.is_kummer() {
                return Err(Error::InvalidField(format!("G_q(V, f) needs q ≡ 1 mod 3, got q = {q}")).into());
            }
            let (v, f) = (polyarg::parse_poly(&field, &v)?, polyarg::parse_poly(&field, &f)?);
            let g = StructuralGauss::new(&iso, &f)?.eval(&v)?;
            let mut doc = cyc_json(&g);
            doc["V"] = Value::String(v.to_literal());
            doc["f"] = Value::String(f.to_literal());
            doc
        }
        Query::Rho { f, i, q } => {
            let field = suites::field_for(q)?;
            let iso = OmegaIso::canonical(&field)?;
            let f = polyarg::parse_poly(&field, &f)?;
            let mut primes: Vec<Poly> = cubic_core::ffpoly::factor_monic(&f).into_iter().map(|(p, _)| p).collect();
            if primes.is_empty() {
                primes.push(Poly::t(&field));
            }
            let need = (i % 3) as usize + 3 * recurrence_start(&f, i % 3);
            let engine = GaussSumEngine::new(&iso, &primes, need)?;
            let r = rho(&engine, &f, i)?;
            let mut doc = cyc_json(&r.value);
            doc["f"] = Value::String(f.to_literal());
            doc["i"] = json!(r.i);
            doc
        }
        Query::CharacterCount { q, degree } => {
            let field = suites::field_for(q)?;
            let setting = if field.is_kummer() { Setting::Kummer } else { Setting::NonKummer };
            let c = count_primitive(&field, setting, degree)?;
            let mut doc = serde_json::to_value(&c)?;
            doc["ratio"] = json!(c.ratio());
            doc
        }
    };
    emit(&doc, None)
}

fn constants(a: ConstantsArgs) -> anyhow::Result<()> {
    let field = suites::field_for(a.q)?;
    let q = a.q as u64;
    let genera = if a.g.is_empty() { (2..=5).collect() } else { a.g };
    let doc = if field.is_kummer() {
        let ks = genera
            .iter()
            .map(|&g| {
                let k = constants_kummer_with(q, g, a.truncation)?;
                Ok(json!({ "constants": k, "main_term": k.main_term() }))
            })
            .collect::<cubic_core::Result<Vec<_>>>()?;
        json!({ "setting": Setting::Kummer, "q": q, "truncation": a.truncation, "kummer": ks })
    } else {
        let qf = q as f64;
        let mains = genera
            .iter()
            .map(|&g| Ok(json!({ "g": g, "main_term": main_term_non_kummer(q, g)? })))
            .collect::<cubic_core::Result<Vec<_>>>()?;
        json!({
            "setting": Setting::NonKummer,
            "q": q,
            "truncation": a.truncation,
            "a_nk_three_halves": constant_a_nk(q, 1.0 / (qf * qf), qf.powf(-1.5))?,
            "a_nk_three_halves_closed_form": a_nk_closed_form_three_halves(q, a.truncation),
            "a_nk_one": constant_a_nk(q, 1.0 / (qf * qf), 1.0 / qf)?,
            "a_nk_one_closed_form": a_nk_closed_form_one(q, a.truncation),
            "knk": knk_equals_ank_check(q)?,
            "main_terms": mains,
        })
    };
    emit(&doc, None)
}
