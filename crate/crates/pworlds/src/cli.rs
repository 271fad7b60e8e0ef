//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use pworlds_core::defaults::{self, AnomalyReport, InequalityChain};
use pworlds_core::entailment::{compile, CompileOptions, Consistency, KnowledgeBase};
use pworlds_core::quantifier::{
    self, certain_universal_facts, check_quantifier_monotonicity, HerbrandDomain, Quantifier,
};
use pworlds_core::rational::{self, Rational};
use pworlds_core::syntax::{parse_sentence, Formula, Signature};
use pworlds_core::worlds::DEFAULT_MAX_ATOMS;
use pworlds_core::{Distribution, Error as CoreError, Relation, WorldSpace};

use crate::distfile::{parse_dist, DistFile};
use crate::error::{exit, CliError};
use crate::kbfile::parse_kb;

#[derive(Debug, Parser)]
#[command(
    name = "pworlds",
    version,
    about = "Exact probabilistic logic over possible worlds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability of a sentence under an explicit distribution.
    Eval {
        /// Knowledge base supplying the signature (optional if the
        /// distribution file declares one).
        #[arg(long)]
        kb: Option<PathBuf>,
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ATOMS)]
        max_atoms: usize,
    },
    /// Tightest probability interval of a query entailed by a knowledge base.
    Bounds {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        explain: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Whether any distribution satisfies a knowledge base.
    Consistent {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        explain: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Penguin-default sweep: per-term maximum, chain bound and existential
    /// maximum for each epsilon and number of terms.
    Anomaly {
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',', default_value = "1/100", value_parser = parse_rational)]
        epsilon: Vec<Rational>,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        terms: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        /// Also print the instantiated inequality chain for each epsilon.
        #[arg(long)]
        explain: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_ATOMS)]
        max_atoms: usize,
    },
    /// Quantifier monotonicity and duality of a quantified sentence, under a
    /// given distribution or at the knowledge base's bound witnesses.
    Gaifman {
        #[arg(long)]
        kb: Option<PathBuf>,
        #[arg(long, conflicts_with = "uniform")]
        dist: Option<PathBuf>,
        /// Use the uniform distribution over the knowledge base's worlds.
        #[arg(long)]
        uniform: bool,
        #[arg(long)]
        query: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_ATOMS)]
    pub max_atoms: usize,
    /// Add `p[b] >= delta` for every conditional assertion `P(a | b)`.
    #[arg(long, value_name = "DELTA", value_parser = parse_rational)]
    pub require_positive_conditions: Option<Rational>,
    /// Override the knowledge base's `epsilon:` line.
    #[arg(long, value_parser = parse_rational)]
    pub epsilon: Option<Rational>,
}

impl EngineArgs {
    fn options(&self) -> CompileOptions {
        CompileOptions {
            max_atoms: self.max_atoms,
            require_positive_conditions: self.require_positive_conditions.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

/// Runs a parsed command, writing its report to `out` and notes to `err`.
/// Returns the process exit code for outcomes that are reports rather than
/// errors (an inconsistent knowledge base, a failed check).
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let mut text = String::new();
    let mut notes = String::new();
    let code = match &cli.command {
        Command::Eval {
            kb,
            dist,
            query,
            max_atoms,
        } => eval(&mut text, kb.as_deref(), dist, query, *max_atoms)?,
        Command::Bounds {
            kb,
            query,
            explain,
            engine,
        } => bounds(&mut text, &mut notes, kb, query, *explain, engine)?,
        Command::Consistent {
            kb,
            explain,
            engine,
        } => consistent(&mut text, &mut notes, kb, *explain, engine)?,
        Command::Anomaly {
            epsilon,
            terms,
            format,
            explain,
            max_atoms,
        } => anomaly(&mut text, epsilon, terms, *format, *explain, *max_atoms)?,
        Command::Gaifman {
            kb,
            dist,
            uniform,
            query,
            engine,
        } => gaifman(
            &mut text,
            kb.as_deref(),
            dist.as_deref(),
            *uniform,
            query,
            engine,
        )?,
    };
    err.write_all(notes.as_bytes()).map_err(|e| CliError::Io {
        path: "<stderr>".into(),
        source: e,
    })?;
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    })?;
    Ok(code)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn load_kb(path: &Path, epsilon: Option<&Rational>) -> Result<KnowledgeBase, CliError> {
    let mut kb = parse_kb(&path.display().to_string(), &read(path)?)?;
    if let Some(eps) = epsilon {
        kb.set_epsilon(Some(eps.clone()));
        kb.validate()?;
    }
    Ok(kb)
}

fn load_dist(path: &Path) -> Result<DistFile, CliError> {
    Ok(parse_dist(&path.display().to_string(), &read(path)?)?)
}

fn parse_query(text: &str, sig: &Signature) -> Result<Formula, CliError> {
    parse_sentence(text, sig).map_err(|e| match e {
        CoreError::Syntax { position, message } => {
            CliError::Usage(format!("query, column {}: {message}", position + 1))
        }
        other => CliError::Usage(format!("query: {other}")),
    })
}

/// `4/5 (= 0.8)`, `1/3 (≈ 0.333333)`, or just the integer.
pub fn exact_with_decimal(r: &Rational) -> String {
    if r.is_integer() {
        return rational::format(r);
    }
    let (digits, exact) = rational::to_decimal(r, 6);
    format!(
        "{} ({} {digits})",
        rational::format(r),
        if exact { '=' } else { '≈' }
    )
}

fn domain_line(sig: &Signature) -> String {
    let c = sig.constants();
    if c.is_empty() {
        "domain size: 0".to_string()
    } else {
        format!("domain size: {} ({})", c.len(), c.join(", "))
    }
}

fn has_quantifier(f: &Formula) -> bool {
    !f.is_quantifier_free()
}

fn dump_distribution(out: &mut String, d: &Distribution) {
    let space = d.space();
    for (k, w) in d.support() {
        let world = space.world(k).expect("support index in range");
        let _ = writeln!(
            out,
            "  {}  weight {}",
            space.describe(&world),
            rational::format(w)
        );
    }
}

fn strict_notes(out: &mut String, kb: &KnowledgeBase) {
    for a in kb.assertions().iter().filter(|a| a.relaxed_strict) {
        let _ = writeln!(out, "note: strict inequality compiled as non-strict: {a}");
    }
}

fn eval(
    out: &mut String,
    kb: Option<&Path>,
    dist: &Path,
    query: &str,
    max_atoms: usize,
) -> Result<i32, CliError> {
    let df = load_dist(dist)?;
    let sig = match kb {
        Some(path) => load_kb(path, None)?.signature().clone(),
        None => df.signature().cloned().ok_or_else(|| {
            CliError::Usage(format!(
                "{}: no `predicates:` header; pass --kb to supply the signature",
                dist.display()
            ))
        })?,
    };
    let space = WorldSpace::with_cap(&sig, max_atoms)?;
    let d = df.distribution(&space)?;
    let q = parse_query(query, &sig)?;
    let p = quantifier::sentence_probability(&d, &q)?;
    let _ = writeln!(out, "{}", exact_with_decimal(&p));
    if has_quantifier(&q) {
        let _ = writeln!(out, "{}", domain_line(&sig));
    }
    Ok(exit::OK)
}

fn bounds(
    out: &mut String,
    notes: &mut String,
    kb_path: &Path,
    query: &str,
    explain: bool,
    engine: &EngineArgs,
) -> Result<i32, CliError> {
    let kb = load_kb(kb_path, engine.epsilon.as_ref())?;
    let q = parse_query(query, kb.signature())?;
    let compiled = compile(&kb, &engine.options())?;
    let b = compiled.bounds(&q)?;
    let _ = writeln!(
        out,
        "[{}, {}]",
        rational::format(&b.lo),
        rational::format(&b.hi)
    );
    let _ = writeln!(out, "{}", domain_line(kb.signature()));
    if explain {
        let space = compiled.space();
        let _ = writeln!(out, "query: {q}");
        if has_quantifier(&q) {
            let _ = writeln!(out, "expanded query: {}", b.query);
        }
        let _ = writeln!(
            out,
            "worlds: {} over {} ground atom(s)",
            space.world_count(),
            space.atom_count()
        );
        let _ = writeln!(
            out,
            "constraints: {} (including normalization)",
            compiled.constraints().len()
        );
        if let Some(eps) = kb.epsilon() {
            let _ = writeln!(out, "epsilon: {}", rational::format(eps));
        }
        let _ = writeln!(out, "lower witness (p = {}):", rational::format(&b.lo));
        dump_distribution(out, &b.lo_witness);
        let _ = writeln!(out, "upper witness (p = {}):", rational::format(&b.hi));
        dump_distribution(out, &b.hi_witness);
        let facts = certain_universal_facts(&kb);
        if !facts.is_empty() {
            let _ = writeln!(out, "derived facts:");
            for fact in facts {
                let ok = fact.holds(&b.lo_witness)? && fact.holds(&b.hi_witness)?;
                let _ = writeln!(
                    out,
                    "  {fact}  [{}]",
                    if ok {
                        "holds at both witnesses"
                    } else {
                        "FAILS"
                    }
                );
            }
        }
    }
    strict_notes(notes, &kb);
    Ok(exit::OK)
}

fn consistent(
    out: &mut String,
    notes: &mut String,
    kb_path: &Path,
    explain: bool,
    engine: &EngineArgs,
) -> Result<i32, CliError> {
    let kb = load_kb(kb_path, engine.epsilon.as_ref())?;
    let compiled = compile(&kb, &engine.options())?;
    let code = match compiled.consistency()? {
        Consistency::Consistent { witness } => {
            let _ = writeln!(out, "CONSISTENT");
            if explain {
                let _ = writeln!(out, "witness:");
                dump_distribution(out, &witness);
            }
            exit::OK
        }
        Consistency::Inconsistent { clashing, note } => {
            let _ = writeln!(out, "INCONSISTENT");
            let _ = writeln!(out, "{note}");
            if !clashing.is_empty() {
                let _ = writeln!(out, "clashing assertions:");
                for i in clashing {
                    let _ = writeln!(out, "  {}", kb.assertions()[i]);
                }
            }
            exit::INCONSISTENT
        }
    };
    strict_notes(notes, &kb);
    Ok(code)
}

const CSV_HEADER: &str =
    "epsilon,n,per_term_max,chain_bound,existential_max,union_bound,union_bound_capped";

fn anomaly(
    out: &mut String,
    epsilons: &[Rational],
    terms: &[usize],
    format: Format,
    explain: bool,
    max_atoms: usize,
) -> Result<i32, CliError> {
    if epsilons.is_empty() || terms.is_empty() {
        return Err(CliError::Usage(
            "--epsilon and --terms need at least one value".into(),
        ));
    }
    for &n in terms {
        if n == 0 {
            return Err(CliError::Usage("--terms values must be positive".into()));
        }
    }
    let options = CompileOptions {
        max_atoms,
        require_positive_conditions: None,
    };
    let jobs: Vec<(Rational, usize)> = epsilons
        .iter()
        .flat_map(|e| terms.iter().map(move |&n| (e.clone(), n)))
        .collect();
    let reports: Vec<Result<AnomalyReport, CoreError>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(e, n)| {
                let options = &options;
                s.spawn(move || defaults::anomaly_report(e, *n, options))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("anomaly worker panicked"))
            .collect()
    });
    let reports = reports.into_iter().collect::<Result<Vec<_>, _>>()?;

    let cells = |r: &AnomalyReport| -> [String; 7] {
        [
            rational::format(&r.epsilon),
            r.n_terms.to_string(),
            rational::format(&r.per_term_max),
            rational::format(&r.chain_bound),
            rational::format(&r.existential_max),
            rational::format(&r.union_bound),
            rational::format(&r.capped_union_bound),
        ]
    };
    match format {
        Format::Csv => {
            let _ = writeln!(out, "{CSV_HEADER}");
            for r in &reports {
                let _ = writeln!(out, "{}", cells(r).join(","));
            }
        }
        Format::Human => {
            let header = [
                "epsilon",
                "n",
                "per-term max",
                "chain bound",
                "existential max",
                "union bound",
                "capped union bound",
                "check",
            ];
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let mut row = cells(r).to_vec();
                    row.push(if r.consistent() { "ok" } else { "FAIL" }.to_string());
                    row
                })
                .collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|c| {
                    rows.iter()
                        .map(|r| r[c].chars().count())
                        .chain([header[c].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cols: Vec<&str>| -> String {
                let padded: Vec<String> = cols
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:<w$}", w = *w))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(header.to_vec()));
            for row in &rows {
                let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
            }
        }
    }

    let mut failed = reports.iter().any(|r| !r.consistent());
    if explain {
        for eps in epsilons {
            let chain = defaults::inequality_chain(eps, &options)?;
            write_chain(out, &chain);
            failed |= !chain.verified();
        }
    }
    Ok(if failed { exit::INVARIANT } else { exit::OK })
}

fn relation_symbol(r: Option<Relation>) -> &'static str {
    match r {
        None => "",
        Some(Relation::Le) => "<=",
        Some(Relation::Eq) => "=",
        Some(Relation::Ge) => ">=",
    }
}

fn write_chain(out: &mut String, chain: &InequalityChain) {
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "inequality chain at epsilon = {} (witness maximizing p[Penguin(t1)], e = epsilon):",
        rational::format(&chain.epsilon)
    );
    let width = chain
        .lines
        .iter()
        .map(|l| l.expression.len())
        .max()
        .unwrap_or(0);
    for l in &chain.lines {
        let _ = writeln!(
            out,
            "  {:>2} {:<width$}  = {:<10}  {}",
            relation_symbol(l.relation),
            l.expression,
            rational::format(&l.value),
            if l.holds { "ok" } else { "FAIL" },
        );
    }
    let _ = writeln!(
        out,
        "  p[Penguin(t1)] = {} <= 1/(2 - 2e) = {}  {}",
        rational::format(&chain.penguin),
        rational::format(&chain.implied_bound),
        if chain.penguin <= chain.implied_bound {
            "ok"
        } else {
            "FAIL"
        },
    );
}

fn gaifman(
    out: &mut String,
    kb: Option<&Path>,
    dist: Option<&Path>,
    uniform: bool,
    query: &str,
    engine: &EngineArgs,
) -> Result<i32, CliError> {
    let kb = kb
        .map(|p| load_kb(p, engine.epsilon.as_ref()))
        .transpose()?;
    let df = dist.map(load_dist).transpose()?;
    let sig = match (&kb, &df) {
        (Some(kb), _) => kb.signature().clone(),
        (None, Some(df)) => df.signature().cloned().ok_or_else(|| {
            CliError::Usage("the distribution file has no `predicates:` header; pass --kb".into())
        })?,
        (None, None) => {
            return Err(CliError::Usage(
                "gaifman needs --kb, --dist, or both".into(),
            ))
        }
    };
    let q = parse_query(query, &sig)?;
    if !matches!(q, Formula::Exists(..) | Formula::ForAll(..)) {
        return Err(CliError::Usage(format!(
            "query `{q}` must start with a quantifier"
        )));
    }
    let dom = HerbrandDomain::of(&sig)?;
    let space = WorldSpace::with_cap(&sig, engine.max_atoms)?;

    let mut cases: Vec<(Option<&str>, Distribution)> = Vec::new();
    if let Some(df) = &df {
        cases.push((None, df.distribution(&space)?));
    } else if uniform {
        cases.push((None, Distribution::uniform(&space)));
    } else {
        let kb = kb.as_ref().expect("checked above");
        let b = compile(kb, &engine.options())?.bounds(&q)?;
        cases.push((Some("lower-bound witness"), b.lo_witness));
        cases.push((Some("upper-bound witness"), b.hi_witness));
    }

    let mut all_passed = true;
    for (i, (label, d)) in cases.iter().enumerate() {
        let report = check_quantifier_monotonicity(d, &q, &dom)?;
        all_passed &= report.passed();
        if i > 0 {
            let _ = writeln!(out);
        }
        match label {
            Some(l) => {
                let _ = writeln!(
                    out,
                    "{} at the {l}",
                    if report.passed() { "PASS" } else { "FAIL" }
                );
            }
            None => {
                let _ = writeln!(out, "{}", if report.passed() { "PASS" } else { "FAIL" });
            }
        }
        let (var, body) = match &q {
            Formula::Exists(v, b) | Formula::ForAll(v, b) => (v, b.as_ref()),
            _ => unreachable!("checked above"),
        };
        let pq = rational::format(&report.quantified);
        let _ = writeln!(out, "p[{q}] = {pq}");
        let cmp = match report.quantifier {
            Quantifier::Exists => "<=",
            Quantifier::ForAll => ">=",
        };
        for (t, p) in &report.instances {
            let instance = body.substitute(var, t);
            let ok = match report.quantifier {
                Quantifier::Exists => p <= &report.quantified,
                Quantifier::ForAll => p >= &report.quantified,
            };
            let _ = writeln!(
                out,
                "  p[{instance}] = {} {cmp} {pq}  {}",
                rational::format(p),
                if ok { "ok" } else { "FAIL" }
            );
        }
        let dual = match report.quantifier {
            Quantifier::Exists => Formula::forall(var.clone(), Formula::not(body.clone())),
            Quantifier::ForAll => Formula::exists(var.clone(), Formula::not(body.clone())),
        };
        let _ = writeln!(
            out,
            "1 - p[{dual}] = {}  {}",
            rational::format(&report.dual_complement),
            if report.duality { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(out, "{}", domain_line(&sig));
    Ok(if all_passed {
        exit::OK
    } else {
        exit::INVARIANT
    })
}
