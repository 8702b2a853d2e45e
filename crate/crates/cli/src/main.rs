//! `sclab`: exact compression limits, sample-complexity bounds and
//! uniformity tests from the command line.
//!
//! Exit status: 0 on success, 1 when an audit finds a violated relation, 2 on
//! usage or validation errors.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use sclab_core::bounds::{
    containment_audit, relation_audit, source_intervals, universal_intervals, BoundInterval, Status,
};
use sclab_core::compressors::{build_code, empirical_excess_rate, CodeKind, CodeParams, CodeSpec, Encoded};
use sclab_core::formats::{fmt_sig, format_string, parse_markov, parse_pmf, parse_string};
use sclab_core::oracles::{excess_rate_exact, top_k_mass, ComplexityOracle, OracleConfig, Variant};
use sclab_core::pmf::distance_suite;
use sclab_core::sources::{markov_divergence_rate, markov_pair_divergence, symmetric_spectrum_divergence};
use sclab_core::universal::{
    amplified_uniformity_test, collision_moments, collision_statistic, empirical_operating_point,
    paired_perturbation, uniformity_test, OperatingPoint, TestOutcome,
};
use sclab_core::{Execution, MarkovSource, MemorylessSource, Pmf, Source};

use report::{at, emit, opt, opt_n, CliError, Format, Report, Table};

#[derive(Parser)]
#[command(name = "sclab", version, about = "Exact limits and sample complexity of lossless compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Output format; each command has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Memoryless source: JSON {"p": [...]} or whitespace-separated probabilities.
    #[arg(long, conflicts_with = "markov")]
    pmf: Option<PathBuf>,
    /// Markov source: JSON {"mu": [...], "P": [[...], ...]}.
    #[arg(long)]
    markov: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Divergences and distances of a pmf to the uniform law.
    Div {
        #[arg(long)]
        pmf: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Divergence rate to the uniform chain, Perron data, and the n-letter divergence.
    Markov {
        #[arg(long)]
        markov: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Exact sample complexity by scanning blocklengths.
    Sc {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        variant: String,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Closed-form bound intervals for a source, or for the universal family with --m and --delta.
    Bounds {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Build, inspect and run block codes.
    Code {
        #[arg(value_enum)]
        action: CodeAction,
        /// optimal, fixed or prefix.
        kind: String,
        /// Symbol string for encode, bit string for decode.
        input: Option<String>,
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: usize,
        /// Codebook size of a fixed-length code.
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Collision-based uniformity testing.
    Universal {
        #[arg(value_enum)]
        action: UniversalAction,
        /// Symbol string for `test`.
        input: Option<String>,
        #[arg(long)]
        pmf: Option<PathBuf>,
        /// Alphabet size when no pmf is given.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Check the orderings between sample complexities and the bound intervals.
    Audit {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CodeAction {
    Build,
    Dump,
    Encode,
    Decode,
    Simulate,
}

#[derive(Clone, Copy, ValueEnum)]
enum UniversalAction {
    Test,
    Moments,
    Point,
    Amplified,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))
}

fn load_pmf(path: &Path) -> Result<Pmf, CliError> {
    parse_pmf(&read(path)?).map_err(|e| CliError::new(format!("invalid --pmf {}: {e}", path.display())))
}

fn load_markov(path: &Path) -> Result<MarkovSource, CliError> {
    parse_markov(&read(path)?).map_err(|e| CliError::new(format!("invalid --markov {}: {e}", path.display())))
}

fn load_source(args: &SourceArgs) -> Result<Source, CliError> {
    match (&args.pmf, &args.markov) {
        (Some(p), None) => Ok(Source::Memoryless(MemorylessSource::new(load_pmf(p)?))),
        (None, Some(m)) => Ok(Source::Markov(load_markov(m)?)),
        _ => Err(CliError::new("exactly one of --pmf or --markov is required")),
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::new(format!("missing {flag}")))
}

fn oracle(source: Source) -> ComplexityOracle {
    ComplexityOracle::new(source, OracleConfig::from_env())
}

fn div(pmf: &Path) -> Result<Report, CliError> {
    let p = load_pmf(pmf)?;
    let u = Pmf::uniform(p.m()).map_err(at("--pmf"))?;
    let s = distance_suite(&p, &u).map_err(at("--pmf"))?;
    let mut table = Table::new(vec!["tv", "hellinger_sq", "d_half", "kl", "chi_sq", "entropy", "h_half"]);
    table.push(
        [s.tv, s.hellinger_sq, s.d_half, s.kl, s.chi_sq, s.entropy, s.h_half]
            .into_iter()
            .map(fmt_sig)
            .collect(),
    );
    Ok(Report {
        json: serde_json::to_value(s).expect("serializable"),
        table,
        default: Format::Json,
    })
}

fn markov(path: &Path, n: Option<usize>) -> Result<Report, CliError> {
    let x = load_markov(path)?;
    let u = MarkovSource::uniform(x.m()).map_err(at("--markov"))?;
    let (rate, spectral) = markov_divergence_rate(&x, &u).map_err(at("--markov"))?;
    let mut json = json!({ "rate": rate, "spectral": spectral });
    let mut table = Table::new(vec!["rate", "perron_value", "v_max", "v_min", "w_dot_v", "n", "pair_divergence"]);
    let mut row = vec![
        fmt_sig(rate),
        fmt_sig(spectral.perron_value),
        fmt_sig(spectral.v_max),
        fmt_sig(spectral.v_min),
        fmt_sig(spectral.w_dot_v),
    ];
    if let Some(n) = n {
        let d = markov_pair_divergence(&x, &u, n).map_err(at("--n"))?;
        json["n"] = json!(n);
        json["pair_divergence"] = json!(d);
        if x.is_symmetric() && x.mu().is_uniform() {
            json["spectral_divergence"] = json!(symmetric_spectrum_divergence(&x, n).map_err(at("--n"))?);
        }
        row.extend([n.to_string(), fmt_sig(d)]);
    } else {
        row.extend([String::new(), String::new()]);
    }
    table.push(row);
    Ok(Report {
        json,
        table,
        default: Format::Json,
    })
}

fn sc(source: &SourceArgs, eps: f64, variant: &str, n_max: usize) -> Result<Report, CliError> {
    let variant: Variant = variant.parse().map_err(at("--variant"))?;
    let mut o = oracle(load_source(source)?);
    let r = o.search(variant, eps, n_max).map_err(at("--eps"))?;
    let mut table = Table::new(vec!["variant", "epsilon", "n", "criterion"]);
    for t in &r.trace {
        table.push(vec![variant.to_string(), fmt_sig(eps), t.n.to_string(), fmt_sig(t.criterion)]);
    }
    Ok(Report {
        json: serde_json::to_value(&r).expect("serializable"),
        table,
        default: Format::Csv,
    })
}

fn interval_table(ivs: &[BoundInterval]) -> Table {
    let mut t = Table::new(vec!["id", "target", "lower", "upper", "constant_known", "epsilon", "divergence", "m"]);
    for iv in ivs {
        t.push(vec![
            iv.id.to_string(),
            iv.target.to_string(),
            opt(iv.lower),
            opt(iv.upper),
            iv.constant_known.to_string(),
            fmt_sig(iv.inputs.epsilon),
            fmt_sig(iv.inputs.divergence),
            iv.inputs.m.to_string(),
        ]);
    }
    t
}

fn bounds(source: &SourceArgs, eps: f64, delta: Option<f64>, m: Option<usize>) -> Result<Report, CliError> {
    let ivs = match delta {
        Some(delta) => {
            let m = need(m, "--m")?;
            universal_intervals(m, delta, eps).map_err(at("--delta/--eps/--m"))?
        }
        None => source_intervals(&load_source(source)?, eps).map_err(at("--eps"))?,
    };
    Ok(Report {
        json: serde_json::to_value(&ivs).expect("serializable"),
        table: interval_table(&ivs),
        default: Format::Json,
    })
}

fn word(e: &Encoded) -> (Value, String) {
    match e {
        Encoded::Word(w) => (json!(w), w.clone()),
        Encoded::ErrorFlag => (Value::Null, "ERROR".into()),
    }
}

fn code_params(kind: CodeKind, k: &Option<String>, rate: Option<f64>) -> Result<CodeParams, CliError> {
    Ok(match kind {
        CodeKind::OneToOneOptimal => CodeParams::None,
        CodeKind::FixedLength => {
            let k = need(k.as_ref(), "--k")?;
            CodeParams::Codebook(
                k.parse::<BigUint>()
                    .map_err(|e| CliError::new(format!("invalid --k {k:?}: {e}")))?,
            )
        }
        CodeKind::Prefix => CodeParams::Rate(need(rate, "--rate")?),
    })
}

/// Smallest probability of excess over `nR` bits the given code can attain.
fn exact_excess(src: &Source, code: &CodeSpec, rate: f64) -> Result<f64, CliError> {
    let (star, pre) = excess_rate_exact(src, code.n, rate).map_err(at("--rate"))?;
    Ok(match code.kind {
        CodeKind::OneToOneOptimal => star,
        CodeKind::Prefix => pre,
        CodeKind::FixedLength => {
            if code.index_bits() as f64 > code.n as f64 * rate + 1e-9 {
                1.0
            } else {
                1.0 - top_k_mass(src, code.n, code.short_count()).map_err(at("--k"))?
            }
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn code(
    action: CodeAction,
    kind: &str,
    input: Option<&str>,
    source: &SourceArgs,
    n: usize,
    k: &Option<String>,
    rate: Option<f64>,
    trials: usize,
    seed: u64,
) -> Result<Report, CliError> {
    let kind: CodeKind = kind.parse().map_err(at("code kind"))?;
    let src = load_source(source)?;
    let params = code_params(kind, k, rate)?;
    let c = build_code(&src, n, kind, params).map_err(at("--n/--k/--rate"))?;
    let m = c.m;
    match action {
        CodeAction::Build => {
            let json = json!({
                "kind": kind,
                "n": n,
                "m": m,
                "total": c.total().to_string(),
                "short_count": c.short_count().to_string(),
                "short_len": c.short_len(),
                "index_bits": c.index_bits(),
                "kraft_sum": c.kraft_sum(),
            });
            let mut table =
                Table::new(vec!["kind", "n", "m", "total", "short_count", "short_len", "index_bits", "kraft_sum"]);
            table.push(vec![
                kind.to_string(),
                n.to_string(),
                m.to_string(),
                c.total().to_string(),
                c.short_count().to_string(),
                c.short_len().to_string(),
                c.index_bits().to_string(),
                fmt_sig(c.kraft_sum()),
            ]);
            Ok(Report {
                json,
                table,
                default: Format::Json,
            })
        }
        CodeAction::Dump => {
            let rows = c.table().map_err(at("--n"))?;
            let mut table = Table::new(vec!["string", "rank", "codeword", "length"]);
            let mut json = Vec::with_capacity(rows.len());
            for (x, r, e) in rows {
                let (jw, w) = word(&e);
                let len = e.len().map(|l| l.to_string()).unwrap_or_default();
                json.push(json!({"string": format_string(&x, m), "rank": r.to_string(), "codeword": jw, "length": e.len()}));
                table.push(vec![format_string(&x, m), r.to_string(), w, len]);
            }
            Ok(Report {
                json: Value::Array(json),
                table,
                default: Format::Csv,
            })
        }
        CodeAction::Encode => {
            let x = parse_string(need(input, "INPUT string")?, m).map_err(at("INPUT string"))?;
            let rank = c.rank(&x).map_err(at("INPUT string"))?;
            let e = c.encode(&x).map_err(at("INPUT string"))?;
            let (jw, w) = word(&e);
            let mut table = Table::new(vec!["string", "rank", "codeword", "length"]);
            table.push(vec![
                format_string(&x, m),
                rank.to_string(),
                w,
                e.len().map(|l| l.to_string()).unwrap_or_default(),
            ]);
            Ok(Report {
                json: json!({"string": format_string(&x, m), "rank": rank.to_string(), "codeword": jw, "length": e.len()}),
                table,
                default: Format::Json,
            })
        }
        CodeAction::Decode => {
            let bits = input.unwrap_or("");
            let strings = if kind == CodeKind::Prefix && !bits.is_empty() {
                c.decode_stream(bits).map_err(at("INPUT bits"))?
            } else {
                vec![c.decode(bits).map_err(at("INPUT bits"))?]
            };
            let mut table = Table::new(vec!["string"]);
            let out: Vec<String> = strings.iter().map(|x| format_string(x, m)).collect();
            for s in &out {
                table.push(vec![s.clone()]);
            }
            Ok(Report {
                json: json!({ "strings": out }),
                table,
                default: Format::Json,
            })
        }
        CodeAction::Simulate => {
            let rate = need(rate, "--rate")?;
            let empirical = empirical_excess_rate(&src, &c, rate, trials, seed).map_err(at("--trials"))?;
            let exact = exact_excess(&src, &c, rate)?;
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            let mut table = Table::new(vec!["kind", "n", "rate", "trials", "seed", "empirical", "exact", "sigma"]);
            table.push(vec![
                kind.to_string(),
                n.to_string(),
                fmt_sig(rate),
                trials.to_string(),
                seed.to_string(),
                fmt_sig(empirical),
                fmt_sig(exact),
                fmt_sig(sigma),
            ]);
            Ok(Report {
                json: json!({"kind": kind, "n": n, "rate": rate, "trials": trials, "seed": seed,
                             "empirical": empirical, "exact": exact, "sigma": sigma}),
                table,
                default: Format::Json,
            })
        }
    }
}

fn outcome_report(t: &TestOutcome, extra: Value) -> Report {
    let mut json = serde_json::to_value(t).expect("serializable");
    if let (Value::Object(o), Value::Object(e)) = (&mut json, extra) {
        o.extend(e);
    }
    let decision = json["decision"].as_str().unwrap_or_default().to_string();
    let mut table = Table::new(vec!["decision", "z_value", "threshold", "n_used"]);
    table.push(vec![decision, fmt_sig(t.z_value), fmt_sig(t.threshold), t.n_used.to_string()]);
    Report {
        json,
        table,
        default: Format::Json,
    }
}

#[allow(clippy::too_many_arguments)]
fn universal(
    action: UniversalAction,
    input: Option<&str>,
    pmf: Option<&PathBuf>,
    m: Option<usize>,
    delta: Option<f64>,
    eps: Option<f64>,
    n: Option<usize>,
    trials: usize,
    seed: u64,
) -> Result<Report, CliError> {
    let pmf = pmf.map(|p| load_pmf(p)).transpose()?;
    match action {
        UniversalAction::Test => {
            let m = need(m.or(pmf.as_ref().map(Pmf::m)), "--m")?;
            let x = parse_string(need(input, "INPUT string")?, m).map_err(at("INPUT string"))?;
            let t = uniformity_test(&x, m, need(delta, "--delta")?).map_err(at("--delta"))?;
            let c = collision_statistic(&x, m).map_err(at("INPUT string"))?;
            Ok(outcome_report(&t, json!({"collisions": c.collisions, "m": m})))
        }
        UniversalAction::Moments => {
            let p = need(pmf, "--pmf")?;
            let n = need(n, "--n")?;
            let (mean, var) = collision_moments(&p, n).map_err(at("--n"))?;
            let mut table = Table::new(vec!["n", "mean", "variance_bound"]);
            table.push(vec![n.to_string(), fmt_sig(mean), fmt_sig(var)]);
            Ok(Report {
                json: json!({"n": n, "mean": mean, "variance_bound": var}),
                table,
                default: Format::Json,
            })
        }
        UniversalAction::Point => {
            let delta = need(delta, "--delta")?;
            let p = match pmf {
                Some(p) => p,
                None => paired_perturbation(need(m, "--pmf or --m")?, delta).map_err(at("--m/--delta"))?,
            };
            let op = empirical_operating_point(&p, delta, need(n, "--n")?, trials, seed, Execution::default())
                .map_err(at("--n/--trials"))?;
            let mut table = Table::new(OperatingPoint::CSV_HEADER.to_vec());
            table.push(op.csv_record(fmt_sig).to_vec());
            Ok(Report {
                json: serde_json::to_value(&op).expect("serializable"),
                table,
                default: Format::Csv,
            })
        }
        UniversalAction::Amplified => {
            let delta = need(delta, "--delta")?;
            let p = match pmf {
                Some(p) => p,
                None => Pmf::uniform(need(m, "--pmf or --m")?).map_err(at("--m"))?,
            };
            let sampler = Source::Memoryless(MemorylessSource::new(p));
            let t = amplified_uniformity_test(&sampler, delta, need(eps, "--eps")?, seed, Execution::default())
                .map_err(at("--delta/--eps"))?;
            Ok(outcome_report(&t, json!({"seed": seed})))
        }
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Vacuous => "vacuous",
        Status::Inconclusive => "inconclusive",
    }
}

fn audit(source: &SourceArgs, eps: f64, n_max: usize) -> Result<(Report, bool), CliError> {
    let mut o = oracle(load_source(source)?);
    let rel = relation_audit(&mut o, eps, n_max).map_err(at("--eps"))?;
    let containment = match containment_audit(&mut o, eps, n_max) {
        Ok(c) => c,
        // A source at zero divergence has no intervals to check.
        Err(sclab_core::Error::DegenerateDivergence) => Vec::new(),
        Err(e) => return Err(at("--eps")(e)),
    };
    let mut table = Table::new(vec!["suite", "check", "lhs", "rhs", "status"]);
    for c in &rel.checks {
        table.push(vec![
            "relation".into(),
            c.relation.clone(),
            opt_n(c.lhs),
            opt_n(c.rhs),
            status_name(c.status).into(),
        ]);
    }
    for c in &containment {
        let iv = &c.interval;
        table.push(vec![
            "containment".into(),
            format!("{} {} in [{}, {}]", iv.id, iv.target, opt(iv.lower), opt(iv.upper)),
            opt_n(c.value),
            String::new(),
            status_name(c.status).into(),
        ]);
    }
    let passed = rel.passed() && containment.iter().all(|c| c.status.ok());
    let json = json!({"passed": passed, "relations": rel, "containment": containment});
    Ok((
        Report {
            json,
            table,
            default: Format::Csv,
        },
        passed,
    ))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (report, output, ok) = match cli.command {
        Command::Div { pmf, output } => (div(&pmf)?, output, true),
        Command::Markov { markov: path, n, output } => (markov(&path, n)?, output, true),
        Command::Sc {
            source,
            eps,
            variant,
            n_max,
            output,
        } => (sc(&source, eps, &variant, n_max)?, output, true),
        Command::Bounds {
            source,
            eps,
            delta,
            m,
            output,
        } => (bounds(&source, eps, delta, m)?, output, true),
        Command::Code {
            action,
            kind,
            input,
            source,
            n,
            k,
            rate,
            trials,
            seed,
            output,
        } => (
            code(action, &kind, input.as_deref(), &source, n, &k, rate, trials, seed)?,
            output,
            true,
        ),
        Command::Universal {
            action,
            input,
            pmf,
            m,
            delta,
            eps,
            n,
            trials,
            seed,
            output,
        } => (
            universal(action, input.as_deref(), pmf.as_ref(), m, delta, eps, n, trials, seed)?,
            output,
            true,
        ),
        Command::Audit {
            source,
            eps,
            n_max,
            output,
        } => {
            let (r, ok) = audit(&source, eps, n_max)?;
            (r, output, ok)
        }
    };
    emit(report, output.format, output.out.as_ref())?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
