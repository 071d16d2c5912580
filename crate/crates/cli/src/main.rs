//! `ncpres`: batch front-end for presentation certificates and bispectral
//! triple checks.
//!
//! Exit codes: 0 success, 1 verification failure, 2 spec or parse error,
//! 3 resource ceiling exceeded.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncpres_core::bispectral::{builtin_triple, Triple, TripleReport, BUILTIN_TRIPLES};
use ncpres_core::presentations::{
    certify, coverage_check, elimination_identities, evaluate, ideal_generators,
    CertifyOptions, PresentationSpec, ResourceError, TruncatedIdeal, DEFAULT_CEILING,
};
use ncpres_core::{FreePolynomial, VarContext};

use report::Table;

#[derive(Parser)]
#[command(name = "ncpres", version, about = "Exact checks of algebra presentations and bispectral triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximum number of enumerated ideal products (or words).
    #[arg(long, env = "NCPRES_CEILING", default_value_t = DEFAULT_CEILING,
          value_parser = parse_ceiling)]
    ceiling: usize,
}

fn parse_ceiling(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("ceiling must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check relations, certify quotient dimensions and test coverage.
    Verify {
        /// thm1, thm2, thm3 or file:PATH
        spec: String,
        /// Word-length bound L.
        #[arg(long)]
        len: Option<usize>,
        /// x-degree bound D for the coverage test.
        #[arg(long)]
        deg: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Print the per-length dimension table.
    Dims {
        spec: String,
        #[arg(long)]
        len: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate a free polynomial at the generator images.
    Eval {
        spec: String,
        expr: String,
        /// Names for the expression's variables, matched by position.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        #[command(flatten)]
        output: Output,
    },
    /// Test membership in the ideal truncated at length L.
    Member {
        spec: String,
        expr: String,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        #[command(flatten)]
        output: Output,
    },
    /// Verify a built-in bispectral triple (or `all`, or file:PATH).
    Triples {
        name: String,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Input(String),
    Resource(String),
}

impl From<ResourceError> for Failure {
    fn from(e: ResourceError) -> Failure {
        Failure::Resource(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn load_spec(selector: &str) -> Result<PresentationSpec, Failure> {
    let loaded = match selector.strip_prefix("file:") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))?;
            PresentationSpec::from_json(&text)
        }
        None => PresentationSpec::builtin(selector),
    };
    loaded.map_err(|e| Failure::Input(e.to_string()))
}

fn default_len(spec: &PresentationSpec) -> usize {
    if spec.name == "thm3" || spec.n_vars() >= 4 {
        6
    } else {
        8
    }
}

fn parse_expr(spec: &PresentationSpec, expr: &str, vars: &Option<Vec<String>>) -> Result<FreePolynomial, Failure> {
    let Some(names) = vars else {
        return spec.parse(expr).map_err(|e| Failure::Input(e.to_string()));
    };
    if names.len() != spec.n_vars() {
        return Err(Failure::Input(format!(
            "--vars names {} variables, the spec has {}",
            names.len(),
            spec.n_vars()
        )));
    }
    let ctx = VarContext::new(names.iter().cloned()).map_err(|e| Failure::Input(e.to_string()))?;
    let p = FreePolynomial::parse(&ctx, expr).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(FreePolynomial::from_terms(
        &spec.ctx,
        p.terms().map(|(w, c)| (w.clone(), c.clone())),
    ))
}

fn emit(output: &Output, value: Value, tables: Vec<Table>) -> Result<(), Failure> {
    let text = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Tsv => report::render_tsv(&tables),
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_verify(selector: &str, len: Option<usize>, deg: Option<usize>, output: &Output) -> Outcome {
    let spec = load_spec(selector)?;
    let len = len.unwrap_or_else(|| default_len(&spec));
    let deg = deg.or_else(|| spec.gamma.as_ref().map(|g| g.free_degree() + 1));
    let opts = CertifyOptions {
        ceiling: output.ceiling,
        ..CertifyOptions::new(len)
    };
    let cert = certify(&spec, opts)?;
    let coverage = match deg {
        Some(d) => coverage_check(&spec, len, d, output.ceiling)?,
        None => None,
    };
    let identities = elimination_identities(&spec);

    let mut notes: Vec<String> = Vec::new();
    if let Some(n) = cert.basis_note {
        notes.push(format!("basis index range: {n}"));
    }
    if let Some(l) = cert.ideal_len {
        if l != len {
            notes.push(format!("ideal truncated at length {l} to close the bounds"));
        }
    }
    if let Some(b) = cert.blocked_at {
        notes.push(format!("ideal at length {b} exceeds the product ceiling; bounds may stay open"));
    }
    for r in &cert.rejected {
        notes.push(format!("rejected candidate relation: {}", r.text));
    }
    for i in identities.iter().filter(|i| i.corrected) {
        notes.push(format!("identity {} checked against a corrected image", i.name));
    }

    let ok = cert.certified() && coverage.as_ref().is_none_or(|c| c.equal());
    let value = json!({
        "command": "verify",
        "spec": selector,
        "params": {"len": len, "deg": deg, "ceiling": output.ceiling, "ideal_len": cert.ideal_len},
        "relations": report::relations_json(&cert.relations),
        "dims": report::dims_json(&cert),
        "coverage": coverage.as_ref().map(report::coverage_json),
        "rejected_relations": cert.rejected.iter().map(|r| json!({
            "text": r.text, "residual": report::literal(&r.residual)
        })).collect::<Vec<_>>(),
        "identities": report::identities_json(&identities),
        "notes": notes,
        "ok": ok,
    });
    let mut tables = vec![report::relations_table("relations", &cert.relations)];
    if !cert.rejected.is_empty() {
        tables.push(report::relations_table("rejected_relations", &cert.rejected));
    }
    tables.push(report::dims_table(&cert));
    if let Some(c) = &coverage {
        tables.push(report::coverage_table(c));
    }
    if !identities.is_empty() {
        tables.push(report::identities_table(&identities));
    }
    emit(output, value, tables)?;
    Ok(ok)
}

fn cmd_dims(selector: &str, len: Option<usize>, output: &Output) -> Outcome {
    let spec = load_spec(selector)?;
    let len = len.unwrap_or_else(|| default_len(&spec));
    let opts = CertifyOptions {
        ceiling: output.ceiling,
        ..CertifyOptions::new(len)
    };
    let cert = certify(&spec, opts)?;
    let value = json!({
        "command": "dims",
        "spec": selector,
        "params": {"len": len, "ceiling": output.ceiling, "ideal_len": cert.ideal_len},
        "relations": report::relations_json(&cert.relations),
        "dims": report::dims_json(&cert),
        "rejected_relations": cert.rejected.iter().map(|r| json!({"text": r.text})).collect::<Vec<_>>(),
    });
    emit(
        output,
        value,
        vec![report::relations_table("relations", &cert.relations), report::dims_table(&cert)],
    )?;
    Ok(cert.relations_vanish())
}

fn cmd_eval(selector: &str, expr: &str, vars: &Option<Vec<String>>, output: &Output) -> Outcome {
    let spec = load_spec(selector)?;
    let p = parse_expr(&spec, expr, vars)?;
    let m = evaluate(&spec, &p).map_err(|e| Failure::Input(e.to_string()))?;
    let rows = m
        .terms()
        .flat_map(|(k, c)| {
            (0..c.rows()).flat_map(move |r| {
                (0..c.cols()).filter_map(move |s| {
                    let v = c.get(r, s);
                    (!num_is_zero(v)).then(|| {
                        vec![
                            k.to_string(),
                            (r + 1).to_string(),
                            (s + 1).to_string(),
                            ncpres_core::freealg::format_scalar(v),
                        ]
                    })
                })
            })
        })
        .collect();
    let table = Table {
        title: "value",
        header: vec!["power", "row", "col", "coeff"],
        rows,
    };
    let value = json!({
        "command": "eval",
        "spec": selector,
        "expr": expr,
        "normalized": p.to_string(),
        "value": report::literal(&m),
        "display": m.to_string(),
    });
    emit(output, value, vec![table])?;
    Ok(true)
}

fn num_is_zero(v: &ncpres_core::Scalar) -> bool {
    *v.numer() == 0.into()
}

fn cmd_member(
    selector: &str,
    expr: &str,
    len: Option<usize>,
    vars: &Option<Vec<String>>,
    output: &Output,
) -> Outcome {
    let spec = load_spec(selector)?;
    let p = parse_expr(&spec, expr, vars)?;
    let len = len.unwrap_or_else(|| default_len(&spec));
    let gens = ideal_generators(&spec);
    let ideal = TruncatedIdeal::build(&gens, spec.n_vars(), len, output.ceiling)?;
    let member = ideal.membership(&p);
    let residual_zero = evaluate(&spec, &p).map(|m| m.is_zero()).unwrap_or(false);
    let value = json!({
        "command": "member",
        "spec": selector,
        "params": {"len": len, "ceiling": output.ceiling},
        "expr": expr,
        "normalized": p.to_string(),
        "member": member,
        "evaluates_to_zero": residual_zero,
    });
    let table = Table {
        title: "member",
        header: vec!["expr", "len", "member", "evaluates_to_zero"],
        rows: vec![vec![
            p.to_string(),
            len.to_string(),
            member.to_string(),
            residual_zero.to_string(),
        ]],
    };
    emit(output, value, vec![table])?;
    Ok(member)
}

fn cmd_triples(name: &str, output: &Output) -> Outcome {
    let triples: Vec<Triple> = if name == "all" {
        BUILTIN_TRIPLES
            .iter()
            .map(|n| builtin_triple(n))
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Input(e.to_string()))?
    } else if let Some(path) = name.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))?;
        vec![Triple::from_json(&text).map_err(|e| Failure::Input(e.to_string()))?]
    } else {
        vec![builtin_triple(name).map_err(|e| Failure::Input(e.to_string()))?]
    };
    let mut results: Vec<(String, TripleReport)> = Vec::new();
    for t in &triples {
        let r = t.verify().map_err(|e| Failure::Input(e.to_string()))?;
        results.push((t.name.clone(), r));
    }
    let ok = results.iter().all(|(_, r)| r.pass());
    let value = json!({
        "command": "triples",
        "spec": name,
        "triples": results.iter().map(|(n, r)| report::triple_json(n, r)).collect::<Vec<_>>(),
        "ok": ok,
    });
    emit(output, value, vec![report::triples_table(&results)])?;
    Ok(ok)
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Verify { spec, len, deg, output } => cmd_verify(spec, *len, *deg, output),
        Command::Dims { spec, len, output } => cmd_dims(spec, *len, output),
        Command::Eval { spec, expr, vars, output } => cmd_eval(spec, expr, vars, output),
        Command::Member { spec, expr, len, vars, output } => cmd_member(spec, expr, *len, vars, output),
        Command::Triples { name, output } => cmd_triples(name, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
