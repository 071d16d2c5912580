//! Rendering of command results as JSON or as tab-separated tables. Both
//! forms are built from the same [`Report`] so they always carry the same
//! numbers.

use serde_json::{json, Map, Value};

use ncpres_core::bispectral::{EquationCheck, TripleReport};
use ncpres_core::presentations::{
    CertificationReport, CoverageReport, IdentityCheck, RelationCheck,
};
use ncpres_core::MatrixPolynomial;

pub fn literal(m: &MatrixPolynomial) -> Value {
    serde_json::to_value(m.to_literal()).expect("literal serializes")
}

pub fn relations_json(checks: &[RelationCheck]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                let mut o = Map::new();
                o.insert("text".into(), json!(c.text));
                o.insert("zero".into(), json!(c.zero));
                if !c.zero {
                    o.insert("residual".into(), literal(&c.residual));
                }
                Value::Object(o)
            })
            .collect(),
    )
}

pub fn dims_json(report: &CertificationReport) -> Value {
    Value::Array(
        report
            .dims
            .iter()
            .map(|d| {
                let mut o = Map::new();
                o.insert("len".into(), json!(d.len));
                o.insert("lower".into(), json!(d.lower));
                o.insert("upper".into(), json!(d.upper));
                o.insert("certified".into(), json!(d.certified));
                if let (Some(c), Some(r)) = (d.basis_count, d.basis_rank) {
                    o.insert("basis_count".into(), json!(c));
                    o.insert("basis_rank".into(), json!(r));
                }
                Value::Object(o)
            })
            .collect(),
    )
}

pub fn coverage_json(c: &CoverageReport) -> Value {
    json!({
        "span": c.span,
        "gamma": c.gamma,
        "equal": c.equal(),
        "contained": c.contained,
        "violations": c.violations.iter().map(literal).collect::<Vec<_>>(),
        "witnesses": c.witnesses.iter().map(literal).collect::<Vec<_>>(),
    })
}

pub fn identities_json(ids: &[IdentityCheck]) -> Value {
    Value::Array(
        ids.iter()
            .map(|i| {
                json!({
                    "name": i.name,
                    "expr": i.expr,
                    "holds": i.holds,
                    "corrected": i.corrected,
                })
            })
            .collect(),
    )
}

fn equation_json(e: &EquationCheck) -> Value {
    json!({
        "equation": e.equation,
        "pass": e.pass,
        "residuals": e.residuals.iter().map(|(r, c, f)| json!({
            "row": r, "col": c, "value": f.to_string()
        })).collect::<Vec<_>>(),
    })
}

pub fn triple_json(name: &str, r: &TripleReport) -> Value {
    let mut eqs = vec![equation_json(&r.eigen)];
    if let Some(d) = &r.dual {
        eqs.push(equation_json(d));
    }
    json!({ "name": name, "pass": r.pass(), "equations": eqs })
}

/// A titled table for the TSV rendering.
pub struct Table {
    pub title: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Renders tables as tab-separated blocks, padding every column to its
/// widest cell so the output lines up in a terminal too.
pub fn render_tsv(tables: &[Table]) -> String {
    let mut out = String::new();
    for (k, t) in tables.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&format!("# {}\n", t.title));
        let mut widths: Vec<usize> = t.header.iter().map(|h| h.len()).collect();
        for row in &t.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let line = |cells: Vec<&str>| {
            let last = cells.len() - 1;
            cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == last {
                        c.to_string()
                    } else {
                        format!("{c:<w$}", w = widths[i])
                    }
                })
                .collect::<Vec<_>>()
                .join("\t")
        };
        out.push_str(&line(t.header.clone()));
        out.push('\n');
        for row in &t.rows {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
            out.push('\n');
        }
    }
    out
}

pub fn relations_table(title: &'static str, checks: &[RelationCheck]) -> Table {
    Table {
        title,
        header: vec!["text", "zero", "residual"],
        rows: checks
            .iter()
            .map(|c| {
                vec![
                    c.text.clone(),
                    c.zero.to_string(),
                    if c.zero { String::new() } else { c.residual.to_string() },
                ]
            })
            .collect(),
    }
}

pub fn dims_table(report: &CertificationReport) -> Table {
    let with_basis = report.dims.iter().any(|d| d.basis_count.is_some());
    let mut header = vec!["len", "lower", "upper", "certified"];
    if with_basis {
        header.extend(["basis_count", "basis_rank"]);
    }
    Table {
        title: "dims",
        header,
        rows: report
            .dims
            .iter()
            .map(|d| {
                let mut row = vec![
                    d.len.to_string(),
                    d.lower.to_string(),
                    d.upper.to_string(),
                    d.certified.to_string(),
                ];
                if with_basis {
                    row.push(d.basis_count.map_or(String::new(), |c| c.to_string()));
                    row.push(d.basis_rank.map_or(String::new(), |c| c.to_string()));
                }
                row
            })
            .collect(),
    }
}

pub fn coverage_table(c: &CoverageReport) -> Table {
    Table {
        title: "coverage",
        header: vec!["span", "gamma", "equal"],
        rows: vec![vec![c.span.to_string(), c.gamma.to_string(), c.equal().to_string()]],
    }
}

pub fn identities_table(ids: &[IdentityCheck]) -> Table {
    Table {
        title: "identities",
        header: vec!["name", "holds", "corrected", "expr"],
        rows: ids
            .iter()
            .map(|i| {
                vec![
                    i.name.clone(),
                    i.holds.to_string(),
                    i.corrected.to_string(),
                    i.expr.clone(),
                ]
            })
            .collect(),
    }
}

pub fn triples_table(items: &[(String, TripleReport)]) -> Table {
    let mut rows = Vec::new();
    for (name, r) in items {
        for e in std::iter::once(&r.eigen).chain(r.dual.as_ref()) {
            rows.push(vec![
                name.clone(),
                e.equation.to_string(),
                e.pass.to_string(),
                e.residuals.len().to_string(),
            ]);
        }
    }
    Table {
        title: "triples",
        header: vec!["name", "equation", "pass", "nonzero_residuals"],
        rows,
    }
}
