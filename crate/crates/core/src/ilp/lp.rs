//! LP text format (CPLEX dialect) writer and a parser for the subset it emits.
//!
//! The `Bounds` section lists every column, in column order, so a re-parse
//! restores the exact column layout. Row tags are recovered from row names.

use std::fmt::Write as _;

use thiserror::Error;

use super::{IlpModel, RowTag, Sense, VarKind};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("LP parse error at line {line}: {msg}")]
pub struct LpParseError {
    pub line: usize,
    pub msg: String,
}

pub fn write_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj: 0\nSubject To\n");
    for r in &model.rows {
        write!(out, " {}:", r.name).unwrap();
        if r.coeffs.is_empty() {
            out.push_str(" 0");
        }
        for (k, &(j, a)) in r.coeffs.iter().enumerate() {
            let sign = if a < 0 { "-" } else { "+" };
            let mag = a.unsigned_abs();
            match (k, mag) {
                (0, 1) if a < 0 => write!(out, " -{}", model.columns[j].name),
                (0, 1) => write!(out, " {}", model.columns[j].name),
                (0, _) => write!(out, " {} {}", a, model.columns[j].name),
                (_, 1) => write!(out, " {} {}", sign, model.columns[j].name),
                _ => write!(out, " {} {} {}", sign, mag, model.columns[j].name),
            }
            .unwrap();
        }
        let op = match r.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {} {}", op, r.rhs).unwrap();
    }
    if !model.columns.is_empty() {
        out.push_str("Bounds\n");
        for c in &model.columns {
            writeln!(out, " {} <= {} <= {}", c.lower, c.name, c.upper).unwrap();
        }
    }
    for (kind, header) in [(VarKind::Binary, "Binaries"), (VarKind::Integer, "Generals")] {
        let names: Vec<&str> = model
            .columns
            .iter()
            .filter(|c| c.kind == kind)
            .map(|c| c.name.as_str())
            .collect();
        if !names.is_empty() {
            writeln!(out, "{header}\n {}", names.join(" ")).unwrap();
        }
    }
    out.push_str("End\n");
    out
}

/// Recovers the tag a row name was generated from.
pub(crate) fn tag_from_name(name: &str, row: usize) -> RowTag {
    let num = |s: &str| s.parse::<usize>().ok();
    let parse = || -> Option<RowTag> {
        if let Some(rest) = name.strip_prefix("left_u") {
            return Some(RowTag::LeftPerfect { u: num(rest)? });
        }
        for prefix in ["spread_v", "order_v"] {
            if let Some(rest) = name.strip_prefix(prefix) {
                return Some(RowTag::Spread { v: num(rest)? });
            }
        }
        for prefix in ["load_lo_v", "load_hi_v"] {
            if let Some(rest) = name.strip_prefix(prefix) {
                let (v, c) = rest.split_once("_c")?;
                return Some(RowTag::ColorLoad { v: num(v)?, c: num(c)? });
            }
        }
        if let Some(rest) = name.strip_prefix("cover_w") {
            return Some(RowTag::Cover { w: rest.parse().ok()? });
        }
        if let Some(rest) = name.strip_prefix("capacity_w") {
            return Some(RowTag::Capacity { w: rest.parse().ok()? });
        }
        None
    };
    parse().unwrap_or(RowTag::Other { row })
}

#[derive(PartialEq)]
enum Section {
    Start,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

/// A row as read, before its columns are resolved: line, name, terms,
/// sense and right-hand side.
type PendingRow = (usize, String, Vec<(String, i64)>, Sense, i64);

/// Parses text produced by [`write_lp`]. Columns must all appear in the
/// `Bounds` section.
pub fn parse_lp(text: &str) -> Result<IlpModel, LpParseError> {
    let mut model = IlpModel::default();
    let mut section = Section::Start;
    let mut pending_rows: Vec<PendingRow> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let err = |msg: &str| LpParseError {
            line: ln,
            msg: msg.to_string(),
        };
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let header = match line.to_ascii_lowercase().as_str() {
            "minimize" | "minimum" | "min" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" => Some(Section::Binaries),
            "generals" | "general" => Some(Section::Generals),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(h) = header {
            section = h;
            continue;
        }
        match section {
            Section::Start => return Err(err("text before the objective section")),
            Section::End => return Err(err("text after End")),
            Section::Objective => {}
            Section::Constraints => {
                let (name, body) = line.split_once(':').ok_or_else(|| err("row without a name"))?;
                let toks: Vec<&str> = body.split_whitespace().collect();
                let op_at = toks
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "=" | "=<" | "=>"))
                    .ok_or_else(|| err("row without a comparison"))?;
                let sense = match toks[op_at] {
                    "<=" | "=<" => Sense::Le,
                    ">=" | "=>" => Sense::Ge,
                    _ => Sense::Eq,
                };
                if op_at + 2 != toks.len() {
                    return Err(err("expected a single right-hand side"));
                }
                let rhs: i64 = toks[op_at + 1].parse().map_err(|_| err("bad right-hand side"))?;
                let terms = parse_terms(&toks[..op_at]).map_err(|m| err(&m))?;
                pending_rows.push((ln, name.trim().to_string(), terms, sense, rhs));
            }
            Section::Bounds => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 5 || toks[1] != "<=" || toks[3] != "<=" {
                    return Err(err("expected `lower <= name <= upper`"));
                }
                let lower = toks[0].parse().map_err(|_| err("bad lower bound"))?;
                let upper = toks[4].parse().map_err(|_| err("bad upper bound"))?;
                if model.column_index(toks[2]).is_some() {
                    return Err(err("column bounded twice"));
                }
                model.add_column(toks[2].to_string(), lower, upper, VarKind::Integer);
            }
            Section::Binaries | Section::Generals => {
                for name in line.split_whitespace() {
                    let j = model
                        .column_index(name)
                        .ok_or_else(|| err(&format!("unknown column {name}")))?;
                    model.columns[j].kind = if section == Section::Binaries {
                        VarKind::Binary
                    } else {
                        VarKind::Integer
                    };
                }
            }
        }
    }
    if section != Section::End {
        return Err(LpParseError {
            line: text.lines().count(),
            msg: "missing End".into(),
        });
    }
    let index: std::collections::HashMap<String, usize> = model
        .columns
        .iter()
        .enumerate()
        .map(|(j, c)| (c.name.clone(), j))
        .collect();
    for (i, (ln, name, terms, sense, rhs)) in pending_rows.into_iter().enumerate() {
        let mut coeffs = Vec::with_capacity(terms.len());
        for (var, a) in terms {
            let j = *index.get(&var).ok_or_else(|| LpParseError {
                line: ln,
                msg: format!("column {var} has no bounds"),
            })?;
            coeffs.push((j, a));
        }
        let tag = tag_from_name(&name, i);
        model.add_row(name, coeffs, sense, rhs, tag);
    }
    Ok(model)
}

/// Linear expression tokens such as `2 x - y + 3 z` or a lone `0`.
fn parse_terms(toks: &[&str]) -> Result<Vec<(String, i64)>, String> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut coeff: Option<i64> = None;
    for &t in toks {
        match t {
            "+" => sign = 1,
            "-" => sign = -1,
            _ => {
                let (neg, body) = match t.strip_prefix('-') {
                    Some(b) => (true, b),
                    None => (false, t.strip_prefix('+').unwrap_or(t)),
                };
                let s = if neg { -sign } else { sign };
                if let Ok(n) = body.parse::<i64>() {
                    if coeff.is_some() {
                        return Err("two numbers in a row".into());
                    }
                    coeff = Some(s * n);
                    sign = 1;
                } else {
                    let a = coeff.take().unwrap_or(1) * s;
                    out.push((body.to_string(), a));
                    sign = 1;
                }
            }
        }
    }
    match coeff {
        Some(0) | None => Ok(out),
        Some(_) => Err("constant terms are not supported".into()),
    }
}
