//! CPLEX LP-format export.
//!
//! Layout: `Minimize` with the objective row `obj:`, `Subject To` with one
//! named row per constraint, `Bounds` for every continuous variable,
//! `Binaries` listing binary columns, then `End`. Variables are written as
//! `v<id>` and rows as `c<index>` so that names never need escaping; the
//! original names follow each row as a `\` comment.

use std::fmt::Write;

use super::model::{MilpModel, Sense, VarKind};

fn terms(out: &mut String, terms: &[(super::VarId, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0 v0");
        return;
    }
    for &(v, c) in terms {
        let sign = if c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {v}", c.abs());
    }
}

fn bound(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn to_lp_string(model: &MilpModel) -> String {
    let mut out = String::from("Minimize\n obj:");
    terms(&mut out, model.objective());
    if model.objective_offset() != 0.0 {
        let _ = write!(out, " \\ constant {}", model.objective_offset());
    }
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let _ = write!(out, " c{i}:");
        terms(&mut out, &c.terms);
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {} \\ {}", c.rhs, c.name);
    }
    out.push_str("Bounds\n");
    for (i, v) in model.vars().iter().enumerate() {
        if v.kind == VarKind::Binary {
            continue;
        }
        if v.lower == v.upper {
            let _ = writeln!(out, " v{i} = {}", v.lower);
        } else {
            let _ = writeln!(out, " {} <= v{i} <= {}", bound(v.lower), bound(v.upper));
        }
    }
    let bins: Vec<String> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(i, _)| format!("v{i}"))
        .collect();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for chunk in bins.chunks(10) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}
