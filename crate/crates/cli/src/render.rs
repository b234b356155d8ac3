//! Text summaries and JSON fragments.

use serde_json::{json, Value};

use subreg_core::cones::ConeUnion;
use subreg_core::rational::{format_rational, DisplayVec, Rational};
use subreg_core::verify::ModulusTable;
use subreg_core::{CheckKind, Report, VCone, Witness};

pub fn qvec(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

pub fn vec_text(v: &[Rational]) -> String {
    DisplayVec(v).to_string()
}

pub fn vcone_json(c: &VCone) -> Value {
    json!({
        "rays": c.rays().iter().map(|r| qvec(r)).collect::<Vec<_>>(),
        "lines": c.lines().iter().map(|r| qvec(r)).collect::<Vec<_>>(),
    })
}

pub fn vcone_text(c: &VCone) -> String {
    if c.is_trivial() {
        return "{0}".into();
    }
    if c.rays().is_empty() && c.lines().len() == c.dim() {
        return format!("R^{}", c.dim());
    }
    let mut parts = Vec::new();
    if !c.rays().is_empty() {
        let r: Vec<String> = c.rays().iter().map(|r| vec_text(r)).collect();
        parts.push(format!("cone{{{}}}", r.join(", ")));
    }
    if !c.lines().is_empty() {
        let l: Vec<String> = c.lines().iter().map(|r| vec_text(r)).collect();
        parts.push(format!("span{{{}}}", l.join(", ")));
    }
    parts.join(" + ")
}

pub fn union_json(u: &ConeUnion) -> Value {
    Value::Array(u.generators().iter().map(vcone_json).collect())
}

pub fn union_text(u: &ConeUnion) -> String {
    if u.is_empty() {
        return "∅".into();
    }
    let parts: Vec<String> = u.generators().iter().map(vcone_text).collect();
    parts.join("  ∪  ")
}

pub fn witness(w: &Witness, note: &str) -> String {
    let mut s = String::new();
    if let Some(u) = &w.u {
        s += &format!("    u = {}\n", vec_text(u));
    }
    s += &format!("    ζ = {}\n", vec_text(&w.zeta));
    s += &format!("    stratum: {}\n", w.stratum);
    if let Some(l) = &w.l {
        s += &format!("    l = D²P(x̄)(u) = {}\n", vec_text(l));
    }
    if !w.sequence.is_empty() {
        s += &format!("    sequence prefix of {} terms:\n", w.sequence.len());
        for t in &w.sequence {
            s += &format!("      t = {}, u = {}", format_rational(&t.t), vec_text(&t.u));
            if let Some(sk) = &t.s {
                s += &format!(", s = {}", vec_text(sk));
            }
            s += "\n";
        }
    }
    if !note.is_empty() {
        s += &format!("    ({note})\n");
    }
    s
}

pub fn report(r: &Report, requested: &[CheckKind]) -> String {
    let mut s = String::new();
    for v in &r.verdicts {
        let mark = if requested.contains(&v.condition) { "*" } else { " " };
        s += &format!("{mark} {:<11} {:<8} {}", v.condition.name(), v.status.to_string(), v.route.label());
        if !v.also.is_empty() {
            let also: Vec<&str> = v.also.iter().map(|r| r.label()).collect();
            s += &format!(" (also: {})", also.join("; "));
        }
        s += "\n";
        if let Some(reason) = &v.reason {
            s += &format!("    reason: {reason}\n");
        }
        if let Some(w) = &v.witness {
            s += &witness(w, "");
        }
    }
    s += &format!("conclusion: {}\n", r.conclusion.text);
    s
}

pub fn modulus(t: &ModulusTable) -> String {
    let mut s = format!("{:>10}  {:>8}  {:>10}  {:>14}", "radius", "samples", "infeasible", "max ratio");
    let kkt = t.rows.iter().any(|r| r.kkt_max_ratio.is_some());
    if kkt {
        s += &format!("  {:>14}", "max KKT ratio");
    }
    s += "\n";
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6e}"));
    for r in &t.rows {
        s += &format!(
            "{:>10.1e}  {:>8}  {:>10}  {:>14}",
            r.radius,
            r.samples,
            r.infeasible,
            fmt(r.max_ratio)
        );
        if kkt {
            s += &format!("  {:>14}", fmt(r.kkt_max_ratio));
        }
        s += "\n";
    }
    let flag = |b: Option<bool>| match b {
        Some(true) => "bounded",
        Some(false) => "unbounded",
        None => "undetermined (no infeasible samples at the two smallest radii)",
    };
    s += &format!("trend: {}\n", flag(t.bounded));
    if t.kkt_bounded.is_some() {
        s += &format!("KKT residual trend: {}\n", flag(t.kkt_bounded));
    }
    s += "distances are local-search upper estimates, so ratios over-estimate the modulus\n";
    s
}
