//! Human-readable forms of presentations, reports and certificates.

use std::fmt::Write;

use qdp::drinfeld::{MembershipCertificate, Verdict};
use qdp::hopf::Presentation;
use qdp::report::{Discrepancy, HopfReport};

pub fn presentation(p: &Presentation) -> String {
    let mut out = String::new();
    let g = p.generators();
    let _ = writeln!(
        out,
        "{} ({}, generators {}, h-order {}, degree cap {})",
        p.name(),
        p.model(),
        g.join(", "),
        p.h_order(),
        p.degree_cap()
    );
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let rhs = p.show(&p.relation(i, j));
            let lhs = format!("{}*{} = {}*{}", g[j], g[i], g[i], g[j]);
            match rhs.strip_prefix('-') {
                _ if rhs == "0" => {
                    let _ = writeln!(out, "  {lhs}");
                }
                Some(rest) => {
                    let _ = writeln!(out, "  {lhs} - {rest}");
                }
                None => {
                    let _ = writeln!(out, "  {lhs} + {rhs}");
                }
            }
        }
    }
    for (i, name) in g.iter().enumerate() {
        let _ = writeln!(out, "  Delta({name}) = {}", p.show_tensor(p.coproduct_of(i)));
    }
    for (i, name) in g.iter().enumerate() {
        let _ = writeln!(out, "  eps({name}) = {}", p.counit_of(i));
    }
    for (i, name) in g.iter().enumerate() {
        let _ = writeln!(out, "  S({name}) = {}", p.show(p.antipode_of(i)));
    }
    out
}

fn discrepancy(d: &Discrepancy) -> String {
    match d {
        Discrepancy::Text(t) => t.clone(),
        other => serde_json::to_string(other).unwrap_or_default(),
    }
}

pub fn report(rep: &HopfReport) -> String {
    let mut out = String::new();
    let failed: Vec<_> = rep.failures().collect();
    let _ = writeln!(out, "{} of {} checks passed", rep.len() - failed.len(), rep.len());
    for f in failed {
        let _ = write!(out, "  FAIL {} on {}", f.axiom, f.subject);
        if let Some(d) = &f.discrepancy {
            let _ = write!(out, ": {}", discrepancy(d));
        }
        out.push('\n');
    }
    out
}

pub fn certificate(route: &str, c: &MembershipCertificate) -> String {
    let mut out = String::new();
    let verdict = match c.verdict {
        Verdict::MemberUpToTruncation => "member up to truncation".to_string(),
        Verdict::NotMember { witness } => format!("not a member, witness n = {witness}"),
    };
    let _ = writeln!(out, "{route}: {} is {verdict}", c.expression);
    let vals: Vec<String> = c.valuations.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "  valuations for n = 0..{}: {}", c.valuations.len().saturating_sub(1), vals.join(" "));
    let _ = writeln!(out, "  truncation: h-order {}, degree cap {}", c.h_order, c.degree_cap);
    out
}
