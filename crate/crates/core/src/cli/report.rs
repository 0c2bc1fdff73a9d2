use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::abelian::{GroupElement, GroupSpec};
use crate::conetop::{DescribedSet, LimitReport, LimitSet, PointVerdict, Variant};
use crate::fintop::LemmaReport;
use crate::monoid::MonoidSpec;
use crate::profile::{PropertyName, PropertyProfile, Rule, Violation};
use crate::witness::{Certificate, VerificationReport};

pub const SCHEMA: &str = "conetop.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub radius: u32,
    pub prefix: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceEcho {
    pub name: String,
    pub group: GroupSpec,
    pub monoid: MonoidSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopedViolation {
    pub scope: String,
    #[serde(flatten)]
    pub violation: Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub space: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<PropertyName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub element: GroupElement,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandResult {
    Membership {
        results: Vec<MembershipResult>,
    },
    Closure {
        space: Variant,
        input: DescribedSet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symbolic: Option<DescribedSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window_trace: Option<Vec<GroupElement>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        probes: Vec<GroupElement>,
    },
    Limits {
        report: LimitReport,
    },
    WindowCheck {
        checks: Vec<NamedCheck>,
    },
    Enumerate {
        points: usize,
        count: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        topologies: Vec<Vec<Vec<usize>>>,
    },
    Lemmas {
        report: LemmaReport,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceEcho>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<PropertyProfile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<ScopedViolation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<CommandResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<Report>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn new(command: &str, parameters: Parameters) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            parameters,
            instance: None,
            profiles: Vec::new(),
            violations: Vec::new(),
            certificates: Vec::new(),
            result: None,
            reports: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }

    /// True when some attached verification failed, here or in a nested report.
    pub fn has_failed_verification(&self) -> bool {
        self.certificates
            .iter()
            .any(|c| c.verification.as_ref().is_some_and(|v| !v.passed))
            || matches!(&self.result, Some(CommandResult::WindowCheck { checks }) if checks.iter().any(|c| !c.passed))
            || self.reports.iter().any(Report::has_failed_verification)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "== {} (R={}, prefix={})",
            self.command, self.parameters.radius, self.parameters.prefix
        );
        if let Some(i) = &self.instance {
            let _ = writeln!(out, "instance {}: G = {}, S = {}", i.name, i.group, i.monoid);
        }
        for d in &self.diagnostics {
            let _ = writeln!(out, "error: {d}");
        }
        for p in &self.profiles {
            let _ = writeln!(out, "[{}]", p.variant);
            for (name, v) in &p.verdicts {
                let mark = if v.holds { "yes" } else { "no " };
                let _ = write!(out, "  {name:<26} {mark}  ({})", v.rule);
                if let Some(c) = &v.certificate {
                    let _ = write!(out, "  {c}");
                }
                out.push('\n');
            }
            for a in &p.annotations {
                let _ = writeln!(out, "  note: {} ({})", a.note, a.rule);
            }
        }
        for v in &self.violations {
            let _ = writeln!(out, "VIOLATION [{}] {}: {}", v.scope, v.violation.rule, v.violation.detail);
        }
        for c in &self.certificates {
            let _ = write!(out, "[{}]", c.space);
            if let Some(p) = c.property {
                let _ = write!(out, " {p}");
            }
            if let Some(h) = c.holds {
                let _ = write!(out, " holds={h}");
            }
            if let Some(r) = c.rule {
                let _ = write!(out, " ({r})");
            }
            match &c.certificate {
                Some(cert) => {
                    let _ = write!(out, " certificate: {cert}");
                }
                None => out.push_str(" certificate: none"),
            }
            out.push('\n');
            if let Some(v) = &c.verification {
                let _ = writeln!(
                    out,
                    "  verify: {} ({} checks)",
                    if v.passed { "PASS" } else { "FAIL" },
                    v.checks.len()
                );
                if let Some(f) = &v.failure {
                    let _ = write!(out, "  reason: {}", f.reason);
                    if let Some(x) = &f.counterexample {
                        let _ = write!(out, " at {x}");
                    }
                    out.push('\n');
                }
            }
        }
        if let Some(r) = &self.result {
            render_result(r, out);
        }
        for r in &self.reports {
            r.render_into(out);
        }
    }
}

fn list(xs: &[GroupElement]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn render_result(r: &CommandResult, out: &mut String) {
    match r {
        CommandResult::Membership { results } => {
            for m in results {
                let _ = writeln!(out, "{} in S: {}", m.element, m.member);
            }
        }
        CommandResult::Closure {
            space,
            input,
            symbolic,
            window_trace,
            probes,
        } => {
            let _ = writeln!(out, "[{space}] A = {input}");
            if let Some(s) = symbolic {
                let _ = writeln!(out, "closure: {s}");
            }
            if !probes.is_empty() {
                let _ = writeln!(out, "probes: {}", list(probes));
            }
            if let Some(w) = window_trace {
                let _ = writeln!(out, "window trace ({} points): {}", w.len(), list(w));
            }
        }
        CommandResult::Limits { report } => {
            let _ = writeln!(out, "[{}] limits over {} terms", report.variant, report.checked_prefix);
            if !report.probes.is_empty() {
                let _ = writeln!(out, "probes: {}", list(&report.probes));
            }
            let set = match &report.limits {
                LimitSet::All => "all of G".to_string(),
                LimitSet::Empty => "none".to_string(),
                LimitSet::Described(d) => d.to_string(),
                LimitSet::Sampled(pts) => format!("window sample {}", list(pts)),
            };
            let _ = writeln!(out, "limit set: {set}");
            let limits: Vec<String> = report
                .points
                .iter()
                .filter_map(|p| match p.verdict {
                    PointVerdict::Limit { from_index } => Some(format!("{} (from {from_index})", p.point)),
                    PointVerdict::NotLimit { .. } => None,
                })
                .collect();
            let _ = writeln!(out, "window limits: {}", limits.join(", "));
        }
        CommandResult::WindowCheck { checks } => {
            for c in checks {
                let _ = write!(out, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
                if let Some(d) = &c.detail {
                    let _ = write!(out, ": {d}");
                }
                out.push('\n');
            }
        }
        CommandResult::Enumerate {
            points,
            count,
            topologies,
        } => {
            let _ = writeln!(out, "topologies on {points} points: {count}");
            for t in topologies {
                let sets: Vec<String> = t
                    .iter()
                    .map(|s| format!("{{{}}}", s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
                    .collect();
                let _ = writeln!(out, "  {}", sets.join(" "));
            }
        }
        CommandResult::Lemmas { report } => {
            let _ = writeln!(
                out,
                "points: {}, topologies: {}, pairs checked: {}, cowide pairs: {}, counterexamples: {}",
                report.points,
                report.topologies,
                report.pairs_checked,
                report.cowide_pairs,
                report.counterexamples.len()
            );
        }
    }
}
