//! Serializable check reports.

use serde::Serialize;

use crate::index::Verdict;

use super::{CheckedDef, CheckedProgram, Obligation};

#[derive(Debug, Clone, Serialize)]
pub struct ObligationReport {
    pub ctx: Vec<String>,
    pub relation: String,
    pub lhs: String,
    pub rhs: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefReport {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub effect: String,
    pub obligations: Vec<ObligationReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub definitions: Vec<DefReport>,
}

impl From<&Obligation> for ObligationReport {
    fn from(o: &Obligation) -> Self {
        ObligationReport {
            ctx: o.ctx.vars().to_vec(),
            relation: o.relation.to_string(),
            lhs: o.lhs.to_string(),
            rhs: o.rhs.to_string(),
            verdict: o.verdict.clone(),
        }
    }
}

impl From<&CheckedDef> for DefReport {
    fn from(d: &CheckedDef) -> Self {
        DefReport {
            name: d.name.clone(),
            ty: d.ty.to_string(),
            effect: d.effect.to_string(),
            obligations: d.obligations.iter().map(ObligationReport::from).collect(),
        }
    }
}

impl CheckReport {
    pub fn new(p: &CheckedProgram) -> Self {
        CheckReport { definitions: p.defs.iter().chain(p.main.iter()).map(DefReport::from).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.definitions {
            out.push_str(&format!("{} :: {} ; effect {}\n", d.name, d.ty, d.effect));
            for o in &d.obligations {
                out.push_str(&format!(
                    "  {{{}}} |- {} {} {}  {}\n",
                    o.ctx.join(", "),
                    o.lhs,
                    o.relation,
                    o.rhs,
                    o.verdict
                ));
            }
        }
        out
    }
}
