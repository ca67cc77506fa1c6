//! Text and structured (JSON) reports.
//!
//! The structured form follows the `hbpc-result/1` schema documented in
//! `docs/output-schema.md`.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Duration;

use hbpc_core::mln::MlnEncoding;
use hbpc_core::solver::{SolveResult, SolveStatus};
use serde::Serialize;

pub const SCHEMA: &str = "hbpc-result/1";

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub status: &'static str,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    /// True atoms, sorted by atom id.
    pub model: Vec<String>,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mln: Option<MlnSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationReport>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub lp_solves: u64,
    pub lp_iterations: u64,
    pub cut_rounds: u64,
    pub cuts_added: u64,
    pub columns: u64,
    pub rows_removed: u64,
    pub root_bound: Option<f64>,
    pub cuts_by_clause: BTreeMap<String, u64>,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MlnSummary {
    pub groups: usize,
    pub penalty_atoms: usize,
    pub folded: usize,
    /// Σ w × grounding count over soft clauses.
    pub constant: f64,
    /// `constant − objective`: the weight of satisfied groundings.
    pub satisfied_weight: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationReport {
    pub clause: String,
    pub grounding: BTreeMap<String, String>,
}

fn finite(v: f64) -> Option<f64> {
    // + 0.0 turns -0 into 0
    v.is_finite().then_some(v + 0.0)
}

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::LimitReached => "limit_reached",
    }
}

impl Report {
    pub fn from_result(command: &'static str, r: &SolveResult, elapsed: Duration, model: Vec<String>) -> Self {
        let s = &r.stats;
        Report {
            schema: SCHEMA,
            command,
            status: status_name(r.status),
            objective: r.objective.map(|v| v + 0.0),
            best_bound: finite(r.best_bound),
            model,
            stats: Stats {
                nodes: s.nodes,
                lp_solves: s.lp_solves,
                lp_iterations: s.lp_iterations,
                cut_rounds: s.cut_rounds,
                cuts_added: s.cuts_added,
                columns: s.columns,
                rows_removed: s.rows_removed,
                root_bound: s.root_bound.and_then(finite),
                cuts_by_clause: s.cuts_by_clause.iter().fold(BTreeMap::new(), |mut m, (c, n)| {
                    *m.entry(c.clone()).or_default() += n;
                    m
                }),
                wall_time_seconds: elapsed.as_secs_f64(),
            },
            mln: None,
            violation: None,
        }
    }

    pub fn with_mln(mut self, enc: &MlnEncoding) -> Self {
        self.mln = Some(MlnSummary {
            groups: enc.groups,
            penalty_atoms: enc.penalty_atoms,
            folded: enc.folded,
            constant: enc.constant,
            satisfied_weight: self.objective.map(|o| enc.constant - o),
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            "infeasible" if self.command != "check" => "infeasible (no Herbrand model)",
            s => s,
        };
        let _ = writeln!(out, "status: {}", status);
        if let Some(v) = &self.violation {
            let g: Vec<String> = v.grounding.iter().map(|(k, t)| format!("{}={}", k, t)).collect();
            let _ = writeln!(out, "violated clause: {} {{{}}}", v.clause, g.join(", "));
        }
        if self.command == "check" {
            return out;
        }
        match self.objective {
            Some(v) => {
                let _ = writeln!(out, "objective: {}", v);
            }
            None => out.push_str("objective: none\n"),
        }
        match self.best_bound {
            Some(v) => {
                let _ = writeln!(out, "best bound: {}", v);
            }
            None => out.push_str("best bound: none\n"),
        }
        if let Some(m) = &self.mln {
            let _ = writeln!(
                out,
                "mln: {} groups, {} penalty atoms, {} folded, constant {}",
                m.groups, m.penalty_atoms, m.folded, m.constant
            );
            if let Some(w) = m.satisfied_weight {
                let _ = writeln!(out, "satisfied weight: {}", w);
            }
        }
        let _ = writeln!(out, "model ({} true atoms):", self.model.len());
        for a in &self.model {
            let _ = writeln!(out, "  {}", a);
        }
        let s = &self.stats;
        let _ = writeln!(
            out,
            "stats: nodes {} lp_solves {} lp_iterations {} cut_rounds {} cuts_added {} columns {} rows_removed {}",
            s.nodes, s.lp_solves, s.lp_iterations, s.cut_rounds, s.cuts_added, s.columns, s.rows_removed
        );
        if let Some(b) = s.root_bound {
            let _ = writeln!(out, "root bound: {}", b);
        }
        for (c, n) in s.cuts_by_clause.iter().filter(|e| *e.1 > 0) {
            let _ = writeln!(out, "  cuts from {}: {}", c, n);
        }
        let _ = writeln!(out, "wall time: {:.3}s", s.wall_time_seconds);
        out
    }
}
