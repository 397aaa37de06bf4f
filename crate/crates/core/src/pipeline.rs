//! End-to-end composition of the modules into the versioned output document
//! printed by the command-line tool.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argue::{
    build_framework, defeats, ArgueError, GoalFramework, GoalPair, Semantics,
    DEFAULT_ENUMERATION_CAP,
};
use crate::detect::{resource_incom, ConflictSet, IncompatibilityKind, IncompatibilityReport};
use crate::dot::defeat_graph_dot;
use crate::feasibility::{eval_resources, EnabledGoals, Exclusion};
use crate::model::{AgentSpec, GoalId, WorthMap};
use crate::oracle::{self, FeasibleSubsetReport, OracleError, SemanticsReport};
use crate::resolve::{
    solve_algorithmic, solve_argumentation, Instance, Reason, Resolution, ResolveError,
    StrategyTrail, TieBreak,
};

pub const SCHEMA_VERSION: &str = "1";

/// Feasibility and detection results for one spec.
#[derive(Clone, Debug)]
pub struct Analysis<'a> {
    pub spec: &'a AgentSpec,
    pub enabled: EnabledGoals,
    pub report: IncompatibilityReport,
    pub worth: WorthMap,
}

impl<'a> Analysis<'a> {
    pub fn new(spec: &'a AgentSpec) -> Self {
        let enabled = eval_resources(spec);
        let report = resource_incom(spec, &enabled);
        Self {
            spec,
            enabled,
            report,
            worth: spec.worths(),
        }
    }

    pub fn instance(&self) -> Instance<'_> {
        Instance {
            enabled: &self.enabled,
            report: &self.report,
            summary: &self.spec.resources,
            worth: &self.worth,
        }
    }

    pub fn framework(&self) -> GoalFramework {
        build_framework(&self.report, &self.worth)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Algorithmic,
    Argumentation,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "algorithmic" => Ok(Strategy::Algorithmic),
            "argumentation" => Ok(Strategy::Argumentation),
            other => Err(format!(
                "unknown strategy `{other}` (expected algorithmic or argumentation)"
            )),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Algorithmic => "algorithmic",
            Strategy::Argumentation => "argumentation",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub semantics: Semantics,
    pub tiebreak: TieBreak,
    pub cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Algorithmic,
            semantics: Semantics::Auto,
            tiebreak: TieBreak::ById,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// Runs the selected strategy on an analysed spec.
pub fn solve(analysis: &Analysis<'_>, options: &SolveOptions) -> Result<Resolution, ResolveError> {
    let instance = analysis.instance();
    match options.strategy {
        Strategy::Algorithmic => Ok(solve_algorithmic(&instance, options.tiebreak)),
        Strategy::Argumentation => solve_argumentation(&instance, options.semantics, options.cap),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Feasibility,
    Detect,
    Solve,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionSection {
    pub conflict_sets: Vec<ConflictSet>,
    pub incompatible_goals: BTreeSet<GoalId>,
    pub kind: IncompatibilityKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkSection {
    pub goals: BTreeSet<GoalId>,
    pub incompatibility: Vec<GoalPair>,
    /// `(attacker, attacked)` pairs.
    pub defeats: Vec<(GoalId, GoalId)>,
}

impl FrameworkSection {
    pub fn new(gf: &GoalFramework) -> Self {
        let mut edges = Vec::new();
        for pair in &gf.incompatibility {
            let (a, b) = (pair.first(), pair.second());
            if defeats(gf, a, b) {
                edges.push((a.clone(), b.clone()));
            }
            if defeats(gf, b, a) {
                edges.push((b.clone(), a.clone()));
            }
        }
        edges.sort();
        Self {
            goals: gf.goals.clone(),
            incompatibility: gf.incompatibility.iter().cloned().collect(),
            defeats: edges,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub schema_version: String,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub enabled: BTreeSet<GoalId>,
    pub excluded: BTreeMap<GoalId, Exclusion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framework: Option<FrameworkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
}

impl OutputDocument {
    fn base(analysis: &Analysis<'_>, command: Command) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            command,
            warnings: analysis
                .spec
                .warnings
                .iter()
                .map(ToString::to_string)
                .collect(),
            enabled: analysis.enabled.goals.clone(),
            excluded: analysis.enabled.excluded.clone(),
            detection: None,
            framework: None,
            resolution: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("output document serializes");
        json.push('\n');
        json
    }
}

fn detection(analysis: &Analysis<'_>) -> DetectionSection {
    DetectionSection {
        conflict_sets: analysis.report.sets.clone(),
        incompatible_goals: analysis.report.incompatible_goals.clone(),
        kind: analysis.report.kind,
    }
}

pub fn feasibility_document(spec: &AgentSpec) -> OutputDocument {
    OutputDocument::base(&Analysis::new(spec), Command::Feasibility)
}

pub fn detect_document(spec: &AgentSpec) -> OutputDocument {
    let analysis = Analysis::new(spec);
    OutputDocument {
        detection: Some(detection(&analysis)),
        ..OutputDocument::base(&analysis, Command::Detect)
    }
}

pub fn solve_document(
    spec: &AgentSpec,
    options: &SolveOptions,
) -> Result<OutputDocument, ResolveError> {
    let analysis = Analysis::new(spec);
    let resolution = solve(&analysis, options)?;
    let framework = (options.strategy == Strategy::Argumentation)
        .then(|| FrameworkSection::new(&analysis.framework()));
    Ok(OutputDocument {
        detection: Some(detection(&analysis)),
        framework,
        resolution: Some(resolution),
        ..OutputDocument::base(&analysis, Command::Solve)
    })
}

/// DOT rendering of the defeat graph over the spec's incompatible goals.
pub fn export_af(spec: &AgentSpec) -> String {
    defeat_graph_dot(&Analysis::new(spec).framework())
}

fn join<'a>(goals: impl IntoIterator<Item = &'a GoalId>) -> String {
    goals
        .into_iter()
        .map(GoalId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Human-readable rendering of an output document.
pub fn render_text(doc: &OutputDocument) -> String {
    let mut out = String::new();
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "enabled goals: {{{}}}", join(&doc.enabled));
    for (goal, why) in &doc.excluded {
        match why {
            Exclusion::Insufficient { shortfalls } => {
                for s in shortfalls {
                    let _ = writeln!(
                        out,
                        "excluded {goal}: needs {} of {}, {} available",
                        s.needed, s.resource, s.available
                    );
                }
            }
            Exclusion::NoApplicablePlan => {
                let _ = writeln!(out, "excluded {goal}: no applicable plan");
            }
        }
    }
    if let Some(det) = &doc.detection {
        let kind = match det.kind {
            IncompatibilityKind::None => "none",
            IncompatibilityKind::Simple => "simple",
            IncompatibilityKind::Complex => "complex",
        };
        let _ = writeln!(out, "incompatibility: {kind}");
        for set in &det.conflict_sets {
            let _ = writeln!(
                out,
                "  {}: {{{}}} need {} > {} available",
                set.resource(),
                join(set.goals()),
                set.total_need(),
                set.available()
            );
        }
    }
    if let Some(fw) = &doc.framework {
        let _ = writeln!(out, "defeats:");
        for (a, b) in &fw.defeats {
            let _ = writeln!(out, "  {a} -> {b}");
        }
    }
    if let Some(res) = &doc.resolution {
        match &res.strategy {
            StrategyTrail::Algorithmic { tiebreak, .. } => {
                let _ = writeln!(out, "strategy: algorithmic (tiebreak {tiebreak})");
            }
            StrategyTrail::Argumentation {
                applied,
                extensions,
                chosen,
                ..
            } => {
                let _ = writeln!(out, "strategy: argumentation ({applied})");
                for e in extensions {
                    let mark = if e == chosen { "*" } else { " " };
                    let _ = writeln!(out, " {mark}extension {{{}}}", join(e.members()));
                }
            }
        }
        for d in &res.audit {
            let verdict = if d.kept { "keep" } else { "drop" };
            let why = match &d.reason {
                Reason::NotConflicting => "not conflicting".to_owned(),
                Reason::MostValuable { overtook } if overtook.is_empty() => {
                    "most valuable".to_owned()
                }
                Reason::MostValuable { overtook } => {
                    format!("most valuable remaining (after {})", join(overtook))
                }
                Reason::Outvalued { resource, by } => format!("outvalued by {by} on {resource}"),
                Reason::InsufficientResidual {
                    resource,
                    need,
                    residual,
                } => {
                    format!("needs {need} of {resource}, {residual} left")
                }
                Reason::Accepted => "in extension".to_owned(),
                Reason::NotAccepted => "not in extension".to_owned(),
            };
            let _ = writeln!(out, "  {verdict} {}: {why}", d.goal);
        }
        let _ = writeln!(out, "consistent goals: {{{}}}", join(&res.consistent_goals));
    }
    out
}

#[derive(Debug, Error)]
pub enum OracleCommandError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Argue(#[from] ArgueError),
}

/// Brute-force cross-check of one spec, for debugging.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleDocument {
    pub schema_version: String,
    pub conflict_sets: BTreeMap<String, BTreeSet<GoalId>>,
    pub feasible: FeasibleSubsetReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantics: Option<SemanticsReport>,
}

pub fn oracle_document(spec: &AgentSpec) -> Result<OracleDocument, OracleCommandError> {
    let analysis = Analysis::new(spec);
    let conflict_sets = oracle::conflict_sets_by_enumeration(spec, &analysis.enabled)?
        .into_iter()
        .map(|(r, goals)| (r.to_string(), goals))
        .collect();
    let feasible = oracle::enumerate_feasible(spec, &analysis.enabled)?;
    let framework = analysis.framework();
    let semantics = if framework.goals.len() <= oracle::SEMANTICS_CAP {
        Some(oracle::semantics_by_definition(&framework)?)
    } else {
        None
    };
    Ok(OracleDocument {
        schema_version: SCHEMA_VERSION.to_owned(),
        conflict_sets,
        feasible,
        semantics,
    })
}
