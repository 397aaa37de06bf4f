//! Selection of the consistent goals, either greedily per conflict set
//! ([`eval_simple`]), greedily over all incompatible goals with residual
//! resource accounting ([`eval_complex`]), or through argumentation semantics
//! ([`solve_argumentation`]).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::argue::{
    acceptable_goals, build_framework, choose_extension, ArgueError, Extension, Semantics,
};
use crate::detect::{IncompatibilityKind, IncompatibilityReport};
use crate::feasibility::EnabledGoals;
use crate::model::{GoalId, Quantity, RequirementList, ResourceId, ResourceSummary, WorthMap};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("expected {expected:?} incompatibility, got {actual:?}")]
    WrongKind {
        expected: IncompatibilityKind,
        actual: IncompatibilityKind,
    },
    #[error(transparent)]
    Argue(#[from] ArgueError),
}

/// How goals of equal worth are ordered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieBreak {
    /// Lexicographically smaller id wins.
    #[default]
    ById,
    /// A seeded shuffle of the goal ids decides.
    Seeded(u64),
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "id" {
            return Ok(TieBreak::ById);
        }
        s.strip_prefix("seed:")
            .and_then(|n| n.parse().ok())
            .map(TieBreak::Seeded)
            .ok_or_else(|| format!("unknown tiebreak `{s}` (expected `id` or `seed:N`)"))
    }
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieBreak::ById => f.write_str("id"),
            TieBreak::Seeded(seed) => write!(f, "seed:{seed}"),
        }
    }
}

impl Serialize for TieBreak {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TieBreak {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Total order on goals: higher worth first, ties by the tie-break rank.
pub struct Precedence<'a> {
    worth: &'a WorthMap,
    rank: BTreeMap<&'a GoalId, usize>,
}

impl<'a> Precedence<'a> {
    pub fn new(worth: &'a WorthMap, tiebreak: TieBreak) -> Self {
        let mut ids: Vec<&GoalId> = worth.keys().collect();
        if let TieBreak::Seeded(seed) = tiebreak {
            ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        let rank = ids.into_iter().enumerate().map(|(i, g)| (g, i)).collect();
        Self { worth, rank }
    }

    /// `Less` when `a` comes first, i.e. is more valuable.
    pub fn compare(&self, a: &GoalId, b: &GoalId) -> Ordering {
        let wa = self.worth.get(a);
        let wb = self.worth.get(b);
        wb.cmp(&wa)
            .then_with(|| self.rank.get(a).cmp(&self.rank.get(b)))
            .then_with(|| a.cmp(b))
    }

    pub fn outranks(&self, a: &GoalId, b: &GoalId) -> bool {
        self.compare(a, b) == Ordering::Less
    }

    pub fn most_valuable<'g>(
        &self,
        goals: impl IntoIterator<Item = &'g GoalId>,
    ) -> Option<&'g GoalId> {
        goals.into_iter().min_by(|a, b| self.compare(a, b))
    }
}

/// Remaining quantity per resource while goals are being kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResidualLedger {
    remaining: BTreeMap<ResourceId, Quantity>,
}

impl ResidualLedger {
    pub fn new(summary: &ResourceSummary) -> Self {
        Self {
            remaining: summary.iter().map(|(r, q)| (r.clone(), q)).collect(),
        }
    }

    pub fn remaining(&self, res: &ResourceId) -> Quantity {
        self.remaining.get(res).copied().unwrap_or(Quantity::ZERO)
    }

    /// First requirement that does not fit the residual.
    pub fn first_shortfall<'r>(
        &self,
        needs: &'r RequirementList,
    ) -> Option<(&'r ResourceId, Quantity)> {
        needs.iter().find(|(res, need)| *need > self.remaining(res))
    }

    pub fn deduct(&mut self, needs: &RequirementList) {
        for (res, need) in needs.iter() {
            let left = self.remaining(res).saturating_sub(need);
            self.remaining.insert(res.clone(), left);
        }
    }

    fn snapshot(&self, needs: Option<&RequirementList>) -> BTreeMap<ResourceId, Quantity> {
        needs
            .into_iter()
            .flat_map(|list| list.resources())
            .map(|res| (res.clone(), self.remaining(res)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Reason {
    /// Enabled and in no conflict set.
    NotConflicting,
    /// Most valuable goal of each of its conflict sets, with enough residual.
    /// `overtook` lists more valuable set partners that were dropped earlier.
    MostValuable {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        overtook: Vec<GoalId>,
    },
    /// A more valuable goal remained in one of its conflict sets.
    Outvalued { resource: ResourceId, by: GoalId },
    /// The residual quantity could not cover the goal's need.
    InsufficientResidual {
        resource: ResourceId,
        need: Quantity,
        residual: Quantity,
    },
    /// Member of the chosen extension.
    Accepted,
    /// Not a member of the chosen extension.
    NotAccepted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub goal: GoalId,
    pub kept: bool,
    #[serde(flatten)]
    pub reason: Reason,
    /// Residual quantities of the goal's resources when it was decided.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub residual: BTreeMap<ResourceId, Quantity>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum StrategyTrail {
    Algorithmic {
        kind: IncompatibilityKind,
        tiebreak: TieBreak,
    },
    Argumentation {
        requested: Semantics,
        applied: Semantics,
        extensions: Vec<Extension>,
        chosen: Extension,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub consistent_goals: BTreeSet<GoalId>,
    #[serde(flatten)]
    pub strategy: StrategyTrail,
    /// One record per enabled goal, in decision order.
    pub audit: Vec<Decision>,
}

/// Everything the strategies read.
#[derive(Clone, Copy, Debug)]
pub struct Instance<'a> {
    pub enabled: &'a EnabledGoals,
    pub report: &'a IncompatibilityReport,
    pub summary: &'a ResourceSummary,
    pub worth: &'a WorthMap,
}

impl Instance<'_> {
    fn unconflicted(&self) -> impl Iterator<Item = &GoalId> + '_ {
        self.enabled
            .goals
            .iter()
            .filter(|g| !self.report.incompatible_goals.contains(*g))
    }

    fn finish(&self, strategy: StrategyTrail, mut audit: Vec<Decision>) -> Resolution {
        for g in self.unconflicted() {
            audit.push(Decision {
                goal: g.clone(),
                kept: true,
                reason: Reason::NotConflicting,
                residual: BTreeMap::new(),
            });
        }
        let consistent_goals = audit
            .iter()
            .filter(|d| d.kept)
            .map(|d| d.goal.clone())
            .collect();
        Resolution {
            consistent_goals,
            strategy,
            audit,
        }
    }
}

/// Keeps the most valuable goal of every conflict set. Requires a simple report.
pub fn eval_simple(
    instance: &Instance<'_>,
    tiebreak: TieBreak,
) -> Result<Resolution, ResolveError> {
    let kind = instance.report.kind;
    if kind != IncompatibilityKind::Simple {
        return Err(ResolveError::WrongKind {
            expected: IncompatibilityKind::Simple,
            actual: kind,
        });
    }
    let precedence = Precedence::new(instance.worth, tiebreak);
    let mut audit = Vec::new();
    for set in &instance.report.sets {
        let Some(winner) = precedence.most_valuable(set.goals()) else {
            continue;
        };
        audit.push(Decision {
            goal: winner.clone(),
            kept: true,
            reason: Reason::MostValuable {
                overtook: Vec::new(),
            },
            residual: BTreeMap::new(),
        });
        let mut losers: Vec<&GoalId> = set.goals().iter().filter(|g| *g != winner).collect();
        losers.sort_by(|a, b| precedence.compare(a, b));
        audit.extend(losers.into_iter().map(|g| Decision {
            goal: g.clone(),
            kept: false,
            reason: Reason::Outvalued {
                resource: set.resource().clone(),
                by: winner.clone(),
            },
            residual: BTreeMap::new(),
        }));
    }
    Ok(instance.finish(StrategyTrail::Algorithmic { kind, tiebreak }, audit))
}

/// Visits the incompatible goals from most to least valuable. A goal is kept
/// when it is the most valuable remaining member of every conflict set it
/// still belongs to and the residual ledger covers all of its needs; kept
/// goals are deducted from the ledger. Each visited goal then leaves every
/// set, and emptied sets are discarded.
pub fn eval_complex(instance: &Instance<'_>, tiebreak: TieBreak) -> Resolution {
    let precedence = Precedence::new(instance.worth, tiebreak);
    let mut sets: Vec<(&ResourceId, BTreeSet<&GoalId>)> = instance
        .report
        .sets
        .iter()
        .map(|s| (s.resource(), s.goals().iter().collect()))
        .collect();
    let mut order: Vec<&GoalId> = instance.report.incompatible_goals.iter().collect();
    order.sort_by(|a, b| precedence.compare(a, b));

    let mut ledger = ResidualLedger::new(instance.summary);
    let mut dropped: BTreeSet<&GoalId> = BTreeSet::new();
    let mut audit = Vec::new();
    for goal in order {
        let needs = instance.enabled.needs.requirements(goal);
        let residual = ledger.snapshot(needs);
        let outvalued = sets
            .iter()
            .filter(|(_, members)| members.contains(goal))
            .find_map(|(res, members)| {
                members
                    .iter()
                    .find(|h| precedence.outranks(h, goal))
                    .map(|h| Reason::Outvalued {
                        resource: (*res).clone(),
                        by: (*h).clone(),
                    })
            });
        let reason = outvalued.or_else(|| {
            needs
                .and_then(|list| ledger.first_shortfall(list))
                .map(|(res, need)| Reason::InsufficientResidual {
                    resource: res.clone(),
                    need,
                    residual: ledger.remaining(res),
                })
        });
        let kept = reason.is_none();
        let reason = reason.unwrap_or_else(|| {
            let overtook = instance
                .report
                .sets
                .iter()
                .filter(|s| s.goals().contains(goal))
                .flat_map(|s| s.goals())
                .filter(|h| dropped.contains(h) && precedence.outranks(h, goal))
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            Reason::MostValuable { overtook }
        });
        if kept {
            if let Some(list) = needs {
                ledger.deduct(list);
            }
        } else {
            dropped.insert(goal);
        }
        audit.push(Decision {
            goal: goal.clone(),
            kept,
            reason,
            residual,
        });
        for (_, members) in sets.iter_mut() {
            members.remove(goal);
        }
        sets.retain(|(_, members)| !members.is_empty());
    }
    instance.finish(
        StrategyTrail::Algorithmic {
            kind: instance.report.kind,
            tiebreak,
        },
        audit,
    )
}

/// Dispatches on the incompatibility kind.
pub fn solve_algorithmic(instance: &Instance<'_>, tiebreak: TieBreak) -> Resolution {
    match instance.report.kind {
        IncompatibilityKind::None => instance.finish(
            StrategyTrail::Algorithmic {
                kind: IncompatibilityKind::None,
                tiebreak,
            },
            Vec::new(),
        ),
        IncompatibilityKind::Simple => {
            eval_simple(instance, tiebreak).expect("report kind checked to be simple")
        }
        IncompatibilityKind::Complex => eval_complex(instance, tiebreak),
    }
}

/// Consistent goals are the members of one acceptable extension (see
/// [`choose_extension`]) plus every enabled goal outside all conflict sets.
pub fn solve_argumentation(
    instance: &Instance<'_>,
    semantics: Semantics,
    cap: usize,
) -> Result<Resolution, ResolveError> {
    let framework = build_framework(instance.report, instance.worth);
    let acceptable = acceptable_goals(&framework, semantics, cap)?;
    let chosen = choose_extension(&acceptable.extensions, instance.worth)
        .cloned()
        .unwrap_or_default();
    let audit = framework
        .goals
        .iter()
        .map(|g| {
            let kept = chosen.contains(g);
            Decision {
                goal: g.clone(),
                kept,
                reason: if kept {
                    Reason::Accepted
                } else {
                    Reason::NotAccepted
                },
                residual: BTreeMap::new(),
            }
        })
        .collect();
    Ok(instance.finish(
        StrategyTrail::Argumentation {
            requested: semantics,
            applied: acceptable.semantics,
            extensions: acceptable.extensions,
            chosen,
        },
        audit,
    ))
}
