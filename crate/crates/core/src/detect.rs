//! Detection of resource incompatibilities among enabled goals, and their
//! classification as simple or complex.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::feasibility::EnabledGoals;
use crate::model::{AgentSpec, GoalId, Quantity, ResourceId};

/// Enabled goals that jointly overload one resource.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictSet {
    resource: ResourceId,
    goals: BTreeSet<GoalId>,
    total_need: Quantity,
    available: Quantity,
}

impl ConflictSet {
    /// `None` unless the set has at least two goals and `total_need > available`.
    pub fn new(
        resource: ResourceId,
        goals: BTreeSet<GoalId>,
        total_need: Quantity,
        available: Quantity,
    ) -> Option<Self> {
        (goals.len() >= 2 && total_need > available).then_some(Self {
            resource,
            goals,
            total_need,
            available,
        })
    }

    pub fn resource(&self) -> &ResourceId {
        &self.resource
    }

    pub fn goals(&self) -> &BTreeSet<GoalId> {
        &self.goals
    }

    pub fn total_need(&self) -> Quantity {
        self.total_need
    }

    pub fn available(&self) -> Quantity {
        self.available
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncompatibilityKind {
    /// No conflict sets at all.
    None,
    /// Every incompatible goal occurs in exactly one conflict set.
    Simple,
    /// Some goal occurs in two or more conflict sets.
    Complex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncompatibilityReport {
    /// Ordered by resource id.
    pub sets: Vec<ConflictSet>,
    /// Union of the goals of all sets.
    pub incompatible_goals: BTreeSet<GoalId>,
    pub kind: IncompatibilityKind,
}

impl IncompatibilityReport {
    pub fn from_sets(mut sets: Vec<ConflictSet>) -> Self {
        sets.sort_by(|a, b| a.resource.cmp(&b.resource));
        let incompatible_goals = sets.iter().flat_map(|s| s.goals.iter().cloned()).collect();
        let kind = classify(sets.iter().map(ConflictSet::goals));
        Self {
            sets,
            incompatible_goals,
            kind,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Groups enabled goals by each resource of the summary they need a positive
/// amount of, and keeps the groups whose total need exceeds availability.
/// Empty and single-goal groups can never qualify because every enabled goal
/// fits the summary on its own.
pub fn resource_incom(spec: &AgentSpec, enabled: &EnabledGoals) -> IncompatibilityReport {
    let mut by_resource: BTreeMap<&ResourceId, BTreeSet<GoalId>> = spec
        .resources
        .iter()
        .map(|(res, _)| (res, BTreeSet::new()))
        .collect();
    for g in &enabled.goals {
        let Some(list) = enabled.needs.requirements(g) else {
            continue;
        };
        for res in list.resources() {
            if let Some(group) = by_resource.get_mut(res) {
                group.insert(g.clone());
            }
        }
    }
    let sets = by_resource
        .into_iter()
        .filter_map(|(res, goals)| {
            let total: Quantity = goals.iter().map(|g| enabled.needs.need(g, res)).sum();
            ConflictSet::new(res.clone(), goals, total, spec.resources.available(res))
        })
        .collect();
    IncompatibilityReport::from_sets(sets)
}

/// Classifies a family of conflicting goal sets.
pub fn classify<'a>(sets: impl IntoIterator<Item = &'a BTreeSet<GoalId>>) -> IncompatibilityKind {
    let mut occurrences: BTreeMap<&GoalId, usize> = BTreeMap::new();
    let mut any = false;
    for set in sets {
        any = true;
        for g in set {
            *occurrences.entry(g).or_default() += 1;
        }
    }
    if !any {
        IncompatibilityKind::None
    } else if occurrences.values().all(|&n| n == 1) {
        IncompatibilityKind::Simple
    } else {
        IncompatibilityKind::Complex
    }
}
