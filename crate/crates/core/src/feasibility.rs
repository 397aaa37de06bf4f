//! Resource queries and the per-goal feasibility filter.
//!
//! A goal is *enabled* when its selected plan's every requirement fits the
//! resource summary on its own. Joint conflicts between enabled goals are
//! left to [`crate::detect`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AgentSpec, GoalId, Plan, PlanId, Quantity, RequirementList, ResourceId, ResourceSummary,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("unknown goal `{0}`")]
    UnknownGoal(GoalId),
    #[error("no applicable plan for goal `{0}`")]
    NoApplicablePlan(GoalId),
}

/// Available quantity of `res`, 0 when the agent does not hold it.
pub fn availa_res(summary: &ResourceSummary, res: &ResourceId) -> Quantity {
    summary.available(res)
}

/// The plan a goal would be pursued with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlanChoice<'a> {
    /// The goal's inline requirements, read as an always-applicable plan.
    Inline(&'a RequirementList),
    Declared(&'a Plan),
}

impl<'a> PlanChoice<'a> {
    pub fn requirements(&self) -> &'a RequirementList {
        match self {
            PlanChoice::Inline(list) => list,
            PlanChoice::Declared(plan) => &plan.requires,
        }
    }

    pub fn plan_ref(&self) -> PlanRef {
        match self {
            PlanChoice::Inline(_) => PlanRef::Inline,
            PlanChoice::Declared(plan) => PlanRef::Declared(plan.id.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanRef {
    Inline,
    Declared(PlanId),
}

/// Inline requirements win; otherwise the first declared plan whose context
/// holds against the belief base.
pub fn resolve_plan<'a>(
    spec: &'a AgentSpec,
    g: &GoalId,
) -> Result<PlanChoice<'a>, FeasibilityError> {
    let goal = spec
        .goal(g)
        .ok_or_else(|| FeasibilityError::UnknownGoal(g.clone()))?;
    if let Some(list) = &goal.inline_requirements {
        return Ok(PlanChoice::Inline(list));
    }
    spec.plans_for(g)
        .find(|plan| plan.context.iter().all(|lit| lit.holds_in(&spec.beliefs)))
        .map(PlanChoice::Declared)
        .ok_or_else(|| FeasibilityError::NoApplicablePlan(g.clone()))
}

pub fn need_res(
    spec: &AgentSpec,
    g: &GoalId,
    res: &ResourceId,
) -> Result<Quantity, FeasibilityError> {
    Ok(resolve_plan(spec, g)?.requirements().need(res))
}

/// Per-goal requirement lists of the selected plans.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Needs(BTreeMap<GoalId, RequirementList>);

impl Needs {
    pub fn new(entries: BTreeMap<GoalId, RequirementList>) -> Self {
        Self(entries)
    }

    pub fn need(&self, g: &GoalId, res: &ResourceId) -> Quantity {
        self.0.get(g).map_or(Quantity::ZERO, |list| list.need(res))
    }

    pub fn requirements(&self, g: &GoalId) -> Option<&RequirementList> {
        self.0.get(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GoalId, &RequirementList)> {
        self.0.iter()
    }
}

/// A resource a goal needs more of than the agent holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    pub resource: ResourceId,
    pub needed: Quantity,
    pub available: Quantity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Exclusion {
    Insufficient { shortfalls: Vec<Shortfall> },
    NoApplicablePlan,
}

/// Output of [`eval_resources`]: the enabled goals and why the rest were left out.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnabledGoals {
    pub goals: BTreeSet<GoalId>,
    pub excluded: BTreeMap<GoalId, Exclusion>,
    /// Requirements of the selected plan of each enabled goal.
    pub needs: Needs,
    pub plans: BTreeMap<GoalId, PlanRef>,
}

impl EnabledGoals {
    pub fn contains(&self, g: &GoalId) -> bool {
        self.goals.contains(g)
    }
}

/// Checks each goal in isolation against the resource summary. A goal needing
/// exactly what is available is enabled.
pub fn eval_resources(spec: &AgentSpec) -> EnabledGoals {
    let mut enabled = EnabledGoals::default();
    let mut needs = BTreeMap::new();
    for id in spec.goals.keys() {
        let choice = match resolve_plan(spec, id) {
            Ok(choice) => choice,
            Err(_) => {
                enabled
                    .excluded
                    .insert(id.clone(), Exclusion::NoApplicablePlan);
                continue;
            }
        };
        let shortfalls: Vec<Shortfall> = choice
            .requirements()
            .iter()
            .filter_map(|(res, needed)| {
                let available = availa_res(&spec.resources, res);
                (needed > available).then(|| Shortfall {
                    resource: res.clone(),
                    needed,
                    available,
                })
            })
            .collect();
        if shortfalls.is_empty() {
            enabled.goals.insert(id.clone());
            enabled.plans.insert(id.clone(), choice.plan_ref());
            needs.insert(id.clone(), choice.requirements().clone());
        } else {
            enabled
                .excluded
                .insert(id.clone(), Exclusion::Insufficient { shortfalls });
        }
    }
    enabled.needs = Needs(needs);
    enabled
}
