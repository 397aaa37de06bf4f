//! Brute-force reference computations for small instances.
//!
//! Nothing here calls into `detect`, `argue` or `resolve`: resource sums,
//! defeat and every semantics are recomputed from their definitions by
//! enumerating subsets, so agreement with the main path means something.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argue::GoalFramework;
use crate::feasibility::EnabledGoals;
use crate::model::{AgentSpec, GoalId, Quantity, ResourceId};

pub const FEASIBLE_CAP: usize = 20;
pub const SEMANTICS_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{goals} goals exceed the oracle cap of {cap}")]
    TooManyGoals { goals: usize, cap: usize },
}

type GoalSet = BTreeSet<GoalId>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSubsetReport {
    /// Every subset of enabled goals whose needs fit every resource.
    pub feasible: Vec<GoalSet>,
    pub maximal: Vec<GoalSet>,
    /// Maximal subsets with the greatest total worth.
    pub best_worth: Vec<GoalSet>,
    pub best_total: f64,
}

/// Total worth, summed in goal-id order.
pub fn total_worth(spec: &AgentSpec, goals: &GoalSet) -> f64 {
    goals
        .iter()
        .filter_map(|g| spec.goals.get(g))
        .map(|g| g.worth.value())
        .sum()
}

fn members<'a>(goals: &'a [&'a GoalId], mask: u32) -> impl Iterator<Item = &'a GoalId> + 'a {
    goals
        .iter()
        .enumerate()
        .filter(move |(i, _)| mask & (1 << i) != 0)
        .map(|(_, g)| *g)
}

fn resources_of(spec: &AgentSpec, enabled: &EnabledGoals) -> BTreeSet<ResourceId> {
    spec.resources
        .iter()
        .map(|(r, _)| r.clone())
        .chain(
            enabled
                .needs
                .iter()
                .flat_map(|(_, list)| list.resources().cloned()),
        )
        .collect()
}

fn overloads(
    spec: &AgentSpec,
    enabled: &EnabledGoals,
    goals: &[&GoalId],
    mask: u32,
    res: &ResourceId,
) -> bool {
    let mut total = Quantity::ZERO;
    for g in members(goals, mask) {
        total = total
            .checked_add(enabled.needs.need(g, res))
            .expect("quantity overflow");
    }
    let available = spec
        .resources
        .iter()
        .find(|(r, _)| *r == res)
        .map_or(Quantity::ZERO, |(_, q)| q);
    total > available
}

/// Exhaustive enumeration of the resource-feasible subsets of the enabled goals.
pub fn enumerate_feasible(
    spec: &AgentSpec,
    enabled: &EnabledGoals,
) -> Result<FeasibleSubsetReport, OracleError> {
    let goals: Vec<&GoalId> = enabled.goals.iter().collect();
    if goals.len() > FEASIBLE_CAP {
        return Err(OracleError::TooManyGoals {
            goals: goals.len(),
            cap: FEASIBLE_CAP,
        });
    }
    let resources = resources_of(spec, enabled);
    let masks: Vec<u32> = (0..1u32 << goals.len())
        .filter(|&mask| {
            resources
                .iter()
                .all(|r| !overloads(spec, enabled, &goals, mask, r))
        })
        .collect();
    let maximal_masks: Vec<u32> = masks
        .iter()
        .copied()
        .filter(|&m| !masks.iter().any(|&other| other != m && other & m == m))
        .collect();
    let to_set = |mask: u32| -> GoalSet { members(&goals, mask).cloned().collect() };
    let maximal: Vec<GoalSet> = maximal_masks.into_iter().map(to_set).collect();
    // Worths are non-negative, so the optimum is always reached by a maximal set.
    let best_total = maximal
        .iter()
        .map(|s| total_worth(spec, s))
        .fold(f64::NEG_INFINITY, f64::max);
    let best_worth = maximal
        .iter()
        .filter(|s| total_worth(spec, s) == best_total)
        .cloned()
        .collect();
    Ok(FeasibleSubsetReport {
        feasible: masks.iter().map(|&m| to_set(m)).collect(),
        maximal,
        best_worth,
        best_total,
    })
}

/// Conflict sets by enumeration: for every resource, the goals that take part
/// with a positive need in some subset of enabled goals overloading it.
pub fn conflict_sets_by_enumeration(
    spec: &AgentSpec,
    enabled: &EnabledGoals,
) -> Result<BTreeMap<ResourceId, GoalSet>, OracleError> {
    let goals: Vec<&GoalId> = enabled.goals.iter().collect();
    if goals.len() > FEASIBLE_CAP {
        return Err(OracleError::TooManyGoals {
            goals: goals.len(),
            cap: FEASIBLE_CAP,
        });
    }
    let mut found = BTreeMap::new();
    for res in resources_of(spec, enabled) {
        let mut set = GoalSet::new();
        for mask in 0..1u32 << goals.len() {
            if overloads(spec, enabled, &goals, mask, &res) {
                set.extend(
                    members(&goals, mask)
                        .filter(|g| !enabled.needs.need(g, &res).is_zero())
                        .cloned(),
                );
            }
        }
        if !set.is_empty() {
            found.insert(res, set);
        }
    }
    Ok(found)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticsReport {
    pub admissible: Vec<GoalSet>,
    pub complete: Vec<GoalSet>,
    pub grounded: GoalSet,
    pub preferred: Vec<GoalSet>,
}

/// Classifies every subset of the framework's goals by the literal
/// definitions of conflict-freeness, defence, admissibility and completeness.
pub fn semantics_by_definition(gf: &GoalFramework) -> Result<SemanticsReport, OracleError> {
    let goals: Vec<&GoalId> = gf.goals.iter().collect();
    let n = goals.len();
    if n > SEMANTICS_CAP {
        return Err(OracleError::TooManyGoals {
            goals: n,
            cap: SEMANTICS_CAP,
        });
    }
    let incompatible = |a: &GoalId, b: &GoalId| {
        gf.incompatibility
            .iter()
            .any(|p| (p.first() == a && p.second() == b) || (p.first() == b && p.second() == a))
    };
    let defeat =
        |a: &GoalId, b: &GoalId| a != b && incompatible(a, b) && gf.worth[a] >= gf.worth[b];
    let defends = |set: &[&GoalId], g: &GoalId| {
        goals
            .iter()
            .filter(|h| defeat(h, g))
            .all(|h| set.iter().any(|k| defeat(k, h)))
    };

    let mut admissible = Vec::new();
    let mut complete = Vec::new();
    for mask in 0..1u32 << n {
        let set: Vec<&GoalId> = members(&goals, mask).collect();
        let conflict_free = set.iter().all(|a| set.iter().all(|b| !defeat(a, b)));
        if !conflict_free {
            continue;
        }
        if set.iter().all(|g| defends(&set, g)) {
            admissible.push(mask);
        }
        let defended: u32 = (0..n)
            .filter(|&i| defends(&set, goals[i]))
            .fold(0, |m, i| m | (1 << i));
        if defended == mask {
            complete.push(mask);
        }
    }
    let minimal: Vec<u32> = complete
        .iter()
        .copied()
        .filter(|&m| complete.iter().all(|&o| o & m != o || o == m))
        .collect();
    assert_eq!(minimal.len(), 1, "grounded extension must be unique");
    let maximal: Vec<u32> = complete
        .iter()
        .copied()
        .filter(|&m| complete.iter().all(|&o| o & m != m || o == m))
        .collect();
    let to_set = |mask: u32| -> GoalSet { members(&goals, mask).cloned().collect() };
    let mut preferred: Vec<GoalSet> = maximal.into_iter().map(to_set).collect();
    preferred.sort();
    Ok(SemanticsReport {
        admissible: admissible.into_iter().map(to_set).collect(),
        complete: complete.into_iter().map(to_set).collect(),
        grounded: to_set(minimal[0]),
        preferred,
    })
}
