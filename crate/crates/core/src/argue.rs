//! Incompatible-goals framework and its argumentation semantics.
//!
//! Goals are arguments, resource incompatibility is a symmetric attack, and
//! worth decides which attacks succeed as defeats. Goals of equal worth defeat
//! each other, so an all-equal framework has an empty grounded extension.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::IncompatibilityReport;
use crate::model::{GoalId, Worth, WorthMap};

pub const DEFAULT_ENUMERATION_CAP: usize = 25;
const MAX_ENUMERATION_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ArgueError {
    #[error("framework has {goals} goals, above the enumeration cap of {cap}")]
    FrameworkTooLarge { goals: usize, cap: usize },
}

/// Unordered pair of distinct goals, stored with the smaller id first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GoalPair(GoalId, GoalId);

impl GoalPair {
    pub fn new(a: GoalId, b: GoalId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self(a, b)),
            std::cmp::Ordering::Greater => Some(Self(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> &GoalId {
        &self.0
    }

    pub fn second(&self) -> &GoalId {
        &self.1
    }
}

/// A set of goals accepted together.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Extension(BTreeSet<GoalId>);

impl Extension {
    pub fn new(members: BTreeSet<GoalId>) -> Self {
        Self(members)
    }

    pub fn members(&self) -> &BTreeSet<GoalId> {
        &self.0
    }

    pub fn contains(&self, g: &GoalId) -> bool {
        self.0.contains(g)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_members(self) -> BTreeSet<GoalId> {
        self.0
    }
}

impl FromIterator<GoalId> for Extension {
    fn from_iter<T: IntoIterator<Item = GoalId>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalFramework {
    pub goals: BTreeSet<GoalId>,
    pub incompatibility: BTreeSet<GoalPair>,
    pub worth: WorthMap,
}

impl GoalFramework {
    /// Framework whose incompatibility relates every two distinct goals that
    /// share a set. Goals missing from `worth` are dropped.
    pub fn from_goal_sets<'a>(
        sets: impl IntoIterator<Item = &'a BTreeSet<GoalId>>,
        worth: &WorthMap,
    ) -> Self {
        let mut goals = BTreeSet::new();
        let mut incompatibility = BTreeSet::new();
        for set in sets {
            let members: Vec<&GoalId> = set.iter().filter(|g| worth.contains_key(*g)).collect();
            goals.extend(members.iter().map(|g| (*g).clone()));
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    incompatibility.extend(GoalPair::new((*a).clone(), (*b).clone()));
                }
            }
        }
        let worth = goals
            .iter()
            .filter_map(|g| worth.get(g).map(|w| (g.clone(), *w)))
            .collect();
        Self {
            goals,
            incompatibility,
            worth,
        }
    }

    pub fn worth(&self, g: &GoalId) -> Option<Worth> {
        self.worth.get(g).copied()
    }

    pub fn incompatible(&self, a: &GoalId, b: &GoalId) -> bool {
        GoalPair::new(a.clone(), b.clone()).is_some_and(|p| self.incompatibility.contains(&p))
    }

    /// Goals attacking `g` successfully.
    pub fn defeaters<'a>(&'a self, g: &'a GoalId) -> impl Iterator<Item = &'a GoalId> + 'a {
        self.goals.iter().filter(move |h| defeats(self, h, g))
    }

    fn indexed(&self) -> Indexed {
        let ids: Vec<GoalId> = self.goals.iter().cloned().collect();
        let position: BTreeMap<&GoalId, usize> =
            ids.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut attackers = vec![Vec::new(); ids.len()];
        for pair in &self.incompatibility {
            let (Some(&a), Some(&b)) = (position.get(pair.first()), position.get(pair.second()))
            else {
                continue;
            };
            if defeats(self, pair.first(), pair.second()) {
                attackers[b].push(a);
            }
            if defeats(self, pair.second(), pair.first()) {
                attackers[a].push(b);
            }
        }
        Indexed { ids, attackers }
    }
}

pub fn build_framework(report: &IncompatibilityReport, worth: &WorthMap) -> GoalFramework {
    GoalFramework::from_goal_sets(report.sets.iter().map(|s| s.goals()), worth)
}

/// `g_i` defeats `g_j` when they are incompatible and `g_i` is at least as
/// valuable.
pub fn defeats(gf: &GoalFramework, g_i: &GoalId, g_j: &GoalId) -> bool {
    if !gf.incompatible(g_i, g_j) {
        return false;
    }
    match (gf.worth(g_i), gf.worth(g_j)) {
        (Some(a), Some(b)) => a >= b,
        _ => false,
    }
}

pub fn is_conflict_free(gf: &GoalFramework, e: &Extension) -> bool {
    e.members()
        .iter()
        .all(|a| e.members().iter().all(|b| !defeats(gf, a, b)))
}

/// Every defeater of `g` is itself defeated by a member of `e`.
pub fn defends(gf: &GoalFramework, e: &Extension, g: &GoalId) -> bool {
    gf.defeaters(g)
        .all(|attacker| e.members().iter().any(|k| defeats(gf, k, attacker)))
}

struct Indexed {
    ids: Vec<GoalId>,
    attackers: Vec<Vec<usize>>,
}

impl Indexed {
    fn extension(&self, included: impl Fn(usize) -> bool) -> Extension {
        self.ids
            .iter()
            .enumerate()
            .filter(|(i, _)| included(*i))
            .map(|(_, g)| g.clone())
            .collect()
    }

    fn grounded(&self) -> Vec<bool> {
        let mut current = vec![false; self.ids.len()];
        loop {
            let next: Vec<bool> = self
                .attackers
                .iter()
                .map(|attackers| {
                    attackers
                        .iter()
                        .all(|&a| self.attackers[a].iter().any(|&k| current[k]))
                })
                .collect();
            if next == current {
                return current;
            }
            current = next;
        }
    }
}

/// Least fixpoint of the defence function, starting from the empty set.
pub fn grounded_extension(gf: &GoalFramework) -> Extension {
    let indexed = gf.indexed();
    let grounded = indexed.grounded();
    indexed.extension(|i| grounded[i])
}

/// All inclusion-maximal admissible sets, in canonical order.
///
/// Goals in the grounded extension belong to every preferred extension and
/// goals it defeats to none, so only the remaining goals are searched.
pub fn preferred_extensions(gf: &GoalFramework, cap: usize) -> Result<Vec<Extension>, ArgueError> {
    let cap = cap.min(MAX_ENUMERATION_CAP);
    if gf.goals.len() > cap {
        return Err(ArgueError::FrameworkTooLarge {
            goals: gf.goals.len(),
            cap,
        });
    }
    let indexed = gf.indexed();
    let n = indexed.ids.len();
    let attackers: Vec<u64> = indexed
        .attackers
        .iter()
        .map(|list| list.iter().fold(0u64, |m, &a| m | (1 << a)))
        .collect();
    let mut attacks = vec![0u64; n];
    for (target, mask) in attackers.iter().enumerate() {
        for (source, row) in attacks.iter_mut().enumerate() {
            if mask & (1 << source) != 0 {
                *row |= 1 << target;
            }
        }
    }

    let grounded = indexed.grounded();
    let base: u64 = (0..n).filter(|&i| grounded[i]).fold(0, |m, i| m | (1 << i));
    let out: u64 = (0..n)
        .filter(|&i| base & (1 << i) != 0)
        .fold(0, |m, i| m | attacks[i]);
    let undecided: Vec<usize> = (0..n).filter(|&i| (base | out) & (1 << i) == 0).collect();

    let search = Search {
        attackers: &attackers,
        attacks: &attacks,
        undecided: &undecided,
    };
    let mut admissible = Vec::new();
    search.walk(0, base, &mut admissible);

    admissible.sort_by_key(|m: &u64| std::cmp::Reverse(m.count_ones()));
    let mut maximal: Vec<u64> = Vec::new();
    for mask in admissible {
        if maximal.iter().all(|&m| mask & !m != 0) {
            maximal.push(mask);
        }
    }
    let mut extensions: Vec<Extension> = maximal
        .into_iter()
        .map(|mask| indexed.extension(|i| mask & (1 << i) != 0))
        .collect();
    extensions.sort();
    Ok(extensions)
}

struct Search<'a> {
    attackers: &'a [u64],
    attacks: &'a [u64],
    undecided: &'a [usize],
}

impl Search<'_> {
    fn walk(&self, depth: usize, set: u64, found: &mut Vec<u64>) {
        if depth == self.undecided.len() {
            if self.admissible(set) {
                found.push(set);
            }
            return;
        }
        let goal = self.undecided[depth];
        let bit = 1u64 << goal;
        let with = set | bit;
        if self.attacks[goal] & with == 0 && self.attackers[goal] & with == 0 {
            self.walk(depth + 1, with, found);
        }
        self.walk(depth + 1, set, found);
    }

    fn admissible(&self, set: u64) -> bool {
        let mut defeated = 0u64;
        let mut rest = set;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            defeated |= self.attacks[i];
            rest &= rest - 1;
        }
        let mut rest = set;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if self.attackers[i] & !defeated != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    Grounded,
    Preferred,
    /// Grounded when non-empty, preferred otherwise.
    Auto,
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grounded" => Ok(Semantics::Grounded),
            "preferred" => Ok(Semantics::Preferred),
            "auto" => Ok(Semantics::Auto),
            other => Err(format!(
                "unknown semantics `{other}` (expected grounded, preferred or auto)"
            )),
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Grounded => "grounded",
            Semantics::Preferred => "preferred",
            Semantics::Auto => "auto",
        })
    }
}

/// Extensions whose members are the acceptable goals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acceptable {
    /// Semantics actually applied (never `Auto`).
    pub semantics: Semantics,
    pub extensions: Vec<Extension>,
}

pub fn acceptable_goals(
    gf: &GoalFramework,
    semantics: Semantics,
    cap: usize,
) -> Result<Acceptable, ArgueError> {
    let grounded = || Acceptable {
        semantics: Semantics::Grounded,
        extensions: vec![grounded_extension(gf)],
    };
    let preferred = || -> Result<Acceptable, ArgueError> {
        Ok(Acceptable {
            semantics: Semantics::Preferred,
            extensions: preferred_extensions(gf, cap)?,
        })
    };
    match semantics {
        Semantics::Grounded => Ok(grounded()),
        Semantics::Preferred => preferred(),
        Semantics::Auto => {
            let g = grounded();
            if g.extensions[0].is_empty() {
                preferred()
            } else {
                Ok(g)
            }
        }
    }
}

/// Picks one extension: the one whose member worths, sorted in descending
/// order, are lexicographically greatest (a longer vector wins on a shared
/// prefix); remaining ties go to the lexicographically smallest id list.
/// Only worth comparisons are used, so any strictly increasing rescaling of
/// worths picks the same extension.
pub fn choose_extension<'a>(
    extensions: &'a [Extension],
    worth: &WorthMap,
) -> Option<&'a Extension> {
    let profile = |e: &Extension| {
        let mut values: Vec<Worth> = e
            .members()
            .iter()
            .filter_map(|g| worth.get(g).copied())
            .collect();
        values.sort_by(|a, b| b.cmp(a));
        values
    };
    extensions.iter().reduce(
        |best, candidate| match profile(candidate).cmp(&profile(best)) {
            std::cmp::Ordering::Greater => candidate,
            std::cmp::Ordering::Less => best,
            std::cmp::Ordering::Equal => best.min(candidate),
        },
    )
}
