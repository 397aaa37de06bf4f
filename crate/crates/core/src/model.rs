//! Declarative agent state: resources, beliefs, goals with worth, and the
//! plan library, plus validation of the JSON spec document into a canonical
//! [`AgentSpec`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            /// Returns `None` unless `name` is a valid identifier.
            pub fn new(name: impl Into<String>) -> Option<Self> {
                let name = name.into();
                is_identifier(&name).then_some(Self(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl FromStr for $name {
            type Err = ValidationError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s).ok_or_else(|| ValidationError::InvalidIdentifier {
                    what: stringify!($name),
                    value: s.to_owned(),
                })
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

identifier!(
    /// Case-sensitive resource name, e.g. `energy`.
    ResourceId
);
identifier!(
    /// Goal identifier, unique within an [`AgentSpec`].
    GoalId
);
identifier!(
    /// Plan identifier, unique within an [`AgentSpec`].
    PlanId
);

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c.is_control())
}

/// Non-negative, exact decimal amount of a resource.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quantity(Decimal);

impl Quantity {
    pub const ZERO: Quantity = Quantity(Decimal::ZERO);

    pub fn new(value: Decimal) -> Option<Self> {
        (value >= Decimal::ZERO).then_some(Self(value.normalize()))
    }

    pub fn from_int(value: u64) -> Self {
        Self(Decimal::from(value))
    }

    pub fn value(self) -> Decimal {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(self, other: Quantity) -> Option<Quantity> {
        self.0.checked_add(other.0).map(Quantity)
    }

    /// Subtraction clamped at zero.
    pub fn saturating_sub(self, other: Quantity) -> Quantity {
        if other.0 >= self.0 {
            Quantity::ZERO
        } else {
            Quantity((self.0 - other.0).normalize())
        }
    }
}

impl std::iter::Sum for Quantity {
    fn sum<I: Iterator<Item = Quantity>>(iter: I) -> Self {
        Quantity(iter.map(|q| q.0).sum::<Decimal>().normalize())
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.normalize())
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Amount(self.0).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let Amount(value) = Amount::deserialize(deserializer)?;
        Quantity::new(value).ok_or_else(|| serde::de::Error::custom("negative quantity"))
    }
}

/// A signed decimal amount exactly as written in a JSON document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Amount(pub Decimal);

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let number = serde_json::Number::from_str(&self.0.normalize().to_string())
            .map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let number = serde_json::Number::deserialize(deserializer)?;
        let text = number.to_string();
        let parsed = if text.contains(['e', 'E']) {
            Decimal::from_scientific(&text)
        } else {
            Decimal::from_str_exact(&text)
        };
        parsed
            .map(|d| Amount(d.normalize()))
            .map_err(|e| serde::de::Error::custom(format!("amount {text}: {e}")))
    }
}

/// Value of a goal for the agent, in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Worth(f64);

impl Worth {
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && (0.0..=1.0).contains(&value)).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Eq for Worth {}

impl PartialOrd for Worth {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Worth {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl<'de> Deserialize<'de> for Worth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Worth::new(value).ok_or_else(|| serde::de::Error::custom("worth outside [0, 1]"))
    }
}

impl fmt::Display for Worth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type WorthMap = BTreeMap<GoalId, Worth>;

/// Available quantity per resource (normalised: one entry per resource).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResourceSummary(BTreeMap<ResourceId, Quantity>);

impl ResourceSummary {
    pub fn new(entries: BTreeMap<ResourceId, Quantity>) -> Self {
        Self(entries)
    }

    /// Available quantity of `res`; resources the agent does not hold count as 0.
    pub fn available(&self, res: &ResourceId) -> Quantity {
        self.0.get(res).copied().unwrap_or(Quantity::ZERO)
    }

    pub fn contains(&self, res: &ResourceId) -> bool {
        self.0.contains_key(res)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ResourceId, Quantity)> {
        self.0.iter().map(|(r, q)| (r, *q))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(ResourceId, Quantity)> for ResourceSummary {
    fn from_iter<T: IntoIterator<Item = (ResourceId, Quantity)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Resources a plan needs; every amount is strictly positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequirementList(BTreeMap<ResourceId, Quantity>);

impl RequirementList {
    /// Drops zero entries, so the "strictly positive" invariant holds.
    pub fn new(entries: impl IntoIterator<Item = (ResourceId, Quantity)>) -> Self {
        Self(entries.into_iter().filter(|(_, q)| !q.is_zero()).collect())
    }

    pub fn need(&self, res: &ResourceId) -> Quantity {
        self.0.get(res).copied().unwrap_or(Quantity::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ResourceId, Quantity)> {
        self.0.iter().map(|(r, q)| (r, *q))
    }

    pub fn resources(&self) -> impl Iterator<Item = &ResourceId> {
        self.0.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Set of ground atoms the agent believes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeliefBase(BTreeSet<String>);

impl BeliefBase {
    pub fn holds(&self, atom: &str) -> bool {
        self.0.contains(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

/// A context condition literal: a belief atom, negated with a leading `~`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub atom: String,
    pub negated: bool,
}

impl Literal {
    pub fn parse(text: &str) -> Option<Self> {
        let (negated, atom) = match text.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        is_atom(atom).then(|| Literal {
            atom: atom.to_owned(),
            negated,
        })
    }

    pub fn holds_in(&self, beliefs: &BeliefBase) -> bool {
        beliefs.holds(&self.atom) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("~")?;
        }
        f.write_str(&self.atom)
    }
}

/// `name` or `name(arg, ...)` where name and args are `[A-Za-z0-9_]` words
/// starting with a letter or underscore (args may also be numbers).
fn is_atom(s: &str) -> bool {
    fn is_name(s: &str) -> bool {
        let mut chars = s.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
    fn is_arg(s: &str) -> bool {
        let s = s.trim();
        is_name(s) || (!s.is_empty() && s.parse::<f64>().is_ok())
    }
    match s.find('(') {
        None => is_name(s),
        Some(open) => {
            let Some(args) = s[open + 1..].strip_suffix(')') else {
                return false;
            };
            is_name(&s[..open]) && !args.contains(['(', ')']) && args.split(',').all(is_arg)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Goal {
    pub id: GoalId,
    pub worth: Worth,
    pub inline_requirements: Option<RequirementList>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub id: PlanId,
    /// Goal the plan is relevant for.
    pub goal: GoalId,
    pub context: Vec<Literal>,
    /// Opaque plan body; never interpreted.
    pub body: String,
    pub requires: RequirementList,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationWarning {
    /// A requirement names a resource missing from the summary; it is treated
    /// as available in quantity 0.
    MissingResource {
        resource: ResourceId,
        required_by: String,
    },
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::MissingResource {
                resource,
                required_by,
            } => write!(
                f,
                "resource `{resource}` required by {required_by} is not in the resource summary; treated as 0"
            ),
        }
    }
}

/// A validated agent: every invariant of the spec document holds.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentSpec {
    pub resources: ResourceSummary,
    pub beliefs: BeliefBase,
    pub goals: BTreeMap<GoalId, Goal>,
    /// Plan library in declaration order.
    pub plans: Vec<Plan>,
    pub warnings: Vec<ValidationWarning>,
}

impl AgentSpec {
    pub fn goal(&self, id: &GoalId) -> Option<&Goal> {
        self.goals.get(id)
    }

    pub fn worths(&self) -> WorthMap {
        self.goals
            .values()
            .map(|g| (g.id.clone(), g.worth))
            .collect()
    }

    pub fn plans_for(&self, goal: &GoalId) -> impl Iterator<Item = &Plan> + '_ {
        let goal = goal.clone();
        self.plans.iter().filter(move |p| p.goal == goal)
    }

    /// Canonical document form; `validate_spec(&spec.to_document())` returns
    /// a spec equal to `spec`.
    pub fn to_document(&self) -> SpecDocument {
        fn entries(list: &RequirementList) -> Vec<AmountEntry> {
            list.iter()
                .map(|(id, q)| AmountEntry {
                    id: id.to_string(),
                    amount: Amount(q.value()),
                })
                .collect()
        }
        SpecDocument {
            resources: self
                .resources
                .iter()
                .map(|(id, q)| AmountEntry {
                    id: id.to_string(),
                    amount: Amount(q.value()),
                })
                .collect(),
            beliefs: self.beliefs.iter().map(str::to_owned).collect(),
            goals: self
                .goals
                .values()
                .map(|g| GoalEntry {
                    id: g.id.to_string(),
                    worth: g.worth.value(),
                    requires: g.inline_requirements.as_ref().map(entries),
                })
                .collect(),
            plans: self
                .plans
                .iter()
                .map(|p| PlanEntry {
                    id: p.id.to_string(),
                    goal: p.goal.to_string(),
                    context: p.context.iter().map(Literal::to_string).collect(),
                    body: p.body.clone(),
                    requires: entries(&p.requires),
                })
                .collect(),
        }
    }
}

/// Raw agent spec file, structurally parsed but not yet validated.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default)]
    pub resources: Vec<AmountEntry>,
    #[serde(default)]
    pub beliefs: Vec<String>,
    #[serde(default)]
    pub goals: Vec<GoalEntry>,
    #[serde(default)]
    pub plans: Vec<PlanEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmountEntry {
    pub id: String,
    pub amount: Amount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalEntry {
    pub id: String,
    pub worth: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requires: Option<Vec<AmountEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntry {
    pub id: String,
    pub goal: String,
    #[serde(default)]
    pub context: Vec<String>,
    #[serde(default)]
    pub body: String,
    #[serde(default)]
    pub requires: Vec<AmountEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationError {
    #[error("invalid {what} `{value}`")]
    InvalidIdentifier { what: &'static str, value: String },
    #[error("resource `{resource}` appears more than once in {scope}")]
    DuplicateResource { resource: String, scope: String },
    #[error("negative amount {amount} for `{resource}` in {scope}")]
    NegativeQuantity {
        resource: String,
        scope: String,
        amount: String,
    },
    #[error("requirement for `{resource}` in {scope} must be > 0")]
    ZeroRequirement { resource: String, scope: String },
    #[error("goal `{goal}` has worth {worth}, outside [0, 1]")]
    WorthOutOfRange { goal: String, worth: String },
    #[error("goal `{goal}` is declared more than once")]
    DuplicateGoalId { goal: String },
    #[error("plan `{plan}` is declared more than once")]
    DuplicatePlanId { plan: String },
    #[error("plan `{plan}` refers to undeclared goal `{goal}`")]
    DanglingPlanGoalRef { plan: String, goal: String },
    #[error("goal `{goal}` has no inline requirements and no plan")]
    GoalWithoutRequirements { goal: String },
    #[error("belief `{atom}` is not a ground atom")]
    InvalidBelief { atom: String },
    #[error("plan `{plan}` has malformed context literal `{literal}`")]
    InvalidContextLiteral { plan: String, literal: String },
}

/// Every violation found in a spec document.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed spec document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown goal `{0}`")]
    UnknownGoal(String),
}

/// Parses and validates a JSON agent spec.
pub fn parse_spec(json: &str) -> Result<AgentSpec, SpecError> {
    let document: SpecDocument = serde_json::from_str(json)?;
    Ok(validate_spec(&document)?)
}

/// Checks every invariant of `raw` and returns the canonical spec, or the
/// complete list of violations.
pub fn validate_spec(raw: &SpecDocument) -> Result<AgentSpec, ValidationErrors> {
    let mut errors = Vec::new();

    let resources: ResourceSummary = {
        let mut seen = BTreeMap::new();
        for entry in &raw.resources {
            let Some(id) = check_id::<ResourceId>(&entry.id, &mut errors) else {
                continue;
            };
            if seen.contains_key(&id) {
                errors.push(ValidationError::DuplicateResource {
                    resource: entry.id.clone(),
                    scope: "resources".into(),
                });
                continue;
            }
            match Quantity::new(entry.amount.0) {
                Some(q) => {
                    seen.insert(id, q);
                }
                None => errors.push(ValidationError::NegativeQuantity {
                    resource: entry.id.clone(),
                    scope: "resources".into(),
                    amount: entry.amount.0.to_string(),
                }),
            }
        }
        ResourceSummary(seen)
    };

    let mut beliefs = BTreeSet::new();
    for atom in &raw.beliefs {
        if is_atom(atom) {
            beliefs.insert(atom.clone());
        } else {
            errors.push(ValidationError::InvalidBelief { atom: atom.clone() });
        }
    }

    let mut goals = BTreeMap::new();
    for entry in &raw.goals {
        let id = check_id::<GoalId>(&entry.id, &mut errors);
        let worth = Worth::new(entry.worth);
        if worth.is_none() {
            errors.push(ValidationError::WorthOutOfRange {
                goal: entry.id.clone(),
                worth: entry.worth.to_string(),
            });
        }
        let inline = entry
            .requires
            .as_ref()
            .map(|list| requirement_list(list, &format!("goal `{}`", entry.id), &mut errors));
        let Some(id) = id else { continue };
        if goals.contains_key(&id) {
            errors.push(ValidationError::DuplicateGoalId {
                goal: entry.id.clone(),
            });
            continue;
        }
        if let Some(worth) = worth {
            goals.insert(
                id.clone(),
                Goal {
                    id,
                    worth,
                    inline_requirements: inline,
                },
            );
        }
    }
    let declared_goals: BTreeSet<&str> = raw.goals.iter().map(|g| g.id.as_str()).collect();

    let mut plans = Vec::new();
    let mut plan_ids = BTreeSet::new();
    for entry in &raw.plans {
        let id = check_id::<PlanId>(&entry.id, &mut errors);
        if !plan_ids.insert(entry.id.as_str()) {
            errors.push(ValidationError::DuplicatePlanId {
                plan: entry.id.clone(),
            });
        }
        if !declared_goals.contains(entry.goal.as_str()) {
            errors.push(ValidationError::DanglingPlanGoalRef {
                plan: entry.id.clone(),
                goal: entry.goal.clone(),
            });
        }
        let mut context = Vec::new();
        for text in &entry.context {
            match Literal::parse(text) {
                Some(literal) => context.push(literal),
                None => errors.push(ValidationError::InvalidContextLiteral {
                    plan: entry.id.clone(),
                    literal: text.clone(),
                }),
            }
        }
        let requires = requirement_list(
            &entry.requires,
            &format!("plan `{}`", entry.id),
            &mut errors,
        );
        if let (Some(id), Some(goal)) = (id, GoalId::new(entry.goal.clone())) {
            plans.push(Plan {
                id,
                goal,
                context,
                body: entry.body.clone(),
                requires,
            });
        }
    }

    for entry in &raw.goals {
        let has_plan = raw.plans.iter().any(|p| p.goal == entry.id);
        if entry.requires.is_none() && !has_plan {
            errors.push(ValidationError::GoalWithoutRequirements {
                goal: entry.id.clone(),
            });
        }
    }

    if !errors.is_empty() {
        return Err(ValidationErrors(errors));
    }

    let mut warnings = Vec::new();
    let mut warn_missing = |list: &RequirementList, scope: String| {
        for res in list.resources() {
            if !resources.contains(res) {
                warnings.push(ValidationWarning::MissingResource {
                    resource: res.clone(),
                    required_by: scope.clone(),
                });
            }
        }
    };
    for goal in goals.values() {
        if let Some(list) = &goal.inline_requirements {
            warn_missing(list, format!("goal `{}`", goal.id));
        }
    }
    for plan in &plans {
        warn_missing(&plan.requires, format!("plan `{}`", plan.id));
    }

    Ok(AgentSpec {
        resources,
        beliefs: BeliefBase(beliefs),
        goals,
        plans,
        warnings,
    })
}

fn check_id<T: FromStr<Err = ValidationError>>(
    raw: &str,
    errors: &mut Vec<ValidationError>,
) -> Option<T> {
    raw.parse().map_err(|e| errors.push(e)).ok()
}

fn requirement_list(
    entries: &[AmountEntry],
    scope: &str,
    errors: &mut Vec<ValidationError>,
) -> RequirementList {
    let mut list = BTreeMap::new();
    for entry in entries {
        let Some(id) = check_id::<ResourceId>(&entry.id, errors) else {
            continue;
        };
        if list.contains_key(&id) {
            errors.push(ValidationError::DuplicateResource {
                resource: entry.id.clone(),
                scope: scope.to_owned(),
            });
            continue;
        }
        let amount = entry.amount.0;
        if amount.is_sign_negative() && !amount.is_zero() {
            errors.push(ValidationError::NegativeQuantity {
                resource: entry.id.clone(),
                scope: scope.to_owned(),
                amount: amount.to_string(),
            });
        } else if amount.is_zero() {
            errors.push(ValidationError::ZeroRequirement {
                resource: entry.id.clone(),
                scope: scope.to_owned(),
            });
        } else if let Some(q) = Quantity::new(amount) {
            list.insert(id, q);
        }
    }
    RequirementList(list)
}

/// Declared worth of goal `g`.
pub fn worth_of(spec: &AgentSpec, g: &str) -> Result<Worth, ModelError> {
    spec.goals
        .iter()
        .find(|(id, _)| id.as_str() == g)
        .map(|(_, goal)| goal.worth)
        .ok_or_else(|| ModelError::UnknownGoal(g.to_owned()))
}
