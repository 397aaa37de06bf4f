//! Goal-conflict resolution for resource-bounded agents.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`feasibility::eval_resources`] keeps the goals the agent could afford
//!    on their own (the *enabled* goals).
//! 2. [`detect::resource_incom`] groups enabled goals per resource and keeps
//!    the groups that overload it, classifying the family as simple (every
//!    goal conflicts over one resource) or complex.
//! 3. A strategy picks the consistent goals: the greedy
//!    [`resolve::eval_simple`] / [`resolve::eval_complex`] pair, or
//!    grounded/preferred semantics over the incompatible-goals framework in
//!    [`argue`].
//!
//! [`oracle`] holds brute-force reference computations used to check all of
//! the above on small instances, and [`pipeline`] composes the stages into
//! the versioned document printed by the `goal-arbiter` CLI.
//!
//! ```
//! use goal_arbiter_core::{parse_spec, pipeline::{solve_document, SolveOptions}};
//!
//! let spec = parse_spec(r#"{
//!     "resources": [{"id": "fuel", "amount": 10}, {"id": "time", "amount": 10}],
//!     "goals": [
//!         {"id": "a", "worth": 0.9, "requires": [{"id": "time", "amount": 8}]},
//!         {"id": "b", "worth": 0.8, "requires": [{"id": "fuel", "amount": 6}, {"id": "time", "amount": 5}]},
//!         {"id": "c", "worth": 0.7, "requires": [{"id": "fuel", "amount": 6}]}
//!     ]
//! }"#).unwrap();
//! // b conflicts over both resources; once a takes the time, b is dropped and c gets the fuel.
//! let doc = solve_document(&spec, &SolveOptions::default()).unwrap();
//! let kept: Vec<_> = doc.resolution.unwrap().consistent_goals.into_iter().map(|g| g.to_string()).collect();
//! assert_eq!(kept, ["a", "c"]);
//! ```

pub mod argue;
pub mod detect;
pub mod dot;
pub mod feasibility;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod resolve;
pub mod synth;

pub use argue::{Extension, GoalFramework, Semantics};
pub use detect::{ConflictSet, IncompatibilityKind, IncompatibilityReport};
pub use feasibility::EnabledGoals;
pub use model::{
    parse_spec, validate_spec, AgentSpec, GoalId, PlanId, Quantity, ResourceId, SpecError, Worth,
    WorthMap,
};
pub use resolve::{Resolution, TieBreak};
