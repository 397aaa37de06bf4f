use std::collections::{BTreeMap, BTreeSet};

use goal_arbiter_core::argue::{
    defeats, defends, grounded_extension, is_conflict_free, preferred_extensions, Extension,
    GoalFramework,
};
use goal_arbiter_core::detect::{classify, resource_incom, IncompatibilityKind};
use goal_arbiter_core::feasibility::{eval_resources, Exclusion};
use goal_arbiter_core::model::{validate_spec, Amount, SpecDocument};
use goal_arbiter_core::oracle::{
    conflict_sets_by_enumeration, enumerate_feasible, semantics_by_definition, total_worth,
};
use goal_arbiter_core::pipeline::Analysis;
use goal_arbiter_core::resolve::{
    eval_complex, eval_simple, solve_algorithmic, solve_argumentation, Precedence, TieBreak,
};
use goal_arbiter_core::synth::{random_document, SynthParams};
use goal_arbiter_core::{parse_spec, AgentSpec, GoalId, Quantity, Semantics, Worth, WorthMap};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn document(seed: u64) -> SpecDocument {
    random_document(
        &mut ChaCha8Rng::seed_from_u64(seed),
        &SynthParams::default(),
    )
}

fn spec(seed: u64) -> AgentSpec {
    validate_spec(&document(seed)).unwrap()
}

fn gid(i: usize) -> GoalId {
    GoalId::new(format!("g{i}")).unwrap()
}

/// Random framework over up to 7 goals: a family of goal sets plus worths on
/// a 5-level grid (ties are common).
fn framework() -> impl Strategy<Value = GoalFramework> {
    (
        prop::collection::vec(prop::collection::btree_set(0..7usize, 2..=4), 0..5),
        prop::collection::vec(0..5u8, 7),
    )
        .prop_map(|(sets, levels)| {
            let worth: WorthMap = levels
                .iter()
                .enumerate()
                .map(|(i, l)| (gid(i), Worth::new(f64::from(*l) / 4.0).unwrap()))
                .collect();
            let sets: Vec<BTreeSet<GoalId>> = sets
                .iter()
                .map(|s| s.iter().map(|&i| gid(i)).collect())
                .collect();
            GoalFramework::from_goal_sets(&sets, &worth)
        })
}

fn with_worths(spec: &AgentSpec, f: impl Fn(f64) -> f64) -> AgentSpec {
    let mut doc = spec.to_document();
    for g in &mut doc.goals {
        g.worth = f(g.worth);
    }
    validate_spec(&doc).unwrap()
}

fn consumption(spec: &AgentSpec, analysis: &Analysis<'_>, goals: &BTreeSet<GoalId>) -> bool {
    spec.resources.iter().all(|(res, available)| {
        let total: Quantity = goals
            .iter()
            .map(|g| analysis.enabled.needs.need(g, res))
            .sum();
        total <= available
    })
}

/// Specs whose conflicts are guaranteed simple: each group of 2..=4 goals
/// overloads its own resource, and every goal also draws on a shared
/// resource that is never overloaded.
fn simple_spec() -> impl Strategy<Value = AgentSpec> {
    let group = (
        prop::collection::vec((1u32..=50, 0..=10u8), 2..=4),
        0u32..=1000,
    );
    prop::collection::vec(group, 1..=3).prop_map(|groups| {
        let mut resources = vec![serde_json::json!({"id": "shared", "amount": 1000})];
        let mut goals = Vec::new();
        for (r, (members, spread)) in groups.iter().enumerate() {
            let needs: Vec<u32> = members.iter().map(|(n, _)| *n).collect();
            let max = *needs.iter().max().unwrap();
            let sum: u32 = needs.iter().sum();
            let amount = max + (sum - max - 1) * spread / 1000;
            resources.push(serde_json::json!({"id": format!("r{r}"), "amount": amount}));
            for (i, (need, level)) in members.iter().enumerate() {
                goals.push(serde_json::json!({
                    "id": format!("g{r}_{i}"),
                    "worth": f64::from(*level) / 10.0,
                    "requires": [{"id": format!("r{r}"), "amount": need}, {"id": "shared", "amount": 1}],
                }));
            }
        }
        let doc = serde_json::json!({"resources": resources, "goals": goals});
        parse_spec(&doc.to_string()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn validation_is_idempotent(seed in any::<u64>()) {
        let spec = spec(seed);
        prop_assert_eq!(validate_spec(&spec.to_document()).unwrap(), spec);
    }

    #[test]
    fn exclusions_are_justified(seed in any::<u64>()) {
        let spec = spec(seed);
        let enabled = eval_resources(&spec);
        let all: BTreeSet<_> = spec.goals.keys().cloned().collect();
        let mut union = enabled.goals.clone();
        union.extend(enabled.excluded.keys().cloned());
        prop_assert_eq!(union, all);
        for (g, why) in &enabled.excluded {
            prop_assert!(!enabled.goals.contains(g));
            if let Exclusion::Insufficient { shortfalls } = why {
                prop_assert!(!shortfalls.is_empty());
                prop_assert!(shortfalls.iter().all(|s| s.needed > s.available));
            }
        }
    }

    #[test]
    fn more_resources_never_disable_goals(seed in any::<u64>(), extra in 1u64..50) {
        let spec = spec(seed);
        let mut doc = spec.to_document();
        for r in &mut doc.resources {
            r.amount = Amount(r.amount.0 + rust_decimal::Decimal::from(extra));
        }
        let richer = validate_spec(&doc).unwrap();
        prop_assert!(eval_resources(&spec).goals.is_subset(&eval_resources(&richer).goals));
    }

    #[test]
    fn enabling_is_independent_of_other_goals(seed in any::<u64>(), drop in 0usize..6) {
        let spec = spec(seed);
        let mut doc = spec.to_document();
        if drop < doc.goals.len() {
            let removed = doc.goals.remove(drop).id;
            doc.plans.retain(|p| p.goal != removed);
        }
        let smaller = validate_spec(&doc).unwrap();
        let full = eval_resources(&spec);
        let part = eval_resources(&smaller);
        for g in smaller.goals.keys() {
            prop_assert_eq!(full.goals.contains(g), part.goals.contains(g));
        }
    }

    #[test]
    fn detection_matches_enumeration(seed in any::<u64>()) {
        let spec = spec(seed);
        let enabled = eval_resources(&spec);
        let report = resource_incom(&spec, &enabled);
        let expected = conflict_sets_by_enumeration(&spec, &enabled).unwrap();
        let actual: BTreeMap<_, _> = report.sets.iter().map(|s| (s.resource().clone(), s.goals().clone())).collect();
        prop_assert_eq!(actual, expected);
        for set in &report.sets {
            prop_assert!(set.goals().len() >= 2 && set.total_need() > set.available());
        }
    }

    #[test]
    fn classification_by_multiplicity(seed in any::<u64>()) {
        let spec = spec(seed);
        let report = resource_incom(&spec, &eval_resources(&spec));
        let mut counts: BTreeMap<&GoalId, usize> = BTreeMap::new();
        for s in &report.sets {
            for g in s.goals() {
                *counts.entry(g).or_default() += 1;
            }
        }
        let expected = match counts.values().max() {
            None => IncompatibilityKind::None,
            Some(1) => IncompatibilityKind::Simple,
            Some(_) => IncompatibilityKind::Complex,
        };
        prop_assert_eq!(report.kind, expected);
        prop_assert_eq!(classify(report.sets.iter().map(|s| s.goals())), expected);
        let union: BTreeSet<_> = report.sets.iter().flat_map(|s| s.goals().iter().cloned()).collect();
        prop_assert_eq!(&report.incompatible_goals, &union);
    }

    #[test]
    fn defeat_is_asymmetric_under_strict_worth(gf in framework()) {
        for pair in &gf.incompatibility {
            let (a, b) = (pair.first(), pair.second());
            let forward = defeats(&gf, a, b);
            let backward = defeats(&gf, b, a);
            if gf.worth[a] != gf.worth[b] {
                prop_assert!(forward != backward);
            } else {
                prop_assert!(forward && backward);
            }
        }
    }

    #[test]
    fn grounded_and_preferred_are_dung_extensions(gf in framework()) {
        let grounded = grounded_extension(&gf);
        let preferred = preferred_extensions(&gf, 25).unwrap();
        prop_assert!(is_conflict_free(&gf, &grounded));
        let defended: BTreeSet<_> = gf.goals.iter().filter(|g| defends(&gf, &grounded, g)).cloned().collect();
        prop_assert_eq!(&defended, grounded.members());
        prop_assert!(!preferred.is_empty());
        for p in &preferred {
            prop_assert!(is_conflict_free(&gf, p));
            prop_assert!(p.members().iter().all(|g| defends(&gf, p, g)));
            prop_assert!(grounded.members().is_subset(p.members()));
            for q in &preferred {
                prop_assert!(p == q || !p.members().is_subset(q.members()));
            }
        }
    }

    #[test]
    fn semantics_match_definitions(gf in framework()) {
        let oracle = semantics_by_definition(&gf).unwrap();
        prop_assert_eq!(grounded_extension(&gf).into_members(), oracle.grounded);
        let preferred: Vec<BTreeSet<GoalId>> =
            preferred_extensions(&gf, 25).unwrap().into_iter().map(Extension::into_members).collect();
        prop_assert_eq!(preferred, oracle.preferred);
    }

    #[test]
    fn strict_local_maximum_is_grounded(gf in framework()) {
        let grounded = grounded_extension(&gf);
        for g in &gf.goals {
            let dominant = gf
                .goals
                .iter()
                .filter(|h| gf.incompatible(g, h))
                .all(|h| gf.worth[g] > gf.worth[h]);
            if dominant {
                prop_assert!(grounded.contains(g));
            }
        }
    }

    #[test]
    fn resolutions_never_overconsume(seed in any::<u64>(), tiebreak in prop_oneof![Just(TieBreak::ById), any::<u64>().prop_map(TieBreak::Seeded)]) {
        let spec = spec(seed);
        let analysis = Analysis::new(&spec);
        let algorithmic = solve_algorithmic(&analysis.instance(), tiebreak);
        let argued = solve_argumentation(&analysis.instance(), Semantics::Auto, 25).unwrap();
        for res in [&algorithmic, &argued] {
            prop_assert!(res.consistent_goals.is_subset(&analysis.enabled.goals));
            prop_assert!(consumption(&spec, &analysis, &res.consistent_goals));
        }
        let feasible = enumerate_feasible(&spec, &analysis.enabled).unwrap();
        prop_assert!(feasible.feasible.contains(&algorithmic.consistent_goals));
        prop_assert!(total_worth(&spec, &algorithmic.consistent_goals) <= feasible.best_total);
    }

    #[test]
    fn simple_reports_keep_each_sets_best(spec in simple_spec()) {
        let analysis = Analysis::new(&spec);
        prop_assert_eq!(analysis.report.kind, IncompatibilityKind::Simple);
        let instance = analysis.instance();
        let simple = eval_simple(&instance, TieBreak::ById).unwrap();
        let complex = eval_complex(&instance, TieBreak::ById);
        let precedence = Precedence::new(&analysis.worth, TieBreak::ById);
        let mut residual_fits = false;
        for set in &analysis.report.sets {
            let best = precedence.most_valuable(set.goals()).unwrap();
            let kept: Vec<_> = set.goals().iter().filter(|g| simple.consistent_goals.contains(*g)).collect();
            prop_assert_eq!(kept, vec![best]);
            let left = set.available().saturating_sub(analysis.enabled.needs.need(best, set.resource()));
            residual_fits |= set
                .goals()
                .iter()
                .any(|g| g != best && analysis.enabled.needs.need(g, set.resource()) <= left);
        }
        prop_assert!(simple.consistent_goals.is_subset(&complex.consistent_goals));
        if !residual_fits {
            prop_assert_eq!(&simple.consistent_goals, &complex.consistent_goals);
        }
    }

    #[test]
    fn dominant_goals_survive_the_greedy_pass(seed in any::<u64>()) {
        let spec = spec(seed);
        let analysis = Analysis::new(&spec);
        let res = solve_algorithmic(&analysis.instance(), TieBreak::ById);
        for g in &analysis.report.incompatible_goals {
            let partners: BTreeSet<&GoalId> = analysis
                .report
                .sets
                .iter()
                .filter(|s| s.goals().contains(g))
                .flat_map(|s| s.goals())
                .filter(|h| *h != g)
                .collect();
            if partners.iter().all(|h| analysis.worth[g] > analysis.worth[*h]) {
                prop_assert!(res.consistent_goals.contains(g), "{} dropped", g);
            }
        }
    }

    #[test]
    fn rescaling_worth_changes_nothing(seed in any::<u64>()) {
        let spec = spec(seed);
        let rescaled = with_worths(&spec, |x| (x + 1.0) / 2.0);
        let squared = with_worths(&spec, |x| x * x);
        for other in [&rescaled, &squared] {
            let a = Analysis::new(&spec);
            let b = Analysis::new(other);
            prop_assert_eq!(
                solve_algorithmic(&a.instance(), TieBreak::ById).consistent_goals,
                solve_algorithmic(&b.instance(), TieBreak::ById).consistent_goals
            );
            for semantics in [Semantics::Grounded, Semantics::Preferred, Semantics::Auto] {
                prop_assert_eq!(
                    solve_argumentation(&a.instance(), semantics, 25).unwrap().consistent_goals,
                    solve_argumentation(&b.instance(), semantics, 25).unwrap().consistent_goals
                );
            }
        }
    }

    #[test]
    fn feasible_report_is_well_formed(seed in any::<u64>()) {
        let spec = spec(seed);
        let report = enumerate_feasible(&spec, &eval_resources(&spec)).unwrap();
        let feasible: BTreeSet<_> = report.feasible.iter().cloned().collect();
        for s in &report.best_worth {
            prop_assert!(report.maximal.contains(s));
        }
        for s in &report.feasible {
            prop_assert!(total_worth(&spec, s) <= report.best_total);
        }
        for s in &report.maximal {
            prop_assert!(feasible.contains(s));
        }
        for s in &report.feasible {
            for g in s {
                let mut smaller = s.clone();
                smaller.remove(g);
                prop_assert!(feasible.contains(&smaller));
            }
        }
    }
}

#[test]
fn seeded_resolution_is_deterministic() {
    for seed in 0..64 {
        let spec = spec(seed);
        let analysis = Analysis::new(&spec);
        let first = solve_algorithmic(&analysis.instance(), TieBreak::Seeded(seed));
        let second = solve_algorithmic(&Analysis::new(&spec).instance(), TieBreak::Seeded(seed));
        assert_eq!(first, second);
    }
}
