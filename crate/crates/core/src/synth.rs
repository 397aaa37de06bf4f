//! Seeded random agent specs for property tests and benchmarks.

use rand::Rng;

use crate::model::{
    validate_spec, AgentSpec, Amount, AmountEntry, GoalEntry, PlanEntry, SpecDocument,
};

#[derive(Clone, Copy, Debug)]
pub struct SynthParams {
    pub max_goals: usize,
    pub max_resources: usize,
    /// Amounts are integers in `0..=max_amount` (requirements start at 1).
    pub max_amount: u64,
    /// Worths are drawn from `{0, 1/levels, ..., 1}`, so ties occur.
    pub worth_levels: u32,
    /// Probability that a goal is served by declared plans instead of inline
    /// requirements.
    pub plan_probability: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            max_goals: 6,
            max_resources: 4,
            max_amount: 100,
            worth_levels: 10,
            plan_probability: 0.2,
        }
    }
}

fn requirements(rng: &mut impl Rng, params: &SynthParams, resources: usize) -> Vec<AmountEntry> {
    let mut list = Vec::new();
    for r in 0..resources {
        if rng.gen_bool(0.5) {
            list.push(AmountEntry {
                id: format!("r{r}"),
                amount: Amount(rng.gen_range(1..=params.max_amount.max(1)).into()),
            });
        }
    }
    list
}

pub fn random_document(rng: &mut impl Rng, params: &SynthParams) -> SpecDocument {
    let goals = rng.gen_range(0..=params.max_goals);
    let resources = rng.gen_range(1..=params.max_resources.max(1));
    let mut doc = SpecDocument {
        resources: (0..resources)
            .map(|r| AmountEntry {
                id: format!("r{r}"),
                amount: Amount(rng.gen_range(0..=params.max_amount).into()),
            })
            .collect(),
        beliefs: (0..2)
            .filter(|_| rng.gen_bool(0.5))
            .map(|b| format!("b{b}"))
            .collect(),
        ..SpecDocument::default()
    };
    for g in 0..goals {
        let id = format!("g{g}");
        let worth = f64::from(rng.gen_range(0..=params.worth_levels))
            / f64::from(params.worth_levels.max(1));
        if rng.gen_bool(params.plan_probability) {
            for (p, context) in ["b0", "~b1"].iter().enumerate() {
                doc.plans.push(PlanEntry {
                    id: format!("{id}_p{p}"),
                    goal: id.clone(),
                    context: vec![(*context).to_owned()],
                    body: String::new(),
                    requires: requirements(rng, params, resources),
                });
            }
            doc.goals.push(GoalEntry {
                id,
                worth,
                requires: None,
            });
        } else {
            let requires = Some(requirements(rng, params, resources));
            doc.goals.push(GoalEntry {
                id,
                worth,
                requires,
            });
        }
    }
    doc
}

pub fn random_spec(rng: &mut impl Rng, params: &SynthParams) -> AgentSpec {
    validate_spec(&random_document(rng, params)).expect("generated documents are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generation_is_seeded() {
        let params = SynthParams::default();
        let a = random_spec(&mut ChaCha8Rng::seed_from_u64(5), &params);
        let b = random_spec(&mut ChaCha8Rng::seed_from_u64(5), &params);
        assert_eq!(a, b);
        for seed in 0..200 {
            let spec = random_spec(&mut ChaCha8Rng::seed_from_u64(seed), &params);
            assert!(spec.goals.len() <= 6 && spec.resources.len() <= 4);
        }
    }
}
