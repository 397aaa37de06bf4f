//! Instances shared by the criterion benchmarks.

use goal_arbiter_core::synth::{random_spec, SynthParams};
use goal_arbiter_core::AgentSpec;
use rand_chacha::rand_core::SeedableRng;

pub use goal_arbiter_core;

/// `count` seeded random specs with up to `goals` goals over `resources` resources.
pub fn corpus(count: usize, goals: usize, resources: usize, seed: u64) -> Vec<AgentSpec> {
    let params = SynthParams {
        max_goals: goals,
        max_resources: resources,
        ..SynthParams::default()
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_spec(&mut rng, &params)).collect()
}
