//! Tabular reinforcement learning for Markov decision processes with peak
//! (per-step hard) constraints.
//!
//! The constrained problem is turned into an unconstrained one by replacing
//! every reward sample with a clipped Lagrangian value: the raw reward when
//! all constraint samples are nonnegative, and a fixed negative bound
//! otherwise (see [`transform`]). Ordinary asynchronous Q-learning
//! (discounted) and RVI Q-learning (average reward) then run on that scalar
//! without storing any constraint table ([`learners`]).
//!
//! Everything the learners produce can be checked against exact solvers in
//! [`oracle`]: value iteration restricted to the feasible action sets,
//! value iteration on the transformed reward, and brute-force enumeration of
//! deterministic policies.
//!
//! ```
//! use peakrl::prelude::*;
//!
//! let params = RandomParams::new(4, 3, 2).with_gamma(0.9);
//! let inst = random_instance(&params, FeasibilityMode::GuaranteedFeasible, 7).unwrap();
//! let report = equivalence_audit(&inst, Mode::Discounted, 1e-6).unwrap();
//! assert!(report.passed);
//! ```

pub mod envs;
mod error;
pub mod experiment;
pub mod learners;
pub mod mdp;
pub mod oracle;
pub mod transform;

pub use error::{Error, Result};

/// Random stream used by every simulation in the crate.
///
/// ChaCha8 is portable across platforms, which keeps seeded runs
/// bit-reproducible.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}

pub mod prelude {
    pub use crate::envs::{
        compile_search_engine, compile_wireless, random_instance, ConstrainedEnv, EnvSpec,
        FeasibilityMode, InstanceEnv, RandomParams, SearchEngineEnvSpec, WirelessEnvSpec,
    };
    pub use crate::learners::{
        greedy_policy, q_update_discounted, run_learning, rvi_update_average, AverageSchedule,
        DiscountedSchedule, ExplorationPolicy, Learner, LearnerConfig, QTable, RviFunctional,
        TableFunctional,
    };
    pub use crate::mdp::{
        check_recurrent_state, check_unichain, sample_transition, shift_reward, MdpInstance, Mode,
        StochasticPolicy, VisitCounter,
    };
    pub use crate::oracle::{
        brute_force_policy_search, constrained_value_iteration, equivalence_audit,
        feasibility_check, restricted_action_sets, transformed_relative_value_iteration,
        transformed_value_iteration, FeasibilityStatus,
    };
    pub use crate::transform::{clip_bound, transform_sample, transform_table, ClipBound};
    pub use crate::{seeded_rng, Error, Result, SimRng};
}
