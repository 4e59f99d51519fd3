//! Online learners that see only reward and constraint samples.

mod agent;
mod exploration;
mod functional;
mod qtable;
mod schedule;
mod update;

pub use agent::{run_learning, Footprint, LearnOutcome, Learner, LearnerConfig, StepRecord};
pub use exploration::{EpsilonDecay, ExplorationPolicy};
pub use functional::{
    validate_functional, FunctionalCondition, FunctionalCounterexample, FunctionalReport,
    RviFunctional, TableFunctional, LIPSCHITZ_CEILING,
};
pub use qtable::QTable;
pub use schedule::{
    validate_schedule, AverageSchedule, ConditionVerdict, DiscountedSchedule, ScheduleFamily,
    ScheduleReport,
};
pub use update::{greedy_policy, q_update_discounted, rvi_increment, rvi_update_average};

/// Tie tolerance used when extracting greedy policies.
pub const TIE_TOLERANCE: f64 = 1e-9;
