//! A discrete active-inference engine and experiment harness for foraging
//! agents that must manage a renewable food resource.
//!
//! Agents carry a generative model (likelihood A, transitions B, preferences
//! C, priors D) over two hidden factors, food and satiety. Each step they
//! infer hidden levels from noisy observations, score candidate policies by
//! expected free energy (risk plus ambiguity), and act; optionally they
//! learn their transition tables online from experienced transitions. The
//! [`harness`] module packages the full experiment grid — a static
//! world, corrupted models, a dynamic depleting/replenishing world with and
//! without learning, and rate/preference/horizon variants — behind seeded,
//! byte-reproducible batch runs with CSV and SVG emitters.
//!
//! ```
//! use forager::harness::{find_scenario, run_episode};
//!
//! let scenario = find_scenario("case1").unwrap();
//! let model = scenario.agent_base_model().unwrap();
//! let (record, _) = run_episode(&scenario, model, 1).unwrap();
//! assert_eq!(record.survival_time, 10);
//! ```

pub mod dist;
pub mod env;
pub mod error;
pub mod harness;
pub mod inference;
pub mod learning;
pub mod model;

pub use dist::{Categorical, CondTable, SeededRng};
pub use error::{Error, Result};
pub use inference::{ActionMode, BeliefState, PolicyPosterior};
pub use learning::{InitMode, LearningConfig};
pub use model::{CaseKind, Corruption, GenerativeModel, Policy, PolicyRestriction};

// Every fenced Rust block in the guide runs as a doctest, keeping the book
// and the crate in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/generative-models.md")]
    mod generative_models {}
    #[doc = include_str!("../../../book/src/perception-and-planning.md")]
    mod perception_and_planning {}
    #[doc = include_str!("../../../book/src/learning.md")]
    mod learning {}
    #[doc = include_str!("../../../book/src/environments.md")]
    mod environments {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
