//! Online transition-model acquisition: random initialization of the
//! transition tables and learning-rate updates from experienced transitions.
//!
//! The update rule is exactly additive-then-renormalize: the experienced
//! target entry of the experienced column gains the learning rate, then that
//! single column is normalized back to the simplex. Nothing else moves.

use serde::{Deserialize, Serialize};

use crate::dist::{self, SeededRng};
use crate::error::{Error, Result};
use crate::inference::BeliefState;
use crate::model::GenerativeModel;

/// How an agent's transition tables start an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// The case's true transition tables.
    Correct,
    /// Every column drawn from a flat Dirichlet.
    RandomDirichlet,
    /// Every column a saturated one-hot on a wrong target.
    Extreme,
}

/// Learning settings carried by a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearningConfig {
    pub enabled: bool,
    pub learning_rate: f64,
    pub init_mode: InitMode,
}

impl Default for LearningConfig {
    fn default() -> Self {
        LearningConfig {
            enabled: false,
            learning_rate: 0.3,
            init_mode: InitMode::Correct,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::Config(format!(
                "learning_rate must be in (0, 1], got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Replace every transition column with a flat-Dirichlet draw, preserving
/// shapes and dependency structure.
pub fn init_random_b(model: &GenerativeModel, rng: &mut SeededRng) -> GenerativeModel {
    let mut out = model.clone();
    for table in &mut out.transition {
        let alphas = vec![1.0; table.num_outcomes()];
        let conds: Vec<Vec<usize>> = table.cond_indices().collect();
        for cond in conds {
            let col =
                dist::dirichlet_sample(rng, &alphas).expect("all-ones concentrations are valid");
            table.set_column(&cond, col.probs());
        }
    }
    out
}

/// Apply the model's configured initialization.
pub fn init_transitions(
    model: &GenerativeModel,
    mode: InitMode,
    rng: &mut SeededRng,
) -> GenerativeModel {
    match mode {
        InitMode::Correct => model.clone(),
        InitMode::RandomDirichlet => init_random_b(model, rng),
        InitMode::Extreme => model.with_extreme_transitions(),
    }
}

/// Reinforce one experienced transition per factor.
///
/// For factor `f` the experienced column is indexed by the previous level,
/// the previous levels of its dependency factors, and the action taken; the
/// entry at the observed next level gains the learning rate and the column
/// is renormalized. Returns the updated model; when learning is disabled the
/// model is returned unchanged.
pub fn update_b(
    model: &GenerativeModel,
    prev_levels: &[usize],
    next_levels: &[usize],
    action: usize,
    cfg: &LearningConfig,
) -> Result<GenerativeModel> {
    if !cfg.enabled {
        return Ok(model.clone());
    }
    cfg.validate()?;
    if prev_levels.len() != model.factors.len() || next_levels.len() != model.factors.len() {
        return Err(Error::Shape(format!(
            "expected {} levels per side, got {} and {}",
            model.factors.len(),
            prev_levels.len(),
            next_levels.len()
        )));
    }
    for (f, spec) in model.factors.iter().enumerate() {
        if prev_levels[f] >= spec.num_levels || next_levels[f] >= spec.num_levels {
            return Err(Error::InvalidInput(format!(
                "level out of range for factor {f}"
            )));
        }
        if action >= spec.num_actions {
            return Err(Error::InvalidInput(format!(
                "action {action} out of range for factor {f}"
            )));
        }
    }

    let mut out = model.clone();
    for (f, spec) in model.factors.iter().enumerate() {
        let mut cond = Vec::with_capacity(spec.dependencies.len() + 2);
        cond.push(prev_levels[f]);
        for &d in &spec.dependencies {
            cond.push(prev_levels[d]);
        }
        cond.push(action);
        let mut column = out.transition[f].column(&cond);
        column[next_levels[f]] += cfg.learning_rate;
        let sum: f64 = column.iter().sum();
        for v in &mut column {
            *v /= sum;
        }
        out.transition[f].set_column(&cond, &column);
    }
    Ok(out)
}

/// The discrete transition an agent notes from its beliefs: the per-factor
/// most likely levels before and after the step (ties toward lower index).
pub fn experienced_transition(
    prev_belief: &BeliefState,
    next_belief: &BeliefState,
) -> (Vec<usize>, Vec<usize>) {
    (prev_belief.map_levels(), next_belief.map_levels())
}
