//! The agent's perception-action cycle: posterior state inference,
//! expected-free-energy policy scoring, and action selection.
//!
//! Because every modality observes exactly one factor, a single mean-field
//! pass is exact for perception. For prediction, factors with dependencies
//! marginalize the dependency factor's distribution at the source step
//! (mean-field product closure), mirroring the factorized transition tables.

use serde::{Deserialize, Serialize};

use crate::dist::{
    self, argmax_tiebreak, multi_indices, softmax, Categorical, SeededRng, LOG_EPSILON,
};
use crate::error::{Error, Result};
use crate::model::{GenerativeModel, Policy};

/// Per-factor posterior beliefs over hidden levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    factors: Vec<Categorical>,
}

impl BeliefState {
    pub fn new(factors: Vec<Categorical>) -> Self {
        BeliefState { factors }
    }

    /// The model's initial prior (one categorical per factor).
    pub fn from_prior(model: &GenerativeModel) -> Self {
        BeliefState {
            factors: model.prior.clone(),
        }
    }

    pub fn factor(&self, f: usize) -> &Categorical {
        &self.factors[f]
    }

    pub fn factors(&self) -> &[Categorical] {
        &self.factors
    }

    /// Most likely level per factor; ties resolve to the lower index.
    pub fn map_levels(&self) -> Vec<usize> {
        self.factors.iter().map(|c| c.argmax()).collect()
    }
}

/// How the executed action is drawn from the policy posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionMode {
    /// Highest marginal first-action probability, seeded tie-break.
    Argmax,
    /// Sample from the marginal first-action distribution.
    Sample,
}

/// Scored policy space: expected free energy per policy and the softmax
/// posterior `q = softmax(-gamma * G)` over policies.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyPosterior {
    pub policies: Vec<Policy>,
    pub efe: Vec<f64>,
    pub q: Categorical,
    pub gamma: f64,
}

/// Push one factor's belief a single step through its transition table
/// under `action`, marginalizing dependency factors with the source-step
/// beliefs.
pub fn propagate_factor(
    model: &GenerativeModel,
    f: usize,
    source: &BeliefState,
    action: usize,
) -> Categorical {
    let spec = &model.factors[f];
    let table = &model.transition[f];
    let dep_dims: Vec<usize> = spec
        .dependencies
        .iter()
        .map(|&d| model.factors[d].num_levels)
        .collect();
    let mut next = vec![0.0; spec.num_levels];
    for prev in 0..spec.num_levels {
        let w_prev = source.factor(f).get(prev);
        if w_prev == 0.0 {
            continue;
        }
        for dep_combo in multi_indices(&dep_dims) {
            let mut weight = w_prev;
            for (k, &d) in spec.dependencies.iter().enumerate() {
                weight *= source.factor(d).get(dep_combo[k]);
            }
            if weight == 0.0 {
                continue;
            }
            let mut cond = Vec::with_capacity(dep_combo.len() + 2);
            cond.push(prev);
            cond.extend_from_slice(&dep_combo);
            cond.push(action);
            for (level, slot) in next.iter_mut().enumerate() {
                *slot += weight * table.get(level, &cond);
            }
        }
    }
    dist::normalize(&next).expect("propagation of a valid belief stays valid")
}

/// Posterior beliefs after observing `obs` (one outcome index per modality).
///
/// The empirical prior is the previous posterior pushed through B when a
/// previous action exists, and the model prior D otherwise. The posterior
/// per factor is `softmax(log prior + Σ log A[obs, ·])` over the modalities
/// sourced on that factor.
pub fn infer_states(
    model: &GenerativeModel,
    obs: &[usize],
    prior: &BeliefState,
    prev_action: Option<usize>,
) -> Result<BeliefState> {
    if obs.len() != model.modalities.len() {
        return Err(Error::InvalidObservation(format!(
            "{} observations for {} modalities",
            obs.len(),
            model.modalities.len()
        )));
    }
    for (m, (&o, spec)) in obs.iter().zip(&model.modalities).enumerate() {
        if o >= spec.num_outcomes {
            return Err(Error::InvalidObservation(format!(
                "outcome {o} out of range for modality {m} ({} outcomes)",
                spec.num_outcomes
            )));
        }
    }

    let empirical: Vec<Categorical> = match prev_action {
        Some(action) => (0..model.factors.len())
            .map(|f| propagate_factor(model, f, prior, action))
            .collect(),
        None => model.prior.clone(),
    };

    let mut posterior = Vec::with_capacity(model.factors.len());
    for (f, prior_f) in empirical.iter().enumerate() {
        let mut logits = dist::log_stable(prior_f);
        for (m, spec) in model.modalities.iter().enumerate() {
            if spec.source_factor != f {
                continue;
            }
            for (level, logit) in logits.iter_mut().enumerate() {
                *logit += (model.likelihood[m].get(obs[m], &[level]) + LOG_EPSILON).ln();
            }
        }
        posterior.push(softmax(&logits, 1.0)?);
    }
    Ok(BeliefState::new(posterior))
}

/// Predicted beliefs after each action of `policy`, starting from `belief`.
pub fn predict_states(
    model: &GenerativeModel,
    belief: &BeliefState,
    policy: &Policy,
) -> Vec<BeliefState> {
    let mut out = Vec::with_capacity(policy.actions.len());
    let mut current = belief.clone();
    for &action in &policy.actions {
        let next = BeliefState::new(
            (0..model.factors.len())
                .map(|f| propagate_factor(model, f, &current, action))
                .collect(),
        );
        out.push(next.clone());
        current = next;
    }
    out
}

/// Predicted observation distribution per modality: `A[m] · Q(source)`.
pub fn expected_observations(model: &GenerativeModel, belief: &BeliefState) -> Vec<Categorical> {
    model
        .modalities
        .iter()
        .enumerate()
        .map(|(m, spec)| {
            let source = belief.factor(spec.source_factor);
            let weights: Vec<f64> = (0..spec.num_outcomes)
                .map(|o| {
                    (0..source.len())
                        .map(|s| model.likelihood[m].get(o, &[s]) * source.get(s))
                        .sum()
                })
                .collect();
            dist::normalize(&weights).expect("stochastic likelihood maps beliefs to beliefs")
        })
        .collect()
}

/// Expected free energy of `policy` from `belief`: risk (KL between
/// predicted observations and the preference distribution `softmax(C)`)
/// plus ambiguity (expected likelihood-column entropy), summed over the
/// horizon and all modalities. Lower is better.
pub fn expected_free_energy(model: &GenerativeModel, belief: &BeliefState, policy: &Policy) -> f64 {
    let preferences: Vec<Categorical> = model
        .preference
        .iter()
        .map(|c| softmax(c, 1.0).expect("finite preferences"))
        .collect();
    let mut g = 0.0;
    for predicted in predict_states(model, belief, policy) {
        let observations = expected_observations(model, &predicted);
        for (m, spec) in model.modalities.iter().enumerate() {
            let risk = dist::kl_divergence(&observations[m], &preferences[m])
                .expect("modality shapes agree");
            let source = predicted.factor(spec.source_factor);
            let ambiguity: f64 = (0..source.len())
                .map(|s| {
                    let column = Categorical::new(model.likelihood[m].column(&[s]))
                        .expect("stochastic likelihood column");
                    source.get(s) * dist::entropy(&column)
                })
                .sum();
            g += risk + ambiguity;
        }
    }
    g
}

/// Score every enumerated policy and form `q = softmax(-gamma * G)`.
pub fn infer_policies(
    model: &GenerativeModel,
    belief: &BeliefState,
    gamma: f64,
) -> Result<PolicyPosterior> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "policy precision must be positive and finite, got {gamma}"
        )));
    }
    let policies = model.enumerate_policies();
    let efe: Vec<f64> = policies
        .iter()
        .map(|p| expected_free_energy(model, belief, p))
        .collect();
    let logits: Vec<f64> = efe.iter().map(|g| -gamma * g).collect();
    let q = softmax(&logits, 1.0)?;
    Ok(PolicyPosterior {
        policies,
        efe,
        q,
        gamma,
    })
}

/// Marginal probability of each first action under the policy posterior.
pub fn action_marginal(pp: &PolicyPosterior, num_actions: usize) -> Categorical {
    let mut marginal = vec![0.0; num_actions];
    for (policy, &qi) in pp.policies.iter().zip(pp.q.probs()) {
        marginal[policy.actions[0]] += qi;
    }
    dist::normalize(&marginal).expect("policy posterior sums to one")
}

/// Pick the action to execute from the policy posterior.
pub fn select_action(
    pp: &PolicyPosterior,
    model: &GenerativeModel,
    mode: ActionMode,
    rng: &mut SeededRng,
) -> usize {
    let marginal = action_marginal(pp, model.num_actions());
    match mode {
        ActionMode::Argmax => argmax_tiebreak(rng, marginal.probs()),
        ActionMode::Sample => dist::sample(rng, &marginal),
    }
}
