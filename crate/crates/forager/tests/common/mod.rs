//! Independent oracles for the acceptance and property suites.
//!
//! These re-derive posterior inference and expected free energy by explicit
//! enumeration, sharing no code with the library's vectorized
//! implementations.
#![allow(dead_code)]

use forager::dist::{multi_indices, Categorical};
use forager::inference::BeliefState;
use forager::model::{GenerativeModel, Policy};

const EPS: f64 = 1e-16;

fn ln_eps(x: f64) -> f64 {
    (x + EPS).ln()
}

/// Exact joint-space Bayes: enumerate every joint hidden state, weight by
/// prior times likelihood of `obs`, and marginalize onto factors.
pub fn exact_bayes_posterior(model: &GenerativeModel, obs: &[usize]) -> Vec<Vec<f64>> {
    let levels: Vec<usize> = model.factors.iter().map(|f| f.num_levels).collect();
    let mut marginals: Vec<Vec<f64>> = levels.iter().map(|&n| vec![0.0; n]).collect();
    let mut total = 0.0;
    let mut weights: Vec<(Vec<usize>, f64)> = Vec::new();
    for joint in multi_indices(&levels) {
        let mut w = 1.0;
        for (f, &level) in joint.iter().enumerate() {
            w *= model.prior[f].get(level);
        }
        for (m, spec) in model.modalities.iter().enumerate() {
            w *= model.likelihood[m].get(obs[m], &[joint[spec.source_factor]]);
        }
        total += w;
        weights.push((joint, w));
    }
    for (joint, w) in weights {
        for (f, &level) in joint.iter().enumerate() {
            marginals[f][level] += w / total;
        }
    }
    marginals
}

/// Distribution over joint states as an explicit table.
struct JointDist {
    levels: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDist {
    fn from_product(belief: &BeliefState, levels: &[usize]) -> Self {
        let probs = multi_indices(levels)
            .map(|joint| {
                joint
                    .iter()
                    .enumerate()
                    .map(|(f, &level)| belief.factor(f).get(level))
                    .product()
            })
            .collect();
        JointDist {
            levels: levels.to_vec(),
            probs,
        }
    }

    /// One exact transition step: sum over source joint states, taking the
    /// product of per-factor transition probabilities conditioned on the
    /// full source state.
    fn step(&self, model: &GenerativeModel, action: usize) -> JointDist {
        let states: Vec<Vec<usize>> = multi_indices(&self.levels).collect();
        let mut next = vec![0.0; self.probs.len()];
        for (si, source) in states.iter().enumerate() {
            let w = self.probs[si];
            if w == 0.0 {
                continue;
            }
            for (ti, target) in states.iter().enumerate() {
                let mut p = w;
                for (f, spec) in model.factors.iter().enumerate() {
                    let mut cond = Vec::with_capacity(spec.dependencies.len() + 2);
                    cond.push(source[f]);
                    for &d in &spec.dependencies {
                        cond.push(source[d]);
                    }
                    cond.push(action);
                    p *= model.transition[f].get(target[f], &cond);
                    if p == 0.0 {
                        break;
                    }
                }
                next[ti] += p;
            }
        }
        JointDist {
            levels: self.levels.clone(),
            probs: next,
        }
    }

    fn marginal(&self, factor: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.levels[factor]];
        for (joint, &p) in multi_indices(&self.levels).zip(&self.probs) {
            out[joint[factor]] += p;
        }
        out
    }
}

fn softmax_plain(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Risk plus ambiguity for one step given per-factor marginals, computed by
/// explicit summation.
fn step_cost(model: &GenerativeModel, marginals: &[Vec<f64>]) -> f64 {
    let mut cost = 0.0;
    for (m, spec) in model.modalities.iter().enumerate() {
        let source = &marginals[spec.source_factor];
        let preference = softmax_plain(&model.preference[m]);
        let mut qo = vec![0.0; spec.num_outcomes];
        for (o, slot) in qo.iter_mut().enumerate() {
            for (s, &ps) in source.iter().enumerate() {
                *slot += model.likelihood[m].get(o, &[s]) * ps;
            }
        }
        let qo_sum: f64 = qo.iter().sum();
        for q in &mut qo {
            *q /= qo_sum;
        }
        let risk: f64 = qo
            .iter()
            .zip(&preference)
            .map(|(&p, &c)| p * (ln_eps(p) - ln_eps(c)))
            .sum();
        let ambiguity: f64 = source
            .iter()
            .enumerate()
            .map(|(s, &ps)| {
                let col_entropy: f64 = -(0..spec.num_outcomes)
                    .map(|o| {
                        let a = model.likelihood[m].get(o, &[s]);
                        a * ln_eps(a)
                    })
                    .sum::<f64>();
                ps * col_entropy
            })
            .sum();
        cost += risk + ambiguity;
    }
    cost
}

/// Expected free energy by exact joint trajectory enumeration. Coincides
/// with the mean-field planner whenever the evolving joint distribution
/// stays a product, in particular for one-hot beliefs pushed through
/// deterministic transitions.
pub fn efe_joint_enumeration(
    model: &GenerativeModel,
    belief: &BeliefState,
    policy: &Policy,
) -> f64 {
    let levels: Vec<usize> = model.factors.iter().map(|f| f.num_levels).collect();
    let mut joint = JointDist::from_product(belief, &levels);
    let mut g = 0.0;
    for &action in &policy.actions {
        joint = joint.step(model, action);
        let marginals: Vec<Vec<f64>> = (0..model.factors.len())
            .map(|f| joint.marginal(f))
            .collect();
        g += step_cost(model, &marginals);
    }
    g
}

/// Expected free energy under the factorized (mean-field) closure, computed
/// by per-factor kernel enumeration in dependency order rather than
/// belief-vector pushes: for each factor the one-step kernel is contracted
/// over the dependency factors' source-step marginals by explicit summation.
pub fn efe_factored_enumeration(
    model: &GenerativeModel,
    belief: &BeliefState,
    policy: &Policy,
) -> f64 {
    let mut marginals: Vec<Vec<f64>> = belief
        .factors()
        .iter()
        .map(|c| c.probs().to_vec())
        .collect();
    let mut g = 0.0;
    for &action in &policy.actions {
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(marginals.len());
        for (f, spec) in model.factors.iter().enumerate() {
            let dep_dims: Vec<usize> = spec
                .dependencies
                .iter()
                .map(|&d| model.factors[d].num_levels)
                .collect();
            let mut out = vec![0.0; spec.num_levels];
            for prev in 0..spec.num_levels {
                for dep_combo in multi_indices(&dep_dims) {
                    let mut w = marginals[f][prev];
                    for (k, &d) in spec.dependencies.iter().enumerate() {
                        w *= marginals[d][dep_combo[k]];
                    }
                    let mut cond = Vec::with_capacity(dep_combo.len() + 2);
                    cond.push(prev);
                    cond.extend_from_slice(&dep_combo);
                    cond.push(action);
                    for (level, slot) in out.iter_mut().enumerate() {
                        *slot += w * model.transition[f].get(level, &cond);
                    }
                }
            }
            next.push(out);
        }
        marginals = next;
        g += step_cost(model, &marginals);
    }
    g
}

/// Random one-hot belief state over the model's factors.
pub fn seeded_one_hot_belief(model: &GenerativeModel, seed: u64) -> BeliefState {
    let mut rng = forager::SeededRng::new(seed);
    BeliefState::new(
        model
            .factors
            .iter()
            .map(|f| {
                let level = forager::dist::sample(&mut rng, &Categorical::uniform(f.num_levels));
                Categorical::one_hot(f.num_levels, level)
            })
            .collect(),
    )
}

/// Random dense belief state drawn from flat Dirichlets.
pub fn seeded_dense_belief(model: &GenerativeModel, seed: u64) -> BeliefState {
    let mut rng = forager::SeededRng::new(seed);
    BeliefState::new(
        model
            .factors
            .iter()
            .map(|f| {
                forager::dist::dirichlet_sample(&mut rng, &vec![1.0; f.num_levels])
                    .expect("flat concentrations are valid")
            })
            .collect(),
    )
}
