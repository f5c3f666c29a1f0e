//! Generative models for the static (case 1) and dynamic (case 2) foraging
//! worlds: likelihood (A), transition (B), preference (C), and prior (D)
//! components, plus policy enumeration, corruption, and validation.
//!
//! Array conventions: `A[m]` has shape `[outcomes, source-factor levels]`;
//! `B[f]` has shape `[levels, levels, dep levels.., actions]`, i.e. the
//! probability of the next level given the previous level, the levels of any
//! dependency factors at the previous step, and the action taken.

use serde::{Deserialize, Serialize};

use crate::dist::{multi_indices, Categorical, CondTable};
use crate::error::{Error, Result};

/// Factor index of the food level.
pub const FOOD: usize = 0;
/// Factor index of the agent's satiety.
pub const SATIETY: usize = 1;
/// Action index: leave the food alone.
pub const DONT_EAT: usize = 0;
/// Action index: consume one unit of food.
pub const EAT: usize = 1;

/// Default log-preference weight on the preferred outcome.
pub const DEFAULT_PREFERENCE_STRENGTH: f64 = 4.0;
/// Default probability of observing the true level in the dynamic world.
pub const DEFAULT_P_CORRECT: f64 = 0.9;

/// Which of the two worlds (and variants) a scenario runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseKind {
    /// Static world, two-level factors, identity likelihood.
    #[serde(rename = "case1")]
    Case1,
    /// Static world with the agent's A and B matrices corrupted.
    #[serde(rename = "case1_1")]
    Case1Corrupted,
    /// Dynamic world, three-level factors, noisy likelihood.
    #[serde(rename = "case2")]
    Case2,
}

/// One hidden state factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub name: String,
    pub num_levels: usize,
    /// Indices of factors whose previous-step level conditions this
    /// factor's transitions (extra axes of its B table, in order).
    pub dependencies: Vec<usize>,
    pub num_actions: usize,
}

/// One observation channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalitySpec {
    pub name: String,
    pub num_outcomes: usize,
    pub source_factor: usize,
}

/// How the policy space is enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyRestriction {
    /// Every action sequence of length `policy_len`.
    Full,
    /// Only sequences repeating a single action.
    ConstantAction,
}

/// A candidate action sequence, re-planned every step (receding horizon).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub actions: Vec<usize>,
}

/// Which model components a corruption flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    /// Reverse each likelihood's outcome axis.
    FlipA,
    /// Swap the action slices of every transition table.
    FlipB,
    Both,
}

/// A single validation failure with the array coordinates it concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// The agent's model of the world: factors, modalities, A/B/C/D arrays, and
/// the policy space settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerativeModel {
    pub factors: Vec<FactorSpec>,
    pub modalities: Vec<ModalitySpec>,
    /// Likelihoods, one per modality: P(observation | source-factor level).
    #[serde(rename = "A")]
    pub likelihood: Vec<CondTable>,
    /// Transitions, one per factor: P(next level | prev level, deps, action).
    #[serde(rename = "B")]
    pub transition: Vec<CondTable>,
    /// Unnormalized log-preferences over observations, one vector per
    /// modality; higher means preferred.
    #[serde(rename = "C")]
    pub preference: Vec<Vec<f64>>,
    /// Initial level prior, one per factor.
    #[serde(rename = "D")]
    pub prior: Vec<Categorical>,
    pub policy_len: usize,
    pub policy_restriction: PolicyRestriction,
}

impl GenerativeModel {
    /// The static two-level world. Identity likelihoods, identity food
    /// transitions, eat-when-food-present satiety transitions, strong
    /// preference for food present and satiated, uniform priors,
    /// single-step policies.
    pub fn case1() -> Self {
        Self::case1_with(DEFAULT_PREFERENCE_STRENGTH)
    }

    pub fn case1_with(preference_strength: f64) -> Self {
        let factors = vec![
            FactorSpec {
                name: "food".into(),
                num_levels: 2,
                dependencies: vec![],
                num_actions: 2,
            },
            FactorSpec {
                name: "satiety".into(),
                num_levels: 2,
                dependencies: vec![FOOD],
                num_actions: 2,
            },
        ];
        let modalities = vec![
            ModalitySpec {
                name: "food".into(),
                num_outcomes: 2,
                source_factor: FOOD,
            },
            ModalitySpec {
                name: "satiety".into(),
                num_outcomes: 2,
                source_factor: SATIETY,
            },
        ];
        let identity = CondTable::from_fn(vec![2, 2], |o, c| if o == c[0] { 1.0 } else { 0.0 });
        // Food never changes in the static world.
        let b_food = CondTable::from_fn(vec![2, 2, 2], |next, c| {
            let prev = c[0];
            if next == prev {
                1.0
            } else {
                0.0
            }
        });
        // Eating with food present satiates; anything else leaves the agent
        // hungry.
        let b_satiety = CondTable::from_fn(vec![2, 2, 2, 2], |next, c| {
            let (food, action) = (c[1], c[2]);
            let target = if action == EAT && food == 1 { 1 } else { 0 };
            if next == target {
                1.0
            } else {
                0.0
            }
        });
        GenerativeModel {
            factors,
            modalities,
            likelihood: vec![identity.clone(), identity],
            transition: vec![b_food, b_satiety],
            preference: vec![
                vec![0.0, preference_strength],
                vec![0.0, preference_strength],
            ],
            prior: vec![Categorical::uniform(2), Categorical::uniform(2)],
            policy_len: 1,
            policy_restriction: PolicyRestriction::Full,
        }
    }

    /// The dynamic three-level world. Near-identity likelihoods, transitions
    /// where eating depletes food and feeds the agent while waiting regrows
    /// food and starves it, satiety-only preference, uniform priors,
    /// three-step constant-action policies.
    pub fn case2() -> Self {
        Self::case2_with(DEFAULT_P_CORRECT, DEFAULT_PREFERENCE_STRENGTH)
    }

    pub fn case2_with(p_correct: f64, preference_strength: f64) -> Self {
        let factors = vec![
            FactorSpec {
                name: "food".into(),
                num_levels: 3,
                dependencies: vec![],
                num_actions: 2,
            },
            FactorSpec {
                name: "satiety".into(),
                num_levels: 3,
                dependencies: vec![FOOD],
                num_actions: 2,
            },
        ];
        let modalities = vec![
            ModalitySpec {
                name: "food".into(),
                num_outcomes: 3,
                source_factor: FOOD,
            },
            ModalitySpec {
                name: "satiety".into(),
                num_outcomes: 3,
                source_factor: SATIETY,
            },
        ];
        let noisy = noisy_identity(3, p_correct);
        let b_food = CondTable::from_fn(vec![3, 3, 2], |next, c| {
            let (prev, action) = (c[0], c[1]);
            let target = if action == EAT {
                prev.saturating_sub(1)
            } else {
                (prev + 1).min(2)
            };
            if next == target {
                1.0
            } else {
                0.0
            }
        });
        let b_satiety = CondTable::from_fn(vec![3, 3, 3, 2], |next, c| {
            let (prev, food, action) = (c[0], c[1], c[2]);
            let target = if action == EAT && food > 0 {
                (prev + 1).min(2)
            } else {
                prev.saturating_sub(1)
            };
            if next == target {
                1.0
            } else {
                0.0
            }
        });
        GenerativeModel {
            factors,
            modalities,
            likelihood: vec![noisy.clone(), noisy],
            transition: vec![b_food, b_satiety],
            preference: vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, preference_strength]],
            prior: vec![Categorical::uniform(3), Categorical::uniform(3)],
            policy_len: 3,
            policy_restriction: PolicyRestriction::ConstantAction,
        }
    }

    /// The model an agent starts from in the given case.
    pub fn for_case(case: CaseKind) -> Self {
        match case {
            CaseKind::Case1 => Self::case1(),
            CaseKind::Case1Corrupted => Self::case1().corrupted(Corruption::Both),
            CaseKind::Case2 => Self::case2(),
        }
    }

    /// Number of actions of the shared control factor.
    pub fn num_actions(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.num_actions)
            .max()
            .unwrap_or(1)
    }

    /// Enumerate the policy space. Full mode lists every action sequence in
    /// lexicographic order; constant-action mode lists one repeated sequence
    /// per action.
    pub fn enumerate_policies(&self) -> Vec<Policy> {
        let n = self.num_actions();
        match self.policy_restriction {
            PolicyRestriction::Full => multi_indices(&vec![n; self.policy_len])
                .map(|actions| Policy { actions })
                .collect(),
            PolicyRestriction::ConstantAction => (0..n)
                .map(|a| Policy {
                    actions: vec![a; self.policy_len],
                })
                .collect(),
        }
    }

    /// Return a copy with flawed perception and/or transition beliefs.
    /// Applying the same corruption twice restores the original.
    pub fn corrupted(&self, mode: Corruption) -> Self {
        let mut out = self.clone();
        if matches!(mode, Corruption::FlipA | Corruption::Both) {
            for a in &mut out.likelihood {
                *a = a.reversed_outcomes();
            }
        }
        if matches!(mode, Corruption::FlipB | Corruption::Both) {
            for b in &mut out.transition {
                *b = b.reversed_last_axis();
            }
        }
        out
    }

    /// Replace every transition column with a saturated one-hot on a wrong
    /// target: the column's current most likely target rotated by one level.
    pub fn with_extreme_transitions(&self) -> Self {
        let mut out = self.clone();
        for b in &mut out.transition {
            let n = b.num_outcomes();
            let conds: Vec<Vec<usize>> = b.cond_indices().collect();
            for cond in conds {
                let col = b.column(&cond);
                let mut best = 0;
                for (i, &v) in col.iter().enumerate().skip(1) {
                    if v > col[best] {
                        best = i;
                    }
                }
                let mut one_hot = vec![0.0; n];
                one_hot[(best + 1) % n] = 1.0;
                b.set_column(&cond, &one_hot);
            }
        }
        out
    }

    /// Give the agent a strong preference for abundant food, keeping the
    /// satiety preference as is. Idempotent.
    pub fn with_strong_food_preference(&self) -> Self {
        let mut out = self.clone();
        let n = out.preference[FOOD].len();
        out.preference[FOOD] = vec![0.0; n];
        out.preference[FOOD][n - 1] = DEFAULT_PREFERENCE_STRENGTH;
        out
    }

    /// Check every structural invariant, returning all violations found.
    /// An empty list means the model is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut fail = |location: String, message: String| {
            v.push(Violation { location, message });
        };

        if self.factors.is_empty() {
            fail("factors".into(), "no factors".into());
        }
        for (f, spec) in self.factors.iter().enumerate() {
            if spec.num_levels == 0 {
                fail(format!("factors[{f}]"), "zero levels".into());
            }
            if spec.num_actions == 0 {
                fail(format!("factors[{f}]"), "zero actions".into());
            }
            let mut seen = Vec::new();
            for &d in &spec.dependencies {
                if d == f {
                    fail(
                        format!("factors[{f}].dependencies"),
                        "self-reference".into(),
                    );
                }
                if d >= self.factors.len() {
                    fail(
                        format!("factors[{f}].dependencies"),
                        format!("index {d} out of range"),
                    );
                }
                if seen.contains(&d) {
                    fail(
                        format!("factors[{f}].dependencies"),
                        format!("duplicate index {d}"),
                    );
                }
                seen.push(d);
            }
        }
        for (m, spec) in self.modalities.iter().enumerate() {
            if spec.source_factor >= self.factors.len() {
                fail(
                    format!("modalities[{m}]"),
                    format!("source factor {} out of range", spec.source_factor),
                );
            } else if spec.num_outcomes != self.factors[spec.source_factor].num_levels {
                fail(
                    format!("modalities[{m}]"),
                    format!(
                        "{} outcomes but source factor has {} levels",
                        spec.num_outcomes, self.factors[spec.source_factor].num_levels
                    ),
                );
            }
        }

        if self.likelihood.len() != self.modalities.len() {
            fail(
                "A".into(),
                format!(
                    "{} tables for {} modalities",
                    self.likelihood.len(),
                    self.modalities.len()
                ),
            );
        }
        for (m, a) in self.likelihood.iter().enumerate() {
            if !a.is_well_formed() {
                fail(format!("A[{m}]"), "malformed table".into());
                continue;
            }
            if let Some(spec) = self.modalities.get(m) {
                if let Some(factor) = self.factors.get(spec.source_factor) {
                    let expect = vec![spec.num_outcomes, factor.num_levels];
                    if a.shape() != expect.as_slice() {
                        fail(
                            format!("A[{m}]"),
                            format!("shape {:?}, expected {:?}", a.shape(), expect),
                        );
                    }
                }
            }
            for (cond, msg) in a.stochastic_violations() {
                fail(format!("A[{m}] column {cond:?}"), msg);
            }
        }

        if self.transition.len() != self.factors.len() {
            fail(
                "B".into(),
                format!(
                    "{} tables for {} factors",
                    self.transition.len(),
                    self.factors.len()
                ),
            );
        }
        for (f, b) in self.transition.iter().enumerate() {
            if !b.is_well_formed() {
                fail(format!("B[{f}]"), "malformed table".into());
                continue;
            }
            if let Some(spec) = self.factors.get(f) {
                let mut expect = vec![spec.num_levels, spec.num_levels];
                for &d in &spec.dependencies {
                    if let Some(dep) = self.factors.get(d) {
                        expect.push(dep.num_levels);
                    }
                }
                expect.push(spec.num_actions);
                if b.shape() != expect.as_slice() {
                    fail(
                        format!("B[{f}]"),
                        format!("shape {:?}, expected {:?}", b.shape(), expect),
                    );
                }
            }
            for (cond, msg) in b.stochastic_violations() {
                fail(format!("B[{f}] column {cond:?}"), msg);
            }
        }

        if self.preference.len() != self.modalities.len() {
            fail(
                "C".into(),
                format!(
                    "{} vectors for {} modalities",
                    self.preference.len(),
                    self.modalities.len()
                ),
            );
        }
        for (m, c) in self.preference.iter().enumerate() {
            if let Some(spec) = self.modalities.get(m) {
                if c.len() != spec.num_outcomes {
                    fail(
                        format!("C[{m}]"),
                        format!("{} entries for {} outcomes", c.len(), spec.num_outcomes),
                    );
                }
            }
            for (i, &x) in c.iter().enumerate() {
                if !x.is_finite() {
                    fail(format!("C[{m}][{i}]"), format!("non-finite value {x}"));
                }
            }
        }

        if self.prior.len() != self.factors.len() {
            fail(
                "D".into(),
                format!(
                    "{} vectors for {} factors",
                    self.prior.len(),
                    self.factors.len()
                ),
            );
        }
        for (f, d) in self.prior.iter().enumerate() {
            if let Some(spec) = self.factors.get(f) {
                if d.len() != spec.num_levels {
                    fail(
                        format!("D[{f}]"),
                        format!("{} entries for {} levels", d.len(), spec.num_levels),
                    );
                }
            }
            if !d.is_valid() {
                fail(format!("D[{f}]"), "not a valid categorical".into());
            }
        }

        if self.policy_len == 0 {
            fail("policy_len".into(), "must be at least 1".into());
        }
        v
    }

    /// Serialize to the documented JSON schema.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Deserialize from the JSON schema and reject invalid models.
    pub fn from_json(s: &str) -> Result<Self> {
        let model: GenerativeModel = serde_json::from_str(s)?;
        let violations = model.validate();
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(Error::Config(
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    /// Deep-merge a JSON fragment over this model's serialized form and
    /// deserialize the result. Objects merge key by key; arrays and scalars
    /// replace. The merged model must validate.
    pub fn with_overrides(&self, patch: &serde_json::Value) -> Result<Self> {
        let mut value = serde_json::to_value(self)?;
        deep_merge(&mut value, patch);
        let model: GenerativeModel = serde_json::from_value(value)?;
        let violations = model.validate();
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(Error::Config(format!(
                "model overrides produced an invalid model: {}",
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )))
        }
    }

    /// True when every A and B column sums to one within tolerance.
    pub fn is_stochastic(&self) -> bool {
        self.likelihood
            .iter()
            .chain(&self.transition)
            .all(|t| t.stochastic_violations().is_empty())
    }
}

/// Merge `patch` into `base`: objects recurse, everything else replaces.
pub fn deep_merge(base: &mut serde_json::Value, patch: &serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, pv) in p {
                match b.get_mut(k) {
                    Some(bv) => deep_merge(bv, pv),
                    None => {
                        b.insert(k.clone(), pv.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// A likelihood column with `p_correct` mass on the true level and the
/// remainder split over adjacent levels (edge levels give the single
/// neighbor everything).
fn noisy_identity(n: usize, p_correct: f64) -> CondTable {
    CondTable::from_fn(vec![n, n], |o, c| {
        let s = c[0];
        let spill = 1.0 - p_correct;
        if o == s {
            p_correct
        } else if o + 1 == s || o == s + 1 {
            let neighbors = if s == 0 || s == n - 1 { 1.0 } else { 2.0 };
            spill / neighbors
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::PROB_TOLERANCE;
    use approx::assert_abs_diff_eq;

    #[test]
    fn case1_likelihood_is_identity() {
        let m = GenerativeModel::case1();
        for a in &m.likelihood {
            assert_eq!(a.column(&[0]), vec![1.0, 0.0]);
            assert_eq!(a.column(&[1]), vec![0.0, 1.0]);
        }
    }

    #[test]
    fn case1_food_transition_is_identity_under_both_actions() {
        let m = GenerativeModel::case1();
        for action in [DONT_EAT, EAT] {
            for prev in 0..2 {
                let col = m.transition[FOOD].column(&[prev, action]);
                assert_eq!(col[prev], 1.0);
            }
        }
    }

    #[test]
    fn case1_satiety_semantics() {
        let m = GenerativeModel::case1();
        // Eating with food present satiates regardless of previous satiety.
        for prev in 0..2 {
            assert_eq!(
                m.transition[SATIETY].column(&[prev, 1, EAT]),
                vec![0.0, 1.0]
            );
        }
        // Not eating, or eating without food, leaves the agent hungry.
        for prev in 0..2 {
            assert_eq!(
                m.transition[SATIETY].column(&[prev, 1, DONT_EAT]),
                vec![1.0, 0.0]
            );
            assert_eq!(
                m.transition[SATIETY].column(&[prev, 0, EAT]),
                vec![1.0, 0.0]
            );
        }
    }

    #[test]
    fn case1_prior_is_uniform_and_policies_single_step() {
        let m = GenerativeModel::case1();
        assert_eq!(m.prior[SATIETY].probs(), &[0.5, 0.5]);
        assert_eq!(m.policy_len, 1);
        let policies = m.enumerate_policies();
        assert_eq!(
            policies,
            vec![Policy { actions: vec![0] }, Policy { actions: vec![1] }]
        );
    }

    #[test]
    fn case2_food_transition_decrements_on_eat() {
        let m = GenerativeModel::case2();
        assert_eq!(m.transition[FOOD].get(1, &[2, EAT]), 1.0);
        assert_eq!(m.transition[FOOD].get(0, &[1, EAT]), 1.0);
        assert_eq!(m.transition[FOOD].get(0, &[0, EAT]), 1.0);
        assert_eq!(m.transition[FOOD].get(2, &[2, DONT_EAT]), 1.0);
        assert_eq!(m.transition[FOOD].get(2, &[1, DONT_EAT]), 1.0);
    }

    #[test]
    fn case2_satiety_depends_on_food() {
        let m = GenerativeModel::case2();
        // Eating with food raises satiety to the cap.
        assert_eq!(m.transition[SATIETY].get(2, &[1, 2, EAT]), 1.0);
        assert_eq!(m.transition[SATIETY].get(2, &[2, 1, EAT]), 1.0);
        // Eating from an empty store decays satiety like waiting.
        assert_eq!(m.transition[SATIETY].get(1, &[2, 0, EAT]), 1.0);
        assert_eq!(m.transition[SATIETY].get(0, &[1, 0, DONT_EAT]), 1.0);
    }

    #[test]
    fn case2_preferences_flat_over_food() {
        let m = GenerativeModel::case2();
        assert_eq!(m.preference[FOOD], vec![0.0, 0.0, 0.0]);
        assert_eq!(m.preference[SATIETY], vec![0.0, 0.0, 4.0]);
    }

    #[test]
    fn case2_likelihood_noise_pattern() {
        let m = GenerativeModel::case2();
        let a = &m.likelihood[FOOD];
        for (cond, expect) in [
            (0usize, [0.9, 0.1, 0.0]),
            (1, [0.05, 0.9, 0.05]),
            (2, [0.0, 0.1, 0.9]),
        ] {
            let col = a.column(&[cond]);
            for (got, want) in col.iter().zip(expect) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn builders_validate() {
        assert!(GenerativeModel::case1().validate().is_empty());
        assert!(GenerativeModel::case2().validate().is_empty());
    }

    #[test]
    fn enumerate_policies_counts() {
        let mut m = GenerativeModel::case2();
        m.policy_restriction = PolicyRestriction::Full;
        let full = m.enumerate_policies();
        assert_eq!(full.len(), 8);
        assert_eq!(full[0].actions, vec![0, 0, 0]);
        assert_eq!(full[1].actions, vec![0, 0, 1]);
        assert_eq!(full[7].actions, vec![1, 1, 1]);
        let unique: std::collections::HashSet<_> = full.iter().map(|p| p.actions.clone()).collect();
        assert_eq!(unique.len(), 8);

        m.policy_restriction = PolicyRestriction::ConstantAction;
        assert_eq!(
            m.enumerate_policies(),
            vec![
                Policy {
                    actions: vec![0, 0, 0]
                },
                Policy {
                    actions: vec![1, 1, 1]
                }
            ]
        );
    }

    #[test]
    fn corruption_flips_and_inverts() {
        let m = GenerativeModel::case1();
        let flipped = m.corrupted(Corruption::FlipA);
        assert_eq!(flipped.likelihood[FOOD].column(&[0]), vec![0.0, 1.0]);
        assert_eq!(flipped.likelihood[FOOD].column(&[1]), vec![1.0, 0.0]);
        assert_eq!(flipped.corrupted(Corruption::FlipA), m);

        let swapped = m.corrupted(Corruption::FlipB);
        assert_eq!(
            swapped.transition[SATIETY].column(&[0, 1, DONT_EAT]),
            m.transition[SATIETY].column(&[0, 1, EAT])
        );
        assert_eq!(swapped.corrupted(Corruption::FlipB), m);

        let both = m.corrupted(Corruption::Both);
        assert_eq!(both.corrupted(Corruption::Both), m);
        assert!(both.is_stochastic());
    }

    #[test]
    fn extreme_transitions_rotate_targets() {
        let m = GenerativeModel::case2();
        let e = m.with_extreme_transitions();
        // Correct target of (food=2, eat) is 1; rotated to 2.
        assert_eq!(e.transition[FOOD].column(&[2, EAT]), vec![0.0, 0.0, 1.0]);
        // Columns stay exactly stochastic and the model still validates.
        for b in &e.transition {
            for cond in b.cond_indices() {
                assert_eq!(b.column(&cond).iter().sum::<f64>(), 1.0);
            }
        }
        assert!(e.validate().is_empty());
    }

    #[test]
    fn strong_food_preference_is_idempotent() {
        let m = GenerativeModel::case2();
        let once = m.with_strong_food_preference();
        assert_eq!(once.preference[FOOD], vec![0.0, 0.0, 4.0]);
        assert_eq!(once.preference[SATIETY], vec![0.0, 0.0, 4.0]);
        assert_eq!(once.with_strong_food_preference(), once);
    }

    #[test]
    fn validate_reports_bad_column_and_nan() {
        let mut m = GenerativeModel::case1();
        m.transition[FOOD].set(0, &[0, 0], 0.5);
        m.transition[FOOD].set(1, &[0, 0], 0.0);
        m.preference[FOOD][1] = f64::NAN;
        let violations = m.validate();
        assert!(violations
            .iter()
            .any(|v| v.location.contains("B[0]") && v.location.contains("[0, 0]")));
        assert!(violations.iter().any(|v| v.location.contains("C[0]")));
    }

    #[test]
    fn json_roundtrip_preserves_model() {
        let m = GenerativeModel::case2();
        let json = m.to_json().unwrap();
        let back = GenerativeModel::from_json(&json).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn json_rejects_invalid_model() {
        let mut m = GenerativeModel::case1();
        m.transition[FOOD].set(0, &[0, 0], 0.25);
        let json = serde_json::to_string(&m).unwrap();
        assert!(GenerativeModel::from_json(&json).is_err());
    }

    #[test]
    fn overrides_patch_single_field() {
        let m = GenerativeModel::case2();
        let patch = serde_json::json!({ "C": [[0.0, 0.0, 4.0], [0.0, 0.0, 4.0]] });
        let patched = m.with_overrides(&patch).unwrap();
        assert_eq!(patched.preference[FOOD], vec![0.0, 0.0, 4.0]);
        assert_eq!(patched.transition, m.transition);

        let bad = serde_json::json!({ "policy_len": 0 });
        assert!(m.with_overrides(&bad).is_err());
    }

    #[test]
    fn dependency_column_sums_hold_for_case2() {
        let m = GenerativeModel::case2();
        for (prev, action) in multi_indices(&[3, 2]).map(|v| (v[0], v[1])) {
            let sum: f64 = m.transition[FOOD].column(&[prev, action]).iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = PROB_TOLERANCE);
        }
        for idx in multi_indices(&[3, 3, 2]) {
            let sum: f64 = m.transition[SATIETY].column(&idx).iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = PROB_TOLERANCE);
        }
    }
}
