//! Scenario catalog, episode and batch execution, and summary statistics.
//!
//! A scenario bundles everything an experiment needs: the case, the agent's
//! policy settings, learning configuration, environment rates, optional
//! model overrides, and the seeding grid. Batches run `num_agents`
//! independent agents; each agent runs `num_runs_per_agent` sequential
//! episodes and keeps its (possibly learned) model across them.

pub mod csv;
pub mod plot;

use serde::{Deserialize, Serialize};

use crate::dist::SeededRng;
use crate::env::{self, EnvConfig};
use crate::error::{Error, Result};
use crate::inference::{self, ActionMode, BeliefState};
use crate::learning::{self, InitMode, LearningConfig};
use crate::model::{deep_merge, CaseKind, GenerativeModel, PolicyRestriction, EAT};

/// A fully specified experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub id: String,
    pub case: CaseKind,
    pub timesteps: usize,
    pub policy_len: usize,
    pub policy_restriction: PolicyRestriction,
    pub learning: LearningConfig,
    pub gamma: f64,
    pub action_mode: ActionMode,
    pub env: EnvConfig,
    /// JSON fragment deep-merged over the agent's serialized model.
    pub model_overrides: Option<serde_json::Value>,
    pub num_agents: usize,
    pub num_runs_per_agent: usize,
    pub base_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            id: "custom".into(),
            case: CaseKind::Case2,
            timesteps: 10,
            policy_len: 3,
            policy_restriction: PolicyRestriction::ConstantAction,
            learning: LearningConfig::default(),
            gamma: 16.0,
            action_mode: ActionMode::Argmax,
            env: EnvConfig::default(),
            model_overrides: None,
            num_agents: 10,
            num_runs_per_agent: 1,
            base_seed: 7,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Config("scenario id must not be empty".into()));
        }
        if self.timesteps == 0 {
            return Err(Error::Config("timesteps must be at least 1".into()));
        }
        if self.policy_len == 0 {
            return Err(Error::Config("policy_len must be at least 1".into()));
        }
        if self.num_agents == 0 || self.num_runs_per_agent == 0 {
            return Err(Error::Config(
                "agent and run counts must be positive".into(),
            ));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!(
                "gamma must be positive and finite, got {}",
                self.gamma
            )));
        }
        self.learning.validate()?;
        self.env.validate()?;
        self.agent_base_model()?;
        Ok(())
    }

    /// The model the agent starts from, before transition initialization:
    /// the case's model with the scenario's policy settings and any
    /// model overrides applied.
    pub fn agent_base_model(&self) -> Result<GenerativeModel> {
        let mut model = GenerativeModel::for_case(self.case);
        model.policy_len = self.policy_len;
        model.policy_restriction = self.policy_restriction;
        let model = match &self.model_overrides {
            Some(patch) => model.with_overrides(patch)?,
            None => model,
        };
        let violations = model.validate();
        if !violations.is_empty() {
            return Err(Error::Config(
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ));
        }
        Ok(model)
    }

    /// The generative process's model: the uncorrupted, unpatched truth for
    /// the case. Its likelihood drives observation sampling.
    pub fn process_model(&self) -> GenerativeModel {
        match self.case {
            CaseKind::Case1 | CaseKind::Case1Corrupted => GenerativeModel::case1(),
            CaseKind::Case2 => GenerativeModel::case2(),
        }
    }

    /// Deterministic seed of agent `i`'s episode `j`.
    pub fn episode_seed(&self, agent: usize, run: usize) -> u64 {
        self.base_seed
            .wrapping_add((agent * self.num_runs_per_agent + run) as u64)
    }

    /// Deterministic seed for agent `i`'s transition initialization.
    pub fn init_seed(&self, agent: usize) -> u64 {
        self.base_seed
            .wrapping_add(agent as u64)
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

/// One recorded timestep: the action taken, what was observed before it,
/// the posterior beliefs it was chosen under, and the world after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub t: usize,
    pub action: usize,
    pub obs: Vec<usize>,
    pub beliefs: Vec<Vec<f64>>,
    pub food_level: f64,
    pub satiety_level: f64,
    pub alive: bool,
}

/// Trace of a single episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario_id: String,
    pub seed: u64,
    pub factor_names: Vec<String>,
    pub rows: Vec<StepRow>,
    /// Completed steps before death or the episode limit.
    pub survival_time: usize,
}

/// Aggregate statistics over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub scenario_id: String,
    pub timesteps: usize,
    pub num_agents: usize,
    pub num_runs_per_agent: usize,
    pub base_seed: u64,
    /// Survival time per agent per run.
    pub survival: Vec<Vec<usize>>,
    pub mean_survival: f64,
    pub min_survival: usize,
    pub max_survival: usize,
    /// Number of runs still recording at each timestep.
    pub runs_alive: Vec<usize>,
    /// Fraction of recorded actions at each timestep that were "eat".
    pub eat_frequency: Vec<f64>,
    pub mean_food: Vec<f64>,
    pub mean_satiety: Vec<f64>,
}

impl BatchSummary {
    fn from_records(cfg: &ScenarioConfig, records: &[Vec<RunRecord>]) -> Self {
        let survival: Vec<Vec<usize>> = records
            .iter()
            .map(|agent| agent.iter().map(|r| r.survival_time).collect())
            .collect();
        let flat: Vec<usize> = survival.iter().flatten().copied().collect();
        let mean_survival = flat.iter().sum::<usize>() as f64 / flat.len().max(1) as f64;

        let mut runs_alive = vec![0usize; cfg.timesteps];
        let mut eats = vec![0usize; cfg.timesteps];
        let mut food = vec![0.0; cfg.timesteps];
        let mut satiety = vec![0.0; cfg.timesteps];
        for record in records.iter().flatten() {
            for row in &record.rows {
                runs_alive[row.t] += 1;
                if row.action == EAT {
                    eats[row.t] += 1;
                }
                food[row.t] += row.food_level;
                satiety[row.t] += row.satiety_level;
            }
        }
        let eat_frequency = eats
            .iter()
            .zip(&runs_alive)
            .map(|(&e, &n)| if n == 0 { 0.0 } else { e as f64 / n as f64 })
            .collect();
        let mean_food = food
            .iter()
            .zip(&runs_alive)
            .map(|(&x, &n)| if n == 0 { 0.0 } else { x / n as f64 })
            .collect();
        let mean_satiety = satiety
            .iter()
            .zip(&runs_alive)
            .map(|(&x, &n)| if n == 0 { 0.0 } else { x / n as f64 })
            .collect();

        BatchSummary {
            scenario_id: cfg.id.clone(),
            timesteps: cfg.timesteps,
            num_agents: cfg.num_agents,
            num_runs_per_agent: cfg.num_runs_per_agent,
            base_seed: cfg.base_seed,
            survival,
            mean_survival,
            min_survival: flat.iter().copied().min().unwrap_or(0),
            max_survival: flat.iter().copied().max().unwrap_or(0),
            runs_alive,
            eat_frequency,
            mean_food,
            mean_satiety,
        }
    }

    /// Mean survival of one run index across agents.
    pub fn mean_survival_of_run(&self, run: usize) -> f64 {
        let values: Vec<usize> = self.survival.iter().map(|agent| agent[run]).collect();
        values.iter().sum::<usize>() as f64 / values.len().max(1) as f64
    }

    /// Mean survival over an inclusive range of run indices across agents.
    pub fn mean_survival_of_runs(&self, from: usize, to: usize) -> f64 {
        let runs = to - from + 1;
        (from..=to)
            .map(|j| self.mean_survival_of_run(j))
            .sum::<f64>()
            / runs as f64
    }
}

/// Run one episode: observe, infer states, infer policies, select an
/// action, step the world, and (when learning) reinforce the experienced
/// transition once the next observation arrives. Under terminal death the
/// loop stops at starvation, otherwise it runs the configured length with
/// starvation recorded in the rows; either way the trace and the
/// possibly-updated model come back.
pub fn run_episode(
    cfg: &ScenarioConfig,
    agent_model: GenerativeModel,
    seed: u64,
) -> Result<(RunRecord, GenerativeModel)> {
    let process_model = cfg.process_model();
    let mut model = agent_model;
    let mut rng = SeededRng::new(seed);
    let mut state = env::init_env(&cfg.env, cfg.case);
    let mut previous: Option<(BeliefState, usize)> = None;
    let mut rows = Vec::with_capacity(cfg.timesteps);

    for t in 0..cfg.timesteps {
        let obs = env::observe(&state, &process_model, &cfg.env, &mut rng)?;
        let belief = match &previous {
            Some((prior, action)) => inference::infer_states(&model, &obs, prior, Some(*action))?,
            None => {
                let prior = BeliefState::from_prior(&model);
                inference::infer_states(&model, &obs, &prior, None)?
            }
        };
        if cfg.learning.enabled {
            if let Some((prev_belief, action)) = &previous {
                let (prev_levels, next_levels) =
                    learning::experienced_transition(prev_belief, &belief);
                model =
                    learning::update_b(&model, &prev_levels, &next_levels, *action, &cfg.learning)?;
            }
        }
        let pp = inference::infer_policies(&model, &belief, cfg.gamma)?;
        let action = inference::select_action(&pp, &model, cfg.action_mode, &mut rng);
        state = env::step(&state, action, &cfg.env)?;
        if cfg.learning.enabled && cfg.env.terminal_death && !state.alive {
            // The fatal transition is the one experience that never gets a
            // follow-up observation; the agent still notes the starvation
            // it just stepped into.
            let prev_levels = belief.map_levels();
            let next_levels = env::true_levels(&state, &process_model);
            model = learning::update_b(&model, &prev_levels, &next_levels, action, &cfg.learning)?;
        }
        rows.push(StepRow {
            t,
            action,
            obs,
            beliefs: belief
                .factors()
                .iter()
                .map(|c| c.probs().to_vec())
                .collect(),
            food_level: state.food_level,
            satiety_level: state.satiety_level,
            alive: state.alive,
        });
        previous = Some((belief, action));
        if cfg.env.terminal_death && !state.alive {
            break;
        }
    }

    // Steps completed before (and including) the one where starvation
    // first hit; the whole episode when it never did.
    let survival_time = rows
        .iter()
        .position(|row| !row.alive)
        .map(|i| i + 1)
        .unwrap_or(rows.len());
    Ok((
        RunRecord {
            scenario_id: cfg.id.clone(),
            seed,
            factor_names: model.factors.iter().map(|f| f.name.clone()).collect(),
            rows,
            survival_time,
        },
        model,
    ))
}

/// Run the full agent/run grid, returning per-run records alongside the
/// summary and each agent's final model.
pub fn run_batch_with_records(
    cfg: &ScenarioConfig,
) -> Result<(BatchSummary, Vec<Vec<RunRecord>>, Vec<GenerativeModel>)> {
    cfg.validate()?;
    let base = cfg.agent_base_model()?;
    let mut records: Vec<Vec<RunRecord>> = Vec::with_capacity(cfg.num_agents);
    let mut final_models = Vec::with_capacity(cfg.num_agents);
    for agent in 0..cfg.num_agents {
        let mut init_rng = SeededRng::new(cfg.init_seed(agent));
        let mut model = learning::init_transitions(&base, cfg.learning.init_mode, &mut init_rng);
        let mut agent_records = Vec::with_capacity(cfg.num_runs_per_agent);
        for run in 0..cfg.num_runs_per_agent {
            let seed = cfg.episode_seed(agent, run);
            let (record, updated) = run_episode(cfg, model, seed)?;
            model = updated;
            agent_records.push(record);
        }
        records.push(agent_records);
        final_models.push(model);
    }
    let summary = BatchSummary::from_records(cfg, &records);
    Ok((summary, records, final_models))
}

/// Run the full agent/run grid and summarize it.
pub fn run_batch(cfg: &ScenarioConfig) -> Result<BatchSummary> {
    run_batch_with_records(cfg).map(|(summary, _, _)| summary)
}

/// The built-in scenario catalog covering both cases and every variant.
pub fn catalog() -> Vec<ScenarioConfig> {
    let case1 = ScenarioConfig {
        id: "case1".into(),
        case: CaseKind::Case1,
        policy_len: 1,
        policy_restriction: PolicyRestriction::Full,
        env: EnvConfig::static_case1(),
        num_agents: 1,
        base_seed: 101,
        ..ScenarioConfig::default()
    };
    let case1_1 = ScenarioConfig {
        id: "case1_1".into(),
        case: CaseKind::Case1Corrupted,
        num_agents: 5,
        base_seed: 102,
        ..case1.clone()
    };
    // Full enumeration lets plans mix actions; the sustainable
    // eat/wait alternation is only expressible that way. The dynamic-world
    // scenarios sample actions and treat starvation as a recorded event
    // rather than a simulation stop, so survival time is the step at which
    // satiety first hit zero and learning sees whole episodes.
    let dynamic_env = EnvConfig {
        terminal_death: false,
        ..EnvConfig::default()
    };
    let case2 = ScenarioConfig {
        id: "case2".into(),
        policy_restriction: PolicyRestriction::Full,
        env: dynamic_env,
        learning: LearningConfig {
            enabled: false,
            learning_rate: 1.0,
            init_mode: InitMode::RandomDirichlet,
        },
        base_seed: 201,
        ..ScenarioConfig::default()
    };
    let case2_correct_b = ScenarioConfig {
        id: "case2_correctB".into(),
        policy_restriction: PolicyRestriction::ConstantAction,
        learning: LearningConfig::default(),
        base_seed: 202,
        ..case2.clone()
    };
    let case2_learning = ScenarioConfig {
        id: "case2_learning".into(),
        action_mode: ActionMode::Sample,
        gamma: 32.0,
        learning: LearningConfig {
            enabled: true,
            learning_rate: 1.0,
            init_mode: InitMode::RandomDirichlet,
        },
        num_runs_per_agent: 10,
        base_seed: 203,
        ..case2.clone()
    };
    let case2_extreme_b = ScenarioConfig {
        id: "case2_extremeB".into(),
        learning: LearningConfig {
            enabled: false,
            learning_rate: 1.0,
            init_mode: InitMode::Extreme,
        },
        base_seed: 204,
        ..case2.clone()
    };
    let case2_extreme_b_learning = ScenarioConfig {
        id: "case2_extremeB_learning".into(),
        action_mode: ActionMode::Sample,
        gamma: 32.0,
        learning: LearningConfig {
            enabled: true,
            learning_rate: 1.0,
            init_mode: InitMode::Extreme,
        },
        num_runs_per_agent: 10,
        base_seed: 205,
        ..case2.clone()
    };
    let strong_pref_patch = serde_json::json!({ "C": [[0.0, 0.0, 4.0], [0.0, 0.0, 4.0]] });
    let case2_strongpref = ScenarioConfig {
        id: "case2_strongpref".into(),
        learning: LearningConfig::default(),
        model_overrides: Some(strong_pref_patch.clone()),
        base_seed: 206,
        ..case2.clone()
    };
    let case2_strongpref_learning = ScenarioConfig {
        id: "case2_strongpref_learning".into(),
        action_mode: ActionMode::Sample,
        gamma: 32.0,
        learning: LearningConfig {
            enabled: true,
            learning_rate: 1.0,
            init_mode: InitMode::RandomDirichlet,
        },
        model_overrides: Some(strong_pref_patch),
        num_runs_per_agent: 10,
        base_seed: 207,
        ..case2.clone()
    };
    let case2_rates = ScenarioConfig {
        id: "case2_rates".into(),
        env: EnvConfig {
            terminal_death: false,
            ..EnvConfig::rate_shifted()
        },
        base_seed: 208,
        ..case2.clone()
    };
    let case2_rates_learning = ScenarioConfig {
        id: "case2_rates_learning".into(),
        action_mode: ActionMode::Sample,
        gamma: 32.0,
        env: EnvConfig {
            terminal_death: false,
            ..EnvConfig::rate_shifted()
        },
        learning: LearningConfig {
            enabled: true,
            learning_rate: 1.0,
            init_mode: InitMode::RandomDirichlet,
        },
        num_runs_per_agent: 10,
        base_seed: 209,
        ..case2.clone()
    };
    let case2_plen1 = ScenarioConfig {
        id: "case2_plen1".into(),
        policy_len: 1,
        base_seed: 210,
        ..case2.clone()
    };
    let case2_plen1_learning = ScenarioConfig {
        id: "case2_plen1_learning".into(),
        policy_len: 1,
        action_mode: ActionMode::Sample,
        learning: LearningConfig {
            enabled: true,
            learning_rate: 1.0,
            init_mode: InitMode::RandomDirichlet,
        },
        num_runs_per_agent: 10,
        base_seed: 211,
        ..case2.clone()
    };

    vec![
        case1,
        case1_1,
        case2,
        case2_correct_b,
        case2_learning,
        case2_extreme_b,
        case2_extreme_b_learning,
        case2_strongpref,
        case2_strongpref_learning,
        case2_rates,
        case2_rates_learning,
        case2_plen1,
        case2_plen1_learning,
    ]
}

/// Find a catalog scenario by id.
pub fn find_scenario(id: &str) -> Result<ScenarioConfig> {
    catalog()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Config(format!("unknown scenario '{id}' (see `list`)")))
}

/// One-line description of a scenario for listings.
pub fn describe(cfg: &ScenarioConfig) -> String {
    let learning = if cfg.learning.enabled {
        format!("learning on (rate {})", cfg.learning.learning_rate)
    } else {
        "learning off".into()
    };
    let init = match cfg.learning.init_mode {
        InitMode::Correct => "correct B",
        InitMode::RandomDirichlet => "random B",
        InitMode::Extreme => "extreme B",
    };
    let world = if cfg.env.static_world {
        "static"
    } else {
        "dynamic"
    };
    format!(
        "{world} world, {init}, {learning}, policy length {}, {} agents x {} runs",
        cfg.policy_len, cfg.num_agents, cfg.num_runs_per_agent
    )
}

/// Merge a JSON fragment over a scenario and re-validate.
pub fn merge_scenario(base: &ScenarioConfig, patch: &serde_json::Value) -> Result<ScenarioConfig> {
    let mut value = serde_json::to_value(base)?;
    deep_merge(&mut value, patch);
    let merged: ScenarioConfig = serde_json::from_value(value)?;
    merged.validate()?;
    Ok(merged)
}

/// Load a scenario fragment from a JSON file and merge it over `base`.
pub fn load_scenario_file(base: &ScenarioConfig, path: &std::path::Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading scenario file {}", path.display()), e))?;
    let patch: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("parsing {}: {e}", path.display())))?;
    merge_scenario(base, &patch)
}
