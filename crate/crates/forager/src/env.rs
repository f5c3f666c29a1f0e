//! Ground-truth generative processes: the static food world and the dynamic
//! depleting/replenishing world, including fractional-rate variants.
//!
//! Levels are continuous internally and discretized (round half up) only at
//! the observation boundary, so fractional regeneration and decay rates
//! compose exactly with the integer-unit defaults.

use serde::{Deserialize, Serialize};

use crate::dist::{self, SeededRng};
use crate::error::{Error, Result};
use crate::model::{CaseKind, GenerativeModel, EAT, FOOD, SATIETY};

/// Environment dynamics parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    /// Food gained per step when the agent does not eat.
    pub food_regen: f64,
    /// Food consumed per step when the agent eats.
    pub food_deplete: f64,
    /// Satiety gained per step when eating with food available.
    pub satiety_gain: f64,
    /// Satiety lost per step when not nourished.
    pub satiety_decay: f64,
    pub food_max: f64,
    pub satiety_max: f64,
    /// Static worlds never change food and never kill the agent.
    #[serde(rename = "static")]
    pub static_world: bool,
    /// Emit the discretized true level instead of sampling through the
    /// likelihood (debugging aid).
    pub noiseless_obs: bool,
    /// When true (default), starvation ends the run: stepping or observing
    /// a dead state is an error. When false, the world keeps evolving after
    /// the first starvation and `alive` stays false as the starved-once
    /// marker.
    pub terminal_death: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            food_regen: 1.0,
            food_deplete: 1.0,
            satiety_gain: 1.0,
            satiety_decay: 1.0,
            food_max: 2.0,
            satiety_max: 2.0,
            static_world: false,
            noiseless_obs: false,
            terminal_death: true,
        }
    }
}

impl EnvConfig {
    /// The static two-level world of case 1.
    pub fn static_case1() -> Self {
        EnvConfig {
            food_max: 1.0,
            satiety_max: 1.0,
            static_world: true,
            ..EnvConfig::default()
        }
    }

    /// The slower-regrowth variant: food regrows at 0.5 units per step and
    /// depletes at 1; satiety decays at 0.2 and rises at 0.8 when eating.
    pub fn rate_shifted() -> Self {
        EnvConfig {
            food_regen: 0.5,
            food_deplete: 1.0,
            satiety_decay: 0.2,
            satiety_gain: 0.8,
            ..EnvConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            self.food_regen,
            self.food_deplete,
            self.satiety_gain,
            self.satiety_decay,
        ];
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::Config(format!(
                "negative or non-finite rate: {self:?}"
            )));
        }
        if !(self.food_max > 0.0) || !(self.satiety_max > 0.0) {
            return Err(Error::Config("maxima must be positive".into()));
        }
        Ok(())
    }
}

/// The true world state: continuous levels, a life flag, and the clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub food_level: f64,
    pub satiety_level: f64,
    pub alive: bool,
    pub t: usize,
}

/// Initial world state for a case: case 2 starts with food fully available
/// and the agent half satisfied; case 1 starts with food present and the
/// agent hungry.
pub fn init_env(cfg: &EnvConfig, case: CaseKind) -> EnvState {
    match case {
        CaseKind::Case1 | CaseKind::Case1Corrupted => EnvState {
            food_level: 1.0,
            satiety_level: 0.0,
            alive: true,
            t: 0,
        },
        CaseKind::Case2 => EnvState {
            food_level: cfg.food_max,
            satiety_level: cfg.satiety_max / 2.0,
            alive: true,
            t: 0,
        },
    }
}

/// Advance the world by one action.
///
/// Static worlds: food is untouched; satiety jumps to the maximum when the
/// agent eats available food and drops to zero otherwise. Dynamic worlds:
/// eating trades food for satiety (no nourishment from an empty store),
/// waiting regrows food while satiety decays; satiety reaching zero is
/// death, and death is absorbing.
pub fn step(state: &EnvState, action: usize, cfg: &EnvConfig) -> Result<EnvState> {
    if !state.alive && cfg.terminal_death {
        return Err(Error::DeadAgent);
    }
    let mut next = *state;
    if cfg.static_world {
        next.satiety_level = if action == EAT && state.food_level > 0.0 {
            cfg.satiety_max
        } else {
            0.0
        };
    } else {
        if action == EAT {
            next.food_level = (state.food_level - cfg.food_deplete).max(0.0);
            next.satiety_level = if state.food_level > 0.0 {
                (state.satiety_level + cfg.satiety_gain).min(cfg.satiety_max)
            } else {
                (state.satiety_level - cfg.satiety_decay).max(0.0)
            };
        } else {
            next.food_level = (state.food_level + cfg.food_regen).min(cfg.food_max);
            next.satiety_level = (state.satiety_level - cfg.satiety_decay).max(0.0);
        }
        if next.satiety_level <= 0.0 {
            next.alive = false;
        }
        if !state.alive {
            next.alive = false;
        }
    }
    next.t = state.t + 1;
    Ok(next)
}

/// Discretize a continuous level onto `{0, .., num_levels-1}`, rounding
/// halves up.
pub fn discretize_level(level: f64, num_levels: usize) -> usize {
    let rounded = (level + 0.5).floor().max(0.0) as usize;
    rounded.min(num_levels - 1)
}

/// The true per-factor discrete levels implied by the continuous state.
pub fn true_levels(state: &EnvState, model: &GenerativeModel) -> Vec<usize> {
    model
        .factors
        .iter()
        .enumerate()
        .map(|(f, spec)| {
            let level = match f {
                FOOD => state.food_level,
                SATIETY => state.satiety_level,
                _ => 0.0,
            };
            discretize_level(level, spec.num_levels)
        })
        .collect()
}

/// Sample one observation per modality through the process model's
/// likelihood at the discretized true levels.
pub fn observe(
    state: &EnvState,
    process_model: &GenerativeModel,
    cfg: &EnvConfig,
    rng: &mut SeededRng,
) -> Result<Vec<usize>> {
    if !state.alive && cfg.terminal_death {
        return Err(Error::DeadAgent);
    }
    let levels = true_levels(state, process_model);
    process_model
        .modalities
        .iter()
        .enumerate()
        .map(|(m, spec)| {
            let level = levels[spec.source_factor];
            if cfg.noiseless_obs {
                return Ok(level);
            }
            let column = dist::normalize(&process_model.likelihood[m].column(&[level]))?;
            Ok(dist::sample(rng, &column))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DONT_EAT;
    use approx::assert_abs_diff_eq;

    #[test]
    fn initial_states_per_case() {
        let case2 = init_env(&EnvConfig::default(), CaseKind::Case2);
        assert_eq!(
            (case2.food_level, case2.satiety_level, case2.alive, case2.t),
            (2.0, 1.0, true, 0)
        );
        let case1 = init_env(&EnvConfig::static_case1(), CaseKind::Case1);
        assert_eq!(
            (case1.food_level, case1.satiety_level, case1.alive),
            (1.0, 0.0, true)
        );
    }

    #[test]
    fn dynamic_defaults_eat_step() {
        let cfg = EnvConfig::default();
        let s = init_env(&cfg, CaseKind::Case2);
        let next = step(&s, EAT, &cfg).unwrap();
        assert_eq!(
            (next.food_level, next.satiety_level, next.alive, next.t),
            (1.0, 2.0, true, 1)
        );
    }

    #[test]
    fn dynamic_defaults_starvation_death() {
        let cfg = EnvConfig::default();
        let s = init_env(&cfg, CaseKind::Case2);
        let next = step(&s, DONT_EAT, &cfg).unwrap();
        assert_eq!((next.food_level, next.satiety_level), (2.0, 0.0));
        assert!(!next.alive);
    }

    #[test]
    fn rate_variant_wait_step() {
        let cfg = EnvConfig::rate_shifted();
        let s = EnvState {
            food_level: 1.0,
            satiety_level: 1.0,
            alive: true,
            t: 0,
        };
        let next = step(&s, DONT_EAT, &cfg).unwrap();
        assert_abs_diff_eq!(next.food_level, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(next.satiety_level, 0.8, epsilon = 1e-12);
        assert!(next.alive);
    }

    #[test]
    fn eating_from_empty_store_does_not_nourish() {
        let cfg = EnvConfig::default();
        let s = EnvState {
            food_level: 0.0,
            satiety_level: 2.0,
            alive: true,
            t: 3,
        };
        let next = step(&s, EAT, &cfg).unwrap();
        assert_eq!((next.food_level, next.satiety_level), (0.0, 1.0));
    }

    #[test]
    fn static_world_semantics_and_no_death() {
        let cfg = EnvConfig::static_case1();
        let s = init_env(&cfg, CaseKind::Case1);
        let fed = step(&s, EAT, &cfg).unwrap();
        assert_eq!(
            (fed.food_level, fed.satiety_level, fed.alive),
            (1.0, 1.0, true)
        );
        let hungry = step(&fed, DONT_EAT, &cfg).unwrap();
        assert_eq!((hungry.food_level, hungry.satiety_level), (1.0, 0.0));
        assert!(hungry.alive);
        // And it can eat again next step.
        let fed_again = step(&hungry, EAT, &cfg).unwrap();
        assert_eq!(fed_again.satiety_level, 1.0);
    }

    #[test]
    fn stepping_a_dead_state_errors() {
        let cfg = EnvConfig::default();
        let dead = EnvState {
            food_level: 2.0,
            satiety_level: 0.0,
            alive: false,
            t: 5,
        };
        assert!(matches!(step(&dead, EAT, &cfg), Err(Error::DeadAgent)));
        let mut rng = SeededRng::new(0);
        assert!(matches!(
            observe(&dead, &GenerativeModel::case2(), &cfg, &mut rng),
            Err(Error::DeadAgent)
        ));
    }

    #[test]
    fn levels_stay_clamped_under_any_action_sequence() {
        let cfg = EnvConfig::rate_shifted();
        let mut s = init_env(&cfg, CaseKind::Case2);
        let mut rng = SeededRng::new(17);
        let coin = crate::dist::Categorical::uniform(2);
        for _ in 0..200 {
            let action = dist::sample(&mut rng, &coin);
            match step(&s, action, &cfg) {
                Ok(next) => {
                    assert!((0.0..=cfg.food_max).contains(&next.food_level));
                    assert!((0.0..=cfg.satiety_max).contains(&next.satiety_level));
                    if next.alive {
                        s = next;
                    } else {
                        s = init_env(&cfg, CaseKind::Case2);
                    }
                }
                Err(_) => unreachable!("only live states are stepped"),
            }
        }
    }

    #[test]
    fn eat_then_wait_returns_food_to_start_at_default_rates() {
        let cfg = EnvConfig::default();
        let s = EnvState {
            food_level: 1.0,
            satiety_level: 1.0,
            alive: true,
            t: 0,
        };
        let after = step(&step(&s, EAT, &cfg).unwrap(), DONT_EAT, &cfg).unwrap();
        assert_abs_diff_eq!(after.food_level, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn discretization_rounds_half_up() {
        assert_eq!(discretize_level(1.5, 3), 2);
        assert_eq!(discretize_level(0.49, 3), 0);
        assert_eq!(discretize_level(0.5, 3), 1);
        assert_eq!(discretize_level(2.7, 3), 2);
        assert_eq!(discretize_level(9.0, 3), 2);
    }

    #[test]
    fn case1_observation_is_exact() {
        let cfg = EnvConfig::static_case1();
        let m = GenerativeModel::case1();
        let s = init_env(&cfg, CaseKind::Case1);
        let mut rng = SeededRng::new(4);
        for _ in 0..20 {
            assert_eq!(observe(&s, &m, &cfg, &mut rng).unwrap(), vec![1, 0]);
        }
    }

    #[test]
    fn case2_observation_noise_frequency() {
        let cfg = EnvConfig::default();
        let m = GenerativeModel::case2();
        let s = init_env(&cfg, CaseKind::Case2);
        let mut rng = SeededRng::new(99);
        let hits = (0..10_000)
            .filter(|_| observe(&s, &m, &cfg, &mut rng).unwrap()[0] == 2)
            .count() as f64
            / 10_000.0;
        assert!((0.88..=0.92).contains(&hits), "frequency {hits}");
    }

    #[test]
    fn noiseless_observation_flag() {
        let cfg = EnvConfig {
            noiseless_obs: true,
            ..EnvConfig::default()
        };
        let m = GenerativeModel::case2();
        let s = init_env(&cfg, CaseKind::Case2);
        let mut rng = SeededRng::new(0);
        for _ in 0..10 {
            assert_eq!(observe(&s, &m, &cfg, &mut rng).unwrap(), vec![2, 1]);
        }
    }
}
