//! The 4-dimensional learning space, basis features, shaped reward, linear
//! Q-function, and the min-max Q-learning training loop.
//!
//! A position-space state is compressed into four time quantities: the least
//! capture time when fleeing, the least intercept time under the group
//! evasion direction, the least intercept time when running for the target,
//! and the unobstructed time-to-target. The first three enter as
//! `tanh(time / time_to_target)`, which keeps them in [0, 1), makes them
//! dimensionless, and pins the captured state at exactly zero. The state is
//! invariant in the number of pursuers, so weights trained with one crowd
//! transfer to another.

use crate::engine::{
    largest_gap_direction, realize_evader_action, realize_pursuer_action, status, step,
    EvaderAction, GameState, GameStatus, PursuerAction,
};
use crate::error::{Error, Result};
use crate::matrix_game::{payoff_m1, sample_strategy, solve_zero_sum};
use crate::time_metrics::{intercept_time, time_to_capture, time_to_target};
use crate::vec2::ZERO;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Guard on the time-to-target denominator when forming ratios.
const RATIO_GUARD: f64 = 1e-9;
/// Exploration probability never decays below this.
const BETA_FLOOR: f64 = 0.01;

/// State vector in the learning space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningState {
    /// tanh(least capture time / time-to-target); zero exactly at capture.
    pub capture_ratio: f64,
    /// tanh(least group-evasion intercept time / time-to-target).
    pub intercept_ratio: f64,
    /// tanh(least target-seeking intercept time / time-to-target).
    pub seek_ratio: f64,
    /// Unobstructed time for the evader to reach the target.
    pub time_to_target: f64,
}

impl LearningState {
    pub fn as_array(&self) -> [f64; 4] {
        [self.capture_ratio, self.intercept_ratio, self.seek_ratio, self.time_to_target]
    }

    /// Worst of the three squashed ratios.
    pub fn min_ratio(&self) -> f64 {
        self.capture_ratio.min(self.intercept_ratio).min(self.seek_ratio)
    }
}

/// Basis features of one (state, pursuer action, evader action) tuple:
/// the heading cosine followed by the three squashed ratios of the
/// successor state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 4]);

/// Weights of the linear Q-function.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightVector(pub [f64; 4]);

impl WeightVector {
    pub fn zeros() -> Self {
        WeightVector([0.0; 4])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|w| w.is_finite())
    }
}

/// Sigmoid used for the ratio components; defined for x ≥ 0 and exactly
/// zero at zero.
fn squash(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    x.tanh()
}

/// Map a position-space state into the learning space. Capture and intercept
/// times are clipped to `t_max` (with unreachable events mapping to `t_max`)
/// before the ratios are formed.
pub fn learning_state(s: &GameState, t_max: f64) -> LearningState {
    let tt = time_to_target(s.evader, s.target, s.v_e).expect("finite state positions");
    let denom = tt.max(RATIO_GUARD);

    let group_dir = largest_gap_direction(s);
    // An evader exactly on the target has no defined seek direction; the
    // stationary evader is the continuous limit.
    let seek_dir = (s.target - s.evader).normalized();

    let mut least_capture = f64::INFINITY;
    let mut least_intercept = f64::INFINITY;
    let mut least_seek = f64::INFINITY;
    for i in 0..s.n_pursuers() {
        let params = s.duel_params_with_horizon(i, t_max);
        let cap = time_to_capture(s.evader, s.pursuers[i], &params)
            .expect("finite state positions")
            .capped(t_max);
        let icp = intercept_time(s.evader, s.pursuers[i], group_dir, &params)
            .expect("finite state positions")
            .capped(t_max);
        let seek = match seek_dir {
            Some(dir) => intercept_time(s.evader, s.pursuers[i], dir, &params),
            None => intercept_time(s.evader, s.pursuers[i], ZERO, &params),
        }
        .expect("finite state positions")
        .capped(t_max);
        least_capture = least_capture.min(cap);
        least_intercept = least_intercept.min(icp);
        least_seek = least_seek.min(seek);
    }

    LearningState {
        capture_ratio: squash(least_capture / denom),
        intercept_ratio: squash(least_intercept / denom),
        seek_ratio: squash(least_seek / denom),
        time_to_target: tt,
    }
}

/// Component of the evader's unit velocity along the line of sight to the
/// target: the cosine between the realized direction of `a` and the target
/// bearing. Equals the negative time derivative of the time-to-target.
pub fn heading(s: &GameState, a: EvaderAction) -> Result<f64> {
    let to_target = (s.target - s.evader)
        .normalized()
        .ok_or(Error::DegenerateInput("heading undefined with evader at target"))?;
    let dir = realize_evader_action(a, s)?;
    Ok(dir.dot(to_target))
}

/// Realize both actions, advance one step, and report the successor in both
/// spaces.
pub fn transition(
    s: &GameState,
    p: PursuerAction,
    e: EvaderAction,
    t_max: f64,
) -> Result<(GameState, LearningState)> {
    let evader_dir = realize_evader_action(e, s)?;
    let pursuer_dirs = realize_pursuer_action(p, s);
    let next = step(s, evader_dir, &pursuer_dirs);
    let psi = learning_state(&next, t_max);
    Ok((next, psi))
}

/// Basis features for the Q-function at `(s, p, e)`.
pub fn features(s: &GameState, p: PursuerAction, e: EvaderAction, t_max: f64) -> Result<FeatureVector> {
    let h = heading(s, e)?;
    let (_, psi) = transition(s, p, e, t_max)?;
    Ok(FeatureVector([h, psi.capture_ratio, psi.intercept_ratio, psi.seek_ratio]))
}

/// Linear Q-value.
pub fn q_value(w: &WeightVector, z: &FeatureVector) -> f64 {
    w.0.iter().zip(z.0.iter()).map(|(a, b)| a * b).sum()
}

/// Shaped reward for one transition: heading cosine, plus the change in the
/// target-seeking ratio, plus the terminal bonus. The terminal cases are
/// decided from the successor's position-space status rather than from the
/// learning-space coordinates, so finite precision cannot misfire them.
pub fn reward(
    psi: &LearningState,
    psi_next: &LearningState,
    heading_term: f64,
    next_status: GameStatus,
) -> f64 {
    let transition_term = psi_next.seek_ratio - psi.seek_ratio;
    let terminal = match next_status {
        GameStatus::TargetReached => 1.0,
        GameStatus::Captured(_) => -1.0,
        GameStatus::Ongoing | GameStatus::TimedOut => 0.0,
    };
    heading_term + transition_term + terminal
}

/// One gradient step of the linear TD rule: `w += alpha * (target - Q) * z`.
/// Returns the Euclidean norm of the weight change.
pub fn td_update(w: &mut WeightVector, z: &FeatureVector, target: f64, alpha: f64) -> f64 {
    let delta = target - q_value(w, z);
    let mut norm_sq = 0.0;
    for (wi, zi) in w.0.iter_mut().zip(z.0.iter()) {
        let dw = alpha * delta * zi;
        *wi += dw;
        norm_sq += dw * dw;
    }
    norm_sq.sqrt()
}

/// Hyperparameters and environment description for one training run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainingConfig {
    /// Nominal number of training episodes.
    pub n_train: u32,
    /// Initial learning rate.
    pub alpha: f64,
    /// Discount factor.
    pub gamma: f64,
    /// Initial exploration probability.
    pub beta: f64,
    /// Multiplicative per-episode learning-rate decay.
    pub alpha_decay: f64,
    /// Subtractive per-episode exploration decay.
    pub beta_decay: f64,
    /// Convergence tolerance on the episode-max weight change.
    pub tol: f64,
    /// Learning rate never decays below this.
    pub alpha_floor: f64,
    /// Side length of the square spawn grid.
    pub grid_size: f64,
    /// Number of pursuers.
    pub n_pursuers: usize,
    pub v_e: f64,
    pub v_p: f64,
    pub dt: f64,
    pub ell: f64,
    pub eps: f64,
    /// Horizon used to cap capture/intercept times.
    pub t_max: f64,
    pub seed: u64,
}

impl Default for TrainingConfig {
    /// Three equal-speed pursuers on a unit grid with a centimeter capture
    /// radius; the exploration decay reaches its floor exactly at the
    /// nominal episode count. The learning-rate floor is an underflow guard
    /// only: the multiplicative decay is meant to anneal the updates to
    /// nothing by the end of training.
    fn default() -> Self {
        let grid_size = 1.0;
        let v_e = 1.0;
        let n_train = 2000;
        let beta = 0.9;
        TrainingConfig {
            n_train,
            alpha: 0.1,
            gamma: 0.9,
            beta,
            alpha_decay: 0.9,
            beta_decay: (beta - BETA_FLOOR) / n_train as f64,
            tol: 2e-3,
            alpha_floor: 1e-12,
            grid_size,
            n_pursuers: 3,
            v_e,
            v_p: 1.0,
            dt: 0.01,
            ell: 0.01,
            eps: 0.01,
            t_max: default_horizon(grid_size, v_e),
            seed: 0,
        }
    }
}

/// Three grid diagonals at evader speed: roomy enough for detours, finite
/// enough to end hopeless episodes.
pub fn default_horizon(grid_size: f64, v_e: f64) -> f64 {
    3.0 * grid_size * std::f64::consts::SQRT_2 / v_e
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n_train >= 1
            && (0.0..=1.0).contains(&self.gamma)
            && (0.0..=1.0).contains(&self.alpha)
            && (0.0..=1.0).contains(&self.beta)
            && self.alpha_decay > 0.0
            && self.alpha_decay <= 1.0
            && self.beta_decay >= 0.0
            && self.tol > 0.0
            && self.alpha_floor > 0.0
            && self.grid_size > 0.0
            && self.n_pursuers >= 1
            && self.v_e > 0.0
            && self.v_p > 0.0
            && self.dt > 0.0
            && self.ell > 0.0
            && self.eps > 0.0
            && self.t_max > 0.0;
        if !ok {
            return Err(Error::InvalidParameter("training config out of range".into()));
        }
        Ok(())
    }

    /// Stage cap for one training episode.
    pub fn max_stage(&self) -> u32 {
        (default_horizon(self.grid_size, self.v_e) / self.dt).ceil() as u32
    }
}

/// Per-episode training trace entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub episode: u32,
    pub outcome: GameStatus,
    pub steps: u32,
    /// Largest single-step weight change in the episode.
    pub max_weight_delta: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Full training trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub episodes: Vec<EpisodeSummary>,
    pub final_weights: WeightVector,
}

/// Draw a state uniformly in the spawn grid, rejecting draws that are
/// already terminal.
fn random_initial_state<R: Rng + ?Sized>(cfg: &TrainingConfig, rng: &mut R) -> GameState {
    loop {
        let mut point = || {
            crate::vec2::Vec2::new(
                rng.random_range(0.0..cfg.grid_size),
                rng.random_range(0.0..cfg.grid_size),
            )
        };
        let evader = point();
        let pursuers: Vec<_> = (0..cfg.n_pursuers).map(|_| point()).collect();
        let target = point();
        let s = GameState {
            evader,
            pursuers,
            target,
            v_e: cfg.v_e,
            v_p: vec![cfg.v_p; cfg.n_pursuers],
            dt: cfg.dt,
            ell: cfg.ell,
            eps: cfg.eps,
            stage: 0,
            max_stage: cfg.max_stage(),
        };
        if status(&s) == GameStatus::Ongoing {
            return s;
        }
    }
}

/// Min-max Q-learning over the feature space.
///
/// Per stage the current 2×4 Q-matrix is solved for both mixed strategies;
/// the evader explores with probability `beta`, otherwise samples its
/// equilibrium strategy, while the pursuer group always samples its own. The
/// TD target bootstraps on the solved value of the successor stage game
/// (zero at terminal successors), and the weights move along the feature
/// vector of the played pair.
pub fn train(cfg: &TrainingConfig) -> Result<(WeightVector, TrainingLog)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = WeightVector([
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..1.0),
    ]);

    let mut log = TrainingLog::default();
    let mut alpha = cfg.alpha;
    let mut beta = cfg.beta;
    let hard_cap = cfg.n_train.saturating_mul(3);

    let mut episode = 0u32;
    loop {
        let mut s = random_initial_state(cfg, &mut rng);
        let mut max_dw = 0.0f64;
        let mut steps = 0u32;

        while status(&s) == GameStatus::Ongoing {
            let matrix = payoff_m1(&s, &w, cfg.t_max)?;
            let solution = solve_zero_sum(&matrix)?;

            let evader_choice = if rng.random_range(0.0..1.0) < beta {
                rng.random_range(0..EvaderAction::ALL.len())
            } else {
                sample_strategy(&solution.evader_strategy, &mut rng)
            };
            let pursuer_choice = sample_strategy(&solution.pursuer_strategy, &mut rng);
            let e = EvaderAction::ALL[evader_choice];
            let p = PursuerAction::ALL[pursuer_choice];

            let psi = learning_state(&s, cfg.t_max);
            let h = heading(&s, e)?;
            let (next, psi_next) = transition(&s, p, e, cfg.t_max)?;
            let z = FeatureVector([h, psi_next.capture_ratio, psi_next.intercept_ratio, psi_next.seek_ratio]);
            let next_status = status(&next);

            let r = reward(&psi, &psi_next, h, next_status);
            let bootstrap = if next_status == GameStatus::Ongoing {
                solve_zero_sum(&payoff_m1(&next, &w, cfg.t_max)?)?.value
            } else {
                0.0
            };
            let dw = td_update(&mut w, &z, r + cfg.gamma * bootstrap, alpha);
            max_dw = max_dw.max(dw);

            if !w.is_finite() {
                log.final_weights = w;
                return Err(Error::TrainingDiverged {
                    episode: episode as usize,
                    log: Box::new(log),
                });
            }

            s = next;
            steps += 1;
        }

        log.episodes.push(EpisodeSummary {
            episode,
            outcome: status(&s),
            steps,
            max_weight_delta: max_dw,
            alpha,
            beta,
        });

        alpha = (alpha * cfg.alpha_decay).max(cfg.alpha_floor);
        beta = (beta - cfg.beta_decay).max(BETA_FLOOR);
        episode += 1;

        let converged = episode >= cfg.n_train && max_dw <= cfg.tol;
        if converged || episode >= hard_cap {
            break;
        }
    }

    log.final_weights = w;
    Ok((w, log))
}
