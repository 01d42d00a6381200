//! Discrete-time game engine: state, physical action realizations,
//! single-step dynamics, relay assignment, and termination detection.

use crate::error::{Error, Result};
use crate::time_metrics::{time_to_capture, KinematicParams, TimeToEvent};
use crate::vec2::{Vec2, ZERO};

/// Full state of one reach-avoid game. Treated as an immutable value:
/// `step` returns a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub evader: Vec2,
    pub pursuers: Vec<Vec2>,
    pub target: Vec2,
    pub v_e: f64,
    pub v_p: Vec<f64>,
    /// Sampling period Δt.
    pub dt: f64,
    /// Capture radius.
    pub ell: f64,
    /// Target tolerance.
    pub eps: f64,
    pub stage: u32,
    pub max_stage: u32,
}

/// Group-level pursuer pure strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PursuerAction {
    /// Only the pursuer with minimum time-to-capture moves.
    Relay,
    /// Every pursuer closes on the evader.
    AllPursue,
}

impl PursuerAction {
    pub const ALL: [PursuerAction; 2] = [PursuerAction::Relay, PursuerAction::AllPursue];

    pub fn index(self) -> usize {
        match self {
            PursuerAction::Relay => 0,
            PursuerAction::AllPursue => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PursuerAction::Relay => "relay",
            PursuerAction::AllPursue => "all_pursue",
        }
    }
}

/// Evader pure strategies in the feature-based action space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaderAction {
    /// Flee radially from the pursuer with minimum time-to-capture.
    EvadeNearest,
    /// Head into the largest angular gap between the pursuers.
    EvadeGroup,
    /// Head straight for the target.
    SeekTarget,
    /// Move normal to the line of sight of the nearest pursuer,
    /// on the side of the target.
    NormalEvade,
}

impl EvaderAction {
    pub const ALL: [EvaderAction; 4] = [
        EvaderAction::EvadeNearest,
        EvaderAction::EvadeGroup,
        EvaderAction::SeekTarget,
        EvaderAction::NormalEvade,
    ];

    pub fn index(self) -> usize {
        match self {
            EvaderAction::EvadeNearest => 0,
            EvaderAction::EvadeGroup => 1,
            EvaderAction::SeekTarget => 2,
            EvaderAction::NormalEvade => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EvaderAction::EvadeNearest => "evade_nearest",
            EvaderAction::EvadeGroup => "evade_group",
            EvaderAction::SeekTarget => "seek_target",
            EvaderAction::NormalEvade => "normal_evade",
        }
    }
}

/// Outcome classification of a state.
///
/// Capture takes precedence over target arrival at the same stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameStatus {
    Ongoing,
    /// Captured by the pursuer at this index (0-based).
    Captured(usize),
    TargetReached,
    TimedOut,
}

impl GameStatus {
    pub fn is_terminal(self) -> bool {
        !matches!(self, GameStatus::Ongoing)
    }
}

impl GameState {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        evader: Vec2,
        pursuers: Vec<Vec2>,
        target: Vec2,
        v_e: f64,
        v_p: Vec<f64>,
        dt: f64,
        ell: f64,
        eps: f64,
        max_stage: u32,
    ) -> Result<Self> {
        let s = GameState {
            evader,
            pursuers,
            target,
            v_e,
            v_p,
            dt,
            ell,
            eps,
            stage: 0,
            max_stage,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pursuers.is_empty() {
            return Err(Error::InvalidParameter("at least one pursuer is required".into()));
        }
        if self.pursuers.len() != self.v_p.len() {
            return Err(Error::InvalidParameter(format!(
                "{} pursuers but {} pursuer speeds",
                self.pursuers.len(),
                self.v_p.len()
            )));
        }
        let finite = self.evader.is_finite()
            && self.target.is_finite()
            && self.pursuers.iter().all(|p| p.is_finite())
            && self.v_p.iter().all(|v| v.is_finite())
            && self.v_e.is_finite()
            && self.dt.is_finite()
            && self.ell.is_finite()
            && self.eps.is_finite();
        if !finite {
            return Err(Error::NonFiniteInput("game state"));
        }
        if self.v_e <= 0.0 || self.v_p.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter("player speeds must be positive".into()));
        }
        if self.dt <= 0.0 || self.ell <= 0.0 || self.eps <= 0.0 {
            return Err(Error::InvalidParameter(
                "dt, capture radius, and target tolerance must be positive".into(),
            ));
        }
        if self.stage > self.max_stage {
            return Err(Error::InvalidParameter("stage exceeds max_stage".into()));
        }
        Ok(())
    }

    pub fn n_pursuers(&self) -> usize {
        self.pursuers.len()
    }

    /// Game horizon implied by the stage cap.
    pub fn horizon(&self) -> f64 {
        f64::from(self.max_stage) * self.dt
    }

    /// Kinematic parameters of the duel against pursuer `i`.
    pub fn duel_params(&self, i: usize) -> KinematicParams {
        self.duel_params_with_horizon(i, self.horizon().max(self.dt))
    }

    /// Duel parameters with an explicit horizon.
    pub fn duel_params_with_horizon(&self, i: usize, t_max: f64) -> KinematicParams {
        KinematicParams {
            v_e: self.v_e,
            v_p: self.v_p[i],
            ell: self.ell,
            t_max,
        }
    }

    /// Min-max time-to-capture against pursuer `i`.
    pub fn capture_time(&self, i: usize) -> TimeToEvent {
        time_to_capture(self.evader, self.pursuers[i], &self.duel_params(i))
            .expect("finite state positions")
    }
}

/// Index of the pursuer with minimum time-to-capture. Finite times precede
/// `Unreachable`; ties break to the lowest index.
pub fn active_pursuer(s: &GameState) -> usize {
    (0..s.n_pursuers())
        .map(|i| (s.capture_time(i), i))
        .min()
        .expect("at least one pursuer")
        .1
}

/// Directions for the whole pursuer group under action `a`.
/// Inactive pursuers get the zero input.
pub fn realize_pursuer_action(a: PursuerAction, s: &GameState) -> Vec<Vec2> {
    match a {
        PursuerAction::Relay => realize_single_pursuer(s, active_pursuer(s)),
        PursuerAction::AllPursue => (0..s.n_pursuers())
            .map(|i| chase_direction(s, i))
            .collect(),
    }
}

/// Directions when only pursuer `chaser` engages and the rest hold position.
pub fn realize_single_pursuer(s: &GameState, chaser: usize) -> Vec<Vec2> {
    (0..s.n_pursuers())
        .map(|i| if i == chaser { chase_direction(s, i) } else { ZERO })
        .collect()
}

fn chase_direction(s: &GameState, i: usize) -> Vec2 {
    // Coincident positions cannot occur at an ongoing stage: capture fires
    // first because ℓ > 0.
    (s.evader - s.pursuers[i]).normalized().unwrap_or(ZERO)
}

/// Unit direction realizing the evader action `a` at state `s`.
pub fn realize_evader_action(a: EvaderAction, s: &GameState) -> Result<Vec2> {
    match a {
        EvaderAction::EvadeNearest => Ok(flee_direction(s)),
        EvaderAction::EvadeGroup => Ok(largest_gap_direction(s)),
        EvaderAction::SeekTarget => (s.target - s.evader)
            .normalized()
            .ok_or(Error::DegenerateInput("evader already at target")),
        EvaderAction::NormalEvade => {
            let ccw = flee_direction(s).perp_ccw();
            let to_target = s.target - s.evader;
            // Pick the normal that makes progress toward the target;
            // exact tie goes to the counterclockwise normal.
            if ccw.dot(to_target) >= 0.0 {
                Ok(ccw)
            } else {
                Ok(-ccw)
            }
        }
    }
}

fn flee_direction(s: &GameState) -> Vec2 {
    let n = active_pursuer(s);
    (s.evader - s.pursuers[n]).normalized().unwrap_or(ZERO)
}

/// Bisector of the largest angular gap between the lines of sight from the
/// evader to the pursuers.
///
/// Pursuers are ordered by polar angle about the evader; the gap between
/// consecutive lines of sight (wrapping around) with the largest width wins.
/// Equal widths prefer the gap bounded by the longer line of sight, then the
/// lowest gap index. A single pursuer leaves the full circle as the gap, so
/// the direction points straight away from it.
pub fn largest_gap_direction(s: &GameState) -> Vec2 {
    let mut rays: Vec<(f64, f64)> = s
        .pursuers
        .iter()
        .map(|&p| {
            let los = p - s.evader;
            (los.polar_angle(), los.norm())
        })
        .collect();
    rays.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let tau = std::f64::consts::TAU;
    let n = rays.len();
    let mut best: Option<(f64, f64, f64)> = None; // (width, bound_dist, start_angle)
    for i in 0..n {
        let (start, d_start) = rays[i];
        let (next, d_next) = rays[(i + 1) % n];
        let width = if n == 1 {
            tau
        } else {
            let mut w = next - start;
            if i + 1 == n {
                w += tau;
            }
            w
        };
        let bound = d_start.max(d_next);
        let better = match best {
            None => true,
            Some((bw, bd, _)) => width > bw + 1e-12 || ((width - bw).abs() <= 1e-12 && bound > bd),
        };
        if better {
            best = Some((width, bound, start));
        }
    }
    let (width, _, start) = best.expect("at least one pursuer");
    Vec2::from_angle(start + width / 2.0)
}

/// One step of the discrete dynamics: players move at full speed along their
/// (unit or zero) inputs for one sampling period.
pub fn step(s: &GameState, evader_dir: Vec2, pursuer_dirs: &[Vec2]) -> GameState {
    debug_assert_eq!(pursuer_dirs.len(), s.n_pursuers());
    let mut next = s.clone();
    next.evader = s.evader + evader_dir * (s.v_e * s.dt);
    for (i, p) in next.pursuers.iter_mut().enumerate() {
        *p = *p + pursuer_dirs[i] * (s.v_p[i] * s.dt);
    }
    next.stage = s.stage + 1;
    next
}

/// Classify a state. Capture (lowest pursuer index) takes precedence over
/// target arrival, which takes precedence over the stage cap.
pub fn status(s: &GameState) -> GameStatus {
    for (i, &p) in s.pursuers.iter().enumerate() {
        if (p - s.evader).norm() <= s.ell {
            return GameStatus::Captured(i);
        }
    }
    if (s.evader - s.target).norm() <= s.eps {
        return GameStatus::TargetReached;
    }
    if s.stage >= s.max_stage {
        return GameStatus::TimedOut;
    }
    GameStatus::Ongoing
}
