//! Stage payoff matrices and the exact solution of the two-player zero-sum
//! matrix game.
//!
//! Rows are pure strategies of the pursuer group (the minimizer), columns
//! are pure strategies of the evader (the maximizer). The saddle point in
//! mixed strategies comes from the primal/dual LP pair: the pursuer
//! minimizes the guaranteed payoff ceiling, the evader maximizes the
//! guaranteed payoff floor, and strong duality makes the two optima meet at
//! the game value.

use crate::engine::{
    realize_evader_action, realize_pursuer_action, status, step, EvaderAction, GameState,
    GameStatus, PursuerAction,
};
use crate::error::{Error, Result};
use crate::learning::{self, WeightVector};
use crate::simplex;
use crate::time_metrics::intercept_time;
use crate::vec2::{Vec2, ZERO};
use rand::Rng;

/// Probabilities this far below zero are solver round-off and get clamped;
/// anything worse is a solver failure.
const PROB_CLAMP: f64 = 1e-10;
/// Primal and dual optima must agree to this tolerance, per unit of matrix
/// scale. On non-degenerate matrices both solves land on exact optima and
/// the gap is at rounding level (~1e-13); near-degenerate stage games
/// terminate at the solver's reduced-cost noise floor, which leaves each
/// strategy suboptimal by a few parts in 1e8.
const DUALITY_TOL: f64 = 2e-7;

/// Dense stage payoff table. Entry `(i, j)` is the payoff to the evader when
/// the pursuer group plays row `i` and the evader plays column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl PayoffMatrix {
    pub fn new(entries: Vec<Vec<f64>>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let rows = entries.len();
        if rows == 0 || entries[0].is_empty() {
            return Err(Error::InvalidParameter("payoff matrix must be at least 1x1".into()));
        }
        let cols = entries[0].len();
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("payoff matrix rows differ in length".into()));
        }
        let flat: Vec<f64> = entries.into_iter().flatten().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("payoff matrix entry"));
        }
        if row_labels.len() != rows || col_labels.len() != cols {
            return Err(Error::InvalidParameter("label count does not match matrix shape".into()));
        }
        Ok(PayoffMatrix { rows, cols, entries: flat, row_labels, col_labels })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Copy with every entry multiplied by `factor`.
    fn scaled(&self, factor: f64) -> PayoffMatrix {
        PayoffMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }

    /// Transposed matrix with every entry negated: the game seen with the
    /// players' roles swapped.
    fn negated_transpose(&self) -> PayoffMatrix {
        let mut entries = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries[j * self.rows + i] = -self.get(i, j);
            }
        }
        PayoffMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
        }
    }
}

/// Probability vector over one player's pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn uniform(n: usize) -> Self {
        MixedStrategy { probs: vec![1.0 / n as f64; n] }
    }

    fn from_raw(mut probs: Vec<f64>) -> Result<Self> {
        for p in probs.iter_mut() {
            if *p < -PROB_CLAMP {
                return Err(Error::Solver {
                    iterations: 0,
                    reason: format!("strategy probability {p} below clamp tolerance"),
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Solver {
                iterations: 0,
                reason: format!("strategy mass {total} is not normalizable"),
            });
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        Ok(MixedStrategy { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Saddle point of one stage game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub value: f64,
    pub pursuer_strategy: MixedStrategy,
    pub evader_strategy: MixedStrategy,
}

/// Solve the zero-sum game exactly via the primal/dual LP pair.
///
/// Each side is reduced to a packing LP by shifting the payoffs positive and
/// rescaling the strategy by the game value; the evader's program is the
/// pursuer's program on the negated transpose. Solving both directions
/// independently lets us assert the strong-duality identity numerically. The
/// matrix is normalized to unit scale first (strategies are invariant under
/// positive affine maps of the payoffs), and the reported value comes from
/// the strategies' own guarantees, which avoids amplifying simplex round-off
/// through the packing reciprocal.
pub fn solve_zero_sum(m: &PayoffMatrix) -> Result<GameSolution> {
    // Every strategy is optimal in an all-equal game; return the canonical
    // uniform representative rather than an arbitrary simplex vertex.
    if m.max_entry() == m.min_entry() {
        return Ok(GameSolution {
            value: m.min_entry(),
            pursuer_strategy: MixedStrategy::uniform(m.rows()),
            evader_strategy: MixedStrategy::uniform(m.cols()),
        });
    }

    let scale = m.max_entry().abs().max(m.min_entry().abs()).max(1.0);
    let normalized = m.scaled(1.0 / scale);
    let pursuer_strategy = minimizer_strategy(&normalized)?;
    let evader_strategy = minimizer_strategy(&normalized.negated_transpose())?;

    // The minimizer's ceiling and the maximizer's floor in original units.
    let pursuer_value = (0..m.cols())
        .map(|j| {
            (0..m.rows())
                .map(|i| m.get(i, j) * pursuer_strategy.probs()[i])
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let evader_value = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| m.get(i, j) * evader_strategy.probs()[j])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);

    let gap = (pursuer_value - evader_value).abs();
    if gap > DUALITY_TOL * scale {
        return Err(Error::Solver {
            iterations: 0,
            reason: format!(
                "duality gap {gap:.3e} exceeds {:.3e} \
                 (minimizer {pursuer_value}, maximizer {evader_value})",
                DUALITY_TOL * scale
            ),
        });
    }

    Ok(GameSolution {
        value: 0.5 * (pursuer_value + evader_value),
        pursuer_strategy,
        evader_strategy,
    })
}

/// Optimal mixed strategy for the row player minimizing the payoff `m`
/// awards to the column player.
///
/// With payoffs shifted so the value `v` is at least one, the substitution
/// `x = π / v` turns `min v : Mᵀπ ≤ v·1, π ∈ simplex` into the packing LP
/// `max 1ᵀx : Mᵀx ≤ 1, x ≥ 0`, whose optimum is `1/v`.
fn minimizer_strategy(m: &PayoffMatrix) -> Result<MixedStrategy> {
    let shift = 1.0 - m.min_entry();
    let rows = m.rows();
    let cols = m.cols();

    let ones = vec![1.0; rows];
    let transpose_shifted: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j) + shift).collect())
        .collect();
    let rhs = vec![1.0; cols];

    let sol = simplex::maximize_packing(&ones, &transpose_shifted, &rhs)?;
    if sol.objective <= 0.0 {
        return Err(Error::Solver {
            iterations: 0,
            reason: format!("non-positive packing optimum {}", sol.objective),
        });
    }
    MixedStrategy::from_raw(sol.x)
}

/// Draw a pure-strategy index by inverse CDF over the mixed strategy.
pub fn sample_strategy<R: Rng + ?Sized>(strategy: &MixedStrategy, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in strategy.probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    strategy.probs.len() - 1
}

fn ongoing_or_err(s: &GameState, t_max: f64) -> Result<()> {
    if status(s) != GameStatus::Ongoing {
        return Err(Error::DegenerateInput("stage game requires an ongoing state"));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon must be positive, got {t_max}")));
    }
    Ok(())
}

/// Evader pure-strategy direction for the distance/heading game: away from
/// pursuer `j` for `j < N`, straight at the target for `j = N`.
pub fn evasion_column_direction(s: &GameState, j: usize) -> Vec2 {
    if j < s.n_pursuers() {
        (s.evader - s.pursuers[j]).normalized().unwrap_or(ZERO)
    } else {
        (s.target - s.evader).normalized().unwrap_or(ZERO)
    }
}

/// N×(N+1) payoff built from capture times and target heading.
///
/// Row `i`: pursuer `i` alone gives chase. Column `j < N`: the evader flees
/// pursuer `j`; column `N`: the evader heads for the target. The capture-time
/// block is clipped to the horizon, normalized by its largest entry, and
/// added to the heading cosine.
pub fn payoff_m2(s: &GameState, t_max: f64) -> Result<PayoffMatrix> {
    ongoing_or_err(s, t_max)?;
    let n = s.n_pursuers();
    let to_target = s.target - s.evader;
    let target_dist = to_target.norm();

    let columns: Vec<Vec2> = (0..=n).map(|j| evasion_column_direction(s, j)).collect();

    let mut evasion = vec![vec![0.0; n + 1]; n];
    let mut heading = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        let params = s.duel_params_with_horizon(i, t_max);
        for (j, &dir) in columns.iter().enumerate() {
            let t = intercept_time(s.evader, s.pursuers[i], dir, &params)?;
            evasion[i][j] = t.capped(t_max);
            heading[i][j] = if target_dist > 0.0 {
                dir.dot(to_target) / target_dist
            } else {
                0.0
            };
        }
    }

    let max_time = evasion
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if max_time <= 0.0 {
        return Err(Error::DegenerateStage);
    }

    let entries: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..=n).map(|j| evasion[i][j] / max_time + heading[i][j]).collect())
        .collect();

    let row_labels = (0..n).map(|i| format!("pursue{}", i + 1)).collect();
    let mut col_labels: Vec<String> = (0..n).map(|j| format!("evade{}", j + 1)).collect();
    col_labels.push("seek_target".into());
    PayoffMatrix::new(entries, row_labels, col_labels)
}

fn feature_action_labels() -> (Vec<String>, Vec<String>) {
    (
        PursuerAction::ALL.iter().map(|p| p.label().to_string()).collect(),
        EvaderAction::ALL.iter().map(|e| e.label().to_string()).collect(),
    )
}

/// 2×4 payoff of learned Q-values: entry `(i, j)` is the linear Q-function
/// evaluated on the features of playing `(p_i, e_j)` from `s`.
pub fn payoff_m1(s: &GameState, w: &WeightVector, t_max: f64) -> Result<PayoffMatrix> {
    ongoing_or_err(s, t_max)?;
    let mut entries = vec![vec![0.0; EvaderAction::ALL.len()]; PursuerAction::ALL.len()];
    for (i, &p) in PursuerAction::ALL.iter().enumerate() {
        for (j, &e) in EvaderAction::ALL.iter().enumerate() {
            let z = learning::features(s, p, e, t_max)?;
            entries[i][j] = learning::q_value(w, &z);
        }
    }
    let (row_labels, col_labels) = feature_action_labels();
    PayoffMatrix::new(entries, row_labels, col_labels)
}

/// 2×4 payoff without learning: heading reward plus the worst squashed
/// time-ratio of the successor state.
pub fn payoff_m3(s: &GameState, t_max: f64) -> Result<PayoffMatrix> {
    ongoing_or_err(s, t_max)?;
    let mut entries = vec![vec![0.0; EvaderAction::ALL.len()]; PursuerAction::ALL.len()];
    for (i, &p) in PursuerAction::ALL.iter().enumerate() {
        for (j, &e) in EvaderAction::ALL.iter().enumerate() {
            let h = learning::heading(s, e)?;
            let evader_dir = realize_evader_action(e, s)?;
            let pursuer_dirs = realize_pursuer_action(p, s);
            let next = step(s, evader_dir, &pursuer_dirs);
            let psi = learning::learning_state(&next, t_max);
            entries[i][j] = h + psi.min_ratio();
        }
    }
    let (row_labels, col_labels) = feature_action_labels();
    PayoffMatrix::new(entries, row_labels, col_labels)
}
