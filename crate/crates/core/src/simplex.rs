//! Dense revised simplex for small linear programs in packing form:
//!
//! ```text
//! maximize  cᵀx   subject to  A x ≤ b,  x ≥ 0,  with b ≥ 0.
//! ```
//!
//! The slack basis is immediately feasible, so no phase-one is needed.
//! Bland's rule picks the entering column, which guarantees termination.
//!
//! Problems here are tiny — a few dozen rows at most — so every iteration
//! refactorizes the basis from the original data (one partially pivoted LU)
//! instead of updating a tableau. A tableau accumulates round-off with every
//! pivot and, on the near-degenerate payoff matrices this crate produces
//! (several almost-identical rows or columns), that drift is enough to pick
//! wrong leaving rows and certify infeasible bases. Refactorizing makes each
//! iteration's arithmetic one-shot accurate, at a cost that is irrelevant at
//! this scale.

use crate::error::{Error, Result};

/// Reduced costs below this magnitude count as optimal. Near-degenerate
/// games price almost-tied columns at noise level; entering them zigzags
/// between equivalent bases without improving anything.
const COST_EPS: f64 = 1e-8;
/// Direction components below this magnitude cannot block the step.
const ZERO_EPS: f64 = 1e-11;
/// Prefer entering variables whose ratio-test pivot is at least this big;
/// a smaller pivot means the entering column is nearly dependent on the
/// current basis and the next factorization would be ill-conditioned.
const PIVOT_MIN: f64 = 1e-7;
/// Degenerate basics evaluated at the true right-hand side after a
/// perturbed walk may sit this far negative before the solve is rejected;
/// the duality check downstream arbitrates overall solution quality.
const DEGENERATE_FEAS_EPS: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

/// Dense LU factorization with partial pivoting, PA = LU.
struct Lu {
    lu: Vec<Vec<f64>>,
    perm: Vec<usize>,
    n: usize,
}

impl Lu {
    fn factor(a: Vec<Vec<f64>>) -> Result<Lu> {
        let n = a.len();
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_mag) = (k..n)
                .map(|i| (i, lu[i][k].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty column");
            if pivot_mag < 1e-12 {
                return Err(Error::Solver {
                    iterations: 0,
                    reason: format!("numerically singular basis (pivot {pivot_mag:.3e})"),
                });
            }
            lu.swap(k, pivot_row);
            perm.swap(k, pivot_row);
            let pivot = lu[k][k];
            let (head, tail) = lu.split_at_mut(k + 1);
            let pivot_tail = &head[k][k + 1..];
            for row in tail {
                let factor = row[k] / pivot;
                row[k] = factor;
                for (v, p) in row[k + 1..].iter_mut().zip(pivot_tail) {
                    *v -= factor * p;
                }
            }
        }
        Ok(Lu { lu, perm, n })
    }

    /// Solve `B y = rhs`.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            for j in 0..i {
                y[i] -= self.lu[i][j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[i][j] * y[j];
            }
            y[i] /= self.lu[i][i];
        }
        y
    }

    /// Solve `Bᵀ y = rhs`.
    fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = rhs.to_vec();
        // Uᵀ is lower triangular.
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[j][i] * y[j];
            }
            y[i] /= self.lu[i][i];
        }
        // Lᵀ is upper triangular with unit diagonal.
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[j][i] * y[j];
            }
        }
        let mut out = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = y[i];
        }
        out
    }
}

/// Column of the constraint matrix `[A | I]` for variable `var`.
fn column(a: &[Vec<f64>], n: usize, var: usize, out: &mut [f64]) {
    let m = a.len();
    if var < n {
        for i in 0..m {
            out[i] = a[i][var];
        }
    } else {
        out.fill(0.0);
        out[var - n] = 1.0;
    }
}

fn cost(c: &[f64], var: usize) -> f64 {
    if var < c.len() {
        c[var]
    } else {
        0.0
    }
}

/// Solve `max cᵀx s.t. Ax ≤ b, x ≥ 0` for dense `a` in row-major order.
pub fn maximize_packing(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    match solve_with_rhs(c, a, b, b) {
        Err(Error::Solver { .. }) => {
            // Degenerate geometry can stall the walk in zero-ratio pivots.
            // Retry with a lexicographic-style perturbation of the right-hand
            // side, which makes every ratio distinct; the solution is then
            // extracted for the true right-hand side from the final basis.
            let m = a.len();
            let perturbed: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(i, &bi)| bi + 1e-7 * (i + 1) as f64 / (m + 1) as f64)
                .collect();
            solve_with_rhs(c, a, &perturbed, b)
        }
        other => other,
    }
}

/// Run the simplex walk against `b_walk`, then evaluate the final basis at
/// `b_true`.
fn solve_with_rhs(c: &[f64], a: &[Vec<f64>], b_walk: &[f64], b_true: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b_walk.len(), m);
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert!(b_walk.iter().all(|&bi| bi >= 0.0));

    let mut basis: Vec<usize> = (n..n + m).collect();
    let pivot_budget = 100 * (m + n) + 200;
    let mut col_buf = vec![0.0; m];

    for iteration in 0..=pivot_budget {
        let basis_matrix: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|slot| {
                        let var = basis[slot];
                        if var < n {
                            a[i][var]
                        } else if var - n == i {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let lu = Lu::factor(basis_matrix)?;
        let x_basic = lu.solve(b_walk);

        // Pricing: lambda = B^-T c_B, reduced cost c_j - lambda . A_j.
        // Entering candidates come in index order (Bland); among them the
        // first whose ratio-test pivot is well-conditioned wins, falling
        // back to the first candidate when every pivot is tiny.
        let c_basic: Vec<f64> = basis.iter().map(|&v| cost(c, v)).collect();
        let lambda = lu.solve_transpose(&c_basic);
        let mut chosen: Option<(usize, usize)> = None;
        for var in 0..n + m {
            if basis.contains(&var) {
                continue;
            }
            column(a, n, var, &mut col_buf);
            let reduced = cost(c, var) - lambda.iter().zip(&col_buf).map(|(l, a)| l * a).sum::<f64>();
            if reduced <= COST_EPS {
                continue;
            }

            // Ratio test; ties break to the lowest basis variable index.
            let direction = lu.solve(&col_buf);
            let mut leave: Option<(usize, f64, f64)> = None;
            for slot in 0..m {
                let d = direction[slot];
                if d > ZERO_EPS {
                    let ratio = x_basic[slot].max(0.0) / d;
                    let replace = match leave {
                        None => true,
                        Some((ls, lr, _)) => {
                            ratio < lr - ZERO_EPS
                                || (ratio <= lr + ZERO_EPS && basis[slot] < basis[ls])
                        }
                    };
                    if replace {
                        leave = Some((slot, ratio, d));
                    }
                }
            }
            let Some((slot, _, pivot)) = leave else {
                return Err(Error::Solver {
                    iterations: iteration,
                    reason: "unbounded objective".into(),
                });
            };
            if pivot >= PIVOT_MIN {
                chosen = Some((var, slot));
                break;
            }
            if chosen.is_none() {
                chosen = Some((var, slot));
            }
        }

        let Some((enter, leave_slot)) = chosen else {
            // Optimal. Evaluate the basis at the true right-hand side; when
            // the walk used a perturbed one, degenerate basics may come out
            // a shade negative there.
            let x_final = lu.solve(b_true);
            let mut x = vec![0.0; n];
            for (slot, &var) in basis.iter().enumerate() {
                let value = x_final[slot];
                if value < -DEGENERATE_FEAS_EPS {
                    return Err(Error::Solver {
                        iterations: iteration,
                        reason: format!("infeasible basis at termination (value {value:.3e})"),
                    });
                }
                if var < n {
                    x[var] = value.max(0.0);
                }
            }
            let objective = x.iter().zip(c).map(|(x, c)| x * c).sum();
            return Ok(LpSolution { objective, x });
        };
        basis[leave_slot] = enter;
    }

    Err(Error::Solver {
        iterations: pivot_budget,
        reason: "pivot limit exceeded without reaching optimality".into(),
    })
}
