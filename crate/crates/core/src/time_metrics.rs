//! Time metrics of the reach-avoid game.
//!
//! Every metric reduces to the minimum nonnegative root of the capture
//! quadratic in the time-to-go `t`,
//!
//! ```text
//! (v_e² − v_p²) t² + 2 (⟨r, v_e u_e⟩ − ℓ v_p) t + ⟨r, r⟩ − ℓ² = 0,
//! ```
//!
//! which states that a constant-bearing pursuer travelling `v_p t` comes
//! within the capture radius `ℓ` of an evader that starts at relative
//! offset `r` and holds the fixed unit direction `u_e` at speed `v_e`.

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Speeds, capture radius, and game horizon shared by the time metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicParams {
    /// Evader speed (> 0).
    pub v_e: f64,
    /// Pursuer speed (> 0).
    pub v_p: f64,
    /// Capture radius (≥ 0).
    pub ell: f64,
    /// Horizon used by callers to cap unreachable events (> 0).
    pub t_max: f64,
}

impl KinematicParams {
    pub fn new(v_e: f64, v_p: f64, ell: f64, t_max: f64) -> Result<Self> {
        let p = KinematicParams { v_e, v_p, ell, t_max };
        if !(v_e.is_finite() && v_p.is_finite() && ell.is_finite() && t_max.is_finite()) {
            return Err(Error::NonFiniteInput("kinematic parameters"));
        }
        if v_e <= 0.0 || v_p <= 0.0 || t_max <= 0.0 || ell < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "speeds and horizon must be positive, capture radius nonnegative \
                 (v_e={v_e}, v_p={v_p}, ell={ell}, t_max={t_max})"
            )));
        }
        // A horizon shorter than the time to cross the capture disk is meaningless.
        if ell >= t_max * v_e.min(v_p) {
            return Err(Error::InvalidParameter(format!(
                "horizon too short for capture radius (ell={ell}, t_max={t_max})"
            )));
        }
        Ok(p)
    }
}

/// Nonnegative event time, or a marker that the event never occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeToEvent {
    Finite(f64),
    Unreachable,
}

impl TimeToEvent {
    pub fn is_finite(self) -> bool {
        matches!(self, TimeToEvent::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            TimeToEvent::Finite(t) => Some(t),
            TimeToEvent::Unreachable => None,
        }
    }

    /// Event time clipped to the horizon; `Unreachable` maps to `t_max`.
    pub fn capped(self, t_max: f64) -> f64 {
        match self {
            TimeToEvent::Finite(t) => t.min(t_max),
            TimeToEvent::Unreachable => t_max,
        }
    }
}

impl Eq for TimeToEvent {}

// Finite times order by value; every finite time precedes Unreachable.
// Finite payloads are guaranteed finite, so total_cmp is a total order here.
impl Ord for TimeToEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use TimeToEvent::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.total_cmp(b),
            (Finite(_), Unreachable) => std::cmp::Ordering::Less,
            (Unreachable, Finite(_)) => std::cmp::Ordering::Greater,
            (Unreachable, Unreachable) => std::cmp::Ordering::Equal,
        }
    }
}

impl PartialOrd for TimeToEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

// Quadratic coefficients smaller than this are treated as the exact linear
// (equal speeds) case.
const LINEAR_EPS: f64 = 1e-12;

/// Minimum nonnegative root of the capture quadratic.
///
/// `rel` is the evader position relative to the pursuer, `evader_dir` the
/// evader's fixed unit direction (or zero when the evader holds position).
/// Returns `Finite(0)` when the evader already lies inside the capture disk
/// and `Unreachable` when no nonnegative real root exists.
pub fn min_intercept_time(
    rel: Vec2,
    evader_dir: Vec2,
    params: &KinematicParams,
) -> Result<TimeToEvent> {
    if !rel.is_finite() {
        return Err(Error::NonFiniteInput("relative position"));
    }
    if !evader_dir.is_finite() {
        return Err(Error::NonFiniteInput("evader direction"));
    }
    let dir_norm = evader_dir.norm();
    if dir_norm != 0.0 && (dir_norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitDirection(dir_norm));
    }

    // Capture has already occurred.
    if rel.norm() <= params.ell {
        return Ok(TimeToEvent::Finite(0.0));
    }

    let a = params.v_e * params.v_e - params.v_p * params.v_p;
    let b = 2.0 * (rel.dot(evader_dir) * params.v_e - params.ell * params.v_p);
    let c = rel.norm_sq() - params.ell * params.ell;

    if a.abs() < LINEAR_EPS {
        // Equal speeds: b t + c = 0 with c > 0 here.
        if b >= 0.0 {
            return Ok(TimeToEvent::Unreachable);
        }
        return Ok(TimeToEvent::Finite(-c / b));
    }

    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(TimeToEvent::Unreachable);
    }
    // Cancellation-free root pair: q/a and c/q.
    let sign_b = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign_b * disc.sqrt());
    let r1 = q / a;
    let r2 = c / q;

    let mut best: Option<f64> = None;
    for root in [r1, r2] {
        if root.is_finite() && root >= 0.0 && best.is_none_or(|b| root < b) {
            best = Some(root);
        }
    }
    Ok(match best {
        Some(t) => TimeToEvent::Finite(t),
        None => TimeToEvent::Unreachable,
    })
}

/// Min-max time-to-capture: the evader flees radially away from the pursuer
/// while the pursuer intercepts on a constant bearing.
pub fn time_to_capture(evader: Vec2, pursuer: Vec2, params: &KinematicParams) -> Result<TimeToEvent> {
    let rel = evader - pursuer;
    if rel.norm() <= params.ell {
        return Ok(TimeToEvent::Finite(0.0));
    }
    let dir = rel
        .normalized()
        .ok_or(Error::DegenerateInput("evader coincides with pursuer outside capture disk"))?;
    min_intercept_time(rel, dir, params)
}

/// Time-of-intercept against an evader committed to the fixed direction `dir`.
pub fn intercept_time(
    evader: Vec2,
    pursuer: Vec2,
    dir: Vec2,
    params: &KinematicParams,
) -> Result<TimeToEvent> {
    min_intercept_time(evader - pursuer, dir, params)
}

/// Time-of-intercept against an evader headed straight for the target.
pub fn intercept_time_toward_target(
    evader: Vec2,
    pursuer: Vec2,
    target: Vec2,
    params: &KinematicParams,
) -> Result<TimeToEvent> {
    let rel = evader - pursuer;
    if rel.norm() <= params.ell {
        return Ok(TimeToEvent::Finite(0.0));
    }
    let dir = (target - evader)
        .normalized()
        .ok_or(Error::DegenerateInput("evader already at target"))?;
    min_intercept_time(rel, dir, params)
}

/// Unobstructed time for the evader to reach the target.
pub fn time_to_target(evader: Vec2, target: Vec2, v_e: f64) -> Result<f64> {
    if !evader.is_finite() || !target.is_finite() || !v_e.is_finite() {
        return Err(Error::NonFiniteInput("time_to_target"));
    }
    if v_e <= 0.0 {
        return Err(Error::InvalidParameter(format!("v_e must be positive, got {v_e}")));
    }
    Ok((target - evader).norm() / v_e)
}

/// Residual of the capture quadratic at time `t` (zero at an exact root).
pub fn capture_residual(rel: Vec2, evader_dir: Vec2, params: &KinematicParams, t: f64) -> f64 {
    let a = params.v_e * params.v_e - params.v_p * params.v_p;
    let b = 2.0 * (rel.dot(evader_dir) * params.v_e - params.ell * params.v_p);
    let c = rel.norm_sq() - params.ell * params.ell;
    a * t * t + b * t + c
}
