//! Single-path DTRW generation: waiting-time draws, nearest-neighbour jump
//! decoding, boundary handling, and site snapshots at requested time steps.

use alloc::vec::Vec;
use rand::Rng;
use thiserror::Error;

use crate::waiting::WaitingTimeModel;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum WalkError {
    #[error("jump probability must lie in [0, 1], got {0}")]
    InvalidJumpProbability(f64),
    #[error("self-jump complement r must lie in (0, 1], got {0}")]
    InvalidSelfJump(f64),
    #[error("lattice spacing must be positive, got {0}")]
    InvalidSpacing(f64),
    #[error("bounded domain needs i_min < i_max, got [{i_min}, {i_max}]")]
    DegenerateDomain { i_min: i64, i_max: i64 },
}

/// Nearest-neighbour jump law with self-jumps: left with `r * p_left`, right
/// with `r * p_right`, stay with `1 - r`.
#[derive(Debug, Clone, Copy)]
pub struct JumpModel {
    p_left: f64,
    p_right: f64,
    r: f64,
}

impl JumpModel {
    pub fn new(p_right: f64, r: f64) -> Result<Self, WalkError> {
        if !(0.0..=1.0).contains(&p_right) || !p_right.is_finite() {
            return Err(WalkError::InvalidJumpProbability(p_right));
        }
        if !(r > 0.0 && r <= 1.0) || !r.is_finite() {
            return Err(WalkError::InvalidSelfJump(r));
        }
        Ok(Self {
            p_left: 1.0 - p_right,
            p_right,
            r,
        })
    }

    /// Symmetric jumps (`p_left = p_right = 1/2`).
    pub fn symmetric(r: f64) -> Result<Self, WalkError> {
        Self::new(0.5, r)
    }

    pub fn p_left(&self) -> f64 {
        self.p_left
    }

    pub fn p_right(&self) -> f64 {
        self.p_right
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Fixed decoding of one uniform draw, so path replay is reproducible
    /// across implementations: `u < r p_left` -> left, `u < r` -> right,
    /// otherwise a self-jump.
    pub fn decode(&self, u: f64) -> i64 {
        if u < self.r * self.p_left {
            -1
        } else if u < self.r {
            1
        } else {
            0
        }
    }
}

/// Discrete realization of a zero-flux wall.
///
/// `ReflectStay` converts an outward jump into a stay; `ReflectBounce`
/// mirrors it across the wall node onto the neighbour. Both conserve
/// probability exactly; the master-equation solver uses the same rule
/// bit-for-bit so Monte Carlo and finite differences share one operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    ReflectStay,
    ReflectBounce,
}

/// 1-D lattice, either unbounded or a bounded reflecting interval, with the
/// site-to-coordinate map `x(i) = x_left + (i - i_min) delta_x`.
#[derive(Debug, Clone)]
pub enum LatticeDomain {
    Unbounded {
        delta_x: f64,
    },
    Bounded {
        i_min: i64,
        i_max: i64,
        delta_x: f64,
        x_left: f64,
        policy: BoundaryPolicy,
    },
}

impl LatticeDomain {
    pub fn unbounded(delta_x: f64) -> Result<Self, WalkError> {
        if !(delta_x > 0.0) || !delta_x.is_finite() {
            return Err(WalkError::InvalidSpacing(delta_x));
        }
        Ok(Self::Unbounded { delta_x })
    }

    pub fn bounded(
        i_min: i64,
        i_max: i64,
        delta_x: f64,
        x_left: f64,
        policy: BoundaryPolicy,
    ) -> Result<Self, WalkError> {
        if !(delta_x > 0.0) || !delta_x.is_finite() {
            return Err(WalkError::InvalidSpacing(delta_x));
        }
        if i_min >= i_max {
            return Err(WalkError::DegenerateDomain { i_min, i_max });
        }
        Ok(Self::Bounded {
            i_min,
            i_max,
            delta_x,
            x_left,
            policy,
        })
    }

    /// Sites `-half_width..=half_width` centered on the origin, walls on the
    /// outermost nodes.
    pub fn centered_interval(
        half_width: i64,
        delta_x: f64,
        policy: BoundaryPolicy,
    ) -> Result<Self, WalkError> {
        Self::bounded(
            -half_width,
            half_width,
            delta_x,
            -(half_width as f64) * delta_x,
            policy,
        )
    }

    pub fn delta_x(&self) -> f64 {
        match self {
            Self::Unbounded { delta_x } | Self::Bounded { delta_x, .. } => *delta_x,
        }
    }

    pub fn contains(&self, site: i64) -> bool {
        match self {
            Self::Unbounded { .. } => true,
            Self::Bounded { i_min, i_max, .. } => (*i_min..=*i_max).contains(&site),
        }
    }

    /// Coordinate of a site; the unbounded lattice puts site 0 at x = 0.
    pub fn x(&self, site: i64) -> f64 {
        match self {
            Self::Unbounded { delta_x } => site as f64 * delta_x,
            Self::Bounded {
                i_min,
                delta_x,
                x_left,
                ..
            } => x_left + (site - i_min) as f64 * delta_x,
        }
    }

    pub fn site_count(&self) -> Option<usize> {
        match self {
            Self::Unbounded { .. } => None,
            Self::Bounded { i_min, i_max, .. } => Some((i_max - i_min + 1) as usize),
        }
    }

    pub fn policy(&self) -> Option<BoundaryPolicy> {
        match self {
            Self::Unbounded { .. } => None,
            Self::Bounded { policy, .. } => Some(*policy),
        }
    }

    /// Applies the boundary rule to a proposed move from `current_site`.
    pub fn apply_boundary(&self, proposed_site: i64, current_site: i64) -> i64 {
        match self {
            Self::Unbounded { .. } => proposed_site,
            Self::Bounded {
                i_min,
                i_max,
                policy,
                ..
            } => {
                if proposed_site >= *i_min && proposed_site <= *i_max {
                    proposed_site
                } else {
                    match policy {
                        BoundaryPolicy::ReflectStay => current_site,
                        BoundaryPolicy::ReflectBounce => {
                            let mirrored = if proposed_site < *i_min {
                                2 * i_min - proposed_site
                            } else {
                                2 * i_max - proposed_site
                            };
                            mirrored.clamp(*i_min, *i_max)
                        }
                    }
                }
            }
        }
    }
}

/// State of one walker after being simulated to a target time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathOutcome {
    pub final_site: i64,
    /// Jump events executed, including self-jumps and reflected jumps.
    pub jumps_taken: u64,
    pub steps_simulated: u64,
}

/// Like [`PathOutcome`] but with the site recorded at each requested time.
#[derive(Debug, Clone)]
pub struct SnapshotOutcome {
    /// One entry per report time, in order.
    pub sites: Vec<i64>,
    pub jumps_taken: u64,
    pub waiting_draws: u64,
    pub steps_simulated: u64,
}

/// Walks one path to `n_steps`, recording the occupied site at each of the
/// sorted `report_times` (all `<= n_steps`).
///
/// Per jump event the path consumes one waiting draw and one jump draw, in
/// that order; a waiting draw that overshoots the horizon ends the path
/// without a jump draw. A jump landing exactly on a report time is included
/// in that snapshot. The waiting-time law itself is never truncated.
pub fn simulate_path_with_snapshots<R: Rng + ?Sized>(
    waiting: &mut WaitingTimeModel,
    jumps: &JumpModel,
    domain: &LatticeDomain,
    start_site: i64,
    n_steps: u64,
    report_times: &[u64],
    rng: &mut R,
) -> SnapshotOutcome {
    debug_assert!(domain.contains(start_site));
    debug_assert!(report_times.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(report_times.last().is_none_or(|&t| t <= n_steps));
    let mut sites = Vec::with_capacity(report_times.len());
    let mut site = start_site;
    let mut now: u64 = 0;
    let mut jumps_taken: u64 = 0;
    let mut waiting_draws: u64 = 0;
    let mut next_report = 0usize;
    while now < n_steps {
        let u: f64 = rng.random();
        waiting_draws += 1;
        let wait = waiting.sample(u);
        let jump_time = now.saturating_add(wait);
        if jump_time > n_steps {
            break;
        }
        while next_report < report_times.len() && report_times[next_report] < jump_time {
            sites.push(site);
            next_report += 1;
        }
        now = jump_time;
        let v: f64 = rng.random();
        let proposed = site + jumps.decode(v);
        site = domain.apply_boundary(proposed, site);
        jumps_taken += 1;
    }
    while next_report < report_times.len() {
        sites.push(site);
        next_report += 1;
    }
    SnapshotOutcome {
        sites,
        jumps_taken,
        waiting_draws,
        steps_simulated: n_steps,
    }
}

/// Walks one path and reports the site occupied at time step `n_steps`.
pub fn simulate_path<R: Rng + ?Sized>(
    waiting: &mut WaitingTimeModel,
    jumps: &JumpModel,
    domain: &LatticeDomain,
    start_site: i64,
    n_steps: u64,
    rng: &mut R,
) -> PathOutcome {
    let report = [n_steps];
    let out = simulate_path_with_snapshots(
        waiting, jumps, domain, start_site, n_steps, &report, rng,
    );
    PathOutcome {
        final_site: out.sites[0],
        jumps_taken: out.jumps_taken,
        steps_simulated: n_steps,
    }
}
