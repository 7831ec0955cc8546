//! Explicit time stepping of the generalized master equation:
//!
//! `U(i, n) = U(i, n-1) + sum_{m=0}^{n-1} K(n - m) (L U)(i, m)`
//!
//! where `K` is the waiting-time memory kernel and `L` the nearest-neighbour
//! lattice operator with the same boundary rule as the walker. The full
//! history is retained (no kernel truncation), so the cost of `n` steps is
//! quadratic in `n` — exactly the behaviour the complexity benchmarks
//! measure through `flux_op_count`.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::mc::DensityField;
use crate::waiting::{MemoryKernel, WaitingTimeModel};
use crate::walk::{BoundaryPolicy, JumpModel, LatticeDomain};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FdError {
    #[error("initial field mass sums to {0}, expected 1")]
    UnnormalizedInitial(f64),
    #[error("initial field extends outside the bounded domain")]
    InitialOutsideDomain,
    #[error("kernel built to {len} coefficients cannot advance to step {step}")]
    KernelTooShort { len: usize, step: usize },
    #[error("mass {mass} at site {site} fell below -1e-12 at step {step}; the scheme went unstable")]
    Unstable { step: usize, site: i64, mass: f64 },
    #[error("grid parameter must be positive, got {0}")]
    NonPositiveParameter(f64),
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("r must lie in (0, 1], got {0}")]
    InvalidR(f64),
    #[error("target time {t} is shorter than one time step {delta_t}")]
    HorizonBelowStep { t: f64, delta_t: f64 },
}

/// Solver state: domain, jump law, precomputed kernel, and the full field
/// history of a non-Markovian explicit scheme.
#[derive(Debug, Clone)]
pub struct FdState {
    domain: LatticeDomain,
    jumps: JumpModel,
    kernel: MemoryKernel,
    origin: i64,
    history: Vec<Vec<f64>>,
    lap_history: Vec<Vec<f64>>,
    flux_op_count: u64,
}

impl FdState {
    /// Prepares a solver able to advance `n_max` steps from `initial`.
    /// Kernel coefficients are precomputed once by the multiplicative
    /// recurrence; on unbounded domains the storage is sized to the largest
    /// support reachable within `n_max` steps.
    pub fn new(
        waiting: &WaitingTimeModel,
        jumps: JumpModel,
        domain: LatticeDomain,
        initial: &DensityField,
        n_max: usize,
    ) -> Result<Self, FdError> {
        let total = initial.total_mass();
        if (total - 1.0).abs() > 1e-9 {
            return Err(FdError::UnnormalizedInitial(total));
        }
        let (support_lo, support_hi) = initial.support();
        let (origin, width) = match &domain {
            LatticeDomain::Bounded { i_min, i_max, .. } => {
                if support_lo < *i_min || support_hi > *i_max {
                    return Err(FdError::InitialOutsideDomain);
                }
                (*i_min, (i_max - i_min + 1) as usize)
            }
            LatticeDomain::Unbounded { .. } => {
                let lo = support_lo - n_max as i64;
                let hi = support_hi + n_max as i64;
                (lo, (hi - lo + 1) as usize)
            }
        };
        let mut first = vec![0.0f64; width];
        for (site, mass) in initial.sites() {
            first[(site - origin) as usize] = mass;
        }
        let kernel = waiting.memory_kernel(n_max);
        let lap = lattice_op(&domain, &jumps, origin, &first);
        Ok(Self {
            domain,
            jumps,
            kernel,
            origin,
            history: vec![first],
            lap_history: vec![lap],
            flux_op_count: 0,
        })
    }

    /// Steps taken so far.
    pub fn step_counter(&self) -> usize {
        self.history.len() - 1
    }

    /// Kernel-history multiply-adds actually executed.
    pub fn flux_op_count(&self) -> u64 {
        self.flux_op_count
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn jumps(&self) -> &JumpModel {
        &self.jumps
    }

    /// Field snapshot at a completed step.
    pub fn field(&self, step: usize) -> DensityField {
        DensityField::from_mass(
            self.domain.clone(),
            step as u64,
            self.origin,
            self.history[step].clone(),
        )
        .expect("stored history stays normalized")
    }

    /// Advances one step; errors if the kernel horizon is exhausted or any
    /// site mass dips below -1e-12 (stability violation).
    pub fn step(&mut self) -> Result<(), FdError> {
        let n = self.history.len();
        if n >= self.kernel.len() {
            return Err(FdError::KernelTooShort {
                len: self.kernel.len(),
                step: n,
            });
        }
        let width = self.history[0].len();
        let mut next = self.history[n - 1].clone();
        for m in 0..n {
            let coeff = self.kernel.k(n - m);
            if coeff == 0.0 {
                continue;
            }
            let lap = &self.lap_history[m];
            for (slot, &l) in next.iter_mut().zip(lap.iter()) {
                *slot += coeff * l;
            }
            self.flux_op_count += width as u64;
        }
        for (offset, &mass) in next.iter().enumerate() {
            if mass < -1e-12 {
                return Err(FdError::Unstable {
                    step: n,
                    site: self.origin + offset as i64,
                    mass,
                });
            }
        }
        let lap = lattice_op(&self.domain, &self.jumps, self.origin, &next);
        self.history.push(next);
        self.lap_history.push(lap);
        Ok(())
    }
}

/// Advances `state` by one time step (free-function form of [`FdState::step`]).
pub fn fd_step(state: &mut FdState) -> Result<(), FdError> {
    state.step()
}

/// Runs the scheme for `n_steps` and returns the field at every step,
/// including the initial one.
pub fn fd_solve(
    waiting: &WaitingTimeModel,
    jumps: JumpModel,
    domain: LatticeDomain,
    initial: &DensityField,
    n_steps: usize,
) -> Result<Vec<DensityField>, FdError> {
    let mut state = FdState::new(waiting, jumps, domain, initial, n_steps)?;
    let mut fields = Vec::with_capacity(n_steps + 1);
    fields.push(state.field(0));
    for step in 1..=n_steps {
        state.step()?;
        fields.push(state.field(step));
    }
    Ok(fields)
}

/// One application of the jump operator to a mass vector: net inflow minus
/// outflow per site, with the boundary rule folded into the wall rows so
/// every column sums to zero (exact conservation).
fn lattice_op(
    domain: &LatticeDomain,
    jumps: &JumpModel,
    origin: i64,
    mass: &[f64],
) -> Vec<f64> {
    let r = jumps.r();
    let p_left = jumps.p_left();
    let p_right = jumps.p_right();
    let width = mass.len();
    let mut out = vec![0.0f64; width];
    for i in 0..width {
        let from_left = if i > 0 { p_right * mass[i - 1] } else { 0.0 };
        let from_right = if i + 1 < width {
            p_left * mass[i + 1]
        } else {
            0.0
        };
        out[i] = r * (from_left + from_right - mass[i]);
    }
    if let LatticeDomain::Bounded { policy, .. } = domain {
        let _ = origin;
        match policy {
            BoundaryPolicy::ReflectStay => {
                // outward attempts become stays: give the mass back
                out[0] += r * p_left * mass[0];
                out[width - 1] += r * p_right * mass[width - 1];
            }
            BoundaryPolicy::ReflectBounce => {
                // outward attempts land on the neighbour (mirror ghost node)
                out[1] += r * p_left * mass[0];
                out[width - 2] += r * p_right * mass[width - 1];
            }
        }
    }
    out
}

/// Grid calibration `delta_t = (r delta_x^2 / (2 D_alpha))^(1/alpha)` tying
/// the lattice to a target diffusion coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCalibration {
    pub delta_t: f64,
}

impl GridCalibration {
    /// Whole steps fitting into a physical time `t`.
    pub fn steps_for(&self, t: f64) -> u64 {
        libm::floor(t / self.delta_t) as u64
    }
}

pub fn calibrate_grid(
    alpha: f64,
    d_alpha: f64,
    delta_x: f64,
    r: f64,
) -> Result<GridCalibration, FdError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(FdError::InvalidAlpha(alpha));
    }
    if !(r > 0.0 && r <= 1.0) || !r.is_finite() {
        return Err(FdError::InvalidR(r));
    }
    for v in [d_alpha, delta_x] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(FdError::NonPositiveParameter(v));
        }
    }
    let delta_t = libm::pow(r * delta_x * delta_x / (2.0 * d_alpha), 1.0 / alpha);
    Ok(GridCalibration { delta_t })
}

/// Calibration that lands exactly on a requested physical time.
///
/// `t / delta_t(r_max)` is rarely an integer, so the step count is rounded
/// up and the self-jump probability lowered to keep `D_alpha` and `delta_x`
/// fixed: `n = ceil(t / delta_t(r_max))`, `delta_t = t / n`,
/// `r_eff = 2 D_alpha delta_t^alpha / delta_x^2 <= r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnappedGrid {
    pub n_steps: u64,
    pub delta_t: f64,
    pub r_eff: f64,
}

pub fn snap_to_time(
    alpha: f64,
    d_alpha: f64,
    delta_x: f64,
    r_max: f64,
    t: f64,
) -> Result<SnappedGrid, FdError> {
    let coarse = calibrate_grid(alpha, d_alpha, delta_x, r_max)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(FdError::NonPositiveParameter(t));
    }
    if t < coarse.delta_t {
        return Err(FdError::HorizonBelowStep {
            t,
            delta_t: coarse.delta_t,
        });
    }
    let mut n_steps = libm::ceil(t / coarse.delta_t - 1e-12) as u64;
    loop {
        let delta_t = t / n_steps as f64;
        let r_eff = 2.0 * d_alpha * libm::pow(delta_t, alpha) / (delta_x * delta_x);
        if r_eff <= r_max {
            return Ok(SnappedGrid {
                n_steps,
                delta_t,
                r_eff,
            });
        }
        n_steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_unbounded() -> DensityField {
        DensityField::delta(LatticeDomain::unbounded(1.0).unwrap(), 0, 0).unwrap()
    }

    #[test]
    fn one_geometric_step_is_the_classic_stencil() {
        let waiting = WaitingTimeModel::geometric(1.0).unwrap();
        let jumps = JumpModel::symmetric(1.0).unwrap();
        let fields = fd_solve(
            &waiting,
            jumps,
            LatticeDomain::unbounded(1.0).unwrap(),
            &delta_unbounded(),
            1,
        )
        .unwrap();
        let f = &fields[1];
        assert!((f.mass_at(-1) - 0.5).abs() < 1e-15);
        assert!(f.mass_at(0).abs() < 1e-15);
        assert!((f.mass_at(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn one_sibuya_step_moves_alpha_r_half() {
        let alpha = 0.6;
        let r = 0.8;
        let waiting = WaitingTimeModel::sibuya(alpha).unwrap();
        let jumps = JumpModel::symmetric(r).unwrap();
        let fields = fd_solve(
            &waiting,
            jumps,
            LatticeDomain::unbounded(1.0).unwrap(),
            &delta_unbounded(),
            1,
        )
        .unwrap();
        let f = &fields[1];
        assert!((f.mass_at(-1) - alpha * r / 2.0).abs() < 1e-15);
        assert!((f.mass_at(0) - (1.0 - alpha * r)).abs() < 1e-15);
        assert!((f.mass_at(1) - alpha * r / 2.0).abs() < 1e-15);
    }

    #[test]
    fn mass_conserved_on_bounded_domains_both_policies() {
        for policy in [BoundaryPolicy::ReflectStay, BoundaryPolicy::ReflectBounce] {
            let domain = LatticeDomain::centered_interval(5, 0.2, policy).unwrap();
            let waiting = WaitingTimeModel::sibuya(0.7).unwrap();
            let initial = DensityField::delta(domain.clone(), 0, 0).unwrap();
            let fields = fd_solve(
                &waiting,
                JumpModel::symmetric(1.0).unwrap(),
                domain,
                &initial,
                200,
            )
            .unwrap();
            for f in &fields {
                assert!(
                    (f.total_mass() - 1.0).abs() < 1e-12,
                    "policy {policy:?} step {}",
                    f.time_step()
                );
            }
        }
    }

    #[test]
    fn alpha_one_sibuya_equals_unit_geometric() {
        let domain = LatticeDomain::centered_interval(6, 1.0, BoundaryPolicy::ReflectStay)
            .unwrap();
        let initial = DensityField::delta(domain.clone(), 0, 0).unwrap();
        let jumps = JumpModel::symmetric(1.0).unwrap();
        let sib = fd_solve(
            &WaitingTimeModel::sibuya(1.0).unwrap(),
            jumps,
            domain.clone(),
            &initial,
            64,
        )
        .unwrap();
        let geo = fd_solve(
            &WaitingTimeModel::geometric(1.0).unwrap(),
            jumps,
            domain,
            &initial,
            64,
        )
        .unwrap();
        for (a, b) in sib.iter().zip(geo.iter()) {
            for site in -6..=6 {
                assert!((a.mass_at(site) - b.mass_at(site)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_steps_returns_initial() {
        let waiting = WaitingTimeModel::sibuya(0.5).unwrap();
        let initial = delta_unbounded();
        let fields = fd_solve(
            &waiting,
            JumpModel::symmetric(1.0).unwrap(),
            LatticeDomain::unbounded(1.0).unwrap(),
            &initial,
            0,
        )
        .unwrap();
        assert_eq!(fields.len(), 1);
        assert_eq!(fields[0].mass_at(0), 1.0);
    }

    #[test]
    fn kernel_horizon_is_enforced() {
        let waiting = WaitingTimeModel::sibuya(0.5).unwrap();
        let mut state = FdState::new(
            &waiting,
            JumpModel::symmetric(1.0).unwrap(),
            LatticeDomain::unbounded(1.0).unwrap(),
            &delta_unbounded(),
            2,
        )
        .unwrap();
        state.step().unwrap();
        state.step().unwrap();
        assert!(matches!(
            state.step(),
            Err(FdError::KernelTooShort { .. })
        ));
    }

    #[test]
    fn flux_ops_grow_quadratically() {
        let waiting = WaitingTimeModel::sibuya(0.7).unwrap();
        let domain = LatticeDomain::centered_interval(5, 0.2, BoundaryPolicy::ReflectStay)
            .unwrap();
        let initial = DensityField::delta(domain.clone(), 0, 0).unwrap();
        let count_ops = |n: usize| {
            let mut state = FdState::new(
                &waiting,
                JumpModel::symmetric(1.0).unwrap(),
                domain.clone(),
                &initial,
                n,
            )
            .unwrap();
            for _ in 0..n {
                state.step().unwrap();
            }
            state.flux_op_count()
        };
        let ops_64 = count_ops(64);
        let ops_128 = count_ops(128);
        // sites * n(n+1)/2 exactly
        assert_eq!(ops_64, 11 * 64 * 65 / 2);
        let ratio = ops_128 as f64 / ops_64 as f64;
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn calibrate_grid_examples() {
        let g = calibrate_grid(0.5, 0.1, 0.2, 1.0).unwrap();
        assert!((g.delta_t - 0.04).abs() < 1e-15);
        let g = calibrate_grid(1.0, 0.3, 0.5, 0.8).unwrap();
        assert!((g.delta_t - 0.8 * 0.25 / 0.6).abs() < 1e-15);
        let g = calibrate_grid(0.5, 0.1, 0.2, 0.5).unwrap();
        assert!((g.delta_t - 0.01).abs() < 1e-15);
        // exactly representable grid: delta_t = 1 * 1 / (2 * 0.25) = 2
        let g = calibrate_grid(1.0, 0.25, 1.0, 1.0).unwrap();
        assert_eq!(g.delta_t, 2.0);
        assert_eq!(g.steps_for(10.0), 5);
        assert_eq!(g.steps_for(9.9), 4);
    }

    #[test]
    fn snapping_lands_exactly_and_respects_r_max() {
        for alpha in [0.5, 0.7, 0.9] {
            let snap = snap_to_time(alpha, 0.1, 0.2, 1.0, 0.5).unwrap();
            assert!(snap.r_eff <= 1.0);
            assert!(snap.r_eff > 0.9, "alpha {alpha}: r_eff {}", snap.r_eff);
            let reached = snap.n_steps as f64 * snap.delta_t;
            assert!((reached - 0.5).abs() < 1e-12);
            // effective grid reproduces D_alpha exactly
            let d = snap.r_eff * 0.04 / (2.0 * libm::pow(snap.delta_t, alpha));
            assert!((d - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn snap_rejects_subresolution_times() {
        assert!(matches!(
            snap_to_time(0.5, 0.1, 0.2, 1.0, 0.01),
            Err(FdError::HorizonBelowStep { .. })
        ));
    }
}
