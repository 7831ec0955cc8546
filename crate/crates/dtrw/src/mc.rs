//! Ensemble Monte Carlo engine: N independent paths, site-occupancy
//! histograms at requested report times, and run counters for the
//! complexity benchmarks.
//!
//! Reproducibility contract: path `p` draws from `ChaCha8Rng` stream `p` of
//! the master seed, so the ensemble is a deterministic function of
//! `(inputs, seed, n_paths)` under any partition of paths across workers.
//! Parallel drivers map [`run_chunk`] over chunk indices and fold with
//! [`merge_chunks`]; counts are integers, so the merge is exact and
//! order-independent.

use alloc::vec;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::walk::{simulate_path_with_snapshots, JumpModel, LatticeDomain};
use crate::waiting::WaitingTimeModel;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum McError {
    #[error("ensemble needs at least one path")]
    EmptyEnsemble,
    #[error("report times must be strictly increasing")]
    ReportsNotSorted,
    #[error("report time {report} exceeds the horizon {n_steps}")]
    ReportBeyondHorizon { report: u64, n_steps: u64 },
    #[error("start site {0} lies outside the domain")]
    StartOutsideDomain(i64),
    #[error("field mass sums to {0}, expected 1")]
    UnnormalizedField(f64),
    #[error("negative mass {mass} at site {site}")]
    NegativeMass { site: i64, mass: f64 },
}

/// Paths per work item. Purely a scheduling granularity: results never
/// depend on it because random streams are derived per path.
pub const CHUNK_SIZE: u64 = 4096;

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    n_paths: u64,
    seed: u64,
    n_steps: u64,
    report_times: Vec<u64>,
}

impl EnsembleConfig {
    pub fn new(
        n_paths: u64,
        seed: u64,
        n_steps: u64,
        report_times: Vec<u64>,
    ) -> Result<Self, McError> {
        if n_paths == 0 {
            return Err(McError::EmptyEnsemble);
        }
        if !report_times.windows(2).all(|w| w[0] < w[1]) {
            return Err(McError::ReportsNotSorted);
        }
        if let Some(&last) = report_times.last() {
            if last > n_steps {
                return Err(McError::ReportBeyondHorizon {
                    report: last,
                    n_steps,
                });
            }
        }
        Ok(Self {
            n_paths,
            seed,
            n_steps,
            report_times,
        })
    }

    /// Single report at the final step.
    pub fn simple(n_paths: u64, seed: u64, n_steps: u64) -> Result<Self, McError> {
        Self::new(n_paths, seed, n_steps, vec![n_steps])
    }

    pub fn n_paths(&self) -> u64 {
        self.n_paths
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_steps(&self) -> u64 {
        self.n_steps
    }

    pub fn report_times(&self) -> &[u64] {
        &self.report_times
    }
}

/// Probability mass per lattice site at a fixed time step.
#[derive(Debug, Clone)]
pub struct DensityField {
    domain: LatticeDomain,
    time_step: u64,
    origin: i64,
    mass: Vec<f64>,
}

impl DensityField {
    /// Wraps a mass vector whose first entry sits at `origin`. The mass must
    /// be nonnegative (to roundoff) and sum to 1 within 1e-6.
    pub fn from_mass(
        domain: LatticeDomain,
        time_step: u64,
        origin: i64,
        mass: Vec<f64>,
    ) -> Result<Self, McError> {
        let mut total = 0.0;
        for (offset, &m) in mass.iter().enumerate() {
            if m < -1e-12 {
                return Err(McError::NegativeMass {
                    site: origin + offset as i64,
                    mass: m,
                });
            }
            total += m;
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(McError::UnnormalizedField(total));
        }
        Ok(Self {
            domain,
            time_step,
            origin,
            mass,
        })
    }

    /// Unit mass on a single site.
    pub fn delta(domain: LatticeDomain, time_step: u64, site: i64) -> Result<Self, McError> {
        if !domain.contains(site) {
            return Err(McError::StartOutsideDomain(site));
        }
        Ok(Self {
            domain,
            time_step,
            origin: site,
            mass: vec![1.0],
        })
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn time_step(&self) -> u64 {
        self.time_step
    }

    /// First and last stored site.
    pub fn support(&self) -> (i64, i64) {
        (self.origin, self.origin + self.mass.len() as i64 - 1)
    }

    pub fn mass_at(&self, site: i64) -> f64 {
        let offset = site - self.origin;
        if offset < 0 || offset >= self.mass.len() as i64 {
            0.0
        } else {
            self.mass[offset as usize]
        }
    }

    /// Mass divided by the lattice spacing, the project-wide convention for
    /// comparing site masses against continuum densities.
    pub fn density_at(&self, site: i64) -> f64 {
        self.mass_at(site) / self.domain.delta_x()
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let origin = self.origin;
        self.mass
            .iter()
            .enumerate()
            .map(move |(offset, &m)| (origin + offset as i64, m))
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// `sum_i x(i)^order * mass(i)` in length units^order.
pub fn estimate_moment(field: &DensityField, order: u32) -> f64 {
    field
        .sites()
        .map(|(site, mass)| libm::pow(field.domain().x(site), order as f64) * mass)
        .sum()
}

/// Aggregate counters of an ensemble run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunCounters {
    /// Jump events across all paths, self-jumps included.
    pub total_jump_events: u64,
    /// Waiting-time draws across all paths (horizon overshoots included).
    pub total_waiting_draws: u64,
    /// Seconds; zero from the pure engine, filled by timing wrappers.
    pub wall_time: f64,
}

/// Raw integer histograms of one chunk of paths, one row per report time.
#[derive(Debug, Clone)]
pub struct ChunkHistogram {
    origin: i64,
    counts: Vec<Vec<u64>>,
    jump_events: u64,
    waiting_draws: u64,
}

/// Storage layout covering every site a path could visit.
fn layout(domain: &LatticeDomain, start_site: i64, n_steps: u64) -> (i64, usize) {
    match domain {
        LatticeDomain::Bounded { i_min, i_max, .. } => {
            (*i_min, (i_max - i_min + 1) as usize)
        }
        LatticeDomain::Unbounded { .. } => {
            let reach = n_steps as i64;
            (start_site - reach, 2 * n_steps as usize + 1)
        }
    }
}

pub fn chunk_count(config: &EnsembleConfig) -> u64 {
    config.n_paths.div_ceil(CHUNK_SIZE)
}

/// Simulates paths `[chunk_index * CHUNK_SIZE, ...)` of the ensemble.
/// The waiting model is cloned per chunk, confining its lazy survival table
/// to this worker.
pub fn run_chunk(
    waiting: &WaitingTimeModel,
    jumps: &JumpModel,
    domain: &LatticeDomain,
    start_site: i64,
    config: &EnsembleConfig,
    chunk_index: u64,
) -> ChunkHistogram {
    let (origin, width) = layout(domain, start_site, config.n_steps);
    let mut counts = vec![vec![0u64; width]; config.report_times.len()];
    let mut jump_events = 0u64;
    let mut waiting_draws = 0u64;
    let mut local_waiting = waiting.clone();
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let lo = chunk_index * CHUNK_SIZE;
    let hi = (lo + CHUNK_SIZE).min(config.n_paths);
    for path in lo..hi {
        let mut rng = base.clone();
        rng.set_stream(path);
        let outcome = simulate_path_with_snapshots(
            &mut local_waiting,
            jumps,
            domain,
            start_site,
            config.n_steps,
            &config.report_times,
            &mut rng,
        );
        for (row, site) in counts.iter_mut().zip(outcome.sites.iter()) {
            row[(site - origin) as usize] += 1;
        }
        jump_events += outcome.jumps_taken;
        waiting_draws += outcome.waiting_draws;
    }
    ChunkHistogram {
        origin,
        counts,
        jump_events,
        waiting_draws,
    }
}

/// Elementwise integer merge; associative and commutative, so any reduction
/// tree yields identical results.
pub fn merge_chunks(into: &mut ChunkHistogram, from: &ChunkHistogram) {
    debug_assert_eq!(into.origin, from.origin);
    for (a, b) in into.counts.iter_mut().zip(from.counts.iter()) {
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x += *y;
        }
    }
    into.jump_events += from.jump_events;
    into.waiting_draws += from.waiting_draws;
}

/// Normalizes merged counts into one [`DensityField`] per report time,
/// trimming unvisited tails on unbounded domains.
pub fn finalize_chunks(
    domain: &LatticeDomain,
    config: &EnsembleConfig,
    accumulated: ChunkHistogram,
) -> Result<(Vec<DensityField>, RunCounters), McError> {
    let n = config.n_paths as f64;
    let mut fields = Vec::with_capacity(accumulated.counts.len());
    for (report_index, row) in accumulated.counts.iter().enumerate() {
        debug_assert_eq!(row.iter().sum::<u64>(), config.n_paths);
        let (mut first, mut last) = (0usize, row.len() - 1);
        if matches!(domain, LatticeDomain::Unbounded { .. }) {
            first = row.iter().position(|&c| c > 0).unwrap_or(0);
            last = row.iter().rposition(|&c| c > 0).unwrap_or(row.len() - 1);
        }
        let mass: Vec<f64> = row[first..=last].iter().map(|&c| c as f64 / n).collect();
        fields.push(DensityField::from_mass(
            domain.clone(),
            config.report_times[report_index],
            accumulated.origin + first as i64,
            mass,
        )?);
    }
    let counters = RunCounters {
        total_jump_events: accumulated.jump_events,
        total_waiting_draws: accumulated.waiting_draws,
        wall_time: 0.0,
    };
    Ok((fields, counters))
}

/// Serial reference driver: identical output to any parallel driver built on
/// [`run_chunk`] / [`merge_chunks`] at the same seed.
pub fn run_ensemble(
    waiting: &WaitingTimeModel,
    jumps: &JumpModel,
    domain: &LatticeDomain,
    start_site: i64,
    config: &EnsembleConfig,
) -> Result<(Vec<DensityField>, RunCounters), McError> {
    if !domain.contains(start_site) {
        return Err(McError::StartOutsideDomain(start_site));
    }
    let mut accumulated: Option<ChunkHistogram> = None;
    for chunk in 0..chunk_count(config) {
        let part = run_chunk(waiting, jumps, domain, start_site, config, chunk);
        match accumulated.as_mut() {
            None => accumulated = Some(part),
            Some(acc) => merge_chunks(acc, &part),
        }
    }
    finalize_chunks(domain, config, accumulated.expect("n_paths >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sibuya_half() -> WaitingTimeModel {
        WaitingTimeModel::sibuya(0.5).unwrap()
    }

    #[test]
    fn report_at_zero_is_the_initial_delta() {
        let waiting = sibuya_half();
        let jumps = JumpModel::symmetric(1.0).unwrap();
        let domain = LatticeDomain::unbounded(1.0).unwrap();
        let config = EnsembleConfig::new(1000, 7, 4, vec![0, 4]).unwrap();
        let (fields, _) = run_ensemble(&waiting, &jumps, &domain, 0, &config).unwrap();
        assert_eq!(fields[0].mass_at(0), 1.0);
        assert_eq!(fields[0].time_step(), 0);
        assert!((fields[1].total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_step_matches_subordination_weights() {
        // At n = 1 the law is {-1: alpha/2, 0: 1-alpha, +1: alpha/2}.
        let waiting = sibuya_half();
        let jumps = JumpModel::symmetric(1.0).unwrap();
        let domain = LatticeDomain::unbounded(1.0).unwrap();
        let config = EnsembleConfig::simple(200_000, 11, 1).unwrap();
        let (fields, _) = run_ensemble(&waiting, &jumps, &domain, 0, &config).unwrap();
        let f = &fields[0];
        assert!((f.mass_at(-1) - 0.25).abs() < 4e-3);
        assert!((f.mass_at(0) - 0.5).abs() < 4e-3);
        assert!((f.mass_at(1) - 0.25).abs() < 4e-3);
    }

    #[test]
    fn unit_waits_jump_every_step() {
        let waiting = WaitingTimeModel::geometric(1.0).unwrap();
        let jumps = JumpModel::symmetric(1.0).unwrap();
        let domain = LatticeDomain::unbounded(1.0).unwrap();
        let config = EnsembleConfig::simple(512, 3, 100).unwrap();
        let (_, counters) = run_ensemble(&waiting, &jumps, &domain, 0, &config).unwrap();
        assert_eq!(counters.total_jump_events, 512 * 100);
    }

    #[test]
    fn chunking_is_invisible() {
        // One big chunk vs many small merges must agree bit-for-bit.
        let waiting = sibuya_half();
        let jumps = JumpModel::symmetric(1.0).unwrap();
        let domain = LatticeDomain::unbounded(1.0).unwrap();
        let config = EnsembleConfig::simple(CHUNK_SIZE * 2 + 37, 99, 16).unwrap();
        let (serial_fields, serial_counters) =
            run_ensemble(&waiting, &jumps, &domain, 0, &config).unwrap();
        // reversed merge order
        let chunks: Vec<ChunkHistogram> = (0..chunk_count(&config))
            .map(|c| run_chunk(&waiting, &jumps, &domain, 0, &config, c))
            .collect();
        let mut acc = chunks.last().unwrap().clone();
        for part in chunks.iter().rev().skip(1) {
            merge_chunks(&mut acc, part);
        }
        let (fields, counters) = finalize_chunks(&domain, &config, acc).unwrap();
        assert_eq!(counters, serial_counters);
        for (a, b) in fields.iter().zip(serial_fields.iter()) {
            assert_eq!(a.support(), b.support());
            for ((_, x), (_, y)) in a.sites().zip(b.sites()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn moments_of_a_delta() {
        let domain = LatticeDomain::unbounded(0.5).unwrap();
        let field = DensityField::delta(domain, 0, 0).unwrap();
        assert_eq!(estimate_moment(&field, 1), 0.0);
        assert_eq!(estimate_moment(&field, 2), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            EnsembleConfig::new(0, 1, 5, vec![]),
            Err(McError::EmptyEnsemble)
        ));
        assert!(matches!(
            EnsembleConfig::new(10, 1, 5, vec![3, 3]),
            Err(McError::ReportsNotSorted)
        ));
        assert!(matches!(
            EnsembleConfig::new(10, 1, 5, vec![6]),
            Err(McError::ReportBeyondHorizon { .. })
        ));
    }

    #[test]
    fn density_is_mass_per_spacing() {
        use crate::walk::BoundaryPolicy;
        let domain =
            LatticeDomain::centered_interval(2, 0.5, BoundaryPolicy::ReflectStay).unwrap();
        let mass = vec![0.1, 0.2, 0.4, 0.2, 0.1];
        let field = DensityField::from_mass(domain, 0, -2, mass).unwrap();
        assert!((field.density_at(0) - 0.8).abs() < 1e-15);
        assert!((field.density_at(2) - 0.2).abs() < 1e-15);
    }
}
