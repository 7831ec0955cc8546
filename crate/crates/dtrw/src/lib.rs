#![cfg_attr(not(test), no_std)]

//! Discrete-time random walk (DTRW) engines for subdiffusion.
//!
//! A walker on a 1-D lattice draws integer waiting times from a heavy-tailed
//! Sibuya law (or a geometric law for classic diffusion) and makes
//! nearest-neighbour jumps. The crate provides two independent routes to the
//! ensemble site-occupancy density and the oracles to cross-validate them:
//!
//! - [`walk`] / [`mc`] — path-wise Monte Carlo simulation and ensemble
//!   histograms with reproducible per-path random streams,
//! - [`fd`] — explicit time stepping of the generalized master equation with
//!   a memory-kernel history convolution,
//! - [`renewal`] — jump-count statistics of the renewal process and the
//!   discrete subordination closed form,
//! - [`analytic`] — the Mittag-Leffler cosine-series solution of the
//!   fractional diffusion equation on `[-1, 1]` with zero-flux walls,
//! - [`specfn`] — real-argument generalized binomial coefficients and a
//!   Mittag-Leffler evaluator on the negative real axis,
//! - [`waiting`] — the waiting-time models themselves: pmf, survival,
//!   memory kernel, and exact inverse-transform sampling.
//!
//! The crate is `no_std` (with `alloc`); IO, parallel drivers, and the CLI
//! live in the companion `dtrw-cli` crate.

extern crate alloc;

pub mod analytic;
pub mod fd;
pub mod mc;
pub mod renewal;
pub mod specfn;
pub mod waiting;
pub mod walk;

pub use analytic::{analytic_u, SeriesProfile, SeriesSolutionParams};
pub use fd::{calibrate_grid, fd_solve, snap_to_time, FdState, GridCalibration, SnappedGrid};
pub use mc::{run_ensemble, DensityField, EnsembleConfig, RunCounters};
pub use renewal::{
    expected_jumps_series, jump_count_closed_form, subordinated_density, subordinated_profile,
    JumpCountTable,
};
pub use specfn::{gen_binomial, mittag_leffler_neg, MittagLefflerParams};
pub use waiting::{GeometricModel, MemoryKernel, SibuyaModel, WaitingTimeModel};
pub use walk::{simulate_path, BoundaryPolicy, JumpModel, LatticeDomain, PathOutcome};
