//! Waiting-time models for the walker: the heavy-tailed Sibuya law and the
//! geometric law, each exposing the pmf, the survival probability, the
//! memory kernel used by the master-equation solver, and an exact
//! inverse-transform sampler.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::specfn::ln_gamma_ratio_large;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum WaitingError {
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("sigma must lie in (0, 1], got {0}")]
    InvalidSigma(f64),
}

/// Survival-table growth stops at this length; lower quantiles are inverted
/// through the asymptotic gamma-ratio form of the survival function, which is
/// where it is accurate to ~1e-13 anyway.
pub const SIBUYA_TABLE_CAP: usize = 1 << 21;

/// Sibuya waiting-time law: `pmf(m) = (alpha/m) * prod_{l<m} (1 - alpha/l)`,
/// infinite mean for `alpha < 1`. `alpha = 1` degenerates to a unit wait.
///
/// The survival table grows lazily inside [`SibuyaModel::sample`]; clone the
/// model per worker for concurrent sampling — draws are a pure function of
/// `(alpha, u)` so confinement cannot change results.
#[derive(Debug, Clone)]
pub struct SibuyaModel {
    alpha: f64,
    /// `survival[m] = prod_{l=1..=m} (1 - alpha/l)`, strictly decreasing
    /// while positive, `survival[0] = 1`.
    survival: Vec<f64>,
}

impl SibuyaModel {
    pub fn new(alpha: f64) -> Result<Self, WaitingError> {
        if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
            return Err(WaitingError::InvalidAlpha(alpha));
        }
        Ok(Self {
            alpha,
            survival: vec![1.0],
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `P[W = m]`; zero at `m = 0` (a jump can never be instantaneous).
    pub fn pmf(&self, m: u64) -> f64 {
        if m == 0 {
            0.0
        } else {
            self.alpha / m as f64 * self.survival(m - 1)
        }
    }

    /// `P[W > m]` by the multiplicative recurrence (exact telescoping with
    /// the pmf: `pmf(m) = survival(m-1) - survival(m)` holds in f64).
    pub fn survival(&self, m: u64) -> f64 {
        let have = (self.survival.len() - 1) as u64;
        if m <= have {
            return self.survival[m as usize];
        }
        let mut phi = *self.survival.last().expect("table never empty");
        for l in (have + 1)..=m {
            phi *= 1.0 - self.alpha / l as f64;
        }
        phi
    }

    fn extend_to(&mut self, target_len: usize) {
        let mut phi = *self.survival.last().expect("table never empty");
        for m in self.survival.len()..target_len {
            phi *= 1.0 - self.alpha / m as f64;
            self.survival.push(phi);
        }
    }

    /// Unique `m >= 1` with `survival(m) <= u < survival(m-1)`.
    ///
    /// Deterministic in `(alpha, u)`. `u = 0` saturates to `u64::MAX` (the
    /// survival function never reaches zero for `alpha < 1`); callers
    /// truncate at their horizon.
    pub fn sample(&mut self, u: f64) -> u64 {
        debug_assert!((0.0..1.0).contains(&u));
        while *self.survival.last().expect("table never empty") > u
            && self.survival.len() < SIBUYA_TABLE_CAP + 1
        {
            let target = (self.survival.len() * 2).min(SIBUYA_TABLE_CAP + 1);
            self.extend_to(target);
        }
        let bottom = *self.survival.last().expect("table never empty");
        if u >= bottom {
            return self.survival.partition_point(|&phi| phi > u) as u64;
        }
        self.deep_tail(u)
    }

    /// Inverse survival beyond the table: `survival(m)` via the Stirling
    /// gamma-ratio (`Gamma(m+1-alpha) / (Gamma(1-alpha) Gamma(m+1))`), then
    /// binary search over the integers.
    fn deep_tail(&self, u: f64) -> u64 {
        let inv_gamma = 1.0 / libm::tgamma(1.0 - self.alpha);
        let survival_large =
            |m: f64| libm::exp(ln_gamma_ratio_large(m + 1.0, -self.alpha)) * inv_gamma;
        let mut lo = SIBUYA_TABLE_CAP as u64; // survival(lo) > u
        let mut hi = u64::MAX >> 1;
        if survival_large(hi as f64) > u {
            return u64::MAX;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if survival_large(mid as f64) <= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Geometric waiting-time law with per-step jump probability `sigma`:
/// `pmf(m) = sigma (1-sigma)^(m-1)`, the memoryless case that reproduces
/// classic diffusion.
#[derive(Debug, Clone, Copy)]
pub struct GeometricModel {
    sigma: f64,
}

impl GeometricModel {
    pub fn new(sigma: f64) -> Result<Self, WaitingError> {
        if !(sigma > 0.0 && sigma <= 1.0) || !sigma.is_finite() {
            return Err(WaitingError::InvalidSigma(sigma));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pmf(&self, m: u64) -> f64 {
        if m == 0 {
            0.0
        } else {
            self.sigma * libm::pow(1.0 - self.sigma, (m - 1) as f64)
        }
    }

    pub fn survival(&self, m: u64) -> f64 {
        libm::pow(1.0 - self.sigma, m as f64)
    }

    /// Closed-form inversion `ceil(ln u / ln(1 - sigma))`, then pinned to the
    /// exact `survival(m) <= u < survival(m-1)` bracket to kill boundary
    /// rounding.
    pub fn sample(&self, u: f64) -> u64 {
        debug_assert!((0.0..1.0).contains(&u));
        if self.sigma == 1.0 {
            return 1;
        }
        if u <= 0.0 {
            return u64::MAX;
        }
        let ln_q = libm::log1p(-self.sigma);
        let raw = libm::ceil(libm::log(u) / ln_q);
        if !(raw < 9.0e18) {
            return u64::MAX;
        }
        let mut m = if raw < 1.0 { 1 } else { raw as u64 };
        while self.survival(m) > u {
            m += 1;
        }
        while m > 1 && self.survival(m - 1) <= u {
            m -= 1;
        }
        m
    }
}

/// Tagged choice of waiting-time law.
#[derive(Debug, Clone)]
pub enum WaitingTimeModel {
    Sibuya(SibuyaModel),
    Geometric(GeometricModel),
}

impl WaitingTimeModel {
    pub fn sibuya(alpha: f64) -> Result<Self, WaitingError> {
        Ok(Self::Sibuya(SibuyaModel::new(alpha)?))
    }

    pub fn geometric(sigma: f64) -> Result<Self, WaitingError> {
        Ok(Self::Geometric(GeometricModel::new(sigma)?))
    }

    pub fn pmf(&self, m: u64) -> f64 {
        match self {
            Self::Sibuya(s) => s.pmf(m),
            Self::Geometric(g) => g.pmf(m),
        }
    }

    pub fn survival(&self, m: u64) -> f64 {
        match self {
            Self::Sibuya(s) => s.survival(m),
            Self::Geometric(g) => g.survival(m),
        }
    }

    pub fn sample(&mut self, u: f64) -> u64 {
        match self {
            Self::Sibuya(s) => s.sample(u),
            Self::Geometric(g) => g.sample(u),
        }
    }

    pub fn memory_kernel(&self, n_max: usize) -> MemoryKernel {
        memory_kernel(self, n_max)
    }
}

/// Unique `m >= 1` with `survival(m) <= u < survival(m-1)` for `u in [0,1)`.
pub fn sample_waiting_time(model: &mut WaitingTimeModel, u: f64) -> u64 {
    model.sample(u)
}

/// Memory kernel `K` of the generalized master equation, defined in the
/// transform domain by `Z{K} = Z{pmf} / Z{survival}` and realized here in
/// closed form.
///
/// Sibuya: `K(m) = (-1)^m C(1-alpha, m) - delta_{0,m} + delta_{1,m}` (the
/// Grünwald-Letnikov weights, all negative for `m >= 2`), built by the
/// multiplicative ratio recurrence. Geometric: `K(m) = sigma delta_{1,m}`.
#[derive(Debug, Clone)]
pub struct MemoryKernel {
    coefficients: Vec<f64>,
}

impl MemoryKernel {
    /// `K(m)`; panics if `m` exceeds the built horizon.
    pub fn k(&self, m: usize) -> f64 {
        self.coefficients[m]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of stored coefficients (`n_max + 1`).
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Kernel coefficients `K(0..=n_max)` for the given model; `K(0) = 0`.
pub fn memory_kernel(model: &WaitingTimeModel, n_max: usize) -> MemoryKernel {
    let mut coefficients = vec![0.0f64; n_max + 1];
    match model {
        WaitingTimeModel::Sibuya(s) => {
            let alpha = s.alpha();
            // b(m) = (-1)^m C(1-alpha, m): b(m) = b(m-1) * (m - 2 + alpha) / m
            let mut b = 1.0f64;
            if n_max >= 1 {
                b *= alpha - 1.0;
                coefficients[1] = b + 1.0; // + delta_{1,m} -> alpha
            }
            for (m, slot) in coefficients.iter_mut().enumerate().skip(2) {
                b *= (m as f64 - 2.0 + alpha) / m as f64;
                *slot = b;
            }
        }
        WaitingTimeModel::Geometric(g) => {
            if n_max >= 1 {
                coefficients[1] = g.sigma();
            }
        }
    }
    MemoryKernel { coefficients }
}
