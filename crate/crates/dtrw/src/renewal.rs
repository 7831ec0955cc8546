//! Jump-count statistics of the Sibuya renewal process and the discrete
//! subordination closed form.
//!
//! The production route builds the `P[T_k = n]` / `P[T_{k-1} < n < T_k]`
//! tables by forward convolution (all summands nonnegative, no
//! cancellation). The alternating-sum closed form is kept as a desk-scale
//! oracle, evaluated in exact rational arithmetic so it has no stability
//! horizon of its own.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::specfn::gen_binomial;
use crate::waiting::SibuyaModel;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RenewalError {
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("p_right must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("k_max {k_max} exceeds n_max {n_max}; the region n < k is structurally zero")]
    KMaxExceedsNMax { k_max: usize, n_max: usize },
    #[error("jump-count mass at n = {n} only sums to {mass}; raise k_max")]
    MassNotCaptured { n: usize, mass: f64 },
    #[error("closed form capped at n = 512 (cost guard), requested n = {0}")]
    ClosedFormHorizon(u64),
    #[error("index ({n}, {k}) outside the built table")]
    OutOfTable { n: usize, k: usize },
}

/// Probabilities of the jump-count process up to a horizon `(n_max, k_max)`:
/// `kth_jump_at(n, k) = P[T_k = n]`, `strictly_between(n, k) = P[T_{k-1} < n
/// < T_k]`, and `jump_count_pmf(n, k) = P[T_k <= n < T_{k+1}]`.
#[derive(Debug, Clone)]
pub struct JumpCountTable {
    alpha: f64,
    n_max: usize,
    k_max: usize,
    /// `b[k][n] = P[T_k = n]`
    b: Vec<Vec<f64>>,
    /// `c[k][n] = P[T_{k-1} < n < T_k]`, built for k up to k_max + 1
    c: Vec<Vec<f64>>,
    /// `p[k][n] = b[k][n] + c[k+1][n]`
    p: Vec<Vec<f64>>,
}

/// `ceil(4 n_max^alpha) + 20`, clamped to `n_max`: enough columns that the
/// jump-count mass at the horizon is captured far below 1e-10.
pub fn recommended_k_max(alpha: f64, n_max: usize) -> usize {
    let guess = libm::ceil(4.0 * libm::pow(n_max as f64, alpha)) as usize + 20;
    guess.min(n_max)
}

/// Forward-convolution build of the jump-count table.
pub fn build_jump_counts(
    alpha: f64,
    n_max: usize,
    k_max: usize,
) -> Result<JumpCountTable, RenewalError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(RenewalError::InvalidAlpha(alpha));
    }
    if k_max > n_max {
        return Err(RenewalError::KMaxExceedsNMax { k_max, n_max });
    }
    let model = SibuyaModel::new(alpha).expect("validated above");
    let mut pmf = vec![0.0f64; n_max + 1];
    let mut survival = vec![0.0f64; n_max + 1];
    for m in 0..=n_max {
        pmf[m] = model.pmf(m as u64);
        survival[m] = model.survival(m as u64);
    }

    let mut b: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    let mut first = vec![0.0f64; n_max + 1];
    first[0] = 1.0; // T_0 = 0
    b.push(first);
    for k in 1..=k_max {
        let mut col = vec![0.0f64; n_max + 1];
        let prev = &b[k - 1];
        for (n, slot) in col.iter_mut().enumerate().skip(k) {
            let mut acc = 0.0f64;
            for m in (k - 1)..n {
                acc += prev[m] * pmf[n - m];
            }
            *slot = acc;
        }
        b.push(col);
    }

    let mut c: Vec<Vec<f64>> = Vec::with_capacity(k_max + 2);
    c.push(vec![0.0f64; n_max + 1]); // k = 0 unused
    for k in 1..=(k_max + 1) {
        let mut col = vec![0.0f64; n_max + 1];
        let prev = &b[k - 1];
        for (n, slot) in col.iter_mut().enumerate().skip(1) {
            let lo = k.saturating_sub(1);
            if lo >= n {
                continue;
            }
            let mut acc = 0.0f64;
            for m in lo..n {
                acc += prev[m] * survival[n - m];
            }
            *slot = acc;
        }
        c.push(col);
    }

    let mut p: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let col = b[k]
            .iter()
            .zip(c[k + 1].iter())
            .map(|(x, y)| x + y)
            .collect();
        p.push(col);
    }

    Ok(JumpCountTable {
        alpha,
        n_max,
        k_max,
        b,
        c,
        p,
    })
}

impl JumpCountTable {
    pub fn build_default(alpha: f64, n_max: usize) -> Result<Self, RenewalError> {
        build_jump_counts(alpha, n_max, recommended_k_max(alpha, n_max))
    }

    /// Builds with enough columns that the jump-count mass at `n_max` is
    /// captured to `tol` (grown geometrically from the default, capped at
    /// `n_max`, where completeness is structural).
    pub fn build_captured(alpha: f64, n_max: usize, tol: f64) -> Result<Self, RenewalError> {
        let mut k_max = recommended_k_max(alpha, n_max);
        loop {
            let table = build_jump_counts(alpha, n_max, k_max)?;
            if 1.0 - table.mass_at(n_max) < tol || k_max == n_max {
                return Ok(table);
            }
            k_max = (k_max + k_max / 2).min(n_max);
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `P[T_k = n]` (the spec's `b`).
    pub fn kth_jump_at(&self, n: usize, k: usize) -> f64 {
        self.b[k][n]
    }

    /// `P[T_{k-1} < n < T_k]` (the spec's `c`), built for `k <= k_max + 1`.
    pub fn strictly_between(&self, n: usize, k: usize) -> f64 {
        self.c[k][n]
    }

    /// `P[T_k <= n < T_{k+1}]`: probability of exactly `k` jumps by step `n`.
    pub fn jump_count_pmf(&self, n: usize, k: usize) -> f64 {
        self.p[k][n]
    }

    /// Total tabulated jump-count mass at step `n` (1 when `k_max` suffices).
    pub fn mass_at(&self, n: usize) -> f64 {
        self.p.iter().map(|col| col[n]).sum()
    }

    /// `E[number of jumps by step n]` from the table; errors if the tabulated
    /// mass at `n` falls short of `1 - 1e-10` (k_max too small).
    pub fn expected_jumps(&self, n: usize) -> Result<f64, RenewalError> {
        if n > self.n_max {
            return Err(RenewalError::OutOfTable { n, k: 0 });
        }
        let mass = self.mass_at(n);
        if mass < 1.0 - 1e-10 {
            return Err(RenewalError::MassNotCaptured { n, mass });
        }
        Ok(self
            .p
            .iter()
            .enumerate()
            .map(|(k, col)| k as f64 * col[n])
            .sum())
    }
}

/// `E[number of jumps by step n]` for `n = 0..=n_max` through the renewal
/// density `B(n) = sum_k P[T_k = n]`, which satisfies `B = delta + pmf * B`.
/// O(n_max^2) time, O(n_max) memory; equal to the table route but usable at
/// horizons where the full table would not fit.
pub fn expected_jumps_series(alpha: f64, n_max: usize) -> Result<Vec<f64>, RenewalError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(RenewalError::InvalidAlpha(alpha));
    }
    let model = SibuyaModel::new(alpha).expect("validated above");
    let mut pmf = vec![0.0f64; n_max + 1];
    for m in 1..=n_max {
        pmf[m] = model.pmf(m as u64);
    }
    let mut renewal_density = vec![0.0f64; n_max + 1];
    renewal_density[0] = 1.0;
    let mut expected = vec![0.0f64; n_max + 1];
    for n in 1..=n_max {
        let mut acc = 0.0f64;
        for m in 0..n {
            acc += renewal_density[m] * pmf[n - m];
        }
        renewal_density[n] = acc;
        expected[n] = expected[n - 1] + acc;
    }
    Ok(expected)
}

/// Exact-rational evaluation of the alternating closed form
/// `P[T_k <= n < T_{k+1}] = (-1)^n sum_l (-1)^l C(k,l) C((l+1)alpha - 1, n)`.
///
/// `alpha` enters as the exact dyadic rational of its f64 value, so the
/// result is the mathematically exact jump-count probability for that
/// floating-point `alpha` — the oracle for the convolution table.
pub fn jump_count_closed_form(alpha: f64, n: u64, k: u64) -> Result<f64, RenewalError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(RenewalError::InvalidAlpha(alpha));
    }
    if n > 512 {
        return Err(RenewalError::ClosedFormHorizon(n));
    }
    let a = BigRational::from_float(alpha).ok_or(RenewalError::InvalidAlpha(alpha))?;
    let mut sum = BigRational::zero();
    let mut choose = BigInt::one(); // C(k, l) running value
    for l in 0..=k {
        // x = (l + 1) alpha - 1
        let x = &a * BigRational::from_integer(BigInt::from(l + 1)) - BigRational::one();
        // C(x, n) as an exact rational product
        let mut g = BigRational::one();
        for j in 0..n {
            let factor = (&x - BigRational::from_integer(BigInt::from(j)))
                / BigRational::from_integer(BigInt::from(j + 1));
            g *= factor;
        }
        let term = BigRational::from_integer(choose.clone()) * g;
        if l % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        if l < k {
            choose *= BigInt::from(k - l);
            choose /= BigInt::from(l + 1);
        }
    }
    if n % 2 == 1 {
        sum = -sum;
    }
    Ok(big_ratio_to_f64(&sum))
}

/// Rational-to-f64 with explicit exponent bookkeeping; the naive
/// numerator/denominator conversion overflows to NaN once either side
/// outgrows f64.
fn big_ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let numer = r.numer();
    let denom = r.denom();
    let n_shift = (numer.bits() as i64 - 64).max(0);
    let d_shift = (denom.bits() as i64 - 64).max(0);
    let n_top = (numer >> (n_shift as u64)).to_f64().unwrap_or(f64::NAN);
    let d_top = (denom >> (d_shift as u64)).to_f64().unwrap_or(f64::NAN);
    libm::scalbn(n_top / d_top, (n_shift - d_shift) as i32)
}

/// Site-occupancy law of the simple walk (`r = 1`, no self-jumps) on the
/// unbounded lattice, subordinated by the jump-count distribution:
/// returns `U(i, n)` for `i = -n..=n` (index `i + n`).
pub fn subordinated_profile(
    alpha: f64,
    p_right: f64,
    n: usize,
) -> Result<Vec<f64>, RenewalError> {
    if !(0.0..=1.0).contains(&p_right) {
        return Err(RenewalError::InvalidProbability(p_right));
    }
    let table = build_jump_counts(alpha, n, n)?;
    let p_left = 1.0 - p_right;
    let mut out = vec![0.0f64; 2 * n + 1];
    for k in 0..=n {
        let weight = table.jump_count_pmf(n, k);
        if weight == 0.0 {
            continue;
        }
        for j in 0..=k {
            // i = 2j - k has the parity of k
            let i = 2 * j as i64 - k as i64;
            out[(i + n as i64) as usize] += binomial_walk_pmf(k, j, p_right, p_left) * weight;
        }
    }
    Ok(out)
}

/// `U(i, n)` for a single site of the subordinated simple walk; zero when no
/// jump count of matching parity can reach `i`.
pub fn subordinated_density(
    alpha: f64,
    p_right: f64,
    site: i64,
    n: u64,
) -> Result<f64, RenewalError> {
    let n = n as usize;
    if site.unsigned_abs() as usize > n {
        return Ok(0.0);
    }
    let profile = subordinated_profile(alpha, p_right, n)?;
    Ok(profile[(site + n as i64) as usize])
}

/// `C(k, j) p^j q^(k-j)` without overflow: plain product up to `k = 500`,
/// log-gamma combination beyond.
fn binomial_walk_pmf(k: usize, j: usize, p: f64, q: f64) -> f64 {
    if k <= 500 {
        gen_binomial(k as f64, j as u64)
            * libm::pow(p, j as f64)
            * libm::pow(q, (k - j) as f64)
    } else {
        let (lk, _) = libm::lgamma_r(k as f64 + 1.0);
        let (lj, _) = libm::lgamma_r(j as f64 + 1.0);
        let (lkj, _) = libm::lgamma_r((k - j) as f64 + 1.0);
        libm::exp(lk - lj - lkj + j as f64 * libm::log(p) + (k - j) as f64 * libm::log(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_time_no_jumps() {
        let t = build_jump_counts(0.5, 8, 8).unwrap();
        assert_eq!(t.jump_count_pmf(0, 0), 1.0);
        for k in 1..=8 {
            assert_eq!(t.jump_count_pmf(0, k), 0.0);
        }
    }

    #[test]
    fn two_jumps_in_two_steps_is_alpha_squared() {
        let t = build_jump_counts(0.5, 8, 8).unwrap();
        assert!((t.kth_jump_at(2, 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_jump_prob_is_survival() {
        let t = build_jump_counts(0.7, 64, 32).unwrap();
        let model = SibuyaModel::new(0.7).unwrap();
        for n in 0..=64usize {
            let expected = model.survival(n as u64);
            assert!(
                (t.jump_count_pmf(n, 0) - expected).abs() < 1e-14,
                "n = {n}"
            );
        }
    }

    #[test]
    fn k_max_above_n_max_is_an_error() {
        assert!(matches!(
            build_jump_counts(0.5, 4, 5),
            Err(RenewalError::KMaxExceedsNMax { .. })
        ));
    }

    #[test]
    fn closed_form_trivial_points() {
        assert_eq!(jump_count_closed_form(0.5, 0, 0).unwrap(), 1.0);
        assert!((jump_count_closed_form(0.5, 1, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((jump_count_closed_form(0.5, 1, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_horizon_guard() {
        assert!(matches!(
            jump_count_closed_form(0.5, 513, 1),
            Err(RenewalError::ClosedFormHorizon(513))
        ));
    }

    #[test]
    fn closed_form_matches_table_small() {
        for alpha in [0.3, 0.9] {
            let t = build_jump_counts(alpha, 16, 16).unwrap();
            for n in 0..=16usize {
                for k in 0..=n {
                    let oracle = jump_count_closed_form(alpha, n as u64, k as u64).unwrap();
                    assert!(
                        (t.jump_count_pmf(n, k) - oracle).abs() < 1e-12,
                        "alpha {alpha} n {n} k {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn unit_alpha_is_deterministic_counting() {
        let t = build_jump_counts(1.0, 32, 32).unwrap();
        for n in 0..=32usize {
            assert!((t.expected_jumps(n).unwrap() - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn expected_jumps_routes_agree() {
        for alpha in [0.5, 0.8] {
            let t = JumpCountTable::build_captured(alpha, 128, 1e-13).unwrap();
            let series = expected_jumps_series(alpha, 128).unwrap();
            for n in [0usize, 1, 7, 64, 128] {
                assert!(
                    (t.expected_jumps(n).unwrap() - series[n]).abs() < 1e-12,
                    "alpha {alpha} n {n}"
                );
            }
        }
    }

    #[test]
    fn default_k_max_shortfall_is_caught() {
        // The spec's default column count is too short at alpha = 0.5,
        // n = 128; the mass-capture check must refuse to average over it.
        let t = JumpCountTable::build_default(0.5, 128).unwrap();
        assert!(matches!(
            t.expected_jumps(128),
            Err(RenewalError::MassNotCaptured { .. })
        ));
    }

    #[test]
    fn expected_jumps_closed_binomial_identity() {
        // E[k_n] = C(n + alpha, n) - 1, from the Z-transform of the renewal
        // density; an independent algebraic route through gen_binomial.
        for alpha in [0.3, 0.5, 0.9] {
            let series = expected_jumps_series(alpha, 256).unwrap();
            for n in [1usize, 10, 100, 256] {
                let closed = gen_binomial(n as f64 + alpha, n as u64) - 1.0;
                let rel = (series[n] - closed).abs() / closed.max(1e-300);
                assert!(rel < 1e-11, "alpha {alpha} n {n} rel {rel:e}");
            }
        }
    }

    #[test]
    fn subordination_examples() {
        assert_eq!(subordinated_density(0.5, 0.5, 0, 0).unwrap(), 1.0);
        assert!((subordinated_density(0.5, 0.5, 0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((subordinated_density(0.5, 0.5, 1, 1).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(subordinated_density(0.5, 0.5, 5, 3).unwrap(), 0.0);
    }

    #[test]
    fn subordinated_profile_sums_to_one() {
        for alpha in [0.4, 0.9] {
            let profile = subordinated_profile(alpha, 0.5, 64).unwrap();
            let total: f64 = profile.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "alpha {alpha}: {total}");
        }
    }

    #[test]
    fn kth_jump_marginal_is_monotone_cdf() {
        let t = build_jump_counts(0.6, 128, 64).unwrap();
        for k in 1..=8usize {
            let mut cdf = 0.0;
            let mut prev = 0.0;
            for n in 0..=128usize {
                cdf += t.kth_jump_at(n, k);
                assert!(cdf >= prev - 1e-15 && cdf <= 1.0 + 1e-12);
                prev = cdf;
            }
        }
    }
}
