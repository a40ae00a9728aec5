//! Sum rate of the PU link plus the SU's OOK rate `1/N_alpha`.
//!
//! With normal-operation PU SNR `gamma` and a noise floor shared by both
//! receivers, the SU's per-sample OFDM SNR is
//! `gamma g^2 alpha |w1|^2 / xi`, and the PU rate is
//! `log2(1 + gamma (1 - alpha) / xi)`.

use rayon::prelude::*;

use crate::detector::{error_probability, optimal_threshold};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weights::closed_form_norms;

/// Default cap on the integration length searched by [`find_n_alpha`].
pub const DEFAULT_N_MAX: usize = 1_000_000;

/// Default target error probability for `N_alpha`.
pub const DEFAULT_PE_TARGET: f64 = 1e-5;

/// One point of a sum-rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRatePoint<T> {
    pub alpha: T,
    pub n_alpha: Option<usize>,
    pub pu_rate: T,
    pub su_rate: T,
    pub total: T,
}

/// `10^(db / 10)`.
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// SU per-sample SNR `sigma_r^2 / sigma_n^2` implied by the PU SNR `gamma`.
pub fn su_snr<T: Real>(alpha: T, rho_mag: T, g: T, gamma: T) -> Result<T> {
    let norms = closed_form_norms(alpha, rho_mag)?;
    Ok(gamma * g * g * alpha * norms.norm1_sq / norms.xi)
}

fn pe_at<T: Real>(n: usize, snr: T) -> Result<T> {
    let delta = optimal_threshold(n, snr, T::one())?;
    error_probability(n, snr, T::one(), delta)
}

/// Smallest `N <= n_max` whose optimal-threshold error probability is below
/// `pe_target`, or `None` if even `n_max` samples are not enough.
///
/// The subcarrier count `m` sets the per-sample variance `1/M` of both the
/// signal and the shared noise floor, so it cancels from the SNR.
#[allow(clippy::too_many_arguments)]
pub fn find_n_alpha<T: Real>(
    alpha: T,
    rho_mag: T,
    g: T,
    gamma: T,
    m: usize,
    pe_target: T,
    n_max: usize,
) -> Result<Option<usize>> {
    if m == 0 {
        return Err(Error::domain("m", 0.0, "must be positive"));
    }
    if !(pe_target > T::zero() && pe_target < T::lit(0.5)) {
        return Err(Error::domain("pe_target", pe_target.to_f64().unwrap_or(f64::NAN), "must lie in (0, 0.5)"));
    }
    if n_max == 0 {
        return Err(Error::domain("n_max", 0.0, "must be at least 1"));
    }
    if !(gamma >= T::zero()) || !(g >= T::zero()) {
        return Err(Error::domain("gamma/g", f64::NAN, "must be nonnegative"));
    }
    let snr = su_snr(alpha, rho_mag, g, gamma)?;
    if snr <= T::zero() {
        return Ok(None);
    }
    if pe_at(n_max, snr)? >= pe_target {
        return Ok(None);
    }
    // P_e decreases in N, so the first passing N is found by bisection.
    let (mut lo, mut hi) = (0usize, n_max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pe_at(mid, snr)? < pe_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Sum rate at a single `alpha`. `alpha = 0` is normal operation and
/// evaluates to the baseline `log2(1 + gamma)`.
pub fn sum_rate_point<T: Real>(
    alpha: T,
    rho_mag: T,
    g: T,
    gamma: T,
    m: usize,
    pe_target: T,
    n_max: usize,
) -> Result<SumRatePoint<T>> {
    let norms = closed_form_norms(alpha, rho_mag)?;
    if alpha == T::zero() {
        // Nothing is allocated to the SU: the transmitter runs normal
        // operation with the unit-norm PU-only weight.
        let pu_rate = (T::one() + gamma).log2();
        return Ok(SumRatePoint {
            alpha,
            n_alpha: None,
            pu_rate,
            su_rate: T::zero(),
            total: pu_rate,
        });
    }
    let pu_rate = (T::one() + gamma / norms.xi * (T::one() - alpha)).log2();
    let n_alpha = find_n_alpha(alpha, rho_mag, g, gamma, m, pe_target, n_max)?;
    let su_rate = n_alpha.map_or(T::zero(), |n| T::from_count(n).recip());
    Ok(SumRatePoint {
        alpha,
        n_alpha,
        pu_rate,
        su_rate,
        total: pu_rate + su_rate,
    })
}

/// Sum-rate curve over `alpha_grid`, in grid order.
pub fn sweep_sum_rate<T: Real>(
    gamma_db: T,
    rho_mag: T,
    g: T,
    m: usize,
    alpha_grid: &[T],
    pe_target: T,
    n_max: usize,
) -> Result<Vec<SumRatePoint<T>>> {
    let gamma = db_to_linear(gamma_db);
    alpha_grid
        .par_iter()
        .map(|&a| sum_rate_point(a, rho_mag, g, gamma, m, pe_target, n_max))
        .collect()
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Default alpha grid: 200 log-spaced points in `[1e-4, 0.99]`.
pub fn default_alpha_grid() -> Vec<f64> {
    log_grid(1e-4, 0.99, 200)
}
