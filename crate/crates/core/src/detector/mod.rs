//! Analytic model of the SU's N-sample energy detector.
//!
//! Noise is circularly-symmetric complex Gaussian with total power
//! `sigma_n_sq`; the OFDM signal contributes `sigma_r_sq` per sample. A
//! sample's power is exponential, so the energy of N samples is
//! Gamma(N, scale) with scale `sigma_r_sq + sigma_n_sq` (bit 1) or
//! `sigma_n_sq` (bit 0).

pub mod special;

pub use special::{ln_gamma, regularized_gamma_pair, regularized_lower_gamma, regularized_upper_gamma};

use crate::error::{Error, Result};
use crate::scalar::Real;

fn f(v: impl num_traits::ToPrimitive) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Per-sample statistics of an OFDM waveform with `m_subcarriers` tones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmStats<T> {
    pub m_subcarriers: usize,
    pub sample_var: T,
}

impl<T: Real> OfdmStats<T> {
    pub fn new(m_subcarriers: usize) -> Result<Self> {
        if m_subcarriers == 0 {
            return Err(Error::domain("m", 0.0, "must be positive"));
        }
        Ok(OfdmStats {
            m_subcarriers,
            sample_var: T::from_count(m_subcarriers).recip(),
        })
    }
}

/// `sigma_r^2 = sample_var * alpha * |w1|^2 / xi * g^2`.
pub fn received_power<T: Real>(sample_var: T, alpha: T, norm1_sq: T, xi: T, g: T) -> Result<T> {
    for (name, v) in [("sample_var", sample_var), ("alpha", alpha), ("norm1_sq", norm1_sq), ("g", g)] {
        if !(v >= T::zero()) {
            return Err(Error::domain(name, f(v), "must be nonnegative"));
        }
    }
    if !(xi > T::zero()) {
        return Err(Error::domain("xi", f(xi), "must be positive"));
    }
    Ok(sample_var * alpha * norm1_sq / xi * g * g)
}

/// Gamma(shape `n`, `scale`) density at `epsilon`, evaluated in the log domain.
pub fn energy_pdf<T: Real>(epsilon: T, n: usize, scale: T) -> Result<T> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "must be at least 1"));
    }
    if !(scale > T::zero()) {
        return Err(Error::domain("scale", f(scale), "must be positive"));
    }
    if !(epsilon >= T::zero()) {
        return Err(Error::domain("epsilon", f(epsilon), "must be nonnegative"));
    }
    let shape = T::from_count(n);
    if epsilon == T::zero() {
        return Ok(if n == 1 { scale.recip() } else { T::zero() });
    }
    let log_pdf = (shape - T::one()) * epsilon.ln() - epsilon / scale - ln_gamma(shape) - shape * scale.ln();
    Ok(log_pdf.exp())
}

/// Equal-prior mixture of the bit-0 and bit-1 energy densities.
pub fn mixture_pdf<T: Real>(epsilon: T, n: usize, sigma_r_sq: T, sigma_n_sq: T) -> Result<T> {
    let half = T::lit(0.5);
    let on = energy_pdf(epsilon, n, sigma_r_sq + sigma_n_sq)?;
    let off = energy_pdf(epsilon, n, sigma_n_sq)?;
    Ok(half * on + half * off)
}

fn check_variances<T: Real>(n: usize, sigma_r_sq: T, sigma_n_sq: T) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "must be at least 1"));
    }
    if !(sigma_r_sq >= T::zero()) || !sigma_r_sq.is_finite() {
        return Err(Error::domain("sigma_r_sq", f(sigma_r_sq), "must be finite and nonnegative"));
    }
    if !(sigma_n_sq > T::zero()) || !sigma_n_sq.is_finite() {
        return Err(Error::domain("sigma_n_sq", f(sigma_n_sq), "must be finite and positive"));
    }
    Ok(())
}

/// Energy threshold at which the two Gamma densities cross:
/// `N ln((sr + sn) / sn) / (1/sn - 1/(sr + sn))`.
///
/// Evaluated as `N sn (1 + x) ln(1 + x) / x` with `x = sr / sn`, which tends
/// to `N sn` as `sr -> 0`; `sigma_r_sq = 0` returns that limit.
pub fn optimal_threshold<T: Real>(n: usize, sigma_r_sq: T, sigma_n_sq: T) -> Result<T> {
    check_variances(n, sigma_r_sq, sigma_n_sq)?;
    let nf = T::from_count(n);
    let x = sigma_r_sq / sigma_n_sq;
    if x == T::zero() {
        return Ok(nf * sigma_n_sq);
    }
    Ok(nf * sigma_n_sq * (T::one() + x) * x.ln_1p() / x)
}

/// Equal-prior error probability of the detector at `threshold`:
/// `0.5 (Q(N, d / sn) + P(N, d / (sr + sn)))`, clamped to `[0, 0.5]`.
pub fn error_probability<T: Real>(n: usize, sigma_r_sq: T, sigma_n_sq: T, threshold: T) -> Result<T> {
    check_variances(n, sigma_r_sq, sigma_n_sq)?;
    if !(threshold >= T::zero()) {
        return Err(Error::domain("threshold", f(threshold), "must be nonnegative"));
    }
    let shape = T::from_count(n);
    let false_alarm = regularized_upper_gamma(shape, threshold / sigma_n_sq)?;
    let miss = regularized_lower_gamma(shape, threshold / (sigma_r_sq + sigma_n_sq))?;
    let half = T::lit(0.5);
    Ok((half * (false_alarm + miss)).max(T::zero()).min(half))
}

/// Energy detector parameters with its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel<T> {
    pub n_samples: usize,
    pub sigma_r_sq: T,
    pub sigma_n_sq: T,
    pub threshold: T,
}

impl<T: Real> DetectorModel<T> {
    /// Detector using the error-minimising threshold.
    pub fn optimal(n_samples: usize, sigma_r_sq: T, sigma_n_sq: T) -> Result<Self> {
        let threshold = optimal_threshold(n_samples, sigma_r_sq, sigma_n_sq)?;
        Ok(DetectorModel {
            n_samples,
            sigma_r_sq,
            sigma_n_sq,
            threshold,
        })
    }

    /// Detector model from an SNR `sigma_r_sq / sigma_n_sq` given in dB,
    /// with unit noise power.
    pub fn from_snr_db(n_samples: usize, snr_db: T) -> Result<Self> {
        let snr = T::lit(10.0).powf(snr_db / T::lit(10.0));
        Self::optimal(n_samples, snr, T::one())
    }

    pub fn error_probability(&self) -> Result<T> {
        error_probability(self.n_samples, self.sigma_r_sq, self.sigma_n_sq, self.threshold)
    }

    /// Probability that a noise-only symbol exceeds the threshold.
    pub fn false_alarm_probability(&self) -> Result<T> {
        regularized_upper_gamma(T::from_count(self.n_samples), self.threshold / self.sigma_n_sq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn received_power_examples() {
        assert_eq!(received_power(1.0 / 64.0, 0.0f64, 1.0, 1.0, 1.0).unwrap(), 0.0);
        let p = received_power(1.0 / 64.0, 0.3f64, 1.0, 0.85, 1.0).unwrap();
        assert!((p - 0.005_514_705_882_352_941).abs() < 1e-15);
        let p2 = received_power(1.0 / 64.0, 0.3f64, 1.0, 0.85, 2.0).unwrap();
        assert!((p2 / p - 4.0).abs() < 1e-12);
        assert!(received_power(1.0, 0.3f64, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ofdm_stats() {
        let s = OfdmStats::<f64>::new(64).unwrap();
        assert_eq!(s.sample_var * 64.0, 1.0);
        assert!(OfdmStats::<f64>::new(0).is_err());
    }

    #[test]
    fn single_sample_pdf_is_exponential() {
        for eps in [0.0f64, 0.3, 2.0] {
            let p = energy_pdf(eps, 1, 1.5).unwrap();
            assert!((p - (-eps / 1.5).exp() / 1.5).abs() < 1e-15);
        }
    }

    #[test]
    fn threshold_single_sample_unit_snr() {
        let d = optimal_threshold(1, 1.0f64, 1.0).unwrap();
        assert!((d - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn threshold_is_linear_in_n() {
        let a = optimal_threshold(7, 0.4f64, 1.3).unwrap();
        let b = optimal_threshold(14, 0.4f64, 1.3).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn threshold_small_signal_limit() {
        let d = optimal_threshold(5, 1e-9f64, 2.0).unwrap();
        assert!((d - 10.0).abs() < 1e-7);
        assert_eq!(optimal_threshold(5, 0.0f64, 2.0).unwrap(), 10.0);
    }

    #[test]
    fn error_probability_single_sample() {
        let pe = error_probability(1, 1.0f64, 1.0, 2.0 * std::f64::consts::LN_2).unwrap();
        assert!((pe - 0.375).abs() < 1e-14);
    }

    #[test]
    fn error_probability_without_signal_is_half() {
        let d = optimal_threshold(20, 0.0f64, 1.0).unwrap();
        assert!((error_probability(20, 0.0f64, 1.0, d).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn error_probability_decreases_with_n() {
        let pes: Vec<f64> = [1usize, 10, 100]
            .iter()
            .map(|&n| DetectorModel::optimal(n, 0.5, 1.0).unwrap().error_probability().unwrap())
            .collect();
        assert!(pes[0] > pes[1] && pes[1] > pes[2], "{pes:?}");
    }

    #[test]
    fn densities_cross_at_threshold() {
        for &(n, sr) in &[(1usize, 1.0f64), (10, 0.3), (100, 0.05), (1000, 0.01)] {
            let d = optimal_threshold(n, sr, 1.0).unwrap();
            let a = energy_pdf(d, n, sr + 1.0).unwrap();
            let b = energy_pdf(d, n, 1.0).unwrap();
            assert!(((a - b) / b).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(optimal_threshold(0, 1.0f64, 1.0).is_err());
        assert!(optimal_threshold(1, 1.0f64, 0.0).is_err());
        assert!(energy_pdf(1.0f64, 0, 1.0).is_err());
        assert!(energy_pdf(-1.0f64, 1, 1.0).is_err());
        assert!(error_probability(1, -1.0f64, 1.0, 1.0).is_err());
    }
}
