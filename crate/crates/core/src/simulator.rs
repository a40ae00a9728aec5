//! Waveform-level Monte Carlo of the SU link.
//!
//! OFDM blocks are generated back to back and each OOK symbol integrates the
//! next N consecutive samples, regardless of block boundaries. Bits are
//! processed in fixed-size batches; batch `b` draws from the ChaCha8 stream
//! `b + 1` of the master seed, so results do not depend on thread count.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::channel::{make_correlated_pair, ChannelPair};
use crate::detector::{DetectorModel, OfdmStats};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weights::{build_weight_set, WeightSet};

/// Bits per RNG stream.
pub const BATCH_BITS: usize = 1024;

/// Smallest subcarrier count accepted by the OFDM source.
pub const MIN_SUBCARRIERS: usize = 16;

/// Seed for grid point `index` of a run seeded with `master`
/// (splitmix64 finalizer over the pair).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Continuous stream of time-domain OFDM samples with unit-modulus,
/// uniformly random-phase subcarrier symbols and `1/M` IFFT scaling, so every
/// block carries energy exactly 1 and each sample has power `1/M`.
pub struct OfdmSource<T: Real> {
    m: usize,
    ifft: Arc<dyn Fft<T>>,
    block: Vec<Complex<T>>,
    pos: usize,
}

impl<T: Real> OfdmSource<T> {
    pub fn new(m: usize) -> Result<Self> {
        if m < MIN_SUBCARRIERS {
            return Err(Error::domain("m", m as f64, "at least 16 subcarriers are required"));
        }
        let ifft = FftPlanner::new().plan_fft_inverse(m);
        Ok(OfdmSource {
            m,
            ifft,
            block: Vec::with_capacity(m),
            pos: m,
        })
    }

    fn refill<R: Rng>(&mut self, rng: &mut R) {
        let scale = T::from_count(self.m).recip();
        let tau = T::lit(std::f64::consts::TAU);
        self.block.clear();
        self.block.extend((0..self.m).map(|_| {
            let phase = T::lit(rng.random::<f64>()) * tau;
            Complex::from_polar(scale, phase)
        }));
        self.ifft.process(&mut self.block);
        self.pos = 0;
    }

    /// Next time-domain sample.
    pub fn next_sample<R: Rng>(&mut self, rng: &mut R) -> Complex<T> {
        if self.pos == self.m {
            self.refill(rng);
        }
        let s = self.block[self.pos];
        self.pos += 1;
        s
    }

    pub fn fill<R: Rng>(&mut self, out: &mut [Complex<T>], rng: &mut R) {
        for s in out {
            *s = self.next_sample(rng);
        }
    }
}

/// `count` consecutive OFDM samples with per-sample power `1/m`.
pub fn generate_ofdm_samples<T: Real, R: Rng>(m: usize, count: usize, rng: &mut R) -> Result<Vec<Complex<T>>> {
    let mut src = OfdmSource::new(m)?;
    let mut out = vec![Complex::new(T::zero(), T::zero()); count];
    src.fill(&mut out, rng);
    Ok(out)
}

/// Circularly-symmetric complex Gaussian sample with total power `power`.
pub fn complex_noise<T: Real, R: Rng>(power: T, rng: &mut R) -> Complex<T> {
    let sd = (power / T::lit(2.0)).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re) * sd, T::lit(im) * sd)
}

/// Scalar gain `g h^T (w_bit / sqrt(xi))` from the transmitted OFDM sample
/// to the SU (or PU, with `to_su = false`) receiver.
pub fn effective_gain<T: Real>(weights: &WeightSet<T>, pair: &ChannelPair<T>, bit: bool, to_su: bool) -> Result<Complex<T>> {
    let w = weights.normalized(bit);
    if to_su {
        Ok(pair.h_su().transpose_dot(&w)? * pair.g())
    } else {
        pair.h_pu().transpose_dot(&w)
    }
}

/// Received SU samples for one OOK bit: `g h_su^T (w_bit / sqrt(xi)) s_i + n_i`.
pub fn transmit_ook_bit<T: Real, R: Rng>(
    bit: bool,
    weights: &WeightSet<T>,
    pair: &ChannelPair<T>,
    samples: &[Complex<T>],
    sigma_n_sq: T,
    rng: &mut R,
) -> Result<Vec<Complex<T>>> {
    let gain = effective_gain(weights, pair, bit, true)?;
    Ok(samples
        .iter()
        .map(|s| gain * s + complex_noise(sigma_n_sq, rng))
        .collect())
}

/// Symbol energy `sum |x_i|^2`.
pub fn symbol_energy<T: Real>(received: &[Complex<T>]) -> T {
    received.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr())
}

/// Energy detector decision; equality with the threshold decides 0.
pub fn detect_ook_bit<T: Real>(received: &[Complex<T>], threshold: T) -> bool {
    symbol_energy(received) > threshold
}

/// One BER experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<T> {
    pub k_antennas: usize,
    pub m_subcarriers: usize,
    pub n_samples: usize,
    pub alpha: T,
    pub rho_mag: T,
    pub rho_phase: T,
    pub g: T,
    /// `sigma_r^2 / sigma_n^2` at the SU, in dB.
    pub snr_db: T,
    pub n_bits: usize,
    pub master_seed: u64,
}

impl<T: Real> Default for ScenarioConfig<T> {
    fn default() -> Self {
        ScenarioConfig {
            k_antennas: 8,
            m_subcarriers: 64,
            n_samples: 10,
            alpha: T::lit(0.3),
            rho_mag: T::zero(),
            rho_phase: T::zero(),
            g: T::one(),
            snr_db: T::zero(),
            n_bits: 100_000,
            master_seed: 0,
        }
    }
}

/// Simulated and analytic error rates for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct BerResult<T> {
    pub n_bits: usize,
    pub n_errors: usize,
    pub ber: T,
    pub analytic_pe: T,
    pub threshold: T,
    pub sigma_r_sq: T,
    pub sigma_n_sq: T,
    /// Binomial 95% half-width `1.96 sqrt(ber (1 - ber) / n_bits)`.
    pub per_point_ci95: T,
}

impl<T: Real> BerResult<T> {
    /// `|ber - analytic_pe| <= 3 sqrt(pe (1 - pe) / n_bits)`.
    pub fn within_3_sigma(&self) -> bool {
        let pe = self.analytic_pe;
        let band = T::lit(3.0) * (pe * (T::one() - pe) / T::from_count(self.n_bits)).sqrt();
        (self.ber - pe).abs() <= band
    }
}

/// Link state derived from a scenario: channels, weights, and the detector
/// whose noise power realises the requested SNR.
#[derive(Debug, Clone)]
pub struct Link<T> {
    pub pair: ChannelPair<T>,
    pub weights: WeightSet<T>,
    pub detector: DetectorModel<T>,
    pub m_subcarriers: usize,
}

impl<T: Real> Link<T> {
    /// The signal power is the one the waveform actually delivers,
    /// `sample_var g^2 |h_su^T w1|^2 / xi`; the noise power is back-solved
    /// from `snr_db`. With no SU signal (alpha = 0) the noise is referenced
    /// to the full-power sample variance `g^2 / M` instead.
    pub fn new(cfg: &ScenarioConfig<T>) -> Result<Self> {
        if cfg.n_samples == 0 {
            return Err(Error::domain("n", 0.0, "must be at least 1"));
        }
        if !cfg.snr_db.is_finite() {
            return Err(Error::domain("snr_db", cfg.snr_db.to_f64().unwrap_or(f64::NAN), "must be finite"));
        }
        let pair = make_correlated_pair(cfg.k_antennas, cfg.rho_mag, cfg.rho_phase, cfg.g, cfg.master_seed)?;
        let weights = build_weight_set(&pair, cfg.alpha)?;
        let stats = OfdmStats::<T>::new(cfg.m_subcarriers)?;
        if cfg.m_subcarriers < MIN_SUBCARRIERS {
            return Err(Error::domain("m", cfg.m_subcarriers as f64, "at least 16 subcarriers are required"));
        }
        let mut su_gain = effective_gain(&weights, &pair, true, true)?.norm_sqr();
        if su_gain <= T::epsilon() {
            // Rounding residue of a null.
            su_gain = T::zero();
        }
        let sigma_r_sq = stats.sample_var * su_gain;
        let snr = T::lit(10.0).powf(cfg.snr_db / T::lit(10.0));
        let reference = if sigma_r_sq > T::zero() {
            sigma_r_sq
        } else if pair.g() > T::zero() {
            stats.sample_var * pair.g() * pair.g()
        } else {
            stats.sample_var
        };
        let sigma_n_sq = reference / snr;
        let detector = DetectorModel::optimal(cfg.n_samples, sigma_r_sq, sigma_n_sq)?;
        Ok(Link {
            pair,
            weights,
            detector,
            m_subcarriers: cfg.m_subcarriers,
        })
    }

    /// PU-side received power `|h_pu^T w_bit / sqrt(xi)|^2` (before channel gain).
    pub fn pu_power(&self, bit: bool) -> Result<T> {
        Ok(effective_gain(&self.weights, &self.pair, bit, false)?.norm_sqr())
    }

    fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch as u64 + 1);
        rng
    }

    /// Runs `bits` symbols from RNG stream `batch`, calling `visit(bit, energy)`
    /// for each.
    fn run_batch<F: FnMut(bool, T)>(&self, seed: u64, batch: usize, bits: usize, mut visit: F) -> Result<()> {
        let mut rng = Self::batch_rng(seed, batch);
        let mut src = OfdmSource::<T>::new(self.m_subcarriers)?;
        let gains = [
            effective_gain(&self.weights, &self.pair, false, true)?,
            effective_gain(&self.weights, &self.pair, true, true)?,
        ];
        let sn = self.detector.sigma_n_sq;
        for _ in 0..bits {
            let bit: bool = rng.random();
            let gain = gains[bit as usize];
            let mut energy = T::zero();
            for _ in 0..self.detector.n_samples {
                let s = src.next_sample(&mut rng);
                energy = energy + (gain * s + complex_noise(sn, &mut rng)).norm_sqr();
            }
            visit(bit, energy);
        }
        Ok(())
    }

    /// Energies of `count` symbols that all carry `bit`, drawn in parallel
    /// batches like [`run_ber`].
    pub fn symbol_energies(&self, bit: bool, count: usize, seed: u64) -> Result<Vec<T>> {
        let batches = count.div_ceil(BATCH_BITS);
        let gain = effective_gain(&self.weights, &self.pair, bit, true)?;
        let sn = self.detector.sigma_n_sq;
        let n = self.detector.n_samples;
        let parts: Result<Vec<Vec<T>>> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let len = BATCH_BITS.min(count - b * BATCH_BITS);
                let mut rng = Self::batch_rng(seed, b);
                let mut src = OfdmSource::<T>::new(self.m_subcarriers)?;
                Ok((0..len)
                    .map(|_| {
                        (0..n).fold(T::zero(), |acc, _| {
                            let s = src.next_sample(&mut rng);
                            acc + (gain * s + complex_noise(sn, &mut rng)).norm_sqr()
                        })
                    })
                    .collect())
            })
            .collect();
        Ok(parts?.into_iter().flatten().collect())
    }
}

/// Monte Carlo BER for `cfg` alongside the analytic error probability.
/// Deterministic in `cfg.master_seed` for any rayon pool size.
pub fn run_ber<T: Real>(cfg: &ScenarioConfig<T>) -> Result<BerResult<T>> {
    if cfg.n_bits == 0 {
        return Err(Error::domain("n_bits", 0.0, "must be at least 1"));
    }
    let link = Link::new(cfg)?;
    let threshold = link.detector.threshold;
    let batches = cfg.n_bits.div_ceil(BATCH_BITS);
    let n_errors = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH_BITS.min(cfg.n_bits - b * BATCH_BITS);
            let mut errors = 0usize;
            link.run_batch(cfg.master_seed, b, len, |bit, energy| {
                if (energy > threshold) != bit {
                    errors += 1;
                }
            })?;
            Ok(errors)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let nb = T::from_count(cfg.n_bits);
    let ber = T::from_count(n_errors) / nb;
    Ok(BerResult {
        n_bits: cfg.n_bits,
        n_errors,
        ber,
        analytic_pe: link.detector.error_probability()?,
        threshold,
        sigma_r_sq: link.detector.sigma_r_sq,
        sigma_n_sq: link.detector.sigma_n_sq,
        per_point_ci95: T::lit(1.96) * (ber * (T::one() - ber) / nb).sqrt(),
    })
}
