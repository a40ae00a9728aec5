//! Complex channel vectors and correlated PU/SU channel pairs.
//!
//! Inner products conjugate the **first** argument everywhere in this crate:
//! `<a, b> = sum_i conj(a_i) * b_i`. The pair correlation is
//! `rho = <h_su, h_pu>`.

use std::ops::Index;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum antenna count for the two-constraint weight solve.
pub const MIN_ANTENNAS: usize = 3;

/// `1 - |rho|^2` below this value is treated as ill-conditioned.
pub const NEAR_SINGULAR_GUARD: f64 = 1e-6;

/// Dense complex vector of length K (one entry per transmit antenna).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<T>(Vec<Complex<T>>);

impl<T: Real> ComplexVector<T> {
    /// Wraps `entries`, rejecting NaN or infinite components.
    pub fn new(entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexVector(entries))
    }

    pub fn zeros(len: usize) -> Self {
        ComplexVector(vec![Complex::new(T::zero(), T::zero()); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex<T>> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex<T>> {
        self.0
    }

    pub fn norm_sqr(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        ComplexVector(self.0.iter().map(|z| z * c).collect())
    }

    pub fn conj(&self) -> Self {
        ComplexVector(self.0.iter().map(|z| z.conj()).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex<T>, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(ComplexVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b * c).collect(),
        ))
    }

    /// Unconjugated product `self^T * w`, the beamformed response of a channel.
    pub fn transpose_dot(&self, w: &Self) -> Result<Complex<T>> {
        check_len(self.len(), w.len())?;
        Ok(self
            .0
            .iter()
            .zip(&w.0)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b))
    }

    /// Returns the vector scaled to unit norm.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(Complex::new(n.recip(), T::zero()))
    }
}

impl<T> Index<usize> for ComplexVector<T> {
    type Output = Complex<T>;

    fn index(&self, i: usize) -> &Complex<T> {
        &self.0[i]
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch(a, b));
    }
    Ok(())
}

/// `<a, b> = sum_i conj(a_i) * b_i`.
pub fn inner_product<T: Real>(a: &ComplexVector<T>, b: &ComplexVector<T>) -> Result<Complex<T>> {
    check_len(a.len(), b.len())?;
    Ok(a
        .iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y))
}

/// Unit-norm PU and SU channels with their correlation and the SU/PU
/// amplitude gain ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair<T> {
    h_pu: ComplexVector<T>,
    h_su: ComplexVector<T>,
    rho: Complex<T>,
    g: T,
}

impl<T: Real> ChannelPair<T> {
    /// Validates unit norms and equal lengths, and records `rho = <h_su, h_pu>`.
    pub fn new(h_pu: ComplexVector<T>, h_su: ComplexVector<T>, g: T) -> Result<Self> {
        check_len(h_pu.len(), h_su.len())?;
        for h in [&h_pu, &h_su] {
            let n2 = h.norm_sqr();
            if (n2 - T::one()).abs() > T::unit_tol() {
                return Err(Error::NotUnitNorm(n2.to_f64().unwrap_or(f64::NAN)));
            }
        }
        if !(g >= T::zero()) || !g.is_finite() {
            return Err(Error::domain("g", g.to_f64().unwrap_or(f64::NAN), "must be finite and nonnegative"));
        }
        let rho = inner_product(&h_su, &h_pu)?;
        Ok(ChannelPair { h_pu, h_su, rho, g })
    }

    pub fn h_pu(&self) -> &ComplexVector<T> {
        &self.h_pu
    }

    pub fn h_su(&self) -> &ComplexVector<T> {
        &self.h_su
    }

    pub fn rho(&self) -> Complex<T> {
        self.rho
    }

    pub fn g(&self) -> T {
        self.g
    }

    pub fn antennas(&self) -> usize {
        self.h_pu.len()
    }

    /// True when `1 - |rho|^2` is below [`NEAR_SINGULAR_GUARD`]; weight
    /// solving on such a pair fails with [`Error::IllConditioned`].
    pub fn is_near_singular(&self) -> bool {
        T::one() - self.rho.norm_sqr() < T::lit(NEAR_SINGULAR_GUARD)
    }
}

fn gaussian_vector<T: Real>(len: usize, rng: &mut ChaCha8Rng) -> ComplexVector<T> {
    let v = (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    ComplexVector(v)
}

/// Builds a random channel pair with `<h_su, h_pu> = rho_mag * e^{j rho_phase}`.
///
/// `h_pu` is a normalized complex Gaussian draw; `u` is a second draw
/// orthonormalized against it; `h_su = conj(rho) h_pu + sqrt(1 - |rho|^2) u`
/// (the conjugate follows from conjugating the first inner-product argument).
/// The same seed always yields the same pair.
pub fn make_correlated_pair<T: Real>(
    k: usize,
    rho_mag: T,
    rho_phase: T,
    g: T,
    seed: u64,
) -> Result<ChannelPair<T>> {
    if k < MIN_ANTENNAS {
        return Err(Error::TooFewAntennas(k));
    }
    if !(rho_mag >= T::zero() && rho_mag < T::one()) {
        return Err(Error::CorrelationOutOfRange(rho_mag.to_f64().unwrap_or(f64::NAN)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_pu = gaussian_vector::<T>(k, &mut rng).normalized();

    let mut u = gaussian_vector::<T>(k, &mut rng);
    // Two Gram-Schmidt passes keep the residual projection at rounding level.
    for _ in 0..2 {
        let proj = inner_product(&h_pu, &u)?;
        u = u.axpy(-proj, &h_pu)?;
    }
    let u = u.normalized();

    let rho = Complex::from_polar(rho_mag, rho_phase);
    let ortho = (T::one() - rho_mag * rho_mag).sqrt();
    let h_su = h_pu
        .scale(rho.conj())
        .axpy(Complex::new(ortho, T::zero()), &u)?
        .normalized();
    ChannelPair::new(h_pu, h_su, g)
}
