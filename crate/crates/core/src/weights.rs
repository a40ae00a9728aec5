//! Closed-form interference modulation weights.
//!
//! The OOK-one weight `omega1` steers amplitude `sqrt(alpha)` onto the SU
//! channel and `sqrt(1 - alpha)` onto the PU channel; the OOK-zero weight
//! `omega0` nulls the SU and keeps the PU response. Both are minimum-norm
//! solutions of the two row constraints `h_su^T w = b_su`, `h_pu^T w = b_pu`.
//!
//! Writing the constraints as `A^H w = b` with `A = [conj(h_su) conj(h_pu)]`,
//! the minimum-norm solution is `w = A (A^H A)^{-1} b` and the Gram matrix is
//! `[[1, conj(rho)], [rho, 1]]` for unit-norm channels.

use num_complex::Complex;

use crate::channel::{ChannelPair, ComplexVector, NEAR_SINGULAR_GUARD};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Target beamformed responses `(b_su, b_pu)` on the two channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetGains<T> {
    pub b_su: Complex<T>,
    pub b_pu: Complex<T>,
}

impl<T: Real> TargetGains<T> {
    /// OOK-zero targets: null on the SU, `sqrt(1 - alpha)` on the PU.
    pub fn zero_symbol(alpha: T) -> Self {
        TargetGains {
            b_su: Complex::new(T::zero(), T::zero()),
            b_pu: Complex::new((T::one() - alpha).sqrt(), T::zero()),
        }
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero() && alpha < T::one()) {
        return Err(Error::domain("alpha", alpha.to_f64().unwrap_or(f64::NAN), "must lie in [0, 1)"));
    }
    Ok(())
}

fn check_rho_mag<T: Real>(rho_mag: T) -> Result<()> {
    if !(rho_mag >= T::zero() && rho_mag < T::one()) {
        return Err(Error::CorrelationOutOfRange(rho_mag.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// OOK-one targets with the SU phase chosen to minimise `|omega1|^2`.
///
/// `b_pu = sqrt(1 - alpha)` and `b_su = sqrt(alpha) e^{-j arg(rho)}`, which
/// makes `rho * b_su * conj(b_pu)` real and positive.
pub fn phase_align_targets<T: Real>(alpha: T, rho: Complex<T>) -> TargetGains<T> {
    let phase = if rho.norm_sqr() == T::zero() {
        T::zero()
    } else {
        -rho.arg()
    };
    TargetGains {
        b_su: Complex::from_polar(alpha.sqrt(), phase),
        b_pu: Complex::new((T::one() - alpha).sqrt(), T::zero()),
    }
}

/// Minimum-norm `w` with `h_su^T w = b_su` and `h_pu^T w = b_pu`.
pub fn solve_min_norm<T: Real>(
    h_su: &ComplexVector<T>,
    h_pu: &ComplexVector<T>,
    targets: TargetGains<T>,
) -> Result<ComplexVector<T>> {
    if h_su.len() != h_pu.len() {
        return Err(Error::LengthMismatch(h_su.len(), h_pu.len()));
    }
    if h_su.len() < crate::channel::MIN_ANTENNAS {
        return Err(Error::TooFewAntennas(h_su.len()));
    }
    for h in [h_su, h_pu] {
        let n2 = h.norm_sqr();
        if (n2 - T::one()).abs() > T::unit_tol() {
            return Err(Error::NotUnitNorm(n2.to_f64().unwrap_or(f64::NAN)));
        }
    }

    // Gram entries G_ij = sum_l h_i[l] conj(h_j[l]).
    let a_su = h_su.conj();
    let a_pu = h_pu.conj();
    let g11 = h_su.norm_sqr();
    let g22 = h_pu.norm_sqr();
    let g21 = crate::channel::inner_product(h_su, h_pu)?;
    let g12 = g21.conj();
    let det = Complex::new(g11 * g22, T::zero()) - g12 * g21;
    if det.re < T::lit(NEAR_SINGULAR_GUARD) {
        return Err(Error::IllConditioned(det.re.to_f64().unwrap_or(f64::NAN)));
    }

    let c_su = (targets.b_su * g22 - g12 * targets.b_pu) / det;
    let c_pu = (targets.b_pu * g11 - g21 * targets.b_su) / det;
    a_su.scale(c_su).axpy(c_pu, &a_pu)
}

/// Squared norms and their average for the two OOK weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSummary<T> {
    pub norm0_sq: T,
    pub norm1_sq: T,
    pub xi: T,
}

/// Closed-form norms of the phase-aligned minimum-norm weights.
///
/// `|w0|^2 = (1 - a) / (1 - r^2)`,
/// `|w1|^2 = (1 - 2 sqrt(a) sqrt(1 - a) r) / (1 - r^2)`, `xi` their mean.
pub fn closed_form_norms<T: Real>(alpha: T, rho_mag: T) -> Result<NormSummary<T>> {
    check_alpha(alpha)?;
    check_rho_mag(rho_mag)?;
    let denom = T::one() - rho_mag * rho_mag;
    let cross = alpha.sqrt() * (T::one() - alpha).sqrt() * rho_mag;
    let norm0_sq = (T::one() - alpha) / denom;
    let norm1_sq = (T::one() - (cross + cross)) / denom;
    Ok(NormSummary {
        norm0_sq,
        norm1_sq,
        xi: (norm0_sq + norm1_sq) / T::lit(2.0),
    })
}

/// The published single-cross-term variant, which drops the factor 2 on
/// `sqrt(a) sqrt(1 - a) r` in `|w1|^2` (and therefore in `xi`). Kept only for
/// side-by-side reporting; the solver agrees with [`closed_form_norms`].
pub fn single_cross_term_norms<T: Real>(alpha: T, rho_mag: T) -> Result<NormSummary<T>> {
    check_alpha(alpha)?;
    check_rho_mag(rho_mag)?;
    let denom = T::one() - rho_mag * rho_mag;
    let cross = alpha.sqrt() * (T::one() - alpha).sqrt() * rho_mag;
    let norm0_sq = (T::one() - alpha) / denom;
    let norm1_sq = (T::one() - cross) / denom;
    Ok(NormSummary {
        norm0_sq,
        norm1_sq,
        xi: (norm0_sq + norm1_sq) / T::lit(2.0),
    })
}

/// Solved OOK weights for one channel pair and power coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet<T> {
    omega0: ComplexVector<T>,
    omega1: ComplexVector<T>,
    norm0_sq: T,
    norm1_sq: T,
    xi: T,
    alpha: T,
    rho: Complex<T>,
}

impl<T: Real> WeightSet<T> {
    pub fn omega(&self, bit: bool) -> &ComplexVector<T> {
        if bit {
            &self.omega1
        } else {
            &self.omega0
        }
    }

    pub fn omega0(&self) -> &ComplexVector<T> {
        &self.omega0
    }

    pub fn omega1(&self) -> &ComplexVector<T> {
        &self.omega1
    }

    pub fn norm0_sq(&self) -> T {
        self.norm0_sq
    }

    pub fn norm1_sq(&self) -> T {
        self.norm1_sq
    }

    /// Average squared norm of the two weights.
    pub fn xi(&self) -> T {
        self.xi
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn rho(&self) -> Complex<T> {
        self.rho
    }

    /// `omega_bit / sqrt(xi)`: the transmitted weight, with unit average
    /// squared norm over the two symbols.
    pub fn normalized(&self, bit: bool) -> ComplexVector<T> {
        self.omega(bit)
            .scale(Complex::new(self.xi.sqrt().recip(), T::zero()))
    }
}

/// Solves both OOK weights on `pair` and takes norms from the solved vectors.
pub fn build_weight_set<T: Real>(pair: &ChannelPair<T>, alpha: T) -> Result<WeightSet<T>> {
    check_alpha(alpha)?;
    let rho = pair.rho();
    let omega0 = solve_min_norm(pair.h_su(), pair.h_pu(), TargetGains::zero_symbol(alpha))?;
    let omega1 = solve_min_norm(pair.h_su(), pair.h_pu(), phase_align_targets(alpha, rho))?;
    let norm0_sq = omega0.norm_sqr();
    let norm1_sq = omega1.norm_sqr();
    Ok(WeightSet {
        omega0,
        omega1,
        norm0_sq,
        norm1_sq,
        xi: (norm0_sq + norm1_sq) / T::lit(2.0),
        alpha,
        rho,
    })
}

/// Normal-operation weight: the unit-norm minimum-norm solution of
/// `h_pu^T w = 1` with no SU constraint.
pub fn baseline_weight<T: Real>(pair: &ChannelPair<T>) -> ComplexVector<T> {
    let h = pair.h_pu();
    h.conj().scale(Complex::new(h.norm_sqr().recip(), T::zero()))
}
