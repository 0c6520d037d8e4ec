//! Graded Euler characteristics: the link and knot formulas built on the
//! Alexander polynomial, the minus-flavored series, the q-fold surgery
//! decomposition, slope convolution, grading shifts, and support bounds.

use num_bigint::BigInt;
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EulerChiError {
    #[error("expected a polynomial in {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("support bound (n - chi_S)/2 is not an integer: n = {n}, chi_S = {chi_s}")]
    NonIntegralBound { n: i64, chi_s: i64 },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Whether a graded characteristic is pinned down exactly or only defined up
/// to multiplication by ± a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiMode {
    Exact,
    UpToUnit,
}

/// A graded Euler characteristic with named grading classes, one per
/// variable of the underlying polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedChi {
    pub poly: LaurentPoly,
    pub basis: Vec<String>,
    pub mode: ChiMode,
}

impl GradedChi {
    pub fn up_to_unit(poly: LaurentPoly) -> Self {
        let basis = default_basis(poly.num_vars());
        GradedChi { poly: poly.canonical_form(), basis, mode: ChiMode::UpToUnit }
    }

    pub fn exact(poly: LaurentPoly) -> Self {
        let basis = default_basis(poly.num_vars());
        GradedChi { poly, basis, mode: ChiMode::Exact }
    }
}

fn default_basis(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("rho{i}")).collect()
}

/// Consistency of an integer characteristic with the instanton L-space
/// condition dim = |H_1|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LSpaceVerdict {
    /// |total| = |H_1|: the dimension bound is sharp, every summand must be
    /// one-dimensional.
    Sharp,
    /// |total| < |H_1|: no contradiction, but the bound is not sharp.
    Compatible,
    /// |total| > |H_1|: impossible for an L-space.
    NotLSpace,
}

/// The q equal pieces that a characteristic splits into under the q-fold
/// grading of a surgery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharpDecomposition {
    pub q: u64,
    pub pieces: Vec<i64>,
    pub total: i64,
    pub verdict: Option<LSpaceVerdict>,
}

/// χ_gr of an n-component link: Δ_L(t₁,…,t_n) · ∏ (t_j − 1), up to units.
pub fn chi_link(delta_l: &LaurentPoly, n: usize) -> Result<GradedChi, EulerChiError> {
    if delta_l.num_vars() != n || n < 2 {
        return Err(EulerChiError::ArityMismatch { expected: n.max(2), got: delta_l.num_vars() });
    }
    let mut p = delta_l.clone();
    for j in 0..n {
        let factor = LaurentPoly::var(n, j).sub(&LaurentPoly::one(n));
        p = p.mul(&factor);
    }
    Ok(GradedChi::up_to_unit(p))
}

/// χ_gr of a knot whose meridian class is t^k: Δ · (t^k − 1)/(t − 1), up to
/// units. With k = 1 this is Δ itself.
pub fn chi_knot(delta_m: &LaurentPoly, k: i64) -> Result<GradedChi, EulerChiError> {
    if delta_m.num_vars() != 1 {
        return Err(EulerChiError::ArityMismatch { expected: 1, got: delta_m.num_vars() });
    }
    // (t^k - 1)/(t - 1): a geometric sum for k > 0, zero for k = 0, and
    // -t^k (1 + t + ... + t^{|k|-1}) for k < 0.
    let quotient = if k == 0 {
        LaurentPoly::zero(1)
    } else {
        let sum = LaurentPoly::from_terms(1, (0..k.abs()).map(|i| (vec![i], BigInt::from(1))));
        if k > 0 {
            sum
        } else {
            sum.shift(&[k]).neg()
        }
    };
    Ok(GradedChi::up_to_unit(delta_m.mul(&quotient)))
}

/// The minus-flavored series −Δ_K(t) · (1 + t⁻¹ + t⁻² + …), truncated at the
/// given depth. The input must be the symmetrized Δ_K; the sign is then
/// pinned down exactly.
pub fn chi_khi_minus(
    delta_symmetrized: &LaurentPoly,
    depth: u32,
) -> Result<TruncatedSeries, EulerChiError> {
    Ok(delta_symmetrized.neg().geometric_truncation(depth)?)
}

/// Split an integer characteristic into the q equal pieces forced by the
/// surgery decomposition, optionally judging it against |H_1| = h1_order.
pub fn chi_sharp_decompose(chi_y: i64, q: u64, h1_order: Option<u64>) -> SharpDecomposition {
    let q = q.max(1);
    let pieces = vec![chi_y; q as usize];
    let total = chi_y * q as i64;
    let verdict = h1_order.map(|h| {
        use std::cmp::Ordering::*;
        match total.unsigned_abs().cmp(&h) {
            Less => LSpaceVerdict::Compatible,
            Equal => LSpaceVerdict::Sharp,
            Greater => LSpaceVerdict::NotLSpace,
        }
    });
    SharpDecomposition { q, pieces, total, verdict }
}

/// χ at suture slope with denominator y: the y-fold convolution
/// χ_μ · (1 + t + … + t^{y−1}), up to units. y = 0 gives 0.
pub fn chi_slope(chi_mu: &GradedChi, y: u64) -> Result<GradedChi, EulerChiError> {
    if chi_mu.poly.num_vars() != 1 {
        return Err(EulerChiError::ArityMismatch { expected: 1, got: chi_mu.poly.num_vars() });
    }
    if y == 0 {
        return Ok(GradedChi::up_to_unit(LaurentPoly::zero(1)));
    }
    let window =
        LaurentPoly::from_terms(1, (0..y as i64).map(|i| (vec![i], BigInt::from(1))));
    Ok(GradedChi::up_to_unit(chi_mu.poly.mul(&window)))
}

/// Shift the grading by k: multiply by t^k in exact mode; a normalization
/// no-op in up-to-unit mode, where monomial factors are invisible.
pub fn stabilization_shift(chi: &GradedChi, k: i64) -> Result<GradedChi, EulerChiError> {
    if chi.poly.num_vars() != 1 {
        return Err(EulerChiError::ArityMismatch { expected: 1, got: chi.poly.num_vars() });
    }
    let shifted = chi.poly.shift(&[k]);
    Ok(match chi.mode {
        ChiMode::Exact => GradedChi::exact(shifted),
        ChiMode::UpToUnit => GradedChi::up_to_unit(shifted),
    })
}

/// Check the adjunction-style support bound: every grading i in the support
/// must satisfy |i| ≤ (n − χ(S))/2. The bound must be an integer.
pub fn support_bound_check(
    chi: &GradedChi,
    n_half_intersections: i64,
    chi_s: i64,
) -> Result<bool, EulerChiError> {
    if chi.poly.num_vars() != 1 {
        return Err(EulerChiError::ArityMismatch { expected: 1, got: chi.poly.num_vars() });
    }
    let span = n_half_intersections - chi_s;
    if span.rem_euclid(2) != 0 {
        return Err(EulerChiError::NonIntegralBound {
            n: n_half_intersections,
            chi_s,
        });
    }
    let bound = span / 2;
    Ok(chi.poly.terms().all(|(e, _)| e[0].abs() <= bound))
}
