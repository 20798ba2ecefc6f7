//! Rigorous enclosures of the analytic quantities attached to Δ_k(n):
//! x_k(n), α_k, I_ν(z), M_k(n), the Bessel remainder bounds, the φ_k/Φ_k
//! envelopes, the Λ_k/Θ_k bounds and g_k/G_k.
//!
//! Formulas are evaluated wherever they are defined. Claims are only
//! asserted inside their validity ranges; outside them the checks return
//! [`AsymptoticError::Hypothesis`].

mod bessel;
mod bounds;

pub use bessel::{
    asymptotic_sum, bessel_i, check_bessel_remainder, envelopes_phi, general_remainder_bound, main_term_s2,
    remainder_threshold, BesselCheck, EnvelopeOrientation, Envelopes, RemainderBound,
};
pub use bounds::{
    delta_bounds_check, g_big_g, lambda_bounds_check, lambda_exact, lambda_theta_bounds, sandwich_check,
    theta_bounds_check, theta_exact, BoundsRow, DeltaRow, LambdaThetaBounds,
};

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rug::Rational;
use thiserror::Error;

use crate::interval::IntervalReal;

/// x_k(n) from which the Δ_k(n) and Λ·g ≤ Θ ≤ Λ·G sandwiches hold.
pub const X_DELTA_BOUNDS: u32 = 152;
/// x_k(n) from which the closed-form Θ_k(n) bounds hold.
pub const X_THETA_BOUNDS: u32 = 315;
/// t from which the φ/Φ envelopes of I₂(√α t) are claimed.
pub const T_ENVELOPES: u32 = 971;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AsymptoticError {
    #[error("analytic bounds are only available for k = 1 or 2, got k = {0}")]
    UnsupportedK(u32),
    #[error("24n - (2k+2) must be positive (k = {k}, n = {n})")]
    NonpositiveRadicand { k: u32, n: usize },
    #[error("argument must be positive")]
    NonpositiveArgument,
    #[error("argument must be nonnegative")]
    NegativeArgument,
    #[error("ν must be at least 2")]
    SmallOrder,
    #[error("outside the validity range: {0}")]
    Hypothesis(String),
    #[error("table holds Δ up to {have}, need {need}")]
    TableTooShort { have: usize, need: usize },
}

/// α_k and the γ-coefficients of the φ_k/Φ_k envelopes for k ∈ {1, 2}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticConstants {
    k: u32,
    alpha: Rational,
}

/// Rational parts of γ₁..γ₆; γ_i = c_i / α^(i/2).
const GAMMA_NUMERATORS: [(i64, i64); 6] =
    [(15, 8), (105, 128), (315, 1024), (10395, 32768), (135135, 262144), (73, 1)];

impl AsymptoticConstants {
    pub fn new(k: u32) -> Result<Self, AsymptoticError> {
        if !(1..=2).contains(&k) {
            return Err(AsymptoticError::UnsupportedK(k));
        }
        Ok(AsymptoticConstants { k, alpha: Rational::from((5 * k + 2, 2 * k + 1)) })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// α_k = (5k+2)/(2k+1), exact.
    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn alpha_interval(&self, prec: u32) -> IntervalReal {
        IntervalReal::from_rational(&self.alpha, prec)
    }

    /// √α_k, computed once per (k, precision).
    pub fn sqrt_alpha(&self, prec: u32) -> IntervalReal {
        static CACHE: OnceLock<RwLock<HashMap<(u32, u32), IntervalReal>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(v) = cache.read().unwrap().get(&(self.k, prec)) {
            return v.clone();
        }
        let v = self.alpha_interval(prec).sqrt();
        cache.write().unwrap().entry((self.k, prec)).or_insert(v).clone()
    }

    /// γ_i as (c_i, i): the exact value is c_i · α^(−i/2).
    pub fn gamma_exact(&self, i: usize) -> (Rational, u32) {
        assert!((1..=6).contains(&i), "γ index is 1..=6");
        let (n, d) = GAMMA_NUMERATORS[i - 1];
        (Rational::from((n, d)), i as u32)
    }

    pub fn gamma(&self, i: usize, prec: u32) -> IntervalReal {
        let (c, half_powers) = self.gamma_exact(i);
        let sa = self.sqrt_alpha(prec);
        IntervalReal::from_rational(&c, prec) / sa.pow_u(half_powers)
    }
}

/// x_k(n) = π √(24n − (2k+2)) / 6.
pub fn x_k(k: u32, n: usize, prec: u32) -> Result<IntervalReal, AsymptoticError> {
    let rad = 24 * n as i64 - (2 * k as i64 + 2);
    if rad <= 0 {
        return Err(AsymptoticError::NonpositiveRadicand { k, n });
    }
    let root = IntervalReal::from_i64(rad, prec).sqrt();
    Ok(&(&IntervalReal::pi(prec) * &root) / &IntervalReal::from_i64(6, prec))
}

/// M_k(n) = α_k π³ / (18 x_k(n)²) · I₂(√α_k x_k(n)).
pub fn m_k(k: u32, n: usize, prec: u32) -> Result<IntervalReal, AsymptoticError> {
    let c = AsymptoticConstants::new(k)?;
    let x = x_k(k, n, prec)?;
    m_k_at(&c, &x, prec)
}

pub(crate) fn m_k_at(c: &AsymptoticConstants, x: &IntervalReal, prec: u32) -> Result<IntervalReal, AsymptoticError> {
    let z = &c.sqrt_alpha(prec) * x;
    let bessel = bessel_i(2, &z, prec)?;
    let pi3 = IntervalReal::pi(prec).pow_u(3);
    let front = &pi3.mul_rational(c.alpha()) / &x.sqr().mul_rational(&Rational::from(18));
    Ok(&front * &bessel)
}

/// Working precision for quantities of size e^z: ⌈1.45 z⌉ + 64 bits, and
/// never below the default.
pub fn auto_precision(z: f64) -> u32 {
    let p = (1.45 * z.max(0.0)).ceil() as u32 + 64;
    p.max(crate::interval::DEFAULT_PREC)
}

/// Precision chosen by [`auto_precision`] for the Bessel argument at n.
pub fn auto_precision_for(k: u32, n: usize) -> u32 {
    let alpha = (5.0 * k as f64 + 2.0) / (2.0 * k as f64 + 1.0);
    let x = std::f64::consts::PI * ((24.0 * n as f64 - (2.0 * k as f64 + 2.0)).max(0.0)).sqrt() / 6.0;
    auto_precision(alpha.sqrt() * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    const P: u32 = 256;

    #[test]
    fn alpha_values() {
        assert_eq!(*AsymptoticConstants::new(1).unwrap().alpha(), Rational::from((7, 3)));
        assert_eq!(*AsymptoticConstants::new(2).unwrap().alpha(), Rational::from((12, 5)));
        assert_eq!(AsymptoticConstants::new(3), Err(AsymptoticError::UnsupportedK(3)));
        assert_eq!(AsymptoticConstants::new(0), Err(AsymptoticError::UnsupportedK(0)));
    }

    #[test]
    fn gammas() {
        let c = AsymptoticConstants::new(1).unwrap();
        assert_eq!(c.gamma_exact(1), (Rational::from((15, 8)), 1));
        assert_eq!(c.gamma_exact(6), (Rational::from(73), 6));
        // γ₆ = 73/α³ = 73·27/343
        assert!(c.gamma(6, P).contains_rational(&Rational::from((73 * 27, 343))));
        // γ₂ = 105/(128 α)
        assert!(c.gamma(2, P).contains_rational(&Rational::from((105 * 3, 128 * 7))));
        let g1 = c.gamma(1, P).to_f64();
        assert!((g1 - 15.0 / 8.0 / (7.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn x_k_values() {
        let x = x_k(1, 1, P).unwrap();
        assert!((x.to_f64() - 2.341_604_9).abs() < 1e-6);
        assert!(x.width() < x.hi().clone() >> (P - 4));
        assert!(x_k(1, 3512, P).unwrap().cmp_rational(&Rational::from(152)) == Some(Ordering::Greater));
        assert!(x_k(1, 3511, P).unwrap().cmp_rational(&Rational::from(152)) == Some(Ordering::Less));
        assert!(x_k(2, 15081, P).unwrap().cmp_rational(&Rational::from(315)) == Some(Ordering::Greater));
        assert!(x_k(2, 15080, P).unwrap().cmp_rational(&Rational::from(315)) == Some(Ordering::Less));
        assert_eq!(x_k(1, 0, P), Err(AsymptoticError::NonpositiveRadicand { k: 1, n: 0 }));
    }

    #[test]
    fn m_k_is_finite_below_validity() {
        let m = m_k(1, 10, P).unwrap();
        assert!(m.is_finite());
        assert!(m.sign() == Some(Ordering::Greater));
    }

    #[test]
    fn precision_rule() {
        assert_eq!(auto_precision(10_000.0), 14_564);
        assert_eq!(auto_precision(1.0), crate::interval::DEFAULT_PREC);
    }
}
