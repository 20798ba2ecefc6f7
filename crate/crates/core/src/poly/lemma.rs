//! The quadratic analysis behind the implication
//! u + (1-u)^{3/2} > v  ⇒  4(1-u)(1-v) - (1-uv)² > 0  for 15/16 ≤ u < v < 1.

use std::cmp::Ordering;

use rug::Rational;
use thiserror::Error;

use super::{rpow, Bound, PolyQ};
use crate::interval::IntervalReal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LemmaError {
    #[error("need 15/16 ≤ u < v < 1, got u = {u}, v = {v}")]
    UvDomain { u: Rational, v: Rational },
    #[error("need 15/16 ≤ u < 1, got u = {0}")]
    UDomain(Rational),
    #[error("need 0 < s ≤ 1/4, got s = {0}")]
    SDomain(Rational),
}

fn lower_u() -> Rational {
    Rational::from((15, 16))
}

/// Exact check of the implication at (u, v). Returns `true` when the
/// hypothesis fails or the conclusion holds.
pub fn lemma_uv_check(u: &Rational, v: &Rational) -> Result<bool, LemmaError> {
    if *u < lower_u() || u >= v || *v >= 1 {
        return Err(LemmaError::UvDomain { u: u.clone(), v: v.clone() });
    }
    let one_u = Rational::from(1 - u);
    let one_v = Rational::from(1 - v);
    // v - u > 0, so u + (1-u)^{3/2} > v  ⇔  (v-u)² < (1-u)³
    let gap = Rational::from(v - u);
    let hypothesis = gap.square() < rpow(&one_u, 3);
    let uv = Rational::from(u * v);
    let conclusion = 4 * one_u * one_v - Rational::from(1 - uv).square();
    Ok(!hypothesis || conclusion > 0)
}

/// f(t) = -u²t² + (6u-4)t - 4u + 3, positive exactly between its roots t₁(u) < t₂(u).
pub fn tau_quadratic(u: &Rational) -> PolyQ {
    PolyQ::new(vec![
        Rational::from(3 - Rational::from(4 * u)),
        Rational::from(6 * u) - 4,
        -Rational::from(u.square_ref()),
    ])
}

/// Checks 0 < t₁(u) < u < t₂(u) < 1 by Sturm counts on the three
/// subintervals together with the signs f(0) < 0, f(u) > 0, f(1) < 0.
pub fn root_ordering_check(u: &Rational) -> Result<bool, LemmaError> {
    if *u < lower_u() || *u >= 1 {
        return Err(LemmaError::UDomain(u.clone()));
    }
    let f = tau_quadratic(u);
    let zero = Rational::new();
    let one = Rational::from(1);
    let at = |x: &Rational| Bound::At(x.clone());
    let chain = f.sturm().expect("nonzero quadratic");
    Ok(f.sign_at(&zero) == Ordering::Less
        && f.sign_at(u) == Ordering::Greater
        && f.sign_at(&one) == Ordering::Less
        && chain.count(&at(&zero), &at(u)) == 1
        && chain.count(&at(u), &at(&one)) == 1
        && chain.count(&Bound::NegInf, &Bound::PosInf) == 2)
}

/// τ > 0 at every sample s, where u = 1 - s² and
/// τ = s³(√5 - 1 - 2s)(√5 + 1 + 2s) / (4(s+1)²).
/// Only the first factor can vanish; it is positive iff (2s+1)² < 5.
pub fn tau_positivity_check(samples: &[Rational]) -> Result<bool, LemmaError> {
    let quarter = Rational::from((1, 4));
    for s in samples {
        if *s <= 0 || *s > quarter {
            return Err(LemmaError::SDomain(s.clone()));
        }
    }
    Ok(samples.iter().all(|s| (Rational::from(2 * s) + 1u32).square() < 5))
}

/// Interval enclosure of t₂(u) - u - (1-u)^{3/2} at u = 1 - s².
pub fn tau_enclosure(s: &Rational, prec: u32) -> IntervalReal {
    let u = Rational::from(1 - Rational::from(s.square_ref()));
    let s3 = IntervalReal::from_rational(&rpow(s, 3), prec);
    let ui = IntervalReal::from_rational(&u, prec);
    let num = &IntervalReal::from_rational(&(Rational::from(3 * &u) - 2u32), prec) + &s3.mul_rational(&Rational::from(2));
    let t2 = &num / &ui.sqr();
    &(&t2 - &ui) - &s3
}
