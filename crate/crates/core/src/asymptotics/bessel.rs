use std::cmp::Ordering;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::{auto_precision, AsymptoticConstants, AsymptoticError};
use crate::interval::IntervalReal;
use crate::verify::Verdict;

/// One endpoint of the ascending series Σ_m (z/2)^(2m+ν) / (m! (m+ν)!).
/// With `Round::Down` the result is a lower bound (finite partial sum);
/// with `Round::Up` it is an upper bound (partial sum plus geometric tail).
fn series_endpoint(nu: u32, z: &Float, prec: u32, round: Round) -> Float {
    let half = Float::with_val_round(prec, z / 2u32, round).0;
    let q = Float::with_val_round(prec, half.square_ref(), round).0;
    // (z/2)^ν / ν!
    let mut term = Float::with_val_round(prec, half.clone().pow(nu), round).0;
    let fact = Integer::from(Integer::factorial(nu));
    term = Float::with_val_round(prec, &term / &fact, round).0;
    let mut sum = term.clone();
    if term.is_zero() {
        return sum;
    }
    let cutoff_bits = prec as i32 + 8;
    let mut m: u64 = 0;
    loop {
        let denom = (m + 1) * (m + 1 + nu as u64);
        let ratio_small = {
            // (z/2)² / ((m+1)(m+1+ν)) < 1/2  ⇔  2q < denom
            let two_q = Float::with_val(prec, &q * 2u32);
            two_q < denom
        };
        if ratio_small {
            let tiny = match (term.get_exp(), sum.get_exp()) {
                (Some(te), Some(se)) => te < se - cutoff_bits,
                _ => true,
            };
            if tiny {
                if round == Round::Up {
                    // tail ≤ term·r/(1−r) ≤ term since r < 1/2 and ratios decrease
                    sum = Float::with_val_round(prec, &sum + &term, Round::Up).0;
                }
                return sum;
            }
        }
        term = Float::with_val_round(prec, &term * &q, round).0;
        term = Float::with_val_round(prec, &term / denom, round).0;
        sum = Float::with_val_round(prec, &sum + &term, round).0;
        m += 1;
    }
}

/// Enclosure of I_ν(z) by the all-positive ascending series.
pub fn bessel_i(nu: u32, z: &IntervalReal, prec: u32) -> Result<IntervalReal, AsymptoticError> {
    if z.lo().cmp0() == Some(Ordering::Less) {
        return Err(AsymptoticError::NegativeArgument);
    }
    let lo = series_endpoint(nu, z.lo(), prec, Round::Down);
    let hi = series_endpoint(nu, z.hi(), prec, Round::Up);
    Ok(IntervalReal::new(lo, hi))
}

/// Coefficients of Σ_{i=0}^{5} ∏_{j=1}^{i} (ν − j + ½)(ν + j − ½) / (i! (−2z)^i)
/// as multiples of z^(−i).
pub fn asymptotic_sum(nu: u32) -> Vec<Rational> {
    let nu = Rational::from(nu);
    let half = Rational::from((1, 2));
    let mut out = Vec::with_capacity(6);
    let mut acc = Rational::from(1);
    out.push(acc.clone());
    for i in 1..=5i64 {
        let a = Rational::from(&nu - Rational::from(i)) + &half;
        let b = Rational::from(&nu + Rational::from(i)) - &half;
        acc *= a * b;
        acc /= Rational::from(-2 * i);
        out.push(acc.clone());
    }
    out
}

const S2: [(i64, i64); 6] = [(1, 1), (-15, 8), (105, 128), (315, 1024), (10395, 32768), (135135, 262144)];

fn horner_inverse(coeffs: &[Rational], z: &IntervalReal) -> IntervalReal {
    let w = z.recip();
    let mut acc = IntervalReal::from_i64(0, z.prec());
    for c in coeffs.iter().rev() {
        acc = (&acc * &w).add_rational(c);
    }
    acc
}

/// S(z) = 1 − 15/(8z) + 105/(128z²) + 315/(1024z³) + 10395/(32768z⁴) + 135135/(262144z⁵).
pub fn main_term_s2(z: &IntervalReal) -> Result<IntervalReal, AsymptoticError> {
    if z.lo().cmp0() != Some(Ordering::Greater) {
        return Err(AsymptoticError::NonpositiveArgument);
    }
    let c: Vec<Rational> = S2.iter().map(|&(n, d)| Rational::from((n, d))).collect();
    Ok(horner_inverse(&c, z))
}

/// (ν + 11/2)⁶ / 120, the smallest z for which the remainder bounds hold.
pub fn remainder_threshold(nu: u32) -> Rational {
    let base = Rational::from(nu) + Rational::from((11, 2));
    let mut p = Rational::from(1);
    for _ in 0..6 {
        p *= &base;
    }
    p / 120u32
}

fn require_threshold(nu: u32, z: &IntervalReal) -> Result<(), AsymptoticError> {
    let t = remainder_threshold(nu);
    if *z.hi() < t {
        return Err(AsymptoticError::Hypothesis(format!(
            "z = {} is below (ν + 11/2)⁶/120 = {}",
            z.lo_decimal(12),
            Float::with_val(64, &t).to_string_radix(10, Some(10))
        )));
    }
    Ok(())
}

/// Outcome of the ν = 2 remainder check at one z.
#[derive(Clone, Debug)]
pub struct BesselCheck {
    /// 73/z⁶ − |I₂(z) e^(−z) √(2πz) − S(z)|
    pub margin: IntervalReal,
    /// |I₂(z) e^(−z) √(2πz) − S(z)| · z⁶
    pub scaled_error: IntervalReal,
    pub precision: u32,
    pub verdict: Verdict,
}

/// Confronts I₂(z) with its five-term expansion and the 73/z⁶ bound.
/// `prec = None` selects [`auto_precision`] from z.
pub fn check_bessel_remainder(z: &IntervalReal, prec: Option<u32>) -> Result<BesselCheck, AsymptoticError> {
    require_threshold(2, z)?;
    let p = prec.unwrap_or_else(|| auto_precision(z.hi().to_f64()));
    let z = z.with_prec(p.max(z.prec()));
    let i2 = bessel_i(2, &z, p)?;
    let two_pi_z = &IntervalReal::pi(p).mul_rational(&Rational::from(2)) * &z;
    let scaled = &(&i2 * &(-&z).exp()) * &two_pi_z.sqrt();
    let err = (&scaled - &main_term_s2(&z)?).abs();
    let z6 = z.pow_u(6);
    let bound = &IntervalReal::from_i64(73, p) / &z6;
    let margin = &bound - &err;
    let verdict = match margin.sign() {
        Some(Ordering::Greater) => Verdict::Pass,
        Some(_) => Verdict::Fail,
        None => {
            if margin.hi().cmp0() == Some(Ordering::Less) {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            }
        }
    };
    Ok(BesselCheck { scaled_error: &err * &z6, margin, precision: p, verdict })
}

/// The three terms of the general-ν remainder bound and their sum.
#[derive(Clone, Debug)]
pub struct RemainderBound {
    pub binomial_term: IntervalReal,
    pub power_term: IntervalReal,
    pub product_term: IntervalReal,
    pub total: IntervalReal,
}

/// |C(ν − ½, i)|, exact.
fn abs_half_binomial(nu: u32, i: u32) -> Rational {
    let top = Rational::from(nu) - Rational::from((1, 2));
    let mut acc = Rational::from(1);
    for m in 0..i {
        acc *= Rational::from(&top - m);
        acc /= m + 1;
    }
    acc.abs()
}

/// Γ(ν + ½) = (2ν)! / (4^ν ν!) · √π.
fn gamma_half(nu: u32, prec: u32) -> IntervalReal {
    let num = Integer::from(Integer::factorial(2 * nu));
    let den = Integer::from(Integer::factorial(nu)) << (2 * nu);
    IntervalReal::from_rational(&Rational::from((num, den)), prec) * IntervalReal::pi(prec).sqrt()
}

/// Right-hand side of the general remainder bound for integer ν ≥ 2:
///
/// ```text
///   52 e^(−z) / (17 Γ(ν+½)) Σ_{i=0}^{5} |C(ν−½, i)| z^(ν−½) / 2^i
///   + e^(−z) z^(ν+½) / (2^(ν−½) Γ(ν+½))
///   + |∏_{j∈{1,3,..,11}} (ν² − j²/4)| / (6! 2^(ν−½) z⁶) · max{2^(ν−13/2), 1}
/// ```
pub fn general_remainder_bound(nu: u32, z: &IntervalReal, prec: u32) -> Result<RemainderBound, AsymptoticError> {
    if nu < 2 {
        return Err(AsymptoticError::SmallOrder);
    }
    require_threshold(nu, z)?;
    let p = prec;
    let z = z.with_prec(p.max(z.prec()));
    let sqrt_z = z.sqrt();
    let sqrt2 = IntervalReal::from_i64(2, p).sqrt();
    let gamma = gamma_half(nu, p);
    let e = (-&z).exp();
    let z_nu = z.pow_u(nu);
    // z^(ν−½) and 2^(ν−½)
    let z_nu_half = &z_nu / &sqrt_z;
    let two_nu_half = &IntervalReal::from_integer(&(Integer::from(1) << nu), p) / &sqrt2;

    let mut bin_sum = Rational::new();
    for i in 0..=5u32 {
        bin_sum += abs_half_binomial(nu, i) / Rational::from(Integer::from(1) << i);
    }
    let binomial_term = &(&e.mul_rational(&Rational::from((52, 17))) / &gamma) * &z_nu_half.mul_rational(&bin_sum);

    let power_term = &(&e * &(&z_nu * &sqrt_z)) / &(&two_nu_half * &gamma);

    let nu2 = Rational::from(nu * nu);
    let mut prod = Rational::from(1);
    for j in [1u32, 3, 5, 7, 9, 11] {
        prod *= Rational::from(&nu2 - Rational::from((j * j, 4)));
    }
    let prod = prod.abs() / 720u32;
    let factor = if nu <= 6 {
        IntervalReal::from_i64(1, p)
    } else {
        // 2^(ν − 13/2) = 2^(ν−6) / √2
        &IntervalReal::from_integer(&(Integer::from(1) << (nu - 6)), p) / &sqrt2
    };
    let product_term = &(&IntervalReal::from_rational(&prod, p) / &(&two_nu_half * &z.pow_u(6))) * &factor;

    let total = &(&binomial_term + &power_term) + &product_term;
    Ok(RemainderBound { binomial_term, power_term, product_term, total })
}

/// Which of φ_k, Φ_k is taken as the lower envelope of I₂(√α t) e^(−√α t) √(2π√α t).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeOrientation {
    /// φ_k (carrying +γ₆/t⁶) below, Φ_k (carrying −γ₆/t⁶) above.
    AsPrinted,
    /// Φ_k below, φ_k above.
    Swapped,
}

#[derive(Clone, Debug)]
pub struct Envelopes {
    /// 1 − γ₁/t + γ₂/t² + γ₃/t³ + γ₄/t⁴ + γ₅/t⁵ + γ₆/t⁶
    pub phi: IntervalReal,
    /// the same with −γ₆/t⁶
    pub big_phi: IntervalReal,
}

impl Envelopes {
    pub fn lower_upper(&self, orientation: EnvelopeOrientation) -> (&IntervalReal, &IntervalReal) {
        match orientation {
            EnvelopeOrientation::AsPrinted => (&self.phi, &self.big_phi),
            EnvelopeOrientation::Swapped => (&self.big_phi, &self.phi),
        }
    }

    /// Decides lower ≤ I₂(√α t) e^(−√α t) √(2π√α t) ≤ upper for the given
    /// orientation; `None` where the enclosures overlap.
    pub fn holds(
        &self,
        k: u32,
        t: &IntervalReal,
        orientation: EnvelopeOrientation,
        prec: u32,
    ) -> Result<(Option<bool>, Option<bool>), AsymptoticError> {
        let c = AsymptoticConstants::new(k)?;
        let z = &c.sqrt_alpha(prec) * t;
        let i2 = bessel_i(2, &z, prec)?;
        let two_pi_z = &IntervalReal::pi(prec).mul_rational(&Rational::from(2)) * &z;
        let scaled = &(&i2 * &(-&z).exp()) * &two_pi_z.sqrt();
        let (lo, hi) = self.lower_upper(orientation);
        let below = lo.cmp_interval(&scaled).map(|o| o != Ordering::Greater);
        let above = scaled.cmp_interval(hi).map(|o| o != Ordering::Greater);
        Ok((below, above))
    }
}

/// Evaluates φ_k(t) and Φ_k(t).
pub fn envelopes_phi(k: u32, t: &IntervalReal, prec: u32) -> Result<Envelopes, AsymptoticError> {
    if t.lo().cmp0() != Some(Ordering::Greater) {
        return Err(AsymptoticError::NonpositiveArgument);
    }
    let c = AsymptoticConstants::new(k)?;
    let w = t.recip();
    // S_k(t) = 1 − γ₁/t + γ₂/t² + ... + γ₅/t⁵
    let mut acc = IntervalReal::from_i64(0, prec);
    for i in (1..=5).rev() {
        let g = c.gamma(i, prec);
        let g = if i == 1 { -g } else { g };
        acc = &(&acc + &g) * &w;
    }
    let s = acc.add_rational(&Rational::from(1));
    let tail = &c.gamma(6, prec) * &w.pow_u(6);
    Ok(Envelopes { phi: &s + &tail, big_phi: &s - &tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn iv(n: i64) -> IntervalReal {
        IntervalReal::from_i64(n, P)
    }

    #[test]
    fn bessel_small_arguments() {
        let zero = iv(0);
        assert!(bessel_i(2, &zero, P).unwrap().contains_rational(&Rational::new()));
        assert!(bessel_i(0, &zero, P).unwrap().contains_rational(&Rational::from(1)));
        let one = bessel_i(2, &iv(1), P).unwrap();
        let reference = crate::interval::parse_decimal("0.1357476697670382811828525699949909229499").unwrap();
        let eps = Rational::from((1, 10i64.pow(18)));
        assert!(one.cmp_rational(&(reference.clone() - &eps)) == Some(Ordering::Greater));
        assert!(one.cmp_rational(&(reference + &eps)) == Some(Ordering::Less));
        assert!(one.width() < Float::with_val(P, 1) >> (P - 8));
        assert_eq!(bessel_i(2, &iv(-1), P).unwrap_err(), AsymptoticError::NegativeArgument);
    }

    #[test]
    fn bessel_recurrence() {
        // I₁(z) − I₃(z) = (4/z) I₂(z)
        for z in [1, 2, 5, 13, 30, 50] {
            let zi = iv(z);
            let lhs = &bessel_i(1, &zi, P).unwrap() - &bessel_i(3, &zi, P).unwrap();
            let rhs = &(&iv(4) / &zi) * &bessel_i(2, &zi, P).unwrap();
            assert!(lhs.cmp_interval(&rhs).is_none(), "z = {z}");
            let diff = (&lhs - &rhs).abs();
            assert!(diff.hi().clone() < rhs.hi().clone() >> 200u32);
        }
    }

    #[test]
    fn general_sum_matches_nu_two() {
        let expected: Vec<Rational> = S2.iter().map(|&(n, d)| Rational::from((n, d))).collect();
        assert_eq!(asymptotic_sum(2), expected);
    }

    #[test]
    fn main_term_values() {
        let s = main_term_s2(&iv(1484)).unwrap();
        let reference = crate::interval::parse_decimal("0.99873689549259187645855659").unwrap();
        let eps = Rational::from((1, 10i64.pow(18)));
        assert_eq!(s.cmp_rational(&(reference.clone() - &eps)), Some(Ordering::Greater));
        assert_eq!(s.cmp_rational(&(reference + &eps)), Some(Ordering::Less));
        let w = main_term_s2(&iv(2000)).unwrap().width();
        assert!(w <= Float::with_val(P, 1) >> (P - 6));
        let far = main_term_s2(&iv(1_000_000_000)).unwrap();
        assert!((far.to_f64() - 1.0).abs() < 1e-8);
        assert!(main_term_s2(&iv(0)).is_err());
    }

    #[test]
    fn threshold_value() {
        assert_eq!(remainder_threshold(2), Rational::from((11390625, 7680)));
        assert!(remainder_threshold(2) < 1484 && remainder_threshold(2) > 1483);
        assert!(check_bessel_remainder(&iv(1483), None).is_err());
    }

    #[test]
    fn remainder_at_validity_edge() {
        let r = check_bessel_remainder(&iv(1484), Some(P)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let c = r.scaled_error.to_f64();
        assert!((c - 1.12973).abs() < 1e-4, "{c}");
    }

    #[test]
    fn nu_two_product_term() {
        let z = iv(1484);
        let b = general_remainder_bound(2, &z, P).unwrap();
        // as displayed without the 2^(3/2) divisor: 4729725/65536 z^(−6)
        let sqrt8 = iv(8).sqrt();
        let undivided = &(&b.product_term * &sqrt8) * &z.pow_u(6);
        assert!(undivided.contains_rational(&Rational::from((4729725, 65536))));
        let bound73 = &iv(73) / &z.pow_u(6);
        assert_eq!(b.total.cmp_interval(&bound73), Some(Ordering::Less));
        // the two exponentially small terms against their ν = 2 closed forms
        let e = (-&z).exp();
        let pi = IntervalReal::pi(P);
        let t1 = &(&e * &z.pow_u(3).sqrt()).mul_rational(&Rational::from((65793, 8704))) / &pi.sqrt();
        assert!(t1.contains(&b.binomial_term) || b.binomial_term.contains(&t1) || (&t1 - &b.binomial_term).abs().hi() < &(t1.hi().clone() >> 200u32));
        let t2 = &(&e * &z.pow_u(5).sqrt()).mul_rational(&Rational::from((2, 3))) / &(&pi * &iv(2)).sqrt();
        assert!((&t2 - &b.power_term).abs().hi() < &(t2.hi().clone() >> 200u32));
    }

    #[test]
    fn general_bound_other_orders() {
        let z3 = IntervalReal::from_rational(&remainder_threshold(3), P);
        let b = general_remainder_bound(3, &z3, P).unwrap();
        assert_eq!(b.total.sign(), Some(Ordering::Greater));
        assert!(b.total.is_finite());
        assert_eq!(general_remainder_bound(1, &z3, P).unwrap_err(), AsymptoticError::SmallOrder);
        assert!(general_remainder_bound(3, &iv(1484), P).is_err());
        let z9 = IntervalReal::from_rational(&remainder_threshold(9), P);
        assert!(general_remainder_bound(9, &z9, P).unwrap().total.is_finite());
    }

    #[test]
    fn envelope_limits() {
        let far = envelopes_phi(1, &iv(1_000_000_000), P).unwrap();
        assert!((far.phi.to_f64() - 1.0).abs() < 1e-8);
        assert!((far.big_phi.to_f64() - 1.0).abs() < 1e-8);
        let e = envelopes_phi(1, &iv(971), P).unwrap();
        assert_eq!(e.phi.cmp_interval(&e.big_phi), Some(Ordering::Greater));
        let e2 = envelopes_phi(2, &iv(1000), P).unwrap();
        assert!(e2.phi.width() <= Float::with_val(P, 1) >> (P - 8));
        assert!(envelopes_phi(1, &iv(0), P).is_err());
    }

    #[test]
    fn envelope_orientation_at_971() {
        let t = iv(971);
        for k in [1, 2] {
            let e = envelopes_phi(k, &t, P).unwrap();
            let swapped = e.holds(k, &t, EnvelopeOrientation::Swapped, P).unwrap();
            assert_eq!(swapped, (Some(true), Some(true)));
            let printed = e.holds(k, &t, EnvelopeOrientation::AsPrinted, P).unwrap();
            assert_eq!(printed, (Some(false), Some(false)));
        }
    }
}
