//! Exact polynomials, Sturm root counting and positivity certificates on rays.
//!
//! [`PolyQ`] has rational coefficients. [`PiPoly`] has coefficients that are
//! polynomials in π with rational coefficients; it is handled through a
//! rational enclosure of π.

mod certificate;
mod lemma;
mod sturm;

pub use certificate::{
    certify_positive_on_ray, domination_threshold, CoeffEnclosure, DominationResult, PositivityCertificate,
    PositivityOutcome, Refutation, SturmWitness,
};
pub use lemma::{lemma_uv_check, root_ordering_check, tau_enclosure, tau_positivity_check, tau_quadratic, LemmaError};
pub use sturm::{sign_at_rational, squarefree_part, Bound, SturmChain};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::IntervalReal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("zero polynomial")]
    Zero,
    #[error("π enclosure too wide: the two substitutions disagree")]
    Inconclusive,
    #[error("leading block is not eventually dominant")]
    NoThreshold,
    #[error("malformed polynomial: {0}")]
    Malformed(String),
}

pub(crate) fn rpow(x: &Rational, e: u32) -> Rational {
    x.clone().pow(e)
}

/// Dense polynomial with rational coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolyQ {
    coeffs: Vec<Rational>,
}

impl PolyQ {
    pub fn new(mut coeffs: Vec<Rational>) -> PolyQ {
        while coeffs.last().map_or(false, |c| *c == 0) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn from_ints(v: &[i64]) -> PolyQ {
        PolyQ::new(v.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn constant(c: Rational) -> PolyQ {
        PolyQ::new(vec![c])
    }

    /// c·X^d
    pub fn monomial(c: Rational, d: usize) -> PolyQ {
        let mut v = vec![Rational::new(); d + 1];
        v[d] = c;
        PolyQ::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_interval(&self, x: &IntervalReal) -> IntervalReal {
        let p = x.prec();
        let mut acc = IntervalReal::from_i64(0, p);
        for c in self.coeffs.iter().rev() {
            acc = (&acc * x).add_rational(c);
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).cmp0()
    }

    /// Positive integer multiple with coprime coefficients.
    pub fn to_integer_poly(&self) -> Vec<Integer> {
        let mut l = Integer::from(1);
        for c in &self.coeffs {
            l.lcm_mut(c.denom());
        }
        self.coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
            .collect()
    }

    pub fn sturm(&self) -> Result<SturmChain, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        Ok(SturmChain::new(&self.to_integer_poly()))
    }

    /// Number of distinct real roots in (a, b].
    pub fn sturm_count(&self, a: &Bound, b: &Bound) -> Result<usize, PolyError> {
        Ok(self.sturm()?.count(a, b))
    }

    pub fn scale(&self, c: &Rational) -> PolyQ {
        PolyQ::new(self.coeffs.iter().map(|x| Rational::from(x * c)).collect())
    }

    /// p(X + shift)
    pub fn shifted(&self, shift: &Rational) -> PolyQ {
        let mut out = PolyQ::default();
        let x_plus = PolyQ::new(vec![shift.clone(), Rational::from(1)]);
        for c in self.coeffs.iter().rev() {
            out = &(&out * &x_plus) + &PolyQ::constant(c.clone());
        }
        out
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = vec![Rational::new(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            v[i] += c;
        }
        PolyQ::new(v)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        self + &(-rhs)
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        if self.is_zero() || rhs.is_zero() {
            return PolyQ::default();
        }
        let mut v = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += Rational::from(a * b);
            }
        }
        PolyQ::new(v)
    }
}

/// Rational enclosure [lo, hi] of π.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiEnclosure {
    #[serde(with = "rational_serde")]
    pub lo: Rational,
    #[serde(with = "rational_serde")]
    pub hi: Rational,
}

impl PiEnclosure {
    /// Enclosure from the MPFR value of π at `prec` bits.
    pub fn at_precision(prec: u32) -> PiEnclosure {
        let pi = IntervalReal::pi(prec);
        PiEnclosure {
            lo: pi.lo().to_rational().expect("finite"),
            hi: pi.hi().to_rational().expect("finite"),
        }
    }

    /// True if the enclosure really contains π (checked against a much
    /// tighter MPFR enclosure).
    pub fn is_valid(&self) -> bool {
        let bits = 64 + 4 * (self.hi.denom().significant_bits().max(self.lo.denom().significant_bits()));
        let pi = IntervalReal::pi(bits);
        self.lo <= self.hi && *pi.lo() >= self.lo && *pi.hi() <= self.hi
    }
}

/// A polynomial in π with rational coefficients: power → coefficient.
pub type PiCoeff = BTreeMap<u32, Rational>;

/// Polynomial in X whose coefficients are polynomials in π.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PiPoly {
    coeffs: Vec<PiCoeff>,
}

/// One serialized term c·π^k·X^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub pi_power: u32,
    pub numerator: String,
    pub denominator: String,
    pub degree: usize,
}

impl PiPoly {
    /// Builds from (rational coefficient, π-power, X-degree) terms; like
    /// terms are summed.
    pub fn from_terms(terms: &[(Rational, u32, usize)]) -> PiPoly {
        let mut p = PiPoly::default();
        for (c, k, d) in terms {
            p.add_term(c.clone(), *k, *d);
        }
        p.normalize();
        p
    }

    pub fn from_poly(q: &PolyQ) -> PiPoly {
        let terms: Vec<_> = q.coeffs().iter().enumerate().map(|(d, c)| (c.clone(), 0, d)).collect();
        PiPoly::from_terms(&terms)
    }

    fn add_term(&mut self, c: Rational, k: u32, d: usize) {
        if self.coeffs.len() <= d {
            self.coeffs.resize(d + 1, PiCoeff::new());
        }
        *self.coeffs[d].entry(k).or_default() += c;
    }

    fn normalize(&mut self) {
        for c in &mut self.coeffs {
            c.retain(|_, v| *v != 0);
        }
        while self.coeffs.last().map_or(false, |c| c.is_empty()) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn terms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        for (d, c) in self.coeffs.iter().enumerate() {
            for (k, v) in c {
                out.push(Term {
                    pi_power: *k,
                    numerator: v.numer().to_string(),
                    denominator: v.denom().to_string(),
                    degree: d,
                });
            }
        }
        out
    }

    pub fn from_serialized(terms: &[Term]) -> Result<PiPoly, PolyError> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let n: Integer = t.numerator.parse().map_err(|_| PolyError::Malformed(t.numerator.clone()))?;
            let d: Integer = t.denominator.parse().map_err(|_| PolyError::Malformed(t.denominator.clone()))?;
            if d == 0 {
                return Err(PolyError::Malformed("zero denominator".into()));
            }
            out.push((Rational::from((n, d)), t.pi_power, t.degree));
        }
        Ok(PiPoly::from_terms(&out))
    }

    /// Substitutes an exact rational for π.
    pub fn substitute(&self, pi: &Rational) -> PolyQ {
        PolyQ::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let mut s = Rational::new();
                    for (k, v) in c {
                        s += Rational::from(v * rpow(pi, *k));
                    }
                    s
                })
                .collect(),
        )
    }

    /// Polynomials (lower, upper) with lower(t) ≤ p(t) ≤ upper(t) for all
    /// t ≥ 0 and every π in the enclosure: each coefficient term is bounded
    /// separately, using the endpoint that makes it smallest (largest).
    pub fn bracket(&self, pi: &PiEnclosure) -> (PolyQ, PolyQ) {
        let mut lo = Vec::with_capacity(self.coeffs.len());
        let mut hi = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let mut l = Rational::new();
            let mut h = Rational::new();
            for (k, v) in c {
                let small = rpow(&pi.lo, *k);
                let big = rpow(&pi.hi, *k);
                if *v > 0 {
                    l += Rational::from(v * &small);
                    h += Rational::from(v * &big);
                } else {
                    l += Rational::from(v * &big);
                    h += Rational::from(v * &small);
                }
            }
            lo.push(l);
            hi.push(h);
        }
        (PolyQ::new(lo), PolyQ::new(hi))
    }

    /// Distinct real roots in (a, b], computed for both endpoint substitutions
    /// of π; disagreement is reported as inconclusive.
    pub fn sturm_count(&self, pi: &PiEnclosure, a: &Bound, b: &Bound) -> Result<usize, PolyError> {
        let c_lo = self.substitute(&pi.lo).sturm_count(a, b)?;
        let c_hi = self.substitute(&pi.hi).sturm_count(a, b)?;
        if c_lo == c_hi {
            Ok(c_lo)
        } else {
            Err(PolyError::Inconclusive)
        }
    }

    pub fn eval_interval(&self, x: &IntervalReal) -> IntervalReal {
        let p = x.prec();
        let pi = IntervalReal::pi(p);
        let mut acc = IntervalReal::from_i64(0, p);
        for c in self.coeffs.iter().rev() {
            let mut coeff = IntervalReal::from_i64(0, p);
            for (k, v) in c {
                coeff = &coeff + &pi.pow_u(*k).mul_rational(v);
            }
            acc = &(&acc * x) + &coeff;
        }
        acc
    }
}

impl Sub for &PiPoly {
    type Output = PiPoly;
    fn sub(self, rhs: &PiPoly) -> PiPoly {
        let mut out = self.clone();
        for (d, c) in rhs.coeffs.iter().enumerate() {
            for (k, v) in c {
                out.add_term(Rational::from(-v), *k, d);
            }
        }
        out.normalize();
        out
    }
}

fn pi_terms(v: &[(i64, u32, usize)]) -> PiPoly {
    let t: Vec<_> = v.iter().map(|&(c, k, d)| (Rational::from(c), k, d)).collect();
    PiPoly::from_terms(&t)
}

/// The degree-24 polynomial φ(t) controlling g_k(n) − (1 − 5/x⁶).
pub fn phi_poly() -> PiPoly {
    pi_terms(&[
        (729, 0, 24),
        (-4860, 4, 20),
        (7290, 0, 18),
        (1296, 8, 16),
        (-8748, 4, 14),
        (-192, 12, 12),
        (3645, 0, 12),
        (3888, 8, 10),
        (-4860, 4, 8),
        (-576, 12, 6),
        (2160, 8, 4),
        (-320, 12, 0),
    ])
}

/// The degree-24 polynomial ψ(t) controlling (1 + 5/x⁶) − G_k(n).
pub fn psi_poly() -> PiPoly {
    pi_terms(&[
        (729, 0, 24),
        (-4860, 4, 20),
        (-7290, 0, 18),
        (1296, 8, 16),
        (8748, 4, 14),
        (-192, 12, 12),
        (3645, 0, 12),
        (-3888, 8, 10),
        (-4860, 4, 8),
        (576, 12, 6),
        (2160, 8, 4),
        (-320, 12, 0),
    ])
}

pub(crate) mod rational_serde {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Rational>().map_err(serde::de::Error::custom)
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn sturm_count_examples() {
        let p = PolyQ::from_ints(&[-1, 0, 1]);
        assert_eq!(p.sturm_count(&Bound::At(r(-2, 1)), &Bound::At(r(2, 1))).unwrap(), 2);
        assert_eq!(PolyQ::default().sturm_count(&Bound::NegInf, &Bound::PosInf), Err(PolyError::Zero));
        let pi = PiEnclosure::at_precision(256);
        let psi = psi_poly();
        assert_eq!(psi.sturm_count(&pi, &Bound::At(r(6, 1)), &Bound::PosInf).unwrap(), 0);
        // three positive roots below 6, mirrored on the negative axis
        assert_eq!(psi.sturm_count(&pi, &Bound::NegInf, &Bound::PosInf).unwrap(), 6);
    }

    #[test]
    fn wide_pi_enclosure_is_inconclusive() {
        let pi = PiEnclosure { lo: r(3, 1), hi: r(4, 1) };
        assert_eq!(
            psi_poly().sturm_count(&pi, &Bound::At(r(5, 1)), &Bound::PosInf),
            Err(PolyError::Inconclusive)
        );
    }

    #[test]
    fn pi_enclosure_validity() {
        assert!(PiEnclosure::at_precision(128).is_valid());
        assert!(!PiEnclosure { lo: r(314, 100), hi: r(3141, 1000) }.is_valid());
    }

    #[test]
    fn bracket_orders_values() {
        let pi = PiEnclosure::at_precision(64);
        let (lo, hi) = phi_poly().bracket(&pi);
        for t in [r(1, 2), r(3, 1), r(7, 1), r(100, 1)] {
            assert!(lo.eval(&t) <= hi.eval(&t));
            let exact = phi_poly().eval_interval(&IntervalReal::from_rational(&t, 256));
            assert!(*exact.lo() >= lo.eval(&t));
            assert!(*exact.hi() <= hi.eval(&t));
        }
    }

    #[test]
    fn serialization_round_trip() {
        let p = phi_poly();
        let terms = p.terms();
        assert_eq!(terms.len(), 12);
        assert_eq!(PiPoly::from_serialized(&terms).unwrap(), p);
        let json = serde_json::to_string(&terms[0]).unwrap();
        assert_eq!(json, r#"{"pi_power":12,"numerator":"-320","denominator":"1","degree":0}"#);
    }

    #[test]
    fn arithmetic() {
        let a = PolyQ::from_ints(&[1, 1]);
        let b = PolyQ::from_ints(&[-1, 1]);
        assert_eq!(&a * &b, PolyQ::from_ints(&[-1, 0, 1]));
        assert_eq!(&a - &a, PolyQ::default());
        assert_eq!(b.shifted(&r(1, 1)), PolyQ::from_ints(&[0, 1]));
        assert_eq!(PolyQ::new(vec![r(1, 2), r(2, 3)]).to_integer_poly(), vec![Integer::from(3), Integer::from(4)]);
    }
}
