//! Outward-rounded interval arithmetic on MPFR floats.
//!
//! Every operation rounds the lower endpoint toward −∞ and the upper endpoint
//! toward +∞, so a returned interval always contains the exact result of the
//! operation applied to any points of the inputs.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use rug::float::{Constant, Round, Special};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

pub const DEFAULT_PREC: u32 = 384;

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalReal {
    lo: Float,
    hi: Float,
}

macro_rules! rounded {
    ($prec:expr, $e:expr, $r:expr) => {
        Float::with_val_round($prec, $e, $r).0
    };
}

impl IntervalReal {
    /// Interval from explicit endpoints. Panics if `lo > hi` or either is NaN.
    pub fn new(lo: Float, hi: Float) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "NaN endpoint");
        assert!(lo <= hi, "inverted interval");
        IntervalReal { lo, hi }
    }

    pub fn entire(prec: u32) -> Self {
        IntervalReal {
            lo: Float::with_val(prec, Special::NegInfinity),
            hi: Float::with_val(prec, Special::Infinity),
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        IntervalReal {
            lo: rounded!(prec, q, Round::Down),
            hi: rounded!(prec, q, Round::Up),
        }
    }

    pub fn from_integer(i: &Integer, prec: u32) -> Self {
        IntervalReal {
            lo: rounded!(prec, i, Round::Down),
            hi: rounded!(prec, i, Round::Up),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        IntervalReal { lo: rounded!(prec, v, Round::Down), hi: rounded!(prec, v, Round::Up) }
    }

    /// Enclosure of the ratio num/den of two integers.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        Self::from_rational(&Rational::from((num, den)), prec)
    }

    /// Smallest interval containing the decimal literal `s` (e.g. "1483.2").
    pub fn from_decimal(s: &str, prec: u32) -> Option<Self> {
        let q = parse_decimal(s)?;
        Some(Self::from_rational(&q, prec))
    }

    /// Enclosure of π at `prec` bits, computed once per precision.
    pub fn pi(prec: u32) -> Self {
        static CACHE: OnceLock<RwLock<HashMap<u32, IntervalReal>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(v) = cache.read().unwrap().get(&prec) {
            return v.clone();
        }
        let v = IntervalReal {
            lo: rounded!(prec, Constant::Pi, Round::Down),
            hi: rounded!(prec, Constant::Pi, Round::Up),
        };
        cache.write().unwrap().entry(prec).or_insert(v).clone()
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn width(&self) -> Float {
        rounded!(self.prec(), &self.hi - &self.lo, Round::Up)
    }

    pub fn mid(&self) -> Float {
        let p = self.prec() + 1;
        let s = Float::with_val(p, &self.hi + &self.lo);
        s / 2u32
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.cmp0() != Some(Ordering::Greater) && self.hi.cmp0() != Some(Ordering::Less)
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo <= *q && self.hi >= *q
    }

    pub fn contains(&self, other: &IntervalReal) -> bool {
        self.lo <= other.lo && self.hi >= other.hi
    }

    /// Smallest interval holding both.
    pub fn hull(&self, other: &IntervalReal) -> IntervalReal {
        let lo = if self.lo <= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi >= other.hi { &self.hi } else { &other.hi };
        IntervalReal { lo: lo.clone(), hi: hi.clone() }
    }

    /// Decided sign: `Some(Greater)` if lo > 0, `Some(Less)` if hi < 0,
    /// `Some(Equal)` for the degenerate [0, 0], otherwise undecided.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.cmp0() == Some(Ordering::Greater) {
            Some(Ordering::Greater)
        } else if self.hi.cmp0() == Some(Ordering::Less) {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Decided comparison of every point of `self` against every point of `other`.
    pub fn cmp_interval(&self, other: &IntervalReal) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn cmp_rational(&self, q: &Rational) -> Option<Ordering> {
        if self.hi < *q {
            Some(Ordering::Less)
        } else if self.lo > *q {
            Some(Ordering::Greater)
        } else if self.lo == *q && self.hi == *q {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Same interval rounded outward to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> IntervalReal {
        IntervalReal {
            lo: rounded!(prec, &self.lo, Round::Down),
            hi: rounded!(prec, &self.hi, Round::Up),
        }
    }

    pub fn abs(&self) -> IntervalReal {
        if self.lo.cmp0() != Some(Ordering::Less) {
            self.clone()
        } else if self.hi.cmp0() != Some(Ordering::Greater) {
            -self
        } else {
            let neg_lo = Float::with_val(self.lo.prec(), -&self.lo);
            let hi = if neg_lo > self.hi { neg_lo } else { self.hi.clone() };
            IntervalReal { lo: Float::with_val(self.prec(), 0), hi }
        }
    }

    pub fn sqr(&self) -> IntervalReal {
        self.pow_u(2)
    }

    pub fn pow_u(&self, e: u32) -> IntervalReal {
        let p = self.prec();
        if e == 0 {
            return IntervalReal::from_i64(1, p);
        }
        let lo_pow = |x: &Float, r| rounded!(p, x.pow(e), r);
        if e % 2 == 1 || self.lo.cmp0() != Some(Ordering::Less) {
            return IntervalReal { lo: lo_pow(&self.lo, Round::Down), hi: lo_pow(&self.hi, Round::Up) };
        }
        if self.hi.cmp0() != Some(Ordering::Greater) {
            return IntervalReal { lo: lo_pow(&self.hi, Round::Down), hi: lo_pow(&self.lo, Round::Up) };
        }
        let a = self.abs();
        IntervalReal { lo: Float::with_val(p, 0), hi: lo_pow(&a.hi, Round::Up) }
    }

    pub fn recip(&self) -> IntervalReal {
        let one = IntervalReal::from_i64(1, self.prec());
        &one / self
    }

    /// Square root. The part of the interval below zero is discarded, so the
    /// caller must ensure the argument is nonnegative.
    pub fn sqrt(&self) -> IntervalReal {
        let p = self.prec();
        assert!(self.hi.cmp0() != Some(Ordering::Less), "sqrt of negative interval");
        let lo = if self.lo.cmp0() == Some(Ordering::Less) {
            Float::with_val(p, 0)
        } else {
            rounded!(p, self.lo.sqrt_ref(), Round::Down)
        };
        IntervalReal { lo, hi: rounded!(p, self.hi.sqrt_ref(), Round::Up) }
    }

    pub fn exp(&self) -> IntervalReal {
        let p = self.prec();
        IntervalReal {
            lo: rounded!(p, self.lo.exp_ref(), Round::Down),
            hi: rounded!(p, self.hi.exp_ref(), Round::Up),
        }
    }

    pub fn ln(&self) -> IntervalReal {
        let p = self.prec();
        assert!(self.lo.cmp0() == Some(Ordering::Greater), "ln of nonpositive interval");
        IntervalReal {
            lo: rounded!(p, self.lo.ln_ref(), Round::Down),
            hi: rounded!(p, self.hi.ln_ref(), Round::Up),
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> IntervalReal {
        self * &IntervalReal::from_rational(q, self.prec())
    }

    pub fn add_rational(&self, q: &Rational) -> IntervalReal {
        self + &IntervalReal::from_rational(q, self.prec())
    }

    /// Lower endpoint as a decimal string with `digits` significant digits,
    /// rounded down.
    pub fn lo_decimal(&self, digits: usize) -> String {
        self.lo.to_string_radix_round(10, Some(digits), Round::Down)
    }

    /// Upper endpoint as a decimal string with `digits` significant digits,
    /// rounded up.
    pub fn hi_decimal(&self, digits: usize) -> String {
        self.hi.to_string_radix_round(10, Some(digits), Round::Up)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }
}

/// Parses a decimal literal ("12", "-0.125", "1483.2", "3.5e-2") exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (s, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: Integer = if digits.is_empty() { Integer::new() } else { digits.parse().ok()? };
    let den = Integer::from(10).pow(frac_part.len() as u32);
    let mut q = Rational::from((num, den));
    let scale = Rational::from(Integer::from(10).pow(exp.unsigned_abs()));
    if exp >= 0 {
        q *= scale;
    } else {
        q /= scale;
    }
    Some(if neg { -q } else { q })
}

impl fmt::Display for IntervalReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        write!(f, "[{}, {}]", self.lo_decimal(d), self.hi_decimal(d))
    }
}

impl Neg for &IntervalReal {
    type Output = IntervalReal;
    fn neg(self) -> IntervalReal {
        IntervalReal {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }
}

impl Neg for IntervalReal {
    type Output = IntervalReal;
    fn neg(self) -> IntervalReal {
        -&self
    }
}

impl Add for &IntervalReal {
    type Output = IntervalReal;
    fn add(self, rhs: &IntervalReal) -> IntervalReal {
        let p = self.prec().max(rhs.prec());
        IntervalReal {
            lo: rounded!(p, &self.lo + &rhs.lo, Round::Down),
            hi: rounded!(p, &self.hi + &rhs.hi, Round::Up),
        }
    }
}

impl Sub for &IntervalReal {
    type Output = IntervalReal;
    fn sub(self, rhs: &IntervalReal) -> IntervalReal {
        let p = self.prec().max(rhs.prec());
        IntervalReal {
            lo: rounded!(p, &self.lo - &rhs.hi, Round::Down),
            hi: rounded!(p, &self.hi - &rhs.lo, Round::Up),
        }
    }
}

fn min_max(p: u32, pairs: [(&Float, &Float); 4], op: impl Fn(&Float, &Float, Round) -> Float) -> IntervalReal {
    let mut lo: Option<Float> = None;
    let mut hi: Option<Float> = None;
    for (a, b) in pairs {
        let l = op(a, b, Round::Down);
        let h = op(a, b, Round::Up);
        // 0·∞ is NaN; such products only arise from the entire line
        if l.is_nan() || h.is_nan() {
            return IntervalReal::entire(p);
        }
        if lo.as_ref().map_or(true, |x| l < *x) {
            lo = Some(l);
        }
        if hi.as_ref().map_or(true, |x| h > *x) {
            hi = Some(h);
        }
    }
    IntervalReal { lo: lo.unwrap(), hi: hi.unwrap() }
}

impl Mul for &IntervalReal {
    type Output = IntervalReal;
    fn mul(self, rhs: &IntervalReal) -> IntervalReal {
        let p = self.prec().max(rhs.prec());
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        min_max(p, pairs, |a, b, r| rounded!(p, a * b, r))
    }
}

impl Div for &IntervalReal {
    type Output = IntervalReal;
    fn div(self, rhs: &IntervalReal) -> IntervalReal {
        let p = self.prec().max(rhs.prec());
        if rhs.contains_zero() {
            return IntervalReal::entire(p);
        }
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        min_max(p, pairs, |a, b, r| rounded!(p, a / b, r))
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<IntervalReal> for IntervalReal {
            type Output = IntervalReal;
            fn $m(self, rhs: IntervalReal) -> IntervalReal { (&self).$m(&rhs) }
        }
        impl $tr<&IntervalReal> for IntervalReal {
            type Output = IntervalReal;
            fn $m(self, rhs: &IntervalReal) -> IntervalReal { (&self).$m(rhs) }
        }
        impl $tr<IntervalReal> for &IntervalReal {
            type Output = IntervalReal;
            fn $m(self, rhs: IntervalReal) -> IntervalReal { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 128;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn third_is_enclosed() {
        let x = IntervalReal::from_rational(&q(1, 3), P);
        assert!(x.contains_rational(&q(1, 3)));
        assert!(x.lo() < x.hi());
        let three = IntervalReal::from_i64(3, P);
        assert!((&x * &three).contains_rational(&q(1, 1)));
    }

    #[test]
    fn pi_and_exp() {
        let pi = IntervalReal::pi(200);
        assert!(pi.cmp_rational(&q(314159, 100000)) == Some(Ordering::Greater));
        assert!(pi.cmp_rational(&q(314160, 100000)) == Some(Ordering::Less));
        let e = IntervalReal::from_i64(1, P).exp();
        assert!(e.cmp_rational(&q(271828, 100000)) == Some(Ordering::Greater));
        assert!(e.cmp_rational(&q(271829, 100000)) == Some(Ordering::Less));
    }

    #[test]
    fn division_by_zero_straddle_is_entire() {
        let a = IntervalReal::from_i64(1, P);
        let b = IntervalReal::new(Float::with_val(P, -1), Float::with_val(P, 1));
        assert!(!(&a / &b).is_finite());
    }

    #[test]
    fn even_power_of_straddling_interval() {
        let a = IntervalReal::new(Float::with_val(P, -3), Float::with_val(P, 2));
        let s = a.sqr();
        assert_eq!(s.lo().to_f64(), 0.0);
        assert_eq!(s.hi().to_f64(), 9.0);
        let c = a.pow_u(3);
        assert_eq!(c.lo().to_f64(), -27.0);
        assert_eq!(c.hi().to_f64(), 8.0);
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("1483.2"), Some(q(7416, 5)));
        assert_eq!(parse_decimal("-0.125"), Some(q(-1, 8)));
        assert_eq!(parse_decimal("12"), Some(q(12, 1)));
        assert_eq!(parse_decimal("1e3"), Some(q(1000, 1)));
        assert_eq!(parse_decimal("3.5e-2"), Some(q(7, 200)));
        assert_eq!(parse_decimal("1e"), None);
        assert_eq!(parse_decimal("."), None);
    }

    #[test]
    fn exp_bracket_on_negative_unit_interval() {
        // 1 + s < e^s < 1 + s + s² for s in [-1, 0)
        for i in 1..=64 {
            let s = IntervalReal::from_rational(&q(-i, 64), 256);
            let e = s.exp();
            let one = IntervalReal::from_i64(1, 256);
            let lower = &one + &s;
            let upper = &lower + &s.sqr();
            assert_eq!(lower.cmp_interval(&e), Some(Ordering::Less), "s = -{i}/64");
            assert_eq!(e.cmp_interval(&upper), Some(Ordering::Less), "s = -{i}/64");
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..1000).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn arithmetic_encloses_exact_result(a in small_rational(), b in small_rational()) {
            let ia = IntervalReal::from_rational(&a, 64);
            let ib = IntervalReal::from_rational(&b, 64);
            prop_assert!((&ia + &ib).contains_rational(&(a.clone() + &b)));
            prop_assert!((&ia - &ib).contains_rational(&(a.clone() - &b)));
            prop_assert!((&ia * &ib).contains_rational(&(a.clone() * &b)));
            if b != 0 {
                prop_assert!((&ia / &ib).contains_rational(&(a.clone() / &b)));
            }
            prop_assert!(ia.pow_u(3).contains_rational(&(a.clone() * &a * &a)));
        }

        #[test]
        fn sqrt_squares_back(a in 1i64..1_000_000) {
            let r = IntervalReal::from_i64(a, 96).sqrt();
            prop_assert!(r.sqr().contains_rational(&q(a, 1)));
        }

        #[test]
        fn narrower_input_gives_narrower_output(a in small_rational(), w in 1i64..100) {
            let wide = IntervalReal::new(
                Float::with_val(80, &a) - Float::with_val(80, w),
                Float::with_val(80, &a) + Float::with_val(80, w),
            );
            let narrow = IntervalReal::from_rational(&a, 80);
            let f = |x: &IntervalReal| &(x * x) - &x.exp().recip();
            prop_assert!(f(&wide).contains(&f(&narrow)));
        }
    }
}
