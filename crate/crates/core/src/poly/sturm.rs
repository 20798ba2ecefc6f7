//! Sturm chains over integer polynomials.
//!
//! Each remainder step uses a pseudo-remainder and divides out the content,
//! so coefficients stay integral and small. The sign of the pseudo-remainder
//! multiplier is tracked so the chain still consists of negated remainders.

use std::cmp::Ordering;

use rug::{Integer, Rational};

/// Dense integer polynomial, ascending degree, no trailing zeros.
pub type ZPoly = Vec<Integer>;

pub(crate) fn trim(p: &mut ZPoly) {
    while p.last().map_or(false, |c| *c == 0) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[Integer]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

fn derivative(p: &[Integer]) -> ZPoly {
    let mut d: ZPoly = p.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u32)).collect();
    trim(&mut d);
    d
}

fn content(p: &[Integer]) -> Integer {
    let mut g = Integer::new();
    for c in p {
        g.gcd_mut(c);
        if g == 1 {
            break;
        }
    }
    g
}

/// Divides out the positive content; the sign of the polynomial is kept.
fn primitive(mut p: ZPoly) -> ZPoly {
    let g = content(&p);
    if g > 1 {
        for c in p.iter_mut() {
            c.div_exact_mut(&g);
        }
    }
    p
}

/// Pseudo-division: lc(b)^(deg a - deg b + 1) · a = q·b + r. Returns (q, r, exponent).
fn pseudo_divmod(a: &[Integer], b: &[Integer]) -> (ZPoly, ZPoly, u32) {
    let db = degree(b).expect("division by zero polynomial");
    let lc = b[db].clone();
    let mut r: ZPoly = a.to_vec();
    let Some(da) = degree(a) else {
        return (Vec::new(), Vec::new(), 0);
    };
    if da < db {
        return (Vec::new(), r, 0);
    }
    let steps = (da - db + 1) as u32;
    let mut q = vec![Integer::new(); da - db + 1];
    for i in (0..=da - db).rev() {
        let top = r.get(i + db).cloned().unwrap_or_default();
        for c in q.iter_mut() {
            *c *= &lc;
        }
        for c in r.iter_mut() {
            *c *= &lc;
        }
        if top != 0 {
            q[i] += &top;
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= Integer::from(&top * bj);
            }
        }
    }
    trim(&mut r);
    trim(&mut q);
    (q, r, steps)
}

fn gcd(a: &[Integer], b: &[Integer]) -> ZPoly {
    let mut x = primitive(a.to_vec());
    let mut y = primitive(b.to_vec());
    while !y.is_empty() {
        let (_, r, _) = pseudo_divmod(&x, &y);
        x = y;
        y = primitive(r);
    }
    x
}

/// p / gcd(p, p'): same distinct roots, all simple.
pub fn squarefree_part(p: &[Integer]) -> ZPoly {
    let mut p = p.to_vec();
    trim(&mut p);
    if degree(&p).map_or(true, |d| d == 0) {
        return p;
    }
    let g = gcd(&p, &derivative(&p));
    if degree(&g) == Some(0) {
        return primitive(p);
    }
    let (q, r, _) = pseudo_divmod(&p, &g);
    debug_assert!(r.is_empty());
    let mut q = primitive(q);
    if q.last().map_or(false, |c| *c < 0) {
        for c in q.iter_mut() {
            *c = -std::mem::take(c);
        }
    }
    q
}

/// Evaluation point for sign variation counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    At(Rational),
    PosInf,
}

fn sign_at(p: &[Integer], x: &Bound) -> Ordering {
    let Some(d) = degree(p) else {
        return Ordering::Equal;
    };
    let lc = p[d].cmp0();
    match x {
        Bound::PosInf => lc,
        Bound::NegInf => {
            if d % 2 == 0 {
                lc
            } else {
                lc.reverse()
            }
        }
        Bound::At(q) => {
            // sign of den^d · p(num/den), den > 0
            let num = q.numer();
            let den = q.denom();
            if *den == 1 {
                let mut acc = Integer::new();
                for c in p.iter().rev() {
                    acc *= num;
                    acc += c;
                }
                return acc.cmp0();
            }
            let mut acc = Integer::new();
            let mut den_pow = Integer::from(1);
            let mut terms: Vec<Integer> = Vec::with_capacity(p.len());
            for _ in 0..p.len() {
                terms.push(den_pow.clone());
                den_pow *= den;
            }
            for (i, c) in p.iter().enumerate().rev() {
                acc *= num;
                acc += Integer::from(c * &terms[d - i]);
            }
            acc.cmp0()
        }
    }
}

/// Sturm chain of the squarefree part of a polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<ZPoly>,
}

impl SturmChain {
    pub fn new(p: &[Integer]) -> SturmChain {
        let p0 = squarefree_part(p);
        if degree(&p0).map_or(true, |d| d == 0) {
            return SturmChain { chain: vec![p0] };
        }
        let p1 = primitive(derivative(&p0));
        let mut chain = vec![p0, p1];
        loop {
            let n = chain.len();
            let (_, r, steps) = pseudo_divmod(&chain[n - 2], &chain[n - 1]);
            if r.is_empty() {
                break;
            }
            let lc_negative = chain[n - 1].last().unwrap().cmp0() == Ordering::Less;
            // multiplier lc^steps is negative exactly when lc < 0 and steps odd
            let flip = !(lc_negative && steps % 2 == 1);
            let mut next = primitive(r);
            if flip {
                for c in next.iter_mut() {
                    *c = -std::mem::take(c);
                }
            }
            chain.push(next);
        }
        SturmChain { chain }
    }

    /// Degree of the squarefree part.
    pub fn degree(&self) -> usize {
        degree(&self.chain[0]).unwrap_or(0)
    }

    pub fn variations(&self, x: &Bound) -> usize {
        let mut last = Ordering::Equal;
        let mut v = 0;
        for p in &self.chain {
            let s = sign_at(p, x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Number of distinct real roots in (a, b].
    pub fn count(&self, a: &Bound, b: &Bound) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    pub fn count_real(&self) -> usize {
        self.count(&Bound::NegInf, &Bound::PosInf)
    }
}

/// Sign of p at a rational point.
pub fn sign_at_rational(p: &[Integer], x: &Rational) -> Ordering {
    sign_at(p, &Bound::At(x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| Integer::from(c)).collect()
    }

    fn at(n: i64, d: i64) -> Bound {
        Bound::At(Rational::from((n, d)))
    }

    #[test]
    fn x_squared_minus_one() {
        let s = SturmChain::new(&z(&[-1, 0, 1]));
        assert_eq!(s.count(&at(-2, 1), &at(2, 1)), 2);
        assert_eq!(s.count(&at(-1, 1), &at(1, 1)), 1);
        assert_eq!(s.count(&at(-2, 1), &at(-1, 1)), 1);
        assert_eq!(s.count_real(), 2);
    }

    #[test]
    fn no_real_roots() {
        assert_eq!(SturmChain::new(&z(&[1, 0, 1])).count_real(), 0);
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (x-1)^3 (x+2)^2
        let p = z(&[-4, 8, -1, -5, 1, 1]);
        let s = SturmChain::new(&p);
        assert_eq!(s.degree(), 2);
        assert_eq!(s.count_real(), 2);
        assert_eq!(squarefree_part(&p), z(&[-2, 1, 1]));
    }

    #[test]
    fn negative_leading_coefficients() {
        // (x-1)(x-2)(x-3)(x+5) and its negation
        let q = z(&[-30, 49, -19, -1, 1]);
        let neg: ZPoly = q.iter().map(|c| Integer::from(-c)).collect();
        for p in [q, neg] {
            let s = SturmChain::new(&p);
            assert_eq!(s.count_real(), 4);
            assert_eq!(s.count(&at(0, 1), &at(5, 2)), 2);
            assert_eq!(s.count(&at(-6, 1), &at(-5, 1)), 1);
            assert_eq!(s.count(&at(-5, 1), &at(1, 1)), 1);
        }
    }

    #[test]
    fn rational_evaluation_sign() {
        // 2x - 1 at 1/3 is negative, at 2/3 positive, at 1/2 zero
        let p = z(&[-1, 2]);
        assert_eq!(sign_at_rational(&p, &Rational::from((1, 3))), Ordering::Less);
        assert_eq!(sign_at_rational(&p, &Rational::from((2, 3))), Ordering::Greater);
        assert_eq!(sign_at_rational(&p, &Rational::from((1, 2))), Ordering::Equal);
    }
}
