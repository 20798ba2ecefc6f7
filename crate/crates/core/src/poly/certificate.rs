//! Positivity of polynomials on rays [x₀, ∞).

use std::cmp::Ordering;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::{rational_serde, rpow};
use super::{Bound, PiEnclosure, PiPoly, PolyError, PolyQ, SturmChain};
use crate::interval::IntervalReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Sturm,
    Domination,
}

/// Data from which a Sturm certificate is re-checked: the π enclosure used
/// to build the lower bounding polynomial, its value at x₀ and the sign
/// variation counts at x₀ and +∞.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmWitness {
    pub pi: PiEnclosure,
    #[serde(with = "rational_serde")]
    pub lower_at_x0: Rational,
    pub variations_at_x0: usize,
    pub variations_at_inf: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationWitness {
    pub pivot: CoeffEnclosure,
    pub count: u32,
    pub lower: Vec<CoeffEnclosure>,
    pub top: Vec<CoeffEnclosure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Sturm(SturmWitness),
    Domination(DominationWitness),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub method: Method,
    #[serde(with = "rational_serde")]
    pub x0: Rational,
    pub witness: Witness,
}

/// Why a polynomial is not positive on the ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refutation {
    /// p(x) ≤ 0 at this point.
    NonPositiveAt(Rational),
    /// A real root lies in (a, b] although p does not change sign there.
    RootIn(Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositivityOutcome {
    Certified(PositivityCertificate),
    Refuted(Refutation),
    Inconclusive(String),
}

impl PositivityOutcome {
    pub fn certificate(&self) -> Option<&PositivityCertificate> {
        match self {
            PositivityOutcome::Certified(c) => Some(c),
            _ => None,
        }
    }
}

fn has_pi(p: &PiPoly) -> bool {
    p.coeffs.iter().any(|c| c.keys().any(|&k| k > 0))
}

/// Cauchy bound: every real root has absolute value below it.
fn root_bound(p: &PolyQ) -> Rational {
    let lc = p.leading().expect("nonzero").clone().abs();
    let mut m = Rational::new();
    for c in &p.coeffs()[..p.coeffs().len() - 1] {
        let r = Rational::from(c.abs_ref()) / &lc;
        if r > m {
            m = r;
        }
    }
    m + 1u32
}

/// Proves p > 0 on [x0, ∞) or exhibits a point where p ≤ 0.
///
/// For polynomials involving π, a lower bounding polynomial valid for t ≥ 0
/// is built from the enclosure and certified instead; refutations use the
/// matching upper bounding polynomial.
pub fn certify_positive_on_ray(p: &PiPoly, x0: &Rational, pi: &PiEnclosure) -> PositivityOutcome {
    let Some(_) = p.degree() else {
        return PositivityOutcome::Refuted(Refutation::NonPositiveAt(x0.clone()));
    };
    let symbolic = has_pi(p);
    if symbolic && *x0 < 0 {
        return PositivityOutcome::Inconclusive("π-dependent polynomial on a ray reaching below 0".into());
    }
    let (lower, upper) = if symbolic { p.bracket(pi) } else { (p.substitute(&pi.lo), p.substitute(&pi.lo)) };

    if upper.leading().map_or(true, |c| *c < 0) {
        let mut x = x0.clone().max(Rational::from(1));
        while upper.sign_at(&x) != Ordering::Less {
            x *= 2;
        }
        return PositivityOutcome::Refuted(Refutation::NonPositiveAt(x));
    }
    if upper.sign_at(x0) != Ordering::Greater {
        return PositivityOutcome::Refuted(Refutation::NonPositiveAt(x0.clone()));
    }
    if lower.is_zero() || lower.leading().unwrap() <= &0 {
        return PositivityOutcome::Inconclusive("lower bounding polynomial has nonpositive leading coefficient".into());
    }

    let chain = lower.sturm().expect("nonzero");
    let at_x0 = Bound::At(x0.clone());
    let v0 = chain.variations(&at_x0);
    let vinf = chain.variations(&Bound::PosInf);
    let lower_at_x0 = lower.eval(x0);
    if lower_at_x0 > 0 && v0 == vinf {
        return PositivityOutcome::Certified(PositivityCertificate {
            method: Method::Sturm,
            x0: x0.clone(),
            witness: Witness::Sturm(SturmWitness {
                pi: pi.clone(),
                lower_at_x0,
                variations_at_x0: v0,
                variations_at_inf: vinf,
            }),
        });
    }
    match find_nonpositive(&upper, x0) {
        Some(r) if !symbolic || matches!(r, Refutation::NonPositiveAt(_)) => PositivityOutcome::Refuted(r),
        _ => PositivityOutcome::Inconclusive("π enclosure too wide to decide".into()),
    }
}

/// Isolates roots of p in (x0, ∞) and looks for a point where p ≤ 0.
fn find_nonpositive(p: &PolyQ, x0: &Rational) -> Option<Refutation> {
    let chain = p.sturm().ok()?;
    let hi = root_bound(p).max(Rational::from(x0 + 1u32));
    let mut stack = vec![(x0.clone(), hi)];
    let count = |a: &Rational, b: &Rational| chain.count(&Bound::At(a.clone()), &Bound::At(b.clone()));
    while let Some((a, b)) = stack.pop() {
        let n = count(&a, &b);
        if n == 0 {
            continue;
        }
        if p.sign_at(&b) != Ordering::Greater {
            return Some(Refutation::NonPositiveAt(b));
        }
        let mid = Rational::from(&a + &b) / 2u32;
        if p.sign_at(&mid) != Ordering::Greater {
            return Some(Refutation::NonPositiveAt(mid));
        }
        if n == 1 && Rational::from(&b - &a) < Rational::from((1, 1u64 << 40)) {
            return Some(Refutation::RootIn(a, b));
        }
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    None
}

impl PositivityCertificate {
    /// Re-checks the certificate for `p` from the stored witness alone.
    pub fn verify(&self, p: &PiPoly) -> bool {
        match &self.witness {
            Witness::Sturm(w) => {
                if !w.pi.is_valid() {
                    return false;
                }
                let symbolic = has_pi(p);
                if symbolic && self.x0 < 0 {
                    return false;
                }
                let lower = if symbolic { p.bracket(&w.pi).0 } else { p.substitute(&w.pi.lo) };
                let Ok(chain) = lower.sturm() else {
                    return false;
                };
                let v0 = chain.variations(&Bound::At(self.x0.clone()));
                let vinf = chain.variations(&Bound::PosInf);
                let val = lower.eval(&self.x0);
                self.method == Method::Sturm
                    && val > 0
                    && val == w.lower_at_x0
                    && v0 == w.variations_at_x0
                    && vinf == w.variations_at_inf
                    && v0 == vinf
            }
            Witness::Domination(w) => {
                match domination_threshold(&w.lower, &w.pivot, w.count, &w.top) {
                    Ok(r) => self.method == Method::Domination && r.refined <= self.x0,
                    Err(_) => false,
                }
            }
        }
    }
}

/// Signed coefficient c_j known to lie in [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEnclosure {
    pub index: u32,
    #[serde(with = "rational_serde")]
    pub lo: Rational,
    #[serde(with = "rational_serde")]
    pub hi: Rational,
}

impl CoeffEnclosure {
    pub fn new(index: u32, lo: Rational, hi: Rational) -> CoeffEnclosure {
        assert!(lo <= hi);
        CoeffEnclosure { index, lo, hi }
    }

    pub fn exact(index: u32, c: Rational) -> CoeffEnclosure {
        CoeffEnclosure { index, lo: c.clone(), hi: c }
    }

    pub fn from_interval(index: u32, x: &IntervalReal) -> CoeffEnclosure {
        CoeffEnclosure {
            index,
            lo: x.lo().to_rational().expect("finite enclosure"),
            hi: x.hi().to_rational().expect("finite enclosure"),
        }
    }

    fn abs_upper(&self) -> Rational {
        Rational::from(self.lo.abs_ref()).max(Rational::from(self.hi.abs_ref()))
    }

    fn abs_lower(&self) -> Rational {
        if self.lo <= 0 && self.hi >= 0 {
            Rational::new()
        } else {
            Rational::from(self.lo.abs_ref()).min(Rational::from(self.hi.abs_ref()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationResult {
    /// Smallest integer from which both domination steps hold.
    pub threshold: Integer,
    /// Smallest multiple of 1/1024 from which both steps hold.
    pub refined: Rational,
    /// Integer thresholds of the per-term steps |c_j| x^j ≤ |c_j0| x^j0.
    pub per_term: Vec<(u32, Integer)>,
    /// Integer threshold of the leading-block step.
    pub tail: Integer,
    pub certificate: PositivityCertificate,
}

const REFINE_DEN: u32 = 1024;

struct Domination<'a> {
    lower: &'a [CoeffEnclosure],
    pivot_lo: Rational,
    tail: Option<(PolyQ, SturmChain)>,
    pivot_index: u32,
}

impl Domination<'_> {
    fn term_holds(&self, c: &CoeffEnclosure, x: &Rational) -> bool {
        let d = (self.pivot_index - c.index) as i32;
        Rational::from(&self.pivot_lo * rpow(x, d as u32)) >= c.abs_upper()
    }

    fn tail_holds(&self, x: &Rational) -> bool {
        match &self.tail {
            None => true,
            Some((q, chain)) => {
                q.sign_at(x) == Ordering::Greater && chain.count(&Bound::At(x.clone()), &Bound::PosInf) == 0
            }
        }
    }

    fn all_hold(&self, x: &Rational) -> bool {
        self.lower.iter().all(|c| self.term_holds(c, x)) && self.tail_holds(x)
    }
}

/// Smallest integer m ≥ lo with pred(m), given pred monotone and pred(hi).
fn first_integer(mut lo: Integer, mut hi: Integer, pred: impl Fn(&Integer) -> bool) -> Integer {
    while lo < hi {
        let mid = Integer::from(&lo + &hi) >> 1u32;
        if pred(&mid) {
            hi = mid;
        } else {
            lo = mid + 1u32;
        }
    }
    lo
}

fn grow_until(pred: impl Fn(&Integer) -> bool) -> Integer {
    let mut hi = Integer::from(1);
    while !pred(&hi) {
        hi <<= 1u32;
    }
    hi
}

/// Threshold beyond which the polynomial Σ c_j x^j is positive, by the
/// two-step tail domination argument: every term below the pivot is bounded
/// by |c_j0| x^j0, then `count` copies of the pivot term are beaten by the
/// leading block.
///
/// `lower` holds enclosures of c_j for j below the pivot (only |c_j| matters),
/// `top` holds enclosures of the coefficients above the pivot.
pub fn domination_threshold(
    lower: &[CoeffEnclosure],
    pivot: &CoeffEnclosure,
    count: u32,
    top: &[CoeffEnclosure],
) -> Result<DominationResult, PolyError> {
    let j0 = pivot.index;
    if lower.iter().any(|c| c.index >= j0) {
        return Err(PolyError::Malformed("lower indices must be below the pivot".into()));
    }
    if top.iter().any(|c| c.index <= j0) {
        return Err(PolyError::Malformed("leading block indices must be above the pivot".into()));
    }
    let pivot_lo = pivot.abs_lower();
    let pivot_hi = pivot.abs_upper();
    let live: Vec<CoeffEnclosure> = lower.iter().filter(|c| c.abs_upper() > 0).cloned().collect();
    if !live.is_empty() && pivot_lo == 0 {
        return Err(PolyError::NoThreshold);
    }

    let tail = if top.is_empty() {
        if pivot_hi > 0 && count > 0 {
            return Err(PolyError::NoThreshold);
        }
        None
    } else {
        // for x > 0: Σ top_i x^(i-j0) - count·|c_j0| ≥ Σ lo_i x^(i-j0) - count·hi
        let width = top.iter().map(|c| c.index).max().unwrap() - j0;
        let mut v = vec![Rational::new(); width as usize + 1];
        v[0] = -Rational::from(&pivot_hi * count);
        for c in top {
            v[(c.index - j0) as usize] += &c.lo;
        }
        let q = PolyQ::new(v);
        if q.leading().map_or(true, |c| *c <= 0) {
            return Err(PolyError::NoThreshold);
        }
        let chain = q.sturm()?;
        Some((q, chain))
    };

    let dom = Domination { lower: &live, pivot_lo: pivot_lo.clone(), tail, pivot_index: j0 };
    let at = |m: &Integer| Rational::from(m.clone());

    let mut per_term = Vec::with_capacity(live.len());
    for c in &live {
        let pred = |m: &Integer| dom.term_holds(c, &at(m));
        let hi = grow_until(pred);
        per_term.push((c.index, first_integer(Integer::from(1), hi, pred)));
    }
    let tail_pred = |m: &Integer| dom.tail_holds(&at(m));
    let tail_t = first_integer(Integer::from(1), grow_until(tail_pred), tail_pred);

    let mut threshold = tail_t.clone();
    for (_, t) in &per_term {
        if *t > threshold {
            threshold = t.clone();
        }
    }

    // refine on the grid i/1024 within [threshold - 1, threshold]
    let base = Integer::from(&threshold - 1u32) * REFINE_DEN;
    let top_i = Integer::from(&threshold * REFINE_DEN);
    let grid = |i: &Integer| Rational::from((i.clone(), Integer::from(REFINE_DEN)));
    let first = first_integer(base.max(Integer::from(REFINE_DEN)), top_i, |i| dom.all_hold(&grid(i)));
    let refined = grid(&first);

    let certificate = PositivityCertificate {
        method: Method::Domination,
        x0: refined.clone(),
        witness: Witness::Domination(DominationWitness {
            pivot: pivot.clone(),
            count,
            lower: lower.to_vec(),
            top: top.to_vec(),
        }),
    };
    Ok(DominationResult { threshold, refined, per_term, tail: tail_t, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{phi_poly, psi_poly};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn pi() -> PiEnclosure {
        PiEnclosure::at_precision(256)
    }

    #[test]
    fn psi_on_six() {
        let out = certify_positive_on_ray(&psi_poly(), &r(6, 1), &pi());
        let cert = out.certificate().expect("certified");
        assert!(cert.verify(&psi_poly()));
    }

    #[test]
    fn psi_not_positive_from_four() {
        match certify_positive_on_ray(&psi_poly(), &r(4, 1), &pi()) {
            PositivityOutcome::Refuted(Refutation::NonPositiveAt(x)) => {
                assert!(x >= 4);
                assert!(psi_poly().eval_interval(&IntervalReal::from_rational(&x, 256)).sign() == Some(Ordering::Less));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn phi_minus_psi_on_three_point_three() {
        let d = &phi_poly() - &psi_poly();
        let cert = certify_positive_on_ray(&d, &r(33, 10), &pi());
        assert!(cert.certificate().unwrap().verify(&d));
    }

    #[test]
    fn linear_refutation() {
        let p = PiPoly::from_poly(&PolyQ::from_ints(&[1, -1]));
        match certify_positive_on_ray(&p, &r(2, 1), &pi()) {
            PositivityOutcome::Refuted(Refutation::NonPositiveAt(x)) => assert!(x >= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn touching_root_is_refuted() {
        // (x - 3)^2 on [1, ∞)
        let p = PiPoly::from_poly(&PolyQ::from_ints(&[9, -6, 1]));
        match certify_positive_on_ray(&p, &r(1, 1), &pi()) {
            PositivityOutcome::Refuted(Refutation::NonPositiveAt(x)) => assert_eq!(x, 3),
            PositivityOutcome::Refuted(Refutation::RootIn(a, b)) => assert!(a < 3 && b >= 3),
            other => panic!("{other:?}"),
        }
        // but fine from 4
        assert!(certify_positive_on_ray(&p, &r(4, 1), &pi()).certificate().is_some());
    }

    #[test]
    fn tampered_certificate_fails() {
        let out = certify_positive_on_ray(&psi_poly(), &r(6, 1), &pi());
        let mut cert = out.certificate().unwrap().clone();
        cert.x0 = r(4, 1);
        assert!(!cert.verify(&psi_poly()));
        let mut cert = out.certificate().unwrap().clone();
        if let Witness::Sturm(w) = &mut cert.witness {
            w.pi.lo = r(3, 1);
        }
        assert!(!cert.verify(&psi_poly()));
    }

    #[test]
    fn certificate_json_shape() {
        let out = certify_positive_on_ray(&PiPoly::from_poly(&PolyQ::from_ints(&[1, 1])), &r(0, 1), &pi());
        let json = serde_json::to_value(out.certificate().unwrap()).unwrap();
        assert_eq!(json["method"], "STURM");
        assert_eq!(json["x0"], "0");
        assert_eq!(json["witness"]["lower_at_x0"], "1");
    }

    #[test]
    fn degenerate_domination() {
        let res = domination_threshold(&[], &CoeffEnclosure::exact(0, r(0, 1)), 1, &[]).unwrap();
        assert_eq!(res.threshold, 1);
        assert_eq!(res.refined, 1);
    }

    #[test]
    fn simple_domination() {
        // x^2 - 10x - 3: lower term |3| ≤ 10x from x ≥ 1, then x - 2·10 > 0 from x > 20
        let res = domination_threshold(
            &[CoeffEnclosure::exact(0, r(-3, 1))],
            &CoeffEnclosure::exact(1, r(-10, 1)),
            2,
            &[CoeffEnclosure::exact(2, r(1, 1))],
        )
        .unwrap();
        assert_eq!(res.per_term, vec![(0, Integer::from(1))]);
        assert_eq!(res.tail, 21);
        assert_eq!(res.threshold, 21);
        assert_eq!(res.refined, r(20 * 1024 + 1, 1024));
        assert!(res.certificate.verify(&PiPoly::default()));
    }

    #[test]
    fn domination_without_dominant_block() {
        assert_eq!(
            domination_threshold(&[], &CoeffEnclosure::exact(1, r(1, 1)), 1, &[CoeffEnclosure::exact(2, r(-1, 1))]),
            Err(PolyError::NoThreshold)
        );
        assert_eq!(
            domination_threshold(&[], &CoeffEnclosure::exact(1, r(1, 1)), 1, &[]),
            Err(PolyError::NoThreshold)
        );
    }
}
