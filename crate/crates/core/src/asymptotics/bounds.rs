use std::cmp::Ordering;

use rug::{Integer, Rational};

use super::{auto_precision_for, m_k_at, x_k, AsymptoticConstants, AsymptoticError, X_DELTA_BOUNDS, X_THETA_BOUNDS};
use crate::eta::PartitionTable;
use crate::interval::IntervalReal;
use crate::verify::Verdict;

const CELL_DIGITS: usize = 30;

/// Closed-form bounds on Λ_k(n) and Θ_k(n) as polynomials in 1/x_k(n).
#[derive(Clone, Debug)]
pub struct LambdaThetaBounds {
    pub x: IntervalReal,
    pub lambda_lo: IntervalReal,
    pub lambda_hi: IntervalReal,
    pub theta_lo: IntervalReal,
    pub theta_hi: IntervalReal,
    /// n ≥ 2
    pub lambda_claimed: bool,
    /// x_k(n) ≥ 315
    pub theta_claimed: bool,
}

fn one(prec: u32) -> IntervalReal {
    IntervalReal::from_i64(1, prec)
}

fn at_least(x: &IntervalReal, threshold: u32) -> bool {
    matches!(x.cmp_rational(&Rational::from(threshold)), Some(Ordering::Greater | Ordering::Equal))
}

pub fn lambda_theta_bounds(k: u32, n: usize, prec: u32) -> Result<LambdaThetaBounds, AsymptoticError> {
    let c = AsymptoticConstants::new(k)?;
    let x = x_k(k, n, prec)?;
    let alpha = c.alpha_interval(prec);
    let sa = c.sqrt_alpha(prec);
    let pi4 = IntervalReal::pi(prec).pow_u(4);
    let pi8 = pi4.sqr();
    let w = x.recip();
    let w3 = w.pow_u(3);
    let w4 = w.pow_u(4);
    let w5 = w.pow_u(5);
    let w6 = w.pow_u(6);
    let w7 = w.pow_u(7);
    let w8 = w.pow_u(8);
    let alpha3 = alpha.pow_u(3);
    let q = |a: i64, b: i64| Rational::from((a, b));

    // shared pieces
    let a3 = &(&sa * &pi4).mul_rational(&q(1, 9)) * &w3;
    let a4 = &pi4.mul_rational(&q(5, 9)) * &w4;
    let a5 = &(&pi4.mul_rational(&q(5, 8)) / &sa) * &w5;
    let c292 = &(&IntervalReal::from_i64(292, prec) / &alpha3) * &w6;
    let c300 = &(&IntervalReal::from_i64(300, prec) / &alpha3) * &w6;
    let c5pi4 = &(&pi4.mul_rational(&q(5, 6)) / &alpha) * &w6;

    let lambda_hi = {
        let f1 = &(&one(prec) + &a4) + &(&pi8.mul_rational(&q(1, 3)) * &w8);
        let f2 = &(&one(prec) - &a3) + &(&(&alpha * &pi8).mul_rational(&q(1, 81)) * &w6);
        let f3 = &(&one(prec) - &a5) + &c292;
        &(&f1 * &f2) * &f3
    };
    let lambda_lo = {
        let f1 = &(&one(prec) + &a4) + &(&pi8.mul_rational(&q(5, 18)) * &w8);
        let f2 = &(&one(prec) - &a3) - &(&(&sa * &pi8).mul_rational(&q(5, 162)) * &w7);
        let f3 = &(&(&one(prec) - &a5) - &c5pi4) - &c300;
        &(&f1 * &f2) * &f3
    };

    let head = &(&(&one(prec) - &a3) + &a4) - &a5;
    let block_lo = (-&(&IntervalReal::from_i64(300, prec) / &alpha3)).add_rational(&q(-10, 1))
        - &pi4.mul_rational(&q(5, 6)) / &alpha;
    let block_hi = (&(&pi8 * &alpha).mul_rational(&q(1, 81)) + &(&IntervalReal::from_i64(292, prec) / &alpha3))
        .add_rational(&q(5, 1));
    let theta_lo = &head + &(&block_lo * &w6);
    let theta_hi = &head + &(&block_hi * &w6);

    Ok(LambdaThetaBounds {
        lambda_claimed: n >= 2,
        theta_claimed: at_least(&x, X_THETA_BOUNDS),
        x,
        lambda_lo,
        lambda_hi,
        theta_lo,
        theta_hi,
    })
}

/// g_k(n) and G_k(n), with x_k(n±1) = √(x_k(n)² ± 2π²/3).
pub fn g_big_g(k: u32, n: usize, prec: u32) -> Result<(IntervalReal, IntervalReal), AsymptoticError> {
    AsymptoticConstants::new(k)?;
    if n < 2 {
        return Err(AsymptoticError::NonpositiveRadicand { k, n: n.saturating_sub(1) });
    }
    let x = x_k(k, n, prec)?;
    let shift = IntervalReal::pi(prec).sqr().mul_rational(&Rational::from((2, 3)));
    let x2 = x.sqr();
    let below = &x2 - &shift;
    if below.lo().cmp0() != Some(Ordering::Greater) {
        return Err(AsymptoticError::NonpositiveRadicand { k, n: n - 1 });
    }
    let above = &x2 + &shift;
    // x⁻⁶ = (x²)⁻³
    let im = below.pow_u(3).recip();
    let ip = above.pow_u(3).recip();
    let i0 = x2.pow_u(3).recip();
    let g = &(&(&one(prec) - &im) * &(&one(prec) - &ip)) / &(&one(prec) + &i0).sqr();
    let big_g = &(&(&one(prec) + &im) * &(&one(prec) + &ip)) / &(&one(prec) - &i0).sqr();
    Ok((g, big_g))
}

/// Λ_k(n) = M_k(n−1) M_k(n+1) / M_k(n)².
pub fn lambda_exact(k: u32, n: usize, prec: u32) -> Result<IntervalReal, AsymptoticError> {
    let c = AsymptoticConstants::new(k)?;
    if n < 2 {
        return Err(AsymptoticError::NonpositiveRadicand { k, n: n.saturating_sub(1) });
    }
    let m = |j: usize| -> Result<IntervalReal, AsymptoticError> { m_k_at(&c, &x_k(k, j, prec)?, prec) };
    let prev = m(n - 1)?;
    let next = m(n + 1)?;
    let mid = m(n)?;
    Ok(&(&prev * &next) / &mid.sqr())
}

/// Θ_k(n) = Δ(n−1) Δ(n+1) / Δ(n)², exact.
pub fn theta_exact(table: &PartitionTable, n: usize) -> Result<Rational, AsymptoticError> {
    if n < 1 {
        return Err(AsymptoticError::NonpositiveArgument);
    }
    let need = n + 1;
    let get = |j: usize| table.get(j).ok_or(AsymptoticError::TableTooShort { have: table.n_max(), need });
    let num = Integer::from(get(n - 1)? * get(n + 1)?);
    let den = Integer::from(get(n)?.square_ref());
    Ok(Rational::from((num, den)))
}

/// One row of a bounds dump. Cells are decimal strings carrying an
/// `@p<bits>` precision tag; lower-type quantities print their upper
/// endpoint rounded up and upper-type quantities their lower endpoint
/// rounded down, so each printed bound is at least as tight as the claim
/// that was verified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsRow {
    pub n: usize,
    pub theta_exact: String,
    pub theta_lo: String,
    pub theta_hi: String,
    pub lambda_lo: String,
    pub lambda_hi: String,
    pub g: String,
    pub big_g: String,
    pub verdict: Verdict,
}

impl BoundsRow {
    pub const CSV_HEADER: &'static str = "n,theta_exact,theta_lo,theta_hi,lambda_lo,lambda_hi,g,G,verdict";

    fn empty(n: usize, theta: &Rational) -> BoundsRow {
        BoundsRow {
            n,
            theta_exact: format!("{}/{}", theta.numer(), theta.denom()),
            theta_lo: String::new(),
            theta_hi: String::new(),
            lambda_lo: String::new(),
            lambda_hi: String::new(),
            g: String::new(),
            big_g: String::new(),
            verdict: Verdict::Inconclusive,
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.theta_exact,
            self.theta_lo,
            self.theta_hi,
            self.lambda_lo,
            self.lambda_hi,
            self.g,
            self.big_g,
            verdict_str(self.verdict)
        )
    }
}

pub(crate) fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

fn lower_cell(x: &IntervalReal) -> String {
    format!("{}@p{}", x.hi_decimal(CELL_DIGITS), x.prec())
}

fn upper_cell(x: &IntervalReal) -> String {
    format!("{}@p{}", x.lo_decimal(CELL_DIGITS), x.prec())
}

/// Pass iff lo < value < hi is decided; Fail iff either side is decided
/// the wrong way; Inconclusive otherwise.
fn decide_between(lo: &IntervalReal, value: &IntervalReal, hi: &IntervalReal, strict: bool) -> Verdict {
    let left = lo.cmp_interval(value);
    let right = value.cmp_interval(hi);
    let ok = |o: Option<Ordering>| match o {
        Some(Ordering::Less) => Some(true),
        Some(Ordering::Equal) => Some(!strict),
        Some(Ordering::Greater) => Some(false),
        None => None,
    };
    match (ok(left), ok(right)) {
        (Some(true), Some(true)) => Verdict::Pass,
        (Some(false), _) | (_, Some(false)) => Verdict::Fail,
        _ => Verdict::Inconclusive,
    }
}

fn gate(k: u32, n: usize, threshold: u32, prec: u32) -> Result<IntervalReal, AsymptoticError> {
    let x = x_k(k, n, prec)?;
    if !at_least(&x, threshold) {
        return Err(AsymptoticError::Hypothesis(format!(
            "x_{k}({n}) = {} is below {threshold}",
            x.lo_decimal(8)
        )));
    }
    Ok(x)
}

fn working_prec(k: u32, n: usize, prec: Option<u32>) -> u32 {
    prec.unwrap_or_else(|| auto_precision_for(k, n + 1))
}

/// Λ_k(n) g_k(n) ≤ Θ_k(n) ≤ Λ_k(n) G_k(n), asserted for x_k(n) ≥ 152.
/// The row carries the Λ_k(n) enclosure in the lambda columns and the two
/// products in the theta columns.
pub fn sandwich_check(
    k: u32,
    n: usize,
    table: &PartitionTable,
    prec: Option<u32>,
) -> Result<BoundsRow, AsymptoticError> {
    let p = working_prec(k, n, prec);
    gate(k, n, X_DELTA_BOUNDS, p)?;
    let theta = theta_exact(table, n)?;
    let lambda = lambda_exact(k, n, p)?;
    let (g, big_g) = g_big_g(k, n, p)?;
    let lower = &lambda * &g;
    let upper = &lambda * &big_g;
    let value = IntervalReal::from_rational(&theta, p);
    let mut row = BoundsRow::empty(n, &theta);
    row.verdict = decide_between(&lower, &value, &upper, false);
    row.theta_lo = lower_cell(&lower);
    row.theta_hi = upper_cell(&upper);
    row.lambda_lo = format!("{}@p{}", lambda.lo_decimal(CELL_DIGITS), p);
    row.lambda_hi = format!("{}@p{}", lambda.hi_decimal(CELL_DIGITS), p);
    row.g = lower_cell(&g);
    row.big_g = upper_cell(&big_g);
    Ok(row)
}

/// The closed-form Θ_k(n) bounds, asserted for x_k(n) ≥ 315.
pub fn theta_bounds_check(
    k: u32,
    n: usize,
    table: &PartitionTable,
    prec: Option<u32>,
) -> Result<BoundsRow, AsymptoticError> {
    let p = prec.unwrap_or(crate::interval::DEFAULT_PREC);
    gate(k, n, X_THETA_BOUNDS, p)?;
    let theta = theta_exact(table, n)?;
    let b = lambda_theta_bounds(k, n, p)?;
    let value = IntervalReal::from_rational(&theta, p);
    let mut row = BoundsRow::empty(n, &theta);
    row.verdict = decide_between(&b.theta_lo, &value, &b.theta_hi, true);
    row.theta_lo = lower_cell(&b.theta_lo);
    row.theta_hi = upper_cell(&b.theta_hi);
    row.lambda_lo = lower_cell(&b.lambda_lo);
    row.lambda_hi = upper_cell(&b.lambda_hi);
    Ok(row)
}

/// The closed-form Λ_k(n) bounds against Λ_k(n) from M_k, asserted for n ≥ 2.
pub fn lambda_bounds_check(k: u32, n: usize, prec: Option<u32>) -> Result<(Verdict, LambdaThetaBounds, IntervalReal), AsymptoticError> {
    if n < 2 {
        return Err(AsymptoticError::Hypothesis(format!("n = {n} is below 2")));
    }
    let p = working_prec(k, n, prec);
    let b = lambda_theta_bounds(k, n, p)?;
    let lambda = lambda_exact(k, n, p)?;
    let v = decide_between(&b.lambda_lo, &lambda, &b.lambda_hi, true);
    Ok((v, b, lambda))
}

/// One row of the M_k(n)(1 ∓ x⁻⁶) sandwich on Δ_k(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRow {
    pub n: usize,
    pub delta: String,
    pub lower: String,
    pub upper: String,
    pub verdict: Verdict,
}

impl DeltaRow {
    pub const CSV_HEADER: &'static str = "n,delta,lower,upper,verdict";

    pub fn csv_line(&self) -> String {
        format!("{},{},{},{},{}", self.n, self.delta, self.lower, self.upper, verdict_str(self.verdict))
    }
}

/// M_k(n)(1 − x⁻⁶) ≤ Δ_k(n) ≤ M_k(n)(1 + x⁻⁶), asserted for x_k(n) ≥ 152.
pub fn delta_bounds_check(
    k: u32,
    n: usize,
    table: &PartitionTable,
    prec: Option<u32>,
) -> Result<DeltaRow, AsymptoticError> {
    let p = working_prec(k, n, prec);
    let x = gate(k, n, X_DELTA_BOUNDS, p)?;
    let delta = table.get(n).ok_or(AsymptoticError::TableTooShort { have: table.n_max(), need: n })?;
    let c = AsymptoticConstants::new(k)?;
    let m = m_k_at(&c, &x, p)?;
    let eps = x.pow_u(6).recip();
    let lower = &m * &(&one(p) - &eps);
    let upper = &m * &(&one(p) + &eps);
    let value = IntervalReal::from_integer(delta, p);
    Ok(DeltaRow {
        n,
        delta: delta.to_string(),
        lower: lower_cell(&lower),
        upper: upper_cell(&upper),
        verdict: decide_between(&lower, &value, &upper, false),
    })
}
