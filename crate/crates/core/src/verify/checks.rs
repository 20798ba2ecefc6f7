use rug::ops::Pow;
use rug::Integer;

use super::jensen::jensen_hyperbolic;
use super::report::{run_scan, PointResult, Verdict, VerificationReport};
use super::{SignOutcome, VerifyError};
use crate::eta::PartitionTable;

fn check_range(table: &PartitionTable, n: usize, lo: usize, ahead: usize) -> Result<(), VerifyError> {
    let hi = table.n_max().saturating_sub(ahead);
    if n < lo || n > hi || table.n_max() < ahead {
        return Err(VerifyError::OutOfRange { n, lo, hi });
    }
    Ok(())
}

fn at(table: &PartitionTable, n: usize) -> &Integer {
    &table.coeffs()[n]
}

/// Δ(n)² − Δ(n−1)Δ(n+1)
pub fn logconcave_margin(table: &PartitionTable, n: usize) -> Result<Integer, VerifyError> {
    check_range(table, n, 1, 1)?;
    let a = at(table, n);
    Ok(Integer::from(a * a) - Integer::from(at(table, n - 1) * at(table, n + 1)))
}

pub fn logconcave_at(table: &PartitionTable, n: usize) -> Result<SignOutcome, VerifyError> {
    logconcave_margin(table, n).map(|m| SignOutcome::of(&m))
}

/// 4(Δ(n)²−Δ(n−1)Δ(n+1))(Δ(n+1)²−Δ(n)Δ(n+2)) − (Δ(n)Δ(n+1)−Δ(n−1)Δ(n+2))²
pub fn turan3_margin(table: &PartitionTable, n: usize) -> Result<Integer, VerifyError> {
    check_range(table, n, 1, 2)?;
    let (a0, a1, a2, a3) = (at(table, n - 1), at(table, n), at(table, n + 1), at(table, n + 2));
    let first = Integer::from(a1 * a1) - Integer::from(a0 * a2);
    let second = Integer::from(a2 * a2) - Integer::from(a1 * a3);
    let cross = Integer::from(a1 * a2) - Integer::from(a0 * a3);
    Ok(4 * first * second - cross.square())
}

pub fn turan3_at(table: &PartitionTable, n: usize) -> Result<SignOutcome, VerifyError> {
    turan3_margin(table, n).map(|m| SignOutcome::of(&m))
}

/// Δ(n)³Δ(n+2) − Δ(n−1)Δ(n+1)³, positive iff Θ(n) < Θ(n+1).
pub fn theta_monotone_margin(table: &PartitionTable, n: usize) -> Result<Integer, VerifyError> {
    check_range(table, n, 1, 2)?;
    let lhs = Integer::from(at(table, n).pow(3u32)) * at(table, n + 2);
    let rhs = Integer::from(at(table, n + 1).pow(3u32)) * at(table, n - 1);
    Ok(lhs - rhs)
}

pub fn theta_monotone_at(table: &PartitionTable, n: usize) -> Result<SignOutcome, VerifyError> {
    theta_monotone_margin(table, n).map(|m| SignOutcome::of(&m))
}

fn binomial(r: u32, j: u32) -> u32 {
    Integer::from(Integer::binomial_u(r, j)).to_u32().expect("small binomial")
}

/// P⁺ − P⁻ where D^r log Δ(n) = log(P⁺/P⁻), with P⁺ collecting the factors
/// Δ(n+j)^C(r,j) for r−j even and P⁻ those for r−j odd.
pub fn dlog_margin(table: &PartitionTable, n: usize, r: u32) -> Result<Integer, VerifyError> {
    if r == 0 {
        return Err(VerifyError::ZeroOrder);
    }
    check_range(table, n, 0, r as usize)?;
    let mut plus = Integer::from(1);
    let mut minus = Integer::from(1);
    for j in 0..=r {
        let f = Integer::from(at(table, n + j as usize).pow(binomial(r, j)));
        if (r - j) % 2 == 0 {
            plus *= f;
        } else {
            minus *= f;
        }
    }
    Ok(plus - minus)
}

/// Sign of D^r log Δ(n) = Σ_j (−1)^(r−j) C(r,j) log Δ(n+j).
pub fn dlog_sign(table: &PartitionTable, n: usize, r: u32) -> Result<SignOutcome, VerifyError> {
    dlog_margin(table, n, r).map(|m| SignOutcome::of(&m))
}

/// An exact per-n check and the outcome that counts as passing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactCheck {
    LogConcave,
    Turan3,
    ThetaMono,
    /// (−1)^(r−1) D^r log Δ(n) > 0
    Dlog { r: u32 },
    Jensen { d: u32 },
}

impl ExactCheck {
    pub fn name(&self) -> &'static str {
        match self {
            ExactCheck::LogConcave => "logconcave",
            ExactCheck::Turan3 => "turan3",
            ExactCheck::ThetaMono => "theta-mono",
            ExactCheck::Dlog { .. } => "dlog",
            ExactCheck::Jensen { .. } => "jensen",
        }
    }

    /// Valid n for a table holding Δ(0..=n_max).
    pub fn valid_range(&self, n_max: usize) -> (usize, Option<usize>) {
        let (lo, ahead) = match *self {
            ExactCheck::LogConcave => (1, 1),
            ExactCheck::Turan3 | ExactCheck::ThetaMono => (1, 2),
            ExactCheck::Dlog { r } => (0, r as usize),
            ExactCheck::Jensen { d } => (0, d as usize),
        };
        (lo, n_max.checked_sub(ahead))
    }

    fn validate(&self) -> Result<(), VerifyError> {
        match *self {
            ExactCheck::Dlog { r: 0 } => Err(VerifyError::ZeroOrder),
            ExactCheck::Jensen { d: 0 } => Err(VerifyError::ZeroDegree),
            _ => Ok(()),
        }
    }

    /// Verdict at n, with the exact margin when requested (Jensen has none).
    pub fn evaluate(&self, table: &PartitionTable, n: usize, with_margin: bool) -> Result<PointResult, VerifyError> {
        let margin = match *self {
            ExactCheck::LogConcave => logconcave_margin(table, n)?,
            ExactCheck::Turan3 => turan3_margin(table, n)?,
            ExactCheck::ThetaMono => theta_monotone_margin(table, n)?,
            ExactCheck::Dlog { r } => {
                let m = dlog_margin(table, n, r)?;
                if r % 2 == 0 {
                    -m
                } else {
                    m
                }
            }
            ExactCheck::Jensen { d } => {
                let ok = jensen_hyperbolic(table, d, n)?;
                return Ok(PointResult { n, verdict: if ok { Verdict::Pass } else { Verdict::Fail }, margin: None });
            }
        };
        let verdict = if SignOutcome::of(&margin).is_positive() { Verdict::Pass } else { Verdict::Fail };
        Ok(PointResult { n, verdict, margin: with_margin.then(|| margin.to_string()) })
    }

    /// Runs the check for every n in from..=to (stepping by `step`).
    pub fn scan(
        &self,
        table: &PartitionTable,
        from: usize,
        to: usize,
        step: usize,
        workers: usize,
        with_margins: bool,
    ) -> Result<VerificationReport, VerifyError> {
        self.validate()?;
        if from > to {
            return Err(VerifyError::EmptyRange { from, to });
        }
        let (lo, hi) = self.valid_range(table.n_max());
        let hi_val = hi.unwrap_or(0);
        for n in [from, to] {
            if n < lo || hi.map_or(true, |h| n > h) {
                return Err(VerifyError::OutOfRange { n, lo, hi: hi_val });
            }
        }
        let ns: Vec<usize> = (from..=to).step_by(step.max(1)).collect();
        let mut report = VerificationReport::new(self.name(), table.k(), from, to);
        match *self {
            ExactCheck::Dlog { r } => report.r = Some(r),
            ExactCheck::Jensen { d } => report.d = Some(d),
            _ => {}
        }
        Ok(run_scan(report, &ns, workers, with_margins, |n| {
            self.evaluate(table, n, with_margins).expect("range checked")
        }))
    }
}

/// Result of the empirical search for n_k(r).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureScan {
    pub r: u32,
    /// Least n* with (−1)^(r−1) D^r log Δ(n) > 0 for all n in n*..=to_n;
    /// `None` when the inequality fails at `to_n` itself.
    pub candidate: Option<usize>,
    /// Every n in 1..=to_n where the inequality fails.
    pub violations: Vec<usize>,
    pub report: VerificationReport,
}

/// Scans n = 1..=to_n for sign violations of (−1)^(r−1) D^r log Δ(n).
pub fn conjecture_threshold(
    table: &PartitionTable,
    r: u32,
    to_n: usize,
    workers: usize,
) -> Result<ConjectureScan, VerifyError> {
    let mut report = ExactCheck::Dlog { r }.scan(table, 1, to_n, 1, workers, false)?;
    let violations = report.failures.clone();
    let candidate = match violations.last() {
        None => Some(1),
        Some(&last) if last < to_n => Some(last + 1),
        Some(_) => None,
    };
    report.check = "conjecture".into();
    report.candidate = candidate;
    Ok(ConjectureScan { r, candidate, violations, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::delta_table;
    use proptest::prelude::*;

    fn table(v: &[i64]) -> PartitionTable {
        PartitionTable::from_coeffs(0, v.iter().map(|&x| Integer::from(x)).collect()).unwrap()
    }

    #[test]
    fn logconcave_examples() {
        let t = delta_table(1, 10).unwrap();
        assert_eq!(logconcave_margin(&t, 1).unwrap(), 1);
        assert_eq!(logconcave_margin(&t, 2).unwrap(), 10);
        assert_eq!(logconcave_at(&table(&[1, 1, 1]), 1).unwrap(), SignOutcome::Zero);
        assert!(logconcave_at(&t, 0).is_err());
        assert!(logconcave_at(&t, 10).is_err());
    }

    #[test]
    fn turan3_examples() {
        let t = delta_table(1, 10).unwrap();
        assert_eq!(turan3_at(&t, 6).unwrap(), SignOutcome::Positive);
        assert_eq!(turan3_at(&t, 2).unwrap(), SignOutcome::Negative);
        assert_eq!(turan3_at(&delta_table(2, 10).unwrap(), 6).unwrap(), SignOutcome::Positive);
        assert_eq!(turan3_at(&table(&[1, 2, 4, 8]), 1).unwrap(), SignOutcome::Zero);
        assert!(turan3_at(&table(&[1, 2, 4, 8]), 2).is_err());
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_monotone_at(&delta_table(1, 10).unwrap(), 5).unwrap(), SignOutcome::Positive);
        assert_eq!(theta_monotone_at(&delta_table(2, 10).unwrap(), 7).unwrap(), SignOutcome::Positive);
        assert_eq!(theta_monotone_at(&delta_table(1, 10).unwrap(), 3).unwrap(), SignOutcome::Negative);
        assert_eq!(theta_monotone_at(&table(&[1, 2, 4, 8]), 1).unwrap(), SignOutcome::Zero);
    }

    #[test]
    fn dlog_examples() {
        let t = delta_table(1, 60).unwrap();
        assert_eq!(dlog_sign(&t, 4, 3).unwrap(), SignOutcome::Positive);
        for n in 1..=58 {
            assert_eq!(dlog_sign(&t, n, 2).unwrap(), SignOutcome::Negative, "n = {n}");
        }
        assert_eq!(dlog_sign(&table(&[1, 1, 1]), 0, 1).unwrap(), SignOutcome::Zero);
        assert_eq!(dlog_sign(&t, 1, 0), Err(VerifyError::ZeroOrder));
        assert!(dlog_sign(&t, 58, 3).is_err());
    }

    #[test]
    fn d3_log_is_theta_step_one_ahead() {
        // On a 5-term table: D³ log a(0) > 0 ⇔ a(3)a(1)³ > a(2)³a(0) ⇔ Θ(1) < Θ(2).
        let t = table(&[1, 3, 8, 18, 38]);
        assert_eq!(dlog_margin(&t, 0, 3).unwrap(), theta_monotone_margin(&t, 1).unwrap());
        assert_eq!(dlog_margin(&t, 0, 3).unwrap(), Integer::from(18 * 27 - 512));
        assert_eq!(dlog_margin(&t, 1, 3).unwrap(), theta_monotone_margin(&t, 2).unwrap());
    }

    #[test]
    fn small_conjecture_thresholds() {
        let t = delta_table(1, 400).unwrap();
        let scan = |r| conjecture_threshold(&t, r, 390, 2).unwrap();
        assert_eq!(scan(1).candidate, Some(1));
        assert_eq!(scan(2).candidate, Some(1));
        let s3 = scan(3);
        assert_eq!(s3.candidate, Some(3));
        assert_eq!(s3.violations, vec![2]);
        assert_eq!(scan(4).candidate, Some(23));
        assert_eq!(scan(5).candidate, Some(57));
        let t2 = delta_table(2, 400).unwrap();
        assert_eq!(conjecture_threshold(&t2, 3, 390, 1).unwrap().candidate, Some(5));
    }

    #[test]
    fn violation_at_the_end_gives_no_threshold() {
        // a geometric-then-flat tail breaks strict log-concavity at the end
        let t = table(&[1, 3, 8, 18, 38, 38, 38]);
        let s = conjecture_threshold(&t, 2, 4, 1).unwrap();
        assert_eq!(s.candidate, None);
        assert_eq!(s.violations, vec![4]);
    }

    #[test]
    fn scan_respects_table_range() {
        let t = delta_table(1, 20).unwrap();
        assert!(ExactCheck::Turan3.scan(&t, 1, 18, 1, 1, false).is_ok());
        assert!(ExactCheck::Turan3.scan(&t, 1, 19, 1, 1, false).is_err());
        assert!(ExactCheck::Turan3.scan(&t, 5, 4, 1, 1, false).is_err());
        let rep = ExactCheck::Turan3.scan(&t, 1, 18, 1, 3, true).unwrap();
        assert_eq!(rep.failures, vec![2, 4]);
        assert_eq!(rep.margins.as_ref().unwrap().len(), 18);
    }

    proptest! {
        #[test]
        fn d2_jensen_matches_logconcavity(v in proptest::collection::vec(1i64..1000, 4..12)) {
            let mut v = v;
            v[0] = 1;
            let t = table(&v);
            for n in 1..t.n_max() {
                let lc = logconcave_at(&t, n).unwrap();
                prop_assert_eq!(jensen_hyperbolic(&t, 2, n - 1).unwrap(), lc != SignOutcome::Negative);
            }
        }

        #[test]
        fn d3_log_matches_theta(v in proptest::collection::vec(1i64..10_000, 5..14)) {
            let mut v = v;
            v[0] = 1;
            let t = table(&v);
            for n in 0..t.n_max() - 3 {
                prop_assert_eq!(dlog_sign(&t, n, 3).unwrap(), theta_monotone_at(&t, n + 1).unwrap());
            }
        }

        #[test]
        fn turan3_implies_d3_jensen(v in proptest::collection::vec(1i64..10_000, 5..14)) {
            let mut v = v;
            v[0] = 1;
            let t = table(&v);
            for n in 1..t.n_max() - 1 {
                let strict = logconcave_at(&t, n).unwrap().is_positive()
                    && logconcave_at(&t, n + 1).unwrap().is_positive();
                if strict && turan3_at(&t, n).unwrap().is_positive() {
                    prop_assert!(jensen_hyperbolic(&t, 3, n - 1).unwrap());
                }
            }
        }
    }
}
