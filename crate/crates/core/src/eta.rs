//! Eta-quotient expansion and the table of Δ_k(n).
//!
//! The generating function of the broken k-diamond partitions is the eta
//! quotient
//!
//! ```text
//!   Σ Δ_k(n) q^n = ∏_{n≥1} (1-q^{2n})(1-q^{(2k+1)n}) / ((1-q^n)^3 (1-q^{(4k+2)n}))
//! ```
//!
//! [`expand_eta_quotient`] multiplies the truncated series by each binomial
//! factor in turn. [`delta_oracle_logderiv`] recomputes the same coefficients
//! from the logarithmic-derivative recurrence and shares no code with it.

use std::fmt::Write as _;

use rug::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EtaError {
    #[error("eta quotient has no factors")]
    Empty,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("exponent for modulus {0} is zero")]
    ZeroExponent(u64),
    #[error("modulus {0} appears more than once")]
    DuplicateModulus(u64),
    #[error("coefficient {n} of Δ_{k} is not positive")]
    NonPositive { k: u32, n: usize },
    #[error("coefficient 0 must be 1")]
    LeadingCoefficient,
    #[error("oracle recurrence: n·f_n not divisible by n = {0}")]
    InexactDivision(usize),
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// A finite product ∏_m ∏_{n≥1} (1 - q^{mn})^{e_m}.
///
/// Moduli are distinct and kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaQuotient {
    factors: Vec<(u64, i32)>,
}

impl EtaQuotient {
    pub fn new(mut factors: Vec<(u64, i32)>) -> Result<Self, EtaError> {
        if factors.is_empty() {
            return Err(EtaError::Empty);
        }
        factors.sort_by_key(|&(m, _)| m);
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(EtaError::DuplicateModulus(w[0].0));
            }
        }
        for &(m, e) in &factors {
            if m == 0 {
                return Err(EtaError::ZeroModulus);
            }
            if e == 0 {
                return Err(EtaError::ZeroExponent(m));
            }
        }
        Ok(EtaQuotient { factors })
    }

    /// The broken k-diamond quotient [(1,-3), (2,1), (2k+1,1), (4k+2,-1)].
    ///
    /// For k = 0 the moduli collide (2k+1 = 1, 4k+2 = 2); exponents of equal
    /// moduli are merged and cancelled factors dropped, leaving [(1,-2)].
    pub fn broken_diamond(k: u32) -> Self {
        let k = u64::from(k);
        let mut merged: Vec<(u64, i32)> = Vec::with_capacity(4);
        for (m, e) in [(1, -3), (2, 1), (2 * k + 1, 1), (4 * k + 2, -1)] {
            match merged.iter_mut().find(|(mm, _)| *mm == m) {
                Some(slot) => slot.1 += e,
                None => merged.push((m, e)),
            }
        }
        merged.retain(|&(_, e)| e != 0);
        EtaQuotient::new(merged).expect("broken diamond quotient is well formed")
    }

    /// The partition generating function 1/(q;q)_∞.
    pub fn partitions() -> Self {
        EtaQuotient { factors: vec![(1, -1)] }
    }

    pub fn factors(&self) -> &[(u64, i32)] {
        &self.factors
    }
}

/// First `n_max + 1` coefficients of the eta quotient.
///
/// Multiplying by (1 - q^t) is a backward difference pass, dividing by it is
/// a forward running sum. Factors with positive exponent are applied first so
/// the divisions act on the already reduced series.
pub fn expand_eta_quotient(quotient: &EtaQuotient, n_max: usize) -> Vec<Integer> {
    let mut c = vec![Integer::new(); n_max + 1];
    c[0] = Integer::from(1);

    let mut order: Vec<(u64, i32)> = quotient.factors.clone();
    order.sort_by_key(|&(m, e)| (e < 0, m));

    for (m, e) in order {
        let m = m as usize;
        if m > n_max {
            continue;
        }
        for t in (m..=n_max).step_by(m) {
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    multiply_one_minus(&mut c, t);
                } else {
                    divide_one_minus(&mut c, t);
                }
            }
        }
    }
    c
}

fn multiply_one_minus(c: &mut [Integer], t: usize) {
    for i in (t..c.len()).rev() {
        let (lo, hi) = c.split_at_mut(i);
        hi[0] -= &lo[i - t];
    }
}

fn divide_one_minus(c: &mut [Integer], t: usize) {
    for i in t..c.len() {
        let (lo, hi) = c.split_at_mut(i);
        hi[0] += &lo[i - t];
    }
}

/// Coefficients of an eta quotient by the recurrence n·f_n = Σ_{j=1}^n w_j f_{n-j},
/// with w_j = -Σ_m e_m · (sum of divisors t of j with m | t).
pub fn eta_oracle_logderiv(quotient: &EtaQuotient, n_max: usize) -> Result<Vec<Integer>, EtaError> {
    // sigma[j] = sum of divisors of j
    let mut sigma = vec![0i64; n_max + 1];
    for d in 1..=n_max {
        for j in (d..=n_max).step_by(d) {
            sigma[j] += d as i64;
        }
    }
    let mut w = vec![0i64; n_max + 1];
    for &(m, e) in quotient.factors() {
        let m = m as usize;
        if m > n_max {
            continue;
        }
        // divisors t of j with m | t are m·d for d | (j/m)
        for j in (m..=n_max).step_by(m) {
            w[j] -= i64::from(e) * (m as i64) * sigma[j / m];
        }
    }

    let mut f: Vec<Integer> = Vec::with_capacity(n_max + 1);
    f.push(Integer::from(1));
    for n in 1..=n_max {
        let mut acc = Integer::new();
        for j in 1..=n {
            if w[j] != 0 {
                acc += &f[n - j] * w[j];
            }
        }
        let divisor = n as u32;
        if !acc.is_divisible_u(divisor) {
            return Err(EtaError::InexactDivision(n));
        }
        acc.div_exact_u_mut(divisor);
        f.push(acc);
    }
    Ok(f)
}

/// Δ_k(0..=n_max) via the logarithmic-derivative recurrence.
pub fn delta_oracle_logderiv(k: u32, n_max: usize) -> Result<Vec<Integer>, EtaError> {
    eta_oracle_logderiv(&EtaQuotient::broken_diamond(k), n_max)
}

/// Exact values Δ_k(0..=N). Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTable {
    k: u32,
    coeffs: Vec<Integer>,
}

impl PartitionTable {
    /// Wraps an arbitrary positive sequence starting at 1, e.g. for checks on
    /// synthetic data.
    pub fn from_coeffs(k: u32, coeffs: Vec<Integer>) -> Result<Self, EtaError> {
        match coeffs.first() {
            Some(c0) if *c0 == 1 => {}
            _ => return Err(EtaError::LeadingCoefficient),
        }
        if let Some(n) = coeffs.iter().position(|c| c.cmp0().is_le()) {
            return Err(EtaError::NonPositive { k, n });
        }
        Ok(PartitionTable { k, coeffs })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Largest index N held by the table.
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn get(&self, n: usize) -> Option<&Integer> {
        self.coeffs.get(n)
    }

    /// Table restricted to indices 0..=n_max.
    pub fn truncated(&self, n_max: usize) -> PartitionTable {
        let n = n_max.min(self.n_max());
        PartitionTable { k: self.k, coeffs: self.coeffs[..=n].to_vec() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,delta\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{n},{c}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableJson::from(self)).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, EtaError> {
        let raw: TableJson =
            serde_json::from_str(s).map_err(|e| EtaError::Malformed(e.to_string()))?;
        if raw.coeffs.len() != raw.n_max + 1 {
            return Err(EtaError::Malformed(format!(
                "N = {} but {} coefficients",
                raw.n_max,
                raw.coeffs.len()
            )));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| s.parse::<Integer>().map_err(|e| EtaError::Malformed(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        PartitionTable::from_coeffs(raw.k, coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    k: u32,
    #[serde(rename = "N")]
    n_max: usize,
    coeffs: Vec<String>,
}

impl From<&PartitionTable> for TableJson {
    fn from(t: &PartitionTable) -> Self {
        TableJson {
            k: t.k,
            n_max: t.n_max(),
            coeffs: t.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }
}

/// Δ_k(0..=n_max) by eta-quotient expansion, with the positivity invariant
/// checked before returning.
pub fn delta_table(k: u32, n_max: usize) -> Result<PartitionTable, EtaError> {
    let coeffs = expand_eta_quotient(&EtaQuotient::broken_diamond(k), n_max);
    PartitionTable::from_coeffs(k, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn partition_numbers() {
        let p = expand_eta_quotient(&EtaQuotient::partitions(), 5);
        assert_eq!(p, ints(&[1, 1, 2, 3, 5, 7]));
        let oracle = eta_oracle_logderiv(&EtaQuotient::partitions(), 10).unwrap();
        assert_eq!(oracle, ints(&[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]));
    }

    #[test]
    fn k1_spec_by_hand() {
        let quotient = EtaQuotient::new(vec![(1, -3), (2, 1), (3, 1), (6, -1)]).unwrap();
        assert_eq!(expand_eta_quotient(&quotient, 3), ints(&[1, 3, 8, 18]));
        assert_eq!(quotient, EtaQuotient::broken_diamond(1));
    }

    #[test]
    fn single_positive_factor() {
        let quotient = EtaQuotient::new(vec![(2, 1)]).unwrap();
        assert_eq!(expand_eta_quotient(&quotient, 2), ints(&[1, 0, -1]));
        assert_eq!(eta_oracle_logderiv(&quotient, 2).unwrap(), ints(&[1, 0, -1]));
    }

    #[test]
    fn small_delta_values() {
        assert_eq!(delta_table(1, 3).unwrap().coeffs(), ints(&[1, 3, 8, 18]).as_slice());
        assert_eq!(delta_table(2, 3).unwrap().coeffs(), ints(&[1, 3, 8, 19]).as_slice());
        assert_eq!(delta_table(1, 0).unwrap().coeffs(), ints(&[1]).as_slice());
        assert_eq!(delta_oracle_logderiv(2, 0).unwrap(), ints(&[1]));
        assert_eq!(delta_oracle_logderiv(1, 3).unwrap(), ints(&[1, 3, 8, 18]));
    }

    #[test]
    fn k0_merges_colliding_moduli() {
        assert_eq!(EtaQuotient::broken_diamond(0).factors(), &[(1, -2)]);
        // 1/(q;q)^2: 1, 2, 5, 10, 20, 36
        assert_eq!(delta_table(0, 5).unwrap().coeffs(), ints(&[1, 2, 5, 10, 20, 36]).as_slice());
    }

    #[test]
    fn spec_validation() {
        assert_eq!(EtaQuotient::new(vec![]), Err(EtaError::Empty));
        assert_eq!(
            EtaQuotient::new(vec![(2, 1), (2, -1)]),
            Err(EtaError::DuplicateModulus(2))
        );
        assert_eq!(EtaQuotient::new(vec![(0, 1)]), Err(EtaError::ZeroModulus));
        assert_eq!(EtaQuotient::new(vec![(3, 0)]), Err(EtaError::ZeroExponent(3)));
        let sorted = EtaQuotient::new(vec![(6, -1), (1, -3), (3, 1), (2, 1)]).unwrap();
        assert_eq!(sorted.factors(), &[(1, -3), (2, 1), (3, 1), (6, -1)]);
    }

    #[test]
    fn wrong_weights_are_caught() {
        // A negative exponent on the recurrence side with doubled weight
        // produces non-integral coefficients almost immediately.
        let quotient = EtaQuotient::new(vec![(1, -1)]).unwrap();
        let ok = eta_oracle_logderiv(&quotient, 20);
        assert!(ok.is_ok());
        let half = EtaQuotient { factors: vec![(2, 1), (1, -1)] };
        // (q^2;q^2)/(q;q) counts partitions into odd parts; still integral.
        assert!(eta_oracle_logderiv(&half, 30).is_ok());
    }

    #[test]
    fn table_rejects_bad_sequences() {
        assert_eq!(
            PartitionTable::from_coeffs(1, ints(&[2, 3])),
            Err(EtaError::LeadingCoefficient)
        );
        assert_eq!(
            PartitionTable::from_coeffs(1, ints(&[1, 0, 2])),
            Err(EtaError::NonPositive { k: 1, n: 1 })
        );
    }

    #[test]
    fn exports() {
        let t = delta_table(2, 3).unwrap();
        assert_eq!(t.to_json(), r#"{"k":2,"N":3,"coeffs":["1","3","8","19"]}"#);
        assert_eq!(t.to_csv(), "n,delta\n0,1\n1,3\n2,8\n3,19\n");
        assert_eq!(PartitionTable::from_json(&t.to_json()).unwrap(), t);
        assert!(PartitionTable::from_json(r#"{"k":2,"N":4,"coeffs":["1"]}"#).is_err());
    }

    #[test]
    fn truncation_is_prefix() {
        let t = delta_table(1, 40).unwrap();
        assert_eq!(t.truncated(10), delta_table(1, 10).unwrap());
    }
}
