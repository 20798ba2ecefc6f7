use rug::Integer;

use super::VerifyError;
use crate::eta::PartitionTable;
use crate::poly::SturmChain;

/// Coefficients of J^{d,n}(X) = Σ_j C(d,j) Δ(n+j) X^j, ascending.
pub fn jensen_poly(table: &PartitionTable, d: u32, n: usize) -> Result<Vec<Integer>, VerifyError> {
    if d == 0 {
        return Err(VerifyError::ZeroDegree);
    }
    let hi = table.n_max().checked_sub(d as usize);
    if hi.map_or(true, |h| n > h) {
        return Err(VerifyError::OutOfRange { n, lo: 0, hi: hi.unwrap_or(0) });
    }
    Ok((0..=d)
        .map(|j| Integer::from(Integer::binomial_u(d, j)) * &table.coeffs()[n + j as usize])
        .collect())
}

/// True iff every root of J^{d,n} is real. The squarefree part has the same
/// distinct roots, so it suffices that all of them are real.
pub fn jensen_hyperbolic(table: &PartitionTable, d: u32, n: usize) -> Result<bool, VerifyError> {
    let p = jensen_poly(table, d, n)?;
    let chain = SturmChain::new(&p);
    Ok(chain.count_real() == chain.degree())
}

/// Least n* such that J^{d,n} is hyperbolic for all n in n*..=to_n, or
/// `None` if it fails at `to_n`.
pub fn jensen_threshold(table: &PartitionTable, d: u32, to_n: usize) -> Result<Option<usize>, VerifyError> {
    jensen_poly(table, d, to_n)?;
    let mut n = to_n;
    if !jensen_hyperbolic(table, d, n)? {
        return Ok(None);
    }
    while n > 0 && jensen_hyperbolic(table, d, n - 1)? {
        n -= 1;
    }
    Ok(Some(n))
}
