//! Partial correlation, the Fisher z test, and a memoizing data oracle.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::graph::VertexId;
use crate::pc::{CiOracle, OracleError};
use crate::sem::Dataset;

/// Relative pivot tolerance below which a conditioning covariance is singular.
const PIVOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CiError {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("invalid test: {0}")]
    InvalidQuery(String),
    #[error("{n} samples are too few to condition on {given} variables")]
    InsufficientSamples { n: usize, given: usize },
    #[error("conditioning covariance is singular")]
    SingularConditioning,
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(String),
}

/// Sample covariance matrix of all columns (denominator `n - 1`, or `1` for one row).
pub fn covariance(d: &Dataset) -> DMatrix<f64> {
    let m = d.matrix();
    let n = m.nrows();
    let means = m.row_mean();
    let mut centered = m.clone();
    for mut row in centered.row_iter_mut() {
        row -= &means;
    }
    let denom = (n.max(2) - 1) as f64;
    (centered.transpose() * &centered) / denom
}

/// Partial correlation of `x` and `y` given `s` from a covariance matrix.
pub fn partial_correlation_cov(cov: &DMatrix<f64>, x: usize, y: usize, s: &[usize]) -> Result<f64, CiError> {
    let (sxx, syy, sxy) = if s.is_empty() {
        (cov[(x, x)], cov[(y, y)], cov[(x, y)])
    } else {
        let k = s.len();
        let sss = DMatrix::from_fn(k, k, |i, j| cov[(s[i], s[j])]);
        let chol = sss.clone().cholesky().ok_or(CiError::SingularConditioning)?;
        let l = chol.l_dirty();
        if (0..k).any(|i| l[(i, i)] * l[(i, i)] <= PIVOT_TOLERANCE * sss[(i, i)].abs().max(f64::MIN_POSITIVE)) {
            return Err(CiError::SingularConditioning);
        }
        let bx = DVector::from_fn(k, |i, _| cov[(s[i], x)]);
        let by = DVector::from_fn(k, |i, _| cov[(s[i], y)]);
        let wx = chol.solve(&bx);
        let wy = chol.solve(&by);
        (
            cov[(x, x)] - bx.dot(&wx),
            cov[(y, y)] - by.dot(&wy),
            cov[(x, y)] - bx.dot(&wy),
        )
    };
    let tiny = |resid: f64, total: f64| !(resid > PIVOT_TOLERANCE * total.abs());
    if tiny(sxx, cov[(x, x)]) || tiny(syy, cov[(y, y)]) {
        return Err(CiError::SingularConditioning);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check_ids(x: usize, y: usize, s: &[usize]) -> Result<(), CiError> {
    if x == y {
        return Err(CiError::InvalidQuery("x and y are the same variable".into()));
    }
    if s.contains(&x) || s.contains(&y) {
        return Err(CiError::InvalidQuery("conditioning set contains x or y".into()));
    }
    Ok(())
}

fn resolve(d: &Dataset, x: &str, y: &str, s: &[&str]) -> Result<(usize, usize, Vec<usize>), CiError> {
    let col = |n: &str| d.column_index(n).ok_or_else(|| CiError::UnknownColumn(n.to_string()));
    let (xi, yi) = (col(x)?, col(y)?);
    let si = s.iter().map(|n| col(n)).collect::<Result<Vec<_>, _>>()?;
    check_ids(xi, yi, &si)?;
    Ok((xi, yi, si))
}

/// Sample partial correlation of columns `x` and `y` given `s`.
pub fn partial_correlation(d: &Dataset, x: &str, y: &str, s: &[&str]) -> Result<f64, CiError> {
    let (xi, yi, si) = resolve(d, x, y, s)?;
    if d.n_samples() <= si.len() + 2 {
        return Err(CiError::InsufficientSamples {
            n: d.n_samples(),
            given: si.len(),
        });
    }
    partial_correlation_cov(&covariance(d), xi, yi, &si)
}

/// Fisher z statistic for correlation `r` from `n` samples given `k` variables.
pub fn fisher_z(r: f64, n: usize, k: usize) -> f64 {
    if r.abs() >= 1.0 {
        return f64::INFINITY;
    }
    0.5 * ((n - k - 3) as f64).sqrt() * ((1.0 + r) / (1.0 - r)).ln()
}

/// Two-sided standard-normal critical value.
pub fn critical_value(alpha: f64) -> Result<f64, CiError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CiError::InvalidAlpha(alpha.to_string()));
    }
    Ok(Normal::standard().inverse_cdf(1.0 - alpha / 2.0))
}

fn z_independent(r: f64, n: usize, k: usize, crit: f64) -> Result<bool, CiError> {
    if n <= k + 3 {
        return Err(CiError::InsufficientSamples { n, given: k });
    }
    Ok(fisher_z(r, n, k).abs() < crit)
}

/// Whether the Fisher z test accepts zero partial correlation at level `alpha`.
pub fn fisher_z_independent(d: &Dataset, x: &str, y: &str, s: &[&str], alpha: f64) -> Result<bool, CiError> {
    let crit = critical_value(alpha)?;
    let (xi, yi, si) = resolve(d, x, y, s)?;
    let n = d.n_samples();
    if n <= si.len() + 3 {
        return Err(CiError::InsufficientSamples { n, given: si.len() });
    }
    let r = partial_correlation_cov(&covariance(d), xi, yi, &si)?;
    z_independent(r, n, si.len(), crit)
}

/// Fisher z oracle over a dataset. Answers are memoized per unordered pair
/// and conditioning set; singular conditioning counts as dependence.
#[derive(Debug)]
pub struct DataOracle {
    names: Vec<String>,
    n: usize,
    cov: DMatrix<f64>,
    critical: f64,
    memo: Mutex<HashMap<(VertexId, VertexId, Vec<VertexId>), bool>>,
    queries: AtomicU64,
    computations: AtomicU64,
    singular: AtomicU64,
}

impl DataOracle {
    /// Columns are sorted by name so ids agree with graphs over the same names.
    pub fn new(d: &Dataset, alpha: f64) -> Result<DataOracle, CiError> {
        let critical = critical_value(alpha)?;
        let d = d.sorted_by_name();
        Ok(DataOracle {
            names: d.columns().to_vec(),
            n: d.n_samples(),
            cov: covariance(&d),
            critical,
            memo: Mutex::new(HashMap::new()),
            queries: AtomicU64::new(0),
            computations: AtomicU64::new(0),
            singular: AtomicU64::new(0),
        })
    }

    /// Distinct tests actually computed.
    pub fn computations(&self) -> u64 {
        self.computations.load(Ordering::Relaxed)
    }

    /// Tests that hit a singular conditioning set.
    pub fn singular_count(&self) -> u64 {
        self.singular.load(Ordering::Relaxed)
    }

    fn compute(&self, x: VertexId, y: VertexId, s: &[VertexId]) -> Result<bool, CiError> {
        check_ids(x, y, s)?;
        if self.n <= s.len() + 3 {
            return Err(CiError::InsufficientSamples { n: self.n, given: s.len() });
        }
        match partial_correlation_cov(&self.cov, x, y, s) {
            Ok(r) => z_independent(r, self.n, s.len(), self.critical),
            Err(CiError::SingularConditioning) => {
                self.singular.fetch_add(1, Ordering::Relaxed);
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }
}

impl CiOracle for DataOracle {
    fn variables(&self) -> &[String] {
        &self.names
    }

    fn independent(&self, x: VertexId, y: VertexId, given: &[VertexId]) -> Result<bool, OracleError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let p = self.names.len();
        if x >= p || y >= p || given.iter().any(|&v| v >= p) {
            return Err(OracleError("variable id out of range".into()));
        }
        let mut s = given.to_vec();
        s.sort_unstable();
        let key = (x.min(y), x.max(y), s);
        if let Some(&ans) = self.memo.lock().unwrap().get(&key) {
            return Ok(ans);
        }
        let ans = self
            .compute(key.0, key.1, &key.2)
            .map_err(|e| OracleError(e.to_string()))?;
        self.computations.fetch_add(1, Ordering::Relaxed);
        self.memo.lock().unwrap().insert(key, ans);
        Ok(ans)
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Convenience constructor matching [`DataOracle::new`].
pub fn ci_oracle_from_data(d: &Dataset, alpha: f64) -> Result<DataOracle, CiError> {
    DataOracle::new(d, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                vec![t.sin(), (1.3 * t).cos() + 0.2 * t.sin(), (0.7 * t).sin() * 2.0, t.sin()]
            })
            .collect();
        Dataset::new(vec!["A".into(), "B".into(), "C".into(), "D".into()], &rows).unwrap()
    }

    #[test]
    fn duplicate_column_has_unit_correlation() {
        let d = small();
        assert!((partial_correlation(&d, "A", "D", &[]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            partial_correlation(&d, "A", "B", &["D"]),
            Err(CiError::SingularConditioning)
        );
    }

    #[test]
    fn z_edge_cases() {
        assert_eq!(fisher_z(0.0, 100, 2), 0.0);
        assert!(fisher_z(1.0, 100, 2).is_infinite());
        assert!(fisher_z_independent(&small(), "A", "D", &[], 0.999).is_ok_and(|ind| !ind));
        assert!(matches!(critical_value(0.0), Err(CiError::InvalidAlpha(_))));
        assert!((critical_value(0.05).unwrap() - 1.959963984540054).abs() < 1e-9);
    }

    #[test]
    fn sample_size_checks() {
        let rows = vec![vec![1.0, 2.0, 0.5], vec![2.0, 1.0, 0.1], vec![3.0, 5.0, 0.2], vec![0.0, 1.0, 0.9]];
        let d = Dataset::new(vec!["A".into(), "B".into(), "C".into()], &rows).unwrap();
        assert!(matches!(
            fisher_z_independent(&d, "A", "B", &["C"], 0.05),
            Err(CiError::InsufficientSamples { .. })
        ));
        assert!(matches!(
            partial_correlation(&d, "A", "Q", &[]),
            Err(CiError::UnknownColumn(_))
        ));
    }

    #[test]
    fn memo_counts_one_computation() {
        let o = DataOracle::new(&small(), 0.05).unwrap();
        let a = o.independent(0, 1, &[2]).unwrap();
        let b = o.independent(1, 0, &[2]).unwrap();
        assert_eq!(a, b);
        assert_eq!(o.query_count(), 2);
        assert_eq!(o.computations(), 1);
        assert!(!o.independent(0, 1, &[3]).unwrap());
        assert_eq!(o.singular_count(), 1);
    }
}
