//! Tridiagonal direct solves and the symmetric tridiagonal eigenvalue
//! bisection used for the weighted Hardy-Poincare pencil.

use crate::error::{Error, Result};

/// LU factorization of a tridiagonal matrix, reusable across solves.
#[derive(Debug, Clone)]
pub struct TridiagFactor {
    n: usize,
    // forward-elimination multipliers and pivots
    mult: Vec<f64>,
    pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl TridiagFactor {
    /// Factor the matrix with sub-diagonal `lower` (len n-1), diagonal `diag`
    /// (len n) and super-diagonal `upper` (len n-1).
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: lower.len() + 1,
            });
        }
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut pivot = vec![0.0; n];
        pivot[0] = diag[0];
        for i in 1..n {
            let p = pivot[i - 1];
            if p == 0.0 || !p.is_finite() {
                return Err(Error::SolverFailure(format!(
                    "zero or non-finite pivot at row {}",
                    i - 1
                )));
            }
            mult[i - 1] = lower[i - 1] / p;
            pivot[i] = diag[i] - mult[i - 1] * upper[i - 1];
        }
        if pivot[n - 1] == 0.0 || !pivot[n - 1].is_finite() {
            return Err(Error::SolverFailure("zero pivot in last row".into()));
        }
        Ok(Self {
            n,
            mult,
            pivot,
            upper: upper.to_vec(),
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        let mut x = rhs.to_vec();
        for i in 1..self.n {
            x[i] -= self.mult[i - 1] * x[i - 1];
        }
        x[self.n - 1] /= self.pivot[self.n - 1];
        for i in (0..self.n - 1).rev() {
            x[i] = (x[i] - self.upper[i] * x[i + 1]) / self.pivot[i];
        }
        Ok(x)
    }
}

/// One-shot tridiagonal solve.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    TridiagFactor::new(lower, diag, upper)?.solve(rhs)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off)
/// strictly below `shift`, via the Sturm / LDL^T sign count.
fn sturm_count(diag: &[f64], off: &[f64], shift: f64) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut q = diag[0] - shift;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        if q == 0.0 {
            q = f64::EPSILON * (off[i - 1].abs() + 1.0);
        }
        q = diag[i] - shift - off[i - 1] * off[i - 1] / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix (diag, off) by
/// bisection on the Sturm count. Relative tolerance ~1e-13.
pub fn smallest_eigenvalue_tridiag(diag: &[f64], off: &[f64]) -> Result<f64> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::EigensolveFailure("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::EigensolveFailure("off-diagonal length mismatch".into()));
    }
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EigensolveFailure("non-finite matrix entries".into()));
    }
    // bisect for the first eigenvalue
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest generalized eigenvalue of the SPD pencil S z = mu W z, where S is
/// symmetric tridiagonal (s_diag, s_off) and W = diag(w) with w > 0.
pub fn smallest_generalized_eigenvalue(s_diag: &[f64], s_off: &[f64], w: &[f64]) -> Result<f64> {
    let n = s_diag.len();
    if w.len() != n {
        return Err(Error::EigensolveFailure("mass dimension mismatch".into()));
    }
    if w.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::EigensolveFailure("mass matrix not positive".into()));
    }
    // symmetric reduction B = W^{-1/2} S W^{-1/2}
    let inv_sqrt: Vec<f64> = w.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let diag: Vec<f64> = (0..n).map(|i| s_diag[i] * inv_sqrt[i] * inv_sqrt[i]).collect();
    let off: Vec<f64> = (0..n - 1)
        .map(|i| s_off[i] * inv_sqrt[i] * inv_sqrt[i + 1])
        .collect();
    smallest_eigenvalue_tridiag(&diag, &off)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve_matches_direct_substitution() {
        // -u'' = f discretization sanity check
        let n = 5;
        let lower = vec![-1.0; n - 1];
        let diag = vec![2.0; n];
        let upper = vec![-1.0; n - 1];
        let x_true = vec![1.0, -2.0, 3.0, 0.5, -1.5];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = 2.0 * x_true[i]
                - if i > 0 { x_true[i - 1] } else { 0.0 }
                - if i + 1 < n { x_true[i + 1] } else { 0.0 };
        }
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn smallest_eigenvalue_of_discrete_laplacian() {
        // eigenvalues of tridiag(-1,2,-1) are 2 - 2 cos(k pi /(n+1))
        let n = 100;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let expected = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let got = smallest_eigenvalue_tridiag(&diag, &off).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn generalized_eigenvalue_reduces_to_standard_with_unit_mass() {
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let w = vec![1.0; n];
        let a = smallest_eigenvalue_tridiag(&diag, &off).unwrap();
        let b = smallest_generalized_eigenvalue(&diag, &off, &w).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
