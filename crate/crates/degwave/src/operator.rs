//! The discrete divergence-form operator A_lambda y = sigma (eta y')' +
//! lambda y / d and its basic identities (self-adjointness in 1/sigma,
//! resolvent solves).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::TridiagFactor;

/// A_lambda on homogeneous Dirichlet interior vectors:
/// (A y)_i = sigma_i [eta_{i+1/2}(y_{i+1} - y_i) - eta_{i-1/2}(y_i - y_{i-1})] / h^2
///           + lambda y_i / d_i.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid: Arc<Grid>,
    pub lambda: f64,
}

impl DiscreteOperator {
    pub fn new(grid: Arc<Grid>, lambda: f64) -> Self {
        Self { grid, lambda }
    }

    /// Apply the full operator A_lambda.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.apply_a0(y)?;
        if self.lambda != 0.0 {
            let g = &self.grid;
            for i in 0..g.n {
                // lambda / d = lambda * (1/(sigma d)) * sigma
                out[i] += self.lambda * g.inv_sigma_d[i] * g.sigma[i] * y[i];
            }
        }
        Ok(out)
    }

    /// Apply the drift-free divergence part A_0 y = sigma (eta y')'.
    pub fn apply_a0(&self, y: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        let n = g.n;
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: y.len(),
            });
        }
        let h2 = g.h * g.h;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { y[i - 1] };
            let right = if i == n - 1 { 0.0 } else { y[i + 1] };
            out[i] = g.sigma[i]
                * (g.eta_mid[i + 1] * (right - y[i]) - g.eta_mid[i] * (y[i] - left))
                / h2;
        }
        Ok(out)
    }

    /// Tridiagonal entries of A_lambda (sub, diag, super), row-scaled form.
    pub fn tridiag(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let n = g.n;
        let h2 = g.h * g.h;
        let mut lower = vec![0.0; n - 1];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n - 1];
        for i in 0..n {
            diag[i] = -g.sigma[i] * (g.eta_mid[i] + g.eta_mid[i + 1]) / h2
                + self.lambda * g.inv_sigma_d[i] * g.sigma[i];
            if i + 1 < n {
                upper[i] = g.sigma[i] * g.eta_mid[i + 1] / h2;
                lower[i] = g.sigma[i + 1] * g.eta_mid[i + 1] / h2;
            }
        }
        (lower, diag, upper)
    }

    /// |<A u, v>_{1/sigma} - <u, A v>_{1/sigma}| / scale for random-ish test
    /// vectors; should be at machine precision by construction.
    pub fn green_identity_defect(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let au = self.apply(u)?;
        let av = self.apply(v)?;
        let lhs = self.grid.inner_l2_sigma(&au, v)?;
        let rhs = self.grid.inner_l2_sigma(u, &av)?;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Ok((lhs - rhs).abs() / scale)
    }

    /// Solve the stationary resolvent system (mu^2 I - A_lambda) u = mu f + g
    /// and return (u, v) with v = mu u - f. Verifies the residual.
    pub fn solve_resolvent(&self, mu: f64, f: &[f64], g: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.grid.n;
        if f.len() != n || g.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: f.len().min(g.len()),
            });
        }
        let (lower, diag, upper) = self.tridiag();
        // mu^2 I - A
        let lo: Vec<f64> = lower.iter().map(|&x| -x).collect();
        let di: Vec<f64> = diag.iter().map(|&x| mu * mu - x).collect();
        let up: Vec<f64> = upper.iter().map(|&x| -x).collect();
        let rhs: Vec<f64> = (0..n).map(|i| mu * f[i] + g[i]).collect();
        let factor = TridiagFactor::new(&lo, &di, &up)?;
        let u = factor.solve(&rhs)?;
        // residual check
        let au = self.apply(&u)?;
        let mut res: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..n {
            res = res.max((mu * mu * u[i] - au[i] - rhs[i]).abs());
            scale = scale.max(rhs[i].abs());
        }
        if res / scale > 1e-10 {
            return Err(Error::SolverFailure(format!(
                "resolvent residual {res:.3e} exceeds tolerance"
            )));
        }
        let v: Vec<f64> = (0..n).map(|i| mu * u[i] - f[i]).collect();
        Ok((u, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{CoefficientProfile, CoefficientSet};
    use std::f64::consts::PI;

    fn grid_with_drift(n: usize) -> Arc<Grid> {
        let set = CoefficientSet::new(
            CoefficientProfile::power(0.5, 1.0),
            CoefficientProfile::power(0.5, 0.3),
            CoefficientProfile::power(0.5, 1.0),
            -0.2,
        )
        .unwrap();
        Grid::build(&set, n).unwrap()
    }

    #[test]
    fn green_identity_exact() {
        let g = grid_with_drift(200);
        let op = DiscreteOperator::new(g.clone(), -0.2);
        let u: Vec<f64> = g.nodes.iter().map(|&x| (PI * x).sin() + 0.3 * (3.0 * PI * x).sin()).collect();
        let v: Vec<f64> = g.nodes.iter().map(|&x| x * (1.0 - x) * (7.0 * x).cos()).collect();
        let defect = op.green_identity_defect(&u, &v).unwrap();
        assert!(defect < 1e-12, "defect {defect}");
    }

    #[test]
    fn apply_matches_tridiag() {
        let g = grid_with_drift(50);
        let op = DiscreteOperator::new(g.clone(), -0.2);
        let u: Vec<f64> = g.nodes.iter().map(|&x| x * (1.0 - x)).collect();
        let au = op.apply(&u).unwrap();
        let (lower, diag, upper) = op.tridiag();
        for i in 0..g.n {
            let mut want = diag[i] * u[i];
            if i > 0 {
                want += lower[i - 1] * u[i - 1];
            }
            if i + 1 < g.n {
                want += upper[i] * u[i + 1];
            }
            assert!((au[i] - want).abs() < 1e-9 * (1.0 + want.abs()), "row {i}");
        }
    }

    #[test]
    fn resolvent_manufactured_solution() {
        // classical case a = d = 1, lambda = 0: A = d^2/dx^2, pick
        // u = sin(pi x), mu = 1 => (mu^2 - A) u = (1 + pi^2) sin(pi x).
        let set = CoefficientSet::new(
            CoefficientProfile::constant(1.0),
            CoefficientProfile::zero(),
            CoefficientProfile::constant(1.0),
            0.0,
        )
        .unwrap();
        let g = Grid::build(&set, 999).unwrap();
        let op = DiscreteOperator::new(g.clone(), 0.0);
        let mu = 1.0;
        // choose f = 0, g_rhs = (1 + pi_h^2) sin(pi x) with the discrete
        // symbol pi_h^2 = (2 - 2 cos(pi h)) / h^2 so the check is exact
        let pih2 = (2.0 - 2.0 * (PI * g.h).cos()) / (g.h * g.h);
        let rhs: Vec<f64> = g.nodes.iter().map(|&x| (1.0 + pih2) * (PI * x).sin()).collect();
        let f = vec![0.0; g.n];
        let (u, v) = op.solve_resolvent(mu, &f, &rhs).unwrap();
        for i in 0..g.n {
            let want = (PI * g.nodes[i]).sin();
            assert!((u[i] - want).abs() < 1e-9, "node {i}: {} vs {want}", u[i]);
            assert!((v[i] - mu * u[i]).abs() < 1e-12);
        }
    }
}
