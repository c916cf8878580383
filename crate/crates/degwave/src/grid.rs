//! Uniform spatial grid carrying the weights eta, sigma and the discrete
//! inner products of the weighted functional setting, plus Hardy-Poincare
//! constant estimation.

use std::sync::Arc;

use crate::coefficients::{CoefficientSet, DegClass};
use crate::error::{Error, Result};
use crate::linalg::smallest_generalized_eigenvalue;
use crate::quadrature::integrate_log_refined;

/// Uniform grid with `n` interior nodes x_i = i h, h = 1/(n+1), carrying all
/// precomputed weights. Midpoint weights are laid out so that the discrete
/// divergence-form operator is exactly self-adjoint in the 1/sigma inner
/// product.
#[derive(Debug, Clone)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    /// interior node coordinates x_1 .. x_n
    pub nodes: Vec<f64>,
    /// eta at interior nodes
    pub eta_nodes: Vec<f64>,
    /// eta at cell midpoints x_{j+1/2}, j = 0..=n (length n+1)
    pub eta_mid: Vec<f64>,
    /// sigma = a / eta at interior nodes
    pub sigma: Vec<f64>,
    /// 1 / sigma at interior nodes
    pub inv_sigma: Vec<f64>,
    /// 1 / (sigma d) at interior nodes
    pub inv_sigma_d: Vec<f64>,
    /// eta(1)
    pub eta_right: f64,
    /// a(1)
    pub a_right: f64,
    pub lambda: f64,
}

impl Grid {
    /// Build the grid by cumulative integration of b/a between consecutive
    /// half-nodes, anchored at eta(1/2) = 1.
    pub fn build(set: &CoefficientSet, n: usize) -> Result<Arc<Grid>> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 interior nodes, got {n}"
            )));
        }
        let h = 1.0 / (n + 1) as f64;
        // eta at all half-integer multiples of h/2 from h/2 up to 1, i.e.
        // points p_k = (k+1) h/2 for k = 0 .. 2n+1: interleaves midpoints and
        // nodes. Integrate b/a cumulatively over each short segment.
        let npts = 2 * n + 2;
        let mut expo = vec![0.0f64; npts];
        let quot = |s: f64| set.drift_quotient(s);
        let point = |k: usize| (k + 1) as f64 * h / 2.0;
        // first segment: from near 0 to h/2 (skip if b = 0 everywhere there)
        expo[0] = integrate_log_refined(&quot, 1e-14, point(0), 1e-12);
        for k in 1..npts {
            expo[k] = expo[k - 1] + integrate_log_refined(&quot, point(k - 1), point(k), 1e-12);
        }
        // re-anchor so that eta(1/2) = 1; x = 1/2 is p_k with k = n (when n
        // is odd the point set contains 1/2 exactly only for suitable n, so
        // interpolate the exponent linearly instead)
        let anchor = {
            let t = 0.5 / (h / 2.0) - 1.0; // fractional index of x = 1/2
            let k0 = t.floor() as usize;
            let frac = t - k0 as f64;
            if k0 + 1 < npts {
                expo[k0] * (1.0 - frac) + expo[k0 + 1] * frac
            } else {
                expo[npts - 1]
            }
        };
        for e in expo.iter_mut() {
            *e -= anchor;
        }

        let mut nodes = Vec::with_capacity(n);
        let mut eta_nodes = Vec::with_capacity(n);
        let mut eta_mid = Vec::with_capacity(n + 1);
        for i in 1..=n {
            nodes.push(i as f64 * h);
            // node x_i = i h is point index 2i - 1
            eta_nodes.push(expo[2 * i - 1].exp());
        }
        for j in 0..=n {
            // midpoint x_{j+1/2} = (j + 1/2) h is point index 2j
            eta_mid.push(expo[2 * j].exp());
        }
        let eta_right = expo[npts - 1].exp();

        let mut sigma = Vec::with_capacity(n);
        let mut inv_sigma = Vec::with_capacity(n);
        let mut inv_sigma_d = Vec::with_capacity(n);
        for i in 0..n {
            let x = nodes[i];
            let a = set.a.value_at(x);
            if a <= 0.0 {
                return Err(Error::NotPositive { x, value: a });
            }
            let s = a / eta_nodes[i];
            sigma.push(s);
            inv_sigma.push(1.0 / s);
            let d = set.d.value_at(x);
            if d <= 0.0 {
                return Err(Error::NotPositive { x, value: d });
            }
            inv_sigma_d.push(1.0 / (s * d));
        }

        Ok(Arc::new(Grid {
            n,
            h,
            nodes,
            eta_nodes,
            eta_mid,
            sigma,
            inv_sigma,
            inv_sigma_d,
            eta_right,
            a_right: set.a.value_at(1.0),
            lambda: set.lambda,
        }))
    }

    /// L^2_{1/sigma} inner product of interior vectors.
    pub fn inner_l2_sigma(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        self.check_len(v)?;
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += u[i] * v[i] * self.inv_sigma[i];
        }
        Ok(acc * self.h)
    }

    /// Weighted H^1_0 stiffness form int eta u' v' (homogeneous Dirichlet at
    /// both ends).
    pub fn stiffness_eta(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        self.check_len(v)?;
        let n = self.n;
        let mut acc = self.eta_mid[0] * u[0] * v[0];
        for j in 1..n {
            acc += self.eta_mid[j] * (u[j] - u[j - 1]) * (v[j] - v[j - 1]);
        }
        acc += self.eta_mid[n] * u[n - 1] * v[n - 1];
        Ok(acc / self.h)
    }

    /// Singular inner product int u v / (sigma d).
    pub fn inner_sigma_d(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        self.check_len(v)?;
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += u[i] * v[i] * self.inv_sigma_d[i];
        }
        Ok(acc * self.h)
    }

    /// Norm induced by the lambda-shifted form stiff - lambda * inner_sigma_d.
    /// Errors with `NegativeSquare` if the form is not positive on `u`.
    pub fn norm_h1_lambda(&self, u: &[f64], lambda: f64) -> Result<f64> {
        let q = self.stiffness_eta(u, u)? - lambda * self.inner_sigma_d(u, u)?;
        if q < -1e-13 {
            return Err(Error::NegativeSquare(q));
        }
        Ok(q.max(0.0).sqrt())
    }

    /// Tridiagonal entries (diag, sub/super) of the eta-stiffness matrix.
    pub fn stiffness_tridiag(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n - 1);
        for i in 0..n {
            diag.push((self.eta_mid[i] + self.eta_mid[i + 1]) / self.h);
            if i + 1 < n {
                off.push(-self.eta_mid[i + 1] / self.h);
            }
        }
        (diag, off)
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: u.len(),
            });
        }
        Ok(())
    }
}

/// A scalar field sampled at the interior nodes of a shared grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::LengthMismatch {
                expected: grid.n,
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![0.0; grid.n];
        Self { grid, values }
    }

    /// Check two functions live on the same grid (by node count and spacing).
    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid.n != other.grid.n {
            return Err(Error::GridMismatch {
                left: self.grid.n,
                right: other.grid.n,
            });
        }
        Ok(())
    }
}

/// Discrete Hardy-Poincare constant on the given grid: the reciprocal of the
/// smallest eigenvalue of the eta-stiffness pencil against the singular mass
/// diag(h / (sigma d)).
pub fn estimate_chp(grid: &Grid) -> Result<f64> {
    let (diag, off) = grid.stiffness_tridiag();
    let w: Vec<f64> = grid.inv_sigma_d.iter().map(|&q| q * grid.h).collect();
    let mu = smallest_generalized_eigenvalue(&diag, &off, &w)?;
    if mu <= 0.0 {
        return Err(Error::EigensolveFailure(format!(
            "nonpositive leading eigenvalue {mu}"
        )));
    }
    Ok(1.0 / mu)
}

/// Hardy-Poincare constant with one Richardson step in 1/ln n: computes the
/// discrete constant on the grid and on a half-resolution grid and
/// extrapolates. Critical cases (a = d = x) converge only logarithmically in
/// n; the extrapolation recovers the continuum value there while leaving
/// already-converged cases essentially untouched.
pub fn estimate_chp_extrapolated(set: &CoefficientSet, n: usize) -> Result<f64> {
    let n_coarse = n / 2;
    let g_fine = Grid::build(set, n)?;
    let g_coarse = Grid::build(set, n_coarse)?;
    let c_fine = estimate_chp(&g_fine)?;
    let c_coarse = estimate_chp(&g_coarse)?;
    let l_fine = 1.0 / (n as f64).ln();
    let l_coarse = 1.0 / (n_coarse as f64).ln();
    let extrapolated = c_fine + (c_fine - c_coarse) * l_fine / (l_coarse - l_fine);
    Ok(extrapolated)
}

/// Closed-form upper bound 4 max eta / (a(1) d(1) min eta), valid when both a
/// and d are degenerate at 0 (class WD or SD). Errors with `ClassRequired`
/// otherwise.
pub fn chp_closed_form_bound(set: &CoefficientSet) -> Result<f64> {
    use crate::coefficients::degeneracy_summary;
    let (_, ca) = degeneracy_summary(&set.a);
    let (_, cd) = degeneracy_summary(&set.d);
    if ca == DegClass::None || cd == DegClass::None {
        return Err(Error::ClassRequired);
    }
    let grid = Grid::build(set, 1024)?;
    let mut eta_max = grid.eta_right;
    let mut eta_min = grid.eta_right;
    for &e in grid.eta_nodes.iter().chain(grid.eta_mid.iter()) {
        eta_max = eta_max.max(e);
        eta_min = eta_min.min(e);
    }
    let a1 = set.a.value_at(1.0);
    let d1 = set.d.value_at(1.0);
    Ok(4.0 * eta_max / (a1 * d1 * eta_min))
}
