//! Adaptive quadrature helpers. The drift weight eta requires integrating
//! b/a, which is only L^1 near the degeneracy point, so intervals touching 0
//! are split on a geometric (log-spaced) partition first.

/// Adaptive Simpson on [a, b] for a smooth integrand.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let whole = simpson(f, a, b);
    recurse(f, a, b, whole, tol, 40)
}

/// Integral of f over [lo, hi] with 0 < lo < hi, refining geometrically
/// toward the left endpoint (the integrand may blow up integrably at 0).
pub fn integrate_log_refined<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    assert!(lo > 0.0 && hi >= lo);
    if hi == lo {
        return 0.0;
    }
    // geometric partition lo, 2lo, 4lo, ..., hi
    let mut total = 0.0;
    let mut a = lo;
    while a < hi {
        let b = (2.0 * a).min(hi);
        total += adaptive_simpson(f, a, b, tol * (b - a) / (hi - lo));
        a = b;
    }
    total
}
