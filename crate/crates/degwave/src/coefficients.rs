//! Coefficient triples (a, b, d), their degeneracy classification, the Feller
//! weight eta, and the drift constants M and M_inf.

use crate::error::{Error, Result};
use crate::quadrature::integrate_log_refined;

/// Cap on partial sums of |b/a| before the drift is declared non-integrable.
pub const INTEGRABILITY_CAP: f64 = 1e6;

const LOG_SAMPLE_POINTS: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// c * x^K
    PowerLaw { exponent: f64, scale: f64 },
    /// Piecewise-linear table on sorted abscissae in (0, 1].
    Tabulated { xs: Vec<f64>, gs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    pub kind: ProfileKind,
}

impl CoefficientProfile {
    pub fn power(exponent: f64, scale: f64) -> Self {
        Self {
            kind: ProfileKind::PowerLaw { exponent, scale },
        }
    }

    /// Identically-zero profile (used for b when there is no drift).
    pub fn zero() -> Self {
        Self::power(0.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::power(0.0, c)
    }

    pub fn tabulated(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(
                "tabulated profile needs at least two samples".into(),
            ));
        }
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if samples.first().unwrap().0 <= 0.0 || samples.last().unwrap().0 > 1.0 {
            return Err(Error::InvalidArgument(
                "tabulated abscissae must lie in (0, 1]".into(),
            ));
        }
        let (xs, gs) = samples.into_iter().unzip();
        Ok(Self {
            kind: ProfileKind::Tabulated { xs, gs },
        })
    }

    /// Parse a two-column CSV body (x, g(x)); `#`-prefixed lines and an
    /// optional non-numeric header row are skipped.
    pub fn from_csv_str(body: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for line in body.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(c0), Some(c1)) = (cols.next(), cols.next()) else {
                return Err(Error::InvalidArgument(format!("bad CSV row: {line}")));
            };
            match (c0.parse::<f64>(), c1.parse::<f64>()) {
                (Ok(x), Ok(g)) => samples.push((x, g)),
                _ if samples.is_empty() => continue, // header
                _ => return Err(Error::InvalidArgument(format!("bad CSV row: {line}"))),
            }
        }
        Self::tabulated(samples)
    }

    pub fn value_at(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::PowerLaw { exponent, scale } => {
                if *exponent == 0.0 {
                    *scale
                } else if x <= 0.0 {
                    0.0
                } else {
                    scale * x.powf(*exponent)
                }
            }
            ProfileKind::Tabulated { xs, gs } => {
                let n = xs.len();
                if x <= xs[0] {
                    // extrapolate the first segment, clamped at 0
                    let slope = (gs[1] - gs[0]) / (xs[1] - xs[0]);
                    return (gs[0] + slope * (x - xs[0])).max(0.0);
                }
                if x >= xs[n - 1] {
                    let slope = (gs[n - 1] - gs[n - 2]) / (xs[n - 1] - xs[n - 2]);
                    return gs[n - 1] + slope * (x - xs[n - 1]);
                }
                let j = xs.partition_point(|&p| p < x).max(1);
                let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
                gs[j - 1] + t * (gs[j] - gs[j - 1])
            }
        }
    }

    pub fn derivative_at(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::PowerLaw { exponent, scale } => {
                if *exponent == 0.0 {
                    0.0
                } else if x <= 0.0 {
                    if *exponent >= 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    scale * exponent * x.powf(exponent - 1.0)
                }
            }
            ProfileKind::Tabulated { xs, gs } => {
                let n = xs.len();
                let j = xs.partition_point(|&p| p < x).clamp(1, n - 1);
                (gs[j] - gs[j - 1]) / (xs[j] - xs[j - 1])
            }
        }
    }
}

/// The coefficient triple of u_tt = a u_xx + (lambda/d) u + b u_x along with
/// the singular-potential strength lambda.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub a: CoefficientProfile,
    pub b: CoefficientProfile,
    pub d: CoefficientProfile,
    pub lambda: f64,
}

impl CoefficientSet {
    pub fn new(
        a: CoefficientProfile,
        b: CoefficientProfile,
        d: CoefficientProfile,
        lambda: f64,
    ) -> Result<Self> {
        for (name, p) in [("a", &a), ("d", &d)] {
            for &x in &[1e-6, 1e-3, 0.1, 0.5, 1.0] {
                let v = p.value_at(x);
                if v <= 0.0 || !v.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "coefficient {name} must be positive on (0,1], got {name}({x}) = {v}"
                    )));
                }
            }
        }
        Ok(Self { a, b, d, lambda })
    }

    /// b(s)/a(s), the integrand of the Feller weight exponent.
    pub fn drift_quotient(&self, s: f64) -> f64 {
        self.b.value_at(s) / self.a.value_at(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegClass {
    /// K in (0, 1)
    Wd,
    /// K in [1, 2)
    Sd,
    /// everything else (including non-vanishing profiles)
    None,
}

impl DegClass {
    pub fn from_k(k: f64) -> Self {
        if k > 0.0 && k < 1.0 {
            DegClass::Wd
        } else if (1.0..2.0).contains(&k) {
            DegClass::Sd
        } else {
            DegClass::None
        }
    }

    pub fn is_degenerate(self) -> bool {
        !matches!(self, DegClass::None)
    }
}

impl std::fmt::Display for DegClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegClass::Wd => write!(f, "WD"),
            DegClass::Sd => write!(f, "SD"),
            DegClass::None => write!(f, "none"),
        }
    }
}

fn log_sample() -> impl Iterator<Item = f64> {
    // 2048 log-spaced points in (0, 1], from 1e-9 up to 1
    (0..LOG_SAMPLE_POINTS).map(|i| {
        let t = i as f64 / (LOG_SAMPLE_POINTS - 1) as f64;
        10f64.powf(-9.0 * (1.0 - t))
    })
}

/// Supremum of x |g'(x)| / g(x) over (0,1] and the resulting class.
///
/// Exact for power laws; for tabulated profiles the sup is estimated on a
/// log-spaced sample with centered differences.
pub fn classify_degeneracy(g: &CoefficientProfile) -> Result<(f64, DegClass)> {
    let g0 = g.value_at(0.0);
    // tolerance is relative to the overall size so tabulated approximations
    // of vanishing profiles are accepted
    let scale = g.value_at(1.0).abs().max(g.value_at(0.5).abs()).max(1e-300);
    if g0.abs() > 1e-3 * scale {
        return Err(Error::NonDegenerate(g0));
    }
    for x in log_sample() {
        let v = g.value_at(x);
        if v <= 0.0 {
            return Err(Error::NotPositive { x, value: v });
        }
    }
    let k = match &g.kind {
        ProfileKind::PowerLaw { exponent, .. } => *exponent,
        ProfileKind::Tabulated { .. } => {
            let mut sup: f64 = 0.0;
            for x in log_sample() {
                let dx = (x * 1e-4).max(1e-13);
                let gp = (g.value_at(x + dx) - g.value_at((x - dx).max(0.0))) / (2.0 * dx);
                sup = sup.max(x * gp.abs() / g.value_at(x));
            }
            sup
        }
    };
    Ok((k, DegClass::from_k(k)))
}

/// Degeneracy exponent estimated without requiring g(0) = 0 (class is None
/// when the profile does not vanish at 0). Used for reporting.
pub fn degeneracy_summary(g: &CoefficientProfile) -> (f64, DegClass) {
    match classify_degeneracy(g) {
        Ok(pair) => pair,
        Err(_) => (0.0, DegClass::None),
    }
}

/// Probe integrability of |b/a| near 0 by nested dyadic partial sums.
pub fn drift_integrable(set: &CoefficientSet, cap: f64) -> bool {
    let f = |s: f64| set.drift_quotient(s).abs();
    let mut total = 0.0;
    let mut hi = 0.5f64;
    for _ in 0..52 {
        let lo = 0.5 * hi;
        total += integrate_log_refined(&f, lo, hi, 1e-9);
        if !total.is_finite() || total > cap {
            return false;
        }
        hi = lo;
    }
    true
}

fn eta_exponent(set: &CoefficientSet, x: f64) -> Result<f64> {
    let f = |s: f64| set.drift_quotient(s);
    let x = x.clamp(0.0, 1.0);
    if (x - 0.5).abs() < f64::EPSILON {
        return Ok(0.0);
    }
    if x > 0.5 {
        Ok(integrate_log_refined(&f, 0.5, x, 1e-12))
    } else if x > 0.0 {
        Ok(-integrate_log_refined(&f, x, 0.5, 1e-12))
    } else {
        // x = 0: only meaningful if b/a is integrable
        if !drift_integrable(set, INTEGRABILITY_CAP) {
            return Err(Error::NonIntegrableDrift {
                cap: INTEGRABILITY_CAP,
            });
        }
        Ok(-integrate_log_refined(&f, 1e-14, 0.5, 1e-12))
    }
}

/// Feller weight eta(x) = exp(int_{1/2}^x b/a ds); eta(1/2) = 1.
pub fn eta(x: f64, set: &CoefficientSet) -> Result<f64> {
    Ok(eta_exponent(set, x)?.exp())
}

/// sigma(x) = a(x) / eta(x).
pub fn sigma(x: f64, set: &CoefficientSet) -> Result<f64> {
    Ok(set.a.value_at(x) / eta(x, set)?)
}

/// M = sup |b| / a(1) and, when x b / a is bounded, M_inf = sup |x b / a|.
pub fn drift_constants(set: &CoefficientSet) -> (f64, Option<f64>) {
    let a1 = set.a.value_at(1.0);
    let mut sup_b: f64 = 0.0;
    for i in 0..=2048 {
        let x = i as f64 / 2048.0;
        sup_b = sup_b.max(set.b.value_at(x).abs());
    }
    let m = sup_b / a1;

    // sample |x b / a| on the log grid; declare unbounded if the values keep
    // growing as x -> 0
    let mut sup_inf: f64 = 0.0;
    let mut sup_tail: f64 = 0.0; // over x < 1e-6
    let mut sup_bulk: f64 = 0.0; // over x >= 1e-3
    for x in log_sample() {
        let v = (x * set.b.value_at(x) / set.a.value_at(x)).abs();
        if !v.is_finite() {
            return (m, None);
        }
        sup_inf = sup_inf.max(v);
        if x < 1e-6 {
            sup_tail = sup_tail.max(v);
        }
        if x >= 1e-3 {
            sup_bulk = sup_bulk.max(v);
        }
    }
    let bounded = sup_tail <= 50.0 * sup_bulk.max(1e-300) || sup_inf == 0.0;
    (m, if bounded { Some(sup_inf) } else { None })
}

/// Degeneracy and drift summary for a coefficient set.
#[derive(Debug, Clone)]
pub struct DegeneracyReport {
    pub k_a: f64,
    pub k_d: f64,
    pub class_a: DegClass,
    pub class_d: DegClass,
    pub m: f64,
    pub m_inf: Option<f64>,
    pub b_over_a_integrable: bool,
}

pub fn degeneracy_report(set: &CoefficientSet) -> DegeneracyReport {
    let (k_a, class_a) = degeneracy_summary(&set.a);
    let (k_d, class_d) = degeneracy_summary(&set.d);
    let (m, m_inf) = drift_constants(set);
    DegeneracyReport {
        k_a,
        k_d,
        class_a,
        class_d,
        m,
        m_inf,
        b_over_a_integrable: drift_integrable(set, INTEGRABILITY_CAP),
    }
}

impl DegeneracyReport {
    /// M when K_a <= 1, M_inf when K_a > 1 (the drift constant entering the
    /// energy estimates for the active case).
    pub fn m_effective(&self) -> Option<f64> {
        if self.k_a <= 1.0 {
            Some(self.m)
        } else {
            self.m_inf
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn pass(detail: impl Into<String>) -> Self {
        Self {
            pass: true,
            detail: detail.into(),
        }
    }
    fn fail(detail: impl Into<String>) -> Self {
        Self {
            pass: false,
            detail: detail.into(),
        }
    }
}

/// Which case of the controllability hypothesis applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlCase {
    /// K_a <= 1, lambda in the negative admissible window, constant M
    NegativeLambda,
    /// K_a <= 1, lambda >= 0, constant M
    NonnegativeLambda,
    /// K_a > 1 with bounded x b / a, negative window, constant M_inf
    NegativeLambdaMInf,
    /// K_a > 1 with bounded x b / a, lambda >= 0, constant M_inf
    NonnegativeLambdaMInf,
}

impl std::fmt::Display for ControlCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ControlCase::NegativeLambda => write!(f, "lambda<0 (M)"),
            ControlCase::NonnegativeLambda => write!(f, "lambda>=0 (M)"),
            ControlCase::NegativeLambdaMInf => write!(f, "lambda<0 (M_inf)"),
            ControlCase::NonnegativeLambdaMInf => write!(f, "lambda>=0 (M_inf)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HypothesisVerdicts {
    pub report: DegeneracyReport,
    /// b/a integrable, a(0)=d(0)=0, K_a + K_d <= 2
    pub basic: Verdict,
    /// lambda < 1/C_HP
    pub lambda_admissible: Verdict,
    /// K_a + 2 K_d <= 2 (domain characterization)
    pub domain: Verdict,
    /// a and d both (WD) or (SD)
    pub classes: Verdict,
    /// K_a <= 1
    pub ka_le_one: Verdict,
    /// K_a > 1 together with bounded x b / a
    pub ka_gt_one_drift: Verdict,
    /// the controllability case that applies, if any
    pub control_case: Option<ControlCase>,
    /// failure description when no case applies
    pub control_detail: String,
}

impl HypothesisVerdicts {
    pub fn all_required_pass(&self) -> bool {
        self.basic.pass && self.lambda_admissible.pass && self.domain.pass && self.classes.pass
    }
}

/// Evaluate every structural hypothesis for the given set against the Hardy-
/// Poincare constant `chp`. Returns verdicts, never errors.
pub fn check_hypotheses(set: &CoefficientSet, chp: f64) -> HypothesisVerdicts {
    let report = degeneracy_report(set);
    let lambda = set.lambda;

    let basic = {
        let a0 = set.a.value_at(0.0);
        let d0 = set.d.value_at(0.0);
        // same relative vanishing tolerance as the classifier
        let a_scale = set.a.value_at(1.0).abs().max(1e-300);
        let d_scale = set.d.value_at(1.0).abs().max(1e-300);
        if !report.b_over_a_integrable {
            Verdict::fail("b/a is not integrable on (0,1)")
        } else if a0.abs() > 1e-3 * a_scale || d0.abs() > 1e-3 * d_scale {
            Verdict::fail(format!("a(0) = {a0}, d(0) = {d0}; both must vanish"))
        } else if report.k_a + report.k_d > 2.0 {
            Verdict::fail(format!(
                "K_a + K_d = {} > 2",
                report.k_a + report.k_d
            ))
        } else {
            Verdict::pass(format!("K_a + K_d = {} <= 2", report.k_a + report.k_d))
        }
    };

    let lambda_admissible = if lambda < 1.0 / chp {
        Verdict::pass(format!("lambda = {lambda} < 1/C_HP = {}", 1.0 / chp))
    } else {
        Verdict::fail(format!(
            "lambda = {lambda} >= 1/C_HP = {} (strict inequality required)",
            1.0 / chp
        ))
    };

    let s = report.k_a + 2.0 * report.k_d;
    let domain = if s <= 2.0 {
        Verdict::pass(format!("K_a + 2 K_d = {s} <= 2"))
    } else {
        Verdict::fail(format!("K_a + 2 K_d = {s} > 2"))
    };

    let classes = if report.class_a.is_degenerate() && report.class_d.is_degenerate() {
        Verdict::pass(format!("a is {}, d is {}", report.class_a, report.class_d))
    } else {
        Verdict::fail(format!(
            "a is {}, d is {}; both must be (WD) or (SD)",
            report.class_a, report.class_d
        ))
    };

    let ka_le_one = if report.k_a <= 1.0 {
        Verdict::pass(format!("K_a = {} <= 1", report.k_a))
    } else {
        Verdict::fail(format!("K_a = {} > 1", report.k_a))
    };

    let ka_gt_one_drift = match (report.k_a > 1.0, report.m_inf) {
        (true, Some(mi)) => Verdict::pass(format!("K_a = {} > 1, M_inf = {mi}", report.k_a)),
        (true, None) => Verdict::fail("K_a > 1 but x b / a is unbounded"),
        (false, _) => Verdict::fail(format!("K_a = {} <= 1", report.k_a)),
    };

    let (control_case, control_detail) =
        control_case(&report, lambda, chp, classes.pass && domain.pass && lambda_admissible.pass);

    HypothesisVerdicts {
        report,
        basic,
        lambda_admissible,
        domain,
        classes,
        ka_le_one,
        ka_gt_one_drift,
        control_case,
        control_detail,
    }
}

fn control_case(
    report: &DegeneracyReport,
    lambda: f64,
    chp: f64,
    prerequisites: bool,
) -> (Option<ControlCase>, String) {
    if !prerequisites {
        return (
            None,
            "structural hypotheses (classes, K_a + 2K_d <= 2, lambda < 1/C_HP) fail".into(),
        );
    }
    let (m, minf_tag) = if report.k_a <= 1.0 {
        (Some(report.m), false)
    } else {
        (report.m_inf, true)
    };
    let Some(m) = m else {
        return (None, "K_a > 1 and x b / a unbounded".into());
    };
    let ka = report.k_a;
    let kd = report.k_d;
    if lambda >= 0.0 {
        if ka + 2.0 * kd <= 2.0 - 2.0 * m {
            let case = if minf_tag {
                ControlCase::NonnegativeLambdaMInf
            } else {
                ControlCase::NonnegativeLambda
            };
            (Some(case), String::new())
        } else {
            (
                None,
                format!(
                    "K_a + 2K_d = {} > 2 - 2M = {}",
                    ka + 2.0 * kd,
                    2.0 - 2.0 * m
                ),
            )
        }
    } else {
        if ka >= 2.0 - 2.0 * m {
            return (None, format!("K_a = {ka} >= 2 - 2M = {}", 2.0 - 2.0 * m));
        }
        let window = -(2.0 - ka - 2.0 * m) / (chp * (1.0 + 1.5 * ka + kd + m));
        if lambda > window {
            let case = if minf_tag {
                ControlCase::NegativeLambdaMInf
            } else {
                ControlCase::NegativeLambda
            };
            (Some(case), String::new())
        } else {
            (
                None,
                format!("lambda = {lambda} <= admissible lower bound {window}"),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_set(lambda: f64) -> CoefficientSet {
        CoefficientSet::new(
            CoefficientProfile::power(0.5, 1.0),
            CoefficientProfile::zero(),
            CoefficientProfile::power(0.5, 1.0),
            lambda,
        )
        .unwrap()
    }

    #[test]
    fn classify_pure_powers() {
        let (k, c) = classify_degeneracy(&CoefficientProfile::power(0.5, 1.0)).unwrap();
        assert_eq!(k, 0.5);
        assert_eq!(c, DegClass::Wd);
        let (k, c) = classify_degeneracy(&CoefficientProfile::power(1.0, 1.0)).unwrap();
        assert_eq!(k, 1.0);
        assert_eq!(c, DegClass::Sd);
        let (k, c) = classify_degeneracy(&CoefficientProfile::power(2.0, 1.0)).unwrap();
        assert_eq!(k, 2.0);
        assert_eq!(c, DegClass::None);
    }

    #[test]
    fn classify_scale_invariance() {
        for scale in [0.1, 1.0, 7.3] {
            let (k, _) = classify_degeneracy(&CoefficientProfile::power(0.7, scale)).unwrap();
            assert_eq!(k, 0.7);
        }
    }

    #[test]
    fn classify_rejects_non_degenerate() {
        let err = classify_degeneracy(&CoefficientProfile::constant(1.0)).unwrap_err();
        assert!(matches!(err, Error::NonDegenerate(_)));
    }

    #[test]
    fn classify_tabulated_power_estimate() {
        // table of x^{0.5} on a log grid
        let samples: Vec<(f64, f64)> = (0..400)
            .map(|i| {
                let t = i as f64 / 399.0;
                let x = 10f64.powf(-6.0 * (1.0 - t));
                (x, x.sqrt())
            })
            .collect();
        let p = CoefficientProfile::tabulated(samples).unwrap();
        let (k, c) = classify_degeneracy(&p).unwrap();
        assert!((k - 0.5).abs() < 0.05, "k = {k}");
        assert_eq!(c, DegClass::Wd);
    }

    #[test]
    fn eta_trivial_cases() {
        let set = sqrt_set(0.0);
        assert_eq!(eta(0.5, &set).unwrap(), 1.0);
        assert_eq!(eta(1.0, &set).unwrap(), 1.0); // b = 0
        assert_eq!(eta(0.1, &set).unwrap(), 1.0);
    }

    #[test]
    fn eta_closed_form_linear_drift() {
        // a = x, b = x: int_{1/2}^1 1 ds = 1/2
        let set = CoefficientSet::new(
            CoefficientProfile::power(1.0, 1.0),
            CoefficientProfile::power(1.0, 1.0),
            CoefficientProfile::power(1.0, 1.0),
            0.0,
        )
        .unwrap();
        let e = eta(1.0, &set).unwrap();
        assert!((e - 0.5f64.exp()).abs() < 1e-9, "eta(1) = {e}");
        let s = sigma(1.0, &set).unwrap();
        assert!((s - (-0.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn sigma_equals_a_without_drift() {
        let set = sqrt_set(0.0);
        let s = sigma(0.25, &set).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn drift_constants_examples() {
        let set = sqrt_set(0.0);
        let (m, minf) = drift_constants(&set);
        assert_eq!(m, 0.0);
        assert_eq!(minf, Some(0.0));

        // a = x, b = 1: M = 1, sup x*1/x = 1
        let set = CoefficientSet::new(
            CoefficientProfile::power(1.0, 1.0),
            CoefficientProfile::constant(1.0),
            CoefficientProfile::power(1.0, 1.0),
            0.0,
        )
        .unwrap();
        let (m, minf) = drift_constants(&set);
        assert!((m - 1.0).abs() < 1e-12);
        assert!((minf.unwrap() - 1.0).abs() < 1e-6);

        // a = b = x^{1/2}: sup x * 1 = 1
        let set = CoefficientSet::new(
            CoefficientProfile::power(0.5, 1.0),
            CoefficientProfile::power(0.5, 1.0),
            CoefficientProfile::power(0.5, 1.0),
            0.0,
        )
        .unwrap();
        let (m, minf) = drift_constants(&set);
        assert!((m - 1.0).abs() < 1e-12);
        assert!((minf.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unbounded_x_b_over_a_reported_absent() {
        // a = x^{1.5}, b = 1: x b / a = x^{-1/2} unbounded
        let set = CoefficientSet::new(
            CoefficientProfile::power(1.5, 1.0),
            CoefficientProfile::constant(1.0),
            CoefficientProfile::power(0.25, 1.0),
            0.0,
        )
        .unwrap();
        let (_, minf) = drift_constants(&set);
        assert!(minf.is_none());
    }

    #[test]
    fn hypotheses_sqrt_case() {
        let set = sqrt_set(0.0);
        let v = check_hypotheses(&set, 0.5);
        assert!(v.basic.pass); // K1 + K2 = 1
        assert!(v.domain.pass); // K1 + 2K2 = 1.5
        assert!(v.ka_le_one.pass);
        assert_eq!(v.control_case, Some(ControlCase::NonnegativeLambda));
    }

    #[test]
    fn hypotheses_domain_violation() {
        // a = x^{3/2}, d = x^{1/2}: K1 + 2K2 = 2.5 > 2
        let set = CoefficientSet::new(
            CoefficientProfile::power(1.5, 1.0),
            CoefficientProfile::zero(),
            CoefficientProfile::power(0.5, 1.0),
            0.0,
        )
        .unwrap();
        let v = check_hypotheses(&set, 0.5);
        assert!(!v.domain.pass);
    }

    #[test]
    fn hypotheses_lambda_boundary_fails() {
        let chp = 0.4;
        let set = sqrt_set(1.0 / chp);
        let v = check_hypotheses(&set, chp);
        assert!(!v.lambda_admissible.pass);
    }

    #[test]
    fn monotone_eta_for_nonnegative_drift() {
        let set = CoefficientSet::new(
            CoefficientProfile::power(0.5, 1.0),
            CoefficientProfile::power(0.5, 0.3),
            CoefficientProfile::power(0.5, 1.0),
            0.0,
        )
        .unwrap();
        let mut prev = eta(0.01, &set).unwrap();
        for i in 1..=20 {
            let x = i as f64 / 20.0;
            let e = eta(x, &set).unwrap();
            assert!(e >= prev - 1e-12);
            prev = e;
        }
    }
}
