use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::MetricSpace;

/// Constants `(A, α)` of the upper bound `d_t ≤ A·exp(α ρ)`.
pub const UPPER_DISTORTION: (f64, f64) = (1.0, 0.5);
/// Constants `(B, β)` of the lower bound `B·exp(β ρ) ≤ d_t`, audited for `ρ ≥ 1`.
pub const LOWER_DISTORTION: (f64, f64) = (0.5, 0.5);
/// Ambient distance from which the lower bound is audited.
pub const LOWER_DISTORTION_FROM: f64 = 1.0;

/// A point `(v, t)` of `K × [1, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoroPoint {
    pub vertex: usize,
    pub level: f64,
}

impl HoroPoint {
    pub fn new(vertex: usize, level: f64) -> Self {
        HoroPoint { vertex, level }
    }
}

/// Distance in `C(K)` between `(v, t)` and `(w, t')` with `d₁(v, w) = n`.
///
/// A chain of edge strips along a geodesic of `K` develops isometrically onto
/// `[0, n] × [1, ∞)` in the upper half-plane, with level `t` at height
/// `e^{t-1}`. The distance is therefore the hyperbolic distance between
/// `(0, e^{t-1})` and `(n, e^{t'-1})`, written here as
/// `2·asinh(√((n/2)²·e^{2-t-t'} + sinh²((t-t')/2)))`.
pub fn horoball_rho(n: f64, t: f64, t2: f64) -> f64 {
    if n == 0.0 {
        return (t - t2).abs();
    }
    let half = n / 2.0;
    let s = ((t - t2) / 2.0).sinh();
    let x = half * half * (2.0 - t - t2).exp() + s * s;
    2.0 * x.sqrt().asinh()
}

/// Highest level reached by the geodesic between `(v, t)` and `(w, t')`.
pub fn geodesic_apex_level(n: f64, t: f64, t2: f64) -> f64 {
    if n == 0.0 {
        return t.max(t2);
    }
    // semicircle through (0, h) and (n, h') centred on the real axis
    let (h, h2) = ((t - 1.0).exp(), (t2 - 1.0).exp());
    let c = (n * n + h2 * h2 - h * h) / (2.0 * n);
    if (0.0..=n).contains(&c) {
        1.0 + (c * c + h * h).sqrt().ln()
    } else {
        t.max(t2)
    }
}

/// Horizontal `d₁` reach of the ball `B((·, t), r)` on level `t'`: the
/// largest `n` with `horoball_rho(n, t, t') ≤ r`, or `None` if the level is
/// out of reach.
pub fn level_reach(t: f64, t2: f64, r: f64) -> Option<f64> {
    let a = (r / 2.0).sinh();
    let b = ((t - t2) / 2.0).sinh();
    let slack = a * a - b * b;
    if slack < -1e-12 {
        return None;
    }
    Some(2.0 * (slack.max(0.0) * (t + t2 - 2.0).exp()).sqrt())
}

/// The combinatorial horoball `C(K)` over a graph metric `d₁`, truncated to
/// levels `[1, T]`.
///
/// Queries whose geodesic would climb above `T` are rejected rather than
/// answered with the truncated space's longer distance.
#[derive(Clone, Debug)]
pub struct HoroballSpace<B> {
    base: B,
    truncation: f64,
}

/// Result of auditing the exponential distortion of one horosphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionReport {
    pub level: f64,
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    /// `max |d_t − 2·sinh(ρ/2)|`.
    pub identity_max_residual: f64,
    pub upper_constants: (f64, f64),
    pub upper_violations: usize,
    pub upper_max_violation: f64,
    pub lower_constants: (f64, f64),
    pub lower_pairs_checked: usize,
    pub lower_violations: usize,
    pub lower_max_violation: f64,
}

impl DistortionReport {
    pub fn passed(&self, identity_tol: f64) -> bool {
        self.upper_violations == 0
            && self.lower_violations == 0
            && self.identity_max_residual <= identity_tol
    }
}

impl<B: MetricSpace> HoroballSpace<B> {
    pub fn new(base: B, truncation: f64) -> Result<Self> {
        if !(truncation >= 1.0) {
            return Err(Error::Domain(format!(
                "truncation {truncation} is below level 1"
            )));
        }
        Ok(HoroballSpace { base, truncation })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    fn check_level(&self, t: f64) -> Result<()> {
        if t >= 1.0 && t <= self.truncation {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "level {t} outside [1, {}]",
                self.truncation
            )))
        }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.base.len() {
            Ok(())
        } else {
            Err(invalid(format!("vertex {v} not in the base graph")))
        }
    }

    fn certified_base_distance(&self, v: usize, w: usize) -> Result<f64> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        if !self.base.is_certified(v, w) {
            return Err(Error::Exactness(format!(
                "base distance between {} and {} is not certified",
                self.base.label(v),
                self.base.label(w)
            )));
        }
        Ok(self.base.dist(v, w))
    }

    /// Exact distance `ρ(p, q)`.
    pub fn distance(&self, p: HoroPoint, q: HoroPoint) -> Result<f64> {
        self.check_level(p.level)?;
        self.check_level(q.level)?;
        let n = self.certified_base_distance(p.vertex, q.vertex)?;
        let apex = geodesic_apex_level(n, p.level, q.level);
        if apex > self.truncation + 1e-12 {
            return Err(Error::Domain(format!(
                "geodesic climbs to level {apex:.4}, above the truncation {}",
                self.truncation
            )));
        }
        Ok(horoball_rho(n, p.level, q.level))
    }

    /// Intrinsic distance on the horosphere `K_t`: `e^{1-t}·d₁(v, w)`.
    pub fn horosphere_distance(&self, t: f64, v: usize, w: usize) -> Result<f64> {
        self.check_level(t)?;
        Ok((1.0 - t).exp() * self.certified_base_distance(v, w)?)
    }

    /// Orthogonal projection onto `K_t`.
    pub fn project_to_level(&self, p: HoroPoint, t: f64) -> Result<HoroPoint> {
        self.check_level(p.level)?;
        self.check_level(t)?;
        self.check_vertex(p.vertex)?;
        Ok(HoroPoint::new(p.vertex, t))
    }

    /// Checks `d_t = 2·sinh(ρ/2)` and the two exponential bounds on the given
    /// same-level pairs. Pairs with uncertified base distance are skipped.
    pub fn distortion_audit(&self, t: f64, pairs: &[(usize, usize)]) -> Result<DistortionReport> {
        self.check_level(t)?;
        let (a, alpha) = UPPER_DISTORTION;
        let (b, beta) = LOWER_DISTORTION;
        let mut report = DistortionReport {
            level: t,
            pairs_checked: 0,
            pairs_skipped: 0,
            identity_max_residual: 0.0,
            upper_constants: UPPER_DISTORTION,
            upper_violations: 0,
            upper_max_violation: 0.0,
            lower_constants: LOWER_DISTORTION,
            lower_pairs_checked: 0,
            lower_violations: 0,
            lower_max_violation: 0.0,
        };
        for &(v, w) in pairs {
            let (Ok(dt), Ok(n)) = (
                self.horosphere_distance(t, v, w),
                self.certified_base_distance(v, w),
            ) else {
                report.pairs_skipped += 1;
                continue;
            };
            let rho = horoball_rho(n, t, t);
            report.pairs_checked += 1;
            let residual = (dt - 2.0 * (rho / 2.0).sinh()).abs();
            report.identity_max_residual = report.identity_max_residual.max(residual);
            let upper_excess = dt - a * (alpha * rho).exp();
            if upper_excess > 1e-12 * dt.max(1.0) {
                report.upper_violations += 1;
                report.upper_max_violation = report.upper_max_violation.max(upper_excess);
            }
            if rho >= LOWER_DISTORTION_FROM {
                report.lower_pairs_checked += 1;
                let lower_excess = b * (beta * rho).exp() - dt;
                if lower_excess > 1e-12 * dt.max(1.0) {
                    report.lower_violations += 1;
                    report.lower_max_violation = report.lower_max_violation.max(lower_excess);
                }
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;

    /// Path graph 0 - 1 - ... - (n-1).
    pub(crate) fn path(n: usize) -> FiniteMetricSpace {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let d = (0..n * n)
            .map(|k| ((k / n) as f64 - (k % n) as f64).abs())
            .collect();
        FiniteMetricSpace::new(labels, d, 0, f64::INFINITY).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let h = HoroballSpace::new(path(5), 10.0).unwrap();
        let v = |i, t| HoroPoint::new(i, t);
        assert_eq!(h.distance(v(0, 1.0), v(0, 4.0)).unwrap(), 3.0);
        let same = h.distance(v(0, 1.0), v(1, 1.0)).unwrap();
        assert!((same - 2.0 * 0.5f64.asinh()).abs() < 1e-15);
        assert!((same - 0.962_423_650_119_206_9).abs() < 1e-12);
        let far = h.distance(v(0, 1.0), v(4, 3.0)).unwrap();
        let e2 = 2f64.exp();
        let arg = 1.0 + (16.0 + (e2 - 1.0).powi(2)) / (2.0 * e2);
        assert!((arg - 4.8449).abs() < 1e-4);
        assert!((far - arg.acosh()).abs() < 1e-12);
        assert!((far - 2.2603).abs() < 1e-4);
    }

    #[test]
    fn symmetric_and_zero_on_diagonal() {
        let h = HoroballSpace::new(path(4), 8.0).unwrap();
        let p = HoroPoint::new(1, 2.5);
        let q = HoroPoint::new(3, 1.2);
        assert_eq!(h.distance(p, q).unwrap(), h.distance(q, p).unwrap());
        assert_eq!(h.distance(p, p).unwrap(), 0.0);
        assert!(h.distance(p, HoroPoint::new(1, 2.5000001)).unwrap() > 0.0);
    }

    #[test]
    fn domain_and_exactness_errors() {
        let h = HoroballSpace::new(path(3), 3.0).unwrap();
        assert!(matches!(
            h.distance(HoroPoint::new(0, 0.5), HoroPoint::new(0, 1.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            h.distance(HoroPoint::new(0, 1.0), HoroPoint::new(0, 3.5)),
            Err(Error::Domain(_))
        ));
        // the geodesic between far-apart level-3 points climbs above 3
        assert!(matches!(
            h.distance(HoroPoint::new(0, 3.0), HoroPoint::new(2, 3.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            h.horosphere_distance(4.0, 0, 1),
            Err(Error::Domain(_))
        ));
        assert!(h
            .distance(HoroPoint::new(7, 1.0), HoroPoint::new(0, 1.0))
            .is_err());

        let labels = vec!["x".into(), "y".into()];
        let base = FiniteMetricSpace::new(labels, vec![0.0, 5.0, 5.0, 0.0], 0, 1.0).unwrap();
        let h = HoroballSpace::new(base, 10.0).unwrap();
        assert!(matches!(
            h.distance(HoroPoint::new(0, 1.0), HoroPoint::new(1, 1.0)),
            Err(Error::Exactness(_))
        ));
        assert!(HoroballSpace::new(path(2), 0.5).is_err());
    }

    #[test]
    fn horosphere_and_projection() {
        let h = HoroballSpace::new(path(5), 6.0).unwrap();
        assert_eq!(h.horosphere_distance(1.0, 0, 4).unwrap(), 4.0);
        let d3 = h.horosphere_distance(3.0, 0, 4).unwrap();
        assert!((d3 - 4.0 * (-2f64).exp()).abs() < 1e-15);
        assert!((d3 - 0.5413).abs() < 1e-4);
        assert_eq!(h.horosphere_distance(2.7, 3, 3).unwrap(), 0.0);

        let p = HoroPoint::new(2, 1.0);
        assert_eq!(h.project_to_level(p, 3.0).unwrap(), HoroPoint::new(2, 3.0));
        assert_eq!(
            h.project_to_level(HoroPoint::new(2, 2.0), 2.0).unwrap(),
            HoroPoint::new(2, 2.0)
        );
        assert!(h.project_to_level(p, 7.0).is_err());
        // d_{t'} = e^{t - t'} d_t(π_t x, π_t y)
        let d1 = h.horosphere_distance(1.0, 0, 4).unwrap();
        assert!((d1 - 2f64.exp() * d3).abs() < 1e-12);
    }

    #[test]
    fn distortion_examples() {
        // d_t = 1 and d_t = 10 on level 1
        let h = HoroballSpace::new(path(11), 20.0).unwrap();
        let r = h.distortion_audit(1.0, &[(0, 1), (0, 10), (3, 3)]).unwrap();
        assert_eq!(r.pairs_checked, 3);
        assert!(r.identity_max_residual < 1e-12);
        assert_eq!(r.upper_violations, 0);
        assert_eq!(r.lower_violations, 0);
        assert_eq!(r.lower_pairs_checked, 1); // only d_t = 10 has ρ ≥ 1
        let rho10 = horoball_rho(10.0, 1.0, 1.0);
        assert!((rho10 - 2.0 * 5f64.asinh()).abs() < 1e-12);
        assert!((rho10 - 4.624_876).abs() < 1e-6);
        assert!(10.0 <= (rho10 / 2.0).exp());
        assert!(((rho10 / 2.0).exp() - (5.0 + 26f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn apex_rule() {
        // vertical geodesics stay between their endpoints
        assert_eq!(geodesic_apex_level(0.0, 1.0, 3.0), 3.0);
        // n = 2 at level 1: semicircle of radius sqrt(2) reaches 1 + ln(sqrt 2)
        assert!((geodesic_apex_level(2.0, 1.0, 1.0) - (1.0 + 2f64.sqrt().ln())).abs() < 1e-12);
        for &(n, t, t2) in &[
            (1.0, 1.0, 1.0),
            (4.0, 1.0, 3.0),
            (30.0, 2.0, 2.5),
            (0.5, 3.0, 1.0),
        ] {
            let apex = geodesic_apex_level(n, t, t2);
            assert!(apex >= f64::max(t, t2) - 1e-12);
            assert!(apex <= f64::max(t, t2) + f64::max(n, 1.0).ln() + 1.0);
        }
    }

    #[test]
    fn reach_inverts_rho() {
        for &(t, t2, r) in &[(1.0, 1.0, 3.0), (2.0, 3.0, 2.0), (4.0, 2.5, 1.7)] {
            let n = level_reach(t, t2, r).unwrap();
            assert!((horoball_rho(n, t, t2) - r).abs() < 1e-9);
        }
        assert!(level_reach(1.0, 5.0, 2.0).is_none());
    }
}
