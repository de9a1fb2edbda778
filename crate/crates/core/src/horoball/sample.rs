use crate::error::{invalid, Result};
use crate::horoball::{level_reach, HoroPoint};
use crate::metric::{MetricSpace, DIST_EPS};

/// The finite subset `V × {1, …, top}` of the untruncated horoball `C(K)`
/// with exact distances.
///
/// Point `i` is vertex `i % |V|` at level `1 + i / |V|`, so the level-1
/// copy of the base comes first and index 0 is the base's first vertex on
/// level 1.
#[derive(Clone, Debug)]
pub struct HoroballSample<B> {
    base: B,
    top: u32,
    /// `e^{(1-ℓ)/2}` for level `ℓ = 1 + k`.
    shrink: Vec<f64>,
    /// `sinh²(k/2)` for level difference `k`.
    vertical: Vec<f64>,
}

impl<B: MetricSpace> HoroballSample<B> {
    pub fn new(base: B, top: u32) -> Result<Self> {
        if top == 0 {
            return Err(invalid("a horoball sample needs at least level 1"));
        }
        if base.is_empty() {
            return Err(invalid("empty base graph"));
        }
        let shrink = (0..top).map(|k| (-f64::from(k) / 2.0).exp()).collect();
        let vertical = (0..top)
            .map(|k| (f64::from(k) / 2.0).sinh().powi(2))
            .collect();
        Ok(HoroballSample {
            base,
            top,
            shrink,
            vertical,
        })
    }

    fn rho(&self, n: f64, a: usize, b: usize) -> f64 {
        if n == 0.0 {
            return (a as f64 - b as f64).abs();
        }
        let (a, b) = (a.min(b), a.max(b));
        let h = 0.5 * n * self.shrink[a] * self.shrink[b];
        2.0 * (h * h + self.vertical[a.abs_diff(b)]).sqrt().asinh()
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn point(&self, i: usize) -> HoroPoint {
        let nb = self.base.len();
        HoroPoint::new(i % nb, 1.0 + (i / nb) as f64)
    }

    /// Index of vertex `v` at integer level `level`.
    pub fn index(&self, v: usize, level: u32) -> Option<usize> {
        (v < self.base.len() && (1..=self.top).contains(&level))
            .then(|| (level as usize - 1) * self.base.len() + v)
    }
}

/// Base radius and top level a sample needs to hold the complete ball of
/// radius `r` around a point on integer level `level`.
pub fn sample_extent(level: u32, r: f64) -> (u32, u32) {
    let top = (f64::from(level) + r + DIST_EPS).floor() as u32;
    let radius = (1..=top)
        .filter_map(|l| level_reach(f64::from(level), f64::from(l), r + DIST_EPS))
        .fold(0.0, f64::max);
    (radius.floor() as u32, top)
}

impl<B: MetricSpace> MetricSpace for HoroballSample<B> {
    fn len(&self) -> usize {
        self.base.len() * self.top as usize
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        let nb = self.base.len();
        self.rho(self.base.dist(i % nb, j % nb), i / nb, j / nb)
    }

    fn is_certified(&self, i: usize, j: usize) -> bool {
        self.base
            .is_certified(self.point(i).vertex, self.point(j).vertex)
    }

    fn ball_is_certified(&self, center: usize, r: f64) -> bool {
        let c = self.point(center);
        if c.level + r + DIST_EPS >= f64::from(self.top + 1) {
            return false;
        }
        (1..=self.top).all(
            |level| match level_reach(c.level, f64::from(level), r + DIST_EPS) {
                Some(n) => self.base.ball_is_certified(c.vertex, n.floor()),
                None => true,
            },
        )
    }

    fn label(&self, i: usize) -> String {
        let p = self.point(i);
        format!("{}@{}", self.base.label(p.vertex), p.level)
    }

    fn ball_points(&self, center: usize, r: f64) -> Option<Vec<(usize, f64)>> {
        let nb = self.base.len();
        let (v, a) = (center % nb, center / nb);
        let mut out = Vec::new();
        for b in 0..self.top as usize {
            let Some(reach) = level_reach(1.0 + a as f64, 1.0 + b as f64, r + DIST_EPS) else {
                continue;
            };
            for (w, d) in self.base.ball_points(v, reach)? {
                let rho = self.rho(d, a, b);
                if rho <= r + DIST_EPS {
                    out.push((b * nb + w, rho));
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupModel;
    use crate::metric::{WordMetric, DEFAULT_MAX_VERTICES};

    #[test]
    fn layout_and_distances() {
        let z = GroupModel::free_abelian(1);
        let wm = WordMetric::new(&z, 3, DEFAULT_MAX_VERTICES).unwrap();
        let s = HoroballSample::new(&wm, 3).unwrap();
        assert_eq!(s.len(), 21);
        assert_eq!(s.index(0, 1), Some(0));
        assert_eq!(s.index(2, 3), Some(16));
        assert_eq!(s.point(16), HoroPoint::new(2, 3.0));
        assert_eq!(s.label(16), "(-1)@3");
        assert_eq!(s.dist(0, s.index(0, 3).unwrap()), 2.0);
        assert!((s.dist(0, 1) - 2.0 * 0.5f64.asinh()).abs() < 1e-15);
        for i in 0..s.len() {
            for j in 0..s.len() {
                assert_eq!(s.dist(i, j), s.dist(j, i));
                let (p, q) = (s.point(i), s.point(j));
                let exact =
                    crate::horoball::horoball_rho(wm.dist(p.vertex, q.vertex), p.level, q.level);
                assert!((s.dist(i, j) - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn enumerated_ball_matches_scan() {
        let z = GroupModel::free_abelian(2);
        let wm = WordMetric::new(&z, 12, DEFAULT_MAX_VERTICES).unwrap();
        let s = HoroballSample::new(&wm, 4).unwrap();
        for (c, r) in [
            (0, 2.0),
            (s.index(3, 2).unwrap(), 1.5),
            (s.index(0, 3).unwrap(), 1.0),
        ] {
            let scan: Vec<usize> = (0..s.len())
                .filter(|&j| s.dist(c, j) <= r + DIST_EPS)
                .collect();
            assert_eq!(s.enumerate_ball(c, r).unwrap(), scan);
            let mut pts = s.ball_points(c, r).unwrap();
            pts.sort_by_key(|p| p.0);
            assert!(pts
                .iter()
                .zip(&scan)
                .all(|(p, &j)| p.0 == j && p.1 == s.dist(c, j)));
        }
    }

    #[test]
    fn ball_certification() {
        let z = GroupModel::free_abelian(1);
        let wm = WordMetric::new(&z, 6, DEFAULT_MAX_VERTICES).unwrap();
        let s = HoroballSample::new(&wm, 4).unwrap();
        assert!(s.ball_is_certified(0, 1.0));
        // would need level 5
        assert!(!s.ball_is_certified(s.index(0, 3).unwrap(), 1.0));
        // B((0, 1), 3) reaches d₁ ≈ 9.65 on level 3
        assert!(!s.ball_is_certified(0, 3.0));
        assert!(!s.ball_is_certified(0, 4.5));
        let wm = WordMetric::new(&z, 10, DEFAULT_MAX_VERTICES).unwrap();
        let s = HoroballSample::new(&wm, 4).unwrap();
        assert!(s.ball_is_certified(0, 3.0));
        let wm = WordMetric::new(&z, 9, DEFAULT_MAX_VERTICES).unwrap();
        assert!(HoroballSample::new(&wm, 4)
            .unwrap()
            .ball_is_certified(0, 3.0));
        let wm = WordMetric::new(&z, 8, DEFAULT_MAX_VERTICES).unwrap();
        assert!(!HoroballSample::new(&wm, 4)
            .unwrap()
            .ball_is_certified(0, 3.0));
        assert_eq!(sample_extent(1, 3.0), (9, 4));
    }

    #[test]
    fn extent_certifies() {
        let z = GroupModel::free_abelian(2);
        for (level, r) in [(1, 2.0), (2, 2.0), (3, 1.5), (1, 0.5)] {
            let (radius, top) = sample_extent(level, r);
            let wm = WordMetric::new(&z, radius, DEFAULT_MAX_VERTICES).unwrap();
            let s = HoroballSample::new(&wm, top).unwrap();
            assert!(
                s.ball_is_certified(s.index(0, level).unwrap(), r),
                "{level} {r}"
            );
        }
    }
}
