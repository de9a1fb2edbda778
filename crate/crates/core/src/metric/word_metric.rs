use crate::error::Result;
use crate::groups::FinitelyGenerated;
use crate::metric::{cayley_ball, BallGraph, MetricSpace};

/// The word metric on a Cayley ball, evaluated by translation invariance:
/// `d(x, y) = |x⁻¹y|`.
///
/// The word length comes from the family's closed formula when it has one
/// and otherwise from a lookup ball of radius `table_radius`. Pairs whose
/// quotient falls outside the lookup ball are uncertified.
pub struct WordMetric<'a, G: FinitelyGenerated> {
    group: &'a G,
    radius: u32,
    points: usize,
    table: BallGraph<G::Element>,
    closed_form: bool,
}

impl<'a, G: FinitelyGenerated> WordMetric<'a, G> {
    /// Points are the ball of radius `radius`; without a closed formula the
    /// lookup ball has radius `2 · radius`, certifying every pair.
    pub fn new(group: &'a G, radius: u32, max_vertices: usize) -> Result<Self> {
        let closed = group.closed_word_length(&group.identity()).is_some();
        let table_radius = if closed { radius } else { 2 * radius };
        Self::with_table_radius(group, radius, table_radius, max_vertices)
    }

    pub fn with_table_radius(
        group: &'a G,
        radius: u32,
        table_radius: u32,
        max_vertices: usize,
    ) -> Result<Self> {
        let closed_form = group.closed_word_length(&group.identity()).is_some();
        let table = cayley_ball(group, radius.max(table_radius), max_vertices)?;
        // BFS order puts the radius-`radius` ball first
        let points = table.growth()[radius as usize] as usize;
        Ok(WordMetric {
            group,
            radius,
            points,
            table,
            closed_form,
        })
    }

    pub fn group(&self) -> &G {
        self.group
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn ball(&self) -> &BallGraph<G::Element> {
        &self.table
    }

    pub fn element(&self, i: usize) -> &G::Element {
        self.table.vertex(i)
    }

    pub fn word_length(&self, i: usize) -> u32 {
        self.table.word_length(i)
    }

    /// Index of the point `e`, if it lies in the point ball.
    pub fn index_of(&self, e: &G::Element) -> Option<usize> {
        self.table.index_of(e).filter(|&i| i < self.points)
    }

    /// Word length of `x_i⁻¹ x_j`, when it can be certified.
    pub fn word_distance(&self, i: usize, j: usize) -> Option<u64> {
        if i == j {
            return Some(0);
        }
        if i == 0 {
            return Some(u64::from(self.table.word_length(j)));
        }
        let x = self.table.vertex(i);
        let y = self.table.vertex(j);
        let q = self
            .group
            .inv(x)
            .and_then(|xi| self.group.mul(&xi, y))
            .ok()?;
        if self.closed_form {
            self.group.closed_word_length(&q)
        } else {
            self.table
                .index_of(&q)
                .map(|k| u64::from(self.table.word_length(k)))
        }
    }

    fn table_radius(&self) -> u32 {
        self.table.radius()
    }
}

impl<G: FinitelyGenerated> MetricSpace for WordMetric<'_, G> {
    fn len(&self) -> usize {
        self.points
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.word_distance(i, j).map_or(f64::INFINITY, |d| d as f64)
    }

    fn is_certified(&self, i: usize, j: usize) -> bool {
        self.word_distance(i, j).is_some()
    }

    fn ball_is_certified(&self, center: usize, r: f64) -> bool {
        let depth = f64::from(self.table.word_length(center));
        depth + r <= f64::from(self.radius)
            && (self.closed_form || 2.0 * r <= f64::from(self.table_radius()))
    }

    fn label(&self, i: usize) -> String {
        self.group.label(self.table.vertex(i))
    }

    // translate the identity ball: `x·g` for `|g| ≤ r`
    fn ball_points(&self, center: usize, r: f64) -> Option<Vec<(usize, f64)>> {
        if !(r >= 0.0) || r > f64::from(self.table_radius()) {
            return None;
        }
        let count = self.table.growth()[(r + 1e-9).floor() as usize] as usize;
        let c = self.table.vertex(center);
        let mut out = Vec::new();
        for k in 0..count {
            let p = self.group.mul(c, self.table.vertex(k)).ok()?;
            if let Some(i) = self.index_of(&p) {
                out.push((i, f64::from(self.table.word_length(k))));
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupModel;
    use crate::metric::DEFAULT_MAX_VERTICES;

    /// Two independent routes to the same distances: ball-restricted BFS on
    /// a ball large enough to contain all geodesics, and translation.
    #[test]
    fn agrees_with_bfs_on_certified_pairs() {
        for spec in [
            "free-abelian:2",
            "free:2",
            "heisenberg",
            "lamplighter",
            "cyclic:7",
        ] {
            let g = GroupModel::parse(spec).unwrap();
            let wm = WordMetric::new(&g, 2, DEFAULT_MAX_VERTICES).unwrap();
            let big = cayley_ball(&g, 6, DEFAULT_MAX_VERTICES).unwrap();
            for i in 0..wm.len() {
                let d = big.bfs_from(big.index_of(wm.element(i)).unwrap());
                for j in 0..wm.len() {
                    let expect = d[big.index_of(wm.element(j)).unwrap()];
                    assert_eq!(wm.dist(i, j), f64::from(expect), "{spec}: {i},{j}");
                }
            }
        }
    }

    #[test]
    fn ball_points_match_scan() {
        for spec in ["free:2", "heisenberg", "free-abelian:3"] {
            let g = GroupModel::parse(spec).unwrap();
            let wm = WordMetric::new(&g, 3, DEFAULT_MAX_VERTICES).unwrap();
            for c in [0, 1, 5, wm.len() - 1] {
                let mut fast = wm.ball_points(c, 2.0).unwrap();
                fast.sort_by_key(|p| p.0);
                let scan: Vec<(usize, f64)> = (0..wm.len())
                    .filter(|&j| wm.dist(c, j) <= 2.0)
                    .map(|j| (j, wm.dist(c, j)))
                    .collect();
                assert_eq!(fast, scan, "{spec} center {c}");
            }
        }
    }

    #[test]
    fn ball_certification() {
        let h = GroupModel::heisenberg();
        let wm = WordMetric::with_table_radius(&h, 4, 4, DEFAULT_MAX_VERTICES).unwrap();
        assert!(wm.ball_is_certified(0, 2.0));
        assert!(!wm.ball_is_certified(0, 3.0));
        let f = GroupModel::free(2);
        let wm = WordMetric::new(&f, 4, DEFAULT_MAX_VERTICES).unwrap();
        assert!(wm.ball_is_certified(0, 4.0));
        assert!(!wm.ball_is_certified(1, 4.0));
    }
}
