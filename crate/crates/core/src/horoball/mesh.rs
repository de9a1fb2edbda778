use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};
use crate::horoball::{HeapItem, HoroPoint, HoroballSpace};
use crate::metric::{MetricSpace, DIST_EPS};

/// Default node budget for [`HoroballSpace::mesh_oracle_distance`].
pub const DEFAULT_MESH_NODES: usize = 2_000_000;

/// Distance between `(x1, y1)` and `(x2, y2)` in the upper half-plane.
fn half_plane_distance(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let (dx, dy) = (x1 - x2, y1 - y2);
    2.0 * ((dx * dx + dy * dy) / (4.0 * y1 * y2)).sqrt().asinh()
}

impl<B: MetricSpace> HoroballSpace<B> {
    /// Upper bound on `ρ(p, q)` by shortest paths through a mesh of the
    /// truncated space.
    ///
    /// Nodes sit on the vertical lines over base vertices near a geodesic
    /// from `p.vertex` to `q.vertex`, at levels `1, 1 + step, …` up to the
    /// truncation plus the levels of `p` and `q`. Nodes on adjacent lines are
    /// joined by the hyperbolic chord through their common edge strip, and
    /// consecutive nodes on one line by vertical segments. The bound
    /// decreases to the true distance as `step → 0`.
    pub fn mesh_oracle_distance(
        &self,
        p: HoroPoint,
        q: HoroPoint,
        step: f64,
        max_nodes: usize,
    ) -> Result<f64> {
        if !(step > 0.0) {
            return Err(invalid(format!("mesh step must be positive, got {step}")));
        }
        for t in [p.level, q.level] {
            if !(t >= 1.0 && t <= self.truncation()) {
                return Err(Error::Domain(format!(
                    "level {t} outside [1, {}]",
                    self.truncation()
                )));
            }
        }
        let base = self.base();
        if p.vertex >= base.len() || q.vertex >= base.len() {
            return Err(invalid("vertex not in the base graph"));
        }
        if !base.is_certified(p.vertex, q.vertex) {
            return Err(Error::Exactness("base distance is not certified".into()));
        }
        let n = base.dist(p.vertex, q.vertex);

        // base vertices within one step of some geodesic from p to q
        let lines: Vec<usize> = (0..base.len())
            .filter(|&v| base.dist(p.vertex, v) + base.dist(v, q.vertex) <= n + 2.0 + DIST_EPS)
            .collect();
        let adjacency: Vec<Vec<usize>> = lines
            .iter()
            .map(|&v| {
                (0..lines.len())
                    .filter(|&j| (base.dist(v, lines[j]) - 1.0).abs() <= DIST_EPS)
                    .collect()
            })
            .collect();

        let steps = ((self.truncation() - 1.0) / step + 1e-9).floor() as usize;
        let mut levels: Vec<f64> = (0..=steps).map(|k| 1.0 + k as f64 * step).collect();
        levels.extend([p.level, q.level]);
        levels.sort_by(f64::total_cmp);
        levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        let l = levels.len();
        let nodes = lines.len().saturating_mul(l);
        if nodes > max_nodes {
            return Err(Error::Size(format!(
                "mesh needs {nodes} nodes, budget is {max_nodes}"
            )));
        }

        let heights: Vec<f64> = levels.iter().map(|t| (t - 1.0).exp()).collect();
        let chord: Vec<f64> = (0..l * l)
            .map(|k| half_plane_distance(0.0, heights[k / l], 1.0, heights[k % l]))
            .collect();
        let level_index = |t: f64| levels.iter().position(|&s| (s - t).abs() <= 1e-12).unwrap();
        let line_index = |v: usize| lines.binary_search(&v).unwrap();
        let source = line_index(p.vertex) * l + level_index(p.level);
        let target = line_index(q.vertex) * l + level_index(q.level);

        let mut dist = vec![f64::INFINITY; nodes];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::from([HeapItem(0.0, source)]);
        while let Some(HeapItem(d, u)) = heap.pop() {
            if u == target {
                return Ok(d);
            }
            if d > dist[u] {
                continue;
            }
            let (line, li) = (u / l, u % l);
            let mut relax = |v: usize, w: f64, heap: &mut BinaryHeap<HeapItem>| {
                if d + w < dist[v] {
                    dist[v] = d + w;
                    heap.push(HeapItem(d + w, v));
                }
            };
            if li > 0 {
                relax(u - 1, levels[li] - levels[li - 1], &mut heap);
            }
            if li + 1 < l {
                relax(u + 1, levels[li + 1] - levels[li], &mut heap);
            }
            for &other in &adjacency[line] {
                for lj in 0..l {
                    relax(other * l + lj, chord[li * l + lj], &mut heap);
                }
            }
        }
        Err(Error::Domain(
            "target is not connected to the source in the mesh".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;

    fn path(n: usize) -> FiniteMetricSpace {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let d = (0..n * n)
            .map(|k| ((k / n) as f64 - (k % n) as f64).abs())
            .collect();
        FiniteMetricSpace::new(labels, d, 0, f64::INFINITY).unwrap()
    }

    #[test]
    fn half_plane_formula() {
        assert!((half_plane_distance(0.0, 1.0, 0.0, std::f64::consts::E) - 1.0).abs() < 1e-12);
        assert!((half_plane_distance(0.0, 1.0, 1.0, 1.0) - 2.0 * 0.5f64.asinh()).abs() < 1e-12);
    }

    #[test]
    fn oracle_bounds_closed_form_and_converges() {
        let h = HoroballSpace::new(path(6), 5.0).unwrap();
        let p = HoroPoint::new(0, 1.0);
        let q = HoroPoint::new(4, 2.0);
        let exact = h.distance(p, q).unwrap();
        let mut prev = f64::INFINITY;
        for step in [0.5, 0.25, 0.125, 0.0625, 0.03125] {
            let d = h
                .mesh_oracle_distance(p, q, step, DEFAULT_MESH_NODES)
                .unwrap();
            assert!(d >= exact - 1e-9);
            assert!(d <= prev + 1e-12);
            prev = d;
        }
        assert!(prev - exact < 1e-3, "{prev} vs {exact}");
    }

    #[test]
    fn node_budget() {
        let h = HoroballSpace::new(path(6), 5.0).unwrap();
        let r = h.mesh_oracle_distance(HoroPoint::new(0, 1.0), HoroPoint::new(5, 1.0), 0.001, 1000);
        assert!(matches!(r, Err(Error::Size(_))));
    }
}
