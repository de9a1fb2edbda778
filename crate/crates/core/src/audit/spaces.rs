use crate::metric::{MetricSpace, DIST_EPS};

/// The integers `start, …, start + len − 1` with `|x − y|`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerLine {
    pub start: i64,
    pub len: usize,
}

impl IntegerLine {
    pub fn coordinate(&self, i: usize) -> i64 {
        self.start + i as i64
    }
}

impl MetricSpace for IntegerLine {
    fn len(&self) -> usize {
        self.len
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        (i as f64 - j as f64).abs()
    }

    fn label(&self, i: usize) -> String {
        self.coordinate(i).to_string()
    }

    fn ball_is_certified(&self, center: usize, r: f64) -> bool {
        let r = (r + DIST_EPS).floor() as usize;
        center >= r && center + r < self.len
    }

    fn ball_points(&self, center: usize, r: f64) -> Option<Vec<(usize, f64)>> {
        let reach = (r + DIST_EPS).floor().min(self.len as f64) as usize;
        let lo = center.saturating_sub(reach);
        let hi = (center + reach).min(self.len - 1);
        Some((lo..=hi).map(|j| (j, self.dist(center, j))).collect())
    }
}

/// The grid `{0..width} × {0..height}` with the `ℓ¹` metric; point
/// `y·width + x` is `(x, y)`, labelled by `(x, y) + origin`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerGrid {
    pub width: usize,
    pub height: usize,
    pub origin: (i64, i64),
}

impl IntegerGrid {
    pub fn new(width: usize, height: usize) -> Self {
        IntegerGrid {
            width,
            height,
            origin: (0, 0),
        }
    }

    /// The square `[-r, r]²`, so that its `ℓ¹` balls are balls of `ℤ²`.
    pub fn centered(r: usize) -> Self {
        IntegerGrid {
            width: 2 * r + 1,
            height: 2 * r + 1,
            origin: (-(r as i64), -(r as i64)),
        }
    }

    pub fn coordinates(&self, i: usize) -> (i64, i64) {
        ((i % self.width) as i64, (i / self.width) as i64)
    }

    /// Index of the point labelled `(x, y)`.
    pub fn index(&self, x: i64, y: i64) -> Option<usize> {
        let (gx, gy) = (x - self.origin.0, y - self.origin.1);
        (gx >= 0 && gy >= 0 && (gx as usize) < self.width && (gy as usize) < self.height)
            .then(|| gy as usize * self.width + gx as usize)
    }
}

impl MetricSpace for IntegerGrid {
    fn len(&self) -> usize {
        self.width * self.height
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coordinates(i), self.coordinates(j));
        ((a.0 - b.0).abs() + (a.1 - b.1).abs()) as f64
    }

    fn label(&self, i: usize) -> String {
        let (x, y) = self.coordinates(i);
        format!("({} {})", x + self.origin.0, y + self.origin.1)
    }

    fn ball_is_certified(&self, center: usize, r: f64) -> bool {
        let (x, y) = self.coordinates(center);
        let r = (r + DIST_EPS).floor() as i64;
        x - r >= 0 && y - r >= 0 && x + r < self.width as i64 && y + r < self.height as i64
    }

    fn ball_points(&self, center: usize, r: f64) -> Option<Vec<(usize, f64)>> {
        let reach = (r + DIST_EPS)
            .floor()
            .min((self.width + self.height) as f64) as i64;
        let (cx, cy) = self.coordinates(center);
        let mut out = Vec::new();
        for y in (cy - reach).max(0)..=(cy + reach).min(self.height as i64 - 1) {
            let rem = reach - (y - cy).abs();
            for x in (cx - rem).max(0)..=(cx + rem).min(self.width as i64 - 1) {
                let j = y as usize * self.width + x as usize;
                out.push((j, self.dist(center, j)));
            }
        }
        Some(out)
    }
}

/// The ball of radius `depth` around a vertex of the `valence`-regular tree,
/// vertices in breadth-first order with the root first.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularTree {
    valence: usize,
    parent: Vec<usize>,
    depth: Vec<u32>,
    /// Child index path from the root, for labels.
    branch: Vec<usize>,
}

impl RegularTree {
    pub fn new(valence: usize, depth: u32) -> Self {
        let mut parent = vec![0];
        let mut depths = vec![0];
        let mut branch = vec![0];
        let mut frontier = vec![0usize];
        for level in 1..=depth {
            let mut next = Vec::new();
            for &v in &frontier {
                let children = if level == 1 {
                    valence
                } else {
                    valence.saturating_sub(1)
                };
                for c in 0..children {
                    next.push(parent.len());
                    parent.push(v);
                    depths.push(level);
                    branch.push(c);
                }
            }
            frontier = next;
        }
        RegularTree {
            valence,
            parent,
            depth: depths,
            branch,
        }
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.parent[v])
    }

    /// Ancestor of `v` at depth `target ≤ depth(v)`.
    pub fn ancestor(&self, mut v: usize, target: u32) -> usize {
        while self.depth[v] > target {
            v = self.parent[v];
        }
        v
    }

    fn tree_distance(&self, mut a: usize, mut b: usize) -> u32 {
        let mut d = 0;
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
            d += 1;
        }
        d
    }
}

impl MetricSpace for RegularTree {
    fn len(&self) -> usize {
        self.parent.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        f64::from(self.tree_distance(i, j))
    }

    fn label(&self, i: usize) -> String {
        if i == 0 {
            return "root".into();
        }
        let mut path = Vec::new();
        let mut v = i;
        while v != 0 {
            path.push(self.branch[v].to_string());
            v = self.parent[v];
        }
        path.reverse();
        path.join(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts_and_distances() {
        let t = RegularTree::new(3, 3);
        assert_eq!(t.len(), 1 + 3 + 6 + 12);
        assert_eq!(t.dist(0, 21), 3.0);
        assert_eq!(t.dist(4, 5), 2.0); // siblings under child 0
        assert_eq!(t.dist(4, 6), 4.0); // cousins through the root
        assert_eq!(t.label(4), "0.0");
        assert_eq!(t.ancestor(21, 1), 3);
        assert_eq!(t.parent(0), None);
    }

    #[test]
    fn ball_points_match_scan() {
        let g = IntegerGrid::new(7, 5);
        let l = IntegerLine { start: -3, len: 9 };
        for c in [0, 12, 34] {
            let mut fast = g.ball_points(c, 2.0).unwrap();
            fast.sort_by_key(|p| p.0);
            let scan: Vec<_> = (0..g.len())
                .filter(|&j| g.dist(c, j) <= 2.0)
                .map(|j| (j, g.dist(c, j)))
                .collect();
            assert_eq!(fast, scan);
        }
        for c in [0, 4, 8] {
            let fast = l.ball_points(c, 3.0).unwrap();
            let scan: Vec<_> = (0..l.len())
                .filter(|&j| l.dist(c, j) <= 3.0)
                .map(|j| (j, l.dist(c, j)))
                .collect();
            assert_eq!(fast, scan);
        }
        assert_eq!(l.label(0), "-3");
        assert_eq!(g.label(8), "(1 1)");
        let c = IntegerGrid::centered(3);
        assert_eq!(c.label(c.index(0, 0).unwrap()), "(0 0)");
        assert!(c.ball_is_certified(c.index(0, 0).unwrap(), 3.0));
        assert!(!c.ball_is_certified(c.index(1, 0).unwrap(), 3.0));
        assert!(l.ball_is_certified(4, 4.0) && !l.ball_is_certified(4, 5.0));
    }
}
