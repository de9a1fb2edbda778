use std::collections::HashMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::metric::{ball, greedy_cover_from, max_packing, MetricSpace, DIST_EPS};

/// A map from a rooted tree into a metric space sending each vertex's
/// children to the centres of a radius-1 cover of the radius-2 ball around
/// its image.
///
/// The tree is the subtree of the `valence`-regular tree spanned by these
/// children; `valence` is the largest cover size met.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeMap {
    pub valence: usize,
    pub depth: u32,
    pub parent: Vec<Option<usize>>,
    pub tree_depth: Vec<u32>,
    pub image: Vec<usize>,
}

/// Result of checking a [`TreeMap`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeMapCheck {
    pub edges: usize,
    pub max_edge_length: f64,
    pub lipschitz: bool,
    /// Points of `B(basepoint, depth)` checked for density.
    pub ball_points: usize,
    pub max_gap: f64,
    pub dense: bool,
}

/// Builds the tree map breadth-first to `depth`, refusing to grow past
/// `max_vertices` tree vertices.
pub fn tree_lipschitz_map<M: MetricSpace + ?Sized>(
    space: &M,
    basepoint: usize,
    depth: u32,
    max_vertices: usize,
) -> Result<TreeMap> {
    if basepoint >= space.len() {
        return Err(invalid(format!("basepoint {basepoint} out of range")));
    }
    let mut covers: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut children_of = |x: usize| -> Result<Vec<usize>> {
        if let Some(c) = covers.get(&x) {
            return Ok(c.clone());
        }
        if !space.ball_is_certified(x, 2.0) {
            return Err(Error::Exactness(format!(
                "ball of radius 2 around {} is not certified",
                space.label(x)
            )));
        }
        let centers = greedy_cover_from(space, &ball(space, x, 2.0), 1.0, x)?;
        covers.insert(x, centers.clone());
        Ok(centers)
    };

    let mut map = TreeMap {
        valence: 1,
        depth,
        parent: vec![None],
        tree_depth: vec![0],
        image: vec![basepoint],
    };
    let mut frontier = vec![0usize];
    for level in 1..=depth {
        let mut next = Vec::new();
        for &v in &frontier {
            let centers = children_of(map.image[v])?;
            map.valence = map.valence.max(centers.len());
            for c in centers {
                if map.image.len() >= max_vertices {
                    return Err(Error::Size(format!(
                        "tree map exceeds {max_vertices} vertices at depth {level}"
                    )));
                }
                next.push(map.image.len());
                map.parent.push(Some(v));
                map.tree_depth.push(level);
                map.image.push(c);
            }
        }
        frontier = next;
    }
    if depth == 0 {
        map.valence = children_of(basepoint)?.len();
    }
    Ok(map)
}

impl TreeMap {
    /// Checks that tree edges map to pairs at distance `≤ 2` and that every
    /// point of `B(basepoint, depth)` lies within 1 of the image.
    pub fn verify<M: MetricSpace + ?Sized>(&self, space: &M) -> TreeMapCheck {
        let max_edge_length = (1..self.image.len())
            .map(|v| space.dist(self.image[v], self.image[self.parent[v].unwrap()]))
            .fold(0.0, f64::max);
        let mut image: Vec<usize> = self.image.clone();
        image.sort_unstable();
        image.dedup();
        let target = ball(space, self.image[0], f64::from(self.depth));
        let max_gap = target
            .iter()
            .map(|&p| {
                image
                    .iter()
                    .map(|&q| space.dist(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        TreeMapCheck {
            edges: self.image.len() - 1,
            max_edge_length,
            lipschitz: max_edge_length <= 2.0 + DIST_EPS,
            ball_points: target.len(),
            max_gap,
            dense: max_gap <= 1.0 + DIST_EPS,
        }
    }
}

/// Size of the greedy maximal `s`-separated subset of `B(basepoint, R)`.
pub fn separated_count<M: MetricSpace + ?Sized>(
    space: &M,
    basepoint: usize,
    r: f64,
    s: f64,
) -> Result<usize> {
    if basepoint >= space.len() {
        return Err(invalid(format!("basepoint {basepoint} out of range")));
    }
    if !space.ball_is_certified(basepoint, r) {
        return Err(Error::Exactness(format!(
            "ball of radius {r} around {} is not certified",
            space.label(basepoint)
        )));
    }
    Ok(max_packing(space, &ball(space, basepoint, r), s)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{IntegerLine, RegularTree};
    use crate::metric::FiniteMetricSpace;

    #[test]
    fn single_point() {
        let m = FiniteMetricSpace::new(vec!["p".into()], vec![0.0], 0, f64::INFINITY).unwrap();
        let t = tree_lipschitz_map(&m, 0, 3, 1000).unwrap();
        assert_eq!(t.valence, 1);
        assert!(t.image.iter().all(|&x| x == 0));
        assert!(t.verify(&m).dense);
    }

    #[test]
    fn integer_ball() {
        let line = IntegerLine { start: -8, len: 17 };
        let t = tree_lipschitz_map(&line, 8, 4, 100_000).unwrap();
        let check = t.verify(&line);
        assert!(check.lipschitz && check.dense, "{check:?}");
        assert_eq!(check.ball_points, 9);
        assert_eq!(t.valence, 3);
        // a ball of radius 2 beyond the ends is not available
        assert!(matches!(
            tree_lipschitz_map(&line, 8, 5, 100_000),
            Err(Error::Exactness(_))
        ));
    }

    #[test]
    fn separated_examples() {
        let line = IntegerLine { start: -4, len: 9 };
        assert_eq!(separated_count(&line, 4, 4.0, 2.0).unwrap(), 5);
        assert_eq!(separated_count(&line, 4, 0.0, 2.0).unwrap(), 1);
        // a tree ball of radius R has at most N^R 2-separated points
        for r in 1..=5u32 {
            let tree = RegularTree::new(3, r + 1);
            let count = separated_count(&tree, 0, f64::from(r), 2.0).unwrap();
            assert!(count <= 3usize.pow(r), "{r}: {count}");
        }
    }
}
