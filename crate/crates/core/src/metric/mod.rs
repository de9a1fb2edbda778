//! Finite metric spaces, Cayley balls, and the covering/packing engine.

mod ball;
mod cover;
mod delta;
pub(crate) mod finite;
mod word_metric;

pub use ball::{cayley_ball, BallGraph, DEFAULT_MAX_VERTICES};
pub use cover::{
    ball, cover_sets, greedy_cover, greedy_cover_from, max_packing, max_packing_ordered, DIST_EPS,
};
pub use delta::{four_point_delta, quadruple_delta};
pub use finite::FiniteMetricSpace;
pub use word_metric::WordMetric;

/// Read-only access to a finite set of points with a metric.
///
/// `dist` may return an approximation from above (or `+∞`) for pairs that
/// are not certified; callers that need exact values check `is_certified`
/// or `ball_is_certified` first.
pub trait MetricSpace: Sync {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_certified(&self, _i: usize, _j: usize) -> bool {
        true
    }

    /// True when the closed ball `B(center, r)` of the ambient space is
    /// entirely present in this finite space and all distances inside it are
    /// certified.
    fn ball_is_certified(&self, _center: usize, _r: f64) -> bool {
        true
    }

    fn label(&self, i: usize) -> String {
        i.to_string()
    }

    /// The points within distance `r` of `center` with their distances,
    /// when the space can list them without a full scan.
    fn ball_points(&self, _center: usize, _r: f64) -> Option<Vec<(usize, f64)>> {
        None
    }

    /// Indices of the closed ball `B(center, r)` in ascending order, when the
    /// space can list them without a full scan.
    fn enumerate_ball(&self, center: usize, r: f64) -> Option<Vec<usize>> {
        let mut v: Vec<usize> = self
            .ball_points(center, r)?
            .into_iter()
            .map(|(i, _)| i)
            .collect();
        v.sort_unstable();
        Some(v)
    }
}

impl<M: MetricSpace + ?Sized> MetricSpace for &M {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }
    fn is_certified(&self, i: usize, j: usize) -> bool {
        (**self).is_certified(i, j)
    }
    fn ball_is_certified(&self, center: usize, r: f64) -> bool {
        (**self).ball_is_certified(center, r)
    }
    fn label(&self, i: usize) -> String {
        (**self).label(i)
    }
    fn ball_points(&self, center: usize, r: f64) -> Option<Vec<(usize, f64)>> {
        (**self).ball_points(center, r)
    }
    fn enumerate_ball(&self, center: usize, r: f64) -> Option<Vec<usize>> {
        (**self).enumerate_ball(center, r)
    }
}

/// The restriction of a space to a list of its points, re-indexed `0..n`.
#[derive(Clone, Debug)]
pub struct SubSpace<'a, M: ?Sized> {
    parent: &'a M,
    indices: Vec<usize>,
}

impl<'a, M: MetricSpace + ?Sized> SubSpace<'a, M> {
    pub fn new(parent: &'a M, indices: Vec<usize>) -> Self {
        SubSpace { parent, indices }
    }

    pub fn parent_index(&self, i: usize) -> usize {
        self.indices[i]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

impl<M: MetricSpace + ?Sized> MetricSpace for SubSpace<'_, M> {
    fn len(&self) -> usize {
        self.indices.len()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.parent.dist(self.indices[i], self.indices[j])
    }
    fn is_certified(&self, i: usize, j: usize) -> bool {
        self.parent.is_certified(self.indices[i], self.indices[j])
    }
    // a sample never certifies completeness of ambient balls
    fn ball_is_certified(&self, _center: usize, _r: f64) -> bool {
        false
    }
    fn label(&self, i: usize) -> String {
        self.parent.label(self.indices[i])
    }
}
