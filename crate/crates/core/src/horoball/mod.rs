//! Combinatorial horoballs over graphs, finite samples of them, and cusped
//! spaces built by gluing horoballs onto parabolic cosets.

mod cover;
mod cusped;
mod free_product;
mod mesh;
mod sample;
mod space;

use std::cmp::Ordering;

pub use cover::{horoball_ball_cover, BallCover, SliceCover};
pub use cusped::{default_truncation, CuspedSpace, CuspedSummary};
pub use free_product::{FreeProductZZ2, Syllable};
pub use mesh::DEFAULT_MESH_NODES;
pub use sample::{sample_extent, HoroballSample};
pub use space::{
    geodesic_apex_level, horoball_rho, level_reach, DistortionReport, HoroPoint, HoroballSpace,
    LOWER_DISTORTION, LOWER_DISTORTION_FROM, UPPER_DISTORTION,
};

/// Min-heap entry for Dijkstra: smaller distance first, then smaller node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct HeapItem(pub f64, pub usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
