use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::horoball::{horoball_rho, level_reach, HoroPoint, HoroballSpace};
use crate::metric::{greedy_cover, MetricSpace, DIST_EPS};

/// Greedy cover of one horosphere slice of a ball.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceCover {
    pub level: f64,
    /// Number of base vertices of the slice inside the ball.
    pub members: usize,
    /// Radius of the covering balls in the base metric `d₁`.
    pub base_radius: f64,
    pub centers: Vec<usize>,
}

/// A cover of `B(center, R')` in `C(K)`.
///
/// The ball is cut into horosphere slices spaced `1/(2R')` apart; each
/// slice is covered by `d_s`-balls of ambient radius `R'/R`, and every
/// point of the ball lies within `1/(4R')` vertically of a slice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallCover {
    pub center: HoroPoint,
    pub outer_radius: f64,
    pub ratio: f64,
    pub slice_spacing: f64,
    pub piece_radius: f64,
    pub slices: Vec<SliceCover>,
}

impl BallCover {
    /// Total number of pieces.
    pub fn cardinality(&self) -> usize {
        self.slices.iter().map(|s| s.centers.len()).sum()
    }

    /// Upper bound on the diameter of each piece.
    pub fn diameter_bound(&self) -> f64 {
        if self.outer_radius == 0.0 {
            0.0
        } else {
            2.0 * self.piece_radius + self.slice_spacing
        }
    }
}

/// Covers `B(center, outer)` by pieces of ambient radius `outer / ratio`.
pub fn horoball_ball_cover<B: MetricSpace>(
    space: &HoroballSpace<B>,
    center: HoroPoint,
    outer: f64,
    ratio: f64,
) -> Result<BallCover> {
    if !(outer >= 0.0) || !(ratio >= 1.0) {
        return Err(invalid(format!(
            "need R' ≥ 0 and R ≥ 1, got R' = {outer}, R = {ratio}"
        )));
    }
    space.project_to_level(center, center.level)?;
    if outer == 0.0 {
        return Ok(BallCover {
            center,
            outer_radius: 0.0,
            ratio,
            slice_spacing: 0.0,
            piece_radius: 0.0,
            slices: vec![SliceCover {
                level: center.level,
                members: 1,
                base_radius: 0.0,
                centers: vec![center.vertex],
            }],
        });
    }
    let spacing = 1.0 / (2.0 * outer);
    let piece_radius = outer / ratio;
    let lo = (center.level - outer).max(1.0);
    let hi = (center.level + outer).min(space.truncation());
    let first = ((lo - (center.level - outer)) / spacing - 1e-9)
        .ceil()
        .max(0.0) as usize;
    let base = space.base();

    let mut slices = Vec::new();
    let mut k = first;
    loop {
        let s = center.level - outer + k as f64 * spacing;
        if s > hi + 1e-9 {
            break;
        }
        k += 1;
        let s = s.clamp(1.0, space.truncation());
        let Some(reach) = level_reach(center.level, s, outer + DIST_EPS) else {
            continue;
        };
        if !base.ball_is_certified(center.vertex, reach.floor()) {
            return Err(Error::Exactness(format!(
                "base ball of radius {} around {} is not available",
                reach.floor(),
                base.label(center.vertex)
            )));
        }
        let members: Vec<usize> = (0..base.len())
            .filter(|&v| {
                horoball_rho(base.dist(center.vertex, v), center.level, s) <= outer + DIST_EPS
            })
            .collect();
        if members.is_empty() {
            continue;
        }
        let base_radius = (s - 1.0).exp() * 2.0 * (piece_radius / 2.0).sinh();
        let centers = greedy_cover(base, &members, base_radius)?;
        slices.push(SliceCover {
            level: s,
            members: members.len(),
            base_radius,
            centers,
        });
    }
    Ok(BallCover {
        center,
        outer_radius: outer,
        ratio,
        slice_spacing: spacing,
        piece_radius,
        slices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupModel;
    use crate::metric::{WordMetric, DEFAULT_MAX_VERTICES};

    #[test]
    fn zero_radius_is_one_piece() {
        let z = GroupModel::free_abelian(2);
        let wm = WordMetric::new(&z, 2, DEFAULT_MAX_VERTICES).unwrap();
        let h = HoroballSpace::new(&wm, 5.0).unwrap();
        let c = horoball_ball_cover(&h, HoroPoint::new(0, 2.0), 0.0, 3.0).unwrap();
        assert_eq!(c.cardinality(), 1);
        assert_eq!(c.diameter_bound(), 0.0);
    }

    #[test]
    fn pieces_cover_each_slice() {
        let z = GroupModel::free_abelian(2);
        let wm = WordMetric::new(&z, 40, DEFAULT_MAX_VERTICES).unwrap();
        let h = HoroballSpace::new(&wm, 10.0).unwrap();
        let cover = horoball_ball_cover(&h, HoroPoint::new(0, 3.0), 1.0, 1.0).unwrap();
        assert_eq!(cover.slices.len(), 5);
        for slice in &cover.slices {
            for v in 0..wm.len() {
                if horoball_rho(wm.dist(0, v), 3.0, slice.level) <= 1.0 {
                    let near = slice
                        .centers
                        .iter()
                        .map(|&c| horoball_rho(wm.dist(c, v), slice.level, slice.level));
                    assert!(near.fold(f64::INFINITY, f64::min) <= cover.piece_radius + 1e-9);
                }
            }
        }
    }

    #[test]
    fn small_base_is_an_exactness_error() {
        let z = GroupModel::free_abelian(2);
        let wm = WordMetric::new(&z, 3, DEFAULT_MAX_VERTICES).unwrap();
        let h = HoroballSpace::new(&wm, 10.0).unwrap();
        assert!(matches!(
            horoball_ball_cover(&h, HoroPoint::new(0, 5.0), 1.0, 1.0),
            Err(Error::Exactness(_))
        ));
        assert!(horoball_ball_cover(&h, HoroPoint::new(0, 1.0), 1.0, 0.5).is_err());
    }
}
