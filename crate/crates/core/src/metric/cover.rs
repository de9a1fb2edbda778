use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::metric::MetricSpace;

/// Slack for comparisons against real-valued radii.
pub const DIST_EPS: f64 = 1e-9;

const PAR_THRESHOLD: usize = 4096;

/// Indices of the closed ball `B(center, r)`, ascending.
pub fn ball<M: MetricSpace + ?Sized>(m: &M, center: usize, r: f64) -> Vec<usize> {
    if let Some(v) = m.enumerate_ball(center, r) {
        return v;
    }
    let n = m.len();
    if n >= PAR_THRESHOLD {
        (0..n)
            .into_par_iter()
            .filter(|&i| m.dist(center, i) <= r + DIST_EPS)
            .collect()
    } else {
        (0..n)
            .filter(|&i| m.dist(center, i) <= r + DIST_EPS)
            .collect()
    }
}

/// Farthest-first traversal covering `subset` by closed `r`-balls, starting
/// from the lowest-index point of `subset`.
///
/// Returns the centers in selection order. Each new center is the uncovered
/// point farthest from the chosen centers, ties broken by lower index, so
/// centers are pairwise more than `r` apart.
pub fn greedy_cover<M: MetricSpace + ?Sized>(
    m: &M,
    subset: &[usize],
    r: f64,
) -> Result<Vec<usize>> {
    let first = *subset
        .iter()
        .min()
        .ok_or_else(|| invalid("cannot cover an empty subset"))?;
    greedy_cover_from(m, subset, r, first)
}

/// Farthest-first traversal with a prescribed first center.
pub fn greedy_cover_from<M: MetricSpace + ?Sized>(
    m: &M,
    subset: &[usize],
    r: f64,
    first: usize,
) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(invalid("cannot cover an empty subset"));
    }
    if !(r > 0.0) {
        return Err(invalid(format!("cover radius must be positive, got {r}")));
    }
    let mut pts = subset.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.binary_search(&first).is_err() {
        return Err(invalid(format!(
            "first center {first} is not in the subset"
        )));
    }

    let mut nearest = vec![f64::INFINITY; pts.len()];
    // lazy max-heap of (distance bits, lower slot first), live only while
    // balls are enumerated; stale entries are skipped since `nearest` only
    // decreases
    let mut heap: Option<BinaryHeap<(u64, Reverse<usize>)>> = None;
    let mut centers = vec![first];
    // every point is within `reach` of some center once one exists
    let mut reach = f64::INFINITY;
    loop {
        let newest = *centers.last().unwrap();
        match m.ball_points(newest, reach) {
            Some(near) => {
                let h = heap.get_or_insert_with(|| {
                    (0..pts.len())
                        .filter(|&k| nearest[k].is_finite())
                        .map(|k| (nearest[k].to_bits(), Reverse(k)))
                        .collect()
                });
                for (p, d) in near {
                    if let Ok(k) = pts.binary_search(&p) {
                        if d < nearest[k] {
                            nearest[k] = d;
                            h.push((d.to_bits(), Reverse(k)));
                        }
                    }
                }
            }
            None => {
                heap = None;
                if pts.len() >= PAR_THRESHOLD {
                    nearest
                        .par_iter_mut()
                        .zip(pts.par_iter())
                        .for_each(|(slot, &p)| {
                            *slot = slot.min(m.dist(newest, p));
                        });
                } else {
                    nearest.iter_mut().zip(pts.iter()).for_each(|(slot, &p)| {
                        *slot = slot.min(m.dist(newest, p));
                    });
                }
            }
        }
        let far = match heap.as_mut() {
            Some(h) => {
                while h
                    .peek()
                    .is_some_and(|&(bits, Reverse(k))| bits != nearest[k].to_bits())
                {
                    h.pop();
                }
                h.peek()
                    .map(|&(bits, Reverse(k))| (f64::from_bits(bits), k))
            }
            // larger distance wins, then lower slot
            None => nearest
                .iter()
                .enumerate()
                .fold(None, |best: Option<(f64, usize)>, (k, &d)| match best {
                    Some((bd, _)) if d <= bd => best,
                    _ => Some((d, k)),
                }),
        };
        match far {
            Some((d, k)) if d > r + DIST_EPS => {
                centers.push(pts[k]);
                reach = d;
            }
            _ => return Ok(centers),
        }
    }
}

/// Assigns every point of `subset` to the first center covering it.
/// Points covered by no center are returned in the second vector.
pub fn cover_sets<M: MetricSpace + ?Sized>(
    m: &M,
    subset: &[usize],
    centers: &[usize],
    r: f64,
) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut sets = vec![Vec::new(); centers.len()];
    let mut missed = Vec::new();
    for &p in subset {
        match centers.iter().position(|&c| m.dist(c, p) <= r + DIST_EPS) {
            Some(k) => sets[k].push(p),
            None => missed.push(p),
        }
    }
    (sets, missed)
}

/// Greedy maximal `s`-separated subset, scanning `subset` in ascending index
/// order and keeping a point iff it is at distance `≥ s` from every kept point.
pub fn max_packing<M: MetricSpace + ?Sized>(m: &M, subset: &[usize], s: f64) -> Result<Vec<usize>> {
    let mut order = subset.to_vec();
    order.sort_unstable();
    order.dedup();
    max_packing_ordered(m, &order, s)
}

/// Like [`max_packing`] but scans `order` as given.
pub fn max_packing_ordered<M: MetricSpace + ?Sized>(
    m: &M,
    order: &[usize],
    s: f64,
) -> Result<Vec<usize>> {
    if !(s > 0.0) {
        return Err(invalid(format!("separation must be positive, got {s}")));
    }
    let mut kept: Vec<usize> = Vec::new();
    let mut blocked = vec![false; m.len()];
    for &p in order {
        if blocked[p] {
            continue;
        }
        kept.push(p);
        blocked[p] = true;
        // cheap ball enumeration avoids comparing against every kept point
        let near = m.enumerate_ball(p, s).unwrap_or_else(|| order.to_vec());
        for q in near {
            if m.dist(p, q) < s - DIST_EPS {
                blocked[q] = true;
            }
        }
    }
    Ok(kept)
}
