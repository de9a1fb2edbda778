use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::metric::MetricSpace;

/// Four-point value `(L₁ − L₂) / 2` of a quadruple, where `L₁ ≥ L₂ ≥ L₃` are
/// the three pairwise sums `d(w,x)+d(y,z)`, `d(w,y)+d(x,z)`, `d(w,z)+d(x,y)`.
pub fn quadruple_delta<M: MetricSpace + ?Sized>(
    m: &M,
    w: usize,
    x: usize,
    y: usize,
    z: usize,
) -> f64 {
    let mut s = [
        m.dist(w, x) + m.dist(y, z),
        m.dist(w, y) + m.dist(x, z),
        m.dist(w, z) + m.dist(x, y),
    ];
    s.sort_unstable_by(|a, b| b.total_cmp(a));
    (s[0] - s[1]) / 2.0
}

fn choose4(n: usize) -> u128 {
    let n = n as u128;
    if n < 4 {
        0
    } else {
        n * (n - 1) * (n - 2) * (n - 3) / 24
    }
}

/// Lower bound on the four-point hyperbolicity constant.
///
/// Exhaustive (and then exact for the finite space) when the number of
/// quadruples is at most `sample_count`; otherwise the maximum over
/// `sample_count` quadruples drawn from a ChaCha8 stream seeded by `seed`.
/// A larger `sample_count` extends the same stream, so the estimate is
/// monotone in it.
pub fn four_point_delta<M: MetricSpace + ?Sized>(
    m: &M,
    sample_count: u64,
    seed: u64,
) -> Result<f64> {
    let n = m.len();
    if n < 4 {
        return Err(invalid(format!(
            "four-point delta needs at least 4 points, got {n}"
        )));
    }
    if choose4(n) <= u128::from(sample_count) {
        let best = (0..n)
            .into_par_iter()
            .map(|w| {
                let mut best = 0.0f64;
                for x in w + 1..n {
                    for y in x + 1..n {
                        for z in y + 1..n {
                            best = best.max(quadruple_delta(m, w, x, y, z));
                        }
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max);
        return Ok(best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quads = Vec::with_capacity(sample_count.min(1 << 24) as usize);
    for _ in 0..sample_count {
        let mut q = [0usize; 4];
        let mut k = 0;
        while k < 4 {
            let c = rng.random_range(0..n);
            if !q[..k].contains(&c) {
                q[k] = c;
                k += 1;
            }
        }
        quads.push(q);
    }
    Ok(quads
        .par_iter()
        .map(|q| quadruple_delta(m, q[0], q[1], q[2], q[3]))
        .reduce(|| 0.0, f64::max))
}
