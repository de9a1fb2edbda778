use serde::Serialize;

use crate::audit::separated_count;
use crate::error::{invalid, Error, Result};
use crate::groups::FinitelyGenerated;
use crate::horoball::{horoball_rho, sample_extent, HoroballSample};
use crate::metric::{cayley_ball, MetricSpace, WordMetric, DIST_EPS};

/// One radius of an [`OrbitReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitRow {
    pub radius: f64,
    /// Level-1 vertices within `ρ ≤ R` of `(e, 1)`, counted by distance.
    pub orbit_count: u64,
    /// `gr(⌊2 sinh(R/2)⌋)`.
    pub growth_at_reach: u64,
    pub identity_holds: bool,
    /// `gr(⌊e^{R/2}⌋)`.
    pub growth_at_exp: u64,
    /// 2-separated points of `B((e, 1), R)`.
    pub separated: usize,
    pub chain_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub model: String,
    pub rows: Vec<OrbitRow>,
    /// Least-squares slope of `ln f(R)` against `R`.
    pub beta: f64,
    /// `β / α` with `α = 1/2`: the degree of the implied polynomial bound.
    pub implied_degree: f64,
}

impl OrbitReport {
    pub fn identity_holds(&self) -> bool {
        self.rows.iter().all(|r| r.identity_holds)
    }

    pub fn chain_holds(&self) -> bool {
        self.rows.iter().all(|r| r.chain_holds)
    }
}

/// Compares orbit counts in `C(G)` with the growth of `G`, and the growth
/// at `e^{R/2}` with the separated count `f(R)` of the complete ball.
pub fn orbit_growth_audit<G: FinitelyGenerated>(
    group: &G,
    radii: &[f64],
    max_points: usize,
) -> Result<OrbitReport> {
    let mut rows = Vec::new();
    for &r in radii {
        if !(r >= 0.0) {
            return Err(invalid(format!("radius must be nonnegative, got {r}")));
        }
        let reach = (2.0 * (r / 2.0).sinh() + DIST_EPS).floor() as u32;
        let exp_reach = ((r / 2.0).exp() + DIST_EPS).floor() as u32;
        let table = cayley_ball(group, reach.max(exp_reach) + 1, max_points)?;
        let gr = table.growth();
        let orbit_count = table
            .word_lengths()
            .iter()
            .filter(|&&n| horoball_rho(f64::from(n), 1.0, 1.0) <= r + DIST_EPS)
            .count() as u64;
        let growth_at_reach = gr[reach as usize];

        let (base_radius, top) = sample_extent(1, r);
        let base = WordMetric::new(group, base_radius, max_points)?;
        let points = base.len().saturating_mul(top as usize);
        if points > max_points {
            return Err(Error::Size(format!(
                "complete ball of radius {r} needs {points} points, limit {max_points}"
            )));
        }
        let sample = HoroballSample::new(base, top)?;
        let separated = separated_count(&sample, 0, r, 2.0)?;
        let growth_at_exp = gr[exp_reach as usize];
        rows.push(OrbitRow {
            radius: r,
            orbit_count,
            growth_at_reach,
            identity_holds: orbit_count == growth_at_reach,
            growth_at_exp,
            separated,
            chain_holds: growth_at_exp <= separated as u64,
        });
    }
    let beta = slope(
        rows.iter()
            .map(|row| (row.radius, (row.separated as f64).ln())),
    );
    Ok(OrbitReport {
        model: group.display_name(),
        rows,
        beta,
        implied_degree: 2.0 * beta,
    })
}

fn slope(points: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points.collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}
