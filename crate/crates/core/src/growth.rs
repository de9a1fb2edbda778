//! Growth functions, polynomial-degree fits, and the covering criterion for
//! polynomial growth.

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::groups::FinitelyGenerated;
use crate::metric::{cayley_ball, greedy_cover, max_packing, MetricSpace, WordMetric};

/// Exact ball cardinalities `gr(0), …, gr(R_max)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub model: String,
    pub gr: Vec<u64>,
}

impl GrowthTable {
    pub fn r_max(&self) -> u32 {
        self.gr.len() as u32 - 1
    }

    /// First `(R₁, R₂)` with `gr(R₁+R₂) > gr(R₁)·gr(R₂)`, if any.
    pub fn submultiplicativity_violation(&self) -> Option<(usize, usize)> {
        let n = self.gr.len();
        (0..n)
            .flat_map(|a| (a..n - a).map(move |b| (a, b)))
            .find(|&(a, b)| {
                u128::from(self.gr[a + b]) > u128::from(self.gr[a]) * u128::from(self.gr[b])
            })
    }

    /// Writes `R,gr,N_eps`; `counts` holds `(R, N)` pairs, blank where absent.
    pub fn write_csv<W: Write>(&self, writer: W, counts: &[(u32, u64)]) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["R", "gr", "N_eps"])?;
        for (r, g) in self.gr.iter().enumerate() {
            let n = counts
                .iter()
                .find(|(cr, _)| *cr as usize == r)
                .map(|(_, n)| n.to_string());
            w.write_record([r.to_string(), g.to_string(), n.unwrap_or_default()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn growth_table<G: FinitelyGenerated>(
    group: &G,
    r_max: u32,
    max_vertices: usize,
) -> Result<GrowthTable> {
    let ball = cayley_ball(group, r_max, max_vertices)?;
    Ok(GrowthTable {
        model: group.display_name(),
        gr: ball.growth(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    Polynomial { degree: f64 },
    Exponential { base: f64 },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub p: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    pub window: [u32; 2],
    /// Max absolute deviation of `ln gr` from the log–log fit.
    pub residual: f64,
    /// Same for the fit of `ln gr` against `R`.
    pub semilog_residual: f64,
    pub verdict: Verdict,
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept, max |residual|)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    (slope, intercept, res)
}

/// Fits `gr(R) ≈ K·R^p` on `[lo, hi]` and compares against `gr(R) ≈ K·b^R`.
///
/// The verdict is exponential when the semilog fit has strictly smaller
/// residual.
pub fn fit_degree(table: &GrowthTable, lo: u32, hi: u32) -> Result<GrowthFit> {
    if lo < 2 || hi > table.r_max() || hi < lo + 2 {
        return Err(invalid(format!(
            "fit window [{lo}, {hi}] needs 2 ≤ lo, at least 3 radii, and hi ≤ {}",
            table.r_max()
        )));
    }
    let radii: Vec<f64> = (lo..=hi).map(f64::from).collect();
    let log_gr: Vec<f64> = (lo..=hi)
        .map(|r| (table.gr[r as usize] as f64).ln())
        .collect();
    let log_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let (p, _, residual) = line_fit(&log_r, &log_gr);
    let (b, _, semilog_residual) = line_fit(&radii, &log_gr);
    let ratios = (lo..=hi).map(|r| table.gr[r as usize] as f64 / f64::from(r).powf(p));
    let (k1, k2) = ratios.fold((f64::INFINITY, 0.0f64), |(a, z), x| (a.min(x), z.max(x)));
    let verdict = if semilog_residual < residual {
        Verdict::Exponential { base: b.exp() }
    } else {
        Verdict::Polynomial { degree: p }
    };
    Ok(GrowthFit {
        p,
        k1,
        k2,
        window: [lo, hi],
        residual,
        semilog_residual,
        verdict,
    })
}

/// Greedy count `N(ε, R)` of `εR`-balls centred in `B(R)` covering `B(R)`,
/// for each radius.
///
/// Distances are word distances by translation; pairs too far apart for the
/// lookup table are treated as farther than `εR`, which they are.
pub fn covering_constant<G: FinitelyGenerated>(
    group: &G,
    eps: f64,
    radii: &[u32],
    max_vertices: usize,
) -> Result<Vec<u64>> {
    check_eps(eps)?;
    let Some(&r_max) = radii.iter().max() else {
        return Ok(Vec::new());
    };
    let table_radius = if group.closed_word_length(&group.identity()).is_some() {
        r_max
    } else {
        (eps * f64::from(r_max)).ceil() as u32
    };
    let wm = WordMetric::with_table_radius(group, r_max, table_radius, max_vertices)?;
    let growth = wm.ball().growth();
    radii
        .iter()
        .map(|&r| {
            if r == 0 {
                return Ok(1);
            }
            let subset: Vec<usize> = (0..growth[r as usize] as usize).collect();
            Ok(greedy_cover(&wm, &subset, eps * f64::from(r))?.len() as u64)
        })
        .collect()
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("ε must lie in (0, 1), got {eps}")))
    }
}

/// `gr1 · R^{−log N / log ε}`: the growth bound implied by covering every
/// ball by `N` balls of `ε` times its radius.
pub fn lemma11_bound(n: u64, eps: f64, gr1: u64, r: f64) -> Result<f64> {
    check_eps(eps)?;
    if n == 0 || !(r >= 1.0) {
        return Err(Error::Domain(format!(
            "need N ≥ 1 and R ≥ 1, got N = {n}, R = {r}"
        )));
    }
    Ok(gr1 as f64 * r.powf(-(n as f64).ln() / eps.ln()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PackingWitness {
    pub radius: u32,
    /// Disjoint balls of radius `εR/4` need centres at least this far apart.
    pub separation: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct A1A2Report {
    pub model: String,
    pub eps: f64,
    pub radii: Vec<u32>,
    pub counts: Vec<u64>,
    pub gr: Vec<u64>,
    /// `gr(R) ≤ N(ε,R)·gr(⌊εR⌋)` per radius.
    pub iteration_holds: Vec<bool>,
    pub bounded_n: bool,
    pub fit: GrowthFit,
    pub polynomial: bool,
    pub packing_witness: Option<PackingWitness>,
    pub verdict: String,
}

/// Counts are bounded when the second half of the radii never exceeds the
/// maximum over the first half by more than a factor of two.
pub fn counts_bounded(counts: &[u64]) -> bool {
    if counts.len() < 2 {
        return true;
    }
    let half = counts.len() / 2;
    let early = counts[..half].iter().copied().max().unwrap_or(1).max(1);
    counts[half..].iter().all(|&n| n <= 2 * early)
}

/// Measures both sides of the equivalence between covering balls by
/// boundedly many `εR`-balls and polynomial growth.
pub fn a1_a2_report<G: FinitelyGenerated>(
    group: &G,
    eps: f64,
    radii: &[u32],
    window: (u32, u32),
    max_vertices: usize,
) -> Result<A1A2Report> {
    check_eps(eps)?;
    let mut radii = radii.to_vec();
    radii.sort_unstable();
    radii.dedup();
    let r_max = radii.last().copied().unwrap_or(0).max(window.1);
    let table = growth_table(group, r_max, max_vertices)?;
    let fit = fit_degree(&table, window.0, window.1)?;
    let counts = covering_constant(group, eps, &radii, max_vertices)?;
    let iteration_holds = radii
        .iter()
        .zip(&counts)
        .map(|(&r, &n)| {
            let inner = (eps * f64::from(r) + 1e-9).floor() as usize;
            u128::from(table.gr[r as usize]) <= u128::from(n) * u128::from(table.gr[inner])
        })
        .collect();
    let bounded_n = counts_bounded(&counts);
    let polynomial = matches!(fit.verdict, Verdict::Polynomial { .. });

    let packing_witness = match radii.last() {
        Some(&r) if !bounded_n && r > 0 => {
            let separation = (eps * f64::from(r) / 2.0).floor() + 1.0;
            // only distances below the separation need to be exact
            let wm = WordMetric::with_table_radius(group, r, separation as u32, max_vertices)?;
            let subset: Vec<usize> = (0..wm.len()).collect();
            let count = max_packing(&wm, &subset, separation)?.len();
            Some(PackingWitness {
                radius: r,
                separation,
                count,
            })
        }
        _ => None,
    };
    let verdict = if bounded_n == polynomial {
        "CONSISTENT"
    } else {
        "INCONSISTENT"
    }
    .to_string();
    Ok(A1A2Report {
        model: group.display_name(),
        eps,
        gr: radii.iter().map(|&r| table.gr[r as usize]).collect(),
        radii,
        counts,
        iteration_holds,
        bounded_n,
        fit,
        polynomial,
        packing_witness,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupModel;
    use crate::metric::DEFAULT_MAX_VERTICES;

    #[test]
    fn table_examples() {
        let t = growth_table(&GroupModel::free_abelian(2), 2, DEFAULT_MAX_VERTICES).unwrap();
        assert_eq!(t.gr, vec![1, 5, 13]);
        let t = growth_table(&GroupModel::free(2), 3, DEFAULT_MAX_VERTICES).unwrap();
        assert_eq!(t.gr[3], 53);
        assert_eq!(t.submultiplicativity_violation(), None);
        let t = growth_table(&GroupModel::heisenberg(), 0, DEFAULT_MAX_VERTICES).unwrap();
        assert_eq!(t.gr, vec![1]);
    }

    #[test]
    fn fits() {
        let z = growth_table(&GroupModel::free_abelian(1), 40, DEFAULT_MAX_VERTICES).unwrap();
        let f = fit_degree(&z, 5, 40).unwrap();
        assert!((f.p - 1.0).abs() < 0.05, "{f:?}");
        assert!(matches!(f.verdict, Verdict::Polynomial { .. }));
        for r in 5..=40u32 {
            let ratio = z.gr[r as usize] as f64 / f64::from(r).powf(f.p);
            assert!(f.k1 <= ratio + 1e-12 && ratio <= f.k2 + 1e-12);
        }
        let f2 = growth_table(&GroupModel::free(2), 10, DEFAULT_MAX_VERTICES).unwrap();
        match fit_degree(&f2, 4, 10).unwrap().verdict {
            Verdict::Exponential { base } => assert!((base - 3.0).abs() < 0.2, "{base}"),
            v => panic!("{v:?}"),
        }
        assert!(fit_degree(&f2, 1, 10).is_err());
        assert!(fit_degree(&f2, 4, 5).is_err());
        assert!(fit_degree(&f2, 4, 11).is_err());
    }

    #[test]
    fn covering_examples() {
        let z = GroupModel::free_abelian(1);
        let radii: Vec<u32> = (1..=64).collect();
        let n = covering_constant(&z, 0.5, &radii, DEFAULT_MAX_VERTICES).unwrap();
        assert!(n.iter().all(|&k| k <= 3), "{n:?}");
        let f2 = GroupModel::free(2);
        let n = covering_constant(&f2, 0.5, &[4, 6, 8], DEFAULT_MAX_VERTICES).unwrap();
        assert!(n.windows(2).all(|w| w[0] < w[1]), "{n:?}");
        assert!(covering_constant(&z, 1.0, &[3], DEFAULT_MAX_VERTICES).is_err());
    }

    #[test]
    fn bound_examples() {
        let b = lemma11_bound(3, 0.5, 3, 16.0).unwrap();
        assert!((b - 243.0).abs() < 1e-9);
        assert_eq!(lemma11_bound(1, 0.5, 7, 100.0).unwrap(), 7.0);
        assert!(lemma11_bound(0, 0.5, 3, 2.0).is_err());
        assert!(lemma11_bound(3, 1.5, 3, 2.0).is_err());
        assert!(lemma11_bound(3, 0.5, 3, 0.5).is_err());
    }

    #[test]
    fn bounded_rule() {
        assert!(counts_bounded(&[3, 5, 4, 6, 5]));
        assert!(!counts_bounded(&[3, 9, 27, 81]));
        assert!(counts_bounded(&[1]));
    }

    #[test]
    fn csv_export() {
        let t = growth_table(&GroupModel::free_abelian(1), 2, DEFAULT_MAX_VERTICES).unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out, &[(2, 3)]).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "R,gr,N_eps\n0,1,\n1,3,\n2,5,3\n"
        );
    }
}
