use serde::{Deserialize, Serialize};

use crate::audit::spaces::{IntegerGrid, IntegerLine, RegularTree};
use crate::error::{invalid, Error, Result};
use crate::metric::{ball, MetricSpace, DIST_EPS};

/// A cover of a finite space by bounded sets, with its `d`-multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub space: String,
    pub scale: f64,
    pub diameter_bound: f64,
    /// Point indices of each set.
    pub sets: Vec<Vec<usize>>,
    /// Filled in by [`check_cover_certificate`].
    pub multiplicity: Option<usize>,
    pub claimed_asdim: Option<usize>,
}

/// The exported form, with point labels in place of indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub scale: f64,
    pub diameter_bound: f64,
    pub sets: Vec<Vec<String>>,
    pub multiplicity: Option<usize>,
    pub claimed_asdim: Option<usize>,
}

impl CoverCertificate {
    pub fn to_json<M: MetricSpace + ?Sized>(&self, space: &M) -> CertificateJson {
        CertificateJson {
            scale: self.scale,
            diameter_bound: self.diameter_bound,
            sets: self
                .sets
                .iter()
                .map(|s| s.iter().map(|&i| space.label(i)).collect())
                .collect(),
            multiplicity: self.multiplicity,
            claimed_asdim: self.claimed_asdim,
        }
    }

    pub fn from_json<M: MetricSpace + ?Sized>(
        json: &CertificateJson,
        space: &M,
        name: &str,
    ) -> Result<Self> {
        let index: std::collections::HashMap<String, usize> =
            (0..space.len()).map(|i| (space.label(i), i)).collect();
        let sets = json
            .sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|l| {
                        index
                            .get(l)
                            .copied()
                            .ok_or_else(|| invalid(format!("unknown point `{l}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoverCertificate {
            space: name.to_string(),
            scale: json.scale,
            diameter_bound: json.diameter_bound,
            sets,
            multiplicity: json.multiplicity,
            claimed_asdim: json.claimed_asdim,
        })
    }

    /// Whether the verified multiplicity is at most `claimed_asdim + 1`.
    pub fn is_consistent(&self) -> Option<bool> {
        Some(self.multiplicity? <= self.claimed_asdim? + 1)
    }
}

/// Outcome of [`check_cover_certificate`].
#[derive(Clone, Debug, PartialEq)]
pub struct CheckedCertificate {
    pub certificate: CoverCertificate,
    /// First point whose `d`-ball meets the maximal number of sets.
    pub witness: usize,
}

/// Verifies union and diameters, then counts for every point how many sets
/// meet its closed `d`-ball.
pub fn check_cover_certificate<M: MetricSpace + ?Sized>(
    space: &M,
    cert: &CoverCertificate,
) -> Result<CheckedCertificate> {
    let n = space.len();
    let mut owners: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (k, set) in cert.sets.iter().enumerate() {
        for &p in set {
            if p >= n {
                return Err(Error::InvalidCertificate(format!(
                    "set {k} names point {p}, outside the space"
                )));
            }
            owners[p].push(k as u32);
        }
    }
    if let Some(p) = owners.iter().position(Vec::is_empty) {
        return Err(Error::InvalidCertificate(format!(
            "point {} is in no set",
            space.label(p)
        )));
    }
    for (k, set) in cert.sets.iter().enumerate() {
        for (a, &p) in set.iter().enumerate() {
            for &q in &set[a + 1..] {
                let d = space.dist(p, q);
                if d > cert.diameter_bound + DIST_EPS {
                    return Err(Error::InvalidCertificate(format!(
                        "set {k} has diameter at least {d} > {} between {} and {}",
                        cert.diameter_bound,
                        space.label(p),
                        space.label(q)
                    )));
                }
            }
        }
    }
    let mut best = (0, 0);
    let mut seen = vec![u32::MAX; cert.sets.len()];
    for x in 0..n {
        let near = match space.ball_points(x, cert.scale) {
            Some(list) => list.into_iter().map(|(p, _)| p).collect(),
            None => ball(space, x, cert.scale),
        };
        let mut count = 0;
        for p in near {
            for &k in &owners[p] {
                if seen[k as usize] != x as u32 {
                    seen[k as usize] = x as u32;
                    count += 1;
                }
            }
        }
        if count > best.0 {
            best = (count, x);
        }
    }
    let mut certificate = cert.clone();
    certificate.multiplicity = Some(best.0);
    Ok(CheckedCertificate {
        certificate,
        witness: best.1,
    })
}

/// Spaces with a standard low-multiplicity cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsdimKind {
    IntegerLine,
    #[serde(rename = "integer_grid_2d")]
    IntegerGrid2d,
    RegularTree,
}

/// The space a certificate of [`build_asdim_certificate`] lives on.
#[derive(Clone, Debug, PartialEq)]
pub enum AsdimSpace {
    Line(IntegerLine),
    Grid(IntegerGrid),
    Tree(RegularTree),
}

impl AsdimSpace {
    pub fn as_metric(&self) -> &dyn MetricSpace {
        match self {
            AsdimSpace::Line(s) => s,
            AsdimSpace::Grid(s) => s,
            AsdimSpace::Tree(s) => s,
        }
    }
}

/// Upper limit on the number of points of a certificate space.
pub const MAX_CERTIFICATE_POINTS: usize = 1_000_000;

/// Builds the standard cover at scale `d`.
///
/// * line of `extent` points: consecutive blocks of `4d+1` points;
/// * `extent × extent` grid: bricks `8d+2` wide in rows `4d+1` high, odd
///   rows shifted by `2d+1`;
/// * ball of radius `extent` in the `valence`-regular tree: annuli of depth
///   `L = 4d+1`, the `k`-th annulus split by the ancestor at depth `kL − d`.
pub fn build_asdim_certificate(
    kind: AsdimKind,
    extent: usize,
    d: u32,
    valence: usize,
) -> Result<(AsdimSpace, CoverCertificate)> {
    if extent == 0 {
        return Err(invalid("extent must be positive"));
    }
    let d64 = u64::from(d);
    let too_big = |n: usize| {
        Error::Size(format!(
            "{n} points exceed the certificate limit {MAX_CERTIFICATE_POINTS}"
        ))
    };
    match kind {
        AsdimKind::IntegerLine => {
            if extent > MAX_CERTIFICATE_POINTS {
                return Err(too_big(extent));
            }
            let space = IntegerLine {
                start: 0,
                len: extent,
            };
            let block = (4 * d64 + 1) as usize;
            let sets = (0..extent)
                .step_by(block)
                .map(|s| (s..(s + block).min(extent)).collect())
                .collect();
            let cert = CoverCertificate {
                space: format!("integer_line:{extent}"),
                scale: f64::from(d),
                diameter_bound: (block - 1) as f64,
                sets,
                multiplicity: None,
                claimed_asdim: Some(1),
            };
            Ok((AsdimSpace::Line(space), cert))
        }
        AsdimKind::IntegerGrid2d => {
            let n = extent
                .checked_mul(extent)
                .filter(|&n| n <= MAX_CERTIFICATE_POINTS)
                .ok_or_else(|| too_big(usize::MAX))?;
            let space = IntegerGrid::new(extent, extent);
            let h = 4 * d64 + 1;
            let w = 8 * d64 + 2;
            let shift = 2 * d64 + 1;
            let mut sets: Vec<Vec<usize>> = Vec::new();
            let mut key_of = std::collections::BTreeMap::new();
            for i in 0..n {
                let (x, y) = space.coordinates(i);
                let row = y as u64 / h;
                let offset = if row % 2 == 1 { shift } else { 0 };
                let brick = (x as u64 + w - offset) / w;
                let k = *key_of.entry((row, brick)).or_insert_with(|| {
                    sets.push(Vec::new());
                    sets.len() - 1
                });
                sets[k].push(i);
            }
            let cert = CoverCertificate {
                space: format!("integer_grid_2d:{extent}x{extent}"),
                scale: f64::from(d),
                diameter_bound: (w - 1 + h - 1) as f64,
                sets,
                multiplicity: None,
                claimed_asdim: Some(2),
            };
            Ok((AsdimSpace::Grid(space), cert))
        }
        AsdimKind::RegularTree => {
            if valence < 2 {
                return Err(invalid("tree valence must be at least 2"));
            }
            let count = (1..=extent).try_fold(1usize, |acc, k| {
                let layer = valence.checked_mul((valence - 1).checked_pow(k as u32 - 1)?)?;
                acc.checked_add(layer)
                    .filter(|&n| n <= MAX_CERTIFICATE_POINTS)
            });
            if count.is_none() {
                return Err(too_big(usize::MAX));
            }
            let space = RegularTree::new(valence, extent as u32);
            let l = 4 * d + 1;
            let mut sets: Vec<Vec<usize>> = Vec::new();
            let mut key_of = std::collections::BTreeMap::new();
            for v in 0..space.len() {
                let k = space.depth(v) / l;
                let anchor = if k == 0 {
                    0
                } else {
                    space.ancestor(v, k * l - d)
                };
                let s = *key_of.entry((k, anchor)).or_insert_with(|| {
                    sets.push(Vec::new());
                    sets.len() - 1
                });
                sets[s].push(v);
            }
            let cert = CoverCertificate {
                space: format!("regular_tree:{valence}:{extent}"),
                scale: f64::from(d),
                diameter_bound: f64::from(2 * (l - 1 + d)),
                sets,
                multiplicity: None,
                claimed_asdim: Some(1),
            };
            Ok((AsdimSpace::Tree(space), cert))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(n: usize, size: usize, d: f64) -> CoverCertificate {
        CoverCertificate {
            space: "line".into(),
            scale: d,
            diameter_bound: (size - 1) as f64,
            sets: (0..n)
                .step_by(size)
                .map(|s| (s..(s + size).min(n)).collect())
                .collect(),
            multiplicity: None,
            claimed_asdim: Some(1),
        }
    }

    #[test]
    fn hand_counted_blocks() {
        let line = IntegerLine { start: 0, len: 100 };
        let c = check_cover_certificate(&line, &blocks(100, 10, 1.0)).unwrap();
        assert_eq!(c.certificate.multiplicity, Some(2));
        assert_eq!(c.witness, 9);
        assert_eq!(c.certificate.is_consistent(), Some(true));
        let c = check_cover_certificate(&line, &blocks(100, 10, 6.0)).unwrap();
        assert_eq!(c.certificate.multiplicity, Some(3));
        assert_eq!(c.certificate.is_consistent(), Some(false));
        let whole = CoverCertificate {
            space: "line".into(),
            scale: 5.0,
            diameter_bound: 99.0,
            sets: vec![(0..100).collect()],
            multiplicity: None,
            claimed_asdim: Some(0),
        };
        assert_eq!(
            check_cover_certificate(&line, &whole)
                .unwrap()
                .certificate
                .multiplicity,
            Some(1)
        );
    }

    #[test]
    fn rejects_bad_covers() {
        let line = IntegerLine { start: 0, len: 20 };
        let mut c = blocks(20, 5, 1.0);
        c.sets[1].pop();
        match check_cover_certificate(&line, &c) {
            Err(Error::InvalidCertificate(m)) => assert!(m.contains("point 9"), "{m}"),
            other => panic!("{other:?}"),
        }
        let mut c = blocks(20, 5, 1.0);
        c.diameter_bound = 3.0;
        match check_cover_certificate(&line, &c) {
            Err(Error::InvalidCertificate(m)) => assert!(m.contains("set 0"), "{m}"),
            other => panic!("{other:?}"),
        }
        let mut c = blocks(20, 5, 1.0);
        c.sets[0].push(99);
        assert!(matches!(
            check_cover_certificate(&line, &c),
            Err(Error::InvalidCertificate(_))
        ));
    }

    #[test]
    fn standard_covers() {
        for (kind, extent, d, expect) in [
            (AsdimKind::IntegerLine, 200, 3, 2),
            (AsdimKind::IntegerGrid2d, 60, 2, 3),
            (AsdimKind::RegularTree, 10, 1, 2),
        ] {
            let (space, cert) = build_asdim_certificate(kind, extent, d, 3).unwrap();
            let checked = check_cover_certificate(space.as_metric(), &cert).unwrap();
            assert_eq!(checked.certificate.multiplicity, Some(expect), "{kind:?}");
            assert_eq!(checked.certificate.is_consistent(), Some(true));
        }
    }

    #[test]
    fn json_round_trip() {
        let (space, cert) = build_asdim_certificate(AsdimKind::IntegerLine, 12, 1, 0).unwrap();
        let json = cert.to_json(space.as_metric());
        assert_eq!(json.sets[0], vec!["0", "1", "2", "3", "4"]);
        let back = CoverCertificate::from_json(&json, space.as_metric(), &cert.space).unwrap();
        assert_eq!(back, cert);
    }
}
