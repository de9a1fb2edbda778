use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::metric::{ball, greedy_cover_from, MetricSpace};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub radius: f64,
    pub basepoint: String,
    /// Greedy count of radius-1 balls covering `B(basepoint, R)`.
    pub f_cover: usize,
    /// Greedy count of radius-`1/R` balls covering `B(basepoint, 1)`.
    pub f_fine: usize,
    pub ball_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryProfile {
    pub space: String,
    pub entries: Vec<ProfileEntry>,
}

impl GeometryProfile {
    /// `max / min` of `f_cover` over basepoints at radius `r`.
    pub fn cover_ratio(&self, r: f64) -> Option<f64> {
        let counts: Vec<f64> = self
            .entries
            .iter()
            .filter(|e| e.radius == r)
            .map(|e| e.f_cover as f64)
            .collect();
        let max = counts.iter().copied().reduce(f64::max)?;
        let min = counts.iter().copied().reduce(f64::min)?;
        Some(max / min)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["R", "basepoint", "f_cover", "f_fine"])?;
        for e in &self.entries {
            w.write_record([
                e.radius.to_string(),
                e.basepoint.clone(),
                e.f_cover.to_string(),
                e.f_fine.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Both covering clauses of bounded geometry, per radius and basepoint.
///
/// Every ball must be complete and certified in `space`, and hold at most
/// `max_points` points.
pub fn geometry_profile<M: MetricSpace + ?Sized>(
    space: &M,
    name: &str,
    radii: &[f64],
    basepoints: &[usize],
    max_points: usize,
) -> Result<GeometryProfile> {
    let mut entries = Vec::new();
    for &r in radii {
        if !(r >= 0.0) {
            return Err(invalid(format!("radius must be nonnegative, got {r}")));
        }
        for &b in basepoints {
            if b >= space.len() {
                return Err(invalid(format!("basepoint {b} out of range")));
            }
            if !space.ball_is_certified(b, r.max(1.0)) {
                return Err(Error::Exactness(format!(
                    "ball of radius {} around {} is not certified",
                    r.max(1.0),
                    space.label(b)
                )));
            }
            let big = ball(space, b, r);
            if big.len() > max_points {
                return Err(Error::Size(format!(
                    "ball of radius {r} around {} has {} points, limit {max_points}",
                    space.label(b),
                    big.len()
                )));
            }
            let f_cover = greedy_cover_from(space, &big, 1.0, b)?.len();
            let unit = ball(space, b, 1.0);
            let f_fine = if r <= 1.0 {
                1
            } else {
                greedy_cover_from(space, &unit, 1.0 / r, b)?.len()
            };
            entries.push(ProfileEntry {
                radius: r,
                basepoint: space.label(b),
                f_cover,
                f_fine,
                ball_size: big.len(),
            });
        }
    }
    Ok(GeometryProfile {
        space: name.to_string(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::IntegerLine;

    #[test]
    fn line_examples() {
        let line = IntegerLine {
            start: -10,
            len: 21,
        };
        let p = geometry_profile(&line, "Z", &[1.0, 3.0], &[10], 1000).unwrap();
        assert_eq!(p.entries[0].f_cover, 1);
        assert_eq!(p.entries[1].f_cover, 3);
        assert_eq!(p.entries[1].ball_size, 7);
        // unit balls of an integer line are covered by singletons at radius 1/3
        assert_eq!(p.entries[1].f_fine, 3);
        assert_eq!(p.cover_ratio(3.0), Some(1.0));
        let mut out = Vec::new();
        p.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "R,basepoint,f_cover,f_fine\n1,0,1,1\n3,0,3,3\n"
        );
    }

    #[test]
    fn errors() {
        let line = IntegerLine { start: 0, len: 10 };
        assert!(matches!(
            geometry_profile(&line, "", &[3.0], &[1], 100),
            Err(Error::Exactness(_))
        ));
        assert!(matches!(
            geometry_profile(&line, "", &[3.0], &[5], 3),
            Err(Error::Size(_))
        ));
        assert!(geometry_profile(&line, "", &[-1.0], &[5], 3).is_err());
    }
}
