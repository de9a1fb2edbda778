use std::io::{Read, Write};

use crate::error::{invalid, Error, Result};
use crate::metric::MetricSpace;

/// Largest point count for which a dense distance table is materialised.
pub const MAX_DENSE_POINTS: usize = 12_000;

/// A labelled point set with a dense distance table.
///
/// Distances are certified exact for pairs `x, y` with
/// `(|x|₀ + |y|₀ + d(x, y)) / 2 ≤ exactness_radius`, where `|·|₀` is the
/// distance to the basepoint. Any geodesic between such a pair stays inside
/// the radius, so a ball-restricted shortest path cannot have been cut.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    basepoint: usize,
    exactness_radius: f64,
    depth: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Builds a space from a row-major `n × n` table, checking symmetry,
    /// nonnegativity and the zero diagonal.
    pub fn new(
        labels: Vec<String>,
        dist: Vec<f64>,
        basepoint: usize,
        exactness_radius: f64,
    ) -> Result<Self> {
        let n = labels.len();
        if n > MAX_DENSE_POINTS {
            return Err(Error::Size(format!(
                "{n} points exceed the dense-table limit {MAX_DENSE_POINTS}"
            )));
        }
        if dist.len() != n * n {
            return Err(invalid(format!(
                "distance table has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        if n > 0 && basepoint >= n {
            return Err(invalid("basepoint out of range"));
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(invalid(format!("d({0},{0}) is not zero", labels[i])));
            }
            for j in 0..i {
                let (a, b) = (dist[i * n + j], dist[j * n + i]);
                if a.is_nan() || a < 0.0 {
                    return Err(invalid(format!(
                        "d({},{}) is negative or NaN",
                        labels[i], labels[j]
                    )));
                }
                if a != b {
                    return Err(invalid(format!(
                        "asymmetric distance between {} and {}",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let depth = if n == 0 {
            vec![]
        } else {
            dist[basepoint * n..(basepoint + 1) * n].to_vec()
        };
        Ok(FiniteMetricSpace {
            labels,
            dist,
            basepoint,
            exactness_radius,
            depth,
        })
    }

    /// Copies the distances of `m` into a dense table with basepoint 0.
    pub fn materialize<M: MetricSpace + ?Sized>(m: &M, exactness_radius: f64) -> Result<Self> {
        let n = m.len();
        if n > MAX_DENSE_POINTS {
            return Err(Error::Size(format!(
                "{n} points exceed the dense-table limit {MAX_DENSE_POINTS}"
            )));
        }
        let labels = (0..n).map(|i| m.label(i)).collect();
        let dist = (0..n * n).map(|k| m.dist(k / n, k % n)).collect();
        Self::new(labels, dist, 0, exactness_radius)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn exactness_radius(&self) -> f64 {
        self.exactness_radius
    }

    /// Distance from the basepoint.
    pub fn depth(&self, i: usize) -> f64 {
        self.depth[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Returns the first certified triple violating the triangle inequality
    /// beyond `tol`, if any.
    pub fn triangle_violation(&self, tol: f64) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.is_certified(i, j)
                        && self.is_certified(j, k)
                        && self.is_certified(i, k)
                        && self.dist(i, k) > self.dist(i, j) + self.dist(j, k) + tol
                    {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Reads a CSV matrix whose header row holds the labels. Imported spaces
    /// are fully certified and use the first point as basepoint.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let labels: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let n = labels.len();
        let mut dist = Vec::with_capacity(n * n);
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != n {
                return Err(invalid(format!(
                    "row {row} has {} fields, expected {n}",
                    rec.len()
                )));
            }
            for field in rec.iter() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("row {row}: `{field}` is not a number")))?;
                dist.push(v);
            }
        }
        Self::new(labels, dist, 0, f64::INFINITY)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.labels)?;
        let n = self.len();
        for i in 0..n {
            w.write_record(self.dist[i * n..(i + 1) * n].iter().map(|d| fmt_number(*d)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integers print without a fractional part, everything else round-trips.
pub(crate) fn fmt_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl MetricSpace for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }

    fn is_certified(&self, i: usize, j: usize) -> bool {
        (self.depth[i] + self.depth[j] + self.dist(i, j)) / 2.0 <= self.exactness_radius
    }

    fn ball_is_certified(&self, center: usize, r: f64) -> bool {
        self.depth[center] + 2.0 * r <= self.exactness_radius
    }

    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }
}
