use std::collections::BinaryHeap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::groups::FinitelyGenerated;
use crate::horoball::HeapItem;
use crate::metric::finite::MAX_DENSE_POINTS;
use crate::metric::{cayley_ball, BallGraph, FiniteMetricSpace};

/// Truncation level used for a cusped space built on a ball of radius
/// `radius`: geodesics between level-1 points at distance `≤ 2·radius` stay
/// below `2 + ln(2·radius)`.
pub fn default_truncation(radius: u32) -> u32 {
    (2.0 + (2.0 * f64::from(radius.max(1))).ln()).ceil() as u32
}

/// A finite piece of the cusped space: the Cayley ball of radius `R`, with
/// a discrete combinatorial horoball glued along every parabolic coset piece
/// that has at least two vertices.
///
/// Horoball vertices sit at integer levels `2..=T`; vertical edges have
/// length 1 and a horizontal edge on level `n` has length `e^{1-n}`. Level 1
/// is the Cayley graph itself. Distances are shortest paths in this finite
/// weighted graph.
#[derive(Clone, Debug)]
pub struct CuspedSpace<E> {
    ball: BallGraph<E>,
    radius: u32,
    truncation: u32,
    /// Coset piece of every base vertex.
    coset: Vec<u32>,
    /// Coset pieces in order of their lowest vertex.
    pieces: Vec<Vec<usize>>,
    node_vertex: Vec<u32>,
    node_level: Vec<u32>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspedSummary {
    pub group: String,
    pub radius: u32,
    pub truncation: u32,
    pub base_vertices: usize,
    pub nodes: usize,
    pub edges: usize,
    pub horoballs: usize,
    pub delta_estimate: Option<f64>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

impl<E: Clone + Eq + std::hash::Hash + Sync> CuspedSpace<E> {
    /// Builds the cusped space over the ball of radius `radius`. The
    /// parabolic generator set must be closed under inverses.
    pub fn build<G: FinitelyGenerated<Element = E>>(
        group: &G,
        parabolic: &[usize],
        radius: u32,
        truncation: u32,
        max_vertices: usize,
    ) -> Result<Self> {
        let k = group.generators().len();
        if parabolic.iter().any(|&s| s >= k) {
            return Err(invalid("parabolic generator index out of range"));
        }
        for &s in parabolic {
            let inv = group.inv(&group.generators()[s])?;
            if !parabolic.iter().any(|&t| group.generators()[t] == inv) {
                return Err(invalid(format!(
                    "parabolic generators must be symmetric; inverse of {} missing",
                    group.generator_names()[s]
                )));
            }
        }
        if truncation == 0 {
            return Err(Error::Domain("truncation must be at least level 1".into()));
        }
        let ball = cayley_ball(group, radius, max_vertices)?;
        let nb = ball.len();
        let is_parabolic = |s: usize| parabolic.contains(&s);

        let mut parent: Vec<u32> = (0..nb as u32).collect();
        for v in 0..nb {
            for (w, s) in ball.neighbors(v) {
                if is_parabolic(s) {
                    let (a, b) = (find(&mut parent, v as u32), find(&mut parent, w as u32));
                    if a != b {
                        parent[a.max(b) as usize] = a.min(b);
                    }
                }
            }
        }
        let mut coset = vec![u32::MAX; nb];
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        let mut root_piece = vec![u32::MAX; nb];
        for (v, slot) in coset.iter_mut().enumerate() {
            let r = find(&mut parent, v as u32) as usize;
            if root_piece[r] == u32::MAX {
                root_piece[r] = pieces.len() as u32;
                pieces.push(Vec::new());
            }
            *slot = root_piece[r];
            pieces[root_piece[r] as usize].push(v);
        }

        let levels_above = truncation as usize - 1;
        let mut node_vertex: Vec<u32> = (0..nb as u32).collect();
        let mut node_level = vec![1u32; nb];
        // first horoball node of each base vertex, if it has a horoball
        let mut first_node = vec![usize::MAX; nb];
        for piece in pieces.iter().filter(|p| p.len() >= 2) {
            for &v in piece {
                first_node[v] = node_vertex.len();
                for level in 2..=truncation {
                    node_vertex.push(v as u32);
                    node_level.push(level);
                }
            }
        }
        let n = node_vertex.len();
        if n > max_vertices {
            return Err(Error::Size(format!(
                "cusped space has {n} nodes, cap is {max_vertices}"
            )));
        }
        let at = |v: usize, level: u32| {
            if level == 1 {
                v
            } else {
                first_node[v] + level as usize - 2
            }
        };

        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for v in 0..nb {
            for (w, s) in ball.neighbors(v) {
                adj[v].push((w as u32, 1.0));
                if is_parabolic(s) && first_node[v] != usize::MAX {
                    for level in 2..=truncation {
                        adj[at(v, level)]
                            .push((at(w, level) as u32, (1.0 - f64::from(level)).exp()));
                    }
                }
            }
            if first_node[v] != usize::MAX && levels_above > 0 {
                for level in 1..truncation {
                    let (lo, hi) = (at(v, level), at(v, level + 1));
                    adj[lo].push((hi as u32, 1.0));
                    adj[hi].push((lo as u32, 1.0));
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for list in adj {
            for (t, w) in list {
                targets.push(t);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let labels = (0..n)
            .map(|u| {
                let label = group.label(ball.vertex(node_vertex[u] as usize));
                if node_level[u] == 1 {
                    label
                } else {
                    format!("{label}@{}", node_level[u])
                }
            })
            .collect();
        Ok(CuspedSpace {
            ball,
            radius,
            truncation,
            coset,
            pieces,
            node_vertex,
            node_level,
            offsets,
            targets,
            weights,
            labels,
        })
    }

    pub fn ball(&self) -> &BallGraph<E> {
        &self.ball
    }

    pub fn node_count(&self) -> usize {
        self.node_vertex.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// Coset pieces that carry a horoball.
    pub fn horoball_pieces(&self) -> impl Iterator<Item = &[usize]> {
        self.pieces
            .iter()
            .filter(|p| p.len() >= 2)
            .map(Vec::as_slice)
    }

    pub fn coset_piece(&self, vertex: usize) -> &[usize] {
        &self.pieces[self.coset[vertex] as usize]
    }

    /// Node of base vertex `v` at `level`, if present.
    pub fn node(&self, v: usize, level: u32) -> Option<usize> {
        if v >= self.ball.len() || level == 0 || level > self.truncation {
            return None;
        }
        if level == 1 {
            return Some(v);
        }
        let piece = self.coset_piece(v);
        if piece.len() < 2 {
            return None;
        }
        (self.ball.len()..self.node_count())
            .find(|&u| self.node_vertex[u] as usize == v && self.node_level[u] == level)
    }

    pub fn node_label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn node_level(&self, u: usize) -> u32 {
        self.node_level[u]
    }

    pub fn node_vertex(&self, u: usize) -> usize {
        self.node_vertex[u] as usize
    }

    fn edges(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.weights[r])
            .map(|(&t, &w)| (t as usize, w))
    }

    /// Shortest-path distances from `source` to every node.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.node_count()];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::from([HeapItem(0.0, source)]);
        while let Some(HeapItem(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for (v, w) in self.edges(u) {
                if d + w < dist[v] {
                    dist[v] = d + w;
                    heap.push(HeapItem(d + w, v));
                }
            }
        }
        dist
    }

    /// The metric restricted to `nodes`, in the given order.
    pub fn metric_on(&self, nodes: &[usize]) -> Result<FiniteMetricSpace> {
        if nodes.len() > MAX_DENSE_POINTS {
            return Err(Error::Size(format!(
                "{} sample points exceed the dense limit",
                nodes.len()
            )));
        }
        if let Some(&bad) = nodes.iter().find(|&&u| u >= self.node_count()) {
            return Err(invalid(format!("node {bad} out of range")));
        }
        let rows: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|&s| {
                let d = self.distances_from(s);
                nodes.iter().map(|&t| d[t]).collect()
            })
            .collect();
        let mut dist: Vec<f64> = rows.into_iter().flatten().collect();
        // symmetrize away last-bit differences between the two searches
        let n = nodes.len();
        for i in 0..n {
            for j in i + 1..n {
                let m = dist[i * n + j].min(dist[j * n + i]);
                dist[i * n + j] = m;
                dist[j * n + i] = m;
            }
        }
        let labels = nodes.iter().map(|&u| self.labels[u].clone()).collect();
        FiniteMetricSpace::new(labels, dist, 0, f64::INFINITY)
    }

    /// Writes `src,dst,weight`, one row per undirected edge.
    pub fn write_edges<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["src", "dst", "weight"])?;
        for u in 0..self.node_count() {
            for (v, weight) in self.edges(u) {
                if u < v {
                    w.write_record([
                        self.labels[u].as_str(),
                        &self.labels[v],
                        &weight.to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `label,level,coset_id`.
    pub fn write_vertices<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["label", "level", "coset_id"])?;
        for u in 0..self.node_count() {
            let coset = self.coset[self.node_vertex[u] as usize];
            w.write_record([
                self.labels[u].clone(),
                self.node_level[u].to_string(),
                coset.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Sample for hyperbolicity estimates: the vertical column over the
    /// identity and the identity's coset piece on level 1, then nodes drawn
    /// without replacement by a ChaCha8 stream until `size` nodes are chosen.
    pub fn delta_sample(&self, size: usize, seed: u64) -> Vec<usize> {
        let mut chosen: Vec<usize> = (1..=self.truncation)
            .filter_map(|l| self.node(0, l))
            .collect();
        chosen.extend(self.coset_piece(0).iter().copied().filter(|&v| v != 0));
        chosen.truncate(size);
        let mut taken = vec![false; self.node_count()];
        for &u in &chosen {
            taken[u] = true;
        }
        let rest: Vec<usize> = (0..self.node_count()).filter(|&u| !taken[u]).collect();
        let want = size.saturating_sub(chosen.len()).min(rest.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks = rand::seq::index::sample(&mut rng, rest.len(), want).into_vec();
        picks.sort_unstable();
        chosen.extend(picks.into_iter().map(|k| rest[k]));
        chosen
    }

    pub fn summary(&self, group: &str, delta_estimate: Option<f64>) -> CuspedSummary {
        CuspedSummary {
            group: group.to_string(),
            radius: self.radius,
            truncation: self.truncation,
            base_vertices: self.ball.len(),
            nodes: self.node_count(),
            edges: self.edge_count(),
            horoballs: self.horoball_pieces().count(),
            delta_estimate,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horoball::FreeProductZZ2;
    use crate::metric::{MetricSpace, DEFAULT_MAX_VERTICES};

    fn space(radius: u32, t: u32) -> (FreeProductZZ2, CuspedSpace<Vec<crate::horoball::Syllable>>) {
        let g = FreeProductZZ2::new();
        let c = CuspedSpace::build(
            &g,
            &g.parabolic_generators(),
            radius,
            t,
            DEFAULT_MAX_VERTICES,
        )
        .unwrap();
        (g, c)
    }

    #[test]
    fn delta_sample_is_deterministic() {
        let (_, c) = space(3, 4);
        let a = c.delta_sample(40, 5);
        assert_eq!(a.len(), 40);
        assert_eq!(a, c.delta_sample(40, 5));
        assert_eq!(a[0], 0);
        assert_eq!(c.node_level(a[3]), 4);
        // the identity flat meets the radius-3 ball in 25 vertices
        assert!(a[4..28]
            .iter()
            .all(|&u| c.node_level(u) == 1 && c.coset_piece(u)[0] == 0));
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 40);
        assert_eq!(c.delta_sample(2, 0).len(), 2);
    }

    #[test]
    fn pieces_and_nodes() {
        let (_, c) = space(2, 3);
        // identity piece is the ℓ¹ ball of radius 2 in ℤ²
        assert_eq!(c.coset_piece(0).len(), 13);
        // the flats through a and A meet the ball in ℓ¹ radius-1 balls
        assert_eq!(c.horoball_pieces().count(), 3);
        assert_eq!(c.coset_piece(1).len(), 5);
        let extra: usize = c.horoball_pieces().map(|p| p.len() * 2).sum();
        assert_eq!(c.node_count(), c.ball().len() + extra);
        assert_eq!(c.node(0, 3).map(|u| c.node_level(u)), Some(3));
        let a2 = c
            .ball()
            .index_of(&vec![crate::horoball::Syllable::Cyclic(2)])
            .unwrap();
        assert_eq!(c.node(a2, 2), None);
    }

    #[test]
    fn horoball_shortcuts() {
        let (g, c) = space(4, 4);
        let x4 = c
            .ball()
            .index_of(&vec![crate::horoball::Syllable::Flat(4, 0)])
            .unwrap();
        let d = c.distances_from(0);
        // up to level 2, four horizontal steps of e^{-1}, down again
        let expected = 2.0 + 4.0 * (-1f64).exp();
        assert!((d[x4] - expected).abs() < 1e-12, "{} vs {expected}", d[x4]);
        let a = c.ball().index_of(&g.generators()[0]).unwrap();
        assert_eq!(d[a], 1.0);
        let m = c.metric_on(&[0, x4, a]).unwrap();
        assert_eq!(m.dist(1, 0), d[x4]);
    }

    #[test]
    fn exports_have_headers() {
        let (_, c) = space(1, 2);
        let mut e = Vec::new();
        c.write_edges(&mut e).unwrap();
        let e = String::from_utf8(e).unwrap();
        assert!(e.starts_with("src,dst,weight\n"));
        assert_eq!(e.lines().count() - 1, c.edge_count());
        let mut v = Vec::new();
        c.write_vertices(&mut v).unwrap();
        assert!(String::from_utf8(v)
            .unwrap()
            .starts_with("label,level,coset_id\ne,1,0\n"));
    }

    #[test]
    fn rejects_asymmetric_parabolics() {
        let g = FreeProductZZ2::new();
        assert!(CuspedSpace::build(&g, &[2], 2, 3, DEFAULT_MAX_VERTICES).is_err());
        assert!(CuspedSpace::build(&g, &[9], 2, 3, DEFAULT_MAX_VERTICES).is_err());
        assert_eq!(default_truncation(5), 5);
    }
}
