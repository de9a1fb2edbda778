use std::collections::{HashMap, VecDeque};
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::FinitelyGenerated;
use crate::metric::finite::MAX_DENSE_POINTS;
use crate::metric::FiniteMetricSpace;

/// Default vertex cap for Cayley balls.
pub const DEFAULT_MAX_VERTICES: usize = 5_000_000;

const OUTSIDE: u32 = u32::MAX;

/// The ball of radius `radius` around the identity in a Cayley graph.
///
/// Vertices are stored in BFS discovery order; generator order fixes that
/// order, so index 0 is always the identity.
#[derive(Clone, Debug)]
pub struct BallGraph<E> {
    group_name: String,
    generator_names: Vec<String>,
    radius: u32,
    vertices: Vec<E>,
    word_length: Vec<u32>,
    index: HashMap<E, u32>,
    /// `neighbors[v * k + s]` is the index of `v · s`, or `OUTSIDE`.
    neighbors: Vec<u32>,
    sphere_sizes: Vec<usize>,
}

/// Breadth-first enumeration of the word-metric ball of radius `radius`.
pub fn cayley_ball<G: FinitelyGenerated>(
    group: &G,
    radius: u32,
    max_vertices: usize,
) -> Result<BallGraph<G::Element>> {
    let gens = group.generators();
    let k = gens.len();
    let id = group.identity();

    let mut vertices = vec![id.clone()];
    let mut word_length = vec![0u32];
    let mut index = HashMap::from([(id, 0u32)]);
    let mut neighbors = Vec::new();
    let mut sphere_sizes = vec![1usize];
    let mut queue = VecDeque::from([0u32]);

    while let Some(v) = queue.pop_front() {
        let len = word_length[v as usize];
        for s in gens {
            let w = group.mul(&vertices[v as usize], s)?;
            let slot = match index.get(&w) {
                Some(&j) => j,
                None if len < radius => {
                    let j = vertices.len();
                    if j >= max_vertices {
                        return Err(Error::SizeCap {
                            radius: len + 1,
                            count: j + 1,
                            cap: max_vertices,
                        });
                    }
                    let j = j as u32;
                    if sphere_sizes.len() <= (len + 1) as usize {
                        sphere_sizes.push(0);
                    }
                    sphere_sizes[(len + 1) as usize] += 1;
                    index.insert(w.clone(), j);
                    vertices.push(w);
                    word_length.push(len + 1);
                    queue.push_back(j);
                    j
                }
                None => OUTSIDE,
            };
            neighbors.push(slot);
        }
    }
    debug_assert_eq!(neighbors.len(), vertices.len() * k);
    // finite groups can exhaust before the nominal radius
    sphere_sizes.resize(radius as usize + 1, 0);

    Ok(BallGraph {
        group_name: group.display_name(),
        generator_names: group.generator_names().to_vec(),
        radius,
        vertices,
        word_length,
        index,
        neighbors,
        sphere_sizes,
    })
}

impl<E: Clone + Eq + std::hash::Hash + Sync> BallGraph<E> {
    pub fn group_name(&self) -> &str {
        &self.group_name
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[E] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &E {
        &self.vertices[i]
    }

    pub fn word_length(&self, i: usize) -> u32 {
        self.word_length[i]
    }

    pub fn word_lengths(&self) -> &[u32] {
        &self.word_length
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    pub fn sphere_sizes(&self) -> &[usize] {
        &self.sphere_sizes
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    /// Cumulative ball sizes `gr(0), …, gr(radius)`.
    pub fn growth(&self) -> Vec<u64> {
        self.sphere_sizes
            .iter()
            .scan(0u64, |acc, &s| {
                *acc += s as u64;
                Some(*acc)
            })
            .collect()
    }

    /// Generator-labelled neighbours of `v` that lie in the ball.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.generator_count();
        self.neighbors[v * k..(v + 1) * k]
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != OUTSIDE)
            .map(|(s, &w)| (w as usize, s))
    }

    /// Distances from `source` inside the ball (BFS restricted to the ball).
    pub fn bfs_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for (w, _) in self.neighbors(v) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs ball-restricted distances. Pairs outside the certified
    /// region are upper bounds on the true word distance.
    pub fn all_pairs_distances(&self, labeler: impl Fn(&E) -> String) -> Result<FiniteMetricSpace> {
        let n = self.len();
        if n > MAX_DENSE_POINTS {
            return Err(Error::Size(format!(
                "all-pairs table for {n} vertices exceeds the dense limit {MAX_DENSE_POINTS}"
            )));
        }
        let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| self.bfs_from(s)).collect();
        let dist = rows.into_iter().flatten().map(f64::from).collect();
        let labels = self.vertices.iter().map(labeler).collect();
        FiniteMetricSpace::new(labels, dist, 0, f64::from(self.radius))
    }

    /// Writes the edge list `src,dst,generator`, one row per directed edge.
    pub fn write_edges<W: Write>(&self, writer: W, labeler: impl Fn(&E) -> String) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["src", "dst", "generator"])?;
        for v in 0..self.len() {
            let src = labeler(&self.vertices[v]);
            for (u, s) in self.neighbors(v) {
                w.write_record([
                    src.as_str(),
                    &labeler(&self.vertices[u]),
                    &self.generator_names[s],
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the vertex table `label,word_length`.
    pub fn write_vertices<W: Write>(
        &self,
        writer: W,
        labeler: impl Fn(&E) -> String,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["label", "word_length"])?;
        for (v, len) in self.vertices.iter().zip(&self.word_length) {
            w.write_record([labeler(v), len.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GroupElement, GroupModel};
    use crate::metric::MetricSpace;

    #[test]
    fn small_balls() {
        let z = GroupModel::free_abelian(1);
        let b = cayley_ball(&z, 3, DEFAULT_MAX_VERTICES).unwrap();
        assert_eq!(b.len(), 7);
        assert_eq!(b.sphere_sizes(), &[1, 2, 2, 2]);

        let f2 = GroupModel::free(2);
        assert_eq!(cayley_ball(&f2, 2, DEFAULT_MAX_VERTICES).unwrap().len(), 17);

        let h = GroupModel::heisenberg();
        assert_eq!(cayley_ball(&h, 1, DEFAULT_MAX_VERTICES).unwrap().len(), 5);
    }

    #[test]
    fn bfs_order_is_generator_order() {
        let z = GroupModel::free_abelian(1);
        let b = cayley_ball(&z, 2, DEFAULT_MAX_VERTICES).unwrap();
        let xs: Vec<i64> = b
            .vertices()
            .iter()
            .map(|e| match e {
                GroupElement::Vector(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(xs, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn cap_names_radius() {
        let f2 = GroupModel::free(2);
        match cayley_ball(&f2, 5, 100) {
            Err(Error::SizeCap { radius, cap, .. }) => {
                assert_eq!(cap, 100);
                assert_eq!(radius, 4); // gr(3) = 53 fits, gr(4) = 161 does not
            }
            other => panic!("expected size error, got {other:?}"),
        }
    }

    #[test]
    fn finite_group_ball_saturates() {
        let c = GroupModel::cyclic(5).unwrap();
        let b = cayley_ball(&c, 4, DEFAULT_MAX_VERTICES).unwrap();
        assert_eq!(b.growth(), vec![1, 3, 5, 5, 5]);
    }

    #[test]
    fn every_vertex_has_a_parent() {
        let h = GroupModel::heisenberg();
        let b = cayley_ball(&h, 4, DEFAULT_MAX_VERTICES).unwrap();
        assert_eq!(b.growth().last().copied().unwrap() as usize, b.len());
        for v in 1..b.len() {
            let l = b.word_length(v);
            assert!(b.neighbors(v).any(|(w, _)| b.word_length(w) + 1 == l));
        }
    }

    #[test]
    fn all_pairs_examples() {
        let z2 = GroupModel::free_abelian(2);
        let b = cayley_ball(&z2, 2, DEFAULT_MAX_VERTICES).unwrap();
        let m = b.all_pairs_distances(|e| z2.label_of(e)).unwrap();
        let i = m.index_of("(1 0)").unwrap();
        let j = m.index_of("(0 1)").unwrap();
        assert_eq!(m.dist(i, j), 2.0);
        for v in 0..b.len() {
            assert_eq!(m.dist(0, v), f64::from(b.word_length(v)));
            assert!(m.is_certified(0, v));
        }

        let f2 = GroupModel::free(2);
        let b = cayley_ball(&f2, 3, DEFAULT_MAX_VERTICES).unwrap();
        let m = b.all_pairs_distances(|e| f2.label_of(e)).unwrap();
        let (i, j) = (m.index_of("ab").unwrap(), m.index_of("ba").unwrap());
        assert_eq!(m.dist(i, j), 4.0);
        assert!(!m.is_certified(i, j));
        let b6 = cayley_ball(&f2, 4, DEFAULT_MAX_VERTICES).unwrap();
        let m6 = b6.all_pairs_distances(|e| f2.label_of(e)).unwrap();
        let (i, j) = (m6.index_of("ab").unwrap(), m6.index_of("ba").unwrap());
        assert!(m6.is_certified(i, j));
    }

    #[test]
    fn exports() {
        let z = GroupModel::free_abelian(1);
        let b = cayley_ball(&z, 1, DEFAULT_MAX_VERTICES).unwrap();
        let mut edges = Vec::new();
        b.write_edges(&mut edges, |e| z.label_of(e)).unwrap();
        assert_eq!(
            String::from_utf8(edges).unwrap(),
            "src,dst,generator\n(0),(1),+e1\n(0),(-1),-e1\n(1),(0),-e1\n(-1),(0),+e1\n"
        );
        let mut verts = Vec::new();
        b.write_vertices(&mut verts, |e| z.label_of(e)).unwrap();
        assert_eq!(
            String::from_utf8(verts).unwrap(),
            "label,word_length\n(0),0\n(1),1\n(-1),1\n"
        );
    }
}
