use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FinitelyGenerated;

/// A syllable of a free-product normal form: a nonzero element of one factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Syllable {
    /// `a^n` in the `ℤ` factor.
    Cyclic(i64),
    /// `x^p y^q` in the `ℤ²` factor.
    Flat(i64, i64),
}

impl Syllable {
    fn is_trivial(self) -> bool {
        matches!(self, Syllable::Cyclic(0) | Syllable::Flat(0, 0))
    }

    fn same_factor(self, other: Syllable) -> bool {
        matches!(
            (self, other),
            (Syllable::Cyclic(_), Syllable::Cyclic(_)) | (Syllable::Flat(..), Syllable::Flat(..))
        )
    }

    fn combine(self, other: Syllable) -> Result<Syllable> {
        let ovf = || Error::Overflow("free product");
        match (self, other) {
            (Syllable::Cyclic(m), Syllable::Cyclic(n)) => {
                Ok(Syllable::Cyclic(m.checked_add(n).ok_or_else(ovf)?))
            }
            (Syllable::Flat(p, q), Syllable::Flat(r, s)) => Ok(Syllable::Flat(
                p.checked_add(r).ok_or_else(ovf)?,
                q.checked_add(s).ok_or_else(ovf)?,
            )),
            _ => unreachable!("syllables from different factors"),
        }
    }

    fn inverse(self) -> Result<Syllable> {
        let ovf = || Error::Overflow("free product inverse");
        Ok(match self {
            Syllable::Cyclic(n) => Syllable::Cyclic(n.checked_neg().ok_or_else(ovf)?),
            Syllable::Flat(p, q) => Syllable::Flat(
                p.checked_neg().ok_or_else(ovf)?,
                q.checked_neg().ok_or_else(ovf)?,
            ),
        })
    }

    fn length(self) -> u64 {
        match self {
            Syllable::Cyclic(n) => n.unsigned_abs(),
            Syllable::Flat(p, q) => p.unsigned_abs() + q.unsigned_abs(),
        }
    }
}

/// The free product `ℤ * ℤ²` with generators `a, A, x, X, y, Y`, hyperbolic
/// relative to the `ℤ²` factor.
///
/// Elements are alternating sequences of nontrivial syllables.
#[derive(Clone, Debug)]
pub struct FreeProductZZ2 {
    generators: Vec<Vec<Syllable>>,
    names: Vec<String>,
}

impl Default for FreeProductZZ2 {
    fn default() -> Self {
        Self::new()
    }
}

impl FreeProductZZ2 {
    pub fn new() -> Self {
        let gens = [
            Syllable::Cyclic(1),
            Syllable::Cyclic(-1),
            Syllable::Flat(1, 0),
            Syllable::Flat(-1, 0),
            Syllable::Flat(0, 1),
            Syllable::Flat(0, -1),
        ];
        FreeProductZZ2 {
            generators: gens.iter().map(|&s| vec![s]).collect(),
            names: ["a", "A", "x", "X", "y", "Y"].map(String::from).to_vec(),
        }
    }

    /// Indices of the generators of the peripheral `ℤ²` factor.
    pub fn parabolic_generators(&self) -> Vec<usize> {
        vec![2, 3, 4, 5]
    }

    /// Normal form of a syllable sequence.
    pub fn normalize(&self, syllables: &[Syllable]) -> Result<Vec<Syllable>> {
        let mut out: Vec<Syllable> = Vec::with_capacity(syllables.len());
        for &s in syllables {
            match out.last().copied() {
                Some(last) if last.same_factor(s) => {
                    let merged = last.combine(s)?;
                    out.pop();
                    if !merged.is_trivial() {
                        out.push(merged);
                    }
                }
                _ if s.is_trivial() => {}
                _ => out.push(s),
            }
        }
        Ok(out)
    }
}

impl FinitelyGenerated for FreeProductZZ2 {
    type Element = Vec<Syllable>;

    fn display_name(&self) -> String {
        "Z*Z^2".into()
    }

    fn identity(&self) -> Vec<Syllable> {
        Vec::new()
    }

    fn generators(&self) -> &[Vec<Syllable>] {
        &self.generators
    }

    fn generator_names(&self) -> &[String] {
        &self.names
    }

    fn mul(&self, a: &Vec<Syllable>, b: &Vec<Syllable>) -> Result<Vec<Syllable>> {
        // cancellation only happens at the seam, one syllable at a time
        let mut out = a.clone();
        let mut rest = b.iter().copied();
        for s in rest.by_ref() {
            match out.last().copied() {
                Some(last) if last.same_factor(s) => {
                    let merged = last.combine(s)?;
                    out.pop();
                    if !merged.is_trivial() {
                        out.push(merged);
                        break;
                    }
                }
                _ => {
                    out.push(s);
                    break;
                }
            }
        }
        out.extend(rest);
        Ok(out)
    }

    fn inv(&self, a: &Vec<Syllable>) -> Result<Vec<Syllable>> {
        a.iter().rev().map(|s| s.inverse()).collect()
    }

    fn label(&self, a: &Vec<Syllable>) -> String {
        if a.is_empty() {
            return "e".into();
        }
        let mut out = String::new();
        for s in a {
            match s {
                Syllable::Cyclic(n) => write!(out, "a^{n}").unwrap(),
                Syllable::Flat(p, q) => write!(out, "[{p},{q}]").unwrap(),
            }
        }
        out
    }

    fn closed_word_length(&self, a: &Vec<Syllable>) -> Option<u64> {
        Some(a.iter().map(|s| s.length()).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{cayley_ball, DEFAULT_MAX_VERTICES};

    #[test]
    fn normal_forms() {
        let g = FreeProductZZ2::new();
        let x = vec![Syllable::Flat(1, 0)];
        let a = vec![Syllable::Cyclic(1)];
        let xa = g.mul(&x, &a).unwrap();
        let ax = g.mul(&a, &x).unwrap();
        assert_ne!(xa, ax);
        assert_eq!(g.label(&xa), "[1,0]a^1");
        let xax = g.mul(&xa, &g.inv(&x).unwrap()).unwrap();
        assert_eq!(g.closed_word_length(&xax), Some(3));
        let back = g.mul(&g.inv(&xa).unwrap(), &xa).unwrap();
        assert_eq!(back, g.identity());
        // x·a·A·y = xy
        let w = g
            .mul(
                &g.mul(&xa, &vec![Syllable::Cyclic(-1)]).unwrap(),
                &vec![Syllable::Flat(0, 1)],
            )
            .unwrap();
        assert_eq!(w, vec![Syllable::Flat(1, 1)]);
        assert_eq!(
            g.normalize(&[
                Syllable::Cyclic(2),
                Syllable::Flat(0, 0),
                Syllable::Cyclic(-2),
                Syllable::Flat(1, 1)
            ])
            .unwrap(),
            vec![Syllable::Flat(1, 1)]
        );
    }

    #[test]
    fn word_length_matches_bfs() {
        let g = FreeProductZZ2::new();
        let b = cayley_ball(&g, 4, DEFAULT_MAX_VERTICES).unwrap();
        for (i, e) in b.vertices().iter().enumerate() {
            assert_eq!(g.closed_word_length(e), Some(u64::from(b.word_length(i))));
        }
        // ℤ² sphere sizes 4r plus words leaving the flat
        assert_eq!(b.growth()[1], 7);
    }

    #[test]
    fn overflow_is_reported() {
        let g = FreeProductZZ2::new();
        let big = vec![Syllable::Cyclic(i64::MAX)];
        assert!(matches!(
            g.mul(&big, &vec![Syllable::Cyclic(1)]),
            Err(Error::Overflow(_))
        ));
    }
}
