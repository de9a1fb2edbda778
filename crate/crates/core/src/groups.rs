//! Finitely generated groups given by canonical normal forms.
//!
//! Every family fixes a symmetric generating set in a documented order, so
//! that breadth-first search over the Cayley graph is reproducible:
//!
//! | family            | spec string           | generator order                       |
//! |-------------------|-----------------------|---------------------------------------|
//! | free abelian ℤⁿ   | `free-abelian:n`      | `+e1, -e1, +e2, -e2, …`               |
//! | Heisenberg H₃(ℤ)  | `heisenberg`          | `a, b, a⁻¹, b⁻¹` with a=(1,0,0), b=(0,1,0) |
//! | free group Fₖ     | `free:k`              | `a, a⁻¹, b, b⁻¹, …`                   |
//! | lamplighter ℤ₂≀ℤ  | `lamplighter`         | `t, t⁻¹, s` (s toggles the lamp at the cursor) |
//! | cyclic ℤ/m        | `cyclic:m`            | `+1, -1` (just `+1` when m = 2, none when m = 1) |
//! | direct product    | `product(G,H)`        | generators of G then generators of H  |

use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// The interface the Cayley-graph machinery needs from a group.
///
/// Implementors promise that `generators()` is closed under inversion, does
/// not contain the identity, and is returned in a fixed order.
pub trait FinitelyGenerated: Sync {
    type Element: Clone + Eq + Hash + Ord + fmt::Debug + Send + Sync;

    fn display_name(&self) -> String;
    fn identity(&self) -> Self::Element;
    fn generators(&self) -> &[Self::Element];
    fn generator_names(&self) -> &[String];

    /// Product of two canonical forms. Overflow is reported, never wrapped.
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Result<Self::Element>;
    fn inv(&self, a: &Self::Element) -> Result<Self::Element>;
    fn label(&self, a: &Self::Element) -> String;

    /// Word length from a closed formula, for families that have one.
    fn closed_word_length(&self, _a: &Self::Element) -> Option<u64> {
        None
    }
}

/// A letter of a free-group word: `+(i+1)` is generator `i`, `-(i+1)` its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub i32);

impl Letter {
    pub fn generator(index: usize) -> Self {
        Letter(index as i32 + 1)
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn index(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    fn symbol(self) -> char {
        let base = (b'a' + (self.index() % 26) as u8) as char;
        if self.0 > 0 {
            base
        } else {
            base.to_ascii_uppercase()
        }
    }
}

/// Canonical form of a group element. Equality of forms is equality in the group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    /// Integer vector in ℤⁿ.
    Vector(Vec<i64>),
    /// `(a, b, c)` encodes the unipotent matrix `[[1,a,c],[0,1,b],[0,0,1]]`.
    Heisenberg([i64; 3]),
    /// Freely reduced word.
    Word(Vec<Letter>),
    /// Strictly increasing lamp positions and the cursor.
    Lamplighter {
        lamps: Vec<i64>,
        cursor: i64,
    },
    /// Residue in `0..m`.
    Residue(u64),
    Pair(Box<GroupElement>, Box<GroupElement>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    FreeAbelian(usize),
    Heisenberg,
    Free(usize),
    Lamplighter,
    DirectProduct(Box<GroupModel>, Box<GroupModel>),
    FiniteCyclic(u64),
}

/// A concrete group family together with its fixed generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupModel {
    family: Family,
    generators: Vec<GroupElement>,
    generator_names: Vec<String>,
    name: String,
}

impl GroupModel {
    pub fn free_abelian(rank: usize) -> Self {
        let mut generators = Vec::with_capacity(2 * rank);
        let mut names = Vec::with_capacity(2 * rank);
        for i in 0..rank {
            for sign in [1i64, -1] {
                let mut v = vec![0; rank];
                v[i] = sign;
                generators.push(GroupElement::Vector(v));
                names.push(format!("{}e{}", if sign > 0 { '+' } else { '-' }, i + 1));
            }
        }
        Self::assemble(Family::FreeAbelian(rank), generators, names)
    }

    pub fn heisenberg() -> Self {
        let generators = vec![
            GroupElement::Heisenberg([1, 0, 0]),
            GroupElement::Heisenberg([0, 1, 0]),
            GroupElement::Heisenberg([-1, 0, 0]),
            GroupElement::Heisenberg([0, -1, 0]),
        ];
        let names = ["a", "b", "A", "B"].map(String::from).to_vec();
        Self::assemble(Family::Heisenberg, generators, names)
    }

    pub fn free(rank: usize) -> Self {
        let mut generators = Vec::with_capacity(2 * rank);
        let mut names = Vec::with_capacity(2 * rank);
        for i in 0..rank {
            let l = Letter::generator(i);
            for letter in [l, l.inverse()] {
                generators.push(GroupElement::Word(vec![letter]));
                names.push(letter.symbol().to_string());
            }
        }
        Self::assemble(Family::Free(rank), generators, names)
    }

    pub fn lamplighter() -> Self {
        let generators = vec![
            GroupElement::Lamplighter {
                lamps: vec![],
                cursor: 1,
            },
            GroupElement::Lamplighter {
                lamps: vec![],
                cursor: -1,
            },
            GroupElement::Lamplighter {
                lamps: vec![0],
                cursor: 0,
            },
        ];
        let names = ["t", "T", "s"].map(String::from).to_vec();
        Self::assemble(Family::Lamplighter, generators, names)
    }

    pub fn cyclic(order: u64) -> Result<Self> {
        if order == 0 {
            return Err(invalid("cyclic group order must be at least 1"));
        }
        let (generators, names) = match order {
            1 => (vec![], vec![]),
            2 => (vec![GroupElement::Residue(1)], vec!["+1".to_string()]),
            m => (
                vec![GroupElement::Residue(1), GroupElement::Residue(m - 1)],
                vec!["+1".to_string(), "-1".to_string()],
            ),
        };
        Ok(Self::assemble(
            Family::FiniteCyclic(order),
            generators,
            names,
        ))
    }

    pub fn direct_product(left: GroupModel, right: GroupModel) -> Self {
        let mut generators = Vec::new();
        let mut names = Vec::new();
        let (le, re) = (left.identity(), right.identity());
        for (g, n) in left.generators.iter().zip(&left.generator_names) {
            generators.push(GroupElement::Pair(
                Box::new(g.clone()),
                Box::new(re.clone()),
            ));
            names.push(format!("L:{n}"));
        }
        for (g, n) in right.generators.iter().zip(&right.generator_names) {
            generators.push(GroupElement::Pair(
                Box::new(le.clone()),
                Box::new(g.clone()),
            ));
            names.push(format!("R:{n}"));
        }
        Self::assemble(
            Family::DirectProduct(Box::new(left), Box::new(right)),
            generators,
            names,
        )
    }

    fn assemble(
        family: Family,
        generators: Vec<GroupElement>,
        generator_names: Vec<String>,
    ) -> Self {
        let name = match &family {
            Family::FreeAbelian(n) => format!("free-abelian:{n}"),
            Family::Heisenberg => "heisenberg".to_string(),
            Family::Free(k) => format!("free:{k}"),
            Family::Lamplighter => "lamplighter".to_string(),
            Family::FiniteCyclic(m) => format!("cyclic:{m}"),
            Family::DirectProduct(l, r) => format!("product({},{})", l.name, r.name),
        };
        GroupModel {
            family,
            generators,
            generator_names,
            name,
        }
    }

    /// Parses a group spec string such as `free-abelian:2` or
    /// `product(free-abelian:2,cyclic:2)`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(inner) = spec
            .strip_prefix("product(")
            .and_then(|s| s.strip_suffix(')'))
        {
            let split = top_level_comma(inner)
                .ok_or_else(|| invalid(format!("product needs two factors: `{spec}`")))?;
            let left = Self::parse(&inner[..split])?;
            let right = Self::parse(&inner[split + 1..])?;
            return Ok(Self::direct_product(left, right));
        }
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let count = |what: &str| -> Result<u64> {
            let a =
                arg.ok_or_else(|| invalid(format!("`{what}` needs a parameter, e.g. `{what}:2`")))?;
            a.trim()
                .parse::<u64>()
                .map_err(|_| invalid(format!("bad parameter `{a}` in group spec `{spec}`")))
        };
        let no_arg = |model: GroupModel| -> Result<GroupModel> {
            match arg {
                None => Ok(model),
                Some(_) => Err(invalid(format!("`{head}` takes no parameter"))),
            }
        };
        match head {
            "free-abelian" => {
                let n = count(head)?;
                if n == 0 || n > 16 {
                    return Err(invalid("free-abelian rank must be in 1..=16"));
                }
                Ok(Self::free_abelian(n as usize))
            }
            "free" => {
                let k = count(head)?;
                if k == 0 || k > 26 {
                    return Err(invalid("free group rank must be in 1..=26"));
                }
                Ok(Self::free(k as usize))
            }
            "cyclic" => Self::cyclic(count(head)?),
            "heisenberg" => no_arg(Self::heisenberg()),
            "lamplighter" => no_arg(Self::lamplighter()),
            _ => Err(invalid(format!("unknown group family in `{spec}`"))),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn label_of(&self, a: &GroupElement) -> String {
        self.element_label(a)
    }

    pub fn identity(&self) -> GroupElement {
        match &self.family {
            Family::FreeAbelian(n) => GroupElement::Vector(vec![0; *n]),
            Family::Heisenberg => GroupElement::Heisenberg([0, 0, 0]),
            Family::Free(_) => GroupElement::Word(vec![]),
            Family::Lamplighter => GroupElement::Lamplighter {
                lamps: vec![],
                cursor: 0,
            },
            Family::FiniteCyclic(_) => GroupElement::Residue(0),
            Family::DirectProduct(l, r) => {
                GroupElement::Pair(Box::new(l.identity()), Box::new(r.identity()))
            }
        }
    }

    /// Checks that `a` is a canonical form belonging to this family.
    pub fn validate(&self, a: &GroupElement) -> Result<()> {
        let ok = match (&self.family, a) {
            (Family::FreeAbelian(n), GroupElement::Vector(v)) => v.len() == *n,
            (Family::Heisenberg, GroupElement::Heisenberg(_)) => true,
            (Family::Free(k), GroupElement::Word(w)) => {
                w.iter().all(|l| l.0 != 0 && l.index() < *k)
                    && w.windows(2).all(|p| p[0] != p[1].inverse())
            }
            (Family::Lamplighter, GroupElement::Lamplighter { lamps, .. }) => {
                lamps.windows(2).all(|p| p[0] < p[1])
            }
            (Family::FiniteCyclic(m), GroupElement::Residue(r)) => r < m,
            (Family::DirectProduct(l, r), GroupElement::Pair(x, y)) => {
                l.validate(x)?;
                r.validate(y)?;
                true
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!(
                "element {a:?} is not a canonical form of {}",
                self.name
            )))
        }
    }

    /// Group product with validation of both operands.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        self.validate(b)?;
        self.product(a, b)
    }

    /// Group inverse with validation of the operand.
    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        self.invert(a)
    }

    fn product(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        use GroupElement as E;
        Ok(match (&self.family, a, b) {
            (Family::FreeAbelian(_), E::Vector(x), E::Vector(y)) => E::Vector(
                x.iter()
                    .zip(y)
                    .map(|(p, q)| {
                        p.checked_add(*q)
                            .ok_or(Error::Overflow("free abelian product"))
                    })
                    .collect::<Result<_>>()?,
            ),
            (Family::Heisenberg, E::Heisenberg([a1, b1, c1]), E::Heisenberg([a2, b2, c2])) => {
                let ovf = || Error::Overflow("Heisenberg product");
                let c = a1
                    .checked_mul(*b2)
                    .and_then(|ab| c1.checked_add(*c2)?.checked_add(ab))
                    .ok_or_else(ovf)?;
                E::Heisenberg([
                    a1.checked_add(*a2).ok_or_else(ovf)?,
                    b1.checked_add(*b2).ok_or_else(ovf)?,
                    c,
                ])
            }
            (Family::Free(_), E::Word(x), E::Word(y)) => E::Word(reduce_concat(x, y)),
            (
                Family::Lamplighter,
                E::Lamplighter {
                    lamps: f,
                    cursor: m,
                },
                E::Lamplighter {
                    lamps: g,
                    cursor: n,
                },
            ) => {
                let shifted: Vec<i64> = g
                    .iter()
                    .map(|x| {
                        x.checked_add(*m)
                            .ok_or(Error::Overflow("lamplighter product"))
                    })
                    .collect::<Result<_>>()?;
                E::Lamplighter {
                    lamps: symmetric_difference(f, &shifted),
                    cursor: m
                        .checked_add(*n)
                        .ok_or(Error::Overflow("lamplighter product"))?,
                }
            }
            (Family::FiniteCyclic(m), E::Residue(x), E::Residue(y)) => {
                E::Residue(((*x as u128 + *y as u128) % *m as u128) as u64)
            }
            (Family::DirectProduct(l, r), E::Pair(x1, y1), E::Pair(x2, y2)) => {
                E::Pair(Box::new(l.product(x1, x2)?), Box::new(r.product(y1, y2)?))
            }
            _ => return Err(invalid(format!("operands do not belong to {}", self.name))),
        })
    }

    fn invert(&self, a: &GroupElement) -> Result<GroupElement> {
        use GroupElement as E;
        Ok(match (&self.family, a) {
            (Family::FreeAbelian(_), E::Vector(x)) => E::Vector(
                x.iter()
                    .map(|p| {
                        p.checked_neg()
                            .ok_or(Error::Overflow("free abelian inverse"))
                    })
                    .collect::<Result<_>>()?,
            ),
            (Family::Heisenberg, E::Heisenberg([a, b, c])) => {
                let ovf = || Error::Overflow("Heisenberg inverse");
                let c_inv = a
                    .checked_mul(*b)
                    .and_then(|ab| ab.checked_sub(*c))
                    .ok_or_else(ovf)?;
                E::Heisenberg([
                    a.checked_neg().ok_or_else(ovf)?,
                    b.checked_neg().ok_or_else(ovf)?,
                    c_inv,
                ])
            }
            (Family::Free(_), E::Word(w)) => E::Word(w.iter().rev().map(|l| l.inverse()).collect()),
            (Family::Lamplighter, E::Lamplighter { lamps, cursor }) => E::Lamplighter {
                lamps: lamps
                    .iter()
                    .map(|x| {
                        x.checked_sub(*cursor)
                            .ok_or(Error::Overflow("lamplighter inverse"))
                    })
                    .collect::<Result<_>>()?,
                cursor: cursor
                    .checked_neg()
                    .ok_or(Error::Overflow("lamplighter inverse"))?,
            },
            (Family::FiniteCyclic(m), E::Residue(x)) => E::Residue((m - x) % m),
            (Family::DirectProduct(l, r), E::Pair(x, y)) => {
                E::Pair(Box::new(l.invert(x)?), Box::new(r.invert(y)?))
            }
            _ => return Err(invalid(format!("operand does not belong to {}", self.name))),
        })
    }

    fn element_label(&self, a: &GroupElement) -> String {
        use GroupElement as E;
        match a {
            E::Vector(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                format!("({})", parts.join(" "))
            }
            E::Heisenberg([x, y, z]) => format!("[{x} {y} {z}]"),
            E::Word(w) if w.is_empty() => "e".to_string(),
            E::Word(w) => w.iter().map(|l| l.symbol()).collect(),
            E::Lamplighter { lamps, cursor } => {
                let parts: Vec<String> = lamps.iter().map(i64::to_string).collect();
                format!("{{{}}}@{cursor}", parts.join(" "))
            }
            E::Residue(r) => r.to_string(),
            E::Pair(x, y) => match &self.family {
                Family::DirectProduct(l, r) => {
                    format!("<{};{}>", l.element_label(x), r.element_label(y))
                }
                _ => format!("{a:?}"),
            },
        }
    }

    fn word_length_formula(&self, a: &GroupElement) -> Option<u64> {
        use GroupElement as E;
        match (&self.family, a) {
            (Family::FreeAbelian(_), E::Vector(v)) => {
                Some(v.iter().map(|x| x.unsigned_abs()).sum())
            }
            (Family::Free(_), E::Word(w)) => Some(w.len() as u64),
            (Family::FiniteCyclic(m), E::Residue(r)) => {
                Some(if *m <= 2 { *r } else { (*r).min(m - r) })
            }
            (Family::DirectProduct(l, r), E::Pair(x, y)) => {
                Some(l.word_length_formula(x)? + r.word_length_formula(y)?)
            }
            _ => None,
        }
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FinitelyGenerated for GroupModel {
    type Element = GroupElement;

    fn display_name(&self) -> String {
        self.name.clone()
    }

    fn identity(&self) -> GroupElement {
        GroupModel::identity(self)
    }

    fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.product(a, b)
    }

    fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        self.invert(a)
    }

    fn label(&self, a: &GroupElement) -> String {
        self.element_label(a)
    }

    fn closed_word_length(&self, a: &GroupElement) -> Option<u64> {
        self.word_length_formula(a)
    }
}

/// Concatenates two reduced words and cancels at the seam.
pub(crate) fn reduce_concat(x: &[Letter], y: &[Letter]) -> Vec<Letter> {
    let mut cancel = 0;
    while cancel < x.len() && cancel < y.len() && x[x.len() - 1 - cancel] == y[cancel].inverse() {
        cancel += 1;
    }
    let mut out = Vec::with_capacity(x.len() + y.len() - 2 * cancel);
    out.extend_from_slice(&x[..x.len() - cancel]);
    out.extend_from_slice(&y[cancel..]);
    out
}

fn symmetric_difference(a: &[i64], b: &[i64]) -> Vec<i64> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}
