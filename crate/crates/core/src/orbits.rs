//! Orbits of Sp_{2g}(F₂) on sets of four distinct even characteristics.
//!
//! Writing the quadruple as `{k₄ + a₁, k₄ + a₂, k₄ + a₃, k₄}`, the class is
//! decided by the rank of `a₁, a₂, a₃` and by how many of the three pairings
//! `⟨a_i, a_j⟩` equal one.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2::{pairing, span_dim, transvection, F2Vector, SymplecticMap};
use crate::quadform::{act_on_char, parity, Characteristic, Parity};

/// Largest genus for which orbit enumeration is allowed.
pub const MAX_BFS_GENUS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("a quadruple needs exactly 4 characteristics, got {0}")]
    WrongCount(usize),
    #[error("characteristics of different genus")]
    GenusMismatch,
    #[error("duplicate characteristic {0}")]
    Duplicate(F2Vector),
    #[error("characteristic {0} is odd")]
    OddCharacteristic(F2Vector),
    #[error("genus {0} exceeds the enumeration bound {MAX_BFS_GENUS}")]
    GenusTooLarge(usize),
    #[error("base index {0} is outside 0..4")]
    BadBase(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitClass {
    A1,
    A2,
    A3,
    A4,
}

impl OrbitClass {
    pub const ALL: [OrbitClass; 4] = [OrbitClass::A1, OrbitClass::A2, OrbitClass::A3, OrbitClass::A4];

    /// Maps the span dimension of the differences and the number of odd
    /// pairings among them to a class.
    pub fn from_invariants(span_dim: usize, odd_pairs: usize) -> Self {
        match (span_dim, odd_pairs) {
            (d, _) if d <= 2 => OrbitClass::A1,
            (_, 0) => OrbitClass::A2,
            (_, 1 | 2) => OrbitClass::A3,
            _ => OrbitClass::A4,
        }
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// An unordered set of four distinct even characteristics.
///
/// Stored sorted by the lexicographic order of the serialized bit arrays, so
/// the last entry is the base used by [`differences`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quadruple {
    chars: [Characteristic; 4],
}

#[derive(Serialize, Deserialize)]
struct QuadrupleJson {
    g: usize,
    chars: Vec<F2Vector>,
}

impl Quadruple {
    pub fn new(chars: &[Characteristic]) -> Result<Self, OrbitError> {
        let arr: [Characteristic; 4] = chars.try_into().map_err(|_| OrbitError::WrongCount(chars.len()))?;
        let g = arr[0].genus();
        if arr.iter().any(|k| k.genus() != g) {
            return Err(OrbitError::GenusMismatch);
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if arr[i] == arr[j] {
                    return Err(OrbitError::Duplicate(arr[i]));
                }
            }
        }
        if let Some(k) = arr.iter().find(|k| !parity(k).is_even()) {
            return Err(OrbitError::OddCharacteristic(*k));
        }
        Ok(Self::from_sorted(arr))
    }

    fn from_sorted(mut chars: [Characteristic; 4]) -> Self {
        chars.sort_by_key(|k| k.lex_key());
        Self { chars }
    }

    pub fn chars(&self) -> &[Characteristic; 4] {
        &self.chars
    }

    pub fn genus(&self) -> usize {
        self.chars[0].genus()
    }

    /// Image under a symplectic map acting on characteristics.
    pub fn act(&self, m: &SymplecticMap) -> Self {
        let moved = self.chars.map(|k| act_on_char(m, &k).expect("genus checked"));
        Self::from_sorted(moved)
    }

    pub fn from_json(s: &str) -> Result<Self, QuadrupleParseError> {
        let raw: QuadrupleJson = serde_json::from_str(s)?;
        if raw.chars.iter().any(|k| k.genus() != raw.g) {
            return Err(OrbitError::GenusMismatch.into());
        }
        Ok(Self::new(&raw.chars)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&QuadrupleJson { g: self.genus(), chars: self.chars.to_vec() }).expect("serializable")
    }
}

impl Serialize for Quadruple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QuadrupleJson { g: self.genus(), chars: self.chars.to_vec() }.serialize(s)
    }
}

#[derive(Debug, Error)]
pub enum QuadrupleParseError {
    #[error("malformed quadruple JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] OrbitError),
}

/// `a_i = k_i + k_base` for the three non-base members, in stored order.
pub fn differences(q: &Quadruple, base: usize) -> Result<[F2Vector; 3], OrbitError> {
    if base >= 4 {
        return Err(OrbitError::BadBase(base));
    }
    let b = q.chars[base];
    let mut out = [b; 3];
    let mut n = 0;
    for (i, k) in q.chars.iter().enumerate() {
        if i != base {
            out[n] = *k + b;
            n += 1;
        }
    }
    Ok(out)
}

/// Rank and odd-pairing count of the differences from one base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub span_dim: usize,
    pub odd_pairs: usize,
}

pub fn invariants_with_base(q: &Quadruple, base: usize) -> Result<Invariants, OrbitError> {
    let a = differences(q, base)?;
    let span_dim = span_dim(&a).expect("same genus");
    let odd_pairs = [(0, 1), (0, 2), (1, 2)].iter().filter(|&&(i, j)| pairing(&a[i], &a[j])).count();
    Ok(Invariants { span_dim, odd_pairs })
}

pub fn classify_with_base(q: &Quadruple, base: usize) -> Result<OrbitClass, OrbitError> {
    let inv = invariants_with_base(q, base)?;
    Ok(OrbitClass::from_invariants(inv.span_dim, inv.odd_pairs))
}

pub fn classify(q: &Quadruple) -> OrbitClass {
    let class = classify_with_base(q, 3).expect("valid base");
    debug_assert!(
        (0..3).all(|b| classify_with_base(q, b).expect("valid base") == class),
        "classification depends on the base for {q:?}"
    );
    class
}

/// Parities of `δ_i = 2K − Σ_{j≠i} Δ_j`, indexed like the stored characteristics.
///
/// With base `k₄`, `δ_i` sits at `k₄ + a_j + a_k` and `δ₄` at `k₄ + a₁ + a₂ + a₃`,
/// so their parities are the pairings `⟨a_j, a_k⟩` and their sum.
pub fn delta_parities(q: &Quadruple) -> [Parity; 4] {
    let a = differences(q, 3).expect("valid base");
    let p12 = pairing(&a[0], &a[1]);
    let p13 = pairing(&a[0], &a[2]);
    let p23 = pairing(&a[1], &a[2]);
    [p23, p13, p12, p12 ^ p13 ^ p23].map(Parity::from_bit)
}

pub fn classify_by_delta(q: &Quadruple) -> OrbitClass {
    let a = differences(q, 3).expect("valid base");
    if (a[0] + a[1] + a[2]).is_zero() {
        return OrbitClass::A1;
    }
    match delta_parities(q).iter().filter(|p| p.is_even()).count() {
        4 => OrbitClass::A2,
        2 => OrbitClass::A3,
        0 => OrbitClass::A4,
        n => unreachable!("{n} even deltas cannot occur for independent differences"),
    }
}

/// All nonzero transvections of genus `g`.
pub fn all_transvections(genus: usize) -> Vec<SymplecticMap> {
    F2Vector::all(genus).filter(|v| !v.is_zero()).map(|v| transvection(&v).expect("nonzero")).collect()
}

/// Transvections acting on characteristics, tabulated by bit pattern.
struct CharActionTable {
    genus: usize,
    images: Vec<Vec<u64>>,
}

impl CharActionTable {
    fn new(genus: usize) -> Self {
        let images = all_transvections(genus)
            .iter()
            .map(|t| F2Vector::all(genus).map(|k| act_on_char(t, &k).expect("genus").bits()).collect())
            .collect();
        Self { genus, images }
    }

    fn neighbours<'a>(&'a self, q: &'a Quadruple) -> impl Iterator<Item = Quadruple> + 'a {
        self.images.iter().map(move |img| {
            let moved = q.chars.map(|k| F2Vector::from_bits(self.genus, img[k.bits() as usize]).expect("in range"));
            Quadruple::from_sorted(moved)
        })
    }
}

/// The full Sp_{2g}(F₂)-orbit of `q`, by closure under transvections.
pub fn orbit_bfs(q: &Quadruple) -> Result<HashSet<Quadruple>, OrbitError> {
    let g = q.genus();
    if g > MAX_BFS_GENUS {
        return Err(OrbitError::GenusTooLarge(g));
    }
    Ok(bfs_with(&CharActionTable::new(g), q))
}

fn bfs_with(table: &CharActionTable, q: &Quadruple) -> HashSet<Quadruple> {
    let mut seen = HashSet::from([*q]);
    let mut frontier = vec![*q];
    while let Some(cur) = frontier.pop() {
        for next in table.neighbours(&cur) {
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    seen
}

/// All even characteristics of genus `g`, in bit-pattern order.
pub fn even_characteristics(genus: usize) -> Vec<Characteristic> {
    F2Vector::all(genus).filter(|k| parity(k).is_even()).collect()
}

/// Every 4-subset of the even characteristics of genus `g`.
pub fn all_quadruples(genus: usize) -> Result<Vec<Quadruple>, OrbitError> {
    if genus > MAX_BFS_GENUS {
        return Err(OrbitError::GenusTooLarge(genus));
    }
    let evens = even_characteristics(genus);
    let n = evens.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    out.push(Quadruple::from_sorted([evens[a], evens[b], evens[c], evens[d]]));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub genus: usize,
    pub total: usize,
    pub counts: BTreeMap<OrbitClass, usize>,
    /// Size of the transvection orbit of the first member of each class.
    pub orbit_sizes: BTreeMap<OrbitClass, usize>,
    /// Each nonempty class is exactly one orbit.
    pub orbit_consistent: bool,
}

/// Classifies every quadruple of even characteristics and checks that each
/// class is a single orbit.
pub fn census(genus: usize) -> Result<Census, OrbitError> {
    let quads = all_quadruples(genus)?;
    let mut classes: BTreeMap<OrbitClass, HashSet<Quadruple>> = BTreeMap::new();
    for q in &quads {
        classes.entry(classify(q)).or_default().insert(*q);
    }
    let table = CharActionTable::new(genus);
    let mut orbit_sizes = BTreeMap::new();
    let mut consistent = true;
    for (class, members) in &classes {
        let rep = members.iter().min().expect("nonempty class");
        let orbit = bfs_with(&table, rep);
        orbit_sizes.insert(*class, orbit.len());
        consistent &= orbit == *members;
    }
    Ok(Census {
        genus,
        total: quads.len(),
        counts: classes.iter().map(|(c, m)| (*c, m.len())).collect(),
        orbit_sizes,
        orbit_consistent: consistent,
    })
}
