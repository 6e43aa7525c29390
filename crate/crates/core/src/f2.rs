//! Linear algebra over F₂ on the symplectic space F₂^{2g}.
//!
//! A vector `v` of genus `g` is packed into a `u64`: bits `0..g` hold the
//! first half `v′` and bits `g..2g` hold the second half `v″`. The standard
//! basis is `e_i = bit i` and `f_i = bit g + i`, and the symplectic pairing is
//! `⟨a, b⟩ = a′·b″ + a″·b′`, so `⟨e_i, f_j⟩ = δ_ij`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported genus: a vector of length `2g` must fit in a `u64`.
pub const MAX_GENUS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("genus {0} is outside 1..={MAX_GENUS}")]
    InvalidGenus(usize),
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("bit pattern {bits:#x} does not fit in 2g = {len} bits")]
    Overflow { bits: u64, len: usize },
    #[error("expected an even number of 0/1 entries, got length {0}")]
    BadLength(usize),
    #[error("entry {0} is not 0 or 1")]
    BadEntry(u64),
    #[error("transvection needs a nonzero vector")]
    ZeroVector,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("matrix shape {rows}x{cols} does not match 2g = {len}")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("source and target lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{0} vectors are linearly dependent")]
    Dependent(&'static str),
    #[error("pairing ⟨s{i}, s{j}⟩ differs from ⟨t{i}, t{j}⟩")]
    GramMismatch { i: usize, j: usize },
    #[error("q0(s{0}) differs from q0(t{0})")]
    FormMismatch(usize),
    #[error("no orthogonal transvection chain found at step {0}")]
    ConstructionFailed(usize),
}

pub type Result<T> = std::result::Result<T, F2Error>;

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn parity_bit(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// An element of F₂^{2g}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct F2Vector {
    genus: u8,
    bits: u64,
}

impl F2Vector {
    pub fn zero(genus: usize) -> Result<Self> {
        Self::from_bits(genus, 0)
    }

    pub fn from_bits(genus: usize, bits: u64) -> Result<Self> {
        if genus == 0 || genus > MAX_GENUS {
            return Err(F2Error::InvalidGenus(genus));
        }
        if bits & !low_mask(2 * genus) != 0 {
            return Err(F2Error::Overflow { bits, len: 2 * genus });
        }
        Ok(Self { genus: genus as u8, bits })
    }

    /// Builds a vector from its two halves `(v′, v″)`, each a `g`-bit word.
    pub fn from_halves(genus: usize, first: u64, second: u64) -> Result<Self> {
        let m = low_mask(genus.min(MAX_GENUS));
        if first & !m != 0 || second & !m != 0 {
            return Err(F2Error::Overflow { bits: first | second, len: genus });
        }
        Self::from_bits(genus, first | (second << genus))
    }

    /// Builds a vector from a slice of 0/1 entries of length `2g`.
    pub fn from_entries(entries: &[u8]) -> Result<Self> {
        if entries.is_empty() || !entries.len().is_multiple_of(2) {
            return Err(F2Error::BadLength(entries.len()));
        }
        let mut bits = 0u64;
        for (i, &b) in entries.iter().enumerate() {
            match b {
                0 => {}
                1 => bits |= 1 << i,
                other => return Err(F2Error::BadEntry(other as u64)),
            }
        }
        Self::from_bits(entries.len() / 2, bits)
    }

    /// `e_i`, the `i`-th vector of the first half (0-based).
    pub fn e(genus: usize, i: usize) -> Self {
        assert!(i < genus, "basis index {i} out of range for genus {genus}");
        Self::from_bits(genus, 1 << i).expect("valid genus")
    }

    /// `f_i`, the `i`-th vector of the second half (0-based).
    pub fn f(genus: usize, i: usize) -> Self {
        assert!(i < genus, "basis index {i} out of range for genus {genus}");
        Self::from_bits(genus, 1 << (genus + i)).expect("valid genus")
    }

    /// The `j`-th vector of the ordered basis `e_0..e_{g-1}, f_0..f_{g-1}`.
    pub fn basis(genus: usize, j: usize) -> Self {
        assert!(j < 2 * genus);
        Self::from_bits(genus, 1 << j).expect("valid genus")
    }

    /// All `2^{2g}` vectors, in increasing bit-pattern order.
    pub fn all(genus: usize) -> impl Iterator<Item = F2Vector> {
        assert!(genus <= 16, "exhaustive enumeration capped at genus 16");
        (0..1u64 << (2 * genus)).map(move |bits| Self { genus: genus as u8, bits })
    }

    pub fn genus(&self) -> usize {
        self.genus as usize
    }

    pub fn len(&self) -> usize {
        2 * self.genus as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len());
        (self.bits >> j) & 1 == 1
    }

    /// `v′`, bits `0..g`.
    pub fn first(&self) -> u64 {
        self.bits & low_mask(self.genus())
    }

    /// `v″`, bits `g..2g`.
    pub fn second(&self) -> u64 {
        self.bits >> self.genus
    }

    pub fn entries(&self) -> Vec<u8> {
        (0..self.len()).map(|j| self.get(j) as u8).collect()
    }

    /// Exchanges the two halves; `⟨a, b⟩ = a · swap(b)` as a dot product.
    fn swapped(&self) -> u64 {
        (self.first() << self.genus) | self.second()
    }

    /// Key for lexicographic comparison of the serialized 0/1 arrays.
    pub fn lex_key(&self) -> u64 {
        self.bits.reverse_bits() >> (64 - self.len())
    }

    fn check_genus(&self, other: &Self) -> Result<()> {
        if self.genus == other.genus {
            Ok(())
        } else {
            Err(F2Error::GenusMismatch(self.genus(), other.genus()))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_genus(other)?;
        Ok(Self { genus: self.genus, bits: self.bits ^ other.bits })
    }

    /// The standard quadratic form `q₀(v) = v′·v″`.
    pub fn q0(&self) -> bool {
        parity_bit(self.first() & self.second())
    }

    /// Direct sum: concatenates halves so that `(a ⊕ b)′ = (a′, b′)`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let g = self.genus() + other.genus();
        let first = self.first() | (other.first() << self.genus());
        let second = self.second() | (other.second() << self.genus());
        Self::from_halves(g, first, second)
    }
}

impl Ord for F2Vector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.genus, self.lex_key()).cmp(&(other.genus, other.lex_key()))
    }
}

impl PartialOrd for F2Vector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for F2Vector {
    type Output = F2Vector;

    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("genus mismatch in F2Vector addition")
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector(")?;
        for j in 0..self.len() {
            if j == self.genus() {
                write!(f, "|")?;
            }
            write!(f, "{}", self.get(j) as u8)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for F2Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for F2Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<u64>::deserialize(d)?;
        let mut entries = Vec::with_capacity(raw.len());
        for x in raw {
            if x > 1 {
                return Err(serde::de::Error::custom(F2Error::BadEntry(x)));
            }
            entries.push(x as u8);
        }
        F2Vector::from_entries(&entries).map_err(serde::de::Error::custom)
    }
}

/// The symplectic pairing `⟨a, b⟩ = a′·b″ + a″·b′`.
pub fn symplectic_pairing(a: &F2Vector, b: &F2Vector) -> Result<bool> {
    a.check_genus(b)?;
    Ok(pairing(a, b))
}

#[inline]
pub(crate) fn pairing(a: &F2Vector, b: &F2Vector) -> bool {
    debug_assert_eq!(a.genus, b.genus);
    parity_bit(a.bits & b.swapped())
}

/// Rank over F₂ of a list of vectors.
pub fn span_dim(vs: &[F2Vector]) -> Result<usize> {
    if let Some(first) = vs.first() {
        for v in vs {
            first.check_genus(v)?;
        }
    }
    let mut basis = XorBasis::default();
    for v in vs {
        basis.insert(v.bits);
    }
    Ok(basis.rank())
}

/// Incremental row-echelon basis keyed by lowest set bit.
#[derive(Default, Clone)]
pub(crate) struct XorBasis {
    rows: Vec<u64>,
}

impl XorBasis {
    pub(crate) fn reduce(&self, mut x: u64) -> u64 {
        for &r in &self.rows {
            let pivot = r & r.wrapping_neg();
            if x & pivot != 0 {
                x ^= r;
            }
        }
        x
    }

    /// Returns `true` if `x` was independent of the rows already present.
    pub(crate) fn insert(&mut self, x: u64) -> bool {
        let r = self.reduce(x);
        if r == 0 {
            return false;
        }
        let pivot = r & r.wrapping_neg();
        for row in &mut self.rows {
            if *row & pivot != 0 {
                *row ^= r;
            }
        }
        self.rows.push(r);
        true
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Checks that the linear map with the given columns preserves the pairing.
///
/// `columns[j]` is the image of the `j`-th basis vector. Preserving the
/// non-degenerate pairing on a basis already forces invertibility.
pub fn is_symplectic(genus: usize, columns: &[u64]) -> bool {
    if genus == 0 || genus > MAX_GENUS || columns.len() != 2 * genus {
        return false;
    }
    let n = 2 * genus;
    let mask = low_mask(n);
    if columns.iter().any(|c| c & !mask != 0) {
        return false;
    }
    let imgs: Vec<F2Vector> = columns.iter().map(|&c| F2Vector { genus: genus as u8, bits: c }).collect();
    for i in 0..n {
        for j in i + 1..n {
            let expected = j == i + genus;
            if pairing(&imgs[i], &imgs[j]) != expected {
                return false;
            }
        }
    }
    true
}

/// An element of Sp_{2g}(F₂), stored by columns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMap {
    genus: u8,
    columns: Vec<u64>,
}

impl SymplecticMap {
    pub fn identity(genus: usize) -> Result<Self> {
        F2Vector::zero(genus)?;
        Ok(Self { genus: genus as u8, columns: (0..2 * genus).map(|j| 1u64 << j).collect() })
    }

    pub fn from_columns(genus: usize, columns: Vec<u64>) -> Result<Self> {
        F2Vector::zero(genus)?;
        if columns.len() != 2 * genus {
            return Err(F2Error::BadShape { rows: 2 * genus, cols: columns.len(), len: 2 * genus });
        }
        if !is_symplectic(genus, &columns) {
            return Err(F2Error::NotSymplectic);
        }
        Ok(Self { genus: genus as u8, columns })
    }

    /// Builds a map from a row-major 0/1 matrix.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(F2Error::BadLength(n));
        }
        let mut columns = vec![0u64; n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(F2Error::BadShape { rows: n, cols: row.len(), len: n });
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => columns[j] |= 1 << i,
                    other => return Err(F2Error::BadEntry(other as u64)),
                }
            }
        }
        Self::from_columns(n / 2, columns)
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let n = self.columns.len();
        (0..n).map(|i| (0..n).map(|j| ((self.columns[j] >> i) & 1) as u8).collect()).collect()
    }

    pub fn genus(&self) -> usize {
        self.genus as usize
    }

    pub fn columns(&self) -> &[u64] {
        &self.columns
    }

    pub fn apply(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.genus, self.genus, "genus mismatch applying symplectic map");
        let mut out = 0u64;
        let mut bits = v.bits;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            out ^= self.columns[j];
            bits &= bits - 1;
        }
        F2Vector { genus: self.genus, bits: out }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus {
            return Err(F2Error::GenusMismatch(self.genus(), other.genus()));
        }
        let columns =
            other.columns.iter().map(|&c| self.apply(&F2Vector { genus: self.genus, bits: c }).bits).collect();
        Ok(Self { genus: self.genus, columns })
    }

    /// Inverse via the pairing: `⟨M x, y⟩ = ⟨x, M⁻¹ y⟩`.
    pub fn inverse(&self) -> Self {
        let g = self.genus();
        let imgs: Vec<F2Vector> = self.columns.iter().map(|&c| F2Vector { genus: self.genus, bits: c }).collect();
        let columns = (0..2 * g)
            .map(|j| {
                let y = F2Vector::basis(g, j);
                let mut out = 0u64;
                for i in 0..g {
                    // coordinate on e_i is ⟨·, f_i⟩, on f_i is ⟨·, e_i⟩
                    if pairing(&y, &imgs[g + i]) {
                        out |= 1 << i;
                    }
                    if pairing(&y, &imgs[i]) {
                        out |= 1 << (g + i);
                    }
                }
                out
            })
            .collect();
        Self { genus: self.genus, columns }
    }

    pub fn is_identity(&self) -> bool {
        self.columns.iter().enumerate().all(|(j, &c)| c == 1 << j)
    }
}

impl fmt::Debug for SymplecticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymplecticMap").field("genus", &self.genus).field("rows", &self.rows()).finish()
    }
}

impl Serialize for SymplecticMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymplecticMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        SymplecticMap::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// The transvection `x ↦ x + ⟨x, v⟩ v`.
pub fn transvection(v: &F2Vector) -> Result<SymplecticMap> {
    if v.is_zero() {
        return Err(F2Error::ZeroVector);
    }
    let g = v.genus();
    let columns = (0..2 * g)
        .map(|j| {
            let b = F2Vector::basis(g, j);
            if pairing(&b, v) {
                b.bits ^ v.bits
            } else {
                b.bits
            }
        })
        .collect();
    Ok(SymplecticMap { genus: v.genus, columns })
}

/// The solution set `{z : ⟨z, v_j⟩ = c_j}` of a system of pairing constraints.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub genus: usize,
    pub particular: F2Vector,
    pub kernel: Vec<F2Vector>,
}

/// Solves `⟨z, v_j⟩ = c_j` for all `j` by Gaussian elimination with a fixed
/// pivot order. Returns `None` when the system is inconsistent.
pub fn solve_pairing_system(genus: usize, constraints: &[(F2Vector, bool)]) -> Option<AffineSolution> {
    let n = 2 * genus;
    // each row is (coefficient mask, rhs); ⟨z, v⟩ = z · swap(v)
    let mut rows: Vec<(u64, bool)> = constraints.iter().map(|(v, c)| (v.swapped(), *c)).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let bit = 1u64 << col;
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0 & bit != 0) else {
            continue;
        };
        rows.swap(r, p);
        let (pm, pc) = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0 & bit != 0 {
                row.0 ^= pm;
                row.1 ^= pc;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|&(m, c)| m == 0 && c) {
        return None;
    }
    let mut particular = 0u64;
    for (i, &col) in pivots.iter().enumerate() {
        if rows[i].1 {
            particular |= 1 << col;
        }
    }
    let mut kernel = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = 1u64 << free;
        for (i, &col) in pivots.iter().enumerate() {
            if rows[i].0 & (1 << free) != 0 {
                v |= 1 << col;
            }
        }
        kernel.push(F2Vector { genus: genus as u8, bits: v });
    }
    Some(AffineSolution { genus, particular: F2Vector { genus: genus as u8, bits: particular }, kernel })
}

impl AffineSolution {
    /// Finds a point with `q₀ = target`.
    ///
    /// `q₀` restricted to the coset is a quadratic polynomial in the kernel
    /// coordinates, so if it takes the target value anywhere it does so at a
    /// point of kernel weight at most two.
    pub fn find_q0(&self, target: bool) -> Option<F2Vector> {
        let p = self.particular;
        if p.q0() == target {
            return Some(p);
        }
        for (i, a) in self.kernel.iter().enumerate() {
            let pa = p + *a;
            if pa.q0() == target {
                return Some(pa);
            }
            for b in &self.kernel[i + 1..] {
                let pab = pa + *b;
                if pab.q0() == target {
                    return Some(pab);
                }
            }
        }
        None
    }
}

/// Extends `s_i ↦ t_i` to an element of the orthogonal group of `q₀`.
///
/// Works one vector at a time: with `t_1..t_{k-1}` already matched and `u`
/// the current image of `s_k`, it moves `u` to `t_k` by at most two
/// `q₀`-orthogonal transvections `T_w` (`q₀(w) = 1`) that fix every earlier
/// `t_i`. When no such chain exists it falls back to completing both lists
/// to matching symplectic bases.
pub fn witt_extend(sources: &[F2Vector], targets: &[F2Vector]) -> Result<SymplecticMap> {
    if sources.len() != targets.len() {
        return Err(F2Error::LengthMismatch(sources.len(), targets.len()));
    }
    let Some(first) = sources.first() else {
        return Err(F2Error::LengthMismatch(0, 0));
    };
    let g = first.genus();
    for v in sources.iter().chain(targets) {
        first.check_genus(v)?;
    }
    if span_dim(sources)? != sources.len() {
        return Err(F2Error::Dependent("source"));
    }
    if span_dim(targets)? != targets.len() {
        return Err(F2Error::Dependent("target"));
    }
    for i in 0..sources.len() {
        if sources[i].q0() != targets[i].q0() {
            return Err(F2Error::FormMismatch(i));
        }
        for j in i + 1..sources.len() {
            if pairing(&sources[i], &sources[j]) != pairing(&targets[i], &targets[j]) {
                return Err(F2Error::GramMismatch { i, j });
            }
        }
    }

    let mut map = SymplecticMap::identity(g)?;
    for k in 0..sources.len() {
        let u = map.apply(&sources[k]);
        let t = targets[k];
        let fixed = &targets[..k];
        let Some(chain) = orthogonal_chain(&u, &t, fixed) else {
            return extend_by_completion(g, sources, targets);
        };
        for step in chain {
            map = transvection(&step)?.compose(&map)?;
        }
        debug_assert_eq!(map.apply(&sources[k]), t);
    }
    Ok(map)
}

/// Completes sources and targets to symplectic bases with equal `q₀` values
/// and returns the map sending one basis to the other.
///
/// Used when no short transvection chain exists, which happens once the fixed
/// vectors span a large degenerate subspace. Each completion step on the
/// target side is solvable because the partial map is already an isometry.
fn extend_by_completion(genus: usize, sources: &[F2Vector], targets: &[F2Vector]) -> Result<SymplecticMap> {
    let failed = || F2Error::ConstructionFailed(sources.len());
    // symplectic Gram-Schmidt, with identical combinations on both sides
    let mut pending: std::collections::VecDeque<(F2Vector, F2Vector)> =
        sources.iter().copied().zip(targets.iter().copied()).collect();
    let mut src: Vec<(F2Vector, F2Vector)> = Vec::new();
    let mut tgt: Vec<(F2Vector, F2Vector)> = Vec::new();
    let mut radical: Vec<(F2Vector, F2Vector)> = Vec::new();
    while let Some((s, t)) = pending.pop_front() {
        let Some(pos) = pending.iter().position(|(s2, _)| pairing(&s, s2)) else {
            radical.push((s, t));
            continue;
        };
        let (s2, t2) = pending.remove(pos).expect("index from position");
        for (x, y) in pending.iter_mut() {
            let (along_s, along_s2) = (pairing(x, &s2), pairing(x, &s));
            if along_s {
                *x = *x + s;
                *y = *y + t;
            }
            if along_s2 {
                *x = *x + s2;
                *y = *y + t2;
            }
        }
        src.push((s, s2));
        tgt.push((t, t2));
    }
    let flat = |pairs: &[(F2Vector, F2Vector)]| -> Vec<(F2Vector, bool)> {
        pairs.iter().flat_map(|(x, y)| [(*x, false), (*y, false)]).collect()
    };
    // hyperbolic partners for the radical
    for j in 0..radical.len() {
        let mut cs = flat(&src);
        let mut ct = flat(&tgt);
        for (i, (r, r2)) in radical.iter().enumerate().skip(j) {
            cs.push((*r, i == j));
            ct.push((*r2, i == j));
        }
        let h = solve_pairing_system(genus, &cs).ok_or_else(failed)?.particular;
        let h2 = solve_pairing_system(genus, &ct).and_then(|sol| sol.find_q0(h.q0())).ok_or_else(failed)?;
        src.push((radical[j].0, h));
        tgt.push((radical[j].1, h2));
    }
    // hyperbolic pairs in the orthogonal complement
    while src.len() < genus {
        let mut cs = flat(&src);
        let mut ct = flat(&tgt);
        let c = solve_pairing_system(genus, &cs).and_then(|sol| sol.find_q0(true)).ok_or_else(failed)?;
        let c2 = solve_pairing_system(genus, &ct).and_then(|sol| sol.find_q0(true)).ok_or_else(failed)?;
        cs.push((c, true));
        ct.push((c2, true));
        let d = solve_pairing_system(genus, &cs).ok_or_else(failed)?.particular;
        let d2 = solve_pairing_system(genus, &ct).and_then(|sol| sol.find_q0(d.q0())).ok_or_else(failed)?;
        src.push((c, d));
        tgt.push((c2, d2));
    }
    // v = Σ ⟨v, y_i⟩ x_i + ⟨v, x_i⟩ y_i in the source basis
    let columns = (0..2 * genus)
        .map(|j| {
            let v = F2Vector::basis(genus, j);
            src.iter().zip(&tgt).fold(0u64, |acc, ((x, y), (x2, y2))| {
                let mut acc = acc;
                if pairing(&v, y) {
                    acc ^= x2.bits;
                }
                if pairing(&v, x) {
                    acc ^= y2.bits;
                }
                acc
            })
        })
        .collect();
    SymplecticMap::from_columns(genus, columns).map_err(|_| failed())
}

/// Transvection vectors (applied left to right) moving `u` to `t` while
/// fixing `fixed`.
fn orthogonal_chain(u: &F2Vector, t: &F2Vector, fixed: &[F2Vector]) -> Option<Vec<F2Vector>> {
    if u == t {
        return Some(Vec::new());
    }
    let g = u.genus();
    let w = *u + *t;
    if w.q0() {
        // ⟨u, w⟩ = q₀(w) = 1, so T_w(u) = t
        return Some(vec![w]);
    }
    let orth: Vec<(F2Vector, bool)> = fixed.iter().map(|f| (*f, false)).collect();

    // T_z then T_{w+z}: z ⟂ fixed, ⟨z, u⟩ = ⟨z, t⟩ = 1, q₀(z) = 1
    let mut cs = orth.clone();
    cs.push((*u, true));
    cs.push((*t, true));
    if let Some(z) = solve_pairing_system(g, &cs).and_then(|sol| sol.find_q0(true)) {
        return Some(vec![z, w + z]);
    }

    // T_{u+x} then T_{x+t}: both steps are single transvections through x
    let mut cs: Vec<(F2Vector, bool)> = fixed.iter().map(|f| (*f, pairing(f, u))).collect();
    cs.push((*u, true));
    cs.push((*t, true));
    if let Some(x) = solve_pairing_system(g, &cs).and_then(|sol| sol.find_q0(u.q0())) {
        return Some(vec![*u + x, x + *t]);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(g: usize, bits: u64) -> F2Vector {
        F2Vector::from_bits(g, bits).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let g = 6;
        let e1 = F2Vector::e(g, 0);
        let f1 = F2Vector::f(g, 0);
        let e2 = F2Vector::e(g, 1);
        let f2 = F2Vector::f(g, 1);
        assert!(symplectic_pairing(&e1, &f1).unwrap());
        assert!(!symplectic_pairing(&(e1 + f2), &(e2 + f1)).unwrap());
        assert!(symplectic_pairing(&e1, &F2Vector::e(3, 0)).is_err());
    }

    #[test]
    fn pairing_laws_exhaustive_small_genus() {
        for g in 1..=2 {
            for a in F2Vector::all(g) {
                assert!(!pairing(&a, &a));
                for b in F2Vector::all(g) {
                    assert_eq!(pairing(&a, &b), pairing(&b, &a));
                    for c in F2Vector::all(g) {
                        assert_eq!(pairing(&(a + b), &c), pairing(&a, &c) ^ pairing(&b, &c));
                    }
                }
                // non-degenerate
                if !a.is_zero() {
                    assert!(F2Vector::all(g).any(|b| pairing(&a, &b)));
                }
            }
        }
    }

    #[test]
    fn is_symplectic_examples() {
        let g = 3;
        assert!(is_symplectic(g, SymplecticMap::identity(g).unwrap().columns()));
        // swap e1 <-> e2 only
        let mut cols: Vec<u64> = (0..6).map(|j| 1u64 << j).collect();
        cols.swap(0, 1);
        assert!(!is_symplectic(g, &cols));
        // swapping both e1<->e2 and f1<->f2 is symplectic
        cols.swap(3, 4);
        assert!(is_symplectic(g, &cols));
        assert!(!is_symplectic(g, &cols[..5]));
    }

    #[test]
    fn transvection_examples() {
        let g = 6;
        let e1 = F2Vector::e(g, 0);
        let t = transvection(&e1).unwrap();
        assert_eq!(t.apply(&F2Vector::f(g, 0)), F2Vector::f(g, 0) + e1);
        assert_eq!(t.apply(&F2Vector::e(g, 1)), F2Vector::e(g, 1));
        assert!(t.compose(&t).unwrap().is_identity());
        assert_eq!(transvection(&F2Vector::zero(g).unwrap()), Err(F2Error::ZeroVector));
    }

    #[test]
    fn transvections_symplectic_and_involutive_exhaustive() {
        for g in 1..=2 {
            for x in F2Vector::all(g).filter(|x| !x.is_zero()) {
                let t = transvection(&x).unwrap();
                assert!(is_symplectic(g, t.columns()));
                assert!(t.compose(&t).unwrap().is_identity());
                assert_eq!(t.inverse(), t);
            }
        }
    }

    #[test]
    fn span_dim_examples() {
        let g = 6;
        let (e1, e2, e3) = (F2Vector::e(g, 0), F2Vector::e(g, 1), F2Vector::e(g, 2));
        assert_eq!(span_dim(&[e1, e2, e1 + e2]).unwrap(), 2);
        assert_eq!(span_dim(&[e1, e2, e3]).unwrap(), 3);
        assert_eq!(span_dim(&[]).unwrap(), 0);
        let all: Vec<_> = (0..12).map(|j| F2Vector::basis(g, j)).collect();
        assert_eq!(span_dim(&all).unwrap(), 12);
    }

    #[test]
    fn inverse_and_compose() {
        let g = 3;
        let a = transvection(&v(g, 0b000101)).unwrap();
        let b = transvection(&v(g, 0b110001)).unwrap();
        let ab = a.compose(&b).unwrap();
        assert!(is_symplectic(g, ab.columns()));
        assert!(ab.compose(&ab.inverse()).unwrap().is_identity());
        assert!(ab.inverse().compose(&ab).unwrap().is_identity());
    }

    #[test]
    fn rows_round_trip_and_json() {
        let m = transvection(&v(2, 0b1011)).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: SymplecticMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let bad = "[[1,1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]";
        assert!(serde_json::from_str::<SymplecticMap>(bad).is_err());
        let x: F2Vector = serde_json::from_str("[1,0,0,1]").unwrap();
        assert_eq!(x, F2Vector::e(2, 0) + F2Vector::f(2, 1));
        assert_eq!(serde_json::to_string(&x).unwrap(), "[1,0,0,1]");
        assert!(serde_json::from_str::<F2Vector>("[1,0,2,1]").is_err());
        assert!(serde_json::from_str::<F2Vector>("[1,0,1]").is_err());
    }

    #[test]
    fn completion_satisfies_postconditions() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for g in 1..=4 {
            for m in 1..=2 * g {
                for _ in 0..20 {
                    let mut sources: Vec<F2Vector> = Vec::new();
                    while sources.len() < m {
                        sources.push(v(g, rng.random_range(1..1u64 << (2 * g))));
                        if span_dim(&sources).unwrap() < sources.len() {
                            sources.pop();
                        }
                    }
                    // targets: image under a random word of q₀-orthogonal transvections
                    let mut targets = sources.clone();
                    for _ in 0..8 {
                        let w = v(g, rng.random_range(1..1u64 << (2 * g)));
                        if w.q0() {
                            let t = transvection(&w).unwrap();
                            targets = targets.iter().map(|x| t.apply(x)).collect();
                        }
                    }
                    let map = extend_by_completion(g, &sources, &targets).unwrap();
                    for (s, t) in sources.iter().zip(&targets) {
                        assert_eq!(map.apply(s), *t);
                    }
                    assert!(F2Vector::all(g).all(|x| map.apply(&x).q0() == x.q0()));
                }
            }
        }
    }

    #[test]
    fn witt_examples() {
        let g = 6;
        let (e1, e2, f1) = (F2Vector::e(g, 0), F2Vector::e(g, 1), F2Vector::f(g, 0));
        let m = witt_extend(&[e1], &[e2]).unwrap();
        assert_eq!(m.apply(&e1), e2);
        assert!(F2Vector::all(g).all(|x| m.apply(&x).q0() == x.q0()));
        let id = witt_extend(&[e1, e2], &[e1, e2]).unwrap();
        assert!(id.is_identity());
        assert_eq!(witt_extend(&[e1], &[f1 + e1]), Err(F2Error::FormMismatch(0)));
        assert_eq!(witt_extend(&[e1, e1], &[e2, e2]), Err(F2Error::Dependent("source")));
        assert_eq!(witt_extend(&[e1, F2Vector::e(g, 2)], &[e1, f1]), Err(F2Error::GramMismatch { i: 0, j: 1 }));
    }

    #[test]
    fn affine_solver_matches_brute_force() {
        let g = 2;
        let cons = [(v(g, 0b0011), true), (v(g, 0b0100), false)];
        let sol = solve_pairing_system(g, &cons).unwrap();
        let brute: Vec<_> = F2Vector::all(g).filter(|z| cons.iter().all(|(c, b)| pairing(z, c) == *b)).collect();
        assert_eq!(brute.len(), 1 << sol.kernel.len());
        assert!(brute.contains(&sol.particular));
        let inconsistent = [(v(g, 0b0011), true), (v(g, 0b0011), false)];
        assert!(solve_pairing_system(g, &inconsistent).is_none());
    }
}
