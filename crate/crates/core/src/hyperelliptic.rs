//! Partition model of theta characteristics on a hyperelliptic curve.
//!
//! Weierstrass points are labelled `1..=2g+2`. A class `Ā` is a subset of
//! labels up to complementation; the canonical representative omits the
//! label `2g+2`. Classes of even size form the symplectic space P₂⁺(W); classes
//! of size `≡ g+1 (mod 2)` form the torsor of theta characteristics, with
//! `h⁰ = (g + 1 − |T_red|)/2` where `T_red` is the smaller half.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::f2::{F2Error, F2Vector, MAX_GENUS};
use crate::quadform::{induced_quadratic_form, parity, Characteristic, Parity, QuadraticForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperellipticError {
    #[error("genus {0} is outside the supported range")]
    InvalidGenus(usize),
    #[error("label {label} is outside 1..={max}")]
    LabelOutOfRange { label: u32, max: u32 },
    #[error("duplicate label {0}")]
    DuplicateLabel(u32),
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("pairing needs even classes, got size {0}")]
    OddClass(u32),
    #[error("class of size {size} is not a theta characteristic in genus {genus}")]
    SupportParity { size: u32, genus: usize },
    #[error("labeling images do not form a symplectic basis")]
    NotSymplectic,
    #[error("expected {expected} labeling images, got {got}")]
    WrongImageCount { expected: usize, got: usize },
    #[error("no torsor base induces the standard form")]
    NoTorsorBase,
    #[error("configuration needs {expected} points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error(transparent)]
    F2(#[from] F2Error),
}

pub type Result<T> = std::result::Result<T, HyperellipticError>;

fn check_genus(genus: usize) -> Result<()> {
    // 2g + 2 labels must fit in a u128
    if genus == 0 || genus > MAX_GENUS {
        Err(HyperellipticError::InvalidGenus(genus))
    } else {
        Ok(())
    }
}

/// An element of P₂(W), `W = {1, …, 2g+2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionClass {
    genus: u8,
    members: u128,
}

impl PartitionClass {
    fn full_mask(genus: usize) -> u128 {
        (1u128 << (2 * genus + 2)) - 1
    }

    fn canonical(genus: usize, mask: u128) -> Self {
        let top = 1u128 << (2 * genus + 1);
        let members = if mask & top != 0 { mask ^ Self::full_mask(genus) } else { mask };
        Self { genus: genus as u8, members }
    }

    pub fn empty(genus: usize) -> Result<Self> {
        check_genus(genus)?;
        Ok(Self { genus: genus as u8, members: 0 })
    }

    /// Class of a subset given by 1-based labels; complements are identified.
    pub fn new(genus: usize, labels: &[u32]) -> Result<Self> {
        check_genus(genus)?;
        let max = (2 * genus + 2) as u32;
        let mut mask = 0u128;
        for &l in labels {
            if l == 0 || l > max {
                return Err(HyperellipticError::LabelOutOfRange { label: l, max });
            }
            let bit = 1u128 << (l - 1);
            if mask & bit != 0 {
                return Err(HyperellipticError::DuplicateLabel(l));
            }
            mask |= bit;
        }
        Ok(Self::canonical(genus, mask))
    }

    pub(crate) fn from_mask(genus: usize, mask: u128) -> Self {
        Self::canonical(genus, mask & Self::full_mask(genus))
    }

    pub fn genus(&self) -> usize {
        self.genus as usize
    }

    pub fn mask(&self) -> u128 {
        self.members
    }

    /// Sorted labels of the canonical representative.
    pub fn labels(&self) -> Vec<u32> {
        (0..2 * self.genus() as u32 + 2).filter(|i| self.members >> i & 1 == 1).map(|i| i + 1).collect()
    }

    /// Size of the canonical representative.
    pub fn size(&self) -> u32 {
        self.members.count_ones()
    }

    /// Size of the smaller of the two halves.
    pub fn reduced_size(&self) -> u32 {
        let n = self.size();
        n.min(2 * self.genus() as u32 + 2 - n)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.genus == other.genus {
            Ok(())
        } else {
            Err(HyperellipticError::GenusMismatch(self.genus(), other.genus()))
        }
    }

    /// Iterates all `2^{2g+1}` classes, in increasing canonical-mask order.
    pub fn all(genus: usize) -> impl Iterator<Item = PartitionClass> {
        assert!(genus <= 12, "exhaustive enumeration capped at genus 12");
        (0..1u128 << (2 * genus + 1)).map(move |m| Self { genus: genus as u8, members: m })
    }
}

impl fmt::Debug for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Class{:?}", self.labels())
    }
}

impl Serialize for PartitionClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

/// `Ā + B̄ = (A ∪ B) − (A ∩ B)`.
pub fn partition_add(a: &PartitionClass, b: &PartitionClass) -> Result<PartitionClass> {
    a.check_same(b)?;
    Ok(PartitionClass::canonical(a.genus(), a.members ^ b.members))
}

/// `|A| mod 2`, well defined since `|W|` is even.
pub fn partition_parity(a: &PartitionClass) -> Parity {
    Parity::from_bit(a.size() & 1 == 1)
}

/// `|A ∩ B| mod 2` on even classes.
pub fn partition_pairing(a: &PartitionClass, b: &PartitionClass) -> Result<bool> {
    a.check_same(b)?;
    for x in [a, b] {
        if !partition_parity(x).is_even() {
            return Err(HyperellipticError::OddClass(x.size()));
        }
    }
    Ok((a.members & b.members).count_ones() & 1 == 1)
}

fn check_support(t: &PartitionClass) -> Result<()> {
    if !(t.size() as usize + t.genus() + 1).is_multiple_of(2) {
        Err(HyperellipticError::SupportParity { size: t.size(), genus: t.genus() })
    } else {
        Ok(())
    }
}

/// `h⁰` of the theta characteristic attached to `T`.
pub fn h0(t: &PartitionClass) -> Result<u32> {
    check_support(t)?;
    Ok((t.genus() as u32 + 1 - t.reduced_size()) / 2)
}

pub fn theta_parity(t: &PartitionClass) -> Result<Parity> {
    Ok(Parity::from_bit(h0(t)? & 1 == 1))
}

/// The closed forms `Q₊(Ā) = |A|/2` (odd `g`) and `Q₋(Ā) = (|A|+1)/2` (even
/// `g`), evaluated on the canonical representative.
///
/// These agree with [`theta_parity`] for `g ≡ 2, 3 (mod 4)` and differ from
/// it by a constant otherwise.
pub fn closed_form_parity(t: &PartitionClass) -> Result<Parity> {
    check_support(t)?;
    let n = t.size();
    let v = if t.genus() % 2 == 1 { n / 2 } else { n.div_ceil(2) };
    Ok(Parity::from_bit(v & 1 == 1))
}

/// A level-2 labeling of a hyperelliptic component: a symplectic isomorphism
/// F₂^{2g} → P₂⁺(W) together with a compatible torsor base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentLabel {
    genus: usize,
    basis_images: Vec<PartitionClass>,
    torsor_base: PartitionClass,
}

impl ComponentLabel {
    /// Validates the images of `e_0..e_{g-1}, f_0..f_{g-1}` and computes the
    /// torsor base.
    pub fn from_images(genus: usize, basis_images: Vec<PartitionClass>) -> Result<Self> {
        check_genus(genus)?;
        if basis_images.len() != 2 * genus {
            return Err(HyperellipticError::WrongImageCount { expected: 2 * genus, got: basis_images.len() });
        }
        for (i, a) in basis_images.iter().enumerate() {
            if a.genus() != genus {
                return Err(HyperellipticError::GenusMismatch(genus, a.genus()));
            }
            for (j, b) in basis_images.iter().enumerate() {
                let expected = i.abs_diff(j) == genus;
                if partition_pairing(a, b)? != expected {
                    return Err(HyperellipticError::NotSymplectic);
                }
            }
        }
        let mut label = Self { genus, basis_images, torsor_base: PartitionClass::empty(genus)? };
        label.torsor_base = torsor_base(&label)?;
        Ok(label)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn basis_images(&self) -> &[PartitionClass] {
        &self.basis_images
    }

    pub fn torsor_base(&self) -> PartitionClass {
        self.torsor_base
    }

    /// The symplectic isomorphism F₂^{2g} → P₂⁺(W).
    pub fn image(&self, j: &F2Vector) -> PartitionClass {
        assert_eq!(j.genus(), self.genus);
        let mut mask = 0u128;
        let mut bits = j.bits();
        while bits != 0 {
            mask ^= self.basis_images[bits.trailing_zeros() as usize].members;
            bits &= bits - 1;
        }
        PartitionClass::canonical(self.genus, mask)
    }

    /// Inverse of [`Self::image`] on P₂⁺(W), via the dual basis.
    pub fn preimage(&self, p: &PartitionClass) -> Result<F2Vector> {
        p.check_same(&self.torsor_base)?;
        let g = self.genus;
        let mut first = 0u64;
        let mut second = 0u64;
        for i in 0..g {
            if partition_pairing(p, &self.basis_images[g + i])? {
                first |= 1 << i;
            }
            if partition_pairing(p, &self.basis_images[i])? {
                second |= 1 << i;
            }
        }
        Ok(F2Vector::from_halves(g, first, second)?)
    }

    /// The torsor action `j + T`.
    pub fn act(&self, j: &F2Vector, t: &PartitionClass) -> Result<PartitionClass> {
        partition_add(&self.image(j), t)
    }
}

/// `e_i ↦ {2i−1, 2i}`, `f_i ↦ {2i, …, 2g+1}` (1-based `i`).
pub fn std_labeling(genus: usize) -> Result<ComponentLabel> {
    check_genus(genus)?;
    let mut images = Vec::with_capacity(2 * genus);
    for i in 1..=genus as u32 {
        images.push(PartitionClass::new(genus, &[2 * i - 1, 2 * i])?);
    }
    for i in 1..=genus as u32 {
        let labels: Vec<u32> = (2 * i..=2 * genus as u32 + 1).collect();
        images.push(PartitionClass::new(genus, &labels)?);
    }
    ComponentLabel::from_images(genus, images)
}

fn induced_form_at(labeling: &ComponentLabel, base: &PartitionClass) -> Result<QuadraticForm> {
    induced_quadratic_form(labeling.genus, theta_parity, base, |j, t| labeling.act(j, t))
}

/// The unique class `B` whose induced form `j ↦ Q(B) + Q(j + B)` is `q₀`.
///
/// Shifting the base by `c(s)` shifts the induced form by `s`, so starting
/// from any class with the right support parity one correction step lands on
/// the answer; the result is re-checked on the whole basis.
pub fn torsor_base(labeling: &ComponentLabel) -> Result<PartitionClass> {
    let g = labeling.genus;
    let start = if (g + 1).is_multiple_of(2) { PartitionClass::empty(g)? } else { PartitionClass::new(g, &[1])? };
    let shift = induced_form_at(labeling, &start)?.shift();
    let base = labeling.act(&shift, &start)?;
    let q = induced_form_at(labeling, &base)?;
    if !q.shift().is_zero() || !theta_parity(&base)?.is_even() {
        return Err(HyperellipticError::NoTorsorBase);
    }
    Ok(base)
}

/// `torsor_base + c(k)`.
pub fn char_to_partition(k: &Characteristic, labeling: &ComponentLabel) -> Result<PartitionClass> {
    if k.genus() != labeling.genus {
        return Err(HyperellipticError::GenusMismatch(labeling.genus, k.genus()));
    }
    labeling.act(k, &labeling.torsor_base)
}

pub fn partition_to_char(t: &PartitionClass, labeling: &ComponentLabel) -> Result<Characteristic> {
    check_support(t)?;
    labeling.preimage(&partition_add(t, &labeling.torsor_base)?)
}

/// All classes of a given reduced size that are theta characteristics.
fn classes_of_reduced_size(genus: usize, size: u32) -> Vec<PartitionClass> {
    let n = 2 * genus as u32 + 2;
    let mut out = Vec::new();
    // subsets of {1..n} of the given size; for size g+1 keep one half only
    let mut stack: Vec<(u32, u128, u32)> = vec![(0, 0, 0)];
    while let Some((next, mask, count)) = stack.pop() {
        if count == size {
            let c = PartitionClass::from_mask(genus, mask);
            if size * 2 < n || mask & (1u128 << (n - 1)) == 0 {
                out.push(c);
            }
            continue;
        }
        for l in (next..n).rev() {
            if n - l >= size - count {
                stack.push((l + 1, mask | 1u128 << l, count + 1));
            }
        }
    }
    out.sort();
    out
}

/// Even characteristics with `h⁰ ≥ 2`: the thetanulls vanishing along the
/// whole component.
pub fn vanishing_thetanulls(labeling: &ComponentLabel) -> Result<Vec<Characteristic>> {
    let g = labeling.genus as u32;
    let mut out = Vec::new();
    let mut t = (g + 1) % 2;
    while t <= g + 1 {
        let h = (g + 1 - t) / 2;
        if h >= 2 && h.is_multiple_of(2) {
            for c in classes_of_reduced_size(labeling.genus, t) {
                out.push(partition_to_char(&c, labeling)?);
            }
        }
        t += 2;
    }
    out.sort_by_key(|k| k.bits());
    Ok(out)
}

/// Number of even and odd theta characteristics counted in the partition
/// model, plus the number with `h⁰ ≥ 2` even.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub even: u64,
    pub odd: u64,
    pub vanishing: u64,
}

/// Counts by reduced size, without enumerating characteristics.
pub fn class_counts(genus: usize) -> Result<ClassCounts> {
    check_genus(genus)?;
    let n = 2 * genus as u64 + 2;
    let g = genus as u64;
    let binom = |n: u64, k: u64| (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as u64;
    let mut counts = ClassCounts { even: 0, odd: 0, vanishing: 0 };
    let mut t = (g + 1) % 2;
    while t <= g + 1 {
        let classes = if 2 * t == n { binom(n, t) / 2 } else { binom(n, t) };
        let h = (g + 1 - t) / 2;
        if h.is_multiple_of(2) {
            counts.even += classes;
            if h >= 2 {
                counts.vanishing += classes;
            }
        } else {
            counts.odd += classes;
        }
        t += 2;
    }
    Ok(counts)
}

/// The characteristics `H + E − p_k` for `E = Σ_{s∈S} p_s`, whose partitions
/// are `S ∖ {s_k}`.
pub fn trans_config(labeling: &ComponentLabel, points: &[u32]) -> Result<Vec<Characteristic>> {
    trans_config_partitions(labeling, points)?
        .iter()
        .map(|t| partition_to_char(t, labeling))
        .collect::<Result<Vec<_>>>()
}

pub fn trans_config_partitions(labeling: &ComponentLabel, points: &[u32]) -> Result<Vec<PartitionClass>> {
    let g = labeling.genus;
    if g < 3 || points.len() != g - 2 {
        return Err(HyperellipticError::WrongPointCount { expected: g.saturating_sub(2), got: points.len() });
    }
    // validates range and distinctness
    PartitionClass::new(g, points)?;
    points
        .iter()
        .map(|skip| {
            let rest: Vec<u32> = points.iter().copied().filter(|p| p != skip).collect();
            PartitionClass::new(g, &rest)
        })
        .collect()
}

/// Parity of a characteristic read through the labeling, for diagnostics.
pub fn parity_through_labeling(k: &Characteristic, labeling: &ComponentLabel) -> Result<(Parity, Parity)> {
    Ok((parity(k), theta_parity(&char_to_partition(k, labeling)?)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(g: usize, l: &[u32]) -> PartitionClass {
        PartitionClass::new(g, l).unwrap()
    }

    #[test]
    fn add_examples() {
        let g = 3;
        assert_eq!(partition_add(&class(g, &[1, 2]), &class(g, &[2, 3])).unwrap(), class(g, &[1, 3]));
        let a = class(g, &[1, 4, 5]);
        assert_eq!(partition_add(&a, &a).unwrap(), PartitionClass::empty(g).unwrap());
        let comp = class(g, &[2, 3, 6, 7, 8]);
        assert_eq!(comp, a);
        assert_eq!(partition_add(&a, &comp).unwrap(), PartitionClass::empty(g).unwrap());
        assert_eq!(class(g, &[8]).labels(), vec![1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn parity_and_pairing_examples() {
        let g = 3;
        assert_eq!(partition_parity(&PartitionClass::empty(g).unwrap()), Parity::Even);
        assert_eq!(partition_parity(&class(g, &[1])), Parity::Odd);
        assert_eq!(partition_parity(&class(g, &(1..=8).collect::<Vec<_>>())), Parity::Even);
        assert!(partition_pairing(&class(g, &[1, 2]), &class(g, &[2, 3])).unwrap());
        assert!(!partition_pairing(&class(g, &[1, 2]), &class(g, &[3, 4])).unwrap());
        assert!(!partition_pairing(&class(g, &[1, 2]), &class(g, &[1, 2])).unwrap());
        assert_eq!(partition_pairing(&class(g, &[1]), &class(g, &[1, 2])), Err(HyperellipticError::OddClass(1)));
    }

    #[test]
    fn label_validation() {
        assert!(matches!(PartitionClass::new(3, &[9]), Err(HyperellipticError::LabelOutOfRange { .. })));
        assert_eq!(PartitionClass::new(3, &[2, 2]), Err(HyperellipticError::DuplicateLabel(2)));
    }

    #[test]
    fn h0_examples() {
        assert_eq!(h0(&PartitionClass::empty(3).unwrap()).unwrap(), 2);
        assert_eq!(theta_parity(&PartitionClass::empty(3).unwrap()).unwrap(), Parity::Even);
        let t = class(6, &[1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(h0(&t).unwrap(), 0);
        assert_eq!(closed_form_parity(&t).unwrap(), Parity::Even);
        assert!(matches!(h0(&class(6, &[1, 2])), Err(HyperellipticError::SupportParity { .. })));
    }

    #[test]
    fn class_counts_match_enumeration() {
        for g in 2..=6 {
            let mut even = 0u64;
            let mut odd = 0u64;
            for c in PartitionClass::all(g).filter(|c| check_support(c).is_ok()) {
                match theta_parity(&c).unwrap() {
                    Parity::Even => even += 1,
                    Parity::Odd => odd += 1,
                }
            }
            let counts = class_counts(g).unwrap();
            assert_eq!((even, odd), (counts.even, counts.odd), "g={g}");
            assert_eq!(even, crate::quadform::even_count(g));
            assert_eq!(odd, crate::quadform::odd_count(g));
        }
        assert_eq!(class_counts(6).unwrap(), ClassCounts { even: 2080, odd: 2016, vanishing: 364 });
    }

    #[test]
    fn std_labeling_gram() {
        let g = 6;
        let l = std_labeling(g).unwrap();
        let im = l.basis_images();
        for i in 0..g {
            assert_eq!(partition_parity(&im[i]), Parity::Even);
            assert_eq!(partition_parity(&im[g + i]), Parity::Even);
            for j in 0..g {
                assert_eq!(partition_pairing(&im[i], &im[g + j]).unwrap(), i == j);
                assert!(!partition_pairing(&im[i], &im[j]).unwrap());
                assert!(!partition_pairing(&im[g + i], &im[g + j]).unwrap());
            }
        }
        let mut bad = im.to_vec();
        bad.swap(0, g);
        bad[0] = bad[1];
        assert_eq!(ComponentLabel::from_images(g, bad), Err(HyperellipticError::NotSymplectic));
    }

    #[test]
    fn torsor_base_by_search() {
        for g in 2..=4 {
            let l = std_labeling(g).unwrap();
            let found: Vec<_> = PartitionClass::all(g)
                .filter(|c| check_support(c).is_ok())
                .filter(|c| theta_parity(c).unwrap().is_even())
                .filter(|c| {
                    F2Vector::all(g).all(|j| {
                        let moved = l.act(&j, c).unwrap();
                        let v = theta_parity(c).unwrap().bit() ^ theta_parity(&moved).unwrap().bit();
                        v == j.q0()
                    })
                })
                .collect();
            assert_eq!(found, vec![l.torsor_base()], "g={g}");
        }
    }

    #[test]
    fn char_partition_round_trip_g6() {
        let g = 6;
        let l = std_labeling(g).unwrap();
        assert_eq!(char_to_partition(&F2Vector::zero(g).unwrap(), &l).unwrap(), l.torsor_base());
        for k in F2Vector::all(g) {
            let t = char_to_partition(&k, &l).unwrap();
            assert_eq!(partition_to_char(&t, &l).unwrap(), k);
            assert_eq!(theta_parity(&t).unwrap(), parity(&k));
        }
    }

    #[test]
    fn vanishing_counts() {
        for (g, n) in [(3, 1), (4, 10), (6, 364)] {
            let l = std_labeling(g).unwrap();
            let v = vanishing_thetanulls(&l).unwrap();
            assert_eq!(v.len(), n, "g={g}");
            assert!(v.iter().all(|k| parity(k).is_even()));
        }
    }

    #[test]
    fn trans_config_g6() {
        let g = 6;
        let l = std_labeling(g).unwrap();
        let parts = trans_config_partitions(&l, &[1, 2, 3, 4]).unwrap();
        let labels: Vec<_> = parts.iter().map(|p| p.labels()).collect();
        assert_eq!(labels, vec![vec![2, 3, 4], vec![1, 3, 4], vec![1, 2, 4], vec![1, 2, 3]]);
        for (i, p) in parts.iter().enumerate() {
            assert_eq!(h0(p).unwrap(), 2);
            for q in &parts[i + 1..] {
                assert_eq!((p.mask() & q.mask()).count_ones() as usize, g - 4);
            }
        }
        let chars = trans_config(&l, &[1, 2, 3, 4]).unwrap();
        let vanishing = vanishing_thetanulls(&l).unwrap();
        assert!(chars.iter().all(|k| parity(k).is_even() && vanishing.contains(k)));
        assert!(matches!(trans_config(&l, &[1, 2, 3]), Err(HyperellipticError::WrongPointCount { .. })));
        assert_eq!(trans_config(&l, &[1, 2, 3, 3]), Err(HyperellipticError::DuplicateLabel(3)));
    }
}
