//! Even effective theta characteristics on a general bi-elliptic curve of
//! genus 6, and the four witness quadruples.
//!
//! A characteristic `R_i + π*(D_i + F)` is recorded by its fixed point `i`
//! (one of the ten ramification points) and the twist `F ∈ J(X)[2] ≅ V₄`.
//! Two characteristics with the same fixed point differ by `π*` of the sum of
//! their twists; `π*` is taken to be injective on twists.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orbits::OrbitClass;

pub const RAMIFICATION_POINTS: u8 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BiellipticError {
    #[error("fixed point {0} is outside 1..=10")]
    BadFixedPoint(u8),
    #[error("twist {0} is outside 0..=3")]
    BadTwist(u8),
    #[error("inputs must be pairwise distinct")]
    Coincident,
    #[error("combination has mixed fixed points")]
    MixedFixedPoints,
    #[error("dependence of {0:?} is not decided by the parity rules")]
    Undecidable([BChar; 4]),
}

/// An element of `J(X)[2] = {0, F₁, F₂, F₃}`, with `F₁ + F₂ = F₃`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Twist(u8);

impl Twist {
    pub const ZERO: Twist = Twist(0);
    pub const F1: Twist = Twist(1);
    pub const F2: Twist = Twist(2);
    pub const F3: Twist = Twist(3);
    pub const ALL: [Twist; 4] = [Twist::ZERO, Twist::F1, Twist::F2, Twist::F3];

    pub fn new(code: u8) -> Result<Self, BiellipticError> {
        if code <= 3 {
            Ok(Twist(code))
        } else {
            Err(BiellipticError::BadTwist(code))
        }
    }

    pub fn code(self) -> u8 {
        self.0
    }
}

impl std::ops::Add for Twist {
    type Output = Twist;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Twist) -> Twist {
        Twist(self.0 ^ rhs.0)
    }
}

impl TryFrom<u8> for Twist {
    type Error = BiellipticError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Twist::new(v)
    }
}

impl From<Twist> for u8 {
    fn from(t: Twist) -> u8 {
        t.0
    }
}

impl fmt::Debug for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("0"),
            n => write!(f, "F{n}"),
        }
    }
}

/// `R_i + π*(D_i + twist)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawBChar")]
pub struct BChar {
    fixed_point: u8,
    twist: Twist,
}

#[derive(Deserialize)]
struct RawBChar {
    fixed_point: u8,
    twist: Twist,
}

impl TryFrom<RawBChar> for BChar {
    type Error = BiellipticError;

    fn try_from(raw: RawBChar) -> Result<Self, Self::Error> {
        BChar::new(raw.fixed_point, raw.twist)
    }
}

impl BChar {
    pub fn new(fixed_point: u8, twist: Twist) -> Result<Self, BiellipticError> {
        if !(1..=RAMIFICATION_POINTS).contains(&fixed_point) {
            return Err(BiellipticError::BadFixedPoint(fixed_point));
        }
        Ok(Self { fixed_point, twist })
    }

    pub fn fixed_point(&self) -> u8 {
        self.fixed_point
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }
}

impl fmt::Debug for BChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{:?})", self.fixed_point, self.twist)
    }
}

fn bc(i: u8, t: Twist) -> BChar {
    BChar::new(i, t).expect("valid literal")
}

/// The forty even effective characteristics.
pub fn all_chars() -> Vec<BChar> {
    (1..=RAMIFICATION_POINTS).flat_map(|i| Twist::ALL.map(|t| bc(i, t))).collect()
}

/// The formal class `plus[0] + plus[1] − minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BCombo {
    pub plus: [BChar; 2],
    pub minus: BChar,
}

impl BCombo {
    pub fn new(a: BChar, b: BChar, minus: BChar) -> Self {
        Self { plus: [a, b], minus }
    }

    fn fixed_points(&self) -> [u8; 3] {
        [self.plus[0].fixed_point, self.plus[1].fixed_point, self.minus.fixed_point]
    }
}

/// Even iff at least two of the three fixed points coincide.
pub fn combo_parity(c: &BCombo) -> bool {
    let [a, b, m] = c.fixed_points();
    !(a == b || a == m || b == m)
}

/// Collapses a combination with a single fixed point to an effective
/// characteristic: twists add in V₄.
pub fn reduce_same_fixed(c: &BCombo) -> Result<BChar, BiellipticError> {
    let [a, b, m] = c.fixed_points();
    if a != b || a != m {
        return Err(BiellipticError::MixedFixedPoints);
    }
    Ok(bc(a, c.plus[0].twist + c.plus[1].twist + c.minus.twist))
}

/// `⟨a − base, b − base⟩`, read off from the four-term relation: the three
/// effective characteristics are even, so only `a + b − base` contributes.
pub fn pairing(base: &BChar, a: &BChar, b: &BChar) -> Result<bool, BiellipticError> {
    if base == a || base == b || a == b {
        return Err(BiellipticError::Coincident);
    }
    Ok(combo_parity(&BCombo::new(*a, *b, *base)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Undecidable,
}

/// Decides whether `(a − base) + (b − base) + (c − base) = 0`, i.e. whether
/// the four characteristics sum to `2K`.
///
/// Rules, tried in order:
/// 1. if the four split into two same-fixed-point pairs, the sum is the
///    explicit twist `π*(t₁ + t₂ + t₃ + t₄)`;
/// 2. a combination `x + y − z` with three distinct fixed points is odd and
///    cannot equal the remaining (even) member;
/// 3. a combination with one fixed point reduces to an effective
///    characteristic that is compared with the remaining member directly.
pub fn triple_sum_is_zero(base: &BChar, a: &BChar, b: &BChar, c: &BChar) -> Result<Decision, BiellipticError> {
    let four = [*base, *a, *b, *c];
    for i in 0..4 {
        for j in i + 1..4 {
            if four[i] == four[j] {
                return Err(BiellipticError::Coincident);
            }
        }
    }
    // the condition is symmetric in the four members
    for (p, q, r, s) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        if four[p].fixed_point == four[q].fixed_point && four[r].fixed_point == four[s].fixed_point {
            let t = four[p].twist + four[q].twist + four[r].twist + four[s].twist;
            return Ok(if t == Twist::ZERO { Decision::Yes } else { Decision::No });
        }
    }
    // sum zero ⇔ x + y − z = w for any split {x, y, z} ∪ {w}
    for w in 0..4 {
        let rest: Vec<BChar> = (0..4).filter(|&i| i != w).map(|i| four[i]).collect();
        let combo = BCombo::new(rest[0], rest[1], rest[2]);
        if combo_parity(&combo) {
            return Ok(Decision::No);
        }
        if let Ok(reduced) = reduce_same_fixed(&combo) {
            return Ok(if reduced == four[w] { Decision::Yes } else { Decision::No });
        }
    }
    Ok(Decision::Undecidable)
}

/// Span dimension and odd-pairing count for a quadruple of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BiellipticInvariants {
    pub dependent: bool,
    pub odd_pairs: usize,
}

pub fn invariants(quad: &[BChar; 4]) -> Result<BiellipticInvariants, BiellipticError> {
    let [a, b, c, base] = *quad;
    let dependent = match triple_sum_is_zero(&base, &a, &b, &c)? {
        Decision::Yes => true,
        Decision::No => false,
        Decision::Undecidable => return Err(BiellipticError::Undecidable(*quad)),
    };
    let odd_pairs = [(a, b), (a, c), (b, c)]
        .iter()
        .map(|(x, y)| pairing(&base, x, y))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|&p| p)
        .count();
    Ok(BiellipticInvariants { dependent, odd_pairs })
}

pub fn classify_bielliptic(quad: &[BChar; 4]) -> Result<OrbitClass, BiellipticError> {
    let inv = invariants(quad)?;
    Ok(OrbitClass::from_invariants(if inv.dependent { 2 } else { 3 }, inv.odd_pairs))
}

/// One of the four witness sets together with its expected orbit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Witness {
    pub name: &'static str,
    pub chars: [BChar; 4],
    pub expected: OrbitClass,
}

/// The witness quadruples. The third set is read with its last member at
/// fixed point `R₁` and twist `F₁`.
pub fn witness_quadruples() -> [Witness; 4] {
    use Twist as T;
    [
        Witness {
            name: "W1",
            chars: [bc(1, T::ZERO), bc(2, T::F1), bc(1, T::F1), bc(2, T::ZERO)],
            expected: OrbitClass::A1,
        },
        Witness {
            name: "W2",
            chars: [bc(1, T::ZERO), bc(2, T::F2), bc(1, T::F1), bc(2, T::ZERO)],
            expected: OrbitClass::A2,
        },
        Witness {
            name: "W3",
            chars: [bc(1, T::ZERO), bc(2, T::ZERO), bc(3, T::ZERO), bc(1, T::F1)],
            expected: OrbitClass::A3,
        },
        Witness {
            name: "W4",
            chars: [bc(1, T::ZERO), bc(2, T::ZERO), bc(3, T::ZERO), bc(4, T::ZERO)],
            expected: OrbitClass::A4,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use Twist as T;

    #[test]
    fn forty_chars() {
        let all = all_chars();
        assert_eq!(all.len(), 40);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 40);
        for i in 1..=10 {
            assert_eq!(all.iter().filter(|c| c.fixed_point() == i).count(), 4);
        }
    }

    #[test]
    fn combo_parity_examples() {
        let c = |a, b, m| BCombo::new(bc(a, T::ZERO), bc(b, T::F1), bc(m, T::F2));
        assert!(!combo_parity(&c(1, 1, 2)));
        assert!(combo_parity(&c(1, 2, 3)));
        assert!(!combo_parity(&c(1, 1, 1)));
        // swapping plus terms
        for x in all_chars() {
            for y in all_chars() {
                let m = bc(5, T::F3);
                assert_eq!(combo_parity(&BCombo::new(x, y, m)), combo_parity(&BCombo::new(y, x, m)));
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let t = T::F2;
        let s = T::F3;
        assert_eq!(reduce_same_fixed(&BCombo::new(bc(4, t), bc(4, t), bc(4, s))).unwrap(), bc(4, s));
        assert_eq!(reduce_same_fixed(&BCombo::new(bc(1, T::F1), bc(1, T::F2), bc(1, T::ZERO))).unwrap(), bc(1, T::F3));
        assert_eq!(
            reduce_same_fixed(&BCombo::new(bc(1, T::ZERO), bc(1, T::ZERO), bc(1, T::F1))).unwrap(),
            bc(1, T::F1)
        );
        assert_eq!(
            reduce_same_fixed(&BCombo::new(bc(1, T::ZERO), bc(2, T::ZERO), bc(1, T::F1))),
            Err(BiellipticError::MixedFixedPoints)
        );
    }

    #[test]
    fn pairing_examples() {
        assert!(!pairing(&bc(2, T::ZERO), &bc(1, T::ZERO), &bc(1, T::F1)).unwrap());
        assert!(pairing(&bc(4, T::ZERO), &bc(1, T::ZERO), &bc(2, T::ZERO)).unwrap());
        assert_eq!(pairing(&bc(4, T::ZERO), &bc(4, T::ZERO), &bc(2, T::ZERO)), Err(BiellipticError::Coincident));
    }

    #[test]
    fn pairing_depends_only_on_fixed_points() {
        for (i, j, k) in [(1, 2, 3), (1, 1, 2), (2, 1, 1), (1, 2, 1), (3, 3, 3)] {
            let mut values = std::collections::BTreeSet::new();
            for tb in T::ALL {
                for ta in T::ALL {
                    for tc in T::ALL {
                        let (base, a, b) = (bc(i, tb), bc(j, ta), bc(k, tc));
                        if let Ok(p) = pairing(&base, &a, &b) {
                            values.insert(p);
                            assert_eq!(p, pairing(&base, &b, &a).unwrap());
                        }
                    }
                }
            }
            assert_eq!(values.len(), 1);
        }
    }

    #[test]
    fn witness_dependence() {
        let w = witness_quadruples();
        let d = |q: &[BChar; 4]| triple_sum_is_zero(&q[3], &q[0], &q[1], &q[2]).unwrap();
        assert_eq!(d(&w[0].chars), Decision::Yes);
        assert_eq!(d(&w[1].chars), Decision::No);
        assert_eq!(d(&w[3].chars), Decision::No);
    }

    #[test]
    fn witnesses_classify() {
        for w in witness_quadruples() {
            assert_eq!(classify_bielliptic(&w.chars).unwrap(), w.expected, "{}", w.name);
        }
        let mut w4 = witness_quadruples()[3].chars;
        w4.reverse();
        assert_eq!(classify_bielliptic(&w4).unwrap(), OrbitClass::A4);
        let same = [bc(1, T::ZERO), bc(1, T::F1), bc(1, T::F2), bc(1, T::F3)];
        assert_eq!(classify_bielliptic(&same).unwrap(), OrbitClass::A1);
    }

    #[test]
    fn every_quadruple_is_decided() {
        let all = all_chars();
        let n = all.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let q = [all[a], all[b], all[c], all[d]];
                        let class = classify_bielliptic(&q).unwrap();
                        for r in 1..4 {
                            let mut rotated = q;
                            rotated.rotate_left(r);
                            assert_eq!(classify_bielliptic(&rotated).unwrap(), class, "{q:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let c = bc(3, T::F2);
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"fixed_point":3,"twist":2}"#);
        assert!(serde_json::from_str::<BChar>(r#"{"fixed_point":3,"twist":4}"#).is_err());
        assert!(serde_json::from_str::<BChar>(r#"{"fixed_point":11,"twist":0}"#).is_err());
        assert_eq!(serde_json::from_str::<BChar>(r#"{"fixed_point":3,"twist":2}"#).unwrap(), c);
    }
}
