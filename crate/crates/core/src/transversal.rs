//! Exact rank check for the quadratic differentials attached to the
//! configuration `{H + E − p_k : k ∈ S}`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, RngExt};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::hyperelliptic::{h0, std_labeling, theta_parity, trans_config, trans_config_partitions, HyperellipticError};
use crate::quadform::{parity, Characteristic};

pub const MAX_GENUS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransversalError {
    #[error("genus {0} is outside 3..=32")]
    InvalidGenus(usize),
    #[error("expected {expected} nodes, got {got}")]
    NodeCount { expected: usize, got: usize },
    #[error("node {0} appears twice")]
    DuplicateNode(String),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("index {index} is outside 1..={max}")]
    IndexOutOfRange { index: u32, max: u32 },
    #[error("index {0} repeated")]
    DuplicateIndex(u32),
    #[error("index set must have {expected} elements, got {got}")]
    WrongSetSize { expected: usize, got: usize },
    #[error("index {0} is not in the set")]
    NotInSet(u32),
    #[error(transparent)]
    Hyperelliptic(#[from] HyperellipticError),
}

pub type Result<T> = std::result::Result<T, TransversalError>;

fn check_genus(genus: usize) -> Result<()> {
    if (3..=MAX_GENUS).contains(&genus) {
        Ok(())
    } else {
        Err(TransversalError::InvalidGenus(genus))
    }
}

/// `2g + 2` pairwise distinct rational branch points `x_1, …, x_{2g+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    genus: usize,
    nodes: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct NodeSetJson {
    g: usize,
    nodes: Vec<String>,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| TransversalError::BadRational(s.into()))?;
            let q: BigInt = q.trim().parse().map_err(|_| TransversalError::BadRational(s.into()))?;
            if q.is_zero() {
                return Err(TransversalError::BadRational(s.into()));
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(t.parse().map_err(|_| TransversalError::BadRational(s.into()))?),
    };
    Ok(parsed)
}

impl NodeSet {
    pub fn new(genus: usize, nodes: Vec<BigRational>) -> Result<Self> {
        check_genus(genus)?;
        if nodes.len() != 2 * genus + 2 {
            return Err(TransversalError::NodeCount { expected: 2 * genus + 2, got: nodes.len() });
        }
        let mut seen = BTreeSet::new();
        for x in &nodes {
            if !seen.insert(x) {
                return Err(TransversalError::DuplicateNode(x.to_string()));
            }
        }
        Ok(Self { genus, nodes })
    }

    /// Nodes `1, 2, …, 2g+2`.
    pub fn integers(genus: usize) -> Result<Self> {
        Self::new(genus, (1..=2 * genus as i64 + 2).map(|i| BigRational::from_integer(i.into())).collect())
    }

    /// Distinct random nodes `p/q` with `|p| ≤ 1000` and `1 ≤ q ≤ max_den`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, genus: usize, max_den: i64) -> Result<Self> {
        check_genus(genus)?;
        let mut seen = BTreeSet::new();
        let mut nodes = Vec::with_capacity(2 * genus + 2);
        while nodes.len() < 2 * genus + 2 {
            let x = BigRational::new(rng.random_range(-1000..=1000i64).into(), rng.random_range(1..=max_den).into());
            if seen.insert(x.clone()) {
                nodes.push(x);
            }
        }
        Self::new(genus, nodes)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: NodeSetJson = serde_json::from_str(s).map_err(|e| TransversalError::Json(e.to_string()))?;
        Self::from_value(raw)
    }

    fn from_value(raw: NodeSetJson) -> Result<Self> {
        let nodes = raw.nodes.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Self::new(raw.g, nodes)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn nodes(&self) -> &[BigRational] {
        &self.nodes
    }

    /// The node with 1-based label `index`.
    pub fn node(&self, index: u32) -> &BigRational {
        &self.nodes[index as usize - 1]
    }

    /// Image under `x ↦ a·x + b`.
    pub fn affine_image(&self, a: &BigRational, b: &BigRational) -> Result<Self> {
        Self::new(self.genus, self.nodes.iter().map(|x| a * x + b).collect())
    }
}

impl Serialize for NodeSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NodeSetJson { g: self.genus, nodes: self.nodes.iter().map(|x| x.to_string()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        NodeSet::from_value(NodeSetJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Validates an index set of size `g − 2` with labels in `1..=2g+2`.
pub fn check_index_set(genus: usize, set: &[u32]) -> Result<()> {
    check_genus(genus)?;
    if set.len() != genus - 2 {
        return Err(TransversalError::WrongSetSize { expected: genus - 2, got: set.len() });
    }
    let max = 2 * genus as u32 + 2;
    let mut seen = BTreeSet::new();
    for &i in set {
        if i == 0 || i > max {
            return Err(TransversalError::IndexOutOfRange { index: i, max });
        }
        if !seen.insert(i) {
            return Err(TransversalError::DuplicateIndex(i));
        }
    }
    Ok(())
}

/// Effective divisor on the branch points, `multiplicities[i − 1]` at `p_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divisor {
    pub k: u32,
    pub multiplicities: Vec<u32>,
}

impl Divisor {
    pub fn degree(&self) -> u32 {
        self.multiplicities.iter().sum()
    }
}

/// `F_k = p_1 + ⋯ + p_{2g+2} + 2(E − p_k)` with `E = Σ_{s∈S} p_s`.
pub fn quadratic_differential_divisor(ns: &NodeSet, set: &[u32], k: u32) -> Result<Divisor> {
    check_index_set(ns.genus, set)?;
    if !set.contains(&k) {
        return Err(TransversalError::NotInSet(k));
    }
    let mut multiplicities = vec![1; 2 * ns.genus + 2];
    for &s in set.iter().filter(|&&s| s != k) {
        multiplicities[s as usize - 1] += 2;
    }
    Ok(Divisor { k, multiplicities })
}

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn one() -> Self {
        Self { coeffs: vec![BigRational::one()] }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Multiplies by `x − root`.
    pub fn times_linear(&self, root: &BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i + 1] += c;
            coeffs[i] -= c * root;
        }
        Self { coeffs }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        coeffs.serialize(s)
    }
}

/// `G_k(x) = Π_{i ∈ S, i ≠ k} (x − x_i)` for each `k ∈ S`, in the order of `S`.
pub fn basis_polys(ns: &NodeSet, set: &[u32]) -> Result<Vec<Polynomial>> {
    check_index_set(ns.genus, set)?;
    Ok(set
        .iter()
        .map(|&k| set.iter().filter(|&&i| i != k).fold(Polynomial::one(), |p, &i| p.times_linear(ns.node(i))))
        .collect())
}

/// Rank of the coefficient matrix over ℚ.
pub fn rank(polys: &[Polynomial]) -> usize {
    let width = polys.iter().map(|p| p.coeffs.len()).max().unwrap_or(0);
    let mut rows: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|p| {
            let mut r = p.coeffs.clone();
            r.resize(width, BigRational::zero());
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        let pivot_row: Vec<BigRational> = rows[rank].iter().map(|x| x * &inv).collect();
        for r in rows.iter_mut().skip(rank + 1) {
            if !r[col].is_zero() {
                let factor = r[col].clone();
                for (x, p) in r.iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &factor * p;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// `V[a][b] = G_{S_a}(x_{S_b})`.
pub fn evaluation_matrix(ns: &NodeSet, set: &[u32]) -> Result<Vec<Vec<BigRational>>> {
    let polys = basis_polys(ns, set)?;
    Ok(polys.iter().map(|p| set.iter().map(|&l| p.eval(ns.node(l))).collect()).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct TransversalityReport {
    pub genus: usize,
    pub points: Vec<u32>,
    pub characteristics: Vec<Characteristic>,
    pub partitions: Vec<Vec<u32>>,
    pub characteristics_even: bool,
    pub h0_values: Vec<u32>,
    pub distinct: bool,
    pub divisors: Vec<Divisor>,
    pub polynomials: Vec<Polynomial>,
    pub rank: usize,
    pub expected_rank: usize,
    pub evaluation_diagonal: bool,
    pub pass: bool,
}

pub fn transversality_report(ns: &NodeSet, set: &[u32]) -> Result<TransversalityReport> {
    let g = ns.genus;
    check_index_set(g, set)?;
    let labeling = std_labeling(g)?;
    let characteristics = trans_config(&labeling, set)?;
    let parts = trans_config_partitions(&labeling, set)?;
    let h0_values = parts.iter().map(h0).collect::<std::result::Result<Vec<_>, _>>()?;
    let characteristics_even = characteristics.iter().all(|k| parity(k).is_even())
        && parts.iter().all(|t| theta_parity(t).map(|p| p.is_even()).unwrap_or(false));
    let distinct = characteristics.iter().collect::<BTreeSet<_>>().len() == characteristics.len();
    let divisors = set.iter().map(|&k| quadratic_differential_divisor(ns, set, k)).collect::<Result<Vec<_>>>()?;
    let polynomials = basis_polys(ns, set)?;
    let rank = rank(&polynomials);
    let v = evaluation_matrix(ns, set)?;
    let evaluation_diagonal =
        v.iter().enumerate().all(|(a, row)| row.iter().enumerate().all(|(b, x)| (a == b) != x.is_zero()));
    let expected_rank = g - 2;
    let pass = rank == expected_rank
        && characteristics_even
        && distinct
        && h0_values.iter().all(|&h| h == 2)
        && evaluation_diagonal
        && divisors.iter().all(|d| d.degree() as usize == 4 * g - 4);
    Ok(TransversalityReport {
        genus: g,
        points: set.to_vec(),
        characteristics,
        partitions: parts.iter().map(|t| t.labels()).collect(),
        characteristics_even,
        h0_values,
        distinct,
        divisors,
        polynomials,
        rank,
        expected_rank,
        evaluation_diagonal,
        pass,
    })
}
