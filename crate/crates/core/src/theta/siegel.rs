use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ThetaError;
use crate::f2::{F2Vector, SymplecticMap};
use crate::quadform::Characteristic;

/// Relative margin subtracted from the computed smallest eigenvalue before it
/// is used in tail bounds.
const LAMBDA_MARGIN: f64 = 1e-10;

/// A point of the Siegel upper half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelMatrix {
    entries: DMatrix<Complex64>,
    lambda_min: f64,
}

#[derive(Serialize, Deserialize)]
struct SiegelJson {
    g: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl SiegelMatrix {
    /// Symmetrizes the input and checks that the imaginary part is positive
    /// definite.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, ThetaError> {
        let g = entries.nrows();
        if g == 0 || entries.ncols() != g {
            return Err(ThetaError::NotSquare(entries.nrows(), entries.ncols()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ThetaError::NotFinite);
        }
        let entries = (&entries + entries.transpose()).map(|z| z * 0.5);
        let im = entries.map(|z| z.im);
        let norm = im.norm().max(1.0);
        let computed = SymmetricEigen::new(im.clone()).eigenvalues.min();
        let lambda = computed - LAMBDA_MARGIN * norm;
        if lambda <= 0.0 {
            return Err(ThetaError::NotPositiveDefinite(computed));
        }
        // certify: Im Z − λ·I must still admit a Cholesky factor
        let shifted = &im - DMatrix::<f64>::identity(g, g) * lambda;
        if shifted.cholesky().is_none() {
            return Err(ThetaError::NotPositiveDefinite(computed));
        }
        Ok(Self { entries, lambda_min: lambda })
    }

    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self, ThetaError> {
        let g = re.len();
        if im.len() != g || re.iter().chain(im).any(|row| row.len() != g) {
            return Err(ThetaError::NotSquare(g, im.len()));
        }
        Self::new(DMatrix::from_fn(g, g, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    pub fn diagonal(values: &[Complex64]) -> Result<Self, ThetaError> {
        let g = values.len();
        Self::new(DMatrix::from_fn(g, g, |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) }))
    }

    pub fn block_diag(blocks: &[SiegelMatrix]) -> Result<Self, ThetaError> {
        let g: usize = blocks.iter().map(|b| b.genus()).sum();
        let mut m = DMatrix::from_element(g, g, Complex64::new(0.0, 0.0));
        let mut off = 0;
        for b in blocks {
            let n = b.genus();
            m.view_mut((off, off), (n, n)).copy_from(&b.entries);
            off += n;
        }
        Self::new(m)
    }

    pub fn genus(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn real(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    pub fn imag(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.im)
    }

    /// Certified lower bound on the smallest eigenvalue of `Im Z`.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn from_json(s: &str) -> Result<Self, ThetaError> {
        let raw: SiegelJson = serde_json::from_str(s).map_err(|e| ThetaError::Json(e.to_string()))?;
        Self::from_value(raw)
    }

    fn from_value(raw: SiegelJson) -> Result<Self, ThetaError> {
        if raw.re.len() != raw.g {
            return Err(ThetaError::NotSquare(raw.g, raw.re.len()));
        }
        Self::from_parts(&raw.re, &raw.im)
    }

    fn to_value(&self) -> SiegelJson {
        let g = self.genus();
        SiegelJson {
            g,
            re: (0..g).map(|i| (0..g).map(|j| self.entries[(i, j)].re).collect()).collect(),
            im: (0..g).map(|i| (0..g).map(|j| self.entries[(i, j)].im).collect()).collect(),
        }
    }
}

impl Serialize for SiegelMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SiegelMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        SiegelMatrix::from_value(SiegelJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// An element `M = (A B; C D)` of Sp_{2g}(ℤ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSymplectic {
    genus: usize,
    full: DMatrix<i64>,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct IntSymplecticJson {
    A: Vec<Vec<i64>>,
    B: Vec<Vec<i64>>,
    C: Vec<Vec<i64>>,
    D: Vec<Vec<i64>>,
}

fn omega(g: usize) -> DMatrix<i64> {
    DMatrix::from_fn(2 * g, 2 * g, |i, j| {
        if j == i + g {
            1
        } else if i == j + g {
            -1
        } else {
            0
        }
    })
}

fn to_rows(m: &DMatrix<i64>) -> Vec<Vec<i64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: &[Vec<i64>], g: usize) -> Result<DMatrix<i64>, ThetaError> {
    if let Some(bad) = rows.iter().find(|r| r.len() != g) {
        return Err(ThetaError::NotSquare(rows.len(), bad.len()));
    }
    if rows.len() != g {
        return Err(ThetaError::NotSquare(rows.len(), g));
    }
    Ok(DMatrix::from_fn(g, g, |i, j| rows[i][j]))
}

impl IntSymplectic {
    pub fn from_full(full: DMatrix<i64>) -> Result<Self, ThetaError> {
        let n = full.nrows();
        if n == 0 || !n.is_multiple_of(2) || full.ncols() != n {
            return Err(ThetaError::NotSquare(n, full.ncols()));
        }
        let g = n / 2;
        let j = omega(g);
        // MᵀΩM = Ω ⇔ AᵀC, BᵀD symmetric and AᵀD − CᵀB = 1
        if full.transpose() * &j * &full != j {
            return Err(ThetaError::NotSymplectic);
        }
        Ok(Self { genus: g, full })
    }

    pub fn from_blocks(
        a: &DMatrix<i64>,
        b: &DMatrix<i64>,
        c: &DMatrix<i64>,
        d: &DMatrix<i64>,
    ) -> Result<Self, ThetaError> {
        let g = a.nrows();
        for m in [a, b, c, d] {
            if m.nrows() != g || m.ncols() != g {
                return Err(ThetaError::NotSquare(m.nrows(), m.ncols()));
            }
        }
        let mut full = DMatrix::zeros(2 * g, 2 * g);
        full.view_mut((0, 0), (g, g)).copy_from(a);
        full.view_mut((0, g), (g, g)).copy_from(b);
        full.view_mut((g, 0), (g, g)).copy_from(c);
        full.view_mut((g, g), (g, g)).copy_from(d);
        Self::from_full(full)
    }

    pub fn identity(genus: usize) -> Self {
        Self { genus, full: DMatrix::identity(2 * genus, 2 * genus) }
    }

    /// `(0 −1; 1 0)`, the inversion `Z ↦ −Z⁻¹`.
    pub fn inversion(genus: usize) -> Self {
        Self::from_full(-omega(genus)).expect("Ω is symplectic")
    }

    /// `(1 S; 0 1)` for symmetric `S`.
    pub fn translation(s: &DMatrix<i64>) -> Result<Self, ThetaError> {
        let g = s.nrows();
        let id = DMatrix::identity(g, g);
        Self::from_blocks(&id, s, &DMatrix::zeros(g, g), &id)
    }

    /// `(1 0; S 1)` for symmetric `S`.
    pub fn lower_translation(s: &DMatrix<i64>) -> Result<Self, ThetaError> {
        let g = s.nrows();
        let id = DMatrix::identity(g, g);
        Self::from_blocks(&id, &DMatrix::zeros(g, g), s, &id)
    }

    /// `(U 0; 0 U⁻ᵀ)` for the elementary matrix `U = 1 + t·E_ij`, `i ≠ j`.
    pub fn elementary(genus: usize, i: usize, j: usize, t: i64) -> Result<Self, ThetaError> {
        if i == j || i >= genus || j >= genus {
            return Err(ThetaError::NotSymplectic);
        }
        let mut u = DMatrix::identity(genus, genus);
        u[(i, j)] = t;
        let mut u_inv_t = DMatrix::identity(genus, genus);
        u_inv_t[(j, i)] = -t;
        Self::from_blocks(&u, &DMatrix::zeros(genus, genus), &DMatrix::zeros(genus, genus), &u_inv_t)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn full(&self) -> &DMatrix<i64> {
        &self.full
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<i64> {
        let g = self.genus;
        self.full.view((r * g, c * g), (g, g)).into_owned()
    }

    pub fn a(&self) -> DMatrix<i64> {
        self.block(0, 0)
    }

    pub fn b(&self) -> DMatrix<i64> {
        self.block(0, 1)
    }

    pub fn c(&self) -> DMatrix<i64> {
        self.block(1, 0)
    }

    pub fn d(&self) -> DMatrix<i64> {
        self.block(1, 1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.genus, other.genus);
        Self { genus: self.genus, full: &self.full * &other.full }
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.full.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Membership in Γ_g(2): `M ≡ 1 (mod 2)`.
    pub fn is_level2(&self) -> bool {
        let id = DMatrix::<i64>::identity(2 * self.genus, 2 * self.genus);
        self.full.iter().zip(id.iter()).all(|(x, y)| (x - y).rem_euclid(2) == 0)
    }

    /// The element of Sp_{2g}(F₂) whose action on quadratic forms matches the
    /// action on characteristics: `(D C; B A) mod 2`, the contragredient of `M`.
    pub fn reduce_mod2(&self) -> SymplecticMap {
        let g = self.genus;
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        let entry = |i: usize, j: usize| -> bool {
            let v = match (i < g, j < g) {
                (true, true) => d[(i, j)],
                (true, false) => c[(i, j - g)],
                (false, true) => b[(i - g, j)],
                (false, false) => a[(i - g, j - g)],
            };
            v.rem_euclid(2) == 1
        };
        let columns =
            (0..2 * g).map(|j| (0..2 * g).filter(|&i| entry(i, j)).fold(0u64, |acc, i| acc | 1 << i)).collect();
        SymplecticMap::from_columns(g, columns).expect("reduction of a symplectic matrix")
    }

    pub fn from_json(s: &str) -> Result<Self, ThetaError> {
        let raw: IntSymplecticJson = serde_json::from_str(s).map_err(|e| ThetaError::Json(e.to_string()))?;
        Self::from_value(raw)
    }

    fn from_value(raw: IntSymplecticJson) -> Result<Self, ThetaError> {
        let g = raw.A.len();
        Self::from_blocks(
            &from_rows(&raw.A, g)?,
            &from_rows(&raw.B, g)?,
            &from_rows(&raw.C, g)?,
            &from_rows(&raw.D, g)?,
        )
    }
}

impl Serialize for IntSymplectic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntSymplecticJson { A: to_rows(&self.a()), B: to_rows(&self.b()), C: to_rows(&self.c()), D: to_rows(&self.d()) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntSymplectic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        IntSymplectic::from_value(IntSymplecticJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

fn to_complex(m: &DMatrix<i64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x as f64, 0.0))
}

/// Largest tolerated `‖CZ+D‖·‖(CZ+D)⁻¹‖`.
pub const MAX_CONDITION: f64 = 1e12;

/// `M·Z = (AZ + B)(CZ + D)⁻¹` together with `det(CZ + D)` and the condition
/// estimate of `CZ + D`.
#[derive(Debug, Clone)]
pub struct ActedMatrix {
    pub z: SiegelMatrix,
    pub automorphy_det: Complex64,
    pub condition: f64,
}

pub fn siegel_act_detailed(m: &IntSymplectic, z: &SiegelMatrix) -> Result<ActedMatrix, ThetaError> {
    if m.genus() != z.genus() {
        return Err(ThetaError::GenusMismatch(m.genus(), z.genus()));
    }
    let zc = z.entries();
    let cz_d = to_complex(&m.c()) * zc + to_complex(&m.d());
    let inv = cz_d.clone().try_inverse().ok_or(ThetaError::IllConditioned(f64::INFINITY))?;
    let condition = cz_d.norm() * inv.norm();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(ThetaError::IllConditioned(condition));
    }
    let out = (to_complex(&m.a()) * zc + to_complex(&m.b())) * inv;
    Ok(ActedMatrix { z: SiegelMatrix::new(out)?, automorphy_det: cz_d.determinant(), condition })
}

pub fn siegel_act(m: &IntSymplectic, z: &SiegelMatrix) -> Result<SiegelMatrix, ThetaError> {
    Ok(siegel_act_detailed(m, z)?.z)
}

fn mat_vec_mod2(m: &DMatrix<i64>, v: u64) -> u64 {
    let g = m.nrows();
    (0..g).fold(0u64, |acc, i| {
        let s: i64 = (0..g).filter(|&j| v >> j & 1 == 1).map(|j| m[(i, j)]).sum();
        acc | ((s.rem_euclid(2) as u64) << i)
    })
}

fn diag_mod2(m: &DMatrix<i64>) -> u64 {
    (0..m.nrows()).fold(0u64, |acc, i| acc | ((m[(i, i)].rem_euclid(2) as u64) << i))
}

/// Action on characteristics mod 2:
/// `k′ ↦ Dk′ + Ck″ + diag(CDᵀ)`, `k″ ↦ Bk′ + Ak″ + diag(ABᵀ)`.
pub fn char_act_int(m: &IntSymplectic, k: &Characteristic) -> Result<Characteristic, ThetaError> {
    if m.genus() != k.genus() {
        return Err(ThetaError::GenusMismatch(m.genus(), k.genus()));
    }
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    let (k1, k2) = (k.first(), k.second());
    let first = mat_vec_mod2(&d, k1) ^ mat_vec_mod2(&c, k2) ^ diag_mod2(&(&c * d.transpose()));
    let second = mat_vec_mod2(&b, k1) ^ mat_vec_mod2(&a, k2) ^ diag_mod2(&(&a * b.transpose()));
    Ok(F2Vector::from_halves(m.genus(), first, second)?)
}
