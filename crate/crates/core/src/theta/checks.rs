//! Numerical checks of the transformation law and of block factorization,
//! plus random generators for the numerical campaigns.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngExt};
use serde::Serialize;

use super::series::{radius_for, theta_with_radius, ThetaValue};
use super::siegel::{char_act_int, siegel_act_detailed, IntSymplectic, SiegelMatrix};
use super::ThetaError;
use crate::quadform::Characteristic;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Evaluates with the radius for `eps` and keeps whatever certificate results.
fn evaluate(z: &SiegelMatrix, k: &Characteristic, eps: f64) -> Result<ThetaValue, ThetaError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(ThetaError::BadEpsilon(eps));
    }
    theta_with_radius(z, k, radius_for(z.genus(), z.lambda_min(), eps / 2.0))
}

/// Outcome of comparing `|θ[M·k](M·Z)|` with `|det(CZ+D)|^{1/2}·|θ[k](Z)|`.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusReport {
    pub genus: usize,
    pub characteristic: Characteristic,
    pub acted_characteristic: Characteristic,
    pub level2: bool,
    pub r: f64,
    pub s: f64,
    pub diff: f64,
    pub tol: f64,
    pub r_bound: f64,
    pub s_bound: f64,
    pub det_abs: f64,
    pub condition: f64,
    pub pass: bool,
}

pub fn transform_modulus_check(
    m: &IntSymplectic,
    z: &SiegelMatrix,
    k: &Characteristic,
    eps: f64,
) -> Result<ModulusReport, ThetaError> {
    let acted = siegel_act_detailed(m, z)?;
    let mk = char_act_int(m, k)?;
    let lhs = evaluate(&acted.z, &mk, eps)?;
    let rhs = evaluate(z, k, eps)?;
    let det_abs = acted.automorphy_det.norm();
    let r = lhs.norm();
    let s = det_abs.sqrt() * rhs.norm();
    let diff = (r - s).abs();
    let tol = lhs.bound + det_abs.sqrt() * rhs.bound + 1e4 * UNIT_ROUNDOFF * acted.condition * (1.0 + r.max(s));
    Ok(ModulusReport {
        genus: z.genus(),
        characteristic: *k,
        acted_characteristic: mk,
        level2: m.is_level2(),
        r,
        s,
        diff,
        tol,
        r_bound: lhs.bound,
        s_bound: rhs.bound,
        det_abs,
        condition: acted.condition,
        pass: diff <= tol,
    })
}

/// Outcome of comparing `θ[k₁⊕k₂](diag(Z₁,Z₂))` with `θ[k₁](Z₁)·θ[k₂](Z₂)`.
#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub full: ThetaValue,
    pub factors: Vec<ThetaValue>,
    pub product_re: f64,
    pub product_im: f64,
    pub diff: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn block_diag_split_check(
    z_blocks: &[SiegelMatrix],
    k_blocks: &[Characteristic],
    eps: f64,
) -> Result<SplitReport, ThetaError> {
    if z_blocks.is_empty() || z_blocks.len() != k_blocks.len() {
        return Err(ThetaError::GenusMismatch(z_blocks.len(), k_blocks.len()));
    }
    let mut k = k_blocks[0];
    for (z, kb) in z_blocks.iter().zip(k_blocks) {
        if z.genus() != kb.genus() {
            return Err(ThetaError::GenusMismatch(z.genus(), kb.genus()));
        }
    }
    for kb in &k_blocks[1..] {
        k = k.direct_sum(kb)?;
    }
    let z = SiegelMatrix::block_diag(z_blocks)?;
    let full = evaluate(&z, &k, eps)?;
    let factors = z_blocks.iter().zip(k_blocks).map(|(zb, kb)| evaluate(zb, kb, eps)).collect::<Result<Vec<_>, _>>()?;
    // |Πa_i − Πb_i| ≤ Π(|b_i| + e_i) − Π|b_i|
    let mut product = Complex64::new(1.0, 0.0);
    let mut upper = 1.0;
    let mut exact = 1.0;
    for f in &factors {
        product *= f.value();
        upper *= f.norm() + f.bound;
        exact *= f.norm();
    }
    let n = factors.len() as f64;
    let tol = full.bound + (upper - exact) + 4.0 * n * UNIT_ROUNDOFF * upper;
    let diff = (full.value() - product).norm();
    Ok(SplitReport { full, factors, product_re: product.re, product_im: product.im, diff, tol, pass: diff <= tol })
}

/// Random `Z` with `Re Z` entries in `[−1/2, 1/2]` and `Im Z ⪰ min_lambda·1`.
pub fn random_siegel<R: Rng + ?Sized>(rng: &mut R, genus: usize, min_lambda: f64) -> SiegelMatrix {
    loop {
        let b = DMatrix::from_fn(genus, genus, |_, _| rng.random_range(-0.5..0.5));
        let diag = DMatrix::from_fn(genus, genus, |i, j| if i == j { rng.random_range(0.0..1.0) } else { 0.0 });
        let im = &b * b.transpose() + diag + DMatrix::identity(genus, genus) * min_lambda;
        let mut re = DMatrix::from_fn(genus, genus, |_, _| rng.random_range(-0.5..0.5));
        re = (&re + re.transpose()) * 0.5;
        let z = DMatrix::from_fn(genus, genus, |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
        if let Ok(z) = SiegelMatrix::new(z) {
            return z;
        }
    }
}

fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, genus: usize, scale: i64) -> DMatrix<i64> {
    let mut s = DMatrix::zeros(genus, genus);
    for i in 0..genus {
        for j in i..genus {
            let v = scale * rng.random_range(-1..=1);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

fn random_generator<R: Rng + ?Sized>(rng: &mut R, genus: usize) -> IntSymplectic {
    let choices = if genus > 1 { 4 } else { 3 };
    match rng.random_range(0..choices) {
        0 => IntSymplectic::translation(&random_symmetric(rng, genus, 1)).expect("symmetric"),
        1 => IntSymplectic::lower_translation(&random_symmetric(rng, genus, 1)).expect("symmetric"),
        2 => IntSymplectic::inversion(genus),
        _ => {
            let i = rng.random_range(0..genus);
            let j = (i + rng.random_range(1..genus)) % genus;
            IntSymplectic::elementary(genus, i, j, if rng.random_bool(0.5) { 1 } else { -1 }).expect("i ≠ j")
        }
    }
}

/// Random element of Sp_{2g}(ℤ) with entries in `[−max_entry, max_entry]`,
/// built as a short word in standard generators.
pub fn random_int_symplectic<R: Rng + ?Sized>(rng: &mut R, genus: usize, max_entry: i64) -> IntSymplectic {
    loop {
        let len = rng.random_range(1..=4);
        let mut m = IntSymplectic::identity(genus);
        for _ in 0..len {
            m = m.mul(&random_generator(rng, genus));
        }
        if m.max_abs_entry() <= max_entry {
            return m;
        }
    }
}

/// Random element of Γ_g(2): a short word in `(1 2S; 0 1)` and `(1 0; 2S 1)`.
pub fn random_level2<R: Rng + ?Sized>(rng: &mut R, genus: usize) -> IntSymplectic {
    loop {
        let mut m = IntSymplectic::identity(genus);
        for step in 0..rng.random_range(1..=2) {
            let s = random_symmetric(rng, genus, 2);
            let gen = if (step + rng.random_range(0..2)) % 2 == 0 {
                IntSymplectic::translation(&s)
            } else {
                IntSymplectic::lower_translation(&s)
            };
            m = m.mul(&gen.expect("symmetric"));
        }
        if m.max_abs_entry() <= 6 && m != IntSymplectic::identity(genus) {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::F2Vector;
    use crate::quadform::{act_on_form, char_to_form, form_to_char, parity};
    use crate::theta::{siegel_act, theta_constant};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ci(y: f64) -> Complex64 {
        Complex64::new(0.0, y)
    }

    fn generators(genus: usize) -> Vec<IntSymplectic> {
        let mut out = vec![IntSymplectic::inversion(genus)];
        for i in 0..genus {
            for j in i..genus {
                let mut s = DMatrix::zeros(genus, genus);
                s[(i, j)] = 1;
                s[(j, i)] = 1;
                out.push(IntSymplectic::translation(&s).unwrap());
                out.push(IntSymplectic::lower_translation(&s).unwrap());
                if i != j {
                    out.push(IntSymplectic::elementary(genus, i, j, 1).unwrap());
                    out.push(IntSymplectic::elementary(genus, j, i, 1).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn identity_and_inversion_on_upper_half_plane() {
        let z = SiegelMatrix::diagonal(&[ci(1.0)]).unwrap();
        assert_eq!(siegel_act(&IntSymplectic::identity(1), &z).unwrap(), z);
        let w = siegel_act(&IntSymplectic::inversion(1), &z).unwrap();
        assert!((w.entries()[(0, 0)] - ci(1.0)).norm() < 1e-15);
    }

    #[test]
    fn group_action_on_siegel_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = random_siegel(&mut rng, 2, 0.3);
            let m = random_int_symplectic(&mut rng, 2, 2);
            let n = random_int_symplectic(&mut rng, 2, 2);
            let lhs = siegel_act(&m.mul(&n), &z).unwrap();
            let rhs = siegel_act(&m, &siegel_act(&n, &z).unwrap()).unwrap();
            let dev = (lhs.entries() - rhs.entries()).iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-10, "{dev}");
        }
    }

    #[test]
    fn inversion_moves_characteristic() {
        let k = F2Vector::from_entries(&[1, 0]).unwrap();
        let out = char_act_int(&IntSymplectic::inversion(1), &k).unwrap();
        assert_eq!(out, F2Vector::from_entries(&[0, 1]).unwrap());
    }

    #[test]
    fn level_two_fixes_characteristics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in 1..=3 {
            for _ in 0..20 {
                let m = random_level2(&mut rng, g);
                assert!(m.is_level2());
                for k in F2Vector::all(g) {
                    assert_eq!(char_act_int(&m, &k).unwrap(), k);
                }
            }
        }
    }

    #[test]
    fn characteristic_action_matches_forms_and_composes() {
        for g in 1..=2 {
            let gens = generators(g);
            for m in &gens {
                let red = m.reduce_mod2();
                for k in F2Vector::all(g) {
                    let direct = char_act_int(m, &k).unwrap();
                    let via_forms = form_to_char(&act_on_form(&red, &char_to_form(&k)).unwrap());
                    assert_eq!(direct, via_forms);
                    assert_eq!(parity(&direct), parity(&k));
                }
                for n in &gens {
                    let mn = m.mul(n);
                    for k in F2Vector::all(g) {
                        let lhs = char_act_int(&mn, &k).unwrap();
                        let rhs = char_act_int(m, &char_act_int(n, &k).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn parity_preserved_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let g = rng.random_range(1..=3);
            let m = random_int_symplectic(&mut rng, g, 3);
            let k = F2Vector::from_bits(g, rng.random_range(0..1u64 << (2 * g))).unwrap();
            assert_eq!(parity(&char_act_int(&m, &k).unwrap()), parity(&k));
        }
    }

    #[test]
    fn modulus_law_identity_level2_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = random_siegel(&mut rng, 2, 0.4);
        let k = F2Vector::zero(2).unwrap();
        let rep = transform_modulus_check(&IntSymplectic::identity(2), &z, &k, 1e-12).unwrap();
        assert_eq!(rep.r, rep.s);
        for _ in 0..10 {
            let z = random_siegel(&mut rng, 1, 0.5);
            let m = random_level2(&mut rng, 1);
            for k in F2Vector::all(1).filter(|k| parity(k).is_even()) {
                let rep = transform_modulus_check(&m, &z, &k, 1e-12).unwrap();
                assert_eq!(rep.acted_characteristic, k);
                assert!(rep.pass && (rep.r / rep.s - 1.0).abs() < 1e-8, "{rep:?}");
            }
        }
        for _ in 0..20 {
            let z = random_siegel(&mut rng, 2, 0.3);
            let m = random_int_symplectic(&mut rng, 2, 2);
            for k in F2Vector::all(2) {
                let rep = transform_modulus_check(&m, &z, &k, 1e-12).unwrap();
                assert!(rep.pass && rep.diff <= 1e-8 * rep.s.max(1.0), "{rep:?}");
            }
        }
    }

    #[test]
    fn splitting_examples() {
        let z1 = SiegelMatrix::diagonal(&[ci(1.0)]).unwrap();
        let k0 = F2Vector::zero(1).unwrap();
        let rep = block_diag_split_check(&[z1.clone(), z1.clone()], &[k0, k0], 1e-12).unwrap();
        assert!(rep.pass);
        let single = theta_constant(&z1, &k0, 1e-12).unwrap();
        assert!((rep.full.value() - single.value() * single.value()).norm() < 1e-11);

        let odd = F2Vector::from_entries(&[1, 1]).unwrap();
        let z2 = SiegelMatrix::diagonal(&[ci(2.0)]).unwrap();
        let rep = block_diag_split_check(&[z1, z2], &[odd, odd], 1e-12).unwrap();
        assert!(rep.pass && rep.full.norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_siegel(&mut rng, 1, 0.5);
            let b = random_siegel(&mut rng, 1, 0.5);
            let ka = F2Vector::from_bits(1, rng.random_range(0..4)).unwrap();
            let kb = F2Vector::from_bits(1, rng.random_range(0..4)).unwrap();
            let rep = block_diag_split_check(&[a, b], &[ka, kb], 1e-12).unwrap();
            assert!(rep.pass && rep.diff < 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn odd_constants_vanish_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for g in 1..=3 {
            for _ in 0..3 {
                let z = random_siegel(&mut rng, g, 0.3);
                for k in F2Vector::all(g).filter(|k| !parity(k).is_even()) {
                    let v = theta_constant(&z, &k, 1e-12).unwrap();
                    assert!(v.norm() <= 1e-12, "{v:?}");
                }
            }
        }
    }
}
