//! Truncated theta series with a certified error bound.
//!
//! `θ[k](Z) = Σ_{r ∈ ℤ^g} exp(πi[x̃ᵀZx̃ + x̃ᵀk″])`, `x̃ = r + k′/2`. Terms satisfy
//! `|term| ≤ exp(−π·λ·‖x̃‖²)` with `λ` a lower bound on the spectrum of
//! `Im Z`. The ball `‖x̃‖ ≤ ρ` holds at most `(2ρ + 1)^g` lattice points, so
//! the tail beyond `R` is bounded shell by shell:
//! `Σ_{n≥0} (2(R+n+1) + 1)^g · exp(−π·λ·(R+n)²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::siegel::SiegelMatrix;
use super::ThetaError;
use crate::quadform::Characteristic;

/// Upper limit on the number of summed lattice points.
pub const MAX_TERMS: usize = 4_000_000;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// A theta constant with its error certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaValue {
    pub re: f64,
    pub im: f64,
    /// `tail_bound + rounding_bound`; `|value − θ[k](Z)| ≤ bound`.
    pub bound: f64,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    pub radius: f64,
    pub terms: usize,
}

impl ThetaValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }
}

/// Rigorous bound on `Σ_{‖x̃‖>R} exp(−π·λ·‖x̃‖²)` over a shifted lattice.
pub fn tail_bound(genus: usize, lambda: f64, radius: f64) -> f64 {
    let g = genus as i32;
    let term = |n: f64| (2.0 * (radius + n + 1.0) + 1.0).powi(g) * (-PI * lambda * (radius + n).powi(2)).exp();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut n = 0.0;
    loop {
        let t = term(n);
        sum += t;
        // once the ratio has dropped below 1/2 the remainder is at most t
        if t <= 0.5 * prev && t <= sum * 1e-18 {
            sum += t;
            break;
        }
        if !t.is_finite() {
            return f64::INFINITY;
        }
        prev = t;
        n += 1.0;
        if n > 1e6 {
            return f64::INFINITY;
        }
    }
    // slack for the floating-point evaluation of the bound itself
    sum * (1.0 + 1e-9)
}

/// Smallest radius on a 1/16 grid whose tail bound is at most `target`.
pub fn radius_for(genus: usize, lambda: f64, target: f64) -> f64 {
    let mut hi = 1.0;
    while tail_bound(genus, lambda, hi) > target {
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1.0 / 16.0 {
        let mid = 0.5 * (lo + hi);
        if tail_bound(genus, lambda, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Lattice points `r` with `‖r + k′/2‖ ≤ R`, sorted by the exact integer
/// `‖2r + k′‖²` and then lexicographically.
fn lattice_points(genus: usize, shift: u64, radius: f64) -> Result<Vec<(u64, Vec<i64>)>, ThetaError> {
    // crude volume estimate before enumerating
    let side = 2.0 * radius + 1.0;
    let unit_ball = PI.powf(genus as f64 / 2.0) / gamma_half_plus_one(genus);
    let estimate = unit_ball * (radius + 1.0).powi(genus as i32);
    if !radius.is_finite() || estimate > 4.0 * MAX_TERMS as f64 || side.powi(genus as i32) > 1e12 {
        return Err(ThetaError::ResourceCap(radius));
    }
    let c: Vec<f64> = (0..genus).map(|i| if shift >> i & 1 == 1 { 0.5 } else { 0.0 }).collect();
    let mut out = Vec::new();
    let mut r = vec![0i64; genus];
    fn rec(
        i: usize,
        partial: f64,
        radius: f64,
        c: &[f64],
        r: &mut Vec<i64>,
        out: &mut Vec<(u64, Vec<i64>)>,
        shift: u64,
    ) -> Result<(), ThetaError> {
        if i == c.len() {
            let key = r
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let y = 2 * x + (shift >> j & 1) as i64;
                    (y * y) as u64
                })
                .sum();
            out.push((key, r.clone()));
            if out.len() > MAX_TERMS {
                return Err(ThetaError::ResourceCap(radius));
            }
            return Ok(());
        }
        let room = (radius * radius - partial).max(0.0).sqrt();
        let lo = (-room - c[i]).ceil() as i64;
        let hi = (room - c[i]).floor() as i64;
        for x in lo..=hi {
            let xt = x as f64 + c[i];
            let p = partial + xt * xt;
            if p <= radius * radius {
                r[i] = x;
                rec(i + 1, p, radius, c, r, out, shift)?;
            }
        }
        Ok(())
    }
    rec(0, 0.0, radius, &c, &mut r, &mut out, shift)?;
    out.sort();
    Ok(out)
}

fn gamma_half_plus_one(n: usize) -> f64 {
    // Γ(n/2 + 1)
    let mut v = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() / 2.0 };
    let mut k = if n.is_multiple_of(2) { 1.0 } else { 1.5 };
    while k <= n as f64 / 2.0 + 1e-9 {
        v *= k;
        k += 1.0;
    }
    v
}

/// Sums the series over `‖x̃‖ ≤ radius`.
pub fn theta_with_radius(z: &SiegelMatrix, k: &Characteristic, radius: f64) -> Result<ThetaValue, ThetaError> {
    let g = z.genus();
    if k.genus() != g {
        return Err(ThetaError::GenusMismatch(g, k.genus()));
    }
    let re = z.real();
    let im = z.imag();
    let absz = z.entries().map(|w| w.norm());
    let k2: Vec<f64> = (0..g).map(|i| (k.second() >> i & 1) as f64).collect();
    let gamma = (g as f64 + 2.0) * UNIT_ROUNDOFF * 1.01;

    let points = lattice_points(g, k.first(), radius)?;
    let mut x = vec![0.0; g];
    let mut sum_re = Neumaier::default();
    let mut sum_im = Neumaier::default();
    let mut abs_sum = 0.0;
    let mut weighted = 0.0;
    for (_, r) in &points {
        for i in 0..g {
            x[i] = r[i] as f64 + 0.5 * (k.first() >> i & 1) as f64;
        }
        let mut quad_re = 0.0;
        let mut quad_im = 0.0;
        let mut scale = 0.0;
        for i in 0..g {
            for j in 0..g {
                let xx = x[i] * x[j];
                quad_re += re[(i, j)] * xx;
                quad_im += im[(i, j)] * xx;
                scale += absz[(i, j)] * xx.abs();
            }
            quad_re += x[i] * k2[i];
            scale += (x[i] * k2[i]).abs();
        }
        // exp(πi·φ) only depends on φ mod 2
        let phase = quad_re - 2.0 * (quad_re / 2.0).round();
        let magnitude = (-PI * quad_im).exp();
        let (s, c) = (PI * phase).sin_cos();
        sum_re.add(magnitude * c);
        sum_im.add(magnitude * s);
        abs_sum += magnitude;
        weighted += magnitude * (2.0 * PI * gamma * scale + 4.0 * UNIT_ROUNDOFF);
    }
    let value = Complex64::new(sum_re.total(), sum_im.total());
    let rounding = 2.0 * (weighted + 3.0 * UNIT_ROUNDOFF * abs_sum);
    let tail = tail_bound(g, z.lambda_min(), radius);
    Ok(ThetaValue {
        re: value.re,
        im: value.im,
        bound: tail + rounding,
        tail_bound: tail,
        rounding_bound: rounding,
        radius,
        terms: points.len(),
    })
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Evaluates `θ[k](Z)` with a certificate `bound ≤ eps`.
///
/// The radius is chosen so the tail bound is at most `eps/2`; the call fails
/// if the rounding allowance pushes the total above `eps`.
pub fn theta_constant(z: &SiegelMatrix, k: &Characteristic, eps: f64) -> Result<ThetaValue, ThetaError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(ThetaError::BadEpsilon(eps));
    }
    if k.genus() != z.genus() {
        return Err(ThetaError::GenusMismatch(z.genus(), k.genus()));
    }
    let radius = radius_for(z.genus(), z.lambda_min(), eps / 2.0);
    let v = theta_with_radius(z, k, radius)?;
    if v.bound > eps {
        return Err(ThetaError::PrecisionFloor { requested: eps, achieved: v.bound });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::F2Vector;

    fn i_times(y: f64) -> Complex64 {
        Complex64::new(0.0, y)
    }

    #[test]
    fn tail_bound_dominates_brute_force_tail_genus_one() {
        // Σ_{|r+c|>R} exp(−πλ(r+c)²), brute force over a wide window
        for &(lambda, radius, c) in &[(1.0, 2.0, 0.0), (0.3, 3.5, 0.5), (0.5, 1.0, 0.5)] {
            let brute: f64 = (-200i64..=200)
                .map(|r| r as f64 + c)
                .filter(|x: &f64| x.abs() > radius)
                .map(|x| (-PI * lambda * x * x).exp())
                .sum();
            assert!(tail_bound(1, lambda, radius) >= brute);
        }
    }

    #[test]
    fn odd_genus_one_vanishes() {
        let z = SiegelMatrix::diagonal(&[i_times(1.0)]).unwrap();
        let k = F2Vector::from_entries(&[1, 1]).unwrap();
        let v = theta_constant(&z, &k, 1e-12).unwrap();
        assert!(v.norm() <= 1e-12, "{v:?}");
        assert!(v.bound <= 1e-12);
    }

    #[test]
    fn genus_two_product_of_odd_factors() {
        let z = SiegelMatrix::diagonal(&[i_times(1.0), i_times(2.0)]).unwrap();
        let k = F2Vector::from_entries(&[1, 1, 1, 1]).unwrap();
        assert!(crate::quadform::parity(&k).is_even());
        let v = theta_constant(&z, &k, 1e-12).unwrap();
        assert!(v.norm() <= 1e-12, "{v:?}");
    }

    #[test]
    fn theta_zero_at_i_matches_closed_form_and_doubling() {
        // θ₃(0, i) = π^{1/4} / Γ(3/4)
        let expected = PI.powf(0.25) / 1.225_416_702_465_177_6;
        let z = SiegelMatrix::diagonal(&[i_times(1.0)]).unwrap();
        let k = F2Vector::zero(1).unwrap();
        let v = theta_constant(&z, &k, 1e-12).unwrap();
        assert!((v.re - expected).abs() <= 1e-12 + v.bound);
        assert!(v.im.abs() <= 1e-12);
        let w = theta_with_radius(&z, &k, 2.0 * v.radius).unwrap();
        assert!((v.value() - w.value()).norm() <= 1e-12);
        assert!((v.value() - w.value()).norm() < v.bound);
    }

    #[test]
    fn ordering_is_by_exact_norm() {
        let pts = lattice_points(2, 0b01, 2.0).unwrap();
        assert!(pts.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(pts[0].0, 1);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let z = SiegelMatrix::diagonal(&[i_times(1.0)]).unwrap();
        let k = F2Vector::zero(1).unwrap();
        assert!(matches!(theta_constant(&z, &k, 0.0), Err(ThetaError::BadEpsilon(_))));
        assert!(matches!(theta_constant(&z, &k, -1.0), Err(ThetaError::BadEpsilon(_))));
    }

    #[test]
    fn resource_cap() {
        let z = SiegelMatrix::diagonal(&[i_times(1e-4); 4]).unwrap();
        let k = F2Vector::zero(4).unwrap();
        assert!(matches!(theta_constant(&z, &k, 1e-12), Err(ThetaError::ResourceCap(_))));
    }
}
