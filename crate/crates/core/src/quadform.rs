//! Quadratic forms refining the symplectic pairing, and theta characteristics.
//!
//! Every form is `q_a(v) = q₀(v) + ⟨a, v⟩` for a unique shift `a`, where
//! `q₀(v) = v′·v″`. A characteristic `k = (k′, k″)` corresponds to the form
//! with shift `k`; under this identification the parity `k′·k″` is exactly
//! the Arf invariant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::f2::{pairing, F2Error, F2Vector, SymplecticMap};

/// A theta characteristic modulo 2.
pub type Characteristic = F2Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn bit(self) -> bool {
        self == Parity::Odd
    }

    pub fn is_even(self) -> bool {
        self == Parity::Even
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Parity `k′·k″ mod 2` of a characteristic.
pub fn parity(k: &Characteristic) -> Parity {
    Parity::from_bit(k.q0())
}

/// Number of even characteristics in genus `g`: `2^{g-1}(2^g + 1)`.
pub fn even_count(genus: usize) -> u64 {
    (1u64 << (genus - 1)) * ((1u64 << genus) + 1)
}

/// Number of odd characteristics in genus `g`: `2^{g-1}(2^g - 1)`.
pub fn odd_count(genus: usize) -> u64 {
    (1u64 << (genus - 1)) * ((1u64 << genus) - 1)
}

/// A quadratic form on F₂^{2g}, stored by its shift from `q₀`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuadraticForm {
    shift: F2Vector,
}

impl QuadraticForm {
    pub fn standard(genus: usize) -> Result<Self, F2Error> {
        Ok(Self { shift: F2Vector::zero(genus)? })
    }

    pub fn from_shift(shift: F2Vector) -> Self {
        Self { shift }
    }

    pub fn shift(&self) -> F2Vector {
        self.shift
    }

    pub fn genus(&self) -> usize {
        self.shift.genus()
    }

    pub fn evaluate(&self, v: &F2Vector) -> Result<bool, F2Error> {
        if v.genus() != self.genus() {
            return Err(F2Error::GenusMismatch(self.genus(), v.genus()));
        }
        Ok(self.eval(v))
    }

    #[inline]
    pub(crate) fn eval(&self, v: &F2Vector) -> bool {
        v.q0() ^ pairing(&self.shift, v)
    }

    /// `Σ q(e_i) q(f_i)` over the standard symplectic basis.
    pub fn arf(&self) -> Parity {
        let g = self.genus();
        let sum = (0..g).fold(false, |acc, i| acc ^ (self.eval(&F2Vector::e(g, i)) & self.eval(&F2Vector::f(g, i))));
        debug_assert_eq!(sum, self.shift.q0());
        Parity::from_bit(sum)
    }

    /// The torsor action `j + q`, i.e. `v ↦ q(v) + ⟨j, v⟩`.
    pub fn shifted_by(&self, j: &F2Vector) -> Result<Self, F2Error> {
        Ok(Self { shift: self.shift.try_add(j)? })
    }

    /// Recovers a form from its values on the standard basis:
    /// `q(e_i) = a″_i` and `q(f_i) = a′_i`.
    pub fn from_basis_values(genus: usize, mut value: impl FnMut(F2Vector) -> bool) -> Result<Self, F2Error> {
        let mut first = 0u64;
        let mut second = 0u64;
        for i in 0..genus {
            if value(F2Vector::e(genus, i)) {
                second |= 1 << i;
            }
            if value(F2Vector::f(genus, i)) {
                first |= 1 << i;
            }
        }
        Ok(Self { shift: F2Vector::from_halves(genus, first, second)? })
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm(shift={:?})", self.shift)
    }
}

pub fn char_to_form(k: &Characteristic) -> QuadraticForm {
    QuadraticForm::from_shift(*k)
}

pub fn form_to_char(q: &QuadraticForm) -> Characteristic {
    q.shift
}

/// The form `v ↦ q(M⁻¹ v)`.
pub fn act_on_form(m: &SymplecticMap, q: &QuadraticForm) -> Result<QuadraticForm, F2Error> {
    if m.genus() != q.genus() {
        return Err(F2Error::GenusMismatch(m.genus(), q.genus()));
    }
    let inv = m.inverse();
    QuadraticForm::from_basis_values(q.genus(), |b| q.eval(&inv.apply(&b)))
}

/// Induced action of a symplectic map on characteristics through the
/// characteristic/form bijection.
pub fn act_on_char(m: &SymplecticMap, k: &Characteristic) -> Result<Characteristic, F2Error> {
    Ok(form_to_char(&act_on_form(m, &char_to_form(k))?))
}

/// The function `j ↦ Q(base) + Q(j + base)` induced by a parity function on
/// a torsor over F₂^{2g}.
pub fn induced_form<'a, T, E, Q, A>(oracle: Q, base: &'a T, add: A) -> impl Fn(&F2Vector) -> Result<bool, E> + 'a
where
    Q: Fn(&T) -> Result<Parity, E> + 'a,
    A: Fn(&F2Vector, &T) -> Result<T, E> + 'a,
{
    move |j| {
        let here = oracle(base)?;
        let moved = oracle(&add(j, base)?)?;
        Ok(here.bit() ^ moved.bit())
    }
}

/// Collects an induced form into a [`QuadraticForm`] from its basis values.
pub fn induced_quadratic_form<T, E, Q, A>(genus: usize, oracle: Q, base: &T, add: A) -> Result<QuadraticForm, E>
where
    Q: Fn(&T) -> Result<Parity, E>,
    A: Fn(&F2Vector, &T) -> Result<T, E>,
    E: From<F2Error>,
{
    let q = induced_form(oracle, base, add);
    let mut err = None;
    let form = QuadraticForm::from_basis_values(genus, |b| match q(&b) {
        Ok(x) => x,
        Err(e) => {
            err.get_or_insert(e);
            false
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(form),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::transvection;

    #[test]
    fn evaluate_examples() {
        let g = 6;
        let q0 = QuadraticForm::standard(g).unwrap();
        let e1 = F2Vector::e(g, 0);
        let f1 = F2Vector::f(g, 0);
        assert!(!q0.evaluate(&e1).unwrap());
        assert!(q0.evaluate(&(e1 + f1)).unwrap());
        let qf = QuadraticForm::from_shift(f1);
        assert!(qf.evaluate(&e1).unwrap());
        assert!(q0.evaluate(&F2Vector::e(2, 0)).is_err());
    }

    #[test]
    fn arf_examples() {
        let g = 6;
        assert_eq!(QuadraticForm::standard(g).unwrap().arf(), Parity::Even);
        let a = F2Vector::e(g, 0) + F2Vector::f(g, 0);
        assert_eq!(QuadraticForm::from_shift(a).arf(), Parity::Odd);
        let even = F2Vector::all(g).filter(|a| QuadraticForm::from_shift(*a).arf().is_even()).count();
        assert_eq!(even, 2080);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity(&F2Vector::zero(3).unwrap()), Parity::Even);
        assert_eq!(parity(&F2Vector::from_entries(&[1, 1]).unwrap()), Parity::Odd);
        assert_eq!(F2Vector::all(6).filter(|k| parity(k).is_even()).count(), 2080);
    }

    #[test]
    fn forms_satisfy_defining_relation() {
        for g in 1..=2 {
            for a in F2Vector::all(g) {
                let q = QuadraticForm::from_shift(a);
                for x in F2Vector::all(g) {
                    for y in F2Vector::all(g) {
                        assert_eq!(q.eval(&x) ^ q.eval(&y) ^ q.eval(&(x + y)), pairing(&x, &y));
                    }
                }
            }
        }
    }

    #[test]
    fn char_form_bijection() {
        for g in 1..=6 {
            for k in F2Vector::all(g) {
                let q = char_to_form(&k);
                assert_eq!(form_to_char(&q), k);
                assert_eq!(parity(&k), q.arf());
            }
        }
    }

    #[test]
    fn act_on_form_transvection_g2_by_evaluation() {
        let g = 2;
        let t = transvection(&F2Vector::e(g, 0)).unwrap();
        let q0 = QuadraticForm::standard(g).unwrap();
        let moved = act_on_form(&t, &q0).unwrap();
        for v in F2Vector::all(g) {
            // T is an involution, so q₀ ∘ T⁻¹ = q₀ ∘ T
            assert_eq!(moved.eval(&v), q0.eval(&t.apply(&v)));
        }
        assert_eq!(moved.arf(), Parity::Even);
        let id = SymplecticMap::identity(g).unwrap();
        assert_eq!(act_on_form(&id, &moved).unwrap(), moved);
    }

    #[test]
    fn transvection_orbit_of_q0_is_the_even_forms() {
        let g = 2;
        let ts: Vec<_> = F2Vector::all(g).filter(|v| !v.is_zero()).map(|v| transvection(&v).unwrap()).collect();
        let mut seen = vec![QuadraticForm::standard(g).unwrap()];
        let mut i = 0;
        while i < seen.len() {
            let q = seen[i];
            for t in &ts {
                let r = act_on_form(t, &q).unwrap();
                if !seen.contains(&r) {
                    seen.push(r);
                }
            }
            i += 1;
        }
        assert_eq!(seen.len(), 10);
        assert!(seen.iter().all(|q| q.arf().is_even()));
    }

    #[test]
    fn induced_form_on_quad_torsor_recovers_shift() {
        let g = 3;
        for base in F2Vector::all(g) {
            let b = QuadraticForm::from_shift(base);
            let q = induced_quadratic_form::<_, F2Error, _, _>(
                g,
                |q: &QuadraticForm| Ok(q.arf()),
                &b,
                |j, q| q.shifted_by(j),
            )
            .unwrap();
            // Arf(j+q) - Arf(q) = q(j)
            assert_eq!(q, b);
        }
    }
}
