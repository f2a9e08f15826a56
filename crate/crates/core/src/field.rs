//! Arithmetic in the prime field `Fq` for odd `q`, plus the additive
//! characters `psi_a(z) = exp(2 pi i a z / q)` and quadratic Gauss sums.
//!
//! Elements are plain `u64` residues in `[0, q)`; a [`PrimeField`] carries the
//! modulus together with Legendre and inverse tables. All supported moduli are
//! odd primes with `3 <= q <= 101`, small enough that table lookups beat any
//! clever arithmetic.

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported modulus. Operator dimensions grow like `q^2`, and the
/// verification layer assumes everything fits comfortably in dense matrices.
pub const MAX_Q: u64 = 101;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime in [3, {MAX_Q}]")]
    UnsupportedModulus(u64),
    #[error("Legendre symbol is undefined at 0")]
    LegendreAtZero,
    #[error("0 has no multiplicative inverse")]
    ZeroInverse,
    #[error("additive character parameter must be nonzero")]
    TrivialCharacter,
}

pub fn is_odd_prime(q: u64) -> bool {
    if q < 3 || q % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The field `Fq` as a context object; elements are `u64` residues.
#[derive(Debug, Clone)]
pub struct PrimeField {
    q: u64,
    half: u64,
    nonsquare: u64,
    legendre: Vec<i8>,
    inv: Vec<u64>,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if !is_odd_prime(q) || q > MAX_Q {
            return Err(FieldError::UnsupportedModulus(q));
        }
        let mut legendre = vec![-1i8; q as usize];
        legendre[0] = 0;
        for z in 1..q {
            legendre[((z * z) % q) as usize] = 1;
        }
        let mut inv = vec![0u64; q as usize];
        for z in 1..q {
            for w in 1..q {
                if (z * w) % q == 1 {
                    inv[z as usize] = w;
                    break;
                }
            }
        }
        let nonsquare = (2..q)
            .find(|&z| legendre[z as usize] == -1)
            .expect("every odd prime field has a nonsquare");
        Ok(PrimeField {
            q,
            half: (q + 1) / 2,
            nonsquare,
            legendre,
            inv,
        })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The residue `(q + 1) / 2`, i.e. the field element `1/2`.
    #[inline]
    pub fn half(&self) -> u64 {
        self.half
    }

    /// Smallest quadratic nonresidue mod `q`.
    #[inline]
    pub fn nonsquare(&self) -> u64 {
        self.nonsquare
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a % self.q) % self.q
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.q
    }

    /// Multiplicative inverse of a nonzero residue.
    #[inline]
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a % self.q == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.inv[(a % self.q) as usize])
    }

    /// Legendre symbol; `+1` for nonzero squares, `-1` for nonsquares.
    #[inline]
    pub fn legendre(&self, a: u64) -> Result<i32, FieldError> {
        let a = a % self.q;
        if a == 0 {
            return Err(FieldError::LegendreAtZero);
        }
        Ok(self.legendre[a as usize] as i32)
    }

    /// Smallest square root of `a`, if `a` is a square (0 included).
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let a = a % self.q;
        (0..self.q).find(|&z| (z * z) % self.q == a)
    }

    /// All residues `0..q`.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    /// Nonzero residues `1..q`.
    pub fn units(&self) -> impl Iterator<Item = u64> {
        1..self.q
    }
}

/// The additive character `psi_a(z) = exp(2 pi i a z / q)`, `a != 0`.
#[derive(Debug, Clone)]
pub struct AdditiveCharacter {
    q: u64,
    a: u64,
    half: u64,
    roots: Vec<Complex64>,
}

impl AdditiveCharacter {
    pub fn new(field: &PrimeField, a: u64) -> Result<Self, FieldError> {
        let a = a % field.q();
        if a == 0 {
            return Err(FieldError::TrivialCharacter);
        }
        let q = field.q();
        let roots = (0..q)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) / (q as f64);
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        Ok(AdditiveCharacter {
            q,
            a,
            half: field.half(),
            roots,
        })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The parameter `a` in `psi_a`.
    #[inline]
    pub fn parameter(&self) -> u64 {
        self.a
    }

    #[inline]
    pub fn eval(&self, z: u64) -> Complex64 {
        self.roots[((self.a * (z % self.q)) % self.q) as usize]
    }

    /// Same character with parameter `a * c`; trivial `c` is rejected.
    pub fn twist(&self, field: &PrimeField, c: u64) -> Result<Self, FieldError> {
        AdditiveCharacter::new(field, field.mul(self.a, c % self.q))
    }

    /// The quadratic Gauss sum `gamma(psi) = sum_z psi(z^2 / 2)`.
    pub fn gauss_sum(&self) -> Complex64 {
        (0..self.q)
            .map(|z| self.eval(self.half * z * z % self.q))
            .sum()
    }

    /// The normalizer `gamma(b, psi) = sum_y psi(-b y^2 / 2)` for `b != 0`.
    pub fn gauss_sum_scaled(&self, field: &PrimeField, b: u64) -> Result<Complex64, FieldError> {
        if b % self.q == 0 {
            return Err(FieldError::TrivialCharacter);
        }
        let m = field.mul(field.neg(self.half), b);
        Ok((0..self.q).map(|y| self.eval(m * y * y % self.q)).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    fn squares(q: u64) -> Vec<u64> {
        // independent oracle: enumerate all nonzero squares
        let mut s: Vec<u64> = (1..q).map(|z| z * z % q).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    #[test]
    fn rejects_bad_moduli() {
        for q in [0, 1, 2, 4, 9, 15, 102, 103] {
            assert!(PrimeField::new(q).is_err(), "q = {q}");
        }
        for q in [3, 5, 7, 11, 13, 101] {
            assert!(PrimeField::new(q).is_ok(), "q = {q}");
        }
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for q in [3u64, 5, 7, 13] {
            let f = PrimeField::new(q).unwrap();
            let sq = squares(q);
            for a in 1..q {
                let expect = if sq.contains(&a) { 1 } else { -1 };
                assert_eq!(f.legendre(a).unwrap(), expect, "a = {a}, q = {q}");
            }
        }
    }

    #[test]
    fn legendre_examples() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.legendre(1).unwrap(), 1);
        assert_eq!(f5.legendre(2).unwrap(), -1);
        let f13 = PrimeField::new(13).unwrap();
        assert_eq!(f13.legendre(4).unwrap(), 1);
        assert_eq!(f5.legendre(0), Err(FieldError::LegendreAtZero));
    }

    #[test]
    fn legendre_is_multiplicative() {
        for q in [3u64, 5, 7, 11, 31] {
            let f = PrimeField::new(q).unwrap();
            for a in 1..q {
                for b in 1..q {
                    assert_eq!(
                        f.legendre(f.mul(a, b)).unwrap(),
                        f.legendre(a).unwrap() * f.legendre(b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn nonsquare_is_deterministic_and_smallest() {
        for (q, eps) in [(3u64, 2u64), (5, 2), (7, 3)] {
            let f = PrimeField::new(q).unwrap();
            assert_eq!(f.nonsquare(), eps);
            assert_eq!(PrimeField::new(q).unwrap().nonsquare(), eps);
            assert_eq!(f.legendre(eps).unwrap(), -1);
            for a in 1..eps {
                assert_eq!(f.legendre(a).unwrap(), 1);
            }
        }
    }

    #[test]
    fn inverse_and_half() {
        for q in [3u64, 5, 7, 101] {
            let f = PrimeField::new(q).unwrap();
            for a in 1..q {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            assert_eq!(f.mul(f.half(), 2), 1);
            assert_eq!(f.inv(0), Err(FieldError::ZeroInverse));
        }
    }

    #[test]
    fn character_is_multiplicative_and_unimodular() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            let psi = AdditiveCharacter::new(&f, a).unwrap();
            for z in 0..7 {
                assert!((psi.eval(z).norm() - 1.0).abs() < 1e-14);
                for w in 0..7 {
                    let lhs = psi.eval((z + w) % 7);
                    let rhs = psi.eval(z) * psi.eval(w);
                    assert!((lhs - rhs).norm() < 1e-13);
                }
            }
        }
        assert!(AdditiveCharacter::new(&f, 0).is_err());
        assert!(AdditiveCharacter::new(&f, 7).is_err());
    }

    #[test]
    fn nontrivial_character_sums_to_zero() {
        for q in [3u64, 5, 7, 101] {
            let f = PrimeField::new(q).unwrap();
            for a in 1..q {
                let psi = AdditiveCharacter::new(&f, a).unwrap();
                let s: Complex64 = (0..q).map(|z| psi.eval(z)).sum();
                assert!(s.norm() < tol::CHARACTER_SUM * q as f64, "q={q} a={a}");
            }
        }
    }

    #[test]
    fn gauss_sum_q3_is_minus_i_sqrt3() {
        let f = PrimeField::new(3).unwrap();
        let psi = AdditiveCharacter::new(&f, 1).unwrap();
        let g = psi.gauss_sum();
        assert!((g - Complex64::new(0.0, -(3.0f64.sqrt()))).norm() < 1e-12);
    }

    #[test]
    fn gauss_sums_have_magnitude_sqrt_q() {
        for q in [3u64, 5, 7, 11, 13, 101] {
            let f = PrimeField::new(q).unwrap();
            let sq = (q as f64).sqrt();
            for a in 1..q.min(12) {
                let psi = AdditiveCharacter::new(&f, a).unwrap();
                assert!((psi.gauss_sum().norm() - sq).abs() < tol::GAUSS_MAGNITUDE);
                for b in 1..q {
                    let g = psi.gauss_sum_scaled(&f, b).unwrap();
                    assert!((g.norm() - sq).abs() < tol::GAUSS_MAGNITUDE);
                }
            }
        }
    }

    #[test]
    fn scaled_gauss_sum_rejects_zero() {
        let f = PrimeField::new(5).unwrap();
        let psi = AdditiveCharacter::new(&f, 1).unwrap();
        assert!(psi.gauss_sum_scaled(&f, 0).is_err());
    }
}
