//! The oscillator representation of `SL2(Fq)` and, more generally, the
//! Schrodinger-model operators attached to a symmetric `k x k` form
//! (`k = 1` gives the two `q`-dimensional oscillator representations,
//! `k = 2` the `q^2`-dimensional models used by the dual-pair layer).
//!
//! Operators are defined on the three generator families
//!
//! * `u(b) = (1 b; 0 1)`: multiplication by `psi(b Q(v) / 2)`,
//! * `w_c = (0 -1/c; c 0)`: normalized quadratic Fourier kernel,
//! * `diag(a, 1/a)`: signed scaling `f(v) -> leg(a)^k f(a v)`,
//!
//! and extended to all of `SL2` along one fixed Bruhat word per element.
//! That the extension is a genuine representation (trivial cocycle) is a test
//! outcome, not an assumption, as is the covariance with the Heisenberg
//! representation that pins every sign convention here.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::field::{AdditiveCharacter, PrimeField};
use crate::fmat::FMat;
use crate::group::{self, ClassLabel, ConjClass, Mat2};
use crate::heisenberg::{decode_vec, encode_vec};
use crate::operator::Operator;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OscillatorError {
    #[error("generator parameter must be nonzero")]
    ZeroParameter,
    #[error("the closed character formula excludes the identity; use dim = q^n")]
    IdentityClass,
}

/// `gamma(M, psi) = sum_v psi(-v^t M v / 2)` over `Fq^k`; the normalizer of
/// the Fourier-kernel operator. Has magnitude `q^{k/2}` for invertible `M`.
pub fn gauss_normalizer(f: &PrimeField, psi: &AdditiveCharacter, m: &FMat) -> Complex64 {
    let q = f.q() as usize;
    let dim = q.pow(m.k as u32);
    let neg_half = f.neg(f.half());
    (0..dim)
        .map(|i| {
            let v = decode_vec(i, m.k, q);
            psi.eval(f.mul(neg_half, m.quad(f, &v)))
        })
        .sum()
}

/// Multiplication operator `f(v) -> psi(v^t M v / 2) f(v)` for symmetric `M`.
pub fn op_type_a(f: &PrimeField, psi: &AdditiveCharacter, m: &FMat) -> Operator {
    assert!(m.is_symmetric());
    let q = f.q() as usize;
    let dim = q.pow(m.k as u32);
    let mut mat = Array2::zeros((dim, dim));
    for i in 0..dim {
        let v = decode_vec(i, m.k, q);
        mat[(i, i)] = psi.eval(f.mul(f.half(), m.quad(f, &v)));
    }
    Operator::from_matrix(mat)
}

/// Normalized kernel operator
/// `f(v) -> gamma(M, psi)^-1 sum_{v'} psi(v^t M v') f(v')` for symmetric
/// invertible `M`.
pub fn op_type_b(
    f: &PrimeField,
    psi: &AdditiveCharacter,
    m: &FMat,
) -> Result<Operator, OscillatorError> {
    assert!(m.is_symmetric());
    if m.det(f) == 0 {
        return Err(OscillatorError::ZeroParameter);
    }
    let q = f.q() as usize;
    let dim = q.pow(m.k as u32);
    let scale = gauss_normalizer(f, psi, m).finv();
    let mut mat = Array2::zeros((dim, dim));
    for i in 0..dim {
        let v = decode_vec(i, m.k, q);
        for j in 0..dim {
            let w = decode_vec(j, m.k, q);
            mat[(i, j)] = psi.eval(m.pair(f, &v, &w)) * scale;
        }
    }
    Ok(Operator::from_matrix(mat))
}

/// Signed substitution `f(v) -> leg(det C) f(C^-1 v)` for invertible `C`.
pub fn op_type_c(f: &PrimeField, c: &FMat) -> Result<Operator, OscillatorError> {
    let cinv = c.inv(f).ok_or(OscillatorError::ZeroParameter)?;
    let q = f.q() as usize;
    let dim = q.pow(c.k as u32);
    let sign = f.legendre(c.det(f)).expect("invertible") as f64;
    let mut mat = Array2::zeros((dim, dim));
    for i in 0..dim {
        let v = decode_vec(i, c.k, q);
        let j = encode_vec(&cinv.mulvec(f, &v), q);
        mat[(i, j)] = Complex64::new(sign, 0.0);
    }
    Ok(Operator::from_matrix(mat))
}

/// A generator of `Sp(2k)` in block form on `W = X + Y`, together with its
/// Schrodinger-model operator. Used directly in the covariance tests.
#[derive(Debug, Clone)]
pub enum SpGenerator {
    /// `(I M; 0 I)` with `M` symmetric.
    Upper(FMat),
    /// `(tC^-1 0; 0 C)` with `C` invertible.
    Diag(FMat),
    /// `(0 M; -M^-1 0)` with `M` symmetric invertible.
    Weyl(FMat),
}

impl SpGenerator {
    /// Action on a point `w = (x | y)` of `Fq^{2k}`.
    pub fn apply(&self, f: &PrimeField, w: &[u64]) -> Vec<u64> {
        let k = self.block().k;
        assert_eq!(w.len(), 2 * k);
        let (x, y) = w.split_at(k);
        let (nx, ny): (Vec<u64>, Vec<u64>) = match self {
            SpGenerator::Upper(m) => {
                let my = m.mulvec(f, y);
                (
                    x.iter().zip(&my).map(|(&a, &b)| f.add(a, b)).collect(),
                    y.to_vec(),
                )
            }
            SpGenerator::Diag(c) => {
                let ct_inv = c.transpose().inv(f).expect("invertible");
                (ct_inv.mulvec(f, x), c.mulvec(f, y))
            }
            SpGenerator::Weyl(m) => {
                let minv = m.inv(f).expect("invertible");
                (
                    m.mulvec(f, y),
                    minv.mulvec(f, x).iter().map(|&a| f.neg(a)).collect(),
                )
            }
        };
        nx.into_iter().chain(ny).collect()
    }

    pub fn op(&self, f: &PrimeField, psi: &AdditiveCharacter) -> Operator {
        match self {
            SpGenerator::Upper(m) => op_type_a(f, psi, m),
            SpGenerator::Diag(c) => op_type_c(f, c).expect("invertible"),
            SpGenerator::Weyl(m) => op_type_b(f, psi, m).expect("invertible"),
        }
    }

    fn block(&self) -> &FMat {
        match self {
            SpGenerator::Upper(m) | SpGenerator::Diag(m) | SpGenerator::Weyl(m) => m,
        }
    }
}

/// The Bruhat factorization of `g = (a b; c d)`:
/// `g = u(a/c) w_c u(d/c)` when `c != 0`, else `g = diag(a, 1/a) u(b/a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruhatWord {
    /// `c != 0`: parameters `(a/c, c, d/c)`.
    Big { u1: u64, c: u64, u2: u64 },
    /// `c == 0`: parameters `(a, b/a)`.
    Small { a: u64, u: u64 },
}

pub fn bruhat_factor(f: &PrimeField, g: &Mat2) -> BruhatWord {
    debug_assert_eq!(g.det(f), 1);
    if g.c != 0 {
        let cinv = f.inv(g.c).unwrap();
        BruhatWord::Big {
            u1: f.mul(g.a, cinv),
            c: g.c,
            u2: f.mul(g.d, cinv),
        }
    } else {
        BruhatWord::Small {
            a: g.a,
            u: f.mul(g.b, f.inv(g.a).unwrap()),
        }
    }
}

/// Multiply a Bruhat word back out; the tests require this to reproduce `g`.
pub fn bruhat_product(f: &PrimeField, word: &BruhatWord) -> Mat2 {
    match *word {
        BruhatWord::Big { u1, c, u2 } => Mat2::upper(f, u1)
            .mul(f, &Mat2::weyl(f, c))
            .mul(f, &Mat2::upper(f, u2)),
        BruhatWord::Small { a, u } => Mat2::diag(f, a).mul(f, &Mat2::upper(f, u)),
    }
}

/// The oscillator-type representation of `SL2(Fq)` on `L2(Fq^k)` attached to
/// a symmetric invertible Gram matrix `S`.
///
/// For `k = 1` and `S = (s)` this is the oscillator representation with
/// central character `psi_s`; for `k = 2` it is the restriction to `SL2` of
/// the rank-two oscillator model with quadratic form `S` on the other factor.
#[derive(Debug, Clone)]
pub struct WeilRep {
    psi: AdditiveCharacter,
    gram: FMat,
}

impl WeilRep {
    pub fn new(f: &PrimeField, psi: AdditiveCharacter, gram: FMat) -> WeilRep {
        assert!(gram.is_symmetric() && gram.det(f) != 0);
        WeilRep { psi, gram }
    }

    /// The plain oscillator representation `omega_{psi_s}` (`k = 1`).
    pub fn scalar(f: &PrimeField, psi: AdditiveCharacter, s: u64) -> WeilRep {
        WeilRep::new(f, psi, FMat::scalar1(s))
    }

    pub fn gram(&self) -> &FMat {
        &self.gram
    }

    pub fn psi(&self) -> &AdditiveCharacter {
        &self.psi
    }

    pub fn dim(&self, f: &PrimeField) -> usize {
        (f.q() as usize).pow(self.gram.k as u32)
    }

    pub fn op_upper(&self, f: &PrimeField, b: u64) -> Operator {
        op_type_a(f, &self.psi, &self.gram.scale(f, b))
    }

    pub fn op_weyl(&self, f: &PrimeField, c: u64) -> Result<Operator, OscillatorError> {
        if c % f.q() == 0 {
            return Err(OscillatorError::ZeroParameter);
        }
        let m = self.gram.scale(f, f.neg(f.inv(c).unwrap()));
        op_type_b(f, &self.psi, &m)
    }

    pub fn op_diag(&self, f: &PrimeField, a: u64) -> Result<Operator, OscillatorError> {
        if a % f.q() == 0 {
            return Err(OscillatorError::ZeroParameter);
        }
        let c = FMat::identity(self.gram.k).scale(f, f.inv(a).unwrap());
        op_type_c(f, &c)
    }

    /// `omega(g)` along the fixed Bruhat word, assembled entrywise in a
    /// single `O(dim^2)` pass.
    pub fn op(&self, f: &PrimeField, g: &Mat2) -> Operator {
        let q = f.q() as usize;
        let k = self.gram.k;
        let dim = self.dim(f);
        let half = f.half();
        match bruhat_factor(f, g) {
            BruhatWord::Big { u1, c, u2 } => {
                let b = self.gram.scale(f, f.neg(f.inv(c).unwrap()));
                let scale = gauss_normalizer(f, &self.psi, &b).finv();
                let m1 = f.mul(half, u1);
                let m2 = f.mul(half, u2);
                let mut mat = Array2::zeros((dim, dim));
                for i in 0..dim {
                    let v = decode_vec(i, k, q);
                    let qv = self.gram.quad(f, &v);
                    let left = f.mul(m1, qv);
                    for j in 0..dim {
                        let w = decode_vec(j, k, q);
                        let phase = f.add(
                            f.add(left, b.pair(f, &v, &w)),
                            f.mul(m2, self.gram.quad(f, &w)),
                        );
                        mat[(i, j)] = self.psi.eval(phase) * scale;
                    }
                }
                Operator::from_matrix(mat)
            }
            BruhatWord::Small { a, u } => {
                let sign = match k % 2 {
                    0 => 1.0,
                    _ => f.legendre(a).unwrap() as f64,
                };
                let m = f.mul(half, f.mul(u, f.inv(a).unwrap()));
                let mut mat = Array2::zeros((dim, dim));
                for i in 0..dim {
                    let v = decode_vec(i, k, q);
                    let av: Vec<u64> = v.iter().map(|&x| f.mul(a, x)).collect();
                    let j = encode_vec(&av, q);
                    let w = decode_vec(j, k, q);
                    mat[(i, j)] = self.psi.eval(f.mul(m, self.gram.quad(f, &w)))
                        * Complex64::new(sign, 0.0);
                }
                Operator::from_matrix(mat)
            }
        }
    }

    /// Trace of `omega(g)` computed from the structured factors in `O(dim)`
    /// or `O(dim^2)` without materializing the operator.
    pub fn trace(&self, f: &PrimeField, g: &Mat2) -> Complex64 {
        let q = f.q() as usize;
        let k = self.gram.k;
        let dim = self.dim(f);
        let half = f.half();
        match bruhat_factor(f, g) {
            BruhatWord::Big { u1, c, u2 } => {
                let b = self.gram.scale(f, f.neg(f.inv(c).unwrap()));
                let scale = gauss_normalizer(f, &self.psi, &b).finv();
                let m = f.mul(half, f.add(u1, u2));
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..dim {
                    let v = decode_vec(i, k, q);
                    let phase = f.add(f.mul(m, self.gram.quad(f, &v)), b.pair(f, &v, &v));
                    acc += self.psi.eval(phase);
                }
                acc * scale
            }
            BruhatWord::Small { a, u } => {
                let sign = match k % 2 {
                    0 => 1.0,
                    _ => f.legendre(a).unwrap() as f64,
                };
                let m = f.mul(half, f.mul(u, f.inv(a).unwrap()));
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..dim {
                    let v = decode_vec(i, k, q);
                    let av: Vec<u64> = v.iter().map(|&x| f.mul(a, x)).collect();
                    if encode_vec(&av, q) == i {
                        acc += self.psi.eval(f.mul(m, self.gram.quad(f, &v)));
                    }
                }
                acc * Complex64::new(sign, 0.0)
            }
        }
    }
}

/// Which of the two oscillator representations of `SL2(Fq)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OscSign {
    Plus,
    Minus,
}

impl OscSign {
    /// Gram parameter: `1` for the plus form, the canonical nonsquare for
    /// the minus form.
    pub fn gram_scalar(self, f: &PrimeField) -> u64 {
        match self {
            OscSign::Plus => 1,
            OscSign::Minus => f.nonsquare(),
        }
    }
}

/// The closed formula for the oscillator character at `g != I`:
/// `+-gamma(psi)` on the two positive-unipotent classes, the Legendre symbol
/// of `-det(g - I)` elsewhere.
pub fn char_omega_closed(
    f: &PrimeField,
    psi: &AdditiveCharacter,
    label: &ClassLabel,
    sign: OscSign,
) -> Result<Complex64, OscillatorError> {
    let s = match sign {
        OscSign::Plus => 1.0,
        OscSign::Minus => -1.0,
    };
    match label {
        ClassLabel::Id => Err(OscillatorError::IdentityClass),
        ClassLabel::UnipPlus => Ok(psi.gauss_sum() * s),
        ClassLabel::UnipMinus => Ok(psi.gauss_sum() * (-s)),
        _ => {
            let g = group::representative(f, label);
            let gm1 = Mat2 {
                a: f.sub(g.a, 1),
                b: g.b,
                c: g.c,
                d: f.sub(g.d, 1),
            };
            let det = f.sub(f.mul(gm1.a, gm1.d), f.mul(gm1.b, gm1.c));
            let v = f.legendre(f.neg(det)).expect("g - I invertible off the unipotent cone");
            Ok(Complex64::new(v as f64, 0.0))
        }
    }
}

/// Character of `omega_{psi, +-}` as a class function, identity included.
pub fn omega_character(
    f: &PrimeField,
    psi: &AdditiveCharacter,
    classes: &[ConjClass],
    sign: OscSign,
) -> Vec<Complex64> {
    classes
        .iter()
        .map(|c| match c.label {
            ClassLabel::Id => Complex64::new(f.q() as f64, 0.0),
            _ => char_omega_closed(f, psi, &c.label, sign).unwrap(),
        })
        .collect()
}

/// The even/odd splitting of an oscillator representation under the central
/// element `-I`.
#[derive(Debug, Clone)]
pub struct ComponentPair {
    /// Dimension of the subspace where `-I` acts trivially.
    pub dim_even: usize,
    /// Dimension of the subspace where `-I` acts by `-1`.
    pub dim_odd: usize,
    pub proj_even: Operator,
    pub proj_odd: Operator,
}

/// Split along the eigenspaces of `omega(-I)` via the projectors
/// `(I +- omega(-I)) / 2`.
pub fn split_components(f: &PrimeField, rep: &WeilRep) -> ComponentPair {
    let dim = rep.dim(f);
    let minus_i = Mat2 { a: f.neg(1), b: 0, c: 0, d: f.neg(1) };
    let omega_c = rep.op(f, &minus_i);
    let id = Operator::identity(dim);
    let half = Complex64::new(0.5, 0.0);
    let proj_even = id.add(&omega_c).unwrap().scale(half);
    let proj_odd = id.add(&omega_c.scale(Complex64::new(-1.0, 0.0))).unwrap().scale(half);
    let dim_even = proj_even.trace().re.round() as usize;
    let dim_odd = proj_odd.trace().re.round() as usize;
    ComponentPair { dim_even, dim_odd, proj_even, proj_odd }
}

/// Class-function characters of the four rank-one irreducibles, split by
/// dimension: `(chi(g) + chi(-g))/2` and `(chi(g) - chi(-g))/2` are the
/// even/odd component characters, and the `q mod 4` table decides which of
/// the two has dimension `(q + 1)/2`.
///
/// Returns `[pp, pm, mp, mm]` where the first index is the oscillator sign
/// and the second is `p` for dimension `(q + 1)/2`, `m` for `(q - 1)/2`.
pub fn component_characters(
    f: &PrimeField,
    psi: &AdditiveCharacter,
    classes: &[ConjClass],
) -> [Vec<Complex64>; 4] {
    let chi_p = omega_character(f, psi, classes, OscSign::Plus);
    let chi_m = omega_character(f, psi, classes, OscSign::Minus);
    let neg_index: Vec<usize> = classes
        .iter()
        .map(|c| {
            let neg = c.rep.neg(f);
            group::class_index(f, classes, &neg)
        })
        .collect();
    let even = |chi: &[Complex64], i: usize| (chi[i] + chi[neg_index[i]]) * 0.5;
    let odd = |chi: &[Complex64], i: usize| (chi[i] - chi[neg_index[i]]) * 0.5;
    // q = 1 mod 4: the even part is the large one
    let even_is_large = f.q() % 4 == 1;
    let mut pp = Vec::new();
    let mut pm = Vec::new();
    let mut mp = Vec::new();
    let mut mm = Vec::new();
    for i in 0..classes.len() {
        let (p_large, p_small) = if even_is_large {
            (even(&chi_p, i), odd(&chi_p, i))
        } else {
            (odd(&chi_p, i), even(&chi_p, i))
        };
        let (m_large, m_small) = if even_is_large {
            (even(&chi_m, i), odd(&chi_m, i))
        } else {
            (odd(&chi_m, i), even(&chi_m, i))
        };
        pp.push(p_large);
        pm.push(p_small);
        mp.push(m_large);
        mm.push(m_small);
    }
    [pp, pm, mp, mm]
}

/// Class-weighted inner product `(a, b)_G = sum |C| a(C) conj(b(C)) / |G|`.
pub fn class_inner_product(classes: &[ConjClass], a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let order: u64 = classes.iter().map(|c| c.size).sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, (x, y)) in classes.iter().zip(a.iter().zip(b)) {
        acc += x * y.conj() * (c.size as f64);
    }
    acc / order as f64
}

/// Compare the class functions of `omega_{psi_a}` for two parameters; equal
/// exactly when the parameters differ by a square factor.
pub fn oscillator_pair_report(
    f: &PrimeField,
    base: &AdditiveCharacter,
    a: u64,
    classes: &[ConjClass],
) -> OscillatorPairReport {
    let twisted = base.twist(f, a).expect("nonzero twist");
    let chi_base = omega_character(f, base, classes, OscSign::Plus);
    let chi_twist = omega_character(f, &twisted, classes, OscSign::Plus);
    let max_diff = chi_base
        .iter()
        .zip(&chi_twist)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    OscillatorPairReport {
        parameter: a,
        parameter_is_square: f.legendre(a).unwrap() == 1,
        max_class_difference: max_diff,
    }
}

#[derive(Debug, Clone)]
pub struct OscillatorPairReport {
    pub parameter: u64,
    pub parameter_is_square: bool,
    pub max_class_difference: f64,
}
