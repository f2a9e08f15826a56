//! The finite Heisenberg group `H = W x Fq` over a symplectic space
//! `W = Fq^{2n}`, its standard irreducible representation with a given
//! nontrivial central character, the Weyl transform, and orbit counting for
//! intertwining numbers.
//!
//! Only `n = 1` and `n = 2` are instantiated; the model spaces have
//! dimensions `q` and `q^2`.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::field::{AdditiveCharacter, PrimeField};
use crate::operator::Operator;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeisenbergError {
    #[error("only n = 1 and n = 2 are supported, got {0}")]
    UnsupportedHalfDimension(usize),
    #[error("vector length {0} does not match 2n = {1}")]
    DimensionMismatch(usize, usize),
}

/// `W = Fq^{2n}` with the standard form `<w, w'> = x . y' - y . x'` where
/// `w = (x | y)` splits into the first and last `n` coordinates.
#[derive(Debug, Clone)]
pub struct SymplecticSpace {
    n: usize,
    q: u64,
}

impl SymplecticSpace {
    pub fn new(f: &PrimeField, n: usize) -> Result<Self, HeisenbergError> {
        if n != 1 && n != 2 {
            return Err(HeisenbergError::UnsupportedHalfDimension(n));
        }
        Ok(SymplecticSpace { n, q: f.q() })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `q^n`, the dimension of the model space.
    pub fn model_dim(&self) -> usize {
        (self.q as usize).pow(self.n as u32)
    }

    /// `q^{2n}`, the number of points of `W`.
    pub fn point_count(&self) -> usize {
        self.model_dim() * self.model_dim()
    }

    pub fn pairing(&self, f: &PrimeField, w: &[u64], v: &[u64]) -> u64 {
        assert_eq!(w.len(), 2 * self.n);
        assert_eq!(v.len(), 2 * self.n);
        let n = self.n;
        let mut acc = 0;
        for i in 0..n {
            acc = f.add(acc, f.mul(w[i], v[n + i]));
            acc = f.sub(acc, f.mul(w[n + i], v[i]));
        }
        acc
    }

    /// Encode a point of `W` as an index in `0..q^{2n}` (base-`q` digits).
    pub fn encode(&self, w: &[u64]) -> usize {
        let mut idx = 0usize;
        for &c in w.iter().rev() {
            idx = idx * self.q as usize + (c % self.q) as usize;
        }
        idx
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u64> {
        let mut w = Vec::with_capacity(2 * self.n);
        for _ in 0..2 * self.n {
            w.push((idx % self.q as usize) as u64);
            idx /= self.q as usize;
        }
        w
    }
}

/// A group element `(w, z)` with `w` of length `2n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeisenbergElement {
    pub w: Vec<u64>,
    pub z: u64,
}

impl HeisenbergElement {
    pub fn identity(space: &SymplecticSpace) -> HeisenbergElement {
        HeisenbergElement { w: vec![0; 2 * space.n], z: 0 }
    }
}

/// The group law `(w, z) (w', z') = (w + w', z + z' + <w, w'>/2)`.
pub fn h_mul(
    f: &PrimeField,
    space: &SymplecticSpace,
    g: &HeisenbergElement,
    h: &HeisenbergElement,
) -> Result<HeisenbergElement, HeisenbergError> {
    if g.w.len() != 2 * space.n || h.w.len() != 2 * space.n {
        return Err(HeisenbergError::DimensionMismatch(g.w.len().max(h.w.len()), 2 * space.n));
    }
    let w: Vec<u64> = g.w.iter().zip(&h.w).map(|(&a, &b)| f.add(a, b)).collect();
    let z = f.add(f.add(g.z, h.z), f.mul(f.half(), space.pairing(f, &g.w, &h.w)));
    Ok(HeisenbergElement { w, z })
}

pub fn h_inv(f: &PrimeField, g: &HeisenbergElement) -> HeisenbergElement {
    // <w, -w> = 0, so the z coordinate just negates
    HeisenbergElement { w: g.w.iter().map(|&a| f.neg(a)).collect(), z: f.neg(g.z) }
}

/// The irreducible representation with central character `psi`, realized on
/// functions on the second-coordinates Lagrangian `Y`.
///
/// Writing `w0 = (x0 | y0)`, the operator acts by
/// `(pi(w0, z0) F)(y) = psi(z0 - x0 . y - x0 . y0 / 2) F(y + y0)`,
/// which is the right-translation action on the induced model pulled back to
/// the section `{(0 | y, 0)}`.
#[derive(Debug, Clone)]
pub struct HeisenbergRep {
    space: SymplecticSpace,
    psi: AdditiveCharacter,
}

impl HeisenbergRep {
    pub fn new(space: SymplecticSpace, psi: AdditiveCharacter) -> HeisenbergRep {
        assert_eq!(space.q, psi.q());
        HeisenbergRep { space, psi }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn psi(&self) -> &AdditiveCharacter {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.space.model_dim()
    }

    fn dot(&self, f: &PrimeField, a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
    }

    pub fn op(&self, f: &PrimeField, h: &HeisenbergElement) -> Operator {
        let n = self.space.n;
        let q = self.space.q as usize;
        let dim = self.dim();
        let x0 = &h.w[..n];
        let y0 = &h.w[n..];
        let base = f.sub(h.z, f.mul(f.half(), self.dot(f, x0, y0)));
        let mut mat = Array2::zeros((dim, dim));
        for row in 0..dim {
            let y = decode_vec(row, n, q);
            let phase = f.sub(base, self.dot(f, x0, &y));
            let target: Vec<u64> = y.iter().zip(y0).map(|(&a, &b)| f.add(a, b)).collect();
            let col = encode_vec(&target, q);
            mat[(row, col)] = self.psi.eval(phase);
        }
        Operator::from_matrix(mat)
    }

    pub fn op_point(&self, f: &PrimeField, w: &[u64], z: u64) -> Operator {
        self.op(f, &HeisenbergElement { w: w.to_vec(), z })
    }

    /// Trace of `pi(w, z)` in `O(q^n)` without building the operator.
    pub fn trace(&self, f: &PrimeField, h: &HeisenbergElement) -> Complex64 {
        let n = self.space.n;
        let q = self.space.q as usize;
        let (x0, y0) = h.w.split_at(n);
        if y0.iter().any(|&c| c != 0) {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            let y = decode_vec(i, n, q);
            acc += self.psi.eval(f.sub(h.z, self.dot(f, x0, &y)));
        }
        acc
    }

    /// Character inner product `(chi_pi, chi_pi)_H`, averaging `|tr pi|^2`
    /// over all `q^{2n+1}` group elements. Equals 1 exactly when the
    /// representation is irreducible.
    pub fn character_self_inner_product(&self, f: &PrimeField) -> f64 {
        let q = self.space.q;
        let mut total = 0.0;
        for idx in 0..self.space.point_count() {
            let w = self.space.decode(idx);
            for z in 0..q {
                let tr = self.trace(f, &HeisenbergElement { w: w.clone(), z });
                total += tr.norm_sqr();
            }
        }
        total / (q as f64).powi(2 * self.space.n as i32 + 1)
    }
}

pub fn encode_vec(v: &[u64], q: usize) -> usize {
    let mut idx = 0usize;
    for &c in v.iter().rev() {
        idx = idx * q + (c as usize % q);
    }
    idx
}

pub fn decode_vec(mut idx: usize, len: usize, q: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push((idx % q) as u64);
        idx /= q;
    }
    v
}

/// The Weyl transform `W(T)(w) = tr(T pi(-w, 0)) / q^n`, returned as a
/// function on `W` indexed by [`SymplecticSpace::encode`].
pub fn weyl_transform(
    f: &PrimeField,
    rep: &HeisenbergRep,
    t: &Operator,
) -> Result<Vec<Complex64>, HeisenbergError> {
    if t.dim() != rep.dim() {
        return Err(HeisenbergError::DimensionMismatch(t.dim(), rep.dim()));
    }
    let space = rep.space();
    let scale = 1.0 / rep.dim() as f64;
    Ok((0..space.point_count())
        .map(|idx| {
            let w = space.decode(idx);
            let mw: Vec<u64> = w.iter().map(|&c| f.neg(c)).collect();
            let p = rep.op_point(f, &mw, 0);
            (t.compose(&p).unwrap().trace()) * scale
        })
        .collect())
}

/// Inverse of the Weyl transform: `T = sum_w c(w) pi(w, 0)`.
pub fn weyl_inverse(f: &PrimeField, rep: &HeisenbergRep, coeffs: &[Complex64]) -> Operator {
    let space = rep.space();
    assert_eq!(coeffs.len(), space.point_count());
    let mut acc = Operator::zeros(rep.dim());
    for (idx, &c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let w = space.decode(idx);
        acc = acc.add(&rep.op_point(f, &w, 0).scale(c)).unwrap();
    }
    acc
}

/// Number of orbits of the group generated by `gens` acting on
/// `0..point_count`, by union-find closure. The group itself is never
/// enumerated; each generator is applied once per point.
pub fn orbit_count(point_count: usize, gens: &[&dyn Fn(usize) -> usize]) -> usize {
    let mut uf = UnionFind::new(point_count);
    for p in 0..point_count {
        for gen in gens {
            uf.union(p, gen(p));
        }
    }
    uf.set_count()
}

/// Plain union-find with path halving and union by size.
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<u32>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], sets: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}
