//! Tiny `k x k` matrices over `Fq` for `k <= 2`: Gram matrices of the
//! quadratic forms and elements of the orthogonal groups.

use crate::field::PrimeField;

/// A `k x k` matrix over `Fq`, `k` in `{1, 2}`, stored inline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FMat {
    pub k: usize,
    pub e: [[u64; 2]; 2],
}

impl FMat {
    pub fn scalar1(v: u64) -> FMat {
        FMat { k: 1, e: [[v, 0], [0, 0]] }
    }

    pub fn new2(a: u64, b: u64, c: u64, d: u64) -> FMat {
        FMat { k: 2, e: [[a, b], [c, d]] }
    }

    pub fn identity(k: usize) -> FMat {
        assert!(k == 1 || k == 2);
        let mut e = [[0u64; 2]; 2];
        for i in 0..k {
            e[i][i] = 1;
        }
        FMat { k, e }
    }

    pub fn diag(k: usize, v0: u64, v1: u64) -> FMat {
        assert!(k == 1 || k == 2);
        let mut e = [[0u64; 2]; 2];
        e[0][0] = v0;
        if k == 2 {
            e[1][1] = v1;
        }
        FMat { k, e }
    }

    pub fn scale(&self, f: &PrimeField, s: u64) -> FMat {
        let mut out = *self;
        for i in 0..self.k {
            for j in 0..self.k {
                out.e[i][j] = f.mul(self.e[i][j], s);
            }
        }
        out
    }

    pub fn mul(&self, f: &PrimeField, o: &FMat) -> FMat {
        assert_eq!(self.k, o.k);
        let mut out = FMat { k: self.k, e: [[0; 2]; 2] };
        for i in 0..self.k {
            for j in 0..self.k {
                let mut acc = 0;
                for l in 0..self.k {
                    acc = f.add(acc, f.mul(self.e[i][l], o.e[l][j]));
                }
                out.e[i][j] = acc;
            }
        }
        out
    }

    pub fn mulvec(&self, f: &PrimeField, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.k);
        (0..self.k)
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.k {
                    acc = f.add(acc, f.mul(self.e[i][j], v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> FMat {
        let mut out = *self;
        if self.k == 2 {
            out.e[0][1] = self.e[1][0];
            out.e[1][0] = self.e[0][1];
        }
        out
    }

    pub fn det(&self, f: &PrimeField) -> u64 {
        match self.k {
            1 => self.e[0][0] % f.q(),
            _ => f.sub(f.mul(self.e[0][0], self.e[1][1]), f.mul(self.e[0][1], self.e[1][0])),
        }
    }

    pub fn inv(&self, f: &PrimeField) -> Option<FMat> {
        let det = self.det(f);
        if det == 0 {
            return None;
        }
        let di = f.inv(det).unwrap();
        Some(match self.k {
            1 => FMat::scalar1(di),
            _ => FMat::new2(
                f.mul(self.e[1][1], di),
                f.mul(f.neg(self.e[0][1]), di),
                f.mul(f.neg(self.e[1][0]), di),
                f.mul(self.e[0][0], di),
            ),
        })
    }

    /// The quadratic value `v^t M v`.
    pub fn quad(&self, f: &PrimeField, v: &[u64]) -> u64 {
        self.pair(f, v, v)
    }

    /// The bilinear value `v^t M w`.
    pub fn pair(&self, f: &PrimeField, v: &[u64], w: &[u64]) -> u64 {
        assert_eq!(v.len(), self.k);
        assert_eq!(w.len(), self.k);
        let mut acc = 0;
        for i in 0..self.k {
            for j in 0..self.k {
                acc = f.add(acc, f.mul(v[i], f.mul(self.e[i][j], w[j])));
            }
        }
        acc
    }

    pub fn is_symmetric(&self) -> bool {
        self.k == 1 || self.e[0][1] == self.e[1][0]
    }
}
