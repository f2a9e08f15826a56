//! `SL2(Fq)` as explicit 2x2 matrices: enumeration, conjugacy classification,
//! commutators, and fixed projective lines.
//!
//! There are `q + 4` conjugacy classes. Canonical representatives, in the
//! fixed order used everywhere downstream:
//!
//! * `I` and `-I`,
//! * the four unipotent-type classes `(+-1, s; 0, +-1)` with `s` in `{1, eps}`,
//! * `diag(a, 1/a)` for `a != +-1`, one class per pair `{a, 1/a}`,
//! * `(x, eps y; y, x)` with `y != 0`, `x^2 - eps y^2 = 1`, one class per
//!   pair `{y, -y}`.
//!
//! Classification is trace-first and `O(1)` per element; a brute-force
//! conjugation partition certifies it in the tests.

use std::fmt;

use crate::field::PrimeField;

/// A matrix `(a b; c d)` over `Fq` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

impl Mat2 {
    pub fn new(f: &PrimeField, a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2 {
            a: f.reduce(a),
            b: f.reduce(b),
            c: f.reduce(c),
            d: f.reduce(d),
        }
    }

    /// Upper unipotent `u(x) = (1 x; 0 1)`.
    pub fn upper(f: &PrimeField, x: u64) -> Mat2 {
        Mat2 { a: 1, b: x % f.q(), c: 0, d: 1 }
    }

    /// `diag(a, 1/a)` for `a != 0`.
    pub fn diag(f: &PrimeField, a: u64) -> Mat2 {
        Mat2 { a: a % f.q(), b: 0, c: 0, d: f.inv(a).expect("diag needs a unit") }
    }

    /// `w_c = (0 -1/c; c 0)` for `c != 0`.
    pub fn weyl(f: &PrimeField, c: u64) -> Mat2 {
        Mat2 {
            a: 0,
            b: f.neg(f.inv(c).expect("weyl needs a unit")),
            c: c % f.q(),
            d: 0,
        }
    }

    #[inline]
    pub fn det(&self, f: &PrimeField) -> u64 {
        f.sub(f.mul(self.a, self.d), f.mul(self.b, self.c))
    }

    #[inline]
    pub fn trace(&self, f: &PrimeField) -> u64 {
        f.add(self.a, self.d)
    }

    #[inline]
    pub fn mul(&self, f: &PrimeField, o: &Mat2) -> Mat2 {
        Mat2 {
            a: f.add(f.mul(self.a, o.a), f.mul(self.b, o.c)),
            b: f.add(f.mul(self.a, o.b), f.mul(self.b, o.d)),
            c: f.add(f.mul(self.c, o.a), f.mul(self.d, o.c)),
            d: f.add(f.mul(self.c, o.b), f.mul(self.d, o.d)),
        }
    }

    /// Inverse of a unimodular matrix: `(d, -b; -c, a)`.
    #[inline]
    pub fn inv(&self, f: &PrimeField) -> Mat2 {
        Mat2 {
            a: self.d,
            b: f.neg(self.b),
            c: f.neg(self.c),
            d: self.a,
        }
    }

    #[inline]
    pub fn neg(&self, f: &PrimeField) -> Mat2 {
        Mat2 {
            a: f.neg(self.a),
            b: f.neg(self.b),
            c: f.neg(self.c),
            d: f.neg(self.d),
        }
    }

    #[inline]
    pub fn apply(&self, f: &PrimeField, v: (u64, u64)) -> (u64, u64) {
        (
            f.add(f.mul(self.a, v.0), f.mul(self.b, v.1)),
            f.add(f.mul(self.c, v.0), f.mul(self.d, v.1)),
        )
    }

    pub fn is_identity(&self) -> bool {
        *self == IDENTITY
    }
}

/// The commutator `x y x^-1 y^-1`.
pub fn commutator(f: &PrimeField, x: &Mat2, y: &Mat2) -> Mat2 {
    x.mul(f, y).mul(f, &x.inv(f)).mul(f, &y.inv(f))
}

/// All `q (q^2 - 1)` elements, in lexicographic order of `(a, b, c, d)`.
pub fn enumerate_group(f: &PrimeField) -> Vec<Mat2> {
    let q = f.q();
    let mut out = Vec::with_capacity((q * (q * q - 1)) as usize);
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                // solve ad - bc = 1 for d
                if a != 0 {
                    let d = f.mul(f.inv(a).unwrap(), f.add(1, f.mul(b, c)));
                    out.push(Mat2 { a, b, c, d });
                } else if b != 0 {
                    // a = 0: need -bc = 1, d free
                    if f.mul(b, c) == f.neg(1) {
                        for d in 0..q {
                            out.push(Mat2 { a, b, c, d });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Number of lines in `P1(Fq)` fixed by `g`.
pub fn fixed_lines(f: &PrimeField, g: &Mat2) -> u64 {
    // line spanned by (1, m): fixed iff b m^2 + (a - d) m - c = 0
    let mut n = 0;
    for m in 0..f.q() {
        let v = f.reduce(
            (f.mul(g.b, f.mul(m, m)) + f.mul(f.sub(g.a, g.d), m) + f.neg(g.c)) as i64,
        );
        if v == 0 {
            n += 1;
        }
    }
    // the vertical line (0, 1): fixed iff b = 0
    if g.b == 0 {
        n += 1;
    }
    n
}

/// Conjugacy class labels, ordered as in the canonical class list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLabel {
    Id,
    NegId,
    UnipPlus,
    UnipMinus,
    NegUnipPlus,
    NegUnipMinus,
    /// `diag(a, 1/a)`; the parameter is `min(a, 1/a)` as an integer.
    Hyperbolic(u64),
    /// `(x, eps y; y, x)`; the parameters satisfy `x^2 - eps y^2 = 1` with
    /// `y = min(y, -y)` as an integer.
    Elliptic(u64, u64),
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Id => write!(w, "I"),
            ClassLabel::NegId => write!(w, "-I"),
            ClassLabel::UnipPlus => write!(w, "U+"),
            ClassLabel::UnipMinus => write!(w, "U-"),
            ClassLabel::NegUnipPlus => write!(w, "-U+"),
            ClassLabel::NegUnipMinus => write!(w, "-U-"),
            ClassLabel::Hyperbolic(a) => write!(w, "H({a})"),
            ClassLabel::Elliptic(x, y) => write!(w, "E({x},{y})"),
        }
    }
}

/// One conjugacy class: label, canonical representative, size.
#[derive(Debug, Clone)]
pub struct ConjClass {
    pub label: ClassLabel,
    pub rep: Mat2,
    pub size: u64,
}

/// Square class of the parameter `s` in `g ~ (1 s; 0 1)`, for `tr g = 2`,
/// `g != I`. Conjugation scales the invariant: `h (1 s; 0 1) h^-1` has
/// lower-left entry `-s r^2`, so a nonzero `c` entry carries class `-c`.
fn unipotent_param_class(f: &PrimeField, g: &Mat2) -> i32 {
    if g.c != 0 {
        f.legendre(f.neg(g.c)).unwrap()
    } else {
        f.legendre(g.b).unwrap()
    }
}

pub fn classify(f: &PrimeField, g: &Mat2) -> ClassLabel {
    debug_assert_eq!(g.det(f), 1);
    let t = g.trace(f);
    if t == 2 {
        return if g.is_identity() {
            ClassLabel::Id
        } else if unipotent_param_class(f, g) == 1 {
            ClassLabel::UnipPlus
        } else {
            ClassLabel::UnipMinus
        };
    }
    if t == f.neg(2) {
        let m = g.neg(f);
        return if m.is_identity() {
            ClassLabel::NegId
        } else if f.legendre(f.neg(1)).unwrap() * unipotent_param_class(f, &m) == 1 {
            // g ~ (-1, s; 0, -1) with s in the class of -s', -g ~ (1 s'; 0 1)
            ClassLabel::NegUnipPlus
        } else {
            ClassLabel::NegUnipMinus
        };
    }
    let disc = f.sub(f.mul(t, t), 4);
    if f.legendre(disc).unwrap() == 1 {
        // split eigenvalues a, 1/a with a + 1/a = t
        let s = f.sqrt(disc).unwrap();
        let a = f.mul(f.add(t, s), f.half());
        let ainv = f.inv(a).unwrap();
        ClassLabel::Hyperbolic(a.min(ainv))
    } else {
        // x = t/2, and eps y^2 = x^2 - 1 has the nonsquare quotient square
        let x = f.mul(t, f.half());
        let ysq = f.mul(f.sub(f.mul(x, x), 1), f.inv(f.nonsquare()).unwrap());
        let y = f.sqrt(ysq).expect("elliptic parameter must be a square");
        ClassLabel::Elliptic(x, y.min(f.neg(y)))
    }
}

/// Canonical representative of a class label.
pub fn representative(f: &PrimeField, label: &ClassLabel) -> Mat2 {
    let eps = f.nonsquare();
    match *label {
        ClassLabel::Id => IDENTITY,
        ClassLabel::NegId => IDENTITY.neg(f),
        ClassLabel::UnipPlus => Mat2::upper(f, 1),
        ClassLabel::UnipMinus => Mat2::upper(f, eps),
        ClassLabel::NegUnipPlus => Mat2 { a: f.neg(1), b: 1, c: 0, d: f.neg(1) },
        ClassLabel::NegUnipMinus => Mat2 { a: f.neg(1), b: eps, c: 0, d: f.neg(1) },
        ClassLabel::Hyperbolic(a) => Mat2::diag(f, a),
        ClassLabel::Elliptic(x, y) => Mat2 { a: x, b: f.mul(eps, y), c: y, d: x },
    }
}

/// The `q + 4` classes in canonical order, with sizes.
///
/// Sizes are the standard ones (each certified against a brute-force
/// partition in the tests): unipotent-type classes have `(q^2 - 1)/2`
/// elements, split semisimple `q(q + 1)`, nonsplit semisimple `q(q - 1)`.
pub fn enumerate_classes(f: &PrimeField) -> Vec<ConjClass> {
    let q = f.q();
    let unip = (q * q - 1) / 2;
    let mut out = vec![
        ConjClass { label: ClassLabel::Id, rep: IDENTITY, size: 1 },
        ConjClass { label: ClassLabel::NegId, rep: IDENTITY.neg(f), size: 1 },
    ];
    for label in [
        ClassLabel::UnipPlus,
        ClassLabel::UnipMinus,
        ClassLabel::NegUnipPlus,
        ClassLabel::NegUnipMinus,
    ] {
        out.push(ConjClass { label, rep: representative(f, &label), size: unip });
    }
    // hyperbolic family, empty for q = 3
    let mut seen = vec![false; q as usize];
    for a in 2..q - 1 {
        if seen[a as usize] {
            continue;
        }
        let ainv = f.inv(a).unwrap();
        seen[a as usize] = true;
        seen[ainv as usize] = true;
        let lo = a.min(ainv);
        out.push(ConjClass {
            label: ClassLabel::Hyperbolic(lo),
            rep: Mat2::diag(f, lo),
            size: q * (q + 1),
        });
    }
    // elliptic family from x^2 - eps y^2 = 1 with y != 0, up to y ~ -y
    let eps = f.nonsquare();
    for x in 0..q {
        for y in 1..=(q - 1) / 2 {
            if f.sub(f.mul(x, x), f.mul(eps, f.mul(y, y))) == 1 {
                let label = ClassLabel::Elliptic(x, y);
                out.push(ConjClass {
                    label,
                    rep: representative(f, &label),
                    size: q * (q - 1),
                });
            }
        }
    }
    out.sort_by(|p, r| p.label.cmp(&r.label));
    out
}

/// Index of the class of `g` in the canonical order of `classes`.
pub fn class_index(f: &PrimeField, classes: &[ConjClass], g: &Mat2) -> usize {
    let label = classify(f, g);
    classes
        .iter()
        .position(|c| c.label == label)
        .expect("classify must land in the canonical list")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Brute-force partition of the group into conjugation orbits.
    fn brute_classes(f: &PrimeField) -> Vec<Vec<Mat2>> {
        let all = enumerate_group(f);
        let mut remaining: std::collections::HashSet<Mat2> = all.iter().copied().collect();
        let mut orbits = Vec::new();
        for g in &all {
            if !remaining.contains(g) {
                continue;
            }
            let mut orbit = std::collections::HashSet::new();
            for h in &all {
                orbit.insert(h.mul(f, g).mul(f, &h.inv(f)));
            }
            for x in &orbit {
                remaining.remove(x);
            }
            orbits.push(orbit.into_iter().collect());
        }
        orbits
    }

    #[test]
    fn group_order() {
        for (q, n) in [(3u64, 24usize), (5, 120)] {
            let f = PrimeField::new(q).unwrap();
            let g = enumerate_group(&f);
            assert_eq!(g.len(), n);
            assert!(g.iter().all(|m| m.det(&f) == 1));
            let set: std::collections::HashSet<_> = g.iter().collect();
            assert_eq!(set.len(), n);
        }
    }

    #[test]
    fn commutator_examples() {
        let f = PrimeField::new(5).unwrap();
        let x = Mat2::upper(&f, 1);
        let y = Mat2::diag(&f, 2);
        assert_eq!(commutator(&f, &x, &y), Mat2::new(&f, 1, 2, 0, 1));
        assert_eq!(commutator(&f, &IDENTITY, &y), IDENTITY);
        assert_eq!(commutator(&f, &x, &x), IDENTITY);
    }

    #[test]
    fn class_count_and_sizes() {
        for q in [3u64, 5, 7, 11, 13] {
            let f = PrimeField::new(q).unwrap();
            let classes = enumerate_classes(&f);
            assert_eq!(classes.len(), (q + 4) as usize);
            assert_eq!(classes.iter().map(|c| c.size).sum::<u64>(), q * (q * q - 1));
            for c in &classes {
                assert_eq!(classify(&f, &c.rep), c.label);
                assert_eq!(c.rep.det(&f), 1);
            }
        }
    }

    #[test]
    fn classes_match_brute_force_partition() {
        for q in [3u64, 5, 7] {
            let f = PrimeField::new(q).unwrap();
            let classes = enumerate_classes(&f);
            let brute = brute_classes(&f);
            assert_eq!(brute.len(), classes.len());
            for orbit in &brute {
                let labels: std::collections::HashSet<_> =
                    orbit.iter().map(|g| classify(&f, g)).collect();
                assert_eq!(labels.len(), 1, "orbit split across labels");
                let label = labels.into_iter().next().unwrap();
                let c = classes.iter().find(|c| c.label == label).unwrap();
                assert_eq!(c.size as usize, orbit.len(), "size of {label}");
            }
        }
    }

    #[test]
    fn classify_is_conjugation_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for q in [5u64, 7, 13] {
            let f = PrimeField::new(q).unwrap();
            let all = enumerate_group(&f);
            for _ in 0..1000 {
                let g = all[rng.random_range(0..all.len())];
                let h = all[rng.random_range(0..all.len())];
                let conj = h.mul(&f, &g).mul(&f, &h.inv(&f));
                assert_eq!(classify(&f, &g), classify(&f, &conj));
            }
        }
    }

    #[test]
    fn unipotent_subtypes_follow_square_class() {
        for q in [5u64, 7, 13] {
            let f = PrimeField::new(q).unwrap();
            for s in 1..q {
                let got = classify(&f, &Mat2::upper(&f, s));
                let want = if f.legendre(s).unwrap() == 1 {
                    ClassLabel::UnipPlus
                } else {
                    ClassLabel::UnipMinus
                };
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn hyperbolic_example_over_f5() {
        let f = PrimeField::new(5).unwrap();
        let g = Mat2::new(&f, 2, 0, 0, 3);
        assert_eq!(classify(&f, &g), ClassLabel::Hyperbolic(2));
        // brute-force conjugacy confirms: some h conjugates diag(2,3) to g
        let rep = representative(&f, &ClassLabel::Hyperbolic(2));
        let found = enumerate_group(&f)
            .iter()
            .any(|h| h.mul(&f, &rep).mul(&f, &h.inv(&f)) == g);
        assert!(found);
    }

    #[test]
    fn q3_has_no_hyperbolic_classes() {
        let f = PrimeField::new(3).unwrap();
        let classes = enumerate_classes(&f);
        assert_eq!(classes.len(), 7);
        assert!(classes
            .iter()
            .all(|c| !matches!(c.label, ClassLabel::Hyperbolic(_))));
    }

    #[test]
    fn fixed_lines_per_class() {
        for q in [5u64, 7] {
            let f = PrimeField::new(q).unwrap();
            assert_eq!(fixed_lines(&f, &IDENTITY), q + 1);
            assert_eq!(fixed_lines(&f, &Mat2::upper(&f, 1)), 1);
            assert_eq!(fixed_lines(&f, &Mat2::diag(&f, 2)), 2);
        }
    }

    #[test]
    fn burnside_commuting_pairs() {
        // #{(x,y) : [x,y] = I} = |G| * #classes, checked exactly
        for q in [3u64, 5] {
            let f = PrimeField::new(q).unwrap();
            let all = enumerate_group(&f);
            let mut commuting = 0u64;
            for x in &all {
                for y in &all {
                    if x.mul(&f, y) == y.mul(&f, x) {
                        commuting += 1;
                    }
                }
            }
            assert_eq!(commuting, (all.len() as u64) * (q + 4));
        }
    }

    #[test]
    fn label_fibers_partition_the_group() {
        for q in [3u64, 5, 7] {
            let f = PrimeField::new(q).unwrap();
            let classes = enumerate_classes(&f);
            let mut counts = vec![0u64; classes.len()];
            for g in enumerate_group(&f) {
                counts[class_index(&f, &classes, &g)] += 1;
            }
            for (c, n) in classes.iter().zip(counts) {
                assert_eq!(c.size, n, "class {}", c.label);
            }
        }
    }
}
