//! Quadratic planes over `Fq`, the orthogonal groups `O(2,+)` and `O(2,-)`
//! with their irreducible characters, the commuting pair of actions on
//! `L2(U)`, and the isotypic decomposition that produces all remaining
//! irreducible characters of `SL2(Fq)`.
//!
//! The decomposition is computed at the level of class functions: for each
//! orthogonal irreducible `tau`,
//!
//! `chi_Theta(tau)(g) = (1/#O) sum_h conj(chi_tau(h)) tr(O(h) G(g))`,
//!
//! where the joint traces come from the structured Bruhat factors in
//! `O(q^2)` per pair, so no `q^2 x q^2` matrix is ever materialized on this
//! path. Dense operators are still available for the small-`q` cross-checks.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{AdditiveCharacter, PrimeField};
use crate::fmat::FMat;
use crate::group::{self, ClassLabel, ConjClass, Mat2};
use crate::heisenberg::{decode_vec, encode_vec};
use crate::operator::Operator;
use crate::oscillator::{
    self, bruhat_factor, class_inner_product, component_characters, gauss_normalizer, BruhatWord,
    OscSign, WeilRep,
};
use crate::tol;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("rows '{0}' and '{1}' are near-duplicates (distance {2:.3e})")]
    NearDuplicateRows(String, String, f64),
    #[error("character table integrity: {0}")]
    Integrity(String),
}

/// The nondegenerate quadratic forms in dimensions one and two, up to
/// isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormTag {
    /// `x^2` on a line.
    OnePlus,
    /// `eps x^2` on a line.
    OneMinus,
    /// `x^2 - y^2`, the split plane (two isotropic lines).
    TwoPlus,
    /// `x^2 - eps y^2`, the anisotropic plane (no isotropic lines).
    TwoMinus,
}

impl FormTag {
    pub fn gram(self, f: &PrimeField) -> FMat {
        let eps = f.nonsquare();
        match self {
            FormTag::OnePlus => FMat::scalar1(1),
            FormTag::OneMinus => FMat::scalar1(eps),
            FormTag::TwoPlus => FMat::diag(2, 1, f.neg(1)),
            FormTag::TwoMinus => FMat::diag(2, 1, f.neg(eps)),
        }
    }

    pub fn k(self) -> usize {
        match self {
            FormTag::OnePlus | FormTag::OneMinus => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FormTag::OnePlus => "1+",
            FormTag::OneMinus => "1-",
            FormTag::TwoPlus => "2+",
            FormTag::TwoMinus => "2-",
        }
    }
}

/// The isometry group of a form, with a fixed rotation generator and a fixed
/// reflection so that every element is `s0^m` or `s0^m r`.
#[derive(Debug, Clone)]
pub struct OrthogonalGroup {
    pub tag: FormTag,
    pub gram: FMat,
    /// All elements; index `i < so_order` is `s0^i`, index `so_order + m`
    /// is `s0^m r`.
    pub elements: Vec<FMat>,
    pub so_order: usize,
    pub generator: FMat,
    /// Lexicographically smallest involution outside the rotation subgroup.
    pub reflection: FMat,
}

impl OrthogonalGroup {
    pub fn build(f: &PrimeField, tag: FormTag) -> OrthogonalGroup {
        let gram = tag.gram(f);
        let k = tag.k();
        let q = f.q();
        let mut all: Vec<FMat> = Vec::new();
        if k == 1 {
            for v in 1..q {
                let m = FMat::scalar1(v);
                if f.mul(f.mul(v, gram.e[0][0]), v) == gram.e[0][0] {
                    all.push(m);
                }
            }
        } else {
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        for d in 0..q {
                            let m = FMat::new2(a, b, c, d);
                            let mt = m.transpose();
                            if mt.mul(f, &gram).mul(f, &m) == gram {
                                all.push(m);
                            }
                        }
                    }
                }
            }
        }
        all.sort();
        let rotations: Vec<FMat> = all.iter().copied().filter(|m| m.det(f) == 1).collect();
        let n = rotations.len();
        let id = FMat::identity(k);
        // smallest rotation of full order generates the cyclic subgroup
        let generator = rotations
            .iter()
            .copied()
            .find(|s| {
                let mut p = *s;
                let mut ord = 1;
                while p != id {
                    p = p.mul(f, s);
                    ord += 1;
                }
                ord == n
            })
            .expect("rotation subgroup is cyclic");
        let reflection = all
            .iter()
            .copied()
            .find(|r| r.det(f) == f.neg(1) && r.mul(f, r) == id)
            .expect("a reflection exists");
        let mut elements = Vec::with_capacity(2 * n);
        let mut p = id;
        for _ in 0..n {
            elements.push(p);
            p = p.mul(f, &generator);
        }
        for m in 0..n {
            elements.push(elements[m].mul(f, &reflection));
        }
        debug_assert_eq!(elements.len(), all.len());
        OrthogonalGroup { tag, gram, elements, so_order: n, generator, reflection }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Decompose element index as `(m, is_reflected)`.
    pub fn coordinates(&self, idx: usize) -> (usize, bool) {
        if idx < self.so_order {
            (idx, false)
        } else {
            (idx - self.so_order, true)
        }
    }
}

/// Labels for the irreducible characters of `O(2,+/-)` (and of the two-point
/// groups in dimension one, which only have `Trivial` and `Sign`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrthLabel {
    Trivial,
    /// The determinant character.
    Sign,
    /// Extension of the order-two rotation character with `r -> +1`.
    SplitPlus,
    /// Extension with `r -> -1`.
    SplitMinus,
    /// Two-dimensional induced from the rotation character of index `j`,
    /// `1 <= j < so_order / 2`.
    Induced(usize),
}

impl std::fmt::Display for OrthLabel {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrthLabel::Trivial => write!(w, "1"),
            OrthLabel::Sign => write!(w, "sgn"),
            OrthLabel::SplitPlus => write!(w, "split+"),
            OrthLabel::SplitMinus => write!(w, "split-"),
            OrthLabel::Induced(j) => write!(w, "ind{j}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrthIrrep {
    pub label: OrthLabel,
    pub dim: usize,
    /// Character value per element index of the parent group.
    pub values: Vec<Complex64>,
}

/// The full character table of an orthogonal group built by
/// [`OrthogonalGroup::build`]: `(so_order + 6) / 2` rows in dimension two,
/// two rows in dimension one.
pub fn orth_irreps(group: &OrthogonalGroup) -> Vec<OrthIrrep> {
    let n = group.so_order;
    let order = group.order();
    let mut out = Vec::new();
    let value = |f: &dyn Fn(usize, bool) -> Complex64| -> Vec<Complex64> {
        (0..order)
            .map(|i| {
                let (m, refl) = group.coordinates(i);
                f(m, refl)
            })
            .collect()
    };
    out.push(OrthIrrep {
        label: OrthLabel::Trivial,
        dim: 1,
        values: value(&|_, _| Complex64::new(1.0, 0.0)),
    });
    out.push(OrthIrrep {
        label: OrthLabel::Sign,
        dim: 1,
        values: value(&|_, refl| Complex64::new(if refl { -1.0 } else { 1.0 }, 0.0)),
    });
    if n >= 2 {
        // the order-two rotation character and its two extensions
        for (label, sgn) in [(OrthLabel::SplitPlus, 1.0), (OrthLabel::SplitMinus, -1.0)] {
            out.push(OrthIrrep {
                label,
                dim: 1,
                values: value(&|m, refl| {
                    let base = if m % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(if refl { base * sgn } else { base }, 0.0)
                }),
            });
        }
        for j in 1..n.div_ceil(2) {
            if 2 * j == n {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            out.push(OrthIrrep {
                label: OrthLabel::Induced(j),
                dim: 2,
                values: value(&|m, refl| {
                    if refl {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let t = theta * m as f64;
                        Complex64::new(2.0 * t.cos(), 0.0)
                    }
                }),
            });
        }
    }
    out
}

/// The commuting pair of actions on `L2(U)` attached to a rank-two form:
/// the orthogonal group permutes `U`, and `SL2` acts through the
/// Schrodinger-model generators with quadratic form multiples of the Gram
/// matrix.
pub struct DualPairModel {
    pub tag: FormTag,
    pub gram: FMat,
    pub orth: OrthogonalGroup,
    pub weil: WeilRep,
    /// Decoded points of `U`, indexed like the model space.
    points: Vec<Vec<u64>>,
    /// `S v` per point, for fast bilinear pairings.
    gram_images: Vec<Vec<u64>>,
    /// `v^t S v` per point.
    quads: Vec<u64>,
}

impl DualPairModel {
    pub fn new(f: &PrimeField, psi: &AdditiveCharacter, tag: FormTag) -> DualPairModel {
        let gram = tag.gram(f);
        let orth = OrthogonalGroup::build(f, tag);
        let weil = WeilRep::new(f, psi.clone(), gram);
        let q = f.q() as usize;
        let dim = q.pow(gram.k as u32);
        let points: Vec<Vec<u64>> = (0..dim).map(|i| decode_vec(i, gram.k, q)).collect();
        let gram_images = points.iter().map(|v| gram.mulvec(f, v)).collect();
        let quads = points.iter().map(|v| gram.quad(f, v)).collect();
        DualPairModel { tag, gram, orth, weil, points, gram_images, quads }
    }

    pub fn dim(&self, f: &PrimeField) -> usize {
        self.weil.dim(f)
    }

    /// Permutation operator `f(u) -> f(h^-1 u)` for the element at `idx`.
    pub fn o_op(&self, f: &PrimeField, idx: usize) -> Operator {
        let h_inv = self.orth.elements[idx].inv(f).expect("isometries are invertible");
        let q = f.q() as usize;
        let dim = self.dim(f);
        Operator::from_fn(dim, |i, j| {
            let target = encode_vec(&h_inv.mulvec(f, &self.points[i]), q);
            if j == target {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn g_op(&self, f: &PrimeField, g: &Mat2) -> Operator {
        self.weil.op(f, g)
    }

    /// `tr(O(h) G(g))` from the structured factors, `O(q^2)` per call.
    pub fn joint_trace(&self, f: &PrimeField, h_idx: usize, g: &Mat2) -> Complex64 {
        let h_inv = self.orth.elements[h_idx].inv(f).expect("invertible");
        let q = f.q() as usize;
        let dim = self.dim(f);
        let half = f.half();
        let psi = self.weil.psi();
        match bruhat_factor(f, g) {
            BruhatWord::Big { u1, c, u2 } => {
                let b_scale = f.neg(f.inv(c).unwrap());
                let b = self.gram.scale(f, b_scale);
                let scale = gauss_normalizer(f, psi, &b).finv();
                let m = f.mul(half, f.add(u1, u2));
                let mut acc = Complex64::new(0.0, 0.0);
                for u in 0..dim {
                    // Q(h^-1 u) = Q(u), so both diagonal factors collapse
                    let v = h_inv.mulvec(f, &self.points[u]);
                    let dot = v
                        .iter()
                        .zip(&self.gram_images[u])
                        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
                    let phase = f.add(f.mul(m, self.quads[u]), f.mul(b_scale, dot));
                    acc += psi.eval(phase);
                }
                acc * scale
            }
            BruhatWord::Small { a, u } => {
                let sign = match self.gram.k % 2 {
                    0 => 1.0,
                    _ => f.legendre(a).unwrap() as f64,
                };
                let m = f.mul(half, f.mul(u, f.inv(a).unwrap()));
                let mut acc = Complex64::new(0.0, 0.0);
                for idx in 0..dim {
                    // fixed points of u -> a h^-1 u
                    let v = h_inv.mulvec(f, &self.points[idx]);
                    let av: Vec<u64> = v.iter().map(|&x| f.mul(a, x)).collect();
                    if encode_vec(&av, q) == idx {
                        acc += psi.eval(f.mul(m, self.quads[idx]));
                    }
                }
                acc * Complex64::new(sign, 0.0)
            }
        }
    }

    /// Restriction character `tr G(g)`, i.e. the joint trace at `h = 1`.
    pub fn restriction_character(&self, f: &PrimeField, g: &Mat2) -> Complex64 {
        self.joint_trace(f, 0, g)
    }
}

/// One isotypic piece of the decomposition.
#[derive(Debug, Clone)]
pub struct EtaEntry {
    pub tau: OrthLabel,
    pub tau_dim: usize,
    /// Dimension of `Theta(tau)`; zero when `tau` does not appear.
    pub theta_dim: u64,
    /// Character of `Theta(tau)` per conjugacy class.
    pub theta_char: Vec<Complex64>,
    /// `(chi_Theta, chi_Theta)_G`; equals 1 exactly for the irreducible
    /// pieces, 2 for the one reducible piece of the split form.
    pub norm: f64,
}

/// The decomposition of one rank-two model under `O x SL2`.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub tag: FormTag,
    pub reflection: FMat,
    pub entries: Vec<EtaEntry>,
    /// Max over `(h, class)` of the pointwise residual of
    /// `tr(O(h) G(g)) = sum_tau chi_tau(h) chi_Theta(tau)(g)`.
    pub reconstruction_residual: f64,
    /// `sum_tau dim(tau) dim(Theta(tau))`; must equal `q^2`.
    pub dimension_sum: u64,
}

pub fn eta_decompose(
    f: &PrimeField,
    psi: &AdditiveCharacter,
    tag: FormTag,
    classes: &[ConjClass],
) -> DecompositionReport {
    let model = DualPairModel::new(f, psi, tag);
    let order = model.orth.order();
    // joint traces for every (h, class representative) pair
    let jt: Vec<Vec<Complex64>> = (0..order)
        .into_par_iter()
        .map(|h| {
            classes
                .iter()
                .map(|c| model.joint_trace(f, h, &c.rep))
                .collect()
        })
        .collect();
    let irreps = orth_irreps(&model.orth);
    let entries: Vec<EtaEntry> = irreps
        .iter()
        .map(|tau| {
            let theta_char: Vec<Complex64> = (0..classes.len())
                .map(|ci| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for h in 0..order {
                        acc += tau.values[h].conj() * jt[h][ci];
                    }
                    acc / order as f64
                })
                .collect();
            let id_idx = 0; // classes are in canonical order, identity first
            let theta_dim = theta_char[id_idx].re.round().max(0.0) as u64;
            let norm = class_inner_product(classes, &theta_char, &theta_char).re;
            EtaEntry {
                tau: tau.label,
                tau_dim: tau.dim,
                theta_dim,
                theta_char,
                norm,
            }
        })
        .collect();
    // reconstruct the joint traces from the isotypic pieces
    let mut residual = 0.0f64;
    for h in 0..order {
        for ci in 0..classes.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (tau, entry) in irreps.iter().zip(&entries) {
                acc += tau.values[h] * entry.theta_char[ci];
            }
            residual = residual.max((acc - jt[h][ci]).norm());
        }
    }
    let dimension_sum = entries
        .iter()
        .map(|e| e.tau_dim as u64 * e.theta_dim)
        .sum();
    DecompositionReport {
        tag,
        reflection: model.orth.reflection,
        entries,
        reconstruction_residual: residual,
        dimension_sum,
    }
}

/// Steinberg character: number of fixed projective lines minus one.
pub fn steinberg_character(f: &PrimeField, classes: &[ConjClass]) -> Vec<Complex64> {
    classes
        .iter()
        .map(|c| Complex64::new(group::fixed_lines(f, &c.rep) as f64 - 1.0, 0.0))
        .collect()
}

/// Where a row of the assembled character table came from.
#[derive(Debug, Clone, PartialEq)]
pub enum RowOrigin {
    Trivial,
    /// Oscillator component; `large` is the `(q + 1)/2`-dimensional one.
    Component { sign: OscSign, large: bool },
    Steinberg,
    /// `Theta(ind j)` of the split (`+`) or anisotropic (`-`) plane.
    Eta { split: bool, index: usize },
}

/// One row of the character table.
#[derive(Debug, Clone)]
pub struct IrrepRecord {
    pub id: String,
    pub origin: RowOrigin,
    /// Tensor rank: 0 for the trivial row, 1 for oscillator components,
    /// 2 for everything obtained from the rank-two models.
    pub rank: u8,
    pub dim: u64,
    pub values: Vec<Complex64>,
}

/// The assembled character table: `q + 4` rows sorted by rank, dimension,
/// then id.
#[derive(Debug, Clone)]
pub struct CharTable {
    pub q: u64,
    pub psi_a: u64,
    pub classes: Vec<ConjClass>,
    pub rows: Vec<IrrepRecord>,
    /// Reflections used to split the induced characters, split plane first.
    pub reflections: (FMat, FMat),
}

impl CharTable {
    pub fn group_order(&self) -> u64 {
        self.q * (self.q * self.q - 1)
    }

    pub fn class_index(&self, label: &ClassLabel) -> Option<usize> {
        self.classes.iter().position(|c| c.label == *label)
    }

    pub fn row(&self, id: &str) -> Option<&IrrepRecord> {
        self.rows.iter().find(|r| r.id == id)
    }

    /// Rows of a given tensor rank.
    pub fn rank_rows(&self, rank: u8) -> impl Iterator<Item = &IrrepRecord> {
        self.rows.iter().filter(move |r| r.rank == rank)
    }
}

fn row_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Build the full character table from the oscillator components and the two
/// rank-two decompositions.
///
/// The degenerate pieces are produced twice (as component characters and as
/// `Theta` of the one-dimensional split orthogonal characters); the second
/// copy must match the first within [`tol::ROW_MERGE`] per class and is then
/// merged rather than added. Distances in the near-miss band abort assembly.
pub fn assemble_chartable(f: &PrimeField, psi: &AdditiveCharacter) -> Result<CharTable, TableError> {
    let q = f.q();
    let classes = group::enumerate_classes(f);
    let n_classes = classes.len();
    let mut rows: Vec<IrrepRecord> = Vec::with_capacity(n_classes);
    rows.push(IrrepRecord {
        id: "triv".into(),
        origin: RowOrigin::Trivial,
        rank: 0,
        dim: 1,
        values: vec![Complex64::new(1.0, 0.0); n_classes],
    });
    let [pp, pm, mp, mm] = component_characters(f, psi, &classes);
    for (id, sign, large, values) in [
        ("osc++", OscSign::Plus, true, pp),
        ("osc+-", OscSign::Plus, false, pm),
        ("osc-+", OscSign::Minus, true, mp),
        ("osc--", OscSign::Minus, false, mm),
    ] {
        let dim = values[0].re.round() as u64;
        rows.push(IrrepRecord {
            id: id.into(),
            origin: RowOrigin::Component { sign, large },
            rank: 1,
            dim,
            values,
        });
    }
    let st_values = steinberg_character(f, &classes);
    rows.push(IrrepRecord {
        id: "st".into(),
        origin: RowOrigin::Steinberg,
        rank: 2,
        dim: q,
        values: st_values.clone(),
    });

    let minus = eta_decompose(f, psi, FormTag::TwoMinus, &classes);
    let plus = eta_decompose(f, psi, FormTag::TwoPlus, &classes);

    let push_checked = |rows: &mut Vec<IrrepRecord>, rec: IrrepRecord| -> Result<(), TableError> {
        for existing in rows.iter() {
            let d = row_distance(&existing.values, &rec.values);
            if d < tol::ROW_MERGE {
                return Err(TableError::Integrity(format!(
                    "row {} duplicates {}",
                    rec.id, existing.id
                )));
            }
            if d < tol::ROW_NEAR_MISS {
                return Err(TableError::NearDuplicateRows(existing.id.clone(), rec.id, d));
            }
        }
        rows.push(rec);
        Ok(())
    };

    for (report, split) in [(&minus, false), (&plus, true)] {
        let side = if split { "+" } else { "-" };
        for entry in &report.entries {
            match entry.tau {
                OrthLabel::Induced(j) => {
                    push_checked(
                        &mut rows,
                        IrrepRecord {
                            id: format!("eta{side}{j}"),
                            origin: RowOrigin::Eta { split, index: j },
                            rank: 2,
                            dim: entry.theta_dim,
                            values: entry.theta_char.clone(),
                        },
                    )?;
                }
                OrthLabel::Trivial | OrthLabel::Sign | OrthLabel::SplitPlus
                | OrthLabel::SplitMinus => {
                    // degenerate pieces; checked against the existing rows
                    verify_degenerate_piece(&rows, report.tag, entry, &st_values)?;
                }
            }
        }
    }

    if rows.len() != (q + 4) as usize {
        return Err(TableError::Integrity(format!(
            "expected {} rows, assembled {}",
            q + 4,
            rows.len()
        )));
    }
    let dim_sq: u64 = rows.iter().map(|r| r.dim * r.dim).sum();
    if dim_sq != q * (q * q - 1) {
        return Err(TableError::Integrity(format!(
            "sum of dim^2 is {dim_sq}, group order is {}",
            q * (q * q - 1)
        )));
    }
    rows.sort_by(|a, b| {
        (a.rank, a.dim, a.id.clone()).cmp(&(b.rank, b.dim, b.id.clone()))
    });
    Ok(CharTable {
        q,
        psi_a: psi.parameter(),
        classes,
        rows,
        reflections: (plus.reflection, minus.reflection),
    })
}

/// The one-dimensional orthogonal characters map onto pieces already in the
/// table: `Theta(1)` of the anisotropic plane is Steinberg, `Theta(1)` of the
/// split plane is trivial + Steinberg, `Theta(sgn)` is zero or trivial, and
/// the two split extensions land on the oscillator components of matching
/// dimension.
fn verify_degenerate_piece(
    rows: &[IrrepRecord],
    tag: FormTag,
    entry: &EtaEntry,
    st_values: &[Complex64],
) -> Result<(), TableError> {
    let n = st_values.len();
    let expect: Option<Vec<Complex64>> = match (tag, entry.tau) {
        (FormTag::TwoMinus, OrthLabel::Trivial) => Some(st_values.to_vec()),
        (FormTag::TwoMinus, OrthLabel::Sign) => Some(vec![Complex64::new(0.0, 0.0); n]),
        (FormTag::TwoPlus, OrthLabel::Trivial) => Some(
            (0..n)
                .map(|i| st_values[i] + Complex64::new(1.0, 0.0))
                .collect(),
        ),
        (FormTag::TwoPlus, OrthLabel::Sign) => Some(vec![Complex64::new(1.0, 0.0); n]),
        (_, OrthLabel::SplitPlus) | (_, OrthLabel::SplitMinus) => None,
        _ => unreachable!("only rank-two tags carry degenerate pieces"),
    };
    if let Some(expect) = expect {
        let d = row_distance(&entry.theta_char, &expect);
        if d > tol::ROW_MERGE {
            return Err(TableError::Integrity(format!(
                "Theta({}) of {} is off its identification by {d:.3e}",
                entry.tau,
                tag.name()
            )));
        }
        return Ok(());
    }
    // split extensions: must match one of the rank-one component rows of the
    // right dimension, which one depends on the chosen reflection
    let matched = rows.iter().find(|r| {
        r.rank == 1 && row_distance(&r.values, &entry.theta_char) < tol::ROW_MERGE
    });
    match matched {
        Some(_) => Ok(()),
        None => {
            let best = rows
                .iter()
                .filter(|r| r.rank == 1)
                .map(|r| row_distance(&r.values, &entry.theta_char))
                .fold(f64::INFINITY, f64::min);
            Err(TableError::Integrity(format!(
                "Theta({}) of {} matches no oscillator component (best distance {best:.3e})",
                entry.tau,
                tag.name()
            )))
        }
    }
}

/// Multiplicity table of the rank-two rows inside the pairwise products of
/// the rank-one rows.
#[derive(Debug, Clone)]
pub struct F2Report {
    /// `(id, max multiplicity over products, covered)` per rank-two row.
    pub coverage: Vec<(String, f64, bool)>,
    /// Multiplicity of the trivial representation in `omega+ (x) dual
    /// omega+`, i.e. the class average of `|chi_omega+|^2`.
    pub trivial_multiplicity_in_omega_sq: f64,
    /// Largest deviation of any computed multiplicity from a nonnegative
    /// integer.
    pub worst_integrality: f64,
}

impl F2Report {
    pub fn all_covered(&self) -> bool {
        self.coverage.iter().all(|(_, _, ok)| *ok)
    }
}

/// Decompose all pairwise products of the four rank-one characters and
/// locate every rank-two character inside them.
pub fn verify_f2(f: &PrimeField, psi: &AdditiveCharacter, table: &CharTable) -> F2Report {
    let rank1: Vec<&IrrepRecord> = table.rank_rows(1).collect();
    let rank2: Vec<&IrrepRecord> = table.rank_rows(2).collect();
    let classes = &table.classes;
    let mut worst_integrality = 0.0f64;
    let mut coverage = Vec::new();
    for r2 in &rank2 {
        let mut best = 0.0f64;
        for a in &rank1 {
            for b in &rank1 {
                let prod: Vec<Complex64> = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| x * y)
                    .collect();
                let m = class_inner_product(classes, &prod, &r2.values);
                worst_integrality = worst_integrality.max((m.re - m.re.round()).abs().max(m.im.abs()));
                best = best.max(m.re);
            }
        }
        coverage.push((r2.id.clone(), best, best > 0.5));
        // a rank-two irreducible can never sit inside a single rank-one one
        for a in &rank1 {
            debug_assert!(r2.dim > a.dim);
        }
    }
    let chi_omega = oscillator::omega_character(f, psi, classes, OscSign::Plus);
    let sq: Vec<Complex64> = chi_omega
        .iter()
        .map(|x| Complex64::new(x.norm_sqr(), 0.0))
        .collect();
    let ones = vec![Complex64::new(1.0, 0.0); classes.len()];
    let trivial_mult = class_inner_product(classes, &sq, &ones).re;
    F2Report {
        coverage,
        trivial_multiplicity_in_omega_sq: trivial_mult,
        worst_integrality,
    }
}

/// The split-plane model on `L2(V)` used for the invariant-vector check:
/// `SL2` permutes `V = Fq^2`, and the chosen reflection acts by the
/// symplectic Fourier transform.
#[derive(Debug, Clone)]
pub struct InvariantVectorReport {
    /// `F f+ = +f+` residual.
    pub plus_residual: f64,
    /// `F f- = -f-` residual.
    pub minus_residual: f64,
    /// Worst residual of `f+-` under the permutation action of the group
    /// generators.
    pub invariance_residual: f64,
    /// Dimension of the full space of invariant functions, from the orbit
    /// count of the permutation action.
    pub invariant_dimension: usize,
}

/// Check that `f+- = delta_0 +- (1/q) 1` span the invariant functions of the
/// permutation model and are eigenvectors of the symplectic Fourier
/// transform.
pub fn invariant_vectors_check(f: &PrimeField, psi: &AdditiveCharacter) -> InvariantVectorReport {
    let q = f.q() as usize;
    let dim = q * q;
    let pairing = |v: &[u64], w: &[u64]| f.sub(f.mul(v[0], w[1]), f.mul(v[1], w[0]));
    let points: Vec<Vec<u64>> = (0..dim).map(|i| decode_vec(i, 2, q)).collect();
    let fourier = Operator::from_fn(dim, |i, j| {
        psi.eval(pairing(&points[i], &points[j])) / q as f64
    });
    let mut f_plus = vec![Complex64::new(1.0 / q as f64, 0.0); dim];
    let mut f_minus = vec![Complex64::new(-1.0 / q as f64, 0.0); dim];
    f_plus[0] += 1.0;
    f_minus[0] += 1.0;
    let resid = |got: &[Complex64], want: &[Complex64]| -> f64 {
        got.iter()
            .zip(want)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    };
    let plus_residual = resid(&fourier.apply(&f_plus), &f_plus);
    let neg: Vec<Complex64> = f_minus.iter().map(|z| -z).collect();
    let minus_residual = resid(&fourier.apply(&f_minus), &neg);

    let gens = [Mat2::upper(f, 1), Mat2::new(f, 1, 0, 1, 1)];
    let mut invariance_residual = 0.0f64;
    for g in &gens {
        let ginv = g.inv(f);
        for vec in [&f_plus, &f_minus] {
            let moved: Vec<Complex64> = (0..dim)
                .map(|i| {
                    let w = ginv.apply(f, (points[i][0], points[i][1]));
                    vec[encode_vec(&[w.0, w.1], q)]
                })
                .collect();
            invariance_residual = invariance_residual.max(resid(&moved, vec));
        }
    }
    let perms: Vec<Box<dyn Fn(usize) -> usize>> = gens
        .iter()
        .map(|g| {
            let g = *g;
            let f = f.clone();
            Box::new(move |i: usize| {
                let v = decode_vec(i, 2, q);
                let w = g.apply(&f, (v[0], v[1]));
                encode_vec(&[w.0, w.1], q)
            }) as Box<dyn Fn(usize) -> usize>
        })
        .collect();
    let refs: Vec<&dyn Fn(usize) -> usize> = perms.iter().map(|b| b.as_ref()).collect();
    let invariant_dimension = crate::heisenberg::orbit_count(dim, &refs);
    InvariantVectorReport {
        plus_residual,
        minus_residual,
        invariance_residual,
        invariant_dimension,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_classes;

    fn setup(q: u64) -> (PrimeField, AdditiveCharacter) {
        let f = PrimeField::new(q).unwrap();
        let psi = AdditiveCharacter::new(&f, 1).unwrap();
        (f, psi)
    }

    #[test]
    fn orthogonal_group_orders() {
        for q in [3u64, 5, 7, 11] {
            let f = PrimeField::new(q).unwrap();
            let plus = OrthogonalGroup::build(&f, FormTag::TwoPlus);
            assert_eq!(plus.order() as u64, 2 * (q - 1), "O(2,+) at q={q}");
            assert_eq!(plus.so_order as u64, q - 1);
            let minus = OrthogonalGroup::build(&f, FormTag::TwoMinus);
            assert_eq!(minus.order() as u64, 2 * (q + 1), "O(2,-) at q={q}");
            assert_eq!(minus.so_order as u64, q + 1);
            for tag in [FormTag::OnePlus, FormTag::OneMinus] {
                let line = OrthogonalGroup::build(&f, tag);
                assert_eq!(line.order(), 2);
            }
        }
    }

    #[test]
    fn reflection_relations() {
        let (f, _) = setup(7);
        for tag in [FormTag::TwoPlus, FormTag::TwoMinus] {
            let g = OrthogonalGroup::build(&f, tag);
            let r = g.reflection;
            assert_eq!(r.mul(&f, &r), FMat::identity(2));
            assert_eq!(r.det(&f), f.neg(1));
            // r s r = s^-1 on the rotation subgroup
            for m in 0..g.so_order {
                let s = g.elements[m];
                let conj = r.mul(&f, &s).mul(&f, &r);
                assert_eq!(conj, s.inv(&f).unwrap());
            }
        }
    }

    #[test]
    fn isotropic_line_counts() {
        for q in [5u64, 7, 13] {
            let f = PrimeField::new(q).unwrap();
            let count = |tag: FormTag| {
                let gram = tag.gram(&f);
                // lines (1, m) and (0, 1)
                let mut n = 0;
                for m in 0..q {
                    if gram.quad(&f, &[1, m]) == 0 {
                        n += 1;
                    }
                }
                if gram.quad(&f, &[0, 1]) == 0 {
                    n += 1;
                }
                n
            };
            assert_eq!(count(FormTag::TwoPlus), 2);
            assert_eq!(count(FormTag::TwoMinus), 0);
        }
    }

    #[test]
    fn orth_character_tables_are_orthonormal() {
        for q in [3u64, 5, 7] {
            let f = PrimeField::new(q).unwrap();
            for (tag, expect) in [
                (FormTag::TwoPlus, (q + 5) / 2),
                (FormTag::TwoMinus, (q + 7) / 2),
            ] {
                let g = OrthogonalGroup::build(&f, tag);
                let irreps = orth_irreps(&g);
                assert_eq!(irreps.len() as u64, expect, "{} at q={q}", tag.name());
                for a in &irreps {
                    assert_eq!(a.values[0].re.round() as usize, a.dim);
                    for b in &irreps {
                        let mut ip = Complex64::new(0.0, 0.0);
                        for h in 0..g.order() {
                            ip += a.values[h] * b.values[h].conj();
                        }
                        ip /= g.order() as f64;
                        let want = if a.label == b.label { 1.0 } else { 0.0 };
                        assert!(
                            (ip - Complex64::new(want, 0.0)).norm() < 1e-10,
                            "{} x {} at q={q}",
                            a.label,
                            b.label
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn o_and_g_actions_commute() {
        for q in [3u64, 5, 7] {
            let (f, psi) = setup(q);
            for tag in [FormTag::TwoPlus, FormTag::TwoMinus] {
                let model = DualPairModel::new(&f, &psi, tag);
                let gens = [Mat2::upper(&f, 1), Mat2::weyl(&f, 1), Mat2::diag(&f, 2)];
                for h in 0..model.orth.order() {
                    let oh = model.o_op(&f, h);
                    assert!(oh.is_unitary(tol::OP_RESIDUAL));
                    for g in &gens {
                        let gg = model.g_op(&f, g);
                        let lhs = oh.compose(&gg).unwrap();
                        let rhs = gg.compose(&oh).unwrap();
                        assert!(
                            lhs.distance(&rhs) < tol::OP_RESIDUAL,
                            "q={q} {} h={h} g={g:?}",
                            tag.name()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn joint_trace_matches_dense_operators() {
        for q in [3u64, 5] {
            let (f, psi) = setup(q);
            let classes = enumerate_classes(&f);
            for tag in [FormTag::TwoPlus, FormTag::TwoMinus] {
                let model = DualPairModel::new(&f, &psi, tag);
                for h in 0..model.orth.order() {
                    let oh = model.o_op(&f, h);
                    for c in &classes {
                        let dense = oh.compose(&model.g_op(&f, &c.rep)).unwrap().trace();
                        let fast = model.joint_trace(&f, h, &c.rep);
                        assert!((dense - fast).norm() < 1e-9, "q={q} {}", tag.name());
                    }
                }
            }
        }
    }

    #[test]
    fn o_op_is_the_permutation_representation() {
        let (f, psi) = setup(5);
        let model = DualPairModel::new(&f, &psi, FormTag::TwoMinus);
        // each row of the operator has a single 1 at h^-1 u
        for h in 0..model.orth.order() {
            let op = model.o_op(&f, h);
            for i in 0..op.dim() {
                let row_sum: f64 = (0..op.dim()).map(|j| op.entry(i, j).norm()).sum();
                assert!((row_sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restriction_character_factors_through_oscillators() {
        use crate::oscillator::{char_omega_closed, OscSign};
        for q in [3u64, 5, 7, 11] {
            let (f, psi) = setup(q);
            let classes = enumerate_classes(&f);
            for tag in [FormTag::TwoPlus, FormTag::TwoMinus] {
                let model = DualPairModel::new(&f, &psi, tag);
                // q = 1 mod 4: split restricts as (+,+), anisotropic as (+,-)
                let second = match (tag, f.q() % 4) {
                    (FormTag::TwoPlus, 1) | (FormTag::TwoMinus, 3) => OscSign::Plus,
                    _ => OscSign::Minus,
                };
                for c in &classes {
                    let got = model.restriction_character(&f, &c.rep);
                    let want = if c.label == ClassLabel::Id {
                        Complex64::new((q * q) as f64, 0.0)
                    } else {
                        char_omega_closed(&f, &psi, &c.label, OscSign::Plus).unwrap()
                            * char_omega_closed(&f, &psi, &c.label, second).unwrap()
                    };
                    assert!(
                        (got - want).norm() < tol::DECOMPOSITION,
                        "q={q} {} class {}",
                        tag.name(),
                        c.label
                    );
                }
            }
        }
    }

    #[test]
    fn eta_decomposition_shapes() {
        for q in [3u64, 5, 7] {
            let (f, psi) = setup(q);
            let classes = enumerate_classes(&f);
            let minus = eta_decompose(&f, &psi, FormTag::TwoMinus, &classes);
            assert!(minus.reconstruction_residual < tol::DECOMPOSITION, "q={q}");
            assert_eq!(minus.dimension_sum, q * q);
            let st = steinberg_character(&f, &classes);
            for e in &minus.entries {
                match e.tau {
                    OrthLabel::Trivial => {
                        assert_eq!(e.theta_dim, q);
                        assert!(row_distance(&e.theta_char, &st) < tol::ROW_MERGE);
                        assert!((e.norm - 1.0).abs() < tol::INNER_PRODUCT);
                    }
                    OrthLabel::Sign => {
                        assert_eq!(e.theta_dim, 0);
                        assert!(e.norm.abs() < tol::INNER_PRODUCT);
                    }
                    OrthLabel::SplitPlus | OrthLabel::SplitMinus => {
                        assert_eq!(e.theta_dim, (q - 1) / 2);
                        assert!((e.norm - 1.0).abs() < tol::INNER_PRODUCT);
                    }
                    OrthLabel::Induced(_) => {
                        assert_eq!(e.theta_dim, q - 1);
                        assert!((e.norm - 1.0).abs() < tol::INNER_PRODUCT);
                    }
                }
            }
            let n_induced = minus
                .entries
                .iter()
                .filter(|e| matches!(e.tau, OrthLabel::Induced(_)))
                .count() as u64;
            assert_eq!(n_induced, (q - 1) / 2);

            let plus = eta_decompose(&f, &psi, FormTag::TwoPlus, &classes);
            assert!(plus.reconstruction_residual < tol::DECOMPOSITION, "q={q}");
            assert_eq!(plus.dimension_sum, q * q);
            for e in &plus.entries {
                match e.tau {
                    OrthLabel::Trivial => {
                        assert_eq!(e.theta_dim, q + 1);
                        assert!((e.norm - 2.0).abs() < tol::INNER_PRODUCT, "1 + St has norm 2");
                    }
                    OrthLabel::Sign => {
                        assert_eq!(e.theta_dim, 1);
                        assert!((e.norm - 1.0).abs() < tol::INNER_PRODUCT);
                    }
                    OrthLabel::SplitPlus | OrthLabel::SplitMinus => {
                        assert_eq!(e.theta_dim, (q + 1) / 2);
                        assert!((e.norm - 1.0).abs() < tol::INNER_PRODUCT);
                    }
                    OrthLabel::Induced(_) => {
                        assert_eq!(e.theta_dim, q + 1);
                        assert!((e.norm - 1.0).abs() < tol::INNER_PRODUCT);
                    }
                }
            }
            let n_induced = plus
                .entries
                .iter()
                .filter(|e| matches!(e.tau, OrthLabel::Induced(_)))
                .count() as u64;
            assert_eq!(n_induced, (q - 3) / 2);
        }
    }

    #[test]
    fn eta_pieces_are_pairwise_distinct() {
        let (f, psi) = setup(7);
        let classes = enumerate_classes(&f);
        for tag in [FormTag::TwoPlus, FormTag::TwoMinus] {
            let rep = eta_decompose(&f, &psi, tag, &classes);
            let induced: Vec<&EtaEntry> = rep
                .entries
                .iter()
                .filter(|e| matches!(e.tau, OrthLabel::Induced(_)))
                .collect();
            for (i, a) in induced.iter().enumerate() {
                for b in induced.iter().skip(i + 1) {
                    assert!(row_distance(&a.theta_char, &b.theta_char) > 0.5);
                }
            }
        }
    }

    #[test]
    fn chartable_assembles_for_small_q() {
        for q in [3u64, 5, 7, 11] {
            let (f, psi) = setup(q);
            let table = assemble_chartable(&f, &psi).unwrap();
            assert_eq!(table.rows.len() as u64, q + 4);
            let dim_sq: u64 = table.rows.iter().map(|r| r.dim * r.dim).sum();
            assert_eq!(dim_sq, table.group_order());
            assert_eq!(table.rank_rows(0).count(), 1);
            assert_eq!(table.rank_rows(1).count(), 4);
            assert_eq!(table.rank_rows(2).count() as u64, q - 1);
            // first column is the dimension
            for r in &table.rows {
                assert!((r.values[0].re - r.dim as f64).abs() < 1e-9);
                assert!(r.values[0].im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn chartable_q3_dimensions() {
        let (f, psi) = setup(3);
        let table = assemble_chartable(&f, &psi).unwrap();
        let mut dims: Vec<u64> = table.rows.iter().map(|r| r.dim).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 1, 1, 2, 2, 2, 3]);
    }

    #[test]
    fn chartable_rows_are_orthonormal() {
        for q in [3u64, 5, 7, 11] {
            let (f, psi) = setup(q);
            let table = assemble_chartable(&f, &psi).unwrap();
            for (i, a) in table.rows.iter().enumerate() {
                for (j, b) in table.rows.iter().enumerate() {
                    let ip = class_inner_product(&table.classes, &a.values, &b.values);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (ip - Complex64::new(want, 0.0)).norm() < tol::OP_RESIDUAL,
                        "q={q}: ({}, {}) = {ip}",
                        a.id,
                        b.id
                    );
                }
            }
        }
    }

    #[test]
    fn chartable_column_orthogonality() {
        let (f, psi) = setup(5);
        let table = assemble_chartable(&f, &psi).unwrap();
        let n = table.classes.len();
        let order = table.group_order() as f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in &table.rows {
                    acc += r.values[i] * r.values[j].conj();
                }
                let want = if i == j {
                    order / table.classes[i].size as f64
                } else {
                    0.0
                };
                assert!((acc - Complex64::new(want, 0.0)).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn f2_products_cover_all_rank_two_rows() {
        for q in [3u64, 5, 7] {
            let (f, psi) = setup(q);
            let table = assemble_chartable(&f, &psi).unwrap();
            let report = verify_f2(&f, &psi, &table);
            assert!(report.all_covered(), "q={q}: {:?}", report.coverage);
            assert!((report.trivial_multiplicity_in_omega_sq - 2.0).abs() < tol::INNER_PRODUCT);
            assert!(report.worst_integrality < 1e-7);
        }
    }

    #[test]
    fn invariant_vectors() {
        for q in [3u64, 5, 7] {
            let (f, psi) = setup(q);
            let report = invariant_vectors_check(&f, &psi);
            assert!(report.plus_residual < tol::OP_RESIDUAL, "q={q}");
            assert!(report.minus_residual < tol::OP_RESIDUAL, "q={q}");
            assert!(report.invariance_residual < tol::OP_RESIDUAL, "q={q}");
            assert_eq!(report.invariant_dimension, 2, "q={q}");
        }
    }
}
