//! Character theory of `SL2(Fq)` for odd primes `q`, built from scratch out of
//! the Heisenberg group and the oscillator (Weil) representation.
//!
//! The crate constructs the full character table of `SL2(Fq)` without any
//! classical parametrization of the series: the four small irreducible
//! representations are the eigencomponents of the two oscillator
//! representations, and the remaining `q - 1` irreducibles are read off from
//! the isotypic decomposition of rank-two oscillator models under the
//! orthogonal groups `O(2,+)` and `O(2,-)` acting opposite `SL2`.
//! Everything is cross-checked numerically: operator models against closed
//! character formulas, character sums against brute-force counts.
//!
//! Modules mirror the layers of the construction:
//!
//! * [`field`]: arithmetic mod `q`, Legendre symbols, additive characters and
//!   quadratic Gauss sums.
//! * [`group`]: `SL2(Fq)` as explicit matrices, conjugacy classes,
//!   commutators, fixed projective lines.
//! * [`heisenberg`]: the finite Heisenberg group, its standard irreducible
//!   representation, the Weyl transform, orbit counting.
//! * [`oscillator`]: the oscillator representation of `SL2(Fq)` via
//!   Schrodinger-model generator operators and Bruhat words.
//! * [`dualpair`]: quadratic planes, the orthogonal groups `O(2,+/-)`, the
//!   commuting pair of actions on `L2(U)`, and the assembled character table.
//! * [`harmonic`]: commutator fiber counts, the Frobenius character sum, the
//!   rank-one / rank-two partial sums and their explicit bounds.

pub mod dualpair;
pub mod field;
pub mod fmat;
pub mod group;
pub mod harmonic;
pub mod heisenberg;
pub mod operator;
pub mod oscillator;
pub mod tol;

pub use dualpair::{CharTable, IrrepRecord};
pub use field::{AdditiveCharacter, FieldError, PrimeField};
pub use group::{ClassLabel, ConjClass, Mat2};
pub use operator::Operator;
