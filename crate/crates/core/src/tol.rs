//! Numerical tolerances used by the verification layer.
//!
//! Every operator in this crate has dimension at most `q^2 <= 101^2`, so
//! accumulated roundoff stays many orders of magnitude below the thresholds
//! here; a failure against any of them indicates a real defect, not noise.

/// Entrywise residual for operator identities (homomorphism, conjugation
/// covariance, unitarity) on matrices of dimension up to `q^2`.
pub const OP_RESIDUAL: f64 = 1e-7;

/// Class-weighted character inner products against their integer targets.
pub const INNER_PRODUCT: f64 = 1e-8;

/// Reconstruction residual of an isotypic decomposition evaluated pointwise.
pub const DECOMPOSITION: f64 = 1e-6;

/// Character identities and character-sum comparisons evaluated per class.
pub const IDENTITY: f64 = 1e-6;

/// Absolute magnitude checks on Gauss sums.
pub const GAUSS_MAGNITUDE: f64 = 1e-9;

/// Full additive character sums over `Fq`; scaled by `q` at the call site.
pub const CHARACTER_SUM: f64 = 1e-12;

/// Residual imaginary part allowed in a quantity that must be real.
pub const IMAGINARY_PART: f64 = 1e-8;

/// Two rows of the character table closer than this merge as duplicates.
pub const ROW_MERGE: f64 = 1e-7;

/// Two rows farther apart than [`ROW_MERGE`] but closer than this are
/// reported as an integrity error: near-duplicates mean a broken build.
pub const ROW_NEAR_MISS: f64 = 1e-3;
