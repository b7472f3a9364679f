//! Named tolerances shared across the crate.
//!
//! Values are calibrated for `f64` working precision and sized by provenance:
//! validation slacks sit a little above accumulated round-off of the Jacobi
//! eigensolver, detectability and entropy cutoffs sit far below any physical
//! weight the test corpora produce, and identity checks in bits absorb the
//! log-amplified error of entropy differences.

/// Hermiticity, positivity floor, and unit-trace slack for density matrices.
pub const STATE: f64 = 1e-10;

/// Projector idempotence, orthogonality, and completeness slack.
pub const OBSERVABLE: f64 = 1e-10;

/// Minimum separation between distinct observable eigenvalues.
pub const EIGENVALUE_SEPARATION: f64 = 1e-9;

/// Branch probabilities at or below this threshold are undetectable.
pub const DETECTABLE: f64 = 1e-12;

/// Spectral weights at or below this threshold carry no entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// Mass outside a support above this threshold makes relative entropy diverge.
pub const SUPPORT: f64 = 1e-9;

/// Default tolerance for identity checks quoted in bits.
pub const IDENTITY: f64 = 1e-8;

/// Structural comparisons of projectors, subspaces, and operator identities.
pub const STRUCTURE: f64 = 1e-9;

/// Degenerate-eigenvalue clustering, relative to the spectral radius.
pub const CLUSTER_REL: f64 = 1e-9;

/// Rank decisions: eigenvalues above this count toward the range.
pub const RANK: f64 = 1e-12;

/// Slack handed to the eigensolver when a matrix is Hermitian by
/// construction but carries round-off.
pub const HERMITICITY: f64 = 1e-9;
