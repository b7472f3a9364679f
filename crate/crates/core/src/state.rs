//! States, observables, and the operations connecting them.
//!
//! A [`DensityMatrix`] is a unit-trace positive semidefinite matrix; an
//! [`Observable`] is a spectral form `sum_l a_l P_l` with distinct real
//! eigenvalues and orthogonal projectors resolving the identity. Branches with
//! probability at or below [`tol::DETECTABLE`] are *undetectable*: they carry
//! no weight in any state-dependent construction.
//!
//! Selective and non-selective state changes follow the projection update
//! `rho -> P rho P / tr(rho P)` and `rho -> sum_l P_l rho P_l`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigendecomposition, outer, tensor_product, tensor_vec, CMatrix,
    HermitianEigen,
};
use crate::scalar::Scalar;
use crate::tol;

/// Unit-trace positive semidefinite complex matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T = f64> {
    matrix: CMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates Hermiticity, positivity, and unit trace
    /// (each within [`tol::STATE`]).
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let slack = T::validation_tol(tol::STATE);
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let dev = matrix.hermitian_deviation();
        if dev > slack {
            return Err(Error::InvalidState {
                reason: format!("Hermitian deviation {:.3e}", dev.as_f64()),
            });
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > slack || tr.im.abs() > slack {
            return Err(Error::InvalidState {
                reason: format!("trace {:.12} + {:.3e}i, expected 1", tr.re.as_f64(), tr.im.as_f64()),
            });
        }
        let eig = hermitian_eigendecomposition(&matrix, slack)?;
        let min = eig.eigenvalues.first().copied().unwrap_or_else(T::zero);
        if min < -slack {
            return Err(Error::InvalidState {
                reason: format!("negative eigenvalue {:.3e}", min.as_f64()),
            });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a valid state by construction.
    pub(crate) fn trusted(matrix: CMatrix<T>) -> Self {
        debug_assert!(
            matrix.hermitian_deviation() <= T::validation_tol(1e-8) * matrix.frobenius_norm().max(T::one()),
            "trusted state is not Hermitian"
        );
        debug_assert!(
            (matrix.trace().re - T::one()).abs() <= T::validation_tol(1e-8),
            "trusted state trace {:?}",
            matrix.trace().re
        );
        Self { matrix }
    }

    /// Rank-one state `|v><v|`; the vector is normalized first.
    pub fn from_pure(vector: &[Complex<T>]) -> Result<Self> {
        let norm = crate::linalg::vec_norm(vector);
        if norm <= T::real(tol::RANK) {
            return Err(Error::InvalidState {
                reason: "zero state vector".into(),
            });
        }
        let v: Vec<Complex<T>> = vector
            .iter()
            .map(|z| z / Complex::new(norm, T::zero()))
            .collect();
        Ok(Self::trusted(outer(&v, &v)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(CMatrix::identity(dim).scale_re(T::one() / T::real(dim as f64)))
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Spectral decomposition with the crate's Hermiticity slack.
    pub fn eigen(&self) -> HermitianEigen<T> {
        hermitian_eigendecomposition(&self.matrix, T::real(tol::HERMITICITY))
            .expect("density matrix is Hermitian by invariant")
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().eigenvalues
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn rank(&self, cutoff: T) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > cutoff).count()
    }

    /// `tr(rho^2)`; equals 1 exactly on pure states.
    pub fn purity(&self) -> T {
        self.matrix.mul(&self.matrix).trace().re
    }
}

/// One spectral branch `(a_l, P_l)` of an observable.
#[derive(Clone, Debug)]
pub struct Branch<T = f64> {
    pub eigenvalue: T,
    pub projector: CMatrix<T>,
}

/// Spectral form `sum_l a_l P_l` with distinct eigenvalues and orthogonal
/// projectors summing to the identity.
#[derive(Clone, Debug)]
pub struct Observable<T = f64> {
    branches: Vec<Branch<T>>,
    dim: usize,
}

impl<T: Scalar> Observable<T> {
    /// Validates eigenvalue separation (> [`tol::EIGENVALUE_SEPARATION`]) and
    /// projector structure (within [`tol::OBSERVABLE`]).
    pub fn new(branches: Vec<(T, CMatrix<T>)>) -> Result<Self> {
        let dim = match branches.first() {
            Some((_, p)) => p.rows(),
            None => {
                return Err(Error::InvalidObservable {
                    reason: "no branches".into(),
                })
            }
        };
        let slack = T::validation_tol(tol::OBSERVABLE);
        let sep = T::real(tol::EIGENVALUE_SEPARATION);
        for (i, (a_i, p)) in branches.iter().enumerate() {
            if !p.is_square() || p.rows() != dim {
                return Err(Error::InvalidObservable {
                    reason: format!("branch {i}: projector is {}x{}", p.rows(), p.cols()),
                });
            }
            if p.hermitian_deviation() > slack {
                return Err(Error::InvalidObservable {
                    reason: format!("branch {i}: projector not Hermitian"),
                });
            }
            if !p.mul(p).approx_eq(p, slack) {
                return Err(Error::InvalidObservable {
                    reason: format!("branch {i}: projector not idempotent"),
                });
            }
            for (j, (a_j, q)) in branches.iter().enumerate().skip(i + 1) {
                if (*a_i - *a_j).abs() <= sep {
                    return Err(Error::InvalidObservable {
                        reason: format!(
                            "branches {i} and {j}: eigenvalues {} and {} not separated",
                            a_i, a_j
                        ),
                    });
                }
                if p.mul(q).frobenius_norm() > slack {
                    return Err(Error::InvalidObservable {
                        reason: format!("branches {i} and {j}: projectors not orthogonal"),
                    });
                }
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for (_, p) in &branches {
            sum = sum.add(p);
        }
        if !sum.approx_eq(&CMatrix::identity(dim), slack) {
            return Err(Error::InvalidObservable {
                reason: "projectors do not resolve the identity".into(),
            });
        }
        Ok(Self {
            branches: branches
                .into_iter()
                .map(|(eigenvalue, projector)| Branch {
                    eigenvalue,
                    projector,
                })
                .collect(),
            dim,
        })
    }

    /// Single branch `(1, I)`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            branches: vec![Branch {
                eigenvalue: T::one(),
                projector: CMatrix::identity(dim),
            }],
            dim,
        }
    }

    /// Complete observable over the standard basis, eigenvalues `1..=dim`.
    pub fn computational(dim: usize) -> Self {
        let vectors: Vec<Vec<Complex<T>>> = (0..dim)
            .map(|i| {
                let mut v = vec![Complex::zero(); dim];
                v[i] = Complex::one();
                v
            })
            .collect();
        Self::from_basis(&vectors).expect("standard basis is orthonormal")
    }

    /// Complete observable from an orthonormal basis, eigenvalues `1..=n`.
    pub fn from_basis(vectors: &[Vec<Complex<T>>]) -> Result<Self> {
        let branches = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (T::real((i + 1) as f64), outer(v, v)))
            .collect();
        Self::new(branches)
    }

    /// Observable from orthogonal projectors, eigenvalues `1..=n` in order.
    pub fn from_projectors(projectors: Vec<CMatrix<T>>) -> Result<Self> {
        let branches = projectors
            .into_iter()
            .enumerate()
            .map(|(i, p)| (T::real((i + 1) as f64), p))
            .collect();
        Self::new(branches)
    }

    /// Spectral form of a Hermitian matrix, clustering eigenvalues within
    /// `rel_tol * spectral_radius` into one branch.
    pub fn from_hermitian(m: &CMatrix<T>, rel_tol: T) -> Result<Self> {
        let eig = hermitian_eigendecomposition(m, T::real(tol::HERMITICITY))?;
        let branches = eig
            .clustered_projectors(rel_tol)
            .into_iter()
            .map(|(mean, p)| (mean, p))
            .collect();
        Self::new(branches)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn projector(&self, l: usize) -> &CMatrix<T> {
        &self.branches[l].projector
    }

    pub fn eigenvalue(&self, l: usize) -> T {
        self.branches[l].eigenvalue
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.branches.iter().map(|b| b.eigenvalue).collect()
    }

    /// `sum_l a_l P_l`.
    pub fn matrix(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for b in &self.branches {
            m = m.add(&b.projector.scale_re(b.eigenvalue));
        }
        m
    }

    /// Embeds on the right of a `d_left x dim` composite: branches become
    /// `(a_l, I_left kron P_l)`.
    pub fn lift(&self, d_left: usize) -> Observable<T> {
        let id = CMatrix::identity(d_left);
        Observable {
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    eigenvalue: b.eigenvalue,
                    projector: tensor_product(&id, &b.projector),
                })
                .collect(),
            dim: d_left * self.dim,
        }
    }

    /// Embeds on the left of a `dim x d_right` composite: branches become
    /// `(a_l, P_l kron I_right)`.
    pub fn pad_right(&self, d_right: usize) -> Observable<T> {
        let id = CMatrix::identity(d_right);
        Observable {
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    eigenvalue: b.eigenvalue,
                    projector: tensor_product(&b.projector, &id),
                })
                .collect(),
            dim: self.dim * d_right,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.branches.len() == 1
    }

    /// `true` when every projector has rank one.
    pub fn is_complete(&self) -> bool {
        self.branches
            .iter()
            .all(|b| (b.projector.trace().re - T::one()).abs() < T::real(0.5))
    }

    /// Outcome distribution `p_l = tr(rho P_l)`, clipped to `[0, 1]` after a
    /// `-1e-10` floor check; the distribution must sum to 1 within `1e-10`.
    pub fn probabilities(&self, rho: &DensityMatrix<T>) -> Result<Vec<T>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "outcome probabilities: state dim {} vs observable dim {}",
                    rho.dim(),
                    self.dim
                ),
            });
        }
        let slack = T::validation_tol(tol::STATE);
        let mut ps = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            let p = rho.matrix().mul(&b.projector).trace().re;
            if p < -slack {
                return Err(Error::ToleranceExceeded {
                    what: "outcome probability below zero".into(),
                    residual: (-p).as_f64(),
                    tol: slack.as_f64(),
                });
            }
            ps.push(p.max(T::zero()).min(T::one()));
        }
        let sum: T = ps.iter().copied().fold(T::zero(), |a, b| a + b);
        if (sum - T::one()).abs() > slack {
            return Err(Error::ToleranceExceeded {
                what: "outcome probabilities do not sum to 1".into(),
                residual: (sum - T::one()).abs().as_f64(),
                tol: slack.as_f64(),
            });
        }
        Ok(ps)
    }
}

/// Non-selective projective update `sum_l P_l rho P_l`.
pub fn luders_mixture<T: Scalar>(
    rho: &DensityMatrix<T>,
    a: &Observable<T>,
) -> Result<DensityMatrix<T>> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("luders: state dim {} vs observable dim {}", rho.dim(), a.dim()),
        });
    }
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for b in a.branches() {
        out = out.add(&b.projector.mul(rho.matrix()).mul(&b.projector));
    }
    Ok(DensityMatrix::trusted(out.hermitian_part()))
}

/// Selective projective update for one projector: returns
/// `(tr(rho P), P rho P / tr(rho P))`, with no state when the branch is
/// undetectable.
pub fn conditional_state<T: Scalar>(
    rho: &DensityMatrix<T>,
    projector: &CMatrix<T>,
) -> (T, Option<DensityMatrix<T>>) {
    let compressed = projector.mul(rho.matrix()).mul(projector).hermitian_part();
    let p = compressed.trace().re;
    if p <= T::real(tol::DETECTABLE) {
        return (p.max(T::zero()), None);
    }
    (
        p,
        Some(DensityMatrix::trusted(
            compressed.scale_re(T::one() / p),
        )),
    )
}

/// Selective projective update for branch `l` of an observable.
pub fn luders_selective<T: Scalar>(
    rho: &DensityMatrix<T>,
    a: &Observable<T>,
    l: usize,
) -> Result<(T, Option<DensityMatrix<T>>)> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "luders_selective: state dim {} vs observable dim {}",
                rho.dim(),
                a.dim()
            ),
        });
    }
    if l >= a.branch_count() {
        return Err(Error::DimensionMismatch {
            context: format!("luders_selective: branch {l} of {}", a.branch_count()),
        });
    }
    Ok(conditional_state(rho, a.projector(l)))
}

/// Projector onto the span of eigenvectors with eigenvalue above `cutoff`.
pub fn range_projector<T: Scalar>(rho: &DensityMatrix<T>, cutoff: T) -> CMatrix<T> {
    let eig = rho.eigen();
    let mut proj = CMatrix::zeros(rho.dim(), rho.dim());
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = eig.eigenvector(i);
            proj = proj.add(&outer(&v, &v));
        }
    }
    proj
}

/// State on a `d1 x d2` composite; subsystem 1 is the slow factor.
#[derive(Clone, Debug)]
pub struct BipartiteState<T = f64> {
    state: DensityMatrix<T>,
    d1: usize,
    d2: usize,
}

impl<T: Scalar> BipartiteState<T> {
    pub fn new(state: DensityMatrix<T>, d1: usize, d2: usize) -> Result<Self> {
        if d1 * d2 != state.dim() || d1 == 0 || d2 == 0 {
            return Err(Error::DimensionMismatch {
                context: format!("bipartite: {}x{} factors vs dim {}", d1, d2, state.dim()),
            });
        }
        Ok(Self { state, d1, d2 })
    }

    /// Builds from factors: `rho1 kron rho2`.
    pub fn product(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Self {
        Self {
            state: DensityMatrix::trusted(tensor_product(rho1.matrix(), rho2.matrix())),
            d1: rho1.dim(),
            d2: rho2.dim(),
        }
    }

    pub fn from_pure(vector: &[Complex<T>], d1: usize, d2: usize) -> Result<Self> {
        Self::new(DensityMatrix::from_pure(vector)?, d1, d2)
    }

    pub fn state(&self) -> &DensityMatrix<T> {
        &self.state
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    /// Reduction onto subsystem `keep` (1 or 2).
    pub fn reduce(&self, keep: usize) -> Result<DensityMatrix<T>> {
        if keep != 1 && keep != 2 {
            return Err(Error::DimensionMismatch {
                context: format!("reduce: subsystem {keep} of a bipartite state"),
            });
        }
        let m = self
            .state
            .matrix()
            .partial_trace(&[self.d1, self.d2], &[keep - 1])?;
        Ok(DensityMatrix::trusted(m))
    }

    pub fn reduce1(&self) -> DensityMatrix<T> {
        self.reduce(1).expect("subsystem 1 exists")
    }

    pub fn reduce2(&self) -> DensityMatrix<T> {
        self.reduce(2).expect("subsystem 2 exists")
    }

    /// Conditional bipartite state for a lifted projector on the composite.
    pub fn conditional(&self, lifted_projector: &CMatrix<T>) -> (T, Option<BipartiteState<T>>) {
        let (p, rho) = conditional_state(&self.state, lifted_projector);
        (
            p,
            rho.map(|state| BipartiteState {
                state,
                d1: self.d1,
                d2: self.d2,
            }),
        )
    }
}

/// State on a `d1 x d2 x d3` composite; indices flatten slow-to-fast.
#[derive(Clone, Debug)]
pub struct TripartiteState<T = f64> {
    state: DensityMatrix<T>,
    d1: usize,
    d2: usize,
    d3: usize,
}

impl<T: Scalar> TripartiteState<T> {
    pub fn new(state: DensityMatrix<T>, d1: usize, d2: usize, d3: usize) -> Result<Self> {
        if d1 * d2 * d3 != state.dim() || d1 == 0 || d2 == 0 || d3 == 0 {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "tripartite: {}x{}x{} factors vs dim {}",
                    d1,
                    d2,
                    d3,
                    state.dim()
                ),
            });
        }
        Ok(Self { state, d1, d2, d3 })
    }

    pub fn state(&self) -> &DensityMatrix<T> {
        &self.state
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.d1, self.d2, self.d3]
    }

    /// Reduction onto the listed subsystems (1-based, ascending).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let zero_based: Vec<usize> = keep.iter().map(|&k| k.wrapping_sub(1)).collect();
        let m = self
            .state
            .matrix()
            .partial_trace(&[self.d1, self.d2, self.d3], &zero_based)?;
        Ok(DensityMatrix::trusted(m))
    }

    /// Re-reads the same state as bipartite `1 | (2,3)`.
    pub fn split_1_23(&self) -> BipartiteState<T> {
        BipartiteState {
            state: self.state.clone(),
            d1: self.d1,
            d2: self.d2 * self.d3,
        }
    }

    /// Re-reads the same state as bipartite `(1,2) | 3`.
    pub fn split_12_3(&self) -> BipartiteState<T> {
        BipartiteState {
            state: self.state.clone(),
            d1: self.d1 * self.d2,
            d2: self.d3,
        }
    }

    /// Conditional tripartite state for a lifted projector on the composite.
    pub fn conditional(&self, lifted_projector: &CMatrix<T>) -> (T, Option<TripartiteState<T>>) {
        let (p, rho) = conditional_state(&self.state, lifted_projector);
        (
            p,
            rho.map(|state| TripartiteState {
                state,
                d1: self.d1,
                d2: self.d2,
                d3: self.d3,
            }),
        )
    }
}

/// Pure-state expansion `|psi> = sum_l alpha_l |u_l>|v_l>` with positive
/// coefficients descending and orthonormal factor vectors.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition<T = f64> {
    pub coefficients: Vec<T>,
    pub left_vectors: Vec<Vec<Complex<T>>>,
    pub right_vectors: Vec<Vec<Complex<T>>>,
    pub d1: usize,
    pub d2: usize,
}

impl<T: Scalar> SchmidtDecomposition<T> {
    /// `sum_l alpha_l |u_l> kron |v_l>`.
    pub fn state_vector(&self) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); self.d1 * self.d2];
        for ((alpha, u), v) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            let term = tensor_vec(u, v);
            for (o, t) in out.iter_mut().zip(term) {
                *o = *o + t * Complex::new(*alpha, T::zero());
            }
        }
        out
    }

    /// Projector onto the reassembled state; phase-free comparison target.
    pub fn projector(&self) -> CMatrix<T> {
        let v = self.state_vector();
        outer(&v, &v)
    }
}

/// Extends a state of subsystem 2 to a pure bipartite state whose ancilla
/// (subsystem 1) has dimension equal to the rank.
pub fn purify<T: Scalar>(rho2: &DensityMatrix<T>) -> BipartiteState<T> {
    let eig = rho2.eigen();
    let cutoff = T::real(tol::RANK);
    let kept: Vec<(T, Vec<Complex<T>>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &lambda)| lambda > cutoff)
        .map(|(i, &lambda)| (lambda, eig.eigenvector(i)))
        .collect();
    let rank = kept.len().max(1);
    let d2 = rho2.dim();
    let mut psi = vec![Complex::zero(); rank * d2];
    for (anc, (lambda, v)) in kept.iter().enumerate() {
        let amp = Complex::new(lambda.sqrt(), T::zero());
        for (j, &vj) in v.iter().enumerate() {
            psi[anc * d2 + j] = amp * vj;
        }
    }
    BipartiteState::from_pure(&psi, rank, d2).expect("purification is a unit vector")
}

/// Schmidt decomposition of a pure bipartite state.
///
/// `purity_tol` bounds the accepted distance from purity: the largest
/// eigenvalue must reach `1 - purity_tol`.
pub fn schmidt_decomposition<T: Scalar>(
    s: &BipartiteState<T>,
    purity_tol: T,
) -> Result<SchmidtDecomposition<T>> {
    let eig = s.state().eigen();
    let n = eig.eigenvalues.len();
    let largest = eig.eigenvalues[n - 1];
    if largest < T::one() - purity_tol {
        return Err(Error::NotPure {
            largest: largest.as_f64(),
        });
    }
    let mut psi = eig.eigenvector(n - 1);
    // Deterministic global phase: the largest-magnitude entry is made real
    // and positive.
    let pivot = psi
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.norm_sqr().partial_cmp(&b.norm_sqr()).expect("finite"))
        .map(|(i, _)| i)
        .expect("nonzero vector");
    let mag = psi[pivot].norm();
    let phase = psi[pivot] / mag;
    for z in psi.iter_mut() {
        *z = *z * phase.conj();
    }

    let (d1, d2) = (s.d1(), s.d2());
    let m = CMatrix::from_fn(d1, d2, |i, j| psi[i * d2 + j]);
    let rho1 = m.mul(&m.adjoint());
    let left_eig = hermitian_eigendecomposition(&rho1, T::real(tol::HERMITICITY))?;

    let mut coefficients = Vec::new();
    let mut left_vectors = Vec::new();
    let mut right_vectors = Vec::new();
    for i in (0..d1).rev() {
        let lambda = left_eig.eigenvalues[i];
        if lambda <= T::real(tol::ENTROPY_CUTOFF) {
            continue;
        }
        let alpha = lambda.sqrt();
        let u = left_eig.eigenvector(i);
        // (u^H m) / alpha carries the matching phase so no further fixing is
        // needed for the expansion to reassemble psi.
        let v: Vec<Complex<T>> = (0..d2)
            .map(|j| {
                let mut acc: Complex<T> = Complex::zero();
                for r in 0..d1 {
                    acc = acc + u[r].conj() * m[(r, j)];
                }
                acc / Complex::new(alpha, T::zero())
            })
            .collect();
        coefficients.push(alpha);
        left_vectors.push(u);
        right_vectors.push(v);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
        d1,
        d2,
    })
}
