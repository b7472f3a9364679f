//! Classification of discord zeros.
//!
//! An interrogation on subsystem 2 can have zero discord in two distinct
//! ways. In the strong case the joint state is left completely untouched:
//! the lifted observable commutes with it, the state is a fixed point of the
//! dephasing, and no coherence is destroyed globally or locally. In the weak
//! case the interrogation does destroy local coherence, but destroys exactly
//! the same amount globally, so the balance `delta` still vanishes.
//!
//! The strong zeros of a given state form an algebra: the operators on
//! subsystem 2 whose lift commutes with the joint state. Its Hermitian part
//! is computed here as the nullspace of a Gram matrix of commutators, and
//! the eigenprojectors of a generic element of that nullspace give the
//! finest side-2 observable that leaves the state untouched. When all those
//! projectors have rank one, a complete (maximally fine) observable exists
//! with zero coherence in the state.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::info::{coherence, nonneg};
use crate::linalg::{
    commutator_norm, frobenius_distance, hermitian_eigendecomposition, outer, tensor_product,
    CMatrix,
};
use crate::scalar::Scalar;
use crate::state::{luders_mixture, BipartiteState, Observable};
use crate::tol;

/// Local coherence below which a vanishing discord counts as strong rather
/// than weak; between this floor and the zero threshold the case is treated
/// as unresolved and classified positive.
const WEAK_LOCAL_FLOOR: f64 = 1e-6;

/// Spectral gaps of the generic commutant element below this are one
/// cluster, above [`CLUSTER_SPLIT`] they separate clusters; gaps in between
/// are ambiguous and force a redraw.
const CLUSTER_MERGE: f64 = 1e-10;
const CLUSTER_SPLIT: f64 = 1e-6;

/// How a discord zero (or non-zero) came about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroDiscordKind {
    /// The interrogation leaves the joint state untouched.
    StrongZero,
    /// Local coherence is destroyed, but the global loss matches it exactly.
    WeakZero,
    /// Discord is strictly positive.
    Positive,
}

/// Discord of one interrogation together with every quantity the
/// classification rests on.
#[derive(Clone, Debug)]
pub struct DiscordClassification<T = f64> {
    pub kind: ZeroDiscordKind,
    pub discord: T,
    /// `I_C(1 kron A2, rho12)`.
    pub global_coherence: T,
    /// `I_C(A2, rho2)`.
    pub local_coherence: T,
    /// `||[1 kron A2, rho12]||` (Frobenius).
    pub commutator_norm: T,
    /// `||L(rho12) - rho12||` (Frobenius).
    pub fixed_point_residual: T,
}

/// Classifies the discord of `a2` in `s` as a strong zero, a weak zero, or
/// positive.
pub fn classify<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<DiscordClassification<T>> {
    if a2.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!("observable dim {} vs subsystem-2 dim {}", a2.dim(), s.d2()),
        });
    }
    let lifted = a2.lift(s.d1());
    let rho = s.state();
    let commutator = commutator_norm(&lifted.matrix(), rho.matrix());
    let dephased = luders_mixture(rho, &lifted)?;
    let fixed_point_residual =
        frobenius_distance(dephased.matrix(), rho.matrix()).expect("same dims");
    let global_coherence = coherence(&lifted, rho);
    let local_coherence = coherence(a2, &s.reduce2());
    let discord = nonneg(global_coherence - local_coherence);

    let zero = T::real(tol::IDENTITY);
    let kind = if commutator < zero
        && fixed_point_residual < zero
        && global_coherence < zero
        && local_coherence < zero
    {
        ZeroDiscordKind::StrongZero
    } else if discord < zero && local_coherence >= T::real(WEAK_LOCAL_FLOOR) {
        ZeroDiscordKind::WeakZero
    } else {
        ZeroDiscordKind::Positive
    };

    Ok(DiscordClassification {
        kind,
        discord,
        global_coherence,
        local_coherence,
        commutator_norm: commutator,
        fixed_point_residual,
    })
}

/// Hermitian-Schmidt basis of the operators on a `dim`-level system:
/// diagonal units, and normalized symmetric and antisymmetric pair units.
fn hermitian_operator_basis<T: Scalar>(dim: usize) -> Vec<CMatrix<T>> {
    let mut basis = Vec::with_capacity(dim * dim);
    let half = T::real(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..dim {
        let mut e = CMatrix::zeros(dim, dim);
        e[(i, i)] = Complex::new(T::one(), T::zero());
        basis.push(e);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut sym = CMatrix::zeros(dim, dim);
            sym[(i, j)] = Complex::new(half, T::zero());
            sym[(j, i)] = Complex::new(half, T::zero());
            basis.push(sym);

            let mut asym = CMatrix::zeros(dim, dim);
            asym[(i, j)] = Complex::new(T::zero(), half);
            asym[(j, i)] = Complex::new(T::zero(), -half);
            basis.push(asym);
        }
    }
    basis
}

/// Hilbert-Schmidt inner product `Re tr(a^dagger b)`.
fn hs_inner<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.adjoint().mul(b).trace().re
}

/// Orthonormal Hermitian basis of the subsystem-2 operators whose lift
/// commutes with the joint state: the nullspace, at `1e-8` relative
/// threshold, of the Gram matrix `G_ab = Re tr([1 kron E_a, rho]^dagger
/// [1 kron E_b, rho])`.
fn commutant_basis<T: Scalar>(s: &BipartiteState<T>) -> Result<Vec<CMatrix<T>>> {
    let d2 = s.d2();
    let id1 = CMatrix::identity(s.d1());
    let rho = s.state().matrix();
    let basis = hermitian_operator_basis::<T>(d2);
    let commutators: Vec<CMatrix<T>> = basis
        .iter()
        .map(|e| crate::linalg::commutator(&tensor_product(&id1, e), rho))
        .collect();

    let n = basis.len();
    let mut gram = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let g = hs_inner(&commutators[a], &commutators[b]);
            gram[(a, b)] = Complex::new(g, T::zero());
            gram[(b, a)] = Complex::new(g, T::zero());
        }
    }
    let eig = hermitian_eigendecomposition(&gram, T::real(tol::HERMITICITY))?;
    let max_eig = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    let threshold = if max_eig > T::real(1e-14) {
        max_eig * T::real(tol::IDENTITY)
    } else {
        // The state commutes with everything; keep the whole space.
        T::infinity()
    };

    let mut null_ops = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= threshold {
            let coeffs = eig.eigenvector(i);
            let mut op = CMatrix::zeros(d2, d2);
            for (a, e) in basis.iter().enumerate() {
                op = op.add(&e.scale_re(coeffs[a].re));
            }
            null_ops.push(op.hermitian_part());
        }
    }
    Ok(null_ops)
}

/// Eigenprojectors of a generic element of the commutant of the joint state
/// on subsystem 2: the finest side-2 partition whose blocks all commute with
/// the state. The generic element is a fixed-seed random combination of the
/// commutant basis, redrawn when its spectrum does not cluster decisively.
pub fn subsystem_commutant_projectors<T: Scalar>(
    s: &BipartiteState<T>,
) -> Result<Vec<CMatrix<T>>> {
    let null_ops = commutant_basis(s)?;
    let d2 = s.d2();
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab_c0de);

    for _ in 0..5 {
        let mut generic = CMatrix::zeros(d2, d2);
        for op in &null_ops {
            let g: f64 = rng.sample(StandardNormal);
            generic = generic.add(&op.scale_re(T::real(g)));
        }
        let eig = hermitian_eigendecomposition(&generic.hermitian_part(), T::real(tol::HERMITICITY))?;

        let mut ambiguous = false;
        let mut breaks = vec![0usize];
        for i in 1..d2 {
            let gap = eig.eigenvalues[i] - eig.eigenvalues[i - 1];
            if gap >= T::real(CLUSTER_SPLIT) {
                breaks.push(i);
            } else if gap >= T::real(CLUSTER_MERGE) {
                ambiguous = true;
            }
        }
        if ambiguous {
            continue;
        }
        breaks.push(d2);

        let mut projectors = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let mut p = CMatrix::zeros(d2, d2);
            for i in w[0]..w[1] {
                let v = eig.eigenvector(i);
                p = p.add(&outer(&v, &v));
            }
            projectors.push(p);
        }
        return Ok(projectors);
    }
    Err(Error::ToleranceExceeded {
        what: "commutant spectrum clustering".into(),
        residual: CLUSTER_MERGE,
        tol: CLUSTER_SPLIT,
    })
}

/// Whether the state is a nontrivial one-side-orthogonal mixture over the
/// branches of `a2`: the dephasing fixes the state and at least two branches
/// are detectable.
pub fn mono_orthogonality_certificate<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
) -> Result<bool> {
    if a2.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!("observable dim {} vs subsystem-2 dim {}", a2.dim(), s.d2()),
        });
    }
    let lifted = a2.lift(s.d1());
    let dephased = luders_mixture(s.state(), &lifted)?;
    let invariant = frobenius_distance(dephased.matrix(), s.state().matrix())
        .expect("same dims")
        < T::real(tol::IDENTITY);
    let detectable = a2
        .probabilities(&s.reduce2())?
        .into_iter()
        .filter(|&p| p > T::real(tol::DETECTABLE))
        .count();
    Ok(invariant && detectable >= 2)
}

/// Searches for a complete (rank-one) side-2 observable that leaves the
/// joint state untouched. Returns it when every projector of the generic
/// commutant element has rank one and the reconstruction
/// `sum_l (1 kron P_l) rho (1 kron P_l) = rho` verifies.
pub fn strong_zero_complete_observable<T: Scalar>(
    s: &BipartiteState<T>,
) -> Result<Option<Observable<T>>> {
    let projectors = subsystem_commutant_projectors(s)?;
    if projectors
        .iter()
        .any(|p| (p.trace().re - T::one()).abs() > T::real(0.5))
    {
        return Ok(None);
    }
    let obs = Observable::from_projectors(projectors)?;
    let dephased = luders_mixture(s.state(), &obs.lift(s.d1()))?;
    let residual = frobenius_distance(dephased.matrix(), s.state().matrix()).expect("same dims");
    if residual < T::real(tol::IDENTITY) {
        Ok(Some(obs))
    } else {
        Ok(None)
    }
}

/// Per-block split of the coherence and discord of an interrogation over a
/// block observable commuting with both the state and the interrogation.
#[derive(Clone, Debug)]
pub struct StatisticalDecompositionReport<T = f64> {
    /// Block weights, aligned with the block observable's branches.
    pub block_weights: Vec<T>,
    /// `|I_C(A2, rho2) - sum_b q_b I_C(A2, rho2_b)|`.
    pub local_residual: T,
    /// Same split for the lifted coherence on the joint state.
    pub global_residual: T,
    /// Same split for the discord.
    pub discord_residual: T,
}

impl<T: Scalar> StatisticalDecompositionReport<T> {
    pub fn max_residual(&self) -> T {
        self.local_residual
            .max(self.global_residual)
            .max(self.discord_residual)
    }
}

/// Verifies that coherence and discord split statistically over the blocks:
/// each block of `blocks` must commute with the joint state and with `a2`
/// (within [`tol::STRUCTURE`]), and then local coherence, global coherence,
/// and discord all equal their weighted per-block sums.
pub fn statistical_decomposition_check<T: Scalar>(
    s: &BipartiteState<T>,
    a2: &Observable<T>,
    blocks: &Observable<T>,
) -> Result<StatisticalDecompositionReport<T>> {
    if a2.dim() != s.d2() || blocks.dim() != s.d2() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "observable dims {} and {} vs subsystem-2 dim {}",
                a2.dim(),
                blocks.dim(),
                s.d2()
            ),
        });
    }
    let slack = T::real(tol::STRUCTURE);
    let id1 = CMatrix::identity(s.d1());
    let a2_matrix = a2.matrix();
    for (b, branch) in blocks.branches().iter().enumerate() {
        let lifted = tensor_product(&id1, &branch.projector);
        let with_state = commutator_norm(&lifted, s.state().matrix());
        if with_state > slack {
            return Err(Error::BlocksDoNotCommute {
                context: format!("block {b} vs joint state: residual {:.3e}", with_state.as_f64()),
            });
        }
        let with_obs = commutator_norm(&branch.projector, &a2_matrix);
        if with_obs > slack {
            return Err(Error::BlocksDoNotCommute {
                context: format!(
                    "block {b} vs interrogating observable: residual {:.3e}",
                    with_obs.as_f64()
                ),
            });
        }
    }

    let rho2 = s.reduce2();
    let block_weights = blocks.probabilities(&rho2)?;
    let lifted_a2 = a2.lift(s.d1());

    let mut local_sum = T::zero();
    let mut global_sum = T::zero();
    let mut discord_sum = T::zero();
    for (b, branch) in blocks.branches().iter().enumerate() {
        if block_weights[b] <= T::real(tol::DETECTABLE) {
            continue;
        }
        let lifted_block = tensor_product(&id1, &branch.projector);
        let (q, cond) = s.conditional(&lifted_block);
        let cond = cond.expect("detectable block");
        let local = coherence(a2, &cond.reduce2());
        let global = coherence(&lifted_a2, cond.state());
        local_sum = local_sum + q * local;
        global_sum = global_sum + q * global;
        discord_sum = discord_sum + q * nonneg(global - local);
    }

    let local_total = coherence(a2, &rho2);
    let global_total = coherence(&lifted_a2, s.state());
    let discord_total = nonneg(global_total - local_total);

    Ok(StatisticalDecompositionReport {
        block_weights,
        local_residual: (local_total - local_sum).abs(),
        global_residual: (global_total - global_sum).abs(),
        discord_residual: (discord_total - discord_sum).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DensityMatrix;
    use std::f64::consts::FRAC_1_SQRT_2;

    type M = CMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn bell() -> BipartiteState<f64> {
        BipartiteState::from_pure(
            &[c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            2,
            2,
        )
        .unwrap()
    }

    fn classical_classical() -> BipartiteState<f64> {
        BipartiteState::new(
            DensityMatrix::new(M::from_diag(&[0.5, 0.0, 0.0, 0.5])).unwrap(),
            2,
            2,
        )
        .unwrap()
    }

    fn x_basis() -> Observable<f64> {
        let s = FRAC_1_SQRT_2;
        Observable::from_basis(&[
            vec![c(s, 0.0), c(s, 0.0)],
            vec![c(s, 0.0), c(-s, 0.0)],
        ])
        .unwrap()
    }

    /// 1/2 entangled pair inside side-2 block {0,1} + 1/2 product state with
    /// a maximally mixed side-2 block {2,3}, on 2 x 4.
    fn block_state() -> BipartiteState<f64> {
        let h = FRAC_1_SQRT_2;
        // Entangled: (|0>|0> + |1>|1>)/sqrt2 with side-2 levels {0,1}.
        let mut ent = vec![c(0.0, 0.0); 8];
        ent[0] = c(h, 0.0);
        ent[4 + 1] = c(h, 0.0);
        let ent = DensityMatrix::from_pure(&ent).unwrap();
        // Product: |+><+| kron (|2><2| + |3><3|)/2.
        let plus = DensityMatrix::from_pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let half_mixed = M::from_diag(&[0.0, 0.0, 0.5, 0.5]);
        let product = tensor_product(&plus.matrix(), &half_mixed);
        let rho = DensityMatrix::new(ent.matrix().scale_re(0.5).add(&product.scale_re(0.5)))
            .unwrap();
        BipartiteState::new(rho, 2, 4).unwrap()
    }

    #[test]
    fn classical_state_with_its_own_basis_is_a_strong_zero() {
        let r = classify(&classical_classical(), &Observable::computational(2)).unwrap();
        assert_eq!(r.kind, ZeroDiscordKind::StrongZero);
        assert!(r.discord < 1e-10);
        assert!(r.global_coherence < 1e-10);
        assert!(r.local_coherence < 1e-10);
        assert!(r.commutator_norm < 1e-12);
        assert!(r.fixed_point_residual < 1e-12);
    }

    #[test]
    fn product_state_with_noncommuting_observable_is_a_weak_zero() {
        let s = BipartiteState::product(
            &DensityMatrix::new(M::from_diag(&[0.8, 0.2])).unwrap(),
            &DensityMatrix::new(M::from_diag(&[0.7, 0.3])).unwrap(),
        );
        let r = classify(&s, &x_basis()).unwrap();
        assert_eq!(r.kind, ZeroDiscordKind::WeakZero);
        assert!(r.discord < 1e-10);
        assert!(r.local_coherence > 0.1);
        assert!(r.global_coherence > 0.1);
        assert!(r.commutator_norm > 0.1);
    }

    #[test]
    fn bell_state_has_positive_discord() {
        let r = classify(&bell(), &Observable::computational(2)).unwrap();
        assert_eq!(r.kind, ZeroDiscordKind::Positive);
        assert!((r.discord - 1.0).abs() < 1e-9);
        assert!((r.global_coherence - 1.0).abs() < 1e-9);
        assert!(r.local_coherence < 1e-9);
    }

    #[test]
    fn commutant_of_classical_state_is_the_diagonal_algebra() {
        let ps = subsystem_commutant_projectors(&classical_classical()).unwrap();
        assert_eq!(ps.len(), 2);
        for p in &ps {
            assert!((p.trace().re - 1.0).abs() < 1e-9);
        }
        // Projectors diagonalize in the standard basis.
        let sum_offdiag: f64 = ps
            .iter()
            .map(|p| p[(0, 1)].norm_sqr() + p[(1, 0)].norm_sqr())
            .sum();
        assert!(sum_offdiag < 1e-16);
    }

    #[test]
    fn commutant_of_a_maximally_entangled_state_is_trivial() {
        let ps = subsystem_commutant_projectors(&bell()).unwrap();
        assert_eq!(ps.len(), 1);
        assert!(ps[0].approx_eq(&M::identity(2), 1e-9));
    }

    #[test]
    fn complete_strong_zero_observable_exists_for_classical_states() {
        let obs = strong_zero_complete_observable(&classical_classical())
            .unwrap()
            .expect("diagonal algebra has rank-one projectors");
        assert_eq!(obs.branch_count(), 2);
        let r = classify(&classical_classical(), &obs).unwrap();
        assert_eq!(r.kind, ZeroDiscordKind::StrongZero);
    }

    #[test]
    fn complete_strong_zero_observable_exists_for_mixed_side_of_a_product() {
        // Any basis works when side 2 is maximally mixed in a product state.
        let s = BipartiteState::product(
            &DensityMatrix::from_pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(),
            &DensityMatrix::maximally_mixed(2),
        );
        let obs = strong_zero_complete_observable(&s)
            .unwrap()
            .expect("everything commutes");
        let r = classify(&s, &obs).unwrap();
        assert_eq!(r.kind, ZeroDiscordKind::StrongZero);
    }

    #[test]
    fn entangled_block_forbids_a_complete_strong_zero_observable() {
        let s = block_state();
        let ps = subsystem_commutant_projectors(&s).unwrap();
        // The entangled block contributes one rank-2 projector; the mixed
        // product block splits into rank-1 pieces.
        let mut traces: Vec<f64> = ps.iter().map(|p| p.trace().re.round()).collect();
        traces.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(traces, vec![1.0, 1.0, 2.0]);
        assert!(strong_zero_complete_observable(&s).unwrap().is_none());

        // Yet the block observable itself is a nontrivial strong zero.
        let blocks = Observable::from_projectors(vec![
            M::from_diag(&[1.0, 1.0, 0.0, 0.0]),
            M::from_diag(&[0.0, 0.0, 1.0, 1.0]),
        ])
        .unwrap();
        let r = classify(&s, &blocks).unwrap();
        assert_eq!(r.kind, ZeroDiscordKind::StrongZero);
        assert!(mono_orthogonality_certificate(&s, &blocks).unwrap());
    }

    #[test]
    fn mono_orthogonality_needs_two_detectable_branches() {
        // Trivial observable fixes every state but has a single branch.
        let s = classical_classical();
        assert!(!mono_orthogonality_certificate(&s, &Observable::trivial(2)).unwrap());
        assert!(mono_orthogonality_certificate(&s, &Observable::computational(2)).unwrap());
        // A dephasing that moves the state certifies nothing.
        assert!(!mono_orthogonality_certificate(&s, &x_basis()).unwrap());
    }

    #[test]
    fn statistics_split_over_commuting_blocks() {
        let s = block_state();
        let blocks = Observable::from_projectors(vec![
            M::from_diag(&[1.0, 1.0, 0.0, 0.0]),
            M::from_diag(&[0.0, 0.0, 1.0, 1.0]),
        ])
        .unwrap();
        let report =
            statistical_decomposition_check(&s, &Observable::computational(4), &blocks).unwrap();
        assert!((report.block_weights[0] - 0.5).abs() < 1e-12);
        assert!((report.block_weights[1] - 0.5).abs() < 1e-12);
        assert!(report.max_residual() < 1e-9, "residual {}", report.max_residual());
    }

    #[test]
    fn noncommuting_blocks_are_rejected() {
        let err = statistical_decomposition_check(
            &classical_classical(),
            &Observable::computational(2),
            &x_basis(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BlocksDoNotCommute { .. }));
    }

    #[test]
    fn classification_checks_dimensions() {
        let err = classify(&bell(), &Observable::computational(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
