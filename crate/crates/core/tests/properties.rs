//! Randomized invariant checks for the numerical substrate and the
//! information identities, driven by seeded generators.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qcorr::coarsen::build_chain;
use qcorr::gen::{
    random_bipartite, random_complete_observable, random_density, random_observable,
    random_pure_bipartite, random_unitary,
};
use qcorr::info::{
    coherence_information, luders_mutual_info_check, mutual_info_decomposition,
    mutual_information, subsystem_entropy_decomposition, von_neumann_entropy, CoherenceMethod,
};
use qcorr::linalg::{commutator_norm, hermitian_eigendecomposition, tensor_product};
use qcorr::state::{
    luders_mixture, luders_selective, purify, range_projector, schmidt_decomposition,
    BipartiteState, Observable,
};
use qcorr::{tol, Matrix64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Hermitian matrix with entries of order one.
fn random_hermitian(dim: usize, r: &mut ChaCha8Rng) -> Matrix64 {
    let g: Matrix64 = random_unitary(dim, r);
    let d: qcorr::DensityMatrix64 = random_density(dim, dim, r).unwrap();
    g.mul(d.matrix()).add(&g.mul(d.matrix()).adjoint())
}

#[test]
fn eigendecomposition_reconstructs_up_to_dim_32() {
    let mut r = rng(0xe16e);
    for dim in [1, 2, 3, 5, 8, 13, 21, 32] {
        let m = random_hermitian(dim, &mut r);
        let eig = hermitian_eigendecomposition(&m, tol::HERMITICITY).unwrap();
        let v = &eig.eigenvectors;
        let lambda = Matrix64::from_diag(&eig.eigenvalues);
        let rebuilt = v.mul(&lambda).mul(&v.adjoint());
        assert!(
            rebuilt.sub(&m).frobenius_norm() < 1e-10 * (dim as f64),
            "reconstruction failed at dim {dim}"
        );
        assert!(v.adjoint().mul(v).approx_eq(&Matrix64::identity(dim), 1e-10));
        for w in eig.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}

/// Draws a state and an interrogating observable; even seeds pick a complete
/// observable, odd ones an incomplete split.
fn state_and_observable(
    seed: u64,
    d1: usize,
    d2: usize,
    rank: usize,
) -> (BipartiteState<f64>, Observable<f64>) {
    let mut r = rng(seed);
    let s = random_bipartite(d1, d2, rank, &mut r).unwrap();
    let a = if seed % 2 == 0 {
        random_complete_observable(d2, &mut r)
    } else {
        random_observable(d2, &mut r)
    };
    (s, a)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn luders_map_is_idempotent_commuting_and_entropy_increasing(
        seed in 0u64..1 << 48,
        d1 in 1usize..=3,
        d2 in 2usize..=4,
    ) {
        let rank = 1 + (seed as usize) % (d1 * d2);
        let (s, a) = state_and_observable(seed, d1, d2, rank);
        let lifted = a.lift(d1);
        let l = luders_mixture(s.state(), &lifted).unwrap();
        let ll = luders_mixture(&l, &lifted).unwrap();
        prop_assert!(ll.matrix().approx_eq(l.matrix(), 1e-10));
        prop_assert!((l.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(commutator_norm(l.matrix(), &lifted.matrix()) < 1e-9);
        prop_assert!(von_neumann_entropy(&l) >= von_neumann_entropy(s.state()) - 1e-9);
        // Interrogation statistics survive the dephasing.
        let before = lifted.probabilities(s.state()).unwrap();
        let after = lifted.probabilities(&l).unwrap();
        for (b, a) in before.iter().zip(after.iter()) {
            prop_assert!((b - a).abs() < 1e-10);
        }
    }

    #[test]
    fn selective_states_reassemble_the_luders_mixture(
        seed in 0u64..1 << 48,
        d1 in 1usize..=3,
        d2 in 2usize..=4,
    ) {
        let rank = 1 + (seed as usize) % (d1 * d2);
        let (s, a) = state_and_observable(seed, d1, d2, rank);
        let lifted = a.lift(d1);
        let dim = d1 * d2;
        let mut sum = Matrix64::zeros(dim, dim);
        for l in 0..lifted.branch_count() {
            let (p, cond) = luders_selective(s.state(), &lifted, l).unwrap();
            if let Some(cond) = cond {
                sum = sum.add(&cond.matrix().scale_re(p));
                // Conditional state lives inside its branch.
                let proj = lifted.projector(l);
                prop_assert!(
                    proj.mul(cond.matrix()).mul(proj).approx_eq(cond.matrix(), 1e-9)
                );
            } else {
                prop_assert!(p <= tol::DETECTABLE);
            }
        }
        let l = luders_mixture(s.state(), &lifted).unwrap();
        prop_assert!(sum.approx_eq(l.matrix(), 1e-9));
    }

    #[test]
    fn purification_restores_the_state(
        seed in 0u64..1 << 48,
        dim in 2usize..=5,
    ) {
        let rank = 1 + (seed as usize) % dim;
        let rho = random_density::<f64, _>(dim, rank, &mut rng(seed)).unwrap();
        let pure = purify(&rho);
        prop_assert!((pure.state().purity() - 1.0).abs() < 1e-9);
        prop_assert_eq!(pure.d1(), rho.rank(tol::RANK));
        prop_assert!(pure.reduce2().matrix().sub(rho.matrix()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn schmidt_decomposition_reconstructs_pure_states(
        seed in 0u64..1 << 48,
        d1 in 2usize..=4,
        d2 in 2usize..=4,
    ) {
        let s = random_pure_bipartite(d1, d2, &mut rng(seed)).unwrap();
        let schmidt = schmidt_decomposition(&s, 1e-9).unwrap();
        let weight: f64 = schmidt.coefficients.iter().map(|a| a * a).sum();
        prop_assert!((weight - 1.0).abs() < 1e-10);
        for w in schmidt.coefficients.windows(2) {
            prop_assert!(w[0] >= w[1]);
            prop_assert!(w[1] > 0.0);
        }
        prop_assert!(schmidt.projector().approx_eq(s.state().matrix(), 1e-9));
    }

    #[test]
    fn range_projector_carries_the_state(
        seed in 0u64..1 << 48,
        dim in 2usize..=6,
    ) {
        let rank = 1 + (seed as usize) % dim;
        let rho = random_density(dim, rank, &mut rng(seed)).unwrap();
        let q = range_projector(&rho, tol::RANK);
        prop_assert!(q.mul(&q).approx_eq(&q, 1e-9));
        prop_assert!(q.mul(rho.matrix()).mul(&q).approx_eq(rho.matrix(), 1e-9));
        prop_assert!((q.trace().re - rank as f64).abs() < 1e-6);
    }

    #[test]
    fn coherence_methods_agree(
        seed in 0u64..1 << 48,
        dim in 2usize..=6,
    ) {
        let mut r = rng(seed);
        let rank = 1 + (seed as usize) % dim;
        let rho = random_density::<f64, _>(dim, rank, &mut r).unwrap();
        let a = if seed % 2 == 0 {
            random_complete_observable(dim, &mut r)
        } else {
            random_observable(dim, &mut r)
        };
        let by_entropy = coherence_information(&a, &rho, CoherenceMethod::EntropyIncrease).unwrap();
        let by_relative = coherence_information(&a, &rho, CoherenceMethod::RelativeEntropy).unwrap();
        let by_mixing = coherence_information(&a, &rho, CoherenceMethod::MixingGap).unwrap();
        prop_assert!((by_entropy - by_relative).abs() < 1e-8);
        prop_assert!((by_entropy - by_mixing).abs() < 1e-8);
    }

    #[test]
    fn mutual_information_splits_and_dephasing_only_loses_discord(
        seed in 0u64..1 << 48,
        d1 in 1usize..=4,
        d2 in 2usize..=4,
    ) {
        let rank = 1 + (seed as usize) % (d1 * d2);
        let (s, a) = state_and_observable(seed, d1, d2, rank);
        let d = mutual_info_decomposition(&s, &a).unwrap();
        prop_assert!(d.identity_residual() < 1e-8);
        prop_assert!(d.information_gain >= 0.0);
        prop_assert!(d.discord >= 0.0);
        prop_assert!(d.residual >= 0.0);
        let report = luders_mutual_info_check(&s, &a).unwrap();
        prop_assert!(report.identity_residual() < 1e-8);
        prop_assert!(report.monotonicity_violation() < 1e-9);
        let entropy = subsystem_entropy_decomposition(&s, &a).unwrap();
        prop_assert!(entropy.max_residual() < 1e-8);
    }

    #[test]
    fn mutual_information_is_invariant_under_local_unitaries(
        seed in 0u64..1 << 48,
        d1 in 2usize..=3,
        d2 in 2usize..=3,
    ) {
        let mut r = rng(seed);
        let rank = 1 + (seed as usize) % (d1 * d2);
        let s = random_bipartite::<f64, _>(d1, d2, rank, &mut r).unwrap();
        let u1: Matrix64 = random_unitary(d1, &mut r);
        let u2: Matrix64 = random_unitary(d2, &mut r);
        let u = tensor_product(&u1, &u2);
        let rotated = BipartiteState::new(
            qcorr::DensityMatrix64::new(
                u.mul(s.state().matrix()).mul(&u.adjoint()).hermitian_part(),
            )
            .unwrap(),
            d1,
            d2,
        )
        .unwrap();
        prop_assert!((mutual_information(&rotated) - mutual_information(&s)).abs() < 1e-9);
    }

    #[test]
    fn entropies_respect_subadditivity_and_the_triangle_bound(
        seed in 0u64..1 << 48,
        d1 in 2usize..=4,
        d2 in 2usize..=4,
    ) {
        let rank = 1 + (seed as usize) % (d1 * d2);
        let s = random_bipartite::<f64, _>(d1, d2, rank, &mut rng(seed)).unwrap();
        let s1 = von_neumann_entropy(&s.reduce1());
        let s2 = von_neumann_entropy(&s.reduce2());
        let s12 = von_neumann_entropy(s.state());
        prop_assert!(s12 <= s1 + s2 + 1e-9);
        prop_assert!((s1 - s2).abs() <= s12 + 1e-9);
    }

    #[test]
    fn chain_ledger_is_nonnegative_and_accounts_for_all_statistics(
        seed in 0u64..1 << 48,
        d1 in 1usize..=3,
        d2 in 2usize..=3,
    ) {
        let rank = 1 + (seed as usize) % (d1 * d2);
        let (s, a) = state_and_observable(seed, d1, d2, rank);
        let chain = build_chain(&s, &a).unwrap();
        let ledger = &chain.ledger;
        for part in [
            ledger.redundant,
            ledger.essential,
            ledger.garbled,
            ledger.pure_quantum,
            ledger.quasi_classical,
        ] {
            prop_assert!(part >= 0.0);
        }
        let h = qcorr::info::shannon_entropy(&chain.input_probabilities).unwrap();
        prop_assert!((ledger.total() - h).abs() < 1e-8);
    }
}

#[test]
fn bell_decomposition_holds_in_single_precision() {
    let (s, a) = qcorr::gen::fixture_state::<f32>(&qcorr::Fixture::Bell, 0).unwrap();
    let d = mutual_info_decomposition(&s, &a).unwrap();
    assert!((d.mutual_information - 2.0).abs() < 1e-3);
    assert!((d.information_gain - 1.0).abs() < 1e-3);
    assert!((d.discord - 1.0).abs() < 1e-3);
    assert!(d.residual.abs() < 1e-3);
}
